//! Bundled configurations and trained generator angles.

pub const NAMES: [&str; 4] = ["paper-n6", "fig9", "qgan-l12", "qgan-l20"];

pub fn preset(name: &str) -> Option<&'static str> {
    Some(match name {
        "paper-n6" => include_str!("../presets/paper-n6.json"),
        "fig9" => include_str!("../presets/fig9.json"),
        "qgan-l12" => include_str!("../presets/qgan-l12.json"),
        "qgan-l20" => include_str!("../presets/qgan-l20.json"),
        _ => return None,
    })
}

/// Generator angles from a `qgan-l20` training run, seed 0.
pub const QGAN_L20_PARAMS: &str = include_str!("../presets/qgan-l20-params.json");
