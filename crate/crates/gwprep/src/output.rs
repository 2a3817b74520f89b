//! CSV and JSON writers.

use std::fs;
use std::path::PathBuf;

use gwprep_core::gatecost::RatioRow;
use gwprep_core::qgan::TrainHistory;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::CliError;

/// Output directory, created on first write.
#[derive(Clone, Debug)]
pub struct OutputDir {
    root: PathBuf,
}

impl OutputDir {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        OutputDir { root: root.into() }
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    fn create(&self, name: &str) -> Result<PathBuf, CliError> {
        fs::create_dir_all(&self.root)?;
        Ok(self.path(name))
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<PathBuf, CliError> {
        let path = self.create(name)?;
        let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::internal(e.to_string()))?;
        text.push('\n');
        fs::write(&path, text)?;
        Ok(path)
    }

    pub fn write_text(&self, name: &str, text: &str) -> Result<PathBuf, CliError> {
        let path = self.create(name)?;
        fs::write(&path, text)?;
        Ok(path)
    }

    fn csv(&self, name: &str) -> Result<csv::Writer<fs::File>, CliError> {
        Ok(csv::Writer::from_path(self.create(name)?)?)
    }

    /// `j, f_hz, amplitude, phase, re, im, mass`.
    pub fn write_target(&self, name: &str, freqs: &[f64], amps: &[f64], phases: &[f64]) -> Result<PathBuf, CliError> {
        let mut w = self.csv(name)?;
        w.write_record(["j", "f_hz", "amplitude", "phase", "re", "im", "mass"])?;
        for j in 0..freqs.len() {
            let z = Complex64::from_polar(amps[j], phases[j]);
            w.write_record(&[
                j.to_string(),
                freqs[j].to_string(),
                amps[j].to_string(),
                phases[j].to_string(),
                z.re.to_string(),
                z.im.to_string(),
                (amps[j] * amps[j]).to_string(),
            ])?;
        }
        w.flush()?;
        Ok(self.path(name))
    }

    /// `j, f_hz, re, im, target_re, target_im`.
    pub fn write_statevector(
        &self,
        name: &str,
        freqs: &[f64],
        state: &[Complex64],
        target: &[Complex64],
    ) -> Result<PathBuf, CliError> {
        let mut w = self.csv(name)?;
        w.write_record(["j", "f_hz", "re", "im", "target_re", "target_im"])?;
        for j in 0..freqs.len() {
            w.write_record(&[
                j.to_string(),
                freqs[j].to_string(),
                state[j].re.to_string(),
                state[j].im.to_string(),
                target[j].re.to_string(),
                target[j].im.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(self.path(name))
    }

    /// `iter, L_G, L_D, mismatch`.
    pub fn write_history(&self, name: &str, history: &TrainHistory) -> Result<PathBuf, CliError> {
        let mut w = self.csv(name)?;
        w.write_record(["iter", "L_G", "L_D", "mismatch"])?;
        for i in 0..history.len() {
            w.write_record(&[
                i.to_string(),
                history.generator_loss[i].to_string(),
                history.discriminator_loss[i].to_string(),
                history.mismatch[i].to_string(),
            ])?;
        }
        w.flush()?;
        Ok(self.path(name))
    }

    /// `T_seconds, n, cnots_arbitrary, cnots_gr, cnots_pqc, ratio_gr, ratio_pqc`.
    pub fn write_cost(&self, name: &str, rows: &[RatioRow]) -> Result<PathBuf, CliError> {
        let mut w = self.csv(name)?;
        w.write_record(["T_seconds", "n", "cnots_arbitrary", "cnots_gr", "cnots_pqc", "ratio_gr", "ratio_pqc"])?;
        for r in rows {
            w.write_record(&[
                r.t_seconds.to_string(),
                r.n.to_string(),
                r.cnots_arbitrary.to_string(),
                r.cnots_gr.to_string(),
                r.cnots_pqc.to_string(),
                r.ratio_gr.to_string(),
                r.ratio_pqc.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(self.path(name))
    }
}

