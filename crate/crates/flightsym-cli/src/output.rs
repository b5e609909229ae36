//! CSV and manifest emission. Numbers are written with 17 significant
//! digits so every double survives the round trip.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Provenance carried by the `#` header of every CSV.
#[derive(Clone, Debug)]
pub struct Provenance<'a> {
    pub command: &'a str,
    pub case: &'a str,
    pub convention: &'a str,
    pub fingerprint: String,
}

impl Provenance<'_> {
    fn header(&self) -> String {
        format!(
            "# flightsym {VERSION} command={} case={} convention={} fingerprint=\"{}\"",
            self.command, self.case, self.convention, self.fingerprint
        )
    }
}

/// Column-oriented numeric table; the first column is the abscissa.
pub struct Columns {
    pub names: Vec<String>,
    pub data: Vec<Vec<f64>>,
}

impl Columns {
    pub fn new(first: &str, values: Vec<f64>) -> Self {
        Self {
            names: vec![first.to_string()],
            data: vec![values],
        }
    }

    pub fn push(&mut self, name: impl Into<String>, values: Vec<f64>) {
        debug_assert_eq!(values.len(), self.data[0].len());
        self.names.push(name.into());
        self.data.push(values);
    }

    pub fn rows(&self) -> Vec<Vec<String>> {
        (0..self.data[0].len())
            .map(|i| self.data.iter().map(|c| num(c[i])).collect())
            .collect()
    }
}

pub struct RunOutput {
    dir: PathBuf,
    command: String,
    threads: usize,
    files: Vec<String>,
    notes: Vec<String>,
}

impl RunOutput {
    pub fn new(dir: &Path, command: &str, threads: usize) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            command: command.to_string(),
            threads,
            files: Vec::new(),
            notes: Vec::new(),
        })
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub fn write_csv(
        &mut self,
        name: &str,
        prov: &Provenance,
        header: &[String],
        rows: &[Vec<String>],
    ) -> Result<()> {
        let mut text = prov.header();
        text.push('\n');
        text.push_str(&header.join(","));
        text.push('\n');
        for r in rows {
            text.push_str(&r.join(","));
            text.push('\n');
        }
        let path = self.dir.join(name);
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn write_columns(&mut self, name: &str, prov: &Provenance, cols: &Columns) -> Result<()> {
        self.write_csv(name, prov, &cols.names, &cols.rows())
    }

    /// Writes `<command>.manifest`. Everything but the resolved settings is
    /// a comment, so the manifest doubles as a config file for a rerun.
    pub fn finish(self, config_text: &str) -> Result<PathBuf> {
        let path = self.dir.join(format!("{}.manifest", self.command));
        let mut f =
            fs::File::create(&path).with_context(|| format!("writing {}", path.display()))?;
        writeln!(f, "# flightsym {VERSION} run manifest")?;
        writeln!(f, "# command = {}", self.command)?;
        writeln!(f, "# threads = {}", self.threads)?;
        for file in &self.files {
            writeln!(f, "# file = {file}")?;
        }
        for n in &self.notes {
            writeln!(f, "# note = {n}")?;
        }
        f.write_all(config_text.as_bytes())?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [
            0.1,
            75.29111823,
            -1e-300,
            6.02214076e23,
            f64::MIN_POSITIVE,
            1.0 / 3.0,
        ] {
            let s = num(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let mantissa = s.split('e').next().unwrap().replace(['-', '.'], "");
            assert_eq!(mantissa.len(), 17, "{s}");
        }
    }
}
