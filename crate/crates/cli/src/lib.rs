//! Batch runner: reads an experiment config, runs one construction, and writes
//! `certificates.csv` and `report.md`.

pub mod commands;
pub mod config;

use std::path::{Path, PathBuf};

use chainrec::report::{CertificateLog, Table};

pub use config::{Command, ExperimentConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Capability(String),
    #[error("{0}")]
    Certificate(String),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 for bad input, 3 for unsupported operators, 1 for failed certificates.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Io { .. } => 2,
            CliError::Capability(_) => 3,
            CliError::Certificate(_) => 1,
        }
    }
}

impl From<chainrec::Error> for CliError {
    fn from(e: chainrec::Error) -> Self {
        use chainrec::Error as E;
        let msg = e.to_string();
        let mut root = &e;
        while let E::Factory { source, .. } = root {
            root = source;
        }
        match root {
            E::Parse(_) | E::Config(_) | E::Domain(_) => CliError::Parse(msg),
            E::Unsupported(_) => CliError::Capability(msg),
            _ => CliError::Certificate(msg),
        }
    }
}

/// What a command produced: the checked rows, tables for the report, and free-form notes.
#[derive(Debug, Default)]
pub struct Outcome {
    pub title: String,
    pub notes: Vec<String>,
    pub log: CertificateLog,
    pub tables: Vec<Table>,
}

impl Outcome {
    pub fn new(title: impl Into<String>) -> Self {
        Outcome { title: title.into(), ..Default::default() }
    }

    pub fn report(&self, cfg: &ExperimentConfig) -> String {
        let mut out = format!("# {}\n\n", self.title);
        out += &format!("- command: `{}`\n", cfg.command);
        out += &format!("- operator: `{}`\n", cfg.operator.to_json());
        out += &format!("- norm: ℓ{}\n", cfg.norm.label());
        if let Some(s) = cfg.seed {
            out += &format!("- seed: {s}\n");
        }
        let failed = self.log.rows.iter().filter(|r| !r.ok).count();
        out += &format!("- checks: {} run, {} failed\n\n", self.log.rows.len(), failed);
        for n in &self.notes {
            out += &format!("{n}\n\n");
        }
        if let Some(f) = self.log.first_failure() {
            out += &format!("**First failure:** {} / {} at {}: {} against {}\n\n", f.check, f.subject, f.index, f.value, f.bound);
        }
        for t in &self.tables {
            out += &t.to_markdown();
            out += "\n";
        }
        out
    }
}

/// Runs the command and writes its artifacts into `out`. Artifacts are written whenever the
/// command got as far as checking something, so failures can be inspected.
pub fn run(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome, CliError> {
    let outcome = commands::dispatch(cfg)?;
    write_artifacts(cfg, &outcome, out)?;
    if let Some(f) = outcome.log.first_failure() {
        return Err(CliError::Certificate(format!(
            "{} failed for {} at {}: {} against {}",
            f.check, f.subject, f.index, f.value, f.bound
        )));
    }
    Ok(outcome)
}

pub fn write_artifacts(cfg: &ExperimentConfig, outcome: &Outcome, out: &Path) -> Result<(), CliError> {
    let io = |path: PathBuf| move |source| CliError::Io { path, source };
    std::fs::create_dir_all(out).map_err(io(out.to_path_buf()))?;
    let csv_path = out.join("certificates.csv");
    std::fs::write(&csv_path, outcome.log.to_csv()?).map_err(io(csv_path.clone()))?;
    let md_path = out.join("report.md");
    std::fs::write(&md_path, outcome.report(cfg)).map_err(io(md_path.clone()))?;
    Ok(())
}
