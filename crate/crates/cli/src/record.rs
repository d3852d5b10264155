use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use crate::error::CliError;

fn now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

/// Provenance of one command invocation, written as `run_<command>.txt`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub command: String,
    pub config_hash: String,
    pub started: f64,
    pub finished: Option<f64>,
    /// `(stage, "ok" | "failed")` in execution order.
    pub stages: Vec<(String, String)>,
    pub artifacts: Vec<PathBuf>,
    pub error: Option<String>,
}

impl RunRecord {
    pub fn new(command: &str, config_hash: &str) -> Self {
        RunRecord {
            command: command.to_string(),
            config_hash: config_hash.to_string(),
            started: now(),
            finished: None,
            stages: Vec::new(),
            artifacts: Vec::new(),
            error: None,
        }
    }

    pub fn succeeded(&self) -> bool {
        self.finished.is_some() && self.error.is_none()
    }

    /// Records the outcome of a stage, tagging any error with its name.
    pub fn stage<T>(&mut self, name: &'static str, result: gapbridge_core::Result<T>) -> Result<T, CliError> {
        match result {
            Ok(v) => {
                self.stages.push((name.to_string(), "ok".into()));
                Ok(v)
            }
            Err(source) => {
                self.stages.push((name.to_string(), "failed".into()));
                Err(CliError::Stage { stage: name, source })
            }
        }
    }

    pub fn artifact(&mut self, path: &Path) {
        self.artifacts.push(path.to_path_buf());
    }

    pub fn finish(&mut self, outcome: &Result<(), CliError>) {
        self.finished = Some(now());
        if let Err(e) = outcome {
            self.error = Some(e.to_string());
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command={}", self.command);
        let _ = writeln!(out, "config_sha256={}", self.config_hash);
        let _ = writeln!(out, "started={:.3}", self.started);
        if let Some(f) = self.finished {
            let _ = writeln!(out, "finished={f:.3}");
        }
        let status = if self.succeeded() { "ok" } else { "failed" };
        let _ = writeln!(out, "status={status}");
        for (s, st) in &self.stages {
            let _ = writeln!(out, "stage.{s}={st}");
        }
        if let Some(e) = &self.error {
            let _ = writeln!(out, "error={}", e.replace('\n', " "));
        }
        for a in &self.artifacts {
            let _ = writeln!(out, "artifact={}", a.display());
        }
        out
    }

    pub fn save(&self, dir: &Path) -> std::io::Result<PathBuf> {
        fs::create_dir_all(dir)?;
        let path = dir.join(format!("run_{}.txt", self.command));
        fs::write(&path, self.render())?;
        Ok(path)
    }
}
