//! Output artifacts and error classification.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use ibt_core::IbtError;
use serde::Serialize;

/// Overrides the directory for default and relative output paths.
pub const OUT_DIR_ENV: &str = "IBT_OUT_DIR";

#[derive(Debug)]
pub enum Failure {
    Invalid(String),
    Numeric(String),
    Output(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Numeric(_) => 1,
            Failure::Invalid(_) => 2,
            Failure::Output(_) => 3,
        }
    }

    pub fn message(&self) -> String {
        let m = match self {
            Failure::Invalid(m) | Failure::Numeric(m) | Failure::Output(m) => m,
        };
        // keep diagnostics on one line
        m.replace('\n', " ")
    }
}

impl From<IbtError> for Failure {
    fn from(e: IbtError) -> Self {
        match e {
            IbtError::InvalidParameter { .. } | IbtError::Domain { .. } => Failure::Invalid(e.to_string()),
            _ => Failure::Numeric(e.to_string()),
        }
    }
}

pub fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Invalid(msg.into())
}

/// Where an artifact goes: an explicit `--out`, else `$IBT_OUT_DIR/<default>`,
/// else stdout. Relative `--out` paths are taken inside `$IBT_OUT_DIR` when
/// it is set.
pub fn resolve(out: Option<&Path>, default_name: &str) -> Option<PathBuf> {
    let dir = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from);
    match (out, dir) {
        (Some(p), Some(d)) if p.is_relative() => Some(d.join(p)),
        (Some(p), _) => Some(p.to_path_buf()),
        (None, Some(d)) => Some(d.join(default_name)),
        (None, None) => None,
    }
}

/// An opened destination. Files are created before any computation so an
/// unwritable path fails fast.
pub struct Sink {
    path: Option<PathBuf>,
    w: Box<dyn Write>,
}

impl Sink {
    pub fn open(out: Option<&Path>, default_name: &str) -> Result<Sink, Failure> {
        match resolve(out, default_name) {
            Some(path) => {
                let f = File::create(&path)
                    .map_err(|e| Failure::Output(format!("cannot write {}: {e}", path.display())))?;
                Ok(Sink {
                    path: Some(path),
                    w: Box::new(BufWriter::new(f)),
                })
            }
            None => Ok(Sink {
                path: None,
                w: Box::new(BufWriter::new(io::stdout())),
            }),
        }
    }

    fn fail(&self, e: io::Error) -> Failure {
        let where_ = self.path.as_ref().map_or("stdout".to_string(), |p| p.display().to_string());
        Failure::Output(format!("cannot write {where_}: {e}"))
    }

    pub fn json<T: Serialize>(mut self, value: &T) -> Result<(), Failure> {
        let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Numeric(e.to_string()))?;
        writeln!(self.w, "{text}").map_err(|e| self.fail(e))?;
        self.w.flush().map_err(|e| self.fail(e))
    }

    /// CSV with `#` comment lines carrying the artifact header.
    pub fn csv<H: Serialize>(mut self, header: &H, columns: &[&str], rows: impl Iterator<Item = Vec<f64>>) -> Result<(), Failure> {
        let head = serde_json::to_string(header).map_err(|e| Failure::Numeric(e.to_string()))?;
        let mut body = String::new();
        body.push_str("# ");
        body.push_str(&head);
        body.push('\n');
        body.push_str(&columns.join(","));
        body.push('\n');
        self.w.write_all(body.as_bytes()).map_err(|e| self.fail(e))?;
        for row in rows {
            let line: Vec<String> = row.iter().map(|v| format_value(*v)).collect();
            writeln!(self.w, "{}", line.join(",")).map_err(|e| self.fail(e))?;
        }
        self.w.flush().map_err(|e| self.fail(e))
    }
}

/// Integers print without a fraction; other values round-trip exactly.
fn format_value(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v:e}")
    }
}

/// The header shared by every artifact.
#[derive(Serialize)]
pub struct Artifact<'a, C: Serialize, R: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub core_version: &'static str,
    pub command: &'a str,
    pub config: &'a C,
    #[serde(flatten)]
    pub result: R,
}

pub fn artifact<'a, C: Serialize, R: Serialize>(command: &'a str, config: &'a C, result: R) -> Artifact<'a, C, R> {
    Artifact {
        tool: "ibt",
        version: env!("CARGO_PKG_VERSION"),
        core_version: ibt_core::VERSION,
        command,
        config,
        result,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_format_compactly() {
        assert_eq!(format_value(3.0), "3");
        assert_eq!(format_value(-12.0), "-12");
        assert_eq!(format_value(0.25), "2.5e-1");
        let v = 0.1 + 0.2;
        assert_eq!(format_value(v).parse::<f64>().unwrap(), v);
    }

    #[test]
    fn failure_codes() {
        assert_eq!(invalid("x").code(), 2);
        assert_eq!(Failure::Numeric("x".into()).code(), 1);
        assert_eq!(Failure::Output("a\nb".into()).message(), "a b");
    }
}
