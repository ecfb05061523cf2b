use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thetapi::spaces::{read_matrix_csv, read_points_csv, FiniteMetricSpace, Metric, Sidecar};

use crate::{Failure, SpaceArgs};

/// Files written so far, removed again if the run fails.
#[derive(Default)]
pub struct Outputs {
    written: Vec<PathBuf>,
}

impl Outputs {
    /// Writes to `path`, or to stdout when there is none.
    pub fn emit(&mut self, path: Option<&Path>, content: &str) -> Result<(), Failure> {
        match path {
            Some(p) => {
                self.written.push(p.to_path_buf());
                fs::write(p, content).map_err(|e| Failure::validation(format!("cannot write {}: {e}", p.display())))
            }
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(content.as_bytes())
                    .and_then(|_| out.flush())
                    .map_err(|e| Failure::validation(format!("stdout: {e}")))
            }
        }
    }

    pub fn emit_json(&mut self, path: Option<&Path>, value: &Value) -> Result<(), Failure> {
        let mut s = serde_json::to_string_pretty(value).map_err(|e| Failure::internal(e.to_string()))?;
        s.push('\n');
        self.emit(path, &s)
    }

    pub fn remove_all(&mut self) {
        for p in self.written.drain(..) {
            let _ = fs::remove_file(p);
        }
    }
}

/// `cloud.csv` -> `cloud.meta.json`.
pub fn sidecar_path(p: &Path) -> PathBuf {
    p.with_extension("meta.json")
}

pub fn file_hash(p: &Path) -> Result<String, Failure> {
    let bytes = fs::read(p).map_err(|e| Failure::validation(format!("cannot read {}: {e}", p.display())))?;
    Ok(format!("{:x}", Sha256::digest(bytes)))
}

/// A loaded space with the sampling spacing, if known.
pub struct Loaded {
    pub space: FiniteMetricSpace,
    pub spacing: Option<f64>,
}

fn looks_numeric(line: &str) -> bool {
    line.split(',').all(|f| f.trim().parse::<f64>().is_ok())
}

pub fn load_space(args: &SpaceArgs) -> Result<Loaded, Failure> {
    load_space_at(&args.input, args.metric.as_deref(), args.basepoint)
}

pub fn load_space_at(path: &Path, metric: Option<&str>, basepoint: Option<usize>) -> Result<Loaded, Failure> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let sidecar: Option<Sidecar> = match fs::read_to_string(sidecar_path(path)) {
        Ok(s) => Some(serde_json::from_str(&s).with_context(|| "bad sidecar")?),
        Err(_) => None,
    };
    let first = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
    let bp = basepoint.or(sidecar.as_ref().map(|s| s.basepoint)).unwrap_or(0);
    let space = if looks_numeric(first) {
        read_matrix_csv(text.as_bytes(), bp)?
    } else {
        let name = metric
            .map(str::to_string)
            .or(sidecar.as_ref().map(|s| s.metric.clone()))
            .unwrap_or_else(|| "euclidean".into());
        let metric: Metric = name.parse()?;
        read_points_csv(text.as_bytes(), metric, bp)?
    };
    let spacing = sidecar.as_ref().and_then(|s| s.spacing);
    let space = match sidecar {
        Some(s) => space.with_info(s.info()),
        None => space,
    };
    Ok(Loaded { space, spacing })
}

/// Provenance block embedded in every JSON artifact.
pub fn run_info(command: &str, space: Option<&FiniteMetricSpace>, inputs: &[(&str, &Path)], params: Value) -> Result<Value, Failure> {
    let mut files = serde_json::Map::new();
    for (name, p) in inputs {
        files.insert(
            (*name).into(),
            json!({ "path": p.display().to_string(), "sha256": file_hash(p)? }),
        );
    }
    Ok(json!({
        "tool": "thetapi",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "space_hash": space.map(FiniteMetricSpace::content_hash),
        "inputs": files,
        "params": params,
    }))
}

/// Adds `run` to a serialized artifact.
pub fn with_run(mut value: Value, run: Value) -> Value {
    if let Value::Object(m) = &mut value {
        m.insert("run".into(), run);
    }
    value
}

pub fn to_value<T: serde::Serialize>(x: &T) -> Result<Value, Failure> {
    serde_json::to_value(x).map_err(|e| Failure::internal(e.to_string()))
}

pub fn read_json<T: serde::de::DeserializeOwned>(p: &Path) -> Result<T, Failure> {
    let s = fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))?;
    Ok(serde_json::from_str(&s).with_context(|| format!("cannot parse {}", p.display()))?)
}

/// Hints when the scale is close to the sampling resolution.
pub fn check_resolution(ctx: &crate::Ctx, loaded: &Loaded, theta: f64) {
    if let Some(s) = loaded.spacing {
        if theta < 3.0 * s {
            eprintln!("thetapi: warning: theta {theta} is below 3x the sample spacing {s}");
        }
    }
    ctx.note(format!("{} points, hash {}", loaded.space.len(), loaded.space.content_hash()));
}
