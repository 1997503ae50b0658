use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use convnls_core::propagator::CODE_VERSION;

use crate::error::{CliError, CliResult};

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, text).map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
}

/// Wraps `body` with the version and the resolved config.
pub fn report(config: &impl Serialize, body: Value) -> CliResult<Value> {
    let mut v = json!({ "version": CODE_VERSION, "config": config });
    if let (Value::Object(dst), Value::Object(src)) = (&mut v, body) {
        dst.extend(src);
    }
    Ok(v)
}

/// Pretty JSON to `path`, or stdout.
pub fn emit_json(path: Option<&Path>, v: &Value) -> CliResult<()> {
    let text = serde_json::to_string_pretty(v)? + "\n";
    match path {
        Some(p) => write_text(p, &text),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

/// Resolved config as flat TOML; loadable again through `--config`.
pub fn save_config(path: Option<&Path>, config: &impl Serialize) -> CliResult<()> {
    let Some(p) = path else { return Ok(()) };
    let text = toml::to_string(config).map_err(|e| CliError::Config(format!("serialising config: {e}")))?;
    write_text(p, &text)
}

/// Single-line JSON for CSV comment headers.
pub fn config_line(config: &impl Serialize) -> CliResult<String> {
    Ok(serde_json::to_string(config)?)
}
