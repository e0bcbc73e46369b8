//! `key = value` config files, merged into the command line as long flags.

use std::path::Path;

/// Reads `path` and turns each entry into flag arguments. Keys are long flag
/// names with `_` or `-`; `true`/`false` switch boolean flags on or off.
pub fn config_args(path: &Path) -> Result<Vec<String>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<Vec<String>, String> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected `key = value`", n + 1))?;
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        if key.is_empty() || key.contains(char::is_whitespace) {
            return Err(format!("config line {}: bad key `{key}`", n + 1));
        }
        if key == "config" {
            return Err(format!("config line {}: nested config files are not supported", n + 1));
        }
        match value {
            "true" => out.push(format!("--{key}")),
            "false" => {}
            v => {
                out.push(format!("--{key}"));
                out.push(v.to_string());
            }
        }
    }
    Ok(out)
}

/// Value of the last `--config` flag on the raw command line.
pub fn config_path(argv: &[String]) -> Option<String> {
    let mut found = None;
    let mut it = argv.iter().skip(1);
    while let Some(a) = it.next() {
        if a == "--config" {
            found = it.next().cloned();
        } else if let Some(v) = a.strip_prefix("--config=") {
            found = Some(v.to_string());
        }
    }
    found
}

/// Inserts `extra` right after the subcommand name so that flags given on
/// the command line, which come later, take precedence.
pub fn merge(argv: &[String], extra: Vec<String>) -> Vec<String> {
    let mut i = 1;
    while i < argv.len() {
        let a = &argv[i];
        if (a == "--threads" || a == "--config") && i + 1 < argv.len() {
            i += 2;
        } else if a.starts_with('-') {
            i += 1;
        } else {
            break;
        }
    }
    let split = (i + 1).min(argv.len());
    let mut out = argv[..split].to_vec();
    out.extend(extra);
    out.extend_from_slice(&argv[split..]);
    out
}
