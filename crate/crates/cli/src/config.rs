//! `key = value` config files, expanded into flags ahead of the command line.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};

/// Flags described by a config file, in file order.
///
/// Blank lines and `#` comments are skipped. `true` turns a key into a bare
/// switch and `false` drops it. Single-letter keys become short flags.
pub fn flags_from_file(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let mut flags = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("{}:{}: expected key = value", path.display(), i + 1);
        };
        let key = key.trim().trim_start_matches('-');
        let value = value.trim().trim_matches('"');
        if key.is_empty() {
            bail!("{}:{}: empty key", path.display(), i + 1);
        }
        let flag = if key.chars().count() == 1 { format!("-{key}") } else { format!("--{key}") };
        match value {
            "true" => flags.push(flag),
            "false" => {}
            _ => {
                flags.push(flag);
                flags.push(value.to_string());
            }
        }
    }
    Ok(flags)
}

/// Splices config-file flags in right after the subcommand, so flags given
/// on the command line come later and take precedence.
pub fn expand_args(args: Vec<String>, subcommands: &[&str]) -> Result<Vec<String>> {
    let mut config = None;
    let mut rest = Vec::with_capacity(args.len());
    let mut iter = args.into_iter();
    while let Some(arg) = iter.next() {
        if arg == "--config" {
            config = Some(iter.next().context("--config needs a path")?);
        } else if let Some(path) = arg.strip_prefix("--config=") {
            config = Some(path.to_string());
        } else {
            rest.push(arg);
        }
    }
    let Some(path) = config else {
        return Ok(rest);
    };
    let flags = flags_from_file(Path::new(&path))?;
    let at = rest
        .iter()
        .position(|a| subcommands.contains(&a.as_str()))
        .map(|i| i + 1)
        .unwrap_or(rest.len());
    let (head, tail) = rest.split_at(at);
    let mut out = head.to_vec();
    // positional arguments of the subcommand must stay in front of the injected flags
    let positional = tail.iter().take_while(|a| !a.starts_with('-')).count();
    out.extend_from_slice(&tail[..positional]);
    out.extend(flags);
    out.extend_from_slice(&tail[positional..]);
    Ok(out)
}
