//! Parameter layering (flags over config file over defaults) and small
//! argument parsers.

use std::fs;
use std::path::Path;

use zeeman_core::model::{validate_params, ModelParams, RawParams};

use crate::error::CliError;

pub const DEFAULT_ALPHA_INV: f64 = 137.0;
pub const DEFAULT_B: f64 = 1e-5;

pub fn defaults() -> RawParams {
    RawParams {
        m_p: Some(1.0),
        sigma: Some(0.0),
        b_field: Some(DEFAULT_B),
        u0: Some(1.0),
        ..RawParams::default()
    }
}

pub fn read_config(path: &Path, permissive: bool) -> Result<RawParams, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    Ok(RawParams::from_json_str(&text, permissive)?)
}

/// Layers `flags` over `file` over the defaults. A fine-structure constant
/// given on the command line replaces both spellings from the file; with
/// none anywhere `fallback_alpha` is used.
pub fn resolve(flags: &RawParams, file: &RawParams, fallback_alpha: f64) -> Result<ModelParams, CliError> {
    let mut file = file.clone();
    if flags.alpha.is_some() || flags.alpha_inv.is_some() {
        file.alpha = None;
        file.alpha_inv = None;
    }
    let mut raw = flags.clone().or(&file).or(&defaults());
    if raw.alpha.is_none() && raw.alpha_inv.is_none() {
        raw.alpha = Some(fallback_alpha);
    }
    Ok(validate_params(&raw)?)
}

/// Comma-separated list of orbit numbers, each a non-zero integer.
pub fn parse_n_list(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|item| {
            let item = item.trim();
            match item.parse::<i64>() {
                Ok(n) if n != 0 => Ok(n as f64),
                _ => Err(CliError::Usage(format!("bad orbit number `{item}` in --n (want non-zero integers)"))),
            }
        })
        .collect()
}

/// A time given as a number or as a multiple of the orbital period:
/// `0.5`, `T`, `2T`, `T/4`, `3T/4`.
pub fn parse_time(text: &str, period: f64) -> Result<f64, CliError> {
    let bad = || CliError::Usage(format!("bad time `{text}` (use a number, T, kT, T/d or kT/d)"));
    let text = text.trim();
    let Some(pos) = text.find('T') else {
        return text.parse::<f64>().map_err(|_| bad()).and_then(|t| t.is_finite().then_some(t).ok_or_else(bad));
    };
    let (head, tail) = (&text[..pos], &text[pos + 1..]);
    let k = match head.trim_end_matches('*') {
        "" => 1.0,
        h => h.parse::<f64>().map_err(|_| bad())?,
    };
    let d = match tail {
        "" => 1.0,
        t => t.strip_prefix('/').ok_or_else(bad)?.parse::<f64>().map_err(|_| bad())?,
    };
    if !(k.is_finite() && d.is_finite() && d != 0.0) {
        return Err(bad());
    }
    Ok(k * period / d)
}
