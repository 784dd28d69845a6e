//! Model parameters in natural units (c = ħ = 1).
//!
//! Masses, energies, frequencies and inverse lengths all share one unit. The
//! particle charge follows the electron convention `e = -|e| < 0` with
//! `alpha = e² / 4π`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};

/// Relative tolerance when both `alpha` and `alpha_inv` are supplied.
pub const ALPHA_CONSISTENCY_TOL: f64 = 1e-12;

const KNOWN_KEYS: &[&str] = &["alpha", "alpha_inv", "m_p", "sigma", "B", "u0", "T"];

/// Unvalidated parameter set as it appears in a configuration file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RawParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_inv: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(rename = "B", skip_serializing_if = "Option::is_none")]
    pub b_field: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u0: Option<f64>,
    /// Field tension. Accepted for completeness; it does not enter the
    /// transparency-regime dynamics.
    #[serde(rename = "T", skip_serializing_if = "Option::is_none")]
    pub tension: Option<f64>,
}

impl RawParams {
    /// Parses a flat JSON object. Unknown keys are rejected unless `permissive`.
    pub fn from_json_str(text: &str, permissive: bool) -> Result<Self> {
        let value: Value = serde_json::from_str(text)
            .map_err(|e| Error::invalid("config", format!("malformed JSON: {e}")))?;
        let Value::Object(map) = value else {
            return Err(Error::invalid("config", "expected a flat JSON object"));
        };
        Self::from_map(&map, permissive)
    }

    pub fn from_map(map: &Map<String, Value>, permissive: bool) -> Result<Self> {
        let mut raw = RawParams::default();
        for (key, value) in map {
            if !KNOWN_KEYS.contains(&key.as_str()) {
                if permissive {
                    continue;
                }
                return Err(Error::invalid(key, "unknown key"));
            }
            let number = value
                .as_f64()
                .ok_or_else(|| Error::invalid(key, "expected a number"))?;
            match key.as_str() {
                "alpha" => raw.alpha = Some(number),
                "alpha_inv" => raw.alpha_inv = Some(number),
                "m_p" => raw.m_p = Some(number),
                "sigma" => raw.sigma = Some(number),
                "B" => raw.b_field = Some(number),
                "u0" => raw.u0 = Some(number),
                "T" => raw.tension = Some(number),
                _ => unreachable!(),
            }
        }
        Ok(raw)
    }

    /// Fills every unset field from `other`.
    pub fn or(self, other: &RawParams) -> RawParams {
        RawParams {
            alpha: self.alpha.or(other.alpha),
            alpha_inv: self.alpha_inv.or(other.alpha_inv),
            m_p: self.m_p.or(other.m_p),
            sigma: self.sigma.or(other.sigma),
            b_field: self.b_field.or(other.b_field),
            u0: self.u0.or(other.u0),
            tension: self.tension.or(other.tension),
        }
    }
}

/// Validated physical constants of the model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    pub alpha: f64,
    pub m_p: f64,
    pub sigma: f64,
    /// Uniform magnetic field along +z (signed).
    #[serde(rename = "B")]
    pub b_field: f64,
    pub u0: f64,
    /// Signed particle charge, always negative.
    pub e_charge: f64,
    /// de Broglie proportionality constant, fixed to 1.
    pub b_const: f64,
    #[serde(rename = "T", skip_serializing_if = "Option::is_none")]
    pub tension: Option<f64>,
}

impl ModelParams {
    pub fn new(alpha: f64, m_p: f64, sigma: f64, b_field: f64, u0: f64) -> Result<Self> {
        validate_params(&RawParams {
            alpha: Some(alpha),
            m_p: Some(m_p),
            sigma: Some(sigma),
            b_field: Some(b_field),
            u0: Some(u0),
            ..RawParams::default()
        })
    }

    /// Same parameters with a different magnetic field.
    pub fn with_b_field(&self, b_field: f64) -> Self {
        ModelParams { b_field, ..*self }
    }

    /// Same parameters with a different fine-structure constant (charge recomputed).
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        let e_charge = charge_from_alpha(alpha)?;
        Ok(ModelParams {
            alpha,
            e_charge,
            ..*self
        })
    }
}

/// Quantities that depend on the dressed mass, which is solved elsewhere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedConstants {
    pub m_eff: f64,
    pub omega_l: f64,
}

impl DerivedConstants {
    pub fn new(params: &ModelParams, m_eff: f64) -> Result<Self> {
        Ok(DerivedConstants {
            m_eff,
            omega_l: larmor_frequency(params, m_eff)?,
        })
    }
}

fn require_finite(field: &str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::invalid(field, "value is not finite"))
    }
}

fn require(field: &str, value: Option<f64>) -> Result<f64> {
    let value = value.ok_or_else(|| Error::invalid(field, "missing"))?;
    require_finite(field, value)
}

pub fn validate_params(raw: &RawParams) -> Result<ModelParams> {
    let alpha = match (raw.alpha, raw.alpha_inv) {
        (_, Some(inv)) => {
            let inv = require_finite("alpha_inv", inv)?;
            if inv <= 1.0 {
                return Err(Error::invalid("alpha_inv", "alpha out of range (0, 1)"));
            }
            let alpha = 1.0 / inv;
            if let Some(direct) = raw.alpha {
                let direct = require_finite("alpha", direct)?;
                if (direct * inv - 1.0).abs() > ALPHA_CONSISTENCY_TOL {
                    return Err(Error::invalid(
                        "alpha",
                        format!("inconsistent with alpha_inv = {inv} (alpha = {direct})"),
                    ));
                }
            }
            alpha
        }
        (Some(direct), None) => require_finite("alpha", direct)?,
        (None, None) => return Err(Error::invalid("alpha", "missing (give alpha or alpha_inv)")),
    };
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid("alpha", "alpha out of range (0, 1)"));
    }

    let m_p = require("m_p", raw.m_p)?;
    if m_p <= 0.0 {
        return Err(Error::invalid("m_p", "bare mass must be positive"));
    }
    let sigma = require("sigma", raw.sigma)?;
    if sigma < 0.0 {
        return Err(Error::invalid("sigma", "coupling must be non-negative"));
    }
    let b_field = require("B", raw.b_field)?;
    let u0 = require("u0", raw.u0)?;
    if u0 <= 0.0 {
        return Err(Error::invalid("u0", "field amplitude must be positive"));
    }
    let tension = raw
        .tension
        .map(|t| require_finite("T", t))
        .transpose()?;

    Ok(ModelParams {
        alpha,
        m_p,
        sigma,
        b_field,
        u0,
        e_charge: charge_from_alpha(alpha)?,
        b_const: 1.0,
        tension,
    })
}

/// Signed charge `-sqrt(4π alpha)`.
pub fn charge_from_alpha(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid("alpha", "alpha out of range (0, 1)"));
    }
    Ok(-(4.0 * PI * alpha).sqrt())
}

/// Larmor frequency `-e B / (2 m_eff)`; positive for B > 0.
pub fn larmor_frequency(params: &ModelParams, m_eff: f64) -> Result<f64> {
    if !(m_eff > 0.0) || !m_eff.is_finite() {
        return Err(Error::invalid("m_eff", "dressed mass must be positive"));
    }
    Ok(-params.e_charge * params.b_field / (2.0 * m_eff))
}
