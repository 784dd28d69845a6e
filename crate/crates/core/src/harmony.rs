//! Closure of the wave-particle coupling: de Broglie relations, the
//! `α₀ = n²/N` selection rule, the internal clock of the particle, the
//! dressed-mass fixed point and phase harmony along the orbit.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;

use num_complex::Complex64;
use num_rational::Ratio;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::{build_mode_pair, eval_total_field, group_velocity, ModePair, ModeSpec};
use crate::model::ModelParams;
use crate::orbit::{solve_orbit_exact, Dynamics, OrbitSolution};

/// Exact multiple of one half, stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInteger(pub i64);

impl HalfInteger {
    pub fn twice(self) -> i64 {
        self.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / 2.0
    }
}

impl fmt::Display for HalfInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl Serialize for HalfInteger {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.to_f64())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SelectionEntry {
    pub m_plus: u64,
    pub m_minus: u64,
    pub n: HalfInteger,
    #[serde(rename = "N")]
    pub n_big: HalfInteger,
    #[serde(serialize_with = "ratio_as_f64")]
    pub alpha0: Ratio<i64>,
}

fn ratio_as_f64<S: Serializer>(r: &Ratio<i64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(*r.numer() as f64 / *r.denom() as f64)
}

impl SelectionEntry {
    /// `N α₀ = n²` in exact arithmetic.
    pub fn is_consistent(&self) -> bool {
        let n = Ratio::new(self.n.twice(), 2);
        let big = Ratio::new(self.n_big.twice(), 2);
        big * self.alpha0 == n * n
    }
}

/// Mode orders allowed by `α₀ = n²/N` for ñ = 1/2, 1, ..., n_max.
///
/// With `h = 2ñ`, `m± = (h² α₀⁻¹ ± 2h) / 4` must be non-negative integers.
/// Half-integer ñ can pass this test (whenever α₀⁻¹ ≡ 2 mod 4); they are
/// reported only if `include_half` is set.
pub fn selection_rule_enumerate(alpha0_inv: u64, n_max: u64, include_half: bool) -> Result<Vec<SelectionEntry>> {
    if alpha0_inv == 0 {
        return Err(Error::invalid("alpha0_inv", "must be a positive integer"));
    }
    if n_max == 0 {
        return Err(Error::invalid("n_max", "must be a positive integer"));
    }
    let a = alpha0_inv as i128;
    let mut out = Vec::new();
    for h in 1..=(2 * n_max as i128) {
        if h % 2 == 1 && !include_half {
            continue;
        }
        let four_big = h * h * a;
        let (four_plus, four_minus) = (four_big + 2 * h, four_big - 2 * h);
        if four_minus < 0 || four_plus % 4 != 0 || four_minus % 4 != 0 {
            continue;
        }
        let (m_plus, m_minus) = ((four_plus / 4) as u64, (four_minus / 4) as u64);
        out.push(SelectionEntry {
            m_plus,
            m_minus,
            n: HalfInteger(h as i64),
            n_big: HalfInteger((four_big / 2) as i64),
            alpha0: Ratio::new(1, alpha0_inv as i64),
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeBroglieResiduals {
    /// `|P_n - k_n| / |k_n|`.
    pub p_minus_k: f64,
    /// `|E_n - ω_n| / ω_n`.
    pub e_minus_omega: f64,
    /// `|v_g - v_n| / |v_n|`.
    pub vg_minus_vp: f64,
    /// `|α - n²/N| / α`.
    pub alpha_minus_n2_over_n: f64,
}

fn check_matched(orbit: &OrbitSolution, pair: &ModePair) -> Result<()> {
    if (orbit.r - pair.r_n).abs() > 1e-15 * orbit.r || orbit.n != pair.n_tilde {
        return Err(Error::Consistency(format!(
            "orbit (n = {}, r = {}) and mode pair (n = {}, r = {}) do not match",
            orbit.n, orbit.r, pair.n_tilde, pair.r_n
        )));
    }
    Ok(())
}

/// De Broglie relations on a matched orbit, plus the group-velocity match.
pub fn debroglie_consistency(orbit: &OrbitSolution, pair: &ModePair, params: &ModelParams) -> Result<DeBroglieResiduals> {
    check_matched(orbit, pair)?;
    let vg = group_velocity(pair)?;
    Ok(DeBroglieResiduals {
        p_minus_k: (orbit.momentum - pair.k_n).abs() / pair.k_n.abs(),
        e_minus_omega: (orbit.energy - pair.omega_n).abs() / pair.omega_n.abs(),
        vg_minus_vp: (vg - orbit.v).abs() / orbit.v.abs(),
        alpha_minus_n2_over_n: (params.alpha - pair.n_tilde * pair.n_tilde / pair.n_big).abs() / params.alpha,
    })
}

/// Internal clock pulsation `m - (α/r + e B r v / 2) / sqrt(1 - v²)`.
pub fn internal_frequency(orbit: &OrbitSolution, params: &ModelParams, m_eff: f64) -> f64 {
    let (r, v) = (orbit.r, orbit.v);
    m_eff - (params.alpha / r + 0.5 * params.e_charge * params.b_field * r * v) * orbit.gamma
}

/// Weak-field, low-α form `m (1 - α²/n²) + ω_L n (1 - α²/2n²)`.
pub fn internal_frequency_perturbative(n: f64, params: &ModelParams, m_eff: f64, omega_l: f64) -> f64 {
    let q2 = (params.alpha / n).powi(2);
    m_eff * (1.0 - q2) + omega_l * n * (1.0 - q2 / 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FixedPoint {
    pub m_eff: f64,
    pub z0: f64,
    pub omega_p: f64,
    pub iterations: usize,
    /// `|m - m_p (1 + σ Ω_p² z0²)|`.
    pub residual: f64,
    pub orbit: OrbitSolution,
}

const FIXED_POINT_MAX_ITER: usize = 200;
const FIXED_POINT_RTOL: f64 = 1e-14;

/// Solves `m = m_p (1 + σ Ω_p(m)² u0²)`, re-solving the relativistic orbit at
/// every iterate.
///
/// Newton's method on `g(m) = m - m_p(1 + σ Ω_p² u0²)` started at `m_p`
/// climbs monotonically to the smallest root. When `g` stops increasing
/// before reaching zero there is no root and a regime error is returned.
pub fn dressed_mass_fixed_point(params: &ModelParams, n: f64) -> Result<FixedPoint> {
    let s = params.sigma * params.u0 * params.u0;
    let mp = params.m_p;
    let eval = |m: f64| -> Result<(f64, f64, OrbitSolution)> {
        let orbit = solve_orbit_exact(n, params, m, Dynamics::Relativistic)?;
        let omega = internal_frequency(&orbit, params, m);
        Ok((m - mp * (1.0 + s * omega * omega), omega, orbit))
    };
    let mut m = mp;
    let mut last = (f64::NAN, f64::NAN);
    for it in 1..=FIXED_POINT_MAX_ITER {
        let (g, omega, orbit) = eval(m)?;
        if g.abs() <= 1e-15 * m {
            return Ok(FixedPoint { m_eff: m, z0: params.u0, omega_p: omega, iterations: it, residual: g.abs(), orbit });
        }
        let h = 1e-6 * m;
        let dg = (eval(m + h)?.0 - eval(m - h)?.0) / (2.0 * h);
        if !(dg > 0.0) {
            return Err(Error::Regime(format!(
                "no dressed-mass fixed point: m - m_p(1 + sigma Omega^2 u0^2) peaks at {g:.3e} < 0 near m = {m} \
                 (sigma*u0^2 = {s})"
            )));
        }
        let next = m - g / dg;
        last = (m, next);
        if next > 10.0 * mp {
            return Err(Error::Regime(format!(
                "dressed mass iterate {next} exceeds 10 m_p (sigma*u0^2 = {s})"
            )));
        }
        let step = next - m;
        m = next;
        if step.abs() <= FIXED_POINT_RTOL * m {
            let (g, omega, orbit) = eval(m)?;
            return Ok(FixedPoint { m_eff: m, z0: params.u0, omega_p: omega, iterations: it, residual: g.abs(), orbit });
        }
    }
    Err(Error::Convergence {
        what: format!("dressed-mass fixed point (last iterates {} and {})", last.0, last.1),
        iterations: FIXED_POINT_MAX_ITER,
        last_increment: last.1 - last.0,
    })
}

/// Particle Lagrangian on the orbit, `-m sqrt(1 - v²) + α/r + e B r v / 2`.
pub fn lagrangian_value(orbit: &OrbitSolution, params: &ModelParams) -> f64 {
    -orbit.m_eff / orbit.gamma + params.alpha / orbit.r + 0.5 * params.e_charge * params.b_field * orbit.r * orbit.v
}

/// `γ = E/2m + sqrt(E² - 4m(Ω_p - m)) / 2m`, derived for the field-free orbit.
pub fn gamma_closed_form(energy: f64, omega_p: f64, m_eff: f64) -> Result<f64> {
    let radicand = energy * energy - 4.0 * m_eff * (omega_p - m_eff);
    if !(radicand >= 0.0) {
        return Err(Error::domain(format!("gamma closed form: negative radicand {radicand:e}")));
    }
    Ok((energy + radicand.sqrt()) / (2.0 * m_eff))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseHarmony {
    /// Largest departure of `arg u(t, x_p(t)) - 𝓛 t` from its initial value.
    pub max_residual: f64,
    /// `|-Ω_p/γ - 𝓛|`.
    pub holonomy_residual: f64,
    /// Spread of `|u|` along the particle path relative to `u0`.
    pub magnitude_spread: f64,
    pub lagrangian: f64,
    pub samples: usize,
}

/// Follows the particle around one period and compares the phase of the
/// field it sees with `𝓛 t`.
pub fn phase_harmony_residual(
    orbit: &OrbitSolution,
    pair: &ModePair,
    params: &ModelParams,
    t_samples: usize,
) -> Result<PhaseHarmony> {
    check_matched(orbit, pair)?;
    let period = orbit.period();
    let omega_orbit = orbit.angular_velocity();
    let lag = lagrangian_value(orbit, params);
    // fastest drift of a mode phase against 𝓛 t as seen by the particle
    let fastest = [(&pair.plus, 1.0), (&pair.minus, -1.0)]
        .iter()
        .map(|(m, s)| (s * m.m as f64 * omega_orbit - m.omega - lag).abs())
        .fold(0.0, f64::max);
    let dt = period / (t_samples.max(2) - 1) as f64;
    if t_samples < 2 || dt * fastest > TAU / 64.0 {
        return Err(Error::Sampling(format!(
            "{t_samples} samples over one period give fewer than 64 per phase cycle"
        )));
    }

    let mut offset = 0.0;
    let mut prev = 0.0;
    let mut first = None;
    let mut max_residual: f64 = 0.0;
    let (mut mag_lo, mut mag_hi) = (f64::INFINITY, 0.0f64);
    for i in 0..t_samples {
        let t = i as f64 * dt;
        let u = eval_total_field(t, pair.r_n, FRAC_PI_2, omega_orbit * t, pair)?;
        mag_lo = mag_lo.min(u.norm());
        mag_hi = mag_hi.max(u.norm());
        let raw = (u * Complex64::from_polar(1.0, -lag * t)).arg();
        if i > 0 {
            let jump = raw - prev;
            if jump > PI {
                offset -= TAU;
            } else if jump < -PI {
                offset += TAU;
            }
        }
        prev = raw;
        let residual = raw + offset;
        let base = *first.get_or_insert(residual);
        max_residual = max_residual.max((residual - base).abs());
    }
    let omega_p = internal_frequency(orbit, params, orbit.m_eff);
    Ok(PhaseHarmony {
        max_residual,
        holonomy_residual: (-omega_p / orbit.gamma - lag).abs(),
        magnitude_spread: (mag_hi - mag_lo) / pair.u0,
        lagrangian: lag,
        samples: t_samples,
    })
}

/// Copy of `pair` with both mode frequencies shifted by `rel · ω_n`: a
/// control that breaks the synchronization with the particle.
pub fn detuned_pair(pair: &ModePair, rel: f64) -> ModePair {
    let mut p = pair.clone();
    let shift = rel * pair.omega_n;
    p.plus.omega += shift;
    p.minus.omega += shift;
    p.omega_n += shift;
    p
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarmonyReport {
    pub omega_p: f64,
    pub z0: f64,
    pub m_eff: f64,
    pub gamma_closed: f64,
    pub phase_residual: f64,
    pub debroglie_residuals: DeBroglieResiduals,
    pub orbit: OrbitSolution,
}

/// Runs the whole closure for orbit `n` with mode orders `spec`.
pub fn harmony_report(params: &ModelParams, n: f64, spec: ModeSpec, t_samples: usize) -> Result<HarmonyReport> {
    let fp = dressed_mass_fixed_point(params, n)?;
    let orbit = fp.orbit;
    let pair = build_mode_pair(spec, &orbit, params)?;
    let harmony = phase_harmony_residual(&orbit, &pair, params, t_samples)?;
    Ok(HarmonyReport {
        omega_p: fp.omega_p,
        z0: fp.z0,
        m_eff: fp.m_eff,
        gamma_closed: gamma_closed_form(orbit.energy, fp.omega_p, fp.m_eff)?,
        phase_residual: harmony.max_residual,
        debroglie_residuals: debroglie_consistency(&orbit, &pair, params)?,
        orbit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::larmor_frequency;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn params(alpha: f64, b: f64, sigma: f64) -> ModelParams {
        ModelParams::new(alpha, 1.0, sigma, b, 1.0).unwrap()
    }

    fn matched(alpha: f64, b: f64, spec: ModeSpec) -> (ModelParams, OrbitSolution, ModePair) {
        let p = params(alpha, b, 0.0);
        let o = solve_orbit_exact(1.0, &p, 1.0, Dynamics::Relativistic).unwrap();
        let pair = build_mode_pair(spec, &o, &p).unwrap();
        (p, o, pair)
    }

    /// Every (m₊, m₋) with m₊ > m₋ up to `limit` satisfying α₀⁻¹ n² = N.
    fn brute_force(alpha0_inv: u64, n_max: u64, limit: u64, include_half: bool) -> BTreeSet<(u64, u64)> {
        let mut out = BTreeSet::new();
        for mp in 0..=limit {
            for mm in 0..mp {
                let (h, two_big) = (mp - mm, mp + mm);
                // α₀⁻¹ (h/2)² = two_big/2  <=>  α₀⁻¹ h² = 2 two_big
                if alpha0_inv * h * h == 2 * two_big && h <= 2 * n_max && (include_half || h % 2 == 0) {
                    out.insert((mp, mm));
                }
            }
        }
        out
    }

    #[test]
    fn selection_examples() {
        let e = selection_rule_enumerate(3, 1, false).unwrap();
        assert_eq!(e.len(), 1);
        assert_eq!((e[0].m_plus, e[0].m_minus, e[0].n, e[0].n_big), (4, 2, HalfInteger(2), HalfInteger(6)));
        let e = selection_rule_enumerate(137, 2, false).unwrap();
        let pairs: Vec<_> = e.iter().map(|x| (x.m_plus, x.m_minus)).collect();
        assert_eq!(pairs, vec![(138, 136), (550, 546)]);
        // ñ = 1/2 gives N = 137/4, not compatible with integer orders
        assert!(selection_rule_enumerate(137, 2, true).unwrap().iter().all(|x| x.n.is_integer()));
        assert!(e.iter().all(SelectionEntry::is_consistent));
        assert!(selection_rule_enumerate(0, 2, false).is_err());
    }

    #[test]
    fn half_integers_pass_when_inverse_alpha_is_two_mod_four() {
        let e = selection_rule_enumerate(2, 1, true).unwrap();
        assert_eq!((e[0].m_plus, e[0].m_minus, e[0].n), (1, 0, HalfInteger(1)));
        assert_eq!(e[0].n.to_string(), "1/2");
        assert!(selection_rule_enumerate(2, 1, false).unwrap().iter().all(|x| x.n.is_integer()));
    }

    #[test]
    fn selection_matches_brute_force() {
        for a in [1u64, 2, 3, 137] {
            for include_half in [false, true] {
                let n_max = if a == 137 { 2 } else { 10 };
                let got: BTreeSet<_> = selection_rule_enumerate(a, n_max, include_half)
                    .unwrap()
                    .iter()
                    .map(|e| (e.m_plus, e.m_minus))
                    .collect();
                assert_eq!(got, brute_force(a, n_max, 1500, include_half), "a = {a}");
            }
        }
    }

    #[test]
    fn selected_orbits_are_quantized() {
        for e in selection_rule_enumerate(137, 2, false).unwrap() {
            let p = params(1.0 / 137.0, 0.0, 0.0);
            let o = solve_orbit_exact(e.n.to_f64(), &p, 1.0, Dynamics::Relativistic).unwrap();
            let j = crate::orbit::action_integral(&o, &p) / TAU;
            assert!((j - j.round()).abs() < 1e-12 && j.round() == e.n.to_f64());
        }
    }

    #[test]
    fn debroglie_relations_without_field() {
        for (alpha, spec) in [(1.0 / 3.0, ModeSpec::new(4, 2)), (1.0 / 137.0, ModeSpec::new(138, 136))] {
            let (p, o, pair) = matched(alpha, 0.0, spec);
            let d = debroglie_consistency(&o, &pair, &p).unwrap();
            assert!(d.p_minus_k < 1e-14, "{d:?}");
            assert!(d.e_minus_omega < 1e-14, "{d:?}");
            assert!(d.vg_minus_vp < 1e-13, "{d:?}");
            assert_eq!(d.alpha_minus_n2_over_n, 0.0);
        }
    }

    #[test]
    fn debroglie_velocity_mismatch_with_field() {
        let mismatch = |b: f64| {
            let (p, o, pair) = matched(1.0 / 137.0, b, ModeSpec::new(138, 136));
            let d = debroglie_consistency(&o, &pair, &p).unwrap();
            assert!(d.p_minus_k < 1e-13);
            d.vg_minus_vp
        };
        let (a, b) = (mismatch(1e-5), mismatch(5e-6));
        assert!(a < 1e-6, "{a}");
        // the first-order shifts of the two modes cancel in the group velocity
        assert!((a / b - 4.0).abs() < 0.1, "{}", a / b);
    }

    #[test]
    fn internal_frequency_values() {
        let (p, o, _) = matched(1.0 / 137.0, 0.0, ModeSpec::new(138, 136));
        let w = internal_frequency(&o, &p, 1.0);
        assert!((w - (1.0 - p.alpha / o.r * o.gamma)).abs() < 1e-16);
        // 50-digit: 1 - γ² α² with γ² = 1/(1 - α²)
        let a2 = 1.0 / 137.0f64.powi(2);
        assert!((w - (1.0 - a2 / (1.0 - a2))).abs() < 1e-15, "{w}");
        let pert = internal_frequency_perturbative(1.0, &p, 1.0, 0.0);
        assert!((w - pert).abs() < 1e-8);

        let p = params(1.0 / 137.0, 1e-5, 0.0);
        let wl = larmor_frequency(&p, 1.0).unwrap();
        let up = internal_frequency_perturbative(1.0, &p, 1.0, wl);
        let down = internal_frequency_perturbative(-1.0, &p, 1.0, wl);
        assert!(((up - down) - 2.0 * wl * (1.0 - a2 / 2.0)).abs() < 1e-15);
        let o_up = solve_orbit_exact(1.0, &p, 1.0, Dynamics::Relativistic).unwrap();
        let exact_up = internal_frequency(&o_up, &p, 1.0);
        assert!((exact_up - up).abs() < 1e-8, "{exact_up} vs {up}");
    }

    #[test]
    fn fixed_point_values() {
        let fp = dressed_mass_fixed_point(&params(1.0 / 137.0, 0.0, 0.0), 1.0).unwrap();
        assert_eq!((fp.m_eff, fp.iterations), (1.0, 1));
        // root of s κ² m² - m + 1 = 0, κ = 1 - γ²α², at 50 digits
        let fp = dressed_mass_fixed_point(&params(1.0 / 137.0, 0.0, 0.1), 1.0).unwrap();
        assert!((fp.m_eff - 1.126_999_180_649_775_3).abs() < 1e-13, "{}", fp.m_eff);
        assert!(fp.residual <= 1e-13 * fp.m_eff);
        let fp = dressed_mass_fixed_point(&params(1.0 / 137.0, 0.0, 0.2), 1.0).unwrap();
        assert!((fp.m_eff - 1.381_875_012_530_301_6).abs() < 1e-12, "{}", fp.m_eff);
        assert!(matches!(
            dressed_mass_fixed_point(&params(1.0 / 137.0, 0.0, 0.3), 1.0),
            Err(Error::Regime(_))
        ));
    }

    #[test]
    fn lagrangian_identities() {
        for b in [0.0, 1e-5] {
            let (p, o, _) = matched(1.0 / 137.0, b, ModeSpec::new(138, 136));
            let l = lagrangian_value(&o, &p);
            let legendre = o.momentum * o.v - o.energy;
            assert!((l - legendre).abs() <= 1e-10 * l.abs());
            if b == 0.0 {
                assert!((l - (-1.0 / o.gamma + p.alpha / o.r)).abs() < 1e-16);
            }
        }
    }

    #[test]
    fn gamma_closed_form_checks() {
        assert_eq!(gamma_closed_form(1.0, 1.0, 1.0).unwrap(), 1.0);
        assert!(gamma_closed_form(0.1, 2.0, 1.0).is_err());
        for alpha in [1.0 / 3.0, 1.0 / 137.0] {
            let (p, o, _) = matched(alpha, 0.0, if alpha > 0.1 { ModeSpec::new(4, 2) } else { ModeSpec::new(138, 136) });
            let g = gamma_closed_form(o.energy, internal_frequency(&o, &p, 1.0), 1.0).unwrap();
            assert!((g - 1.0 / (1.0 - o.v * o.v).sqrt()).abs() <= 1e-9 * g);
        }
    }

    #[test]
    fn phase_harmony_on_toy_atom() {
        let (p, o, pair) = matched(1.0 / 3.0, 0.0, ModeSpec::new(4, 2));
        let h = phase_harmony_residual(&o, &pair, &p, 2000).unwrap();
        assert!(h.max_residual < 1e-9, "{}", h.max_residual);
        assert!(h.holonomy_residual < 1e-15);
        assert!(h.magnitude_spread < 1e-12);
        let off = phase_harmony_residual(&o, &detuned_pair(&pair, 0.01), &p, 2000).unwrap();
        assert!(off.max_residual > 0.1);
        assert!(matches!(phase_harmony_residual(&o, &detuned_pair(&pair, 0.01), &p, 3), Err(Error::Sampling(_))));
        assert!(phase_harmony_residual(&o, &pair, &p, 10).unwrap().max_residual < 1e-9);
    }

    #[test]
    fn report_assembles() {
        let p = params(1.0 / 3.0, 0.0, 0.0);
        let rep = harmony_report(&p, 1.0, ModeSpec::new(4, 2), 2000).unwrap();
        assert_eq!(rep.z0, 1.0);
        assert!((rep.gamma_closed - rep.orbit.gamma).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn enumerated_entries_are_exact(a in 1u64..500, n_max in 1u64..6, half in any::<bool>()) {
            for e in selection_rule_enumerate(a, n_max, half).unwrap() {
                prop_assert!(e.is_consistent());
                prop_assert_eq!(e.m_plus - e.m_minus, e.n.twice() as u64);
                prop_assert_eq!(e.m_plus + e.m_minus, e.n_big.twice() as u64);
            }
        }
    }
}
