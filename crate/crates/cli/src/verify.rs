//! Invariant suites behind `zeeman verify`.

use std::f64::consts::TAU;

use clap::ValueEnum;
use serde::Serialize;
use zeeman_core::field::{
    build_mode_pair, count_periodic_maxima, eval_total_field, group_velocity, orbit_magnitude_profile, ModePair,
    ModeSpec,
};
use zeeman_core::harmony::{
    debroglie_consistency, dressed_mass_fixed_point, gamma_closed_form, internal_frequency, phase_harmony_residual,
    selection_rule_enumerate, SelectionEntry,
};
use zeeman_core::larmor::{larmor_cancellation_test, particle_larmor_check};
use zeeman_core::model::{larmor_frequency, ModelParams};
use zeeman_core::orbit::{
    action_integral, bohr_energy, bohr_radius, lorentz_residual, solve_orbit_exact, zeeman_table, Dynamics,
    OrbitSolution,
};

use crate::error::CliError;

const LARMOR_SAMPLES: usize = 50;
const HARMONY_SAMPLES: usize = 40_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    All,
    Orbit,
    Field,
    Larmor,
    Harmony,
    Selection,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: &'static str,
    pub measured: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub params: ModelParams,
    pub m_eff: f64,
    pub suite: Suite,
    pub tolerance_override: Option<f64>,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub selection: Option<Vec<SelectionEntry>>,
    pub passed: bool,
}

impl VerifyReport {
    pub fn failing(&self) -> Vec<String> {
        self.checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| format!("{}.{} (measured {:e}, bound {:e})", c.suite, c.name, c.measured, c.bound))
            .collect()
    }
}

struct Collector {
    suite: &'static str,
    tolerance: Option<f64>,
    checks: Vec<Check>,
}

impl Collector {
    fn push(&mut self, name: &'static str, measured: f64, bound: f64) {
        let bound = self.tolerance.unwrap_or(bound);
        self.checks.push(Check { suite: self.suite, name, measured, bound, pass: measured <= bound });
    }
}

pub struct VerifyOptions {
    pub suite: Suite,
    pub tolerance: Option<f64>,
    pub alpha0_inv: Option<u64>,
    pub n_max: u64,
}

/// `1/alpha` when it is an integer, as needed for the mode orders `N ± 1`.
fn integer_inverse(alpha: f64) -> Option<u64> {
    let inv = 1.0 / alpha;
    ((inv - inv.round()).abs() <= 1e-9 * inv).then(|| inv.round() as u64)
}

fn hydrogenic_pair(params: &ModelParams, m_eff: f64) -> Result<(OrbitSolution, ModePair), CliError> {
    let a = integer_inverse(params.alpha).ok_or_else(|| {
        CliError::Usage(format!("field checks need an integer 1/alpha (got {})", 1.0 / params.alpha))
    })?;
    let spec = ModeSpec::new((a + 1) as u32, (a - 1) as u32);
    let orbit = solve_orbit_exact(1.0, params, m_eff, Dynamics::Relativistic)?;
    let pair = build_mode_pair(spec, &orbit, params)?;
    Ok((orbit, pair))
}

fn orbit_suite(c: &mut Collector, params: &ModelParams, m_eff: f64) -> Result<(), CliError> {
    let free = params.with_b_field(0.0);
    let base = solve_orbit_exact(1.0, &free, m_eff, Dynamics::NonRelativistic)?;
    c.push("bohr_radius", (base.r / bohr_radius(1.0, &free, m_eff) - 1.0).abs(), 1e-12);
    c.push("bohr_energy", (base.energy / bohr_energy(1.0, &free, m_eff) - 1.0).abs(), 1e-12);

    let ns = [1.0, -1.0, 2.0, -2.0];
    let (mut force, mut action) = (0.0f64, 0.0f64);
    for &n in &ns {
        let o = solve_orbit_exact(n, params, m_eff, Dynamics::Relativistic)?;
        force = force.max(lorentz_residual(&o, params));
        action = action.max((action_integral(&o, params) / TAU - n).abs());
    }
    c.push("force_balance", force, 1e-10);
    c.push("action_quantization", action, 1e-10);

    let table = zeeman_table(&ns, params, m_eff)?;
    let wl = larmor_frequency(params, m_eff)?;
    let first_order = table
        .iter()
        .map(|row| (row.delta_e_exact - row.delta_e).abs() / (row.n * wl).abs().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    // the remainder is second order in B and grows like n³ relative to n ω_L
    c.push("zeeman_first_order", first_order, 0.25);
    let antisymmetry = table
        .iter()
        .map(|row| {
            let mirror = table.iter().find(|m| m.n == -row.n).map_or(0.0, |m| m.delta_e);
            (row.delta_e + mirror).abs()
        })
        .fold(0.0, f64::max);
    c.push("zeeman_antisymmetry", antisymmetry, 0.0);
    Ok(())
}

fn field_suite(c: &mut Collector, params: &ModelParams, m_eff: f64) -> Result<(), CliError> {
    let (orbit, pair) = hydrogenic_pair(params, m_eff)?;
    c.push("zero_field_dispersion", pair.zero_field_dispersion_residual, 1e-12);
    let free = pair.rotating_frame();
    let mut rotation = 0.0f64;
    for i in 0..16 {
        let x = i as f64 / 16.0;
        let (t, r, theta, phi) = (x * orbit.period(), pair.r_n * (0.95 + 0.1 * x), 1.1 + 0.9 * x, TAU * x);
        let lab = eval_total_field(t, r, theta, phi, &pair)?;
        let rot = eval_total_field(t, r, theta, phi - orbit.omega_l * t, &free)?;
        rotation = rotation.max((lab - rot).norm() / pair.u0);
    }
    // phases reach ω T ~ 1e5 rad, so rounding sets the floor
    c.push("lab_equals_rotated", rotation, 1e-10);
    c.push("group_velocity", (group_velocity(&pair)? / orbit.v - 1.0).abs(), 1e-5);
    let orders = (pair.plus.m + pair.minus.m) as usize;
    let profile = orbit_magnitude_profile(&pair, 0.0, 16 * orders)?;
    c.push("orbit_maxima", (count_periodic_maxima(&profile) as f64 - orders as f64).abs(), 0.0);
    Ok(())
}

fn larmor_suite(c: &mut Collector, params: &ModelParams, m_eff: f64) -> Result<(), CliError> {
    let (orbit, pair) = hydrogenic_pair(params, m_eff)?;
    let report = larmor_cancellation_test(&pair, &orbit, params, LARMOR_SAMPLES)?;
    c.push("cancellation_ratio", report.ratio.unwrap_or(0.0), 1e-2);
    let free = solve_orbit_exact(1.0, &params.with_b_field(0.0), m_eff, Dynamics::NonRelativistic)?;
    let field = solve_orbit_exact(1.0, params, m_eff, Dynamics::NonRelativistic)?;
    let wl = larmor_frequency(params, m_eff)?;
    let map = particle_larmor_check(&field, &free, wl)?;
    let scale = |x: f64| x.abs().max(f64::MIN_POSITIVE);
    c.push("particle_velocity_map", map.velocity_map / scale(wl * free.r), 0.1);
    c.push("particle_energy_map", map.energy_map / scale(wl), 0.1);
    Ok(())
}

fn harmony_suite(c: &mut Collector, params: &ModelParams) -> Result<f64, CliError> {
    let free = params.with_b_field(0.0);
    let fp = dressed_mass_fixed_point(&free, 1.0)?;
    c.push("fixed_point_residual", fp.residual / fp.m_eff, 1e-13);
    let (orbit, pair) = hydrogenic_pair(&free, fp.m_eff)?;
    let d = debroglie_consistency(&orbit, &pair, &free)?;
    c.push("debroglie_momentum", d.p_minus_k, 1e-12);
    c.push("debroglie_energy", d.e_minus_omega, 1e-12);
    c.push("debroglie_group_velocity", d.vg_minus_vp, 1e-12);
    c.push("selection_alpha", d.alpha_minus_n2_over_n, 1e-12);
    let h = phase_harmony_residual(&orbit, &pair, &free, HARMONY_SAMPLES)?;
    c.push("phase_harmony", h.max_residual, 1e-9);
    c.push("holonomy", h.holonomy_residual, 1e-12);
    let omega_p = internal_frequency(&orbit, &free, fp.m_eff);
    let g = gamma_closed_form(orbit.energy, omega_p, fp.m_eff)?;
    c.push("gamma_closed_form", (g * (1.0 - orbit.v * orbit.v).sqrt() - 1.0).abs(), 1e-9);
    Ok(fp.m_eff)
}

fn selection_suite(
    c: &mut Collector,
    params: &ModelParams,
    opts: &VerifyOptions,
) -> Result<Vec<SelectionEntry>, CliError> {
    let a = match opts.alpha0_inv {
        Some(a) => a,
        None => integer_inverse(params.alpha)
            .ok_or_else(|| CliError::Usage("selection checks need --alpha0-inv or an integer 1/alpha".into()))?,
    };
    let entries = selection_rule_enumerate(a, opts.n_max, false)?;
    let inconsistent = entries.iter().filter(|e| !e.is_consistent()).count();
    c.push("exact_consistency", inconsistent as f64, 0.0);
    // every integer orbit number is allowed: m± = n² α₀⁻¹ ± n
    c.push("integer_orbit_count", (entries.len() as f64 - opts.n_max as f64).abs(), 0.0);
    Ok(entries)
}

/// Dressed mass used throughout: the bare mass without coupling, otherwise
/// the fixed point on the field-free `n = 1` orbit.
pub fn dressed_mass(params: &ModelParams) -> Result<f64, CliError> {
    if params.sigma == 0.0 {
        return Ok(params.m_p);
    }
    Ok(dressed_mass_fixed_point(&params.with_b_field(0.0), 1.0)?.m_eff)
}

pub fn run(params: &ModelParams, opts: &VerifyOptions) -> Result<VerifyReport, CliError> {
    let m_eff = dressed_mass(params)?;
    let mut checks = Vec::new();
    let mut selection = None;
    let wants = |s: Suite| opts.suite == Suite::All || opts.suite == s;
    let collector = |suite: &'static str| Collector { suite, tolerance: opts.tolerance, checks: Vec::new() };
    if wants(Suite::Orbit) {
        let mut c = collector("orbit");
        orbit_suite(&mut c, params, m_eff)?;
        checks.extend(c.checks);
    }
    if wants(Suite::Field) {
        let mut c = collector("field");
        field_suite(&mut c, params, m_eff)?;
        checks.extend(c.checks);
    }
    if wants(Suite::Larmor) {
        let mut c = collector("larmor");
        larmor_suite(&mut c, params, m_eff)?;
        checks.extend(c.checks);
    }
    if wants(Suite::Harmony) {
        let mut c = collector("harmony");
        harmony_suite(&mut c, params)?;
        checks.extend(c.checks);
    }
    if wants(Suite::Selection) {
        let mut c = collector("selection");
        selection = Some(selection_suite(&mut c, params, opts)?);
        checks.extend(c.checks);
    }
    let passed = checks.iter().all(|c| c.pass);
    Ok(VerifyReport { params: *params, m_eff, suite: opts.suite, tolerance_override: opts.tolerance, checks, selection, passed })
}
