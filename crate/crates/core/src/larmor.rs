//! Larmor's theorem, checked on both sides of the model.
//!
//! For the wave: the lab operator `(∂t - iα/r)² u - ∇²u + ieB ∂φ u` applied
//! to the field-free solution, with and without the rotation at ω_L. For the
//! particle: the orbit at field B against the field-free orbit seen from the
//! rotating frame.

use std::f64::consts::{FRAC_PI_3, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{ModePair, SeparableMode};
use crate::model::ModelParams;
use crate::orbit::OrbitSolution;

/// Relative finite-difference step, in units of the orbit radius.
pub const FD_STEP_REL: f64 = 1e-4;
/// Seed of the sample-point generator, fixed for reproducible reports.
pub const SAMPLE_SEED: u64 = 0x1a2b_3c4d;

/// `(ρ, φ, z) -> (ρ, φ - ω_L t, z)`: lab coordinates to the rotating frame.
pub fn rotate_coordinates(t: f64, point: (f64, f64, f64), omega_l: f64) -> (f64, f64, f64) {
    (point.0, point.1 - omega_l * t, point.2)
}

/// Point in spherical coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SamplePoint {
    pub t: f64,
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
}

/// Second-order central differences with one Richardson step (h and h/2).
fn richardson_derivatives<F>(f: F, x: f64, h: f64) -> Result<(Complex64, Complex64, Complex64)>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let f0 = f(x)?;
    let (p1, m1) = (f(x + h)?, f(x - h)?);
    let (p2, m2) = (f(x + 0.5 * h)?, f(x - 0.5 * h)?);
    let d1_h = (p1 - m1) / (2.0 * h);
    let d1_h2 = (p2 - m2) / h;
    let d2_h = (p1 - f0 * 2.0 + m1) / (h * h);
    let d2_h2 = (p2 - f0 * 2.0 + m2) / (0.25 * h * h);
    Ok((f0, (d1_h2 * 4.0 - d1_h) / 3.0, (d2_h2 * 4.0 - d2_h) / 3.0))
}

/// Lab-frame operator applied to a sum of separable modes at one point.
///
/// Time and azimuthal derivatives are exact; the radial and polar parts of
/// the Laplacian use Richardson-extrapolated central differences with step
/// `fd_step` in r and `fd_step / r` in θ.
pub fn lab_operator_residual(
    modes: &[&dyn SeparableMode],
    point: SamplePoint,
    params: &ModelParams,
    fd_step: f64,
) -> Result<Complex64> {
    let SamplePoint { t, r, theta, phi } = point;
    if !(fd_step > 0.0 && fd_step.is_finite()) {
        return Err(Error::invalid("fd_step", "must be positive"));
    }
    let h_theta = fd_step / r;
    if !(r > 10.0 * fd_step) || !(r * theta.sin() > 10.0 * fd_step) || !(theta > 10.0 * h_theta && theta < std::f64::consts::PI - 10.0 * h_theta) {
        return Err(Error::domain(format!(
            "stencil at r = {r}, theta = {theta} reaches the centre or the polar axis"
        )));
    }
    let eb = params.e_charge * params.b_field;
    let coulomb = params.alpha / r;
    let (sin, cot) = (theta.sin(), theta.cos() / theta.sin());

    let mut total = Complex64::new(0.0, 0.0);
    for mode in modes {
        let m = mode.azimuthal_order();
        let w = mode.time_frequency();
        let (rad, rad_d1, rad_d2) = richardson_derivatives(|x| mode.radial(x), r, fd_step)?;
        let (ang, ang_d1, ang_d2) =
            richardson_derivatives(|x| mode.angular(x).map(|v| Complex64::new(v, 0.0)), theta, h_theta)?;
        let phase = Complex64::from_polar(1.0, m * phi - w * t);
        let u = rad * ang * phase;
        let laplacian = ((rad_d2 + rad_d1 * (2.0 / r)) * ang
            + rad * (ang_d2 + ang_d1 * cot) / (r * r)
            - rad * ang * (m * m / (r * r * sin * sin)))
            * phase;
        // (∂t - iα/r)² -> -(ω + α/r)², ∂φ -> i m
        let time_part = -(w + coulomb).powi(2) * u;
        let magnetic = Complex64::i() * eb * Complex64::i() * m * u;
        total += time_part - laplacian + magnetic;
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub sample_points: Vec<SamplePoint>,
    /// RMS residual of the rotated field-free solution (the Larmor-shifted pair).
    pub residual_rotated: f64,
    /// RMS residual of the field-free solution left unrotated.
    pub residual_unrotated: f64,
    /// `residual_rotated / residual_unrotated`, absent when the latter vanishes.
    pub ratio: Option<f64>,
    #[serde(rename = "B")]
    pub b_value: f64,
    pub fd_step: f64,
}

/// Draws `count` points within 5% of the orbit radius, θ in [π/3, 2π/3],
/// any φ, and t within one orbital period.
pub fn sample_near_orbit(pair: &ModePair, period: f64, count: usize) -> Vec<SamplePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
    (0..count)
        .map(|_| SamplePoint {
            t: rng.gen_range(0.0..period),
            r: pair.r_n * rng.gen_range(0.95..1.05),
            theta: rng.gen_range(FRAC_PI_3..2.0 * FRAC_PI_3),
            phi: rng.gen_range(0.0..TAU),
        })
        .collect()
}

/// Compares the lab operator on the rotated and the unrotated field-free
/// solutions at sampled points near the orbit.
pub fn larmor_cancellation_test(
    pair: &ModePair,
    orbit: &OrbitSolution,
    params: &ModelParams,
    sample_count: usize,
) -> Result<ResidualReport> {
    if sample_count == 0 {
        return Err(Error::Sampling("need at least one sample point".into()));
    }
    let fd_step = FD_STEP_REL * pair.r_n;
    let points = sample_near_orbit(pair, orbit.period(), sample_count);
    let free = pair.rotating_frame();
    let rotated = pair.modes();
    let unrotated = free.modes();
    let rotated: Vec<&dyn SeparableMode> = rotated.iter().map(|m| m as &dyn SeparableMode).collect();
    let unrotated: Vec<&dyn SeparableMode> = unrotated.iter().map(|m| m as &dyn SeparableMode).collect();

    let squares: Vec<(f64, f64)> = points
        .par_iter()
        .map(|&p| {
            let a = lab_operator_residual(&rotated, p, params, fd_step)?.norm_sqr();
            let b = lab_operator_residual(&unrotated, p, params, fd_step)?.norm_sqr();
            Ok((a, b))
        })
        .collect::<Result<_>>()?;
    let n = squares.len() as f64;
    let rms = |f: fn(&(f64, f64)) -> f64| (squares.iter().map(f).sum::<f64>() / n).sqrt();
    let residual_rotated = rms(|s| s.0);
    let residual_unrotated = rms(|s| s.1);
    Ok(ResidualReport {
        sample_points: points,
        residual_rotated,
        residual_unrotated,
        ratio: (residual_unrotated > 0.0 && params.b_field != 0.0)
            .then(|| residual_rotated / residual_unrotated),
        b_value: params.b_field,
        fd_step,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParticleLarmorCheck {
    /// `|v_B - (v_0 + ω_L r_0)|`.
    pub velocity_map: f64,
    /// `|E_B - (E_0 + n ω_L)|`.
    pub energy_map: f64,
}

/// Compares an orbit in the field with the field-free orbit carried into the
/// frame rotating at `omega_l`.
pub fn particle_larmor_check(
    orbit_b: &OrbitSolution,
    orbit_0: &OrbitSolution,
    omega_l: f64,
) -> Result<ParticleLarmorCheck> {
    if orbit_b.n != orbit_0.n {
        return Err(Error::Consistency(format!(
            "orbits have different n ({} and {})",
            orbit_b.n, orbit_0.n
        )));
    }
    if orbit_b.m_eff != orbit_0.m_eff {
        return Err(Error::Consistency("orbits have different dressed masses".into()));
    }
    Ok(ParticleLarmorCheck {
        velocity_map: (orbit_b.v - (orbit_0.v + omega_l * orbit_0.r)).abs(),
        energy_map: (orbit_b.energy - (orbit_0.energy + orbit_0.n * omega_l)).abs(),
    })
}
