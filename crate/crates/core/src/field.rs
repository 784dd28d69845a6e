//! The guiding wave: two counter-propagating Coulomb modes whose sum beats
//! along the orbit, with the magnetic field entering as a rotation of the
//! whole pattern at the Larmor frequency.
//!
//! Each mode is
//! `u± = A± R(r) P_l^m(cos θ) exp(i(±m φ - ω± t))` with
//! `R(r) = e^{iω' r} r^l̃ M(l̃ + 1 - iα, 2l̃ + 2, -2iω' r)` and `ω' = ω⁰`.
//! Amplitudes are fixed so that each mode equals `u0/2` at `t = 0`, `φ = 0`
//! on the orbit. Radial and angular factors are evaluated as ratios to their
//! orbit values, in log form, so large `l` does not overflow.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, TAU};
use std::io::{self, Write};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::orbit::{solve_orbit_exact, Dynamics, OrbitSolution};
use crate::specfun::{assoc_legendre_scaled, kummer_m, lambda_tilde};

/// Relative tolerance of the field-free dispersion check.
pub const DISPERSION_TOL: f64 = 1e-12;
pub const MAX_GRID_RESOLUTION: usize = 4096;

/// Field-free mode frequencies `m/sqrt(1 - α²/n²) · (1 ± α/n - α²/n²)`.
pub fn mode_frequencies_zero(n: f64, alpha: f64, m_eff: f64) -> Result<(f64, f64)> {
    if !(n.is_finite() && n != 0.0) {
        return Err(Error::domain("mode frequencies need a finite nonzero n"));
    }
    let q = alpha / n;
    if !(q.abs() < 1.0) {
        return Err(Error::domain(format!("|alpha/n| = {} is not below 1", q.abs())));
    }
    let g = m_eff / ((1.0 - q) * (1.0 + q)).sqrt();
    Ok((g * (1.0 + q - q * q), g * (1.0 - q - q * q)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Which {
    Plus,
    Minus,
}

/// Azimuthal orders and degrees of the two modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ModeSpec {
    pub m_plus: u32,
    pub m_minus: u32,
    pub l_plus: u32,
    pub l_minus: u32,
}

impl ModeSpec {
    /// Lowest degrees, `l = m`.
    pub fn new(m_plus: u32, m_minus: u32) -> Self {
        ModeSpec {
            m_plus,
            m_minus,
            l_plus: m_plus,
            l_minus: m_minus,
        }
    }

    pub fn with_degrees(self, l_plus: u32, l_minus: u32) -> Self {
        ModeSpec {
            l_plus,
            l_minus,
            ..self
        }
    }
}

/// One mode of the pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Mode {
    pub m: u32,
    pub l: u32,
    pub ltilde: f64,
    /// Field-free frequency ω⁰, also used in the radial factor.
    pub omega0: f64,
    /// Lab frequency `ω⁰ ± m ω_L`.
    pub omega: f64,
    pub k: f64,
    pub eps: f64,
    /// `ln A`, so that `A R(r_n) P(0) = u0 / 2`.
    pub ln_amplitude: Complex64,
    /// `ln R(r_n)`.
    ln_radial_orbit: Complex64,
    /// `P_l^m(0) / (2m-1)!!`.
    legendre_equator_scaled: f64,
    /// Extra multiplier, 1 unless the mode is switched off.
    scale: f64,
    /// +1 for the co-rotating mode, -1 for the counter-rotating one.
    sign: f64,
}

impl Mode {
    pub fn amplitude(&self) -> Complex64 {
        self.ln_amplitude.exp() * self.scale
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModePair {
    pub plus: Mode,
    pub minus: Mode,
    /// Orbit radius the pair is matched to.
    pub r_n: f64,
    pub alpha: f64,
    pub u0: f64,
    pub omega_l: f64,
    pub m_eff: f64,
    pub n_tilde: f64,
    pub n_big: f64,
    pub k_n: f64,
    pub omega_n: f64,
    /// Rotating-frame mean frequency `(ω₊⁰ + ω₋⁰)/2`.
    pub omega_n_prime: f64,
    pub eta: f64,
    pub eps_bar: f64,
    /// `k± - ω± - ε±` at the lab frequencies; first order in B.
    pub lab_dispersion_residual: (f64, f64),
    /// Relative field-free dispersion mismatch at the field-free orbit radius.
    pub zero_field_dispersion_residual: f64,
}

fn ln_radial(ltilde: f64, alpha: f64, omega: f64, r: f64) -> Result<Complex64> {
    let i = Complex64::i();
    let a = Complex64::new(ltilde + 1.0, -alpha);
    let b = Complex64::new(2.0 * ltilde + 2.0, 0.0);
    let z = Complex64::new(0.0, -2.0 * omega * r);
    let m = kummer_m(a, b, z)?;
    if m == Complex64::new(0.0, 0.0) {
        return Err(Error::Precision(format!("radial factor vanishes at r = {r}")));
    }
    Ok(i * omega * r + ltilde * r.ln() + m.ln())
}

impl ModePair {
    pub fn mode(&self, which: Which) -> &Mode {
        match which {
            Which::Plus => &self.plus,
            Which::Minus => &self.minus,
        }
    }

    /// Same pair seen from the frame rotating at the Larmor frequency:
    /// the field-free solution.
    pub fn rotating_frame(&self) -> ModePair {
        let mut p = self.clone();
        p.omega_l = 0.0;
        p.plus.omega = p.plus.omega0;
        p.minus.omega = p.minus.omega0;
        p.omega_n = p.omega_n_prime;
        p
    }

    /// Multiplies the amplitudes; zero switches a mode off.
    pub fn scale_amplitudes(&self, s_plus: f64, s_minus: f64) -> ModePair {
        let mut p = self.clone();
        p.plus.scale *= s_plus;
        p.minus.scale *= s_minus;
        p
    }

    /// Radial factor `A R(r) P(0)` without angular and time dependence,
    /// normalized to `u0/2` on the orbit.
    pub fn radial_profile(&self, which: Which, r: f64) -> Result<Complex64> {
        let m = self.mode(which);
        if m.scale == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        if r == self.r_n {
            return Ok(Complex64::new(0.5 * self.u0 * m.scale, 0.0));
        }
        let ln = ln_radial(m.ltilde, self.alpha, m.omega0, r)? - m.ln_radial_orbit;
        Ok(ln.exp() * (0.5 * self.u0 * m.scale))
    }

    fn angular_ratio(&self, which: Which, theta: f64) -> Result<f64> {
        let m = self.mode(which);
        if theta == FRAC_PI_2 {
            return Ok(1.0);
        }
        Ok(assoc_legendre_scaled(m.l, m.m, theta.cos())? / m.legendre_equator_scaled)
    }

    fn phase(&self, which: Which, t: f64, phi: f64) -> Complex64 {
        let m = self.mode(which);
        Complex64::from_polar(1.0, m.sign * m.m as f64 * phi - m.omega * t)
    }
}

/// A mode of the form `radial(r) · angular(θ) · exp(i(m φ - ω t))`.
pub trait SeparableMode: Sync {
    fn radial(&self, r: f64) -> Result<Complex64>;
    fn angular(&self, theta: f64) -> Result<f64>;
    /// Signed azimuthal order `m`.
    fn azimuthal_order(&self) -> f64;
    fn time_frequency(&self) -> f64;

    fn value(&self, t: f64, r: f64, theta: f64, phi: f64) -> Result<Complex64> {
        let phase = Complex64::from_polar(1.0, self.azimuthal_order() * phi - self.time_frequency() * t);
        Ok(self.radial(r)? * self.angular(theta)? * phase)
    }
}

/// One mode of a pair, borrowed.
#[derive(Debug, Clone, Copy)]
pub struct ModeView<'a> {
    pub pair: &'a ModePair,
    pub which: Which,
}

impl SeparableMode for ModeView<'_> {
    fn radial(&self, r: f64) -> Result<Complex64> {
        self.pair.radial_profile(self.which, r)
    }

    fn angular(&self, theta: f64) -> Result<f64> {
        self.pair.angular_ratio(self.which, theta)
    }

    fn azimuthal_order(&self) -> f64 {
        let m = self.pair.mode(self.which);
        m.sign * m.m as f64
    }

    fn time_frequency(&self) -> f64 {
        self.pair.mode(self.which).omega
    }
}

impl ModePair {
    pub fn modes(&self) -> [ModeView<'_>; 2] {
        [
            ModeView { pair: self, which: Which::Plus },
            ModeView { pair: self, which: Which::Minus },
        ]
    }
}

/// Builds the mode pair matched to `orbit`.
///
/// The field-free dispersion `m±/r = ω±⁰ + α/r` is checked on the field-free
/// relativistic orbit with the same `n`; it holds only when
/// `m± = n²/α ± n`, so an incompatible choice of orders is rejected.
pub fn build_mode_pair(spec: ModeSpec, orbit: &OrbitSolution, params: &ModelParams) -> Result<ModePair> {
    let (mp, mm) = (spec.m_plus, spec.m_minus);
    if mp > spec.l_plus || mm > spec.l_minus {
        return Err(Error::domain("azimuthal order exceeds degree (need m <= l)"));
    }
    if (spec.l_plus + mp) % 2 == 1 || (spec.l_minus + mm) % 2 == 1 {
        return Err(Error::domain(
            "equatorial node: amplitude condition unsolvable (l + m must be even)",
        ));
    }
    let alpha = params.alpha;
    let m_eff = orbit.m_eff;
    let n = orbit.n;
    let r = orbit.r;
    let omega_l = orbit.omega_l;
    let (w0p, w0m) = mode_frequencies_zero(n, alpha, m_eff)?;

    let n_tilde = (mp as f64 - mm as f64) / 2.0;
    let n_big = (mp as f64 + mm as f64) / 2.0;

    let free = solve_orbit_exact(n, &params.with_b_field(0.0), m_eff, Dynamics::Relativistic)?;
    let rf = free.r;
    let resid_p = (mp as f64 / rf - w0p - alpha / rf) / (mp as f64 / rf).max(w0p);
    let resid_m = (mm as f64 / rf - w0m - alpha / rf) / (mm as f64 / rf).max(w0m);
    let zero_field_residual = resid_p.abs().max(resid_m.abs());
    if !(zero_field_residual <= DISPERSION_TOL) {
        return Err(Error::Consistency(format!(
            "dispersion k = omega + eps fails by {zero_field_residual:.3e} for (m+, m-) = ({mp}, {mm}) \
             at n = {n}; the orders must satisfy alpha = n^2/N with n = (m+ - m-)/2"
        )));
    }

    let eb = params.e_charge * params.b_field;
    let make = |m: u32, l: u32, omega0: f64, sign: f64| -> Result<Mode> {
        let ltilde = lambda_tilde(l, alpha)?;
        let ln_r = ln_radial(ltilde, alpha, omega0, r)?;
        let p0 = assoc_legendre_scaled(l, m, 0.0)?;
        let dfact_ln: f64 = (1..=m).map(|i| ((2 * i - 1) as f64).ln()).sum();
        let ln_p0 = Complex64::new(p0.abs().ln() + dfact_ln, if p0 < 0.0 { std::f64::consts::PI } else { 0.0 });
        Ok(Mode {
            m,
            l,
            ltilde,
            omega0,
            omega: omega0 + sign * m as f64 * omega_l,
            k: m as f64 / r,
            eps: alpha / r + sign * 0.5 * eb * r,
            ln_amplitude: Complex64::new((0.5 * params.u0).ln(), 0.0) - ln_r - ln_p0,
            ln_radial_orbit: ln_r,
            legendre_equator_scaled: p0,
            scale: 1.0,
            sign,
        })
    };
    let plus = make(mp, spec.l_plus, w0p, 1.0)?;
    let minus = make(mm, spec.l_minus, w0m, -1.0)?;

    Ok(ModePair {
        r_n: r,
        alpha,
        u0: params.u0,
        omega_l,
        m_eff,
        n_tilde,
        n_big,
        k_n: (plus.k - minus.k) / 2.0,
        omega_n: (plus.omega + minus.omega) / 2.0,
        omega_n_prime: (w0p + w0m) / 2.0,
        eta: (plus.eps - minus.eps) / 2.0,
        eps_bar: (plus.eps + minus.eps) / 2.0,
        lab_dispersion_residual: (
            plus.k - plus.omega - plus.eps,
            minus.k - minus.omega - minus.eps,
        ),
        zero_field_dispersion_residual: zero_field_residual,
        plus,
        minus,
    })
}

fn check_point(r: f64, theta: f64) -> Result<()> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::invalid("r", "radius must be positive"));
    }
    if !theta.is_finite() {
        return Err(Error::invalid("theta", "value is not finite"));
    }
    Ok(())
}

/// Value of one mode at `(t, r, θ, φ)`.
pub fn eval_mode(t: f64, r: f64, theta: f64, phi: f64, which: Which, pair: &ModePair) -> Result<Complex64> {
    check_point(r, theta)?;
    Ok(pair.radial_profile(which, r)? * pair.angular_ratio(which, theta)? * pair.phase(which, t, phi))
}

/// `u = u₊ + u₋`.
pub fn eval_total_field(t: f64, r: f64, theta: f64, phi: f64, pair: &ModePair) -> Result<Complex64> {
    Ok(eval_mode(t, r, theta, phi, Which::Plus, pair)? + eval_mode(t, r, theta, phi, Which::Minus, pair)?)
}

/// `(k_n - η) / (ω_n + ε̄)` with `ω_n = ω'_n + ñ ω_L`.
pub fn group_velocity(pair: &ModePair) -> Result<f64> {
    let den = pair.omega_n_prime + pair.n_tilde * pair.omega_l + pair.eps_bar;
    if den == 0.0 || !den.is_finite() {
        return Err(Error::domain("group velocity denominator vanishes"));
    }
    Ok((pair.k_n - pair.eta) / den)
}

/// Closed-form beat pattern along the orbit,
/// `u0 e^{i(ñφ - ω_n t)} cos[(ω_n + ε̄)(r_n φ - v_g t)]`.
pub fn field_on_orbit_closed_form(t: f64, phi: f64, pair: &ModePair, orbit: &OrbitSolution) -> Result<Complex64> {
    if (orbit.r - pair.r_n).abs() > 1e-15 * pair.r_n {
        return Err(Error::Consistency(format!(
            "mode pair matched to r = {} but orbit has r = {}",
            pair.r_n, orbit.r
        )));
    }
    let w = pair.omega_n_prime + pair.n_tilde * pair.omega_l;
    let vg = group_velocity(pair)?;
    let carrier = Complex64::from_polar(pair.u0, pair.n_tilde * phi - w * t);
    Ok(carrier * ((w + pair.eps_bar) * (pair.r_n * phi - vg * t)).cos())
}

/// Sampling plan for `field_grid` on the z = 0 plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub t: f64,
    pub half_extent: f64,
    pub resolution: usize,
}

/// Field on a square grid. Row 0 is the top edge (largest y), columns run
/// along increasing x.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldGrid {
    pub t: f64,
    pub half_extent: f64,
    pub resolution: usize,
    pub values: Vec<Complex64>,
    pub magnitudes: Vec<f64>,
}

impl FieldGrid {
    pub fn coordinate(&self, i: usize) -> f64 {
        -self.half_extent + 2.0 * self.half_extent * i as f64 / (self.resolution - 1) as f64
    }

    /// `(x, y)` of the sample at `(row, col)`.
    pub fn point(&self, row: usize, col: usize) -> (f64, f64) {
        (self.coordinate(col), self.coordinate(self.resolution - 1 - row))
    }

    /// Bilinear interpolation of the magnitude.
    pub fn magnitude_at(&self, x: f64, y: f64) -> Option<f64> {
        let n = self.resolution;
        let step = 2.0 * self.half_extent / (n - 1) as f64;
        let fx = (x + self.half_extent) / step;
        let fy = (self.half_extent - y) / step;
        if !(fx >= 0.0 && fy >= 0.0 && fx <= (n - 1) as f64 && fy <= (n - 1) as f64) {
            return None;
        }
        let c0 = (fx.floor() as usize).min(n - 2);
        let r0 = (fy.floor() as usize).min(n - 2);
        let (tx, ty) = (fx - c0 as f64, fy - r0 as f64);
        let at = |r: usize, c: usize| self.magnitudes[r * n + c];
        Some(
            (1.0 - ty) * ((1.0 - tx) * at(r0, c0) + tx * at(r0, c0 + 1))
                + ty * ((1.0 - tx) * at(r0 + 1, c0) + tx * at(r0 + 1, c0 + 1)),
        )
    }

    /// One `x,y,re,im,magnitude` row per sample, full precision.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "x,y,re,im,magnitude")?;
        for row in 0..self.resolution {
            for col in 0..self.resolution {
                let (x, y) = self.point(row, col);
                let i = row * self.resolution + col;
                let u = self.values[i];
                writeln!(w, "{x:.16e},{y:.16e},{:.16e},{:.16e},{:.16e}", u.re, u.im, self.magnitudes[i])?;
            }
        }
        Ok(())
    }

    /// Plain-text PGM (P2), magnitude scaled linearly so the maximum maps to 255.
    pub fn write_pgm<W: Write>(&self, mut w: W) -> io::Result<()> {
        let max = self.magnitudes.iter().cloned().fold(0.0, f64::max);
        writeln!(w, "P2")?;
        writeln!(w, "# magnitude of the total field at t = {:e}, max = {:e}", self.t, max)?;
        writeln!(w, "{} {}", self.resolution, self.resolution)?;
        writeln!(w, "255")?;
        for row in 0..self.resolution {
            let line: Vec<String> = (0..self.resolution)
                .map(|col| {
                    let m = self.magnitudes[row * self.resolution + col];
                    let level = if max > 0.0 { (255.0 * m / max).round() as u32 } else { 0 };
                    level.to_string()
                })
                .collect();
            writeln!(w, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

/// Samples the total field on the z = 0 plane. The centre sample is set to
/// zero. Radial factors are computed once per distinct radius.
pub fn field_grid(pair: &ModePair, grid: GridSpec) -> Result<FieldGrid> {
    if grid.resolution < 2 {
        return Err(Error::invalid("resolution", "need at least 2 points per axis"));
    }
    if grid.resolution > MAX_GRID_RESOLUTION {
        return Err(Error::invalid(
            "resolution",
            format!("{} exceeds the limit of {MAX_GRID_RESOLUTION}", grid.resolution),
        ));
    }
    if !(grid.half_extent > 0.0 && grid.half_extent.is_finite()) {
        return Err(Error::invalid("half_extent", "must be positive"));
    }
    if !grid.t.is_finite() {
        return Err(Error::invalid("t", "value is not finite"));
    }
    let n = grid.resolution;
    let mut out = FieldGrid {
        t: grid.t,
        half_extent: grid.half_extent,
        resolution: n,
        values: Vec::new(),
        magnitudes: Vec::new(),
    };
    let points: Vec<(f64, f64)> = (0..n * n).map(|i| out.point(i / n, i % n)).collect();

    let mut radii: Vec<f64> = points.iter().map(|&(x, y)| x.hypot(y)).filter(|&r| r > 0.0).collect();
    radii.sort_by(|a, b| a.total_cmp(b));
    radii.dedup();
    let profiles: Vec<(u64, (Complex64, Complex64))> = radii
        .par_iter()
        .map(|&r| {
            Ok((
                r.to_bits(),
                (pair.radial_profile(Which::Plus, r)?, pair.radial_profile(Which::Minus, r)?),
            ))
        })
        .collect::<Result<_>>()?;
    let cache: HashMap<u64, (Complex64, Complex64)> = profiles.into_iter().collect();

    out.values = points
        .par_iter()
        .map(|&(x, y)| {
            let r = x.hypot(y);
            if r == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let phi = y.atan2(x);
            let (rp, rm) = cache[&r.to_bits()];
            rp * pair.phase(Which::Plus, grid.t, phi) + rm * pair.phase(Which::Minus, grid.t, phi)
        })
        .collect();
    out.magnitudes = out.values.iter().map(|u| u.norm()).collect();
    Ok(out)
}

/// Strict local maxima of a periodic sequence.
pub fn count_periodic_maxima(samples: &[f64]) -> usize {
    let n = samples.len();
    (0..n)
        .filter(|&i| {
            let prev = samples[(i + n - 1) % n];
            let next = samples[(i + 1) % n];
            samples[i] > prev && samples[i] > next
        })
        .count()
}

/// `|u|` on the orbit circle at `count` equally spaced angles.
pub fn orbit_magnitude_profile(pair: &ModePair, t: f64, count: usize) -> Result<Vec<f64>> {
    (0..count)
        .map(|i| {
            let phi = TAU * i as f64 / count as f64;
            Ok(eval_total_field(t, pair.r_n, FRAC_PI_2, phi, pair)?.norm())
        })
        .collect()
}
