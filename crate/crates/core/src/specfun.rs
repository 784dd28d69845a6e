//! Special functions used by the guiding-wave modes.
//!
//! `kummer_m` sums the Taylor series of `1F1(a; b; z)` directly. When the
//! partial sums cancel badly (imaginary `z` of a few hundred is routine for
//! the radial Coulomb factor) the sum is redone in binary fixed point with
//! enough bits to absorb the cancellation.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Float, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Series stops once this many consecutive terms are negligible.
const STOP_RUN: usize = 3;
const STOP_RATIO: f64 = 1e-16;
pub const KUMMER_MAX_TERMS: usize = 10_000;
/// Distance from a non-positive integer at which `b` counts as a pole.
const POLE_TOL: f64 = 1e-12;
/// Above this cancellation factor the hardware sum is not trusted.
const CANCELLATION_LIMIT: f64 = 16.0;
const MAX_FIXED_BITS: u64 = 8192;

fn check_finite(name: &str, z: Complex64) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, "complex argument is not finite"))
    }
}

fn is_pole(b: Complex64) -> bool {
    b.im.abs() <= POLE_TOL && b.re <= POLE_TOL && (b.re - b.re.round()).abs() <= POLE_TOL
}

/// Kummer's confluent hypergeometric function `M(a, b, z) = 1F1(a; b; z)`.
pub fn kummer_m(a: Complex64, b: Complex64, z: Complex64) -> Result<Complex64> {
    check_finite("a", a)?;
    check_finite("b", b)?;
    check_finite("z", z)?;
    if is_pole(b) {
        return Err(Error::domain(format!(
            "Kummer M: b = {b} is at a pole (zero or negative integer)"
        )));
    }
    if z.is_zero() {
        return Ok(Complex64::new(1.0, 0.0));
    }

    let pass = hardware_series(a, b, z)?;
    let trusted = pass.sum.re.is_finite()
        && pass.sum.im.is_finite()
        && pass.max_term.is_finite()
        && pass.max_term <= CANCELLATION_LIMIT * pass.sum.norm();
    if trusted {
        return Ok(pass.sum);
    }
    fixed::kummer_fixed(a, b, z, log2_peak_term(a, b, z))
}

struct HardwarePass {
    sum: Complex64,
    max_term: f64,
}

fn hardware_series(a: Complex64, b: Complex64, z: Complex64) -> Result<HardwarePass> {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut max_term = 1.0f64;
    let mut run = 0;
    let mut last = f64::NAN;
    for k in 0..KUMMER_MAX_TERMS {
        let kf = k as f64;
        term *= (a + kf) * z / ((b + kf) * (kf + 1.0));
        sum += term;
        let mag = term.norm();
        last = mag;
        if !mag.is_finite() || !sum.norm().is_finite() {
            return Ok(HardwarePass {
                sum,
                max_term: f64::INFINITY,
            });
        }
        max_term = max_term.max(mag);
        if mag == 0.0 {
            return Ok(HardwarePass { sum, max_term });
        }
        if mag < STOP_RATIO * sum.norm() {
            run += 1;
            if run >= STOP_RUN {
                return Ok(HardwarePass { sum, max_term });
            }
        } else {
            run = 0;
        }
    }
    Err(Error::Convergence {
        what: "Kummer series".into(),
        iterations: KUMMER_MAX_TERMS,
        last_increment: last,
    })
}

/// log2 of the largest series term, tracked in the log domain so it never overflows.
fn log2_peak_term(a: Complex64, b: Complex64, z: Complex64) -> f64 {
    let lz = z.norm().log2();
    let mut cur = 0.0f64;
    let mut peak = 0.0f64;
    for k in 0..KUMMER_MAX_TERMS {
        let kf = k as f64;
        let num = (a + kf).norm();
        if num == 0.0 {
            break;
        }
        cur += num.log2() + lz - (b + kf).norm().log2() - (kf + 1.0).log2();
        peak = peak.max(cur);
        if kf > z.norm() + a.norm() + 8.0 && cur < peak - 80.0 {
            break;
        }
    }
    peak
}

mod fixed {
    //! Complex binary fixed point: value = (re + i im) / 2^bits.

    use super::*;

    #[derive(Clone)]
    struct Fx {
        re: BigInt,
        im: BigInt,
    }

    fn from_f64(x: f64, bits: u64) -> BigInt {
        if x == 0.0 {
            return BigInt::zero();
        }
        let (mant, exp, sign) = Float::integer_decode(x);
        let shift = exp as i64 + bits as i64;
        let m = BigInt::from(mant);
        let v = if shift >= 0 {
            m << shift as usize
        } else {
            m >> (-shift) as usize
        };
        if sign < 0 {
            -v
        } else {
            v
        }
    }

    fn ldexp(mut x: f64, mut e: i64) -> f64 {
        while e > 1000 {
            x *= 2f64.powi(1000);
            e -= 1000;
        }
        while e < -1000 {
            x *= 2f64.powi(-1000);
            e += 1000;
        }
        x * 2f64.powi(e as i32)
    }

    fn to_f64(x: &BigInt, bits: u64) -> f64 {
        let sh = x.bits().saturating_sub(64);
        let top = (x >> sh as usize).to_f64().unwrap_or(0.0);
        ldexp(top, sh as i64 - bits as i64)
    }

    impl Fx {
        fn new(z: Complex64, bits: u64) -> Fx {
            Fx {
                re: from_f64(z.re, bits),
                im: from_f64(z.im, bits),
            }
        }

        fn mul(&self, o: &Fx, bits: u64) -> Fx {
            let b = bits as usize;
            Fx {
                re: (&self.re * &o.re - &self.im * &o.im) >> b,
                im: (&self.re * &o.im + &self.im * &o.re) >> b,
            }
        }

        fn div(&self, d: &Fx, bits: u64) -> Fx {
            let b = bits as usize;
            let nr = &self.re * &d.re + &self.im * &d.im;
            let ni = &self.im * &d.re - &self.re * &d.im;
            let dd = &d.re * &d.re + &d.im * &d.im;
            Fx {
                re: (nr << b) / &dd,
                im: (ni << b) / &dd,
            }
        }

        fn bits(&self) -> u64 {
            self.re.bits().max(self.im.bits())
        }

        fn is_zero(&self) -> bool {
            self.re.is_zero() && self.im.is_zero()
        }
    }

    pub(super) fn kummer_fixed(
        a: Complex64,
        b: Complex64,
        z: Complex64,
        log2_peak: f64,
    ) -> Result<Complex64> {
        let log2_terms = (KUMMER_MAX_TERMS as f64).log2();
        let mut bits = (log2_peak.max(0.0) + 96.0 + log2_terms).ceil() as u64;
        loop {
            let (sum, n_terms) = sum_fixed(a, b, z, bits)?;
            // Rounding error is a few ulps of the largest term per step; demand
            // 60 good bits relative to the final sum.
            let err_bits = log2_peak.max(0.0) + (n_terms as f64).log2() + 8.0;
            let good = sum.bits() as f64 - err_bits;
            if good >= 60.0 {
                return Ok(Complex64::new(to_f64(&sum.re, bits), to_f64(&sum.im, bits)));
            }
            if bits >= MAX_FIXED_BITS {
                return Err(Error::Precision(format!(
                    "Kummer M({a}, {b}, {z}): cancellation exceeds {MAX_FIXED_BITS}-bit working precision"
                )));
            }
            let deficit = (60.0 - good).max(32.0).ceil() as u64;
            bits = (bits + deficit + 32).min(MAX_FIXED_BITS);
        }
    }

    fn sum_fixed(a: Complex64, b: Complex64, z: Complex64, bits: u64) -> Result<(Fx, usize)> {
        let one = BigInt::from(1) << bits as usize;
        let fa = Fx::new(a, bits);
        let fb = Fx::new(b, bits);
        let fz = Fx::new(z, bits);
        let mut term = Fx {
            re: one.clone(),
            im: BigInt::zero(),
        };
        let mut sum = term.clone();
        let mut run = 0;
        for k in 0..KUMMER_MAX_TERMS {
            let kk = BigInt::from(k) << bits as usize;
            let ak = Fx {
                re: &fa.re + &kk,
                im: fa.im.clone(),
            };
            let k1 = BigInt::from(k + 1);
            let den = Fx {
                re: (&fb.re + &kk) * &k1,
                im: &fb.im * &k1,
            };
            let factor = ak.mul(&fz, bits).div(&den, bits);
            term = term.mul(&factor, bits);
            sum.re += &term.re;
            sum.im += &term.im;
            if term.is_zero() {
                return Ok((sum, k + 1));
            }
            if term.bits() + 70 < sum.bits() {
                run += 1;
                if run >= STOP_RUN {
                    return Ok((sum, k + 1));
                }
            } else {
                run = 0;
            }
        }
        Err(Error::Convergence {
            what: "Kummer series (extended precision)".into(),
            iterations: KUMMER_MAX_TERMS,
            last_increment: to_f64(&term.re, bits).hypot(to_f64(&term.im, bits)),
        })
    }
}

/// Associated Legendre function `P_l^m(x)` without the Condon-Shortley phase.
pub fn assoc_legendre(l: u32, m: u32, x: f64) -> Result<f64> {
    let scaled = assoc_legendre_scaled(l, m, x)?;
    let dfact: f64 = (1..=m).map(|i| (2 * i - 1) as f64).product();
    Ok(scaled * dfact)
}

/// `P_l^m(x) / (2m-1)!!`, which stays finite for large `m`.
pub fn assoc_legendre_scaled(l: u32, m: u32, x: f64) -> Result<f64> {
    if m > l {
        return Err(Error::domain(format!("associated Legendre: m = {m} exceeds l = {l}")));
    }
    if !(x.abs() <= 1.0) {
        return Err(Error::domain(format!("associated Legendre: |x| = {} exceeds 1", x.abs())));
    }
    let s = ((1.0 - x) * (1.0 + x)).sqrt();
    let mut pmm = s.powi(m as i32);
    if l == m {
        return Ok(pmm);
    }
    let mut pm1 = x * (2 * m + 1) as f64 * pmm;
    for ll in (m + 2)..=l {
        let next = (x * (2 * ll - 1) as f64 * pm1 - (ll + m - 1) as f64 * pmm) / (ll - m) as f64;
        pmm = pm1;
        pm1 = next;
    }
    Ok(pm1)
}

/// Effective Coulomb-shifted order `-1/2 + sqrt((l + 1/2)^2 - alpha^2)`.
pub fn lambda_tilde(l: u32, alpha: f64) -> Result<f64> {
    if !alpha.is_finite() {
        return Err(Error::invalid("alpha", "value is not finite"));
    }
    let h = l as f64 + 0.5;
    let radicand = (h - alpha) * (h + alpha);
    if radicand <= 0.0 {
        return Err(Error::domain(format!(
            "lambda_tilde: alpha = {alpha} is not below l + 1/2 = {h}"
        )));
    }
    Ok(-0.5 + radicand.sqrt())
}
