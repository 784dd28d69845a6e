//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use astro_float::{BigFloat, RoundingMode, Sign};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

const RM: RoundingMode = RoundingMode::ToEven;

/// Nearest f64 of an arbitrary-precision float (truncating the low words).
pub fn big_to_f64(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let (words, _, sign, exp, _) = x.as_raw_parts().expect("finite value");
    let top = *words.last().unwrap() as f64 / 2f64.powi(64);
    let below = if words.len() > 1 {
        words[words.len() - 2] as f64 / 2f64.powi(128)
    } else {
        0.0
    };
    let mut v = top + below;
    let mut e = exp as i64;
    while e > 1000 {
        v *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        v *= 2f64.powi(-1000);
        e += 1000;
    }
    v *= 2f64.powi(e as i32);
    if sign == Sign::Neg {
        -v
    } else {
        v
    }
}

#[derive(Clone)]
struct BigComplex {
    re: BigFloat,
    im: BigFloat,
}

impl BigComplex {
    fn from(z: Complex64, p: usize) -> Self {
        BigComplex {
            re: BigFloat::from_f64(z.re, p),
            im: BigFloat::from_f64(z.im, p),
        }
    }
    fn add(&self, o: &Self, p: usize) -> Self {
        BigComplex {
            re: self.re.add(&o.re, p, RM),
            im: self.im.add(&o.im, p, RM),
        }
    }
    fn mul(&self, o: &Self, p: usize) -> Self {
        BigComplex {
            re: self.re.mul(&o.re, p, RM).sub(&self.im.mul(&o.im, p, RM), p, RM),
            im: self.re.mul(&o.im, p, RM).add(&self.im.mul(&o.re, p, RM), p, RM),
        }
    }
    fn div(&self, o: &Self, p: usize) -> Self {
        let dd = o.re.mul(&o.re, p, RM).add(&o.im.mul(&o.im, p, RM), p, RM);
        let nr = self.re.mul(&o.re, p, RM).add(&self.im.mul(&o.im, p, RM), p, RM);
        let ni = self.im.mul(&o.re, p, RM).sub(&self.re.mul(&o.im, p, RM), p, RM);
        BigComplex {
            re: nr.div(&dd, p, RM),
            im: ni.div(&dd, p, RM),
        }
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(big_to_f64(&self.re), big_to_f64(&self.im))
    }
}

/// Series oracle for M(a, b, z) in `bits`-bit binary floating point, stopping
/// when three consecutive terms fall below 1e-24 of the partial sum.
pub fn kummer_oracle(a: Complex64, b: Complex64, z: Complex64, bits: usize) -> Complex64 {
    let p = bits;
    let ba = BigComplex::from(a, p);
    let bb = BigComplex::from(b, p);
    let bz = BigComplex::from(z, p);
    let one = BigComplex::from(Complex64::new(1.0, 0.0), p);
    let mut term = one.clone();
    let mut sum = one;
    let mut run = 0;
    for k in 0..100_000usize {
        let kk = BigComplex::from(Complex64::new(k as f64, 0.0), p);
        let k1 = BigComplex::from(Complex64::new((k + 1) as f64, 0.0), p);
        let num = ba.add(&kk, p).mul(&bz, p);
        let den = bb.add(&kk, p).mul(&k1, p);
        term = term.mul(&num.div(&den, p), p);
        sum = sum.add(&term, p);
        let t = term.to_c64().norm();
        if t == 0.0 {
            break;
        }
        if t < 1e-24 * sum.to_c64().norm() {
            run += 1;
            if run == 3 {
                break;
            }
        } else {
            run = 0;
        }
    }
    sum.to_c64()
}

/// Exact rational partial sum of M(a, b, x) for rational real arguments; the
/// truncation is carried past the point where terms drop below 2^-200.
pub fn kummer_rational(a: &BigRational, b: &BigRational, x: &BigRational) -> f64 {
    let tiny = BigRational::new(BigInt::one(), BigInt::one() << 200usize);
    let mut term = BigRational::one();
    let mut sum = BigRational::one();
    let mut k = BigRational::zero();
    for _ in 0..2000 {
        let k1 = &k + BigRational::one();
        term = term * (a + &k) * x / ((b + &k) * &k1);
        sum += &term;
        k = k1;
        let mag = if term < BigRational::zero() { -term.clone() } else { term.clone() };
        if mag < tiny && k > BigRational::from_integer(BigInt::from(10)) {
            break;
        }
    }
    sum.to_f64().unwrap()
}
