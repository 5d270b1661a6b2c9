//! Coefficient scalars.
//!
//! Every series and functional is generic over a [`Scalar`]. Two
//! implementations exist: [`ExactComplex`] (complex numbers with unbounded
//! rational parts) and [`Complex64`]. The exact mode makes operator
//! identities decidable by equality; the floating mode is used for grids,
//! quadrature and least squares.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{HbError, Result};

/// Complex number with exact rational real and imaginary parts.
pub type ExactComplex = Complex<BigRational>;

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const EXACT: bool;

    fn from_rational(q: &BigRational) -> Self;

    /// Exact for [`ExactComplex`]: every finite binary float is a rational.
    fn from_c64(z: Complex64) -> Self;

    fn to_c64(&self) -> Complex64;

    /// Modulus as a float (rounded in exact mode).
    fn abs_f64(&self) -> f64 {
        self.to_c64().norm()
    }

    /// `|self| <= c * a^k`, decided exactly in rational mode.
    fn abs_le_geometric(&self, c: f64, a: f64, k: u64) -> bool;

    fn powu(&self, k: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }

    fn scale_rational(&self, q: &BigRational) -> Self {
        self.clone() * Self::from_rational(q)
    }

    /// `ln |self|`, finite even when `|self|` is outside the float range;
    /// `-inf` for zero.
    fn ln_abs(&self) -> f64;

    /// `|self|` rounded up past any conversion error, for declaring radii.
    fn abs_upper_f64(&self) -> f64 {
        self.abs_f64() * (1.0 + 4.0 * f64::EPSILON)
    }
}

impl Scalar for Complex64 {
    const EXACT: bool = false;

    fn from_rational(q: &BigRational) -> Self {
        Complex64::new(q.to_f64().unwrap_or(f64::NAN), 0.0)
    }

    fn from_c64(z: Complex64) -> Self {
        z
    }

    fn to_c64(&self) -> Complex64 {
        *self
    }

    fn abs_le_geometric(&self, c: f64, a: f64, k: u64) -> bool {
        let bound = c * a.powf(k as f64);
        self.norm() <= bound * (1.0 + 4.0 * f64::EPSILON)
    }

    fn ln_abs(&self) -> f64 {
        self.norm().ln()
    }

    fn powu(&self, k: u64) -> Self {
        match i32::try_from(k) {
            Ok(k) => self.powi(k),
            Err(_) => self.powf(k as f64),
        }
    }
}

impl Scalar for ExactComplex {
    const EXACT: bool = true;

    fn from_rational(q: &BigRational) -> Self {
        Complex::new(q.clone(), BigRational::zero())
    }

    fn from_c64(z: Complex64) -> Self {
        Complex::new(rational_from_f64(z.re), rational_from_f64(z.im))
    }

    fn to_c64(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    fn abs_le_geometric(&self, c: f64, a: f64, k: u64) -> bool {
        let c = rational_from_f64(c);
        let a = rational_from_f64(a);
        let bound = c * num_traits::pow(a, k as usize);
        let norm_sq = self.re.clone() * self.re.clone() + self.im.clone() * self.im.clone();
        norm_sq <= bound.clone() * bound
    }

    fn ln_abs(&self) -> f64 {
        let (re, im) = (self.re.abs(), self.im.abs());
        let (big, small) = if re >= im { (re, im) } else { (im, re) };
        if big.is_zero() {
            return f64::NEG_INFINITY;
        }
        let ratio = (small / &big).to_f64().unwrap_or(0.0);
        ln_rational(&big) + 0.5 * (ratio * ratio).ln_1p()
    }
}

/// `ln q` for `q > 0`, through the bit lengths of numerator and denominator.
fn ln_rational(q: &BigRational) -> f64 {
    ln_bigint(q.numer()) - ln_bigint(q.denom())
}

fn ln_bigint(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().unwrap_or(f64::NAN).abs().ln();
    }
    let shift = bits - 64;
    let top: BigInt = n.abs() >> shift;
    top.to_f64().unwrap_or(f64::NAN).ln() + shift as f64 * std::f64::consts::LN_2
}

/// Exact rational value of a finite float. Non-finite inputs map to zero.
pub fn rational_from_f64(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap_or_else(BigRational::zero)
}

/// Parses `"p/q"`, `"p"` or a decimal literal such as `"-0.25"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let t = s.trim();
    let err = || HbError::ParseRational(s.to_string());
    if let Some((num, den)) = t.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| err())?;
        let den: BigInt = den.trim().parse().map_err(|_| err())?;
        if den.is_zero() {
            return Err(err());
        }
        return Ok(BigRational::new(num, den));
    }
    if let Some((int_part, frac_part)) = t.split_once('.') {
        let negative = int_part.trim_start().starts_with('-');
        let int_digits = int_part.trim_start_matches(['-', '+']);
        if !frac_part.chars().all(|c| c.is_ascii_digit())
            || !int_digits.chars().all(|c| c.is_ascii_digit())
        {
            return Err(err());
        }
        let digits = format!("{int_digits}{frac_part}");
        let mag: BigInt = if digits.is_empty() {
            return Err(err());
        } else {
            digits.parse().map_err(|_| err())?
        };
        let den = num_traits::pow(BigInt::from(10), frac_part.len());
        let q = BigRational::new(mag, den);
        return Ok(if negative { -q } else { q });
    }
    let n: BigInt = t.parse().map_err(|_| err())?;
    Ok(BigRational::from_integer(n))
}

/// Canonical `p/q` (or `p`) rendering.
pub fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn exact(re: BigRational, im: BigRational) -> ExactComplex {
    Complex::new(re, im)
}

pub fn exact_real(q: BigRational) -> ExactComplex {
    Complex::new(q, BigRational::zero())
}

/// `|q|` for a rational.
pub fn rational_abs(q: &BigRational) -> BigRational {
    q.abs()
}

/// Compensated (Neumaier) complex summation.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: Complex64,
    carry: Complex64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: Complex64) {
        self.sum.re = neumaier_step(self.sum.re, x.re, &mut self.carry.re);
        self.sum.im = neumaier_step(self.sum.im, x.im, &mut self.carry.im);
    }

    pub fn value(&self) -> Complex64 {
        self.sum + self.carry
    }
}

fn neumaier_step(sum: f64, x: f64, carry: &mut f64) -> f64 {
    let t = sum + x;
    if sum.abs() >= x.abs() {
        *carry += (sum - t) + x;
    } else {
        *carry += (x - t) + sum;
    }
    t
}
