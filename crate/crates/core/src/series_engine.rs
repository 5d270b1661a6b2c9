//! Truncated r-even entire functions in the normalized basis
//! `e_n(z) = z^{rn} / alpha_{rn}(gamma)`.
//!
//! In this basis `B_r` is the backward shift `(B_r u)_n = u_{n+1}`, which
//! turns operator identities into index bookkeeping. Raw monomial
//! coefficients `c_n = u_n / alpha_{rn}` are a derived view.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{HbError, Result};
use crate::index_core::{factorial, falling_factorial, AlphaTable, VectorIndex};
use crate::quadrature::GaussLegendre;
use crate::scalar::{ExactComplex, Scalar};

pub const DEFAULT_TRUNCATION: usize = 64;

/// Default number of equispaced points used by grid norms.
pub const DEFAULT_GRID: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CertificateSource {
    Declared,
    Fitted,
    /// Composed from other certificates by a rule that is not proven;
    /// re-validated on the stored range only.
    Heuristic,
}

/// Witness that normalized coefficients satisfy `|b_n| <= C a^{rn}`, i.e.
/// that the function has exponential type at most `a`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpTypeCertificate {
    #[serde(rename = "C")]
    pub c: f64,
    pub a: f64,
    #[serde(default = "declared")]
    pub source: CertificateSource,
}

fn declared() -> CertificateSource {
    CertificateSource::Declared
}

impl ExpTypeCertificate {
    pub fn new(c: f64, a: f64, source: CertificateSource) -> Result<Self> {
        if !(c > 0.0 && a > 0.0 && c.is_finite() && a.is_finite()) {
            return Err(HbError::Argument(format!(
                "certificate needs finite C > 0 and a > 0, got C={c}, a={a}"
            )));
        }
        Ok(Self { c, a, source })
    }

    pub fn declared(c: f64, a: f64) -> Result<Self> {
        Self::new(c, a, CertificateSource::Declared)
    }

    /// Checks `|value| <= C a^{r n}`.
    pub fn holds<S: Scalar>(&self, value: &S, r: usize, n: usize) -> bool {
        value.abs_le_geometric(self.c, self.a, (r * n) as u64)
    }

    /// Bound on `sum_{n > N} |b_n| |z|^{rn} / alpha_{rn}` using `alpha_{rn} >= (rn)!`.
    pub fn tail(&self, r: usize, truncation: usize, modulus: f64) -> f64 {
        self.c * factorial_tail(self.a * modulus, r, truncation)
    }
}

/// `sum_{n > N} x^{rn} / (rn)!`, the universal truncation tail.
pub fn factorial_tail(x: f64, r: usize, truncation: usize) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let ln_x = x.ln();
    let mut ln_fact = 0.0;
    let mut j = 0usize;
    let mut sum = 0.0f64;
    let mut n = truncation + 1;
    loop {
        let target = r * n;
        while j < target {
            j += 1;
            ln_fact += (j as f64).ln();
        }
        let term = (target as f64 * ln_x - ln_fact).exp();
        sum += term;
        if !sum.is_finite() {
            return f64::INFINITY;
        }
        // Terms decrease once rn exceeds x.
        if target as f64 > x && term <= sum * 1e-18 {
            return sum;
        }
        if n > truncation + 100_000 {
            return sum;
        }
        n += 1;
    }
}

/// A truncated r-even series `u(z) = sum_{n<=N} u_n z^{rn} / alpha_{rn}`.
#[derive(Clone, Debug, PartialEq)]
pub struct REvenSeries<S> {
    vi: VectorIndex,
    coeffs: Vec<S>,
    certificate: Option<ExpTypeCertificate>,
}

pub type ExactSeries = REvenSeries<ExactComplex>;
pub type FloatSeries = REvenSeries<Complex64>;

impl<S: Scalar> REvenSeries<S> {
    /// Normalized coefficients `u_0..u_N`; an empty vector is the zero series.
    pub fn new(vi: VectorIndex, mut coeffs: Vec<S>) -> Self {
        if coeffs.is_empty() {
            coeffs.push(S::zero());
        }
        Self {
            vi,
            coeffs,
            certificate: None,
        }
    }

    pub fn zero(vi: VectorIndex, truncation: usize) -> Self {
        Self::new(vi, vec![S::zero(); truncation + 1])
    }

    pub fn constant(vi: VectorIndex, c: S, truncation: usize) -> Self {
        let mut s = Self::zero(vi, truncation);
        s.coeffs[0] = c;
        s
    }

    /// `e_k = z^{rk} / alpha_{rk}`.
    pub fn basis(vi: VectorIndex, k: usize, truncation: usize) -> Self {
        let mut s = Self::zero(vi, truncation.max(k));
        s.coeffs[k] = S::one();
        s
    }

    /// Builds from raw monomial coefficients `c_n` of `z^{rn}`.
    pub fn from_raw(vi: VectorIndex, raw: Vec<S>) -> Self {
        let table = vi.alpha_table(raw.len().saturating_sub(1));
        let coeffs = raw
            .into_iter()
            .enumerate()
            .map(|(n, c)| c.scale_rational(table.alpha(n)))
            .collect();
        Self::new(vi, coeffs)
    }

    pub fn vi(&self) -> &VectorIndex {
        &self.vi
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<S> {
        self.coeffs
    }

    pub fn truncation(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Normalized coefficient `u_n`, zero beyond the truncation.
    pub fn coeff(&self, n: usize) -> S {
        self.coeffs.get(n).cloned().unwrap_or_else(S::zero)
    }

    pub fn certificate(&self) -> Option<&ExpTypeCertificate> {
        self.certificate.as_ref()
    }

    pub fn with_certificate(mut self, cert: ExpTypeCertificate) -> Self {
        self.certificate = Some(cert);
        self
    }

    pub fn without_certificate(mut self) -> Self {
        self.certificate = None;
        self
    }

    pub fn alpha_table(&self) -> AlphaTable {
        self.vi.alpha_table(self.truncation())
    }

    /// Raw monomial coefficients `c_n = u_n / alpha_{rn}` (exact in rational mode).
    pub fn raw_coeffs(&self) -> Vec<S> {
        let table = self.alpha_table();
        self.coeffs
            .iter()
            .enumerate()
            .map(|(n, u)| u.clone() / S::from_rational(table.alpha(n)))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Zero-pads or cuts to the given truncation.
    pub fn truncated(&self, truncation: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(truncation + 1, S::zero());
        Self {
            vi: self.vi.clone(),
            coeffs,
            certificate: self.certificate,
        }
    }

    /// Coefficientwise equality on `0..=upto`, zero-padding either side.
    pub fn agrees_through(&self, other: &Self, upto: usize) -> bool {
        self.vi == other.vi && (0..=upto).all(|n| self.coeff(n) == other.coeff(n))
    }

    /// Coefficientwise equality with zero padding.
    pub fn same_coefficients(&self, other: &Self) -> bool {
        self.agrees_through(other, self.truncation().max(other.truncation()))
    }

    pub fn ensure_same_index(&self, other: &Self) -> Result<()> {
        if self.vi == other.vi {
            Ok(())
        } else {
            Err(HbError::IndexMismatch)
        }
    }

    /// Horner evaluation in the variable `x = z^r`.
    pub fn eval(&self, z: &S) -> S {
        let x = z.powu(self.vi.r() as u64);
        let table = self.alpha_table();
        let n_max = self.truncation();
        let mut acc = self.coeffs[n_max].clone();
        for n in (1..=n_max).rev() {
            acc = self.coeffs[n - 1].clone()
                + x.clone() * acc / S::from_rational(table.ratio(n));
        }
        acc
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.ensure_same_index(other)?;
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len).map(|n| self.coeff(n) + other.coeff(n)).collect();
        let certificate = match (self.certificate, other.certificate) {
            (Some(p), Some(q)) => Some(ExpTypeCertificate {
                c: p.c + q.c,
                a: p.a.max(q.a),
                source: CertificateSource::Fitted,
            }),
            _ => None,
        };
        Ok(Self {
            vi: self.vi.clone(),
            coeffs,
            certificate,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scalar_mul(&-S::one()))
    }

    pub fn scalar_mul(&self, lambda: &S) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| lambda.clone() * c.clone())
            .collect();
        let scale = lambda.abs_upper_f64();
        let certificate = self.certificate.and_then(|cert| {
            (scale > 0.0).then_some(ExpTypeCertificate {
                c: cert.c * scale,
                ..cert
            })
        });
        Self {
            vi: self.vi.clone(),
            coeffs,
            certificate,
        }
    }

    /// Truncated Cauchy product, capped at [`DEFAULT_TRUNCATION`].
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.multiply_capped(other, DEFAULT_TRUNCATION)
    }

    /// Cauchy product of the raw coefficients, renormalized:
    /// `w_n = sum_k binom_gamma(n, k) u_k v_{n-k}`.
    pub fn multiply_capped(&self, other: &Self, cap: usize) -> Result<Self> {
        self.ensure_same_index(other)?;
        let n_out = (self.truncation() + other.truncation()).min(cap);
        let table = self.vi.alpha_table(n_out);
        let coeffs = (0..=n_out)
            .map(|n| {
                (0..=n).fold(S::zero(), |acc, k| {
                    let (u, v) = (self.coeff(k), other.coeff(n - k));
                    if u.is_zero() || v.is_zero() {
                        acc
                    } else {
                        acc + (u * v).scale_rational(&table.binomial(n, k))
                    }
                })
            })
            .collect();
        Ok(Self::new(self.vi.clone(), coeffs))
    }

    /// `B_r` as the backward shift; the truncation drops by one.
    pub fn apply_br(&self) -> Self {
        let coeffs: Vec<S> = self.coeffs[1..].to_vec();
        let certificate = self.certificate.map(|cert| ExpTypeCertificate {
            c: cert.c * cert.a.powi(self.vi.r() as i32),
            ..cert
        });
        Self {
            vi: self.vi.clone(),
            coeffs: if coeffs.is_empty() { vec![S::zero()] } else { coeffs },
            certificate,
        }
    }

    pub fn apply_br_pow(&self, times: usize) -> Self {
        (0..times).fold(self.clone(), |u, _| u.apply_br())
    }

    pub fn to_float(&self) -> FloatSeries {
        REvenSeries {
            vi: self.vi.clone(),
            coeffs: self.coeffs.iter().map(Scalar::to_c64).collect(),
            certificate: self.certificate,
        }
    }
}

impl ExactSeries {
    /// `B_r` through the coefficient form `D^r + sum_k a_k z^{-k} D^{r-k}`
    /// acting on raw monomial coefficients.
    pub fn apply_br_raw(&self) -> Self {
        let r = self.vi.r();
        let br = self.vi.br_coefficients();
        let raw = self.raw_coeffs();
        if raw.len() == 1 {
            return Self::new(self.vi.clone(), vec![ExactComplex::zero()]);
        }
        // z^{rn} -> sum_k a_k (rn)_{r-k} z^{r(n-1)}.
        let out_raw: Vec<ExactComplex> = (1..raw.len())
            .map(|n| {
                let m = (r * n) as i64;
                let factor = br
                    .a
                    .iter()
                    .enumerate()
                    .fold(BigRational::zero(), |acc, (k, ak)| {
                        acc + ak * falling_factorial(m, r - k)
                    });
                raw[n].scale_rational(&factor)
            })
            .collect();
        Self::from_raw(self.vi.clone(), out_raw)
    }
}

/// Value of a floating evaluation with an optional certified tail.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Evaluation {
    pub value: Complex64,
    /// `sum_{n > N} |b_n||z|^{rn}/alpha_{rn}` bound, when the series carries a certificate.
    pub tail_bound: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegralEvaluation {
    pub value: Complex64,
    /// Difference between the primary and the check rule.
    pub rule_difference: f64,
    pub nonconvergent: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormCheck {
    /// Grid lower bound on `||B_r^n u||_R`.
    pub lhs: f64,
    /// `M^n (nr)! / R^{nr}` times the majorant of `||u||_{2R}`.
    pub rhs: f64,
    pub pass: bool,
}

/// Orders of the primary and check Gauss–Legendre rules for the integral form.
pub const QUADRATURE_ORDERS: (usize, usize) = (64, 48);

impl FloatSeries {
    /// Horner evaluation with overflow detection and the certified tail.
    pub fn eval_checked(&self, z: Complex64) -> Result<Evaluation> {
        let r = self.vi.r();
        let x = z.powi(r as i32);
        let table = self.alpha_table();
        let n_max = self.truncation();
        let mut acc = self.coeffs[n_max];
        for n in (1..=n_max).rev() {
            acc = self.coeffs[n - 1] + x * acc / table.ratio_f64(n);
            if !(acc.re.is_finite() && acc.im.is_finite()) {
                return Err(HbError::Overflow { index: n });
            }
        }
        let tail_bound = self
            .certificate
            .map(|cert| cert.tail(r, n_max, z.norm()));
        Ok(Evaluation {
            value: acc,
            tail_bound,
        })
    }

    /// `sum |c_n| R^{rn}`: an upper bound on `sup_{|z|<=R} |u(z)|`.
    pub fn norm_majorant(&self, radius: f64) -> f64 {
        let table = self.alpha_table();
        let xr = radius.powi(self.vi.r() as i32);
        let mut weight = 1.0;
        let mut sum = 0.0;
        for (n, u) in self.coeffs.iter().enumerate() {
            if n > 0 {
                weight *= xr / table.ratio_f64(n);
            }
            sum += u.norm() * weight;
        }
        sum
    }

    /// `max_j |u(R e^{i theta_j})|` over `m` equispaced angles: a lower
    /// bound on the sup-norm over the disk (maximum modulus principle).
    pub fn norm_grid(&self, radius: f64, m: usize) -> f64 {
        let m = m.max(1);
        (0..m)
            .map(|j| {
                let theta = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
                self.eval(&Complex64::from_polar(radius, theta)).norm()
            })
            .fold(0.0, f64::max)
    }

    /// `u^{(r)}(z)`, evaluated in `x = z^r` (the r-th derivative of an
    /// r-even function is a series in `z^{r(n-1)}`).
    fn rth_derivative(&self, z: Complex64, table: &AlphaTable) -> Complex64 {
        let r = self.vi.r();
        let n_max = self.truncation();
        if n_max == 0 {
            return Complex64::zero();
        }
        // u^{(r)} = sum_{m>=0} v_m x^m / alpha_m with v_m = u_{m+1} (r(m+1))_r / rho_{m+1}.
        let v = |m: usize| {
            let n = m + 1;
            let q = falling_factorial((r * n) as i64, r).to_f64().unwrap_or(f64::NAN)
                / table.ratio_f64(n);
            self.coeffs[n] * q
        };
        let x = z.powi(r as i32);
        let mut acc = v(n_max - 1);
        for m in (1..n_max).rev() {
            acc = v(m - 1) + x * acc / table.ratio_f64(m);
        }
        acc
    }

    /// `B_r u(z)` through the integral form
    /// `u^{(r)}(z) + sum_k a_k/(k-1)! int_0^1 (1-t)^{k-1} u^{(r)}(tz) dt`.
    pub fn apply_br_integral(&self, z: Complex64) -> IntegralEvaluation {
        let table = self.alpha_table();
        let br = self.vi.br_coefficients();
        let r = self.vi.r();
        let direct = self.rth_derivative(z, &table);
        let run = |order: usize| {
            let gl = GaussLegendre::new(order);
            let mut total = direct;
            for k in 1..r {
                let ak = br.a[k].to_f64().unwrap_or(f64::NAN);
                if ak == 0.0 {
                    continue;
                }
                let scale = ak / factorial(k - 1).to_f64().unwrap_or(f64::NAN);
                let integral: Complex64 = gl.integrate(|t| {
                    self.rth_derivative(z * t, &table) * (1.0 - t).powi(k as i32 - 1)
                });
                total += integral * scale;
            }
            total
        };
        let primary = run(QUADRATURE_ORDERS.0);
        let check = run(QUADRATURE_ORDERS.1);
        let rule_difference = (primary - check).norm();
        IntegralEvaluation {
            value: primary,
            rule_difference,
            nonconvergent: rule_difference > 1e-12 * primary.norm().max(1.0),
        }
    }

    /// Checks `||B_r^n u||_R <= M^n (nr)!/R^{nr} ||u||_{2R}` with a grid lower
    /// bound on the left and the majorant upper bound on the right.
    pub fn br_power_norm_check(&self, radius: f64, n: usize) -> NormCheck {
        let r = self.vi.r();
        let m = self.vi.br_coefficients().m_f64();
        let lhs = self.apply_br_pow(n).norm_grid(radius, DEFAULT_GRID);
        let fact = factorial(n * r).to_f64().unwrap_or(f64::INFINITY);
        let rhs = m.powi(n as i32) * fact / radius.powi((n * r) as i32)
            * self.norm_majorant(2.0 * radius);
        NormCheck {
            lhs,
            rhs,
            pass: lhs <= rhs,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{exact_real, rational};
    use num_traits::One;

    fn vi(r: usize, g: &[&str]) -> VectorIndex {
        VectorIndex::parse(r, g).unwrap()
    }

    fn cosine_series(n: usize) -> FloatSeries {
        let coeffs = (0..=n)
            .map(|k| Complex64::new(if k % 2 == 0 { 1.0 } else { -1.0 }, 0.0))
            .collect();
        FloatSeries::new(vi(2, &["-1/2"]), coeffs)
    }

    #[test]
    fn factorial_tail_matches_exponential_remainder() {
        // r = 1 is not a valid order but the tail is still sum_{n>N} x^n/n!.
        let x: f64 = 2.0;
        let partial: f64 = (0..=5).map(|n| x.powi(n) / factorial(n as usize).to_f64().unwrap()).sum();
        assert!((factorial_tail(x, 1, 5) - (x.exp() - partial)).abs() < 1e-14);
        assert_eq!(factorial_tail(0.0, 3, 0), 0.0);
        assert!(factorial_tail(1.0, 2, 40) < 1e-100);
    }

    #[test]
    fn eval_examples() {
        let one = FloatSeries::constant(vi(3, &["0", "1"]), Complex64::one(), 4);
        assert_eq!(one.eval(&Complex64::new(3.0, 4.0)), Complex64::one());
        let cos = cosine_series(40);
        let v = cos.eval_checked(Complex64::new(1.0, 0.0)).unwrap();
        assert!((v.value.re - 1f64.cos()).abs() < 1e-13);
        assert!(v.tail_bound.is_none());
    }

    #[test]
    fn eval_reports_overflow_index() {
        let vi = vi(2, &["-1/2"]);
        let coeffs = vec![Complex64::new(1e300, 0.0); 5];
        let s = FloatSeries::new(vi, coeffs);
        let err = s.eval_checked(Complex64::new(1e3, 0.0)).unwrap_err();
        assert!(matches!(err, HbError::Overflow { .. }));
    }

    #[test]
    fn add_and_scale_examples() {
        let v = vi(2, &["1/3"]);
        let u = ExactSeries::new(
            v.clone(),
            vec![exact_real(rational(1, 2)), exact_real(rational(-3, 7))],
        );
        let zero = ExactSeries::zero(v.clone(), 3);
        assert!(u.add(&zero).unwrap().same_coefficients(&u));
        assert!(u.scalar_mul(&ExactComplex::one()).same_coefficients(&u));
        assert!(u.add(&u.scalar_mul(&-ExactComplex::one())).unwrap().is_zero());
        let other = ExactSeries::zero(vi(2, &["1/2"]), 1);
        assert_eq!(u.add(&other).unwrap_err(), HbError::IndexMismatch);
    }

    #[test]
    fn multiply_examples() {
        let v = vi(3, &["1/3", "2"]);
        let u = ExactSeries::new(v.clone(), vec![ExactComplex::one(), ExactComplex::one()]);
        let sq = u.multiply(&u).unwrap();
        let raw = sq.raw_coeffs();
        let alpha1 = v.alpha(1);
        assert_eq!(raw[2], exact_real(BigRational::one() / (&alpha1 * &alpha1)));
        let one = ExactSeries::constant(v, ExactComplex::one(), 0);
        assert!(u.multiply(&one).unwrap().same_coefficients(&u));

        let cos = cosine_series(30);
        let cos2 = cos.multiply(&cos).unwrap();
        assert!((cos2.eval(&Complex64::new(1.0, 0.0)).re - 1f64.cos().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn br_shift_examples() {
        let v = vi(3, &["-1/3", "1/2"]);
        let e1 = ExactSeries::basis(v.clone(), 1, 1);
        assert!(e1.apply_br().same_coefficients(&ExactSeries::constant(v.clone(), ExactComplex::one(), 0)));
        assert!(e1.apply_br_raw().same_coefficients(&e1.apply_br()));
        let c = ExactSeries::constant(v.clone(), exact_real(rational(5, 1)), 0);
        assert!(c.apply_br().is_zero());
        assert_eq!(c.apply_br().truncation(), 0);
        assert!(c.apply_br_raw().is_zero());
    }

    #[test]
    fn integral_form_examples() {
        let v = vi(3, &["1/3", "1/2"]);
        let e1 = FloatSeries::basis(v.clone(), 1, 1);
        let res = e1.apply_br_integral(Complex64::new(1.0, 0.0));
        assert!((res.value - Complex64::one()).norm() < 1e-10);
        let c = FloatSeries::constant(v, Complex64::new(2.0, 0.0), 3);
        assert_eq!(c.apply_br_integral(Complex64::new(0.3, 2.0)).value, Complex64::zero());
    }

    #[test]
    fn norm_examples() {
        let v = vi(2, &["1/2"]);
        let one = FloatSeries::constant(v.clone(), Complex64::one(), 3);
        assert_eq!(one.norm_majorant(2.0), 1.0);
        assert_eq!(one.norm_grid(2.0, 16), 1.0);
        let e1 = FloatSeries::basis(v.clone(), 1, 1);
        let inv = 1.0 / v.alpha(1).to_f64().unwrap();
        assert!((e1.norm_majorant(1.0) - inv).abs() < 1e-16);
        assert!((e1.norm_grid(1.0, 16) - inv).abs() < 1e-16);
        let cos = cosine_series(40);
        let g = cos.norm_grid(1.0, 1024);
        assert!((g - 1f64.cosh()).abs() < 1e-12, "{g}");
    }

    #[test]
    fn norm_check_examples() {
        let v = vi(2, &["1/2"]);
        let one = FloatSeries::constant(v.clone(), Complex64::one(), 0);
        let chk = one.br_power_norm_check(1.0, 2);
        assert!(chk.pass && chk.lhs == 0.0);
        let e1 = FloatSeries::basis(v.clone(), 1, 1);
        let chk = e1.br_power_norm_check(1.0, 1);
        assert!((chk.lhs - 1.0).abs() < 1e-15 && chk.pass);
    }
}
