//! Normalized Bessel function of vector index `j_gamma` and its companion
//! `G_gamma(x) = j_gamma(e^{i pi/r} x)`.
//!
//! Truncation is chosen from the universal bound `alpha_{rn} >= (rn)!`, so
//! the same tail certificate works for every admissible `gamma`.

use num_complex::Complex64;

use crate::error::{HbError, Result};
use crate::index_core::VectorIndex;
use crate::scalar::{CompensatedSum, Scalar};
use crate::series_engine::{factorial_tail, ExpTypeCertificate, REvenSeries};

/// Hard cap on the adaptive truncation.
pub const MAX_TERMS: usize = 4096;

/// `j_gamma(lambda .)` truncated at `N`: normalized coefficients `(-lambda^r)^n`.
///
/// The series carries the declared certificate `(1, |lambda|)`.
pub fn j_series<S: Scalar>(vi: &VectorIndex, lambda: &S, truncation: usize) -> REvenSeries<S> {
    let step = -lambda.powu(vi.r() as u64);
    let mut coeffs = Vec::with_capacity(truncation + 1);
    let mut cur = S::one();
    for _ in 0..=truncation {
        coeffs.push(cur.clone());
        cur = cur * step.clone();
    }
    let modulus = lambda.abs_upper_f64();
    let a = if modulus > 0.0 { modulus } else { 1.0 };
    let cert = ExpTypeCertificate::declared(1.0, a).expect("positive certificate");
    REvenSeries::new(vi.clone(), coeffs).with_certificate(cert)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JValue {
    pub value: Complex64,
    /// Certified truncation tail `sum_{n>N} |z|^{rn}/(rn)!`.
    pub bound: f64,
    pub n_used: usize,
}

/// Smallest `N` with `sum_{n>N} x^{rn}/(rn)! <= tol`, capped at [`MAX_TERMS`].
/// The tail is decreasing in `N`, so a doubling search followed by bisection
/// finds the minimum.
pub fn truncation_for(x: f64, r: usize, tol: f64) -> (usize, f64) {
    let tail0 = factorial_tail(x, r, 0);
    if tail0 <= tol {
        return (0, tail0);
    }
    let mut lo = 0;
    let mut hi = 1;
    loop {
        let t = factorial_tail(x, r, hi);
        if t <= tol {
            break;
        }
        if hi >= MAX_TERMS {
            return (MAX_TERMS, t);
        }
        lo = hi;
        hi = (hi * 2).min(MAX_TERMS);
    }
    // tail(lo) > tol >= tail(hi)
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if factorial_tail(x, r, mid) <= tol {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (hi, factorial_tail(x, r, hi))
}

/// `j_gamma(z)` with a certified truncation bound.
pub fn j_eval(vi: &VectorIndex, z: Complex64, tol: f64) -> Result<JValue> {
    if !(tol > 0.0) {
        return Err(HbError::Argument(format!("tolerance must be positive, got {tol}")));
    }
    let r = vi.r();
    let modulus = z.norm();
    let (n_used, bound) = truncation_for(modulus, r, tol);
    if bound > tol {
        return Err(HbError::Precision { tol, floor: bound });
    }
    let table = vi.alpha_table(n_used);
    let step = -z.powi(r as i32);
    let mut sum = CompensatedSum::new();
    let mut term = Complex64::new(1.0, 0.0);
    let mut abs_sum = 0.0;
    for n in 0..=n_used {
        if n > 0 {
            term = term * step / table.ratio_f64(n);
        }
        if !(term.re.is_finite() && term.im.is_finite()) {
            return Err(HbError::Overflow { index: n });
        }
        abs_sum += term.norm();
        sum.add(term);
    }
    // Rounding floor of the summation itself.
    let floor = 16.0 * f64::EPSILON * abs_sum;
    if modulus > 0.0 && tol < floor {
        return Err(HbError::Precision { tol, floor });
    }
    Ok(JValue {
        value: sum.value(),
        bound,
        n_used,
    })
}

/// `G_gamma(x) = sum x^{rn}/alpha_{rn}` for `x >= 0`.
pub fn g_eval(vi: &VectorIndex, x: f64) -> Result<f64> {
    g_eval_bounded(vi, x).map(|g| g.value.re)
}

/// [`g_eval`] with its truncation tail and term count.
pub fn g_eval_bounded(vi: &VectorIndex, x: f64) -> Result<JValue> {
    if !(x >= 0.0) {
        return Err(HbError::Argument(format!("G needs x >= 0, got {x}")));
    }
    let r = vi.r();
    let (n_used, tail) = truncation_for(x, r, 1e-17 * x.exp().max(1.0));
    if !tail.is_finite() || n_used >= MAX_TERMS {
        return Err(HbError::Overflow { index: n_used });
    }
    let table = vi.alpha_table(n_used);
    let xr = x.powi(r as i32);
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    for n in 1..=n_used {
        term *= xr / table.ratio_f64(n);
        sum += term;
        if !sum.is_finite() {
            return Err(HbError::Overflow { index: n });
        }
    }
    Ok(JValue {
        value: Complex64::new(sum, 0.0),
        bound: tail,
        n_used,
    })
}
