//! Moment functionals, the generalized Fourier transform and Paley–Wiener
//! growth certificates.
//!
//! A functional `T` on r-even entire functions is represented by its
//! moments `t_n = <T, w^{rn}>` plus an optional certificate
//! `|t_n| <= C a^{rn}`. The transform is
//! `F(T)(z) = <T(w), j_gamma(wz)> = sum (-1)^n t_n z^{rn} / alpha_{rn}`,
//! i.e. normalized coefficients `(-1)^n t_n`.

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{HbError, Result};
use crate::index_core::VectorIndex;
use crate::lstsq;
use crate::scalar::{ExactComplex, Scalar};
use crate::series_engine::{
    factorial_tail, CertificateSource, ExpTypeCertificate, FloatSeries, REvenSeries,
    DEFAULT_TRUNCATION,
};

#[derive(Clone, Debug, PartialEq)]
pub struct MomentFunctional<S> {
    vi: VectorIndex,
    moments: Vec<S>,
    certificate: Option<ExpTypeCertificate>,
}

impl<S: Scalar> MomentFunctional<S> {
    /// Validates the certificate against every stored moment.
    pub fn new(
        vi: VectorIndex,
        moments: Vec<S>,
        certificate: Option<ExpTypeCertificate>,
    ) -> Result<Self> {
        if moments.is_empty() {
            return Err(HbError::Argument("a functional needs at least t_0".into()));
        }
        if let Some(cert) = &certificate {
            for (n, t) in moments.iter().enumerate() {
                if !cert.holds(t, vi.r(), n) {
                    return Err(HbError::CertificateViolated {
                        c: cert.c,
                        a: cert.a,
                        index: n,
                    });
                }
            }
        }
        Ok(Self {
            vi,
            moments,
            certificate,
        })
    }

    /// Dirac functional: `t_0 = 1`, `t_n = 0` otherwise.
    pub fn delta(vi: VectorIndex, max_index: usize) -> Self {
        let mut moments = vec![S::zero(); max_index + 1];
        moments[0] = S::one();
        let cert = ExpTypeCertificate::declared(1.0, 1.0).expect("valid");
        Self {
            vi,
            moments,
            certificate: Some(cert),
        }
    }

    /// Evaluation at `a`: `t_n = a^{rn}`.
    pub fn point_evaluation(vi: VectorIndex, a: &S, max_index: usize) -> Self {
        let step = a.powu(vi.r() as u64);
        let mut moments = Vec::with_capacity(max_index + 1);
        let mut cur = S::one();
        for _ in 0..=max_index {
            moments.push(cur.clone());
            cur = cur * step.clone();
        }
        let modulus = a.abs_upper_f64();
        let cert = ExpTypeCertificate::declared(1.0, if modulus > 0.0 { modulus } else { 1.0 })
            .expect("valid");
        Self {
            vi,
            moments,
            certificate: Some(cert),
        }
    }

    pub fn vi(&self) -> &VectorIndex {
        &self.vi
    }

    pub fn moments(&self) -> &[S] {
        &self.moments
    }

    pub fn max_index(&self) -> usize {
        self.moments.len() - 1
    }

    pub fn certificate(&self) -> Option<&ExpTypeCertificate> {
        self.certificate.as_ref()
    }

    /// `B_r` acting on functionals by transposition, `<B_r T, u> = <T, B_r u>`.
    /// Since `B_r w^{rn} = (alpha_{rn}/alpha_{r(n-1)}) w^{r(n-1)}`, the moments
    /// are `(B_r T)_0 = 0` and `(B_r T)_n = (alpha_{rn}/alpha_{r(n-1)}) t_{n-1}`.
    pub fn apply_br(&self) -> Self {
        let table = self.vi.alpha_table(self.max_index());
        let moments = (0..self.moments.len())
            .map(|n| {
                if n == 0 {
                    S::zero()
                } else {
                    self.moments[n - 1].scale_rational(table.ratio(n))
                }
            })
            .collect();
        Self {
            vi: self.vi.clone(),
            moments,
            certificate: None,
        }
    }

    pub fn to_float(&self) -> MomentFunctional<Complex64> {
        MomentFunctional {
            vi: self.vi.clone(),
            moments: self.moments.iter().map(Scalar::to_c64).collect(),
            certificate: self.certificate,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Pairing<S> {
    pub value: S,
    /// Bound on the part of the pairing that is not computed: moments beyond
    /// the stored range (from the functional's certificate) and series terms
    /// beyond the truncation (when both carry certificates).
    pub tail_bound: f64,
}

/// `<T, u> = sum_n c_n t_n` over raw coefficients `c_n = u_n / alpha_{rn}`.
pub fn pair<S: Scalar>(t: &MomentFunctional<S>, u: &REvenSeries<S>) -> Result<Pairing<S>> {
    if t.vi() != u.vi() {
        return Err(HbError::IndexMismatch);
    }
    let r = u.vi().r();
    let n_max = u.truncation();
    let table = u.alpha_table();
    let stored = t.max_index();
    let value = (0..=n_max.min(stored)).fold(S::zero(), |acc, n| {
        acc + u.coeffs()[n].clone() * t.moments()[n].clone() / S::from_rational(table.alpha(n))
    });
    let mut tail_bound = 0.0;
    if n_max > stored {
        let cert = t.certificate().ok_or(HbError::IncompletePairing {
            needed: n_max,
            available: stored,
        })?;
        tail_bound += (stored + 1..=n_max)
            .map(|n| {
                u.coeffs()[n].abs_f64()
                    * cert.c
                    * cert.a.powi((r * n) as i32)
                    * table.inv_alpha_f64(n)
            })
            .sum::<f64>();
    }
    if let (Some(tc), Some(uc)) = (t.certificate(), u.certificate()) {
        // sum_{n>N} |b_n t_n| / alpha_{rn} <= C_u C_T sum (a_u a_T)^{rn}/(rn)!
        tail_bound += uc.c * tc.c * factorial_tail(uc.a * tc.a, r, n_max);
    }
    if !tail_bound.is_finite() {
        return Err(HbError::PairingDivergence {
            radius: t.certificate().map_or(f64::INFINITY, |c| c.a),
        });
    }
    Ok(Pairing { value, tail_bound })
}

/// Generalized Fourier transform: normalized coefficients `(-1)^n t_n`.
///
/// The transform inherits the functional's certificate, or a fitted one.
pub fn fourier<S: Scalar>(t: &MomentFunctional<S>) -> REvenSeries<S> {
    let coeffs: Vec<S> = t.moments().iter().enumerate().map(|(n, m)| alternate(n, m)).collect();
    let cert = match t.certificate() {
        Some(c) => *c,
        None => fit_certificate(&coeffs, t.vi().r()).certificate,
    };
    REvenSeries::new(t.vi().clone(), coeffs).with_certificate(cert)
}

/// Inverse transform: moments `t_n = (-1)^n b_n`.
pub fn inverse_fourier<S: Scalar>(v: &REvenSeries<S>) -> Result<MomentFunctional<S>> {
    let cert = match v.certificate() {
        Some(c) => *c,
        None if v.truncation() >= MIN_FIT_TRUNCATION => exp_type_fit(v)?.certificate,
        // A polynomial is trivially of exponential type.
        None => fit_certificate(v.coeffs(), v.vi().r()).certificate,
    };
    let moments = v.coeffs().iter().enumerate().map(|(n, b)| alternate(n, b)).collect();
    MomentFunctional::new(v.vi().clone(), moments, Some(cert))
}

fn alternate<S: Scalar>(n: usize, x: &S) -> S {
    if n.is_multiple_of(2) {
        x.clone()
    } else {
        -x.clone()
    }
}

pub const MIN_FIT_TRUNCATION: usize = 8;

/// Log-slope of `max(0, ln |b_n|^{1/(rn)})` against `ln n` above which the
/// coefficients are declared superexponential. Growth like `((rn)!)^s` has
/// slope about `s`; bounded coefficients stay well below `1/2`.
pub const SUPEREXPONENTIAL_SLOPE: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CertificateFit {
    pub certificate: ExpTypeCertificate,
    pub zero_series: bool,
}

/// Fits `a = max_n |b_n|^{1/(rn)}` and `C = max_n |b_n| / a^{rn}` over the
/// stored range. Sound on that range by construction.
pub fn exp_type_fit<S: Scalar>(v: &REvenSeries<S>) -> Result<CertificateFit> {
    if v.truncation() < MIN_FIT_TRUNCATION {
        return Err(HbError::TooShort {
            needed: MIN_FIT_TRUNCATION,
            got: v.truncation(),
        });
    }
    let r = v.vi().r();
    let logs: Vec<f64> = v.coeffs().iter().map(ln_abs).collect();
    let slope = upper_half_log_slope(&logs, r);
    if slope > SUPEREXPONENTIAL_SLOPE {
        return Err(HbError::NotExponentialType { slope });
    }
    Ok(fit_certificate(v.coeffs(), r))
}

fn fit_certificate<S: Scalar>(coeffs: &[S], r: usize) -> CertificateFit {
    let logs: Vec<f64> = coeffs.iter().map(ln_abs).collect();
    if logs.iter().all(|l| *l == f64::NEG_INFINITY) {
        return CertificateFit {
            certificate: ExpTypeCertificate::new(1.0, 1.0, CertificateSource::Fitted)
                .expect("valid"),
            zero_series: true,
        };
    }
    let ln_a = logs
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, l)| l.is_finite())
        .map(|(n, l)| l / (r * n) as f64)
        .fold(f64::NEG_INFINITY, f64::max);
    // Only b_0 is nonzero: clamp a to 1.
    let ln_a = if ln_a.is_finite() { ln_a } else { 0.0 };
    let ln_c = logs
        .iter()
        .enumerate()
        .filter(|(_, l)| l.is_finite())
        .map(|(n, l)| l - (r * n) as f64 * ln_a)
        .fold(f64::NEG_INFINITY, f64::max);
    // Inflate slightly so rounding in exp/ln never breaks the exact check.
    let c = ln_c.exp() * (1.0 + 1e-9);
    let a = ln_a.exp() * (1.0 + 1e-12);
    CertificateFit {
        certificate: ExpTypeCertificate::new(c, a, CertificateSource::Fitted).expect("valid"),
        zero_series: false,
    }
}

/// Least-squares slope of `max(0, ln |b_n|^{1/(rn)})` against `ln n` over the
/// upper half of the stored range.
fn upper_half_log_slope(logs: &[f64], r: usize) -> f64 {
    let n_max = logs.len() - 1;
    let pts: Vec<(f64, f64)> = (n_max.div_ceil(2).max(1)..=n_max)
        .filter(|&n| logs[n].is_finite())
        .map(|n| {
            let rho = (logs[n] / (r * n) as f64).max(0.0);
            ((n as f64).ln(), rho)
        })
        .collect();
    if pts.len() < 4 {
        return 0.0;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

fn ln_abs<S: Scalar>(x: &S) -> f64 {
    x.ln_abs()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PaEstimate {
    /// Grid lower bound on `sup_z |v(z)| e^{-a|z|}`.
    pub value: f64,
    pub argmax: Complex64,
    /// Radius of the examined disk.
    pub radius: f64,
}

/// Lower bound on `P_a(v) = sup |v(z)| e^{-a|z|}` from a polar grid on the
/// disk where the truncation tail is below `1e-10`.
pub fn pa_norm_estimate(v: &FloatSeries, a: f64) -> Result<PaEstimate> {
    if !(a > 0.0) {
        return Err(HbError::Argument(format!("P_a needs a > 0, got {a}")));
    }
    let r = v.vi().r();
    let n_max = v.truncation();
    let cap = ((r * n_max + 1) as f64 / a + 1.0).min(1e3);
    let radius = match v.certificate() {
        Some(cert) => {
            let ok = |rho: f64| cert.tail(r, n_max, rho) <= 1e-10;
            if ok(cap) {
                cap
            } else {
                let (mut lo, mut hi) = (0.0, cap);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if ok(mid) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                lo
            }
        }
        None => cap,
    };
    let radial = 400;
    let angular = 64;
    let sector = 2.0 * std::f64::consts::PI / r as f64;
    let mut best = PaEstimate {
        value: 0.0,
        argmax: Complex64::zero(),
        radius,
    };
    for i in 0..=radial {
        let rho = radius * i as f64 / radial as f64;
        let tail = v.certificate().map_or(0.0, |c| c.tail(r, n_max, rho));
        let n_theta = if i == 0 { 1 } else { angular };
        for j in 0..n_theta {
            let z = Complex64::from_polar(rho, sector * j as f64 / angular as f64);
            let val = ((v.eval(&z).norm() - tail).max(0.0)) * (-a * rho).exp();
            if val > best.value {
                best.value = val;
                best.argmax = z;
            }
        }
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityFit {
    /// Root-mean-square of the residual function on `|z| = R`, which is the
    /// quantity the least-squares problem minimizes.
    pub residual: f64,
    /// Grid sup-norm of the residual on `|z| <= R` (maximum on the circle).
    pub sup_residual: f64,
    pub coefficients: Vec<Complex64>,
    pub regularized: bool,
    pub condition: f64,
}

const REFINEMENT_STEPS: usize = 4;
const DENSITY_RIDGE: f64 = 1e-15;

/// Best combination `sum c_i j_gamma(lambda_i .)` approximating `target` on
/// `|z| <= R`.
///
/// The discrete least-squares problem on the circle `|z| = R` is solved in
/// coefficient space (Parseval: `sum_n |c_n|^2 R^{2rn}`), and the residual is
/// recomputed from exactly formed coefficients of the combination.
pub fn density_residual(
    vi: &VectorIndex,
    nodes: &[Complex64],
    target: &FloatSeries,
    radius: f64,
) -> Result<DensityFit> {
    if nodes.is_empty() {
        return Err(HbError::Argument("density_residual needs at least one node".into()));
    }
    if target.vi() != vi {
        return Err(HbError::IndexMismatch);
    }
    if !(radius > 0.0) {
        return Err(HbError::Argument(format!("radius must be positive, got {radius}")));
    }
    let n_max = target.truncation().max(DEFAULT_TRUNCATION);
    let weights = circle_weights(vi, n_max, radius);
    let cols = nodes.len();
    let r = vi.r() as i32;
    let mut a = Vec::with_capacity((n_max + 1) * cols);
    let mut b = Vec::with_capacity(n_max + 1);
    for (n, w) in weights.iter().enumerate() {
        for lam in nodes {
            a.push((-lam.powi(r)).powi(n as i32) * *w);
        }
        b.push(target.coeff(n) * *w);
    }
    let sol = lstsq::solve_with_ridge(n_max + 1, cols, &a, &b, DENSITY_RIDGE);
    let weighted_norm = |s: &FloatSeries| {
        s.coeffs()
            .iter()
            .zip(&weights)
            .map(|(c, w)| (c * *w).norm_sqr())
            .sum::<f64>()
            .sqrt()
    };
    let mut x = sol.x;
    let mut residual_series = exact_combination(vi, nodes, &x, target, n_max);
    let mut residual = weighted_norm(&residual_series);
    // Iterative refinement against the exactly formed residual.
    for _ in 0..REFINEMENT_STEPS {
        let rhs: Vec<Complex64> = residual_series
            .coeffs()
            .iter()
            .zip(&weights)
            .map(|(c, w)| -c * *w)
            .collect();
        let delta = lstsq::solve_with_ridge(n_max + 1, cols, &a, &rhs, DENSITY_RIDGE).x;
        let trial: Vec<Complex64> = x.iter().zip(&delta).map(|(p, d)| p + d).collect();
        let trial_series = exact_combination(vi, nodes, &trial, target, n_max);
        let trial_residual = weighted_norm(&trial_series);
        if !(trial_residual < residual) {
            break;
        }
        x = trial;
        residual_series = trial_series;
        residual = trial_residual;
    }
    Ok(DensityFit {
        residual,
        sup_residual: residual_series.norm_grid(radius, 512),
        coefficients: x,
        regularized: sol.regularized,
        condition: sol.condition,
    })
}

/// `R^{rn} / alpha_{rn}` for `n = 0..=N`.
pub(crate) fn circle_weights(vi: &VectorIndex, n_max: usize, radius: f64) -> Vec<f64> {
    let table = vi.alpha_table(n_max);
    let xr = radius.powi(vi.r() as i32);
    let mut w = 1.0;
    (0..=n_max)
        .map(|n| {
            if n > 0 {
                w *= xr / table.ratio_f64(n);
            }
            w
        })
        .collect()
}

/// Normalized coefficients of `sum_i c_i j(lambda_i .) - target`, formed in
/// exact rational arithmetic from the float inputs and rounded once.
pub(crate) fn exact_combination(
    vi: &VectorIndex,
    nodes: &[Complex64],
    coefficients: &[Complex64],
    target: &FloatSeries,
    n_max: usize,
) -> FloatSeries {
    let r = vi.r() as u64;
    let mut acc: Vec<ExactComplex> = (0..=n_max)
        .map(|n| -ExactComplex::from_c64(target.coeff(n)))
        .collect();
    for (lam, c) in nodes.iter().zip(coefficients) {
        let step = -Scalar::powu(&ExactComplex::from_c64(*lam), r);
        let mut cur = ExactComplex::from_c64(*c);
        for slot in acc.iter_mut() {
            *slot = slot.clone() + cur.clone();
            cur *= step.clone();
        }
    }
    FloatSeries::new(vi.clone(), acc.iter().map(Scalar::to_c64).collect())
}

/// `true` when every stored moment is zero.
pub fn is_zero_functional<S: Scalar>(t: &MomentFunctional<S>) -> bool {
    t.moments().iter().all(Zero::is_zero)
}
