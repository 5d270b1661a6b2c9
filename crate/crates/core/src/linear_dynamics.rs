//! Convolution operators `Phi(B_r)`, their eigen-symbol
//! `Psi(lambda) = Phi(e^{i pi/r} lambda)`, periodic points and numerical
//! transitivity witnesses.
//!
//! Every `j_gamma(lambda .)` is an eigenfunction of `Phi(B_r)` with eigenvalue
//! `Psi(lambda)`. Chaos is witnessed at truncated scale, not proven: the
//! certificate lists sampled regions `|Psi| < 1` and `|Psi| > 1`, verified
//! periodic eigenfunctions, and one transitivity step `u ~ h`, `L^N u ~ g`.

use std::cmp::Ordering;

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{HbError, Result};
use crate::fourier_pw::{circle_weights, exact_combination, MomentFunctional};
use crate::index_core::VectorIndex;
use crate::lstsq;
use crate::scalar::Scalar;
use crate::series_engine::{
    CertificateSource, ExpTypeCertificate, FloatSeries, REvenSeries, DEFAULT_TRUNCATION,
};
use crate::special_functions::j_series;

/// `Phi(B_r) = sum_n (b_n / alpha_{rn}) B_r^n` for a stored symbol
/// `Phi(z) = sum_n b_n z^{rn} / alpha_{rn}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvolutionOperator<S> {
    vi: VectorIndex,
    symbol: Vec<S>,
    certificate: ExpTypeCertificate,
}

impl<S: Scalar> ConvolutionOperator<S> {
    /// A missing certificate is fitted on the stored symbol (a polynomial
    /// symbol is always of exponential type); a given one is validated.
    pub fn new(
        vi: VectorIndex,
        mut symbol: Vec<S>,
        certificate: Option<ExpTypeCertificate>,
    ) -> Result<Self> {
        if symbol.is_empty() {
            symbol.push(S::zero());
        }
        let r = vi.r();
        let certificate = match certificate {
            Some(cert) => {
                for (n, b) in symbol.iter().enumerate() {
                    if !cert.holds(b, r, n) {
                        return Err(HbError::CertificateViolated {
                            c: cert.c,
                            a: cert.a,
                            index: n,
                        });
                    }
                }
                cert
            }
            None => {
                let series = REvenSeries::new(vi.clone(), symbol.clone());
                crate::fourier_pw::inverse_fourier(&series)?
                    .certificate()
                    .copied()
                    .unwrap_or(ExpTypeCertificate {
                        c: 1.0,
                        a: 1.0,
                        source: CertificateSource::Fitted,
                    })
            }
        };
        Ok(Self {
            vi,
            symbol,
            certificate,
        })
    }

    pub fn identity(vi: VectorIndex) -> Self {
        Self::scalar(vi, S::one())
    }

    pub fn scalar(vi: VectorIndex, c: S) -> Self {
        let a = c.abs_upper_f64();
        Self {
            vi,
            symbol: vec![c],
            certificate: ExpTypeCertificate {
                c: if a > 0.0 { a } else { 1.0 },
                a: 1.0,
                source: CertificateSource::Declared,
            },
        }
    }

    /// `Phi(z) = z^r`, i.e. `L = B_r`.
    pub fn br(vi: VectorIndex) -> Self {
        let b1 = S::from_rational(&vi.alpha(1));
        let c = b1.abs_upper_f64();
        Self {
            vi,
            symbol: vec![S::zero(), b1],
            certificate: ExpTypeCertificate {
                c,
                a: 1.0,
                source: CertificateSource::Declared,
            },
        }
    }

    /// `Phi = G_gamma(a .)`, i.e. `L = T_a` (symbol `b_n = a^{rn}`, `n <= K`).
    pub fn translation(vi: VectorIndex, a: &S, degree: usize) -> Self {
        let t = MomentFunctional::point_evaluation(vi, a, degree);
        Self::from_functional(&t)
    }

    pub fn vi(&self) -> &VectorIndex {
        &self.vi
    }

    pub fn symbol(&self) -> &[S] {
        &self.symbol
    }

    pub fn degree(&self) -> usize {
        self.symbol.len() - 1
    }

    pub fn certificate(&self) -> &ExpTypeCertificate {
        &self.certificate
    }

    /// Scalar multiple of the identity: only `b_0` may be nonzero.
    pub fn is_scalar(&self) -> bool {
        self.symbol[1..].iter().all(Zero::is_zero)
    }

    /// `result_m = sum_{n <= min(K, N-m)} (b_n / alpha_{rn}) u_{m+n}`.
    ///
    /// For a truncated input this is the exact image of the polynomial; the
    /// truncation is kept.
    pub fn apply(&self, u: &REvenSeries<S>) -> Result<REvenSeries<S>> {
        if u.vi() != &self.vi {
            return Err(HbError::IndexMismatch);
        }
        let n_max = u.truncation();
        let k_max = self.degree().min(n_max);
        let table = self.vi.alpha_table(k_max);
        let weights: Vec<S> = (0..=k_max)
            .map(|n| self.symbol[n].clone() / S::from_rational(table.alpha(n)))
            .collect();
        let coeffs = (0..=n_max)
            .map(|m| {
                weights
                    .iter()
                    .take(n_max - m + 1)
                    .enumerate()
                    .filter(|(_, w)| !w.is_zero())
                    .fold(S::zero(), |acc, (n, w)| acc + w.clone() * u.coeffs()[m + n].clone())
            })
            .collect();
        Ok(REvenSeries::new(self.vi.clone(), coeffs))
    }

    /// `L^times u` by repeated application.
    pub fn apply_pow(&self, u: &REvenSeries<S>, times: usize) -> Result<REvenSeries<S>> {
        (0..times).try_fold(u.clone(), |acc, _| self.apply(&acc))
    }

    /// `b_n = t_n`.
    pub fn from_functional(t: &MomentFunctional<S>) -> Self {
        let certificate = t.certificate().copied().unwrap_or_else(|| {
            let series = REvenSeries::new(t.vi().clone(), t.moments().to_vec());
            crate::fourier_pw::inverse_fourier(&series)
                .ok()
                .and_then(|m| m.certificate().copied())
                .unwrap_or(ExpTypeCertificate {
                    c: 1.0,
                    a: 1.0,
                    source: CertificateSource::Fitted,
                })
        });
        Self {
            vi: t.vi().clone(),
            symbol: t.moments().to_vec(),
            certificate,
        }
    }

    pub fn to_functional(&self) -> MomentFunctional<S> {
        MomentFunctional::new(self.vi.clone(), self.symbol.clone(), Some(self.certificate))
            .expect("operator certificate holds on the stored symbol")
    }

    pub fn to_float(&self) -> ConvolutionOperator<Complex64> {
        ConvolutionOperator {
            vi: self.vi.clone(),
            symbol: self.symbol.iter().map(Scalar::to_c64).collect(),
            certificate: self.certificate,
        }
    }

    /// `Psi(lambda) = sum_n b_n (-lambda^r)^n / alpha_{rn}`.
    pub fn symbol_eigenvalue(&self, lambda: Complex64) -> Complex64 {
        self.eigen_and_derivative(lambda).0
    }

    /// `(Psi(lambda), Psi'(lambda))` by term-wise differentiation.
    pub fn eigen_and_derivative(&self, lambda: Complex64) -> (Complex64, Complex64) {
        let r = self.vi.r() as i32;
        let table = self.vi.alpha_table(self.degree());
        let x = -lambda.powi(r);
        let dx = -lambda.powi(r - 1) * r as f64;
        // Horner for sum b_n x^n / alpha_n and its x-derivative.
        let k = self.degree();
        let b = |n: usize| self.symbol[n].to_c64();
        let mut p = b(k);
        let mut dp = Complex64::zero();
        for n in (1..=k).rev() {
            let rho = table.ratio_f64(n);
            dp = p / rho + x * dp / rho;
            p = b(n - 1) + x * p / rho;
        }
        (p, dp * dx)
    }
}

/// Polar sampling grid for the eigen-symbol (the origin is always included).
#[derive(Clone, Debug, PartialEq)]
pub struct PolarGrid {
    pub radii: Vec<f64>,
    pub angles: usize,
}

impl Default for PolarGrid {
    fn default() -> Self {
        Self {
            radii: (1..=12).map(|k| 0.25 * k as f64).collect(),
            angles: 24,
        }
    }
}

impl PolarGrid {
    pub fn points(&self) -> Vec<Complex64> {
        let mut pts = vec![Complex64::zero()];
        for &rho in &self.radii {
            for j in 0..self.angles {
                let theta = 2.0 * std::f64::consts::PI * j as f64 / self.angles as f64;
                pts.push(Complex64::from_polar(rho, theta));
            }
        }
        pts
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymbolSample {
    pub lambda: Complex64,
    pub psi: Complex64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GsScan {
    pub a_samples: Vec<SymbolSample>,
    pub b_samples: Vec<SymbolSample>,
    pub is_scalar: bool,
}

/// Samples `Psi` on a polar grid and splits into `|Psi| < 1` and `|Psi| > 1`.
pub fn gs_scan(l: &ConvolutionOperator<Complex64>, grid: &PolarGrid) -> Result<GsScan> {
    if l.is_scalar() {
        return Ok(GsScan {
            a_samples: Vec::new(),
            b_samples: Vec::new(),
            is_scalar: true,
        });
    }
    let samples: Vec<SymbolSample> = grid
        .points()
        .into_par_iter()
        .map(|lambda| SymbolSample {
            lambda,
            psi: l.symbol_eigenvalue(lambda),
        })
        .collect();
    let a_samples: Vec<_> = samples.iter().copied().filter(|s| s.psi.norm() < 1.0).collect();
    let b_samples: Vec<_> = samples.iter().copied().filter(|s| s.psi.norm() > 1.0).collect();
    if a_samples.is_empty() || b_samples.is_empty() {
        return Err(HbError::EnlargeGrid {
            found_a: a_samples.len(),
            found_b: b_samples.len(),
        });
    }
    Ok(GsScan {
        a_samples,
        b_samples,
        is_scalar: false,
    })
}

/// CSV of `Psi` over the grid: `lambda_re,lambda_im,psi_re,psi_im,abs_psi`.
pub fn psi_grid_csv(l: &ConvolutionOperator<Complex64>, grid: &PolarGrid) -> String {
    let mut out = String::from("lambda_re,lambda_im,psi_re,psi_im,abs_psi\n");
    for lambda in grid.points() {
        let psi = l.symbol_eigenvalue(lambda);
        out.push_str(&format!(
            "{:e},{:e},{:e},{:e},{:e}\n",
            lambda.re,
            lambda.im,
            psi.re,
            psi.im,
            psi.norm()
        ));
    }
    out
}

pub const NEWTON_MAX_ITER: usize = 50;
pub const NEWTON_TOL: f64 = 1e-12;
pub const DEDUP_DISTANCE: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicPoint {
    pub lambda: Complex64,
    pub alpha: Ratio<i64>,
    /// Smallest `n >= 1` with `e^{i pi alpha n} = 1`.
    pub period: usize,
    /// `|Psi(lambda) - e^{i pi alpha}|`.
    pub newton_residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicSearch {
    pub points: Vec<PeriodicPoint>,
    pub diagnostic: Option<String>,
}

/// Smallest `n >= 1` with `(e^{i pi alpha})^n = 1`.
pub fn period_of(alpha: Ratio<i64>) -> usize {
    let (p, q) = (*alpha.numer(), *alpha.denom());
    // e^{i pi p n / q} = 1  iff  q | n and p n / q is even.
    let base = q.unsigned_abs() as usize;
    if p.is_even() {
        base
    } else {
        2 * base
    }
}

/// Newton iteration on `Psi(lambda) = e^{i pi alpha}` from every seed,
/// deduplicated at distance `1e-8`.
pub fn periodic_point_find(
    l: &ConvolutionOperator<Complex64>,
    alpha: Ratio<i64>,
    seeds: &[Complex64],
) -> Result<PeriodicSearch> {
    if l.is_scalar() {
        return Err(HbError::ScalarOperator);
    }
    let target = Complex64::from_polar(1.0, std::f64::consts::PI * ratio_f64(alpha));
    let period = period_of(alpha);
    let roots: Vec<(Complex64, f64)> = seeds
        .par_iter()
        .filter_map(|&seed| newton(l, target, seed))
        .collect();
    let mut points: Vec<PeriodicPoint> = Vec::new();
    for (lambda, residual) in roots {
        if points
            .iter()
            .any(|p| (p.lambda - lambda).norm() < DEDUP_DISTANCE)
        {
            continue;
        }
        points.push(PeriodicPoint {
            lambda,
            alpha,
            period,
            newton_residual: residual,
        });
    }
    let diagnostic = points
        .is_empty()
        .then(|| format!("Newton did not converge from any of {} seeds", seeds.len()));
    Ok(PeriodicSearch { points, diagnostic })
}

fn newton(
    l: &ConvolutionOperator<Complex64>,
    target: Complex64,
    seed: Complex64,
) -> Option<(Complex64, f64)> {
    let mut lambda = seed;
    for _ in 0..NEWTON_MAX_ITER {
        let (psi, dpsi) = l.eigen_and_derivative(lambda);
        let f = psi - target;
        if f.norm() <= NEWTON_TOL {
            // One polishing step, kept only if it does not hurt.
            if dpsi.norm() > 0.0 {
                let next = lambda - f / dpsi;
                let res = (l.symbol_eigenvalue(next) - target).norm();
                if res <= f.norm() {
                    return Some((next, res));
                }
            }
            return Some((lambda, f.norm()));
        }
        if dpsi.norm() == 0.0 || !dpsi.re.is_finite() || !dpsi.im.is_finite() {
            return None;
        }
        lambda -= f / dpsi;
        if !(lambda.re.is_finite() && lambda.im.is_finite()) {
            return None;
        }
    }
    let res = (l.symbol_eigenvalue(lambda) - target).norm();
    (res <= NEWTON_TOL).then_some((lambda, res))
}

fn ratio_f64(q: Ratio<i64>) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

/// Grid norm on `|z| <= 1` of `L^n j(lambda .) - j(lambda .)` over the
/// coefficients that repeated application determines.
pub fn verify_periodic(
    l: &ConvolutionOperator<Complex64>,
    lambda: Complex64,
    n: usize,
    truncation: usize,
) -> Result<f64> {
    if n == 0 {
        return Err(HbError::Argument("period must be >= 1".into()));
    }
    let j = j_series(l.vi(), &lambda, truncation);
    let image = l.apply_pow(&j, n)?;
    let window = determined_window(truncation, l.degree(), n);
    let diff = image.truncated(window).sub(&j.truncated(window))?;
    Ok(diff.norm_grid(1.0, 256))
}

/// Coefficients `0..=W` of `L^n u` that do not depend on the truncation of
/// the symbol-weighted shift: `N - nK`, or `N/2` when the symbol is long
/// (the missing contributions are then below `1/(rN/2)!`).
fn determined_window(truncation: usize, degree: usize, n: usize) -> usize {
    let reach = degree.saturating_mul(n);
    if reach <= truncation / 2 {
        truncation - reach
    } else {
        truncation / 2
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WitnessConfig {
    pub eps: f64,
    pub radius: f64,
    pub iterations: usize,
    pub nodes: usize,
    pub max_nodes: usize,
    pub truncation: usize,
    pub grid: PolarGrid,
}

impl Default for WitnessConfig {
    fn default() -> Self {
        Self {
            eps: 1e-3,
            radius: 1.0,
            iterations: 12,
            nodes: 16,
            max_nodes: 128,
            truncation: DEFAULT_TRUNCATION,
            grid: PolarGrid::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransitivityWitness {
    pub h: FloatSeries,
    pub g: FloatSeries,
    pub eps: f64,
    pub radius: f64,
    pub iterations: usize,
    pub nodes_per_set: usize,
    pub a_nodes: Vec<Complex64>,
    pub b_nodes: Vec<Complex64>,
    pub witness: FloatSeries,
    /// Grid norm of `u - h` on `|z| <= R`.
    pub residual_start: f64,
    /// Grid norm of `L^N u - g` on `|z| <= R`.
    pub residual_end: f64,
    /// Majorant (upper) bounds of the same two residual functions.
    pub majorant_start: f64,
    pub majorant_end: f64,
    pub regularized: bool,
}

/// Distinct `lambda^r` (the functions `j(lambda .)` only depend on it),
/// ordered by the given key with ties broken by `|lambda|`.
fn pick_nodes<F>(samples: &[SymbolSample], r: i32, key: F) -> Vec<SymbolSample>
where
    F: Fn(&SymbolSample) -> f64,
{
    let mut sorted = samples.to_vec();
    sorted.sort_by(|p, q| {
        key(p)
            .partial_cmp(&key(q))
            .unwrap_or(Ordering::Equal)
            .then(p.lambda.norm().partial_cmp(&q.lambda.norm()).unwrap_or(Ordering::Equal))
    });
    let mut out: Vec<SymbolSample> = Vec::new();
    for s in sorted {
        let x = s.lambda.powi(r);
        if out
            .iter()
            .all(|o| (o.lambda.powi(r) - x).norm() > 1e-12 * (1.0 + x.norm()))
        {
            out.push(s);
        }
    }
    out
}

/// One transitivity step: `u` close to `h` whose `N`-th iterate is close to
/// `g`, built from eigenfunctions with `|Psi| < 1` and `|Psi| > 1`.
pub fn transitivity_witness(
    l: &ConvolutionOperator<Complex64>,
    h: &FloatSeries,
    g: &FloatSeries,
    cfg: &WitnessConfig,
) -> Result<TransitivityWitness> {
    let vi = l.vi();
    if h.vi() != vi || g.vi() != vi {
        return Err(HbError::IndexMismatch);
    }
    let n_max = cfg.truncation.max(h.truncation()).max(g.truncation());
    if h.is_zero() && g.is_zero() {
        let zero = FloatSeries::zero(vi.clone(), n_max);
        return Ok(TransitivityWitness {
            h: h.clone(),
            g: g.clone(),
            eps: cfg.eps,
            radius: cfg.radius,
            iterations: cfg.iterations,
            nodes_per_set: 0,
            a_nodes: Vec::new(),
            b_nodes: Vec::new(),
            witness: zero,
            residual_start: 0.0,
            residual_end: 0.0,
            majorant_start: 0.0,
            majorant_end: 0.0,
            regularized: false,
        });
    }
    let scan = gs_scan(l, &cfg.grid)?;
    if scan.is_scalar {
        return Err(HbError::ScalarOperator);
    }
    let r = vi.r() as i32;
    let a_pool = pick_nodes(&scan.a_samples, r, |s| s.psi.norm());
    let b_pool = pick_nodes(&scan.b_samples, r, |s| -s.psi.norm());
    let mut best: Option<TransitivityWitness> = None;
    let mut k = cfg.nodes.max(1);
    loop {
        let a_nodes: Vec<SymbolSample> = a_pool.iter().take(k).copied().collect();
        let b_nodes: Vec<SymbolSample> = b_pool.iter().take(k).copied().collect();
        let w = solve_witness(l, h, g, cfg, n_max, &a_nodes, &b_nodes, k)?;
        let done = w.residual_start <= cfg.eps && w.residual_end <= cfg.eps;
        let better = best.as_ref().is_none_or(|b| {
            w.residual_start.max(w.residual_end) < b.residual_start.max(b.residual_end)
        });
        if better {
            best = Some(w);
        }
        if done {
            return Ok(best.expect("just stored"));
        }
        let exhausted = k >= a_pool.len() && k >= b_pool.len();
        if k >= cfg.max_nodes || exhausted {
            break;
        }
        k = (k * 2).min(cfg.max_nodes);
    }
    let b = best.expect("at least one attempt");
    Err(HbError::WitnessFailure {
        start: b.residual_start,
        end: b.residual_end,
        eps: cfg.eps,
        nodes: b.nodes_per_set,
    })
}

#[allow(clippy::too_many_arguments)]
fn solve_witness(
    l: &ConvolutionOperator<Complex64>,
    h: &FloatSeries,
    g: &FloatSeries,
    cfg: &WitnessConfig,
    n_max: usize,
    a_nodes: &[SymbolSample],
    b_nodes: &[SymbolSample],
    nodes_per_set: usize,
) -> Result<TransitivityWitness> {
    let vi = l.vi();
    let r = vi.r() as i32;
    let iters = cfg.iterations as i32;
    let weights = circle_weights(vi, n_max, cfg.radius);
    // Column j is (u-part, L^N u-part) of one eigenfunction.
    let mut columns: Vec<(Complex64, Complex64, Complex64)> = Vec::new(); // (x, start, end)
    for s in a_nodes {
        columns.push((-s.lambda.powi(r), Complex64::new(1.0, 0.0), s.psi.powi(iters)));
    }
    for s in b_nodes {
        columns.push((-s.lambda.powi(r), s.psi.powi(-iters), Complex64::new(1.0, 0.0)));
    }
    let cols = columns.len();
    let rows = 2 * (n_max + 1);
    let mut a = vec![Complex64::zero(); rows * cols];
    let mut b = vec![Complex64::zero(); rows];
    for (n, w) in weights.iter().enumerate() {
        for (j, (x, start, end)) in columns.iter().enumerate() {
            let base = x.powi(n as i32) * *w;
            a[n * cols + j] = base * *start;
            a[(n_max + 1 + n) * cols + j] = base * *end;
        }
        b[n] = h.coeff(n) * *w;
        b[n_max + 1 + n] = g.coeff(n) * *w;
    }
    let sol = lstsq::solve(rows, cols, &a, &b);
    let lambdas: Vec<Complex64> = a_nodes.iter().chain(b_nodes).map(|s| s.lambda).collect();
    let coeffs: Vec<Complex64> = sol
        .x
        .iter()
        .zip(&columns)
        .map(|(c, (_, start, _))| c * start)
        .collect();
    let zero = FloatSeries::zero(vi.clone(), n_max);
    let u = exact_combination(vi, &lambdas, &coeffs, &zero, n_max);
    let image = l.apply_pow(&u, cfg.iterations)?;
    let start = u.sub(h)?;
    let end = image.sub(g)?;
    Ok(TransitivityWitness {
        h: h.clone(),
        g: g.clone(),
        eps: cfg.eps,
        radius: cfg.radius,
        iterations: cfg.iterations,
        nodes_per_set,
        a_nodes: a_nodes.iter().map(|s| s.lambda).collect(),
        b_nodes: b_nodes.iter().map(|s| s.lambda).collect(),
        residual_start: start.norm_grid(cfg.radius, 512),
        residual_end: end.norm_grid(cfg.radius, 512),
        majorant_start: start.norm_majorant(cfg.radius),
        majorant_end: end.norm_majorant(cfg.radius),
        witness: u,
        regularized: sol.regularized,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifiedPeriodicPoint {
    pub point: PeriodicPoint,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChaosCertificate {
    pub operator: ConvolutionOperator<Complex64>,
    pub a_samples: Vec<SymbolSample>,
    pub b_samples: Vec<SymbolSample>,
    pub periodic_points: Vec<VerifiedPeriodicPoint>,
    pub periodic_tolerance: f64,
    pub transitivity: TransitivityWitness,
}

#[derive(Clone, Debug, PartialEq)]
pub enum CertifyOutcome {
    Certified(Box<ChaosCertificate>),
    /// The operator is a scalar multiple of the identity.
    Refused { reason: String },
}

#[derive(Clone, Debug, PartialEq)]
pub struct CertifyConfig {
    pub grid: PolarGrid,
    pub alphas: Vec<Ratio<i64>>,
    pub seeds: usize,
    pub periodic_tolerance: f64,
    pub witness: WitnessConfig,
    /// Defaults to the constant 1 and `e_1` when absent.
    pub h: Option<FloatSeries>,
    pub g: Option<FloatSeries>,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        Self {
            grid: PolarGrid::default(),
            alphas: vec![
                Ratio::new(0, 1),
                Ratio::new(1, 1),
                Ratio::new(1, 2),
                Ratio::new(1, 3),
                Ratio::new(2, 3),
            ],
            seeds: 24,
            periodic_tolerance: 1e-8,
            witness: WitnessConfig::default(),
            h: None,
            g: None,
        }
    }
}

/// Runs the scan, the periodic-point search and one transitivity witness.
pub fn certify(l: &ConvolutionOperator<Complex64>, cfg: &CertifyConfig) -> Result<CertifyOutcome> {
    if l.is_scalar() {
        return Ok(CertifyOutcome::Refused {
            reason: "operator is a scalar multiple of the identity; the chaos theorem does not apply"
                .into(),
        });
    }
    let scan = gs_scan(l, &cfg.grid)?;
    let mut pool: Vec<SymbolSample> = scan
        .a_samples
        .iter()
        .chain(&scan.b_samples)
        .copied()
        .collect();
    pool.sort_by(|p, q| {
        let dp = (p.psi.norm() - 1.0).abs();
        let dq = (q.psi.norm() - 1.0).abs();
        dp.partial_cmp(&dq)
            .unwrap_or(Ordering::Equal)
            .then(p.lambda.norm().partial_cmp(&q.lambda.norm()).unwrap_or(Ordering::Equal))
    });
    let seeds: Vec<Complex64> = pool.iter().take(cfg.seeds).map(|s| s.lambda).collect();
    let trunc = cfg.witness.truncation;
    let mut periodic_points = Vec::new();
    for &alpha in &cfg.alphas {
        let found = periodic_point_find(l, alpha, &seeds)?;
        for point in found.points {
            let residual = verify_periodic(l, point.lambda, point.period, trunc)?;
            if residual <= cfg.periodic_tolerance {
                periodic_points.push(VerifiedPeriodicPoint { point, residual });
            }
        }
    }
    let h = cfg
        .h
        .clone()
        .unwrap_or_else(|| FloatSeries::constant(l.vi().clone(), Complex64::new(1.0, 0.0), trunc));
    let g = cfg
        .g
        .clone()
        .unwrap_or_else(|| FloatSeries::basis(l.vi().clone(), 1, trunc));
    let transitivity = transitivity_witness(l, &h, &g, &cfg.witness)?;
    Ok(CertifyOutcome::Certified(Box::new(ChaosCertificate {
        operator: l.clone(),
        a_samples: scan.a_samples,
        b_samples: scan.b_samples,
        periodic_points,
        periodic_tolerance: cfg.periodic_tolerance,
        transitivity,
    })))
}
