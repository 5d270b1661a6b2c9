//! Seeded cross-module identity suite.
//!
//! Every check draws its cases from one ChaCha stream, so a fixed
//! [`IdentityConfig`] always produces the same report. Exact checks compare
//! rational coefficients and report the largest coefficient difference; float
//! checks report the worst residual against a stated tolerance.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::fourier_pw::{fourier, inverse_fourier, MomentFunctional};
use crate::index_core::{factorial, AlphaTable, BrCoefficients, VectorIndex};
use crate::linear_dynamics::{verify_periodic, ConvolutionOperator};
use crate::scalar::{exact, ExactComplex, Scalar};
use crate::series_engine::{ExactSeries, FloatSeries, REvenSeries};
use crate::special_functions::{j_eval, j_series};
use crate::translation_convolution::{
    convolve, moment_convolution, translate_addition, translate_delsarte,
};

/// Random inputs for identity checks and property tests.
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn usize_in(&mut self, lo: usize, hi: usize) -> usize {
        self.rng.random_range(lo..=hi)
    }

    pub fn f64_in(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..=hi)
    }

    /// `p/q` with `|p| <= max_num`, `1 <= q <= max_den`.
    pub fn rational(&mut self, max_num: i64, max_den: i64) -> BigRational {
        let p = self.rng.random_range(-max_num..=max_num);
        let q = self.rng.random_range(1..=max_den);
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    pub fn exact_complex(&mut self, max_num: i64, max_den: i64) -> ExactComplex {
        exact(self.rational(max_num, max_den), self.rational(max_num, max_den))
    }

    /// Uniform in the disc `|z| <= radius`.
    pub fn complex_in_disc(&mut self, radius: f64) -> Complex64 {
        let rho = radius * self.f64_in(0.0, 1.0).sqrt();
        Complex64::from_polar(rho, self.f64_in(0.0, std::f64::consts::TAU))
    }

    /// Random rational index with `2 <= r <= max_r`, `gamma_k` within 2 of its lower bound.
    pub fn vector_index(&mut self, max_r: usize) -> VectorIndex {
        let r = self.usize_in(2, max_r);
        let gamma = (1..r)
            .map(|k| {
                let lower = BigRational::new(BigInt::from(k as i64 - r as i64), BigInt::from(r as i64));
                let p = self.rng.random_range(0..=12i64);
                let q = self.rng.random_range(1..=6i64);
                lower + BigRational::new(BigInt::from(p), BigInt::from(q))
            })
            .collect();
        VectorIndex::new(r, gamma).expect("gamma above its lower bound")
    }

    pub fn exact_series(&mut self, vi: &VectorIndex, truncation: usize) -> ExactSeries {
        let coeffs = (0..=truncation).map(|_| self.exact_complex(9, 7)).collect();
        REvenSeries::new(vi.clone(), coeffs)
    }

    pub fn float_series(&mut self, vi: &VectorIndex, truncation: usize) -> FloatSeries {
        let coeffs = (0..=truncation)
            .map(|_| Complex64::new(self.f64_in(-1.0, 1.0), self.f64_in(-1.0, 1.0)))
            .collect();
        REvenSeries::new(vi.clone(), coeffs)
    }

    /// Moments with a geometric certificate fitted automatically.
    pub fn exact_functional(&mut self, vi: &VectorIndex, max_index: usize) -> MomentFunctional<ExactComplex> {
        let moments = (0..=max_index).map(|_| self.exact_complex(9, 7)).collect();
        MomentFunctional::new(vi.clone(), moments, None).expect("no certificate to violate")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IdentityConfig {
    pub seed: u64,
    pub cases: usize,
    pub max_truncation: usize,
    pub max_r: usize,
    /// Fault injection: perturbs `alpha_{rn}` at this index in the tables the
    /// suite checks, which must then fail.
    pub corrupt_alpha: Option<usize>,
}

impl Default for IdentityConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            cases: 20,
            max_truncation: 12,
            max_r: 4,
            corrupt_alpha: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub module: &'static str,
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    pub worst_residual: f64,
    pub tolerance: f64,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IdentityReport {
    pub config: IdentityConfig,
    pub checks: Vec<CheckResult>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "version": crate::VERSION,
            "config": {
                "seed": self.config.seed,
                "cases": self.config.cases,
                "max_truncation": self.config.max_truncation,
                "max_r": self.config.max_r,
                "corrupt_alpha": self.config.corrupt_alpha,
            },
            "checks": self.checks.iter().map(|c| json!({
                "module": c.module,
                "name": c.name,
                "cases": c.cases,
                "failures": c.failures,
                "worst_residual": if c.worst_residual.is_finite() { json!(c.worst_residual) } else { json!("inf") },
                "tolerance": c.tolerance,
                "pass": c.passed(),
            })).collect::<Vec<_>>(),
            "total_failures": self.checks.iter().map(|c| c.failures).sum::<usize>(),
            "passed": self.passed(),
        })
    }
}

struct Tally {
    result: CheckResult,
}

impl Tally {
    fn new(module: &'static str, name: &'static str, tolerance: f64) -> Self {
        Self {
            result: CheckResult {
                module,
                name,
                cases: 0,
                failures: 0,
                worst_residual: 0.0,
                tolerance,
            },
        }
    }

    fn record(&mut self, residual: f64) {
        self.result.cases += 1;
        // NaN counts as a failure.
        if !(residual <= self.result.tolerance) {
            self.result.failures += 1;
        }
        if !(residual <= self.result.worst_residual) {
            self.result.worst_residual = residual;
        }
    }

    /// Exact comparison: records 0 on equality, else the largest difference
    /// (at least the smallest positive float so it always fails).
    fn record_exact(&mut self, a: &[ExactComplex], b: &[ExactComplex]) {
        self.record(exact_difference(a, b));
    }
}

/// Largest `|a_n - b_n|` over the union of indices; positive whenever the
/// vectors differ.
pub fn exact_difference(a: &[ExactComplex], b: &[ExactComplex]) -> f64 {
    let zero = ExactComplex::zero();
    (0..a.len().max(b.len()))
        .map(|n| {
            let x = a.get(n).unwrap_or(&zero);
            let y = b.get(n).unwrap_or(&zero);
            if x == y {
                0.0
            } else {
                (x.clone() - y.clone()).abs_f64().max(f64::MIN_POSITIVE)
            }
        })
        .fold(0.0, f64::max)
}

/// `alpha_{rn}` as `prod_{m <= n} P(rm)` with `B_r z^m = P(m) z^{m-r}`.
fn alpha_from_monomials(vi: &VectorIndex, n: usize) -> BigRational {
    (1..=n).fold(BigRational::one(), |acc, m| acc * vi.monomial_symbol((vi.r() * m) as i64))
}

fn suite_table(vi: &VectorIndex, n_max: usize, corrupt: Option<usize>) -> AlphaTable {
    let mut table = vi.alpha_table(n_max);
    if let Some(n) = corrupt.filter(|&n| n <= n_max) {
        let bad = table.alpha(n) + BigRational::one();
        table.corrupt(n, bad);
    }
    table
}

fn derivative_index(r: usize) -> VectorIndex {
    VectorIndex::derivative(r).expect("valid derivative index")
}

pub fn run_identities(cfg: &IdentityConfig) -> IdentityReport {
    let mut s = Sampler::new(cfg.seed);
    let n_max = cfg.max_truncation.max(2);
    let cases = cfg.cases;
    let mut checks = Vec::new();

    // index_core
    let mut t = Tally::new("index_core", "alpha_equals_monomial_product", 0.0);
    let mut lb = Tally::new("index_core", "alpha_at_least_factorial", 0.0);
    for _ in 0..cases {
        let vi = s.vector_index(cfg.max_r);
        let table = suite_table(&vi, n_max, cfg.corrupt_alpha);
        let oracle: Vec<ExactComplex> = (0..=n_max)
            .map(|n| ExactComplex::from_rational(&alpha_from_monomials(&vi, n)))
            .collect();
        let got: Vec<ExactComplex> = table.values().iter().map(ExactComplex::from_rational).collect();
        t.record_exact(&got, &oracle);
        let ok = (0..=n_max).all(|n| *table.alpha(n) >= factorial(vi.r() * n));
        lb.record(if ok { 0.0 } else { 1.0 });
    }
    checks.push(t.result);
    checks.push(lb.result);

    let mut t = Tally::new("index_core", "br_falling_factorial_identity", 0.0);
    for _ in 0..cases {
        let vi = s.vector_index(cfg.max_r);
        let coeffs = BrCoefficients::derive(&vi);
        let r = vi.r() as i64;
        let lhs: Vec<ExactComplex> = (0..3 * r)
            .map(|m| ExactComplex::from_rational(&coeffs.falling_form(m)))
            .collect();
        let rhs: Vec<ExactComplex> = (0..3 * r)
            .map(|m| ExactComplex::from_rational(&vi.monomial_symbol(m)))
            .collect();
        t.record_exact(&lhs, &rhs);
    }
    checks.push(t.result);

    let mut t = Tally::new("index_core", "derivative_index_reduction", 0.0);
    for r in 2..=cfg.max_r.max(2) {
        let vi = derivative_index(r);
        let table = suite_table(&vi, n_max, cfg.corrupt_alpha);
        let got: Vec<ExactComplex> = table.values().iter().map(ExactComplex::from_rational).collect();
        let want: Vec<ExactComplex> = (0..=n_max)
            .map(|n| ExactComplex::from_rational(&factorial(r * n)))
            .collect();
        let a_zero = BrCoefficients::derive(&vi).a.iter().skip(1).all(Zero::is_zero);
        t.record(exact_difference(&got, &want).max(if a_zero { 0.0 } else { 1.0 }));
    }
    checks.push(t.result);

    // series_engine
    let mut t = Tally::new("series_engine", "br_shift_equals_raw_form", 0.0);
    for _ in 0..cases {
        let vi = s.vector_index(cfg.max_r);
        let n = s.usize_in(1, n_max);
        let u = s.exact_series(&vi, n);
        t.record_exact(u.apply_br().coeffs(), u.apply_br_raw().coeffs());
    }
    checks.push(t.result);

    let mut t = Tally::new("series_engine", "br_integral_relative", 1e-9);
    for _ in 0..cases {
        let vi = s.vector_index(cfg.max_r);
        let u = { let k = s.usize_in(1, n_max); s.float_series(&vi, k) };
        let z = s.complex_in_disc(1.5);
        let shift = u.apply_br().eval(&z);
        let integral = u.apply_br_integral(z).value;
        t.record((shift - integral).norm() / shift.norm().max(1.0));
    }
    checks.push(t.result);

    let mut t = Tally::new("series_engine", "br_power_norm_inequality", 0.0);
    for _ in 0..cases {
        let vi = s.vector_index(cfg.max_r);
        let u = { let k = s.usize_in(0, 5); s.float_series(&vi, k) };
        let radius = [0.5, 1.0, 2.0][s.usize_in(0, 2)];
        let k = s.usize_in(1, 3);
        let check = u.br_power_norm_check(radius, k);
        t.record(if check.pass { 0.0 } else { check.lhs - check.rhs });
    }
    checks.push(t.result);

    let mut t = Tally::new("series_engine", "product_evaluates_to_product", 0.0);
    for _ in 0..cases {
        let vi = s.vector_index(cfg.max_r);
        let u = { let k = s.usize_in(0, 4); s.exact_series(&vi, k) };
        let v = { let k = s.usize_in(0, 4); s.exact_series(&vi, k) };
        let z = s.exact_complex(3, 4);
        let w = u.multiply(&v).expect("same index");
        t.record_exact(&[w.eval(&z)], &[u.eval(&z) * v.eval(&z)]);
    }
    checks.push(t.result);

    // special_functions
    let mut t = Tally::new("special_functions", "eigenfunction_exact", 0.0);
    for _ in 0..cases {
        let vi = s.vector_index(cfg.max_r);
        let lam = s.exact_complex(4, 3);
        let j = j_series(&vi, &lam, n_max);
        let lhs = j.apply_br();
        let rhs = j.truncated(n_max - 1).scalar_mul(&-Scalar::powu(&lam, vi.r() as u64));
        t.record_exact(lhs.coeffs(), rhs.coeffs());
    }
    checks.push(t.result);

    let mut t = Tally::new("special_functions", "classical_bessel_reductions", 1e-12);
    let cos_index = VectorIndex::parse(2, &["-1/2"]).expect("valid");
    let sinc_index = VectorIndex::parse(2, &["1/2"]).expect("valid");
    for _ in 0..cases {
        let z = s.complex_in_disc(5.0);
        let c = j_eval(&cos_index, z, 5e-13).map(|v| (v.value - z.cos()).norm());
        let sinc = if z.norm() < 1e-8 { Complex64::one() } else { z.sin() / z };
        let sn = j_eval(&sinc_index, z, 5e-13).map(|v| (v.value - sinc).norm());
        t.record(c.unwrap_or(f64::INFINITY).max(sn.unwrap_or(f64::INFINITY)));
    }
    checks.push(t.result);

    // translation_convolution
    let mut t = Tally::new("translation_convolution", "delsarte_equals_addition", 0.0);
    let mut zero = Tally::new("translation_convolution", "translation_by_zero_is_identity", 0.0);
    let mut sym = Tally::new("translation_convolution", "translation_symmetry", 0.0);
    for _ in 0..cases {
        let vi = s.vector_index(cfg.max_r);
        let u = { let k = s.usize_in(0, n_max); s.exact_series(&vi, k) };
        let z = s.exact_complex(3, 4);
        let w = s.exact_complex(3, 4);
        t.record_exact(
            translate_delsarte(&u, &z).series.coeffs(),
            translate_addition(&u, &z).series.coeffs(),
        );
        zero.record_exact(translate_delsarte(&u, &ExactComplex::zero()).series.coeffs(), u.coeffs());
        let a = translate_delsarte(&u, &w).series.eval(&z);
        let b = translate_delsarte(&u, &z).series.eval(&w);
        sym.record_exact(&[a], &[b]);
    }
    checks.extend([t.result, zero.result, sym.result]);

    let mut t = Tally::new("translation_convolution", "product_formula", 1e-9);
    for _ in 0..cases {
        let vi = s.vector_index(cfg.max_r);
        let (lam, z, w) = (s.complex_in_disc(1.0), s.complex_in_disc(1.0), s.complex_in_disc(1.0));
        let j = j_series(&vi, &lam, 48);
        let lhs = translate_delsarte(&j, &w).series.eval(&z);
        let rhs = j_eval(&vi, lam * w, 1e-14).map(|a| a.value).unwrap_or(Complex64::new(f64::NAN, 0.0))
            * j_eval(&vi, lam * z, 1e-14).map(|a| a.value).unwrap_or(Complex64::new(f64::NAN, 0.0));
        t.record((lhs - rhs).norm());
    }
    checks.push(t.result);

    let mut comm = Tally::new("translation_convolution", "convolution_commutative", 0.0);
    let mut assoc = Tally::new("translation_convolution", "convolution_associative", 0.0);
    let mut neutral = Tally::new("translation_convolution", "delta_is_neutral", 0.0);
    let mut brc = Tally::new("translation_convolution", "br_compatible", 0.0);
    let mut cdelta = Tally::new("translation_convolution", "convolve_with_delta", 0.0);
    let mfn_max = n_max.min(10);
    for _ in 0..cases {
        let vi = s.vector_index(cfg.max_r);
        let a = s.exact_functional(&vi, mfn_max);
        let b = s.exact_functional(&vi, mfn_max);
        let c = s.exact_functional(&vi, mfn_max);
        let mc = |x: &MomentFunctional<ExactComplex>, y: &MomentFunctional<ExactComplex>| {
            moment_convolution(x, y).expect("same index")
        };
        comm.record_exact(mc(&a, &b).moments(), mc(&b, &a).moments());
        assoc.record_exact(mc(&mc(&a, &b), &c).moments(), mc(&a, &mc(&b, &c)).moments());
        let delta = MomentFunctional::delta(vi.clone(), mfn_max);
        neutral.record_exact(mc(&delta, &a).moments(), a.moments());
        brc.record_exact(mc(&a.apply_br(), &b).moments(), mc(&a, &b).apply_br().moments());
        let u = s.exact_series(&vi, mfn_max);
        cdelta.record_exact(convolve(&delta, &u).expect("stored").series.coeffs(), u.coeffs());
    }
    checks.extend([comm.result, assoc.result, neutral.result, brc.result, cdelta.result]);

    // fourier_pw
    let mut rt = Tally::new("fourier_pw", "fourier_round_trips", 0.0);
    let mut mult = Tally::new("fourier_pw", "fourier_multiplicative", 0.0);
    let mut point = Tally::new("fourier_pw", "fourier_of_point_evaluation", 0.0);
    let mut trans = Tally::new("fourier_pw", "fourier_of_br_transpose", 0.0);
    for _ in 0..cases {
        let vi = s.vector_index(cfg.max_r);
        let a = s.exact_functional(&vi, mfn_max);
        let b = s.exact_functional(&vi, mfn_max);
        let back = inverse_fourier(&fourier(&a)).expect("polynomial transform");
        let v = s.exact_series(&vi, mfn_max);
        let fwd = fourier(&inverse_fourier(&v).expect("polynomial"));
        rt.record(exact_difference(back.moments(), a.moments()).max(exact_difference(fwd.coeffs(), v.coeffs())));
        let lhs = fourier(&moment_convolution(&a, &b).expect("same index"));
        let rhs = fourier(&a).multiply(&fourier(&b)).expect("same index").truncated(mfn_max);
        mult.record_exact(lhs.coeffs(), rhs.coeffs());
        let pa = s.exact_complex(3, 4);
        let da = MomentFunctional::point_evaluation(vi.clone(), &pa, mfn_max);
        point.record_exact(fourier(&da).coeffs(), j_series(&vi, &pa, mfn_max).coeffs());
        let zr = REvenSeries::basis(vi.clone(), 1, 1).scalar_mul(&-ExactComplex::from_rational(&vi.alpha(1)));
        let shifted = fourier(&a).multiply(&zr).expect("same index").truncated(mfn_max);
        trans.record_exact(fourier(&a.apply_br()).coeffs(), shifted.coeffs());
    }
    checks.extend([rt.result, mult.result, point.result, trans.result]);

    // linear_dynamics
    let mut comm = Tally::new("linear_dynamics", "operators_commute", 0.0);
    let mut cbr = Tally::new("linear_dynamics", "commutes_with_br", 0.0);
    let mut ctr = Tally::new("linear_dynamics", "commutes_with_translation", 0.0);
    let mut conv = Tally::new("linear_dynamics", "functional_round_trip_and_convolve", 0.0);
    for _ in 0..cases {
        let vi = s.vector_index(cfg.max_r);
        let t1 = { let k = s.usize_in(0, 4); s.exact_functional(&vi, k) };
        let t2 = { let k = s.usize_in(0, 4); s.exact_functional(&vi, k) };
        let (l1, l2) = (ConvolutionOperator::from_functional(&t1), ConvolutionOperator::from_functional(&t2));
        let u = s.exact_series(&vi, n_max);
        let ap = |l: &ConvolutionOperator<ExactComplex>, x: &ExactSeries| l.apply(x).expect("same index");
        comm.record_exact(ap(&l1, &ap(&l2, &u)).coeffs(), ap(&l2, &ap(&l1, &u)).coeffs());
        cbr.record_exact(ap(&l1, &u.apply_br()).coeffs(), ap(&l1, &u).apply_br().coeffs());
        let z = s.exact_complex(2, 3);
        ctr.record_exact(
            ap(&l1, &translate_delsarte(&u, &z).series).coeffs(),
            translate_delsarte(&ap(&l1, &u), &z).series.coeffs(),
        );
        let back = l1.to_functional();
        // A finite symbol is a polynomial: its unstored moments are zero.
        let mut padded = t1.moments().to_vec();
        padded.resize(n_max + 1, ExactComplex::zero());
        let t1p = MomentFunctional::new(vi.clone(), padded, None).expect("no certificate");
        let via_convolve = convolve(&t1p, &u).expect("all moments stored").series;
        conv.record(
            exact_difference(back.moments(), t1.moments())
                .max(exact_difference(ap(&l1, &u).coeffs(), via_convolve.coeffs())),
        );
    }
    checks.extend([comm.result, cbr.result, ctr.result, conv.result]);

    let mut eig = Tally::new("linear_dynamics", "eigen_relation", 1e-10);
    let mut per = Tally::new("linear_dynamics", "periodic_points_verify", 1e-8);
    for _ in 0..cases {
        let vi = s.vector_index(cfg.max_r);
        let t1 = { let k = s.usize_in(1, 4); s.exact_functional(&vi, k) }.to_float();
        let l = ConvolutionOperator::from_functional(&t1);
        let lam = s.complex_in_disc(1.5);
        let j = j_series(&vi, &lam, 40);
        let image = l.apply(&j).expect("same index");
        let window = 40 - l.degree();
        let scaled = j.truncated(window).scalar_mul(&l.symbol_eigenvalue(lam));
        let diff = image.truncated(window).sub(&scaled).expect("same index");
        let scale = l.symbol().iter().map(|b| b.norm()).fold(1.0, f64::max);
        eig.record(diff.norm_grid(1.0, 128) / scale);

        // B_r has eigenvalue 1 on j(lambda .) when lambda^r = -1.
        let br = ConvolutionOperator::<Complex64>::br(vi.clone());
        let root = Complex64::from_polar(1.0, std::f64::consts::PI / vi.r() as f64);
        per.record(verify_periodic(&br, root, 1, 48).unwrap_or(f64::INFINITY));
    }
    checks.extend([eig.result, per.result]);

    IdentityReport {
        config: cfg.clone(),
        checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> IdentityConfig {
        IdentityConfig {
            cases: 4,
            max_truncation: 8,
            ..Default::default()
        }
    }

    #[test]
    fn default_suite_passes() {
        let report = run_identities(&small());
        for c in &report.checks {
            assert!(c.passed(), "{c:?}");
        }
    }

    #[test]
    fn corrupted_alpha_is_detected() {
        let report = run_identities(&IdentityConfig {
            corrupt_alpha: Some(3),
            ..small()
        });
        assert!(!report.passed());
        let failing: Vec<_> = report.checks.iter().filter(|c| !c.passed()).map(|c| c.name).collect();
        assert!(failing.contains(&"alpha_equals_monomial_product"));
    }

    #[test]
    fn reports_are_deterministic() {
        let a = serde_json::to_string(&run_identities(&small()).to_json()).unwrap();
        let b = serde_json::to_string(&run_identities(&small()).to_json()).unwrap();
        assert_eq!(a, b);
    }
}
