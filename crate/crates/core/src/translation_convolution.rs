//! Delsarte generalized translation, the generalized addition formula, and
//! convolution of moment functionals with series and with each other.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{HbError, Result};
use crate::fourier_pw::MomentFunctional;
use crate::index_core::VectorIndex;
use crate::scalar::Scalar;
use crate::series_engine::{CertificateSource, ExpTypeCertificate, REvenSeries};

#[derive(Clone, Debug, PartialEq)]
pub struct Translated<S> {
    pub series: REvenSeries<S>,
    /// Number of products `(z^{rn}/alpha_{rn}) u_{m+n}` with `m, n <= N` but
    /// `m + n > N`: contributions that need coefficients beyond the truncation.
    pub dropped_terms: usize,
}

fn dropped_pairs(truncation: usize) -> usize {
    truncation * (truncation + 1) / 2
}

/// `T_z u = sum_n (z^{rn}/alpha_{rn}) B_r^n u`, in normalized coefficients
/// `result_m = sum_{n <= N-m} z^{rn}/alpha_{rn} u_{m+n}`.
pub fn translate_delsarte<S: Scalar>(u: &REvenSeries<S>, z: &S) -> Translated<S> {
    let n_max = u.truncation();
    let table = u.alpha_table();
    let zr = z.powu(u.vi().r() as u64);
    // weights[n] = z^{rn} / alpha_{rn}
    let mut weights = Vec::with_capacity(n_max + 1);
    let mut w = S::one();
    for n in 0..=n_max {
        if n > 0 {
            w = w * zr.clone() / S::from_rational(table.ratio(n));
        }
        weights.push(w.clone());
    }
    let coeffs = (0..=n_max)
        .map(|m| {
            (0..=n_max - m).fold(S::zero(), |acc, n| {
                acc + weights[n].clone() * u.coeffs()[m + n].clone()
            })
        })
        .collect();
    Translated {
        series: REvenSeries::new(u.vi().clone(), coeffs),
        dropped_terms: dropped_pairs(n_max),
    }
}

/// `(z (+)_gamma w)^{rn} = sum_k binom_gamma(n, k) w^{rk} z^{r(n-k)}`.
pub fn addition_power<S: Scalar>(vi: &VectorIndex, n: usize, z: &S, w: &S) -> S {
    let table = vi.alpha_table(n);
    let r = vi.r() as u64;
    let zr = z.powu(r);
    let wr = w.powu(r);
    (0..=n).fold(S::zero(), |acc, k| {
        acc + (wr.powu(k as u64) * zr.powu((n - k) as u64)).scale_rational(&table.binomial(n, k))
    })
}

/// Same quantity as [`addition_power`], through the terminating
/// hypergeometric sum
/// `z^{rn} sum_k (-n)_k prod_i (-(n+gamma_i))_k / (k! prod_i (gamma_i+1)_k) (-w/z)^{rk}`.
pub fn addition_power_hypergeometric<S: Scalar>(
    vi: &VectorIndex,
    n: usize,
    z: &S,
    w: &S,
) -> Result<S> {
    if z.is_zero() {
        return Err(HbError::Argument(
            "hypergeometric form needs z != 0; use addition_power".into(),
        ));
    }
    let r = vi.r() as u64;
    let arg = (-(w.clone() / z.clone())).powu(r);
    let nn = BigRational::from_integer(n.into());
    let mut coeff = BigRational::one();
    let mut total = S::zero();
    let mut power = S::one();
    for k in 0..=n {
        if k > 0 {
            // Ratio of consecutive terms of the hypergeometric series.
            let km1 = BigRational::from_integer((k - 1).into());
            let kk = BigRational::from_integer(k.into());
            let mut num = -&nn + &km1;
            let mut den = kk;
            for g in vi.gamma() {
                num *= -(&nn + g) + &km1;
                den *= g + BigRational::one() + &km1;
            }
            coeff = coeff * num / den;
            power = power * arg.clone();
        }
        if !coeff.is_zero() {
            total = total + power.scale_rational(&coeff);
        }
    }
    Ok(total * z.powu(r * n as u64))
}

/// `T_z u(w) = u(z (+)_gamma w)`, expanded by generalized binomials and
/// collected in powers of `w`.
pub fn translate_addition<S: Scalar>(u: &REvenSeries<S>, z: &S) -> Translated<S> {
    let n_max = u.truncation();
    let table = u.alpha_table();
    let zr = z.powu(u.vi().r() as u64);
    let raw = u.raw_coeffs();
    let zpow: Vec<S> = (0..=n_max).map(|k| zr.powu(k as u64)).collect();
    // raw coefficient of w^{rj}: sum_{k>=j} c_k binom(k, j) z^{r(k-j)}
    let coeffs = (0..=n_max)
        .map(|j| {
            let raw_j = (j..=n_max).fold(S::zero(), |acc, k| {
                if raw[k].is_zero() {
                    acc
                } else {
                    acc + (raw[k].clone() * zpow[k - j].clone())
                        .scale_rational(&table.binomial(k, j))
                }
            });
            raw_j.scale_rational(table.alpha(j))
        })
        .collect();
    Translated {
        series: REvenSeries::new(u.vi().clone(), coeffs),
        dropped_terms: dropped_pairs(n_max),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Convolved<S> {
    pub series: REvenSeries<S>,
    /// Bound on contributions of moments that are not stored, from the
    /// functional's growth certificate. Zero when every needed moment is stored.
    pub missing_moment_bound: f64,
}

/// `(T * u)(z) = <T, T_z u>`. In normalized coefficients
/// `(T * u)_n = <T, B_r^n u> = sum_m t_m u_{n+m} / alpha_{rm}`.
pub fn convolve<S: Scalar>(t: &MomentFunctional<S>, u: &REvenSeries<S>) -> Result<Convolved<S>> {
    if t.vi() != u.vi() {
        return Err(HbError::IndexMismatch);
    }
    let n_max = u.truncation();
    let stored = t.moments().len();
    let table = u.alpha_table();
    let mut missing_moment_bound = 0.0;
    if stored <= n_max {
        let cert = t.certificate().ok_or(HbError::IncompletePairing {
            needed: n_max,
            available: stored - 1,
        })?;
        // Worst case over output indices is n = 0, which touches every u_m.
        missing_moment_bound = (stored..=n_max)
            .map(|m| {
                u.coeffs()[m].abs_f64()
                    * cert.c
                    * (cert.a.powi(u.vi().r() as i32)).powi(m as i32)
                    * table.inv_alpha_f64(m)
            })
            .sum();
        if !missing_moment_bound.is_finite() {
            return Err(HbError::PairingDivergence { radius: cert.a });
        }
    }
    let weights: Vec<S> = (0..=n_max.min(stored - 1))
        .map(|m| t.moments()[m].clone() / S::from_rational(table.alpha(m)))
        .collect();
    let coeffs = (0..=n_max)
        .map(|n| {
            weights
                .iter()
                .enumerate()
                .take(n_max - n + 1)
                .fold(S::zero(), |acc, (m, w)| acc + w.clone() * u.coeffs()[n + m].clone())
        })
        .collect();
    Ok(Convolved {
        series: REvenSeries::new(u.vi().clone(), coeffs),
        missing_moment_bound,
    })
}

/// Moments of `T * S`: `(T*S)_n = sum_k binom_gamma(n, k) s_k t_{n-k}`.
///
/// The attached certificate `(C_T C_S, a_T + a_S)` is a heuristic
/// composition; it is re-validated on the stored range and `C` is enlarged
/// there if needed.
pub fn moment_convolution<S: Scalar>(
    t: &MomentFunctional<S>,
    s: &MomentFunctional<S>,
) -> Result<MomentFunctional<S>> {
    if t.vi() != s.vi() {
        return Err(HbError::IndexMismatch);
    }
    let len = t.moments().len().min(s.moments().len());
    let table = t.vi().alpha_table(len - 1);
    let moments: Vec<S> = (0..len)
        .map(|n| {
            (0..=n).fold(S::zero(), |acc, k| {
                let (sk, tk) = (&s.moments()[k], &t.moments()[n - k]);
                if sk.is_zero() || tk.is_zero() {
                    acc
                } else {
                    acc + (sk.clone() * tk.clone()).scale_rational(&table.binomial(n, k))
                }
            })
        })
        .collect();
    let certificate = match (t.certificate(), s.certificate()) {
        (Some(p), Some(q)) => {
            let mut cert = ExpTypeCertificate {
                c: p.c * q.c,
                a: p.a + q.a,
                source: CertificateSource::Heuristic,
            };
            let r = t.vi().r();
            for (n, m) in moments.iter().enumerate() {
                while !cert.holds(m, r, n) {
                    cert.c *= 2.0;
                }
            }
            Some(cert)
        }
        _ => None,
    };
    MomentFunctional::new(t.vi().clone(), moments, certificate)
}
