//! Combinatorial constants of the calculus: the normalisation constants
//! `alpha_{rn}(gamma)`, the coefficient form of `B_r`, the constant `M`,
//! and generalized binomials.
//!
//! Everything here is exact rational arithmetic.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{HbError, Result};
use crate::scalar::{format_rational, parse_rational, rational};

/// The pair `(r, gamma)` that parametrizes `B_r`.
///
/// `gamma` has `r - 1` rational entries with `gamma_k >= -1 + k/r`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VectorIndex {
    r: usize,
    gamma: Vec<BigRational>,
}

impl VectorIndex {
    pub fn new(r: usize, gamma: Vec<BigRational>) -> Result<Self> {
        if r < 2 {
            return Err(HbError::InvalidIndex(format!("order r = {r} must be >= 2")));
        }
        if gamma.len() != r - 1 {
            return Err(HbError::InvalidIndex(format!(
                "expected {} gamma components for r = {r}, got {}",
                r - 1,
                gamma.len()
            )));
        }
        for (i, g) in gamma.iter().enumerate() {
            let k = i + 1;
            let floor = rational(k as i64, r as i64) - BigRational::one();
            if *g < floor {
                return Err(HbError::InvalidIndex(format!(
                    "gamma_{k} = {} is below -1 + {k}/{r}",
                    format_rational(g)
                )));
            }
        }
        Ok(Self { r, gamma })
    }

    /// Builds an index from rational literals such as `"-1/2"`.
    pub fn parse<S: AsRef<str>>(r: usize, gamma: &[S]) -> Result<Self> {
        let gamma = gamma
            .iter()
            .map(|s| parse_rational(s.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(r, gamma)
    }

    /// `gamma_k = -1 + k/r`, for which `B_r = d^r/dz^r`.
    pub fn derivative(r: usize) -> Result<Self> {
        let gamma = (1..r)
            .map(|k| rational(k as i64, r as i64) - BigRational::one())
            .collect();
        Self::new(r, gamma)
    }

    /// Classical second-order Bessel index `(nu)`.
    pub fn bessel(nu: BigRational) -> Result<Self> {
        Self::new(2, vec![nu])
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn gamma(&self) -> &[BigRational] {
        &self.gamma
    }

    /// `w = e^{2 i pi / r}`.
    pub fn root_of_unity(&self) -> Complex64 {
        Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / self.r as f64)
    }

    /// `alpha_{rn}(gamma) = r^{rn} n! prod_i prod_{j=1..n} (gamma_i + j)`.
    pub fn alpha(&self, n: usize) -> BigRational {
        (1..=n).fold(BigRational::one(), |acc, k| acc * self.alpha_ratio(k))
    }

    /// `alpha_{rn} / alpha_{r(n-1)} = r^r n prod_i (gamma_i + n)` for `n >= 1`.
    pub fn alpha_ratio(&self, n: usize) -> BigRational {
        assert!(n >= 1, "alpha_ratio is defined for n >= 1");
        let nn = BigRational::from_integer(BigInt::from(n));
        let rr = BigRational::from_integer(num_traits::pow(BigInt::from(self.r), self.r));
        self.gamma
            .iter()
            .fold(rr * nn.clone(), |acc, g| acc * (g + &nn))
    }

    pub fn alpha_table(&self, n_max: usize) -> AlphaTable {
        AlphaTable::new(self, n_max)
    }

    /// `alpha_{rn} / (alpha_{rk} alpha_{r(n-k)})`.
    pub fn generalized_binomial(&self, n: usize, k: usize) -> Result<BigRational> {
        if k > n {
            return Err(HbError::Argument(format!(
                "generalized binomial needs 0 <= k <= n, got n = {n}, k = {k}"
            )));
        }
        Ok(self.alpha(n) / (self.alpha(k) * self.alpha(n - k)))
    }

    pub fn br_coefficients(&self) -> BrCoefficients {
        BrCoefficients::derive(self)
    }

    /// `m prod_i (m + r gamma_i)`: the eigenvalue of `z^{1-r} prod(zD + r gamma_i + 1) D`
    /// on `z^m`, as a multiplier of `z^{m-r}`.
    pub fn monomial_symbol(&self, m: i64) -> BigRational {
        let mm = BigRational::from_integer(BigInt::from(m));
        let r = BigRational::from_integer(BigInt::from(self.r));
        self.gamma
            .iter()
            .fold(mm.clone(), |acc, g| acc * (&mm + &r * g))
    }
}

impl fmt::Display for VectorIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.gamma.iter().map(format_rational).collect();
        write!(f, "r={} gamma=({})", self.r, parts.join(", "))
    }
}

/// `alpha_{r0} .. alpha_{rN}` together with float views used by the
/// floating-point paths.
#[derive(Clone, Debug)]
pub struct AlphaTable {
    values: Vec<BigRational>,
    ratios: Vec<BigRational>,
    ratios_f64: Vec<f64>,
    inv_f64: Vec<f64>,
}

impl AlphaTable {
    pub fn new(vi: &VectorIndex, n_max: usize) -> Self {
        let mut values = Vec::with_capacity(n_max + 1);
        let mut ratios = Vec::with_capacity(n_max + 1);
        values.push(BigRational::one());
        // ratios[0] is unused; keep indices aligned with n.
        ratios.push(BigRational::one());
        for n in 1..=n_max {
            let q = vi.alpha_ratio(n);
            values.push(&values[n - 1] * &q);
            ratios.push(q);
        }
        let ratios_f64 = ratios.iter().map(|q| q.to_f64().unwrap_or(f64::INFINITY)).collect();
        let inv_f64 = values
            .iter()
            .map(|a| a.recip().to_f64().unwrap_or(0.0))
            .collect();
        Self {
            values,
            ratios,
            ratios_f64,
            inv_f64,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn alpha(&self, n: usize) -> &BigRational {
        &self.values[n]
    }

    pub fn values(&self) -> &[BigRational] {
        &self.values
    }

    /// `alpha_{rn}/alpha_{r(n-1)}`; `n >= 1`.
    pub fn ratio(&self, n: usize) -> &BigRational {
        &self.ratios[n]
    }

    pub fn ratio_f64(&self, n: usize) -> f64 {
        self.ratios_f64[n]
    }

    /// `1/alpha_{rn}` rounded to a float (underflows to zero).
    pub fn inv_alpha_f64(&self, n: usize) -> f64 {
        self.inv_f64[n]
    }

    pub fn binomial(&self, n: usize, k: usize) -> BigRational {
        &self.values[n] / (&self.values[k] * &self.values[n - k])
    }

    /// Replaces one stored value. Only the identity suite uses this, to
    /// check that corrupted constants are detected.
    pub fn corrupt(&mut self, n: usize, value: BigRational) {
        self.values[n] = value;
    }
}

/// Per-coefficient comparison of the system-derived `a_k` against the
/// closed binomial-sum formula, read with both binomial orientations.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosedFormCheck {
    pub k: usize,
    /// `binom(j-1, k'-1)` as written (vanishes for `j < k'`).
    pub literal: BigRational,
    /// `binom(k'-1, j-1)`, the finite-difference orientation.
    pub transposed: BigRational,
    pub literal_agrees: bool,
    pub transposed_agrees: bool,
}

/// Coefficient form `B_r = D^r + sum_k a_k z^{-k} D^{r-k}`.
#[derive(Clone, Debug, PartialEq)]
pub struct BrCoefficients {
    pub r: usize,
    /// `a_0 = 1, a_1, .., a_{r-1}`.
    pub a: Vec<BigRational>,
    /// `M = 1 + sum_k |a_k| / k!`.
    pub m: BigRational,
    pub closed_form: Vec<ClosedFormCheck>,
}

impl BrCoefficients {
    /// Solves `m prod_i (m + r gamma_i) = sum_k a_k (m)_{r-k}` at `m = 1..r-1`
    /// with `a_0 = 1`. In the falling-factorial basis the system is
    /// triangular: at sample `m` only `a_k` with `r - k <= m` survive.
    pub fn derive(vi: &VectorIndex) -> Self {
        let r = vi.r();
        let mut a = vec![BigRational::zero(); r];
        a[0] = BigRational::one();
        // Sample m determines a_{r-m}.
        for m in 1..r {
            let target = vi.monomial_symbol(m as i64);
            let known = ((r - m + 1)..r).fold(BigRational::zero(), |acc, k| {
                acc + &a[k] * falling_factorial(m as i64, r - k)
            });
            let lead = falling_factorial(m as i64, m);
            assert!(!lead.is_zero(), "falling-factorial system is triangular");
            a[r - m] = (target - known) / lead;
        }
        let m_const = (1..r).fold(BigRational::one(), |acc, k| {
            acc + a[k].abs() / factorial(k)
        });
        let closed_form = (1..r)
            .map(|kk| {
                let literal = closed_form_coefficient(vi, kk, false);
                let transposed = closed_form_coefficient(vi, kk, true);
                let derived = &a[r - kk];
                ClosedFormCheck {
                    k: r - kk,
                    literal_agrees: &literal == derived,
                    transposed_agrees: &transposed == derived,
                    literal,
                    transposed,
                }
            })
            .collect();
        Self {
            r,
            a,
            m: m_const,
            closed_form,
        }
    }

    /// `sum_k a_k (m)_{r-k}` for integer `m`.
    pub fn falling_form(&self, m: i64) -> BigRational {
        self.a
            .iter()
            .enumerate()
            .fold(BigRational::zero(), |acc, (k, ak)| {
                acc + ak * falling_factorial(m, self.r - k)
            })
    }

    pub fn m_f64(&self) -> f64 {
        self.m.to_f64().unwrap_or(f64::INFINITY)
    }
}

/// `a_{r-k} = 1/(k-1)! sum_{j=1..k} (-1)^{k-j} binom(.) prod_i (r gamma_i + j)`.
fn closed_form_coefficient(vi: &VectorIndex, k: usize, transposed: bool) -> BigRational {
    let r = BigRational::from_integer(BigInt::from(vi.r()));
    let mut sum = BigRational::zero();
    for j in 1..=k {
        let b = if transposed {
            binomial(k - 1, j - 1)
        } else {
            binomial(j - 1, k - 1)
        };
        if b.is_zero() {
            continue;
        }
        let jj = BigRational::from_integer(BigInt::from(j));
        let prod = vi
            .gamma()
            .iter()
            .fold(BigRational::one(), |acc, g| acc * (&r * g + &jj));
        let sign = if (k - j).is_multiple_of(2) {
            BigRational::one()
        } else {
            -BigRational::one()
        };
        sum += sign * BigRational::from_integer(b) * prod;
    }
    sum / factorial(k - 1)
}

/// `(m)_j = m (m-1) .. (m-j+1)`.
pub fn falling_factorial(m: i64, j: usize) -> BigRational {
    (0..j as i64).fold(BigRational::one(), |acc, i| {
        acc * BigRational::from_integer(BigInt::from(m - i))
    })
}

pub fn factorial(n: usize) -> BigRational {
    BigRational::from_integer((1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k)))
}

fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: the defining product, evaluated term by term.
    fn alpha_oracle(vi: &VectorIndex, n: usize) -> BigRational {
        let r = vi.r();
        let mut acc = BigRational::from_integer(num_traits::pow(BigInt::from(r), r * n));
        acc *= factorial(n);
        for g in vi.gamma() {
            for j in 1..=n {
                acc *= g + BigRational::from_integer(BigInt::from(j));
            }
        }
        acc
    }

    #[test]
    fn rejects_bad_indices() {
        assert!(VectorIndex::parse(1, &[] as &[&str]).is_err());
        assert!(VectorIndex::parse(2, &["-1/2", "0"]).is_err());
        assert!(VectorIndex::parse(2, &["-3/4"]).is_err());
        assert!(VectorIndex::parse(3, &["-2/3", "-1/2"]).is_err());
        // Equality with the floor is allowed.
        assert!(VectorIndex::parse(3, &["-2/3", "-1/3"]).is_ok());
    }

    #[test]
    fn alpha_examples() {
        let vi = VectorIndex::parse(2, &["1/2"]).unwrap();
        assert_eq!(vi.alpha(0), BigRational::one());
        assert_eq!(vi.alpha(1), rational(6, 1));
        let vi3 = VectorIndex::parse(3, &["-2/3", "-1/3"]).unwrap();
        assert_eq!(vi3.alpha(2), rational(720, 1));
    }

    #[test]
    fn alpha_matches_product_oracle() {
        for vi in [
            VectorIndex::parse(2, &["1/2"]).unwrap(),
            VectorIndex::parse(3, &["-2/3", "5/7"]).unwrap(),
            VectorIndex::parse(4, &["0", "-1/2", "3"]).unwrap(),
        ] {
            for n in 0..=30 {
                assert_eq!(vi.alpha(n), alpha_oracle(&vi, n), "{vi} n={n}");
            }
        }
    }

    #[test]
    fn alpha_ratio_examples() {
        let vi = VectorIndex::parse(2, &["-1/2"]).unwrap();
        assert_eq!(vi.alpha_ratio(1), rational(2, 1));
        let vi = VectorIndex::parse(2, &["1/2"]).unwrap();
        assert_eq!(vi.alpha_ratio(2), rational(20, 1));
        let vi = VectorIndex::parse(3, &["1/5", "2"]).unwrap();
        assert_eq!(vi.alpha_ratio(1), rational(27, 1) * rational(6, 5) * rational(3, 1));
    }

    #[test]
    fn br_coefficient_examples() {
        let nu = rational(7, 3);
        let vi = VectorIndex::bessel(nu.clone()).unwrap();
        let b = vi.br_coefficients();
        assert_eq!(b.a[1], rational(2, 1) * &nu + BigRational::one());

        let vi = VectorIndex::new(3, vec![rational(-2, 3), nu.clone() - rational(1, 3)]).unwrap();
        let b = vi.br_coefficients();
        assert_eq!(b.a[1], rational(3, 1) * &nu);
        assert_eq!(b.a[2], rational(-3, 1) * &nu);

        let vi = VectorIndex::derivative(3).unwrap();
        let b = vi.br_coefficients();
        assert!(b.a[1].is_zero() && b.a[2].is_zero());
        assert_eq!(b.m, BigRational::one());
    }

    #[test]
    fn falling_factorial_identity_holds_beyond_the_samples() {
        for vi in [
            VectorIndex::parse(2, &["3/5"]).unwrap(),
            VectorIndex::parse(3, &["-1/2", "4/3"]).unwrap(),
            VectorIndex::parse(5, &["0", "1/7", "-1/5", "9"]).unwrap(),
        ] {
            let b = vi.br_coefficients();
            let r = vi.r() as i64;
            for m in 0..3 * r {
                assert_eq!(b.falling_form(m), vi.monomial_symbol(m), "{vi} m={m}");
            }
            assert!(b.m >= BigRational::one());
        }
    }

    #[test]
    fn closed_form_orientations_are_recorded() {
        // r = 3 Bessel-type family: the last coefficient agrees under either
        // reading, the middle one only under the finite-difference reading.
        let vi = VectorIndex::new(3, vec![rational(-2, 3), rational(2, 3)]).unwrap();
        let b = vi.br_coefficients();
        let a2 = b.closed_form.iter().find(|c| c.k == 2).unwrap();
        assert!(a2.literal_agrees && a2.transposed_agrees);
        let a1 = b.closed_form.iter().find(|c| c.k == 1).unwrap();
        assert!(!a1.literal_agrees);
        assert!(a1.transposed_agrees);
    }

    #[test]
    fn generalized_binomial_examples() {
        let vi = VectorIndex::parse(2, &["-1/2"]).unwrap();
        assert_eq!(vi.generalized_binomial(2, 1).unwrap(), rational(6, 1));
        assert_eq!(vi.generalized_binomial(5, 0).unwrap(), BigRational::one());
        assert!(vi.generalized_binomial(2, 3).is_err());
        let vi = VectorIndex::parse(3, &["1/4", "2/3"]).unwrap();
        for n in 0..10 {
            for k in 0..=n {
                assert_eq!(
                    vi.generalized_binomial(n, k).unwrap(),
                    vi.generalized_binomial(n, n - k).unwrap()
                );
            }
        }
    }

    #[test]
    fn table_float_views_survive_huge_alphas() {
        let vi = VectorIndex::parse(4, &["0", "1", "2"]).unwrap();
        let t = vi.alpha_table(64);
        assert!(t.inv_alpha_f64(64) >= 0.0 && t.inv_alpha_f64(64) < 1e-300);
        assert!(t.ratio_f64(64).is_finite());
        assert_eq!(t.binomial(6, 2), vi.generalized_binomial(6, 2).unwrap());
    }
}
