//! Exact distributions of two-part parity partition counts in `G(n, 1/2)`.
//!
//! Every count is `2^(nullity)` or `2^(nullity - 1)` of a parity system whose
//! matrix is a uniformly random symmetric matrix with prescribed row
//! parities, so the distributions follow from symmetric rank counts over
//! GF(2).

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pmf::{ratio_to_f64, RationalPmf, TruncatedPmf};

/// Factors kept in the partial product for the limiting constant.
pub const LIMIT_CONSTANT_TERMS: u32 = 40;

fn pow2(e: u32) -> BigInt {
    BigInt::one() << e
}

fn ratio(n: BigInt, d: BigInt) -> BigRational {
    BigRational::new(n, d)
}

/// `prod_{i=1}^{m} 2^{2i} / (2^{2i} - 1)`.
fn even_factor(m: u32) -> BigRational {
    (1..=m).fold(BigRational::one(), |acc, i| acc * ratio(pow2(2 * i), pow2(2 * i) - 1))
}

/// `prod_{i=lo}^{hi} (2^i - 1)`, empty when `lo > hi`.
fn mersenne_product(lo: u32, hi: u32) -> BigInt {
    (lo..=hi).fold(BigInt::one(), |acc, i| acc * (pow2(i) - 1))
}

fn pairs(n: u32) -> u32 {
    n * n.saturating_sub(1) / 2
}

/// Number of symmetric `n × n` matrices over GF(2) of rank `r`.
pub fn symmetric_rank_count(n: u32, r: u32) -> Result<BigUint> {
    if r > n {
        return Err(Error::InvalidArgument(format!("rank {r} exceeds dimension {n}")));
    }
    let value = even_factor(r / 2) * BigRational::from_integer(mersenne_product(n - r + 1, n));
    assert!(value.is_integer(), "symmetric rank count must be an integer");
    Ok(value.to_integer().to_biguint().expect("non-negative"))
}

/// Probability that a uniform symmetric `n × n` matrix with all row sums
/// even has rank `r`. Such matrices are determined by their leading
/// `(n-1) × (n-1)` block with the same rank, so full rank never occurs.
pub fn even_symmetric_rank_prob(n: u32, r: u32) -> BigRational {
    assert!(n >= 1, "dimension must be positive");
    if r > n - 1 {
        return BigRational::zero();
    }
    even_factor(r / 2) * ratio(mersenne_product(n - r, n - 1), pow2(pairs(n)))
}

fn rank_form(n: u32, k: u32) -> BigRational {
    even_symmetric_rank_prob(n, n - 1 - k)
}

/// Distribution of the number of partitions into two parts both inducing
/// even degrees: mass at `2^k` for `k = 0..n-1`.
pub fn dist_even_even(n: u32) -> Result<RationalPmf> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    Ok(RationalPmf::from_pairs((0..n).map(|k| (BigUint::one() << k, rank_form(n, k)))))
}

/// Distribution of the number of partitions into an even-inducing and an
/// odd-inducing part. For even `n` it coincides with the case `n - 1`.
pub fn dist_even_odd(n: u32) -> Result<RationalPmf> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let m = if n.is_multiple_of(2) { n - 1 } else { n };
    dist_even_even(m)
}

/// Distribution of the number of partitions into two parts both inducing
/// odd degrees, for even `n`, including the atom at 0.
pub fn dist_odd_odd(n: u32) -> Result<RationalPmf> {
    if n == 0 || n % 2 == 1 {
        return Err(Error::InvalidArgument(format!(
            "odd/odd distribution needs a positive even n (got {n}); for odd n the count is identically 0"
        )));
    }
    let den: BigInt = pow2(n - 1) - 1;
    let mut pmf = RationalPmf::new();
    let mut total = BigRational::zero();
    for k in 0..n {
        let mass = rank_form(n, k) * ratio(pow2(n - k - 1) - 1, den.clone());
        total += &mass;
        pmf.add_mass(BigUint::one() << k, mass);
    }
    pmf.add_mass(BigUint::zero(), BigRational::one() - total);
    Ok(pmf)
}

/// Which limiting law.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LimitKind {
    /// Limit of the even/even (and even/odd) count.
    X,
    /// Limit of the odd/odd count along even `n`.
    Z,
}

impl FromStr for LimitKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "X" | "x" => Ok(LimitKind::X),
            "Z" | "z" => Ok(LimitKind::Z),
            _ => Err(Error::InvalidArgument(format!("unknown limit kind `{s}` (expected X or Z)"))),
        }
    }
}

impl fmt::Display for LimitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LimitKind::X => "X",
            LimitKind::Z => "Z",
        })
    }
}

/// `prod_{i=0}^{LIMIT_CONSTANT_TERMS} (1 - 2^{-2i-1})`, within `2^-80` of
/// the infinite product `c ≈ 0.4194`.
pub fn limit_constant() -> BigRational {
    (0..=LIMIT_CONSTANT_TERMS).fold(BigRational::one(), |acc, i| acc * ratio(pow2(2 * i + 1) - 1, pow2(2 * i + 1)))
}

/// `c / prod_{i=1}^{k} (2^i - 1)` for `k = 0..=k_max`.
fn limit_coefficients(k_max: u32) -> Vec<BigRational> {
    let c = limit_constant();
    let mut out = Vec::with_capacity(k_max as usize + 1);
    let mut a = c;
    for k in 0..=k_max {
        if k > 0 {
            a /= BigRational::from_integer(pow2(k) - 1);
        }
        out.push(a.clone());
    }
    out
}

/// Limiting law truncated to `2^0..=2^k_max`; `Z` carries the atom `1/3`
/// at 0.
pub fn limit_dist(kind: LimitKind, k_max: u32) -> TruncatedPmf {
    let mut pmf = RationalPmf::new();
    for (k, a) in limit_coefficients(k_max).into_iter().enumerate() {
        let mass = match kind {
            LimitKind::X => a,
            LimitKind::Z => a / BigRational::from_integer(pow2(k as u32)),
        };
        pmf.add_mass(BigUint::one() << k, mass);
    }
    if kind == LimitKind::Z {
        pmf.add_mass(BigUint::zero(), ratio(1.into(), 3.into()));
    }
    TruncatedPmf { pmf, tail_bound: 2.0 * 0.5f64.powi(k_max as i32) + 0.5f64.powi(80) }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratingFunctionAudit {
    pub terms: u32,
    pub f_at_one: f64,
    pub f_at_one_deviation: f64,
    pub f_at_one_tolerance: f64,
    pub f_at_half: f64,
    pub f_at_half_deviation: f64,
    pub f_at_half_tolerance: f64,
    /// Coefficients checked in `f(2x) = (1 + x) f(x)`.
    pub identity_coefficients: u32,
    pub identity_holds: bool,
    /// `prod_{i >= 0} (1 - 2^{-2i-1})`.
    pub c_product: f64,
    /// `(sum_{j >= 1} prod_{i=1}^{j} (2^i - 1)^{-1})^{-1}`, read literally.
    pub c_sum_from_one: f64,
    /// The same sum started at `j = 0`, which matches normalization.
    pub c_sum_from_zero: f64,
    pub note: String,
}

impl GeneratingFunctionAudit {
    pub fn passed(&self) -> bool {
        self.identity_holds
            && self.f_at_one_deviation <= self.f_at_one_tolerance
            && self.f_at_half_deviation <= self.f_at_half_tolerance
    }
}

/// Exact checks on `f(x) = sum_k Pr(X = 2^k) x^k` truncated to `terms`
/// coefficients.
pub fn generating_function_audit(terms: u32) -> Result<GeneratingFunctionAudit> {
    if terms < 10 {
        return Err(Error::InvalidArgument(format!("terms = {terms} must be at least 10")));
    }
    let a = limit_coefficients(terms - 1);

    // Coefficient of x^k: 2^k a_k on the left, a_k + a_{k-1} on the right.
    let identity_holds =
        (1..terms as usize).all(|k| &a[k] * BigRational::from_integer(pow2(k as u32)) == &a[k] + &a[k - 1]);

    let one = BigRational::one();
    let f1: BigRational = a.iter().sum();
    let f_half: BigRational = a.iter().enumerate().map(|(k, ak)| ak / BigRational::from_integer(pow2(k as u32))).sum();
    let two_thirds = ratio(2.into(), 3.into());

    let recip_sum = |from: u32| {
        let mut s = BigRational::zero();
        let mut term = BigRational::one();
        for j in 0..=200u32 {
            if j > 0 {
                term /= BigRational::from_integer(pow2(j) - 1);
            }
            if j >= from {
                s += &term;
            }
        }
        ratio_to_f64(&(BigRational::one() / s))
    };
    let c_sum_from_one = recip_sum(1);
    let c_sum_from_zero = recip_sum(0);
    let c_product = ratio_to_f64(&limit_constant());
    let note = format!(
        "product form c = {c_product:.12}; reciprocal sum from j=1 gives {c_sum_from_one:.12} and does not normalize \
         the limit law; from j=0 it gives {c_sum_from_zero:.12}, agreeing with the product"
    );
    Ok(GeneratingFunctionAudit {
        terms,
        f_at_one: ratio_to_f64(&f1),
        f_at_one_deviation: ratio_to_f64(&(f1 - &one).abs()),
        f_at_one_tolerance: 0.5f64.powi(terms as i32) + 0.5f64.powi(79),
        f_at_half: ratio_to_f64(&f_half),
        f_at_half_deviation: ratio_to_f64(&(f_half - two_thirds).abs()),
        f_at_half_tolerance: 1e-12,
        identity_coefficients: terms - 1,
        identity_holds,
        c_product,
        c_sum_from_one,
        c_sum_from_zero,
        note,
    })
}
