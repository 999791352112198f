//! Exact roots-of-unity computations.
//!
//! For a fixed modulus `q`, the indicator of `d ≡ x (mod q)` is
//! `q^{-1} sum_{ζ in μ_q} ζ^{d-x}`. Averaging over `G(m, 1/2)` turns the
//! probability that every degree is `x (mod q)` into a finite sum over root
//! assignments, each pair of vertices contributing `(1 + ζ_u ζ_v) / 2`.
//! Assignments are grouped by how many vertices receive each root, and the
//! sum is evaluated exactly in `Z[t]/(t^q - 1)` before being reduced modulo
//! the cyclotomic polynomial `Φ_q` to recover a rational number.

use std::collections::HashMap;
use std::ops::{Add, Mul};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::PartitionSpec;

/// Largest `n` accepted by [`expected_count`].
pub const MAX_MOMENT_N: usize = 200;

/// Largest number of root-assignment types `C(n+q-1, q-1)` per probability.
pub const MAX_ROOT_TYPES: u64 = 250_000;

/// An element of `R[t]/(t^q - 1)`, with `t` standing for a primitive
/// `q`-th root of unity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycloValue<T> {
    coeffs: Vec<T>,
}

pub type CycloRational = CycloValue<BigRational>;

impl<T> CycloValue<T>
where
    T: Clone + Zero + One + Add<Output = T> + Mul<Output = T> + std::ops::Sub<Output = T>,
{
    pub fn zero(q: usize) -> Self {
        assert!(q >= 1);
        CycloValue { coeffs: vec![T::zero(); q] }
    }

    pub fn constant(q: usize, c: T) -> Self {
        let mut v = CycloValue::zero(q);
        v.coeffs[0] = c;
        v
    }

    pub fn one(q: usize) -> Self {
        CycloValue::constant(q, T::one())
    }

    /// `c * t^e`, exponent taken modulo `q`.
    pub fn monomial(q: usize, e: i64, c: T) -> Self {
        let mut v = CycloValue::zero(q);
        v.coeffs[e.rem_euclid(q as i64) as usize] = c;
        v
    }

    pub fn from_coeffs(coeffs: Vec<T>) -> Self {
        assert!(!coeffs.is_empty());
        CycloValue { coeffs }
    }

    pub fn q(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.q(), other.q());
        CycloValue { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.clone() + b.clone()).collect() }
    }

    pub fn add_assign(&mut self, other: &Self) {
        assert_eq!(self.q(), other.q());
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a = a.clone() + b.clone();
        }
    }

    /// Cyclic convolution.
    pub fn mul(&self, other: &Self) -> Self {
        let q = self.q();
        assert_eq!(q, other.q());
        let mut out = vec![T::zero(); q];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    let k = (i + j) % q;
                    out[k] = out[k].clone() + a.clone() * b.clone();
                }
            }
        }
        CycloValue { coeffs: out }
    }

    pub fn scale(&self, c: &T) -> Self {
        CycloValue { coeffs: self.coeffs.iter().map(|a| a.clone() * c.clone()).collect() }
    }

    /// Multiplication by `t^e`.
    pub fn shift(&self, e: i64) -> Self {
        let q = self.q();
        let s = e.rem_euclid(q as i64) as usize;
        let mut out = vec![T::zero(); q];
        for (i, a) in self.coeffs.iter().enumerate() {
            out[(i + s) % q] = a.clone();
        }
        CycloValue { coeffs: out }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = CycloValue::one(self.q());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Remainder modulo `Φ_q`, of length `φ(q)`.
    pub fn reduce(&self) -> Vec<T> {
        let phi: Vec<T> = cyclotomic_polynomial(self.q()).into_iter().map(|c| from_bigint::<T>(&c)).collect();
        let deg = phi.len() - 1;
        let mut r = self.coeffs.clone();
        // Φ_q is monic, so long division needs no inverses.
        for top in (deg..r.len()).rev() {
            let lead = r[top].clone();
            if lead.is_zero() {
                continue;
            }
            for (i, c) in phi.iter().enumerate() {
                let idx = top - deg + i;
                r[idx] = r[idx].clone() - lead.clone() * c.clone();
            }
        }
        r.truncate(deg);
        r
    }

    /// The rational value when the reduced remainder is a constant.
    pub fn to_rational(&self, context: &str) -> Result<T> {
        let r = self.reduce();
        if let Some(d) = r.iter().rposition(|c| !c.is_zero()).filter(|&d| d > 0) {
            return Err(Error::NonRational { degree: d, context: context.to_string() });
        }
        Ok(r.into_iter().next().unwrap_or_else(T::zero))
    }
}

fn from_bigint<T: Zero + One + Add<Output = T> + std::ops::Sub<Output = T> + Clone>(c: &BigInt) -> T {
    // Cyclotomic coefficients are small; build them by repeated addition.
    let mag: u64 = c.magnitude().try_into().expect("small cyclotomic coefficient");
    let mut acc = T::zero();
    for _ in 0..mag {
        acc = acc + T::one();
    }
    if c.is_negative() {
        T::zero() - acc
    } else {
        acc
    }
}

/// Integer coefficients of `Φ_q`, constant term first.
pub fn cyclotomic_polynomial(q: usize) -> Vec<BigInt> {
    assert!(q >= 1);
    // t^q - 1 divided by Φ_d for every proper divisor d.
    let mut num: Vec<BigInt> = vec![BigInt::zero(); q + 1];
    num[0] = -BigInt::one();
    num[q] = BigInt::one();
    for d in 1..q {
        if q.is_multiple_of(d) {
            num = divide_monic(&num, &cyclotomic_polynomial(d));
        }
    }
    num
}

fn divide_monic(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let dd = den.len() - 1;
    let mut r = num.to_vec();
    let mut quot = vec![BigInt::zero(); num.len() - dd];
    for top in (dd..r.len()).rev() {
        let lead = r[top].clone();
        quot[top - dd] = lead.clone();
        for (i, c) in den.iter().enumerate() {
            r[top - dd + i] -= &lead * c;
        }
    }
    debug_assert!(r.iter().all(Zero::is_zero), "inexact cyclotomic division");
    quot
}

fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |a, i| a * i)
}

/// Evaluates degree-residue probabilities for one modulus, caching powers
/// of `1 + t^s` across calls.
pub struct DegreeResidueCalculator {
    q: usize,
    powers: HashMap<(usize, u64), CycloValue<BigInt>>,
}

impl DegreeResidueCalculator {
    pub fn new(q: u32) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidArgument(format!("modulus {q} < 2")));
        }
        Ok(DegreeResidueCalculator { q: q as usize, powers: HashMap::new() })
    }

    fn binomial_power(&mut self, s: usize, e: u64) -> CycloValue<BigInt> {
        let q = self.q;
        if let Some(v) = self.powers.get(&(s, e)) {
            return v.clone();
        }
        let v = if e == 0 {
            CycloValue::one(q)
        } else if e == 1 {
            CycloValue::one(q).add(&CycloValue::monomial(q, s as i64, BigInt::one()))
        } else {
            let half = self.binomial_power(s, e / 2);
            let sq = half.mul(&half);
            if e % 2 == 1 {
                sq.mul(&self.binomial_power(s, 1))
            } else {
                sq
            }
        };
        self.powers.insert((s, e), v.clone());
        v
    }

    /// `Pr[every degree of G(m, 1/2) is ≡ x (mod q)]`, exactly.
    ///
    /// Sums over the counts `n_0..n_{q-1}` of vertices assigned each root
    /// `t^j`: `multinomial(m; n) * t^{-x sum j n_j} * prod (1 + t^{j+l})^{pairs}`,
    /// then divides by `q^m 2^{C(m,2)}`. An empty graph (`m = 0`) gives 1.
    pub fn probability(&mut self, m: usize, x: u32) -> Result<BigRational> {
        let q = self.q;
        if x as usize >= q {
            return Err(Error::InvalidArgument(format!("residue {x} is not below q = {q}")));
        }
        if m == 0 {
            return Ok(BigRational::one());
        }
        let types = binomial((m + q - 1) as u64, (q - 1) as u64);
        if types > BigUint::from(MAX_ROOT_TYPES) {
            return Err(Error::ScaleGuard(format!(
                "C(m+q-1, q-1) = {types} root-assignment types exceeds {MAX_ROOT_TYPES} (m = {m}, q = {q})"
            )));
        }
        let m_fact = factorial(m as u64);
        let mut total = CycloValue::<BigInt>::zero(q);
        let mut counts = vec![0usize; q];
        let mut fact_cache: Vec<BigUint> = vec![BigUint::one()];
        for i in 1..=m as u64 {
            let next = fact_cache.last().expect("non-empty") * i;
            fact_cache.push(next);
        }
        self.for_each_composition(&mut counts, 0, m, &mut |calc, counts| {
            // Pair exponents grouped by t^{j+l}.
            let mut exps = vec![0u64; q];
            for j in 0..q {
                let nj = counts[j] as u64;
                if nj >= 2 {
                    exps[(2 * j) % q] += nj * (nj - 1) / 2;
                }
                for l in j + 1..q {
                    exps[(j + l) % q] += nj * counts[l] as u64;
                }
            }
            let den = counts.iter().fold(BigUint::one(), |a, &c| a * &fact_cache[c]);
            let multinomial = BigInt::from(&m_fact / den);
            let root_sum: i64 = counts.iter().enumerate().map(|(j, &c)| (j * c) as i64).sum();
            let mut term = CycloValue::monomial(q, -(x as i64) * root_sum, multinomial);
            for (s, &e) in exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if s == 0 {
                    // 1 + t^0 = 2.
                    term = term.scale(&(BigInt::one() << e));
                } else {
                    term = term.mul(&calc.binomial_power(s, e));
                }
            }
            total.add_assign(&term);
        });
        let pairs = (m * (m - 1) / 2) as u32;
        let value = total.to_rational(&format!("Pr[degrees ≡ {x} mod {q}] at m = {m}"))?;
        let scale = BigInt::from(q).pow(m as u32) << pairs;
        Ok(BigRational::new(value, scale))
    }

    fn for_each_composition(
        &mut self,
        counts: &mut Vec<usize>,
        idx: usize,
        left: usize,
        f: &mut impl FnMut(&mut Self, &[usize]),
    ) {
        if idx == counts.len() - 1 {
            counts[idx] = left;
            f(self, counts);
            return;
        }
        for c in 0..=left {
            counts[idx] = c;
            self.for_each_composition(counts, idx + 1, left - c, f);
        }
    }
}

/// `Pr[every degree of G(m, 1/2) is ≡ x (mod q)]`.
pub fn prob_all_degrees_congruent(m: usize, q: u32, x: u32) -> Result<BigRational> {
    DegreeResidueCalculator::new(q)?.probability(m, x)
}

/// Exact `E[X_n]` for `G(n, 1/2)` under `spec`, counting canonical
/// partitions (interchangeable parts unordered, empty parts collapsed).
///
/// Parts of different partitions' classes have disjoint edge sets, so a
/// partition is good with probability `prod_i p(|A_i|, q, x_i)`. Summing over
/// `k_x <= a_x` non-empty parts per residue is the truncated exponential
/// formula `n! [z^n] prod_x sum_{k <= a_x} F_x(z)^k / k!` with
/// `F_x(z) = sum_{s >= 1} p(s, q, x) z^s / s!`.
pub fn expected_count(n: usize, spec: &PartitionSpec) -> Result<BigRational> {
    if n == 0 || n > MAX_MOMENT_N {
        return Err(Error::ScaleGuard(format!("expected_count needs 1 <= n <= {MAX_MOMENT_N}, got n = {n}")));
    }
    let q = spec.q();
    let mut calc = DegreeResidueCalculator::new(q)?;
    let fact: Vec<BigRational> = (0..=n as u64).map(|i| BigRational::from_integer(factorial(i).into())).collect();

    let mut total: Vec<BigRational> = unit_series(n);
    for (x, &a) in spec.multiplicities().iter().enumerate() {
        if a == 0 {
            continue;
        }
        let mut f = vec![BigRational::zero(); n + 1];
        for s in 1..=n {
            f[s] = calc.probability(s, x as u32)? / &fact[s];
        }
        // sum_{k=0}^{a} f^k / k!
        let mut class = unit_series(n);
        let mut power = unit_series(n);
        for k in 1..=a as u64 {
            power = series_mul(&power, &f, n);
            let kf = BigRational::from_integer(factorial(k).into());
            for (c, p) in class.iter_mut().zip(&power) {
                *c += p / &kf;
            }
        }
        total = series_mul(&total, &class, n);
    }
    Ok(&total[n] * &fact[n])
}

fn unit_series(n: usize) -> Vec<BigRational> {
    let mut s = vec![BigRational::zero(); n + 1];
    s[0] = BigRational::one();
    s
}

fn series_mul(a: &[BigRational], b: &[BigRational], n: usize) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); n + 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(n + 1 - i) {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

/// Ordered partitions of `[n]` into `q` labelled, possibly empty parts whose
/// first `q - c` parts have even size:
/// `2^{-(q-c)} sum_i C(q-c, i) (q - 2i)^n`.
pub fn ordered_partition_count(n: usize, q: u32, c: u32) -> Result<BigUint> {
    if c > q {
        return Err(Error::InvalidArgument(format!("c = {c} exceeds q = {q}")));
    }
    let constrained = q - c;
    let mut sum = BigInt::zero();
    for i in 0..=constrained {
        let base = BigInt::from(q as i64 - 2 * i as i64);
        sum += BigInt::from(binomial(constrained as u64, i as u64)) * base.pow(n as u32);
    }
    let den = BigInt::one() << constrained;
    let (quot, rem) = sum.div_rem(&den);
    assert!(rem.is_zero() && !quot.is_negative(), "ordered partition count must be a non-negative integer");
    Ok(quot.to_biguint().expect("non-negative"))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConflictBoundRow {
    pub q: u32,
    /// `|(1 + ζ_q) / 2| = cos(π/q)`.
    pub modulus: f64,
    pub bound: f64,
    pub slack: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConflictBoundReport {
    pub rows: Vec<ConflictBoundRow>,
    pub all_hold: bool,
    pub min_slack: f64,
    pub max_slack: f64,
}

/// Checks `|(1 + ζ_q)/2| = cos(π/q) <= exp(-1/q²)` for `q = 3..=q_max`.
pub fn conflict_bound_check(q_max: u32) -> Result<ConflictBoundReport> {
    if q_max < 3 {
        return Err(Error::InvalidArgument(format!("q_max = {q_max} must be at least 3")));
    }
    let rows: Vec<ConflictBoundRow> = (3..=q_max)
        .map(|q| {
            let theta = 2.0 * std::f64::consts::PI / q as f64;
            let modulus = 0.5 * ((1.0 + theta.cos()).powi(2) + theta.sin().powi(2)).sqrt();
            let bound = (-1.0 / (q as f64 * q as f64)).exp();
            ConflictBoundRow { q, modulus, bound, slack: bound - modulus, holds: modulus <= bound }
        })
        .collect();
    let slacks = rows.iter().map(|r| r.slack);
    Ok(ConflictBoundReport {
        all_hold: rows.iter().all(|r| r.holds),
        min_slack: slacks.clone().fold(f64::INFINITY, f64::min),
        max_slack: slacks.fold(f64::NEG_INFINITY, f64::max),
        rows,
    })
}
