//! Probability mass functions over non-negative integer counts.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// An exact distribution with big-rational masses. Zero masses are never
/// stored, so two PMFs are equal iff they agree on every value.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RationalPmf {
    masses: BTreeMap<BigUint, BigRational>,
}

impl RationalPmf {
    pub fn new() -> Self {
        RationalPmf::default()
    }

    pub fn point_mass(value: impl Into<BigUint>) -> Self {
        let mut p = RationalPmf::new();
        p.add_mass(value.into(), BigRational::one());
        p
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (BigUint, BigRational)>) -> Self {
        let mut p = RationalPmf::new();
        for (v, m) in pairs {
            p.add_mass(v, m);
        }
        p
    }

    /// Adds `mass` to the value's current mass.
    pub fn add_mass(&mut self, value: BigUint, mass: BigRational) {
        assert!(!mass.is_negative(), "negative probability mass");
        if mass.is_zero() {
            return;
        }
        *self.masses.entry(value).or_insert_with(BigRational::zero) += mass;
    }

    pub fn mass(&self, value: &BigUint) -> BigRational {
        self.masses.get(value).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn support(&self) -> impl Iterator<Item = &BigUint> {
        self.masses.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BigUint, &BigRational)> {
        self.masses.iter()
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn total(&self) -> BigRational {
        self.masses.values().fold(BigRational::zero(), |a, m| a + m)
    }

    pub fn is_normalized(&self) -> bool {
        self.total().is_one()
    }

    pub fn mean(&self) -> BigRational {
        self.masses
            .iter()
            .fold(BigRational::zero(), |a, (v, m)| a + BigRational::from_integer(BigInt::from(v.clone())) * m)
    }

    /// Mass of values that are neither zero nor a power of two.
    pub fn mass_off_powers_of_two(&self) -> BigRational {
        self.masses
            .iter()
            .filter(|(v, _)| !v.is_zero() && v.count_ones() != 1)
            .fold(BigRational::zero(), |a, (_, m)| a + m)
    }

    pub fn to_json(&self) -> PmfJson {
        PmfJson {
            support: self.masses.keys().map(|v| v.to_string()).collect(),
            mass_num: self.masses.values().map(|m| m.numer().to_string()).collect(),
            mass_den: self.masses.values().map(|m| m.denom().to_string()).collect(),
            mass: self.masses.values().map(|m| sig15(ratio_to_f64(m))).collect(),
        }
    }
}

/// Wire form of a [`RationalPmf`]: parallel arrays of decimal strings plus a
/// 15-significant-digit decimal approximation of each mass.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PmfJson {
    pub support: Vec<String>,
    pub mass_num: Vec<String>,
    pub mass_den: Vec<String>,
    pub mass: Vec<f64>,
}

/// A PMF known only up to a rigorous bound on the mass it omits.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedPmf {
    pub pmf: RationalPmf,
    pub tail_bound: f64,
}

/// Anything that can be viewed as value -> probability.
pub trait Frequencies {
    fn frequencies(&self) -> BTreeMap<BigUint, f64>;
}

impl Frequencies for RationalPmf {
    fn frequencies(&self) -> BTreeMap<BigUint, f64> {
        self.masses.iter().map(|(v, m)| (v.clone(), ratio_to_f64(m))).collect()
    }
}

impl Frequencies for TruncatedPmf {
    fn frequencies(&self) -> BTreeMap<BigUint, f64> {
        self.pmf.frequencies()
    }
}

impl Frequencies for BTreeMap<BigUint, f64> {
    fn frequencies(&self) -> BTreeMap<BigUint, f64> {
        self.clone()
    }
}

/// Total variation distance `1/2 sum |a - b|` over the union of supports.
pub fn tv_distance(a: &impl Frequencies, b: &impl Frequencies) -> f64 {
    let fa = a.frequencies();
    let fb = b.frequencies();
    let mut sum = 0.0;
    for (v, pa) in &fa {
        sum += (pa - fb.get(v).copied().unwrap_or(0.0)).abs();
    }
    for (v, pb) in &fb {
        if !fa.contains_key(v) {
            sum += pb.abs();
        }
    }
    0.5 * sum
}

pub fn tv_distance_exact(a: &RationalPmf, b: &RationalPmf) -> BigRational {
    let mut sum = BigRational::zero();
    for v in a.support().chain(b.support().filter(|v| !a.masses.contains_key(*v))) {
        sum += (a.mass(v) - b.mass(v)).abs();
    }
    sum / BigRational::from_integer(BigInt::from(2))
}

pub fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Rounds to 15 significant decimal digits.
pub fn sig15(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.14e}").parse().unwrap_or(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn zero_masses_are_dropped() {
        let p = RationalPmf::from_pairs([(BigUint::from(1u32), q(1, 1)), (BigUint::from(2u32), q(0, 1))]);
        assert_eq!(p, RationalPmf::point_mass(1u32));
    }

    #[test]
    fn tv_examples() {
        let a = RationalPmf::point_mass(1u32);
        let b = RationalPmf::point_mass(2u32);
        assert_eq!(tv_distance(&a, &a), 0.0);
        assert_eq!(tv_distance(&a, &b), 1.0);
        assert_eq!(tv_distance_exact(&a, &b), q(1, 1));
        let c = RationalPmf::from_pairs([(BigUint::from(1u32), q(1, 2)), (BigUint::from(2u32), q(1, 2))]);
        assert_eq!(tv_distance_exact(&a, &c), q(1, 2));
    }

    #[test]
    fn mean_and_total() {
        let c = RationalPmf::from_pairs([(BigUint::from(1u32), q(1, 4)), (BigUint::from(3u32), q(3, 4))]);
        assert!(c.is_normalized());
        assert_eq!(c.mean(), q(5, 2));
    }

    #[test]
    fn sig15_rounds() {
        assert_eq!(sig15(1.0 / 3.0), 0.333333333333333);
        assert_eq!(sig15(0.0), 0.0);
    }
}
