//! Linear algebra over GF(2) with rows packed into 64-bit words.
//!
//! Two-part partitions of a graph with prescribed degree parities are the
//! solutions of an affine system `M v = b` over GF(2), where `v` is the
//! indicator of the "1" part. [`parity_system`] builds that system and
//! [`count_partitions_q2`] turns its nullity into an unordered count.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::bits::BitVec;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::{rng_from_seed, RngCore};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: Vec<BitVec>,
    cols: usize,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BitMatrix { rows: vec![BitVec::zeros(cols); rows], cols }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BitMatrix::zeros(n, n);
        for i in 0..n {
            m.rows[i].set(i, true);
        }
        m
    }

    /// The all-ones square matrix `J = 1 1^T`.
    pub fn all_ones(n: usize) -> Self {
        BitMatrix { rows: vec![BitVec::ones(n); n], cols: n }
    }

    pub fn from_rows(rows: Vec<BitVec>, cols: usize) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch { expected: cols, found: bad.len() });
        }
        Ok(BitMatrix { rows, cols })
    }

    pub fn from_bools(rows: &[Vec<bool>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        BitMatrix::from_rows(rows.iter().map(|r| BitVec::from_bools(r)).collect(), cols)
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn col_count(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.rows[r].set(c, value);
    }

    pub fn row(&self, r: usize) -> &BitVec {
        &self.rows[r]
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.rows.len();
        n == self.cols && (0..n).all(|i| (i + 1..n).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Column sums over GF(2), i.e. `1^T M`.
    pub fn column_parities(&self) -> BitVec {
        let mut acc = BitVec::zeros(self.cols);
        for r in &self.rows {
            acc.xor_assign(r);
        }
        acc
    }

    pub fn mul_vec(&self, v: &BitVec) -> Result<BitVec> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, found: v.len() });
        }
        let mut out = BitVec::zeros(self.rows.len());
        for (i, r) in self.rows.iter().enumerate() {
            if r.dot(v) {
                out.set(i, true);
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.rows.len() != other.rows.len() || self.cols != other.cols {
            return Err(Error::DimensionMismatch { expected: self.rows.len(), found: other.rows.len() });
        }
        let mut out = self.clone();
        for (a, b) in out.rows.iter_mut().zip(&other.rows) {
            a.xor_assign(b);
        }
        Ok(out)
    }

    pub fn rank(&self) -> usize {
        let mut rows = self.rows.clone();
        eliminate(&mut rows, self.cols, None).len()
    }

    pub fn solve_affine(&self, b: &BitVec) -> Result<SolutionSpace> {
        if b.len() != self.rows.len() {
            return Err(Error::DimensionMismatch { expected: self.rows.len(), found: b.len() });
        }
        let mut rows = self.rows.clone();
        let mut rhs = b.clone();
        let pivots = eliminate(&mut rows, self.cols, Some(&mut rhs));
        let rank = pivots.len();
        let consistent = (rank..rows.len()).all(|i| !rhs.get(i));

        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let kernel_basis: Vec<BitVec> = (0..self.cols)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut k = BitVec::zeros(self.cols);
                k.set(f, true);
                for (i, &pc) in pivots.iter().enumerate() {
                    if rows[i].get(f) {
                        k.set(pc, true);
                    }
                }
                k
            })
            .collect();

        let particular = consistent.then(|| {
            let mut x = BitVec::zeros(self.cols);
            for (i, &pc) in pivots.iter().enumerate() {
                if rhs.get(i) {
                    x.set(pc, true);
                }
            }
            x
        });

        Ok(SolutionSpace { particular, nullity: kernel_basis.len(), kernel_basis })
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows.len(), self.cols)?;
        for r in &self.rows {
            writeln!(f, "  {r:?}")?;
        }
        Ok(())
    }
}

/// Gauss-Jordan elimination to reduced row echelon form, in place.
///
/// Returns the pivot column of each of the first `rank` rows. When `rhs` is
/// given it receives the same row operations as `rows`.
fn eliminate(rows: &mut [BitVec], cols: usize, mut rhs: Option<&mut BitVec>) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows.len() {
            break;
        }
        let Some(p) = (rank..rows.len()).find(|&i| rows[i].get(col)) else {
            continue;
        };
        if p != rank {
            rows.swap(p, rank);
            if let Some(b) = rhs.as_deref_mut() {
                let (x, y) = (b.get(p), b.get(rank));
                b.set(p, y);
                b.set(rank, x);
            }
        }
        let (before, rest) = rows.split_at_mut(rank);
        let (pivot_row, after) = rest.split_first_mut().expect("rank < rows");
        let pivot_rhs = rhs.as_deref().is_some_and(|b| b.get(rank));
        for (i, row) in
            before.iter_mut().enumerate().chain(after.iter_mut().enumerate().map(|(i, r)| (i + rank + 1, r)))
        {
            if row.get(col) {
                row.xor_assign(pivot_row);
                if pivot_rhs {
                    if let Some(b) = rhs.as_deref_mut() {
                        b.flip(i);
                    }
                }
            }
        }
        pivots.push(col);
        rank += 1;
    }
    pivots
}

/// The solution set of `M v = b`: empty, or `particular + span(kernel_basis)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionSpace {
    pub particular: Option<BitVec>,
    pub kernel_basis: Vec<BitVec>,
    pub nullity: usize,
}

impl SolutionSpace {
    pub fn is_consistent(&self) -> bool {
        self.particular.is_some()
    }

    pub fn solution_count(&self) -> BigUint {
        if self.is_consistent() {
            BigUint::one() << self.nullity
        } else {
            BigUint::default()
        }
    }

    /// Every solution, in Gray-code order over the kernel basis.
    pub fn solutions(&self) -> Vec<BitVec> {
        let Some(p) = &self.particular else { return Vec::new() };
        assert!(self.nullity < 32, "too many solutions to list");
        let mut out = Vec::with_capacity(1 << self.nullity);
        let mut cur = p.clone();
        out.push(cur.clone());
        for i in 1u64..(1 << self.nullity) {
            cur.xor_assign(&self.kernel_basis[i.trailing_zeros() as usize]);
            out.push(cur.clone());
        }
        out
    }
}

/// Degree parities required of the two parts of a bipartition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Q2Condition {
    EvenEven,
    EvenOdd,
    OddOdd,
}

impl Q2Condition {
    pub const ALL: [Q2Condition; 3] = [Q2Condition::EvenEven, Q2Condition::EvenOdd, Q2Condition::OddOdd];

    /// Residue multiplicities `(a_0, a_1)`.
    pub fn multiplicities(self) -> [u32; 2] {
        match self {
            Q2Condition::EvenEven => [2, 0],
            Q2Condition::EvenOdd => [1, 1],
            Q2Condition::OddOdd => [0, 2],
        }
    }

    pub fn from_multiplicities(a: &[u32]) -> Option<Q2Condition> {
        Q2Condition::ALL.into_iter().find(|c| c.multiplicities() == a)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Q2Condition::EvenEven => "even-even",
            Q2Condition::EvenOdd => "even-odd",
            Q2Condition::OddOdd => "odd-odd",
        }
    }
}

impl fmt::Display for Q2Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Q2Condition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('_', "-").as_str() {
            "even-even" => Ok(Q2Condition::EvenEven),
            "even-odd" => Ok(Q2Condition::EvenOdd),
            "odd-odd" => Ok(Q2Condition::OddOdd),
            _ => Err(Error::InvalidArgument(format!(
                "unknown parity condition {s:?} (expected even-even, even-odd or odd-odd)"
            ))),
        }
    }
}

/// The system whose solutions are the ordered good bipartitions.
///
/// With `A` the adjacency matrix and `D = diag(d_i mod 2)`:
/// even/even is `(A + D) v = D 1`, even/odd (the 1-part odd) is
/// `(A + D + I) v = D 1`, and odd/odd is `(A + D) v = D 1 + 1`.
pub fn parity_system(g: &Graph, cond: Q2Condition) -> (BitMatrix, BitVec) {
    let n = g.n();
    let mut rows = g.rows().to_vec();
    let mut rhs = BitVec::zeros(n);
    for (v, row) in rows.iter_mut().enumerate() {
        let odd = row.count_ones() % 2 == 1;
        let diag = match cond {
            Q2Condition::EvenOdd => !odd,
            _ => odd,
        };
        row.set(v, diag);
        let b = match cond {
            Q2Condition::OddOdd => !odd,
            _ => odd,
        };
        rhs.set(v, b);
    }
    (BitMatrix { rows, cols: n }, rhs)
}

/// `log2` of the number of unordered good bipartitions, or `None` if there
/// are none.
///
/// For even/even and odd/odd the solutions pair up as `v <-> v + 1`, so the
/// unordered count is `2^(nullity - 1)`. For even/odd each unordered
/// partition has exactly one ordering with the odd part marked 1.
pub fn count_partitions_q2_log2(g: &Graph, cond: Q2Condition) -> Option<usize> {
    let (mut rows, mut rhs) = {
        let (m, b) = parity_system(g, cond);
        (m.rows, b)
    };
    let n = g.n();
    let rank = eliminate(&mut rows, n, Some(&mut rhs)).len();
    if (rank..n).any(|i| rhs.get(i)) {
        return None;
    }
    let nullity = n - rank;
    Some(match cond {
        Q2Condition::EvenOdd => nullity,
        _ => {
            debug_assert!(nullity >= 1, "1 is always in the kernel of A + D");
            nullity - 1
        }
    })
}

pub fn count_partitions_q2(g: &Graph, cond: Q2Condition) -> BigUint {
    count_partitions_q2_log2(g, cond).map_or_else(BigUint::default, |k| BigUint::one() << k)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixParity {
    Any,
    /// All column sums zero.
    Even,
    /// All column sums one.
    Odd,
}

/// Uniform random symmetric `n x n` matrix from the given parity class.
///
/// `Any` draws the upper triangle (diagonal included) row-major. `Even`
/// draws a free symmetric `(n-1) x (n-1)` leading minor and fills the last
/// row and column so that every column sums to zero; this is a bijection
/// onto the even class. `Odd` is `Even + I`.
pub fn sample_symmetric(n: usize, seed: u64, parity: MatrixParity) -> BitMatrix {
    let mut rng = rng_from_seed(seed);
    let mut bits = BitBuffer::default();
    let mut m = BitMatrix::zeros(n, n);
    let free = match parity {
        MatrixParity::Any => n,
        _ => n.saturating_sub(1),
    };
    for i in 0..free {
        for j in i..free {
            if bits.next(&mut rng) {
                m.set(i, j, true);
                m.set(j, i, true);
            }
        }
    }
    if parity != MatrixParity::Any && n > 0 {
        let last = n - 1;
        let mut corner = false;
        for j in 0..last {
            let s = (0..last).filter(|&i| m.get(i, j)).count() % 2 == 1;
            m.set(last, j, s);
            m.set(j, last, s);
            corner ^= s;
        }
        m.set(last, last, corner);
        if parity == MatrixParity::Odd {
            for i in 0..n {
                m.rows[i].flip(i);
            }
        }
    }
    m
}

#[derive(Default)]
struct BitBuffer {
    word: u64,
    left: u32,
}

impl BitBuffer {
    fn next(&mut self, rng: &mut impl RngCore) -> bool {
        if self.left == 0 {
            self.word = rng.next_u64();
            self.left = 64;
        }
        let b = self.word & 1 == 1;
        self.word >>= 1;
        self.left -= 1;
        b
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::VertexSet;
    use proptest::prelude::*;

    fn bv(bits: &[u8]) -> BitVec {
        BitVec::from_bools(&bits.iter().map(|&b| b == 1).collect::<Vec<_>>())
    }

    #[test]
    fn rank_examples() {
        assert_eq!(BitMatrix::zeros(3, 3).rank(), 0);
        assert_eq!(BitMatrix::identity(4).rank(), 4);
        assert_eq!(BitMatrix::all_ones(4).rank(), 1);
    }

    #[test]
    fn rank_does_not_modify_input() {
        let m = BitMatrix::all_ones(3);
        let before = m.clone();
        let _ = m.rank();
        assert_eq!(m, before);
    }

    #[test]
    fn solve_identity() {
        let s = BitMatrix::identity(3).solve_affine(&bv(&[1, 0, 1])).unwrap();
        assert_eq!(s.particular, Some(bv(&[1, 0, 1])));
        assert_eq!(s.nullity, 0);
    }

    #[test]
    fn solve_inconsistent() {
        let s = BitMatrix::zeros(2, 2).solve_affine(&bv(&[1, 0])).unwrap();
        assert!(!s.is_consistent());
        assert_eq!(s.solution_count(), BigUint::default());
    }

    #[test]
    fn solve_all_ones_kernel_is_even_weight() {
        let s = BitMatrix::all_ones(4).solve_affine(&BitVec::zeros(4)).unwrap();
        assert_eq!(s.nullity, 3);
        let mut sols: Vec<u64> = s.solutions().iter().map(|v| v.words()[0]).collect();
        sols.sort_unstable();
        let even: Vec<u64> = (0..16u64).filter(|x| x.count_ones() % 2 == 0).collect();
        assert_eq!(sols, even);
    }

    #[test]
    fn solve_rejects_dimension_mismatch() {
        assert!(matches!(BitMatrix::identity(3).solve_affine(&BitVec::zeros(2)), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn parity_system_examples() {
        let (m, b) = parity_system(&Graph::empty(2), Q2Condition::EvenEven);
        assert_eq!(m, BitMatrix::zeros(2, 2));
        assert!(b.is_zero());

        let (m, b) = parity_system(&Graph::complete(4), Q2Condition::OddOdd);
        assert_eq!(m, BitMatrix::all_ones(4));
        assert!(b.is_zero());

        // Both degrees are odd, so D = I and A + D + I = A.
        let (m, b) = parity_system(&Graph::complete(2), Q2Condition::EvenOdd);
        assert_eq!(m, BitMatrix::from_bools(&[vec![false, true], vec![true, false]]).unwrap());
        assert_eq!(b, BitVec::ones(2));
        assert_eq!(count_partitions_q2(&Graph::complete(2), Q2Condition::EvenOdd), BigUint::one());
    }

    #[test]
    fn count_examples() {
        assert_eq!(count_partitions_q2(&Graph::empty(3), Q2Condition::EvenEven), BigUint::from(4u32));
        assert_eq!(count_partitions_q2(&Graph::complete(4), Q2Condition::OddOdd), BigUint::from(4u32));
        assert_eq!(count_partitions_q2(&Graph::empty(4), Q2Condition::OddOdd), BigUint::default());
    }

    #[test]
    fn k4_odd_odd_by_brute_force() {
        // Ordered bipartitions of K4 with both sides odd correspond to
        // even-weight indicator vectors; count unordered ones directly.
        let g = Graph::complete(4);
        let mut ordered = 0;
        for mask in 0u64..16 {
            let one = VertexSet::from_members(4, (0..4).filter(|v| mask >> v & 1 == 1));
            let zero = VertexSet::from_members(4, (0..4).filter(|v| mask >> v & 1 == 0));
            let ok = one.iter().all(|v| g.induced_degree(&one, v) % 2 == 1)
                && zero.iter().all(|v| g.induced_degree(&zero, v) % 2 == 1);
            ordered += ok as u32;
        }
        assert_eq!(ordered, 8);
        assert_eq!(count_partitions_q2(&g, Q2Condition::OddOdd), BigUint::from(ordered / 2));
    }

    #[test]
    fn symmetric_sampler_classes() {
        assert_eq!(sample_symmetric(1, 3, MatrixParity::Even), BitMatrix::zeros(1, 1));
        assert_eq!(sample_symmetric(1, 3, MatrixParity::Odd), BitMatrix::identity(1));
        for seed in 0..200 {
            let e = sample_symmetric(7, seed, MatrixParity::Even);
            assert!(e.is_symmetric());
            assert!(e.column_parities().is_zero());
            let o = sample_symmetric(7, seed, MatrixParity::Odd);
            assert!(o.is_symmetric());
            assert_eq!(o.column_parities(), BitVec::ones(7));
            assert!(sample_symmetric(6, seed, MatrixParity::Any).is_symmetric());
        }
    }

    #[test]
    fn even_symmetric_never_full_rank() {
        for seed in 0..500 {
            assert!(sample_symmetric(3, seed, MatrixParity::Even).rank() < 3);
        }
    }

    #[test]
    fn any_symmetric_2x2_is_uniform() {
        // Chi-square over the 8 symmetric 2x2 matrices, 7 degrees of freedom.
        let trials = 16_000u64;
        let mut cells = [0u64; 8];
        for seed in 0..trials {
            let m = sample_symmetric(2, seed, MatrixParity::Any);
            let idx = m.get(0, 0) as usize | (m.get(0, 1) as usize) << 1 | (m.get(1, 1) as usize) << 2;
            cells[idx] += 1;
        }
        let expected = trials as f64 / 8.0;
        let chi2: f64 = cells.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        // 99.9th percentile of chi-square with 7 d.o.f.
        assert!(chi2 < 24.32, "chi2 = {chi2}, cells = {cells:?}");
    }

    #[test]
    fn odd_odd_needs_even_order() {
        for seed in 0..100 {
            let g = Graph::sample_gnp(7, crate::Probability::HALF, seed);
            assert_eq!(count_partitions_q2_log2(&g, Q2Condition::OddOdd), None);
            assert!(count_partitions_q2_log2(&g, Q2Condition::EvenEven).is_some());
            assert!(count_partitions_q2_log2(&g, Q2Condition::EvenOdd).is_some());
        }
    }

    fn arb_matrix(max_r: usize, max_c: usize) -> impl Strategy<Value = (BitMatrix, BitVec)> {
        (1..=max_r, 1..=max_c).prop_flat_map(|(r, c)| {
            (
                proptest::collection::vec(proptest::collection::vec(any::<bool>(), c), r),
                proptest::collection::vec(any::<bool>(), r),
            )
                .prop_map(move |(rows, b)| (BitMatrix::from_bools(&rows).unwrap(), BitVec::from_bools(&b)))
        })
    }

    proptest! {
        #[test]
        fn solution_space_matches_exhaustive_search((m, b) in arb_matrix(12, 12)) {
            let c = m.col_count();
            let space = m.solve_affine(&b).unwrap();
            let mut found: Vec<BitVec> = (0u64..1 << c)
                .map(|x| BitVec::from_u64(x, c))
                .filter(|x| m.mul_vec(x).unwrap() == b)
                .collect();
            let mut listed = space.solutions();
            found.sort();
            listed.sort();
            prop_assert_eq!(&listed, &found);
            prop_assert_eq!(space.nullity, c - m.rank());
            for k in &space.kernel_basis {
                prop_assert!(m.mul_vec(k).unwrap().is_zero());
            }
        }

        #[test]
        fn even_symmetric_rank_bound(n in 1usize..40, seed in any::<u64>()) {
            prop_assert!(sample_symmetric(n, seed, MatrixParity::Even).rank() < n);
        }
    }
}
