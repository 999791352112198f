//! Finite algebra over `(Z/qZ)^k`: incidence matrices of box sets, subgroup
//! closure, quotient sizes `N_{c,B}`, and an audit of the inequality
//! `sum_{c in L} N_{c,L} <= q^k` together with its equality case.

use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{rng_from_seed, trial_seed, RngCore};

/// Largest group order `q^k` handled by closure.
pub const MAX_GROUP_ORDER: u64 = 1 << 20;

/// Largest ambient size `q^k` for the exhaustive audit (all `2^(q^k)` sets).
pub const EXHAUSTIVE_AUDIT_LIMIT: u64 = 12;

/// A point of `[q]^k`, entries in `0..q`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Coord(Vec<u32>);

impl Coord {
    pub fn new(entries: Vec<u32>) -> Self {
        assert!(!entries.is_empty(), "coordinates have at least one entry");
        Coord(entries)
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn k(&self) -> usize {
        self.0.len()
    }

    /// Positions where the two coordinates agree.
    pub fn agreement(&self, other: &Coord) -> Vec<usize> {
        (0..self.0.len()).filter(|&j| self.0[j] == other.0[j]).collect()
    }
}

impl fmt::Debug for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoxSet {
    q: u32,
    k: usize,
    members: BTreeSet<Coord>,
}

impl BoxSet {
    pub fn new(q: u32, k: usize, members: impl IntoIterator<Item = Coord>) -> Result<Self> {
        if q < 2 || k == 0 {
            return Err(Error::InvalidArgument(format!("need q >= 2 and k >= 1, got q = {q}, k = {k}")));
        }
        let members: BTreeSet<Coord> = members.into_iter().collect();
        for c in &members {
            if c.k() != k || c.0.iter().any(|&e| e >= q) {
                return Err(Error::InvalidArgument(format!("{c:?} is not in [{q}]^{k}")));
            }
        }
        Ok(BoxSet { q, k, members })
    }

    pub fn from_vecs(q: u32, k: usize, members: &[&[u32]]) -> Result<Self> {
        BoxSet::new(q, k, members.iter().map(|m| Coord::new(m.to_vec())))
    }

    /// All of `[q]^k`.
    pub fn full(q: u32, k: usize) -> Self {
        BoxSet::new(q, k, all_points(q, k)).expect("valid ambient space")
    }

    /// The subset of `[q]^k` selected by bit `i` of `mask` for the `i`-th point
    /// in lexicographic order.
    pub fn from_mask(q: u32, k: usize, mask: u64) -> Self {
        let members = all_points(q, k).into_iter().enumerate().filter(|(i, _)| (mask >> i) & 1 == 1).map(|(_, c)| c);
        BoxSet::new(q, k, members).expect("valid ambient space")
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn members(&self) -> &BTreeSet<Coord> {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, c: &Coord) -> bool {
        self.members.contains(c)
    }

    /// `q^k`.
    pub fn ambient_size(&self) -> u64 {
        (self.q as u64).pow(self.k as u32)
    }
}

impl fmt::Debug for BoxSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BoxSet(q={}, k={}, {:?})", self.q, self.k, self.members)
    }
}

/// Every point of `[q]^k` in lexicographic order.
pub fn all_points(q: u32, k: usize) -> Vec<Coord> {
    let total = (q as u64).pow(k as u32);
    (0..total).map(|i| Coord(decode(i, q, k))).collect()
}

/// Big-endian base-`q` digits of `i`, so index order is lexicographic.
fn decode(mut i: u64, q: u32, k: usize) -> Vec<u32> {
    let mut d = vec![0; k];
    for slot in d.iter_mut().rev() {
        *slot = (i % q as u64) as u32;
        i /= q as u64;
    }
    d
}

fn encode(v: &[u32], q: u32) -> u64 {
    v.iter().fold(0, |acc, &d| acc * q as u64 + d as u64)
}

/// A `k x l` matrix over `Z/qZ`, stored by columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModqMatrix {
    q: u32,
    k: usize,
    columns: Vec<Vec<u32>>,
}

impl ModqMatrix {
    pub fn from_columns(q: u32, k: usize, columns: Vec<Vec<u32>>) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidArgument(format!("modulus {q} < 2")));
        }
        for c in &columns {
            if c.len() != k {
                return Err(Error::DimensionMismatch { expected: k, found: c.len() });
            }
        }
        let columns = columns.into_iter().map(|c| c.into_iter().map(|e| e % q).collect()).collect();
        Ok(ModqMatrix { q, k, columns })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn columns(&self) -> &[Vec<u32>] {
        &self.columns
    }

    /// Row vector times matrix, `a M (mod q)`.
    pub fn left_mul(&self, a: &[u32]) -> Vec<u32> {
        let q = self.q as u64;
        self.columns
            .iter()
            .map(|col| (col.iter().zip(a).map(|(&m, &x)| m as u64 * x as u64).sum::<u64>() % q) as u32)
            .collect()
    }

    pub fn column_subgroup_size(&self) -> Result<u64> {
        subgroup_size(&self.columns, self.q, self.k)
    }
}

/// `M^{(c,B)}`: column `c'` has a 1 in row `j` iff `c_j = c'_j`. Columns
/// follow the lexicographic order of `B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncidenceMatrix(ModqMatrix);

impl IncidenceMatrix {
    pub fn matrix(&self) -> &ModqMatrix {
        &self.0
    }

    pub fn columns(&self) -> &[Vec<u32>] {
        &self.0.columns
    }
}

pub fn incidence_matrix(c: &Coord, b: &BoxSet) -> Result<IncidenceMatrix> {
    if c.k() != b.k || c.0.iter().any(|&e| e >= b.q) {
        return Err(Error::InvalidArgument(format!("{c:?} is not in [{}]^{}", b.q, b.k)));
    }
    let columns = b.members.iter().map(|other| (0..b.k).map(|j| u32::from(c.0[j] == other.0[j])).collect()).collect();
    Ok(IncidenceMatrix(ModqMatrix { q: b.q, k: b.k, columns }))
}

/// Order of the subgroup of `(Z/qZ)^k` generated by `columns`, by
/// closure under adding generators.
pub fn subgroup_size(columns: &[Vec<u32>], q: u32, k: usize) -> Result<u64> {
    let order = (q as u64)
        .checked_pow(k as u32)
        .filter(|&o| o <= MAX_GROUP_ORDER)
        .ok_or_else(|| Error::ScaleGuard(format!("group order {q}^{k} exceeds {MAX_GROUP_ORDER}")))?;
    let gens: Vec<Vec<u32>> = columns
        .iter()
        .map(|c| c.iter().map(|&e| e % q).collect::<Vec<u32>>())
        .filter(|c| c.iter().any(|&e| e != 0))
        .collect();
    let mut seen = vec![false; order as usize];
    seen[0] = true;
    let mut frontier = vec![vec![0u32; k]];
    let mut size = 1u64;
    while let Some(x) = frontier.pop() {
        for g in &gens {
            let y: Vec<u32> = x.iter().zip(g).map(|(a, b)| (a + b) % q).collect();
            let idx = encode(&y, q) as usize;
            if !seen[idx] {
                seen[idx] = true;
                size += 1;
                frontier.push(y);
            }
        }
    }
    Ok(size)
}

/// `N_{c,B} = q^k / |<columns of M^{(c,B)}>|`, the index of the column
/// subgroup.
pub fn n_value(c: &Coord, b: &BoxSet) -> Result<u64> {
    let m = incidence_matrix(c, b)?;
    Ok(b.ambient_size() / m.0.column_subgroup_size()?)
}

/// Number of `a in (Z/qZ)^k` with `a M = b (mod q)`, by exhaustion.
pub fn count_congruence_solutions(m: &ModqMatrix, b: &[u32]) -> Result<u64> {
    if b.len() != m.columns.len() {
        return Err(Error::DimensionMismatch { expected: m.columns.len(), found: b.len() });
    }
    let order = (m.q as u64)
        .checked_pow(m.k as u32)
        .filter(|&o| o <= MAX_GROUP_ORDER)
        .ok_or_else(|| Error::ScaleGuard(format!("group order {}^{} exceeds {MAX_GROUP_ORDER}", m.q, m.k)))?;
    let target: Vec<u32> = b.iter().map(|&e| e % m.q).collect();
    Ok((0..order).filter(|&i| m.left_mul(&decode(i, m.q, m.k)) == target).count() as u64)
}

/// Detects combinatorial subspaces from pairwise projections.
///
/// `L` qualifies iff every coordinate projects onto all of `[q]`, and `L`
/// equals the set of points satisfying every constraint `c_j' = phi(c_j)`
/// read off from pairs `(j, j')` whose joint projection has exactly `q`
/// points (the graph of a permutation `phi`).
pub fn is_combinatorial_subspace(l: &BoxSet) -> bool {
    if l.is_empty() {
        return false;
    }
    let (q, k) = (l.q as usize, l.k);
    for j in 0..k {
        let proj: BTreeSet<u32> = l.members.iter().map(|c| c.0[j]).collect();
        if proj.len() != q {
            return false;
        }
    }
    let mut bound: Vec<(usize, usize, Vec<u32>)> = Vec::new();
    for j in 0..k {
        for jp in j + 1..k {
            let pairs: BTreeSet<(u32, u32)> = l.members.iter().map(|c| (c.0[j], c.0[jp])).collect();
            if pairs.len() == q {
                let mut phi = vec![0; q];
                for (a, b) in pairs {
                    phi[a as usize] = b;
                }
                bound.push((j, jp, phi));
            }
        }
    }
    let satisfying = all_points(l.q, k)
        .into_iter()
        .filter(|c| bound.iter().all(|(j, jp, phi)| phi[c.0[*j] as usize] == c.0[*jp]))
        .count();
    satisfying == l.len()
}

/// Every combinatorial subspace of `[q]^k`, generated straight from the
/// definition: choose which coordinates share a variable and a permutation
/// for every coordinate, then collect the image of `[q]^r`.
pub fn combinatorial_subspaces(q: u32, k: usize) -> Result<BTreeSet<BoxSet>> {
    let perms = permutations(q as usize);
    let work = (perms.len() as u64).checked_pow(k as u32).and_then(|p| p.checked_mul((k as u64).pow(k as u32)));
    if work.is_none_or(|w| w > 5_000_000) {
        return Err(Error::ScaleGuard(format!("representation enumeration for q = {q}, k = {k} is too large")));
    }
    let mut out = BTreeSet::new();
    for vars in restricted_growth(k) {
        let r = vars.iter().max().map_or(0, |m| m + 1);
        let mut choice = vec![0usize; k];
        'odometer: loop {
            let members = (0..(q as u64).pow(r as u32)).map(|i| {
                let x = decode(i, q, r);
                Coord((0..k).map(|j| perms[choice[j]][x[vars[j]] as usize]).collect())
            });
            out.insert(BoxSet::new(q, k, members)?);
            for slot in choice.iter_mut() {
                *slot += 1;
                if *slot < perms.len() {
                    continue 'odometer;
                }
                *slot = 0;
            }
            break;
        }
    }
    Ok(out)
}

/// Restricted growth strings of length `k`, i.e. set partitions of the
/// coordinates into shared variables.
fn restricted_growth(k: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == k {
            out.push(prefix.clone());
            return;
        }
        let next = prefix.iter().max().map_or(0, |m| m + 1);
        for v in 0..=next {
            prefix.push(v);
            go(prefix, k, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), k, &mut out);
    out
}

fn permutations(q: usize) -> Vec<Vec<u32>> {
    fn go(cur: &mut Vec<u32>, used: &mut [bool], out: &mut Vec<Vec<u32>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                cur.push(v as u32);
                go(cur, used, out);
                cur.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; q], &mut out);
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SumInequality {
    pub sum: u64,
    pub bound: u64,
    pub equality: bool,
}

/// `sum_{c in L} N_{c,L}` against `q^k`. Requires `q >= 3`.
pub fn verify_sum_inequality(l: &BoxSet) -> Result<SumInequality> {
    if l.q < 3 {
        return Err(Error::InvalidArgument(format!("the sum inequality needs q >= 3, got q = {}", l.q)));
    }
    if l.is_empty() {
        return Err(Error::InvalidArgument("the box set must be non-empty".into()));
    }
    let mut sum = 0;
    for c in &l.members {
        sum += n_value(c, l)?;
    }
    let bound = l.ambient_size();
    Ok(SumInequality { sum, bound, equality: sum == bound })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum AuditMode {
    Exhaustive,
    Sampled { count: u64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub members: Vec<Vec<u32>>,
    pub sum: u64,
    pub bound: u64,
    pub combinatorial_subspace: bool,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditReport {
    pub q: u32,
    pub k: usize,
    pub mode: AuditMode,
    pub sets_audited: u64,
    pub violations: Vec<Violation>,
    pub equality_count: u64,
    /// Sets the projection detector classified as combinatorial subspaces.
    pub detector_count: u64,
    /// Combinatorial subspaces generated from the definition, when feasible.
    pub representation_count: Option<u64>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the sum inequality and its equality case on every non-empty
/// `L ⊆ [q]^k` (exhaustive) or on random ones (sampled: each point kept
/// independently with probability 1/2, empty draws rejected).
///
/// Whenever the definitional enumeration is feasible the detector is also
/// compared set-by-set against it.
pub fn exhaustive_lemma_audit(q: u32, k: usize, mode: AuditMode) -> Result<AuditReport> {
    if q < 3 {
        return Err(Error::InvalidArgument(format!("the audit needs q >= 3, got q = {q}")));
    }
    let points = (q as u64)
        .checked_pow(k as u32)
        .filter(|&p| p <= 64)
        .ok_or_else(|| Error::ScaleGuard(format!("q^k = {q}^{k} exceeds 64 points")))?;

    let reference = match mode {
        AuditMode::Exhaustive => {
            if points > EXHAUSTIVE_AUDIT_LIMIT {
                return Err(Error::ScaleGuard(format!(
                    "exhaustive audit enumerates 2^(q^k) sets and needs q^k <= {EXHAUSTIVE_AUDIT_LIMIT}, got {q}^{k} = {points}"
                )));
            }
            Some(combinatorial_subspaces(q, k)?)
        }
        AuditMode::Sampled { .. } => combinatorial_subspaces(q, k).ok(),
    };

    let masks: Vec<u64> = match mode {
        AuditMode::Exhaustive => (1..1u64 << points).collect(),
        AuditMode::Sampled { count, seed } => {
            let keep = if points == 64 { u64::MAX } else { (1u64 << points) - 1 };
            (0..count)
                .into_par_iter()
                .map(|i| {
                    let mut rng = rng_from_seed(trial_seed(seed, i));
                    loop {
                        let m = rng.next_u64() & keep;
                        if m != 0 {
                            break m;
                        }
                    }
                })
                .collect()
        }
    };

    let outcomes: Vec<(bool, bool, Option<Violation>)> = masks
        .par_iter()
        .map(|&mask| {
            let l = BoxSet::from_mask(q, k, mask);
            let s = verify_sum_inequality(&l).expect("non-empty set with q >= 3");
            let detected = is_combinatorial_subspace(&l);
            let mut reasons = Vec::new();
            if s.sum > s.bound {
                reasons.push("sum exceeds q^k");
            }
            if s.equality != detected {
                reasons.push("equality does not match the combinatorial-subspace test");
            }
            if let Some(r) = &reference {
                if r.contains(&l) != detected {
                    reasons.push("detector disagrees with representation enumeration");
                }
            }
            let violation = (!reasons.is_empty()).then(|| Violation {
                members: l.members.iter().map(|c| c.0.clone()).collect(),
                sum: s.sum,
                bound: s.bound,
                combinatorial_subspace: detected,
                reason: reasons.join("; "),
            });
            (s.equality, detected, violation)
        })
        .collect();

    Ok(AuditReport {
        q,
        k,
        mode,
        sets_audited: outcomes.len() as u64,
        equality_count: outcomes.iter().filter(|o| o.0).count() as u64,
        detector_count: outcomes.iter().filter(|o| o.1).count() as u64,
        representation_count: reference.map(|r| r.len() as u64),
        violations: outcomes.into_iter().filter_map(|o| o.2).collect(),
    })
}
