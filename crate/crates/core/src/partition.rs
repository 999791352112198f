//! Brute-force enumeration of good partitions.
//!
//! A [`PartitionSpec`] fixes a modulus `q` and multiplicities
//! `a_0, ..., a_{q-1}` summing to `q`: there are `a_x` parts whose induced
//! degrees must all be `x (mod q)`. Parts sharing a residue are
//! interchangeable and may be empty, so a partition is identified by the set
//! of its non-empty parts for each residue ([`CanonicalPartition`]).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::Q2Condition;
use crate::graph::{Graph, VertexSet};

/// Largest assignment space `q^n` the enumerator accepts.
pub const BRUTE_FORCE_LIMIT: u64 = 1 << 24;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PartitionSpec {
    q: u32,
    multiplicities: Vec<u32>,
}

impl PartitionSpec {
    pub fn new(q: u32, multiplicities: Vec<u32>) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidSpec(format!("modulus q = {q} must be at least 2")));
        }
        if multiplicities.len() != q as usize {
            return Err(Error::InvalidSpec(format!(
                "expected {q} multiplicities a_0..a_{}, found {}",
                q - 1,
                multiplicities.len()
            )));
        }
        let sum: u64 = multiplicities.iter().map(|&a| a as u64).sum();
        if sum != q as u64 {
            return Err(Error::InvalidSpec(format!("multiplicities sum to {sum}, expected q = {q}")));
        }
        Ok(PartitionSpec { q, multiplicities })
    }

    /// `(q, 0, ..., 0)`: every part must have all degrees divisible by `q`.
    pub fn all_zero(q: u32) -> Result<Self> {
        let mut a = vec![0; q as usize];
        if let Some(first) = a.first_mut() {
            *first = q;
        }
        PartitionSpec::new(q, a)
    }

    pub fn q2(cond: Q2Condition) -> Self {
        PartitionSpec { q: 2, multiplicities: cond.multiplicities().to_vec() }
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn multiplicities(&self) -> &[u32] {
        &self.multiplicities
    }

    /// Residue of each of the `q` slots, ascending.
    pub fn slot_residues(&self) -> Vec<u32> {
        self.multiplicities.iter().enumerate().flat_map(|(x, &a)| std::iter::repeat_n(x as u32, a as usize)).collect()
    }

    /// Number of parts with an even residue, `sum_x a_{2x}`.
    pub fn even_parts(&self) -> u32 {
        self.multiplicities.iter().step_by(2).sum()
    }

    pub fn q2_condition(&self) -> Option<Q2Condition> {
        (self.q == 2).then(|| Q2Condition::from_multiplicities(&self.multiplicities)).flatten()
    }

    /// `q^n` when it fits the brute-force budget.
    pub fn check_brute_force(&self, n: usize) -> Result<u64> {
        let space = (self.q as u64).checked_pow(n as u32).filter(|&s| s <= BRUTE_FORCE_LIMIT);
        space.ok_or_else(|| {
            Error::ScaleGuard(format!(
                "brute force needs q^n <= 2^24 assignments, but q = {} and n = {n} give {}^{n}{}",
                self.q,
                self.q,
                if self.q == 2 { " (use the gf2 engine for q = 2)" } else { "" }
            ))
        })
    }
}

impl fmt::Display for PartitionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a: Vec<String> = self.multiplicities.iter().map(u32::to_string).collect();
        write!(f, "q={} a={}", self.q, a.join(","))
    }
}

impl FromStr for PartitionSpec {
    type Err = Error;

    /// Parses `q=3 a=3,0,0`.
    fn from_str(s: &str) -> Result<Self> {
        let mut q = None;
        let mut a = None;
        for tok in s.split_whitespace() {
            match tok.split_once('=') {
                Some(("q", v)) => {
                    q = Some(v.parse::<u32>().map_err(|_| Error::InvalidSpec(format!("bad modulus {v:?}")))?)
                }
                Some(("a", v)) => a = Some(parse_multiplicities(v)?),
                _ => return Err(Error::InvalidSpec(format!("unexpected token {tok:?}"))),
            }
        }
        match (q, a) {
            (Some(q), Some(a)) => PartitionSpec::new(q, a),
            _ => Err(Error::InvalidSpec(format!("expected \"q=Q a=a0,a1,...\", found {s:?}"))),
        }
    }
}

pub fn parse_multiplicities(s: &str) -> Result<Vec<u32>> {
    s.split(',')
        .map(|t| t.trim().parse::<u32>().map_err(|_| Error::InvalidSpec(format!("bad multiplicity {t:?}"))))
        .collect()
}

/// A good-partition candidate in canonical form: for each residue, its
/// non-empty parts sorted by smallest vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalPartition {
    parts: Vec<Vec<VertexSet>>,
}

impl CanonicalPartition {
    /// Canonicalises parts given per residue; empty parts are discarded.
    pub fn new(mut parts: Vec<Vec<VertexSet>>) -> Self {
        for class in &mut parts {
            class.retain(|p| !p.is_empty());
            class.sort_by_key(|p| p.min());
        }
        CanonicalPartition { parts }
    }

    /// From an assignment of each vertex to a slot of `spec`.
    pub fn from_slots(spec: &PartitionSpec, n: usize, slot_of: &[usize]) -> Self {
        let residues = spec.slot_residues();
        let mut sets = vec![VertexSet::empty(n); residues.len()];
        for (v, &s) in slot_of.iter().enumerate() {
            sets[s].insert(v);
        }
        let mut parts = vec![Vec::new(); spec.q() as usize];
        for (s, set) in sets.into_iter().enumerate() {
            parts[residues[s] as usize].push(set);
        }
        CanonicalPartition::new(parts)
    }

    pub fn parts(&self, residue: usize) -> &[VertexSet] {
        self.parts.get(residue).map_or(&[], Vec::as_slice)
    }

    pub fn residues(&self) -> usize {
        self.parts.len()
    }

    /// Parts are disjoint, cover `0..n`, and residue `x` has at most `a_x`.
    pub fn is_well_formed(&self, n: usize, spec: &PartitionSpec) -> bool {
        if self.parts.len() != spec.q() as usize {
            return false;
        }
        let mut seen = vec![false; n];
        for (x, class) in self.parts.iter().enumerate() {
            if class.len() > spec.multiplicities()[x] as usize {
                return false;
            }
            for part in class {
                if part.universe() != n {
                    return false;
                }
                for v in part.iter() {
                    if std::mem::replace(&mut seen[v], true) {
                        return false;
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

impl fmt::Display for CanonicalPartition {
    /// Residue-tagged parts, e.g. `0:{1,3} 0:{2} 1:{4,5}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (x, class) in self.parts.iter().enumerate() {
            for part in class {
                if !first {
                    f.write_str(" ")?;
                }
                first = false;
                write!(f, "{x}:{part}")?;
            }
        }
        Ok(())
    }
}

/// Every vertex's degree inside its part is congruent to the part's residue.
/// Empty parts are vacuously good.
pub fn is_good(g: &Graph, p: &CanonicalPartition, spec: &PartitionSpec) -> bool {
    let q = spec.q() as usize;
    p.parts
        .iter()
        .enumerate()
        .all(|(x, class)| class.iter().all(|part| part.iter().all(|v| g.induced_degree(part, v) % q == x % q)))
}

pub fn enumerate_good(g: &Graph, spec: &PartitionSpec) -> Result<Vec<CanonicalPartition>> {
    let mut out = Vec::new();
    search(g, spec, |slots| out.push(CanonicalPartition::from_slots(spec, g.n(), slots)))?;
    out.sort();
    Ok(out)
}

pub fn count_good(g: &Graph, spec: &PartitionSpec) -> Result<u64> {
    let mut count = 0u64;
    search(g, spec, |_| count += 1)?;
    Ok(count)
}

/// Depth-first search over slot assignments, visiting each canonical good
/// partition exactly once.
///
/// Within a residue class the slots are opened in order of first use, so
/// relabelling interchangeable parts (or their empty siblings) never yields
/// a second visit. A vertex's induced degree is checked as soon as its last
/// neighbour has been placed.
fn search(g: &Graph, spec: &PartitionSpec, mut visit: impl FnMut(&[usize])) -> Result<()> {
    spec.check_brute_force(g.n())?;
    let n = g.n();
    let residues = spec.slot_residues();
    // First slot index of each residue class.
    let mut class_start = vec![0usize; spec.q() as usize];
    let mut acc = 0;
    for (x, &a) in spec.multiplicities().iter().enumerate() {
        class_start[x] = acc;
        acc += a as usize;
    }
    let earlier: Vec<Vec<usize>> = (0..n).map(|v| g.neighbors(v).filter(|&u| u < v).collect()).collect();
    // Vertices whose degree is final once vertex v is placed.
    let mut settle: Vec<Vec<usize>> = vec![Vec::new(); n];
    for u in 0..n {
        let last = g.neighbors(u).max().unwrap_or(u).max(u);
        settle[last].push(u);
    }

    let mut st = Search {
        q: spec.q() as usize,
        residues: &residues,
        class_start: &class_start,
        multiplicities: spec.multiplicities(),
        earlier: &earlier,
        settle: &settle,
        slot_of: vec![usize::MAX; n],
        degree: vec![0; n],
        opened: vec![0; spec.q() as usize],
    };
    st.place(0, &mut visit);
    Ok(())
}

struct Search<'a> {
    q: usize,
    residues: &'a [u32],
    class_start: &'a [usize],
    multiplicities: &'a [u32],
    earlier: &'a [Vec<usize>],
    settle: &'a [Vec<usize>],
    slot_of: Vec<usize>,
    degree: Vec<usize>,
    opened: Vec<usize>,
}

impl Search<'_> {
    fn place(&mut self, v: usize, visit: &mut impl FnMut(&[usize])) {
        if v == self.slot_of.len() {
            visit(&self.slot_of);
            return;
        }
        for x in 0..self.q {
            let limit = (self.opened[x] + 1).min(self.multiplicities[x] as usize);
            for y in 0..limit {
                let slot = self.class_start[x] + y;
                let opens = y == self.opened[x];
                self.slot_of[v] = slot;
                if opens {
                    self.opened[x] += 1;
                }
                for &u in &self.earlier[v] {
                    if self.slot_of[u] == slot {
                        self.degree[u] += 1;
                        self.degree[v] += 1;
                    }
                }
                let ok =
                    self.settle[v].iter().all(|&u| self.degree[u] % self.q == self.residues[self.slot_of[u]] as usize);
                if ok {
                    self.place(v + 1, visit);
                }
                for &u in &self.earlier[v] {
                    if self.slot_of[u] == slot {
                        self.degree[u] -= 1;
                        self.degree[v] -= 1;
                    }
                }
                if opens {
                    self.opened[x] -= 1;
                }
            }
        }
        self.slot_of[v] = usize::MAX;
    }
}
