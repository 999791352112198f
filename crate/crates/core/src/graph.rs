//! Simple undirected graphs on vertices `0..n` (written `1..=n` in every
//! text format), stored as symmetric bit-packed adjacency rows.

use std::fmt;
use std::str::FromStr;

use crate::bits::BitVec;
use crate::error::{Error, Result};
use crate::rng::{rng_from_seed, RngCore};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    rows: Vec<BitVec>,
}

/// A subset of the vertex set of some graph.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSet(BitVec);

impl VertexSet {
    pub fn empty(n: usize) -> Self {
        VertexSet(BitVec::zeros(n))
    }

    pub fn full(n: usize) -> Self {
        VertexSet(BitVec::ones(n))
    }

    /// Builds a set from 0-indexed members.
    pub fn from_members(n: usize, members: impl IntoIterator<Item = usize>) -> Self {
        let mut s = VertexSet::empty(n);
        for v in members {
            assert!(v < n, "vertex {v} out of range for n = {n}");
            s.0.set(v, true);
        }
        s
    }

    pub fn insert(&mut self, v: usize) {
        self.0.set(v, true);
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.get(v)
    }

    pub fn len(&self) -> usize {
        self.0.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_zero()
    }

    pub fn universe(&self) -> usize {
        self.0.len()
    }

    pub fn min(&self) -> Option<usize> {
        self.0.first_one_from(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter_ones()
    }

    pub fn bits(&self) -> &BitVec {
        &self.0
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, v) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", v + 1)?;
        }
        f.write_str("}")
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Exact edge probability `num / den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Probability {
    num: u64,
    den: u64,
}

impl Probability {
    pub const HALF: Probability = Probability { num: 1, den: 2 };
    pub const ZERO: Probability = Probability { num: 0, den: 1 };
    pub const ONE: Probability = Probability { num: 1, den: 1 };

    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 || num > den {
            return Err(Error::InvalidProbability(format!("{num}/{den}")));
        }
        let g = gcd(num, den);
        Ok(Probability { num: num / g, den: den / g })
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn is_half(&self) -> bool {
        *self == Probability::HALF
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Maps a uniform 64-bit word to a Bernoulli(p) outcome using the high
    /// product `(x * den) >> 64 < num`. Exact whenever `den` is a power of two.
    #[inline]
    fn accept(&self, x: u64) -> bool {
        (((x as u128) * (self.den as u128)) >> 64) < self.num as u128
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

impl Default for Probability {
    fn default() -> Self {
        Probability::HALF
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Probability {
    type Err = Error;

    /// Accepts `num/den` or a bare integer `0` / `1`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidProbability(s.to_string());
        let t = s.trim();
        let (num, den) = match t.split_once('/') {
            Some((a, b)) => (a.trim().parse::<u64>().map_err(|_| bad())?, b.trim().parse::<u64>().map_err(|_| bad())?),
            None => (t.parse::<u64>().map_err(|_| bad())?, 1),
        };
        Probability::new(num, den).map_err(|_| bad())
    }
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        assert!(n >= 1, "graphs have at least one vertex");
        Graph { n, rows: vec![BitVec::zeros(n); n] }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Graph::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3);
        let mut g = Graph::empty(n);
        for u in 0..n {
            g.add_edge(u, (u + 1) % n);
        }
        g
    }

    pub fn path(n: usize) -> Self {
        let mut g = Graph::empty(n);
        for u in 1..n {
            g.add_edge(u - 1, u);
        }
        g
    }

    /// Builds a graph from 0-indexed edges. Panics on loops or out-of-range
    /// endpoints; repeated edges are idempotent.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = Graph::empty(n);
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    /// The graph whose edge `i` (row-major over pairs `u < v`) is present iff
    /// bit `i` of `mask` is set. Enumerates all graphs on `n <= 11` vertices.
    pub fn from_pair_mask(n: usize, mask: u64) -> Self {
        let mut g = Graph::empty(n);
        let mut i = 0;
        for u in 0..n {
            for v in u + 1..n {
                if (mask >> i) & 1 == 1 {
                    g.add_edge(u, v);
                }
                i += 1;
            }
        }
        g
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u != v, "loops are not allowed");
        assert!(u < self.n && v < self.n, "vertex out of range");
        self.rows[u].set(v, true);
        self.rows[v].set(u, true);
    }

    /// Samples `G(n, p)`. Pairs are visited row-major over `u < v`
    /// (`(0,1), (0,2), ..., (1,2), ...`); each consumes one `next_u64` from a
    /// ChaCha8 stream seeded with `seed`.
    pub fn sample_gnp(n: usize, p: Probability, seed: u64) -> Self {
        let mut rng = rng_from_seed(seed);
        let mut g = Graph::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                if p.accept(rng.next_u64()) {
                    g.add_edge(u, v);
                }
            }
        }
        g
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.rows[u].get(v)
    }

    pub fn row(&self, v: usize) -> &BitVec {
        &self.rows[v]
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }

    pub fn degree(&self, v: usize) -> usize {
        self.rows[v].count_ones()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.rows.iter().map(BitVec::count_ones).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.degrees().iter().sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.rows[v].iter_ones()
    }

    /// Edges `(u, v)` with `u < v`, sorted lexicographically.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for u in 0..self.n {
            out.extend(self.rows[u].iter_ones().filter(|&v| v > u).map(|v| (u, v)));
        }
        out
    }

    /// Number of neighbours of `v` inside `part`. `v` must belong to `part`.
    pub fn induced_degree(&self, part: &VertexSet, v: usize) -> usize {
        debug_assert_eq!(part.universe(), self.n);
        assert!(part.contains(v), "vertex {} is not in the part", v + 1);
        self.rows[v].count_ones_and(part.bits())
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Graph {
        assert_eq!(perm.len(), self.n);
        let mut g = Graph::empty(self.n);
        for (u, v) in self.edges() {
            g.add_edge(perm[u], perm[v]);
        }
        g
    }

    /// Parses the edge-list format: a header `n m`, then `m` lines `u v`
    /// with 1-indexed endpoints. Blank lines are ignored.
    pub fn parse_edge_list(text: &str) -> Result<Graph> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());

        let (hline, header) = lines.next().ok_or(Error::Parse { line: 1, message: "missing header \"n m\"".into() })?;
        let (n, m) = parse_pair(hline, header)?;
        if n == 0 {
            return Err(Error::Parse { line: hline, message: "vertex count must be positive".into() });
        }

        let mut g = Graph::empty(n);
        let mut seen = 0usize;
        let mut last_line = hline;
        for (line, body) in lines {
            last_line = line;
            let (u, v) = parse_pair(line, body)?;
            let err = |message: String| Err(Error::Parse { line, message });
            if u == v {
                return err(format!("loop at vertex {u}"));
            }
            if u == 0 || v == 0 || u > n || v > n {
                return err(format!("vertex out of range 1..={n} in edge {u} {v}"));
            }
            if g.has_edge(u - 1, v - 1) {
                return err(format!("duplicate edge {} {}", u.min(v), u.max(v)));
            }
            seen += 1;
            if seen > m {
                return err(format!("more edges than the {m} declared in the header"));
            }
            g.add_edge(u - 1, v - 1);
        }
        if seen != m {
            return Err(Error::Parse { line: last_line, message: format!("header declares {m} edges, found {seen}") });
        }
        Ok(g)
    }

    /// Canonical edge list: header, then edges `u < v` in sorted order.
    pub fn emit_edge_list(&self) -> String {
        let edges = self.edges();
        let mut out = format!("{} {}\n", self.n, edges.len());
        for (u, v) in edges {
            out.push_str(&format!("{} {}\n", u + 1, v + 1));
        }
        out
    }
}

fn parse_pair(line: usize, body: &str) -> Result<(usize, usize)> {
    let malformed = || Error::Parse { line, message: format!("expected two non-negative integers, found {body:?}") };
    let mut it = body.split_whitespace();
    let a = it.next().ok_or_else(malformed)?.parse().map_err(|_| malformed())?;
    let b = it.next().ok_or_else(malformed)?.parse().map_err(|_| malformed())?;
    if it.next().is_some() {
        return Err(malformed());
    }
    Ok((a, b))
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("edges", &self.edges().iter().map(|(u, v)| (u + 1, v + 1)).collect::<Vec<_>>())
            .finish()
    }
}
