//! Finite directed multigraphs stored as multiplicity matrices.
//!
//! A graph is an ordered list of vertex labels together with an n×n matrix
//! whose (v, w) entry counts the edges from v to w; the count is either a
//! finite number or countably infinite. Every invariant computed by this
//! crate depends on the matrix alone, so edges have no individual identity.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Edge count for an ordered vertex pair: finite, or countably infinite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Multiplicity {
    Finite(u64),
    Infinite,
}

pub const INF: Multiplicity = Multiplicity::Infinite;

impl Multiplicity {
    pub fn finite(n: u64) -> Self {
        Multiplicity::Finite(n)
    }

    pub fn is_zero(self) -> bool {
        self == Multiplicity::Finite(0)
    }

    pub fn is_infinite(self) -> bool {
        self == Multiplicity::Infinite
    }

    /// Addition with INF absorbing. Finite overflow is an error rather than a wrap.
    pub fn checked_add(self, other: Multiplicity) -> Option<Multiplicity> {
        match (self, other) {
            (Multiplicity::Finite(a), Multiplicity::Finite(b)) => {
                a.checked_add(b).map(Multiplicity::Finite)
            }
            _ => Some(Multiplicity::Infinite),
        }
    }
}

impl fmt::Display for Multiplicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Multiplicity::Finite(n) => write!(f, "{n}"),
            Multiplicity::Infinite => write!(f, "inf"),
        }
    }
}

/// Subset of the vertices of a fixed graph, packed into a `u64`.
/// All set-valued computations in this crate are guarded by bounds well
/// below 64 vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct VertexSet(u64);

impl VertexSet {
    pub const EMPTY: VertexSet = VertexSet(0);

    pub fn full(n: usize) -> Self {
        assert!(n <= 64, "vertex sets support at most 64 vertices");
        if n == 64 {
            VertexSet(u64::MAX)
        } else {
            VertexSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(v: usize) -> Self {
        VertexSet(1u64 << v)
    }

    pub fn from_bits(bits: u64) -> Self {
        VertexSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn contains(self, v: usize) -> bool {
        self.0 >> v & 1 == 1
    }

    pub fn insert(self, v: usize) -> Self {
        VertexSet(self.0 | 1u64 << v)
    }

    pub fn remove(self, v: usize) -> Self {
        VertexSet(self.0 & !(1u64 << v))
    }

    pub fn union(self, other: VertexSet) -> Self {
        VertexSet(self.0 | other.0)
    }

    pub fn intersection(self, other: VertexSet) -> Self {
        VertexSet(self.0 & other.0)
    }

    pub fn difference(self, other: VertexSet) -> Self {
        VertexSet(self.0 & !other.0)
    }

    pub fn is_subset_of(self, other: VertexSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Ascending vertex indices.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let v = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(v)
            }
        })
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = VertexSet::EMPTY;
        for v in iter {
            s = s.insert(v);
        }
        s
    }
}

/// Positive-length path reachability plus its reflexive closure.
#[derive(Debug, Clone)]
pub struct Reachability {
    n: usize,
    pos: Vec<bool>,
}

impl Reachability {
    /// True iff there is a path of length ≥ 1 from `v` to `w`.
    pub fn pos(&self, v: usize, w: usize) -> bool {
        self.pos[v * self.n + w]
    }

    /// Reflexive reachability: a path of length ≥ 0.
    pub fn reach(&self, v: usize, w: usize) -> bool {
        v == w || self.pos(v, w)
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// Finite directed multigraph: ordered vertex labels and the multiplicity
/// matrix `mult[v][w]` = number of edges from v to w. Immutable after
/// construction; all operations are pure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    labels: Vec<String>,
    mult: Vec<Vec<Multiplicity>>,
}

impl Graph {
    pub fn new(labels: Vec<String>, mult: Vec<Vec<Multiplicity>>) -> Result<Graph> {
        let n = labels.len();
        if mult.len() != n || mult.iter().any(|row| row.len() != n) {
            return Err(Error::Internal(format!(
                "multiplicity matrix must be {n}x{n}"
            )));
        }
        let mut seen = HashMap::new();
        for (i, l) in labels.iter().enumerate() {
            if seen.insert(l.clone(), i).is_some() {
                return Err(Error::Parse {
                    line: 0,
                    msg: format!("duplicate vertex label {l}"),
                });
            }
        }
        Ok(Graph { labels, mult })
    }

    /// Edgeless graph on the given labels.
    pub fn edgeless(labels: &[&str]) -> Graph {
        let n = labels.len();
        Graph {
            labels: labels.iter().map(|s| s.to_string()).collect(),
            mult: vec![vec![Multiplicity::Finite(0); n]; n],
        }
    }

    pub fn with_edge(mut self, src: usize, dst: usize, m: Multiplicity) -> Graph {
        self.mult[src][dst] = m;
        self
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == name)
    }

    pub fn mult(&self, v: usize, w: usize) -> Multiplicity {
        self.mult[v][w]
    }

    /// The vertex matrix A: `A[v][w]` counts edges from v to w.
    pub fn vertex_matrix(&self) -> &Vec<Vec<Multiplicity>> {
        &self.mult
    }

    /// No outgoing edges.
    pub fn is_sink(&self, v: usize) -> bool {
        self.mult[v].iter().all(|m| m.is_zero())
    }

    /// Emits infinitely many edges.
    pub fn is_infinite_emitter(&self, v: usize) -> bool {
        self.mult[v].iter().any(|m| m.is_infinite())
    }

    /// Emits at least one and only finitely many edges.
    pub fn is_regular(&self, v: usize) -> bool {
        !self.is_sink(v) && !self.is_infinite_emitter(v)
    }

    pub fn sinks(&self) -> Vec<usize> {
        (0..self.n()).filter(|&v| self.is_sink(v)).collect()
    }

    pub fn infinite_emitters(&self) -> Vec<usize> {
        (0..self.n())
            .filter(|&v| self.is_infinite_emitter(v))
            .collect()
    }

    /// Vertices whose rows enter the restricted vertex matrix B, in
    /// declaration order. Rows are dropped for sinks and infinite emitters.
    pub fn regular_vertices(&self) -> Vec<usize> {
        (0..self.n()).filter(|&v| self.is_regular(v)).collect()
    }

    pub fn is_row_finite(&self) -> bool {
        self.infinite_emitters().is_empty()
    }

    /// Every entry is 0 or INF.
    pub fn is_amplified(&self) -> bool {
        self.mult
            .iter()
            .flatten()
            .all(|m| m.is_zero() || m.is_infinite())
    }

    /// Total edge count, INF absorbing.
    pub fn edge_count(&self) -> Multiplicity {
        let mut total = Multiplicity::Finite(0);
        for m in self.mult.iter().flatten() {
            total = total.checked_add(*m).unwrap_or(Multiplicity::Infinite);
        }
        total
    }

    /// Transitive closure of the positive-multiplicity adjacency relation.
    pub fn reachability(&self) -> Reachability {
        let n = self.n();
        let mut pos = vec![false; n * n];
        for v in 0..n {
            for w in 0..n {
                if !self.mult[v][w].is_zero() {
                    pos[v * n + w] = true;
                }
            }
        }
        for k in 0..n {
            for v in 0..n {
                if pos[v * n + k] {
                    for w in 0..n {
                        if pos[k * n + w] {
                            pos[v * n + w] = true;
                        }
                    }
                }
            }
        }
        Reachability { n, pos }
    }

    /// Restriction to the vertices in `s`; label order inherited.
    pub fn induced_subgraph(&self, s: VertexSet) -> Graph {
        let verts: Vec<usize> = s.iter().filter(|&v| v < self.n()).collect();
        let labels = verts.iter().map(|&v| self.labels[v].clone()).collect();
        let mult = verts
            .iter()
            .map(|&v| verts.iter().map(|&w| self.mult[v][w]).collect())
            .collect();
        Graph { labels, mult }
    }

    /// Graph with vertex at new position i being `order[i]` of `self`.
    /// `order` must be a permutation of 0..n.
    pub fn permuted(&self, order: &[usize]) -> Graph {
        assert_eq!(order.len(), self.n());
        let labels = order.iter().map(|&v| self.labels[v].clone()).collect();
        let mult = order
            .iter()
            .map(|&v| order.iter().map(|&w| self.mult[v][w]).collect())
            .collect();
        Graph { labels, mult }
    }

    /// Number of simple cycles based at `v`, saturated at `cap`. A simple
    /// cycle is a return path that does not revisit the base vertex before
    /// its end; parallel edges count as distinct cycles. The count is
    /// infinite (hence `cap`) exactly when some such path can detour through
    /// a cycle avoiding `v`, or crosses an INF edge.
    pub fn simple_cycle_count_at(&self, v: usize, cap: usize) -> usize {
        assert!(cap >= 1);
        let reach = self.reachability();
        if !reach.pos(v, v) {
            return 0;
        }
        // Intermediate vertices of return paths are exactly the rest of v's
        // strongly connected component. A cycle inside that component which
        // avoids v can be traversed any number of times, so the count
        // saturates immediately.
        let scc: VertexSet = (0..self.n())
            .filter(|&u| reach.pos(v, u) && reach.pos(u, v))
            .collect();
        let rest = scc.remove(v);
        let sub = self.induced_subgraph(rest);
        let sub_reach = sub.reachability();
        for u in 0..sub.n() {
            if sub_reach.pos(u, u) {
                return cap;
            }
        }
        // All simple cycles are now vertex-simple; enumerate them by DFS
        // with multiplicity products.
        let mut total = 0usize;
        let mut visited = VertexSet::singleton(v);
        self.count_return_paths(v, v, 1, cap, scc, &mut visited, &mut total);
        total.min(cap)
    }

    #[allow(clippy::too_many_arguments)]
    fn count_return_paths(
        &self,
        base: usize,
        at: usize,
        product: usize,
        cap: usize,
        scc: VertexSet,
        visited: &mut VertexSet,
        total: &mut usize,
    ) {
        if *total >= cap {
            return;
        }
        for w in 0..self.n() {
            let m = self.mult[at][w];
            if m.is_zero() {
                continue;
            }
            let step = match m {
                Multiplicity::Infinite => cap,
                Multiplicity::Finite(k) => (k as u128).min(cap as u128) as usize,
            };
            let p = (product as u128 * step as u128).min(cap as u128) as usize;
            if w == base {
                *total = (*total + p).min(cap);
                if *total >= cap {
                    return;
                }
            } else if scc.contains(w) && !visited.contains(w) {
                *visited = visited.insert(w);
                self.count_return_paths(base, w, p, cap, scc, visited, total);
                *visited = visited.remove(w);
            }
        }
    }

    /// Condition (K): no vertex is the base point of exactly one simple cycle.
    pub fn satisfies_condition_k(&self) -> bool {
        (0..self.n()).all(|v| self.simple_cycle_count_at(v, 2) != 1)
    }

    /// Parse the line-oriented text format described in the crate docs.
    pub fn parse(text: &str) -> Result<Graph> {
        let mut labels: Vec<String> = Vec::new();
        let mut seen: HashMap<String, usize> = HashMap::new();
        let mut edges: Vec<(usize, String, String, Multiplicity)> = Vec::new();

        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let content = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            };
            let mut tokens = content.split_whitespace();
            let Some(head) = tokens.next() else { continue };
            match head {
                "vertices" => {
                    for name in tokens {
                        if seen.contains_key(name) {
                            return Err(Error::Parse {
                                line,
                                msg: format!("duplicate vertex label {name}"),
                            });
                        }
                        seen.insert(name.to_string(), labels.len());
                        labels.push(name.to_string());
                    }
                }
                "edge" => {
                    let (Some(src), Some(dst), Some(m)) =
                        (tokens.next(), tokens.next(), tokens.next())
                    else {
                        return Err(Error::Parse {
                            line,
                            msg: "edge requires <src> <dst> <mult>".into(),
                        });
                    };
                    if tokens.next().is_some() {
                        return Err(Error::Parse {
                            line,
                            msg: "trailing tokens after edge declaration".into(),
                        });
                    }
                    let mult = if m == "inf" {
                        Multiplicity::Infinite
                    } else if m.starts_with('-') {
                        return Err(Error::Parse {
                            line,
                            msg: format!("negative multiplicity {m}"),
                        });
                    } else {
                        match m.parse::<u64>() {
                            Ok(k) => Multiplicity::Finite(k),
                            Err(_) => {
                                return Err(Error::Parse {
                                    line,
                                    msg: format!("invalid multiplicity {m}"),
                                })
                            }
                        }
                    };
                    edges.push((line, src.to_string(), dst.to_string(), mult));
                }
                other => {
                    return Err(Error::Parse {
                        line,
                        msg: format!("unknown directive {other}"),
                    });
                }
            }
        }

        let n = labels.len();
        let mut mult = vec![vec![Multiplicity::Finite(0); n]; n];
        for (line, src, dst, m) in edges {
            let Some(&s) = seen.get(&src) else {
                return Err(Error::Parse {
                    line,
                    msg: format!("undeclared vertex {src}"),
                });
            };
            let Some(&d) = seen.get(&dst) else {
                return Err(Error::Parse {
                    line,
                    msg: format!("undeclared vertex {dst}"),
                });
            };
            mult[s][d] = mult[s][d].checked_add(m).ok_or(Error::Parse {
                line,
                msg: "multiplicity overflow".into(),
            })?;
        }
        Ok(Graph { labels, mult })
    }

    /// Inverse of [`Graph::parse`]: vertices in order, then nonzero edges in
    /// row-major order.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        if self.n() > 0 {
            out.push_str("vertices");
            for l in &self.labels {
                out.push(' ');
                out.push_str(l);
            }
            out.push('\n');
        }
        for v in 0..self.n() {
            for w in 0..self.n() {
                let m = self.mult[v][w];
                if !m.is_zero() {
                    out.push_str(&format!(
                        "edge {} {} {}\n",
                        self.labels[v], self.labels[w], m
                    ));
                }
            }
        }
        out
    }

    /// GraphViz export with multiplicities as edge labels, `∞` for INF.
    pub fn to_dot(&self) -> String {
        fn quote(s: &str) -> String {
            format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
        }
        let mut out = String::from("digraph {\n");
        for l in &self.labels {
            out.push_str(&format!("  {};\n", quote(l)));
        }
        for v in 0..self.n() {
            for w in 0..self.n() {
                let m = self.mult[v][w];
                if !m.is_zero() {
                    let label = match m {
                        Multiplicity::Infinite => "∞".to_string(),
                        Multiplicity::Finite(k) => k.to_string(),
                    };
                    out.push_str(&format!(
                        "  {} -> {} [label=\"{}\"];\n",
                        quote(&self.labels[v]),
                        quote(&self.labels[w]),
                        label
                    ));
                }
            }
        }
        out.push_str("}\n");
        out
    }
}
