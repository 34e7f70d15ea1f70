//! Hereditary and saturated vertex sets, and the lattice they form.
//!
//! A subset H of the vertices is hereditary when it is closed under
//! reachability, and saturated when it contains every regular vertex all of
//! whose edge targets lie in H. For graphs satisfying Condition (K) these
//! sets index the ideals of the associated algebras, so the lattice computed
//! here stands for the ideal lattice.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};

pub fn is_hereditary(g: &Graph, s: VertexSet) -> bool {
    let reach = g.reachability();
    s.iter()
        .all(|v| (0..g.n()).all(|w| !reach.pos(v, w) || s.contains(w)))
}

pub fn is_saturated(g: &Graph, s: VertexSet) -> bool {
    g.regular_vertices().iter().all(|&v| {
        let targets_in = (0..g.n()).all(|w| g.mult(v, w).is_zero() || s.contains(w));
        !targets_in || s.contains(v)
    })
}

/// Smallest hereditary superset of `s`: everything reachable from `s`.
pub fn hereditary_closure(g: &Graph, s: VertexSet) -> VertexSet {
    let reach = g.reachability();
    let mut out = s;
    for v in s.iter() {
        for w in 0..g.n() {
            if reach.pos(v, w) {
                out = out.insert(w);
            }
        }
    }
    out
}

/// Least fixpoint adding every regular vertex whose targets all lie in the
/// current set. Requires a hereditary input; the result is hereditary and
/// saturated.
pub fn saturation(g: &Graph, s: VertexSet) -> Result<VertexSet> {
    if !is_hereditary(g, s) {
        return Err(Error::NotHereditary);
    }
    let regulars = g.regular_vertices();
    let mut out = s;
    loop {
        let mut grew = false;
        for &v in &regulars {
            if out.contains(v) {
                continue;
            }
            let all_in = (0..g.n()).all(|w| g.mult(v, w).is_zero() || out.contains(w));
            if all_in {
                out = out.insert(v);
                grew = true;
            }
        }
        if !grew {
            return Ok(out);
        }
    }
}

/// Smallest saturated hereditary superset of an arbitrary set.
pub fn saturated_hereditary_closure(g: &Graph, s: VertexSet) -> VertexSet {
    saturation(g, hereditary_closure(g, s)).expect("hereditary closure is hereditary")
}

/// Precomputed reachability and regular-vertex data for the enumeration
/// fixpoint, which calls the closure operators quadratically often.
struct ClosureCtx<'a> {
    g: &'a Graph,
    reach: crate::graph::Reachability,
    regulars: Vec<usize>,
}

impl<'a> ClosureCtx<'a> {
    fn new(g: &'a Graph) -> Self {
        ClosureCtx {
            g,
            reach: g.reachability(),
            regulars: g.regular_vertices(),
        }
    }

    fn closure(&self, s: VertexSet) -> VertexSet {
        let mut out = s;
        for v in s.iter() {
            for w in 0..self.g.n() {
                if self.reach.pos(v, w) {
                    out = out.insert(w);
                }
            }
        }
        loop {
            let mut grew = false;
            for &v in &self.regulars {
                if out.contains(v) {
                    continue;
                }
                let all_in =
                    (0..self.g.n()).all(|w| self.g.mult(v, w).is_zero() || out.contains(w));
                if all_in {
                    out = out.insert(v);
                    grew = true;
                }
            }
            if !grew {
                return out;
            }
        }
    }
}

/// All saturated hereditary subsets with the cover relation of inclusion.
/// Elements are sorted by (cardinality, bits); index 0 is the bottom ∅ and
/// the last index is the top E⁰.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdealLattice {
    elements: Vec<VertexSet>,
    hasse: Vec<(usize, usize)>,
    condition_k: bool,
}

impl IdealLattice {
    pub fn elements(&self) -> &[VertexSet] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> VertexSet {
        self.elements[i]
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Cover pairs (lower, upper).
    pub fn hasse(&self) -> &[(usize, usize)] {
        &self.hasse
    }

    /// Whether the graph satisfies Condition (K); when false the lattice is
    /// still the lattice of saturated hereditary sets, but its identification
    /// with the ideal lattice is not guaranteed.
    pub fn condition_k(&self) -> bool {
        self.condition_k
    }

    pub fn bottom(&self) -> usize {
        0
    }

    pub fn top(&self) -> usize {
        self.elements.len() - 1
    }

    pub fn index_of(&self, s: VertexSet) -> Option<usize> {
        self.elements
            .binary_search_by_key(&(s.len(), s.bits()), |e| (e.len(), e.bits()))
            .ok()
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.elements[a].is_subset_of(self.elements[b])
    }

    /// Meet is intersection; the intersection of saturated hereditary sets
    /// is again saturated hereditary.
    pub fn meet(&self, a: usize, b: usize) -> usize {
        let s = self.elements[a].intersection(self.elements[b]);
        self.index_of(s).expect("lattice closed under meet")
    }

    /// Join is the saturated hereditary closure of the union.
    pub fn join(&self, g: &Graph, a: usize, b: usize) -> usize {
        let s = saturated_hereditary_closure(g, self.elements[a].union(self.elements[b]));
        self.index_of(s).expect("lattice closed under join")
    }

    pub fn to_json(&self, g: &Graph) -> Value {
        let elements: Vec<Value> = self
            .elements
            .iter()
            .map(|e| {
                let mut labels: Vec<&str> = e.iter().map(|v| g.label(v)).collect();
                labels.sort_unstable();
                json!(labels)
            })
            .collect();
        let hasse: Vec<Value> = self.hasse.iter().map(|&(a, b)| json!([a, b])).collect();
        json!({
            "elements": elements,
            "hasse": hasse,
            "flags": { "conditionK": self.condition_k },
        })
    }
}

/// Enumerate the lattice of saturated hereditary subsets.
///
/// Seeds the family with ∅, E⁰ and the closures of all singletons, then
/// closes under join and meet to a fixpoint. Every saturated hereditary set
/// is the join of the singleton closures of its members, so the family is
/// complete; the brute-force filter over all 2ⁿ subsets doubles as the test
/// oracle at small sizes.
pub fn enumerate_lattice(g: &Graph, bound: usize) -> Result<IdealLattice> {
    if g.n() > bound {
        return Err(Error::BoundExceeded {
            what: "lattice enumeration vertex count",
            limit: bound,
            actual: g.n(),
        });
    }

    let ctx = ClosureCtx::new(g);
    let mut family: Vec<VertexSet> = Vec::new();
    let mut seen: std::collections::HashSet<u64> = std::collections::HashSet::new();
    let mut insert = |family: &mut Vec<VertexSet>, s: VertexSet| {
        if seen.insert(s.bits()) {
            family.push(s);
        }
    };

    insert(&mut family, VertexSet::EMPTY);
    insert(&mut family, ctx.closure(VertexSet::EMPTY));
    insert(&mut family, VertexSet::full(g.n()));
    for v in 0..g.n() {
        insert(&mut family, ctx.closure(VertexSet::singleton(v)));
    }

    let mut frontier = 0;
    while frontier < family.len() {
        let s = family[frontier];
        frontier += 1;
        for i in 0..frontier {
            let t = family[i];
            let join = ctx.closure(s.union(t));
            insert(&mut family, join);
            let meet = s.intersection(t);
            insert(&mut family, meet);
        }
    }

    family.sort_by_key(|e| (e.len(), e.bits()));

    // Cover relation: for each upper element, the maximal proper subsets
    // within the family.
    let mut hasse = Vec::new();
    for (bi, &b) in family.iter().enumerate() {
        let below: Vec<usize> = (0..bi)
            .filter(|&ai| family[ai] != b && family[ai].is_subset_of(b))
            .collect();
        for &ai in &below {
            let a = family[ai];
            let covered = below
                .iter()
                .any(|&ci| ci != ai && a.is_subset_of(family[ci]) && family[ci] != a);
            if !covered {
                hasse.push((ai, bi));
            }
        }
    }

    Ok(IdealLattice {
        elements: family,
        hasse,
        condition_k: g.satisfies_condition_k(),
    })
}
