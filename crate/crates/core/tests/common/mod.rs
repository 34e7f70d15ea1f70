//! Shared oracles and generators for the integration suites. Oracles here
//! are deliberately independent of the library implementation paths they
//! check: cycle counting by saturated walk DP, lattice enumeration by
//! filtering all subsets, group orders by fraction-free determinants.

#![allow(dead_code)]

use kweb_core::graph::{Graph, Multiplicity, VertexSet};
use kweb_core::lattice::{is_hereditary, is_saturated};
use rand::Rng;

/// Saturated count of simple cycles based at `v`: return walks that avoid
/// `v` internally, counted as edge sequences up to length cap·(n+1), with
/// multiplicity products. If at least `cap` simple cycles exist, `cap` of
/// them fit under that length bound, so the saturated count is exact.
pub fn oracle_simple_cycle_count(g: &Graph, v: usize, cap: usize) -> usize {
    let n = g.n();
    if n == 0 {
        return 0;
    }
    let sat = |x: u128| -> usize { x.min(cap as u128) as usize };
    let mult = |a: usize, b: usize| -> usize {
        match g.mult(a, b) {
            Multiplicity::Finite(k) => sat(k as u128),
            Multiplicity::Infinite => cap,
        }
    };
    let max_len = cap * (n + 1);

    // f[w] = saturated number of walks v -> w of the current length that
    // avoid v at intermediate steps.
    let mut total = mult(v, v);
    let mut f: Vec<usize> = (0..n)
        .map(|w| if w == v { 0 } else { mult(v, w) })
        .collect();
    for _ in 2..=max_len {
        if total >= cap {
            return cap;
        }
        let closing: u128 = (0..n)
            .filter(|&u| u != v)
            .map(|u| f[u] as u128 * mult(u, v) as u128)
            .sum();
        total = sat(total as u128 + closing);
        f = (0..n)
            .map(|w| {
                if w == v {
                    0
                } else {
                    sat((0..n)
                        .filter(|&u| u != v)
                        .map(|u| f[u] as u128 * mult(u, w) as u128)
                        .sum())
                }
            })
            .collect();
    }
    total.min(cap)
}

pub fn oracle_condition_k(g: &Graph) -> bool {
    (0..g.n()).all(|v| oracle_simple_cycle_count(g, v, 2) != 1)
}

/// All saturated hereditary subsets by filtering every subset against the
/// defining predicates, sorted like the library lattice.
pub fn oracle_lattice(g: &Graph) -> Vec<VertexSet> {
    assert!(g.n() <= 16, "oracle filter is exponential");
    let mut out: Vec<VertexSet> = (0u64..1 << g.n())
        .map(VertexSet::from_bits)
        .filter(|&s| is_hereditary(g, s) && is_saturated(g, s))
        .collect();
    out.sort_by_key(|e| (e.len(), e.bits()));
    out
}

fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("v{i}")).collect()
}

/// Random graph with finite multiplicities in 1..=max_mult.
pub fn random_finite_graph(rng: &mut impl Rng, n: usize, density: f64, max_mult: u64) -> Graph {
    let mut mult = vec![vec![Multiplicity::Finite(0); n]; n];
    for row in mult.iter_mut() {
        for entry in row.iter_mut() {
            if rng.gen_bool(density) {
                *entry = Multiplicity::Finite(rng.gen_range(1..=max_mult));
            }
        }
    }
    Graph::new(labels(n), mult).unwrap()
}

/// Random graph where each present edge is INF with probability `inf_prob`.
pub fn random_mixed_graph(
    rng: &mut impl Rng,
    n: usize,
    density: f64,
    max_mult: u64,
    inf_prob: f64,
) -> Graph {
    let mut mult = vec![vec![Multiplicity::Finite(0); n]; n];
    for row in mult.iter_mut() {
        for entry in row.iter_mut() {
            if rng.gen_bool(density) {
                *entry = if rng.gen_bool(inf_prob) {
                    Multiplicity::Infinite
                } else {
                    Multiplicity::Finite(rng.gen_range(1..=max_mult))
                };
            }
        }
    }
    Graph::new(labels(n), mult).unwrap()
}

/// Uniformly random permutation of 0..n.
pub fn random_permutation(rng: &mut impl Rng, n: usize) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        perm.swap(i, j);
    }
    perm
}
