//! Graph moves that preserve the associated algebras up to isomorphism.
//!
//! Moves act on multiplicity matrices; adding countably many parallel edges
//! means setting an entry to INF.

use crate::error::{Error, Result};
use crate::graph::{Graph, Multiplicity};

/// Replace every positive multiplicity by INF.
pub fn amplify(g: &Graph) -> Graph {
    let n = g.n();
    let mut out = g.clone();
    for v in 0..n {
        for w in 0..n {
            if !g.mult(v, w).is_zero() {
                out = out.with_edge(v, w, Multiplicity::Infinite);
            }
        }
    }
    out
}

/// Add a single edge wherever a positive-length path exists but no edge does.
pub fn transitive_closure_graph(g: &Graph) -> Graph {
    let reach = g.reachability();
    let mut out = g.clone();
    for v in 0..g.n() {
        for w in 0..g.n() {
            if g.mult(v, w).is_zero() && reach.pos(v, w) {
                out = out.with_edge(v, w, Multiplicity::Finite(1));
            }
        }
    }
    out
}

/// INF wherever a positive-length path exists, zero elsewhere. Equals
/// `amplify(transitive_closure_graph(g))`.
pub fn amplified_transitive_closure(g: &Graph) -> Graph {
    let reach = g.reachability();
    let n = g.n();
    let mut out = Graph::new(
        g.labels().to_vec(),
        vec![vec![Multiplicity::Finite(0); n]; n],
    )
    .expect("labels already validated");
    for v in 0..n {
        for w in 0..n {
            if reach.pos(v, w) {
                out = out.with_edge(v, w, Multiplicity::Infinite);
            }
        }
    }
    out
}

/// Add countably many parallel edges along the path `v₀ … v_k`, provided the
/// first step already has infinitely many parallel edges. The result has
/// `m[v₀][v_k] = INF` and is otherwise unchanged.
pub fn move_t(g: &Graph, path: &[usize]) -> Result<Graph> {
    if path.len() < 2 {
        return Err(Error::MoveHypothesis(
            "path must have at least one edge".into(),
        ));
    }
    for pair in path.windows(2) {
        if g.mult(pair[0], pair[1]).is_zero() {
            return Err(Error::MoveHypothesis(format!(
                "no edge from {} to {}",
                g.label(pair[0]),
                g.label(pair[1])
            )));
        }
    }
    if !g.mult(path[0], path[1]).is_infinite() {
        return Err(Error::MoveHypothesis(format!(
            "first edge {} -> {} has only finitely many parallels",
            g.label(path[0]),
            g.label(path[1])
        )));
    }
    Ok(g.clone()
        .with_edge(path[0], path[path.len() - 1], Multiplicity::Infinite))
}

/// Delete a vertex with no incoming edges.
pub fn remove_source(g: &Graph, v: usize) -> Result<Graph> {
    if (0..g.n()).any(|u| !g.mult(u, v).is_zero()) {
        return Err(Error::NotASource(g.label(v).to_string()));
    }
    let keep: crate::graph::VertexSet = (0..g.n()).filter(|&u| u != v).collect();
    Ok(g.induced_subgraph(keep))
}
