//! Exact classification of amplified graph algebras via canonical forms of
//! amplified transitive closures.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graph::{Graph, Multiplicity};
use crate::moves::amplified_transitive_closure;

/// Bit-matrix canonical form of the positive-length reachability relation:
/// the lexicographically minimal row-major flattening over all vertex
/// relabelings, with one witnessing placement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalAmplified {
    n: usize,
    /// Row-major bits, cell (i, j) at bit n²−1−(i·n+j), so numeric order is
    /// lexicographic order on the flattened matrix.
    bits: u128,
    /// order[i] = original vertex placed at canonical position i.
    order: Vec<usize>,
}

impl CanonicalAmplified {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bits(&self) -> u128 {
        self.bits
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn entry(&self, i: usize, j: usize) -> bool {
        let pos = self.n * self.n - 1 - (i * self.n + j);
        self.bits >> pos & 1 == 1
    }

    /// Row-major bits packed into bytes, high bit first.
    pub fn to_hex(&self) -> String {
        let total = self.n * self.n;
        let mut bytes = vec![0u8; total.div_ceil(8)];
        for k in 0..total {
            if self.bits >> (total - 1 - k) & 1 == 1 {
                bytes[k / 8] |= 0x80 >> (k % 8);
            }
        }
        bytes.iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn pack_relation(reach: &[bool], n: usize, order: &[usize]) -> u128 {
    let mut bits = 0u128;
    for i in 0..n {
        for j in 0..n {
            bits <<= 1;
            if reach[order[i] * n + order[j]] {
                bits |= 1;
            }
        }
    }
    bits
}

/// Canonical form of the reachability relation of `g`. Exhaustive over all
/// n! relabelings, so exact; `bound` guards the factorial blowup.
pub fn canonical_form(g: &Graph, bound: usize) -> Result<CanonicalAmplified> {
    let n = g.n();
    if n > bound {
        return Err(Error::BoundExceeded {
            what: "canonical form vertex count",
            limit: bound,
            actual: n,
        });
    }
    if n * n > 128 {
        return Err(Error::BoundExceeded {
            what: "canonical form bit width",
            limit: 11,
            actual: n,
        });
    }
    let reach = g.reachability();
    let flat: Vec<bool> = (0..n * n).map(|k| reach.pos(k / n, k % n)).collect();

    let mut order: Vec<usize> = (0..n).collect();
    let mut best_bits = pack_relation(&flat, n, &order);
    let mut best_order = order.clone();
    // Heap's algorithm over all permutations.
    let mut c = vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                order.swap(0, i);
            } else {
                order.swap(c[i], i);
            }
            let bits = pack_relation(&flat, n, &order);
            if bits < best_bits {
                best_bits = bits;
                best_order = order.clone();
            }
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }

    Ok(CanonicalAmplified {
        n,
        bits: best_bits,
        order: best_order,
    })
}

/// Exact digraph isomorphism on multiplicity matrices (INF matches only
/// INF). Returns a vertex map g1 → g2 when one exists.
pub fn digraph_isomorphic(g1: &Graph, g2: &Graph, bound: usize) -> Result<Option<Vec<usize>>> {
    let n = g1.n();
    if n.max(g2.n()) > bound {
        return Err(Error::BoundExceeded {
            what: "digraph isomorphism vertex count",
            limit: bound,
            actual: n.max(g2.n()),
        });
    }
    if n != g2.n() {
        return Ok(None);
    }

    // Per-vertex invariant: loop entry plus sorted out- and in-multiplicity
    // multisets. A valid assignment must match signatures.
    fn signature(g: &Graph, v: usize) -> (Multiplicity, Vec<Multiplicity>, Vec<Multiplicity>) {
        let mut out: Vec<Multiplicity> = (0..g.n()).map(|w| g.mult(v, w)).collect();
        let mut inc: Vec<Multiplicity> = (0..g.n()).map(|u| g.mult(u, v)).collect();
        out.sort_unstable();
        inc.sort_unstable();
        (g.mult(v, v), out, inc)
    }
    let sig1: Vec<_> = (0..n).map(|v| signature(g1, v)).collect();
    let sig2: Vec<_> = (0..n).map(|v| signature(g2, v)).collect();
    {
        let mut s1 = sig1.clone();
        let mut s2 = sig2.clone();
        s1.sort_unstable();
        s2.sort_unstable();
        if s1 != s2 {
            return Ok(None);
        }
    }

    fn search(
        g1: &Graph,
        g2: &Graph,
        sig1: &[(Multiplicity, Vec<Multiplicity>, Vec<Multiplicity>)],
        sig2: &[(Multiplicity, Vec<Multiplicity>, Vec<Multiplicity>)],
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        let v = map.len();
        if v == g1.n() {
            return true;
        }
        for w in 0..g2.n() {
            if used[w] || sig1[v] != sig2[w] {
                continue;
            }
            let ok = (0..v).all(|u| {
                g1.mult(u, v) == g2.mult(map[u], w) && g1.mult(v, u) == g2.mult(w, map[u])
            }) && g1.mult(v, v) == g2.mult(w, w);
            if ok {
                map.push(w);
                used[w] = true;
                if search(g1, g2, sig1, sig2, map, used) {
                    return true;
                }
                used[w] = false;
                map.pop();
            }
        }
        false
    }

    let mut map = Vec::new();
    let mut used = vec![false; n];
    if search(g1, g2, &sig1, &sig2, &mut map, &mut used) {
        Ok(Some(map))
    } else {
        Ok(None)
    }
}

/// Outcome of the amplified classification decision, which classifies the
/// Leavitt path algebras (and graph C*-algebras) of the amplifications of
/// the two inputs.
#[derive(Debug, Clone)]
pub struct AmplifiedDecision {
    pub isomorphic: bool,
    /// Vertex map g1 → g2 realizing the isomorphism of amplified transitive
    /// closures, when it exists.
    pub witness: Option<Vec<usize>>,
    pub canon1: CanonicalAmplified,
    pub canon2: CanonicalAmplified,
}

impl AmplifiedDecision {
    pub fn to_json(&self, g1: &Graph, g2: &Graph) -> Value {
        let witness: Value = match &self.witness {
            Some(map) => json!(map
                .iter()
                .enumerate()
                .map(|(v, &w)| json!([g1.label(v), g2.label(w)]))
                .collect::<Vec<_>>()),
            None => Value::Null,
        };
        json!({
            "isomorphic": self.isomorphic,
            "witness": witness,
            "canonical_forms": [self.canon1.to_hex(), self.canon2.to_hex()],
            "n": [self.canon1.n(), self.canon2.n()],
        })
    }
}

/// Decide whether the amplifications of g1 and g2 have isomorphic Leavitt
/// path algebras: true iff the amplified transitive closures are isomorphic
/// graphs, decided by canonical-form equality.
pub fn are_lpa_isomorphic_amplified(
    g1: &Graph,
    g2: &Graph,
    bound: usize,
) -> Result<AmplifiedDecision> {
    let canon1 = canonical_form(&amplified_transitive_closure(g1), bound)?;
    let canon2 = canonical_form(&amplified_transitive_closure(g2), bound)?;
    let isomorphic = canon1.n() == canon2.n() && canon1.bits() == canon2.bits();
    let witness = if isomorphic {
        // Position i holds canon1.order[i] of g1 and canon2.order[i] of g2.
        let mut map = vec![0usize; g1.n()];
        for i in 0..g1.n() {
            map[canon1.order()[i]] = canon2.order()[i];
        }
        Some(map)
    } else {
        None
    };
    Ok(AmplifiedDecision {
        isomorphic,
        witness,
        canon1,
        canon2,
    })
}
