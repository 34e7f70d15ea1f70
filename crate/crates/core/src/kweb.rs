//! The ideal-related K-theory invariant: K₀/K₁ of every subquotient indexed
//! by lattice pairs, six-term exact sequences for every triple, vertex and
//! unit classes, and the comparison of two such invariants.
//!
//! For a subquotient pair H₁ ⊆ H₂ the carrier is the induced subgraph on
//! D = H₂∖H₁. With B the vertex matrix restricted to the rows of carrier-
//! regular vertices, K₀ = coker(1 − Bᵗ) and K₁ = ker(1 − Bᵗ), with the
//! class of each vertex mapping to its standard basis vector. For a triple
//! H₁ ⊆ H₂ ⊆ H₃ the presentation of the middle is block triangular because
//! D₂ is hereditary inside D₃; ι and π are coordinate inclusion and
//! projection, the index map ∂ lifts a kernel element of the quotient block
//! and reads it in the cokernel of the sub block, and the exponential map is
//! zero. Exactness at all six nodes is verified at build time.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use crate::classify::are_lpa_isomorphic_amplified;
use crate::config::Config;
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::lattice::{enumerate_lattice, IdealLattice};
use crate::zmod::{
    groups_isomorphic, is_exact_at, iso_with_element, kernel_of, ElementIso, FgAbelianGroup,
    GroupHom, IntMatrix, LinearSystem,
};

/// K-theory data of one subquotient.
#[derive(Debug, Clone)]
pub struct KGroups {
    k0: FgAbelianGroup,
    k1: FgAbelianGroup,
    k1_basis: IntMatrix,
    presentation: IntMatrix,
    /// Vertices of H₂∖H₁ in declaration order (ambient generators of K₀).
    carrier: Vec<usize>,
    /// Carrier-regular vertices, one presentation column each.
    columns: Vec<usize>,
}

impl KGroups {
    pub fn k0(&self) -> &FgAbelianGroup {
        &self.k0
    }

    pub fn k1(&self) -> &FgAbelianGroup {
        &self.k1
    }

    pub fn k1_basis(&self) -> &IntMatrix {
        &self.k1_basis
    }

    pub fn presentation(&self) -> &IntMatrix {
        &self.presentation
    }

    pub fn carrier(&self) -> &[usize] {
        &self.carrier
    }

    pub fn columns(&self) -> &[usize] {
        &self.columns
    }

    /// K₀ class of a carrier vertex: its standard basis vector.
    pub fn vertex_class(&self, v: usize) -> Option<Vec<BigInt>> {
        let pos = self.carrier.iter().position(|&u| u == v)?;
        Some(crate::zmod::basis_vec(self.carrier.len(), pos))
    }

    /// Sum of all vertex classes; for the pair (∅, E⁰) this is the class of
    /// the identity.
    pub fn unit_class(&self) -> Vec<BigInt> {
        vec![BigInt::from(1); self.carrier.len()]
    }

    pub fn to_json(&self) -> Value {
        let torsion: Vec<String> = self.k0.torsion().iter().map(|d| d.to_string()).collect();
        let unit: Vec<String> = self
            .k0
            .canonical_coords(&self.unit_class())
            .iter()
            .map(|c| c.to_string())
            .collect();
        json!({
            "free_rank": self.k0.free_rank(),
            "torsion": torsion,
            "unit_class": unit,
            "k1_rank": self.k1.free_rank(),
        })
    }
}

fn k_groups_from_parts(g: &Graph, carrier: Vec<usize>, columns: Vec<usize>) -> KGroups {
    let pos_of = |v: usize| carrier.binary_search(&v).expect("column vertex in carrier");
    let presentation = IntMatrix::from_fn(carrier.len(), columns.len(), |row, col| {
        let w = carrier[row];
        let v = columns[col];
        let a_vw = match g.mult(v, w) {
            crate::graph::Multiplicity::Finite(k) => BigInt::from(k),
            crate::graph::Multiplicity::Infinite => {
                unreachable!("presentation columns are regular vertices")
            }
        };
        let delta = if pos_of(v) == row {
            BigInt::from(1)
        } else {
            BigInt::zero()
        };
        delta - a_vw
    });
    let k0 = FgAbelianGroup::cokernel(&presentation);
    let (k1, k1_basis) = kernel_of(&presentation);
    KGroups {
        k0,
        k1,
        k1_basis,
        presentation,
        carrier,
        columns,
    }
}

/// K-groups of the subquotient indexed by lattice elements H₁ ⊆ H₂.
pub fn k_groups_of_pair(
    g: &Graph,
    lattice: &IdealLattice,
    h1: usize,
    h2: usize,
) -> Result<KGroups> {
    if h1 >= lattice.len() || h2 >= lattice.len() || !lattice.leq(h1, h2) {
        return Err(Error::InvalidKey(format!("({h1}, {h2})")));
    }
    let d = lattice.element(h2).difference(lattice.element(h1));
    Ok(k_groups_for_set(g, d))
}

fn k_groups_for_set(g: &Graph, d: VertexSet) -> KGroups {
    let carrier: Vec<usize> = d.iter().collect();
    let sub = g.induced_subgraph(d);
    let columns: Vec<usize> = carrier
        .iter()
        .enumerate()
        .filter(|&(local, _)| sub.is_regular(local))
        .map(|(_, &v)| v)
        .collect();
    k_groups_from_parts(g, carrier, columns)
}

/// The six maps of one ideal triple, in the cyclic order
/// K₀(sub) →ι K₀(mid) →π K₀(quot) →δ₀ K₁(sub) →ι K₁(mid) →π K₁(quot) →δ₁ K₀(sub).
#[derive(Debug, Clone)]
pub struct SixTerm {
    pub triple: (usize, usize, usize),
    pub iota0: GroupHom,
    pub pi0: GroupHom,
    /// Exponential map K₀(quot) → K₁(sub); zero for graph algebras.
    pub delta0: GroupHom,
    pub iota1: GroupHom,
    pub pi1: GroupHom,
    /// Index map K₁(quot) → K₀(sub).
    pub delta1: GroupHom,
}

impl SixTerm {
    pub fn to_json(&self) -> Value {
        json!({
            "iota0": self.iota0.matrix().to_json(),
            "pi0": self.pi0.matrix().to_json(),
            "delta0": self.delta0.matrix().to_json(),
            "iota1": self.iota1.matrix().to_json(),
            "pi1": self.pi1.matrix().to_json(),
            "delta1": self.delta1.matrix().to_json(),
        })
    }
}

fn make_six_term(
    g: &Graph,
    lattice: &IdealLattice,
    (h1, h2, h3): (usize, usize, usize),
    sub: &KGroups,
    mid: &KGroups,
    quot_pair: &KGroups,
    strict: bool,
) -> Result<(SixTerm, bool)> {
    let dq = lattice.element(h3).difference(lattice.element(h2));
    let mid_cols_in_dq: Vec<usize> = mid
        .columns
        .iter()
        .copied()
        .filter(|&v| dq.contains(v))
        .collect();
    let compatible = mid_cols_in_dq == quot_pair.columns;
    // The sub side can never disagree: a D₂ vertex has the same targets in
    // both carriers because H₂ is hereditary.
    debug_assert_eq!(
        mid.columns
            .iter()
            .copied()
            .filter(|v| lattice.element(h2).contains(*v))
            .collect::<Vec<_>>(),
        sub.columns
    );

    let quot: KGroups = if compatible {
        quot_pair.clone()
    } else {
        if strict {
            let offender = mid_cols_in_dq
                .iter()
                .find(|v| !quot_pair.columns.contains(v))
                .or_else(|| {
                    quot_pair
                        .columns
                        .iter()
                        .find(|v| !mid_cols_in_dq.contains(v))
                })
                .copied()
                .unwrap_or(0);
            return Err(Error::ConventionViolation {
                vertex: g.label(offender).to_string(),
            });
        }
        // Mixed non-row-finite input: present the quotient with the columns
        // the middle carrier sees, which restores the block structure.
        k_groups_from_parts(g, quot_pair.carrier.clone(), mid_cols_in_dq)
    };

    let mid_pos = |v: usize| {
        mid.carrier
            .binary_search(&v)
            .expect("vertex in mid carrier")
    };

    // iota0: coordinate inclusion of D2 into D3.
    let iota0_m = IntMatrix::from_fn(mid.carrier.len(), sub.carrier.len(), |i, j| {
        if mid_pos(sub.carrier[j]) == i {
            BigInt::from(1)
        } else {
            BigInt::zero()
        }
    });
    let iota0 = GroupHom::new(sub.k0.clone(), mid.k0.clone(), iota0_m)?;

    // pi0: coordinate projection of D3 onto Dq.
    let pi0_m = IntMatrix::from_fn(quot.carrier.len(), mid.carrier.len(), |i, j| {
        let w = mid.carrier[j];
        match quot.carrier.binary_search(&w) {
            Ok(pos) if pos == i => BigInt::from(1),
            _ => BigInt::zero(),
        }
    });
    let pi0 = GroupHom::new(mid.k0.clone(), quot.k0.clone(), pi0_m)?;

    let delta0 = GroupHom::zero(quot.k0.clone(), sub.k1.clone());

    // iota1: kernel vectors over the D2 columns extend by zero.
    let mid_kernel = LinearSystem::new(&mid.k1_basis);
    let mut iota1_m = IntMatrix::zero(mid.k1.ngens(), sub.k1.ngens());
    for j in 0..sub.k1.ngens() {
        let mut embedded = vec![BigInt::zero(); mid.columns.len()];
        for (row, &v) in sub.columns.iter().enumerate() {
            let pos = mid
                .columns
                .binary_search(&v)
                .expect("sub column is a mid column");
            embedded[pos] = sub.k1_basis.get(row, j).clone();
        }
        let z = mid_kernel
            .solve(&embedded)
            .ok_or_else(|| Error::Internal("kernel inclusion not solvable".into()))?;
        for (i, v) in z.into_iter().enumerate() {
            iota1_m.set(i, j, v);
        }
    }
    let iota1 = GroupHom::new(sub.k1.clone(), mid.k1.clone(), iota1_m)?;

    // pi1: restrict kernel coefficients to the quotient columns.
    let quot_kernel = LinearSystem::new(&quot.k1_basis);
    let mut pi1_m = IntMatrix::zero(quot.k1.ngens(), mid.k1.ngens());
    for j in 0..mid.k1.ngens() {
        let mut restricted = vec![BigInt::zero(); quot.columns.len()];
        for (pos, &u) in quot.columns.iter().enumerate() {
            let row = mid
                .columns
                .binary_search(&u)
                .expect("quot column is a mid column");
            restricted[pos] = mid.k1_basis.get(row, j).clone();
        }
        let z = quot_kernel
            .solve(&restricted)
            .ok_or_else(|| Error::Internal("kernel restriction not solvable".into()))?;
        for (i, v) in z.into_iter().enumerate() {
            pi1_m.set(i, j, v);
        }
    }
    let pi1 = GroupHom::new(mid.k1.clone(), quot.k1.clone(), pi1_m)?;

    // delta1 (index map): lift a quotient kernel vector into the middle
    // columns, push through the middle presentation, and read the D2 rows
    // in coker of the sub presentation.
    let mut delta1_m = IntMatrix::zero(sub.k0.ngens(), quot.k1.ngens());
    for j in 0..quot.k1.ngens() {
        let mut lifted = vec![BigInt::zero(); mid.columns.len()];
        for (pos, &u) in quot.columns.iter().enumerate() {
            let row = mid.columns.binary_search(&u).expect("column present");
            lifted[row] = quot.k1_basis.get(pos, j).clone();
        }
        let pushed = mid.presentation.mul_vec(&lifted);
        for (i, &v) in sub.carrier.iter().enumerate() {
            delta1_m.set(i, j, pushed[mid_pos(v)].clone());
        }
        // The Dq rows vanish because the lift was a kernel vector there.
        debug_assert!(quot.carrier.iter().all(|&u| pushed[mid_pos(u)].is_zero()));
    }
    let delta1 = GroupHom::new(quot.k1.clone(), sub.k0.clone(), delta1_m)?;

    Ok((
        SixTerm {
            triple: (h1, h2, h3),
            iota0,
            pi0,
            delta0,
            iota1,
            pi1,
            delta1,
        },
        compatible,
    ))
}

/// Exactness at all six nodes plus vanishing of the three composites, in
/// both degrees. Failure is an internal error: the sequence must never be
/// emitted in that state.
pub fn verify_six_term(st: &SixTerm) -> Result<()> {
    let nodes: [(&GroupHom, &GroupHom, &str); 6] = [
        (&st.iota0, &st.pi0, "K0(mid)"),
        (&st.pi0, &st.delta0, "K0(quot)"),
        (&st.delta0, &st.iota1, "K1(sub)"),
        (&st.iota1, &st.pi1, "K1(mid)"),
        (&st.pi1, &st.delta1, "K1(quot)"),
        (&st.delta1, &st.iota0, "K0(sub)"),
    ];
    for (f, g, name) in nodes {
        if !is_exact_at(f, g)? {
            return Err(Error::Internal(format!(
                "six-term sequence not exact at {name} for triple {:?}",
                st.triple
            )));
        }
        if !g.compose(f)?.is_zero_hom() {
            return Err(Error::Internal(format!(
                "six-term composite through {name} is nonzero for triple {:?}",
                st.triple
            )));
        }
    }
    Ok(())
}

/// Build and verify the six-term exact sequence of one lattice triple.
pub fn six_term(
    g: &Graph,
    lattice: &IdealLattice,
    h1: usize,
    h2: usize,
    h3: usize,
    strict: bool,
) -> Result<SixTerm> {
    if !(lattice.leq(h1, h2) && lattice.leq(h2, h3)) {
        return Err(Error::InvalidKey(format!("({h1}, {h2}, {h3})")));
    }
    let sub = k_groups_of_pair(g, lattice, h1, h2)?;
    let mid = k_groups_of_pair(g, lattice, h1, h3)?;
    let quot = k_groups_of_pair(g, lattice, h2, h3)?;
    let (st, _) = make_six_term(g, lattice, (h1, h2, h3), &sub, &mid, &quot, strict)?;
    verify_six_term(&st)?;
    Ok(st)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KWebMetadata {
    pub condition_k: bool,
    pub row_finite: bool,
    pub amplified: bool,
    /// True when the regular-row convention is known correct for the input
    /// (row-finite or amplified) and no triple needed a convention repair.
    pub convention_verified: bool,
}

/// The whole invariant: lattice, K-groups of every pair, six-term sequence
/// of every triple.
#[derive(Debug, Clone)]
pub struct KWeb {
    graph: Graph,
    lattice: IdealLattice,
    groups: BTreeMap<(usize, usize), KGroups>,
    sequences: BTreeMap<(usize, usize, usize), SixTerm>,
    metadata: KWebMetadata,
}

impl KWeb {
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn lattice(&self) -> &IdealLattice {
        &self.lattice
    }

    pub fn groups(&self) -> &BTreeMap<(usize, usize), KGroups> {
        &self.groups
    }

    pub fn sequences(&self) -> &BTreeMap<(usize, usize, usize), SixTerm> {
        &self.sequences
    }

    pub fn metadata(&self) -> KWebMetadata {
        self.metadata
    }

    fn set_label(&self, i: usize) -> String {
        let mut labels: Vec<&str> = self
            .lattice
            .element(i)
            .iter()
            .map(|v| self.graph.label(v))
            .collect();
        labels.sort_unstable();
        format!("{{{}}}", labels.join(","))
    }

    /// JSON emission. Group entries cover the proper pairs plus the
    /// (bottom, top) pair carrying the unit class; sequences cover the
    /// strict triples.
    pub fn to_json(&self) -> Value {
        let mut groups = serde_json::Map::new();
        for (&(a, b), kg) in &self.groups {
            let proper = a != b;
            let unital_pair = a == self.lattice.bottom() && b == self.lattice.top();
            if proper || unital_pair {
                let key = format!("{}|{}", self.set_label(a), self.set_label(b));
                groups.insert(key, kg.to_json());
            }
        }
        let mut sequences = serde_json::Map::new();
        for (&(a, b, c), st) in &self.sequences {
            if a != b && b != c {
                let key = format!(
                    "{}|{}|{}",
                    self.set_label(a),
                    self.set_label(b),
                    self.set_label(c)
                );
                sequences.insert(key, st.to_json());
            }
        }
        json!({
            "lattice": self.lattice.to_json(&self.graph),
            "groups": Value::Object(groups),
            "sequences": Value::Object(sequences),
            "metadata": {
                "conditionK": self.metadata.condition_k,
                "rowFinite": self.metadata.row_finite,
                "amplified": self.metadata.amplified,
                "conventionVerified": self.metadata.convention_verified,
            },
        })
    }
}

/// Compute the full invariant, verifying every six-term sequence.
pub fn build_kweb(g: &Graph, config: &Config) -> Result<KWeb> {
    if g.n() > config.max_vertices {
        return Err(Error::BoundExceeded {
            what: "kweb vertex count",
            limit: config.max_vertices,
            actual: g.n(),
        });
    }
    let lattice = enumerate_lattice(g, config.lattice_enum_bound)?;
    if config.strict_condition_k && !lattice.condition_k() {
        return Err(Error::ConditionK);
    }

    let row_finite = g.is_row_finite();
    let amplified = g.is_amplified();
    let mut convention_verified = row_finite || amplified;

    let m = lattice.len();
    let mut groups = BTreeMap::new();
    for a in 0..m {
        for b in 0..m {
            if lattice.leq(a, b) {
                groups.insert((a, b), k_groups_of_pair(g, &lattice, a, b)?);
            }
        }
    }

    let mut sequences = BTreeMap::new();
    for a in 0..m {
        for b in 0..m {
            if !lattice.leq(a, b) {
                continue;
            }
            for c in 0..m {
                if !lattice.leq(b, c) {
                    continue;
                }
                let (st, compatible) = make_six_term(
                    g,
                    &lattice,
                    (a, b, c),
                    &groups[&(a, b)],
                    &groups[&(a, c)],
                    &groups[&(b, c)],
                    config.strict_condition_k,
                )?;
                if !compatible {
                    convention_verified = false;
                }
                verify_six_term(&st)?;
                sequences.insert((a, b, c), st);
            }
        }
    }

    let condition_k = lattice.condition_k();
    Ok(KWeb {
        graph: g.clone(),
        lattice,
        groups,
        sequences,
        metadata: KWebMetadata {
            condition_k,
            row_finite,
            amplified,
            convention_verified,
        },
    })
}

/// Positive-cone membership outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Positivity {
    /// A nonnegative lift exists.
    Positive,
    /// The search is complete and no nonnegative lift exists.
    NotPositive,
    /// Bounded search exhausted without an answer.
    Unknown,
}

/// Decide whether a K₀ element lies in the cone generated by the vertex
/// classes: search for a relation combination making some representative
/// componentwise nonnegative. When the relation image is zero the answer is
/// complete; otherwise the search examines at most `bound` coefficient
/// vectors and may return Unknown.
pub fn is_positive(kg: &KGroups, x: &[BigInt], bound: usize) -> Positivity {
    assert_eq!(x.len(), kg.k0.ngens());
    let rels = &kg.presentation;
    if rels.is_zero() {
        return if x.iter().all(|v| !v.is_negative()) {
            Positivity::Positive
        } else {
            Positivity::NotPositive
        };
    }
    let k = rels.cols();
    let mut examined = 0usize;
    let mut shell: i64 = 0;
    loop {
        let mut z = vec![-shell; k];
        loop {
            // Skip the interior of the box; it was covered by smaller shells.
            if shell == 0 || z.iter().any(|&c| c.abs() == shell) {
                examined += 1;
                if examined > bound {
                    return Positivity::Unknown;
                }
                let zb: Vec<BigInt> = z.iter().map(|&c| BigInt::from(c)).collect();
                let shifted = rels.mul_vec(&zb);
                let nonneg = x.iter().zip(&shifted).all(|(a, b)| !(a + b).is_negative());
                if nonneg {
                    return Positivity::Positive;
                }
            }
            let mut pos = 0;
            loop {
                if pos == k {
                    break;
                }
                z[pos] += 1;
                if z[pos] <= shell {
                    break;
                }
                z[pos] = -shell;
                pos += 1;
            }
            if pos == k {
                break;
            }
        }
        shell += 1;
    }
}

/// Compare options; bounds come from [`Config`].
#[derive(Debug, Clone)]
pub struct CompareOptions {
    pub require_unit: bool,
    pub iso_search_bound: usize,
    pub classify_bound: usize,
    /// Run the lattice-isomorphism comparator even when both inputs are
    /// amplified, instead of the exact classification. Diagnostic only: the
    /// general path reports Consistent/Distinguished, never the exact
    /// amplified verdicts.
    pub force_general: bool,
}

impl Default for CompareOptions {
    fn default() -> Self {
        CompareOptions {
            require_unit: false,
            iso_search_bound: 10,
            classify_bound: 10,
            force_general: false,
        }
    }
}

/// Comparator outcome.
#[derive(Debug, Clone)]
pub enum Verdict {
    /// The invariants differ; `witness` describes the first mismatch.
    Distinguished {
        witness: String,
    },
    /// A lattice isomorphism matching all per-pair groups was found.
    /// Naturality of the connecting squares is not verified; the verdict is
    /// consistency, not a proven isomorphism.
    Consistent {
        lattice_iso: Vec<usize>,
        pairs_checked: usize,
        unit_matched: Option<bool>,
    },
    /// Exact decision for amplified inputs.
    AmplifiedIsomorphic {
        bijection: Vec<usize>,
    },
    AmplifiedNonIsomorphic,
}

impl Verdict {
    pub fn category(&self) -> &'static str {
        match self {
            Verdict::Distinguished { .. } => "Distinguished",
            Verdict::Consistent { .. } => "Consistent",
            Verdict::AmplifiedIsomorphic { .. } => "AmplifiedIsomorphic",
            Verdict::AmplifiedNonIsomorphic => "AmplifiedNonIsomorphic",
        }
    }

    /// True for the verdicts that distinguish the inputs (CLI exit code 1).
    pub fn is_negative(&self) -> bool {
        matches!(
            self,
            Verdict::Distinguished { .. } | Verdict::AmplifiedNonIsomorphic
        )
    }

    pub fn to_json(&self, g1: &Graph, g2: &Graph) -> Value {
        match self {
            Verdict::Distinguished { witness } => json!({
                "verdict": "Distinguished",
                "witness": witness,
            }),
            Verdict::Consistent {
                lattice_iso,
                pairs_checked,
                unit_matched,
            } => json!({
                "verdict": "Consistent",
                "lattice_iso": lattice_iso,
                "pairs_checked": pairs_checked,
                "unit_matched": unit_matched,
                "naturality_verified": false,
            }),
            Verdict::AmplifiedIsomorphic { bijection } => json!({
                "verdict": "AmplifiedIsomorphic",
                "bijection": bijection
                    .iter()
                    .enumerate()
                    .map(|(v, &w)| json!([g1.label(v), g2.label(w)]))
                    .collect::<Vec<_>>(),
            }),
            Verdict::AmplifiedNonIsomorphic => json!({
                "verdict": "AmplifiedNonIsomorphic",
            }),
        }
    }
}

fn describe_group(kg: &KGroups) -> String {
    let mut parts = Vec::new();
    if kg.k0.free_rank() > 0 {
        parts.push(format!("Z^{}", kg.k0.free_rank()));
    }
    for d in kg.k0.torsion() {
        parts.push(format!("Z/{d}"));
    }
    let k0 = if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join(" + ")
    };
    format!("K0 = {k0}, K1 rank {}", kg.k1.free_rank())
}

struct IsoSearch<'a> {
    w1: &'a KWeb,
    w2: &'a KWeb,
    order: Vec<usize>,
    candidates: Vec<Vec<usize>>,
    leq1: Vec<bool>,
    leq2: Vec<bool>,
    m: usize,
    nodes: usize,
    budget: usize,
    found_any: bool,
    first_fail: Option<String>,
}

impl<'a> IsoSearch<'a> {
    fn check_groups(&mut self, assign: &[usize]) -> bool {
        for (&(a, b), kg1) in self.w1.groups() {
            let kg2 = &self.w2.groups()[&(assign[a], assign[b])];
            let ok = groups_isomorphic(kg1.k0(), kg2.k0()) && groups_isomorphic(kg1.k1(), kg2.k1());
            if !ok {
                if self.first_fail.is_none() {
                    self.first_fail = Some(format!(
                        "K-groups differ at subquotient pair {}|{}: {} vs {}",
                        self.w1.set_label(a),
                        self.w1.set_label(b),
                        describe_group(kg1),
                        describe_group(kg2),
                    ));
                }
                return false;
            }
        }
        true
    }

    fn search(
        &mut self,
        depth: usize,
        assign: &mut Vec<Option<usize>>,
        used: &mut Vec<bool>,
    ) -> Result<Option<Vec<usize>>> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::IsoSearchBudget);
        }
        if depth == self.m {
            let full: Vec<usize> = assign.iter().map(|a| a.unwrap()).collect();
            self.found_any = true;
            if self.check_groups(&full) {
                return Ok(Some(full));
            }
            return Ok(None);
        }
        let x = self.order[depth];
        let candidate_list = self.candidates[x].clone();
        for y in candidate_list {
            if used[y] {
                continue;
            }
            let consistent = (0..depth).all(|k| {
                let xp = self.order[k];
                let yp = assign[xp].unwrap();
                self.leq1[xp * self.m + x] == self.leq2[yp * self.m + y]
                    && self.leq1[x * self.m + xp] == self.leq2[y * self.m + yp]
            });
            if !consistent {
                continue;
            }
            assign[x] = Some(y);
            used[y] = true;
            if let Some(found) = self.search(depth + 1, assign, used)? {
                return Ok(Some(found));
            }
            assign[x] = None;
            used[y] = false;
        }
        Ok(None)
    }
}

/// Compare two invariants.
///
/// Amplified inputs are decided exactly through canonical forms. Otherwise
/// the comparator enumerates lattice isomorphisms and checks per-pair group
/// isomorphy, optionally matching unit classes for the (∅, E⁰) pair.
pub fn compare_kwebs(w1: &KWeb, w2: &KWeb, opts: &CompareOptions) -> Result<Verdict> {
    if w1.metadata.amplified && w2.metadata.amplified && !opts.force_general {
        let decision = are_lpa_isomorphic_amplified(w1.graph(), w2.graph(), opts.classify_bound)?;
        return Ok(match decision.witness {
            Some(bijection) => Verdict::AmplifiedIsomorphic { bijection },
            None => Verdict::AmplifiedNonIsomorphic,
        });
    }

    let l1 = w1.lattice();
    let l2 = w2.lattice();
    if l1.len() != l2.len() {
        return Ok(Verdict::Distinguished {
            witness: format!("ideal lattice sizes differ: {} vs {}", l1.len(), l2.len()),
        });
    }
    let m = l1.len();

    let leq = |l: &IdealLattice| -> Vec<bool> {
        let mut out = vec![false; m * m];
        for a in 0..m {
            for b in 0..m {
                out[a * m + b] = l.leq(a, b);
            }
        }
        out
    };
    let leq1 = leq(l1);
    let leq2 = leq(l2);

    // Order-invariant signature per element prunes the candidate lists.
    let signature = |leq: &[bool], covers_down: &[usize], covers_up: &[usize], x: usize| {
        let down = (0..m).filter(|&a| leq[a * m + x]).count();
        let up = (0..m).filter(|&b| leq[x * m + b]).count();
        (down, up, covers_down[x], covers_up[x])
    };
    let cover_counts = |l: &IdealLattice| {
        let mut down = vec![0usize; m];
        let mut up = vec![0usize; m];
        for &(a, b) in l.hasse() {
            up[a] += 1;
            down[b] += 1;
        }
        (down, up)
    };
    let (cd1, cu1) = cover_counts(l1);
    let (cd2, cu2) = cover_counts(l2);
    let sig1: Vec<_> = (0..m).map(|x| signature(&leq1, &cd1, &cu1, x)).collect();
    let sig2: Vec<_> = (0..m).map(|x| signature(&leq2, &cd2, &cu2, x)).collect();

    let candidates: Vec<Vec<usize>> = (0..m)
        .map(|x| (0..m).filter(|&y| sig2[y] == sig1[x]).collect())
        .collect();
    if candidates.iter().any(|c| c.is_empty()) {
        return Ok(Verdict::Distinguished {
            witness: "ideal lattices are not isomorphic".into(),
        });
    }

    // Assign elements in order of increasing candidate count.
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by_key(|&x| (candidates[x].len(), x));

    let budget = (opts.iso_search_bound.max(2) as u128)
        .saturating_pow(6)
        .min(10_000_000) as usize;

    let mut search = IsoSearch {
        w1,
        w2,
        order,
        candidates,
        leq1,
        leq2,
        m,
        nodes: 0,
        budget,
        found_any: false,
        first_fail: None,
    };
    let mut assign: Vec<Option<usize>> = vec![None; m];
    let mut used = vec![false; m];
    let result = search.search(0, &mut assign, &mut used)?;

    match result {
        Some(mapping) => {
            let pairs_checked = w1.groups().len();
            let unit_matched = if opts.require_unit {
                let top1 = &w1.groups()[&(l1.bottom(), l1.top())];
                let top2 = &w2.groups()[&(l2.bottom(), l2.top())];
                match iso_with_element(
                    top1.k0(),
                    &top1.unit_class(),
                    top2.k0(),
                    &top2.unit_class(),
                    opts.iso_search_bound,
                ) {
                    ElementIso::Found(_) => Some(true),
                    ElementIso::Unknown => Some(false),
                    ElementIso::NoneDefinitive => {
                        return Ok(Verdict::Distinguished {
                            witness:
                                "no K0 isomorphism of the full algebras matches the unit classes"
                                    .into(),
                        });
                    }
                }
            } else {
                None
            };
            Ok(Verdict::Consistent {
                lattice_iso: mapping,
                pairs_checked,
                unit_matched,
            })
        }
        None => {
            if search.found_any {
                Ok(Verdict::Distinguished {
                    witness: search.first_fail.unwrap_or_else(|| {
                        "K-groups differ under every lattice isomorphism".into()
                    }),
                })
            } else {
                Ok(Verdict::Distinguished {
                    witness: "ideal lattices are not isomorphic".into(),
                })
            }
        }
    }
}
