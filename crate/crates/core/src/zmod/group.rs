//! Finitely generated abelian groups as integer presentations, and the
//! homomorphisms between them.
//!
//! A group is the cokernel of its relation matrix. The Smith decomposition
//! of the relations turns arbitrary generator coordinates into canonical
//! ones: torsion coordinates reduced against the invariant factors followed
//! by free coordinates. Equality of elements, orders, exactness of
//! hom sequences and isomorphism searches are all decided exactly through
//! integer linear solving; nothing here is numeric.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

use super::matrix::IntMatrix;
use super::snf::{LinearSystem, SmithDecomposition};

/// Standard basis vector of length `len`.
pub fn basis_vec(len: usize, i: usize) -> Vec<BigInt> {
    let mut v = vec![BigInt::zero(); len];
    v[i] = BigInt::one();
    v
}

/// gcd of a slice, nonnegative; 0 for the zero vector.
pub fn content(xs: &[BigInt]) -> BigInt {
    let mut g = BigInt::zero();
    for x in xs {
        g = g.gcd(x);
    }
    g
}

/// Finitely generated abelian group presented as coker of `relations`
/// (columns are relations among `ngens` generators).
#[derive(Debug, Clone)]
pub struct FgAbelianGroup {
    relations: IntMatrix,
    solver: LinearSystem,
    torsion: Vec<BigInt>,
    free_rank: usize,
    torsion_rows: Vec<usize>,
}

impl PartialEq for FgAbelianGroup {
    fn eq(&self, other: &Self) -> bool {
        self.relations == other.relations
    }
}
impl Eq for FgAbelianGroup {}

impl FgAbelianGroup {
    /// The group ℤ^rows / column-span(presentation).
    pub fn cokernel(presentation: &IntMatrix) -> FgAbelianGroup {
        let solver = LinearSystem::new(presentation);
        let snf = solver.snf();
        let rank = snf.rank();
        let mut torsion = Vec::new();
        let mut torsion_rows = Vec::new();
        for i in 0..rank {
            let d = snf.s.get(i, i).clone();
            if d > BigInt::one() {
                torsion_rows.push(i);
                torsion.push(d);
            }
        }
        let free_rank = presentation.rows() - rank;
        FgAbelianGroup {
            relations: presentation.clone(),
            solver,
            torsion,
            free_rank,
            torsion_rows,
        }
    }

    /// Group ⊕ᵢ ℤ/dᵢ ⊕ ℤ^free_rank on its canonical generators.
    pub fn from_invariant_factors(factors: &[BigInt], free_rank: usize) -> FgAbelianGroup {
        let ngens = factors.len() + free_rank;
        let rel = IntMatrix::from_fn(ngens, factors.len(), |i, j| {
            if i == j {
                factors[j].clone()
            } else {
                BigInt::zero()
            }
        });
        FgAbelianGroup::cokernel(&rel)
    }

    pub fn from_factors_u64(factors: &[u64], free_rank: usize) -> FgAbelianGroup {
        let f: Vec<BigInt> = factors.iter().map(|&d| BigInt::from(d)).collect();
        FgAbelianGroup::from_invariant_factors(&f, free_rank)
    }

    pub fn trivial() -> FgAbelianGroup {
        FgAbelianGroup::from_invariant_factors(&[], 0)
    }

    /// Free group of the given rank.
    pub fn free(rank: usize) -> FgAbelianGroup {
        FgAbelianGroup::from_invariant_factors(&[], rank)
    }

    pub fn ngens(&self) -> usize {
        self.relations.rows()
    }

    pub fn relations(&self) -> &IntMatrix {
        &self.relations
    }

    /// Invariant factors ≥ 2 in divisibility order.
    pub fn torsion(&self) -> &[BigInt] {
        &self.torsion
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn is_trivial(&self) -> bool {
        self.torsion.is_empty() && self.free_rank == 0
    }

    /// Group order; None when infinite.
    pub fn order(&self) -> Option<BigInt> {
        if self.free_rank > 0 {
            None
        } else {
            Some(self.torsion.iter().product())
        }
    }

    pub fn canonical_len(&self) -> usize {
        self.torsion.len() + self.free_rank
    }

    fn snf(&self) -> &SmithDecomposition {
        self.solver.snf()
    }

    /// Linear part of the canonical coordinate map: torsion rows of U·x
    /// followed by free rows, without modular reduction.
    pub fn canonical_raw(&self, x: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(x.len(), self.ngens());
        let y = self.snf().u.mul_vec(x);
        let rank = self.snf().rank();
        let mut out = Vec::with_capacity(self.canonical_len());
        for &i in &self.torsion_rows {
            out.push(y[i].clone());
        }
        for yi in y.iter().take(self.ngens()).skip(rank) {
            out.push(yi.clone());
        }
        out
    }

    /// Canonical coordinates: torsion coordinates reduced into [0, dᵢ),
    /// free coordinates exact. Two elements are equal iff these agree.
    pub fn canonical_coords(&self, x: &[BigInt]) -> Vec<BigInt> {
        let mut out = self.canonical_raw(x);
        for (k, d) in self.torsion.iter().enumerate() {
            out[k] = out[k].mod_floor(d);
        }
        out
    }

    /// A generator-coordinate representative of the canonical coordinates.
    pub fn ambient_of_canonical(&self, c: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(c.len(), self.canonical_len());
        let rank = self.snf().rank();
        let mut y = vec![BigInt::zero(); self.ngens()];
        for (k, &row) in self.torsion_rows.iter().enumerate() {
            y[row] = c[k].clone();
        }
        for j in 0..self.free_rank {
            y[rank + j] = c[self.torsion.len() + j].clone();
        }
        self.snf().u_inv.mul_vec(&y)
    }

    pub fn elements_equal(&self, a: &[BigInt], b: &[BigInt]) -> bool {
        self.canonical_coords(a) == self.canonical_coords(b)
    }

    pub fn element_is_zero(&self, a: &[BigInt]) -> bool {
        self.canonical_coords(a).iter().all(|c| c.is_zero())
    }

    /// True iff `x` lies in the relation subgroup (i.e. is zero in the group).
    pub fn relation_member(&self, x: &[BigInt]) -> bool {
        self.solver.is_solvable(x)
    }

    /// Order of an element; None when infinite.
    pub fn element_order(&self, x: &[BigInt]) -> Option<BigInt> {
        let c = self.canonical_coords(x);
        let t = self.torsion.len();
        if c[t..].iter().any(|v| !v.is_zero()) {
            return None;
        }
        let mut order = BigInt::one();
        for (k, d) in self.torsion.iter().enumerate() {
            let g = d.gcd(&c[k]);
            order = order.lcm(&(d / g));
        }
        Some(order)
    }
}

/// Homomorphism between presented groups, as an integer matrix on
/// generators. Construction checks well-definedness: every relation of the
/// domain must land in the relation subgroup of the codomain.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupHom {
    domain: FgAbelianGroup,
    codomain: FgAbelianGroup,
    matrix: IntMatrix,
}

impl GroupHom {
    pub fn new(
        domain: FgAbelianGroup,
        codomain: FgAbelianGroup,
        matrix: IntMatrix,
    ) -> Result<GroupHom> {
        if matrix.rows() != codomain.ngens() || matrix.cols() != domain.ngens() {
            return Err(Error::HomMismatch(format!(
                "matrix is {}x{}, expected {}x{}",
                matrix.rows(),
                matrix.cols(),
                codomain.ngens(),
                domain.ngens()
            )));
        }
        for j in 0..domain.relations().cols() {
            let r = domain.relations().col(j);
            let image = matrix.mul_vec(&r);
            if !codomain.relation_member(&image) {
                return Err(Error::IllDefinedHom);
            }
        }
        Ok(GroupHom {
            domain,
            codomain,
            matrix,
        })
    }

    pub fn zero(domain: FgAbelianGroup, codomain: FgAbelianGroup) -> GroupHom {
        let matrix = IntMatrix::zero(codomain.ngens(), domain.ngens());
        GroupHom {
            domain,
            codomain,
            matrix,
        }
    }

    pub fn identity(g: &FgAbelianGroup) -> GroupHom {
        GroupHom {
            domain: g.clone(),
            codomain: g.clone(),
            matrix: IntMatrix::identity(g.ngens()),
        }
    }

    pub fn domain(&self) -> &FgAbelianGroup {
        &self.domain
    }

    pub fn codomain(&self) -> &FgAbelianGroup {
        &self.codomain
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn apply(&self, x: &[BigInt]) -> Vec<BigInt> {
        self.matrix.mul_vec(x)
    }

    /// self ∘ inner.
    pub fn compose(&self, inner: &GroupHom) -> Result<GroupHom> {
        if inner.codomain != self.domain {
            return Err(Error::HomMismatch(
                "composition endpoints do not match".into(),
            ));
        }
        Ok(GroupHom {
            domain: inner.domain.clone(),
            codomain: self.codomain.clone(),
            matrix: self.matrix.mul(&inner.matrix),
        })
    }

    pub fn is_zero_hom(&self) -> bool {
        (0..self.matrix.cols()).all(|j| self.codomain.relation_member(&self.matrix.col(j)))
    }

    pub fn is_surjective(&self) -> bool {
        let combined = self.matrix.hstack(self.codomain.relations());
        FgAbelianGroup::cokernel(&combined).is_trivial()
    }

    /// A surjection between groups of equal invariants is an isomorphism.
    pub fn is_isomorphism(&self) -> bool {
        groups_isomorphic(&self.domain, &self.codomain) && self.is_surjective()
    }
}

/// The free cokernel and an explicit basis of ker(A : ℤ^cols → ℤ^rows).
pub fn kernel_of(presentation: &IntMatrix) -> (FgAbelianGroup, IntMatrix) {
    let basis = LinearSystem::new(presentation).kernel_basis();
    (FgAbelianGroup::free(basis.cols()), basis)
}

/// Image(f) = kernel(g) as subgroups of the shared middle group, decided by
/// lifting both to the free cover of the middle (adjoining its relations)
/// and testing mutual lattice membership.
pub fn is_exact_at(f: &GroupHom, g: &GroupHom) -> Result<bool> {
    if f.codomain != g.domain {
        return Err(Error::HomMismatch(
            "exactness endpoints do not match".into(),
        ));
    }
    let middle = &f.codomain;
    let m = middle.ngens();
    let rb = middle.relations();

    let im_lattice = f.matrix.hstack(rb);

    // Kernel of g: x with g(x) ∈ relations of the codomain.
    let big = g.matrix.hstack(g.codomain.relations());
    let kb = LinearSystem::new(&big).kernel_basis();
    let projected = IntMatrix::from_fn(m, kb.cols(), |i, j| kb.get(i, j).clone());
    let ker_lattice = projected.hstack(rb);

    let im_sys = LinearSystem::new(&im_lattice);
    let ker_sys = LinearSystem::new(&ker_lattice);
    for j in 0..ker_lattice.cols() {
        if !im_sys.is_solvable(&ker_lattice.col(j)) {
            return Ok(false);
        }
    }
    for j in 0..im_lattice.cols() {
        if !ker_sys.is_solvable(&im_lattice.col(j)) {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn groups_isomorphic(a: &FgAbelianGroup, b: &FgAbelianGroup) -> bool {
    a.free_rank == b.free_rank && a.torsion == b.torsion
}

/// Outcome of the bounded element-matching isomorphism search.
#[derive(Debug, Clone)]
pub enum ElementIso {
    /// An isomorphism carrying the first element to the second.
    Found(Box<GroupHom>),
    /// No such isomorphism exists.
    NoneDefinitive,
    /// The search budget was exhausted before the space was covered.
    Unknown,
}

/// Search for an isomorphism G1 → G2 sending u1 to u2.
///
/// Writing G ≅ A ⊕ ℤ^F with A the torsion subgroup, every isomorphism acts
/// as a triangular block matrix (an automorphism of A, a correction
/// Hom(ℤ^F, A), and a GL_F(ℤ) map). Orbits of elements are therefore
/// decided by the content of the free part together with an automorphism
/// of A matching the torsion parts modulo content·A. The automorphism
/// search is exhaustive, so within budget the answer is definitive both
/// ways; only a budget overrun yields Unknown.
pub fn iso_with_element(
    g1: &FgAbelianGroup,
    u1: &[BigInt],
    g2: &FgAbelianGroup,
    u2: &[BigInt],
    bound: usize,
) -> ElementIso {
    if !groups_isomorphic(g1, g2) {
        return ElementIso::NoneDefinitive;
    }
    let t = g1.torsion.len();
    let free = g1.free_rank;

    let c1 = g1.canonical_coords(u1);
    let c2 = g2.canonical_coords(u2);
    let (a1, x1) = c1.split_at(t);
    let (a2, x2) = c2.split_at(t);

    let content1 = content(x1);
    let content2 = content(x2);
    if content1 != content2 {
        return ElementIso::NoneDefinitive;
    }
    if g1.element_order(u1) != g2.element_order(u2) {
        return ElementIso::NoneDefinitive;
    }
    let c = content1;

    // Exhaustive (budgeted) search for an automorphism of the torsion part
    // with α(a1) ≡ a2 (mod c·A).
    let budget = (bound.max(2) as u128)
        .saturating_pow(t as u32 + 1)
        .min(10_000_000) as usize;
    let alpha = match torsion_orbit_search(&g1.torsion, a1, a2, &c, budget) {
        OrbitOutcome::Found(alpha) => alpha,
        OrbitOutcome::NoneDefinitive => return ElementIso::NoneDefinitive,
        OrbitOutcome::Unknown => return ElementIso::Unknown,
    };

    // Free part: unimodular maps taking each free part to content·e₀, then
    // β = B2⁻¹·B1 carries x1 to x2.
    let (b1, _) = unimodular_reduction(x1);
    let (b2, _) = unimodular_reduction(x2);
    let b2_inv = unimodular_inverse(&b2);
    let beta = b2_inv.mul(&b1);

    // Correction h: ℤ^F → A cancelling the residue c·δ = α(a1) − a2.
    let alpha_a1 = alpha.mul_vec(a1);
    let mut delta = Vec::with_capacity(t);
    for i in 0..t {
        let diff = &alpha_a1[i] - &a2[i];
        let d = &g1.torsion[i];
        delta.push(solve_mod(&c, &diff, d).expect("orbit condition guarantees solvability"));
    }
    let h = IntMatrix::from_fn(t, free, |i, j| -(&delta[i] * b1.get(0, j)));

    // Full map on canonical generators, then transported to the original
    // presentations through the linear canonical coordinate maps.
    let phi = IntMatrix::from_fn(t + free, t + free, |i, j| {
        if i < t && j < t {
            alpha.get(i, j).clone()
        } else if i < t {
            h.get(i, j - t).clone()
        } else if j < t {
            BigInt::zero()
        } else {
            beta.get(i - t, j - t).clone()
        }
    });

    let mut matrix = IntMatrix::zero(g2.ngens(), g1.ngens());
    for gen in 0..g1.ngens() {
        let cg = g1.canonical_raw(&basis_vec(g1.ngens(), gen));
        let mapped = phi.mul_vec(&cg);
        let col = g2.ambient_of_canonical(&mapped);
        for (i, v) in col.into_iter().enumerate() {
            matrix.set(i, gen, v);
        }
    }

    let hom = GroupHom::new(g1.clone(), g2.clone(), matrix)
        .expect("constructed isomorphism must be well-defined");
    debug_assert!(g2.elements_equal(&hom.apply(u1), u2));
    debug_assert!(hom.is_surjective());
    ElementIso::Found(Box::new(hom))
}

enum OrbitOutcome {
    Found(IntMatrix),
    NoneDefinitive,
    Unknown,
}

/// Enumerate homomorphisms of ⊕ ℤ/dᵢ by generator images (respecting
/// orders), looking for an automorphism with α(a1) ≡ a2 mod c·A.
fn torsion_orbit_search(
    d: &[BigInt],
    a1: &[BigInt],
    a2: &[BigInt],
    c: &BigInt,
    budget: usize,
) -> OrbitOutcome {
    let t = d.len();
    if t == 0 {
        return OrbitOutcome::Found(IntMatrix::zero(0, 0));
    }

    // Image of generator j must be killed by d_j: coordinate i ranges over
    // multiples of dᵢ/gcd(dᵢ, d_j).
    let mut steps = vec![vec![BigInt::zero(); t]; t];
    let mut counts = vec![vec![0u64; t]; t];
    for j in 0..t {
        for i in 0..t {
            let g = d[i].gcd(&d[j]);
            steps[j][i] = &d[i] / &g;
            counts[j][i] = u64::try_from(&g).unwrap_or(u64::MAX);
        }
    }

    // Odometer over all generator-image tuples.
    let mut odom: Vec<(usize, usize)> = Vec::new();
    for j in 0..t {
        for i in 0..t {
            odom.push((j, i));
        }
    }
    let mut counters = vec![0u64; odom.len()];
    let mut examined = 0usize;

    loop {
        examined += 1;
        if examined > budget {
            return OrbitOutcome::Unknown;
        }

        let alpha = IntMatrix::from_fn(t, t, |i, j| {
            let pos = j * t + i;
            &steps[j][i] * BigInt::from(counters[pos])
        });

        if alpha_is_automorphism(&alpha, d) && orbit_condition(&alpha, d, a1, a2, c) {
            return OrbitOutcome::Found(alpha);
        }

        // Advance the odometer.
        let mut pos = 0;
        loop {
            if pos == odom.len() {
                return OrbitOutcome::NoneDefinitive;
            }
            let (j, i) = odom[pos];
            counters[pos] += 1;
            if counters[pos] < counts[j][i] {
                break;
            }
            counters[pos] = 0;
            pos += 1;
        }
    }
}

fn alpha_is_automorphism(alpha: &IntMatrix, d: &[BigInt]) -> bool {
    let t = d.len();
    let diag = IntMatrix::from_fn(
        t,
        t,
        |i, j| {
            if i == j {
                d[i].clone()
            } else {
                BigInt::zero()
            }
        },
    );
    FgAbelianGroup::cokernel(&alpha.hstack(&diag)).is_trivial()
}

fn orbit_condition(
    alpha: &IntMatrix,
    d: &[BigInt],
    a1: &[BigInt],
    a2: &[BigInt],
    c: &BigInt,
) -> bool {
    let image = alpha.mul_vec(a1);
    for i in 0..d.len() {
        let diff = &image[i] - &a2[i];
        if solve_mod(c, &diff, &d[i]).is_none() {
            return false;
        }
    }
    true
}

/// Solve c·x ≡ diff (mod d) for x; None when no solution exists.
fn solve_mod(c: &BigInt, diff: &BigInt, d: &BigInt) -> Option<BigInt> {
    let diff = diff.mod_floor(d);
    if diff.is_zero() {
        return Some(BigInt::zero());
    }
    if c.is_zero() {
        return None;
    }
    let g = c.gcd(d);
    if !(&diff % &g).is_zero() {
        return None;
    }
    let d_red = d / &g;
    let c_red = (c / &g).mod_floor(&d_red);
    let target = (&diff / &g).mod_floor(&d_red);
    if d_red.is_one() {
        return Some(BigInt::zero());
    }
    let eg = c_red.extended_gcd(&d_red);
    debug_assert!(eg.gcd.is_one());
    let inv = eg.x.mod_floor(&d_red);
    Some((target * inv).mod_floor(&d_red))
}

/// Unimodular B with B·x = content(x)·e₀ (content nonnegative).
fn unimodular_reduction(x: &[BigInt]) -> (IntMatrix, BigInt) {
    let f = x.len();
    let mut b = IntMatrix::identity(f);
    if f == 0 {
        return (b, BigInt::zero());
    }
    let mut y: Vec<BigInt> = x.to_vec();
    for i in 1..f {
        if y[i].is_zero() {
            continue;
        }
        let eg = y[0].extended_gcd(&y[i]);
        let g = eg.gcd.clone();
        // 2x2 unimodular block on rows (0, i): det = (p·y0 + q·yi)/g = 1.
        let p = eg.x.clone();
        let q = eg.y.clone();
        let r = -(&y[i] / &g);
        let s = &y[0] / &g;
        let old0: Vec<BigInt> = (0..f).map(|j| b.get(0, j).clone()).collect();
        let oldi: Vec<BigInt> = (0..f).map(|j| b.get(i, j).clone()).collect();
        for j in 0..f {
            b.set(0, j, &p * &old0[j] + &q * &oldi[j]);
            b.set(i, j, &r * &old0[j] + &s * &oldi[j]);
        }
        y[0] = g;
        y[i] = BigInt::zero();
    }
    if y[0].is_negative() {
        b.negate_row(0);
        y[0] = -y[0].clone();
    }
    (b, y[0].clone())
}

fn unimodular_inverse(b: &IntMatrix) -> IntMatrix {
    let n = b.rows();
    let sys = LinearSystem::new(b);
    let mut inv = IntMatrix::zero(n, n);
    for j in 0..n {
        let col = sys
            .solve(&basis_vec(n, j))
            .expect("unimodular matrix is invertible");
        for (i, v) in col.into_iter().enumerate() {
            inv.set(i, j, v);
        }
    }
    inv
}
