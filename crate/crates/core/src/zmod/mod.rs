//! Exact integer linear algebra over ℤ: matrices, Smith normal form,
//! finitely generated abelian groups and their homomorphisms.

mod group;
mod matrix;
mod snf;

pub use group::{
    basis_vec, content, groups_isomorphic, is_exact_at, iso_with_element, kernel_of, ElementIso,
    FgAbelianGroup, GroupHom,
};
pub use matrix::IntMatrix;
pub use snf::{smith_normal_form, LinearSystem, SmithDecomposition};
