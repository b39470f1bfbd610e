//! Exact Burnside-ring arithmetic and the equivariant degree of
//! polystandard maps for finite permutation groups.
//!
//! Groups are given by permutation generators ([`group`]); the Burnside ring
//! is computed through the table of marks ([`burnside`]); representations are
//! orthogonal with rational entries ([`representation`]); maps are described
//! piece by piece ([`degree`]) and can be built from a target degree
//! ([`realization`]).

pub mod burnside;
pub mod degree;
pub mod descriptor;
pub mod expr;
pub mod group;
pub mod linalg;
pub mod perm;
pub mod realization;
pub mod representation;

pub use burnside::{
    decompose_gset, product_gset, table_of_marks, BurnsideElement, BurnsideError, BurnsideRing,
    FiniteGSet, TableOfMarks,
};
pub use degree::{
    conjugate_piece, deg_polystandard, deg_standard, existence_check, local_index, product_map,
    verify_product, DegreeError, DegreeResult, LocalMapDef, PolystandardMap, ProductReport,
    StandardPiece,
};
pub use descriptor::DescriptorError;
pub use expr::{Expr, ExprError};
pub use group::{
    generate_group, generate_group_with_cap, FiniteGroup, GroupError, Subgroup, SubgroupClass,
};
pub use linalg::{QMatrix, QVector, Rational};
pub use perm::{PermError, Permutation};
pub use realization::{
    point_with_exact_isotropy, realize_element, signed_linear_block, RealizationError,
    RealizationTarget,
};
pub use representation::{OrthogonalRepresentation, RepError};
