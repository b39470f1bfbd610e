//! Witness points with prescribed isotropy, and polystandard maps with a
//! prescribed degree.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::burnside::BurnsideElement;
use crate::degree::{DegreeError, LocalMapDef, PolystandardMap, StandardPiece};
use crate::group::Subgroup;
use crate::linalg::{self, QMatrix, QVector, Rational};
use crate::representation::{OrthogonalRepresentation, RepError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RealizationError {
    #[error("no point has isotropy exactly {label}")]
    EmptyOrbitTypeStratum { label: String },
    #[error("coefficient {coefficient} on [G/{label}] cannot be realized: {reason}")]
    InfeasibleCoefficient {
        label: String,
        coefficient: String,
        reason: String,
    },
    #[error("coefficient {coefficient} on [G/{label}] is too large to realize piece by piece")]
    CoefficientTooLarge { label: String, coefficient: String },
    #[error("a 0-dimensional block has determinant +1 only")]
    ZeroDimNegative,
    #[error("element and representation are over different groups")]
    GroupMismatch,
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Degree(#[from] DegreeError),
}

impl RealizationError {
    /// Short machine-readable tag.
    pub fn reason_code(&self) -> &'static str {
        match self {
            RealizationError::EmptyOrbitTypeStratum { .. } => "empty_orbit_type_stratum",
            RealizationError::InfeasibleCoefficient { .. } => "infeasible_coefficient",
            RealizationError::CoefficientTooLarge { .. } => "coefficient_too_large",
            RealizationError::ZeroDimNegative => "zero_dim_negative",
            RealizationError::GroupMismatch => "group_mismatch",
            RealizationError::Rep(_) => "representation",
            RealizationError::Degree(_) => "degree",
        }
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(
            self,
            RealizationError::EmptyOrbitTypeStratum { .. }
                | RealizationError::InfeasibleCoefficient { .. }
                | RealizationError::CoefficientTooLarge { .. }
        )
    }
}

/// A Burnside element to be realized over a representation.
#[derive(Debug, Clone)]
pub struct RealizationTarget {
    pub element: BurnsideElement,
    pub rep: Arc<OrthogonalRepresentation>,
}

impl RealizationTarget {
    pub fn new(
        rep: Arc<OrthogonalRepresentation>,
        element: BurnsideElement,
    ) -> Result<Self, RealizationError> {
        if element.group_id() != rep.group().id() {
            return Err(RealizationError::GroupMismatch);
        }
        Ok(RealizationTarget { element, rep })
    }
}

/// Default number of ladder candidates: `8·|G|·n`.
pub fn default_ladder_length(rep: &OrthogonalRepresentation) -> usize {
    8 * rep.group().order() * rep.dim().max(1)
}

/// Ladder length after which some candidate is guaranteed to have isotropy
/// exactly `h` (when Ω_H ≠ ∅): each bad `t` is a root of a nonzero vector
/// polynomial of degree ≤ dim V^H, one per proper overgroup.
fn guaranteed_ladder_length(rep: &OrthogonalRepresentation, h: &Subgroup, d: usize) -> usize {
    d * rep.group().lattice().proper_overgroups(h).len() + 1
}

/// `x_t = Σ_k t^k b_k` over the canonical basis of V^H.
pub fn ladder_point(basis: &[QVector], n: usize, t: u64) -> QVector {
    let t = Rational::from_integer(BigInt::from(t));
    let mut x = linalg::zero_vector(n);
    let mut power = t.clone();
    for b in basis {
        x = linalg::add(&x, &linalg::scale(b, &power));
        power *= &t;
    }
    x
}

fn class_label(rep: &OrthogonalRepresentation, h: &Subgroup) -> String {
    let lattice = rep.group().lattice();
    lattice
        .class_of(h)
        .map(|c| lattice.classes()[c].label.clone())
        .unwrap_or_else(|| rep.group().subgroup_label(h))
}

/// First ladder point whose isotropy is exactly `h`.
pub fn point_with_exact_isotropy(
    rep: &OrthogonalRepresentation,
    h: &Subgroup,
) -> Result<QVector, RealizationError> {
    let empty = || RealizationError::EmptyOrbitTypeStratum {
        label: class_label(rep, h),
    };
    if rep.stratum_is_empty(h)? {
        return Err(empty());
    }
    let basis = rep.fixed_basis(h)?;
    let limit = default_ladder_length(rep).max(guaranteed_ladder_length(rep, h, basis.len()));
    (1..=limit as u64)
        .map(|t| ladder_point(basis, rep.dim(), t))
        .find(|x| &rep.isotropy(x) == h)
        .ok_or_else(empty)
}

/// The first `count` ladder points with isotropy exactly `h` lying in
/// pairwise distinct orbits.
pub fn distinct_orbit_points(
    rep: &OrthogonalRepresentation,
    h: &Subgroup,
    count: usize,
) -> Result<Vec<QVector>, RealizationError> {
    if count == 0 {
        return Ok(Vec::new());
    }
    if rep.stratum_is_empty(h)? {
        return Err(RealizationError::EmptyOrbitTypeStratum {
            label: class_label(rep, h),
        });
    }
    let basis = rep.fixed_basis(h)?;
    let mut chosen: Vec<QVector> = Vec::with_capacity(count);
    let mut orbits: Vec<Vec<QVector>> = Vec::new();
    if basis.is_empty() {
        // V^H = {0}, so H = G and the only point is the origin
        chosen.push(linalg::zero_vector(rep.dim()));
    }
    // every orbit meets the ladder in at most |G| points
    let limit = guaranteed_ladder_length(rep, h, basis.len()) + count * rep.group().order();
    let mut t = 1u64;
    while chosen.len() < count && t as usize <= limit {
        let x = ladder_point(basis, rep.dim(), t);
        t += 1;
        if &rep.isotropy(&x) != h || orbits.iter().any(|o| o.contains(&x)) {
            continue;
        }
        orbits.push(rep.orbit(&x));
        chosen.push(x);
    }
    if chosen.len() < count {
        return Err(RealizationError::InfeasibleCoefficient {
            label: class_label(rep, h),
            coefficient: count.to_string(),
            reason: "not enough distinct orbits".into(),
        });
    }
    Ok(chosen)
}

/// `diag(sign, 1, ..., 1)`.
pub fn signed_linear_block(dim: usize, sign: i64) -> Result<QMatrix, RealizationError> {
    if dim == 0 {
        return if sign == 1 {
            Ok(QMatrix::zeros(0, 0))
        } else {
            Err(RealizationError::ZeroDimNegative)
        };
    }
    let mut entries = vec![linalg::rational(1); dim];
    entries[0] = linalg::rational(sign.signum());
    Ok(QMatrix::diagonal(&entries))
}

/// Largest `r = 2^-k` with `4r < m` and `r² < c` for each clearance `c`.
fn common_radius(min_dist_sq: Option<&Rational>, clearances: &[Rational]) -> Rational {
    let mut r = linalg::rational(1);
    let half = linalg::ratio(1, 2);
    loop {
        let r2 = &r * &r;
        let spread_ok = min_dist_sq.is_none_or(|m| linalg::rational(16) * &r2 < *m);
        if spread_ok && clearances.iter().all(|c| r2 < *c) {
            return r;
        }
        r *= &half;
    }
}

/// A strictly polystandard map of degree `target.element`: `|c_i|` pieces
/// with linear block `diag(sign c_i, 1, ..., 1)` per class.
pub fn realize_element(target: &RealizationTarget) -> Result<PolystandardMap, RealizationError> {
    let rep = &target.rep;
    let group = rep.group();
    let lattice = group.lattice();
    let mut placed: Vec<(QVector, i64, usize)> = Vec::new();
    for (class, coeff) in target.element.coeffs().iter().enumerate() {
        if coeff.is_zero() {
            continue;
        }
        let h = lattice.classes()[class].representative();
        let label = lattice.classes()[class].label.clone();
        let dim = rep.fixed_basis(h)?.len();
        if rep.stratum_is_empty(h)? {
            return Err(RealizationError::InfeasibleCoefficient {
                label,
                coefficient: coeff.to_string(),
                reason: "orbit-type stratum is empty".into(),
            });
        }
        if dim == 0 && coeff != &BigInt::from(1) {
            return Err(RealizationError::InfeasibleCoefficient {
                label,
                coefficient: coeff.to_string(),
                reason: "dim V^G = 0 allows only 0 or 1".into(),
            });
        }
        let count = coeff
            .abs()
            .to_usize()
            .filter(|&c| c <= 1 << 16)
            .ok_or_else(|| RealizationError::CoefficientTooLarge {
                label: label.clone(),
                coefficient: coeff.to_string(),
            })?;
        let sign = if coeff.is_positive() { 1 } else { -1 };
        for x in distinct_orbit_points(rep, h, count)? {
            placed.push((x, sign, dim));
        }
    }

    let all_points: Vec<QVector> = placed.iter().flat_map(|(x, _, _)| rep.orbit(x)).collect();
    let mut min_dist_sq: Option<Rational> = None;
    for i in 0..all_points.len() {
        for j in i + 1..all_points.len() {
            let d = linalg::dist_sq(&all_points[i], &all_points[j]);
            if min_dist_sq.as_ref().is_none_or(|m| &d < m) {
                min_dist_sq = Some(d);
            }
        }
    }
    let mut clearances = Vec::new();
    for (x, _, dim) in &placed {
        if *dim > 0 {
            if let Some(c) = rep.stratum_clearance_sq(x, &rep.isotropy(x))? {
                clearances.push(c);
            }
        }
    }
    let r = common_radius(min_dist_sq.as_ref(), &clearances);

    let pieces = placed
        .into_iter()
        .map(|(x, sign, dim)| {
            let block = signed_linear_block(dim, sign)?;
            Ok(StandardPiece::new(
                rep,
                x,
                r.clone(),
                r.clone(),
                LocalMapDef::Linear(block),
            )?)
        })
        .collect::<Result<Vec<_>, RealizationError>>()?;
    Ok(PolystandardMap::new(rep.clone(), pieces)?)
}
