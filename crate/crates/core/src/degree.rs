//! Standard and polystandard maps and their equivariant degree.
//!
//! A [`PolystandardMap`] is the data of a finite disjoint union of standard
//! maps. Each [`StandardPiece`] is determined by a base point `x₀` with
//! isotropy `H`, a ball `U` of radius `radius` around `x₀` in V^H, the width
//! `epsilon` of the normal tube `U^ε`, and the restriction `f_x : U → V^H`.
//! Off V^H the map is the identity in normal directions, so all of the
//! degree information sits in the local index `d = deg(f_x, U)`:
//!
//! ```text
//! deg_G f = Σ_pieces d_α [G/G_x₀]
//! ```

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::burnside::{BurnsideElement, BurnsideError, BurnsideRing, FiniteGSet};
use crate::expr::{self, Expr, ExprError};
use crate::group::Subgroup;
use crate::linalg::{self, QMatrix, QVector, Rational};
use crate::representation::{OrthogonalRepresentation, RepError};

/// Relative singularity threshold for finite-difference Jacobians.
pub const SINGULAR_TOLERANCE: f64 = 1e-8;
/// Grid points per axis for the uniqueness-of-zero guard on expression pieces.
pub const GUARD_GRID: usize = 33;
/// The grid guard runs only up to this fixed-space dimension.
pub const GUARD_MAX_DIM: usize = 3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DegreeError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("radius and epsilon must be positive")]
    InvalidRadius,
    #[error("epsilon {epsilon} is not below half the minimal orbit distance")]
    EpsilonTooLarge { epsilon: String },
    #[error("tubes of radius {radius} + epsilon around distinct orbit points overlap")]
    SelfOverlap { radius: String },
    #[error("radius {radius} reaches points of larger isotropy")]
    RadiusTooLarge { radius: String },
    #[error("invalid local map: {0}")]
    InvalidLocalMap(String),
    #[error("base point is not a zero of the local map (residual {residual:e})")]
    NotAZero { residual: f64 },
    #[error("local map has another zero inside U (grid guard)")]
    NonUniqueZero,
    #[error("singular Jacobian at the base point (det {det:e}); declare the index or perturb")]
    SingularJacobian { det: f64 },
    #[error("pieces {first} and {second} overlap")]
    OverlappingPieces { first: usize, second: usize },
    #[error("maps are over different groups")]
    GroupMismatch,
    #[error("local index overflow")]
    IndexOverflow,
    #[error("conjugation of this local map is not supported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Burnside(#[from] BurnsideError),
}

/// The restriction `f_x : U ⊂ V^H → V^H`.
#[derive(Debug, Clone, PartialEq)]
pub enum LocalMapDef {
    /// Square matrix acting on coordinates in the canonical basis of V^H.
    Linear(QMatrix),
    /// One expression per V^H coordinate, in the ambient variables
    /// `x1 .. xn`, evaluated at `x₀ + Σ u_k b_k`.
    Expression(Vec<Expr>),
    /// The local index itself.
    Declared(i64),
}

#[derive(Debug, Clone)]
pub struct StandardPiece {
    base_point: QVector,
    isotropy: Subgroup,
    class_index: usize,
    /// Columns: canonical basis of V^H.
    basis: QMatrix,
    radius: Rational,
    epsilon: Rational,
    local: LocalMapDef,
    orbit: Vec<QVector>,
}

impl StandardPiece {
    pub fn new(
        rep: &OrthogonalRepresentation,
        base_point: QVector,
        radius: Rational,
        epsilon: Rational,
        local: LocalMapDef,
    ) -> Result<Self, DegreeError> {
        let n = rep.dim();
        if base_point.len() != n {
            return Err(DegreeError::DimensionMismatch(format!(
                "base point has {} coordinates, representation has dimension {n}",
                base_point.len()
            )));
        }
        if !radius.is_positive() || !epsilon.is_positive() {
            return Err(DegreeError::InvalidRadius);
        }
        let isotropy = rep.isotropy(&base_point);
        let class_index = rep
            .group()
            .lattice()
            .class_of(&isotropy)
            .expect("isotropy is a subgroup");
        let basis = rep.fixed_basis_matrix(&isotropy)?;
        let k = basis.cols();

        match &local {
            LocalMapDef::Linear(a) => {
                if a.rows() != k || a.cols() != k {
                    return Err(DegreeError::InvalidLocalMap(format!(
                        "linear map is {}x{}, dim V^H is {k}",
                        a.rows(),
                        a.cols()
                    )));
                }
            }
            LocalMapDef::Expression(exprs) => {
                if exprs.len() != k {
                    return Err(DegreeError::InvalidLocalMap(format!(
                        "{} expressions, dim V^H is {k}",
                        exprs.len()
                    )));
                }
                if let Some(v) = exprs.iter().filter_map(Expr::max_var).max() {
                    if v >= n {
                        return Err(DegreeError::InvalidLocalMap(format!(
                            "variable x{} exceeds dimension {n}",
                            v + 1
                        )));
                    }
                }
            }
            LocalMapDef::Declared(d) => {
                if k == 0 && !(0..=1).contains(d) {
                    return Err(DegreeError::InvalidLocalMap(format!(
                        "index {d} at a point with dim V^H = 0 must be 0 or 1"
                    )));
                }
            }
        }

        let orbit = rep.orbit(&base_point);
        let spread = min_pairwise_dist_sq(&orbit);
        if let Some(m2) = &spread {
            if linalg::rational(4) * &epsilon * &epsilon >= *m2 {
                return Err(DegreeError::EpsilonTooLarge {
                    epsilon: epsilon.to_string(),
                });
            }
        }
        if k > 0 {
            if let Some(c2) = rep.stratum_clearance_sq(&base_point, &isotropy)? {
                if &radius * &radius >= c2 {
                    return Err(DegreeError::RadiusTooLarge {
                        radius: radius.to_string(),
                    });
                }
            }
        }
        if let Some(m2) = spread {
            let reach = &radius + &epsilon;
            if linalg::rational(4) * &reach * &reach >= m2 {
                return Err(DegreeError::SelfOverlap {
                    radius: radius.to_string(),
                });
            }
        }

        let piece = StandardPiece {
            base_point,
            isotropy,
            class_index,
            basis,
            radius,
            epsilon,
            local,
            orbit,
        };
        if let LocalMapDef::Expression(exprs) = &piece.local {
            piece.check_expression_zero(exprs)?;
        }
        Ok(piece)
    }

    pub fn base_point(&self) -> &[Rational] {
        &self.base_point
    }

    pub fn isotropy(&self) -> &Subgroup {
        &self.isotropy
    }

    pub fn class_index(&self) -> usize {
        self.class_index
    }

    pub fn fixed_dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &QMatrix {
        &self.basis
    }

    pub fn radius(&self) -> &Rational {
        &self.radius
    }

    pub fn epsilon(&self) -> &Rational {
        &self.epsilon
    }

    pub fn local(&self) -> &LocalMapDef {
        &self.local
    }

    pub fn orbit(&self) -> &[QVector] {
        &self.orbit
    }

    /// Radius of a ball containing the tube `U^ε`.
    pub fn tube_radius(&self) -> Rational {
        &self.radius + &self.epsilon
    }

    /// Ambient point `x₀ + Σ u_k b_k` in floating point.
    fn ambient_point(&self, u: &[f64]) -> Vec<f64> {
        let n = self.base_point.len();
        (0..n)
            .map(|i| {
                linalg::to_f64(&self.base_point[i])
                    + u.iter()
                        .enumerate()
                        .map(|(k, uk)| uk * linalg::to_f64(&self.basis[(i, k)]))
                        .sum::<f64>()
            })
            .collect()
    }

    fn check_expression_zero(&self, exprs: &[Expr]) -> Result<(), DegreeError> {
        let k = self.fixed_dim();
        if k == 0 {
            return Ok(());
        }
        let at_base = expr::eval_all(exprs, &self.ambient_point(&vec![0.0; k]))?;
        let residual = at_base.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if residual > 1e-9 {
            return Err(DegreeError::NotAZero { residual });
        }
        if k <= GUARD_MAX_DIM && grid_finds_other_zero(self, exprs) {
            return Err(DegreeError::NonUniqueZero);
        }
        Ok(())
    }

    /// `d = deg(f_x, U)`, see [`local_index`].
    pub fn local_index(&self) -> Result<i64, DegreeError> {
        let k = self.fixed_dim();
        match &self.local {
            LocalMapDef::Declared(d) => Ok(*d),
            // V^H = {0}: the zero at x₀ is the whole stratum
            _ if k == 0 => Ok(1),
            LocalMapDef::Linear(a) => match linalg::signum(&a.determinant()) {
                0 => Err(DegreeError::SingularJacobian { det: 0.0 }),
                s => Ok(s),
            },
            LocalMapDef::Expression(exprs) => {
                let j = expr::jacobian_fd_of(
                    |u| expr::eval_all(exprs, &self.ambient_point(u)),
                    &vec![0.0; k],
                )?;
                let scale = j
                    .iter()
                    .map(|row| row.iter().map(|x| x.abs()).sum::<f64>())
                    .fold(1.0f64, f64::max);
                let det = DMatrix::from_fn(k, k, |r, c| j[r][c]).determinant();
                if det.abs() < SINGULAR_TOLERANCE * scale.powi(k as i32) {
                    return Err(DegreeError::SingularJacobian { det });
                }
                Ok(if det > 0.0 { 1 } else { -1 })
            }
        }
    }

    pub fn orbit_label(&self) -> String {
        format!("G·{}", linalg::format_vector(&self.base_point))
    }
}

fn min_pairwise_dist_sq(points: &[QVector]) -> Option<Rational> {
    let mut best: Option<Rational> = None;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let d = linalg::dist_sq(&points[i], &points[j]);
            if best.as_ref().is_none_or(|b| &d < b) {
                best = Some(d);
            }
        }
    }
    best
}

/// Orthonormal basis (f64) of the column span of `b`.
fn orthonormal_columns(b: &QMatrix) -> Vec<Vec<f64>> {
    let rows = b.to_f64_rows();
    let mut out: Vec<Vec<f64>> = Vec::new();
    for c in 0..b.cols() {
        let mut v: Vec<f64> = rows.iter().map(|r| r[c]).collect();
        for q in &out {
            let p: f64 = v.iter().zip(q).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(q).for_each(|(a, b)| *a -= p * b);
        }
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        out.push(v.into_iter().map(|a| a / norm).collect());
    }
    out
}

/// Samples a `33^k` grid over the ball `U` and marks cells on which every
/// component's corner values straddle zero. Marked cells are clustered by
/// adjacency; each cluster away from the base point is confirmed by a Newton
/// solve, and counts as a second zero unless Newton lands back on `x₀`.
fn grid_finds_other_zero(piece: &StandardPiece, exprs: &[Expr]) -> bool {
    let k = piece.fixed_dim();
    let q = orthonormal_columns(&piece.basis);
    let r = linalg::to_f64(&piece.radius);
    let n_pts = GUARD_GRID;
    let step = 2.0 * r / (n_pts - 1) as f64;
    let x0: Vec<f64> = piece.base_point.iter().map(linalg::to_f64).collect();
    let coord = |i: usize| -r + step * i as f64;
    let ambient = |u: &[f64]| -> Vec<f64> {
        (0..x0.len())
            .map(|i| x0[i] + (0..k).map(|d| u[d] * q[d][i]).sum::<f64>())
            .collect()
    };
    let f = |u: &[f64]| expr::eval_all(exprs, &ambient(u));

    let total = n_pts.pow(k as u32);
    let values: Vec<Option<Vec<f64>>> = (0..total)
        .map(|mut idx| {
            let mut u = vec![0.0; k];
            for ud in u.iter_mut() {
                *ud = coord(idx % n_pts);
                idx /= n_pts;
            }
            f(&u).ok()
        })
        .collect();

    let cells_per_axis = n_pts - 1;
    let center = (n_pts - 1) / 2;
    let mut candidates: HashMap<Vec<usize>, bool> = HashMap::new();
    'cells: for cidx in 0..cells_per_axis.pow(k as u32) {
        let mut c = vec![0usize; k];
        let mut t = cidx;
        for d in c.iter_mut() {
            *d = t % cells_per_axis;
            t /= cells_per_axis;
        }
        let mid2: f64 = c.iter().map(|&ci| (coord(ci) + step / 2.0).powi(2)).sum();
        if mid2 >= r * r {
            continue;
        }
        let mut lo = vec![f64::INFINITY; exprs.len()];
        let mut hi = vec![f64::NEG_INFINITY; exprs.len()];
        let mut touches_base = false;
        for corner in 0..(1usize << k) {
            let mut idx = 0;
            let mut mul = 1;
            let mut at_center = true;
            for (d, &ci) in c.iter().enumerate() {
                let p = ci + ((corner >> d) & 1);
                at_center &= p == center;
                idx += p * mul;
                mul *= n_pts;
            }
            touches_base |= at_center;
            let Some(v) = &values[idx] else {
                continue 'cells;
            };
            for (i, vi) in v.iter().enumerate() {
                lo[i] = lo[i].min(*vi);
                hi[i] = hi[i].max(*vi);
            }
        }
        if lo.iter().zip(&hi).all(|(l, h)| *l <= 0.0 && *h >= 0.0) {
            candidates.insert(c, touches_base);
        }
    }

    let neighbours = |c: &Vec<usize>| -> Vec<Vec<usize>> {
        (0..3usize.pow(k as u32))
            .filter_map(|mut t| {
                let mut nb = Vec::with_capacity(k);
                for &ci in c {
                    let v = ci as isize + (t % 3) as isize - 1;
                    t /= 3;
                    if v < 0 || v >= cells_per_axis as isize {
                        return None;
                    }
                    nb.push(v as usize);
                }
                Some(nb)
            })
            .collect()
    };
    let mut seen: HashMap<Vec<usize>, ()> = HashMap::new();
    let mut keys: Vec<&Vec<usize>> = candidates.keys().collect();
    keys.sort();
    for start in keys {
        if seen.contains_key(start) {
            continue;
        }
        let mut cluster = Vec::new();
        let mut touches_base = false;
        let mut stack = vec![start.clone()];
        while let Some(c) = stack.pop() {
            if seen.insert(c.clone(), ()).is_some() {
                continue;
            }
            touches_base |= candidates[&c];
            for nb in neighbours(&c) {
                if candidates.contains_key(&nb) && !seen.contains_key(&nb) {
                    stack.push(nb);
                }
            }
            cluster.push(c);
        }
        if touches_base {
            continue;
        }
        let mid: Vec<f64> = cluster[0].iter().map(|&ci| coord(ci) + step / 2.0).collect();
        match newton(&f, mid, k) {
            Some(u) if u.iter().map(|a| a * a).sum::<f64>().sqrt() < step => {}
            _ => return true,
        }
    }
    false
}

/// Newton iteration with finite-difference Jacobians; `None` unless it
/// converges.
fn newton<F>(f: &F, mut u: Vec<f64>, k: usize) -> Option<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>, ExprError>,
{
    for _ in 0..60 {
        let v = f(&u).ok()?;
        if v.iter().all(|x| x.abs() < 1e-12) {
            return Some(u);
        }
        let j = expr::jacobian_fd_of(f, &u).ok()?;
        let jm = DMatrix::from_fn(k, k, |r, c| j[r][c]);
        let delta = jm.lu().solve(&nalgebra::DVector::from_vec(v))?;
        let size = delta.norm();
        u.iter_mut().zip(delta.iter()).for_each(|(a, d)| *a -= d);
        if !size.is_finite() {
            return None;
        }
        if size < 1e-13 {
            return Some(u);
        }
    }
    None
}

/// `d_x = deg(f_x, U)`: the declared value, the sign of the exact
/// determinant, or the sign of the finite-difference Jacobian determinant.
pub fn local_index(piece: &StandardPiece) -> Result<i64, DegreeError> {
    piece.local_index()
}

/// One orbit's contribution `d_α [G/H_α]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitContribution {
    pub piece: usize,
    pub orbit_label: String,
    pub orbit_size: usize,
    pub class_index: usize,
    pub class_label: String,
    pub index: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeResult {
    pub value: BurnsideElement,
    pub per_orbit: Vec<OrbitContribution>,
}

impl DegreeResult {
    /// Rebuilds the value from `per_orbit`.
    pub fn recompute(&self, rep: &OrthogonalRepresentation) -> BurnsideElement {
        let group = rep.group();
        let mut v = BurnsideElement::zero(group);
        for c in &self.per_orbit {
            v = v
                .add(&BurnsideElement::basis(group, c.class_index).scale(&c.index.into()))
                .expect("same group");
        }
        v
    }
}

/// Degree of one standard piece: `d_α [G/G_x₀]`. Pieces of index 0 are
/// otopic to the empty map and contribute nothing.
pub fn deg_standard(
    piece: &StandardPiece,
    rep: &OrthogonalRepresentation,
) -> Result<DegreeResult, DegreeError> {
    let group = rep.group();
    let d = piece.local_index()?;
    let mut value = BurnsideElement::zero(group);
    let mut per_orbit = Vec::new();
    if d != 0 {
        value = BurnsideElement::basis(group, piece.class_index).scale(&d.into());
        per_orbit.push(OrbitContribution {
            piece: 0,
            orbit_label: piece.orbit_label(),
            orbit_size: piece.orbit.len(),
            class_index: piece.class_index,
            class_label: group.lattice().classes()[piece.class_index].label.clone(),
            index: d,
        });
    }
    Ok(DegreeResult { value, per_orbit })
}

/// A strictly polystandard map: disjoint standard pieces over one representation.
#[derive(Debug, Clone)]
pub struct PolystandardMap {
    rep: Arc<OrthogonalRepresentation>,
    pieces: Vec<StandardPiece>,
}

impl PolystandardMap {
    pub fn new(
        rep: Arc<OrthogonalRepresentation>,
        pieces: Vec<StandardPiece>,
    ) -> Result<Self, DegreeError> {
        if let Some(p) = pieces.iter().find(|p| p.base_point.len() != rep.dim()) {
            return Err(DegreeError::DimensionMismatch(format!(
                "piece of dimension {} in a representation of dimension {}",
                p.base_point.len(),
                rep.dim()
            )));
        }
        Ok(PolystandardMap { rep, pieces })
    }

    pub fn empty(rep: Arc<OrthogonalRepresentation>) -> Self {
        PolystandardMap {
            rep,
            pieces: Vec::new(),
        }
    }

    pub fn rep(&self) -> &Arc<OrthogonalRepresentation> {
        &self.rep
    }

    pub fn pieces(&self) -> &[StandardPiece] {
        &self.pieces
    }

    /// `f ⊔ f'` over the same representation (disjointness is checked by
    /// [`PolystandardMap::validate_disjoint`]).
    pub fn disjoint_union(&self, other: &PolystandardMap) -> Result<Self, DegreeError> {
        if !Arc::ptr_eq(&self.rep, &other.rep)
            && (self.rep.group().id() != other.rep.group().id()
                || self.rep.generator_matrices() != other.rep.generator_matrices())
        {
            return Err(DegreeError::GroupMismatch);
        }
        let mut pieces = self.pieces.clone();
        pieces.extend(other.pieces.iter().cloned());
        Ok(PolystandardMap {
            rep: self.rep.clone(),
            pieces,
        })
    }

    /// Every pair of distinct orbit points must be farther apart than the
    /// sum of their tube radii.
    pub fn validate_disjoint(&self) -> Result<(), DegreeError> {
        struct Pt<'a> {
            piece: usize,
            exact: &'a QVector,
            approx: Vec<f64>,
            radius: f64,
        }
        let radii: Vec<Rational> = self.pieces.iter().map(|p| p.tube_radius()).collect();
        let pts: Vec<Pt> = self
            .pieces
            .iter()
            .enumerate()
            .flat_map(|(i, p)| {
                let r = linalg::to_f64(&radii[i]);
                p.orbit.iter().map(move |x| Pt {
                    piece: i,
                    exact: x,
                    approx: x.iter().map(linalg::to_f64).collect(),
                    radius: r,
                })
            })
            .collect();
        for a in 0..pts.len() {
            for b in a + 1..pts.len() {
                let (p, q) = (&pts[a], &pts[b]);
                let d2: f64 = p
                    .approx
                    .iter()
                    .zip(&q.approx)
                    .map(|(x, y)| (x - y) * (x - y))
                    .sum();
                let s = p.radius + q.radius;
                if d2 > s * s * (1.0 + 1e-9) + 1e-300 {
                    continue;
                }
                let sum = &radii[p.piece] + &radii[q.piece];
                if linalg::dist_sq(p.exact, q.exact) <= &sum * &sum {
                    let (first, second) = (p.piece.min(q.piece), p.piece.max(q.piece));
                    return Err(DegreeError::OverlappingPieces { first, second });
                }
            }
        }
        Ok(())
    }
}

/// `deg_G f = Σ d_α [α]` over the pieces, in piece order.
pub fn deg_polystandard(f: &PolystandardMap) -> Result<DegreeResult, DegreeError> {
    f.validate_disjoint()?;
    let mut value = BurnsideElement::zero(f.rep.group());
    let mut per_orbit = Vec::new();
    for (i, piece) in f.pieces.iter().enumerate() {
        let part = deg_standard(piece, &f.rep)?;
        value = value.add(&part.value)?;
        per_orbit.extend(part.per_orbit.into_iter().map(|mut c| {
            c.piece = i;
            c
        }));
    }
    Ok(DegreeResult { value, per_orbit })
}

/// A nonzero degree certifies a zero of the map.
pub fn existence_check(result: &DegreeResult) -> bool {
    !result.value.is_zero()
}

/// Which factor pieces a product piece came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductProvenance {
    pub left_piece: usize,
    pub right_piece: usize,
    pub d_alpha: i64,
    pub d_beta: i64,
    pub d_gamma: i64,
}

/// Points of the orbit of `piece` indexed as `G/H`; coset `i` is `ρ(rep_i) x₀`.
fn orbit_as_gset(
    rep: &OrthogonalRepresentation,
    piece: &StandardPiece,
) -> (FiniteGSet, Vec<QVector>) {
    let group = rep.group();
    let set = FiniteGSet::coset_space(group, &piece.isotropy);
    let (_, reps) = group.left_cosets(&piece.isotropy);
    let points = reps.iter().map(|&g| rep.act(g, &piece.base_point)).collect();
    (set, points)
}

/// `f × f'` over `V ⊕ W`, one declared piece per diagonal orbit `γ ⊆ α × β`
/// with index `d_α · d_β`.
pub fn product_map(
    f: &PolystandardMap,
    g: &PolystandardMap,
) -> Result<PolystandardMap, DegreeError> {
    product_map_with_provenance(f, g).map(|(m, _)| m)
}

pub fn product_map_with_provenance(
    f: &PolystandardMap,
    g: &PolystandardMap,
) -> Result<(PolystandardMap, Vec<ProductProvenance>), DegreeError> {
    if f.rep.group().id() != g.rep.group().id() {
        return Err(DegreeError::GroupMismatch);
    }
    let group = f.rep.group().clone();
    let sum = Arc::new(f.rep.direct_sum(&g.rep)?);
    let mut pieces = Vec::new();
    let mut provenance = Vec::new();
    for (i, p) in f.pieces.iter().enumerate() {
        let d_alpha = p.local_index()?;
        let (alpha, alpha_pts) = orbit_as_gset(&f.rep, p);
        let s = p.radius.clone().min(p.epsilon.clone());
        for (j, q) in g.pieces.iter().enumerate() {
            let d_beta = q.local_index()?;
            let d_gamma = d_alpha.checked_mul(d_beta).ok_or(DegreeError::IndexOverflow)?;
            let (beta, beta_pts) = orbit_as_gset(&g.rep, q);
            let t = q.radius.clone().min(q.epsilon.clone());
            let radius = s.clone().min(t) / linalg::rational(2);
            let pairs = alpha.product(&beta)?;
            for orbit in pairs.orbits(&group) {
                let (a, b) = (orbit[0] / beta.size(), orbit[0] % beta.size());
                let mut base = alpha_pts[a].clone();
                base.extend(beta_pts[b].iter().cloned());
                let piece = StandardPiece::new(
                    &sum,
                    base,
                    radius.clone(),
                    radius.clone(),
                    LocalMapDef::Declared(d_gamma),
                )?;
                pieces.push(piece);
                provenance.push(ProductProvenance {
                    left_piece: i,
                    right_piece: j,
                    d_alpha,
                    d_beta,
                    d_gamma,
                });
            }
        }
    }
    Ok((PolystandardMap { rep: sum, pieces }, provenance))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductOrbitCheck {
    pub provenance: ProductProvenance,
    pub orbit_label: String,
    pub class_label: String,
    /// `G_(y,y') = G_y ∩ G_y'`.
    pub isotropy_is_intersection: bool,
    pub index_law_holds: bool,
}

#[derive(Debug, Clone)]
pub struct ProductReport {
    pub lhs: BurnsideElement,
    pub rhs: BurnsideElement,
    pub equal: bool,
    pub deg_left: BurnsideElement,
    pub deg_right: BurnsideElement,
    pub per_orbit: Vec<ProductOrbitCheck>,
    pub product: PolystandardMap,
}

impl ProductReport {
    pub fn all_checks_pass(&self) -> bool {
        self.equal
            && self
                .per_orbit
                .iter()
                .all(|c| c.isotropy_is_intersection && c.index_law_holds)
    }
}

/// Computes `deg_G(f × f')` and `deg_G f · deg_G f'` independently.
pub fn verify_product(
    ring: &BurnsideRing,
    f: &PolystandardMap,
    g: &PolystandardMap,
) -> Result<ProductReport, DegreeError> {
    if ring.group().id() != f.rep.group().id() || ring.group().id() != g.rep.group().id() {
        return Err(DegreeError::GroupMismatch);
    }
    let deg_left = deg_polystandard(f)?.value;
    let deg_right = deg_polystandard(g)?.value;
    let rhs = ring.mul(&deg_left, &deg_right)?;
    let (product, provenance) = product_map_with_provenance(f, g)?;
    let lhs = deg_polystandard(&product)?.value;

    let group = ring.group();
    let n = f.rep.dim();
    let per_orbit = product
        .pieces
        .iter()
        .zip(provenance)
        .map(|(piece, prov)| {
            let (y, y2) = piece.base_point.split_at(n);
            let expected = group.intersect(&f.rep.isotropy(y), &g.rep.isotropy(y2));
            ProductOrbitCheck {
                orbit_label: piece.orbit_label(),
                class_label: group.lattice().classes()[piece.class_index].label.clone(),
                isotropy_is_intersection: expected == piece.isotropy,
                index_law_holds: prov.d_gamma == prov.d_alpha * prov.d_beta
                    && piece.local_index().ok() == Some(prov.d_gamma),
                provenance: prov,
            }
        })
        .collect();
    Ok(ProductReport {
        equal: lhs == rhs,
        lhs,
        rhs,
        deg_left,
        deg_right,
        per_orbit,
        product,
    })
}

fn rational_expr(q: &Rational) -> Expr {
    match (q.numer().to_i64(), q.denom().to_i64()) {
        (Some(n), Some(d)) => Expr::rational(n, d),
        _ => Expr::num(linalg::to_f64(q)),
    }
}

/// `Σ coeffs[i] · terms[i]`, skipping zero coefficients.
fn linear_combination(coeffs: &[Rational], terms: &[Expr]) -> Expr {
    let mut acc: Option<Expr> = None;
    for (c, t) in coeffs.iter().zip(terms) {
        if c.is_zero() {
            continue;
        }
        let term = if c == &linalg::rational(1) {
            t.clone()
        } else {
            Expr::mul(rational_expr(c), t.clone())
        };
        acc = Some(match acc {
            None => term,
            Some(a) => Expr::add(a, term),
        });
    }
    acc.unwrap_or(Expr::Num(0.0))
}

/// The piece `g·f`: base point `g x₀`, local map `y ↦ g f(g⁻¹ y)` written
/// in the canonical basis of V^{gHg⁻¹}.
pub fn conjugate_piece(
    rep: &OrthogonalRepresentation,
    piece: &StandardPiece,
    g: usize,
) -> Result<StandardPiece, DegreeError> {
    let group = rep.group();
    let new_base = rep.act(g, &piece.base_point);
    let k_sub = group.conjugate_subgroup(g, &piece.isotropy);
    let b = &piece.basis;
    let b_new = rep.fixed_basis_matrix(&k_sub)?;
    let g_inv = group.inv(g);
    // T: coordinates of ρ(g)⁻¹ b'_j in the old basis; S: coordinates of ρ(g) b_j in the new one
    let coords = |basis: &QMatrix, vectors: &QMatrix| -> QMatrix {
        let cols: Vec<QVector> = (0..vectors.cols())
            .map(|j| {
                basis
                    .solve_in_span(&vectors.column(j))
                    .expect("ρ(g) maps V^H onto V^{gHg⁻¹}")
            })
            .collect();
        QMatrix::from_columns(basis.cols(), &cols)
    };
    let t = coords(b, &rep.matrix(g_inv).mul(&b_new));
    let s = coords(&b_new, &rep.matrix(g).mul(b));
    let local = match &piece.local {
        LocalMapDef::Declared(d) => LocalMapDef::Declared(*d),
        LocalMapDef::Linear(a) => LocalMapDef::Linear(s.mul(a).mul(&t)),
        LocalMapDef::Expression(exprs) => {
            let n = rep.dim();
            let vars: Vec<Expr> = (0..n).map(Expr::Var).collect();
            let inv = rep.matrix(g_inv);
            let pulled: Vec<Expr> = (0..n)
                .map(|i| linear_combination(inv.row(i), &vars))
                .collect();
            let substituted: Vec<Expr> = exprs.iter().map(|e| e.substitute(&pulled)).collect();
            LocalMapDef::Expression(
                (0..s.rows())
                    .map(|i| linear_combination(s.row(i), &substituted))
                    .collect(),
            )
        }
    };
    StandardPiece::new(
        rep,
        new_base,
        piece.radius.clone(),
        piece.epsilon.clone(),
        local,
    )
}

impl fmt::Display for LocalMapDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LocalMapDef::Linear(a) => write!(f, "linear {a}"),
            LocalMapDef::Expression(es) => {
                let parts: Vec<String> = es.iter().map(|e| e.to_string()).collect();
                write!(f, "expr [{}]", parts.join("; "))
            }
            LocalMapDef::Declared(d) => write!(f, "degree {d}"),
        }
    }
}
