#![allow(dead_code)]

use std::sync::Arc;

use burneq::burnside::{decompose_gset, product_gset};
use burneq::degree::{LocalMapDef, PolystandardMap, StandardPiece};
use burneq::linalg::{self, QMatrix, Rational};
use burneq::{
    generate_group, realize_element, BurnsideElement, Expr, FiniteGroup, OrthogonalRepresentation,
    Permutation, RealizationTarget,
};
use num_traits::{ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type Rng8 = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng8 {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn group(gens: &[&[usize]]) -> Arc<FiniteGroup> {
    let perms: Vec<Permutation> = gens
        .iter()
        .map(|g| Permutation::new(g.to_vec()).unwrap())
        .collect();
    Arc::new(generate_group(&perms).unwrap())
}

pub fn z2() -> Arc<FiniteGroup> {
    group(&[&[1, 0]])
}

pub fn z2xz2() -> Arc<FiniteGroup> {
    group(&[&[1, 0, 2, 3], &[0, 1, 3, 2]])
}

pub fn s3() -> Arc<FiniteGroup> {
    group(&[&[1, 0, 2], &[1, 2, 0]])
}

pub fn d4() -> Arc<FiniteGroup> {
    group(&[&[1, 2, 3, 0], &[2, 1, 0, 3]])
}

/// Z/2, Z/4, Z/2×Z/2, Z/6, S3, D4, Q8 (regular action), A4, with their
/// expected orders and numbers of conjugacy classes of subgroups.
pub fn test_groups() -> Vec<(&'static str, Arc<FiniteGroup>, usize, usize)> {
    vec![
        ("Z/2", z2(), 2, 2),
        ("Z/4", group(&[&[1, 2, 3, 0]]), 4, 3),
        ("Z/2xZ/2", z2xz2(), 4, 5),
        ("Z/6", group(&[&[1, 2, 3, 4, 5, 0]]), 6, 4),
        ("S3", s3(), 6, 4),
        ("D4", d4(), 8, 8),
        (
            "Q8",
            group(&[&[2, 3, 1, 0, 6, 7, 5, 4], &[4, 5, 7, 6, 1, 0, 2, 3]]),
            8,
            6,
        ),
        ("A4", group(&[&[1, 2, 0, 3], &[1, 0, 3, 2]]), 12, 5),
    ]
}

pub fn mat(rows: &[&[i64]]) -> QMatrix {
    QMatrix::from_i64_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
}

pub fn rep(group: &Arc<FiniteGroup>, mats: Vec<QMatrix>) -> Arc<OrthogonalRepresentation> {
    Arc::new(OrthogonalRepresentation::new(group.clone(), mats).unwrap())
}

pub struct RepCase {
    pub name: &'static str,
    pub rep: Arc<OrthogonalRepresentation>,
    /// Representations of the same group used as second factors.
    pub partners: Vec<Arc<OrthogonalRepresentation>>,
}

/// The Z/2 sign representation on R.
pub fn z2_sign() -> Arc<OrthogonalRepresentation> {
    rep(&z2(), vec![mat(&[&[-1]])])
}

pub fn s3_perm_rep(g: &Arc<FiniteGroup>) -> Arc<OrthogonalRepresentation> {
    rep(
        g,
        vec![
            mat(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, 1]]),
            mat(&[&[0, 0, 1], &[1, 0, 0], &[0, 1, 0]]),
        ],
    )
}

pub fn test_reps() -> Vec<RepCase> {
    let g = z2();
    let sign = rep(&g, vec![mat(&[&[-1]])]);
    let z2_case = RepCase {
        name: "Z/2 sign on R",
        rep: sign.clone(),
        partners: vec![sign, rep(&g, vec![mat(&[&[-1, 0], &[0, 1]])])],
    };

    let g = z2xz2();
    let coords = rep(&g, vec![mat(&[&[-1, 0], &[0, 1]]), mat(&[&[1, 0], &[0, -1]])]);
    let v4_case = RepCase {
        name: "Z/2xZ/2 coordinate signs on R^2",
        rep: coords.clone(),
        partners: vec![coords, rep(&g, vec![mat(&[&[-1]]), mat(&[&[-1]])])],
    };

    let g = s3();
    let perm = s3_perm_rep(&g);
    let s3_case = RepCase {
        name: "S3 permutation on R^3",
        rep: perm.clone(),
        partners: vec![perm, rep(&g, vec![mat(&[&[-1]]), mat(&[&[1]])])],
    };

    let g = d4();
    let std = rep(&g, vec![mat(&[&[0, -1], &[1, 0]]), mat(&[&[-1, 0], &[0, 1]])]);
    let d4_case = RepCase {
        name: "D4 standard on R^2",
        rep: std.clone(),
        partners: vec![std, rep(&g, vec![mat(&[&[-1]]), mat(&[&[1]])])],
    };
    vec![z2_case, v4_case, s3_case, d4_case]
}

/// Determinant by cofactor expansion, for small integer matrices.
pub fn det_i64(m: &[Vec<i64>]) -> i64 {
    let n = m.len();
    match n {
        0 => 1,
        1 => m[0][0],
        _ => (0..n)
            .map(|j| {
                let minor: Vec<Vec<i64>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|&(c, _)| c != j)
                            .map(|(_, &v)| v)
                            .collect()
                    })
                    .collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * m[0][j] * det_i64(&minor)
            })
            .sum(),
    }
}

pub fn random_int_matrix(rng: &mut Rng8, n: usize, bound: i64) -> Vec<Vec<i64>> {
    (0..n)
        .map(|_| (0..n).map(|_| rng.gen_range(-bound..=bound)).collect())
        .collect()
}

pub fn random_nonsingular(rng: &mut Rng8, n: usize, bound: i64) -> Vec<Vec<i64>> {
    loop {
        let m = random_int_matrix(rng, n, bound);
        if det_i64(&m) != 0 {
            return m;
        }
    }
}

/// Isotropy of `x` by scanning every element.
pub fn brute_isotropy(rep: &OrthogonalRepresentation, x: &[Rational]) -> Vec<usize> {
    (0..rep.group().order())
        .filter(|&g| rep.matrix(g).mul_vec(x) == x)
        .collect()
}

pub fn brute_class(rep: &OrthogonalRepresentation, x: &[Rational]) -> usize {
    let group = rep.group();
    let h = group
        .subgroup_from_elements(&brute_isotropy(rep, x))
        .unwrap();
    group.lattice().class_of(&h).unwrap()
}

/// `Σ a_i b_j [G/H_i × G/H_j]` decomposed by orbit counting.
pub fn orbit_product(
    group: &FiniteGroup,
    a: &BurnsideElement,
    b: &BurnsideElement,
) -> BurnsideElement {
    let mut out = BurnsideElement::zero(group);
    for (i, ai) in a.coeffs().iter().enumerate() {
        for (j, bj) in b.coeffs().iter().enumerate() {
            if ai.is_zero() || bj.is_zero() {
                continue;
            }
            let part = decompose_gset(group, &product_gset(group, i, j)).unwrap();
            out = out.add(&part.scale(&(ai * bj))).unwrap();
        }
    }
    out
}

/// A random element supported on occupied strata; the `[G/G]` coefficient
/// stays in {0,1} when dim V^G = 0.
pub fn random_target(
    rep: &OrthogonalRepresentation,
    rng: &mut Rng8,
    max_abs: i64,
) -> BurnsideElement {
    let group = rep.group();
    let table = rep.orbit_types();
    let top = group.lattice().class_count() - 1;
    let coeffs: Vec<i64> = table
        .entries
        .iter()
        .map(|e| {
            if !e.occupied || rng.gen_bool(0.4) {
                0
            } else if e.fixed_dim == 0 {
                debug_assert_eq!(e.class_index, top);
                rng.gen_range(0..=1)
            } else {
                rng.gen_range(-max_abs..=max_abs)
            }
        })
        .collect();
    BurnsideElement::from_i64(group, &coeffs).unwrap()
}

#[derive(Debug, Clone)]
pub enum PieceKind {
    Linear(Vec<Vec<i64>>),
    Declared(i64),
    /// Diagonal of the linear part.
    Expression(Vec<i64>),
    Origin,
}

/// What the test knows about each piece, independent of the library.
#[derive(Debug, Clone)]
pub struct PieceInfo {
    pub kind: PieceKind,
    pub index: i64,
    pub class: usize,
}

fn rat_expr(q: &Rational) -> Expr {
    Expr::rational(q.numer().to_i64().unwrap(), q.denom().to_i64().unwrap())
}

/// `u_j(x)`: the coordinates of `x - x₀` in the basis of V^H.
fn coordinate_exprs(piece: &StandardPiece) -> Vec<Expr> {
    let b = piece.basis();
    let bt = b.transpose();
    let pinv = bt.mul(b).inverse().unwrap().mul(&bt);
    let x0 = piece.base_point();
    (0..pinv.rows())
        .map(|j| {
            let row = pinv.row(j);
            let mut acc: Option<Expr> = None;
            for (l, c) in row.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let term = Expr::mul(rat_expr(c), Expr::Var(l));
                acc = Some(match acc {
                    None => term,
                    Some(a) => Expr::add(a, term),
                });
            }
            let shift = linalg::dot(row, x0);
            Expr::sub(acc.unwrap(), rat_expr(&shift))
        })
        .collect()
}

/// `f_i = m_i u_i + u_1² / 2`, whose only zero in U is `u = 0`.
pub fn quadratic_exprs(piece: &StandardPiece, diag: &[i64]) -> Vec<Expr> {
    let u = coordinate_exprs(piece);
    let square = Expr::mul(Expr::rational(1, 2), Expr::pow(u[0].clone(), 2));
    diag.iter()
        .zip(&u)
        .map(|(&m, ui)| Expr::add(Expr::mul(Expr::rational(m, 1), ui.clone()), square.clone()))
        .collect()
}

/// Replaces the local map of `piece` with a random variant.
pub fn random_variant(
    rep: &OrthogonalRepresentation,
    piece: &StandardPiece,
    rng: &mut Rng8,
    allow_expressions: bool,
) -> (StandardPiece, PieceInfo) {
    let k = piece.fixed_dim();
    let class = brute_class(rep, piece.base_point());
    let (local, kind, index) = if k == 0 {
        if rng.gen_bool(0.5) {
            (LocalMapDef::Declared(1), PieceKind::Declared(1), 1)
        } else {
            (LocalMapDef::Linear(QMatrix::zeros(0, 0)), PieceKind::Origin, 1)
        }
    } else {
        match rng.gen_range(0..if allow_expressions { 3 } else { 2 }) {
            0 => {
                let m = random_nonsingular(rng, k, 3);
                let d = det_i64(&m).signum();
                let q = QMatrix::from_i64_rows(&m).unwrap();
                (LocalMapDef::Linear(q), PieceKind::Linear(m), d)
            }
            1 => {
                let d = *[-3i64, -2, -1, 1, 2, 3].choose(rng).unwrap();
                (LocalMapDef::Declared(d), PieceKind::Declared(d), d)
            }
            _ => {
                let diag: Vec<i64> = (0..k).map(|_| *[-2i64, -1, 1, 2].choose(rng).unwrap()).collect();
                let d = diag.iter().map(|m| m.signum()).product();
                (
                    LocalMapDef::Expression(quadratic_exprs(piece, &diag)),
                    PieceKind::Expression(diag),
                    d,
                )
            }
        }
    };
    let new = StandardPiece::new(
        rep,
        piece.base_point().to_vec(),
        piece.radius().clone(),
        piece.epsilon().clone(),
        local,
    )
    .unwrap();
    (new, PieceInfo { kind, index, class })
}

pub struct RandomMap {
    pub map: PolystandardMap,
    pub info: Vec<PieceInfo>,
    /// `Σ index · [G/H]` from `info`.
    pub expected: BurnsideElement,
}

/// Realizes a random target, then swaps each piece's local map for a random
/// variant.
pub fn random_map(
    rep: &Arc<OrthogonalRepresentation>,
    rng: &mut Rng8,
    allow_expressions: bool,
) -> RandomMap {
    let group = rep.group();
    let target = random_target(rep, rng, 2);
    let base = realize_element(&RealizationTarget::new(rep.clone(), target).unwrap()).unwrap();
    let mut pieces = Vec::new();
    let mut info = Vec::new();
    let mut expected = BurnsideElement::zero(group);
    for p in base.pieces() {
        let (piece, i) = random_variant(rep, p, rng, allow_expressions);
        expected = expected
            .add(&BurnsideElement::basis(group, i.class).scale(&i.index.into()))
            .unwrap();
        pieces.push(piece);
        info.push(i);
    }
    RandomMap {
        map: PolystandardMap::new(rep.clone(), pieces).unwrap(),
        info,
        expected,
    }
}
