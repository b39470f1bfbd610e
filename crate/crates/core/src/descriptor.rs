//! JSON descriptors for groups, representations and maps.
//!
//! ```text
//! group: {"points": 3, "generators": [[1,0,2],[1,2,0]]}          0-based images
//! rep:   {"dim": 1, "generator_matrices": [[["-1"]]]}             rationals as "p/q" or integers
//! map:   {"rep": "sign", "pieces": [{"base_point": ["1"], "epsilon": "1/4", "radius": "1/4",
//!         "local": {"type": "linear", "matrix": [["1"]]}}]}
//! ```
//!
//! `local` is one of `{"type":"linear","matrix":[[...]]}`,
//! `{"type":"expr","exprs":["x1 - x2^2", ...]}` or `{"type":"degree","d":-2}`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::degree::{DegreeError, LocalMapDef, PolystandardMap, StandardPiece};
use crate::expr::{self, ExprError};
use crate::group::{FiniteGroup, GroupError};
use crate::linalg::{self, QMatrix, Rational};
use crate::perm::Permutation;
use crate::representation::{OrthogonalRepresentation, RepError};

#[derive(Debug, Error)]
pub enum DescriptorError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bad rational {0:?}")]
    BadRational(String),
    #[error("matrix {index}: {message}")]
    BadMatrix { index: usize, message: String },
    #[error("piece {piece}: {source}")]
    Piece { piece: usize, source: DegreeError },
    #[error("piece {piece}: {source}")]
    Expression { piece: usize, source: ExprError },
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Degree(#[from] DegreeError),
}

/// A rational written either as a JSON integer or as a `"p/q"` string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RationalText {
    Int(i64),
    Text(String),
}

impl RationalText {
    pub fn to_rational(&self) -> Result<Rational, DescriptorError> {
        match self {
            RationalText::Int(n) => Ok(linalg::rational(*n)),
            RationalText::Text(s) => {
                linalg::parse_rational(s).ok_or_else(|| DescriptorError::BadRational(s.clone()))
            }
        }
    }
}

impl From<&Rational> for RationalText {
    fn from(q: &Rational) -> Self {
        RationalText::Text(linalg::format_rational(q))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupDescriptor {
    pub points: usize,
    pub generators: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepDescriptor {
    pub dim: usize,
    pub generator_matrices: Vec<Vec<Vec<RationalText>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum LocalDescriptor {
    Linear { matrix: Vec<Vec<RationalText>> },
    Expr { exprs: Vec<String> },
    Degree { d: i64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PieceDescriptor {
    pub base_point: Vec<RationalText>,
    pub epsilon: RationalText,
    pub radius: RationalText,
    pub local: LocalDescriptor,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapDescriptor {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rep: Option<String>,
    pub pieces: Vec<PieceDescriptor>,
}

fn rationals(row: &[RationalText]) -> Result<Vec<Rational>, DescriptorError> {
    row.iter().map(RationalText::to_rational).collect()
}

fn matrix(rows: &[Vec<RationalText>], index: usize) -> Result<QMatrix, DescriptorError> {
    let rows = rows
        .iter()
        .map(|r| rationals(r))
        .collect::<Result<Vec<_>, _>>()?;
    if rows.is_empty() {
        return Ok(QMatrix::zeros(0, 0));
    }
    QMatrix::from_rows(rows).ok_or_else(|| DescriptorError::BadMatrix {
        index,
        message: "rows have different lengths".into(),
    })
}

fn matrix_text(m: &QMatrix) -> Vec<Vec<RationalText>> {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(RationalText::from).collect())
        .collect()
}

pub fn parse_group(json: &str) -> Result<FiniteGroup, DescriptorError> {
    parse_group_with_cap(json, crate::group::DEFAULT_ORDER_CAP)
}

pub fn parse_group_with_cap(json: &str, cap: usize) -> Result<FiniteGroup, DescriptorError> {
    let d: GroupDescriptor = serde_json::from_str(json)?;
    build_group(&d, cap)
}

pub fn build_group(d: &GroupDescriptor, cap: usize) -> Result<FiniteGroup, DescriptorError> {
    let gens = d
        .generators
        .iter()
        .enumerate()
        .map(|(index, images)| {
            if images.len() != d.points {
                return Err(GroupError::PointCountMismatch {
                    index,
                    expected: d.points,
                    found: images.len(),
                });
            }
            Permutation::new(images.clone()).map_err(GroupError::from)
        })
        .collect::<Result<Vec<_>, GroupError>>()?;
    Ok(FiniteGroup::generate(&gens, cap)?)
}

pub fn group_descriptor(group: &FiniteGroup) -> GroupDescriptor {
    GroupDescriptor {
        points: group.points(),
        generators: group.generators().iter().map(|p| p.images().to_vec()).collect(),
    }
}

pub fn parse_rep(
    group: Arc<FiniteGroup>,
    json: &str,
) -> Result<OrthogonalRepresentation, DescriptorError> {
    let d: RepDescriptor = serde_json::from_str(json)?;
    build_rep(group, &d)
}

pub fn build_rep(
    group: Arc<FiniteGroup>,
    d: &RepDescriptor,
) -> Result<OrthogonalRepresentation, DescriptorError> {
    let mats = d
        .generator_matrices
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let m = matrix(m, i)?;
            if m.rows() != d.dim || m.cols() != d.dim {
                return Err(DescriptorError::BadMatrix {
                    index: i,
                    message: format!("expected {0}x{0}, got {1}x{2}", d.dim, m.rows(), m.cols()),
                });
            }
            Ok(m)
        })
        .collect::<Result<Vec<_>, _>>()?;
    if mats.is_empty() && d.dim > 0 {
        return Ok(OrthogonalRepresentation::trivial(group, d.dim));
    }
    Ok(OrthogonalRepresentation::new(group, mats)?)
}

pub fn rep_descriptor(rep: &OrthogonalRepresentation) -> RepDescriptor {
    RepDescriptor {
        dim: rep.dim(),
        generator_matrices: rep.generator_matrices().iter().map(matrix_text).collect(),
    }
}

pub fn parse_map(
    rep: Arc<OrthogonalRepresentation>,
    json: &str,
) -> Result<PolystandardMap, DescriptorError> {
    let d: MapDescriptor = serde_json::from_str(json)?;
    build_map(rep, &d)
}

pub fn build_map(
    rep: Arc<OrthogonalRepresentation>,
    d: &MapDescriptor,
) -> Result<PolystandardMap, DescriptorError> {
    let pieces = d
        .pieces
        .iter()
        .enumerate()
        .map(|(i, p)| build_piece(&rep, p, i))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PolystandardMap::new(rep, pieces)?)
}

fn build_piece(
    rep: &OrthogonalRepresentation,
    p: &PieceDescriptor,
    index: usize,
) -> Result<StandardPiece, DescriptorError> {
    let local = match &p.local {
        LocalDescriptor::Linear { matrix: m } => LocalMapDef::Linear(matrix(m, index)?),
        LocalDescriptor::Expr { exprs } => LocalMapDef::Expression(
            exprs
                .iter()
                .map(|s| expr::parse(s, rep.dim()))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|source| DescriptorError::Expression {
                    piece: index,
                    source,
                })?,
        ),
        LocalDescriptor::Degree { d } => LocalMapDef::Declared(*d),
    };
    StandardPiece::new(
        rep,
        rationals(&p.base_point)?,
        p.radius.to_rational()?,
        p.epsilon.to_rational()?,
        local,
    )
    .map_err(|source| DescriptorError::Piece {
        piece: index,
        source,
    })
}

pub fn map_descriptor(map: &PolystandardMap, rep_id: Option<String>) -> MapDescriptor {
    MapDescriptor {
        rep: rep_id,
        pieces: map
            .pieces()
            .iter()
            .map(|p| PieceDescriptor {
                base_point: p.base_point().iter().map(RationalText::from).collect(),
                epsilon: p.epsilon().into(),
                radius: p.radius().into(),
                local: match p.local() {
                    LocalMapDef::Linear(m) => LocalDescriptor::Linear {
                        matrix: matrix_text(m),
                    },
                    LocalMapDef::Expression(es) => LocalDescriptor::Expr {
                        exprs: es.iter().map(|e| e.to_string()).collect(),
                    },
                    LocalMapDef::Declared(d) => LocalDescriptor::Degree { d: *d },
                },
            })
            .collect(),
    }
}
