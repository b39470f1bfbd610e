//! Orthogonal representations over the rationals: fixed subspaces V^H,
//! isotropy groups, orbits and the orbit-type table.

use std::collections::HashSet;
use std::sync::{Arc, OnceLock};

use num_traits::Zero;
use thiserror::Error;

use crate::group::{ElementSet, FiniteGroup, Subgroup};
use crate::linalg::{self, QMatrix, QVector, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RepError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("generator matrix {generator} is not orthogonal")]
    NotOrthogonal { generator: usize },
    #[error("generator matrices violate a group relation at element {element}, generator {generator}")]
    NotAHomomorphism { element: usize, generator: usize },
    #[error("representations are over different groups")]
    GroupMismatch,
    #[error("element set is not a subgroup of the group")]
    NotASubgroup,
}

#[derive(Debug)]
struct FixedData {
    projector: QMatrix,
    basis: Vec<QVector>,
}

/// `g ↦ ρ(g)`, one exact orthogonal matrix per group element.
#[derive(Debug)]
pub struct OrthogonalRepresentation {
    group: Arc<FiniteGroup>,
    dim: usize,
    generator_matrices: Vec<QMatrix>,
    matrices: Vec<QMatrix>,
    fixed: Vec<OnceLock<FixedData>>,
}

/// The fixed subspace V^H with its canonical basis (kernel basis of `P_H - I`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedSubspace {
    pub subgroup_class: usize,
    pub basis: Vec<QVector>,
}

impl FixedSubspace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitTypeEntry {
    pub class_index: usize,
    pub label: String,
    pub fixed_dim: usize,
    /// `Ω_H ≠ ∅`.
    pub occupied: bool,
    pub witness: Option<QVector>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitTypeTable {
    pub entries: Vec<OrbitTypeEntry>,
}

impl OrbitTypeTable {
    pub fn occupied_classes(&self) -> Vec<usize> {
        self.entries
            .iter()
            .filter(|e| e.occupied)
            .map(|e| e.class_index)
            .collect()
    }
}

pub fn build_representation(
    group: Arc<FiniteGroup>,
    generator_matrices: Vec<QMatrix>,
) -> Result<OrthogonalRepresentation, RepError> {
    OrthogonalRepresentation::new(group, generator_matrices)
}

impl OrthogonalRepresentation {
    pub fn new(
        group: Arc<FiniteGroup>,
        generator_matrices: Vec<QMatrix>,
    ) -> Result<Self, RepError> {
        let k = group.generators().len();
        if generator_matrices.len() != k {
            return Err(RepError::DimensionMismatch(format!(
                "{} generator matrices for {k} group generators",
                generator_matrices.len()
            )));
        }
        let dim = generator_matrices[0].rows();
        for (i, m) in generator_matrices.iter().enumerate() {
            if m.rows() != dim || m.cols() != dim {
                return Err(RepError::DimensionMismatch(format!(
                    "generator matrix {i} is {}x{}, expected {dim}x{dim}",
                    m.rows(),
                    m.cols()
                )));
            }
            if !m.is_orthogonal() {
                return Err(RepError::NotOrthogonal { generator: i });
            }
        }

        let mut matrices: Vec<QMatrix> = Vec::with_capacity(group.order());
        matrices.push(QMatrix::identity(dim));
        for x in 1..group.order() {
            let (p, s) = group.parent(x).expect("non-identity has a parent");
            matrices.push(matrices[p].mul(&generator_matrices[s]));
        }
        // ρ(g s) = ρ(g) ρ(s) for every g and generator s forces the full law
        for g in 0..group.order() {
            for (s, &se) in group.generator_elements().iter().enumerate() {
                if matrices[group.mul(g, se)] != matrices[g].mul(&generator_matrices[s]) {
                    return Err(RepError::NotAHomomorphism {
                        element: g,
                        generator: s,
                    });
                }
            }
        }

        let subgroup_count = group.lattice().subgroups().len();
        Ok(OrthogonalRepresentation {
            group,
            dim,
            generator_matrices,
            matrices,
            fixed: (0..subgroup_count).map(|_| OnceLock::new()).collect(),
        })
    }

    /// `dim` copies of the trivial representation.
    pub fn trivial(group: Arc<FiniteGroup>, dim: usize) -> Self {
        let mats = vec![QMatrix::identity(dim); group.generators().len()];
        Self::new(group, mats).expect("identity matrices form a representation")
    }

    /// `V ⊕ W` with block-diagonal matrices.
    pub fn direct_sum(&self, other: &OrthogonalRepresentation) -> Result<Self, RepError> {
        if self.group.id() != other.group.id() {
            return Err(RepError::GroupMismatch);
        }
        let gens = self
            .generator_matrices
            .iter()
            .zip(&other.generator_matrices)
            .map(|(a, b)| QMatrix::block_diagonal(a, b))
            .collect();
        Self::new(self.group.clone(), gens)
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generator_matrices(&self) -> &[QMatrix] {
        &self.generator_matrices
    }

    pub fn matrix(&self, g: usize) -> &QMatrix {
        &self.matrices[g]
    }

    pub fn act(&self, g: usize, x: &[Rational]) -> QVector {
        self.matrices[g].mul_vec(x)
    }

    fn subgroup_index(&self, h: &Subgroup) -> Result<usize, RepError> {
        if h.mask().is_empty() || h.elements().iter().any(|&e| e >= self.group.order()) {
            return Err(RepError::NotASubgroup);
        }
        self.group
            .lattice()
            .index_of(h.mask())
            .ok_or(RepError::NotASubgroup)
    }

    fn fixed_data(&self, index: usize) -> &FixedData {
        self.fixed[index].get_or_init(|| {
            let h = &self.group.lattice().subgroups()[index];
            let mut sum = QMatrix::zeros(self.dim, self.dim);
            for &x in h.elements() {
                sum = sum.add(&self.matrices[x]);
            }
            let projector = sum.scale(&linalg::ratio(1, h.order() as i64));
            let basis = projector.sub(&QMatrix::identity(self.dim)).kernel();
            FixedData { projector, basis }
        })
    }

    /// The averaging projector `P_H = |H|⁻¹ Σ ρ(h)`; orthogonal onto V^H.
    pub fn projector(&self, h: &Subgroup) -> Result<&QMatrix, RepError> {
        Ok(&self.fixed_data(self.subgroup_index(h)?).projector)
    }

    pub fn fixed_basis(&self, h: &Subgroup) -> Result<&[QVector], RepError> {
        Ok(&self.fixed_data(self.subgroup_index(h)?).basis)
    }

    pub fn fixed_subspace(&self, h: &Subgroup) -> Result<FixedSubspace, RepError> {
        let index = self.subgroup_index(h)?;
        Ok(FixedSubspace {
            subgroup_class: self.group.lattice().class_of_index(index),
            basis: self.fixed_data(index).basis.clone(),
        })
    }

    /// `n × dim V^H` matrix whose columns are the canonical basis of V^H.
    pub fn fixed_basis_matrix(&self, h: &Subgroup) -> Result<QMatrix, RepError> {
        Ok(QMatrix::from_columns(self.dim, self.fixed_basis(h)?))
    }

    /// `G_x`, by testing `ρ(g)x = x` for every element.
    pub fn isotropy(&self, x: &[Rational]) -> Subgroup {
        let n = self.group.order();
        let elements: Vec<usize> = (0..n)
            .filter(|&g| self.matrices[g].mul_vec(x) == x)
            .collect();
        let mask = ElementSet::from_elements(n, &elements);
        let lattice = self.group.lattice();
        let idx = lattice.index_of(&mask).expect("stabilizers are subgroups");
        lattice.subgroups()[idx].clone()
    }

    /// `Gx` without repetition, ordered by first occurrence over element indices.
    pub fn orbit(&self, x: &[Rational]) -> Vec<QVector> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for g in 0..self.group.order() {
            let y = self.act(g, x);
            if seen.insert(y.clone()) {
                out.push(y);
            }
        }
        out
    }

    /// Squared distance from `x` to V^K.
    pub fn dist_sq_to_fixed(&self, x: &[Rational], k: &Subgroup) -> Result<Rational, RepError> {
        let p = self.projector(k)?;
        Ok(linalg::dist_sq(x, &p.mul_vec(x)))
    }

    /// Squared distance from `x ∈ V^H` to the points of V^H whose isotropy is
    /// strictly larger than `H`; `None` when `H = G`.
    pub fn stratum_clearance_sq(
        &self,
        x: &[Rational],
        h: &Subgroup,
    ) -> Result<Option<Rational>, RepError> {
        let lattice = self.group.lattice();
        let mut best: Option<Rational> = None;
        for k in lattice.proper_overgroups(h) {
            let d = self.dist_sq_to_fixed(x, &lattice.subgroups()[k])?;
            if best.as_ref().is_none_or(|b| &d < b) {
                best = Some(d);
            }
        }
        Ok(best)
    }

    /// `Ω_H = ∅` exactly when some `g ∉ H` fixes all of V^H: V^H is then
    /// covered by the finitely many proper subspaces V^K, K ⊋ H, and a
    /// vector space over an infinite field is not a finite union of proper
    /// subspaces.
    pub fn stratum_is_empty(&self, h: &Subgroup) -> Result<bool, RepError> {
        let basis = self.fixed_basis(h)?;
        Ok((0..self.group.order())
            .filter(|&g| !h.contains(g))
            .any(|g| basis.iter().all(|b| &self.act(g, b) == b)))
    }

    pub fn orbit_types(&self) -> OrbitTypeTable {
        let entries = self
            .group
            .lattice()
            .classes()
            .iter()
            .map(|class| {
                let h = class.representative();
                let fixed_dim = self.fixed_basis(h).expect("lattice subgroup").len();
                let witness = crate::realization::point_with_exact_isotropy(self, h).ok();
                OrbitTypeEntry {
                    class_index: class.class_index,
                    label: class.label.clone(),
                    fixed_dim,
                    occupied: witness.is_some(),
                    witness,
                }
            })
            .collect();
        OrbitTypeTable { entries }
    }

    pub fn is_zero_vector(x: &[Rational]) -> bool {
        x.iter().all(Zero::is_zero)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::generate_group;
    use crate::linalg::rational;
    use crate::perm::Permutation;

    fn perm(images: &[usize]) -> Permutation {
        Permutation::new(images.to_vec()).unwrap()
    }

    fn q(v: &[i64]) -> QVector {
        v.iter().map(|&x| rational(x)).collect()
    }

    fn m(rows: &[Vec<i64>]) -> QMatrix {
        QMatrix::from_i64_rows(rows).unwrap()
    }

    fn s3_perm_rep() -> OrthogonalRepresentation {
        let g = Arc::new(generate_group(&[perm(&[1, 0, 2]), perm(&[1, 2, 0])]).unwrap());
        // permutation matrices: e_i ↦ e_{σ(i)}
        let gens = vec![
            m(&[vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 1]]),
            m(&[vec![0, 0, 1], vec![1, 0, 0], vec![0, 1, 0]]),
        ];
        OrthogonalRepresentation::new(g, gens).unwrap()
    }

    fn z2_sign() -> OrthogonalRepresentation {
        let g = Arc::new(generate_group(&[perm(&[1, 0])]).unwrap());
        OrthogonalRepresentation::new(g, vec![m(&[vec![-1]])]).unwrap()
    }

    #[test]
    fn build_validates() {
        let g = Arc::new(generate_group(&[perm(&[1, 0])]).unwrap());
        assert!(matches!(
            OrthogonalRepresentation::new(g.clone(), vec![m(&[vec![1, 1], vec![0, 1]])]),
            Err(RepError::NotOrthogonal { generator: 0 })
        ));
        // a quarter turn has order 4, not 2
        assert!(matches!(
            OrthogonalRepresentation::new(g.clone(), vec![m(&[vec![0, -1], vec![1, 0]])]),
            Err(RepError::NotAHomomorphism { .. })
        ));
        assert!(matches!(
            OrthogonalRepresentation::new(g, vec![]),
            Err(RepError::DimensionMismatch(_))
        ));
    }

    #[test]
    fn homomorphism_exhaustive() {
        let rep = s3_perm_rep();
        let g = rep.group();
        assert!(rep.matrix(0).is_identity());
        for a in 0..g.order() {
            assert!(rep.matrix(a).is_orthogonal());
            for b in 0..g.order() {
                assert_eq!(rep.matrix(g.mul(a, b)), &rep.matrix(a).mul(rep.matrix(b)));
            }
        }
    }

    #[test]
    fn fixed_subspaces() {
        let rep = s3_perm_rep();
        let g = rep.group().clone();
        assert_eq!(rep.fixed_subspace(&g.trivial()).unwrap().dim(), 3);
        assert_eq!(rep.fixed_basis(&g.whole()).unwrap(), &[q(&[1, 1, 1])]);
        let c2 = g.closure(&[1]);
        assert_eq!(rep.fixed_basis(&c2).unwrap(), &[q(&[1, 1, 0]), q(&[0, 0, 1])]);
        let c3 = g.closure(&[2]);
        assert_eq!(rep.fixed_basis(&c3).unwrap(), &[q(&[1, 1, 1])]);
    }

    #[test]
    fn projector_rank_matches_kernel_dimension() {
        let rep = s3_perm_rep();
        let g = rep.group().clone();
        for h in g.lattice().subgroups() {
            let p = rep.projector(h).unwrap();
            let k = rep.fixed_basis(h).unwrap().len();
            assert_eq!(p.rank(), k);
            assert_eq!(p.sub(&QMatrix::identity(3)).rank(), 3 - k);
            // V^H via the stacked generator equations
            let gens = g.canonical_generators(h);
            let mut rows = Vec::new();
            for &x in &gens {
                rows.extend(rep.matrix(x).sub(&QMatrix::identity(3)).to_rows());
            }
            let stacked = if rows.is_empty() {
                QMatrix::zeros(1, 3)
            } else {
                QMatrix::from_rows(rows).unwrap()
            };
            assert_eq!(stacked.kernel().len(), k);
        }
    }

    #[test]
    fn isotropy_and_orbits() {
        let rep = s3_perm_rep();
        let g = rep.group().clone();
        assert_eq!(rep.isotropy(&q(&[0, 0, 0])), g.whole());
        assert_eq!(rep.isotropy(&q(&[1, 1, 0])), g.closure(&[1]));
        assert_eq!(rep.isotropy(&q(&[1, 2, 4])), g.trivial());
        assert_eq!(rep.orbit(&q(&[1, 1, 0])).len(), 3);
        assert_eq!(rep.orbit(&q(&[1, 2, 4])).len(), 6);
        assert_eq!(rep.orbit(&q(&[0, 0, 0])), vec![q(&[0, 0, 0])]);

        let sign = z2_sign();
        assert_eq!(sign.orbit(&q(&[1])), vec![q(&[1]), q(&[-1])]);
    }

    #[test]
    fn isotropy_is_conjugation_equivariant() {
        let rep = s3_perm_rep();
        let g = rep.group().clone();
        for x in [q(&[1, 1, 0]), q(&[1, 2, 4]), q(&[3, 3, 3]), q(&[0, 5, 5])] {
            let h = rep.isotropy(&x);
            for a in 0..g.order() {
                assert_eq!(rep.isotropy(&rep.act(a, &x)), g.conjugate_subgroup(a, &h));
            }
        }
    }

    #[test]
    fn orbit_type_tables() {
        let sign = z2_sign();
        let t = sign.orbit_types();
        assert_eq!(
            t.entries.iter().map(|e| (e.fixed_dim, e.occupied)).collect::<Vec<_>>(),
            vec![(1, true), (0, true)]
        );

        let rep = s3_perm_rep();
        let t = rep.orbit_types();
        assert_eq!(
            t.entries.iter().map(|e| (e.fixed_dim, e.occupied)).collect::<Vec<_>>(),
            vec![(3, true), (2, true), (1, false), (1, true)]
        );

        let g = rep.group().clone();
        let trivial = OrthogonalRepresentation::trivial(g, 1);
        assert_eq!(trivial.orbit_types().occupied_classes(), vec![3]);
    }

    #[test]
    fn direct_sum_blocks() {
        let rep = s3_perm_rep();
        let sum = rep.direct_sum(&rep).unwrap();
        assert_eq!(sum.dim(), 6);
        let g = rep.group().clone();
        assert_eq!(sum.fixed_basis(&g.whole()).unwrap().len(), 2);
        assert!(matches!(rep.direct_sum(&z2_sign()), Err(RepError::GroupMismatch)));
    }
}
