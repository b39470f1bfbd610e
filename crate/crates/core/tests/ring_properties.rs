mod common;

use std::sync::Arc;

use burneq::burnside::{decompose_gset, FiniteGSet};
use burneq::group::{class_leq, weyl_data};
use burneq::{BurnsideElement, BurnsideRing, FiniteGroup};
use common::*;
use num_bigint::BigInt;
use proptest::prelude::*;

fn s4() -> Arc<FiniteGroup> {
    group(&[&[1, 2, 3, 0], &[1, 0, 2, 3]])
}

fn all_groups() -> Vec<(&'static str, Arc<FiniteGroup>)> {
    let mut out: Vec<_> = test_groups().into_iter().map(|(n, g, _, _)| (n, g)).collect();
    out.push(("S4", s4()));
    out
}

#[test]
fn s4_lattice_counts() {
    let g = s4();
    assert_eq!(g.order(), 24);
    assert_eq!(g.lattice().subgroups().len(), 30);
    assert_eq!(g.lattice().class_count(), 11);
}

#[test]
fn conjugates_are_subgroups_of_equal_order() {
    for (name, g) in all_groups() {
        for h in g.lattice().subgroups() {
            for x in 0..g.order() {
                let c = g.conjugate_subgroup(x, h);
                assert_eq!(c.order(), h.order(), "{name}");
                assert!(g.lattice().index_of(c.mask()).is_some(), "{name}");
            }
        }
    }
}

#[test]
fn classes_partition_the_subgroups() {
    for (name, g) in all_groups() {
        let lattice = g.lattice();
        let total: usize = lattice.classes().iter().map(|c| c.members.len()).sum();
        assert_eq!(total, lattice.subgroups().len(), "{name}");
    }
}

#[test]
fn class_order_is_a_partial_order() {
    for (name, g) in all_groups() {
        let classes = g.lattice().classes();
        for a in classes {
            assert!(class_leq(a, a), "{name}");
            for b in classes {
                if a.class_index != b.class_index {
                    assert!(!(class_leq(a, b) && class_leq(b, a)), "{name}");
                }
                for c in classes {
                    if class_leq(a, b) && class_leq(b, c) {
                        assert!(class_leq(a, c), "{name}");
                    }
                }
            }
        }
    }
}

#[test]
fn normalizers_divide_the_group_order() {
    for (name, g) in all_groups() {
        for class in g.lattice().classes() {
            let w = weyl_data(&g, class.representative()).unwrap();
            assert_eq!(g.order() % w.normalizer.order(), 0, "{name}");
            assert_eq!(w.normalizer.order() % class.order(), 0, "{name}");
            assert_eq!(w.weyl_coset_reps.len(), w.weyl_order, "{name}");
            // conjugacy class size is the index of the normalizer
            assert_eq!(class.members.len(), g.order() / w.normalizer.order(), "{name}");
        }
    }
}

#[test]
fn ring_axioms_on_class_generators() {
    for (name, g) in all_groups() {
        let ring = BurnsideRing::new(g.clone());
        let n = g.lattice().class_count();
        let one = ring.one();
        for i in 0..n {
            let a = ring.basis(i);
            assert_eq!(ring.mul(&a, &one).unwrap(), a, "{name}");
            assert_eq!(ring.mul(&one, &a).unwrap(), a, "{name}");
            for j in 0..n {
                let b = ring.basis(j);
                let ab = ring.mul(&a, &b).unwrap();
                assert_eq!(ab, ring.mul(&b, &a).unwrap(), "{name}");
                assert_eq!(ab.cardinality(&g), a.cardinality(&g) * b.cardinality(&g));
                for k in 0..n {
                    let c = ring.basis(k);
                    assert_eq!(
                        ring.mul(&ab, &c).unwrap(),
                        ring.mul(&a, &ring.mul(&b, &c).unwrap()).unwrap(),
                        "{name}"
                    );
                }
            }
        }
    }
}

fn group_index() -> impl Strategy<Value = usize> {
    0..9usize
}

fn element(g: &FiniteGroup, coeffs: &[i64]) -> BurnsideElement {
    let n = g.lattice().class_count();
    BurnsideElement::from_i64(g, &coeffs[..n]).unwrap()
}

fn coefficient_vec() -> impl Strategy<Value = Vec<i64>> {
    proptest::collection::vec(-20i64..=20, 11)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_laws_on_random_elements(
        gi in group_index(),
        a in coefficient_vec(),
        b in coefficient_vec(),
        c in coefficient_vec(),
    ) {
        let (_, g) = &all_groups()[gi];
        let ring = BurnsideRing::new(g.clone());
        let (a, b, c) = (element(g, &a), element(g, &b), element(g, &c));
        let ab = ring.mul(&a, &b).unwrap();
        prop_assert_eq!(&ab, &ring.mul(&b, &a).unwrap());
        prop_assert_eq!(
            ring.mul(&ab, &c).unwrap(),
            ring.mul(&a, &ring.mul(&b, &c).unwrap()).unwrap()
        );
        prop_assert_eq!(
            ring.mul(&a, &b.add(&c).unwrap()).unwrap(),
            ab.add(&ring.mul(&a, &c).unwrap()).unwrap()
        );
        // the mark homomorphism is multiplicative
        let (ma, mb) = (ring.mark_vector(&a).unwrap(), ring.mark_vector(&b).unwrap());
        let pointwise: Vec<BigInt> = ma.iter().zip(&mb).map(|(x, y)| x * y).collect();
        prop_assert_eq!(ring.mark_vector(&ab).unwrap(), pointwise);
        prop_assert_eq!(ab.cardinality(g), a.cardinality(g) * b.cardinality(g));
    }

    #[test]
    fn text_and_json_round_trip(gi in group_index(), a in coefficient_vec()) {
        let (_, g) = &all_groups()[gi];
        let a = element(g, &a);
        let text = a.display(g).to_string();
        prop_assert_eq!(&BurnsideElement::parse(g, &text).unwrap(), &a);
        prop_assert_eq!(&BurnsideElement::from_json(g, &a.to_json()).unwrap(), &a);
    }

    #[test]
    fn decomposition_is_additive_and_conserves_size(
        gi in group_index(),
        parts in proptest::collection::vec((0usize..11, 0usize..11), 1..4),
    ) {
        let (_, g) = &all_groups()[gi];
        let ring = BurnsideRing::new(g.clone());
        let n = g.lattice().class_count();
        let classes = g.lattice().classes();
        let mut union = FiniteGSet::from_action_unchecked(g, vec![vec![]; g.order()]);
        let mut expected = ring.zero();
        for (h, k) in parts {
            let (h, k) = (h % n, k % n);
            // G/H × G/K decomposes as the ring product
            let set = FiniteGSet::coset_space(g, classes[h].representative())
                .product(&FiniteGSet::coset_space(g, classes[k].representative()))
                .unwrap();
            let part = decompose_gset(g, &set).unwrap();
            prop_assert_eq!(&part, &ring.mul(&ring.basis(h), &ring.basis(k)).unwrap());
            expected = expected.add(&part).unwrap();
            union = union.disjoint_union(&set).unwrap();
        }
        let whole = decompose_gset(g, &union).unwrap();
        prop_assert_eq!(&whole, &expected);
        prop_assert_eq!(whole.cardinality(g), BigInt::from(union.size()));
    }
}
