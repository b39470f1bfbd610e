//! Finite groups given by permutation generators, with their subgroup lattice.
//!
//! A group is materialized once as a multiplication table over canonical
//! indices (`0` is the identity, the rest in breadth-first order of right
//! multiplication by the generators). Every later computation works on
//! indices only.

use std::collections::hash_map::DefaultHasher;
use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::OnceLock;

use thiserror::Error;

use crate::perm::{PermError, Permutation};

pub const DEFAULT_ORDER_CAP: usize = 2000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("empty generator list")]
    EmptyGeneratorList,
    #[error("group order exceeds the cap of {cap}")]
    OrderCapExceeded { cap: usize },
    #[error("generator {index} acts on {found} points, expected {expected}")]
    PointCountMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error("element set is not a subgroup")]
    NotASubgroup,
    #[error("permutation {0} is not an element of the group")]
    NotAnElement(String),
}

/// Fingerprint identifying a group construction; equal generator lists give equal ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GroupId(pub u64);

/// Fixed-width bit set over element indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ElementSet {
    words: Vec<u64>,
}

impl ElementSet {
    pub fn empty(order: usize) -> Self {
        ElementSet {
            words: vec![0; order.div_ceil(64)],
        }
    }

    pub fn from_elements(order: usize, elements: &[usize]) -> Self {
        let mut s = Self::empty(order);
        for &e in elements {
            s.insert(e);
        }
        s
    }

    pub fn insert(&mut self, e: usize) -> bool {
        let (w, b) = (e / 64, e % 64);
        let fresh = self.words[w] & (1 << b) == 0;
        self.words[w] |= 1 << b;
        fresh
    }

    pub fn contains(&self, e: usize) -> bool {
        self.words[e / 64] & (1 << (e % 64)) != 0
    }

    pub fn is_subset(&self, other: &ElementSet) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn intersection(&self, other: &ElementSet) -> ElementSet {
        ElementSet {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            (0..64)
                .filter(move |b| w & (1u64 << b) != 0)
                .map(move |b| wi * 64 + b)
        })
    }
}

/// A subgroup as a sorted list of element indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subgroup {
    elements: Vec<usize>,
    mask: ElementSet,
}

impl Subgroup {
    fn from_mask(mask: ElementSet) -> Self {
        Subgroup {
            elements: mask.iter().collect(),
            mask,
        }
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, g: usize) -> bool {
        self.mask.contains(g)
    }

    pub fn mask(&self) -> &ElementSet {
        &self.mask
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.mask.is_subset(&other.mask)
    }
}

impl PartialOrd for Subgroup {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical subgroup order: by order, then lexicographically by element list.
impl Ord for Subgroup {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.order(), &self.elements).cmp(&(other.order(), &other.elements))
    }
}

/// A conjugacy class of subgroups. `members[0]` is the representative: the
/// lexicographically smallest member.
#[derive(Debug, Clone)]
pub struct SubgroupClass {
    pub class_index: usize,
    pub members: Vec<Subgroup>,
    /// Canonical generators of the representative (greedy by element index).
    pub generators: Vec<usize>,
    pub label: String,
}

impl SubgroupClass {
    pub fn representative(&self) -> &Subgroup {
        &self.members[0]
    }

    pub fn order(&self) -> usize {
        self.members[0].order()
    }
}

#[derive(Debug, Clone)]
pub struct WeylData {
    pub subgroup: Subgroup,
    pub normalizer: Subgroup,
    pub weyl_order: usize,
    pub weyl_coset_reps: Vec<usize>,
}

/// All subgroups of a group, partitioned into conjugacy classes.
#[derive(Debug, Clone)]
pub struct SubgroupLattice {
    subgroups: Vec<Subgroup>,
    classes: Vec<SubgroupClass>,
    class_of: Vec<usize>,
    lookup: HashMap<ElementSet, usize>,
}

impl SubgroupLattice {
    pub fn subgroups(&self) -> &[Subgroup] {
        &self.subgroups
    }

    pub fn classes(&self) -> &[SubgroupClass] {
        &self.classes
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    /// Index into `subgroups()` of the given element set, if it is a subgroup.
    pub fn index_of(&self, set: &ElementSet) -> Option<usize> {
        self.lookup.get(set).copied()
    }

    pub fn class_of_index(&self, subgroup_index: usize) -> usize {
        self.class_of[subgroup_index]
    }

    /// Class index of a subgroup.
    pub fn class_of(&self, h: &Subgroup) -> Option<usize> {
        self.index_of(&h.mask).map(|i| self.class_of[i])
    }

    pub fn class_by_label(&self, label: &str) -> Option<usize> {
        self.classes.iter().position(|c| c.label == label)
    }

    /// Indices of subgroups strictly containing `h`.
    pub fn proper_overgroups(&self, h: &Subgroup) -> Vec<usize> {
        self.subgroups
            .iter()
            .enumerate()
            .filter(|(_, k)| k.order() > h.order() && h.is_subgroup_of(k))
            .map(|(i, _)| i)
            .collect()
    }
}

/// A finite group materialized as a multiplication table.
#[derive(Debug)]
pub struct FiniteGroup {
    points: usize,
    generators: Vec<Permutation>,
    generator_elements: Vec<usize>,
    perms: Vec<Permutation>,
    perm_index: HashMap<Permutation, usize>,
    table: Vec<usize>,
    inverse: Vec<usize>,
    /// `(parent, generator)` with `element = parent * generators[generator]`.
    parent: Vec<Option<(usize, usize)>>,
    id: GroupId,
    lattice: OnceLock<SubgroupLattice>,
}

pub fn generate_group(generators: &[Permutation]) -> Result<FiniteGroup, GroupError> {
    FiniteGroup::generate(generators, DEFAULT_ORDER_CAP)
}

pub fn generate_group_with_cap(
    generators: &[Permutation],
    cap: usize,
) -> Result<FiniteGroup, GroupError> {
    FiniteGroup::generate(generators, cap)
}

impl FiniteGroup {
    pub fn generate(generators: &[Permutation], cap: usize) -> Result<Self, GroupError> {
        let first = generators.first().ok_or(GroupError::EmptyGeneratorList)?;
        let points = first.points();
        for (index, g) in generators.iter().enumerate() {
            if g.points() != points {
                return Err(GroupError::PointCountMismatch {
                    index,
                    expected: points,
                    found: g.points(),
                });
            }
        }

        let mut perms = vec![Permutation::identity(points)];
        let mut perm_index = HashMap::new();
        perm_index.insert(perms[0].clone(), 0);
        let mut parent = vec![None];
        let mut head = 0;
        while head < perms.len() {
            for (gi, s) in generators.iter().enumerate() {
                let next = perms[head].compose(s);
                if !perm_index.contains_key(&next) {
                    if perms.len() >= cap {
                        return Err(GroupError::OrderCapExceeded { cap });
                    }
                    perm_index.insert(next.clone(), perms.len());
                    perms.push(next);
                    parent.push(Some((head, gi)));
                }
            }
            head += 1;
        }

        let n = perms.len();
        let mut table = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                table[a * n + b] = perm_index[&perms[a].compose(&perms[b])];
            }
        }
        let inverse = perms.iter().map(|p| perm_index[&p.inverse()]).collect();
        let generator_elements = generators.iter().map(|g| perm_index[g]).collect();

        let mut hasher = DefaultHasher::new();
        points.hash(&mut hasher);
        generators.hash(&mut hasher);

        Ok(FiniteGroup {
            points,
            generators: generators.to_vec(),
            generator_elements,
            perms,
            perm_index,
            table,
            inverse,
            parent,
            id: GroupId(hasher.finish()),
            lattice: OnceLock::new(),
        })
    }

    pub fn id(&self) -> GroupId {
        self.id
    }

    pub fn order(&self) -> usize {
        self.perms.len()
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    /// Element indices of the defining generators.
    pub fn generator_elements(&self) -> &[usize] {
        &self.generator_elements
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.perms.len() + b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn conjugate(&self, g: usize, h: usize) -> usize {
        self.mul(self.mul(g, h), self.inverse[g])
    }

    pub fn perm(&self, g: usize) -> &Permutation {
        &self.perms[g]
    }

    pub fn element_of(&self, p: &Permutation) -> Option<usize> {
        self.perm_index.get(p).copied()
    }

    /// Breadth-first spanning tree: `element = parent * generators[gen]`; `None` for the identity.
    pub fn parent(&self, g: usize) -> Option<(usize, usize)> {
        self.parent[g]
    }

    /// The subgroup generated by `gens`.
    pub fn closure(&self, gens: &[usize]) -> Subgroup {
        let mut mask = ElementSet::empty(self.order());
        mask.insert(0);
        let mut queue = VecDeque::from([0]);
        while let Some(x) = queue.pop_front() {
            for &s in gens {
                let y = self.mul(x, s);
                if mask.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        Subgroup::from_mask(mask)
    }

    pub fn whole(&self) -> Subgroup {
        Subgroup::from_mask(ElementSet::from_elements(
            self.order(),
            &(0..self.order()).collect::<Vec<_>>(),
        ))
    }

    pub fn trivial(&self) -> Subgroup {
        Subgroup::from_mask(ElementSet::from_elements(self.order(), &[0]))
    }

    /// Validates an arbitrary element list as a subgroup.
    pub fn subgroup_from_elements(&self, elements: &[usize]) -> Result<Subgroup, GroupError> {
        if elements.iter().any(|&e| e >= self.order()) {
            return Err(GroupError::NotASubgroup);
        }
        let mask = ElementSet::from_elements(self.order(), elements);
        if !mask.contains(0) {
            return Err(GroupError::NotASubgroup);
        }
        for a in mask.iter() {
            if !mask.contains(self.inv(a)) {
                return Err(GroupError::NotASubgroup);
            }
            for b in mask.iter() {
                if !mask.contains(self.mul(a, b)) {
                    return Err(GroupError::NotASubgroup);
                }
            }
        }
        Ok(Subgroup::from_mask(mask))
    }

    pub fn conjugate_subgroup(&self, g: usize, h: &Subgroup) -> Subgroup {
        let mut mask = ElementSet::empty(self.order());
        for &x in h.elements() {
            mask.insert(self.conjugate(g, x));
        }
        Subgroup::from_mask(mask)
    }

    pub fn intersect(&self, a: &Subgroup, b: &Subgroup) -> Subgroup {
        Subgroup::from_mask(a.mask.intersection(&b.mask))
    }

    /// Greedy generating set: scan elements by index, keep those not yet generated.
    pub fn canonical_generators(&self, h: &Subgroup) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut current = self.trivial();
        for &x in h.elements() {
            if !current.contains(x) {
                gens.push(x);
                current = self.closure(&gens);
            }
        }
        gens
    }

    /// Left cosets `gH` as a coset id per element plus one representative per
    /// coset (the smallest element index in it).
    pub fn left_cosets(&self, h: &Subgroup) -> (Vec<usize>, Vec<usize>) {
        let n = self.order();
        let mut coset_of = vec![usize::MAX; n];
        let mut reps = Vec::new();
        for g in 0..n {
            if coset_of[g] != usize::MAX {
                continue;
            }
            let id = reps.len();
            reps.push(g);
            for &x in h.elements() {
                coset_of[self.mul(g, x)] = id;
            }
        }
        (coset_of, reps)
    }

    /// The subgroup lattice, computed on first use.
    pub fn lattice(&self) -> &SubgroupLattice {
        self.lattice.get_or_init(|| build_lattice(self))
    }

    /// `[G/label]`-style label of a subgroup: `e`, `G`, or cycle notation of
    /// its canonical generators joined by commas.
    pub fn subgroup_label(&self, h: &Subgroup) -> String {
        if h.order() == 1 {
            "e".to_string()
        } else if h.order() == self.order() {
            "G".to_string()
        } else {
            self.canonical_generators(h)
                .iter()
                .map(|&g| self.perms[g].to_string())
                .collect::<Vec<_>>()
                .join(",")
        }
    }

    /// Resolves a class label. Besides the canonical labels this accepts
    /// any comma-separated list of generators in cycle notation.
    pub fn parse_class_label(&self, label: &str) -> Result<usize, GroupError> {
        let lattice = self.lattice();
        let label = label.trim();
        if let Some(i) = lattice.class_by_label(label) {
            return Ok(i);
        }
        let mut gens = Vec::new();
        for part in split_generator_list(label) {
            let p = Permutation::parse_cycles(part, self.points)?;
            let g = self
                .element_of(&p)
                .ok_or_else(|| GroupError::NotAnElement(p.to_string()))?;
            gens.push(g);
        }
        let h = self.closure(&gens);
        Ok(lattice
            .class_of(&h)
            .expect("closure is always a subgroup"))
    }
}

fn split_generator_list(label: &str) -> Vec<&str> {
    // split on commas outside parentheses
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut start = 0;
    for (i, c) in label.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                out.push(label[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(label[start..].trim());
    out.retain(|s| !s.is_empty());
    out
}

impl fmt::Display for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "group of order {} on {} points generated by ",
            self.order(),
            self.points
        )?;
        let gens: Vec<String> = self.generators.iter().map(|g| g.to_string()).collect();
        write!(f, "{}", gens.join(", "))
    }
}

/// Every subgroup exactly once, sorted by `(order, element list)`.
///
/// Breadth-first over the lattice: each known subgroup is extended by one
/// element outside it.
pub fn all_subgroups(group: &FiniteGroup) -> Vec<Subgroup> {
    let n = group.order();
    let trivial = group.trivial();
    let mut seen: HashSet<ElementSet> = HashSet::from([trivial.mask.clone()]);
    let mut found = vec![(trivial, Vec::new())];
    let mut head = 0;
    while head < found.len() {
        let (s, gens) = found[head].clone();
        for g in 0..n {
            if s.contains(g) {
                continue;
            }
            let mut next_gens = gens.clone();
            next_gens.push(g);
            let t = group.closure(&next_gens);
            if seen.insert(t.mask.clone()) {
                found.push((t, next_gens));
            }
        }
        head += 1;
    }
    let mut subgroups: Vec<Subgroup> = found.into_iter().map(|(s, _)| s).collect();
    subgroups.sort();
    subgroups
}

/// Conjugacy classes of subgroups in canonical order.
pub fn subgroup_classes(group: &FiniteGroup) -> Vec<SubgroupClass> {
    group.lattice().classes().to_vec()
}

/// `(a) ≤ (b)`: some conjugate of `a` lies inside `b`.
pub fn class_leq(a: &SubgroupClass, b: &SubgroupClass) -> bool {
    let rep = a.representative();
    a.order() <= b.order()
        && b.order().is_multiple_of(a.order())
        && b.members.iter().any(|m| rep.is_subgroup_of(m))
}

pub fn weyl_data(group: &FiniteGroup, h: &Subgroup) -> Result<WeylData, GroupError> {
    let h = group.subgroup_from_elements(h.elements())?;
    let normalizer_elements: Vec<usize> = (0..group.order())
        .filter(|&g| h.elements().iter().all(|&x| h.contains(group.conjugate(g, x))))
        .collect();
    let normalizer = Subgroup::from_mask(ElementSet::from_elements(
        group.order(),
        &normalizer_elements,
    ));
    let mut covered = ElementSet::empty(group.order());
    let mut reps = Vec::new();
    for &g in normalizer.elements() {
        if covered.contains(g) {
            continue;
        }
        reps.push(g);
        for &x in h.elements() {
            covered.insert(group.mul(g, x));
        }
    }
    Ok(WeylData {
        weyl_order: normalizer.order() / h.order(),
        subgroup: h,
        normalizer,
        weyl_coset_reps: reps,
    })
}

fn build_lattice(group: &FiniteGroup) -> SubgroupLattice {
    let subgroups = all_subgroups(group);
    let lookup: HashMap<ElementSet, usize> = subgroups
        .iter()
        .enumerate()
        .map(|(i, s)| (s.mask.clone(), i))
        .collect();

    let mut class_of = vec![usize::MAX; subgroups.len()];
    // (sorted member indices) per class, discovered in subgroup order
    let mut raw: Vec<Vec<usize>> = Vec::new();
    for i in 0..subgroups.len() {
        if class_of[i] != usize::MAX {
            continue;
        }
        let mut members: Vec<usize> = (0..group.order())
            .map(|g| lookup[&group.conjugate_subgroup(g, &subgroups[i]).mask])
            .collect();
        members.sort_unstable();
        members.dedup();
        for &m in &members {
            class_of[m] = raw.len();
        }
        raw.push(members);
    }
    // subgroups are sorted, so members[0] is the lexicographically smallest
    // member and classes are already in canonical order
    let classes = raw
        .into_iter()
        .enumerate()
        .map(|(class_index, members)| {
            let members: Vec<Subgroup> = members.iter().map(|&m| subgroups[m].clone()).collect();
            let generators = group.canonical_generators(&members[0]);
            let label = group.subgroup_label(&members[0]);
            SubgroupClass {
                class_index,
                members,
                generators,
                label,
            }
        })
        .collect();

    SubgroupLattice {
        subgroups,
        classes,
        class_of,
        lookup,
    }
}
