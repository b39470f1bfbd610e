//! The Burnside ring A(G).
//!
//! Elements are integer combinations of transitive G-sets `[G/H]`, indexed by
//! the canonical order of subgroup classes. Products go through the table of
//! marks: both factors are mapped to their mark vectors, multiplied pointwise,
//! and the lower-triangular mark system is solved back. `decompose_gset`
//! computes the same products by orbit counting and is kept as an
//! independent route.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::Value;
use thiserror::Error;

use crate::group::{FiniteGroup, GroupError, GroupId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BurnsideError {
    #[error("elements belong to different groups")]
    GroupMismatch,
    #[error("coefficient vector has length {found}, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("mark system has no integral solution at class {class}")]
    NonIntegralSolution { class: usize },
    #[error("invalid G-set action: {0}")]
    InvalidAction(String),
    #[error("element syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown subgroup class label {label:?}: {source}")]
    UnknownClass { label: String, source: GroupError },
    #[error("invalid element JSON: {0}")]
    Json(String),
}

/// An element `Σ d_(H) [G/H]` of the Burnside ring.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BurnsideElement {
    group: GroupId,
    coeffs: Vec<BigInt>,
}

impl BurnsideElement {
    pub fn zero(group: &FiniteGroup) -> Self {
        BurnsideElement {
            group: group.id(),
            coeffs: vec![BigInt::zero(); group.lattice().class_count()],
        }
    }

    /// The unit `[G/G]`.
    pub fn one(group: &FiniteGroup) -> Self {
        let n = group.lattice().class_count();
        Self::basis(group, n - 1)
    }

    /// The transitive G-set `[G/H_class]`.
    pub fn basis(group: &FiniteGroup, class: usize) -> Self {
        let mut e = Self::zero(group);
        e.coeffs[class] = BigInt::one();
        e
    }

    pub fn from_coeffs(group: &FiniteGroup, coeffs: Vec<BigInt>) -> Result<Self, BurnsideError> {
        let expected = group.lattice().class_count();
        if coeffs.len() != expected {
            return Err(BurnsideError::LengthMismatch {
                expected,
                found: coeffs.len(),
            });
        }
        Ok(BurnsideElement {
            group: group.id(),
            coeffs,
        })
    }

    pub fn from_i64(group: &FiniteGroup, coeffs: &[i64]) -> Result<Self, BurnsideError> {
        Self::from_coeffs(group, coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn group_id(&self) -> GroupId {
        self.group
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, class: usize) -> &BigInt {
        &self.coeffs[class]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    fn check(&self, other: &Self) -> Result<(), BurnsideError> {
        if self.group != other.group || self.coeffs.len() != other.coeffs.len() {
            return Err(BurnsideError::GroupMismatch);
        }
        Ok(())
    }

    /// Disjoint union, coefficient-wise.
    pub fn add(&self, other: &Self) -> Result<Self, BurnsideError> {
        self.check(other)?;
        Ok(BurnsideElement {
            group: self.group,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, BurnsideError> {
        self.check(other)?;
        Ok(BurnsideElement {
            group: self.group,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn neg(&self) -> Self {
        self.scale(&BigInt::from(-1))
    }

    pub fn scale(&self, s: &BigInt) -> Self {
        BurnsideElement {
            group: self.group,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Number of points: `Σ d_i |G/H_i|`.
    pub fn cardinality(&self, group: &FiniteGroup) -> BigInt {
        let classes = group.lattice().classes();
        self.coeffs
            .iter()
            .zip(classes)
            .map(|(c, cl)| c * BigInt::from(group.order() / cl.order()))
            .sum()
    }

    /// Text form such as `2*[G/e] + 1*[G/(1 2)]`; `0` for the zero element.
    pub fn display<'a>(&'a self, group: &'a FiniteGroup) -> ElementDisplay<'a> {
        ElementDisplay {
            element: self,
            group,
        }
    }

    /// Parses the text form. A bare integer `n` denotes `n*[G/G]`. Labels
    /// may be canonical class labels or any generator list in cycle notation.
    pub fn parse(group: &FiniteGroup, src: &str) -> Result<Self, BurnsideError> {
        ElementParser {
            src,
            pos: 0,
            group,
        }
        .parse()
    }

    /// `{"coeffs": [...]}` in canonical class order. Coefficients outside the
    /// i64 range are written as decimal strings.
    pub fn to_json(&self) -> Value {
        let coeffs: Vec<Value> = self
            .coeffs
            .iter()
            .map(|c| match c.to_i64() {
                Some(v) => Value::from(v),
                None => Value::from(c.to_string()),
            })
            .collect();
        serde_json::json!({ "coeffs": coeffs })
    }

    pub fn from_json(group: &FiniteGroup, value: &Value) -> Result<Self, BurnsideError> {
        let arr = value
            .get("coeffs")
            .and_then(Value::as_array)
            .ok_or_else(|| BurnsideError::Json("missing \"coeffs\" array".into()))?;
        let coeffs = arr
            .iter()
            .map(|v| match v {
                Value::Number(n) => n
                    .as_i64()
                    .map(BigInt::from)
                    .ok_or_else(|| BurnsideError::Json(format!("non-integer coefficient {n}"))),
                Value::String(s) => s
                    .parse::<BigInt>()
                    .map_err(|_| BurnsideError::Json(format!("bad coefficient {s:?}"))),
                other => Err(BurnsideError::Json(format!("bad coefficient {other}"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_coeffs(group, coeffs)
    }
}

pub struct ElementDisplay<'a> {
    element: &'a BurnsideElement,
    group: &'a FiniteGroup,
}

impl fmt::Display for ElementDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let classes = self.group.lattice().classes();
        let mut first = true;
        for (c, class) in self.element.coeffs.iter().zip(classes) {
            if c.is_zero() {
                continue;
            }
            match (first, c.is_negative()) {
                (true, false) => write!(f, "{c}")?,
                (true, true) => write!(f, "-{}", c.abs())?,
                (false, false) => write!(f, " + {c}")?,
                (false, true) => write!(f, " - {}", c.abs())?,
            }
            write!(f, "*[G/{}]", class.label)?;
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

struct ElementParser<'a> {
    src: &'a str,
    pos: usize,
    group: &'a FiniteGroup,
}

impl ElementParser<'_> {
    fn err(&self, message: &str) -> BurnsideError {
        BurnsideError::Syntax {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    /// Consumes a '+' or '-' (also U+2212); returns the sign.
    fn sign(&mut self) -> Option<i32> {
        match self.peek()? {
            '+' => {
                self.pos += 1;
                Some(1)
            }
            '-' | '\u{2212}' => {
                self.pos += self.peek().unwrap().len_utf8();
                Some(-1)
            }
            _ => None,
        }
    }

    fn parse(mut self) -> Result<BurnsideElement, BurnsideError> {
        let mut acc = BurnsideElement::zero(self.group);
        self.skip_ws();
        if self.pos == self.src.len() {
            return Err(self.err("empty element"));
        }
        let mut first = true;
        loop {
            self.skip_ws();
            if self.pos == self.src.len() {
                break;
            }
            let mut sign = 1;
            match self.sign() {
                Some(s) => sign = s,
                None if !first => return Err(self.err("expected '+' or '-'")),
                None => {}
            }
            self.skip_ws();
            let (coeff, class) = self.term()?;
            let coeff = if sign < 0 { -coeff } else { coeff };
            acc.coeffs[class] += coeff;
            first = false;
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<(BigInt, usize), BurnsideError> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        let coeff = if self.pos > start {
            let n: BigInt = self.src[start..self.pos].parse().expect("digits");
            self.skip_ws();
            if self.peek() == Some('*') {
                self.pos += 1;
                self.skip_ws();
            } else {
                // bare integer: multiple of the unit
                return Ok((n, self.group.lattice().class_count() - 1));
            }
            n
        } else {
            BigInt::one()
        };
        if !self.src[self.pos..].starts_with("[G/") {
            return Err(self.err("expected '[G/'"));
        }
        self.pos += 3;
        let close = self.src[self.pos..]
            .find(']')
            .ok_or_else(|| self.err("unclosed '['"))?;
        let label = &self.src[self.pos..self.pos + close];
        let class = self
            .group
            .parse_class_label(label)
            .map_err(|source| BurnsideError::UnknownClass {
                label: label.to_string(),
                source,
            })?;
        self.pos += close + 1;
        Ok((coeff, class))
    }
}

/// `marks[i][j] = |(G/H_i)^{H_j}|` over class representatives, canonical order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableOfMarks {
    marks: Vec<Vec<u64>>,
}

impl TableOfMarks {
    pub fn marks(&self) -> &[Vec<u64>] {
        &self.marks
    }

    pub fn get(&self, row: usize, col: usize) -> u64 {
        self.marks[row][col]
    }

    pub fn size(&self) -> usize {
        self.marks.len()
    }
}

/// Counts, for each pair of class representatives, the cosets `gH_i` fixed
/// by every element of `H_j`.
pub fn table_of_marks(group: &FiniteGroup) -> TableOfMarks {
    let classes = group.lattice().classes();
    let marks = classes
        .iter()
        .map(|row| {
            let h = row.representative();
            let (_, reps) = group.left_cosets(h);
            classes
                .iter()
                .map(|col| {
                    let k_gens = &col.generators;
                    // H_j gH_i = gH_i  <=>  g⁻¹ k g ∈ H_i for each generator k
                    reps.iter()
                        .filter(|&&g| {
                            k_gens
                                .iter()
                                .all(|&k| h.contains(group.conjugate(group.inv(g), k)))
                        })
                        .count() as u64
                })
                .collect()
        })
        .collect();
    TableOfMarks { marks }
}

/// A finite G-set given by its action table: `action[g][x]` is `g·x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGSet {
    group: GroupId,
    size: usize,
    action: Vec<Vec<usize>>,
}

impl FiniteGSet {
    pub fn new(group: &FiniteGroup, action: Vec<Vec<usize>>) -> Result<Self, BurnsideError> {
        let size = action.first().map_or(0, Vec::len);
        let set = FiniteGSet {
            group: group.id(),
            size,
            action,
        };
        set.validate(group)?;
        Ok(set)
    }

    /// Builds without validation; `decompose_gset` validates.
    pub fn from_action_unchecked(group: &FiniteGroup, action: Vec<Vec<usize>>) -> Self {
        let size = action.first().map_or(0, Vec::len);
        FiniteGSet {
            group: group.id(),
            size,
            action,
        }
    }

    pub fn one_point(group: &FiniteGroup) -> Self {
        Self::from_action_unchecked(group, vec![vec![0]; group.order()])
    }

    /// G acting on itself by left translation.
    pub fn regular(group: &FiniteGroup) -> Self {
        let n = group.order();
        let action = (0..n)
            .map(|g| (0..n).map(|x| group.mul(g, x)).collect())
            .collect();
        Self::from_action_unchecked(group, action)
    }

    /// `G/H` with `g·(aH) = (ga)H`; coset `i` has the `i`-th smallest
    /// representative.
    pub fn coset_space(group: &FiniteGroup, h: &crate::group::Subgroup) -> Self {
        let (coset_of, reps) = group.left_cosets(h);
        let action = (0..group.order())
            .map(|g| reps.iter().map(|&a| coset_of[group.mul(g, a)]).collect())
            .collect();
        Self::from_action_unchecked(group, action)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn group_id(&self) -> GroupId {
        self.group
    }

    pub fn act(&self, g: usize, x: usize) -> usize {
        self.action[g][x]
    }

    /// Cartesian product with the diagonal action; point `(a, b)` has index
    /// `a * other.size() + b`.
    pub fn product(&self, other: &FiniteGSet) -> Result<FiniteGSet, BurnsideError> {
        if self.group != other.group {
            return Err(BurnsideError::GroupMismatch);
        }
        let m = other.size;
        let action = self
            .action
            .iter()
            .zip(&other.action)
            .map(|(ra, rb)| {
                (0..self.size * m)
                    .map(|p| ra[p / m] * m + rb[p % m])
                    .collect()
            })
            .collect();
        Ok(FiniteGSet {
            group: self.group,
            size: self.size * m,
            action,
        })
    }

    pub fn disjoint_union(&self, other: &FiniteGSet) -> Result<FiniteGSet, BurnsideError> {
        if self.group != other.group {
            return Err(BurnsideError::GroupMismatch);
        }
        let action = self
            .action
            .iter()
            .zip(&other.action)
            .map(|(ra, rb)| {
                ra.iter()
                    .copied()
                    .chain(rb.iter().map(|&y| y + self.size))
                    .collect()
            })
            .collect();
        Ok(FiniteGSet {
            group: self.group,
            size: self.size + other.size,
            action,
        })
    }

    pub fn validate(&self, group: &FiniteGroup) -> Result<(), BurnsideError> {
        if self.group != group.id() {
            return Err(BurnsideError::GroupMismatch);
        }
        let invalid = |m: String| Err(BurnsideError::InvalidAction(m));
        if self.action.len() != group.order() {
            return invalid(format!(
                "{} rows for a group of order {}",
                self.action.len(),
                group.order()
            ));
        }
        for (g, row) in self.action.iter().enumerate() {
            if row.len() != self.size {
                return invalid(format!("row {g} has length {}", row.len()));
            }
            let mut seen = vec![false; self.size];
            for &y in row {
                if y >= self.size || seen[y] {
                    return invalid(format!("row {g} is not a permutation"));
                }
                seen[y] = true;
            }
        }
        if self.action[0].iter().enumerate().any(|(x, &y)| x != y) {
            return invalid("identity does not act trivially".into());
        }
        // compatibility on generators implies it for all pairs
        for &s in group.generator_elements() {
            for h in 0..group.order() {
                let sh = group.mul(s, h);
                for x in 0..self.size {
                    if self.action[sh][x] != self.action[s][self.action[h][x]] {
                        return invalid(format!("(s h)·{x} != s·(h·{x}) for s={s}, h={h}"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Orbits as sorted point lists, ordered by smallest point.
    pub fn orbits(&self, group: &FiniteGroup) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.size];
        let mut out = Vec::new();
        for start in 0..self.size {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut orbit = vec![start];
            let mut head = 0;
            while head < orbit.len() {
                let x = orbit[head];
                for &s in group.generator_elements() {
                    let y = self.action[s][x];
                    if !seen[y] {
                        seen[y] = true;
                        orbit.push(y);
                    }
                }
                head += 1;
            }
            orbit.sort_unstable();
            out.push(orbit);
        }
        out
    }

    pub fn stabilizer(&self, group: &FiniteGroup, x: usize) -> crate::group::Subgroup {
        let elements: Vec<usize> = (0..group.order())
            .filter(|&g| self.action[g][x] == x)
            .collect();
        group
            .subgroup_from_elements(&elements)
            .expect("stabilizer of a valid action is a subgroup")
    }
}

/// The brute-force route: split into orbits and count each orbit's
/// stabilizer class.
pub fn decompose_gset(
    group: &FiniteGroup,
    set: &FiniteGSet,
) -> Result<BurnsideElement, BurnsideError> {
    set.validate(group)?;
    let lattice = group.lattice();
    let mut out = BurnsideElement::zero(group);
    for orbit in set.orbits(group) {
        let stab = set.stabilizer(group, orbit[0]);
        let class = lattice.class_of(&stab).expect("stabilizers are subgroups");
        out.coeffs[class] += 1;
    }
    Ok(out)
}

/// `G/H × G/K` with the diagonal action, over class representatives.
pub fn product_gset(group: &FiniteGroup, h_class: usize, k_class: usize) -> FiniteGSet {
    let classes = group.lattice().classes();
    let a = FiniteGSet::coset_space(group, classes[h_class].representative());
    let b = FiniteGSet::coset_space(group, classes[k_class].representative());
    a.product(&b).expect("same group")
}

/// The Burnside ring of a group, carrying its table of marks.
#[derive(Debug, Clone)]
pub struct BurnsideRing {
    group: Arc<FiniteGroup>,
    marks: TableOfMarks,
}

impl BurnsideRing {
    pub fn new(group: Arc<FiniteGroup>) -> Self {
        let marks = table_of_marks(&group);
        BurnsideRing { group, marks }
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn marks(&self) -> &TableOfMarks {
        &self.marks
    }

    pub fn zero(&self) -> BurnsideElement {
        BurnsideElement::zero(&self.group)
    }

    pub fn one(&self) -> BurnsideElement {
        BurnsideElement::one(&self.group)
    }

    pub fn basis(&self, class: usize) -> BurnsideElement {
        BurnsideElement::basis(&self.group, class)
    }

    fn owns(&self, a: &BurnsideElement) -> Result<(), BurnsideError> {
        if a.group != self.group.id() {
            return Err(BurnsideError::GroupMismatch);
        }
        Ok(())
    }

    /// `φ(a)_j = Σ_i a_i marks[i][j]`: the number of points of `a` fixed by `H_j`.
    pub fn mark_vector(&self, a: &BurnsideElement) -> Result<Vec<BigInt>, BurnsideError> {
        self.owns(a)?;
        let n = self.marks.size();
        Ok((0..n)
            .map(|j| {
                (j..n)
                    .filter(|&i| !a.coeffs[i].is_zero())
                    .map(|i| &a.coeffs[i] * BigInt::from(self.marks.get(i, j)))
                    .sum()
            })
            .collect())
    }

    /// Inverts the mark homomorphism by back-substitution from the top class.
    pub fn from_mark_vector(&self, marks: &[BigInt]) -> Result<BurnsideElement, BurnsideError> {
        let n = self.marks.size();
        if marks.len() != n {
            return Err(BurnsideError::LengthMismatch {
                expected: n,
                found: marks.len(),
            });
        }
        let mut coeffs = vec![BigInt::zero(); n];
        for j in (0..n).rev() {
            let mut rest = marks[j].clone();
            for i in j + 1..n {
                let m = self.marks.get(i, j);
                if m != 0 && !coeffs[i].is_zero() {
                    rest -= &coeffs[i] * BigInt::from(m);
                }
            }
            let diag = BigInt::from(self.marks.get(j, j));
            let (q, r) = rest.div_rem(&diag);
            if !r.is_zero() {
                return Err(BurnsideError::NonIntegralSolution { class: j });
            }
            coeffs[j] = q;
        }
        Ok(BurnsideElement {
            group: self.group.id(),
            coeffs,
        })
    }

    /// Product in A(G) via the table of marks.
    pub fn mul(
        &self,
        a: &BurnsideElement,
        b: &BurnsideElement,
    ) -> Result<BurnsideElement, BurnsideError> {
        let pa = self.mark_vector(a)?;
        let pb = self.mark_vector(b)?;
        let prod: Vec<BigInt> = pa.iter().zip(&pb).map(|(x, y)| x * y).collect();
        self.from_mark_vector(&prod)
    }

    pub fn add(
        &self,
        a: &BurnsideElement,
        b: &BurnsideElement,
    ) -> Result<BurnsideElement, BurnsideError> {
        self.owns(a)?;
        a.add(b)
    }

    pub fn decompose_gset(&self, set: &FiniteGSet) -> Result<BurnsideElement, BurnsideError> {
        decompose_gset(&self.group, set)
    }

    pub fn product_gset(&self, h_class: usize, k_class: usize) -> FiniteGSet {
        product_gset(&self.group, h_class, k_class)
    }

    pub fn format(&self, a: &BurnsideElement) -> String {
        a.display(&self.group).to_string()
    }

    pub fn parse(&self, src: &str) -> Result<BurnsideElement, BurnsideError> {
        BurnsideElement::parse(&self.group, src)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{class_leq, generate_group, weyl_data};
    use crate::perm::Permutation;

    fn perm(images: &[usize]) -> Permutation {
        Permutation::new(images.to_vec()).unwrap()
    }

    fn ring(gens: &[&[usize]]) -> BurnsideRing {
        let gens: Vec<Permutation> = gens.iter().map(|g| perm(g)).collect();
        BurnsideRing::new(Arc::new(generate_group(&gens).unwrap()))
    }

    fn z2() -> BurnsideRing {
        ring(&[&[1, 0]])
    }

    fn s3() -> BurnsideRing {
        ring(&[&[1, 0, 2], &[1, 2, 0]])
    }

    fn d4() -> BurnsideRing {
        ring(&[&[1, 2, 3, 0], &[2, 1, 0, 3]])
    }

    fn el(r: &BurnsideRing, c: &[i64]) -> BurnsideElement {
        BurnsideElement::from_i64(r.group(), c).unwrap()
    }

    #[test]
    fn marks_of_small_groups() {
        assert_eq!(z2().marks().marks(), &[vec![2, 0], vec![1, 1]]);
        assert_eq!(
            s3().marks().marks(),
            &[
                vec![6, 0, 0, 0],
                vec![3, 1, 0, 0],
                vec![2, 0, 2, 0],
                vec![1, 1, 1, 1]
            ]
        );
    }

    #[test]
    fn marks_invariants() {
        for r in [z2(), s3(), d4()] {
            let g = r.group();
            let classes = g.lattice().classes();
            let t = r.marks();
            let n = t.size();
            for i in 0..n {
                assert_eq!(t.get(i, 0) as usize, g.order() / classes[i].order());
                let w = weyl_data(g, classes[i].representative()).unwrap();
                assert_eq!(t.get(i, i) as usize, w.weyl_order);
                for j in 0..n {
                    if t.get(i, j) != 0 {
                        assert!(class_leq(&classes[j], &classes[i]));
                        assert!(j <= i, "lower triangular");
                    }
                }
            }
            assert!(t.marks()[n - 1].iter().all(|&m| m == 1));
        }
    }

    #[test]
    fn small_products() {
        let r = z2();
        assert_eq!(r.mul(&el(&r, &[1, 0]), &el(&r, &[1, 0])).unwrap(), el(&r, &[2, 0]));
        let r = s3();
        let c2 = r.basis(1);
        let c3 = r.basis(2);
        assert_eq!(r.mul(&c2, &c2).unwrap(), el(&r, &[1, 1, 0, 0]));
        assert_eq!(r.mul(&c3, &c3).unwrap(), el(&r, &[0, 0, 2, 0]));
        assert_eq!(r.mul(&c2, &c3).unwrap(), el(&r, &[1, 0, 0, 0]));
        let x = el(&r, &[3, -1, 2, 5]);
        assert_eq!(r.mul(&r.one(), &x).unwrap(), x);
    }

    #[test]
    fn addition() {
        let r = z2();
        let x = el(&r, &[4, -2]);
        assert_eq!(r.add(&x, &r.zero()).unwrap(), x);
        assert_eq!(r.add(&r.basis(0), &r.basis(0)).unwrap(), el(&r, &[2, 0]));
        assert_eq!(r.add(&r.basis(0), &r.one()).unwrap(), el(&r, &[1, 1]));
        assert_eq!(
            r.add(&x, &s3().basis(0)),
            Err(BurnsideError::GroupMismatch)
        );
    }

    #[test]
    fn decompose_simple_gsets() {
        for r in [z2(), s3(), d4()] {
            let g = r.group();
            assert_eq!(r.decompose_gset(&FiniteGSet::one_point(g)).unwrap(), r.one());
            assert_eq!(r.decompose_gset(&FiniteGSet::regular(g)).unwrap(), r.basis(0));
        }
        let r = s3();
        let x = r.product_gset(1, 2);
        assert_eq!(x.size(), 6);
        assert_eq!(r.decompose_gset(&x).unwrap(), r.basis(0));
        let y = r.product_gset(1, 1);
        assert_eq!(y.size(), 9);
        assert_eq!(r.decompose_gset(&y).unwrap(), el(&r, &[1, 1, 0, 0]));
    }

    #[test]
    fn product_gset_edge_cases() {
        let r = d4();
        let g = r.group();
        let n = g.lattice().class_count();
        for h in 0..n {
            let order_h = g.lattice().classes()[h].order();
            // H = G: isomorphic to G/K
            let x = r.product_gset(n - 1, h);
            assert_eq!(x.size(), g.order() / order_h);
            assert_eq!(r.decompose_gset(&x).unwrap(), r.basis(h));
            // K = e: free
            let y = r.product_gset(h, 0);
            assert_eq!(y.size(), g.order() / order_h * g.order());
            let free = r.decompose_gset(&y).unwrap();
            assert_eq!(free.coeffs()[1..].iter().filter(|c| !c.is_zero()).count(), 0);
        }
    }

    #[test]
    fn invalid_actions_are_rejected() {
        let r = z2();
        let g = r.group();
        let bad = FiniteGSet::from_action_unchecked(g, vec![vec![1, 0], vec![1, 0]]);
        assert!(matches!(r.decompose_gset(&bad), Err(BurnsideError::InvalidAction(_))));
        let bad = FiniteGSet::from_action_unchecked(g, vec![vec![0, 0], vec![1, 0]]);
        assert!(matches!(r.decompose_gset(&bad), Err(BurnsideError::InvalidAction(_))));
        // S3 with the generators acting by incompatible permutations
        let r = s3();
        let mut action: Vec<Vec<usize>> = vec![vec![0, 1]; 6];
        action[1] = vec![1, 0];
        let bad = FiniteGSet::from_action_unchecked(r.group(), action);
        assert!(matches!(r.decompose_gset(&bad), Err(BurnsideError::InvalidAction(_))));
    }

    #[test]
    fn non_integral_mark_vectors_are_detected() {
        let r = z2();
        // (1, 0) is not the mark vector of any element: 1 = 2 c_e + c_G, 0 = c_G
        assert_eq!(
            r.from_mark_vector(&[BigInt::from(1), BigInt::from(0)]),
            Err(BurnsideError::NonIntegralSolution { class: 0 })
        );
    }

    #[test]
    fn text_form() {
        let r = s3();
        let x = el(&r, &[2, 1, 0, -3]);
        let text = r.format(&x);
        assert_eq!(text, "2*[G/e] + 1*[G/(1 2)] - 3*[G/G]");
        assert_eq!(r.parse(&text).unwrap(), x);
        assert_eq!(r.format(&r.zero()), "0");
        assert_eq!(r.parse("0").unwrap(), r.zero());
        assert_eq!(r.parse("[G/(2 3)]").unwrap(), r.basis(1));
        assert_eq!(r.parse("-[G/e] \u{2212} 2*[G/(1 2 3)]").unwrap(), el(&r, &[-1, 0, -2, 0]));
        assert_eq!(r.parse("3").unwrap(), el(&r, &[0, 0, 0, 3]));
        assert!(matches!(r.parse("2*[G/(1 4)]"), Err(BurnsideError::UnknownClass { .. })));
        assert!(matches!(r.parse("[G/e] [G/e]"), Err(BurnsideError::Syntax { .. })));
        assert!(matches!(r.parse(""), Err(BurnsideError::Syntax { .. })));
    }

    #[test]
    fn json_form() {
        let r = s3();
        let x = el(&r, &[2, 1, 0, -3]);
        let v = x.to_json();
        assert_eq!(v.to_string(), r#"{"coeffs":[2,1,0,-3]}"#);
        assert_eq!(BurnsideElement::from_json(r.group(), &v).unwrap(), x);
        let big: BigInt = "123456789012345678901234567890".parse().unwrap();
        let y = x.scale(&big);
        assert_eq!(BurnsideElement::from_json(r.group(), &y.to_json()).unwrap(), y);
    }
}
