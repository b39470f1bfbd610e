//! Permutations on `{0, .., k-1}` and their cycle notation.
//!
//! Cycle notation is 1-based, so the permutation `[1, 0, 2]` prints as `(1 2)`.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PermError {
    #[error("image list {0:?} is not a bijection on 0..{1}")]
    NotABijection(Vec<usize>, usize),
    #[error("cycle notation syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("point {point} out of range 1..={points}")]
    PointOutOfRange { point: usize, points: usize },
}

/// A permutation stored as its image list: `p.apply(i) == images[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(points: usize) -> Self {
        Permutation {
            images: (0..points).collect(),
        }
    }

    pub fn new(images: Vec<usize>) -> Result<Self, PermError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(PermError::NotABijection(images, n));
            }
            seen[i] = true;
        }
        Ok(Permutation { images })
    }

    pub fn points(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, p: usize) -> usize {
        self.images[p]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        debug_assert_eq!(self.points(), other.points());
        Permutation {
            images: other.images.iter().map(|&i| self.images[i]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j] = i;
        }
        Permutation { images: inv }
    }

    /// Disjoint cycles of length at least two, each starting at its smallest point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.images.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut p = self.images[start];
            while p != start {
                seen[p] = true;
                cycle.push(p);
                p = self.images[p];
            }
            if cycle.len() > 1 {
                out.push(cycle);
            }
        }
        out
    }

    /// Parses 1-based cycle notation such as `(1 2 3)(4 5)` or `(1,2)`.
    /// `()` and the empty string denote the identity.
    pub fn parse_cycles(src: &str, points: usize) -> Result<Self, PermError> {
        let mut images: Vec<usize> = (0..points).collect();
        let bytes = src.as_bytes();
        let mut i = 0;
        let mut used = vec![false; points];
        let syntax = |offset: usize, message: &str| PermError::Syntax {
            offset,
            message: message.to_string(),
        };
        while i < bytes.len() {
            match bytes[i] {
                b' ' | b'\t' => i += 1,
                b'(' => {
                    i += 1;
                    let mut cycle = Vec::new();
                    loop {
                        while i < bytes.len() && matches!(bytes[i], b' ' | b',' | b'\t') {
                            i += 1;
                        }
                        if i >= bytes.len() {
                            return Err(syntax(i, "unclosed cycle"));
                        }
                        if bytes[i] == b')' {
                            i += 1;
                            break;
                        }
                        let start = i;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                        if start == i {
                            return Err(syntax(i, "expected a point number"));
                        }
                        let point: usize = src[start..i]
                            .parse()
                            .map_err(|_| syntax(start, "point number too large"))?;
                        if point == 0 || point > points {
                            return Err(PermError::PointOutOfRange { point, points });
                        }
                        if used[point - 1] {
                            return Err(syntax(start, "point repeated across cycles"));
                        }
                        used[point - 1] = true;
                        cycle.push(point - 1);
                    }
                    for w in 0..cycle.len() {
                        images[cycle[w]] = cycle[(w + 1) % cycle.len()];
                    }
                }
                _ => return Err(syntax(i, "expected '('")),
            }
        }
        Ok(Permutation { images })
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            write!(f, "(")?;
            for (k, p) in c.iter().enumerate() {
                if k > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", p + 1)?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}
