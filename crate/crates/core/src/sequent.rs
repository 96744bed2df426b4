use std::fmt;

use crate::term::Term;

/// `left ∼ right`: two equal-length term vectors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Sequent {
    pub left: Vec<Term>,
    pub right: Vec<Term>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

impl Sequent {
    /// Panics if the two sides differ in length.
    pub fn new(left: Vec<Term>, right: Vec<Term>) -> Self {
        assert_eq!(left.len(), right.len(), "sequent sides must have equal length");
        Sequent { left, right }
    }

    pub fn len(&self) -> usize {
        self.left.len()
    }

    pub fn is_empty(&self) -> bool {
        self.left.is_empty()
    }

    pub fn side(&self, s: Side) -> &[Term] {
        match s {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    pub fn pair(&self, i: usize) -> (&Term, &Term) {
        (&self.left[i], &self.right[i])
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&Term, &Term)> {
        self.left.iter().zip(&self.right)
    }

    pub fn swapped(&self) -> Sequent {
        Sequent { left: self.right.clone(), right: self.left.clone() }
    }

    /// Component `i` of the result is component `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Sequent {
        Sequent {
            left: perm.iter().map(|&i| self.left[i].clone()).collect(),
            right: perm.iter().map(|&i| self.right[i].clone()).collect(),
        }
    }

    /// Keeps the components at `idx`, in that order.
    pub fn restricted(&self, idx: &[usize]) -> Sequent {
        self.permuted(idx)
    }

    pub fn size(&self) -> usize {
        self.left.iter().chain(&self.right).map(|t| t.size()).sum()
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |v: &[Term]| v.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(", ");
        write!(f, "{} ~ {}", side(&self.left), side(&self.right))
    }
}
