//! Normal forms of group elements.

use std::cmp::Ordering;

/// One letter of a word: a generator or its inverse.
///
/// Letters order as `x < x⁻¹ < y < y⁻¹ < …`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub generator: u16,
    pub inverse: bool,
}

impl Letter {
    pub const fn new(generator: u16, inverse: bool) -> Self {
        Letter { generator, inverse }
    }

    pub const fn inv(self) -> Self {
        Letter {
            generator: self.generator,
            inverse: !self.inverse,
        }
    }
}

/// Normal form of an element of one of the shipped groups.
///
/// Normal forms are unique, so structural equality is group equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GroupElement {
    /// Freely reduced word (free groups).
    Word(Vec<Letter>),
    /// Exponent vector (free abelian groups).
    Exponents(Vec<i64>),
    /// Triple `(a, b, c)` with `(a,b,c)(a',b',c') = (a+a', b+b', c+c'+ab')`.
    Heisenberg([i64; 3]),
    /// Residue `k` standing for `x^k`, `0 <= k < n`.
    Residue(u32),
    /// `r^rotation * s^flip` in the dihedral group of order `2n`.
    Dihedral { rotation: u32, flip: bool },
    /// Permutation of `0..n` in image form: `p[i]` is the image of `i`.
    Perm(Vec<u8>),
}

impl GroupElement {
    fn variant_rank(&self) -> u8 {
        match self {
            GroupElement::Word(_) => 0,
            GroupElement::Exponents(_) => 1,
            GroupElement::Heisenberg(_) => 2,
            GroupElement::Residue(_) => 3,
            GroupElement::Dihedral { .. } => 4,
            GroupElement::Perm(_) => 5,
        }
    }
}

// Integers order as 1, -1, 2, -2, ... with 0 last, so that positive
// generators come before their inverses and nontrivial coordinates come
// before trivial ones.
fn int_key(k: i64) -> (bool, u64, bool) {
    (k == 0, k.unsigned_abs(), k < 0)
}

fn int_slice_cmp(a: &[i64], b: &[i64]) -> Ordering {
    a.iter()
        .map(|&k| int_key(k))
        .cmp(b.iter().map(|&k| int_key(k)))
}

impl Ord for GroupElement {
    fn cmp(&self, other: &Self) -> Ordering {
        use GroupElement::*;
        match (self, other) {
            (Word(a), Word(b)) => a.len().cmp(&b.len()).then_with(|| a.cmp(b)),
            (Exponents(a), Exponents(b)) => int_slice_cmp(a, b),
            (Heisenberg(a), Heisenberg(b)) => int_slice_cmp(a, b),
            (Residue(a), Residue(b)) => a.cmp(b),
            (
                Dihedral {
                    rotation: ra,
                    flip: fa,
                },
                Dihedral {
                    rotation: rb,
                    flip: fb,
                },
            ) => fa.cmp(fb).then(ra.cmp(rb)),
            (Perm(a), Perm(b)) => a.cmp(b),
            _ => self.variant_rank().cmp(&other.variant_rank()),
        }
    }
}

impl PartialOrd for GroupElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_order_puts_generators_before_inverses() {
        let mut v: Vec<i64> = vec![0, -2, 2, -1, 1];
        v.sort_by_key(|&k| int_key(k));
        assert_eq!(v, vec![1, -1, 2, -2, 0]);
    }

    #[test]
    fn words_are_shortlex() {
        let x = Letter::new(0, false);
        let y = Letter::new(1, false);
        let a = GroupElement::Word(vec![y]);
        let b = GroupElement::Word(vec![x, x]);
        let c = GroupElement::Word(vec![x.inv()]);
        assert!(a < b);
        assert!(c < a);
    }
}
