//! Concrete finitely generated groups.
//!
//! Every backend exposes the same surface: normal-form multiplication and
//! inversion, a symmetric generating set, canonical words, defining relators
//! and a word-length function. Word lengths are exact: closed forms where one
//! is known (free, free abelian, cyclic, symmetric) and breadth-first search
//! over the Cayley graph otherwise (Heisenberg, dihedral). A query outside
//! the searched ball is an error, never an estimate.

mod ball;
mod element;
mod parse;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

pub use ball::{Ball, ClassPartition, ElementOrder};
pub use element::{GroupElement, Letter};

use crate::error::{Error, Result};

/// Which group a [`Group`] realizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupKind {
    Free {
        rank: usize,
    },
    FreeAbelian {
        rank: usize,
    },
    /// Discrete Heisenberg group on generators `x = (1,0,0)`, `y = (0,1,0)`.
    Heisenberg,
    Cyclic {
        order: usize,
    },
    /// Dihedral group of order `2n` generated by a rotation `r` and a reflection `s`.
    Dihedral {
        n: usize,
    },
    /// Symmetric group generated by adjacent transpositions `s_i = (i, i+1)`.
    Symmetric {
        degree: usize,
    },
}

/// Largest symmetric group we ship.
pub const MAX_SYMMETRIC_DEGREE: usize = 5;

impl GroupKind {
    pub fn generator_count(&self) -> usize {
        match *self {
            GroupKind::Free { rank } | GroupKind::FreeAbelian { rank } => rank,
            GroupKind::Heisenberg => 2,
            GroupKind::Cyclic { .. } => 1,
            GroupKind::Dihedral { .. } => 2,
            GroupKind::Symmetric { degree } => degree - 1,
        }
    }

    fn default_labels(&self) -> Vec<String> {
        let count = self.generator_count();
        match self {
            GroupKind::Free { .. } | GroupKind::FreeAbelian { .. } if count <= 3 => ["x", "y", "z"]
                .iter()
                .take(count)
                .map(|s| s.to_string())
                .collect(),
            GroupKind::Free { .. } | GroupKind::FreeAbelian { .. } => {
                (1..=count).map(|i| format!("x{i}")).collect()
            }
            GroupKind::Heisenberg => vec!["x".into(), "y".into()],
            GroupKind::Cyclic { .. } => vec!["x".into()],
            GroupKind::Dihedral { .. } => vec!["r".into(), "s".into()],
            GroupKind::Symmetric { .. } => (1..=count).map(|i| format!("s{i}")).collect(),
        }
    }
}

/// A group kind together with its generator labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupSpec {
    kind: GroupKind,
    labels: Vec<String>,
}

impl GroupSpec {
    pub fn new(kind: GroupKind) -> Result<Self> {
        match kind {
            GroupKind::Free { rank } | GroupKind::FreeAbelian { rank } if rank == 0 => {
                return Err(Error::Domain("rank must be at least 1".into()))
            }
            GroupKind::Cyclic { order: 0 } | GroupKind::Dihedral { n: 0 } => {
                return Err(Error::Domain("order parameter must be at least 1".into()))
            }
            GroupKind::Symmetric { degree } if degree == 0 || degree > MAX_SYMMETRIC_DEGREE => {
                return Err(Error::Domain(format!(
                    "symmetric degree must lie in 1..={MAX_SYMMETRIC_DEGREE}"
                )))
            }
            _ => {}
        }
        Ok(GroupSpec {
            labels: kind.default_labels(),
            kind,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.kind.generator_count() {
            return Err(Error::Domain(format!(
                "expected {} generator labels, got {}",
                self.kind.generator_count(),
                labels.len()
            )));
        }
        for (i, l) in labels.iter().enumerate() {
            let valid = l.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
                && l.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
                && l != "e";
            if !valid {
                return Err(Error::Domain(format!("invalid generator label {l:?}")));
            }
            if labels[..i].contains(l) {
                return Err(Error::Domain(format!("duplicate generator label {l:?}")));
            }
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn free(rank: usize) -> Result<Self> {
        Self::new(GroupKind::Free { rank })
    }

    pub fn free_abelian(rank: usize) -> Result<Self> {
        Self::new(GroupKind::FreeAbelian { rank })
    }

    pub fn heisenberg() -> Self {
        Self::new(GroupKind::Heisenberg).expect("heisenberg has no parameters")
    }

    pub fn cyclic(order: usize) -> Result<Self> {
        Self::new(GroupKind::Cyclic { order })
    }

    pub fn dihedral(n: usize) -> Result<Self> {
        Self::new(GroupKind::Dihedral { n })
    }

    pub fn symmetric(degree: usize) -> Result<Self> {
        Self::new(GroupKind::Symmetric { degree })
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            GroupKind::Free { rank } => write!(f, "free:{rank}")?,
            GroupKind::FreeAbelian { rank } => write!(f, "abelian:{rank}")?,
            GroupKind::Heisenberg => write!(f, "heisenberg")?,
            GroupKind::Cyclic { order } => write!(f, "cyclic:{order}")?,
            GroupKind::Dihedral { n } => write!(f, "dihedral:{n}")?,
            GroupKind::Symmetric { degree } => write!(f, "symmetric:{degree}")?,
        }
        if self.labels != self.kind.default_labels() {
            write!(f, "({})", self.labels.join(","))?;
        }
        Ok(())
    }
}

impl FromStr for GroupSpec {
    type Err = Error;

    /// Parses `free:2`, `abelian:3`, `heisenberg`, `cyclic:6`, `dihedral:4`,
    /// `symmetric:3`, optionally followed by labels as in `free:2(a,b)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, labels) = match s.find('(') {
            Some(i) => {
                let rest = s[i + 1..]
                    .strip_suffix(')')
                    .ok_or_else(|| Error::Parse(format!("unclosed label list in {s:?}")))?;
                let labels = rest.split(',').map(|l| l.trim().to_string()).collect();
                (&s[..i], Some(labels))
            }
            None => (s, None),
        };
        let (name, param) = match head.split_once(':') {
            Some((n, p)) => (n.trim(), Some(p.trim())),
            None => (head.trim(), None),
        };
        let number = |what: &str| -> Result<usize> {
            param
                .ok_or_else(|| Error::Parse(format!("{what} needs a parameter, e.g. {what}:2")))?
                .parse::<usize>()
                .map_err(|e| Error::Parse(format!("bad parameter in {s:?}: {e}")))
        };
        let kind = match name {
            "free" => GroupKind::Free {
                rank: number("free")?,
            },
            "abelian" => GroupKind::FreeAbelian {
                rank: number("abelian")?,
            },
            "heisenberg" => GroupKind::Heisenberg,
            "cyclic" => GroupKind::Cyclic {
                order: number("cyclic")?,
            },
            "dihedral" => GroupKind::Dihedral {
                n: number("dihedral")?,
            },
            "symmetric" => GroupKind::Symmetric {
                degree: number("symmetric")?,
            },
            other => return Err(Error::Parse(format!("unknown group kind {other:?}"))),
        };
        let spec = GroupSpec::new(kind)?;
        match labels {
            Some(l) => spec.with_labels(l),
            None => Ok(spec),
        }
    }
}

/// Tunable limits of a [`Group`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroupConfig {
    /// Maximum number of elements any single ball enumeration may hold.
    pub element_budget: usize,
    /// Radius of the memoized length table for groups without a closed-form length.
    pub length_radius: usize,
    /// Default bound for [`Group::element_order`].
    pub order_bound: usize,
}

impl Default for GroupConfig {
    fn default() -> Self {
        GroupConfig {
            element_budget: 2_000_000,
            length_radius: 12,
            order_bound: 256,
        }
    }
}

struct Inner {
    spec: GroupSpec,
    config: GroupConfig,
    length_table: OnceLock<Result<Arc<Ball>>>,
    balls: Mutex<BTreeMap<usize, Arc<Ball>>>,
}

/// A concrete group. Cloning is cheap and clones share memoized balls.
#[derive(Clone)]
pub struct Group {
    inner: Arc<Inner>,
}

impl fmt::Debug for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Group").field(&self.inner.spec).finish()
    }
}

impl PartialEq for Group {
    fn eq(&self, other: &Self) -> bool {
        self.inner.spec == other.inner.spec
    }
}

impl Group {
    pub fn new(spec: GroupSpec) -> Self {
        Self::with_config(spec, GroupConfig::default())
    }

    pub fn with_config(spec: GroupSpec, config: GroupConfig) -> Self {
        Group {
            inner: Arc::new(Inner {
                spec,
                config,
                length_table: OnceLock::new(),
                balls: Mutex::new(BTreeMap::new()),
            }),
        }
    }

    /// Parses a group specification string such as `free:2` or `heisenberg`.
    pub fn from_spec_str(s: &str) -> Result<Self> {
        Ok(Self::new(s.parse()?))
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.inner.spec
    }

    pub fn kind(&self) -> GroupKind {
        self.inner.spec.kind
    }

    pub fn config(&self) -> &GroupConfig {
        &self.inner.config
    }

    pub fn labels(&self) -> &[String] {
        &self.inner.spec.labels
    }

    pub fn generator_count(&self) -> usize {
        self.kind().generator_count()
    }

    /// Group order, or `None` for infinite groups.
    pub fn order(&self) -> Option<usize> {
        match self.kind() {
            GroupKind::Cyclic { order } => Some(order),
            GroupKind::Dihedral { n } => Some(2 * n),
            GroupKind::Symmetric { degree } => Some((1..=degree).product()),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.order().is_some()
    }

    pub fn is_abelian(&self) -> bool {
        match self.kind() {
            GroupKind::Free { rank } => rank == 1,
            GroupKind::FreeAbelian { .. } | GroupKind::Cyclic { .. } => true,
            GroupKind::Heisenberg => false,
            GroupKind::Dihedral { n } => n <= 2,
            GroupKind::Symmetric { degree } => degree <= 2,
        }
    }

    pub fn identity(&self) -> GroupElement {
        match self.kind() {
            GroupKind::Free { .. } => GroupElement::Word(Vec::new()),
            GroupKind::FreeAbelian { rank } => GroupElement::Exponents(vec![0; rank]),
            GroupKind::Heisenberg => GroupElement::Heisenberg([0; 3]),
            GroupKind::Cyclic { .. } => GroupElement::Residue(0),
            GroupKind::Dihedral { .. } => GroupElement::Dihedral {
                rotation: 0,
                flip: false,
            },
            GroupKind::Symmetric { degree } => GroupElement::Perm((0..degree as u8).collect()),
        }
    }

    pub fn is_identity(&self, g: &GroupElement) -> bool {
        *g == self.identity()
    }

    /// The element named by a single letter.
    pub fn letter(&self, letter: Letter) -> GroupElement {
        let i = letter.generator as usize;
        assert!(i < self.generator_count(), "generator index out of range");
        let g = match self.kind() {
            GroupKind::Free { .. } => {
                GroupElement::Word(vec![Letter::new(letter.generator, false)])
            }
            GroupKind::FreeAbelian { rank } => {
                let mut v = vec![0; rank];
                v[i] = 1;
                GroupElement::Exponents(v)
            }
            GroupKind::Heisenberg => {
                let mut t = [0; 3];
                t[i] = 1;
                GroupElement::Heisenberg(t)
            }
            GroupKind::Cyclic { order } => GroupElement::Residue(1 % order as u32),
            GroupKind::Dihedral { n } => {
                if i == 0 {
                    GroupElement::Dihedral {
                        rotation: 1 % n as u32,
                        flip: false,
                    }
                } else {
                    GroupElement::Dihedral {
                        rotation: 0,
                        flip: true,
                    }
                }
            }
            GroupKind::Symmetric { degree } => {
                let mut p: Vec<u8> = (0..degree as u8).collect();
                p.swap(i, i + 1);
                GroupElement::Perm(p)
            }
        };
        if letter.inverse {
            self.inverse(&g)
        } else {
            g
        }
    }

    pub fn generator(&self, i: usize) -> GroupElement {
        self.letter(Letter::new(i as u16, false))
    }

    /// All letters `x, x⁻¹, y, y⁻¹, …` in order.
    pub fn letters(&self) -> Vec<Letter> {
        (0..self.generator_count() as u16)
            .flat_map(|g| [Letter::new(g, false), Letter::new(g, true)])
            .collect()
    }

    /// The symmetric generating set, one entry per letter.
    pub fn symmetric_generators(&self) -> Vec<GroupElement> {
        self.letters().into_iter().map(|l| self.letter(l)).collect()
    }

    /// Whether `g` is a well-formed normal form of this group.
    pub fn contains(&self, g: &GroupElement) -> bool {
        match (self.kind(), g) {
            (GroupKind::Free { rank }, GroupElement::Word(w)) => {
                w.iter().all(|l| (l.generator as usize) < rank)
                    && w.windows(2).all(|p| p[0] != p[1].inv())
            }
            (GroupKind::FreeAbelian { rank }, GroupElement::Exponents(v)) => v.len() == rank,
            (GroupKind::Heisenberg, GroupElement::Heisenberg(_)) => true,
            (GroupKind::Cyclic { order }, GroupElement::Residue(k)) => (*k as usize) < order,
            (GroupKind::Dihedral { n }, GroupElement::Dihedral { rotation, .. }) => {
                (*rotation as usize) < n
            }
            (GroupKind::Symmetric { degree }, GroupElement::Perm(p)) => {
                let mut seen = vec![false; degree];
                p.len() == degree
                    && p.iter().all(|&i| {
                        let i = i as usize;
                        i < degree && !std::mem::replace(&mut seen[i], true)
                    })
            }
            _ => false,
        }
    }

    pub fn check(&self, g: &GroupElement) -> Result<()> {
        if self.contains(g) {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "{g:?} is not an element of {}",
                self.inner.spec
            )))
        }
    }

    /// Checked product: errors when either operand belongs to another group.
    pub fn mul(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.op(a, b))
    }

    /// Checked inverse.
    pub fn inv(&self, a: &GroupElement) -> Result<GroupElement> {
        self.check(a)?;
        Ok(self.inverse(a))
    }

    /// Product of two members. Operands are assumed to belong to this group.
    pub fn op(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        use GroupElement::*;
        match (a, b) {
            (Word(x), Word(y)) => {
                let mut out = x.clone();
                for &l in y {
                    if out.last() == Some(&l.inv()) {
                        out.pop();
                    } else {
                        out.push(l);
                    }
                }
                Word(out)
            }
            (Exponents(x), Exponents(y)) => {
                Exponents(x.iter().zip(y).map(|(p, q)| p + q).collect())
            }
            (Heisenberg([a1, b1, c1]), Heisenberg([a2, b2, c2])) => {
                Heisenberg([a1 + a2, b1 + b2, c1 + c2 + a1 * b2])
            }
            (Residue(x), Residue(y)) => {
                let n = self.cyclic_order();
                Residue(((*x as u64 + *y as u64) % n as u64) as u32)
            }
            (
                Dihedral {
                    rotation: r1,
                    flip: f1,
                },
                Dihedral {
                    rotation: r2,
                    flip: f2,
                },
            ) => {
                let n = self.cyclic_order() as u64;
                let r2 = if *f1 {
                    (n - *r2 as u64) % n
                } else {
                    *r2 as u64
                };
                Dihedral {
                    rotation: ((*r1 as u64 + r2) % n) as u32,
                    flip: f1 ^ f2,
                }
            }
            (Perm(g), Perm(h)) => Perm(h.iter().map(|&i| g[i as usize]).collect()),
            _ => panic!("operands from different group backends: {a:?}, {b:?}"),
        }
    }

    /// Inverse of a member.
    pub fn inverse(&self, a: &GroupElement) -> GroupElement {
        use GroupElement::*;
        match a {
            Word(w) => Word(w.iter().rev().map(|l| l.inv()).collect()),
            Exponents(v) => Exponents(v.iter().map(|k| -k).collect()),
            Heisenberg([x, y, z]) => Heisenberg([-x, -y, x * y - z]),
            Residue(k) => {
                let n = self.cyclic_order() as u32;
                Residue((n - k) % n)
            }
            Dihedral { rotation, flip } => {
                if *flip {
                    a.clone()
                } else {
                    let n = self.cyclic_order() as u32;
                    Dihedral {
                        rotation: (n - rotation) % n,
                        flip: false,
                    }
                }
            }
            Perm(p) => {
                let mut q = vec![0u8; p.len()];
                for (i, &j) in p.iter().enumerate() {
                    q[j as usize] = i as u8;
                }
                Perm(q)
            }
        }
    }

    fn cyclic_order(&self) -> usize {
        match self.kind() {
            GroupKind::Cyclic { order } => order,
            GroupKind::Dihedral { n } => n,
            _ => unreachable!("not a cyclic or dihedral group"),
        }
    }

    /// `g^n` for any integer `n`, by repeated squaring.
    pub fn pow(&self, g: &GroupElement, n: i64) -> GroupElement {
        let mut base = if n < 0 { self.inverse(g) } else { g.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = self.identity();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.op(&acc, &base);
            }
            base = self.op(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// `t g t⁻¹`.
    pub fn conjugate(&self, t: &GroupElement, g: &GroupElement) -> GroupElement {
        self.op(&self.op(t, g), &self.inverse(t))
    }

    pub fn commute(&self, a: &GroupElement, b: &GroupElement) -> bool {
        self.op(a, b) == self.op(b, a)
    }

    /// Evaluates a word letter by letter.
    pub fn eval_word(&self, word: &[Letter]) -> GroupElement {
        word.iter()
            .fold(self.identity(), |acc, &l| self.op(&acc, &self.letter(l)))
    }

    /// A canonical generator word evaluating to `g`.
    ///
    /// For free, free abelian, cyclic, dihedral and symmetric groups the word
    /// is geodesic. For the Heisenberg group it is `x^a y^b [x,y]^k`, which is
    /// in general longer than the word length.
    pub fn word_of(&self, g: &GroupElement) -> Vec<Letter> {
        let power = |gen: u16, k: i64| {
            std::iter::repeat_n(Letter::new(gen, k < 0), k.unsigned_abs() as usize)
        };
        match g {
            GroupElement::Word(w) => w.clone(),
            GroupElement::Exponents(v) => v
                .iter()
                .enumerate()
                .flat_map(|(i, &k)| power(i as u16, k))
                .collect(),
            GroupElement::Heisenberg([a, b, c]) => {
                let k = c - a * b;
                let mut w: Vec<Letter> = power(0, *a).chain(power(1, *b)).collect();
                let comm = commutator_word(&[Letter::new(0, false)], &[Letter::new(1, false)]);
                let block = if k >= 0 { comm } else { inverse_word(&comm) };
                for _ in 0..k.unsigned_abs() {
                    w.extend_from_slice(&block);
                }
                w
            }
            GroupElement::Residue(k) => {
                let n = self.cyclic_order() as i64;
                power(0, symmetric_rep(*k as i64, n)).collect()
            }
            GroupElement::Dihedral { rotation, flip } => {
                let n = self.cyclic_order() as i64;
                let mut w: Vec<Letter> = power(0, symmetric_rep(*rotation as i64, n)).collect();
                if *flip {
                    w.push(Letter::new(1, false));
                }
                w
            }
            GroupElement::Perm(p) => {
                // g · s_{i1} ⋯ s_{im} = e, so g = s_{im} ⋯ s_{i1}.
                let mut p = p.clone();
                let mut right = Vec::new();
                while let Some(i) = (0..p.len().saturating_sub(1)).find(|&i| p[i] > p[i + 1]) {
                    p.swap(i, i + 1);
                    right.push(Letter::new(i as u16, false));
                }
                right.reverse();
                right
            }
        }
    }

    /// Defining relators of the presentation on the shipped generators.
    pub fn relators(&self) -> Vec<Vec<Letter>> {
        let l = |g: usize| vec![Letter::new(g as u16, false)];
        match self.kind() {
            GroupKind::Free { .. } => Vec::new(),
            GroupKind::FreeAbelian { rank } => (0..rank)
                .flat_map(|i| (i + 1..rank).map(move |j| (i, j)))
                .map(|(i, j)| commutator_word(&l(i), &l(j)))
                .collect(),
            GroupKind::Heisenberg => {
                let c = commutator_word(&l(0), &l(1));
                vec![commutator_word(&l(0), &c), commutator_word(&l(1), &c)]
            }
            GroupKind::Cyclic { order } => vec![l(0).repeat(order)],
            GroupKind::Dihedral { n } => {
                let sr = [l(1), l(0)].concat();
                vec![l(0).repeat(n), l(1).repeat(2), sr.repeat(2)]
            }
            GroupKind::Symmetric { degree } => {
                let m = degree - 1;
                let mut rels = Vec::new();
                for i in 0..m {
                    rels.push(l(i).repeat(2));
                    if i + 1 < m {
                        rels.push([l(i), l(i + 1)].concat().repeat(3));
                    }
                    for j in i + 2..m {
                        rels.push([l(i), l(j)].concat().repeat(2));
                    }
                }
                rels
            }
        }
    }

    /// Per-generator exponent sums of `g`, well defined for the infinite
    /// shipped groups. `None` for finite groups.
    pub fn exponent_sums(&self, g: &GroupElement) -> Option<Vec<i64>> {
        match g {
            GroupElement::Word(w) => {
                let mut sums = vec![0; self.generator_count()];
                for l in w {
                    sums[l.generator as usize] += if l.inverse { -1 } else { 1 };
                }
                Some(sums)
            }
            GroupElement::Exponents(v) => Some(v.clone()),
            GroupElement::Heisenberg([a, b, _]) => Some(vec![*a, *b]),
            _ => None,
        }
    }

    /// Word length when a closed form is known.
    pub fn closed_form_length(&self, g: &GroupElement) -> Option<usize> {
        match g {
            GroupElement::Word(w) => Some(w.len()),
            GroupElement::Exponents(v) => Some(v.iter().map(|k| k.unsigned_abs() as usize).sum()),
            GroupElement::Residue(k) => {
                let n = self.cyclic_order();
                let k = *k as usize;
                Some(k.min(n - k))
            }
            GroupElement::Perm(p) => Some(
                (0..p.len())
                    .flat_map(|i| (i + 1..p.len()).map(move |j| (i, j)))
                    .filter(|&(i, j)| p[i] > p[j])
                    .count(),
            ),
            GroupElement::Heisenberg(_) | GroupElement::Dihedral { .. } => None,
        }
    }

    /// Renders `g` as a generator word, e.g. `x^2*y^-1`; the identity is `e`.
    pub fn format(&self, g: &GroupElement) -> String {
        if let GroupElement::Heisenberg([a, b, c]) = g {
            let mut parts = Vec::new();
            let labels = self.labels();
            push_power(&mut parts, &labels[0], *a);
            push_power(&mut parts, &labels[1], *b);
            push_power(&mut parts, self.central_alias(), c - a * b);
            return if parts.is_empty() {
                "e".into()
            } else {
                parts.join("*")
            };
        }
        if let GroupElement::Residue(k) = g {
            return if *k == 0 {
                "e".into()
            } else {
                let mut parts = Vec::new();
                push_power(&mut parts, &self.labels()[0], *k as i64);
                parts.join("*")
            };
        }
        if let GroupElement::Dihedral { rotation, flip } = g {
            let mut parts = Vec::new();
            push_power(&mut parts, &self.labels()[0], *rotation as i64);
            if *flip {
                parts.push(self.labels()[1].clone());
            }
            return if parts.is_empty() {
                "e".into()
            } else {
                parts.join("*")
            };
        }
        self.format_word(&self.word_of(g))
    }

    /// Renders a word with runs compressed into powers.
    pub fn format_word(&self, word: &[Letter]) -> String {
        let mut parts = Vec::new();
        let mut i = 0;
        while i < word.len() {
            let gen = word[i].generator;
            let mut exp = 0i64;
            while i < word.len() && word[i].generator == gen {
                exp += if word[i].inverse { -1 } else { 1 };
                i += 1;
            }
            push_power(&mut parts, &self.labels()[gen as usize], exp);
        }
        if parts.is_empty() {
            "e".into()
        } else {
            parts.join("*")
        }
    }

    /// Name of the central element `[x, y]` in the Heisenberg group.
    pub(crate) fn central_alias(&self) -> &str {
        if self.labels().iter().any(|l| l == "z") {
            "c"
        } else {
            "z"
        }
    }

    /// Parses an element from a generator word such as `x*y^-1*x^2`.
    pub fn parse(&self, s: &str) -> Result<GroupElement> {
        parse::parse_element(self, s)
    }
}

fn push_power(parts: &mut Vec<String>, label: &str, exp: i64) {
    match exp {
        0 => {}
        1 => parts.push(label.to_string()),
        k => parts.push(format!("{label}^{k}")),
    }
}

fn symmetric_rep(k: i64, n: i64) -> i64 {
    if 2 * k > n {
        k - n
    } else {
        k
    }
}

pub(crate) fn inverse_word(w: &[Letter]) -> Vec<Letter> {
    w.iter().rev().map(|l| l.inv()).collect()
}

/// `a b a⁻¹ b⁻¹` as a word.
pub(crate) fn commutator_word(a: &[Letter], b: &[Letter]) -> Vec<Letter> {
    [a.to_vec(), b.to_vec(), inverse_word(a), inverse_word(b)].concat()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(spec: &str) -> Group {
        Group::from_spec_str(spec).unwrap()
    }

    #[test]
    fn free_cancellation() {
        let f2 = g("free:2");
        let xy = f2.parse("x*y").unwrap();
        let y_inv = f2.parse("y^-1").unwrap();
        assert_eq!(f2.mul(&xy, &y_inv).unwrap(), f2.parse("x").unwrap());
    }

    #[test]
    fn heisenberg_product_rule() {
        let h = g("heisenberg");
        let p = h
            .mul(
                &GroupElement::Heisenberg([1, 0, 0]),
                &GroupElement::Heisenberg([0, 1, 0]),
            )
            .unwrap();
        assert_eq!(p, GroupElement::Heisenberg([1, 1, 1]));
        assert_eq!(
            h.parse("x*y*x^-1*y^-1").unwrap(),
            GroupElement::Heisenberg([0, 0, 1])
        );
        assert_eq!(h.parse("z").unwrap(), GroupElement::Heisenberg([0, 0, 1]));
    }

    #[test]
    fn cyclic_modular_product() {
        let z6 = g("cyclic:6");
        let p = z6
            .mul(&GroupElement::Residue(5), &GroupElement::Residue(3))
            .unwrap();
        assert_eq!(p, GroupElement::Residue(2));
    }

    #[test]
    fn mixed_operands_are_domain_errors() {
        let f2 = g("free:2");
        let err = f2
            .mul(&f2.identity(), &GroupElement::Residue(1))
            .unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
        let f1 = g("free:1");
        assert!(f1.mul(&f1.identity(), &f2.parse("y").unwrap()).is_err());
    }

    #[test]
    fn canonical_words_evaluate_back() {
        for spec in [
            "free:2",
            "abelian:3",
            "heisenberg",
            "cyclic:6",
            "dihedral:4",
            "symmetric:4",
        ] {
            let grp = g(spec);
            for el in grp.ball(3).unwrap().elements() {
                assert_eq!(&grp.eval_word(&grp.word_of(el)), el, "{spec}");
                assert_eq!(&grp.parse(&grp.format(el)).unwrap(), el, "{spec}");
            }
        }
    }

    #[test]
    fn relators_evaluate_to_identity() {
        for spec in [
            "free:2",
            "abelian:3",
            "heisenberg",
            "cyclic:6",
            "dihedral:4",
            "symmetric:5",
        ] {
            let grp = g(spec);
            for r in grp.relators() {
                assert!(grp.is_identity(&grp.eval_word(&r)), "{spec}");
            }
        }
    }

    #[test]
    fn spec_strings() {
        for s in [
            "free:2",
            "abelian:3",
            "heisenberg",
            "cyclic:6",
            "dihedral:4",
            "symmetric:3",
            "free:2(a,b)",
        ] {
            let spec: GroupSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
        assert!("symmetric:6".parse::<GroupSpec>().is_err());
        assert!("free:0".parse::<GroupSpec>().is_err());
        assert!("cyclic".parse::<GroupSpec>().is_err());
        assert!("free:2(a,a)".parse::<GroupSpec>().is_err());
    }

    #[test]
    fn pow_matches_repeated_product() {
        let h = g("heisenberg");
        let t = h.parse("x*y^2").unwrap();
        let mut acc = h.identity();
        for n in 0..7 {
            assert_eq!(h.pow(&t, n), acc);
            acc = h.op(&acc, &t);
        }
        assert_eq!(h.op(&h.pow(&t, -3), &h.pow(&t, 3)), h.identity());
    }
}
