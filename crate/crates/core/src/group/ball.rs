//! Cayley-graph balls, orders, centralizers and ball-relative conjugacy classes.

use std::collections::HashMap;
use std::sync::Arc;

use super::{Group, GroupElement};
use crate::error::{Error, Result};

/// All elements of word length at most `radius`, with their exact lengths.
///
/// Elements are ordered by length, then by normal form.
#[derive(Debug, Clone)]
pub struct Ball {
    radius: usize,
    elements: Vec<GroupElement>,
    lengths: HashMap<GroupElement, usize>,
    saturated: bool,
}

impl Ball {
    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.lengths.contains_key(g)
    }

    pub fn length(&self, g: &GroupElement) -> Option<usize> {
        self.lengths.get(g).copied()
    }

    /// Whether the whole (finite) group fits inside the ball.
    pub fn is_saturated(&self) -> bool {
        self.saturated
    }

    /// Elements of length exactly `n`.
    pub fn sphere(&self, n: usize) -> impl Iterator<Item = &GroupElement> {
        self.elements.iter().filter(move |g| self.lengths[*g] == n)
    }

    /// `sizes[n]` is the number of elements of length `n`, for `n <= radius`.
    pub fn sphere_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.radius.min(self.max_length()) + 1];
        for g in &self.elements {
            sizes[self.lengths[g]] += 1;
        }
        sizes
    }

    fn max_length(&self) -> usize {
        self.lengths.values().copied().max().unwrap_or(0)
    }
}

/// Result of a bounded order search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ElementOrder {
    Finite(usize),
    /// No `n <= bound` with `g^n = e`; infinite order is suspected, not proven.
    ExceedsBound(usize),
}

impl ElementOrder {
    pub fn is_finite(&self) -> bool {
        matches!(self, ElementOrder::Finite(_))
    }
}

/// Partition of a ball into classes of the relation "conjugate by some `t`
/// with `|t| <= closure_radius`" (transitively closed).
///
/// Classes can only merge as the closure radius grows.
#[derive(Debug, Clone)]
pub struct ClassPartition {
    radius: usize,
    closure_radius: usize,
    classes: Vec<Vec<GroupElement>>,
    class_of: HashMap<GroupElement, usize>,
}

impl ClassPartition {
    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn closure_radius(&self) -> usize {
        self.closure_radius
    }

    /// Classes in order of their smallest element; each class sorted.
    pub fn classes(&self) -> &[Vec<GroupElement>] {
        &self.classes
    }

    pub fn class_index(&self, g: &GroupElement) -> Option<usize> {
        self.class_of.get(g).copied()
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        self.classes.iter().map(Vec::len).collect()
    }

    /// The smallest element of class `i`.
    pub fn representative(&self, i: usize) -> &GroupElement {
        &self.classes[i][0]
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut i: usize) -> usize {
        while self.0[i] != i {
            self.0[i] = self.0[self.0[i]];
            i = self.0[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi] = lo;
        }
    }
}

impl Group {
    /// Breadth-first enumeration of `Ball(radius)` on the Cayley graph.
    pub fn enumerate_ball(&self, radius: usize) -> Result<Ball> {
        let budget = self.config().element_budget;
        let gens = self.symmetric_generators();
        let identity = self.identity();
        let mut lengths = HashMap::from([(identity.clone(), 0usize)]);
        let mut elements = vec![identity];
        let mut frontier_start = 0;
        let mut saturated = false;
        for depth in 1..=radius {
            let frontier_end = elements.len();
            if frontier_start == frontier_end {
                saturated = true;
                break;
            }
            let mut layer = Vec::new();
            for g in &elements[frontier_start..frontier_end] {
                for s in &gens {
                    let h = self.op(g, s);
                    if !lengths.contains_key(&h) {
                        lengths.insert(h.clone(), depth);
                        layer.push(h);
                        if lengths.len() > budget {
                            return Err(Error::Resource {
                                what: format!("Ball({radius}) of {}", self.spec()),
                                budget,
                            });
                        }
                    }
                }
            }
            layer.sort();
            elements.extend(layer);
            frontier_start = frontier_end;
        }
        if let Some(order) = self.order() {
            saturated |= elements.len() == order;
        }
        Ok(Ball {
            radius,
            elements,
            lengths,
            saturated,
        })
    }

    /// Memoized [`Group::enumerate_ball`].
    pub fn ball(&self, radius: usize) -> Result<Arc<Ball>> {
        // Finite groups saturate; never enumerate past the diameter.
        let radius = match self.order() {
            Some(order) => radius.min(order),
            None => radius,
        };
        if let Some(b) = self.inner.balls.lock().unwrap().get(&radius) {
            return Ok(b.clone());
        }
        let ball = Arc::new(self.enumerate_ball(radius)?);
        self.inner
            .balls
            .lock()
            .unwrap()
            .insert(radius, ball.clone());
        Ok(ball)
    }

    fn length_table(&self) -> Result<Arc<Ball>> {
        self.inner
            .length_table
            .get_or_init(|| {
                let radius = match self.order() {
                    Some(order) => order,
                    None => self.config().length_radius,
                };
                self.ball(radius)
            })
            .clone()
    }

    /// Exact word length with respect to the symmetric generating set.
    pub fn word_length(&self, g: &GroupElement) -> Result<usize> {
        self.check(g)?;
        if let Some(n) = self.closed_form_length(g) {
            return Ok(n);
        }
        let table = self.length_table()?;
        table.length(g).ok_or_else(|| Error::OutOfRange {
            what: format!("word length of {}", self.format(g)),
            radius: table.radius(),
            needed: Some(self.word_of(g).len()),
        })
    }

    /// Least `n <= bound` with `g^n = e`.
    pub fn element_order(&self, g: &GroupElement, bound: usize) -> ElementOrder {
        let mut acc = g.clone();
        for n in 1..=bound {
            if self.is_identity(&acc) {
                return ElementOrder::Finite(n);
            }
            acc = self.op(&acc, g);
        }
        ElementOrder::ExceedsBound(bound)
    }

    /// `{t : |t| <= radius, tg = gt}` in ball order.
    pub fn centralizer_in_ball(
        &self,
        g: &GroupElement,
        radius: usize,
    ) -> Result<Vec<GroupElement>> {
        self.check(g)?;
        Ok(self
            .ball(radius)?
            .elements()
            .iter()
            .filter(|t| self.commute(t, g))
            .cloned()
            .collect())
    }

    /// Whether `z` commutes with every element of `Ball(radius)`.
    ///
    /// On the shipped groups a ball of radius ≥ 1 contains the generators, so
    /// this is exact; it is reported per radius anyway.
    pub fn is_central_in_ball(&self, z: &GroupElement, radius: usize) -> Result<bool> {
        self.check(z)?;
        Ok(self
            .ball(radius.max(1))?
            .elements()
            .iter()
            .all(|t| self.commute(t, z)))
    }

    /// Partition of `Ball(radius)` by conjugacy through `Ball(closure_radius)`.
    pub fn conjugacy_classes_in_ball(
        &self,
        radius: usize,
        closure_radius: usize,
    ) -> Result<ClassPartition> {
        if closure_radius < radius {
            return Err(Error::Domain(format!(
                "closure radius {closure_radius} is smaller than ball radius {radius}"
            )));
        }
        let ball = self.ball(radius)?;
        let conjugators = self.ball(closure_radius)?;
        let index: HashMap<&GroupElement, usize> = ball
            .elements()
            .iter()
            .enumerate()
            .map(|(i, g)| (g, i))
            .collect();
        let mut uf = UnionFind((0..ball.len()).collect());
        if !self.is_abelian() {
            for (i, g) in ball.elements().iter().enumerate() {
                for t in conjugators.elements() {
                    if let Some(&j) = index.get(&self.conjugate(t, g)) {
                        uf.union(i, j);
                    }
                }
            }
        }
        let mut root_to_class: HashMap<usize, usize> = HashMap::new();
        let mut classes: Vec<Vec<GroupElement>> = Vec::new();
        for (i, g) in ball.elements().iter().enumerate() {
            let root = uf.find(i);
            let c = *root_to_class.entry(root).or_insert_with(|| {
                classes.push(Vec::new());
                classes.len() - 1
            });
            classes[c].push(g.clone());
        }
        for c in &mut classes {
            c.sort();
        }
        classes.sort_by(|a, b| a[0].cmp(&b[0]));
        let class_of = classes
            .iter()
            .enumerate()
            .flat_map(|(i, c)| c.iter().map(move |g| (g.clone(), i)))
            .collect();
        Ok(ClassPartition {
            radius,
            closure_radius,
            classes,
            class_of,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(spec: &str) -> Group {
        Group::from_spec_str(spec).unwrap()
    }

    #[test]
    fn free_ball_sizes() {
        let f2 = g("free:2");
        let b1 = f2.enumerate_ball(1).unwrap();
        assert_eq!(b1.len(), 5);
        let names: Vec<String> = b1.elements().iter().map(|e| f2.format(e)).collect();
        assert_eq!(names, ["e", "x", "x^-1", "y", "y^-1"]);
        // 1 + 4 + 4·3 reduced words
        assert_eq!(f2.enumerate_ball(2).unwrap().len(), 17);
        assert_eq!(f2.enumerate_ball(2).unwrap().sphere_sizes(), vec![1, 4, 12]);
    }

    #[test]
    fn finite_groups_saturate() {
        let s3 = g("symmetric:3");
        let b = s3.enumerate_ball(10).unwrap();
        assert_eq!(b.len(), 6);
        assert!(b.is_saturated());
        assert_eq!(s3.enumerate_ball(20).unwrap().elements(), b.elements());
    }

    #[test]
    fn budget_is_enforced() {
        let f2 = Group::with_config(
            "free:2".parse().unwrap(),
            super::super::GroupConfig {
                element_budget: 100,
                ..Default::default()
            },
        );
        assert!(f2.enumerate_ball(3).is_ok());
        assert!(matches!(f2.enumerate_ball(4), Err(Error::Resource { .. })));
    }

    #[test]
    fn word_lengths() {
        let f2 = g("free:2");
        assert_eq!(f2.word_length(&f2.parse("x*y*x^-1").unwrap()).unwrap(), 3);
        let z3 = g("abelian:3");
        assert_eq!(
            z3.word_length(&GroupElement::Exponents(vec![2, -3, 1]))
                .unwrap(),
            6
        );
        let h = g("heisenberg");
        assert_eq!(
            h.word_length(&GroupElement::Heisenberg([0, 0, 1])).unwrap(),
            4
        );
        assert_eq!(h.word_length(&h.identity()).unwrap(), 0);
    }

    #[test]
    fn heisenberg_out_of_table_is_an_error() {
        let h = Group::with_config(
            "heisenberg".parse().unwrap(),
            super::super::GroupConfig {
                length_radius: 3,
                ..Default::default()
            },
        );
        let far = GroupElement::Heisenberg([0, 0, 5]);
        match h.word_length(&far) {
            Err(Error::OutOfRange { radius, needed, .. }) => {
                assert_eq!(radius, 3);
                assert_eq!(needed, Some(20));
            }
            other => panic!("expected out-of-range, got {other:?}"),
        }
    }

    #[test]
    fn orders() {
        let s3 = g("symmetric:3");
        assert_eq!(
            s3.element_order(&s3.parse("s1").unwrap(), 256),
            ElementOrder::Finite(2)
        );
        let f2 = g("free:2");
        assert_eq!(
            f2.element_order(&f2.parse("x").unwrap(), 256),
            ElementOrder::ExceedsBound(256)
        );
        let z6 = g("cyclic:6");
        assert_eq!(
            z6.element_order(&z6.generator(0), 256),
            ElementOrder::Finite(6)
        );
        assert_eq!(
            z6.element_order(&z6.identity(), 256),
            ElementOrder::Finite(1)
        );
    }

    #[test]
    fn centralizers() {
        let f2 = g("free:2");
        let x = f2.parse("x").unwrap();
        let c: Vec<String> = f2
            .centralizer_in_ball(&x, 2)
            .unwrap()
            .iter()
            .map(|e| f2.format(e))
            .collect();
        assert_eq!(c, ["e", "x", "x^-1", "x^2", "x^-2"]);

        let z2 = g("abelian:2");
        let v = z2.parse("x*y").unwrap();
        assert_eq!(
            z2.centralizer_in_ball(&v, 3).unwrap().len(),
            z2.ball(3).unwrap().len()
        );

        let h = g("heisenberg");
        let z = GroupElement::Heisenberg([0, 0, 1]);
        for r in 0..4 {
            assert_eq!(
                h.centralizer_in_ball(&z, r).unwrap().len(),
                h.ball(r).unwrap().len()
            );
        }
    }

    #[test]
    fn conjugacy_classes() {
        let s3 = g("symmetric:3");
        let p = s3.conjugacy_classes_in_ball(6, 6).unwrap();
        let mut sizes = p.class_sizes();
        sizes.sort();
        assert_eq!(sizes, vec![1, 2, 3]);

        let z3 = g("abelian:3");
        let p = z3.conjugacy_classes_in_ball(2, 2).unwrap();
        assert!(p.class_sizes().iter().all(|&s| s == 1));

        let f2 = g("free:2");
        for closure in 1..6 {
            let p = f2.conjugacy_classes_in_ball(1, closure).unwrap();
            assert_eq!(p.classes().len(), 5);
        }
        assert!(f2.conjugacy_classes_in_ball(2, 1).is_err());
    }
}
