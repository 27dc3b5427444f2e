//! The adjoint-action groupoid Γ of a group.
//!
//! Objects are group elements and morphisms are pairs `(u, v)` with
//! source `s = v⁻¹u` and target `t = uv⁻¹ = v·s·v⁻¹`, so `(u, v)` conjugates
//! its source into its target by `v`.
//!
//! Composition is not given explicitly by the pair convention; it follows from
//! it. For `φ = (u, v)` and `ψ = (u', v')` with `s(ψ) = t(φ)`:
//!
//! ```text
//! ψ∘φ = (v'u, v'v)
//! s(ψ∘φ) = (v'v)⁻¹ v'u            = v⁻¹u          = s(φ)
//! t(ψ∘φ) = v'u v⁻¹ v'⁻¹            = v' t(φ) v'⁻¹  = v' s(ψ) v'⁻¹ = t(ψ)
//! ```
//!
//! The identity at `a` is `(a, e)` and `(u, v)⁻¹ = (v⁻¹uv⁻¹, v⁻¹)`.
//! A loop at `g` is `(g·t, t)` with `t` in the centralizer of `g`, and its
//! powers are `(g·tⁿ, tⁿ)`.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::group::{ClassPartition, ElementOrder, Group, GroupElement};

/// An arrow `(u, v)` of Γ. Source and target are always recomputed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Morphism {
    pub u: GroupElement,
    pub v: GroupElement,
}

impl Morphism {
    pub fn new(u: GroupElement, v: GroupElement) -> Self {
        Morphism { u, v }
    }

    /// The identity `(a, e)` at object `a`.
    pub fn identity(group: &Group, a: GroupElement) -> Self {
        Morphism::new(a, group.identity())
    }

    /// `s(φ) = v⁻¹u`.
    pub fn source(&self, group: &Group) -> GroupElement {
        group.op(&group.inverse(&self.v), &self.u)
    }

    /// `t(φ) = uv⁻¹`.
    pub fn target(&self, group: &Group) -> GroupElement {
        group.op(&self.u, &group.inverse(&self.v))
    }

    pub fn is_loop(&self, group: &Group) -> bool {
        self.source(group) == self.target(group)
    }

    pub fn is_identity(&self, group: &Group) -> bool {
        group.is_identity(&self.v)
    }

    pub fn check(&self, group: &Group) -> Result<()> {
        group.check(&self.u)?;
        group.check(&self.v)
    }

    pub fn to_json(&self, group: &Group) -> Value {
        json!({"u": group.format(&self.u), "v": group.format(&self.v)})
    }

    pub fn from_json(value: &Value, group: &Group) -> Result<Morphism> {
        let field = |k: &str| {
            value.get(k).and_then(Value::as_str).ok_or_else(|| {
                Error::Parse(format!("morphism JSON needs string field {k:?}: {value}"))
            })
        };
        Ok(Morphism::new(
            group.parse(field("u")?)?,
            group.parse(field("v")?)?,
        ))
    }

    pub fn format(&self, group: &Group) -> String {
        format!("({}, {})", group.format(&self.u), group.format(&self.v))
    }
}

/// `ψ∘φ = (v'u, v'v)`; requires `s(ψ) = t(φ)`.
pub fn compose(group: &Group, psi: &Morphism, phi: &Morphism) -> Result<Morphism> {
    psi.check(group)?;
    phi.check(group)?;
    let (s_psi, t_phi) = (psi.source(group), phi.target(group));
    if s_psi != t_phi {
        return Err(Error::Composition {
            left_source: group.format(&s_psi),
            right_target: group.format(&t_phi),
        });
    }
    Ok(compose_unchecked(group, psi, phi))
}

pub(crate) fn compose_unchecked(group: &Group, psi: &Morphism, phi: &Morphism) -> Morphism {
    Morphism::new(group.op(&psi.v, &phi.u), group.op(&psi.v, &phi.v))
}

/// `(u, v)⁻¹ = (v⁻¹uv⁻¹, v⁻¹)`.
pub fn inverse_morphism(group: &Group, phi: &Morphism) -> Morphism {
    let v_inv = group.inverse(&phi.v);
    Morphism::new(group.op(&group.op(&v_inv, &phi.u), &v_inv), v_inv)
}

/// `φⁿ` for a loop `φ` and `n >= 0`, by repeated composition.
pub fn loop_power(group: &Group, phi: &Morphism, n: usize) -> Result<Morphism> {
    if !phi.is_loop(group) {
        return Err(Error::Domain(format!(
            "{} is not a loop and cannot be iterated",
            phi.format(group)
        )));
    }
    let mut acc = Morphism::identity(group, phi.source(group));
    for _ in 0..n {
        acc = compose_unchecked(group, phi, &acc);
    }
    Ok(acc)
}

/// A loop `(g·t, t)` at object `g` with conjugator `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoopInfo {
    pub morphism: Morphism,
    pub object: GroupElement,
    pub conjugator: GroupElement,
    pub order: ElementOrder,
}

impl LoopInfo {
    pub fn to_json(&self, group: &Group) -> Value {
        let (flag, order) = match self.order {
            ElementOrder::Finite(n) => ("finite", json!(n)),
            ElementOrder::ExceedsBound(b) => ("exceeds-bound", json!(b)),
        };
        json!({
            "object": group.format(&self.object),
            "conjugator": group.format(&self.conjugator),
            "u": group.format(&self.morphism.u),
            "v": group.format(&self.morphism.v),
            "order_flag": flag,
            "order": order,
        })
    }
}

/// All loops `(g·t, t)` with `g ∈ Ball(r)` and `t ∈ Z(g) ∩ Ball(r)`, ordered by
/// object then conjugator. Conjugator orders use the group's order bound.
pub fn enumerate_loops(group: &Group, r: usize) -> Result<Vec<LoopInfo>> {
    let ball = group.ball(r)?;
    let bound = group.config().order_bound;
    let mut loops = Vec::new();
    for g in ball.elements() {
        for t in ball.elements().iter().filter(|t| group.commute(t, g)) {
            loops.push(LoopInfo {
                morphism: Morphism::new(group.op(g, t), t.clone()),
                object: g.clone(),
                conjugator: t.clone(),
                order: group.element_order(t, bound),
            });
        }
    }
    Ok(loops)
}

/// Class index of the component containing `φ`.
pub fn component_of(group: &Group, phi: &Morphism, partition: &ClassPartition) -> Result<usize> {
    let (s, t) = (phi.source(group), phi.target(group));
    let locate = |x: &GroupElement| {
        partition.class_index(x).ok_or_else(|| Error::OutOfRange {
            what: format!("object {}", group.format(x)),
            radius: partition.radius(),
            needed: group.word_length(x).ok(),
        })
    };
    let (cs, ct) = (locate(&s)?, locate(&t)?);
    if cs != ct {
        return Err(Error::Domain(format!(
            "source {} and target {} fall in different classes at closure radius {}; increase it",
            group.format(&s),
            group.format(&t),
            partition.closure_radius()
        )));
    }
    Ok(cs)
}

/// All morphisms `(u, v)` with `u, v ∈ Ball(r)`.
pub fn morphisms_in_ball(group: &Group, r: usize) -> Result<Vec<Morphism>> {
    let ball = group.ball(r)?;
    Ok(ball
        .elements()
        .iter()
        .flat_map(|u| {
            ball.elements()
                .iter()
                .map(move |v| Morphism::new(u.clone(), v.clone()))
        })
        .collect())
}

/// All composable pairs `(ψ, φ)` with both morphisms' components in `Ball(r)`.
pub fn composable_pairs(group: &Group, r: usize) -> Result<Vec<(Morphism, Morphism)>> {
    let ball = group.ball(r)?;
    let mut pairs = Vec::new();
    for phi in morphisms_in_ball(group, r)? {
        let t = phi.target(group);
        // ψ = (v'·t, v') for every admissible v'.
        for v2 in ball.elements() {
            let u2 = group.op(v2, &t);
            if ball.contains(&u2) {
                pairs.push((Morphism::new(u2, v2.clone()), phi.clone()));
            }
        }
    }
    Ok(pairs)
}

/// Morphisms from `a` to `b` whose conjugator lies in `Ball(r)`.
pub fn hom_set(
    group: &Group,
    a: &GroupElement,
    b: &GroupElement,
    r: usize,
) -> Result<Vec<Morphism>> {
    Ok(group
        .ball(r)?
        .elements()
        .iter()
        .filter(|v| &group.conjugate(v, a) == b)
        .map(|v| Morphism::new(group.op(v, a), v.clone()))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grp(s: &str) -> Group {
        Group::from_spec_str(s).unwrap()
    }

    fn m(g: &Group, u: &str, v: &str) -> Morphism {
        Morphism::new(g.parse(u).unwrap(), g.parse(v).unwrap())
    }

    #[test]
    fn identity_is_neutral() {
        let f2 = grp("free:2");
        let phi = m(&f2, "y*x", "y");
        let id_s = Morphism::identity(&f2, phi.source(&f2));
        let id_t = Morphism::identity(&f2, phi.target(&f2));
        assert_eq!(compose(&f2, &phi, &id_s).unwrap(), phi);
        assert_eq!(compose(&f2, &id_t, &phi).unwrap(), phi);
    }

    #[test]
    fn powers_on_integers() {
        let z = grp("abelian:1");
        let phi = m(&z, "x^2", "x");
        assert_eq!(compose(&z, &phi, &phi).unwrap(), m(&z, "x^3", "x^2"));
    }

    #[test]
    fn free_group_composition() {
        let f2 = grp("free:2");
        let phi = m(&f2, "y*x", "y");
        let psi = m(&f2, "x*y*x*y^-1", "x");
        assert_eq!(psi.source(&f2), phi.target(&f2));
        let c = compose(&f2, &psi, &phi).unwrap();
        assert_eq!(c, m(&f2, "x*y*x", "x*y"));
        assert_eq!(c.source(&f2), phi.source(&f2));
        assert_eq!(c.target(&f2), psi.target(&f2));
    }

    #[test]
    fn non_composable_pairs_report_both_objects() {
        let f2 = grp("free:2");
        let phi = m(&f2, "y*x", "y");
        let err = compose(&f2, &phi, &phi).unwrap_err();
        assert_eq!(
            err,
            Error::Composition {
                left_source: "x".into(),
                right_target: "y*x*y^-1".into()
            }
        );
    }

    #[test]
    fn inverses() {
        let z = grp("abelian:1");
        let phi = m(&z, "x^2", "x");
        assert_eq!(inverse_morphism(&z, &phi), m(&z, "e", "x^-1"));
        let id = Morphism::identity(&z, z.parse("x^3").unwrap());
        assert_eq!(inverse_morphism(&z, &id), id);

        let f2 = grp("free:2");
        let phi = m(&f2, "y*x", "y");
        let inv = inverse_morphism(&f2, &phi);
        assert_eq!(inv.source(&f2), f2.parse("y*x*y^-1").unwrap());
        assert_eq!(inv.target(&f2), f2.parse("x").unwrap());
        assert_eq!(
            compose(&f2, &inv, &phi).unwrap(),
            Morphism::identity(&f2, phi.source(&f2))
        );
    }

    #[test]
    fn loops() {
        let f2 = grp("free:2");
        assert!(Morphism::identity(&f2, f2.parse("x*y").unwrap()).is_loop(&f2));
        assert!(!m(&f2, "y*x", "y").is_loop(&f2));
        let z2 = grp("abelian:2");
        assert!(m(&z2, "x*y^2", "y^-1").is_loop(&z2));
    }

    #[test]
    fn loop_enumeration() {
        let z = grp("abelian:1");
        assert_eq!(enumerate_loops(&z, 1).unwrap().len(), 9);

        let f2 = grp("free:2");
        let x = f2.parse("x").unwrap();
        let at_x: Vec<_> = enumerate_loops(&f2, 2)
            .unwrap()
            .into_iter()
            .filter(|l| l.object == x)
            .collect();
        assert_eq!(at_x.len(), 5);
        assert!(at_x[1..].iter().all(|l| !l.order.is_finite()));

        let s3 = grp("symmetric:3");
        let loops = enumerate_loops(&s3, 3).unwrap();
        // Σ_g |Z(g)| = |G| · #classes = 18
        assert_eq!(loops.len(), 18);
        for l in &loops {
            assert!(l.morphism.is_loop(&s3));
            assert!(l.order.is_finite());
        }
    }

    #[test]
    fn loop_power_law() {
        let h = grp("heisenberg");
        let g = h.parse("z").unwrap();
        let t = h.parse("x*y").unwrap();
        let phi = Morphism::new(h.op(&g, &t), t.clone());
        for n in 0..=10 {
            let tn = h.pow(&t, n as i64);
            assert_eq!(
                loop_power(&h, &phi, n).unwrap(),
                Morphism::new(h.op(&g, &tn), tn)
            );
        }
        assert!(loop_power(&h, &Morphism::new(t.clone(), h.parse("y").unwrap()), 2).is_err());
    }

    #[test]
    fn components() {
        let s3 = grp("symmetric:3");
        let part = s3.conjugacy_classes_in_ball(3, 3).unwrap();
        let a = s3.parse("(1 2)").unwrap();
        let b = s3.parse("(1 3)").unwrap();
        let homs = hom_set(&s3, &a, &b, 3).unwrap();
        assert!(!homs.is_empty());
        let c = component_of(&s3, &homs[0], &part).unwrap();
        assert_eq!(part.classes()[c].len(), 3);

        let z = grp("abelian:1");
        let part = z.conjugacy_classes_in_ball(3, 3).unwrap();
        let phi = m(&z, "x^3", "x");
        let c = component_of(&z, &phi, &part).unwrap();
        assert_eq!(part.classes()[c], vec![z.parse("x^2").unwrap()]);
        assert!(component_of(&z, &m(&z, "x^9", "e"), &part).is_err());
    }
}
