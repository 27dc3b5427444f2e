//! Derivations `d: ℂ[G] → 𝒜` stored as basis tables over a domain ball.
//!
//! A table entry `d(g)` is either exact (inner, central and (σ,τ)-inner
//! constructions) or truncated: built from a character by summing
//! `χ((g·t, g))·(g·t)` over `t ∈ Ball(R_trunc)` only. Truncated values are
//! correct at every coefficient `h` with `|g⁻¹h| <= R_trunc`, which makes the
//! Leibniz identity checkable on `Ball(window)` whenever
//! `window <= R_trunc − |u| − |v|`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::character::{Character, Homomorphism, Potential};
use crate::error::{Error, Result};
use crate::group::{Group, GroupElement};
use crate::groupoid::Morphism;
use crate::ring::RingElement;

/// JSON schema version for serialized derivations and reports.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    Inner,
    Central,
    Potential,
    FromCharacter,
    SigmaTauInner,
    Custom,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::Inner => "inner",
            Provenance::Central => "central",
            Provenance::Potential => "potential",
            Provenance::FromCharacter => "from-character",
            Provenance::SigmaTauInner => "sigma-tau-inner",
            Provenance::Custom => "custom",
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Provenance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "inner" => Provenance::Inner,
            "central" => Provenance::Central,
            "potential" => Provenance::Potential,
            "from-character" => Provenance::FromCharacter,
            "sigma-tau-inner" => Provenance::SigmaTauInner,
            "custom" => Provenance::Custom,
            other => return Err(Error::Parse(format!("unknown provenance {other:?}"))),
        })
    }
}

/// Sign convention for inner derivations.
///
/// The default `x ↦ xa − ax` is the one whose character is
/// `a(s(φ)) − a(t(φ))`; the other convention negates everything.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CommutatorConvention {
    #[default]
    XaMinusAx,
    AxMinusXa,
}

impl CommutatorConvention {
    /// The element `a'` with `d_a` (in this convention) equal to `x ↦ xa' − a'x`.
    pub fn normalize(&self, a: &RingElement) -> RingElement {
        match self {
            CommutatorConvention::XaMinusAx => a.clone(),
            CommutatorConvention::AxMinusXa => a.scale(Complex64::new(-1.0, 0.0)),
        }
    }

    pub fn describe(&self) -> &'static str {
        match self {
            CommutatorConvention::XaMinusAx => "d_a(x) = xa - ax",
            CommutatorConvention::AxMinusXa => "d_a(x) = ax - xa",
        }
    }
}

impl FromStr for CommutatorConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "xa-ax" => Ok(CommutatorConvention::XaMinusAx),
            "ax-xa" => Ok(CommutatorConvention::AxMinusXa),
            other => Err(Error::Parse(format!(
                "unknown commutator convention {other:?}; use xa-ax or ax-xa"
            ))),
        }
    }
}

/// A derivation as a table `g ↦ d(g)` over `Ball(dom_radius)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Derivation {
    table: BTreeMap<GroupElement, RingElement>,
    dom_radius: usize,
    trunc_radius: usize,
    exact: bool,
    provenance: Provenance,
}

impl Derivation {
    /// Builds a derivation from explicit values.
    ///
    /// Every element of `Ball(dom_radius)` gets an entry (missing ones are 0).
    /// For an exact table `trunc_radius` is the reach `max |g⁻¹h|` over the
    /// supports; for a truncated one it must be given.
    pub fn from_table(
        group: &Group,
        values: BTreeMap<GroupElement, RingElement>,
        dom_radius: usize,
        provenance: Provenance,
        truncation: Option<usize>,
    ) -> Result<Self> {
        let ball = group.ball(dom_radius)?;
        for g in values.keys() {
            if !ball.contains(g) {
                return Err(Error::out_of_range(
                    format!("table entry {}", group.format(g)),
                    dom_radius,
                ));
            }
        }
        let mut table = values;
        for g in ball.elements() {
            table.entry(g.clone()).or_default();
        }
        let (exact, trunc_radius) = match truncation {
            Some(r) => (false, r),
            None => {
                let mut reach = 0;
                for (g, value) in &table {
                    let g_inv = group.inverse(g);
                    for h in value.support() {
                        reach = reach.max(group.word_length(&group.op(&g_inv, h))?);
                    }
                }
                (true, reach)
            }
        };
        Ok(Derivation {
            table,
            dom_radius,
            trunc_radius,
            exact,
            provenance,
        })
    }

    pub fn table(&self) -> impl Iterator<Item = (&GroupElement, &RingElement)> {
        self.table.iter()
    }

    pub fn dom_radius(&self) -> usize {
        self.dom_radius
    }

    pub fn trunc_radius(&self) -> usize {
        self.trunc_radius
    }

    /// Whether values are complete rather than truncated.
    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn get(&self, g: &GroupElement) -> Result<&RingElement> {
        self.table
            .get(g)
            .ok_or_else(|| Error::out_of_range(format!("basis element {g:?}"), self.dom_radius))
    }

    fn get_named(&self, group: &Group, g: &GroupElement) -> Result<&RingElement> {
        self.table.get(g).ok_or_else(|| Error::OutOfRange {
            what: format!("d({})", group.format(g)),
            radius: self.dom_radius,
            needed: group.word_length(g).ok(),
        })
    }

    /// Replaces one table value; the derivation becomes `custom`.
    pub fn set_value(&mut self, g: GroupElement, value: RingElement) -> Result<()> {
        if !self.table.contains_key(&g) {
            return Err(Error::out_of_range(
                format!("basis element {g:?}"),
                self.dom_radius,
            ));
        }
        self.table.insert(g, value);
        self.provenance = Provenance::Custom;
        Ok(())
    }

    /// Linear extension `Σ ω(g)·d(g)`.
    pub fn apply(&self, group: &Group, omega: &RingElement) -> Result<RingElement> {
        let mut out = RingElement::zero();
        for (g, c) in omega.terms() {
            for (h, x) in self.get_named(group, g)?.terms() {
                out.add_term(h.clone(), c * x);
            }
        }
        Ok(out)
    }

    pub fn to_json(&self, group: &Group) -> Value {
        let table: serde_json::Map<String, Value> = self
            .table
            .iter()
            .map(|(g, v)| (group.format(g), v.to_json(group)))
            .collect();
        json!({
            "schema": SCHEMA_VERSION,
            "provenance": self.provenance.as_str(),
            "dom_radius": self.dom_radius,
            "trunc_radius": self.trunc_radius,
            "exact": self.exact,
            "table": table,
        })
    }

    pub fn from_json(value: &Value, group: &Group) -> Result<Self> {
        let int = |k: &str| {
            value
                .get(k)
                .and_then(Value::as_u64)
                .map(|v| v as usize)
                .ok_or_else(|| Error::Parse(format!("derivation JSON needs integer {k:?}")))
        };
        let dom_radius = int("dom_radius")?;
        let exact = value.get("exact").and_then(Value::as_bool).unwrap_or(true);
        let provenance = match value.get("provenance").and_then(Value::as_str) {
            Some(p) => p.parse()?,
            None => Provenance::Custom,
        };
        let table_json = value
            .get("table")
            .and_then(Value::as_object)
            .ok_or_else(|| Error::Parse("derivation JSON needs a \"table\" object".into()))?;
        let mut table = BTreeMap::new();
        for (word, payload) in table_json {
            table.insert(group.parse(word)?, RingElement::from_json(payload, group)?);
        }
        let truncation = if exact {
            None
        } else {
            Some(int("trunc_radius")?)
        };
        Derivation::from_table(group, table, dom_radius, provenance, truncation)
    }
}

/// `d(g) = Σ_{t ∈ Ball(R_trunc)} χ((g·t, g))·(g·t)` for `g ∈ Ball(R_dom)`.
pub fn derivation_from_character(
    group: &Group,
    chi: &Character,
    dom_radius: usize,
    trunc_radius: usize,
) -> Result<Derivation> {
    build_from_character(
        group,
        chi,
        dom_radius,
        trunc_radius,
        Provenance::FromCharacter,
    )
}

fn build_from_character(
    group: &Group,
    chi: &Character,
    dom_radius: usize,
    trunc_radius: usize,
    provenance: Provenance,
) -> Result<Derivation> {
    let dom = group.ball(dom_radius)?;
    let reach = group.ball(trunc_radius)?;
    let table = dom
        .elements()
        .par_iter()
        .map(|g| {
            let mut value = RingElement::zero();
            for t in reach.elements() {
                let u = group.op(g, t);
                let c = chi.evaluate(group, &Morphism::new(u.clone(), g.clone()))?;
                value.add_term(u, c);
            }
            Ok((g.clone(), value))
        })
        .collect::<Result<BTreeMap<_, _>>>()?;
    Derivation::from_table(group, table, dom_radius, provenance, Some(trunc_radius))
}

/// `d(g) = g·a − a·g`.
pub fn inner_derivation(group: &Group, a: &RingElement, dom_radius: usize) -> Result<Derivation> {
    for g in a.support() {
        group.check(g)?;
    }
    let table = group
        .ball(dom_radius)?
        .elements()
        .iter()
        .map(|g| (g.clone(), a.left_mul(g, group).sub(&a.right_mul(g, group))))
        .collect();
    Derivation::from_table(group, table, dom_radius, Provenance::Inner, None)
}

/// Inner derivation under an explicit sign convention.
pub fn inner_derivation_with(
    group: &Group,
    a: &RingElement,
    dom_radius: usize,
    convention: CommutatorConvention,
) -> Result<Derivation> {
    inner_derivation(group, &convention.normalize(a), dom_radius)
}

/// `d(g) = t(g)·(g·z)` for central `z`.
pub fn central_derivation(
    group: &Group,
    z: &GroupElement,
    hom: &Homomorphism,
    dom_radius: usize,
) -> Result<Derivation> {
    if !group.is_central_in_ball(z, dom_radius)? {
        return Err(Error::Domain(format!("{} is not central", group.format(z))));
    }
    let table = group
        .ball(dom_radius)?
        .elements()
        .iter()
        .map(|g| {
            (
                g.clone(),
                RingElement::monomial(group.op(g, z), hom.eval(group, g)),
            )
        })
        .collect();
    Derivation::from_table(group, table, dom_radius, Provenance::Central, None)
}

/// The truncated derivation of the potential character `f(s) − f(t)`.
pub fn potential_derivation(
    group: &Group,
    f: &Potential,
    dom_radius: usize,
    trunc_radius: usize,
) -> Result<Derivation> {
    build_from_character(
        group,
        &Character::Potential(f.clone()),
        dom_radius,
        trunc_radius,
        Provenance::Potential,
    )
}

/// A group endomorphism given by generator images, extended multiplicatively.
#[derive(Debug, Clone, PartialEq)]
pub struct EndomorphismSpec {
    images: Vec<GroupElement>,
}

impl EndomorphismSpec {
    /// Validates the images against every defining relator.
    pub fn new(group: &Group, images: Vec<GroupElement>) -> Result<Self> {
        if images.len() != group.generator_count() {
            return Err(Error::Domain(format!(
                "endomorphism needs {} generator images, got {}",
                group.generator_count(),
                images.len()
            )));
        }
        for img in &images {
            group.check(img)?;
        }
        let spec = EndomorphismSpec { images };
        for rel in group.relators() {
            let image = spec.apply_word(group, &rel);
            if !group.is_identity(&image) {
                return Err(Error::Domain(format!(
                    "generator images violate relator {}",
                    group.format_word(&rel)
                )));
            }
        }
        Ok(spec)
    }

    pub fn identity(group: &Group) -> Self {
        EndomorphismSpec {
            images: (0..group.generator_count())
                .map(|i| group.generator(i))
                .collect(),
        }
    }

    /// `id`, or `x=x^2,y=y*x`; unnamed generators are fixed.
    pub fn parse(s: &str, group: &Group) -> Result<Self> {
        let s = s.trim();
        let mut images: Vec<GroupElement> = (0..group.generator_count())
            .map(|i| group.generator(i))
            .collect();
        if s == "id" || s.is_empty() {
            return Ok(EndomorphismSpec { images });
        }
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (label, word) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected gen=word, got {part:?}")))?;
            let i = group
                .labels()
                .iter()
                .position(|l| l == label.trim())
                .ok_or_else(|| Error::Parse(format!("unknown generator {label:?}")))?;
            images[i] = group.parse(word)?;
        }
        EndomorphismSpec::new(group, images)
    }

    pub fn is_identity(&self, group: &Group) -> bool {
        *self == EndomorphismSpec::identity(group)
    }

    fn apply_word(&self, group: &Group, word: &[crate::group::Letter]) -> GroupElement {
        word.iter().fold(group.identity(), |acc, l| {
            let img = &self.images[l.generator as usize];
            if l.inverse {
                group.op(&acc, &group.inverse(img))
            } else {
                group.op(&acc, img)
            }
        })
    }

    pub fn apply(&self, group: &Group, g: &GroupElement) -> GroupElement {
        self.apply_word(group, &group.word_of(g))
    }

    pub fn format(&self, group: &Group) -> String {
        if self.is_identity(group) {
            return "id".into();
        }
        group
            .labels()
            .iter()
            .zip(&self.images)
            .map(|(l, g)| format!("{l}={}", group.format(g)))
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// `d(g) = a·σ(g) − τ(g)·a`, a `(σ,τ)`-derivation.
pub fn sigma_tau_inner(
    group: &Group,
    a: &RingElement,
    sigma: &EndomorphismSpec,
    tau: &EndomorphismSpec,
    dom_radius: usize,
) -> Result<Derivation> {
    for g in a.support() {
        group.check(g)?;
    }
    let table = group
        .ball(dom_radius)?
        .elements()
        .iter()
        .map(|g| {
            let s = sigma.apply(group, g);
            let t = tau.apply(group, g);
            (
                g.clone(),
                a.right_mul(&s, group).sub(&a.left_mul(&t, group)),
            )
        })
        .collect();
    Derivation::from_table(group, table, dom_radius, Provenance::SigmaTauInner, None)
}

/// Windowed Leibniz defect.
#[derive(Debug, Clone, PartialEq)]
pub struct LeibnizDefect {
    /// Sup norm of the defect restricted to `Ball(window)`; unrestricted when `window` is `None`.
    pub defect: f64,
    pub window: Option<usize>,
    /// Largest truncation-sound window; `None` for exact derivations.
    pub sound_bound: Option<i64>,
    /// Whether truncation cannot affect the defect. When false the value is advisory.
    pub sound: bool,
}

fn windowed_sup(group: &Group, e: &RingElement, window: usize) -> Result<f64> {
    let mut sup: f64 = 0.0;
    for (g, c) in e.terms() {
        // Closed-form lengths avoid enumerating large balls.
        let inside = match group.closed_form_length(g) {
            Some(l) => l <= window,
            None => group.ball(window)?.contains(g),
        };
        if inside {
            sup = sup.max(c.norm());
        }
    }
    Ok(sup)
}

/// Sup norm of `d(uv) − d(u)·v − u·d(v)` on `Ball(window)`.
pub fn leibniz_defect(
    group: &Group,
    d: &Derivation,
    u: &GroupElement,
    v: &GroupElement,
    window: usize,
) -> Result<LeibnizDefect> {
    twisted_core(group, d, None, u, v, Some(window))
}

/// Sup norm of `d(uv) − d(u)·σ(v) − τ(u)·d(v)` on `Ball(window)`.
pub fn twisted_leibniz_defect(
    group: &Group,
    d: &Derivation,
    sigma: &EndomorphismSpec,
    tau: &EndomorphismSpec,
    u: &GroupElement,
    v: &GroupElement,
    window: usize,
) -> Result<LeibnizDefect> {
    twisted_core(group, d, Some((sigma, tau)), u, v, Some(window))
}

fn twisted_core(
    group: &Group,
    d: &Derivation,
    twist: Option<(&EndomorphismSpec, &EndomorphismSpec)>,
    u: &GroupElement,
    v: &GroupElement,
    window: Option<usize>,
) -> Result<LeibnizDefect> {
    group.check(u)?;
    group.check(v)?;
    let uv = group.op(u, v);
    let (sv, tu) = match twist {
        Some((sigma, tau)) => (sigma.apply(group, v), tau.apply(group, u)),
        None => (v.clone(), u.clone()),
    };
    let diff = d
        .get_named(group, &uv)?
        .sub(&d.get_named(group, u)?.right_mul(&sv, group))
        .sub(&d.get_named(group, v)?.left_mul(&tu, group));
    // No window: the whole defect, for exact tables.
    let defect = match window {
        Some(w) => windowed_sup(group, &diff, w)?,
        None => diff.sup_norm(),
    };
    let sound_bound = if d.is_exact() {
        None
    } else {
        let (lu, lv) = (group.word_length(u)? as i64, group.word_length(v)? as i64);
        let (lsv, ltu) = (
            group.word_length(&sv)? as i64,
            group.word_length(&tu)? as i64,
        );
        let reach = (lu + lsv).max(lv + ltu).max(lu + lv);
        Some(d.trunc_radius() as i64 - reach)
    };
    Ok(LeibnizDefect {
        defect,
        window,
        sound_bound,
        sound: match (window, sound_bound) {
            (_, None) => true,
            (Some(w), Some(b)) => w as i64 <= b,
            (None, Some(_)) => false,
        },
    })
}

/// Worst Leibniz defect over all pairs in `Ball(r)` that admit a sound window.
#[derive(Debug, Clone, PartialEq)]
pub struct LeibnizScan {
    pub radius: usize,
    pub checked: usize,
    /// Pairs with `uv` outside the domain or no sound window.
    pub skipped: usize,
    pub max_defect: f64,
    pub worst: Option<(GroupElement, GroupElement)>,
}

/// Scans every pair `(u, v)` of `Ball(r)` with `uv` in the domain, using the
/// largest sound window (no window for exact derivations).
pub fn leibniz_scan(
    group: &Group,
    d: &Derivation,
    twist: Option<(&EndomorphismSpec, &EndomorphismSpec)>,
    r: usize,
) -> Result<LeibnizScan> {
    let ball = group.ball(r)?;
    let dom = group.ball(d.dom_radius())?;
    let mut scan = LeibnizScan {
        radius: r,
        checked: 0,
        skipped: 0,
        max_defect: 0.0,
        worst: None,
    };
    for u in ball.elements() {
        for v in ball.elements() {
            if !dom.contains(u) || !dom.contains(v) || !dom.contains(&group.op(u, v)) {
                scan.skipped += 1;
                continue;
            }
            let window = if d.is_exact() {
                None
            } else {
                // Probe with window 0 to learn the sound bound.
                let probe = twisted_core(group, d, twist, u, v, Some(0))?;
                match probe.sound_bound {
                    Some(b) if b >= 0 => Some(b as usize),
                    _ => {
                        scan.skipped += 1;
                        continue;
                    }
                }
            };
            let res = twisted_core(group, d, twist, u, v, window)?;
            scan.checked += 1;
            if scan.worst.is_none() || res.defect > scan.max_defect {
                scan.max_defect = res.defect;
                scan.worst = Some((u.clone(), v.clone()));
            }
        }
    }
    Ok(scan)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::character::TabulatedDomain;

    fn grp(s: &str) -> Group {
        Group::from_spec_str(s).unwrap()
    }

    fn el(g: &Group, s: &str) -> RingElement {
        RingElement::parse(s, g).unwrap()
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn inner_on_free_group() {
        let f2 = grp("free:2");
        let d = inner_derivation(&f2, &el(&f2, "x"), 2).unwrap();
        assert_eq!(
            d.get(&f2.parse("y").unwrap()).unwrap(),
            &el(&f2, "y*x - x*y")
        );
        assert!(d.get(&f2.parse("x").unwrap()).unwrap().is_zero());
        assert!(d.is_exact());
        assert_eq!(d.trunc_radius(), 2 * 2 + 1);
    }

    #[test]
    fn inner_is_zero_on_abelian_groups() {
        let z2 = grp("abelian:2");
        let d = inner_derivation(&z2, &el(&z2, "x - 3*y^2 + 2"), 3).unwrap();
        assert!(d.table().all(|(_, v)| v.is_zero()));
    }

    #[test]
    fn inner_on_s3_has_two_unit_terms() {
        let s3 = grp("symmetric:3");
        let a = s3.parse("(1 2)").unwrap();
        let g = s3.parse("(1 3)").unwrap();
        let d = inner_derivation(&s3, &RingElement::basis(a.clone()), 3).unwrap();
        let value = d.get(&g).unwrap();
        let expected = RingElement::basis(s3.op(&g, &a)).sub(&RingElement::basis(s3.op(&a, &g)));
        assert_eq!(value, &expected);
        assert_eq!(value.len(), 2);
        let mut coeffs: Vec<f64> = value.terms().map(|(_, c)| c.re).collect();
        coeffs.sort_by(f64::total_cmp);
        assert_eq!(coeffs, vec![-1.0, 1.0]);
    }

    #[test]
    fn central_constructions() {
        let z = grp("abelian:1");
        let x = z.parse("x").unwrap();
        let hom = Homomorphism::parse("x=1", &z).unwrap();
        let d = central_derivation(&z, &x, &hom, 4).unwrap();
        for n in -4i64..=4 {
            let xn = z.pow(&x, n);
            assert_eq!(
                d.get(&xn).unwrap(),
                &RingElement::monomial(z.pow(&x, n + 1), c(n as f64))
            );
        }
        let zero = central_derivation(&z, &x, &Homomorphism::zero(&z), 3).unwrap();
        assert!(zero.table().all(|(_, v)| v.is_zero()));

        let h = grp("heisenberg");
        let zc = h.parse("z").unwrap();
        let hom = Homomorphism::parse("x=1", &h).unwrap();
        let d = central_derivation(&h, &zc, &hom, 2).unwrap();
        assert_eq!(d.get(&h.parse("x").unwrap()).unwrap(), &el(&h, "x*z"));
        assert!(d.get(&h.parse("y").unwrap()).unwrap().is_zero());

        let f2 = grp("free:2");
        let hom = Homomorphism::parse("x=1", &f2).unwrap();
        assert!(central_derivation(&f2, &f2.parse("x").unwrap(), &hom, 2).is_err());
    }

    #[test]
    fn from_character_examples() {
        let f2 = grp("free:2");
        let chi = Character::inner(el(&f2, "x"));
        let d = derivation_from_character(&f2, &chi, 2, 3).unwrap();
        assert_eq!(
            d.get(&f2.parse("y").unwrap()).unwrap(),
            &el(&f2, "y*x - x*y")
        );

        let zero = Character::inner(RingElement::zero());
        let d0 = derivation_from_character(&f2, &zero, 2, 2).unwrap();
        assert!(d0.table().all(|(_, v)| v.is_zero()));

        let z = grp("abelian:1");
        let hom = Homomorphism::parse("x=1", &z).unwrap();
        let chi = Character::central(&z, z.parse("x").unwrap(), hom, 2).unwrap();
        let d = derivation_from_character(&z, &chi, 2, 2).unwrap();
        assert_eq!(d.get(&z.parse("x^2").unwrap()).unwrap(), &el(&z, "2*x^3"));
    }

    #[test]
    fn potential_examples() {
        let f2 = grp("free:2");
        let constant = Potential::new(
            RingElement::from_terms(
                f2.ball(9)
                    .unwrap()
                    .elements()
                    .iter()
                    .map(|g| (g.clone(), c(1.0))),
            ),
            Some(9),
        );
        let d = potential_derivation(&f2, &constant, 2, 3).unwrap();
        assert!(d.table().all(|(_, v)| v.is_zero()));

        let fx = Potential::new(el(&f2, "x"), None);
        let d = potential_derivation(&f2, &fx, 2, 5).unwrap();
        let inner = inner_derivation(&f2, &el(&f2, "x"), 2).unwrap();
        for (g, v) in inner.table() {
            assert_eq!(d.get(g).unwrap(), v);
        }

        let z2 = grp("abelian:2");
        let f = Potential::new(el(&z2, "x + 5*y^-1 - 2*x*y"), None);
        let d = potential_derivation(&z2, &f, 2, 2).unwrap();
        assert!(d.table().all(|(_, v)| v.is_zero()));

        let short = Potential::new(el(&f2, "x"), Some(2));
        assert!(matches!(
            potential_derivation(&f2, &short, 2, 2),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn apply_examples() {
        let z = grp("abelian:1");
        let hom = Homomorphism::parse("x=1", &z).unwrap();
        let d = central_derivation(&z, &z.parse("x").unwrap(), &hom, 3).unwrap();
        assert!(d.apply(&z, &el(&z, "e")).unwrap().is_zero());
        assert_eq!(
            d.apply(&z, &el(&z, "1 + x + x^2")).unwrap(),
            el(&z, "x^2 + 2*x^3")
        );
        let (u, v) = (el(&z, "x - x^-2"), el(&z, "3*x^3"));
        let lhs = d.apply(&z, &u.scale(c(2.0)).add(&v.scale(c(3.0)))).unwrap();
        let rhs = d
            .apply(&z, &u)
            .unwrap()
            .scale(c(2.0))
            .add(&d.apply(&z, &v).unwrap().scale(c(3.0)));
        assert!(lhs.approx_eq(&rhs, 1e-12));
        assert!(matches!(
            d.apply(&z, &el(&z, "x^4")),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn leibniz_defects() {
        let f2 = grp("free:2");
        let d = inner_derivation(&f2, &el(&f2, "x + 2*y^-1"), 4).unwrap();
        let (u, v) = (f2.parse("x*y").unwrap(), f2.parse("y^-1*x").unwrap());
        let res = leibniz_defect(&f2, &d, &u, &v, 10).unwrap();
        assert!(res.defect < 1e-12 && res.sound);

        let z = grp("abelian:1");
        let hom = Homomorphism::parse("x=1", &z).unwrap();
        let d = central_derivation(&z, &z.identity(), &hom, 6).unwrap();
        for a in -3i64..=3 {
            for b in -3i64..=3 {
                let (u, v) = (z.pow(&z.generator(0), a), z.pow(&z.generator(0), b));
                assert!(leibniz_defect(&z, &d, &u, &v, 20).unwrap().defect < 1e-12);
            }
        }
    }

    #[test]
    fn corrupted_table_has_unit_defect() {
        let f2 = grp("free:2");
        let mut d = inner_derivation(&f2, &el(&f2, "x"), 2).unwrap();
        let y = f2.parse("y").unwrap();
        let corrupted = d.get(&y).unwrap().add(&el(&f2, "y*x"));
        d.set_value(y.clone(), corrupted).unwrap();
        assert_eq!(d.provenance(), Provenance::Custom);
        let res = leibniz_defect(&f2, &d, &y, &f2.parse("x").unwrap(), 10).unwrap();
        assert!((res.defect - 1.0).abs() < 1e-12);
    }

    #[test]
    fn window_soundness_is_reported() {
        let f2 = grp("free:2");
        let chi = Character::inner(el(&f2, "x"));
        let d = derivation_from_character(&f2, &chi, 2, 3).unwrap();
        let (u, v) = (f2.parse("y").unwrap(), f2.parse("x").unwrap());
        let ok = leibniz_defect(&f2, &d, &u, &v, 1).unwrap();
        assert_eq!(ok.sound_bound, Some(1));
        assert!(ok.sound && ok.defect < 1e-12);
        let advisory = leibniz_defect(&f2, &d, &u, &v, 2).unwrap();
        assert!(!advisory.sound);
    }

    #[test]
    fn sigma_tau_examples() {
        let z = grp("abelian:1");
        let sigma = EndomorphismSpec::parse("x=x^2", &z).unwrap();
        let tau = EndomorphismSpec::identity(&z);
        let d = sigma_tau_inner(&z, &el(&z, "x"), &sigma, &tau, 3).unwrap();
        for n in -3i64..=3 {
            let x = z.generator(0);
            let expected =
                RingElement::basis(z.pow(&x, 2 * n + 1)).sub(&RingElement::basis(z.pow(&x, n + 1)));
            assert_eq!(d.get(&z.pow(&x, n)).unwrap(), &expected);
        }

        let f2 = grp("free:2");
        let id = EndomorphismSpec::identity(&f2);
        let a = el(&f2, "x - y*x");
        let st = sigma_tau_inner(&f2, &a, &id, &id, 2).unwrap();
        let inner = inner_derivation(&f2, &a, 2).unwrap();
        for (g, v) in inner.table() {
            assert_eq!(st.get(g).unwrap(), &v.scale(c(-1.0)));
        }
        let zero = sigma_tau_inner(&f2, &RingElement::zero(), &id, &id, 2).unwrap();
        assert!(zero.table().all(|(_, v)| v.is_zero()));
    }

    #[test]
    fn twisted_defects() {
        let z = grp("abelian:1");
        let sigma = EndomorphismSpec::parse("x=x^2", &z).unwrap();
        let id = EndomorphismSpec::identity(&z);
        let x = z.generator(0);

        let st = sigma_tau_inner(&z, &el(&z, "x"), &sigma, &id, 4).unwrap();
        for a in -2i64..=2 {
            for b in -2i64..=2 {
                let (u, v) = (z.pow(&x, a), z.pow(&x, b));
                let tw = twisted_leibniz_defect(&z, &st, &sigma, &id, &u, &v, 30).unwrap();
                assert!(tw.defect < 1e-12);
            }
        }
        // The twisted derivation is not an ordinary one.
        assert!(leibniz_defect(&z, &st, &x, &x, 30).unwrap().defect > 0.5);

        // d(xⁿ) = n·x^(n+1) against the σ(x) = x² twist at u = v = x:
        // 2x³ − x²·x² − x·x² = x³ − x⁴.
        let hom = Homomorphism::parse("x=1", &z).unwrap();
        let central = central_derivation(&z, &x, &hom, 3).unwrap();
        let tw = twisted_leibniz_defect(&z, &central, &sigma, &id, &x, &x, 30).unwrap();
        assert!((tw.defect - 1.0).abs() < 1e-12);

        let f2 = grp("free:2");
        let id = EndomorphismSpec::identity(&f2);
        let d = inner_derivation(&f2, &el(&f2, "x + y"), 4).unwrap();
        let (u, v) = (f2.parse("x*y").unwrap(), f2.parse("y").unwrap());
        let plain = leibniz_defect(&f2, &d, &u, &v, 12).unwrap();
        let twisted = twisted_leibniz_defect(&f2, &d, &id, &id, &u, &v, 12).unwrap();
        assert_eq!(plain, twisted);
    }

    #[test]
    fn endomorphisms_must_respect_relations() {
        let s3 = grp("symmetric:3");
        assert!(EndomorphismSpec::parse("s1=s2,s2=s1", &s3).is_ok());
        assert!(matches!(
            EndomorphismSpec::parse("s1=s1*s2", &s3),
            Err(Error::Domain(_))
        ));
        let z2 = grp("abelian:2");
        assert!(EndomorphismSpec::parse("x=x*y,y=y^3", &z2).is_ok());
        let h = grp("heisenberg");
        assert!(EndomorphismSpec::parse("x=y,y=x", &h).is_ok());
        let f2 = grp("free:2");
        assert!(EndomorphismSpec::parse("x=y*x*y,y=e", &f2).is_ok());
        let sigma = EndomorphismSpec::parse("x=x^2", &f2).unwrap();
        assert_eq!(
            sigma.apply(&f2, &f2.parse("x*y*x^-1").unwrap()),
            f2.parse("x^2*y*x^-2").unwrap()
        );
    }

    #[test]
    fn json_round_trip() {
        let f2 = grp("free:2");
        let d = inner_derivation(&f2, &el(&f2, "x - 2*y"), 2).unwrap();
        let back = Derivation::from_json(&d.to_json(&f2), &f2).unwrap();
        assert_eq!(back, d);

        let chi = Character::inner(el(&f2, "x"));
        let t = derivation_from_character(&f2, &chi, 1, 2).unwrap();
        let back = Derivation::from_json(&t.to_json(&f2), &f2).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn round_trip_through_characters() {
        let f2 = grp("free:2");
        let chi = Character::inner(el(&f2, "x"));
        let d = inner_derivation(&f2, &el(&f2, "x"), 2).unwrap();
        let tab = crate::character::character_of_derivation(&f2, &d).unwrap();
        let Character::Tabulated(t) = &tab else {
            panic!()
        };
        assert_eq!(
            t.domain(),
            TabulatedDomain {
                conjugator_radius: 2,
                source_radius: None
            }
        );
        for phi in crate::groupoid::morphisms_in_ball(&f2, 2).unwrap() {
            assert_eq!(
                tab.evaluate(&f2, &phi).unwrap(),
                chi.evaluate(&f2, &phi).unwrap()
            );
        }
    }
}
