//! Characters of the adjoint-action groupoid: complex functions on morphisms
//! that are additive over composition, `χ(ψ∘φ) = χ(ψ) + χ(φ)`.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::derivation::Derivation;
use crate::error::{Error, Result};
use crate::group::{Group, GroupElement, Letter};
use crate::groupoid::{
    composable_pairs, compose_unchecked, enumerate_loops, morphisms_in_ball, LoopInfo, Morphism,
};
use crate::ring::RingElement;

/// Default tolerance for character comparisons.
pub const DEFAULT_TOL: f64 = 1e-9;

/// A homomorphism `G → (ℂ, +)`, given by its values on the generators.
#[derive(Debug, Clone, PartialEq)]
pub struct Homomorphism {
    values: Vec<Complex64>,
}

impl Homomorphism {
    /// Validates the values against every defining relator of the group.
    pub fn new(group: &Group, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != group.generator_count() {
            return Err(Error::Domain(format!(
                "homomorphism needs {} generator values, got {}",
                group.generator_count(),
                values.len()
            )));
        }
        let hom = Homomorphism { values };
        for rel in group.relators() {
            let v = hom.eval_word(&rel);
            if v.norm() > DEFAULT_TOL {
                return Err(Error::Domain(format!(
                    "homomorphism does not vanish on relator {} (value {v})",
                    group.format_word(&rel)
                )));
            }
        }
        Ok(hom)
    }

    pub fn zero(group: &Group) -> Self {
        Homomorphism {
            values: vec![Complex64::default(); group.generator_count()],
        }
    }

    /// Parses `x=1,y=-2`; unnamed generators map to 0.
    pub fn parse(s: &str, group: &Group) -> Result<Self> {
        let mut values = vec![Complex64::default(); group.generator_count()];
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (label, value) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected gen=value, got {part:?}")))?;
            let i = group
                .labels()
                .iter()
                .position(|l| l == label.trim())
                .ok_or_else(|| Error::Parse(format!("unknown generator {label:?}")))?;
            values[i] = parse_complex(value)?;
        }
        Homomorphism::new(group, values)
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.norm() == 0.0)
    }

    /// Additive extension along a word.
    pub fn eval_word(&self, word: &[Letter]) -> Complex64 {
        word.iter()
            .map(|l| {
                let v = self.values[l.generator as usize];
                if l.inverse {
                    -v
                } else {
                    v
                }
            })
            .sum()
    }

    /// Value on a group element. On finite groups the only homomorphism is 0.
    pub fn eval(&self, group: &Group, g: &GroupElement) -> Complex64 {
        match group.exponent_sums(g) {
            Some(sums) => sums
                .iter()
                .zip(&self.values)
                .map(|(&k, v)| v * k as f64)
                .sum(),
            None => self.eval_word(&group.word_of(g)),
        }
    }

    pub fn format(&self, group: &Group) -> String {
        group
            .labels()
            .iter()
            .zip(&self.values)
            .map(|(l, v)| format!("{l}={}", format_complex(*v)))
            .collect::<Vec<_>>()
            .join(",")
    }
}

pub(crate) fn parse_complex(s: &str) -> Result<Complex64> {
    let s = s.trim();
    if let Some(im) = s.strip_suffix('i') {
        let v = if im.is_empty() {
            1.0
        } else {
            im.parse::<f64>()
                .map_err(|e| Error::Parse(format!("bad number {s:?}: {e}")))?
        };
        return Ok(Complex64::new(0.0, v));
    }
    s.parse::<f64>()
        .map(|v| Complex64::new(v, 0.0))
        .map_err(|e| Error::Parse(format!("bad number {s:?}: {e}")))
}

/// `3`, `2i` or `1-0.5i`.
pub fn format_complex(c: Complex64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else if c.re == 0.0 {
        format!("{}i", c.im)
    } else {
        format!("{}{:+}i", c.re, c.im)
    }
}

/// A function on objects, zero off its support.
///
/// With a declared domain radius, evaluation outside `Ball(radius)` is an
/// error instead of zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    values: BTreeMap<GroupElement, Complex64>,
    domain_radius: Option<usize>,
}

impl Potential {
    pub fn new(values: RingElement, domain_radius: Option<usize>) -> Self {
        Potential {
            values: values.terms().map(|(g, c)| (g.clone(), *c)).collect(),
            domain_radius,
        }
    }

    pub fn domain_radius(&self) -> Option<usize> {
        self.domain_radius
    }

    pub fn eval(&self, group: &Group, g: &GroupElement) -> Result<Complex64> {
        if let Some(r) = self.domain_radius {
            if !group.ball(r)?.contains(g) {
                return Err(Error::OutOfRange {
                    what: format!("potential at {}", group.format(g)),
                    radius: r,
                    needed: group.word_length(g).ok(),
                });
            }
        }
        Ok(self.values.get(g).copied().unwrap_or_default())
    }

    /// `{"domain_radius": r | null, "terms": [...]}`.
    pub fn from_json(value: &Value, group: &Group) -> Result<Self> {
        let values = RingElement::from_json(value, group)?;
        let domain_radius = match value.get("domain_radius") {
            None | Some(Value::Null) => None,
            Some(v) => Some(v.as_u64().ok_or_else(|| {
                Error::Parse("domain_radius must be a non-negative integer".into())
            })? as usize),
        };
        Ok(Potential::new(values, domain_radius))
    }

    pub fn to_json(&self, group: &Group) -> Value {
        let mut v = RingElement::from_terms(self.values.iter().map(|(g, c)| (g.clone(), *c)))
            .to_json(group);
        v["domain_radius"] = json!(self.domain_radius);
        v
    }
}

/// Morphisms `(u, v)` with `|v| <= conjugator_radius` and, when bounded,
/// `|s(φ)| <= source_radius`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TabulatedDomain {
    pub conjugator_radius: usize,
    pub source_radius: Option<usize>,
}

impl TabulatedDomain {
    pub fn contains(&self, group: &Group, phi: &Morphism) -> Result<bool> {
        if !group.ball(self.conjugator_radius)?.contains(&phi.v) {
            return Ok(false);
        }
        match self.source_radius {
            Some(r) => Ok(group.ball(r)?.contains(&phi.source(group))),
            None => Ok(true),
        }
    }
}

/// A character given by a finite table over an explicit domain.
/// Entries missing from the table are zero; morphisms outside the domain are errors.
#[derive(Debug, Clone, PartialEq)]
pub struct Tabulated {
    table: HashMap<Morphism, Complex64>,
    domain: TabulatedDomain,
}

impl Tabulated {
    pub fn new(
        group: &Group,
        table: HashMap<Morphism, Complex64>,
        domain: TabulatedDomain,
    ) -> Result<Self> {
        for phi in table.keys() {
            phi.check(group)?;
            if !domain.contains(group, phi)? {
                return Err(Error::Domain(format!(
                    "table entry {} lies outside the declared domain",
                    phi.format(group)
                )));
            }
        }
        let table = table.into_iter().filter(|(_, c)| c.norm() > 0.0).collect();
        Ok(Tabulated { table, domain })
    }

    pub fn domain(&self) -> TabulatedDomain {
        self.domain
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Morphism, &Complex64)> {
        self.table.iter()
    }

    /// Overwrites one entry; the morphism must lie in the domain.
    pub fn set(&mut self, group: &Group, phi: Morphism, value: Complex64) -> Result<()> {
        if !self.domain.contains(group, &phi)? {
            return Err(Error::Domain(format!(
                "{} lies outside the domain",
                phi.format(group)
            )));
        }
        self.table.insert(phi, value);
        Ok(())
    }

    pub fn eval(&self, group: &Group, phi: &Morphism) -> Result<Complex64> {
        if !self.domain.contains(group, phi)? {
            return Err(Error::OutOfRange {
                what: format!("tabulated character at {}", phi.format(group)),
                radius: self.domain.conjugator_radius,
                needed: None,
            });
        }
        Ok(self.table.get(phi).copied().unwrap_or_default())
    }

    /// `{"domain": {"conjugator_radius": R, "source_radius": R' | null},
    ///   "entries": [{"u", "v", "re", "im"}, ...]}`.
    pub fn from_json(value: &Value, group: &Group) -> Result<Self> {
        let domain = value
            .get("domain")
            .ok_or_else(|| Error::Parse("tabulated character needs a \"domain\"".into()))?;
        let conjugator_radius = domain
            .get("conjugator_radius")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Parse("domain.conjugator_radius must be an integer".into()))?
            as usize;
        let source_radius = domain
            .get("source_radius")
            .and_then(Value::as_u64)
            .map(|r| r as usize);
        let mut table = HashMap::new();
        for e in value
            .get("entries")
            .and_then(Value::as_array)
            .into_iter()
            .flatten()
        {
            let phi = Morphism::from_json(e, group)?;
            let re = e.get("re").and_then(Value::as_f64).unwrap_or(0.0);
            let im = e.get("im").and_then(Value::as_f64).unwrap_or(0.0);
            *table.entry(phi).or_default() += Complex64::new(re, im);
        }
        Tabulated::new(
            group,
            table,
            TabulatedDomain {
                conjugator_radius,
                source_radius,
            },
        )
    }

    pub fn to_json(&self, group: &Group) -> Value {
        let mut entries: Vec<(&Morphism, &Complex64)> = self.table.iter().collect();
        entries.sort_by(|a, b| a.0.cmp(b.0));
        let entries: Vec<Value> = entries
            .into_iter()
            .map(|(phi, c)| {
                let mut v = phi.to_json(group);
                v["re"] = json!(c.re);
                v["im"] = json!(c.im);
                v
            })
            .collect();
        json!({
            "domain": {
                "conjugator_radius": self.domain.conjugator_radius,
                "source_radius": self.domain.source_radius,
            },
            "entries": entries,
        })
    }
}

/// A character of Γ.
#[derive(Debug, Clone, PartialEq)]
pub enum Character {
    /// `χ(φ) = a(s(φ)) − a(t(φ))`, the character of `x ↦ xa − ax`.
    Inner(RingElement),
    /// `χ(φ) = f(s(φ)) − f(t(φ))`.
    Potential(Potential),
    /// `χ(φ) = t(v)·[s(φ) = z]` for central `z`.
    Central {
        z: GroupElement,
        hom: Homomorphism,
    },
    Tabulated(Tabulated),
}

impl Character {
    pub fn inner(a: RingElement) -> Self {
        Character::Inner(a)
    }

    /// Central character; `z` must commute with `Ball(check_radius)`.
    pub fn central(
        group: &Group,
        z: GroupElement,
        hom: Homomorphism,
        check_radius: usize,
    ) -> Result<Self> {
        if !group.is_central_in_ball(&z, check_radius)? {
            return Err(Error::Domain(format!(
                "{} is not central (checked on Ball({check_radius}))",
                group.format(&z)
            )));
        }
        Ok(Character::Central { z, hom })
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Character::Inner(_) => "inner",
            Character::Potential(_) => "potential",
            Character::Central { .. } => "central",
            Character::Tabulated(_) => "tabulated",
        }
    }

    /// `χ(φ)`.
    pub fn evaluate(&self, group: &Group, phi: &Morphism) -> Result<Complex64> {
        match self {
            Character::Inner(a) => Ok(a.coeff(&phi.source(group)) - a.coeff(&phi.target(group))),
            Character::Potential(f) => {
                Ok(f.eval(group, &phi.source(group))? - f.eval(group, &phi.target(group))?)
            }
            Character::Central { z, hom } => Ok(if &phi.source(group) == z {
                hom.eval(group, &phi.v)
            } else {
                Complex64::default()
            }),
            Character::Tabulated(t) => t.eval(group, phi),
        }
    }
}

// Out-of-range lookups are counted as skipped; every other error propagates.
pub(crate) fn eval_or_skip(
    chi: &Character,
    group: &Group,
    phi: &Morphism,
) -> Result<Option<Complex64>> {
    match chi.evaluate(group, phi) {
        Ok(v) => Ok(Some(v)),
        Err(Error::OutOfRange { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// First composable pair breaking additivity.
#[derive(Debug, Clone, PartialEq)]
pub struct AdditivityViolation {
    pub psi: Morphism,
    pub phi: Morphism,
    pub defect: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdditivityReport {
    pub radius: usize,
    pub tol: f64,
    pub checked: usize,
    /// Pairs where some value fell outside a tabulated domain.
    pub skipped: usize,
    pub violation: Option<AdditivityViolation>,
}

impl AdditivityReport {
    pub fn is_ok(&self) -> bool {
        self.violation.is_none()
    }
}

/// Checks `χ(ψ∘φ) = χ(ψ) + χ(φ)` over all composable pairs with components in `Ball(r)`.
pub fn check_additivity(
    group: &Group,
    chi: &Character,
    r: usize,
    tol: f64,
) -> Result<AdditivityReport> {
    let mut report = AdditivityReport {
        radius: r,
        tol,
        checked: 0,
        skipped: 0,
        violation: None,
    };
    let mut cache: HashMap<Morphism, Option<Complex64>> = HashMap::new();
    let mut value = |phi: &Morphism| -> Result<Option<Complex64>> {
        if let Some(v) = cache.get(phi) {
            return Ok(*v);
        }
        let v = eval_or_skip(chi, group, phi)?;
        cache.insert(phi.clone(), v);
        Ok(v)
    };
    for (psi, phi) in composable_pairs(group, r)? {
        let comp = compose_unchecked(group, &psi, &phi);
        let (Some(a), Some(b), Some(c)) = (value(&comp)?, value(&psi)?, value(&phi)?) else {
            report.skipped += 1;
            continue;
        };
        report.checked += 1;
        let defect = (a - b - c).norm();
        if defect > tol {
            report.violation = Some(AdditivityViolation { psi, phi, defect });
            break;
        }
    }
    Ok(report)
}

/// A loop on which the character does not vanish.
#[derive(Debug, Clone, PartialEq)]
pub struct Obstruction {
    pub loop_info: LoopInfo,
    pub value: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoopTrivialityReport {
    pub radius: usize,
    pub tol: f64,
    pub checked: usize,
    pub skipped: usize,
    pub obstruction: Option<Obstruction>,
}

impl LoopTrivialityReport {
    /// Quasi-inner verdict: no obstruction among the checked loops.
    pub fn is_quasi_inner(&self) -> bool {
        self.obstruction.is_none()
    }
}

/// Evaluates `χ` on every loop of `enumerate_loops(r)`.
pub fn is_loop_trivial(
    group: &Group,
    chi: &Character,
    r: usize,
    tol: f64,
) -> Result<LoopTrivialityReport> {
    let mut report = LoopTrivialityReport {
        radius: r,
        tol,
        checked: 0,
        skipped: 0,
        obstruction: None,
    };
    for info in enumerate_loops(group, r)? {
        let Some(value) = eval_or_skip(chi, group, &info.morphism)? else {
            report.skipped += 1;
            continue;
        };
        report.checked += 1;
        if value.norm() > tol {
            report.obstruction = Some(Obstruction {
                loop_info: info,
                value,
            });
            break;
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub enum HomConstancy {
    /// `groups` nonempty Hom-sets checked, of which `multi` had two or more morphisms.
    Ok { groups: usize, multi: usize },
    Counterexample {
        first: Morphism,
        second: Morphism,
        values: (Complex64, Complex64),
    },
    /// The character failed the loop-triviality precondition.
    NotApplicable { obstruction: Obstruction },
}

/// Checks that `χ` is constant on every Hom-set, for morphisms with components in `Ball(r)`.
pub fn check_hom_constancy(
    group: &Group,
    chi: &Character,
    r: usize,
    tol: f64,
) -> Result<HomConstancy> {
    let gate = is_loop_trivial(group, chi, r, tol)?;
    if let Some(obstruction) = gate.obstruction {
        return Ok(HomConstancy::NotApplicable { obstruction });
    }
    let mut seen: BTreeMap<(GroupElement, GroupElement), (Morphism, Complex64, usize)> =
        BTreeMap::new();
    for phi in morphisms_in_ball(group, r)? {
        let Some(value) = eval_or_skip(chi, group, &phi)? else {
            continue;
        };
        let key = (phi.source(group), phi.target(group));
        match seen.get_mut(&key) {
            Some((first, v0, count)) => {
                if (*v0 - value).norm() > tol {
                    return Ok(HomConstancy::Counterexample {
                        first: first.clone(),
                        second: phi,
                        values: (*v0, value),
                    });
                }
                *count += 1;
            }
            None => {
                seen.insert(key, (phi, value, 1));
            }
        }
    }
    Ok(HomConstancy::Ok {
        groups: seen.len(),
        multi: seen.values().filter(|(_, _, n)| *n > 1).count(),
    })
}

/// Reads the character off a derivation: `χ((u, v))` is the coefficient of
/// `u` in `d(v)`.
///
/// The table covers conjugators in the derivation's domain ball. For exact
/// derivations every source is covered; for truncated ones only sources in
/// `Ball(R_trunc)`.
pub fn character_of_derivation(group: &Group, d: &Derivation) -> Result<Character> {
    let domain = TabulatedDomain {
        conjugator_radius: d.dom_radius(),
        source_radius: if d.is_exact() {
            None
        } else {
            Some(d.trunc_radius())
        },
    };
    let mut table = HashMap::new();
    for (v, value) in d.table() {
        for (u, c) in value.terms() {
            let phi = Morphism::new(u.clone(), v.clone());
            if domain.contains(group, &phi)? {
                table.insert(phi, *c);
            }
        }
    }
    Ok(Character::Tabulated(Tabulated::new(group, table, domain)?))
}
