//! Norm analytics and the classification pipeline.
//!
//! Verdicts are asymmetric: unboundedness is asserted from a linearly growing
//! witness sequence, boundedness never is. Probes only report whether the
//! computed table is stabilizing at the radii examined.

use std::collections::HashMap;

use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::character::{
    self, character_of_derivation, check_additivity, check_hom_constancy, eval_or_skip,
    is_loop_trivial, AdditivityReport, Character, HomConstancy, LoopTrivialityReport, Obstruction,
    Tabulated, TabulatedDomain,
};
use crate::derivation::{CommutatorConvention, Derivation, SCHEMA_VERSION};
use crate::error::{Error, Result};
use crate::group::{ElementOrder, Group, GroupElement};
use crate::groupoid::{compose_unchecked, enumerate_loops, loop_power, LoopInfo, Morphism};
use crate::ring::{
    is_subordinate, norm, NormSpec, RingElement, SubordinationReport, SubordinationVerdict,
    SUBORDINATION_NOTE,
};

pub const DEFAULT_RADIUS: usize = 3;
pub const DEFAULT_WITNESS_LENGTH: usize = 16;
pub const DEFAULT_THETA: f64 = 0.9;

/// Largest group order accepted by [`additive_character_basis`].
pub const MAX_BASIS_ORDER: usize = 24;

fn complex_json(c: Complex64) -> Value {
    json!({ "re": c.re, "im": c.im })
}

/// Test elements for operator-norm lower bounds.
#[derive(Debug, Clone, PartialEq)]
pub enum TestFamily {
    /// `δ_g` for `g` in normal-form order.
    Basis,
    /// `δ_(g^k)` for `k = 1, 2, ...`.
    Powers(GroupElement),
    /// `Σ_(Ball(k)) δ_h` for `k = 0, 1, ...`.
    BallSums,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormLowerBound {
    /// `max ‖d(ω)‖ / ‖ω‖_s` over the evaluated family members.
    pub value: f64,
    pub achieving: Option<RingElement>,
    pub evaluated: usize,
    /// The family ran out of domain before `N` members were evaluated.
    pub partial: bool,
}

impl NormLowerBound {
    pub fn to_json(&self, group: &Group) -> Value {
        json!({
            "value": self.value,
            "achieving": self.achieving.as_ref().map(|w| w.format(group)),
            "evaluated": self.evaluated,
            "partial": self.partial,
        })
    }
}

/// Lower bound on `‖d‖ = sup ‖d(ω)‖ / ‖ω‖_s` from the first `n` family members.
pub fn operator_norm_lower_bound(
    group: &Group,
    d: &Derivation,
    spec: NormSpec,
    family: &TestFamily,
    n: usize,
) -> Result<NormLowerBound> {
    let dom = group.ball(d.dom_radius())?;
    let members: Vec<RingElement> = match family {
        TestFamily::Basis => dom
            .elements()
            .iter()
            .take(n)
            .cloned()
            .map(RingElement::basis)
            .collect(),
        TestFamily::Powers(g) => {
            group.check(g)?;
            (1..=n as i64)
                .map(|k| group.pow(g, k))
                .take_while(|p| dom.contains(p))
                .map(RingElement::basis)
                .collect()
        }
        TestFamily::BallSums => (0..n.min(d.dom_radius() + 1))
            .map(|k| {
                RingElement::from_terms(
                    dom.elements()
                        .iter()
                        .filter(|h| dom.length(h).is_some_and(|l| l <= k))
                        .map(|h| (h.clone(), Complex64::new(1.0, 0.0))),
                )
            })
            .collect(),
    };
    let mut out = NormLowerBound {
        value: 0.0,
        achieving: None,
        evaluated: members.len(),
        partial: members.len() < n,
    };
    for omega in members {
        let ratio = norm(group, &d.apply(group, &omega)?, spec)? / omega.sup_norm();
        if out.achieving.is_none() || ratio > out.value {
            out.value = ratio;
            out.achieving = Some(omega);
        }
    }
    Ok(out)
}

/// One row `n ↦ (‖d(tⁿ)‖_s, ‖tⁿ‖_s, ratio)` of a witness sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessRow {
    pub n: usize,
    /// `χ(φⁿ)`, the coefficient of `g·tⁿ` in `d(tⁿ)`.
    pub value: Complex64,
    /// `|χ(φⁿ)|`, a lower bound for `‖d(tⁿ)‖_s`.
    pub image_norm: f64,
    /// `‖tⁿ‖_s`, always 1.
    pub basis_norm: f64,
    pub ratio: f64,
    /// Value outside the character's table, filled in as `n·χ(φ)`.
    pub extrapolated: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessVerdict {
    UnboundedWitness,
    NoneFound,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessReport {
    pub radius: usize,
    pub length: usize,
    pub tol: f64,
    pub loop_info: Option<LoopInfo>,
    pub rows: Vec<WitnessRow>,
    pub verdict: WitnessVerdict,
    /// Why the conjugator is only presumed to have infinite order.
    pub caveat: Option<String>,
}

impl WitnessReport {
    pub fn found(&self) -> bool {
        self.verdict == WitnessVerdict::UnboundedWitness
    }

    pub fn ratios(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.ratio).collect()
    }

    pub fn to_json(&self, group: &Group) -> Value {
        json!({
            "verdict": match self.verdict {
                WitnessVerdict::UnboundedWitness => "unbounded-witness",
                WitnessVerdict::NoneFound => "none-found",
            },
            "radius": self.radius,
            "length": self.length,
            "tol": self.tol,
            "loop": self.loop_info.as_ref().map(|l| l.to_json(group)),
            "caveat": self.caveat,
            "rows": self.rows.iter().map(|r| json!({
                "n": r.n,
                "value": complex_json(r.value),
                "image_norm": r.image_norm,
                "basis_norm": r.basis_norm,
                "ratio": r.ratio,
                "extrapolated": r.extrapolated,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Searches the loops of `Ball(r)` for one with `|χ| > tol` whose conjugator
/// exceeds the order bound, and emits `n ↦ |χ(φⁿ)|` for `n <= length`.
pub fn unboundedness_witness(
    group: &Group,
    chi: &Character,
    r: usize,
    length: usize,
    tol: f64,
) -> Result<WitnessReport> {
    let mut report = WitnessReport {
        radius: r,
        length,
        tol,
        loop_info: None,
        rows: Vec::new(),
        verdict: WitnessVerdict::NoneFound,
        caveat: None,
    };
    for info in enumerate_loops(group, r)? {
        let ElementOrder::ExceedsBound(bound) = info.order else {
            continue;
        };
        let Some(base) = eval_or_skip(chi, group, &info.morphism)? else {
            continue;
        };
        if base.norm() <= tol {
            continue;
        }
        for n in 1..=length {
            let power = loop_power(group, &info.morphism, n)?;
            let (value, extrapolated) = match eval_or_skip(chi, group, &power)? {
                Some(v) => (v, false),
                None => (base * n as f64, true),
            };
            report.rows.push(WitnessRow {
                n,
                value,
                image_norm: value.norm(),
                basis_norm: 1.0,
                ratio: value.norm(),
                extrapolated,
            });
        }
        report.caveat = Some(format!(
            "conjugator {} has order exceeding {bound}; infinite order is presumed, not proven",
            group.format(&info.conjugator)
        ));
        report.loop_info = Some(info);
        report.verdict = WitnessVerdict::UnboundedWitness;
        break;
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoopContradiction {
    pub loop_info: LoopInfo,
    pub order: usize,
    pub value: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoopAudit {
    pub radius: usize,
    /// Loops with a finite-order conjugator whose value was available.
    pub checked: usize,
    pub skipped: usize,
    pub contradiction: Option<LoopContradiction>,
}

impl LoopAudit {
    pub fn is_consistent(&self) -> bool {
        self.contradiction.is_none()
    }
}

/// A loop `φ` with conjugator of order `m` has `φ^m` an identity, so an
/// additive `χ` must vanish on it. Reports the first loop where it does not.
pub fn finite_order_loop_audit(
    group: &Group,
    chi: &Character,
    r: usize,
    tol: f64,
) -> Result<LoopAudit> {
    let mut audit = LoopAudit {
        radius: r,
        checked: 0,
        skipped: 0,
        contradiction: None,
    };
    for info in enumerate_loops(group, r)? {
        let ElementOrder::Finite(order) = info.order else {
            continue;
        };
        let Some(value) = eval_or_skip(chi, group, &info.morphism)? else {
            audit.skipped += 1;
            continue;
        };
        audit.checked += 1;
        if value.norm() > tol {
            audit.contradiction = Some(LoopContradiction {
                loop_info: info,
                order,
                value,
            });
            break;
        }
    }
    Ok(audit)
}

/// A basis of the additive characters of a finite group's groupoid, computed
/// as the exact rational nullspace of the additivity constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacterBasis {
    /// Column order: every `(u, v)` in `G × G`.
    pub morphisms: Vec<Morphism>,
    pub vectors: Vec<Vec<Ratio<i64>>>,
}

impl CharacterBasis {
    pub fn dimension(&self) -> usize {
        self.vectors.len()
    }

    /// The basis vectors as tabulated characters over the whole groupoid.
    pub fn characters(&self, group: &Group) -> Result<Vec<Character>> {
        let domain = TabulatedDomain {
            conjugator_radius: group.order().unwrap_or(0),
            source_radius: None,
        };
        self.vectors
            .iter()
            .map(|vec| {
                let table = self
                    .morphisms
                    .iter()
                    .zip(vec)
                    .map(|(phi, q)| {
                        (
                            phi.clone(),
                            Complex64::new(*q.numer() as f64 / *q.denom() as f64, 0.0),
                        )
                    })
                    .collect();
                Ok(Character::Tabulated(Tabulated::new(group, table, domain)?))
            })
            .collect()
    }
}

/// Exact nullspace of `χ(ψ∘φ) − χ(ψ) − χ(φ) = 0` over all composable pairs.
pub fn additive_character_basis(group: &Group) -> Result<CharacterBasis> {
    let order = group
        .order()
        .ok_or_else(|| Error::Domain("additive character basis needs a finite group".into()))?;
    if order > MAX_BASIS_ORDER {
        return Err(Error::Resource {
            what: format!("character basis for a group of order {order}"),
            budget: MAX_BASIS_ORDER,
        });
    }
    let elements = group.ball(order)?.elements().to_vec();
    let morphisms: Vec<Morphism> = elements
        .iter()
        .flat_map(|u| {
            elements
                .iter()
                .map(move |v| Morphism::new(u.clone(), v.clone()))
        })
        .collect();
    let index: HashMap<&Morphism, usize> =
        morphisms.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let cols = morphisms.len();

    let mut rows: Vec<Vec<Ratio<i64>>> = Vec::new();
    for phi in &morphisms {
        let t = phi.target(group);
        for v2 in &elements {
            let psi = Morphism::new(group.op(v2, &t), v2.clone());
            let comp = compose_unchecked(group, &psi, phi);
            let mut row = vec![Ratio::zero(); cols];
            row[index[&comp]] += Ratio::one();
            row[index[&psi]] -= Ratio::one();
            row[index[phi]] -= Ratio::one();
            if row.iter().any(|q| !q.is_zero()) {
                rows.push(row);
            }
        }
    }
    Ok(CharacterBasis {
        vectors: nullspace(rows, cols),
        morphisms,
    })
}

// Reduced row echelon form, then one basis vector per free column.
fn nullspace(mut rows: Vec<Vec<Ratio<i64>>>, cols: usize) -> Vec<Vec<Ratio<i64>>> {
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let lead = rows[rank][col];
        for q in rows[rank].iter_mut() {
            *q /= lead;
        }
        let pivot_row = rows[rank].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank && !row[col].is_zero() {
                let f = row[col];
                for (q, p) in row.iter_mut().zip(&pivot_row) {
                    *q -= f * p;
                }
            }
        }
        pivots.push(col);
        rank += 1;
    }
    let free = (0..cols).filter(|c| !pivots.contains(c));
    free.map(|f| {
        let mut v = vec![Ratio::zero(); cols];
        v[f] = Ratio::one();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = -rows[r][f];
        }
        v
    })
    .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeRow {
    pub n: usize,
    /// `‖d(ω_n)‖*_α` for `ω_n = Σ_(Ball(n)) δ_g`.
    pub norm: f64,
    pub increment: f64,
    /// `increment_n / increment_(n-1)`; 0 when both vanish, ∞ when only the previous does.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeVerdict {
    Stabilizing,
    NotStabilizing,
    /// Fewer than three ratios were computed.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeTable {
    pub alpha: f64,
    pub theta: f64,
    pub rows: Vec<ProbeRow>,
    pub verdict: ProbeVerdict,
    /// Some requested radii exceeded the derivation's domain.
    pub partial: bool,
}

impl ProbeTable {
    pub fn ratios(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.ratio).collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "alpha": self.alpha,
            "theta": self.theta,
            "verdict": match self.verdict {
                ProbeVerdict::Stabilizing => "stabilizing",
                ProbeVerdict::NotStabilizing => "not-stabilizing",
                ProbeVerdict::Inconclusive => "inconclusive",
            },
            "partial": self.partial,
            "rows": self.rows.iter().map(|r| json!({
                "n": r.n,
                "norm": r.norm,
                "increment": r.increment,
                "ratio": r.ratio,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Tabulates `‖d(Σ_(Ball(n)) δ_g)‖*_α` over `radii`. The verdict is
/// `Stabilizing` when the last three increment ratios are all below `theta`.
pub fn exp_norm_boundedness_probe(
    group: &Group,
    d: &Derivation,
    alpha: f64,
    radii: &[usize],
    theta: f64,
) -> Result<ProbeTable> {
    let spec = NormSpec::exp_weight(alpha)?;
    let dom = group.ball(d.dom_radius())?;
    let mut table = ProbeTable {
        alpha,
        theta,
        rows: Vec::new(),
        verdict: ProbeVerdict::Inconclusive,
        partial: false,
    };
    let mut prev_norm = 0.0;
    let mut prev_inc: Option<f64> = None;
    for &n in radii {
        if n > d.dom_radius() {
            table.partial = true;
            break;
        }
        let omega = RingElement::from_terms(
            dom.elements()
                .iter()
                .filter(|g| dom.length(g).is_some_and(|l| l <= n))
                .map(|g| (g.clone(), Complex64::new(1.0, 0.0))),
        );
        let value = norm(group, &d.apply(group, &omega)?, spec)?;
        let increment = value - prev_norm;
        let ratio = prev_inc.map(|p| match (p == 0.0, increment == 0.0) {
            (true, true) => 0.0,
            (true, false) => f64::INFINITY,
            _ => increment / p,
        });
        table.rows.push(ProbeRow {
            n,
            norm: value,
            increment,
            ratio,
        });
        prev_norm = value;
        prev_inc = Some(increment);
    }
    let ratios = table.ratios();
    if ratios.len() >= 3 {
        table.verdict = if ratios[ratios.len() - 3..].iter().all(|&q| q < theta) {
            ProbeVerdict::Stabilizing
        } else {
            ProbeVerdict::NotStabilizing
        };
    }
    Ok(table)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifyOptions {
    pub tol: f64,
    pub witness_length: usize,
    pub theta: f64,
    pub convention: CommutatorConvention,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            tol: character::DEFAULT_TOL,
            witness_length: DEFAULT_WITNESS_LENGTH,
            theta: DEFAULT_THETA,
            convention: CommutatorConvention::default(),
        }
    }
}

/// Consistency of the verdicts with "subordinate ambient norm and loop
/// obstruction force unboundedness".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CrossCheck {
    /// Subordinate ambient with an obstruction implies a witness.
    pub implication_holds: bool,
    /// No witness up to the witness length and a plateaued norm lower bound.
    pub bounded_verified: bool,
    /// Subordinate, obstructed and bounded-verified at once.
    pub fired: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationReport {
    pub group: String,
    pub radius: usize,
    pub options: ClassifyOptions,
    pub derivation: Value,
    pub additivity: AdditivityReport,
    pub loops: LoopTrivialityReport,
    pub hom_constancy: HomConstancy,
    pub subordination: SubordinationReport,
    pub norm_bound: NormLowerBound,
    pub norm_plateau: bool,
    pub witness: Option<WitnessReport>,
    pub probe: Option<ProbeTable>,
    pub cross_check: CrossCheck,
}

impl ClassificationReport {
    pub fn is_quasi_inner(&self) -> bool {
        self.loops.is_quasi_inner()
    }

    pub fn obstruction(&self) -> Option<&Obstruction> {
        self.loops.obstruction.as_ref()
    }

    pub fn witness_found(&self) -> bool {
        self.witness.as_ref().is_some_and(WitnessReport::found)
    }

    pub fn to_json(&self, group: &Group) -> Value {
        let morph = |m: &Morphism| m.to_json(group);
        let hom = match &self.hom_constancy {
            HomConstancy::Ok { groups, multi } => {
                json!({"verdict": "constant", "hom_sets": groups, "multi": multi})
            }
            HomConstancy::Counterexample {
                first,
                second,
                values,
            } => json!({
                "verdict": "counterexample",
                "first": morph(first),
                "second": morph(second),
                "values": [complex_json(values.0), complex_json(values.1)],
            }),
            HomConstancy::NotApplicable { .. } => json!({"verdict": "not-applicable"}),
        };
        let sub = &self.subordination;
        let sub_witness = match &sub.verdict {
            SubordinationVerdict::Subordinate => Value::Null,
            SubordinationVerdict::NotSubordinate { witness } => witness
                .iter()
                .map(|w| {
                    json!({
                        "n": w.n,
                        "element": group.format(&w.element),
                        "scale": w.scale,
                        "norm": w.norm,
                        "sup": w.sup,
                        "ratio": w.ratio,
                    })
                })
                .collect(),
        };
        json!({
            "schema": SCHEMA_VERSION,
            "group": self.group,
            "sign_convention": self.options.convention.describe(),
            "radii": {
                "classification": self.radius,
                "witness_length": self.options.witness_length,
                "order_bound": group.config().order_bound,
            },
            "tol": self.options.tol,
            "derivation": self.derivation,
            "additivity": {
                "ok": self.additivity.is_ok(),
                "checked": self.additivity.checked,
                "skipped": self.additivity.skipped,
                "violation": self.additivity.violation.as_ref().map(|v| json!({
                    "psi": morph(&v.psi),
                    "phi": morph(&v.phi),
                    "defect": v.defect,
                })),
            },
            "loop_triviality": {
                "quasi_inner": self.loops.is_quasi_inner(),
                "checked": self.loops.checked,
                "skipped": self.loops.skipped,
                "obstruction": self.loops.obstruction.as_ref().map(|o| json!({
                    "loop": o.loop_info.to_json(group),
                    "value": complex_json(o.value),
                })),
            },
            "hom_constancy": hom,
            "subordination": {
                "norm": sub.spec.to_string(),
                "subordinate": sub.is_subordinate(),
                "best_constant": sub.best_constant,
                "probe_radius": sub.probe_radius,
                "probed": sub.probed,
                "note": SUBORDINATION_NOTE,
                "witness": sub_witness,
            },
            "operator_norm": {
                "lower_bound": self.norm_bound.to_json(group),
                "plateau": self.norm_plateau,
            },
            "witness": self.witness.as_ref().map(|w| w.to_json(group)),
            "exp_probe": self.probe.as_ref().map(ProbeTable::to_json),
            "cross_check": {
                "implication_holds": self.cross_check.implication_holds,
                "bounded_verified": self.cross_check.bounded_verified,
                "fired": self.cross_check.fired,
            },
        })
    }
}

/// Runs character extraction, additivity, loop triviality, Hom-constancy,
/// subordination of `ambient`, and the witness search, then cross-checks them.
pub fn classify(
    group: &Group,
    d: &Derivation,
    ambient: NormSpec,
    r: usize,
    options: &ClassifyOptions,
) -> Result<ClassificationReport> {
    let chi = character_of_derivation(group, d)?;
    let tol = options.tol;
    let additivity = check_additivity(group, &chi, r, tol)?;
    let loops = is_loop_trivial(group, &chi, r, tol)?;
    let hom_constancy = check_hom_constancy(group, &chi, r, tol)?;
    let subordination = is_subordinate(group, ambient, r)?;

    let full = group.ball(d.dom_radius())?.len();
    let inner_part = group.ball(d.dom_radius().saturating_sub(1))?.len();
    let norm_bound = operator_norm_lower_bound(group, d, ambient, &TestFamily::Basis, full)?;
    let head = operator_norm_lower_bound(group, d, ambient, &TestFamily::Basis, inner_part)?;
    let norm_plateau = norm_bound.value <= head.value * (1.0 + 1e-9) + tol;

    let witness = if loops.obstruction.is_some() {
        Some(unboundedness_witness(
            group,
            &chi,
            r,
            options.witness_length,
            tol,
        )?)
    } else {
        None
    };
    let probe = match ambient {
        NormSpec::ExpWeight(alpha) => {
            let radii: Vec<usize> = (1..=d.dom_radius()).collect();
            Some(exp_norm_boundedness_probe(
                group,
                d,
                alpha,
                &radii,
                options.theta,
            )?)
        }
        _ => None,
    };

    let obstructed = loops.obstruction.is_some();
    let found = witness.as_ref().is_some_and(WitnessReport::found);
    let subordinate = subordination.is_subordinate();
    let bounded_verified = !found && norm_plateau;
    let cross_check = CrossCheck {
        implication_holds: !(subordinate && obstructed) || found,
        bounded_verified,
        fired: subordinate && obstructed && bounded_verified,
    };
    Ok(ClassificationReport {
        group: group.spec().to_string(),
        radius: r,
        options: options.clone(),
        derivation: json!({
            "provenance": d.provenance().as_str(),
            "dom_radius": d.dom_radius(),
            "trunc_radius": d.trunc_radius(),
            "exact": d.is_exact(),
        }),
        additivity,
        loops,
        hom_constancy,
        subordination,
        norm_bound,
        norm_plateau,
        witness,
        probe,
        cross_check,
    })
}
