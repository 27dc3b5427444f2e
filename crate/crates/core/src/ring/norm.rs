//! Norms on ℂ[G] and the subordination check against the sup norm.

use std::fmt;
use std::str::FromStr;

use super::RingElement;
use crate::error::{Error, Result};
use crate::group::{Group, GroupElement};

/// A norm on finite-support elements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormSpec {
    /// `sup_g |x(g)|`; also the ℓ∞ norm.
    Sup,
    /// `(Σ |x(g)|^p)^(1/p)` with `p >= 1`.
    Lp(f64),
    /// `Σ |x(g)| e^(-α|g|)` with `α > 0`.
    ExpWeight(f64),
}

impl NormSpec {
    pub fn lp(p: f64) -> Result<Self> {
        if p.is_infinite() && p > 0.0 {
            return Ok(NormSpec::Sup);
        }
        if p.is_nan() || p < 1.0 || !p.is_finite() {
            return Err(Error::Domain(format!("lp norm needs p >= 1, got {p}")));
        }
        Ok(NormSpec::Lp(p))
    }

    pub fn exp_weight(alpha: f64) -> Result<Self> {
        if alpha.is_nan() || alpha <= 0.0 || !alpha.is_finite() {
            return Err(Error::Domain(format!(
                "exponential weight needs alpha > 0, got {alpha}"
            )));
        }
        Ok(NormSpec::ExpWeight(alpha))
    }
}

impl fmt::Display for NormSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormSpec::Sup => write!(f, "sup"),
            NormSpec::Lp(p) => write!(f, "lp:{p}"),
            NormSpec::ExpWeight(a) => write!(f, "expw:{a}"),
        }
    }
}

impl FromStr for NormSpec {
    type Err = Error;

    /// `sup`, `linf`, `lp:2`, `lp:inf`, `expw:1.5`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let num = |v: &str| {
            v.trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("bad norm parameter in {s:?}: {e}")))
        };
        match s.split_once(':') {
            None if s == "sup" || s == "linf" => Ok(NormSpec::Sup),
            Some(("lp", p)) => NormSpec::lp(num(p)?),
            Some(("expw", a)) => NormSpec::exp_weight(num(a)?),
            _ => Err(Error::Parse(format!(
                "unknown norm {s:?}; expected sup, lp:<p> or expw:<alpha>"
            ))),
        }
    }
}

/// Value of `spec` on `omega`. The exponential weight needs word lengths and
/// fails when a support element lies outside the group's length table.
pub fn norm(group: &Group, omega: &RingElement, spec: NormSpec) -> Result<f64> {
    match spec {
        NormSpec::Sup => Ok(omega.sup_norm()),
        NormSpec::Lp(p) => Ok(omega
            .terms()
            .map(|(_, c)| c.norm().powf(p))
            .sum::<f64>()
            .powf(1.0 / p)),
        NormSpec::ExpWeight(alpha) => omega.terms().try_fold(0.0, |acc, (g, c)| {
            let len = group.word_length(g)?;
            Ok(acc + c.norm() * (-alpha * len as f64).exp())
        }),
    }
}

/// One member `ω_n = e^(α n)·δ_(g_n)` of a non-subordination witness family.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessPoint {
    pub n: usize,
    pub element: GroupElement,
    pub scale: f64,
    /// `‖ω_n‖` in the probed norm (1 up to rounding).
    pub norm: f64,
    /// `‖ω_n‖_s`.
    pub sup: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SubordinationVerdict {
    Subordinate,
    NotSubordinate { witness: Vec<WitnessPoint> },
}

/// Outcome of [`is_subordinate`].
///
/// Subordination is checked in its uniform form `‖ω‖_s <= c·‖ω‖`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubordinationReport {
    pub spec: NormSpec,
    pub probe_radius: usize,
    pub verdict: SubordinationVerdict,
    /// Largest `‖ω‖_s / ‖ω‖` seen on the probe elements.
    pub best_constant: f64,
    pub probed: usize,
}

impl SubordinationReport {
    pub fn is_subordinate(&self) -> bool {
        matches!(self.verdict, SubordinationVerdict::Subordinate)
    }
}

pub const SUBORDINATION_NOTE: &str =
    "subordination checked in the uniform form sup-norm <= c * norm";

/// Decides whether `spec` is subordinate to the sup norm on `group`.
///
/// The verdict is analytic (sup and ℓp always are; the exponential weight is
/// not on infinite groups); the probe measures the best constant on every
/// single-basis element of `Ball(probe_radius)` and on the ball indicators.
pub fn is_subordinate(
    group: &Group,
    spec: NormSpec,
    probe_radius: usize,
) -> Result<SubordinationReport> {
    let ball = group.ball(probe_radius)?;
    let mut best: f64 = 0.0;
    let mut probed = 0;
    let mut indicator = RingElement::zero();
    let mut last_len = 0;
    let mut probe = |omega: &RingElement| -> Result<()> {
        let ratio = omega.sup_norm() / norm(group, omega, spec)?;
        best = best.max(ratio);
        probed += 1;
        Ok(())
    };
    for g in ball.elements() {
        let len = ball.length(g).unwrap_or(0);
        if len != last_len {
            probe(&indicator)?;
            last_len = len;
        }
        indicator.add_term(g.clone(), 1.0.into());
        probe(&RingElement::basis(g.clone()))?;
    }
    probe(&indicator)?;

    let verdict = match spec {
        NormSpec::Sup | NormSpec::Lp(_) => SubordinationVerdict::Subordinate,
        // Finite groups: sup <= e^(α·diam)·‖·‖*, a uniform constant.
        NormSpec::ExpWeight(_) if group.is_finite() => SubordinationVerdict::Subordinate,
        NormSpec::ExpWeight(alpha) => {
            let mut witness = Vec::new();
            for n in 1..=probe_radius {
                let Some(g) = ball.sphere(n).next() else {
                    break;
                };
                let scale = (alpha * n as f64).exp();
                let omega = RingElement::basis(g.clone()).scale(scale.into());
                let w_norm = norm(group, &omega, spec)?;
                let sup = omega.sup_norm();
                witness.push(WitnessPoint {
                    n,
                    element: g.clone(),
                    scale,
                    norm: w_norm,
                    sup,
                    ratio: sup / w_norm,
                });
            }
            SubordinationVerdict::NotSubordinate { witness }
        }
    };
    Ok(SubordinationReport {
        spec,
        probe_radius,
        verdict,
        best_constant: best,
        probed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grp(s: &str) -> Group {
        Group::from_spec_str(s).unwrap()
    }

    #[test]
    fn norm_values() {
        let f2 = grp("free:2");
        let u = RingElement::parse("2*x + 3*y", &f2).unwrap();
        assert_eq!(norm(&f2, &u, NormSpec::Sup).unwrap(), 3.0);
        let v = RingElement::parse("x + y", &f2).unwrap();
        assert!((norm(&f2, &v, NormSpec::Lp(2.0)).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        let a = 0.7;
        let x = RingElement::parse("x", &f2).unwrap();
        assert!((norm(&f2, &x, NormSpec::ExpWeight(a)).unwrap() - (-a).exp()).abs() < 1e-15);
        assert_eq!(
            norm(&f2, &RingElement::zero(), NormSpec::Lp(3.0)).unwrap(),
            0.0
        );
    }

    #[test]
    fn spec_strings() {
        assert_eq!("sup".parse::<NormSpec>().unwrap(), NormSpec::Sup);
        assert_eq!("linf".parse::<NormSpec>().unwrap(), NormSpec::Sup);
        assert_eq!("lp:inf".parse::<NormSpec>().unwrap(), NormSpec::Sup);
        assert_eq!("lp:2".parse::<NormSpec>().unwrap(), NormSpec::Lp(2.0));
        assert_eq!(
            "expw:1.5".parse::<NormSpec>().unwrap(),
            NormSpec::ExpWeight(1.5)
        );
        assert!("lp:0.5".parse::<NormSpec>().is_err());
        assert!("expw:0".parse::<NormSpec>().is_err());
        assert!("l2".parse::<NormSpec>().is_err());
        for s in ["sup", "lp:2", "expw:1.5"] {
            assert_eq!(s.parse::<NormSpec>().unwrap().to_string(), s);
        }
    }

    #[test]
    fn exp_weight_out_of_table() {
        let h = Group::with_config(
            "heisenberg".parse().unwrap(),
            crate::group::GroupConfig {
                length_radius: 2,
                ..Default::default()
            },
        );
        let far = RingElement::parse("z^3", &h).unwrap();
        assert!(matches!(
            norm(&h, &far, NormSpec::ExpWeight(1.0)),
            Err(Error::OutOfRange { .. })
        ));
        assert!(norm(&h, &far, NormSpec::Sup).is_ok());
    }

    #[test]
    fn lp_and_sup_are_subordinate_with_unit_constant() {
        let f2 = grp("free:2");
        for spec in [NormSpec::Sup, NormSpec::Lp(1.0), NormSpec::Lp(2.0)] {
            let rep = is_subordinate(&f2, spec, 3).unwrap();
            assert!(rep.is_subordinate());
            assert!((rep.best_constant - 1.0).abs() < 1e-12, "{spec}");
        }
    }

    #[test]
    fn exp_weight_is_not_subordinate_on_free_group() {
        let f2 = grp("free:2");
        let rep = is_subordinate(&f2, NormSpec::ExpWeight(1.0), 5).unwrap();
        let SubordinationVerdict::NotSubordinate { witness } = &rep.verdict else {
            panic!("expected a witness");
        };
        assert_eq!(witness.len(), 5);
        let last = witness.last().unwrap();
        assert_eq!(last.n, 5);
        assert!((last.norm - 1.0).abs() < 1e-12);
        assert!((last.ratio - 5f64.exp()).abs() < 1e-9 * 5f64.exp());
        assert!((rep.best_constant - 5f64.exp()).abs() < 1e-9 * 5f64.exp());
    }

    #[test]
    fn exp_weight_is_subordinate_on_finite_groups() {
        let s3 = grp("symmetric:3");
        let rep = is_subordinate(&s3, NormSpec::ExpWeight(1.0), 6).unwrap();
        assert!(rep.is_subordinate());
        // diameter of S3 with adjacent transpositions is 3
        assert!((rep.best_constant - 3f64.exp()).abs() < 1e-9);
    }
}
