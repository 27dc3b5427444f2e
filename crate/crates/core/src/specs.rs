//! Command-line spec strings for characters and derivations.
//!
//! Arguments of the form `@path` are read as JSON files.

use std::fs;

use serde_json::Value;

use crate::character::{Character, Homomorphism, Potential, Tabulated};
use crate::derivation::{
    central_derivation, derivation_from_character, inner_derivation, potential_derivation,
    sigma_tau_inner, Derivation, EndomorphismSpec,
};
use crate::error::{Error, Result};
use crate::group::{Group, GroupElement};
use crate::ring::RingElement;

fn read_json(arg: &str) -> Result<Value> {
    let path = arg
        .strip_prefix('@')
        .ok_or_else(|| Error::Parse(format!("expected @file.json, got {arg:?}")))?;
    let io = |message: String| Error::Io {
        path: path.to_string(),
        message,
    };
    let text = fs::read_to_string(path).map_err(|e| io(e.to_string()))?;
    serde_json::from_str(&text).map_err(|e| io(e.to_string()))
}

fn split_kind(s: &str) -> Result<(&str, &str)> {
    s.trim()
        .split_once(':')
        .map(|(k, rest)| (k.trim(), rest.trim()))
        .ok_or_else(|| Error::Parse(format!("expected <kind>:<argument>, got {s:?}")))
}

// `<z>;<hom>` or `<z>,<gen=value,...>`.
fn split_central(rest: &str) -> (&str, &str) {
    rest.split_once(';')
        .or_else(|| rest.split_once(','))
        .unwrap_or((rest, ""))
}

fn parse_central(rest: &str, group: &Group) -> Result<(GroupElement, Homomorphism)> {
    let (z, hom) = split_central(rest);
    Ok((group.parse(z.trim())?, Homomorphism::parse(hom, group)?))
}

/// `inner:<element>`, `potential:@f.json`, `central:<z>;<hom>`, `tabulated:@f.json`.
pub fn parse_character(s: &str, group: &Group) -> Result<Character> {
    let (kind, rest) = split_kind(s)?;
    match kind {
        "inner" => Ok(Character::inner(RingElement::parse(rest, group)?)),
        "potential" => Ok(Character::Potential(Potential::from_json(
            &read_json(rest)?,
            group,
        )?)),
        "central" => {
            let (z, hom) = parse_central(rest, group)?;
            let check = group.word_length(&z).unwrap_or(0).max(2);
            Character::central(group, z, hom, check)
        }
        "tabulated" => Ok(Character::Tabulated(Tabulated::from_json(
            &read_json(rest)?,
            group,
        )?)),
        other => Err(Error::Parse(format!(
            "unknown character kind {other:?}; expected inner, potential, central or tabulated"
        ))),
    }
}

/// A parsed derivation spec, built once radii are known.
#[derive(Debug, Clone)]
pub enum DerivationSpec {
    Inner(RingElement),
    Central {
        z: GroupElement,
        hom: Homomorphism,
    },
    Potential(Potential),
    SigmaTau {
        a: RingElement,
        sigma: EndomorphismSpec,
        tau: EndomorphismSpec,
    },
    FromCharacter(Character),
    Table(Derivation),
}

impl DerivationSpec {
    /// `inner:<element>`, `central:<z>;<hom>`, `potential:@f.json`,
    /// `stinner:<a>;<sigma>;<tau>`, `character:<character spec>`, `table:@f.json`.
    pub fn parse(s: &str, group: &Group) -> Result<Self> {
        let (kind, rest) = split_kind(s)?;
        match kind {
            "inner" => Ok(DerivationSpec::Inner(RingElement::parse(rest, group)?)),
            "central" => {
                let (z, hom) = parse_central(rest, group)?;
                Ok(DerivationSpec::Central { z, hom })
            }
            "potential" => Ok(DerivationSpec::Potential(Potential::from_json(&read_json(rest)?, group)?)),
            "stinner" => {
                let parts: Vec<&str> = rest.split(';').collect();
                let [a, sigma, tau] = parts[..] else {
                    return Err(Error::Parse(format!("expected stinner:<a>;<sigma>;<tau>, got {s:?}")));
                };
                Ok(DerivationSpec::SigmaTau {
                    a: RingElement::parse(a, group)?,
                    sigma: EndomorphismSpec::parse(sigma, group)?,
                    tau: EndomorphismSpec::parse(tau, group)?,
                })
            }
            "character" => Ok(DerivationSpec::FromCharacter(parse_character(rest, group)?)),
            "table" => Ok(DerivationSpec::Table(Derivation::from_json(&read_json(rest)?, group)?)),
            other => Err(Error::Parse(format!(
                "unknown derivation kind {other:?}; expected inner, central, potential, stinner, character or table"
            ))),
        }
    }

    /// The `(σ, τ)` twist, if any.
    pub fn twist(&self) -> Option<(&EndomorphismSpec, &EndomorphismSpec)> {
        match self {
            DerivationSpec::SigmaTau { sigma, tau, .. } => Some((sigma, tau)),
            _ => None,
        }
    }

    /// Builds the table over `Ball(dom_radius)`; `trunc_radius` applies to
    /// character-based constructions only. Loaded tables keep their own radii.
    pub fn build(
        &self,
        group: &Group,
        dom_radius: usize,
        trunc_radius: usize,
    ) -> Result<Derivation> {
        match self {
            DerivationSpec::Inner(a) => inner_derivation(group, a, dom_radius),
            DerivationSpec::Central { z, hom } => central_derivation(group, z, hom, dom_radius),
            DerivationSpec::Potential(f) => {
                potential_derivation(group, f, dom_radius, trunc_radius)
            }
            DerivationSpec::SigmaTau { a, sigma, tau } => {
                sigma_tau_inner(group, a, sigma, tau, dom_radius)
            }
            DerivationSpec::FromCharacter(chi) => {
                derivation_from_character(group, chi, dom_radius, trunc_radius)
            }
            DerivationSpec::Table(d) => Ok(d.clone()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::Morphism;
    use num_complex::Complex64;

    #[test]
    fn character_specs() {
        let z = Group::from_spec_str("abelian:1").unwrap();
        let chi = parse_character("central:e;x=1", &z).unwrap();
        let phi = Morphism::new(z.parse("x^3").unwrap(), z.parse("x^3").unwrap());
        assert_eq!(chi.evaluate(&z, &phi).unwrap(), Complex64::new(3.0, 0.0));
        assert!(parse_character("central:e,x=1", &z).is_ok());
        assert!(matches!(parse_character("inner", &z), Err(Error::Parse(_))));
        assert!(matches!(
            parse_character("weird:x", &z),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            parse_character("tabulated:@/nonexistent/t.json", &z),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn derivation_specs() {
        let f2 = Group::from_spec_str("free:2").unwrap();
        let spec = DerivationSpec::parse("stinner:x;x=x^2;id", &f2).unwrap();
        assert!(spec.twist().is_some());
        let d = spec.build(&f2, 2, 2).unwrap();
        assert_eq!(d.dom_radius(), 2);
        assert!(DerivationSpec::parse("stinner:x;id", &f2).is_err());
        let from = DerivationSpec::parse("character:inner:x", &f2).unwrap();
        assert!(!from.build(&f2, 1, 2).unwrap().is_exact());
    }
}
