//! Finite-support elements of the group ring ℂ[G].

mod norm;

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde_json::{json, Value};

pub use norm::{
    is_subordinate, norm, NormSpec, SubordinationReport, SubordinationVerdict, WitnessPoint,
    SUBORDINATION_NOTE,
};

use crate::error::{Error, Result};
use crate::group::{Group, GroupElement};

/// Coefficients with magnitude at or below this are dropped.
pub const DEDUP_THRESHOLD: f64 = 1e-15;

/// `Σ x(g)·g` with finitely many nonzero coefficients.
///
/// Terms are kept in normal-form order; zero coefficients are never stored.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RingElement {
    terms: BTreeMap<GroupElement, Complex64>,
}

impl RingElement {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The basis element `δ_g`.
    pub fn basis(g: GroupElement) -> Self {
        Self::monomial(g, Complex64::new(1.0, 0.0))
    }

    pub fn monomial(g: GroupElement, c: Complex64) -> Self {
        let mut r = Self::zero();
        r.add_term(g, c);
        r
    }

    pub fn from_terms<I: IntoIterator<Item = (GroupElement, Complex64)>>(terms: I) -> Self {
        let mut r = Self::zero();
        for (g, c) in terms {
            r.add_term(g, c);
        }
        r
    }

    /// Adds `c·g`, dropping the coefficient if it cancels.
    pub fn add_term(&mut self, g: GroupElement, c: Complex64) {
        let entry = self.terms.entry(g);
        match entry {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().norm() <= DEDUP_THRESHOLD {
                    o.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                if c.norm() > DEDUP_THRESHOLD {
                    v.insert(c);
                }
            }
        }
    }

    pub fn coeff(&self, g: &GroupElement) -> Complex64 {
        self.terms.get(g).copied().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&GroupElement, &Complex64)> {
        self.terms.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &GroupElement> {
        self.terms.keys()
    }

    /// Number of nonzero terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &RingElement) -> RingElement {
        let mut r = self.clone();
        for (g, c) in &other.terms {
            r.add_term(g.clone(), *c);
        }
        r
    }

    pub fn sub(&self, other: &RingElement) -> RingElement {
        let mut r = self.clone();
        for (g, c) in &other.terms {
            r.add_term(g.clone(), -*c);
        }
        r
    }

    pub fn scale(&self, c: Complex64) -> RingElement {
        RingElement::from_terms(self.terms.iter().map(|(g, x)| (g.clone(), x * c)))
    }

    /// Convolution product `(u·v)(g) = Σ_h u(h)·v(h⁻¹g)`.
    pub fn convolve(&self, other: &RingElement, group: &Group) -> Result<RingElement> {
        for g in self.support().chain(other.support()) {
            group.check(g)?;
        }
        Ok(self.convolve_unchecked(other, group))
    }

    pub(crate) fn convolve_unchecked(&self, other: &RingElement, group: &Group) -> RingElement {
        let mut r = RingElement::zero();
        for (g, a) in &self.terms {
            for (h, b) in &other.terms {
                r.add_term(group.op(g, h), a * b);
            }
        }
        r
    }

    /// `g·self`.
    pub fn left_mul(&self, g: &GroupElement, group: &Group) -> RingElement {
        RingElement::from_terms(self.terms.iter().map(|(h, c)| (group.op(g, h), *c)))
    }

    /// `self·g`.
    pub fn right_mul(&self, g: &GroupElement, group: &Group) -> RingElement {
        RingElement::from_terms(self.terms.iter().map(|(h, c)| (group.op(h, g), *c)))
    }

    /// Largest coefficient magnitude, i.e. the sup norm.
    pub fn sup_norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Keeps only the terms whose group element satisfies `keep`.
    pub fn restrict<F: FnMut(&GroupElement) -> bool>(&self, mut keep: F) -> RingElement {
        RingElement {
            terms: self
                .terms
                .iter()
                .filter(|(g, _)| keep(g))
                .map(|(g, c)| (g.clone(), *c))
                .collect(),
        }
    }

    /// Largest word length in the support (0 for the zero element).
    pub fn support_radius(&self, group: &Group) -> Result<usize> {
        self.support()
            .map(|g| group.word_length(g))
            .try_fold(0, |m, l| l.map(|l| m.max(l)))
    }

    /// Whether all coefficients agree with `other` within `tol`.
    pub fn approx_eq(&self, other: &RingElement, tol: f64) -> bool {
        self.sub(other).sup_norm() <= tol
    }

    /// `{"terms": [{"g": word, "re": r, "im": i}, ...]}` in normal-form order.
    pub fn to_json(&self, group: &Group) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(g, c)| json!({"g": group.format(g), "re": c.re, "im": c.im}))
            .collect();
        json!({ "terms": terms })
    }

    pub fn from_json(value: &Value, group: &Group) -> Result<RingElement> {
        let terms = value
            .get("terms")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("ring element JSON needs a \"terms\" array".into()))?;
        let mut r = RingElement::zero();
        for t in terms {
            let g = t
                .get("g")
                .and_then(Value::as_str)
                .ok_or_else(|| Error::Parse(format!("term without \"g\": {t}")))?;
            let re = t.get("re").and_then(Value::as_f64).unwrap_or(0.0);
            let im = t.get("im").and_then(Value::as_f64).unwrap_or(0.0);
            r.add_term(group.parse(g)?, Complex64::new(re, im));
        }
        Ok(r)
    }

    /// Renders as `2*x - y^-1 + 3i*e`-style text.
    pub fn format(&self, group: &Group) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (g, c)) in self.terms.iter().enumerate() {
            let (sign, mag) = if c.im == 0.0 && c.re < 0.0 {
                ("-", Complex64::new(-c.re, 0.0))
            } else {
                ("+", *c)
            };
            if i == 0 {
                if sign == "-" {
                    out.push('-');
                }
            } else {
                out.push_str(&format!(" {sign} "));
            }
            let coeff = if mag.im == 0.0 {
                if mag.re == 1.0 {
                    String::new()
                } else {
                    format!("{}*", mag.re)
                }
            } else if mag.re == 0.0 {
                format!("{}i*", mag.im)
            } else {
                format!("({}{:+}i)*", mag.re, mag.im)
            };
            out.push_str(&coeff);
            out.push_str(&group.format(g));
        }
        out
    }

    /// Parses `2*x + 3*y - x*y^-1`. A term is an optional real or imaginary
    /// (`2i`) coefficient followed by a generator word; a bare number is a
    /// multiple of the identity.
    pub fn parse(s: &str, group: &Group) -> Result<RingElement> {
        let s = s.trim();
        if s == "0" {
            return Ok(RingElement::zero());
        }
        let mut r = RingElement::zero();
        for (negative, term) in split_terms(s)? {
            let (coeff, word) = split_coefficient(term)?;
            let g = if word.is_empty() {
                group.identity()
            } else {
                group.parse(word)?
            };
            r.add_term(g, if negative { -coeff } else { coeff });
        }
        Ok(r)
    }
}

fn split_terms(s: &str) -> Result<Vec<(bool, &str)>> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut start = 0;
    let mut negative = false;
    let bytes = s.as_bytes();
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            '+' | '-' if depth == 0 => {
                let prev = s[..i].trim_end().as_bytes().last().copied();
                // `x^-1` and `1e-3` keep their sign.
                if matches!(prev, Some(b'^'))
                    || (matches!(prev, Some(b'e')) && i >= 2 && bytes[i - 2].is_ascii_digit())
                {
                    continue;
                }
                let term = s[start..i].trim();
                if !term.is_empty() {
                    out.push((negative, term));
                } else if i != 0 && !s[..i].trim().is_empty() {
                    return Err(Error::Parse(format!("empty term in {s:?}")));
                }
                negative = c == '-';
                start = i + 1;
            }
            _ => {}
        }
    }
    let term = s[start..].trim();
    if term.is_empty() {
        return Err(Error::Parse(format!("dangling sign in {s:?}")));
    }
    out.push((negative, term));
    Ok(out)
}

fn parse_scalar(tok: &str) -> Option<Complex64> {
    let tok = tok.trim();
    if let Some(im) = tok.strip_suffix('i') {
        let v = if im.is_empty() {
            1.0
        } else {
            im.parse::<f64>().ok()?
        };
        return Some(Complex64::new(0.0, v));
    }
    tok.parse::<f64>().ok().map(|v| Complex64::new(v, 0.0))
}

fn split_coefficient(term: &str) -> Result<(Complex64, &str)> {
    if let Some(c) = parse_scalar(term) {
        return Ok((c, ""));
    }
    if let Some((head, rest)) = term.split_once('*') {
        if let Some(c) = parse_scalar(head) {
            return Ok((c, rest.trim()));
        }
    }
    Ok((Complex64::new(1.0, 0.0), term))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grp(s: &str) -> Group {
        Group::from_spec_str(s).unwrap()
    }

    fn el(g: &Group, s: &str) -> RingElement {
        RingElement::parse(s, g).unwrap()
    }

    #[test]
    fn basis_elements_multiply_as_group_elements() {
        let f2 = grp("free:2");
        let g = f2.parse("x*y").unwrap();
        let h = f2.parse("y^-1*x").unwrap();
        let p = RingElement::basis(g.clone())
            .convolve(&RingElement::basis(h.clone()), &f2)
            .unwrap();
        assert_eq!(p, RingElement::basis(f2.op(&g, &h)));
    }

    #[test]
    fn commutative_square() {
        let z = grp("abelian:1");
        let u = el(&z, "1 + x");
        assert_eq!(u.convolve(&u, &z).unwrap(), el(&z, "1 + 2*x + x^2"));
    }

    #[test]
    fn free_cancellation_in_products() {
        let f2 = grp("free:2");
        let p = el(&f2, "x + y").convolve(&el(&f2, "x^-1"), &f2).unwrap();
        assert_eq!(p, el(&f2, "e + y*x^-1"));
    }

    #[test]
    fn zero_coefficients_are_dropped() {
        let f2 = grp("free:2");
        let u = el(&f2, "x - x + y");
        assert_eq!(u.len(), 1);
        assert!(el(&f2, "x").sub(&el(&f2, "x")).is_zero());
    }

    #[test]
    fn mixed_groups_are_rejected() {
        let f2 = grp("free:2");
        let z6 = grp("cyclic:6");
        let u = el(&z6, "x");
        assert!(matches!(u.convolve(&u, &f2), Err(Error::Domain(_))));
    }

    #[test]
    fn parse_and_format() {
        let h = grp("heisenberg");
        let u = el(&h, "2*x - 3*(1,-1,0) + 0.5i*z + 4");
        assert_eq!(u.coeff(&h.identity()), Complex64::new(4.0, 0.0));
        assert_eq!(
            u.coeff(&GroupElement::Heisenberg([1, -1, 0])),
            Complex64::new(-3.0, 0.0)
        );
        assert_eq!(RingElement::parse(&u.format(&h), &h).unwrap(), u);
        let f2 = grp("free:2");
        assert_eq!(el(&f2, "x^-1 - y^-2").len(), 2);
        assert!(RingElement::parse("x +", &f2).is_err());
    }

    #[test]
    fn json_terms_follow_normal_form_order() {
        let f2 = grp("free:2");
        let u = el(&f2, "3*y + 2*x");
        let v = u.to_json(&f2);
        assert_eq!(
            v.to_string(),
            r#"{"terms":[{"g":"x","im":0.0,"re":2.0},{"g":"y","im":0.0,"re":3.0}]}"#
        );
        assert_eq!(RingElement::from_json(&v, &f2).unwrap(), u);
    }
}
