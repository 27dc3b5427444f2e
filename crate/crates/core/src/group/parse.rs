use super::{commutator_word, Group, GroupElement, GroupKind, Letter};
use crate::error::{Error, Result};

/// Parses a product of factors separated by `*`.
///
/// A factor is `e`/`1`, a generator label with an optional integer power
/// (`x`, `y^-1`, `x^2`), the central alias `z` in the Heisenberg group, a
/// Heisenberg triple `(a,b,c)`, or, in symmetric groups, 1-based cycle
/// notation such as `(1 2 3)(4 5)`.
pub(super) fn parse_element(group: &Group, s: &str) -> Result<GroupElement> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty element".into()));
    }
    let mut acc = group.identity();
    for factor in split_factors(s) {
        let factor = factor.trim();
        if factor.is_empty() {
            return Err(Error::Parse(format!("empty factor in {s:?}")));
        }
        let el = parse_factor(group, factor)?;
        acc = group.op(&acc, &el);
    }
    Ok(acc)
}

// Splits on `*` outside parentheses.
fn split_factors(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            '*' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

fn parse_factor(group: &Group, factor: &str) -> Result<GroupElement> {
    if factor == "e" || factor == "1" {
        return Ok(group.identity());
    }
    if factor.starts_with('(') {
        return match group.kind() {
            GroupKind::Heisenberg => parse_triple(factor),
            GroupKind::Symmetric { degree } => parse_cycles(factor, degree),
            _ => Err(Error::Parse(format!(
                "parenthesized factor {factor:?} is only valid in heisenberg or symmetric groups"
            ))),
        };
    }
    let (base, exp) = match factor.split_once('^') {
        Some((b, e)) => {
            let exp = e
                .trim()
                .parse::<i64>()
                .map_err(|err| Error::Parse(format!("bad exponent in {factor:?}: {err}")))?;
            (b.trim(), exp)
        }
        None => (factor, 1),
    };
    if let Some(i) = group.labels().iter().position(|l| l == base) {
        return Ok(group.pow(&group.generator(i), exp));
    }
    if group.kind() == GroupKind::Heisenberg && base == group.central_alias() {
        let c = group.eval_word(&commutator_word(
            &[Letter::new(0, false)],
            &[Letter::new(1, false)],
        ));
        return Ok(group.pow(&c, exp));
    }
    Err(Error::Parse(format!(
        "unknown generator {base:?}; expected one of {:?}",
        group.labels()
    )))
}

fn parse_triple(factor: &str) -> Result<GroupElement> {
    let inner = factor
        .strip_prefix('(')
        .and_then(|f| f.strip_suffix(')'))
        .ok_or_else(|| Error::Parse(format!("malformed triple {factor:?}")))?;
    let nums = inner
        .split(',')
        .map(|p| p.trim().parse::<i64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Error::Parse(format!("malformed triple {factor:?}: {e}")))?;
    match nums.as_slice() {
        [a, b, c] => Ok(GroupElement::Heisenberg([*a, *b, *c])),
        _ => Err(Error::Parse(format!(
            "triple {factor:?} needs three integers"
        ))),
    }
}

fn parse_cycles(factor: &str, degree: usize) -> Result<GroupElement> {
    // Cycles compose right to left, like the group product.
    let mut perm: Vec<u8> = (0..degree as u8).collect();
    let mut rest = factor;
    while !rest.is_empty() {
        let close = rest
            .find(')')
            .ok_or_else(|| Error::Parse(format!("unclosed cycle in {factor:?}")))?;
        let body = rest[..close]
            .strip_prefix('(')
            .ok_or_else(|| Error::Parse(format!("malformed cycle in {factor:?}")))?;
        rest = rest[close + 1..].trim_start();
        let points = body
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|p| !p.is_empty())
            .map(|p| p.parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| Error::Parse(format!("bad cycle point in {factor:?}: {e}")))?;
        if points.iter().any(|&p| p == 0 || p > degree) {
            return Err(Error::Parse(format!(
                "cycle point out of 1..={degree} in {factor:?}"
            )));
        }
        let mut sorted = points.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != points.len() {
            return Err(Error::Parse(format!("repeated cycle point in {factor:?}")));
        }
        let mut cycle: Vec<u8> = (0..degree as u8).collect();
        for (k, &p) in points.iter().enumerate() {
            cycle[p - 1] = (points[(k + 1) % points.len()] - 1) as u8;
        }
        // perm ← perm ∘ cycle
        perm = cycle.iter().map(|&i| perm[i as usize]).collect();
    }
    Ok(GroupElement::Perm(perm))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycles_and_adjacent_transpositions_agree() {
        let s3 = Group::from_spec_str("symmetric:3").unwrap();
        assert_eq!(s3.parse("(1 2)").unwrap(), s3.parse("s1").unwrap());
        assert_eq!(s3.parse("(2,3)").unwrap(), s3.parse("s2").unwrap());
        // (1 3) = s1 s2 s1
        assert_eq!(s3.parse("(1 3)").unwrap(), s3.parse("s1*s2*s1").unwrap());
        assert_eq!(s3.parse("(1 2)(2 3)").unwrap(), s3.parse("s1*s2").unwrap());
    }

    #[test]
    fn rejects_garbage() {
        let f2 = Group::from_spec_str("free:2").unwrap();
        for bad in ["", "q", "x^", "x^a", "x**y", "(1,2,3)"] {
            assert!(f2.parse(bad).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn heisenberg_triples() {
        let h = Group::from_spec_str("heisenberg").unwrap();
        assert_eq!(
            h.parse("(1,2,3)").unwrap(),
            GroupElement::Heisenberg([1, 2, 3])
        );
        assert_eq!(
            h.parse("x*y^2*z").unwrap(),
            GroupElement::Heisenberg([1, 2, 3])
        );
    }
}
