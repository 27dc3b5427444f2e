use thiserror::Error;

/// Errors raised by group, ring and derivation operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Operands do not belong to the group, or a structural precondition failed
    /// (non-central element, relation violated by an endomorphism, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A query fell outside an enumerated ball or a declared table domain.
    #[error("out of range: {what} lies outside radius {radius}{}", needed_suffix(.needed))]
    OutOfRange {
        what: String,
        radius: usize,
        needed: Option<usize>,
    },

    /// An enumeration would exceed the configured element budget.
    #[error("resource limit: {what} needs more than {budget} elements")]
    Resource { what: String, budget: usize },

    /// Two morphisms were composed whose boundary objects do not match.
    #[error("cannot compose: source of left morphism is {left_source}, target of right morphism is {right_target}")]
    Composition {
        left_source: String,
        right_target: String,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

fn needed_suffix(needed: &Option<usize>) -> String {
    match needed {
        Some(r) => format!(" (radius {r} suffices)"),
        None => String::new(),
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn out_of_range(what: impl Into<String>, radius: usize) -> Self {
        Error::OutOfRange {
            what: what.into(),
            radius,
            needed: None,
        }
    }
}
