//! Propositional kernel: formulas over concept indices, their text form,
//! truth-table utilities and two-level minimization.
//!
//! Explanations are read as universally quantified over samples
//! (`∀x: class(x) ↔ φ(x)`), so only the propositional body `φ` is modelled.

mod formula;
mod parse;
pub mod qmc;

pub use formula::{
    assignment_from_bits, bits_of, equivalent, evaluate, format, minterms_of, ConceptId, Formula,
    Literal, Minterm,
};
pub use parse::{parse, parse_infer_names};
pub use qmc::{prime_implicants, quine_mccluskey, Implicant};

use thiserror::Error;

/// Largest number of variables any enumeration or minimization call accepts.
pub const MAX_VARIABLES: usize = 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LogicError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier '{name}' at offset {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("concept index {concept} is outside an assignment of width {width}")]
    ConceptOutOfRange { concept: usize, width: usize },
    #[error("{requested} variables exceed the enumeration limit of {limit}")]
    Capacity { requested: usize, limit: usize },
    #[error("concept {0} appears both plain and negated in one minterm")]
    Contradiction(usize),
    #[error("domain error: {0}")]
    Domain(String),
}

pub(crate) fn check_capacity(k: usize) -> Result<(), LogicError> {
    if k > MAX_VARIABLES {
        Err(LogicError::Capacity {
            requested: k,
            limit: MAX_VARIABLES,
        })
    } else {
        Ok(())
    }
}

/// Minimized DNF of `f`, computed over only the concepts it mentions.
pub fn simplify(f: &Formula) -> Result<Formula, LogicError> {
    simplify_within(f, MAX_VARIABLES)
}

/// Like [`simplify`] but with a lower variable ceiling.
pub fn simplify_within(f: &Formula, max_vars: usize) -> Result<Formula, LogicError> {
    let mentioned: Vec<ConceptId> = f.concepts().into_iter().collect();
    let m = mentioned.len();
    if m > max_vars.min(MAX_VARIABLES) {
        return Err(LogicError::Capacity {
            requested: m,
            limit: max_vars.min(MAX_VARIABLES),
        });
    }
    let local = f.substitute(&|c| {
        Formula::var(mentioned.binary_search(&c).expect("mentioned concept"))
    });
    let on = minterms_of(&local, m)?;
    let minimized = quine_mccluskey(&on, &[], m)?;
    Ok(minimized.substitute(&|c| Formula::Var(mentioned[c.0])).canonical())
}

/// Literal occurrences in the DNF of `f`. A formula that is already a DNF is
/// counted as written (after removing duplicate minterms); anything else is
/// first minimized.
pub fn complexity(f: &Formula) -> Result<usize, LogicError> {
    let dnf = match f.canonical().as_dnf() {
        Some(d) => d,
        None => simplify(f)?.as_dnf().expect("minimizer returns a DNF"),
    };
    Ok(dnf.iter().map(Minterm::len).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complexity_examples() {
        let names = ["x1", "x2", "nose"];
        assert_eq!(complexity(&parse("nose", &names).unwrap()).unwrap(), 1);
        assert_eq!(complexity(&parse("x1 & ~x2 | ~x1 & x2", &names).unwrap()).unwrap(), 4);
        assert_eq!(complexity(&Formula::Const(true)).unwrap(), 0);
        assert_eq!(complexity(&Formula::Const(false)).unwrap(), 0);
        // not a DNF: minimized to x1 & ~x2
        assert_eq!(complexity(&parse("~(~x1 | x2)", &names).unwrap()).unwrap(), 2);
    }

    #[test]
    fn simplify_keeps_original_concept_ids() {
        let names = ["a", "b", "c", "d"];
        let f = parse("(b & d) | (b & ~d)", &names).unwrap();
        assert_eq!(simplify(&f).unwrap(), Formula::var(1));
        let g = parse("c | c", &names).unwrap();
        assert_eq!(format(&simplify(&g).unwrap(), &names), "c");
    }

    #[test]
    fn simplify_capacity() {
        let f = Formula::And((0..13).map(Formula::var).collect());
        assert!(matches!(simplify_within(&f, 12), Err(LogicError::Capacity { .. })));
        assert!(simplify_within(&f, 13).is_ok());
    }
}
