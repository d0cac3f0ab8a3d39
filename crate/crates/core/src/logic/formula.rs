use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{check_capacity, LogicError};

/// Index into a concept-name table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ConceptId(pub usize);

impl fmt::Display for ConceptId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// A concept or its negation. Orders by concept, positive before negative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Literal {
    pub concept: ConceptId,
    pub negated: bool,
}

impl Literal {
    pub fn pos(concept: usize) -> Self {
        Self {
            concept: ConceptId(concept),
            negated: false,
        }
    }

    pub fn neg(concept: usize) -> Self {
        Self {
            concept: ConceptId(concept),
            negated: true,
        }
    }

    pub fn holds(&self, assignment: &[bool]) -> bool {
        assignment[self.concept.0] != self.negated
    }

    pub fn to_formula(self) -> Formula {
        let v = Formula::Var(self.concept);
        if self.negated {
            Formula::Not(Box::new(v))
        } else {
            v
        }
    }
}

/// Conjunction of literals, at most one per concept, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct Minterm {
    literals: Vec<Literal>,
}

impl Minterm {
    pub fn new(literals: impl IntoIterator<Item = Literal>) -> Result<Self, LogicError> {
        let mut literals: Vec<Literal> = literals.into_iter().collect();
        literals.sort();
        literals.dedup();
        for w in literals.windows(2) {
            if w[0].concept == w[1].concept {
                return Err(LogicError::Contradiction(w[0].concept.0));
            }
        }
        Ok(Self { literals })
    }

    /// The empty conjunction, i.e. `True`.
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    pub fn holds(&self, assignment: &[bool]) -> bool {
        self.literals.iter().all(|l| l.holds(assignment))
    }

    pub fn concepts(&self) -> impl Iterator<Item = ConceptId> + '_ {
        self.literals.iter().map(|l| l.concept)
    }

    pub fn to_formula(&self) -> Formula {
        match self.literals.as_slice() {
            [] => Formula::Const(true),
            [l] => l.to_formula(),
            ls => Formula::And(ls.iter().map(|l| l.to_formula()).collect()),
        }
    }
}

/// Propositional formula over concept indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Formula {
    Const(bool),
    Var(ConceptId),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
}

impl Formula {
    pub fn var(concept: usize) -> Self {
        Formula::Var(ConceptId(concept))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    /// Conjunction; empty input gives `True`, a single child is returned as is.
    pub fn and(mut children: Vec<Formula>) -> Self {
        match children.len() {
            0 => Formula::Const(true),
            1 => children.pop().unwrap(),
            _ => Formula::And(children),
        }
    }

    /// Disjunction; empty input gives `False`, a single child is returned as is.
    pub fn or(mut children: Vec<Formula>) -> Self {
        match children.len() {
            0 => Formula::Const(false),
            1 => children.pop().unwrap(),
            _ => Formula::Or(children),
        }
    }

    /// Disjunction of minterms in canonical order.
    pub fn from_minterms<'a>(minterms: impl IntoIterator<Item = &'a Minterm>) -> Self {
        let set: BTreeSet<&Minterm> = minterms.into_iter().collect();
        if set.iter().any(|m| m.is_empty()) {
            return Formula::Const(true);
        }
        Formula::or(set.into_iter().map(Minterm::to_formula).collect()).canonical()
    }

    /// Concepts mentioned anywhere in the formula, ascending.
    pub fn concepts(&self) -> BTreeSet<ConceptId> {
        let mut out = BTreeSet::new();
        self.collect_concepts(&mut out);
        out
    }

    fn collect_concepts(&self, out: &mut BTreeSet<ConceptId>) {
        match self {
            Formula::Const(_) => {}
            Formula::Var(c) => {
                out.insert(*c);
            }
            Formula::Not(f) => f.collect_concepts(out),
            Formula::And(cs) | Formula::Or(cs) => cs.iter().for_each(|c| c.collect_concepts(out)),
        }
    }

    fn as_literal(&self) -> Option<Literal> {
        match self {
            Formula::Var(c) => Some(Literal {
                concept: *c,
                negated: false,
            }),
            Formula::Not(inner) => match inner.as_ref() {
                Formula::Var(c) => Some(Literal {
                    concept: *c,
                    negated: true,
                }),
                _ => None,
            },
            _ => None,
        }
    }

    fn as_minterm(&self) -> Option<Minterm> {
        match self {
            Formula::Const(true) => Some(Minterm::empty()),
            Formula::And(cs) => {
                let lits: Option<Vec<Literal>> = cs.iter().map(Formula::as_literal).collect();
                Minterm::new(lits?).ok()
            }
            f => f.as_literal().map(|l| Minterm { literals: vec![l] }),
        }
    }

    /// The minterms of this formula when it is syntactically a DNF
    /// (a literal, a conjunction of literals, a disjunction of those, or a
    /// constant). Contradictory conjunctions make it non-DNF.
    pub fn as_dnf(&self) -> Option<Vec<Minterm>> {
        match self {
            Formula::Const(false) => Some(Vec::new()),
            Formula::Or(cs) => {
                let mut out: Vec<Minterm> = cs.iter().map(Formula::as_minterm).collect::<Option<_>>()?;
                out.sort();
                out.dedup();
                Some(out)
            }
            f => f.as_minterm().map(|m| vec![m]),
        }
    }

    /// Flattens nested conjunctions/disjunctions, sorts and deduplicates
    /// their children, and unwraps single-child nodes.
    pub fn canonical(&self) -> Formula {
        match self {
            Formula::Const(_) | Formula::Var(_) => self.clone(),
            Formula::Not(inner) => Formula::Not(Box::new(inner.canonical())),
            Formula::And(cs) => canonical_nary(cs, true),
            Formula::Or(cs) => canonical_nary(cs, false),
        }
    }

    /// Largest concept index plus one, i.e. the smallest valid assignment width.
    pub fn min_width(&self) -> usize {
        self.concepts().iter().next_back().map_or(0, |c| c.0 + 1)
    }

    pub(crate) fn eval_unchecked(&self, a: &[bool]) -> bool {
        match self {
            Formula::Const(b) => *b,
            Formula::Var(c) => a[c.0],
            Formula::Not(f) => !f.eval_unchecked(a),
            Formula::And(cs) => cs.iter().all(|c| c.eval_unchecked(a)),
            Formula::Or(cs) => cs.iter().any(|c| c.eval_unchecked(a)),
        }
    }

    /// Renumbers concepts through `map` (old index → new formula).
    pub fn substitute(&self, map: &impl Fn(ConceptId) -> Formula) -> Formula {
        match self {
            Formula::Const(_) => self.clone(),
            Formula::Var(c) => map(*c),
            Formula::Not(f) => Formula::Not(Box::new(f.substitute(map))),
            Formula::And(cs) => Formula::And(cs.iter().map(|c| c.substitute(map)).collect()),
            Formula::Or(cs) => Formula::Or(cs.iter().map(|c| c.substitute(map)).collect()),
        }
    }

    /// Renders the canonical form with concept names.
    pub fn display<'a, S: AsRef<str>>(&'a self, names: &'a [S]) -> impl fmt::Display + 'a {
        Rendered {
            formula: self.canonical(),
            names,
        }
    }
}

fn canonical_nary(children: &[Formula], is_and: bool) -> Formula {
    let mut flat = Vec::with_capacity(children.len());
    for c in children {
        match (c.canonical(), is_and) {
            (Formula::And(inner), true) | (Formula::Or(inner), false) => flat.extend(inner),
            (other, _) => flat.push(other),
        }
    }
    flat.sort_by_cached_key(sort_key);
    flat.dedup();
    if is_and {
        Formula::and(flat)
    } else {
        Formula::or(flat)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Token {
    Const(bool),
    Lit(usize, bool),
    End(u8, usize),
}

/// Postfix token sequence; comparing these orders literals by concept index
/// and conjunctions by their leading literal.
fn sort_key(f: &Formula) -> Vec<Token> {
    fn walk(f: &Formula, out: &mut Vec<Token>) {
        if let Some(l) = f.as_literal() {
            out.push(Token::Lit(l.concept.0, l.negated));
            return;
        }
        match f {
            Formula::Const(b) => out.push(Token::Const(*b)),
            Formula::Not(inner) => {
                walk(inner, out);
                out.push(Token::End(2, 1));
            }
            Formula::And(cs) => {
                cs.iter().for_each(|c| walk(c, out));
                out.push(Token::End(0, cs.len()));
            }
            Formula::Or(cs) => {
                cs.iter().for_each(|c| walk(c, out));
                out.push(Token::End(1, cs.len()));
            }
            Formula::Var(_) => unreachable!("variables are literals"),
        }
    }
    let mut out = Vec::new();
    walk(f, &mut out);
    out
}

struct Rendered<'a, S> {
    formula: Formula,
    names: &'a [S],
}

impl<S: AsRef<str>> fmt::Display for Rendered<'_, S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(&self.formula, self.names, f)
    }
}

fn write_formula<S: AsRef<str>>(
    formula: &Formula,
    names: &[S],
    f: &mut fmt::Formatter<'_>,
) -> fmt::Result {
    match formula {
        Formula::Const(true) => f.write_str("True"),
        Formula::Const(false) => f.write_str("False"),
        Formula::Var(c) => match names.get(c.0) {
            Some(n) => f.write_str(n.as_ref()),
            None => write!(f, "c{}", c.0),
        },
        Formula::Not(inner) => {
            f.write_str("~")?;
            write_operand(inner, names, f)
        }
        Formula::And(cs) | Formula::Or(cs) => {
            let sep = if matches!(formula, Formula::And(_)) { " & " } else { " | " };
            for (i, c) in cs.iter().enumerate() {
                if i > 0 {
                    f.write_str(sep)?;
                }
                write_operand(c, names, f)?;
            }
            Ok(())
        }
    }
}

fn write_operand<S: AsRef<str>>(
    formula: &Formula,
    names: &[S],
    f: &mut fmt::Formatter<'_>,
) -> fmt::Result {
    if matches!(formula, Formula::And(_) | Formula::Or(_)) {
        f.write_str("(")?;
        write_formula(formula, names, f)?;
        f.write_str(")")
    } else {
        write_formula(formula, names, f)
    }
}

/// Canonical text of `f` using `names` for concepts.
pub fn format<S: AsRef<str>>(f: &Formula, names: &[S]) -> String {
    f.display(names).to_string()
}

fn check_width(f: &Formula, width: usize) -> Result<(), LogicError> {
    let need = f.min_width();
    if need > width {
        Err(LogicError::ConceptOutOfRange {
            concept: need - 1,
            width,
        })
    } else {
        Ok(())
    }
}

/// Boolean value of `f` under `assignment`.
pub fn evaluate(f: &Formula, assignment: &[bool]) -> Result<bool, LogicError> {
    check_width(f, assignment.len())?;
    Ok(f.eval_unchecked(assignment))
}

/// Truth-table row `bits` over `k` concepts; bit `i` is concept `i`.
pub fn assignment_from_bits(bits: u32, k: usize) -> Vec<bool> {
    (0..k).map(|i| (bits >> i) & 1 == 1).collect()
}

pub fn bits_of(assignment: &[bool]) -> u32 {
    assignment
        .iter()
        .enumerate()
        .fold(0, |acc, (i, &b)| acc | ((b as u32) << i))
}

/// Every satisfying assignment of `f` over `k` concepts, as ascending bit rows.
pub fn minterms_of(f: &Formula, k: usize) -> Result<Vec<u32>, LogicError> {
    check_capacity(k)?;
    check_width(f, k)?;
    let mut a = vec![false; k];
    let mut out = Vec::new();
    for bits in 0..(1u32 << k) {
        for (i, slot) in a.iter_mut().enumerate() {
            *slot = (bits >> i) & 1 == 1;
        }
        if f.eval_unchecked(&a) {
            out.push(bits);
        }
    }
    Ok(out)
}

/// Brute-force equivalence over all `2^k` assignments.
pub fn equivalent(f: &Formula, g: &Formula, k: usize) -> Result<bool, LogicError> {
    check_capacity(k)?;
    check_width(f, k)?;
    check_width(g, k)?;
    let mut a = vec![false; k];
    for bits in 0..(1u32 << k) {
        for (i, slot) in a.iter_mut().enumerate() {
            *slot = (bits >> i) & 1 == 1;
        }
        if f.eval_unchecked(&a) != g.eval_unchecked(&a) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xor() -> Formula {
        Formula::Or(vec![
            Formula::And(vec![Formula::var(0), Formula::not(Formula::var(1))]),
            Formula::And(vec![Formula::not(Formula::var(0)), Formula::var(1)]),
        ])
    }

    #[test]
    fn canonical_order_puts_positive_first() {
        let swapped = Formula::Or(vec![
            Formula::And(vec![Formula::var(1), Formula::not(Formula::var(0))]),
            Formula::And(vec![Formula::not(Formula::var(1)), Formula::var(0)]),
        ]);
        assert_eq!(format(&swapped, &["x1", "x2"]), "(x1 & ~x2) | (~x1 & x2)");
        assert_eq!(format(&Formula::Const(true), &["x1"]), "True");
    }

    #[test]
    fn xor_truth_table() {
        let f = xor();
        assert!(evaluate(&f, &[false, true]).unwrap());
        assert!(!evaluate(&f, &[true, true]).unwrap());
        assert!(!evaluate(&Formula::Const(false), &[true]).unwrap());
        assert_eq!(minterms_of(&f, 2).unwrap(), vec![0b01, 0b10]);
    }

    #[test]
    fn minterms_of_single_variable() {
        // x1 true: rows "10" and "11" written x1-first, i.e. bits 0b01 and 0b11
        assert_eq!(minterms_of(&Formula::var(0), 2).unwrap(), vec![0b01, 0b11]);
        assert!(minterms_of(&Formula::Const(false), 3).unwrap().is_empty());
    }

    #[test]
    fn evaluation_range_and_capacity_errors() {
        assert!(matches!(
            evaluate(&Formula::var(3), &[true, false]),
            Err(LogicError::ConceptOutOfRange { .. })
        ));
        assert!(matches!(
            minterms_of(&Formula::var(0), 21),
            Err(LogicError::Capacity { .. })
        ));
    }

    #[test]
    fn equivalence_examples() {
        let alt = Formula::And(vec![
            Formula::Or(vec![Formula::var(0), Formula::var(1)]),
            Formula::not(Formula::And(vec![Formula::var(0), Formula::var(1)])),
        ]);
        assert!(equivalent(&xor(), &alt, 2).unwrap());
        assert!(!equivalent(&Formula::var(0), &Formula::var(1), 2).unwrap());
    }

    #[test]
    fn dnf_recognition() {
        assert_eq!(xor().as_dnf().unwrap().len(), 2);
        assert_eq!(Formula::Const(true).as_dnf().unwrap(), vec![Minterm::empty()]);
        assert!(Formula::not(xor()).as_dnf().is_none());
        let contradictory = Formula::And(vec![Formula::var(0), Formula::not(Formula::var(0))]);
        assert!(contradictory.as_dnf().is_none());
    }

    #[test]
    fn minterm_rejects_contradiction() {
        assert!(Minterm::new([Literal::pos(2), Literal::neg(2)]).is_err());
        let m = Minterm::new([Literal::neg(1), Literal::pos(0)]).unwrap();
        assert_eq!(m.literals(), &[Literal::pos(0), Literal::neg(1)]);
    }

    #[test]
    fn canonical_flattens_and_unwraps() {
        let f = Formula::And(vec![
            Formula::And(vec![Formula::var(2), Formula::var(0)]),
            Formula::Or(vec![Formula::var(1)]),
        ]);
        assert_eq!(
            f.canonical(),
            Formula::And(vec![Formula::var(0), Formula::var(1), Formula::var(2)])
        );
    }
}
