//! Quine–McCluskey two-level minimization.
//!
//! Prime implicants come from repeated pairwise merging of cubes that differ in
//! one bound variable. The cover is built from essential primes first and then
//! greedily by how many still-uncovered on-set rows a prime covers (ties: fewer
//! literals, then lexicographic minterm order).

use std::collections::{BTreeSet, HashSet};

use super::{check_capacity, Formula, Literal, LogicError, Minterm};

/// A cube over `k` variables: `mask` bits are free, the rest must equal `value`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Implicant {
    pub value: u32,
    pub mask: u32,
}

impl Implicant {
    pub fn covers(&self, row: u32) -> bool {
        row & !self.mask == self.value
    }

    pub fn literal_count(&self, k: usize) -> usize {
        k - self.mask.count_ones() as usize
    }

    pub fn to_minterm(&self, k: usize) -> Minterm {
        let lits = (0..k).filter(|i| self.mask >> i & 1 == 0).map(|i| {
            if self.value >> i & 1 == 1 {
                Literal::pos(i)
            } else {
                Literal::neg(i)
            }
        });
        Minterm::new(lits).expect("one literal per variable")
    }
}

fn validate(on_set: &[u32], dont_care: &[u32], k: usize) -> Result<(), LogicError> {
    check_capacity(k)?;
    let limit = 1u64 << k;
    if let Some(&row) = on_set.iter().chain(dont_care).find(|&&r| u64::from(r) >= limit) {
        return Err(LogicError::Domain(format!(
            "row {row:#b} does not fit in {k} variables"
        )));
    }
    let on: HashSet<u32> = on_set.iter().copied().collect();
    if let Some(&row) = dont_care.iter().find(|r| on.contains(r)) {
        return Err(LogicError::Domain(format!(
            "row {row:#b} is both in the on-set and the don't-care set"
        )));
    }
    Ok(())
}

/// All prime implicants of `on_set ∪ dont_care`, sorted.
pub fn prime_implicants(on_set: &[u32], dont_care: &[u32], k: usize) -> Result<Vec<Implicant>, LogicError> {
    validate(on_set, dont_care, k)?;
    let mut level: BTreeSet<Implicant> = on_set
        .iter()
        .chain(dont_care)
        .map(|&value| Implicant { value, mask: 0 })
        .collect();
    let mut primes = BTreeSet::new();
    while !level.is_empty() {
        let present: HashSet<Implicant> = level.iter().copied().collect();
        let mut merged_away: HashSet<Implicant> = HashSet::new();
        let mut next = BTreeSet::new();
        for imp in &level {
            for bit in (0..k).map(|i| 1u32 << i) {
                if imp.mask & bit != 0 || imp.value & bit != 0 {
                    continue;
                }
                let partner = Implicant {
                    value: imp.value | bit,
                    mask: imp.mask,
                };
                if present.contains(&partner) {
                    merged_away.insert(*imp);
                    merged_away.insert(partner);
                    next.insert(Implicant {
                        value: imp.value,
                        mask: imp.mask | bit,
                    });
                }
            }
        }
        primes.extend(level.iter().filter(|i| !merged_away.contains(i)).copied());
        level = next;
    }
    Ok(primes.into_iter().collect())
}

/// Minimal-ish cover of the on-set as a list of minterms in canonical order.
pub fn minimize(on_set: &[u32], dont_care: &[u32], k: usize) -> Result<Vec<Minterm>, LogicError> {
    let primes = prime_implicants(on_set, dont_care, k)?;
    let on: Vec<u32> = on_set.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let covers: Vec<Vec<usize>> = primes
        .iter()
        .map(|p| (0..on.len()).filter(|&r| p.covers(on[r])).collect())
        .collect();
    let mut covered = vec![false; on.len()];
    let mut chosen: BTreeSet<usize> = BTreeSet::new();

    for r in 0..on.len() {
        let mut owners = (0..primes.len()).filter(|&p| covers[p].contains(&r));
        if let (Some(only), None) = (owners.next(), owners.next()) {
            chosen.insert(only);
        }
    }
    for &p in &chosen {
        for &r in &covers[p] {
            covered[r] = true;
        }
    }

    let minterms: Vec<Minterm> = primes.iter().map(|p| p.to_minterm(k)).collect();
    while covered.iter().any(|c| !c) {
        let best = (0..primes.len())
            .filter(|p| !chosen.contains(p))
            .map(|p| (p, covers[p].iter().filter(|&&r| !covered[r]).count()))
            .filter(|&(_, gain)| gain > 0)
            .min_by(|&(a, ga), &(b, gb)| {
                gb.cmp(&ga)
                    .then(primes[a].literal_count(k).cmp(&primes[b].literal_count(k)))
                    .then(minterms[a].cmp(&minterms[b]))
            })
            .map(|(p, _)| p)
            .expect("every on-set row is covered by some prime");
        chosen.insert(best);
        for &r in &covers[best] {
            covered[r] = true;
        }
    }

    let mut out: Vec<Minterm> = chosen.into_iter().map(|p| minterms[p].clone()).collect();
    out.sort();
    Ok(out)
}

/// Minimized DNF of the function with the given on-set and don't-cares.
pub fn quine_mccluskey(on_set: &[u32], dont_care: &[u32], k: usize) -> Result<Formula, LogicError> {
    Ok(Formula::from_minterms(&minimize(on_set, dont_care, k)?))
}
