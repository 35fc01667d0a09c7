use crate::profile::Rational;
use crate::rules::{RuleSet, Step};
use crate::trace::ProofTrace;
use crate::word::{ProfileExpr, SWord};
use crate::SymbolicError;
use std::collections::HashSet;

pub const NORMALIZE_BUDGET: usize = 10_000;
pub const SEARCH_STATE_BUDGET: usize = 20_000;

/// Smallest redex first (unit, then cancel, then merge), leftmost within
/// each kind.
pub fn leftmost_step(word: &SWord, rules: &RuleSet) -> Option<Step> {
    let l = word.letters();
    (0..l.len())
        .find_map(|i| rules.unit_at(l, i))
        .or_else(|| (0..l.len()).find_map(|i| rules.cancel_at(l, i)))
        .or_else(|| (0..l.len()).find_map(|i| rules.merge_at(l, i)))
}

/// Rewrites with unit deletion, cancellation and merges until no rule fires.
/// Every rule shortens the word, so this terminates; the budget guards
/// against a corrupted rule table.
pub fn normalize(word: &SWord, rules: &RuleSet) -> Result<(SWord, ProofTrace), SymbolicError> {
    let mut cur = word.clone();
    let mut steps = Vec::new();
    while let Some(step) = leftmost_step(&cur, rules) {
        if steps.len() >= NORMALIZE_BUDGET {
            return Err(SymbolicError::StepBudget(NORMALIZE_BUDGET));
        }
        cur = ProofTrace::apply(&cur, &step);
        steps.push(step);
    }
    Ok((cur.clone(), ProofTrace { start: word.clone(), steps, end: cur }))
}

/// All single reductions at any position.
fn reductions(word: &SWord, rules: &RuleSet) -> Vec<Step> {
    let l = word.letters();
    (0..l.len())
        .flat_map(|i| [rules.unit_at(l, i), rules.cancel_at(l, i), rules.merge_at(l, i)])
        .flatten()
        .collect()
}

/// Causal splits of every letter, with the middle term drawn from the
/// profiles already in the word and the cut placed in a support gap.
fn splits(word: &SWord, rules: &RuleSet) -> Vec<Step> {
    let l = word.letters();
    let mut pool: Vec<&ProfileExpr> = Vec::new();
    for letter in l {
        if !pool.contains(&&letter.expr) {
            pool.push(&letter.expr);
        }
    }
    let zero = ProfileExpr::zero();
    pool.push(&zero);
    let two = Rational::from_integer(2.into());
    let mut out = Vec::new();
    for (pos, d) in l.iter().enumerate() {
        for b in &pool {
            if *b == &d.expr {
                continue;
            }
            let g = d.expr.sub(b);
            for gap in g.profile().gaps() {
                let tau = (&gap.lo + &gap.hi) / &two;
                let f = ProfileExpr::named(format!("({g})>{tau}"), g.profile().chop_above(&tau));
                let h = ProfileExpr::named(format!("({g})<{tau}"), g.profile().chop_below(&tau));
                if let Some(step) = rules.split_at(l, pos, b, &f, &h) {
                    out.push(step);
                }
            }
        }
    }
    out
}

struct Node {
    word: SWord,
    parent: Option<usize>,
    steps: Vec<Step>,
}

fn collect_steps(arena: &[Node], mut idx: usize) -> Vec<Step> {
    let mut chunks = Vec::new();
    loop {
        chunks.push(arena[idx].steps.clone());
        match arena[idx].parent {
            Some(p) => idx = p,
            None => break,
        }
    }
    chunks.into_iter().rev().flatten().collect()
}

/// Reduces `lhs · rhs⁻¹` to the empty word: normalization first, then a
/// breadth-first search over single rewrites (reductions anywhere and
/// causal splits), each followed by normalization, up to `depth` moves.
pub fn prove_equal(lhs: &SWord, rhs: &SWord, depth: usize, rules: &RuleSet) -> Result<ProofTrace, SymbolicError> {
    let goal = lhs.mul(&rhs.inverse());
    let (root_word, root_trace) = normalize(&goal, rules)?;
    let mut arena = vec![Node { word: root_word.clone(), parent: None, steps: root_trace.steps }];
    let finish = |arena: &[Node], idx: usize| ProofTrace { start: goal.clone(), steps: collect_steps(arena, idx), end: SWord::empty() };
    if root_word.is_empty() {
        return Ok(finish(&arena, 0));
    }
    let mut seen: HashSet<SWord> = HashSet::from([root_word]);
    let mut frontier = vec![0usize];
    for _ in 0..depth {
        let mut next = Vec::new();
        for &idx in &frontier {
            let word = arena[idx].word.clone();
            let mut moves = reductions(&word, rules);
            moves.extend(splits(&word, rules));
            for mv in moves {
                let moved = ProofTrace::apply(&word, &mv);
                let (nf, tr) = normalize(&moved, rules)?;
                if !seen.insert(nf.clone()) {
                    continue;
                }
                let mut steps = vec![mv];
                steps.extend(tr.steps);
                arena.push(Node { word: nf.clone(), parent: Some(idx), steps });
                let id = arena.len() - 1;
                if nf.is_empty() {
                    return Ok(finish(&arena, id));
                }
                if arena.len() > SEARCH_STATE_BUDGET {
                    return Err(SymbolicError::SearchExhausted { explored: arena.len(), depth });
                }
                next.push(id);
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Err(SymbolicError::SearchExhausted { explored: arena.len(), depth })
}

