use crate::profile::{Interval, TimeProfile};
use crate::word::{Letter, ProfileExpr};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    /// `S(X)^e S(X)^-e → 1`
    Cancel,
    /// `1 → S(X)^e S(X)^-e`
    InsertPair,
    /// `S(0)^e → 1`
    DeleteUnit,
    /// `1 → S(0)^e`
    InsertUnit,
    /// `S(A) S(B)⁻¹ S(C) → S(A − B + C)`
    Merge,
    /// `S(C)⁻¹ S(B) S(A)⁻¹ → S(A − B + C)⁻¹`
    MergeInverse,
    /// `S(D) → S(A) S(B)⁻¹ S(C)`
    Split,
    /// `S(D)⁻¹ → S(C)⁻¹ S(B) S(A)⁻¹`
    SplitInverse,
}

impl Rule {
    pub const ALL: [Rule; 8] = [
        Rule::Cancel,
        Rule::InsertPair,
        Rule::DeleteUnit,
        Rule::InsertUnit,
        Rule::Merge,
        Rule::MergeInverse,
        Rule::Split,
        Rule::SplitInverse,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::Cancel => "cancel",
            Rule::InsertPair => "insert-pair",
            Rule::DeleteUnit => "unit",
            Rule::InsertUnit => "insert-unit",
            Rule::Merge => "merge",
            Rule::MergeInverse => "merge-inv",
            Rule::Split => "split",
            Rule::SplitInverse => "split-inv",
        }
    }

    pub fn from_name(name: &str) -> Option<Rule> {
        Rule::ALL.into_iter().find(|r| r.name() == name)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Licensing fact of a factorization step: the support of `f = A − B`
/// lies strictly after the support of `h = C − B`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SupportFact {
    pub later: Option<Interval>,
    pub earlier: Option<Interval>,
}

impl SupportFact {
    pub fn of(f: &TimeProfile, h: &TimeProfile) -> Self {
        Self { later: f.support(), earlier: h.support() }
    }

    pub fn holds(&self) -> bool {
        match (&self.later, &self.earlier) {
            (Some(l), Some(e)) => l.lo > e.hi,
            _ => true,
        }
    }
}

impl fmt::Display for SupportFact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |iv: &Option<Interval>| iv.as_ref().map_or("empty".to_string(), |i| i.to_string());
        write!(f, "{} > {}", show(&self.later), show(&self.earlier))
    }
}

/// One rewrite: `removed` letters at `position` replaced by `inserted`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub rule: Rule,
    pub position: usize,
    pub removed: Vec<Letter>,
    pub inserted: Vec<Letter>,
    pub fact: Option<SupportFact>,
}

/// `(A, B, C)` of a factorization triple, read in the orientation of the rule.
fn triple_parts(t: &[Letter]) -> Option<(&ProfileExpr, &ProfileExpr, &ProfileExpr, bool)> {
    match t {
        [a, b, c] if !a.inverse && b.inverse && !c.inverse => Some((&a.expr, &b.expr, &c.expr, false)),
        [c, b, a] if c.inverse && !b.inverse && a.inverse => Some((&a.expr, &b.expr, &c.expr, true)),
        _ => None,
    }
}

fn factor_fact(a: &ProfileExpr, b: &ProfileExpr, c: &ProfileExpr) -> SupportFact {
    SupportFact::of(&a.profile().sub(b.profile()), &c.profile().sub(b.profile()))
}

fn triple(a: ProfileExpr, b: ProfileExpr, c: ProfileExpr, inverse: bool) -> Vec<Letter> {
    if inverse {
        vec![Letter::new(c, true), Letter::new(b, false), Letter::new(a, true)]
    } else {
        vec![Letter::new(a, false), Letter::new(b, true), Letter::new(c, false)]
    }
}

/// Rule semantics. The corrupted table merges with a wrong sign and is
/// only used as a negative control.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RuleSet {
    corrupt: bool,
}

impl RuleSet {
    pub fn standard() -> Self {
        Self { corrupt: false }
    }

    pub fn corrupted() -> Self {
        Self { corrupt: true }
    }

    pub fn is_corrupted(&self) -> bool {
        self.corrupt
    }

    fn merged(&self, a: &ProfileExpr, b: &ProfileExpr, c: &ProfileExpr) -> ProfileExpr {
        if self.corrupt {
            a.add(b).sub(c)
        } else {
            a.sub(b).add(c)
        }
    }

    pub fn cancel_at(&self, letters: &[Letter], pos: usize) -> Option<Step> {
        let pair = letters.get(pos..pos + 2)?;
        (pair[0].inverse != pair[1].inverse && pair[0].expr == pair[1].expr).then(|| Step {
            rule: Rule::Cancel,
            position: pos,
            removed: pair.to_vec(),
            inserted: Vec::new(),
            fact: None,
        })
    }

    pub fn unit_at(&self, letters: &[Letter], pos: usize) -> Option<Step> {
        let l = letters.get(pos)?;
        l.expr.is_zero().then(|| Step {
            rule: Rule::DeleteUnit,
            position: pos,
            removed: vec![l.clone()],
            inserted: Vec::new(),
            fact: None,
        })
    }

    pub fn merge_at(&self, letters: &[Letter], pos: usize) -> Option<Step> {
        let t = letters.get(pos..pos + 3)?;
        let (a, b, c, inverse) = triple_parts(t)?;
        let fact = factor_fact(a, b, c);
        if !fact.holds() && !self.corrupt {
            return None;
        }
        Some(Step {
            rule: if inverse { Rule::MergeInverse } else { Rule::Merge },
            position: pos,
            removed: t.to_vec(),
            inserted: vec![Letter::new(self.merged(a, b, c), inverse)],
            fact: Some(fact),
        })
    }

    /// Splits the letter at `pos` into a factorization triple with middle
    /// term `b`, if `A = b + f`, `C = b + h` with `f` later than `h`.
    pub fn split_at(&self, letters: &[Letter], pos: usize, b: &ProfileExpr, f: &ProfileExpr, h: &ProfileExpr) -> Option<Step> {
        let d = letters.get(pos)?;
        if d.expr.profile() != &b.profile().add(f.profile()).add(h.profile()) {
            return None;
        }
        let a = b.add(f);
        let c = b.add(h);
        let fact = factor_fact(&a, b, &c);
        if !fact.holds() {
            return None;
        }
        Some(Step {
            rule: if d.inverse { Rule::SplitInverse } else { Rule::Split },
            position: pos,
            removed: vec![d.clone()],
            inserted: triple(a, b.clone(), c, d.inverse),
            fact: Some(fact),
        })
    }

    pub fn insert_pair(&self, pos: usize, x: &ProfileExpr, inverse_first: bool) -> Step {
        Step {
            rule: Rule::InsertPair,
            position: pos,
            removed: Vec::new(),
            inserted: vec![Letter::new(x.clone(), inverse_first), Letter::new(x.clone(), !inverse_first)],
            fact: None,
        }
    }

    pub fn insert_unit(&self, pos: usize, inverse: bool) -> Step {
        Step {
            rule: Rule::InsertUnit,
            position: pos,
            removed: Vec::new(),
            inserted: vec![Letter::new(ProfileExpr::zero(), inverse)],
            fact: None,
        }
    }
}

/// Re-verifies a step against the standard rule semantics, recomputing its
/// support fact from the letters.
pub fn check_step(step: &Step) -> Result<(), String> {
    let (rem, ins) = (&step.removed, &step.inserted);
    let is_pair = |p: &[Letter]| p.len() == 2 && p[0].inverse != p[1].inverse && p[0].expr == p[1].expr;
    let is_unit = |p: &[Letter]| p.len() == 1 && p[0].expr.is_zero();
    let check_triple = |single: &[Letter], three: &[Letter]| -> Result<(), String> {
        let [d] = single else { return Err("expected one letter".into()) };
        let (a, b, c, inverse) = triple_parts(three).ok_or("letters do not form a factorization triple")?;
        if inverse != d.inverse {
            return Err("exponent pattern does not match".into());
        }
        if d.expr.profile() != &a.profile().sub(b.profile()).add(c.profile()) {
            return Err("merged profile is not A − B + C".into());
        }
        let fact = factor_fact(a, b, c);
        if step.fact.as_ref() != Some(&fact) {
            return Err(format!("recorded support fact differs from recomputed {fact}"));
        }
        if !fact.holds() {
            return Err(format!("support fact {fact} fails"));
        }
        Ok(())
    };
    let ok = match step.rule {
        Rule::Cancel => is_pair(rem) && ins.is_empty(),
        Rule::InsertPair => is_pair(ins) && rem.is_empty(),
        Rule::DeleteUnit => is_unit(rem) && ins.is_empty(),
        Rule::InsertUnit => is_unit(ins) && rem.is_empty(),
        Rule::Merge | Rule::MergeInverse => {
            check_triple(ins, rem)?;
            (step.rule == Rule::MergeInverse) == ins[0].inverse
        }
        Rule::Split | Rule::SplitInverse => {
            check_triple(rem, ins)?;
            (step.rule == Rule::SplitInverse) == rem[0].inverse
        }
    };
    if ok {
        Ok(())
    } else {
        Err(format!("letters do not match rule {}", step.rule))
    }
}
