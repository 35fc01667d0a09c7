use crate::rules::{check_step, Step};
use crate::word::SWord;
use std::fmt::Write;

/// Sequence of rewrites from `start` to `end`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofTrace {
    pub start: SWord,
    pub steps: Vec<Step>,
    pub end: SWord,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("replay failed at step {step}: {reason}")]
pub struct ReplayError {
    pub step: usize,
    pub reason: String,
}

impl ProofTrace {
    pub fn trivial(word: SWord) -> Self {
        Self { start: word.clone(), steps: Vec::new(), end: word }
    }

    pub fn apply(word: &SWord, step: &Step) -> SWord {
        word.splice(step.position, step.removed.len(), &step.inserted)
    }

    /// Replays every step, re-verifying rule instances and support facts.
    pub fn replay(&self) -> Result<SWord, ReplayError> {
        let mut word = self.start.clone();
        for (i, step) in self.steps.iter().enumerate() {
            let err = |reason: String| ReplayError { step: i + 1, reason };
            let span = word
                .letters()
                .get(step.position..step.position + step.removed.len())
                .ok_or_else(|| err("span out of range".into()))?;
            if span != step.removed.as_slice() {
                return Err(err("removed letters do not match the word".into()));
            }
            check_step(step).map_err(err)?;
            word = Self::apply(&word, step);
        }
        if word != self.end {
            return Err(ReplayError { step: self.steps.len(), reason: "final word differs from recorded end".into() });
        }
        Ok(word)
    }

    pub fn support_facts_checked(&self) -> usize {
        self.steps.iter().filter(|s| s.fact.is_some()).count()
    }

    /// Line-oriented text form.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "start {}", self.start);
        for (i, s) in self.steps.iter().enumerate() {
            let span = format!("{}..{}", s.position, s.position + s.removed.len());
            let _ = write!(out, "step {} {} {}", i + 1, s.rule, span);
            if let Some(f) = &s.fact {
                let _ = write!(out, " | {f}");
            }
            let ins: Vec<String> = s.inserted.iter().map(|l| l.to_string()).collect();
            let _ = writeln!(out, " | {}", if ins.is_empty() { "1".into() } else { ins.join(" ") });
        }
        let _ = writeln!(out, "end {}", self.end);
        out
    }
}
