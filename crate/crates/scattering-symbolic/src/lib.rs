//! Exact rewriting of formal S-matrix words.
//!
//! Letters are `S(g)^{±1}` with `g` a piecewise-linear time profile; causal
//! precedence is strict ordering of supports. The rewrite rules are the
//! causal factorization `S(f+g+h) = S(f+g) S(g)⁻¹ S(g+h)` (f later than h)
//! in both directions, inverse cancellation and unit deletion. Proofs are
//! recorded as replayable traces whose support facts are re-verified.

mod corpus;
mod profile;
mod prove;
mod rules;
mod trace;
mod word;

pub use corpus::{
    causal_factorization_identities, check_cutoff, chi_equivalence_check, chi_equivalence_identity, cocycle_check,
    cocycle_identity, cocycle_word, psi_decomposition, sample_profiles, standard_cocycle_pairs, standard_corpus,
    time_slice_identity, trapezoid_cutoff, Identity, DEFAULT_DEPTH,
};
pub use profile::{causally_later, rational, Interval, Knot, ProfileError, Rational, TimeProfile};
pub use prove::{leftmost_step, normalize, prove_equal, NORMALIZE_BUDGET, SEARCH_STATE_BUDGET};
pub use rules::{check_step, Rule, RuleSet, Step, SupportFact};
pub use trace::{ProofTrace, ReplayError};
pub use word::{Letter, ProfileExpr, SWord};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SymbolicError {
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("normalization exceeded {0} steps")]
    StepBudget(usize),
    #[error("search exhausted after {explored} states at depth {depth}")]
    SearchExhausted { explored: usize, depth: usize },
}
