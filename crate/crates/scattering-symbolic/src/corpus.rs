use crate::profile::{rational, Interval, Rational, TimeProfile};
use crate::prove::prove_equal;
use crate::rules::RuleSet;
use crate::trace::ProofTrace;
use crate::word::{ProfileExpr, SWord};
use crate::SymbolicError;
use num_traits::{One, Zero};

/// Search depth used for the built-in identities.
pub const DEFAULT_DEPTH: usize = 2;

#[derive(Debug, Clone)]
pub struct Identity {
    pub name: String,
    pub lhs: SWord,
    pub rhs: SWord,
}

impl Identity {
    pub fn prove(&self, depth: usize, rules: &RuleSet) -> Result<ProofTrace, SymbolicError> {
        prove_equal(&self.lhs, &self.rhs, depth, rules)
    }
}

/// Splits `χ_t − χ` into its future part `ψ⁺ = Θ⁺(χ_t − χ)` and past part
/// `ψ⁻ = Θ⁻(χ_t − χ)`; returns `(ψ⁺, ψ⁻)`.
pub fn psi_decomposition(chi: &TimeProfile, t: &Rational) -> Result<(TimeProfile, TimeProfile), SymbolicError> {
    let d = chi.translate(t).sub(chi);
    if !d.vanishes_near(&Rational::zero()) {
        return Err(SymbolicError::Precondition(format!("χ_t − χ does not vanish near 0 for t = {t}")));
    }
    Ok((d.future_part(), d.past_part()))
}

/// Checks the cutoff requirements: 1 on `[−ε, ε]`, support in `[−2ε, 2ε]`.
pub fn check_cutoff(chi: &TimeProfile, eps: &Rational) -> Result<(), SymbolicError> {
    if eps <= &Rational::zero() {
        return Err(SymbolicError::Precondition(format!("ε must be positive, got {eps}")));
    }
    let two = rational(2, 1);
    if !chi.equals_on(&Interval::new(-eps.clone(), eps.clone()), &Rational::one()) {
        return Err(SymbolicError::Precondition(format!("cutoff is not 1 on [-{eps},{eps}]")));
    }
    match chi.support() {
        Some(s) if s.lo >= -(&two * eps) && s.hi <= &two * eps => Ok(()),
        _ => Err(SymbolicError::Precondition(format!("cutoff support exceeds [-2ε,2ε] for ε = {eps}"))),
    }
}

fn tag(t: &Rational) -> String {
    format!("({t})")
}

/// `U(t) = S_χ(ψ_t⁻)`.
pub fn cocycle_word(chi: &ProfileExpr, chi_name: &str, t: &Rational) -> Result<SWord, SymbolicError> {
    let (_, minus) = psi_decomposition(chi.profile(), t)?;
    let psi = ProfileExpr::named(format!("psi[{chi_name}]-{}", tag(t)), minus);
    Ok(SWord::relative(chi, &psi))
}

/// `U(t+s) = U(t) α_t(U(s))` for the cutoff `χ(ε)`.
pub fn cocycle_identity(t: &Rational, s: &Rational, eps: &Rational) -> Result<Identity, SymbolicError> {
    let chi = ProfileExpr::named("chi", TimeProfile::cutoff(eps)?);
    let lhs = cocycle_word(&chi, "chi", &(t + s))?;
    let rhs = cocycle_word(&chi, "chi", t)?.mul(&cocycle_word(&chi, "chi", s)?.translate(t));
    Ok(Identity { name: format!("cocycle t={t} s={s}"), lhs, rhs })
}

pub fn cocycle_check(t: &Rational, s: &Rational, eps: &Rational, rules: &RuleSet) -> Result<ProofTrace, SymbolicError> {
    cocycle_identity(t, s, eps)?.prove(DEFAULT_DEPTH, rules)
}

/// `U^{χ'}(t) = V⁻¹ U^χ(t) α_t(V)` with `V = S_χ(σ⁻)`, `σ⁻ = Θ⁻(χ' − χ)`.
pub fn chi_equivalence_identity(
    chi: &TimeProfile,
    chi_prime: &TimeProfile,
    t: &Rational,
    eps: &Rational,
) -> Result<Identity, SymbolicError> {
    check_cutoff(chi, eps)?;
    check_cutoff(chi_prime, eps)?;
    let c = ProfileExpr::named("chi", chi.clone());
    let cp = ProfileExpr::named("chi'", chi_prime.clone());
    let sigma = ProfileExpr::named("sigma-", chi_prime.sub(chi).past_part());
    let v = SWord::relative(&c, &sigma);
    let lhs = cocycle_word(&cp, "chi'", t)?;
    let rhs = SWord::product([&v.inverse(), &cocycle_word(&c, "chi", t)?, &v.translate(t)]);
    Ok(Identity { name: format!("cutoff equivalence t={t}"), lhs, rhs })
}

pub fn chi_equivalence_check(
    chi: &TimeProfile,
    chi_prime: &TimeProfile,
    t: &Rational,
    eps: &Rational,
    rules: &RuleSet,
) -> Result<ProofTrace, SymbolicError> {
    chi_equivalence_identity(chi, chi_prime, t, eps)?.prove(DEFAULT_DEPTH, rules)
}

/// Test profiles `f` later than `h`, with `g` overlapping both.
pub fn sample_profiles() -> (ProfileExpr, ProfileExpr, ProfileExpr) {
    let f = TimeProfile::tent(rational(2, 1), rational(5, 2), rational(3, 1), rational(1, 1)).unwrap();
    let g = TimeProfile::trapezoid(rational(-1, 1), rational(0, 1), rational(3, 1), rational(4, 1)).unwrap();
    let h = TimeProfile::tent(rational(0, 1), rational(1, 2), rational(1, 1), rational(2, 1)).unwrap();
    (ProfileExpr::named("f", f), ProfileExpr::named("g", g), ProfileExpr::named("h", h))
}

/// Causal factorization and its three relative-S-matrix forms, for `f`
/// later than `h`.
pub fn causal_factorization_identities() -> Vec<Identity> {
    let (f, g, h) = sample_profiles();
    let s = SWord::s;
    let rel = SWord::relative;
    vec![
        Identity {
            name: "causal factorization".into(),
            lhs: s(&f.add(&g).add(&h)),
            rhs: SWord::product([&s(&f.add(&g)), &SWord::s_inv(&g), &s(&g.add(&h))]),
        },
        Identity { name: "relative product".into(), lhs: rel(&g, &f.add(&h)), rhs: rel(&g, &f).mul(&rel(&g, &h)) },
        Identity { name: "future independence".into(), lhs: rel(&g.add(&f), &h), rhs: rel(&g, &h) },
        Identity {
            name: "past conjugation".into(),
            lhs: rel(&g.add(&h), &f),
            rhs: SWord::product([&rel(&g, &h).inverse(), &rel(&g, &f), &rel(&g, &h)]),
        },
    ]
}

/// `S_G(f) = S_χ(χ₋)⁻¹ S_χ(f) S_χ(χ₋)` for `f` inside the slice `(−ε, ε)`,
/// with `G = χ₋ + χ + χ₊` equal to 1 on a neighbourhood of the slice.
pub fn time_slice_identity(eps: &Rational) -> Result<Identity, SymbolicError> {
    let chi_p = TimeProfile::cutoff(eps)?;
    let four = rational(4, 1);
    let three = rational(3, 1);
    let g_p = TimeProfile::trapezoid(-(&four * eps), -(&three * eps), &three * eps, &four * eps)?;
    let rest = g_p.sub(&chi_p);
    let half = eps / rational(2, 1);
    let f = ProfileExpr::named("f", TimeProfile::tent(-half.clone(), Rational::zero(), half, Rational::one())?);
    let chi = ProfileExpr::named("chi", chi_p);
    let chi_minus = ProfileExpr::named("chi-", rest.past_part());
    let chi_plus = ProfileExpr::named("chi+", rest.future_part());
    let g = chi_minus.add(&chi).add(&chi_plus);
    let v = SWord::relative(&chi, &chi_minus);
    Ok(Identity {
        name: "time-slice factorization".into(),
        lhs: SWord::relative(&g, &f),
        rhs: SWord::product([&v.inverse(), &SWord::relative(&chi, &f), &v]),
    })
}

/// Trapezoid cutoff with inner plateau `[−ε, ε]` and outer breakpoints `±outer`.
pub fn trapezoid_cutoff(eps: &Rational, outer: &Rational) -> Result<TimeProfile, SymbolicError> {
    Ok(TimeProfile::trapezoid(-outer.clone(), -eps.clone(), eps.clone(), outer.clone())?)
}

/// `(t, s)` pairs exercised by the standard corpus.
pub fn standard_cocycle_pairs() -> Vec<(Rational, Rational)> {
    vec![(rational(1, 4), rational(1, 4)), (rational(1, 4), rational(-1, 8)), (rational(1, 3), rational(1, 6))]
}

/// Every built-in identity at `ε`.
pub fn standard_corpus(eps: &Rational) -> Result<Vec<Identity>, SymbolicError> {
    let mut out = causal_factorization_identities();
    out.push(time_slice_identity(eps)?);
    for (t, s) in standard_cocycle_pairs() {
        out.push(cocycle_identity(&(&t * eps), &(&s * eps), eps)?);
    }
    let chi = TimeProfile::cutoff(eps)?;
    let chi_prime = trapezoid_cutoff(eps, &(eps * rational(3, 2)))?;
    let t = eps * rational(1, 4);
    out.push(chi_equivalence_identity(&chi, &chi_prime, &t, eps)?);
    let mut swapped = chi_equivalence_identity(&chi_prime, &chi, &t, eps)?;
    swapped.name = format!("{} swapped", swapped.name);
    out.push(swapped);
    Ok(out)
}

