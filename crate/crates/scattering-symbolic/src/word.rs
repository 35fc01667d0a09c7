use crate::profile::{Rational, TimeProfile};
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};

/// Formal rational combination of named, possibly translated profiles,
/// carried together with the profile it resolves to. Comparison uses the
/// resolved profile only; the formal part is for display.
#[derive(Debug, Clone)]
pub struct ProfileExpr {
    terms: BTreeMap<(String, Rational), Rational>,
    profile: TimeProfile,
}

impl ProfileExpr {
    pub fn zero() -> Self {
        Self { terms: BTreeMap::new(), profile: TimeProfile::zero() }
    }

    pub fn named(name: impl Into<String>, profile: TimeProfile) -> Self {
        let mut terms = BTreeMap::new();
        if !profile.is_zero() {
            terms.insert((name.into(), Rational::zero()), Rational::one());
        }
        Self { terms, profile }
    }

    pub fn profile(&self) -> &TimeProfile {
        &self.profile
    }

    pub fn is_zero(&self) -> bool {
        self.profile.is_zero()
    }

    fn combine(&self, other: &Self, sign: &Rational) -> Self {
        let mut terms = self.terms.clone();
        for (k, c) in &other.terms {
            let e = terms.entry(k.clone()).or_insert_with(Rational::zero);
            *e += c * sign;
            if e.is_zero() {
                terms.remove(k);
            }
        }
        let profile = if sign.is_positive() {
            self.profile.add(&other.profile)
        } else {
            self.profile.sub(&other.profile)
        };
        Self { terms, profile }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, &Rational::one())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, &-Rational::one())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
            profile: self.profile.scale(c),
        }
    }

    /// Time translation by `s`, applied to every constituent.
    pub fn translate(&self, s: &Rational) -> Self {
        Self {
            terms: self.terms.iter().map(|((n, sh), c)| ((n.clone(), sh + s), c.clone())).collect(),
            profile: self.profile.translate(s),
        }
    }
}

impl PartialEq for ProfileExpr {
    fn eq(&self, other: &Self) -> bool {
        self.profile == other.profile
    }
}

impl Eq for ProfileExpr {}

impl Hash for ProfileExpr {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.profile.hash(state);
    }
}

impl fmt::Display for ProfileExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, ((name, shift), c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let a = c.abs();
            if !a.is_one() {
                write!(f, "{a}*")?;
            }
            write!(f, "{name}")?;
            if !shift.is_zero() {
                write!(f, "@{shift}")?;
            }
        }
        Ok(())
    }
}

/// `S(expr)` or `S(expr)⁻¹`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Letter {
    pub expr: ProfileExpr,
    pub inverse: bool,
}

impl Letter {
    pub fn new(expr: ProfileExpr, inverse: bool) -> Self {
        Self { expr, inverse }
    }

    pub fn inverted(&self) -> Self {
        Self { expr: self.expr.clone(), inverse: !self.inverse }
    }

    pub fn profile(&self) -> &TimeProfile {
        self.expr.profile()
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S({})", self.expr)?;
        if self.inverse {
            write!(f, "^-1")?;
        }
        Ok(())
    }
}

/// Formal product of S-matrix letters; the empty word is the identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct SWord {
    letters: Vec<Letter>,
}

impl SWord {
    pub fn empty() -> Self {
        Self { letters: Vec::new() }
    }

    pub fn from_letters(letters: Vec<Letter>) -> Self {
        Self { letters }
    }

    /// `S(g)`.
    pub fn s(g: &ProfileExpr) -> Self {
        Self { letters: vec![Letter::new(g.clone(), false)] }
    }

    /// `S(g)⁻¹`.
    pub fn s_inv(g: &ProfileExpr) -> Self {
        Self { letters: vec![Letter::new(g.clone(), true)] }
    }

    /// Relative S-matrix `S_g(f) = S(g)⁻¹ S(g + f)`.
    pub fn relative(g: &ProfileExpr, f: &ProfileExpr) -> Self {
        Self::s_inv(g).mul(&Self::s(&g.add(f)))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut letters = self.letters.clone();
        letters.extend(other.letters.iter().cloned());
        Self { letters }
    }

    pub fn product<'a>(words: impl IntoIterator<Item = &'a SWord>) -> Self {
        words.into_iter().fold(Self::empty(), |acc, w| acc.mul(w))
    }

    pub fn inverse(&self) -> Self {
        Self { letters: self.letters.iter().rev().map(Letter::inverted).collect() }
    }

    /// Free time evolution `α_t`: translates every profile by `t`.
    pub fn translate(&self, t: &Rational) -> Self {
        Self {
            letters: self.letters.iter().map(|l| Letter::new(l.expr.translate(t), l.inverse)).collect(),
        }
    }

    /// Replaces `len` letters at `pos` with `with`.
    pub fn splice(&self, pos: usize, len: usize, with: &[Letter]) -> Self {
        let mut letters = self.letters[..pos].to_vec();
        letters.extend(with.iter().cloned());
        letters.extend(self.letters[pos + len..].iter().cloned());
        Self { letters }
    }
}

impl fmt::Display for SWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}
