use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::fmt;

pub type Rational = BigRational;

pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Closed interval `[lo, hi]` with rational endpoints.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        Self { lo, hi }
    }

    pub fn contains(&self, t: &Rational) -> bool {
        &self.lo <= t && t <= &self.hi
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.lo, self.hi)
    }
}

/// Breakpoint with one-sided limits; a jump when `left != right`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Knot {
    pub t: Rational,
    pub left: Rational,
    pub right: Rational,
}

/// Compactly supported piecewise-linear function of time with rational
/// breakpoints and values, kept in a canonical minimal form so that
/// structural equality is functional equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct TimeProfile {
    knots: Vec<Knot>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid profile: {0}")]
pub struct ProfileError(pub String);

impl TimeProfile {
    pub fn zero() -> Self {
        Self { knots: Vec::new() }
    }

    /// Knots must be strictly increasing in time, start from 0 on the left
    /// and return to 0 on the right.
    pub fn from_knots(knots: Vec<Knot>) -> Result<Self, ProfileError> {
        if knots.windows(2).any(|w| w[0].t >= w[1].t) {
            return Err(ProfileError("knot times must be strictly increasing".into()));
        }
        if let (Some(first), Some(last)) = (knots.first(), knots.last()) {
            if !first.left.is_zero() || !last.right.is_zero() {
                return Err(ProfileError("profile must vanish outside its knots".into()));
            }
        }
        Ok(Self::canonical(knots))
    }

    /// Continuous profile through `(t, value)` points, zero outside; nonzero
    /// end values become jumps.
    pub fn continuous(points: &[(Rational, Rational)]) -> Result<Self, ProfileError> {
        let n = points.len();
        let knots = points
            .iter()
            .enumerate()
            .map(|(i, (t, v))| Knot {
                t: t.clone(),
                left: if i == 0 { Rational::zero() } else { v.clone() },
                right: if i + 1 == n { Rational::zero() } else { v.clone() },
            })
            .collect();
        Self::from_knots(knots)
    }

    /// 0 outside `(a, d)`, 1 on `[b, c]`, linear in between.
    pub fn trapezoid(a: Rational, b: Rational, c: Rational, d: Rational) -> Result<Self, ProfileError> {
        if !(a < b && b <= c && c < d) {
            return Err(ProfileError(format!("trapezoid needs a < b <= c < d, got {a},{b},{c},{d}")));
        }
        Self::continuous(&[(a, Rational::zero()), (b, Rational::one()), (c, Rational::one()), (d, Rational::zero())])
    }

    /// Canonical cutoff: 0 outside `(−2ε, 2ε)`, 1 on `[−ε, ε]`.
    pub fn cutoff(eps: &Rational) -> Result<Self, ProfileError> {
        if eps <= &Rational::zero() {
            return Err(ProfileError(format!("ε must be positive, got {eps}")));
        }
        let two = Rational::from_integer(2.into());
        Self::trapezoid(-(&two * eps), -eps.clone(), eps.clone(), &two * eps)
    }

    /// Tent of height `height` rising on `[a, peak]` and falling on `[peak, b]`.
    pub fn tent(a: Rational, peak: Rational, b: Rational, height: Rational) -> Result<Self, ProfileError> {
        if !(a < peak && peak < b) {
            return Err(ProfileError(format!("tent needs a < peak < b, got {a},{peak},{b}")));
        }
        Self::continuous(&[(a, Rational::zero()), (peak, height), (b, Rational::zero())])
    }

    pub fn knots(&self) -> &[Knot] {
        &self.knots
    }

    pub fn is_zero(&self) -> bool {
        self.knots.is_empty()
    }

    fn canonical(mut knots: Vec<Knot>) -> Self {
        loop {
            let n = knots.len();
            let mut drop = None;
            for k in 0..n {
                let kn = &knots[k];
                if kn.left != kn.right {
                    continue;
                }
                let left_slope = if k == 0 {
                    Rational::zero()
                } else {
                    (&kn.left - &knots[k - 1].right) / (&kn.t - &knots[k - 1].t)
                };
                let right_slope = if k + 1 == n {
                    Rational::zero()
                } else {
                    (&knots[k + 1].left - &kn.right) / (&knots[k + 1].t - &kn.t)
                };
                let outside_ok = (k > 0 || kn.left.is_zero()) && (k + 1 < n || kn.right.is_zero());
                if left_slope == right_slope && outside_ok {
                    drop = Some(k);
                    break;
                }
            }
            match drop {
                Some(k) => {
                    knots.remove(k);
                }
                None => break,
            }
        }
        Self { knots }
    }

    /// One-sided limits `(f(t−), f(t+))`.
    pub fn limits(&self, t: &Rational) -> (Rational, Rational) {
        let k = self.knots.partition_point(|kn| &kn.t < t);
        if let Some(kn) = self.knots.get(k) {
            if &kn.t == t {
                return (kn.left.clone(), kn.right.clone());
            }
        }
        if k == 0 || k == self.knots.len() {
            return (Rational::zero(), Rational::zero());
        }
        let (a, b) = (&self.knots[k - 1], &self.knots[k]);
        let v = &a.right + (&b.left - &a.right) * (t - &a.t) / (&b.t - &a.t);
        (v.clone(), v)
    }

    fn combine(&self, other: &Self, op: impl Fn(&Rational, &Rational) -> Rational) -> Self {
        let mut times: Vec<Rational> = self.knots.iter().chain(&other.knots).map(|k| k.t.clone()).collect();
        times.sort();
        times.dedup();
        let knots = times
            .into_iter()
            .map(|t| {
                let (l1, r1) = self.limits(&t);
                let (l2, r2) = other.limits(&t);
                Knot { left: op(&l1, &l2), right: op(&r1, &r2), t }
            })
            .collect();
        Self::canonical(knots)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a - b)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            knots: self.knots.iter().map(|k| Knot { t: k.t.clone(), left: &k.left * c, right: &k.right * c }).collect(),
        }
    }

    /// `p_s(t) = p(t − s)`.
    pub fn translate(&self, s: &Rational) -> Self {
        Self {
            knots: self.knots.iter().map(|k| Knot { t: &k.t + s, left: k.left.clone(), right: k.right.clone() }).collect(),
        }
    }

    /// Restriction to `t < tau`.
    pub fn chop_below(&self, tau: &Rational) -> Self {
        let (left, _) = self.limits(tau);
        let mut knots: Vec<Knot> = self.knots.iter().filter(|k| &k.t < tau).cloned().collect();
        knots.push(Knot { t: tau.clone(), left, right: Rational::zero() });
        Self::canonical(knots)
    }

    /// Restriction to `t > tau`.
    pub fn chop_above(&self, tau: &Rational) -> Self {
        let (_, right) = self.limits(tau);
        let mut knots = vec![Knot { t: tau.clone(), left: Rational::zero(), right }];
        knots.extend(self.knots.iter().filter(|k| &k.t > tau).cloned());
        Self::canonical(knots)
    }

    /// Θ⁻ chop at the origin.
    pub fn past_part(&self) -> Self {
        self.chop_below(&Rational::zero())
    }

    /// Θ⁺ chop at the origin.
    pub fn future_part(&self) -> Self {
        self.chop_above(&Rational::zero())
    }

    /// Minimal closed interval outside which the profile vanishes.
    pub fn support(&self) -> Option<Interval> {
        Some(Interval::new(self.knots.first()?.t.clone(), self.knots.last()?.t.clone()))
    }

    /// Connected components of the closed support, in time order.
    pub fn components(&self) -> Vec<Interval> {
        let mut out = Vec::new();
        let mut start: Option<&Rational> = None;
        for w in self.knots.windows(2) {
            let nonzero = !(w[0].right.is_zero() && w[1].left.is_zero());
            match (nonzero, start) {
                (true, None) => start = Some(&w[0].t),
                (false, Some(s)) => {
                    out.push(Interval::new(s.clone(), w[0].t.clone()));
                    start = None;
                }
                _ => {}
            }
        }
        if let (Some(s), Some(last)) = (start, self.knots.last()) {
            out.push(Interval::new(s.clone(), last.t.clone()));
        }
        out
    }

    /// Open intervals between consecutive support components.
    pub fn gaps(&self) -> Vec<Interval> {
        self.components().windows(2).map(|w| Interval::new(w[0].hi.clone(), w[1].lo.clone())).collect()
    }

    /// True if the profile vanishes on a neighbourhood of `t`.
    pub fn vanishes_near(&self, t: &Rational) -> bool {
        self.components().iter().all(|c| !c.contains(t))
    }

    /// True if the profile equals `value` on the closed interval.
    pub fn equals_on(&self, iv: &Interval, value: &Rational) -> bool {
        let (_, at_lo) = self.limits(&iv.lo);
        let (at_hi, _) = self.limits(&iv.hi);
        &at_lo == value
            && &at_hi == value
            && self.knots.iter().filter(|k| iv.lo < k.t && k.t < iv.hi).all(|k| &k.left == value && &k.right == value)
    }
}

/// Strict time ordering: `inf supp f > sup supp h`; vacuous if either is zero.
pub fn causally_later(f: &TimeProfile, h: &TimeProfile) -> bool {
    match (f.support(), h.support()) {
        (Some(sf), Some(sh)) => sf.lo > sh.hi,
        _ => true,
    }
}

impl fmt::Display for TimeProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "pl{{")?;
        for (i, k) in self.knots.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            if k.left == k.right {
                write!(f, "{}:{}", k.t, k.left)?;
            } else {
                write!(f, "{}:{}|{}", k.t, k.left, k.right)?;
            }
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        rational(n, d)
    }

    #[test]
    fn cutoff_support() {
        let chi = TimeProfile::cutoff(&r(1, 1)).unwrap();
        assert_eq!(chi.support(), Some(Interval::new(r(-2, 1), r(2, 1))));
        assert!(chi.equals_on(&Interval::new(r(-1, 1), r(1, 1)), &r(1, 1)));
        assert_eq!(chi.limits(&r(3, 2)), (r(1, 2), r(1, 2)));
        assert_eq!(TimeProfile::zero().support(), None);
    }

    #[test]
    fn shifted_difference_has_gap() {
        let chi = TimeProfile::cutoff(&r(1, 1)).unwrap();
        let d = chi.translate(&r(1, 2)).sub(&chi);
        let comps = d.components();
        assert_eq!(comps, vec![Interval::new(r(-2, 1), r(-1, 2)), Interval::new(r(1, 1), r(5, 2))]);
        assert_eq!(d.gaps(), vec![Interval::new(r(-1, 2), r(1, 1))]);
        assert!(d.vanishes_near(&r(0, 1)));
    }

    #[test]
    fn arithmetic_is_canonical() {
        let a = TimeProfile::tent(r(0, 1), r(1, 1), r(2, 1), r(1, 1)).unwrap();
        let b = TimeProfile::tent(r(1, 1), r(2, 1), r(3, 1), r(1, 1)).unwrap();
        assert_eq!(a.add(&b).sub(&b), a);
        assert!(a.sub(&a).is_zero());
        assert_eq!(a.scale(&r(0, 1)), TimeProfile::zero());
        let sum = a.add(&b);
        assert!(sum.equals_on(&Interval::new(r(1, 1), r(2, 1)), &r(1, 1)));
        assert_eq!(sum.chop_below(&r(1, 1)).add(&sum.chop_above(&r(1, 1))), sum);
    }

    #[test]
    fn jumps_survive_chops() {
        let a = TimeProfile::tent(r(-1, 1), r(0, 1), r(1, 1), r(2, 1)).unwrap();
        let past = a.past_part();
        assert_eq!(past.limits(&r(0, 1)), (r(2, 1), r(0, 1)));
        assert_eq!(past.support(), Some(Interval::new(r(-1, 1), r(0, 1))));
    }

    #[test]
    fn ordering() {
        let f = TimeProfile::tent(r(2, 1), r(5, 2), r(3, 1), r(1, 1)).unwrap();
        let h = TimeProfile::tent(r(0, 1), r(1, 2), r(1, 1), r(1, 1)).unwrap();
        assert!(causally_later(&f, &h));
        assert!(!causally_later(&h, &f));
        assert!(!causally_later(&h, &h));
        assert!(causally_later(&TimeProfile::zero(), &h));
    }
}
