//! Globally adaptive Gauss–Legendre quadrature on panelled intervals.

use crate::PropagatorError;
use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

/// Tolerances and subdivision budget shared by all quadratures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-12, abs_tol: 1e-16, max_subdivisions: 200_000 }
    }
}

impl QuadratureConfig {
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn validate(&self) -> Result<(), PropagatorError> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) || self.max_subdivisions == 0 {
            return Err(PropagatorError::Domain(format!("invalid quadrature config {self:?}")));
        }
        Ok(())
    }
}

/// Integral value with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
    pub evaluations: usize,
}

struct Rules {
    low: Vec<(f64, f64)>,
    high: Vec<(f64, f64)>,
}

fn rules() -> &'static Rules {
    static RULES: OnceLock<Rules> = OnceLock::new();
    RULES.get_or_init(|| {
        let pairs = |n: usize| -> Vec<(f64, f64)> {
            GaussLegendre::new(n.try_into().expect("nonzero degree"))
                .as_node_weight_pairs()
                .to_vec()
        };
        Rules { low: pairs(8), high: pairs(16) }
    })
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
    magnitude: f64,
}

impl Panel {
    fn roundoff(&self) -> f64 {
        64.0 * f64::EPSILON * self.magnitude
    }
}

struct Ranked(Panel);

impl PartialEq for Ranked {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Ranked {}
impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Ranked {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .error
            .total_cmp(&other.0.error)
            .then_with(|| other.0.a.total_cmp(&self.0.a))
    }
}

fn evaluate<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Panel {
    let r = rules();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut high = Complex64::new(0.0, 0.0);
    let mut magnitude = 0.0;
    for &(x, w) in &r.high {
        let v = f(mid + half * x);
        high += v * w;
        magnitude += v.norm() * w;
    }
    let mut low = Complex64::new(0.0, 0.0);
    for &(x, w) in &r.low {
        low += f(mid + half * x) * w;
    }
    Panel {
        a,
        b,
        value: high * half,
        error: ((high - low) * half).norm(),
        magnitude: magnitude * half.abs(),
    }
}

const EVALS_PER_PANEL: usize = 24;

/// Integrates `f` over `[breakpoints[0], breakpoints[last]]`, starting from
/// the given panels and bisecting the worst panel until the global error
/// estimate meets the tolerance or every panel sits at its roundoff floor.
pub fn integrate<F>(f: F, breakpoints: &[f64], cfg: &QuadratureConfig) -> Result<Estimate<Complex64>, PropagatorError>
where
    F: Fn(f64) -> Complex64,
{
    cfg.validate()?;
    if breakpoints.len() < 2 {
        return Ok(Estimate { value: Complex64::new(0.0, 0.0), error: 0.0, evaluations: 0 });
    }
    let mut heap = BinaryHeap::new();
    let mut settled: Vec<Panel> = Vec::new();
    let mut evaluations = 0;
    for w in breakpoints.windows(2) {
        if w[1] > w[0] {
            heap.push(Ranked(evaluate(&f, w[0], w[1])));
            evaluations += EVALS_PER_PANEL;
        }
    }
    let (mut value, mut error, mut floor) = totals(heap.iter().map(|r| &r.0));
    let mut subdivisions = 0;
    let mut iterations = 0usize;
    loop {
        iterations += 1;
        if iterations % 4096 == 0 {
            (value, error, floor) = totals(heap.iter().map(|r| &r.0).chain(settled.iter()));
        }
        let target = cfg.abs_tol.max(cfg.rel_tol * value.norm());
        if error <= target {
            break;
        }
        let Some(Ranked(worst)) = heap.pop() else {
            if error <= target.max(floor) {
                break;
            }
            return Err(PropagatorError::Quadrature { achieved: error, requested: target });
        };
        if worst.error <= worst.roundoff() || worst.b - worst.a <= 1e-12 * worst.a.abs().max(1.0) {
            settled.push(worst);
            continue;
        }
        if subdivisions >= cfg.max_subdivisions {
            if error <= target.max(floor) {
                heap.push(Ranked(worst));
                break;
            }
            return Err(PropagatorError::Quadrature { achieved: error, requested: target });
        }
        let mid = 0.5 * (worst.a + worst.b);
        let left = evaluate(&f, worst.a, mid);
        let right = evaluate(&f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        floor += left.roundoff() + right.roundoff() - worst.roundoff();
        heap.push(Ranked(left));
        heap.push(Ranked(right));
        evaluations += 2 * EVALS_PER_PANEL;
        subdivisions += 1;
    }
    let mut panels: Vec<Panel> = heap.into_iter().map(|r| r.0).chain(settled).collect();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let values: Vec<Complex64> = panels.iter().map(|p| p.value).collect();
    Ok(Estimate {
        value: pairwise_sum(&values),
        error: panels.iter().map(|p| p.error).sum(),
        evaluations,
    })
}

/// Real-valued convenience wrapper around [`integrate`].
pub fn integrate_real<F>(f: F, breakpoints: &[f64], cfg: &QuadratureConfig) -> Result<Estimate<f64>, PropagatorError>
where
    F: Fn(f64) -> f64,
{
    let est = integrate(|x| Complex64::new(f(x), 0.0), breakpoints, cfg)?;
    Ok(Estimate { value: est.value.re, error: est.error, evaluations: est.evaluations })
}

fn totals<'a>(panels: impl Iterator<Item = &'a Panel>) -> (Complex64, f64, f64) {
    let mut value = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    let mut floor = 0.0;
    for p in panels {
        value += p.value;
        error += p.error;
        floor += p.roundoff();
    }
    (value, error, floor)
}

/// Deterministic pairwise summation.
pub fn pairwise_sum(values: &[Complex64]) -> Complex64 {
    match values.len() {
        0 => Complex64::new(0.0, 0.0),
        1 => values[0],
        n if n <= 8 => values.iter().sum(),
        n => {
            let (l, r) = values.split_at(n / 2);
            pairwise_sum(l) + pairwise_sum(r)
        }
    }
}

/// Evenly spaced breakpoints on `[a, b]` with spacing at most `width`.
pub fn uniform_breakpoints(a: f64, b: f64, width: f64) -> Vec<f64> {
    let n = (((b - a) / width).ceil() as usize).max(1);
    (0..=n).map(|k| if k == n { b } else { a + (b - a) * k as f64 / n as f64 }).collect()
}

/// Smallest `P` (on a geometric grid) with `exp(-rate P) (P + 1/rate)^degree / rate < tol`,
/// which bounds the tail of `p^degree exp(-rate p)` beyond `P` (exactly for degree 1).
pub fn exponential_tail_cutoff(rate: f64, degree: i32, tol: f64) -> f64 {
    let bound = |p: f64| (-rate * p).exp() * (p + 1.0 / rate).powi(degree) / rate;
    let mut p = 1.0 / rate;
    while bound(p) > tol {
        p *= 1.25;
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let cfg = QuadratureConfig::default();
        let est = integrate_real(|x| x.powi(5) - 3.0 * x, &[0.0, 2.0], &cfg).unwrap();
        assert!((est.value - (64.0 / 6.0 - 6.0)).abs() < 1e-13);
    }

    #[test]
    fn oscillatory_exponential() {
        let cfg = QuadratureConfig::default();
        let bp = uniform_breakpoints(0.0, 60.0, 0.5);
        let est = integrate(|x| Complex64::new(0.0, 7.0 * x).exp() * (-x).exp(), &bp, &cfg).unwrap();
        let want = Complex64::new(1.0, -7.0).inv();
        assert!((est.value - want).norm() < 1e-13);
    }

    #[test]
    fn endpoint_singularity_converges_to_roundoff() {
        let cfg = QuadratureConfig::default();
        let est = integrate_real(|x| x.sqrt().ln(), &[0.0, 1.0], &cfg).unwrap();
        assert!((est.value + 0.5).abs() < 1e-10);
    }

    #[test]
    fn tail_cutoff_bounds_tail() {
        let p = exponential_tail_cutoff(0.2, 1, 1e-15);
        let tail = (-0.2 * p).exp() * (p / 0.2 + 1.0 / 0.04);
        assert!(tail < 1e-15);
    }
}
