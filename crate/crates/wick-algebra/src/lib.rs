//! Wick monomials at labelled points and their quasi-free correlation
//! functions, expanded over contraction multigraphs.
//!
//! Factor `i` of `ω(A₀ α_{z₁}(A₁) ⋯)` sits at complex time `tᵢ + iuᵢ` and
//! position `xᵢ`; the line `(i, j)`, `i < j`, carries the two-point function
//! of the displacement `xᵢ − xⱼ`, i.e. time argument `(tᵢ − tⱼ) − i(uⱼ − uᵢ)`.

mod graph;

pub use graph::{combinatorial_factor, enumerate_graphs, Multigraph};

use graph::factorial;
use num_complex::Complex64;
use propagators::{state_two_point, ComplexTimeDisplacement, FieldParams, PropagatorError, ThermalRoute};
use std::collections::HashMap;
use thiserror::Error;

pub const DEFAULT_MAX_POWER: u32 = 6;
pub const ORACLE_MAX_FACTORS: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WickError {
    #[error(transparent)]
    Propagator(#[from] PropagatorError),
    #[error("invalid problem: {0}")]
    Invalid(String),
    #[error("{0} factors exceed the oracle capacity of {ORACLE_MAX_FACTORS}")]
    Capacity(usize),
}

/// `:φ^power:` translated to complex time `t + iu` and position `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WickMonomial {
    pub label: usize,
    pub power: u32,
    pub t: f64,
    pub u: f64,
    pub x: [f64; 3],
}

impl WickMonomial {
    pub fn at_origin(label: usize, power: u32) -> Self {
        Self { label, power, t: 0.0, u: 0.0, x: [0.0; 3] }
    }

    pub fn new(label: usize, power: u32, t: f64, u: f64, x: [f64; 3]) -> Self {
        Self { label, power, t, u, x }
    }

    /// Displacement of `self − later` as seen by the two-point function.
    pub fn displacement_to(&self, later: &WickMonomial) -> ComplexTimeDisplacement {
        let dx = [self.x[0] - later.x[0], self.x[1] - later.x[1], self.x[2] - later.x[2]];
        ComplexTimeDisplacement::from_vector(self.t - later.t, later.u - self.u, dx)
    }
}

/// Ordered product of Wick monomials in a quasi-free state.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationProblem {
    pub monomials: Vec<WickMonomial>,
    pub state: FieldParams,
    pub route: ThermalRoute,
    pub max_power: u32,
}

impl CorrelationProblem {
    pub fn new(monomials: Vec<WickMonomial>, state: FieldParams) -> Self {
        Self { monomials, state, route: ThermalRoute::default(), max_power: DEFAULT_MAX_POWER }
    }

    pub fn with_route(mut self, route: ThermalRoute) -> Self {
        self.route = route;
        self
    }

    pub fn powers(&self) -> Vec<u32> {
        self.monomials.iter().map(|m| m.power).collect()
    }

    pub fn validate(&self) -> Result<(), WickError> {
        let mut labels: Vec<usize> = self.monomials.iter().map(|m| m.label).collect();
        labels.sort_unstable();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return Err(WickError::Invalid("duplicate labels".into()));
        }
        if let Some(m) = self.monomials.iter().find(|m| m.power > self.max_power) {
            return Err(WickError::Invalid(format!("power {} exceeds maximum {}", m.power, self.max_power)));
        }
        if self.monomials.windows(2).any(|w| !(w[1].u >= w[0].u)) {
            return Err(WickError::Invalid("imaginary times must be non-decreasing".into()));
        }
        if let (Some(first), Some(last)) = (self.monomials.first(), self.monomials.last()) {
            if !self.state.is_vacuum() && !(last.u - first.u < self.state.beta) {
                return Err(WickError::Invalid("imaginary-time spread must stay below beta".into()));
            }
        }
        Ok(())
    }

    /// Evaluates every two-point function a contraction graph can use.
    pub fn contractions(&self) -> Result<ContractionTable, WickError> {
        self.validate()?;
        let n = self.monomials.len();
        let mut table = ContractionTable::zeros(n);
        for i in 0..n {
            for j in i + 1..n {
                let (a, b) = (&self.monomials[i], &self.monomials[j]);
                if a.power == 0 || b.power == 0 {
                    continue;
                }
                let d = a.displacement_to(b);
                table.set(i, j, state_two_point(&d, &self.state, self.route)?);
            }
        }
        Ok(table)
    }
}

/// Two-point values `D(xᵢ − xⱼ)` for all `i < j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractionTable {
    n: usize,
    values: Vec<Complex64>,
}

impl ContractionTable {
    pub fn zeros(n: usize) -> Self {
        Self { n, values: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut t = Self::zeros(n);
        for i in 0..n {
            for j in i + 1..n {
                t.set(i, j, f(i, j));
            }
        }
        t
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.values[i * self.n + j] = v;
    }

    /// Sub-table on the given ordered vertex subset.
    pub fn restrict(&self, vertices: &[usize]) -> Self {
        Self::from_fn(vertices.len(), |a, b| self.get(vertices[a], vertices[b]))
    }
}

/// `C(G, a) · Π D_ij^{l_ij}` for a graph matched to the table.
pub fn graph_value(g: &Multigraph, powers: &[u32], table: &ContractionTable) -> Complex64 {
    let mut v = Complex64::new(combinatorial_factor(g, powers), 0.0);
    for ((i, j), l) in g.edges() {
        v *= table.get(i, j).powu(l);
    }
    v
}

pub fn graph_weight(g: &Multigraph, problem: &CorrelationProblem) -> Result<Complex64, WickError> {
    let powers = problem.powers();
    if g.vertex_count() != powers.len() || (0..powers.len()).any(|i| g.degree(i) != powers[i]) {
        return Err(WickError::Invalid("graph degrees do not match the problem".into()));
    }
    Ok(graph_value(g, &powers, &problem.contractions()?))
}

fn graph_sum(powers: &[u32], table: &ContractionTable, connected_only: bool) -> Complex64 {
    let terms: Vec<Complex64> = enumerate_graphs(powers)
        .iter()
        .filter(|g| !connected_only || g.is_connected())
        .map(|g| graph_value(g, powers, table))
        .collect();
    propagators::quad::pairwise_sum(&terms)
}

/// `ω(A₀ ⋯ A_n)` from precomputed contractions.
pub fn full_from_table(powers: &[u32], table: &ContractionTable) -> Complex64 {
    graph_sum(powers, table, false)
}

/// `ω^c(A₀ ⊗ ⋯ ⊗ A_n)` from precomputed contractions.
pub fn connected_from_table(powers: &[u32], table: &ContractionTable) -> Complex64 {
    graph_sum(powers, table, true)
}

pub fn full_correlation(problem: &CorrelationProblem) -> Result<Complex64, WickError> {
    Ok(full_from_table(&problem.powers(), &problem.contractions()?))
}

pub fn connected_correlation(problem: &CorrelationProblem) -> Result<Complex64, WickError> {
    Ok(connected_from_table(&problem.powers(), &problem.contractions()?))
}

/// Cumulant by Möbius inversion over set partitions,
/// `ω^c = Σ_π (−1)^{|π|−1} (|π|−1)! Π_{B∈π} ω(B)`, with moments of ordered
/// sub-products taken from the graph expansion.
pub fn oracle_from_table(powers: &[u32], table: &ContractionTable) -> Result<Complex64, WickError> {
    let n = powers.len();
    if n > ORACLE_MAX_FACTORS {
        return Err(WickError::Capacity(n));
    }
    if n == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let mut moments: HashMap<u32, Complex64> = HashMap::new();
    let mut moment = |mask: u32| -> Complex64 {
        *moments.entry(mask).or_insert_with(|| {
            let verts: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
            let sub_powers: Vec<u32> = verts.iter().map(|&i| powers[i]).collect();
            full_from_table(&sub_powers, &table.restrict(&verts))
        })
    };
    let mut terms = Vec::new();
    for_each_partition(n, &mut |blocks: &[u32]| {
        let k = blocks.len() as u32;
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        let mut prod = Complex64::new(sign * factorial(k - 1), 0.0);
        for &b in blocks {
            prod *= moment(b);
        }
        terms.push(prod);
    });
    Ok(propagators::quad::pairwise_sum(&terms))
}

pub fn connected_oracle(problem: &CorrelationProblem) -> Result<Complex64, WickError> {
    if problem.monomials.len() > ORACLE_MAX_FACTORS {
        return Err(WickError::Capacity(problem.monomials.len()));
    }
    oracle_from_table(&problem.powers(), &problem.contractions()?)
}

/// Calls `f` with the block bitmasks of every set partition of `0..n`.
fn for_each_partition(n: usize, f: &mut impl FnMut(&[u32])) {
    fn rec(i: usize, n: usize, blocks: &mut Vec<u32>, f: &mut impl FnMut(&[u32])) {
        if i == n {
            f(blocks);
            return;
        }
        for b in 0..blocks.len() {
            blocks[b] |= 1 << i;
            rec(i + 1, n, blocks, f);
            blocks[b] &= !(1 << i);
        }
        blocks.push(1 << i);
        rec(i + 1, n, blocks, f);
        blocks.pop();
    }
    rec(0, n, &mut Vec::new(), f);
}

/// Moment of monomials whose Wick ordering differs from the state's:
/// vertex `i` may contract with itself, each self-line contributing
/// `self_contraction[i]` (the difference of the two orderings' coincident
/// two-point values).
pub fn full_with_self_contractions(powers: &[u32], table: &ContractionTable, self_contraction: &[f64]) -> Complex64 {
    let n = powers.len();
    let mut terms = Vec::new();
    let mut loops = vec![0u32; n];
    loop {
        let reduced: Vec<u32> = (0..n).map(|i| powers[i] - 2 * loops[i]).collect();
        let mut loop_factor = 1.0;
        for i in 0..n {
            let s = loops[i];
            loop_factor *= self_contraction[i].powi(s as i32) / (factorial(s) * 2f64.powi(s as i32));
        }
        for g in enumerate_graphs(&reduced) {
            let mut v = Complex64::new(loop_factor, 0.0);
            let den: f64 = g.edges().map(|(_, l)| factorial(l)).product();
            v /= den;
            for ((i, j), l) in g.edges() {
                v *= table.get(i, j).powu(l);
            }
            terms.push(v);
        }
        // odometer over admissible loop counts
        let mut k = 0;
        loop {
            if k == n {
                let num: f64 = powers.iter().map(|&a| factorial(a)).product();
                return propagators::quad::pairwise_sum(&terms) * num;
            }
            if 2 * (loops[k] + 1) <= powers[k] {
                loops[k] += 1;
                break;
            }
            loops[k] = 0;
            k += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partitions_are_bell_numbers() {
        for (n, bell) in [(1, 1), (2, 2), (3, 5), (4, 15), (5, 52), (8, 4140)] {
            let mut count = 0;
            for_each_partition(n, &mut |_| count += 1);
            assert_eq!(count, bell);
        }
    }

    #[test]
    fn single_vertex_self_contractions() {
        let t = ContractionTable::zeros(1);
        let v = full_with_self_contractions(&[4], &t, &[0.5]);
        assert!((v.re - 3.0 * 0.25).abs() < 1e-15);
        let v = full_with_self_contractions(&[2], &t, &[0.5]);
        assert!((v.re - 0.5).abs() < 1e-15);
    }
}
