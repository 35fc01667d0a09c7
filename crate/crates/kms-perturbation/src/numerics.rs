use crate::KmsError;
use num_complex::Complex64;
use propagators::quad::integrate;
use propagators::{
    thermal_images_with, thermal_matsubara_at, vac_two_point_at, Estimate, FieldParams, PropagatorError,
    QuadratureConfig,
};
use std::cell::RefCell;
use std::f64::consts::PI;
use wick_algebra::{combinatorial_factor, enumerate_graphs, Multigraph};

/// State two-point function at `t − iu` and complex radius `r`, choosing
/// the faster of the image and Matsubara series.
pub fn two_point(t: f64, u: f64, r: Complex64, params: &FieldParams, tol: f64) -> Result<Complex64, PropagatorError> {
    if params.is_vacuum() {
        return Ok(vac_two_point_at(t, u, r, params.mass));
    }
    let beta = params.beta;
    let matsubara_rate = 2.0 * PI * (r.re - t.abs()) / beta;
    if matsubara_rate >= 1.0 && matsubara_rate > params.mass * beta {
        thermal_matsubara_at(t, u, r, params, tol)
    } else {
        thermal_images_with(t, u, r, params, tol)
    }
}

/// [`integrate`] for integrands that can fail; the first failure aborts
/// the remaining evaluations and is returned.
pub(crate) fn try_integrate(
    f: impl Fn(f64) -> Result<Complex64, KmsError>,
    breakpoints: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Estimate<Complex64>, KmsError> {
    let failure: RefCell<Option<KmsError>> = RefCell::new(None);
    let est = integrate(
        |x| {
            if failure.borrow().is_some() {
                return Complex64::new(0.0, 0.0);
            }
            f(x).unwrap_or_else(|e| {
                *failure.borrow_mut() = Some(e);
                Complex64::new(0.0, 0.0)
            })
        },
        breakpoints,
        cfg,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(est?)
}

pub(crate) fn tolerance(rel: f64) -> QuadratureConfig {
    QuadratureConfig::default().with_rel_tol(rel).with_abs_tol(1e-300)
}

/// Connected graphs on the given degrees with their pairing counts.
#[derive(Debug, Clone)]
pub(crate) struct ConnectedGraphs {
    pub graphs: Vec<(Multigraph, f64)>,
}

impl ConnectedGraphs {
    pub fn new(powers: &[u32]) -> Self {
        let graphs = enumerate_graphs(powers)
            .into_iter()
            .filter(|g| g.is_connected())
            .map(|g| {
                let c = combinatorial_factor(&g, powers);
                (g, c)
            })
            .collect();
        Self { graphs }
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    /// `Σ_G C(G) Π D_ij^{l_ij}` with `line(i, j)` giving `D_ij`.
    pub fn evaluate(&self, line: impl Fn(usize, usize) -> Complex64) -> Complex64 {
        let mut total = Complex64::new(0.0, 0.0);
        for (g, c) in &self.graphs {
            let mut v = Complex64::new(*c, 0.0);
            for ((i, j), l) in g.edges() {
                v *= line(i, j).powu(l);
            }
            total += v;
        }
        total
    }
}
