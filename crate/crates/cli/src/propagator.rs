use crate::args::{Format, Grid, PropagatorArgs};
use crate::config::{pick, ConfigFile};
use crate::error::CliError;
use crate::output::{csv, Context};
use crate::state;
use propagators::{
    kms_two_point_images, kms_two_point_with, vac_two_point, vac_two_point_quadrature, ComplexTimeDisplacement,
    FieldParams, QuadratureConfig,
};
use serde::Serialize;

#[derive(Debug, Serialize)]
struct Row {
    u: f64,
    r: f64,
    t: f64,
    re: f64,
    im: f64,
    delta: f64,
}

#[derive(Serialize)]
struct Table<'a> {
    mass: f64,
    beta: Option<f64>,
    grid: &'a str,
    tolerance: f64,
    rows: &'a [Row],
}

fn grid_points(grid: Grid, params: &FieldParams) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let thermal = !params.is_vacuum();
    let scale = |fr: &[f64]| fr.iter().map(|f| f * params.beta).collect::<Vec<_>>();
    match grid {
        Grid::Default => {
            let u = if thermal { scale(&[0.2, 0.5, 0.8]) } else { vec![0.2, 1.0, 3.0] };
            (u, vec![0.0, 1.0, 5.0], vec![0.0])
        }
        Grid::Fine => {
            let u = if thermal {
                scale(&[0.05, 0.2, 0.35, 0.5, 0.65, 0.8, 0.95])
            } else {
                vec![0.1, 0.2, 0.5, 1.0, 2.0, 3.0]
            };
            (u, vec![0.0, 0.5, 1.0, 2.0, 5.0], vec![0.0, 0.5])
        }
    }
}

/// Closed form (Bessel, or its image sum) against momentum quadrature.
fn row(d: &ComplexTimeDisplacement, params: &FieldParams, cfg: &QuadratureConfig) -> Result<Row, CliError> {
    let (closed, quad) = if params.is_vacuum() {
        (vac_two_point(d, params)?, vac_two_point_quadrature(d, params, cfg)?.value)
    } else {
        (kms_two_point_images(d, params)?, kms_two_point_with(d, params, cfg)?.value)
    };
    let delta = (closed - quad).norm() / closed.norm();
    Ok(Row { u: d.u, r: d.r, t: d.t, re: closed.re, im: closed.im, delta })
}

pub fn run(args: &PropagatorArgs, file: &ConfigFile, ctx: &Context) -> Result<(), CliError> {
    let params = state(&args.state, file)?;
    params.require_massive()?;
    let grid = pick(args.grid, &file.grid).unwrap_or(Grid::Default);
    let tolerance = ctx.tolerance.unwrap_or(QuadratureConfig::default().rel_tol);
    let cfg = QuadratureConfig::default().with_rel_tol(tolerance);
    cfg.validate()?;
    let (us, rs, ts) = grid_points(grid, &params);
    let mut rows = Vec::new();
    for &u in &us {
        for &r in &rs {
            for &t in &ts {
                rows.push(row(&ComplexTimeDisplacement::new(t, u, r), &params, &cfg)?);
            }
        }
    }
    let text = match ctx.format_or(Format::Csv) {
        Format::Csv => csv(&rows)?,
        Format::Json => {
            let beta = (!params.is_vacuum()).then_some(params.beta);
            let grid = match grid {
                Grid::Default => "default",
                Grid::Fine => "fine",
            };
            ctx.json("propagator", &Table { mass: params.mass, beta, grid, tolerance, rows: &rows })?
        }
    };
    ctx.emit(&text)
}
