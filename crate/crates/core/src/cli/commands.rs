use num_complex::Complex64;
use rayon::prelude::*;

use super::config::{FileConfig, Model};
use super::table::{Cell, Table};
use super::{CliError, Command};
use crate::linear::{linear_steady_state, table_one, LinearSteadyState};
use crate::master::{solve_auto, SweepOptions, TruncatedSolution, Truncation};
use crate::pulse::{
    default_resolution, fidelity_approx, fidelity_exact, output_pulse_time_domain, reflection_fidelity, Channel,
    GaussianPulseSpec,
};
use crate::semiclassical::{bistability_curve, turning_points};
use crate::units::{mhz, to_mhz};
use crate::{Error, SystemParams};

const TABLE_TOLERANCE: f64 = 1e-2;

const STEADY_COLUMNS: [&str; 16] = [
    "T_F", "T_B", "g2_FF", "g2_BB", "Re_a", "Im_a", "Re_b", "Im_b", "Re_A", "Im_A", "Re_B", "Im_B", "n_a", "n_b",
    "p_exc", "cutoff",
];

/// One grid point: the series value (if any) and the swept value.
#[derive(Clone, Copy, Debug)]
struct Point {
    series: Option<f64>,
    x: f64,
}

fn config_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

fn grid(cfg: &FileConfig) -> Result<Vec<f64>, CliError> {
    cfg.grid.as_ref().ok_or_else(|| config_err("grid: section is required for this command"))?.values()
}

fn points(cfg: &FileConfig, xs: &[f64]) -> Vec<Point> {
    match &cfg.series {
        Some(s) => s.values.iter().flat_map(|&v| xs.iter().map(move |&x| Point { series: Some(v), x })).collect(),
        None => xs.iter().map(|&x| Point { series: None, x }).collect(),
    }
}

/// System parameters for a point, validated.
fn params_at(cfg: &FileConfig, series: Option<f64>) -> Result<SystemParams, CliError> {
    let section = match (&cfg.series, series) {
        (Some(s), Some(v)) => s.param.apply(&cfg.params, v),
        _ => cfg.params,
    };
    let params = section.to_params();
    params.validate().map_err(|e| config_err(format!("params: {e}")))?;
    Ok(params)
}

fn header(cfg: &FileConfig, swept: &str, rest: &[&str]) -> Vec<String> {
    let mut cols = Vec::new();
    if let Some(s) = &cfg.series {
        cols.push(s.param.column().to_string());
    }
    cols.push(swept.to_string());
    cols.extend(rest.iter().map(|s| s.to_string()));
    cols.push("status".into());
    cols
}

fn par_map<T, R, F>(workers: usize, items: &[T], f: F) -> Result<Vec<R>, CliError>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Computation(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| items.par_iter().map(f).collect()))
}

/// Appends one row per point. Failed points are written as `NaN` with status
/// `failed`, or abort the run in strict mode.
fn fill(
    table: &mut Table,
    cfg: &FileConfig,
    points: &[Point],
    results: Vec<crate::Result<Vec<Cell>>>,
) -> Result<(), CliError> {
    let width = table.columns.len() - points.first().map_or(2, |p| 2 + usize::from(p.series.is_some()));
    for (p, result) in points.iter().zip(results) {
        let mut row: Vec<Cell> = p.series.map(Cell::Num).into_iter().collect();
        row.push(Cell::Num(p.x));
        match result {
            Ok(cells) => {
                row.extend(cells);
                row.push(Cell::Text("ok".into()));
            }
            Err(e) if cfg.run.strict => {
                return Err(CliError::Computation(format!("grid point {}: {e}", p.x)));
            }
            Err(e) => {
                log::warn!("grid point {} failed: {e}", p.x);
                row.extend(std::iter::repeat_n(Cell::Missing, width));
                row.push(Cell::Text("failed".into()));
            }
        }
        table.push(row);
    }
    Ok(())
}

fn sweep_options(cfg: &FileConfig) -> Result<SweepOptions, CliError> {
    if !(cfg.run.tolerance > 0.0) {
        return Err(config_err("run.tolerance: must be positive"));
    }
    let truncation = match cfg.fock {
        Some(f) if f.cutoff == 0 => return Err(config_err("fock.cutoff: must be at least 1")),
        Some(f) => Truncation::Fixed(f.cutoff),
        None => Truncation::Auto,
    };
    Ok(SweepOptions { truncation, tolerance: cfg.run.tolerance, max_dim: cfg.run.max_dim, ..Default::default() })
}

fn complex_cells(z: Complex64) -> [Cell; 2] {
    [Cell::Num(z.re), Cell::Num(z.im)]
}

fn master_cells(sol: &TruncatedSolution) -> Vec<Cell> {
    let o = &sol.observables;
    let mut cells = vec![Cell::Num(o.t_f), Cell::Num(o.t_b), Cell::opt(o.g2_ff), Cell::opt(o.g2_bb)];
    for z in [o.a_mean, o.b_mean, o.normal_a_mean, o.normal_b_mean] {
        cells.extend(complex_cells(z));
    }
    cells.extend([Cell::Num(o.n_a), Cell::Num(o.n_b), Cell::Num(o.p_exc), Cell::Int(sol.cutoff)]);
    cells
}

fn linear_cells(ss: &LinearSteadyState) -> Vec<Cell> {
    let mut cells = vec![Cell::Num(ss.t_f), Cell::Num(ss.t_b), Cell::Missing, Cell::Missing];
    for z in [ss.a_ss, ss.b_ss, ss.normal_a(), ss.normal_b()] {
        cells.extend(complex_cells(z));
    }
    cells.extend([
        Cell::Num(ss.a_ss.norm_sqr()),
        Cell::Num(ss.b_ss.norm_sqr()),
        Cell::Num(ss.sigma_ss.norm_sqr()),
        Cell::Missing,
    ]);
    cells
}

/// Runs a steady-state grid where `at` maps a point to its parameters.
fn steady_grid<F>(cfg: &FileConfig, model: Model, swept: &str, xs: &[f64], at: F) -> Result<Table, CliError>
where
    F: Fn(&SystemParams, f64) -> SystemParams + Sync,
{
    let pts = points(cfg, xs);
    let bases = pts.iter().map(|p| params_at(cfg, p.series)).collect::<Result<Vec<_>, _>>()?;
    let opts = sweep_options(cfg)?;
    let jobs: Vec<(Point, SystemParams)> = pts.iter().zip(&bases).map(|(p, b)| (*p, at(b, mhz(p.x)))).collect();
    let results = par_map(cfg.run.workers, &jobs, |(_, params)| match model {
        Model::Master => solve_auto(params, &opts).map(|s| master_cells(&s)),
        Model::Linear => linear_steady_state(params).map(|s| linear_cells(&s)),
    })?;
    let mut table = Table::new(header(cfg, swept, &STEADY_COLUMNS));
    fill(&mut table, cfg, &pts, results)?;
    Ok(table)
}

fn spectrum(cfg: &FileConfig) -> Result<Table, CliError> {
    let xs = grid(cfg)?;
    let offset = mhz(cfg.params.atom_cavity_offset);
    let detuned = move |p: &SystemParams, d: f64| SystemParams { delta_c: d, delta_a: d + offset, ..*p };
    match cfg.run.model.unwrap_or(Model::Linear) {
        Model::Master => steady_grid(cfg, Model::Master, "Delta_C_over_2pi_MHz", &xs, detuned),
        Model::Linear => {
            let pts = points(cfg, &xs);
            let bases = pts.iter().map(|p| params_at(cfg, p.series)).collect::<Result<Vec<_>, _>>()?;
            let jobs: Vec<SystemParams> = pts.iter().zip(&bases).map(|(p, b)| detuned(b, mhz(p.x))).collect();
            let results = par_map(cfg.run.workers, &jobs, |params| {
                let with = linear_steady_state(params)?;
                let without = linear_steady_state(&params.with_coupling(Complex64::new(0.0, 0.0)))?;
                Ok(vec![Cell::Num(with.t_f), Cell::Num(with.t_b), Cell::Num(without.t_f), Cell::Num(without.t_b)])
            })?;
            let mut table =
                Table::new(header(cfg, "Delta_C_over_2pi_MHz", &["T_F", "T_B", "T_F_no_atom", "T_B_no_atom"]));
            fill(&mut table, cfg, &pts, results)?;
            Ok(table)
        }
    }
}

fn bistability(cfg: &FileConfig) -> Result<Table, CliError> {
    let xs = grid(cfg)?;
    if xs.iter().any(|&x| x < 0.0) {
        return Err(config_err("grid: |X| values must be non-negative"));
    }
    let pts = points(cfg, &xs);
    let mut series: Vec<Option<f64>> = pts.iter().map(|p| p.series).collect();
    series.dedup();
    for s in &series {
        let params = params_at(cfg, *s)?;
        let label =
            s.map(|v| format!("{} = {v}: ", cfg.series.as_ref().map_or("", |c| c.param.column()))).unwrap_or_default();
        match turning_points(&params) {
            Ok(tp) => eprintln!(
                "{label}turning points E_p/2pi = {:.4} MHz (|X| = {:.4}) and {:.4} MHz (|X| = {:.4}); estimates {:.4} and {:.4} MHz",
                to_mhz(tp.ep_lower),
                tp.x_lower,
                to_mhz(tp.ep_upper),
                tp.x_upper,
                to_mhz(tp.asymptotic.ep_lower),
                to_mhz(tp.asymptotic.ep_upper),
            ),
            Err(e) => eprintln!("{label}{e}"),
        }
    }
    let bases = pts.iter().map(|p| params_at(cfg, p.series)).collect::<Result<Vec<_>, _>>()?;
    let results = pts
        .iter()
        .zip(&bases)
        .map(|(p, params)| {
            bistability_curve(params, &[p.x]).map(|c| {
                let b = c[0];
                vec![Cell::Num(b.y_mag), Cell::Num(b.a_mag), Cell::Num(to_mhz(b.ep))]
            })
        })
        .collect();
    let mut table = Table::new(header(cfg, "X_abs", &["Y_abs", "A_abs", "E_p_over_2pi_MHz"]));
    fill(&mut table, cfg, &pts, results)?;
    Ok(table)
}

fn pulse_spec(cfg: &FileConfig) -> Result<GaussianPulseSpec, CliError> {
    let p = cfg.pulse.ok_or_else(|| config_err("pulse: section is required for this command"))?;
    GaussianPulseSpec::new(p.t_p, p.alpha_sq).map_err(|e| config_err(format!("pulse: {e}")))
}

fn pulse(cfg: &FileConfig) -> Result<Table, CliError> {
    if cfg.series.is_some() {
        return Err(config_err("series: not supported by the pulse command"));
    }
    let times = grid(cfg)?;
    let spec = pulse_spec(cfg)?;
    let params = params_at(cfg, None)?;
    let channels = [Channel::Input, Channel::ForwardG, Channel::ForwardG0, Channel::BackwardG];
    let d_omega = default_resolution(&spec);
    let fluxes = par_map(cfg.run.workers, &channels, |&c| output_pulse_time_domain(&params, spec, c, &times, d_omega))?;
    let fluxes: crate::Result<Vec<Vec<f64>>> = fluxes.into_iter().collect();
    let results: Vec<crate::Result<Vec<Cell>>> = match &fluxes {
        Ok(f) => (0..times.len()).map(|k| Ok(f.iter().map(|c| Cell::Num(c[k])).collect())).collect(),
        Err(e) => times.iter().map(|_| Err(e.clone())).collect(),
    };
    let mut table =
        Table::new(header(cfg, "t_us", &["flux_in", "flux_forward_g", "flux_forward_g0", "flux_backward_g"]));
    fill(&mut table, cfg, &points(cfg, &times), results)?;
    Ok(table)
}

fn fidelity(cfg: &FileConfig) -> Result<Table, CliError> {
    let xs = grid(cfg)?;
    let t_p = pulse_spec(cfg)?.t_p;
    let pts = points(cfg, &xs);
    let jobs =
        pts.iter().map(|p| params_at(cfg, p.series).map(|params| (params, p.x))).collect::<Result<Vec<_>, _>>()?;
    let results = par_map(cfg.run.workers, &jobs, |&(params, alpha_sq)| -> crate::Result<Vec<Cell>> {
        let spec = GaussianPulseSpec::new(t_p, alpha_sq)?;
        let exact = fidelity_exact(&params, spec)?;
        let refl = reflection_fidelity(&params, spec)?;
        Ok(vec![
            Cell::Num(exact.fidelity),
            Cell::Num(fidelity_approx(&params, alpha_sq)),
            Cell::Num(refl.exact),
            Cell::Num(refl.approx),
        ])
    })?;
    let mut table = Table::new(header(cfg, "alpha_sq", &["F_exact", "F_approx", "F_refl_exact", "F_refl_approx"]));
    fill(&mut table, cfg, &pts, results)?;
    Ok(table)
}

fn table_check(cfg: &FileConfig) -> Result<Table, CliError> {
    let params = params_at(cfg, None)?;
    let entries = table_one(&params).map_err(|e| match e {
        Error::InvalidParameter(_) | Error::Regime(_) => config_err(format!("params: {e}")),
        other => CliError::Computation(other.to_string()),
    })?;
    let mut table = Table::new([
        "quantity",
        "column",
        "computed_re",
        "computed_im",
        "expected_re",
        "expected_im",
        "relative_error",
        "pass",
    ]);
    for e in entries {
        table.push(vec![
            Cell::Text(e.quantity.into()),
            Cell::Text(e.column.label().into()),
            Cell::Num(e.computed.re),
            Cell::Num(e.computed.im),
            Cell::Num(e.expected.re),
            Cell::Num(e.expected.im),
            Cell::Num(e.relative_error),
            Cell::Bool(e.passes(TABLE_TOLERANCE)),
        ]);
    }
    Ok(table)
}

/// Runs `command` with a resolved configuration.
pub fn run(command: Command, cfg: &FileConfig) -> Result<Table, CliError> {
    match command {
        Command::Spectrum => spectrum(cfg),
        Command::SweepCoupling => {
            let xs = grid(cfg)?;
            let model = cfg.run.model.unwrap_or(Model::Master);
            steady_grid(cfg, model, "g_tw_over_2pi_MHz", &xs, |p, g| p.with_coupling(Complex64::new(g, 0.0)))
        }
        Command::SweepDrive => {
            let xs = grid(cfg)?;
            let model = cfg.run.model.unwrap_or(Model::Master);
            steady_grid(cfg, model, "E_p_over_2pi_MHz", &xs, |p, e| p.with_drive(Complex64::new(e, 0.0)))
        }
        Command::Bistability => bistability(cfg),
        Command::Pulse => pulse(cfg),
        Command::Fidelity => fidelity(cfg),
        Command::TableOneCheck => table_check(cfg),
    }
}
