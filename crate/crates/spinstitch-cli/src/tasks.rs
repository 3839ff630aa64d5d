//! Task execution: turn a validated [`RunConfig`] into CSV tables and
//! companion gnuplot scripts, all in memory so the caller controls what
//! touches the filesystem and when.

use rayon::prelude::*;
use serde_json::{json, Map, Value};
use spinstitch::control::{maximize_gamma, ControlParams};
use spinstitch::optimizer::{
    analytic_seed, optimize_infidelity, optimize_seeded, sweep_horizons, OptimizationResult,
    SeedStrategy,
};
use spinstitch::propagation::{
    convergence_check, infidelity_for_pair, propagate_with_steps, resolved_step_count, step_floor,
    EvolutionSpec,
};
use spinstitch::qsl::qsl_ratio;
use spinstitch::spin_model::{build_hamiltonian, diagonalize, gap_sweep, ground_pair, ChainConfig};
use spinstitch::Error;

use crate::config::{RunConfig, Seed, Task};
use crate::format::{Cell, Table};
use crate::plots;

/// Why a run stopped, mapped onto the two failure exit codes.
pub enum Failure {
    /// Bad request: exit 2, nothing written.
    Config(String),
    /// The computation itself went bad: exit 3.
    Numeric(String),
}

/// Library errors split into "you asked for something invalid" and "the
/// numerics refused", which is exactly the exit-code split.
fn classify(err: Error) -> Failure {
    match err {
        Error::ChainTooSmall { .. }
        | Error::ChainTooLarge { .. }
        | Error::OffsetOutOfRange { .. }
        | Error::NonFiniteParameter
        | Error::GridTooSmall { .. }
        | Error::DuplicateSite { .. }
        | Error::SiteOutOfRange { .. }
        | Error::StateNotNormalized { .. }
        | Error::TimeOutOfRange { .. }
        | Error::BadNodeCount { .. }
        | Error::BadControl => Failure::Config(err.to_string()),
        Error::NonHermitian { .. }
        | Error::DegeneracyPersists { .. }
        | Error::StepBudgetExceeded { .. }
        | Error::NonFiniteIntegrand { .. }
        | Error::NonFiniteObjective
        | Error::GaugeNotClosed { .. } => Failure::Numeric(err.to_string()),
    }
}

/// Everything a run produces, keyed by file name relative to the output
/// directory.
pub struct Artifacts {
    pub tables: Vec<(String, String)>,
    pub scripts: Vec<(String, String)>,
    /// Task-specific resolved parameters for the manifest.
    pub resolved: Map<String, Value>,
    /// True when a row carries the FAILED marker; the caller still writes
    /// the files but exits 3.
    pub failed_rows: bool,
}

impl Artifacts {
    fn new() -> Self {
        Artifacts {
            tables: Vec::new(),
            scripts: Vec::new(),
            resolved: Map::new(),
            failed_rows: false,
        }
    }
}

fn strategy_of(seed: Seed) -> SeedStrategy {
    match seed {
        Seed::Cold => SeedStrategy::Cold,
        Seed::Analytic => SeedStrategy::Analytic,
        Seed::Continuation => SeedStrategy::Continuation,
        Seed::Best => SeedStrategy::Best,
    }
}

fn optimum_row(table: &mut Table, horizon: f64, r: &OptimizationResult) {
    table.row(&[
        Cell::Float(horizon),
        Cell::Float(r.a_opt.first().copied().unwrap_or(0.0)),
        Cell::Float(r.a_opt.get(1).copied().unwrap_or(0.0)),
        Cell::Float(r.r_opt),
        Cell::Float(r.r_linear_ramp),
        Cell::Text(if r.constraint_ok { "true" } else { "false" }),
        Cell::Int(r.iterations as i64),
    ]);
}

pub const SWEEP_HEADER: &str = "T,a1_opt,a2_opt,R_opt,R_linear,constraint_ok,iterations";

pub fn execute(cfg: &RunConfig) -> Result<Artifacts, Failure> {
    cfg.validate().map_err(Failure::Config)?;
    let chain = cfg.chain.build().map_err(classify)?;
    let stem = cfg.stem();
    let mut out = Artifacts::new();
    match cfg.task {
        Task::Spectrum => spectrum(cfg, &chain, &stem, &mut out)?,
        Task::GapSweep => run_gap_sweep(cfg, &chain, &stem, &mut out)?,
        Task::Evolve => evolve(cfg, &chain, &stem, &mut out)?,
        Task::Optimize => optimize(cfg, &chain, &stem, &mut out)?,
        Task::Sweep => sweep(cfg, &chain, &stem, &mut out)?,
        Task::Landscape => landscape(cfg, &chain, &stem, &mut out)?,
        Task::Qsl => qsl(cfg, &chain, &stem, &mut out)?,
        Task::Coefficients => coefficients(&chain, &stem, &mut out)?,
    }
    Ok(out)
}

fn spectrum(
    cfg: &RunConfig,
    chain: &ChainConfig,
    stem: &str,
    out: &mut Artifacts,
) -> Result<(), Failure> {
    let g = cfg.g.unwrap_or(0.0);
    let h = build_hamiltonian(chain, g);
    let spec = diagonalize(&h).map_err(classify)?;
    let mut table = Table::new("g,index,eigenvalue");
    for (index, value) in spec.eigenvalues.iter().enumerate() {
        table.row(&[Cell::Float(g), Cell::Int(index as i64), Cell::Float(*value)]);
    }
    out.tables.push((format!("{stem}.csv"), table.finish()));
    out.scripts.push((format!("{stem}.gp"), plots::spectrum(stem)));
    out.resolved.insert("g".into(), json!(g));
    out.resolved.insert("levels".into(), json!(chain.dim()));
    Ok(())
}

fn run_gap_sweep(
    cfg: &RunConfig,
    chain: &ChainConfig,
    stem: &str,
    out: &mut Artifacts,
) -> Result<(), Failure> {
    let points = cfg.grid_points.unwrap_or(101);
    let rows = gap_sweep(chain, points).map_err(classify)?;
    let mut table = Table::new("g,gap");
    for (g, gap) in rows {
        table.row(&[Cell::Float(g), Cell::Float(gap)]);
    }
    out.tables.push((format!("{stem}.csv"), table.finish()));
    out.scripts.push((format!("{stem}.gp"), plots::gap_sweep(stem)));
    out.resolved.insert("grid_points".into(), json!(points));
    Ok(())
}

fn evolve(
    cfg: &RunConfig,
    chain: &ChainConfig,
    stem: &str,
    out: &mut Artifacts,
) -> Result<(), Failure> {
    let horizon = cfg.horizon.expect("validated");
    let amplitudes = cfg.amplitudes.clone().expect("validated");
    let pair = ground_pair(chain).map_err(classify)?;
    let params = ControlParams::new(amplitudes, horizon).map_err(classify)?;
    let steps = match cfg.steps {
        Some(n) => n,
        None => resolved_step_count(chain, &params, &EvolutionSpec::new(1)).map_err(classify)?,
    };
    // Report the fidelity on exactly the grid that was asked for, then
    // interrogate that same grid with the step-refinement check.
    let driven = propagate_with_steps(chain, &params, steps, &pair.initial).map_err(classify)?;
    let fidelity = pair.target.overlap(&driven).norm().min(1.0);
    let report = convergence_check(chain, &params, &EvolutionSpec::new(steps)).map_err(classify)?;

    let mut table = Table::new("T,steps,fidelity,infidelity,ratio,status");
    table.row(&[
        Cell::Float(horizon),
        Cell::Int(steps as i64),
        Cell::Float(fidelity),
        Cell::Float(1.0 - fidelity),
        Cell::Float(report.ratio),
        Cell::Text(if report.converged { "OK" } else { "FAILED" }),
    ]);
    out.tables.push((format!("{stem}.csv"), table.finish()));
    out.resolved.insert("steps".into(), json!(steps));
    out.resolved.insert("extrapolated".into(), json!(report.extrapolated));
    out.failed_rows = !report.converged;
    Ok(())
}

/// Seed construction honoring the harmonic count; only the K = 2 analytic
/// seed carries real structure, K = 1 keeps just its first entry.
fn seeded_run(
    chain: &ChainConfig,
    horizon: f64,
    harmonics: usize,
    strategy: SeedStrategy,
) -> spinstitch::Result<OptimizationResult> {
    if harmonics == 2 {
        return optimize_infidelity(chain, horizon, strategy);
    }
    let seed = match strategy {
        SeedStrategy::Cold => vec![0.0; harmonics],
        _ => analytic_seed(horizon)[..harmonics].to_vec(),
    };
    optimize_seeded(chain, horizon, &seed, strategy)
}

fn optimize(
    cfg: &RunConfig,
    chain: &ChainConfig,
    stem: &str,
    out: &mut Artifacts,
) -> Result<(), Failure> {
    let horizon = cfg.horizon.expect("validated");
    let harmonics = cfg.harmonics.unwrap_or(2);
    let strategy = strategy_of(cfg.seed_strategy());
    let result = seeded_run(chain, horizon, harmonics, strategy).map_err(classify)?;
    let mut table = Table::new(SWEEP_HEADER);
    optimum_row(&mut table, horizon, &result);
    out.tables.push((format!("{stem}.csv"), table.finish()));
    out.resolved.insert("seed_strategy".into(), json!(format!("{:?}", result.seed_strategy)));
    out.resolved.insert("status".into(), json!(format!("{:?}", result.status)));
    out.resolved.insert("gradient_norm".into(), json!(result.gradient_norm_final));
    Ok(())
}

fn sweep(
    cfg: &RunConfig,
    chain: &ChainConfig,
    stem: &str,
    out: &mut Artifacts,
) -> Result<(), Failure> {
    let grid = cfg.horizons.clone().expect("validated");
    let harmonics = cfg.harmonics.unwrap_or(2);
    let strategy = strategy_of(cfg.seed_strategy());
    // Continuation chains each optimum into the next seed, so it runs
    // in order; the other strategies score horizons independently.
    let results: Vec<OptimizationResult> = if strategy == SeedStrategy::Continuation {
        sweep_horizons(chain, &grid, strategy).map_err(classify)?
    } else {
        grid.par_iter()
            .map(|&horizon| seeded_run(chain, horizon, harmonics, strategy))
            .collect::<spinstitch::Result<Vec<_>>>()
            .map_err(classify)?
    };
    let mut table = Table::new(SWEEP_HEADER);
    for (horizon, result) in grid.iter().zip(&results) {
        optimum_row(&mut table, *horizon, result);
    }
    out.tables.push((format!("{stem}.csv"), table.finish()));

    // The analytic gamma maxima on the same grid: the published tabulation
    // this sweep is usually compared against.
    let mut table1 = Table::new("T,a2_opt,gamma,gamma_over_T");
    for &horizon in &grid {
        let (a2, gamma) = maximize_gamma(horizon);
        table1.row(&[
            Cell::Float(horizon),
            Cell::Float(a2),
            Cell::Float(gamma),
            Cell::Float(gamma / horizon),
        ]);
    }
    out.tables.push((format!("{stem}_table1.csv"), table1.finish()));
    out.scripts.push((format!("{stem}.gp"), plots::sweep(stem)));
    out.resolved.insert("seed_strategy".into(), json!(cfg.seed_strategy()));
    out.resolved.insert("horizons".into(), json!(grid));
    Ok(())
}

fn landscape(
    cfg: &RunConfig,
    chain: &ChainConfig,
    stem: &str,
    out: &mut Artifacts,
) -> Result<(), Failure> {
    let horizon = cfg.horizon.expect("validated");
    let (a1_lo, a1_hi) = cfg.a1_range.expect("validated");
    let (a2_lo, a2_hi) = cfg.a2_range.expect("validated");
    let (n1, n2) = cfg.resolution.expect("validated");
    let pair = ground_pair(chain).map_err(classify)?;
    let axis = |lo: f64, hi: f64, n: usize, i: usize| lo + (hi - lo) * i as f64 / (n - 1) as f64;

    let points: Vec<(f64, f64)> = (0..n1)
        .flat_map(|i1| {
            let a1 = axis(a1_lo, a1_hi, n1, i1);
            (0..n2).map(move |i2| (a1, axis(a2_lo, a2_hi, n2, i2)))
        })
        .collect();
    let fidelities: Vec<f64> = points
        .par_iter()
        .map(|&(a1, a2)| {
            let params = ControlParams::new(vec![a1, a2], horizon)?;
            let report = infidelity_for_pair(chain, &params, &EvolutionSpec::new(1), &pair)?;
            Ok(report.fidelity)
        })
        .collect::<spinstitch::Result<Vec<_>>>()
        .map_err(classify)?;

    let mut table = Table::new("a1,a2,fidelity");
    for ((a1, a2), fidelity) in points.iter().zip(&fidelities) {
        table.row(&[Cell::Float(*a1), Cell::Float(*a2), Cell::Float(*fidelity)]);
    }
    out.tables.push((format!("{stem}.csv"), table.finish()));
    out.scripts.push((format!("{stem}.gp"), plots::landscape(stem)));
    out.resolved.insert("points".into(), json!(n1 * n2));
    Ok(())
}

fn qsl(
    cfg: &RunConfig,
    chain: &ChainConfig,
    stem: &str,
    out: &mut Artifacts,
) -> Result<(), Failure> {
    let grid = cfg.horizons.clone().expect("validated");
    let harmonics = cfg.harmonics.unwrap_or(2);
    let strategy = strategy_of(cfg.seed_strategy());
    let rows: Vec<(f64, f64, f64, Option<f64>)> = grid
        .par_iter()
        .map(|&horizon| {
            let opt = seeded_run(chain, horizon, harmonics, strategy)?;
            let params = ControlParams::new(opt.a_opt, horizon)?;
            // Double the floor so the Bures angle and the energy integral
            // are already in their refinement plateau.
            let steps = 2 * step_floor(chain, horizon, params.coupling_bound());
            let report = qsl_ratio(chain, &params, &EvolutionSpec::new(steps))?;
            Ok((report.bures_angle, report.energy_integral, report.t_qsl, report.ratio))
        })
        .collect::<spinstitch::Result<Vec<_>>>()
        .map_err(classify)?;

    let mut table = Table::new("T,bures_angle,energy_integral,t_qsl,ratio");
    for (&horizon, (bures, energy, t_qsl, ratio)) in grid.iter().zip(&rows) {
        table.row(&[
            Cell::Float(horizon),
            Cell::Float(*bures),
            Cell::Float(*energy),
            Cell::Float(*t_qsl),
            Cell::Float(ratio.unwrap_or(f64::NAN)),
        ]);
    }
    out.tables.push((format!("{stem}.csv"), table.finish()));
    out.scripts.push((format!("{stem}.gp"), plots::qsl(stem)));
    out.resolved.insert("seed_strategy".into(), json!(cfg.seed_strategy()));
    Ok(())
}

fn coefficients(chain: &ChainConfig, stem: &str, out: &mut Artifacts) -> Result<(), Failure> {
    let law = spinstitch::approximation::linear_law(chain, &[]).map_err(classify)?;
    let k = law.coefficients;
    let mut table = Table::new("f0,fZ,Im_fXY,F1,F2,K_gamma,slope");
    table.row(&[
        Cell::Float(k.f0),
        Cell::Float(k.f_z),
        Cell::Float(k.f_xy_imag),
        Cell::Float(k.f1),
        Cell::Float(k.f2),
        Cell::Float(k.k_gamma),
        Cell::Float(k.slope),
    ]);
    out.tables.push((format!("{stem}.csv"), table.finish()));
    out.resolved.insert("r0".into(), json!(law.r0));
    Ok(())
}
