//! Run configuration: one JSON file describes one reproducible task.

use serde::{Deserialize, Serialize};
use spinstitch::spin_model::ChainConfig;

/// Which computation a config file requests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    /// Full spectrum of H(g) at one coupling.
    Spectrum,
    /// Ground-state gap on the g in [0, 1] grid.
    GapSweep,
    /// Propagate one control and run the step-refinement check.
    Evolve,
    /// Minimize the infidelity at one horizon.
    Optimize,
    /// Optimize across a horizon grid; also tabulates the gamma maxima.
    Sweep,
    /// Fidelity over an (a1, a2) rectangle at fixed horizon.
    Landscape,
    /// Speed-limit ratio of the optimized drive across a horizon grid.
    Qsl,
    /// Endpoint overlap coefficients and the short-time slope.
    Coefficients,
}

impl Task {
    /// Default output stem, also the conventional CSV name.
    pub fn stem(self) -> &'static str {
        match self {
            Task::Spectrum => "spectrum",
            Task::GapSweep => "gap_sweep",
            Task::Evolve => "evolve",
            Task::Optimize => "optimize",
            Task::Sweep => "sweep",
            Task::Landscape => "landscape",
            Task::Qsl => "qsl",
            Task::Coefficients => "coefficients",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Seed {
    Cold,
    Analytic,
    Continuation,
    Best,
}

/// Chain parameters as they appear in config files. Coupling and the
/// degeneracy offset rarely move, so they default to the values
/// `ChainConfig::new` would pick.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSpec {
    pub n_spins: usize,
    pub field: f64,
    #[serde(default = "default_coupling")]
    pub coupling: f64,
    #[serde(default = "default_offset")]
    pub degeneracy_offset: f64,
}

fn default_coupling() -> f64 {
    1.0
}

fn default_offset() -> f64 {
    1e-8
}

impl ChainSpec {
    pub fn build(&self) -> spinstitch::Result<ChainConfig> {
        ChainConfig::custom(self.n_spins, self.coupling, self.field, self.degeneracy_offset)
    }
}

/// Everything a run needs. Task-specific knobs are optional here and
/// checked for completeness once the task is known.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub chain: ChainSpec,
    pub task: Task,
    /// Horizon for single-T tasks (evolve, optimize, landscape).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    /// Horizon grid for sweep and qsl.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizons: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed_strategy: Option<Seed>,
    /// Number of control harmonics; the tabular schemas fix this at 2.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub harmonics: Option<usize>,
    /// Control amplitudes for the evolve task.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<f64>>,
    /// Explicit step count for the evolve task; omitted means the floor.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    /// Coupling value for the spectrum task.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    /// Grid size for the gap sweep.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a1_range: Option<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a2_range: Option<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<(usize, usize)>,
    /// Output file stem; defaults to the task name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    /// Reserved: every current task is deterministic.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rng_seed: Option<u64>,
}

impl RunConfig {
    pub fn stem(&self) -> String {
        self.output.clone().unwrap_or_else(|| self.task.stem().to_string())
    }

    pub fn seed_strategy(&self) -> Seed {
        self.seed_strategy.unwrap_or(Seed::Analytic)
    }

    /// Completeness and range checks that serde cannot express. Returns a
    /// human-readable complaint for exit code 2.
    pub fn validate(&self) -> Result<(), String> {
        let need_horizon = |value: Option<f64>, task: &str| match value {
            None => Err(format!("task {task} needs a positive `horizon`")),
            Some(t) if t > 0.0 && t.is_finite() => Ok(()),
            Some(t) => Err(format!("task {task} needs a positive `horizon`, got {t}")),
        };
        let need_horizons = |value: &Option<Vec<f64>>, task: &str| match value {
            None => Err(format!("task {task} needs a non-empty `horizons` list")),
            Some(grid) if grid.is_empty() => {
                Err(format!("task {task} needs a non-empty `horizons` list"))
            }
            Some(grid) => {
                if grid.iter().all(|t| *t > 0.0 && t.is_finite()) {
                    Ok(())
                } else {
                    Err(format!("task {task}: every horizon must be positive and finite"))
                }
            }
        };
        if let Some(k) = self.harmonics {
            if !(1..=2).contains(&k) {
                return Err(format!(
                    "`harmonics` must be 1 or 2 (the sweep tables have exactly two \
                     amplitude columns), got {k}"
                ));
            }
        }
        match self.task {
            Task::Spectrum => {
                if let Some(g) = self.g {
                    if !g.is_finite() {
                        return Err(format!("`g` must be finite, got {g}"));
                    }
                }
                Ok(())
            }
            Task::GapSweep => match self.grid_points {
                Some(p) if p < 2 => Err(format!("`grid_points` must be at least 2, got {p}")),
                _ => Ok(()),
            },
            Task::Evolve => {
                need_horizon(self.horizon, "evolve")?;
                match &self.amplitudes {
                    None => Err("task evolve needs an `amplitudes` list".to_string()),
                    Some(a) if a.is_empty() => {
                        Err("task evolve needs a non-empty `amplitudes` list".to_string())
                    }
                    Some(a) if a.iter().any(|x| !x.is_finite()) => {
                        Err("task evolve: every amplitude must be finite".to_string())
                    }
                    Some(_) => Ok(()),
                }?;
                if self.steps == Some(0) {
                    return Err("`steps` must be positive when given".to_string());
                }
                Ok(())
            }
            Task::Optimize | Task::Landscape => {
                need_horizon(self.horizon, self.task.stem())?;
                if self.task == Task::Landscape {
                    for (name, range) in
                        [("a1_range", self.a1_range), ("a2_range", self.a2_range)]
                    {
                        match range {
                            None => {
                                return Err(format!("task landscape needs `{name}` as [lo, hi]"))
                            }
                            Some((lo, hi)) if lo >= hi || !lo.is_finite() || !hi.is_finite() => {
                                return Err(format!("`{name}` must satisfy lo < hi"))
                            }
                            Some(_) => {}
                        }
                    }
                    match self.resolution {
                        None => return Err("task landscape needs `resolution` as [n1, n2]".into()),
                        Some((n1, n2)) if n1 < 2 || n2 < 2 => {
                            return Err("`resolution` needs at least 2 points per axis".into())
                        }
                        Some(_) => {}
                    }
                }
                Ok(())
            }
            Task::Sweep | Task::Qsl => need_horizons(&self.horizons, self.task.stem()),
            Task::Coefficients => Ok(()),
        }
    }
}
