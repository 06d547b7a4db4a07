//! Parameter sweeps over `(s_add, k_Sdyn)`.
//!
//! Every `(point, run)` pair gets its own seed, derived from the base seed,
//! the point's position in the lattice and the run index. Adding runs or
//! changing the thread count never changes existing samples.

use ddpf_core::stats::Summary;
use ddpf_core::{engine, CostModel, CouplingParams, Geometry, RunConfig};
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SpecError {
    #[error("{0} list is empty")]
    EmptyList(&'static str),
    #[error("{0} values must be strictly increasing")]
    NotIncreasing(&'static str),
    #[error("runs per point must be at least 1")]
    NoRuns,
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub s_add: Vec<f64>,
    pub k_sdyn: Vec<f64>,
    pub runs: u32,
    pub base_seed: u64,
    /// Everything but cost, dynamic coupling and seed, which the sweep sets.
    pub base: RunConfig,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), SpecError> {
        for (name, list) in [("s_add", &self.s_add), ("k_sdyn", &self.k_sdyn)] {
            if list.is_empty() {
                return Err(SpecError::EmptyList(name));
            }
            if list.windows(2).any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less)) {
                return Err(SpecError::NotIncreasing(name));
            }
        }
        if self.runs == 0 {
            return Err(SpecError::NoRuns);
        }
        Ok(())
    }

    /// Lattice points in `s_add`-major order.
    pub fn points(&self) -> Vec<(f64, f64)> {
        self.s_add
            .iter()
            .flat_map(|&s| self.k_sdyn.iter().map(move |&k| (s, k)))
            .collect()
    }

    /// Run configuration for one sample.
    pub fn config(&self, point: usize, run: u32) -> ddpf_core::Result<RunConfig> {
        let (s_add, k_sdyn) = self.points()[point];
        Ok(RunConfig {
            cost: CostModel::new(s_add)?,
            coupling: CouplingParams::new(self.base.coupling.k_s(), k_sdyn)?,
            seed: run_seed(self.base_seed, point as u64, u64::from(run)),
            ..self.base.clone()
        })
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of run `run` at lattice point `point`.
pub fn run_seed(base: u64, point: u64, run: u64) -> u64 {
    splitmix64(splitmix64(base ^ splitmix64(point)) ^ run)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSample {
    pub seed: u64,
    pub total_time: f64,
    pub mean_egress: f64,
    pub load: u32,
    pub completed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub s_add: f64,
    pub k_sdyn: f64,
    /// Samples in run order.
    pub samples: Vec<RunSample>,
    /// Why the point could not be run, if it could not.
    pub error: Option<String>,
}

impl SweepPoint {
    fn summary(&self, f: impl Fn(&RunSample) -> f64) -> Option<Summary> {
        let xs: Vec<f64> = self.samples.iter().map(f).collect();
        Summary::of(&xs)
    }

    pub fn total_time(&self) -> Option<Summary> {
        self.summary(|s| s.total_time)
    }

    pub fn mean_egress(&self) -> Option<Summary> {
        self.summary(|s| s.mean_egress)
    }

    pub fn load(&self) -> Option<Summary> {
        self.summary(|s| f64::from(s.load))
    }

    pub fn failed(&self) -> bool {
        self.error.is_some()
    }

    /// Runs that hit the step budget before everyone arrived.
    pub fn incomplete_runs(&self) -> usize {
        self.samples.iter().filter(|s| !s.completed).count()
    }
}

/// Runs every sample of the sweep, in parallel. A point whose parameters
/// are rejected is returned with `error` set and no samples; the other
/// points are unaffected.
pub fn run_sweep(geometry: &Geometry, spec: &SweepSpec) -> Result<Vec<SweepPoint>, SpecError> {
    spec.validate()?;
    let points = spec.points();
    let jobs: Vec<(usize, u32)> = (0..points.len())
        .flat_map(|p| (0..spec.runs).map(move |r| (p, r)))
        .collect();
    let results: Vec<Result<RunSample, String>> = jobs
        .par_iter()
        .map(|&(p, r)| {
            let cfg = spec.config(p, r).map_err(|e| e.to_string())?;
            let seed = cfg.seed;
            let m = engine::run(geometry, cfg).map_err(|e| e.to_string())?;
            Ok(RunSample {
                seed,
                total_time: m.total_time,
                mean_egress: m.mean_egress,
                load: m.longer_corridor_load,
                completed: m.completed,
            })
        })
        .collect();

    let mut out = Vec::with_capacity(points.len());
    for (p, chunk) in results.chunks(spec.runs as usize).enumerate() {
        let (s_add, k_sdyn) = points[p];
        let mut point = SweepPoint {
            s_add,
            k_sdyn,
            samples: Vec::with_capacity(chunk.len()),
            error: None,
        };
        for r in chunk {
            match r {
                Ok(s) => point.samples.push(*s),
                Err(e) => {
                    point.samples.clear();
                    point.error = Some(e.clone());
                    break;
                }
            }
        }
        out.push(point);
    }
    Ok(out)
}
