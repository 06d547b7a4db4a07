//! Cellular-automaton agents descending the floor fields.
//!
//! Each step an agent looks at every cell it could reach this step (within
//! its speed, free, and in sight), weights each by
//! `exp(-k_S * S0(c)) * exp(-k_Sdyn * S_dyn(c))`, and samples one.

use alloc::vec::Vec;

use rand::Rng;

use crate::grid::{CellKind, Grid, Occupancy, Pos};
use crate::potential::PotentialField;
use crate::sight::SightTable;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Agent {
    pub id: u32,
    pub position: Pos,
    /// Maximum hop length in cells per step.
    pub v_max: u32,
    pub injected_at: Option<u32>,
    pub arrived_at: Option<u32>,
    pub passed_measurement: bool,
    /// Step at which the agent first stood on a measurement cell.
    pub measured_at: Option<u32>,
}

impl Agent {
    pub fn new(id: u32, v_max: u32) -> Self {
        Agent {
            id,
            position: Pos::new(-1, -1),
            v_max,
            injected_at: None,
            arrived_at: None,
            passed_measurement: false,
            measured_at: None,
        }
    }

    pub fn in_system(&self) -> bool {
        self.injected_at.is_some() && self.arrived_at.is_none()
    }
}

/// Discrete distribution of per-agent maximum speeds (cells per step).
#[derive(Debug, Clone, PartialEq)]
pub struct SpeedDistribution {
    support: Vec<(u32, f64)>,
    median_speed: f64,
}

impl SpeedDistribution {
    /// `support` lists `(v_max, probability)`; probabilities must sum to 1.
    pub fn new(mut support: Vec<(u32, f64)>, cell_size: f64, timestep: f64) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::InvalidSpeeds("empty support"));
        }
        if support.iter().any(|&(v, p)| v == 0 || !(p.is_finite() && p >= 0.0)) {
            return Err(Error::InvalidSpeeds(
                "speeds must be >= 1 cell/step and probabilities nonnegative",
            ));
        }
        let total: f64 = support.iter().map(|&(_, p)| p).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidSpeeds("probabilities must sum to 1"));
        }
        if !(cell_size > 0.0 && timestep > 0.0) {
            return Err(Error::InvalidSpeeds("cell size and timestep must be positive"));
        }
        support.sort_by_key(|&(v, _)| v);
        let mut cdf = 0.0;
        let mut median = support[support.len() - 1].0;
        for &(v, p) in &support {
            cdf += p;
            if cdf >= 0.5 - 1e-12 {
                median = v;
                break;
            }
        }
        Ok(SpeedDistribution {
            support,
            median_speed: median as f64 * cell_size / timestep,
        })
    }

    /// `{m-1, m, m+1}` cells/step with probabilities `{1/4, 1/2, 1/4}`, where
    /// `m` is the speed closest to `median_speed` m/s.
    ///
    /// With 0.4 m cells, 1 s steps and 1.6 m/s this is `{3, 4, 5}`.
    pub fn around_median(median_speed: f64, cell_size: f64, timestep: f64) -> Result<Self> {
        let m = libm::round(median_speed * timestep / cell_size);
        if !(2.0..1000.0).contains(&m) {
            return Err(Error::InvalidSpeeds(
                "median speed must be at least 2 cells per step",
            ));
        }
        let m = m as u32;
        SpeedDistribution::new(
            alloc::vec![(m - 1, 0.25), (m, 0.5), (m + 1, 0.25)],
            cell_size,
            timestep,
        )
    }

    /// Everyone walks `v_max` cells per step.
    pub fn constant(v_max: u32, cell_size: f64, timestep: f64) -> Result<Self> {
        SpeedDistribution::new(alloc::vec![(v_max, 1.0)], cell_size, timestep)
    }

    pub fn support(&self) -> &[(u32, f64)] {
        &self.support
    }

    /// Median maximum speed in m/s.
    pub fn median_speed(&self) -> f64 {
        self.median_speed
    }

    pub fn max_speed(&self) -> u32 {
        self.support.iter().map(|&(v, _)| v).max().unwrap_or(1)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        let u: f64 = rng.gen();
        let mut cdf = 0.0;
        for &(v, p) in &self.support {
            cdf += p;
            if u < cdf {
                return v;
            }
        }
        self.support[self.support.len() - 1].0
    }
}

/// Strength of the static and dynamic field in the move probabilities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingParams {
    k_s: f64,
    k_sdyn: f64,
}

impl CouplingParams {
    pub fn new(k_s: f64, k_sdyn: f64) -> Result<Self> {
        for (name, value) in [("k_S", k_s), ("k_Sdyn", k_sdyn)] {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::InvalidCoupling { name, value });
            }
        }
        Ok(CouplingParams { k_s, k_sdyn })
    }

    pub fn k_s(&self) -> f64 {
        self.k_s
    }

    pub fn k_sdyn(&self) -> f64 {
        self.k_sdyn
    }
}

impl Default for CouplingParams {
    fn default() -> Self {
        CouplingParams {
            k_s: 1.0,
            k_sdyn: 0.0,
        }
    }
}

/// Cells the agent at `from` may move to this step, in row-major order.
///
/// Every walkable, unoccupied cell within Chebyshev distance `v_max` whose
/// center is in sight, plus the agent's own cell. `sight` must cover
/// `v_max`.
pub fn candidate_cells(
    from: Pos,
    v_max: u32,
    grid: &Grid,
    occupancy: &Occupancy,
    sight: &SightTable,
    out: &mut Vec<Pos>,
) {
    out.clear();
    let r = v_max.min(sight.radius()) as i32;
    for dy in -r..=r {
        for dx in -r..=r {
            let to = from.offset(dx, dy);
            if (dx, dy) == (0, 0) {
                out.push(to);
                continue;
            }
            let Some(i) = grid.index(to) else { continue };
            if !grid.kind_at(i).is_walkable() || occupancy.is_occupied(i) {
                continue;
            }
            if sight.visible(grid, from, to) {
                out.push(to);
            }
        }
    }
}

/// Normalized move probabilities for `candidates`.
///
/// `weight(c) ~ exp(-k_S * S0(c) - k_Sdyn * S_dyn(c))`; without a dynamic
/// field the second term is dropped. The smallest exponent is shifted to 0
/// before exponentiating.
pub fn move_weights(
    candidates: &[Pos],
    static_field: &PotentialField,
    dynamic: Option<&PotentialField>,
    params: CouplingParams,
    out: &mut Vec<f64>,
) {
    out.clear();
    out.extend(candidates.iter().map(|&c| {
        let base = params.k_s * static_field.at(c);
        match dynamic {
            Some(d) => base + params.k_sdyn * d.at(c),
            None => base,
        }
    }));
    let lowest = out.iter().copied().fold(f64::INFINITY, f64::min);
    assert!(lowest.is_finite(), "no candidate has a finite potential");
    let mut total = 0.0;
    for w in out.iter_mut() {
        *w = libm::exp(lowest - *w);
        total += *w;
    }
    for w in out.iter_mut() {
        *w /= total;
    }
}

/// Index picked by inverse CDF for a uniform draw `u` in `[0, 1)`.
pub fn sample_index(weights: &[f64], u: f64) -> usize {
    let mut cdf = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        cdf += w;
        if u < cdf {
            return i;
        }
    }
    // rounding left the total a hair below u; take the last nonzero weight
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(0)
}

/// What happened to an agent in one step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    Stayed,
    Moved(Pos),
    Arrived(Pos),
}

/// Samples a target from `weights` and carries out the move.
///
/// Occupancy follows the agent; entering a destination removes it from the
/// grid and stamps `arrived_at = clock`. Entering a measurement cell for the
/// first time stamps `measured_at = clock`.
#[allow(clippy::too_many_arguments)]
pub fn step_agent<R: Rng + ?Sized>(
    agent: &mut Agent,
    candidates: &[Pos],
    weights: &[f64],
    rng: &mut R,
    grid: &Grid,
    occupancy: &mut Occupancy,
    clock: u32,
) -> Move {
    let u: f64 = rng.gen();
    let target = candidates[sample_index(weights, u)];
    if target == agent.position {
        return Move::Stayed;
    }
    let from = grid.index(agent.position).expect("agent is on the grid");
    let to = grid.index(target).expect("candidate is on the grid");
    assert!(!occupancy.is_occupied(to), "target cell {target:?} is occupied");
    occupancy.vacate(from);
    agent.position = target;
    match grid.kind_at(to) {
        CellKind::Destination => {
            agent.arrived_at = Some(clock);
            Move::Arrived(target)
        }
        kind => {
            occupancy.occupy(to);
            if kind == CellKind::Measurement && !agent.passed_measurement {
                agent.passed_measurement = true;
                agent.measured_at = Some(clock);
            }
            Move::Moved(target)
        }
    }
}
