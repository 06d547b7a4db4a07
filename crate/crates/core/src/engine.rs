//! Full simulation runs.
//!
//! Clock convention: the clock starts at 0 and step `t` advances it to
//! `t + 1`. Everything that happens during a step (arrivals, measurement
//! passages, queued agents entering) is stamped with the clock after it.
//! Times in [`RunMetrics`] are those stamps multiplied by the timestep.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::grid::{CellKind, Grid, Occupancy, Pos};
use crate::model::{self, Agent, CouplingParams, Move, SpeedDistribution};
use crate::potential::{self, CostModel, PotentialField};
use crate::sight::SightTable;
use crate::{Error, Result};

/// An immutable grid with its empty-geometry field, shared by any number of
/// runs.
#[derive(Debug, Clone)]
pub struct Geometry {
    grid: Grid,
    static_field: PotentialField,
    origin: Vec<usize>,
}

impl Geometry {
    /// Validates that the grid is runnable and that every origin cell can
    /// reach a destination.
    pub fn new(grid: Grid) -> Result<Self> {
        grid.check_runnable()?;
        let static_field = potential::static_field(&grid)?;
        let origin = grid.indices_of(CellKind::Origin);
        if let Some(&bad) = origin.iter().find(|&&i| !static_field.is_finite_at(i)) {
            let p = grid.pos(bad);
            return Err(Error::UnreachableOrigin { x: p.x, y: p.y });
        }
        Ok(Geometry {
            grid,
            static_field,
            origin,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn static_field(&self) -> &PotentialField {
        &self.static_field
    }

    pub fn origin_cells(&self) -> &[usize] {
        &self.origin
    }
}

/// Whether the dynamic field is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DynamicField {
    /// Computed unless it is identically zero (`k_Sdyn = 0` or `s_add = 1`).
    #[default]
    Auto,
    /// Computed every step, even when it cannot matter.
    Always,
    /// Never computed; agents only see the static field.
    Disabled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub agent_count: u32,
    pub cost: CostModel,
    pub coupling: CouplingParams,
    pub speeds: SpeedDistribution,
    /// Seconds per step.
    pub timestep: f64,
    pub seed: u64,
    /// Step budget; a run still going after this many steps is cut off.
    pub t_max: u32,
    pub dynamic: DynamicField,
}

impl RunConfig {
    /// 4000 agents, `s_add = 1`, `k_S = 1`, `k_Sdyn = 0`, speeds around
    /// 1.6 m/s, 1 s steps, 5000 steps.
    pub fn new(cell_size: f64) -> Result<Self> {
        Ok(RunConfig {
            agent_count: 4000,
            cost: CostModel::uniform(),
            coupling: CouplingParams::default(),
            speeds: SpeedDistribution::around_median(1.6, cell_size, 1.0)?,
            timestep: 1.0,
            seed: 0,
            t_max: 5000,
            dynamic: DynamicField::Auto,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.agent_count == 0 {
            return Err(Error::InvalidConfig("agent count must be at least 1"));
        }
        if self.t_max == 0 {
            return Err(Error::InvalidConfig("t_max must be at least 1"));
        }
        if !(self.timestep.is_finite() && self.timestep > 0.0) {
            return Err(Error::InvalidConfig("timestep must be positive"));
        }
        Ok(())
    }

    fn uses_dynamic_field(&self) -> bool {
        match self.dynamic {
            DynamicField::Auto => !self.cost.is_uniform() && self.coupling.k_sdyn() != 0.0,
            DynamicField::Always => true,
            DynamicField::Disabled => false,
        }
    }
}

/// Per-agent outcome of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AgentRecord {
    pub id: u32,
    pub injected_at: Option<u32>,
    pub arrived_at: Option<u32>,
    pub passed_measurement: bool,
    pub measured_at: Option<u32>,
}

impl From<&Agent> for AgentRecord {
    fn from(a: &Agent) -> Self {
        AgentRecord {
            id: a.id,
            injected_at: a.injected_at,
            arrived_at: a.arrived_at,
            passed_measurement: a.passed_measurement,
            measured_at: a.measured_at,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunMetrics {
    /// Seconds until the last arrival.
    pub total_time: f64,
    /// Mean over arrived agents of the time between entering and arriving,
    /// in seconds.
    pub mean_egress: f64,
    /// Agents that crossed a measurement cell.
    pub longer_corridor_load: u32,
    pub records: Vec<AgentRecord>,
    /// Whether every agent arrived within `t_max`.
    pub completed: bool,
    /// Steps executed.
    pub steps: u32,
}

impl RunMetrics {
    fn collect(agents: &[Agent], timestep: f64, completed: bool, steps: u32) -> Self {
        let mut last = 0u32;
        let mut egress_sum = 0u64;
        let mut arrived = 0u64;
        let mut load = 0;
        for a in agents {
            if let (Some(arr), Some(inj)) = (a.arrived_at, a.injected_at) {
                last = last.max(arr);
                egress_sum += u64::from(arr - inj);
                arrived += 1;
            }
            if a.passed_measurement {
                load += 1;
            }
        }
        let mean_egress = if arrived == 0 {
            0.0
        } else {
            egress_sum as f64 / arrived as f64 * timestep
        };
        RunMetrics {
            total_time: last as f64 * timestep,
            mean_egress,
            longer_corridor_load: load,
            records: agents.iter().map(AgentRecord::from).collect(),
            completed,
            steps,
        }
    }
}

/// A run in progress. [`run`] drives one to the end; stepping by hand gives
/// access to the state between steps.
pub struct Simulation<'g> {
    geometry: &'g Geometry,
    config: RunConfig,
    rng: ChaCha8Rng,
    sight: SightTable,
    agents: Vec<Agent>,
    occupancy: Occupancy,
    queue: VecDeque<u32>,
    active: Vec<u32>,
    arrived: u32,
    clock: u32,
    dynamic: Option<PotentialField>,
    candidates: Vec<Pos>,
    weights: Vec<f64>,
    free_origin: Vec<usize>,
}

impl<'g> Simulation<'g> {
    /// Draws every agent's speed (in id order), then places as many agents
    /// as fit on randomly chosen origin cells. The rest wait in a queue.
    pub fn new(geometry: &'g Geometry, config: RunConfig) -> Result<Self> {
        config.validate()?;
        let grid = geometry.grid();
        if geometry.origin_cells().is_empty() {
            return Err(Error::NoOrigin);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let agents: Vec<Agent> = (0..config.agent_count)
            .map(|id| Agent::new(id, config.speeds.sample(&mut rng)))
            .collect();
        let mut sim = Simulation {
            geometry,
            sight: SightTable::new(config.speeds.max_speed()),
            config,
            rng,
            agents,
            occupancy: Occupancy::empty(grid),
            queue: VecDeque::new(),
            active: Vec::new(),
            arrived: 0,
            clock: 0,
            dynamic: None,
            candidates: Vec::new(),
            weights: Vec::new(),
            free_origin: Vec::new(),
        };
        sim.queue.extend(0..sim.config.agent_count);
        sim.inject();
        Ok(sim)
    }

    /// Moves queued agents, in id order, onto free origin cells taken in
    /// random order.
    fn inject(&mut self) {
        if self.queue.is_empty() {
            return;
        }
        let geometry = self.geometry;
        let grid = geometry.grid();
        self.free_origin.clear();
        self.free_origin.extend(
            geometry
                .origin_cells()
                .iter()
                .copied()
                .filter(|&i| !self.occupancy.is_occupied(i)),
        );
        self.free_origin.shuffle(&mut self.rng);
        for &cell in &self.free_origin {
            let Some(id) = self.queue.pop_front() else { break };
            let agent = &mut self.agents[id as usize];
            agent.position = grid.pos(cell);
            agent.injected_at = Some(self.clock);
            self.occupancy.occupy(cell);
            self.active.push(id);
        }
    }

    /// Advances the clock by one step. Returns `false` once the run is over
    /// (everyone arrived or the step budget is used up) without doing
    /// anything.
    pub fn step(&mut self) -> Result<bool> {
        if self.is_finished() {
            return Ok(false);
        }
        let geometry = self.geometry;
        let grid = geometry.grid();
        let static_field = geometry.static_field();
        self.dynamic = if self.config.uses_dynamic_field() {
            Some(potential::dynamic_field(
                grid,
                &self.occupancy,
                self.config.cost,
                static_field,
            )?)
        } else {
            None
        };

        self.active.shuffle(&mut self.rng);
        let stamp = self.clock + 1;
        for k in 0..self.active.len() {
            let agent = &mut self.agents[self.active[k] as usize];
            model::candidate_cells(
                agent.position,
                agent.v_max,
                grid,
                &self.occupancy,
                &self.sight,
                &mut self.candidates,
            );
            model::move_weights(
                &self.candidates,
                static_field,
                self.dynamic.as_ref(),
                self.config.coupling,
                &mut self.weights,
            );
            let outcome = model::step_agent(
                agent,
                &self.candidates,
                &self.weights,
                &mut self.rng,
                grid,
                &mut self.occupancy,
                stamp,
            );
            if let Move::Arrived(_) = outcome {
                self.arrived += 1;
            }
        }
        let agents = &self.agents;
        self.active
            .retain(|&id| agents[id as usize].arrived_at.is_none());
        self.clock = stamp;
        self.inject();
        Ok(true)
    }

    pub fn is_finished(&self) -> bool {
        self.arrived == self.config.agent_count || self.clock >= self.config.t_max
    }

    pub fn clock(&self) -> u32 {
        self.clock
    }

    pub fn queued(&self) -> usize {
        self.queue.len()
    }

    pub fn in_system(&self) -> usize {
        self.active.len()
    }

    pub fn arrived(&self) -> usize {
        self.arrived as usize
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn occupancy(&self) -> &Occupancy {
        &self.occupancy
    }

    pub fn geometry(&self) -> &'g Geometry {
        self.geometry
    }

    /// Dynamic field used in the most recent step, if one was computed.
    pub fn dynamic_field(&self) -> Option<&PotentialField> {
        self.dynamic.as_ref()
    }

    pub fn into_metrics(self) -> RunMetrics {
        let completed = self.arrived == self.config.agent_count;
        RunMetrics::collect(&self.agents, self.config.timestep, completed, self.clock)
    }
}

/// Runs a simulation to the end. A pure function of its inputs.
pub fn run(geometry: &Geometry, config: RunConfig) -> Result<RunMetrics> {
    let mut sim = Simulation::new(geometry, config)?;
    while sim.step()? {}
    Ok(sim.into_metrics())
}
