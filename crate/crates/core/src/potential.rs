//! Wavefront distance fields and the dynamic potential.
//!
//! Two fills run from the destination set: one over the von Neumann
//! neighborhood (Manhattan metric) and one over the Moore neighborhood with
//! unit-cost diagonals (Chebyshev metric). Entering a cell costs 1, or
//! `s_add` when an agent stands on it. Per cell, `S_C` and `S_m = S_M - S_C`
//! are the longer and shorter legs of a right triangle, so
//! `sqrt(S_C^2 + S_m^2)` recovers the Euclidean distance wherever the
//! destination is in plain sight.
//!
//! The dynamic potential is that combined field on the current occupancy
//! minus the same field on the empty geometry: the extra way the crowd
//! currently costs, per cell.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;

use crate::grid::{CellKind, Grid, Occupancy, Pos};
use crate::queue::{BucketQueue, MinEntry};
use crate::{Error, Result};

/// Value of cells no walkable path reaches (and of walls).
pub const INFINITE: f64 = f64::INFINITY;

/// Slack allowed when checking `S_M >= S_C` on real-valued costs.
const CONSISTENCY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Neighborhood {
    /// 4 orthogonal neighbors.
    VonNeumann,
    /// 8 neighbors, diagonals at the same cost as orthogonal steps.
    Moore,
}

impl Neighborhood {
    pub fn offsets(self) -> &'static [(i32, i32)] {
        const VON_NEUMANN: [(i32, i32); 4] = [(0, -1), (-1, 0), (1, 0), (0, 1)];
        const MOORE: [(i32, i32); 8] = [
            (-1, -1),
            (0, -1),
            (1, -1),
            (-1, 0),
            (1, 0),
            (-1, 1),
            (0, 1),
            (1, 1),
        ];
        match self {
            Neighborhood::VonNeumann => &VON_NEUMANN,
            Neighborhood::Moore => &MOORE,
        }
    }
}

/// Cost of entering a cell during a fill: 1 when empty, `s_add` when an
/// agent stands on it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostModel {
    s_add: f64,
}

impl CostModel {
    pub fn new(s_add: f64) -> Result<Self> {
        if !(s_add.is_finite() && s_add >= 1.0) {
            return Err(Error::InvalidSAdd(s_add));
        }
        Ok(CostModel { s_add })
    }

    /// Occupied cells cost the same as empty ones.
    pub fn uniform() -> Self {
        CostModel { s_add: 1.0 }
    }

    pub fn s_add(&self) -> f64 {
        self.s_add
    }

    pub fn is_uniform(&self) -> bool {
        self.s_add == 1.0
    }

    /// `s_add` as an integer step, when it is one small enough for a bucket
    /// queue.
    fn integral(&self) -> Option<u32> {
        let s = self.s_add;
        (libm::trunc(s) == s && s <= 65_536.0).then_some(s as u32)
    }
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel::uniform()
    }
}

/// Per-cell scalar field over a grid. Walls and unreachable cells hold
/// [`INFINITE`].
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialField {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl PotentialField {
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::ZeroDimensions { width, height });
        }
        if values.len() != width * height {
            return Err(Error::CellCount {
                expected: width * height,
                actual: values.len(),
            });
        }
        Ok(PotentialField {
            width,
            height,
            values,
        })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        PotentialField {
            width,
            height,
            values: vec![value; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, index: usize) -> f64 {
        self.values[index]
    }

    /// Value at `p`, [`INFINITE`] outside the field.
    pub fn at(&self, p: Pos) -> f64 {
        if p.x < 0 || p.y < 0 || p.x as usize >= self.width || p.y as usize >= self.height {
            return INFINITE;
        }
        self.values[p.y as usize * self.width + p.x as usize]
    }

    pub fn is_finite_at(&self, index: usize) -> bool {
        self.values[index].is_finite()
    }

    /// Largest finite value, if any cell is finite.
    pub fn max_finite(&self) -> Option<f64> {
        self.values
            .iter()
            .copied()
            .filter(|v| v.is_finite())
            .reduce(f64::max)
    }

    fn same_shape(&self, other: &PotentialField) -> Result<()> {
        if self.width != other.width || self.height != other.height {
            return Err(Error::DimensionMismatch(
                self.width,
                self.height,
                other.width,
                other.height,
            ));
        }
        Ok(())
    }
}

/// Manhattan and Chebyshev fills over the same occupancy.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldPair {
    pub manhattan: PotentialField,
    pub chebyshev: PotentialField,
}

impl FieldPair {
    pub fn compute(grid: &Grid, occupancy: &Occupancy, cost: CostModel) -> Result<Self> {
        Ok(FieldPair {
            manhattan: fill(grid, occupancy, Neighborhood::VonNeumann, cost)?,
            chebyshev: fill(grid, occupancy, Neighborhood::Moore, cost)?,
        })
    }
}

/// Minimal entering-cost field from the destination set.
///
/// `value(c)` is the smallest sum of entering costs over walkable paths from
/// any destination cell to `c`; destinations are 0. Fill order never matters:
/// the frontier is a priority queue (a bucket queue when `s_add` is an
/// integer).
pub fn fill(
    grid: &Grid,
    occupancy: &Occupancy,
    neighborhood: Neighborhood,
    cost: CostModel,
) -> Result<PotentialField> {
    if occupancy.width() != grid.width() || occupancy.height() != grid.height() {
        return Err(Error::DimensionMismatch(
            grid.width(),
            grid.height(),
            occupancy.width(),
            occupancy.height(),
        ));
    }
    let sources = grid.indices_of(CellKind::Destination);
    if sources.is_empty() {
        return Err(Error::NoDestination);
    }
    let values = match cost.integral() {
        Some(step) => fill_buckets(grid, occupancy, neighborhood, step, &sources),
        None => fill_heap(grid, occupancy, neighborhood, cost.s_add(), &sources),
    };
    PotentialField::new(grid.width(), grid.height(), values)
}

/// Calls `f(neighbor_index)` for every walkable in-grid neighbor of `index`.
#[inline]
fn for_each_walkable_neighbor(
    grid: &Grid,
    index: usize,
    offsets: &[(i32, i32)],
    mut f: impl FnMut(usize),
) {
    let w = grid.width() as i32;
    let h = grid.height() as i32;
    let x = (index % grid.width()) as i32;
    let y = (index / grid.width()) as i32;
    for &(dx, dy) in offsets {
        let (nx, ny) = (x + dx, y + dy);
        if nx < 0 || ny < 0 || nx >= w || ny >= h {
            continue;
        }
        let n = (ny * w + nx) as usize;
        if grid.kind_at(n).is_walkable() {
            f(n);
        }
    }
}

fn fill_buckets(
    grid: &Grid,
    occupancy: &Occupancy,
    neighborhood: Neighborhood,
    occupied_cost: u32,
    sources: &[usize],
) -> Vec<f64> {
    let offsets = neighborhood.offsets();
    let mut dist = vec![u64::MAX; grid.len()];
    let mut queue = BucketQueue::new(occupied_cost.max(1));
    for &s in sources {
        dist[s] = 0;
        queue.push(0, s as u32);
    }
    while let Some((d, i)) = queue.pop() {
        let i = i as usize;
        if d != dist[i] {
            continue;
        }
        for_each_walkable_neighbor(grid, i, offsets, |n| {
            let step = if occupancy.is_occupied(n) {
                occupied_cost
            } else {
                1
            };
            let nd = d + step as u64;
            if nd < dist[n] {
                dist[n] = nd;
                queue.push(nd, n as u32);
            }
        });
    }
    dist.into_iter()
        .map(|d| if d == u64::MAX { INFINITE } else { d as f64 })
        .collect()
}

fn fill_heap(
    grid: &Grid,
    occupancy: &Occupancy,
    neighborhood: Neighborhood,
    occupied_cost: f64,
    sources: &[usize],
) -> Vec<f64> {
    let offsets = neighborhood.offsets();
    let mut dist = vec![INFINITE; grid.len()];
    let mut heap = BinaryHeap::new();
    for &s in sources {
        dist[s] = 0.0;
        heap.push(MinEntry {
            key: 0.0,
            item: s as u32,
        });
    }
    while let Some(MinEntry { key: d, item }) = heap.pop() {
        let i = item as usize;
        if d > dist[i] {
            continue;
        }
        for_each_walkable_neighbor(grid, i, offsets, |n| {
            let step = if occupancy.is_occupied(n) {
                occupied_cost
            } else {
                1.0
            };
            let nd = d + step;
            if nd < dist[n] {
                dist[n] = nd;
                heap.push(MinEntry {
                    key: nd,
                    item: n as u32,
                });
            }
        });
    }
    dist
}

/// Combines a Manhattan/Chebyshev pair cell by cell into
/// `sqrt(S_C^2 + (S_M - S_C)^2)`.
///
/// Infinite wherever either input is. Fails if `S_M < S_C` anywhere by more
/// than rounding slack, which no pair of fills over the same occupancy can
/// produce.
pub fn combine_v1(pair: &FieldPair) -> Result<PotentialField> {
    let FieldPair {
        manhattan,
        chebyshev,
    } = pair;
    manhattan.same_shape(chebyshev)?;
    let mut values = Vec::with_capacity(manhattan.values.len());
    for (index, (&sm, &sc)) in manhattan.values.iter().zip(&chebyshev.values).enumerate() {
        if !sm.is_finite() || !sc.is_finite() {
            values.push(INFINITE);
            continue;
        }
        let minor = sm - sc;
        if minor < -CONSISTENCY_TOLERANCE {
            return Err(Error::InconsistentFields {
                index,
                manhattan: sm,
                chebyshev: sc,
            });
        }
        let minor = minor.max(0.0);
        values.push(libm::sqrt(sc * sc + minor * minor));
    }
    PotentialField::new(manhattan.width, manhattan.height, values)
}

/// Combined field on the empty geometry.
pub fn static_field(grid: &Grid) -> Result<PotentialField> {
    let empty = Occupancy::empty(grid);
    combine_v1(&FieldPair::compute(grid, &empty, CostModel::uniform())?)
}

/// Combined field on `occupancy` minus the empty-geometry field.
///
/// Cells infinite in both are 0. Computed from scratch on every call.
///
/// The result is nonnegative wherever the empty-geometry Manhattan value is
/// at most twice the Chebyshev value, which holds on any geometry without a
/// diagonal squeeze between two wall cells.
pub fn dynamic_field(
    grid: &Grid,
    occupancy: &Occupancy,
    cost: CostModel,
    static_field: &PotentialField,
) -> Result<PotentialField> {
    let current = combine_v1(&FieldPair::compute(grid, occupancy, cost)?)?;
    current.same_shape(static_field)?;
    let values = current
        .values
        .iter()
        .zip(&static_field.values)
        .map(|(&now, &base)| {
            if now.is_infinite() && base.is_infinite() {
                0.0
            } else {
                now - base
            }
        })
        .collect();
    PotentialField::new(grid.width(), grid.height(), values)
}
