//! The two-corridor geometry.
//!
//! Agents start in a long origin strip as wide as a corridor. The short
//! corridor continues straight on from its end to a vertical shaft in front
//! of the destination. The long corridor drops down at the end of the
//! strip, runs parallel to the short one and climbs back up the same shaft.
//! The drop is what makes it about 32 m (scaled) longer.
//!
//! ```text
//!  ###########################
//!  #OOOOOOOO============ |   #
//!  ######  #############|DDD#
//!  ######  #############|   #
//!  ######  =====M======= ####
//!  ###########################
//! ```
//!
//! Both corridors start right where the strip ends, so the point of the
//! long corridor that is equally far from the destination either way lies
//! as deep inside it as the length difference allows.

use alloc::vec::Vec;

use crate::grid::{CellKind, Grid, Pos};
use crate::potential::static_field;
use crate::{Error, Result};

/// Cell edge length of the built scenario, in meters.
pub const CELL_SIZE: f64 = 0.4;

/// Dimensions of the layout at scale 1, in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Layout {
    pub hall_length: f64,
    pub hall_height: f64,
    pub corridor_width: f64,
    /// Length of the straight corridor sections.
    pub span: f64,
    pub destination_depth: f64,
    /// Target difference between the two routes.
    pub extra_length: f64,
}

impl Default for Layout {
    fn default() -> Self {
        Layout {
            hall_length: 97.0,
            hall_height: 5.0,
            corridor_width: 5.0,
            span: 315.0,
            destination_depth: 2.0,
            extra_length: 32.0,
        }
    }
}

/// Half-open cell rectangle `[x0, x1) x [y0, y1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rect {
    pub x0: i32,
    pub y0: i32,
    pub x1: i32,
    pub y1: i32,
}

impl Rect {
    pub fn contains(&self, p: Pos) -> bool {
        p.x >= self.x0 && p.x < self.x1 && p.y >= self.y0 && p.y < self.y1
    }

    pub fn cells(&self) -> impl Iterator<Item = Pos> + '_ {
        (self.y0..self.y1).flat_map(move |y| (self.x0..self.x1).map(move |x| Pos::new(x, y)))
    }
}

/// A built two-corridor grid and where its parts are.
#[derive(Debug, Clone)]
pub struct TwoCorridor {
    pub grid: Grid,
    /// Cells only reachable by walking the long route: the lower corridor
    /// and the parts of both shafts below the origin and destination
    /// openings.
    pub long_corridor: Vec<Rect>,
    /// Counterpart of `long_corridor` for the short route.
    pub short_corridor: Vec<Rect>,
    /// Full cross-section of the upper corridor at its middle.
    pub short_gate: Rect,
    /// Full cross-section of the lower corridor (the measurement cells).
    pub long_gate: Rect,
}

impl TwoCorridor {
    pub fn in_long_corridor(&self, p: Pos) -> bool {
        self.long_corridor.iter().any(|r| r.contains(p))
    }

    /// The grid with one gate turned into wall.
    pub fn blocked(&self, gate: Rect) -> Grid {
        let mut g = self.grid.clone();
        g.fill_rect(gate.x0, gate.y0, gate.x1, gate.y1, CellKind::Wall);
        g
    }

    /// Shortest origin-to-destination distances in cells, through each
    /// corridor, on the empty geometry.
    pub fn route_lengths(&self) -> Result<RouteLengths> {
        let origin = self.grid.indices_of(CellKind::Origin);
        let shortest = |grid: &Grid| -> Result<f64> {
            let f = static_field(grid)?;
            Ok(origin
                .iter()
                .map(|&i| f.value(i))
                .fold(f64::INFINITY, f64::min))
        };
        Ok(RouteLengths {
            via_short: shortest(&self.blocked(self.long_gate))?,
            via_long: shortest(&self.blocked(self.short_gate))?,
        })
    }
}

/// Corridor geodesics in cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RouteLengths {
    pub via_short: f64,
    pub via_long: f64,
}

impl RouteLengths {
    pub fn difference(&self) -> f64 {
        self.via_long - self.via_short
    }
}

fn cells(meters: f64, scale: f64) -> i64 {
    libm::round(meters * scale / CELL_SIZE) as i64
}

/// Builds the two-corridor scenario; `scale = 1` is full size.
///
/// The depth of the long corridor's drop is settled by measurement: among
/// the cell counts around the nominal depth, the one whose combined-metric
/// route difference comes closest to 32 m (scaled) wins.
pub fn build_two_corridor(scale: f64) -> Result<TwoCorridor> {
    build_with(scale, &Layout::default())
}

/// [`build_two_corridor`] with other dimensions.
pub fn build_with(scale: f64, dims: &Layout) -> Result<TwoCorridor> {
    if !(scale > 0.0 && scale <= 1.0) {
        return Err(Error::DegenerateScale { scale, cells: 0 });
    }
    let target = dims.extra_length * scale / CELL_SIZE;
    let nominal = libm::round(target / 2.0) as i64;
    let mut best: Option<(f64, TwoCorridor)> = None;
    for drop in (nominal / 2).max(1)..=nominal + nominal / 2 + 2 {
        let candidate = layout(scale, dims, drop)?;
        let miss = (candidate.route_lengths()?.difference() - target).abs();
        if best.as_ref().is_none_or(|(m, _)| miss < *m) {
            best = Some((miss, candidate));
        }
    }
    Ok(best.expect("at least one layout").1)
}

fn layout(scale: f64, dims: &Layout, drop: i64) -> Result<TwoCorridor> {
    let wc = cells(dims.corridor_width, scale);
    if wc < 2 {
        return Err(Error::DegenerateScale { scale, cells: wc });
    }
    let hall_h = cells(dims.hall_height, scale).max(wc);
    let hall_l = cells(dims.hall_length, scale).max(wc);
    let span = cells(dims.span, scale).max(2 * wc + 1);
    let dd = cells(dims.destination_depth, scale).max(1);

    let (x_hall, y_hall) = (1, 1);
    let x_exit = x_hall + hall_l;
    let x_shaft = x_exit + span;
    let x_dest = x_shaft + wc;
    let y_floor = y_hall + hall_h;
    let y_lower = y_floor + drop;
    let y_dest = y_hall + (hall_h - wc) / 2;

    let width = (x_dest + dd + 1) as usize;
    let height = (y_lower + wc + 1) as usize;
    let mut grid = Grid::filled(width, height, CELL_SIZE, CellKind::Wall)?;

    let r = |x0: i64, y0: i64, x1: i64, y1: i64| Rect {
        x0: x0 as i32,
        y0: y0 as i32,
        x1: x1 as i32,
        y1: y1 as i32,
    };
    let put =
        |g: &mut Grid, rect: Rect, kind| g.fill_rect(rect.x0, rect.y0, rect.x1, rect.y1, kind);

    let upper = r(x_exit, y_hall, x_shaft, y_hall + wc);
    let down_leg = r(x_exit - wc, y_floor, x_exit, y_lower);
    let lower = r(x_exit - wc, y_lower, x_shaft, y_lower + wc);
    let shaft = r(x_shaft, y_hall, x_shaft + wc, y_lower + wc);

    put(&mut grid, r(x_hall, y_hall, x_exit, y_floor), CellKind::Origin);
    for rect in [upper, down_leg, lower, shaft] {
        put(&mut grid, rect, CellKind::Free);
    }
    put(&mut grid, r(x_dest, y_dest, x_dest + dd, y_dest + wc), CellKind::Destination);

    let mid = x_exit + (x_shaft - x_exit) / 2;
    let long_gate = r(mid, y_lower, mid + 1, y_lower + wc);
    let short_gate = r(mid, y_hall, mid + 1, y_hall + wc);
    put(&mut grid, long_gate, CellKind::Measurement);

    Ok(TwoCorridor {
        grid: grid.with_name("two_corridor"),
        long_corridor: alloc::vec![
            down_leg,
            lower,
            r(x_shaft, y_dest + wc, x_shaft + wc, y_lower + wc),
        ],
        short_corridor: alloc::vec![upper, r(x_shaft, y_hall, x_shaft + wc, y_dest)],
        short_gate,
        long_gate,
    })
}
