//! Line of sight between cell centers.
//!
//! A hop is visible when no cell touched by the straight segment between the
//! two cell centers is a wall. "Touched" is the conservative supercover: a
//! segment running exactly through a lattice corner touches all cells
//! sharing that corner.

use alloc::vec::Vec;

use crate::grid::{Grid, Pos};

/// Cells touched by the segment from the center of `(0, 0)` to the center of
/// `(dx, dy)`, in traversal order, without the start cell.
pub fn supercover(dx: i32, dy: i32) -> Vec<(i32, i32)> {
    let mut out = Vec::new();
    let (x_step, y_step) = (dx.signum(), dy.signum());
    let (adx, ady) = (dx.abs(), dy.abs());
    let (ddx, ddy) = (2 * adx, 2 * ady);
    let (mut x, mut y) = (0, 0);
    if ddx >= ddy {
        let mut error = adx;
        let mut prev = error;
        for _ in 0..adx {
            x += x_step;
            error += ddy;
            if error > ddx {
                y += y_step;
                error -= ddx;
                match (error + prev).cmp(&ddx) {
                    core::cmp::Ordering::Less => out.push((x, y - y_step)),
                    core::cmp::Ordering::Greater => out.push((x - x_step, y)),
                    core::cmp::Ordering::Equal => {
                        out.push((x, y - y_step));
                        out.push((x - x_step, y));
                    }
                }
            }
            out.push((x, y));
            prev = error;
        }
    } else {
        let mut error = ady;
        let mut prev = error;
        for _ in 0..ady {
            y += y_step;
            error += ddx;
            if error > ddy {
                x += x_step;
                error -= ddy;
                match (error + prev).cmp(&ddy) {
                    core::cmp::Ordering::Less => out.push((x - x_step, y)),
                    core::cmp::Ordering::Greater => out.push((x, y - y_step)),
                    core::cmp::Ordering::Equal => {
                        out.push((x - x_step, y));
                        out.push((x, y - y_step));
                    }
                }
            }
            out.push((x, y));
            prev = error;
        }
    }
    out
}

/// Supercover offsets for every hop of Chebyshev length up to `radius`.
#[derive(Debug, Clone)]
pub struct SightTable {
    radius: i32,
    lines: Vec<Vec<(i32, i32)>>,
}

impl SightTable {
    pub fn new(radius: u32) -> Self {
        let r = radius as i32;
        let side = 2 * r + 1;
        let mut lines = Vec::with_capacity((side * side) as usize);
        for dy in -r..=r {
            for dx in -r..=r {
                lines.push(supercover(dx, dy));
            }
        }
        SightTable { radius: r, lines }
    }

    pub fn radius(&self) -> u32 {
        self.radius as u32
    }

    /// Touched cells for the hop `(dx, dy)`; `None` beyond the radius.
    pub fn line(&self, dx: i32, dy: i32) -> Option<&[(i32, i32)]> {
        if dx.abs() > self.radius || dy.abs() > self.radius {
            return None;
        }
        let side = 2 * self.radius + 1;
        let i = (dy + self.radius) * side + (dx + self.radius);
        Some(&self.lines[i as usize])
    }

    /// Whether `to` can be seen from `from`. Hops beyond the radius are not.
    pub fn visible(&self, grid: &Grid, from: Pos, to: Pos) -> bool {
        match self.line(to.x - from.x, to.y - from.y) {
            Some(line) => line
                .iter()
                .all(|&(dx, dy)| grid.is_walkable(from.offset(dx, dy))),
            None => false,
        }
    }
}
