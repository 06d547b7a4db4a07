//! Cell lattice, cell semantics and agent occupancy.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::{Error, Result};

/// Semantics of a single cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellKind {
    Wall,
    Free,
    /// Where agents are placed when a run starts.
    Origin,
    /// Field sources; an agent entering one leaves the system.
    Destination,
    /// Walkable cell marking the cross-section of the longer corridor.
    Measurement,
}

impl CellKind {
    pub fn is_walkable(self) -> bool {
        self != CellKind::Wall
    }
}

/// Cell coordinate. May point outside the grid; such cells read as walls.
///
/// Ordering is row-major (`y` first, then `x`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Pos {
    pub x: i32,
    pub y: i32,
}

impl Pos {
    pub const fn new(x: i32, y: i32) -> Self {
        Pos { x, y }
    }

    pub fn offset(self, dx: i32, dy: i32) -> Self {
        Pos::new(self.x + dx, self.y + dy)
    }

    pub fn chebyshev(self, other: Pos) -> i32 {
        (self.x - other.x).abs().max((self.y - other.y).abs())
    }
}

impl Ord for Pos {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.y, self.x).cmp(&(other.y, other.x))
    }
}

impl PartialOrd for Pos {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Rectangular lattice of cells, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    width: usize,
    height: usize,
    cell_size: f64,
    cells: Vec<CellKind>,
    name: Option<String>,
}

impl Grid {
    pub fn new(width: usize, height: usize, cell_size: f64, cells: Vec<CellKind>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::ZeroDimensions { width, height });
        }
        if !(cell_size.is_finite() && cell_size > 0.0) {
            return Err(Error::CellSize(cell_size));
        }
        if cells.len() != width * height {
            return Err(Error::CellCount {
                expected: width * height,
                actual: cells.len(),
            });
        }
        // Indices are handed around as u32 and coordinates as i32.
        if width * height > u32::MAX as usize / 2 {
            return Err(Error::CellCount {
                expected: u32::MAX as usize / 2,
                actual: width * height,
            });
        }
        Ok(Grid {
            width,
            height,
            cell_size,
            cells,
            name: None,
        })
    }

    /// A grid where every cell has the same kind.
    pub fn filled(width: usize, height: usize, cell_size: f64, kind: CellKind) -> Result<Self> {
        Grid::new(width, height, cell_size, vec![kind; width * height])
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn with_cell_size(mut self, cell_size: f64) -> Result<Self> {
        if !(cell_size.is_finite() && cell_size > 0.0) {
            return Err(Error::CellSize(cell_size));
        }
        self.cell_size = cell_size;
        Ok(self)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Edge length of a cell in meters.
    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[CellKind] {
        &self.cells
    }

    pub fn contains(&self, p: Pos) -> bool {
        p.x >= 0 && p.y >= 0 && (p.x as usize) < self.width && (p.y as usize) < self.height
    }

    pub fn index(&self, p: Pos) -> Option<usize> {
        self.contains(p)
            .then(|| p.y as usize * self.width + p.x as usize)
    }

    pub fn pos(&self, index: usize) -> Pos {
        Pos::new((index % self.width) as i32, (index / self.width) as i32)
    }

    /// Kind at `p`; anything outside the lattice is a wall.
    pub fn kind(&self, p: Pos) -> CellKind {
        match self.index(p) {
            Some(i) => self.cells[i],
            None => CellKind::Wall,
        }
    }

    pub fn kind_at(&self, index: usize) -> CellKind {
        self.cells[index]
    }

    pub fn is_walkable(&self, p: Pos) -> bool {
        self.kind(p).is_walkable()
    }

    pub fn set(&mut self, p: Pos, kind: CellKind) {
        if let Some(i) = self.index(p) {
            self.cells[i] = kind;
        }
    }

    /// Sets every cell of the half-open rectangle `[x0, x1) x [y0, y1)` that
    /// lies inside the grid.
    pub fn fill_rect(&mut self, x0: i32, y0: i32, x1: i32, y1: i32, kind: CellKind) {
        for y in y0.max(0)..y1.min(self.height as i32) {
            for x in x0.max(0)..x1.min(self.width as i32) {
                self.set(Pos::new(x, y), kind);
            }
        }
    }

    /// Indices of all cells of `kind`, ascending.
    pub fn indices_of(&self, kind: CellKind) -> Vec<usize> {
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, &k)| k == kind)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn count(&self, kind: CellKind) -> usize {
        self.cells.iter().filter(|&&k| k == kind).count()
    }

    /// A runnable scenario needs somewhere to start and somewhere to go.
    pub fn check_runnable(&self) -> Result<()> {
        if self.count(CellKind::Destination) == 0 {
            return Err(Error::NoDestination);
        }
        if self.count(CellKind::Origin) == 0 {
            return Err(Error::NoOrigin);
        }
        Ok(())
    }
}

/// Which cells currently hold an agent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Occupancy {
    width: usize,
    height: usize,
    cells: Vec<bool>,
    count: usize,
}

impl Occupancy {
    /// No agents anywhere.
    pub fn empty(grid: &Grid) -> Self {
        Occupancy {
            width: grid.width(),
            height: grid.height(),
            cells: vec![false; grid.len()],
            count: 0,
        }
    }

    /// Occupancy from a list of cell indices. Wall cells and duplicates are
    /// ignored.
    pub fn from_indices(grid: &Grid, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut occ = Occupancy::empty(grid);
        for i in indices {
            if i < grid.len() && grid.kind_at(i).is_walkable() && !occ.cells[i] {
                occ.occupy(i);
            }
        }
        occ
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn is_occupied(&self, index: usize) -> bool {
        self.cells[index]
    }

    pub fn occupy(&mut self, index: usize) {
        assert!(!self.cells[index], "cell {index} is already occupied");
        self.cells[index] = true;
        self.count += 1;
    }

    pub fn vacate(&mut self, index: usize) {
        assert!(self.cells[index], "cell {index} is not occupied");
        self.cells[index] = false;
        self.count -= 1;
    }

    /// Number of occupied cells.
    pub fn count(&self) -> usize {
        self.count
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.cells
    }
}
