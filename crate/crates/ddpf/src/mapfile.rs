//! Scenario text format.
//!
//! ```text
//! @cellsize 0.4
//! @name tiny
//! #####
//! #O.D#
//! #####
//! ```
//!
//! Header lines come first and start with `@`. The map starts at the first
//! other non-blank line; its width is the longest row and shorter rows are
//! padded with wall. Characters: `#` wall, `.` free, `O` origin, `D`
//! destination, `M` measurement.

use std::fmt::Write as _;

use ddpf_core::{CellKind, Grid};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MapError {
    #[error("unknown map character {ch:?} at row {row}, column {col}")]
    UnknownChar { row: usize, col: usize, ch: char },
    #[error("line {line}: unknown header {text:?}")]
    UnknownHeader { line: usize, text: String },
    #[error("line {line}: invalid cell size {text:?}")]
    BadCellSize { line: usize, text: String },
    #[error("line {line}: empty scenario name")]
    EmptyName { line: usize },
    #[error("missing @cellsize header")]
    MissingCellSize,
    #[error("scenario has no map rows")]
    EmptyMap,
    #[error(transparent)]
    Grid(#[from] ddpf_core::Error),
}

pub fn kind_of(ch: char) -> Option<CellKind> {
    Some(match ch {
        '#' => CellKind::Wall,
        '.' => CellKind::Free,
        'O' => CellKind::Origin,
        'D' => CellKind::Destination,
        'M' => CellKind::Measurement,
        _ => return None,
    })
}

pub fn char_of(kind: CellKind) -> char {
    match kind {
        CellKind::Wall => '#',
        CellKind::Free => '.',
        CellKind::Origin => 'O',
        CellKind::Destination => 'D',
        CellKind::Measurement => 'M',
    }
}

/// Parses a scenario. Rows and columns in errors are 1-based and count map
/// rows only.
pub fn parse(text: &str) -> Result<Grid, MapError> {
    let mut cell_size = None;
    let mut name = None;
    let mut lines = text.lines().map(|l| l.strip_suffix('\r').unwrap_or(l)).enumerate().peekable();

    while let Some(&(n, line)) = lines.peek() {
        let line_no = n + 1;
        if line.trim().is_empty() {
            lines.next();
            continue;
        }
        let Some(header) = line.strip_prefix('@') else { break };
        lines.next();
        let (key, value) = header.split_once(char::is_whitespace).unwrap_or((header, ""));
        let value = value.trim();
        match key {
            "cellsize" => {
                let size: f64 = value.parse().map_err(|_| MapError::BadCellSize {
                    line: line_no,
                    text: value.to_string(),
                })?;
                if !(size.is_finite() && size > 0.0) {
                    return Err(MapError::BadCellSize {
                        line: line_no,
                        text: value.to_string(),
                    });
                }
                cell_size = Some(size);
            }
            "name" if value.is_empty() => return Err(MapError::EmptyName { line: line_no }),
            "name" => name = Some(value.to_string()),
            _ => {
                return Err(MapError::UnknownHeader {
                    line: line_no,
                    text: line.to_string(),
                })
            }
        }
    }
    let cell_size = cell_size.ok_or(MapError::MissingCellSize)?;

    let mut rows: Vec<&str> = lines.map(|(_, l)| l).collect();
    while rows.last().is_some_and(|r| r.trim().is_empty()) {
        rows.pop();
    }
    if rows.is_empty() {
        return Err(MapError::EmptyMap);
    }
    let width = rows.iter().map(|r| r.chars().count()).max().unwrap_or(0);
    let mut cells = Vec::with_capacity(width * rows.len());
    for (r, row) in rows.iter().enumerate() {
        let mut n = 0;
        for (c, ch) in row.chars().enumerate() {
            let kind = kind_of(ch).ok_or(MapError::UnknownChar {
                row: r + 1,
                col: c + 1,
                ch,
            })?;
            cells.push(kind);
            n += 1;
        }
        cells.extend(std::iter::repeat_n(CellKind::Wall, width - n));
    }
    let grid = Grid::new(width, rows.len(), cell_size, cells)?;
    Ok(match name {
        Some(n) => grid.with_name(n),
        None => grid,
    })
}

pub fn serialize(grid: &Grid) -> String {
    let mut out = String::with_capacity(grid.len() + grid.height() + 64);
    writeln!(out, "@cellsize {}", grid.cell_size()).unwrap();
    if let Some(name) = grid.name() {
        writeln!(out, "@name {name}").unwrap();
    }
    for row in grid.cells().chunks(grid.width()) {
        out.extend(row.iter().map(|&k| char_of(k)));
        out.push('\n');
    }
    out
}
