//! Local correlation between egress time and corridor load across a
//! parameter lattice.
//!
//! For each lattice point, the Pearson correlation of `(mean_egress, load)`
//! over the point and its lattice neighbors. Neighbors are adjacent in the
//! sorted `s_add` and `k_Sdyn` axes; von Neumann takes the 4 orthogonal
//! ones, Moore all 8. Points on the border just have fewer neighbors.

use alloc::vec::Vec;

use crate::potential::Neighborhood;
use crate::stats::pearson;
use crate::{Error, Result};

/// One lattice point's aggregated observables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeSample {
    pub s_add: f64,
    pub k_sdyn: f64,
    pub mean_egress: f64,
    pub load: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalCorrelation {
    pub s_add: f64,
    pub k_sdyn: f64,
    /// `None` when either observable is constant over the neighborhood.
    pub value: Option<f64>,
}

fn axis(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// Correlations in `s_add`-major order.
///
/// Fails unless the samples cover every `(s_add, k_Sdyn)` combination of
/// their axes exactly once.
pub fn local_correlation(
    samples: &[LatticeSample],
    neighborhood: Neighborhood,
) -> Result<Vec<LocalCorrelation>> {
    let s_axis = axis(samples.iter().map(|s| s.s_add));
    let k_axis = axis(samples.iter().map(|s| s.k_sdyn));
    if samples.is_empty() || s_axis.len() * k_axis.len() != samples.len() {
        return Err(Error::NotRectangular);
    }
    let (rows, cols) = (s_axis.len(), k_axis.len());
    let mut lattice: Vec<Option<LatticeSample>> = alloc::vec![None; rows * cols];
    for s in samples {
        let (Ok(r), Ok(c)) = (
            s_axis.binary_search_by(|v| v.total_cmp(&s.s_add)),
            k_axis.binary_search_by(|v| v.total_cmp(&s.k_sdyn)),
        ) else {
            return Err(Error::NotRectangular);
        };
        let slot = &mut lattice[r * cols + c];
        if slot.is_some() {
            return Err(Error::NotRectangular);
        }
        *slot = Some(*s);
    }
    let lattice: Vec<LatticeSample> = lattice
        .into_iter()
        .map(|s| s.ok_or(Error::NotRectangular))
        .collect::<Result<_>>()?;

    let mut offsets = alloc::vec![(0i32, 0i32)];
    offsets.extend_from_slice(neighborhood.offsets());
    let mut xs = Vec::with_capacity(offsets.len());
    let mut ys = Vec::with_capacity(offsets.len());
    let mut out = Vec::with_capacity(lattice.len());
    for r in 0..rows as i32 {
        for c in 0..cols as i32 {
            xs.clear();
            ys.clear();
            for &(dc, dr) in &offsets {
                let (nr, nc) = (r + dr, c + dc);
                if nr < 0 || nc < 0 || nr >= rows as i32 || nc >= cols as i32 {
                    continue;
                }
                let s = &lattice[nr as usize * cols + nc as usize];
                xs.push(s.mean_egress);
                ys.push(s.load);
            }
            let here = &lattice[r as usize * cols + c as usize];
            out.push(LocalCorrelation {
                s_add: here.s_add,
                k_sdyn: here.k_sdyn,
                value: pearson(&xs, &ys),
            });
        }
    }
    Ok(out)
}
