//! Summary statistics over run samples.

/// Mean, sample standard deviation and range of a set of samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub n: usize,
    pub mean: f64,
    /// Sample (n - 1) standard deviation; 0 for fewer than two samples.
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

impl Summary {
    /// Two-pass summary. `None` for an empty slice.
    pub fn of(samples: &[f64]) -> Option<Self> {
        if samples.is_empty() {
            return None;
        }
        let n = samples.len();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let (min, max) = samples
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
                (lo.min(x), hi.max(x))
            });
        let std = if n < 2 {
            0.0
        } else {
            let ss: f64 = samples.iter().map(|&x| (x - mean) * (x - mean)).sum();
            libm::sqrt(ss / (n - 1) as f64)
        };
        // summation rounding can push the mean a hair outside the range
        let mean = mean.clamp(min, max);
        Some(Summary {
            n,
            mean,
            std,
            min,
            max,
        })
    }

    /// Standard error of the mean.
    pub fn standard_error(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        self.std / libm::sqrt(self.n as f64)
    }
}

/// Pearson correlation of paired samples. `None` when fewer than two pairs
/// or either side is constant.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    if n < 2 {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / libm::sqrt(sxx * syy)).clamp(-1.0, 1.0))
}
