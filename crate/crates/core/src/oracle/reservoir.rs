use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Well, WellPair};

pub const MIN_LEVELS: usize = 10;

/// A finite band of equally spaced reservoir levels on `[-lambda, lambda]`,
/// offset by half a spacing so that no level sits at zero energy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscretizedReservoir {
    pub n_levels: usize,
    pub lambda: f64,
    pub spacing: f64,
    pub levels: Vec<f64>,
}

impl DiscretizedReservoir {
    pub fn new(lambda: f64, n_levels: usize) -> Result<Self> {
        if n_levels < MIN_LEVELS {
            return Err(Error::TooFewLevels(n_levels));
        }
        if !n_levels.is_multiple_of(2) {
            return Err(Error::invalid("n_levels", format!("must be even, got {n_levels}")));
        }
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::invalid(
                "lambda_cutoff",
                format!("must be positive, got {lambda}"),
            ));
        }
        let spacing = 2.0 * lambda / n_levels as f64;
        let levels = (0..n_levels).map(|r| -lambda + (r as f64 + 0.5) * spacing).collect();
        Ok(Self {
            n_levels,
            lambda,
            spacing,
            levels,
        })
    }

    /// Uses the cutoff stored in the pair.
    pub fn for_pair(pair: &WellPair, n_levels: usize) -> Result<Self> {
        Self::new(pair.lambda_cutoff(), n_levels)
    }

    pub fn recurrence_time(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.spacing
    }

    /// True when `t` is past half the recurrence time.
    pub fn past_horizon(&self, t: f64) -> bool {
        t >= 0.5 * self.recurrence_time()
    }

    /// Coupling of well `j` to each discrete level, `omega_j sqrt(rho delta)`,
    /// so that `2 pi v^2 / delta = G_j`.
    pub fn level_coupling(&self, pair: &WellPair, j: Well) -> f64 {
        pair.coupling(j) * (pair.rho() * self.spacing).sqrt()
    }

    /// Width implied by a discrete coupling.
    pub fn effective_width(&self, v: f64) -> f64 {
        2.0 * std::f64::consts::PI * v * v / self.spacing
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Parity;

    #[test]
    fn levels_symmetric_and_increasing() {
        let r = DiscretizedReservoir::new(5.0, 20).unwrap();
        assert_eq!(r.levels.len(), 20);
        for w in r.levels.windows(2) {
            assert!(w[1] > w[0]);
        }
        for k in 0..20 {
            assert!((r.levels[k] + r.levels[19 - k]).abs() < 1e-12);
        }
        assert!(r.levels.iter().all(|e| e.abs() > 0.1));
        assert!((r.recurrence_time() - 2.0 * std::f64::consts::PI / 0.5).abs() < 1e-12);
    }

    #[test]
    fn widths_recovered() {
        let pair = WellPair::from_widths(1.0, 4.0, Parity::Odd, 0.0, 0.0).unwrap();
        let r = DiscretizedReservoir::new(20.0, 400).unwrap();
        let w1 = r.effective_width(r.level_coupling(&pair, Well::One));
        let w2 = r.effective_width(r.level_coupling(&pair, Well::Two));
        assert!((w1 - 1.0).abs() < 1e-12 && (w2 - 4.0).abs() < 1e-12);
        assert!(r.level_coupling(&pair, Well::Two) < 0.0);
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(matches!(DiscretizedReservoir::new(1.0, 8), Err(Error::TooFewLevels(8))));
        assert!(DiscretizedReservoir::new(1.0, 11).is_err());
        assert!(DiscretizedReservoir::new(0.0, 20).is_err());
    }
}
