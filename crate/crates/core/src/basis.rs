//! The dark/bright ("optimal") basis of the two wells.
//!
//! With `tan(alpha) = omega1/omega2` the rotated modes are
//! `c1 = cos(alpha) a1 - sin(alpha) a2` (dark, decoupled from the reservoir)
//! and `c2 = sin(alpha) a1 + cos(alpha) a2` (bright, decays at `G1 + G2`).

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::io::parse_two_columns;
use crate::model::WellPair;
use crate::single::{DotDensity, SingleParticleState};

pub const DEFAULT_RATIO_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RotatedBasis {
    pub alpha: f64,
    /// Dark-state coefficient on well 1.
    pub cos_abar: f64,
    /// Minus the dark-state coefficient on well 2.
    pub sin_abar: f64,
    pub g1: f64,
    pub g2: f64,
    pub g12: f64,
    pub gamma2_prime: f64,
    pub e1p: f64,
    pub e2p: f64,
}

impl RotatedBasis {
    /// Well-basis amplitudes to (dark, bright) amplitudes.
    pub fn to_rotated(&self, b: [Complex64; 2]) -> [Complex64; 2] {
        let (c, s) = (self.cos_abar, self.sin_abar);
        [b[0] * c - b[1] * s, b[0] * s + b[1] * c]
    }

    /// (dark, bright) amplitudes back to the well basis.
    pub fn from_rotated(&self, d: [Complex64; 2]) -> [Complex64; 2] {
        let (c, s) = (self.cos_abar, self.sin_abar);
        [d[0] * c + d[1] * s, -d[0] * s + d[1] * c]
    }
}

pub fn rotate(pair: &WellPair) -> RotatedBasis {
    let (o1, o2) = (pair.omega1(), pair.omega2());
    let alpha = o1.atan2(o2);
    let norm = o1.hypot(o2);
    let (c, s) = (o2 / norm, o1 / norm);
    let g1 = o1 * c - o2 * s;
    let g2 = o1 * s + o2 * c;
    let (e1, e2) = (pair.e1(), pair.e2());
    RotatedBasis {
        alpha,
        cos_abar: c,
        sin_abar: s,
        g1,
        g2,
        g12: pair.epsilon() * o1 * o2 / (o1 * o1 + o2 * o2),
        gamma2_prime: 2.0 * std::f64::consts::PI * g2 * g2 * pair.rho(),
        e1p: e1 * c * c + e2 * s * s,
        e2p: e2 * c * c + e1 * s * s,
    }
}

/// The normalized dark state `(omega2, -omega1)/|omega|` over (well 1, well 2).
pub fn dark_state(pair: &WellPair) -> [f64; 2] {
    let rb = rotate(pair);
    [rb.cos_abar, -rb.sin_abar]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioCheck {
    pub constant: bool,
    /// Largest `|r_k - r_0| / |r_0|` over rows with nonzero `omega1`.
    pub max_deviation: f64,
    /// Rows whose `omega1` vanishes, so the ratio is undefined.
    pub flagged_rows: Vec<usize>,
}

/// Checks that `omega2r/omega1r` is the same for every reservoir level.
pub fn check_constant_ratio(table: &[(f64, f64)], rel_tol: f64) -> Result<RatioCheck> {
    if table.is_empty() {
        return Err(Error::EmptyTable);
    }
    let mut flagged_rows = Vec::new();
    let mut reference = None;
    let mut max_deviation: f64 = 0.0;
    for (k, &(o1, o2)) in table.iter().enumerate() {
        if o1 == 0.0 {
            flagged_rows.push(k);
            continue;
        }
        let r = o2 / o1;
        match reference {
            None => reference = Some(r),
            Some(r0) => {
                let dev = if r0 == 0.0 { r.abs() } else { ((r - r0) / r0).abs() };
                max_deviation = max_deviation.max(dev);
            }
        }
    }
    Ok(RatioCheck {
        constant: flagged_rows.is_empty() && max_deviation <= rel_tol,
        max_deviation,
        flagged_rows,
    })
}

/// `check_constant_ratio` on a two-column text table.
pub fn check_constant_ratio_text(text: &str, rel_tol: f64) -> Result<RatioCheck> {
    check_constant_ratio(&parse_two_columns(text)?, rel_tol)
}

/// Post-selects on finding no particle in the reservoir.
pub fn null_measurement_project(state: &SingleParticleState) -> Result<SingleParticleState> {
    let occ = state.dot_occupation();
    if !(occ > 0.0) {
        return Err(Error::NullResultImpossible);
    }
    match state.amplitudes {
        Some([b1, b2]) => {
            let n = occ.sqrt();
            SingleParticleState::from_amplitudes(b1 / n, b2 / n, state.t)
        }
        None => {
            let d = state.dots();
            SingleParticleState::from_density(
                DotDensity {
                    s11: d.s11 / occ,
                    s22: d.s22 / occ,
                    s12: d.s12 / occ,
                },
                state.t,
            )
        }
    }
}
