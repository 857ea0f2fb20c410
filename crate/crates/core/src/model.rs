//! Physical parameters of two wells coupled to a common continuum.
//!
//! Couplings are stored as signed amplitudes `omega1`, `omega2`; the level
//! widths, the relative parity and the width ratio are derived from them.
//! Energies and rates share one unit system (the examples use `G1 = 1`).

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative sign of the two well-reservoir couplings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }

    pub fn from_sign(x: f64) -> Option<Parity> {
        if x > 0.0 {
            Some(Parity::Even)
        } else if x < 0.0 {
            Some(Parity::Odd)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Well {
    One,
    Two,
}

/// Two single-level wells and a flat reservoir.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WellPair {
    e1: f64,
    e2: f64,
    omega1: f64,
    omega2: f64,
    rho: f64,
    lambda_cutoff: f64,
}

/// Quantities derived from a [`WellPair`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedParams {
    pub gamma1: f64,
    pub gamma2: f64,
    /// `None` when one of the couplings vanishes.
    pub eta: Option<Parity>,
    pub epsilon: f64,
    /// `G2/G1`; `f64::INFINITY` when well 1 is decoupled.
    pub y: f64,
    /// Set when `y` is the infinity sentinel (`omega1 == 0`).
    pub y_infinite: bool,
}

impl WellPair {
    pub fn new(e1: f64, e2: f64, omega1: f64, omega2: f64, rho: f64, lambda_cutoff: f64) -> Result<Self> {
        for (name, v) in [
            ("E1", e1),
            ("E2", e2),
            ("omega1", omega1),
            ("omega2", omega2),
            ("rho", rho),
            ("lambda_cutoff", lambda_cutoff),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid(name, format!("must be finite, got {v}")));
            }
        }
        if rho <= 0.0 {
            return Err(Error::invalid("rho", format!("must be positive, got {rho}")));
        }
        if lambda_cutoff <= 0.0 {
            return Err(Error::invalid(
                "lambda_cutoff",
                format!("must be positive, got {lambda_cutoff}"),
            ));
        }
        if omega1 == 0.0 && omega2 == 0.0 {
            return Err(Error::DegenerateSystem);
        }
        Ok(Self {
            e1,
            e2,
            omega1,
            omega2,
            rho,
            lambda_cutoff,
        })
    }

    /// Builds a pair from widths: `rho = 1/(2 pi)`, `omega1 = sqrt(G1)`,
    /// `omega2 = eta * sqrt(y G1)`. The cutoff defaults to
    /// [`WellPair::default_cutoff`].
    pub fn from_widths(gamma1: f64, y: f64, eta: Parity, e1: f64, e2: f64) -> Result<Self> {
        if !(gamma1 > 0.0) {
            return Err(Error::invalid("gamma1", format!("must be positive, got {gamma1}")));
        }
        if !(y >= 0.0) || !y.is_finite() {
            return Err(Error::invalid("y", format!("must be finite and >= 0, got {y}")));
        }
        let omega1 = gamma1.sqrt();
        let omega2 = eta.sign() * (y * gamma1).sqrt();
        let pair = Self::new(e1, e2, omega1, omega2, 1.0 / (2.0 * PI), 1.0)?;
        Ok(pair.with_cutoff(pair.default_cutoff()))
    }

    /// Identical widths `gamma`, even parity, levels at `+-epsilon/2`.
    pub fn symmetric(gamma: f64, epsilon: f64) -> Result<Self> {
        Self::from_widths(gamma, 1.0, Parity::Even, 0.5 * epsilon, -0.5 * epsilon)
    }

    pub fn with_cutoff(mut self, lambda_cutoff: f64) -> Self {
        assert!(lambda_cutoff > 0.0 && lambda_cutoff.is_finite());
        self.lambda_cutoff = lambda_cutoff;
        self
    }

    pub fn with_energies(mut self, e1: f64, e2: f64) -> Self {
        assert!(e1.is_finite() && e2.is_finite());
        self.e1 = e1;
        self.e2 = e2;
        self
    }

    pub fn e1(&self) -> f64 {
        self.e1
    }
    pub fn e2(&self) -> f64 {
        self.e2
    }
    pub fn omega1(&self) -> f64 {
        self.omega1
    }
    pub fn omega2(&self) -> f64 {
        self.omega2
    }
    pub fn rho(&self) -> f64 {
        self.rho
    }
    pub fn lambda_cutoff(&self) -> f64 {
        self.lambda_cutoff
    }

    pub fn gamma1(&self) -> f64 {
        2.0 * PI * self.omega1 * self.omega1 * self.rho
    }

    pub fn gamma2(&self) -> f64 {
        2.0 * PI * self.omega2 * self.omega2 * self.rho
    }

    /// `E1 - E2`.
    pub fn epsilon(&self) -> f64 {
        self.e1 - self.e2
    }

    /// Signed off-diagonal rate `eta * sqrt(G1 G2) / 2 = pi rho omega1 omega2`.
    pub fn cross_rate(&self) -> f64 {
        PI * self.rho * self.omega1 * self.omega2
    }

    /// `20 * max(G1 + G2, |epsilon|)`, large enough that self-energy
    /// corrections of order `G/Lambda` stay at the percent level.
    pub fn default_cutoff(&self) -> f64 {
        20.0 * (self.gamma1() + self.gamma2()).max(self.epsilon().abs())
    }

    pub fn coupling(&self, j: Well) -> f64 {
        match j {
            Well::One => self.omega1,
            Well::Two => self.omega2,
        }
    }

    pub fn derive(&self) -> DerivedParams {
        let gamma1 = self.gamma1();
        let gamma2 = self.gamma2();
        let y_infinite = self.omega1 == 0.0;
        DerivedParams {
            gamma1,
            gamma2,
            eta: Parity::from_sign(self.omega1 * self.omega2),
            epsilon: self.epsilon(),
            y: if y_infinite { f64::INFINITY } else { gamma2 / gamma1 },
            y_infinite,
        }
    }

    /// Wide-band limit of the reservoir self-energy, `-i eta_jj' sqrt(Gj Gj')/2`.
    pub fn wide_band_self_energy(&self, j: Well, jp: Well) -> Complex64 {
        Complex64::new(0.0, -PI * self.rho * (self.coupling(j) * self.coupling(jp)))
    }
}

/// Two pairs of parallel wells sharing one reservoir. The upper wells couple
/// with amplitudes `yprime * omega_j`; electrons in the same pair repel with
/// energy `u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParallelWellPair {
    base: WellPair,
    yprime: f64,
    u: f64,
}

impl ParallelWellPair {
    pub fn new(base: WellPair, yprime: f64, u: f64) -> Result<Self> {
        if !(yprime > 0.0) || !yprime.is_finite() {
            return Err(Error::invalid("yprime", format!("must be positive, got {yprime}")));
        }
        if !u.is_finite() {
            return Err(Error::invalid("U", format!("must be finite, got {u}")));
        }
        Ok(Self { base, yprime, u })
    }

    pub fn base(&self) -> &WellPair {
        &self.base
    }
    pub fn yprime(&self) -> f64 {
        self.yprime
    }
    pub fn u(&self) -> f64 {
        self.u
    }
}

/// Flat key-value model parameters as they appear in a config file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    #[serde(rename = "E1", default)]
    pub e1: f64,
    #[serde(rename = "E2", default)]
    pub e2: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub rho: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_cutoff: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub yprime: Option<f64>,
    #[serde(rename = "U", default, skip_serializing_if = "Option::is_none")]
    pub u: Option<f64>,
}

impl ModelConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Config {
            path: "model".into(),
            reason: e.to_string(),
        })
    }

    pub fn well_pair(&self) -> Result<WellPair> {
        let pair = WellPair::new(self.e1, self.e2, self.omega1, self.omega2, self.rho, 1.0)?;
        let cutoff = self.lambda_cutoff.unwrap_or_else(|| pair.default_cutoff());
        WellPair::new(self.e1, self.e2, self.omega1, self.omega2, self.rho, cutoff)
    }

    pub fn parallel_pair(&self) -> Result<ParallelWellPair> {
        ParallelWellPair::new(self.well_pair()?, self.yprime.unwrap_or(1.0), self.u.unwrap_or(0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn unit_widths_from_inverse_root_two_pi() {
        let w = (2.0 * PI).powf(-0.5);
        let d = WellPair::new(0.0, 0.0, w, w, 1.0, 10.0).unwrap().derive();
        assert!((d.gamma1 - 1.0).abs() < 1e-14);
        assert!((d.gamma2 - 1.0).abs() < 1e-14);
        assert_eq!(d.eta, Some(Parity::Even));
        assert!((d.y - 1.0).abs() < 1e-14);
    }

    #[test]
    fn opposite_signs_are_odd() {
        let d = WellPair::new(0.0, 0.0, 1.0, -1.0, 0.3, 10.0).unwrap().derive();
        assert_eq!(d.eta, Some(Parity::Odd));
    }

    #[test]
    fn width_ratio_is_amplitude_ratio_squared() {
        let d = WellPair::new(0.0, 0.0, 1.0, 10f64.sqrt(), 0.7, 10.0).unwrap().derive();
        assert!((d.y - 10.0).abs() < 1e-12);
    }

    #[test]
    fn zero_couplings_are_degenerate() {
        assert!(matches!(
            WellPair::new(0.0, 0.0, 0.0, 0.0, 1.0, 1.0),
            Err(Error::DegenerateSystem)
        ));
    }

    #[test]
    fn decoupled_well_one_flags_infinite_ratio() {
        let d = WellPair::new(0.0, 0.0, 0.0, 1.0, 1.0, 1.0).unwrap().derive();
        assert!(d.y_infinite);
        assert!(d.y.is_infinite());
        assert_eq!(d.eta, None);
    }

    #[test]
    fn self_energy_examples() {
        let sym = WellPair::symmetric(1.0, 0.0).unwrap();
        let f = sym.wide_band_self_energy(Well::One, Well::Two);
        assert!((f - Complex64::new(0.0, -0.5)).norm() < 1e-14);

        let p = WellPair::from_widths(2.0, 1.0, Parity::Even, 0.0, 0.0).unwrap();
        let f = p.wide_band_self_energy(Well::One, Well::One);
        assert!((f - Complex64::new(0.0, -1.0)).norm() < 1e-14);

        let p = WellPair::from_widths(1.0, 4.0, Parity::Odd, 0.0, 0.0).unwrap();
        let f = p.wide_band_self_energy(Well::One, Well::Two);
        assert!((f - Complex64::new(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn config_round_trip() {
        let cfg = ModelConfig::from_toml_str(
            "E1 = 0.1\nE2 = 0.0\nomega1 = 1.0\nomega2 = 2.0\nrho = 0.15915494309189535\nyprime = 1.0\nU = 2.0\n",
        )
        .unwrap();
        let pp = cfg.parallel_pair().unwrap();
        assert!((pp.base().gamma2() - 4.0).abs() < 1e-12);
        assert_eq!(pp.u(), 2.0);
        assert!(ModelConfig::from_toml_str("omega1 = 1.0\nomega2 = 1.0\nrho = 1.0\nbogus = 3\n").is_err());
    }

    proptest! {
        #[test]
        fn widths_scale_quadratically(w1 in 0.01f64..3.0, w2 in -3.0f64..3.0, c in 0.1f64..5.0, rho in 0.05f64..2.0) {
            let a = WellPair::new(0.0, 0.0, w1, w2, rho, 1.0).unwrap();
            let b = WellPair::new(0.0, 0.0, c * w1, w2, rho, 1.0).unwrap();
            prop_assert!((b.gamma1() - c * c * a.gamma1()).abs() <= 1e-12 * b.gamma1().max(1.0));
        }

        #[test]
        fn parity_survives_global_sign_flip(w1 in -3.0f64..3.0, w2 in -3.0f64..3.0) {
            prop_assume!(w1 != 0.0 && w2 != 0.0);
            let a = WellPair::new(0.0, 0.0, w1, w2, 1.0, 1.0).unwrap().derive();
            let b = WellPair::new(0.0, 0.0, -w1, -w2, 1.0, 1.0).unwrap().derive();
            prop_assert_eq!(a.eta, b.eta);
        }

        #[test]
        fn self_energy_is_symmetric(w1 in -3.0f64..3.0, w2 in -3.0f64..3.0, rho in 0.05f64..2.0) {
            prop_assume!(w1 != 0.0 || w2 != 0.0);
            let p = WellPair::new(0.0, 0.0, w1, w2, rho, 1.0).unwrap();
            prop_assert_eq!(
                p.wide_band_self_energy(Well::One, Well::Two),
                p.wide_band_self_energy(Well::Two, Well::One)
            );
        }
    }
}
