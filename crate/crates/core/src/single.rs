//! Exact one-particle dynamics in the wide-band limit.
//!
//! The dot amplitudes obey `i d/dt b = H_eff b` with the non-Hermitian
//! effective Hamiltonian
//!
//! ```text
//! H_eff = [ E1 - i G1/2            -i eta sqrt(G1 G2)/2 ]
//!         [ -i eta sqrt(G1 G2)/2   E2 - i G2/2          ]
//! ```
//!
//! and the reduced density matrix obeys the corresponding master equations.
//! Both routes are provided, together with the closed form for identical
//! wells and the asymptotic quantities that follow from the dark state.

use num_complex::Complex64;
use serde::Serialize;

use crate::basis;
use crate::error::{Error, Result};
use crate::io::CsvTable;
use crate::model::WellPair;

const NORM_TOL: f64 = 1e-9;

/// The 2x2 dot block of the reduced density matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DotDensity {
    pub s11: f64,
    pub s22: f64,
    pub s12: Complex64,
}

impl DotDensity {
    pub const LEFT: DotDensity = DotDensity {
        s11: 1.0,
        s22: 0.0,
        s12: Complex64::new(0.0, 0.0),
    };

    pub fn from_amplitudes(b: [Complex64; 2]) -> Self {
        Self {
            s11: b[0].norm_sqr(),
            s22: b[1].norm_sqr(),
            s12: b[0] * b[1].conj(),
        }
    }

    /// Total probability inside the dots.
    pub fn trace(&self) -> f64 {
        self.s11 + self.s22
    }

    /// `s11 s22 - |s12|^2`; zero for a pure dot state, never negative.
    pub fn purity_defect(&self) -> f64 {
        self.s11 * self.s22 - self.s12.norm_sqr()
    }

    pub fn max_abs_diff(&self, other: &DotDensity) -> f64 {
        (self.s11 - other.s11)
            .abs()
            .max((self.s22 - other.s22).abs())
            .max((self.s12 - other.s12).norm())
    }

    fn to_array(self) -> [f64; 4] {
        [self.s11, self.s22, self.s12.re, self.s12.im]
    }

    fn from_array(a: [f64; 4]) -> Self {
        Self {
            s11: a[0],
            s22: a[1],
            s12: Complex64::new(a[2], a[3]),
        }
    }
}

/// One particle shared between the two dots and the reservoir.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SingleParticleState {
    /// Dot amplitudes, when the state was built from a wave function.
    pub amplitudes: Option<[Complex64; 2]>,
    pub sigma11: f64,
    pub sigma22: f64,
    pub sigma12: Complex64,
    /// Probability of finding the particle in the reservoir.
    pub sigma00: f64,
    pub t: f64,
}

impl SingleParticleState {
    pub fn from_amplitudes(b1: Complex64, b2: Complex64, t: f64) -> Result<Self> {
        let dots = b1.norm_sqr() + b2.norm_sqr();
        if !(dots <= 1.0 + NORM_TOL) {
            return Err(Error::NotNormalized(dots));
        }
        let d = DotDensity::from_amplitudes([b1, b2]);
        Ok(Self {
            amplitudes: Some([b1, b2]),
            sigma11: d.s11,
            sigma22: d.s22,
            sigma12: d.s12,
            sigma00: (1.0 - dots).max(0.0),
            t,
        })
    }

    pub fn from_density(d: DotDensity, t: f64) -> Result<Self> {
        let tr = d.trace();
        if d.s11 < -NORM_TOL || d.s22 < -NORM_TOL || tr > 1.0 + NORM_TOL {
            return Err(Error::invalid(
                "sigma",
                format!("occupations ({}, {}) are not probabilities", d.s11, d.s22),
            ));
        }
        if d.purity_defect() < -NORM_TOL {
            return Err(Error::invalid("sigma12", "|s12|^2 exceeds s11*s22"));
        }
        Ok(Self {
            amplitudes: None,
            sigma11: d.s11,
            sigma22: d.s22,
            sigma12: d.s12,
            sigma00: (1.0 - tr).max(0.0),
            t,
        })
    }

    pub fn dots(&self) -> DotDensity {
        DotDensity {
            s11: self.sigma11,
            s22: self.sigma22,
            s12: self.sigma12,
        }
    }

    pub fn dot_occupation(&self) -> f64 {
        self.sigma11 + self.sigma22
    }
}

/// A sampled single-particle trajectory.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Trajectory {
    pub states: Vec<SingleParticleState>,
}

impl Trajectory {
    pub const COLUMNS: [&'static str; 6] = ["t", "sigma11", "sigma22", "re_sigma12", "im_sigma12", "sigma00"];

    pub fn times(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.t).collect()
    }

    pub fn last(&self) -> Option<&SingleParticleState> {
        self.states.last()
    }

    pub fn to_table(&self) -> CsvTable {
        let mut table = CsvTable::new(Self::COLUMNS);
        for s in &self.states {
            table.push_row(vec![
                s.t.into(),
                s.sigma11.into(),
                s.sigma22.into(),
                s.sigma12.re.into(),
                s.sigma12.im.into(),
                s.sigma00.into(),
            ]);
        }
        table
    }

    /// Decay rate of the dot occupation fitted on samples with `t >= t_from`.
    pub fn fitted_decay_rate(&self, t_from: f64) -> Result<f64> {
        let (ts, vs): (Vec<f64>, Vec<f64>) = self
            .states
            .iter()
            .filter(|s| s.t >= t_from)
            .map(|s| (s.t, s.dot_occupation()))
            .unzip();
        fit_exponential_decay(&ts, &vs)
    }
}

fn check_normalized(c: [Complex64; 2]) -> Result<()> {
    let n = c[0].norm_sqr() + c[1].norm_sqr();
    if (n - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized(n));
    }
    Ok(())
}

/// The effective non-Hermitian 2x2 Hamiltonian of the dots.
pub fn effective_hamiltonian(pair: &WellPair) -> [[Complex64; 2]; 2] {
    let off = Complex64::new(0.0, -pair.cross_rate());
    [
        [Complex64::new(pair.e1(), -0.5 * pair.gamma1()), off],
        [off, Complex64::new(pair.e2(), -0.5 * pair.gamma2())],
    ]
}

fn sinc(z: Complex64) -> Complex64 {
    if z.norm() < 1e-4 {
        let z2 = z * z;
        Complex64::new(1.0, 0.0) - z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sin() / z
    }
}

/// `exp(-i H_eff t)` by closed-form 2x2 eigendecomposition.
///
/// Near the exceptional point (`|delta t| < 1`) the cos/sinc form is used;
/// elsewhere the spectral form, whose exponentials never grow because both
/// eigenvalues of `H_eff` have non-positive imaginary part.
pub fn propagator(pair: &WellPair, t: f64) -> [[Complex64; 2]; 2] {
    let h = effective_hamiltonian(pair);
    let i = Complex64::i();
    let mean = 0.5 * (h[0][0] + h[1][1]);
    let half_diff = 0.5 * (h[0][0] - h[1][1]);
    let delta = (half_diff * half_diff + h[0][1] * h[1][0]).sqrt();
    let k = [[half_diff, h[0][1]], [h[1][0], -half_diff]];

    if (delta * t).norm() < 1.0 {
        let phase = (-i * mean * t).exp();
        let c = (delta * t).cos();
        let s = sinc(delta * t) * t;
        let mut u = [[Complex64::new(0.0, 0.0); 2]; 2];
        for r in 0..2 {
            for col in 0..2 {
                let id = if r == col { c } else { Complex64::new(0.0, 0.0) };
                u[r][col] = phase * (id - i * s * k[r][col]);
            }
        }
        u
    } else {
        let e_plus = (-i * (mean + delta) * t).exp();
        let e_minus = (-i * (mean - delta) * t).exp();
        let mut u = [[Complex64::new(0.0, 0.0); 2]; 2];
        for r in 0..2 {
            for col in 0..2 {
                let id = if r == col { delta } else { Complex64::new(0.0, 0.0) };
                let p_plus = (k[r][col] + id) / (2.0 * delta);
                let p_minus = (id - k[r][col]) / (2.0 * delta);
                u[r][col] = e_plus * p_plus + e_minus * p_minus;
            }
        }
        u
    }
}

/// Dot amplitudes `(b1, b2)` at time `t` for the dot-localized initial state
/// `C1 a1^+ + C2 a2^+`.
pub fn evolve_amplitudes(pair: &WellPair, initial: [Complex64; 2], t: f64) -> Result<[Complex64; 2]> {
    check_normalized(initial)?;
    if !(t >= 0.0) {
        return Err(Error::invalid("t", format!("must be >= 0, got {t}")));
    }
    let u = propagator(pair, t);
    Ok([
        u[0][0] * initial[0] + u[0][1] * initial[1],
        u[1][0] * initial[0] + u[1][1] * initial[1],
    ])
}

/// Right-hand sides of the master equations for `(s11, s22, s12)`.
pub fn master_rhs(pair: &WellPair, sigma: &DotDensity) -> DotDensity {
    let g1 = pair.gamma1();
    let g2 = pair.gamma2();
    let kappa = pair.cross_rate();
    let s21 = sigma.s12.conj();
    let coh = (sigma.s12 + s21).re;
    let i = Complex64::i();
    DotDensity {
        s11: -g1 * sigma.s11 - kappa * coh,
        s22: -g2 * sigma.s22 - kappa * coh,
        s12: i * (pair.e2() - pair.e1()) * sigma.s12 - kappa * (sigma.s11 + sigma.s22) - 0.5 * (g1 + g2) * sigma.s12,
    }
}

/// Default integrator step `min(0.01/G'2, 0.01/|epsilon|)`.
pub fn default_step(pair: &WellPair) -> f64 {
    let bright = pair.gamma1() + pair.gamma2();
    let eps = pair.epsilon().abs();
    let mut dt = 0.01 / bright;
    if eps > 0.0 {
        dt = dt.min(0.01 / eps);
    }
    dt
}

fn check_step(pair: &WellPair, dt: f64) -> Result<()> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::invalid("dt", format!("must be positive, got {dt}")));
    }
    let stiffness = dt * (pair.gamma1() + pair.gamma2());
    if stiffness > 0.5 {
        return Err(Error::StepTooLarge(stiffness));
    }
    Ok(())
}

fn rk4_step(pair: &WellPair, y: [f64; 4], h: f64) -> [f64; 4] {
    let f = |v: [f64; 4]| master_rhs(pair, &DotDensity::from_array(v)).to_array();
    let add = |a: [f64; 4], b: [f64; 4], s: f64| [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2], a[3] + s * b[3]];
    let k1 = f(y);
    let k2 = f(add(y, k1, 0.5 * h));
    let k3 = f(add(y, k2, 0.5 * h));
    let k4 = f(add(y, k3, h));
    let mut out = y;
    for j in 0..4 {
        out[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    }
    out
}

fn integrate(pair: &WellPair, y: [f64; 4], span: f64, dt: f64) -> [f64; 4] {
    if span <= 0.0 {
        return y;
    }
    let n = (span / dt - 1e-9).ceil().max(1.0) as usize;
    let h = span / n as f64;
    (0..n).fold(y, |acc, _| rk4_step(pair, acc, h))
}

/// Integrates the master equations to time `t` with classical RK4 steps no
/// longer than `dt`.
pub fn evolve_master(pair: &WellPair, initial: DotDensity, t: f64, dt: f64) -> Result<DotDensity> {
    check_step(pair, dt)?;
    if !(t >= 0.0) {
        return Err(Error::invalid("t", format!("must be >= 0, got {t}")));
    }
    Ok(DotDensity::from_array(integrate(pair, initial.to_array(), t, dt)))
}

/// Integrates the master equations and samples the state at `times`
/// (non-decreasing, starting at or after 0).
pub fn master_trajectory(pair: &WellPair, initial: DotDensity, times: &[f64], dt: f64) -> Result<Trajectory> {
    check_step(pair, dt)?;
    let mut y = initial.to_array();
    let mut now = 0.0;
    let mut states = Vec::with_capacity(times.len());
    for &t in times {
        if !(t >= now) {
            return Err(Error::invalid("times", "must be non-decreasing and >= 0"));
        }
        y = integrate(pair, y, t - now, dt);
        now = t;
        let d = DotDensity::from_array(y);
        states.push(SingleParticleState {
            amplitudes: None,
            sigma11: d.s11,
            sigma22: d.s22,
            sigma12: d.s12,
            sigma00: 1.0 - d.trace(),
            t,
        });
    }
    Ok(Trajectory { states })
}

/// Samples `evolve_amplitudes` on a time grid.
pub fn amplitude_trajectory(pair: &WellPair, initial: [Complex64; 2], times: &[f64]) -> Result<Trajectory> {
    let states = times
        .iter()
        .map(|&t| {
            let b = evolve_amplitudes(pair, initial, t)?;
            SingleParticleState::from_amplitudes(b[0], b[1], t)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory { states })
}

/// `exp(-G t) sinh^2(w t/2)/w^2` and `exp(-G t) sinh(w t)/w` for complex `w`,
/// written with decaying exponentials only.
fn damped_hyperbolics(gamma: f64, omega: Complex64, t: f64) -> (Complex64, Complex64) {
    let damp = (-gamma * t).exp();
    let x = omega * t;
    if x.norm() < 0.1 {
        let shc = |z: Complex64| {
            let z2 = z * z;
            Complex64::new(1.0, 0.0) + z2 / 6.0 + z2 * z2 / 120.0 + z2 * z2 * z2 / 5040.0 + z2 * z2 * z2 * z2 / 362880.0
        };
        let half = shc(0.5 * x) * (0.5 * t);
        (half * half * damp, shc(x) * t * damp)
    } else {
        let grow = ((omega - gamma) * t).exp();
        let shrink = (-(omega + gamma) * t).exp();
        let a = (grow - 2.0 * damp + shrink) / (4.0 * omega * omega);
        let b = (grow - shrink) / (2.0 * omega);
        (a, b)
    }
}

/// Closed-form reduced density matrix for identical wells (`G1 = G2 = gamma`,
/// even parity) with the particle initially in well 1.
///
/// `omega = sqrt(gamma^2 - epsilon^2)` is taken complex, so `epsilon > gamma`
/// continues to oscillating solutions on the same code path.
pub fn analytic_sigma_symmetric(gamma: f64, epsilon: f64, t: f64) -> DotDensity {
    let omega = Complex64::new(gamma * gamma - epsilon * epsilon, 0.0).sqrt();
    let (a, b) = damped_hyperbolics(gamma, omega, t);
    let i = Complex64::i();
    DotDensity {
        s11: (-gamma * t).exp() + gamma * gamma * a.re,
        s22: gamma * gamma * a.re,
        s12: i * epsilon * gamma * a - 0.5 * gamma * b,
    }
}

fn aligned(pair: &WellPair) -> bool {
    let scale = pair.e1().abs().max(pair.e2().abs()).max(pair.gamma1() + pair.gamma2());
    pair.epsilon().abs() <= 1e-12 * scale
}

pub(crate) fn require_aligned(pair: &WellPair) -> Result<()> {
    if aligned(pair) {
        Ok(())
    } else {
        Err(Error::NoBoundState(pair.epsilon()))
    }
}

/// Asymptotic probabilities `(P0, P1)` of staying in the dots and of ending in
/// the reservoir. Requires aligned levels.
pub fn asymptotic_probs(pair: &WellPair, initial: [Complex64; 2]) -> Result<(f64, f64)> {
    check_normalized(initial)?;
    require_aligned(pair)?;
    let rb = basis::rotate(pair);
    let dark = rb.to_rotated(initial)[0];
    let p0 = dark.norm_sqr();
    Ok((p0, 1.0 - p0))
}

/// The asymptotic state: the dark-state component of the initial state.
pub fn asymptotic_state(pair: &WellPair, initial: [Complex64; 2]) -> Result<SingleParticleState> {
    check_normalized(initial)?;
    require_aligned(pair)?;
    let rb = basis::rotate(pair);
    let dark = rb.to_rotated(initial)[0];
    let b1 = dark * rb.cos_abar;
    let b2 = -dark * rb.sin_abar;
    SingleParticleState::from_amplitudes(b1, b2, f64::INFINITY)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticSigma {
    pub s11: f64,
    pub s22: f64,
    pub s12: f64,
    pub s00: f64,
}

/// Asymptotic density matrix for a particle started in well 1, even parity,
/// aligned levels, as a function of `y = G2/G1`.
pub fn asymptotic_sigma_left_start(y: f64) -> Result<AsymptoticSigma> {
    if !(y > 0.0) || !y.is_finite() {
        return Err(Error::invalid("y", format!("must be positive, got {y}")));
    }
    let d = (1.0 + y) * (1.0 + y);
    Ok(AsymptoticSigma {
        s11: y * y / d,
        s22: y / d,
        s12: -y.powf(1.5) / d,
        s00: 1.0 / (1.0 + y),
    })
}

/// Dwell time of a particle started in well 1 for misaligned levels,
/// `G'2 / (4 g12^2) = (G1/eps^2)(1+y)^3/(4y)`.
pub fn dwell_time(pair: &WellPair) -> Result<f64> {
    let rb = basis::rotate(pair);
    if rb.g12 == 0.0 {
        return Err(Error::InfiniteDwellTime);
    }
    Ok(rb.gamma2_prime / (4.0 * rb.g12 * rb.g12))
}

/// Least-squares slope of `ln(values)` against `times`, returned as a
/// positive decay rate.
pub fn fit_exponential_decay(times: &[f64], values: &[f64]) -> Result<f64> {
    if times.len() != values.len() || times.len() < 2 {
        return Err(Error::invalid("fit", "need at least two samples"));
    }
    if values.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::invalid("fit", "values must be positive"));
    }
    let n = times.len() as f64;
    let logs: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let mt = times.iter().sum::<f64>() / n;
    let ml = logs.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (t, l) in times.iter().zip(&logs) {
        sxy += (t - mt) * (l - ml);
        sxx += (t - mt) * (t - mt);
    }
    if sxx == 0.0 {
        return Err(Error::invalid("fit", "times must not all coincide"));
    }
    Ok(-sxy / sxx)
}

/// Evenly spaced grid on `[0, t_max]` with `n_points` samples.
pub fn time_grid(t_max: f64, n_points: usize) -> Vec<f64> {
    match n_points {
        0 => vec![],
        1 => vec![t_max],
        _ => (0..n_points)
            .map(|k| t_max * k as f64 / (n_points - 1) as f64)
            .collect(),
    }
}
