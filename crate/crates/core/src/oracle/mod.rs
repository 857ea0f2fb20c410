//! Brute-force reference: the dots coupled to a finite, discretized
//! reservoir and evolved exactly.
//!
//! One particle is handled by dense eigendecomposition ([`dense`]); many
//! particles live in a fixed-number Fock space ([`fock`]) and are propagated
//! by a Lanczos short-iterative scheme ([`krylov`]). [`slater`] evolves free
//! fermions through their orbitals.

pub mod dense;
pub mod fock;
pub mod krylov;
pub mod reservoir;
pub mod slater;

use faer::Mat;
use num_complex::Complex64;
use serde::Serialize;

pub use dense::{evolve_exact, EigenSystem, Evolution, Hamiltonian, DEFAULT_DIM_CAP};
pub use reservoir::DiscretizedReservoir;

use crate::error::Result;
use crate::model::{Well, WellPair};
use crate::single::{SingleParticleState, Trajectory};

/// Dense `(2 + n)`-dimensional one-particle Hamiltonian: index 0 and 1 are
/// the dots, then the reservoir levels in increasing energy.
pub fn build_single_particle_hamiltonian(pair: &WellPair, res: &DiscretizedReservoir) -> Mat<f64> {
    let n = res.n_levels;
    let v1 = res.level_coupling(pair, Well::One);
    let v2 = res.level_coupling(pair, Well::Two);
    let mut h = Mat::<f64>::zeros(n + 2, n + 2);
    h[(0, 0)] = pair.e1();
    h[(1, 1)] = pair.e2();
    for (r, &e) in res.levels.iter().enumerate() {
        let k = r + 2;
        h[(k, k)] = e;
        h[(0, k)] = v1;
        h[(k, 0)] = v1;
        h[(1, k)] = v2;
        h[(k, 1)] = v2;
    }
    h
}

/// Metadata attached to every oracle run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub lambda_cutoff: f64,
    pub n_levels: usize,
    pub spacing: f64,
    pub recurrence_time: f64,
    pub max_norm_drift: f64,
    /// Set when any sample lies at or past half the recurrence time.
    pub recurrence_warning: bool,
}

#[derive(Debug, Clone)]
pub struct OracleRun {
    pub trajectory: Trajectory,
    pub report: OracleReport,
}

/// One particle in the dots plus a discretized reservoir, diagonalized once.
#[derive(Debug, Clone)]
pub struct SingleParticleOracle {
    pub reservoir: DiscretizedReservoir,
    eigen: EigenSystem,
}

impl SingleParticleOracle {
    pub fn new(pair: &WellPair, reservoir: DiscretizedReservoir) -> Result<Self> {
        Self::with_cap(pair, reservoir, DEFAULT_DIM_CAP)
    }

    pub fn with_cap(pair: &WellPair, reservoir: DiscretizedReservoir, dim_cap: usize) -> Result<Self> {
        let h = Hamiltonian::Real(build_single_particle_hamiltonian(pair, &reservoir));
        let eigen = EigenSystem::new(&h, dim_cap)?;
        Ok(Self { reservoir, eigen })
    }

    pub fn eigen(&self) -> &EigenSystem {
        &self.eigen
    }

    pub fn dot_state(&self, c: [Complex64; 2]) -> Vec<Complex64> {
        let mut psi = vec![Complex64::new(0.0, 0.0); self.eigen.dim()];
        psi[0] = c[0];
        psi[1] = c[1];
        psi
    }

    /// Full one-particle state at `t` for a dot-localized start.
    pub fn state_at(&self, c: [Complex64; 2], t: f64) -> Vec<Complex64> {
        let coeffs = self.eigen.coefficients(&self.dot_state(c));
        self.eigen.state(&coeffs, t)
    }

    /// Samples the dot amplitudes; the norm drift is measured on the full
    /// state at the last sample.
    pub fn run(&self, c: [Complex64; 2], times: &[f64]) -> Result<OracleRun> {
        let psi0 = self.dot_state(c);
        dense::check_normalized(&psi0)?;
        let coeffs = self.eigen.coefficients(&psi0);
        let states = times
            .iter()
            .map(|&t| {
                let b1 = self.eigen.component(&coeffs, 0, t);
                let b2 = self.eigen.component(&coeffs, 1, t);
                SingleParticleState::from_amplitudes(b1, b2, t)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut max_norm_drift = (dense::norm_sqr(&coeffs) - 1.0).abs();
        if let Some(&t_last) = times.last() {
            let full = self.eigen.state(&coeffs, t_last);
            max_norm_drift = max_norm_drift.max((dense::norm_sqr(&full) - 1.0).abs());
        }
        let res = &self.reservoir;
        Ok(OracleRun {
            trajectory: Trajectory { states },
            report: OracleReport {
                lambda_cutoff: res.lambda,
                n_levels: res.n_levels,
                spacing: res.spacing,
                recurrence_time: res.recurrence_time(),
                max_norm_drift,
                recurrence_warning: times.iter().any(|&t| res.past_horizon(t)),
            },
        })
    }
}

/// A many-body oracle run: reduced quantities at each sample.
#[derive(Debug, Clone)]
pub struct FockRun {
    pub times: Vec<f64>,
    pub states: Vec<Vec<Complex64>>,
    pub reduced: Vec<fock::ManyBodyReduced>,
    pub stats: krylov::PropagationStats,
    pub report: OracleReport,
}

/// Propagates `psi0` in `space` under `h` with the Lanczos scheme.
pub fn run_fock(
    h: &fock::CsrMatrix,
    space: &fock::FockSpace,
    reservoir: &DiscretizedReservoir,
    psi0: &[Complex64],
    times: &[f64],
) -> Result<FockRun> {
    dense::check_normalized(psi0)?;
    let (states, stats) = krylov::trajectory(h, psi0, times, &krylov::KrylovOptions::default())?;
    let reduced = states.iter().map(|s| space.reduced(s)).collect();
    let report = OracleReport {
        lambda_cutoff: reservoir.lambda,
        n_levels: reservoir.n_levels,
        spacing: reservoir.spacing,
        recurrence_time: reservoir.recurrence_time(),
        max_norm_drift: stats.max_norm_drift,
        recurrence_warning: times.iter().any(|&t| reservoir.past_horizon(t)),
    };
    Ok(FockRun {
        times: times.to_vec(),
        states,
        reduced,
        stats,
        report,
    })
}
