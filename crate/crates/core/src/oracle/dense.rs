//! Exact evolution by full eigendecomposition of a dense Hermitian matrix.

use faer::{c64, Mat, Side};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub const DEFAULT_DIM_CAP: usize = 12_000;
pub const HERMITIAN_TOL: f64 = 1e-12;
pub const NORM_TOL: f64 = 1e-10;

/// A dense Hermitian matrix; real symmetric matrices take the faster real path.
#[derive(Debug, Clone)]
pub enum Hamiltonian {
    Real(Mat<f64>),
    Complex(Mat<c64>),
}

impl Hamiltonian {
    pub fn dim(&self) -> usize {
        match self {
            Hamiltonian::Real(m) => m.nrows(),
            Hamiltonian::Complex(m) => m.nrows(),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        match self {
            Hamiltonian::Real(m) => Complex64::new(m[(i, j)], 0.0),
            Hamiltonian::Complex(m) => m[(i, j)],
        }
    }

    /// Largest `|H - H^dagger|` entry.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    fn scale(&self) -> f64 {
        let n = self.dim();
        let mut s: f64 = 1.0;
        for i in 0..n {
            for j in 0..n {
                s = s.max(self.get(i, j).norm());
            }
        }
        s
    }

    pub fn check_hermitian(&self) -> Result<()> {
        let defect = self.hermiticity_defect();
        if defect > HERMITIAN_TOL * self.scale() {
            return Err(Error::NotHermitian(defect));
        }
        Ok(())
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        (0..n).map(|i| (0..n).map(|j| self.get(i, j) * v[j]).sum()).collect()
    }

    pub fn expectation(&self, v: &[Complex64]) -> f64 {
        let hv = self.matvec(v);
        v.iter().zip(&hv).map(|(a, b)| (a.conj() * b).re).sum()
    }
}

#[derive(Debug, Clone)]
enum Vectors {
    Real(Mat<f64>),
    Complex(Mat<c64>),
}

/// Eigenvalues and orthonormal eigenvectors (as columns) of a Hamiltonian.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    energies: Vec<f64>,
    vectors: Vectors,
}

impl EigenSystem {
    pub fn new(h: &Hamiltonian, dim_cap: usize) -> Result<Self> {
        let n = h.dim();
        if n > dim_cap {
            return Err(Error::DimensionTooLarge { dim: n, cap: dim_cap });
        }
        h.check_hermitian()?;
        match h {
            Hamiltonian::Real(m) => {
                let evd = m.self_adjoint_eigen(Side::Lower).map_err(|_| Error::Eigen)?;
                let energies = evd.S().column_vector().iter().copied().collect();
                Ok(Self {
                    energies,
                    vectors: Vectors::Real(evd.U().to_owned()),
                })
            }
            Hamiltonian::Complex(m) => {
                let evd = m.self_adjoint_eigen(Side::Lower).map_err(|_| Error::Eigen)?;
                let energies = evd.S().column_vector().iter().map(|z| z.re).collect();
                Ok(Self {
                    energies,
                    vectors: Vectors::Complex(evd.U().to_owned()),
                })
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    fn v(&self, i: usize, k: usize) -> Complex64 {
        match &self.vectors {
            Vectors::Real(m) => Complex64::new(m[(i, k)], 0.0),
            Vectors::Complex(m) => m[(i, k)],
        }
    }

    /// Eigenbasis coefficients `V^dagger psi`.
    pub fn coefficients(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        let support: Vec<usize> = (0..n).filter(|&i| psi[i] != Complex64::new(0.0, 0.0)).collect();
        (0..n)
            .map(|k| support.iter().map(|&i| self.v(i, k).conj() * psi[i]).sum())
            .collect()
    }

    /// Component `j` of the state at time `t`, given its eigenbasis coefficients.
    pub fn component(&self, coeffs: &[Complex64], j: usize, t: f64) -> Complex64 {
        self.energies
            .iter()
            .zip(coeffs)
            .enumerate()
            .map(|(k, (&e, &c))| self.v(j, k) * Complex64::from_polar(1.0, -e * t) * c)
            .sum()
    }

    /// The full state at time `t`.
    pub fn state(&self, coeffs: &[Complex64], t: f64) -> Vec<Complex64> {
        let n = self.dim();
        let phased: Vec<Complex64> = self
            .energies
            .iter()
            .zip(coeffs)
            .map(|(&e, &c)| Complex64::from_polar(1.0, -e * t) * c)
            .collect();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        match &self.vectors {
            Vectors::Real(m) => {
                for k in 0..n {
                    let p = phased[k];
                    let col = m.col(k);
                    for (o, &x) in out.iter_mut().zip(col.iter()) {
                        *o += p * x;
                    }
                }
            }
            Vectors::Complex(m) => {
                for k in 0..n {
                    let p = phased[k];
                    let col = m.col(k);
                    for (o, &x) in out.iter_mut().zip(col.iter()) {
                        *o += p * x;
                    }
                }
            }
        }
        out
    }
}

pub fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

pub(crate) fn check_normalized(psi: &[Complex64]) -> Result<()> {
    let n = norm_sqr(psi);
    if (n - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized(n));
    }
    Ok(())
}

/// States at each requested time and the largest norm drift seen.
#[derive(Debug, Clone)]
pub struct Evolution {
    pub times: Vec<f64>,
    pub states: Vec<Vec<Complex64>>,
    pub max_norm_drift: f64,
}

/// `psi(t) = sum_k exp(-i E_k t) |k><k|psi0>` for every `t` in `times`.
pub fn evolve_exact(h: &Hamiltonian, psi0: &[Complex64], times: &[f64]) -> Result<Evolution> {
    evolve_exact_capped(h, psi0, times, DEFAULT_DIM_CAP)
}

pub fn evolve_exact_capped(h: &Hamiltonian, psi0: &[Complex64], times: &[f64], dim_cap: usize) -> Result<Evolution> {
    if psi0.len() != h.dim() {
        return Err(Error::invalid("psi0", "length does not match the Hamiltonian"));
    }
    check_normalized(psi0)?;
    let eig = EigenSystem::new(h, dim_cap)?;
    let coeffs = eig.coefficients(psi0);
    let mut max_norm_drift: f64 = 0.0;
    let states = times
        .iter()
        .map(|&t| {
            let s = eig.state(&coeffs, t);
            max_norm_drift = max_norm_drift.max((norm_sqr(&s) - 1.0).abs());
            s
        })
        .collect();
    Ok(Evolution {
        times: times.to_vec(),
        states,
        max_norm_drift,
    })
}
