//! Short-iterative Lanczos propagation for sparse real symmetric Hamiltonians.
//!
//! Each step builds an orthonormal Krylov basis (full reorthogonalization),
//! exponentiates the small tridiagonal matrix exactly and accepts the
//! largest step whose a-posteriori error estimate `beta_m |[exp(-i T dt) e1]_m|`
//! stays below the tolerance; rejected steps are halved.

use faer::{Mat, Side};
use num_complex::Complex64;

use super::fock::CsrMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrylovOptions {
    pub max_dim: usize,
    /// Bound on the estimated local error of one step.
    pub tol: f64,
    pub max_halvings: usize,
}

impl Default for KrylovOptions {
    fn default() -> Self {
        Self {
            max_dim: 40,
            tol: 1e-12,
            max_halvings: 60,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PropagationStats {
    pub steps: usize,
    pub max_local_error: f64,
    pub max_norm_drift: f64,
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

struct Krylov {
    basis: Vec<Vec<Complex64>>,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    /// `beta_m`, coupling out of the subspace; zero on an invariant subspace.
    residual: f64,
}

fn lanczos(h: &CsrMatrix, v0: &[Complex64], v0_norm: f64, max_dim: usize) -> Krylov {
    let n = v0.len();
    let m_cap = max_dim.min(n).max(1);
    let mut basis: Vec<Vec<Complex64>> = vec![v0.iter().map(|z| z / v0_norm).collect()];
    let mut alpha = Vec::new();
    let mut beta = Vec::new();
    let mut w = vec![Complex64::new(0.0, 0.0); n];
    let scale = h.values.iter().fold(1.0f64, |s, v| s.max(v.abs()));
    loop {
        let j = basis.len() - 1;
        h.matvec_into(&basis[j], &mut w);
        let a = dot(&basis[j], &w).re;
        alpha.push(a);
        // Two passes of Gram-Schmidt against the whole basis.
        for _ in 0..2 {
            for q in &basis {
                let c = dot(q, &w);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= c * qi;
                }
            }
        }
        let b = norm(&w);
        if basis.len() == m_cap || b <= 1e-13 * scale {
            return Krylov {
                basis,
                alpha,
                beta,
                residual: if b <= 1e-13 * scale { 0.0 } else { b },
            };
        }
        beta.push(b);
        basis.push(w.iter().map(|z| z / b).collect());
    }
}

/// `exp(-i T dt) e1` for the tridiagonal matrix `T`.
fn small_exponential(k: &Krylov, dt: f64) -> Result<Vec<Complex64>> {
    let m = k.alpha.len();
    let t = Mat::<f64>::from_fn(m, m, |i, j| {
        if i == j {
            k.alpha[i]
        } else if i + 1 == j {
            k.beta[i]
        } else if j + 1 == i {
            k.beta[j]
        } else {
            0.0
        }
    });
    let evd = t.self_adjoint_eigen(Side::Lower).map_err(|_| Error::Eigen)?;
    let u = evd.U();
    let s = evd.S().column_vector();
    let phased: Vec<Complex64> = (0..m)
        .map(|q| Complex64::from_polar(1.0, -s[q] * dt) * u[(0, q)])
        .collect();
    Ok((0..m).map(|i| (0..m).map(|q| phased[q] * u[(i, q)]).sum()).collect())
}

/// Propagates `psi` by `t` under `h`, returning the new state.
pub fn propagate(
    h: &CsrMatrix,
    psi: &[Complex64],
    t: f64,
    opts: &KrylovOptions,
    stats: &mut PropagationStats,
) -> Result<Vec<Complex64>> {
    if !(t >= 0.0) {
        return Err(Error::invalid("t", format!("must be >= 0, got {t}")));
    }
    let n0 = norm(psi);
    let mut state = psi.to_vec();
    let mut remaining = t;
    while remaining > 0.0 {
        let k = lanczos(h, &state, n0, opts.max_dim);
        let mut dt = remaining;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let c = small_exponential(&k, dt)?;
            let err = k.residual * c.last().map_or(0.0, |z| z.norm()) * n0;
            if err <= opts.tol {
                accepted = Some((c, err));
                break;
            }
            dt *= 0.5;
        }
        let (c, err) = accepted.ok_or_else(|| Error::invalid("krylov", "step size underflow"))?;
        let mut next = vec![Complex64::new(0.0, 0.0); state.len()];
        for (ci, q) in c.iter().zip(&k.basis) {
            for (o, qi) in next.iter_mut().zip(q) {
                *o += ci * qi * n0;
            }
        }
        state = next;
        stats.steps += 1;
        stats.max_local_error = stats.max_local_error.max(err);
        stats.max_norm_drift = stats.max_norm_drift.max((norm(&state) - n0).abs());
        remaining = if dt >= remaining { 0.0 } else { remaining - dt };
    }
    Ok(state)
}

/// Samples the evolution of `psi0` at non-decreasing `times`, starting at 0.
pub fn trajectory(
    h: &CsrMatrix,
    psi0: &[Complex64],
    times: &[f64],
    opts: &KrylovOptions,
) -> Result<(Vec<Vec<Complex64>>, PropagationStats)> {
    let mut stats = PropagationStats::default();
    let mut now = 0.0;
    let mut state = psi0.to_vec();
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        if !(t >= now) {
            return Err(Error::invalid("times", "must be non-decreasing and >= 0"));
        }
        state = propagate(h, &state, t - now, opts, &mut stats)?;
        now = t;
        out.push(state.clone());
    }
    Ok((out, stats))
}
