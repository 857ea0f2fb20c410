//! Two non-interacting fermions, one started in each dot, evolved through
//! their orbitals.

use num_complex::Complex64;
use serde::Serialize;

use super::SingleParticleOracle;
use crate::single::DotDensity;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoFermionSnapshot {
    pub t: f64,
    pub p_none_emitted: f64,
    pub p_one_emitted: f64,
    pub p_both_emitted: f64,
    /// Dot density of the remaining electron, conditioned on exactly one
    /// electron in the reservoir.
    pub retained: DotDensity,
}

/// `sum_k conj(a_k) b_k` over the index range.
fn overlap(a: &[Complex64], b: &[Complex64], range: std::ops::Range<usize>) -> Complex64 {
    range.map(|k| a[k].conj() * b[k]).sum()
}

fn det2(g: [[Complex64; 2]; 2]) -> f64 {
    (g[0][0] * g[1][1] - g[0][1] * g[1][0]).re
}

/// Evaluates the Slater determinant of orbitals `a1^+(t)|0>` and
/// `a2^+(t)|0>` at each time.
pub fn two_fermion_run(oracle: &SingleParticleOracle, times: &[f64]) -> Vec<TwoFermionSnapshot> {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let n = oracle.eigen().dim();
    let ca = oracle.eigen().coefficients(&oracle.dot_state([one, zero]));
    let cb = oracle.eigen().coefficients(&oracle.dot_state([zero, one]));
    times
        .iter()
        .map(|&t| {
            let a = oracle.eigen().state(&ca, t);
            let b = oracle.eigen().state(&cb, t);
            let phi = [&a, &b];
            let gram = |range: std::ops::Range<usize>| {
                let mut g = [[zero; 2]; 2];
                for i in 0..2 {
                    for j in 0..2 {
                        g[i][j] = overlap(phi[i], phi[j], range.clone());
                    }
                }
                g
            };
            let gd = gram(0..2);
            let gr = gram(2..n);
            let p_none = det2(gd);
            let p_both = det2(gr);
            // sum_r A(d, r) conj(A(d', r)) with A(x1, x2) = a(x1) b(x2) - b(x1) a(x2)
            let dens = |d: usize, dp: usize| {
                a[d] * a[dp].conj() * gr[1][1] - a[d] * b[dp].conj() * gr[0][1] - b[d] * a[dp].conj() * gr[1][0]
                    + b[d] * b[dp].conj() * gr[0][0]
            };
            let s11 = dens(0, 0).re;
            let s22 = dens(1, 1).re;
            let p_one = s11 + s22;
            let retained = if p_one > 0.0 {
                DotDensity {
                    s11: s11 / p_one,
                    s22: s22 / p_one,
                    s12: dens(0, 1) / p_one,
                }
            } else {
                DotDensity {
                    s11: 0.0,
                    s22: 0.0,
                    s12: zero,
                }
            };
            TwoFermionSnapshot {
                t,
                p_none_emitted: p_none,
                p_one_emitted: p_one,
                p_both_emitted: p_both,
                retained,
            }
        })
        .collect()
}
