//! Asymptotic states of two to four electrons.
//!
//! Separated dots use modes `(a1, a2)`. Parallel dots use modes
//! `(a1, a1', a2, a2')`; in each pair the combination
//! `d_j = (y' a_j - a_j')/sqrt(1 + y'^2)` is dark and
//! `d_j' = (a_j + y' a_j')/sqrt(1 + y'^2)` couples to the reservoir. The
//! pair interaction commutes with `d_j^+ d_j`, so a filled dark mode only
//! shifts the level seen by the bright electrons.

use faer::Mat;
use num_complex::Complex64;
use serde::Serialize;

use crate::basis::rotate;
use crate::error::{Error, Result};
use crate::model::{ParallelWellPair, Well, WellPair};
use crate::oracle::fock::{FockSpace, Statistics};
use crate::single::{require_aligned, DotDensity};

pub const PRODUCT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DotTerm {
    pub occupation: Vec<u8>,
    pub amplitude: Complex64,
}

/// One branch of the asymptotic state: `reservoir_count` electrons emitted
/// with probability `probability`, leaving `terms` in the dots.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FermionAsymptoticState {
    pub reservoir_count: usize,
    pub probability: f64,
    pub modes: Vec<String>,
    pub terms: Vec<DotTerm>,
}

impl FermionAsymptoticState {
    pub fn norm_sqr(&self) -> f64 {
        self.terms.iter().map(|t| t.amplitude.norm_sqr()).sum()
    }

    pub fn amplitude(&self, occupation: &[u8]) -> Complex64 {
        self.terms
            .iter()
            .find(|t| t.occupation == occupation)
            .map_or(Complex64::new(0.0, 0.0), |t| t.amplitude)
    }

    /// Density matrix of a single electron in two modes.
    pub fn one_particle_density(&self) -> Option<DotDensity> {
        if self.modes.len() != 2 || self.terms.iter().any(|t| t.occupation.iter().sum::<u8>() != 1) {
            return None;
        }
        let b1 = self.amplitude(&[1, 0]);
        let b2 = self.amplitude(&[0, 1]);
        Some(DotDensity::from_amplitudes([b1, b2]))
    }
}

fn separated_modes() -> Vec<String> {
    vec!["a1".into(), "a2".into()]
}

fn parallel_modes() -> Vec<String> {
    vec!["a1".into(), "a1'".into(), "a2".into(), "a2'".into()]
}

/// Expands a product of mode combinations acting on the vacuum of `n_modes`
/// dot modes and normalizes it.
fn expand(n_modes: usize, ops: &[Vec<(usize, f64)>]) -> Result<Vec<DotTerm>> {
    let space = FockSpace::new(n_modes, n_modes, ops.len(), Statistics::Fermion, usize::MAX)?;
    let psi = space.product_state(ops)?;
    let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::invalid("state", "vanishing fermion product"));
    }
    Ok(space
        .basis()
        .iter()
        .zip(&psi)
        .filter(|(_, a)| a.norm() > 1e-15)
        .map(|(occ, a)| DotTerm {
            occupation: occ.clone(),
            amplitude: a / norm,
        })
        .collect())
}

/// Two electrons started in `a1^+ a2^+|0>` with aligned levels: exactly one
/// is emitted and the other is left in the dark state.
pub fn two_electron_asymptotic(pair: &WellPair) -> Result<Vec<FermionAsymptoticState>> {
    require_aligned(pair)?;
    let rb = rotate(pair);
    let terms = expand(2, &[vec![(0, rb.cos_abar), (1, -rb.sin_abar)]])?;
    Ok(vec![FermionAsymptoticState {
        reservoir_count: 1,
        probability: 1.0,
        modes: separated_modes(),
        terms,
    }])
}

/// The dark (`bright = false`) or bright mode of pair `j` as a combination
/// of `(a1, a1', a2, a2')`.
pub fn d_mode(model: &ParallelWellPair, j: Well, bright: bool) -> Vec<(usize, f64)> {
    let yp = model.yprime();
    let n = (1.0 + yp * yp).sqrt();
    let lower = match j {
        Well::One => 0,
        Well::Two => 2,
    };
    if bright {
        vec![(lower, 1.0 / n), (lower + 1, yp / n)]
    } else {
        vec![(lower, yp / n), (lower + 1, -1.0 / n)]
    }
}

/// Effective one-particle problem of the bright modes when the dark modes
/// hold `occupancy` electrons.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParallelMap {
    pub occupancy: (u8, u8),
    pub effective: WellPair,
    /// Dark-mode combinations acting as spectators.
    pub dark_modes: [Vec<(usize, f64)>; 2],
    pub bright_modes: [Vec<(usize, f64)>; 2],
}

pub fn parallel_map(model: &ParallelWellPair, occupancy: (u8, u8)) -> Result<ParallelMap> {
    if occupancy.0 > 1 || occupancy.1 > 1 {
        return Err(Error::invalid("occupancy", "dark-mode occupations must be 0 or 1"));
    }
    let b = model.base();
    let scale = (1.0 + model.yprime().powi(2)).sqrt();
    let effective = WellPair::new(
        b.e1() + model.u() * occupancy.0 as f64,
        b.e2() + model.u() * occupancy.1 as f64,
        b.omega1() * scale,
        b.omega2() * scale,
        b.rho(),
        b.lambda_cutoff(),
    )?;
    Ok(ParallelMap {
        occupancy,
        effective,
        dark_modes: [d_mode(model, Well::One, false), d_mode(model, Well::Two, false)],
        bright_modes: [d_mode(model, Well::One, true), d_mode(model, Well::Two, true)],
    })
}

fn combine(a: &[(usize, f64)], ca: f64, b: &[(usize, f64)], cb: f64) -> Vec<(usize, f64)> {
    a.iter()
        .map(|&(m, x)| (m, ca * x))
        .chain(b.iter().map(|&(m, x)| (m, cb * x)))
        .collect()
}

/// Two electrons started in `a1^+ a1'^+|0>`. On resonance (`E2 = E1 + U`)
/// both stay with probability `G2/(G1 + G2)`; otherwise one is emitted.
pub fn two_electron_parallel_asymptotic(model: &ParallelWellPair) -> Result<Vec<FermionAsymptoticState>> {
    let map = parallel_map(model, (1, 0))?;
    let d1 = &map.dark_modes[0];
    let emitted_one = FermionAsymptoticState {
        reservoir_count: 1,
        probability: 1.0,
        modes: parallel_modes(),
        terms: expand(4, std::slice::from_ref(d1))?,
    };
    if require_aligned(&map.effective).is_err() {
        return Ok(vec![emitted_one]);
    }
    let rb = rotate(&map.effective);
    let survivor = combine(&map.bright_modes[0], rb.cos_abar, &map.bright_modes[1], -rb.sin_abar);
    let p_keep = rb.cos_abar * rb.cos_abar;
    Ok(vec![
        FermionAsymptoticState {
            reservoir_count: 0,
            probability: p_keep,
            modes: parallel_modes(),
            terms: expand(4, &[d1.clone(), survivor])?,
        },
        FermionAsymptoticState {
            probability: 1.0 - p_keep,
            ..emitted_one
        },
    ])
}

/// Four electrons started in `a1^+ a1'^+ a2^+ a2'^+|0>` with aligned base
/// levels: one is emitted, leaving
/// `d1^+ (cos d1'^+ - sin d2'^+) d2^+|0>`.
pub fn three_electron_asymptotic(model: &ParallelWellPair) -> Result<Vec<FermionAsymptoticState>> {
    require_aligned(model.base())?;
    let map = parallel_map(model, (1, 1))?;
    let rb = rotate(&map.effective);
    let survivor = combine(&map.bright_modes[0], rb.cos_abar, &map.bright_modes[1], -rb.sin_abar);
    Ok(vec![FermionAsymptoticState {
        reservoir_count: 1,
        probability: 1.0,
        modes: parallel_modes(),
        terms: expand(4, &[map.dark_modes[0].clone(), survivor, map.dark_modes[1].clone()])?,
    }])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductCheck {
    pub product: bool,
    /// Distinct singular values of the antisymmetric coefficient matrix,
    /// largest first; one nonzero value means a single Slater determinant.
    pub pairing_values: Vec<f64>,
    /// `|C01 C23 - C02 C13 + C03 C12|`, zero exactly for a single determinant.
    pub plucker_residual: f64,
}

/// Slater-rank test for a normalized two-electron state on four modes.
pub fn is_product_state(terms: &[DotTerm]) -> Result<ProductCheck> {
    let mut c = [[Complex64::new(0.0, 0.0); 4]; 4];
    for t in terms {
        if t.occupation.len() != 4 || t.occupation.iter().any(|&k| k > 1) {
            return Err(Error::NotAntisymmetric(format!("bad occupation {:?}", t.occupation)));
        }
        let occ: Vec<usize> = (0..4).filter(|&m| t.occupation[m] == 1).collect();
        if occ.len() != 2 {
            return Err(Error::NotAntisymmetric(format!("{} electrons in a term", occ.len())));
        }
        let (p, q) = (occ[0], occ[1]);
        if c[p][q] != Complex64::new(0.0, 0.0) {
            return Err(Error::NotAntisymmetric(format!("repeated term {:?}", t.occupation)));
        }
        // |..1..1..> = a_p^+ a_q^+ |0> with p < q; the matrix carries 1/sqrt(2).
        c[p][q] = t.amplitude;
        c[q][p] = -t.amplitude;
    }
    is_product_matrix(&c)
}

/// Slater-rank test on an antisymmetric matrix `C` with the state
/// `sum_{p<q} C_pq a_p^+ a_q^+ |0>`.
pub fn is_product_matrix(c: &[[Complex64; 4]; 4]) -> Result<ProductCheck> {
    let mut norm = 0.0;
    for p in 0..4 {
        for q in 0..4 {
            if (c[p][q] + c[q][p]).norm() > 1e-12 {
                return Err(Error::NotAntisymmetric(format!("C[{p}][{q}] != -C[{q}][{p}]")));
            }
            if p < q {
                norm += c[p][q].norm_sqr();
            }
        }
    }
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized(norm));
    }
    let m = Mat::<faer::c64>::from_fn(4, 4, |i, j| c[i][j]);
    let sv = m.singular_values().map_err(|_| Error::Eigen)?;
    let pairing_values = vec![sv[0], sv[2]];
    let plucker = (c[0][1] * c[2][3] - c[0][2] * c[1][3] + c[0][3] * c[1][2]).norm();
    Ok(ProductCheck {
        product: sv[2] < PRODUCT_TOL,
        pairing_values,
        plucker_residual: plucker,
    })
}

/// Schmidt coefficients of a dot state across the cut between the first
/// `left_modes` modes and the rest, largest first.
pub fn bipartition_schmidt(terms: &[DotTerm], left_modes: usize) -> Result<Vec<f64>> {
    let mut lefts: Vec<Vec<u8>> = Vec::new();
    let mut rights: Vec<Vec<u8>> = Vec::new();
    let mut cells = Vec::new();
    for t in terms {
        if left_modes > t.occupation.len() {
            return Err(Error::invalid("left_modes", "exceeds the number of modes"));
        }
        let (l, r) = t.occupation.split_at(left_modes);
        let li = lefts.iter().position(|x| x == l).unwrap_or_else(|| {
            lefts.push(l.to_vec());
            lefts.len() - 1
        });
        let ri = rights.iter().position(|x| x == r).unwrap_or_else(|| {
            rights.push(r.to_vec());
            rights.len() - 1
        });
        cells.push((li, ri, t.amplitude));
    }
    if cells.is_empty() {
        return Ok(vec![]);
    }
    // Occupation vectors list creation operators in mode order, so the left
    // block factors out of each term without a sign.
    let mut m = Mat::<faer::c64>::zeros(lefts.len(), rights.len());
    for (li, ri, a) in cells {
        m[(li, ri)] += a;
    }
    m.singular_values().map_err(|_| Error::Eigen)
}

/// True when more than one Schmidt coefficient exceeds [`PRODUCT_TOL`].
pub fn bipartition_entangled(terms: &[DotTerm], left_modes: usize) -> Result<bool> {
    Ok(bipartition_schmidt(terms, left_modes)?
        .iter()
        .filter(|&&s| s > PRODUCT_TOL)
        .count()
        > 1)
}
