//! Fixed-particle-number Fock spaces, second-quantized Hamiltonians in
//! compressed sparse row form, and reduced quantities of many-body states.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;
use serde::Serialize;

use super::reservoir::DiscretizedReservoir;
use crate::error::{Error, Result};
use crate::model::{ParallelWellPair, Well, WellPair};

pub const DEFAULT_FOCK_CAP: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistics {
    Fermion,
    Boson,
}

pub type Occupation = Vec<u8>;

/// All occupation vectors of `particle_number` particles over `n_modes`
/// modes, in lexicographic order. The first `n_dot_modes` modes are dots.
#[derive(Debug, Clone)]
pub struct FockSpace {
    pub n_modes: usize,
    pub n_dot_modes: usize,
    pub particle_number: usize,
    pub statistics: Statistics,
    basis: Vec<Occupation>,
    index: HashMap<Occupation, usize>,
}

fn count_states(n_modes: usize, n: usize, stats: Statistics) -> Option<usize> {
    // C(n_modes, n) or C(n_modes + n - 1, n), with overflow detection.
    let (top, k) = match stats {
        Statistics::Fermion => {
            if n > n_modes {
                return Some(0);
            }
            (n_modes, n)
        }
        Statistics::Boson => (n_modes + n - 1, n),
    };
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((top - i) as u128)? / (i as u128 + 1);
    }
    usize::try_from(acc).ok()
}

fn enumerate(n_modes: usize, n: usize, max_occ: usize, prefix: &mut Occupation, out: &mut Vec<Occupation>) {
    let mode = prefix.len();
    if mode == n_modes {
        if n == 0 {
            out.push(prefix.clone());
        }
        return;
    }
    // Remaining capacity must be able to absorb what is left.
    let rest = n_modes - mode - 1;
    for k in 0..=n.min(max_occ) {
        let left = n - k;
        if max_occ == 1 && left > rest {
            continue;
        }
        if rest == 0 && left != 0 {
            continue;
        }
        prefix.push(k as u8);
        enumerate(n_modes, left, max_occ, prefix, out);
        prefix.pop();
    }
}

impl FockSpace {
    pub fn new(
        n_modes: usize,
        n_dot_modes: usize,
        particle_number: usize,
        statistics: Statistics,
        cap: usize,
    ) -> Result<Self> {
        if n_dot_modes > n_modes {
            return Err(Error::invalid("n_dot_modes", "exceeds the number of modes"));
        }
        if particle_number > u8::MAX as usize {
            return Err(Error::invalid("particle_number", "too many particles"));
        }
        let dim = count_states(n_modes, particle_number, statistics).unwrap_or(usize::MAX);
        if dim > cap {
            return Err(Error::DimensionTooLarge { dim, cap });
        }
        let max_occ = match statistics {
            Statistics::Fermion => 1,
            Statistics::Boson => particle_number,
        };
        let mut basis = Vec::with_capacity(dim);
        enumerate(
            n_modes,
            particle_number,
            max_occ,
            &mut Vec::with_capacity(n_modes),
            &mut basis,
        );
        debug_assert_eq!(basis.len(), dim);
        let index = basis.iter().enumerate().map(|(i, o)| (o.clone(), i)).collect();
        Ok(Self {
            n_modes,
            n_dot_modes,
            particle_number,
            statistics,
            basis,
            index,
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Occupation] {
        &self.basis
    }

    pub fn index_of(&self, occ: &[u8]) -> Option<usize> {
        self.index.get(occ).copied()
    }

    pub fn reservoir_count(&self, occ: &[u8]) -> usize {
        occ[self.n_dot_modes..].iter().map(|&k| k as usize).sum()
    }

    /// `a_p^+` acting on an occupation vector: the new vector and its factor.
    pub fn create(&self, occ: &[u8], p: usize) -> Option<(Occupation, f64)> {
        let mut out = occ.to_vec();
        match self.statistics {
            Statistics::Fermion => {
                if occ[p] == 1 {
                    return None;
                }
                let below: usize = occ[..p].iter().map(|&k| k as usize).sum();
                out[p] = 1;
                Some((out, if below.is_multiple_of(2) { 1.0 } else { -1.0 }))
            }
            Statistics::Boson => {
                let n = occ[p] as f64;
                out[p] += 1;
                Some((out, (n + 1.0).sqrt()))
            }
        }
    }

    /// `a_q` acting on an occupation vector.
    pub fn annihilate(&self, occ: &[u8], q: usize) -> Option<(Occupation, f64)> {
        if occ[q] == 0 {
            return None;
        }
        let mut out = occ.to_vec();
        out[q] -= 1;
        match self.statistics {
            Statistics::Fermion => {
                let below: usize = occ[..q].iter().map(|&k| k as usize).sum();
                Some((out, if below.is_multiple_of(2) { 1.0 } else { -1.0 }))
            }
            Statistics::Boson => Some((out, (occ[q] as f64).sqrt())),
        }
    }

    /// `a_p^+ a_q` acting on an occupation vector.
    pub fn hop(&self, occ: &[u8], p: usize, q: usize) -> Option<(Occupation, f64)> {
        let (mid, f1) = self.annihilate(occ, q)?;
        let (out, f2) = self.create(&mid, p)?;
        Some((out, f1 * f2))
    }

    /// Expands `op_1 op_2 ... op_k |0>` where each `op` is a linear
    /// combination `sum_p coeff_p a_p^+`; the rightmost operator acts first.
    pub fn product_state(&self, ops: &[Vec<(usize, f64)>]) -> Result<Vec<Complex64>> {
        if ops.len() != self.particle_number {
            return Err(Error::invalid("ops", "operator count must equal the particle number"));
        }
        let mut terms: BTreeMap<Occupation, f64> = BTreeMap::new();
        terms.insert(vec![0; self.n_modes], 1.0);
        for op in ops.iter().rev() {
            let mut next: BTreeMap<Occupation, f64> = BTreeMap::new();
            for (occ, amp) in &terms {
                for &(p, c) in op {
                    if let Some((o, f)) = self.create(occ, p) {
                        *next.entry(o).or_insert(0.0) += amp * c * f;
                    }
                }
            }
            terms = next;
        }
        let mut psi = vec![Complex64::new(0.0, 0.0); self.dim()];
        for (occ, amp) in terms {
            let i = self.index_of(&occ).expect("expanded state lies in the space");
            psi[i] = Complex64::new(amp, 0.0);
        }
        Ok(psi)
    }

    /// `<psi| a_p^+ a_q |psi>`.
    pub fn one_body(&self, psi: &[Complex64], p: usize, q: usize) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, occ) in self.basis.iter().enumerate() {
            if psi[i] == Complex64::new(0.0, 0.0) {
                continue;
            }
            if let Some((o, f)) = self.hop(occ, p, q) {
                let j = self.index[&o];
                acc += psi[j].conj() * psi[i] * f;
            }
        }
        acc
    }

    /// Occupation, coherence and reservoir-count summaries of a state.
    pub fn reduced(&self, psi: &[Complex64]) -> ManyBodyReduced {
        let mut mode_occupations = vec![0.0; self.n_modes];
        let mut reservoir_distribution = vec![0.0; self.particle_number + 1];
        for (occ, a) in self.basis.iter().zip(psi) {
            let w = a.norm_sqr();
            for (m, &k) in occ.iter().enumerate() {
                mode_occupations[m] += w * k as f64;
            }
            reservoir_distribution[self.reservoir_count(occ)] += w;
        }
        let nd = self.n_dot_modes;
        let mut dot_coherences = vec![vec![Complex64::new(0.0, 0.0); nd]; nd];
        for (p, row) in dot_coherences.iter_mut().enumerate() {
            for (q, cell) in row.iter_mut().enumerate() {
                *cell = self.one_body(psi, p, q);
            }
        }
        ManyBodyReduced {
            mode_occupations,
            dot_coherences,
            reservoir_distribution,
        }
    }
}

/// Reduced description of a many-body state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ManyBodyReduced {
    pub mode_occupations: Vec<f64>,
    /// `<a_p^+ a_q>` over the dot modes.
    pub dot_coherences: Vec<Vec<Complex64>>,
    /// Probability of finding `m` particles in the reservoir.
    pub reservoir_distribution: Vec<f64>,
}

/// Real symmetric sparse matrix in compressed sparse row form.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds from triplets; duplicates are summed and exact zeros dropped.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_by_key(|t| (t.0, t.1));
        let mut row_ptr = vec![0; n + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut rows = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            if let (Some(&lr), Some(&lc)) = (rows.last(), col_idx.last()) {
                if lr == r && lc == c {
                    *values.last_mut().unwrap() += v;
                    continue;
                }
            }
            rows.push(r);
            col_idx.push(c);
            values.push(v);
        }
        let keep: Vec<usize> = (0..values.len()).filter(|&k| values[k] != 0.0).collect();
        let rows: Vec<usize> = keep.iter().map(|&k| rows[k]).collect();
        let col_idx: Vec<usize> = keep.iter().map(|&k| col_idx[k]).collect();
        let values: Vec<f64> = keep.iter().map(|&k| values[k]).collect();
        for &r in &rows {
            row_ptr[r + 1] += 1;
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self {
            n,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col_idx[range.clone()].binary_search(&j) {
            Ok(k) => self.values[range.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn matvec_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += x[self.col_idx[k]] * self.values[k];
            }
            *yi = acc;
        }
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::new(0.0, 0.0); self.n];
        self.matvec_into(x, &mut y);
        y
    }

    /// Largest `|H_ij - H_ji|`.
    pub fn symmetry_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.col_idx[k];
                worst = worst.max((self.values[k] - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn expectation(&self, psi: &[Complex64]) -> f64 {
        let hv = self.matvec(psi);
        psi.iter().zip(&hv).map(|(a, b)| (a.conj() * b).re).sum()
    }
}

/// One-body hoppings `t_pq a_p^+ a_q` plus density interactions
/// `u n_p n_q` over a set of modes.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ModeHamiltonian {
    pub n_modes: usize,
    pub n_dot_modes: usize,
    pub one_body: Vec<(usize, usize, f64)>,
    pub interactions: Vec<(usize, usize, f64)>,
}

impl ModeHamiltonian {
    fn with_reservoir(dot_levels: &[f64], dot_couplings: &[f64], res: &DiscretizedReservoir) -> Self {
        let nd = dot_levels.len();
        let mut one_body = Vec::new();
        for (d, &e) in dot_levels.iter().enumerate() {
            one_body.push((d, d, e));
        }
        for (r, &e) in res.levels.iter().enumerate() {
            let k = nd + r;
            one_body.push((k, k, e));
            for (d, &v) in dot_couplings.iter().enumerate() {
                if v != 0.0 {
                    one_body.push((d, k, v));
                    one_body.push((k, d, v));
                }
            }
        }
        Self {
            n_modes: nd + res.n_levels,
            n_dot_modes: nd,
            one_body,
            interactions: Vec::new(),
        }
    }

    /// Modes `(dot1, dot2, reservoir...)`.
    pub fn two_wells(pair: &WellPair, res: &DiscretizedReservoir) -> Self {
        let v = [res.level_coupling(pair, Well::One), res.level_coupling(pair, Well::Two)];
        Self::with_reservoir(&[pair.e1(), pair.e2()], &v, res)
    }

    /// Modes `(a1, a1', a2, a2', reservoir...)`: each pair shares its level,
    /// the upper well couples `yprime` times as strongly, and electrons in
    /// the same pair repel with `U`.
    pub fn parallel_wells(model: &ParallelWellPair, res: &DiscretizedReservoir) -> Self {
        let base = model.base();
        let v1 = res.level_coupling(base, Well::One);
        let v2 = res.level_coupling(base, Well::Two);
        let yp = model.yprime();
        let mut h = Self::with_reservoir(
            &[base.e1(), base.e1(), base.e2(), base.e2()],
            &[v1, yp * v1, v2, yp * v2],
            res,
        );
        if model.u() != 0.0 {
            h.interactions.push((0, 1, model.u()));
            h.interactions.push((2, 3, model.u()));
        }
        h
    }

    /// Second-quantized matrix on `space`.
    pub fn build(&self, space: &FockSpace) -> Result<CsrMatrix> {
        if space.n_modes != self.n_modes {
            return Err(Error::invalid("space", "mode count does not match the Hamiltonian"));
        }
        if !self.interactions.is_empty() && space.statistics == Statistics::Boson {
            return Err(Error::invalid(
                "space",
                "pair interactions are defined for fermions only",
            ));
        }
        let mut triplets = Vec::new();
        for (i, occ) in space.basis().iter().enumerate() {
            let mut diag = 0.0;
            for &(p, q, t) in &self.one_body {
                if p == q {
                    diag += t * occ[p] as f64;
                } else if let Some((o, f)) = space.hop(occ, p, q) {
                    let j = space.index_of(&o).expect("hop preserves particle number");
                    triplets.push((j, i, t * f));
                }
            }
            for &(p, q, u) in &self.interactions {
                diag += u * occ[p] as f64 * occ[q] as f64;
            }
            if diag != 0.0 {
                triplets.push((i, i, diag));
            }
        }
        let h = CsrMatrix::from_triplets(space.dim(), triplets);
        let defect = h.symmetry_defect();
        if defect > 1e-12 {
            return Err(Error::NotHermitian(defect));
        }
        Ok(h)
    }
}

/// Fock Hamiltonian of the two-well model or of the parallel-well model.
pub enum FockModel<'a> {
    TwoWells(&'a WellPair),
    Parallel(&'a ParallelWellPair),
}

pub fn build_fock_hamiltonian(
    model: FockModel<'_>,
    res: &DiscretizedReservoir,
    space: &FockSpace,
) -> Result<CsrMatrix> {
    let mh = match model {
        FockModel::TwoWells(p) => ModeHamiltonian::two_wells(p, res),
        FockModel::Parallel(p) => ModeHamiltonian::parallel_wells(p, res),
    };
    mh.build(space)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Parity;
    use crate::oracle::build_single_particle_hamiltonian;

    #[test]
    fn dimensions_and_order() {
        let f = FockSpace::new(5, 2, 2, Statistics::Fermion, 1000).unwrap();
        assert_eq!(f.dim(), 10);
        let b = FockSpace::new(4, 2, 3, Statistics::Boson, 1000).unwrap();
        assert_eq!(b.dim(), 20);
        for w in f.basis().windows(2) {
            assert!(w[0] < w[1]);
        }
        for occ in b.basis() {
            assert_eq!(occ.iter().map(|&k| k as usize).sum::<usize>(), 3);
        }
        assert!(matches!(
            FockSpace::new(100, 2, 3, Statistics::Fermion, 1000),
            Err(Error::DimensionTooLarge { .. })
        ));
    }

    #[test]
    fn fermion_signs() {
        let f = FockSpace::new(4, 4, 2, Statistics::Fermion, 100).unwrap();
        // a_0^+ a_2^+ |0> = |1010>, a_2^+ a_0^+ |0> = -|1010>
        let a = f.product_state(&[vec![(0, 1.0)], vec![(2, 1.0)]]).unwrap();
        let b = f.product_state(&[vec![(2, 1.0)], vec![(0, 1.0)]]).unwrap();
        let i = f.index_of(&[1, 0, 1, 0]).unwrap();
        assert_eq!(a[i].re, 1.0);
        assert_eq!(b[i].re, -1.0);
        assert!(f
            .product_state(&[vec![(1, 1.0)], vec![(1, 1.0)]])
            .unwrap()
            .iter()
            .all(|z| z.norm() == 0.0));
    }

    #[test]
    fn boson_factors() {
        let b = FockSpace::new(2, 2, 2, Statistics::Boson, 100).unwrap();
        let psi = b.product_state(&[vec![(0, 1.0)], vec![(0, 1.0)]]).unwrap();
        let i = b.index_of(&[2, 0]).unwrap();
        assert!((psi[i].re - 2f64.sqrt()).abs() < 1e-15);
        let (_, f) = b.hop(&[2, 0], 1, 0).unwrap();
        assert!((f - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn one_particle_sector_matches_dense() {
        let pair = WellPair::from_widths(1.0, 2.0, Parity::Odd, 0.3, -0.1).unwrap();
        let res = DiscretizedReservoir::new(6.0, 12).unwrap();
        let dense = build_single_particle_hamiltonian(&pair, &res);
        for stats in [Statistics::Fermion, Statistics::Boson] {
            let space = FockSpace::new(14, 2, 1, stats, 100).unwrap();
            let h = build_fock_hamiltonian(FockModel::TwoWells(&pair), &res, &space).unwrap();
            let pos = |m: usize| {
                let mut o = vec![0u8; 14];
                o[m] = 1;
                space.index_of(&o).unwrap()
            };
            for i in 0..14 {
                for j in 0..14 {
                    assert_eq!(h.get(pos(i), pos(j)), dense[(i, j)]);
                }
            }
        }
    }

    #[test]
    fn interaction_is_diagonal() {
        let base = WellPair::symmetric(1.0, 0.0).unwrap();
        let model = ParallelWellPair::new(base, 1.0, 3.0).unwrap();
        let res = DiscretizedReservoir::new(5.0, 10).unwrap();
        let space = FockSpace::new(14, 4, 2, Statistics::Fermion, 1000).unwrap();
        let with_u = build_fock_hamiltonian(FockModel::Parallel(&model), &res, &space).unwrap();
        let free = ParallelWellPair::new(base, 1.0, 0.0).unwrap();
        let without = build_fock_hamiltonian(FockModel::Parallel(&free), &res, &space).unwrap();
        for i in 0..space.dim() {
            for k in with_u.row_ptr[i]..with_u.row_ptr[i + 1] {
                let j = with_u.col_idx[k];
                let diff = with_u.values[k] - without.get(i, j);
                if i != j {
                    assert_eq!(diff, 0.0);
                } else {
                    let occ = &space.basis()[i];
                    let expect = 3.0 * (occ[0] * occ[1] + occ[2] * occ[3]) as f64;
                    assert!((diff - expect).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn csr_from_triplets_sums_duplicates() {
        let m = CsrMatrix::from_triplets(3, vec![(0, 1, 1.0), (0, 1, 2.0), (2, 2, 0.0), (1, 0, 3.0)]);
        assert_eq!(m.get(0, 1), 3.0);
        assert_eq!(m.get(2, 2), 0.0);
        assert_eq!(m.nnz(), 2);
        let y = m.matvec(&[
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(5.0, 0.0),
        ]);
        assert_eq!(y[0], Complex64::new(0.0, 3.0));
        assert_eq!(y[1], Complex64::new(3.0, 0.0));
    }

    #[test]
    fn reduced_quantities_of_filled_dots() {
        let space = FockSpace::new(6, 2, 2, Statistics::Fermion, 100).unwrap();
        let psi = space.product_state(&[vec![(0, 1.0)], vec![(1, 1.0)]]).unwrap();
        let r = space.reduced(&psi);
        assert_eq!(r.reservoir_distribution, vec![1.0, 0.0, 0.0]);
        assert_eq!(r.mode_occupations[0], 1.0);
        assert_eq!(r.dot_coherences[0][0].re, 1.0);
        assert_eq!(r.dot_coherences[0][1].norm(), 0.0);
    }
}
