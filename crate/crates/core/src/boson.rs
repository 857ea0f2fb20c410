//! Bosons in two wells: exact rotation of Fock states to the dark/bright
//! basis and the resulting emission and retention distributions.
//!
//! All probabilities are rational functions of `y = G2/G1` and are
//! evaluated exactly with arbitrary-precision rationals; a float `y` is
//! converted to the rational it represents. Floats appear only in the
//! final conversion.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::io::CsvTable;
use crate::model::{Parity, WellPair};
use crate::single::require_aligned;

pub fn factorial(n: usize) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, k| acc * k)
}

pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

fn rational(y: f64) -> Result<BigRational> {
    if !(y > 0.0) || !y.is_finite() {
        return Err(Error::invalid("y", format!("must be positive and finite, got {y}")));
    }
    BigRational::from_float(y).ok_or_else(|| Error::invalid("y", "not representable"))
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn int(n: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// An exactly known probability distribution over a count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactDistribution {
    pub probabilities: Vec<BigRational>,
}

impl ExactDistribution {
    pub fn total(&self) -> BigRational {
        self.probabilities.iter().fold(BigRational::zero(), |a, p| a + p)
    }

    pub fn to_float(&self) -> FockDistribution {
        FockDistribution {
            probabilities: self.probabilities.iter().map(to_f64).collect(),
        }
    }
}

/// Probabilities indexed by an integer count.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FockDistribution {
    pub probabilities: Vec<f64>,
}

impl FockDistribution {
    pub fn get(&self, m: usize) -> f64 {
        self.probabilities.get(m).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    pub fn to_table(&self, count_column: &str) -> CsvTable {
        let mut t = CsvTable::new([count_column, "probability"]);
        for (m, p) in self.probabilities.iter().enumerate() {
            t.push_row(vec![m.into(), (*p).into()]);
        }
        t
    }
}

/// `|N1, N2>` expanded in the (dark, bright) basis.
#[derive(Debug, Clone, PartialEq)]
pub struct BosonFockState {
    pub n1: usize,
    pub n2: usize,
    /// Exact `|amplitude|^2`, indexed by the dark-mode occupation.
    probabilities: Vec<BigRational>,
    /// Sign of each amplitude (-1, 0 or +1).
    signs: Vec<i8>,
}

impl BosonFockState {
    pub fn total(&self) -> usize {
        self.n1 + self.n2
    }

    /// Real amplitude on `|n_dark, n_bright>`.
    pub fn amplitude(&self, n_dark: usize, n_bright: usize) -> f64 {
        if n_dark + n_bright != self.total() {
            return 0.0;
        }
        self.signs[n_dark] as f64 * to_f64(&self.probabilities[n_dark]).sqrt()
    }

    /// `(n_dark, n_bright, amplitude)` with the dark occupation descending.
    pub fn terms(&self) -> Vec<(usize, usize, f64)> {
        let n = self.total();
        (0..=n).rev().map(|d| (d, n - d, self.amplitude(d, n - d))).collect()
    }

    pub fn probability_exact(&self, n_dark: usize) -> &BigRational {
        &self.probabilities[n_dark]
    }

    /// Distribution of the number `m` of bosons emitted: the bright
    /// occupation decays completely, the dark one is kept.
    pub fn emission_exact(&self) -> ExactDistribution {
        let n = self.total();
        ExactDistribution {
            probabilities: (0..=n).map(|m| self.probabilities[n - m].clone()).collect(),
        }
    }

    pub fn emission(&self) -> FockDistribution {
        self.emission_exact().to_float()
    }
}

/// Exact rotation of `a1^+^N1 a2^+^N2 |0>/sqrt(N1! N2!)` for rational `y`.
///
/// With `a1^+ = c D^+ + s B^+`, `a2^+ = -s D^+ + c B^+`, `c = eta sqrt(y/(1+y))`
/// and `s = 1/sqrt(1+y)`, the amplitude on `|n_d, n_b>` is
/// `sqrt(n_d! n_b!/(N1! N2!)) sum_j C(N1, n_d-j) C(N2, j) (-1)^j c^a_j s^(N-a_j)`
/// with `a_j = n_d - 2j + N2`, all of one parity.
pub fn rotate_fock_exact(n1: usize, n2: usize, y: &BigRational, eta: Parity) -> Result<BosonFockState> {
    let n = n1 + n2;
    if n == 0 {
        return Err(Error::invalid("N1 + N2", "need at least one boson"));
    }
    if !y.is_positive() {
        return Err(Error::invalid("y", "must be positive"));
    }
    let one_plus_y_n = (BigRational::one() + y).pow(n as i32);
    let denom_fact = factorial(n1) * factorial(n2);
    let mut probabilities = Vec::with_capacity(n + 1);
    let mut signs = Vec::with_capacity(n + 1);
    for nd in 0..=n {
        let nb = n - nd;
        let j_lo = nd.saturating_sub(n1);
        let j_hi = n2.min(nd);
        let a_min = nd + n2 - 2 * j_hi;
        // Q(y) = sum_j C(N1, nd-j) C(N2, j) (-1)^j y^((a_j - a_min)/2)
        let mut q = BigRational::zero();
        for j in j_lo..=j_hi {
            let coeff = binomial(n1, nd - j) * binomial(n2, j);
            let term = BigRational::from_integer(coeff) * y.pow((j_hi - j) as i32);
            if j.is_odd() {
                q -= term;
            } else {
                q += term;
            }
        }
        let p = BigRational::new(factorial(nd) * factorial(nb), denom_fact.clone()) * y.pow(a_min as i32) * &q * &q
            / &one_plus_y_n;
        let eta_sign = if eta == Parity::Odd && a_min.is_odd() { -1 } else { 1 };
        let sign = if q.is_zero() {
            0
        } else if q.is_positive() {
            eta_sign
        } else {
            -eta_sign
        };
        probabilities.push(p);
        signs.push(sign);
    }
    Ok(BosonFockState {
        n1,
        n2,
        probabilities,
        signs,
    })
}

pub fn rotate_fock(n1: usize, n2: usize, y: f64, eta: Parity) -> Result<BosonFockState> {
    rotate_fock_exact(n1, n2, &rational(y)?, eta)
}

fn pair_ratio(pair: &WellPair) -> Result<(f64, Parity)> {
    let d = pair.derive();
    match d.eta {
        Some(eta) if !d.y_infinite => Ok((d.y, eta)),
        _ => Err(Error::invalid("omega", "both couplings must be nonzero")),
    }
}

/// Emission distribution for `N1` and `N2` bosons started in wells 1 and 2.
/// Requires aligned levels.
pub fn emission_distribution(pair: &WellPair, n1: usize, n2: usize) -> Result<FockDistribution> {
    require_aligned(pair)?;
    let (y, eta) = pair_ratio(pair)?;
    Ok(rotate_fock(n1, n2, y, eta)?.emission())
}

/// `(2y, (1-y)^2, 2y)/(1+y)^2`, the two-boson law, evaluated exactly.
pub fn two_boson_law_exact(y: &BigRational) -> ExactDistribution {
    let one = BigRational::one();
    let d = (&one + y) * (&one + y);
    let two_y = y * int(2);
    ExactDistribution {
        probabilities: vec![&two_y / &d, (&one - y) * (&one - y) / &d, &two_y / &d],
    }
}

/// All `N` bosons in well 1: `P_m = C(N, m) y^(N-m)/(1+y)^N`.
pub fn single_well_emission_exact(n: usize, y: &BigRational) -> ExactDistribution {
    let d = (BigRational::one() + y).pow(n as i32);
    ExactDistribution {
        probabilities: (0..=n)
            .map(|m| BigRational::from_integer(binomial(n, m)) * y.pow((n - m) as i32) / &d)
            .collect(),
    }
}

/// `N` bosons in each of two identical wells: only even counts are emitted,
/// `P_2m = [2(N-m)]! (2m)! / (2^2N [(N-m)! m!]^2)`.
pub fn equal_fill_even_distribution_exact(n: usize) -> ExactDistribution {
    let pow = BigInt::from(2).pow(2 * n as u32);
    let mut probabilities = vec![BigRational::zero(); 2 * n + 1];
    for m in 0..=n {
        let num = factorial(2 * (n - m)) * factorial(2 * m);
        let den = &pow * (factorial(n - m) * factorial(m)).pow(2);
        probabilities[2 * m] = BigRational::new(num, den);
    }
    ExactDistribution { probabilities }
}

pub fn equal_fill_even_distribution(n: usize) -> FockDistribution {
    equal_fill_even_distribution_exact(n).to_float()
}

/// The retained dark-mode state `(D^+)^Ntilde |0>/sqrt(Ntilde!)` expanded in
/// wells: probability of `k` bosons in well 1 is `C(Ntilde, k) y^k/(1+y)^Ntilde`.
pub fn retained_state_split_exact(n: usize, y: &BigRational) -> ExactDistribution {
    let d = (BigRational::one() + y).pow(n as i32);
    ExactDistribution {
        probabilities: (0..=n)
            .map(|k| BigRational::from_integer(binomial(n, k)) * y.pow(k as i32) / &d)
            .collect(),
    }
}

pub fn retained_state_split(n: usize, y: f64) -> Result<FockDistribution> {
    Ok(retained_state_split_exact(n, &rational(y)?).to_float())
}

/// An approximate value next to the exact one it approximates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Approximation {
    pub value: f64,
    pub exact: f64,
    pub relative_error: f64,
}

impl Approximation {
    fn new(value: f64, exact: f64) -> Self {
        Self {
            value,
            exact,
            relative_error: ((value - exact) / exact).abs(),
        }
    }
}

/// Stirling form of the single-well law,
/// `2^(N+1/2) y^(N-m) exp(-(N-2m)^2/(2N)) / ((1+y)^N sqrt(pi N))`.
pub fn gaussian_approximation(n: usize, y: f64, m: usize) -> Result<Approximation> {
    if m > n || n == 0 {
        return Err(Error::invalid("m", "must lie in 0..=N with N > 0"));
    }
    let nf = n as f64;
    let d = nf - 2.0 * m as f64;
    let log_value = (nf + 0.5) * 2f64.ln() + (nf - m as f64) * y.ln()
        - nf * (1.0 + y).ln()
        - 0.5 * (std::f64::consts::PI * nf).ln()
        - d * d / (2.0 * nf);
    let exact = to_f64(&single_well_emission_exact(n, &rational(y)?).probabilities[m]);
    Ok(Approximation::new(log_value.exp(), exact))
}

/// Flat form of the equal-fill law, `P_2m ~ 1/(pi sqrt((N-m) m))`.
pub fn flat_approximation(n: usize, m: usize) -> Result<Approximation> {
    if m == 0 || m >= n {
        return Err(Error::invalid("m", "must satisfy 0 < m < N"));
    }
    let value = 1.0 / (std::f64::consts::PI * (((n - m) * m) as f64).sqrt());
    let exact = to_f64(&equal_fill_even_distribution_exact(n).probabilities[2 * m]);
    Ok(Approximation::new(value, exact))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn one_per_well_at_unit_ratio() {
        let s = rotate_fock(1, 1, 1.0, Parity::Even).unwrap();
        let r = 0.5f64.sqrt();
        let t = s.terms();
        assert_eq!((t[0].0, t[0].1), (2, 0));
        assert!((t[0].2 + r).abs() < 1e-15);
        assert_eq!(t[1].2, 0.0);
        assert!((t[2].2 - r).abs() < 1e-15);
    }

    #[test]
    fn single_boson_matches_dark_state() {
        let y = 4.0;
        for eta in [Parity::Even, Parity::Odd] {
            let s = rotate_fock(1, 0, y, eta).unwrap();
            let pair = WellPair::from_widths(1.0, y, eta, 0.0, 0.0).unwrap();
            let d = crate::basis::dark_state(&pair);
            // <D|a1^+|0> is the well-1 coefficient of the dark state.
            assert!((s.amplitude(1, 0) - d[0]).abs() < 1e-15);
            let s2 = rotate_fock(0, 1, y, eta).unwrap();
            assert!((s2.amplitude(1, 0) - d[1]).abs() < 1e-15);
        }
    }

    #[test]
    fn two_by_two_keeps_even_bright_counts() {
        let s = rotate_fock(2, 2, 1.0, Parity::Even).unwrap();
        for m in [1, 3] {
            assert!(s.probability_exact(4 - m).is_zero());
        }
    }

    #[test]
    fn two_boson_law() {
        for (n, d) in [(1, 1), (1, 4), (4, 1), (7, 3)] {
            let y = q(n, d);
            let got = rotate_fock_exact(1, 1, &y, Parity::Even).unwrap().emission_exact();
            assert_eq!(got, two_boson_law_exact(&y));
        }
        let pair = WellPair::symmetric(1.0, 0.0).unwrap();
        let p = emission_distribution(&pair, 1, 1).unwrap();
        assert_eq!(p.probabilities, vec![0.5, 0.0, 0.5]);
        let off = WellPair::symmetric(1.0, 0.2).unwrap();
        assert!(matches!(emission_distribution(&off, 1, 1), Err(Error::NoBoundState(_))));
    }

    #[test]
    fn single_well_binomial() {
        let got = rotate_fock_exact(3, 0, &q(1, 1), Parity::Even)
            .unwrap()
            .emission_exact();
        assert_eq!(got.probabilities, vec![q(1, 8), q(3, 8), q(3, 8), q(1, 8)]);
        assert_eq!(got, single_well_emission_exact(3, &q(1, 1)));
    }

    #[test]
    fn equal_fill_examples() {
        let p = equal_fill_even_distribution_exact(1).probabilities;
        assert_eq!(p, vec![q(1, 2), q(0, 1), q(1, 2)]);
        let p = equal_fill_even_distribution_exact(2).probabilities;
        assert_eq!(p, vec![q(3, 8), q(0, 1), q(1, 4), q(0, 1), q(3, 8)]);
        for n in 0..30 {
            assert!(equal_fill_even_distribution_exact(n).total().is_one());
        }
    }

    #[test]
    fn retained_split_examples() {
        assert_eq!(
            retained_state_split_exact(2, &q(1, 1)).probabilities,
            vec![q(1, 4), q(1, 2), q(1, 4)]
        );
        assert_eq!(retained_state_split_exact(0, &q(3, 1)).probabilities, vec![q(1, 1)]);
        let p = retained_state_split_exact(4, &q(1, 1)).probabilities;
        assert_eq!(p, [1, 4, 6, 4, 1].iter().map(|&k| q(k, 16)).collect::<Vec<_>>());
        let y = q(3, 1);
        let p = retained_state_split_exact(2, &y).probabilities;
        assert_eq!(p[2], q(9, 16));
    }

    #[test]
    fn approximations() {
        let a = gaussian_approximation(50, 1.0, 25).unwrap();
        assert!(a.relative_error < 0.05);
        let f = flat_approximation(100, 50).unwrap();
        assert!((f.value - 1.0 / (std::f64::consts::PI * 50.0)).abs() < 1e-15);
        assert!(f.relative_error < 0.01);
    }

    #[test]
    fn large_counts_stay_finite() {
        let p = equal_fill_even_distribution(180);
        assert!((p.total() - 1.0).abs() < 1e-12);
        let s = rotate_fock(90, 90, 1.0, Parity::Even).unwrap();
        assert!((s.emission().total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn csv_table() {
        let t = FockDistribution {
            probabilities: vec![0.5, 0.0, 0.5],
        }
        .to_table("m");
        assert_eq!(t.render(&[]).lines().next(), Some("m,probability"));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn exact_normalization(n1 in 0usize..7, n2 in 0usize..7, y in 0.01f64..100.0, odd in any::<bool>()) {
            prop_assume!(n1 + n2 > 0);
            let eta = if odd { Parity::Odd } else { Parity::Even };
            let s = rotate_fock(n1, n2, y, eta).unwrap();
            prop_assert!(s.emission_exact().total().is_one());
            let k = s.emission();
            prop_assert!((k.total() - 1.0).abs() < 1e-12);
            prop_assert!(k.probabilities.iter().all(|&p| p >= 0.0));
        }

        #[test]
        fn probabilities_independent_of_parity(n1 in 0usize..6, n2 in 0usize..6, y in 0.01f64..100.0) {
            prop_assume!(n1 + n2 > 0);
            let a = rotate_fock(n1, n2, y, Parity::Even).unwrap().emission_exact();
            let b = rotate_fock(n1, n2, y, Parity::Odd).unwrap().emission_exact();
            prop_assert_eq!(a, b);
        }
    }
}
