//! Reference computations shared by the integration and acceptance tests.
//! Nothing here calls into the library's own expansion code.

#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

fn fact(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, k| a * k)
}

/// `(a1^+)^n1 (a2^+)^n2` written in the dark/bright modes by brute-force
/// polynomial multiplication. With couplings `(1, eta sqrt(y))` the modes are
/// `a1^+ = c D^+ + s B^+` and `a2^+ = -s D^+ + c B^+`. Keys are
/// `(n_dark, power of c)`; the power of `s` is the remainder.
fn expand(n1: usize, n2: usize) -> BTreeMap<(usize, usize), BigInt> {
    let mut poly: BTreeMap<(usize, usize), BigInt> = BTreeMap::new();
    poly.insert((0, 0), BigInt::one());
    let factors = std::iter::repeat_n(true, n1).chain(std::iter::repeat_n(false, n2));
    for first in factors {
        let mut next: BTreeMap<(usize, usize), BigInt> = BTreeMap::new();
        for ((nd, a), k) in &poly {
            // dark part, then bright part
            let (dark, bright) = if first {
                ((*a + 1, k.clone()), (*a, k.clone()))
            } else {
                ((*a, -k.clone()), (*a + 1, k.clone()))
            };
            *next.entry((nd + 1, dark.0)).or_insert_with(BigInt::zero) += dark.1;
            *next.entry((*nd, bright.0)).or_insert_with(BigInt::zero) += bright.1;
        }
        poly = next;
    }
    poly.retain(|_, k| !k.is_zero());
    poly
}

/// Exact emission distribution (index = bosons emitted) for `y = p/q`.
pub fn boson_emission_oracle(n1: usize, n2: usize, p: i64, q: i64) -> Vec<BigRational> {
    let n = n1 + n2;
    let poly = expand(n1, n2);
    let (p, q) = (BigInt::from(p), BigInt::from(q));
    let denom = num_traits::pow(&p + &q, n) * fact(n1) * fact(n2);
    (0..=n)
        .map(|m| {
            let nd = n - m;
            let terms: Vec<(usize, &BigInt)> = poly
                .iter()
                .filter(|((d, _), _)| *d == nd)
                .map(|((_, a), k)| (*a, k))
                .collect();
            let mut acc = BigInt::zero();
            for (a, k) in &terms {
                for (b, kk) in &terms {
                    assert_eq!((a + b) % 2, 0, "mixed parity in a dark/bright coefficient");
                    let half = (a + b) / 2;
                    acc += *k * *kk * num_traits::pow(p.clone(), half) * num_traits::pow(q.clone(), n - half);
                }
            }
            BigRational::new(acc * fact(nd) * fact(m), denom.clone())
        })
        .collect()
}

/// Sign (-1, 0, 1) of the amplitude on `|n_dark, n_bright>` for `y = p/q`.
pub fn boson_sign_oracle(n1: usize, n2: usize, p: i64, q: i64, eta: i32, n_dark: usize) -> i32 {
    let poly = expand(n1, n2);
    let terms: Vec<(usize, &BigInt)> = poly
        .iter()
        .filter(|((d, _), _)| *d == n_dark)
        .map(|((_, a), k)| (*a, k))
        .collect();
    let Some(a_min) = terms.iter().map(|t| t.0).min() else {
        return 0;
    };
    let e_max = terms.iter().map(|t| (t.0 - a_min) / 2).max().unwrap();
    // sum_a k_a y^((a - a_min)/2), scaled by q^e_max
    let mut acc = BigInt::zero();
    for (a, k) in &terms {
        let e = (a - a_min) / 2;
        acc += *k * num_traits::pow(BigInt::from(p), e) * num_traits::pow(BigInt::from(q), e_max - e);
    }
    let eta_part = if eta < 0 && a_min % 2 == 1 { -1 } else { 1 };
    if acc.is_zero() {
        0
    } else if acc.is_positive() {
        eta_part
    } else {
        -eta_part
    }
}

fn permutations(k: usize) -> Vec<(Vec<usize>, f64)> {
    if k == 0 {
        return vec![(vec![], 1.0)];
    }
    let mut out = Vec::new();
    for (perm, sign) in permutations(k - 1) {
        for pos in 0..=perm.len() {
            let mut p = perm.clone();
            p.insert(pos, k - 1);
            let flips = perm.len() - pos;
            out.push((p, if flips % 2 == 0 { sign } else { -sign }));
        }
    }
    out
}

/// Amplitudes of `c_1^+ c_2^+ ... c_k^+ |0>` with `c_i^+ = sum_m v_i[m] a_m^+`
/// on the ascending basis `a_{m1}^+ a_{m2}^+ ... |0>`: each is the minor
/// `det(v_i[m_j])`.
pub fn wedge(vs: &[Vec<f64>]) -> BTreeMap<Vec<u8>, f64> {
    let k = vs.len();
    let n = vs[0].len();
    let perms = permutations(k);
    let mut out = BTreeMap::new();
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != k {
            continue;
        }
        let cols: Vec<usize> = (0..n).filter(|m| mask >> m & 1 == 1).collect();
        let det: f64 = perms
            .iter()
            .map(|(p, s)| s * (0..k).map(|i| vs[i][cols[p[i]]]).product::<f64>())
            .sum();
        if det.abs() > 1e-15 {
            let occ = (0..n).map(|m| (mask >> m & 1) as u8).collect();
            out.insert(occ, det);
        }
    }
    out
}

pub fn add_wedges(a: &BTreeMap<Vec<u8>, f64>, ca: f64, b: &BTreeMap<Vec<u8>, f64>, cb: f64) -> BTreeMap<Vec<u8>, f64> {
    let mut out = BTreeMap::new();
    for (k, v) in a {
        *out.entry(k.clone()).or_insert(0.0) += ca * v;
    }
    for (k, v) in b {
        *out.entry(k.clone()).or_insert(0.0) += cb * v;
    }
    out
}

pub fn unit(n: usize, m: usize) -> Vec<f64> {
    (0..n).map(|i| if i == m { 1.0 } else { 0.0 }).collect()
}
