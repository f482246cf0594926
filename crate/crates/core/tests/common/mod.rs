#![allow(dead_code)]

use momentsys::{ComplexMatrix, Complex64 as C64, MomentSequence};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn complex(lo: f64, hi: f64) -> impl Strategy<Value = C64> {
    (lo..hi, lo..hi).prop_map(|(a, b)| c(a, b))
}

pub fn matrix(n: usize, scale: f64) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec(complex(-scale, scale), n * n)
        .prop_map(move |v| ComplexMatrix::new(n, v).unwrap())
}

pub fn sized_matrix(max_n: usize, scale: f64) -> impl Strategy<Value = ComplexMatrix> {
    (1..=max_n).prop_flat_map(move |n| matrix(n, scale))
}

pub fn builtin_sequences() -> Vec<MomentSequence> {
    vec![
        MomentSequence::Factorial,
        MomentSequence::Catalan,
        MomentSequence::q_factorial(2.0).unwrap(),
        MomentSequence::gamma_ratio(2.0).unwrap(),
    ]
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_c(rng: &mut ChaCha8Rng, scale: f64) -> C64 {
    c(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale))
}

/// Well-conditioned random similarity: identity plus a small perturbation.
pub fn random_similarity(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let mut s = ComplexMatrix::identity(n);
    for i in 0..n {
        for j in 0..n {
            let v = s.get(i, j) + random_c(rng, 0.4);
            s.set(i, j, v);
        }
    }
    s
}

/// `S diag(d) S⁻¹`.
pub fn conjugated_diag(s: &ComplexMatrix, d: &[C64]) -> ComplexMatrix {
    let inv = s.inverse().unwrap();
    s.try_mul(&ComplexMatrix::diag(d)).unwrap().try_mul(&inv).unwrap()
}

pub fn rel_gap(x: &[C64], y: &[C64]) -> f64 {
    let d: f64 = x.iter().zip(y).map(|(a, b)| (a - b).norm()).sum();
    let s: f64 = y.iter().map(|b| b.norm()).sum();
    if s == 0.0 {
        d
    } else {
        d / s
    }
}

/// Exponents with well separated imaginary parts, so no two differ by an
/// integer (or a q-period shift) and the problem is non-resonant.
pub fn random_exponents(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    (0..n)
        .map(|i| c(rng.gen_range(1.0..3.0), -1.2 + 1.2 * i as f64 + rng.gen_range(-0.3..0.3)))
        .collect()
}

/// `(A, B, μ)` with `B` diagonalizable and `ratio(μ_i)` its eigenvalues.
pub fn random_problem(
    rng: &mut ChaCha8Rng,
    seq: &MomentSequence,
    n: usize,
) -> (ComplexMatrix, ComplexMatrix, Vec<C64>) {
    let mus = random_exponents(rng, n);
    let d: Vec<C64> = mus.iter().map(|m| seq.ratio(*m).unwrap()).collect();
    let s = random_similarity(rng, n);
    let b = conjugated_diag(&s, &d);
    let mut a = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            a.set(i, j, random_c(rng, 1.0));
        }
    }
    (a, b, mus)
}

/// Random complex number on the dyadic grid `(i + i'√−1)/64` with `|i|, |i'| ≤ 64·scale`,
/// so products of a few such numbers are exact in `f64`.
pub fn dyadic_c(rng: &mut ChaCha8Rng, scale: f64) -> C64 {
    let k = (64.0 * scale) as i64;
    c(rng.gen_range(-k..=k) as f64 / 64.0, rng.gen_range(-k..=k) as f64 / 64.0)
}

/// Rank-one `u vᵀ` with dyadic entries, so `det = 0` holds exactly;
/// `traceless` also forces `vᵀu = 0` exactly.
pub fn rank_one_planar(rng: &mut ChaCha8Rng, traceless: bool) -> ComplexMatrix {
    let u = [dyadic_c(rng, 1.0), dyadic_c(rng, 1.0)];
    let v = if traceless {
        let k = dyadic_c(rng, 1.0);
        [u[1] * k, -u[0] * k]
    } else {
        [dyadic_c(rng, 1.0), dyadic_c(rng, 1.0)]
    };
    ComplexMatrix::from_rows(&[vec![u[0] * v[0], u[0] * v[1]], vec![u[1] * v[0], u[1] * v[1]]]).unwrap()
}

/// Commuting pair `A = S diag(e) S⁻¹`, `B = S diag(ratio(μ_i)) S⁻¹` with a shift `λ`.
pub struct CommutingCase {
    pub a: ComplexMatrix,
    pub b: ComplexMatrix,
    pub mu: C64,
    pub lambda: C64,
    pub s0: Vec<C64>,
}

/// Draws a commuting case, shrinking `A` and `λ` so that the reduced
/// recursion grows at most like `2ᵖ`: `sup_p ‖(ratio(p+μ)I − B)⁻¹‖₁ · ‖A − λI‖₁ ≤ 2`.
pub fn commuting_case(rng: &mut ChaCha8Rng, seq: &MomentSequence, n: usize, order: usize) -> CommutingCase {
    let mus = random_exponents(rng, n);
    let s = random_similarity(rng, n);
    let d: Vec<C64> = mus.iter().map(|m| seq.ratio(*m).unwrap()).collect();
    let mut e: Vec<C64> = (0..n).map(|_| random_c(rng, 1.0)).collect();
    let mut lambda = random_c(rng, 1.0);
    let b = conjugated_diag(&s, &d);
    let bound = momentsys::solver::check_h2(&b, seq, mus[0], order).unwrap().bound_c.unwrap();
    let growth = bound * conjugated_diag(&s, &e).shift(-lambda).one_norm();
    if growth > 2.0 {
        let k = 2.0 / growth;
        e.iter_mut().for_each(|x| *x *= k);
        lambda *= k;
    }
    CommutingCase { a: conjugated_diag(&s, &e), b, mu: mus[0], lambda, s0: s.column(0) }
}
