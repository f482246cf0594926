mod common;

use common::{c, complex, matrix, random_similarity, rng, sized_matrix};
use momentsys::matrices::{eigen, jordan, rank, vec_norm1, JordanDecomposition};
use momentsys::{ComplexMatrix, Complex64 as C64};
use proptest::prelude::*;

fn sum_close(x: C64, y: C64, scale: f64) -> bool {
    (x - y).norm() <= 1e-9 * (1.0 + scale)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn one_norm_is_submultiplicative((a, b) in (1usize..=4).prop_flat_map(|n| (matrix(n, 3.0), matrix(n, 3.0)))) {
        let ab = a.try_mul(&b).unwrap();
        prop_assert!(ab.one_norm() <= a.one_norm() * b.one_norm() * (1.0 + 1e-12));
    }

    #[test]
    fn matrix_vector_norm_bound(a in matrix(3, 2.0), v in prop::collection::vec(complex(-2.0, 2.0), 3)) {
        let av = a.mul_vec(&v).unwrap();
        prop_assert!(vec_norm1(&av) <= a.one_norm() * vec_norm1(&v) * (1.0 + 1e-12));
    }

    #[test]
    fn inverse_is_an_involution(m in sized_matrix(4, 1.0)) {
        // diagonally dominant, hence invertible with a modest condition number
        let m = &m + &ComplexMatrix::scalar(m.n(), c(5.0, 0.0));
        let back = m.inverse().unwrap().inverse().unwrap();
        prop_assert!((&back - &m).one_norm() <= 1e-10 * m.one_norm());
        let id = m.try_mul(&m.inverse().unwrap()).unwrap();
        prop_assert!((&id - &ComplexMatrix::identity(m.n())).one_norm() <= 1e-12 * m.n() as f64 * 10.0);
    }

    #[test]
    fn spectrum_matches_trace_and_det(m in sized_matrix(4, 2.0)) {
        let s = eigen(&m).unwrap();
        let sum: C64 = s.eigenvalues.iter().sum();
        let prod: C64 = s.eigenvalues.iter().product();
        let scale = m.one_norm().powi(m.n() as i32);
        prop_assert!(sum_close(sum, m.trace(), m.one_norm()));
        prop_assert!(sum_close(prod, m.det(), scale), "{prod} vs {}", m.det());
        for pair in &s.pairs {
            prop_assert!(pair.residual <= 1e-9 * (1.0 + m.one_norm()));
        }
    }

    #[test]
    fn jordan_reconstructs_diagonalizable(seed in 0u64..1000, values in prop::collection::vec(complex(-3.0, 3.0), 1..=4)) {
        let mut r = rng(seed);
        let s = random_similarity(&mut r, values.len());
        let m = common::conjugated_diag(&s, &values);
        let d = jordan(&m, None).unwrap();
        prop_assert!(d.defect(&m).unwrap() <= 1e-9 * (1.0 + m.one_norm()));
        prop_assert_eq!(d.block_sizes.iter().sum::<usize>(), values.len());
    }

    #[test]
    fn jordan_hint_reconstructs_defective(seed in 0u64..1000, lambda in complex(-2.0, 2.0), other in complex(3.0, 5.0)) {
        // one 2x2 block for lambda and a 1x1 block for other
        let mut r = rng(seed);
        let p = random_similarity(&mut r, 3);
        let hint = JordanDecomposition::from_blocks(p.clone(), &[(2, lambda), (1, other)]).unwrap();
        let m = p.try_mul(&hint.j).unwrap().try_mul(&p.inverse().unwrap()).unwrap();
        let d = jordan(&m, Some(&hint)).unwrap();
        prop_assert!(d.defect(&m).unwrap() <= 1e-9 * (1.0 + m.one_norm()));
        prop_assert_eq!(&d.block_sizes, &vec![2, 1]);
    }
}

#[test]
fn rank_of_dependent_columns() {
    let v = vec![c(1.0, 0.0), c(2.0, -1.0)];
    let w: Vec<C64> = v.iter().map(|x| x * c(0.0, 3.0)).collect();
    assert_eq!(rank(&[v.clone(), w], 1e-9), 1);
    assert_eq!(rank(&[v, vec![c(0.0, 0.0), c(1.0, 0.0)]], 1e-9), 2);
}
