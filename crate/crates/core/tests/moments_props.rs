mod common;

use common::{builtin_sequences, c, complex};
use momentsys::moments::{solve_ratio_equation, MomentSequence, Region};
use momentsys::Error;
use proptest::prelude::*;

fn all_sequences() -> Vec<MomentSequence> {
    let mut v = builtin_sequences();
    v.push(MomentSequence::gevrey(0.5).unwrap());
    v.push(MomentSequence::q_factorial(1.5).unwrap());
    v.push(MomentSequence::expr("gamma(1+z/3)").unwrap());
    v
}

#[test]
fn ratio_matches_consecutive_moments() {
    for seq in all_sequences() {
        for p in 1..=100 {
            let z = c(p as f64, 0.0);
            let r = seq.ratio(z).unwrap();
            let direct = match (seq.eval_m(z), seq.eval_m(z - 1.0)) {
                // num-complex division squares |b|, so rescale first
                (Ok(a), Ok(b)) => (a / b.norm()) / (b / b.norm()),
                // m(p) beyond f64 range: compare through log-moments
                (Err(Error::Overflow(_)), _) | (_, Err(Error::Overflow(_))) => {
                    (seq.ln_m(z).unwrap() - seq.ln_m(z - 1.0).unwrap()).exp()
                }
                (Err(e), _) | (_, Err(e)) => panic!("{seq}: {e}"),
            };
            assert!((r - direct).norm() <= 1e-12 * r.norm().max(1.0) * (1.0 + p as f64 / 10.0), "{seq} p={p}: {r} vs {direct}");
        }
    }
}

#[test]
fn table_ratio_matches() {
    let t = MomentSequence::table(vec![1.0, 1.0, 2.0, 5.0, 14.0, 42.0]).unwrap();
    for p in 1..=5 {
        let z = c(p as f64, 0.0);
        let direct = t.eval_m(z).unwrap() / t.eval_m(z - 1.0).unwrap();
        assert!((t.ratio(z).unwrap() - direct).norm() <= 1e-12 * direct.norm());
    }
}

#[test]
fn factorial_ratio_is_identity() {
    for nu in 1..=5 {
        for p in 0..=100 {
            let z = c((p + nu) as f64, 0.0);
            assert!((MomentSequence::Factorial.ratio(z).unwrap() - z).norm() <= 1e-12 * z.norm());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn roots_invert_ratio(b in complex(0.5, 6.0), which in 0usize..5) {
        let seq = all_sequences().swap_remove(which);
        let region = Region::new(1.0, 20.0, -8.0, 8.0).unwrap();
        let roots = solve_ratio_equation(&seq, b, &region).unwrap();
        for mu in roots {
            prop_assert!(region.contains(mu));
            let r = seq.ratio(mu).unwrap();
            prop_assert!((r - b).norm() <= 1e-9 * (1.0 + b.norm()), "{seq}: ratio({mu}) = {r} vs {b}");
        }
    }

    #[test]
    fn descriptors_round_trip(which in 0usize..7) {
        let seq = all_sequences().swap_remove(which);
        let back: MomentSequence = seq.to_string().parse().unwrap();
        prop_assert_eq!(back, seq);
    }
}
