use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rislink::network::{max_singular_value, CMatrix};
use rislink::prelude::*;

const F: f64 = 3.55e9;

fn random_passive(rng: &mut ChaCha8Rng, p: usize, sigma: f64, reciprocal: bool) -> CMatrix {
    let mut m = CMatrix::from_fn(p, p, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    if reciprocal {
        m = (&m + m.transpose()) * Complex64::new(0.5, 0.0);
    }
    let s = max_singular_value(&m);
    m * Complex64::new(sigma / s, 0.0)
}

fn random_loads(rng: &mut ChaCha8Rng, n: usize) -> ReflectionVector {
    ReflectionVector::new(
        (0..n)
            .map(|_| Complex64::from_polar(rng.gen_range(0.0..1.0), rng.gen_range(-3.2..3.2)))
            .collect(),
    )
    .unwrap()
}

/// Solve for all incident and reflected waves at once: `b = S a`,
/// `a_k = Gamma_k b_k` at loaded ports, unit drive at one external port.
fn brute_force(s: &CMatrix, loads: &[Complex64]) -> CMatrix {
    let p = s.nrows();
    let ext = [0, p - 1];
    let mut out = CMatrix::zeros(2, 2);
    for (col, &drive) in ext.iter().enumerate() {
        let mut a = CMatrix::zeros(2 * p, 2 * p);
        let mut rhs = CMatrix::zeros(2 * p, 1);
        for i in 0..p {
            // b_i - sum_j S_ij a_j = 0
            a[(i, p + i)] = Complex64::new(1.0, 0.0);
            for j in 0..p {
                a[(i, j)] = -s[(i, j)];
            }
            let r = p + i;
            a[(r, i)] = Complex64::new(1.0, 0.0);
            if i == 0 || i == p - 1 {
                rhs[(r, 0)] = Complex64::new(if i == drive { 1.0 } else { 0.0 }, 0.0);
            } else {
                a[(r, p + i)] = -loads[i - 1];
            }
        }
        let x = a.lu().solve(&rhs).expect("solvable");
        for (row, &e) in ext.iter().enumerate() {
            out[(row, col)] = x[(p + e, 0)];
        }
    }
    out
}

fn rel_err(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max) / b.iter().map(|z| z.norm()).fold(1e-300, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reduction_matches_full_solve(seed in any::<u64>(), n in 1usize..8, sigma in 0.05f64..0.99) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_passive(&mut rng, n + 2, sigma, false);
        let loads = random_loads(&mut rng, n);
        let full = ScatterMatrix::link(s.clone(), F, 50.0).unwrap();
        let red = reduce_loaded(&full, &loads).unwrap();
        let oracle = brute_force(&s, loads.as_slice());
        prop_assert!(rel_err(red.entries(), &oracle) < 1e-10);
    }

    #[test]
    fn reduction_keeps_reciprocity_and_passivity(seed in any::<u64>(), n in 1usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_passive(&mut rng, n + 2, 0.98, true);
        let loads = random_loads(&mut rng, n);
        let red = reduce_loaded(&ScatterMatrix::link(s, F, 50.0).unwrap(), &loads).unwrap();
        prop_assert!(check_reciprocity(&red, 1e-12));
        prop_assert!(check_passivity(&red, 1e-9));
    }
}

#[test]
fn matched_loads_leave_the_direct_path() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let s = random_passive(&mut rng, 6, 0.9, true);
    let red = reduce_loaded(&ScatterMatrix::link(s.clone(), F, 50.0).unwrap(), &ReflectionVector::zeros(4)).unwrap();
    assert_eq!(red.get(1, 0), s[(5, 0)]);
    assert_eq!(red.get(0, 0), s[(0, 0)]);
}

#[test]
fn lossless_loop_is_rejected() {
    // one element reflecting onto itself with |S_11 Gamma| = 1
    let mut s = CMatrix::zeros(3, 3);
    s[(1, 1)] = Complex64::new(1.0, 0.0);
    let loads = ReflectionVector::new(vec![Complex64::new(1.0, 0.0)]).unwrap();
    let err = reduce_loaded(&ScatterMatrix::link(s, F, 50.0).unwrap(), &loads).unwrap_err();
    assert!(err.to_string().contains("condition"), "{err}");
}

#[test]
fn power_transfer_needs_a_reduced_two_port() {
    let s = ScatterMatrix::link(CMatrix::zeros(3, 3), F, 50.0).unwrap();
    assert!(power_transfer(&s).is_err());
}
