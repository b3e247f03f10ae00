//! Property tests for the structural invariants: norm axioms, binomial
//! symmetry against the exact oracle, the maximum-modulus sampling bound,
//! operator linearity, and an exact-rational regression of the whole
//! operator at parameter points where every quantity is rational.

mod common;

use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use qbalazs::funcspace;
use qbalazs::kernel::{circle_grid, sup_norm, Complex, NumericContext, Real};
use qbalazs::operators::{eval_r, QParams};

fn ctx() -> NumericContext {
    NumericContext::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sup_norm_is_permutation_invariant(
        vals in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 1..12),
        rot in 0usize..12,
    ) {
        let c = ctx();
        let points: Vec<Complex> = vals.iter().map(|(re, im)| c.complex(*re, *im)).collect();
        let mut rotated = points.clone();
        rotated.rotate_left(rot % rotated.len());
        let a = sup_norm(&points).unwrap();
        let b = sup_norm(&rotated).unwrap();
        prop_assert!((&a - &b).is_zero());
    }

    #[test]
    fn sup_norm_scales_absolutely_homogeneously(
        vals in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 1..10),
        scale in (-3.0f64..3.0, -3.0f64..3.0),
    ) {
        let c = ctx();
        let s = c.complex(scale.0, scale.1);
        let points: Vec<Complex> = vals.iter().map(|(re, im)| c.complex(*re, *im)).collect();
        let scaled: Vec<Complex> = points.iter().map(|p| p * &s).collect();
        let lhs = sup_norm(&scaled).unwrap();
        let rhs = s.modulus() * sup_norm(&points).unwrap();
        let gap = (&lhs - &rhs).abs();
        let tol = (&rhs + &c.one()) * c.real(1e-70);
        prop_assert!(gap.le(&tol));
    }

    #[test]
    fn q_binomial_symmetry_exact(n in 0u32..=30, kk in 0u32..=30, qi in 0usize..4) {
        let k = kk.min(n);
        let q = [common::rat(1, 2), common::rat(1, 1), common::rat(3, 2), common::rat(2, 1)]
            [qi].clone();
        let a = common::q_binomial_exact(n, k, &q);
        let b = common::q_binomial_exact(n, n - k, &q);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn disk_sampling_stays_under_circle_sup(coeffs in prop::collection::vec(-1.0f64..1.0, 1..=11)) {
        // polynomials of degree <= 10: interior samples never exceed the
        // 256-point boundary sup by more than the discretization slack
        let c = ctx();
        let p = funcspace::poly(&coeffs, 2.0).unwrap();
        let grid = circle_grid(&c, 0.8, 256).unwrap();
        let mut vals = Vec::with_capacity(grid.len());
        for z in grid.points() {
            vals.push(p.eval_in_disk(z).unwrap());
        }
        let boundary = sup_norm(&vals).unwrap();
        let slack = c.real(1e-10);
        for rho in [0.2f64, 0.5, 0.75] {
            let inner = circle_grid(&c, rho * 0.8, 32).unwrap();
            let mut ivals = Vec::with_capacity(inner.len());
            for z in inner.points() {
                ivals.push(p.eval_in_disk(z).unwrap());
            }
            let inner_sup = sup_norm(&ivals).unwrap();
            prop_assert!(inner_sup.le(&(&boundary + &slack)));
        }
    }

    #[test]
    fn operator_linearity_random_combinations(
        a in -2.0f64..2.0,
        b in -2.0f64..2.0,
        c3 in -2.0f64..2.0,
        n in 1u32..=12,
    ) {
        let c = ctx();
        let combo = funcspace::poly(&[a, b, c3], 5.0).unwrap();
        let p = QParams::new(&c, 1.5, 0.5, n).unwrap();
        let z = c.complex(0.4, -0.3);
        let direct = eval_r(&combo, &p, &z).unwrap();
        let mut acc = Complex::zero(256);
        for (coef, m) in [(a, 0u32), (b, 1), (c3, 2)] {
            let em = funcspace::monomial(m, 5.0).unwrap();
            acc = &acc + &eval_r(&em, &p, &z).unwrap().scale(&c.real(coef));
        }
        let gap = (&direct - &acc).modulus();
        let tol = (direct.modulus() + c.one()) * c.real(1e-70);
        prop_assert!(gap.le(&tol));
    }
}

/// Exact-rational regression of the full operator: at q = 1, beta = 1/2
/// and square n, every quantity (nodes, binomials, scales, the value) is
/// rational, so an independent exact-arithmetic evaluation pins the
/// big-float path.
#[test]
fn operator_matches_exact_rational_arithmetic() {
    let c = ctx();
    // f = 1 - 2t + 3t^2/4 with dyadic coefficients
    let coeffs = [1.0, -2.0, 0.75];
    let f = funcspace::poly(&coeffs, 50.0).unwrap();
    let coeffs_q: Vec<BigRational> = vec![common::rat(1, 1), common::rat(-2, 1), common::rat(3, 4)];
    let eval_exact = |t: &BigRational| -> BigRational {
        let mut acc = BigRational::zero();
        for cm in coeffs_q.iter().rev() {
            acc = acc * t + cm;
        }
        acc
    };

    for n in [1u32, 4, 9] {
        let root = (n as f64).sqrt() as i64; // b_n = sqrt(n) exactly
        let a_n = common::rat(1, root); // n^(-1/2)
        let b_n = common::rat(root, 1);
        let z = common::rat(5, 8);

        // exact sum: (1 + a z)^-n sum f(k/b_n) C(n,k) (a z)^k
        let az = &a_n * &z;
        let mut pascal: Vec<BigRational> = vec![BigRational::one()];
        for _ in 0..n {
            let mut next = vec![BigRational::one()];
            for k in 1..pascal.len() {
                next.push(&pascal[k - 1] + &pascal[k]);
            }
            next.push(BigRational::one());
            pascal = next;
        }
        let mut sum = BigRational::zero();
        let mut azk = BigRational::one();
        for (k, binom) in pascal.iter().enumerate() {
            let node = common::rat(k as i64, 1) / &b_n;
            sum += eval_exact(&node) * binom * &azk;
            azk *= &az;
        }
        let mut denom = BigRational::one();
        let one_plus = BigRational::one() + &az;
        for _ in 0..n {
            denom *= &one_plus;
        }
        let exact = sum / denom;

        let p = QParams::new(&c, 1.0, 0.5, n).unwrap();
        let got = eval_r(&f, &p, &c.complex(0.625, 0.0)).unwrap();
        let want = common::rational_to_real(&exact, 256);
        let rel = ((got.re() - &want) / &want).abs().to_f64();
        assert!(rel < 1e-70, "n = {n}: rel = {rel}");
        assert!(got.im().abs().to_f64() < 1e-70);
    }
    println!("exact-rational operator regression: PASS");
}

/// The node scale follows the drift of the largest node:
/// t_n = [n]_q^(1-beta) exactly.
#[test]
fn top_node_matches_scale_power() {
    let c = ctx();
    for q in [1.0, 1.5, 2.0] {
        for n in [1u32, 3, 8, 20] {
            let p = QParams::new(&c, q, 0.5, n).unwrap();
            let nodes = qbalazs::qcore::node_sequence(&p);
            let top = nodes.last().unwrap();
            let expect = p.bracket_pow(0.5);
            let rel = ((top - &expect) / &expect).abs().to_f64();
            assert!(rel < 1e-70, "q = {q}, n = {n}");
        }
    }
}

/// Round-trip stability of the 25-digit emission across a full run.
#[test]
fn csv_numbers_survive_reparsing_at_1e20() {
    let argv: Vec<String> = "qbalazs --mode thm1 --function exp_neg --q 1 --beta 0.5 --r 0.6 --R 3 --n 8,16,32 --grid-m 8"
        .split_whitespace()
        .map(str::to_string)
        .collect();
    let (text, outcome, _) = qbalazs::cli::execute(argv).unwrap();
    let parsed = qbalazs::cli::parse_csv(&text, 256).unwrap();
    assert_eq!(parsed.len(), outcome.rows.len());
    for (orig, back) in outcome.rows.iter().zip(&parsed) {
        let diff = (&orig.normalized_error - &back.normalized_error).abs();
        let bound = orig.normalized_error.abs() * Real::from_f64(1e-20, 256)
            + Real::from_f64(1e-40, 256);
        assert!(diff.le(&bound));
    }
}
