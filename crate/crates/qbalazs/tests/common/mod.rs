//! Shared test support: an exact-rational q-calculus oracle (brute-force
//! definition expansion, fully independent of the library's arithmetic)
//! and an independent implementation of the classical rational operator.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use qbalazs::funcspace::FunctionSpec;
use qbalazs::kernel::{Complex, NumericContext, Real};

pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// `[n]_q` from the definition, as an exact rational.
pub fn q_integer_exact(n: u32, q: &BigRational) -> BigRational {
    let mut sum = BigRational::zero();
    let mut pow = BigRational::one();
    for _ in 0..n {
        sum += &pow;
        pow *= q;
    }
    sum
}

/// `[n]_q!` from the definition.
pub fn q_factorial_exact(n: u32, q: &BigRational) -> BigRational {
    let mut acc = BigRational::one();
    for k in 1..=n {
        acc *= q_integer_exact(k, q);
    }
    acc
}

/// `[n choose k]_q` as the factorial quotient, the textbook definition
/// (deliberately not the recurrence the library computes with).
pub fn q_binomial_exact(n: u32, k: u32, q: &BigRational) -> BigRational {
    q_factorial_exact(n, q) / (q_factorial_exact(k, q) * q_factorial_exact(n - k, q))
}

/// Embeds an exact rational into a `Real` without rounding, provided both
/// numerator and denominator fit in `bits` of mantissa.
pub fn rational_to_real(v: &BigRational, bits: usize) -> Real {
    let num = Real::parse_decimal(&format!("{}e+0", v.numer()), bits).expect("numerator");
    let den = Real::parse_decimal(&format!("{}e+0", v.denom()), bits).expect("denominator");
    num / den
}

/// The classical rational operator at q = 1 with ordinary binomials:
/// `(1 + a_n z)^-n sum_k f(k / b_n) C(n,k) (a_n z)^k`,
/// `a_n = n^(beta-1)`, `b_n = n^beta`. Independent of the library's
/// operator path (additive Pascal triangle, no q-machinery).
pub fn classical_r(
    f: &FunctionSpec,
    n: u32,
    beta: f64,
    z: &Complex,
    ctx: &NumericContext,
) -> Complex {
    let bits = ctx.mantissa_bits();
    let n_real = ctx.real_u64(u64::from(n));
    let a_n = n_real.pow(&ctx.real(beta - 1.0));
    let b_n = n_real.pow(&ctx.real(beta));

    // ordinary binomial row by additive Pascal
    let mut row: Vec<Real> = vec![Real::one(bits)];
    for _ in 0..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(Real::one(bits));
        for k in 1..row.len() {
            next.push(&row[k - 1] + &row[k]);
        }
        next.push(Real::one(bits));
        row = next;
    }

    let w = z.scale(&a_n);
    let mut sum = Complex::zero(bits);
    let mut wpow = Complex::one(bits);
    for (k, binom) in row.iter().enumerate() {
        let node = ctx.real_u64(k as u64) / &b_n;
        let fv = f.eval_on_ray(&node).expect("node on the ray");
        sum = &sum + &(&fv * &wpow).scale(binom);
        wpow = &wpow * &w;
    }
    let denom = (&Complex::one(bits) + &w).powi(n as usize);
    &sum / &denom
}

/// Relative deviation `|a - b| / max(1, |b|)` as f64.
pub fn rel_dev(a: &Complex, b: &Complex) -> f64 {
    let scale = b.modulus().to_f64().max(1.0);
    (a - b).modulus().to_f64() / scale
}
