//! The q-Balazs-Szabados operator R_{n,q}, the complex q-Bernstein
//! operator B_{n,q}, and the connection between them.
//!
//! `R_{n,q}(f; z) = (1 + a_n z)^-n  sum_{k=0}^n  f([k]_q / b_n)
//!                  [n choose k]_q (a_n z)^k
//!                  prod_{s=0}^{n-k-1} (1 + (1 - q) [s]_q a_n z)`
//!
//! with `a_n = [n]_q^(beta-1)`, `b_n = [n]_q^beta`. For q = 1 every product
//! factor is 1 and the formula reduces to the classical rational operator
//! with ordinary binomials. For q > 1 the factors alternate the sign of the
//! summands and grow to enormous magnitudes; see [`cancellation_bits`] for
//! choosing a sufficient working precision.

use crate::error::{Error, Result};
use crate::funcspace::FunctionSpec;
use crate::kernel::{Complex, NumericContext, Real};
use crate::qcore::{q_binomial_row, q_binomial_row_left, q_integer_seq};

pub use crate::qcore::QParams;

/// Diagnostic view of one operator evaluation.
#[derive(Clone, Debug)]
pub struct OperatorEval {
    /// `R_{n,q}(f; z)`.
    pub value: Complex,
    /// `(1 + a_n z)^n`.
    pub denom: Complex,
    /// The basis sum before division; `value * denom = numerator`.
    pub numerator: Complex,
    /// The n + 1 summands, when requested.
    pub basis_terms: Option<Vec<Complex>>,
}

/// Neumaier-compensated accumulator, applied per component. For q > 1 the
/// summands alternate in sign and dwarf the final sum, so the compensation
/// keeps the summation itself from adding to the intrinsic cancellation.
struct CompensatedSum {
    s: Real,
    c: Real,
}

impl CompensatedSum {
    fn new(bits: usize) -> Self {
        CompensatedSum { s: Real::zero(bits), c: Real::zero(bits) }
    }

    fn add(&mut self, t: &Real) {
        let new_s = &self.s + t;
        let correction = if t.abs().le(&self.s.abs()) {
            (&self.s - &new_s) + t
        } else {
            (t - &new_s) + &self.s
        };
        self.c = &self.c + &correction;
        self.s = new_s;
    }

    fn total(&self) -> Real {
        &self.s + &self.c
    }
}

fn check_denominator(base: &Complex, ctx: &NumericContext) -> Result<()> {
    let m = base.modulus();
    if m.le(&m.lift(ctx.zero_guard())) {
        return Err(Error::SingularDenominator { modulus: m.to_f64(), guard: ctx.zero_guard() });
    }
    Ok(())
}

/// Evaluates `R_{n,q}(f; z)`.
pub fn eval_r(f: &FunctionSpec, p: &QParams, z: &Complex) -> Result<Complex> {
    Ok(eval_r_detailed(f, p, z, false)?.value)
}

/// Evaluates `R_{n,q}(f; z)` keeping the intermediate quantities.
///
/// The product over s is extended incrementally from k = n (empty product)
/// down to k = 0. A vanishing factor at isolated real z is legitimate (the
/// term drops out); only the global denominator `(1 + a_n z)^n` is guarded
/// against the singularity at z = -1/a_n.
pub fn eval_r_detailed(
    f: &FunctionSpec,
    p: &QParams,
    z: &Complex,
    keep_terms: bool,
) -> Result<OperatorEval> {
    let ctx = p.ctx();
    let bits = ctx.mantissa_bits().max(z.bits());
    let n = p.n() as usize;
    let one = Real::one(bits);

    let w = z.scale(p.a_n());
    let denom_base = &Complex::from_re(one.clone()) + &w;
    check_denominator(&denom_base, ctx)?;

    let qints = q_integer_seq(p.n(), p.q())?;
    let one_minus_q = &one - p.q();

    // f at the nodes t_k = [k]_q / b_n
    let mut fvals = Vec::with_capacity(n + 1);
    for qi in &qints {
        fvals.push(f.eval_on_ray(&(qi / p.b_n()))?);
    }

    let binom = q_binomial_row(p.n(), p.q())?;

    // prod[k] = prod_{s=0}^{n-k-1} (1 + (1-q) [s]_q w), built backwards
    let mut prods = vec![Complex::one(bits); n + 1];
    for k in (0..n).rev() {
        let s = n - k - 1;
        let factor = &Complex::from_re(one.clone()) + &w.scale(&(&one_minus_q * &qints[s]));
        prods[k] = &prods[k + 1] * &factor;
    }

    let mut sum_re = CompensatedSum::new(bits);
    let mut sum_im = CompensatedSum::new(bits);
    let mut terms = keep_terms.then(|| Vec::with_capacity(n + 1));
    let mut wpow = Complex::one(bits);
    for k in 0..=n {
        let term = (&fvals[k] * &wpow).scale(&binom[k]) * &prods[k];
        sum_re.add(term.re());
        sum_im.add(term.im());
        if let Some(ts) = terms.as_mut() {
            ts.push(term);
        }
        if k < n {
            wpow = &wpow * &w;
        }
    }
    let numerator = Complex::new(sum_re.total(), sum_im.total());
    let denom = denom_base.powi(n);
    let value = &numerator / &denom;
    if !value.is_finite() {
        return Err(Error::NonFinite { place: "eval_r" });
    }
    Ok(OperatorEval { value, denom, numerator, basis_terms: terms })
}

/// Evaluates the complex q-Bernstein polynomial
/// `B_{n,q}(g; u) = sum_k g([k]_q / [n]_q) [n choose k]_q u^k
///  prod_{s=0}^{n-k-1} (1 - q^s u)`
/// for a sampled function `g`.
///
/// This evaluator deliberately shares no arithmetic route with [`eval_r`]:
/// it uses the left-form q-Pascal recurrence for the binomials, its own
/// product factors `(1 - q^s u)`, and plain in-order summation, so the
/// connection identity below is a genuine cross-check of both paths.
pub fn eval_b<G>(g: G, n: u32, q: &Real, u: &Complex) -> Result<Complex>
where
    G: Fn(&Real) -> Result<Complex>,
{
    let bits = q.bits().max(u.bits());
    let n_us = n as usize;
    let one = Real::one(bits);

    let qints = q_integer_seq(n, q)?;
    let bracket_n = &qints[n_us];
    let binom = q_binomial_row_left(n, q)?;

    // prod[k] = prod_{s=0}^{n-k-1} (1 - q^s u), backwards; powers of q run
    // alongside.
    let mut prods = vec![Complex::one(bits); n_us + 1];
    let mut qpow = one.clone();
    let mut factors = Vec::with_capacity(n_us);
    for _s in 0..n_us {
        factors.push(&Complex::from_re(one.clone()) - &u.scale(&qpow));
        qpow = &qpow * q;
    }
    for k in (0..n_us).rev() {
        prods[k] = &prods[k + 1] * &factors[n_us - k - 1];
    }

    let mut acc = Complex::zero(bits);
    let mut upow = Complex::one(bits);
    for k in 0..=n_us {
        let node = if n == 0 { Real::zero(bits) } else { &qints[k] / bracket_n };
        let term = (&g(&node)? * &upow).scale(&binom[k]) * &prods[k];
        acc = &acc + &term;
        if k < n_us {
            upow = &upow * u;
        }
    }
    if !acc.is_finite() {
        return Err(Error::NonFinite { place: "eval_b" });
    }
    Ok(acc)
}

/// Evaluates the right-hand side of the connection identity
/// `R_{n,q}(f; z) = B_{n,q}(F_n; a_n z / (1 + a_n z))` with
/// `F_n(x) = f([n]_q x / b_n)`.
///
/// An independent code path from [`eval_r`]; the two agree to within the
/// certified working precision wherever both are defined.
pub fn connection_transform(f: &FunctionSpec, p: &QParams, z: &Complex) -> Result<Complex> {
    let ctx = p.ctx();
    let bits = ctx.mantissa_bits().max(z.bits());
    let one = Complex::one(bits);

    let w = z.scale(p.a_n());
    let denom_base = &one + &w;
    check_denominator(&denom_base, ctx)?;
    let u = &w / &denom_base;

    let node_scale = p.bracket_n() / p.b_n(); // [n]_q^(1-beta)
    let g = |x: &Real| f.eval_on_ray(&(x * &node_scale));
    eval_b(g, p.n(), p.q(), &u)
}

/// Smallest admissible n0 >= 2 with `[n0]_q^(1-beta) >= 2 R`, which makes
/// the constraint chains of the theorems satisfiable and in particular
/// keeps `z = -1/a_n` outside every working disk with r < R.
pub fn admissible_n0(ctx: &NumericContext, q: f64, beta: f64, cap_r: f64) -> Result<u32> {
    if !(q >= 1.0) {
        return Err(Error::HypothesisViolation { detail: format!("q >= 1 fails: q = {q}") });
    }
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::BetaOutOfRange { beta, lo: 0.0, hi: 1.0 });
    }
    if !(cap_r > 0.0) {
        return Err(Error::NonPositiveRadius { r: cap_r });
    }

    // f64 prepass to find the neighborhood of the answer
    let target = 2.0 * cap_r;
    let mut guess = 2u32;
    loop {
        let bracket = if q == 1.0 {
            f64::from(guess)
        } else {
            (q.powi(guess as i32) - 1.0) / (q - 1.0)
        };
        if !bracket.is_finite() || bracket.powf(1.0 - beta) >= target {
            break;
        }
        guess += 1;
        if guess > 100_000_000 {
            return Err(Error::InvalidConfig { detail: "n0 search exceeded 1e8".into() });
        }
    }

    // exact confirmation in big-float arithmetic, with a symmetric relative
    // slack of 2^-(P/2) so that analytically exact boundaries (for example
    // [16]_1^(1/2) = 4 = 2R) are accepted despite exp/ln rounding
    let bits = ctx.mantissa_bits();
    let slack = Real::from_f64(2.0, bits).powi(bits / 2);
    let eps = Real::one(bits) / slack;
    let rhs = ctx.real(target);
    let exponent = ctx.real(1.0 - beta);
    let accepts = |n: u32| -> Result<bool> {
        let bracket = crate::qcore::q_integer(n, &ctx.real(q))?;
        let lhs = bracket.pow(&exponent);
        let tol = &rhs * &eps;
        Ok((&rhs - &lhs).le(&tol))
    };
    let mut n0 = guess.saturating_sub(2).max(2);
    loop {
        if accepts(n0)? {
            return Ok(n0);
        }
        n0 += 1;
        if n0 > guess + 8 {
            return Err(Error::InvalidConfig { detail: "n0 confirmation diverged from prepass".into() });
        }
    }
}

/// Estimated bits of cancellation in the operator sum at radius r.
///
/// For q > 1 the magnitude of the k = 0 summand is roughly
/// `prod_s max(1, (q^s - 1) a_n r)` while the operator value stays O(1),
/// so this log2-product estimates how many leading mantissa bits cancel.
/// A working precision of about `cancellation_bits + 130` keeps results
/// certifiable at the default 1e-20 agreement tolerance.
pub fn cancellation_bits(q: f64, beta: f64, n: u32, r: f64) -> f64 {
    if q <= 1.0 || n == 0 {
        return 0.0;
    }
    let ln_q = q.ln();
    // ln [n]_q = n ln q + ln(1 - q^-n) - ln(q - 1)
    let ln_bracket = f64::from(n) * ln_q + (1.0 - q.powi(-(n as i32))).ln() - (q - 1.0).ln();
    let ln_a = (beta - 1.0) * ln_bracket;
    let mut bits = 0.0;
    for s in 1..n {
        // ln((q^s - 1) a_n r)
        let ln_factor = f64::from(s) * ln_q + (1.0 - q.powi(-(s as i32))).ln() + ln_a + r.ln();
        if ln_factor > 0.0 {
            bits += ln_factor / std::f64::consts::LN_2;
        }
    }
    bits
}

/// Working precision sufficient to certify operator evaluations for the
/// given parameters at the default agreement tolerance, rounded up to the
/// word size. Never below `base_bits`.
pub fn required_bits(q: f64, beta: f64, n: u32, r: f64, base_bits: usize) -> usize {
    let need = cancellation_bits(q, beta, n, r) + 130.0;
    let need = need.ceil() as usize;
    let need = need.max(base_bits);
    need.div_ceil(64) * 64
}
