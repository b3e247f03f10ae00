//! q-calculus primitives: q-integers, q-factorials, Gaussian binomials,
//! the Jackson q-derivative, and the node/scale sequences a_n, b_n.

use crate::error::{Error, Result};
use crate::funcspace::FunctionSpec;
use crate::kernel::{Complex, NumericContext, Real};

/// Largest admissible beta. The operator definition restricts the scale
/// exponent to 0 < beta <= 2/3.
pub const BETA_MAX: f64 = 2.0 / 3.0;

fn check_q(q: &Real) -> Result<()> {
    if !q.is_positive() {
        return Err(Error::NonPositiveQ { q: q.to_f64() });
    }
    Ok(())
}

/// `[n]_q = 1 + q + ... + q^(n-1)`, with `[0]_q = 0`.
///
/// Computed by explicit summation: it is exact at q = 1, avoids the
/// cancellation of `(q^n - 1)/(q - 1)` as q -> 1, and never stages an
/// overflowing intermediate for q > 1.
pub fn q_integer(n: u32, q: &Real) -> Result<Real> {
    check_q(q)?;
    Ok(q_integer_seq(n, q)?.pop().expect("n + 1 entries"))
}

/// `[0]_q, [1]_q, ..., [n]_q` as running partial sums of powers of q.
pub fn q_integer_seq(n: u32, q: &Real) -> Result<Vec<Real>> {
    check_q(q)?;
    let bits = q.bits();
    let mut out = Vec::with_capacity(n as usize + 1);
    let mut sum = Real::zero(bits);
    let mut pow = Real::one(bits);
    out.push(sum.clone());
    for _ in 0..n {
        sum = &sum + &pow;
        pow = &pow * q;
        out.push(sum.clone());
    }
    Ok(out)
}

/// `[n]_q! = [1]_q [2]_q ... [n]_q`, with `[0]_q! = 1`.
pub fn q_factorial(n: u32, q: &Real) -> Result<Real> {
    let seq = q_integer_seq(n, q)?;
    let mut acc = Real::one(q.bits());
    for v in &seq[1..] {
        acc = &acc * v;
    }
    Ok(acc)
}

/// Row `[n choose k]_q` for k = 0..n via the q-Pascal recurrence
/// `C(n,k) = C(n-1,k-1) + q^k C(n-1,k)`.
///
/// Factorial quotients are avoided: for q far from 1 the q-factorials
/// grow like q^(n^2/2) and their quotient loses precision.
pub fn q_binomial_row(n: u32, q: &Real) -> Result<Vec<Real>> {
    check_q(q)?;
    let bits = q.bits();
    let one = Real::one(bits);
    let mut row = vec![one.clone()];
    for m in 1..=n as usize {
        let mut next = Vec::with_capacity(m + 1);
        next.push(one.clone());
        let mut qk = q.clone();
        for k in 1..m {
            next.push(&row[k - 1] + &qk * &row[k]);
            qk = &qk * q;
        }
        next.push(one.clone());
        row = next;
    }
    Ok(row)
}

/// Same row through the left-form recurrence
/// `C(n,k) = q^(n-k) C(n-1,k-1) + C(n-1,k)`.
///
/// This is a deliberately independent arithmetic route; the q-Bernstein
/// evaluator uses it so that the connection identity check does not reuse
/// the binomials of the operator evaluator.
pub fn q_binomial_row_left(n: u32, q: &Real) -> Result<Vec<Real>> {
    check_q(q)?;
    let bits = q.bits();
    let one = Real::one(bits);
    let mut row = vec![one.clone()];
    for m in 1..=n as usize {
        let mut next = Vec::with_capacity(m + 1);
        next.push(one.clone());
        // powers q^(m-k) for k = 1..m-1, built downward from q^(m-1)
        let mut qpow = q.powi(m - 1);
        for k in 1..m {
            next.push(&qpow * &row[k - 1] + &row[k]);
            qpow = &qpow / q;
        }
        next.push(one.clone());
        row = next;
    }
    Ok(row)
}

/// `[n choose k]_q`; rejects k outside 0..=n.
pub fn q_binomial(n: u32, k: i64, q: &Real) -> Result<Real> {
    if k < 0 || k > n as i64 {
        return Err(Error::BinomialIndex { n, k });
    }
    Ok(q_binomial_row(n, q)?.swap_remove(k as usize))
}

/// Jackson q-derivative `D_q f(z) = (f(qz) - f(z)) / ((q - 1) z)` for
/// z != 0, and `f'(0)` (the coefficient c_1) at z = 0. Requires q != 1.
pub fn q_derivative(f: &FunctionSpec, z: &Complex, q: &Real) -> Result<Complex> {
    check_q(q)?;
    let bits = z.bits().max(q.bits());
    let one = Real::one(bits);
    if (q - &one).is_zero() {
        return Err(Error::QDerivativeAtOne);
    }
    if z.is_zero() {
        return Ok(f.coeff_at(1, bits));
    }
    let qz = z.scale(q);
    let num = &f.eval_in_disk(&qz)? - &f.eval_in_disk(z)?;
    let den = z.scale(&(q - &one));
    Ok(&num / &den)
}

/// Operator parameters (q, beta, n) with the derived quantities
/// `[n]_q`, `a_n = [n]_q^(beta-1)` and `b_n = [n]_q^beta`.
#[derive(Clone, Debug)]
pub struct QParams {
    ctx: NumericContext,
    q_f64: f64,
    beta_f64: f64,
    n: u32,
    q: Real,
    bracket_n: Real,
    a_n: Real,
    b_n: Real,
}

impl QParams {
    pub fn new(ctx: &NumericContext, q: f64, beta: f64, n: u32) -> Result<Self> {
        if !(q > 0.0) {
            return Err(Error::NonPositiveQ { q });
        }
        if !(beta > 0.0 && beta <= BETA_MAX) {
            return Err(Error::BetaOutOfRange { beta, lo: 0.0, hi: BETA_MAX });
        }
        if n == 0 {
            return Err(Error::ZeroN);
        }
        let q_real = ctx.real(q);
        let bracket_n = q_integer(n, &q_real)?;
        // Real exponents go through exp((beta - 1) ln [n]_q) in the
        // big-float layer; [n]_q >= 1 so the logarithm is safe.
        let a_n = bracket_n.pow(&ctx.real(beta - 1.0));
        let b_n = bracket_n.pow(&ctx.real(beta));
        Ok(QParams { ctx: *ctx, q_f64: q, beta_f64: beta, n, q: q_real, bracket_n, a_n, b_n })
    }

    pub fn ctx(&self) -> &NumericContext {
        &self.ctx
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn q(&self) -> &Real {
        &self.q
    }

    pub fn q_f64(&self) -> f64 {
        self.q_f64
    }

    pub fn beta_f64(&self) -> f64 {
        self.beta_f64
    }

    pub fn bracket_n(&self) -> &Real {
        &self.bracket_n
    }

    pub fn a_n(&self) -> &Real {
        &self.a_n
    }

    pub fn b_n(&self) -> &Real {
        &self.b_n
    }

    /// `[n]_q^e` for a real exponent `e`.
    pub fn bracket_pow(&self, e: f64) -> Real {
        self.bracket_n.pow(&self.ctx.real(e))
    }
}

/// Sample nodes `t_k = [k]_q / b_n`, k = 0..n. Nondecreasing, `t_0 = 0`,
/// `t_n = [n]_q^(1-beta)`.
pub fn node_sequence(p: &QParams) -> Vec<Real> {
    q_integer_seq(p.n(), p.q())
        .expect("q validated at construction")
        .into_iter()
        .map(|v| &v / p.b_n())
        .collect()
}
