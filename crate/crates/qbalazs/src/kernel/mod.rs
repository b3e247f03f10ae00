//! Precision-configurable arithmetic, sample grids and norm estimation.
//!
//! Everything downstream computes through [`Real`] / [`Complex`] values
//! whose mantissa length is set by a [`NumericContext`]. The context also
//! carries the two guard tolerances used across the crate: a zero guard
//! for near-singular denominators and the relative tolerance of the
//! precision-doubling agreement check.

mod complex;
mod real;

pub use complex::Complex;
pub use real::Real;

use crate::error::{Error, Result};

pub const DEFAULT_MANTISSA_BITS: usize = 256;
pub const DEFAULT_ZERO_GUARD: f64 = 1e-40;
pub const DEFAULT_AGREEMENT_TOL: f64 = 1e-20;

/// Precision configuration governing all real and complex arithmetic.
#[derive(Clone, Copy, Debug)]
pub struct NumericContext {
    mantissa_bits: usize,
    zero_guard: f64,
    agreement_tol: f64,
}

impl Default for NumericContext {
    fn default() -> Self {
        NumericContext {
            mantissa_bits: DEFAULT_MANTISSA_BITS,
            zero_guard: DEFAULT_ZERO_GUARD,
            agreement_tol: DEFAULT_AGREEMENT_TOL,
        }
    }
}

/// Builds a context with the default guards. Rejects precisions below the
/// 53-bit hardware-float floor.
pub fn make_context(mantissa_bits: usize) -> Result<NumericContext> {
    NumericContext::new(mantissa_bits)
}

impl NumericContext {
    pub fn new(mantissa_bits: usize) -> Result<Self> {
        if mantissa_bits < 53 {
            return Err(Error::PrecisionTooLow { bits: mantissa_bits });
        }
        Ok(NumericContext { mantissa_bits, ..Default::default() })
    }

    pub fn with_guards(mantissa_bits: usize, zero_guard: f64, agreement_tol: f64) -> Result<Self> {
        if !(zero_guard > 0.0 && agreement_tol > 0.0) {
            return Err(Error::InvalidGuards { zero_guard, agreement_tol });
        }
        let mut ctx = Self::new(mantissa_bits)?;
        ctx.zero_guard = zero_guard;
        ctx.agreement_tol = agreement_tol;
        Ok(ctx)
    }

    pub fn mantissa_bits(&self) -> usize {
        self.mantissa_bits
    }

    pub fn zero_guard(&self) -> f64 {
        self.zero_guard
    }

    pub fn agreement_tol(&self) -> f64 {
        self.agreement_tol
    }

    /// The same context at twice the mantissa length, for agreement checks.
    pub fn doubled(&self) -> Self {
        NumericContext { mantissa_bits: 2 * self.mantissa_bits, ..*self }
    }

    pub fn real(&self, v: f64) -> Real {
        Real::from_f64(v, self.mantissa_bits)
    }

    pub fn real_u64(&self, v: u64) -> Real {
        Real::from_u64(v, self.mantissa_bits)
    }

    pub fn zero(&self) -> Real {
        Real::zero(self.mantissa_bits)
    }

    pub fn one(&self) -> Real {
        Real::one(self.mantissa_bits)
    }

    pub fn complex(&self, re: f64, im: f64) -> Complex {
        Complex::from_f64(re, im, self.mantissa_bits)
    }

    pub fn pi(&self) -> Real {
        Real::pi(self.mantissa_bits)
    }
}

/// Equi-angular samples on the circle |z| = r.
///
/// Sup norms over the closed disk of radius `r` are taken on this grid:
/// for the analytic error functions handled here the maximum modulus is
/// attained on the boundary circle.
#[derive(Clone, Debug)]
pub struct CircleGrid {
    radius: f64,
    points: Vec<Complex>,
}

/// `M` samples `z_j = r e^{2 pi i j / M}`, j = 0..M-1.
pub fn circle_grid(ctx: &NumericContext, r: f64, m: usize) -> Result<CircleGrid> {
    if !(r > 0.0) {
        return Err(Error::NonPositiveRadius { r });
    }
    if m == 0 {
        return Err(Error::EmptyGrid);
    }
    let radius = ctx.real(r);
    let two_pi = ctx.real(2.0) * ctx.pi();
    let m_real = ctx.real_u64(m as u64);
    let points = (0..m)
        .map(|j| {
            let theta = &two_pi * ctx.real_u64(j as u64) / &m_real;
            Complex::from_polar(&radius, &theta)
        })
        .collect();
    Ok(CircleGrid { radius: r, points })
}

impl CircleGrid {
    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn points(&self) -> &[Complex] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Maximum modulus of a nonempty list of values.
pub fn sup_norm(values: &[Complex]) -> Result<Real> {
    if values.is_empty() {
        return Err(Error::EmptyValues);
    }
    let mut best = values[0].modulus_sq();
    for v in &values[1..] {
        let m = v.modulus_sq();
        if !m.is_finite() {
            return Err(Error::NonFinite { place: "sup_norm" });
        }
        if best.lt(&m) {
            best = m;
        }
    }
    if !best.is_finite() {
        return Err(Error::NonFinite { place: "sup_norm" });
    }
    Ok(best.sqrt())
}

/// Agreement predicate of the precision-doubling check:
/// `|x - y| <= agreement_tol * max(1, |y|)` where `y` is the value
/// computed at doubled precision.
pub fn precision_agree(x: &Complex, y: &Complex, ctx: &NumericContext) -> bool {
    if !x.is_finite() || !y.is_finite() {
        return false;
    }
    let diff = (x - y).modulus();
    let bits = x.bits().max(y.bits());
    let tol = Real::from_f64(ctx.agreement_tol(), bits);
    let scale = Real::one(bits).max_val(&y.modulus());
    diff.le(&(tol * scale))
}

/// Real-valued convenience form of [`precision_agree`].
pub fn precision_agree_real(x: &Real, y: &Real, ctx: &NumericContext) -> bool {
    precision_agree(&Complex::from_re(x.clone()), &Complex::from_re(y.clone()), ctx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn context_floor_is_53_bits() {
        assert!(make_context(256).is_ok());
        assert!(make_context(53).is_ok());
        let err = make_context(32).unwrap_err();
        assert!(matches!(err, Error::PrecisionTooLow { bits: 32 }));
        let ctx = make_context(256).unwrap();
        assert_eq!(ctx.zero_guard(), 1e-40);
        assert_eq!(ctx.agreement_tol(), 1e-20);
    }

    #[test]
    fn quarter_turn_grid() {
        let ctx = NumericContext::default();
        let g = circle_grid(&ctx, 1.0, 4).unwrap();
        let pts = g.points();
        let expect = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)];
        for (p, (re, im)) in pts.iter().zip(expect) {
            assert!((p.re().to_f64() - re).abs() < 1e-70);
            assert!((p.im().to_f64() - im).abs() < 1e-70);
        }
    }

    #[test]
    fn single_sample_and_modulus() {
        let ctx = NumericContext::default();
        let g = circle_grid(&ctx, 0.6, 1).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g.points()[0].re().to_f64(), 0.6);

        let g8 = circle_grid(&ctx, 2.0, 8).unwrap();
        for p in g8.points() {
            assert!((p.modulus().to_f64() - 2.0).abs() < 1e-70);
        }
    }

    #[test]
    fn grid_rejects_bad_input() {
        let ctx = NumericContext::default();
        assert!(circle_grid(&ctx, 0.0, 4).is_err());
        assert!(circle_grid(&ctx, -1.0, 4).is_err());
        assert!(circle_grid(&ctx, 1.0, 0).is_err());
    }

    #[test]
    fn sup_norm_examples() {
        let ctx = NumericContext::default();
        let vals = vec![ctx.complex(1.0, 0.0), ctx.complex(0.0, 1.0), ctx.complex(-2.0, 0.0)];
        assert_eq!(sup_norm(&vals).unwrap().to_f64(), 2.0);
        assert_eq!(sup_norm(&[ctx.complex(0.0, 0.0)]).unwrap().to_f64(), 0.0);
        assert!(sup_norm(&[]).is_err());
        // e_1 on the circle of radius 0.6
        let g = circle_grid(&ctx, 0.6, 256).unwrap();
        let vals: Vec<Complex> = g.points().to_vec();
        let s = sup_norm(&vals).unwrap().to_f64();
        assert!((s - 0.6).abs() < 1e-70);
    }

    #[test]
    fn agreement_predicate() {
        let ctx = NumericContext::default();
        let one = ctx.complex(1.0, 0.0);
        assert!(precision_agree(&one, &one, &ctx));
        let off = ctx.complex(1.0 + 1e-5, 0.0);
        assert!(!precision_agree(&one, &off, &ctx));
        let zero = ctx.complex(0.0, 0.0);
        assert!(precision_agree(&zero, &zero, &ctx));
    }
}
