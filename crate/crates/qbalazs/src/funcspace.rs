//! Admissible test functions: analytic in a disk of radius R with a known
//! Taylor coefficient stream, plus closed-form evaluation on [0, +inf).
//!
//! The operator samples its argument at nodes `[k]_q / b_n` that leave the
//! analyticity disk, so a power series alone cannot represent a test
//! function; every specimen carries closed forms for both the ray and the
//! disk, and the type invariant ties the series to the disk evaluator.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::kernel::{Complex, Real};

type RayEval = Arc<dyn Fn(&Real) -> Complex + Send + Sync>;
type DiskEval = Arc<dyn Fn(&Complex) -> Complex + Send + Sync>;
type CoeffFn = Arc<dyn Fn(u32, usize) -> Complex + Send + Sync>;

/// An analytic test function with coefficient stream, closed-form
/// evaluators, optional uniform bound on the ray, and a geometric
/// coefficient envelope `|c_m| <= A B^m`.
#[derive(Clone)]
pub struct FunctionSpec {
    name: String,
    radius: f64,
    bound: Option<f64>,
    envelope: (f64, f64),
    max_degree: Option<u32>,
    coeff: CoeffFn,
    ray: RayEval,
    disk: DiskEval,
    d1: DiskEval,
    d2: DiskEval,
}

impl fmt::Debug for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionSpec")
            .field("name", &self.name)
            .field("radius", &self.radius)
            .field("bound", &self.bound)
            .finish()
    }
}

impl FunctionSpec {
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Analyticity radius of the working disk.
    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Uniform bound on [0, +inf) when the function has one; specimens
    /// without it (monomials, nonconstant polynomials) are rejected by the
    /// theorem suites.
    pub fn bound(&self) -> Option<f64> {
        self.bound
    }

    /// Envelope constants (A, B) with `|c_m| <= A B^m`.
    pub fn envelope(&self) -> (f64, f64) {
        self.envelope
    }

    /// Degree of the coefficient support when finite.
    pub fn max_degree(&self) -> Option<u32> {
        self.max_degree
    }

    /// Taylor coefficient c_m at the requested precision.
    pub fn coeff_at(&self, m: u32, bits: usize) -> Complex {
        (self.coeff)(m, bits)
    }

    /// Closed-form value at x on the ray [0, +inf). Never goes through the
    /// power series: ray nodes routinely exceed the disk radius.
    pub fn eval_on_ray(&self, x: &Real) -> Result<Complex> {
        if x.is_negative() {
            return Err(Error::NegativeRayPoint { x: x.to_f64() });
        }
        Ok((self.ray)(x))
    }

    /// Closed-form value inside the analyticity disk.
    pub fn eval_in_disk(&self, z: &Complex) -> Result<Complex> {
        self.check_disk(z)?;
        Ok((self.disk)(z))
    }

    /// First derivative, inside the disk.
    pub fn deriv1(&self, z: &Complex) -> Result<Complex> {
        self.check_disk(z)?;
        Ok((self.d1)(z))
    }

    /// Second derivative, inside the disk.
    pub fn deriv2(&self, z: &Complex) -> Result<Complex> {
        self.check_disk(z)?;
        Ok((self.d2)(z))
    }

    fn check_disk(&self, z: &Complex) -> Result<()> {
        let m = z.modulus();
        if m.lt(&m.lift(self.radius)) {
            Ok(())
        } else {
            Err(Error::OutsideDisk { modulus: m.to_f64(), radius: self.radius })
        }
    }

    /// Truncated series value (test support for the series/closed-form
    /// invariant): sum of c_m z^m for m <= terms.
    pub fn series_value(&self, z: &Complex, terms: u32) -> Complex {
        let bits = z.bits();
        let mut acc = Complex::zero(bits);
        let mut zp = Complex::one(bits);
        for m in 0..=terms {
            acc = &acc + &(&self.coeff_at(m, bits) * &zp);
            zp = &zp * z;
        }
        acc
    }
}

/// Weight sequences accepted by [`weighted_tail_sum`]. Each is polynomially
/// bounded by m^d with the degree used in the certified tail bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesWeight {
    /// w_m = 1
    One,
    /// w_m = 1 for m >= 1, else 0
    StepOne,
    /// w_m = m (m - 1)
    MM1,
    /// w_m = max(m - 2, 0)
    MMinus2,
    /// w_m = m^2 (m - 1)^2
    MM1Squared,
}

impl SeriesWeight {
    fn value(self, m: u32) -> u64 {
        let m = m as u64;
        match self {
            SeriesWeight::One => 1,
            SeriesWeight::StepOne => u64::from(m >= 1),
            SeriesWeight::MM1 => m.saturating_mul(m.saturating_sub(1)),
            SeriesWeight::MMinus2 => m.saturating_sub(2),
            SeriesWeight::MM1Squared => {
                let a = m.saturating_mul(m.saturating_sub(1));
                a.saturating_mul(a)
            }
        }
    }

    /// d with w_m <= m^d for all m >= 1.
    fn poly_degree(self) -> u32 {
        match self {
            SeriesWeight::One | SeriesWeight::StepOne => 0,
            SeriesWeight::MMinus2 => 1,
            SeriesWeight::MM1 => 2,
            SeriesWeight::MM1Squared => 4,
        }
    }
}

/// Computes `sum_m w_m |c_m| x^m` with certified truncation.
///
/// For specimens with finite coefficient support the sum is exact. For the
/// rest, convergence is certified through the envelope: with y = B x < 1
/// and y' = (1 + y)/2, the tail beyond T is at most
/// `A (T+1)^d y^(T+1) / (1 - y')` once `(T+1) ln(y'/y) >= d`, and the sum
/// stops when that bound falls below `tol`. `y >= 1` is reported as
/// divergence.
pub fn weighted_tail_sum(
    f: &FunctionSpec,
    weight: SeriesWeight,
    x: &Real,
    tol: f64,
) -> Result<Real> {
    if !x.is_positive() {
        return Err(Error::InvalidConfig { detail: format!("series argument must be positive, got {}", x.to_f64()) });
    }
    let bits = x.bits();

    if let Some(deg) = f.max_degree() {
        let mut acc = Real::zero(bits);
        let mut xp = Real::one(bits);
        for m in 0..=deg {
            let w = weight.value(m);
            if w != 0 {
                acc = &acc + &(f.coeff_at(m, bits).modulus() * Real::from_u64(w, bits) * &xp);
            }
            xp = &xp * x;
        }
        return Ok(acc);
    }

    let (env_a, env_b) = f.envelope();
    let y_f64 = env_b * x.to_f64();
    if y_f64 >= 1.0 {
        return Err(Error::DivergentSeries { x: x.to_f64(), envelope_radius: 1.0 / env_b });
    }
    let a = Real::from_f64(env_a, bits);
    let y = Real::from_f64(env_b, bits) * x;
    let one = Real::one(bits);
    let y_prime = (&one + &y) * Real::from_f64(0.5, bits);
    let inv_gap = &one / &(&one - &y_prime);
    let d = weight.poly_degree();
    // monotone-tail threshold: (T+1) ln(y'/y) >= d
    let m_star = (f64::from(d) / (y_prime.to_f64() / y_f64).ln()).ceil() as u32;
    let tol = Real::from_f64(tol, bits);

    let mut acc = Real::zero(bits);
    let mut xp = Real::one(bits);
    let mut yp = y.clone(); // y^(m+1)
    for m in 0..100_000u32 {
        let w = weight.value(m);
        if w != 0 {
            acc = &acc + &(f.coeff_at(m, bits).modulus() * Real::from_u64(w, bits) * &xp);
        }
        if m >= m_star {
            let t1 = Real::from_u64(u64::from(m) + 1, bits);
            let tail = &a * t1.powi(d as usize) * &yp * &inv_gap;
            if tail.le(&tol) {
                return Ok(acc);
            }
        }
        xp = &xp * x;
        yp = &yp * &y;
    }
    unreachable!("tail bound decays geometrically")
}

fn real_part(v: Real) -> Complex {
    Complex::from_re(v)
}

fn check_radius(radius: f64) -> Result<()> {
    if !(radius > 0.0) {
        return Err(Error::InvalidFunctionSpec { detail: format!("radius must be positive, got {radius}") });
    }
    Ok(())
}

/// `e^(-z)`; entire, so `radius` is the working disk chosen per experiment.
/// Bounded by 1 on the ray.
pub fn exp_neg(radius: f64) -> Result<FunctionSpec> {
    check_radius(radius)?;
    Ok(FunctionSpec {
        name: "exp_neg".into(),
        radius,
        bound: Some(1.0),
        // |c_m| = 1/m! <= e^64 (1/64)^m for all m
        envelope: (1e27, 1.0 / 64.0),
        max_degree: None,
        coeff: Arc::new(|m, bits| {
            let mut f = Real::one(bits);
            for k in 1..=u64::from(m) {
                f = &f * &Real::from_u64(k, bits);
            }
            let v = Real::one(bits) / f;
            real_part(if m % 2 == 1 { -v } else { v })
        }),
        ray: Arc::new(|x| real_part((-x).exp())),
        disk: Arc::new(|z| (-z).exp()),
        d1: Arc::new(|z| -&(-z).exp()),
        d2: Arc::new(|z| (-z).exp()),
    })
}

/// `sin z`; entire, bounded by 1 on the ray.
pub fn sin(radius: f64) -> Result<FunctionSpec> {
    check_radius(radius)?;
    Ok(FunctionSpec {
        name: "sin".into(),
        radius,
        bound: Some(1.0),
        envelope: (1e27, 1.0 / 64.0),
        max_degree: None,
        coeff: Arc::new(|m, bits| {
            if m % 2 == 0 {
                return Complex::zero(bits);
            }
            let mut f = Real::one(bits);
            for k in 1..=u64::from(m) {
                f = &f * &Real::from_u64(k, bits);
            }
            let v = Real::one(bits) / f;
            real_part(if m % 4 == 3 { -v } else { v })
        }),
        ray: Arc::new(|x| real_part(x.sin())),
        disk: Arc::new(|z| z.sin()),
        d1: Arc::new(|z| z.cos()),
        d2: Arc::new(|z| -&z.sin()),
    })
}

/// `1/(z + c)` with pole at -c; requires `c > radius`. Bounded by 1/c on
/// the ray and `|c_m| = c^-(m+1)`.
pub fn inv_shift(c: f64, radius: f64) -> Result<FunctionSpec> {
    check_radius(radius)?;
    if !(c > radius) {
        return Err(Error::InvalidFunctionSpec {
            detail: format!("inv_shift shift c = {c} must exceed the disk radius {radius}"),
        });
    }
    let name = format!("inv_shift:{c}");
    Ok(FunctionSpec {
        name,
        radius,
        bound: Some(1.0 / c),
        envelope: (1.0 / c, 1.0 / c),
        max_degree: None,
        coeff: Arc::new(move |m, bits| {
            let cm = Real::from_f64(c, bits).powi(m as usize + 1);
            let v = Real::one(bits) / cm;
            real_part(if m % 2 == 1 { -v } else { v })
        }),
        ray: Arc::new(move |x| real_part(Real::one(x.bits()) / (x + x.lift(c)))),
        disk: Arc::new(move |z| {
            let shifted = z + Complex::from_re(Real::from_f64(c, z.bits()));
            &Complex::one(z.bits()) / &shifted
        }),
        d1: Arc::new(move |z| {
            let shifted = z + Complex::from_re(Real::from_f64(c, z.bits()));
            -&(&Complex::one(z.bits()) / &shifted.powi(2))
        }),
        d2: Arc::new(move |z| {
            let shifted = z + Complex::from_re(Real::from_f64(c, z.bits()));
            (&Complex::one(z.bits()) / &shifted.powi(3)).scale(&Real::from_u64(2, z.bits()))
        }),
    })
}

/// Monomial `e_m(z) = z^m`. Unbounded on the ray for m >= 1, so the
/// theorem suites reject it; it exists for identity and regression tests.
pub fn monomial(m: u32, radius: f64) -> Result<FunctionSpec> {
    check_radius(radius)?;
    Ok(FunctionSpec {
        name: format!("e_{m}"),
        radius,
        bound: if m == 0 { Some(1.0) } else { None },
        envelope: (1.0, 1.0),
        max_degree: Some(m),
        coeff: Arc::new(move |k, bits| {
            if k == m { Complex::one(bits) } else { Complex::zero(bits) }
        }),
        ray: Arc::new(move |x| real_part(x.powi(m as usize))),
        disk: Arc::new(move |z| z.powi(m as usize)),
        d1: Arc::new(move |z| {
            if m == 0 {
                return Complex::zero(z.bits());
            }
            z.powi(m as usize - 1).scale(&Real::from_u64(u64::from(m), z.bits()))
        }),
        d2: Arc::new(move |z| {
            if m < 2 {
                return Complex::zero(z.bits());
            }
            z.powi(m as usize - 2)
                .scale(&Real::from_u64(u64::from(m) * u64::from(m - 1), z.bits()))
        }),
    })
}

/// Polynomial with real coefficients `c_0 + c_1 z + ...`.
pub fn poly(coeffs: &[f64], radius: f64) -> Result<FunctionSpec> {
    check_radius(radius)?;
    if coeffs.is_empty() {
        return Err(Error::InvalidFunctionSpec { detail: "poly needs at least one coefficient".into() });
    }
    let degree = coeffs.iter().rposition(|&c| c != 0.0).unwrap_or(0) as u32;
    let cv: Vec<f64> = coeffs.to_vec();
    let name = format!(
        "poly:{}",
        cv.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
    );
    let max_abs = cv.iter().fold(0.0f64, |a, c| a.max(c.abs())).max(1e-300);
    let horner_real = {
        let cv = cv.clone();
        move |x: &Real| {
            let bits = x.bits();
            let mut acc = Real::zero(bits);
            for &c in cv.iter().rev() {
                acc = &acc * x + Real::from_f64(c, bits);
            }
            real_part(acc)
        }
    };
    let horner_complex = |cv: Vec<f64>, order: u32| {
        move |z: &Complex| {
            let bits = z.bits();
            let mut acc = Complex::zero(bits);
            for (m, &c) in cv.iter().enumerate().rev() {
                let m = m as u32;
                // derivative factor m (m-1) ... (m-order+1)
                let mut w = 1u64;
                let mut ok = true;
                for j in 0..order {
                    if m < j + 1 {
                        ok = false;
                        break;
                    }
                    w *= u64::from(m - j);
                }
                if !ok {
                    continue;
                }
                let term = z
                    .powi((m - order) as usize)
                    .scale(&(Real::from_f64(c, bits) * Real::from_u64(w, bits)));
                acc = &acc + &term;
            }
            acc
        }
    };
    Ok(FunctionSpec {
        name,
        radius,
        bound: if degree == 0 { Some(cv[0].abs()) } else { None },
        envelope: (max_abs, 1.0),
        max_degree: Some(degree),
        coeff: Arc::new({
            let cv = cv.clone();
            move |m, bits| {
                let c = cv.get(m as usize).copied().unwrap_or(0.0);
                Complex::from_re(Real::from_f64(c, bits))
            }
        }),
        ray: Arc::new(horner_real),
        disk: Arc::new(horner_complex(cv.clone(), 0)),
        d1: Arc::new(horner_complex(cv.clone(), 1)),
        d2: Arc::new(horner_complex(cv, 2)),
    })
}

/// Resolves a CLI catalog name: `exp_neg`, `sin`, `inv_shift:<c>`,
/// `e_<m>`, or `poly:<c0,c1,...>`.
pub fn by_name(name: &str, radius: f64) -> Result<FunctionSpec> {
    if name == "exp_neg" {
        return exp_neg(radius);
    }
    if name == "sin" {
        return sin(radius);
    }
    if let Some(c) = name.strip_prefix("inv_shift:") {
        let c: f64 = c.parse().map_err(|_| Error::UnknownFunction { name: name.into() })?;
        return inv_shift(c, radius);
    }
    if let Some(m) = name.strip_prefix("e_") {
        let m: u32 = m.parse().map_err(|_| Error::UnknownFunction { name: name.into() })?;
        return monomial(m, radius);
    }
    if let Some(list) = name.strip_prefix("poly:") {
        let coeffs: std::result::Result<Vec<f64>, _> = list.split(',').map(str::parse).collect();
        let coeffs = coeffs.map_err(|_| Error::UnknownFunction { name: name.into() })?;
        return poly(&coeffs, radius);
    }
    Err(Error::UnknownFunction { name: name.into() })
}
