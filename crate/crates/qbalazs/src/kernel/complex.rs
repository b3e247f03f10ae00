//! Complex arithmetic over [`Real`].

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use super::real::Real;

/// A complex number; both parts carry the same mantissa precision.
#[derive(Clone)]
pub struct Complex {
    re: Real,
    im: Real,
}

impl Complex {
    pub fn new(re: Real, im: Real) -> Self {
        Complex { re, im }
    }

    pub fn zero(bits: usize) -> Self {
        Complex { re: Real::zero(bits), im: Real::zero(bits) }
    }

    pub fn one(bits: usize) -> Self {
        Complex { re: Real::one(bits), im: Real::zero(bits) }
    }

    pub fn from_re(re: Real) -> Self {
        let im = Real::zero(re.bits());
        Complex { re, im }
    }

    pub fn from_f64(re: f64, im: f64, bits: usize) -> Self {
        Complex { re: Real::from_f64(re, bits), im: Real::from_f64(im, bits) }
    }

    /// `r (cos t + i sin t)`.
    pub fn from_polar(r: &Real, theta: &Real) -> Self {
        Complex { re: r * theta.cos(), im: r * theta.sin() }
    }

    pub fn re(&self) -> &Real {
        &self.re
    }

    pub fn im(&self) -> &Real {
        &self.im
    }

    pub fn bits(&self) -> usize {
        self.re.bits().max(self.im.bits())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn conj(&self) -> Self {
        Complex { re: self.re.clone(), im: -&self.im }
    }

    pub fn scale(&self, s: &Real) -> Self {
        Complex { re: &self.re * s, im: &self.im * s }
    }

    pub fn modulus_sq(&self) -> Real {
        &self.re * &self.re + &self.im * &self.im
    }

    /// |z|; avoids the square root when the value is purely real or imaginary.
    pub fn modulus(&self) -> Real {
        if self.im.is_zero() {
            self.re.abs()
        } else if self.re.is_zero() {
            self.im.abs()
        } else {
            self.modulus_sq().sqrt()
        }
    }

    pub fn powi(&self, e: usize) -> Self {
        let mut acc = Complex::one(self.bits());
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// `e^z = e^re (cos im + i sin im)`.
    pub fn exp(&self) -> Self {
        let m = self.re.exp();
        if self.im.is_zero() {
            return Complex::from_re(m);
        }
        Complex { re: &m * self.im.cos(), im: &m * self.im.sin() }
    }

    /// `sin z = sin re cosh im + i cos re sinh im`.
    pub fn sin(&self) -> Self {
        if self.im.is_zero() {
            return Complex::from_re(self.re.sin());
        }
        Complex {
            re: self.re.sin() * self.im.cosh(),
            im: self.re.cos() * self.im.sinh(),
        }
    }

    /// `cos z = cos re cosh im - i sin re sinh im`.
    pub fn cos(&self) -> Self {
        if self.im.is_zero() {
            return Complex::from_re(self.re.cos());
        }
        Complex {
            re: self.re.cos() * self.im.cosh(),
            im: -(self.re.sin() * self.im.sinh()),
        }
    }
}

impl Add for &Complex {
    type Output = Complex;
    fn add(self, rhs: &Complex) -> Complex {
        Complex { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl Sub for &Complex {
    type Output = Complex;
    fn sub(self, rhs: &Complex) -> Complex {
        Complex { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl Mul for &Complex {
    type Output = Complex;
    fn mul(self, rhs: &Complex) -> Complex {
        Complex {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Div for &Complex {
    type Output = Complex;
    fn div(self, rhs: &Complex) -> Complex {
        // The exponent range of the backing floats is enormous, so the
        // textbook formula needs no rescaling.
        let d = rhs.modulus_sq();
        Complex {
            re: (&self.re * &rhs.re + &self.im * &rhs.im) / &d,
            im: (&self.im * &rhs.re - &self.re * &rhs.im) / &d,
        }
    }
}

impl Neg for &Complex {
    type Output = Complex;
    fn neg(self) -> Complex {
        Complex { re: -&self.re, im: -&self.im }
    }
}

macro_rules! owned_variants {
    ($trait:ident, $meth:ident) => {
        impl $trait for Complex {
            type Output = Complex;
            fn $meth(self, rhs: Complex) -> Complex {
                (&self).$meth(&rhs)
            }
        }
        impl $trait<&Complex> for Complex {
            type Output = Complex;
            fn $meth(self, rhs: &Complex) -> Complex {
                (&self).$meth(rhs)
            }
        }
        impl $trait<Complex> for &Complex {
            type Output = Complex;
            fn $meth(self, rhs: Complex) -> Complex {
                self.$meth(&rhs)
            }
        }
    };
}

owned_variants!(Add, add);
owned_variants!(Sub, sub);
owned_variants!(Mul, mul);
owned_variants!(Div, div);

impl fmt::Debug for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}, {:?})", self.re, self.im)
    }
}
