//! Arbitrary-precision real numbers.
//!
//! [`Real`] wraps a big float with a fixed mantissa length in bits. Every
//! value remembers its own precision; binary operations compute at the
//! larger precision of the two operands, so precision is fixed at leaf
//! construction (see [`NumericContext`](super::NumericContext)) and then
//! simply flows through formulas.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, Radix, RoundingMode};

use crate::error::{Error, Result};

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constants cache"));
}

/// Runs `f` with the thread-local cache of mathematical constants.
pub(crate) fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|cc| f(&mut cc.borrow_mut()))
}

/// A real number with an explicit mantissa precision in bits.
#[derive(Clone)]
pub struct Real(BigFloat);

impl Real {
    pub fn zero(bits: usize) -> Self {
        Real(BigFloat::new(bits))
    }

    pub fn one(bits: usize) -> Self {
        Real(BigFloat::from_u64(1, bits))
    }

    /// Embeds an `f64` exactly (every finite `f64` is representable).
    pub fn from_f64(v: f64, bits: usize) -> Self {
        Real(BigFloat::from_f64(v, bits))
    }

    pub fn from_u64(v: u64, bits: usize) -> Self {
        Real(BigFloat::from_u64(v, bits))
    }

    pub fn from_i64(v: i64, bits: usize) -> Self {
        Real(BigFloat::from_i64(v, bits))
    }

    /// A new value at the same precision as `self`.
    pub fn lift(&self, v: f64) -> Self {
        Real::from_f64(v, self.bits())
    }

    pub fn lift_u64(&self, v: u64) -> Self {
        Real::from_u64(v, self.bits())
    }

    /// Mantissa precision in bits.
    pub fn bits(&self) -> usize {
        self.0.precision().unwrap_or(64)
    }

    pub(crate) fn pi(bits: usize) -> Self {
        Real(with_consts(|cc| cc.pi(bits, RM)))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive() && !self.0.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        !self.0.is_nan() && !self.0.is_inf()
    }

    pub fn abs(&self) -> Self {
        Real(self.0.abs())
    }

    pub fn sqrt(&self) -> Self {
        Real(self.0.sqrt(self.bits(), RM))
    }

    pub fn exp(&self) -> Self {
        Real(with_consts(|cc| self.0.exp(self.bits(), RM, cc)))
    }

    pub fn ln(&self) -> Self {
        Real(with_consts(|cc| self.0.ln(self.bits(), RM, cc)))
    }

    pub fn sin(&self) -> Self {
        Real(with_consts(|cc| self.0.sin(self.bits(), RM, cc)))
    }

    pub fn cos(&self) -> Self {
        Real(with_consts(|cc| self.0.cos(self.bits(), RM, cc)))
    }

    pub fn sinh(&self) -> Self {
        Real(with_consts(|cc| self.0.sinh(self.bits(), RM, cc)))
    }

    pub fn cosh(&self) -> Self {
        Real(with_consts(|cc| self.0.cosh(self.bits(), RM, cc)))
    }

    /// Real power `self^e` for positive `self`.
    pub fn pow(&self, e: &Real) -> Self {
        let p = self.bits().max(e.bits());
        Real(with_consts(|cc| self.0.pow(&e.0, p, RM, cc)))
    }

    /// Integer power by binary exponentiation.
    pub fn powi(&self, e: usize) -> Self {
        Real(self.0.powi(e, self.bits(), RM))
    }

    /// Total-order comparison. Panics on NaN, which always indicates an
    /// internal domain bug rather than a user input error.
    pub fn cmp_total(&self, other: &Real) -> Ordering {
        match self.0.cmp(&other.0) {
            Some(v) if v < 0 => Ordering::Less,
            Some(v) if v > 0 => Ordering::Greater,
            Some(_) => Ordering::Equal,
            None => panic!("NaN in comparison"),
        }
    }

    pub fn lt(&self, other: &Real) -> bool {
        self.cmp_total(other) == Ordering::Less
    }

    pub fn le(&self, other: &Real) -> bool {
        self.cmp_total(other) != Ordering::Greater
    }

    pub fn max_val(&self, other: &Real) -> Real {
        if self.lt(other) { other.clone() } else { self.clone() }
    }

    /// Nearest `f64` (saturating to infinity when out of range).
    pub fn to_f64(&self) -> f64 {
        if self.0.is_zero() {
            return 0.0;
        }
        if self.0.is_nan() {
            return f64::NAN;
        }
        if self.0.is_inf_pos() {
            return f64::INFINITY;
        }
        if self.0.is_inf_neg() {
            return f64::NEG_INFINITY;
        }
        let (words, _n, sign, exp, _) = self.0.as_raw_parts().expect("finite value");
        // Words are little-endian; the top word holds the leading mantissa bits.
        let len = words.len();
        let hi = words[len - 1] as u128;
        let lo = if len >= 2 { words[len - 2] as u128 } else { 0 };
        let frac = ((hi << 64) | lo) as f64; // mantissa / 2^128
        let mag = frac * 2f64.powi(exp - 128);
        if sign == astro_float::Sign::Neg { -mag } else { mag }
    }

    /// Decimal scientific representation with `sig` significant digits,
    /// round-half-up: `-d.ddd...e+X`.
    pub fn to_decimal(&self, sig: usize) -> String {
        assert!(sig >= 1);
        if self.0.is_zero() {
            return format!("0.{}e+0", "0".repeat(sig - 1));
        }
        if !self.is_finite() {
            return if self.0.is_nan() {
                "nan".into()
            } else if self.0.is_inf_pos() {
                "inf".into()
            } else {
                "-inf".into()
            };
        }
        let full = with_consts(|cc| self.0.format(Radix::Dec, RM, cc)).expect("decimal format");
        let (neg, rest) = match full.strip_prefix('-') {
            Some(r) => (true, r),
            None => (false, full.as_str()),
        };
        let (mant, exp) = rest.split_once('e').expect("scientific form");
        let mut exp: i64 = exp.parse().expect("decimal exponent");
        let mut digits: Vec<u8> = mant
            .bytes()
            .filter(|b| b.is_ascii_digit())
            .map(|b| b - b'0')
            .collect();
        if digits.len() > sig {
            let round_up = digits[sig] >= 5;
            digits.truncate(sig);
            if round_up {
                let mut i = sig;
                loop {
                    if i == 0 {
                        digits.insert(0, 1);
                        digits.truncate(sig);
                        exp += 1;
                        break;
                    }
                    i -= 1;
                    if digits[i] == 9 {
                        digits[i] = 0;
                    } else {
                        digits[i] += 1;
                        break;
                    }
                }
            }
        } else {
            digits.resize(sig, 0);
        }
        let body: String = digits.iter().map(|d| (d + b'0') as char).collect();
        format!(
            "{}{}.{}e{}{}",
            if neg { "-" } else { "" },
            &body[..1],
            &body[1..],
            if exp < 0 { "-" } else { "+" },
            exp.abs()
        )
    }

    /// Parses a decimal scientific literal at the given precision.
    pub fn parse_decimal(text: &str, bits: usize) -> Result<Real> {
        let v = with_consts(|cc| BigFloat::parse(text, Radix::Dec, bits, RM, cc));
        if v.is_nan() {
            return Err(Error::BadDecimal { text: text.into() });
        }
        Ok(Real(v))
    }
}

macro_rules! binop {
    ($trait:ident, $meth:ident) => {
        impl $trait for &Real {
            type Output = Real;
            fn $meth(self, rhs: &Real) -> Real {
                let p = self.bits().max(rhs.bits());
                Real(self.0.$meth(&rhs.0, p, RM))
            }
        }
        impl $trait for Real {
            type Output = Real;
            fn $meth(self, rhs: Real) -> Real {
                (&self).$meth(&rhs)
            }
        }
        impl $trait<&Real> for Real {
            type Output = Real;
            fn $meth(self, rhs: &Real) -> Real {
                (&self).$meth(rhs)
            }
        }
        impl $trait<Real> for &Real {
            type Output = Real;
            fn $meth(self, rhs: Real) -> Real {
                self.$meth(&rhs)
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(BigFloat::neg(&self.0))
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(BigFloat::neg(&self.0))
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({} bits)", self.to_f64(), self.bits())
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal(25))
    }
}
