//! Arbitrary precision reals backed by `astro-float`.
//!
//! [`Real`] carries its own working precision; a binary operation runs at the
//! larger precision of its two operands. Transcendental functions share a
//! per-thread constants cache.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, RoundingMode, Sign, Word, WORD_BIT_SIZE};
use num_bigint::{BigInt, BigUint, Sign as BigSign};
use num_traits::{Signed, Zero};

const RM: RoundingMode = RoundingMode::ToEven;

/// Guard bits appended to every requested precision.
const GUARD_BITS: usize = 64;

thread_local! {
    static CONSTS: RefCell<Consts> =
        RefCell::new(Consts::new().expect("astro-float constants cache"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|cc| f(&mut cc.borrow_mut()))
}

/// Working precision, in decimal digits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Precision(u32);

impl Precision {
    pub const DEFAULT: Precision = Precision(128);

    pub const fn digits(n: u32) -> Self {
        Precision(n)
    }

    pub fn decimal_digits(self) -> u32 {
        self.0
    }

    /// Mantissa bits, rounded up to whole words by the backend.
    pub fn bits(self) -> usize {
        (self.0 as f64 * std::f64::consts::LOG2_10).ceil() as usize + GUARD_BITS
    }

    /// Twice the digits, for precision-stability checks.
    pub fn doubled(self) -> Self {
        Precision(self.0 * 2)
    }
}

impl Default for Precision {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// A high-precision real number.
#[derive(Clone)]
pub struct Real(BigFloat);

impl Real {
    fn wrap(f: BigFloat) -> Self {
        debug_assert!(!f.is_nan(), "astro-float produced NaN: {:?}", f.err());
        Real(f)
    }

    fn bits(&self) -> usize {
        self.0.mantissa_max_bit_len().unwrap_or(GUARD_BITS)
    }

    fn joint_bits(&self, other: &Real) -> usize {
        self.bits().max(other.bits())
    }

    /// Working precision in decimal digits, net of guard bits.
    pub fn precision(&self) -> Precision {
        let net = self.bits().saturating_sub(GUARD_BITS) as f64;
        Precision((net / std::f64::consts::LOG2_10).floor() as u32)
    }

    pub fn zero(p: Precision) -> Self {
        Real(BigFloat::new(p.bits()))
    }

    pub fn one(p: Precision) -> Self {
        Self::from_i64(1, p)
    }

    pub fn from_i64(v: i64, p: Precision) -> Self {
        Real(BigFloat::from_i64(v, p.bits()))
    }

    pub fn from_f64(v: f64, p: Precision) -> Self {
        Real(BigFloat::from_f64(v, p.bits()))
    }

    /// Converts an integer, keeping only as many leading bits as the
    /// precision holds.
    pub fn from_bigint(n: &BigInt, p: Precision) -> Self {
        if n.is_zero() {
            return Self::zero(p);
        }
        let bits = p.bits();
        let keep_words = bits.div_ceil(WORD_BIT_SIZE) + 1;
        let digits: Vec<u64> = n.magnitude().to_u64_digits();
        let total_words = digits.len();
        let start = total_words.saturating_sub(keep_words);
        let words: Vec<Word> = digits[start..].iter().map(|&d| d as Word).collect();
        let sign = if n.is_negative() {
            Sign::Neg
        } else {
            Sign::Pos
        };
        let exponent = (total_words * WORD_BIT_SIZE) as i32;
        let mut f = BigFloat::from_words(&words, sign, exponent);
        f.set_precision(bits, RM).expect("precision");
        Real::wrap(f)
    }

    pub fn from_ratio(num: &BigInt, den: &BigInt, p: Precision) -> Self {
        Self::from_bigint(num, p) / Self::from_bigint(den, p)
    }

    pub fn pi(p: Precision) -> Self {
        Real(with_consts(|cc| cc.pi(p.bits(), RM)))
    }

    /// The same value re-rounded to precision `p`.
    pub fn with_precision(&self, p: Precision) -> Self {
        let mut f = self.0.clone();
        f.set_precision(p.bits(), RM).expect("precision");
        Real(f)
    }

    pub fn sqrt(&self) -> Self {
        Real::wrap(self.0.sqrt(self.bits(), RM))
    }

    pub fn cbrt(&self) -> Self {
        Real::wrap(self.0.cbrt(self.bits(), RM))
    }

    pub fn ln(&self) -> Self {
        let p = self.bits();
        Real::wrap(with_consts(|cc| self.0.ln(p, RM, cc)))
    }

    pub fn exp(&self) -> Self {
        let p = self.bits();
        Real::wrap(with_consts(|cc| self.0.exp(p, RM, cc)))
    }

    pub fn sin(&self) -> Self {
        let p = self.bits();
        Real::wrap(with_consts(|cc| self.0.sin(p, RM, cc)))
    }

    pub fn cos(&self) -> Self {
        let p = self.bits();
        Real::wrap(with_consts(|cc| self.0.cos(p, RM, cc)))
    }

    pub fn atan(&self) -> Self {
        let p = self.bits();
        Real::wrap(with_consts(|cc| self.0.atan(p, RM, cc)))
    }

    /// `self^e` for a real exponent; `self` must be positive.
    pub fn pow(&self, e: &Real) -> Self {
        let p = self.joint_bits(e);
        Real::wrap(with_consts(|cc| self.0.pow(&e.0, p, RM, cc)))
    }

    pub fn powi(&self, n: usize) -> Self {
        Real::wrap(self.0.powi(n, self.bits(), RM))
    }

    pub fn abs(&self) -> Self {
        Real(self.0.abs())
    }

    pub fn square(&self) -> Self {
        self * self
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn signum(&self) -> i8 {
        if self.0.is_zero() {
            0
        } else if self.0.is_negative() {
            -1
        } else {
            1
        }
    }

    pub fn max(&self, other: &Real) -> Real {
        if self >= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    pub fn min(&self, other: &Real) -> Real {
        if self <= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    /// Scales by `2^k`.
    pub fn mul_pow2(&self, k: i32) -> Real {
        let mut f = self.0.clone();
        if let Some(e) = f.exponent() {
            if !f.is_zero() {
                f.set_exponent(e + k);
            }
        }
        Real(f)
    }

    /// Largest integer not above `self`.
    pub fn floor(&self) -> BigInt {
        float_int_to_bigint(&self.0.floor())
    }

    /// Nearest integer, ties away from zero.
    pub fn round(&self) -> BigInt {
        let half = Real::from_f64(0.5, Precision(20));
        let shifted = if self.signum() >= 0 {
            self + &half
        } else {
            self - &half
        };
        float_int_to_bigint(&shifted.0.int())
    }

    pub fn to_f64(&self) -> f64 {
        match self.0.as_raw_parts() {
            None => f64::NAN,
            Some((m, _, s, e, _)) => {
                if self.0.is_zero() {
                    return 0.0;
                }
                let top = *m.last().unwrap_or(&0) as f64;
                let next = if m.len() > 1 {
                    m[m.len() - 2] as f64
                } else {
                    0.0
                };
                let mant = (top + next / 2f64.powi(WORD_BIT_SIZE as i32))
                    / 2f64.powi(WORD_BIT_SIZE as i32);
                let v = mant * 2f64.powi(e);
                if s == Sign::Neg {
                    -v
                } else {
                    v
                }
            }
        }
    }

    /// Fixed-point decimal rendering, rounded to `decimals` places.
    pub fn to_fixed(&self, decimals: usize) -> String {
        let scale = BigInt::from(10u32).pow(decimals as u32);
        let p =
            Precision((self.bits() as f64 / std::f64::consts::LOG2_10) as u32 + decimals as u32);
        let scaled = (self.with_precision(p) * Real::from_bigint(&scale, p)).round();
        let neg = scaled.is_negative();
        let digits = scaled.magnitude().to_string();
        let body = if decimals == 0 {
            digits
        } else {
            let padded = format!("{:0>width$}", digits, width = decimals + 1);
            let (int, frac) = padded.split_at(padded.len() - decimals);
            format!("{int}.{frac}")
        };
        if neg {
            format!("-{body}")
        } else {
            body
        }
    }

    /// Scientific rendering with `digits` significant digits.
    pub fn to_sci(&self, digits: usize) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let p = Precision((self.bits() as f64 / std::f64::consts::LOG2_10) as u32 + 10);
        let a = self.abs().with_precision(p);
        let exp10 = (a.ln() / Real::from_i64(10, p).ln()).floor();
        let exp10: i64 = i64::try_from(&exp10).unwrap_or(0);
        let shift = digits as i64 - 1 - exp10;
        let ten = Real::from_i64(10, p);
        let scaled = if shift >= 0 {
            &a * &ten.powi(shift as usize)
        } else {
            &a / &ten.powi((-shift) as usize)
        };
        let mut m = scaled.round().to_string();
        let mut e = exp10;
        if m.len() > digits {
            m.truncate(digits);
            e += 1;
        }
        let (head, tail) = m.split_at(1);
        let sign = if self.signum() < 0 { "-" } else { "" };
        if tail.is_empty() {
            format!("{sign}{head}e{e}")
        } else {
            format!("{sign}{head}.{tail}e{e}")
        }
    }
}

fn float_int_to_bigint(f: &BigFloat) -> BigInt {
    let Some((m, _, s, e, _)) = f.as_raw_parts() else {
        panic!("non-finite value converted to integer");
    };
    if f.is_zero() {
        return BigInt::zero();
    }
    // `Word` is narrower on 32-bit targets
    #[allow(clippy::unnecessary_cast)]
    let words: Vec<u32> = m
        .iter()
        .flat_map(|&w| [(w as u64 & 0xffff_ffff) as u32, ((w as u64) >> 32) as u32])
        .collect();
    let mag = BigUint::new(words);
    let shift = e as i64 - (m.len() * WORD_BIT_SIZE) as i64;
    let mag = if shift >= 0 {
        mag << (shift as usize)
    } else {
        mag >> ((-shift) as usize)
    };
    let sign = if s == Sign::Neg {
        BigSign::Minus
    } else {
        BigSign::Plus
    };
    BigInt::from_biguint(sign, mag)
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Real({})", self.to_sci(30))
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(d) => f.write_str(&self.to_fixed(d)),
            None => f.write_str(&self.to_sci(20)),
        }
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.0.cmp(&other.0) == Some(0)
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.cmp(&other.0).map(|c| c.cmp(&0))
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                let p = self.joint_bits(rhs);
                Real::wrap(self.0.$method(&rhs.0, p, RM))
            }
        }
        impl $trait<Real> for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Real> for Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                (&self).$method(rhs)
            }
        }
        impl $trait<Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                self.$method(&rhs)
            }
        }
        impl $trait<i64> for &Real {
            type Output = Real;
            fn $method(self, rhs: i64) -> Real {
                let r = Real(BigFloat::from_i64(rhs, GUARD_BITS));
                let p = self.bits();
                Real::wrap(self.0.$method(&r.0, p, RM))
            }
        }
        impl $trait<i64> for Real {
            type Output = Real;
            fn $method(self, rhs: i64) -> Real {
                (&self).$method(rhs)
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(BigFloat::neg(&self.0))
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(BigFloat::neg(&self.0))
    }
}
