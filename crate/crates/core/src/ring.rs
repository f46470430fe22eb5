//! The ring `ℤ[∛2]` and its fraction field, in the power basis `(1, ∛2, ∛4)`
//! and in the unit basis `(ρ, 1, σ)` with `ρ = 1 + ∛2 + ∛4`, `σ = ∛2 − 1`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{domain, Result};

/// `a + b∛2 + c∛4` with integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RingElem {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
}

/// `a + b∛2 + c∛4` with rational coefficients (always reduced).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QRingElem {
    pub a: BigRational,
    pub b: BigRational,
    pub c: BigRational,
}

/// Coordinates `(x, y, z)` of `xρ + y + zσ`; this is the image of `η`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RhoCoords {
    pub x: BigInt,
    pub y: BigInt,
    pub z: BigInt,
}

fn mul_coeffs<T>(u: [&T; 3], v: [&T; 3]) -> [T; 3]
where
    T: Clone + Add<Output = T>,
    for<'a> &'a T: Mul<&'a T, Output = T>,
{
    let two = |t: T| t.clone() + t;
    let [a1, b1, c1] = u;
    let [a2, b2, c2] = v;
    [
        a1 * a2 + two(b1 * c2 + c1 * b2),
        a1 * b2 + b1 * a2 + two(c1 * c2),
        a1 * c2 + b1 * b2 + c1 * a2,
    ]
}

impl RingElem {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>) -> Self {
        RingElem {
            a: a.into(),
            b: b.into(),
            c: c.into(),
        }
    }

    pub fn zero() -> Self {
        Self::new(0, 0, 0)
    }

    pub fn one() -> Self {
        Self::new(1, 0, 0)
    }

    pub fn cbrt2() -> Self {
        Self::new(0, 1, 0)
    }

    /// `ρ = 1 + ∛2 + ∛4`.
    pub fn rho() -> Self {
        Self::new(1, 1, 1)
    }

    /// `σ = ∛2 − 1 = 1/ρ`.
    pub fn sigma() -> Self {
        Self::new(-1, 1, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero() && self.c.is_zero()
    }

    pub fn mul(&self, other: &RingElem) -> RingElem {
        let [a, b, c] = mul_coeffs([&self.a, &self.b, &self.c], [&other.a, &other.b, &other.c]);
        RingElem { a, b, c }
    }

    pub fn pow(&self, mut e: u32) -> RingElem {
        let mut base = self.clone();
        let mut acc = RingElem::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// The multiplicative norm `a³ + 2b³ + 4c³ − 6abc`.
    pub fn norm(&self) -> BigInt {
        let (a, b, c) = (&self.a, &self.b, &self.c);
        a * a * a + 2 * b * b * b + 4 * c * c * c - 6 * a * b * c
    }

    /// Coordinates in the basis `(ρ, 1, σ)`: `(c, a − 2c + b, b − c)`.
    pub fn to_rho(&self) -> RhoCoords {
        RhoCoords {
            x: self.c.clone(),
            y: &self.a - 2 * &self.c + &self.b,
            z: &self.b - &self.c,
        }
    }

    pub fn to_rational(&self) -> QRingElem {
        QRingElem {
            a: BigRational::from_integer(self.a.clone()),
            b: BigRational::from_integer(self.b.clone()),
            c: BigRational::from_integer(self.c.clone()),
        }
    }

    pub fn sign(&self) -> i8 {
        sign_of_integral(&self.a, &self.b, &self.c)
    }
}

impl fmt::Display for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

impl Mul for &RingElem {
    type Output = RingElem;
    fn mul(self, rhs: &RingElem) -> RingElem {
        RingElem::mul(self, rhs)
    }
}

impl Add for &RingElem {
    type Output = RingElem;
    fn add(self, rhs: &RingElem) -> RingElem {
        RingElem {
            a: &self.a + &rhs.a,
            b: &self.b + &rhs.b,
            c: &self.c + &rhs.c,
        }
    }
}

impl Sub for &RingElem {
    type Output = RingElem;
    fn sub(self, rhs: &RingElem) -> RingElem {
        RingElem {
            a: &self.a - &rhs.a,
            b: &self.b - &rhs.b,
            c: &self.c - &rhs.c,
        }
    }
}

impl Neg for &RingElem {
    type Output = RingElem;
    fn neg(self) -> RingElem {
        RingElem {
            a: -&self.a,
            b: -&self.b,
            c: -&self.c,
        }
    }
}

impl RhoCoords {
    pub fn new(x: impl Into<BigInt>, y: impl Into<BigInt>, z: impl Into<BigInt>) -> Self {
        RhoCoords {
            x: x.into(),
            y: y.into(),
            z: z.into(),
        }
    }

    /// `xρ + y + zσ = (x + y − z) + (x + z)∛2 + x∛4`.
    pub fn to_ring(&self) -> RingElem {
        RingElem {
            a: &self.x + &self.y - &self.z,
            b: &self.x + &self.z,
            c: self.x.clone(),
        }
    }

    /// The norm carried over to `(ρ, 1, σ)` coordinates.
    pub fn norm_tilde(&self) -> BigInt {
        let u = &self.x + &self.y - &self.z;
        let v = &self.x + &self.z;
        let x = &self.x;
        &u * &u * &u + 2 * &v * &v * &v + 4 * x * x * x - 6 * &u * &v * x
    }
}

impl QRingElem {
    pub fn new(a: BigRational, b: BigRational, c: BigRational) -> Self {
        QRingElem { a, b, c }
    }

    pub fn from_ints(a: i64, b: i64, c: i64) -> Self {
        RingElem::new(a, b, c).to_rational()
    }

    pub fn one() -> Self {
        Self::from_ints(1, 0, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero() && self.c.is_zero()
    }

    pub fn mul(&self, other: &QRingElem) -> QRingElem {
        let [a, b, c] = mul_coeffs([&self.a, &self.b, &self.c], [&other.a, &other.b, &other.c]);
        QRingElem { a, b, c }
    }

    pub fn norm(&self) -> BigRational {
        let (a, b, c) = (&self.a, &self.b, &self.c);
        let n = |k: i64| BigRational::from_integer(BigInt::from(k));
        a * a * a + n(2) * b * b * b + n(4) * c * c * c - n(6) * a * b * c
    }

    /// `1/x = (a² − 2bc, 2c² − ab, b² − ac) / N(x)`.
    pub fn inverse(&self) -> Result<QRingElem> {
        if self.is_zero() {
            return Err(domain("inverse of zero"));
        }
        let (a, b, c) = (&self.a, &self.b, &self.c);
        let two = BigRational::from_integer(BigInt::from(2));
        let n = self.norm();
        Ok(QRingElem {
            a: (a * a - &two * b * c) / &n,
            b: (&two * c * c - a * b) / &n,
            c: (b * b - a * c) / &n,
        })
    }

    /// Exact sign of the real number `a + b∛2 + c∛4`.
    pub fn sign_of(&self) -> i8 {
        let l = self.a.denom().lcm(self.b.denom()).lcm(self.c.denom());
        let scale = |r: &BigRational| r.numer() * (&l / r.denom());
        sign_of_integral(&scale(&self.a), &scale(&self.b), &scale(&self.c))
    }
}

/// Sign of `a + bt + ct²` with `t = ∛2`, by bisecting a rational enclosure of `t`
/// until the interval evaluation excludes zero.
fn sign_of_integral(a: &BigInt, b: &BigInt, c: &BigInt) -> i8 {
    if a.is_zero() && b.is_zero() && c.is_zero() {
        return 0;
    }
    let int = |v: i64| BigRational::from_integer(BigInt::from(v));
    let two = int(2);
    let (ra, rb, rc) = (
        BigRational::from_integer(a.clone()),
        BigRational::from_integer(b.clone()),
        BigRational::from_integer(c.clone()),
    );
    let mut lo = BigRational::new(BigInt::from(5), BigInt::from(4));
    let mut hi = BigRational::new(BigInt::from(13), BigInt::from(10));
    loop {
        // t > 0 on the enclosure, so t² ranges over [lo², hi²].
        let (blo, bhi) = (&rb * &lo, &rb * &hi);
        let (clo, chi) = (&rc * &lo * &lo, &rc * &hi * &hi);
        let min = &ra + blo.clone().min(bhi.clone()) + clo.clone().min(chi.clone());
        let max = &ra + blo.max(bhi) + clo.max(chi);
        if min.is_positive() {
            return 1;
        }
        if max.is_negative() {
            return -1;
        }
        let mid = (&lo + &hi) / &two;
        if &mid * &mid * &mid < two {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

impl fmt::Display for QRingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

impl From<&RingElem> for QRingElem {
    fn from(x: &RingElem) -> Self {
        x.to_rational()
    }
}

impl QRingElem {
    pub fn is_integral(&self) -> bool {
        self.a.is_integer() && self.b.is_integer() && self.c.is_integer()
    }

    pub fn is_one(&self) -> bool {
        self.a.is_one() && self.b.is_zero() && self.c.is_zero()
    }
}
