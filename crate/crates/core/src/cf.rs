//! Continued fraction of `σ = ∛2 − 1`.
//!
//! The expansion tracks an integer cubic whose unique real root is the
//! current complete quotient. Each partial quotient is the floor of that root,
//! found by exact sign tests, after which the cubic is transformed by
//! `P(x) ↦ x³·P(b + 1/x)`. An independent oracle expands a rational bracket of
//! `∛2` obtained from an integer cube root.

use std::collections::HashMap;
use std::io::Write;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::real::{Precision, Real};

/// One term of the expansion: `b_n` and the convergent `p_n / q_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Convergent {
    pub n: usize,
    pub b: BigInt,
    pub p: BigInt,
    pub q: BigInt,
}

/// Integer cubic `c₀ + c₁x + c₂x² + c₃x³` with exactly one real root, which
/// is the current complete quotient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubicState {
    coeffs: [BigInt; 4],
    /// Largest content the coefficients can ever acquire, when known.
    content_bound: Option<BigInt>,
}

impl CubicState {
    /// Coefficients low to high. The cubic must have a single real root, and
    /// that root must be positive.
    pub fn new(coeffs: [BigInt; 4]) -> Result<Self> {
        if coeffs[3].is_zero() {
            return Err(Error::InvalidArgument("leading coefficient is zero".into()));
        }
        let mut state = CubicState {
            coeffs,
            content_bound: None,
        };
        if state.coeffs[3].is_negative() {
            state.negate();
        }
        let disc = state.discriminant();
        if !disc.is_negative() {
            return Err(Error::InvalidArgument(
                "cubic must have exactly one real root".into(),
            ));
        }
        if !state.eval(&BigInt::zero()).is_negative() {
            return Err(Error::InvalidArgument("real root must be positive".into()));
        }
        state.strip_content();
        state.content_bound = content_bound(&state.discriminant());
        Ok(state)
    }

    /// `(x + 1)³ − 2`, the minimal polynomial of σ.
    pub fn sigma() -> Self {
        Self::new([-1, 3, 3, 1].map(BigInt::from)).expect("valid cubic")
    }

    /// `x³ − 2`.
    pub fn cbrt2() -> Self {
        Self::new([-2, 0, 0, 1].map(BigInt::from)).expect("valid cubic")
    }

    pub fn coeffs(&self) -> &[BigInt; 4] {
        &self.coeffs
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        let [c0, c1, c2, c3] = &self.coeffs;
        ((c3 * x + c2) * x + c1) * x + c0
    }

    pub fn discriminant(&self) -> BigInt {
        let [d, c, b, a] = &self.coeffs;
        b * b * c * c - 4 * a * c * c * c - 4 * b * b * b * d - 27 * a * a * d * d
            + 18 * a * b * c * d
    }

    fn negate(&mut self) {
        for c in &mut self.coeffs {
            *c = -&*c;
        }
    }

    fn strip_content(&mut self) {
        let g = self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
        if !g.is_zero() && !g.is_one() {
            for c in &mut self.coeffs {
                *c /= &g;
            }
        }
    }

    /// `⌊root⌋` by exponential then binary search. Returns the floor and
    /// whether the root equals it exactly.
    pub fn floor_root(&self) -> (BigInt, bool) {
        // Leading coefficient is positive and there is one real root, so
        // P(m) < 0 exactly when m < root.
        let mut lo = BigInt::zero();
        let mut hi = BigInt::one();
        loop {
            let v = self.eval(&hi);
            if v.is_zero() {
                return (hi, true);
            }
            if v.is_positive() {
                break;
            }
            lo = hi.clone();
            hi <<= 1;
        }
        while &hi - &lo > BigInt::one() {
            let mid: BigInt = (&lo + &hi) >> 1;
            let v = self.eval(&mid);
            if v.is_zero() {
                return (mid, true);
            }
            if v.is_negative() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (lo, false)
    }

    /// Replaces the root `r` by `1/(r − b)`.
    pub fn advance(&mut self, b: &BigInt) {
        let c = &mut self.coeffs;
        // Taylor shift P(x) -> P(x + b).
        if !b.is_zero() {
            for i in 0..3 {
                for j in (i..3).rev() {
                    let t = &c[j + 1] * b;
                    c[j] += t;
                }
            }
        }
        c.reverse();
        if c[3].is_negative() {
            self.negate();
        }
        // Discriminant is invariant under these unimodular substitutions, so
        // a content g needs g⁴ | disc; a bound of one makes stripping moot.
        if self.content_bound.as_ref().is_none_or(|g| !g.is_one()) {
            self.strip_content();
        }
    }
}

/// Largest `g` with `g⁴ | disc`, for discriminants small enough to search.
fn content_bound(disc: &BigInt) -> Option<BigInt> {
    let d = disc.abs().to_u64()?;
    let mut best = 1u64;
    let mut g = 2u64;
    while g.checked_pow(4).is_some_and(|g4| g4 <= d) {
        if d % g.pow(4) == 0 {
            best = g;
        }
        g += 1;
    }
    Some(BigInt::from(best))
}

/// A finished expansion, `b₀ … b_{n_max}` with convergents.
#[derive(Clone, Debug)]
pub struct Expansion {
    convergents: Vec<Convergent>,
    by_q: HashMap<BigInt, usize>,
}

impl Expansion {
    fn from_quotients(quotients: impl IntoIterator<Item = BigInt>) -> Self {
        let (mut p2, mut p1) = (BigInt::zero(), BigInt::one());
        let (mut q2, mut q1) = (BigInt::one(), BigInt::zero());
        let mut convergents = Vec::new();
        let mut by_q = HashMap::new();
        for (n, b) in quotients.into_iter().enumerate() {
            let p = &b * &p1 + &p2;
            let q = &b * &q1 + &q2;
            by_q.entry(q.clone()).or_insert(n);
            convergents.push(Convergent {
                n,
                b,
                p: p.clone(),
                q: q.clone(),
            });
            p2 = std::mem::replace(&mut p1, p);
            q2 = std::mem::replace(&mut q1, q);
        }
        Expansion { convergents, by_q }
    }

    pub fn convergents(&self) -> &[Convergent] {
        &self.convergents
    }

    pub fn get(&self, n: usize) -> Option<&Convergent> {
        self.convergents.get(n)
    }

    pub fn len(&self) -> usize {
        self.convergents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.convergents.is_empty()
    }

    pub fn quotients(&self) -> Vec<BigInt> {
        self.convergents.iter().map(|c| c.b.clone()).collect()
    }

    /// Largest computed denominator.
    pub fn max_q(&self) -> &BigInt {
        &self.convergents.last().expect("non-empty expansion").q
    }

    /// Index `n` with `p_n/q_n = p/q` (after reducing `p/q`).
    pub fn index_of(&self, p: &BigInt, q: &BigInt) -> Option<usize> {
        if q.is_zero() {
            return None;
        }
        let g = p.gcd(q);
        let (mut p, mut q) = (p / &g, q / &g);
        if q.is_negative() {
            p = -p;
            q = -q;
        }
        let n = *self.by_q.get(&q)?;
        (self.convergents[n].p == p).then_some(n)
    }

    /// CSV with header `n,b_n,p_n,q_n`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "n,b_n,p_n,q_n")?;
        for c in &self.convergents {
            writeln!(out, "{},{},{},{}", c.n, c.b, c.p, c.q)?;
        }
        Ok(())
    }
}

/// Expands the root of `state` through `b_{n_max}`, stopping early if the
/// root turns out rational.
pub fn expand(mut state: CubicState, n_max: usize) -> Expansion {
    let mut quotients = Vec::with_capacity(n_max + 1);
    for _ in 0..=n_max {
        let (b, exact) = state.floor_root();
        quotients.push(b.clone());
        if exact {
            break;
        }
        state.advance(&b);
    }
    Expansion::from_quotients(quotients)
}

/// `b₀ … b_{n_max}` of `σ = ∛2 − 1`, with `b₀ = 0`.
pub fn expand_sigma(n_max: usize) -> Result<Expansion> {
    if n_max < 1 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    Ok(expand(CubicState::sigma(), n_max))
}

/// Expansion of σ long enough that its last denominator exceeds `q`.
pub fn expand_sigma_past(q: &BigInt) -> Expansion {
    // ln q_n grows like 1.19 n
    let ln_q = q.bits() as f64 * std::f64::consts::LN_2;
    let mut n = (ln_q * 0.95).ceil() as usize + 16;
    loop {
        let e = expand(CubicState::sigma(), n);
        if e.max_q() > q {
            return e;
        }
        n *= 2;
    }
}

/// Certified partial quotients from the integer-cube-root route.
#[derive(Clone, Debug)]
pub struct OracleExpansion {
    /// Certified quotients `b₀, b₁, ...` of σ.
    pub quotients: Vec<BigInt>,
    /// Decimal digits of `∛2` used.
    pub digits: u64,
    /// Whether a rerun at twice the digits agreed on the returned prefix.
    pub confirmed: bool,
}

impl OracleExpansion {
    pub fn certified(&self) -> usize {
        self.quotients.len()
    }
}

fn euclid_quotients(mut num: BigInt, mut den: BigInt) -> Vec<BigInt> {
    let mut out = Vec::new();
    while !den.is_zero() {
        let (a, r) = num.div_mod_floor(&den);
        out.push(a);
        num = std::mem::replace(&mut den, r);
    }
    out
}

/// Quotients of σ certified by bracketing `∛2` between `N/10ᵈ` and
/// `(N+1)/10ᵈ`, `N = ⌊∛(2·10³ᵈ)⌋`.
pub fn oracle_prefix(digits: u64) -> Vec<BigInt> {
    let scale = BigInt::from(10u32).pow(digits as u32);
    let n = (BigInt::from(2) * scale.pow(3)).cbrt();
    let lo = euclid_quotients(&n - &scale, scale.clone());
    let hi = euclid_quotients(&n + 1 - &scale, scale);
    // The last term of a finite expansion is not a term of σ's expansion.
    let usable = lo.len().min(hi.len()).saturating_sub(1);
    lo.into_iter()
        .zip(hi)
        .take(usable)
        .take_while(|(a, b)| a == b)
        .map(|(a, _)| a)
        .collect()
}

/// At least `b₀ … b_{n_max}` of σ, by the cube-root oracle, with the digit
/// count grown until enough terms are certified and then confirmed at twice
/// the digits.
pub fn oracle_expand(n_max: usize) -> Result<OracleExpansion> {
    if n_max < 1 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    let mut digits = (n_max as f64 * 1.1).ceil() as u64 + 20;
    loop {
        let mut prefix = oracle_prefix(digits);
        if prefix.len() > n_max {
            prefix.truncate(n_max + 1);
            let wider = oracle_prefix(digits * 2);
            let confirmed = wider.len() >= prefix.len() && wider[..prefix.len()] == prefix[..];
            return Ok(OracleExpansion {
                quotients: prefix,
                digits,
                confirmed,
            });
        }
        digits += digits / 2;
    }
}

/// `δ = q(p − qσ)`, with sign and at least 30 leading digits certified.
///
/// Uses `p − qσ = p + q − q∛2` and an integer cube root of `2q⁶·10^{3D}`.
pub fn delta_of(p: &BigInt, q: &BigInt, prec: Precision) -> Result<Real> {
    if !q.is_positive() {
        return Err(Error::InvalidArgument("q must be at least 1".into()));
    }
    let q2 = q * q;
    let base = q * (p + q);
    let mut extra = prec.decimal_digits() as u64 + 10;
    loop {
        let scale = BigInt::from(10u32).pow(extra as u32);
        let x = (BigInt::from(2) * q2.pow(3) * scale.pow(3)).cbrt();
        // δ·10ᴰ lies in (diff − 1, diff].
        let diff = &base * &scale - x;
        if diff.abs() >= BigInt::from(10u32).pow(40) {
            let twice = BigInt::from(2) * diff - 1;
            let p = Precision::digits(prec.decimal_digits().max(40) + 10);
            return Ok(Real::from_ratio(&twice, &(scale * 2), p).with_precision(prec));
        }
        extra += 40;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn leading_quotients() {
        let e = expand_sigma(11).unwrap();
        assert_eq!(e.quotients(), ints(&[0, 3, 1, 5, 1, 1, 4, 1, 1, 8, 1, 14]));
    }

    #[test]
    fn first_convergents() {
        let e = expand_sigma(10).unwrap();
        let pq: Vec<(i64, i64)> = e.convergents()[1..=5]
            .iter()
            .map(|c| (c.p.to_i64().unwrap(), c.q.to_i64().unwrap()))
            .collect();
        assert_eq!(pq, vec![(1, 3), (1, 4), (6, 23), (7, 27), (13, 50)]);
        let c10 = e.get(10).unwrap();
        assert_eq!(
            (c10.p.to_i64().unwrap(), c10.q.to_i64().unwrap()),
            (1251, 4813)
        );
    }

    #[test]
    fn n_max_one_is_accepted_zero_is_not() {
        assert_eq!(expand_sigma(1).unwrap().len(), 2);
        assert!(expand_sigma(0).is_err());
        assert!(oracle_expand(0).is_err());
    }

    #[test]
    fn cbrt2_shares_quotients_after_the_first() {
        let s = expand_sigma(300).unwrap().quotients();
        let t = expand(CubicState::cbrt2(), 300).quotients();
        assert_eq!(t[0], BigInt::from(1));
        assert_eq!(s[0], BigInt::zero());
        assert_eq!(s[1..], t[1..]);
    }

    #[test]
    fn recurrence_and_coprimality() {
        let e = expand_sigma(400).unwrap();
        let c = e.convergents();
        for n in 2..c.len() {
            assert_eq!(c[n].p, &c[n].b * &c[n - 1].p + &c[n - 2].p);
            assert_eq!(c[n].q, &c[n].b * &c[n - 1].q + &c[n - 2].q);
            assert!(c[n].q > c[n - 1].q);
        }
        for cv in c {
            assert!(cv.p.gcd(&cv.q).is_one());
            if cv.n >= 1 {
                assert!(cv.b >= BigInt::one());
            }
            // p_{n}q_{n−1} − p_{n−1}q_n = ±1 is implied; check lookups instead
            assert_eq!(e.index_of(&cv.p, &cv.q), Some(cv.n));
        }
    }

    #[test]
    fn index_lookup_reduces_fractions() {
        let e = expand_sigma(20).unwrap();
        let c = e.get(7).unwrap();
        assert_eq!(e.index_of(&(&c.p * 3), &(&c.q * 3)), Some(7));
        assert_eq!(e.index_of(&(-&c.p), &(-&c.q)), Some(7));
        assert_eq!(e.index_of(&BigInt::from(2), &BigInt::from(7)), None);
    }

    #[test]
    fn rational_root_terminates() {
        // (x − 7/2)(x² + 1) = x³ − 3.5x² + x − 3.5, scaled by 2; one real root 7/2.
        let st = CubicState::new([-7, 2, -7, 2].map(BigInt::from)).unwrap();
        let e = expand(st, 10);
        assert_eq!(e.quotients(), ints(&[3, 2]));
    }

    #[test]
    fn rejects_bad_cubics() {
        assert!(CubicState::new([0, 0, 0, 0].map(BigInt::from)).is_err());
        // three real roots
        assert!(CubicState::new([6, -11, 6, -1].map(BigInt::from)).is_err());
        // negative real root
        assert!(CubicState::new([2, 0, 0, 1].map(BigInt::from)).is_err());
    }

    #[test]
    fn sigma_content_is_provably_trivial() {
        let st = CubicState::sigma();
        assert_eq!(st.discriminant(), BigInt::from(-108));
        assert_eq!(st.content_bound, Some(BigInt::one()));
    }

    #[test]
    fn discriminant_is_preserved() {
        let mut st = CubicState::sigma();
        let d = st.discriminant();
        for _ in 0..50 {
            let (b, _) = st.floor_root();
            st.advance(&b);
            assert_eq!(st.discriminant(), d);
        }
    }

    #[test]
    fn oracle_prefix_matches_and_is_stable() {
        let a = oracle_prefix(60);
        let b = oracle_prefix(120);
        assert!(a.len() >= 12);
        assert_eq!(a[..], b[..a.len()]);
        assert_eq!(a[..12], ints(&[0, 3, 1, 5, 1, 1, 4, 1, 1, 8, 1, 14])[..]);
        let o = oracle_expand(200).unwrap();
        assert!(o.confirmed);
        assert_eq!(o.quotients, expand_sigma(200).unwrap().quotients());
    }

    #[test]
    fn delta_examples() {
        let p = Precision::DEFAULT;
        let d = delta_of(&BigInt::zero(), &BigInt::one(), p).unwrap();
        let sigma = Real::from_i64(2, p).cbrt() - Real::one(p);
        assert!((d + &sigma).abs() < Real::from_f64(1e-100, p));
        let d = delta_of(&BigInt::from(1), &BigInt::from(4), p).unwrap();
        let direct = (Real::one(p) - sigma * 4i64) * 4i64;
        assert!((d.clone() - direct).abs() < Real::from_f64(1e-100, p));
        assert!(d.abs() < Real::one(p));
        let d = delta_of(&BigInt::from(1251), &BigInt::from(4813), p).unwrap();
        assert!(d.abs() < Real::one(p) / 14i64);
        assert!(delta_of(&BigInt::one(), &BigInt::zero(), p).is_err());
    }

    #[test]
    fn classical_delta_bounds() {
        let p = Precision::digits(40);
        let e = expand_sigma(300).unwrap();
        let c = e.convergents();
        for n in 0..c.len() - 1 {
            let d = delta_of(&c[n].p, &c[n].q, p).unwrap().abs();
            let b = Real::from_bigint(&c[n + 1].b, p);
            assert!(d < Real::one(p), "n={n}");
            assert!(Real::one(p) / (b.clone() + 2i64) < d, "lower n={n}");
            assert!(d < Real::one(p) / b, "upper n={n}");
        }
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        expand_sigma(2).unwrap().write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "n,b_n,p_n,q_n\n0,0,0,1\n1,3,1,3\n2,1,1,4\n"
        );
    }
}
