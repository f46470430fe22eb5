//! Eigen-structure of `S` at high precision, the constants of the `|a′| < 2.01`
//! argument, and log-domain lengths `ρ^{−j/4}|a|`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, LazyLock, Mutex};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::basis::{IntMat3, IntVec3};
use crate::error::{domain, Error, Result};
use crate::real::{Precision, Real};

/// A vector of three reals.
pub type RVec3 = [Real; 3];

pub fn rdot(u: &RVec3, v: &RVec3) -> Real {
    &u[0] * &v[0] + &u[1] * &v[1] + &u[2] * &v[2]
}

pub fn rcross(u: &RVec3, v: &RVec3) -> RVec3 {
    [
        &u[1] * &v[2] - &u[2] * &v[1],
        &u[2] * &v[0] - &u[0] * &v[2],
        &u[0] * &v[1] - &u[1] * &v[0],
    ]
}

pub fn rscale(u: &RVec3, k: &Real) -> RVec3 {
    [&u[0] * k, &u[1] * k, &u[2] * k]
}

pub fn radd(u: &RVec3, v: &RVec3) -> RVec3 {
    [&u[0] + &v[0], &u[1] + &v[1], &u[2] + &v[2]]
}

pub fn rsub(u: &RVec3, v: &RVec3) -> RVec3 {
    [&u[0] - &v[0], &u[1] - &v[1], &u[2] - &v[2]]
}

pub fn rnorm(u: &RVec3) -> Real {
    rdot(u, u).sqrt()
}

/// Largest absolute component.
pub fn rmax_abs(u: &RVec3) -> Real {
    u[0].abs().max(&u[1].abs()).max(&u[2].abs())
}

pub fn rapply(m: &IntMat3, v: &RVec3, p: Precision) -> RVec3 {
    std::array::from_fn(|i| {
        let r = &m.0[i];
        (0..3).fold(Real::zero(p), |acc, j| {
            acc + Real::from_bigint(&r[j], p) * &v[j]
        })
    })
}

pub fn rvec_from_int(v: &IntVec3, p: Precision) -> RVec3 {
    std::array::from_fn(|i| Real::from_bigint(&v.0[i], p))
}

/// A complex number as a pair of reals.
#[derive(Clone, Debug)]
pub struct Complex {
    pub re: Real,
    pub im: Real,
}

impl Complex {
    pub fn mul(&self, o: &Complex) -> Complex {
        Complex {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    pub fn conj(&self) -> Complex {
        Complex {
            re: self.re.clone(),
            im: -&self.im,
        }
    }

    pub fn abs2(&self) -> Real {
        self.re.square() + self.im.square()
    }
}

/// Eigenvalues and (conjugate) eigenbases of `S`.
#[derive(Clone, Debug)]
pub struct EigenData {
    pub precision: Precision,
    pub cbrt2: Real,
    pub sqrt3: Real,
    pub rho: Real,
    pub sigma: Real,
    pub ln_rho: Real,
    /// Rotation angle of `S` on its invariant plane, in radians.
    pub theta: Real,
    /// `M = √3/36`, minus the mixed product `[h, g, k]`.
    pub m: Real,
    pub h: RVec3,
    pub g: RVec3,
    pub k: RVec3,
    pub h_star: RVec3,
    pub g_star: RVec3,
    pub k_star: RVec3,
    /// `σ′ = −1 + ω∛2`.
    pub lambda2: Complex,
    /// `σ″ = −1 + ω²∛2`.
    pub lambda3: Complex,
}

impl EigenData {
    pub fn new(p: Precision) -> Result<Self> {
        if p.decimal_digits() < 30 {
            return Err(Error::InvalidArgument(
                "precision must be at least 30 digits".into(),
            ));
        }
        let int = |v: i64| Real::from_i64(v, p);
        let c = int(2).cbrt();
        let c2 = c.square();
        let sqrt3 = int(3).sqrt();
        let rho = int(1) + &c + &c2;
        let sigma = &c - 1;
        let theta = Real::pi(p) - (&sqrt3 * &c / (&c + 2)).atan();
        let m = &sqrt3 / 36;

        let sixth = |v: [Real; 3]| v.map(|x| x / 6);
        let h = sixth([c.clone(), int(2) - &c * 2 + &c2, &c2 - &c]);
        let g = [-&c / 12, (int(4) + &c * 2 - &c2) / 12, (&c - &c2) / 12];
        let k3 = &sqrt3 / 12;
        let k = [&k3 * &c, &k3 * (-&c * 2 - &c2), &k3 * (-&c - &c2)];

        let h_star = rcross(&g, &k);
        let g_star = rcross(&h, &k);
        let k_star = rcross(&h, &g);

        let lambda2 = Complex {
            re: int(-1) - &c / 2,
            im: &sqrt3 * &c / 2,
        };
        let lambda3 = lambda2.conj();
        let ln_rho = rho.ln();

        Ok(EigenData {
            precision: p,
            cbrt2: c,
            sqrt3,
            rho,
            sigma,
            ln_rho,
            theta,
            m,
            h,
            g,
            k,
            h_star,
            g_star,
            k_star,
            lambda2,
            lambda3,
        })
    }

    pub fn theta_degrees(&self) -> Real {
        &self.theta * 180 / Real::pi(self.precision)
    }

    /// `ω = e^{2πi/3}`, recovered as `(λ₂ + 1)/∛2`.
    pub fn omega(&self) -> Complex {
        Complex {
            re: (&self.lambda2.re + 1) / &self.cbrt2,
            im: &self.lambda2.im / &self.cbrt2,
        }
    }

    /// `[h, g, k]`.
    pub fn mixed_product(&self) -> Real {
        rdot(&self.h, &rcross(&self.g, &self.k))
    }

    /// `ρ^{e}` for a rational exponent `num/den`.
    pub fn rho_pow(&self, num: i64, den: i64) -> Real {
        (&self.ln_rho * num / den).exp()
    }

    /// `σʲh + 2ρ^{j/2}(g cos jθ − k sin jθ)`.
    pub fn s_closed_form(&self, j: i64) -> RVec3 {
        let sig_j = (&self.ln_rho * (-j)).exp();
        let amp = self.rho_pow(j, 2) * 2;
        let angle = &self.theta * j;
        let (cs, sn) = (angle.cos(), angle.sin());
        let rot = rsub(&rscale(&self.g, &cs), &rscale(&self.k, &sn));
        radd(&rscale(&self.h, &sig_j), &rscale(&rot, &amp))
    }

    /// `−2√3∛2(σʲh* + ρ^{j/2}(g* cos(jθ − π/3) − k* sin(jθ − π/3)))`.
    pub fn s_star_closed_form(&self, j: i64) -> RVec3 {
        let p = self.precision;
        let sig_j = (&self.ln_rho * (-j)).exp();
        let amp = self.rho_pow(j, 2);
        let angle = &self.theta * j - Real::pi(p) / 3;
        let (cs, sn) = (angle.cos(), angle.sin());
        let rot = rsub(&rscale(&self.g_star, &cs), &rscale(&self.k_star, &sn));
        let inner = radd(&rscale(&self.h_star, &sig_j), &rscale(&rot, &amp));
        let factor = -(&self.sqrt3 * &self.cbrt2 * 2);
        rscale(&inner, &factor)
    }

    /// Entries of the Gram matrix of `(g, k)`.
    fn gram_gk(&self) -> (Real, Real, Real) {
        (
            rdot(&self.g, &self.g),
            rdot(&self.g, &self.k),
            rdot(&self.k, &self.k),
        )
    }

    /// `max_α |g cos α + k sin α|²`, the top eigenvalue of the Gram matrix.
    pub fn max_rotated_norm2(&self) -> Real {
        let (gg, gk, kk) = self.gram_gk();
        let tr = &gg + &kk;
        let det = &gg * &kk - gk.square();
        (&tr + (tr.square() - det * 4).sqrt()) / 2
    }

    /// `max_α ⟨h, g cos α + k sin α⟩`.
    pub fn max_rotated_dot_h(&self) -> Real {
        (rdot(&self.h, &self.g).square() + rdot(&self.h, &self.k).square()).sqrt()
    }
}

static EIGEN_CACHE: LazyLock<Mutex<HashMap<Precision, Arc<EigenData>>>> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

/// Shared, cached [`EigenData`] for a precision.
pub fn eigen_data(p: Precision) -> Result<Arc<EigenData>> {
    if let Some(e) = EIGEN_CACHE.lock().expect("eigen cache").get(&p) {
        return Ok(e.clone());
    }
    let e = Arc::new(EigenData::new(p)?);
    EIGEN_CACHE
        .lock()
        .expect("eigen cache")
        .entry(p)
        .or_insert_with(|| e.clone());
    Ok(e)
}

/// A positive magnitude held as its natural logarithm.
#[derive(Clone, Debug)]
pub struct LogMagnitude {
    /// `ln` of the magnitude; meaningless when `zero` is set.
    pub ln: Real,
    pub zero: bool,
}

impl LogMagnitude {
    pub fn from_ln(ln: Real) -> Self {
        LogMagnitude { ln, zero: false }
    }

    pub fn zero(p: Precision) -> Self {
        LogMagnitude {
            ln: Real::zero(p),
            zero: true,
        }
    }

    pub fn from_real(x: &Real) -> Result<Self> {
        match x.signum() {
            1 => Ok(Self::from_ln(x.ln())),
            0 => Ok(Self::zero(Precision::DEFAULT)),
            _ => Err(domain("negative magnitude")),
        }
    }

    /// `√n` for a nonnegative integer `n`.
    pub fn sqrt_of_int(n: &BigInt, p: Precision) -> Result<Self> {
        if n.is_negative() {
            return Err(domain("negative squared length"));
        }
        if n.is_zero() {
            return Ok(Self::zero(p));
        }
        Ok(Self::from_ln(Real::from_bigint(n, p).ln() / 2))
    }

    pub fn mul(&self, other: &LogMagnitude) -> LogMagnitude {
        if self.zero || other.zero {
            return LogMagnitude {
                ln: self.ln.clone(),
                zero: true,
            };
        }
        Self::from_ln(&self.ln + &other.ln)
    }

    pub fn scale_ln(&self, ln_factor: &Real) -> LogMagnitude {
        if self.zero {
            return self.clone();
        }
        Self::from_ln(&self.ln + ln_factor)
    }

    pub fn value(&self) -> Real {
        if self.zero {
            Real::zero(Precision::DEFAULT)
        } else {
            self.ln.exp()
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.zero {
            0.0
        } else {
            self.ln.to_f64().exp()
        }
    }

    /// `self < x` for a positive real `x`.
    pub fn lt_real(&self, x: &Real) -> bool {
        self.zero || self.ln < x.ln()
    }
}

impl PartialEq for LogMagnitude {
    fn eq(&self, other: &Self) -> bool {
        (self.zero && other.zero) || (!self.zero && !other.zero && self.ln == other.ln)
    }
}

impl PartialOrd for LogMagnitude {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        use std::cmp::Ordering::*;
        match (self.zero, other.zero) {
            (true, true) => Some(Equal),
            (true, false) => Some(Less),
            (false, true) => Some(Greater),
            (false, false) => self.ln.partial_cmp(&other.ln),
        }
    }
}

impl fmt::Display for LogMagnitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = f.precision().unwrap_or(6);
        if self.zero {
            return write!(f, "{:.d$}", 0.0);
        }
        // huge lengths cannot be exponentiated at fixed precision; fall back
        if self.ln.to_f64() > 600.0 {
            return write!(f, "{}", self.value().to_sci(d + 1));
        }
        f.write_str(&self.value().to_fixed(d))
    }
}

/// `|a′| = ρ^{−j/4}|a|`.
pub fn scaled_length(a: &IntVec3, j: i64, eig: &EigenData) -> Result<LogMagnitude> {
    if a.is_zero() {
        return Err(domain("scaled length of the zero vector"));
    }
    let len = LogMagnitude::sqrt_of_int(&a.norm2(), eig.precision)?;
    Ok(len.scale_ln(&(-(&eig.ln_rho * j) / 4)))
}

/// Constants of the bound `|a′| < 2.01`.
#[derive(Clone, Debug)]
pub struct CriterionConstants {
    /// Coefficient of `1/K²` in `H`: `|h|²`.
    pub a: Real,
    /// Coefficient of `K²` in `H`: `12∛4·max_α|g cos α + k sin α|²`.
    pub b: Real,
    /// Minimizer of `H(x) = a/x² + bx²`.
    pub x0: Real,
    /// The solution of `H(x′) = H(x′ρ^{−3/4})`.
    pub x_prime: Real,
    /// `x′ρ^{−3/4}`, lower end of the `K_j` window.
    pub x_prime_low: Real,
    pub h_at_x_prime: Real,
    /// Bound on the cross term `|T₃|`.
    pub t3_bound: Real,
    /// `max_α |g cos α + k sin α|`.
    pub max_rotated_norm: Real,
    /// `H(x′) + T₃` bound, square-rooted: the bound on `|a″|`.
    pub a2_bound: Real,
    pub ln_x_prime: Real,
    pub ln_rho: Real,
    pub precision: Precision,
}

/// Displayed values for `a` and `b` in the literature, kept for comparison.
pub const PUBLISHED_A: f64 = 0.07873129;
pub const PUBLISHED_B: f64 = 12.95559953;

impl CriterionConstants {
    pub fn new(eig: &EigenData) -> Self {
        let a = rdot(&eig.h, &eig.h);
        let lmax = eig.max_rotated_norm2();
        let b = eig.cbrt2.square() * 12 * &lmax;
        let x0 = (&a / &b).sqrt().sqrt();
        let x_prime = &x0 * eig.rho_pow(3, 8);
        let x_prime_low = &x_prime * eig.rho_pow(-3, 4);
        let h_at_x_prime = (&a * &b).sqrt() * (eig.rho_pow(3, 4) + eig.rho_pow(-3, 4));
        let t3_bound = &eig.cbrt2 * &eig.sqrt3 * 4 * eig.max_rotated_dot_h();
        let a2_bound = (&h_at_x_prime + &t3_bound).sqrt();
        let ln_x_prime = x_prime.ln();
        CriterionConstants {
            a,
            b,
            x0,
            x_prime,
            x_prime_low,
            h_at_x_prime,
            t3_bound,
            max_rotated_norm: lmax.sqrt(),
            a2_bound,
            ln_x_prime,
            ln_rho: eig.ln_rho.clone(),
            precision: eig.precision,
        }
    }

    /// `H(x) = a/x² + bx²`.
    pub fn h_fn(&self, x: &Real) -> Real {
        let x2 = x.square();
        &self.a / &x2 + &self.b * &x2
    }

    /// Bracket index `j = ⌊1 + 4(ln q − ln x′)/(3 ln ρ)⌋`, which puts
    /// `K_j = qρ^{−3j/4}` in `(x′ρ^{−3/4}, x′)`.
    pub fn estimate_j(&self, q: &BigInt) -> Result<JEstimate> {
        if !q.is_positive() {
            return Err(Error::InvalidArgument("q must be at least 1".into()));
        }
        let p = self.ln_rho_precision();
        let ln_q = Real::from_bigint(q, p).ln();
        let t = (ln_q - &self.ln_x_prime) * 4 / (&self.ln_rho * 3);
        let nearest = t.round();
        let tol = Real::from_f64(10f64.powi(-(p.decimal_digits() as i32 - 10).min(300)), p);
        let off = (&t - Real::from_bigint(&nearest, p)).abs();
        let (j, boundary) = if off < tol {
            // K_j on a window endpoint: take the smaller index.
            (nearest, true)
        } else {
            ((t + 1).floor(), false)
        };
        let j = i64::try_from(&j).map_err(|_| Error::InvalidArgument("q too large".into()))?;
        Ok(JEstimate { j, boundary })
    }

    fn ln_rho_precision(&self) -> Precision {
        self.precision
    }
}

/// Result of [`CriterionConstants::estimate_j`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct JEstimate {
    pub j: i64,
    /// `K_j` landed on a window endpoint within working precision.
    pub boundary: bool,
}

/// Constants at precision `p`, built on the cached eigen-data.
pub fn criterion_constants(p: Precision) -> Result<CriterionConstants> {
    Ok(CriterionConstants::new(eigen_data(p)?.as_ref()))
}
