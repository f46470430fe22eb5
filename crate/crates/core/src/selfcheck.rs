//! Exact and high-precision invariant checks, runnable against an arbitrary
//! step matrix so that a corrupted `S` is caught.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::basis::{cross, det3, IntMat3, IntVec3};
use crate::cf::expand_sigma;
use crate::criteria::{
    appropriate_scan, coeff_range, gauss_reduce, lattice_basis, write_appropriate,
    write_coeff_records, Context, DEFAULT_WINDOW,
};
use crate::error::Result;
use crate::real::Precision;
use crate::ring::{RhoCoords, RingElem};
use crate::spectral::rvec_from_int;

/// Checked-in reference outputs, compared byte for byte.
pub const GOLDENS: [(&str, &str); 4] = [
    ("cf12.csv", include_str!("../goldens/cf12.csv")),
    (
        "coeffs_1251_4813.csv",
        include_str!("../goldens/coeffs_1251_4813.csv"),
    ),
    (
        "first_five_lengths.csv",
        include_str!("../goldens/first_five_lengths.csv"),
    ),
    ("gauss_j7.csv", include_str!("../goldens/gauss_j7.csv")),
];

/// Regenerates the contents of each golden file.
pub fn render_goldens(ctx: &Context) -> Result<Vec<(&'static str, String)>> {
    let mut out = Vec::new();

    let mut buf = Vec::new();
    expand_sigma(12)?.write_csv(&mut buf)?;
    out.push(("cf12.csv", buf));

    let mut buf = Vec::new();
    let (p, q) = (BigInt::from(1251), BigInt::from(4813));
    write_coeff_records(&coeff_range(&p, &q, 8, 13, ctx)?, &mut buf)?;
    out.push(("coeffs_1251_4813.csv", buf));

    let mut buf = Vec::new();
    let e = expand_sigma(5)?;
    write_appropriate(&appropriate_scan(&e, 5, DEFAULT_WINDOW, ctx)?, &mut buf)?;
    out.push(("first_five_lengths.csv", buf));

    let mut buf = Vec::new();
    let (z1, z2) = lattice_basis(7)?;
    gauss_reduce(&z1, &z2)?.1.write_csv(&mut buf)?;
    out.push(("gauss_j7.csv", buf));

    Ok(out
        .into_iter()
        .map(|(n, b)| (n, String::from_utf8(b).expect("ascii csv")))
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// A configured run of the invariant suite.
#[derive(Clone, Debug)]
pub struct SelfCheck {
    /// Matrix generating the orbit `s_{j+1} = step · s_j`.
    pub step: IntMat3,
    pub precision: Precision,
    /// Convergents covered by the `|a′| < 2.01` prefix check.
    pub length_prefix: usize,
    pub seed: u64,
}

impl Default for SelfCheck {
    fn default() -> Self {
        SelfCheck {
            step: IntMat3::s(),
            precision: Precision::DEFAULT,
            length_prefix: 200,
            seed: 7,
        }
    }
}

/// The orbit of a step matrix, independent of the cached global tables.
struct LocalOrbit {
    lo: i64,
    vecs: Vec<IntVec3>,
}

impl LocalOrbit {
    fn new(step: &IntMat3, inv: &IntMat3, seed: IntVec3, lo: i64, hi: i64) -> Self {
        let mut neg = vec![seed.clone()];
        for _ in lo..0 {
            let next = inv.apply(neg.last().expect("seeded"));
            neg.push(next);
        }
        neg.reverse();
        let mut vecs = neg;
        for _ in 0..hi {
            let next = step.apply(vecs.last().expect("seeded"));
            vecs.push(next);
        }
        LocalOrbit { lo, vecs }
    }

    fn get(&self, j: i64) -> &IntVec3 {
        &self.vecs[(j - self.lo) as usize]
    }
}

/// Integer inverse of a unimodular matrix.
fn unimodular_inverse(m: &IntMat3) -> Option<IntMat3> {
    let d = m.det();
    if d.abs() != BigInt::one() {
        return None;
    }
    let a = &m.0;
    let cof = |i: usize, j: usize| {
        let (r0, r1) = ((i + 1) % 3, (i + 2) % 3);
        let (c0, c1) = ((j + 1) % 3, (j + 2) % 3);
        &a[r0][c0] * &a[r1][c1] - &a[r0][c1] * &a[r1][c0]
    };
    // inverse = adjugate / det, adjugate = transposed cofactors
    Some(IntMat3(std::array::from_fn(|i| {
        std::array::from_fn(|j| cof(j, i) * &d)
    })))
}

const RANGE: i64 = 24;

impl SelfCheck {
    pub fn run(&self) -> Vec<CheckOutcome> {
        let mut out = Vec::new();
        let mut push = |name: &'static str, r: std::result::Result<(), String>| {
            let (passed, detail) = match r {
                Ok(()) => (true, String::new()),
                Err(e) => (false, e),
            };
            out.push(CheckOutcome {
                name,
                passed,
                detail,
            });
        };

        push("ring identities", self.ring_identities());
        push("norm multiplicativity", self.norm_multiplicativity());

        let Some(inv) = unimodular_inverse(&self.step) else {
            push(
                "step matrix is unimodular",
                Err(format!("det = {}", self.step.det())),
            );
            return out;
        };
        push("step matrix is unimodular", Ok(()));
        push(
            "step matrix is multiplication by sigma",
            self.step_is_sigma(),
        );

        let adj = self.step.transpose();
        let adj_inv = inv.transpose();
        let s = LocalOrbit::new(
            &self.step,
            &inv,
            IntVec3::new(0, 1, 0),
            -3 * RANGE,
            3 * RANGE,
        );
        let s_star = LocalOrbit::new(&adj, &adj_inv, IntVec3::new(1, 0, 0), -RANGE, RANGE);

        push(
            "scalar products of conjugate orbits",
            conjugate_products(&s, &s_star),
        );
        push(
            "cross products of consecutive vectors",
            consecutive_crosses(&s, &s_star),
        );
        push("T carries s_j to s*_j", t_relation(&s, &s_star));
        push("basis determinants", determinants(&s, &s_star));

        match Context::new(self.precision) {
            Ok(ctx) => {
                push("closed form of s_j", closed_forms(&s, &ctx));
                push(
                    "appropriate-basis bound on a prefix",
                    self.length_bound(&ctx),
                );
                push("golden tables", goldens(&ctx));
            }
            Err(e) => push("high-precision context", Err(e.to_string())),
        }
        out
    }

    fn ring_identities(&self) -> std::result::Result<(), String> {
        if &RingElem::rho() * &RingElem::sigma() != RingElem::one() {
            return Err("rho * sigma != 1".into());
        }
        let c = RingElem::cbrt2();
        if c.pow(3) != RingElem::new(2, 0, 0) {
            return Err("cbrt2^3 != 2".into());
        }
        if RingElem::rho().norm() != BigInt::one() || RingElem::sigma().norm() != BigInt::one() {
            return Err("rho and sigma must be units".into());
        }
        let mut rng = StdRng::seed_from_u64(self.seed);
        for _ in 0..200 {
            let x = random_elem(&mut rng, 1000);
            let r = x.to_rho();
            if r.to_ring() != x || r.norm_tilde() != x.norm() {
                return Err(format!("coordinate round trip failed for {x}"));
            }
        }
        Ok(())
    }

    fn norm_multiplicativity(&self) -> std::result::Result<(), String> {
        let mut rng = StdRng::seed_from_u64(self.seed ^ 0x5a);
        for _ in 0..1000 {
            let (x, y) = (
                random_elem(&mut rng, 1_000_000),
                random_elem(&mut rng, 1_000_000),
            );
            if (&x * &y).norm() != x.norm() * y.norm() {
                return Err(format!("N({x} * {y}) != N({x}) N({y})"));
            }
        }
        Ok(())
    }

    fn step_is_sigma(&self) -> std::result::Result<(), String> {
        let basis = [
            RhoCoords::new(1, 0, 0),
            RhoCoords::new(0, 1, 0),
            RhoCoords::new(0, 0, 1),
        ];
        for b in basis {
            let v = IntVec3([b.x.clone(), b.y.clone(), b.z.clone()]);
            let prod = (&b.to_ring() * &RingElem::sigma()).to_rho();
            let want = IntVec3([prod.x, prod.y, prod.z]);
            let got = self.step.apply(&v);
            if got != want {
                return Err(format!("step {v} = {got}, sigma * {v} = {want}"));
            }
        }
        Ok(())
    }

    fn length_bound(&self, ctx: &Context) -> std::result::Result<(), String> {
        let e = expand_sigma(self.length_prefix.max(1)).map_err(|e| e.to_string())?;
        appropriate_scan(&e, self.length_prefix.max(1), DEFAULT_WINDOW, ctx)
            .map(|_| ())
            .map_err(|e| e.to_string())
    }
}

fn random_elem(rng: &mut StdRng, bound: i64) -> RingElem {
    RingElem::new(
        rng.gen_range(-bound..=bound),
        rng.gen_range(-bound..=bound),
        rng.gen_range(-bound..=bound),
    )
}

fn conjugate_products(s: &LocalOrbit, s_star: &LocalOrbit) -> std::result::Result<(), String> {
    let listed = [3, 1, 0, 0, 1, -3];
    for (m, want) in (-2..=3).zip(listed) {
        let got = &s.get(m).0[0];
        if *got != BigInt::from(want) {
            return Err(format!(
                "first component of s_{m} is {got}, expected {want}"
            ));
        }
    }
    for n in -RANGE..=RANGE {
        for k in -RANGE..=RANGE {
            let lhs = s_star.get(n).dot(s.get(k));
            if lhs != s.get(k + n).0[0] {
                return Err(format!(
                    "<s*_{n}, s_{k}> = {lhs} differs from the first component of s_{}",
                    k + n
                ));
            }
        }
    }
    Ok(())
}

fn consecutive_crosses(s: &LocalOrbit, s_star: &LocalOrbit) -> std::result::Result<(), String> {
    for j in -20..=20 {
        let c = cross(s.get(-j), s.get(-j + 1));
        if &c != s_star.get(j) {
            return Err(format!(
                "s_{} x s_{} = {c}, s*_{j} = {}",
                -j,
                -j + 1,
                s_star.get(j)
            ));
        }
    }
    Ok(())
}

fn t_relation(s: &LocalOrbit, s_star: &LocalOrbit) -> std::result::Result<(), String> {
    let t = IntMat3::t();
    for j in -RANGE..=RANGE {
        let a = t.apply(s.get(j));
        if &a != s_star.get(j) {
            return Err(format!("T s_{j} = {a}, s*_{j} = {}", s_star.get(j)));
        }
        let ok = s_star.get(j).0[..]
            == [
                s.get(j - 1).0[0].clone(),
                s.get(j).0[0].clone(),
                s.get(j + 1).0[0].clone(),
            ];
        if !ok {
            return Err(format!(
                "s*_{j} is not the first components of s_{}..s_{}",
                j - 1,
                j + 1
            ));
        }
    }
    Ok(())
}

fn determinants(s: &LocalOrbit, s_star: &LocalOrbit) -> std::result::Result<(), String> {
    let d0 = det3(s.get(-1), s.get(0), s.get(1));
    let e0 = det3(s_star.get(-1), s_star.get(0), s_star.get(1));
    if d0.abs() != BigInt::one() || e0.abs() != BigInt::one() {
        return Err(format!("bases not unimodular: {d0}, {e0}"));
    }
    for j in -RANGE + 1..RANGE {
        let d = det3(s.get(j - 1), s.get(j), s.get(j + 1));
        let e = det3(s_star.get(j - 1), s_star.get(j), s_star.get(j + 1));
        if d != d0 || e != e0 {
            return Err(format!("determinant changes at j={j}: {d}, {e}"));
        }
    }
    if s_star.get(0).dot(s.get(0)) != BigInt::zero() {
        return Err("<s*_0, s_0> != 0".into());
    }
    Ok(())
}

fn closed_forms(s: &LocalOrbit, ctx: &Context) -> std::result::Result<(), String> {
    let p = ctx.precision();
    for j in -RANGE..=RANGE {
        let exact = rvec_from_int(s.get(j), p);
        let closed = ctx.eig.s_closed_form(j);
        for i in 0..3 {
            let err = (&exact[i] - &closed[i]).abs().to_f64();
            let scale = exact[i].abs().to_f64().max(1.0);
            if err > 1e-30 * scale {
                return Err(format!("component {i} of s_{j} off by {err:e}"));
            }
        }
    }
    Ok(())
}

fn goldens(ctx: &Context) -> std::result::Result<(), String> {
    let fresh = render_goldens(ctx).map_err(|e| e.to_string())?;
    for ((name, want), (_, got)) in GOLDENS.iter().zip(&fresh) {
        if want != got {
            return Err(format!("{name} differs from its checked-in copy"));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(step: IntMat3) -> SelfCheck {
        SelfCheck {
            step,
            length_prefix: 20,
            ..SelfCheck::default()
        }
    }

    #[test]
    fn clean_suite_passes() {
        for c in quick(IntMat3::s()).run() {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }

    #[test]
    fn perturbed_step_fails() {
        let mut m = IntMat3::s();
        m.0[2][2] = BigInt::from(-2);
        let r = quick(m).run();
        assert!(r.iter().any(|c| !c.passed));
        assert!(r
            .iter()
            .any(|c| c.name == "step matrix is multiplication by sigma" && !c.passed));
    }

    #[test]
    fn non_unimodular_step_fails() {
        let r = quick(IntMat3::from_rows([[2, 0, 0], [0, 1, 0], [0, 0, 1]])).run();
        assert!(r
            .iter()
            .any(|c| c.name == "step matrix is unimodular" && !c.passed));
    }

    #[test]
    fn unimodular_inverse_of_s() {
        assert_eq!(unimodular_inverse(&IntMat3::s()), Some(IntMat3::s_inv()));
    }
}
