//! Coefficient vectors of `η(p − qσ) = (0, p, −q)` in the bases `ℬ_j`, the
//! appropriate-basis search with the bound `|a′| < 2.01`, convergent detection
//! by two-dimensional Gauss reduction, and the next-quotient bound.

use std::io::Write;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::basis::{apply_s_power, combine, cross, s_star_vec, s_vec, IntMat3, IntVec3};
use crate::cf::{delta_of, Expansion};
use crate::error::{domain, Error, Result};
use crate::real::{Precision, Real};
use crate::spectral::{
    eigen_data, scaled_length, CriterionConstants, EigenData, JEstimate, LogMagnitude,
};

/// Default half-width of the appropriate-basis search window.
pub const DEFAULT_WINDOW: i64 = 5;

/// The hard bound on appropriate-basis lengths.
pub const LENGTH_BOUND: f64 = 2.01;

/// Shared high-precision data for the scans.
#[derive(Clone, Debug)]
pub struct Context {
    pub eig: Arc<EigenData>,
    pub consts: Arc<CriterionConstants>,
}

impl Context {
    pub fn new(p: Precision) -> Result<Self> {
        let eig = eigen_data(p)?;
        let consts = Arc::new(CriterionConstants::new(&eig));
        Ok(Context { eig, consts })
    }

    pub fn precision(&self) -> Precision {
        self.eig.precision
    }
}

/// Coordinates `a` of `(0, p, −q)` in `ℬ_j` and the scaled length `|a′|`.
#[derive(Clone, Debug)]
pub struct CoeffRecord {
    pub p: BigInt,
    pub q: BigInt,
    pub j: i64,
    pub a: IntVec3,
    pub len: LogMagnitude,
}

fn target(p: &BigInt, q: &BigInt) -> IntVec3 {
    IntVec3([BigInt::zero(), p.clone(), -q])
}

fn check_q(q: &BigInt) -> Result<()> {
    if q.is_positive() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "q must be at least 1, got {q}"
        )))
    }
}

/// `a = S^{−j}(0, p, −q)` with `|a′| = ρ^{−j/4}|a|`.
pub fn coeff_vector(p: &BigInt, q: &BigInt, j: i64, ctx: &Context) -> Result<CoeffRecord> {
    check_q(q)?;
    let a = apply_s_power(&target(p, q), -j);
    let len = scaled_length(&a, j, &ctx.eig)?;
    Ok(CoeffRecord {
        p: p.clone(),
        q: q.clone(),
        j,
        a,
        len,
    })
}

/// Records for every `j` in `lo..=hi`, stepping `S^{−1}` once per index.
pub fn coeff_range(
    p: &BigInt,
    q: &BigInt,
    lo: i64,
    hi: i64,
    ctx: &Context,
) -> Result<Vec<CoeffRecord>> {
    check_q(q)?;
    if lo > hi {
        return Err(Error::InvalidArgument(format!("empty j range {lo}..={hi}")));
    }
    let s_inv = IntMat3::s_inv();
    let mut a = apply_s_power(&target(p, q), -lo);
    let mut out = Vec::with_capacity((hi - lo + 1) as usize);
    for j in lo..=hi {
        if j > lo {
            a = s_inv.apply(&a);
        }
        let len = scaled_length(&a, j, &ctx.eig)?;
        out.push(CoeffRecord {
            p: p.clone(),
            q: q.clone(),
            j,
            a: a.clone(),
            len,
        });
    }
    Ok(out)
}

/// Result of the appropriate-basis search with its window.
#[derive(Clone, Debug)]
pub struct Appropriate {
    pub record: CoeffRecord,
    pub estimate: JEstimate,
    /// Final scanned range, after any extension.
    pub lo: i64,
    pub hi: i64,
    /// Whether the window had to grow past its initial half-width.
    pub extended: bool,
}

impl Appropriate {
    /// The minimizer lies strictly inside the initial window (or on its
    /// clipped lower end `j = 1`).
    pub fn interior(&self, window: i64) -> bool {
        let j = self.record.j;
        let lo = (self.estimate.j - window).max(1);
        !self.extended && (j > lo || lo == 1) && j < self.estimate.j + window
    }
}

fn argmin(records: &[CoeffRecord]) -> usize {
    let mut best = 0;
    for (i, r) in records.iter().enumerate().skip(1) {
        // strict comparison keeps the smaller j on ties
        if r.len < records[best].len {
            best = i;
        }
    }
    best
}

/// The `ℬ_j`, `j ≥ 1`, minimizing `|a′|` around the estimated index.
///
/// When the minimizer sits on an unclipped edge of the window, the window is
/// extended on that side until the minimum is interior.
pub fn appropriate_basis(
    p: &BigInt,
    q: &BigInt,
    window: i64,
    ctx: &Context,
) -> Result<Appropriate> {
    if window < 3 {
        return Err(Error::InvalidArgument(format!(
            "window must be at least 3, got {window}"
        )));
    }
    let estimate = ctx.consts.estimate_j(q)?;
    let mut lo = (estimate.j - window).max(1);
    let mut hi = (estimate.j + window).max(lo);
    let mut records = coeff_range(p, q, lo, hi, ctx)?;
    let mut extended = false;
    loop {
        let i = argmin(&records);
        if i == 0 && lo > 1 {
            let new_lo = (lo - window).max(1);
            let mut more = coeff_range(p, q, new_lo, lo - 1, ctx)?;
            more.append(&mut records);
            records = more;
            lo = new_lo;
            extended = true;
        } else if i + 1 == records.len() {
            let mut more = coeff_range(p, q, hi + 1, hi + window, ctx)?;
            records.append(&mut more);
            hi += window;
            extended = true;
        } else {
            let record = records.swap_remove(i);
            return Ok(Appropriate {
                record,
                estimate,
                lo,
                hi,
                extended,
            });
        }
    }
}

/// Appropriate-basis records for convergents `1..=n_max`, failing on the
/// first `|a′| ≥ 2.01`.
pub fn appropriate_scan(
    exp: &Expansion,
    n_max: usize,
    window: i64,
    ctx: &Context,
) -> Result<Vec<Appropriate>> {
    if n_max < 1 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    if exp.len() <= n_max {
        return Err(Error::InvalidArgument(format!(
            "expansion has {} terms, need {}",
            exp.len(),
            n_max + 1
        )));
    }
    let rows: Vec<Appropriate> = exp.convergents()[1..=n_max]
        .par_iter()
        .map(|c| appropriate_basis(&c.p, &c.q, window, ctx))
        .collect::<Result<_>>()?;
    let bound = Real::from_f64(LENGTH_BOUND, ctx.precision());
    for (n, r) in (1..).zip(&rows) {
        if !r.record.len.lt_real(&bound) {
            return Err(Error::Violation(format!(
                "convergent n={n} ({}/{}) at j={} has |a'| = {:.6} >= {LENGTH_BOUND}",
                r.record.p, r.record.q, r.record.j, r.record.len
            )));
        }
    }
    Ok(rows)
}

/// `(s_{−j+1}, s_{−j})`, a basis of `Λ_j = {a : ⟨a, s*_j⟩ = 0}`.
pub fn lattice_basis(j: i64) -> Result<(IntVec3, IntVec3)> {
    if j < 2 {
        return Err(Error::InvalidArgument(format!(
            "lattice index must be at least 2, got {j}"
        )));
    }
    Ok((s_vec(-j + 1), s_vec(-j)))
}

/// One row of a Gauss reduction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaussStep {
    pub z1: IntVec3,
    pub z2: IntVec3,
    pub norm2: BigInt,
    pub dot: BigInt,
    pub k: BigInt,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GaussTrace {
    pub steps: Vec<GaussStep>,
}

impl GaussTrace {
    /// Rows that changed the pair.
    pub fn reductions(&self) -> usize {
        self.steps.iter().filter(|s| !s.k.is_zero()).count()
    }

    /// CSV with header `n,z1_x,z1_y,z1_z,z2_x,z2_y,z2_z,z1_norm2,z1_dot_z2,k`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "n,z1_x,z1_y,z1_z,z2_x,z2_y,z2_z,z1_norm2,z1_dot_z2,k")?;
        for (n, s) in (1..).zip(&self.steps) {
            let [a, b, c] = &s.z1.0;
            let [d, e, f] = &s.z2.0;
            writeln!(
                out,
                "{n},{a},{b},{c},{d},{e},{f},{},{},{}",
                s.norm2, s.dot, s.k
            )?;
        }
        Ok(())
    }
}

/// The integer `k` with `−½|z₁|² < ⟨z₂ − kz₁, z₁⟩ ≤ ½|z₁|²`.
fn nearest_k(dot: &BigInt, norm2: &BigInt) -> BigInt {
    // k = ⌈(2d − n) / 2n⌉
    let num: BigInt = dot * 2 - norm2;
    Integer::div_ceil(&num, &(norm2 * 2))
}

fn step(z1: &IntVec3, z2: &IntVec3) -> GaussStep {
    let norm2 = z1.norm2();
    let dot = z1.dot(z2);
    let k = nearest_k(&dot, &norm2);
    GaussStep {
        z1: z1.clone(),
        z2: z2.clone(),
        norm2,
        dot,
        k,
    }
}

/// Shortest nonzero vector of the lattice spanned by `z₁, z₂`.
///
/// Each row replaces `z₂` by `z₂ − kz₁` and swaps. Once the update fails to
/// shorten, the swapped pair is recorded as a final row, whose `k` is then
/// always zero.
pub fn gauss_reduce(z1: &IntVec3, z2: &IntVec3) -> Result<(IntVec3, GaussTrace)> {
    if cross(z1, z2).is_zero() {
        return Err(domain("gauss reduction of dependent vectors"));
    }
    let (mut z1, mut z2) = if z1.norm2() > z2.norm2() {
        (z2.clone(), z1.clone())
    } else {
        (z1.clone(), z2.clone())
    };
    let mut trace = GaussTrace::default();
    loop {
        let row = step(&z1, &z2);
        if row.k.is_zero() {
            trace.steps.push(row);
            return Ok((z1, trace));
        }
        let cand = &z2 - &z1.scale(&row.k);
        let shorter = cand.norm2() < row.norm2;
        trace.steps.push(row);
        if !shorter {
            let last = step(&cand, &z1);
            debug_assert!(last.k.is_zero());
            trace.steps.push(last);
            return Ok((z1, trace));
        }
        z2 = std::mem::replace(&mut z1, cand);
    }
}

/// A shortest vector of `Λ_j` read as a convergent candidate.
#[derive(Clone, Debug)]
pub struct DetectionResult {
    pub j: i64,
    /// Sign chosen so that the recovered `q` is positive.
    pub a: IntVec3,
    pub p: BigInt,
    pub q: BigInt,
    pub len: LogMagnitude,
    /// `|a| < ⅓ρ^{j/4}`.
    pub proven: bool,
    /// `Δ = 3ρ^{−j/4}|a|`.
    pub big_delta: Real,
    /// `⌊2/Δ² − 2⌋` when `Δ < 1`.
    pub b_bound: Option<BigInt>,
    pub trace: GaussTrace,
}

/// Gauss reduction on `Λ_j` and the recovered fraction.
pub fn svp_detect(j: i64, ctx: &Context) -> Result<DetectionResult> {
    let (z1, z2) = lattice_basis(j)?;
    let (mut a, trace) = gauss_reduce(&z1, &z2)?;
    let mut v = combine(&a, j);
    if v.0[2].is_positive() {
        a = -&a;
        v = -&v;
    }
    if !v.0[0].is_zero() {
        return Err(Error::Violation(format!(
            "recovered vector {v} at j={j} has nonzero first coordinate"
        )));
    }
    let [_, p, mq] = v.0;
    let q = -mq;
    let len = scaled_length(&a, j, &ctx.eig)?;
    let p_ = ctx.precision();
    // 9|a|² < ρ^{j/2}
    let nine_a2 = Real::from_bigint(&(a.norm2() * 9), p_);
    let proven = nine_a2 < ctx.eig.rho_pow(j, 2);
    let big_delta = len.value().with_precision(p_) * 3;
    let b_bound = bound_next_quotient(&big_delta);
    Ok(DetectionResult {
        j,
        a,
        p,
        q,
        len,
        proven,
        big_delta,
        b_bound,
        trace,
    })
}

/// `⌊2/Δ² − 2⌋` for `0 < Δ < 1`; `None` otherwise.
///
/// Values within working precision of an integer are taken as that integer.
pub fn bound_next_quotient(big_delta: &Real) -> Option<BigInt> {
    let p = big_delta.precision();
    if big_delta.signum() <= 0 || *big_delta >= Real::one(p) {
        return None;
    }
    let x = Real::from_i64(2, p) / big_delta.square() - 2;
    let r = x.round();
    let tol = Real::from_f64(
        10f64.powi(-(p.decimal_digits() as i32 - 10).clamp(5, 300)),
        p,
    );
    let b = if (&x - Real::from_bigint(&r, p)).abs() < tol {
        r
    } else {
        x.floor()
    };
    Some(if b.is_negative() { BigInt::zero() } else { b })
}

/// A detection classified against the convergent list.
#[derive(Clone, Debug)]
pub struct ScanRow {
    pub detection: DetectionResult,
    /// Index `n` with `p_n/q_n = p/q`.
    pub convergent: Option<usize>,
    /// `δ = q(p − qσ)`.
    pub delta: Real,
}

/// Detections for every `j` in `lo..=hi`, in order.
pub fn svp_scan(lo: i64, hi: i64, ctx: &Context) -> Result<Vec<ScanRow>> {
    if lo < 2 || hi < lo {
        return Err(Error::InvalidArgument(format!(
            "j range {lo}..={hi} must satisfy 2 <= lo <= hi"
        )));
    }
    let dets: Vec<DetectionResult> = (lo..=hi)
        .into_par_iter()
        .map(|j| svp_detect(j, ctx))
        .collect::<Result<_>>()?;
    let max_q = dets
        .iter()
        .map(|d| d.q.clone())
        .max()
        .expect("non-empty range");
    let exp = crate::cf::expand_sigma_past(&max_q);
    dets.into_par_iter()
        .map(|d| {
            let convergent = exp.index_of(&d.p, &d.q);
            let delta = delta_of(&d.p, &d.q, ctx.precision())?;
            Ok(ScanRow {
                detection: d,
                convergent,
                delta,
            })
        })
        .collect()
}

/// Checks that every proven detection is a convergent with `|δ| < 0.48`.
pub fn check_soundness(rows: &[ScanRow]) -> Result<()> {
    let limit = Real::from_f64(0.48, Precision::digits(20));
    for r in rows.iter().filter(|r| r.detection.proven) {
        let d = &r.detection;
        if r.convergent.is_none() {
            return Err(Error::Violation(format!(
                "proven detection at j={} ({}/{}) is not a convergent",
                d.j, d.p, d.q
            )));
        }
        if r.delta.abs() >= limit {
            return Err(Error::Violation(format!(
                "proven detection at j={} has |delta| = {:.6}",
                d.j,
                r.delta.to_f64()
            )));
        }
    }
    Ok(())
}

/// CSV with header `p,q,j,a1,a2,a3,a_len`.
pub fn write_coeff_records<W: Write>(rows: &[CoeffRecord], mut out: W) -> Result<()> {
    writeln!(out, "p,q,j,a1,a2,a3,a_len")?;
    for r in rows {
        let [a1, a2, a3] = &r.a.0;
        writeln!(out, "{},{},{},{a1},{a2},{a3},{:.6}", r.p, r.q, r.j, r.len)?;
    }
    Ok(())
}

/// CSV with header `n,j,a_len`.
pub fn write_appropriate<W: Write>(rows: &[Appropriate], mut out: W) -> Result<()> {
    writeln!(out, "n,j,a_len")?;
    for (n, r) in (1..).zip(rows) {
        writeln!(out, "{n},{},{:.6}", r.record.j, r.record.len)?;
    }
    Ok(())
}

/// CSV with header `j,a_len,proven,is_convergent,p,q,Delta,b_bound`.
pub fn write_detections<W: Write>(rows: &[ScanRow], mut out: W) -> Result<()> {
    writeln!(out, "j,a_len,proven,is_convergent,p,q,Delta,b_bound")?;
    for r in rows {
        let d = &r.detection;
        let bound = d
            .b_bound
            .as_ref()
            .map(|b| b.to_string())
            .unwrap_or_default();
        writeln!(
            out,
            "{},{:.6},{},{},{},{},{},{bound}",
            d.j,
            d.len,
            d.proven,
            r.convergent.is_some(),
            d.p,
            d.q,
            d.big_delta.to_fixed(6)
        )?;
    }
    Ok(())
}

/// `⟨a, s*_j⟩`, zero for every lattice vector.
pub fn conjugate_pairing(a: &IntVec3, j: i64) -> BigInt {
    a.dot(&s_star_vec(j))
}

/// Reduced form of `p/q` with positive denominator.
pub fn reduce(p: &BigInt, q: &BigInt) -> (BigInt, BigInt) {
    let g = p.gcd(q);
    let (p, q) = (p / &g, q / &g);
    if q.is_negative() {
        (-p, -q)
    } else {
        (p, q)
    }
}
