//! Gauss–Kuzmin probabilities and a χ² goodness-of-fit test of partial
//! quotients against them.

use std::io::Write;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use statrs::function::gamma::checked_gamma_ur;

use crate::error::{domain, Error, Result};

/// `P(b = k) = log₂((k+1)² / (k(k+2)))`.
pub fn kuzmin_prob(k: u64) -> Result<f64> {
    if k < 1 {
        return Err(domain("Kuzmin probability needs k >= 1"));
    }
    let k = k as f64;
    // ln(1 + 1/(k(k+2))) keeps precision for large k
    Ok((1.0 / (k * (k + 2.0))).ln_1p() / std::f64::consts::LN_2)
}

/// `P(b ≥ m) = log₂((m+1)/m)`.
pub fn tail_prob(m: u64) -> Result<f64> {
    if m < 1 {
        return Err(domain("Kuzmin tail needs m >= 1"));
    }
    Ok((1.0 / m as f64).ln_1p() / std::f64::consts::LN_2)
}

/// Observed and expected counts for the cells `{1}, …, {R−1}, {≥R}`.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupedCounts {
    pub r: usize,
    pub observed: Vec<u64>,
    pub expected: Vec<f64>,
    pub n: u64,
}

impl GroupedCounts {
    /// Groups `b₁, b₂, …`; `quotients[0]` is taken to be `b₀` and skipped.
    pub fn from_quotients(quotients: &[BigInt], r: usize) -> Result<Self> {
        Self::from_sample(quotients.iter().skip(1), r)
    }

    /// Groups every value of `sample`, each of which must be at least 1.
    pub fn from_sample<'a>(sample: impl IntoIterator<Item = &'a BigInt>, r: usize) -> Result<Self> {
        if r < 2 {
            return Err(Error::InvalidArgument(format!(
                "need at least 2 groups, got {r}"
            )));
        }
        let mut observed = vec![0u64; r];
        for b in sample {
            if *b < BigInt::one() {
                return Err(domain(format!("partial quotient {b} is below 1")));
            }
            let cell = b.to_usize().map_or(r, |v| v.min(r)) - 1;
            observed[cell] += 1;
        }
        Self::from_observed(observed)
    }

    pub fn from_observed(observed: Vec<u64>) -> Result<Self> {
        let r = observed.len();
        if r < 2 {
            return Err(Error::InvalidArgument(format!(
                "need at least 2 groups, got {r}"
            )));
        }
        let n: u64 = observed.iter().sum();
        if n == 0 {
            return Err(domain("empty sample"));
        }
        let mut expected: Vec<f64> = (1..r as u64)
            .map(|k| kuzmin_prob(k).map(|p| p * n as f64))
            .collect::<Result<_>>()?;
        expected.push(tail_prob(r as u64)? * n as f64);
        Ok(GroupedCounts {
            r,
            observed,
            expected,
            n,
        })
    }

    pub fn min_expected(&self) -> f64 {
        self.expected.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChiSquareResult {
    pub x2: f64,
    pub df: usize,
    pub p_value: f64,
}

/// Upper tail of the χ² distribution with `df` degrees of freedom.
pub fn chi2_sf(x2: f64, df: usize) -> Result<f64> {
    if df == 0 {
        return Err(Error::InvalidArgument("df must be positive".into()));
    }
    if x2.is_nan() || x2 < 0.0 {
        return Err(domain(format!("chi-square statistic {x2} is negative")));
    }
    if x2 == 0.0 {
        return Ok(1.0);
    }
    checked_gamma_ur(df as f64 / 2.0, x2 / 2.0)
        .map_err(|e| domain(format!("incomplete gamma: {e}")))
}

/// `X² = Σ (O_i − E_i)² / E_i` with `df = R − 1`.
pub fn chi_square(counts: &GroupedCounts) -> Result<ChiSquareResult> {
    if counts.expected.iter().any(|&e| e <= 0.0) {
        return Err(domain("an expected count is zero; use fewer groups"));
    }
    let x2 = counts
        .observed
        .iter()
        .zip(&counts.expected)
        .map(|(&o, &e)| {
            let d = o as f64 - e;
            d * d / e
        })
        .sum::<f64>();
    let df = counts.r - 1;
    Ok(ChiSquareResult {
        x2,
        df,
        p_value: chi2_sf(x2, df)?,
    })
}

/// One row of a degrees-of-freedom scan.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DfRow {
    pub r: usize,
    pub result: ChiSquareResult,
    pub min_expected: f64,
    /// Every expected count is at least 5.
    pub valid: bool,
}

/// χ² test of `b₁, b₂, …` for every group count `R` in `r_min..=r_max`.
pub fn scan_df(quotients: &[BigInt], r_min: usize, r_max: usize) -> Result<Vec<DfRow>> {
    if r_min < 2 || r_max < r_min {
        return Err(Error::InvalidArgument(format!(
            "group range {r_min}..={r_max} must satisfy 2 <= min <= max"
        )));
    }
    (r_min..=r_max)
        .map(|r| {
            let counts = GroupedCounts::from_quotients(quotients, r)?;
            let result = chi_square(&counts)?;
            let min_expected = counts.min_expected();
            Ok(DfRow {
                r,
                result,
                min_expected,
                valid: min_expected >= 5.0,
            })
        })
        .collect()
}

/// CSV with header `df,R,X2,p_value`.
pub fn write_csv<W: Write>(rows: &[DfRow], mut out: W) -> Result<()> {
    writeln!(out, "df,R,X2,p_value")?;
    for row in rows {
        writeln!(
            out,
            "{},{},{:.6},{:.6}",
            row.result.df, row.r, row.result.x2, row.result.p_value
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::{Precision, Real};

    /// `Q(df/2, x/2)` from the power series of `P` at 120 digits.
    fn oracle_sf(x2: f64, df: usize) -> f64 {
        let p = Precision::digits(120);
        if x2 == 0.0 {
            return 1.0;
        }
        let a = Real::from_i64(df as i64, p) / 2;
        let x = Real::from_f64(x2, p) / 2;
        // Γ(a + 1) for integer or half-integer a
        let even = df.is_multiple_of(2);
        let mut gamma = if even {
            Real::one(p)
        } else {
            Real::pi(p).sqrt() / 2
        };
        let mut t = if even {
            Real::one(p)
        } else {
            Real::from_f64(1.5, p)
        };
        while t <= a {
            gamma = gamma * &t;
            t = t + 1;
        }
        let mut term = Real::one(p);
        let mut sum = Real::one(p);
        let eps = Real::from_f64(1e-60, p);
        let mut n = 1;
        loop {
            term = term * &x / (&a + n);
            sum = &sum + &term;
            if term < &sum * &eps {
                break;
            }
            n += 1;
        }
        let lower = (&a * x.ln() - &x).exp() * sum / gamma;
        (Real::one(p) - lower).to_f64()
    }

    #[test]
    fn probabilities() {
        assert!((kuzmin_prob(1).unwrap() - 0.415037).abs() < 1e-6);
        assert!((kuzmin_prob(2).unwrap() - 0.169925).abs() < 1e-6);
        assert!(kuzmin_prob(0).is_err());
        assert!(tail_prob(0).is_err());
        assert_eq!(tail_prob(1).unwrap(), 1.0);
    }

    #[test]
    fn telescoping() {
        let mut head = 0.0;
        for m in 1..2000u64 {
            let direct = 1.0 - head;
            assert!((tail_prob(m).unwrap() - direct).abs() < 1e-12, "m={m}");
            let collapsed = (2.0 * m as f64 / (m as f64 + 1.0)).log2();
            assert!((head - collapsed).abs() < 1e-12, "m={m}");
            head += kuzmin_prob(m).unwrap();
        }
    }

    #[test]
    fn incomplete_gamma_matches_series() {
        let mut worst: f64 = 0.0;
        for df in 1..=60 {
            for i in 0..=40 {
                let x2 = i as f64 * 5.0;
                let e = (chi2_sf(x2, df).unwrap() - oracle_sf(x2, df)).abs();
                worst = worst.max(e);
            }
        }
        assert!(worst < 1e-10, "worst error {worst}");
    }

    #[test]
    fn standard_quantile() {
        assert!((chi2_sf(3.841, 1).unwrap() - 0.05).abs() < 0.001);
        assert_eq!(chi2_sf(0.0, 7).unwrap(), 1.0);
        assert!(chi2_sf(-1.0, 3).is_err());
        assert!(chi2_sf(1.0, 0).is_err());
    }

    #[test]
    fn sf_is_monotone() {
        for df in [1, 5, 30] {
            let vals: Vec<f64> = (0..100)
                .map(|i| chi2_sf(i as f64 * 0.7, df).unwrap())
                .collect();
            // strict once the tail separates from 1 in f64
            for w in vals.windows(2) {
                assert!(w[1] <= w[0], "df={df}");
                if w[0] < 1.0 - 1e-14 {
                    assert!(w[1] < w[0], "df={df}");
                }
            }
        }
    }

    #[test]
    fn exact_observation_gives_unit_p() {
        let c = GroupedCounts {
            r: 3,
            observed: vec![4, 3, 3],
            expected: vec![4.0, 3.0, 3.0],
            n: 10,
        };
        let r = chi_square(&c).unwrap();
        assert_eq!(r.x2, 0.0);
        assert_eq!(r.p_value, 1.0);
        assert_eq!(r.df, 2);
    }

    #[test]
    fn three_groups_by_hand() {
        let c = GroupedCounts::from_observed(vec![50, 15, 35]).unwrap();
        let p1 = (4.0f64 / 3.0).log2();
        let p2 = (9.0f64 / 8.0).log2();
        let p3 = 1.0 - p1 - p2;
        let x2 = (50.0 - 100.0 * p1).powi(2) / (100.0 * p1)
            + (15.0 - 100.0 * p2).powi(2) / (100.0 * p2)
            + (35.0 - 100.0 * p3).powi(2) / (100.0 * p3);
        assert!((chi_square(&c).unwrap().x2 - x2).abs() < 1e-12);
    }

    #[test]
    fn two_cells_match_normal_tail() {
        let c = GroupedCounts::from_observed(vec![430, 570]).unwrap();
        let p1 = (4.0f64 / 3.0).log2();
        let z = (430.0 - 1000.0 * p1) / (1000.0 * p1 * (1.0 - p1)).sqrt();
        let want = statrs::function::erf::erfc(z.abs() / std::f64::consts::SQRT_2);
        assert!((chi_square(&c).unwrap().p_value - want).abs() < 1e-9);
    }

    #[test]
    fn uniform_sample_is_rejected() {
        let sample: Vec<BigInt> = (0..20_000u64).map(|i| BigInt::from(i % 10 + 1)).collect();
        for r in [5, 10, 20] {
            let c = GroupedCounts::from_sample(&sample, r).unwrap();
            assert!(chi_square(&c).unwrap().p_value < 1e-6);
        }
    }

    #[test]
    fn grouping_skips_b0_and_pools_tail() {
        let q: Vec<BigInt> = [0, 1, 2, 3, 7, 1].into_iter().map(BigInt::from).collect();
        let c = GroupedCounts::from_quotients(&q, 3).unwrap();
        assert_eq!(c.observed, vec![2, 1, 2]);
        assert_eq!(c.n, 5);
        assert!((c.expected.iter().sum::<f64>() - 5.0).abs() < 1e-12);
        assert!(GroupedCounts::from_quotients(&q, 1).is_err());
        assert!(GroupedCounts::from_sample(&q, 3).is_err());
    }

    #[test]
    fn scan_flags_sparse_cells() {
        let q = crate::cf::expand_sigma(300).unwrap().quotients();
        let rows = scan_df(&q, 2, 40).unwrap();
        assert_eq!(rows.len(), 39);
        assert!(rows[0].valid);
        assert!(!rows.last().unwrap().valid);
        assert!(scan_df(&q, 1, 5).is_err());
        let mut buf = Vec::new();
        write_csv(&rows[..1], &mut buf).unwrap();
        assert!(String::from_utf8(buf)
            .unwrap()
            .starts_with("df,R,X2,p_value\n1,2,"));
    }
}
