//! Prefix counts `|K_n|`, α-order ratios `|K_n| / n^α`, and a finite-horizon
//! decision on whether those ratios tend to zero.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seqdsl::{EvalError, IndexPredicateSpec};
use crate::space::{validate_alpha, Checkpoints};

/// `|{k <= n_j : k ∈ K}|` at every checkpoint `n_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrefixCounts {
    pub checkpoints: Checkpoints,
    pub counts: Vec<u64>,
}

impl PrefixCounts {
    pub fn new(checkpoints: Checkpoints, counts: Vec<u64>) -> Result<Self> {
        if counts.len() != checkpoints.len() {
            return Err(Error::invalid("one count per checkpoint required"));
        }
        if counts.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::invalid("prefix counts must be nondecreasing"));
        }
        if counts.iter().zip(checkpoints.values()).any(|(c, n)| c > n) {
            return Err(Error::invalid("prefix count exceeds its checkpoint"));
        }
        Ok(PrefixCounts {
            checkpoints,
            counts,
        })
    }
}

/// Single forward scan over `1..=N`, recording the running count at each
/// checkpoint.
pub fn count_at_checkpoints<E>(
    cps: &Checkpoints,
    mut member: impl FnMut(u64) -> Result<bool, E>,
) -> Result<Vec<u64>, E> {
    let mut counts = Vec::with_capacity(cps.len());
    let mut running = 0u64;
    let mut k = 1u64;
    for &n in cps.values() {
        while k <= n {
            if member(k)? {
                running += 1;
            }
            k += 1;
        }
        counts.push(running);
    }
    Ok(counts)
}

pub fn prefix_counts(pred: &IndexPredicateSpec, cps: &Checkpoints) -> Result<PrefixCounts> {
    let counts = count_at_checkpoints(cps, |k| pred.contains(k)).map_err(Error::from)?;
    Ok(PrefixCounts {
        checkpoints: cps.clone(),
        counts,
    })
}

pub fn ratios_for(counts: &[u64], cps: &Checkpoints, alpha: f64) -> Vec<f64> {
    counts
        .iter()
        .zip(cps.values())
        .map(|(&c, &n)| c as f64 / (n as f64).powf(alpha))
        .collect()
}

pub fn alpha_ratios(pc: &PrefixCounts, alpha: f64) -> Result<Vec<f64>> {
    validate_alpha(alpha)?;
    Ok(ratios_for(&pc.counts, &pc.checkpoints, alpha))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DensityLimit {
    Zero,
    NonZero,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityVerdict {
    pub ratios: Vec<f64>,
    /// Least-squares slope of log-ratio against log-n; `None` with fewer
    /// than three checkpoints.
    pub slope: Option<f64>,
    pub final_ratio: f64,
    pub verdict: DensityLimit,
}

/// Thresholds of the zero-limit decision.
///
/// * `Zero` when the final ratio is at most `tau_zero`, or the fitted slope is
///   at most `-s_min` and the final ratio is at most `zero_level_cap`.
/// * `NonZero` when the final ratio is at least `tau_nonzero` and the slope
///   exceeds `-s_min`.
/// * `Inconclusive` otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecisionRule {
    pub tau_zero: f64,
    pub tau_nonzero: f64,
    pub s_min: f64,
    pub zero_level_cap: f64,
    pub fit_window: usize,
    pub ratio_floor: f64,
}

impl Default for DecisionRule {
    fn default() -> Self {
        DecisionRule {
            tau_zero: 0.05,
            tau_nonzero: 0.25,
            s_min: 0.02,
            zero_level_cap: 2.0,
            fit_window: 8,
            ratio_floor: 1e-12,
        }
    }
}

impl DecisionRule {
    pub fn validate(&self) -> Result<()> {
        let ok = self.tau_zero >= 0.0
            && self.tau_nonzero > self.tau_zero
            && self.s_min >= 0.0
            && self.zero_level_cap >= self.tau_zero
            && self.fit_window >= 2
            && self.ratio_floor > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("inconsistent decision thresholds {self:?}")))
        }
    }

    pub fn decide(&self, ratios: &[f64], cps: &Checkpoints) -> DensityVerdict {
        assert_eq!(ratios.len(), cps.len(), "one ratio per checkpoint");
        let final_ratio = *ratios.last().expect("checkpoints are nonempty");
        let slope = (ratios.len() >= 3).then(|| {
            let start = ratios.len().saturating_sub(self.fit_window);
            let xs: Vec<f64> = cps.values()[start..].iter().map(|&n| (n as f64).ln()).collect();
            let ys: Vec<f64> = ratios[start..]
                .iter()
                .map(|&r| r.max(self.ratio_floor).ln())
                .collect();
            least_squares_slope(&xs, &ys)
        });
        let s = slope.unwrap_or(0.0);
        let verdict = if final_ratio <= self.tau_zero
            || (s <= -self.s_min && final_ratio <= self.zero_level_cap)
        {
            DensityLimit::Zero
        } else if final_ratio >= self.tau_nonzero && s > -self.s_min {
            DensityLimit::NonZero
        } else {
            DensityLimit::Inconclusive
        };
        DensityVerdict {
            ratios: ratios.to_vec(),
            slope,
            final_ratio,
            verdict,
        }
    }

    /// Counts → ratios at `alpha` → verdict.
    pub fn decide_counts(&self, counts: &[u64], cps: &Checkpoints, alpha: f64) -> DensityVerdict {
        self.decide(&ratios_for(counts, cps, alpha), cps)
    }
}

pub fn decide_zero(ratios: &[f64], cps: &Checkpoints) -> DensityVerdict {
    DecisionRule::default().decide(ratios, cps)
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}

/// Writes `n,count,ratio` rows with a header line.
pub fn write_ratios_csv<W: Write>(
    mut out: W,
    cps: &Checkpoints,
    counts: &[u64],
    ratios: &[f64],
) -> io::Result<()> {
    writeln!(out, "n,count,ratio")?;
    for ((n, c), r) in cps.values().iter().zip(counts).zip(ratios) {
        writeln!(out, "{n},{c},{r}")?;
    }
    Ok(())
}

/// Prefix counts of an arbitrary membership test, surfacing the failing index.
pub fn prefix_counts_by<F>(cps: &Checkpoints, member: F) -> Result<PrefixCounts>
where
    F: FnMut(u64) -> Result<bool, EvalError>,
{
    let counts = count_at_checkpoints(cps, member)?;
    Ok(PrefixCounts {
        checkpoints: cps.clone(),
        counts,
    })
}
