use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::{DecisionRule, DensityLimit, DensityVerdict};
use crate::error::{Error, Result};
use crate::seqdsl::Sequence;
use crate::space::{validate_alpha, Checkpoints, NormKind, Point, RoughParams};

use super::grid::{grid_diameter, BoundingBox, Grid};
use super::sample::{count_far_naive, ProximityIndex, Sampled, SortedSegments};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConvergenceVerdict {
    Converges,
    Diverges,
    Inconclusive,
}

/// Bad-index counts and density verdict for one ε of the ladder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsOutcome {
    pub eps: f64,
    pub counts: Vec<u64>,
    pub density: DensityVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub xi: Point,
    pub params: RoughParams,
    pub checkpoints: Checkpoints,
    pub per_eps: Vec<EpsOutcome>,
    pub verdict: ConvergenceVerdict,
}

/// Converges when the smallest ε is `Zero`, Diverges when some ε is
/// `NonZero`. The (rare) case where both hold is reported Inconclusive.
pub fn aggregate(per_eps: &[EpsOutcome]) -> ConvergenceVerdict {
    let smallest_zero = per_eps
        .last()
        .is_some_and(|o| o.density.verdict == DensityLimit::Zero);
    let any_nonzero = per_eps
        .iter()
        .any(|o| o.density.verdict == DensityLimit::NonZero);
    match (smallest_zero, any_nonzero) {
        (true, false) => ConvergenceVerdict::Converges,
        (false, true) => ConvergenceVerdict::Diverges,
        _ => ConvergenceVerdict::Inconclusive,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitSetEstimate {
    pub grid: Vec<Point>,
    pub shape: Vec<usize>,
    pub accepted: Vec<bool>,
    pub verdicts: Vec<ConvergenceVerdict>,
    pub hull: Option<BoundingBox>,
    pub diameter: f64,
    pub uncertainty: f64,
}

impl LimitSetEstimate {
    pub fn accepted_points(&self) -> impl Iterator<Item = &Point> {
        self.grid
            .iter()
            .zip(&self.accepted)
            .filter_map(|(p, &a)| a.then_some(p))
    }

    pub fn is_empty(&self) -> bool {
        !self.accepted.iter().any(|&a| a)
    }

    pub fn count(&self, v: ConvergenceVerdict) -> usize {
        self.verdicts.iter().filter(|&&x| x == v).count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterEstimate {
    pub grid: Vec<Point>,
    pub shape: Vec<usize>,
    pub positive: Vec<bool>,
    pub verdicts: Vec<DensityLimit>,
    pub eps: f64,
    pub alpha: f64,
}

impl ClusterEstimate {
    pub fn positive_points(&self) -> impl Iterator<Item = &Point> {
        self.grid
            .iter()
            .zip(&self.positive)
            .filter_map(|(p, &a)| a.then_some(p))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Boundedness {
    Bounded { m: f64 },
    NotDetected,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundednessReport {
    pub result: Boundedness,
    pub alpha: f64,
    /// `(M, verdict)` for every threshold tried.
    pub scan: Vec<(f64, DensityVerdict)>,
}

/// Powers of two `1, 2, …, 2^20` that do not exceed a quarter of the
/// horizon; larger thresholds cannot be told apart from linear growth
/// within the prefix.
pub fn default_m_schedule(horizon: u64) -> Vec<f64> {
    let cap = (horizon as f64 / 4.0).max(1.0);
    (0..=20)
        .map(|i| f64::from(1u32 << i))
        .filter(|&m| m <= cap)
        .collect()
}

/// Sampled prefix of one sequence plus the machinery to count far points
/// from many centres; all grid-level estimates go through here.
#[derive(Debug, Clone)]
pub struct RoughAnalyzer {
    sampled: Sampled,
    index: Option<ProximityIndex>,
    cps: Checkpoints,
    norm: NormKind,
    rule: DecisionRule,
}

impl RoughAnalyzer {
    pub fn new(seq: &dyn Sequence, cps: &Checkpoints, norm: NormKind) -> Result<Self> {
        let sampled = Sampled::from_sequence(seq, cps.horizon())?;
        let index = if sampled.dim() <= 2 {
            Some(ProximityIndex::build(&sampled, cps)?)
        } else {
            None
        };
        Ok(RoughAnalyzer {
            sampled,
            index,
            cps: cps.clone(),
            norm,
            rule: DecisionRule::default(),
        })
    }

    pub fn with_rule(mut self, rule: DecisionRule) -> Result<Self> {
        rule.validate()?;
        self.rule = rule;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.sampled.dim()
    }

    pub fn norm(&self) -> NormKind {
        self.norm
    }

    pub fn rule(&self) -> &DecisionRule {
        &self.rule
    }

    pub fn checkpoints(&self) -> &Checkpoints {
        &self.cps
    }

    pub fn sampled(&self) -> &Sampled {
        &self.sampled
    }

    fn check_dim(&self, p: &Point) -> Result<()> {
        if p.dim() == self.dim() {
            Ok(())
        } else {
            Err(Error::invalid(format!(
                "dimension mismatch: sequence has dim {}, point has dim {}",
                self.dim(),
                p.dim()
            )))
        }
    }

    /// Per threshold, cumulative counts of `‖x_k − centre‖ >= threshold`.
    pub fn far_counts(&self, centre: &Point, thresholds: &[f64]) -> Result<Vec<Vec<u64>>> {
        self.check_dim(centre)?;
        Ok(match &self.index {
            Some(idx) => idx.count_far(centre.coords(), thresholds, self.norm),
            None => count_far_naive(&self.sampled, &self.cps, centre.coords(), thresholds, self.norm),
        })
    }

    /// Bad-set counts `‖x_k − ξ‖ >= r + ε` for every ε of the ladder.
    pub fn bad_counts(&self, xi: &Point, r: f64, ladder: &[f64]) -> Result<Vec<Vec<u64>>> {
        let thresholds: Vec<f64> = ladder.iter().map(|e| r + e).collect();
        self.far_counts(xi, &thresholds)
    }

    pub fn report_from_counts(
        &self,
        xi: &Point,
        params: &RoughParams,
        counts: Vec<Vec<u64>>,
    ) -> ConvergenceReport {
        let per_eps: Vec<EpsOutcome> = params
            .eps_ladder
            .iter()
            .zip(counts)
            .map(|(&eps, counts)| {
                let density = self.rule.decide_counts(&counts, &self.cps, params.alpha);
                EpsOutcome {
                    eps,
                    counts,
                    density,
                }
            })
            .collect();
        let verdict = aggregate(&per_eps);
        ConvergenceReport {
            xi: xi.clone(),
            params: params.clone(),
            checkpoints: self.cps.clone(),
            per_eps,
            verdict,
        }
    }

    pub fn report(&self, xi: &Point, params: &RoughParams) -> Result<ConvergenceReport> {
        let counts = self.bad_counts(xi, params.r, &params.eps_ladder)?;
        Ok(self.report_from_counts(xi, params, counts))
    }

    pub fn verdict(&self, xi: &Point, params: &RoughParams) -> Result<ConvergenceVerdict> {
        Ok(self.report(xi, params)?.verdict)
    }

    fn check_grid(&self, grid: &Grid) -> Result<()> {
        if self.dim() > 2 {
            return Err(Error::UnsupportedDimension(self.dim()));
        }
        if grid.dim() != self.dim() {
            return Err(Error::invalid(format!(
                "grid has {} axes but the sequence has dim {}",
                grid.dim(),
                self.dim()
            )));
        }
        Ok(())
    }

    /// Candidate-by-candidate rough convergence over `grid`.
    pub fn limit_set(&self, params: &RoughParams, grid: &Grid) -> Result<LimitSetEstimate> {
        Ok(self
            .limit_sets(std::slice::from_ref(params), grid)?
            .pop()
            .expect("one estimate per parameter set"))
    }

    /// Several limit-set estimates from one scan of the grid; every
    /// candidate is counted once against the union of all thresholds.
    pub fn limit_sets(&self, params: &[RoughParams], grid: &Grid) -> Result<Vec<LimitSetEstimate>> {
        self.check_grid(grid)?;
        let mut thresholds: Vec<f64> = Vec::new();
        let slots: Vec<Vec<usize>> = params
            .iter()
            .map(|p| {
                p.eps_ladder
                    .iter()
                    .map(|e| {
                        let t = p.r + e;
                        match thresholds.iter().position(|&u| u == t) {
                            Some(i) => i,
                            None => {
                                thresholds.push(t);
                                thresholds.len() - 1
                            }
                        }
                    })
                    .collect()
            })
            .collect();
        let points = grid.points();
        let per_point: Vec<Vec<ConvergenceVerdict>> = points
            .par_iter()
            .map(|c| {
                let far = self.far_counts(c, &thresholds)?;
                Ok(params
                    .iter()
                    .zip(&slots)
                    .map(|(p, idx)| {
                        let counts = idx.iter().map(|&i| far[i].clone()).collect();
                        self.report_from_counts(c, p, counts).verdict
                    })
                    .collect())
            })
            .collect::<Result<_>>()?;
        Ok(params
            .iter()
            .enumerate()
            .map(|(j, p)| {
                let verdicts: Vec<ConvergenceVerdict> = per_point.iter().map(|v| v[j]).collect();
                self.assemble(grid, &points, verdicts, p)
            })
            .collect())
    }

    fn assemble(
        &self,
        grid: &Grid,
        points: &[Point],
        verdicts: Vec<ConvergenceVerdict>,
        params: &RoughParams,
    ) -> LimitSetEstimate {
        let accepted: Vec<bool> = verdicts
            .iter()
            .map(|v| *v == ConvergenceVerdict::Converges)
            .collect();
        let hull = BoundingBox::of(
            points
                .iter()
                .zip(&accepted)
                .filter_map(|(p, &a)| a.then_some(p)),
        );
        let diameter = grid_diameter(grid, &accepted, self.norm);
        LimitSetEstimate {
            grid: points.to_vec(),
            shape: grid.shape(),
            accepted,
            verdicts,
            hull,
            diameter,
            uncertainty: grid.max_step() + params.eps_min(),
        }
    }

    /// Candidates whose ε-neighbourhood is visited on a set of non-vanishing
    /// α-order density.
    pub fn cluster_points(&self, alpha: f64, eps: f64, grid: &Grid) -> Result<ClusterEstimate> {
        validate_alpha(alpha)?;
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::invalid(format!("cluster eps must be positive, got {eps}")));
        }
        self.check_grid(grid)?;
        let points = grid.points();
        let verdicts: Vec<DensityLimit> = points
            .par_iter()
            .map(|c| {
                let far = self.far_counts(c, &[eps])?.remove(0);
                let near: Vec<u64> = self
                    .cps
                    .values()
                    .iter()
                    .zip(&far)
                    .map(|(n, f)| n - f)
                    .collect();
                Ok(self.rule.decide_counts(&near, &self.cps, alpha).verdict)
            })
            .collect::<Result<_>>()?;
        Ok(ClusterEstimate {
            grid: points,
            shape: grid.shape(),
            positive: verdicts.iter().map(|v| *v == DensityLimit::NonZero).collect(),
            verdicts,
            eps,
            alpha,
        })
    }

    /// First `M` of the schedule whose exceedance set `‖x_k‖ >= M` has
    /// α-order density zero.
    pub fn boundedness(&self, alpha: f64, schedule: &[f64]) -> Result<BoundednessReport> {
        validate_alpha(alpha)?;
        if schedule.is_empty() || schedule.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("M schedule must be nonempty and increasing"));
        }
        let origin = Point::zero(self.dim())?;
        let counts = self.far_counts(&origin, schedule)?;
        let scan: Vec<(f64, DensityVerdict)> = schedule
            .iter()
            .zip(counts)
            .map(|(&m, c)| (m, self.rule.decide_counts(&c, &self.cps, alpha)))
            .collect();
        let result = if let Some((m, _)) = scan.iter().find(|(_, v)| v.verdict == DensityLimit::Zero) {
            Boundedness::Bounded { m: *m }
        } else if scan.iter().all(|(_, v)| v.verdict == DensityLimit::NonZero) {
            Boundedness::NotDetected
        } else {
            Boundedness::Inconclusive
        };
        Ok(BoundednessReport {
            result,
            alpha,
            scan,
        })
    }

    pub fn sorted_segments(&self) -> Result<SortedSegments> {
        SortedSegments::build(&self.sampled, &self.cps)
    }
}

/// Resolution of the statistical limsup/liminf oracle.
pub const ORACLE_DELTA: f64 = 1e-3;

/// Largest `t` such that `{k : x_k > t − δ}` has non-vanishing α-order
/// density, by bisection over the sampled range.
///
/// The switch point of that predicate sits at `limsup + δ`; the returned
/// value is the switch point minus δ. Inconclusive verdicts count as
/// "not non-zero".
pub fn stat_limsup(seg: &SortedSegments, rule: &DecisionRule, alpha: f64) -> Result<f64> {
    validate_alpha(alpha)?;
    let cps = seg.checkpoints();
    let nonzero = |t: f64| rule.decide_counts(&seg.count_above(t - ORACLE_DELTA), cps, alpha).verdict;
    let (min, max) = seg.range();
    let mut lo = min;
    let mut hi = max + 2.0 * ORACLE_DELTA;
    match nonzero(lo) {
        DensityLimit::NonZero => {}
        other => {
            return Err(Error::OracleInconclusive(format!(
                "whole prefix gives verdict {other:?} at alpha {alpha}"
            )))
        }
    }
    bisect(&mut lo, &mut hi, |t| nonzero(t) == DensityLimit::NonZero);
    Ok(0.5 * (lo + hi) - ORACLE_DELTA)
}

/// Mirror of [`stat_limsup`]: smallest `t` with `{k : x_k < t + δ}` of
/// non-vanishing α-order density.
pub fn stat_liminf(seg: &SortedSegments, rule: &DecisionRule, alpha: f64) -> Result<f64> {
    validate_alpha(alpha)?;
    let cps = seg.checkpoints();
    let nonzero = |t: f64| rule.decide_counts(&seg.count_below(t + ORACLE_DELTA), cps, alpha).verdict;
    let (min, max) = seg.range();
    let lo = min - 2.0 * ORACLE_DELTA;
    let hi = max;
    match nonzero(hi) {
        DensityLimit::NonZero => {}
        other => {
            return Err(Error::OracleInconclusive(format!(
                "whole prefix gives verdict {other:?} at alpha {alpha}"
            )))
        }
    }
    // invariant flipped: predicate true at hi, false at lo
    let mut a = -hi;
    let mut b = -lo;
    bisect(&mut a, &mut b, |t| nonzero(-t) == DensityLimit::NonZero);
    Ok(-0.5 * (a + b) + ORACLE_DELTA)
}

/// Shrinks `[lo, hi]` keeping `pred(lo)` true and `pred(hi)` false.
fn bisect(lo: &mut f64, hi: &mut f64, pred: impl Fn(f64) -> bool) {
    for _ in 0..200 {
        if *hi - *lo <= 1e-9 * (1.0 + lo.abs().max(hi.abs())) {
            break;
        }
        let mid = 0.5 * (*lo + *hi);
        if pred(mid) {
            *lo = mid;
        } else {
            *hi = mid;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::DensityVerdict;

    fn outcome(v: DensityLimit) -> EpsOutcome {
        EpsOutcome {
            eps: 0.1,
            counts: vec![],
            density: DensityVerdict {
                ratios: vec![],
                slope: None,
                final_ratio: 0.0,
                verdict: v,
            },
        }
    }

    #[test]
    fn aggregation_rule() {
        use ConvergenceVerdict::*;
        use DensityLimit as D;
        let agg = |vs: &[D]| aggregate(&vs.iter().map(|&v| outcome(v)).collect::<Vec<_>>());
        assert_eq!(agg(&[D::Zero, D::Zero, D::Zero]), Converges);
        assert_eq!(agg(&[D::Zero, D::Inconclusive, D::Zero]), Converges);
        assert_eq!(agg(&[D::Zero, D::Zero, D::NonZero]), Diverges);
        assert_eq!(agg(&[D::NonZero, D::Zero, D::Inconclusive]), Diverges);
        assert_eq!(agg(&[D::Zero, D::Zero, D::Inconclusive]), Inconclusive);
        assert_eq!(agg(&[D::NonZero, D::Zero, D::Zero]), Inconclusive);
    }

    #[test]
    fn m_schedule_caps_at_quarter_horizon() {
        let s = default_m_schedule(1_000_000);
        assert_eq!(s.first(), Some(&1.0));
        assert_eq!(s.last(), Some(&131_072.0));
        assert_eq!(default_m_schedule(1u64 << 30).len(), 21);
    }
}
