//! Rough statistical convergence of order α: per-candidate tests, grid
//! estimates of the limit set and cluster points, statistical boundedness,
//! and sequence transforms.
//!
//! A candidate ξ is accepted for radius `r` when, for every ε of the
//! ladder, the bad set `{k <= n : ‖x_k − ξ‖ >= r + ε}` has α-order density
//! zero according to the decision rule of [`crate::density`].

mod analyzer;
mod grid;
mod sample;
mod transform;

pub use analyzer::{
    aggregate, default_m_schedule, stat_liminf, stat_limsup, Boundedness, BoundednessReport,
    ClusterEstimate, ConvergenceReport, ConvergenceVerdict, EpsOutcome, LimitSetEstimate,
    RoughAnalyzer, ORACLE_DELTA,
};
pub use grid::{grid_diameter, Axis, BoundingBox, Grid};
pub use sample::{count_far_naive, ProximityIndex, Sampled, SortedSegments};
pub use transform::{
    project_point, project_toward, restrict_to_ap, scale_sequence, sum_sequences,
    unit_direction_sequence, ProjectedSequence,
};

use crate::density::DecisionRule;
use crate::error::{Error, Result};
use crate::seqdsl::Sequence;
use crate::space::{Checkpoints, NormKind, Point, RoughParams};

/// Single-candidate test; streams the prefix without storing it.
pub fn test_rough_convergence(
    x: &dyn Sequence,
    xi: &Point,
    params: &RoughParams,
    cps: &Checkpoints,
    norm: NormKind,
) -> Result<ConvergenceReport> {
    test_rough_convergence_with(x, xi, params, cps, norm, &DecisionRule::default())
}

pub fn test_rough_convergence_with(
    x: &dyn Sequence,
    xi: &Point,
    params: &RoughParams,
    cps: &Checkpoints,
    norm: NormKind,
    rule: &DecisionRule,
) -> Result<ConvergenceReport> {
    if x.dim() != xi.dim() {
        return Err(Error::invalid(format!(
            "dimension mismatch: sequence has dim {}, xi has dim {}",
            x.dim(),
            xi.dim()
        )));
    }
    rule.validate()?;
    let thresholds: Vec<f64> = params.eps_ladder.iter().map(|e| params.r + e).collect();
    let mut counts = vec![Vec::with_capacity(cps.len()); thresholds.len()];
    let mut running = vec![0u64; thresholds.len()];
    let mut buf = vec![0.0; x.dim()];
    let mut k = 1u64;
    for &n in cps.values() {
        while k <= n {
            x.eval_into(k, &mut buf)?;
            let d = norm.dist(&buf, xi.coords());
            for (c, &t) in running.iter_mut().zip(&thresholds) {
                if d >= t {
                    *c += 1;
                }
            }
            k += 1;
        }
        for (col, &c) in counts.iter_mut().zip(&running) {
            col.push(c);
        }
    }
    let per_eps: Vec<EpsOutcome> = params
        .eps_ladder
        .iter()
        .zip(counts)
        .map(|(&eps, counts)| EpsOutcome {
            eps,
            density: rule.decide_counts(&counts, cps, params.alpha),
            counts,
        })
        .collect();
    Ok(ConvergenceReport {
        xi: xi.clone(),
        params: params.clone(),
        checkpoints: cps.clone(),
        verdict: aggregate(&per_eps),
        per_eps,
    })
}

fn require_grid_dim(x: &dyn Sequence) -> Result<()> {
    if x.dim() > 2 {
        Err(Error::UnsupportedDimension(x.dim()))
    } else {
        Ok(())
    }
}

pub fn estimate_limit_set(
    x: &dyn Sequence,
    params: &RoughParams,
    cps: &Checkpoints,
    norm: NormKind,
    grid: &Grid,
) -> Result<LimitSetEstimate> {
    require_grid_dim(x)?;
    RoughAnalyzer::new(x, cps, norm)?.limit_set(params, grid)
}

pub fn estimate_cluster_points(
    x: &dyn Sequence,
    alpha: f64,
    eps: f64,
    cps: &Checkpoints,
    norm: NormKind,
    grid: &Grid,
) -> Result<ClusterEstimate> {
    require_grid_dim(x)?;
    RoughAnalyzer::new(x, cps, norm)?.cluster_points(alpha, eps, grid)
}

pub fn is_statistically_bounded(
    x: &dyn Sequence,
    alpha: f64,
    cps: &Checkpoints,
    norm: NormKind,
    m_schedule: &[f64],
) -> Result<BoundednessReport> {
    RoughAnalyzer::new(x, cps, norm)?.boundedness(alpha, m_schedule)
}

fn segments_1d(x: &dyn Sequence, cps: &Checkpoints) -> Result<SortedSegments> {
    if x.dim() != 1 {
        return Err(Error::invalid(format!(
            "limsup/liminf oracle needs a 1-D sequence, got dim {}",
            x.dim()
        )));
    }
    SortedSegments::build(&Sampled::from_sequence(x, cps.horizon())?, cps)
}

pub fn stat_limsup_alpha(x: &dyn Sequence, alpha: f64, cps: &Checkpoints) -> Result<f64> {
    stat_limsup(&segments_1d(x, cps)?, &DecisionRule::default(), alpha)
}

pub fn stat_liminf_alpha(x: &dyn Sequence, alpha: f64, cps: &Checkpoints) -> Result<f64> {
    stat_liminf(&segments_1d(x, cps)?, &DecisionRule::default(), alpha)
}

#[cfg(test)]
mod tests;
