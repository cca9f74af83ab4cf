use rayon::prelude::*;

use crate::density::{DecisionRule, DensityLimit};
use crate::error::{Error, Result};
use crate::rough::{
    default_m_schedule, project_toward, scale_sequence, sum_sequences, test_rough_convergence_with,
    unit_direction_sequence, Boundedness, ConvergenceVerdict, Grid, LimitSetEstimate, RoughAnalyzer,
};
use crate::seqdsl::Sequence;
use crate::space::{
    default_checkpoints, validate_alpha, Checkpoints, NormKind, Point, RoughParams,
    DEFAULT_EPS_LADDER,
};

use super::corpus::{Corpus, CorpusEntry};
use super::report::{CaseOutcome, CaseStatus, DiameterFindings, SuiteReport};

pub const DEFAULT_R_SCHEDULE: [f64; 10] = [0.0, 0.5, 1.0, 1.5, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0];
pub const DEFAULT_C_LIST: [f64; 4] = [2.0, -1.0, 0.5, -4.0];
pub const DEFAULT_ALPHA_PAIRS: [(f64, f64); 4] = [(0.4, 0.8), (0.3, 0.4), (0.5, 1.0), (0.25, 0.75)];
pub const DEFAULT_EXPLORE_R: [f64; 3] = [0.5, 1.0, 2.0];
pub const DEFAULT_EXPLORE_ALPHA: [f64; 3] = [0.25, 0.5, 0.75];

/// Horizon used for the index-by-index bad-set comparison.
const INDEX_CHECK_HORIZON: u64 = 100_000;
/// Candidates checked index by index, or projected, per case.
const SAMPLE_CANDIDATES: usize = 16;

/// Prefix length, candidate grid and decision thresholds shared by the
/// suites.
#[derive(Debug, Clone, PartialEq)]
pub struct Budget {
    pub checkpoints: Checkpoints,
    /// Axis template; replicated for 2-D entries.
    pub grid: Grid,
    pub rule: DecisionRule,
}

impl Budget {
    pub fn new(horizon: u64, grid: Grid) -> Result<Self> {
        Ok(Budget {
            checkpoints: default_checkpoints(horizon)?,
            grid,
            rule: DecisionRule::default(),
        })
    }

    pub fn grid_for(&self, dim: usize) -> Result<Grid> {
        self.grid.for_dim(dim)
    }

    pub fn step(&self) -> f64 {
        self.grid.max_step()
    }

    fn analyzer(&self, entry: &CorpusEntry) -> Result<RoughAnalyzer> {
        self.analyzer_for(&entry.spec, entry.norm)
    }

    fn analyzer_for(&self, seq: &dyn Sequence, norm: NormKind) -> Result<RoughAnalyzer> {
        RoughAnalyzer::new(seq, &self.checkpoints, norm)?.with_rule(self.rule)
    }
}

impl Default for Budget {
    /// N = 10^6 and the grid `[-4, 4]` with step 0.05 on every axis.
    fn default() -> Self {
        Budget::new(1_000_000, Grid::cube(1, -4.0, 4.0, 0.05).expect("static grid"))
            .expect("static budget")
    }
}

fn describe(entry: &CorpusEntry, params: &RoughParams) -> String {
    format!("{} r={} alpha={}", entry.name, params.r, params.alpha)
}

fn fmt_point(p: &Point) -> String {
    p.to_string()
}

/// Runs `case` for every entry (in parallel) and keeps corpus order. A
/// dimension above 2 is not applicable; other errors fail the case.
fn per_entry(
    corpus: &Corpus,
    label: impl Fn(&CorpusEntry) -> String + Sync,
    case: impl Fn(&CorpusEntry) -> Result<Vec<CaseOutcome>> + Sync,
) -> Vec<CaseOutcome> {
    corpus
        .entries()
        .par_iter()
        .map(|e| {
            if e.dim() > 2 {
                return vec![CaseOutcome::new(
                    label(e),
                    CaseStatus::NotApplicable,
                    format!("dimension {} exceeds 2", e.dim()),
                )];
            }
            case(e).unwrap_or_else(|err| {
                vec![CaseOutcome::new(label(e), CaseStatus::Fail, format!("error: {err}"))]
            })
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

/// At most `k` items, evenly spaced, always including the first and last.
fn thin<T: Clone>(items: &[T], k: usize) -> Vec<T> {
    if items.len() <= k {
        return items.to_vec();
    }
    (0..k)
        .map(|i| items[i * (items.len() - 1) / (k - 1)].clone())
        .collect()
}

fn accepted_points(est: &LimitSetEstimate) -> Vec<Point> {
    est.accepted_points().cloned().collect()
}

fn points_with(est: &LimitSetEstimate, v: ConvergenceVerdict) -> Vec<&Point> {
    est.grid
        .iter()
        .zip(&est.verdicts)
        .filter_map(|(p, &w)| (w == v).then_some(p))
        .collect()
}

fn check_schedule(values: &[f64], what: &str, allow_zero: bool) -> Result<()> {
    if values.is_empty() {
        return Err(Error::invalid(format!("{what} must be nonempty")));
    }
    if values.iter().any(|&r| !(r.is_finite() && (r > 0.0 || (allow_zero && r == 0.0)))) {
        return Err(Error::invalid(format!("{what} has an invalid value")));
    }
    Ok(())
}

/// Statistical boundedness of order α against non-emptiness of the
/// estimated limit set for some radius of the schedule.
pub fn check_boundedness_equivalence(
    corpus: &Corpus,
    alpha: f64,
    r_schedule: &[f64],
    budget: &Budget,
) -> Result<SuiteReport> {
    validate_alpha(alpha)?;
    check_schedule(r_schedule, "r schedule", true)?;
    if r_schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("r schedule must be increasing"));
    }
    let params: Vec<RoughParams> = r_schedule
        .iter()
        .map(|&r| RoughParams::with_defaults(r, alpha))
        .collect::<Result<_>>()?;
    let label = |e: &CorpusEntry| format!("{} alpha={alpha}", e.name);
    let cases = per_entry(corpus, label, |e| {
        let a = budget.analyzer(e)?;
        let bounded = a.boundedness(alpha, &default_m_schedule(budget.checkpoints.horizon()))?;
        let sets = a.limit_sets(&params, &budget.grid_for(e.dim())?)?;
        let first_nonempty = r_schedule.iter().zip(&sets).find(|(_, s)| !s.is_empty());
        let undecided: usize = sets.iter().map(|s| s.count(ConvergenceVerdict::Inconclusive)).sum();
        let (status, diag) = match (bounded.result, first_nonempty) {
            (Boundedness::Bounded { m }, Some((r, s))) => (
                CaseStatus::Pass,
                format!("bounded (M={m}); limit set nonempty from r={r} ({} points)", s.accepted_points().count()),
            ),
            (Boundedness::Bounded { m }, None) if undecided > 0 => (
                CaseStatus::Inconclusive,
                format!("bounded (M={m}); no accepted candidate, {undecided} inconclusive"),
            ),
            (Boundedness::Bounded { m }, None) => (
                CaseStatus::Fail,
                format!("bounded (M={m}) but every limit set is empty up to r={}", r_schedule[r_schedule.len() - 1]),
            ),
            (Boundedness::NotDetected, Some((r, _))) => (
                CaseStatus::Fail,
                format!("not bounded, yet the limit set is nonempty at r={r}"),
            ),
            (Boundedness::NotDetected, None) if undecided > 0 => (
                CaseStatus::Inconclusive,
                format!("not bounded; sets empty but {undecided} candidates inconclusive"),
            ),
            (Boundedness::NotDetected, None) => (
                CaseStatus::Pass,
                format!("not bounded; every limit set empty up to r={}", r_schedule[r_schedule.len() - 1]),
            ),
            (Boundedness::Inconclusive, _) => (
                CaseStatus::Inconclusive,
                "boundedness verdict inconclusive".to_string(),
            ),
        };
        Ok(vec![CaseOutcome::new(label(e), status, diag)])
    });
    Ok(SuiteReport::new("boundedness", cases))
}

/// Closedness and convexity surrogate: one contiguous run in 1-D, closure
/// under (snapped) midpoints in 2-D.
pub fn check_contiguity(corpus: &Corpus, params: &RoughParams, budget: &Budget) -> Result<SuiteReport> {
    let cases = per_entry(
        corpus,
        |e| describe(e, params),
        |e| {
            let grid = budget.grid_for(e.dim())?;
            let est = budget.analyzer(e)?.limit_set(params, &grid)?;
            let (status, diag) = if est.is_empty() {
                (CaseStatus::Pass, "empty accepted set (vacuous)".to_string())
            } else if e.dim() == 1 {
                run_contiguity(&est)
            } else {
                midpoint_closure(&grid, &est)
            };
            Ok(vec![CaseOutcome::new(describe(e, params), status, diag)])
        },
    );
    Ok(SuiteReport::new("contiguity", cases))
}

fn run_contiguity(est: &LimitSetEstimate) -> (CaseStatus, String) {
    let first = est.accepted.iter().position(|&a| a).expect("nonempty");
    let last = est.accepted.iter().rposition(|&a| a).expect("nonempty");
    let mut diverging = 0;
    let mut undecided = 0;
    for v in &est.verdicts[first..=last] {
        match v {
            ConvergenceVerdict::Converges => {}
            ConvergenceVerdict::Diverges => diverging += 1,
            ConvergenceVerdict::Inconclusive => undecided += 1,
        }
    }
    let span = format!(
        "run [{}, {}] ({} points)",
        est.grid[first],
        est.grid[last],
        last - first + 1
    );
    let status = CaseStatus::from_tallies(diverging, undecided);
    let diag = match status {
        CaseStatus::Pass => span,
        _ => format!("{span}: {diverging} rejected and {undecided} inconclusive gaps"),
    };
    (status, diag)
}

fn midpoint_closure(grid: &Grid, est: &LimitSetEstimate) -> (CaseStatus, String) {
    let idx: Vec<Vec<usize>> = est
        .accepted
        .iter()
        .enumerate()
        .filter(|&(_, &a)| a)
        .map(|(f, _)| grid.unflatten(f))
        .collect();
    let verdict_at = |m: &[usize]| est.verdicts[grid.flatten(m)];
    let (failures, undecided, pairs) = (0..idx.len())
        .into_par_iter()
        .map(|i| {
            let mut fail = 0usize;
            let mut inc = 0usize;
            for j in i + 1..idx.len() {
                let sums: Vec<usize> = idx[i].iter().zip(&idx[j]).map(|(a, b)| a + b).collect();
                let mut snapped: Vec<Vec<usize>> = vec![Vec::new()];
                for s in &sums {
                    let opts: &[usize] = if s % 2 == 0 { &[s / 2] } else { &[s / 2, s / 2 + 1] };
                    snapped = snapped
                        .iter()
                        .flat_map(|pre| {
                            opts.iter().map(move |&o| {
                                let mut v = pre.clone();
                                v.push(o);
                                v
                            })
                        })
                        .collect();
                }
                let verdicts: Vec<ConvergenceVerdict> = snapped.iter().map(|m| verdict_at(m)).collect();
                if verdicts.contains(&ConvergenceVerdict::Converges) {
                    continue;
                }
                if verdicts.contains(&ConvergenceVerdict::Inconclusive) {
                    inc += 1;
                } else {
                    fail += 1;
                }
            }
            (fail, inc, idx.len() - i - 1)
        })
        .reduce(|| (0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    let status = CaseStatus::from_tallies(failures, undecided);
    (
        status,
        format!(
            "{} accepted, {pairs} pairs: {failures} midpoints rejected, {undecided} inconclusive",
            idx.len()
        ),
    )
}

/// Forward: the radial projection toward an accepted ξ stays within r and
/// converges to ξ at radius 0. Converse: a convergent sequence perturbed by
/// r-sized unit steps converges roughly with radius r.
pub fn check_decomposition(corpus: &Corpus, params: &RoughParams, budget: &Budget) -> Result<SuiteReport> {
    if !(params.r.is_finite() && params.r > 0.0) {
        return Err(Error::invalid("decomposition needs r > 0"));
    }
    let exact = params.with_r(0.0)?;
    let cases = per_entry(
        corpus,
        |e| format!("forward {}", describe(e, params)),
        |e| {
            let grid = budget.grid_for(e.dim())?;
            let a = budget.analyzer(e)?;
            let sets = a.limit_sets(&[params.clone(), exact.clone()], &grid)?;
            Ok(vec![
                decomposition_forward(e, &a, &sets[0], params, &exact, budget)?,
                decomposition_converse(e, &sets[1], params, budget)?,
            ])
        },
    );
    Ok(SuiteReport::new("decomposition", cases))
}

fn decomposition_forward(
    e: &CorpusEntry,
    a: &RoughAnalyzer,
    est: &LimitSetEstimate,
    params: &RoughParams,
    exact: &RoughParams,
    budget: &Budget,
) -> Result<CaseOutcome> {
    let label = format!("forward {}", describe(e, params));
    let accepted = accepted_points(est);
    if accepted.is_empty() {
        return Ok(CaseOutcome::new(label, CaseStatus::NotApplicable, "no accepted candidate"));
    }
    let chosen = thin(&accepted, SAMPLE_CANDIDATES);
    let sampled = a.sampled();
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    let mut undecided = 0;
    for xi in &chosen {
        let y = project_toward(sampled, xi, params.r, e.norm)?;
        let mut yk = vec![0.0; e.dim()];
        for (k, xk) in (1..=sampled.horizon()).zip(sampled.points()) {
            y.eval_into(k, &mut yk)?;
            let dx = e.norm.dist(xk, xi.coords());
            let r1 = e.norm.dist(xk, &yk) - params.r;
            let r2 = (e.norm.dist(&yk, xi.coords()) - (dx - params.r).max(0.0)).abs();
            worst = worst.max(r1).max(r2);
        }
        match test_rough_convergence_with(&y, xi, exact, &budget.checkpoints, e.norm, &budget.rule)?.verdict {
            ConvergenceVerdict::Converges => {}
            ConvergenceVerdict::Diverges => failures.push(fmt_point(xi)),
            ConvergenceVerdict::Inconclusive => undecided += 1,
        }
    }
    let contract_ok = worst <= 1e-9;
    let status = CaseStatus::from_tallies(failures.len() + usize::from(!contract_ok), undecided);
    let mut diag = format!(
        "{} of {} accepted candidates projected, max residual {worst:.2e}",
        chosen.len(),
        accepted.len()
    );
    if !failures.is_empty() {
        diag.push_str(&format!("; projection diverges at {}", failures.join(" ")));
    }
    if undecided > 0 {
        diag.push_str(&format!("; {undecided} inconclusive"));
    }
    Ok(CaseOutcome::new(label, status, diag))
}

fn decomposition_converse(
    e: &CorpusEntry,
    exact_set: &LimitSetEstimate,
    params: &RoughParams,
    budget: &Budget,
) -> Result<CaseOutcome> {
    let label = format!("converse {}", describe(e, params));
    let accepted = accepted_points(exact_set);
    if accepted.is_empty() {
        return Ok(CaseOutcome::new(
            label,
            CaseStatus::NotApplicable,
            "no statistical limit on the grid at r=0",
        ));
    }
    let xi = central_point(&accepted, e.norm);
    let perturbed = sum_sequences(&e.spec, &unit_direction_sequence(e.dim(), params.r)?)?;
    let rep = test_rough_convergence_with(&perturbed, &xi, params, &budget.checkpoints, e.norm, &budget.rule)?;
    let status = match rep.verdict {
        ConvergenceVerdict::Converges => CaseStatus::Pass,
        ConvergenceVerdict::Diverges => CaseStatus::Fail,
        ConvergenceVerdict::Inconclusive => CaseStatus::Inconclusive,
    };
    Ok(CaseOutcome::new(
        label,
        status,
        format!("limit {xi} perturbed by r·(±e_i): {:?}", rep.verdict),
    ))
}

/// Accepted point closest to the centroid of the accepted points.
fn central_point(points: &[Point], norm: NormKind) -> Point {
    let dim = points[0].dim();
    let mut c = vec![0.0; dim];
    for p in points {
        for (s, v) in c.iter_mut().zip(p.coords()) {
            *s += v / points.len() as f64;
        }
    }
    points
        .iter()
        .min_by(|a, b| norm.dist(a.coords(), &c).total_cmp(&norm.dist(b.coords(), &c)))
        .expect("nonempty")
        .clone()
}

/// Every cluster candidate lies within r (plus resolution) of every
/// accepted limit candidate.
pub fn check_cluster_distance(corpus: &Corpus, params: &RoughParams, budget: &Budget) -> Result<SuiteReport> {
    let cluster_eps = budget.step();
    let cases = per_entry(
        corpus,
        |e| describe(e, params),
        |e| {
            let grid = budget.grid_for(e.dim())?;
            let a = budget.analyzer(e)?;
            let limits = a.limit_set(params, &grid)?;
            let clusters = a.cluster_points(params.alpha, cluster_eps, &grid)?;
            let tol = params.r + limits.uncertainty + cluster_eps + 1e-9;
            let firm_l = points_with(&limits, ConvergenceVerdict::Converges);
            let open_l = points_with(&limits, ConvergenceVerdict::Inconclusive);
            let firm_c: Vec<&Point> = clusters.positive_points().collect();
            let open_c: Vec<&Point> = clusters
                .grid
                .iter()
                .zip(&clusters.verdicts)
                .filter_map(|(p, &v)| (v == DensityLimit::Inconclusive).then_some(p))
                .collect();
            let max_dist = |ls: &[&Point], cs: &[&Point]| {
                ls.iter()
                    .flat_map(|l| cs.iter().map(move |c| e.norm.dist(l.coords(), c.coords())))
                    .fold(0.0f64, f64::max)
            };
            let firm = max_dist(&firm_l, &firm_c);
            let loose = max_dist(&firm_l, &open_c)
                .max(max_dist(&open_l, &firm_c))
                .max(max_dist(&open_l, &open_c));
            let status = if firm > tol {
                CaseStatus::Fail
            } else if loose > tol {
                CaseStatus::Inconclusive
            } else {
                CaseStatus::Pass
            };
            let diag = if firm_l.is_empty() || firm_c.is_empty() {
                format!(
                    "{} limit and {} cluster candidates (vacuous)",
                    firm_l.len(),
                    firm_c.len()
                )
            } else {
                format!(
                    "max |xi - c| = {firm:.4} <= {tol:.4} over {} limit x {} cluster candidates",
                    firm_l.len(),
                    firm_c.len()
                )
            };
            Ok(vec![CaseOutcome::new(describe(e, params), status, diag)])
        },
    );
    Ok(SuiteReport::new("cluster", cases))
}

/// For noisy sequences around a known centre in the Euclidean plane, the
/// midpoint of a maximal pair of rough limits is an ordinary statistical
/// limit.
pub fn check_midpoint_strict_convexity(
    corpus: &Corpus,
    params: &RoughParams,
    budget: &Budget,
) -> Result<SuiteReport> {
    let exact = params.with_r(0.0)?;
    let eligible: Vec<CorpusEntry> = corpus
        .entries()
        .iter()
        .filter(|e| e.dim() == 2 && e.centre.is_some())
        .cloned()
        .collect();
    let cases = per_entry(
        &Corpus::new(eligible)?,
        |e| describe(e, params),
        |e| {
            let label = describe(e, params);
            if !e.norm.strictly_convex() {
                return Ok(vec![CaseOutcome::new(
                    label,
                    CaseStatus::NotApplicable,
                    format!("norm {} is not strictly convex", e.norm),
                )]);
            }
            let centre = e.centre.clone().expect("filtered");
            let a = budget.analyzer(e)?;
            let est = a.limit_set(params, &budget.grid_for(2)?)?;
            let u = est.uncertainty;
            let pts = accepted_points(&est);
            let best = (0..pts.len())
                .into_par_iter()
                .map(|i| {
                    let mut best = (f64::NEG_INFINITY, i, i);
                    for j in i + 1..pts.len() {
                        let d = e.norm.dist(pts[i].coords(), pts[j].coords());
                        if d > best.0 {
                            best = (d, i, j);
                        }
                    }
                    best
                })
                .reduce(
                    || (f64::NEG_INFINITY, 0, 0),
                    |x, y| if y.0 > x.0 || (y.0 == x.0 && (y.1, y.2) < (x.1, x.2)) { y } else { x },
                );
            let (d, i, j) = best;
            if pts.len() < 2 || d < 2.0 * params.r - 2.0 * u {
                return Ok(vec![CaseOutcome::new(
                    label,
                    CaseStatus::Inconclusive,
                    format!("no accepted pair at distance >= 2r - 2u ({} accepted)", pts.len()),
                )]);
            }
            let mid = pts[i].midpoint(&pts[j])?;
            let verdict = a.verdict(&mid, &exact)?;
            let off = e.norm.dist(mid.coords(), centre.coords());
            let status = match verdict {
                ConvergenceVerdict::Converges if off <= u => CaseStatus::Pass,
                ConvergenceVerdict::Inconclusive if off <= u => CaseStatus::Inconclusive,
                _ => CaseStatus::Fail,
            };
            Ok(vec![CaseOutcome::new(
                label,
                status,
                format!(
                    "pair {} {} at distance {d:.4}; midpoint {mid}: {verdict:?}, {off:.2e} from centre",
                    pts[i], pts[j]
                ),
            )])
        },
    );
    Ok(SuiteReport::new("midpoint", cases))
}

/// Radius-covariant linearity: exact bad-set identity under scaling, and
/// soundness of sums with added radii.
pub fn check_linearity(
    corpus: &Corpus,
    params: &RoughParams,
    c_list: &[f64],
    budget: &Budget,
) -> Result<SuiteReport> {
    if c_list.is_empty() || c_list.iter().any(|c| !c.is_finite()) {
        return Err(Error::invalid("c list must be nonempty and finite"));
    }
    let cases = per_entry(
        corpus,
        |e| describe(e, params),
        |e| {
            let a = budget.analyzer(e)?;
            let mut out = Vec::new();
            for &c in c_list {
                out.push(scaling_case(e, &a, params, c, budget)?);
            }
            out.extend(sum_cases(e, corpus, &a, params, budget)?);
            Ok(out)
        },
    );
    Ok(SuiteReport::new("linearity", cases))
}

fn scaling_case(
    e: &CorpusEntry,
    a: &RoughAnalyzer,
    params: &RoughParams,
    c: f64,
    budget: &Budget,
) -> Result<CaseOutcome> {
    let label = format!("scale c={c} {}", describe(e, params));
    let scaled = scale_sequence(&e.spec, c)?;
    if c == 0.0 {
        let origin = Point::zero(e.dim())?;
        let rep = test_rough_convergence_with(&scaled, &origin, params, &budget.checkpoints, e.norm, &budget.rule)?;
        let status = if rep.verdict == ConvergenceVerdict::Converges {
            CaseStatus::Pass
        } else {
            CaseStatus::Fail
        };
        return Ok(CaseOutcome::new(label, status, format!("0·x at the origin: {:?}", rep.verdict)));
    }
    let b = budget.analyzer_for(&scaled, e.norm)?;
    let cparams = RoughParams::new(
        params.r * c.abs(),
        params.alpha,
        params.eps_ladder.iter().map(|x| x * c.abs()).collect(),
    )?;
    let grid = budget.grid_for(e.dim())?.points();
    let mismatches: Vec<String> = grid
        .par_iter()
        .map(|xi| {
            let lhs = a.bad_counts(xi, params.r, &params.eps_ladder)?;
            let rhs = b.bad_counts(&xi.scale(c)?, cparams.r, &cparams.eps_ladder)?;
            Ok((lhs != rhs).then(|| fmt_point(xi)))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    // index by index on a thinned candidate set
    let horizon = INDEX_CHECK_HORIZON.min(budget.checkpoints.horizon());
    let mut index_mismatch = 0usize;
    for xi in thin(&grid, SAMPLE_CANDIDATES) {
        let cxi = xi.scale(c)?;
        for k in 1..=horizon {
            let xk = a.sampled().point(k);
            let yk = b.sampled().point(k);
            let dx = e.norm.dist(xk, xi.coords());
            let dy = e.norm.dist(yk, cxi.coords());
            for (eps, ceps) in params.eps_ladder.iter().zip(&cparams.eps_ladder) {
                if (dx >= params.r + eps) != (dy >= cparams.r + ceps) {
                    index_mismatch += 1;
                }
            }
        }
    }
    let status = CaseStatus::from_tallies(mismatches.len() + index_mismatch, 0);
    let mut diag = format!(
        "{} candidates, bad-set counts identical at r*|c|; {} candidates checked index by index to {horizon}",
        grid.len(),
        SAMPLE_CANDIDATES.min(grid.len())
    );
    if status == CaseStatus::Fail {
        diag = format!(
            "{} count mismatches (first: {}), {index_mismatch} index mismatches",
            mismatches.len(),
            mismatches.first().map(String::as_str).unwrap_or("-")
        );
    }
    Ok(CaseOutcome::new(label, status, diag))
}

fn sum_cases(
    e: &CorpusEntry,
    corpus: &Corpus,
    a: &RoughAnalyzer,
    params: &RoughParams,
    budget: &Budget,
) -> Result<Vec<CaseOutcome>> {
    let mut partners: Vec<&CorpusEntry> = vec![e];
    if let Some(k) = corpus
        .entries()
        .iter()
        .find(|o| o.dim() == e.dim() && o.name != e.name && o.name.starts_with("CONST"))
    {
        partners.push(k);
    }
    let grid = budget.grid_for(e.dim())?;
    let lx = accepted_points(&a.limit_set(params, &grid)?);
    let mut out = Vec::new();
    for partner in partners {
        let b = budget.analyzer_for(&partner.spec, e.norm)?;
        let sum = sum_sequences(&e.spec, &partner.spec)?;
        let s = budget.analyzer_for(&sum, e.norm)?;
        for r2 in [0.0, params.r] {
            let label = format!("sum {} + {} r1={} r2={r2} alpha={}", e.name, partner.name, params.r, params.alpha);
            let py = params.with_r(r2)?;
            let ly = accepted_points(&b.limit_set(&py, &grid)?);
            if lx.is_empty() || ly.is_empty() {
                out.push(CaseOutcome::new(label, CaseStatus::NotApplicable, "a summand has no accepted candidate"));
                continue;
            }
            let psum = RoughParams::new(
                params.r + r2,
                params.alpha,
                params.eps_ladder.iter().map(|x| 2.0 * x).collect(),
            )?;
            let mut fail = 0;
            let mut inc = 0;
            let mut tried = 0;
            for xi in thin(&lx, 4) {
                for eta in thin(&ly, 4) {
                    tried += 1;
                    match s.verdict(&xi.add(&eta)?, &psum)? {
                        ConvergenceVerdict::Converges => {}
                        ConvergenceVerdict::Diverges => fail += 1,
                        ConvergenceVerdict::Inconclusive => inc += 1,
                    }
                }
            }
            out.push(CaseOutcome::new(
                label,
                CaseStatus::from_tallies(fail, inc),
                format!("{tried} sums xi+eta: {fail} rejected, {inc} inconclusive (ladder doubled)"),
            ));
        }
    }
    Ok(out)
}

/// Inclusion of convergence classes: acceptance at order α implies
/// acceptance at every larger order β.
pub fn check_order_monotonicity(
    corpus: &Corpus,
    params: &RoughParams,
    alpha_pairs: &[(f64, f64)],
    budget: &Budget,
) -> Result<SuiteReport> {
    for &(al, be) in alpha_pairs {
        validate_alpha(al)?;
        validate_alpha(be)?;
        if al > be {
            return Err(Error::invalid(format!("alpha pair ({al}, {be}) is not ordered")));
        }
    }
    let cases = per_entry(
        corpus,
        |e| describe(e, params),
        |e| {
            let a = budget.analyzer(e)?;
            let grid = budget.grid_for(e.dim())?.points();
            let counts: Vec<Vec<Vec<u64>>> = grid
                .par_iter()
                .map(|xi| a.bad_counts(xi, params.r, &params.eps_ladder))
                .collect::<Result<_>>()?;
            let mut out = Vec::new();
            for &(al, be) in alpha_pairs {
                let (pa, pb) = (params.with_alpha(al)?, params.with_alpha(be)?);
                let mut conv = (0usize, 0usize);
                let mut fail = 0usize;
                let mut inc = 0usize;
                for (xi, c) in grid.iter().zip(&counts) {
                    let ra = a.report_from_counts(xi, &pa, c.clone());
                    let rb = a.report_from_counts(xi, &pb, c.clone());
                    conv.0 += usize::from(ra.verdict == ConvergenceVerdict::Converges);
                    conv.1 += usize::from(rb.verdict == ConvergenceVerdict::Converges);
                    let eps_violation = ra.per_eps.iter().zip(&rb.per_eps).any(|(x, y)| {
                        x.density.verdict == DensityLimit::Zero && y.density.verdict == DensityLimit::NonZero
                    });
                    if eps_violation {
                        fail += 1;
                    } else if ra.verdict == ConvergenceVerdict::Converges {
                        match rb.verdict {
                            ConvergenceVerdict::Converges => {}
                            ConvergenceVerdict::Diverges => fail += 1,
                            ConvergenceVerdict::Inconclusive => inc += 1,
                        }
                    }
                }
                out.push(CaseOutcome::new(
                    format!("{} r={} alpha {al} <= {be}", e.name, params.r),
                    CaseStatus::from_tallies(fail, inc),
                    format!(
                        "accepted {} at {al}, {} at {be}; {fail} violations, {inc} inconclusive",
                        conv.0, conv.1
                    ),
                ));
            }
            Ok(out)
        },
    );
    Ok(SuiteReport::new("monotonicity", cases))
}

/// Records diameter / 2r for every nonempty estimate; flags ratios above
/// `1 + uncertainty / r`. Exploration output, not a gate.
pub fn explore_diameter(
    corpus: &Corpus,
    r_list: &[f64],
    alpha_list: &[f64],
    budget: &Budget,
) -> Result<SuiteReport> {
    check_schedule(r_list, "r list", false)?;
    if alpha_list.is_empty() {
        return Err(Error::invalid("alpha list must be nonempty"));
    }
    for &al in alpha_list {
        validate_alpha(al)?;
    }
    let params: Vec<RoughParams> = r_list
        .iter()
        .flat_map(|&r| alpha_list.iter().map(move |&al| (r, al)))
        .map(|(r, al)| RoughParams::new(r, al, DEFAULT_EPS_LADDER.to_vec()))
        .collect::<Result<_>>()?;
    let rows: Vec<Vec<(CaseOutcome, Option<f64>, bool)>> = corpus
        .entries()
        .par_iter()
        .map(|e| {
            let label = |p: &RoughParams| describe(e, p);
            if e.dim() > 2 {
                return vec![(
                    CaseOutcome::new(e.name.clone(), CaseStatus::NotApplicable, "dimension exceeds 2"),
                    None,
                    false,
                )];
            }
            let sets = budget
                .analyzer(e)
                .and_then(|a| a.limit_sets(&params, &budget.grid_for(e.dim())?));
            match sets {
                Err(err) => vec![(
                    CaseOutcome::new(e.name.clone(), CaseStatus::Fail, format!("error: {err}")),
                    None,
                    false,
                )],
                Ok(sets) => params
                    .iter()
                    .zip(sets)
                    .map(|(p, s)| {
                        if s.is_empty() {
                            return (
                                CaseOutcome::new(label(p), CaseStatus::NotApplicable, "empty accepted set"),
                                None,
                                false,
                            );
                        }
                        let ratio = s.diameter / (2.0 * p.r);
                        let flagged = ratio > 1.0 + s.uncertainty / p.r;
                        let diag = format!(
                            "diameter {:.4}, ratio {ratio:.4}{}",
                            s.diameter,
                            if flagged { "  FLAGGED" } else { "" }
                        );
                        (CaseOutcome::new(label(p), CaseStatus::Pass, diag), Some(ratio), flagged)
                    })
                    .collect(),
            }
        })
        .collect();
    let rows: Vec<_> = rows.into_iter().flatten().collect();
    let mut max: Option<(f64, String)> = None;
    let mut flagged = Vec::new();
    for (case, ratio, flag) in &rows {
        if let Some(r) = ratio {
            if max.as_ref().is_none_or(|(m, _)| r > m) {
                max = Some((*r, case.description.clone()));
            }
        }
        if *flag {
            flagged.push(case.description.clone());
        }
    }
    let mut report = SuiteReport::new("explore_diameter", rows.into_iter().map(|r| r.0).collect());
    report.findings = Some(DiameterFindings {
        max_ratio: max.as_ref().map(|m| m.0),
        max_case: max.map(|m| m.1),
        flagged,
    });
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SuiteName {
    Boundedness,
    Contiguity,
    Decomposition,
    Cluster,
    Midpoint,
    Linearity,
    Monotonicity,
}

impl SuiteName {
    pub const ALL: [SuiteName; 7] = [
        SuiteName::Boundedness,
        SuiteName::Contiguity,
        SuiteName::Decomposition,
        SuiteName::Cluster,
        SuiteName::Midpoint,
        SuiteName::Linearity,
        SuiteName::Monotonicity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SuiteName::Boundedness => "boundedness",
            SuiteName::Contiguity => "contiguity",
            SuiteName::Decomposition => "decomposition",
            SuiteName::Cluster => "cluster",
            SuiteName::Midpoint => "midpoint",
            SuiteName::Linearity => "linearity",
            SuiteName::Monotonicity => "monotonicity",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        SuiteName::ALL.into_iter().find(|n| n.name() == s)
    }
}

/// Runs one suite with its default auxiliary parameters (r schedule, c
/// list, α pairs) and the given radius and order.
pub fn run_suite(name: SuiteName, corpus: &Corpus, params: &RoughParams, budget: &Budget) -> Result<SuiteReport> {
    match name {
        SuiteName::Boundedness => check_boundedness_equivalence(corpus, params.alpha, &DEFAULT_R_SCHEDULE, budget),
        SuiteName::Contiguity => check_contiguity(corpus, params, budget),
        SuiteName::Decomposition => check_decomposition(corpus, params, budget),
        SuiteName::Cluster => check_cluster_distance(corpus, params, budget),
        SuiteName::Midpoint => check_midpoint_strict_convexity(corpus, params, budget),
        SuiteName::Linearity => check_linearity(corpus, params, &DEFAULT_C_LIST, budget),
        SuiteName::Monotonicity => check_order_monotonicity(corpus, params, &DEFAULT_ALPHA_PAIRS, budget),
    }
}
