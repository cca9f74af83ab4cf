use std::fmt::Write as _;
use std::fs::File;
use std::io;

use rough_stat::density::{prefix_counts, write_ratios_csv, DecisionRule, DensityLimit, DensityVerdict};
use rough_stat::rough::{
    default_m_schedule, project_toward, test_rough_convergence_with, Boundedness, ConvergenceReport,
    ConvergenceVerdict, Grid, RoughAnalyzer, Sampled,
};
use rough_stat::seqdsl::{parse_predicate, resolve_sequence, Sequence, SequenceSpec};
use rough_stat::space::{default_checkpoints, validate_alpha, Checkpoints, NormKind, Point, RoughParams};
use rough_stat::verify::{explore_diameter, run_suite, Budget, Corpus, SuiteName, SuiteReport};
use rough_stat::Error;
use serde_json::{json, Value};

use crate::args::{
    BoundedArgs, ClusterArgs, Command, ConvergeArgs, DensityArgs, ExploreArgs, LimitSetArgs, ProjectArgs,
    SuiteArg, VerifyArgs,
};
use crate::output::{CsvTable, Headline, Outcome};

#[derive(Debug)]
pub enum CliError {
    /// A library error; `input` is the text a parse error offset refers to.
    Core { error: Error, input: Option<String> },
    Io(io::Error),
}

impl From<Error> for CliError {
    fn from(error: Error) -> Self {
        CliError::Core { error, input: None }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    fn with_input(error: Error, input: &str) -> Self {
        CliError::Core {
            error,
            input: Some(input.to_string()),
        }
    }

    /// The message plus, for parse errors, the input with a caret under the
    /// offending byte.
    pub fn render(&self) -> String {
        match self {
            CliError::Io(e) => format!("error: {e}\n"),
            CliError::Core { error, input } => {
                let mut out = format!("error: {error}\n");
                if let (Error::Parse(p), Some(text)) = (error, input) {
                    let offset = p.offset.min(text.len());
                    let col = text
                        .char_indices()
                        .take_while(|(i, _)| *i < offset)
                        .count();
                    let _ = writeln!(out, "  {text}");
                    let _ = writeln!(out, "  {}^", " ".repeat(col));
                }
                out
            }
        }
    }
}

type CmdResult = Result<Outcome, CliError>;

pub fn run(command: &Command, rule: &DecisionRule) -> CmdResult {
    rule.validate()?;
    match command {
        Command::Density(a) => density(a, rule),
        Command::Converge(a) => converge(a, rule),
        Command::Limitset(a) => limitset(a, rule),
        Command::Cluster(a) => cluster(a, rule),
        Command::Bounded(a) => bounded(a, rule),
        Command::Project(a) => project(a, rule),
        Command::Verify(a) => verify(a, rule),
        Command::ExploreDiameter(a) => explore(a, rule),
    }
}

fn load_seq(text: &str) -> Result<SequenceSpec, CliError> {
    resolve_sequence(text).map_err(|e| CliError::with_input(e, text))
}

fn load_point(text: &str, dim: usize) -> Result<Point, CliError> {
    let p: Point = text.parse()?;
    if p.dim() != dim {
        return Err(Error::InvalidInput(format!(
            "xi has dim {} but the sequence has dim {dim}",
            p.dim()
        ))
        .into());
    }
    Ok(p)
}

fn load_grid(text: &str, dim: usize) -> Result<Grid, CliError> {
    if dim > 2 {
        return Err(Error::UnsupportedDimension(dim).into());
    }
    let grid: Grid = text.parse()?;
    match grid.dim() {
        1 => Ok(grid.for_dim(dim)?),
        d if d == dim => Ok(grid),
        d => Err(Error::InvalidInput(format!("grid has {d} axes but the sequence has dim {dim}")).into()),
    }
}

fn load_corpus(path: Option<&std::path::Path>) -> Result<Corpus, CliError> {
    Ok(match path {
        Some(p) => Corpus::from_file(p)?,
        None => Corpus::builtin(),
    })
}

fn analyzer(seq: &SequenceSpec, cps: &Checkpoints, norm: NormKind, rule: &DecisionRule) -> Result<RoughAnalyzer, CliError> {
    Ok(RoughAnalyzer::new(seq, cps, norm)?.with_rule(*rule)?)
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn fmt_slope(s: Option<f64>) -> String {
    s.map_or_else(|| "-".to_string(), |s| format!("{s:.4}"))
}

fn fmt_coords(c: &[f64]) -> String {
    c.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

fn density_headline(v: DensityLimit) -> Headline {
    match v {
        DensityLimit::Zero => Headline::Positive,
        DensityLimit::NonZero => Headline::Negative,
        DensityLimit::Inconclusive => Headline::Inconclusive,
    }
}

fn convergence_headline(v: ConvergenceVerdict) -> Headline {
    match v {
        ConvergenceVerdict::Converges => Headline::Positive,
        ConvergenceVerdict::Diverges => Headline::Negative,
        ConvergenceVerdict::Inconclusive => Headline::Inconclusive,
    }
}

/// Positive when something was found, otherwise negative unless undecided
/// candidates remain.
fn set_headline(found: usize, undecided: usize) -> Headline {
    if found > 0 {
        Headline::Positive
    } else if undecided > 0 {
        Headline::Inconclusive
    } else {
        Headline::Negative
    }
}

fn ratio_rows(table: &mut String, cps: &Checkpoints, counts: &[u64], v: &DensityVerdict) {
    let _ = writeln!(table, "  {:>12}  {:>12}  {:>14}", "n", "count", "ratio");
    for ((n, c), r) in cps.values().iter().zip(counts).zip(&v.ratios) {
        let _ = writeln!(table, "  {n:>12}  {c:>12}  {r:>14.6}");
    }
}

fn density(a: &DensityArgs, rule: &DecisionRule) -> CmdResult {
    let pred = parse_predicate(&a.pred).map_err(|e| CliError::with_input(e.into(), &a.pred))?;
    validate_alpha(a.alpha)?;
    let cps = default_checkpoints(a.horizon.n)?;
    let pc = prefix_counts(&pred, &cps)?;
    let v = rule.decide_counts(&pc.counts, &cps, a.alpha);
    if let Some(path) = &a.dump_ratios {
        write_ratios_csv(File::create(path)?, &cps, &pc.counts, &v.ratios)?;
    }

    let mut table = format!("predicate: {pred}\nalpha: {}\n", a.alpha);
    ratio_rows(&mut table, &cps, &pc.counts, &v);
    let _ = writeln!(
        table,
        "slope: {}  final ratio: {:.6}\nverdict: {:?}",
        fmt_slope(v.slope),
        v.final_ratio,
        v.verdict
    );
    let mut csv = CsvTable::new(&["n", "count", "ratio"]);
    for ((n, c), r) in cps.values().iter().zip(&pc.counts).zip(&v.ratios) {
        csv.push(vec![n.to_string(), c.to_string(), r.to_string()]);
    }
    Ok(Outcome {
        headline: density_headline(v.verdict),
        result: json!({
            "predicate": pred.to_string(),
            "alpha": a.alpha,
            "checkpoints": cps.values(),
            "counts": pc.counts,
            "density": to_value(&v),
        }),
        table,
        csv,
    })
}

fn convergence_csv(report: &ConvergenceReport) -> CsvTable {
    let mut csv = CsvTable::new(&["eps", "n", "count", "ratio"]);
    for o in &report.per_eps {
        for ((n, c), r) in report.checkpoints.values().iter().zip(&o.counts).zip(&o.density.ratios) {
            csv.push(vec![o.eps.to_string(), n.to_string(), c.to_string(), r.to_string()]);
        }
    }
    csv
}

fn convergence_table(seq: &SequenceSpec, norm: NormKind, report: &ConvergenceReport) -> String {
    let p = &report.params;
    let mut t = format!(
        "sequence: {}\nnorm: {norm}  xi: {}  r: {}  alpha: {}  N: {}\n",
        seq.source_text(),
        report.xi,
        p.r,
        p.alpha,
        report.checkpoints.horizon()
    );
    let _ = writeln!(
        t,
        "  {:>8}  {:>10}  {:>12}  {:>12}  {:>9}  VERDICT",
        "eps", "threshold", "bad count", "final ratio", "slope"
    );
    for o in &report.per_eps {
        let _ = writeln!(
            t,
            "  {:>8}  {:>10}  {:>12}  {:>12.6}  {:>9}  {:?}",
            o.eps,
            p.r + o.eps,
            o.counts.last().copied().unwrap_or(0),
            o.density.final_ratio,
            fmt_slope(o.density.slope),
            o.density.verdict
        );
    }
    let _ = writeln!(t, "verdict: {:?}", report.verdict);
    t
}

fn converge(a: &ConvergeArgs, rule: &DecisionRule) -> CmdResult {
    let seq = load_seq(&a.seq.seq)?;
    let xi = load_point(&a.xi, seq.dim())?;
    let params = RoughParams::new(a.r, a.alpha, a.ladder.eps.clone())?;
    let cps = default_checkpoints(a.horizon.n)?;
    let report = test_rough_convergence_with(&seq, &xi, &params, &cps, a.seq.norm, rule)?;
    let csv = convergence_csv(&report);
    if let Some(path) = &a.dump_ratios {
        csv.write_file(path)?;
    }
    Ok(Outcome {
        headline: convergence_headline(report.verdict),
        table: convergence_table(&seq, a.seq.norm, &report),
        result: json!({ "sequence": seq.source_text(), "report": to_value(&report) }),
        csv,
    })
}

/// Maximal runs of accepted indices along a 1-D grid, as closed intervals.
fn runs(points: &[Point], flags: &[bool]) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    let mut prev = false;
    for (p, &f) in points.iter().zip(flags) {
        let v = p.coords()[0];
        match (f, prev) {
            (true, true) => out.last_mut().expect("open run").1 = v,
            (true, false) => out.push((v, v)),
            _ => {}
        }
        prev = f;
    }
    out
}

fn describe_set(t: &mut String, points: &[Point], flags: &[bool]) {
    if points.first().is_some_and(|p| p.dim() == 1) {
        let parts: Vec<String> = runs(points, flags)
            .iter()
            .map(|(lo, hi)| format!("[{lo}, {hi}]"))
            .collect();
        if !parts.is_empty() {
            let _ = writeln!(t, "intervals: {}", parts.join(" ∪ "));
        }
    }
}

fn limitset(a: &LimitSetArgs, rule: &DecisionRule) -> CmdResult {
    let seq = load_seq(&a.seq.seq)?;
    let grid = load_grid(&a.grid.grid, seq.dim())?;
    let params = RoughParams::new(a.r, a.alpha, a.ladder.eps.clone())?;
    let cps = default_checkpoints(a.horizon.n)?;
    let est = analyzer(&seq, &cps, a.seq.norm, rule)?.limit_set(&params, &grid)?;

    let accepted = est.accepted.iter().filter(|&&x| x).count();
    let undecided = est.count(ConvergenceVerdict::Inconclusive);
    let mut t = format!(
        "sequence: {}\nnorm: {}  r: {}  alpha: {}  grid: {}  N: {}\n",
        seq.source_text(),
        a.seq.norm,
        a.r,
        a.alpha,
        a.grid.grid,
        cps.horizon()
    );
    let _ = writeln!(
        t,
        "candidates: {}  accepted: {accepted}  diverges: {}  inconclusive: {undecided}",
        est.grid.len(),
        est.count(ConvergenceVerdict::Diverges)
    );
    match &est.hull {
        None => {
            let _ = writeln!(t, "limit set: empty");
        }
        Some(h) => {
            let _ = writeln!(t, "hull: lo ({}) hi ({})", fmt_coords(&h.lo), fmt_coords(&h.hi));
            describe_set(&mut t, &est.grid, &est.accepted);
            let _ = writeln!(t, "diameter: {:.6}  uncertainty: {:.6}", est.diameter, est.uncertainty);
        }
    }
    let mut header: Vec<String> = (1..=seq.dim()).map(|i| format!("x{i}")).collect();
    header.extend(["verdict".to_string(), "accepted".to_string()]);
    let mut csv = CsvTable {
        header,
        rows: Vec::new(),
    };
    for ((p, v), acc) in est.grid.iter().zip(&est.verdicts).zip(&est.accepted) {
        let mut row: Vec<String> = p.coords().iter().map(|c| c.to_string()).collect();
        row.extend([format!("{v:?}"), acc.to_string()]);
        csv.push(row);
    }
    Ok(Outcome {
        headline: set_headline(accepted, undecided),
        result: json!({
            "sequence": seq.source_text(),
            "empty": est.is_empty(),
            "accepted_count": accepted,
            "estimate": to_value(&est),
        }),
        table: t,
        csv,
    })
}

fn cluster(a: &ClusterArgs, rule: &DecisionRule) -> CmdResult {
    let seq = load_seq(&a.seq.seq)?;
    let grid = load_grid(&a.grid.grid, seq.dim())?;
    let cps = default_checkpoints(a.horizon.n)?;
    let est = analyzer(&seq, &cps, a.seq.norm, rule)?.cluster_points(a.alpha, a.eps, &grid)?;

    let positive = est.positive.iter().filter(|&&x| x).count();
    let undecided = est.verdicts.iter().filter(|&&v| v == DensityLimit::Inconclusive).count();
    let mut t = format!(
        "sequence: {}\nnorm: {}  alpha: {}  eps: {}  grid: {}  N: {}\n",
        seq.source_text(),
        a.seq.norm,
        a.alpha,
        a.eps,
        a.grid.grid,
        cps.horizon()
    );
    let _ = writeln!(
        t,
        "candidates: {}  cluster points: {positive}  inconclusive: {undecided}",
        est.grid.len()
    );
    if positive == 0 {
        let _ = writeln!(t, "no cluster point found");
    } else {
        describe_set(&mut t, &est.grid, &est.positive);
        if seq.dim() > 1 {
            for p in est.positive_points() {
                let _ = writeln!(t, "  {p}");
            }
        }
    }
    let mut header: Vec<String> = (1..=seq.dim()).map(|i| format!("x{i}")).collect();
    header.extend(["density".to_string(), "cluster_point".to_string()]);
    let mut csv = CsvTable {
        header,
        rows: Vec::new(),
    };
    for ((p, v), pos) in est.grid.iter().zip(&est.verdicts).zip(&est.positive) {
        let mut row: Vec<String> = p.coords().iter().map(|c| c.to_string()).collect();
        row.extend([format!("{v:?}"), pos.to_string()]);
        csv.push(row);
    }
    Ok(Outcome {
        headline: set_headline(positive, undecided),
        result: json!({
            "sequence": seq.source_text(),
            "cluster_point_count": positive,
            "estimate": to_value(&est),
        }),
        table: t,
        csv,
    })
}

fn bounded(a: &BoundedArgs, rule: &DecisionRule) -> CmdResult {
    let seq = load_seq(&a.seq.seq)?;
    let cps = default_checkpoints(a.horizon.n)?;
    let schedule = a
        .m_schedule
        .clone()
        .unwrap_or_else(|| default_m_schedule(cps.horizon()));
    let report = analyzer(&seq, &cps, a.seq.norm, rule)?.boundedness(a.alpha, &schedule)?;

    let mut t = format!(
        "sequence: {}\nnorm: {}  alpha: {}  N: {}\n",
        seq.source_text(),
        a.seq.norm,
        a.alpha,
        cps.horizon()
    );
    let _ = writeln!(t, "  {:>10}  {:>12}  {:>9}  VERDICT", "M", "final ratio", "slope");
    let mut csv = CsvTable::new(&["m", "final_ratio", "slope", "verdict"]);
    for (m, v) in &report.scan {
        let _ = writeln!(
            t,
            "  {m:>10}  {:>12.6}  {:>9}  {:?}",
            v.final_ratio,
            fmt_slope(v.slope),
            v.verdict
        );
        csv.push(vec![
            m.to_string(),
            v.final_ratio.to_string(),
            v.slope.map(|s| s.to_string()).unwrap_or_default(),
            format!("{:?}", v.verdict),
        ]);
    }
    let headline = match report.result {
        Boundedness::Bounded { m } => {
            let _ = writeln!(t, "result: statistically bounded with M = {m}");
            Headline::Positive
        }
        Boundedness::NotDetected => {
            let _ = writeln!(t, "result: boundedness not detected");
            Headline::Negative
        }
        Boundedness::Inconclusive => {
            let _ = writeln!(t, "result: inconclusive");
            Headline::Inconclusive
        }
    };
    Ok(Outcome {
        headline,
        result: json!({ "sequence": seq.source_text(), "report": to_value(&report) }),
        table: t,
        csv,
    })
}

fn project(a: &ProjectArgs, rule: &DecisionRule) -> CmdResult {
    let seq = load_seq(&a.seq.seq)?;
    let xi = load_point(&a.xi, seq.dim())?;
    let params = RoughParams::new(a.r, a.alpha, a.ladder.eps.clone())?;
    let exact = params.with_r(0.0)?;
    let cps = default_checkpoints(a.horizon.n)?;
    let norm = a.seq.norm;
    let sampled = Sampled::from_sequence(&seq, cps.horizon())?;
    let y = project_toward(&sampled, &xi, a.r, norm)?;

    let mut yk = vec![0.0; seq.dim()];
    let (mut step_excess, mut gap_error) = (0.0f64, 0.0f64);
    let mut csv = CsvTable::new(&["k", "x_k", "y_k", "dist_x_y", "dist_y_xi"]);
    for (k, xk) in (1..=sampled.horizon()).zip(sampled.points()) {
        y.eval_into(k, &mut yk).map_err(Error::from)?;
        let step = norm.dist(xk, &yk);
        let to_xi = norm.dist(&yk, xi.coords());
        let expected = (norm.dist(xk, xi.coords()) - a.r).max(0.0);
        step_excess = step_excess.max(step - a.r);
        gap_error = gap_error.max((to_xi - expected).abs());
        if k <= a.show {
            csv.push(vec![
                k.to_string(),
                fmt_coords(xk),
                fmt_coords(&yk),
                step.to_string(),
                to_xi.to_string(),
            ]);
        }
    }
    let x_report = test_rough_convergence_with(&sampled, &xi, &params, &cps, norm, rule)?;
    let y_report = test_rough_convergence_with(&y, &xi, &exact, &cps, norm, rule)?;

    let mut t = format!(
        "sequence: {}\nnorm: {norm}  xi: {xi}  r: {}  alpha: {}  N: {}\n",
        seq.source_text(),
        a.r,
        a.alpha,
        cps.horizon()
    );
    let _ = writeln!(t, "  {:>8}  {:>24}  {:>24}  {:>12}  {:>12}", "k", "x_k", "y_k", "|x_k-y_k|", "|y_k-xi|");
    for row in &csv.rows {
        let _ = writeln!(
            t,
            "  {:>8}  {:>24}  {:>24}  {:>12.6}  {:>12.6}",
            row[0],
            row[1],
            row[2],
            row[3].parse::<f64>().unwrap_or(f64::NAN),
            row[4].parse::<f64>().unwrap_or(f64::NAN)
        );
    }
    let _ = writeln!(
        t,
        "max(|x_k-y_k| - r): {step_excess:.3e}  max ||y_k-xi| - (|x_k-xi| - r)+|: {gap_error:.3e}"
    );
    let _ = writeln!(t, "x rough verdict at r = {}: {:?}", a.r, x_report.verdict);
    let _ = writeln!(t, "y verdict at r = 0: {:?}", y_report.verdict);
    Ok(Outcome {
        headline: convergence_headline(y_report.verdict),
        result: json!({
            "sequence": seq.source_text(),
            "xi": to_value(&xi),
            "r": a.r,
            "max_step_excess": step_excess,
            "max_gap_error": gap_error,
            "terms": csv.rows.iter().map(|row| json!({
                "k": row[0].parse::<u64>().unwrap_or(0),
                "x": row[1],
                "y": row[2],
            })).collect::<Vec<_>>(),
            "x_report": to_value(&x_report),
            "y_report": to_value(&y_report),
        }),
        table: t,
        csv,
    })
}

fn suites_outcome(reports: Vec<SuiteReport>, always_pass: bool) -> Outcome {
    let passed = reports.iter().all(SuiteReport::passed);
    let table: String = reports.iter().map(SuiteReport::render_table).collect::<Vec<_>>().join("\n");
    let mut csv = CsvTable::new(&["suite", "case", "status", "diagnostics"]);
    for r in &reports {
        for c in &r.cases {
            csv.push(vec![
                r.suite.clone(),
                c.description.clone(),
                c.status.label().to_string(),
                c.diagnostics.clone(),
            ]);
        }
    }
    Outcome {
        headline: if passed || always_pass {
            Headline::Positive
        } else {
            Headline::Negative
        },
        result: json!({ "passed": passed, "suites": to_value(&reports) }),
        table,
        csv,
    }
}

fn budget(n: u64, grid: &str, rule: &DecisionRule) -> Result<Budget, CliError> {
    let grid: Grid = grid.parse()?;
    let mut b = Budget::new(n, grid)?;
    b.rule = *rule;
    Ok(b)
}

fn suite_names(s: SuiteArg) -> Vec<SuiteName> {
    let one = |n| vec![n];
    match s {
        SuiteArg::All => SuiteName::ALL.to_vec(),
        SuiteArg::Boundedness => one(SuiteName::Boundedness),
        SuiteArg::Contiguity => one(SuiteName::Contiguity),
        SuiteArg::Decomposition => one(SuiteName::Decomposition),
        SuiteArg::Cluster => one(SuiteName::Cluster),
        SuiteArg::Midpoint => one(SuiteName::Midpoint),
        SuiteArg::Linearity => one(SuiteName::Linearity),
        SuiteArg::Monotonicity => one(SuiteName::Monotonicity),
    }
}

fn verify(a: &VerifyArgs, rule: &DecisionRule) -> CmdResult {
    let corpus = load_corpus(a.corpus.as_deref())?;
    let params = RoughParams::new(a.r, a.alpha, a.ladder.eps.clone())?;
    let budget = budget(a.horizon.n, &a.grid.grid, rule)?;
    let reports = suite_names(a.suite)
        .into_iter()
        .map(|name| run_suite(name, &corpus, &params, &budget))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(suites_outcome(reports, false))
}

fn explore(a: &ExploreArgs, rule: &DecisionRule) -> CmdResult {
    let corpus = load_corpus(a.corpus.as_deref())?;
    let budget = budget(a.horizon.n, &a.grid.grid, rule)?;
    let report = explore_diameter(&corpus, &a.r_list, &a.alpha_list, &budget)?;
    let mut out = suites_outcome(vec![report], true);
    if let Some(f) = &out.result["suites"][0]["findings"].as_object() {
        out.result["findings"] = Value::Object((*f).clone());
    }
    Ok(out)
}
