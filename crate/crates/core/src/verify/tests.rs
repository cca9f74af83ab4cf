use super::*;
use crate::rough::Grid;
use crate::space::RoughParams;

fn small() -> Budget {
    Budget::new(32_000, "-3:3:0.1".parse::<Grid>().unwrap()).unwrap()
}

fn corpus(names: &[&str]) -> Corpus {
    Corpus::builtin().select(names).unwrap()
}

fn params(r: f64, alpha: f64) -> RoughParams {
    RoughParams::with_defaults(r, alpha).unwrap()
}

fn status_of<'a>(rep: &'a SuiteReport, prefix: &str) -> &'a CaseOutcome {
    rep.cases
        .iter()
        .find(|c| c.description.starts_with(prefix))
        .unwrap_or_else(|| panic!("no case {prefix:?} in {}", rep.render_table()))
}

#[test]
fn boundedness_examples() {
    let c = corpus(&["EX_A", "IDENTITY", "CONST:0"]);
    let rep = check_boundedness_equivalence(&c, 1.0, &DEFAULT_R_SCHEDULE, &small()).unwrap();
    assert!(rep.passed(), "{}", rep.render_table());
    assert_eq!(rep.summary.pass, 3);
    assert!(status_of(&rep, "EX_A").diagnostics.contains("from r=1"));
    assert!(status_of(&rep, "IDENTITY").diagnostics.contains("not bounded"));
    assert!(status_of(&rep, "CONST:0").diagnostics.contains("from r=0"));
    assert!(check_boundedness_equivalence(&c, 1.0, &[1.0, 0.5], &small()).is_err());
}

#[test]
fn contiguity_examples() {
    let b = small();
    let rep = check_contiguity(&corpus(&["EX_A"]), &params(2.0, 1.0), &b).unwrap();
    assert_eq!(rep.cases[0].status, CaseStatus::Pass);
    assert!(rep.cases[0].diagnostics.starts_with("run [-1, 1]"), "{}", rep.render_table());
    let rep = check_contiguity(&corpus(&["EX_A"]), &params(0.5, 1.0), &b).unwrap();
    assert!(rep.cases[0].diagnostics.contains("vacuous"));
    let rep = check_contiguity(&corpus(&["CONST:(0,0)"]), &params(1.0, 1.0), &b).unwrap();
    assert_eq!(rep.cases[0].status, CaseStatus::Pass, "{}", rep.render_table());
}

#[test]
fn decomposition_examples() {
    let b = small();
    let rep = check_decomposition(&corpus(&["EX_A", "CONST:0"]), &params(1.5, 1.0), &b).unwrap();
    assert!(rep.passed(), "{}", rep.render_table());
    assert_eq!(status_of(&rep, "forward EX_A").status, CaseStatus::Pass);
    assert_eq!(status_of(&rep, "converse CONST:0").status, CaseStatus::Pass);
    let rep = check_decomposition(&corpus(&["CUBE_INDICATOR"]), &params(0.5, 0.4), &Budget::default()).unwrap();
    assert_eq!(status_of(&rep, "forward CUBE_INDICATOR").status, CaseStatus::Pass, "{}", rep.render_table());
    assert!(check_decomposition(&corpus(&["EX_A"]), &params(0.0, 1.0), &b).is_err());
}

#[test]
fn cluster_distance_examples() {
    let b = small();
    let rep = check_cluster_distance(&corpus(&["EX_A", "CONST:0"]), &params(1.5, 1.0), &b).unwrap();
    assert!(rep.passed(), "{}", rep.render_table());
    assert!(status_of(&rep, "EX_A").diagnostics.contains("= 1.5000"));
    let rep = check_cluster_distance(&corpus(&["CUBE_INDICATOR"]), &params(0.2, 1.0), &b).unwrap();
    assert_eq!(rep.cases[0].status, CaseStatus::Pass, "{}", rep.render_table());
}

#[test]
fn midpoint_examples() {
    let b = small();
    let c = corpus(&["NOISY2D:0,0", "NOISY2D:2,-1", "NOISY2D:0,0@LINF"]);
    let rep = check_midpoint_strict_convexity(&c, &params(1.0, 1.0), &b).unwrap();
    assert_eq!(status_of(&rep, "NOISY2D:0,0 ").status, CaseStatus::Pass, "{}", rep.render_table());
    assert_eq!(status_of(&rep, "NOISY2D:0,0@LINF").status, CaseStatus::NotApplicable);
    let rep = check_midpoint_strict_convexity(&c, &params(0.5, 1.0), &b).unwrap();
    let case = status_of(&rep, "NOISY2D:2,-1");
    assert_eq!(case.status, CaseStatus::Pass, "{}", rep.render_table());
    assert!(case.diagnostics.contains("midpoint (2, -1)"));
    // 1-D entries are outside the hypothesis and not reported
    let rep = check_midpoint_strict_convexity(&corpus(&["EX_A"]), &params(1.0, 1.0), &b).unwrap();
    assert!(rep.cases.is_empty());
}

#[test]
fn linearity_examples() {
    let b = small();
    let c = Corpus::new(vec![
        CorpusEntry::new("EX_A", "EX_A", crate::space::NormKind::L2, "").unwrap(),
        CorpusEntry::new("CONST:1", "CONST:1", crate::space::NormKind::L2, "").unwrap(),
    ])
    .unwrap();
    let rep = check_linearity(&c, &params(1.5, 1.0), &[2.0, 0.0], &b).unwrap();
    assert!(rep.passed(), "{}", rep.render_table());
    assert_eq!(status_of(&rep, "scale c=2 EX_A").status, CaseStatus::Pass);
    assert_eq!(status_of(&rep, "scale c=0 EX_A").status, CaseStatus::Pass);
    assert_eq!(status_of(&rep, "sum EX_A + CONST:1 r1=1.5 r2=0").status, CaseStatus::Pass);
    assert!(check_linearity(&c, &params(1.5, 1.0), &[], &b).is_err());
}

#[test]
fn monotonicity_examples() {
    let b = Budget::new(1_000_000, "-1:1:0.1".parse::<Grid>().unwrap()).unwrap();
    let c = corpus(&["CUBE_INDICATOR", "CONST:0"]);
    let rep = check_order_monotonicity(&c, &params(0.1, 1.0), &[(0.4, 0.8), (0.3, 0.4)], &b).unwrap();
    assert!(rep.passed(), "{}", rep.render_table());
    assert_eq!(rep.summary.pass, 4);
    // at ξ = 0 only: Diverges at 0.3, Converges at 0.4
    let low = status_of(&rep, "CUBE_INDICATOR r=0.1 alpha 0.3");
    assert!(low.diagnostics.starts_with("accepted 0 at 0.3, 3 at 0.4"), "{}", low.diagnostics);
    assert!(check_order_monotonicity(&c, &params(0.1, 1.0), &[(0.8, 0.4)], &b).is_err());
}

#[test]
fn randomized_power_corpus_never_violates_inclusion() {
    let b = Budget::new(256_000, "-3:3:0.1".parse::<Grid>().unwrap()).unwrap();
    let c = Corpus::random_power_indicators(2024, 12);
    let rep = check_order_monotonicity(&c, &params(0.2, 1.0), &DEFAULT_ALPHA_PAIRS, &b).unwrap();
    assert_eq!(rep.summary.fail, 0, "{}", rep.render_table());
}

#[test]
fn explore_examples() {
    let b = Budget::new(256_000, "-4:4:0.05".parse::<Grid>().unwrap()).unwrap();
    let rep = explore_diameter(&corpus(&["CONST:0"]), &[1.0], &[0.5], &b).unwrap();
    assert!(rep.cases[0].diagnostics.starts_with("diameter 2.0000, ratio 1.0000"));
    let rep = explore_diameter(&corpus(&["EX_A"]), &[2.0], &[1.0], &b).unwrap();
    assert!(rep.cases[0].diagnostics.starts_with("diameter 2.0000, ratio 0.5000"));
    let rep = explore_diameter(&corpus(&["CUBE_INDICATOR"]), &[0.5], &[0.5], &b).unwrap();
    let f = rep.findings.as_ref().unwrap();
    assert!((f.max_ratio.unwrap() - 1.0).abs() < 1e-9, "{}", rep.render_table());
    assert!(f.flagged.is_empty());
    assert!(explore_diameter(&corpus(&["EX_A"]), &[0.0], &[0.5], &b).is_err());
}

#[test]
fn suites_are_deterministic() {
    let c = corpus(&["EX_A", "NOISY2D:0,0"]);
    let b = Budget::new(16_000, "-2:2:0.1".parse::<Grid>().unwrap()).unwrap();
    for name in SuiteName::ALL {
        let one = run_suite(name, &c, &params(1.0, 1.0), &b).unwrap();
        let two = rayon::ThreadPoolBuilder::new()
            .num_threads(2)
            .build()
            .unwrap()
            .install(|| run_suite(name, &c, &params(1.0, 1.0), &b).unwrap());
        assert_eq!(one, two, "{}", name.name());
    }
}

#[test]
fn high_dimensional_entries_are_not_applicable() {
    let c = Corpus::new(vec![CorpusEntry::new(
        "cube3",
        "(1, 2, 1/n)",
        crate::space::NormKind::L2,
        "",
    )
    .unwrap()])
    .unwrap();
    let rep = check_contiguity(&c, &params(1.0, 1.0), &small()).unwrap();
    assert_eq!(rep.cases[0].status, CaseStatus::NotApplicable);
}
