use super::*;
use crate::density::DensityLimit;
use crate::seqdsl::{builtin, parse_sequence};
use crate::space::default_checkpoints;

fn cps(n: u64) -> Checkpoints {
    default_checkpoints(n).unwrap()
}

fn p(v: f64) -> Point {
    Point::scalar(v).unwrap()
}

fn params(r: f64, alpha: f64) -> RoughParams {
    RoughParams::with_defaults(r, alpha).unwrap()
}

#[test]
fn ex_a_converges_for_large_radius_only() {
    let x = builtin("EX_A").unwrap();
    let c = cps(1_000_000);
    let rep = test_rough_convergence(&x, &p(0.0), &params(1.5, 1.0), &c, NormKind::L2).unwrap();
    assert_eq!(rep.verdict, ConvergenceVerdict::Converges);
    let rep = test_rough_convergence(&x, &p(0.0), &params(0.5, 1.0), &c, NormKind::L2).unwrap();
    assert_eq!(rep.verdict, ConvergenceVerdict::Diverges);
}

#[test]
fn constant_sequence_has_empty_bad_sets() {
    let c = cps(20_000);
    for (name, xi) in [("CONST:2.5", p(2.5)), ("CONST:(1,-1)", Point::new(vec![1.0, -1.0]).unwrap())] {
        let x = builtin(name).unwrap();
        for r in [0.0, 0.3, 2.0] {
            for alpha in [0.1, 0.5, 1.0] {
                let rep = test_rough_convergence(&x, &xi, &params(r, alpha), &c, NormKind::L2).unwrap();
                assert_eq!(rep.verdict, ConvergenceVerdict::Converges);
                assert!(rep.per_eps.iter().all(|o| o.density.ratios.iter().all(|&q| q == 0.0)));
            }
        }
    }
}

#[test]
fn dimension_mismatch_is_rejected() {
    let x = builtin("EX_A").unwrap();
    let xi = Point::new(vec![0.0, 0.0]).unwrap();
    let err = test_rough_convergence(&x, &xi, &params(1.0, 1.0), &cps(1000), NormKind::L2);
    assert!(matches!(err, Err(Error::InvalidInput(_))));
    let a = RoughAnalyzer::new(&x, &cps(1000), NormKind::L2).unwrap();
    assert!(a.report(&xi, &params(1.0, 1.0)).is_err());
}

#[test]
fn analyzer_report_matches_streaming_test() {
    let c = cps(64_000);
    for (name, xi, norm) in [
        ("EX_A", p(0.3), NormKind::L2),
        ("CUBE_INDICATOR", p(0.0), NormKind::L1),
        ("NOISY2D:0,0", Point::new(vec![0.2, -0.1]).unwrap(), NormKind::L2),
        ("NOISY2D:2,-1", Point::new(vec![2.0, -1.0]).unwrap(), NormKind::Linf),
    ] {
        let x = builtin(name).unwrap();
        let a = RoughAnalyzer::new(&x, &c, norm).unwrap();
        for r in [0.0, 0.5, 1.5] {
            let prm = params(r, 0.5);
            assert_eq!(
                a.report(&xi, &prm).unwrap(),
                test_rough_convergence(&x, &xi, &prm, &c, norm).unwrap(),
                "{name} r={r}"
            );
        }
    }
}

#[test]
fn three_dimensional_sequences_use_the_fallback() {
    let x = parse_sequence("(1, 2 + 1/n, -1)").unwrap();
    let c = cps(4000);
    let xi = Point::new(vec![1.0, 2.0, -1.0]).unwrap();
    let a = RoughAnalyzer::new(&x, &c, NormKind::L2).unwrap();
    assert_eq!(a.verdict(&xi, &params(0.0, 1.0)).unwrap(), ConvergenceVerdict::Converges);
    let g = Grid::cube(3, -1.0, 1.0, 0.5).unwrap();
    assert!(matches!(
        estimate_limit_set(&x, &params(1.0, 1.0), &c, NormKind::L2, &g),
        Err(Error::UnsupportedDimension(3))
    ));
}

#[test]
fn limit_set_examples() {
    let x = builtin("EX_A").unwrap();
    let c = cps(1_000_000);
    let a = RoughAnalyzer::new(&x, &c, NormKind::L2).unwrap();
    let g: Grid = "-4:4:0.05".parse().unwrap();
    let est = a.limit_set(&params(2.0, 1.0), &g).unwrap();
    let hull = est.hull.clone().unwrap();
    assert_eq!((hull.lo[0], hull.hi[0]), (-1.0, 1.0));
    assert_eq!(est.diameter, 2.0);
    assert!((est.uncertainty - 0.07).abs() < 1e-12);
    let empty = a.limit_set(&params(0.5, 1.0), &g).unwrap();
    assert!(empty.is_empty());
    assert!(empty.hull.is_none());
    assert_eq!(empty.diameter, 0.0);

    let k = builtin("CONST:0").unwrap();
    let est = estimate_limit_set(&k, &params(1.0, 1.0), &cps(10_000), NormKind::L2, &"-2:2:0.05".parse().unwrap())
        .unwrap();
    let hull = est.hull.unwrap();
    assert_eq!((hull.lo[0], hull.hi[0]), (-1.0, 1.0));
    assert_eq!(est.diameter, 2.0);
}

#[test]
fn limit_set_is_independent_of_thread_count() {
    let x = builtin("NOISY2D:0,0").unwrap();
    let c = cps(16_000);
    let g = Grid::cube(2, -2.0, 2.0, 0.1).unwrap();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| estimate_limit_set(&x, &params(1.0, 1.0), &c, NormKind::L2, &g).unwrap())
    };
    assert_eq!(run(1), run(3));
}

#[test]
fn ball_property_small_budget() {
    let c = cps(8000);
    for (name, centre) in [("CONST:0.3", vec![0.3]), ("CONST:(0.5,-0.25)", vec![0.5, -0.25])] {
        let x = builtin(name).unwrap();
        let centre = Point::new(centre).unwrap();
        let g = Grid::cube(centre.dim(), -2.0, 2.0, 0.1).unwrap();
        for r in [0.5, 1.0] {
            let prm = params(r, 1.0);
            let est = estimate_limit_set(&x, &prm, &c, NormKind::L2, &g).unwrap();
            for (q, &acc) in est.grid.iter().zip(&est.accepted) {
                let d = NormKind::L2.dist(q.coords(), centre.coords());
                if d <= r - 0.1 {
                    assert!(acc, "{q} should be accepted");
                }
                if d >= r + prm.eps_min() + 0.1 {
                    assert!(!acc, "{q} should be rejected");
                }
            }
        }
    }
}

#[test]
fn oracle_examples() {
    let c = cps(100_000);
    let ex_a = builtin("EX_A").unwrap();
    assert!((stat_limsup_alpha(&ex_a, 1.0, &c).unwrap() - 1.0).abs() <= 1e-3);
    assert!((stat_liminf_alpha(&ex_a, 1.0, &c).unwrap() + 1.0).abs() <= 1e-3);
    let k = builtin("CONST:2.5").unwrap();
    assert!((stat_limsup_alpha(&k, 1.0, &c).unwrap() - 2.5).abs() <= 1e-6);
    assert!((stat_liminf_alpha(&k, 1.0, &c).unwrap() - 2.5).abs() <= 1e-6);
    let cube = builtin("CUBE_INDICATOR").unwrap();
    assert!(stat_limsup_alpha(&cube, 1.0, &c).unwrap().abs() <= 1e-3);
    assert!(stat_limsup_alpha(&builtin("NOISY2D:0,0").unwrap(), 1.0, &c).is_err());
}

#[test]
fn oracle_reports_missing_nonzero_level() {
    let x = builtin("IDENTITY").unwrap();
    let c = cps(64_000);
    let seg = SortedSegments::build(&Sampled::from_sequence(&x, c.horizon()).unwrap(), &c).unwrap();
    let strict = DecisionRule {
        tau_nonzero: 1.5,
        ..DecisionRule::default()
    };
    assert!(matches!(stat_limsup(&seg, &strict, 1.0), Err(Error::OracleInconclusive(_))));
    assert!(matches!(stat_liminf(&seg, &strict, 1.0), Err(Error::OracleInconclusive(_))));
    assert!(stat_limsup(&seg, &DecisionRule::default(), 1.0).unwrap() > 32_000.0);
}

#[test]
fn cluster_examples() {
    let c = cps(100_000);
    let g: Grid = "-4:4:0.05".parse().unwrap();
    let near = |est: &ClusterEstimate, targets: &[f64]| {
        let pos: Vec<f64> = est.positive_points().map(|q| q.coords()[0]).collect();
        assert!(!pos.is_empty());
        for q in &pos {
            assert!(targets.iter().any(|t| (q - t).abs() <= est.eps + 0.05 + 1e-9), "{q}");
        }
        for t in targets {
            assert!(pos.iter().any(|q| (q - t).abs() <= 0.05 + 1e-9), "{t}");
        }
    };
    let ex_a = estimate_cluster_points(&builtin("EX_A").unwrap(), 1.0, 0.1, &c, NormKind::L2, &g).unwrap();
    near(&ex_a, &[-1.0, 1.0]);
    let cube = estimate_cluster_points(&builtin("CUBE_INDICATOR").unwrap(), 1.0, 0.1, &c, NormKind::L2, &g)
        .unwrap();
    near(&cube, &[0.0]);
    let k = estimate_cluster_points(&builtin("CONST:1.5").unwrap(), 0.5, 0.1, &c, NormKind::L2, &g).unwrap();
    near(&k, &[1.5]);
    for (v, &pos) in k.verdicts.iter().zip(&k.positive) {
        assert_eq!(pos, *v == DensityLimit::NonZero);
    }
    assert!(estimate_cluster_points(&builtin("EX_A").unwrap(), 1.0, 0.0, &c, NormKind::L2, &g).is_err());
}

#[test]
fn boundedness_examples() {
    let c = cps(1_000_000);
    let sched = default_m_schedule(c.horizon());
    let b = |name: &str, alpha| {
        is_statistically_bounded(&builtin(name).unwrap(), alpha, &c, NormKind::L2, &sched)
            .unwrap()
            .result
    };
    assert_eq!(b("EX_A", 1.0), Boundedness::Bounded { m: 2.0 });
    assert_eq!(b("IDENTITY", 1.0), Boundedness::NotDetected);
    assert_eq!(b("CONST:0", 0.3), Boundedness::Bounded { m: 1.0 });
    assert!(is_statistically_bounded(&builtin("EX_A").unwrap(), 1.0, &c, NormKind::L2, &[2.0, 1.0]).is_err());
}

#[test]
fn scaling_gives_identical_bad_sets() {
    let x = builtin("EX_A").unwrap();
    let c = cps(16_000);
    let a = RoughAnalyzer::new(&x, &c, NormKind::L2).unwrap();
    for factor in [2.0, -0.5, 4.0] {
        let y = scale_sequence(&x, factor).unwrap();
        let b = RoughAnalyzer::new(&y, &c, NormKind::L2).unwrap();
        for xi in [-1.0, 0.0, 0.25, 1.5] {
            let prm = params(1.5, 1.0);
            let scaled = prm.with_r(1.5 * factor.abs()).unwrap().with_ladder_scaled(factor.abs()).unwrap();
            let lhs = a.bad_counts(&p(xi), prm.r, &prm.eps_ladder).unwrap();
            let rhs = b.bad_counts(&p(xi * factor), scaled.r, &scaled.eps_ladder).unwrap();
            assert_eq!(lhs, rhs, "factor {factor} xi {xi}");
        }
    }
}

#[test]
fn hull_agrees_with_limsup_liminf_oracle() {
    let c = cps(100_000);
    let g: Grid = "-4:4:0.05".parse().unwrap();
    for name in ["EX_A", "CUBE_INDICATOR", "SQUARE_INDICATOR", "CONST:0.4", "ALT:-1,1"] {
        let x = builtin(name).unwrap();
        let hi = stat_limsup_alpha(&x, 1.0, &c).unwrap();
        let lo = stat_liminf_alpha(&x, 1.0, &c).unwrap();
        for r in [0.5, 1.0, 1.5, 2.0] {
            let prm = params(r, 1.0);
            let est = estimate_limit_set(&x, &prm, &c, NormKind::L2, &g).unwrap();
            let (a, b) = (hi - r, lo + r);
            match &est.hull {
                Some(h) => {
                    assert!(a <= b + est.uncertainty, "{name} r={r}");
                    assert!((h.lo[0] - a).abs() <= est.uncertainty, "{name} r={r}: {} vs {a}", h.lo[0]);
                    assert!((h.hi[0] - b).abs() <= est.uncertainty, "{name} r={r}: {} vs {b}", h.hi[0]);
                }
                None => assert!(a > b - est.uncertainty, "{name} r={r}"),
            }
        }
    }
}

#[test]
fn batched_limit_sets_match_single_scans() {
    let x = builtin("NOISY2D:0,0").unwrap();
    let c = cps(16_000);
    let a = RoughAnalyzer::new(&x, &c, NormKind::L2).unwrap();
    let g = Grid::cube(2, -2.0, 2.0, 0.1).unwrap();
    let batch: Vec<RoughParams> = [(0.5, 1.0), (1.0, 0.5), (1.0, 1.0), (0.5, 0.7)]
        .iter()
        .map(|&(r, al)| params(r, al))
        .collect();
    let many = a.limit_sets(&batch, &g).unwrap();
    for (prm, est) in batch.iter().zip(&many) {
        let single: Vec<ConvergenceVerdict> =
            est.grid.iter().map(|q| a.verdict(q, prm).unwrap()).collect();
        assert_eq!(est.verdicts, single);
    }
}

#[test]
fn ap_subsequences_never_diverge_where_the_sequence_converges() {
    let c = cps(128_000);
    let g: Grid = "-3:3:0.25".parse().unwrap();
    for name in ["EX_A", "CUBE_INDICATOR", "SQUARE_INDICATOR", "ALT:-1,1", "CONST:2.5"] {
        let x = builtin(name).unwrap();
        for (r, alpha) in [(1.5, 1.0), (1.0, 0.5)] {
            let prm = params(r, alpha);
            let est = estimate_limit_set(&x, &prm, &c, NormKind::L2, &g).unwrap();
            for xi in est.accepted_points() {
                for (a, b) in [(2, 0), (2, 1), (3, 1), (5, 2)] {
                    let sub = restrict_to_ap(&x, a, b).unwrap();
                    let v = test_rough_convergence(&sub, xi, &prm, &c, NormKind::L2).unwrap().verdict;
                    assert_ne!(v, ConvergenceVerdict::Diverges, "{name} xi={xi} r={r} alpha={alpha} a={a} b={b}");
                }
            }
        }
    }
}
