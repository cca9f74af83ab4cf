use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseStatus {
    Pass,
    Fail,
    Inconclusive,
    NotApplicable,
}

impl CaseStatus {
    pub fn label(self) -> &'static str {
        match self {
            CaseStatus::Pass => "pass",
            CaseStatus::Fail => "FAIL",
            CaseStatus::Inconclusive => "inconclusive",
            CaseStatus::NotApplicable => "n/a",
        }
    }

    /// Fail beats Inconclusive beats Pass.
    pub fn from_tallies(failures: usize, inconclusive: usize) -> Self {
        if failures > 0 {
            CaseStatus::Fail
        } else if inconclusive > 0 {
            CaseStatus::Inconclusive
        } else {
            CaseStatus::Pass
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseOutcome {
    pub description: String,
    pub status: CaseStatus,
    pub diagnostics: String,
}

impl CaseOutcome {
    pub fn new(description: impl Into<String>, status: CaseStatus, diagnostics: impl Into<String>) -> Self {
        CaseOutcome {
            description: description.into(),
            status,
            diagnostics: diagnostics.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub pass: usize,
    pub fail: usize,
    pub inconclusive: usize,
    pub not_applicable: usize,
}

/// Results of the diameter exploration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiameterFindings {
    pub max_ratio: Option<f64>,
    pub max_case: Option<String>,
    pub flagged: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub cases: Vec<CaseOutcome>,
    pub summary: Summary,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub findings: Option<DiameterFindings>,
}

impl SuiteReport {
    pub fn new(suite: impl Into<String>, cases: Vec<CaseOutcome>) -> Self {
        let mut summary = Summary {
            total: cases.len(),
            ..Summary::default()
        };
        for c in &cases {
            match c.status {
                CaseStatus::Pass => summary.pass += 1,
                CaseStatus::Fail => summary.fail += 1,
                CaseStatus::Inconclusive => summary.inconclusive += 1,
                CaseStatus::NotApplicable => summary.not_applicable += 1,
            }
        }
        SuiteReport {
            suite: suite.into(),
            cases,
            summary,
            findings: None,
        }
    }

    /// A suite passes when no case failed.
    pub fn passed(&self) -> bool {
        self.summary.fail == 0
    }

    pub fn cases_with(&self, status: CaseStatus) -> impl Iterator<Item = &CaseOutcome> {
        self.cases.iter().filter(move |c| c.status == status)
    }

    pub fn render_table(&self) -> String {
        let s = &self.summary;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "suite {}: {} cases, {} pass, {} fail, {} inconclusive, {} n/a -> {}",
            self.suite,
            s.total,
            s.pass,
            s.fail,
            s.inconclusive,
            s.not_applicable,
            if self.passed() { "PASSED" } else { "FAILED" }
        );
        let width = self
            .cases
            .iter()
            .map(|c| c.description.chars().count())
            .max()
            .unwrap_or(4)
            .max(4);
        let _ = writeln!(out, "  {:<12}  {:<width$}  DIAGNOSTICS", "STATUS", "CASE");
        for c in &self.cases {
            let _ = writeln!(
                out,
                "  {:<12}  {:<width$}  {}",
                c.status.label(),
                c.description,
                c.diagnostics
            );
        }
        if let Some(f) = &self.findings {
            match (&f.max_ratio, &f.max_case) {
                (Some(r), Some(case)) => {
                    let _ = writeln!(out, "  max diameter ratio {r:.4} at {case}");
                }
                _ => {
                    let _ = writeln!(out, "  no nonempty limit set was found");
                }
            }
            if f.flagged.is_empty() {
                let _ = writeln!(out, "  no case exceeds 1 + uncertainty/r");
            }
            for case in &f.flagged {
                let _ = writeln!(out, "  !! FLAGGED: diameter ratio above 1 + uncertainty/r at {case}");
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_matches_cases() {
        let cases = vec![
            CaseOutcome::new("a", CaseStatus::Pass, ""),
            CaseOutcome::new("b", CaseStatus::Inconclusive, "edge"),
            CaseOutcome::new("c", CaseStatus::Pass, ""),
            CaseOutcome::new("d", CaseStatus::NotApplicable, ""),
        ];
        let r = SuiteReport::new("demo", cases);
        assert_eq!(
            r.summary,
            Summary {
                total: 4,
                pass: 2,
                fail: 0,
                inconclusive: 1,
                not_applicable: 1
            }
        );
        assert!(r.passed());
        assert!(r.render_table().contains("PASSED"));
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"not_applicable\""));
        assert!(!json.contains("findings"));
        let back: SuiteReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn failing_case_fails_suite() {
        let r = SuiteReport::new("demo", vec![CaseOutcome::new("x", CaseStatus::Fail, "boom")]);
        assert!(!r.passed());
        assert!(r.render_table().contains("FAIL"));
        assert_eq!(CaseStatus::from_tallies(0, 2), CaseStatus::Inconclusive);
        assert_eq!(CaseStatus::from_tallies(1, 2), CaseStatus::Fail);
        assert_eq!(CaseStatus::from_tallies(0, 0), CaseStatus::Pass);
    }
}
