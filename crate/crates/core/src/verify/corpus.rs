use std::collections::HashSet;
use std::path::Path;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::error::{Error, Result};
use crate::seqdsl::{resolve_sequence, Sequence, SequenceSpec};
use crate::space::{NormKind, Point};

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusEntry {
    pub name: String,
    pub spec: SequenceSpec,
    pub norm: NormKind,
    pub notes: String,
    /// Known statistical limit of the bulk of the sequence, when the entry
    /// comes from a `CONST:` or `NOISY2D:` builtin.
    pub centre: Option<Point>,
}

impl CorpusEntry {
    /// Entry from a builtin name or DSL text.
    pub fn new(name: &str, expr: &str, norm: NormKind, notes: &str) -> Result<Self> {
        Ok(CorpusEntry {
            name: name.to_string(),
            spec: resolve_sequence(expr)?,
            norm,
            notes: notes.to_string(),
            centre: builtin_centre(expr),
        })
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }
}

fn builtin_centre(expr: &str) -> Option<Point> {
    let expr = expr.trim();
    let args = expr
        .strip_prefix("CONST:")
        .or_else(|| expr.strip_prefix("NOISY2D:"))?;
    args.parse().ok()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    entries: Vec<CorpusEntry>,
}

impl Corpus {
    pub fn new(entries: Vec<CorpusEntry>) -> Result<Self> {
        let mut seen = HashSet::new();
        for e in &entries {
            if !seen.insert(e.name.as_str()) {
                return Err(Error::invalid(format!("duplicate corpus entry name {:?}", e.name)));
            }
        }
        Ok(Corpus { entries })
    }

    /// The built-in corpus used by every suite by default.
    pub fn builtin() -> Self {
        use NormKind::{Linf, L2};
        let rows: [(&str, &str, NormKind, &str); 11] = [
            ("EX_A", "EX_A", L2, "±1 off the squares, k on the squares"),
            ("CUBE_INDICATOR", "CUBE_INDICATOR", L2, "1 on cubes, else 0; order threshold 1/3"),
            ("SQUARE_INDICATOR", "SQUARE_INDICATOR", L2, "1 on squares, else 0; order threshold 1/2"),
            ("CONST:0", "CONST:0", L2, "constant"),
            ("CONST:2.5", "CONST:2.5", L2, "constant"),
            ("ALT:-1,1", "ALT:-1,1", L2, "alternates -1, 1"),
            ("IDENTITY", "IDENTITY", L2, "x_k = k, unbounded"),
            ("NOISY2D:0,0", "NOISY2D:0,0", L2, "c + (cos k, sin k)/k, excursions on squares"),
            ("NOISY2D:2,-1", "NOISY2D:2,-1", L2, "c + (cos k, sin k)/k, excursions on squares"),
            ("NOISY2D:0,0@LINF", "NOISY2D:0,0", Linf, "noisy family under a non strictly convex norm"),
            ("CONST:(0,0)", "CONST:(0,0)", L2, "constant in the plane"),
        ];
        Corpus::new(
            rows.iter()
                .map(|(name, expr, norm, notes)| {
                    CorpusEntry::new(name, expr, *norm, notes).expect("builtin corpus parses")
                })
                .collect(),
        )
        .expect("builtin corpus names are unique")
    }

    /// Parses the line format `name[@norm] = expr`; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let at_line = |e: Error| Error::invalid(format!("corpus line {}: {e}", lineno + 1));
            let (lhs, expr) = line
                .split_once('=')
                .filter(|(_, rhs)| !rhs.starts_with('='))
                .ok_or_else(|| at_line(Error::invalid("expected `name[@norm] = expr`")))?;
            let lhs = lhs.trim();
            let (name, norm) = match lhs.rsplit_once('@') {
                Some((n, norm)) => (n.trim(), norm.trim().parse().map_err(at_line)?),
                None => (lhs, NormKind::L2),
            };
            if name.is_empty() {
                return Err(at_line(Error::invalid("empty entry name")));
            }
            let name = if norm == NormKind::L2 {
                name.to_string()
            } else {
                format!("{name}@{norm}")
            };
            entries.push(CorpusEntry::new(&name, expr.trim(), norm, "").map_err(at_line)?);
        }
        if entries.is_empty() {
            return Err(Error::invalid("corpus file has no entries"));
        }
        Corpus::new(entries)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::invalid(format!("cannot read corpus {}: {e}", path.display())))?;
        Corpus::parse(&text)
    }

    /// Indicator-style entries `if is_power(n, p) then v else w` drawn from
    /// a seeded generator.
    pub fn random_power_indicators(seed: u64, count: usize) -> Self {
        let mut rng = StdRng::seed_from_u64(seed);
        let entries = (0..count)
            .map(|i| {
                let p: u32 = rng.gen_range(2..=5);
                let v = (rng.gen_range(-300..=300) as f64) / 100.0;
                let w = (rng.gen_range(-100..=100) as f64) / 100.0;
                let text = format!("if is_power(n, {p}) then {v} else {w}");
                CorpusEntry::new(&format!("RANDOM_POWER_{i}"), &text, NormKind::L2, "generated")
                    .expect("generated text parses")
            })
            .collect();
        Corpus::new(entries).expect("generated names are unique")
    }

    pub fn entries(&self) -> &[CorpusEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&CorpusEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    /// Sub-corpus with the named entries, in the given order.
    pub fn select(&self, names: &[&str]) -> Result<Self> {
        names
            .iter()
            .map(|n| {
                self.get(n)
                    .cloned()
                    .ok_or_else(|| Error::NotFound(format!("no corpus entry named {n:?}")))
            })
            .collect::<Result<Vec<_>>>()
            .and_then(Corpus::new)
    }

    pub fn merged(&self, other: &Corpus) -> Result<Self> {
        Corpus::new(self.entries.iter().chain(&other.entries).cloned().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_corpus_shape() {
        let c = Corpus::builtin();
        assert_eq!(c.len(), 11);
        assert_eq!(c.get("NOISY2D:2,-1").unwrap().centre.as_ref().unwrap().coords(), &[2.0, -1.0]);
        assert_eq!(c.get("NOISY2D:0,0@LINF").unwrap().norm, NormKind::Linf);
        assert!(c.get("EX_A").unwrap().centre.is_none());
        assert_eq!(c.get("CONST:(0,0)").unwrap().dim(), 2);
    }

    #[test]
    fn parse_corpus_file() {
        let text = "# demo\nex = EX_A\nnoisy@LINF = NOISY2D:1,1   # trailing\n\nsq = if is_square(n) then 1 else 0\n";
        let c = Corpus::parse(text).unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c.entries()[1].name, "noisy@LINF");
        assert_eq!(c.entries()[1].norm, NormKind::Linf);
        assert_eq!(c.entries()[1].centre.as_ref().unwrap().coords(), &[1.0, 1.0]);
        assert_eq!(c.entries()[2].spec.source_text(), "if is_square(n) then 1 else 0");
    }

    #[test]
    fn corpus_errors_name_the_line() {
        let err = Corpus::parse("a = n\nb = 1 +\n").unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
        assert!(Corpus::parse("a = n\na = 2\n").is_err());
        assert!(Corpus::parse("just text\n").is_err());
        assert!(Corpus::parse("x@L7 = n\n").is_err());
        assert!(Corpus::parse("# nothing\n").is_err());
    }

    #[test]
    fn random_corpus_is_reproducible() {
        let a = Corpus::random_power_indicators(7, 5);
        let b = Corpus::random_power_indicators(7, 5);
        assert_eq!(a, b);
        assert!(a.entries().iter().all(|e| e.spec.source_text().contains("is_power")));
    }
}
