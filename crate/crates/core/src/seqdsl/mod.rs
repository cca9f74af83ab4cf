//! A small expression language for sequences `k ↦ x_k` in ℝ^d and index
//! predicates `k ↦ bool`, with built-in families.

mod ast;
mod eval;
pub mod introots;
mod parser;

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use ast::{BinOp, CmpOp, Expr, Func, LogicOp};
pub use eval::EvalError;
pub use parser::ParseError;

use crate::error::{Error, Result};
use crate::space::Point;

/// Anything that yields a finite point for every index `k >= 1`.
pub trait Sequence: Sync {
    fn dim(&self) -> usize;

    /// Writes `x_k` into `out` (length `dim`).
    fn eval_into(&self, k: u64, out: &mut [f64]) -> Result<(), EvalError>;

    fn describe(&self) -> String;

    fn eval_point(&self, k: u64) -> Result<Point, EvalError> {
        let mut buf = vec![0.0; self.dim()];
        self.eval_into(k, &mut buf)?;
        Ok(Point::new(buf).expect("evaluation yields finite coordinates"))
    }
}

impl<S: Sequence + ?Sized> Sequence for &S {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn eval_into(&self, k: u64, out: &mut [f64]) -> Result<(), EvalError> {
        (**self).eval_into(k, out)
    }

    fn describe(&self) -> String {
        (**self).describe()
    }
}

/// A parsed sequence: one numeric expression per coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceSpec {
    components: Vec<Expr>,
    source_text: String,
}

impl SequenceSpec {
    /// Wraps already-typed component expressions; the source text is their
    /// pretty-printed form.
    pub fn from_components(components: Vec<Expr>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::invalid("sequence needs at least one component"));
        }
        let source_text = render_components(&components);
        Ok(SequenceSpec {
            components,
            source_text,
        })
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    pub fn source_text(&self) -> &str {
        &self.source_text
    }

    /// Canonical text: reparses to an identical tree.
    pub fn pretty(&self) -> String {
        render_components(&self.components)
    }
}

fn render_components(components: &[Expr]) -> String {
    if let [single] = components {
        return single.to_string();
    }
    let parts: Vec<String> = components.iter().map(|c| c.to_string()).collect();
    format!("({})", parts.join(", "))
}

impl Sequence for SequenceSpec {
    fn dim(&self) -> usize {
        self.components.len()
    }

    fn eval_into(&self, k: u64, out: &mut [f64]) -> Result<(), EvalError> {
        for (slot, comp) in out.iter_mut().zip(&self.components) {
            *slot = eval::eval_num(comp, k)?;
        }
        Ok(())
    }

    fn describe(&self) -> String {
        self.source_text.clone()
    }
}

impl fmt::Display for SequenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source_text)
    }
}

#[derive(Serialize, Deserialize)]
struct SpecRepr {
    source_text: String,
    dim: usize,
}

impl Serialize for SequenceSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SpecRepr {
            source_text: self.source_text.clone(),
            dim: self.components.len(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SequenceSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = SpecRepr::deserialize(d)?;
        let spec = parse_sequence(&repr.source_text).map_err(serde::de::Error::custom)?;
        if spec.dim() != repr.dim {
            return Err(serde::de::Error::custom("dim does not match source_text"));
        }
        Ok(spec)
    }
}

/// A boolean expression over the index `n`, defining a set K ⊆ ℕ.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexPredicateSpec {
    ast: Expr,
}

impl IndexPredicateSpec {
    pub fn from_expr(ast: Expr) -> Self {
        IndexPredicateSpec { ast }
    }

    pub fn ast(&self) -> &Expr {
        &self.ast
    }

    pub fn contains(&self, k: u64) -> Result<bool, EvalError> {
        eval::eval_bool(&self.ast, k)
    }
}

impl fmt::Display for IndexPredicateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.ast.fmt(f)
    }
}

pub fn parse_sequence(text: &str) -> Result<SequenceSpec, ParseError> {
    let components = parser::parse_components(text)?;
    Ok(SequenceSpec {
        components,
        source_text: text.trim().to_string(),
    })
}

pub fn parse_predicate(text: &str) -> Result<IndexPredicateSpec, ParseError> {
    Ok(IndexPredicateSpec {
        ast: parser::parse_bool(text)?,
    })
}

pub fn eval_sequence(spec: &SequenceSpec, k: u64) -> Result<Point> {
    if k == 0 {
        return Err(Error::invalid("sequence index is 1-based; k must be >= 1"));
    }
    Ok(spec.eval_point(k)?)
}

pub const EX_A_TEXT: &str = "if is_square(n) then n else pow(-1, n)";
pub const CUBE_INDICATOR_TEXT: &str = "if is_cube(n) then 1 else 0";
pub const SQUARE_INDICATOR_TEXT: &str = "if is_square(n) then 1 else 0";

/// Names accepted by [`builtin`]. Parameterised families take their
/// arguments after a colon.
pub const BUILTIN_NAMES: &[&str] = &[
    "EX_A",
    "CUBE_INDICATOR",
    "SQUARE_INDICATOR",
    "IDENTITY",
    "DENSE_SIN",
    "CONST:<v>",
    "ALT:<a>,<b>",
    "NOISY2D:<c1>,<c2>",
];

/// DSL text for a built-in family.
pub fn builtin_text(name: &str) -> Result<String> {
    let name = name.trim();
    let fixed = match name {
        "EX_A" => Some(EX_A_TEXT),
        "CUBE_INDICATOR" => Some(CUBE_INDICATOR_TEXT),
        "SQUARE_INDICATOR" => Some(SQUARE_INDICATOR_TEXT),
        "IDENTITY" => Some("n"),
        "DENSE_SIN" => Some("sin(n)"),
        _ => None,
    };
    if let Some(text) = fixed {
        return Ok(text.to_string());
    }
    let Some((family, args)) = name.split_once(':') else {
        return Err(Error::NotFound(format!("unknown builtin {name:?}")));
    };
    match family {
        "CONST" => {
            let p: Point = args.parse()?;
            Ok(render_components(
                &p.coords().iter().map(|&v| Expr::num(v)).collect::<Vec<_>>(),
            ))
        }
        "ALT" => {
            let parts = split_top_level(args);
            let [a, b] = parts.as_slice() else {
                return Err(Error::invalid(format!("ALT needs two points, got {args:?}")));
            };
            let (a, b): (Point, Point) = (a.parse()?, b.parse()?);
            if a.dim() != b.dim() {
                return Err(Error::invalid("ALT points must share a dimension"));
            }
            let odd = parse_predicate("n % 2 == 1").expect("static predicate");
            let comps: Vec<Expr> = a
                .coords()
                .iter()
                .zip(b.coords())
                .map(|(&x, &y)| Expr::if_else(odd.ast.clone(), Expr::num(x), Expr::num(y)))
                .collect();
            Ok(render_components(&comps))
        }
        "NOISY2D" => {
            let c: Point = args.parse()?;
            let [c1, c2] = c.coords() else {
                return Err(Error::invalid("NOISY2D needs a 2-D center"));
            };
            // c + (cos n, sin n)/n, with excursions c + (n, 0) on the squares
            let c1 = Expr::num(*c1);
            let c2 = Expr::num(*c2);
            Ok(format!(
                "(if is_square(n) then {c1} + n else {c1} + cos(n) / n, \
                 if is_square(n) then {c2} else {c2} + sin(n) / n)"
            ))
        }
        _ => Err(Error::NotFound(format!("unknown builtin {name:?}"))),
    }
}

pub fn builtin(name: &str) -> Result<SequenceSpec> {
    Ok(parse_sequence(&builtin_text(name)?)?)
}

/// Resolves a builtin name first, then falls back to DSL text.
pub fn resolve_sequence(text_or_name: &str) -> Result<SequenceSpec> {
    match builtin(text_or_name) {
        Ok(spec) => Ok(spec),
        Err(Error::NotFound(_)) => Ok(parse_sequence(text_or_name)?),
        Err(e) => Err(e),
    }
}

/// Splits on commas that are not nested inside parentheses.
fn split_top_level(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(spec: &SequenceSpec, k: u64) -> Vec<f64> {
        eval_sequence(spec, k).unwrap().into_coords()
    }

    #[test]
    fn ex_a_examples() {
        let spec = parse_sequence(EX_A_TEXT).unwrap();
        assert_eq!(spec.dim(), 1);
        assert_eq!(at(&spec, 4), vec![4.0]);
        assert_eq!(at(&spec, 3), vec![-1.0]);
        assert_eq!(at(&spec, 2), vec![1.0]);
        assert_eq!(at(&spec, 1), vec![1.0]);
        assert_eq!(builtin("EX_A").unwrap().components(), spec.components());
    }

    #[test]
    fn cube_indicator_examples() {
        let spec = parse_sequence(CUBE_INDICATOR_TEXT).unwrap();
        assert_eq!(at(&spec, 8), vec![1.0]);
        assert_eq!(at(&spec, 9), vec![0.0]);
        assert_eq!(at(&spec, 27), vec![1.0]);
    }

    #[test]
    fn constant_and_alternating() {
        let zero = parse_sequence("0").unwrap();
        assert_eq!(at(&zero, 17), vec![0.0]);
        let c = builtin("CONST:2.5").unwrap();
        assert_eq!(at(&c, 1), vec![2.5]);
        assert_eq!(at(&c, 99), vec![2.5]);
        let alt = builtin("ALT:-1,1").unwrap();
        for k in 1..20u64 {
            let expected = if k % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(at(&alt, k), vec![expected]);
        }
        let alt2 = builtin("ALT:(1,2),(3,-4)").unwrap();
        assert_eq!(alt2.dim(), 2);
        assert_eq!(at(&alt2, 1), vec![1.0, 2.0]);
        assert_eq!(at(&alt2, 2), vec![3.0, -4.0]);
        let c2 = builtin("CONST:(0,-1.5)").unwrap();
        assert_eq!(at(&c2, 5), vec![0.0, -1.5]);
    }

    #[test]
    fn noisy_family() {
        let s = builtin("NOISY2D:2,-1").unwrap();
        assert_eq!(s.dim(), 2);
        assert_eq!(at(&s, 4), vec![6.0, -1.0]);
        let v = at(&s, 1000);
        let r = ((v[0] - 2.0).powi(2) + (v[1] + 1.0).powi(2)).sqrt();
        assert!((r - 1e-3).abs() < 1e-15);
    }

    #[test]
    fn unknown_builtin() {
        assert!(matches!(builtin("NOPE"), Err(Error::NotFound(_))));
        assert!(matches!(builtin("FOO:1"), Err(Error::NotFound(_))));
        assert!(matches!(builtin("ALT:1"), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn eval_errors_name_subexpression_and_index() {
        let spec = parse_sequence("1 / (n - 3)").unwrap();
        let err = eval_sequence(&spec, 3).unwrap_err();
        let Error::Eval(e) = err else { panic!() };
        assert_eq!(e.k, 3);
        assert_eq!(e.expr, "1 / (n - 3)");
        let spec = parse_sequence("ln(n - 2)").unwrap();
        let Error::Eval(e) = eval_sequence(&spec, 1).unwrap_err() else { panic!() };
        assert_eq!(e.expr, "ln(n - 2)");
        assert!(e.message.contains("nonpositive"));
        let spec = parse_sequence("n % 0.5").unwrap();
        assert!(eval_sequence(&spec, 1).is_err());
        assert!(eval_sequence(&parse_sequence("n").unwrap(), 0).is_err());
    }

    #[test]
    fn modulo_is_euclidean() {
        let spec = parse_sequence("(n - 10) % 3").unwrap();
        assert_eq!(at(&spec, 1), vec![0.0]);
        assert_eq!(at(&spec, 2), vec![1.0]);
    }

    #[test]
    fn purity_same_bits() {
        let spec = parse_sequence("sin(n) * sqrt(n) + cos(n^2) / (n + 1)").unwrap();
        for k in [1u64, 17, 999_983] {
            let a = at(&spec, k)[0].to_bits();
            let b = at(&spec, k)[0].to_bits();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn predicates() {
        let odd = parse_predicate("n % 2 == 1").unwrap();
        assert!(odd.contains(3).unwrap());
        assert!(!odd.contains(4).unwrap());
        let p = parse_predicate("is_power(n, 5) or n == 2").unwrap();
        assert!(p.contains(32).unwrap());
        assert!(p.contains(2).unwrap());
        assert!(!p.contains(31).unwrap());
        let bad = parse_predicate("is_power(n, 0)").unwrap();
        assert!(bad.contains(1).is_err());
    }

    #[test]
    fn spec_json_roundtrip() {
        let spec = builtin("EX_A").unwrap();
        let json = serde_json::to_string(&spec).unwrap();
        assert_eq!(json, format!(r#"{{"source_text":"{EX_A_TEXT}","dim":1}}"#));
        let back: SequenceSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
    }
}
