//! Shared domain types: points in ℝ^d, the three supported norms, checkpoint
//! schedules, and the (r, α, ε) parameter bundle.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite vector in ℝ^d.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PointRepr", into = "PointRepr")]
pub struct Point {
    coords: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct PointRepr {
    coords: Vec<f64>,
    dim: usize,
}

impl TryFrom<PointRepr> for Point {
    type Error = Error;

    fn try_from(repr: PointRepr) -> Result<Self> {
        if repr.dim != repr.coords.len() {
            return Err(Error::invalid(format!(
                "point dim {} does not match {} coordinates",
                repr.dim,
                repr.coords.len()
            )));
        }
        Point::new(repr.coords)
    }
}

impl From<Point> for PointRepr {
    fn from(p: Point) -> Self {
        let dim = p.coords.len();
        PointRepr {
            coords: p.coords,
            dim,
        }
    }
}

impl Point {
    /// Builds a point, rejecting empty or non-finite coordinates.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::invalid("point must have dimension >= 1"));
        }
        if let Some(bad) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::invalid(format!("non-finite coordinate {bad}")));
        }
        Ok(Point { coords })
    }

    pub fn scalar(v: f64) -> Result<Self> {
        Point::new(vec![v])
    }

    pub fn zero(dim: usize) -> Result<Self> {
        Point::new(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    pub fn sub(&self, other: &Point) -> Result<Point> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &Point) -> Result<Point> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn scale(&self, c: f64) -> Result<Point> {
        Point::new(self.coords.iter().map(|v| v * c).collect())
    }

    pub fn midpoint(&self, other: &Point) -> Result<Point> {
        self.zip_with(other, |a, b| 0.5 * (a + b))
    }

    fn zip_with(&self, other: &Point, f: impl Fn(f64, f64) -> f64) -> Result<Point> {
        if self.dim() != other.dim() {
            return Err(Error::invalid(format!(
                "dimension mismatch: {} vs {}",
                self.dim(),
                other.dim()
            )));
        }
        Point::new(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let [v] = self.coords.as_slice() {
            return write!(f, "{v}");
        }
        write!(f, "(")?;
        for (i, v) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

impl FromStr for Point {
    type Err = Error;

    /// Accepts `1.5`, `1.5,-2` or `(1.5,-2)`.
    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim();
        let inner = inner
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .unwrap_or(inner);
        let coords = inner
            .split(',')
            .map(|part| {
                part.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::invalid(format!("cannot parse coordinate {part:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Point::new(coords)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum NormKind {
    L1,
    L2,
    Linf,
}

impl NormKind {
    /// Only the Euclidean norm has a strictly convex unit ball.
    pub fn strictly_convex(self) -> bool {
        matches!(self, NormKind::L2)
    }

    /// Norm of a raw coordinate slice. Hot-path variant of [`norm`].
    #[inline]
    pub fn of(self, v: &[f64]) -> f64 {
        match self {
            NormKind::L1 => v.iter().map(|x| x.abs()).sum(),
            NormKind::L2 => match v {
                [x] => x.abs(),
                [x, y] => x.hypot(*y),
                _ => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
            },
            NormKind::Linf => v.iter().fold(0.0, |m, x| m.max(x.abs())),
        }
    }

    /// `‖a − b‖` without allocating.
    #[inline]
    pub fn dist(self, a: &[f64], b: &[f64]) -> f64 {
        match (a, b) {
            ([x], [y]) => (x - y).abs(),
            ([x0, x1], [y0, y1]) => self.of(&[x0 - y0, x1 - y1]),
            _ => {
                let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
                self.of(&diff)
            }
        }
    }
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NormKind::L1 => "L1",
            NormKind::L2 => "L2",
            NormKind::Linf => "LINF",
        })
    }
}

impl FromStr for NormKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "L1" => Ok(NormKind::L1),
            "L2" => Ok(NormKind::L2),
            "LINF" | "L_INF" | "MAX" => Ok(NormKind::Linf),
            other => Err(Error::invalid(format!("unknown norm {other:?}"))),
        }
    }
}

pub fn norm(p: &Point, kind: NormKind) -> f64 {
    kind.of(p.coords())
}

pub fn distance(a: &Point, b: &Point, kind: NormKind) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::invalid(format!(
            "dimension mismatch: {} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    Ok(kind.dist(a.coords(), b.coords()))
}

/// Strictly increasing positive indices at which prefix counts are taken.
/// The last value is the horizon N.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct Checkpoints(Vec<u64>);

impl Checkpoints {
    pub fn new(values: Vec<u64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("checkpoints must be nonempty"));
        }
        if values[0] == 0 {
            return Err(Error::invalid("checkpoints must be positive"));
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("checkpoints must be strictly increasing"));
        }
        Ok(Checkpoints(values))
    }

    pub fn values(&self) -> &[u64] {
        &self.0
    }

    pub fn horizon(&self) -> u64 {
        *self.0.last().expect("nonempty by construction")
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl TryFrom<Vec<u64>> for Checkpoints {
    type Error = Error;

    fn try_from(values: Vec<u64>) -> Result<Self> {
        Checkpoints::new(values)
    }
}

impl From<Checkpoints> for Vec<u64> {
    fn from(c: Checkpoints) -> Self {
        c.0
    }
}

pub const CHECKPOINT_BASE: u64 = 1000;

/// Geometric schedule `min(1000·2^j, N)`, ending exactly at `N`.
pub fn default_checkpoints(horizon: u64) -> Result<Checkpoints> {
    if horizon < CHECKPOINT_BASE {
        return Err(Error::invalid(format!(
            "horizon {horizon} is below the minimum of {CHECKPOINT_BASE}"
        )));
    }
    let mut values = Vec::new();
    let mut n = CHECKPOINT_BASE;
    while n < horizon {
        values.push(n);
        n *= 2;
    }
    values.push(horizon);
    Checkpoints::new(values)
}

pub const DEFAULT_EPS_LADDER: [f64; 3] = [0.5, 0.1, 0.02];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoughParams {
    pub r: f64,
    pub alpha: f64,
    pub eps_ladder: Vec<f64>,
}

impl RoughParams {
    pub fn new(r: f64, alpha: f64, eps_ladder: Vec<f64>) -> Result<Self> {
        if !(r.is_finite() && r >= 0.0) {
            return Err(Error::invalid(format!("r must be finite and >= 0, got {r}")));
        }
        validate_alpha(alpha)?;
        if eps_ladder.is_empty() {
            return Err(Error::invalid("eps ladder must be nonempty"));
        }
        if eps_ladder.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
            return Err(Error::invalid("eps ladder values must be positive"));
        }
        if eps_ladder.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::invalid("eps ladder must be strictly decreasing"));
        }
        Ok(RoughParams {
            r,
            alpha,
            eps_ladder,
        })
    }

    /// Parameters with the default ε ladder.
    pub fn with_defaults(r: f64, alpha: f64) -> Result<Self> {
        RoughParams::new(r, alpha, DEFAULT_EPS_LADDER.to_vec())
    }

    pub fn eps_min(&self) -> f64 {
        *self.eps_ladder.last().expect("nonempty by construction")
    }

    pub fn with_r(&self, r: f64) -> Result<Self> {
        RoughParams::new(r, self.alpha, self.eps_ladder.clone())
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        RoughParams::new(self.r, alpha, self.eps_ladder.clone())
    }

    pub fn with_ladder_scaled(&self, factor: f64) -> Result<Self> {
        RoughParams::new(
            self.r,
            self.alpha,
            self.eps_ladder.iter().map(|e| e * factor).collect(),
        )
    }
}

pub fn validate_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("alpha must lie in (0, 1], got {alpha}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(v: &[f64]) -> Point {
        Point::new(v.to_vec()).unwrap()
    }

    #[test]
    fn norm_examples() {
        assert_eq!(norm(&p(&[3.0, 4.0]), NormKind::L2), 5.0);
        assert_eq!(norm(&p(&[3.0, 4.0]), NormKind::L1), 7.0);
        assert_eq!(norm(&p(&[3.0, -4.0]), NormKind::Linf), 4.0);
    }

    #[test]
    fn point_rejects_empty_and_nan() {
        assert!(Point::new(vec![]).is_err());
        assert!(Point::new(vec![f64::NAN]).is_err());
        assert!(Point::new(vec![1.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn strict_convexity_flags() {
        assert!(NormKind::L2.strictly_convex());
        assert!(!NormKind::L1.strictly_convex());
        assert!(!NormKind::Linf.strictly_convex());
    }

    #[test]
    fn checkpoint_examples() {
        assert_eq!(default_checkpoints(4000).unwrap().values(), &[1000, 2000, 4000]);
        assert_eq!(default_checkpoints(1000).unwrap().values(), &[1000]);
        let big = default_checkpoints(1_000_000).unwrap();
        assert_eq!(big.values()[..3], [1000, 2000, 4000]);
        assert_eq!(big.values()[big.len() - 2..], [512_000, 1_000_000]);
        assert_eq!(big.len(), 11);
        assert!(default_checkpoints(999).is_err());
    }

    #[test]
    fn checkpoints_validate() {
        assert!(Checkpoints::new(vec![]).is_err());
        assert!(Checkpoints::new(vec![0, 5]).is_err());
        assert!(Checkpoints::new(vec![5, 5]).is_err());
        assert!(Checkpoints::new(vec![1, 2, 10]).is_ok());
    }

    #[test]
    fn params_validate() {
        assert!(RoughParams::with_defaults(-0.1, 1.0).is_err());
        assert!(RoughParams::with_defaults(1.0, 0.0).is_err());
        assert!(RoughParams::with_defaults(1.0, 1.1).is_err());
        assert!(RoughParams::new(1.0, 1.0, vec![0.1, 0.5]).is_err());
        assert!(RoughParams::new(1.0, 1.0, vec![0.5, -0.1]).is_err());
        let p = RoughParams::with_defaults(0.0, 0.5).unwrap();
        assert_eq!(p.eps_min(), 0.02);
    }

    #[test]
    fn point_parse_and_json() {
        assert_eq!("(1, -2.5)".parse::<Point>().unwrap(), p(&[1.0, -2.5]));
        assert_eq!("3".parse::<Point>().unwrap(), p(&[3.0]));
        let json = serde_json::to_string(&p(&[1.0, 2.0])).unwrap();
        assert_eq!(json, r#"{"coords":[1.0,2.0],"dim":2}"#);
        let bad: std::result::Result<Point, _> =
            serde_json::from_str(r#"{"coords":[1.0],"dim":2}"#);
        assert!(bad.is_err());
    }

    fn coords() -> impl Strategy<Value = Vec<f64>> {
        (1usize..4).prop_flat_map(|d| prop::collection::vec(-1e3f64..1e3, d))
    }

    fn kinds() -> impl Strategy<Value = NormKind> {
        prop_oneof![Just(NormKind::L1), Just(NormKind::L2), Just(NormKind::Linf)]
    }

    proptest! {
        #[test]
        fn norm_axioms(a in coords(), c in -50.0f64..50.0, kind in kinds(), seed in any::<u64>()) {
            let pa = Point::new(a.clone()).unwrap();
            let na = norm(&pa, kind);
            prop_assert!(na >= 0.0);
            prop_assert_eq!(na == 0.0, a.iter().all(|v| *v == 0.0));

            let scaled = norm(&pa.scale(c).unwrap(), kind);
            prop_assert!((scaled - c.abs() * na).abs() <= 1e-12 * (c.abs() * na).max(1e-300));

            // second point of the same dimension for the triangle inequality
            let b: Vec<f64> = a.iter().enumerate()
                .map(|(i, v)| v * 0.37 - ((seed >> (i * 8)) & 0xff) as f64)
                .collect();
            let pb = Point::new(b).unwrap();
            let lhs = norm(&pa.add(&pb).unwrap(), kind);
            let rhs = na + norm(&pb, kind);
            prop_assert!(lhs <= rhs * (1.0 + 1e-12));
        }

        #[test]
        fn checkpoints_increasing_and_end_at_horizon(n in 1000u64..50_000_000) {
            let cps = default_checkpoints(n).unwrap();
            prop_assert_eq!(cps.horizon(), n);
            prop_assert!(cps.values().windows(2).all(|w| w[0] < w[1]));
        }
    }
}
