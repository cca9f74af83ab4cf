use crate::error::{Error, Result};
use crate::seqdsl::{parse_predicate, BinOp, EvalError, Expr, Sequence, SequenceSpec};
use crate::space::{NormKind, Point};

/// `y_k = ξ` inside the closed r-ball around ξ, otherwise `x_k` moved a
/// distance r toward ξ.
pub fn project_point(x: &[f64], xi: &[f64], r: f64, norm: NormKind, out: &mut [f64]) {
    let d = norm.dist(x, xi);
    if d <= r {
        out.copy_from_slice(xi);
    } else {
        let t = r / d;
        for ((o, &a), &b) in out.iter_mut().zip(x).zip(xi) {
            *o = a + t * (b - a);
        }
    }
}

/// The radial projection of a sequence toward ξ.
#[derive(Debug, Clone)]
pub struct ProjectedSequence<S> {
    inner: S,
    xi: Point,
    r: f64,
    norm: NormKind,
}

impl<S: Sequence> ProjectedSequence<S> {
    pub fn xi(&self) -> &Point {
        &self.xi
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn inner(&self) -> &S {
        &self.inner
    }
}

impl<S: Sequence> Sequence for ProjectedSequence<S> {
    fn dim(&self) -> usize {
        self.xi.dim()
    }

    fn eval_into(&self, k: u64, out: &mut [f64]) -> Result<(), EvalError> {
        let mut x = vec![0.0; self.dim()];
        self.inner.eval_into(k, &mut x)?;
        project_point(&x, self.xi.coords(), self.r, self.norm, out);
        Ok(())
    }

    fn describe(&self) -> String {
        format!(
            "project({}, xi={}, r={}, {})",
            self.inner.describe(),
            self.xi,
            self.r,
            self.norm
        )
    }
}

pub fn project_toward<S: Sequence>(
    x: S,
    xi: &Point,
    r: f64,
    norm: NormKind,
) -> Result<ProjectedSequence<S>> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::invalid(format!("projection radius must be positive, got {r}")));
    }
    if x.dim() != xi.dim() {
        return Err(Error::invalid(format!(
            "dimension mismatch: sequence has dim {}, xi has dim {}",
            x.dim(),
            xi.dim()
        )));
    }
    Ok(ProjectedSequence {
        inner: x,
        xi: xi.clone(),
        r,
        norm,
    })
}

/// `c · x_k`, built on the expression tree.
pub fn scale_sequence(x: &SequenceSpec, c: f64) -> Result<SequenceSpec> {
    if !c.is_finite() {
        return Err(Error::invalid(format!("scale factor must be finite, got {c}")));
    }
    SequenceSpec::from_components(
        x.components()
            .iter()
            .map(|comp| Expr::binary(BinOp::Mul, Expr::num(c), comp.clone()))
            .collect(),
    )
}

/// `x_k + y_k`, built on the expression tree.
pub fn sum_sequences(x: &SequenceSpec, y: &SequenceSpec) -> Result<SequenceSpec> {
    if x.dim() != y.dim() {
        return Err(Error::invalid(format!(
            "dimension mismatch: {} vs {}",
            x.dim(),
            y.dim()
        )));
    }
    SequenceSpec::from_components(
        x.components()
            .iter()
            .zip(y.components())
            .map(|(a, b)| Expr::binary(BinOp::Add, a.clone(), b.clone()))
            .collect(),
    )
}

/// The subsequence `j ↦ x_{a·j + b}`.
pub fn restrict_to_ap(x: &SequenceSpec, a: u64, b: u64) -> Result<SequenceSpec> {
    if a == 0 {
        return Err(Error::invalid("progression step a must be >= 1"));
    }
    if a == 1 && b == 0 {
        return Ok(x.clone());
    }
    let mut index = Expr::Index;
    if a != 1 {
        index = Expr::binary(BinOp::Mul, Expr::num(a as f64), index);
    }
    if b != 0 {
        index = Expr::binary(BinOp::Add, index, Expr::num(b as f64));
    }
    SequenceSpec::from_components(
        x.components()
            .iter()
            .map(|c| c.substitute_index(&index))
            .collect(),
    )
}

/// Deterministic unit vectors `±e_i`, cycling through the axes with period
/// `2·dim`, multiplied by `r`.
pub fn unit_direction_sequence(dim: usize, r: f64) -> Result<SequenceSpec> {
    if dim == 0 {
        return Err(Error::invalid("dimension must be >= 1"));
    }
    let period = 2 * dim;
    let comps = (0..dim)
        .map(|i| {
            let pos = parse_predicate(&format!("n % {period} == {}", 2 * i))
                .expect("static predicate");
            let neg = parse_predicate(&format!("n % {period} == {}", 2 * i + 1))
                .expect("static predicate");
            Expr::if_else(
                pos.ast().clone(),
                Expr::num(r),
                Expr::if_else(neg.ast().clone(), Expr::num(-r), Expr::num(0.0)),
            )
        })
        .collect();
    SequenceSpec::from_components(comps)
}
