use thiserror::Error;

use super::ast::{BinOp, Expr, Func, LogicOp};
use super::introots;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("evaluation error at n = {k} in `{expr}`: {message}")]
pub struct EvalError {
    pub k: u64,
    pub expr: String,
    pub message: String,
}

fn fail(e: &Expr, k: u64, message: impl Into<String>) -> EvalError {
    EvalError {
        k,
        expr: e.to_string(),
        message: message.into(),
    }
}

/// Largest integer exactly representable in an f64.
const EXACT_INT: f64 = 9_007_199_254_740_992.0;

fn as_exact_int(v: f64) -> Option<i64> {
    (v.fract() == 0.0 && v.abs() <= EXACT_INT).then_some(v as i64)
}

fn as_natural(v: f64) -> Option<u64> {
    as_exact_int(v).and_then(|i| u64::try_from(i).ok())
}

/// `base^exp` with exact signs for integral exponents; `(-1)^n` is decided
/// by parity alone.
pub(crate) fn power(base: f64, exp: f64) -> f64 {
    match as_exact_int(exp) {
        Some(e) if base == -1.0 => {
            if e % 2 == 0 {
                1.0
            } else {
                -1.0
            }
        }
        Some(e) if base == 1.0 || e == 0 => 1.0,
        Some(e) if i32::try_from(e).is_ok() => base.powi(e as i32),
        _ => base.powf(exp),
    }
}

fn finite(v: f64, e: &Expr, k: u64) -> Result<f64, EvalError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(fail(e, k, format!("non-finite result {v}")))
    }
}

pub(crate) fn eval_num(e: &Expr, k: u64) -> Result<f64, EvalError> {
    match e {
        Expr::Num(v) => Ok(*v),
        Expr::Index => Ok(k as f64),
        Expr::Neg(inner) => Ok(-eval_num(inner, k)?),
        Expr::Binary(op, a, b) => {
            let x = eval_num(a, k)?;
            let y = eval_num(b, k)?;
            let v = match op {
                BinOp::Add => x + y,
                BinOp::Sub => x - y,
                BinOp::Mul => x * y,
                BinOp::Div => {
                    if y == 0.0 {
                        return Err(fail(e, k, "division by zero"));
                    }
                    x / y
                }
                BinOp::Mod => {
                    let (Some(xi), Some(yi)) = (as_exact_int(x), as_exact_int(y)) else {
                        return Err(fail(
                            e,
                            k,
                            format!("'%' needs integral operands, got {x} and {y}"),
                        ));
                    };
                    if yi == 0 {
                        return Err(fail(e, k, "modulo by zero"));
                    }
                    xi.rem_euclid(yi) as f64
                }
                BinOp::Pow => power(x, y),
            };
            finite(v, e, k)
        }
        Expr::Call(func, args) => {
            let x = eval_num(&args[0], k)?;
            let v = match func {
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Abs => x.abs(),
                Func::Floor => x.floor(),
                Func::Sqrt => {
                    if x < 0.0 {
                        return Err(fail(e, k, format!("sqrt of negative value {x}")));
                    }
                    x.sqrt()
                }
                Func::Ln => {
                    if x <= 0.0 {
                        return Err(fail(e, k, format!("ln of nonpositive value {x}")));
                    }
                    x.ln()
                }
                Func::Pow => power(x, eval_num(&args[1], k)?),
                Func::IsSquare | Func::IsCube | Func::IsPower => {
                    return Err(fail(e, k, "boolean function used as a number"))
                }
            };
            finite(v, e, k)
        }
        Expr::If(c, t, f) => {
            if eval_bool(c, k)? {
                eval_num(t, k)
            } else {
                eval_num(f, k)
            }
        }
        Expr::Not(_) | Expr::Cmp(..) | Expr::Logic(..) => {
            Err(fail(e, k, "boolean expression used as a number"))
        }
    }
}

pub(crate) fn eval_bool(e: &Expr, k: u64) -> Result<bool, EvalError> {
    match e {
        Expr::Not(inner) => Ok(!eval_bool(inner, k)?),
        Expr::Cmp(op, a, b) => Ok(op.apply(eval_num(a, k)?, eval_num(b, k)?)),
        Expr::Logic(LogicOp::And, a, b) => Ok(eval_bool(a, k)? && eval_bool(b, k)?),
        Expr::Logic(LogicOp::Or, a, b) => Ok(eval_bool(a, k)? || eval_bool(b, k)?),
        Expr::Call(func, args) => {
            let x = eval_num(&args[0], k)?;
            match func {
                Func::IsSquare => Ok(as_natural(x).is_some_and(introots::is_square)),
                Func::IsCube => Ok(as_natural(x).is_some_and(introots::is_cube)),
                Func::IsPower => {
                    let p = eval_num(&args[1], k)?;
                    let p = as_natural(p)
                        .filter(|p| *p >= 1 && *p <= u32::MAX as u64)
                        .ok_or_else(|| {
                            fail(e, k, format!("is_power order must be a positive integer, got {p}"))
                        })?;
                    Ok(as_natural(x).is_some_and(|v| introots::is_perfect_power(v, p as u32)))
                }
                _ => Err(fail(e, k, "numeric function used as a condition")),
            }
        }
        Expr::If(c, t, f) => {
            if eval_bool(c, k)? {
                eval_bool(t, k)
            } else {
                eval_bool(f, k)
            }
        }
        _ => Err(fail(e, k, "numeric expression used as a condition")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parity_power_is_exact() {
        for n in 1..2000u64 {
            let v = power(-1.0, n as f64);
            assert_eq!(v, if n % 2 == 0 { 1.0 } else { -1.0 });
        }
        assert_eq!(power(-1.0, 1e15 + 1.0), -1.0);
        assert_eq!(power(2.0, 10.0), 1024.0);
        assert!(power(-2.0, 0.5).is_nan());
    }

    #[test]
    fn natural_conversion() {
        assert_eq!(as_natural(4.0), Some(4));
        assert_eq!(as_natural(4.5), None);
        assert_eq!(as_natural(-4.0), None);
        assert_eq!(as_natural(1e300), None);
    }
}
