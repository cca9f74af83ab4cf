use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Mod => "%",
            BinOp::Pow => "^",
        }
    }

    fn level(self) -> Level {
        match self {
            BinOp::Add | BinOp::Sub => Level::Sum,
            BinOp::Mul | BinOp::Div | BinOp::Mod => Level::Prod,
            BinOp::Pow => Level::Power,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub(crate) fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    pub(crate) fn apply(self, a: f64, b: f64) -> bool {
        match self {
            CmpOp::Eq => a == b,
            CmpOp::Ne => a != b,
            CmpOp::Lt => a < b,
            CmpOp::Le => a <= b,
            CmpOp::Gt => a > b,
            CmpOp::Ge => a >= b,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogicOp {
    And,
    Or,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Abs,
    Sqrt,
    Ln,
    Floor,
    Pow,
    IsSquare,
    IsCube,
    IsPower,
}

impl Func {
    pub const ALL: [Func; 10] = [
        Func::Sin,
        Func::Cos,
        Func::Abs,
        Func::Sqrt,
        Func::Ln,
        Func::Floor,
        Func::Pow,
        Func::IsSquare,
        Func::IsCube,
        Func::IsPower,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Abs => "abs",
            Func::Sqrt => "sqrt",
            Func::Ln => "ln",
            Func::Floor => "floor",
            Func::Pow => "pow",
            Func::IsSquare => "is_square",
            Func::IsCube => "is_cube",
            Func::IsPower => "is_power",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    pub fn arity(self) -> usize {
        match self {
            Func::Pow | Func::IsPower => 2,
            _ => 1,
        }
    }

    pub fn returns_bool(self) -> bool {
        matches!(self, Func::IsSquare | Func::IsCube | Func::IsPower)
    }
}

/// Expression tree of the sequence language. `Index` is the 1-based index `n`.
///
/// Parsed trees never contain negative `Num` literals: `-3` parses as
/// `Neg(Num(3))`. Use [`Expr::num`] to build constants programmatically.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Index,
    Neg(Box<Expr>),
    Not(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Cmp(CmpOp, Box<Expr>, Box<Expr>),
    Logic(LogicOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
    If(Box<Expr>, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn num(v: f64) -> Expr {
        if v.is_sign_negative() && v != 0.0 {
            Expr::Neg(Box::new(Expr::Num(-v)))
        } else {
            Expr::Num(v.abs())
        }
    }

    pub fn binary(op: BinOp, a: Expr, b: Expr) -> Expr {
        Expr::Binary(op, Box::new(a), Box::new(b))
    }

    pub fn if_else(cond: Expr, then: Expr, otherwise: Expr) -> Expr {
        Expr::If(Box::new(cond), Box::new(then), Box::new(otherwise))
    }

    /// Replaces every occurrence of the index symbol with `replacement`.
    pub fn substitute_index(&self, replacement: &Expr) -> Expr {
        let sub = |e: &Expr| Box::new(e.substitute_index(replacement));
        match self {
            Expr::Num(v) => Expr::Num(*v),
            Expr::Index => replacement.clone(),
            Expr::Neg(e) => Expr::Neg(sub(e)),
            Expr::Not(e) => Expr::Not(sub(e)),
            Expr::Binary(op, a, b) => Expr::Binary(*op, sub(a), sub(b)),
            Expr::Cmp(op, a, b) => Expr::Cmp(*op, sub(a), sub(b)),
            Expr::Logic(op, a, b) => Expr::Logic(*op, sub(a), sub(b)),
            Expr::Call(f, args) => Expr::Call(
                *f,
                args.iter().map(|a| a.substitute_index(replacement)).collect(),
            ),
            Expr::If(c, t, e) => Expr::If(sub(c), sub(t), sub(e)),
        }
    }

    fn level(&self) -> Level {
        match self {
            Expr::Num(v) if *v < 0.0 => Level::Unary,
            Expr::Num(_) | Expr::Index | Expr::Call(..) => Level::Atom,
            Expr::Neg(_) => Level::Unary,
            Expr::Not(_) => Level::Not,
            Expr::Binary(op, ..) => op.level(),
            Expr::Cmp(..) => Level::Cmp,
            Expr::Logic(LogicOp::And, ..) => Level::And,
            Expr::Logic(LogicOp::Or, ..) => Level::Or,
            // the else-branch of an `if` extends as far right as possible
            Expr::If(..) => Level::Top,
        }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, min: Level) -> fmt::Result {
        let wrap = self.level() < min;
        if wrap {
            f.write_str("(")?;
        }
        match self {
            Expr::Num(v) => write!(f, "{v}")?,
            Expr::Index => f.write_str("n")?,
            Expr::Neg(e) => {
                f.write_str("-")?;
                e.write(f, Level::Power)?;
            }
            Expr::Not(e) => {
                f.write_str("not ")?;
                e.write(f, Level::Cmp)?;
            }
            Expr::Binary(BinOp::Pow, a, b) => {
                a.write(f, Level::Atom)?;
                f.write_str("^")?;
                b.write(f, Level::Unary)?;
            }
            Expr::Binary(op, a, b) => {
                let lvl = op.level();
                a.write(f, lvl)?;
                write!(f, " {} ", op.symbol())?;
                b.write(f, lvl.next())?;
            }
            Expr::Cmp(op, a, b) => {
                a.write(f, Level::Sum)?;
                write!(f, " {} ", op.symbol())?;
                b.write(f, Level::Sum)?;
            }
            Expr::Logic(op, a, b) => {
                let (lvl, word) = match op {
                    LogicOp::And => (Level::And, "and"),
                    LogicOp::Or => (Level::Or, "or"),
                };
                a.write(f, lvl)?;
                write!(f, " {word} ")?;
                b.write(f, lvl.next())?;
            }
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    a.write(f, Level::Top)?;
                }
                f.write_str(")")?;
            }
            Expr::If(c, t, e) => {
                f.write_str("if ")?;
                c.write(f, Level::Top)?;
                f.write_str(" then ")?;
                t.write(f, Level::Top)?;
                f.write_str(" else ")?;
                e.write(f, Level::Top)?;
            }
        }
        if wrap {
            f.write_str(")")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Level {
    Top,
    Or,
    And,
    Not,
    Cmp,
    Sum,
    Prod,
    Unary,
    Power,
    Atom,
}

impl Level {
    fn next(self) -> Level {
        match self {
            Level::Top => Level::Or,
            Level::Or => Level::And,
            Level::And => Level::Not,
            Level::Not => Level::Cmp,
            Level::Cmp => Level::Sum,
            Level::Sum => Level::Prod,
            Level::Prod => Level::Unary,
            Level::Unary => Level::Power,
            Level::Power | Level::Atom => Level::Atom,
        }
    }
}

/// Pretty-prints with the minimum parentheses needed to reparse to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, Level::Top)
    }
}
