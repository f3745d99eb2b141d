//! Scalar field expressions: parsing, printing and evaluation with exact
//! first and second derivatives.

mod dual;
mod parser;

use std::fmt;

pub use dual::{Dual, Scalar};
pub use parser::{ParseError, ParseErrorKind};

use crate::error::{check_dim, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Function {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Abs,
}

impl Function {
    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Function::Sin,
            "cos" => Function::Cos,
            "tan" => Function::Tan,
            "exp" => Function::Exp,
            "log" => Function::Log,
            "sqrt" => Function::Sqrt,
            "abs" => Function::Abs,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Function::Sin => "sin",
            Function::Cos => "cos",
            Function::Tan => "tan",
            Function::Exp => "exp",
            Function::Log => "log",
            Function::Sqrt => "sqrt",
            Function::Abs => "abs",
        }
    }

    fn apply<T: Scalar>(self, v: &T) -> T {
        match self {
            Function::Sin => v.sin(),
            Function::Cos => v.cos(),
            Function::Tan => v.tan(),
            Function::Exp => v.exp(),
            Function::Log => v.ln(),
            Function::Sqrt => v.sqrt(),
            Function::Abs => v.abs(),
        }
    }
}

/// Expression tree. Variables are zero-based.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Number(f64),
    Var(usize),
    Neg(Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    Call(Function, Box<Expr>),
}

impl Expr {
    fn has_var(&self) -> bool {
        match self {
            Expr::Number(_) => false,
            Expr::Var(_) => true,
            Expr::Neg(e) | Expr::Call(_, e) => e.has_var(),
            Expr::Binary(_, l, r) => l.has_var() || r.has_var(),
        }
    }

    fn constant_value(&self) -> f64 {
        self.eval::<f64>(&[0.0])
    }

    fn eval<T: Scalar>(&self, vars: &[T]) -> T {
        match self {
            Expr::Number(v) => T::constant(*v, &vars[0]),
            Expr::Var(i) => vars[*i].clone(),
            Expr::Neg(e) => -e.eval(vars),
            Expr::Call(f, e) => f.apply(&e.eval(vars)),
            Expr::Binary(op, l, r) => {
                if *op == BinaryOp::Pow {
                    return pow(l, r, vars);
                }
                let (a, b) = (l.eval(vars), r.eval(vars));
                match op {
                    BinaryOp::Add => a + b,
                    BinaryOp::Sub => a - b,
                    BinaryOp::Mul => a * b,
                    BinaryOp::Div => a / b,
                    BinaryOp::Pow => unreachable!(),
                }
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary(BinaryOp::Add | BinaryOp::Sub, ..) => 1,
            Expr::Binary(BinaryOp::Mul | BinaryOp::Div, ..) => 2,
            Expr::Neg(_) => 3,
            Expr::Binary(BinaryOp::Pow, ..) => 4,
            _ => 5,
        }
    }
}

fn pow<T: Scalar>(base: &Expr, exponent: &Expr, vars: &[T]) -> T {
    let b = base.eval(vars);
    if exponent.has_var() {
        return (exponent.eval(vars) * b.ln()).exp();
    }
    let p = match exponent {
        Expr::Number(p) => *p,
        e => e.eval(&[0.0]),
    };
    if p.fract() == 0.0 && p.abs() <= i32::MAX as f64 {
        b.powi(p as i32)
    } else {
        b.powf(p)
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Number(v) => write!(f, "{v}"),
            Expr::Var(i) => write!(f, "x{}", i + 1),
            Expr::Neg(e) => {
                write!(f, "-")?;
                write_operand(f, e, e.precedence() < 3)
            }
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
            Expr::Binary(op, l, r) => {
                let (symbol, prec) = match op {
                    BinaryOp::Add => ("+", 1),
                    BinaryOp::Sub => ("-", 1),
                    BinaryOp::Mul => ("*", 2),
                    BinaryOp::Div => ("/", 2),
                    BinaryOp::Pow => ("^", 4),
                };
                if *op == BinaryOp::Pow {
                    write_operand(f, l, l.precedence() <= 4)?;
                    write!(f, "^")?;
                    write_operand(f, r, r.precedence() < 3)
                } else {
                    write_operand(f, l, l.precedence() < prec)?;
                    write!(f, " {symbol} ")?;
                    write_operand(f, r, r.precedence() <= prec)
                }
            }
        }
    }
}

/// A parsed scalar field `R^k -> R`.
///
/// ```
/// use shapeflow::expr::ScalarFieldExpr;
/// let phi = ScalarFieldExpr::parse("x1^2 + x2^2 - 1", 2).unwrap();
/// assert_eq!(phi.eval(&[1.0, 0.0]).unwrap(), 0.0);
/// assert_eq!(phi.gradient(&[1.0, 0.0]).unwrap().1, vec![2.0, 0.0]);
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarFieldExpr {
    source: String,
    ast: Expr,
    num_vars: usize,
}

impl ScalarFieldExpr {
    pub fn parse(text: &str, num_vars: usize) -> Result<Self> {
        let ast = parser::parse(text, num_vars)?;
        Ok(Self {
            source: text.to_string(),
            ast,
            num_vars,
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn ast(&self) -> &Expr {
        &self.ast
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// Whether the expression is independent of every variable.
    pub fn is_constant(&self) -> bool {
        !self.ast.has_var()
    }

    pub fn eval_generic<T: Scalar>(&self, vars: &[T]) -> Result<T> {
        check_dim(self.num_vars, vars.len())?;
        if vars.is_empty() {
            return Err(crate::error::Error::invalid(
                "expressions need at least one variable to evaluate generically",
            ));
        }
        Ok(self.ast.eval(vars))
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.num_vars, x.len())?;
        if x.is_empty() {
            return Ok(self.ast.constant_value());
        }
        Ok(self.ast.eval(x))
    }

    /// Value and gradient.
    pub fn gradient(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        let n = x.len();
        let vars: Vec<Dual<f64>> = x
            .iter()
            .enumerate()
            .map(|(i, &v)| Dual::variable(v, i, n))
            .collect();
        let r = self.eval_generic(&vars)?;
        Ok((r.re, r.eps))
    }

    /// Value, gradient and Hessian.
    pub fn hessian(&self, x: &[f64]) -> Result<(f64, Vec<f64>, Vec<Vec<f64>>)> {
        let n = x.len();
        let vars: Vec<Dual<Dual<f64>>> = x
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let re = Dual::variable(v, i, n);
                let eps = (0..n)
                    .map(|j| Dual::constant(if i == j { 1.0 } else { 0.0 }, &re))
                    .collect();
                Dual { re, eps }
            })
            .collect();
        let r = self.eval_generic(&vars)?;
        let value = r.re.re;
        let grad = r.re.eps.clone();
        let hess = r.eps.iter().map(|d| d.eps.clone()).collect();
        Ok((value, grad, hess))
    }
}

impl fmt::Display for ScalarFieldExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.ast)
    }
}

/// Parses `text` as a field in `num_vars` variables.
pub fn parse_scalar_field(text: &str, num_vars: usize) -> Result<ScalarFieldExpr> {
    ScalarFieldExpr::parse(text, num_vars)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn parse_err(text: &str, n: usize) -> ParseError {
        match ScalarFieldExpr::parse(text, n) {
            Err(Error::Parse(e)) => e,
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn circle_level_set() {
        let e = ScalarFieldExpr::parse("x1^2+x2^2-1", 2).unwrap();
        assert_eq!(e.eval(&[1.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn cosine_derivative() {
        let e = ScalarFieldExpr::parse("cos(u1)", 1).unwrap();
        assert_eq!(e.gradient(&[0.0]).unwrap().1, vec![0.0]);
    }

    #[test]
    fn error_offsets() {
        assert_eq!(parse_err("x1 +* x2", 2).offset, 4);
        assert!(matches!(
            parse_err("x3", 2).kind,
            ParseErrorKind::UnknownVariable(_)
        ));
        assert!(matches!(
            parse_err("foo(x1)", 2).kind,
            ParseErrorKind::UnknownFunction(_)
        ));
        assert!(matches!(
            parse_err("sin(x1, x2)", 2).kind,
            ParseErrorKind::Arity { found: 2, .. }
        ));
        assert_eq!(parse_err("(x1", 1).kind, ParseErrorKind::UnexpectedEnd);
        assert_eq!(parse_err("   ", 1).kind, ParseErrorKind::Empty);
        assert_eq!(parse_err("x1 $", 1).offset, 3);
    }

    #[test]
    fn precedence_and_associativity() {
        let e = |s: &str| ScalarFieldExpr::parse(s, 1).unwrap().eval(&[2.0]).unwrap();
        assert_eq!(e("-x1^2"), -4.0);
        assert_eq!(e("2^3^2"), 512.0);
        assert_eq!(e("2^-1"), 0.5);
        assert_eq!(e("8/2/2"), 2.0);
        assert_eq!(e("1-2-3"), -4.0);
        assert_eq!(e("1+2*3"), 7.0);
        assert_eq!(e("x1^x1"), 4.0);
        assert!((e("pi") - std::f64::consts::PI).abs() < 1e-15);
        assert_eq!(e("1.5e1"), 15.0);
    }

    #[test]
    fn printing_is_stable() {
        for text in [
            "x1^2+x2^2-1",
            "-(x1 - x2)",
            "(x1^2)^3",
            "x1-(x2-1)",
            "x1/(x2*x1)",
            "-x1^-2",
            "(-x1)^2",
            "sin(x1)*cos(x2)/exp(-x1)",
        ] {
            let e = ScalarFieldExpr::parse(text, 2).unwrap();
            let printed = e.to_string();
            let again = ScalarFieldExpr::parse(&printed, 2).unwrap();
            assert_eq!(again.ast(), e.ast(), "{text} -> {printed}");
            assert_eq!(again.to_string(), printed);
        }
    }

    #[test]
    fn hessian_matches_hand_derivation() {
        // x1^2 x2 + sin(x2)
        let e = ScalarFieldExpr::parse("x1^2*x2 + sin(x2)", 2).unwrap();
        let (v, g, h) = e.hessian(&[1.5, 0.5]).unwrap();
        assert!((v - (2.25 * 0.5 + 0.5f64.sin())).abs() < 1e-15);
        assert!((g[0] - 1.5).abs() < 1e-15);
        assert!((g[1] - (2.25 + 0.5f64.cos())).abs() < 1e-15);
        assert!((h[0][0] - 1.0).abs() < 1e-15);
        assert!((h[0][1] - 3.0).abs() < 1e-15);
        assert!((h[1][0] - 3.0).abs() < 1e-15);
        assert!((h[1][1] + 0.5f64.sin()).abs() < 1e-15);
    }
}
