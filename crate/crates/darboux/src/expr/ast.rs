//! Abstract syntax tree, pretty printer and constant folding.

use super::VariableLayout;

/// Binary operators, ordered loosest-binding first in the grammar.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

/// Built-in unary functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
    Abs,
    Asinh,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Asinh => "arcsinh",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            "arcsinh" => Func::Asinh,
            _ => return None,
        })
    }
}

/// Expression tree with variable and parameter references already resolved
/// to indices in the layout they were parsed against.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Number(f64),
    Var(usize),
    Param(usize),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    /// True when the subtree references no chart variable (parameters are
    /// constants, so they do not count).
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Number(_) | Expr::Param(_) => true,
            Expr::Var(_) => false,
            Expr::Neg(a) => a.is_constant(),
            Expr::Bin(_, a, b) => a.is_constant() && b.is_constant(),
            Expr::Call(_, a) => a.is_constant(),
        }
    }
}

fn prec(op: BinOp) -> u8 {
    match op {
        BinOp::Add | BinOp::Sub => 1,
        BinOp::Mul | BinOp::Div => 2,
        BinOp::Pow => 4,
    }
}

const NEG_PREC: u8 = 3;
const ATOM_PREC: u8 = 5;

fn node_prec(e: &Expr) -> u8 {
    match e {
        Expr::Number(v) if *v < 0.0 => NEG_PREC,
        Expr::Number(_) | Expr::Var(_) | Expr::Param(_) | Expr::Call(..) => ATOM_PREC,
        Expr::Neg(_) => NEG_PREC,
        Expr::Bin(op, ..) => prec(*op),
    }
}

/// Render an expression with minimal parentheses; the result reparses to a
/// structurally identical tree.
pub fn pretty(expr: &Expr, layout: &VariableLayout) -> String {
    let mut out = String::new();
    write_expr(expr, layout, 0, &mut out);
    out
}

fn write_expr(e: &Expr, layout: &VariableLayout, min_prec: u8, out: &mut String) {
    let p = node_prec(e);
    let parens = p < min_prec;
    if parens {
        out.push('(');
    }
    match e {
        Expr::Number(v) => out.push_str(&format!("{v}")),
        Expr::Var(i) => out.push_str(&layout.vars()[*i]),
        Expr::Param(i) => out.push_str(&layout.params()[*i].0),
        Expr::Neg(a) => {
            out.push('-');
            write_expr(a, layout, NEG_PREC, out);
        }
        Expr::Bin(op, a, b) => {
            let (symbol, left_min, right_min) = match op {
                BinOp::Add => ("+", 1, 2),
                BinOp::Sub => ("-", 1, 2),
                BinOp::Mul => ("*", 2, 3),
                BinOp::Div => ("/", 2, 3),
                // right-associative: equal precedence parenthesizes on the left
                BinOp::Pow => ("^", 5, 4),
            };
            write_expr(a, layout, left_min, out);
            out.push_str(symbol);
            write_expr(b, layout, right_min, out);
        }
        Expr::Call(func, a) => {
            out.push_str(func.name());
            out.push('(');
            write_expr(a, layout, 0, out);
            out.push(')');
        }
    }
    if parens {
        out.push(')');
    }
}

/// Substitute parameter values and collapse constant subtrees. Subtrees whose
/// constant value would be non-finite (a written-out pole like `1/0`) are
/// left intact so evaluation reports the error at runtime.
pub(super) fn fold(expr: &Expr, params: &[f64]) -> Expr {
    match expr {
        Expr::Number(v) => Expr::Number(*v),
        Expr::Var(i) => Expr::Var(*i),
        Expr::Param(i) => Expr::Number(params[*i]),
        Expr::Neg(a) => {
            let a = fold(a, params);
            match a {
                Expr::Number(v) => Expr::Number(-v),
                other => Expr::Neg(Box::new(other)),
            }
        }
        Expr::Bin(op, a, b) => {
            let a = fold(a, params);
            let b = fold(b, params);
            if let (Expr::Number(x), Expr::Number(y)) = (&a, &b) {
                let v = match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => x / y,
                    BinOp::Pow => {
                        if y.fract() == 0.0 && y.abs() <= i32::MAX as f64 {
                            x.powi(*y as i32)
                        } else {
                            x.powf(*y)
                        }
                    }
                };
                if v.is_finite() {
                    return Expr::Number(v);
                }
            }
            Expr::Bin(*op, Box::new(a), Box::new(b))
        }
        Expr::Call(func, a) => {
            let a = fold(a, params);
            if let Expr::Number(x) = a {
                let v = match func {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Exp => x.exp(),
                    Func::Log => x.ln(),
                    Func::Sqrt => x.sqrt(),
                    Func::Abs => x.abs(),
                    Func::Asinh => x.asinh(),
                };
                if v.is_finite() {
                    return Expr::Number(v);
                }
                return Expr::Call(*func, Box::new(Expr::Number(x)));
            }
            Expr::Call(*func, Box::new(a))
        }
    }
}
