//! A small arithmetic expression language for scalar fields.
//!
//! Hamiltonians, potentials and section components are ordinary text like
//! `p1^2/(2*m) + q1^2/2 + lam*z`, parsed against a [`VariableLayout`] that
//! declares the chart variables and binds parameter values. Compiled
//! expressions evaluate on plain floats and on dual numbers, so every
//! compiled field has exact derivatives through [`crate::autodiff`].
//!
//! Grammar (`^` binds tightest and is right-associative, then unary minus,
//! then `* /`, then `+ -`, all left-associative):
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := factor (("*" | "/") factor)*
//! factor := unary ("^" factor)?
//! unary  := "-" unary | atom
//! atom   := NUMBER | IDENT | IDENT "(" expr ")" | "(" expr ")"
//! ```
//!
//! Identifiers are `[A-Za-z_][A-Za-z0-9_]*`; the functions are `sin`, `cos`,
//! `exp`, `log` (natural), `sqrt`, `abs` and `arcsinh`. Exponents must be
//! constant expressions so differentiation stays total.

mod ast;
mod parse;

pub use ast::{pretty, BinOp, Expr, Func};
pub use parse::parse;

use std::sync::Arc;

use thiserror::Error;

use crate::autodiff::{EvalError, EvalScalar, FieldFn, Scalar, ScalarField};

/// Errors surfaced while declaring layouts or parsing expressions.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum ParseError {
    #[error("syntax error at {line}:{col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("unknown identifier `{name}` at {line}:{col}")]
    UnknownIdentifier {
        name: String,
        line: usize,
        col: usize,
    },
    #[error("invalid layout: {0}")]
    Layout(String),
}

/// Ordered chart variables plus bound parameter values.
///
/// The variable order fixes the input order of every compiled field. The
/// contact chart is `(q^1..q^n, p_1..p_n, z)`; the homogeneous chart used by
/// [`crate::symplectify`] is `(q^1..q^n, z, P_1..P_n, P_z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct VariableLayout {
    vars: Vec<String>,
    params: Vec<(String, f64)>,
}

const FUNCTION_NAMES: [&str; 7] = ["sin", "cos", "exp", "log", "sqrt", "abs", "arcsinh"];

fn valid_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl VariableLayout {
    /// Layout over explicitly named variables, in order.
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Self, ParseError> {
        let layout = VariableLayout {
            vars: names.iter().map(|s| s.as_ref().to_string()).collect(),
            params: Vec::new(),
        };
        layout.validate()?;
        Ok(layout)
    }

    /// Canonical contact chart `q1..qn, p1..pn, z`.
    pub fn contact(n: usize) -> Self {
        let mut vars = Vec::with_capacity(2 * n + 1);
        for i in 1..=n {
            vars.push(format!("q{i}"));
        }
        for i in 1..=n {
            vars.push(format!("p{i}"));
        }
        vars.push("z".to_string());
        VariableLayout { vars, params: Vec::new() }
    }

    /// Contact chart with custom coordinate names.
    pub fn contact_named<S: AsRef<str>>(
        q: &[S],
        p: &[S],
        z: &str,
    ) -> Result<Self, ParseError> {
        if q.len() != p.len() || q.is_empty() {
            return Err(ParseError::Layout(
                "need matching, nonempty q and p name lists".to_string(),
            ));
        }
        let mut vars: Vec<String> = q.iter().map(|s| s.as_ref().to_string()).collect();
        vars.extend(p.iter().map(|s| s.as_ref().to_string()));
        vars.push(z.to_string());
        let layout = VariableLayout { vars, params: Vec::new() };
        layout.validate()?;
        Ok(layout)
    }

    /// Homogeneous chart `q1..qn, z, P1..Pn, Pz` on the symplectification.
    pub fn homogeneous(n: usize) -> Self {
        let mut vars = Vec::with_capacity(2 * n + 2);
        for i in 1..=n {
            vars.push(format!("q{i}"));
        }
        vars.push("z".to_string());
        for i in 1..=n {
            vars.push(format!("P{i}"));
        }
        vars.push("Pz".to_string());
        VariableLayout { vars, params: Vec::new() }
    }

    /// Bind (or rebind) a parameter value; returns the extended layout.
    pub fn with_param(mut self, name: &str, value: f64) -> Result<Self, ParseError> {
        if let Some(slot) = self.params.iter_mut().find(|(n, _)| n == name) {
            slot.1 = value;
            return Ok(self);
        }
        self.params.push((name.to_string(), value));
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<(), ParseError> {
        let mut seen = std::collections::BTreeSet::new();
        for name in self.vars.iter().chain(self.params.iter().map(|(n, _)| n)) {
            if !valid_identifier(name) {
                return Err(ParseError::Layout(format!("invalid name `{name}`")));
            }
            if FUNCTION_NAMES.contains(&name.as_str()) {
                return Err(ParseError::Layout(format!(
                    "`{name}` collides with a built-in function"
                )));
            }
            if !seen.insert(name.clone()) {
                return Err(ParseError::Layout(format!("duplicate name `{name}`")));
            }
        }
        if self.vars.is_empty() {
            return Err(ParseError::Layout("layout declares no variables".to_string()));
        }
        Ok(())
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn params(&self) -> &[(String, f64)] {
        &self.params
    }

    /// Number of variables, i.e. the input dimension of compiled fields.
    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn param_index(&self, name: &str) -> Option<usize> {
        self.params.iter().position(|(n, _)| n == name)
    }

    pub(crate) fn is_function(name: &str) -> bool {
        FUNCTION_NAMES.contains(&name)
    }
}

/// Compile a parsed expression into an evaluable scalar field.
///
/// Parameter values are substituted and constant subtrees folded here, so
/// evaluation never touches the parameter table; rebinding a parameter means
/// recompiling.
pub fn compile(expr: &Expr, layout: &VariableLayout) -> ScalarField {
    let values: Vec<f64> = layout.params.iter().map(|(_, v)| *v).collect();
    let folded = ast::fold(expr, &values);
    ScalarField::new(ExprField {
        ast: Arc::new(folded),
        dim: layout.dim(),
        params: values,
    })
}

/// Parse and compile in one step.
pub fn compile_str(source: &str, layout: &VariableLayout) -> Result<ScalarField, ParseError> {
    Ok(compile(&parse(source, layout)?, layout))
}

struct ExprField {
    ast: Arc<Expr>,
    dim: usize,
    params: Vec<f64>,
}

impl FieldFn for ExprField {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval<S: EvalScalar>(&self, x: &[S]) -> Result<S, EvalError> {
        let out = eval_node(&self.ast, x, &self.params)?;
        if !out.all_finite() {
            return Err(EvalError::NonFinite);
        }
        Ok(out)
    }
}

fn eval_node<S: Scalar>(node: &Expr, x: &[S], params: &[f64]) -> Result<S, EvalError> {
    match node {
        Expr::Number(c) => Ok(S::from_f64(*c)),
        Expr::Var(i) => Ok(x[*i]),
        Expr::Param(i) => Ok(S::from_f64(params[*i])),
        Expr::Neg(a) => Ok(-eval_node(a, x, params)?),
        Expr::Bin(op, a, b) => {
            let lhs = eval_node(a, x, params)?;
            match op {
                BinOp::Add => Ok(lhs + eval_node(b, x, params)?),
                BinOp::Sub => Ok(lhs - eval_node(b, x, params)?),
                BinOp::Mul => Ok(lhs * eval_node(b, x, params)?),
                BinOp::Div => {
                    let rhs = eval_node(b, x, params)?;
                    if rhs.re() == 0.0 {
                        return Err(EvalError::DivisionByZero);
                    }
                    Ok(lhs / rhs)
                }
                BinOp::Pow => {
                    // exponents are constant subtrees, so the value carries
                    // no derivative part
                    let exponent = eval_node(b, x, params)?.re();
                    pow_checked(lhs, exponent)
                }
            }
        }
        Expr::Call(func, a) => {
            let v = eval_node(a, x, params)?;
            match func {
                Func::Sin => Ok(v.sin()),
                Func::Cos => Ok(v.cos()),
                Func::Exp => Ok(v.exp()),
                Func::Log => {
                    if v.re() <= 0.0 {
                        return Err(EvalError::Domain { func: "log", arg: v.re() });
                    }
                    Ok(v.ln())
                }
                Func::Sqrt => {
                    if v.re() < 0.0 {
                        return Err(EvalError::Domain { func: "sqrt", arg: v.re() });
                    }
                    Ok(v.sqrt())
                }
                Func::Abs => Ok(v.abs()),
                Func::Asinh => Ok(v.asinh()),
            }
        }
    }
}

fn pow_checked<S: Scalar>(base: S, exponent: f64) -> Result<S, EvalError> {
    let is_integer = exponent.fract() == 0.0 && exponent.abs() <= i32::MAX as f64;
    if is_integer {
        let n = exponent as i32;
        if n < 0 && base.re() == 0.0 {
            return Err(EvalError::DivisionByZero);
        }
        Ok(base.powi(n))
    } else {
        if base.re() < 0.0 {
            return Err(EvalError::Domain { func: "pow", arg: base.re() });
        }
        if base.re() == 0.0 && exponent < 0.0 {
            return Err(EvalError::DivisionByZero);
        }
        Ok(base.powf(exponent))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn layout1() -> VariableLayout {
        VariableLayout::contact(1)
            .with_param("m", 1.0)
            .unwrap()
            .with_param("lam", 0.1)
            .unwrap()
    }

    #[test]
    fn undeclared_identifier_is_rejected() {
        let err = parse("p1^2/(2*m) + V", &layout1()).unwrap_err();
        match err {
            ParseError::UnknownIdentifier { name, .. } => assert_eq!(name, "V"),
            other => panic!("expected UnknownIdentifier, got {other:?}"),
        }
    }

    #[test]
    fn dissipative_hamiltonian_parses() {
        let expr = parse("p1^2/(2*m) + q1^2/2 + lam*z", &layout1()).unwrap();
        let h = compile(&expr, &layout1());
        assert!((h.eval(&[1.0, 1.0, 1.0]).unwrap() - 1.1).abs() < 1e-15);
    }

    #[test]
    fn thermodynamic_hamiltonian_parses() {
        let layout = VariableLayout::contact_named(
            &["S", "V", "N"],
            &["T", "negP", "mu"],
            "U",
        )
        .unwrap()
        .with_param("R", 2.0)
        .unwrap();
        let expr = parse("T*S - R*N*T + mu*N - U", &layout).unwrap();
        let h = compile(&expr, &layout);
        // at S=V=N=T=mu=U=1 (negP unused): 1 - 2 + 1 - 1 = -1
        assert_eq!(h.eval(&[1.0, 1.0, 1.0, 1.0, -1.0, 1.0, 1.0]).unwrap(), -1.0);
    }

    #[test]
    fn zero_field_compiles() {
        let layout = layout1();
        let f = compile_str("0", &layout).unwrap();
        let x = [0.3, -2.0, 5.0];
        assert_eq!(f.eval(&x).unwrap(), 0.0);
        assert_eq!(f.gradient(&x).unwrap(), vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn monomial_partials() {
        let layout = VariableLayout::contact(1);
        let f = compile_str("q1*p1", &layout).unwrap();
        let x = [2.0, 3.0, 0.0];
        assert_eq!(f.eval(&x).unwrap(), 6.0);
        assert_eq!(f.partial(0, &x).unwrap(), 3.0);
        assert_eq!(f.partial(1, &x).unwrap(), 2.0);
    }

    #[test]
    fn exponential_derivative() {
        let layout = VariableLayout::new(&["q1"]).unwrap();
        let f = compile_str("exp(2*q1)", &layout).unwrap();
        let e = std::f64::consts::E;
        assert!((f.eval(&[0.5]).unwrap() - e).abs() < 1e-14);
        assert!((f.partial(0, &[0.5]).unwrap() - 2.0 * e).abs() < 1e-13);
        // cross-check against a central difference
        let report = crate::autodiff::fd_check(&f, &[(-1.0, 1.0)], 50, 1e-6, 1e-6, 3).unwrap();
        assert!(report.pass());
    }

    #[test]
    fn precedence_and_associativity() {
        let layout = VariableLayout::new(&["x"]).unwrap();
        let eval = |src: &str, at: f64| {
            compile_str(src, &layout).unwrap().eval(&[at]).unwrap()
        };
        assert_eq!(eval("1+2*3", 0.0), 7.0);
        assert_eq!(eval("6/3/2", 0.0), 1.0); // left-associative
        assert_eq!(eval("2^3^2", 0.0), 512.0); // right-associative
        assert_eq!(eval("-2^2", 0.0), -4.0); // ^ binds tighter than unary -
        assert_eq!(eval("2*-3", 0.0), -6.0);
        assert_eq!(eval("x^2", -3.0), 9.0);
    }

    #[test]
    fn variable_exponent_is_rejected() {
        let layout = VariableLayout::contact(1);
        let err = parse("q1^p1", &layout).unwrap_err();
        assert!(matches!(err, ParseError::Syntax { .. }), "{err:?}");
        // parameters are constants, so they are fine in exponents
        let l = layout1();
        assert!(parse("q1^(2*m)", &l).is_ok());
    }

    #[test]
    fn poles_error_instead_of_propagating_infinity() {
        let layout = VariableLayout::new(&["x"]).unwrap();
        let f = compile_str("1/x", &layout).unwrap();
        assert_eq!(f.eval(&[0.0]), Err(EvalError::DivisionByZero));
        let g = compile_str("log(x)", &layout).unwrap();
        assert!(matches!(g.eval(&[-1.0]), Err(EvalError::Domain { .. })));
        assert!(matches!(g.eval(&[0.0]), Err(EvalError::Domain { .. })));
        let s = compile_str("sqrt(x)", &layout).unwrap();
        assert!(matches!(s.eval(&[-0.5]), Err(EvalError::Domain { .. })));
        let p = compile_str("x^-2", &layout).unwrap();
        assert_eq!(p.eval(&[0.0]), Err(EvalError::DivisionByZero));
        assert!((p.eval(&[2.0]).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn parameters_are_folded_at_compile_time() {
        let layout = VariableLayout::new(&["x"])
            .unwrap()
            .with_param("k", 3.0)
            .unwrap();
        let expr = parse("k*x + k", &layout).unwrap();
        let f = compile(&expr, &layout);
        assert_eq!(f.eval(&[2.0]).unwrap(), 9.0);
        // rebinding requires a recompile and does not affect the old field
        let layout2 = layout.with_param("k", 5.0).unwrap();
        let g = compile(&expr, &layout2);
        assert_eq!(f.eval(&[2.0]).unwrap(), 9.0);
        assert_eq!(g.eval(&[2.0]).unwrap(), 15.0);
    }

    #[test]
    fn layout_rejects_collisions() {
        assert!(VariableLayout::new(&["x", "x"]).is_err());
        assert!(VariableLayout::new(&["sin"]).is_err());
        assert!(VariableLayout::new(&["2bad"]).is_err());
        assert!(VariableLayout::new(&["x"])
            .unwrap()
            .with_param("x", 1.0)
            .is_err());
    }

    #[test]
    fn compiled_fields_are_shareable_across_threads() {
        fn assert_send_sync<T: Send + Sync>(_: &T) {}
        let layout = VariableLayout::contact(1);
        let f = compile_str("sin(q1)*p1 + z^2", &layout).unwrap();
        assert_send_sync(&f);
        let expected = f.eval(&[0.5, 2.0, 1.0]).unwrap();
        let handles: Vec<_> = (0..4)
            .map(|_| {
                let f = f.clone();
                std::thread::spawn(move || f.eval(&[0.5, 2.0, 1.0]).unwrap())
            })
            .collect();
        for handle in handles {
            assert_eq!(handle.join().unwrap(), expected);
        }
    }

    // every compiled field must agree with central finite differences on
    // all of its partials; the generator stays within smooth, moderately
    // sized expressions so the comparison is meaningful
    mod fd_prop {
        use super::*;
        use crate::expr::ast::{BinOp, Expr, Func};
        use proptest::prelude::*;

        fn smooth_expr() -> impl Strategy<Value = Expr> {
            let leaf = prop_oneof![
                (-2.0..2.0f64).prop_map(|v| Expr::Number((v * 8.0).round() / 8.0)),
                (0usize..2).prop_map(Expr::Var),
            ];
            leaf.prop_recursive(3, 10, 2, |inner| {
                let func = prop_oneof![
                    Just(Func::Sin),
                    Just(Func::Cos),
                    Just(Func::Asinh),
                ];
                prop_oneof![
                    inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
                    (func, inner.clone()).prop_map(|(f, a)| Expr::Call(f, Box::new(a))),
                    (
                        prop_oneof![Just(BinOp::Add), Just(BinOp::Sub), Just(BinOp::Mul)],
                        inner.clone(),
                        inner.clone()
                    )
                        .prop_map(|(op, a, b)| Expr::Bin(op, Box::new(a), Box::new(b))),
                    (inner, 0u32..3).prop_map(|(a, e)| Expr::Bin(
                        BinOp::Pow,
                        Box::new(a),
                        Box::new(Expr::Number(e as f64))
                    )),
                ]
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]
            #[test]
            fn autodiff_matches_finite_differences(ast in smooth_expr(), seed in 0u64..1000) {
                let layout = VariableLayout::new(&["x", "y"]).unwrap();
                let f = compile(&ast, &layout);
                let report = crate::autodiff::fd_check(
                    &f,
                    &[(-2.0, 2.0), (-2.0, 2.0)],
                    100,
                    1e-6,
                    1e-6,
                    seed,
                )
                .unwrap();
                prop_assert!(
                    report.pass(),
                    "worst rel error {} on `{}`",
                    report.worst_rel_error,
                    pretty(&ast, &layout)
                );
            }
        }
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let layout = VariableLayout::new(&["x"]).unwrap();
        match parse("x + ", &layout).unwrap_err() {
            ParseError::Syntax { line, col, .. } => {
                assert_eq!(line, 1);
                assert!(col >= 4);
            }
            other => panic!("expected Syntax, got {other:?}"),
        }
        assert!(parse("x + (x", &layout).is_err());
        assert!(parse("x x", &layout).is_err());
        assert!(parse("x(2)", &layout).is_err()); // variable used as function
    }
}
