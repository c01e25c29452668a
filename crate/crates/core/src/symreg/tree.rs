//! Expression trees over (p2, sigma3) with protected evaluation.
//!
//! Grammar of the canonical prefix text form:
//!
//! ```text
//! expr   := '(' op expr expr ')'      binary op in { + - * / }
//!         | '(' op expr ')'          unary op in { log sqrt }
//!         | 'p2' | 'sigma3'          variables
//!         | number                   f64 literal, shortest round-trip form
//! ```
//!
//! Protected semantics keep evaluation total on the feature domain:
//! division returns sign(numerator) * 1e9 when |denominator| < 1e-9, log
//! clamps its argument to at least 1e-9, sqrt clamps to nonnegative.

use crate::error::{Error, Result};

pub const DIV_GUARD: f64 = 1e-9;
pub const DIV_SATURATE: f64 = 1e9;
pub const LOG_FLOOR: f64 = 1e-9;
/// Saturation bound on +, -, *: keeps pathological chains of saturated
/// divisions finite, so no intermediate can reach infinity (and no
/// inf - inf NaN can form).
pub const VALUE_CLAMP: f64 = 1e12;

fn clamp_value(v: f64) -> f64 {
    v.clamp(-VALUE_CLAMP, VALUE_CLAMP)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Feature {
    P2,
    Sigma3,
}

impl Feature {
    pub fn name(self) -> &'static str {
        match self {
            Feature::P2 => "p2",
            Feature::Sigma3 => "sigma3",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinaryOp {
    pub const ALL: [BinaryOp; 4] = [BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul, BinaryOp::Div];

    fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Log,
    Sqrt,
}

impl UnaryOp {
    pub const ALL: [UnaryOp; 2] = [UnaryOp::Log, UnaryOp::Sqrt];

    fn symbol(self) -> &'static str {
        match self {
            UnaryOp::Log => "log",
            UnaryOp::Sqrt => "sqrt",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExpressionTree {
    Const(f64),
    Var(Feature),
    Unary(UnaryOp, Box<ExpressionTree>),
    Binary(BinaryOp, Box<ExpressionTree>, Box<ExpressionTree>),
}

impl ExpressionTree {
    pub fn evaluate(&self, p2: f64, sigma3: f64) -> f64 {
        match self {
            ExpressionTree::Const(c) => *c,
            ExpressionTree::Var(Feature::P2) => p2,
            ExpressionTree::Var(Feature::Sigma3) => sigma3,
            ExpressionTree::Unary(UnaryOp::Log, a) => a.evaluate(p2, sigma3).max(LOG_FLOOR).ln(),
            ExpressionTree::Unary(UnaryOp::Sqrt, a) => a.evaluate(p2, sigma3).max(0.0).sqrt(),
            ExpressionTree::Binary(op, a, b) => {
                let x = a.evaluate(p2, sigma3);
                let y = b.evaluate(p2, sigma3);
                match op {
                    BinaryOp::Add => clamp_value(x + y),
                    BinaryOp::Sub => clamp_value(x - y),
                    BinaryOp::Mul => clamp_value(x * y),
                    BinaryOp::Div => {
                        if y.abs() < DIV_GUARD {
                            if x > 0.0 {
                                DIV_SATURATE
                            } else if x < 0.0 {
                                -DIV_SATURATE
                            } else {
                                0.0
                            }
                        } else {
                            clamp_value(x / y)
                        }
                    }
                }
            }
        }
    }

    /// Node count: operators plus operands.
    pub fn complexity(&self) -> usize {
        match self {
            ExpressionTree::Const(_) | ExpressionTree::Var(_) => 1,
            ExpressionTree::Unary(_, a) => 1 + a.complexity(),
            ExpressionTree::Binary(_, a, b) => 1 + a.complexity() + b.complexity(),
        }
    }

    pub fn mentions(&self, f: Feature) -> bool {
        match self {
            ExpressionTree::Const(_) => false,
            ExpressionTree::Var(v) => *v == f,
            ExpressionTree::Unary(_, a) => a.mentions(f),
            ExpressionTree::Binary(_, a, b) => a.mentions(f) || b.mentions(f),
        }
    }

    pub fn has_constant(&self) -> bool {
        match self {
            ExpressionTree::Const(_) => true,
            ExpressionTree::Var(_) => false,
            ExpressionTree::Unary(_, a) => a.has_constant(),
            ExpressionTree::Binary(_, a, b) => a.has_constant() || b.has_constant(),
        }
    }

    /// Pre-order visit of subtrees; index 0 is the tree itself.
    pub fn subtree(&self, index: usize) -> Option<&ExpressionTree> {
        fn walk<'a>(t: &'a ExpressionTree, idx: &mut usize, target: usize) -> Option<&'a ExpressionTree> {
            if *idx == target {
                return Some(t);
            }
            *idx += 1;
            match t {
                ExpressionTree::Const(_) | ExpressionTree::Var(_) => None,
                ExpressionTree::Unary(_, a) => walk(a, idx, target),
                ExpressionTree::Binary(_, a, b) => {
                    walk(a, idx, target).or_else(|| walk(b, idx, target))
                }
            }
        }
        walk(self, &mut 0, index)
    }

    /// Replace the subtree at pre-order `index` and return the new tree.
    pub fn with_replaced(&self, index: usize, replacement: ExpressionTree) -> ExpressionTree {
        fn walk(
            t: &ExpressionTree,
            idx: &mut usize,
            target: usize,
            rep: &ExpressionTree,
        ) -> ExpressionTree {
            if *idx == target {
                return rep.clone();
            }
            *idx += 1;
            match t {
                ExpressionTree::Const(_) | ExpressionTree::Var(_) => t.clone(),
                ExpressionTree::Unary(op, a) => {
                    ExpressionTree::Unary(*op, Box::new(walk(a, idx, target, rep)))
                }
                ExpressionTree::Binary(op, a, b) => {
                    let left = walk(a, idx, target, rep);
                    let right = walk(b, idx, target, rep);
                    ExpressionTree::Binary(*op, Box::new(left), Box::new(right))
                }
            }
        }
        walk(self, &mut 0, index, &replacement)
    }

    /// Mutable references to every constant leaf, pre-order.
    pub fn constants_mut(&mut self) -> Vec<&mut f64> {
        let mut out = Vec::new();
        fn walk<'a>(t: &'a mut ExpressionTree, out: &mut Vec<&'a mut f64>) {
            match t {
                ExpressionTree::Const(c) => out.push(c),
                ExpressionTree::Var(_) => {}
                ExpressionTree::Unary(_, a) => walk(a, out),
                ExpressionTree::Binary(_, a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
            }
        }
        walk(self, &mut out);
        out
    }

    /// Exact algebraic simplification: fold variable-free subtrees, strip
    /// arithmetic identities, merge constant factors/addends through
    /// associative chains, and rewrite x + x as 2 x. Every rule preserves the
    /// protected semantics on all inputs, so loss values are unchanged up to
    /// floating-point reassociation.
    pub fn simplify(&self) -> ExpressionTree {
        let mut current = self.clone();
        for _ in 0..6 {
            let mut next = simplify_once(&current);
            let flat = flatten_like_terms(&next);
            if flat.complexity() <= next.complexity() {
                next = flat;
            }
            if next == current {
                break;
            }
            current = next;
        }
        current
    }

    fn is_var_free(&self) -> bool {
        !self.mentions(Feature::P2) && !self.mentions(Feature::Sigma3)
    }

    pub fn to_prefix(&self) -> String {
        match self {
            ExpressionTree::Const(c) => format!("{c}"),
            ExpressionTree::Var(v) => v.name().to_string(),
            ExpressionTree::Unary(op, a) => format!("({} {})", op.symbol(), a.to_prefix()),
            ExpressionTree::Binary(op, a, b) => {
                format!("({} {} {})", op.symbol(), a.to_prefix(), b.to_prefix())
            }
        }
    }

    pub fn parse(text: &str) -> Result<ExpressionTree> {
        let tokens = tokenize(text);
        let mut pos = 0usize;
        let tree = parse_expr(&tokens, &mut pos)
            .map_err(|msg| Error::Validation(format!("tree parse error: {msg}")))?;
        if pos != tokens.len() {
            return Err(Error::Validation(format!(
                "tree parse error: trailing tokens after expression: {:?}",
                &tokens[pos..]
            )));
        }
        Ok(tree)
    }
}

fn simplify_once(t: &ExpressionTree) -> ExpressionTree {
    use BinaryOp::*;
    use ExpressionTree::*;
    // fold whole subtrees that contain no variables
    if t.is_var_free() {
        if let Const(_) = t {
        } else {
            return Const(t.evaluate(0.0, 0.0));
        }
    }
    match t {
        Const(_) | Var(_) => t.clone(),
        Unary(op, a) => Unary(*op, Box::new(simplify_once(a))),
        Binary(op, a, b) => {
            let a = simplify_once(a);
            let b = simplify_once(b);
            // canonicalize commutative ops: constant first
            let (a, b) = match (op, &a, &b) {
                (Add | Mul, _, Const(_)) if !matches!(a, Const(_)) => (b.clone(), a.clone()),
                _ => (a, b),
            };
            match (op, &a, &b) {
                (Add, Const(c), x) if *c == 0.0 => x.clone(),
                (Sub, x, Const(c)) if *c == 0.0 => x.clone(),
                (Mul, Const(c), x) if *c == 1.0 => x.clone(),
                (Mul, Const(c), _) if *c == 0.0 => Const(0.0),
                (Sub, x, y) if x == y => Const(0.0),
                (Add, x, y) if x == y => {
                    Binary(Mul, Box::new(Const(2.0)), Box::new(x.clone()))
                }
                // merge constants through associative chains
                (Add, Const(c1), Binary(Add, inner_a, inner_b)) => {
                    if let Const(c2) = inner_a.as_ref() {
                        Binary(Add, Box::new(Const(c1 + c2)), inner_b.clone())
                    } else {
                        Binary(*op, Box::new(a.clone()), Box::new(b.clone()))
                    }
                }
                (Mul, Const(c1), Binary(Mul, inner_a, inner_b)) => {
                    if let Const(c2) = inner_a.as_ref() {
                        Binary(Mul, Box::new(Const(c1 * c2)), inner_b.clone())
                    } else {
                        Binary(*op, Box::new(a.clone()), Box::new(b.clone()))
                    }
                }
                // division by a safely nonzero constant becomes multiplication
                (Div, x, Const(c)) if c.abs() >= 1e-6 => {
                    Binary(Mul, Box::new(Const(1.0 / c)), Box::new(x.clone()))
                }
                _ => Binary(*op, Box::new(a), Box::new(b)),
            }
        }
    }
}

/// Flatten +/- chains, split each addend into (coefficient, core), and
/// collect like terms. Exact up to floating-point reassociation; division
/// structure is left untouched so the protected guard fires identically.
fn flatten_like_terms(t: &ExpressionTree) -> ExpressionTree {
    use ExpressionTree::*;
    if !matches!(t, Binary(BinaryOp::Add | BinaryOp::Sub, _, _)) {
        return match t {
            Unary(op, a) => Unary(*op, Box::new(flatten_like_terms(a))),
            Binary(op, a, b) => Binary(
                *op,
                Box::new(flatten_like_terms(a)),
                Box::new(flatten_like_terms(b)),
            ),
            _ => t.clone(),
        };
    }
    let mut konst = 0.0;
    let mut terms: Vec<(f64, ExpressionTree)> = Vec::new();
    fn collect(
        t: &ExpressionTree,
        sign: f64,
        konst: &mut f64,
        terms: &mut Vec<(f64, ExpressionTree)>,
    ) {
        use ExpressionTree::*;
        match t {
            Binary(BinaryOp::Add, a, b) => {
                collect(a, sign, konst, terms);
                collect(b, sign, konst, terms);
            }
            Binary(BinaryOp::Sub, a, b) => {
                collect(a, sign, konst, terms);
                collect(b, -sign, konst, terms);
            }
            Const(c) => *konst += sign * c,
            Binary(BinaryOp::Mul, a, b) => {
                let core = flatten_like_terms(b);
                if let Const(c) = a.as_ref() {
                    terms.push((sign * c, core));
                } else {
                    terms.push((
                        sign,
                        Binary(BinaryOp::Mul, Box::new(flatten_like_terms(a)), Box::new(core)),
                    ));
                }
            }
            other => terms.push((sign, flatten_like_terms(other))),
        }
    }
    collect(t, 1.0, &mut konst, &mut terms);
    // merge coefficients of structurally identical cores, preserving first
    // appearance order
    let mut merged: Vec<(f64, ExpressionTree)> = Vec::new();
    for (coef, core) in terms {
        if let Some(slot) = merged.iter_mut().find(|(_, c)| *c == core) {
            slot.0 += coef;
        } else {
            merged.push((coef, core));
        }
    }
    merged.retain(|(coef, _)| *coef != 0.0);
    let render = |coef: f64, core: &ExpressionTree| -> ExpressionTree {
        if coef == 1.0 {
            core.clone()
        } else {
            Binary(BinaryOp::Mul, Box::new(Const(coef)), Box::new(core.clone()))
        }
    };
    let mut expr: Option<ExpressionTree> = (konst != 0.0).then_some(Const(konst));
    for (coef, core) in &merged {
        expr = Some(match expr {
            None => {
                if *coef < 0.0 {
                    Binary(
                        BinaryOp::Sub,
                        Box::new(Const(0.0)),
                        Box::new(render(-coef, core)),
                    )
                } else {
                    render(*coef, core)
                }
            }
            Some(acc) => {
                if *coef < 0.0 {
                    Binary(BinaryOp::Sub, Box::new(acc), Box::new(render(-coef, core)))
                } else {
                    Binary(BinaryOp::Add, Box::new(acc), Box::new(render(*coef, core)))
                }
            }
        });
    }
    expr.unwrap_or(Const(konst))
}

/// Flat postfix compilation of a tree, for fast repeated evaluation. Constant
/// leaves keep their instruction slots addressable so refinement can vary one
/// constant without recompiling.
#[derive(Debug, Clone)]
pub struct Program {
    instrs: Vec<Instr>,
    const_slots: Vec<usize>,
}

#[derive(Debug, Clone, Copy)]
enum Instr {
    Const(f64),
    P2,
    Sigma3,
    Un(UnaryOp),
    Bin(BinaryOp),
}

impl Program {
    pub fn compile(tree: &ExpressionTree) -> Program {
        let mut instrs = Vec::with_capacity(tree.complexity());
        let mut const_slots = Vec::new();
        fn walk(t: &ExpressionTree, instrs: &mut Vec<Instr>, consts: &mut Vec<usize>) {
            match t {
                ExpressionTree::Const(c) => {
                    consts.push(instrs.len());
                    instrs.push(Instr::Const(*c));
                }
                ExpressionTree::Var(Feature::P2) => instrs.push(Instr::P2),
                ExpressionTree::Var(Feature::Sigma3) => instrs.push(Instr::Sigma3),
                ExpressionTree::Unary(op, a) => {
                    walk(a, instrs, consts);
                    instrs.push(Instr::Un(*op));
                }
                ExpressionTree::Binary(op, a, b) => {
                    walk(a, instrs, consts);
                    walk(b, instrs, consts);
                    instrs.push(Instr::Bin(*op));
                }
            }
        }
        walk(tree, &mut instrs, &mut const_slots);
        Program {
            instrs,
            const_slots,
        }
    }

    pub fn n_constants(&self) -> usize {
        self.const_slots.len()
    }

    pub fn get_constant(&self, i: usize) -> f64 {
        match self.instrs[self.const_slots[i]] {
            Instr::Const(c) => c,
            _ => unreachable!("constant slot points at a constant"),
        }
    }

    pub fn set_constant(&mut self, i: usize, v: f64) {
        self.instrs[self.const_slots[i]] = Instr::Const(v);
    }

    /// Write the program's constants back into an identically shaped tree.
    pub fn store_constants(&self, tree: &mut ExpressionTree) {
        let mut slots = tree.constants_mut();
        assert_eq!(slots.len(), self.const_slots.len());
        for (i, slot) in slots.iter_mut().enumerate() {
            **slot = self.get_constant(i);
        }
    }

    pub fn eval(&self, p2: f64, sigma3: f64, stack: &mut Vec<f64>) -> f64 {
        stack.clear();
        for instr in &self.instrs {
            match instr {
                Instr::Const(c) => stack.push(*c),
                Instr::P2 => stack.push(p2),
                Instr::Sigma3 => stack.push(sigma3),
                Instr::Un(UnaryOp::Log) => {
                    let a = stack.pop().expect("stack underflow");
                    stack.push(a.max(LOG_FLOOR).ln());
                }
                Instr::Un(UnaryOp::Sqrt) => {
                    let a = stack.pop().expect("stack underflow");
                    stack.push(a.max(0.0).sqrt());
                }
                Instr::Bin(op) => {
                    let b = stack.pop().expect("stack underflow");
                    let a = stack.pop().expect("stack underflow");
                    stack.push(match op {
                        BinaryOp::Add => clamp_value(a + b),
                        BinaryOp::Sub => clamp_value(a - b),
                        BinaryOp::Mul => clamp_value(a * b),
                        BinaryOp::Div => {
                            if b.abs() < DIV_GUARD {
                                if a > 0.0 {
                                    DIV_SATURATE
                                } else if a < 0.0 {
                                    -DIV_SATURATE
                                } else {
                                    0.0
                                }
                            } else {
                                clamp_value(a / b)
                            }
                        }
                    });
                }
            }
        }
        stack.pop().expect("program leaves one value")
    }
}

fn tokenize(text: &str) -> Vec<String> {
    text.replace('(', " ( ")
        .replace(')', " ) ")
        .split_whitespace()
        .map(str::to_string)
        .collect()
}

fn parse_expr(tokens: &[String], pos: &mut usize) -> std::result::Result<ExpressionTree, String> {
    let tok = tokens.get(*pos).ok_or("unexpected end of input")?;
    *pos += 1;
    match tok.as_str() {
        "(" => {
            let op = tokens.get(*pos).ok_or("missing operator")?.clone();
            *pos += 1;
            let tree = match op.as_str() {
                "+" | "-" | "*" | "/" => {
                    let a = parse_expr(tokens, pos)?;
                    let b = parse_expr(tokens, pos)?;
                    let op = match op.as_str() {
                        "+" => BinaryOp::Add,
                        "-" => BinaryOp::Sub,
                        "*" => BinaryOp::Mul,
                        _ => BinaryOp::Div,
                    };
                    ExpressionTree::Binary(op, Box::new(a), Box::new(b))
                }
                "log" | "sqrt" => {
                    let a = parse_expr(tokens, pos)?;
                    let op = if op == "log" { UnaryOp::Log } else { UnaryOp::Sqrt };
                    ExpressionTree::Unary(op, Box::new(a))
                }
                other => return Err(format!("unknown operator '{other}'")),
            };
            match tokens.get(*pos) {
                Some(t) if t == ")" => {
                    *pos += 1;
                    Ok(tree)
                }
                _ => Err("missing closing parenthesis".into()),
            }
        }
        ")" => Err("unexpected ')'".into()),
        "p2" => Ok(ExpressionTree::Var(Feature::P2)),
        "sigma3" => Ok(ExpressionTree::Var(Feature::Sigma3)),
        num => num
            .parse::<f64>()
            .map(ExpressionTree::Const)
            .map_err(|_| format!("bad token '{num}'")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn var(f: Feature) -> ExpressionTree {
        ExpressionTree::Var(f)
    }

    #[test]
    fn evaluation_examples() {
        assert_eq!(var(Feature::P2).evaluate(0.2, 0.08), 0.2);
        // sigma3 / (p2 * p2 * p2) at (0.2, 0.08) = 10
        let t = ExpressionTree::parse("(/ sigma3 (* p2 (* p2 p2)))").unwrap();
        assert_relative_eq!(t.evaluate(0.2, 0.08), 10.0, epsilon = 1e-12);
        let t = ExpressionTree::parse("(log p2)").unwrap();
        assert_relative_eq!(t.evaluate(0.2, 0.0), 0.2f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn complexity_counts_nodes() {
        assert_eq!(var(Feature::P2).complexity(), 1);
        let t = ExpressionTree::parse("(+ p2 sigma3)").unwrap();
        assert_eq!(t.complexity(), 3);
        // the five-term scaffold written as a tree:
        // c0 + c1/(p2*p2) + c2*sigma3/(p2*p2*p2) + c3*p2 + c4*sigma3
        let scaffold = "(+ (+ (+ (+ 0 (/ 0.0022 (* p2 p2))) (/ (* -0.0011 sigma3) (* p2 (* p2 p2)))) (* 0.1245 p2)) (* 0.05 sigma3))";
        let t = ExpressionTree::parse(scaffold).unwrap();
        // operators: 4 (+), 2 (/), 6 (*); operands: 5 constants, 8 variables
        assert_eq!(t.complexity(), 25);
    }

    #[test]
    fn protected_operators_are_total() {
        let div = ExpressionTree::parse("(/ p2 sigma3)").unwrap();
        assert_eq!(div.evaluate(0.2, 0.0), DIV_SATURATE);
        let div = ExpressionTree::parse("(/ (- 0 p2) sigma3)").unwrap();
        assert_eq!(div.evaluate(0.2, 0.0), -DIV_SATURATE);
        let log = ExpressionTree::parse("(log (- 0 p2))").unwrap();
        assert!(log.evaluate(0.5, 0.0).is_finite());
        let sqrt = ExpressionTree::parse("(sqrt (- 0 p2))").unwrap();
        assert_eq!(sqrt.evaluate(0.5, 0.0), 0.0);
    }

    #[test]
    fn subtree_indexing_roundtrip() {
        let t = ExpressionTree::parse("(+ (* 2 p2) (log sigma3))").unwrap();
        assert_eq!(t.complexity(), 6);
        assert_eq!(t.subtree(0).unwrap(), &t);
        assert_eq!(t.subtree(2).unwrap(), &ExpressionTree::Const(2.0));
        let replaced = t.with_replaced(4, var(Feature::P2));
        assert_eq!(replaced.to_prefix(), "(+ (* 2 p2) p2)");
    }

    fn arb_tree() -> impl Strategy<Value = ExpressionTree> {
        let leaf = prop_oneof![
            (-2.0..2.0f64).prop_map(ExpressionTree::Const),
            Just(var(Feature::P2)),
            Just(var(Feature::Sigma3)),
        ];
        leaf.prop_recursive(4, 32, 2, |inner| {
            prop_oneof![
                (0usize..4, inner.clone(), inner.clone()).prop_map(|(o, a, b)| {
                    ExpressionTree::Binary(BinaryOp::ALL[o], Box::new(a), Box::new(b))
                }),
                (0usize..2, inner).prop_map(|(o, a)| {
                    ExpressionTree::Unary(UnaryOp::ALL[o], Box::new(a))
                }),
            ]
        })
    }

    proptest! {
        #[test]
        fn prefix_roundtrip(t in arb_tree()) {
            let text = t.to_prefix();
            let back = ExpressionTree::parse(&text).unwrap();
            prop_assert_eq!(t, back);
        }

        #[test]
        fn evaluation_never_nan_on_domain(t in arb_tree(), p2 in 0.2..1.0f64, sigma3 in 0.0..0.08f64) {
            let v = t.evaluate(p2, sigma3);
            prop_assert!(!v.is_nan());
        }

        #[test]
        fn program_matches_recursive_eval(t in arb_tree(), p2 in 0.2..1.0f64, sigma3 in 0.0..0.08f64) {
            let prog = Program::compile(&t);
            let mut stack = Vec::new();
            let a = prog.eval(p2, sigma3, &mut stack);
            let b = t.evaluate(p2, sigma3);
            prop_assert!(a == b || (a.is_nan() && b.is_nan()));
        }
    }
}
