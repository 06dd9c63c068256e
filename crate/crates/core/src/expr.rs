//! Closed expression grammar for metric components and profile functions.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' unary)?
//! atom  := number | ident | func '(' expr (',' expr)* ')' | '(' expr ')'
//! ```
//!
//! `^` binds tighter than unary minus (`-t^2` is `-(t^2)`) and is right
//! associative. Identifiers are resolved against a declared symbol list at
//! parse time; evaluation binds each symbol slot to a [`Jet2`].

use std::fmt;

use crate::error::{EvalError, EvalErrorKind, ParseError, ParseErrorKind};
use crate::jet::Jet2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
    Sqrt,
    Tanh,
    Abs,
    Pow,
}

impl Func {
    pub const ALL: [Func; 9] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Exp,
        Func::Ln,
        Func::Sqrt,
        Func::Tanh,
        Func::Abs,
        Func::Pow,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Tanh => "tanh",
            Func::Abs => "abs",
            Func::Pow => "pow",
        }
    }

    pub fn arity(self) -> usize {
        if self == Func::Pow {
            2
        } else {
            1
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Num(f64),
    /// `slot` indexes the symbol list the expression was parsed against.
    Var { name: String, slot: usize },
    Neg(Box<Node>),
    Binary {
        op: BinOp,
        lhs: Box<Node>,
        rhs: Box<Node>,
    },
    Call { func: Func, args: Vec<Node> },
}

/// A parsed, identifier-checked expression.
#[derive(Clone, Debug, PartialEq)]
pub struct Expression {
    root: Node,
}

pub fn parse_expression(src: &str, symbols: &[&str]) -> Result<Expression, ParseError> {
    let tokens = lex(src)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        symbols,
        src_len: src.len(),
    };
    let root = parser.expr()?;
    match parser.peek() {
        None => Ok(Expression { root }),
        Some(tok) => Err(parser.unexpected(tok.offset, &["operator", "end of input"])),
    }
}

impl Expression {
    pub fn constant(value: f64) -> Self {
        Self {
            root: Node::Num(value),
        }
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    /// Evaluate with `bindings[slot]` standing for each symbol.
    pub fn eval_jet2(&self, bindings: &[Jet2]) -> Result<Jet2, EvalError> {
        eval_node(&self.root, bindings)
    }

    /// Plain value with every symbol bound to a constant.
    pub fn eval_value(&self, values: &[f64]) -> Result<f64, EvalError> {
        let bindings: Vec<Jet2> = values.iter().map(|&v| Jet2::constant(v)).collect();
        Ok(self.eval_jet2(&bindings)?.value)
    }

    /// True when the expression mentions the symbol slot.
    pub fn uses_slot(&self, slot: usize) -> bool {
        fn walk(node: &Node, slot: usize) -> bool {
            match node {
                Node::Num(_) => false,
                Node::Var { slot: s, .. } => *s == slot,
                Node::Neg(inner) => walk(inner, slot),
                Node::Binary { lhs, rhs, .. } => walk(lhs, slot) || walk(rhs, slot),
                Node::Call { args, .. } => args.iter().any(|a| walk(a, slot)),
            }
        }
        walk(&self.root, slot)
    }
}

/// Convenience for the common case: coordinates occupy slots `0..4` and the
/// named parameters follow in order.
pub fn evaluate_jet2(
    expr: &Expression,
    point: [f64; 4],
    params: &[f64],
) -> Result<Jet2, EvalError> {
    let mut bindings: Vec<Jet2> = (0..4).map(|k| Jet2::variable(k, point[k])).collect();
    bindings.extend(params.iter().map(|&p| Jet2::constant(p)));
    expr.eval_jet2(&bindings)
}

fn domain(kind: EvalErrorKind, node: &Node) -> EvalError {
    EvalError {
        kind,
        subexpr: node.to_string(),
    }
}

fn eval_node(node: &Node, bindings: &[Jet2]) -> Result<Jet2, EvalError> {
    let out = match node {
        Node::Num(v) => Jet2::constant(*v),
        Node::Var { slot, .. } => *bindings
            .get(*slot)
            .ok_or_else(|| domain(EvalErrorKind::UnboundSymbol, node))?,
        Node::Neg(inner) => -eval_node(inner, bindings)?,
        Node::Binary { op, lhs, rhs } => {
            let a = eval_node(lhs, bindings)?;
            let b = eval_node(rhs, bindings)?;
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => {
                    if b.value == 0.0 {
                        return Err(domain(EvalErrorKind::DivisionByZero, node));
                    }
                    a / b
                }
                BinOp::Pow => power(a, b, node)?,
            }
        }
        Node::Call { func, args } => {
            let a = eval_node(&args[0], bindings)?;
            match func {
                Func::Sin => a.sin(),
                Func::Cos => a.cos(),
                Func::Tan => a.tan(),
                Func::Exp => a.exp(),
                Func::Tanh => a.tanh(),
                Func::Ln => {
                    if a.value <= 0.0 {
                        return Err(domain(EvalErrorKind::LnNonPositive, node));
                    }
                    a.ln()
                }
                Func::Sqrt => {
                    if a.value < 0.0 {
                        return Err(domain(EvalErrorKind::SqrtNegative, node));
                    }
                    if a.value == 0.0 {
                        if !a.is_constant() {
                            return Err(domain(EvalErrorKind::NonDifferentiable, node));
                        }
                        Jet2::ZERO
                    } else {
                        a.sqrt()
                    }
                }
                Func::Abs => {
                    if a.value == 0.0 && !a.is_constant() {
                        return Err(domain(EvalErrorKind::NonDifferentiable, node));
                    }
                    a.abs()
                }
                Func::Pow => {
                    let b = eval_node(&args[1], bindings)?;
                    power(a, b, node)?
                }
            }
        }
    };
    if !out.value.is_finite() {
        return Err(domain(EvalErrorKind::NonFinite, node));
    }
    Ok(out)
}

fn power(base: Jet2, exponent: Jet2, node: &Node) -> Result<Jet2, EvalError> {
    if exponent.is_constant() {
        let p = exponent.value;
        if p.fract() == 0.0 && p.abs() <= f64::from(i32::MAX) {
            if p < 0.0 && base.value == 0.0 {
                return Err(domain(EvalErrorKind::DivisionByZero, node));
            }
            return Ok(base.powi(p as i32));
        }
        if base.value < 0.0 {
            return Err(domain(EvalErrorKind::NegativeBaseFractionalPower, node));
        }
        if base.value == 0.0 && p < 2.0 && !base.is_constant() {
            return Err(domain(EvalErrorKind::NonDifferentiable, node));
        }
        return Ok(base.powf(p));
    }
    if base.value <= 0.0 {
        return Err(domain(EvalErrorKind::NegativeBaseFractionalPower, node));
    }
    Ok((exponent * base.ln()).exp())
}

// --- printing ---------------------------------------------------------------

fn precedence(node: &Node) -> u8 {
    match node {
        Node::Binary { op, .. } => match op {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
            BinOp::Pow => 4,
        },
        Node::Neg(_) => 3,
        Node::Num(v) if *v < 0.0 || v.is_sign_negative() => 3,
        _ => 5,
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, child: &Node, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Num(v) => {
                if v.is_sign_negative() {
                    write!(f, "-{:?}", -v)
                } else {
                    write!(f, "{v:?}")
                }
            }
            Node::Var { name, .. } => f.write_str(name),
            Node::Neg(inner) => {
                f.write_str("-")?;
                write_child(f, inner, precedence(inner) < 3)
            }
            Node::Binary { op, lhs, rhs } => {
                let p = precedence(self);
                let (sym, left_parens, right_parens) = match op {
                    BinOp::Pow => ("^", precedence(lhs) <= p, precedence(rhs) < 3),
                    BinOp::Add => (" + ", precedence(lhs) < p, precedence(rhs) <= p),
                    BinOp::Sub => (" - ", precedence(lhs) < p, precedence(rhs) <= p),
                    BinOp::Mul => ("*", precedence(lhs) < p, precedence(rhs) <= p),
                    BinOp::Div => ("/", precedence(lhs) < p, precedence(rhs) <= p),
                };
                write_child(f, lhs, left_parens)?;
                f.write_str(sym)?;
                write_child(f, rhs, right_parens)
            }
            Node::Call { func, args } => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.fmt(f)
    }
}

// --- lexing -----------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    offset: usize,
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Num(v) => format!("number {v}"),
        Tok::Ident(s) => format!("identifier '{s}'"),
        Tok::Plus => "'+'".into(),
        Tok::Minus => "'-'".into(),
        Tok::Star => "'*'".into(),
        Tok::Slash => "'/'".into(),
        Tok::Caret => "'^'".into(),
        Tok::LParen => "'('".into(),
        Tok::RParen => "')'".into(),
        Tok::Comma => "','".into(),
    }
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let text = &src[start..i];
                let value: f64 = text.parse().map_err(|_| ParseError {
                    offset: start,
                    kind: ParseErrorKind::BadNumber(text.to_string()),
                })?;
                out.push(Token {
                    tok: Tok::Num(value),
                    offset: start,
                });
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push(Token {
                    tok: Tok::Ident(src[start..i].to_string()),
                    offset: start,
                });
                continue;
            }
            _ => {
                let ch = src[start..].chars().next().unwrap_or('?');
                return Err(ParseError {
                    offset: start,
                    kind: ParseErrorKind::UnexpectedChar(ch),
                });
            }
        };
        out.push(Token { tok, offset: start });
        i += 1;
    }
    Ok(out)
}

// --- parsing ----------------------------------------------------------------

const OPERAND: &[&str] = &["number", "identifier", "'('", "'-'"];

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    symbols: &'a [&'a str],
    src_len: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek().map(|t| &t.tok) == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn unexpected(&self, offset: usize, expected: &[&str]) -> ParseError {
        let found = self
            .tokens
            .iter()
            .find(|t| t.offset == offset)
            .map(|t| describe(&t.tok))
            .unwrap_or_else(|| "end of input".to_string());
        ParseError {
            offset,
            kind: ParseErrorKind::Syntax {
                expected: expected.iter().map(|s| s.to_string()).collect(),
                found,
            },
        }
    }

    fn here(&self) -> usize {
        self.peek().map_or(self.src_len, |t| t.offset)
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat(&Tok::Plus) {
                BinOp::Add
            } else if self.eat(&Tok::Minus) {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            let rhs = self.term()?;
            lhs = Node::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat(&Tok::Star) {
                BinOp::Mul
            } else if self.eat(&Tok::Slash) {
                BinOp::Div
            } else {
                return Ok(lhs);
            };
            let rhs = self.unary()?;
            lhs = Node::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
    }

    fn unary(&mut self) -> Result<Node, ParseError> {
        if self.eat(&Tok::Minus) {
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node, ParseError> {
        let base = self.atom()?;
        if self.eat(&Tok::Caret) {
            let exponent = self.unary()?;
            return Ok(Node::Binary {
                op: BinOp::Pow,
                lhs: Box::new(base),
                rhs: Box::new(exponent),
            });
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node, ParseError> {
        let offset = self.here();
        let Some(token) = self.peek().cloned() else {
            return Err(self.unexpected(offset, OPERAND));
        };
        match token.tok {
            Tok::Num(v) => {
                self.pos += 1;
                Ok(Node::Num(v))
            }
            Tok::LParen => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(&Tok::RParen) {
                    return Err(self.unexpected(self.here(), &["')'", "operator"]));
                }
                Ok(inner)
            }
            Tok::Ident(name) => {
                self.pos += 1;
                if self.eat(&Tok::LParen) {
                    let func = Func::from_name(&name).ok_or_else(|| ParseError {
                        offset,
                        kind: ParseErrorKind::UnknownFunction(name.clone()),
                    })?;
                    let mut args = vec![self.expr()?];
                    while self.eat(&Tok::Comma) {
                        args.push(self.expr()?);
                    }
                    if !self.eat(&Tok::RParen) {
                        return Err(self.unexpected(self.here(), &["')'", "','", "operator"]));
                    }
                    if args.len() != func.arity() {
                        return Err(ParseError {
                            offset,
                            kind: ParseErrorKind::Arity {
                                func: func.name(),
                                expected: func.arity(),
                                found: args.len(),
                            },
                        });
                    }
                    return Ok(Node::Call { func, args });
                }
                match self.symbols.iter().position(|s| *s == name) {
                    Some(slot) => Ok(Node::Var { name, slot }),
                    None if Func::from_name(&name).is_some() => {
                        Err(self.unexpected(self.here(), &["'('"]))
                    }
                    None => Err(ParseError {
                        offset,
                        kind: ParseErrorKind::UnknownIdentifier(name),
                    }),
                }
            }
            _ => Err(self.unexpected(offset, OPERAND)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var(name: &str, slot: usize) -> Box<Node> {
        Box::new(Node::Var {
            name: name.into(),
            slot,
        })
    }

    fn bin(op: BinOp, lhs: Box<Node>, rhs: Box<Node>) -> Node {
        Node::Binary { op, lhs, rhs }
    }

    #[test]
    fn power_plus_constant() {
        let e = parse_expression("t^2 + 1", &["t"]).unwrap();
        let want = bin(
            BinOp::Add,
            Box::new(bin(BinOp::Pow, var("t", 0), Box::new(Node::Num(2.0)))),
            Box::new(Node::Num(1.0)),
        );
        assert_eq!(e.root(), &want);
    }

    #[test]
    fn call_times_var() {
        let e = parse_expression("sin(t)*x", &["t", "x"]).unwrap();
        let want = bin(
            BinOp::Mul,
            Box::new(Node::Call {
                func: Func::Sin,
                args: vec![Node::Var {
                    name: "t".into(),
                    slot: 0,
                }],
            }),
            var("x", 1),
        );
        assert_eq!(e.root(), &want);
    }

    #[test]
    fn syntax_error_offset() {
        let err = parse_expression("t +* 2", &["t"]).unwrap_err();
        assert_eq!(err.offset, 3);
        match err.kind {
            ParseErrorKind::Syntax { expected, found } => {
                assert!(expected.contains(&"number".to_string()));
                assert_eq!(found, "'*'");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_identifier_is_named() {
        let err = parse_expression("t + q", &["t"]).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownIdentifier("q".into()));
        assert_eq!(err.offset, 4);
    }

    #[test]
    fn empty_and_trailing_input() {
        assert_eq!(parse_expression("", &[]).unwrap_err().offset, 0);
        assert_eq!(parse_expression("(1", &[]).unwrap_err().offset, 2);
        assert_eq!(parse_expression("1 2", &[]).unwrap_err().offset, 2);
        assert!(matches!(
            parse_expression("pow(1)", &[]).unwrap_err().kind,
            ParseErrorKind::Arity { .. }
        ));
        assert!(matches!(
            parse_expression("foo(1)", &[]).unwrap_err().kind,
            ParseErrorKind::UnknownFunction(_)
        ));
    }

    #[test]
    fn precedence_and_associativity() {
        let syms = ["a", "b", "c"];
        let p = |s: &str| parse_expression(s, &syms).unwrap();
        // unary minus sits below ^
        assert_eq!(p("-a^2"), p("-(a^2)"));
        assert_ne!(p("-a^2"), p("(-a)^2"));
        assert_eq!(p("a^b^c"), p("a^(b^c)"));
        assert_eq!(p("a-b-c"), p("(a-b)-c"));
        assert_eq!(p("a/b/c"), p("(a/b)/c"));
        assert_eq!(p("a+b*c"), p("a+(b*c)"));
        assert_eq!(p("2^-a"), p("2^(-a)"));
    }

    #[test]
    fn printing_round_trips() {
        let syms = ["a", "b", "c"];
        for src in [
            "-a^2",
            "(-a)^2",
            "a^b^c",
            "(a^b)^c",
            "a-(b-c)",
            "a/(b*c)",
            "2^-a",
            "-(a+b)*c",
            "pow(a, b+1)/sqrt(c)",
            "--a",
            "1e-7*a + 0.1",
        ] {
            let e = parse_expression(src, &syms).unwrap();
            let again = parse_expression(&e.to_string(), &syms).unwrap();
            assert_eq!(e, again, "{src} -> {e}");
        }
    }

    #[test]
    fn domain_errors_name_subexpression() {
        let e = parse_expression("1 + ln(t - 2)", &["t"]).unwrap();
        let err = evaluate_jet2(&e, [1.0, 0.0, 0.0, 0.0], &[]).unwrap_err();
        assert_eq!(err.kind, EvalErrorKind::LnNonPositive);
        assert_eq!(err.subexpr, "ln(t - 2.0)");

        let e = parse_expression("1/(t-1)", &["t"]).unwrap();
        let err = evaluate_jet2(&e, [1.0, 0.0, 0.0, 0.0], &[]).unwrap_err();
        assert_eq!(err.kind, EvalErrorKind::DivisionByZero);

        let e = parse_expression("sqrt(t)", &["t"]).unwrap();
        assert_eq!(
            evaluate_jet2(&e, [-1.0, 0.0, 0.0, 0.0], &[]).unwrap_err().kind,
            EvalErrorKind::SqrtNegative
        );

        let e = parse_expression("t^0.5", &["t"]).unwrap();
        assert_eq!(
            evaluate_jet2(&e, [-1.0, 0.0, 0.0, 0.0], &[]).unwrap_err().kind,
            EvalErrorKind::NegativeBaseFractionalPower
        );
        // integer powers of negative bases are fine
        let e = parse_expression("t^3", &["t"]).unwrap();
        assert_eq!(evaluate_jet2(&e, [-2.0, 0.0, 0.0, 0.0], &[]).unwrap().value, -8.0);
    }

    #[test]
    fn parameters_follow_coordinates() {
        let e = parse_expression("a*t", &["t", "x", "y", "z", "a"]).unwrap();
        let j = evaluate_jet2(&e, [2.0, 0.0, 0.0, 0.0], &[3.0]).unwrap();
        assert_eq!((j.value, j.grad[0]), (6.0, 3.0));
    }

    #[test]
    fn known_derivatives() {
        let e = parse_expression("t^2", &["t"]).unwrap();
        let j = evaluate_jet2(&e, [3.0, 0.0, 0.0, 0.0], &[]).unwrap();
        assert_eq!((j.value, j.grad[0], j.hess[0][0]), (9.0, 6.0, 2.0));

        let e = parse_expression("sin(t)", &["t"]).unwrap();
        let j = evaluate_jet2(&e, [0.0; 4], &[]).unwrap();
        assert_eq!((j.value, j.grad[0], j.hess[0][0]), (0.0, 1.0, 0.0));
    }
}
