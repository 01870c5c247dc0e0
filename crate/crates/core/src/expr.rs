//! Scalar field expressions over `x1..xn`.
//!
//! Grammar (whitespace is insignificant):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?
//! atom   := number | 'pi' | 'x'k | func '(' expr ')' | '(' expr ')'
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so `-x1^2`
//! is `-(x1^2)` and `2^3^2` is `2^(3^2)`.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Abs,
    Sign,
    Sqrt,
}

impl Func {
    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "abs" => Func::Abs,
            "sign" => Func::Sign,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Abs => "abs",
            Func::Sign => "sign",
            Func::Sqrt => "sqrt",
        }
    }

    /// Every supported function is unary.
    pub fn arity(self) -> usize {
        1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

/// Abstract syntax tree of a scalar field expression.
///
/// Variables are 1-based (`Var(1)` is `x1`). Trees are immutable once parsed
/// and may be shared across threads.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldExpr {
    Const(f64),
    Var(usize),
    Neg(Box<FieldExpr>),
    Binary(BinOp, Box<FieldExpr>, Box<FieldExpr>),
    Call(Func, Box<FieldExpr>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    UnexpectedEnd,
    Expected(&'static str),
    BadNumber(String),
    UnknownIdentifier(String),
    VariableOutOfRange { index: usize, dimension: usize },
    Arity { func: &'static str, expected: usize, found: usize },
    ZeroDimension,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character {c:?}"),
            ParseErrorKind::UnexpectedEnd => write!(f, "unexpected end of input"),
            ParseErrorKind::Expected(what) => write!(f, "expected {what}"),
            ParseErrorKind::BadNumber(s) => write!(f, "malformed number {s:?}"),
            ParseErrorKind::UnknownIdentifier(s) => write!(f, "unknown identifier {s:?}"),
            ParseErrorKind::VariableOutOfRange { index, dimension } => write!(
                f,
                "variable x{index} out of range for dimension {dimension}"
            ),
            ParseErrorKind::Arity {
                func,
                expected,
                found,
            } => write!(f, "{func} takes {expected} argument(s), found {found}"),
            ParseErrorKind::ZeroDimension => write!(f, "dimension must be at least 1"),
        }
    }
}

/// Syntax error with the byte offset into the source where it was detected.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at byte {offset}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub offset: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("non-finite result ({0})")]
    NonFinite(&'static str),
    #[error("sqrt of negative value {0}")]
    Domain(f64),
    #[error("point has {found} coordinates, expression needs x{needed}")]
    PointTooShort { needed: usize, found: usize },
}

/// Parses `source` as an expression in `dimension` variables.
pub fn parse(source: &str, dimension: usize) -> Result<FieldExpr, ParseError> {
    if dimension == 0 {
        return Err(ParseError {
            kind: ParseErrorKind::ZeroDimension,
            offset: 0,
        });
    }
    let mut parser = Parser {
        src: source.as_bytes(),
        pos: 0,
        dimension,
    };
    let expr = parser.expr()?;
    parser.skip_ws();
    if let Some(c) = parser.peek() {
        return Err(parser.error(ParseErrorKind::UnexpectedChar(c as char)));
    }
    Ok(expr)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    dimension: usize,
}

impl Parser<'_> {
    fn error(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            kind,
            offset: self.pos,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    /// Consumes `c` if it is the next non-blank byte.
    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<FieldExpr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat(b'+') {
                BinOp::Add
            } else if self.eat(b'-') {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            let rhs = self.term()?;
            lhs = FieldExpr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<FieldExpr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat(b'*') {
                BinOp::Mul
            } else if self.eat(b'/') {
                BinOp::Div
            } else {
                return Ok(lhs);
            };
            let rhs = self.unary()?;
            lhs = FieldExpr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<FieldExpr, ParseError> {
        if self.eat(b'-') {
            return Ok(FieldExpr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<FieldExpr, ParseError> {
        let base = self.atom()?;
        if self.eat(b'^') {
            // Exponent goes through `unary` so that `2^-1` parses and `^`
            // stays right-associative.
            let exponent = self.unary()?;
            return Ok(FieldExpr::Binary(
                BinOp::Pow,
                Box::new(base),
                Box::new(exponent),
            ));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<FieldExpr, ParseError> {
        self.skip_ws();
        match self.peek() {
            None => Err(self.error(ParseErrorKind::UnexpectedEnd)),
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error(ParseErrorKind::Expected("')'")));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.identifier(),
            Some(c) => Err(self.error(ParseErrorKind::UnexpectedChar(c as char))),
        }
    }

    fn number(&mut self) -> Result<FieldExpr, ParseError> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            let s = p.pos;
            while p.peek().is_some_and(|c| c.is_ascii_digit()) {
                p.pos += 1;
            }
            p.pos - s
        };
        let mut mantissa = digits(self);
        if self.peek() == Some(b'.') {
            self.pos += 1;
            mantissa += digits(self);
        }
        if mantissa == 0 {
            self.pos = start;
            return Err(self.error(ParseErrorKind::BadNumber(".".into())));
        }
        if matches!(self.peek(), Some(b'e' | b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                let text = String::from_utf8_lossy(&self.src[start..self.pos]).into_owned();
                self.pos = mark;
                return Err(self.error(ParseErrorKind::BadNumber(text)));
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        text.parse::<f64>()
            .map(FieldExpr::Const)
            .map_err(|_| ParseError {
                kind: ParseErrorKind::BadNumber(text.to_string()),
                offset: start,
            })
    }

    fn identifier(&mut self) -> Result<FieldExpr, ParseError> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == b'_') {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii identifier");
        let unknown = || ParseError {
            kind: ParseErrorKind::UnknownIdentifier(name.to_string()),
            offset: start,
        };

        if name == "pi" {
            return Ok(FieldExpr::Const(std::f64::consts::PI));
        }
        if let Some(index) = name.strip_prefix('x') {
            if !index.is_empty() && index.bytes().all(|c| c.is_ascii_digit()) {
                let index: usize = index.parse().map_err(|_| unknown())?;
                if index == 0 || index > self.dimension {
                    return Err(ParseError {
                        kind: ParseErrorKind::VariableOutOfRange {
                            index,
                            dimension: self.dimension,
                        },
                        offset: start,
                    });
                }
                return Ok(FieldExpr::Var(index));
            }
        }
        let func = Func::from_name(name).ok_or_else(unknown)?;
        if !self.eat(b'(') {
            return Err(self.error(ParseErrorKind::Expected("'(' after function name")));
        }
        let mut args = vec![self.expr()?];
        while self.eat(b',') {
            args.push(self.expr()?);
        }
        if !self.eat(b')') {
            return Err(self.error(ParseErrorKind::Expected("')'")));
        }
        if args.len() != func.arity() {
            return Err(ParseError {
                kind: ParseErrorKind::Arity {
                    func: func.name(),
                    expected: func.arity(),
                    found: args.len(),
                },
                offset: start,
            });
        }
        Ok(FieldExpr::Call(func, Box::new(args.pop().expect("one argument"))))
    }
}

impl FieldExpr {
    /// Evaluates the expression at `point` (`point[0]` is `x1`).
    pub fn eval(&self, point: &[f64]) -> Result<f64, EvalError> {
        let mut ok = true;
        let value = self.eval_unchecked(point, &mut ok);
        if ok {
            Ok(value)
        } else {
            self.eval_checked(point)
        }
    }

    /// Evaluation without error values; clears `ok` wherever
    /// [`eval_checked`](Self::eval_checked) would fail.
    fn eval_unchecked(&self, point: &[f64], ok: &mut bool) -> f64 {
        let value = match self {
            FieldExpr::Const(c) => *c,
            FieldExpr::Var(k) => match point.get(k - 1) {
                Some(v) => *v,
                None => {
                    *ok = false;
                    return f64::NAN;
                }
            },
            FieldExpr::Neg(inner) => -inner.eval_unchecked(point, ok),
            FieldExpr::Binary(op, lhs, rhs) => {
                let a = lhs.eval_unchecked(point, ok);
                let b = rhs.eval_unchecked(point, ok);
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                    BinOp::Pow => power(a, b),
                }
            }
            FieldExpr::Call(func, arg) => func.apply(arg.eval_unchecked(point, ok)),
        };
        *ok &= value.is_finite();
        value
    }

    fn eval_checked(&self, point: &[f64]) -> Result<f64, EvalError> {
        let value = match self {
            FieldExpr::Const(c) => *c,
            FieldExpr::Var(k) => *point.get(k - 1).ok_or(EvalError::PointTooShort {
                needed: *k,
                found: point.len(),
            })?,
            FieldExpr::Neg(inner) => -inner.eval_checked(point)?,
            FieldExpr::Binary(op, lhs, rhs) => {
                let a = lhs.eval_checked(point)?;
                let b = rhs.eval_checked(point)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == 0.0 {
                            return Err(EvalError::NonFinite("division by zero"));
                        }
                        a / b
                    }
                    BinOp::Pow => power(a, b),
                }
            }
            FieldExpr::Call(func, arg) => {
                let x = arg.eval_checked(point)?;
                match func {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Exp => x.exp(),
                    Func::Abs => x.abs(),
                    Func::Sign => {
                        if x == 0.0 {
                            0.0
                        } else {
                            x.signum()
                        }
                    }
                    Func::Sqrt => {
                        if x < 0.0 {
                            return Err(EvalError::Domain(x));
                        }
                        x.sqrt()
                    }
                }
            }
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(EvalError::NonFinite(match self {
                FieldExpr::Binary(BinOp::Pow, ..) => "power",
                FieldExpr::Call(Func::Exp, _) => "exp overflow",
                _ => "arithmetic",
            }))
        }
    }

    /// Highest variable index referenced, 0 for constant expressions.
    pub fn max_variable(&self) -> usize {
        match self {
            FieldExpr::Const(_) => 0,
            FieldExpr::Var(k) => *k,
            FieldExpr::Neg(e) | FieldExpr::Call(_, e) => e.max_variable(),
            FieldExpr::Binary(_, a, b) => a.max_variable().max(b.max_variable()),
        }
    }
}

enum Op {
    Const(f64),
    Var(usize),
    Neg,
    Binary(BinOp),
    Call(Func),
}

const STACK: usize = 32;

/// Postfix form of a [`FieldExpr`] for repeated evaluation in hot loops.
/// Results, including errors, are identical to [`FieldExpr::eval`].
pub struct CompiledExpr {
    ops: Vec<Op>,
    depth: usize,
    source: FieldExpr,
}

impl FieldExpr {
    pub fn compile(&self) -> CompiledExpr {
        fn emit(e: &FieldExpr, ops: &mut Vec<Op>, height: usize, depth: &mut usize) {
            *depth = (*depth).max(height + 1);
            match e {
                FieldExpr::Const(c) => ops.push(Op::Const(*c)),
                FieldExpr::Var(k) => ops.push(Op::Var(*k)),
                FieldExpr::Neg(inner) => {
                    emit(inner, ops, height, depth);
                    ops.push(Op::Neg);
                }
                FieldExpr::Binary(op, a, b) => {
                    emit(a, ops, height, depth);
                    emit(b, ops, height + 1, depth);
                    ops.push(Op::Binary(*op));
                }
                FieldExpr::Call(func, arg) => {
                    emit(arg, ops, height, depth);
                    ops.push(Op::Call(*func));
                }
            }
        }
        let mut ops = Vec::new();
        let mut depth = 0;
        emit(self, &mut ops, 0, &mut depth);
        CompiledExpr {
            ops,
            depth,
            source: self.clone(),
        }
    }
}

impl CompiledExpr {
    pub fn source(&self) -> &FieldExpr {
        &self.source
    }

    pub fn eval(&self, point: &[f64]) -> Result<f64, EvalError> {
        if self.depth > STACK {
            return self.source.eval(point);
        }
        let mut stack = [0.0f64; STACK];
        let mut top = 0;
        let mut ok = true;
        for op in &self.ops {
            let value = match op {
                Op::Const(c) => *c,
                Op::Var(k) => match point.get(k - 1) {
                    Some(v) => *v,
                    None => {
                        ok = false;
                        break;
                    }
                },
                Op::Neg => {
                    top -= 1;
                    -stack[top]
                }
                Op::Binary(op) => {
                    top -= 2;
                    let (a, b) = (stack[top], stack[top + 1]);
                    match op {
                        BinOp::Add => a + b,
                        BinOp::Sub => a - b,
                        BinOp::Mul => a * b,
                        BinOp::Div => a / b,
                        BinOp::Pow => power(a, b),
                    }
                }
                Op::Call(func) => {
                    top -= 1;
                    func.apply(stack[top])
                }
            };
            ok &= value.is_finite();
            stack[top] = value;
            top += 1;
        }
        if ok {
            Ok(stack[0])
        } else {
            self.source.eval_checked(point)
        }
    }
}

fn power(a: f64, b: f64) -> f64 {
    if b.fract() == 0.0 && b.abs() <= 64.0 {
        a.powi(b as i32)
    } else {
        a.powf(b)
    }
}

impl Func {
    /// Unchecked application; `sqrt` of a negative number is NaN.
    fn apply(self, x: f64) -> f64 {
        match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Exp => x.exp(),
            Func::Abs => x.abs(),
            Func::Sign => {
                if x == 0.0 {
                    0.0
                } else {
                    x.signum()
                }
            }
            Func::Sqrt => x.sqrt(),
        }
    }
}

impl fmt::Display for FieldExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldExpr::Const(c) => write!(f, "{c}"),
            FieldExpr::Var(k) => write!(f, "x{k}"),
            FieldExpr::Neg(e) => write!(f, "(-{e})"),
            FieldExpr::Binary(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            FieldExpr::Call(func, e) => write!(f, "{}({e})", func.name()),
        }
    }
}
