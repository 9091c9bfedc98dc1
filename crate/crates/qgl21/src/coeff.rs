//! Coefficient functions of the boson number operator N.
//!
//! A [`CoeffFn`] is a small expression tree over rationals, `q`, linear
//! polynomials `a*N + b`, powers `q^(a*N + b)` and q-numbers `[a*N + b]_q`,
//! closed under `+ - * /`. It is only ever evaluated at concrete integers N;
//! there is no symbolic manipulation in N, which sidesteps 0/0 ambiguities
//! between polynomial and exponential parts.
//!
//! Text grammar (also used by coefficient files):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := ('-' | '+') factor | atom
//! atom   := integer | 'N' | 'q' | 'qnum(' lin ')' | 'qpow(' lin ')' | '(' expr ')'
//! ```
//!
//! where `lin` is any expression that is linear in N, for example `2*N-1`.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::qfield::{qint, qpow, HalfInt, QScalar};

/// Errors from parsing or evaluating coefficient functions.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoeffError {
    /// A division by an exact zero happened while evaluating at `n`.
    #[error("singular coefficient at N = {n}: `{sub}` evaluates to zero in a denominator")]
    SingularCoefficient { n: i64, sub: String },
    /// Malformed expression text.
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

#[derive(Debug, PartialEq, Eq)]
enum Expr {
    /// Rational constant.
    Rat(BigRational),
    /// a*N + b with integer coefficients.
    Lin { a: i64, b: i64 },
    /// q^(a*N + b).
    QPow { a: i64, b: HalfInt },
    /// [a*N + b]_q.
    QNum { a: i64, b: i64 },
    Add(CoeffFn, CoeffFn),
    Sub(CoeffFn, CoeffFn),
    Mul(CoeffFn, CoeffFn),
    Div(CoeffFn, CoeffFn),
    Neg(CoeffFn),
}

/// An immutable, cheaply clonable coefficient function of N.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoeffFn(Arc<Expr>);

impl CoeffFn {
    fn wrap(e: Expr) -> Self {
        CoeffFn(Arc::new(e))
    }

    /// Constant rational function value.
    pub fn rational(c: BigRational) -> Self {
        CoeffFn::wrap(Expr::Rat(c))
    }

    /// Integer constant.
    pub fn int(c: i64) -> Self {
        CoeffFn::rational(BigRational::from_integer(c.into()))
    }

    /// The number operator N itself.
    pub fn n() -> Self {
        CoeffFn::linear(1, 0)
    }

    /// a*N + b.
    pub fn linear(a: i64, b: i64) -> Self {
        CoeffFn::wrap(Expr::Lin { a, b })
    }

    /// The constant q.
    pub fn q() -> Self {
        CoeffFn::qpow(0, HalfInt::from_int(1))
    }

    /// q^(a*N + b).
    pub fn qpow(a: i64, b: HalfInt) -> Self {
        CoeffFn::wrap(Expr::QPow { a, b })
    }

    /// [a*N + b]_q.
    pub fn qnum(a: i64, b: i64) -> Self {
        CoeffFn::wrap(Expr::QNum { a, b })
    }

    /// Evaluate at N = n. Fails only on an exact division by zero.
    pub fn eval(&self, n: i64) -> Result<QScalar, CoeffError> {
        Ok(match &*self.0 {
            Expr::Rat(c) => QScalar::from_rational(c.clone()),
            Expr::Lin { a, b } => QScalar::from_int(a * n + b),
            Expr::QPow { a, b } => qpow(HalfInt::from_int(a * n) + *b),
            Expr::QNum { a, b } => qint(a * n + b),
            Expr::Add(x, y) => x.eval(n)? + y.eval(n)?,
            Expr::Sub(x, y) => x.eval(n)? - y.eval(n)?,
            Expr::Mul(x, y) => x.eval(n)? * y.eval(n)?,
            Expr::Div(x, y) => {
                let num = x.eval(n)?;
                let den = y.eval(n)?;
                num.checked_div(&den)
                    .ok_or_else(|| CoeffError::SingularCoefficient {
                        n,
                        sub: y.to_string(),
                    })?
            }
            Expr::Neg(x) => -x.eval(n)?,
        })
    }

    /// The function N ↦ f(N + k).
    pub fn shift(&self, k: i64) -> CoeffFn {
        if k == 0 {
            return self.clone();
        }
        CoeffFn::wrap(match &*self.0 {
            Expr::Rat(c) => Expr::Rat(c.clone()),
            Expr::Lin { a, b } => Expr::Lin { a: *a, b: b + a * k },
            Expr::QPow { a, b } => Expr::QPow {
                a: *a,
                b: *b + HalfInt::from_int(a * k),
            },
            Expr::QNum { a, b } => Expr::QNum { a: *a, b: b + a * k },
            Expr::Add(x, y) => Expr::Add(x.shift(k), y.shift(k)),
            Expr::Sub(x, y) => Expr::Sub(x.shift(k), y.shift(k)),
            Expr::Mul(x, y) => Expr::Mul(x.shift(k), y.shift(k)),
            Expr::Div(x, y) => Expr::Div(x.shift(k), y.shift(k)),
            Expr::Neg(x) => Expr::Neg(x.shift(k)),
        })
    }
}

impl Add for CoeffFn {
    type Output = CoeffFn;
    fn add(self, rhs: CoeffFn) -> CoeffFn {
        CoeffFn::wrap(Expr::Add(self, rhs))
    }
}

impl Sub for CoeffFn {
    type Output = CoeffFn;
    fn sub(self, rhs: CoeffFn) -> CoeffFn {
        CoeffFn::wrap(Expr::Sub(self, rhs))
    }
}

impl Mul for CoeffFn {
    type Output = CoeffFn;
    fn mul(self, rhs: CoeffFn) -> CoeffFn {
        CoeffFn::wrap(Expr::Mul(self, rhs))
    }
}

impl Div for CoeffFn {
    type Output = CoeffFn;
    fn div(self, rhs: CoeffFn) -> CoeffFn {
        CoeffFn::wrap(Expr::Div(self, rhs))
    }
}

impl Neg for CoeffFn {
    type Output = CoeffFn;
    fn neg(self) -> CoeffFn {
        CoeffFn::wrap(Expr::Neg(self))
    }
}

/// Write `a*N+b` where `b` is given as twice its value.
fn fmt_lin(f: &mut fmt::Formatter<'_>, a: i64, twice_b: i64) -> fmt::Result {
    let b = HalfInt::from_twice(twice_b.abs());
    let sign = if twice_b < 0 { "-" } else { "+" };
    match (a, twice_b) {
        (0, _) if twice_b < 0 => write!(f, "-{b}"),
        (0, _) => write!(f, "{b}"),
        (1, 0) => write!(f, "N"),
        (-1, 0) => write!(f, "-N"),
        (_, 0) => write!(f, "{a}*N"),
        (1, _) => write!(f, "N{sign}{b}"),
        (-1, _) => write!(f, "-N{sign}{b}"),
        _ => write!(f, "{a}*N{sign}{b}"),
    }
}

impl fmt::Display for CoeffFn {
    /// Prints text in the coefficient grammar. Parsing it back yields a
    /// function with the same value at every N, and the identical tree for
    /// anything that came out of the parser.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            Expr::Rat(c) => {
                if c.is_negative() {
                    write!(f, "(-{})", c.abs())
                } else if c.is_integer() {
                    write!(f, "{c}")
                } else {
                    write!(f, "({c})")
                }
            }
            Expr::Lin { a, b } => {
                if *a == 1 && *b == 0 {
                    write!(f, "N")
                } else {
                    write!(f, "(")?;
                    fmt_lin(f, *a, 2 * *b)?;
                    write!(f, ")")
                }
            }
            Expr::QPow { a, b } => {
                if *a == 0 && *b == HalfInt::from_int(1) {
                    return write!(f, "q");
                }
                write!(f, "qpow(")?;
                fmt_lin(f, *a, b.twice())?;
                write!(f, ")")
            }
            Expr::QNum { a, b } => {
                write!(f, "qnum(")?;
                fmt_lin(f, *a, 2 * *b)?;
                write!(f, ")")
            }
            Expr::Add(x, y) => write!(f, "({x} + {y})"),
            Expr::Sub(x, y) => write!(f, "({x} - {y})"),
            Expr::Mul(x, y) => write!(f, "({x}*{y})"),
            Expr::Div(x, y) => write!(f, "({x}/{y})"),
            Expr::Neg(x) => write!(f, "(-{x})"),
        }
    }
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

/// Parse-time node; calls are resolved into primitives after parsing.
#[derive(Debug, Clone)]
enum Node {
    Num(BigRational),
    N,
    Q,
    QNum(Box<Node>, usize),
    QPow(Box<Node>, usize),
    Bin(u8, Box<Node>, Box<Node>),
    Neg(Box<Node>),
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    line: usize,
}

impl Parser<'_> {
    fn err<T>(&self, column: usize, message: impl Into<String>) -> Result<T, CoeffError> {
        Err(CoeffError::Parse {
            line: self.line,
            column: column + 1,
            message: message.into(),
        })
    }

    fn peek(&mut self) -> Option<u8> {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        self.s.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Node, CoeffError> {
        let mut lhs = self.term()?;
        while let Some(op @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Node, CoeffError> {
        let mut lhs = self.factor()?;
        while let Some(op @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let rhs = self.factor()?;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Node, CoeffError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(Node::Neg(Box::new(self.factor()?)))
            }
            Some(b'+') => {
                self.pos += 1;
                self.factor()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Node, CoeffError> {
        let start = self.pos;
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return self.err(self.pos, "expected `)`");
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let b = self.pos;
                while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let txt = std::str::from_utf8(&self.s[b..self.pos]).expect("ascii");
                let v: BigInt = txt.parse().expect("digits");
                Ok(Node::Num(BigRational::from_integer(v)))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let b = self.pos;
                while self.pos < self.s.len() && self.s[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.s[b..self.pos]).expect("ascii");
                match name {
                    "N" => Ok(Node::N),
                    "q" => Ok(Node::Q),
                    "qnum" | "qpow" => {
                        if self.peek() != Some(b'(') {
                            return self.err(self.pos, format!("expected `(` after `{name}`"));
                        }
                        self.pos += 1;
                        let arg_col = self.pos;
                        let arg = self.expr()?;
                        if self.peek() != Some(b')') {
                            return self.err(self.pos, "expected `)`");
                        }
                        self.pos += 1;
                        Ok(if name == "qnum" {
                            Node::QNum(Box::new(arg), arg_col)
                        } else {
                            Node::QPow(Box::new(arg), arg_col)
                        })
                    }
                    _ => self.err(b, format!("unknown identifier `{name}`")),
                }
            }
            Some(c) => self.err(start, format!("unexpected character `{}`", c as char)),
            None => self.err(self.pos, "unexpected end of expression"),
        }
    }
}

/// Try to read a node as a + b*N with rational a, b.
fn linear_form(node: &Node) -> Option<(BigRational, BigRational)> {
    let zero = BigRational::zero;
    Some(match node {
        Node::Num(c) => (zero(), c.clone()),
        Node::N => (BigRational::one(), zero()),
        Node::Neg(x) => {
            let (a, b) = linear_form(x)?;
            (-a, -b)
        }
        Node::Bin(op, x, y) => {
            let (a1, b1) = linear_form(x)?;
            let (a2, b2) = linear_form(y)?;
            match op {
                b'+' => (a1 + a2, b1 + b2),
                b'-' => (a1 - a2, b1 - b2),
                b'*' if a1.is_zero() => (&b1 * a2, b1 * b2),
                b'*' if a2.is_zero() => (a1 * &b2, b1 * b2),
                b'/' if a2.is_zero() && !b2.is_zero() => (a1 / &b2, b1 / b2),
                _ => return None,
            }
        }
        _ => return None,
    })
}

impl Parser<'_> {
    fn lower(&self, node: &Node) -> Result<CoeffFn, CoeffError> {
        Ok(match node {
            Node::Num(c) => CoeffFn::rational(c.clone()),
            Node::N => CoeffFn::n(),
            Node::Q => CoeffFn::q(),
            Node::Neg(x) => -self.lower(x)?,
            Node::Bin(op, x, y) => {
                let (x, y) = (self.lower(x)?, self.lower(y)?);
                match op {
                    b'+' => x + y,
                    b'-' => x - y,
                    b'*' => x * y,
                    _ => x / y,
                }
            }
            Node::QNum(arg, col) | Node::QPow(arg, col) => {
                let is_num = matches!(node, Node::QNum(..));
                let Some((a, b)) = linear_form(arg) else {
                    return self.err(*col, "argument must be linear in N");
                };
                if !a.is_integer() {
                    return self.err(*col, "coefficient of N must be an integer");
                }
                let a = i64::try_from(a.to_integer()).or_else(|_| self.err(*col, "too large"))?;
                let twice_b = b * BigRational::from_integer(2.into());
                if !twice_b.is_integer() {
                    return self.err(*col, "constant term must be a multiple of 1/2");
                }
                let tb = i64::try_from(twice_b.to_integer())
                    .or_else(|_| self.err(*col, "too large"))?;
                if is_num {
                    if tb % 2 != 0 {
                        return self.err(*col, "qnum needs an integer constant term");
                    }
                    CoeffFn::qnum(a, tb / 2)
                } else {
                    CoeffFn::qpow(a, HalfInt::from_twice(tb))
                }
            }
        })
    }
}

/// Parse one expression; `line` is used only for error messages.
pub fn parse_coeff_at_line(text: &str, line: usize) -> Result<CoeffFn, CoeffError> {
    let mut p = Parser {
        s: text.as_bytes(),
        pos: 0,
        line,
    };
    let node = p.expr()?;
    if p.peek().is_some() {
        return p.err(p.pos, "trailing input");
    }
    p.lower(&node)
}

impl std::str::FromStr for CoeffFn {
    type Err = CoeffError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_coeff_at_line(s, 1)
    }
}

// ---------------------------------------------------------------------------
// Standard family and coefficient families
// ---------------------------------------------------------------------------

const D_TEXT: [&str; 4] = [
    "(q+1)/(qpow(N+1)+1)",
    "(qnum(N)-qnum(N+1)+1)/((1-q)*(1-qpow(-1))*qnum(N+1)*qnum(N))",
    "(1-qpow(N+1))/(qnum(N+1)*(1-q))",
    "((N+2)*(1-q)*(1-qpow(-1)) + (1-qpow(N+2))*(qpow(-1)-qpow(-N-1)))\
     /((1-qpow(-1))*(1-q)*qnum(N+2)*qnum(N+1))",
];

/// The standard coefficient function D_i, i ∈ 1..=4.
pub fn standard_d(i: usize) -> CoeffFn {
    assert!((1..=4).contains(&i), "standard_d index must be in 1..=4");
    D_TEXT[i - 1]
        .parse()
        .expect("built-in coefficient text parses")
}

/// Evaluate `f` at the integer `n`.
pub fn eval_coeff(f: &CoeffFn, n: i64) -> Result<QScalar, CoeffError> {
    f.eval(n)
}

/// A family of four coefficient functions F1..F4.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoeffFamily {
    /// The standard D1..D4.
    Standard,
    /// User-supplied F1..F4.
    Custom([CoeffFn; 4]),
}

impl CoeffFamily {
    /// F_i (or D_i for the standard family), i ∈ 1..=4.
    pub fn get(&self, i: usize) -> CoeffFn {
        match self {
            CoeffFamily::Standard => standard_d(i),
            CoeffFamily::Custom(fs) => fs[i - 1].clone(),
        }
    }

    /// All four functions.
    pub fn functions(&self) -> [CoeffFn; 4] {
        [self.get(1), self.get(2), self.get(3), self.get(4)]
    }

    /// The family F_i ≡ 1.
    pub fn constant_one() -> Self {
        CoeffFamily::Custom(std::array::from_fn(|_| CoeffFn::int(1)))
    }

    /// The family F_i = q^N.
    pub fn q_pow_n() -> Self {
        CoeffFamily::Custom(std::array::from_fn(|_| {
            CoeffFn::qpow(1, HalfInt::from_int(0))
        }))
    }

    /// The standard functions supplied as a custom family (for regression checks).
    pub fn standard_as_custom() -> Self {
        CoeffFamily::Custom(std::array::from_fn(|i| standard_d(i + 1)))
    }

    /// True for the built-in standard family.
    pub fn is_standard(&self) -> bool {
        matches!(self, CoeffFamily::Standard)
    }

    /// Text form used by coefficient files: `standard-D`, or four `Fi = expr` lines.
    pub fn descriptor(&self) -> String {
        match self {
            CoeffFamily::Standard => "standard-D".to_string(),
            CoeffFamily::Custom(fs) => fs
                .iter()
                .enumerate()
                .map(|(i, f)| format!("F{} = {}\n", i + 1, f))
                .collect(),
        }
    }

    /// Parse a coefficient file (or the descriptor string `standard-D`).
    ///
    /// Each non-blank line not starting with `#` has the form `Fi = expr`
    /// with i ∈ 1..=4; every index must appear exactly once.
    pub fn parse(text: &str) -> Result<Self, CoeffError> {
        if text.trim() == "standard-D" {
            return Ok(CoeffFamily::Standard);
        }
        let mut slots: [Option<CoeffFn>; 4] = Default::default();
        let err = |line: usize, column: usize, message: String| CoeffError::Parse {
            line,
            column,
            message,
        };
        for (ln, raw) in text.lines().enumerate() {
            let line = ln + 1;
            let t = raw.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let Some((lhs, rhs)) = raw.split_once('=') else {
                return Err(err(line, 1, "expected `Fi = expression`".into()));
            };
            let idx = match lhs.trim() {
                "F1" => 0,
                "F2" => 1,
                "F3" => 2,
                "F4" => 3,
                other => {
                    return Err(err(line, 1, format!("unknown function name `{other}`, expected F1..F4")))
                }
            };
            if slots[idx].is_some() {
                return Err(err(line, 1, format!("F{} defined twice", idx + 1)));
            }
            let offset = lhs.len() + 1;
            let f = parse_coeff_at_line(rhs, line).map_err(|e| match e {
                CoeffError::Parse {
                    line,
                    column,
                    message,
                } => CoeffError::Parse {
                    line,
                    column: column + offset,
                    message,
                },
                other => other,
            })?;
            slots[idx] = Some(f);
        }
        let mut out: Vec<CoeffFn> = Vec::with_capacity(4);
        for (i, s) in slots.into_iter().enumerate() {
            match s {
                Some(f) => out.push(f),
                None => {
                    return Err(err(
                        text.lines().count().max(1),
                        1,
                        format!("F{} is missing", i + 1),
                    ))
                }
            }
        }
        let arr: [CoeffFn; 4] = out.try_into().expect("four functions");
        Ok(CoeffFamily::Custom(arr))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> QScalar {
        QScalar::q()
    }

    #[test]
    fn standard_values_at_zero() {
        assert!(standard_d(1).eval(0).unwrap().is_one());
        assert!(standard_d(3).eval(0).unwrap().is_one());
        let d40 = QScalar::from_int(2)
            .checked_div(&(&q() + &q().inv().unwrap()))
            .unwrap();
        assert_eq!(standard_d(4).eval(0).unwrap(), d40);
    }

    #[test]
    fn d2_examples() {
        let want = QScalar::one().checked_div(&qint(2)).unwrap();
        assert_eq!(standard_d(2).eval(1).unwrap(), want);
        assert!(matches!(
            standard_d(2).eval(0),
            Err(CoeffError::SingularCoefficient { n: 0, .. })
        ));
    }

    #[test]
    fn d3_at_minus_two() {
        assert_eq!(standard_d(3).eval(-2).unwrap(), q().inv().unwrap());
    }

    #[test]
    fn shift_examples() {
        assert!(standard_d(1).shift(-1).eval(1).unwrap().is_one());
        let d3 = standard_d(3);
        for n in -5..=5 {
            if let Ok(v) = d3.eval(n) {
                assert_eq!(d3.shift(0).eval(n).unwrap(), v);
            }
        }
        assert_eq!(d3.shift(-2).shift(2).eval(3).unwrap(), d3.eval(3).unwrap());
    }

    #[test]
    fn display_round_trips() {
        for i in 1..=4 {
            let f = standard_d(i);
            let g: CoeffFn = f.to_string().parse().unwrap();
            assert_eq!(f, g, "D{i}: {f}");
        }
        let f: CoeffFn = "qpow(2*N-1/2) - 3/4*qnum(-N+2)".parse().unwrap();
        let g: CoeffFn = f.to_string().parse().unwrap();
        for n in -3..=3 {
            assert_eq!(f.eval(n).unwrap(), g.eval(n).unwrap());
        }
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            "qnum(N*N)".parse::<CoeffFn>(),
            Err(CoeffError::Parse { column: 6, .. })
        ));
        assert!("qnum(N+1/2)".parse::<CoeffFn>().is_err());
        assert!("foo".parse::<CoeffFn>().is_err());
        assert!("(N+1".parse::<CoeffFn>().is_err());
    }

    #[test]
    fn family_files() {
        let fam = CoeffFamily::parse("# comment\nF1 = 1\nF2 = qpow(N)\n\nF3 = N+1\nF4 = q\n").unwrap();
        assert_eq!(fam.get(3).eval(4).unwrap(), QScalar::from_int(5));
        let back = CoeffFamily::parse(&fam.descriptor()).unwrap();
        assert_eq!(back, fam);
        let e = CoeffFamily::parse("F1 = 1\nF2 = (\n").unwrap_err();
        assert!(matches!(e, CoeffError::Parse { line: 2, .. }), "{e:?}");
        assert!(CoeffFamily::parse("F1 = 1").is_err());
        assert_eq!(CoeffFamily::parse("standard-D").unwrap(), CoeffFamily::Standard);
    }
}
