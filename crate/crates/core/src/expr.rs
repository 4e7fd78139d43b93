//! Scalar expressions in `x`, `y`, `z`, `r` and `theta`, used by JSON case
//! files.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := ('-' | '+') unary | power
//! power := atom ('^' unary)?
//! atom  := number | name | name '(' expr (',' expr)* ')' | '(' expr ')'
//! ```
//!
//! Names: `x y z r theta pi`; functions: `sin cos tan exp log sqrt abs
//! atan2`. `r = sqrt(x^2 + y^2)` and `theta = atan2(y, x)` taken in
//! `[0, 2 pi)`.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Result, WgError};
use crate::mesh::Point;

/// Maximum depth of the parsed tree. Chains like `1 + 1 + ...` count
/// one level per operator, so evaluation never recurses deeper than this.
pub const MAX_DEPTH: usize = 256;
/// Maximum source length in bytes.
pub const MAX_LEN: usize = 16 * 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
    Z,
    R,
    Theta,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Abs,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    fn apply(self, v: f64) -> f64 {
        match self {
            Func::Sin => v.sin(),
            Func::Cos => v.cos(),
            Func::Tan => v.tan(),
            Func::Exp => v.exp(),
            Func::Log => v.ln(),
            Func::Sqrt => v.sqrt(),
            Func::Abs => v.abs(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
    Atan2(Box<Expr>, Box<Expr>),
}

fn theta(p: &Point) -> f64 {
    let t = p[1].atan2(p[0]);
    if t < 0.0 {
        t + 2.0 * PI
    } else {
        t
    }
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr> {
        if src.len() > MAX_LEN {
            return Err(WgError::Expr {
                offset: MAX_LEN,
                msg: format!("expression longer than {MAX_LEN} bytes"),
            });
        }
        let mut p = Parser {
            src: src.as_bytes(),
            pos: 0,
            depth: 0,
        };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return p.err("unexpected trailing input");
        }
        Ok(e)
    }

    pub fn eval(&self, p: &Point) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Var(Var::X) => p[0],
            Expr::Var(Var::Y) => p[1],
            Expr::Var(Var::Z) => p[2],
            Expr::Var(Var::R) => p[0].hypot(p[1]),
            Expr::Var(Var::Theta) => theta(p),
            Expr::Neg(a) => -a.eval(p),
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval(p), b.eval(p));
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                    BinOp::Pow => a.powf(b),
                }
            }
            Expr::Call(f, a) => f.apply(a.eval(p)),
            Expr::Atan2(a, b) => a.eval(p).atan2(b.eval(p)),
        }
    }

    /// Whether the expression mentions `v`.
    pub fn depends_on(&self, v: Var) -> bool {
        match self {
            Expr::Num(_) => false,
            Expr::Var(w) => *w == v,
            Expr::Neg(a) | Expr::Call(_, a) => a.depends_on(v),
            Expr::Bin(_, a, b) | Expr::Atan2(a, b) => a.depends_on(v) || b.depends_on(v),
        }
    }

    /// Symbolic partial derivative with respect to `x` (axis 0), `y` (1)
    /// or `z` (2). `r` and `theta` are differentiated through the chain
    /// rule.
    pub fn diff(&self, axis: usize) -> Expr {
        use Expr::*;
        let num = |v: f64| Num(v);
        let bx = |e: Expr| Box::new(e);
        let mul = |a: Expr, b: Expr| Bin(BinOp::Mul, bx(a), bx(b));
        let add = |a: Expr, b: Expr| Bin(BinOp::Add, bx(a), bx(b));
        let sub = |a: Expr, b: Expr| Bin(BinOp::Sub, bx(a), bx(b));
        let div = |a: Expr, b: Expr| Bin(BinOp::Div, bx(a), bx(b));
        let pow = |a: Expr, b: Expr| Bin(BinOp::Pow, bx(a), bx(b));
        let call = |f: Func, a: Expr| Call(f, bx(a));
        match self {
            Num(_) => num(0.0),
            Var(v) => match (v, axis) {
                (self::Var::X, 0) | (self::Var::Y, 1) | (self::Var::Z, 2) => num(1.0),
                (self::Var::R, 0) => div(Var(self::Var::X), Var(self::Var::R)),
                (self::Var::R, 1) => div(Var(self::Var::Y), Var(self::Var::R)),
                (self::Var::Theta, 0) => {
                    Neg(bx(div(Var(self::Var::Y), pow(Var(self::Var::R), num(2.0)))))
                }
                (self::Var::Theta, 1) => div(Var(self::Var::X), pow(Var(self::Var::R), num(2.0))),
                _ => num(0.0),
            },
            Neg(a) => Neg(bx(a.diff(axis))),
            Bin(op, a, b) => {
                let (da, db) = (a.diff(axis), b.diff(axis));
                let (a, b) = ((**a).clone(), (**b).clone());
                match op {
                    BinOp::Add => add(da, db),
                    BinOp::Sub => sub(da, db),
                    BinOp::Mul => add(mul(da, b), mul(a, db)),
                    BinOp::Div => div(sub(mul(da, b.clone()), mul(a, db)), pow(b, num(2.0))),
                    BinOp::Pow => {
                        if let Num(n) = b {
                            mul(mul(num(n), pow(a, num(n - 1.0))), da)
                        } else {
                            // d(a^b) = a^b (db ln a + b da / a)
                            let ab = pow(a.clone(), b.clone());
                            mul(
                                ab,
                                add(mul(db, call(Func::Log, a.clone())), div(mul(b, da), a)),
                            )
                        }
                    }
                }
            }
            Call(f, a) => {
                let da = a.diff(axis);
                let a = (**a).clone();
                let outer = match f {
                    Func::Sin => call(Func::Cos, a),
                    Func::Cos => Neg(bx(call(Func::Sin, a))),
                    Func::Tan => div(num(1.0), pow(call(Func::Cos, a), num(2.0))),
                    Func::Exp => call(Func::Exp, a),
                    Func::Log => div(num(1.0), a),
                    Func::Sqrt => div(num(0.5), call(Func::Sqrt, a)),
                    Func::Abs => div(a.clone(), call(Func::Abs, a)),
                };
                mul(outer, da)
            }
            Atan2(a, b) => {
                // d atan2(a, b) = (b da - a db) / (a^2 + b^2)
                let (da, db) = (a.diff(axis), b.diff(axis));
                let (a, b) = ((**a).clone(), (**b).clone());
                div(
                    sub(mul(b.clone(), da), mul(a.clone(), db)),
                    add(pow(a, num(2.0)), pow(b, num(2.0))),
                )
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::Var(v) => f.write_str(match v {
                Var::X => "x",
                Var::Y => "y",
                Var::Z => "z",
                Var::R => "r",
                Var::Theta => "theta",
            }),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Bin(op, a, b) => {
                let s = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                    BinOp::Pow => "^",
                };
                write!(f, "({a} {s} {b})")
            }
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
            Expr::Atan2(a, b) => write!(f, "atan2({a}, {b})"),
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    depth: usize,
}

impl Parser<'_> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(WgError::Expr {
            offset: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn enter(&mut self) -> Result<()> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return self.err(format!("nesting deeper than {MAX_DEPTH}"));
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Expr> {
        let base = self.depth;
        self.enter()?;
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat(b'+') {
                BinOp::Add
            } else if self.eat(b'-') {
                BinOp::Sub
            } else {
                break;
            };
            self.enter()?;
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        self.depth = base;
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let base = self.depth;
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat(b'*') {
                BinOp::Mul
            } else if self.eat(b'/') {
                BinOp::Div
            } else {
                break;
            };
            self.enter()?;
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        self.depth = base;
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        self.enter()?;
        let e = if self.eat(b'-') {
            Expr::Neg(Box::new(self.unary()?))
        } else if self.eat(b'+') {
            self.unary()?
        } else {
            self.power()?
        };
        self.depth -= 1;
        Ok(e)
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let exp = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return self.err("expected `)`");
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.name(),
            Some(_) => self.err("unexpected character"),
            None => self.err("unexpected end of expression"),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
        };
        digits(self);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            digits(self);
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            let exp_start = self.pos;
            digits(self);
            if self.pos == exp_start {
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(Expr::Num(v)),
            _ => {
                self.pos = start;
                self.err(format!("bad number `{text}`"))
            }
        }
    }

    fn name(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        let var = match name {
            "x" => Some(Var::X),
            "y" => Some(Var::Y),
            "z" => Some(Var::Z),
            "r" => Some(Var::R),
            "theta" => Some(Var::Theta),
            _ => None,
        };
        if let Some(v) = var {
            return Ok(Expr::Var(v));
        }
        if name == "pi" {
            return Ok(Expr::Num(PI));
        }
        if name == "atan2" {
            let args = self.args()?;
            let [a, b]: [Expr; 2] = args
                .try_into()
                .or_else(|_| self.err("atan2 takes two arguments"))?;
            return Ok(Expr::Atan2(Box::new(a), Box::new(b)));
        }
        if let Some(f) = Func::from_name(name) {
            let args = self.args()?;
            let [a]: [Expr; 1] = args
                .try_into()
                .or_else(|_| self.err(format!("{name} takes one argument")))?;
            return Ok(Expr::Call(f, Box::new(a)));
        }
        self.pos = start;
        self.err(format!("unknown name `{name}`"))
    }

    fn args(&mut self) -> Result<Vec<Expr>> {
        if !self.eat(b'(') {
            return self.err("expected `(`");
        }
        let mut args = vec![self.expr()?];
        while self.eat(b',') {
            if args.len() >= 2 {
                return self.err("too many arguments");
            }
            args.push(self.expr()?);
        }
        if !self.eat(b')') {
            return self.err("expected `)`");
        }
        Ok(args)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(src: &str, p: Point) -> f64 {
        Expr::parse(src).unwrap().eval(&p)
    }

    #[test]
    fn precedence_and_associativity() {
        let p = [0.0; 3];
        assert_eq!(eval("1 + 2 * 3", p), 7.0);
        assert_eq!(eval("(1 + 2) * 3", p), 9.0);
        assert_eq!(eval("2 ^ 3 ^ 2", p), 512.0);
        assert_eq!(eval("-2 ^ 2", p), -4.0);
        assert_eq!(eval("2 ^ -1", p), 0.5);
        assert_eq!(eval("8 / 4 / 2", p), 1.0);
        assert_eq!(eval("1 - 2 - 3", p), -4.0);
        assert_eq!(eval("1.5e2 + .5", p), 150.5);
    }

    #[test]
    fn variables_and_functions() {
        let p = [3.0, 4.0, 2.0];
        assert_eq!(eval("x*y*z", p), 24.0);
        assert_eq!(eval("r", p), 5.0);
        assert!((eval("theta", [0.0, -1.0, 0.0]) - 1.5 * PI).abs() < 1e-15);
        assert_eq!(eval("atan2(y, x)", [1.0, 1.0, 0.0]), PI / 4.0);
        assert!(
            (eval(
                "sin(pi/2) + cos(0) + exp(0) + log(1) + sqrt(4) + abs(-1)",
                p
            ) - 6.0)
                .abs()
                < 1e-15
        );
    }

    #[test]
    fn errors_carry_offsets() {
        for (src, offset) in [
            ("1 +", 3),
            ("foo(1)", 0),
            ("sin(1, 2)", 9),
            ("(1", 2),
            ("1 2", 2),
            ("atan2(1)", 8),
        ] {
            match Expr::parse(src) {
                Err(WgError::Expr { offset: o, .. }) => assert_eq!(o, offset, "{src}"),
                other => panic!("{src}: {other:?}"),
            }
        }
    }

    #[test]
    fn depth_is_limited() {
        let deep = "(".repeat(200) + "1" + &")".repeat(200);
        assert!(Expr::parse(&deep).is_err());
        let negs = "-".repeat(300) + "1";
        assert!(Expr::parse(&negs).is_err());
        let chain = vec!["1"; 300].join("+");
        assert!(Expr::parse(&chain).is_err());
        let chain = vec!["x"; 100].join("*");
        assert_eq!(Expr::parse(&chain).unwrap().eval(&[1.0; 3]), 1.0);
        let ok = "(".repeat(20) + "1" + &")".repeat(20);
        assert_eq!(Expr::parse(&ok).unwrap().eval(&[0.0; 3]), 1.0);
    }

    #[test]
    fn display_round_trips() {
        let e = Expr::parse("-x^2 + atan2(y, 1) * sin(r) / 3").unwrap();
        let back = Expr::parse(&e.to_string()).unwrap();
        for p in [[0.3, 0.7, 0.0], [1.2, -0.4, 0.0]] {
            assert_eq!(e.eval(&p), back.eval(&p));
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let srcs = [
            "sin(2*pi*x) * cos(3*y) * exp(z)",
            "x*(1-x)*y*(1-y)*r^(-1.5)",
            "r^0.1 * cos(0.3 * theta)",
            "sqrt(x^2 + 1) / (y + 2) + tan(x) - log(y + 3) + abs(x - 0.1)",
            "x^y + atan2(y, x + 2)",
        ];
        let p = [0.4, 0.7, 0.2];
        let h = 1e-6;
        for src in srcs {
            let e = Expr::parse(src).unwrap();
            for axis in 0..3 {
                let mut a = p;
                let mut b = p;
                a[axis] += h;
                b[axis] -= h;
                let fd = (e.eval(&a) - e.eval(&b)) / (2.0 * h);
                let d = e.diff(axis).eval(&p);
                assert!(
                    (d - fd).abs() < 1e-6 * (1.0 + fd.abs()),
                    "{src} axis {axis}: {d} vs {fd}"
                );
            }
        }
    }
}
