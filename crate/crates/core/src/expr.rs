//! Closed-form scalar expressions over the coordinates x⁰..x³.
//!
//! Only the node kinds needed for potentials are supported: constants,
//! coordinates, sums, products, integer powers, sin, cos and exp. Every kind
//! has an analytic derivative, so the tree is closed under differentiation.
//! The smart constructors fold constants eagerly, which keeps derivative trees
//! small enough to print.

use std::fmt;

use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Coord(usize),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Pow(Box<Expr>, i32),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Exp(Box<Expr>),
}

impl Default for Expr {
    fn default() -> Self {
        Expr::Const(0.0)
    }
}

impl Expr {
    pub fn zero() -> Expr {
        Expr::Const(0.0)
    }

    pub fn constant(c: f64) -> Expr {
        Expr::Const(c)
    }

    /// Coordinate x^mu; panics if mu > 3.
    pub fn coord(mu: usize) -> Expr {
        assert!(mu < 4, "coordinate index {mu} out of range");
        Expr::Coord(mu)
    }

    pub fn add(self, other: Expr) -> Expr {
        Expr::sum(vec![self, other])
    }

    pub fn sub(self, other: Expr) -> Expr {
        Expr::sum(vec![self, other.neg()])
    }

    pub fn mul(self, other: Expr) -> Expr {
        Expr::product(vec![self, other])
    }

    pub fn neg(self) -> Expr {
        Expr::product(vec![Expr::Const(-1.0), self])
    }

    pub fn scale(self, c: f64) -> Expr {
        Expr::product(vec![Expr::Const(c), self])
    }

    pub fn powi(self, n: i32) -> Expr {
        match (self, n) {
            (_, 0) => Expr::Const(1.0),
            (e, 1) => e,
            (Expr::Const(c), n) => Expr::Const(c.powi(n)),
            (Expr::Pow(b, m), n) => Expr::Pow(b, m * n),
            (e, n) => Expr::Pow(Box::new(e), n),
        }
    }

    pub fn sin(self) -> Expr {
        match self {
            Expr::Const(c) => Expr::Const(c.sin()),
            e => Expr::Sin(Box::new(e)),
        }
    }

    pub fn cos(self) -> Expr {
        match self {
            Expr::Const(c) => Expr::Const(c.cos()),
            e => Expr::Cos(Box::new(e)),
        }
    }

    pub fn exp(self) -> Expr {
        match self {
            Expr::Const(c) => Expr::Const(c.exp()),
            e => Expr::Exp(Box::new(e)),
        }
    }

    /// Flattening, constant-folding sum.
    pub fn sum(terms: Vec<Expr>) -> Expr {
        let mut c = 0.0;
        let mut rest = Vec::new();
        for t in terms {
            match t {
                Expr::Const(v) => c += v,
                Expr::Sum(inner) => {
                    for u in inner {
                        match u {
                            Expr::Const(v) => c += v,
                            u => rest.push(u),
                        }
                    }
                }
                t => rest.push(t),
            }
        }
        if c != 0.0 {
            rest.push(Expr::Const(c));
        }
        match rest.len() {
            0 => Expr::Const(0.0),
            1 => rest.pop().unwrap(),
            _ => Expr::Sum(rest),
        }
    }

    /// Flattening, constant-folding product. A zero factor collapses the
    /// whole product.
    pub fn product(factors: Vec<Expr>) -> Expr {
        let mut c = 1.0;
        let mut rest = Vec::new();
        for f in factors {
            match f {
                Expr::Const(v) => c *= v,
                Expr::Product(inner) => {
                    for u in inner {
                        match u {
                            Expr::Const(v) => c *= v,
                            u => rest.push(u),
                        }
                    }
                }
                f => rest.push(f),
            }
        }
        if c == 0.0 || rest.is_empty() {
            return Expr::Const(c);
        }
        if c != 1.0 {
            rest.insert(0, Expr::Const(c));
        }
        if rest.len() == 1 {
            rest.pop().unwrap()
        } else {
            Expr::Product(rest)
        }
    }

    pub fn eval(&self, x: &[f64; 4]) -> f64 {
        match self {
            Expr::Const(c) => *c,
            Expr::Coord(mu) => x[*mu],
            Expr::Sum(ts) => ts.iter().map(|t| t.eval(x)).sum(),
            Expr::Product(fs) => fs.iter().map(|f| f.eval(x)).product(),
            Expr::Pow(b, n) => b.eval(x).powi(*n),
            Expr::Sin(e) => e.eval(x).sin(),
            Expr::Cos(e) => e.eval(x).cos(),
            Expr::Exp(e) => e.eval(x).exp(),
        }
    }

    /// Analytic partial derivative with respect to x^mu.
    pub fn derivative(&self, mu: usize) -> Expr {
        match self {
            Expr::Const(_) => Expr::zero(),
            Expr::Coord(nu) => Expr::Const(if *nu == mu { 1.0 } else { 0.0 }),
            Expr::Sum(ts) => Expr::sum(ts.iter().map(|t| t.derivative(mu)).collect()),
            Expr::Product(fs) => {
                let mut terms = Vec::with_capacity(fs.len());
                for (k, f) in fs.iter().enumerate() {
                    let df = f.derivative(mu);
                    if df == Expr::Const(0.0) {
                        continue;
                    }
                    let mut factors: Vec<Expr> = fs
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| *j != k)
                        .map(|(_, g)| g.clone())
                        .collect();
                    factors.push(df);
                    terms.push(Expr::product(factors));
                }
                Expr::sum(terms)
            }
            Expr::Pow(b, n) => {
                let db = b.derivative(mu);
                Expr::product(vec![Expr::Const(*n as f64), (**b).clone().powi(n - 1), db])
            }
            Expr::Sin(e) => Expr::product(vec![(**e).clone().cos(), e.derivative(mu)]),
            Expr::Cos(e) => Expr::product(vec![Expr::Const(-1.0), (**e).clone().sin(), e.derivative(mu)]),
            Expr::Exp(e) => Expr::product(vec![self.clone(), e.derivative(mu)]),
        }
    }

    /// Which coordinates occur anywhere in the tree.
    pub fn coordinates(&self) -> [bool; 4] {
        let mut used = [false; 4];
        self.visit(&mut |e| {
            if let Expr::Coord(mu) = e {
                used[*mu] = true;
            }
        });
        used
    }

    pub fn depends_on(&self, mu: usize) -> bool {
        self.coordinates()[mu]
    }

    /// Value if the tree contains no coordinate.
    pub fn as_constant(&self) -> Option<f64> {
        if self.coordinates().iter().any(|&u| u) {
            None
        } else {
            Some(self.eval(&[0.0; 4]))
        }
    }

    fn visit<F: FnMut(&Expr)>(&self, f: &mut F) {
        f(self);
        match self {
            Expr::Sum(v) | Expr::Product(v) => v.iter().for_each(|e| e.visit(f)),
            Expr::Pow(e, _) | Expr::Sin(e) | Expr::Cos(e) | Expr::Exp(e) => e.visit(f),
            Expr::Const(_) | Expr::Coord(_) => {}
        }
    }

    /// Replace every occurrence of x^mu with `with`.
    pub fn substitute(&self, mu: usize, with: &Expr) -> Expr {
        match self {
            Expr::Const(c) => Expr::Const(*c),
            Expr::Coord(nu) if *nu == mu => with.clone(),
            Expr::Coord(nu) => Expr::Coord(*nu),
            Expr::Sum(ts) => Expr::sum(ts.iter().map(|t| t.substitute(mu, with)).collect()),
            Expr::Product(fs) => Expr::product(fs.iter().map(|t| t.substitute(mu, with)).collect()),
            Expr::Pow(b, n) => b.substitute(mu, with).powi(*n),
            Expr::Sin(e) => e.substitute(mu, with).sin(),
            Expr::Cos(e) => e.substitute(mu, with).cos(),
            Expr::Exp(e) => e.substitute(mu, with).exp(),
        }
    }

    pub fn parse(input: &str) -> Result<Expr> {
        parse::Parser::new(input)?.parse_all()
    }

    fn is_atomic(&self) -> bool {
        match self {
            Expr::Const(c) => *c >= 0.0,
            Expr::Coord(_) | Expr::Sin(_) | Expr::Cos(_) | Expr::Exp(_) => true,
            _ => false,
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c:?}"),
            Expr::Coord(mu) => write!(f, "x{mu}"),
            Expr::Sum(ts) => {
                for (k, t) in ts.iter().enumerate() {
                    if k > 0 {
                        write!(f, " + ")?;
                    }
                    match t {
                        Expr::Const(c) if *c < 0.0 => write!(f, "({c:?})")?,
                        t => write!(f, "{t}")?,
                    }
                }
                Ok(())
            }
            Expr::Product(fs) => {
                for (k, t) in fs.iter().enumerate() {
                    if k > 0 {
                        write!(f, "*")?;
                    }
                    if t.is_atomic() || matches!(t, Expr::Pow(..)) {
                        write!(f, "{t}")?;
                    } else {
                        write!(f, "({t})")?;
                    }
                }
                Ok(())
            }
            Expr::Pow(b, n) => {
                if b.is_atomic() {
                    write!(f, "{b}^{n}")
                } else {
                    write!(f, "({b})^{n}")
                }
            }
            Expr::Sin(e) => write!(f, "sin({e})"),
            Expr::Cos(e) => write!(f, "cos({e})"),
            Expr::Exp(e) => write!(f, "exp({e})"),
        }
    }
}

mod parse {
    //! Recursive-descent parser.
    //!
    //! ```text
    //! expr   := term (('+' | '-') term)*
    //! term   := unary (('*' | '/') unary)*
    //! unary  := '-' unary | power
    //! power  := atom ('^' int)?
    //! int    := '-'? digits | '(' '-'? digits ')'
    //! atom   := number | 'pi' | x0..x3 | ('sin'|'cos'|'exp') '(' expr ')' | '(' expr ')'
    //! ```

    use super::Expr;
    use crate::error::{Error, Result};

    #[derive(Debug, Clone, PartialEq)]
    enum Tok {
        Num(f64),
        Ident(String),
        Op(char),
    }

    pub(super) struct Parser<'a> {
        input: &'a str,
        toks: Vec<Tok>,
        pos: usize,
    }

    impl<'a> Parser<'a> {
        pub(super) fn new(input: &'a str) -> Result<Self> {
            let toks = lex(input)?;
            Ok(Parser { input, toks, pos: 0 })
        }

        fn err(&self, reason: impl Into<String>) -> Error {
            Error::ExpressionParse { input: self.input.to_string(), reason: reason.into() }
        }

        fn peek(&self) -> Option<&Tok> {
            self.toks.get(self.pos)
        }

        fn next(&mut self) -> Option<Tok> {
            let t = self.toks.get(self.pos).cloned();
            self.pos += 1;
            t
        }

        fn eat(&mut self, c: char) -> bool {
            if self.peek() == Some(&Tok::Op(c)) {
                self.pos += 1;
                true
            } else {
                false
            }
        }

        fn expect(&mut self, c: char) -> Result<()> {
            if self.eat(c) {
                Ok(())
            } else {
                Err(self.err(format!("expected `{c}`")))
            }
        }

        pub(super) fn parse_all(mut self) -> Result<Expr> {
            if self.toks.is_empty() {
                return Err(self.err("empty expression"));
            }
            let e = self.expr()?;
            if self.pos < self.toks.len() {
                return Err(self.err(format!("unexpected trailing token {:?}", self.toks[self.pos])));
            }
            Ok(e)
        }

        fn expr(&mut self) -> Result<Expr> {
            let mut terms = vec![self.term()?];
            loop {
                if self.eat('+') {
                    terms.push(self.term()?);
                } else if self.eat('-') {
                    terms.push(self.term()?.neg());
                } else {
                    break;
                }
            }
            Ok(Expr::sum(terms))
        }

        fn term(&mut self) -> Result<Expr> {
            let mut factors = vec![self.unary()?];
            loop {
                if self.eat('*') {
                    factors.push(self.unary()?);
                } else if self.eat('/') {
                    factors.push(self.unary()?.powi(-1));
                } else {
                    break;
                }
            }
            Ok(Expr::product(factors))
        }

        fn unary(&mut self) -> Result<Expr> {
            if self.eat('-') {
                return Ok(self.unary()?.neg());
            }
            self.power()
        }

        fn power(&mut self) -> Result<Expr> {
            let base = self.atom()?;
            if !self.eat('^') {
                return Ok(base);
            }
            let paren = self.eat('(');
            let neg = self.eat('-');
            let n = match self.next() {
                Some(Tok::Num(v)) if v.fract() == 0.0 && v.abs() <= i32::MAX as f64 => v as i32,
                _ => return Err(self.err("exponent must be an integer literal")),
            };
            if paren {
                self.expect(')')?;
            }
            Ok(base.powi(if neg { -n } else { n }))
        }

        fn atom(&mut self) -> Result<Expr> {
            match self.next() {
                Some(Tok::Num(v)) => Ok(Expr::Const(v)),
                Some(Tok::Op('(')) => {
                    let e = self.expr()?;
                    self.expect(')')?;
                    Ok(e)
                }
                Some(Tok::Ident(name)) => match name.as_str() {
                    "pi" => Ok(Expr::Const(std::f64::consts::PI)),
                    "x0" => Ok(Expr::Coord(0)),
                    "x1" => Ok(Expr::Coord(1)),
                    "x2" => Ok(Expr::Coord(2)),
                    "x3" => Ok(Expr::Coord(3)),
                    "sin" | "cos" | "exp" => {
                        self.expect('(')?;
                        let arg = self.expr()?;
                        self.expect(')')?;
                        Ok(match name.as_str() {
                            "sin" => arg.sin(),
                            "cos" => arg.cos(),
                            _ => arg.exp(),
                        })
                    }
                    other => Err(self.err(format!("unknown identifier `{other}`"))),
                },
                Some(t) => Err(self.err(format!("unexpected token {t:?}"))),
                None => Err(self.err("unexpected end of input")),
            }
        }
    }

    fn lex(input: &str) -> Result<Vec<Tok>> {
        let err = |reason: String| Error::ExpressionParse { input: input.to_string(), reason };
        let chars: Vec<char> = input.chars().collect();
        let mut toks = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_digit() || c == '.' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                // exponent part, e.g. 1.5e-3
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        i = j;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let s: String = chars[start..i].iter().collect();
                let v: f64 = s.parse().map_err(|_| err(format!("bad number `{s}`")))?;
                toks.push(Tok::Num(v));
            } else if c.is_ascii_alphabetic() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                toks.push(Tok::Ident(chars[start..i].iter().collect()));
            } else if "+-*/^()".contains(c) {
                toks.push(Tok::Op(c));
                i += 1;
            } else {
                return Err(err(format!("unexpected character `{c}`")));
            }
        }
        Ok(toks)
    }
}
