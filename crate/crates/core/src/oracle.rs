//! Floating-point route used to cross-check the symbolic engine: Grassmann
//! numbers with `f64` coefficients and genuine smooth functions with
//! closed-form derivatives, composed by truncated Taylor expansion.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};
use crate::grassmann::{concat_sign, MultiIndex, SignedIndex};
use crate::scalar::{substitute_numeric, Function, FunctionBinding, FunctionTable, NumericFunction};
use crate::supercalc::{pullback_taylor, Superfield};

/// Relative tolerance for coefficient agreement.
pub const REL_TOL: f64 = 1e-9;
/// Absolute floor below which differences are ignored.
pub const ABS_TOL: f64 = 1e-12;

/// Grassmann number with real coefficients, keyed by generator monomial.
#[derive(Clone, PartialEq, Default)]
pub struct NumericGrassmann {
    terms: BTreeMap<MultiIndex, f64>,
}

impl NumericGrassmann {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn scalar(v: f64) -> Self {
        Self::term(MultiIndex::EMPTY, v)
    }

    pub fn generators(index: MultiIndex) -> Self {
        Self::term(index, 1.0)
    }

    pub fn term(index: MultiIndex, v: f64) -> Self {
        let mut out = Self::zero();
        out.add_term(index, v);
        out
    }

    pub fn add_term(&mut self, index: MultiIndex, v: f64) {
        if v == 0.0 {
            return;
        }
        let e = self.terms.entry(index).or_insert(0.0);
        *e += v;
        if *e == 0.0 {
            self.terms.remove(&index);
        }
    }

    pub fn get(&self, index: MultiIndex) -> f64 {
        self.terms.get(&index).copied().unwrap_or(0.0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (MultiIndex, f64)> + '_ {
        self.terms.iter().map(|(k, v)| (*k, *v))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn body(&self) -> f64 {
        self.get(MultiIndex::EMPTY)
    }

    pub fn soul(&self) -> Self {
        let mut out = self.clone();
        out.terms.remove(&MultiIndex::EMPTY);
        out
    }

    pub fn scale(&self, c: f64) -> Self {
        let mut out = Self::zero();
        for (k, v) in &self.terms {
            out.add_term(*k, v * c);
        }
        out
    }
}

impl fmt::Debug for NumericGrassmann {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter().map(|(k, v)| (k.to_string(), v))).finish()
    }
}

impl Add for &NumericGrassmann {
    type Output = NumericGrassmann;
    fn add(self, rhs: &NumericGrassmann) -> NumericGrassmann {
        let mut out = self.clone();
        for (k, v) in &rhs.terms {
            out.add_term(*k, *v);
        }
        out
    }
}

impl Sub for &NumericGrassmann {
    type Output = NumericGrassmann;
    fn sub(self, rhs: &NumericGrassmann) -> NumericGrassmann {
        self + &rhs.scale(-1.0)
    }
}

impl Mul for &NumericGrassmann {
    type Output = NumericGrassmann;
    fn mul(self, rhs: &NumericGrassmann) -> NumericGrassmann {
        let mut out = NumericGrassmann::zero();
        for (a, x) in &self.terms {
            for (b, y) in &rhs.terms {
                if let SignedIndex::Signed { index, negative } = concat_sign(*a, *b) {
                    out.add_term(index, if negative { -x * y } else { x * y });
                }
            }
        }
        out
    }
}

/// Whether two reals agree within `REL_TOL` relative or `ABS_TOL` absolute.
pub fn close(a: f64, b: f64) -> bool {
    let d = (a - b).abs();
    d <= ABS_TOL || d <= REL_TOL * a.abs().max(b.abs())
}

/// Coefficient-wise agreement over the union of supports.
pub fn agrees(a: &NumericGrassmann, b: &NumericGrassmann) -> bool {
    first_disagreement(a, b).is_none()
}

pub fn first_disagreement(a: &NumericGrassmann, b: &NumericGrassmann) -> Option<(MultiIndex, f64, f64)> {
    let mut keys: Vec<MultiIndex> = a.terms.keys().chain(b.terms.keys()).copied().collect();
    keys.sort();
    keys.dedup();
    keys.into_iter().map(|k| (k, a.get(k), b.get(k))).find(|(_, x, y)| !close(*x, *y))
}

/// Expression tree for a smooth function of `u1..un`.
#[derive(Clone, Debug, PartialEq)]
enum Expr {
    Const(f64),
    Var(usize),
    Add(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Powi(Box<Expr>, i32),
    Exp(Box<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
}

use Expr::*;

fn add(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Const(x), Const(y)) => Const(x + y),
        (Const(z), e) | (e, Const(z)) if z == 0.0 => e,
        (a, b) => Add(Box::new(a), Box::new(b)),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Const(x), Const(y)) => Const(x * y),
        (Const(z), _) | (_, Const(z)) if z == 0.0 => Const(0.0),
        (Const(o), e) | (e, Const(o)) if o == 1.0 => e,
        (a, b) => Mul(Box::new(a), Box::new(b)),
    }
}

fn powi(a: Expr, n: i32) -> Expr {
    match (a, n) {
        (_, 0) => Const(1.0),
        (e, 1) => e,
        (Const(x), n) => Const(x.powi(n)),
        (e, n) => Powi(Box::new(e), n),
    }
}

impl Expr {
    fn diff(&self, v: usize) -> Expr {
        match self {
            Const(_) => Const(0.0),
            Var(i) => Const(if *i == v { 1.0 } else { 0.0 }),
            Add(a, b) => add(a.diff(v), b.diff(v)),
            Mul(a, b) => add(mul(a.diff(v), (**b).clone()), mul((**a).clone(), b.diff(v))),
            Powi(a, n) => mul(mul(Const(*n as f64), powi((**a).clone(), n - 1)), a.diff(v)),
            Exp(a) => mul(self.clone(), a.diff(v)),
            Sin(a) => mul(Cos(a.clone()), a.diff(v)),
            Cos(a) => mul(mul(Const(-1.0), Sin(a.clone())), a.diff(v)),
        }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Const(c) => *c,
            Var(i) => x[*i],
            Add(a, b) => a.eval(x) + b.eval(x),
            Mul(a, b) => a.eval(x) * b.eval(x),
            Powi(a, n) => a.eval(x).powi(*n),
            Exp(a) => a.eval(x).exp(),
            Sin(a) => a.eval(x).sin(),
            Cos(a) => a.eval(x).cos(),
        }
    }
}

/// A smooth function of `arity` real variables built from constants,
/// `+ - * /`, integer powers, `exp`, `sin` and `cos`. Variables are written
/// `u` (arity 1) or `u1 .. un`.
#[derive(Clone, Debug, PartialEq)]
pub struct SmoothFn {
    arity: usize,
    expr: Expr,
    source: String,
}

impl SmoothFn {
    pub fn parse(src: &str, arity: usize) -> Result<SmoothFn> {
        let mut p = FnParser { src: src.as_bytes(), pos: 0, arity };
        let expr = p.sum()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(SmoothFn { arity, expr, source: src.to_string() })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.expr.eval(x)
    }

    /// Pointwise product.
    pub fn product(&self, other: &SmoothFn) -> SmoothFn {
        assert_eq!(self.arity, other.arity);
        SmoothFn {
            arity: self.arity,
            expr: mul(self.expr.clone(), other.expr.clone()),
            source: format!("({})*({})", self.source, other.source),
        }
    }
}

impl NumericFunction for SmoothFn {
    fn arity(&self) -> usize {
        self.arity
    }

    fn derivative_at(&self, point: &[f64], r: &[u32]) -> f64 {
        let mut e = self.expr.clone();
        for (v, &k) in r.iter().enumerate() {
            for _ in 0..k {
                e = e.diff(v);
            }
        }
        e.eval(point)
    }
}

struct FnParser<'a> {
    src: &'a [u8],
    pos: usize,
    arity: usize,
}

impl FnParser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse { position: self.pos, message: msg.to_string() }
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

    fn sum(&mut self) -> Result<Expr> {
        let mut acc = self.product()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = add(acc, self.product()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = add(acc, mul(Const(-1.0), self.product()?));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn product(&mut self) -> Result<Expr> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = mul(acc, self.unary()?);
                }
                Some(b'/') => {
                    self.pos += 1;
                    acc = mul(acc, powi(self.unary()?, -1));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(mul(Const(-1.0), self.unary()?));
        }
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let neg = if self.src.get(self.pos) == Some(&b'-') {
                self.pos += 1;
                true
            } else {
                false
            };
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let n: i32 = std::str::from_utf8(&self.src[start..self.pos])
                .unwrap()
                .parse()
                .map_err(|_| self.err("expected integer exponent"))?;
            return Ok(powi(base, if neg { -n } else { n }));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.sum()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_digit() || matches!(self.src[self.pos], b'.' | b'e' | b'E'))
                {
                    self.pos += 1;
                }
                std::str::from_utf8(&self.src[start..self.pos])
                    .unwrap()
                    .parse::<f64>()
                    .map(Const)
                    .map_err(|_| self.err("bad number"))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let word = std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string();
                match word.as_str() {
                    "exp" | "sin" | "cos" => {
                        if self.peek() != Some(b'(') {
                            return Err(self.err("expected `(` after function name"));
                        }
                        let arg = self.atom()?;
                        Ok(match word.as_str() {
                            "exp" => Exp(Box::new(arg)),
                            "sin" => Sin(Box::new(arg)),
                            _ => Cos(Box::new(arg)),
                        })
                    }
                    "u" if self.arity == 1 => Ok(Var(0)),
                    w if w.starts_with('u') => match w[1..].parse::<usize>() {
                        Ok(k) if k >= 1 && k <= self.arity => Ok(Var(k - 1)),
                        _ => Err(Error::Parse { position: start, message: format!("unknown variable `{w}`") }),
                    },
                    w => Err(Error::Parse { position: start, message: format!("unknown name `{w}`") }),
                }
            }
            _ => Err(self.err("expected expression")),
        }
    }
}

/// `f(args)` by Taylor expansion around the bodies of `args`; the sum stops
/// once every product of nilpotent parts vanishes.
pub fn eval_taylor(f: &dyn NumericFunction, args: &[NumericGrassmann]) -> Result<NumericGrassmann> {
    let n = f.arity();
    if args.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: args.len() });
    }
    let body: Vec<f64> = args.iter().map(NumericGrassmann::body).collect();
    let nil: Vec<NumericGrassmann> = args.iter().map(NumericGrassmann::soul).collect();
    let mut out = NumericGrassmann::scalar(f.derivative_at(&body, &vec![0; n]));
    // frontier holds N^r / r! for every r of the current order
    let mut frontier: Vec<(Vec<u32>, NumericGrassmann)> = vec![(vec![0; n], NumericGrassmann::scalar(1.0))];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for (r, p) in &frontier {
            let last = r.iter().rposition(|&k| k > 0).unwrap_or(0);
            for a in last..n {
                let mut r2 = r.clone();
                r2[a] += 1;
                let p2 = (p * &nil[a]).scale(1.0 / r2[a] as f64);
                if !p2.is_zero() {
                    out = &out + &p2.scale(f.derivative_at(&body, &r2));
                    next.push((r2, p2));
                }
            }
        }
        frontier = next;
    }
    Ok(out)
}

/// Runs the symbolic pullback of `fname` through `sf`, substitutes
/// `bindings`, and compares with direct numeric Taylor evaluation of `f` on
/// the substituted components. Returns `(symbolic, numeric)`.
pub fn cross_check(
    sf: &Superfield,
    fname: &str,
    f: &SmoothFn,
    bindings: &HashMap<String, NumericGrassmann>,
) -> Result<(NumericGrassmann, NumericGrassmann)> {
    if f.arity() != sf.dim() {
        return Err(Error::DimensionMismatch { expected: sf.dim(), found: f.arity() });
    }
    let empty = FunctionTable::new();
    let components =
        sf.components().iter().map(|c| substitute_numeric(c, bindings, &empty)).collect::<Result<Vec<_>>>()?;
    let at = sf
        .bodies()
        .iter()
        .map(|b| substitute_numeric(b, bindings, &empty).map(|v| v.body()))
        .collect::<Result<Vec<_>>>()?;

    let symbolic = pullback_taylor(&Function::new(fname, sf.dim()), sf)?;
    let mut table = FunctionTable::new();
    table.insert(fname.to_string(), FunctionBinding { func: f, at });
    let left = substitute_numeric(&symbolic, bindings, &table)?;
    let right = eval_taylor(f, &components)?;
    Ok((left, right))
}
