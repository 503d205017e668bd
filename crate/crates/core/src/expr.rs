//! Text grammar for superalgebra elements and `s`-polynomials.
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' integer)?
//! atom    := number | '(' sum ')' | theta<k> | eta<k> | s{i,j,..} | y<k>
//!          | D[r1,..,rn]name | name'''.. | name
//! ```
//!
//! `theta<k>` is generator `k`, `eta<k>` is generator `q + k`. Plain names
//! must be declared even, odd or as a function; a name followed by primes is
//! a derivative of a unary function. Division is only by nonzero constants.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::grassmann::{GeneratorSet, MultiIndex};
use crate::scalar::{FuncDeriv, Poly, Rational, SPolynomial, SuperScalar};

/// Declared names for one request.
#[derive(Clone, Debug)]
pub struct SymbolTable {
    pub gens: GeneratorSet,
    even: BTreeSet<String>,
    odd: BTreeSet<String>,
    funcs: BTreeMap<String, usize>,
}

fn is_reserved(name: &str) -> bool {
    let digits_after =
        |p: &str| name.strip_prefix(p).is_some_and(|r| !r.is_empty() && r.bytes().all(|b| b.is_ascii_digit()));
    digits_after("theta") || digits_after("eta") || digits_after("y") || name == "s" || name == "D"
}

impl SymbolTable {
    pub fn new(gens: GeneratorSet) -> SymbolTable {
        SymbolTable { gens, even: BTreeSet::new(), odd: BTreeSet::new(), funcs: BTreeMap::new() }
    }

    fn check_fresh(&self, name: &str) -> Result<()> {
        let valid = name.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !valid || is_reserved(name) {
            return Err(Error::Parse { position: 0, message: format!("`{name}` cannot be declared") });
        }
        if self.even.contains(name) || self.odd.contains(name) || self.funcs.contains_key(name) {
            return Err(Error::Parse { position: 0, message: format!("`{name}` declared twice") });
        }
        Ok(())
    }

    pub fn declare_even(&mut self, name: &str) -> Result<()> {
        self.check_fresh(name)?;
        self.even.insert(name.to_string());
        Ok(())
    }

    pub fn declare_odd(&mut self, name: &str) -> Result<()> {
        self.check_fresh(name)?;
        self.odd.insert(name.to_string());
        Ok(())
    }

    pub fn declare_function(&mut self, name: &str, arity: usize) -> Result<()> {
        self.check_fresh(name)?;
        if arity == 0 {
            return Err(Error::Parse { position: 0, message: format!("function `{name}` needs arity >= 1") });
        }
        self.funcs.insert(name.to_string(), arity);
        Ok(())
    }

    pub fn function_arity(&self, name: &str) -> Option<usize> {
        self.funcs.get(name).copied()
    }

    pub fn with_even(mut self, names: &[&str]) -> Result<Self> {
        for n in names {
            self.declare_even(n)?;
        }
        Ok(self)
    }

    pub fn with_odd(mut self, names: &[&str]) -> Result<Self> {
        for n in names {
            self.declare_odd(n)?;
        }
        Ok(self)
    }

    pub fn with_function(mut self, name: &str, arity: usize) -> Result<Self> {
        self.declare_function(name, arity)?;
        Ok(self)
    }
}

/// What the parser can build.
trait Target: Clone + Sized
where
    for<'a> &'a Self:
        Add<&'a Self, Output = Self> + Sub<&'a Self, Output = Self> + Mul<&'a Self, Output = Self> + Neg<Output = Self>,
{
    fn constant(c: Rational) -> Self;
    fn as_constant(&self) -> Option<Rational>;
    fn scale(&self, c: &Rational) -> Self;
}

impl Target for SuperScalar {
    fn constant(c: Rational) -> Self {
        SuperScalar::constant(c)
    }
    fn as_constant(&self) -> Option<Rational> {
        if self.is_zero() {
            return Some(Rational::zero());
        }
        let mut it = self.terms();
        match (it.next(), it.next()) {
            (Some((m, c)), None) if *m == Default::default() => Some(c.clone()),
            _ => None,
        }
    }
    fn scale(&self, c: &Rational) -> Self {
        SuperScalar::scale(self, c)
    }
}

impl<V: Ord + Clone> Target for Poly<V> {
    fn constant(c: Rational) -> Self {
        Poly::constant(c)
    }
    fn as_constant(&self) -> Option<Rational> {
        (self.degree() == 0).then(|| self.constant_term())
    }
    fn scale(&self, c: &Rational) -> Self {
        Poly::scale(self, c)
    }
}

struct Parser<'a, T, A> {
    src: &'a str,
    pos: usize,
    atom: A,
    _t: std::marker::PhantomData<T>,
}

/// Read access for atom hooks.
pub struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn err<T>(&self, at: usize, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { position: at, message: msg.into() })
    }

    fn peek(&self) -> Option<u8> {
        self.src.as_bytes().get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn number(&mut self) -> Result<u64> {
        let start = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        self.src[start..self.pos].parse().or_else(|_| self.err(start, "expected integer"))
    }

    /// `{i,j,..}` or `[i,j,..]` with the given delimiters.
    fn int_list(&mut self, open: u8, close: u8) -> Result<Vec<u64>> {
        let at = self.pos;
        if !self.eat(open) {
            return self.err(at, format!("expected `{}`", open as char));
        }
        let mut out = Vec::new();
        loop {
            while self.peek() == Some(b' ') {
                self.pos += 1;
            }
            if self.eat(close) && out.is_empty() {
                return Ok(out);
            }
            out.push(self.number()?);
            while self.peek() == Some(b' ') {
                self.pos += 1;
            }
            if self.eat(close) {
                return Ok(out);
            }
            if !self.eat(b',') {
                return self.err(self.pos, "expected `,`");
            }
        }
    }
}

impl<'a, T, A> Parser<'a, T, A>
where
    T: Target,
    for<'b> &'b T: Add<&'b T, Output = T> + Sub<&'b T, Output = T> + Mul<&'b T, Output = T> + Neg<Output = T>,
    A: FnMut(&mut Cursor<'a>, &str, usize) -> Result<T>,
{
    fn err<R>(&self, at: usize, msg: impl Into<String>) -> Result<R> {
        Err(Error::Parse { position: at, message: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.src.as_bytes().get(self.pos).is_some_and(|b| b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.as_bytes().get(self.pos).copied()
    }

    fn parse_all(&mut self) -> Result<T> {
        let v = self.sum()?;
        if self.peek().is_some() {
            return self.err(self.pos, "unexpected trailing input");
        }
        Ok(v)
    }

    fn sum(&mut self) -> Result<T> {
        let mut acc = self.product()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = &acc + &self.product()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = &acc - &self.product()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn product(&mut self) -> Result<T> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = &acc * &self.unary()?;
                }
                Some(b'/') => {
                    self.pos += 1;
                    let at = self.pos;
                    let d = self.unary()?;
                    match d.as_constant() {
                        Some(c) if !c.is_zero() => acc = acc.scale(&c.recip()),
                        Some(_) => return self.err(at, "division by zero"),
                        None => return self.err(at, "can only divide by a constant"),
                    }
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<T> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(-&self.unary()?);
        }
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let mut c = Cursor { src: self.src, pos: self.pos };
            let k = c.number()?;
            self.pos = c.pos;
            let mut acc = T::constant(Rational::one());
            for _ in 0..k {
                acc = &acc * &base;
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<T> {
        let start = self.pos;
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.sum()?;
                if self.peek() != Some(b')') {
                    return self.err(self.pos, "expected `)`");
                }
                self.pos += 1;
                Ok(v)
            }
            Some(b) if b.is_ascii_digit() => self.decimal(),
            Some(b) if b.is_ascii_alphabetic() || b == b'_' => {
                let bytes = self.src.as_bytes();
                let id_start = self.pos;
                while bytes.get(self.pos).is_some_and(|b| b.is_ascii_alphanumeric() || *b == b'_') {
                    self.pos += 1;
                }
                let ident = &self.src[id_start..self.pos];
                let mut c = Cursor { src: self.src, pos: self.pos };
                let v = (self.atom)(&mut c, ident, id_start)?;
                self.pos = c.pos;
                Ok(v)
            }
            Some(_) => self.err(start, "unexpected character"),
            None => self.err(start, "unexpected end of input"),
        }
    }

    fn decimal(&mut self) -> Result<T> {
        let bytes = self.src.as_bytes();
        let start = self.pos;
        while bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        let int_part: BigInt = self.src[start..self.pos].parse().expect("digits");
        let mut value = Rational::from_integer(int_part);
        if bytes.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            let fs = self.pos;
            while bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
                self.pos += 1;
            }
            if fs == self.pos {
                return self.err(fs, "expected digits after `.`");
            }
            let frac: BigInt = self.src[fs..self.pos].parse().expect("digits");
            let scale = num_traits::pow(BigInt::from(10), self.pos - fs);
            value += Rational::new(frac, scale);
        }
        Ok(T::constant(value))
    }
}

fn run<'a, T, A>(src: &'a str, atom: A) -> Result<T>
where
    T: Target,
    for<'b> &'b T: Add<&'b T, Output = T> + Sub<&'b T, Output = T> + Mul<&'b T, Output = T> + Neg<Output = T>,
    A: FnMut(&mut Cursor<'a>, &str, usize) -> Result<T>,
{
    Parser { src, pos: 0, atom, _t: std::marker::PhantomData }.parse_all()
}

fn indexed(ident: &str, prefix: &str) -> Option<usize> {
    let rest = ident.strip_prefix(prefix)?;
    if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    rest.parse().ok()
}

/// Parses an element of the superalgebra.
pub fn parse_superscalar(src: &str, table: &SymbolTable) -> Result<SuperScalar> {
    let gens = table.gens;
    run(src, |c: &mut Cursor<'_>, ident: &str, at: usize| -> Result<SuperScalar> {
        if let Some(k) = indexed(ident, "theta") {
            if k == 0 || k > gens.q() {
                return Err(Error::GeneratorOutOfRange { index: k, total: gens.q() });
            }
            return Ok(SuperScalar::generator(k));
        }
        if let Some(k) = indexed(ident, "eta") {
            if k == 0 || k > gens.aux() {
                return Err(Error::GeneratorOutOfRange { index: gens.q() + k, total: gens.total() });
            }
            return Ok(SuperScalar::generator(gens.q() + k));
        }
        if ident == "D" && c.peek() == Some(b'[') {
            let r = c.int_list(b'[', b']')?;
            let name_at = c.pos;
            while c.peek().is_some_and(|b| b.is_ascii_alphanumeric() || b == b'_') {
                c.pos += 1;
            }
            let name = &c.src[name_at..c.pos];
            if name.is_empty() {
                return c.err(name_at, "expected function name after D[..]");
            }
            if let Some(arity) = table.function_arity(name) {
                if arity != r.len() {
                    return c.err(at, format!("function `{name}` has arity {arity}"));
                }
            }
            if r.is_empty() {
                return c.err(at, "empty derivative multi-degree");
            }
            return Ok(SuperScalar::func(FuncDeriv::new(name, r.iter().map(|&k| k as u32).collect())));
        }
        let mut primes = 0u32;
        while c.eat(b'\'') {
            primes += 1;
        }
        if primes > 0 {
            if let Some(arity) = table.function_arity(ident) {
                if arity != 1 {
                    return c.err(at, format!("primes need a unary function; `{ident}` has arity {arity}"));
                }
            } else if table.even.contains(ident) || table.odd.contains(ident) {
                return c.err(at, format!("`{ident}` is a symbol, not a function"));
            }
            return Ok(SuperScalar::func(FuncDeriv::new(ident, vec![primes])));
        }
        if table.even.contains(ident) {
            return Ok(SuperScalar::even_symbol(ident));
        }
        if table.odd.contains(ident) {
            return Ok(SuperScalar::odd_symbol(ident));
        }
        if let Some(arity) = table.function_arity(ident) {
            return Ok(SuperScalar::func(FuncDeriv::new(ident, vec![0; arity])));
        }
        c.err(at, format!("undeclared name `{ident}`"))
    })
}

/// Parses a polynomial in `s{i,j,..}` (even nonempty indices within `gens`).
pub fn parse_spoly(src: &str, gens: GeneratorSet) -> Result<SPolynomial> {
    run(src, |c: &mut Cursor<'_>, ident: &str, at: usize| -> Result<SPolynomial> {
        if ident != "s" {
            return c.err(at, format!("unknown name `{ident}`; expected s{{..}}"));
        }
        let list = c.int_list(b'{', b'}')?;
        let idx: Vec<usize> = list.iter().map(|&k| k as usize).collect();
        let mut sorted = idx.clone();
        sorted.sort_unstable();
        if sorted != idx {
            return c.err(at, "indices of s{..} must be strictly increasing");
        }
        let m = MultiIndex::new(&idx).ok_or_else(|| Error::Parse { position: at, message: "invalid index".into() })?;
        if m.is_empty() || !m.is_even() || !gens.admits(m) {
            return c.err(at, format!("s{m} is not an even nonempty index within {} generators", gens.total()));
        }
        Ok(SPolynomial::var(m))
    })
}

/// Parses a polynomial in `y1..ym` (returned with `0`-based variables).
pub fn parse_target_poly(src: &str, m: usize) -> Result<Poly<usize>> {
    run(src, |c: &mut Cursor<'_>, ident: &str, at: usize| -> Result<Poly<usize>> {
        match indexed(ident, "y") {
            Some(k) if k >= 1 && k <= m => Ok(Poly::var(k - 1)),
            _ => c.err(at, format!("unknown variable `{ident}`; expected y1..y{m}")),
        }
    })
}

/// Parses a comma separated index list such as `1,2,4`.
pub fn parse_index_list(src: &str) -> Result<MultiIndex> {
    let trimmed = src.trim().trim_start_matches(['(', '{']).trim_end_matches([')', '}']);
    if trimmed.trim().is_empty() {
        return Ok(MultiIndex::EMPTY);
    }
    let mut v = Vec::new();
    for part in trimmed.split(',') {
        let k: usize =
            part.trim().parse().map_err(|_| Error::Parse { position: 0, message: format!("bad index `{part}`") })?;
        v.push(k);
    }
    MultiIndex::new(&v).ok_or_else(|| Error::Parse { position: 0, message: format!("invalid multi-index `{src}`") })
}
