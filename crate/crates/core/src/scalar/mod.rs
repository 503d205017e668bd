//! Coefficients: exact rationals, parity-carrying symbols, formal
//! function-derivative atoms, the supercommutative [`SuperScalar`] and
//! commuting polynomials.

mod poly;
mod superscalar;

use std::collections::HashMap;
use std::fmt;

use num_traits::ToPrimitive;

pub use poly::{spoly_partial, Poly, PolyMonomial, SPolynomial, VarName};
pub use superscalar::{Monomial, SuperScalar};

use crate::error::{Error, Result};
use crate::oracle::NumericGrassmann;

pub type Rational = num_rational::BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol {
    pub name: String,
    pub parity: Parity,
}

impl Symbol {
    pub fn even(name: &str) -> Symbol {
        Symbol { name: name.to_string(), parity: Parity::Even }
    }

    pub fn odd(name: &str) -> Symbol {
        Symbol { name: name.to_string(), parity: Parity::Odd }
    }

    pub fn to_scalar(&self) -> SuperScalar {
        match self.parity {
            Parity::Even => SuperScalar::even_symbol(&self.name),
            Parity::Odd => SuperScalar::odd_symbol(&self.name),
        }
    }
}

/// `∂^r F / ∂y^r` evaluated at the body point of whatever it is pulled back
/// along. Always even.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FuncDeriv {
    pub name: String,
    pub deriv: Vec<u32>,
}

impl FuncDeriv {
    pub fn new(name: &str, deriv: Vec<u32>) -> FuncDeriv {
        assert!(!deriv.is_empty(), "function arity must be at least 1");
        FuncDeriv { name: name.to_string(), deriv }
    }

    pub fn arity(&self) -> usize {
        self.deriv.len()
    }

    pub fn order(&self) -> u32 {
        self.deriv.iter().sum()
    }
}

impl fmt::Display for FuncDeriv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.deriv.len() == 1 {
            write!(f, "{}{}", self.name, "'".repeat(self.deriv[0] as usize))
        } else if self.deriv.iter().all(|&r| r == 0) {
            write!(f, "{}", self.name)
        } else {
            let r: Vec<String> = self.deriv.iter().map(|r| r.to_string()).collect();
            write!(f, "D[{}]{}", r.join(","), self.name)
        }
    }
}

/// A named function of `arity` target coordinates whose pullbacks are kept
/// formal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Function {
    pub name: String,
    pub arity: usize,
}

impl Function {
    pub fn new(name: &str, arity: usize) -> Function {
        assert!(arity >= 1, "function arity must be at least 1");
        Function { name: name.to_string(), arity }
    }

    pub fn deriv(&self, r: &[u32]) -> FuncDeriv {
        debug_assert_eq!(r.len(), self.arity);
        FuncDeriv { name: self.name.clone(), deriv: r.to_vec() }
    }

    /// `f ∘ body`.
    pub fn value(&self) -> FuncDeriv {
        self.deriv(&vec![0; self.arity])
    }
}

/// A smooth function with closed-form partial derivatives.
pub trait NumericFunction {
    fn arity(&self) -> usize;
    fn derivative_at(&self, point: &[f64], r: &[u32]) -> f64;
}

/// A numeric function together with the body point its derivative atoms
/// are evaluated at.
pub struct FunctionBinding<'a> {
    pub func: &'a dyn NumericFunction,
    pub at: Vec<f64>,
}

pub type FunctionTable<'a> = HashMap<String, FunctionBinding<'a>>;

/// Replaces every symbol and function-derivative atom by a number (or, for
/// odd symbols, by an odd Grassmann element), keeping the generators.
pub fn substitute_numeric(
    a: &SuperScalar,
    bindings: &HashMap<String, NumericGrassmann>,
    ftable: &FunctionTable<'_>,
) -> Result<NumericGrassmann> {
    let lookup = |name: &str| bindings.get(name).ok_or_else(|| Error::MissingBinding(name.to_string()));
    let mut out = NumericGrassmann::zero();
    for (m, c) in a.terms() {
        let mut t = NumericGrassmann::scalar(to_f64(c));
        for (name, e) in &m.even {
            let v = lookup(name)?;
            for _ in 0..*e {
                t = &t * v;
            }
        }
        for (d, e) in &m.funcs {
            let b = ftable.get(&d.name).ok_or_else(|| Error::MissingBinding(d.name.clone()))?;
            if b.func.arity() != d.arity() || b.at.len() != d.arity() {
                return Err(Error::ArityMismatch { name: d.name.clone(), arity: b.func.arity(), found: d.arity() });
            }
            let v = b.func.derivative_at(&b.at, &d.deriv);
            t = t.scale(v.powi(*e as i32));
        }
        t = &t * &NumericGrassmann::generators(m.gens);
        for name in &m.odd {
            t = &t * lookup(name)?;
        }
        out = &out + &t;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::MultiIndex;
    use crate::oracle::SmoothFn;

    #[test]
    fn funcderiv_display() {
        assert_eq!(FuncDeriv::new("f", vec![0]).to_string(), "f");
        assert_eq!(FuncDeriv::new("f", vec![2]).to_string(), "f''");
        assert_eq!(FuncDeriv::new("g", vec![1, 0]).to_string(), "D[1,0]g");
        assert_eq!(FuncDeriv::new("g", vec![0, 0]).to_string(), "g");
    }

    #[test]
    fn substitute_examples() {
        let th12 = SuperScalar::generators(MultiIndex::of(&[1, 2]));
        let a = SuperScalar::even_symbol("c") + &th12 * &SuperScalar::even_symbol("s");
        let mut b = HashMap::new();
        b.insert("c".to_string(), NumericGrassmann::scalar(2.0));
        b.insert("s".to_string(), NumericGrassmann::scalar(3.0));
        let got = substitute_numeric(&a, &b, &FunctionTable::new()).unwrap();
        let want = &NumericGrassmann::scalar(2.0) + &NumericGrassmann::generators(MultiIndex::of(&[1, 2])).scale(3.0);
        assert_eq!(got, want);

        let sq = SmoothFn::parse("u^2", 1).unwrap();
        let mut ft = FunctionTable::new();
        ft.insert("f".into(), FunctionBinding { func: &sq, at: vec![5.0] });
        let d = SuperScalar::func(FuncDeriv::new("f", vec![1]));
        assert_eq!(substitute_numeric(&d, &HashMap::new(), &ft).unwrap(), NumericGrassmann::scalar(10.0));

        let psi = SuperScalar::odd_symbol("psi1");
        assert_eq!(substitute_numeric(&psi, &HashMap::new(), &ft), Err(Error::MissingBinding("psi1".into())));
    }

    #[test]
    fn odd_symbols_bind_to_odd_elements() {
        // psi1*psi2 with psi1 -> eta1 = g3, psi2 -> g4
        let a = &SuperScalar::odd_symbol("psi2") * &SuperScalar::odd_symbol("psi1");
        let mut b = HashMap::new();
        b.insert("psi1".to_string(), NumericGrassmann::generators(MultiIndex::single(3)));
        b.insert("psi2".to_string(), NumericGrassmann::generators(MultiIndex::single(4)));
        let got = substitute_numeric(&a, &b, &FunctionTable::new()).unwrap();
        assert_eq!(got, NumericGrassmann::generators(MultiIndex::of(&[3, 4])).scale(-1.0));
    }
}
