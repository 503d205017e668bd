use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::grassmann::MultiIndex;
use crate::scalar::Rational;

/// Exponent vector: sorted `(variable, power)` pairs with positive powers.
pub type PolyMonomial<V> = Vec<(V, u32)>;

/// Exact polynomial in commuting variables of type `V`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly<V: Ord + Clone> {
    terms: BTreeMap<PolyMonomial<V>, Rational>,
}

/// Polynomial in the even coordinates `s^I`, `I` even and nonempty.
pub type SPolynomial = Poly<MultiIndex>;

impl<V: Ord + Clone> Default for Poly<V> {
    fn default() -> Self {
        Poly { terms: BTreeMap::new() }
    }
}

impl<V: Ord + Clone> Poly<V> {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = Poly::zero();
        p.add_term(Vec::new(), c);
        p
    }

    pub fn int(n: i64) -> Self {
        Poly::constant(Rational::from_integer(n.into()))
    }

    pub fn var(v: V) -> Self {
        let mut p = Poly::zero();
        p.add_term(vec![(v, 1)], Rational::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PolyMonomial<V>, &Rational)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, m: PolyMonomial<V>, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect() }
    }

    /// Value at the origin.
    pub fn constant_term(&self) -> Rational {
        self.terms.get(&Vec::new()).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|m| m.iter().map(|(_, e)| e).sum()).max().unwrap_or(0)
    }

    pub fn variables(&self) -> Vec<V> {
        let mut v: Vec<V> = self.terms.keys().flat_map(|m| m.iter().map(|(x, _)| x.clone())).collect();
        v.sort();
        v.dedup();
        v
    }

    /// Formal partial derivative in `v`.
    pub fn partial(&self, v: &V) -> Self {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            if let Some(pos) = m.iter().position(|(x, _)| x == v) {
                let e = m[pos].1;
                let mut m2 = m.clone();
                if e == 1 {
                    m2.remove(pos);
                } else {
                    m2[pos].1 = e - 1;
                }
                out.add_term(m2, c * Rational::from_integer(e.into()));
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Poly::int(1);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Evaluates in any commutative target, given the images of the
    /// variables and of rational constants.
    pub fn eval_with<T, FV, FC>(&self, mut var: FV, constant: FC) -> T
    where
        T: Clone + Add<Output = T> + Mul<Output = T>,
        FV: FnMut(&V) -> T,
        FC: Fn(&Rational) -> T,
    {
        let mut acc = constant(&Rational::zero());
        for (m, c) in &self.terms {
            let mut t = constant(c);
            for (v, e) in m {
                let x = var(v);
                for _ in 0..*e {
                    t = t * x.clone();
                }
            }
            acc = acc + t;
        }
        acc
    }

    /// Substitutes a polynomial for every variable.
    pub fn compose<W: Ord + Clone>(&self, mut image: impl FnMut(&V) -> Poly<W>) -> Poly<W> {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut t = Poly::constant(c.clone());
            for (v, e) in m {
                t = &t * &image(v).pow(*e);
            }
            out = &out + &t;
        }
        out
    }

    /// Value at a rational point.
    pub fn eval_rational(&self, mut point: impl FnMut(&V) -> Rational) -> Rational {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, e) in m {
                let x = point(v);
                for _ in 0..*e {
                    t *= &x;
                }
            }
            acc += t;
        }
        acc
    }
}

fn mul_monomials<V: Ord + Clone>(a: &[(V, u32)], b: &[(V, u32)]) -> PolyMonomial<V> {
    let mut map: BTreeMap<V, u32> = a.iter().cloned().collect();
    for (v, e) in b {
        *map.entry(v.clone()).or_insert(0) += e;
    }
    map.into_iter().collect()
}

impl<'a, V: Ord + Clone> Add<&'a Poly<V>> for &'a Poly<V> {
    type Output = Poly<V>;
    fn add(self, rhs: &Poly<V>) -> Poly<V> {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<V: Ord + Clone> Add for Poly<V> {
    type Output = Poly<V>;
    fn add(self, rhs: Poly<V>) -> Poly<V> {
        &self + &rhs
    }
}

impl<V: Ord + Clone> Neg for &Poly<V> {
    type Output = Poly<V>;
    fn neg(self) -> Poly<V> {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

impl<V: Ord + Clone> Neg for Poly<V> {
    type Output = Poly<V>;
    fn neg(self) -> Poly<V> {
        -&self
    }
}

impl<'a, V: Ord + Clone> Sub<&'a Poly<V>> for &'a Poly<V> {
    type Output = Poly<V>;
    fn sub(self, rhs: &Poly<V>) -> Poly<V> {
        self + &(-rhs)
    }
}

impl<V: Ord + Clone> Sub for Poly<V> {
    type Output = Poly<V>;
    fn sub(self, rhs: Poly<V>) -> Poly<V> {
        &self - &rhs
    }
}

impl<'a, V: Ord + Clone> Mul<&'a Poly<V>> for &'a Poly<V> {
    type Output = Poly<V>;
    fn mul(self, rhs: &Poly<V>) -> Poly<V> {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(mul_monomials(ma, mb), ca * cb);
            }
        }
        out
    }
}

impl<V: Ord + Clone> Mul for Poly<V> {
    type Output = Poly<V>;
    fn mul(self, rhs: Poly<V>) -> Poly<V> {
        &self * &rhs
    }
}

/// Variables that know how to print themselves in the expression grammar.
pub trait VarName {
    fn var_name(&self) -> String;
}

impl VarName for MultiIndex {
    fn var_name(&self) -> String {
        let idx: Vec<String> = self.indices().map(|i| i.to_string()).collect();
        format!("s{{{}}}", idx.join(","))
    }
}

/// Target coordinates, printed 1-based as `y<k>`.
impl VarName for usize {
    fn var_name(&self) -> String {
        format!("y{}", self + 1)
    }
}

impl<V: Ord + Clone + VarName> fmt::Display for Poly<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let negative = c.is_negative();
            if k == 0 {
                if negative {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if negative { " - " } else { " + " })?;
            }
            let mag = c.abs();
            let factors: Vec<String> =
                m.iter().map(|(v, e)| if *e == 1 { v.var_name() } else { format!("{}^{e}", v.var_name()) }).collect();
            if factors.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                f.write_str(&factors.join("*"))?;
            } else {
                write!(f, "{mag}*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl<V: Ord + Clone + VarName> fmt::Debug for Poly<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

/// `∂F/∂s^I`.
pub fn spoly_partial(f: &SPolynomial, index: MultiIndex) -> SPolynomial {
    f.partial(&index)
}
