use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::grassmann::{concat_sign, GeneratorSet, MultiIndex, SignedIndex};
use crate::scalar::{FuncDeriv, Rational};

/// One product of atoms, stored in normal order:
/// generators (ascending), then odd symbols (sorted by name), then the even
/// part. Only the first two blocks carry signs.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial {
    pub gens: MultiIndex,
    pub odd: Vec<String>,
    pub even: Vec<(String, u32)>,
    pub funcs: Vec<(FuncDeriv, u32)>,
}

impl Monomial {
    pub fn parity(&self) -> u8 {
        ((self.gens.len() + self.odd.len()) % 2) as u8
    }

    /// No generators and no odd symbols.
    pub fn is_body(&self) -> bool {
        self.gens.is_empty() && self.odd.is_empty()
    }

    /// `self * other` in normal order, with its sign, or `None` if a
    /// generator or odd symbol repeats.
    fn mul(&self, other: &Monomial) -> Option<(Monomial, bool)> {
        let (gens, mut negative) = match concat_sign(self.gens, other.gens) {
            SignedIndex::Zero => return None,
            SignedIndex::Signed { index, negative } => (index, negative),
        };
        // odd symbols of `self` travel past the generators of `other`
        if self.odd.len() % 2 == 1 && other.gens.len() % 2 == 1 {
            negative = !negative;
        }
        let (odd, flip) = merge_odd(&self.odd, &other.odd)?;
        negative ^= flip;
        Some((
            Monomial {
                gens,
                odd,
                even: merge_powers(&self.even, &other.even),
                funcs: merge_powers(&self.funcs, &other.funcs),
            },
            negative,
        ))
    }
}

/// Merge two sorted odd-symbol lists; the flag is the parity of the
/// inversions of `a ++ b`.
fn merge_odd(a: &[String], b: &[String]) -> Option<(Vec<String>, bool)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut negative = false;
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                // b[j] jumps over the remaining a's
                if (a.len() - i) % 2 == 1 {
                    negative = !negative;
                }
                out.push(b[j].clone());
                j += 1;
            }
            std::cmp::Ordering::Equal => return None,
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    Some((out, negative))
}

fn merge_powers<K: Ord + Clone>(a: &[(K, u32)], b: &[(K, u32)]) -> Vec<(K, u32)> {
    let mut map: BTreeMap<K, u32> = a.iter().cloned().collect();
    for (k, e) in b {
        *map.entry(k.clone()).or_insert(0) += e;
    }
    map.into_iter().collect()
}

/// Element of the free supercommutative algebra over rationals, named even
/// and odd symbols, function-derivative atoms and the anticommuting
/// generators.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct SuperScalar {
    terms: BTreeMap<Monomial, Rational>,
}

impl SuperScalar {
    pub fn zero() -> SuperScalar {
        SuperScalar::default()
    }

    pub fn one() -> SuperScalar {
        SuperScalar::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> SuperScalar {
        SuperScalar::from_term(Monomial::default(), c)
    }

    pub fn int(n: i64) -> SuperScalar {
        SuperScalar::constant(Rational::from_integer(n.into()))
    }

    pub fn from_term(m: Monomial, c: Rational) -> SuperScalar {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        SuperScalar { terms }
    }

    pub fn even_symbol(name: &str) -> SuperScalar {
        SuperScalar::from_term(Monomial { even: vec![(name.to_string(), 1)], ..Monomial::default() }, Rational::one())
    }

    pub fn odd_symbol(name: &str) -> SuperScalar {
        SuperScalar::from_term(Monomial { odd: vec![name.to_string()], ..Monomial::default() }, Rational::one())
    }

    pub fn generator(i: usize) -> SuperScalar {
        SuperScalar::generators(MultiIndex::single(i))
    }

    /// The ordered product of the generators in `index`.
    pub fn generators(index: MultiIndex) -> SuperScalar {
        SuperScalar::from_term(Monomial { gens: index, ..Monomial::default() }, Rational::one())
    }

    pub fn func(d: FuncDeriv) -> SuperScalar {
        SuperScalar::from_term(Monomial { funcs: vec![(d, 1)], ..Monomial::default() }, Rational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    /// Rebuilds from arbitrary terms, dropping zero coefficients.
    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Rational)>) -> SuperScalar {
        let mut out = SuperScalar::zero();
        for (m, c) in terms {
            out.add_term(m, c);
        }
        out
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> SuperScalar {
        if c.is_zero() {
            return SuperScalar::zero();
        }
        SuperScalar { terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect() }
    }

    /// Parity of a homogeneous element; `None` for mixed elements. Zero is
    /// reported as even.
    pub fn parity(&self) -> Option<u8> {
        let mut it = self.terms.keys().map(Monomial::parity);
        match it.next() {
            None => Some(0),
            Some(p) => it.all(|q| q == p).then_some(p),
        }
    }

    pub fn is_even(&self) -> bool {
        self.parity() == Some(0)
    }

    pub fn is_odd(&self) -> bool {
        !self.is_zero() && self.parity() == Some(1)
    }

    /// The part free of generators and odd symbols.
    pub fn body(&self) -> SuperScalar {
        SuperScalar {
            terms: self.terms.iter().filter(|(m, _)| m.is_body()).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    pub fn soul(&self) -> SuperScalar {
        SuperScalar {
            terms: self.terms.iter().filter(|(m, _)| !m.is_body()).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    /// Groups terms by generator monomial; the values are generator free.
    pub fn by_generators(&self) -> BTreeMap<MultiIndex, SuperScalar> {
        let mut out: BTreeMap<MultiIndex, SuperScalar> = BTreeMap::new();
        for (m, c) in &self.terms {
            let stripped = Monomial { gens: MultiIndex::EMPTY, ..m.clone() };
            out.entry(m.gens).or_default().add_term(stripped, c.clone());
        }
        out
    }

    /// The generator-free coefficient `c` with `self ⊇ g^index * c`.
    pub fn generator_coefficient(&self, index: MultiIndex) -> SuperScalar {
        self.by_generators().remove(&index).unwrap_or_default()
    }

    /// Largest generator index used, 0 if none.
    pub fn max_generator(&self) -> usize {
        self.terms.keys().filter_map(|m| m.gens.max_index()).max().unwrap_or(0)
    }

    pub fn pow(&self, k: u32) -> SuperScalar {
        let mut acc = SuperScalar::one();
        for _ in 0..k {
            acc = &acc * self;
            if acc.is_zero() {
                break;
            }
        }
        acc
    }

    /// Every function-derivative atom that occurs.
    pub fn func_atoms(&self) -> Vec<FuncDeriv> {
        let mut v: Vec<FuncDeriv> = self.terms.keys().flat_map(|m| m.funcs.iter().map(|(f, _)| f.clone())).collect();
        v.sort();
        v.dedup();
        v
    }

    /// Renders in the expression grammar, naming generators `theta<k>` for
    /// `k <= q` and `eta<k-q>` above.
    pub fn render(&self, gens: GeneratorSet) -> String {
        render(self, gens.q())
    }
}

fn render(s: &SuperScalar, q: usize) -> String {
    if s.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (k, (m, c)) in s.terms.iter().enumerate() {
        let mut factors = Vec::new();
        for i in m.gens.indices() {
            factors.push(if i <= q { format!("theta{i}") } else { format!("eta{}", i - q) });
        }
        factors.extend(m.odd.iter().cloned());
        for (name, e) in &m.even {
            factors.push(if *e == 1 { name.clone() } else { format!("{name}^{e}") });
        }
        for (d, e) in &m.funcs {
            factors.push(if *e == 1 { d.to_string() } else { format!("{d}^{e}") });
        }
        let negative = c.is_negative();
        let mag = c.abs();
        if k == 0 {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        if factors.is_empty() {
            out.push_str(&mag.to_string());
        } else {
            if !mag.is_one() {
                out.push_str(&mag.to_string());
                out.push('*');
            }
            out.push_str(&factors.join("*"));
        }
    }
    out
}

impl fmt::Display for SuperScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self, usize::MAX))
    }
}

impl fmt::Debug for SuperScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SuperScalar({self})")
    }
}

impl<'a> Add<&'a SuperScalar> for &'a SuperScalar {
    type Output = SuperScalar;
    fn add(self, rhs: &SuperScalar) -> SuperScalar {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for SuperScalar {
    type Output = SuperScalar;
    fn add(mut self, rhs: SuperScalar) -> SuperScalar {
        self += &rhs;
        self
    }
}

impl AddAssign<&SuperScalar> for SuperScalar {
    fn add_assign(&mut self, rhs: &SuperScalar) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl AddAssign for SuperScalar {
    fn add_assign(&mut self, rhs: SuperScalar) {
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
    }
}

impl Neg for &SuperScalar {
    type Output = SuperScalar;
    fn neg(self) -> SuperScalar {
        SuperScalar { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

impl Neg for SuperScalar {
    type Output = SuperScalar;
    fn neg(self) -> SuperScalar {
        -&self
    }
}

impl<'a> Sub<&'a SuperScalar> for &'a SuperScalar {
    type Output = SuperScalar;
    fn sub(self, rhs: &SuperScalar) -> SuperScalar {
        self + &(-rhs)
    }
}

impl Sub for SuperScalar {
    type Output = SuperScalar;
    fn sub(self, rhs: SuperScalar) -> SuperScalar {
        &self - &rhs
    }
}

impl<'a> Mul<&'a SuperScalar> for &'a SuperScalar {
    type Output = SuperScalar;
    fn mul(self, rhs: &SuperScalar) -> SuperScalar {
        let mut out = SuperScalar::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                if let Some((m, negative)) = ma.mul(mb) {
                    let c = ca * cb;
                    out.add_term(m, if negative { -c } else { c });
                }
            }
        }
        out
    }
}

impl Mul for SuperScalar {
    type Output = SuperScalar;
    fn mul(self, rhs: SuperScalar) -> SuperScalar {
        &self * &rhs
    }
}

impl std::iter::Sum for SuperScalar {
    fn sum<I: Iterator<Item = SuperScalar>>(iter: I) -> SuperScalar {
        let mut acc = SuperScalar::zero();
        for s in iter {
            acc += s;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn th(i: usize) -> SuperScalar {
        SuperScalar::generator(i)
    }

    fn odd(n: &str) -> SuperScalar {
        SuperScalar::odd_symbol(n)
    }

    #[test]
    fn theta_psi_product_sign() {
        let a = &th(1) * &odd("psi1");
        let b = &th(2) * &odd("psi2");
        let expected = -(&(&(&th(1) * &th(2)) * &odd("psi1")) * &odd("psi2"));
        assert_eq!(&a * &b, expected);
        // normal form stores it as one term with coefficient -1
        let p = &a * &b;
        let (m, c) = p.terms().next().unwrap();
        assert_eq!(m.gens, MultiIndex::of(&[1, 2]));
        assert_eq!(m.odd, vec!["psi1".to_string(), "psi2".to_string()]);
        assert_eq!(*c, Rational::from_integer((-1).into()));
    }

    #[test]
    fn unit_and_odd_square() {
        let x = SuperScalar::even_symbol("x");
        assert_eq!(&x * &SuperScalar::one(), x);
        assert!((&odd("psi1") * &odd("psi1")).is_zero());
        assert!((&th(3) * &th(3)).is_zero());
    }

    #[test]
    fn odd_symbols_anticommute() {
        let ab = &odd("a") * &odd("b");
        let ba = &odd("b") * &odd("a");
        assert_eq!(ab, -ba);
        let t1a = &th(1) * &odd("a");
        let at1 = &odd("a") * &th(1);
        assert_eq!(t1a, -at1);
    }

    #[test]
    fn body_and_soul() {
        let s =
            SuperScalar::even_symbol("phi") + &th(1) * &odd("psi1") + &odd("psi1") * &odd("psi2") + SuperScalar::int(3);
        assert_eq!(s.body(), SuperScalar::even_symbol("phi") + SuperScalar::int(3));
        assert_eq!(s.soul().len(), 2);
        assert!(s.is_even());
        assert_eq!((s.clone() + th(2)).parity(), None);
    }

    #[test]
    fn render_grammar() {
        let s = SuperScalar::even_symbol("phi")
            - (&(&th(1) * &th(2)) * &SuperScalar::even_symbol("F")).scale(&Rational::new(2.into(), 3.into()));
        assert_eq!(s.to_string(), "phi - 2/3*theta1*theta2*F");
        assert_eq!(s.render(GeneratorSet::new(1, 1).unwrap()), "phi - 2/3*theta1*eta1*F");
    }
}
