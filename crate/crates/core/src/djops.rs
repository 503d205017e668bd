//! The operators `𝒟_I` on polynomials in the even coordinates `s^I`.
//!
//! For an even multi-index `I`,
//! `𝒟_I = Σ_k 1/k! Σ_{I_1..I_k} ε^{I_1..I_k}_I ∂^k / ∂s^{I_1}..∂s^{I_k}`,
//! evaluated at `s = 0`, where the blocks range over ordered tuples of even
//! nonempty multi-indices. These are the component extractors of the
//! pullback `Σ_I g^I 𝒟_I(f ∘ Φ)`.

use std::collections::HashMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::grassmann::{concat_sign, ordered_splittings, GeneratorSet, MultiIndex, ParityClass, SignedIndex};
use crate::scalar::{Function, Poly, Rational, SPolynomial, SuperScalar};
use crate::supercalc::Superfield;

/// Ordered block splittings of an index with their signs.
type Splittings = Vec<(Vec<MultiIndex>, i32)>;

/// Enumerations and splitting tables for one generator set, built once.
#[derive(Clone, Debug)]
pub struct DOperatorContext {
    gens: GeneratorSet,
    even: Vec<MultiIndex>,
    positive: Vec<MultiIndex>,
    splittings: HashMap<MultiIndex, Splittings>,
}

impl DOperatorContext {
    pub fn new(gens: GeneratorSet) -> DOperatorContext {
        let even = gens.class(ParityClass::Even);
        let positive = gens.class(ParityClass::EvenPositive);
        let splittings = even.iter().map(|&i| (i, ordered_splittings(i, |b| b.is_even()))).collect();
        DOperatorContext { gens, even, positive, splittings }
    }

    pub fn coordinates(q: usize) -> DOperatorContext {
        DOperatorContext::new(GeneratorSet::coordinates(q))
    }

    pub fn generators(&self) -> GeneratorSet {
        self.gens
    }

    /// Even multi-indices, including the empty one.
    pub fn even(&self) -> &[MultiIndex] {
        &self.even
    }

    /// Even nonempty multi-indices: the labels of the `s` coordinates.
    pub fn positive(&self) -> &[MultiIndex] {
        &self.positive
    }

    /// Ordered splittings of `index` into even nonempty blocks, with signs.
    /// Empty for odd or foreign indices.
    pub fn splittings(&self, index: MultiIndex) -> &[(Vec<MultiIndex>, i32)] {
        self.splittings.get(&index).map(Vec::as_slice).unwrap_or(&[])
    }

    /// `(𝒟_I F)(0)`.
    pub fn d_op(&self, index: MultiIndex, f: &SPolynomial) -> Rational {
        if index.is_empty() {
            return f.constant_term();
        }
        let mut acc = Rational::zero();
        for (blocks, eps) in self.splittings(index) {
            let mut g = f.clone();
            for b in blocks {
                g = g.partial(b);
                if g.is_zero() {
                    break;
                }
            }
            let v = g.constant_term();
            if !v.is_zero() {
                acc += v * Rational::new((*eps).into(), factorial(blocks.len()).into());
            }
        }
        acc
    }

    /// Both sides of `𝒟_I(ab) = Σ ε^{I_1 I_2}_I (𝒟_{I_1} a)(𝒟_{I_2} b)`, the
    /// sum including the splittings `(∅, I)` and `(I, ∅)`.
    pub fn leibniz_check(&self, a: &SPolynomial, b: &SPolynomial, index: MultiIndex) -> (Rational, Rational) {
        let lhs = self.d_op(index, &(a * b));
        let mut rhs = Rational::zero();
        for &i1 in &self.even {
            if !i1.is_subset(index) {
                continue;
            }
            let i2 = index.difference(i1);
            if !i2.is_even() {
                continue;
            }
            if let SignedIndex::Signed { negative, .. } = concat_sign(i1, i2) {
                let t = self.d_op(i1, a) * self.d_op(i2, b);
                rhs += if negative { -t } else { t };
            }
        }
        (lhs, rhs)
    }

    /// Both sides of the chain rule for `𝒟_I(F ∘ Y)(0)`: `F` is a polynomial
    /// in `m` variables (`0`-based) and `Y` has `m` components.
    pub fn chain_rule_check(
        &self,
        f: &Poly<usize>,
        y: &[SPolynomial],
        index: MultiIndex,
    ) -> Result<(Rational, Rational)> {
        let m = y.len();
        if let Some(v) = f.variables().into_iter().find(|&v| v >= m) {
            return Err(Error::DimensionMismatch { expected: m, found: v + 1 });
        }
        let lhs = self.d_op(index, &f.compose(|v| y[*v].clone()));
        let y0: Vec<Rational> = y.iter().map(SPolynomial::constant_term).collect();
        if index.is_empty() {
            return Ok((lhs, f.eval_rational(|v| y0[*v].clone())));
        }
        let jet = self.jet(y);
        let mut rhs = Rational::zero();
        for (blocks, eps) in self.splittings(index) {
            let weight = Rational::new((*eps).into(), factorial(blocks.len()).into());
            for alphas in tuples(m, blocks.len()) {
                let mut prod = weight.clone();
                for (b, &a) in blocks.iter().zip(&alphas) {
                    prod *= &jet[&(*b, a)];
                    if prod.is_zero() {
                        break;
                    }
                }
                if prod.is_zero() {
                    continue;
                }
                let mut d = f.clone();
                for &a in &alphas {
                    d = d.partial(&a);
                }
                rhs += prod * d.eval_rational(|v| y0[*v].clone());
            }
        }
        Ok((lhs, rhs))
    }

    /// `𝒟_J Y^α(0)` for every positive `J` and component `α`.
    fn jet(&self, y: &[SPolynomial]) -> HashMap<(MultiIndex, usize), Rational> {
        let mut out = HashMap::new();
        for &j in &self.positive {
            for (a, ya) in y.iter().enumerate() {
                out.insert((j, a), self.d_op(j, ya));
            }
        }
        out
    }

    /// Whether `F` lies in the ideal of polynomials all of whose `𝒟_I`
    /// vanish at the origin.
    pub fn ideal_member(&self, f: &SPolynomial) -> bool {
        self.even.iter().all(|&i| self.d_op(i, f).is_zero())
    }

    /// `Σ_I g^I 𝒟_I F(0)`: the algebra map onto the even Grassmann algebra
    /// whose kernel is the ideal.
    pub fn iso_to_grassmann(&self, f: &SPolynomial) -> SuperScalar {
        self.even.iter().map(|&i| SuperScalar::generators(i).scale(&self.d_op(i, f))).sum()
    }

    /// The ideal generator `s^{I_1} s^{I_2} − Σ_I ε^{I_1 I_2}_I s^I`.
    pub fn ideal_generator(&self, blocks: &[MultiIndex]) -> SPolynomial {
        let mut p = SPolynomial::int(1);
        for b in blocks {
            p = &p * &SPolynomial::var(*b);
        }
        let union = blocks.iter().fold(MultiIndex::EMPTY, |a, b| a.union(*b));
        let eps = crate::grassmann::epsilon(blocks, union);
        if eps != 0 && self.gens.admits(union) {
            p = &p - &SPolynomial::var(union).scale(&Rational::from_integer(eps.into()));
        }
        p
    }

    /// Membership in the group of origin-fixing self-maps with identity
    /// `𝒟`-jet. Components of `s` are listed in the order of
    /// [`positive`](Self::positive).
    pub fn tq_member(&self, s: &SMap) -> bool {
        if s.components.len() != self.positive.len() {
            return false;
        }
        s.components.iter().enumerate().all(|(jpos, sj)| {
            sj.constant_term().is_zero()
                && self.positive.iter().enumerate().all(|(ipos, &i)| {
                    let want = if ipos == jpos { Rational::one() } else { Rational::zero() };
                    self.d_op(i, sj) == want
                })
        })
    }

    /// `Σ_I g^I 𝒟_I(f ∘ Φ)(0)` with each `𝒟_I(f ∘ Φ)` expanded by the chain
    /// rule through the `𝒟`-jet of `Y = y ∘ Φ`.
    pub fn phi_route_pullback(&self, y: &[SPolynomial], f: &Function) -> Result<SuperScalar> {
        let n = y.len();
        if f.arity != n {
            return Err(Error::DimensionMismatch { expected: n, found: f.arity });
        }
        let jet = self.jet(y);
        let mut out = SuperScalar::func(f.value());
        for &i in &self.positive {
            let mut coeff = SuperScalar::zero();
            for (blocks, eps) in self.splittings(i) {
                let weight = Rational::new((*eps).into(), factorial(blocks.len()).into());
                for alphas in tuples(n, blocks.len()) {
                    let mut prod = weight.clone();
                    let mut r = vec![0u32; n];
                    for (b, &a) in blocks.iter().zip(&alphas) {
                        prod *= &jet[&(*b, a)];
                        r[a] += 1;
                        if prod.is_zero() {
                            break;
                        }
                    }
                    if !prod.is_zero() {
                        coeff += SuperScalar::func(f.deriv(&r)).scale(&prod);
                    }
                }
            }
            out += &SuperScalar::generators(i) * &coeff;
        }
        Ok(out)
    }

    /// The superfield `Σ_I g^I 𝒟_I Y^α(0)` carried by `Y`.
    pub fn superfield_of(&self, y: &[SPolynomial]) -> Superfield {
        let comps = y
            .iter()
            .map(|ya| self.even.iter().map(|&i| SuperScalar::generators(i).scale(&self.d_op(i, ya))).sum())
            .collect();
        Superfield::new(comps).expect("even by construction")
    }
}

/// A polynomial map given by its components.
#[derive(Clone, Debug, PartialEq)]
pub struct SMap {
    pub components: Vec<SPolynomial>,
}

impl SMap {
    pub fn new(components: Vec<SPolynomial>) -> SMap {
        SMap { components }
    }

    pub fn identity(ctx: &DOperatorContext) -> SMap {
        SMap { components: ctx.positive().iter().map(|&j| SPolynomial::var(j)).collect() }
    }

    /// `self ∘ s`, where `s` is a self-map listed in `ctx.positive()` order.
    pub fn compose(&self, ctx: &DOperatorContext, s: &SMap) -> SMap {
        let lookup: HashMap<MultiIndex, &SPolynomial> = ctx.positive().iter().copied().zip(&s.components).collect();
        SMap {
            components: self
                .components
                .iter()
                .map(|c| c.compose(|v| lookup.get(v).map(|p| (*p).clone()).unwrap_or_else(|| SPolynomial::var(*v))))
                .collect(),
        }
    }
}

fn factorial(k: usize) -> u64 {
    (1..=k as u64).product()
}

/// All tuples in `[0, m)^k`.
fn tuples(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..m).map(move |a| {
                    let mut t2 = t.clone();
                    t2.push(a);
                    t2
                })
            })
            .collect();
    }
    out
}
