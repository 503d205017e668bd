//! Pullbacks of functions along a superspace map given in a chart.
//!
//! A map into an `n`-dimensional target is described by its [`Superfield`]:
//! the images of the `n` target coordinates, each an even [`SuperScalar`]
//! with a body and a nilpotent part. Everything else is computed from it:
//!
//! * [`pullback_taylor`]: Taylor expansion around the body, cut off where
//!   powers of the nilpotent part vanish;
//! * [`exp_xi_apply`]: the exponential of a Grassmann-valued vector field
//!   with constant coefficients, expanded through block splittings;
//! * [`ProductForm`]: the ordered product `∏ (1 + θ^A Ξ_A)` with each `Ξ_A`
//!   acting as a first order operator;
//! * [`pullback_odd_target`] for targets with odd coordinates, and
//!   [`berezin`] for integration over the odd coordinates.

use std::collections::BTreeMap;

use num_traits::One;

use crate::error::{Error, Result};
use crate::grassmann::{concat_sign, ordered_splittings, MultiIndex, SignedIndex};
use crate::scalar::{Function, Monomial, Poly, Rational, SuperScalar};

/// Images `φ*y^α` of the target coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Superfield {
    components: Vec<SuperScalar>,
    bodies: Vec<SuperScalar>,
}

impl Superfield {
    pub fn new(components: Vec<SuperScalar>) -> Result<Superfield> {
        for (k, c) in components.iter().enumerate() {
            if !c.is_even() {
                return Err(Error::OddComponent { component: k });
            }
        }
        let bodies = components.iter().map(SuperScalar::body).collect();
        Ok(Superfield { components, bodies })
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[SuperScalar] {
        &self.components
    }

    /// Generator-free, odd-symbol-free parts of the components.
    pub fn bodies(&self) -> &[SuperScalar] {
        &self.bodies
    }

    /// `φ*y^α − y₀^α`.
    pub fn nilpotent_parts(&self) -> Vec<SuperScalar> {
        self.components.iter().map(SuperScalar::soul).collect()
    }

    /// Highest generator index used by any component.
    pub fn max_generator(&self) -> usize {
        self.components.iter().map(SuperScalar::max_generator).max().unwrap_or(0)
    }
}

/// Taylor pullback with derivatives supplied by `deriv(r)`, the value of
/// `∂^r F` at the body point.
///
/// Terms are generated by multi-degree; a multi-degree whose nilpotent power
/// vanishes is dropped together with everything above it, so the loop ends
/// exactly at the nilpotency order.
pub fn pullback_with(sf: &Superfield, mut deriv: impl FnMut(&[u32]) -> SuperScalar) -> SuperScalar {
    let n = sf.dim();
    let nil = sf.nilpotent_parts();
    let mut out = deriv(&vec![0; n]);
    let mut frontier: Vec<(Vec<u32>, SuperScalar)> = vec![(vec![0; n], SuperScalar::one())];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for (r, p) in &frontier {
            let last = r.iter().rposition(|&k| k > 0).unwrap_or(0);
            for a in last..n {
                let mut r2 = r.clone();
                r2[a] += 1;
                let p2 = (p * &nil[a]).scale(&Rational::new(One::one(), r2[a].into()));
                if !p2.is_zero() {
                    out += &deriv(&r2) * &p2;
                    next.push((r2, p2));
                }
            }
        }
        frontier = next;
    }
    out
}

/// Taylor pullback carried to a fixed total order, without early exit.
pub fn pullback_to_order(sf: &Superfield, order: u32, mut deriv: impl FnMut(&[u32]) -> SuperScalar) -> SuperScalar {
    let n = sf.dim();
    let nil = sf.nilpotent_parts();
    let mut out = SuperScalar::zero();
    for r in multidegrees(n, order) {
        let mut p = SuperScalar::one();
        let mut fact = Rational::one();
        for (a, &k) in r.iter().enumerate() {
            p = &p * &nil[a].pow(k);
            for j in 1..=k {
                fact *= Rational::from_integer(j.into());
            }
        }
        out += &deriv(&r) * &p.scale(&fact.recip());
    }
    out
}

/// All `r ∈ ℕⁿ` with `|r| <= order`.
pub fn multidegrees(n: usize, order: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        let mut next = Vec::new();
        for r in &out {
            let used: u32 = r.iter().sum();
            for k in 0..=(order - used) {
                let mut r2 = r.clone();
                r2.push(k);
                next.push(r2);
            }
        }
        out = next;
    }
    out
}

/// `φ*f` for a formal function `f`: its derivatives stay atoms.
pub fn pullback_taylor(f: &Function, sf: &Superfield) -> Result<SuperScalar> {
    if f.arity != sf.dim() {
        return Err(Error::DimensionMismatch { expected: sf.dim(), found: f.arity });
    }
    Ok(pullback_with(sf, |r| SuperScalar::func(f.deriv(r))))
}

/// `φ*P` for an explicit polynomial `P` in the target coordinates
/// (`0`-based variables); derivatives are taken exactly and evaluated at the
/// bodies.
pub fn pullback_polynomial(p: &Poly<usize>, sf: &Superfield) -> Result<SuperScalar> {
    if let Some(v) = p.variables().into_iter().find(|&v| v >= sf.dim()) {
        return Err(Error::DimensionMismatch { expected: sf.dim(), found: v + 1 });
    }
    let bodies = sf.bodies().to_vec();
    Ok(pullback_with(sf, |r| {
        let mut d = p.clone();
        for (v, &k) in r.iter().enumerate() {
            for _ in 0..k {
                d = d.partial(&v);
            }
        }
        eval_poly(&d, &bodies)
    }))
}

/// Direct substitution `P(φ*y)` in the superalgebra.
pub fn eval_poly(p: &Poly<usize>, args: &[SuperScalar]) -> SuperScalar {
    p.eval_with(|v| args[*v].clone(), |c| SuperScalar::constant(c.clone()))
}

/// Coefficients `ξ_I^α` of `Ξ = Σ_I g^I ξ_I` with constant coefficients in
/// the target chart. Each `g^I ξ_I^α` is even, so `ξ_I` has the parity of
/// `I`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct XiField {
    dim: usize,
    fields: BTreeMap<MultiIndex, Vec<SuperScalar>>,
}

impl XiField {
    pub fn new(dim: usize) -> XiField {
        XiField { dim, fields: BTreeMap::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Sets `ξ_I`. Rejects the empty index, wrong lengths and coefficients
    /// that are not homogeneous of the parity of `I` or contain generators.
    pub fn insert(&mut self, index: MultiIndex, coeffs: Vec<SuperScalar>) -> Result<()> {
        if coeffs.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: coeffs.len() });
        }
        let expected = index.parity();
        let ok = !index.is_empty()
            && coeffs.iter().all(|c| c.is_zero() || (c.parity() == Some(expected) && c.max_generator() == 0));
        if !ok {
            return Err(Error::ParityMismatch { index, expected });
        }
        if coeffs.iter().all(SuperScalar::is_zero) {
            self.fields.remove(&index);
        } else {
            self.fields.insert(index, coeffs);
        }
        Ok(())
    }

    pub fn get(&self, index: MultiIndex) -> Option<&[SuperScalar]> {
        self.fields.get(&index).map(Vec::as_slice)
    }

    pub fn keys(&self) -> impl Iterator<Item = MultiIndex> + '_ {
        self.fields.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (MultiIndex, &[SuperScalar])> {
        self.fields.iter().map(|(k, v)| (*k, v.as_slice()))
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    fn support(&self) -> MultiIndex {
        self.fields.keys().fold(MultiIndex::EMPTY, |a, k| a.union(*k))
    }
}

/// `(e^Ξ f)` restricted to the graph of the body map.
///
/// The coefficient of `g^K` collects every ordered splitting of `K` into
/// keys of `Ξ`, weighted by its epsilon sign and `1/n!`. Coefficients of odd
/// keys pick up the extra sign of being moved past the later generator
/// blocks.
pub fn exp_xi_apply(xi: &XiField, f: &Function) -> Result<SuperScalar> {
    let n = f.arity;
    if xi.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: xi.dim() });
    }
    let mut out = SuperScalar::func(f.value());
    let support = xi.support();
    let sub_bits = support.bits();
    let mut sub = sub_bits;
    while sub != 0 {
        let target = MultiIndex::from_bits(sub);
        sub = (sub - 1) & sub_bits;
        let mut coeff = SuperScalar::zero();
        for (blocks, eps) in ordered_splittings(target, |b| xi.get(b).is_some()) {
            let k = blocks.len();
            let mut sign = eps;
            for j in 0..k {
                if blocks[j].parity() == 1 {
                    let later: usize = blocks[j + 1..].iter().map(|b| b.len()).sum();
                    if later % 2 == 1 {
                        sign = -sign;
                    }
                }
            }
            let weight = Rational::new(sign.into(), factorial(k).into());
            // sum over target directions α_1..α_k
            let mut partial: Vec<(Vec<u32>, SuperScalar)> = vec![(vec![0; n], SuperScalar::one())];
            for b in &blocks {
                let xs = xi.get(*b).expect("block drawn from keys");
                let mut next = Vec::new();
                for (r, p) in &partial {
                    for (a, x) in xs.iter().enumerate() {
                        if x.is_zero() {
                            continue;
                        }
                        let p2 = p * x;
                        if !p2.is_zero() {
                            let mut r2 = r.clone();
                            r2[a] += 1;
                            next.push((r2, p2));
                        }
                    }
                }
                partial = next;
            }
            for (r, p) in partial {
                coeff += (&p * &SuperScalar::func(f.deriv(&r))).scale(&weight);
            }
        }
        out += &SuperScalar::generators(target) * &coeff;
    }
    Ok(out)
}

fn factorial(k: usize) -> u64 {
    (1..=k as u64).product()
}

/// The canonical constant-coefficient `Ξ` of a superfield: `ξ_I^α` is the
/// coefficient of `g^I` in the `α`-th component. With these coefficients
/// `exp_xi_apply` reproduces `pullback_taylor`.
pub fn reconstruct_xi(sf: &Superfield) -> Result<XiField> {
    let n = sf.dim();
    let mut table: BTreeMap<MultiIndex, Vec<SuperScalar>> = BTreeMap::new();
    for (alpha, c) in sf.components().iter().enumerate() {
        for (index, coeff) in c.by_generators() {
            if index.is_empty() {
                if !coeff.soul().is_zero() {
                    return Err(Error::GeneratorFreeNilpotent { component: alpha });
                }
                continue;
            }
            table.entry(index).or_insert_with(|| vec![SuperScalar::zero(); n])[alpha] = coeff;
        }
    }
    let mut xi = XiField::new(n);
    for (index, coeffs) in table {
        xi.insert(index, coeffs)?;
    }
    Ok(xi)
}

/// `φ* ∏_A (1 + θ^A Ξ_A)` with `Ξ_A = Σ_α ψ_A^α ∂_α`. Factors are kept in
/// the given order.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductForm {
    dim: usize,
    factors: Vec<(MultiIndex, Vec<SuperScalar>)>,
}

impl ProductForm {
    pub fn new(dim: usize) -> ProductForm {
        ProductForm { dim, factors: Vec::new() }
    }

    /// Appends `(1 + θ^A Ξ_A)`; the coefficients must have the parity of `A`.
    pub fn push(&mut self, index: MultiIndex, coeffs: Vec<SuperScalar>) -> Result<()> {
        if coeffs.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: coeffs.len() });
        }
        let expected = index.parity();
        if index.is_empty() || coeffs.iter().any(|c| !c.is_zero() && c.parity() != Some(expected)) {
            return Err(Error::ParityMismatch { index, expected });
        }
        self.factors.push((index, coeffs));
        Ok(())
    }

    pub fn factors(&self) -> &[(MultiIndex, Vec<SuperScalar>)] {
        &self.factors
    }

    /// Expands the operator product as a polynomial in the commuting `∂_α`,
    /// keyed by multi-degree.
    pub fn operator(&self) -> BTreeMap<Vec<u32>, SuperScalar> {
        let n = self.dim;
        let mut acc: BTreeMap<Vec<u32>, SuperScalar> = BTreeMap::new();
        acc.insert(vec![0; n], SuperScalar::one());
        for (index, coeffs) in &self.factors {
            let theta = SuperScalar::generators(*index);
            let mut next = acc.clone();
            for (r, c) in &acc {
                for (a, psi) in coeffs.iter().enumerate() {
                    let t = &(c * &theta) * psi;
                    if t.is_zero() {
                        continue;
                    }
                    let mut r2 = r.clone();
                    r2[a] += 1;
                    *next.entry(r2).or_default() += t;
                }
            }
            next.retain(|_, v| !v.is_zero());
            acc = next;
        }
        acc
    }

    /// Applies the operator to `f` and restricts to the body map.
    pub fn apply(&self, f: &Function) -> Result<SuperScalar> {
        if f.arity != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: f.arity });
        }
        Ok(self.operator().into_iter().map(|(r, c)| &c * &SuperScalar::func(f.deriv(&r))).sum())
    }

    /// The superfield `φ + Σ_A θ^A ψ_A` this product form describes.
    pub fn superfield(&self, bodies: &[SuperScalar]) -> Result<Superfield> {
        if bodies.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: bodies.len() });
        }
        let mut comps = bodies.to_vec();
        for (index, coeffs) in &self.factors {
            let theta = SuperScalar::generators(*index);
            for (a, psi) in coeffs.iter().enumerate() {
                comps[a] += &theta * psi;
            }
        }
        Superfield::new(comps)
    }
}

/// Free expansion of `∏_A (1 + θ^A Ξ_A)` with each `Ξ_A` an abstract
/// symbol of the parity of `A`.
pub fn expand_product_operator(factors: &[(MultiIndex, String)]) -> SuperScalar {
    let mut acc = SuperScalar::one();
    for (index, name) in factors {
        let op = if index.parity() == 1 { SuperScalar::odd_symbol(name) } else { SuperScalar::even_symbol(name) };
        acc = &acc * &(SuperScalar::one() + &SuperScalar::generators(*index) * &op);
    }
    acc
}

/// Map into a target with `n` even and `m` odd coordinates: `φ*y^α` and
/// `χ^j = φ*ψ^j`.
#[derive(Clone, Debug, PartialEq)]
pub struct OddTargetMap {
    even: Superfield,
    odd: Vec<SuperScalar>,
}

impl OddTargetMap {
    pub fn new(even: Superfield, odd: Vec<SuperScalar>) -> Result<OddTargetMap> {
        for (j, chi) in odd.iter().enumerate() {
            if !chi.is_zero() && chi.parity() != Some(1) {
                return Err(Error::EvenOddImage { index: j });
            }
        }
        Ok(OddTargetMap { even, odd })
    }

    pub fn even_part(&self) -> &Superfield {
        &self.even
    }

    pub fn odd_images(&self) -> &[SuperScalar] {
        &self.odd
    }
}

/// `φ*(Σ_J F_J(y) ψ^J) = Σ_J φ*(F_J) χ^J`, with `J` ranging over subsets of
/// the odd target coordinates (1-based).
pub fn pullback_odd_target(tm: &OddTargetMap, family: &BTreeMap<MultiIndex, Function>) -> Result<SuperScalar> {
    let m = tm.odd.len();
    let mut out = SuperScalar::zero();
    for (j, f) in family {
        if let Some(top) = j.max_index() {
            if top > m {
                return Err(Error::DimensionMismatch { expected: m, found: top });
            }
        }
        let mut chi = SuperScalar::one();
        for i in j.indices() {
            chi = &chi * &tm.odd[i - 1];
        }
        out += &pullback_taylor(f, &tm.even)? * &chi;
    }
    Ok(out)
}

/// Berezin integral over the generators in `vars`: the coefficient of
/// `g^{vars}` (ascending order) after moving those generators to the front.
pub fn berezin(a: &SuperScalar, vars: MultiIndex) -> SuperScalar {
    let mut out = SuperScalar::zero();
    for (m, c) in a.terms() {
        if !vars.is_subset(m.gens) {
            continue;
        }
        let rest = m.gens.difference(vars);
        let negative = match concat_sign(vars, rest) {
            SignedIndex::Signed { negative, .. } => negative,
            SignedIndex::Zero => unreachable!("disjoint by construction"),
        };
        let mono = Monomial { gens: rest, ..m.clone() };
        out.add_term(mono, if negative { -c.clone() } else { c.clone() });
    }
    out
}
