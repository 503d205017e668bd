#![allow(dead_code)]

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng;
use superpull::grassmann::{GeneratorSet, MultiIndex, ParityClass};
use superpull::oracle::NumericGrassmann;
use superpull::scalar::{rat, Poly, SPolynomial, SuperScalar};
use superpull::supercalc::Superfield;

pub const EVEN_SYMBOLS: [&str; 3] = ["a", "b", "c"];
pub const ODD_SYMBOLS: [&str; 3] = ["psi1", "psi2", "psi3"];

pub fn small_rational(rng: &mut impl Rng) -> superpull::Rational {
    let n = rng.gen_range(-4..=4);
    let d = rng.gen_range(1..=3);
    rat(if n == 0 { 1 } else { n }, d)
}

/// Even coefficient for an even generator monomial: a number, an even
/// symbol or a pair of odd symbols.
fn even_coefficient(rng: &mut impl Rng) -> SuperScalar {
    let c = SuperScalar::constant(small_rational(rng));
    match rng.gen_range(0..4) {
        0 => c,
        1 | 2 => &c * &SuperScalar::even_symbol(EVEN_SYMBOLS.choose(rng).unwrap()),
        _ => {
            let mut pair: Vec<&str> = ODD_SYMBOLS.choose_multiple(rng, 2).copied().collect();
            pair.shuffle(rng);
            &(&c * &SuperScalar::odd_symbol(pair[0])) * &SuperScalar::odd_symbol(pair[1])
        }
    }
}

fn odd_coefficient(rng: &mut impl Rng) -> SuperScalar {
    let mut c =
        &SuperScalar::constant(small_rational(rng)) * &SuperScalar::odd_symbol(ODD_SYMBOLS.choose(rng).unwrap());
    if rng.gen_bool(0.3) {
        c = &c * &SuperScalar::even_symbol(EVEN_SYMBOLS.choose(rng).unwrap());
    }
    c
}

/// A random even element with a body and a few nilpotent terms over `gens`.
pub fn random_even_element(rng: &mut impl Rng, gens: GeneratorSet, max_terms: usize) -> SuperScalar {
    let mut out = SuperScalar::constant(small_rational(rng));
    if rng.gen_bool(0.5) {
        out += SuperScalar::even_symbol(EVEN_SYMBOLS.choose(rng).unwrap());
    }
    let nonempty: Vec<MultiIndex> = gens.class(ParityClass::All).into_iter().filter(|i| !i.is_empty()).collect();
    if nonempty.is_empty() {
        return out;
    }
    for _ in 0..rng.gen_range(0..=max_terms) {
        let i = *nonempty.choose(rng).unwrap();
        let coeff = if i.is_even() { even_coefficient(rng) } else { odd_coefficient(rng) };
        out += &SuperScalar::generators(i) * &coeff;
    }
    out
}

/// `q + L <= max_total` with at least two auxiliary generators.
pub fn random_oracle_generator_set(rng: &mut impl Rng, max_total: usize) -> GeneratorSet {
    let total = rng.gen_range(3..=max_total);
    let q = rng.gen_range(1..=total - 2);
    GeneratorSet::new(q, total - q).unwrap()
}

pub fn random_generator_set(rng: &mut impl Rng, max_total: usize) -> GeneratorSet {
    let total = rng.gen_range(1..=max_total);
    let q = rng.gen_range(1..=total);
    GeneratorSet::new(q, total - q).unwrap()
}

pub fn random_superfield(rng: &mut impl Rng, gens: GeneratorSet, dim: usize, max_terms: usize) -> Superfield {
    Superfield::new((0..dim).map(|_| random_even_element(rng, gens, max_terms)).collect()).unwrap()
}

/// A polynomial in `y1..yn` of total degree at most `max_deg`.
pub fn random_target_poly(rng: &mut impl Rng, n: usize, max_deg: u32, max_terms: usize) -> Poly<usize> {
    let mut p = Poly::zero();
    for _ in 0..rng.gen_range(1..=max_terms) {
        let deg = rng.gen_range(0..=max_deg);
        let mut m = Poly::constant(small_rational(rng));
        for _ in 0..deg {
            m = &m * &Poly::var(rng.gen_range(0..n));
        }
        p = &p + &m;
    }
    p
}

pub fn positive_even(gens: GeneratorSet) -> Vec<MultiIndex> {
    gens.class(ParityClass::EvenPositive)
}

/// A polynomial in the `s^I`, `I` even and nonempty, with a constant term.
pub fn random_spoly(rng: &mut impl Rng, gens: GeneratorSet, max_deg: u32, max_terms: usize) -> SPolynomial {
    let vars = positive_even(gens);
    let mut p = SPolynomial::constant(small_rational(rng));
    if vars.is_empty() {
        return p;
    }
    for _ in 0..rng.gen_range(1..=max_terms) {
        let mut m = SPolynomial::constant(small_rational(rng));
        for _ in 0..rng.gen_range(1..=max_deg) {
            m = &m * &SPolynomial::var(*vars.choose(rng).unwrap());
        }
        p = &p + &m;
    }
    p
}

/// Numeric values for every symbol: floats for even symbols, odd elements
/// built from the auxiliary generators for odd symbols.
pub fn random_bindings(rng: &mut impl Rng, gens: GeneratorSet) -> HashMap<String, NumericGrassmann> {
    let mut out = HashMap::new();
    for name in EVEN_SYMBOLS {
        out.insert(name.to_string(), NumericGrassmann::scalar(rng.gen_range(-1.5..1.5)));
    }
    let odd_aux: Vec<MultiIndex> =
        gens.class(ParityClass::Odd).into_iter().filter(|i| i.indices().all(|k| k > gens.q())).collect();
    for name in ODD_SYMBOLS {
        let mut v = NumericGrassmann::zero();
        for &m in &odd_aux {
            if m.len() == 1 || rng.gen_bool(0.3) {
                v.add_term(m, rng.gen_range(-2.0..2.0));
            }
        }
        out.insert(name.to_string(), v);
    }
    out
}

/// Brute-force sign of the permutation sorting `seq` (bubble sort), or
/// `None` on a repeated entry.
pub fn bubble_sign(seq: &[usize]) -> Option<i32> {
    let mut v = seq.to_vec();
    let mut sign = 1;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] == v[j + 1] {
                return None;
            }
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some(sign)
}
