mod common;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use superpull::djops::{DOperatorContext, SMap};
use superpull::expr::{parse_superscalar, SymbolTable};
use superpull::grassmann::{concat_sign, epsilon, GeneratorSet, MultiIndex, ParityClass};
use superpull::oracle::{agrees, eval_taylor, NumericGrassmann, SmoothFn};
use superpull::scalar::{substitute_numeric, Function, FunctionTable, SuperScalar};
use superpull::supercalc::{
    exp_xi_apply, pullback_polynomial, pullback_taylor, pullback_to_order, pullback_with, reconstruct_xi, ProductForm,
};

use common::*;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn index(max: usize) -> impl Strategy<Value = MultiIndex> {
    (0u32..(1 << max)).prop_map(MultiIndex::from_bits)
}

/// Homogeneous element of the requested parity.
fn homogeneous(rng: &mut ChaCha8Rng, gens: GeneratorSet, odd: bool) -> SuperScalar {
    let mut out = SuperScalar::zero();
    let all = gens.class(ParityClass::All);
    for _ in 0..rng.gen_range(1..=4) {
        let i = *all.choose(rng).unwrap();
        let want_odd_coeff = i.is_even() == odd;
        let c = SuperScalar::constant(small_rational(rng));
        let coeff = if want_odd_coeff {
            &c * &SuperScalar::odd_symbol(ODD_SYMBOLS.choose(rng).unwrap())
        } else if rng.gen_bool(0.5) {
            &c * &SuperScalar::even_symbol(EVEN_SYMBOLS.choose(rng).unwrap())
        } else {
            c
        };
        out += &SuperScalar::generators(i) * &coeff;
    }
    out
}

fn all_symbols(gens: GeneratorSet) -> SymbolTable {
    SymbolTable::new(gens).with_even(&EVEN_SYMBOLS).unwrap().with_odd(&ODD_SYMBOLS).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn concat_sign_is_associative(owner in proptest::collection::vec(0u8..4, 6)) {
        let part = |p: u8| MultiIndex::new(&(1..=6).filter(|&g| owner[g - 1] == p).collect::<Vec<_>>()).unwrap();
        let (i, j, k) = (part(0), part(1), part(2));
        let left = concat_sign(i, j).sign() * concat_sign(i.union(j), k).sign();
        let right = concat_sign(j, k).sign() * concat_sign(i, j.union(k)).sign();
        prop_assert_eq!(left, right);
        prop_assert!(left != 0);
    }

    #[test]
    fn singletons_anticommute(i in 1usize..=6, j in 1usize..=6) {
        prop_assume!(i != j);
        let (a, b) = (MultiIndex::single(i), MultiIndex::single(j));
        prop_assert_eq!(concat_sign(a, b).sign(), -concat_sign(b, a).sign());
    }

    #[test]
    fn even_blocks_commute_in_epsilon(i1 in index(6), i2 in index(6)) {
        prop_assume!(i1.is_even() && i2.is_even());
        let target = i1.union(i2);
        prop_assert_eq!(epsilon(&[i1, i2], target), epsilon(&[i2, i1], target));
    }

    #[test]
    fn supercommutativity(seed in any::<u64>(), pa in any::<bool>(), pb in any::<bool>()) {
        let mut r = rng(seed);
        let gens = random_generator_set(&mut r, 6);
        let a = homogeneous(&mut r, gens, pa);
        let b = homogeneous(&mut r, gens, pb);
        let ab = &a * &b;
        let ba = &b * &a;
        prop_assert_eq!(ab, if pa && pb { -ba } else { ba });
    }

    #[test]
    fn ring_axioms(seed in any::<u64>()) {
        let mut r = rng(seed);
        let gens = random_generator_set(&mut r, 6);
        let x: Vec<SuperScalar> = (0..3).map(|_| {
            let odd = r.gen_bool(0.5);
            homogeneous(&mut r, gens, odd) + random_even_element(&mut r, gens, 3)
        }).collect();
        let (a, b, c) = (&x[0], &x[1], &x[2]);
        prop_assert_eq!(&(a * b) * c, a * &(b * c));
        prop_assert_eq!(a * &(b + c), &(a * b) + &(a * c));
        prop_assert_eq!(&(a + b) * c, &(a * c) + &(b * c));
    }

    #[test]
    fn normalization_is_idempotent(seed in any::<u64>()) {
        let mut r = rng(seed);
        let gens = random_generator_set(&mut r, 6);
        let a = random_even_element(&mut r, gens, 5) + homogeneous(&mut r, gens, true);
        let again = SuperScalar::from_terms(a.terms().map(|(m, c)| (m.clone(), c.clone())));
        prop_assert_eq!(&again, &a);
        let reparsed = parse_superscalar(&a.render(gens), &all_symbols(gens)).unwrap();
        prop_assert_eq!(reparsed, a);
    }

    #[test]
    fn souls_are_nilpotent(seed in any::<u64>()) {
        let mut r = rng(seed);
        let gens = random_generator_set(&mut r, 6);
        let soul = random_even_element(&mut r, gens, 6).soul();
        prop_assert!(soul.pow(gens.total() as u32 + 1).is_zero());
    }

    #[test]
    fn morphism_law(seed in any::<u64>()) {
        let mut r = rng(seed);
        let gens = random_generator_set(&mut r, 6);
        let dim = r.gen_range(1..=3);
        let sf = random_superfield(&mut r, gens, dim, 4);
        let f = random_target_poly(&mut r, dim, 3, 4);
        let g = random_target_poly(&mut r, dim, 3, 4);
        let lhs = pullback_polynomial(&(&f * &g), &sf).unwrap();
        let rhs = &pullback_polynomial(&f, &sf).unwrap() * &pullback_polynomial(&g, &sf).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn taylor_and_exponential_routes_agree(seed in any::<u64>()) {
        let mut r = rng(seed);
        let gens = random_generator_set(&mut r, 6);
        let dim = r.gen_range(1..=3);
        let sf = random_superfield(&mut r, gens, dim, 5);
        let f = Function::new("f", dim);
        let xi = reconstruct_xi(&sf).unwrap();
        prop_assert_eq!(exp_xi_apply(&xi, &f).unwrap(), pullback_taylor(&f, &sf).unwrap());
    }

    #[test]
    fn product_form_matches_taylor(seed in any::<u64>()) {
        let mut r = rng(seed);
        let gens = random_generator_set(&mut r, 6);
        let dim = r.gen_range(1..=2);
        let mut keys: Vec<MultiIndex> = gens.class(ParityClass::All).into_iter().filter(|i| !i.is_empty()).collect();
        keys.shuffle(&mut r);
        keys.truncate(r.gen_range(0..=4));
        keys.sort();
        let mut pf = ProductForm::new(dim);
        for k in keys {
            let coeffs = (0..dim).map(|_| {
                let h = homogeneous(&mut r, GeneratorSet::coordinates(0), k.len() % 2 == 1);
                h.generator_coefficient(MultiIndex::EMPTY)
            }).collect();
            pf.push(k, coeffs).unwrap();
        }
        let bodies: Vec<SuperScalar> = (0..dim).map(|_| SuperScalar::even_symbol(EVEN_SYMBOLS.choose(&mut r).unwrap())).collect();
        let f = Function::new("f", dim);
        let sf = pf.superfield(&bodies).unwrap();
        prop_assert_eq!(pf.apply(&f).unwrap(), pullback_taylor(&f, &sf).unwrap());
    }

    #[test]
    fn body_parity_and_truncation(seed in any::<u64>()) {
        let mut r = rng(seed);
        let gens = random_generator_set(&mut r, 6);
        let dim = r.gen_range(1..=3);
        let sf = random_superfield(&mut r, gens, dim, 5);
        let f = Function::new("f", dim);
        let result = pullback_taylor(&f, &sf).unwrap();
        prop_assert_eq!(result.body(), SuperScalar::func(f.value()));
        prop_assert!(result.is_zero() || result.is_even());
        let atoms = |deg: &[u32]| SuperScalar::func(f.deriv(deg));
        let exact = pullback_with(&sf, atoms);
        prop_assert_eq!(&exact, &result);
        let order = gens.total() as u32;
        prop_assert_eq!(pullback_to_order(&sf, order, atoms), exact.clone());
        prop_assert_eq!(pullback_to_order(&sf, order + 3, atoms), exact);
    }

    #[test]
    fn leibniz_and_chain_rule(seed in any::<u64>()) {
        let mut r = rng(seed);
        let ctx = DOperatorContext::coordinates(r.gen_range(1..=6));
        let i = *ctx.even().choose(&mut r).unwrap();
        let a = random_spoly(&mut r, ctx.generators(), 3, 3);
        let b = random_spoly(&mut r, ctx.generators(), 3, 3);
        let (l, rr) = ctx.leibniz_check(&a, &b, i);
        prop_assert_eq!(l, rr);
        let m = r.gen_range(1..=2);
        let y: Vec<_> = (0..m).map(|_| random_spoly(&mut r, ctx.generators(), 2, 3)).collect();
        let f = random_target_poly(&mut r, m, 2, 3);
        let (l, rr) = ctx.chain_rule_check(&f, &y, i).unwrap();
        prop_assert_eq!(l, rr);
    }

    #[test]
    fn ideal_absorbs_products(seed in any::<u64>()) {
        let mut r = rng(seed);
        let ctx = DOperatorContext::coordinates(r.gen_range(2..=6));
        let pos = ctx.positive().to_vec();
        let g = ctx.ideal_generator(&[*pos.choose(&mut r).unwrap(), *pos.choose(&mut r).unwrap()]);
        let h = random_spoly(&mut r, ctx.generators(), 2, 3);
        prop_assert!(ctx.ideal_member(&(&g * &h)));
        let a = random_spoly(&mut r, ctx.generators(), 2, 3);
        prop_assert_eq!(ctx.iso_to_grassmann(&(&a * &h)), &ctx.iso_to_grassmann(&a) * &ctx.iso_to_grassmann(&h));
        prop_assert_eq!(ctx.iso_to_grassmann(&(&a + &(&g * &h))), ctx.iso_to_grassmann(&a));
    }

    #[test]
    fn phi_route_matches_taylor_and_is_reparametrization_invariant(seed in any::<u64>()) {
        let mut r = rng(seed);
        let ctx = DOperatorContext::coordinates(r.gen_range(2..=4));
        let pos = ctx.positive().to_vec();
        let dim = r.gen_range(1..=2);
        let y: Vec<_> = (0..dim).map(|_| random_spoly(&mut r, ctx.generators(), 2, 3)).collect();
        let f = Function::new("f", dim);
        let phi = ctx.phi_route_pullback(&y, &f).unwrap();
        prop_assert_eq!(&phi, &pullback_taylor(&f, &ctx.superfield_of(&y)).unwrap());

        let make = |r: &mut ChaCha8Rng| {
            SMap::new(pos.iter().map(|&i| {
                let blocks = [*pos.choose(r).unwrap(), *pos.choose(r).unwrap()];
                &superpull::SPolynomial::var(i) + &(&random_spoly(r, ctx.generators(), 1, 2) * &ctx.ideal_generator(&blocks))
            }).collect())
        };
        let s1 = make(&mut r);
        let s2 = make(&mut r);
        prop_assert!(ctx.tq_member(&s1) && ctx.tq_member(&s2));
        prop_assert!(ctx.tq_member(&s1.compose(&ctx, &s2)));
        let moved = SMap::new(y).compose(&ctx, &s1);
        prop_assert_eq!(ctx.phi_route_pullback(&moved.components, &f).unwrap(), phi);
    }

    #[test]
    fn oracle_agrees_with_symbolic(seed in any::<u64>(), which in 0usize..4) {
        let mut r = rng(seed);
        let gens = random_oracle_generator_set(&mut r, 6);
        let sf = random_superfield(&mut r, gens, 1, 6);
        let src = ["1 - 2*u + u^3 - 0.5*u^4", "exp(u)", "sin(u)", "3*u - 1"][which];
        let f = SmoothFn::parse(src, 1).unwrap();
        let bindings = random_bindings(&mut r, gens);
        let (symbolic, numeric) = superpull::oracle::cross_check(&sf, "f", &f, &bindings).unwrap();
        prop_assert!(agrees(&symbolic, &numeric), "{:?} vs {:?}", symbolic, numeric);
    }

    #[test]
    fn numeric_morphism_law(seed in any::<u64>()) {
        let mut r = rng(seed);
        let gens = random_oracle_generator_set(&mut r, 6);
        let sf = random_superfield(&mut r, gens, 2, 4);
        let bindings = random_bindings(&mut r, gens);
        let args: Vec<NumericGrassmann> = sf
            .components()
            .iter()
            .map(|c| substitute_numeric(c, &bindings, &FunctionTable::new()).unwrap())
            .collect();
        let f = SmoothFn::parse("sin(u1) + u2^2", 2).unwrap();
        let g = SmoothFn::parse("exp(u1 - u2)", 2).unwrap();
        let lhs = eval_taylor(&f.product(&g), &args).unwrap();
        let rhs = &eval_taylor(&f, &args).unwrap() * &eval_taylor(&g, &args).unwrap();
        prop_assert!(agrees(&lhs, &rhs), "{:?} vs {:?}", lhs, rhs);
    }
}

#[test]
fn epsilon_of_single_block_is_one() {
    for q in 0..=6 {
        for i in GeneratorSet::coordinates(q).class(ParityClass::All).into_iter().filter(|i| !i.is_empty()) {
            assert_eq!(epsilon(&[i], i), 1, "{i}");
        }
    }
}

#[test]
fn even_index_counts() {
    for q in 1..=6 {
        assert_eq!(GeneratorSet::coordinates(q).class(ParityClass::Even).len(), 1 << (q - 1));
    }
}
