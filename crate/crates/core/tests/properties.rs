use std::sync::Arc;

use num_rational::BigRational;
use proptest::prelude::*;
use smallvec::SmallVec;

use superkepler::dynsym::{Generator, GeneratorTable};
use superkepler::scalar::GaussianRational;
use superkepler::supercore::{bar_conjugate, build_q, GrassmannWord, Metric, SuperMonomial, SuperPolynomial};
use superkepler::superfunctions::{hamiltonian, RadialExpFunction};
use superkepler::superweyl::{OperatorElement, Superspace};

const D: usize = 4;
const N: usize = 1;

fn metric() -> Metric {
    Metric::new(D, N)
}

fn space() -> Arc<Superspace> {
    Superspace::new(metric())
}

fn sign(p: u8, q: u8) -> GaussianRational {
    GaussianRational::from_int(if p & q & 1 == 1 { -1 } else { 1 })
}

fn poly_strategy() -> impl Strategy<Value = SuperPolynomial> {
    let term = (prop::collection::vec(0u16..3, D), 0u32..(1 << (2 * N)), -3i64..4, -2i64..3);
    prop::collection::vec(term, 0..4).prop_map(|terms| {
        let shape = metric().shape();
        SuperPolynomial::from_terms(
            shape,
            terms.into_iter().map(|(even, odd, re, im)| {
                let m = SuperMonomial { even: SmallVec::from_vec(even), odd: GrassmannWord(odd) };
                (m, GaussianRational::new(BigRational::from_integer(re.into()), BigRational::from_integer(im.into())))
            }),
        )
    })
}

fn function_strategy() -> impl Strategy<Value = RadialExpFunction> {
    (poly_strategy(), poly_strategy(), 1i64..3, -1i32..2).prop_map(|(p, r, rate, k)| {
        let sp = space();
        let rate = BigRational::from_integer(rate.into());
        let a = RadialExpFunction::poly_exp(&sp, p, rate.clone());
        let b = RadialExpFunction::poly_exp(&sp, r, rate).mul(&RadialExpFunction::r_power(&sp, k));
        a.add(&b)
    })
}

fn operator_strategy() -> impl Strategy<Value = OperatorElement> {
    let atom = (0usize..4, 1usize..=D + 2 * N, -2i32..2);
    prop::collection::vec(atom, 1..3).prop_map(|atoms| {
        let sp = space();
        let mut out = OperatorElement::identity(&sp);
        for (kind, a, k) in atoms {
            let factor = match kind {
                0 => OperatorElement::coordinate(&sp, a),
                1 => OperatorElement::partial(&sp, a),
                2 => OperatorElement::r_power(&sp, k),
                _ => OperatorElement::partial(&sp, a).add(&OperatorElement::r_power(&sp, k)),
            };
            out = out.compose(&factor);
        }
        out
    })
}

fn homogeneous(f: &RadialExpFunction, pick: bool) -> (RadialExpFunction, u8) {
    let (even, odd) = f.split_parity();
    if pick {
        (odd, 1)
    } else {
        (even, 0)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn polynomial_product_is_associative(a in poly_strategy(), b in poly_strategy(), c in poly_strategy()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
    }

    #[test]
    fn polynomial_product_is_supercommutative(a in poly_strategy(), b in poly_strategy()) {
        let (ae, ao) = a.split_parity();
        let (be, bo) = b.split_parity();
        for (x, px) in [(&ae, 0u8), (&ao, 1)] {
            for (y, py) in [(&be, 0u8), (&bo, 1)] {
                prop_assert_eq!(x * y, (y * x).scale(&sign(px, py)));
            }
        }
    }

    #[test]
    fn q_is_not_a_zero_divisor(a in poly_strategy()) {
        let q = build_q(&metric());
        prop_assert_eq!((&q * &a).is_zero(), a.is_zero());
    }

    #[test]
    fn bar_is_multiplicative(a in poly_strategy(), b in poly_strategy()) {
        let m = metric();
        prop_assert_eq!(bar_conjugate(&(&a * &b), &m), &bar_conjugate(&a, &m) * &bar_conjugate(&b, &m));
    }

    #[test]
    fn bar_fixes_q(_x in 0..1) {
        let m = metric();
        let q = build_q(&m);
        prop_assert_eq!(bar_conjugate(&q, &m), q);
    }

    #[test]
    fn compose_is_associative(a in operator_strategy(), b in operator_strategy(), c in operator_strategy()) {
        prop_assert_eq!(a.compose(&b).compose(&c), a.compose(&b.compose(&c)));
    }

    #[test]
    fn dilation_conjugate_is_multiplicative(a in operator_strategy(), b in operator_strategy(), num in 1i64..5, den in 1i64..5) {
        let lam = BigRational::new(num.into(), den.into());
        let lhs = a.compose(&b).dilation_conjugate(&lam).unwrap();
        let rhs = a.dilation_conjugate(&lam).unwrap().compose(&b.dilation_conjugate(&lam).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn action_is_a_homomorphism(f in function_strategy(), a in operator_strategy(), b in operator_strategy()) {
        prop_assert_eq!(f.apply(&a.compose(&b)), f.apply(&b).apply(&a));
    }

    #[test]
    fn dilate_is_multiplicative(f in function_strategy(), g in function_strategy(), num in 1i64..5, den in 1i64..5) {
        let lam = BigRational::new(num.into(), den.into());
        prop_assert_eq!(f.mul(&g).dilate(&lam).unwrap(), f.dilate(&lam).unwrap().mul(&g.dilate(&lam).unwrap()));
    }

    #[test]
    fn derivative_obeys_super_leibniz(f in function_strategy(), g in function_strategy(), pick in any::<bool>(), a in 1usize..=D + 2 * N) {
        let (f, pf) = homogeneous(&f, pick);
        let pa = metric().parity(a);
        let lhs = f.mul(&g).derive(a);
        let rhs = f.derive(a).mul(&g).add(&f.mul(&g.derive(a)).scale(&sign(pa, pf)));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn bar_commutes_with_hamiltonian(f in function_strategy()) {
        let h = hamiltonian(&space()).unwrap();
        prop_assert_eq!(f.bar().apply(&h), f.apply(&h).bar());
    }
}

fn table() -> &'static GeneratorTable {
    static TABLE: std::sync::OnceLock<GeneratorTable> = std::sync::OnceLock::new();
    TABLE.get_or_init(|| GeneratorTable::build(D, N).unwrap())
}

fn label_strategy() -> impl Strategy<Value = (i32, i32)> {
    let labels = table().basis_labels();
    (0..labels.len()).prop_map(move |i| labels[i])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn bracket_is_super_antisymmetric(k in label_strategy(), l in label_strategy()) {
        let t = table();
        let (a, b) = (t.get(k.0, k.1).unwrap(), t.get(l.0, l.1).unwrap());
        let s = sign(t.label_parity(k), t.label_parity(l));
        prop_assert_eq!(a.bracket(&b), b.bracket(&a).neg().scale(&s));
    }

    #[test]
    fn super_jacobi_holds(k in label_strategy(), l in label_strategy(), m in label_strategy()) {
        let t = table();
        let (a, b, c) = (t.get(k.0, k.1).unwrap(), t.get(l.0, l.1).unwrap(), t.get(m.0, m.1).unwrap());
        let s = sign(t.label_parity(k), t.label_parity(l));
        let lhs = a.bracket(&b.bracket(&c));
        let rhs = a.bracket(&b).bracket(&c).add(&b.bracket(&a.bracket(&c)).scale(&s));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn rotations_commute_with_hamiltonian(a in 1usize..=D + 2 * N, b in 1usize..=D + 2 * N) {
        let h = hamiltonian(&space()).unwrap();
        let j = table().generator(Generator::J(a, b));
        prop_assert!(h.bracket(&j).is_zero());
    }
}
