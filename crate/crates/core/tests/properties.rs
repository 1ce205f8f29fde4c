use std::sync::Arc;

use proptest::prelude::*;

use spinorsel::corpus::{format_entry, parse_line};
use spinorsel::definite::{class_set, unit_group, DEFAULT_PRIMES_CAP};
use spinorsel::localorder::{local_embed_count, normalizer_norms};
use spinorsel::numthy::{factor, gcd, hilbert_symbol_int, quad_class_number, rat, squarefree_part, Place, QuadOrder};
use spinorsel::quat::{eichler_order, generate_order, QuatOrder, RatQuatAlgebra};

fn hurwitz_plus(n: i128) -> Arc<QuatOrder> {
    let h = eichler_order(Arc::new(RatQuatAlgebra::new(-1, -1)), 1, 2).unwrap();
    let mut gens: Vec<_> = h.basis().iter().map(|x| x.map(|c| c * rat(n))).collect();
    gens.push([rat(1), rat(0), rat(0), rat(0)]);
    Arc::new(generate_order(h.alg.clone(), &gens).unwrap())
}

fn nonzero() -> impl Strategy<Value = i128> {
    (-50_000i128..50_000).prop_filter("nonzero", |x| *x != 0)
}

fn places(n: i128) -> Vec<Place> {
    let mut v = vec![Place::Inf, Place::Prime(2)];
    v.extend(factor(n).into_iter().filter(|&(p, _)| p != 2).map(|(p, _)| Place::Prime(p)));
    v
}

fn conjugator() -> impl Strategy<Value = [i128; 4]> {
    prop::array::uniform4(-3i128..=3).prop_filter("invertible", |x| x.iter().any(|&c| c != 0))
}

fn forms(disc: i128) -> u64 {
    let mut h = 0;
    let mut a = 1i128;
    while 3 * a * a <= -disc {
        for b in -a + 1..=a {
            if (b * b - disc) % (4 * a) == 0 {
                let c = (b * b - disc) / (4 * a);
                if c >= a && !(c == a && b < 0) && gcd(gcd(a, b), c) == 1 {
                    h += 1;
                }
            }
        }
        a += 1;
    }
    h
}

proptest! {
    #[test]
    fn hilbert_product_formula(a in nonzero(), b in nonzero()) {
        let product: i32 = places(a * b).into_iter().map(|v| hilbert_symbol_int(a, b, v) as i32).product();
        prop_assert_eq!(product, 1);
    }

    #[test]
    fn hilbert_bimultiplicative(a in nonzero(), b in -300i128..300, c in -300i128..300) {
        prop_assume!(b != 0 && c != 0);
        for v in places(a * b * c) {
            prop_assert_eq!(
                hilbert_symbol_int(a, b * c, v),
                hilbert_symbol_int(a, b, v) * hilbert_symbol_int(a, c, v)
            );
            prop_assert_eq!(hilbert_symbol_int(a, b, v), hilbert_symbol_int(b, a, v));
        }
    }

    #[test]
    fn class_number_counts_forms(m in -400i64..-1, f in 1u64..8) {
        prop_assume!(squarefree_part(m as i128) == m as i128);
        let b = QuadOrder::new(m, f).unwrap();
        prop_assert_eq!(quad_class_number(&b).unwrap(), forms(b.disc()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn conjugation_preserves_invariants(x in conjugator()) {
        let o = hurwitz_plus(3);
        let c = Arc::new(o.conjugate_by(&x.map(rat)).unwrap());
        prop_assert_eq!(c.disc, o.disc);
        prop_assert_eq!(unit_group(&c).unwrap().order(), unit_group(&o).unwrap().order());
        prop_assert_eq!(normalizer_norms(&c, 3).group, normalizer_norms(&o, 3).group);
        let b = QuadOrder::new(-2, 1).unwrap();
        prop_assert_eq!(local_embed_count(&b, &c, 3).unwrap(), local_embed_count(&b, &o, 3).unwrap());
        let (s, t) = (class_set(&o, DEFAULT_PRIMES_CAP, 1).unwrap(), class_set(&c, DEFAULT_PRIMES_CAP, 2).unwrap());
        let (mut us, mut ut) = (s.unit_sizes(), t.unit_sizes());
        us.sort();
        ut.sort();
        prop_assert_eq!(us, ut);
    }

    #[test]
    fn corpus_lines_round_trip(x in conjugator(), n in 1i128..4) {
        let o = hurwitz_plus(n).conjugate_by(&x.map(rat)).unwrap();
        let line = format_entry(&o, "conjugate");
        let parsed = parse_line(&line).unwrap().unwrap();
        prop_assert_eq!(&parsed.order.lat, &o.lat);
        prop_assert_eq!(parsed.label, "conjugate");
    }
}
