//! Spinor genus field, spinor class group and selectivity over `Q`.

mod classgroup;
mod field;
mod select;

pub use classgroup::{linking_ideal, rho, spinor_class_group, spinor_class_of_ideal, SpinorClass, SpinorClassGroup};
pub use field::{bad_primes, embeds, k_in_sigma, spinor_genus_field, SpinorGenusField};
pub use select::{
    check_local_embeddings, conductor_symbol, delta, delta_from_rho, maclachlan_delta, maclachlan_formula,
    selectivity, PrimeVerdict, SelectivityReport,
};

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::localorder::normalizer_norms;
    use crate::numthy::{is_squarefree, local_norm_group, primes_up_to, rat, QuadOrder, Rat};
    use crate::quat::{eichler_order, generate_order, QuatLattice, QuatOrder, RatQuatAlgebra, RightIdeal};

    fn scaled(o: &QuatOrder, f: i128) -> Arc<QuatOrder> {
        let gens: Vec<_> = o.basis().iter().map(|x| x.map(|c| c * rat(f))).collect();
        Arc::new(generate_order(o.alg.clone(), &gens).unwrap())
    }

    fn hurwitz() -> QuatOrder {
        eichler_order(Arc::new(RatQuatAlgebra::new(-1, -1)), 1, 2).unwrap()
    }

    /// `q O + alpha O` for some `alpha` in `O` with `q | nrd(alpha)`, `alpha` not in `q O`.
    fn prime_ideal(o: &Arc<QuatOrder>, q: i128) -> RightIdeal {
        let alpha = crate::quat::residue_vectors(q as u64)
            .find(|c| c.iter().any(|&x| x != 0) && o.nrd_int(c) % q == 0)
            .unwrap();
        let a = o.elem(&alpha);
        let mut gens: Vec<[Rat; 4]> = o.basis().iter().map(|b| b.map(|c| c * rat(q))).collect();
        gens.extend(o.basis().iter().map(|b| o.alg.mul(&a, b)));
        RightIdeal::new(QuatLattice::from_generators(&gens).unwrap(), o.clone()).unwrap()
    }

    #[test]
    fn eichler_orders_have_trivial_data() {
        let a11 = Arc::new(RatQuatAlgebra::new(-1, -1));
        let a13 = Arc::new(RatQuatAlgebra::new(-1, -3));
        let orders = [
            Arc::new(hurwitz()),
            Arc::new(eichler_order(a11.clone(), 3, 2).unwrap()),
            Arc::new(eichler_order(a11, 9, 2).unwrap()),
            Arc::new(eichler_order(a13.clone(), 2, 3).unwrap()),
            Arc::new(eichler_order(a13, 4, 3).unwrap()),
            Arc::new(eichler_order(Arc::new(RatQuatAlgebra::new(1, 1)), 5, 1).unwrap()),
        ];
        for o in &orders {
            let field = spinor_genus_field(o);
            assert!(field.members.is_empty(), "d={}", o.disc);
            assert_eq!(spinor_class_group(o).order(), 1);
        }
        let b = QuadOrder::new(-1, 1).unwrap();
        let r = selectivity(&b, &orders[0]).unwrap();
        assert!(!r.k_in_sigma && !r.selective && r.s.is_empty());
    }

    #[test]
    fn genus_field_matches_local_conditions() {
        let h = hurwitz();
        let candidates: Vec<i64> = (-120..120).filter(|&m| m != 0 && m != 1 && is_squarefree(m as i128)).collect();
        for f in [2, 3, 4, 6] {
            let o = scaled(&h, f);
            let field = spinor_genus_field(&o);
            let nns: Vec<_> = primes_up_to(120)
                .into_iter()
                .map(|p| {
                    let nn = if o.disc % p as i128 == 0 || p == 2 {
                        normalizer_norms(&o, p).group
                    } else {
                        crate::numthy::SquareClassSubgroup::units(crate::numthy::Place::Prime(p))
                    };
                    (p, nn)
                })
                .collect();
            for &m in &candidates {
                let sign_ok = (m < 0) == o.alg.is_definite();
                let local_ok = nns.iter().all(|(p, nn)| nn.is_subgroup_of(&local_norm_group(m as i128, *p)));
                assert_eq!(field.contains(m), sign_ok && local_ok, "f={f} m={m}");
            }
        }
    }

    #[test]
    fn ideal_labels() {
        let o = scaled(&hurwitz(), 3);
        let group = spinor_class_group(&o);
        assert_eq!(group.order(), 2);
        let unit = RightIdeal::new(o.lat.clone(), o.clone()).unwrap();
        assert_eq!(spinor_class_of_ideal(&unit, &group).unwrap(), group.identity());
        for x in [[1, 1, 1, 0], [2, 1, 0, 1], [1, 3, 3, 3]] {
            let xo = RightIdeal::principal(&o, &x.map(|c| rat(c))).unwrap();
            assert_eq!(spinor_class_of_ideal(&xo, &group).unwrap(), group.identity());
        }
        // nrd(I) = q with I_3 = O_3: the label is the class of 1/q at 3
        let five = spinor_class_of_ideal(&prime_ideal(&o, 5), &group).unwrap();
        let seven = spinor_class_of_ideal(&prime_ideal(&o, 7), &group).unwrap();
        assert_ne!(five, group.identity());
        assert_eq!(seven, group.identity());
        assert_eq!(group.mul(&five, &five), group.identity());
    }

    #[test]
    fn linking_ideals() {
        let o = scaled(&hurwitz(), 3);
        let field = spinor_genus_field(&o);
        assert!(rho(&o, &o, &field).unwrap().values().all(|&v| v == 0));
        let i = prime_ideal(&o, 5);
        let left = i.left_order();
        let link = linking_ideal(&o, &left).unwrap();
        assert_eq!(link.left_order().lat, left.lat);
        assert!(linking_ideal(&o, &hurwitz()).is_err());
    }

    #[test]
    fn conductor_symbols() {
        // 3 and 7 are inert in Q(i), 5 splits
        assert_eq!(conductor_symbol(3, -1).unwrap(), 1);
        assert_eq!(conductor_symbol(9, -1).unwrap(), 0);
        assert_eq!(conductor_symbol(15, -1).unwrap(), 1);
        assert_eq!(conductor_symbol(21, -1).unwrap(), 0);
        assert!(conductor_symbol(2, -1).is_err());
        for (a, b) in [(3u64, 5u64), (7, 9), (3, 7), (5, 13)] {
            assert_eq!(conductor_symbol(a * b, -1).unwrap(), (conductor_symbol(a, -1).unwrap() + conductor_symbol(b, -1).unwrap()) % 2);
        }
    }
}
