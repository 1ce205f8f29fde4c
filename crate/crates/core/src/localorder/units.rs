//! Local generators of ideals and unit indices between nested orders.

use std::sync::Arc;

use crate::numthy::{pow, rat, val_rat, Rat};
use crate::quat::{residue_vectors, QuatOrder, RightIdeal};
use crate::{Error, Result};

use super::fp::Subspace;
use super::residue::{ResidueAlgebra, Vec4};

/// An element `u` of `I` with `I_p = u O_p`.
///
/// `u O_p` has index `p^{2 v_p(nrd u)}` in `O_p`, so it fills `I_p` exactly when that
/// matches `[O_p : I_p]`; such a `u` can be found modulo `p I`.
pub fn certify_locally_principal(ideal: &RightIdeal, p: u64) -> Result<[Rat; 4]> {
    let index = val_rat(&ideal.lat.index_in(&ideal.order.lat), p);
    if index % 2 != 0 || val_rat(&ideal.nrd, p) * 2 != index {
        return Err(Error::NotLocallyPrincipal(p));
    }
    let basis = ideal.lat.basis();
    residue_vectors(p)
        .map(|c| std::array::from_fn(|i| (0..4).map(|l| rat(c[l]) * basis[l][i]).sum()))
        .find(|u: &[Rat; 4]| {
            let n = ideal.order.alg.nrd(u);
            n != rat(0) && val_rat(&n, p) * 2 == index
        })
        .ok_or(Error::NotLocallyPrincipal(p))
}

/// `[O'_p^x : O_p^x]` for orders `O` inside `O'`.
///
/// With `W` the image of `O` in `O'/pO'` (dimension `r`), the index is
/// `[O' : O]_p |(O'/pO')^x| p^r / (p^4 |W^x|)`; units of `W` are the elements that
/// are units of `O'/pO'`.
pub fn unit_index(inner: &QuatOrder, outer: &Arc<QuatOrder>, p: u64) -> Result<u64> {
    let idx = val_rat(&inner.lat.index_in(&outer.lat), p);
    if idx < 0 || !outer.lat.contains_lattice(&inner.lat) {
        return Err(Error::InvalidInput("orders are not nested".into()));
    }
    let r = ResidueAlgebra::new(outer.clone(), p, 1);
    let pi = p as i128;
    let images: Vec<Vec4> = inner
        .basis()
        .iter()
        .map(|b| outer.coords(b).expect("nested").map(|c| c.rem_euclid(pi)))
        .collect();
    let w = Subspace::spanned_by(p, images);
    let wb = w.basis();
    let dim = wb.len() as u32;
    let mut w_units: i128 = 0;
    for c in residue_vectors(p).filter(|c| c[dim as usize..].iter().all(|&x| x == 0)) {
        let x: Vec4 = std::array::from_fn(|i| (0..dim as usize).map(|l| c[l] * wb[l][i]).sum::<i128>() % pi);
        if r.is_unit(&x) {
            w_units += 1;
        }
    }
    let num = pow(p, idx as u32) * r.units_mod_p() as i128 * pow(p, dim);
    let den = pow(p, 4) * w_units;
    if num % den != 0 {
        return Err(Error::Mismatch(format!("unit index {num}/{den} is not integral")));
    }
    Ok((num / den) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::{eichler_order, generate_order, RatQuatAlgebra};
    use std::collections::HashSet;

    fn scaled(o: &QuatOrder, f: i128) -> QuatOrder {
        let gens: Vec<_> = o.basis().iter().map(|x| x.map(|c| c * rat(f))).collect();
        generate_order(o.alg.clone(), &gens).unwrap()
    }

    /// Units of `O'/p^2 O'` against those in the image of `O`, by enumeration.
    fn brute_index(inner: &QuatOrder, outer: &Arc<QuatOrder>, p: u64) -> u64 {
        let r = ResidueAlgebra::new(outer.clone(), p, 2);
        let m = r.modulus;
        let coords: Vec<Vec4> = inner.basis().iter().map(|b| outer.coords(b).unwrap()).collect();
        let mut image = HashSet::new();
        for c in residue_vectors(p) {
            for d in residue_vectors(p) {
                let a: Vec4 = std::array::from_fn(|i| c[i] + p as i128 * d[i]);
                let x: Vec4 = std::array::from_fn(|i| (0..4).map(|l| a[l] * coords[l][i]).sum::<i128>().rem_euclid(m));
                image.insert(x);
            }
        }
        let all = r.unit_group_order() as u64;
        let sub = image.iter().filter(|x| r.is_unit(x)).count() as u64;
        all / sub
    }

    #[test]
    fn unit_indices() {
        let hurwitz = Arc::new(eichler_order(Arc::new(RatQuatAlgebra::new(-1, -1)), 1, 2).unwrap());
        let a13 = Arc::new(RatQuatAlgebra::new(-1, -3));
        let m3 = Arc::new(eichler_order(a13.clone(), 1, 3).unwrap());
        let e2 = eichler_order(a13.clone(), 2, 3).unwrap();
        let e5 = eichler_order(a13, 5, 3).unwrap();
        let outer_of = |o: &QuatOrder| Arc::new(o.maximal_overorder());
        // Eichler of prime level q inside a maximal order: q + 1
        assert_eq!(unit_index(&e2, &outer_of(&e2), 2).unwrap(), 3);
        assert_eq!(unit_index(&e5, &outer_of(&e5), 5).unwrap(), 6);
        assert_eq!(unit_index(&e5, &outer_of(&e5), 2).unwrap(), 1);
        let cases = [(scaled(&hurwitz, 2), hurwitz.clone(), 2), (scaled(&hurwitz, 3), hurwitz.clone(), 3), (scaled(&m3, 2), m3.clone(), 2), (scaled(&m3, 3), m3, 3)];
        for (o, big, p) in cases {
            assert_eq!(unit_index(&o, &big, p).unwrap(), brute_index(&o, &big, p), "p={p}");
        }
    }

    #[test]
    fn local_generators() {
        let alg = Arc::new(RatQuatAlgebra::new(-1, -1));
        let h = Arc::new(eichler_order(alg.clone(), 1, 2).unwrap());
        let o = Arc::new(scaled(&h, 2));
        let unit = RightIdeal::new(o.lat.clone(), o.clone()).unwrap();
        assert_eq!(certify_locally_principal(&unit, 2).unwrap(), [rat(1), rat(0), rat(0), rat(0)]);
        let x = [rat(1), rat(2), rat(0), rat(1)];
        let xo = RightIdeal::principal(&o, &x).unwrap();
        for p in [2, 3, 5, 7] {
            let u = certify_locally_principal(&xo, p).unwrap();
            assert_eq!(val_rat(&alg.nrd(&u), p), val_rat(&alg.nrd(&x), p));
        }
        // 2 * Hurwitz is a right ideal of Z + 2 Hurwitz whose right order is larger
        let trap = RightIdeal::stable(h.lat.scale(rat(2)), o.clone()).unwrap();
        assert_eq!(certify_locally_principal(&trap, 2), Err(Error::NotLocallyPrincipal(2)));
        assert!(certify_locally_principal(&trap, 3).is_ok());
    }
}
