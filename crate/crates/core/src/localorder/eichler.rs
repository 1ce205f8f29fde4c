use crate::numthy::{modp, val};
use crate::quat::{residue_vectors, QuatOrder};

use super::fp::{kernel, Subspace};
use super::residue::ResidueAlgebra;

/// Jacobson radical of `O / p O`.
///
/// The kernel `R` of the form `trd(xy)` mod p is a two-sided ideal, and an element of
/// `R` is nilpotent exactly when its reduced norm vanishes mod p. On `R` the norm is
/// additive (the cross term `trd(x conj y)` vanishes), so `J` is a subspace of `R`.
pub fn jacobson_radical(order: &QuatOrder, p: u64) -> Subspace {
    let pi = p as i128;
    let form: Vec<[i128; 4]> = (0..4)
        .map(|i| std::array::from_fn(|j| modp(order.trd_int(&order.mul_int(&unit(i), &unit(j))), pi)))
        .collect();
    let r = kernel(&form, p);
    let mut j = Subspace::zero(p);
    for x in residue_vectors(p) {
        if r.contains(&x) && order.nrd_int(&x) % pi == 0 {
            j.insert(x);
        }
    }
    j
}

fn unit(i: usize) -> [i128; 4] {
    let mut e = [0i128; 4];
    e[i] = 1;
    e
}

/// Eichler invariant: 2 when `O_p` is maximal split, otherwise 1, 0 or -1 according as
/// `(O / p O) / J` is `F_p x F_p`, `F_p` or `F_{p^2}`.
pub fn eichler_invariant(order: &QuatOrder, p: u64) -> i8 {
    if val(order.disc, p) == 0 {
        return 2;
    }
    let j = jacobson_radical(order, p);
    match 4 - j.dim() {
        1 => 0,
        2 => {
            let r = ResidueAlgebra::new(std::sync::Arc::new(order.clone()), p, 1);
            let one = r.one();
            let split = residue_vectors(p).any(|x| {
                !j.contains(&x)
                    && !j.contains(&r.sub(&one, &x))
                    && j.contains(&r.sub(&r.mul(&x, &x), &x))
            });
            if split {
                1
            } else {
                -1
            }
        }
        d => unreachable!("semisimple quotient of dimension {d} at a prime dividing the discriminant"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numthy::{rat, ratio};
    use crate::quat::{eichler_order, generate_order, RatQuatAlgebra};
    use std::sync::Arc;

    #[test]
    fn invariants_of_standard_orders() {
        let d11 = Arc::new(RatQuatAlgebra::new(-1, -11));
        let omax = eichler_order(d11.clone(), 1, 11).unwrap();
        assert_eq!(eichler_invariant(&omax, 11), -1);
        assert_eq!(eichler_invariant(&omax, 3), 2);
        let e3 = eichler_order(Arc::new(RatQuatAlgebra::new(1, 1)), 9, 1).unwrap();
        assert_eq!(eichler_invariant(&e3, 3), 1);
        let e2 = eichler_order(d11, 2, 11).unwrap();
        assert_eq!(eichler_invariant(&e2, 2), 1);
        let h = ratio(1, 2);
        let alg = Arc::new(RatQuatAlgebra::new(-1, -1));
        let hur = generate_order(alg.clone(), &[[h, h, h, h], [rat(0), rat(1), rat(0), rat(0)], [rat(0), rat(0), rat(1), rat(0)]]).unwrap();
        assert_eq!(eichler_invariant(&hur, 2), -1);
        // Z + 2 * Hurwitz: residue ring F_2 + radical
        let gens: Vec<_> = hur.basis().iter().map(|b| b.map(|c| c * rat(2))).collect();
        let sub = generate_order(alg, &gens).unwrap();
        assert_eq!(sub.disc, 16);
        assert_eq!(eichler_invariant(&sub, 2), 0);
    }
}
