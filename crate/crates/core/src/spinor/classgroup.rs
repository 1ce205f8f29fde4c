//! The spinor class group and the spinor class of an ideal.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::Serialize;

use crate::localorder::{certify_locally_principal, unit_norms};
use crate::numthy::{hilbert_symbol_int, Place, Rat, SquareClass, SquareClassSubgroup};
use crate::quat::{lattice_nrd, lattice_product, left_order_of, right_order_of, QuatLattice, QuatOrder, RightIdeal};
use crate::{Error, Result};

use super::field::{bad_primes, SpinorGenusField};

/// An element of `SCl(O)`: one canonical unit square-class representative per bad
/// prime, in the order of [`SpinorClassGroup::primes`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SpinorClass(pub Vec<i64>);

/// `SCl(O) = prod_p Z_p^x / Nr(O_p^x)` over the bad primes, further divided by the
/// diagonal `-1` when `D` is indefinite.
///
/// Over `Q` the ideles are `Q_{>0} x Zhat^x` and `Q_{>0} ∩ Zhat^x = {1}`, so after
/// removing the positive rationals (or all of `Q^x` when `D` is indefinite) only the
/// unit parts remain, and `Nr(O_p^x)` is all of `Z_p^x` at good primes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpinorClassGroup {
    pub primes: Vec<u64>,
    pub unit_norms: Vec<SquareClassSubgroup>,
    pub indefinite: bool,
}

impl SpinorClassGroup {
    fn coset_rep(&self, i: usize, c: &SquareClass) -> i64 {
        self.unit_norms[i].members.iter().map(|h| c.mul(h).rep).min().expect("nonempty")
    }

    /// The canonical representative of the class of the idele with unit parts `w`.
    pub fn class_of(&self, w: &[SquareClass]) -> SpinorClass {
        let direct = SpinorClass(w.iter().enumerate().map(|(i, c)| self.coset_rep(i, c)).collect());
        if !self.indefinite {
            return direct;
        }
        let flipped = SpinorClass(
            w.iter()
                .enumerate()
                .map(|(i, c)| self.coset_rep(i, &c.mul(&SquareClass::of_int(-1, c.place))))
                .collect(),
        );
        direct.min(flipped)
    }

    fn classes(&self, s: &SpinorClass) -> Vec<SquareClass> {
        self.primes.iter().zip(&s.0).map(|(&p, &r)| SquareClass::of_int(r as i128, Place::Prime(p))).collect()
    }

    pub fn identity(&self) -> SpinorClass {
        self.class_of(&self.primes.iter().map(|&p| SquareClass::one(Place::Prime(p))).collect::<Vec<_>>())
    }

    pub fn mul(&self, a: &SpinorClass, b: &SpinorClass) -> SpinorClass {
        let w: Vec<SquareClass> = self.classes(a).iter().zip(self.classes(b)).map(|(x, y)| x.mul(&y)).collect();
        self.class_of(&w)
    }

    pub fn elements(&self) -> Vec<SpinorClass> {
        let mut out = BTreeSet::new();
        let mut stack: Vec<Vec<SquareClass>> = vec![vec![]];
        while let Some(w) = stack.pop() {
            if w.len() == self.primes.len() {
                out.insert(self.class_of(&w));
                continue;
            }
            for c in SquareClass::units(Place::Prime(self.primes[w.len()])) {
                let mut next = w.clone();
                next.push(c);
                stack.push(next);
            }
        }
        out.into_iter().collect()
    }

    pub fn order(&self) -> usize {
        self.elements().len()
    }

    /// `chi_m` of the class, for `m` in the spinor genus field (where it is well defined).
    pub fn character(&self, m: i64, s: &SpinorClass) -> i8 {
        self.primes
            .iter()
            .zip(&s.0)
            .map(|(&p, &r)| hilbert_symbol_int(m as i128, r as i128, Place::Prime(p)))
            .product()
    }

    /// The image in `Gal(Sigma_G / Q)`, as the members whose character is nontrivial.
    pub fn artin(&self, field: &SpinorGenusField, s: &SpinorClass) -> BTreeMap<i64, u8> {
        field.members.iter().map(|&m| (m, u8::from(self.character(m, s) == -1))).collect()
    }
}

pub fn spinor_class_group(order: &Arc<QuatOrder>) -> SpinorClassGroup {
    let primes = bad_primes(order);
    let unit_norms = primes.iter().map(|&p| unit_norms(order, p)).collect();
    SpinorClassGroup { primes, unit_norms, indefinite: !order.alg.is_definite() }
}

/// The class of `I`: at each bad prime, `nrd(u_p) / Nr(I)` for a local generator
/// `u_p`. Dividing by the global `Nr(I)` (not just its `p`-part) is what makes this
/// the unit part of the idele `(nrd u_p)_p`.
pub fn spinor_class_of_ideal(ideal: &RightIdeal, group: &SpinorClassGroup) -> Result<SpinorClass> {
    let alg = &ideal.order.alg;
    let w = group
        .primes
        .iter()
        .map(|&p| {
            let u = certify_locally_principal(ideal, p)?;
            let c = SquareClass::of_rat(&(alg.nrd(&u) / ideal.nrd), Place::Prime(p));
            debug_assert!(c.is_unit());
            Ok(c)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(group.class_of(&w))
}

/// A right `O`-ideal with left order `O'`, certified locally principal at every bad
/// prime; its existence proves `O` and `O'` lie in one genus.
///
/// Tries `O'O` first. In a definite algebra it then tries `O' x O` for short `x` in
/// `O'O`: a linking ideal is `O' u O` for any `x` close enough to the local
/// conjugators `u_p`, and short vectors find one quickly in practice.
pub fn linking_ideal(order: &Arc<QuatOrder>, other: &QuatOrder) -> Result<RightIdeal> {
    if order.disc != other.disc || order.alg != other.alg {
        return Err(Error::NotSameGenus("different algebras or discriminants".into()));
    }
    let alg = &order.alg;
    let product = lattice_product(alg, &other.lat, &order.lat);
    if let Some(ideal) = try_link(order, other, product.clone())? {
        return Ok(ideal);
    }
    if alg.is_definite() {
        let mut bound = lattice_nrd(alg, &product);
        let mut tried = 0;
        while tried < LINK_CANDIDATES {
            let mut xs = crate::definite::short_vectors(alg, &product, bound)?;
            xs.sort_by(|a, b| a.nrd.cmp(&b.nrd).then(a.coords.cmp(&b.coords)));
            for x in xs.iter().skip(tried) {
                let gens: Vec<[Rat; 4]> = other.basis().iter().map(|a| alg.mul(a, &x.elem)).collect();
                let left = QuatLattice::from_generators(&gens).expect("x is invertible");
                if let Some(ideal) = try_link(order, other, lattice_product(alg, &left, &order.lat))? {
                    return Ok(ideal);
                }
            }
            tried = xs.len();
            bound = bound * Rat::from_integer(2);
        }
    }
    Err(Error::NotSameGenus("no linking ideal among O'O and O' x O".into()))
}

const LINK_CANDIDATES: usize = 400;

fn try_link(order: &Arc<QuatOrder>, other: &QuatOrder, lat: QuatLattice) -> Result<Option<RightIdeal>> {
    let ideal = RightIdeal::stable(lat, order.clone())?;
    let left = left_order_of(&order.alg, &ideal.lat)?;
    let right = right_order_of(&order.alg, &ideal.lat)?;
    if left.lat != other.lat || right.lat != order.lat {
        return Ok(None);
    }
    for p in bad_primes(order) {
        if certify_locally_principal(&ideal, p).is_err() {
            return Ok(None);
        }
    }
    Ok(Some(ideal))
}

/// `rho(O, O')` as `m -> {0, 1}` on the quadratic subfields of `Sigma_G`.
pub fn rho(order: &Arc<QuatOrder>, other: &QuatOrder, field: &SpinorGenusField) -> Result<BTreeMap<i64, u8>> {
    let group = spinor_class_group(order);
    let ideal = linking_ideal(order, other)?;
    Ok(group.artin(field, &spinor_class_of_ideal(&ideal, &group)?))
}
