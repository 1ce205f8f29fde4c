use std::collections::BTreeSet;

use super::enumerate::{short_vectors, unit_group, UnitGroup};
use crate::numthy::{factor, rat, QuadOrder, Rat};
use crate::quat::QuatOrder;
use crate::{Error, Result};

/// The images `x = phi(omega)` of optimal embeddings `B -> O`.
///
/// `Z[x]` fails to be optimal iff `(x - a) / p` lies in `O` for a prime `p | f(B)`
/// and some integer `a`, since every strictly larger order of `Q(x)` contains the
/// order of conductor `f(B) / p`.
pub fn optimal_images(b: &QuadOrder, order: &QuatOrder) -> Result<Vec<[Rat; 4]>> {
    if !order.alg.is_definite() {
        return Err(Error::IndefiniteAlgebra);
    }
    if !b.is_imaginary() {
        return Err(Error::InvalidInput("the quadratic order must be imaginary".into()));
    }
    let alg = &order.alg;
    let (t, n) = (rat(b.t), rat(b.n));
    let primes: Vec<u64> = factor(b.f as i128).into_iter().map(|(p, _)| p).collect();
    let optimal = |x: &[Rat; 4]| {
        primes.iter().all(|&p| {
            (0..p as i128).all(|a| {
                let mut y = *x;
                y[0] -= rat(a);
                !order.contains(&y.map(|c| c / rat(p as i128)))
            })
        })
    };
    Ok(short_vectors(alg, &order.lat, n)?
        .into_iter()
        .filter(|v| v.nrd == n && alg.trd(&v.elem) == t && optimal(&v.elem))
        .map(|v| v.elem)
        .collect())
}

/// Orbits of `images` under conjugation by the units.
pub fn conjugation_orbits(order: &QuatOrder, units: &UnitGroup, images: &[[Rat; 4]]) -> usize {
    let mut seen: BTreeSet<[Rat; 4]> = BTreeSet::new();
    let mut orbits = 0;
    for x in images {
        if seen.contains(x) {
            continue;
        }
        orbits += 1;
        seen.extend(units.conjugates(&order.alg, x));
    }
    orbits
}

/// `m(B, O, O^x)`: optimal embeddings up to conjugation by `O^x`.
pub fn global_embed_count(b: &QuadOrder, order: &QuatOrder) -> Result<u64> {
    let images = optimal_images(b, order)?;
    if images.is_empty() {
        return Ok(0);
    }
    Ok(conjugation_orbits(order, &unit_group(order)?, &images) as u64)
}
