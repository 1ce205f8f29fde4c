use std::collections::HashSet;
use std::sync::Arc;

use serde::Serialize;

use crate::numthy::{
    hilbert_symbol_int, kronecker_symbol, local_norm_group, pow, rat, val, Place, QuadOrder,
    SquareClass, SquareClassSubgroup,
};
use crate::quat::{residue_vectors, QuatOrder};
use crate::{Error, Result};

use super::eichler::eichler_invariant;
use super::embed::{embed_precision, RootSearch};
use super::residue::{snf_mod, ResidueAlgebra, Vec4};

/// Digits beyond the valuation needed to read off a unit square class.
fn class_digits(p: u64) -> u32 {
    if p == 2 {
        3
    } else {
        1
    }
}

/// `Nr(O_p^x)` modulo squares.
pub fn unit_norms(order: &QuatOrder, p: u64) -> SquareClassSubgroup {
    let place = Place::Prime(p);
    if val(order.disc, p) == 0 {
        return SquareClassSubgroup::units(place);
    }
    let m = pow(p, class_digits(p)) as u64;
    let pi = p as i128;
    let classes = residue_vectors(m)
        .map(|x| order.nrd_int(&x))
        .filter(|n| n % pi != 0)
        .map(|n| SquareClass::of_int(n, place));
    SquareClassSubgroup::generated_by(place, classes.collect::<HashSet<_>>())
}

/// `Nr(N(O_p))` modulo squares, with the largest normalizer valuation searched.
#[derive(Debug, Clone, Serialize)]
pub struct NormalizerNorms {
    pub group: SquareClassSubgroup,
    pub has_odd_valuation: bool,
    pub max_valuation: u32,
}

fn sandwich_vanishes(order: &QuatOrder, x: &Vec4, m: i128) -> bool {
    let xc = order.conj_int(x);
    (0..4).all(|i| {
        let mut e = [0i128; 4];
        e[i] = 1;
        let y = order.mul_int(&order.mul_int(x, &e), &xc);
        y.iter().all(|c| c % m == 0)
    })
}

/// Primitive `x` modulo `p^v` with `x O conj(x) ⊆ p^v O`, i.e. candidates for
/// normalizing elements of reduced norm valuation `v`.
fn normalizer_candidates(order: &QuatOrder, p: u64, v: u32) -> Vec<Vec4> {
    let mut level: Vec<Vec4> = residue_vectors(p)
        .filter(|x| x.iter().any(|&c| c != 0) && sandwich_vanishes(order, x, p as i128))
        .collect();
    for j in 1..v {
        let pj = pow(p, j);
        let m = pj * p as i128;
        level = level
            .iter()
            .flat_map(|x| residue_vectors(p).map(move |y| std::array::from_fn(|i| x[i] + pj * y[i])))
            .filter(|z: &Vec4| sandwich_vanishes(order, z, m))
            .collect();
    }
    level
}

/// `nrd(x + p^v z)` modulo `p^(v+e)` over all `z`. For `v >= e` the quadratic term
/// vanishes and the values form `nrd(x) + p^(v+s) Z`, `p^s` the content of `trd(x zbar)`.
fn lifted_norms(order: &QuatOrder, x: &Vec4, p: u64, v: u32, e: u32) -> Vec<i128> {
    let pv = pow(p, v);
    let modulus = pow(p, v + e);
    if v < e {
        return residue_vectors(pow(p, e) as u64)
            .map(|z| order.nrd_int(&std::array::from_fn(|i| x[i] + pv * z[i])))
            .collect();
    }
    let n0 = order.nrd_int(x);
    let content = (0..4)
        .map(|i| {
            let mut z = [0i128; 4];
            z[i] = 1;
            // trd(x zbar) = nrd(x + z) - nrd(x) - nrd(z)
            let xz: Vec4 = std::array::from_fn(|j| x[j] + z[j]);
            let t = order.nrd_int(&xz) - n0 - order.nrd_int(&z);
            if t == 0 { e } else { val(t, p).min(e) }
        })
        .min()
        .unwrap_or(e);
    let step = pow(p, v + content);
    (0..pow(p, e - content.min(e))).map(|t| (n0 + step * t).rem_euclid(modulus)).collect()
}

/// Normalizer norms by exhaustive search over primitive elements with reduced norm
/// valuation up to `max(1, v_p(d(O)))`.
pub fn normalizer_norms(order: &Arc<QuatOrder>, p: u64) -> NormalizerNorms {
    let place = Place::Prime(p);
    let units = unit_norms(order, p);
    let vd = val(order.disc, p);
    if vd == 0 {
        return NormalizerNorms { group: units, has_odd_valuation: false, max_valuation: 0 };
    }
    let vmax = vd.max(1);
    let e = class_digits(p);
    let all_units = SquareClassSubgroup::units(place);
    let mut group = units.clone();
    for v in 1..=vmax {
        if group.is_full() {
            break;
        }
        // over all unit classes an even valuation adds nothing
        if v % 2 == 0 && all_units.is_subgroup_of(&group) {
            continue;
        }
        let candidates = normalizer_candidates(order, p, v);
        if candidates.is_empty() {
            continue;
        }
        let r = ResidueAlgebra::new(order.clone(), p, v);
        // deduplicating by unit multiples only pays off while O/p^v O is small
        let unit_reps: Vec<Vec4> = if pow(p, 4 * v) <= 1 << 16 {
            residue_vectors(r.modulus as u64).filter(|u| r.is_unit(u)).collect()
        } else {
            Vec::new()
        };
        let mut covered: HashSet<Vec4> = HashSet::new();
        for x in candidates {
            if covered.contains(&x) {
                continue;
            }
            for u in &unit_reps {
                covered.insert(r.mul(&x, u));
            }
            for n in lifted_norms(order, &x, p, v, e) {
                if n != 0 && val(n, p) == v {
                    group = group.join(&SquareClassSubgroup::generated_by(place, [SquareClass::of_int(n, place)]));
                }
            }
        }
    }
    let has_odd_valuation = group.has_odd_valuation();
    NormalizerNorms { group, has_odd_valuation, max_valuation: vmax }
}

/// The closed form for orders with nonzero Eichler invariant: unit classes when
/// `v_p(d(O))` is even, everything when it is odd.
pub fn normalizer_norms_closed_form(order: &QuatOrder, p: u64) -> Option<SquareClassSubgroup> {
    let place = Place::Prime(p);
    if eichler_invariant(order, p) == 0 {
        return None;
    }
    Some(if val(order.disc, p) % 2 == 0 {
        SquareClassSubgroup::units(place)
    } else {
        SquareClassSubgroup::full(place)
    })
}

/// Local data of an order at one prime.
#[derive(Debug, Clone, Serialize)]
pub struct LocalProfile {
    pub p: u64,
    pub eichler_invariant: i8,
    pub nrd_units: SquareClassSubgroup,
    pub nrd_normalizer: SquareClassSubgroup,
    pub has_odd_valuation: bool,
}

pub fn local_profile(order: &Arc<QuatOrder>, p: u64) -> LocalProfile {
    let nn = normalizer_norms(order, p);
    LocalProfile {
        p,
        eichler_invariant: eichler_invariant(order, p),
        nrd_units: unit_norms(order, p),
        nrd_normalizer: nn.group,
        has_odd_valuation: nn.has_odd_valuation,
    }
}

/// `Nr(E_p)` modulo squares together with the lower bound `Nm(K_p^x) Nr(N(O_p))`.
#[derive(Debug, Clone, Serialize)]
pub struct EmbeddingNorms {
    pub group: SquareClassSubgroup,
    pub lower_bound: SquareClassSubgroup,
    pub local_norms: SquareClassSubgroup,
    pub precision: u32,
}

impl EmbeddingNorms {
    pub fn equals_local_norms(&self) -> bool {
        self.group == self.local_norms
    }
}

/// A nonzero `g` (mod `p^prec`) with `x g = g y`, from the Smith form of
/// `g -> x g - g y` modulo `p^k`, and the precision to which it is exact.
fn intertwiner(r: &ResidueAlgebra, x: &Vec4, y: &Vec4) -> Option<(Vec4, u32)> {
    let mut m = [[0i128; 4]; 4];
    for j in 0..4 {
        let mut e = [0i128; 4];
        e[j] = 1;
        let c = r.sub(&r.mul(x, &e), &r.mul(&e, y));
        for i in 0..4 {
            m[i][j] = c[i];
        }
    }
    let (divs, v) = snf_mod(&m, r.p, r.k);
    // two divisors come from the nontrivial part, two vanish for exact roots
    let mut vals: Vec<(u32, usize)> = divs
        .iter()
        .enumerate()
        .map(|(i, d)| (d.unwrap_or(r.k), i))
        .collect();
    vals.sort();
    let a2 = vals[1].0;
    let i = vals[3].1;
    let g: Vec4 = std::array::from_fn(|row| v[row][i]);
    (a2 < r.k).then(|| (g, r.k - a2))
}

/// `Nr(E_p)`: the norms of all `g` with `g^{-1} phi g` again optimal in `O_p`.
///
/// Every such conjugate is one of the optimal roots `y`, and the `g` realizing a
/// given `y` form a coset `K_p^x g_y`; hence `Nr(E_p)` is generated by `Nm(K_p^x)`
/// and the classes of `nrd(g_y)` over all roots.
pub fn embedding_norm_group(b: &QuadOrder, order: &Arc<QuatOrder>, p: u64) -> Result<EmbeddingNorms> {
    let place = Place::Prime(p);
    let local_norms = local_norm_group(b.m as i128, p);
    let nn = normalizer_norms(order, p);
    let lower_bound = local_norms.join(&nn.group);
    let k = embed_precision(b, order, p);
    let search = RootSearch::new(order, p, b);
    let split = kronecker_symbol(&rat(b.field_disc()), place)? == 1;
    if split || lower_bound.is_full() {
        if !search.has_optimal_root()? {
            return Err(Error::ConditionStarFails(p));
        }
        let group = SquareClassSubgroup::full(place);
        return Ok(EmbeddingNorms { group, lower_bound, local_norms, precision: k });
    }
    let roots: Vec<Vec4> = search.root_orbits(k)?;
    let Some(x0) = roots.first() else {
        return Err(Error::ConditionStarFails(p));
    };
    let mut group = lower_bound.clone();
    let target = k + 2 * val(b.disc(), p) + 8;
    let (x, jx) = search.certify(x0, k, target)?.expect("optimal root lifts");
    let m = b.m as i128;
    for y0 in &roots {
        let (y, jy) = search.certify(y0, k, target)?.expect("optimal root lifts");
        let r = ResidueAlgebra::new(order.clone(), p, jx.min(jy));
        let (g, prec) = intertwiner(&r, &r.reduce(&x), &r.reduce(&y))
            .ok_or(Error::PrecisionUnstable { p, k1: k, k2: target })?;
        let n = order.nrd_int(&g);
        let vn = if n == 0 { u32::MAX } else { val(n, p) };
        if vn.saturating_add(class_digits(p)) > prec {
            return Err(Error::PrecisionUnstable { p, k1: prec, k2: target });
        }
        if hilbert_symbol_int(m, n, place) == -1 {
            group = SquareClassSubgroup::full(place);
            break;
        }
    }
    Ok(EmbeddingNorms { group, lower_bound, local_norms, precision: k })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::{eichler_order, generate_order, RatQuatAlgebra};

    fn z_plus_2_hurwitz() -> Arc<QuatOrder> {
        let h = rat(1);
        let alg = Arc::new(RatQuatAlgebra::new(-1, -1));
        let gens = [[rat(2), rat(0), rat(0), rat(0)], [rat(0), rat(2), rat(0), rat(0)], [rat(0), rat(0), rat(2), rat(0)], [h, h, h, h]];
        Arc::new(generate_order(alg, &gens).unwrap())
    }

    #[test]
    fn normalizers_match_closed_form() {
        let d11 = Arc::new(RatQuatAlgebra::new(-1, -11));
        let cases = [
            (Arc::new(eichler_order(d11.clone(), 1, 11).unwrap()), 11),
            (Arc::new(eichler_order(d11.clone(), 9, 11).unwrap()), 3),
            (Arc::new(eichler_order(d11, 2, 11).unwrap()), 2),
            (Arc::new(eichler_order(Arc::new(RatQuatAlgebra::new(-1, -1)), 1, 2).unwrap()), 2),
            (Arc::new(eichler_order(Arc::new(RatQuatAlgebra::new(-1, -3)), 4, 3).unwrap()), 2),
        ];
        for (o, p) in cases {
            let nn = normalizer_norms(&o, p);
            assert_eq!(Some(nn.group.clone()), normalizer_norms_closed_form(&o, p), "d={} p={p}", o.disc);
            assert_eq!(unit_norms(&o, p), SquareClassSubgroup::units(Place::Prime(p)));
        }
    }

    fn z_plus_f_hurwitz(f: i128) -> Arc<QuatOrder> {
        let alg = Arc::new(RatQuatAlgebra::new(-1, -1));
        let om = eichler_order(alg.clone(), 1, 2).unwrap();
        let gens: Vec<_> = om.basis().iter().map(|x| x.map(|c| c * rat(f))).collect();
        Arc::new(generate_order(alg, &gens).unwrap())
    }

    #[test]
    fn z_plus_2_hurwitz_norms() {
        let o = z_plus_2_hurwitz();
        assert_eq!(unit_norms(&o, 2).reps(), vec![1, 3, 5, 7]);
        assert!(normalizer_norms(&o, 2).group.is_full());
        for (m, f) in [(-1i64, 2u64), (-3, 2), (-2, 2)] {
            let b = QuadOrder::new(m, f).unwrap();
            assert!(embedding_norm_group(&b, &o, 2).unwrap().group.is_full());
        }
        // 2 splits in Q(sqrt -15) but ramifies in the algebra
        let b = QuadOrder::new(-15, 2).unwrap();
        assert!(matches!(embedding_norm_group(&b, &o, 2), Err(Error::ConditionStarFails(2))));
    }

    /// Some `g` with `v(nrd g) = 1` and `g^{-1} x g` optimal, found mod `p^2`.
    fn odd_norm_intertwiner(o: &Arc<QuatOrder>, p: u64, x: &Vec4) -> bool {
        let r = ResidueAlgebra::new(o.clone(), p, 2);
        let pi = p as i128;
        let lifts: Vec<Vec4> = residue_vectors(p).collect();
        residue_vectors(p).any(|g0| {
            lifts.iter().any(|h| {
                let g: Vec4 = std::array::from_fn(|i| g0[i] + pi * h[i]);
                let n = r.nrd(&g);
                if n % pi != 0 || n % (pi * pi) == 0 {
                    return false;
                }
                let s = r.mul(&r.mul(&r.conj(&g), x), &g);
                s.iter().all(|c| c % pi == 0) && !r.is_scalar_mod(&s.map(|c| c / pi), 1)
            })
        })
    }

    #[test]
    fn embedding_norms_match_search() {
        let a11 = Arc::new(RatQuatAlgebra::new(-1, -1));
        let a13 = Arc::new(RatQuatAlgebra::new(-1, -3));
        let zh3 = z_plus_f_hurwitz(3);
        let eich9 = Arc::new(eichler_order(a11, 9, 2).unwrap());
        let om = eichler_order(a13.clone(), 1, 3).unwrap();
        let gens: Vec<_> = om.basis().iter().map(|x| x.map(|c| c * rat(4))).collect();
        let z4o = Arc::new(generate_order(a13, &gens).unwrap());
        assert_eq!(unit_norms(&zh3, 3), SquareClassSubgroup::trivial(Place::Prime(3)));
        let cases = [(&zh3, 3, -1i64, 3u64), (&zh3, 3, -7, 3), (&eich9, 3, -1, 9), (&eich9, 3, -7, 3), (&z4o, 2, -3, 4)];
        for (o, p, m, f) in cases {
            let b = QuadOrder::new(m, f).unwrap();
            let e = embedding_norm_group(&b, o, p).unwrap();
            assert!(!e.lower_bound.is_full());
            let roots = RootSearch::new(o, p, &b).root_orbits(4).unwrap();
            let found = roots.iter().any(|x| odd_norm_intertwiner(o, p, x));
            assert_eq!(e.group.is_full(), found, "p={p} m={m} f={f}");
            assert_eq!(e.group, e.lower_bound);
        }
        // the search does see odd intertwiners where they exist
        let b = QuadOrder::new(-2, 1).unwrap();
        let roots = RootSearch::new(&eich9, 3, &b).root_orbits(4).unwrap();
        assert!(roots.iter().any(|x| odd_norm_intertwiner(&eich9, 3, x)));
    }

    #[test]
    fn split_prime_still_needs_roots() {
        let b = QuadOrder::new(-2, 1).unwrap();
        assert!(matches!(embedding_norm_group(&b, &z_plus_f_hurwitz(3), 3), Err(Error::ConditionStarFails(3))));
    }

    #[test]
    fn z_plus_4_hurwitz_counts() {
        let o = z_plus_f_hurwitz(4);
        for (m, c) in [(-1i64, 24u64), (-3, 32), (-2, 24)] {
            let b = QuadOrder::new(m, 4).unwrap();
            assert_eq!(crate::localorder::local_embed_count(&b, &o, 2).unwrap(), c, "m={m}");
        }
    }
}
