//! Sweeps definite algebras of small discriminant for orders whose spinor genus
//! field contains an imaginary quadratic field, and classifies each hit.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::Serialize;

use crate::corpus::format_entry;
use crate::definite::short_vectors;
use crate::numthy::{factor, gcd, is_squarefree, rat, QuadOrder, Rat};
use crate::quat::{eichler_order, generate_order, QuatOrder, RatQuatAlgebra};
use crate::spinor::{selectivity, spinor_genus_field, PrimeVerdict};
use crate::Result;

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct HuntConfig {
    pub max_algebra_disc: u64,
    pub max_conductor: u64,
    pub max_b_disc: u64,
}

impl Default for HuntConfig {
    fn default() -> Self {
        HuntConfig { max_algebra_disc: 13, max_conductor: 4, max_b_disc: 20 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Verdict {
    Selective,
    NonSelective,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct HuntHit {
    pub algebra: [i128; 2],
    pub algebra_disc: u64,
    pub kind: String,
    /// The order as a corpus line.
    pub order: String,
    pub order_disc: i128,
    pub b: [i64; 2],
    #[serde(rename = "S")]
    pub s: Vec<u64>,
    pub per_prime: BTreeMap<u64, PrimeVerdict>,
    pub verdict: Verdict,
    pub reason: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct HuntReport {
    pub config: HuntConfig,
    pub algebras: Vec<[i128; 3]>,
    pub orders_swept: usize,
    pub orders_with_nontrivial_field: usize,
    pub hits: Vec<HuntHit>,
    pub selective: usize,
}

/// A definite algebra `(-a, -b | Q)` with the given discriminant, small `a <= b` first.
pub fn definite_algebra(disc: u64) -> Option<RatQuatAlgebra> {
    let d = disc as i128;
    if disc < 2 || !is_squarefree(d) || factor(d).len() % 2 == 0 {
        return None;
    }
    let limit = 4 * d;
    (1..=limit).flat_map(|b| (1..=b).map(move |a| (a, b))).find_map(|(a, b)| {
        let alg = RatQuatAlgebra::new(-a, -b);
        (alg.disc() == d).then_some(alg)
    })
}

fn scaled_plus_z(alg: &Arc<RatQuatAlgebra>, base: &QuatOrder, n: i128, extra: Option<[Rat; 4]>) -> Result<QuatOrder> {
    let mut gens: Vec<[Rat; 4]> = base.basis().iter().map(|x| x.map(|c| c * rat(n))).collect();
    gens.push([rat(1), rat(0), rat(0), rat(0)]);
    gens.extend(extra);
    generate_order(alg.clone(), &gens)
}

/// Maximal, Eichler, `Z + n O_max` and `Z[x] + n O_max` orders in one algebra.
///
/// For the last family one `x` in `O_max` is taken per discriminant of `Z[x]`
/// (trace 0 or 1), smallest coordinates first.
pub fn candidate_orders(alg: &Arc<RatQuatAlgebra>, config: &HuntConfig) -> Result<Vec<(String, Arc<QuatOrder>)>> {
    let disc = alg.disc() as u64;
    let omax = eichler_order(alg.clone(), 1, disc)?;
    let mut out: Vec<(String, QuatOrder)> = vec![("maximal".into(), omax.clone())];
    for n in 2..=config.max_conductor {
        if gcd(n as i128, disc as i128) == 1 {
            out.push((format!("eichler {n}"), eichler_order(alg.clone(), n, disc)?));
        }
        out.push((format!("Z+{n}O"), scaled_plus_z(alg, &omax, n as i128, None)?));
    }
    let bound = Rat::new(config.max_b_disc as i128 + 1, 4);
    let mut by_disc: BTreeMap<i128, [Rat; 4]> = BTreeMap::new();
    let mut xs = short_vectors(alg, &omax.lat, bound)?;
    xs.sort_by(|a, b| a.nrd.cmp(&b.nrd).then(a.coords.cmp(&b.coords)));
    for v in xs {
        let t = alg.trd(&v.elem);
        if t != rat(0) && t != rat(1) {
            continue;
        }
        let d = (t * t - rat(4) * v.nrd).to_integer();
        if d < 0 && d.unsigned_abs() as u64 <= config.max_b_disc {
            by_disc.entry(d).or_insert(v.elem);
        }
    }
    for (d, x) in &by_disc {
        for n in 2..=config.max_conductor {
            out.push((format!("Z[x]+{n}O, disc x = {d}"), scaled_plus_z(alg, &omax, n as i128, Some(*x))?));
        }
    }
    let mut seen = BTreeSet::new();
    Ok(out.into_iter().filter(|(_, o)| seen.insert(o.lat.clone())).map(|(k, o)| (k, Arc::new(o))).collect())
}

/// Imaginary quadratic orders `(m, f)` with `|disc| <= max`, for a fixed `m`.
fn quadratic_orders(m: i64, max: u64) -> Vec<QuadOrder> {
    (1..)
        .map_while(|f| QuadOrder::new(m, f).ok().filter(|b| b.disc().unsigned_abs() as u64 <= max))
        .collect()
}

pub fn hunt(config: &HuntConfig) -> Result<HuntReport> {
    let mut algebras = Vec::new();
    let mut orders_swept = 0;
    let mut nontrivial = 0;
    let mut hits = Vec::new();
    for disc in 2..=config.max_algebra_disc {
        let Some(alg) = definite_algebra(disc) else { continue };
        algebras.push([alg.a, alg.b, disc as i128]);
        let alg = Arc::new(alg);
        for (kind, order) in candidate_orders(&alg, config)? {
            orders_swept += 1;
            let field = spinor_genus_field(&order);
            let imaginary: Vec<i64> = field.members.iter().copied().filter(|&m| m < 0).collect();
            if !imaginary.is_empty() {
                nontrivial += 1;
            }
            for m in imaginary {
                for b in quadratic_orders(m, config.max_b_disc) {
                    let mut hit = HuntHit {
                        algebra: [alg.a, alg.b],
                        algebra_disc: disc,
                        kind: kind.clone(),
                        order: format_entry(&order, ""),
                        order_disc: order.disc,
                        b: [b.m, b.f as i64],
                        s: Vec::new(),
                        per_prime: BTreeMap::new(),
                        verdict: Verdict::Inconclusive,
                        reason: None,
                    };
                    match selectivity(&b, &order) {
                        Ok(r) => {
                            hit.verdict = if r.selective { Verdict::Selective } else { Verdict::NonSelective };
                            hit.s = r.s;
                            hit.per_prime = r.per_prime;
                        }
                        Err(e) => hit.reason = Some(e.to_string()),
                    }
                    hits.push(hit);
                }
            }
        }
    }
    let selective = hits.iter().filter(|h| h.verdict == Verdict::Selective).count();
    Ok(HuntReport {
        config: config.clone(),
        algebras,
        orders_swept,
        orders_with_nontrivial_field: nontrivial,
        hits,
        selective,
    })
}
