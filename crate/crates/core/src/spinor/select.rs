//! Optimal spinor selectivity and the relative-conductor formula.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::localorder::{eichler_invariant, embedding_norm_group, has_local_embedding};
use crate::numthy::{factor, squarefree_part, val, QuadOrder};
use crate::quat::QuatOrder;
use crate::{Error, Result};

use super::classgroup::{rho, spinor_class_group, SpinorClass};
use super::field::{bad_primes, embeds, spinor_genus_field, splitting, SpinorGenusField};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrimeVerdict {
    #[serde(rename = "NrE")]
    pub nr_e: Vec<i64>,
    #[serde(rename = "equalsNorms")]
    pub equals_norms: bool,
    pub precision: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SelectivityReport {
    #[serde(rename = "K_in_Sigma")]
    pub k_in_sigma: bool,
    #[serde(rename = "S")]
    pub s: Vec<u64>,
    #[serde(rename = "perPrime")]
    pub per_prime: BTreeMap<u64, PrimeVerdict>,
    pub selective: bool,
    #[serde(rename = "sSymbol")]
    pub s_symbol: u8,
    /// When selective: the spinor classes `[I]` with `Delta(B, O_l(I)) = Delta(B, O)`,
    /// i.e. the selected half whenever `O` itself admits an optimal embedding.
    #[serde(rename = "selectedClasses")]
    pub selected_classes: Vec<SpinorClass>,
}

/// Condition that `B_p` embeds optimally into `O_p` everywhere; only primes dividing
/// `d(O)` need checking since `M_2(Z_p)` accepts every quadratic order.
pub fn check_local_embeddings(b: &QuadOrder, order: &Arc<QuatOrder>) -> Result<()> {
    if !embeds(b.m, &order.alg)? {
        return Err(Error::NotEmbeddable(b.m));
    }
    for p in bad_primes(order) {
        if order.disc % p as i128 == 0 && !has_local_embedding(b, order, p)? {
            return Err(Error::ConditionStarFails(p));
        }
    }
    Ok(())
}

/// Selective iff `K` lies in `Sigma_G` and `Nr(E_p) = Nm(K_p^x)` on
/// `S = {p : p not split in K, e_p(O) = 0}`.
pub fn selectivity(b: &QuadOrder, order: &Arc<QuatOrder>) -> Result<SelectivityReport> {
    check_local_embeddings(b, order)?;
    let field = spinor_genus_field(order);
    let k_in_sigma = field.contains(b.m);
    let s: Vec<u64> = bad_primes(order)
        .into_iter()
        .filter(|&p| order.disc % p as i128 == 0 && splitting(b.m, p) != 1 && eichler_invariant(order, p) == 0)
        .collect();
    let mut per_prime = BTreeMap::new();
    for &p in &s {
        let e = embedding_norm_group(b, order, p)?;
        per_prime.insert(p, PrimeVerdict { nr_e: e.group.reps(), equals_norms: e.equals_local_norms(), precision: e.precision });
    }
    let selective = k_in_sigma && per_prime.values().all(|v| v.equals_norms);
    let selected_classes = if selective {
        let group = spinor_class_group(order);
        group.elements().into_iter().filter(|c| group.character(b.m, c) == 1).collect()
    } else {
        Vec::new()
    };
    Ok(SelectivityReport { k_in_sigma, s, per_prime, selective, s_symbol: u8::from(k_in_sigma), selected_classes })
}

/// `Delta(B, O) = rho(O, O_ref)|_K + Delta(B, O_ref)` with `Delta(B, O_ref) = 1`.
pub fn delta(b: &QuadOrder, order: &Arc<QuatOrder>, reference: &QuatOrder, report: &SelectivityReport) -> Result<u8> {
    if !report.selective {
        return Ok(1);
    }
    let field = spinor_genus_field(order);
    Ok(delta_from_rho(rho_k(b, order, reference, &field)?, 1))
}

fn rho_k(b: &QuadOrder, order: &Arc<QuatOrder>, other: &QuatOrder, field: &SpinorGenusField) -> Result<u8> {
    let r = rho(order, other, field)?;
    let m = squarefree_part(b.m as i128) as i64;
    r.get(&m).copied().ok_or_else(|| Error::HypothesisViolation(format!("Q(sqrt {m}) is not in the spinor genus field")))
}

/// The two-term shift: `rho|_K + Delta'` in `Z/2`.
pub fn delta_from_rho(rho_k: u8, delta_other: u8) -> u8 {
    (rho_k + delta_other) % 2
}

/// Artin symbol of the ideal `(n)` in `Gal(K/Q) = Z/2`, for `n` prime to the
/// discriminant of `K`: the total valuation at inert primes, mod 2.
pub fn conductor_symbol(n: u64, m: i64) -> Result<u8> {
    let mut s = 0;
    for (q, e) in factor(n as i128) {
        match splitting(m, q) {
            1 => {}
            -1 => s += e,
            _ => return Err(Error::HypothesisViolation(format!("{q} ramifies in Q(sqrt {m})"))),
        }
    }
    Ok((s % 2) as u8)
}

/// `Delta(B, O) = (f(B'/B), K/Q) + rho(O, O')|_K + Delta(B', O')`.
pub fn maclachlan_formula(symbol: u8, rho_k: u8, delta_other: u8) -> u8 {
    (symbol + rho_k + delta_other) % 2
}

fn is_eichler(order: &QuatOrder) -> bool {
    bad_primes(order).into_iter().filter(|&p| order.disc % p as i128 == 0).all(|p| {
        if order.alg.is_ramified(p) {
            val(order.disc, p) == 1
        } else {
            eichler_invariant(order, p) == 1
        }
    })
}

/// The relative-conductor formula for Eichler orders of one level with
/// `K` inside `Sigma_G`; every hypothesis is checked.
pub fn maclachlan_delta(
    b: &QuadOrder,
    b_other: &QuadOrder,
    order: &Arc<QuatOrder>,
    other: &Arc<QuatOrder>,
    delta_other: u8,
) -> Result<u8> {
    if b.m != b_other.m || b.f % b_other.f != 0 {
        return Err(Error::HypothesisViolation("B is not contained in B'".into()));
    }
    if !is_eichler(order) || !is_eichler(other) || order.disc != other.disc {
        return Err(Error::HypothesisViolation("orders are not Eichler of one level".into()));
    }
    check_local_embeddings(b, order)?;
    check_local_embeddings(b_other, other)?;
    let field = spinor_genus_field(order);
    if !field.contains(b.m) {
        return Err(Error::HypothesisViolation(format!("Q(sqrt {}) is not in the spinor genus field", b.m)));
    }
    let symbol = conductor_symbol(b.f / b_other.f, b.m)?;
    Ok(maclachlan_formula(symbol, rho_k(b, order, other, &field)?, delta_other))
}
