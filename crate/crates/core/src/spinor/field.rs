//! The spinor genus field, described by its quadratic subfields.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::Serialize;

use crate::localorder::normalizer_norms;
use crate::numthy::{kronecker_symbol, local_norm_group, prime_divisors, rat, squarefree_part, Place, SquareClassSubgroup};
use crate::quat::{QuatOrder, RatQuatAlgebra};
use crate::{Error, Result};

/// Primes dividing `2 d(O)`: the only places where `O_p` can differ from `M_2(Z_p)`
/// or where a quadratic character can ramify while staying inside `Sigma`.
pub fn bad_primes(order: &QuatOrder) -> Vec<u64> {
    let mut ps = prime_divisors(2 * order.disc);
    ps.sort_unstable();
    ps
}

/// `Q(sqrt m)` embeds in `D` iff no place ramified in `D` splits in it.
pub fn embeds(m: i64, alg: &RatQuatAlgebra) -> Result<bool> {
    for &place in &alg.ram {
        if kronecker_symbol(&rat(m as i128), place)? == 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `Sigma_G` as the set of squarefree `m` with `Q(sqrt m)` inside it.
///
/// Over `Q` the Galois group is an elementary 2-group whose characters are the
/// Kronecker characters of these fields, so `|members| + 1 = [Sigma_G : Q]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpinorGenusField {
    pub bad_primes: Vec<u64>,
    pub members: BTreeSet<i64>,
    pub definite: bool,
    /// `Nr(N(O_p))` modulo squares at each bad prime.
    #[serde(skip)]
    pub normalizer_norms: BTreeMap<u64, SquareClassSubgroup>,
}

impl SpinorGenusField {
    pub fn degree(&self) -> usize {
        self.members.len() + 1
    }

    pub fn contains(&self, m: i64) -> bool {
        self.members.contains(&(squarefree_part(m as i128) as i64))
    }
}

/// Members are the `m` (supported on `-1` and the bad primes) whose field is real
/// exactly when `D` is indefinite and whose local norms contain every normalizer
/// norm. Away from `2 d(O)` normalizer norms are `Q_p^x2 Z_p^x`, which forces `K`
/// to be unramified there.
pub fn spinor_genus_field(order: &Arc<QuatOrder>) -> SpinorGenusField {
    let bad = bad_primes(order);
    let definite = order.alg.is_definite();
    let nn: BTreeMap<u64, SquareClassSubgroup> =
        bad.iter().map(|&p| (p, normalizer_norms(order, p).group)).collect();
    let gens: Vec<i128> = std::iter::once(-1).chain(bad.iter().map(|&p| p as i128)).collect();
    let members = (1u32..1 << gens.len())
        .map(|mask| (0..gens.len()).filter(|i| mask >> i & 1 == 1).map(|i| gens[i]).product::<i128>())
        .filter(|&m| m != 1 && (m < 0) == definite)
        .filter(|&m| nn.iter().all(|(&p, g)| g.is_subgroup_of(&local_norm_group(m, p))))
        .map(|m| m as i64)
        .collect();
    SpinorGenusField { bad_primes: bad, members, definite, normalizer_norms: nn }
}

/// Whether `Q(sqrt m)` lies in the spinor genus field of `O`.
pub fn k_in_sigma(m: i64, order: &Arc<QuatOrder>) -> Result<bool> {
    if !embeds(m, &order.alg)? {
        return Err(Error::NotEmbeddable(m));
    }
    Ok(spinor_genus_field(order).contains(m))
}

/// Place-by-place splitting of `Q(sqrt m)` at `p`.
pub(crate) fn splitting(m: i64, p: u64) -> i8 {
    kronecker_symbol(&rat(m as i128), Place::Prime(p)).expect("m nonzero")
}
