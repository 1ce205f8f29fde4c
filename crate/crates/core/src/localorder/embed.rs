use std::collections::BTreeMap;
use std::sync::Arc;

use petgraph::unionfind::UnionFind;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::numthy::{kronecker_symbol, modp, pow, rat, val, Place, QuadOrder};
use crate::quat::{residue_vectors, QuatOrder};
use crate::{Error, Result};

use super::residue::{solve_mod, ResidueAlgebra, Vec4};

/// Extra levels beyond the target that a lifting search may descend.
const MAX_LIFT_DEPTH: u32 = 24;

/// Roots of `x^2 - t x + n` in `O_p`, i.e. elements with `trd = t`, `nrd = n`,
/// approximated modulo `p^k`.
pub(crate) struct RootSearch<'a> {
    order: &'a QuatOrder,
    p: u64,
    t: i128,
    n: i128,
}

impl<'a> RootSearch<'a> {
    pub(crate) fn new(order: &'a QuatOrder, p: u64, b: &QuadOrder) -> Self {
        RootSearch { order, p, t: b.t, n: b.n }
    }

    fn solves(&self, x: &Vec4, j: u32) -> bool {
        let m = pow(self.p, j);
        (self.order.trd_int(x) - self.t) % m == 0 && (self.order.nrd_int(x) - self.n) % m == 0
    }

    fn grad(&self, x: &Vec4) -> Vec4 {
        let q = &self.order.nrd_q;
        std::array::from_fn(|i| {
            (0..4)
                .map(|l| {
                    let c = if l == i { 2 * q[i][i] } else if l > i { q[i][l] } else { q[l][i] };
                    c * x[l]
                })
                .sum()
        })
    }

    /// Valuation of the second elementary divisor of the Jacobian of `(trd, nrd)` at
    /// `x`, when it is determined by `x mod p^j`.
    fn jacobian_defect(&self, x: &Vec4, j: u32) -> Option<u32> {
        let rows = [self.order.trd_lin, self.grad(x)];
        let v1 = rows.iter().flatten().filter(|&&c| c != 0).map(|&c| val(c, self.p)).min()?;
        let mut vm: Option<u32> = None;
        for a in 0..4 {
            for b in a + 1..4 {
                let minor = rows[0][a] * rows[1][b] - rows[0][b] * rows[1][a];
                if minor != 0 {
                    let v = val(minor, self.p);
                    vm = Some(vm.map_or(v, |w| w.min(v)));
                }
            }
        }
        let vm = vm?;
        (vm < j && v1 < j).then(|| vm - v1)
    }

    /// A lift of `x` (a solution mod `p^j`) proving that `x mod p^target` is the
    /// reduction of a root; `None` when no root reduces to `x mod p^j`.
    pub(crate) fn certify(&self, x: &Vec4, j: u32, target: u32) -> Result<Option<(Vec4, u32)>> {
        Ok(self.descend(x, j, target)?.map(|(w, l, _)| (w, l)))
    }

    /// Whether `x mod p^j` is the reduction of a root.
    pub(crate) fn lifts(&self, x: &Vec4, j: u32) -> Result<bool> {
        Ok(self.descend(x, j, j)?.is_some())
    }

    /// Hensel search. A certificate `(w, l, d)` shows some root agrees with `w`
    /// modulo `p^{l-d}`; `None` shows no root lies over `x mod p^j`.
    ///
    /// Below the point where the Jacobian defect `d` is visible this branches over
    /// the fiber; past it (`j > d`) the quadratic term of `nrd` drops out and each
    /// step is a linear solve.
    fn descend(&self, x: &Vec4, j: u32, target: u32) -> Result<Option<(Vec4, u32, u32)>> {
        if let Some(d) = self.jacobian_defect(x, j) {
            if j > d {
                return Ok(self.newton(x, j, d, target));
            }
        }
        if j >= target + MAX_LIFT_DEPTH {
            return Err(Error::PrecisionUnstable { p: self.p, k1: target, k2: j });
        }
        let pj = pow(self.p, j);
        for y in residue_vectors(self.p) {
            let z: Vec4 = std::array::from_fn(|i| x[i] + pj * y[i]);
            if self.solves(&z, j + 1) {
                if let Some(found) = self.descend(&z, j + 1, target)? {
                    return Ok(Some(found));
                }
            }
        }
        Ok(None)
    }

    /// Linear lifting from a solution `x mod p^j` with Jacobian defect `d < j`.
    ///
    /// A solution mod `p^{j+e}` over `x` (`e <= j`) exists iff `x mod p^j` lifts to a
    /// root, and then it pins a root modulo `p^{j+e-d}`.
    fn newton(&self, x: &Vec4, j: u32, d: u32, target: u32) -> Option<(Vec4, u32, u32)> {
        let (mut cur, mut lvl) = (*x, j);
        loop {
            if lvl > 2 * d && lvl >= target + d {
                return Some((cur, lvl, d));
            }
            let e = lvl.min((d + 1).max((target + 2 * d).saturating_sub(lvl)).max((3 * d + 1).saturating_sub(lvl)));
            let pl = pow(self.p, lvl);
            let g = self.grad(&cur);
            let m = [self.order.trd_lin, g, [0; 4], [0; 4]];
            let f = [self.order.trd_int(&cur) - self.t, self.order.nrd_int(&cur) - self.n];
            let c = [-f[0] / pl, -f[1] / pl, 0, 0];
            let u = solve_mod(&m, c, self.p, e)?;
            let z: Vec4 = std::array::from_fn(|i| cur[i] + pl * u[i]);
            debug_assert!(self.solves(&z, lvl + e));
            lvl = lvl + e - d;
            let md = pow(self.p, lvl);
            cur = z.map(|c| modp(c, md));
        }
    }

    /// Solutions mod `p^{j+1}` lying over `x` (a solution mod `p^j`).
    fn fiber(&self, x: &Vec4, j: u32) -> Vec<Vec4> {
        let pj = pow(self.p, j);
        residue_vectors(self.p)
            .map(|y| std::array::from_fn(|i| x[i] + pj * y[i]))
            .filter(|z: &Vec4| self.solves(z, j + 1))
            .collect()
    }

    /// Representatives of the `(O / p^k O)^x`-conjugacy orbits of reductions mod
    /// `p^k` of optimal roots.
    ///
    /// Orbits at level `j + 1` are found fiber by fiber over the orbit
    /// representatives at level `j`: over `x`, the acting group is the preimage `H` of
    /// the stabilizer of `x`. Its orbits on the fiber are computed by union-find with
    /// sampled generators, and the resulting partition is accepted only once its size
    /// equals `sum_y |Stab(y)| / |H|`.
    pub(crate) fn root_orbits(&self, k: u32) -> Result<Vec<Vec4>> {
        Ok(self.orbit_tower(k)?.pop().unwrap_or_default())
    }

    /// Whether an optimal root exists at all: optimality is decided mod `p`.
    pub(crate) fn has_optimal_root(&self) -> Result<bool> {
        let r1 = ResidueAlgebra::new(Arc::new(self.order.clone()), self.p, 1);
        for x in residue_vectors(self.p).filter(|x| self.solves(x, 1) && !r1.is_scalar_mod(x, 1)) {
            if self.lifts(&x, 1)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Orbit representatives at every level `1..=k`.
    pub(crate) fn orbit_tower(&self, k: u32) -> Result<Vec<Vec<Vec4>>> {
        let order = Arc::new(self.order.clone());
        let r1 = ResidueAlgebra::new(order.clone(), self.p, 1);
        let level1: Vec<Vec4> = residue_vectors(self.p)
            .filter(|x| self.solves(x, 1) && !r1.is_scalar_mod(x, 1))
            .collect();
        let gens = r1.unit_generators();
        let mut reps = Vec::new();
        for orbit in orbits_under(&r1, level1, &gens) {
            if self.lifts(&orbit[0], 1)? {
                reps.push(orbit[0]);
            }
        }
        let mut tower = vec![reps.clone()];
        let mut rng = ChaCha8Rng::seed_from_u64(self.p ^ (self.t as u64) << 8 ^ (self.n as u64) << 24);
        for j in 1..k {
            let below = ResidueAlgebra::new(order.clone(), self.p, j);
            let above = ResidueAlgebra::new(order.clone(), self.p, j + 1);
            let mut next = Vec::new();
            for x in &reps {
                let fiber = self.fiber(x, j);
                let h_order = below.centralizer_units(x) * pow(self.p, 4);
                let stab_sum: i128 = fiber.iter().map(|y| above.centralizer_units(y)).sum();
                if stab_sum % h_order != 0 {
                    return Err(Error::PrecisionUnstable { p: self.p, k1: j, k2: j + 1 });
                }
                let expected = (stab_sum / h_order) as usize;
                let centralizer = below.centralizer_basis(x);
                let mut fo = FiberOrbits::new(&above, fiber);
                for i in 0..4 {
                    let mut e = above.one();
                    e[i] = modp(e[i] + pow(self.p, j), above.modulus);
                    fo.apply(&e);
                }
                let mut tries = 0;
                while fo.count() > expected {
                    tries += 1;
                    if tries > 2000 {
                        return Err(Error::PrecisionUnstable { p: self.p, k1: j, k2: j + 1 });
                    }
                    let mut c = [0i128; 4];
                    for b in &centralizer {
                        let s = rng.gen_range(0..below.modulus);
                        for l in 0..4 {
                            c[l] += s * b[l];
                        }
                    }
                    let c = below.reduce(&c);
                    if below.is_unit(&c) {
                        fo.apply(&c);
                    }
                }
                if fo.count() < expected {
                    return Err(Error::PrecisionUnstable { p: self.p, k1: j, k2: j + 1 });
                }
                let orbits = fo.into_orbits();
                for orbit in orbits {
                    if self.lifts(&orbit[0], j + 1)? {
                        next.push(orbit[0]);
                    }
                }
            }
            tower.push(next.clone());
            reps = next;
        }
        Ok(tower)
    }
}

fn pack(x: &Vec4, m: i128) -> u128 {
    x.iter().fold(0u128, |acc, &c| acc * m as u128 + c as u128)
}

/// Union-find over a conjugation-stable set, refined one group element at a time.
struct FiberOrbits<'r> {
    r: &'r ResidueAlgebra,
    elems: Vec<Vec4>,
    keys: Vec<u128>,
    uf: UnionFind<usize>,
    count: usize,
}

impl<'r> FiberOrbits<'r> {
    fn new(r: &'r ResidueAlgebra, mut elems: Vec<Vec4>) -> Self {
        let m = r.modulus;
        elems.sort_by_key(|x| pack(x, m));
        let keys: Vec<u128> = elems.iter().map(|x| pack(x, m)).collect();
        let n = elems.len();
        FiberOrbits { r, elems, keys, uf: UnionFind::new(n), count: n }
    }

    fn count(&self) -> usize {
        self.count
    }

    fn apply(&mut self, u: &Vec4) {
        let m = self.r.modulus;
        let c = self.r.conjugation_matrix(u);
        for (i, x) in self.elems.iter().enumerate() {
            let y: Vec4 = std::array::from_fn(|a| modp((0..4).map(|b| c[a][b] * x[b]).sum(), m));
            let jdx = self.keys.binary_search(&pack(&y, m)).expect("set is conjugation stable");
            if self.uf.union(i, jdx) {
                self.count -= 1;
            }
        }
    }

    fn into_orbits(self) -> Vec<Vec<Vec4>> {
        let mut groups: BTreeMap<usize, Vec<Vec4>> = BTreeMap::new();
        for (i, x) in self.elems.iter().enumerate() {
            groups.entry(self.uf.find(i)).or_default().push(*x);
        }
        groups.into_values().collect()
    }
}

/// Partition of a conjugation-stable set into orbits of the group generated by `gens`.
fn orbits_under(r: &ResidueAlgebra, elems: Vec<Vec4>, gens: &[Vec4]) -> Vec<Vec<Vec4>> {
    let mut fo = FiberOrbits::new(r, elems);
    for u in gens {
        fo.apply(u);
    }
    fo.into_orbits()
}

/// Default working precision for embedding counts at `p`.
pub fn embed_precision(b: &QuadOrder, order: &QuatOrder, p: u64) -> u32 {
    3 + 2 * val(2, p) + val(order.disc, p) + 2 * val(b.f as i128 * b.field_disc(), p)
}

/// Whether `B_p` embeds optimally into `O_p` at all.
pub fn has_local_embedding(b: &QuadOrder, order: &Arc<QuatOrder>, p: u64) -> Result<bool> {
    RootSearch::new(order, p, b).has_optimal_root()
}

/// Number of unit-conjugacy orbits of optimal roots modulo `p^k`.
pub fn local_embed_count_at(b: &QuadOrder, order: &Arc<QuatOrder>, p: u64, k: u32) -> Result<u64> {
    Ok(RootSearch::new(order, p, b).root_orbits(k)?.len() as u64)
}

/// `m_p(B)`: optimal embeddings of `B_p` into `O_p` up to conjugation by `O_p^x`.
///
/// Computed at the default precision and two levels higher; the two must agree.
pub fn local_embed_count(b: &QuadOrder, order: &Arc<QuatOrder>, p: u64) -> Result<u64> {
    local_embed_count_with(b, order, p, embed_precision(b, order, p))
}

pub fn local_embed_count_with(b: &QuadOrder, order: &Arc<QuatOrder>, p: u64, k: u32) -> Result<u64> {
    if k == 0 {
        return Err(Error::InvalidInput("precision must be positive".into()));
    }
    let tower = RootSearch::new(order, p, b).orbit_tower(k + 2)?;
    let (c1, c2) = (tower[k as usize - 1].len() as u64, tower[k as usize + 1].len() as u64);
    if c1 != c2 {
        return Err(Error::PrecisionUnstable { p, k1: k, k2: k + 2 });
    }
    Ok(c1)
}

/// Largest `e` such that `x` is congruent to a scalar modulo `p^e`; zero exactly for
/// optimal embeddings.
pub fn optimality_defect(r: &ResidueAlgebra, x: &Vec4, b: &QuadOrder) -> Result<u32> {
    let e = r.scalar_depth(x);
    if e >= r.k || e > b.conductor_val(r.p) {
        return Err(Error::InvalidInput(format!(
            "precision {} too small to resolve the defect at {}",
            r.k, r.p
        )));
    }
    Ok(e)
}

/// Existence of optimal embeddings into an Eichler order of level `p^{n_p}` at an
/// unramified prime: always when `p` splits in `K`, and for inert `p` exactly when
/// `n_p <= 2 i_p(B)`.
pub fn guo_qin_test(b: &QuadOrder, n_p: u32, p: u64) -> Result<bool> {
    match kronecker_symbol(&rat(b.field_disc()), Place::Prime(p))? {
        1 => Ok(true),
        -1 => Ok(n_p <= 2 * b.conductor_val(p)),
        _ => Err(Error::InvalidInput(format!("{p} ramifies in Q(sqrt {})", b.m))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::{eichler_order, generate_order, RatQuatAlgebra};
    use crate::numthy::ratio;

    fn hurwitz() -> Arc<QuatOrder> {
        let alg = Arc::new(RatQuatAlgebra::new(-1, -1));
        Arc::new(eichler_order(alg, 1, 2).unwrap())
    }

    #[test]
    fn hurwitz_counts() {
        let o = hurwitz();
        let zi = QuadOrder::new(-1, 1).unwrap();
        assert_eq!(local_embed_count(&zi, &o, 2).unwrap(), 1);
        assert_eq!(local_embed_count(&zi, &o, 3).unwrap(), 1);
        let z3 = QuadOrder::new(-3, 1).unwrap();
        // 2 is inert in Q(sqrt -3) and ramified in D
        assert_eq!(local_embed_count(&z3, &o, 2).unwrap(), 2);
        let z2i = QuadOrder::new(-1, 2).unwrap();
        assert_eq!(local_embed_count(&z2i, &o, 2).unwrap(), 0);
    }

    #[test]
    fn non_maximal_orders() {
        let h = ratio(1, 2);
        let alg = Arc::new(RatQuatAlgebra::new(-1, -1));
        let gens = [[rat(2), rat(0), rat(0), rat(0)], [rat(0), rat(2), rat(0), rat(0)], [rat(0), rat(0), rat(2), rat(0)], [h + h, h + h, h + h, h + h]];
        let sub = Arc::new(generate_order(alg, &gens).unwrap());
        assert_eq!(sub.disc, 16);
        let b = QuadOrder::new(-1, 2).unwrap();
        // stable from k = 3 on
        for k in 3..6 {
            assert_eq!(local_embed_count_at(&b, &sub, 2, k).unwrap(), 6);
        }
        let e8 = Arc::new(eichler_order(Arc::new(RatQuatAlgebra::new(-1, -3)), 8, 3).unwrap());
        assert_eq!(local_embed_count(&QuadOrder::new(-1, 1).unwrap(), &e8, 2).unwrap(), 0);
        assert_eq!(local_embed_count(&QuadOrder::new(-7, 1).unwrap(), &e8, 2).unwrap(), 2);
    }

    /// Flat oracle: every solution mod `p^k`, orbits under a full generating set of
    /// `(O / p^k O)^x`, one lifting check per orbit.
    fn flat_orbit_count(o: &Arc<QuatOrder>, p: u64, b: &QuadOrder, k: u32) -> usize {
        let s = RootSearch::new(o, p, b);
        let r = ResidueAlgebra::new(o.clone(), p, k);
        let r1 = r.with_precision(1);
        let mut level: Vec<Vec4> = residue_vectors(p).filter(|x| s.solves(x, 1) && !r1.is_scalar_mod(x, 1)).collect();
        for j in 1..k {
            level = level.iter().flat_map(|x| s.fiber(x, j)).collect();
        }
        orbits_under(&r, level, &r.unit_generators())
            .into_iter()
            .filter(|o| s.certify(&o[0], k, k).unwrap().is_some())
            .count()
    }

    #[test]
    fn fiberwise_matches_flat() {
        let h = ratio(1, 2);
        let alg = Arc::new(RatQuatAlgebra::new(-1, -1));
        let gens = [[rat(3), rat(0), rat(0), rat(0)], [rat(0), rat(3), rat(0), rat(0)], [rat(0), rat(0), rat(3), rat(0)], [h * 3, h * 3, h * 3, h * 3]];
        let sub3 = Arc::new(generate_order(alg, &gens).unwrap());
        let e8 = Arc::new(eichler_order(Arc::new(RatQuatAlgebra::new(-1, -3)), 8, 3).unwrap());
        for (o, p, m, f) in [(&sub3, 3u64, -1i64, 3u64), (&sub3, 3, -2, 1), (&e8, 2, -7, 2), (&e8, 2, -1, 4), (&e8, 2, -1, 2), (&hurwitz(), 2, -3, 1)] {
            let b = QuadOrder::new(m, f).unwrap();
            for k in 1..5 {
                let fib = RootSearch::new(o, p, &b).root_orbits(k).unwrap().len();
                assert_eq!(fib, flat_orbit_count(o, p, &b, k), "p={p} m={m} f={f} k={k}");
            }
        }
    }

    #[test]
    fn guo_qin() {
        let b = QuadOrder::new(-1, 3).unwrap();
        assert!(guo_qin_test(&b, 2, 3).unwrap());
        assert!(!guo_qin_test(&b, 3, 3).unwrap());
        assert!(guo_qin_test(&QuadOrder::new(-1, 1).unwrap(), 7, 5).unwrap());
        assert!(guo_qin_test(&b, 1, 2).is_err());
    }
}
