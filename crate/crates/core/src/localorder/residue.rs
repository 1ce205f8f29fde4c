use std::collections::HashSet;
use std::sync::Arc;

use crate::numthy::{modinv, modp, pow, val};
use crate::quat::{residue_vectors, QuatOrder};

pub type Vec4 = [i128; 4];

/// `O / p^k O` in the fixed Z-basis of `O`; coordinates are kept in `[0, p^k)`.
#[derive(Debug, Clone)]
pub struct ResidueAlgebra {
    pub p: u64,
    pub k: u32,
    pub modulus: i128,
    pub order: Arc<QuatOrder>,
}

impl ResidueAlgebra {
    pub fn new(order: Arc<QuatOrder>, p: u64, k: u32) -> Self {
        assert!(k >= 1);
        ResidueAlgebra { p, k, modulus: pow(p, k), order }
    }

    pub fn with_precision(&self, k: u32) -> Self {
        Self::new(self.order.clone(), self.p, k)
    }

    pub fn reduce(&self, x: &Vec4) -> Vec4 {
        x.map(|c| modp(c, self.modulus))
    }

    pub fn one(&self) -> Vec4 {
        self.reduce(&self.order.one)
    }

    pub fn scalar(&self, c: i128) -> Vec4 {
        self.reduce(&self.order.one.map(|o| o * c))
    }

    pub fn add(&self, x: &Vec4, y: &Vec4) -> Vec4 {
        std::array::from_fn(|i| modp(x[i] + y[i], self.modulus))
    }

    pub fn sub(&self, x: &Vec4, y: &Vec4) -> Vec4 {
        std::array::from_fn(|i| modp(x[i] - y[i], self.modulus))
    }

    pub fn mul(&self, x: &Vec4, y: &Vec4) -> Vec4 {
        self.reduce(&self.order.mul_int(x, y))
    }

    pub fn conj(&self, x: &Vec4) -> Vec4 {
        self.reduce(&self.order.conj_int(x))
    }

    pub fn nrd(&self, x: &Vec4) -> i128 {
        modp(self.order.nrd_int(x), self.modulus)
    }

    pub fn trd(&self, x: &Vec4) -> i128 {
        modp(self.order.trd_int(x), self.modulus)
    }

    pub fn is_unit(&self, x: &Vec4) -> bool {
        self.order.nrd_int(x) % self.p as i128 != 0
    }

    pub fn is_zero(&self, x: &Vec4) -> bool {
        x.iter().all(|&c| c % self.modulus == 0)
    }

    /// True when `x` is a scalar modulo `p^e`.
    pub fn is_scalar_mod(&self, x: &Vec4, e: u32) -> bool {
        let m = pow(self.p, e);
        let one = self.order.one;
        let i = (0..4).find(|&i| one[i] % self.p as i128 != 0).expect("1 is primitive");
        let c = modp(x[i] * modinv(one[i], m).expect("unit"), m);
        (0..4).all(|j| modp(x[j] - c * one[j], m) == 0)
    }

    /// Largest `e <= k` with `x` congruent to a scalar modulo `p^e`.
    pub fn scalar_depth(&self, x: &Vec4) -> u32 {
        (1..=self.k).take_while(|&e| self.is_scalar_mod(x, e)).last().unwrap_or(0)
    }

    /// Number of units of `O / p O`.
    pub fn units_mod_p(&self) -> u64 {
        residue_vectors(self.p).filter(|c| self.is_unit(c)).count() as u64
    }

    /// `|(O / p^k O)^x| = p^{4(k-1)} |(O / p O)^x|`.
    pub fn unit_group_order(&self) -> i128 {
        pow(self.p, 4 * (self.k - 1)) * self.units_mod_p() as i128
    }

    pub fn inverse(&self, u: &Vec4) -> Option<Vec4> {
        let n = modinv(self.nrd(u), self.modulus)?;
        Some(self.reduce(&self.conj(u).map(|c| c * n)))
    }

    /// Generators of `(O / p^k O)^x`: units mod p added greedily until they generate
    /// `(O / p O)^x`, lifted, together with `1 + p^j e_i` for `1 <= j < k`.
    pub fn unit_generators(&self) -> Vec<Vec4> {
        let r1 = self.with_precision(1);
        let one = r1.one();
        let mut gens: Vec<Vec4> = Vec::new();
        let mut group: HashSet<Vec4> = HashSet::from([one]);
        for u in residue_vectors(self.p) {
            if !r1.is_unit(&u) || group.contains(&u) {
                continue;
            }
            gens.push(u);
            let mut frontier: Vec<Vec4> = group.iter().copied().collect();
            while let Some(h) = frontier.pop() {
                for g in &gens {
                    let y = r1.mul(&h, g);
                    if group.insert(y) {
                        frontier.push(y);
                    }
                }
            }
        }
        for j in 1..self.k {
            for i in 0..4 {
                let mut e = [0i128; 4];
                e[i] = pow(self.p, j);
                gens.push(self.add(&self.one(), &e));
            }
        }
        gens
    }

    /// Matrix of `z -> u z u^{-1}` acting on coordinate columns.
    pub fn conjugation_matrix(&self, u: &Vec4) -> [[i128; 4]; 4] {
        let ui = self.inverse(u).expect("unit");
        let mut m = [[0i128; 4]; 4];
        for j in 0..4 {
            let mut e = [0i128; 4];
            e[j] = 1;
            let c = self.mul(&self.mul(u, &e), &ui);
            for i in 0..4 {
                m[i][j] = c[i];
            }
        }
        m
    }

    /// Matrix of `z -> z x - x z` acting on coordinate columns.
    pub fn commutator_matrix(&self, x: &Vec4) -> [[i128; 4]; 4] {
        let mut m = [[0i128; 4]; 4];
        for j in 0..4 {
            let mut e = [0i128; 4];
            e[j] = 1;
            let c = self.sub(&self.mul(&e, x), &self.mul(x, &e));
            for i in 0..4 {
                m[i][j] = c[i];
            }
        }
        m
    }

    /// Additive generators of the centralizer of `x` in `O / p^k O`.
    pub fn centralizer_basis(&self, x: &Vec4) -> Vec<Vec4> {
        let (divs, v) = snf_mod(&self.commutator_matrix(x), self.p, self.k);
        (0..4)
            .map(|i| {
                let e = divs[i].map_or(self.k, |e| e.min(self.k));
                let scale = pow(self.p, self.k - e);
                std::array::from_fn(|r| modp(v[r][i] * scale, self.modulus))
            })
            .collect()
    }

    /// Number of units of `O / p^k O` commuting with `x`.
    pub fn centralizer_units(&self, x: &Vec4) -> i128 {
        let m = self.commutator_matrix(x);
        let (divs, v) = snf_mod(&m, self.p, self.k);
        let mut size = 1i128;
        let mut w_basis: Vec<Vec4> = Vec::new();
        for (i, d) in divs.iter().enumerate() {
            let e = d.map_or(self.k, |e| e.min(self.k));
            size *= pow(self.p, e);
            if e == self.k {
                w_basis.push(std::array::from_fn(|r| modp(v[r][i], self.p as i128)));
            }
        }
        let r = w_basis.len() as u32;
        let p = self.p as i128;
        let mut unit_count = 0i128;
        for n in 0..pow(self.p, r) {
            let mut w = [0i128; 4];
            let mut t = n;
            for b in &w_basis {
                let c = t % p;
                t /= p;
                for l in 0..4 {
                    w[l] += c * b[l];
                }
            }
            if self.is_unit(&w) {
                unit_count += 1;
            }
        }
        size / pow(self.p, r) * unit_count
    }
}

/// Smith form of a square matrix over `Z / p^k`: the valuations of the diagonal
/// entries (`None` for zero) and the column transform `V` with `U M V = D`.
pub fn snf_mod(m: &[[i128; 4]; 4], p: u64, k: u32) -> ([Option<u32>; 4], [[i128; 4]; 4]) {
    let (divs, v, _) = smith(m, [0; 4], p, k);
    (divs, v)
}

/// A solution of `M u = c` over `Z / p^k`, if one exists.
pub fn solve_mod(m: &[[i128; 4]; 4], c: Vec4, p: u64, k: u32) -> Option<Vec4> {
    let md = pow(p, k);
    let (divs, v, c) = smith(m, c, p, k);
    let mut w = [0i128; 4];
    for t in 0..4 {
        match divs[t] {
            Some(e) if c[t] % pow(p, e) == 0 => w[t] = c[t] / pow(p, e),
            None if c[t] == 0 => {}
            _ => return None,
        }
    }
    Some(std::array::from_fn(|r| modp((0..4).map(|l| v[r][l] * w[l]).sum(), md)))
}

/// Smith reduction carrying a right-hand side through the row operations.
fn smith(m: &[[i128; 4]; 4], c: Vec4, p: u64, k: u32) -> ([Option<u32>; 4], [[i128; 4]; 4], Vec4) {
    let md = pow(p, k);
    let mut c = c.map(|x| modp(x, md));
    let mut a = m.map(|r| r.map(|x| modp(x, md)));
    let mut v = [[0i128; 4]; 4];
    for i in 0..4 {
        v[i][i] = 1;
    }
    let mut divs = [None; 4];
    for t in 0..4 {
        let mut best: Option<(u32, usize, usize)> = None;
        for i in t..4 {
            for j in t..4 {
                if a[i][j] != 0 {
                    let e = val(a[i][j], p);
                    if best.map_or(true, |b| e < b.0) {
                        best = Some((e, i, j));
                    }
                }
            }
        }
        let Some((e, bi, bj)) = best else { break };
        a.swap(t, bi);
        c.swap(t, bi);
        for r in 0..4 {
            a[r].swap(t, bj);
            v[r].swap(t, bj);
        }
        // normalize pivot to p^e by scaling column t with a unit
        let u = a[t][t] / pow(p, e);
        let uinv = modinv(modp(u, md), md).expect("unit");
        for r in 0..4 {
            a[r][t] = modp(a[r][t] * uinv, md);
            v[r][t] = modp(v[r][t] * uinv, md);
        }
        let pe = pow(p, e);
        for i in t + 1..4 {
            let f = a[i][t] / pe;
            for j in t..4 {
                a[i][j] = modp(a[i][j] - f * a[t][j], md);
            }
            c[i] = modp(c[i] - f * c[t], md);
        }
        for j in t + 1..4 {
            let f = a[t][j] / pe;
            for r in 0..4 {
                a[r][j] = modp(a[r][j] - f * a[r][t], md);
                v[r][j] = modp(v[r][j] - f * v[r][t], md);
            }
        }
        divs[t] = Some(e);
    }
    (divs, v, c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::RatQuatAlgebra;

    #[test]
    fn centralizer_units_match_enumeration() {
        let alg = Arc::new(RatQuatAlgebra::new(-1, -3));
        let o = Arc::new(QuatOrder::standard(alg));
        for (p, k) in [(2u64, 2u32), (3, 1), (3, 2)] {
            let r = ResidueAlgebra::new(o.clone(), p, k);
            let m = r.modulus;
            for x in [[0, 1, 0, 0], [1, 1, 1, 0], [0, 2, 0, 1], [3, 0, 0, 0]] {
                let x = r.reduce(&x);
                let mut brute = 0i128;
                for n in 0..m.pow(4) {
                    let z: Vec4 = std::array::from_fn(|i| (n / m.pow(i as u32)) % m);
                    if r.is_unit(&z) && r.mul(&z, &x) == r.mul(&x, &z) {
                        brute += 1;
                    }
                }
                assert_eq!(r.centralizer_units(&x), brute, "p={p} k={k} x={x:?}");
            }
        }
    }
}
