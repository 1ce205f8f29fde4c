//! Linear algebra over F_p on 4-dimensional coordinate space.

use crate::numthy::{modinv, modp};

use super::residue::Vec4;

/// A subspace of F_p^4 kept in reduced row echelon form.
#[derive(Debug, Clone)]
pub struct Subspace {
    p: i128,
    rows: Vec<(usize, Vec4)>,
}

impl Subspace {
    pub fn zero(p: u64) -> Self {
        Subspace { p: p as i128, rows: Vec::new() }
    }

    pub fn spanned_by(p: u64, vecs: impl IntoIterator<Item = Vec4>) -> Self {
        let mut s = Self::zero(p);
        for v in vecs {
            s.insert(v);
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Reduce `v` against the echelon rows.
    pub fn reduce(&self, v: &Vec4) -> Vec4 {
        let mut v = v.map(|c| modp(c, self.p));
        for (piv, r) in &self.rows {
            let f = v[*piv];
            if f != 0 {
                for j in 0..4 {
                    v[j] = modp(v[j] - f * r[j], self.p);
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &Vec4) -> bool {
        self.reduce(v).iter().all(|&c| c == 0)
    }

    /// Adds `v`; returns false when it was already in the span.
    pub fn insert(&mut self, v: Vec4) -> bool {
        let mut v = self.reduce(&v);
        let Some(piv) = (0..4).find(|&j| v[j] != 0) else { return false };
        let inv = modinv(v[piv], self.p).expect("field");
        v = v.map(|c| modp(c * inv, self.p));
        for (_, r) in self.rows.iter_mut() {
            let f = r[piv];
            if f != 0 {
                for j in 0..4 {
                    r[j] = modp(r[j] - f * v[j], self.p);
                }
            }
        }
        self.rows.push((piv, v));
        self.rows.sort_by_key(|(p, _)| *p);
        true
    }

    pub fn basis(&self) -> Vec<Vec4> {
        self.rows.iter().map(|(_, r)| *r).collect()
    }
}

/// Kernel of `v -> (sum_j m[i][j] v_j)_i` over F_p, for an `n x 4` matrix.
pub fn kernel(m: &[Vec4], p: u64) -> Subspace {
    let pi = p as i128;
    // columns of m as a 4 x n system; solve by echelon on rows of m
    let row_space = Subspace::spanned_by(p, m.iter().copied());
    let pivots: Vec<usize> = row_space.rows.iter().map(|(c, _)| *c).collect();
    let free: Vec<usize> = (0..4).filter(|c| !pivots.contains(c)).collect();
    let mut out = Subspace::zero(p);
    for &f in &free {
        let mut v = [0i128; 4];
        v[f] = 1;
        for (piv, r) in &row_space.rows {
            v[*piv] = modp(-r[f], pi);
        }
        out.insert(v);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_of_rank_two() {
        let m = [[1, 2, 0, 1], [0, 1, 1, 0], [1, 3, 1, 1]];
        let k = kernel(&m, 5);
        assert_eq!(k.dim(), 2);
        for v in k.basis() {
            for r in &m {
                let s: i128 = (0..4).map(|j| r[j] * v[j]).sum();
                assert_eq!(s % 5, 0);
            }
        }
    }
}
