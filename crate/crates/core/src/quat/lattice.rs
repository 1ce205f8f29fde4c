use num_traits::{One, Zero};

use crate::numthy::{gcd, lcm, rat, Rat};

/// A full-rank Z-lattice in Q^4 (coordinates w.r.t. `1, i, j, k`).
///
/// Stored as an integral 4x4 matrix in row Hermite normal form together with a
/// single positive denominator; the basis vectors are `rows[r] / den`. The form
/// is canonical, so two lattices are equal iff their representations are.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuatLattice {
    pub den: i128,
    pub rows: [[i128; 4]; 4],
}

/// Row Hermite normal form of the span of integer vectors.
///
/// Returns `None` when the span has rank < 4. Pivots are positive, entries below
/// the diagonal vanish and entries above a pivot lie in `[0, pivot)`.
pub fn hnf(gens: &[[i128; 4]]) -> Option<[[i128; 4]; 4]> {
    let mut rows: Vec<[i128; 4]> = gens.iter().copied().filter(|r| r.iter().any(|&x| x != 0)).collect();
    let mut out = [[0i128; 4]; 4];
    for col in 0..4 {
        loop {
            let mut best: Option<usize> = None;
            for (idx, r) in rows.iter().enumerate() {
                if r[col] != 0 && best.map_or(true, |b| r[col].abs() < rows[b][col].abs()) {
                    best = Some(idx);
                }
            }
            let b = best?;
            let piv = rows[b];
            let mut done = true;
            for (idx, r) in rows.iter_mut().enumerate() {
                if idx == b || r[col] == 0 {
                    continue;
                }
                let q = r[col].div_euclid(piv[col]);
                for c in col..4 {
                    r[c] -= q * piv[c];
                }
                if r[col] != 0 {
                    done = false;
                }
            }
            if done {
                let mut p = rows.swap_remove(b);
                if p[col] < 0 {
                    p = p.map(|x| -x);
                }
                out[col] = p;
                rows.retain(|r| r.iter().any(|&x| x != 0));
                break;
            }
        }
    }
    for i in 0..4 {
        let piv = out[i][i];
        for k in 0..i {
            let q = out[k][i].div_euclid(piv);
            if q != 0 {
                let ri = out[i];
                for c in i..4 {
                    out[k][c] -= q * ri[c];
                }
            }
        }
    }
    Some(out)
}

fn common_den(xs: &[[Rat; 4]]) -> i128 {
    xs.iter().flat_map(|r| r.iter()).fold(1i128, |acc, x| lcm(acc, *x.denom()))
}

/// Inverse of a rational 4x4 matrix by Gauss-Jordan elimination.
pub fn inverse4(m: &[[Rat; 4]; 4]) -> Option<[[Rat; 4]; 4]> {
    let mut a = *m;
    let mut inv = [[Rat::zero(); 4]; 4];
    for (i, row) in inv.iter_mut().enumerate() {
        row[i] = Rat::one();
    }
    for c in 0..4 {
        let p = (c..4).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, p);
        inv.swap(c, p);
        let s = a[c][c].recip();
        for j in 0..4 {
            a[c][j] *= s;
            inv[c][j] *= s;
        }
        for r in 0..4 {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c];
                for j in 0..4 {
                    let (ac, ic) = (a[c][j], inv[c][j]);
                    a[r][j] -= f * ac;
                    inv[r][j] -= f * ic;
                }
            }
        }
    }
    Some(inv)
}

impl QuatLattice {
    /// The lattice spanned by rational vectors; `None` if the rank is < 4.
    pub fn from_generators(gens: &[[Rat; 4]]) -> Option<Self> {
        let d = common_den(gens);
        let ints: Vec<[i128; 4]> = gens
            .iter()
            .map(|g| g.map(|x| (x * rat(d)).to_integer()))
            .collect();
        let rows = hnf(&ints)?;
        Some(Self::normalized(d, rows))
    }

    pub fn from_int_rows(den: i128, rows: &[[i128; 4]]) -> Option<Self> {
        Some(Self::normalized(den, hnf(rows)?))
    }

    fn normalized(den: i128, mut rows: [[i128; 4]; 4]) -> Self {
        let g = rows.iter().flat_map(|r| r.iter()).fold(den, |acc, &x| gcd(acc, x));
        let den = den / g;
        for r in rows.iter_mut() {
            for x in r.iter_mut() {
                *x /= g;
            }
        }
        QuatLattice { den, rows }
    }

    pub fn standard() -> Self {
        let mut rows = [[0i128; 4]; 4];
        for (i, r) in rows.iter_mut().enumerate() {
            r[i] = 1;
        }
        QuatLattice { den: 1, rows }
    }

    pub fn basis(&self) -> [[Rat; 4]; 4] {
        self.rows.map(|r| r.map(|x| Rat::new(x, self.den)))
    }

    /// Integer coordinates of `x` in the basis, if `x` lies in the lattice.
    pub fn coords(&self, x: &[Rat; 4]) -> Option<[i128; 4]> {
        let mut v: [Rat; 4] = x.map(|c| c * rat(self.den));
        let mut out = [0i128; 4];
        for i in 0..4 {
            let q = v[i] / rat(self.rows[i][i]);
            if !q.is_integer() {
                return None;
            }
            let q = q.to_integer();
            out[i] = q;
            for c in i..4 {
                v[c] -= rat(q * self.rows[i][c]);
            }
        }
        Some(out)
    }

    /// Rational coordinates of `x` in the basis.
    pub fn rat_coords(&self, x: &[Rat; 4]) -> [Rat; 4] {
        let mut v: [Rat; 4] = x.map(|c| c * rat(self.den));
        let mut out = [Rat::zero(); 4];
        for i in 0..4 {
            let q = v[i] / rat(self.rows[i][i]);
            out[i] = q;
            for c in i..4 {
                v[c] -= q * rat(self.rows[i][c]);
            }
        }
        out
    }

    pub fn contains(&self, x: &[Rat; 4]) -> bool {
        self.coords(x).is_some()
    }

    pub fn contains_lattice(&self, other: &QuatLattice) -> bool {
        other.basis().iter().all(|b| self.contains(b))
    }

    pub fn element(&self, c: &[i128; 4]) -> [Rat; 4] {
        let mut v = [0i128; 4];
        for i in 0..4 {
            for j in 0..4 {
                v[j] += c[i] * self.rows[i][j];
            }
        }
        v.map(|x| Rat::new(x, self.den))
    }

    /// Covolume relative to the standard lattice `Z^4`.
    pub fn covolume(&self) -> Rat {
        let d: i128 = (0..4).map(|i| self.rows[i][i]).product();
        Rat::new(d, self.den.pow(4))
    }

    /// `[other : self]` as a rational number (the generalized index).
    pub fn index_in(&self, other: &QuatLattice) -> Rat {
        self.covolume() / other.covolume()
    }

    pub fn scale(&self, r: Rat) -> Self {
        let gens: Vec<[Rat; 4]> = self.basis().iter().map(|b| b.map(|x| x * r)).collect();
        Self::from_generators(&gens).expect("nonzero scale")
    }

    pub fn sum(&self, other: &QuatLattice) -> Self {
        let mut gens = self.basis().to_vec();
        gens.extend(other.basis());
        Self::from_generators(&gens).expect("full rank")
    }

    /// Dual lattice with respect to the standard dot product.
    pub fn dual(&self) -> Self {
        let inv = inverse4(&self.basis()).expect("full rank");
        let cols: Vec<[Rat; 4]> = (0..4).map(|c| std::array::from_fn(|r| inv[r][c])).collect();
        Self::from_generators(&cols).expect("full rank")
    }

    pub fn intersect(&self, other: &QuatLattice) -> Self {
        self.dual().sum(&other.dual()).dual()
    }
}
