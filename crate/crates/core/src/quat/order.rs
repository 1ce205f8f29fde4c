use std::sync::Arc;

use num_traits::Zero;

use super::algebra::{conj, RatQuatAlgebra};
use super::lattice::QuatLattice;
use crate::numthy::{gcd, isqrt, lcm, pow, prime_divisors, rat, val, Rat};
use crate::{Error, Result};

/// An order of full rank in `(a, b | Q)`, with its multiplication table and the
/// reduced norm and trace written as integral forms in the lattice basis.
#[derive(Debug, Clone)]
pub struct QuatOrder {
    pub alg: Arc<RatQuatAlgebra>,
    pub lat: QuatLattice,
    /// Reduced discriminant d(O).
    pub disc: i128,
    basis: [[Rat; 4]; 4],
    /// `e_i e_j = sum_l mult[i][j][l] e_l`.
    pub mult: [[[i128; 4]; 4]; 4],
    /// Coordinates of 1.
    pub one: [i128; 4],
    /// `trd(sum y_i e_i) = sum trd_lin[i] y_i`.
    pub trd_lin: [i128; 4],
    /// `nrd(y) = sum_{i <= j} nrd_q[i][j] y_i y_j`.
    pub nrd_q: [[i128; 4]; 4],
    /// `conj(e_i) = sum_l conj_mat[i][l] e_l`.
    pub conj_mat: [[i128; 4]; 4],
}

impl PartialEq for QuatOrder {
    fn eq(&self, other: &Self) -> bool {
        self.alg == other.alg && self.lat == other.lat
    }
}
impl Eq for QuatOrder {}

fn gram_det(alg: &RatQuatAlgebra, basis: &[[Rat; 4]; 4]) -> Rat {
    // trd(x conj y) = 2 (x0 y0 - a x1 y1 - b x2 y2 + ab x3 y3) is diagonal in 1,i,j,k
    let d = rat(16 * alg.a * alg.a * alg.b * alg.b);
    let det_b = {
        let m: Vec<Vec<Rat>> = basis.iter().map(|r| r.to_vec()).collect();
        det_rat(&m)
    };
    d * det_b * det_b
}

fn det_rat(m: &[Vec<Rat>]) -> Rat {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = rat(1);
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return rat(0);
        };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= a[c][c];
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for j in c..n {
                let v = a[c][j];
                a[r][j] -= f * v;
            }
        }
    }
    det
}

/// Validates that `lat` is an order of `alg` and returns it.
pub fn order_closure_check(alg: Arc<RatQuatAlgebra>, lat: QuatLattice) -> Result<QuatOrder> {
    let basis = lat.basis();
    let one = lat.coords(&[rat(1), rat(0), rat(0), rat(0)]).ok_or(Error::NoUnity)?;
    let mut mult = [[[0i128; 4]; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let p = alg.mul(&basis[i], &basis[j]);
            mult[i][j] = lat.coords(&p).ok_or(Error::NotARing(i, j))?;
        }
    }
    let g = gram_det(&alg, &basis);
    if !g.is_integer() {
        return Err(Error::NotARing(0, 0));
    }
    let g = g.to_integer().abs();
    let disc = isqrt(g);
    if disc * disc != g {
        return Err(Error::InvalidInput("gram determinant is not a square".into()));
    }
    let trd_lin = basis.map(|b| alg.trd(&b).to_integer());
    let mut nrd_q = [[0i128; 4]; 4];
    for i in 0..4 {
        nrd_q[i][i] = alg.nrd(&basis[i]).to_integer();
        for j in i + 1..4 {
            nrd_q[i][j] = alg.trd_pair(&basis[i], &basis[j]).to_integer();
        }
    }
    let conj_mat = basis.map(|b| lat.coords(&conj(&b)).expect("orders are closed under conjugation"));
    Ok(QuatOrder { alg, lat, disc, basis, mult, one, trd_lin, nrd_q, conj_mat })
}

/// Integrality of a lattice under the trace form: `trd(xy)` and `nrd(x)` integral.
fn is_integral_lattice(alg: &RatQuatAlgebra, lat: &QuatLattice) -> bool {
    let b = lat.basis();
    for i in 0..4 {
        if !alg.nrd(&b[i]).is_integer() || !alg.trd(&b[i]).is_integer() {
            return false;
        }
        for j in 0..4 {
            if !alg.trd(&alg.mul(&b[i], &b[j])).is_integer() {
                return false;
            }
        }
    }
    true
}

/// The ring generated by `gens` together with 1, if it is an order.
pub fn generate_order(alg: Arc<RatQuatAlgebra>, gens: &[[Rat; 4]]) -> Result<QuatOrder> {
    let mut all = gens.to_vec();
    all.push([rat(1), rat(0), rat(0), rat(0)]);
    let mut lat = QuatLattice::from_generators(&all)
        .ok_or_else(|| Error::InvalidInput("generators do not span a full-rank lattice".into()))?;
    loop {
        if !is_integral_lattice(&alg, &lat) {
            return Err(Error::InvalidInput("generated ring is not integral".into()));
        }
        let b = lat.basis();
        let mut g = b.to_vec();
        for x in &b {
            for y in &b {
                g.push(alg.mul(x, y));
            }
        }
        let next = QuatLattice::from_generators(&g).expect("full rank");
        if next == lat {
            return order_closure_check(alg, lat);
        }
        lat = next;
    }
}

impl QuatOrder {
    pub fn basis(&self) -> &[[Rat; 4]; 4] {
        &self.basis
    }

    /// The order `Z<1, i, j, k>`.
    pub fn standard(alg: Arc<RatQuatAlgebra>) -> QuatOrder {
        order_closure_check(alg, QuatLattice::standard()).expect("standard order")
    }

    pub fn elem(&self, c: &[i128; 4]) -> [Rat; 4] {
        self.lat.element(c)
    }

    pub fn coords(&self, x: &[Rat; 4]) -> Option<[i128; 4]> {
        self.lat.coords(x)
    }

    pub fn contains(&self, x: &[Rat; 4]) -> bool {
        self.lat.contains(x)
    }

    /// Product of two elements given by integer coordinates.
    pub fn mul_int(&self, y: &[i128; 4], z: &[i128; 4]) -> [i128; 4] {
        let mut out = [0i128; 4];
        for i in 0..4 {
            if y[i] == 0 {
                continue;
            }
            for j in 0..4 {
                let c = y[i] * z[j];
                if c == 0 {
                    continue;
                }
                for l in 0..4 {
                    out[l] += c * self.mult[i][j][l];
                }
            }
        }
        out
    }

    pub fn nrd_int(&self, y: &[i128; 4]) -> i128 {
        let mut s = 0;
        for i in 0..4 {
            for j in i..4 {
                s += self.nrd_q[i][j] * y[i] * y[j];
            }
        }
        s
    }

    pub fn trd_int(&self, y: &[i128; 4]) -> i128 {
        (0..4).map(|i| self.trd_lin[i] * y[i]).sum()
    }

    pub fn conj_int(&self, y: &[i128; 4]) -> [i128; 4] {
        let mut out = [0i128; 4];
        for i in 0..4 {
            for l in 0..4 {
                out[l] += y[i] * self.conj_mat[i][l];
            }
        }
        out
    }

    /// `x O x^{-1}` for an invertible `x`.
    pub fn conjugate_by(&self, x: &[Rat; 4]) -> Result<QuatOrder> {
        let n = self.alg.nrd(x);
        if n.is_zero() {
            return Err(Error::InvalidInput("conjugating element is not invertible".into()));
        }
        let xinv = conj(x).map(|c| c / n);
        let gens: Vec<[Rat; 4]> = self
            .basis
            .iter()
            .map(|b| self.alg.mul(&self.alg.mul(x, b), &xinv))
            .collect();
        let lat = QuatLattice::from_generators(&gens).expect("full rank");
        order_closure_check(self.alg.clone(), lat)
    }

    /// A maximal order containing `self`, found by saturating one prime at a time.
    pub fn maximal_overorder(&self) -> QuatOrder {
        let mut o = self.clone();
        for p in prime_divisors(self.disc) {
            let target = if self.alg.is_ramified(p) { 1 } else { 0 };
            'outer: while val(o.disc, p) > target {
                let pi = p as i128;
                for c in residue_vectors(p) {
                    if c.iter().all(|&x| x == 0) {
                        continue;
                    }
                    if o.trd_int(&c) % pi != 0 || o.nrd_int(&c) % (pi * pi) != 0 {
                        continue;
                    }
                    let x = o.elem(&c).map(|v| v / rat(pi));
                    let mut gens = o.basis.to_vec();
                    gens.push(x);
                    if let Ok(bigger) = generate_order(o.alg.clone(), &gens) {
                        if bigger.disc < o.disc {
                            o = bigger;
                            continue 'outer;
                        }
                    }
                }
                unreachable!("order is not maximal at {p} but no overorder found");
            }
        }
        o
    }

    pub fn is_maximal(&self) -> bool {
        self.disc == self.alg.disc()
    }

    /// The order viewed as a right ideal over itself.
    pub fn unit_ideal(self: &Arc<Self>) -> RightIdeal {
        RightIdeal { lat: self.lat.clone(), order: self.clone(), nrd: rat(1) }
    }
}

/// All vectors in `{0..p-1}^4`.
pub fn residue_vectors(p: u64) -> impl Iterator<Item = [i128; 4]> {
    let p = p as i128;
    (0..p.pow(4)).map(move |mut n| {
        let mut c = [0i128; 4];
        for x in c.iter_mut() {
            *x = n % p;
            n /= p;
        }
        c
    })
}

/// Product lattice `L1 L2`.
pub fn lattice_product(alg: &RatQuatAlgebra, l1: &QuatLattice, l2: &QuatLattice) -> QuatLattice {
    let b1 = l1.basis();
    let b2 = l2.basis();
    let mut gens = Vec::with_capacity(16);
    for x in &b1 {
        for y in &b2 {
            gens.push(alg.mul(x, y));
        }
    }
    QuatLattice::from_generators(&gens).expect("product of full-rank lattices has full rank")
}

pub fn conjugate_lattice(l: &QuatLattice) -> QuatLattice {
    let gens: Vec<[Rat; 4]> = l.basis().iter().map(conj).collect();
    QuatLattice::from_generators(&gens).expect("full rank")
}

/// `{x : x L ⊆ L}` (left) or `{x : L x ⊆ L}` (right).
fn stabilizer(alg: &Arc<RatQuatAlgebra>, l: &QuatLattice, left: bool) -> Result<QuatOrder> {
    let b = l.basis();
    let std_basis: [[Rat; 4]; 4] = std::array::from_fn(|s| std::array::from_fn(|t| rat((s == t) as i128)));
    let mut funcs: Vec<[Rat; 4]> = Vec::with_capacity(16);
    let coords: Vec<Vec<[Rat; 4]>> = std_basis
        .iter()
        .map(|s| {
            b.iter()
                .map(|e| {
                    let p = if left { alg.mul(s, e) } else { alg.mul(e, s) };
                    l.rat_coords(&p)
                })
                .collect()
        })
        .collect();
    for j in 0..4 {
        for t in 0..4 {
            funcs.push(std::array::from_fn(|s| coords[s][j][t]));
        }
    }
    let span = QuatLattice::from_generators(&funcs).expect("full rank");
    order_closure_check(alg.clone(), span.dual())
}

pub fn left_order_of(alg: &Arc<RatQuatAlgebra>, l: &QuatLattice) -> Result<QuatOrder> {
    stabilizer(alg, l, true)
}

pub fn right_order_of(alg: &Arc<RatQuatAlgebra>, l: &QuatLattice) -> Result<QuatOrder> {
    stabilizer(alg, l, false)
}

fn rat_gcd(xs: impl IntoIterator<Item = Rat>) -> Rat {
    let mut num = 0i128;
    let mut den = 1i128;
    for x in xs {
        if x.is_zero() {
            continue;
        }
        num = gcd(num, *x.numer());
        den = lcm(den, *x.denom());
    }
    Rat::new(num, den)
}

/// Reduced norm of a lattice: the positive generator of the Z-module spanned by
/// the reduced norms of its elements.
pub fn lattice_nrd(alg: &RatQuatAlgebra, l: &QuatLattice) -> Rat {
    let b = l.basis();
    let mut vals = Vec::new();
    for i in 0..4 {
        vals.push(alg.nrd(&b[i]));
        for j in i + 1..4 {
            vals.push(alg.trd_pair(&b[i], &b[j]));
        }
    }
    rat_gcd(vals)
}

/// A fractional right ideal of `order` (with `order` as its full right order).
#[derive(Debug, Clone)]
pub struct RightIdeal {
    pub lat: QuatLattice,
    pub order: Arc<QuatOrder>,
    pub nrd: Rat,
}

impl RightIdeal {
    /// Validates right stability and the norm/index relation `[O : I] = Nr(I)^2`.
    pub fn new(lat: QuatLattice, order: Arc<QuatOrder>) -> Result<Self> {
        let alg = &order.alg;
        let prod = lattice_product(alg, &lat, &order.lat);
        if prod != lat {
            return Err(Error::InvalidInput("lattice is not stable under the order".into()));
        }
        let nrd = lattice_nrd(alg, &lat);
        if lat.index_in(&order.lat) != nrd * nrd {
            return Err(Error::InvalidInput(
                "index does not match the reduced norm (ideal is not locally principal)".into(),
            ));
        }
        Ok(RightIdeal { lat, order, nrd })
    }

    /// A right `O`-stable lattice whose local principality is not yet known.
    pub fn stable(lat: QuatLattice, order: Arc<QuatOrder>) -> Result<Self> {
        if lattice_product(&order.alg, &lat, &order.lat) != lat {
            return Err(Error::InvalidInput("lattice is not stable under the order".into()));
        }
        let nrd = lattice_nrd(&order.alg, &lat);
        Ok(RightIdeal { lat, order, nrd })
    }

    /// `x O` for an invertible `x`.
    pub fn principal(order: &Arc<QuatOrder>, x: &[Rat; 4]) -> Result<Self> {
        let gens: Vec<[Rat; 4]> = order.basis().iter().map(|b| order.alg.mul(x, b)).collect();
        let lat = QuatLattice::from_generators(&gens)
            .ok_or_else(|| Error::InvalidInput("zero divisor generates no full lattice".into()))?;
        Self::new(lat, order.clone())
    }

    pub fn left_order(&self) -> QuatOrder {
        left_order_of(&self.order.alg, &self.lat).expect("left order of a lattice")
    }

    /// `x I`.
    pub fn left_mul(&self, x: &[Rat; 4]) -> Result<Self> {
        let alg = &self.order.alg;
        let gens: Vec<[Rat; 4]> = self.lat.basis().iter().map(|b| alg.mul(x, b)).collect();
        let lat = QuatLattice::from_generators(&gens)
            .ok_or_else(|| Error::InvalidInput("zero divisor".into()))?;
        Self::new(lat, self.order.clone())
    }

    pub fn conjugate(&self) -> QuatLattice {
        conjugate_lattice(&self.lat)
    }

    pub fn contains(&self, x: &[Rat; 4]) -> bool {
        self.lat.contains(x)
    }
}

/// Integer sqrt-free Hensel step data for building Eichler orders: a primitive
/// element of `o` whose reduced norm is divisible by `p^e`.
fn primitive_norm_divisible(o: &QuatOrder, p: u64, e: u32) -> Option<[i128; 4]> {
    let pi = p as i128;
    let mut alpha = residue_vectors(p).find(|c| {
        c.iter().any(|&x| x != 0) && o.nrd_int(c) % pi == 0
    })?;
    for k in 1..e {
        let pk = pow(p, k);
        let mut found = None;
        for beta in residue_vectors(p) {
            let cand: [i128; 4] = std::array::from_fn(|i| alpha[i] + pk * beta[i]);
            if o.nrd_int(&cand) % (pk * pi) == 0 {
                found = Some(cand);
                break;
            }
        }
        alpha = found?;
    }
    Some(alpha)
}

/// An Eichler order of level `level` in an algebra of discriminant `disc`.
///
/// Built as `O_max ∩ ⋂_{p | N} (Z + O_max alpha_p + p^e O_max)` where `alpha_p` is a
/// primitive element of `O_max` with `p^e | nrd(alpha_p)`.
pub fn eichler_order(alg: Arc<RatQuatAlgebra>, level: u64, disc: u64) -> Result<QuatOrder> {
    if alg.disc() != disc as i128 {
        return Err(Error::InvalidInput(format!(
            "algebra has discriminant {}, not {disc}",
            alg.disc()
        )));
    }
    if level == 0 {
        return Err(Error::InvalidInput("level must be positive".into()));
    }
    if gcd(level as i128, disc as i128) != 1 {
        return Err(Error::InvalidInput(format!(
            "level {level} is not coprime to the discriminant {disc}"
        )));
    }
    let omax = QuatOrder::standard(alg.clone()).maximal_overorder();
    let mut lat = omax.lat.clone();
    for (p, e) in crate::numthy::factor(level as i128) {
        let alpha = primitive_norm_divisible(&omax, p, e)
            .ok_or_else(|| Error::InvalidInput(format!("no zero divisor mod {p}")))?;
        let a = omax.elem(&alpha);
        let pe = rat(pow(p, e));
        let mut gens: Vec<[Rat; 4]> = omax.basis().iter().map(|b| alg.mul(b, &a)).collect();
        gens.extend(omax.basis().iter().map(|b| b.map(|x| x * pe)));
        gens.push([rat(1), rat(0), rat(0), rat(0)]);
        let local = QuatLattice::from_generators(&gens).expect("full rank");
        lat = lat.intersect(&local);
    }
    let o = order_closure_check(alg, lat)?;
    debug_assert_eq!(o.disc, disc as i128 * level as i128);
    Ok(o)
}
