use num_traits::{Signed, Zero};

use crate::numthy::Rat;
use crate::quat::{lattice_nrd, lattice_product, QuatLattice, QuatOrder, RatQuatAlgebra, RightIdeal};
use crate::{Error, Result};

/// A lattice vector found by enumeration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShortVector {
    pub coords: [i128; 4],
    pub elem: [Rat; 4],
    pub nrd: Rat,
}

/// `nrd` as a quadratic form in the lattice basis, `Q(x) = sum q_i (x_i + sum_{j>i} mu_ij x_j)^2`.
struct Cholesky {
    q: [Rat; 4],
    mu: [[Rat; 4]; 4],
}

fn gram(alg: &RatQuatAlgebra, basis: &[[Rat; 4]; 4]) -> [[Rat; 4]; 4] {
    let half = Rat::new(1, 2);
    std::array::from_fn(|i| {
        std::array::from_fn(|j| if i == j { alg.nrd(&basis[i]) } else { alg.trd_pair(&basis[i], &basis[j]) * half })
    })
}

fn cholesky(g: &[[Rat; 4]; 4]) -> Cholesky {
    let mut q = [Rat::zero(); 4];
    let mut mu = [[Rat::zero(); 4]; 4];
    for i in 0..4 {
        q[i] = g[i][i] - (0..i).map(|k| mu[k][i] * mu[k][i] * q[k]).sum::<Rat>();
        for j in i + 1..4 {
            mu[i][j] = (g[i][j] - (0..i).map(|k| mu[k][i] * mu[k][j] * q[k]).sum::<Rat>()) / q[i];
        }
    }
    Cholesky { q, mu }
}

/// All nonzero vectors of `lat` with `nrd <= bound`, both signs included.
///
/// Exact Fincke-Pohst: at each level the admissible integers form an interval
/// around the center, found by walking outward from it.
pub fn short_vectors(alg: &RatQuatAlgebra, lat: &QuatLattice, bound: Rat) -> Result<Vec<ShortVector>> {
    if !alg.is_definite() {
        return Err(Error::IndefiniteAlgebra);
    }
    let mut out = Vec::new();
    if !bound.is_positive() {
        return Ok(out);
    }
    let basis = lat.basis();
    let ch = cholesky(&gram(alg, &basis));
    let mut x = [0i128; 4];
    descend(&ch, 3, bound, &mut x, &mut |c| {
        if c.iter().any(|&v| v != 0) {
            let elem = lat.element(c);
            out.push(ShortVector { coords: *c, nrd: alg.nrd(&elem), elem });
        }
    });
    Ok(out)
}

fn descend(ch: &Cholesky, i: usize, rest: Rat, x: &mut [i128; 4], visit: &mut dyn FnMut(&[i128; 4])) {
    let center: Rat = -(i + 1..4).map(|j| ch.mu[i][j] * Rat::from_integer(x[j])).sum::<Rat>();
    let mut try_value = |v: i128, x: &mut [i128; 4]| {
        let d = Rat::from_integer(v) - center;
        let c = ch.q[i] * d * d;
        if c > rest {
            return false;
        }
        x[i] = v;
        if i == 0 {
            visit(x);
        } else {
            descend(ch, i - 1, rest - c, x, visit);
        }
        true
    };
    let start = center.floor().to_integer();
    let mut v = start;
    while try_value(v, x) {
        v -= 1;
    }
    let mut v = start + 1;
    while try_value(v, x) {
        v += 1;
    }
    x[i] = 0;
}

/// A vector of minimal reduced norm.
pub fn shortest_vector(alg: &RatQuatAlgebra, lat: &QuatLattice) -> Result<ShortVector> {
    let mut bound = lattice_nrd(alg, lat);
    loop {
        let vs = short_vectors(alg, lat, bound)?;
        if let Some(v) = vs.into_iter().min_by(|a, b| a.nrd.cmp(&b.nrd).then(a.coords.cmp(&b.coords))) {
            return Ok(v);
        }
        bound = bound * Rat::from_integer(2);
    }
}

/// An element `x` of `lat` with `nrd(x) = nrd(lat)`; for an invertible lattice
/// this is exactly a generator as a one-sided ideal of its right (or left) order.
pub fn principal_generator(alg: &RatQuatAlgebra, lat: &QuatLattice) -> Result<Option<[Rat; 4]>> {
    let n = lattice_nrd(alg, lat);
    Ok(short_vectors(alg, lat, n)?
        .into_iter()
        .filter(|v| v.nrd == n)
        .min_by(|a, b| a.coords.cmp(&b.coords))
        .map(|v| v.elem))
}

/// `O^x`: the elements of reduced norm 1, closed under multiplication.
#[derive(Debug, Clone)]
pub struct UnitGroup {
    pub elements: Vec<[Rat; 4]>,
}

impl UnitGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// `u^{-1} x u` for every unit.
    pub fn conjugates(&self, alg: &RatQuatAlgebra, x: &[Rat; 4]) -> Vec<[Rat; 4]> {
        self.elements
            .iter()
            .map(|u| alg.mul(&alg.mul(&crate::quat::conj(u), x), u))
            .collect()
    }
}

pub fn unit_group(order: &QuatOrder) -> Result<UnitGroup> {
    let one = Rat::from_integer(1);
    let mut elements: Vec<[Rat; 4]> =
        short_vectors(&order.alg, &order.lat, one)?.into_iter().filter(|v| v.nrd == one).map(|v| v.elem).collect();
    elements.sort();
    Ok(UnitGroup { elements })
}

/// A generator `x` with `I = x O`, if `I` is principal.
pub fn is_principal(ideal: &RightIdeal) -> Result<Option<[Rat; 4]>> {
    principal_generator(&ideal.order.alg, &ideal.lat)
}

/// `J = x I` for some `x`: tested on `J conj(I)`, which is then `x Nr(I) O_l(I)`.
pub fn ideals_equivalent(i: &RightIdeal, j: &RightIdeal) -> Result<bool> {
    let alg = &i.order.alg;
    let l = lattice_product(alg, &j.lat, &i.conjugate());
    Ok(principal_generator(alg, &l)?.is_some())
}
