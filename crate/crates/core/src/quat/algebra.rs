use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Neg, Sub};

use crate::numthy::{hilbert_symbol_int, prime_divisors, rat, squarefree_part, Place, Rat};
use crate::{Error, Result};

/// The quaternion algebra `(a, b | Q)` with `i^2 = a`, `j^2 = b`, `k = ij = -ji`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RatQuatAlgebra {
    pub a: i128,
    pub b: i128,
    /// Ramified places, sorted; always of even cardinality.
    pub ram: Vec<Place>,
}

/// Builds `(a, b | Q)`.
///
/// Non-integral parameters are scaled by squares of their denominators, which
/// gives an isomorphic algebra with integral structure constants.
pub fn make_algebra(a: Rat, b: Rat) -> Result<RatQuatAlgebra> {
    if a.numer() == &0 || b.numer() == &0 {
        return Err(Error::InvalidInput("quaternion parameters must be nonzero".into()));
    }
    let a = *a.numer() * *a.denom();
    let b = *b.numer() * *b.denom();
    Ok(RatQuatAlgebra::new(a, b))
}

impl RatQuatAlgebra {
    pub fn new(a: i128, b: i128) -> Self {
        assert!(a != 0 && b != 0);
        let mut ram = Vec::new();
        let sa = squarefree_part(a);
        let sb = squarefree_part(b);
        let mut ps = prime_divisors(2 * sa * sb);
        ps.sort();
        for p in ps {
            if hilbert_symbol_int(sa, sb, Place::Prime(p)) == -1 {
                ram.push(Place::Prime(p));
            }
        }
        if hilbert_symbol_int(sa, sb, Place::Inf) == -1 {
            ram.push(Place::Inf);
        }
        debug_assert!(ram.len() % 2 == 0);
        RatQuatAlgebra { a, b, ram }
    }

    pub fn is_definite(&self) -> bool {
        self.ram.contains(&Place::Inf)
    }

    pub fn is_ramified(&self, p: u64) -> bool {
        self.ram.contains(&Place::Prime(p))
    }

    /// Product of the finite ramified primes.
    pub fn disc(&self) -> i128 {
        self.ram
            .iter()
            .filter_map(|pl| match pl {
                Place::Prime(p) => Some(*p as i128),
                Place::Inf => None,
            })
            .product()
    }

    pub fn ram_primes(&self) -> Vec<u64> {
        self.ram
            .iter()
            .filter_map(|pl| match pl {
                Place::Prime(p) => Some(*p),
                Place::Inf => None,
            })
            .collect()
    }

    pub fn mul<T: Scalar>(&self, x: &[T; 4], y: &[T; 4]) -> [T; 4] {
        mul_coords(T::from_i128(self.a), T::from_i128(self.b), x, y)
    }

    pub fn nrd<T: Scalar>(&self, x: &[T; 4]) -> T {
        let (a, b) = (T::from_i128(self.a), T::from_i128(self.b));
        x[0] * x[0] - a * x[1] * x[1] - b * x[2] * x[2] + a * b * x[3] * x[3]
    }

    pub fn trd<T: Scalar>(&self, x: &[T; 4]) -> T {
        x[0] + x[0]
    }

    pub fn elem(&self, c: [i128; 4]) -> QuatElement {
        QuatElement::from_ints(c)
    }

    /// `trd(x conj(y))`, the bilinear form whose quadratic form is `2 nrd`.
    pub fn trd_pair<T: Scalar>(&self, x: &[T; 4], y: &[T; 4]) -> T {
        let yc = conj(y);
        self.trd(&self.mul(x, &yc))
    }
}

/// Numeric types the quaternion product is evaluated over.
pub trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn from_i128(v: i128) -> Self;
}

impl Scalar for i128 {
    fn from_i128(v: i128) -> Self {
        v
    }
}

impl Scalar for i64 {
    fn from_i128(v: i128) -> Self {
        v as i64
    }
}

impl Scalar for Rat {
    fn from_i128(v: i128) -> Self {
        rat(v)
    }
}

pub fn mul_coords<T: Scalar>(a: T, b: T, x: &[T; 4], y: &[T; 4]) -> [T; 4] {
    let ab = a * b;
    [
        x[0] * y[0] + a * x[1] * y[1] + b * x[2] * y[2] - ab * x[3] * y[3],
        x[0] * y[1] + x[1] * y[0] - b * x[2] * y[3] + b * x[3] * y[2],
        x[0] * y[2] + x[2] * y[0] + a * x[1] * y[3] - a * x[3] * y[1],
        x[0] * y[3] + x[3] * y[0] + x[1] * y[2] - x[2] * y[1],
    ]
}

pub fn conj<T: Scalar>(x: &[T; 4]) -> [T; 4] {
    [x[0], -x[1], -x[2], -x[3]]
}

/// An element `x0 + x1 i + x2 j + x3 k` with rational coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuatElement {
    pub c: [Rat; 4],
}

impl QuatElement {
    pub fn new(c: [Rat; 4]) -> Self {
        QuatElement { c }
    }

    pub fn from_ints(c: [i128; 4]) -> Self {
        QuatElement { c: c.map(rat) }
    }

    pub fn one() -> Self {
        Self::from_ints([1, 0, 0, 0])
    }

    pub fn scalar(r: Rat) -> Self {
        QuatElement { c: [r, rat(0), rat(0), rat(0)] }
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.numer() == &0)
    }

    pub fn conj(&self) -> Self {
        QuatElement { c: conj(&self.c) }
    }

    pub fn add(&self, o: &Self) -> Self {
        QuatElement { c: std::array::from_fn(|i| self.c[i] + o.c[i]) }
    }

    pub fn sub(&self, o: &Self) -> Self {
        QuatElement { c: std::array::from_fn(|i| self.c[i] - o.c[i]) }
    }

    pub fn scale(&self, r: Rat) -> Self {
        QuatElement { c: self.c.map(|x| x * r) }
    }

    pub fn mul(&self, alg: &RatQuatAlgebra, o: &Self) -> Self {
        QuatElement { c: alg.mul(&self.c, &o.c) }
    }

    pub fn nrd(&self, alg: &RatQuatAlgebra) -> Rat {
        alg.nrd(&self.c)
    }

    pub fn trd(&self, alg: &RatQuatAlgebra) -> Rat {
        alg.trd(&self.c)
    }

    pub fn inverse(&self, alg: &RatQuatAlgebra) -> Option<Self> {
        let n = self.nrd(alg);
        (n.numer() != &0).then(|| self.conj().scale(n.recip()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numthy::ratio;

    #[test]
    fn ramification_examples() {
        let h = make_algebra(rat(-1), rat(-1)).unwrap();
        assert_eq!(h.ram, vec![Place::Prime(2), Place::Inf]);
        let d11 = make_algebra(rat(-1), rat(-11)).unwrap();
        assert_eq!(d11.ram, vec![Place::Prime(11), Place::Inf]);
        assert!(make_algebra(rat(1), rat(1)).unwrap().ram.is_empty());
        assert!(make_algebra(rat(0), rat(1)).is_err());
        let r = make_algebra(ratio(-1, 2), rat(-1)).unwrap();
        assert_eq!(r.ram, vec![Place::Prime(2), Place::Inf]);
    }

    #[test]
    fn multiplication_table() {
        let alg = RatQuatAlgebra::new(-2, -5);
        let i = [0i128, 1, 0, 0];
        let j = [0i128, 0, 1, 0];
        let k = alg.mul(&i, &j);
        assert_eq!(k, [0, 0, 0, 1]);
        assert_eq!(alg.mul(&j, &i), [0, 0, 0, -1]);
        assert_eq!(alg.mul(&k, &k), [-10, 0, 0, 0]);
        let x = [3i128, -1, 2, 5];
        let y = [1i128, 4, -2, 1];
        let xy = alg.mul(&x, &y);
        assert_eq!(alg.nrd(&xy), alg.nrd(&x) * alg.nrd(&y));
        assert_eq!(alg.mul(&x, &conj(&x)), [alg.nrd(&x), 0, 0, 0]);
        // associativity on a sample
        let z = [2i128, 0, -3, 1];
        assert_eq!(alg.mul(&alg.mul(&x, &y), &z), alg.mul(&x, &alg.mul(&y, &z)));
    }
}
