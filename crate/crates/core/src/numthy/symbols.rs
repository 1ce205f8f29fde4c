use serde::{Deserialize, Serialize};
use std::fmt;

use super::arith::*;
use crate::{Error, Result};

/// A place of Q: a finite prime or the real place.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Place {
    Prime(u64),
    Inf,
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Prime(p) => write!(f, "{p}"),
            Place::Inf => write!(f, "INF"),
        }
    }
}

/// Legendre symbol (a/p) for an odd prime p.
pub fn legendre(a: i128, p: u64) -> i8 {
    let p = p as i128;
    let a = modp(a, p);
    if a == 0 {
        return 0;
    }
    let mut r = 1i128;
    let mut base = a;
    let mut e = (p - 1) / 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    if r == 1 {
        1
    } else {
        -1
    }
}

/// Splitting symbol (K/p) of K = Q(sqrt a): 1 split, 0 ramified, -1 inert.
/// At the real place, -1 exactly when a < 0.
pub fn kronecker_symbol(a: &Rat, place: Place) -> Result<i8> {
    if a.numer() == &0 {
        return Err(Error::InvalidInput("kronecker symbol of zero".into()));
    }
    let m = squarefree_part_rat(a);
    Ok(match place {
        Place::Inf => {
            if m < 0 {
                -1
            } else {
                1
            }
        }
        Place::Prime(2) => {
            if m == 1 {
                1
            } else {
                match modp(m, 8) {
                    1 => 1,
                    5 => -1,
                    _ => 0,
                }
            }
        }
        Place::Prime(p) => {
            if m % p as i128 == 0 {
                0
            } else {
                legendre(m, p)
            }
        }
    })
}

/// Hilbert symbol of two nonzero integers.
pub fn hilbert_symbol_int(a: i128, b: i128, place: Place) -> i8 {
    assert!(a != 0 && b != 0, "hilbert symbol of zero");
    match place {
        Place::Inf => {
            if a < 0 && b < 0 {
                -1
            } else {
                1
            }
        }
        Place::Prime(2) => {
            let (al, u) = split2(a);
            let (be, v) = split2(b);
            let eps = |x: i128| ((modp(x, 4) - 1) / 2) as i64;
            let omega = |x: i128| {
                let r = modp(x, 8);
                ((r * r - 1) / 8 % 2) as i64
            };
            let e = eps(u) * eps(v) + al as i64 * omega(v) + be as i64 * omega(u);
            if e % 2 == 0 {
                1
            } else {
                -1
            }
        }
        Place::Prime(p) => {
            let al = val(a, p) as i64;
            let be = val(b, p) as i64;
            let u = a / pow(p, al as u32);
            let v = b / pow(p, be as u32);
            let eps_p = (((p - 1) / 2) % 2) as i64;
            let mut s: i8 = if (al * be * eps_p) % 2 == 0 { 1 } else { -1 };
            if be % 2 == 1 {
                s *= legendre(u, p);
            }
            if al % 2 == 1 {
                s *= legendre(v, p);
            }
            s
        }
    }
}

fn split2(a: i128) -> (u32, i128) {
    let v = val(a, 2);
    (v, a >> v)
}

/// Hilbert symbol (a, b)_v of two nonzero rationals.
pub fn hilbert_symbol(a: &Rat, b: &Rat, place: Place) -> Result<i8> {
    if a.numer() == &0 || b.numer() == &0 {
        return Err(Error::InvalidInput("hilbert symbol of zero".into()));
    }
    Ok(hilbert_symbol_int(
        squarefree_part_rat(a),
        squarefree_part_rat(b),
        place,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Primitive solvability of z^2 = a x^2 + b y^2 modulo p^k.
    fn solvable_mod(a: i128, b: i128, p: u64, k: u32) -> bool {
        let m = pow(p, k);
        for x in 0..m {
            for y in 0..m {
                for z in 0..m {
                    if x % p as i128 == 0 && y % p as i128 == 0 && z % p as i128 == 0 {
                        continue;
                    }
                    if modp(z * z - a * x * x - b * y * y, m) == 0 {
                        return true;
                    }
                }
            }
        }
        false
    }

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker_symbol(&rat(5), Place::Prime(2)).unwrap(), -1);
        assert_eq!(kronecker_symbol(&rat(-4), Place::Prime(2)).unwrap(), 0);
        for p in [2, 3, 5, 7, 11] {
            assert_eq!(kronecker_symbol(&rat(1), Place::Prime(p)).unwrap(), 1);
        }
        assert_eq!(kronecker_symbol(&rat(-3), Place::Inf).unwrap(), -1);
        assert!(kronecker_symbol(&rat(0), Place::Prime(3)).is_err());
        // brute force: x^2 = 5 mod 8 has no root
        assert!((0..8).all(|x: i128| (x * x) % 8 != 5));
    }

    #[test]
    fn hilbert_examples() {
        assert!(!solvable_mod(-1, -1, 2, 4));
        assert_eq!(hilbert_symbol_int(-1, -1, Place::Prime(2)), -1);
        assert!(solvable_mod(-1, -1, 3, 3));
        assert_eq!(hilbert_symbol_int(-1, -1, Place::Prime(3)), 1);
        assert_eq!(hilbert_symbol_int(1, 7, Place::Prime(7)), 1);
    }

    #[test]
    fn hilbert_matches_brute_force() {
        // a, b with valuations at most one so that the bounded modulus decides
        let vals = [-15i128, -10, -7, -6, -5, -3, -2, -1, 1, 2, 3, 5, 6, 7, 10, 15];
        for &a in &vals {
            for &b in &vals {
                for (p, k) in [(2u64, 5u32), (3, 3), (5, 2), (7, 2)] {
                    if k == 5 && (a.abs() > 7 || b.abs() > 7) {
                        continue;
                    }
                    let expect = if solvable_mod(a, b, p, k) { 1 } else { -1 };
                    assert_eq!(
                        hilbert_symbol_int(a, b, Place::Prime(p)),
                        expect,
                        "({a},{b})_{p}"
                    );
                }
            }
        }
    }
}
