use serde::{Deserialize, Serialize};

use super::arith::*;
use crate::{Error, Result};

/// The order of conductor `f` in K = Q(sqrt m), presented as Z[omega].
///
/// `omega = f (1 + sqrt m)/2` when `m = 1 mod 4` and `omega = f sqrt m` otherwise,
/// so that `omega^2 - t omega + n = 0` and `t^2 - 4n = f^2 disc(K)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadOrder {
    pub m: i64,
    pub f: u64,
    pub t: i128,
    pub n: i128,
}

impl QuadOrder {
    pub fn new(m: i64, f: u64) -> Result<Self> {
        if m == 0 || m == 1 || !is_squarefree(m as i128) {
            return Err(Error::InvalidInput(format!("{m} is not a squarefree integer != 0, 1")));
        }
        if f == 0 {
            return Err(Error::InvalidInput("conductor must be positive".into()));
        }
        let (fi, mi) = (f as i128, m as i128);
        let (t, n) = if modp(mi, 4) == 1 {
            (fi, fi * fi * (1 - mi) / 4)
        } else {
            (0, -fi * fi * mi)
        };
        Ok(QuadOrder { m, f, t, n })
    }

    pub fn maximal(m: i64) -> Result<Self> {
        Self::new(m, 1)
    }

    pub fn field_disc(&self) -> i128 {
        let m = self.m as i128;
        if modp(m, 4) == 1 {
            m
        } else {
            4 * m
        }
    }

    pub fn disc(&self) -> i128 {
        self.t * self.t - 4 * self.n
    }

    /// `i_p(B) = v_p(f(B))`.
    pub fn conductor_val(&self, p: u64) -> u32 {
        val(self.f as i128, p)
    }

    pub fn with_conductor(&self, f: u64) -> Result<Self> {
        Self::new(self.m, f)
    }

    pub fn is_imaginary(&self) -> bool {
        self.m < 0
    }

    /// Number of roots of unity in the order.
    pub fn roots_of_unity(&self) -> i128 {
        match (self.m, self.f) {
            (-1, 1) => 4,
            (-3, 1) => 6,
            _ => 2,
        }
    }
}

/// Kronecker character `(d / a)` for a discriminant `d` and `a >= 1`.
pub(crate) fn kronecker_char(d: i128, a: i128) -> i128 {
    let v = a.trailing_zeros();
    let odd = a >> v;
    let two: i128 = if d % 2 == 0 {
        0
    } else {
        match modp(d, 8) {
            1 | 7 => 1,
            _ => -1,
        }
    };
    let two_part = if v == 0 { 1 } else { two.pow(v) };
    two_part * jacobi(d, odd)
}

/// Jacobi symbol `(a / n)` for odd positive `n`.
fn jacobi(a: i128, n: i128) -> i128 {
    let mut a = modp(a, n);
    let mut n = n;
    let mut r = 1;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
                r = -r;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            r = -r;
        }
        a %= n;
    }
    if n == 1 {
        r
    } else {
        0
    }
}

/// Class number h(B) of an imaginary quadratic order.
///
/// The maximal order is handled by the analytic class number formula with the
/// Kronecker character; the conductor is then accounted for by the usual index
/// formula `h(B) = h(O_K) f / [O_K^x : B^x] prod_{p | f} (1 - (d_K/p)/p)`.
pub fn quad_class_number(b: &QuadOrder) -> Result<u64> {
    if !b.is_imaginary() {
        return Err(Error::UnsupportedBaseOrder(format!(
            "real quadratic order Q(sqrt {})",
            b.m
        )));
    }
    let d = b.field_disc();
    let w = QuadOrder::maximal(b.m)?.roots_of_unity();
    let s: i128 = (1..-d).map(|a| kronecker_char(d, a) * a).sum();
    let hk = -w * s / (2 * -d);
    let f = b.f as i128;
    let mut num = hk * f;
    let mut den = w / b.roots_of_unity();
    for p in prime_divisors(f) {
        let p = p as i128;
        num *= p - kronecker_char(d, p);
        den *= p;
    }
    debug_assert_eq!(num % den, 0);
    Ok((num / den) as u64)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// Number of reduced primitive positive definite forms of discriminant `disc`.
    pub fn reduced_form_count(disc: i128) -> u64 {
        let mut h = 0;
        let mut a = 1;
        while 3 * a * a <= -disc {
            for b in -a + 1..=a {
                let num = b * b - disc;
                if num % (4 * a) != 0 {
                    continue;
                }
                let c = num / (4 * a);
                if c < a || (c == a && b < 0) {
                    continue;
                }
                if gcd(gcd(a, b), c) == 1 {
                    h += 1;
                }
            }
            a += 1;
        }
        h
    }

    #[test]
    fn omega_and_disc() {
        let b = QuadOrder::new(-3, 2).unwrap();
        assert_eq!(b.disc(), -12);
        let b = QuadOrder::new(-1, 3).unwrap();
        assert_eq!((b.t, b.n, b.disc()), (0, 9, -36));
        assert!(QuadOrder::new(4, 1).is_err());
    }

    #[test]
    fn class_number_examples() {
        assert_eq!(quad_class_number(&QuadOrder::new(-1, 1).unwrap()).unwrap(), 1);
        assert_eq!(quad_class_number(&QuadOrder::new(-23, 1).unwrap()).unwrap(), 3);
        assert_eq!(quad_class_number(&QuadOrder::new(-3, 2).unwrap()).unwrap(), 1);
        assert_eq!(reduced_form_count(-23), 3);
        assert_eq!(reduced_form_count(-12), 1);
        assert!(matches!(
            quad_class_number(&QuadOrder::new(5, 1).unwrap()),
            Err(Error::UnsupportedBaseOrder(_))
        ));
    }
}
