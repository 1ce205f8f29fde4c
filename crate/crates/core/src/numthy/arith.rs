use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, Zero};

/// Exact rational numbers used throughout the crate.
pub type Rat = Ratio<i128>;

pub fn rat(n: i128) -> Rat {
    Rat::from_integer(n)
}

pub fn gcd(a: i128, b: i128) -> i128 {
    a.gcd(&b)
}

pub fn lcm(a: i128, b: i128) -> i128 {
    a.lcm(&b)
}

/// Extended gcd: returns `(g, x, y)` with `a x + b y = g >= 0`.
pub fn xgcd(a: i128, b: i128) -> (i128, i128, i128) {
    let e = a.extended_gcd(&b);
    if e.gcd < 0 {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

/// p-adic valuation of a nonzero integer.
pub fn val(mut n: i128, p: u64) -> u32 {
    assert!(n != 0, "valuation of zero");
    let p = p as i128;
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// p-adic valuation of a nonzero rational.
pub fn val_rat(x: &Rat, p: u64) -> i32 {
    val(*x.numer(), p) as i32 - val(*x.denom(), p) as i32
}

/// Prime factorization by trial division, sorted by prime.
pub fn factor(n: i128) -> Vec<(u64, u32)> {
    let mut n = n.abs();
    assert!(n != 0, "factor of zero");
    let mut out = Vec::new();
    let mut d: i128 = 2;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d as u64, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n as u64, 1));
    }
    out
}

pub fn prime_divisors(n: i128) -> Vec<u64> {
    factor(n).into_iter().map(|(p, _)| p).collect()
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factor(n as i128).len() == 1 && factor(n as i128)[0].1 == 1
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    (2..=n).filter(|&k| is_prime(k)).collect()
}

/// Squarefree part of a nonzero integer, keeping the sign.
pub fn squarefree_part(n: i128) -> i128 {
    let sign = n.signum();
    sign * factor(n)
        .into_iter()
        .filter(|&(_, e)| e % 2 == 1)
        .map(|(p, _)| p as i128)
        .product::<i128>()
}

/// Squarefree part of a nonzero rational (so that `x = sf * square`).
pub fn squarefree_part_rat(x: &Rat) -> i128 {
    squarefree_part(*x.numer() * *x.denom())
}

pub fn is_squarefree(n: i128) -> bool {
    n != 0 && factor(n).iter().all(|&(_, e)| e == 1)
}

/// Floor of the square root of a nonnegative integer.
pub fn isqrt(n: i128) -> i128 {
    assert!(n >= 0);
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as i128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

pub fn is_square(n: i128) -> bool {
    n >= 0 && isqrt(n).pow(2) == n
}

pub fn pow(p: u64, k: u32) -> i128 {
    (p as i128).pow(k)
}

/// Least nonnegative residue.
pub fn modp(a: i128, m: i128) -> i128 {
    a.mod_floor(&m)
}

pub fn modinv(a: i128, m: i128) -> Option<i128> {
    let (g, x, _) = xgcd(modp(a, m), m);
    (g == 1).then(|| modp(x, m))
}

/// Positive rational from numerator and denominator.
pub fn ratio(n: i128, d: i128) -> Rat {
    Rat::new(n, d)
}

pub fn is_integral(x: &Rat) -> bool {
    x.is_integer()
}

pub fn rat_abs(x: &Rat) -> Rat {
    if x.is_negative() { -*x } else { *x }
}

pub fn rat_is_zero(x: &Rat) -> bool {
    x.is_zero()
}

/// Integer determinant of a small square matrix by fraction-free elimination.
pub fn det_int(m: &[Vec<i128>]) -> i128 {
    let n = m.len();
    let mut a: Vec<Vec<i128>> = m.to_vec();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            let Some(r) = (k + 1..n).find(|&r| a[r][k] != 0) else {
                return 0;
            };
            a.swap(k, r);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}
