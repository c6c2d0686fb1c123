//! Exact scalar helpers: integer square roots, trial-division primes,
//! and parsing/printing of rationals.
//!
//! Everything in this crate runs at desk scale, so `i128` with overflow
//! checks enabled is the base integer type throughout.

use num_rational::Ratio;
use num_traits::{Signed, Zero};

pub type Int = i128;
pub type Rat = Ratio<Int>;

pub fn rat(n: Int, d: Int) -> Rat {
    Ratio::new(n, d)
}

pub fn rat_int(n: Int) -> Rat {
    Ratio::from_integer(n)
}

/// Floor of the square root of a nonnegative integer.
pub fn isqrt(n: Int) -> Int {
    assert!(n >= 0, "isqrt of negative {n}");
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as Int + 2;
    while x * x > n {
        x = (x + n / x) / 2;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

pub fn is_square(n: Int) -> bool {
    if n < 0 {
        return false;
    }
    let r = isqrt(n);
    r * r == n
}

pub fn is_prime(n: Int) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Prime factorization by trial division, smallest prime first.
pub fn factor(mut n: Int) -> Vec<(Int, u32)> {
    assert!(n >= 1, "factor needs a positive integer, got {n}");
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Number of prime factors counted with multiplicity.
pub fn big_omega(n: Int) -> u32 {
    factor(n).iter().map(|&(_, e)| e).sum()
}

/// Smallest integer `b >= 0` with `b*b >= n` (ceiling square root).
pub fn isqrt_ceil(n: Int) -> Int {
    let r = isqrt(n);
    if r * r == n {
        r
    } else {
        r + 1
    }
}

/// Parses "3", "-3", "3/4", "-3/4" into an exact rational.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    match s.split_once('/') {
        None => s.parse::<Int>().ok().map(rat_int),
        Some((n, d)) => {
            let n = n.trim().parse::<Int>().ok()?;
            let d = d.trim().parse::<Int>().ok()?;
            if d == 0 {
                None
            } else {
                Some(rat(n, d))
            }
        }
    }
}

pub fn fmt_rat(r: &Rat) -> String {
    if r.denom() == &1 {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Sign of a rational as -1, 0, 1.
pub fn rat_sign(r: &Rat) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isqrt_exact_and_floor() {
        for n in 0..2000i128 {
            let r = isqrt(n);
            assert!(r * r <= n && (r + 1) * (r + 1) > n, "n={n} r={r}");
        }
        assert_eq!(isqrt(1_000_000_000_000), 1_000_000);
    }

    #[test]
    fn primes_small() {
        let ps: Vec<Int> = (0..60).filter(|&n| is_prime(n)).collect();
        assert_eq!(ps, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]);
    }

    #[test]
    fn factor_roundtrip() {
        for n in 1..500i128 {
            let f = factor(n);
            let back: Int = f.iter().map(|&(p, e)| p.pow(e)).product();
            assert_eq!(back, n);
            for &(p, _) in &f {
                assert!(is_prime(p));
            }
        }
    }

    #[test]
    fn rat_parse_fmt() {
        assert_eq!(parse_rat("3/6"), Some(rat(1, 2)));
        assert_eq!(parse_rat("-4"), Some(rat_int(-4)));
        assert_eq!(parse_rat("x"), None);
        assert_eq!(parse_rat("1/0"), None);
        assert_eq!(fmt_rat(&rat(-6, 4)), "-3/2");
    }
}
