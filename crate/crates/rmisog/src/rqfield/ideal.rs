//! Fractional ideals of Z[w] in Hermite normal form.
//!
//! An ideal is stored as (1/den) * (Z*a + Z*(b + c*w)) with a, c, den > 0,
//! 0 <= b < a and gcd(a, b, c, den) = 1. Stability under multiplication by
//! w forces c | a, c | b and ac | N(b + c*w); construction enforces this.

use num_integer::Integer;
use num_traits::Signed;

use super::{FieldContext, FieldElement, FieldError};
use crate::matz;
use crate::num_util::{fmt_rat, rat, rat_int, Int, Rat};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ideal {
    a: Int,
    b: Int,
    c: Int,
    den: Int,
}

impl Ideal {
    pub fn one() -> Self {
        Ideal { a: 1, b: 0, c: 1, den: 1 }
    }

    pub fn is_one(&self) -> bool {
        *self == Ideal::one()
    }

    /// The canonical data (a, b, c, den).
    pub fn hnf(&self) -> (Int, Int, Int, Int) {
        (self.a, self.b, self.c, self.den)
    }

    pub fn is_integral(&self) -> bool {
        self.den == 1
    }

    /// Z-basis as field elements.
    pub fn basis(&self) -> [FieldElement; 2] {
        let d = self.den;
        [
            FieldElement::new(rat(self.a, d), rat_int(0)),
            FieldElement::new(rat(self.b, d), rat(self.c, d)),
        ]
    }

    pub fn norm(&self) -> Rat {
        rat(self.a * self.c, self.den * self.den)
    }

    /// Builds the Z_F-module generated by the given elements.
    pub fn from_generators(ctx: &FieldContext, gens: &[FieldElement]) -> Result<Self, FieldError> {
        let mut span = Vec::with_capacity(2 * gens.len());
        for &g in gens {
            span.push(g);
            span.push(ctx.mul(ctx.omega(), g));
        }
        Self::from_span(ctx, &span)
    }

    /// Builds an ideal from a Z-spanning set that is already w-stable.
    pub(crate) fn from_span(ctx: &FieldContext, span: &[FieldElement]) -> Result<Self, FieldError> {
        let mut den: Int = 1;
        for g in span {
            den = den.lcm(g.a.denom());
            den = den.lcm(g.b.denom());
        }
        // w-coefficient first so the echelon produces {a, b + c*w}
        let rows: matz::Mat = span
            .iter()
            .map(|g| {
                let x = (g.a * rat_int(den)).to_integer();
                let y = (g.b * rat_int(den)).to_integer();
                vec![y, x]
            })
            .collect();
        let h = matz::hnf(rows);
        if h.len() != 2 {
            return Err(FieldError::ZeroIdeal);
        }
        let (c, b, a) = (h[0][0], h[0][1], h[1][1]);
        debug_assert_eq!(h[1][0], 0);
        let g = matz::gcd_all([a, b, c, den]);
        let ideal = Ideal { a: a / g, b: b / g, c: c / g, den: den / g };
        debug_assert!(ideal.stability_ok(ctx), "span was not w-stable: {ideal:?}");
        Ok(ideal)
    }

    pub fn principal(ctx: &FieldContext, g: FieldElement) -> Result<Self, FieldError> {
        Self::from_generators(ctx, &[g])
    }

    fn stability_ok(&self, ctx: &FieldContext) -> bool {
        let t = ctx.omega_trace();
        let n = ctx.omega_norm();
        let nrm = self.b * self.b + t * self.b * self.c + n * self.c * self.c;
        self.a > 0
            && self.c > 0
            && self.den > 0
            && (0..self.a).contains(&self.b)
            && self.a % self.c == 0
            && self.b % self.c == 0
            && nrm % (self.a * self.c) == 0
    }

    pub fn contains_element(&self, _ctx: &FieldContext, x: FieldElement) -> bool {
        let xa = x.a * rat_int(self.den);
        let xb = x.b * rat_int(self.den);
        if !xa.is_integer() || !xb.is_integer() {
            return false;
        }
        let (u, v) = (xa.to_integer(), xb.to_integer());
        if v % self.c != 0 {
            return false;
        }
        (u - (v / self.c) * self.b) % self.a == 0
    }

    pub fn contains_ideal(&self, ctx: &FieldContext, other: &Ideal) -> bool {
        other.basis().iter().all(|&g| self.contains_element(ctx, g))
    }

    /// Divisibility is containment.
    pub fn divides(&self, ctx: &FieldContext, other: &Ideal) -> bool {
        self.contains_ideal(ctx, other)
    }

    pub fn mul(&self, ctx: &FieldContext, other: &Ideal) -> Ideal {
        let mut prods = Vec::with_capacity(4);
        for &x in &self.basis() {
            for &y in &other.basis() {
                prods.push(ctx.mul(x, y));
            }
        }
        Ideal::from_generators(ctx, &prods).expect("product of ideals is full rank")
    }

    pub fn conj(&self, ctx: &FieldContext) -> Ideal {
        let gens: Vec<FieldElement> = self.basis().iter().map(|&g| ctx.conj(g)).collect();
        Ideal::from_generators(ctx, &gens).expect("conjugate of ideal is full rank")
    }

    /// Scales the module by a positive rational.
    pub fn scale(&self, r: Rat) -> Ideal {
        assert!(r.is_positive(), "ideal scale must be positive");
        let (p, q) = (*r.numer(), *r.denom());
        let g = matz::gcd_all([self.a * p, self.b * p, self.c * p, self.den * q]);
        Ideal {
            a: self.a * p / g,
            b: self.b * p / g,
            c: self.c * p / g,
            den: self.den * q / g,
        }
    }

    pub fn inverse(&self, ctx: &FieldContext) -> Ideal {
        let n = self.norm();
        self.conj(ctx).scale(n.recip())
    }

    pub fn div(&self, ctx: &FieldContext, other: &Ideal) -> Ideal {
        self.mul(ctx, &other.inverse(ctx))
    }

    /// Exact quotient: errors unless `other` divides `self` (integrally).
    pub fn quotient_exact(&self, ctx: &FieldContext, other: &Ideal) -> Result<Ideal, FieldError> {
        let q = self.div(ctx, other);
        if q.is_integral() {
            Ok(q)
        } else {
            Err(FieldError::NonDivisible)
        }
    }

    pub fn pow(&self, ctx: &FieldContext, e: i32) -> Ideal {
        let base = if e >= 0 { *self } else { self.inverse(ctx) };
        let mut acc = Ideal::one();
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(ctx, &base);
        }
        acc
    }

    /// Valuation at a prime ideal (fractional ideals allowed).
    pub fn valuation(&self, ctx: &FieldContext, prime: &Ideal) -> i32 {
        let count_integral = |mut j: Ideal| -> i32 {
            let mut v = 0;
            while prime.divides(ctx, &j) {
                j = j.quotient_exact(ctx, prime).expect("containment implies divisibility");
                v += 1;
            }
            v
        };
        if self.is_integral() {
            count_integral(*self)
        } else {
            let m = Ideal::principal(ctx, FieldElement::from_int(self.den)).unwrap();
            count_integral(self.scale(rat_int(self.den))) - count_integral(m)
        }
    }

    /// Factorization into prime ideals with (possibly negative) exponents,
    /// ordered by (rational prime, canonical form).
    pub fn factor(&self, ctx: &FieldContext) -> Vec<(Ideal, i32)> {
        let mut rational_primes: Vec<Int> = Vec::new();
        for v in [self.a * self.c, self.den * self.den] {
            for (p, _) in crate::num_util::factor(v) {
                if !rational_primes.contains(&p) {
                    rational_primes.push(p);
                }
            }
        }
        rational_primes.sort();
        let mut out = Vec::new();
        for p in rational_primes {
            let primes = match factor_rational_prime(ctx, p).expect("p is prime") {
                PrimeSplitting::Split { p1, p2 } => vec![p1, p2],
                PrimeSplitting::Inert { p } => vec![p],
                PrimeSplitting::Ramified { p } => vec![p],
            };
            for pr in primes {
                let v = self.valuation(ctx, &pr);
                if v != 0 {
                    out.push((pr, v));
                }
            }
        }
        debug_assert_eq!(
            out.iter().fold(Ideal::one(), |acc, (p, e)| acc.mul(ctx, &p.pow(ctx, *e))),
            *self,
            "factorization must reproduce the ideal"
        );
        out
    }

    pub fn format(&self, ctx: &FieldContext) -> String {
        if self.is_one() {
            return "(1)".to_string();
        }
        let g1 = rat(self.a, self.den);
        let second = FieldElement::new(rat(self.b, self.den), rat(self.c, self.den));
        let body = if self.c == self.a && self.b == 0 {
            format!("({})", fmt_rat(&g1))
        } else {
            format!("({}, {})", fmt_rat(&g1), ctx.format_element(second))
        };
        body
    }

    /// Parses "(g1, g2, ...)" or a bare element, generators in element syntax.
    pub fn parse(ctx: &FieldContext, input: &str) -> Result<Ideal, FieldError> {
        let s = input.trim();
        let inner = if s.starts_with('(') && s.ends_with(')') && !ctx.is_split() {
            &s[1..s.len() - 1]
        } else if s.starts_with('(') && s.ends_with(')') && ctx.is_split() {
            // could be an element pair; try ideal list first on comma split
            &s[1..s.len() - 1]
        } else {
            s
        };
        let mut gens = Vec::new();
        let mut ok = true;
        for part in inner.split(',') {
            match ctx.parse_element(part) {
                Ok(g) => gens.push(g),
                Err(_) => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok || gens.is_empty() {
            // fall back: whole string as one element (covers split pairs)
            gens = vec![ctx.parse_element(s)?];
        }
        Ideal::from_generators(ctx, &gens)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PrimeSplitting {
    Split { p1: Ideal, p2: Ideal },
    Inert { p: Ideal },
    Ramified { p: Ideal },
}

impl PrimeSplitting {
    pub fn primes(&self) -> Vec<Ideal> {
        match self {
            PrimeSplitting::Split { p1, p2 } => vec![*p1, *p2],
            PrimeSplitting::Inert { p } | PrimeSplitting::Ramified { p } => vec![*p],
        }
    }
}

/// Splitting behaviour of a rational prime: counts the roots of
/// x^2 - t*x + n modulo p. In the split algebra x^2 - x has the two roots
/// 0, 1 modulo every prime, so every prime splits there.
pub fn factor_rational_prime(ctx: &FieldContext, p: Int) -> Result<PrimeSplitting, FieldError> {
    if !crate::num_util::is_prime(p) {
        return Err(FieldError::NotPrime(p));
    }
    let t = ctx.omega_trace();
    let n = ctx.omega_norm();
    let roots: Vec<Int> = (0..p)
        .filter(|&r| (r * r - t * r + n).rem_euclid(p) == 0)
        .collect();
    let prime_at = |r: Int| -> Ideal {
        Ideal {
            a: p,
            b: (-r).rem_euclid(p),
            c: 1,
            den: 1,
        }
    };
    match roots.len() {
        2 => Ok(PrimeSplitting::Split { p1: prime_at(roots[0]), p2: prime_at(roots[1]) }),
        1 => Ok(PrimeSplitting::Ramified { p: prime_at(roots[0]) }),
        0 => Ok(PrimeSplitting::Inert { p: Ideal { a: p, b: 0, c: p, den: 1 } }),
        _ => unreachable!("a quadratic has at most two roots mod p"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q5() -> FieldContext {
        FieldContext::real_quadratic(5).unwrap()
    }

    #[test]
    fn unit_ideal_is_identity() {
        let ctx = q5();
        let p = match factor_rational_prime(&ctx, 11).unwrap() {
            PrimeSplitting::Split { p1, .. } => p1,
            _ => panic!("11 splits over Delta = 5"),
        };
        assert_eq!(p.mul(&ctx, &Ideal::one()), p);
        assert_eq!(p.norm(), rat_int(11));
    }

    #[test]
    fn split_primes_multiply_to_p() {
        // Delta = 5, p = 11: 4^2 = 5 mod 11
        let ctx = q5();
        let PrimeSplitting::Split { p1, p2 } = factor_rational_prime(&ctx, 11).unwrap() else {
            panic!("11 splits");
        };
        let eleven = Ideal::principal(&ctx, FieldElement::from_int(11)).unwrap();
        assert_eq!(p1.mul(&ctx, &p2), eleven);
        assert_ne!(p1, p2);
        assert_eq!(p1.conj(&ctx), p2);
    }

    #[test]
    fn splitting_examples() {
        let ctx = q5();
        assert!(matches!(factor_rational_prime(&ctx, 3).unwrap(), PrimeSplitting::Inert { .. }));
        assert!(matches!(factor_rational_prime(&ctx, 5).unwrap(), PrimeSplitting::Ramified { .. }));
        assert!(matches!(factor_rational_prime(&ctx, 11).unwrap(), PrimeSplitting::Split { .. }));
        assert_eq!(factor_rational_prime(&ctx, 4), Err(FieldError::NotPrime(4)));
        // 2 is inert for Delta = 5 mod 8, split for Delta = 1 mod 8
        assert!(matches!(factor_rational_prime(&ctx, 2).unwrap(), PrimeSplitting::Inert { .. }));
        let ctx17 = FieldContext::real_quadratic(17).unwrap();
        assert!(matches!(factor_rational_prime(&ctx17, 2).unwrap(), PrimeSplitting::Split { .. }));
        let ctx12 = FieldContext::real_quadratic(12).unwrap();
        assert!(matches!(factor_rational_prime(&ctx12, 2).unwrap(), PrimeSplitting::Ramified { .. }));
    }

    #[test]
    fn split_algebra_every_prime_splits() {
        let ctx = FieldContext::split();
        for p in [2, 3, 5, 7, 11] {
            let PrimeSplitting::Split { p1, p2 } = factor_rational_prime(&ctx, p).unwrap() else {
                panic!("{p} must split in Q x Q");
            };
            assert_eq!(p1.norm(), rat_int(p));
            let pp = Ideal::principal(&ctx, FieldElement::from_int(p)).unwrap();
            assert_eq!(p1.mul(&ctx, &p2), pp);
        }
    }

    #[test]
    fn ramified_square_is_p() {
        // Delta = 12: (sqrt 3)^2 = (3)
        let ctx = FieldContext::real_quadratic(12).unwrap();
        let sqrt3 = FieldElement::new(rat_int(-6), rat_int(1));
        let i = Ideal::principal(&ctx, sqrt3).unwrap();
        let three = Ideal::principal(&ctx, FieldElement::from_int(3)).unwrap();
        assert_eq!(i.mul(&ctx, &i), three);
        let PrimeSplitting::Ramified { p } = factor_rational_prime(&ctx, 3).unwrap() else {
            panic!("3 ramifies over Delta = 12");
        };
        assert_eq!(i, p);
    }

    #[test]
    fn norm_is_multiplicative_on_ideals() {
        let ctx = q5();
        let p11 = factor_rational_prime(&ctx, 11).unwrap().primes()[0];
        let p19 = factor_rational_prime(&ctx, 19).unwrap().primes()[0];
        let prod = p11.mul(&ctx, &p19);
        assert_eq!(prod.norm(), p11.norm() * p19.norm());
    }

    #[test]
    fn inverse_and_exact_quotient() {
        let ctx = q5();
        let p11 = factor_rational_prime(&ctx, 11).unwrap().primes()[0];
        assert_eq!(p11.mul(&ctx, &p11.inverse(&ctx)), Ideal::one());
        let sq = p11.pow(&ctx, 2);
        assert_eq!(sq.quotient_exact(&ctx, &p11), Ok(p11));
        let p3 = factor_rational_prime(&ctx, 3).unwrap().primes()[0];
        assert_eq!(sq.quotient_exact(&ctx, &p3), Err(FieldError::NonDivisible));
        assert!(p11.divides(&ctx, &sq));
        assert!(!p3.divides(&ctx, &sq));
    }

    #[test]
    fn factorization_roundtrip() {
        let ctx = q5();
        let p11 = factor_rational_prime(&ctx, 11).unwrap().primes()[0];
        let p3 = factor_rational_prime(&ctx, 3).unwrap().primes()[0];
        let i = p11.pow(&ctx, 2).mul(&ctx, &p3).scale(rat(1, 7));
        let f = i.factor(&ctx);
        let back = f.iter().fold(Ideal::one(), |acc, (p, e)| acc.mul(&ctx, &p.pow(&ctx, *e)));
        assert_eq!(back, i);
        // valuations: 2 at p11, 1 at p3, -1 at both primes over 7 if split
        assert_eq!(i.valuation(&ctx, &p11), 2);
        assert_eq!(i.valuation(&ctx, &p3), 1);
    }

    #[test]
    fn parse_and_format() {
        let ctx = q5();
        // N(5 + w) = 25 + 25 + 5 = 55, so (11, 5+w) is a prime over 11
        let i = Ideal::parse(&ctx, "(11, 5+w)").unwrap();
        assert_eq!(i.norm(), rat_int(11));
        let j = Ideal::parse(&ctx, "11").unwrap();
        assert_eq!(j, Ideal::principal(&ctx, FieldElement::from_int(11)).unwrap());
        let rt = Ideal::parse(&ctx, &i.format(&ctx)).unwrap();
        assert_eq!(rt, i);
    }
}
