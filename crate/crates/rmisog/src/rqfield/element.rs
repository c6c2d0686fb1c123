//! Elements a + b*w with exact rational coordinates, and the context
//! operations on them: products, conjugates, norms, exact sign data.

use num_traits::{One, Signed, Zero};

use super::{FieldContext, FieldError, FieldKind};
use crate::num_util::{fmt_rat, parse_rat, rat_int, Int, Rat};

/// Coordinates over the integral basis {1, w}. Plain data: all arithmetic
/// beyond addition goes through a [`FieldContext`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement {
    pub a: Rat,
    pub b: Rat,
}

impl FieldElement {
    pub fn new(a: Rat, b: Rat) -> Self {
        FieldElement { a, b }
    }

    pub fn from_int(n: Int) -> Self {
        FieldElement { a: rat_int(n), b: rat_int(0) }
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn omega() -> Self {
        FieldElement { a: rat_int(0), b: rat_int(1) }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.a.is_one() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }
}

impl std::ops::Add for FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: FieldElement) -> FieldElement {
        FieldElement { a: self.a + rhs.a, b: self.b + rhs.b }
    }
}

impl std::ops::Sub for FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: FieldElement) -> FieldElement {
        FieldElement { a: self.a - rhs.a, b: self.b - rhs.b }
    }
}

impl std::ops::Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement { a: -self.a, b: -self.b }
    }
}

impl FieldContext {
    pub fn zero(&self) -> FieldElement {
        FieldElement::zero()
    }

    pub fn one(&self) -> FieldElement {
        FieldElement::one()
    }

    pub fn omega(&self) -> FieldElement {
        FieldElement::omega()
    }

    pub fn from_int(&self, n: Int) -> FieldElement {
        FieldElement::from_int(n)
    }

    /// The element 2w - t. Squares to the polynomial discriminant; for a
    /// real quadratic context this is sqrt(D), and it generates the
    /// different ideal. For the split algebra it is the unit (1, -1).
    pub fn sqrt_disc(&self) -> FieldElement {
        FieldElement { a: rat_int(-self.omega_trace()), b: rat_int(2) }
    }

    pub fn mul(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        let t = rat_int(self.omega_trace());
        let n = rat_int(self.omega_norm());
        let bd = x.b * y.b;
        FieldElement {
            a: x.a * y.a - n * bd,
            b: x.a * y.b + x.b * y.a + t * bd,
        }
    }

    pub fn conj(&self, x: FieldElement) -> FieldElement {
        let t = rat_int(self.omega_trace());
        FieldElement { a: x.a + t * x.b, b: -x.b }
    }

    pub fn norm(&self, x: FieldElement) -> Rat {
        let t = rat_int(self.omega_trace());
        let n = rat_int(self.omega_norm());
        x.a * x.a + t * x.a * x.b + n * x.b * x.b
    }

    pub fn trace(&self, x: FieldElement) -> Rat {
        let t = rat_int(self.omega_trace());
        x.a + x.a + t * x.b
    }

    /// Multiplicative inverse; errors on zero and on split zero-divisors.
    pub fn inv(&self, x: FieldElement) -> Result<FieldElement, FieldError> {
        let n = self.norm(x);
        if n.is_zero() {
            return Err(FieldError::InexactDivision);
        }
        let c = self.conj(x);
        Ok(FieldElement { a: c.a / n, b: c.b / n })
    }

    pub fn div_exact(&self, x: FieldElement, y: FieldElement) -> Result<FieldElement, FieldError> {
        Ok(self.mul(x, self.inv(y)?))
    }

    pub fn pow(&self, x: FieldElement, k: u32) -> FieldElement {
        let mut acc = FieldElement::one();
        for _ in 0..k {
            acc = self.mul(acc, x);
        }
        acc
    }

    /// Lies in the ring of integers Z[w].
    pub fn is_integral(&self, x: FieldElement) -> bool {
        x.a.is_integer() && x.b.is_integer()
    }

    /// The two components of x in Q x Q (split contexts only).
    pub fn split_components(&self, x: FieldElement) -> Option<(Rat, Rat)> {
        match self.kind {
            FieldKind::Split => Some((x.a + x.b, x.a)),
            _ => None,
        }
    }

    /// Exact signs of the two real embeddings, each -1, 0 or 1. The
    /// embeddings of a + b*w are (T +- b*sqrt(D))/2 with T the trace and
    /// D the polynomial discriminant; the sign of A + B*sqrt(D) equals the
    /// sign of A|A| + B|B|D, evaluated in integers.
    pub fn embedding_signs(&self, x: FieldElement) -> (i32, i32) {
        let d = self.poly_disc();
        let tr = self.trace(x);
        let sign_of = |a: Rat, b: Rat| -> i32 {
            let den = a.denom() * b.denom();
            let ai = a.numer() * (den / a.denom());
            let bi = b.numer() * (den / b.denom());
            let v = ai * ai.abs() + bi * bi.abs() * d;
            match v.cmp(&0) {
                std::cmp::Ordering::Greater => 1,
                std::cmp::Ordering::Equal => 0,
                std::cmp::Ordering::Less => -1,
            }
        };
        (sign_of(tr, x.b), sign_of(tr, -x.b))
    }

    /// Both embeddings strictly positive.
    pub fn is_totally_positive(&self, x: FieldElement) -> Result<bool, FieldError> {
        if x.is_zero() {
            return Err(FieldError::ZeroInput);
        }
        Ok(self.norm(x).is_positive() && self.trace(x).is_positive())
    }

    pub fn format_element(&self, x: FieldElement) -> String {
        if self.is_split() {
            let (u, v) = self.split_components(x).unwrap();
            return format!("({},{})", fmt_rat(&u), fmt_rat(&v));
        }
        if x.b.is_zero() {
            return fmt_rat(&x.a);
        }
        let wpart = if x.b.is_one() {
            "w".to_string()
        } else if x.b == -rat_int(1) {
            "-w".to_string()
        } else {
            format!("{}w", fmt_rat(&x.b))
        };
        if x.a.is_zero() {
            wpart
        } else if wpart.starts_with('-') {
            format!("{}{}", fmt_rat(&x.a), wpart)
        } else {
            format!("{}+{}", fmt_rat(&x.a), wpart)
        }
    }

    /// Parses "a", "a+bw", "bw", "a-b/2w" and, for split contexts, the
    /// component form "(x,y)".
    pub fn parse_element(&self, input: &str) -> Result<FieldElement, FieldError> {
        let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        let err = || FieldError::Parse { what: "field element", input: input.to_string() };
        if s.is_empty() {
            return Err(err());
        }
        if s.starts_with('(') {
            if !self.is_split() || !s.ends_with(')') {
                return Err(err());
            }
            let inner = &s[1..s.len() - 1];
            let (u, v) = inner.split_once(',').ok_or_else(err)?;
            let u = parse_rat(u).ok_or_else(err)?;
            let v = parse_rat(v).ok_or_else(err)?;
            // (u, v) = a + b*w with w = (1, 0): a = v, b = u - v
            return Ok(FieldElement { a: v, b: u - v });
        }
        // split into at most two signed terms
        let bytes = s.as_bytes();
        let mut cut = None;
        for i in 1..bytes.len() {
            if (bytes[i] == b'+' || bytes[i] == b'-')
                && bytes[i - 1] != b'/'
                && bytes[i - 1] != b'+'
                && bytes[i - 1] != b'-'
            {
                cut = Some(i);
                break;
            }
        }
        let (t1, t2) = match cut {
            None => (&s[..], None),
            Some(i) => (&s[..i], Some(&s[i..])),
        };
        let mut a = rat_int(0);
        let mut b = rat_int(0);
        let mut parse_term = |term: &str| -> Result<(), FieldError> {
            let e = || FieldError::Parse { what: "field element", input: input.to_string() };
            if let Some(coef) = term.strip_suffix('w') {
                let coef = coef.strip_suffix('*').unwrap_or(coef);
                let c = match coef {
                    "" | "+" => rat_int(1),
                    "-" => rat_int(-1),
                    other => parse_rat(other).ok_or_else(e)?,
                };
                if !b.is_zero() {
                    return Err(e());
                }
                b = c;
            } else {
                let c = parse_rat(term).ok_or_else(e)?;
                if !a.is_zero() {
                    return Err(e());
                }
                a = c;
            }
            Ok(())
        };
        parse_term(t1)?;
        if let Some(t2) = t2 {
            parse_term(t2)?;
        }
        Ok(FieldElement { a, b })
    }
}
