//! Exact arithmetic in a real quadratic field F = Q(sqrt(D)) for a positive
//! fundamental discriminant D, or in the split algebra F = Q x Q.
//!
//! Both cases are presented uniformly as Q[w] with w^2 = t*w - n on the
//! integral basis {1, w}:
//!
//! - real quadratic: w = (D + sqrt(D))/2, so t = D and n = (D^2 - D)/4;
//! - split: w = (1, 0), so t = 1 and n = 0.
//!
//! The two embeddings of a + b*w are a + b*r for the roots r of
//! x^2 - t*x + n, which keeps sign and positivity questions exact in
//! integer arithmetic for every context.

mod classgroup;
mod element;
mod ideal;
mod units;

pub use classgroup::{
    is_square_from_ordinary_classes, is_square_in_narrow_class_group, ClassGroup, SignPair,
};
pub use ideal::{factor_rational_prime, Ideal, PrimeSplitting};

use std::sync::OnceLock;

use crate::num_util::Int;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldKind {
    RealQuadratic { delta: Int },
    Split,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FieldError {
    #[error("operands belong to different field contexts")]
    MixedContexts,
    #[error("division is not exact (zero or zero-divisor denominator)")]
    InexactDivision,
    #[error("zero input")]
    ZeroInput,
    #[error("{0} is not a prime number")]
    NotPrime(Int),
    #[error("ideal quotient is not integral")]
    NonDivisible,
    #[error("ideal is not principal")]
    NotPrincipal,
    #[error("ideal is principal but every generator has a negative embedding")]
    NotNarrowlyPrincipal,
    #[error("the split algebra Q x Q has no fundamental unit")]
    SplitFieldHasNoFundamentalUnit,
    #[error("unsupported discriminant {0}: {1}")]
    UnsupportedDiscriminant(Int, &'static str),
    #[error("ideal generators span a rank-deficient module")]
    ZeroIdeal,
    #[error("cannot parse {what}: {input:?}")]
    Parse { what: &'static str, input: String },
}

/// A field (or split algebra) together with write-once caches for the
/// fundamental unit and the two class groups. All operations take `&self`;
/// the caches make repeated class-group queries cheap and thread-safe.
pub struct FieldContext {
    kind: FieldKind,
    unit: OnceLock<element::FieldElement>,
    cl: OnceLock<ClassGroup>,
    cl_plus: OnceLock<ClassGroup>,
}

impl std::fmt::Debug for FieldContext {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FieldContext").field("kind", &self.kind).finish()
    }
}

impl PartialEq for FieldContext {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}
impl Eq for FieldContext {}

fn is_squarefree(n: Int) -> bool {
    let mut m = n;
    let mut d = 2;
    while d * d <= m {
        if m % d == 0 {
            m /= d;
            if m % d == 0 {
                return false;
            }
        }
        d += 1;
    }
    true
}

/// Fundamental discriminant test: D = 1 mod 4 squarefree, or D = 4m with
/// m = 2, 3 mod 4 squarefree.
pub fn is_fundamental_discriminant(delta: Int) -> bool {
    if delta <= 1 {
        return false;
    }
    if delta % 4 == 1 {
        is_squarefree(delta)
    } else if delta % 4 == 0 {
        let m = delta / 4;
        (m % 4 == 2 || m % 4 == 3) && is_squarefree(m)
    } else {
        false
    }
}

impl FieldContext {
    pub fn real_quadratic(delta: Int) -> Result<Self, FieldError> {
        if !is_fundamental_discriminant(delta) {
            return Err(FieldError::UnsupportedDiscriminant(
                delta,
                "not a positive fundamental discriminant",
            ));
        }
        let ctx = FieldContext {
            kind: FieldKind::RealQuadratic { delta },
            unit: OnceLock::new(),
            cl: OnceLock::new(),
            cl_plus: OnceLock::new(),
        };
        debug_assert_eq!(ctx.omega_trace(), delta);
        debug_assert_eq!(ctx.omega_norm(), (delta * delta - delta) / 4);
        Ok(ctx)
    }

    pub fn split() -> Self {
        FieldContext {
            kind: FieldKind::Split,
            unit: OnceLock::new(),
            cl: OnceLock::new(),
            cl_plus: OnceLock::new(),
        }
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn is_split(&self) -> bool {
        self.kind == FieldKind::Split
    }

    pub fn discriminant(&self) -> Option<Int> {
        match self.kind {
            FieldKind::RealQuadratic { delta } => Some(delta),
            FieldKind::Split => None,
        }
    }

    /// Trace of the ring generator w.
    pub fn omega_trace(&self) -> Int {
        match self.kind {
            FieldKind::RealQuadratic { delta } => delta,
            FieldKind::Split => 1,
        }
    }

    /// Norm of the ring generator w.
    pub fn omega_norm(&self) -> Int {
        match self.kind {
            FieldKind::RealQuadratic { delta } => (delta * delta - delta) / 4,
            FieldKind::Split => 0,
        }
    }

    /// Discriminant of the minimal polynomial of w: t^2 - 4n. Equals the
    /// field discriminant for the quadratic case and 1 for the split case.
    pub fn poly_disc(&self) -> Int {
        let t = self.omega_trace();
        let n = self.omega_norm();
        t * t - 4 * n
    }

    /// The different ideal, generated by 2w - t. Trivial for the split
    /// algebra, (sqrt D) for the quadratic field.
    pub fn different(&self) -> Ideal {
        Ideal::principal(self, self.sqrt_disc()).expect("2w - t is invertible")
    }
}

pub use element::FieldElement;
