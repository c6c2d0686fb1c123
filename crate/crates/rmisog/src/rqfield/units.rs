//! Unit group data: the fundamental unit by the continued-fraction (PQa)
//! expansion of w0 = (D mod 2 + sqrt(D))/2, and representatives of the
//! totally positive units modulo squares.

use num_traits::One;

use super::{FieldContext, FieldElement, FieldError, FieldKind};
use crate::num_util::{isqrt, rat_int, Int};

fn floor_div(a: Int, b: Int) -> Int {
    let q = a / b;
    if a % b != 0 && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

fn compute_fundamental_unit(delta: Int) -> FieldElement {
    let s = isqrt(delta);
    let b = delta.rem_euclid(2);
    let k = (delta - b) / 2;
    let t = delta;
    let n = (delta * delta - delta) / 4;
    // PQa expansion of (P + sqrt(delta))/Q starting from (b, 2)
    let (mut p_i, mut q_i) = (b, 2i128);
    // convergent pairs (p, q), seeded with the usual (1, 0) before a0
    let (mut pm1, mut qm1) = (1i128, 0i128);
    let (mut pm2, mut qm2) = (0i128, 1i128);
    for _ in 0..100_000 {
        assert!(q_i > 0, "PQa denominator stayed positive");
        let a = floor_div(p_i + s, q_i);
        let (pc, qc) = (a * pm1 + pm2, a * qm1 + qm2);
        // candidate = pc - qc * conj(w0) = (pc - qc*b - qc*k) + qc*w
        let cand = FieldElement::new(rat_int(pc - qc * b - qc * k), rat_int(qc));
        let u = pc - qc * b - qc * k;
        let v = qc;
        let nrm = u * u + t * u * v + n * v * v;
        if nrm.abs() == 1 {
            return cand;
        }
        (pm2, qm2) = (pm1, qm1);
        (pm1, qm1) = (pc, qc);
        p_i = a * q_i - p_i;
        let num = delta - p_i * p_i;
        assert_eq!(num % q_i, 0, "PQa invariant Q | (D - P^2)");
        q_i = num / q_i;
    }
    unreachable!("continued fraction of a quadratic irrational is periodic");
}

impl FieldContext {
    /// The fundamental unit, a unit > 1 generating the units modulo +-1.
    pub fn fundamental_unit(&self) -> Result<FieldElement, FieldError> {
        match self.kind() {
            FieldKind::Split => Err(FieldError::SplitFieldHasNoFundamentalUnit),
            FieldKind::RealQuadratic { delta } => {
                Ok(*self.unit.get_or_init(|| compute_fundamental_unit(delta)))
            }
        }
    }

    /// Representatives of the totally positive units modulo squares of
    /// units: {1} when the fundamental unit has norm -1, {1, eps} when it
    /// has norm +1, and {1} for the split algebra.
    pub fn totally_positive_units_mod_squares(&self) -> Vec<FieldElement> {
        match self.kind() {
            FieldKind::Split => vec![FieldElement::one()],
            FieldKind::RealQuadratic { .. } => {
                let eps = self.fundamental_unit().expect("real quadratic");
                if self.norm(eps).is_one() {
                    debug_assert_eq!(self.is_totally_positive(eps), Ok(true));
                    vec![FieldElement::one(), eps]
                } else {
                    vec![FieldElement::one()]
                }
            }
        }
    }
}
