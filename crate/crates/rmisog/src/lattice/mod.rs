//! Surfaces as polarized lattices.
//!
//! A node is a rank-4 lattice L in F^2 together with a twist theta in F*;
//! the polarization form is E(x, y) = Tr(theta * (x0 y1 - x1 y0)), required
//! to be integral and unimodular on L. Multiplication by F acts diagonally
//! on F^2, which realizes the real multiplication, and quotient isogenies
//! are lattice enlargements L <= L' <= beta^{-1} L with the twist scaled
//! by beta.

mod isogeny;
mod isometry;
mod qlattice;
mod torsion;

pub use isogeny::{multiplication_isogeny, quotient_by_kernel, LatticeIsogeny};
pub use isometry::{is_isomorphic, is_isomorphic_with, steinitz_class_index, IsometryParams};
pub use qlattice::{coords_of, scalar_coord_rows, vec_from_coords, wedge, Mat2F, QLattice, Vec2F};
pub use torsion::{intermediate_lattices, subgroup_shape, TorsionGroup};

use std::sync::Arc;

use num_integer::Integer;

use crate::matz;
use crate::num_util::{rat_int, Int, Rat};
use crate::rqfield::{FieldContext, FieldElement, Ideal};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LatticeError {
    #[error("nodes belong to different field contexts")]
    MixedContexts,
    #[error("beta is not totally positive")]
    NotTotallyPositive,
    #[error("beta does not act on the lattice (not in the multiplier ring)")]
    NotInMultiplierRing,
    #[error("kernel is not a subgroup of the beta-torsion")]
    InvalidKernel,
    #[error("kernel is not isotropic: the quotient form is not integral")]
    NotIsotropic,
    #[error("kernel is isotropic but not maximal: quotient Gram determinant {det} > 1")]
    NotMaximal { det: Int },
    #[error("polarization data is invalid: {0}")]
    InvalidPolarization(&'static str),
    #[error("composition endpoints do not match")]
    Mismatch,
    #[error("multiplier ring is already maximal")]
    AlreadyMaximal,
    #[error("isometry search exhausted its height bound {bound}")]
    SearchBoundExceeded { bound: Int },
}

/// A principally polarized surface model: lattice plus twist.
#[derive(Debug, Clone)]
pub struct SurfaceNode {
    ctx: Arc<FieldContext>,
    lattice: QLattice,
    theta: FieldElement,
}

impl PartialEq for SurfaceNode {
    fn eq(&self, other: &Self) -> bool {
        self.ctx == other.ctx && self.lattice == other.lattice && self.theta == other.theta
    }
}
impl Eq for SurfaceNode {}

impl std::hash::Hash for SurfaceNode {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.ctx.kind().hash(state);
        self.lattice.hash(state);
        self.theta.hash(state);
    }
}

impl SurfaceNode {
    pub fn new(
        ctx: Arc<FieldContext>,
        lattice: QLattice,
        theta: FieldElement,
    ) -> Result<Self, LatticeError> {
        if ctx.norm(theta) == rat_int(0) {
            return Err(LatticeError::InvalidPolarization("theta must be invertible"));
        }
        let node = SurfaceNode { ctx, lattice, theta };
        let basis = node.lattice.basis_vectors();
        for (i, &x) in basis.iter().enumerate() {
            for &y in basis.iter().skip(i + 1) {
                if !node.form(x, y).is_integer() {
                    return Err(LatticeError::InvalidPolarization(
                        "form is not integral on the lattice",
                    ));
                }
            }
        }
        let det = node.gram_det();
        if det != rat_int(1) {
            return Err(LatticeError::InvalidPolarization("form is not unimodular"));
        }
        #[cfg(debug_assertions)]
        {
            let w = node.ctx.omega();
            for &x in &basis {
                for &y in &basis {
                    let wx = [node.ctx.mul(w, x[0]), node.ctx.mul(w, x[1])];
                    let wy = [node.ctx.mul(w, y[0]), node.ctx.mul(w, y[1])];
                    debug_assert_eq!(node.form(wx, y), node.form(x, wy), "RM compatibility");
                }
            }
        }
        Ok(node)
    }

    pub fn ctx(&self) -> &Arc<FieldContext> {
        &self.ctx
    }

    pub fn lattice(&self) -> &QLattice {
        &self.lattice
    }

    pub fn theta(&self) -> FieldElement {
        self.theta
    }

    /// The polarization form E(x, y) = Tr(theta * wedge(x, y)).
    pub fn form(&self, x: Vec2F, y: Vec2F) -> Rat {
        self.ctx.trace(self.ctx.mul(self.theta, wedge(&self.ctx, x, y)))
    }

    pub fn gram_det(&self) -> Rat {
        gram_det_of(&self.ctx, self.theta, &self.lattice)
    }

    /// Conductor of the multiplier ring {mu : mu L <= L}: the smallest
    /// c >= 1 with c*w*L <= L, so the ring is Z + c*w*Z.
    pub fn conductor(&self) -> Int {
        let w = self.ctx.omega();
        let mut c: Int = 1;
        for v in self.lattice.basis_vectors() {
            let wv = [self.ctx.mul(w, v[0]), self.ctx.mul(w, v[1])];
            let coeffs = self.lattice.rational_coefficients(coords_of(wv));
            for q in coeffs {
                c = c.lcm(q.denom());
            }
        }
        c
    }

    /// The beta-torsion subgroup beta^{-1} L / L with its Weil pairing.
    pub fn torsion_group(&self, beta: FieldElement) -> Result<TorsionGroup, LatticeError> {
        torsion::torsion_group(self, beta)
    }

    /// The full torsion A[I] = I^{-1} L / L of an integral ideal, as the
    /// enlarged lattice I^{-1} L.
    pub fn ideal_torsion_lattice(&self, ideal: &Ideal) -> QLattice {
        self.lattice.ideal_times(&self.ctx, &ideal.inverse(&self.ctx))
    }
}

fn gram_det_of(ctx: &FieldContext, theta: FieldElement, lattice: &QLattice) -> Rat {
    let basis = lattice.basis_vectors();
    let rows: Vec<Vec<Rat>> = basis
        .iter()
        .map(|&x| {
            basis
                .iter()
                .map(|&y| ctx.trace(ctx.mul(theta, wedge(ctx, x, y))))
                .collect()
        })
        .collect();
    det4_rat(&rows)
}

fn det4_rat(m: &[Vec<Rat>]) -> Rat {
    let mut a: Vec<Vec<Rat>> = m.to_vec();
    let n = a.len();
    let mut det = rat_int(1);
    for k in 0..n {
        let pivot = (k..n).find(|&r| a[r][k] != rat_int(0));
        let Some(p) = pivot else { return rat_int(0) };
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        det = det * a[k][k];
        for r in k + 1..n {
            let f = a[r][k] / a[k][k];
            for cix in k..n {
                let s = a[k][cix];
                a[r][cix] = a[r][cix] - f * s;
            }
        }
    }
    det
}

/// Canonical representative of a node under rational scaling: the lattice
/// is rescaled to a primitive integral one (isometric via the scalar, with
/// the twist absorbing its square). Keeps coordinate growth bounded along
/// quotient chains.
pub fn scalar_normalized(node: &SurfaceNode) -> SurfaceNode {
    let d = node.lattice().den();
    let g = matz::gcd_all(
        node.lattice()
            .integer_rows()
            .iter()
            .flat_map(|r| r.iter().copied()),
    );
    if d == g {
        return node.clone();
    }
    let scale = crate::num_util::rat(d, g);
    let lattice = node.lattice().scale_rat(scale);
    let ctx = node.ctx();
    let inv_sq = FieldElement::new((scale * scale).recip(), rat_int(0));
    let theta = ctx.mul(node.theta(), inv_sq);
    SurfaceNode::new(Arc::clone(ctx), lattice, theta)
        .expect("rational scaling preserves unimodularity")
}

/// The standard node: L = Z_F e1 + d^{-1} e2 (d the different) with
/// E((x1,x2),(y1,y2)) = Tr(x1 y2 - x2 y1).
pub fn standard_node(ctx: &Arc<FieldContext>) -> SurfaceNode {
    let codiff = ctx.different().inverse(ctx);
    let [d1, d2] = codiff.basis();
    let zero = FieldElement::zero();
    let vectors = [
        [FieldElement::one(), zero],
        [ctx.omega(), zero],
        [zero, d1],
        [zero, d2],
    ];
    let lattice = QLattice::from_vectors(&vectors).expect("standard lattice has full rank");
    SurfaceNode::new(Arc::clone(ctx), lattice, FieldElement::one())
        .expect("trace pairing against the codifferent is unimodular")
}

/// A node whose multiplier ring is the order Z + c*w*Z: the first
/// component carries the order, the second its trace dual.
pub fn node_with_conductor(ctx: &Arc<FieldContext>, c: Int) -> SurfaceNode {
    assert!(c >= 1);
    let t = rat_int(ctx.omega_trace());
    let n = rat_int(ctx.omega_norm());
    let d = t * t - rat_int(4) * n;
    let cw = FieldElement::new(rat_int(0), rat_int(c));
    // trace duals of {1, c*w}
    let f1 = FieldElement::new((t * t - rat_int(2) * n) / d, -t / d);
    let f2 = FieldElement::new(-t / (rat_int(c) * d), rat_int(2) / (rat_int(c) * d));
    let zero = FieldElement::zero();
    let vectors = [
        [FieldElement::one(), zero],
        [cw, zero],
        [zero, f1],
        [zero, f2],
    ];
    let lattice = QLattice::from_vectors(&vectors).expect("full rank");
    SurfaceNode::new(Arc::clone(ctx), lattice, FieldElement::one())
        .expect("order paired with its trace dual is unimodular")
}

/// Conductor reduction: a chain of l-isogenies, one per prime factor of
/// the conductor with multiplicity in ascending order, ending at a node
/// with maximal multiplier ring. Each step quotients by the kernel
/// (1/l) {v in L : (c/l) w v in L}.
pub fn conductor_reduction(node: &SurfaceNode) -> Result<Vec<LatticeIsogeny>, LatticeError> {
    let c0 = node.conductor();
    if c0 == 1 {
        return Err(LatticeError::AlreadyMaximal);
    }
    let mut chain = Vec::new();
    let mut current = node.clone();
    loop {
        let c = current.conductor();
        if c == 1 {
            break;
        }
        let ell = crate::num_util::factor(c)[0].0;
        let y = FieldElement::new(rat_int(0), rat_int(c / ell));
        let stable = current.lattice.stable_under(&current.ctx, y);
        let enlarged = stable.scale_rat(crate::num_util::rat(1, ell));
        let (target, step) = quotient_by_kernel(&current, FieldElement::from_int(ell), &enlarged)?;
        assert_eq!(target.conductor(), c / ell, "conductor drops by l per step");
        chain.push(step);
        current = target;
    }
    Ok(chain)
}

/// The kernel A[c] intersect A[c*w] of the full conductor reduction,
/// as an enlarged lattice over the node; its quotient is (Z/c)^2.
pub fn conductor_kernel(node: &SurfaceNode) -> QLattice {
    let c = node.conductor();
    let stable = node.lattice.stable_under(&node.ctx, node.ctx.omega());
    stable.scale_rat(crate::num_util::rat(1, c))
}
