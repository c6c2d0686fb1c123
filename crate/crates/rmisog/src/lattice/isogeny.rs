//! Quotient isogenies as lattice inclusions.
//!
//! An isogeny A -> A/G appears here as the inclusion L <= L' where L' is
//! L enlarged by lifts of G; the target twist is theta * beta. Degrees,
//! composition and the complementary isogeny (whose composite with the
//! original is multiplication by beta) all reduce to lattice bookkeeping.


use super::{gram_det_of, subgroup_shape, LatticeError, QLattice, SurfaceNode};
use crate::num_util::{rat_int, Int};
use crate::rqfield::FieldElement;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeIsogeny {
    source: SurfaceNode,
    target: SurfaceNode,
    beta: FieldElement,
}

impl LatticeIsogeny {
    pub fn source(&self) -> &SurfaceNode {
        &self.source
    }

    pub fn target(&self) -> &SurfaceNode {
        &self.target
    }

    pub fn beta(&self) -> FieldElement {
        self.beta
    }

    /// Degree of the isogeny: the kernel order [L_target : L_source],
    /// which equals N(beta).
    pub fn degree(&self) -> Int {
        self.target.lattice().index_of(self.source.lattice())
    }

    /// Degree of multiplication by beta: N(beta)^2 = degree^2.
    pub fn beta_degree(&self) -> Int {
        let n = self.source.ctx().norm(self.beta);
        debug_assert!(n.is_integer());
        let n = n.to_integer();
        n * n
    }

    /// Abstract shape of the kernel as cyclic orders, largest first.
    pub fn kernel_shape(&self) -> Vec<Int> {
        subgroup_shape(self.source.lattice(), self.target.lattice())
    }

    pub fn identity(node: &SurfaceNode) -> LatticeIsogeny {
        LatticeIsogeny { source: node.clone(), target: node.clone(), beta: FieldElement::one() }
    }

    /// Composition: self followed by next (target of self = source of next).
    pub fn compose(&self, next: &LatticeIsogeny) -> Result<LatticeIsogeny, LatticeError> {
        if self.target != next.source {
            return Err(LatticeError::Mismatch);
        }
        let ctx = self.source.ctx();
        Ok(LatticeIsogeny {
            source: self.source.clone(),
            target: next.target.clone(),
            beta: ctx.mul(self.beta, next.beta),
        })
    }

    /// The complementary isogeny g with g . self = multiplication by beta:
    /// the inclusion L_target <= beta^{-1} L_source.
    pub fn dual_complement(&self) -> LatticeIsogeny {
        let ctx = self.source.ctx();
        let beta_inv = ctx.inv(self.beta).expect("beta invertible");
        let full = self.source.lattice().scale_field(ctx, beta_inv);
        let (_, iso) = quotient_by_kernel(&self.target, self.beta, &full)
            .expect("the complement of a valid isogeny is a valid kernel");
        iso
    }
}

/// Quotient of a node by a kernel presented as the enlarged lattice
/// L <= enlarged <= beta^{-1} L. Succeeds exactly when the kernel is
/// maximal isotropic: the scaled form theta*beta must be integral on the
/// enlarged lattice (isotropy) with unimodular Gram (maximality).
pub fn quotient_by_kernel(
    node: &SurfaceNode,
    beta: FieldElement,
    enlarged: &QLattice,
) -> Result<(SurfaceNode, LatticeIsogeny), LatticeError> {
    let ctx = node.ctx();
    if ctx.is_totally_positive(beta) != Ok(true) {
        return Err(LatticeError::NotTotallyPositive);
    }
    let beta_inv = ctx.inv(beta).expect("totally positive implies invertible");
    let cover = node.lattice().scale_field(ctx, beta_inv);
    if !cover.contains_lattice(node.lattice()) {
        return Err(LatticeError::NotInMultiplierRing);
    }
    if !enlarged.contains_lattice(node.lattice()) || !cover.contains_lattice(enlarged) {
        return Err(LatticeError::InvalidKernel);
    }
    let theta_new = ctx.mul(node.theta(), beta);
    // integrality of the new form on the enlarged lattice = isotropy
    let basis = enlarged.basis_vectors();
    for (i, &x) in basis.iter().enumerate() {
        for &y in basis.iter().skip(i + 1) {
            let v = ctx.trace(ctx.mul(theta_new, super::wedge(ctx, x, y)));
            if !v.is_integer() {
                return Err(LatticeError::NotIsotropic);
            }
        }
    }
    let det = gram_det_of(ctx, theta_new, enlarged);
    if det != rat_int(1) {
        debug_assert!(det.is_integer() && det > rat_int(1));
        return Err(LatticeError::NotMaximal { det: det.to_integer() });
    }
    let target = SurfaceNode::new(ctx.clone(), enlarged.clone(), theta_new)?;
    let iso = LatticeIsogeny { source: node.clone(), target: target.clone(), beta };
    debug_assert_eq!(iso.degree() * iso.degree(), iso.beta_degree());
    Ok((target, iso))
}

/// Multiplication by a totally positive beta as an isogeny: the inclusion
/// L <= beta^{-1} L with twist scaled by beta^2. The target is isomorphic
/// to the source via multiplication by beta.
pub fn multiplication_isogeny(
    node: &SurfaceNode,
    beta: FieldElement,
) -> Result<LatticeIsogeny, LatticeError> {
    let ctx = node.ctx();
    if ctx.is_totally_positive(beta) != Ok(true) {
        return Err(LatticeError::NotTotallyPositive);
    }
    let beta_inv = ctx.inv(beta).expect("invertible");
    let full = node.lattice().scale_field(ctx, beta_inv);
    let beta2 = ctx.mul(beta, beta);
    let (_, iso) = quotient_by_kernel(node, beta2, &full)?;
    Ok(iso)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{intermediate_lattices, standard_node};
    use crate::rqfield::FieldContext;
    use std::sync::Arc;

    fn arc5() -> Arc<FieldContext> {
        Arc::new(FieldContext::real_quadratic(5).unwrap())
    }

    #[test]
    fn hurwitz_maass_quotient_over_11() {
        // Delta = 5, beta a t.p. generator of p^2 (p over 11), kernel A[p]:
        // quotient is unimodular, degree 121 = N(beta)
        let ctx = arc5();
        let node = standard_node(&ctx);
        let p11 = ctx.ideals_of_norm(11)[0];
        let sq = p11.mul(&ctx, &p11);
        let beta = ctx.totally_positive_generator(&sq).unwrap();
        let kernel = node.ideal_torsion_lattice(&p11);
        let (target, iso) = quotient_by_kernel(&node, beta, &kernel).unwrap();
        assert_eq!(iso.degree(), 121);
        assert_eq!(iso.beta_degree(), 121 * 121);
        assert_eq!(target.conductor(), 1);
        assert_eq!(iso.kernel_shape(), vec![11, 11]);
    }

    #[test]
    fn non_maximal_kernel_is_rejected() {
        // beta = 3 inert over Delta = 5: a cyclic subgroup of order 3 is
        // isotropic but has order 3 < N(3) = 9
        let ctx = arc5();
        let node = standard_node(&ctx);
        let t = node.torsion_group(FieldElement::from_int(3)).unwrap();
        let small = intermediate_lattices(node.lattice(), &t.cover, Some(3));
        assert!(!small.is_empty());
        for sub in small {
            match quotient_by_kernel(&node, FieldElement::from_int(3), &sub) {
                Err(LatticeError::NotMaximal { det }) => assert_eq!(det, 9),
                other => panic!("expected NotMaximal, got {other:?}"),
            }
        }
    }

    #[test]
    fn trivial_and_full_kernels() {
        let ctx = arc5();
        let node = standard_node(&ctx);
        // G = A[beta] for beta = 2: E' has Gram det 1/..? the full torsion
        // is not isotropic for e_beta
        let t = node.torsion_group(FieldElement::from_int(2)).unwrap();
        let full = t.cover.clone();
        assert_eq!(
            quotient_by_kernel(&node, FieldElement::from_int(2), &full).err(),
            Some(LatticeError::NotIsotropic)
        );
        // multiplication-by-2 as a 4-isogeny recovers an isomorphic node
        let m2 = multiplication_isogeny(&node, FieldElement::from_int(2)).unwrap();
        assert_eq!(m2.degree(), 16);
        assert_eq!(m2.kernel_shape(), vec![2, 2, 2, 2]);
    }

    #[test]
    fn compose_and_identity() {
        let ctx = arc5();
        let node = standard_node(&ctx);
        let id = LatticeIsogeny::identity(&node);
        let p11 = ctx.ideals_of_norm(11)[0];
        let beta = ctx.totally_positive_generator(&p11.mul(&ctx, &p11)).unwrap();
        let kernel = node.ideal_torsion_lattice(&p11);
        let (_, f) = quotient_by_kernel(&node, beta, &kernel).unwrap();
        assert_eq!(id.compose(&f).unwrap(), f);
        let fid = f.compose(&LatticeIsogeny::identity(f.target())).unwrap();
        assert_eq!(fid, f);
        assert_eq!(f.compose(&id).err(), Some(LatticeError::Mismatch));
    }

    #[test]
    fn dual_complement_gives_multiplication() {
        let ctx = arc5();
        let node = standard_node(&ctx);
        let p11 = ctx.ideals_of_norm(11)[0];
        let beta = ctx.totally_positive_generator(&p11.mul(&ctx, &p11)).unwrap();
        let kernel = node.ideal_torsion_lattice(&p11);
        let (_, f) = quotient_by_kernel(&node, beta, &kernel).unwrap();
        let fhat = f.dual_complement();
        let comp = f.compose(&fhat).unwrap();
        // f-hat . f = [beta]: kernel is all of A[beta]
        assert_eq!(comp.beta(), ctx.mul(beta, beta));
        let expected = multiplication_isogeny(&node, beta).unwrap();
        assert_eq!(comp, expected);
        assert_eq!(comp.degree(), 121 * 121);
    }
}
