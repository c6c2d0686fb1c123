//! Kernel decomposition and type theory for isogenies with maximal real
//! multiplication.
//!
//! A Z_F-stable Lagrangian kernel decomposes by CRT into local components
//! at the primes dividing beta. Split components are identified with
//! Lagrangians of (Z/p^e)^2 through a deterministic symplectic basis of
//! A[p^e]; inert components stay Z_F-stable Lagrangians of (Z/q^e)^4 with
//! an explicit omega action. The (cyclic, torsion, inert) ideal triple
//! classifies the kernel, and the factorization procedures split off the
//! inert part and peel cyclic/torsion parts along narrowly principal
//! ideals.

use num_traits::Signed;

use crate::lattice::{
    quotient_by_kernel, LatticeError, LatticeIsogeny, QLattice, SurfaceNode, Vec2F,
};
use crate::num_util::{rat, rat_int, Int};
use crate::rqfield::{FieldElement, FieldError, Ideal, PrimeSplitting};
use crate::symplectic::{LocalModule, LocalSubgroup};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KernelError {
    #[error("ramified prime {0} divides beta; types are defined for split and inert primes only")]
    RamifiedUnsupported(Int),
    #[error("kernel is not stable under the ring action")]
    NotStable,
    #[error("kernel is not Lagrangian in A[beta]")]
    NotLagrangian,
    #[error("ideal does not divide the required type")]
    NotDividing,
    #[error("ideal has no totally positive generator")]
    NotNarrowlyPrincipal,
    #[error("inert type is not trivial")]
    InertNotTrivial,
    #[error("ideal class is not a square in the narrow class group")]
    NotSquareInNarrowClassGroup,
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// The ideal triple classifying a kernel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsogenyType {
    pub cyc: Ideal,
    pub tor: Ideal,
    pub inert: Ideal,
}

impl IsogenyType {
    pub fn trivial() -> Self {
        IsogenyType { cyc: Ideal::one(), tor: Ideal::one(), inert: Ideal::one() }
    }

    /// The positive integer generating the inert type.
    pub fn inert_generator(&self) -> Int {
        let n = self.inert.norm();
        debug_assert!(n.is_integer());
        crate::num_util::isqrt(n.to_integer())
    }

    pub fn format(&self, ctx: &crate::rqfield::FieldContext) -> String {
        format!(
            "cyc={} tor={} inert={}",
            self.cyc.format(ctx),
            self.tor.format(ctx),
            self.inert.format(ctx)
        )
    }
}

/// A split local component: the kernel piece at a split prime, in the
/// coordinates of a deterministically chosen symplectic basis of A[p^e].
#[derive(Debug, Clone)]
pub struct SplitComponent {
    pub prime: Ideal,
    pub p: Int,
    pub e: u32,
    pub local: LocalSubgroup,
    pub m: u32,
    /// Enlarged lattice L + lifts of the component.
    pub piece: QLattice,
}

/// An inert local component: Z_F-stable, maximal isotropic in A[q^e],
/// with the omega action recorded on the torsion generators.
#[derive(Debug, Clone)]
pub struct InertComponent {
    pub q: Int,
    pub e: u32,
    pub piece: QLattice,
    /// Matrix of the omega action on the four cyclic generators of
    /// A[q^e], with entries mod q^e.
    pub omega_action: Vec<Vec<Int>>,
}

#[derive(Debug, Clone)]
pub struct KernelDescriptor {
    node: SurfaceNode,
    beta: FieldElement,
    kernel: QLattice,
    split: Vec<SplitComponent>,
    inert: Vec<InertComponent>,
}

/// Both factorization outputs: the first factor g, the residual h, with
/// their kernel descriptors on the intermediate and source nodes.
#[derive(Debug, Clone)]
pub struct Factorization {
    pub g: LatticeIsogeny,
    pub h: LatticeIsogeny,
    pub g_descriptor: KernelDescriptor,
    pub h_descriptor: KernelDescriptor,
}

/// Cor-style factorization through multiplication by n = N(c).
#[derive(Debug, Clone)]
pub struct MultipliedFactorization {
    pub factorization: Factorization,
    pub n: Int,
    /// The composite f . [n] that the two factors compose to.
    pub composite: LatticeIsogeny,
}

impl KernelDescriptor {
    pub fn node(&self) -> &SurfaceNode {
        &self.node
    }

    pub fn beta(&self) -> FieldElement {
        self.beta
    }

    pub fn kernel_lattice(&self) -> &QLattice {
        &self.kernel
    }

    pub fn split_components(&self) -> &[SplitComponent] {
        &self.split
    }

    pub fn inert_components(&self) -> &[InertComponent] {
        &self.inert
    }

    /// The isogeny A -> A/ker described by this kernel.
    pub fn isogeny(&self) -> LatticeIsogeny {
        let (_, iso) = quotient_by_kernel(&self.node, self.beta, &self.kernel)
            .expect("descriptor kernels are validated Lagrangians");
        iso
    }

    /// Direct sum of the split components, as an enlarged lattice.
    pub fn split_subgroup(&self) -> QLattice {
        let mut acc = self.node.lattice().clone();
        for c in &self.split {
            acc = acc.sum(&c.piece);
        }
        acc
    }
}

/// Builds the kernel lattice L + Z_F-span of the given torsion elements:
/// the enlarged lattice of the ring module they generate.
pub fn kernel_from_generators(node: &SurfaceNode, gens: &[Vec2F]) -> QLattice {
    let ctx = node.ctx();
    let w = ctx.omega();
    let mut vecs: Vec<Vec2F> = node.lattice().basis_vectors().to_vec();
    for &g in gens {
        vecs.push(g);
        vecs.push([ctx.mul(w, g[0]), ctx.mul(w, g[1])]);
    }
    QLattice::from_vectors(&vecs).expect("contains the full-rank node lattice")
}

/// Decomposes a kernel (given as the enlarged lattice L <= K <= beta^{-1} L)
/// into local components at the primes dividing beta.
pub fn crt_decompose(
    node: &SurfaceNode,
    beta: FieldElement,
    kernel: &QLattice,
) -> Result<KernelDescriptor, KernelError> {
    let ctx = node.ctx();
    if ctx.is_totally_positive(beta) != Ok(true) {
        return Err(KernelError::Lattice(LatticeError::NotTotallyPositive));
    }
    // ring stability of both the node lattice and the kernel
    let w = ctx.omega();
    let stable = |l: &QLattice| {
        l.basis_vectors()
            .iter()
            .all(|&v| l.contains_vector([ctx.mul(w, v[0]), ctx.mul(w, v[1])]))
    };
    if !stable(node.lattice()) || !stable(kernel) {
        return Err(KernelError::NotStable);
    }
    let beta_ideal = Ideal::principal(ctx, beta)?;
    let factors = beta_ideal.factor(ctx);
    // classify primes, rejecting ramified ones
    let mut split = Vec::new();
    let mut inert = Vec::new();
    for (prime, exp) in &factors {
        assert!(*exp > 0, "beta is integral");
        let nrm = prime.norm();
        let p_rat = if nrm.is_integer() { nrm.to_integer() } else { 0 };
        let rational_p = smallest_prime_divisor(p_rat);
        match crate::rqfield::factor_rational_prime(ctx, rational_p)? {
            PrimeSplitting::Ramified { .. } => {
                return Err(KernelError::RamifiedUnsupported(rational_p));
            }
            PrimeSplitting::Split { .. } => split.push((*prime, *exp as u32, rational_p)),
            PrimeSplitting::Inert { .. } => inert.push((rational_p, *exp as u32)),
        }
    }
    // Lagrangian check: order N(beta) and isotropy are exactly the
    // conditions under which the quotient succeeds
    match quotient_by_kernel(node, beta, kernel) {
        Ok(_) => {}
        Err(LatticeError::NotIsotropic) | Err(LatticeError::NotMaximal { .. }) => {
            return Err(KernelError::NotLagrangian);
        }
        Err(e) => return Err(KernelError::Lattice(e)),
    }

    let mut split_components = Vec::new();
    for (prime, e, p) in split {
        let piece_cover = node.ideal_torsion_lattice(&prime.pow(ctx, e as i32));
        let piece = kernel.intersect(&piece_cover);
        let basis = symplectic_basis(node, beta, &prime, e, p)?;
        let module = LocalModule::new(p, e);
        let mut gens = Vec::new();
        for v in piece.basis_vectors() {
            gens.push(basis.coordinates(node, v));
        }
        let local = LocalSubgroup::from_generators(module, &gens);
        let (m, _) = local.local_type().map_err(|_| KernelError::NotLagrangian)?;
        split_components.push(SplitComponent { prime, p, e, local, m, piece });
    }
    split_components.sort_by_key(|c| (c.p, c.prime.hnf()));

    let mut inert_components = Vec::new();
    for (q, e) in inert {
        let qe = q.pow(e);
        let cover = node
            .lattice()
            .scale_rat(rat(1, qe));
        let piece = kernel.intersect(&cover);
        let tg = node.torsion_group(FieldElement::from_int(qe))?;
        // omega action on the four cyclic generators, mod q^e
        let mut omega_action = Vec::new();
        for g in &tg.gens {
            let gv = crate::lattice::vec_from_coords(*g);
            let wg = [ctx.mul(w, gv[0]), ctx.mul(w, gv[1])];
            let row = torsion_coordinates(&tg, node, wg);
            omega_action.push(row);
        }
        inert_components.push(InertComponent { q, e, piece, omega_action });
    }
    inert_components.sort_by_key(|c| c.q);

    // CRT: the components must reassemble the kernel
    let mut acc = node.lattice().clone();
    for c in &split_components {
        acc = acc.sum(&c.piece);
    }
    for c in &inert_components {
        acc = acc.sum(&c.piece);
    }
    if acc != *kernel {
        return Err(KernelError::NotStable);
    }

    Ok(KernelDescriptor {
        node: node.clone(),
        beta,
        kernel: kernel.clone(),
        split: split_components,
        inert: inert_components,
    })
}

fn smallest_prime_divisor(n: Int) -> Int {
    crate::num_util::factor(n)[0].0
}

/// Coordinates of a torsion element over the cyclic generators of a
/// torsion group, entries mod the generator orders.
fn torsion_coordinates(
    tg: &crate::lattice::TorsionGroup,
    node: &SurfaceNode,
    v: Vec2F,
) -> Vec<Int> {
    // solve v = sum c_i g_i mod L: express v in the cover basis and use the
    // Smith decomposition implicitly through the generators
    let mut best: Option<Vec<Int>> = None;
    // generators with order 1 contribute nothing
    let nontrivial: Vec<usize> = (0..tg.orders.len()).filter(|&i| tg.orders[i] > 1).collect();
    let mut c = vec![0i128; nontrivial.len()];
    search_coords(tg, node, v, &nontrivial, &mut c, 0, &mut best);
    best.expect("element lies in the torsion group")
}

fn search_coords(
    tg: &crate::lattice::TorsionGroup,
    node: &SurfaceNode,
    v: Vec2F,
    idx: &[usize],
    c: &mut Vec<Int>,
    pos: usize,
    out: &mut Option<Vec<Int>>,
) {
    if out.is_some() {
        return;
    }
    if pos == idx.len() {
        let ctx = node.ctx();
        let mut acc = [FieldElement::zero(), FieldElement::zero()];
        for (k, &i) in idx.iter().enumerate() {
            let g = crate::lattice::vec_from_coords(tg.gens[i]);
            let s = FieldElement::from_int(c[k]);
            acc[0] = acc[0] + ctx.mul(s, g[0]);
            acc[1] = acc[1] + ctx.mul(s, g[1]);
        }
        let diff = [v[0] - acc[0], v[1] - acc[1]];
        if tg.base.contains_vector(diff) {
            let mut full = vec![0; tg.orders.len()];
            for (k, &i) in idx.iter().enumerate() {
                full[i] = c[k];
            }
            *out = Some(full);
        }
        return;
    }
    for val in 0..tg.orders[idx[pos]] {
        c[pos] = val;
        search_coords(tg, node, v, idx, c, pos + 1, out);
    }
}

/// A symplectic Z/p^e-basis (u, v) of A[p^e] at a split prime: both of
/// full order, with unit pairing. Coordinates of any element follow from
/// the pairing.
struct SymplecticBasis {
    u: Vec2F,
    v: Vec2F,
    pe: Int,
    beta: FieldElement,
    pairing_inv: Int,
}

impl SymplecticBasis {
    fn pairing(&self, node: &SurfaceNode, x: Vec2F, y: Vec2F) -> Int {
        let ctx = node.ctx();
        let theta_beta = ctx.mul(node.theta(), self.beta);
        let val = ctx.trace(ctx.mul(theta_beta, crate::lattice::wedge(ctx, x, y)));
        let scaled = val * rat_int(self.pe);
        debug_assert!(scaled.is_integer());
        scaled.to_integer().rem_euclid(self.pe)
    }

    fn coordinates(&self, node: &SurfaceNode, x: Vec2F) -> (Int, Int) {
        let a = (self.pairing(node, x, self.v) * self.pairing_inv).rem_euclid(self.pe);
        let b = (-self.pairing(node, x, self.u) * self.pairing_inv).rem_euclid(self.pe);
        (a, b)
    }
}

fn mod_inverse(a: Int, m: Int) -> Option<Int> {
    let a = a.rem_euclid(m);
    (1..m).find(|&x| (a * x).rem_euclid(m) == 1)
}

/// Chooses the first basis pair, in a deterministic scan order, on which
/// the pairing is a unit multiple of the standard one.
fn symplectic_basis(
    node: &SurfaceNode,
    beta: FieldElement,
    prime: &Ideal,
    e: u32,
    p: Int,
) -> Result<SymplecticBasis, KernelError> {
    let ctx = node.ctx();
    let pe = p.pow(e);
    let pe_ideal = prime.pow(ctx, e as i32);
    let cover = node.ideal_torsion_lattice(&pe_ideal);
    // cyclic generators of A[p^e] from the Smith form of (L, cover)
    let base = node.lattice().clone();
    let r: Vec<Vec<Int>> = base
        .basis_vectors()
        .iter()
        .map(|&bv| {
            cover
                .coefficients_of(crate::lattice::coords_of(bv))
                .expect("L inside A[p^e] cover")
                .to_vec()
        })
        .collect();
    let s = crate::matz::smith(&r);
    let new_basis = crate::matz::mat_mul(&s.qinv, cover.integer_rows());
    let mut gens: Vec<Vec2F> = Vec::new();
    for (i, &d) in s.diag.iter().enumerate() {
        if d.abs() == pe {
            let row = &new_basis[i];
            gens.push(crate::lattice::vec_from_coords([
                rat(row[0], cover.den()),
                rat(row[1], cover.den()),
                rat(row[2], cover.den()),
                rat(row[3], cover.den()),
            ]));
        } else {
            debug_assert_eq!(d.abs(), 1, "A[p^e] at a split prime is (Z/p^e)^2");
        }
    }
    if gens.len() != 2 {
        return Err(KernelError::NotStable);
    }
    let mut basis = SymplecticBasis {
        u: gens[0],
        v: gens[1],
        pe,
        beta,
        pairing_inv: 1,
    };
    // deterministic scan over coefficient pairs for the two slots
    let candidates: Vec<Vec2F> = {
        let mut out = Vec::new();
        for c1 in 0..pe {
            for c2 in 0..pe {
                if (c1, c2) == (0, 0) {
                    continue;
                }
                let s1 = FieldElement::from_int(c1);
                let s2 = FieldElement::from_int(c2);
                out.push([
                    ctx.mul(s1, gens[0][0]) + ctx.mul(s2, gens[1][0]),
                    ctx.mul(s1, gens[0][1]) + ctx.mul(s2, gens[1][1]),
                ]);
            }
        }
        out
    };
    let full_order = |x: &Vec2F| -> bool {
        // order p^e: p^(e-1) x not in L
        let scale = FieldElement::from_int(pe / p);
        let sx = [ctx.mul(scale, x[0]), ctx.mul(scale, x[1])];
        !node.lattice().contains_vector(sx)
    };
    let u = *candidates
        .iter()
        .find(|x| full_order(x))
        .expect("A[p^e] has elements of full order");
    basis.u = u;
    let mut found = None;
    for cand in &candidates {
        if !full_order(cand) {
            continue;
        }
        let pr = basis.pairing(node, u, *cand);
        if num_integer::gcd(pr, pe) == 1 {
            found = Some((*cand, pr));
            break;
        }
    }
    let (v, pr) = found.expect("the pairing on A[p^e] is nondegenerate");
    basis.v = v;
    basis.pairing_inv = mod_inverse(pr, pe).expect("unit pairing value");
    // sanity: coordinates reproduce the basis itself
    debug_assert_eq!(basis.coordinates(node, basis.u), (1, 0));
    debug_assert_eq!(basis.coordinates(node, basis.v), (0, 1));
    Ok(basis)
}

/// The ideal type triple of a decomposed kernel.
pub fn compute_type(k: &KernelDescriptor) -> IsogenyType {
    let ctx = k.node.ctx();
    let mut cyc = Ideal::one();
    let mut tor = Ideal::one();
    let mut inert = Ideal::one();
    for c in &k.split {
        cyc = cyc.mul(ctx, &c.prime.pow(ctx, (c.e - 2 * c.m) as i32));
        tor = tor.mul(ctx, &c.prime.pow(ctx, c.m as i32));
    }
    for c in &k.inert {
        let q_ideal = Ideal::principal(ctx, FieldElement::from_int(c.q)).unwrap();
        inert = inert.mul(ctx, &q_ideal.pow(ctx, c.e as i32));
    }
    let t = IsogenyType { cyc, tor, inert };
    // N(cyc tor^2 inert) = N(beta)
    debug_assert_eq!(
        t.cyc.norm() * t.tor.norm() * t.tor.norm() * t.inert.norm(),
        ctx.norm(k.beta).abs(),
    );
    t
}

/// Splits off the inert part: f = h . g with g carrying exactly the split
/// components (an alpha/n-isogeny) and h the inert part (an n-isogeny with
/// trivial cyclic and torsion types).
pub fn factor_inert(k: &KernelDescriptor) -> Result<Factorization, KernelError> {
    let ctx = k.node.ctx();
    let t = compute_type(k);
    let n = t.inert_generator();
    let beta_g = ctx.div_exact(k.beta, FieldElement::from_int(n))?;
    let split_sub = k.split_subgroup();
    let (mid, g) = quotient_by_kernel(&k.node, beta_g, &split_sub)?;
    let (_, h) = quotient_by_kernel(&mid, FieldElement::from_int(n), &k.kernel)?;
    let full = g.compose(&h)?;
    debug_assert_eq!(&full, &k.isogeny(), "h . g reproduces f");
    let g_descriptor = crt_decompose(&k.node, beta_g, &split_sub)?;
    let h_descriptor = crt_decompose(&mid, FieldElement::from_int(n), &k.kernel)?;
    let ht = compute_type(&h_descriptor);
    debug_assert!(ht.cyc.is_one() && ht.tor.is_one());
    Ok(Factorization { g, h, g_descriptor, h_descriptor })
}

/// Peels a cyclic/torsion factor: given divisors q | cyc(f) and r | tor(f)
/// with q r^2 narrowly principal, produces f = h . g where g is a
/// beta'-isogeny of cyclic type q and torsion type r, and h carries the
/// rest. The local kernel of g is A[p^(r-part)] + p^(e - m - e') K_p with
/// e' the exponent of p in q*r.
pub fn factor_cyclic(
    k: &KernelDescriptor,
    q: &Ideal,
    r: &Ideal,
) -> Result<Factorization, KernelError> {
    let ctx = k.node.ctx();
    let t = compute_type(k);
    if !t.inert.is_one() {
        return Err(KernelError::InertNotTrivial);
    }
    if !q.divides(ctx, &t.cyc) || !r.divides(ctx, &t.tor) {
        return Err(KernelError::NotDividing);
    }
    let qr2 = q.mul(ctx, &r.mul(ctx, r));
    let beta_g = ctx
        .totally_positive_generator(&qr2)
        .map_err(|_| KernelError::NotNarrowlyPrincipal)?;

    let mut kernel_g = k.node.lattice().clone();
    for c in &k.split {
        let qr = q.mul(ctx, r);
        let e_prime = qr.valuation(ctx, &c.prime) as u32;
        let e_second = q.valuation(ctx, &c.prime) as u32;
        let r_exp = e_prime - e_second;
        // A[p^(e'-e'')] part
        if r_exp > 0 {
            let tors = k.node.ideal_torsion_lattice(&c.prime.pow(ctx, r_exp as i32));
            kernel_g = kernel_g.sum(&tors);
        }
        // p^(e - m - e') K_p part: scaling the enlarged piece and adding L
        // back realizes the scaled subgroup
        let s_exp = c.e - c.m - e_prime;
        let scaled = c.piece.scale_rat(rat_int(c.p.pow(s_exp)));
        kernel_g = kernel_g.sum(&scaled);
    }
    let (mid, g) = quotient_by_kernel(&k.node, beta_g, &kernel_g)?;
    let beta_h = ctx.div_exact(k.beta, beta_g)?;
    let (_, h) = quotient_by_kernel(&mid, beta_h, &k.kernel)?;
    let full = g.compose(&h)?;
    debug_assert_eq!(&full, &k.isogeny());
    let g_descriptor = crt_decompose(&k.node, beta_g, &kernel_g)?;
    let h_descriptor = crt_decompose(&mid, beta_h, &k.kernel)?;
    Ok(Factorization { g, h, g_descriptor, h_descriptor })
}

/// Cor-style factorization: for q | cyc(f) a square in the narrow class
/// group and c with c^2 q narrowly principal, factors f . [n] (n = N(c))
/// as h . g where g has torsion type c and cyclic type q.
pub fn factor_cyclic_with_multiplication(
    k: &KernelDescriptor,
    q: &Ideal,
    c: &Ideal,
) -> Result<MultipliedFactorization, KernelError> {
    let ctx = k.node.ctx();
    let t = compute_type(k);
    if !t.inert.is_one() {
        return Err(KernelError::InertNotTrivial);
    }
    if !q.divides(ctx, &t.cyc) {
        return Err(KernelError::NotDividing);
    }
    if !crate::rqfield::is_square_in_narrow_class_group(ctx, q) {
        return Err(KernelError::NotSquareInNarrowClassGroup);
    }
    // c must be a product of split primes (or trivial)
    for (p, _) in c.factor(ctx) {
        let nrm = p.norm();
        let base = smallest_prime_divisor(nrm.to_integer());
        if !matches!(
            crate::rqfield::factor_rational_prime(ctx, base)?,
            PrimeSplitting::Split { .. }
        ) {
            return Err(KernelError::RamifiedUnsupported(base));
        }
    }
    let c2q = c.mul(ctx, c).mul(ctx, q);
    // the totally positive generator must exist; its absence is the
    // narrow-principality precondition failing
    ctx.totally_positive_generator(&c2q)
        .map_err(|_| KernelError::NotNarrowlyPrincipal)?;
    let n_rat = c.norm();
    debug_assert!(n_rat.is_integer());
    let n = n_rat.to_integer();

    // f . [n]: kernel (1/n) K with beta n^2
    let composite_kernel = k.kernel.scale_rat(rat(1, n));
    let beta2 = ctx.mul(FieldElement::from_int(n * n), k.beta);
    let composite_desc = crt_decompose(&k.node, beta2, &composite_kernel)?;
    let (_, composite) = quotient_by_kernel(&k.node, beta2, &composite_kernel)?;
    let fact = factor_cyclic(&composite_desc, q, c)?;
    let recomposed = fact.g.compose(&fact.h)?;
    debug_assert_eq!(recomposed, composite, "f . [n] = h . g");
    Ok(MultipliedFactorization { factorization: fact, n, composite })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::standard_node;
    use crate::rqfield::FieldContext;
    use std::sync::Arc;

    fn arc5() -> Arc<FieldContext> {
        Arc::new(FieldContext::real_quadratic(5).unwrap())
    }

    fn prime_over_11(ctx: &FieldContext) -> (Ideal, Ideal) {
        let ps = ctx.ideals_of_norm(11);
        (ps[0], ps[1])
    }

    #[test]
    fn trivial_kernel_empty_descriptor() {
        let ctx = arc5();
        let node = standard_node(&ctx);
        let d = crt_decompose(&node, FieldElement::one(), node.lattice()).unwrap();
        assert!(d.split_components().is_empty());
        assert!(d.inert_components().is_empty());
        assert_eq!(compute_type(&d), IsogenyType::trivial());
    }

    #[test]
    fn inert_kernel_single_component() {
        // beta = 3 inert over Delta 5: Z_F-stable Lagrangian of A[3]
        let ctx = arc5();
        let node = standard_node(&ctx);
        let three = Ideal::principal(&ctx, FieldElement::from_int(3)).unwrap();
        let laglat = node.ideal_torsion_lattice(&three);
        // A[(3)] has order 81; a Lagrangian needs order 9: take
        // (1/3)L cap stable pieces: use an actual Z_F-stable Lagrangian,
        // namely p^{-1}L for... (3) is inert so use the kernel of a
        // stable line: scan intermediate lattices for a stable Lagrangian
        let t = node.torsion_group(FieldElement::from_int(3)).unwrap();
        let mids = crate::lattice::intermediate_lattices(node.lattice(), &t.cover, Some(9));
        let w = ctx.omega();
        let stable = mids
            .iter()
            .find(|m| {
                m.basis_vectors()
                    .iter()
                    .all(|&v| m.contains_vector([ctx.mul(w, v[0]), ctx.mul(w, v[1])]))
                    && quotient_by_kernel(&node, FieldElement::from_int(3), m).is_ok()
            })
            .expect("a stable Lagrangian of A[3] exists");
        let d = crt_decompose(&node, FieldElement::from_int(3), stable).unwrap();
        assert_eq!(d.split_components().len(), 0);
        assert_eq!(d.inert_components().len(), 1);
        let t = compute_type(&d);
        assert!(t.cyc.is_one() && t.tor.is_one());
        assert_eq!(t.inert, three);
        assert_eq!(t.inert_generator(), 3);
        let _ = laglat;
    }

    #[test]
    fn hurwitz_maass_kernel_type() {
        // beta t.p. generator of p^2 (p | 11), kernel A[p]:
        // cyc = (1), tor = p, inert = (1)
        let ctx = arc5();
        let node = standard_node(&ctx);
        let (p, _) = prime_over_11(&ctx);
        let sq = p.mul(&ctx, &p);
        let beta = ctx.totally_positive_generator(&sq).unwrap();
        let kernel = node.ideal_torsion_lattice(&p);
        let d = crt_decompose(&node, beta, &kernel).unwrap();
        assert_eq!(d.split_components().len(), 1);
        let comp = &d.split_components()[0];
        assert_eq!((comp.p, comp.e, comp.m), (11, 2, 1));
        let t = compute_type(&d);
        assert_eq!(t.cyc, Ideal::one());
        assert_eq!(t.tor, p);
        assert_eq!(t.inert, Ideal::one());
    }

    #[test]
    fn cyclic_kernel_at_both_primes() {
        // beta = 11, kernel cyclic of order 11 in each split component:
        // cyc = p pbar, tor = (1)
        let ctx = arc5();
        let node = standard_node(&ctx);
        let (p, pbar) = prime_over_11(&ctx);
        // cyclic stable kernels of order 11 inside A[p] and A[pbar]: the
        // components A[p] and A[pbar] themselves are (Z/11)^2; a stable
        // order-11 subgroup of A[11] meeting each component in order 11:
        // take G = A[p]-part line + A[pbar]-part line via eigenvector
        // lattices: p^{-1} L cap (1/11) L summed appropriately.
        // A[p] = p^{-1}L/L has order 121 and is killed by 11 and by p;
        // its intersection with the kernel must be one line. Use
        // enumeration: stable Lagrangians of A[11] of shape (11, 11) with
        // m = 0 at both primes.
        let t = node.torsion_group(FieldElement::from_int(11)).unwrap();
        let mids =
            crate::lattice::intermediate_lattices(node.lattice(), &t.cover, Some(121));
        let w = ctx.omega();
        let found = mids
            .iter()
            .filter(|m| {
                m.basis_vectors()
                    .iter()
                    .all(|&v| m.contains_vector([ctx.mul(w, v[0]), ctx.mul(w, v[1])]))
                    && quotient_by_kernel(&node, FieldElement::from_int(11), m).is_ok()
            })
            .map(|m| crt_decompose(&node, FieldElement::from_int(11), m).unwrap())
            .find(|d| {
                let t = compute_type(d);
                t.cyc == p.mul(&ctx, &pbar) && t.tor.is_one()
            });
        assert!(found.is_some(), "a cyclic kernel with cyc = p pbar exists");
    }

    /// First torsion element of exact order `ord` in A[ideal].
    fn torsion_element(node: &SurfaceNode, ideal: &Ideal, ord: Int) -> Vec2F {
        let ctx = node.ctx();
        let cover = node.ideal_torsion_lattice(ideal);
        let r: Vec<Vec<Int>> = node
            .lattice()
            .basis_vectors()
            .iter()
            .map(|&bv| {
                cover
                    .coefficients_of(crate::lattice::coords_of(bv))
                    .unwrap()
                    .to_vec()
            })
            .collect();
        let s = crate::matz::smith(&r);
        let new_basis = crate::matz::mat_mul(&s.qinv, cover.integer_rows());
        for (i, &d) in s.diag.iter().enumerate() {
            if d.abs() == ord {
                let row = &new_basis[i];
                return crate::lattice::vec_from_coords([
                    rat(row[0], cover.den()),
                    rat(row[1], cover.den()),
                    rat(row[2], cover.den()),
                    rat(row[3], cover.den()),
                ]);
            }
        }
        panic!("no torsion element of order {ord}");
    }

    #[test]
    fn factor_inert_mixed_kernel() {
        // beta = 33 over Delta 5: inert part at 3, split lines at p, pbar.
        // g is an 11-isogeny, h a 3-isogeny, h . g = f.
        let ctx = arc5();
        let node = standard_node(&ctx);
        let (p, pbar) = prime_over_11(&ctx);
        let three = Ideal::principal(&ctx, FieldElement::from_int(3)).unwrap();
        let u3 = torsion_element(&node, &three, 3);
        let up = torsion_element(&node, &p, 11);
        let ubar = torsion_element(&node, &pbar, 11);
        let kernel = kernel_from_generators(&node, &[u3, up, ubar]);
        let beta = FieldElement::from_int(33);
        let d = crt_decompose(&node, beta, &kernel).unwrap();
        assert_eq!(d.split_components().len(), 2);
        assert_eq!(d.inert_components().len(), 1);
        let f = factor_inert(&d).unwrap();
        // g is an 11-isogeny (degree N(11) = 121), h a 3-isogeny (degree 9)
        assert_eq!(f.g.beta(), FieldElement::from_int(11));
        assert_eq!(f.g.degree(), 121);
        assert_eq!(f.h.beta(), FieldElement::from_int(3));
        assert_eq!(f.h.degree(), 9);
        assert_eq!(f.g.compose(&f.h).unwrap(), d.isogeny());
        assert_eq!(ctx.mul(f.g.beta(), f.h.beta()), beta);
        let ht = compute_type(&f.h_descriptor);
        assert!(ht.cyc.is_one() && ht.tor.is_one());
        assert_eq!(ht.inert, three);
        let gt = compute_type(&f.g_descriptor);
        assert!(gt.inert.is_one());
        assert_eq!(gt.cyc, p.mul(&ctx, &pbar));
    }

    #[test]
    fn factor_inert_pure_cases() {
        let ctx = arc5();
        let node = standard_node(&ctx);
        let (p, _) = prime_over_11(&ctx);
        // purely split: g = f, h trivial
        let up = torsion_element(&node, &p, 11);
        let kernel = kernel_from_generators(&node, &[up]);
        let beta = ctx
            .totally_positive_generator(&p)
            .expect("p over 11 is narrowly principal for Delta 5");
        let d = crt_decompose(&node, beta, &kernel).unwrap();
        let f = factor_inert(&d).unwrap();
        assert_eq!(f.g.degree(), 11);
        assert_eq!(f.h.degree(), 1);
        // purely inert: g trivial, h = f
        let three = Ideal::principal(&ctx, FieldElement::from_int(3)).unwrap();
        let u3 = torsion_element(&node, &three, 3);
        let kernel = kernel_from_generators(&node, &[u3]);
        let d = crt_decompose(&node, FieldElement::from_int(3), &kernel).unwrap();
        let f = factor_inert(&d).unwrap();
        assert_eq!(f.g.degree(), 1);
        assert_eq!(f.h.degree(), 9);
    }

    #[test]
    fn factor_cyclic_splits_121_kernel() {
        // beta = 121, kernel cyclic of order 121 at each of p, pbar;
        // q = p pbar, r = (1): g and h both 11-isogenies with cyc = p pbar
        let ctx = arc5();
        let node = standard_node(&ctx);
        let (p, pbar) = prime_over_11(&ctx);
        let p2 = p.mul(&ctx, &p);
        let pbar2 = pbar.mul(&ctx, &pbar);
        let u = torsion_element(&node, &p2, 121);
        let v = torsion_element(&node, &pbar2, 121);
        let kernel = kernel_from_generators(&node, &[u, v]);
        let beta = FieldElement::from_int(121);
        let d = crt_decompose(&node, beta, &kernel).unwrap();
        let t = compute_type(&d);
        let ppbar = p.mul(&ctx, &pbar);
        assert_eq!(t.cyc, ppbar.mul(&ctx, &ppbar));
        assert!(t.tor.is_one() && t.inert.is_one());

        let f = factor_cyclic(&d, &ppbar, &Ideal::one()).unwrap();
        assert_eq!(f.g.beta(), FieldElement::from_int(11));
        assert_eq!(f.h.beta(), FieldElement::from_int(11));
        assert_eq!(f.g.degree(), 121);
        assert_eq!(f.h.degree(), 121);
        let gt = compute_type(&f.g_descriptor);
        assert_eq!(gt.cyc, ppbar);
        assert!(gt.tor.is_one());
        let ht = compute_type(&f.h_descriptor);
        assert_eq!(ht.cyc, ppbar);
        assert!(ht.tor.is_one());
        assert_eq!(f.g.compose(&f.h).unwrap(), d.isogeny());
    }

    #[test]
    fn factor_cyclic_trivial_and_full() {
        let ctx = arc5();
        let node = standard_node(&ctx);
        let (p, pbar) = prime_over_11(&ctx);
        let ppbar = p.mul(&ctx, &pbar);
        let up = torsion_element(&node, &p, 11);
        let ubar = torsion_element(&node, &pbar, 11);
        let kernel = kernel_from_generators(&node, &[up, ubar]);
        let d = crt_decompose(&node, FieldElement::from_int(11), &kernel).unwrap();
        // q = cyc, r = tor: h trivial
        let f = factor_cyclic(&d, &ppbar, &Ideal::one()).unwrap();
        assert_eq!(f.h.degree(), 1);
        assert_eq!(f.g.degree(), 121);
        // q = r = (1): g trivial
        let f = factor_cyclic(&d, &Ideal::one(), &Ideal::one()).unwrap();
        assert_eq!(f.g.degree(), 1);
        assert_eq!(f.h.degree(), 121);
        // non-divisor rejected
        let three = Ideal::principal(&ctx, FieldElement::from_int(3)).unwrap();
        assert_eq!(
            factor_cyclic(&d, &three, &Ideal::one()).err(),
            Some(KernelError::NotDividing)
        );
    }

    #[test]
    fn factor_cyclic_separates_torsion() {
        // Hurwitz-Maass-shaped kernel: tor = p. Peeling q = (1), r = p
        // gives a g of torsion type p and trivial cyclic type.
        let ctx = arc5();
        let node = standard_node(&ctx);
        let (p, _) = prime_over_11(&ctx);
        let sq = p.mul(&ctx, &p);
        let beta = ctx.totally_positive_generator(&sq).unwrap();
        let kernel = node.ideal_torsion_lattice(&p);
        let d = crt_decompose(&node, beta, &kernel).unwrap();
        let f = factor_cyclic(&d, &Ideal::one(), &p).unwrap();
        let gt = compute_type(&f.g_descriptor);
        assert_eq!(gt.tor, p);
        assert!(gt.cyc.is_one());
        assert_eq!(f.h.degree(), 1);
    }

    #[test]
    fn cor_multiplication_trivial_c() {
        // c = (1): degenerates to plain factor_cyclic with n = 1
        let ctx = arc5();
        let node = standard_node(&ctx);
        let (p, pbar) = prime_over_11(&ctx);
        let ppbar = p.mul(&ctx, &pbar);
        let up = torsion_element(&node, &p, 11);
        let ubar = torsion_element(&node, &pbar, 11);
        let kernel = kernel_from_generators(&node, &[up, ubar]);
        let d = crt_decompose(&node, FieldElement::from_int(11), &kernel).unwrap();
        let mf = factor_cyclic_with_multiplication(&d, &ppbar, &Ideal::one()).unwrap();
        assert_eq!(mf.n, 1);
        assert_eq!(
            mf.factorization.g.compose(&mf.factorization.h).unwrap(),
            mf.composite
        );
        let gt = compute_type(&mf.factorization.g_descriptor);
        assert_eq!(gt.cyc, ppbar);
    }

    #[test]
    fn cor_multiplication_delta_328() {
        // Q(sqrt 82): narrow class group Z/4. Take a split prime p of
        // narrow class order 4, a kernel with cyc = p^2 pbar^2 (beta = 9),
        // q = p^2 (a square in Cl+), c = p (so c^2 q = p^4 is narrowly
        // principal), n = N(p) = 3.
        let ctx = Arc::new(FieldContext::real_quadratic(328).unwrap());
        let cg = ctx.class_group(true);
        assert_eq!(cg.invariant_factors(), &[4]);
        let mut chosen = None;
        for p_rat in [3i128, 5, 7, 11, 13, 17, 19, 23] {
            if let Ok(PrimeSplitting::Split { p1, .. }) =
                crate::rqfield::factor_rational_prime(&ctx, p_rat)
            {
                if cg.class_order(cg.class_of(&ctx, &p1)) == 4 {
                    chosen = Some((p_rat, p1));
                    break;
                }
            }
        }
        let (p_rat, p) = chosen.expect("a split prime of narrow class order 4 exists");
        let pbar = p.conj(&ctx);
        let node = standard_node(&ctx);
        let p2 = p.mul(&ctx, &p);
        let pbar2 = pbar.mul(&ctx, &pbar);
        let u = torsion_element(&node, &p2, p_rat * p_rat);
        let v = torsion_element(&node, &pbar2, p_rat * p_rat);
        let kernel = kernel_from_generators(&node, &[u, v]);
        let beta = FieldElement::from_int(p_rat * p_rat);
        let d = crt_decompose(&node, beta, &kernel).unwrap();
        let t = compute_type(&d);
        assert_eq!(t.cyc, p2.mul(&ctx, &pbar2));
        assert!(t.tor.is_one());

        // q = p^2 is a square in Cl+, p^4 is narrowly principal
        assert!(crate::rqfield::is_square_in_narrow_class_group(&ctx, &p2));
        let p4 = p2.mul(&ctx, &p2);
        assert!(ctx.totally_positive_generator(&p4).is_ok());
        assert!(ctx.totally_positive_generator(&p2).is_err());

        let mf = factor_cyclic_with_multiplication(&d, &p2, &p).unwrap();
        assert_eq!(mf.n, p_rat);
        let gt = compute_type(&mf.factorization.g_descriptor);
        assert_eq!(gt.tor, p);
        assert_eq!(gt.cyc, p2);
        let ht = compute_type(&mf.factorization.h_descriptor);
        assert_eq!(ht.tor, pbar);
        assert_eq!(ht.cyc, pbar2);
        // the diagram f . [n] = h . g
        assert_eq!(
            mf.factorization.g.compose(&mf.factorization.h).unwrap(),
            mf.composite
        );
    }

    #[test]
    fn cor_multiplication_square_precondition() {
        // Delta 328: a prime of narrow class order 4 is not a square in
        // Cl+ (the squares are the classes of even exponent)
        let ctx = Arc::new(FieldContext::real_quadratic(328).unwrap());
        let cg = ctx.class_group(true);
        let gen_idx = cg.generator_indices()[0];
        let p_gen = cg.reps()[gen_idx];
        assert!(!crate::rqfield::is_square_in_narrow_class_group(&ctx, &p_gen));
    }

    #[test]
    fn torsion_of_tor_type_sits_in_split_subgroup() {
        // A[tor(f)] is contained in the split subgroup and the quotient
        // split/A[tor] is cyclic
        let ctx = arc5();
        let node = standard_node(&ctx);
        let (p, _) = prime_over_11(&ctx);
        let sq = p.mul(&ctx, &p);
        let beta = ctx.totally_positive_generator(&sq).unwrap();
        let kernel = node.ideal_torsion_lattice(&p);
        let d = crt_decompose(&node, beta, &kernel).unwrap();
        let t = compute_type(&d);
        assert_eq!(t.tor, p);
        let tor_lattice = node.ideal_torsion_lattice(&t.tor);
        let split_sub = d.split_subgroup();
        assert!(split_sub.contains_lattice(&tor_lattice));
        let quot = crate::lattice::subgroup_shape(&tor_lattice, &split_sub);
        assert!(quot.len() <= 1, "split/A[tor] is cyclic, got {quot:?}");
    }

    #[test]
    fn ramified_rejected() {
        let ctx = arc5();
        let node = standard_node(&ctx);
        // beta = t.p. generator of the ramified square (5) = p5^2: w has
        // norm 5, and w is totally positive
        let beta = ctx.omega();
        assert_eq!(ctx.is_totally_positive(beta), Ok(true));
        let p5 = ctx.ideals_of_norm(5)[0];
        let kernel = node.ideal_torsion_lattice(&p5);
        assert_eq!(
            crt_decompose(&node, beta, &kernel).err(),
            Some(KernelError::RamifiedUnsupported(5))
        );
    }

    #[test]
    fn non_stable_kernel_rejected() {
        let ctx = arc5();
        let node = standard_node(&ctx);
        let t = node.torsion_group(FieldElement::from_int(2)).unwrap();
        let mids = crate::lattice::intermediate_lattices(node.lattice(), &t.cover, Some(4));
        let w = ctx.omega();
        let unstable = mids.iter().find(|m| {
            !m.basis_vectors()
                .iter()
                .all(|&v| m.contains_vector([ctx.mul(w, v[0]), ctx.mul(w, v[1])]))
        });
        let m = unstable.expect("A[2] has non-stable subgroups");
        assert_eq!(
            crt_decompose(&node, FieldElement::from_int(2), m).err(),
            Some(KernelError::NotStable)
        );
    }
}
