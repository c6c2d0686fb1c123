//! Deciding whether two nodes are isomorphic: an F-linear map g of F^2
//! with g L_a = L_b carrying one polarization form to the other.
//!
//! Carrying the form forces det(g) = theta_a / theta_b, so the search has
//! four F-degrees of freedom. Cheap necessary invariants (conductor,
//! covolume, the wedge plane, the saturation shape) reject most distinct
//! pairs; otherwise candidate images of a fixed F-basis pair of the source
//! are enumerated by increasing height, with the second image solved from
//! the determinant constraint. Exhausting the bound is an error, never a
//! silent false.

use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::{coords_of, subgroup_shape, LatticeError, Mat2F, QLattice, SurfaceNode, Vec2F};
use crate::matz;
use crate::num_util::{rat_int, Int, Rat};
use crate::rqfield::{FieldContext, FieldElement};

#[derive(Debug, Clone, Copy)]
pub struct IsometryParams {
    /// Coefficient height bound for candidate basis images.
    pub max_coeff: Int,
}

impl Default for IsometryParams {
    fn default() -> Self {
        IsometryParams { max_coeff: 5 }
    }
}

/// Rank-2 lattices in F (viewed as Q^2), canonically stored; used for
/// content modules {lambda : lambda v in L} and wedge planes.
#[derive(Debug, Clone, PartialEq, Eq)]
struct PlaneLat {
    den: Int,
    rows: matz::Mat,
}

impl PlaneLat {
    fn from_rat_rows(rows: &[(Rat, Rat)]) -> Option<PlaneLat> {
        let mut den: Int = 1;
        for (a, b) in rows {
            den = den.lcm(a.denom());
            den = den.lcm(b.denom());
        }
        let int_rows: matz::Mat = rows
            .iter()
            .map(|(a, b)| vec![(a * rat_int(den)).to_integer(), (b * rat_int(den)).to_integer()])
            .collect();
        let h = matz::hnf(int_rows);
        if h.len() != 2 {
            return None;
        }
        let mut g = den;
        for r in &h {
            for &x in r {
                g = num_integer::gcd(g, x);
            }
        }
        Some(PlaneLat {
            den: den / g,
            rows: h.into_iter().map(|r| r.into_iter().map(|x| x / g).collect()).collect(),
        })
    }

    fn scale_field(&self, ctx: &FieldContext, s: FieldElement) -> Option<PlaneLat> {
        let rats: Vec<(Rat, Rat)> = self
            .rows
            .iter()
            .map(|r| {
                let e = FieldElement::new(
                    crate::num_util::rat(r[0], self.den),
                    crate::num_util::rat(r[1], self.den),
                );
                let se = ctx.mul(s, e);
                (se.a, se.b)
            })
            .collect();
        PlaneLat::from_rat_rows(&rats)
    }
}

/// The plane spanned by all wedges of basis vectors; an isometry scales it
/// by det(g).
fn wedge_plane(ctx: &FieldContext, l: &QLattice) -> PlaneLat {
    let basis = l.basis_vectors();
    let mut rows = Vec::new();
    for i in 0..4 {
        for j in i + 1..4 {
            let w = super::wedge(ctx, basis[i], basis[j]);
            rows.push((w.a, w.b));
        }
    }
    PlaneLat::from_rat_rows(&rows).expect("wedges of a unimodular lattice span a plane")
}

/// Content module {lambda in F : lambda v in L}; `None` when v has a
/// nontrivial annihilator (possible only over the split algebra).
fn content_module(ctx: &FieldContext, v: Vec2F, l: &QLattice) -> Option<PlaneLat> {
    // lambda = (c0 + c1 w); coords of lambda * v are linear in (c0, c1)
    let w = ctx.omega();
    let img0 = coords_of(v);
    let img1 = coords_of([ctx.mul(w, v[0]), ctx.mul(w, v[1])]);
    // functionals vanishing on L-span... solve integrally:
    // c * T = m * B for integer (c, m) after scaling
    let mut den: Int = l.den();
    for x in img0.iter().chain(img1.iter()) {
        den = den.lcm(x.denom());
    }
    let t_rows: matz::Mat = [img0, img1]
        .iter()
        .map(|row| row.iter().map(|x| (x * rat_int(den)).to_integer()).collect())
        .collect();
    let b_rows: matz::Mat = l
        .integer_rows()
        .iter()
        .map(|r| r.iter().map(|&x| x * (den / l.den())).collect())
        .collect();
    let mut stacked = t_rows.clone();
    for r in &b_rows {
        stacked.push(r.iter().map(|&x| -x).collect());
    }
    let kernel = matz::left_kernel(&stacked);
    // c-parts of the kernel span the content; degenerate v gives rank < 2
    let rows: Vec<(Rat, Rat)> = kernel
        .iter()
        .map(|k| (rat_int(k[0]), rat_int(k[1])))
        .collect();
    if matz::hnf(rows.iter().map(|(a, b)| vec![*a.numer(), *b.numer()]).collect()).len() != 2 {
        return None;
    }
    PlaneLat::from_rat_rows(&rows)
}

pub fn is_isomorphic(a: &SurfaceNode, b: &SurfaceNode) -> Result<bool, LatticeError> {
    is_isomorphic_with(a, b, IsometryParams::default())
}

/// Index of the Steinitz class (the class of the wedge ideal) in the
/// ordinary class group; `None` when the multiplier ring is non-maximal,
/// where the wedge span is not an ideal of the maximal order.
pub fn steinitz_class_index(node: &SurfaceNode) -> Option<usize> {
    if node.conductor() != 1 {
        return None;
    }
    let ctx = node.ctx();
    let basis = node.lattice().basis_vectors();
    let mut wedges = Vec::new();
    for i in 0..4 {
        for j in i + 1..4 {
            wedges.push(super::wedge(ctx, basis[i], basis[j]));
        }
    }
    let ideal = crate::rqfield::Ideal::from_generators(ctx, &wedges).ok()?;
    let cg = ctx.class_group(false);
    Some(cg.class_of(ctx, &ideal))
}

pub fn is_isomorphic_with(
    a: &SurfaceNode,
    b: &SurfaceNode,
    params: IsometryParams,
) -> Result<bool, LatticeError> {
    if a.ctx() != b.ctx() {
        return Err(LatticeError::MixedContexts);
    }
    if a == b {
        return Ok(true);
    }
    let ctx = a.ctx();
    let d0 = ctx
        .div_exact(a.theta(), b.theta())
        .expect("thetas are invertible");

    // necessary invariants
    if a.conductor() != b.conductor() {
        return Ok(false);
    }
    let nd0 = ctx.norm(d0).abs();
    if b.lattice().covolume() != nd0 * a.lattice().covolume() {
        return Ok(false);
    }
    let wa = wedge_plane(ctx, a.lattice());
    let wb = wedge_plane(ctx, b.lattice());
    match wa.scale_field(ctx, d0) {
        Some(scaled) => {
            if scaled != wb {
                return Ok(false);
            }
        }
        None => return Ok(false),
    }
    let sat_a = saturation_shape(ctx, a.lattice());
    let sat_b = saturation_shape(ctx, b.lattice());
    if sat_a != sat_b {
        return Ok(false);
    }

    // pick an F-basis pair (x, y) of L_a with invertible wedge
    let basis_a = a.lattice().basis_vectors();
    let mut pair = None;
    'outer: for i in 0..4 {
        for j in i + 1..4 {
            let w = super::wedge(ctx, basis_a[i], basis_a[j]);
            if !ctx.norm(w).is_zero() {
                pair = Some((basis_a[i], basis_a[j]));
                break 'outer;
            }
        }
    }
    let (x, y) = pair.expect("a unimodular lattice spans F^2");
    let content_x = content_module(ctx, x, a.lattice()).expect("x has trivial annihilator");
    let content_y = content_module(ctx, y, a.lattice()).expect("y has trivial annihilator");
    let s0 = ctx.mul(d0, super::wedge(ctx, x, y));
    let basis_b = b.lattice().basis_vectors();
    let xy_inv = Mat2F::from_columns(x, y)
        .inverse(ctx)
        .expect("wedge of (x, y) is invertible");

    let h = params.max_coeff;
    let mut coeffs = [0i128; 4];
    for shell in 0..=h {
        let mut found = false;
        enumerate_shell(&mut coeffs, 0, shell, &mut |c| {
            if found {
                return;
            }
            let z = combine(ctx, &basis_b, c);
            if content_module(ctx, z, b.lattice()).as_ref() != Some(&content_x) {
                return;
            }
            if let Some(g) = try_second_image(ctx, a, b, z, s0, &content_y, &xy_inv, h) {
                debug_assert_eq!(g.det(ctx), d0);
                found = true;
            }
        });
        if found {
            return Ok(true);
        }
    }
    Err(LatticeError::SearchBoundExceeded { bound: h })
}

fn saturation_shape(ctx: &FieldContext, l: &QLattice) -> Vec<Int> {
    let w = ctx.omega();
    let wl: Vec<Vec2F> = l
        .basis_vectors()
        .iter()
        .map(|&v| [ctx.mul(w, v[0]), ctx.mul(w, v[1])])
        .collect();
    let wl = QLattice::from_vectors(&wl).expect("full rank");
    let sat = l.sum(&wl);
    subgroup_shape(l, &sat)
}

fn combine(ctx: &FieldContext, basis: &[Vec2F; 4], c: &[Int; 4]) -> Vec2F {
    let mut out = [FieldElement::zero(), FieldElement::zero()];
    for (i, &ci) in c.iter().enumerate() {
        if ci != 0 {
            let s = FieldElement::from_int(ci);
            out[0] = out[0] + ctx.mul(s, basis[i][0]);
            out[1] = out[1] + ctx.mul(s, basis[i][1]);
        }
    }
    out
}

/// Enumerates coefficient vectors with max |c_i| equal to `shell`.
fn enumerate_shell(c: &mut [Int; 4], pos: usize, shell: Int, f: &mut impl FnMut(&[Int; 4])) {
    if pos == 4 {
        if c.iter().map(|x| x.abs()).max().unwrap() == shell {
            f(c);
        }
        return;
    }
    for v in -shell..=shell {
        c[pos] = v;
        enumerate_shell(c, pos + 1, shell, f);
    }
}

/// Given the image z of x, solves for images w of y with
/// wedge(z, w) = s0 among lattice points of bounded height, builds the
/// candidate isometry and verifies it maps L_a onto L_b (covolumes agree,
/// so one containment is enough).
#[allow(clippy::too_many_arguments)]
fn try_second_image(
    ctx: &FieldContext,
    a: &SurfaceNode,
    b: &SurfaceNode,
    z: Vec2F,
    s0: FieldElement,
    content_y: &PlaneLat,
    xy_inv: &Mat2F,
    h: Int,
) -> Option<Mat2F> {
    let lat = b.lattice();
    // wedge(z, w) = z0 w1 - z1 w0: two rational equations in the four
    // coordinates of w
    let mut eq = vec![vec![rat_int(0); 2]; 4];
    // coords of w: (w0a, w0b, w1a, w1b); contribution of w0: -z1 * w0
    let t = rat_int(ctx.omega_trace());
    let n = rat_int(ctx.omega_norm());
    // multiplication matrix: (s * (a + b w)) coords = (sa*a - n*sb*b, sb*a + (sa + t*sb)*b)
    let mul_rows = |s: FieldElement| -> [[Rat; 2]; 2] {
        [[s.a, s.b], [-n * s.b, s.a + t * s.b]]
    };
    let mz1 = mul_rows(-z[1]);
    let mz0 = mul_rows(z[0]);
    for i in 0..2 {
        for j in 0..2 {
            eq[i][j] = mz1[i][j]; // from w0 coords
            eq[2 + i][j] = mz0[i][j]; // from w1 coords
        }
    }
    // m * (B * eq) = den * s0 for integer coefficient vectors m over basis_b
    let b_rows = lat.integer_rows();
    let mut a_mat = vec![vec![rat_int(0); 2]; 4];
    for r in 0..4 {
        for cix in 0..2 {
            let mut acc = rat_int(0);
            for k in 0..4 {
                acc = acc + rat_int(b_rows[r][k]) * eq[k][cix];
            }
            a_mat[r][cix] = acc;
        }
    }
    let rhs = [
        s0.a * rat_int(lat.den()),
        s0.b * rat_int(lat.den()),
    ];
    let mut den: Int = 1;
    for row in &a_mat {
        for v in row {
            den = den.lcm(v.denom());
        }
    }
    for v in &rhs {
        den = den.lcm(v.denom());
    }
    let a_int: matz::Mat = a_mat
        .iter()
        .map(|row| row.iter().map(|v| (v * rat_int(den)).to_integer()).collect())
        .collect();
    let b_int: Vec<Int> = rhs.iter().map(|v| (v * rat_int(den)).to_integer()).collect();
    let m0 = matz::solve_left(&a_int, &b_int)?;
    let kernel = matz::hnf(matz::left_kernel(&a_int));
    // reduce the particular solution by the kernel to keep heights small
    let mut m0 = m0;
    for row in &kernel {
        let pivot_col = (0..4).find(|&j| row[j] != 0).unwrap();
        let q = div_round(m0[pivot_col], row[pivot_col]);
        if q != 0 {
            for j in 0..4 {
                m0[j] -= q * row[j];
            }
        }
    }
    // enumerate kernel translates
    let kdim = kernel.len();
    let mut ts = vec![0i128; kdim.max(1)];
    let mut best: Option<Mat2F> = None;
    enumerate_box(&mut ts, 0, h, &mut |tvec| {
        if best.is_some() {
            return;
        }
        let mut m = m0.clone();
        for (ti, krow) in tvec.iter().zip(kernel.iter()) {
            for j in 0..4 {
                m[j] += ti * krow[j];
            }
        }
        let coords = [
            sum_coords(b_rows, &m, 0, lat.den()),
            sum_coords(b_rows, &m, 1, lat.den()),
            sum_coords(b_rows, &m, 2, lat.den()),
            sum_coords(b_rows, &m, 3, lat.den()),
        ];
        let w = super::vec_from_coords(coords);
        if content_module(ctx, w, lat).as_ref() != Some(content_y) {
            return;
        }
        let g = Mat2F::from_columns(z, w).mul(ctx, xy_inv);
        let maps_into = a
            .lattice()
            .basis_vectors()
            .iter()
            .all(|&v| lat.contains_vector(g.apply(ctx, v)));
        if maps_into {
            best = Some(g);
        }
    });
    best
}

fn sum_coords(rows: &[Vec<Int>], m: &[Int], j: usize, den: Int) -> Rat {
    let mut acc = 0;
    for (i, &mi) in m.iter().enumerate() {
        acc += mi * rows[i][j];
    }
    crate::num_util::rat(acc, den)
}

fn div_round(a: Int, b: Int) -> Int {
    let half = b.abs() / 2;
    if a >= 0 {
        (a + half) / b.abs() * b.signum()
    } else {
        -((-a + half) / b.abs()) * b.signum()
    }
}

fn enumerate_box(ts: &mut [Int], pos: usize, h: Int, f: &mut impl FnMut(&[Int])) {
    if pos == ts.len() {
        f(ts);
        return;
    }
    for v in -h..=h {
        ts[pos] = v;
        enumerate_box(ts, pos + 1, h, f);
    }
}
