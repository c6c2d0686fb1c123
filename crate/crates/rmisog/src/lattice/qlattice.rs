//! Rank-4 lattices in F^2 over the fixed rational basis
//! (e1, w*e1, e2, w*e2), stored as an integer Hermite normal form with a
//! positive denominator. Canonical storage makes lattice equality a plain
//! comparison.

use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::matz;
use crate::num_util::{rat, rat_int, Int, Rat};
use crate::rqfield::{FieldContext, FieldElement};

/// A vector in F^2.
pub type Vec2F = [FieldElement; 2];

/// A 2x2 matrix over F, acting on column vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Mat2F {
    pub m: [[FieldElement; 2]; 2],
}

impl Mat2F {
    pub fn identity() -> Self {
        Mat2F {
            m: [
                [FieldElement::one(), FieldElement::zero()],
                [FieldElement::zero(), FieldElement::one()],
            ],
        }
    }

    pub fn scalar(s: FieldElement) -> Self {
        Mat2F { m: [[s, FieldElement::zero()], [FieldElement::zero(), s]] }
    }

    /// Matrix with prescribed columns.
    pub fn from_columns(c0: Vec2F, c1: Vec2F) -> Self {
        Mat2F { m: [[c0[0], c1[0]], [c0[1], c1[1]]] }
    }

    pub fn apply(&self, ctx: &FieldContext, v: Vec2F) -> Vec2F {
        [
            ctx.mul(self.m[0][0], v[0]) + ctx.mul(self.m[0][1], v[1]),
            ctx.mul(self.m[1][0], v[0]) + ctx.mul(self.m[1][1], v[1]),
        ]
    }

    pub fn mul(&self, ctx: &FieldContext, other: &Mat2F) -> Mat2F {
        let mut out = Mat2F::identity();
        for i in 0..2 {
            for j in 0..2 {
                out.m[i][j] = ctx.mul(self.m[i][0], other.m[0][j])
                    + ctx.mul(self.m[i][1], other.m[1][j]);
            }
        }
        out
    }

    pub fn det(&self, ctx: &FieldContext) -> FieldElement {
        ctx.mul(self.m[0][0], self.m[1][1]) - ctx.mul(self.m[0][1], self.m[1][0])
    }

    /// Inverse when the determinant is invertible.
    pub fn inverse(&self, ctx: &FieldContext) -> Option<Mat2F> {
        let d = ctx.inv(self.det(ctx)).ok()?;
        Some(Mat2F {
            m: [
                [ctx.mul(d, self.m[1][1]), -ctx.mul(d, self.m[0][1])],
                [-ctx.mul(d, self.m[1][0]), ctx.mul(d, self.m[0][0])],
            ],
        })
    }
}

pub fn coords_of(v: Vec2F) -> [Rat; 4] {
    [v[0].a, v[0].b, v[1].a, v[1].b]
}

pub fn vec_from_coords(c: [Rat; 4]) -> Vec2F {
    [FieldElement::new(c[0], c[1]), FieldElement::new(c[2], c[3])]
}

/// The wedge x0*y1 - x1*y0 in F.
pub fn wedge(ctx: &FieldContext, x: Vec2F, y: Vec2F) -> FieldElement {
    ctx.mul(x[0], y[1]) - ctx.mul(x[1], y[0])
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QLattice {
    den: Int,
    rows: Vec<Vec<Int>>, // 4x4 HNF, full rank
}

impl QLattice {
    /// Lattice spanned by the given vectors; `None` if they do not span a
    /// rank-4 Z-lattice.
    pub fn from_vectors(vecs: &[Vec2F]) -> Option<QLattice> {
        let coords: Vec<[Rat; 4]> = vecs.iter().map(|&v| coords_of(v)).collect();
        Self::from_coord_rows(&coords)
    }

    pub fn from_coord_rows(coords: &[[Rat; 4]]) -> Option<QLattice> {
        let mut den: Int = 1;
        for row in coords {
            for x in row {
                den = den.lcm(x.denom());
            }
        }
        let rows: matz::Mat = coords
            .iter()
            .map(|row| row.iter().map(|x| (x * rat_int(den)).to_integer()).collect())
            .collect();
        let h = matz::hnf(rows);
        if h.len() != 4 {
            return None;
        }
        Some(Self::normalized(den, h))
    }

    fn normalized(den: Int, rows: matz::Mat) -> QLattice {
        let mut g = den;
        for r in &rows {
            for &x in r {
                g = num_integer::gcd(g, x);
            }
        }
        let rows = rows
            .into_iter()
            .map(|r| r.into_iter().map(|x| x / g).collect())
            .collect();
        QLattice { den: den / g, rows }
    }

    pub fn basis_vectors(&self) -> [Vec2F; 4] {
        let mut out = [[FieldElement::zero(), FieldElement::zero()]; 4];
        for (i, r) in self.rows.iter().enumerate() {
            out[i] = vec_from_coords([
                rat(r[0], self.den),
                rat(r[1], self.den),
                rat(r[2], self.den),
                rat(r[3], self.den),
            ]);
        }
        out
    }

    pub fn den(&self) -> Int {
        self.den
    }

    pub fn integer_rows(&self) -> &[Vec<Int>] {
        &self.rows
    }

    /// Covolume relative to the standard lattice Z^4 of the coordinate
    /// basis: |det| / den^4.
    pub fn covolume(&self) -> Rat {
        let d = matz::det(&self.rows).abs();
        rat(d, self.den.pow(4))
    }

    /// Exact coefficients of a vector over the lattice basis (the basis is
    /// a Q-basis, so this always solves).
    pub fn rational_coefficients(&self, v: [Rat; 4]) -> [Rat; 4] {
        let mut rem: Vec<Rat> = v.iter().map(|x| x * rat_int(self.den)).collect();
        let mut out = [rat_int(0); 4];
        for (i, row) in self.rows.iter().enumerate() {
            let q = rem[i] / rat_int(row[i]);
            out[i] = q;
            for j in 0..4 {
                rem[j] = rem[j] - q * rat_int(row[j]);
            }
        }
        debug_assert!(rem.iter().all(|x| x.is_zero()));
        out
    }

    /// Integer coefficients when the vector lies in the lattice.
    pub fn coefficients_of(&self, v: [Rat; 4]) -> Option<[Int; 4]> {
        let q = self.rational_coefficients(v);
        let mut out = [0; 4];
        for i in 0..4 {
            if !q[i].is_integer() {
                return None;
            }
            out[i] = q[i].to_integer();
        }
        Some(out)
    }

    pub fn contains_coords(&self, v: [Rat; 4]) -> bool {
        self.coefficients_of(v).is_some()
    }

    pub fn contains_vector(&self, v: Vec2F) -> bool {
        self.contains_coords(coords_of(v))
    }

    pub fn contains_lattice(&self, other: &QLattice) -> bool {
        other
            .basis_vectors()
            .iter()
            .all(|&v| self.contains_vector(v))
    }

    /// Index [self : sub] when sub is contained in self.
    pub fn index_of(&self, sub: &QLattice) -> Int {
        debug_assert!(self.contains_lattice(sub), "index requires containment");
        let ratio = sub.covolume() / self.covolume();
        debug_assert!(ratio.is_integer());
        ratio.to_integer()
    }

    pub fn sum(&self, other: &QLattice) -> QLattice {
        let den = self.den.lcm(&other.den);
        let mut rows: matz::Mat = Vec::with_capacity(8);
        for r in &self.rows {
            rows.push(r.iter().map(|&x| x * (den / self.den)).collect());
        }
        for r in &other.rows {
            rows.push(r.iter().map(|&x| x * (den / other.den)).collect());
        }
        Self::normalized(den, matz::hnf(rows))
    }

    pub fn intersect(&self, other: &QLattice) -> QLattice {
        let den = self.den.lcm(&other.den);
        let a1: matz::Mat = self
            .rows
            .iter()
            .map(|r| r.iter().map(|&x| x * (den / self.den)).collect())
            .collect();
        let a2: matz::Mat = other
            .rows
            .iter()
            .map(|r| r.iter().map(|&x| x * (den / other.den)).collect())
            .collect();
        // kernel of (u, v) -> u A1 - v A2 gives u-parts spanning the intersection
        let mut stacked: matz::Mat = Vec::with_capacity(8);
        for r in &a1 {
            stacked.push(r.clone());
        }
        for r in &a2 {
            stacked.push(r.iter().map(|&x| -x).collect());
        }
        let kernel = matz::left_kernel(&stacked);
        let rows: matz::Mat = kernel
            .iter()
            .map(|k| matz::row_mat_mul(&k[..4], &a1))
            .collect();
        let h = matz::hnf(rows);
        assert_eq!(h.len(), 4, "intersection of full lattices has full rank");
        Self::normalized(den, h)
    }

    /// Scales the lattice by a positive rational.
    pub fn scale_rat(&self, r: Rat) -> QLattice {
        assert!(r.is_positive());
        let rows = self
            .rows
            .iter()
            .map(|row| row.iter().map(|&x| x * r.numer()).collect())
            .collect();
        Self::normalized(self.den * r.denom(), rows)
    }

    /// Image under multiplication by a field scalar (invertible).
    pub fn scale_field(&self, ctx: &FieldContext, s: FieldElement) -> QLattice {
        let vecs: Vec<Vec2F> = self
            .basis_vectors()
            .iter()
            .map(|&v| [ctx.mul(s, v[0]), ctx.mul(s, v[1])])
            .collect();
        QLattice::from_vectors(&vecs).expect("scalar is invertible")
    }

    /// Image under an invertible F-linear map.
    pub fn apply_matrix(&self, ctx: &FieldContext, g: &Mat2F) -> QLattice {
        let vecs: Vec<Vec2F> = self
            .basis_vectors()
            .iter()
            .map(|&v| g.apply(ctx, v))
            .collect();
        QLattice::from_vectors(&vecs).expect("matrix is invertible")
    }

    /// Product of an ideal with this lattice: the span of g*b over ideal
    /// basis elements g and lattice basis vectors b.
    pub fn ideal_times(&self, ctx: &FieldContext, ideal: &crate::rqfield::Ideal) -> QLattice {
        let mut vecs = Vec::with_capacity(8);
        for g in ideal.basis() {
            for b in self.basis_vectors() {
                vecs.push([ctx.mul(g, b[0]), ctx.mul(g, b[1])]);
            }
        }
        QLattice::from_vectors(&vecs).expect("ideal times lattice is full rank")
    }

    /// The sublattice {v in self : s*v in self} for a field element s.
    pub fn stable_under(&self, ctx: &FieldContext, s: FieldElement) -> QLattice {
        // v = z R / den; s v in L iff z R Y = w R for integral z, w, with Y
        // the coordinate matrix of multiplication by s
        let y = scalar_coord_rows(ctx, s);
        let ry: Vec<Vec<Rat>> = self
            .rows
            .iter()
            .map(|r| {
                (0..4)
                    .map(|j| (0..4).map(|k| rat_int(r[k]) * y[k][j]).sum())
                    .collect()
            })
            .collect();
        // solve z * RY = w * R for integral z, w
        let mut den: Int = 1;
        for r in &ry {
            for x in r {
                den = den.lcm(x.denom());
            }
        }
        let ry_int: matz::Mat = ry
            .iter()
            .map(|r| r.iter().map(|x| (x * rat_int(den)).to_integer()).collect())
            .collect();
        let r_int: matz::Mat = self
            .rows
            .iter()
            .map(|r| r.iter().map(|&x| x * den).collect())
            .collect();
        let mut stacked: matz::Mat = Vec::with_capacity(8);
        for r in &ry_int {
            stacked.push(r.clone());
        }
        for r in &r_int {
            stacked.push(r.iter().map(|&x| -x).collect());
        }
        let kernel = matz::left_kernel(&stacked);
        let rows: matz::Mat = kernel
            .iter()
            .map(|k| matz::row_mat_mul(&k[..4], &self.rows))
            .collect();
        let h = matz::hnf(rows);
        assert_eq!(h.len(), 4, "stable sublattice has full rank");
        Self::normalized(self.den, h)
    }
}

/// Coordinate rows of multiplication by a field scalar: row i is the image
/// of the i-th coordinate basis vector, so row vectors map by v -> v * M.
pub fn scalar_coord_rows(ctx: &FieldContext, s: FieldElement) -> Vec<Vec<Rat>> {
    let t = rat_int(ctx.omega_trace());
    let n = rat_int(ctx.omega_norm());
    let block = [[s.a, s.b], [-n * s.b, s.a + t * s.b]];
    let mut out = vec![vec![rat_int(0); 4]; 4];
    for c in 0..2 {
        for i in 0..2 {
            for j in 0..2 {
                out[2 * c + i][2 * c + j] = block[i][j];
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q5() -> FieldContext {
        FieldContext::real_quadratic(5).unwrap()
    }

    fn std_z4() -> QLattice {
        let e = |i: usize| {
            let mut c = [rat_int(0); 4];
            c[i] = rat_int(1);
            vec_from_coords(c)
        };
        QLattice::from_vectors(&[e(0), e(1), e(2), e(3)]).unwrap()
    }

    #[test]
    fn membership_and_canonical_form() {
        let l = std_z4();
        assert!(l.contains_coords([rat_int(1), rat_int(2), rat_int(-3), rat_int(0)]));
        assert!(!l.contains_coords([rat(1, 2), rat_int(0), rat_int(0), rat_int(0)]));
        let half = l.scale_rat(rat(1, 2));
        assert!(half.contains_coords([rat(1, 2), rat_int(0), rat_int(0), rat_int(0)]));
        assert_eq!(half.index_of(&l), 16);
        assert_eq!(half.covolume(), rat(1, 16));
    }

    #[test]
    fn sum_and_intersection() {
        let l = std_z4();
        let a = l.scale_rat(rat(1, 2));
        let b = l.scale_rat(rat(1, 3));
        assert_eq!(a.intersect(&b), l);
        assert_eq!(a.sum(&b), l.scale_rat(rat(1, 6)));
        // idempotents
        assert_eq!(a.sum(&a), a);
        assert_eq!(a.intersect(&a), a);
    }

    #[test]
    fn field_scaling_multiplies_covolume_by_norm() {
        let ctx = q5();
        let l = std_z4();
        let w = ctx.omega();
        let lw = l.scale_field(&ctx, w);
        // mult by w has determinant N(w)^2 on F^2
        assert_eq!(lw.covolume() / l.covolume(), rat_int(25));
        let s = ctx.sqrt_disc();
        let ls = l.scale_field(&ctx, s);
        assert_eq!(ls.covolume() / l.covolume(), rat_int(25));
    }

    #[test]
    fn stable_under_omega() {
        let ctx = q5();
        // the full Z_F^2 lattice is omega-stable
        let l = std_z4();
        assert_eq!(l.stable_under(&ctx, ctx.omega()), l);
        // Z + 2wZ in each component is not; its omega-stable part has index
        let rows = vec![
            [rat_int(1), rat_int(0), rat_int(0), rat_int(0)],
            [rat_int(0), rat_int(2), rat_int(0), rat_int(0)],
            [rat_int(0), rat_int(0), rat_int(1), rat_int(0)],
            [rat_int(0), rat_int(0), rat_int(0), rat_int(2)],
        ];
        let l2 = QLattice::from_coord_rows(&rows).unwrap();
        let m = l2.stable_under(&ctx, ctx.omega());
        assert!(l2.contains_lattice(&m));
        assert!(m.basis_vectors().iter().all(|&v| {
            let wv = [ctx.mul(ctx.omega(), v[0]), ctx.mul(ctx.omega(), v[1])];
            l2.contains_vector(wv)
        }));
    }

    #[test]
    fn mat2f_inverse() {
        let ctx = q5();
        let g = Mat2F {
            m: [
                [FieldElement::one(), ctx.omega()],
                [FieldElement::zero(), FieldElement::one()],
            ],
        };
        let gi = g.inverse(&ctx).unwrap();
        assert_eq!(g.mul(&ctx, &gi), Mat2F::identity());
        let l = std_z4();
        let img = l.apply_matrix(&ctx, &g);
        assert_eq!(img.apply_matrix(&ctx, &gi), l);
    }
}
