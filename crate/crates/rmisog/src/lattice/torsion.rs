//! Torsion quotients beta^{-1} L / L with their Weil pairing, and
//! enumeration of subgroups as intermediate lattices.

use num_traits::Signed;

use super::{coords_of, LatticeError, QLattice, SurfaceNode, Vec2F};
use crate::matz;
use crate::num_util::{rat, rat_int, Int, Rat};
use crate::rqfield::FieldElement;

/// The finite module M / L for lattices L <= M, presented by cyclic
/// generators from the Smith normal form.
#[derive(Debug, Clone)]
pub struct TorsionGroup {
    pub base: QLattice,
    pub cover: QLattice,
    pub beta: FieldElement,
    /// Cyclic orders, largest-to-smallest not guaranteed; entries of 1 are
    /// kept so generators align with the cover basis transform.
    pub orders: Vec<Int>,
    /// Lifts of the cyclic generators, as coordinate vectors.
    pub gens: Vec<[Rat; 4]>,
    pub exponent: Int,
    theta_beta: FieldElement,
}

pub(super) fn torsion_group(
    node: &SurfaceNode,
    beta: FieldElement,
) -> Result<TorsionGroup, LatticeError> {
    let ctx = node.ctx();
    if ctx.is_totally_positive(beta) != Ok(true) {
        return Err(LatticeError::NotTotallyPositive);
    }
    let beta_inv = ctx.inv(beta).expect("totally positive implies invertible");
    let cover = node.lattice().scale_field(ctx, beta_inv);
    if !cover.contains_lattice(node.lattice()) {
        return Err(LatticeError::NotInMultiplierRing);
    }
    let rel = relation_matrix(node.lattice(), &cover);
    let s = matz::smith(&rel);
    // new cover basis Qinv * rows(cover); generator i has order diag[i]
    let cover_rows: matz::Mat = cover.integer_rows().to_vec();
    let new_basis = matz::mat_mul(&s.qinv, &cover_rows);
    let mut orders = Vec::new();
    let mut gens = Vec::new();
    for (i, &d) in s.diag.iter().enumerate() {
        orders.push(d.abs());
        let row = &new_basis[i];
        gens.push([
            rat(row[0], cover.den()),
            rat(row[1], cover.den()),
            rat(row[2], cover.den()),
            rat(row[3], cover.den()),
        ]);
    }
    let exponent = orders.iter().copied().max().unwrap_or(1);
    let expected: Int = orders.iter().product();
    let norm = ctx.norm(beta);
    debug_assert_eq!(rat_int(expected), norm * norm, "order of A[beta] is N(beta)^2");
    Ok(TorsionGroup {
        base: node.lattice().clone(),
        cover,
        beta,
        orders,
        gens,
        exponent,
        theta_beta: ctx.mul(node.theta(), beta),
    })
}

impl TorsionGroup {
    pub fn order(&self) -> Int {
        self.orders.iter().product()
    }

    /// Weil pairing e_beta on the quotient, with values in Z/exponent:
    /// e(x, y) = exponent * E(beta x, y) mod exponent.
    pub fn weil_pairing(
        &self,
        node: &SurfaceNode,
        x: Vec2F,
        y: Vec2F,
    ) -> Int {
        let ctx = node.ctx();
        let val = ctx.trace(ctx.mul(self.theta_beta, super::wedge(ctx, x, y)));
        let scaled = val * rat_int(self.exponent);
        debug_assert!(scaled.is_integer(), "pairing values lie in (1/N) Z");
        scaled.to_integer().rem_euclid(self.exponent)
    }
}

/// Integer matrix R with rows(base) = R * rows(cover).
pub(super) fn relation_matrix(base: &QLattice, cover: &QLattice) -> matz::Mat {
    base.basis_vectors()
        .iter()
        .map(|&v| {
            cover
                .coefficients_of(coords_of(v))
                .expect("base is contained in cover")
                .to_vec()
        })
        .collect()
}

/// Abstract shape of the quotient mid/base as its nontrivial cyclic
/// orders, largest first.
pub fn subgroup_shape(base: &QLattice, mid: &QLattice) -> Vec<Int> {
    let rel = relation_matrix(base, mid);
    let s = matz::smith(&rel);
    let mut shape: Vec<Int> = s.diag.iter().map(|d| d.abs()).filter(|&d| d > 1).collect();
    shape.sort_unstable_by(|a, b| b.cmp(a));
    shape
}

/// All lattices between base and cover, optionally restricted to a given
/// subgroup order [mid : base]. Subgroups of cover/base correspond to
/// Hermite normal forms H over the cover basis whose row span contains
/// the relation lattice of base.
pub fn intermediate_lattices(
    base: &QLattice,
    cover: &QLattice,
    subgroup_order: Option<Int>,
) -> Vec<QLattice> {
    let r = relation_matrix(base, cover);
    let det_r = matz::det(&r).abs();
    let exponent = matz::smith(&r).diag.iter().map(|d| d.abs()).max().unwrap_or(1);
    let target_index = subgroup_order.map(|n| {
        assert_eq!(det_r % n, 0, "subgroup order must divide the quotient order");
        det_r / n
    });

    let divisors: Vec<Int> = (1..=exponent).filter(|d| exponent % d == 0).collect();
    let mut out = Vec::new();
    let mut h = vec![vec![0i128; 4]; 4];
    let mut diag = [0i128; 4];

    // enumerate diagonal tuples, then reduced off-diagonal entries
    enumerate_diags(&divisors, det_r, target_index, &mut diag, 0, &mut |diag| {
        for i in 0..4 {
            for j in 0..4 {
                h[i][j] = if i == j { diag[i] } else { 0 };
            }
        }
        off_diag_loop(&r, &mut h, diag, 0, &mut |h| {
            let rows: matz::Mat = matz::mat_mul(h, cover.integer_rows());
            let lat = QLattice::from_coord_rows(
                &rows
                    .iter()
                    .map(|row| {
                        [
                            rat(row[0], cover.den()),
                            rat(row[1], cover.den()),
                            rat(row[2], cover.den()),
                            rat(row[3], cover.den()),
                        ]
                    })
                    .collect::<Vec<_>>(),
            )
            .expect("full rank");
            out.push(lat);
        });
    });
    out.sort();
    out.dedup();
    out
}

fn enumerate_diags(
    divisors: &[Int],
    det_r: Int,
    target_index: Option<Int>,
    diag: &mut [Int; 4],
    pos: usize,
    f: &mut impl FnMut(&[Int; 4]),
) {
    if pos == 4 {
        let prod: Int = diag.iter().product();
        if det_r % prod != 0 {
            return;
        }
        if let Some(t) = target_index {
            if prod != t {
                return;
            }
        }
        f(diag);
        return;
    }
    for &d in divisors {
        diag[pos] = d;
        // the partial product must already divide det_r
        if det_r % diag[..=pos].iter().product::<Int>() == 0 {
            enumerate_diags(divisors, det_r, target_index, diag, pos + 1, f);
        }
    }
}

fn off_diag_loop(
    r: &matz::Mat,
    h: &mut matz::Mat,
    diag: &[Int; 4],
    slot: usize,
    f: &mut impl FnMut(&matz::Mat),
) {
    // off-diagonal slots (i, j), i < j, entries mod diag[j]
    const SLOTS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    if slot == SLOTS.len() {
        if contains_relations(r, h) {
            f(h);
        }
        return;
    }
    let (i, j) = SLOTS[slot];
    for v in 0..diag[j] {
        h[i][j] = v;
        off_diag_loop(r, h, diag, slot + 1, f);
    }
    h[i][j] = 0;
}

/// Every row of R lies in the row span of the upper triangular H.
fn contains_relations(r: &matz::Mat, h: &matz::Mat) -> bool {
    for row in r {
        let mut rem = row.clone();
        for i in 0..4 {
            if rem[i] % h[i][i] != 0 {
                return false;
            }
            let q = rem[i] / h[i][i];
            if q != 0 {
                for j in i..4 {
                    rem[j] -= q * h[i][j];
                }
            }
        }
    }
    true
}
