//! Finite symplectic modules (Z/p^e)^2 with the standard alternating
//! pairing ((a,b),(c,d)) -> ad - bc, their subgroups, and the local type
//! invariants of Lagrangian (maximal isotropic) subgroups.
//!
//! Subgroups correspond to lattices M with q Z^2 <= M <= Z^2 (q = p^e) and
//! are stored by the Hermite normal form basis (a, b), (0, c); that makes
//! equality and deduplication plain tuple comparison.

use crate::matz;
use crate::num_util::Int;

pub const DEFAULT_ENUMERATION_BOUND: Int = 343;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum SymplecticError {
    #[error("p^e = {pe} exceeds the enumeration bound {bound}")]
    BoundExceeded { pe: Int, bound: Int },
    #[error("subgroup is not Lagrangian (order {order}, expected {expected})")]
    NotLagrangian { order: Int, expected: Int },
}

/// The module (Z/p^e)^2 with its standard alternating pairing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LocalModule {
    pub p: Int,
    pub e: u32,
}

impl LocalModule {
    pub fn new(p: Int, e: u32) -> Self {
        assert!(crate::num_util::is_prime(p) && e >= 1);
        LocalModule { p, e }
    }

    /// p^e, the exponent of the module and the value modulus of the pairing.
    pub fn modulus(&self) -> Int {
        self.p.pow(self.e)
    }

    pub fn order(&self) -> Int {
        let q = self.modulus();
        q * q
    }

    /// ((a,b),(c,d)) -> ad - bc mod p^e.
    pub fn pairing(&self, x: (Int, Int), y: (Int, Int)) -> Int {
        (x.0 * y.1 - x.1 * y.0).rem_euclid(self.modulus())
    }

    pub fn elements(&self) -> impl Iterator<Item = (Int, Int)> {
        let q = self.modulus();
        (0..q).flat_map(move |a| (0..q).map(move |b| (a, b)))
    }
}

/// A subgroup of a [`LocalModule`], canonically presented by the basis
/// (a, b), (0, c) of its preimage lattice in Z^2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LocalSubgroup {
    pub module: LocalModule,
    a: Int,
    b: Int,
    c: Int,
}

impl LocalSubgroup {
    pub fn from_generators(module: LocalModule, gens: &[(Int, Int)]) -> Self {
        let q = module.modulus();
        let mut rows: matz::Mat = gens
            .iter()
            .map(|&(x, y)| vec![x.rem_euclid(q), y.rem_euclid(q)])
            .collect();
        rows.push(vec![q, 0]);
        rows.push(vec![0, q]);
        let h = matz::hnf(rows);
        assert_eq!(h.len(), 2, "lattice contains q Z^2, so it has full rank");
        LocalSubgroup { module, a: h[0][0], b: h[0][1], c: h[1][1] }
    }

    /// The canonical basis rows (a, b) and (0, c).
    pub fn hnf_basis(&self) -> [(Int, Int); 2] {
        [(self.a, self.b), (0, self.c)]
    }

    pub fn order(&self) -> Int {
        self.module.order() / (self.a * self.c)
    }

    pub fn contains(&self, v: (Int, Int)) -> bool {
        let q = self.module.modulus();
        let (x, y) = (v.0.rem_euclid(q), v.1.rem_euclid(q));
        // solve (x, y) = i (a, b) + j (0, c)
        if x % self.a != 0 {
            return false;
        }
        (y - (x / self.a) * self.b).rem_euclid(self.c) == 0
    }

    pub fn elements(&self) -> Vec<(Int, Int)> {
        let q = self.module.modulus();
        let mut out = Vec::with_capacity(self.order() as usize);
        for i in 0..q / self.a {
            for j in 0..q / self.c {
                out.push(((i * self.a).rem_euclid(q), (i * self.b + j * self.c).rem_euclid(q)));
            }
        }
        debug_assert_eq!(out.len() as Int, self.order());
        out
    }

    /// The pairing vanishes identically on the subgroup.
    pub fn is_isotropic(&self) -> bool {
        // bilinearity reduces the check to the basis pair
        (self.a * self.c).rem_euclid(self.module.modulus()) == 0
    }

    pub fn is_lagrangian(&self) -> bool {
        self.order() == self.module.modulus() && self.is_isotropic()
    }

    /// Smith exponents (big, small): the subgroup is Z/p^big x Z/p^small.
    pub fn smith_type(&self) -> (u32, u32) {
        let q = self.module.modulus();
        // presentation matrix of the subgroup: relations of q Z^2 in the
        // lattice basis
        let c_mat = vec![
            vec![q / self.a, -(q * self.b) / (self.a * self.c)],
            vec![0, q / self.c],
        ];
        let s = matz::smith(&c_mat);
        let mut exps: Vec<u32> = s
            .diag
            .iter()
            .map(|&d| {
                let mut e = 0;
                let mut v = d;
                while v % self.module.p == 0 {
                    v /= self.module.p;
                    e += 1;
                }
                assert_eq!(v, 1, "subgroup order is a power of p");
                e
            })
            .collect();
        exps.sort_unstable_by(|x, y| y.cmp(x));
        (exps[0], exps[1])
    }

    /// Local type of a Lagrangian subgroup: m and the sequence
    /// n_j = log_p #(p^j K intersect M[p]) for 0 <= j < e, computed by
    /// direct counting and checked against the piecewise shape
    /// (2 for j < m, 1 for m <= j < e-m, 0 after).
    pub fn local_type(&self) -> Result<(u32, Vec<u8>), SymplecticError> {
        let q = self.module.modulus();
        if !self.is_lagrangian() {
            return Err(SymplecticError::NotLagrangian { order: self.order(), expected: q });
        }
        let p = self.module.p;
        let e = self.module.e;
        let tor = q / p; // coordinates of M[p] are multiples of p^(e-1)
        let elems = self.elements();
        let mut n = Vec::with_capacity(e as usize);
        let mut scale = 1;
        for _j in 0..e {
            let mut image: Vec<(Int, Int)> = elems
                .iter()
                .map(|&(x, y)| ((x * scale).rem_euclid(q), (y * scale).rem_euclid(q)))
                .collect();
            image.sort_unstable();
            image.dedup();
            let count = image
                .iter()
                .filter(|&&(x, y)| x % tor == 0 && y % tor == 0)
                .count() as Int;
            let nj = match count {
                1 => 0u8,
                _ if count == p => 1,
                _ if count == p * p => 2,
                _ => unreachable!("intersection with the p-torsion has order p^0, p^1 or p^2"),
            };
            n.push(nj);
            scale *= p;
        }
        let m = n.iter().filter(|&&x| x == 2).count() as u32;
        // the three Lagrangian constraints and the piecewise shape
        let ee = e as usize;
        for j in 0..ee {
            assert!(n[j] + n[ee - 1 - j] <= 2, "n_j + n_(e-1-j) <= 2");
            if j > 0 {
                assert!(n[j] <= n[j - 1], "n is nonincreasing");
            }
            let expect = if (j as u32) < m {
                2
            } else if (j as u32) < e - m {
                1
            } else {
                0
            };
            assert_eq!(n[j], expect, "piecewise shape at j = {j}");
        }
        assert_eq!(n.iter().map(|&x| x as u32).sum::<u32>(), e, "sum n_j = e");
        debug_assert_eq!(m, self.smith_type().1, "m equals the small Smith exponent");
        Ok((m, n))
    }
}

/// All Lagrangian subgroups of (Z/p^e)^2, within the default bound.
pub fn enumerate_lagrangians(p: Int, e: u32) -> Result<Vec<LocalSubgroup>, SymplecticError> {
    enumerate_lagrangians_with_bound(p, e, DEFAULT_ENUMERATION_BOUND)
}

pub fn enumerate_lagrangians_with_bound(
    p: Int,
    e: u32,
    bound: Int,
) -> Result<Vec<LocalSubgroup>, SymplecticError> {
    let module = LocalModule::new(p, e);
    let q = module.modulus();
    if q > bound {
        return Err(SymplecticError::BoundExceeded { pe: q, bound });
    }
    let mut out = Vec::new();
    for i in 0..=e {
        let a = p.pow(i);
        let c = q / a;
        for b in 0..c {
            let k = LocalSubgroup { module, a, b, c };
            debug_assert!(k.is_lagrangian());
            out.push(k);
        }
    }
    Ok(out)
}

/// All subgroups of (Z/p^e)^2, canonically ordered.
pub fn enumerate_subgroups(p: Int, e: u32) -> Vec<LocalSubgroup> {
    let module = LocalModule::new(p, e);
    let q = module.modulus();
    let mut out = Vec::new();
    let mut a = 1;
    while a <= q {
        if q % a == 0 {
            let mut c = 1;
            while c <= q {
                if q % c == 0 {
                    for b in 0..c {
                        if (q * b) % (a * c) == 0 {
                            out.push(LocalSubgroup { module, a, b, c });
                        }
                    }
                }
                c *= p;
            }
        }
        a *= p;
    }
    out.sort();
    out
}

/// The maximal cyclic subgroups: cyclic of order p^e.
pub fn enumerate_maximal_cyclic(p: Int, e: u32) -> Result<Vec<LocalSubgroup>, SymplecticError> {
    Ok(enumerate_lagrangians(p, e)?
        .into_iter()
        .filter(|k| k.smith_type().1 == 0)
        .collect())
}
