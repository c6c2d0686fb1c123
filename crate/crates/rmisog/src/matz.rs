//! Small dense integer matrices over `i128`: Hermite and Smith normal forms,
//! determinants, exact solves and kernels.
//!
//! Matrices are row-major `Vec<Vec<Int>>`; rows are lattice basis vectors.
//! Sizes stay tiny (at most 8x8), so the algorithms favour clarity over
//! asymptotics.

use crate::num_util::Int;

pub type Mat = Vec<Vec<Int>>;

pub fn identity(n: usize) -> Mat {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1 } else { 0 }).collect())
        .collect()
}

pub fn mat_mul(a: &[Vec<Int>], b: &[Vec<Int>]) -> Mat {
    let n = a.len();
    let k = b.len();
    let m = if k == 0 { 0 } else { b[0].len() };
    let mut out = vec![vec![0; m]; n];
    for i in 0..n {
        assert_eq!(a[i].len(), k, "inner dimension mismatch");
        for (t, &av) in a[i].iter().enumerate() {
            if av == 0 {
                continue;
            }
            for j in 0..m {
                out[i][j] += av * b[t][j];
            }
        }
    }
    out
}

pub fn row_mat_mul(row: &[Int], b: &[Vec<Int>]) -> Vec<Int> {
    mat_mul(&[row.to_vec()], b).pop().unwrap()
}

pub fn transpose(a: &[Vec<Int>]) -> Mat {
    if a.is_empty() {
        return Vec::new();
    }
    let (n, m) = (a.len(), a[0].len());
    (0..m).map(|j| (0..n).map(|i| a[i][j]).collect()).collect()
}

/// Row Hermite normal form. Returns the nonzero rows of the canonical
/// echelon basis of the row lattice: pivots positive and strictly to the
/// right as rows go down, entries above each pivot reduced into `[0, pivot)`.
pub fn hnf(mut rows: Mat) -> Mat {
    if rows.is_empty() {
        return rows;
    }
    let ncols = rows[0].len();
    let mut pivot = 0;
    for col in 0..ncols {
        if pivot >= rows.len() {
            break;
        }
        loop {
            let mut best: Option<(usize, Int)> = None;
            for r in pivot..rows.len() {
                let v = rows[r][col];
                if v != 0 && best.map_or(true, |(_, b)| v.abs() < b) {
                    best = Some((r, v.abs()));
                }
            }
            let Some((r, _)) = best else { break };
            rows.swap(pivot, r);
            let p = rows[pivot][col];
            let mut clean = true;
            for r in pivot + 1..rows.len() {
                let q = rows[r][col].div_euclid(p);
                if q != 0 {
                    for c in 0..ncols {
                        let s = rows[pivot][c];
                        rows[r][c] -= q * s;
                    }
                }
                if rows[r][col] != 0 {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if rows[pivot][col] != 0 {
            if rows[pivot][col] < 0 {
                for c in 0..ncols {
                    rows[pivot][c] = -rows[pivot][c];
                }
            }
            let p = rows[pivot][col];
            for r in 0..pivot {
                let q = rows[r][col].div_euclid(p);
                if q != 0 {
                    for c in 0..ncols {
                        let s = rows[pivot][c];
                        rows[r][c] -= q * s;
                    }
                }
            }
            pivot += 1;
        }
    }
    rows.truncate(pivot);
    rows
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn det(m: &[Vec<Int>]) -> Int {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a: Mat = m.to_vec();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&r| a[r][k] != 0) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[k][k] * a[i][j] - a[i][k] * a[k][j]) / prev;
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

/// Smith normal form `p * a * q = diag(s)` with unimodular transforms.
pub struct Smith {
    /// Diagonal, each entry nonnegative and dividing the next.
    pub diag: Vec<Int>,
    pub p: Mat,
    pub q: Mat,
    pub qinv: Mat,
}

/// Extended gcd: returns (g, x, y) with x*a + y*b = g >= 0.
pub fn extended_gcd(a: Int, b: Int) -> (Int, Int, Int) {
    let (mut r0, mut r1) = (a, b);
    let (mut x0, mut x1) = (1i128, 0i128);
    let (mut y0, mut y1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (x0, x1) = (x1, x0 - q * x1);
        (y0, y1) = (y1, y0 - q * y1);
    }
    if r0 < 0 {
        (-r0, -x0, -y0)
    } else {
        (r0, x0, y0)
    }
}

pub fn smith(a: &[Vec<Int>]) -> Smith {
    let m = a.len();
    let n = if m == 0 { 0 } else { a[0].len() };
    let mut w: Mat = a.to_vec();
    let mut p = identity(m);
    let mut q = identity(n);
    let mut qinv = identity(n);

    // Two-row transform clearing mat[i][col]: plain elimination when the
    // pivot divides (leaves the pivot row untouched), full Bezout mix
    // otherwise (then the pivot strictly shrinks, so the sweep terminates).
    let row_gcd_op = |mat: &mut Mat, aux: &mut Mat, t: usize, i: usize, col: usize| {
        let (a, b) = (mat[t][col], mat[i][col]);
        if b == 0 {
            return;
        }
        if a == 0 {
            mat.swap(t, i);
            aux.swap(t, i);
            return;
        }
        if b % a == 0 {
            let f = b / a;
            for mtx in [mat, aux] {
                let cols = mtx[0].len();
                for c in 0..cols {
                    let u = mtx[t][c];
                    mtx[i][c] -= f * u;
                }
            }
            return;
        }
        let (g, x, y) = extended_gcd(a, b);
        let (ag, bg) = (a / g, b / g);
        for mtx in [mat, aux] {
            let cols = mtx[0].len();
            for c in 0..cols {
                let (u, v) = (mtx[t][c], mtx[i][c]);
                mtx[t][c] = x * u + y * v;
                mtx[i][c] = -bg * u + ag * v;
            }
        }
    };
    // Bezout two-column transform on w and q, with the inverse applied to
    // rows of qinv: clears w[row][j] against w[row][t].
    let col_gcd_op =
        |w: &mut Mat, q: &mut Mat, qinv: &mut Mat, t: usize, j: usize, row: usize| {
            let (a, b) = (w[row][t], w[row][j]);
            if b == 0 {
                return;
            }
            if a == 0 {
                for r in w.iter_mut() {
                    r.swap(t, j);
                }
                for r in q.iter_mut() {
                    r.swap(t, j);
                }
                qinv.swap(t, j);
                return;
            }
            if b % a == 0 {
                let f = b / a;
                for mtx in [&mut *w, q] {
                    for r in mtx.iter_mut() {
                        let u = r[t];
                        r[j] -= f * u;
                    }
                }
                // qinv <- E^{-1} qinv for E = I - f e_t e_j^T
                let cols = qinv[0].len();
                for c in 0..cols {
                    let v = qinv[j][c];
                    qinv[t][c] += f * v;
                }
                return;
            }
            let (g, x, y) = extended_gcd(a, b);
            let (ag, bg) = (a / g, b / g);
            // columns [t j] <- [t j] * M with M = [[x, -bg], [y, ag]], det 1
            for mtx in [&mut *w, q] {
                for r in mtx.iter_mut() {
                    let (u, v) = (r[t], r[j]);
                    r[t] = x * u + y * v;
                    r[j] = -bg * u + ag * v;
                }
            }
            // qinv <- M^{-1} * qinv with M^{-1} = [[ag, bg], [-y, x]]
            let cols = qinv[0].len();
            for c in 0..cols {
                let (u, v) = (qinv[t][c], qinv[j][c]);
                qinv[t][c] = ag * u + bg * v;
                qinv[j][c] = -y * u + x * v;
            }
        };

    let r = m.min(n);
    for t in 0..r {
        'place: loop {
            // bring the smallest nonzero entry of the trailing block to (t, t)
            let mut best: Option<(usize, usize, Int)> = None;
            for i in t..m {
                for j in t..n {
                    let v = w[i][j];
                    if v != 0 && best.map_or(true, |(_, _, b)| v.abs() < b) {
                        best = Some((i, j, v.abs()));
                    }
                }
            }
            let Some((bi, bj, _)) = best else { break 'place };
            if bi != t {
                w.swap(t, bi);
                p.swap(t, bi);
            }
            if bj != t {
                for row in w.iter_mut() {
                    row.swap(t, bj);
                }
                for row in q.iter_mut() {
                    row.swap(t, bj);
                }
                qinv.swap(t, bj);
            }
            for i in t + 1..m {
                row_gcd_op(&mut w, &mut p, t, i, t);
            }
            for j in t + 1..n {
                col_gcd_op(&mut w, &mut q, &mut qinv, t, j, t);
            }
            // column clearing may have refilled the pivot column
            if (t + 1..m).any(|i| w[i][t] != 0) {
                continue 'place;
            }
            // pivot must divide the rest of the block, or fold a bad row in
            let piv = w[t][t];
            let mut bad = None;
            'scan: for i in t + 1..m {
                for j in t + 1..n {
                    if w[i][j] % piv != 0 {
                        bad = Some(i);
                        break 'scan;
                    }
                }
            }
            match bad {
                Some(i) => {
                    for c in 0..n {
                        let s = w[i][c];
                        w[t][c] += s;
                    }
                    for c in 0..m {
                        let s = p[i][c];
                        p[t][c] += s;
                    }
                }
                None => break 'place,
            }
        }
        if w[t][t] < 0 {
            for c in 0..n {
                w[t][c] = -w[t][c];
            }
            for c in 0..m {
                p[t][c] = -p[t][c];
            }
        }
    }
    let diag = (0..r).map(|i| w[i][i]).collect();
    Smith { diag, p, q, qinv }
}

/// Solves `x * a = b` over the integers, if a solution exists.
pub fn solve_left(a: &[Vec<Int>], b: &[Int]) -> Option<Vec<Int>> {
    let m = a.len();
    let n = if m == 0 { 0 } else { a[0].len() };
    assert_eq!(b.len(), n);
    let s = smith(a);
    let c = row_mat_mul(b, &s.q);
    let r = s.diag.len();
    let mut z = vec![0; m];
    for i in 0..n {
        if i < r && s.diag[i] != 0 {
            if c[i] % s.diag[i] != 0 {
                return None;
            }
            z[i] = c[i] / s.diag[i];
        } else if c[i] != 0 {
            return None;
        }
    }
    Some(row_mat_mul(&z, &s.p))
}

/// Basis of the left kernel `{x : x * a = 0}`.
pub fn left_kernel(a: &[Vec<Int>]) -> Mat {
    let m = a.len();
    let s = smith(a);
    let rank = s.diag.iter().filter(|&&d| d != 0).count();
    (rank..m).map(|i| s.p[i].clone()).collect()
}

pub fn gcd_all<I: IntoIterator<Item = Int>>(vals: I) -> Int {
    let mut g = 0;
    for v in vals {
        g = num_integer::gcd(g, v);
    }
    g
}
