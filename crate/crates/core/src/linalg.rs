//! Dense complex linear algebra used by the oracles and root finding.
//!
//! Everything here is deterministic and self-contained: LU with partial
//! pivoting, shifted QR iteration on Hessenberg matrices (companion-matrix
//! eigenvalues), Householder bidiagonalization plus bidiagonal QR for
//! singular values, and Gaussian-elimination rank/nullspace for small
//! systems.

use crate::cplx::{cr, ONE, ZERO};
use num_complex::Complex64;

/// Dense column-major complex matrix.
#[derive(Debug, Clone)]
pub struct CMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = CMat::zeros(rows, cols);
        for j in 0..cols {
            for i in 0..rows {
                *m.at_mut(i, j) = f(i, j);
            }
        }
        m
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.data[j * self.rows + i]
    }

    #[inline]
    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut Complex64 {
        &mut self.data[j * self.rows + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[j * self.rows + i] = v;
    }

    pub fn col(&self, j: usize) -> &[Complex64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn col_mut(&mut self, j: usize) -> &mut [Complex64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |i, j| self.at(j, i).conj())
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.cols);
        let mut y = vec![ZERO; self.rows];
        for j in 0..self.cols {
            let xj = x[j];
            if xj.norm() == 0.0 {
                continue;
            }
            let col = self.col(j);
            for i in 0..self.rows {
                y[i] += col[i] * xj;
            }
        }
        y
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// LU decomposition with partial pivoting; solves and determinants.
pub struct Lu {
    lu: CMat,
    piv: Vec<usize>,
    sign_flips: usize,
    singular: bool,
}

impl Lu {
    pub fn new(mut a: CMat) -> Self {
        assert_eq!(a.rows, a.cols);
        let n = a.rows;
        let mut piv = Vec::with_capacity(n);
        let mut flips = 0;
        let mut singular = false;
        for k in 0..n {
            let mut p = k;
            let mut best = a.at(k, k).norm();
            for i in k + 1..n {
                let v = a.at(i, k).norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            piv.push(p);
            if p != k {
                flips += 1;
                for j in 0..n {
                    let t = a.at(k, j);
                    a.set(k, j, a.at(p, j));
                    a.set(p, j, t);
                }
            }
            let pivot = a.at(k, k);
            if pivot.norm() == 0.0 {
                singular = true;
                continue;
            }
            for i in k + 1..n {
                let m = a.at(i, k) / pivot;
                a.set(i, k, m);
                if m.norm() != 0.0 {
                    for j in k + 1..n {
                        let v = a.at(i, j) - m * a.at(k, j);
                        a.set(i, j, v);
                    }
                }
            }
        }
        Lu { lu: a, piv, sign_flips: flips, singular }
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn det(&self) -> Complex64 {
        let n = self.lu.rows;
        let mut d = if self.sign_flips % 2 == 0 { ONE } else { -ONE };
        for i in 0..n {
            d *= self.lu.at(i, i);
        }
        d
    }

    pub fn solve(&self, b: &[Complex64]) -> Option<Vec<Complex64>> {
        if self.singular {
            return None;
        }
        let n = self.lu.rows;
        let mut x = b.to_vec();
        for k in 0..n {
            x.swap(k, self.piv[k]);
        }
        for k in 0..n {
            for i in k + 1..n {
                let m = self.lu.at(i, k);
                x[i] = x[i] - m * x[k];
            }
        }
        for k in (0..n).rev() {
            for j in k + 1..n {
                x[k] = x[k] - self.lu.at(k, j) * x[j];
            }
            x[k] /= self.lu.at(k, k);
        }
        Some(x)
    }
}

/// Unitary Givens rotation G = [[c, s], [-conj(s), c]] with real c >= 0
/// such that G · (f, g)^T = (r, 0)^T.
fn givens(f: Complex64, g: Complex64) -> (f64, Complex64) {
    let fn_ = f.norm();
    let gn = g.norm();
    if gn == 0.0 {
        return (1.0, ZERO);
    }
    if fn_ == 0.0 {
        return (0.0, g.conj() / gn);
    }
    let d = (fn_ * fn_ + gn * gn).sqrt();
    let c = fn_ / d;
    let s = (f / fn_) * g.conj() / d;
    (c, s)
}

/// Eigenvalues of an upper Hessenberg complex matrix by shifted QR with
/// deflation. The input is consumed.
pub fn hessenberg_eigenvalues(mut h: CMat) -> Vec<Complex64> {
    let n = h.rows;
    assert_eq!(n, h.cols);
    let mut eigs = vec![ZERO; n];
    if n == 0 {
        return eigs;
    }
    let eps = f64::EPSILON;
    let mut hi = n;
    let mut stuck = 0usize;
    let mut total = 0usize;
    let max_total = 120 * n + 200;
    while hi > 0 {
        if hi == 1 {
            eigs[0] = h.at(0, 0);
            break;
        }
        // Deflation scan: find the top of the active trailing block.
        let mut lo = hi - 1;
        while lo > 0 {
            let s = h.at(lo - 1, lo - 1).norm() + h.at(lo, lo).norm();
            let s = if s == 0.0 { 1.0 } else { s };
            if h.at(lo, lo - 1).norm() <= eps * s {
                h.set(lo, lo - 1, ZERO);
                break;
            }
            lo -= 1;
        }
        if lo == hi - 1 {
            eigs[hi - 1] = h.at(hi - 1, hi - 1);
            hi -= 1;
            stuck = 0;
            continue;
        }
        if lo == hi - 2 {
            let (l1, l2) = eig2(h.at(lo, lo), h.at(lo, lo + 1), h.at(lo + 1, lo), h.at(lo + 1, lo + 1));
            eigs[hi - 1] = l1;
            eigs[hi - 2] = l2;
            hi -= 2;
            stuck = 0;
            continue;
        }
        total += 1;
        stuck += 1;
        if total > max_total {
            // Give up gracefully: report current diagonal for the rest.
            for i in 0..hi {
                eigs[i] = h.at(i, i);
            }
            break;
        }
        // Wilkinson shift from the trailing 2x2 of the active block.
        let k = hi - 1;
        let mut mu = {
            let (l1, l2) = eig2(h.at(k - 1, k - 1), h.at(k - 1, k), h.at(k, k - 1), h.at(k, k));
            let d = h.at(k, k);
            if (l1 - d).norm() <= (l2 - d).norm() {
                l1
            } else {
                l2
            }
        };
        if stuck % 14 == 0 {
            mu = h.at(k, k) + cr(0.75 * h.at(k, k - 1).norm());
        }
        // Explicit shifted QR step on the block [lo..hi).
        for i in lo..hi {
            let v = h.at(i, i) - mu;
            h.set(i, i, v);
        }
        let mut rots = Vec::with_capacity(hi - lo - 1);
        for i in lo..hi - 1 {
            let (c, s) = givens(h.at(i, i), h.at(i + 1, i));
            for j in i..hi {
                let x = h.at(i, j);
                let y = h.at(i + 1, j);
                h.set(i, j, cr(c) * x + s * y);
                h.set(i + 1, j, -s.conj() * x + cr(c) * y);
            }
            rots.push((i, c, s));
        }
        for &(i, c, s) in &rots {
            let top = (i + 2).min(hi);
            for r in lo..top {
                let x = h.at(r, i);
                let y = h.at(r, i + 1);
                h.set(r, i, x * cr(c) + y * s.conj());
                h.set(r, i + 1, -x * s + y * cr(c));
            }
        }
        for i in lo..hi {
            let v = h.at(i, i) + mu;
            h.set(i, i, v);
        }
    }
    eigs
}

/// Eigenvalues of a 2x2 complex matrix by the stable quadratic formula.
fn eig2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> (Complex64, Complex64) {
    let tr = a + d;
    let det = a * d - b * c;
    let disc = (tr * tr - cr(4.0) * det).sqrt();
    // Choose the sign that avoids cancellation in tr ± disc.
    let s = if (tr + disc).norm() >= (tr - disc).norm() { disc } else { -disc };
    let l1 = (tr + s) / cr(2.0);
    let l2 = if l1.norm() > 0.0 { det / l1 } else { (tr - s) / cr(2.0) };
    (l1, l2)
}

/// Singular values of a dense complex matrix, descending.
///
/// Householder bidiagonalization (values only) followed by bidiagonal QR.
pub fn singular_values(a: &CMat) -> Vec<f64> {
    // Work on the tall orientation; singular values are adjoint-invariant.
    let mut m = if a.rows >= a.cols { a.clone() } else { a.adjoint() };
    let (rows, cols) = (m.rows, m.cols);
    if cols == 0 || rows == 0 {
        return Vec::new();
    }
    let mut d = vec![0.0f64; cols];
    let mut e = vec![0.0f64; cols]; // e[i] couples d[i-1], d[i]; e[0] unused
    for k in 0..cols {
        d[k] = house_left(&mut m, k);
        if k + 1 < cols {
            e[k + 1] = house_right(&mut m, k);
        }
    }
    let mut sv = bidiag_singular_values(d, e);
    sv.sort_by(|x, y| y.partial_cmp(x).unwrap());
    let _ = rows;
    sv
}

/// Left Householder on column `k` (rows k..m). Returns |new diagonal|.
/// Applies the reflector to the remaining columns.
fn house_left(m: &mut CMat, k: usize) -> f64 {
    let rows = m.rows;
    let cols = m.cols;
    let mut normx = 0.0f64;
    for i in k..rows {
        normx = normx.hypot(m.at(i, k).norm());
    }
    if normx == 0.0 {
        return 0.0;
    }
    let x0 = m.at(k, k);
    let phase = if x0.norm() > 0.0 { x0 / cr(x0.norm()) } else { ONE };
    // v = x + phase·|x| e1, reflected image is -phase·|x| e1.
    let mut vhv = normx * normx;
    {
        let v0 = x0 + phase * cr(normx);
        vhv += v0.norm_sqr() - x0.norm_sqr();
        m.set(k, k, v0);
    }
    if vhv == 0.0 {
        m.set(k, k, x0);
        return normx;
    }
    let beta = 2.0 / vhv;
    for j in k + 1..cols {
        let mut dot = ZERO;
        for i in k..rows {
            dot += m.at(i, k).conj() * m.at(i, j);
        }
        let coef = dot * cr(beta);
        if coef.norm() == 0.0 {
            continue;
        }
        for i in k..rows {
            let v = m.at(i, k);
            let w = m.at(i, j) - coef * v;
            m.set(i, j, w);
        }
    }
    // Zero out the processed column below the diagonal (value no longer used).
    for i in k + 1..rows {
        m.set(i, k, ZERO);
    }
    normx
}

/// Right Householder on row `k` (columns k+1..n). Returns |new superdiagonal|.
fn house_right(m: &mut CMat, k: usize) -> f64 {
    let rows = m.rows;
    let cols = m.cols;
    let mut normx = 0.0f64;
    for j in k + 1..cols {
        normx = normx.hypot(m.at(k, j).norm());
    }
    if normx == 0.0 {
        return 0.0;
    }
    // u = conj(row)^T + phase·|row| e1; reflector W = I - beta·u u^H applied
    // from the right sends the row to (-conj(phase)·|row|, 0, ..., 0).
    let x0 = m.at(k, k + 1).conj();
    let phase = if x0.norm() > 0.0 { x0 / cr(x0.norm()) } else { ONE };
    let mut u = vec![ZERO; cols - (k + 1)];
    for (idx, j) in (k + 1..cols).enumerate() {
        u[idx] = m.at(k, j).conj();
    }
    u[0] += phase * cr(normx);
    let uhu: f64 = u.iter().map(|z| z.norm_sqr()).sum();
    if uhu == 0.0 {
        return normx;
    }
    let beta = 2.0 / uhu;
    for i in k..rows {
        let mut dot = ZERO;
        for (idx, j) in (k + 1..cols).enumerate() {
            dot += m.at(i, j) * u[idx];
        }
        let coef = dot * cr(beta);
        if coef.norm() == 0.0 {
            continue;
        }
        for (idx, j) in (k + 1..cols).enumerate() {
            let w = m.at(i, j) - coef * u[idx].conj();
            m.set(i, j, w);
        }
    }
    normx
}

/// Singular values of a real bidiagonal matrix (diagonal `d`, superdiagonal
/// `e` with `e[i]` between `d[i-1]` and `d[i]`; `e[0]` ignored).
fn bidiag_singular_values(mut d: Vec<f64>, mut e: Vec<f64>) -> Vec<f64> {
    let n = d.len();
    if n == 0 {
        return d;
    }
    e[0] = 0.0;
    let eps = f64::EPSILON;
    let anorm = d
        .iter()
        .zip(e.iter())
        .map(|(x, y)| x.abs() + y.abs())
        .fold(0.0f64, f64::max)
        .max(f64::MIN_POSITIVE);
    let fsign = |a: f64, b: f64| if b >= 0.0 { a.abs() } else { -a.abs() };
    for k in (0..n).rev() {
        let mut its = 0;
        loop {
            its += 1;
            if its > 120 {
                break; // accept current value; accuracy degraded but bounded
            }
            // Split the block: find l such that e[l] is negligible or d[l-1]
            // is negligible.
            let mut l = k;
            let mut flag = true;
            loop {
                if e[l].abs() <= eps * anorm {
                    flag = false;
                    break;
                }
                if d[l - 1].abs() <= eps * anorm {
                    break;
                }
                l -= 1;
            }
            if flag {
                // d[l-1] ~ 0: cancel e[l] with rotations.
                let mut c = 0.0f64;
                let mut s = 1.0f64;
                for i in l..=k {
                    let f = s * e[i];
                    e[i] *= c;
                    if f.abs() <= eps * anorm {
                        break;
                    }
                    let g = d[i];
                    let h = f.hypot(g);
                    d[i] = h;
                    c = g / h;
                    s = -f / h;
                }
            }
            let z = d[k];
            if l == k {
                if z < 0.0 {
                    d[k] = -z;
                }
                break;
            }
            // QR step with Wilkinson-like shift.
            let x = d[l];
            let y = d[k - 1];
            let g = e[k - 1];
            let h = e[k];
            let mut f = ((y - z) * (y + z) + (g - h) * (g + h)) / (2.0 * h * y);
            let gp = f.hypot(1.0);
            f = ((x - z) * (x + z) + h * (y / (f + fsign(gp, f)) - h)) / x;
            let mut c = 1.0f64;
            let mut s = 1.0f64;
            let mut xx = x;
            for j in l..k {
                let i = j + 1;
                let mut gg = e[i];
                let mut yy = d[i];
                let mut hh = s * gg;
                gg *= c;
                let mut zz = f.hypot(hh);
                e[j] = zz;
                c = f / zz;
                s = hh / zz;
                f = xx * c + gg * s;
                gg = gg * c - xx * s;
                hh = yy * s;
                yy *= c;
                zz = f.hypot(hh);
                d[j] = zz;
                if zz != 0.0 {
                    c = f / zz;
                    s = hh / zz;
                }
                f = c * gg + s * yy;
                xx = c * yy - s * gg;
            }
            e[l] = 0.0;
            e[k] = f;
            d[k] = xx;
        }
    }
    d.iter_mut().for_each(|v| *v = v.abs());
    d
}

/// Rank and an orthonormal-ish nullspace basis of a small complex matrix,
/// via Gaussian elimination with full pivoting.
///
/// `rel_tol` is relative to the largest pivot.
pub fn rank_nullspace(a: &CMat, rel_tol: f64) -> (usize, Vec<Vec<Complex64>>) {
    let rows = a.rows;
    let cols = a.cols;
    let mut m = a.clone();
    let mut col_perm: Vec<usize> = (0..cols).collect();
    let mut rank = 0usize;
    let mut first_pivot = 0.0f64;
    for k in 0..rows.min(cols) {
        // Full pivot search in the remaining submatrix.
        let mut best = 0.0;
        let mut bi = k;
        let mut bj = k;
        for j in k..cols {
            for i in k..rows {
                let v = m.at(i, j).norm();
                if v > best {
                    best = v;
                    bi = i;
                    bj = j;
                }
            }
        }
        if k == 0 {
            first_pivot = best;
        }
        if best <= rel_tol * first_pivot || best == 0.0 {
            break;
        }
        // Swap rows and columns.
        if bi != k {
            for j in 0..cols {
                let t = m.at(k, j);
                m.set(k, j, m.at(bi, j));
                m.set(bi, j, t);
            }
        }
        if bj != k {
            for i in 0..rows {
                let t = m.at(i, k);
                m.set(i, k, m.at(i, bj));
                m.set(i, bj, t);
            }
            col_perm.swap(k, bj);
        }
        let pivot = m.at(k, k);
        for i in k + 1..rows {
            let f = m.at(i, k) / pivot;
            if f.norm() != 0.0 {
                for j in k..cols {
                    let v = m.at(i, j) - f * m.at(k, j);
                    m.set(i, j, v);
                }
            }
        }
        rank += 1;
    }
    // Back-substitute for each free column.
    let mut basis = Vec::new();
    for free in rank..cols {
        let mut x = vec![ZERO; cols];
        x[free] = ONE;
        for i in (0..rank).rev() {
            let mut acc = m.at(i, free);
            for j in i + 1..rank {
                acc += m.at(i, j) * x[j];
            }
            x[i] = -acc / m.at(i, i);
        }
        // Undo the column permutation.
        let mut v = vec![ZERO; cols];
        for (pos, &orig) in col_perm.iter().enumerate() {
            v[orig] = x[pos];
        }
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            v.iter_mut().for_each(|z| *z /= cr(norm));
        }
        basis.push(v);
    }
    (rank, basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cplx::c;

    fn approx(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() < tol, "{a} vs {b}");
    }

    #[test]
    fn lu_solves_and_det() {
        let a = CMat::from_fn(3, 3, |i, j| c((i * 3 + j) as f64 + 1.0, (i as f64) - (j as f64)));
        let mut a2 = a.clone();
        *a2.at_mut(2, 2) += c(5.0, 1.0); // make it comfortably nonsingular
        let lu = Lu::new(a2.clone());
        let x_true = vec![c(1.0, 1.0), c(-2.0, 0.5), c(0.25, -1.0)];
        let b = a2.matvec(&x_true);
        let x = lu.solve(&b).unwrap();
        for (xi, ti) in x.iter().zip(x_true.iter()) {
            assert!((xi - ti).norm() < 1e-10);
        }
    }

    #[test]
    fn hessenberg_eigenvalues_companion() {
        // roots of t^3 - 6t^2 + 11t - 6 = (t-1)(t-2)(t-3)
        let coeffs = [c(-6.0, 0.0), c(11.0, 0.0), c(-6.0, 0.0)];
        let mut h = CMat::zeros(3, 3);
        *h.at_mut(1, 0) = ONE;
        *h.at_mut(2, 1) = ONE;
        for i in 0..3 {
            *h.at_mut(i, 2) = -coeffs[i];
        }
        let mut eigs = hessenberg_eigenvalues(h);
        eigs.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        approx(eigs[0].re, 1.0, 1e-9);
        approx(eigs[1].re, 2.0, 1e-9);
        approx(eigs[2].re, 3.0, 1e-9);
        for e in eigs {
            approx(e.im, 0.0, 1e-9);
        }
    }

    #[test]
    fn hessenberg_eigenvalues_complex_pairs() {
        // t^2 + 1: eigenvalues ±i
        let mut h = CMat::zeros(2, 2);
        *h.at_mut(1, 0) = ONE;
        *h.at_mut(0, 1) = -ONE;
        let mut eigs = hessenberg_eigenvalues(h);
        eigs.sort_by(|a, b| a.im.partial_cmp(&b.im).unwrap());
        assert!((eigs[0] - c(0.0, -1.0)).norm() < 1e-10);
        assert!((eigs[1] - c(0.0, 1.0)).norm() < 1e-10);
    }

    #[test]
    fn singular_values_diagonal_and_shift() {
        // Diagonal with known values.
        let mut m = CMat::zeros(4, 4);
        for (i, v) in [3.0, 1.0, 0.5, 0.0].iter().enumerate() {
            *m.at_mut(i, i) = c(*v, *v); // modulus v·sqrt(2)
        }
        let sv = singular_values(&m);
        let expect = [3.0, 1.0, 0.5, 0.0].map(|v: f64| v * 2.0f64.sqrt());
        for (a, b) in sv.iter().zip(expect.iter()) {
            approx(*a, *b, 1e-12);
        }
        // Shift matrix: singular values are 1 (n-2 of them) and two zeros.
        let n = 16;
        let mut s = CMat::zeros(n, n);
        for i in 2..n {
            *s.at_mut(i, i - 2) = ONE;
        }
        let sv = singular_values(&s);
        for v in &sv[..n - 2] {
            approx(*v, 1.0, 1e-12);
        }
        approx(sv[n - 2], 0.0, 1e-12);
        approx(sv[n - 1], 0.0, 1e-12);
    }

    #[test]
    fn singular_values_unitary_dft() {
        // Scaled DFT matrix: all singular values equal sqrt(n).
        let n = 8;
        let m = CMat::from_fn(n, n, |i, j| {
            let th = -2.0 * std::f64::consts::PI * (i * j) as f64 / n as f64;
            c(th.cos(), th.sin())
        });
        let sv = singular_values(&m);
        for v in sv {
            approx(v, (n as f64).sqrt(), 1e-10);
        }
    }

    #[test]
    fn singular_values_rectangular() {
        // Tall matrix [I; I]: singular values all sqrt(2).
        let n = 5;
        let m = CMat::from_fn(2 * n, n, |i, j| if i % n == j { ONE } else { ZERO });
        let sv = singular_values(&m);
        assert_eq!(sv.len(), n);
        for v in sv {
            approx(v, 2.0f64.sqrt(), 1e-12);
        }
    }

    #[test]
    fn nullspace_of_rank_deficient() {
        // Columns: v, 2v, w → nullspace dim 1.
        let v = [c(1.0, 0.0), c(0.0, 1.0), c(2.0, -1.0)];
        let w = [c(0.5, 0.0), c(1.0, 0.0), c(0.0, 0.0)];
        let m = CMat::from_fn(3, 3, |i, j| match j {
            0 => v[i],
            1 => v[i] * cr(2.0),
            _ => w[i],
        });
        let (rank, basis) = rank_nullspace(&m, 1e-10);
        assert_eq!(rank, 2);
        assert_eq!(basis.len(), 1);
        let x = &basis[0];
        let y = m.matvec(x);
        for yi in y {
            assert!(yi.norm() < 1e-10);
        }
    }
}
