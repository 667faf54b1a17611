//! Dense symmetric eigensolver: Householder reduction to tridiagonal form
//! followed by the implicit-shift QL iteration.
//!
//! Storage is row-major. The reduction only touches the lower triangle and
//! keeps every inner loop on a contiguous row. Eigenvectors of the
//! tridiagonal matrix are accumulated as rows, so each Givens rotation
//! mixes two contiguous rows, and the Householder reflectors are applied
//! to those rows at the end.

use crate::error::{Error, Result};

/// Tridiagonal form `T = Q^T A Q` with the reflectors needed to rebuild `Q`.
pub(crate) struct Tridiagonal {
    pub diag: Vec<f64>,
    /// `off[i] = T[i][i-1]`, `off[0] = 0`.
    pub off: Vec<f64>,
    /// Reflector `i` is `I - u u^T / h` acting on coordinates `0..i`;
    /// `u` lives in row `i` of `store`. `h == 0` means identity.
    n: usize,
    store: Vec<f64>,
    hs: Vec<f64>,
}

/// Reduces the symmetric matrix in `a` (row-major, lower triangle read).
pub(crate) fn tridiagonalize(mut a: Vec<f64>, n: usize) -> Tridiagonal {
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n];
    let mut hs = vec![0.0; n];
    let mut p = vec![0.0; n];
    for i in (1..n).rev() {
        let l = i - 1;
        let (head, row_i) = a.split_at_mut(i * n);
        let u = &mut row_i[..i];
        let scale: f64 = u.iter().map(|x| x.abs()).sum();
        if l == 0 || scale == 0.0 {
            off[i] = u[l];
            continue;
        }
        for x in u.iter_mut() {
            *x /= scale;
        }
        let mut h: f64 = u.iter().map(|x| x * x).sum();
        let f = u[l];
        let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
        off[i] = scale * g;
        h -= f * g;
        u[l] = f - g;
        // p = A u / h on the leading i x i block, lower triangle only
        p[..i].iter_mut().for_each(|x| *x = 0.0);
        for j in 0..i {
            let row = &head[j * n..j * n + j + 1];
            let uj = u[j];
            let mut acc = 0.0;
            for k in 0..j {
                acc += row[k] * u[k];
                p[k] += row[k] * uj;
            }
            p[j] += acc + row[j] * uj;
        }
        let mut kdot = 0.0;
        for j in 0..i {
            p[j] /= h;
            kdot += u[j] * p[j];
        }
        let kk = kdot / (2.0 * h);
        for j in 0..i {
            p[j] -= kk * u[j];
        }
        for j in 0..i {
            let (uj, qj) = (u[j], p[j]);
            let row = &mut head[j * n..j * n + j + 1];
            for k in 0..=j {
                row[k] -= uj * p[k] + qj * u[k];
            }
        }
        hs[i] = h;
    }
    for i in 0..n {
        diag[i] = a[i * n + i];
    }
    off[0] = 0.0;
    Tridiagonal {
        diag,
        off,
        n,
        store: a,
        hs,
    }
}

impl Tridiagonal {
    /// Applies `Q` to each row of `rows` (each row a vector in tridiagonal
    /// coordinates), in place.
    fn apply_q(&self, rows: &mut [f64], count: usize) {
        let n = self.n;
        for i in 1..n {
            let h = self.hs[i];
            if h == 0.0 {
                continue;
            }
            let u = &self.store[i * n..i * n + i];
            for r in 0..count {
                let v = &mut rows[r * n..r * n + i];
                let s: f64 = u.iter().zip(v.iter()).map(|(a, b)| a * b).sum::<f64>() / h;
                for (vk, uk) in v.iter_mut().zip(u) {
                    *vk -= s * uk;
                }
            }
        }
    }
}

/// Implicit QL on a symmetric tridiagonal matrix. `vt`, when given, holds
/// row-wise vectors (initially the identity) that receive the rotations.
/// Returns eigenvalues in the order the iteration leaves them.
pub(crate) fn tql(diag: &mut [f64], off: &mut [f64], mut vt: Option<&mut [f64]>) -> Result<()> {
    let n = diag.len();
    if n == 0 {
        return Ok(());
    }
    let e = off;
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    let d = diag;
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 60 {
                    return Err(Error::NoConvergence(format!("QL iteration at index {l}")));
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;
                p = d[m];
                let (mut c, mut c2, mut c3) = (1.0, 1.0, 1.0);
                let el1 = e[l + 1];
                let (mut s, mut s2) = (0.0, 0.0);
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(v) = vt.as_deref_mut() {
                        let (lo, hi) = v.split_at_mut((i + 1) * n);
                        let vi = &mut lo[i * n..];
                        let vi1 = &mut hi[..n];
                        for k in 0..n {
                            let hk = vi1[k];
                            vi1[k] = s * vi[k] + c * hk;
                            vi[k] = c * vi[k] - s * hk;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

/// Eigenvalues in descending order (ties keep their QL order), and
/// optionally the matching eigenvectors as rows of a row-major `n x n`
/// buffer.
pub(crate) fn symmetric_eigen_rows(a: Vec<f64>, n: usize, want_vectors: bool) -> Result<(Vec<f64>, Option<Vec<f64>>)> {
    let tri = tridiagonalize(a, n);
    let mut d = tri.diag.clone();
    let mut e = tri.off.clone();
    if !want_vectors {
        tql(&mut d, &mut e, None)?;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| d[j].total_cmp(&d[i]));
        return Ok((order.iter().map(|&i| d[i]).collect(), None));
    }
    // rows of vt: vt[i][k] = V[k][i], eigenvector i of T in row i
    let mut vt = vec![0.0; n * n];
    for i in 0..n {
        vt[i * n + i] = 1.0;
    }
    tql(&mut d, &mut e, Some(&mut vt))?;
    tri.apply_q(&mut vt, n);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[j].total_cmp(&d[i]));
    let values = order.iter().map(|&i| d[i]).collect();
    let mut rows = vec![0.0; n * n];
    for (dst, &src) in order.iter().enumerate() {
        rows[dst * n..(dst + 1) * n].copy_from_slice(&vt[src * n..(src + 1) * n]);
    }
    Ok((values, Some(rows)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn random_symmetric(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let x: f64 = rng.random_range(-1.0..1.0);
                a[i * n + j] = x;
                a[j * n + i] = x;
            }
        }
        a
    }

    #[test]
    fn reconstructs_random_matrices() {
        for (n, seed) in [(1, 0), (2, 1), (3, 2), (17, 3), (60, 4)] {
            let a = random_symmetric(n, seed);
            let (vals, vecs) = symmetric_eigen_rows(a.clone(), n, true).unwrap();
            let v = vecs.unwrap();
            assert!(vals.windows(2).all(|w| w[0] >= w[1]));
            for i in 0..n {
                let u = &v[i * n..(i + 1) * n];
                for r in 0..n {
                    let au: f64 = (0..n).map(|k| a[r * n + k] * u[k]).sum();
                    assert!((au - vals[i] * u[r]).abs() < 1e-12, "n={n}");
                }
                for j in 0..n {
                    let w = &v[j * n..(j + 1) * n];
                    let dot: f64 = u.iter().zip(w).map(|(x, y)| x * y).sum();
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((dot - expect).abs() < 1e-12);
                }
            }
            let (only, none) = symmetric_eigen_rows(a, n, false).unwrap();
            assert!(none.is_none());
            for (x, y) in only.iter().zip(&vals) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn agrees_with_nalgebra() {
        let n = 40;
        let a = random_symmetric(n, 11);
        let m = nalgebra::DMatrix::from_row_slice(n, n, &a);
        let mut reference: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        reference.sort_by(|x, y| y.total_cmp(x));
        let (vals, _) = symmetric_eigen_rows(a, n, false).unwrap();
        for (x, y) in vals.iter().zip(&reference) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn diagonal_and_degenerate_input() {
        let n = 5;
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            a[i * n + i] = [3.0, -1.0, 3.0, 0.0, -1.0][i];
        }
        let (vals, _) = symmetric_eigen_rows(a, n, true).unwrap();
        assert_eq!(vals, vec![3.0, 3.0, 0.0, -1.0, -1.0]);
    }
}
