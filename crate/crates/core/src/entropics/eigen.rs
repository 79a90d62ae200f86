//! Hermitian eigensolvers.
//!
//! Two independent routes: a cyclic complex Jacobi iteration returning
//! eigenvectors (used wherever a residual check is required), and Householder
//! tridiagonalization followed by implicit QL for eigenvalues only (used in
//! the channel optimizer's inner loop).

use num_complex::Complex64;

use super::matrix::CMatrix;
use crate::error::{Error, Result};

/// Sweep cap per unit of dimension.
pub const SWEEPS_PER_DIM: usize = 100;

/// Eigenvalues (unsorted, in diagonal order) and eigenvectors as columns.
pub fn jacobi_eigh(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let n = m.dim();
    let mut a = m.clone();
    let mut v = CMatrix::identity(n);
    // enforce exact Hermiticity of the working copy
    for i in 0..n {
        a[(i, i)] = Complex64::new(a[(i, i)].re, 0.0);
        for j in i + 1..n {
            let h = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            a[(i, j)] = h;
            a[(j, i)] = h.conj();
        }
    }
    let fro: f64 = a.as_slice().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let target = 1e-15 * fro.max(f64::MIN_POSITIVE);

    let max_sweeps = SWEEPS_PER_DIM * n.max(1);
    let mut converged = n < 2;
    for _ in 0..max_sweeps {
        let off = off_diagonal_norm(&a);
        if off <= target {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged {
        let off = off_diagonal_norm(&a);
        if off > target {
            return Err(Error::NonConvergence { dim: n, residual: off });
        }
    }
    let values = (0..n).map(|i| a[(i, i)].re).collect();
    Ok((values, v))
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // a rotation that cannot change the diagonal in floating point is skipped
    if r < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a[(p, q)] = Complex64::new(0.0, 0.0);
        a[(q, p)] = Complex64::new(0.0, 0.0);
        return;
    }
    // phase making the (p, q) entry real and positive: Φ_qq = e^{-iθ}
    let phase = (apq / r).conj();
    let theta = (aqq - app) / (2.0 * r);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // J = Φ P with P the real Jacobi rotation
    let jpp = Complex64::new(c, 0.0);
    let jpq = Complex64::new(s, 0.0);
    let jqp = -phase * s;
    let jqq = phase * c;

    let n = a.dim();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * jpp + akq * jqp;
        a[(k, q)] = akp * jpq + akq * jqq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
        a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * jpp + vkq * jqp;
        v[(k, q)] = vkp * jpq + vkq * jqq;
    }
}

/// Eigenvalues of a Hermitian matrix via Householder reduction to real
/// tridiagonal form and implicit QL with Wilkinson-type shifts.
pub fn tridiagonal_eigenvalues(m: &CMatrix) -> Result<Vec<f64>> {
    let (mut d, mut e) = householder_tridiagonal(m);
    tql_eigenvalues(&mut d, &mut e)?;
    Ok(d)
}

/// Returns the diagonal and the magnitudes of the sub-diagonal (`e[i]`
/// couples `i` and `i + 1`; the last entry is zero).
fn householder_tridiagonal(m: &CMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = m.dim();
    let mut a = m.as_slice().to_vec();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    let mut p = vec![Complex64::new(0.0, 0.0); n];
    let mut vc = vec![Complex64::new(0.0, 0.0); n];
    let mut pc = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..n.saturating_sub(2) {
        let m_len = n - k - 1;
        let base = k + 1;
        let xnorm = (base..n).map(|i| a[i * n + k].norm_sqr()).sum::<f64>().sqrt();
        d[k] = a[k * n + k].re;
        if xnorm == 0.0 {
            e[k] = 0.0;
            continue;
        }
        let x0 = a[base * n + k];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { Complex64::new(1.0, 0.0) };
        let alpha = -phase * xnorm;
        for (j, i) in (base..n).enumerate() {
            v[j] = a[i * n + k];
        }
        v[0] -= alpha;
        let vnorm = v[..m_len].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in &mut v[..m_len] {
            *z /= vnorm;
        }
        // p = S v over the trailing block
        for (r, i) in (base..n).enumerate() {
            let row = &a[i * n + base..i * n + n];
            p[r] = row.iter().zip(&v[..m_len]).map(|(s, vj)| s * vj).sum();
        }
        let kk: f64 = v[..m_len].iter().zip(&p[..m_len]).map(|(vi, pi)| (vi.conj() * pi).re).sum();
        for j in 0..m_len {
            p[j] -= v[j] * kk;
            vc[j] = v[j].conj() * 2.0;
            pc[j] = p[j].conj() * 2.0;
        }
        for (r, i) in (base..n).enumerate() {
            let (vr, pr) = (v[r], p[r]);
            let row = &mut a[i * n + base..i * n + n];
            for ((x, vcj), pcj) in row.iter_mut().zip(&vc[..m_len]).zip(&pc[..m_len]) {
                *x -= vr * pcj + pr * vcj;
            }
        }
        e[k] = xnorm;
    }
    if n >= 2 {
        d[n - 2] = a[(n - 2) * n + n - 2].re;
        e[n - 2] = a[(n - 1) * n + n - 2].norm();
    }
    if n >= 1 {
        d[n - 1] = a[(n - 1) * n + n - 1].re;
    }
    (d, e)
}

fn tql_eigenvalues(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    let cap = 30 * n.max(1) + 30;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > cap {
                return Err(Error::NonConvergence { dim: n, residual: e[l].abs() });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = (g * g + 1.0).sqrt();
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = (f * f + g * g).sqrt();
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, rng: &mut impl Rng) -> CMatrix {
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(rng.gen_range(-1.0..1.0), 0.0);
            for j in i + 1..n {
                let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        m
    }

    fn sorted(mut v: Vec<f64>) -> Vec<f64> {
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    #[test]
    fn jacobi_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [1, 2, 3, 7, 16, 33] {
            let m = random_hermitian(n, &mut rng);
            let (vals, vecs) = jacobi_eigh(&m).unwrap();
            let back = CMatrix::reconstruct(&vecs, &vals);
            assert!(back.max_abs_diff(&m) < 1e-12, "n={n}");
            let gram = vecs.adjoint().matmul(&vecs);
            assert!(gram.max_abs_diff(&CMatrix::identity(n)) < 1e-12);
        }
    }

    #[test]
    fn solvers_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in [1, 2, 3, 5, 16, 40] {
            let m = random_hermitian(n, &mut rng);
            let a = sorted(jacobi_eigh(&m).unwrap().0);
            let b = sorted(tridiagonal_eigenvalues(&m).unwrap());
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 1e-11, "n={n}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn degenerate_and_diagonal_inputs() {
        let m = CMatrix::from_diag(&[0.5, 0.5]);
        assert_eq!(sorted(jacobi_eigh(&m).unwrap().0), vec![0.5, 0.5]);
        assert_eq!(sorted(tridiagonal_eigenvalues(&m).unwrap()), vec![0.5, 0.5]);
        let z = CMatrix::zeros(4);
        assert_eq!(tridiagonal_eigenvalues(&z).unwrap(), vec![0.0; 4]);
        let mut v = vec![Complex64::new(0.0, 0.0); 4];
        v[2] = Complex64::new(0.0, 1.0);
        let p = CMatrix::projector(&v);
        let vals = sorted(tridiagonal_eigenvalues(&p).unwrap());
        assert!((vals[3] - 1.0).abs() < 1e-15 && vals[0].abs() < 1e-15);
    }
}
