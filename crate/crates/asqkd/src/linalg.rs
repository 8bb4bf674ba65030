//! Dense complex linear algebra for small matrices (dim ≤ 64).
//!
//! Matrices are row-major `Vec<Complex64>` of length `dim * dim`. Everything
//! here is sized for the simulator's state spaces, not for general use.

use num_complex::Complex64;

/// Row-major matrix product `a * b`.
pub fn matmul(dim: usize, a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    debug_assert_eq!(a.len(), dim * dim);
    debug_assert_eq!(b.len(), dim * dim);
    let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
    for r in 0..dim {
        for k in 0..dim {
            let x = a[r * dim + k];
            if x.norm_sqr() == 0.0 {
                continue;
            }
            for c in 0..dim {
                out[r * dim + c] += x * b[k * dim + c];
            }
        }
    }
    out
}

/// Conjugate transpose.
pub fn dagger(dim: usize, a: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
    for r in 0..dim {
        for c in 0..dim {
            out[c * dim + r] = a[r * dim + c].conj();
        }
    }
    out
}

pub fn identity(dim: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        out[i * dim + i] = Complex64::new(1.0, 0.0);
    }
    out
}

/// Kronecker product of a (da×da) and a (db×db) matrix.
pub fn kron(da: usize, a: &[Complex64], db: usize, b: &[Complex64]) -> Vec<Complex64> {
    let dim = da * db;
    let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
    for ra in 0..da {
        for ca in 0..da {
            let x = a[ra * da + ca];
            if x.norm_sqr() == 0.0 {
                continue;
            }
            for rb in 0..db {
                for cb in 0..db {
                    out[(ra * db + rb) * dim + (ca * db + cb)] = x * b[rb * db + cb];
                }
            }
        }
    }
    out
}

fn one_norm(dim: usize, a: &[Complex64]) -> f64 {
    (0..dim)
        .map(|c| (0..dim).map(|r| a[r * dim + c].norm()).sum::<f64>())
        .fold(0.0f64, f64::max)
}

/// Matrix exponential by scaling and squaring with a Taylor series.
///
/// Accurate to machine precision for the well-conditioned anti-Hermitian
/// arguments used in this crate (exp(iH) for Hermitian H).
pub fn expm(dim: usize, a: &[Complex64]) -> Vec<Complex64> {
    let norm = one_norm(dim, a);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scale = Complex64::new((2.0f64).powi(-squarings), 0.0);
    let scaled: Vec<Complex64> = a.iter().map(|x| x * scale).collect();

    let mut result = identity(dim);
    let mut term = identity(dim);
    for k in 1..=40u32 {
        term = matmul(dim, &term, &scaled);
        let inv_k = Complex64::new(1.0 / f64::from(k), 0.0);
        for t in term.iter_mut() {
            *t *= inv_k;
        }
        for (r, t) in result.iter_mut().zip(term.iter()) {
            *r += t;
        }
        if one_norm(dim, &term) < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        result = matmul(dim, &result, &result);
    }
    result
}

/// Eigenvalues of a Hermitian matrix, ascending.
///
/// Embeds the d×d Hermitian matrix H = A + iB into the real symmetric
/// 2d×2d matrix [[A, -B], [B, A]], whose spectrum is that of H with every
/// eigenvalue doubled, and runs cyclic Jacobi on the embedding.
pub fn hermitian_eigenvalues(dim: usize, h: &[Complex64]) -> Vec<f64> {
    debug_assert_eq!(h.len(), dim * dim);
    let n = 2 * dim;
    let mut m = vec![0.0f64; n * n];
    for r in 0..dim {
        for c in 0..dim {
            let z = h[r * dim + c];
            m[r * n + c] = z.re;
            m[r * n + (c + dim)] = -z.im;
            m[(r + dim) * n + c] = z.im;
            m[(r + dim) * n + (c + dim)] = z.re;
        }
    }
    let mut doubled = jacobi_eigenvalues(n, &mut m);
    doubled.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // Adjacent entries of the sorted doubled spectrum are the two copies of
    // one eigenvalue of H; average them to shed a little rounding noise.
    (0..dim)
        .map(|i| 0.5 * (doubled[2 * i] + doubled[2 * i + 1]))
        .collect()
}

/// Cyclic Jacobi eigenvalue iteration for a real symmetric matrix.
fn jacobi_eigenvalues(n: usize, m: &mut [f64]) -> Vec<f64> {
    let scale = (0..n * n)
        .map(|i| m[i].abs())
        .fold(0.0f64, f64::max)
        .max(1.0);
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[p * n + q] * m[p * n + q];
            }
        }
        if off.sqrt() < 1e-14 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k * n + p];
                    let mkq = m[k * n + q];
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p * n + k];
                    let mqk = m[q * n + k];
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
            }
        }
    }
    (0..n).map(|i| m[i * n + i]).collect()
}
