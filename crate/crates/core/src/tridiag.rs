//! Eigenvalues of real symmetric tridiagonal matrices by Sturm-sequence
//! bisection, and eigenvectors by inverse iteration.
//!
//! `diag` has length `n`, `off` has length `n - 1` (`off[i]` couples `i` and `i + 1`).

/// Number of eigenvalues strictly below `x`.
pub fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0f64;
    for i in 0..diag.len() {
        let b2 = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
        q = diag[i] - x - if i == 0 { 0.0 } else { b2 / q };
        if q == 0.0 {
            q = -f64::EPSILON * (diag[i].abs() + x.abs() + 1.0);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn gershgorin(diag: &[f64], off: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..diag.len() {
        let r = if i > 0 { off[i - 1].abs() } else { 0.0 }
            + if i + 1 < diag.len() { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    let pad = 1e-12 * (lo.abs().max(hi.abs()) + 1.0);
    (lo - pad, hi + pad)
}

/// The `k`-th smallest eigenvalue (zero-based), bisected to machine precision.
pub fn kth_eigenvalue(diag: &[f64], off: &[f64], k: usize) -> f64 {
    assert!(k < diag.len());
    let (mut lo, mut hi) = gershgorin(diag, off);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(diag, off, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// All eigenvalues in ascending order.
pub fn eigenvalues(diag: &[f64], off: &[f64]) -> Vec<f64> {
    (0..diag.len()).map(|k| kth_eigenvalue(diag, off, k)).collect()
}

/// Unit eigenvector for an eigenvalue `theta` computed by [`kth_eigenvalue`].
pub fn eigenvector(diag: &[f64], off: &[f64], theta: f64) -> Vec<f64> {
    let n = diag.len();
    if n == 1 {
        return vec![1.0];
    }
    let (lo, hi) = gershgorin(diag, off);
    let shift = theta + 1e-13 * (hi - lo).max(1.0);
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i * 7919) % 13) as f64).collect();
    for _ in 0..4 {
        x = solve_shifted(diag, off, shift, &x);
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        x.iter_mut().for_each(|v| *v /= norm);
    }
    x
}

/// Solves `(T - shift) y = rhs` by Gaussian elimination with partial pivoting.
fn solve_shifted(diag: &[f64], off: &[f64], shift: f64, rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    // Row i holds (a[i], b[i], c[i]) in columns i, i+1, i+2 after pivoting.
    let mut a: Vec<f64> = diag.iter().map(|d| d - shift).collect();
    let mut b: Vec<f64> = (0..n).map(|i| if i + 1 < n { off[i] } else { 0.0 }).collect();
    let mut c = vec![0.0; n];
    let mut sub: Vec<f64> = (0..n).map(|i| if i > 0 { off[i - 1] } else { 0.0 }).collect();
    let mut y = rhs.to_vec();
    let tiny = f64::EPSILON * diag.iter().chain(off).fold(1.0f64, |m, v| m.max(v.abs()));
    for i in 0..n - 1 {
        // sub[i + 1] is the entry below the pivot in column i
        if sub[i + 1].abs() > a[i].abs() {
            // swap rows i and i + 1
            let (ai, bi, ci) = (a[i], b[i], c[i]);
            a[i] = sub[i + 1];
            b[i] = a[i + 1];
            c[i] = b[i + 1];
            sub[i + 1] = ai;
            a[i + 1] = bi;
            b[i + 1] = ci;
            y.swap(i, i + 1);
        }
        if a[i].abs() < tiny {
            a[i] = tiny;
        }
        let factor = sub[i + 1] / a[i];
        a[i + 1] -= factor * b[i];
        b[i + 1] -= factor * c[i];
        y[i + 1] -= factor * y[i];
    }
    if a[n - 1].abs() < tiny {
        a[n - 1] = tiny;
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = y[i];
        if i + 1 < n {
            s -= b[i] * x[i + 1];
        }
        if i + 2 < n {
            s -= c[i] * x[i + 2];
        }
        x[i] = s / a[i];
    }
    x
}
