//! Restarted Lanczos with full reorthogonalization for the lowest eigenpairs
//! of a real symmetric operator.
//!
//! Several eigenpairs are obtained one at a time: each run works in the
//! orthogonal complement of the already converged vectors, so a degenerate
//! ground level shows up as repeated eigenvalues instead of being hidden by
//! the single-vector Krylov space.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::tridiag;

/// A real symmetric linear map.
pub trait SymmetricOperator {
    fn dim(&self) -> usize;
    /// `y = A x`
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanczosOptions {
    /// Krylov space size per restart cycle.
    pub max_krylov: usize,
    /// Restart cycles before giving up.
    pub max_restarts: usize,
    /// Required residual, relative to `max(1, |E|)`.
    pub residual_tolerance: f64,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            max_krylov: 120,
            max_restarts: 50,
            residual_tolerance: 1e-10,
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("Lanczos did not converge after {iterations} iterations (residual {residual:.3e}, wanted {tolerance:.3e})")]
    NotConverged {
        iterations: usize,
        residual: f64,
        tolerance: f64,
    },
    #[error("requested {requested} eigenpairs of a {dim}-dimensional operator")]
    TooManyRequested { requested: usize, dim: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RitzPair {
    pub value: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
}

pub fn lowest_eigenpairs(
    op: &dyn SymmetricOperator,
    count: usize,
    options: &LanczosOptions,
) -> Result<Vec<RitzPair>, SolverError> {
    let dim = op.dim();
    if count > dim {
        return Err(SolverError::TooManyRequested {
            requested: count,
            dim,
        });
    }
    let mut found: Vec<RitzPair> = Vec::with_capacity(count);
    for k in 0..count {
        let locked: Vec<&[f64]> = found.iter().map(|p| p.vector.as_slice()).collect();
        let pair = lowest_in_complement(op, &locked, options, options.seed.wrapping_add(k as u64))?;
        found.push(pair);
    }
    found.sort_by(|a, b| a.value.total_cmp(&b.value));
    Ok(found)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += alpha * xi);
}

/// Two passes of classical Gram-Schmidt against every vector in `against`.
fn orthogonalize<'a>(w: &mut [f64], against: impl Iterator<Item = &'a [f64]> + Clone) {
    for _ in 0..2 {
        for q in against.clone() {
            let c = dot(w, q);
            axpy(-c, q, w);
        }
    }
}

fn lowest_in_complement(
    op: &dyn SymmetricOperator,
    locked: &[&[f64]],
    options: &LanczosOptions,
    seed: u64,
) -> Result<RitzPair, SolverError> {
    let n = op.dim();
    let free = n - locked.len();
    let krylov = options.max_krylov.max(2).min(free);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut start: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();

    let mut iterations = 0;
    let mut last_residual = f64::INFINITY;
    let mut last_tolerance = options.residual_tolerance;
    let mut w = vec![0.0; n];

    for _ in 0..=options.max_restarts {
        orthogonalize(&mut start, locked.iter().copied());
        let s = norm(&start);
        if s == 0.0 {
            start = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            continue;
        }
        start.iter_mut().for_each(|v| *v /= s);

        let mut basis: Vec<Vec<f64>> = vec![start.clone()];
        let mut alpha: Vec<f64> = Vec::with_capacity(krylov);
        let mut beta: Vec<f64> = Vec::with_capacity(krylov);
        let mut coeffs;
        loop {
            let j = basis.len() - 1;
            op.apply(&basis[j], &mut w);
            iterations += 1;
            let a = dot(&w, &basis[j]);
            alpha.push(a);
            axpy(-a, &basis[j], &mut w);
            if j > 0 {
                axpy(-beta[j - 1], &basis[j - 1], &mut w);
            }
            orthogonalize(
                &mut w,
                basis.iter().map(Vec::as_slice).chain(locked.iter().copied()),
            );
            let b = norm(&w);
            let k = alpha.len();
            let theta = tridiag::kth_eigenvalue(&alpha, &beta, 0);
            coeffs = tridiag::eigenvector(&alpha, &beta, theta);
            let estimate = b * coeffs[k - 1].abs();
            let tol = options.residual_tolerance * theta.abs().max(1.0);
            let exhausted = b <= 1e-14 * (a.abs() + 1.0);
            if k >= krylov || exhausted || estimate <= 1e-2 * tol {
                break;
            }
            beta.push(b);
            basis.push(w.iter().map(|v| v / b).collect());
        }

        let mut ritz = vec![0.0; n];
        for (c, q) in coeffs.iter().zip(&basis) {
            axpy(*c, q, &mut ritz);
        }
        orthogonalize(&mut ritz, locked.iter().copied());
        let r = norm(&ritz);
        ritz.iter_mut().for_each(|v| *v /= r);

        op.apply(&ritz, &mut w);
        let value = dot(&ritz, &w);
        axpy(-value, &ritz, &mut w);
        let residual = norm(&w);
        let tolerance = options.residual_tolerance * value.abs().max(1.0);
        if residual <= tolerance {
            return Ok(RitzPair {
                value,
                vector: ritz,
                residual,
            });
        }
        last_residual = residual;
        last_tolerance = tolerance;
        start = ritz;
    }
    Err(SolverError::NotConverged {
        iterations,
        residual: last_residual,
        tolerance: last_tolerance,
    })
}
