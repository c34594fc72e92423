use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest dimension handled by the dense solver.
pub const DENSE_LIMIT: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EigenMethod {
    Lanczos,
    Dense,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LanczosOptions {
    /// Krylov dimension per restart cycle.
    pub krylov: usize,
    pub max_restarts: usize,
    /// Residual tolerance relative to the spectral scale.
    pub tol: f64,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions { krylov: 300, max_restarts: 40, tol: 1e-10, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpair {
    pub value: f64,
    pub vector: Vec<f64>,
    /// `||A v - λ v||` for the returned unit vector.
    pub residual: f64,
    pub iterations: usize,
    pub method: EigenMethod,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn residual<F: Fn(&[f64], &mut [f64])>(apply: &F, v: &[f64], lambda: f64) -> f64 {
    let mut w = vec![0.0; v.len()];
    apply(v, &mut w);
    w.iter().zip(v).map(|(a, b)| (a - lambda * b).powi(2)).sum::<f64>().sqrt()
}

/// Smallest eigenpair of the symmetric operator `apply` on `R^dim`.
/// Uses dense diagonalisation up to [`DENSE_LIMIT`], Lanczos otherwise.
pub fn smallest_eigenpair<F>(dim: usize, apply: F, opts: &LanczosOptions) -> Result<Eigenpair>
where
    F: Fn(&[f64], &mut [f64]),
{
    if dim == 0 {
        return Err(Error::domain("operator dimension is zero"));
    }
    if dim <= DENSE_LIMIT {
        dense_smallest(dim, apply)
    } else {
        lanczos_smallest(dim, apply, opts)
    }
}

pub fn dense_smallest<F>(dim: usize, apply: F) -> Result<Eigenpair>
where
    F: Fn(&[f64], &mut [f64]),
{
    let mut m = DMatrix::<f64>::zeros(dim, dim);
    let mut e = vec![0.0; dim];
    let mut col = vec![0.0; dim];
    for j in 0..dim {
        e[j] = 1.0;
        apply(&e, &mut col);
        e[j] = 0.0;
        for i in 0..dim {
            m[(i, j)] = col[i];
        }
    }
    let asym = (&m - m.transpose()).amax();
    if asym > 1e-10 * m.amax().max(1.0) {
        return Err(Error::numerical(format!("operator is not symmetric (deviation {asym:e})")));
    }
    let m = (&m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(m);
    let (k, value) =
        eig.eigenvalues
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, v)| if *v < acc.1 { (i, *v) } else { acc });
    let vector: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
    let residual = residual(&apply, &vector, value);
    Ok(Eigenpair { value, vector, residual, iterations: 1, method: EigenMethod::Dense })
}

/// Lanczos with full reorthogonalisation, restarted from the current Ritz vector.
pub fn lanczos_smallest<F>(dim: usize, apply: F, opts: &LanczosOptions) -> Result<Eigenpair>
where
    F: Fn(&[f64], &mut [f64]),
{
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut start: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() - 0.5).collect();
    let mut iterations = 0;
    let mut scale = 0.0f64;
    let mut best: Option<(f64, Vec<f64>, f64)> = None;
    let krylov = opts.krylov.min(dim).max(2);
    for _ in 0..=opts.max_restarts {
        let n0 = norm(&start);
        start.iter_mut().for_each(|v| *v /= n0);
        let mut basis: Vec<Vec<f64>> = vec![start.clone()];
        let mut alpha = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        let mut w = vec![0.0; dim];
        let mut breakdown = false;
        for k in 0..krylov {
            apply(&basis[k], &mut w);
            iterations += 1;
            let a = dot(&w, &basis[k]);
            alpha.push(a);
            // two passes of classical Gram-Schmidt against the whole basis
            for _ in 0..2 {
                for q in &basis {
                    let c = dot(&w, q);
                    w.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
                }
            }
            let b = norm(&w);
            scale = scale.max(a.abs()).max(b);
            if b <= 1e-14 * scale.max(1.0) || k + 1 == krylov {
                breakdown = b <= 1e-14 * scale.max(1.0);
                if !breakdown {
                    beta.push(b);
                }
                break;
            }
            beta.push(b);
            basis.push(w.iter().map(|x| x / b).collect());
        }
        let m = alpha.len();
        let mut t = DMatrix::<f64>::zeros(m, m);
        for i in 0..m {
            t[(i, i)] = alpha[i];
            if i + 1 < m {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let eig = SymmetricEigen::new(t);
        let (k, theta) =
            eig.eigenvalues
                .iter()
                .enumerate()
                .fold((0, f64::INFINITY), |acc, (i, v)| if *v < acc.1 { (i, *v) } else { acc });
        let y = eig.eigenvectors.column(k);
        let mut ritz = vec![0.0; dim];
        for (j, q) in basis.iter().take(m).enumerate() {
            ritz.iter_mut().zip(q).for_each(|(r, x)| *r += y[j] * x);
        }
        let nr = norm(&ritz);
        ritz.iter_mut().for_each(|v| *v /= nr);
        let res = residual(&apply, &ritz, theta);
        scale = scale.max(theta.abs());
        if best.as_ref().is_none_or(|b| res < b.2) {
            best = Some((theta, ritz.clone(), res));
        }
        if breakdown || res <= opts.tol * scale.max(1.0) {
            return Ok(Eigenpair {
                value: theta,
                vector: ritz,
                residual: res,
                iterations,
                method: EigenMethod::Lanczos,
            });
        }
        start = ritz;
    }
    let (value, _, res) = best.expect("at least one cycle ran");
    Err(Error::numerical(format!(
        "Lanczos did not converge after {iterations} products: eigenvalue {value}, residual {res:e}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian_1d(n: usize) -> impl Fn(&[f64], &mut [f64]) {
        move |x: &[f64], y: &mut [f64]| {
            for i in 0..n {
                let l = if i > 0 { x[i - 1] } else { 0.0 };
                let r = if i + 1 < n { x[i + 1] } else { 0.0 };
                y[i] = 2.0 * x[i] - l - r;
            }
        }
    }

    #[test]
    fn dirichlet_laplacian_lowest_mode() {
        for n in [50, 200] {
            let exact = 2.0 - 2.0 * (std::f64::consts::PI / (n as f64 + 1.0)).cos();
            let e = lanczos_smallest(n, laplacian_1d(n), &LanczosOptions { krylov: 60, ..Default::default() }).unwrap();
            assert!((e.value - exact).abs() < 1e-9, "n = {n}: {} vs {exact}", e.value);
            assert!(e.residual < 1e-6);
        }
    }

    #[test]
    fn dense_and_lanczos_agree_on_a_diagonal() {
        let n = 2500;
        let apply = |x: &[f64], y: &mut [f64]| {
            for i in 0..x.len() {
                y[i] = ((i * 37) % 101) as f64 - 3.5 + 0.001 * i as f64;
                y[i] *= x[i];
            }
        };
        let l = smallest_eigenpair(n, apply, &LanczosOptions::default()).unwrap();
        assert_eq!(l.method, EigenMethod::Lanczos);
        let d = dense_smallest(400, apply).unwrap();
        assert!((l.value - (-3.5)).abs() < 1e-9, "{}", l.value);
        assert!((d.value - (-3.5)).abs() < 1e-12);
    }
}
