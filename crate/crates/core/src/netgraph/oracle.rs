//! Dense ground-truth computations: stationary distributions, Poisson-equation
//! solves, and Perron-Frobenius eigenpairs. All O(d^3) solves — these are the
//! reference values the stochastic schemes are checked against, not the
//! simulated protocol itself.

use super::{NetError, NonnegativeMatrix, StochasticMatrix};
use nalgebra::{DMatrix, DVector};

/// Solution of `V = PV + c - beta*1` anchored at `V[anchor] = beta`.
#[derive(Debug, Clone)]
pub struct PoissonSolution {
    pub v: Vec<f64>,
    pub beta: f64,
    pub anchor: usize,
}

/// Perron-Frobenius eigenpair scaled so that `alpha^T qstar = lambda`.
#[derive(Debug, Clone)]
pub struct PerronPair {
    pub lambda: f64,
    pub qstar: Vec<f64>,
    pub alpha: Vec<f64>,
}

/// Unique stationary distribution of an irreducible stochastic matrix,
/// computed by a dense linear solve of `eta^T P = eta^T`, `sum eta = 1`.
pub fn stationary_distribution(p: &StochasticMatrix) -> Result<Vec<f64>, NetError> {
    if !p.is_irreducible() {
        return Err(NetError::Reducible);
    }
    let d = p.dim();
    // (P^T - I) eta = 0 with the last equation replaced by sum(eta) = 1.
    let mut m = p.matrix().transpose() - DMatrix::<f64>::identity(d, d);
    for j in 0..d {
        m[(d - 1, j)] = 1.0;
    }
    let mut b = DVector::zeros(d);
    b[d - 1] = 1.0;
    let eta = m
        .lu()
        .solve(&b)
        .expect("irreducible chain has a unique stationary distribution");
    debug_assert!(eta.iter().all(|&v| v > 0.0));
    Ok(eta.iter().copied().collect())
}

/// Second-highest absolute value among the eigenvalues of `p`, i.e. the max
/// modulus after excluding one copy of the eigenvalue 1.
pub fn second_eigenvalue_modulus(p: &StochasticMatrix) -> f64 {
    let d = p.dim();
    if d == 1 {
        return 0.0;
    }
    let eigs = p.matrix().clone().complex_eigenvalues();
    // Drop the eigenvalue closest to 1 + 0i (guaranteed present).
    let one = nalgebra::Complex::new(1.0, 0.0);
    let skip = (0..d)
        .min_by(|&a, &b| {
            let da = (eigs[a] - one).norm();
            let db = (eigs[b] - one).norm();
            da.partial_cmp(&db).unwrap()
        })
        .unwrap();
    eigs.iter()
        .enumerate()
        .filter(|&(i, _)| i != skip)
        .map(|(_, z)| z.norm())
        .fold(0.0f64, f64::max)
        .min(1.0)
}

/// Solve the Poisson equation `V = PV + c - beta*1` for `(V, beta)` with the
/// normalization `V[anchor] = beta`. `beta` always equals `eta^T c`.
pub fn solve_poisson(
    p: &StochasticMatrix,
    c: &[f64],
    anchor: usize,
) -> Result<PoissonSolution, NetError> {
    let d = p.dim();
    if c.len() != d {
        return Err(NetError::DimensionMismatch { expected: d, got: c.len() });
    }
    if anchor >= d {
        return Err(NetError::EdgeOutOfBounds { i: anchor, j: anchor, d });
    }
    let eta = stationary_distribution(p)?;
    let beta: f64 = eta.iter().zip(c).map(|(e, x)| e * x).sum();

    // (I - P) V = c - beta*1 is rank d-1; replace the anchor equation with
    // V[anchor] = beta to pin the additive constant.
    let mut m = DMatrix::<f64>::identity(d, d) - p.matrix();
    let mut b = DVector::from_fn(d, |i, _| c[i] - beta);
    for j in 0..d {
        m[(anchor, j)] = if j == anchor { 1.0 } else { 0.0 };
    }
    b[anchor] = beta;
    let v = m
        .lu()
        .solve(&b)
        .expect("anchored Poisson system is nonsingular for irreducible P");

    let sol = PoissonSolution { v: v.iter().copied().collect(), beta, anchor };
    debug_assert!(poisson_residual(p, c, &sol) < 1e-9);
    Ok(sol)
}

/// Sup-norm residual of a candidate Poisson solution.
pub fn poisson_residual(p: &StochasticMatrix, c: &[f64], sol: &PoissonSolution) -> f64 {
    let pv = p.apply(&sol.v);
    sol.v
        .iter()
        .zip(&pv)
        .zip(c)
        .map(|((v, pv), c)| (v - pv - c + sol.beta).abs())
        .fold(0.0f64, f64::max)
}

/// Perron-Frobenius eigenpair of an irreducible nonnegative matrix, scaled so
/// that `alpha^T qstar = lambda`. The eigenvalue comes from a dense
/// eigendecomposition; the eigenvector from shifted inverse iteration.
pub fn perron_eigenpair(q: &NonnegativeMatrix, alpha: &[f64]) -> Result<PerronPair, NetError> {
    let d = q.dim();
    if alpha.len() != d {
        return Err(NetError::DimensionMismatch { expected: d, got: alpha.len() });
    }
    let alpha_sum: f64 = alpha.iter().sum();
    if alpha.iter().any(|&a| a <= 0.0) || (alpha_sum - 1.0).abs() > 1e-10 {
        return Err(NetError::BadWeights { sum: alpha_sum });
    }
    if !q.is_irreducible() {
        return Err(NetError::Reducible);
    }

    // Spectral radius = the Perron-Frobenius eigenvalue.
    let lambda = q
        .matrix()
        .clone()
        .complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0f64, f64::max);

    // Inverse iteration with a shift just above lambda isolates its eigenvector.
    let shift = lambda * (1.0 + 1e-8) + 1e-12;
    let m = q.matrix() - DMatrix::<f64>::identity(d, d) * shift;
    let lu = m.lu();
    let mut v = DVector::from_element(d, 1.0 / d as f64);
    for _ in 0..200 {
        let mut w = lu.solve(&v).expect("shifted matrix is nonsingular");
        let norm = w.amax();
        w /= norm;
        if w.iter().sum::<f64>() < 0.0 {
            w = -w;
        }
        let residual = (q.matrix() * &w - &w * lambda).amax() / lambda;
        v = w;
        if residual < 1e-12 {
            break;
        }
    }
    if v.iter().any(|&x| x <= 0.0) {
        return Err(NetError::Reducible);
    }

    let alpha_dot: f64 = alpha.iter().zip(v.iter()).map(|(a, x)| a * x).sum();
    let qstar: Vec<f64> = v.iter().map(|x| x * lambda / alpha_dot).collect();
    Ok(PerronPair { lambda, qstar, alpha: alpha.to_vec() })
}
