//! Covariance matrices and the broadcast-cut mutual information quantities.
//!
//! The broadcast cut separates the source from everyone else. With all nodes
//! transmitting Gaussian inputs, the conditional mutual information across
//! that cut is an entropy difference of Gaussian vectors, so every quantity
//! here reduces to a log-determinant of a covariance matrix.
//!
//! Two small-network forms get dedicated entry points because the general
//! argument is proved by exhibiting them:
//!
//! * [`broadcast_mi_t3`]: three nodes, source input split as
//!   `X1 = alpha * X2 + W`. The mutual information is
//!   `1/2 log2(1 + (P1 - alpha^2 P2)/N2 + (P1 - alpha^2 P2)/N3)`,
//!   maximized by `alpha = 0`, i.e. by an input independent of the relay.
//! * [`broadcast_mi_t4_beta`]: four nodes with relay correlation
//!   `X2 = beta * X3 + W`. The value is computed through the full
//!   conditional-covariance determinant so that the cancellation of `beta`
//!   is exercised numerically rather than assumed; the closed form is
//!   `1/2 log2(1 + P1 (1/N2 + 1/N3 + 1/N4))`.
//!
//! All rates and entropies are in bits.

use crate::{Error, Result};

/// Relative tolerance for symmetry and positive-semidefiniteness checks.
const PSD_TOL: f64 = 1e-12;

// ---------------------------------------------------------------------------
// Covariance matrices
// ---------------------------------------------------------------------------

/// A validated symmetric positive-semidefinite matrix.
///
/// Symmetry must hold entrywise within `1e-12` relative to the largest
/// magnitude entry; semidefiniteness is accepted down to eigenvalues of
/// `-1e-12` times the largest diagonal entry, checked through a shifted
/// Cholesky factorization.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    dim: usize,
    data: Vec<f64>, // row-major
}

impl CovarianceMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidParameter {
                name: "covariance dimension",
                requirement: "square and nonempty",
                value: dim as f64,
            });
        }
        let mut data = Vec::with_capacity(dim * dim);
        let mut scale = 0.0f64;
        for row in &rows {
            for &x in row {
                if !x.is_finite() {
                    return Err(Error::InvalidParameter {
                        name: "covariance entry",
                        requirement: "finite",
                        value: x,
                    });
                }
                scale = scale.max(x.abs());
                data.push(x);
            }
        }
        let sym_tol = PSD_TOL * scale.max(1.0);
        for i in 0..dim {
            for j in i + 1..dim {
                let delta = (data[i * dim + j] - data[j * dim + i]).abs();
                if delta > sym_tol {
                    return Err(Error::NotSymmetric { i, j, delta });
                }
            }
        }
        let m = Self { dim, data };
        let max_diag = (0..dim).map(|i| m.get(i, i)).fold(0.0f64, f64::max);
        let shift = PSD_TOL * max_diag + f64::MIN_POSITIVE;
        if cholesky(dim, &m.shifted(shift)).is_err() {
            let (index, pivot) = cholesky(dim, &m.data).unwrap_err();
            return Err(Error::NotPositiveDefinite { index, pivot });
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    fn shifted(&self, shift: f64) -> Vec<f64> {
        let mut out = self.data.clone();
        for i in 0..self.dim {
            out[i * self.dim + i] += shift;
        }
        out
    }
}

/// Base-2 logarithm of the determinant of a positive-definite matrix.
///
/// Computed as `2 * sum(log2 L_ii)` from the Cholesky factor, which stays
/// accurate when the determinant itself would over- or underflow. Inputs
/// that are only semidefinite (a zero pivot) are rejected.
pub fn log_det2(m: &CovarianceMatrix) -> Result<f64> {
    let l = cholesky(m.dim, &m.data)
        .map_err(|(index, pivot)| Error::NotPositiveDefinite { index, pivot })?;
    Ok(2.0 * (0..m.dim).map(|i| l[i * m.dim + i].log2()).sum::<f64>())
}

/// Lower-triangular Cholesky factor of a symmetric matrix, or the index and
/// value of the first nonpositive pivot.
fn cholesky(dim: usize, data: &[f64]) -> std::result::Result<Vec<f64>, (usize, f64)> {
    let mut l = vec![0.0; dim * dim];
    for i in 0..dim {
        for j in 0..=i {
            let mut sum = data[i * dim + j];
            for k in 0..j {
                sum -= l[i * dim + k] * l[j * dim + k];
            }
            if i == j {
                if sum <= 0.0 || !sum.is_finite() {
                    return Err((i, sum));
                }
                l[i * dim + i] = sum.sqrt();
            } else {
                l[i * dim + j] = sum / l[j * dim + j];
            }
        }
    }
    Ok(l)
}

// ---------------------------------------------------------------------------
// Broadcast-cut mutual information
// ---------------------------------------------------------------------------

fn require_positive(name: &'static str, value: f64) -> Result<()> {
    if !value.is_finite() || value <= 0.0 {
        return Err(Error::InvalidParameter {
            name,
            requirement: "finite and > 0",
            value,
        });
    }
    Ok(())
}

/// `I(X1; Y2, Y3 | X2)` for the three-node network with unit gains and the
/// source input decomposed as `X1 = alpha * X2 + W`, `W` independent of
/// `X2` with variance `P1 - alpha^2 P2`.
///
/// Requires `alpha >= 0` and `alpha^2 P2 <= P1` (nonnegative residual
/// power); a hair of floating-point overshoot at the boundary is tolerated
/// and clamped.
pub fn broadcast_mi_t3(p1: f64, p2: f64, n2: f64, n3: f64, alpha: f64) -> Result<f64> {
    require_positive("P1", p1)?;
    require_positive("P2", p2)?;
    require_positive("N2", n2)?;
    require_positive("N3", n3)?;
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(Error::InvalidParameter {
            name: "alpha",
            requirement: "finite and >= 0",
            value: alpha,
        });
    }
    let residual = p1 - alpha * alpha * p2;
    if residual < -1e-12 * p1 {
        return Err(Error::InvalidParameter {
            name: "alpha",
            requirement: "alpha^2 P2 <= P1",
            value: alpha,
        });
    }
    let pw = residual.max(0.0);
    Ok(0.5 * (1.0 + pw / n2 + pw / n3).log2())
}

/// `I(X1; Y2, Y3, Y4 | X2, X3)` for the four-node network with unit gains
/// and correlated relay inputs `X2 = beta * X3 + W`.
///
/// The value is the entropy difference
/// `H(Y2,Y3,Y4 | X2,X3) - H(Y2,Y3,Y4 | X1,X2,X3)`, evaluated by forming the
/// joint covariance of `(Y2, Y3, Y4, X2, X3)` (which does depend on `beta`)
/// and conditioning via its Schur complement. The `beta` terms cancel in
/// exact arithmetic, leaving `1/2 log2(1 + P1 (1/N2 + 1/N3 + 1/N4))`; the
/// relay powers drop out with them, so unit auxiliary variances stand in for
/// `P3` and `Var(W)`.
pub fn broadcast_mi_t4_beta(p1: f64, n2: f64, n3: f64, n4: f64, beta: f64) -> Result<f64> {
    require_positive("P1", p1)?;
    require_positive("N2", n2)?;
    require_positive("N3", n3)?;
    require_positive("N4", n4)?;
    if !beta.is_finite() {
        return Err(Error::InvalidParameter {
            name: "beta",
            requirement: "finite",
            value: beta,
        });
    }

    // Auxiliary input statistics: X3 ~ N(0, p3), X2 = beta X3 + W.
    let p3 = 1.0;
    let pw = 1.0;
    let v2 = beta * beta * p3 + pw; // Var(X2)
    let v3 = p3; // Var(X3)
    let c23 = beta * p3; // Cov(X2, X3)

    // Received signals with unit gains:
    //   Y2 = X1 + X3 + Z2,  Y3 = X1 + X2 + Z3,  Y4 = X1 + X2 + X3 + Z4.
    let syy = [
        [p1 + v3 + n2, p1 + c23, p1 + c23 + v3],
        [p1 + c23, p1 + v2 + n3, p1 + v2 + c23],
        [p1 + c23 + v3, p1 + v2 + c23, p1 + v2 + v3 + 2.0 * c23 + n4],
    ];
    let syx = [[c23, v3], [v2, c23], [v2 + c23, v3 + c23]];
    let sxx = [[v2, c23], [c23, v3]];

    // Schur complement: Cov(Y | X2, X3) = Syy - Syx Sxx^-1 Sxy.
    let det = sxx[0][0] * sxx[1][1] - sxx[0][1] * sxx[1][0];
    debug_assert!(det > 0.0, "auxiliary input covariance must be PD");
    let inv = [
        [sxx[1][1] / det, -sxx[0][1] / det],
        [-sxx[1][0] / det, sxx[0][0] / det],
    ];
    let mut cond = vec![vec![0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let mut corr = 0.0;
            for a in 0..2 {
                for b in 0..2 {
                    corr += syx[i][a] * inv[a][b] * syx[j][b];
                }
            }
            cond[i][j] = syy[i][j] - corr;
        }
    }
    // Symmetrize away roundoff before validation.
    for i in 0..3 {
        for j in 0..i {
            let avg = 0.5 * (cond[i][j] + cond[j][i]);
            cond[i][j] = avg;
            cond[j][i] = avg;
        }
    }

    let conditional = CovarianceMatrix::new(cond)?;
    let h_given_inputs = n2.log2() + n3.log2() + n4.log2();
    Ok(0.5 * (log_det2(&conditional)? - h_given_inputs))
}

/// Broadcast-cut capacity `1/2 log2(1 + P1 * sum_{j=2..T} lambda_1j / N_j)`.
///
/// With every relay given unbounded power this is also the capacity of the
/// network, so it serves as the reference line the strategy rates are
/// measured against.
pub fn broadcast_cut_capacity(net: &crate::RelayNetwork) -> f64 {
    let t = net.node_count();
    let p1 = net.power(1);
    let snr: f64 = (2..=t).map(|j| net.gain(1, j) / net.noise(j)).sum();
    0.5 * (1.0 + p1 * snr).log2()
}

// ---------------------------------------------------------------------------
