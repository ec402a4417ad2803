//! Cyclic Jacobi eigenvalue iteration for symmetric matrices.

use super::QuadraticForm;

const MAX_SWEEPS: usize = 100;

/// All eigenvalues of a symmetric form, ascending.
///
/// Sweeps of plane rotations are applied until the off-diagonal mass drops
/// below `ε·‖Q‖_F`, which leaves a backward error well under `1e-10·‖Q‖`.
pub fn symmetric_eigenvalues(q: &QuadraticForm) -> Vec<f64> {
    let n = q.dim();
    let mut a = q.as_slice().to_vec();
    let norm = q.frobenius_norm();
    if norm == 0.0 {
        return vec![0.0; n];
    }
    let target = f64::EPSILON * norm;

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum::<f64>()
            .sqrt();
        if off <= target {
            break;
        }
        for p in 0..n {
            for r in (p + 1)..n {
                let apr = a[p * n + r];
                if apr == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let arr = a[r * n + r];
                // rotation angle zeroing a[p][r]
                let theta = (arr - app) / (2.0 * apr);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akr = a[k * n + r];
                    a[k * n + p] = c * akp - s * akr;
                    a[k * n + r] = s * akp + c * akr;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let ark = a[r * n + k];
                    a[p * n + k] = c * apk - s * ark;
                    a[r * n + k] = s * apk + c * ark;
                }
                a[p * n + r] = 0.0;
                a[r * n + p] = 0.0;
            }
        }
    }

    let mut eig: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    eig.sort_by(f64::total_cmp);
    eig
}
