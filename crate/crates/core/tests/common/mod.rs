//! Reference computations shared by the integration tests. Nothing here
//! calls into the library's numerics.

#![allow(dead_code)]

use rand::Rng;

/// `det(A − λI)` by Gaussian elimination with partial pivoting.
pub fn char_poly_at(a: &[Vec<f64>], lambda: f64) -> f64 {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            r.iter()
                .enumerate()
                .map(|(j, &v)| if i == j { v - lambda } else { v })
                .collect()
        })
        .collect();
    let mut det = 1.0;
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| m[i][k].abs().total_cmp(&m[j][k].abs()))
            .unwrap();
        if m[p][k] == 0.0 {
            return 0.0;
        }
        if p != k {
            m.swap(p, k);
            det = -det;
        }
        det *= m[k][k];
        for i in k + 1..n {
            let f = m[i][k] / m[k][k];
            for j in k..n {
                m[i][j] -= f * m[k][j];
            }
        }
    }
    det
}

/// Eigenvalues of a symmetric matrix with distinct eigenvalues: sign changes
/// of the characteristic polynomial on a fine grid inside the Gershgorin
/// bound, refined by bisection.
pub fn symmetric_eigenvalues_by_char_poly(a: &[Vec<f64>]) -> Vec<f64> {
    let bound = a
        .iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
        + 1.0;
    let steps = 200_000;
    let h = 2.0 * bound / steps as f64;
    let mut roots = Vec::new();
    let mut x0 = -bound;
    let mut f0 = char_poly_at(a, x0);
    for i in 1..=steps {
        let x1 = -bound + i as f64 * h;
        let f1 = char_poly_at(a, x1);
        if f0 == 0.0 {
            roots.push(x0);
        } else if f0.signum() != f1.signum() && f1 != 0.0 {
            let (mut lo, mut hi, mut flo) = (x0, x1, f0);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                let fm = char_poly_at(a, mid);
                if fm.signum() == flo.signum() {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        x0 = x1;
        f0 = f1;
    }
    roots
}

#[derive(Clone, Copy, Debug)]
struct Complex(f64, f64);

impl Complex {
    fn add(self, o: Complex) -> Complex {
        Complex(self.0 + o.0, self.1 + o.1)
    }
    fn sub(self, o: Complex) -> Complex {
        Complex(self.0 - o.0, self.1 - o.1)
    }
    fn mul(self, o: Complex) -> Complex {
        Complex(self.0 * o.0 - self.1 * o.1, self.0 * o.1 + self.1 * o.0)
    }
    fn div(self, o: Complex) -> Complex {
        let d = o.0 * o.0 + o.1 * o.1;
        Complex(
            (self.0 * o.0 + self.1 * o.1) / d,
            (self.1 * o.0 - self.0 * o.1) / d,
        )
    }
    fn abs(self) -> f64 {
        self.0.hypot(self.1)
    }
}

/// Coefficients `c` of `det(λI − A) = λⁿ + c[0]λⁿ⁻¹ + … + c[n−1]` (Faddeev–LeVerrier).
pub fn char_poly_coefficients(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    let mut m = vec![vec![0.0; n]; n];
    let mut coeffs = Vec::with_capacity(n);
    let mut c_prev = 1.0;
    for k in 1..=n {
        // M_k = A·M_{k−1} + c_{k−1} I
        let mut next = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                next[i][j] = (0..n).map(|l| a[i][l] * m[l][j]).sum::<f64>();
            }
            next[i][i] += c_prev;
        }
        m = next;
        let am_trace: f64 = (0..n)
            .map(|i| (0..n).map(|l| a[i][l] * m[l][i]).sum::<f64>())
            .sum();
        let c = -am_trace / k as f64;
        coeffs.push(c);
        c_prev = c;
    }
    coeffs
}

/// All complex roots of the monic polynomial by Durand–Kerner iteration.
pub fn spectral_radius_by_char_poly(a: &[Vec<f64>]) -> f64 {
    let coeffs = char_poly_coefficients(a);
    let n = coeffs.len();
    let eval = |z: Complex| {
        let mut acc = Complex(1.0, 0.0);
        for &c in &coeffs {
            acc = acc.mul(z).add(Complex(c, 0.0));
        }
        acc
    };
    let scale = 1.0 + coeffs.iter().map(|c| c.abs()).fold(0.0, f64::max);
    let seed = Complex(0.4, 0.9);
    let mut roots: Vec<Complex> = (0..n)
        .map(|k| {
            let mut z = Complex(scale, 0.0);
            for _ in 0..k {
                z = z.mul(seed);
            }
            z
        })
        .collect();
    for _ in 0..2000 {
        let mut delta = 0.0_f64;
        for i in 0..n {
            let mut denom = Complex(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    denom = denom.mul(roots[i].sub(roots[j]));
                }
            }
            let step = eval(roots[i]).div(denom);
            roots[i] = roots[i].sub(step);
            delta = delta.max(step.abs());
        }
        if delta < 1e-15 * scale {
            break;
        }
    }
    roots.iter().map(|z| z.abs()).fold(0.0, f64::max)
}

pub fn random_matrix(rng: &mut impl Rng, n: usize, spread: f64) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..n).map(|_| rng.random_range(-spread..spread)).collect())
        .collect()
}

pub fn random_symmetric(rng: &mut impl Rng, n: usize) -> Vec<Vec<f64>> {
    let a = random_matrix(rng, n, 1.0);
    (0..n)
        .map(|i| (0..n).map(|j| 0.5 * (a[i][j] + a[j][i])).collect())
        .collect()
}
