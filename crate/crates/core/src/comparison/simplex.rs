//! Exact feasibility for `a_i·x ≥ b_i, x ≥ 0` by a phase-one simplex with
//! Bland's rule. Infeasibility comes with a Farkas multiplier vector.

use num_traits::{One, Signed, Zero};

use super::rational::Rational;

/// `Σ coeffs · x ≥ rhs`, with sparse `(variable, coefficient)` terms.
#[derive(Clone, Debug)]
pub(crate) struct Inequality {
    pub terms: Vec<(usize, Rational)>,
    pub rhs: Rational,
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum LpResult {
    Feasible(Vec<Rational>),
    /// `y ≥ 0` with `Σ y_i a_i ≤ 0` and `Σ y_i b_i > 0`.
    Infeasible(Vec<Rational>),
}

pub(crate) fn find_feasible_point(num_vars: usize, rows: &[Inequality]) -> LpResult {
    let m = rows.len();
    // columns: x (num_vars), one surplus per row, one artificial per positive-rhs row
    let positive: Vec<bool> = rows.iter().map(|r| r.rhs.is_positive()).collect();
    let num_art = positive.iter().filter(|&&p| p).count();
    let surplus0 = num_vars;
    let art0 = num_vars + m;
    let width = num_vars + m + num_art;

    let mut tableau = vec![vec![Rational::zero(); width + 1]; m];
    let mut basis = vec![0usize; m];
    let mut identity_col = vec![0usize; m];
    let mut next_art = art0;
    for (i, row) in rows.iter().enumerate() {
        let t = &mut tableau[i];
        for (j, a) in &row.terms {
            t[*j] += a;
        }
        t[surplus0 + i] = -Rational::one();
        t[width] = row.rhs.clone();
        if positive[i] {
            t[next_art] = Rational::one();
            basis[i] = next_art;
            identity_col[i] = next_art;
            next_art += 1;
        } else {
            for v in t.iter_mut() {
                *v = -v.clone();
            }
            basis[i] = surplus0 + i;
            identity_col[i] = surplus0 + i;
        }
    }

    let cost = |j: usize| -> Rational {
        if j >= art0 {
            Rational::one()
        } else {
            Rational::zero()
        }
    };
    // reduced costs and objective: c_j − Σ_{artificial rows} t_ij
    let mut reduced: Vec<Rational> = (0..=width)
        .map(|j| if j < width { cost(j) } else { Rational::zero() })
        .collect();
    for i in 0..m {
        if positive[i] {
            for j in 0..=width {
                let v = tableau[i][j].clone();
                reduced[j] -= v;
            }
        }
    }

    loop {
        let entering = (0..width).find(|&j| reduced[j].is_negative());
        let Some(q) = entering else { break };
        let mut leaving: Option<(usize, Rational)> = None;
        for i in 0..m {
            let a = &tableau[i][q];
            if a.is_positive() {
                let ratio = &tableau[i][width] / a;
                let better = match &leaving {
                    None => true,
                    Some((l, best)) => ratio < *best || (ratio == *best && basis[i] < basis[*l]),
                };
                if better {
                    leaving = Some((i, ratio));
                }
            }
        }
        // the phase-one objective is bounded below, so some row always qualifies
        let (p, _) = leaving.expect("phase-one objective is bounded");
        pivot(&mut tableau, &mut reduced, p, q);
        basis[p] = q;
    }

    // reduced[width] holds −(Σ artificials)
    if reduced[width].is_zero() {
        let mut x = vec![Rational::zero(); num_vars];
        for (i, &b) in basis.iter().enumerate() {
            if b < num_vars {
                x[b] = tableau[i][width].clone();
            }
        }
        LpResult::Feasible(x)
    } else {
        // simplex multipliers π_i = c_k − r_k for the row's initial identity column k
        let y = (0..m)
            .map(|i| {
                let k = identity_col[i];
                let pi = cost(k) - &reduced[k];
                if positive[i] {
                    pi
                } else {
                    -pi
                }
            })
            .collect();
        LpResult::Infeasible(y)
    }
}

fn pivot(tableau: &mut [Vec<Rational>], reduced: &mut [Rational], p: usize, q: usize) {
    let inv = Rational::one() / &tableau[p][q];
    for v in tableau[p].iter_mut() {
        if !v.is_zero() {
            *v *= &inv;
        }
    }
    let pivot_row = tableau[p].clone();
    for (i, row) in tableau.iter_mut().enumerate() {
        if i == p || row[q].is_zero() {
            continue;
        }
        let f = row[q].clone();
        for (v, pv) in row.iter_mut().zip(&pivot_row) {
            if !pv.is_zero() {
                *v -= &f * pv;
            }
        }
    }
    if !reduced[q].is_zero() {
        let f = reduced[q].clone();
        for (v, pv) in reduced.iter_mut().zip(&pivot_row) {
            if !pv.is_zero() {
                *v -= &f * pv;
            }
        }
    }
}

#[cfg(test)]
fn satisfies(x: &[Rational], rows: &[Inequality]) -> bool {
    x.iter().all(|v| !v.is_negative())
        && rows.iter().all(|r| {
            let lhs: Rational = r.terms.iter().map(|(j, a)| a * &x[*j]).sum();
            lhs >= r.rhs
        })
}

/// Exact check of a Farkas certificate of infeasibility.
pub(crate) fn is_farkas_witness(num_vars: usize, rows: &[Inequality], y: &[Rational]) -> bool {
    if y.len() != rows.len() || y.iter().any(|v| v.is_negative()) {
        return false;
    }
    let mut combined = vec![Rational::zero(); num_vars];
    let mut rhs = Rational::zero();
    for (row, yi) in rows.iter().zip(y) {
        if yi.is_zero() {
            continue;
        }
        for (j, a) in &row.terms {
            combined[*j] += a * yi;
        }
        rhs += &row.rhs * yi;
    }
    rhs.is_positive() && combined.iter().all(|v| !v.is_positive())
}

#[cfg(test)]
mod tests {
    use super::super::rational::{integer, rational};
    use super::*;

    fn row(terms: &[(usize, i64)], rhs: i64) -> Inequality {
        Inequality {
            terms: terms.iter().map(|&(j, a)| (j, integer(a))).collect(),
            rhs: integer(rhs),
        }
    }

    #[test]
    fn feasible_system() {
        // x0 + x1 ≥ 1, x0 − 2 x1 ≥ 0, −x0 ≥ −3
        let rows = vec![
            row(&[(0, 1), (1, 1)], 1),
            row(&[(0, 1), (1, -2)], 0),
            row(&[(0, -1)], -3),
        ];
        match find_feasible_point(2, &rows) {
            LpResult::Feasible(x) => assert!(satisfies(&x, &rows)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_system_has_witness() {
        // x0 ≥ 1, −x0 ≥ 0
        let rows = vec![row(&[(0, 1)], 1), row(&[(0, -1)], 0)];
        match find_feasible_point(1, &rows) {
            LpResult::Infeasible(y) => assert!(is_farkas_witness(1, &rows, &y)),
            other => panic!("{other:?}"),
        }
        // x0 + x1 ≥ 2, −x0 ≥ −1/2 (as 2), −x1 ≥ −1
        let rows = vec![
            row(&[(0, 1), (1, 1)], 2),
            Inequality {
                terms: vec![(0, integer(-1))],
                rhs: rational(-1, 2),
            },
            row(&[(1, -1)], -1),
        ];
        match find_feasible_point(2, &rows) {
            LpResult::Infeasible(y) => assert!(is_farkas_witness(2, &rows, &y)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn fractional_vertex() {
        // 2 x0 ≥ 1, −3 x0 ≥ −2
        let rows = vec![row(&[(0, 2)], 1), row(&[(0, -3)], -2)];
        match find_feasible_point(1, &rows) {
            LpResult::Feasible(x) => {
                assert!(satisfies(&x, &rows));
                assert_eq!(x[0], rational(1, 2));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_and_degenerate() {
        assert_eq!(
            find_feasible_point(2, &[]),
            LpResult::Feasible(vec![integer(0), integer(0)])
        );
        let rows = vec![row(&[(0, 1), (1, -1)], 0), row(&[(1, 1), (0, -1)], 0)];
        assert!(matches!(
            find_feasible_point(2, &rows),
            LpResult::Feasible(_)
        ));
    }
}
