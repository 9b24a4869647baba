//! Exact strict feasibility of homogeneous linear systems.
//!
//! `M x > 0` is feasible iff the alternative `M^T y = 0, 1^T y = 1, y >= 0`
//! is infeasible. The alternative is solved by a phase-one simplex with
//! Bland's rule; its final simplex multipliers are a separating vector, which
//! is exactly a solution `x` of the strict system.

use num_traits::{One, Signed, Zero};

use crate::geometry::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StrictFeasibility {
    /// `x` with `row · x >= 1` for every row.
    Feasible(Vec<Rational>),
    /// `y >= 0`, `sum y = 1`, `M^T y = 0`.
    Infeasible(Vec<Rational>),
}

/// Decides `rows · x > 0` for all rows, with `dim` unknowns.
pub fn strict_feasibility(rows: &[Vec<Rational>], dim: usize) -> StrictFeasibility {
    let m = rows.len();
    if m == 0 {
        return StrictFeasibility::Feasible(vec![Rational::zero(); dim]);
    }
    // Constraint matrix B = [M^T; 1^T] of shape (dim + 1) x m, right side e_last.
    let r = dim + 1;
    let cols = m + r;
    let mut tab: Vec<Vec<Rational>> = (0..r)
        .map(|i| {
            let mut row = Vec::with_capacity(cols + 1);
            for constraint in rows {
                row.push(if i < dim { constraint[i].clone() } else { Rational::one() });
            }
            for j in 0..r {
                row.push(if i == j { Rational::one() } else { Rational::zero() });
            }
            row.push(if i == dim { Rational::one() } else { Rational::zero() });
            row
        })
        .collect();
    let mut basis: Vec<usize> = (m..m + r).collect();
    // Reduced costs of the phase-one objective (sum of artificials).
    let mut cost: Vec<Rational> = (0..=cols)
        .map(|j| {
            if j >= m && j < cols {
                Rational::zero()
            } else {
                -tab.iter().map(|row| row[j].clone()).sum::<Rational>()
            }
        })
        .collect();

    while let Some(enter) = (0..cols).find(|&j| cost[j].is_negative()) {
        let mut leave: Option<(usize, Rational)> = None;
        for (i, row) in tab.iter().enumerate() {
            if row[enter].is_positive() {
                let ratio = &row[cols] / &row[enter];
                let better = match &leave {
                    None => true,
                    Some((li, best)) => ratio < *best || (ratio == *best && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        // Phase one is bounded below by zero, so some row always qualifies.
        let (pr, _) = leave.expect("phase-one simplex is bounded");
        let pivot = tab[pr][enter].clone();
        for v in tab[pr].iter_mut() {
            *v /= &pivot;
        }
        let pivot_row = tab[pr].clone();
        for (i, row) in tab.iter_mut().enumerate() {
            if i == pr || row[enter].is_zero() {
                continue;
            }
            let factor = row[enter].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                *v -= &factor * p;
            }
        }
        let factor = cost[enter].clone();
        for (v, p) in cost.iter_mut().zip(&pivot_row) {
            *v -= &factor * p;
        }
        basis[pr] = enter;
    }

    // The objective row holds -value in its last entry.
    let value = -cost[cols].clone();
    if value.is_zero() {
        let mut y = vec![Rational::zero(); m];
        for (i, &b) in basis.iter().enumerate() {
            if b < m {
                y[b] = tab[i][cols].clone();
            }
        }
        return StrictFeasibility::Infeasible(y);
    }
    // Multipliers z_i = 1 - reduced cost of artificial i; -z separates.
    let z: Vec<Rational> = (0..r).map(|i| Rational::one() - &cost[m + i]).collect();
    let mut x: Vec<Rational> = z[..dim].iter().map(|v| -v).collect();
    let slack = rows
        .iter()
        .map(|row| dot(row, &x))
        .min()
        .expect("nonempty system");
    debug_assert!(slack.is_positive());
    for v in x.iter_mut() {
        *v /= &slack;
    }
    StrictFeasibility::Feasible(x)
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}
