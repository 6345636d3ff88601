//! Exact primal simplex over rationals with Bland's anti-cycling rule.
//!
//! Dense two-phase tableau. All variables are nonnegative; rows may be
//! equalities or inequalities. No floating point anywhere: every pivot is
//! exact, so feasibility and optimality are decided, not approximated.

use crate::rational::Q;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rel {
    Le,
    Ge,
    Eq,
}

/// `maximize objective` (optional) subject to `rows`, `x >= 0`.
#[derive(Debug, Clone)]
pub struct SimplexProblem {
    pub num_vars: usize,
    /// Dense coefficient vector, relation, right-hand side.
    pub rows: Vec<(Vec<Q>, Rel, Q)>,
    /// Coefficients of the objective to maximize; `None` = feasibility only.
    pub objective: Option<Vec<Q>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimplexStatus {
    /// Objective present and maximized.
    Optimal,
    /// Feasibility mode: some feasible point found.
    Feasible,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct SimplexOutcome {
    pub status: SimplexStatus,
    /// Values of the structural variables (empty unless feasible/optimal).
    pub values: Vec<Q>,
    /// Exact optimum when status is `Optimal`.
    pub objective: Option<Q>,
}

struct Tableau {
    /// `rows x (cols + 1)`; the last column is the right-hand side.
    rows: Vec<Vec<Q>>,
    /// Reduced-cost row (length `cols + 1`; last entry is the objective value).
    zrow: Vec<Q>,
    /// Basic variable per row.
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn rhs(&self, row: usize) -> &Q {
        &self.rows[row][self.cols]
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let inv = self.rows[row][col].recip();
        for value in self.rows[row].iter_mut() {
            *value *= &inv;
        }
        let pivot_row = self.rows[row].clone();
        for (r, other) in self.rows.iter_mut().enumerate() {
            if r == row || other[col].is_zero() {
                continue;
            }
            let factor = std::mem::replace(&mut other[col], Q::zero());
            for (c, value) in other.iter_mut().enumerate() {
                if c != col && !pivot_row[c].is_zero() {
                    *value -= &factor * &pivot_row[c];
                }
            }
        }
        if !self.zrow[col].is_zero() {
            let factor = std::mem::replace(&mut self.zrow[col], Q::zero());
            for (c, value) in self.zrow.iter_mut().enumerate() {
                if c != col && !pivot_row[c].is_zero() {
                    *value -= &factor * &pivot_row[c];
                }
            }
        }
        self.basis[row] = col;
    }

    /// Bland's rule: entering column = smallest index with positive reduced
    /// cost; leaving row = smallest basic index among minimum ratios.
    /// Returns false when optimal, errors with `Unbounded` when a column has
    /// no positive entry.
    fn improve(&mut self, allowed: impl Fn(usize) -> bool) -> Result<bool, SimplexStatus> {
        let Some(entering) = (0..self.cols).find(|&j| allowed(j) && self.zrow[j].is_positive())
        else {
            return Ok(false);
        };
        let mut leaving: Option<(usize, Q)> = None;
        for row in 0..self.rows.len() {
            let coeff = &self.rows[row][entering];
            if !coeff.is_positive() {
                continue;
            }
            let ratio = self.rhs(row) / coeff;
            let better = match &leaving {
                None => true,
                Some((best_row, best_ratio)) => {
                    ratio < *best_ratio
                        || (ratio == *best_ratio && self.basis[row] < self.basis[*best_row])
                }
            };
            if better {
                leaving = Some((row, ratio));
            }
        }
        let Some((row, _)) = leaving else {
            return Err(SimplexStatus::Unbounded);
        };
        self.pivot(row, entering);
        Ok(true)
    }

    /// Rebuilds the reduced-cost row for the objective `c` (length `cols`).
    fn load_objective(&mut self, c: &[Q]) {
        self.zrow = c.to_vec();
        self.zrow.push(Q::zero());
        let basis = self.basis.clone();
        for (row, &b) in basis.iter().enumerate() {
            if self.zrow[b].is_zero() {
                continue;
            }
            let factor = std::mem::replace(&mut self.zrow[b], Q::zero());
            let row_values = self.rows[row].clone();
            for (c, value) in self.zrow.iter_mut().enumerate() {
                if c != b && !row_values[c].is_zero() {
                    *value -= &factor * &row_values[c];
                }
            }
        }
    }
}

/// Solves the problem exactly. Phase 1 decides feasibility; phase 2 runs only
/// when an objective is present.
pub fn solve(problem: &SimplexProblem) -> SimplexOutcome {
    let n = problem.num_vars;
    debug_assert!(problem.rows.iter().all(|(c, _, _)| c.len() == n));
    debug_assert!(problem.objective.as_ref().is_none_or(|c| c.len() == n));

    // Normalize to nonnegative right-hand sides.
    let mut rows: Vec<(Vec<Q>, Rel, Q)> = problem.rows.clone();
    for (coeffs, rel, rhs) in &mut rows {
        if rhs.is_negative() {
            for c in coeffs.iter_mut() {
                *c = -c.clone();
            }
            *rhs = -rhs.clone();
            *rel = match *rel {
                Rel::Le => Rel::Ge,
                Rel::Ge => Rel::Le,
                Rel::Eq => Rel::Eq,
            };
        }
    }

    // Column layout: structural | slack/surplus | artificial.
    let m = rows.len();
    let num_slack = rows.iter().filter(|(_, rel, _)| *rel != Rel::Eq).count();
    let needs_artificial: Vec<bool> = rows
        .iter()
        .map(|(_, rel, _)| matches!(rel, Rel::Ge | Rel::Eq))
        .collect();
    let num_art = needs_artificial.iter().filter(|&&b| b).count();
    let cols = n + num_slack + num_art;

    let mut tableau = Tableau {
        rows: Vec::with_capacity(m),
        zrow: vec![Q::zero(); cols + 1],
        basis: vec![0; m],
        cols,
    };

    let mut next_slack = n;
    let mut next_art = n + num_slack;
    let mut artificial_cols = Vec::new();
    for (i, (coeffs, rel, rhs)) in rows.iter().enumerate() {
        let mut row = vec![Q::zero(); cols + 1];
        row[..n].clone_from_slice(coeffs);
        row[cols] = rhs.clone();
        match rel {
            Rel::Le => {
                row[next_slack] = Q::one();
                tableau.basis[i] = next_slack;
                next_slack += 1;
            }
            Rel::Ge => {
                row[next_slack] = -Q::one();
                next_slack += 1;
                row[next_art] = Q::one();
                tableau.basis[i] = next_art;
                artificial_cols.push(next_art);
                next_art += 1;
            }
            Rel::Eq => {
                row[next_art] = Q::one();
                tableau.basis[i] = next_art;
                artificial_cols.push(next_art);
                next_art += 1;
            }
        }
        tableau.rows.push(row);
    }

    // Phase 1: maximize -sum(artificials).
    if num_art > 0 {
        let mut phase1 = vec![Q::zero(); cols];
        for &c in &artificial_cols {
            phase1[c] = -Q::one();
        }
        tableau.load_objective(&phase1);
        loop {
            match tableau.improve(|_| true) {
                Ok(true) => {}
                Ok(false) => break,
                Err(_) => unreachable!("phase 1 objective is bounded above by 0"),
            }
        }
        // Optimum is -(sum of artificials); nonzero means infeasible.
        if !tableau.zrow[cols].is_zero() {
            return SimplexOutcome {
                status: SimplexStatus::Infeasible,
                values: Vec::new(),
                objective: None,
            };
        }
        // Pivot basic artificials out (degenerate pivots); drop redundant rows.
        let is_artificial = |c: usize| c >= n + num_slack;
        let mut row = 0;
        while row < tableau.rows.len() {
            if is_artificial(tableau.basis[row]) {
                match (0..n + num_slack).find(|&c| !tableau.rows[row][c].is_zero()) {
                    Some(col) => tableau.pivot(row, col),
                    None => {
                        tableau.rows.remove(row);
                        tableau.basis.remove(row);
                        continue;
                    }
                }
            }
            row += 1;
        }
    }

    let extract = |tableau: &Tableau| -> Vec<Q> {
        let mut values = vec![Q::zero(); n];
        for (row, &b) in tableau.basis.iter().enumerate() {
            if b < n {
                values[b] = tableau.rhs(row).clone();
            }
        }
        values
    };

    let Some(objective) = &problem.objective else {
        return SimplexOutcome {
            status: SimplexStatus::Feasible,
            values: extract(&tableau),
            objective: None,
        };
    };

    // Phase 2 on structural + slack columns only.
    let mut phase2 = vec![Q::zero(); cols];
    phase2[..n].clone_from_slice(objective);
    tableau.load_objective(&phase2);
    let structural = n + num_slack;
    loop {
        match tableau.improve(|c| c < structural) {
            Ok(true) => {}
            Ok(false) => break,
            Err(status) => {
                return SimplexOutcome {
                    status,
                    values: Vec::new(),
                    objective: None,
                };
            }
        }
    }
    let values = extract(&tableau);
    let optimum = objective
        .iter()
        .zip(&values)
        .map(|(c, v)| c * v)
        .fold(Q::zero(), |acc, t| acc + t);
    SimplexOutcome {
        status: SimplexStatus::Optimal,
        values,
        objective: Some(optimum),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn max(
        num_vars: usize,
        objective: Vec<Q>,
        rows: Vec<(Vec<Q>, Rel, Q)>,
    ) -> SimplexOutcome {
        solve(&SimplexProblem {
            num_vars,
            rows,
            objective: Some(objective),
        })
    }

    #[test]
    fn maximizes_single_variable() {
        let out = max(1, vec![qi(1)], vec![(vec![qi(1)], Rel::Le, qi(1))]);
        assert_eq!(out.status, SimplexStatus::Optimal);
        assert_eq!(out.values, vec![qi(1)]);
        assert_eq!(out.objective, Some(qi(1)));
    }

    #[test]
    fn solves_small_lp_exactly() {
        // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18 => (2, 6), 36.
        let out = max(
            2,
            vec![qi(3), qi(5)],
            vec![
                (vec![qi(1), qi(0)], Rel::Le, qi(4)),
                (vec![qi(0), qi(2)], Rel::Le, qi(12)),
                (vec![qi(3), qi(2)], Rel::Le, qi(18)),
            ],
        );
        assert_eq!(out.status, SimplexStatus::Optimal);
        assert_eq!(out.values, vec![qi(2), qi(6)]);
        assert_eq!(out.objective, Some(qi(36)));
    }

    #[test]
    fn handles_equalities_and_ge() {
        // max x + y s.t. x + y = 1, x >= 1/4  => optimum 1.
        let out = max(
            2,
            vec![qi(1), qi(1)],
            vec![
                (vec![qi(1), qi(1)], Rel::Eq, qi(1)),
                (vec![qi(1), qi(0)], Rel::Ge, q(1, 4)),
            ],
        );
        assert_eq!(out.status, SimplexStatus::Optimal);
        assert_eq!(out.objective, Some(qi(1)));
        let x = &out.values[0];
        assert!(*x >= q(1, 4));
    }

    #[test]
    fn detects_infeasible() {
        let out = max(
            1,
            vec![qi(1)],
            vec![
                (vec![qi(1)], Rel::Ge, qi(2)),
                (vec![qi(1)], Rel::Le, qi(1)),
            ],
        );
        assert_eq!(out.status, SimplexStatus::Infeasible);
    }

    #[test]
    fn detects_unbounded() {
        let out = max(1, vec![qi(1)], vec![(vec![qi(-1)], Rel::Le, qi(1))]);
        assert_eq!(out.status, SimplexStatus::Unbounded);
    }

    #[test]
    fn feasibility_mode_returns_point() {
        let out = solve(&SimplexProblem {
            num_vars: 2,
            rows: vec![
                (vec![qi(1), qi(1)], Rel::Eq, qi(1)),
                (vec![qi(1), qi(-1)], Rel::Eq, qi(0)),
            ],
            objective: None,
        });
        assert_eq!(out.status, SimplexStatus::Feasible);
        assert_eq!(out.values, vec![q(1, 2), q(1, 2)]);
    }

    #[test]
    fn negative_rhs_rows_are_normalized() {
        // -x <= -1/2 is x >= 1/2.
        let out = max(1, vec![-qi(1)], vec![(vec![qi(-1)], Rel::Le, q(-1, 2))]);
        assert_eq!(out.status, SimplexStatus::Optimal);
        assert_eq!(out.values, vec![q(1, 2)]);
    }

    #[test]
    fn redundant_equalities_are_dropped() {
        // x + y = 1 stated twice.
        let out = max(
            2,
            vec![qi(1), qi(0)],
            vec![
                (vec![qi(1), qi(1)], Rel::Eq, qi(1)),
                (vec![qi(1), qi(1)], Rel::Eq, qi(1)),
            ],
        );
        assert_eq!(out.status, SimplexStatus::Optimal);
        assert_eq!(out.objective, Some(qi(1)));
    }

    #[test]
    fn degenerate_cycling_terminates() {
        // Beale's classic cycling example; Bland's rule must terminate.
        let out = max(
            4,
            vec![q(3, 4), qi(-150), q(1, 50), qi(-6)],
            vec![
                (vec![q(1, 4), qi(-60), q(-1, 25), qi(9)], Rel::Le, qi(0)),
                (vec![q(1, 2), qi(-90), q(-1, 50), qi(3)], Rel::Le, qi(0)),
                (vec![qi(0), qi(0), qi(1), qi(0)], Rel::Le, qi(1)),
            ],
        );
        assert_eq!(out.status, SimplexStatus::Optimal);
        assert_eq!(out.objective, Some(q(1, 20)));
    }
}
