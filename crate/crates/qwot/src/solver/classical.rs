//! Discrete optimal transport by the transportation simplex.
//!
//! Small dense instances only (at most 64 atoms per side). The basis is a
//! spanning tree of the bipartite transport graph, entering arcs are chosen
//! by Bland's rule (first negative reduced cost in row-major order), so the
//! pivoting cannot cycle even on degenerate bases.

use crate::error::{Error, Result};

/// Maximum number of atoms per marginal.
pub const MAX_ATOMS: usize = 64;

const WEIGHT_SUM_TOL: f64 = 1e-9;

/// A finitely supported probability distribution.
#[derive(Debug, Clone)]
pub struct DiscreteDistribution {
    /// Atom locations (arbitrary dimension, used only for bookkeeping).
    pub atoms: Vec<Vec<f64>>,
    /// Nonnegative weights summing to one.
    pub weights: Vec<f64>,
}

impl DiscreteDistribution {
    pub fn validate(&self) -> Result<()> {
        if self.atoms.len() != self.weights.len() {
            return Err(Error::Shape("atoms and weights must have equal length".into()));
        }
        if self.atoms.is_empty() || self.atoms.len() > MAX_ATOMS {
            return Err(Error::InvalidProblem(format!(
                "distribution must have between 1 and {MAX_ATOMS} atoms"
            )));
        }
        if self.weights.iter().any(|&w| !w.is_finite() || w < 0.0) {
            return Err(Error::InvalidProblem("weights must be finite and nonnegative".into()));
        }
        let total: f64 = self.weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidProblem(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        Ok(())
    }
}

/// A discrete transport instance with an explicit cost matrix.
#[derive(Debug, Clone)]
pub struct ClassicalTransportProblem {
    pub mu: DiscreteDistribution,
    pub nu: DiscreteDistribution,
    pub cost_matrix: Vec<Vec<f64>>,
}

impl ClassicalTransportProblem {
    pub fn new(
        mu: DiscreteDistribution,
        nu: DiscreteDistribution,
        cost_matrix: Vec<Vec<f64>>,
    ) -> Result<Self> {
        mu.validate()?;
        nu.validate()?;
        let (m, n) = (mu.weights.len(), nu.weights.len());
        if cost_matrix.len() != m || cost_matrix.iter().any(|row| row.len() != n) {
            return Err(Error::Shape(format!("cost matrix must be {m}x{n}")));
        }
        if cost_matrix
            .iter()
            .flatten()
            .any(|&c| !c.is_finite() || c < 0.0)
        {
            return Err(Error::InvalidProblem(
                "cost matrix must be finite and nonnegative".into(),
            ));
        }
        Ok(Self { mu, nu, cost_matrix })
    }

    /// Builds the cost matrix by evaluating a ground cost on the atom pairs.
    pub fn from_cost_fn(
        mu: DiscreteDistribution,
        nu: DiscreteDistribution,
        cost: impl Fn(&[f64], &[f64]) -> f64,
    ) -> Result<Self> {
        let matrix: Vec<Vec<f64>> = mu
            .atoms
            .iter()
            .map(|x| nu.atoms.iter().map(|y| cost(x, y)).collect())
            .collect();
        Self::new(mu, nu, matrix)
    }
}

/// Solves the transport LP exactly; returns the optimal value and plan.
///
/// Zero-weight atoms are pruned before solving and restored as zero rows and
/// columns of the returned plan.
pub fn solve_classical_lp(prob: &ClassicalTransportProblem) -> Result<(f64, Vec<Vec<f64>>)> {
    prob.mu.validate()?;
    prob.nu.validate()?;
    let rows: Vec<usize> = (0..prob.mu.weights.len())
        .filter(|&i| prob.mu.weights[i] > 0.0)
        .collect();
    let cols: Vec<usize> = (0..prob.nu.weights.len())
        .filter(|&j| prob.nu.weights[j] > 0.0)
        .collect();
    if rows.is_empty() || cols.is_empty() {
        return Err(Error::InvalidProblem("empty support after pruning zero weights".into()));
    }
    let a: Vec<f64> = rows.iter().map(|&i| prob.mu.weights[i]).collect();
    let b: Vec<f64> = cols.iter().map(|&j| prob.nu.weights[j]).collect();
    let c: Vec<Vec<f64>> = rows
        .iter()
        .map(|&i| cols.iter().map(|&j| prob.cost_matrix[i][j]).collect())
        .collect();

    let (value, plan) = simplex(&a, &b, &c)?;

    let mut full = vec![vec![0.0; prob.nu.weights.len()]; prob.mu.weights.len()];
    for (pi, &i) in rows.iter().enumerate() {
        for (pj, &j) in cols.iter().enumerate() {
            full[i][j] = plan[pi][pj];
        }
    }
    Ok((value, full))
}

fn simplex(a: &[f64], b: &[f64], c: &[Vec<f64>]) -> Result<(f64, Vec<Vec<f64>>)> {
    let (m, n) = (a.len(), b.len());
    let cost_scale = c
        .iter()
        .flatten()
        .fold(1.0_f64, |acc, &v| acc.max(v.abs()));
    let eps = 1e-12 * cost_scale;

    // Northwest-corner basic feasible solution: a staircase of m+n−1 cells.
    let mut x = vec![vec![0.0; n]; m];
    let mut basic = vec![vec![false; n]; m];
    {
        let mut a_rem = a.to_vec();
        let mut b_rem = b.to_vec();
        let (mut i, mut j) = (0usize, 0usize);
        loop {
            let q = a_rem[i].min(b_rem[j]).max(0.0);
            x[i][j] = q;
            basic[i][j] = true;
            a_rem[i] -= q;
            b_rem[j] -= q;
            if i == m - 1 && j == n - 1 {
                break;
            }
            if a_rem[i] == 0.0 && i < m - 1 {
                i += 1;
            } else {
                j += 1;
            }
        }
    }

    let max_pivots = 50_000;
    for _ in 0..max_pivots {
        // Dual potentials from the basis tree (u[0] = 0).
        let mut u = vec![f64::NAN; m];
        let mut v = vec![f64::NAN; n];
        u[0] = 0.0;
        let mut queue = vec![(true, 0usize)];
        while let Some((is_row, idx)) = queue.pop() {
            if is_row {
                for j in 0..n {
                    if basic[idx][j] && v[j].is_nan() {
                        v[j] = c[idx][j] - u[idx];
                        queue.push((false, j));
                    }
                }
            } else {
                for i in 0..m {
                    if basic[i][idx] && u[i].is_nan() {
                        u[i] = c[i][idx] - v[idx];
                        queue.push((true, i));
                    }
                }
            }
        }
        if u.iter().any(|x| x.is_nan()) || v.iter().any(|x| x.is_nan()) {
            return Err(Error::Numerical("basis tree is disconnected".into()));
        }

        // Entering arc: first cell (row-major) with negative reduced cost.
        let mut entering = None;
        'scan: for i in 0..m {
            for j in 0..n {
                if !basic[i][j] && c[i][j] - u[i] - v[j] < -eps {
                    entering = Some((i, j));
                    break 'scan;
                }
            }
        }
        let (ei, ej) = match entering {
            Some(arc) => arc,
            None => {
                let value = x
                    .iter()
                    .zip(c)
                    .map(|(xr, cr)| xr.iter().zip(cr).map(|(p, q)| p * q).sum::<f64>())
                    .sum();
                return Ok((value, x));
            }
        };

        // Unique tree path from column ej back to row ei.
        let path = tree_path(&basic, m, n, ei, ej)
            .ok_or_else(|| Error::Numerical("no cycle found for entering arc".into()))?;

        // Cycle = entering (+) followed by the path cells, alternating −/+.
        let mut theta = f64::INFINITY;
        let mut leaving = None;
        for (idx, &(i, j)) in path.iter().enumerate() {
            if idx % 2 == 0 && x[i][j] < theta {
                theta = x[i][j];
                leaving = Some((i, j));
            }
        }
        let (li, lj) = leaving.ok_or_else(|| Error::Numerical("degenerate cycle".into()))?;
        x[ei][ej] += theta;
        for (idx, &(i, j)) in path.iter().enumerate() {
            if idx % 2 == 0 {
                x[i][j] -= theta;
            } else {
                x[i][j] += theta;
            }
        }
        x[li][lj] = 0.0;
        basic[li][lj] = false;
        basic[ei][ej] = true;
    }
    Err(Error::Numerical(format!(
        "transportation simplex exceeded {max_pivots} pivots"
    )))
}

/// Cells along the unique basis-tree path from column `ej` to row `ei`,
/// ordered cycle-wise so that even positions carry `−θ`.
fn tree_path(basic: &[Vec<bool>], m: usize, n: usize, ei: usize, ej: usize) -> Option<Vec<(usize, usize)>> {
    // Nodes: rows 0..m, columns m..m+n. BFS from column ej to row ei.
    let total = m + n;
    let mut parent: Vec<Option<(usize, (usize, usize))>> = vec![None; total];
    let mut visited = vec![false; total];
    let start = m + ej;
    let target = ei;
    visited[start] = true;
    let mut queue = std::collections::VecDeque::from([start]);
    while let Some(node) = queue.pop_front() {
        if node == target {
            break;
        }
        if node < m {
            let i = node;
            for j in 0..n {
                let next = m + j;
                if basic[i][j] && !visited[next] {
                    visited[next] = true;
                    parent[next] = Some((node, (i, j)));
                    queue.push_back(next);
                }
            }
        } else {
            let j = node - m;
            for i in 0..m {
                if basic[i][j] && !visited[i] {
                    visited[i] = true;
                    parent[i] = Some((node, (i, j)));
                    queue.push_back(i);
                }
            }
        }
    }
    if !visited[target] {
        return None;
    }
    let mut cells = Vec::new();
    let mut node = target;
    while node != start {
        let (prev, cell) = parent[node]?;
        cells.push(cell);
        node = prev;
    }
    // `cells` runs from row ei back to column ej; the cell adjacent to the
    // entering column must carry −θ, which is the last element, so reverse.
    cells.reverse();
    Some(cells)
}
