//! Optimal one-to-one assignment over a cost matrix with infeasible
//! entries.
//!
//! The solver maximizes the number of feasible matches and, among those,
//! minimizes total cost (shortest-augmenting-path Kuhn-Munkres on a padded
//! square matrix). Rows and columns left over are reported unmatched.

use crate::num::Real;

/// Rectangular cost matrix; `None` marks an infeasible pair.
#[derive(Debug, Clone)]
pub struct CostMatrix<T> {
    rows: usize,
    cols: usize,
    entries: Vec<Option<T>>,
}

impl<T: Real> CostMatrix<T> {
    pub fn new(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![None; rows * cols],
        }
    }

    pub fn set(&mut self, row: usize, col: usize, cost: T) {
        self.entries[row * self.cols + col] = Some(cost);
    }

    pub fn get(&self, row: usize, col: usize) -> Option<T> {
        self.entries[row * self.cols + col]
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }
}

/// Result of an assignment: matched `(row, col)` pairs sorted by row, plus
/// the unmatched indices on either side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    pub pairs: Vec<(usize, usize)>,
    pub unmatched_rows: Vec<usize>,
    pub unmatched_cols: Vec<usize>,
}

impl Assignment {
    /// Total cost of the matched pairs, summed in row order.
    pub fn total_cost<T: Real>(&self, costs: &CostMatrix<T>) -> T {
        self.pairs.iter().fold(T::zero(), |acc, &(r, c)| {
            acc + costs.get(r, c).expect("matched pair is feasible")
        })
    }
}

/// Solve the assignment problem. Costs must be non-negative.
pub fn min_cost_assignment<T: Real>(costs: &CostMatrix<T>) -> Assignment {
    let (rows, cols) = (costs.rows, costs.cols);
    if rows == 0 || cols == 0 {
        return Assignment {
            pairs: Vec::new(),
            unmatched_rows: (0..rows).collect(),
            unmatched_cols: (0..cols).collect(),
        };
    }

    // Pad to square: every real row gets a private "stay unmatched" column
    // and vice versa. `big` exceeds any feasible total, so the solver first
    // maximizes matches, then minimizes cost among them.
    let n = rows + cols;
    let mut max_cost = T::zero();
    for e in costs.entries.iter().flatten() {
        max_cost = max_cost.max(*e);
    }
    let nf = T::from_usize(n + 1).unwrap();
    let big = (max_cost + T::one()) * nf;
    let forbid = big * nf;

    let mut a = vec![vec![forbid; n]; n];
    for r in 0..rows {
        for c in 0..cols {
            if let Some(cost) = costs.get(r, c) {
                a[r][c] = cost;
            }
        }
        a[r][cols + r] = big;
    }
    for c in 0..cols {
        a[rows + c][c] = big;
        for r in 0..rows {
            a[rows + c][cols + r] = T::zero();
        }
    }

    let row_of_col = kuhn_munkres(&a);

    let mut pairs = Vec::new();
    let mut matched_rows = vec![false; rows];
    let mut matched_cols = vec![false; cols];
    for (col, &row) in row_of_col.iter().enumerate() {
        if row < rows && col < cols && costs.get(row, col).is_some() {
            pairs.push((row, col));
            matched_rows[row] = true;
            matched_cols[col] = true;
        }
    }
    pairs.sort_unstable();
    Assignment {
        pairs,
        unmatched_rows: (0..rows).filter(|&r| !matched_rows[r]).collect(),
        unmatched_cols: (0..cols).filter(|&c| !matched_cols[c]).collect(),
    }
}

/// Shortest-augmenting-path assignment on a square matrix. Returns, for
/// each column, the row assigned to it.
fn kuhn_munkres<T: Real>(a: &[Vec<T>]) -> Vec<usize> {
    let n = a.len();
    let inf = T::infinity();
    // 1-indexed potentials and matching, column 0 is the virtual start
    let mut u = vec![T::zero(); n + 1];
    let mut v = vec![T::zero(); n + 1];
    let mut p = vec![0usize; n + 1]; // p[j] = row matched to column j
    let mut way = vec![0usize; n + 1];

    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = a[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] = u[p[j]] + delta;
                    v[j] = v[j] - delta;
                } else {
                    minv[j] = minv[j] - delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        // unwind augmenting path
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    (1..=n).map(|j| p[j] - 1).collect::<Vec<_>>()
}
