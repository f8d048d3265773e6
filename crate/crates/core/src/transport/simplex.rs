//! Transportation simplex for the balanced classical transport problem
//!
//! ```text
//! min Σ c(i,j) x(i,j)   s.t.  Σ_j x(i,j) = supply(i),  Σ_i x(i,j) = demand(j),  x ≥ 0.
//! ```
//!
//! Northwest-corner start, dual potentials on the basis tree, most negative
//! reduced cost enters.

use std::collections::VecDeque;

#[derive(Debug, Clone, PartialEq)]
pub struct Plan {
    pub flow: Vec<Vec<f64>>,
    pub objective: f64,
    pub pivots: usize,
    /// `false` if the pivot cap was reached before optimality.
    pub optimal: bool,
}

/// Solve with `demand` rescaled to the total supply.
pub fn solve(supply: &[f64], demand: &[f64], cost: &[Vec<f64>]) -> Plan {
    let m = supply.len();
    let n = demand.len();
    assert!(m > 0 && n > 0, "empty transport problem");
    let ts: f64 = supply.iter().sum();
    let td: f64 = demand.iter().sum();
    let demand: Vec<f64> = demand.iter().map(|d| d * ts / td).collect();

    let mut x = vec![vec![0.0; n]; m];
    let mut basic = vec![vec![false; n]; m];
    {
        let mut a = supply.to_vec();
        let mut b = demand.clone();
        let (mut i, mut j) = (0, 0);
        loop {
            let q = a[i].min(b[j]).max(0.0);
            x[i][j] = q;
            basic[i][j] = true;
            a[i] -= q;
            b[j] -= q;
            if i == m - 1 && j == n - 1 {
                break;
            }
            if i == m - 1 {
                j += 1;
            } else if j == n - 1 || a[i] <= b[j] {
                i += 1;
            } else {
                j += 1;
            }
        }
    }

    let scale = cost.iter().flatten().fold(0.0f64, |s, c| s.max(c.abs())).max(1.0);
    let eps = 1e-12 * scale;
    let max_pivots = 50 * (m + n) * (m + n) + 100;
    let mut pivots = 0;
    let mut optimal = false;
    while pivots < max_pivots {
        let adj = adjacency(&basic, m, n);
        let (u, v) = potentials(&adj, cost, m, n);
        let mut enter = None;
        let mut best = -eps;
        for i in 0..m {
            for j in 0..n {
                if !basic[i][j] {
                    let r = cost[i][j] - u[i] - v[j];
                    if r < best {
                        best = r;
                        enter = Some((i, j));
                    }
                }
            }
        }
        let Some((ei, ej)) = enter else {
            optimal = true;
            break;
        };
        // tree path from column ej to row ei, as a list of cells
        let path = tree_path(&adj, m + ej, ei, m);
        let mut theta = f64::INFINITY;
        let mut leave = None;
        for (k, &(i, j)) in path.iter().enumerate() {
            if k % 2 == 0 && x[i][j] < theta {
                theta = x[i][j];
                leave = Some((i, j));
            }
        }
        let (li, lj) = leave.expect("cycle has a decreasing cell");
        x[ei][ej] += theta;
        for (k, &(i, j)) in path.iter().enumerate() {
            if k % 2 == 0 {
                x[i][j] -= theta;
            } else {
                x[i][j] += theta;
            }
        }
        x[li][lj] = 0.0;
        basic[li][lj] = false;
        basic[ei][ej] = true;
        pivots += 1;
    }
    for row in x.iter_mut() {
        for v in row.iter_mut() {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
    }
    let objective = x
        .iter()
        .zip(cost)
        .map(|(xr, cr)| xr.iter().zip(cr).map(|(a, b)| a * b).sum::<f64>())
        .sum();
    Plan {
        flow: x,
        objective,
        pivots,
        optimal,
    }
}

/// Nodes `0..m` are rows, `m..m+n` columns.
fn adjacency(basic: &[Vec<bool>], m: usize, n: usize) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); m + n];
    for i in 0..m {
        for j in 0..n {
            if basic[i][j] {
                adj[i].push(m + j);
                adj[m + j].push(i);
            }
        }
    }
    adj
}

fn potentials(adj: &[Vec<usize>], cost: &[Vec<f64>], m: usize, n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut pot = vec![f64::NAN; m + n];
    let mut queue = VecDeque::new();
    for root in 0..m + n {
        if !pot[root].is_nan() {
            continue;
        }
        pot[root] = 0.0;
        queue.push_back(root);
        while let Some(a) = queue.pop_front() {
            for &b in &adj[a] {
                if pot[b].is_nan() {
                    // u_i + v_j = c(i,j) on basic cells
                    let c = if a < m { cost[a][b - m] } else { cost[b][a - m] };
                    pot[b] = c - pot[a];
                    queue.push_back(b);
                }
            }
        }
    }
    let v = pot.split_off(m);
    debug_assert_eq!(v.len(), n);
    (pot, v)
}

/// Cells along the tree path from `start` (a column node) to row `goal`.
fn tree_path(adj: &[Vec<usize>], start: usize, goal: usize, m: usize) -> Vec<(usize, usize)> {
    let mut parent = vec![usize::MAX; adj.len()];
    parent[start] = start;
    let mut queue = VecDeque::from([start]);
    while let Some(a) = queue.pop_front() {
        if a == goal {
            break;
        }
        for &b in &adj[a] {
            if parent[b] == usize::MAX {
                parent[b] = a;
                queue.push_back(b);
            }
        }
    }
    let mut nodes = vec![goal];
    let mut c = goal;
    while c != start {
        c = parent[c];
        nodes.push(c);
    }
    nodes.reverse();
    nodes
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            if a < m {
                (a, b - m)
            } else {
                (b, a - m)
            }
        })
        .collect()
}
