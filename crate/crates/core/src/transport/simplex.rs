//! Transportation simplex: northwest-corner start, MODI potentials, Bland's
//! rule for entering and leaving cells.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_PIVOTS: usize = 1_000_000;

struct Basis {
    m: usize,
    n: usize,
    cells: Vec<(usize, usize)>,
}

impl Basis {
    fn adjacency(&self) -> Vec<Vec<usize>> {
        // nodes 0..m are rows, m..m+n columns; edges index into `cells`
        let mut adj = vec![Vec::new(); self.m + self.n];
        for (k, &(i, j)) in self.cells.iter().enumerate() {
            adj[i].push(k);
            adj[self.m + j].push(k);
        }
        adj
    }

    fn other(&self, k: usize, node: usize) -> usize {
        let (i, j) = self.cells[k];
        if node == i {
            self.m + j
        } else {
            i
        }
    }

    fn potentials<T: Real>(&self, cost: &[Vec<T>]) -> (Vec<T>, Vec<T>) {
        let adj = self.adjacency();
        let mut pot: Vec<Option<T>> = vec![None; self.m + self.n];
        pot[0] = Some(T::zero());
        let mut queue = VecDeque::from([0usize]);
        while let Some(node) = queue.pop_front() {
            let here = pot[node].unwrap();
            for &k in &adj[node] {
                let next = self.other(k, node);
                if pot[next].is_none() {
                    let (i, j) = self.cells[k];
                    pot[next] = Some(cost[i][j] - here);
                    queue.push_back(next);
                }
            }
        }
        let u = pot[..self.m].iter().map(|p| p.unwrap_or_else(T::zero)).collect();
        let v = pot[self.m..].iter().map(|p| p.unwrap_or_else(T::zero)).collect();
        (u, v)
    }

    /// Basis cells on the tree path from column `j` to row `i`, in order.
    fn path(&self, i: usize, j: usize) -> Option<Vec<usize>> {
        let adj = self.adjacency();
        let (start, goal) = (self.m + j, i);
        let mut via: Vec<Option<usize>> = vec![None; self.m + self.n];
        let mut seen = vec![false; self.m + self.n];
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(node) = queue.pop_front() {
            if node == goal {
                break;
            }
            for &k in &adj[node] {
                let next = self.other(k, node);
                if !seen[next] {
                    seen[next] = true;
                    via[next] = Some(k);
                    queue.push_back(next);
                }
            }
        }
        if !seen[goal] {
            return None;
        }
        let mut out = Vec::new();
        let mut node = goal;
        while node != start {
            let k = via[node]?;
            out.push(k);
            node = self.other(k, node);
        }
        out.reverse();
        Some(out)
    }

    /// Flows on basis cells for the given marginals, by peeling tree leaves.
    fn flows<T: Real>(&self, supply: &[T], demand: &[T]) -> Vec<T> {
        let adj = self.adjacency();
        let mut rest: Vec<T> = supply.iter().chain(demand).copied().collect();
        let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
        let mut used = vec![false; self.cells.len()];
        let mut flow = vec![T::zero(); self.cells.len()];
        let mut leaves: Vec<usize> = (0..degree.len()).filter(|&v| degree[v] == 1).collect();
        while let Some(node) = leaves.pop() {
            if degree[node] != 1 {
                continue;
            }
            let Some(&k) = adj[node].iter().find(|&&k| !used[k]) else { continue };
            used[k] = true;
            let other = self.other(k, node);
            flow[k] = rest[node];
            rest[other] = rest[other] - rest[node];
            rest[node] = T::zero();
            degree[node] -= 1;
            degree[other] -= 1;
            if degree[other] == 1 {
                leaves.push(other);
            }
        }
        flow
    }
}

/// Minimizes `Σ cᵢⱼ xᵢⱼ` over couplings with row sums `supply` and column
/// sums `demand`. Both marginals must be nonnegative with equal totals.
pub fn solve_transportation<T: Real>(cost: &[Vec<T>], supply: &[T], demand: &[T]) -> Result<Vec<Vec<T>>> {
    let (m, n) = (supply.len(), demand.len());
    if m == 0 || n == 0 {
        return Err(Error::EmptyData);
    }
    if cost.len() != m || cost.iter().any(|r| r.len() != n) {
        return Err(Error::SizeMismatch(cost.len(), m));
    }
    if supply.iter().chain(demand).any(|&w| !(w >= T::zero()) || !w.is_finite()) {
        return Err(Error::InvalidWeights(f64::NAN));
    }
    let total_a: T = supply.iter().copied().sum();
    let total_b: T = demand.iter().copied().sum();
    let tol = T::c(1e-9).max(T::epsilon() * T::c(64.0));
    if (total_a - total_b).abs() > tol * total_a.max(T::one()) {
        return Err(Error::InvalidWeights((total_a - total_b).f64()));
    }
    let cmax = cost.iter().flatten().fold(T::zero(), |a, &c| a.max(c.abs()));
    if !cmax.is_finite() {
        return Err(Error::Numerical("non-finite transport cost".into()));
    }

    // Perturbed marginals keep every NW-corner flow strictly positive for
    // generic inputs; flows are recomputed on the final basis with the
    // original marginals.
    let delta = total_a.max(T::min_positive_value()) * T::c(1e-12) / T::from_count(m + n);
    let a: Vec<T> = supply.iter().map(|&w| w + delta).collect();
    let mut b: Vec<T> = demand.to_vec();
    b[n - 1] = b[n - 1] + delta * T::from_count(m) + (total_a - total_b);

    let mut basis = Basis { m, n, cells: Vec::with_capacity(m + n - 1) };
    let mut flow = Vec::with_capacity(m + n - 1);
    {
        let (mut ra, mut rb) = (a.clone(), b.clone());
        let (mut i, mut j) = (0, 0);
        loop {
            let x = ra[i].min(rb[j]);
            basis.cells.push((i, j));
            flow.push(x);
            ra[i] = ra[i] - x;
            rb[j] = rb[j] - x;
            if i == m - 1 && j == n - 1 {
                break;
            }
            if i == m - 1 {
                j += 1;
            } else if j == n - 1 || ra[i] <= rb[j] {
                i += 1;
            } else {
                j += 1;
            }
        }
    }

    let rc_tol = T::epsilon() * T::c(256.0) * (T::one() + cmax);
    let mut in_basis = vec![vec![false; n]; m];
    for &(i, j) in &basis.cells {
        in_basis[i][j] = true;
    }
    let mut pivots = 0;
    loop {
        let (u, v) = basis.potentials(cost);
        let entering = (0..m)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .find(|&(i, j)| !in_basis[i][j] && cost[i][j] - u[i] - v[j] < -rc_tol);
        let Some((ei, ej)) = entering else { break };
        pivots += 1;
        if pivots > MAX_PIVOTS {
            return Err(Error::Numerical("transportation simplex did not converge".into()));
        }
        let path = basis.path(ei, ej).ok_or_else(|| Error::Numerical("basis is not a spanning tree".into()))?;
        // path cells alternate −, +, −, ... starting next to the entering cell
        let mut leave = None::<usize>;
        for &k in path.iter().step_by(2) {
            leave = match leave {
                None => Some(k),
                Some(l) if flow[k] < flow[l] || (flow[k] == flow[l] && basis.cells[k] < basis.cells[l]) => Some(k),
                keep => keep,
            };
        }
        let leave = leave.ok_or_else(|| Error::Numerical("degenerate cycle".into()))?;
        let theta = flow[leave];
        for (s, &k) in path.iter().enumerate() {
            flow[k] = if s % 2 == 0 { flow[k] - theta } else { flow[k] + theta };
        }
        let (li, lj) = basis.cells[leave];
        in_basis[li][lj] = false;
        in_basis[ei][ej] = true;
        basis.cells[leave] = (ei, ej);
        flow[leave] = theta;
    }

    let exact = basis.flows(supply, demand);
    let mut plan = vec![vec![T::zero(); n]; m];
    for (&(i, j), &x) in basis.cells.iter().zip(&exact) {
        plan[i][j] = x.max(T::zero());
    }
    Ok(plan)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn objective(cost: &[Vec<f64>], plan: &[Vec<f64>]) -> f64 {
        cost.iter().zip(plan).map(|(c, x)| c.iter().zip(x).map(|(a, b)| a * b).sum::<f64>()).sum()
    }

    #[test]
    fn textbook_instance() {
        // classic 3x4 instance with optimum 743
        let cost = vec![vec![3.0, 1.0, 7.0, 4.0], vec![2.0, 6.0, 5.0, 9.0], vec![8.0, 3.0, 3.0, 2.0]];
        let supply = [300.0, 400.0, 500.0];
        let demand = [250.0, 350.0, 400.0, 200.0];
        let plan = solve_transportation(&cost, &supply, &demand).unwrap();
        assert!((objective(&cost, &plan) - 2850.0).abs() < 1e-6, "{}", objective(&cost, &plan));
    }

    #[test]
    fn degenerate_marginals() {
        let cost = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        let plan = solve_transportation(&cost, &[0.5, 0.5], &[0.5, 0.5]).unwrap();
        assert_eq!(plan, vec![vec![0.5, 0.0], vec![0.0, 0.5]]);
        let plan = solve_transportation(&cost, &[1.0, 0.0], &[0.0, 1.0]).unwrap();
        assert_eq!(plan, vec![vec![0.0, 1.0], vec![0.0, 0.0]]);
    }

    #[test]
    fn rejects_bad_marginals() {
        let cost = vec![vec![0.0]];
        assert!(solve_transportation(&cost, &[1.0], &[0.5]).is_err());
        assert!(solve_transportation(&cost, &[-1.0], &[-1.0]).is_err());
    }
}
