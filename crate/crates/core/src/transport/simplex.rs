//! Primal network simplex on the bipartite transportation graph.
//!
//! Bases are spanning trees of `K_{m,n}` stored as `m + n - 1` cells. The
//! entering cell is the first (row-major) cell with negative reduced cost and
//! the leaving cell is the lowest-indexed cell among ratio-test ties, which is
//! Bland's rule and rules out cycling on degenerate instances.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub(crate) struct Solution<S> {
    /// Dense `m x n` flow, row-major.
    pub flow: Vec<S>,
    pub cost: S,
}

struct Tableau<'a, S> {
    m: usize,
    n: usize,
    cost: &'a [Vec<S>],
    flow: Vec<S>,
    basic: Vec<bool>,
}

impl<'a, S: Scalar> Tableau<'a, S> {
    fn idx(&self, i: usize, j: usize) -> usize {
        i * self.n + j
    }

    /// Northwest-corner start: a staircase tree with exactly `m + n - 1` cells.
    fn northwest(supply: &[S], demand: &[S], cost: &'a [Vec<S>]) -> Self {
        let (m, n) = (supply.len(), demand.len());
        let mut t = Tableau {
            m,
            n,
            cost,
            flow: vec![S::zero(); m * n],
            basic: vec![false; m * n],
        };
        let mut rs = supply.to_vec();
        let mut rd = demand.to_vec();
        let (mut i, mut j) = (0, 0);
        loop {
            let q = rs[i].clone().min_of(rd[j].clone()).max_of(S::zero());
            let k = t.idx(i, j);
            t.flow[k] = q.clone();
            t.basic[k] = true;
            rs[i] = rs[i].clone() - q.clone();
            rd[j] = rd[j].clone() - q;
            if i == m - 1 && j == n - 1 {
                break;
            }
            if j == n - 1 || (i < m - 1 && rs[i] <= rd[j]) {
                i += 1;
            } else {
                j += 1;
            }
        }
        t
    }

    /// Tree adjacency over nodes `0..m` (rows) and `m..m+n` (columns).
    fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.m + self.n];
        for i in 0..self.m {
            for j in 0..self.n {
                let k = self.idx(i, j);
                if self.basic[k] {
                    adj[i].push((self.m + j, k));
                    adj[self.m + j].push((i, k));
                }
            }
        }
        adj
    }

    /// Dual potentials with `u_0 = 0` and `u_i + v_j = c_ij` on the tree.
    fn potentials(&self, adj: &[Vec<(usize, usize)>]) -> Vec<Option<S>> {
        let mut pot: Vec<Option<S>> = vec![None; self.m + self.n];
        pot[0] = Some(S::zero());
        let mut queue = VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            let pv = pot[v].clone().expect("visited nodes carry a potential");
            for &(w, k) in &adj[v] {
                if pot[w].is_none() {
                    let c = self.cost[k / self.n][k % self.n].clone();
                    pot[w] = Some(c - pv.clone());
                    queue.push_back(w);
                }
            }
        }
        pot
    }

    /// Tree path from `from` to `to` as a list of cell indices.
    fn path(&self, adj: &[Vec<(usize, usize)>], from: usize, to: usize) -> Vec<usize> {
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; self.m + self.n];
        let mut seen = vec![false; self.m + self.n];
        seen[from] = true;
        let mut queue = VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            if v == to {
                break;
            }
            for &(w, k) in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some((v, k));
                    queue.push_back(w);
                }
            }
        }
        let mut cells = Vec::new();
        let mut v = to;
        while v != from {
            let (p, k) = parent[v].expect("basis is a spanning tree");
            cells.push(k);
            v = p;
        }
        cells.reverse();
        cells
    }

    fn entering(&self, pot: &[Option<S>]) -> Option<usize> {
        (0..self.m * self.n).find(|&k| {
            if self.basic[k] {
                return false;
            }
            let (i, j) = (k / self.n, k % self.n);
            let u = pot[i].clone().unwrap_or_else(S::zero);
            let v = pot[self.m + j].clone().unwrap_or_else(S::zero);
            let reduced = self.cost[i][j].clone() - u - v;
            reduced.lt_strict(&S::zero())
        })
    }

    fn pivot(&mut self, enter: usize) {
        let adj = self.adjacency();
        let (i, j) = (enter / self.n, enter % self.n);
        // entering (i, j) gains flow; the tree path from column j back to
        // row i alternates losing and gaining, starting with a loss
        let path = self.path(&adj, self.m + j, i);
        let losing: Vec<usize> = path.iter().copied().step_by(2).collect();
        let gaining: Vec<usize> = path.iter().copied().skip(1).step_by(2).collect();
        let theta = losing
            .iter()
            .map(|&k| self.flow[k].clone())
            .reduce(S::min_of)
            .expect("cycle has a losing cell");
        let leave = *losing
            .iter()
            .filter(|&&k| self.flow[k].approx_eq(&theta))
            .min()
            .expect("minimum is attained");
        for &k in &losing {
            let v = self.flow[k].clone() - theta.clone();
            self.flow[k] = if v < S::zero() { S::zero() } else { v };
        }
        for &k in &gaining {
            self.flow[k] = self.flow[k].clone() + theta.clone();
        }
        self.flow[enter] = theta;
        self.flow[leave] = S::zero();
        self.basic[leave] = false;
        self.basic[enter] = true;
    }
}

/// Minimizes `sum c_ij x_ij` over nonnegative `x` with row sums `supply` and
/// column sums `demand`. Both marginals must carry equal total mass.
pub(crate) fn solve<S: Scalar>(supply: &[S], demand: &[S], cost: &[Vec<S>]) -> Result<Solution<S>> {
    let (m, n) = (supply.len(), demand.len());
    if m == 0 || n == 0 {
        return Err(Error::InvalidMeasure("empty marginal".into()));
    }
    let mut t = Tableau::northwest(supply, demand, cost);
    let limit = 10_000 + 100 * m * n;
    let mut pivots = 0;
    loop {
        let adj = t.adjacency();
        let pot = t.potentials(&adj);
        match t.entering(&pot) {
            None => break,
            Some(k) => {
                t.pivot(k);
                pivots += 1;
                if pivots > limit {
                    return Err(Error::NoConvergence(limit));
                }
            }
        }
    }
    let total = t
        .flow
        .iter()
        .enumerate()
        .fold(S::zero(), |acc, (k, x)| acc + cost[k / n][k % n].clone() * x.clone());
    Ok(Solution {
        flow: t.flow,
        cost: total,
    })
}
