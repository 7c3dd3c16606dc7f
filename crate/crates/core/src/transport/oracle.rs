//! Vertex enumeration of the transportation polytope.
//!
//! Every vertex is a basic feasible solution whose support is a spanning
//! forest of `K_{m,n}`; padding the support to a spanning tree gives a basis.
//! The oracle enumerates every spanning tree, solves its flow by peeling
//! leaves, keeps the nonnegative ones and returns the minimum together with
//! every distinct minimizing vertex. It shares no code with the simplex.

use crate::error::{Error, Result};
use crate::measure::DiscreteMeasure;
use crate::scalar::{Exponent, Scalar};

use super::{cost_matrix, TransportPlan};

/// Largest `|supp mu| * |supp nu|` accepted by the oracle.
pub const ORACLE_MAX_CELLS: usize = 36;

#[derive(Clone, Debug)]
pub struct OracleResult<S> {
    /// `d_{W_p}^p`.
    pub cost: S,
    /// Every distinct optimal vertex.
    pub optimal_plans: Vec<TransportPlan<S>>,
    /// Feasible bases visited (with multiplicity under degeneracy).
    pub feasible_bases: usize,
}

/// Solves the flow on a spanning tree by repeatedly peeling leaf nodes.
/// Nodes `0..m` are rows, `m..m+n` are columns.
fn peel<T: Scalar>(m: usize, n: usize, edges: &[(usize, usize)], supply: &[T], demand: &[T]) -> Vec<T> {
    let nodes = m + n;
    let mut remaining: Vec<T> = supply.iter().chain(demand).cloned().collect();
    let mut degree = vec![0usize; nodes];
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); nodes];
    for (e, &(i, j)) in edges.iter().enumerate() {
        degree[i] += 1;
        degree[m + j] += 1;
        incident[i].push(e);
        incident[m + j].push(e);
    }
    let mut done = vec![false; edges.len()];
    let mut value = vec![T::zero(); edges.len()];
    let mut stack: Vec<usize> = (0..nodes).filter(|&v| degree[v] == 1).collect();
    while let Some(v) = stack.pop() {
        if degree[v] != 1 {
            continue;
        }
        let e = *incident[v]
            .iter()
            .find(|&&e| !done[e])
            .expect("leaf has one live edge");
        let (i, j) = edges[e];
        let other = if v == i { m + j } else { i };
        let amount = remaining[v].clone();
        value[e] = amount.clone();
        remaining[v] = T::zero();
        remaining[other] = remaining[other].clone() - amount;
        done[e] = true;
        degree[v] -= 1;
        degree[other] -= 1;
        if degree[other] == 1 {
            stack.push(other);
        }
    }
    value
}

struct TreeSearch<'a, F: FnMut(&[(usize, usize)])> {
    m: usize,
    n: usize,
    need: usize,
    chosen: Vec<(usize, usize)>,
    row_deg: Vec<usize>,
    visit: &'a mut F,
}

fn find(parent: &mut [usize], mut v: usize) -> usize {
    while parent[v] != v {
        parent[v] = parent[parent[v]];
        v = parent[v];
    }
    v
}

impl<F: FnMut(&[(usize, usize)])> TreeSearch<'_, F> {
    fn run(&mut self, cell: usize, parent: &[usize]) {
        let total = self.m * self.n;
        if self.chosen.len() == self.need {
            (self.visit)(&self.chosen);
            return;
        }
        if cell == total || total - cell < self.need - self.chosen.len() {
            return;
        }
        let (i, j) = (cell / self.n, cell % self.n);
        let row_closes = j == self.n - 1;

        // include the cell when it joins two components
        let mut uf = parent.to_vec();
        let (a, b) = (find(&mut uf, i), find(&mut uf, self.m + j));
        if a != b {
            uf[a] = b;
            self.chosen.push((i, j));
            self.row_deg[i] += 1;
            self.run(cell + 1, &uf);
            self.row_deg[i] -= 1;
            self.chosen.pop();
        }
        // exclude it; a row left without edges can never be spanned
        if !(row_closes && self.row_deg[i] == 0) {
            self.run(cell + 1, parent);
        }
    }
}

fn for_each_spanning_tree(m: usize, n: usize, mut visit: impl FnMut(&[(usize, usize)])) {
    let parent: Vec<usize> = (0..m + n).collect();
    let mut search = TreeSearch {
        m,
        n,
        need: m + n - 1,
        chosen: Vec::with_capacity(m + n - 1),
        row_deg: vec![0; m],
        visit: &mut visit,
    };
    search.run(0, &parent);
}

/// Exact minimum over all vertices of the transportation polytope, with the
/// full set of minimizing vertices.
pub fn brute_force_wasserstein<S: Scalar>(
    mu: &DiscreteMeasure<S>,
    nu: &DiscreteMeasure<S>,
    p: Exponent,
) -> Result<OracleResult<S>> {
    let (m, n) = (mu.len(), nu.len());
    if m * n > ORACLE_MAX_CELLS {
        return Err(Error::InstanceTooLarge {
            rows: m,
            cols: n,
            limit: ORACLE_MAX_CELLS,
        });
    }
    let cost = cost_matrix(mu, nu, p)?;
    let supply: Vec<S> = mu.weights().cloned().collect();
    let demand: Vec<S> = nu.weights().cloned().collect();
    let supply_f: Vec<f64> = supply.iter().map(Scalar::to_f64).collect();
    let demand_f: Vec<f64> = demand.iter().map(Scalar::to_f64).collect();

    let mut best: Option<S> = None;
    let mut optimal: Vec<Vec<S>> = Vec::new();
    let mut feasible = 0usize;

    for_each_spanning_tree(m, n, |edges| {
        // cheap float screen; exact values decide membership
        let approx = peel(m, n, edges, &supply_f, &demand_f);
        if approx.iter().any(|&v| v < -1e-9) {
            return;
        }
        let values = peel(m, n, edges, &supply, &demand);
        if values.iter().any(|v| v.lt_strict(&S::zero())) {
            return;
        }
        feasible += 1;
        let mut dense = vec![S::zero(); m * n];
        let mut total = S::zero();
        for (&(i, j), v) in edges.iter().zip(values) {
            let v = if v < S::zero() { S::zero() } else { v };
            total = total + cost[i][j].clone() * v.clone();
            dense[i * n + j] = v;
        }
        match &best {
            Some(b) if total.lt_strict(b) => {
                best = Some(total);
                optimal = vec![dense];
            }
            Some(b) if total.approx_eq(b) => {
                let seen = optimal
                    .iter()
                    .any(|o| o.iter().zip(&dense).all(|(a, b)| a.approx_eq(b)));
                if !seen {
                    optimal.push(dense);
                }
            }
            Some(_) => {}
            None => {
                best = Some(total);
                optimal = vec![dense];
            }
        }
    });

    let cost = best.ok_or_else(|| Error::InvalidMeasure("transportation polytope is empty".into()))?;
    let optimal_plans = optimal
        .iter()
        .map(|d| TransportPlan::from_dense(mu, nu, d))
        .collect();
    Ok(OracleResult {
        cost,
        optimal_plans,
        feasible_bases: feasible,
    })
}

/// True iff the optimal face of the transportation polytope is a single
/// vertex. Disabled for non-integer exponents.
pub fn is_unique_optimal_plan<S: Scalar>(
    mu: &DiscreteMeasure<S>,
    nu: &DiscreteMeasure<S>,
    p: Exponent,
) -> Result<bool> {
    if p.as_integer().is_none() {
        return Err(Error::Precondition(
            "uniqueness detection needs an integer exponent".into(),
        ));
    }
    Ok(brute_force_wasserstein(mu, nu, p)?.optimal_plans.len() == 1)
}
