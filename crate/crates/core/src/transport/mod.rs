//! Exact p-Wasserstein distances between finitely supported measures with
//! cost `d_m^p`, transport plans, gluing, and a vertex-enumeration oracle.

mod oracle;
mod simplex;

pub use oracle::{brute_force_wasserstein, is_unique_optimal_plan, OracleResult, ORACLE_MAX_CELLS};

use crate::error::{Error, Result};
use crate::geometry::dm;
use crate::measure::DiscreteMeasure;
use crate::scalar::{Exponent, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct PlanEntry<S> {
    /// Index into the source atoms.
    pub i: usize,
    /// Index into the target atoms.
    pub j: usize,
    pub weight: S,
}

/// A coupling of two discrete measures, stored sparsely. Zero entries are
/// pruned.
#[derive(Clone, Debug, PartialEq)]
pub struct TransportPlan<S> {
    source: DiscreteMeasure<S>,
    target: DiscreteMeasure<S>,
    entries: Vec<PlanEntry<S>>,
}

impl<S: Scalar> TransportPlan<S> {
    /// Validates nonnegativity and both marginals.
    pub fn new(
        source: DiscreteMeasure<S>,
        target: DiscreteMeasure<S>,
        entries: Vec<PlanEntry<S>>,
    ) -> Result<Self> {
        let mut rows = vec![S::zero(); source.len()];
        let mut cols = vec![S::zero(); target.len()];
        for e in &entries {
            if e.i >= source.len() || e.j >= target.len() {
                return Err(Error::MarginalMismatch(format!(
                    "entry ({}, {}) out of range",
                    e.i, e.j
                )));
            }
            if e.weight.lt_strict(&S::zero()) {
                return Err(Error::MarginalMismatch(format!(
                    "negative entry {} at ({}, {})",
                    e.weight, e.i, e.j
                )));
            }
            rows[e.i] = rows[e.i].clone() + e.weight.clone();
            cols[e.j] = cols[e.j].clone() + e.weight.clone();
        }
        for (k, (r, w)) in rows.iter().zip(source.weights()).enumerate() {
            if !r.approx_eq(w) {
                return Err(Error::MarginalMismatch(format!(
                    "row {k} sums to {r}, expected {w}"
                )));
            }
        }
        for (k, (c, w)) in cols.iter().zip(target.weights()).enumerate() {
            if !c.approx_eq(w) {
                return Err(Error::MarginalMismatch(format!(
                    "column {k} sums to {c}, expected {w}"
                )));
            }
        }
        Ok(Self::from_parts(source, target, entries))
    }

    fn from_parts(
        source: DiscreteMeasure<S>,
        target: DiscreteMeasure<S>,
        mut entries: Vec<PlanEntry<S>>,
    ) -> Self {
        entries.retain(|e| e.weight != S::zero());
        entries.sort_by_key(|e| (e.i, e.j));
        TransportPlan {
            source,
            target,
            entries,
        }
    }

    fn from_dense(source: &DiscreteMeasure<S>, target: &DiscreteMeasure<S>, flow: &[S]) -> Self {
        let n = target.len();
        let entries = flow
            .iter()
            .enumerate()
            .map(|(k, w)| PlanEntry {
                i: k / n,
                j: k % n,
                weight: w.clone(),
            })
            .collect();
        Self::from_parts(source.clone(), target.clone(), entries)
    }

    /// `mu ⊗ nu`.
    pub fn product(source: &DiscreteMeasure<S>, target: &DiscreteMeasure<S>) -> Self {
        let mut entries = Vec::with_capacity(source.len() * target.len());
        for (i, a) in source.atoms().iter().enumerate() {
            for (j, b) in target.atoms().iter().enumerate() {
                entries.push(PlanEntry {
                    i,
                    j,
                    weight: a.weight.clone() * b.weight.clone(),
                });
            }
        }
        Self::from_parts(source.clone(), target.clone(), entries)
    }

    /// The coupling `(id, id)# mu`.
    pub fn identity(mu: &DiscreteMeasure<S>) -> Self {
        let entries = mu
            .atoms()
            .iter()
            .enumerate()
            .map(|(i, a)| PlanEntry {
                i,
                j: i,
                weight: a.weight.clone(),
            })
            .collect();
        Self::from_parts(mu.clone(), mu.clone(), entries)
    }

    pub fn source(&self) -> &DiscreteMeasure<S> {
        &self.source
    }

    pub fn target(&self) -> &DiscreteMeasure<S> {
        &self.target
    }

    pub fn entries(&self) -> &[PlanEntry<S>] {
        &self.entries
    }

    /// Dense row-major weights.
    pub fn dense(&self) -> Vec<S> {
        let n = self.target.len();
        let mut out = vec![S::zero(); self.source.len() * n];
        for e in &self.entries {
            out[e.i * n + e.j] = e.weight.clone();
        }
        out
    }

    pub fn approx_eq(&self, other: &Self) -> bool {
        self.source.approx_eq(&other.source)
            && self.target.approx_eq(&other.target)
            && self
                .dense()
                .iter()
                .zip(other.dense())
                .all(|(a, b)| a.approx_eq(&b))
    }

    /// `sum d_m(x, y)^p π(x, y)`.
    pub fn cost_pow(&self, p: Exponent) -> Result<S> {
        let xs = self.source.atoms();
        let ys = self.target.atoms();
        self.entries.iter().try_fold(S::zero(), |acc, e| {
            Ok(acc + dm(&xs[e.i].point, &ys[e.j].point).pow_exp(p)? * e.weight.clone())
        })
    }

    /// CSV rows `i,j,x_i,y_j,weight,cost` where points are written as
    /// `x1 x2` and `cost` is the unit cost `d_m(x_i, y_j)^p`.
    pub fn to_csv(&self, p: Exponent) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Parse(e.to_string());
        w.write_record(["i", "j", "x_i", "y_j", "weight", "cost"])
            .map_err(io)?;
        let xs = self.source.atoms();
        let ys = self.target.atoms();
        for e in &self.entries {
            let x = &xs[e.i].point;
            let y = &ys[e.j].point;
            let c = dm(x, y).pow_exp(p)?;
            w.write_record([
                e.i.to_string(),
                e.j.to_string(),
                format!("{} {}", x.x1.to_text(), x.x2.to_text()),
                format!("{} {}", y.x1.to_text(), y.x2.to_text()),
                e.weight.to_text(),
                c.to_text(),
            ])
            .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// `(sum d_m^p π)^{1/p}` of a plan, in floating point.
pub fn plan_cost<S: Scalar>(plan: &TransportPlan<S>, p: Exponent) -> Result<f64> {
    Ok(root(plan.cost_pow(p)?.to_f64(), p))
}

fn root(x: f64, p: Exponent) -> f64 {
    match p.as_integer() {
        Some(1) => x,
        Some(2) => x.max(0.0).sqrt(),
        _ => x.max(0.0).powf(1.0 / p.value()),
    }
}

/// An optimal coupling with its cost.
#[derive(Clone, Debug)]
pub struct Transport<S> {
    pub p: Exponent,
    /// `d_{W_p}^p`, exact in rational mode.
    pub cost: S,
    pub plan: TransportPlan<S>,
}

impl<S: Scalar> Transport<S> {
    /// `d_{W_p}` as a float.
    pub fn distance(&self) -> f64 {
        root(self.cost.to_f64(), self.p)
    }
}

/// `d_m^p` between every source and target atom.
pub fn cost_matrix<S: Scalar>(
    mu: &DiscreteMeasure<S>,
    nu: &DiscreteMeasure<S>,
    p: Exponent,
) -> Result<Vec<Vec<S>>> {
    mu.points()
        .map(|x| nu.points().map(|y| dm(x, y).pow_exp(p)).collect())
        .collect()
}

/// Exact optimal transport by network simplex.
pub fn wasserstein<S: Scalar>(
    mu: &DiscreteMeasure<S>,
    nu: &DiscreteMeasure<S>,
    p: Exponent,
) -> Result<Transport<S>> {
    let cost = cost_matrix(mu, nu, p)?;
    let supply: Vec<S> = mu.weights().cloned().collect();
    let demand: Vec<S> = nu.weights().cloned().collect();
    let sol = simplex::solve(&supply, &demand, &cost)?;
    Ok(Transport {
        p,
        cost: sol.cost,
        plan: TransportPlan::from_dense(mu, nu, &sol.flow),
    })
}

/// `d_{W_p}^p(mu, nu)`.
pub fn wasserstein_pow<S: Scalar>(
    mu: &DiscreteMeasure<S>,
    nu: &DiscreteMeasure<S>,
    p: Exponent,
) -> Result<S> {
    if mu.is_dirac() {
        return nu.cost_to_point(&mu.atoms()[0].point, p);
    }
    if nu.is_dirac() {
        return mu.cost_to_point(&nu.atoms()[0].point, p);
    }
    Ok(wasserstein(mu, nu, p)?.cost)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GluedEntry<S> {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub weight: S,
}

/// A coupling of three measures whose 12- and 23-marginals are prescribed.
#[derive(Clone, Debug)]
pub struct GluedPlan<S> {
    pub first: DiscreteMeasure<S>,
    pub middle: DiscreteMeasure<S>,
    pub last: DiscreteMeasure<S>,
    pub entries: Vec<GluedEntry<S>>,
}

impl<S: Scalar> GluedPlan<S> {
    fn pair_marginal(
        &self,
        source: &DiscreteMeasure<S>,
        target: &DiscreteMeasure<S>,
        key: impl Fn(&GluedEntry<S>) -> (usize, usize),
    ) -> Result<TransportPlan<S>> {
        let n = target.len();
        let mut dense = vec![S::zero(); source.len() * n];
        for e in &self.entries {
            let (a, b) = key(e);
            dense[a * n + b] = dense[a * n + b].clone() + e.weight.clone();
        }
        let plan = TransportPlan::from_dense(source, target, &dense);
        TransportPlan::new(plan.source, plan.target, plan.entries)
    }

    pub fn marginal_12(&self) -> Result<TransportPlan<S>> {
        self.pair_marginal(&self.first, &self.middle, |e| (e.i, e.j))
    }

    pub fn marginal_23(&self) -> Result<TransportPlan<S>> {
        self.pair_marginal(&self.middle, &self.last, |e| (e.j, e.k))
    }

    pub fn marginal_13(&self) -> Result<TransportPlan<S>> {
        self.pair_marginal(&self.first, &self.last, |e| (e.i, e.k))
    }
}

/// Discrete gluing: `π(x, y, z) = π12(x, y) π23(y, z) / ν(y)`.
pub fn glue<S: Scalar>(p12: &TransportPlan<S>, p23: &TransportPlan<S>) -> Result<GluedPlan<S>> {
    if !p12.target.approx_eq(&p23.source) {
        return Err(Error::MarginalMismatch(
            "target of the first plan differs from the source of the second".into(),
        ));
    }
    let middle = &p12.target;
    let mut entries = Vec::new();
    for a in &p12.entries {
        let mass = &middle.atoms()[a.j].weight;
        for b in p23.entries.iter().filter(|b| b.i == a.j) {
            entries.push(GluedEntry {
                i: a.i,
                j: a.j,
                k: b.j,
                weight: a.weight.clone() * b.weight.clone() / mass.clone(),
            });
        }
    }
    Ok(GluedPlan {
        first: p12.source.clone(),
        middle: middle.clone(),
        last: p23.target.clone(),
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point2;
    use crate::measure::{kloeckner_measure, KloecknerParam};
    use crate::scalar::{q, Rational};

    fn pi(a: i64, b: i64) -> Point2<Rational> {
        Point2::from_i64(a, b)
    }

    fn two() -> Exponent {
        Exponent::int(2)
    }

    #[test]
    fn dirac_to_kloeckner_values() {
        let k = KloecknerParam::new(q(0, 1), q(1, 1), q(2, 1)).unwrap();
        let t = wasserstein(&DiscreteMeasure::dirac(pi(2, 0)), &kloeckner_measure(&k), two()).unwrap();
        assert_eq!(t.cost, q(5, 1));
        assert!((t.distance() - 5f64.sqrt()).abs() < 1e-12);

        let k = KloecknerParam::new(q(0, 1), q(1, 1), q(1, 1)).unwrap();
        let t = wasserstein(&DiscreteMeasure::dirac(pi(-1, 0)), &kloeckner_measure(&k), two()).unwrap();
        assert_eq!(t.cost, q(5, 2));
    }

    #[test]
    fn dirac_pairs_give_point_distance() {
        for p in 1..=3 {
            let t = wasserstein(
                &DiscreteMeasure::dirac(pi(1, 7)),
                &DiscreteMeasure::dirac(pi(-2, 5)),
                Exponent::int(p),
            )
            .unwrap();
            assert!((t.distance() - 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_mode_rejects_fractional_p() {
        let mu = DiscreteMeasure::dirac(pi(0, 0));
        let err = wasserstein(&mu, &mu, Exponent::new(1.5).unwrap()).unwrap_err();
        assert!(matches!(err, Error::ExactNeedsIntegerExponent(_)));
        // float mode accepts it
        let mu = DiscreteMeasure::dirac(Point2::new(0.0, 0.0));
        let nu = DiscreteMeasure::dirac(Point2::new(2.0, 1.0));
        let t = wasserstein(&mu, &nu, Exponent::new(1.5).unwrap()).unwrap();
        assert!((t.distance() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn plan_marginals_and_cost() {
        let mu = DiscreteMeasure::from_pairs(vec![(pi(0, 0), q(1, 2)), (pi(2, 0), q(1, 2))]).unwrap();
        let nu = DiscreteMeasure::from_pairs(vec![(pi(1, 1), q(1, 4)), (pi(1, -1), q(3, 4))]).unwrap();
        let t = wasserstein(&mu, &nu, Exponent::int(1)).unwrap();
        assert!(TransportPlan::new(mu.clone(), nu.clone(), t.plan.entries().to_vec()).is_ok());
        assert_eq!(t.cost, q(1, 1));
        assert_eq!(plan_cost(&TransportPlan::identity(&mu), two()).unwrap(), 0.0);
        let prod = TransportPlan::product(&mu, &nu);
        assert!(prod.cost_pow(Exponent::int(1)).unwrap() >= t.cost);
        let bad = vec![PlanEntry { i: 0, j: 0, weight: q(1, 1) }];
        assert!(matches!(
            TransportPlan::new(mu.clone(), nu.clone(), bad),
            Err(Error::MarginalMismatch(_))
        ));
    }

    #[test]
    fn dirac_product_plan_matches_integral() {
        let x = pi(0, 0);
        let nu = DiscreteMeasure::from_pairs(vec![(pi(1, 3), q(1, 3)), (pi(-2, 1), q(2, 3))]).unwrap();
        let prod = TransportPlan::product(&DiscreteMeasure::dirac(x.clone()), &nu);
        let direct = nu.cost_to_point(&x, two()).unwrap();
        assert_eq!(prod.cost_pow(two()).unwrap(), direct);
        assert_eq!(wasserstein(&DiscreteMeasure::dirac(x), &nu, two()).unwrap().cost, direct);
    }

    #[test]
    fn gluing_examples() {
        let mu = DiscreteMeasure::from_pairs(vec![(pi(0, 0), q(1, 3)), (pi(2, 1), q(2, 3))]).unwrap();
        let nu = DiscreteMeasure::from_pairs(vec![(pi(1, 1), q(1, 2)), (pi(5, 0), q(1, 2))]).unwrap();
        let xi = DiscreteMeasure::from_pairs(vec![(pi(3, 3), q(1, 4)), (pi(0, 4), q(3, 4))]).unwrap();
        let pi12 = wasserstein(&mu, &nu, two()).unwrap().plan;
        let g = glue(&pi12, &TransportPlan::identity(&nu)).unwrap();
        assert!(g.marginal_13().unwrap().approx_eq(&pi12));

        let g = glue(&TransportPlan::product(&mu, &nu), &TransportPlan::product(&nu, &xi)).unwrap();
        assert!(g.marginal_13().unwrap().approx_eq(&TransportPlan::product(&mu, &xi)));
        assert!(g.marginal_12().unwrap().approx_eq(&TransportPlan::product(&mu, &nu)));

        assert!(glue(&pi12, &TransportPlan::identity(&mu)).is_err());
    }

    #[test]
    fn csv_export() {
        let mu = DiscreteMeasure::dirac(pi(2, 0));
        let k = KloecknerParam::new(q(0, 1), q(1, 1), q(2, 1)).unwrap();
        let t = wasserstein(&mu, &kloeckner_measure(&k), two()).unwrap();
        let csv = t.plan.to_csv(two()).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "i,j,x_i,y_j,weight,cost");
        assert_eq!(lines[1], "0,0,2 0,-2 -2,1/5,16");
        assert_eq!(lines[2], "0,1,2 0,1/2 1/2,4/5,9/4");
    }
}
