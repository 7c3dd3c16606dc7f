//! Finitely supported probability measures and the two-atom family on `L+`.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{dm, project_point, DiagonalLine, Point2};
use crate::scalar::{scalar_from_json, Scalar, FLOAT_MASS_TOL};

#[derive(Clone, Debug, PartialEq)]
pub struct Atom<S> {
    pub point: Point2<S>,
    pub weight: S,
}

impl<S: Scalar> Atom<S> {
    pub fn new(point: Point2<S>, weight: S) -> Self {
        Atom { point, weight }
    }
}

/// A probability measure with finitely many atoms.
///
/// Atoms are kept in canonical form: sorted lexicographically by coordinates,
/// duplicates merged, weights strictly positive and summing to one (exactly in
/// rational mode, within `1e-12` in float mode).
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteMeasure<S> {
    atoms: Vec<Atom<S>>,
}

fn cmp_points<S: Scalar>(a: &Point2<S>, b: &Point2<S>) -> Ordering {
    a.partial_cmp(b).unwrap_or(Ordering::Equal)
}

fn same_point<S: Scalar>(a: &Point2<S>, b: &Point2<S>) -> bool {
    if S::EXACT {
        a == b
    } else {
        dm(a, b).to_f64() <= FLOAT_MASS_TOL
    }
}

/// Sorts and merges coincident atoms; drops zero weights.
fn canonicalize<S: Scalar>(mut atoms: Vec<Atom<S>>) -> Vec<Atom<S>> {
    atoms.sort_by(|a, b| cmp_points(&a.point, &b.point));
    let mut out: Vec<Atom<S>> = Vec::with_capacity(atoms.len());
    for atom in atoms {
        // float merging may pair atoms that are not adjacent in sort order
        let hit = if S::EXACT {
            out.last_mut().filter(|last| last.point == atom.point)
        } else {
            out.iter_mut().find(|o| same_point(&o.point, &atom.point))
        };
        match hit {
            Some(existing) => existing.weight = existing.weight.clone() + atom.weight,
            None => out.push(atom),
        }
    }
    out.retain(|a| a.weight != S::zero());
    out
}

impl<S: Scalar> DiscreteMeasure<S> {
    /// Builds a probability measure, validating positivity and total mass.
    pub fn new(atoms: Vec<Atom<S>>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidMeasure("no atoms".into()));
        }
        if let Some(bad) = atoms.iter().find(|a| a.weight <= S::zero()) {
            return Err(Error::InvalidMeasure(format!(
                "weight {} is not positive",
                bad.weight
            )));
        }
        let atoms = canonicalize(atoms);
        let total = atoms
            .iter()
            .fold(S::zero(), |acc, a| acc + a.weight.clone());
        let ok = if S::EXACT {
            total == S::one()
        } else {
            (total.to_f64() - 1.0).abs() <= FLOAT_MASS_TOL
        };
        if !ok {
            return Err(Error::InvalidMeasure(format!("total mass {total} != 1")));
        }
        Ok(DiscreteMeasure { atoms })
    }

    pub fn from_pairs(pairs: Vec<(Point2<S>, S)>) -> Result<Self> {
        Self::new(pairs.into_iter().map(|(p, w)| Atom::new(p, w)).collect())
    }

    pub fn dirac(x: Point2<S>) -> Self {
        DiscreteMeasure {
            atoms: vec![Atom::new(x, S::one())],
        }
    }

    /// Equal weights on the given points (coincident points merge).
    pub fn uniform(points: Vec<Point2<S>>) -> Result<Self> {
        let n = points.len() as i64;
        if n == 0 {
            return Err(Error::InvalidMeasure("no atoms".into()));
        }
        Self::new(
            points
                .into_iter()
                .map(|p| Atom::new(p, S::from_ratio(1, n)))
                .collect(),
        )
    }

    pub fn atoms(&self) -> &[Atom<S>] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = &Point2<S>> {
        self.atoms.iter().map(|a| &a.point)
    }

    pub fn weights(&self) -> impl Iterator<Item = &S> {
        self.atoms.iter().map(|a| &a.weight)
    }

    pub fn is_dirac(&self) -> bool {
        self.atoms.len() == 1
    }

    pub fn mass(&self) -> S {
        self.weights().fold(S::zero(), |acc, w| acc + w.clone())
    }

    /// Weight at `x`, zero off the support.
    pub fn weight_at(&self, x: &Point2<S>) -> S {
        self.atoms
            .iter()
            .find(|a| same_point(&a.point, x))
            .map(|a| a.weight.clone())
            .unwrap_or_else(S::zero)
    }

    pub fn supported_on(&self, line: &DiagonalLine<S>) -> bool {
        self.points().all(|p| line.contains(p))
    }

    pub fn supported_in_square(&self) -> bool {
        self.points().all(Point2::in_square)
    }

    /// Equality of atoms up to the scalar tolerance.
    pub fn approx_eq(&self, other: &Self) -> bool {
        self.atoms.len() == other.atoms.len()
            && self
                .atoms
                .iter()
                .zip(&other.atoms)
                .all(|(a, b)| a.point.approx_eq(&b.point) && a.weight.approx_eq(&b.weight))
    }

    /// `sum_x d(x, y)^p mu(x)`: the transport cost to a Dirac mass at `y`.
    pub fn cost_to_point(&self, y: &Point2<S>, p: crate::scalar::Exponent) -> Result<S> {
        self.atoms.iter().try_fold(S::zero(), |acc, a| {
            Ok(acc + dm(&a.point, y).pow_exp(p)? * a.weight.clone())
        })
    }

    pub fn to_f64(&self) -> DiscreteMeasure<f64> {
        DiscreteMeasure {
            atoms: canonicalize(
                self.atoms
                    .iter()
                    .map(|a| Atom::new(a.point.to_f64(), a.weight.to_f64()))
                    .collect(),
            ),
        }
    }

    /// `{"atoms": [{"x": [x1, x2], "w": weight}, ...]}`.
    pub fn to_json(&self) -> serde_json::Value {
        let atoms: Vec<serde_json::Value> = self
            .atoms
            .iter()
            .map(|a| serde_json::json!({ "x": a.point.to_json(), "w": a.weight.to_json() }))
            .collect();
        serde_json::json!({ "atoms": atoms })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let file: MeasureFile = serde_json::from_value(v.clone())
            .map_err(|e| Error::Parse(format!("measure JSON: {e}")))?;
        let atoms = file
            .atoms
            .iter()
            .map(|a| Ok(Atom::new(Point2::from_json(&a.x)?, scalar_from_json(&a.w)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(atoms)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let v: serde_json::Value =
            serde_json::from_str(s).map_err(|e| Error::Parse(format!("measure JSON: {e}")))?;
        Self::from_json(&v)
    }
}

#[derive(Serialize, Deserialize)]
struct MeasureFile {
    atoms: Vec<AtomFile>,
}

#[derive(Serialize, Deserialize)]
struct AtomFile {
    x: serde_json::Value,
    w: serde_json::Value,
}

impl<S: Scalar> fmt::Display for DiscreteMeasure<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, a) in self.atoms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{} δ{}", a.weight, a.point)?;
        }
        Ok(())
    }
}

/// `T# mu`: atoms mapped pointwise, colliding images merged.
pub fn push_forward<S, F>(t: F, mu: &DiscreteMeasure<S>) -> DiscreteMeasure<S>
where
    S: Scalar,
    F: Fn(&Point2<S>) -> Point2<S>,
{
    DiscreteMeasure {
        atoms: canonicalize(
            mu.atoms
                .iter()
                .map(|a| Atom::new(t(&a.point), a.weight.clone()))
                .collect(),
        ),
    }
}

/// Fallible variant of [`push_forward`] for maps with a domain check.
pub fn try_push_forward<S, F>(t: F, mu: &DiscreteMeasure<S>) -> Result<DiscreteMeasure<S>>
where
    S: Scalar,
    F: Fn(&Point2<S>) -> Result<Point2<S>>,
{
    let atoms = mu
        .atoms
        .iter()
        .map(|a| Ok(Atom::new(t(&a.point)?, a.weight.clone())))
        .collect::<Result<Vec<_>>>()?;
    Ok(DiscreteMeasure {
        atoms: canonicalize(atoms),
    })
}

/// Coordinates `(m, sigma, r)` of a measure on at most two points of `L+`.
///
/// The asymmetry is stored as its exponential `growth = e^r > 0`, which keeps
/// the atoms and weights rational whenever `e^r` is.
#[derive(Clone, Debug, PartialEq)]
pub struct KloecknerParam<S> {
    pub m: S,
    pub sigma: S,
    pub growth: S,
}

impl<S: Scalar> KloecknerParam<S> {
    /// Exact constructor from `(m, sigma, e^r)`.
    pub fn new(m: S, sigma: S, growth: S) -> Result<Self> {
        if sigma < S::zero() {
            return Err(Error::NegativeSigma(sigma.to_text()));
        }
        if growth <= S::zero() {
            return Err(Error::Precondition(format!(
                "e^r must be positive, got {growth}"
            )));
        }
        Ok(KloecknerParam { m, sigma, growth })
    }

    /// Constructor from `(m, sigma, r)`; `e^r` is evaluated in floating point.
    pub fn from_log(m: S, sigma: S, r: f64) -> Result<Self> {
        Self::new(m, sigma, S::from_f64(r.exp())?)
    }

    pub fn r(&self) -> f64 {
        self.growth.to_f64().ln()
    }
}

/// `e^{-r}/(e^r+e^{-r}) δ(m - σe^r) + e^r/(e^r+e^{-r}) δ(m + σe^{-r})` on `L+`.
pub fn kloeckner_measure<S: Scalar>(k: &KloecknerParam<S>) -> DiscreteMeasure<S> {
    if k.sigma == S::zero() {
        return DiscreteMeasure::dirac(Point2::new(k.m.clone(), k.m.clone()));
    }
    let g = k.growth.clone();
    let g2 = g.clone() * g.clone();
    let denom = S::one() + g2.clone();
    let low = k.m.clone() - k.sigma.clone() * g.clone();
    let high = k.m.clone() + k.sigma.clone() / g;
    DiscreteMeasure {
        atoms: canonicalize(vec![
            Atom::new(Point2::new(low.clone(), low), S::one() / denom.clone()),
            Atom::new(Point2::new(high.clone(), high), g2 / denom),
        ]),
    }
}

/// Shape-preserving isometry: `(m, σ, r) -> (m, σ, -r)`.
pub fn phi_star<S: Scalar>(k: &KloecknerParam<S>) -> KloecknerParam<S> {
    KloecknerParam {
        m: k.m.clone(),
        sigma: k.sigma.clone(),
        growth: S::one() / k.growth.clone(),
    }
}

/// Exotic isometry: `(m, σ, r) -> (m, σ, r + t)`, with `e^t` evaluated in
/// floating point.
pub fn phi_t<S: Scalar>(t: f64, k: &KloecknerParam<S>) -> Result<KloecknerParam<S>> {
    Ok(phi_t_exp(S::from_f64(t.exp())?, k))
}

/// Exotic isometry given the exact factor `e^t`.
pub fn phi_t_exp<S: Scalar>(exp_t: S, k: &KloecknerParam<S>) -> KloecknerParam<S> {
    KloecknerParam {
        m: k.m.clone(),
        sigma: k.sigma.clone(),
        growth: k.growth.clone() * exp_t,
    }
}

/// Recovers `(m, σ, r)` of a measure supported on at most two points of `L+`.
/// A Dirac mass maps to `σ = 0, r = 0`.
pub fn kloeckner_params<S: Scalar>(mu: &DiscreteMeasure<S>) -> Result<KloecknerParam<f64>> {
    if !mu.supported_on(&DiagonalLine::plus()) || mu.len() > 2 {
        return Err(Error::Precondition(
            "parametrization needs at most two atoms on L+".into(),
        ));
    }
    let atoms = mu.atoms();
    if atoms.len() == 1 {
        return KloecknerParam::new(atoms[0].point.x1.to_f64(), 0.0, 1.0);
    }
    // atoms are sorted, so atoms[0] is the lower point
    let (p1, w1) = (atoms[0].point.x1.to_f64(), atoms[0].weight.to_f64());
    let (p2, w2) = (atoms[1].point.x1.to_f64(), atoms[1].weight.to_f64());
    let g = (w2 / w1).sqrt();
    let m = w1 * p1 + w2 * p2;
    let sigma = (p2 - p1) / (g + 1.0 / g);
    KloecknerParam::new(m, sigma, g)
}

/// Membership in the dense family: pairwise-distinct weights and pairwise
/// distinct projections onto both `L+` and `L-`.
pub fn in_family_f<S: Scalar>(mu: &DiscreteMeasure<S>) -> bool {
    let plus = DiagonalLine::plus();
    let minus = DiagonalLine::minus();
    let atoms = mu.atoms();
    for (k, a) in atoms.iter().enumerate() {
        for b in &atoms[k + 1..] {
            if a.weight.approx_eq(&b.weight)
                || project_point(&plus, &a.point).approx_eq(&project_point(&plus, &b.point))
                || project_point(&minus, &a.point).approx_eq(&project_point(&minus, &b.point))
            {
                return false;
            }
        }
    }
    true
}

/// A nonnegative weighting of the `N x N` grid cut out by the preimages of
/// `N` points of `L+` and `N` points of `L-`.
///
/// Grid point `z(i, j)` projects to `(s_i, s_i)` on `L+` and to `(u_j, -u_j)`
/// on `L-`, so `z(i, j) = (s_i + u_j, s_i - u_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridMeasure<S> {
    pub plus: Vec<S>,
    pub minus: Vec<S>,
    pub weights: Vec<Vec<S>>,
}

impl<S: Scalar> GridMeasure<S> {
    /// The grid of `mu` carrying `mu` itself: `a(i, i) = a_i`.
    pub fn of_measure(mu: &DiscreteMeasure<S>) -> Self {
        let n = mu.len();
        let plus = mu
            .points()
            .map(|p| (p.x1.clone() + p.x2.clone()).half())
            .collect();
        let minus = mu
            .points()
            .map(|p| (p.x1.clone() - p.x2.clone()).half())
            .collect();
        let mut weights = vec![vec![S::zero(); n]; n];
        for (i, a) in mu.atoms().iter().enumerate() {
            weights[i][i] = a.weight.clone();
        }
        GridMeasure {
            plus,
            minus,
            weights,
        }
    }

    /// Places the atoms of `xi` on the grid of `mu`. Fails if an atom is off
    /// the grid.
    pub fn locate(mu: &DiscreteMeasure<S>, xi: &DiscreteMeasure<S>) -> Result<Self> {
        let mut grid = Self::of_measure(mu);
        for row in grid.weights.iter_mut() {
            row.iter_mut().for_each(|w| *w = S::zero());
        }
        for atom in xi.atoms() {
            let s = (atom.point.x1.clone() + atom.point.x2.clone()).half();
            let u = (atom.point.x1.clone() - atom.point.x2.clone()).half();
            let i = grid.plus.iter().position(|v| v.approx_eq(&s));
            let j = grid.minus.iter().position(|v| v.approx_eq(&u));
            match (i, j) {
                (Some(i), Some(j)) => grid.weights[i][j] = atom.weight.clone(),
                _ => {
                    return Err(Error::Precondition(format!(
                        "atom {} is not a grid point of the reference measure",
                        atom.point
                    )))
                }
            }
        }
        Ok(grid)
    }

    pub fn size(&self) -> usize {
        self.plus.len()
    }

    pub fn point(&self, i: usize, j: usize) -> Point2<S> {
        Point2::new(
            self.plus[i].clone() + self.minus[j].clone(),
            self.plus[i].clone() - self.minus[j].clone(),
        )
    }

    pub fn row_sums(&self) -> Vec<S> {
        self.weights
            .iter()
            .map(|r| r.iter().fold(S::zero(), |acc, w| acc + w.clone()))
            .collect()
    }

    pub fn col_sums(&self) -> Vec<S> {
        let n = self.size();
        (0..n)
            .map(|j| {
                self.weights
                    .iter()
                    .fold(S::zero(), |acc, r| acc + r[j].clone())
            })
            .collect()
    }

    /// Moves `amount` around the cycle `(i,i) -> (i,k) -> (k,k) -> (k,i)`;
    /// row and column sums are unchanged.
    pub fn cycle_shift(&mut self, i: usize, k: usize, amount: &S) -> Result<()> {
        if i == k {
            return Err(Error::Precondition("cycle needs two distinct indices".into()));
        }
        let dec = |w: &S| w.clone() - amount.clone();
        if dec(&self.weights[i][i]) < S::zero() || dec(&self.weights[k][k]) < S::zero() {
            return Err(Error::Precondition("cycle shift exceeds available mass".into()));
        }
        self.weights[i][i] = dec(&self.weights[i][i]);
        self.weights[k][k] = dec(&self.weights[k][k]);
        self.weights[i][k] = self.weights[i][k].clone() + amount.clone();
        self.weights[k][i] = self.weights[k][i].clone() + amount.clone();
        Ok(())
    }

    /// Smallest max-metric distance between distinct grid points.
    pub fn min_gap(&self) -> S {
        let n = self.size();
        let pts: Vec<Point2<S>> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| self.point(i, j))
            .collect();
        let mut best: Option<S> = None;
        for (k, a) in pts.iter().enumerate() {
            for b in &pts[k + 1..] {
                let d = dm(a, b);
                best = Some(match best {
                    Some(cur) => cur.min_of(d),
                    None => d,
                });
            }
        }
        best.unwrap_or_else(S::zero)
    }

    pub fn to_measure(&self) -> Result<DiscreteMeasure<S>> {
        let n = self.size();
        let mut atoms = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if self.weights[i][j] > S::zero() {
                    atoms.push(Atom::new(self.point(i, j), self.weights[i][j].clone()));
                }
            }
        }
        DiscreteMeasure::new(atoms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::dilate;
    use crate::geometry::Domain;
    use crate::scalar::{q, Rational};

    fn p(a: Rational, b: Rational) -> Point2<Rational> {
        Point2::new(a, b)
    }

    fn pi(a: i64, b: i64) -> Point2<Rational> {
        Point2::from_i64(a, b)
    }

    #[test]
    fn canonical_form_merges_and_sorts() {
        let mu = DiscreteMeasure::from_pairs(vec![
            (pi(1, 0), q(1, 4)),
            (pi(0, 0), q(1, 4)),
            (pi(1, 0), q(1, 2)),
        ])
        .unwrap();
        assert_eq!(mu.len(), 2);
        assert_eq!(mu.atoms()[0].point, pi(0, 0));
        assert_eq!(mu.atoms()[1].weight, q(3, 4));
    }

    #[test]
    fn rejects_bad_measures() {
        assert!(DiscreteMeasure::<Rational>::new(vec![]).is_err());
        assert!(DiscreteMeasure::from_pairs(vec![(pi(0, 0), q(1, 2))]).is_err());
        assert!(DiscreteMeasure::from_pairs(vec![(pi(0, 0), q(3, 2)), (pi(1, 0), q(-1, 2))]).is_err());
        assert!(DiscreteMeasure::from_pairs(vec![(Point2::new(0.0, 0.0), 0.5 + 1e-13), (Point2::new(1.0, 0.0), 0.5)]).is_ok());
    }

    #[test]
    fn push_forward_examples() {
        let mu = DiscreteMeasure::from_pairs(vec![(pi(1, 0), q(1, 2)), (pi(0, 1), q(1, 2))]).unwrap();
        assert_eq!(push_forward(|x| x.clone(), &mu), mu);
        assert_eq!(
            push_forward(|_| pi(0, 0), &mu),
            DiscreteMeasure::dirac(pi(0, 0))
        );
        let d = DiscreteMeasure::dirac(pi(1, 2));
        let out = try_push_forward(|x| dilate(&pi(0, 0), x, Domain::Plane), &d).unwrap();
        assert_eq!(out, DiscreteMeasure::dirac(pi(2, 4)));
    }

    #[test]
    fn kloeckner_examples() {
        let mu = kloeckner_measure(&KloecknerParam::new(q(0, 1), q(1, 1), q(2, 1)).unwrap());
        let expected = DiscreteMeasure::from_pairs(vec![
            (pi(-2, -2), q(1, 5)),
            (p(q(1, 2), q(1, 2)), q(4, 5)),
        ])
        .unwrap();
        assert_eq!(mu, expected);

        let mu = kloeckner_measure(&KloecknerParam::new(q(0, 1), q(1, 1), q(1, 1)).unwrap());
        let expected =
            DiscreteMeasure::from_pairs(vec![(pi(-1, -1), q(1, 2)), (pi(1, 1), q(1, 2))]).unwrap();
        assert_eq!(mu, expected);

        let mu = kloeckner_measure(&KloecknerParam::new(q(0, 1), q(1, 1), q(1, 2)).unwrap());
        let expected = DiscreteMeasure::from_pairs(vec![
            (p(q(-1, 2), q(-1, 2)), q(4, 5)),
            (pi(2, 2), q(1, 5)),
        ])
        .unwrap();
        assert_eq!(mu, expected);

        // float constructor from r
        let mu = kloeckner_measure(&KloecknerParam::from_log(0.0, 1.0, 2f64.ln()).unwrap());
        assert!((mu.atoms()[0].weight - 0.2).abs() < 1e-12);
        assert!((mu.atoms()[0].point.x1 + 2.0).abs() < 1e-12);

        assert!(KloecknerParam::new(q(0, 1), q(-1, 1), q(1, 1)).is_err());
        let dirac = kloeckner_measure(&KloecknerParam::new(q(3, 1), q(0, 1), q(5, 1)).unwrap());
        assert_eq!(dirac, DiscreteMeasure::dirac(pi(3, 3)));
    }

    #[test]
    fn isometry_actions_on_parameters() {
        let k = KloecknerParam::from_log(0.0, 1.0, 2f64.ln()).unwrap();
        assert!((phi_star(&k).r() + 2f64.ln()).abs() < 1e-12);
        let k0 = KloecknerParam::from_log(0.0, 1.0, 0.0).unwrap();
        assert_eq!(phi_star(&k0), k0);
        let k = KloecknerParam::from_log(5.0, 2.0, -3.0).unwrap();
        assert!((phi_star(&k).r() - 3.0).abs() < 1e-12);
        assert!((phi_t(3f64.ln(), &k0).unwrap().r() - 3f64.ln()).abs() < 1e-12);
        assert_eq!(phi_t(0.0, &k).unwrap(), k);
        let k1 = KloecknerParam::from_log(0.0, 1.0, 1.0).unwrap();
        assert!(phi_t(-1.0, &k1).unwrap().r().abs() < 1e-12);
        // exact forms
        let k = KloecknerParam::new(q(0, 1), q(1, 1), q(1, 1)).unwrap();
        assert_eq!(phi_t_exp(q(3, 1), &k).growth, q(3, 1));
    }

    #[test]
    fn parameter_recovery() {
        for &(m, s, r) in &[(0.0, 1.0, 0.7), (2.5, 0.3, -1.2), (-1.0, 4.0, 0.0)] {
            let k = KloecknerParam::from_log(m, s, r).unwrap();
            let back = kloeckner_params(&kloeckner_measure(&k)).unwrap();
            assert!((back.m - m).abs() < 1e-9);
            assert!((back.sigma - s).abs() < 1e-9);
            assert!((back.r() - r).abs() < 1e-9);
        }
        let back = kloeckner_params(&DiscreteMeasure::dirac(pi(2, 2))).unwrap();
        assert_eq!((back.m, back.sigma, back.r()), (2.0, 0.0, 0.0));
        assert!(kloeckner_params(&DiscreteMeasure::dirac(pi(2, 1))).is_err());
    }

    #[test]
    fn family_f_examples() {
        let mu = DiscreteMeasure::from_pairs(vec![(pi(0, 0), q(1, 3)), (pi(5, 1), q(2, 3))]).unwrap();
        assert!(in_family_f(&mu));
        let mu = DiscreteMeasure::from_pairs(vec![(pi(0, 0), q(1, 2)), (pi(1, 1), q(1, 2))]).unwrap();
        assert!(!in_family_f(&mu));
        // co-diagonal atoms share their L- projection
        let mu = DiscreteMeasure::from_pairs(vec![(pi(0, 0), q(1, 3)), (pi(1, 1), q(2, 3))]).unwrap();
        assert!(!in_family_f(&mu));
        let mu = DiscreteMeasure::from_pairs(vec![(pi(0, 0), q(1, 3)), (pi(2, 1), q(2, 3))]).unwrap();
        let shifted = push_forward(|x| Point2::new(x.x1.clone() + q(1, 1), x.x2.clone() - q(1, 1)), &mu);
        assert!(in_family_f(&shifted));
        let collide = DiscreteMeasure::from_pairs(vec![(pi(0, 0), q(1, 3)), (pi(1, -1), q(2, 3))]).unwrap();
        assert!(!in_family_f(&collide));
    }

    #[test]
    fn grid_measure_marginals() {
        let mu = DiscreteMeasure::from_pairs(vec![(pi(0, 0), q(1, 3)), (pi(3, 1), q(2, 3))]).unwrap();
        let mut g = GridMeasure::of_measure(&mu);
        assert_eq!(g.to_measure().unwrap(), mu);
        assert_eq!(g.point(0, 1), pi(1, -1));
        assert_eq!(g.point(1, 0), pi(2, 2));
        assert_eq!(g.min_gap(), q(1, 1));
        g.cycle_shift(0, 1, &q(1, 6)).unwrap();
        assert_eq!(g.row_sums(), vec![q(1, 3), q(2, 3)]);
        assert_eq!(g.col_sums(), vec![q(1, 3), q(2, 3)]);
        assert!(g.cycle_shift(0, 1, &q(1, 3)).is_err());
        let located = GridMeasure::locate(&mu, &g.to_measure().unwrap()).unwrap();
        assert_eq!(located, g);
        assert!(GridMeasure::locate(&mu, &DiscreteMeasure::dirac(pi(7, 7))).is_err());
    }

    #[test]
    fn measure_json_round_trip() {
        let mu = DiscreteMeasure::from_pairs(vec![(p(q(1, 2), q(-3, 1)), q(1, 3)), (pi(3, 1), q(2, 3))]).unwrap();
        let text = mu.to_json().to_string();
        assert_eq!(DiscreteMeasure::<Rational>::from_json_str(&text).unwrap(), mu);
        let float = DiscreteMeasure::<f64>::from_json_str(
            r#"{"atoms":[{"x":[0,0],"w":"1/4"},{"x":["0.5",1],"w":0.75}]}"#,
        )
        .unwrap();
        assert_eq!(float.len(), 2);
        assert!(DiscreteMeasure::<f64>::from_json_str(r#"{"atoms":[{"x":[0],"w":1}]}"#).is_err());
    }
}
