//! Measure-level constructions: metric projection onto diagonals, the Radon
//! transform and its inverse on the dense family, symmetric measures, grid
//! perturbations and displacement interpolation.

use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::geometry::{dilate, dm, project_point, push_along_alloc, DiagonalLine, Domain, Point2, Slope};
use crate::measure::{in_family_f, push_forward, try_push_forward, Atom, DiscreteMeasure, GridMeasure};
use crate::scalar::{Exponent, Rational, Scalar};
use crate::transport::wasserstein_pow;

/// `(P_L)# mu`.
pub fn project_measure<S: Scalar>(line: &DiagonalLine<S>, mu: &DiscreteMeasure<S>) -> DiscreteMeasure<S> {
    push_forward(|x| project_point(line, x), mu)
}

/// The pair of projections of a measure onto `L+` and `L-`.
#[derive(Clone, Debug, PartialEq)]
pub struct RadonImage<S> {
    pub plus: DiscreteMeasure<S>,
    pub minus: DiscreteMeasure<S>,
}

impl<S: Scalar> RadonImage<S> {
    /// Checks that each component lies on its line.
    pub fn new(plus: DiscreteMeasure<S>, minus: DiscreteMeasure<S>) -> Result<Self> {
        if !plus.supported_on(&DiagonalLine::plus()) {
            return Err(Error::Precondition("plus component is not on L+".into()));
        }
        if !minus.supported_on(&DiagonalLine::minus()) {
            return Err(Error::Precondition("minus component is not on L-".into()));
        }
        Ok(RadonImage { plus, minus })
    }

    pub fn approx_eq(&self, other: &Self) -> bool {
        self.plus.approx_eq(&other.plus) && self.minus.approx_eq(&other.minus)
    }

    pub fn to_json(&self) -> Value {
        json!({ "plus": self.plus.to_json(), "minus": self.minus.to_json() })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let part = |key: &str| {
            v.get(key)
                .ok_or_else(|| Error::Parse(format!("missing `{key}`")))
                .and_then(DiscreteMeasure::from_json)
        };
        Self::new(part("plus")?, part("minus")?)
    }
}

pub fn radon<S: Scalar>(mu: &DiscreteMeasure<S>) -> RadonImage<S> {
    RadonImage {
        plus: project_measure(&DiagonalLine::plus(), mu),
        minus: project_measure(&DiagonalLine::minus(), mu),
    }
}

/// Inverts [`radon`] on the dense family by pairing equal weights.
pub fn radon_invert_f<S: Scalar>(img: &RadonImage<S>) -> Result<DiscreteMeasure<S>> {
    let sorted = |m: &DiscreteMeasure<S>| {
        let mut atoms = m.atoms().to_vec();
        atoms.sort_by(|a, b| b.weight.partial_cmp(&a.weight).expect("weights are ordered"));
        atoms
    };
    let plus = sorted(&img.plus);
    let minus = sorted(&img.minus);
    if plus.len() != minus.len() {
        return Err(Error::Precondition(format!(
            "components have {} and {} atoms",
            plus.len(),
            minus.len()
        )));
    }
    for w in plus.windows(2) {
        if w[0].weight.approx_eq(&w[1].weight) {
            return Err(Error::Precondition("repeated weight; image is outside the family".into()));
        }
    }
    let mut atoms = Vec::with_capacity(plus.len());
    for (p, m) in plus.iter().zip(&minus) {
        if !p.weight.approx_eq(&m.weight) {
            return Err(Error::Precondition(format!(
                "weight {} on L+ has no partner on L- (found {})",
                p.weight, m.weight
            )));
        }
        // P+(z) = (s, s), P-(z) = (u, -u)  =>  z = (s + u, s - u)
        let s = p.point.x1.clone();
        let u = m.point.x1.clone();
        atoms.push(Atom::new(Point2::new(s.clone() + u.clone(), s - u), p.weight.clone()));
    }
    DiscreteMeasure::new(atoms)
}

/// `eta = (y -> y + t0 e(y))# nu` with `t0 = d_W1(mu, nu)`, the measure
/// symmetric to `mu` about `nu` for `mu` on the line `L`.
pub fn symmetric_w1<S: Scalar>(
    line: &DiagonalLine<S>,
    mu_on_line: &DiscreteMeasure<S>,
    nu: &DiscreteMeasure<S>,
) -> Result<DiscreteMeasure<S>> {
    if !mu_on_line.supported_on(line) {
        return Err(Error::Precondition("measure is not supported on the line".into()));
    }
    let t0 = wasserstein_pow(mu_on_line, nu, Exponent::int(1))?;
    Ok(push_forward(|y| push_along_alloc(line, y, &t0), nu))
}

/// `eta = (D_x)# nu`, the measure symmetric to `delta_x` about `nu`.
pub fn symmetric_wp<S: Scalar>(
    x: &Point2<S>,
    nu: &DiscreteMeasure<S>,
    p: Exponent,
    domain: Domain,
) -> Result<DiscreteMeasure<S>> {
    if p.is_one() {
        return Err(Error::Precondition("dilation symmetry needs p > 1".into()));
    }
    try_push_forward(|y| dilate(x, y, domain), nu)
}

/// `x -> (1 - s) corner + s x` applied to a measure on the diagonal through
/// `corner`.
pub fn displacement_interpolation<S: Scalar>(
    mu_diag: &DiscreteMeasure<S>,
    corner: &Point2<S>,
    s: &S,
) -> Result<DiscreteMeasure<S>> {
    if *s < S::zero() || *s > S::one() {
        return Err(Error::Precondition(format!("s = {s} is outside [0, 1]")));
    }
    let on_line = [Slope::Plus, Slope::Minus]
        .into_iter()
        .any(|eps| mu_diag.supported_on(&DiagonalLine::through(eps, corner)));
    if !on_line {
        return Err(Error::Precondition(
            "measure and corner do not share a diagonal line".into(),
        ));
    }
    let r = S::one() - s.clone();
    Ok(push_forward(|x| corner.scale(&r).add(&x.scale(s)), mu_diag))
}

/// The three competitors built from a grid measure with a doubled `L+`
/// projection.
#[derive(Clone, Debug)]
pub struct PerturbationTriple<S> {
    pub mu: DiscreteMeasure<S>,
    pub xi: DiscreteMeasure<S>,
    pub mu_prime: DiscreteMeasure<S>,
    pub nu1_prime: DiscreteMeasure<S>,
    pub nu2_prime: DiscreteMeasure<S>,
    pub a: S,
    pub c0: S,
    pub x_prime: Point2<S>,
    /// Grid row of the perturbed atom, and the two columns carrying mass.
    pub row: usize,
    pub j1: usize,
    pub j2: usize,
    grid: GridMeasure<S>,
}

/// The three distances of a perturbation together with the target value.
#[derive(Clone, Debug, PartialEq)]
pub struct PerturbationCosts<S> {
    /// `d^p(mu, mu')`, `d^p(xi, nu1')`, `d^p(xi, nu2')`.
    pub costs: [S; 3],
    /// `a c0^p`.
    pub expected: S,
}

impl<S: Scalar> PerturbationCosts<S> {
    pub fn holds(&self) -> bool {
        self.costs.iter().all(|c| c.approx_eq(&self.expected))
    }
}

impl<S: Scalar> PerturbationTriple<S> {
    /// `z(0, j)`: the grid point over `x'` in column `j`.
    fn lifted(&self, j: usize) -> Point2<S> {
        let s0 = self.x_prime.x1.clone();
        let u = self.grid.minus[j].clone();
        Point2::new(s0.clone() + u.clone(), s0 - u)
    }

    pub fn costs(&self, p: Exponent) -> Result<PerturbationCosts<S>> {
        Ok(PerturbationCosts {
            costs: [
                wasserstein_pow(&self.mu, &self.mu_prime, p)?,
                wasserstein_pow(&self.xi, &self.nu1_prime, p)?,
                wasserstein_pow(&self.xi, &self.nu2_prime, p)?,
            ],
            expected: self.a.clone() * self.c0.pow_exp(p)?,
        })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "mu_prime": self.mu_prime.to_json(),
            "nu1_prime": self.nu1_prime.to_json(),
            "nu2_prime": self.nu2_prime.to_json(),
            "a": self.a.to_json(),
            "c0": self.c0.to_json(),
            "x_prime": self.x_prime.to_json(),
            "row": self.row,
            "columns": [self.j1, self.j2],
        })
    }
}

fn move_mass<S: Scalar>(
    m: &DiscreteMeasure<S>,
    from: &Point2<S>,
    to: Point2<S>,
    amount: &S,
) -> Result<DiscreteMeasure<S>> {
    let mut atoms = m.atoms().to_vec();
    let slot = atoms
        .iter_mut()
        .find(|at| at.point.approx_eq(from))
        .ok_or_else(|| Error::Precondition(format!("no atom at {from}")))?;
    slot.weight = slot.weight.clone() - amount.clone();
    atoms.push(Atom::new(to, amount.clone()));
    DiscreteMeasure::new(atoms)
}

/// Builds `mu'`, `nu1'`, `nu2'` from `mu` in the family, a grid measure `xi`
/// with the same Radon image, a weight `a` and a point `x'` on `L+`.
///
/// The perturbed row is the one whose `L+` projection is closest to `x'`;
/// `j1 < j2` are its first two columns carrying positive mass.
pub fn grid_perturbation<S: Scalar>(
    mu: &DiscreteMeasure<S>,
    xi: &GridMeasure<S>,
    a: &S,
    x_prime: &Point2<S>,
) -> Result<PerturbationTriple<S>> {
    if !in_family_f(mu) {
        return Err(Error::Precondition("reference measure is not in the family".into()));
    }
    let reference = GridMeasure::of_measure(mu);
    let same_axes = reference.plus.len() == xi.plus.len()
        && reference.plus.iter().zip(&xi.plus).all(|(u, v)| u.approx_eq(v))
        && reference.minus.iter().zip(&xi.minus).all(|(u, v)| u.approx_eq(v));
    let weights: Vec<S> = mu.weights().cloned().collect();
    let marginals_match = xi.row_sums().iter().zip(&weights).all(|(r, w)| r.approx_eq(w))
        && xi.col_sums().iter().zip(&weights).all(|(c, w)| c.approx_eq(w));
    if !same_axes || !marginals_match {
        return Err(Error::Precondition(
            "grid measure does not share the Radon image of the reference measure".into(),
        ));
    }
    if !DiagonalLine::plus().contains(x_prime) {
        return Err(Error::Precondition(format!("x' = {x_prime} is not on L+")));
    }

    let s0 = x_prime.x1.clone();
    let row = (0..xi.size())
        .min_by(|&i, &k| {
            let di = (xi.plus[i].clone() - s0.clone()).abs();
            let dk = (xi.plus[k].clone() - s0.clone()).abs();
            di.partial_cmp(&dk).expect("ordered")
        })
        .expect("grid is nonempty");
    let mut cols = (0..xi.size()).filter(|&j| xi.weights[row][j].is_positive_strict());
    let (j1, j2) = match (cols.next(), cols.next()) {
        (Some(j1), Some(j2)) => (j1, j2),
        _ => {
            return Err(Error::Precondition(
                "no two grid points share the L+ projection of an atom".into(),
            ))
        }
    };

    let c = xi.min_gap();
    let c0 = (xi.plus[row].clone() - s0).abs();
    if !c0.is_positive_strict() || !(c0.clone() + c0.clone()).lt_strict(&c) {
        return Err(Error::Precondition(format!(
            "offset c0 = {c0} must satisfy 0 < c0 < c/2 with c = {c}"
        )));
    }
    let cap = xi.weights[row][j1].clone().min_of(xi.weights[row][j2].clone());
    if !a.is_positive_strict() || !a.lt_strict(&cap) {
        return Err(Error::Precondition(format!(
            "weight a = {a} must satisfy 0 < a < {cap}"
        )));
    }

    let xi_measure = xi.to_measure()?;
    let mut triple = PerturbationTriple {
        mu: mu.clone(),
        xi: xi_measure.clone(),
        mu_prime: mu.clone(),
        nu1_prime: xi_measure.clone(),
        nu2_prime: xi_measure.clone(),
        a: a.clone(),
        c0,
        x_prime: x_prime.clone(),
        row,
        j1,
        j2,
        grid: xi.clone(),
    };
    triple.mu_prime = move_mass(mu, &xi.point(row, row), triple.lifted(row), a)?;
    triple.nu1_prime = move_mass(&xi_measure, &xi.point(row, j1), triple.lifted(j1), a)?;
    triple.nu2_prime = move_mass(&xi_measure, &xi.point(row, j2), triple.lifted(j2), a)?;
    Ok(triple)
}

/// Outcome of the constrained enumeration behind the uniqueness claim.
#[derive(Clone, Debug)]
pub struct UniquenessReport {
    /// Contingency tables fully enumerated or cut by the lower bound.
    pub visited: usize,
    /// Tables whose exact distance had to be computed.
    pub solved: usize,
    /// Every enumerated measure attaining `a c0^p`.
    pub minimizers: Vec<DiscreteMeasure<Rational>>,
    /// Any enumerated measure strictly below `a c0^p` (must be empty).
    pub below: Vec<DiscreteMeasure<Rational>>,
    /// Common denominator of the enumeration lattice.
    pub resolution: u64,
}

struct Enumeration<'a> {
    rows: usize,
    cols: usize,
    row_units: Vec<i64>,
    col_units: Vec<i64>,
    /// `min_x d(z, x)^p` per cell: a lower bound on the cost of each unit.
    floor: Vec<Rational>,
    unit: Rational,
    target: Rational,
    table: Vec<i64>,
    visit: &'a mut dyn FnMut(&[i64]),
    visited: usize,
}

impl Enumeration<'_> {
    fn run(&mut self, cell: usize, bound: Rational) {
        if bound > self.target {
            self.visited += 1;
            return;
        }
        if cell == self.rows * self.cols {
            self.visited += 1;
            (self.visit)(&self.table);
            return;
        }
        let (i, j) = (cell / self.cols, cell % self.cols);
        let cap = self.row_units[i].min(self.col_units[j]);
        // the last cell of a row and the last row are forced
        let range: Vec<i64> = if j + 1 == self.cols {
            vec![self.row_units[i]]
        } else if i + 1 == self.rows {
            vec![self.col_units[j]]
        } else {
            (0..=cap).collect()
        };
        for v in range {
            if v < 0 || v > cap {
                continue;
            }
            self.table[cell] = v;
            self.row_units[i] -= v;
            self.col_units[j] -= v;
            let add = self.floor[cell].clone() * self.unit.clone() * Rational::from_integer(v.into());
            self.run(cell + 1, bound.clone() + add);
            self.row_units[i] += v;
            self.col_units[j] += v;
        }
        self.table[cell] = 0;
    }
}

fn units(w: &Rational, d: u64) -> Result<i64> {
    let scaled = w * Rational::from_integer(d.into());
    if !scaled.is_integer() {
        return Err(Error::Precondition(format!("weight {w} is off the 1/{d} lattice")));
    }
    scaled
        .to_integer()
        .to_i64()
        .ok_or_else(|| Error::Precondition("enumeration lattice too fine".into()))
}

impl PerturbationTriple<Rational> {
    /// Enumerates every measure `zeta` on the `(N + 1) x N` grid with Radon
    /// image `R(mu')` and weights on the `1/D` lattice, `D` the common
    /// denominator of the marginals, and returns those with
    /// `d^p(mu, zeta) <= a c0^p`.
    ///
    /// Tables whose cheap lower bound `sum zeta(z) min_x d(z, x)^p` already
    /// exceeds the target are cut without solving.
    pub fn uniqueness(&self, p: Exponent) -> Result<UniquenessReport> {
        let n = self.grid.size();
        let weights: Vec<Rational> = self.mu.weights().cloned().collect();
        let mut row_sums = vec![self.a.clone()];
        for (i, w) in weights.iter().enumerate() {
            row_sums.push(if i == self.row { w - &self.a } else { w.clone() });
        }
        let d = row_sums
            .iter()
            .chain(&weights)
            .fold(<num_bigint::BigInt as One>::one(), |acc, w| acc.lcm(w.denom()));
        let d = d
            .to_u64()
            .filter(|&d| d <= 1 << 20)
            .ok_or_else(|| Error::Precondition("enumeration lattice too fine".into()))?;

        let s_axis: Vec<Rational> = std::iter::once(self.x_prime.x1.clone())
            .chain(self.grid.plus.iter().cloned())
            .collect();
        let point = |i: usize, j: usize| {
            let (s, u) = (&s_axis[i], &self.grid.minus[j]);
            Point2::new(s + u, s - u)
        };
        let mut floor = Vec::with_capacity((n + 1) * n);
        for i in 0..=n {
            for j in 0..n {
                let z = point(i, j);
                let nearest = self
                    .mu
                    .points()
                    .map(|x| dm(x, &z))
                    .reduce(|a, b| a.min_of(b))
                    .expect("measure is nonempty");
                floor.push(nearest.pow_exp(p)?);
            }
        }
        let target = self.a.clone() * self.c0.pow_exp(p)?;

        let mut minimizers = Vec::new();
        let mut below = Vec::new();
        let mut solved = 0usize;
        let mut failure: Option<Error> = None;
        let unit = Rational::new(1.into(), d.into());
        let mut visit = |table: &[i64]| {
            let mut atoms = Vec::new();
            for (k, &v) in table.iter().enumerate() {
                if v > 0 {
                    atoms.push(Atom::new(point(k / n, k % n), Rational::from_integer(v.into()) * unit.clone()));
                }
            }
            solved += 1;
            let zeta = match DiscreteMeasure::new(atoms) {
                Ok(z) => z,
                Err(e) => return failure = Some(e),
            };
            match wasserstein_pow(&self.mu, &zeta, p) {
                Ok(cost) if cost < target => below.push(zeta),
                Ok(cost) if cost == target => minimizers.push(zeta),
                Ok(_) => {}
                Err(e) => failure = Some(e),
            }
        };
        let mut e = Enumeration {
            rows: n + 1,
            cols: n,
            row_units: row_sums.iter().map(|w| units(w, d)).collect::<Result<_>>()?,
            col_units: weights.iter().map(|w| units(w, d)).collect::<Result<_>>()?,
            floor,
            unit: unit.clone(),
            target: target.clone(),
            table: vec![0; (n + 1) * n],
            visit: &mut visit,
            visited: 0,
        };
        e.run(0, <Rational as Zero>::zero());
        let visited = e.visited;
        if let Some(err) = failure {
            return Err(err);
        }
        Ok(UniquenessReport {
            visited,
            solved,
            minimizers,
            below,
            resolution: d,
        })
    }
}
