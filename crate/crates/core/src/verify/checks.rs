use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::geometry::{dm, push_along_alloc, same_diagonal, triangle_saturates, DiagonalLine, Domain, Point2, Slope};
use crate::measure::{kloeckner_measure, push_forward, DiscreteMeasure, KloecknerParam};
use crate::scalar::{q, Exponent, Rational, Scalar};
use crate::transport::{is_unique_optimal_plan, wasserstein_pow};
use crate::wgeom::{symmetric_w1, symmetric_wp};

use super::CheckReport;

type P = Point2<Rational>;
type M = DiscreteMeasure<Rational>;

fn w(mu: &M, nu: &M, p: u32) -> Result<Rational> {
    wasserstein_pow(mu, nu, Exponent::int(p))
}

fn two_pow(p: u32) -> Rational {
    q(2, 1).powi(p)
}

fn mjson(m: &M) -> Value {
    m.to_json()
}

/// Finite lattices for the converse searches, centred at the forced point
/// `y` and scaled by a problem-dependent length `h`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchGrid {
    /// Subdivisions `N` of each step `h`.
    pub resolution: u32,
}

impl Default for SearchGrid {
    fn default() -> Self {
        SearchGrid { resolution: 2 }
    }
}

impl SearchGrid {
    fn lattice(y: &P, step: &Rational, reach: i64) -> Vec<P> {
        let mut out = Vec::new();
        for k in -reach..=reach {
            for l in -reach..=reach {
                out.push(Point2::new(
                    y.x1.clone() + step.clone() * Rational::from_i64(k),
                    y.x2.clone() + step.clone() * Rational::from_i64(l),
                ));
            }
        }
        out
    }

    /// `y + (h/N) Z^2` within max-distance `2h` of `y`.
    pub fn fine(&self, y: &P, h: &Rational) -> Vec<P> {
        let n = i64::from(self.resolution.max(1));
        Self::lattice(y, &(h.clone() / Rational::from_i64(n)), 2 * n)
    }

    /// `y + h Z^2` within max-distance `2h` of `y`.
    pub fn coarse(&self, y: &P, h: &Rational) -> Vec<P> {
        Self::lattice(y, h, 2)
    }

    pub fn describe(&self, scale: &str) -> String {
        format!(
            "Diracs on y + (h/{n}) Z^2 and 1/2-1/2 pairs on y + h Z^2, both within d_m <= 2h of y; h = {scale}",
            n = self.resolution.max(1)
        )
    }
}

/// The forcing argument: only `z = y` saturates the pointwise condition on
/// the fine lattice, and no searched `eta` satisfies the metric chain.
fn certify_forcing(
    report: &mut CheckReport,
    grid: &SearchGrid,
    y: &P,
    h: &Rational,
    pointwise: impl Fn(&P) -> bool,
    chain: impl Fn(&M) -> Result<bool>,
    context: Value,
) -> Result<()> {
    report.instances += 1;
    let fine = grid.fine(y, h);
    let saturated: Vec<&P> = fine.iter().filter(|z| pointwise(z)).collect();
    report.expect(saturated == vec![y], || {
        json!({
            "reason": "pointwise saturation set differs from {y}",
            "context": context,
            "set": saturated.iter().map(|z| z.to_json()).collect::<Vec<_>>(),
        })
    });
    for z in &fine {
        let eta = DiscreteMeasure::dirac(z.clone());
        if chain(&eta)? {
            report.expect(false, || json!({"reason": "chain holds", "context": context, "eta": mjson(&eta)}));
        }
    }
    let coarse = grid.coarse(y, h);
    let half = q(1, 2);
    for (k, a) in coarse.iter().enumerate() {
        for b in &coarse[k + 1..] {
            let eta = DiscreteMeasure::from_pairs(vec![(a.clone(), half.clone()), (b.clone(), half.clone())])?;
            if chain(&eta)? {
                report.expect(false, || json!({"reason": "chain holds", "context": context, "eta": mjson(&eta)}));
            }
        }
    }
    Ok(())
}

/// A diagonal line carrying every atom, if any. Diracs use `L+` through the
/// atom.
pub fn diagonal_line_of(points: &[P]) -> Option<DiagonalLine<Rational>> {
    let first = points.first()?;
    [Slope::Plus, Slope::Minus]
        .into_iter()
        .map(|eps| DiagonalLine::through(eps, first))
        .find(|l| points.iter().all(|x| l.contains(x)))
}

fn non_codiagonal_pair(a: &M, b: &M) -> Option<(P, P)> {
    a.points()
        .flat_map(|x| b.points().map(move |y| (x, y)))
        .find(|(x, y)| !same_diagonal(*x, *y))
        .map(|(x, y)| (x.clone(), y.clone()))
}

pub(crate) fn has_non_codiagonal_pair(a: &M, b: &M) -> bool {
    non_codiagonal_pair(a, b).is_some()
}

fn points(m: &M) -> Vec<P> {
    m.points().cloned().collect()
}

/// Symmetric measures for `p = 1`: a measure on a diagonal line admits a
/// symmetric partner about every `nu`; otherwise the midpoint of two
/// non-co-diagonal atoms admits none on the search grid.
pub fn check_diag_support_char(mu: &M, nu_samples: &[M], grid: &SearchGrid) -> Result<CheckReport> {
    if let Some(line) = diagonal_line_of(&points(mu)) {
        let mut r = CheckReport::new("diag-support-char forward");
        for nu in nu_samples {
            r.instances += 1;
            let eta = symmetric_w1(&line, mu, nu)?;
            let t0 = w(mu, nu, 1)?;
            let ctx = || json!({"mu": mjson(mu), "nu": mjson(nu), "eta": mjson(&eta)});
            r.expect_eq(&w(nu, &eta, 1)?, &t0, ctx);
            r.expect_eq(&w(mu, &eta, 1)?, &(t0.clone() + t0.clone()), ctx);
        }
        return Ok(r);
    }
    let mut r = CheckReport::new("diag-support-char converse").with_grid(grid.describe("d_W1(mu, delta_y)"));
    let (x, x2) = non_codiagonal_pair(mu, mu).expect("off-diagonal measure has a non-co-diagonal pair");
    let y = x.midpoint(&x2);
    let one = Exponent::int(1);
    let t0 = mu.cost_to_point(&y, one)?;
    certify_forcing(
        &mut r,
        grid,
        &y,
        &t0,
        |z| triangle_saturates(&x, &y, z, one) && triangle_saturates(&x2, &y, z, one),
        |eta| Ok(eta.cost_to_point(&y, one)? == t0 && w(mu, eta, 1)? == t0.clone() + t0.clone()),
        json!({"mu": mjson(mu), "y": y.to_json()}),
    )?;
    Ok(r)
}

/// Two measures on one diagonal line admit a common aligned `eta` at
/// distance one from every `nu`; two measures on different lines do not.
pub fn check_same_diag_char(mu1: &M, mu2: &M, nu_samples: &[M], grid: &SearchGrid) -> Result<CheckReport> {
    let mut all = points(mu1);
    all.extend(points(mu2));
    if let Some(line) = diagonal_line_of(&all) {
        let mut r = CheckReport::new("same-diag-char forward");
        let one = q(1, 1);
        for nu in nu_samples {
            r.instances += 1;
            let eta = push_forward(|y| push_along_alloc(&line, y, &one), nu);
            let ctx = || json!({"mu1": mjson(mu1), "mu2": mjson(mu2), "nu": mjson(nu)});
            for m in [mu1, mu2] {
                r.expect_eq(&w(m, &eta, 1)?, &(w(m, nu, 1)? + one.clone()), ctx);
            }
            r.expect_eq(&w(nu, &eta, 1)?, &one, ctx);
        }
        return Ok(r);
    }
    if diagonal_line_of(&points(mu1)).is_none() || diagonal_line_of(&points(mu2)).is_none() {
        return Err(Error::Precondition("both measures must lie on diagonal lines".into()));
    }
    let mut r = CheckReport::new("same-diag-char converse").with_grid(grid.describe("1"));
    let (x1, x2) = non_codiagonal_pair(mu1, mu2)
        .ok_or_else(|| Error::Precondition("every cross pair is co-diagonal".into()))?;
    let y = x1.midpoint(&x2);
    let one = Exponent::int(1);
    let base = [mu1.cost_to_point(&y, one)?, mu2.cost_to_point(&y, one)?];
    certify_forcing(
        &mut r,
        grid,
        &y,
        &q(1, 1),
        |z| triangle_saturates(&x1, &y, z, one) && triangle_saturates(&x2, &y, z, one),
        |eta| {
            let d = eta.cost_to_point(&y, one)?;
            if d != q(1, 1) {
                return Ok(false);
            }
            for (m, b) in [mu1, mu2].into_iter().zip(&base) {
                if w(m, eta, 1)? != b.clone() + d.clone() {
                    return Ok(false);
                }
            }
            Ok(true)
        },
        json!({"mu1": mjson(mu1), "mu2": mjson(mu2), "y": y.to_json()}),
    )?;
    Ok(r)
}

/// Symmetric measures for integer `p > 1`: dilation works for Diracs; for
/// any other measure the Minkowski saturation forces `eta = delta_y` at
/// `y = 2/3 x1 + 1/3 x2`, contradicting the chain.
pub fn check_dirac_char(mu: &M, nu_samples: &[M], p: u32, grid: &SearchGrid) -> Result<CheckReport> {
    if p < 2 {
        return Err(Error::Precondition("Dirac characterization needs p > 1".into()));
    }
    let exp = Exponent::int(p);
    if mu.is_dirac() {
        let mut r = CheckReport::new(format!("dirac-char forward p={p}"));
        let x = mu.atoms()[0].point.clone();
        for nu in nu_samples {
            r.instances += 1;
            let eta = symmetric_wp(&x, nu, exp, Domain::Plane)?;
            let c = w(mu, nu, p)?;
            let ctx = || json!({"x": x.to_json(), "nu": mjson(nu), "p": p});
            r.expect_eq(&w(nu, &eta, p)?, &c, ctx);
            r.expect_eq(&w(mu, &eta, p)?, &(two_pow(p) * c.clone()), ctx);
        }
        return Ok(r);
    }
    let mut r = CheckReport::new(format!("dirac-char converse p={p}")).with_grid(grid.describe("d_m(x1, y)"));
    let atoms = mu.atoms();
    let (x1, x2) = (atoms[0].point.clone(), atoms[1].point.clone());
    let y = x1.scale(&q(2, 3)).add(&x2.scale(&q(1, 3)));
    let c1 = mu.cost_to_point(&y, exp)?;
    let h = dm(&x1, &y);
    let dists: Vec<Rational> = mu.points().map(|x| dm(x, &y)).collect();
    // d(y, z) = alpha d(x, y) for every atom x with one alpha >= 0
    let minkowski = |z: &P| {
        let dz = dm(&y, z);
        let zero = Rational::zero();
        dz == zero || (dists.iter().all(|d| *d == dists[0]) && dists[0] != zero)
    };
    certify_forcing(
        &mut r,
        grid,
        &y,
        &h,
        minkowski,
        |eta| Ok(eta.cost_to_point(&y, exp)? == c1 && w(mu, eta, p)? == two_pow(p) * c1.clone()),
        json!({"mu": mjson(mu), "y": y.to_json(), "p": p}),
    )?;
    Ok(r)
}

/// Midpoints `z` of `x` and `y` on the lattice `(x + y)/2 + g Z^2`, `|k|, |l| <= 4`,
/// where `g` is a quarter of the slack `d - |short side|` (or `d/4` when the
/// pair is co-diagonal).
fn enumerate_midpoints(x: &P, y: &P) -> Vec<P> {
    let d = dm(x, y);
    let diff = y.sub(x);
    let short = diff.x1.abs().min_of(diff.x2.abs());
    let slack = d.clone() - short;
    let g = if slack.is_zero_approx() { d.clone() } else { slack } / Rational::from_i64(4);
    let half = d.half();
    SearchGrid::lattice(&x.midpoint(y), &g, 4)
        .into_iter()
        .filter(|z| dm(x, z) == half && dm(z, y) == half)
        .collect()
}

/// Unique geodesics from a Dirac: `supp mu` inside `D_x` iff the optimal plan
/// is unique and every atom is co-diagonal with `x`. Off `D_x`, two distinct
/// midpoint measures are exhibited.
pub fn check_unique_geodesic(x: &P, mu: &M, p: u32) -> Result<CheckReport> {
    let mut r = CheckReport::new("unique-geodesic");
    r.instances += 1;
    let exp = Exponent::int(p);
    let dirac = DiscreteMeasure::dirac(x.clone());
    let in_dx = mu.points().all(|y| same_diagonal(x, y));
    let unique = is_unique_optimal_plan(&dirac, mu, exp)? && mu.points().all(|y| same_diagonal(x, y));
    let ctx = || json!({"x": x.to_json(), "mu": mjson(mu), "p": p});
    r.expect(in_dx == unique, ctx);

    // pointwise: the midpoint of x and an atom is unique iff they are co-diagonal
    for y in mu.points().filter(|y| *y != x) {
        let mids = enumerate_midpoints(x, y);
        r.expect((mids.len() == 1) == same_diagonal(x, y), || {
            json!({"x": x.to_json(), "y": y.to_json(), "midpoints": mids.len()})
        });
    }

    if !in_dx {
        let y0 = mu.points().find(|y| !same_diagonal(x, y)).expect("atom off D_x").clone();
        let diff = y0.sub(x);
        let d = dm(x, &y0);
        let horizontal = diff.x1.abs() >= diff.x2.abs();
        let short = if horizontal { diff.x2.abs() } else { diff.x1.abs() };
        let s = (d - short) / Rational::from_i64(4);
        let m = x.midpoint(&y0);
        let shift = if horizontal {
            Point2::new(Rational::zero(), s)
        } else {
            Point2::new(s, Rational::zero())
        };
        let witness = |sign: &Point2<Rational>| {
            let moved = m.add(sign);
            push_forward(|y| if *y == y0 { moved.clone() } else { x.midpoint(y) }, mu)
        };
        let plus = witness(&shift);
        let minus = witness(&shift.scale(&-Rational::one()));
        let total = mu.cost_to_point(x, exp)?;
        let target = total / two_pow(p);
        r.expect(plus != minus, ctx);
        for mid in [&plus, &minus] {
            r.expect_eq(&mid.cost_to_point(x, exp)?, &target, || json!({"mid": mjson(mid)}));
            r.expect_eq(&w(mid, mu, p)?, &target, || json!({"mid": mjson(mid)}));
        }
    }
    Ok(r)
}

/// The closed form `2 + (2 - e^-t)/(e^t + e^-t)` for
/// `d^2(delta_(-1,0), mu(0,1,t))`, valid for `e^t >= 1/2`.
pub fn w2_table_formula(t: f64) -> f64 {
    2.0 + (2.0 - (-t).exp()) / (t.exp() + (-t).exp())
}

/// Roots of `f` on `[lo, hi]` located by a sign sweep at `step` and refined
/// by bisection to `tol`.
pub fn sweep_roots(f: impl Fn(f64) -> f64, lo: f64, hi: f64, step: f64, tol: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).round() as i64;
    let at = |k: i64| lo + k as f64 * step;
    let mut roots: Vec<f64> = Vec::new();
    let push = |r: f64, roots: &mut Vec<f64>| {
        if roots.last().is_none_or(|last| (r - last).abs() > 2.0 * step) {
            roots.push(r);
        }
    };
    for k in 0..n {
        let (a, b) = (at(k), at(k + 1));
        let (fa, fb) = (f(a), f(b));
        if fa == 0.0 {
            push(a, &mut roots);
        } else if fa * fb < 0.0 {
            let (mut a, mut b, mut fa) = (a, b, fa);
            while b - a > tol {
                let m = 0.5 * (a + b);
                let fm = f(m);
                if fm == 0.0 {
                    a = m;
                    b = m;
                    break;
                }
                if fa * fm < 0.0 {
                    b = m;
                } else {
                    a = m;
                    fa = fm;
                }
            }
            push(0.5 * (a + b), &mut roots);
        }
    }
    if f(hi) == 0.0 {
        push(hi, &mut roots);
    }
    roots
}

/// Squared `W_2` distances between Diracs and two-point measures on `L+`
/// that rule out the exotic isometries of the diagonal.
pub fn reproduce_w2_table() -> Result<CheckReport> {
    let mut r = CheckReport::new("w2-table");
    let k = |g: Rational| KloecknerParam::new(q(0, 1), q(1, 1), g).map(|k| kloeckner_measure(&k));
    let pt = |a: Rational, b: i64| DiscreteMeasure::dirac(Point2::new(a, q(b, 1)));
    // (Dirac, e^t, expected squared distance)
    let cases = [
        (pt(q(2, 1), 0), q(2, 1), q(5, 1)),
        (pt(q(2, 1), 0), q(1, 2), q(29, 5)),
        (pt(q(-1, 1), 0), q(1, 1), q(5, 2)),
        (pt(q(-1, 1), 0), q(3, 1), q(5, 2)),
        (pt(q(-1, 2), 0), q(1, 1), q(13, 8)),
        (pt(q(-1, 2), 0), q(3, 1), q(61, 40)),
    ];
    let mut values = Vec::new();
    for (dirac, g, expected) in cases {
        r.instances += 1;
        let mu = k(g.clone())?;
        let solved = crate::transport::wasserstein(&dirac, &mu, Exponent::int(2))?.cost;
        let direct = mu.cost_to_point(&dirac.atoms()[0].point, Exponent::int(2))?;
        let ctx = || json!({"dirac": mjson(&dirac), "growth": g.to_json()});
        r.expect_eq(&solved, &expected, ctx);
        r.expect_eq(&direct, &expected, ctx);
        let at = &dirac.atoms()[0].point;
        r.note(format!("d^2(delta_({}, {}), mu(0, 1, e^t = {})) = {}", at.x1, at.x2, g, solved));
        values.push(solved);
    }
    // the last Dirac separates t = 0 from t = ln 3
    r.expect(values[4] != values[5], || json!({"reason": "13/8 and 61/40 must differ"}));

    // exact closed form against the solver at rational e^t >= 1/2
    let dirac = pt(q(-1, 1), 0);
    for g in [q(1, 2), q(2, 3), q(1, 1), q(3, 2), q(2, 1), q(3, 1), q(5, 1)] {
        r.instances += 1;
        let closed = q(2, 1) + (q(2, 1) - Rational::one() / g.clone()) / (g.clone() + Rational::one() / g.clone());
        let solved = crate::transport::wasserstein(&dirac, &k(g.clone())?, Exponent::int(2))?.cost;
        r.expect_eq(&solved, &closed, || json!({"growth": g.to_json()}));
    }

    // sweep t in [-3, 3] at step 1e-4 for the roots of formula(t) = 5/2
    r.instances += 1;
    let roots = sweep_roots(|t| w2_table_formula(t) - 2.5, -3.0, 3.0, 1e-4, 1e-12);
    let expected = [0.0, 3f64.ln()];
    let ok = roots.len() == 2 && roots.iter().zip(expected).all(|(a, b)| (a - b).abs() < 1e-9);
    let res = roots
        .iter()
        .zip(expected)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    r.max_residual = r.max_residual.max(res);
    r.expect(ok, || json!({"reason": "sweep roots", "roots": roots}));

    // the float distance agrees with the closed form where it applies
    let x = Point2::new(-1.0, 0.0);
    let mut worst: f64 = 0.0;
    for i in 0..=600 {
        let t = -3.0 + f64::from(i) * 0.01;
        let mu = kloeckner_measure(&KloecknerParam::from_log(0.0, 1.0, t)?);
        let d2 = mu.cost_to_point(&x, Exponent::int(2))?;
        let want = if t >= -(2f64.ln()) { w2_table_formula(t) } else { 2.0 };
        worst = worst.max((d2 - want).abs());
    }
    r.expect(worst < 1e-9, || json!({"reason": "closed form mismatch", "worst": worst}));
    r.note("closed form holds for e^t >= 1/2; for smaller t the squared distance is 2");
    Ok(r)
}

fn require_square(ms: &[&M]) -> Result<()> {
    for m in ms {
        if let Some(p) = m.points().find(|p| !p.in_square()) {
            return Err(Error::OutsideSquare(p.x1.to_text(), p.x2.to_text()));
        }
    }
    Ok(())
}

/// Index of a side of the square containing every atom, as
/// `(axis, sign)` pairs.
fn sides_containing(m: &M) -> Vec<(u8, i64)> {
    let mut out = Vec::new();
    for (axis, sign) in [(0u8, -1i64), (0, 1), (1, -1), (1, 1)] {
        let v = Rational::from_i64(sign);
        let on = m.points().all(|p| if axis == 0 { p.x1 == v } else { p.x2 == v });
        if on {
            out.push((axis, sign));
        }
    }
    out
}

/// True iff the two supports lie on two opposite sides of the square.
pub fn on_opposite_sides(mu: &M, nu: &M) -> bool {
    let a = sides_containing(mu);
    let b = sides_containing(nu);
    a.iter().any(|(axis, s)| b.contains(&(*axis, -s)))
}

/// `d_Wp <= 2` on the square; opposite sides give `2`; interior atoms give
/// less. Equality holds exactly when every pair of support points is at
/// distance 2, which is weaker than lying on opposite sides.
pub fn check_opposite_sides(mu: &M, nu: &M, p: u32) -> Result<CheckReport> {
    require_square(&[mu, nu])?;
    let mut r = CheckReport::new("opposite-sides");
    r.instances += 1;
    let cap = two_pow(p);
    let c = w(mu, nu, p)?;
    let ctx = || json!({"mu": mjson(mu), "nu": mjson(nu), "p": p, "cost": c.to_json()});
    r.expect(c <= cap, ctx);
    let opposite = on_opposite_sides(mu, nu);
    if opposite {
        r.expect_eq(&c, &cap, ctx);
    }
    if mu.points().chain(nu.points()).any(Point2::in_open_square) {
        r.expect(c < cap, ctx);
    }
    let pairwise = mu.points().all(|x| nu.points().all(|y| dm(x, y) == q(2, 1)));
    r.expect((c == cap) == pairwise, ctx);
    if c == cap && !opposite {
        r.note("distance 2 reached by supports not contained in two opposite sides; equality tracks pairwise saturation");
    }
    Ok(r)
}

/// `d_W1(delta_(-1,-1), mu) + d_W1(mu, delta_(1,1)) >= 2`, with equality iff
/// `mu` lives on the diagonal `L+` of the square.
pub fn check_diag_saturation(mu: &M) -> Result<CheckReport> {
    require_square(&[mu])?;
    let mut r = CheckReport::new("diag-saturation");
    r.instances += 1;
    let one = Exponent::int(1);
    let sum = mu.cost_to_point(&Point2::from_i64(-1, -1), one)? + mu.cost_to_point(&Point2::from_i64(1, 1), one)?;
    let on = mu.supported_on(&DiagonalLine::plus());
    let ctx = || json!({"mu": mjson(mu), "sum": sum.to_json()});
    r.expect(sum >= q(2, 1), ctx);
    r.expect((sum == q(2, 1)) == on, ctx);
    Ok(r)
}

/// `(t, t) -> (1, 2t - 1)` and `(t, t) -> (2t - 1, 1)` applied to `mu`.
pub fn side_images(mu: &M) -> (M, M) {
    let two = q(2, 1);
    let one = q(1, 1);
    let r = push_forward(|x| Point2::new(one.clone(), two.clone() * x.x1.clone() - one.clone()), mu);
    let u = push_forward(|x| Point2::new(two.clone() * x.x1.clone() - one.clone(), one.clone()), mu);
    (r, u)
}

/// `J(nu) = d^p(mu_r, nu) + d^p(nu, mu_u) >= 2^(1-p) d^p(mu_r, mu_u)` with
/// equality at `nu = mu` and strict inequality at every other sample.
pub fn check_q_functional(mu: &M, p: u32, nu_samples: &[M]) -> Result<CheckReport> {
    if p < 2 {
        return Err(Error::Precondition("the functional bound needs p > 1".into()));
    }
    let segment = mu.supported_on(&DiagonalLine::plus())
        && mu.points().all(|x| x.x1 >= Rational::zero() && x.x1 <= Rational::one());
    if !segment {
        return Err(Error::Precondition("measure must live on the segment [(0,0), (1,1)]".into()));
    }
    let mut r = CheckReport::new(format!("q-functional p={p}"));
    let (mu_r, mu_u) = side_images(mu);
    let dru = w(&mu_r, &mu_u, p)?;
    let bound = dru.clone() / two_pow(p - 1);
    // same-parameter coupling: (1, 2t-1) -> (2t-1, 1) costs (2 - 2t)^p
    let monotone = mu
        .atoms()
        .iter()
        .fold(Rational::zero(), |acc, a| acc + a.weight.clone() * (q(2, 1) - q(2, 1) * a.point.x1.clone()).powi(p));
    r.expect_eq(&dru, &monotone, || json!({"mu": mjson(mu), "reason": "monotone coupling"}));
    let j = |nu: &M| -> Result<Rational> { Ok(w(&mu_r, nu, p)? + w(nu, &mu_u, p)?) };

    r.instances += 1;
    r.expect_eq(&j(mu)?, &bound, || json!({"mu": mjson(mu), "p": p}));
    r.instances += 1;
    r.expect(j(&mu_r)? >= bound, || json!({"reason": "one-sided collapse", "mu": mjson(mu)}));
    for nu in nu_samples {
        r.instances += 1;
        let v = j(nu)?;
        if nu == mu {
            r.expect_eq(&v, &bound, || json!({"nu": mjson(nu)}));
        } else {
            r.expect(v > bound, || json!({"mu": mjson(mu), "nu": mjson(nu), "p": p, "J": v.to_json(), "bound": bound.to_json()}));
        }
    }
    Ok(r)
}

/// `min over lambda of |1 - lambda|^p + |lambda|^p = 2^(1-p)`, attained at
/// one half, by a sweep over `[-1, 2]` at step `1e-4`.
pub fn check_scalar_lemma(p: u32) -> CheckReport {
    let mut r = CheckReport::new(format!("scalar-lemma p={p}"));
    r.instances += 1;
    let pf = f64::from(p);
    let (mut best, mut arg) = (f64::INFINITY, 0.0);
    for k in 0..=30_000 {
        let l = -1.0 + f64::from(k) / 10_000.0;
        let v = (1.0 - l).abs().powf(pf) + l.abs().powf(pf);
        if v < best {
            best = v;
            arg = l;
        }
    }
    let want = 2f64.powf(1.0 - pf);
    r.max_residual = (best - want).abs();
    r.expect(r.max_residual < 1e-9 && (arg - 0.5).abs() < 1e-4, || {
        json!({"min": best, "argmin": arg, "expected": want})
    });
    r
}

/// `mu_a = a delta_(1,-1) + (1 - a) delta_(-1,1)`.
pub fn corner_measure(alpha: &Rational) -> Result<M> {
    DiscreteMeasure::from_pairs(vec![
        (Point2::from_i64(1, -1), alpha.clone()),
        (Point2::from_i64(-1, 1), Rational::one() - alpha.clone()),
    ])
}

/// Reports `d_W1(mu_a, mu_b)`, which equals `2|a - b|`.
pub fn check_corner_interval(alpha: &Rational, beta: &Rational) -> Result<CheckReport> {
    let open = |v: &Rational| *v > Rational::zero() && *v < Rational::one();
    if !open(alpha) || !open(beta) {
        return Err(Error::Precondition("alpha and beta must lie in (0, 1)".into()));
    }
    let mut r = CheckReport::new("corner-interval");
    r.instances += 1;
    let d = w(&corner_measure(alpha)?, &corner_measure(beta)?, 1)?;
    let expected = q(2, 1) * (alpha.clone() - beta.clone()).abs();
    r.expect_eq(&d, &expected, || json!({"alpha": alpha.to_json(), "beta": beta.to_json()}));
    r.note("computed d_W1(mu_a, mu_b) = 2|a - b|, consistent with the metric 2|.| on (0,1); an inline value |a - b| would be off by a factor 2");
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pi(a: i64, b: i64) -> P {
        Point2::from_i64(a, b)
    }

    type Spec = ((i64, i64), (i64, i64));

    fn m(pairs: &[Spec]) -> M {
        DiscreteMeasure::from_pairs(pairs.iter().map(|&((a, b), (n, d))| (pi(a, b), q(n, d))).collect()).unwrap()
    }

    fn nus() -> Vec<M> {
        vec![
            m(&[((2, 0), (1, 1))]),
            m(&[((1, 3), (1, 3)), ((-2, 1), (2, 3))]),
            m(&[((0, 0), (1, 4)), ((3, -1), (1, 4)), ((1, 1), (1, 2))]),
        ]
    }

    #[test]
    fn diag_support_examples() {
        let g = SearchGrid::default();
        let r = check_diag_support_char(&m(&[((0, 0), (1, 2)), ((1, 1), (1, 2))]), &nus(), &g).unwrap();
        assert!(r.passed() && r.instances == 3, "{r:?}");
        let r = check_diag_support_char(&m(&[((4, -2), (1, 1))]), &nus(), &g).unwrap();
        assert!(r.passed());
        let r = check_diag_support_char(&m(&[((0, 0), (1, 2)), ((2, 0), (1, 2))]), &nus(), &g).unwrap();
        assert!(r.passed() && r.name.contains("converse") && r.grid.is_some(), "{r:?}");
    }

    #[test]
    fn same_diag_examples() {
        let g = SearchGrid::default();
        let a = m(&[((0, 0), (1, 2)), ((1, 1), (1, 2))]);
        let b = m(&[((-2, -2), (1, 3)), ((3, 3), (2, 3))]);
        assert!(check_same_diag_char(&a, &b, &nus(), &g).unwrap().passed());
        assert!(check_same_diag_char(&a, &a, &nus(), &g).unwrap().passed());
        let shifted = m(&[((0, 1), (1, 2)), ((1, 2), (1, 2))]);
        let r = check_same_diag_char(&a, &shifted, &nus(), &g).unwrap();
        assert!(r.passed() && r.name.contains("converse"), "{r:?}");
        let off = m(&[((0, 0), (1, 2)), ((2, 0), (1, 2))]);
        assert!(check_same_diag_char(&a, &off, &nus(), &g).is_err());
    }

    #[test]
    fn dirac_char_examples() {
        let g = SearchGrid::default();
        assert!(check_dirac_char(&m(&[((3, -2), (1, 1))]), &nus(), 2, &g).unwrap().passed());
        let r = check_dirac_char(&m(&[((0, 0), (1, 2)), ((1, 1), (1, 2))]), &nus(), 2, &g).unwrap();
        assert!(r.passed() && r.name.contains("converse"), "{r:?}");
        let d = m(&[((1, 1), (1, 1))]);
        assert!(check_dirac_char(&d, std::slice::from_ref(&d), 3, &g).unwrap().passed());
        assert!(check_dirac_char(&d, &[], 1, &g).is_err());
    }

    #[test]
    fn unique_geodesic_examples() {
        let o = pi(0, 0);
        let r = check_unique_geodesic(&o, &m(&[((1, 1), (1, 2)), ((-2, 2), (1, 2))]), 2).unwrap();
        assert!(r.passed(), "{r:?}");
        let r = check_unique_geodesic(&o, &m(&[((2, 0), (1, 1))]), 2).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(check_unique_geodesic(&o, &m(&[((0, 0), (1, 1))]), 3).unwrap().passed());
        // two distinct midpoints of delta_0 and delta_(2,0)
        let a = DiscreteMeasure::dirac(Point2::new(q(1, 1), q(1, 2)));
        let b = DiscreteMeasure::dirac(Point2::new(q(1, 1), q(-1, 2)));
        let x = DiscreteMeasure::dirac(o);
        let y = m(&[((2, 0), (1, 1))]);
        for mid in [a, b] {
            assert_eq!(w(&x, &mid, 2).unwrap(), q(1, 1));
            assert_eq!(w(&mid, &y, 2).unwrap(), q(1, 1));
        }
    }

    #[test]
    fn w2_table() {
        let r = reproduce_w2_table().unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(r.max_residual < 1e-9);
    }

    #[test]
    fn sweep_finds_known_roots() {
        let roots = sweep_roots(|t| (t - 0.5) * (t + 1.25), -3.0, 3.0, 1e-3, 1e-12);
        assert_eq!(roots.len(), 2);
        assert!((roots[0] + 1.25).abs() < 1e-9 && (roots[1] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn q_sides_examples() {
        let left = m(&[((-1, 0), (1, 2)), ((-1, 1), (1, 2))]);
        let right = m(&[((1, -1), (1, 3)), ((1, 1), (2, 3))]);
        for p in 1..=3 {
            let r = check_opposite_sides(&left, &right, p).unwrap();
            assert!(r.passed() && r.notes.is_empty(), "{r:?}");
        }
        assert!(check_opposite_sides(&left, &left, 2).unwrap().passed());
        let inner = m(&[((0, 0), (1, 2)), ((1, 1), (1, 2))]);
        assert!(check_opposite_sides(&left, &inner, 1).unwrap().passed());
        // a corner against two adjacent sides still reaches 2
        let corner = m(&[((-1, -1), (1, 1))]);
        let adjacent = m(&[((1, 0), (1, 2)), ((0, 1), (1, 2))]);
        let r = check_opposite_sides(&corner, &adjacent, 1).unwrap();
        assert!(r.passed() && !r.notes.is_empty());
        assert!(check_opposite_sides(&m(&[((2, 0), (1, 1))]), &left, 1).is_err());
    }

    #[test]
    fn saturation_examples() {
        assert!(check_diag_saturation(&m(&[((-1, -1), (1, 2)), ((0, 0), (1, 2))])).unwrap().passed());
        assert!(check_diag_saturation(&m(&[((1, -1), (1, 1))])).unwrap().passed());
        assert!(check_diag_saturation(&m(&[((0, 0), (1, 1))])).unwrap().passed());
    }

    #[test]
    fn q_functional_example() {
        let mu = m(&[((0, 0), (1, 2)), ((1, 1), (1, 2))]);
        let (r_, u_) = side_images(&mu);
        assert_eq!(w(&r_, &u_, 2).unwrap(), q(2, 1));
        let others = vec![mu.clone(), m(&[((0, 0), (1, 1))]), m(&[((1, 0), (1, 2)), ((0, 1), (1, 2))])];
        let r = check_q_functional(&mu, 2, &others).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(check_scalar_lemma(2).passed() && check_scalar_lemma(3).passed());
    }

    #[test]
    fn corner_examples() {
        assert!(check_corner_interval(&q(1, 4), &q(3, 4)).unwrap().passed());
        assert!(check_corner_interval(&q(3, 10), &q(4, 10)).unwrap().passed());
        assert!(check_corner_interval(&q(1, 2), &q(1, 2)).unwrap().passed());
        assert_eq!(
            w(&corner_measure(&q(1, 4)).unwrap(), &corner_measure(&q(3, 4)).unwrap(), 1).unwrap(),
            q(1, 1)
        );
        assert!(check_corner_interval(&q(0, 1), &q(1, 2)).is_err());
    }
}
