//! Point geometry of the plane and of the square `Q = [-1, 1]^2` under the
//! maximum metric `d_m(x, y) = max(|x1 - y1|, |x2 - y2|)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{scalar_from_json, Scalar};

/// Ambient space of a construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    /// The whole plane.
    #[default]
    Plane,
    /// The square `[-1, 1]^2`; results leaving it are errors.
    Square,
}

#[derive(Clone, Debug, PartialEq, PartialOrd)]
pub struct Point2<S> {
    pub x1: S,
    pub x2: S,
}

impl<S: Scalar> Point2<S> {
    pub fn new(x1: S, x2: S) -> Self {
        Point2 { x1, x2 }
    }

    pub fn origin() -> Self {
        Point2::new(S::zero(), S::zero())
    }

    pub fn from_i64(x1: i64, x2: i64) -> Self {
        Point2::new(S::from_i64(x1), S::from_i64(x2))
    }

    pub fn add(&self, other: &Self) -> Self {
        Point2::new(
            self.x1.clone() + other.x1.clone(),
            self.x2.clone() + other.x2.clone(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        Point2::new(
            self.x1.clone() - other.x1.clone(),
            self.x2.clone() - other.x2.clone(),
        )
    }

    pub fn scale(&self, t: &S) -> Self {
        Point2::new(self.x1.clone() * t.clone(), self.x2.clone() * t.clone())
    }

    /// `(1 - s) a + s b`.
    pub fn lerp(a: &Self, b: &Self, s: &S) -> Self {
        a.add(&b.sub(a).scale(s))
    }

    pub fn midpoint(&self, other: &Self) -> Self {
        Point2::new(
            (self.x1.clone() + other.x1.clone()).half(),
            (self.x2.clone() + other.x2.clone()).half(),
        )
    }

    /// Max-norm of the point viewed as a vector.
    pub fn norm(&self) -> S {
        self.x1.abs().max_of(self.x2.abs())
    }

    pub fn approx_eq(&self, other: &Self) -> bool {
        self.x1.approx_eq(&other.x1) && self.x2.approx_eq(&other.x2)
    }

    pub fn in_square(&self) -> bool {
        let one = S::one();
        self.x1.abs().le_approx(&one) && self.x2.abs().le_approx(&one)
    }

    /// Interior of the square: both coordinates strictly inside `(-1, 1)`.
    pub fn in_open_square(&self) -> bool {
        let one = S::one();
        self.x1.abs().lt_strict(&one) && self.x2.abs().lt_strict(&one)
    }

    pub fn check_domain(&self, domain: Domain) -> Result<()> {
        match domain {
            Domain::Square if !self.in_square() => Err(Error::OutsideSquare(
                self.x1.to_text(),
                self.x2.to_text(),
            )),
            _ => Ok(()),
        }
    }

    pub fn to_f64(&self) -> Point2<f64> {
        Point2::new(self.x1.to_f64(), self.x2.to_f64())
    }

    /// JSON form `[x1, x2]`; rationals are written as `"p/q"` strings.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(vec![self.x1.to_json(), self.x2.to_json()])
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        match v.as_array().map(Vec::as_slice) {
            Some([a, b]) => Ok(Point2::new(scalar_from_json(a)?, scalar_from_json(b)?)),
            _ => Err(Error::Parse(format!("expected a point [x1, x2], found {v}"))),
        }
    }

    /// Parses `"x1,x2"`.
    pub fn parse_pair(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("expected `x1,x2`, found `{s}`")))?;
        Ok(Point2::new(S::parse_scalar(a)?, S::parse_scalar(b)?))
    }
}

impl<S: Scalar> fmt::Display for Point2<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x1, self.x2)
    }
}

/// Maximum metric.
pub fn dm<S: Scalar>(x: &Point2<S>, y: &Point2<S>) -> S {
    let d1 = (x.x1.clone() - y.x1.clone()).abs();
    let d2 = (x.x2.clone() - y.x2.clone()).abs();
    d1.max_of(d2)
}

/// Sign of a diagonal line's slope.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Slope {
    Plus,
    Minus,
}

impl Slope {
    pub fn sign<S: Scalar>(self) -> S {
        match self {
            Slope::Plus => S::one(),
            Slope::Minus => -S::one(),
        }
    }
}

/// The line `x2 = eps * x1 + a` with `eps` in `{-1, +1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalLine<S> {
    pub eps: Slope,
    pub a: S,
}

impl<S: Scalar> DiagonalLine<S> {
    pub fn new(eps: Slope, a: S) -> Self {
        DiagonalLine { eps, a }
    }

    /// `L+ = {x2 = x1}`.
    pub fn plus() -> Self {
        DiagonalLine::new(Slope::Plus, S::zero())
    }

    /// `L- = {x2 = -x1}`.
    pub fn minus() -> Self {
        DiagonalLine::new(Slope::Minus, S::zero())
    }

    /// The diagonal line of the given slope passing through `x`.
    pub fn through(eps: Slope, x: &Point2<S>) -> Self {
        let a = x.x2.clone() - eps.sign::<S>() * x.x1.clone();
        DiagonalLine::new(eps, a)
    }

    /// Signed offset `x2 - (eps x1 + a)`; zero exactly on the line.
    pub fn offset(&self, y: &Point2<S>) -> S {
        y.x2.clone() - (self.eps.sign::<S>() * y.x1.clone() + self.a.clone())
    }

    pub fn contains(&self, y: &Point2<S>) -> bool {
        self.offset(y).is_zero_approx()
    }

    /// Point of the line with first coordinate `t`.
    pub fn at(&self, t: S) -> Point2<S> {
        let x2 = self.eps.sign::<S>() * t.clone() + self.a.clone();
        Point2::new(t, x2)
    }

    /// Parses `"+,a"` or `"-,a"`.
    pub fn parse(s: &str) -> Result<Self> {
        let (e, a) = s
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("expected `+,a` or `-,a`, found `{s}`")))?;
        let eps = match e.trim() {
            "+" | "+1" | "1" => Slope::Plus,
            "-" | "-1" => Slope::Minus,
            other => return Err(Error::Parse(format!("invalid slope `{other}`"))),
        };
        Ok(DiagonalLine::new(eps, S::parse_scalar(a)?))
    }
}

impl<S: Scalar> fmt::Display for DiagonalLine<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = match self.eps {
            Slope::Plus => '+',
            Slope::Minus => '-',
        };
        write!(f, "{e},{}", self.a.to_text())
    }
}

/// Nearest point of `line` to `y` in the maximum metric.
///
/// The max-metric ball around `y` first touches a slope-one line at the point
/// where both coordinate gaps are equal, which gives the closed forms below.
pub fn project_point<S: Scalar>(line: &DiagonalLine<S>, y: &Point2<S>) -> Point2<S> {
    let a = line.a.clone();
    match line.eps {
        Slope::Plus => {
            let s = y.x1.clone() + y.x2.clone();
            Point2::new((s.clone() - a.clone()).half(), (s + a).half())
        }
        Slope::Minus => {
            let d = y.x1.clone() - y.x2.clone();
            Point2::new((d.clone() + a.clone()).half(), (a - d).half())
        }
    }
}

/// Direction allocation `e(y)` relative to a diagonal line: `(-eps, 1)` on or
/// above the line, `(eps, -1)` strictly below it.
pub fn direction_alloc<S: Scalar>(line: &DiagonalLine<S>, y: &Point2<S>) -> Point2<S> {
    let eps: S = line.eps.sign();
    if line.offset(y) >= S::zero() {
        Point2::new(-eps, S::one())
    } else {
        Point2::new(eps, -S::one())
    }
}

/// `y + t e(y)`.
pub fn push_along_alloc<S: Scalar>(line: &DiagonalLine<S>, y: &Point2<S>, t: &S) -> Point2<S> {
    y.add(&direction_alloc(line, y).scale(t))
}

/// Dilation by factor two about `center`: `center + 2 (y - center)`.
pub fn dilate<S: Scalar>(center: &Point2<S>, y: &Point2<S>, domain: Domain) -> Result<Point2<S>> {
    let out = center.add(&y.sub(center).scale(&S::from_i64(2)));
    out.check_domain(domain)?;
    Ok(out)
}

/// True iff `x` and `y` lie on a common diagonal line, i.e. `|dx1| = |dx2|`.
pub fn same_diagonal<S: Scalar>(x: &Point2<S>, y: &Point2<S>) -> bool {
    let d = y.sub(x);
    d.x1.abs().approx_eq(&d.x2.abs())
}

/// Additive saturation `d(x, z) = d(x, y) + d(y, z)` of the triangle
/// inequality. The exponent is accepted for call-site symmetry: saturation of
/// the metric triangle inequality is the pointwise condition for every `p`.
pub fn triangle_saturates<S: Scalar>(
    x: &Point2<S>,
    y: &Point2<S>,
    z: &Point2<S>,
    _p: crate::scalar::Exponent,
) -> bool {
    dm(x, z).approx_eq(&(dm(x, y) + dm(y, z)))
}

/// The eight linear symmetries of the square.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SquareSymmetry {
    Identity,
    Rot90,
    Rot180,
    Rot270,
    /// `(x1, x2) -> (x1, -x2)`
    FlipX2,
    /// `(x1, x2) -> (-x1, x2)`
    FlipX1,
    /// `(x1, x2) -> (x2, x1)`
    SwapAxes,
    /// `(x1, x2) -> (-x2, -x1)`
    AntiSwap,
}

impl SquareSymmetry {
    pub const ALL: [SquareSymmetry; 8] = [
        SquareSymmetry::Identity,
        SquareSymmetry::Rot90,
        SquareSymmetry::Rot180,
        SquareSymmetry::Rot270,
        SquareSymmetry::FlipX2,
        SquareSymmetry::FlipX1,
        SquareSymmetry::SwapAxes,
        SquareSymmetry::AntiSwap,
    ];

    /// Signed permutation matrix `[[a, b], [c, d]]`.
    fn matrix(self) -> [[i8; 2]; 2] {
        use SquareSymmetry::*;
        match self {
            Identity => [[1, 0], [0, 1]],
            Rot90 => [[0, -1], [1, 0]],
            Rot180 => [[-1, 0], [0, -1]],
            Rot270 => [[0, 1], [-1, 0]],
            FlipX2 => [[1, 0], [0, -1]],
            FlipX1 => [[-1, 0], [0, 1]],
            SwapAxes => [[0, 1], [1, 0]],
            AntiSwap => [[0, -1], [-1, 0]],
        }
    }

    fn from_matrix(m: [[i8; 2]; 2]) -> SquareSymmetry {
        *Self::ALL
            .iter()
            .find(|s| s.matrix() == m)
            .expect("signed permutation matrices of order two form the dihedral group")
    }

    pub fn apply<S: Scalar>(self, x: &Point2<S>) -> Point2<S> {
        let m = self.matrix();
        let term = |c: i8, v: &S| -> S {
            match c {
                1 => v.clone(),
                -1 => -v.clone(),
                _ => S::zero(),
            }
        };
        Point2::new(
            term(m[0][0], &x.x1) + term(m[0][1], &x.x2),
            term(m[1][0], &x.x1) + term(m[1][1], &x.x2),
        )
    }

    /// `self ∘ other`.
    pub fn compose(self, other: SquareSymmetry) -> SquareSymmetry {
        let a = self.matrix();
        let b = other.matrix();
        let mut c = [[0i8; 2]; 2];
        for (i, row) in c.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        SquareSymmetry::from_matrix(c)
    }

    pub fn inverse(self) -> SquareSymmetry {
        let m = self.matrix();
        SquareSymmetry::from_matrix([[m[0][0], m[1][0]], [m[0][1], m[1][1]]])
    }
}

/// Isometry of `(R^2, d_m)`: a square symmetry followed by a translation.
#[derive(Clone, Debug, PartialEq)]
pub struct MaxIsometry<S> {
    pub linear: SquareSymmetry,
    pub shift: Point2<S>,
}

impl<S: Scalar> MaxIsometry<S> {
    pub fn new(linear: SquareSymmetry, shift: Point2<S>) -> Self {
        MaxIsometry { linear, shift }
    }

    pub fn linear(linear: SquareSymmetry) -> Self {
        MaxIsometry::new(linear, Point2::origin())
    }

    pub fn identity() -> Self {
        MaxIsometry::linear(SquareSymmetry::Identity)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &MaxIsometry<S>) -> MaxIsometry<S> {
        MaxIsometry::new(
            self.linear.compose(other.linear),
            self.linear.apply(&other.shift).add(&self.shift),
        )
    }
}

/// `T(x) = linear(x) + shift`. In square mode the shift must vanish.
pub fn apply_isometry<S: Scalar>(
    t: &MaxIsometry<S>,
    x: &Point2<S>,
    domain: Domain,
) -> Result<Point2<S>> {
    if domain == Domain::Square && !t.shift.norm().is_zero_approx() {
        return Err(Error::Precondition(
            "isometries of the square have zero translation".into(),
        ));
    }
    let out = t.linear.apply(x).add(&t.shift);
    out.check_domain(domain)?;
    Ok(out)
}

/// Points `w` of the lattice `x + h (i, j)`, `|i|, |j| <= n`, with
/// `d(x, w) = d(w, y) = d(x, y) / 2`. The lattice step is `h = d(x, y) / n`,
/// so it contains `y` and the midpoint `(x + y) / 2` whenever `n` is even.
pub fn lattice_midpoints<S: Scalar>(x: &Point2<S>, y: &Point2<S>, n: u32) -> Vec<Point2<S>> {
    let d = dm(x, y);
    if d.is_zero_approx() {
        return vec![x.clone()];
    }
    let h = d.clone() / S::from_i64(i64::from(n));
    let half = d.half();
    let n = i64::from(n);
    let mut out = Vec::new();
    for i in -n..=n {
        for j in -n..=n {
            let w = Point2::new(
                x.x1.clone() + h.clone() * S::from_i64(i),
                x.x2.clone() + h.clone() * S::from_i64(j),
            );
            if dm(x, &w).approx_eq(&half) && dm(&w, y).approx_eq(&half) {
                out.push(w);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, Exponent, Rational};

    type P = Point2<Rational>;

    fn p(a: i64, b: i64) -> P {
        Point2::from_i64(a, b)
    }

    #[test]
    fn dm_examples() {
        assert_eq!(dm(&p(0, 0), &p(0, 0)), q(0, 1));
        assert_eq!(dm(&p(-2, -2), &p(2, 0)), q(4, 1));
        assert_eq!(dm(&p(1, -1), &p(-1, 1)), q(2, 1));
    }

    /// Minimizes `t -> d(y, L(t))` over a fine grid of first coordinates.
    fn brute_projection(line: &DiagonalLine<f64>, y: &Point2<f64>) -> Point2<f64> {
        let mut best = (f64::INFINITY, 0.0);
        let steps = 200_000;
        for k in 0..=steps {
            let t = -10.0 + 20.0 * k as f64 / steps as f64;
            let d = dm(y, &line.at(t));
            if d < best.0 {
                best = (d, t);
            }
        }
        line.at(best.1)
    }

    #[test]
    fn projection_examples_against_sweep() {
        let lp = DiagonalLine::<f64>::plus();
        let lm = DiagonalLine::<f64>::minus();
        let y = Point2::new(2.0, 0.0);
        let xp = project_point(&lp, &y);
        assert_eq!(xp, Point2::new(1.0, 1.0));
        assert!(brute_projection(&lp, &y).approx_eq(&xp));
        assert_eq!(dm(&y, &xp), 1.0);
        let xm = project_point(&lm, &y);
        assert_eq!(xm, Point2::new(1.0, -1.0));
        assert!(brute_projection(&lm, &y).approx_eq(&xm));
        assert_eq!(project_point(&lp, &Point2::new(3.0, 3.0)), Point2::new(3.0, 3.0));

        let shifted = DiagonalLine::new(Slope::Minus, 1.5);
        let y = Point2::new(-0.7, 2.3);
        assert!((brute_projection(&shifted, &y).x1 - project_point(&shifted, &y).x1).abs() < 1e-4);
    }

    #[test]
    fn direction_alloc_examples() {
        let lp = DiagonalLine::<Rational>::plus();
        let lm = DiagonalLine::<Rational>::minus();
        assert_eq!(direction_alloc(&lp, &p(2, 0)), p(1, -1));
        assert_eq!(direction_alloc(&lp, &p(0, 5)), p(-1, 1));
        assert_eq!(direction_alloc(&lm, &p(0, 0)), p(1, 1));
        assert_eq!(direction_alloc(&lp, &p(2, 0)).norm(), q(1, 1));
    }

    #[test]
    fn dilation_examples() {
        assert_eq!(dilate(&p(0, 0), &p(1, 2), Domain::Plane).unwrap(), p(2, 4));
        assert_eq!(dilate(&p(1, 1), &p(1, 1), Domain::Square).unwrap(), p(1, 1));
        assert_eq!(dilate(&p(1, 1), &p(0, 0), Domain::Square).unwrap(), p(-1, -1));
        assert!(matches!(
            dilate(&p(0, 0), &p(1, 0), Domain::Square),
            Err(Error::OutsideSquare(..))
        ));
    }

    #[test]
    fn same_diagonal_examples() {
        assert!(same_diagonal(&p(0, 0), &p(3, 3)));
        assert!(!same_diagonal(&p(0, 0), &p(2, 0)));
        assert!(!same_diagonal(&p(1, 1), &p(-1, 1)));
        assert!(same_diagonal(&p(4, 4), &p(4, 4)));
        // two distinct midpoints exist between (0,0) and (2,0)
        assert!(lattice_midpoints(&p(0, 0), &p(2, 0), 8).len() > 1);
        assert_eq!(lattice_midpoints(&p(0, 0), &p(2, -2), 8), vec![p(1, -1)]);
    }

    #[test]
    fn triangle_saturation_examples() {
        let one = Exponent::int(1);
        assert!(triangle_saturates(&p(-1, -1), &p(0, 0), &p(1, 1), one));
        assert!(!triangle_saturates(&p(0, 0), &p(1, 0), &p(0, 2), one));
        assert!(triangle_saturates(&p(0, 0), &p(1, 1), &p(2, 2), Exponent::int(2)));
    }

    #[test]
    fn isometry_examples() {
        let id = MaxIsometry::<Rational>::identity();
        assert_eq!(apply_isometry(&id, &p(3, 4), Domain::Plane).unwrap(), p(3, 4));
        let swap = MaxIsometry::linear(SquareSymmetry::SwapAxes);
        assert_eq!(apply_isometry(&swap, &p(1, -1), Domain::Square).unwrap(), p(-1, 1));
        let rot = MaxIsometry::linear(SquareSymmetry::Rot90);
        assert_eq!(apply_isometry(&rot, &p(1, 0), Domain::Plane).unwrap(), p(0, 1));
        let shifted = MaxIsometry::new(SquareSymmetry::Identity, p(1, 0));
        assert!(apply_isometry(&shifted, &p(0, 0), Domain::Square).is_err());
    }

    #[test]
    fn square_symmetries_form_a_group() {
        for a in SquareSymmetry::ALL {
            assert_eq!(a.compose(a.inverse()), SquareSymmetry::Identity);
            for b in SquareSymmetry::ALL {
                let ab = a.compose(b);
                let x = p(3, -7);
                assert_eq!(ab.apply(&x), a.apply(&b.apply(&x)));
            }
        }
        assert_eq!(
            SquareSymmetry::Rot90.compose(SquareSymmetry::Rot90),
            SquareSymmetry::Rot180
        );
    }

    #[test]
    fn line_parsing() {
        let l = DiagonalLine::<Rational>::parse("+,0").unwrap();
        assert_eq!(l, DiagonalLine::plus());
        let l = DiagonalLine::<Rational>::parse("-,1/2").unwrap();
        assert_eq!(l.a, q(1, 2));
        assert!(DiagonalLine::<Rational>::parse("x,0").is_err());
    }
}
