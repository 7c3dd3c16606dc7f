use serde_json::json;

use crate::error::Result;
use crate::geometry::{dm, push_along_alloc, DiagonalLine, Point2};
use crate::measure::{DiscreteMeasure, GridMeasure};
use crate::scalar::{q, Exponent, Rational, Scalar};
use crate::transport::{brute_force_wasserstein, wasserstein, wasserstein_pow};
use crate::wgeom::{grid_perturbation, project_measure, radon, radon_invert_f};

use super::checks::*;
use super::{par_map, CheckReport, Sampler, SuiteConfig};

type M = DiscreteMeasure<Rational>;

fn sampler(cfg: &SuiteConfig, tag: u64) -> Sampler {
    Sampler::new(cfg.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ tag)
}

fn search_grid(cfg: &SuiteConfig) -> SearchGrid {
    SearchGrid {
        resolution: cfg.grid_resolution.max(1),
    }
}

/// Runs `f` over `items` in parallel and folds the results into `into`.
fn gather<T: Send>(
    into: &mut CheckReport,
    items: Vec<T>,
    f: impl Fn(T) -> Result<CheckReport> + Sync,
) -> Result<()> {
    for r in par_map(items, f) {
        into.absorb(r?);
    }
    Ok(())
}

/// Network simplex against spanning-tree vertex enumeration.
pub fn suite_oracle_agreement(cfg: &SuiteConfig, n: usize) -> Result<Vec<CheckReport>> {
    let mut s = sampler(cfg, 1);
    let items: Vec<(M, M, u32)> = (0..n)
        .map(|k| (s.measure(5), s.measure(5), 1 + (k % 3) as u32))
        .collect();
    let mut r = CheckReport::new("oracle-agreement");
    gather(&mut r, items, |(mu, nu, p)| {
        let mut r = CheckReport::new("");
        r.instances = 1;
        let exp = Exponent::int(p);
        let solved = wasserstein(&mu, &nu, exp)?;
        let oracle = brute_force_wasserstein(&mu, &nu, exp)?;
        let ctx = || json!({"mu": mu.to_json(), "nu": nu.to_json(), "p": p});
        r.expect_eq(&solved.cost, &oracle.cost, ctx);
        r.expect_eq(&solved.plan.cost_pow(exp)?, &solved.cost, ctx);
        r.expect(oracle.optimal_plans.iter().any(|pl| pl.cost_pow(exp).ok() == Some(oracle.cost.clone())), ctx);
        Ok(r)
    })?;
    Ok(vec![r])
}

/// The metric projection onto a diagonal line is the closest measure on it.
pub fn suite_projection(cfg: &SuiteConfig, n: usize) -> Result<Vec<CheckReport>> {
    let mut s = sampler(cfg, 2);
    let items: Vec<_> = (0..n)
        .map(|k| {
            let line = s.line();
            let mu = s.measure(4);
            let nu = if k % 5 == 0 { project_measure(&line, &mu) } else { s.measure_on_line(&line, 4) };
            (line, mu, nu, 1 + (k % 3) as u32)
        })
        .collect();
    let mut r = CheckReport::new("projection");
    gather(&mut r, items, |(line, mu, nu, p)| {
        let mut r = CheckReport::new("");
        r.instances = 1;
        let exp = Exponent::int(p);
        let proj = project_measure(&line, &mu);
        let best = wasserstein_pow(&mu, &proj, exp)?;
        let other = wasserstein_pow(&mu, &nu, exp)?;
        let ctx = || json!({"mu": mu.to_json(), "nu": nu.to_json(), "p": p, "best": best.to_json(), "other": other.to_json()});
        r.expect(proj.supported_on(&line), ctx);
        if nu == proj {
            r.expect_eq(&best, &other, ctx);
        } else {
            r.expect(best < other, ctx);
        }
        Ok(r)
    })?;
    Ok(vec![r])
}

/// `d(x, y + t e(y)) = d(x, y) + t` for `x` on the line and `t >= 0`.
pub fn suite_crucial_identity(cfg: &SuiteConfig, n: usize) -> Result<Vec<CheckReport>> {
    let mut s = sampler(cfg, 3);
    let mut r = CheckReport::new("crucial-identity");
    for _ in 0..n {
        let line = s.line();
        let x = line.at(s.coord(3));
        let y = s.point();
        let t = q(s.int(0, 16), 4);
        r.instances += 1;
        let moved = push_along_alloc(&line, &y, &t);
        r.expect_eq(&dm(&x, &moved), &(dm(&x, &y) + t.clone()), || {
            json!({"line": line.to_string(), "x": x.to_json(), "y": y.to_json(), "t": t.to_json()})
        });
    }
    Ok(vec![r])
}

fn nus(s: &mut Sampler, k: usize) -> Vec<M> {
    (0..k).map(|_| s.measure(3)).collect()
}

fn off_diagonal(s: &mut Sampler) -> M {
    loop {
        let n = s.int(2, 4) as usize;
        let mu = s.measure_with_atoms(n);
        if diagonal_line_of(&mu.points().cloned().collect::<Vec<_>>()).is_none() {
            return mu;
        }
    }
}

/// Symmetric measures for `p = 1` exist exactly for measures on diagonal
/// lines.
pub fn suite_diag_char(cfg: &SuiteConfig, forward: usize, converse: usize) -> Result<Vec<CheckReport>> {
    let mut s = sampler(cfg, 4);
    let grid = search_grid(cfg);
    let fwd: Vec<_> = (0..forward)
        .map(|_| {
            let line = s.line();
            (s.measure_on_line(&line, 4), nus(&mut s, 1))
        })
        .collect();
    let conv: Vec<_> = (0..converse).map(|_| off_diagonal(&mut s)).collect();
    let mut f = CheckReport::new("diag-char forward");
    gather(&mut f, fwd, |(mu, nus)| check_diag_support_char(&mu, &nus, &grid))?;
    let mut c = CheckReport::new("diag-char converse");
    gather(&mut c, conv, |mu| check_diag_support_char(&mu, &[], &grid))?;
    Ok(vec![f, c])
}

/// Two measures admit a common aligned partner exactly when they share a
/// diagonal line.
pub fn suite_same_diag(cfg: &SuiteConfig, forward: usize, converse: usize) -> Result<Vec<CheckReport>> {
    let mut s = sampler(cfg, 5);
    let grid = search_grid(cfg);
    let fwd: Vec<_> = (0..forward)
        .map(|_| {
            let line = s.line();
            (s.measure_on_line(&line, 3), s.measure_on_line(&line, 3), nus(&mut s, 2))
        })
        .collect();
    let conv: Vec<_> = (0..converse)
        .map(|_| loop {
            let (l1, l2) = (s.line(), s.line());
            let (a, b) = (s.measure_on_line(&l1, 3), s.measure_on_line(&l2, 3));
            let mut all: Vec<_> = a.points().cloned().collect();
            all.extend(b.points().cloned());
            if diagonal_line_of(&all).is_none() && has_non_codiagonal_pair(&a, &b) {
                break (a, b);
            }
        })
        .collect();
    let mut f = CheckReport::new("same-diag forward");
    gather(&mut f, fwd, |(a, b, nus)| check_same_diag_char(&a, &b, &nus, &grid))?;
    let mut c = CheckReport::new("same-diag converse");
    gather(&mut c, conv, |(a, b)| check_same_diag_char(&a, &b, &[], &grid))?;
    Ok(vec![f, c])
}

/// Symmetric measures for `p > 1` exist exactly for Diracs.
pub fn suite_dirac_char(cfg: &SuiteConfig, forward: usize, converse: usize) -> Result<Vec<CheckReport>> {
    let mut s = sampler(cfg, 6);
    let grid = search_grid(cfg);
    let mut out = Vec::new();
    for p in [2u32, 3] {
        let fwd: Vec<_> = (0..forward)
            .map(|_| (DiscreteMeasure::dirac(s.point()), nus(&mut s, 1)))
            .collect();
        let conv: Vec<_> = (0..converse)
            .map(|_| {
                let n = s.int(2, 4) as usize;
                s.measure_with_atoms(n)
            })
            .collect();
        let mut f = CheckReport::new(format!("dirac-char forward p={p}"));
        gather(&mut f, fwd, |(mu, nus)| check_dirac_char(&mu, &nus, p, &grid))?;
        let mut c = CheckReport::new(format!("dirac-char converse p={p}"));
        gather(&mut c, conv, |mu| check_dirac_char(&mu, &[], p, &grid))?;
        out.push(f);
        out.push(c);
    }
    Ok(out)
}

/// Perturbation of a family member against a grid measure with the same
/// Radon image: three equal costs and a unique minimizer.
pub fn suite_perturbation(cfg: &SuiteConfig, n: usize) -> Result<Vec<CheckReport>> {
    let mut s = sampler(cfg, 7);
    let items: Vec<_> = (0..n)
        .map(|k| {
            let mu = s.family_measure(2 + k % 2);
            let mut xi = GridMeasure::of_measure(&mu);
            let i = s.int(0, mu.len() as i64 - 1) as usize;
            let kk = (i + 1 + s.int(0, mu.len() as i64 - 2) as usize) % mu.len();
            let w: Vec<Rational> = mu.weights().cloned().collect();
            let b = w[i].clone().min_of(w[kk].clone()).half();
            xi.cycle_shift(i, kk, &b).expect("half the smaller weight is available");
            let a = (w[i].clone() - b.clone()).min_of(b).half();
            let offset = xi.min_gap() / q(4, 1);
            let side = if s.coin() { offset } else { -offset };
            let s0 = xi.plus[i].clone() + side;
            let x_prime = Point2::new(s0.clone(), s0);
            (mu, xi, a, x_prime, 1 + (k % 3) as u32)
        })
        .collect();
    let mut r = CheckReport::new("perturbation");
    gather(&mut r, items, |(mu, xi, a, x_prime, p)| {
        let mut r = CheckReport::new("");
        r.instances = 1;
        let triple = grid_perturbation(&mu, &xi, &a, &x_prime)?;
        let ctx = || json!({"mu": mu.to_json(), "triple": triple.to_json(), "p": p});
        for pp in 1..=3 {
            let c = triple.costs(Exponent::int(pp))?;
            for cost in &c.costs {
                r.expect_eq(cost, &c.expected, ctx);
            }
        }
        let u = triple.uniqueness(Exponent::int(p))?;
        r.expect(u.below.is_empty() && u.minimizers == vec![triple.mu_prime.clone()], || {
            json!({
                "mu": mu.to_json(),
                "triple": triple.to_json(),
                "p": p,
                "minimizers": u.minimizers.iter().map(M::to_json).collect::<Vec<_>>(),
                "below": u.below.len(),
            })
        });
        Ok(r)
    })?;
    Ok(vec![r])
}

/// Inversion on the family recovers the measure; off the family a grid
/// measure shares the image.
pub fn suite_radon(cfg: &SuiteConfig, n: usize) -> Result<Vec<CheckReport>> {
    let mut s = sampler(cfg, 8);
    let mut r = CheckReport::new("radon-roundtrip");
    for k in 0..n {
        let mu = s.family_measure(1 + k % 5);
        r.instances += 1;
        let img = radon(&mu);
        let back = radon_invert_f(&img)?;
        r.expect(back == mu, || json!({"mu": mu.to_json(), "back": back.to_json()}));
        if mu.len() >= 2 {
            let mut xi = GridMeasure::of_measure(&mu);
            let w: Vec<Rational> = mu.weights().cloned().collect();
            xi.cycle_shift(0, 1, &w[0].clone().min_of(w[1].clone()).half())?;
            let xi = xi.to_measure()?;
            r.expect(xi != mu && radon(&xi) == img, || json!({"mu": mu.to_json(), "xi": xi.to_json()}));
        }
    }
    Ok(vec![r])
}

fn on_side(s: &mut Sampler, axis: u8, sign: i64, max: usize) -> M {
    let n = s.int(1, max as i64) as usize;
    let pts: Vec<_> = (0..n)
        .map(|_| {
            let t = s.coord(1);
            let v = q(sign, 1);
            if axis == 0 {
                Point2::new(v, t)
            } else {
                Point2::new(t, v)
            }
        })
        .collect();
    let w = s.weights(pts.len());
    DiscreteMeasure::from_pairs(pts.into_iter().zip(w).collect()).expect("weights sum to one")
}

fn with_interior(s: &mut Sampler) -> M {
    loop {
        let mu = s.measure_in_square(3);
        if mu.points().any(Point2::in_open_square) {
            return mu;
        }
    }
}

/// Distance 2 between opposite sides of the square, less with interior atoms.
pub fn suite_q_sides(cfg: &SuiteConfig, n: usize) -> Result<Vec<CheckReport>> {
    let mut s = sampler(cfg, 9);
    let mut items = Vec::new();
    for k in 0..n {
        let axis = (k % 2) as u8;
        let sign = if s.coin() { 1 } else { -1 };
        let p = 1 + (k % 3) as u32;
        items.push((on_side(&mut s, axis, sign, 3), on_side(&mut s, axis, -sign, 3), p));
    }
    let mut opposite = CheckReport::new("q-sides opposite");
    gather(&mut opposite, items, |(a, b, p)| check_opposite_sides(&a, &b, p))?;

    let items: Vec<_> = (0..n)
        .map(|k| (with_interior(&mut s), s.measure_in_square(3), 1 + (k % 3) as u32))
        .collect();
    let mut interior = CheckReport::new("q-sides interior");
    gather(&mut interior, items, |(a, b, p)| check_opposite_sides(&a, &b, p))?;

    // a corner against the two adjacent sides: equality without opposite sides
    let mut extra = CheckReport::new("q-sides pairwise saturation");
    let corner = DiscreteMeasure::dirac(Point2::from_i64(-1, -1));
    let adjacent = DiscreteMeasure::from_pairs(vec![(Point2::from_i64(1, 0), q(1, 2)), (Point2::from_i64(0, 1), q(1, 2))])?;
    for p in 1..=3 {
        extra.absorb(check_opposite_sides(&corner, &adjacent, p)?);
    }
    Ok(vec![opposite, interior, extra])
}

/// Saturation of the triangle inequality between opposite corners.
pub fn suite_q_saturation(cfg: &SuiteConfig, n: usize) -> Result<Vec<CheckReport>> {
    let mut s = sampler(cfg, 10);
    let mut r = CheckReport::new("q-saturation");
    let line = DiagonalLine::plus();
    for k in 0..n {
        let mu = if k % 2 == 0 {
            let count = s.int(1, 4) as usize;
            let pts: Vec<_> = (0..count).map(|_| line.at(s.coord(1))).collect();
            let w = s.weights(count);
            DiscreteMeasure::from_pairs(pts.into_iter().zip(w).collect())?
        } else {
            s.measure_in_square(4)
        };
        r.absorb(check_diag_saturation(&mu)?);
    }
    Ok(vec![r])
}

fn clamp_unit(v: Rational) -> Rational {
    v.max_of(-Rational::one()).min_of(Rational::one())
}

fn perturb(s: &mut Sampler, mu: &M) -> M {
    let mut pairs: Vec<(Point2<Rational>, Rational)> =
        mu.atoms().iter().map(|a| (a.point.clone(), a.weight.clone())).collect();
    match s.int(0, 2) {
        0 => {
            let k = s.int(0, pairs.len() as i64 - 1) as usize;
            let (d1, d2) = (q(s.int(-2, 2), 8), q(s.int(-2, 2), 8));
            let p = &pairs[k].0;
            pairs[k].0 = Point2::new(clamp_unit(p.x1.clone() + d1), clamp_unit(p.x2.clone() + d2));
        }
        1 => {
            let other = s.point_in_square();
            let w = q(s.int(1, 4), 8);
            for pair in &mut pairs {
                pair.1 = pair.1.clone() * (Rational::one() - w.clone());
            }
            pairs.push((other, w));
        }
        _ => return s.measure_in_square(3),
    }
    DiscreteMeasure::from_pairs(pairs).expect("mass is preserved")
}

/// The lower bound `2^(1-p) d^p(mu_r, mu_u)` of the corner functional.
pub fn suite_q_functional(cfg: &SuiteConfig, n: usize) -> Result<Vec<CheckReport>> {
    let mut s = sampler(cfg, 11);
    let mut out = Vec::new();
    for p in [2u32, 3] {
        let per = 10;
        let items: Vec<_> = (0..n.div_ceil(per))
            .map(|_| {
                let mu = s.measure_on_unit_diagonal(3);
                let mut others = Vec::new();
                while others.len() < per {
                    let nu = perturb(&mut s, &mu);
                    if nu != mu {
                        others.push(nu);
                    }
                }
                (mu, others)
            })
            .collect();
        let mut r = CheckReport::new(format!("q-functional p={p}"));
        gather(&mut r, items, |(mu, others)| check_q_functional(&mu, p, &others))?;
        out.push(r);
        out.push(check_scalar_lemma(p));
    }
    Ok(out)
}

/// The corner segment `mu_a` is an interval with metric `2|a - b|`.
pub fn suite_q_corners(cfg: &SuiteConfig) -> Result<Vec<CheckReport>> {
    let mut s = sampler(cfg, 12);
    let mut r = CheckReport::new("q-corners");
    let mut pairs = vec![(q(1, 4), q(3, 4)), (q(3, 10), q(4, 10)), (q(1, 2), q(1, 2))];
    for _ in 0..20 {
        pairs.push((q(s.int(1, 19), 20), q(s.int(1, 19), 20)));
    }
    for (a, b) in pairs {
        r.absorb(check_corner_interval(&a, &b)?);
    }
    Ok(vec![r])
}

/// Geodesics from a Dirac are unique exactly for targets inside `D_x`.
pub fn suite_unique_geodesic(cfg: &SuiteConfig, n: usize) -> Result<Vec<CheckReport>> {
    let mut s = sampler(cfg, 13);
    let items: Vec<_> = (0..n)
        .map(|k| {
            let x = s.point();
            let mu = if k % 2 == 0 {
                let count = s.int(1, 4) as usize;
                let pts: Vec<_> = (0..count)
                    .map(|_| {
                        let t = s.coord(2);
                        let sign = if s.coin() { 1 } else { -1 };
                        Point2::new(x.x1.clone() + t.clone(), x.x2.clone() + t * q(sign, 1))
                    })
                    .collect();
                let w = s.weights(count);
                DiscreteMeasure::from_pairs(pts.into_iter().zip(w).collect()).expect("weights sum to one")
            } else {
                s.measure(4)
            };
            (x, mu, 1 + (k % 3) as u32)
        })
        .collect();
    let mut r = CheckReport::new("unique-geodesic");
    gather(&mut r, items, |(x, mu, p)| check_unique_geodesic(&x, &mu, p))?;
    Ok(vec![r])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SuiteConfig {
        SuiteConfig::default()
    }

    #[test]
    fn small_suites_pass() {
        let cfg = small();
        let runs = [
            suite_oracle_agreement(&cfg, 12).unwrap(),
            suite_projection(&cfg, 12).unwrap(),
            suite_crucial_identity(&cfg, 50).unwrap(),
            suite_diag_char(&cfg, 4, 2).unwrap(),
            suite_same_diag(&cfg, 4, 2).unwrap(),
            suite_dirac_char(&cfg, 4, 2).unwrap(),
            suite_perturbation(&cfg, 3).unwrap(),
            suite_radon(&cfg, 10).unwrap(),
            suite_q_sides(&cfg, 6).unwrap(),
            suite_q_saturation(&cfg, 6).unwrap(),
            suite_q_functional(&cfg, 10).unwrap(),
            suite_q_corners(&cfg).unwrap(),
            suite_unique_geodesic(&cfg, 8).unwrap(),
        ];
        for r in runs.iter().flatten() {
            assert!(r.passed(), "{}", serde_json::to_string_pretty(&r.to_json()).unwrap());
            assert!(r.instances > 0, "{}", r.name);
        }
    }

    #[test]
    fn suites_are_deterministic() {
        let cfg = small();
        let a = suite_projection(&cfg, 6).unwrap();
        let b = suite_projection(&cfg, 6).unwrap();
        assert_eq!(a, b);
    }
}
