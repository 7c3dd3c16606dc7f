use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::{DiagonalLine, Point2, Slope};
use crate::measure::{in_family_f, Atom, DiscreteMeasure};
use crate::scalar::{q, Rational};

/// Seeded generator of rational test instances.
///
/// Coordinates live on the lattice `Z / 4` inside `[-3, 3]` (or inside the
/// square `[-1, 1]^2`); weights are `k_i / sum k` with `k_i` in `1..=10`.
pub struct Sampler {
    rng: ChaCha8Rng,
}

const DEN: i64 = 4;

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Uniform integer in `lo..=hi`.
    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.gen_range(lo..=hi)
    }

    pub fn coin(&mut self) -> bool {
        self.rng.gen_bool(0.5)
    }

    pub fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.rng.gen_range(0..items.len())]
    }

    /// `k / 4` with `|k / 4| <= bound`.
    pub fn coord(&mut self, bound: i64) -> Rational {
        q(self.int(-bound * DEN, bound * DEN), DEN)
    }

    pub fn point(&mut self) -> Point2<Rational> {
        Point2::new(self.coord(3), self.coord(3))
    }

    pub fn point_in_square(&mut self) -> Point2<Rational> {
        Point2::new(self.coord(1), self.coord(1))
    }

    pub fn weights(&mut self, n: usize) -> Vec<Rational> {
        let ks: Vec<i64> = (0..n).map(|_| self.int(1, 10)).collect();
        let total: i64 = ks.iter().sum();
        ks.into_iter().map(|k| q(k, total)).collect()
    }

    /// Pairwise-distinct weights.
    pub fn distinct_weights(&mut self, n: usize) -> Vec<Rational> {
        let mut ks: Vec<i64> = Vec::with_capacity(n);
        while ks.len() < n {
            let k = self.int(1, 2 * n as i64 + 2);
            if !ks.contains(&k) {
                ks.push(k);
            }
        }
        let total: i64 = ks.iter().sum();
        ks.into_iter().map(|k| q(k, total)).collect()
    }

    fn assemble(&mut self, points: Vec<Point2<Rational>>) -> DiscreteMeasure<Rational> {
        let w = self.weights(points.len());
        let atoms = points.into_iter().zip(w).map(|(p, w)| Atom::new(p, w)).collect();
        DiscreteMeasure::new(atoms).expect("sampled weights sum to one")
    }

    /// Between 1 and `max_atoms` atoms (coinciding points merge).
    pub fn measure(&mut self, max_atoms: usize) -> DiscreteMeasure<Rational> {
        let n = self.int(1, max_atoms as i64) as usize;
        let pts = (0..n).map(|_| self.point()).collect();
        self.assemble(pts)
    }

    pub fn measure_in_square(&mut self, max_atoms: usize) -> DiscreteMeasure<Rational> {
        let n = self.int(1, max_atoms as i64) as usize;
        let pts = (0..n).map(|_| self.point_in_square()).collect();
        self.assemble(pts)
    }

    pub fn measure_with_atoms(&mut self, n: usize) -> DiscreteMeasure<Rational> {
        loop {
            let pts = (0..n).map(|_| self.point()).collect();
            let m = self.assemble(pts);
            if m.len() == n {
                return m;
            }
        }
    }

    pub fn line(&mut self) -> DiagonalLine<Rational> {
        let eps = if self.coin() { Slope::Plus } else { Slope::Minus };
        DiagonalLine::new(eps, self.coord(2))
    }

    pub fn measure_on_line(&mut self, line: &DiagonalLine<Rational>, max_atoms: usize) -> DiscreteMeasure<Rational> {
        let n = self.int(1, max_atoms as i64) as usize;
        let pts = (0..n).map(|_| line.at(self.coord(3))).collect();
        self.assemble(pts)
    }

    /// A measure on at least two distinct points of the segment from `(0,0)`
    /// to `(1,1)`, or a Dirac on it when `max_atoms == 1`.
    pub fn measure_on_unit_diagonal(&mut self, max_atoms: usize) -> DiscreteMeasure<Rational> {
        let n = self.int(1, max_atoms as i64) as usize;
        let pts = (0..n)
            .map(|_| {
                let t = q(self.int(0, 2 * DEN), 2 * DEN);
                Point2::new(t.clone(), t)
            })
            .collect();
        self.assemble(pts)
    }

    /// A member of the dense family with exactly `n` atoms.
    pub fn family_measure(&mut self, n: usize) -> DiscreteMeasure<Rational> {
        loop {
            let pts: Vec<_> = (0..n).map(|_| self.point()).collect();
            let w = self.distinct_weights(n);
            let atoms = pts.into_iter().zip(w).map(|(p, w)| Atom::new(p, w)).collect();
            if let Ok(m) = DiscreteMeasure::new(atoms) {
                if m.len() == n && in_family_f(&m) {
                    return m;
                }
            }
        }
    }
}
