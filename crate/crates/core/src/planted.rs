//! Seeded fan instances: lines through a common apex plus uniform noise.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};
use crate::geometry::{Point2, Scale};
use crate::projections::{Direction, DirectionSet};
use crate::scalar::Real;
use crate::sets::PointSet2D;

#[derive(Clone, Debug, PartialEq)]
pub struct PlantedFanSpec {
    pub lines: usize,
    pub per_line: usize,
    /// Noise points as a fraction of the planted mass.
    pub noise: f64,
    /// The apex is drawn uniformly from `[lo, hi]²`.
    pub apex_box: (f64, f64),
    /// Ray angles are spread evenly over `[lo, hi)`.
    pub angles: (f64, f64),
    /// Distances from the apex along each ray.
    pub radii: (f64, f64),
    /// Place points on both sides of the apex.
    pub two_sided: bool,
    pub seed: u64,
}

impl PlantedFanSpec {
    /// `⌈δ^-1/2⌉` full lines through an apex near `(1, 1)` with `⌈δ^-0.35⌉`
    /// points each and 20% noise.
    pub fn standard(scale: Scale, seed: u64) -> Self {
        Self {
            lines: (scale.delta_pow(-0.5) - 1e-9).ceil() as usize,
            per_line: (scale.delta_pow(-0.35) - 1e-9).ceil() as usize,
            noise: 0.2,
            apex_box: (0.9, 1.1),
            angles: (0.0, std::f64::consts::PI),
            radii: (0.05, 0.85),
            two_sided: true,
            seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlantedFan<T> {
    pub set: PointSet2D<T>,
    pub apex_index: usize,
    /// Normals of the planted lines, i.e. the directions whose tubes hold them.
    pub directions: DirectionSet<T>,
    /// Points placed on the lines, apex excluded.
    pub planted_mass: usize,
    pub noise_points: usize,
}

struct Separated<T> {
    delta: T,
    cells: HashMap<(i64, i64), Vec<usize>>,
    points: Vec<Point2<T>>,
}

impl<T: Real> Separated<T> {
    fn try_push(&mut self, p: Point2<T>) -> bool {
        let lim = T::lit(2.0);
        if p.x < T::zero() || p.y < T::zero() || p.x > lim || p.y > lim {
            return false;
        }
        let (cx, cy) = p.cell(self.delta);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(v) = self.cells.get(&(cx + dx, cy + dy)) {
                    if v.iter().any(|&i| self.points[i].dist(p) < self.delta) {
                        return false;
                    }
                }
            }
        }
        self.cells.entry((cx, cy)).or_default().push(self.points.len());
        self.points.push(p);
        true
    }
}

pub fn gen_planted_fan<T: Real>(scale: Scale, spec: &PlantedFanSpec) -> Result<PlantedFan<T>> {
    if spec.lines == 0 || spec.per_line == 0 {
        return Err(invalid("lines", "need at least one line with one point"));
    }
    if !(spec.radii.0 > 0.0 && spec.radii.0 < spec.radii.1) {
        return Err(invalid("radii", format!("{:?} is not an interval in (0, inf)", spec.radii)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let apex = Point2::new(
        T::lit(rng.gen_range(spec.apex_box.0..=spec.apex_box.1)),
        T::lit(rng.gen_range(spec.apex_box.0..=spec.apex_box.1)),
    );
    let mut acc = Separated {
        delta: scale.delta::<T>(),
        cells: HashMap::new(),
        points: Vec::new(),
    };
    acc.try_push(apex);
    let span = spec.angles.1 - spec.angles.0;
    let mut normals = Vec::with_capacity(spec.lines);
    let mut planted = 0;
    for k in 0..spec.lines {
        let phi = T::lit(spec.angles.0 + span * (k as f64 + 0.5) / spec.lines as f64);
        let u = Point2::new(phi.cos(), phi.sin());
        normals.push(Direction::from_angle(phi + T::FRAC_PI_2()));
        let width = (spec.radii.1 - spec.radii.0) / spec.per_line as f64;
        for i in 0..spec.per_line {
            let mut r = spec.radii.0 + width * (i as f64 + rng.gen_range(0.1..0.9));
            if spec.two_sided && rng.gen_bool(0.5) {
                r = -r;
            }
            if acc.try_push(apex + u * T::lit(r)) {
                planted += 1;
            }
        }
    }
    let target = (spec.noise * planted as f64).round() as usize;
    let mut noise = 0;
    let mut attempts = 0;
    while noise < target && attempts < 100 * (target + 1) {
        attempts += 1;
        let p = Point2::new(T::lit(rng.gen_range(0.0..2.0)), T::lit(rng.gen_range(0.0..2.0)));
        if acc.try_push(p) {
            noise += 1;
        }
    }
    Ok(PlantedFan {
        set: PointSet2D::new(acc.points, scale)?,
        apex_index: 0,
        directions: DirectionSet::new(normals, scale, None),
        planted_mass: planted,
        noise_points: noise,
    })
}
