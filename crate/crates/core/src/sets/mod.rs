//! δ-discretized point sets on `[0,1]` and `[0,2]^2`: covering numbers,
//! separation, non-concentration, the greedy (δ,s)-subset extractor and the
//! set generators.

mod extract;
mod generators;
mod text;

pub use extract::extract_ds_subset;
pub use generators::{
    cantor_parameters, gen_ap_set, gen_cantor_set, gen_figure3_set, gen_random_ds_set,
    product_set, CantorParameters,
};
pub use text::{parse_point_set, AnyPointSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{Point2, Scale};
use crate::scalar::Real;

/// Sorted, strictly increasing points of `[0,1]` at a fixed scale.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet1D<T> {
    points: Vec<T>,
    scale: Scale,
}

impl<T: Real> PointSet1D<T> {
    pub fn new(points: Vec<T>, scale: Scale) -> Result<Self> {
        for (i, &p) in points.iter().enumerate() {
            if !(p >= T::zero() && p <= T::one()) {
                return Err(Error::OutOfBounds {
                    index: i,
                    bounds: "[0,1]",
                });
            }
            if i > 0 && points[i - 1] >= p {
                return Err(Error::NotSorted(i));
            }
        }
        Ok(Self { points, scale })
    }

    /// Sorts and removes exact duplicates before validating.
    pub fn from_unsorted(mut points: Vec<T>, scale: Scale) -> Result<Self> {
        points.sort_by(|a, b| a.partial_cmp(b).expect("NaN-free input"));
        points.dedup();
        Self::new(points, scale)
    }

    pub fn empty(scale: Scale) -> Self {
        Self {
            points: Vec::new(),
            scale,
        }
    }

    pub fn points(&self) -> &[T] {
        &self.points
    }

    pub fn scale(&self) -> Scale {
        self.scale
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn into_points(self) -> Vec<T> {
        self.points
    }
}

/// Points of `[0,2]^2` at a fixed scale (insertion order is preserved).
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet2D<T> {
    points: Vec<Point2<T>>,
    scale: Scale,
}

impl<T: Real> PointSet2D<T> {
    pub fn new(points: Vec<Point2<T>>, scale: Scale) -> Result<Self> {
        let two = T::lit(2.0);
        for (i, p) in points.iter().enumerate() {
            let inside = |v: T| v >= T::zero() && v <= two;
            if !(inside(p.x) && inside(p.y)) {
                return Err(Error::OutOfBounds {
                    index: i,
                    bounds: "[0,2]^2",
                });
            }
        }
        Ok(Self { points, scale })
    }

    pub fn points(&self) -> &[Point2<T>] {
        &self.points
    }

    pub fn scale(&self) -> Scale {
        self.scale
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn into_points(self) -> Vec<Point2<T>> {
        self.points
    }
}

/// Ball achieving the largest ratio in a non-concentration scan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub center: Vec<f64>,
    pub radius: f64,
    pub count: usize,
}

/// Result of a non-concentration scan at exponent `s`.
///
/// `constant` is the largest `|X ∩ B(x,r)| / (r/δ)^s` over centers `x ∈ X`
/// and radii `r = δ 2^k`, `0 <= k <= m`. Allowing arbitrary centers and radii
/// can raise the constant by at most the factor `general_center_factor()`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonConReport {
    pub s: f64,
    pub constant: f64,
    pub witness: Option<Witness>,
}

impl NonConReport {
    pub(crate) fn empty(s: f64) -> Self {
        Self {
            s,
            constant: 0.0,
            witness: None,
        }
    }

    /// `2 * 2^s`: centers off the set cost a factor 2^s (a ball of radius r
    /// about any point sits inside a ball of radius 2r about a set point) and
    /// rounding the radius up to a dyadic value costs another 2.
    pub fn general_center_factor(&self) -> f64 {
        2.0 * self.s.exp2()
    }

    pub fn passes(&self, budget: f64) -> bool {
        self.constant <= budget
    }
}

/// Operations shared by the 1D and 2D point sets.
pub trait PointCloud {
    fn scale(&self) -> Scale;
    fn len(&self) -> usize;
    /// Number of nonempty half-open δ-grid cells meeting the set.
    fn covering_number(&self) -> usize;
    /// True iff all pairwise (Euclidean) distances are at least δ.
    fn is_delta_separated(&self) -> bool;
    fn nonconcentration(&self, s: f64) -> Result<NonConReport>;
    /// Largest admissible exponent: 1 on the line, 2 in the plane.
    fn ambient_dimension(&self) -> f64;
}

pub fn covering_number<P: PointCloud>(x: &P) -> usize {
    x.covering_number()
}

pub fn is_delta_separated<P: PointCloud>(x: &P) -> bool {
    x.is_delta_separated()
}

pub fn nonconcentration<P: PointCloud>(x: &P, s: f64) -> Result<NonConReport> {
    x.nonconcentration(s)
}

/// Covering count of an arbitrary list of reals (e.g. a projection or a
/// sumset) on the δ-grid of the whole line.
pub fn covering_count_values<T: Real>(values: &[T], delta: T) -> usize {
    let mut cells: Vec<i64> = values.iter().map(|v| v.cell(delta)).collect();
    cells.sort_unstable();
    cells.dedup();
    cells.len()
}

pub fn covering_count_points<T: Real>(points: &[Point2<T>], delta: T) -> usize {
    let mut cells: Vec<(i64, i64)> = points.iter().map(|p| p.cell(delta)).collect();
    cells.sort_unstable();
    cells.dedup();
    cells.len()
}

fn check_exponent(s: f64, max: f64) -> Result<()> {
    if !(s > 0.0 && s <= max) {
        return Err(invalid("s", format!("{s} outside (0, {max}]")));
    }
    Ok(())
}

/// Dyadic radii `δ 2^k`, `k = 0..=m`, each padded by the comparison slack.
fn padded_radii<T: Real>(scale: Scale) -> Vec<T> {
    let delta = scale.delta::<T>();
    let tol = T::sep_tolerance(delta);
    (0..=scale.m())
        .map(|k| delta * T::lit((k as f64).exp2()) + tol)
        .collect()
}

impl<T: Real> PointCloud for PointSet1D<T> {
    fn scale(&self) -> Scale {
        self.scale
    }

    fn len(&self) -> usize {
        self.points.len()
    }

    fn covering_number(&self) -> usize {
        let delta = self.scale.delta::<T>();
        let mut count = 0;
        let mut last = None;
        for &p in &self.points {
            let c = p.cell(delta);
            if last != Some(c) {
                count += 1;
                last = Some(c);
            }
        }
        count
    }

    fn is_delta_separated(&self) -> bool {
        let delta = self.scale.delta::<T>();
        let min_gap = delta - T::sep_tolerance(delta);
        self.points.windows(2).all(|w| w[1] - w[0] >= min_gap)
    }

    fn nonconcentration(&self, s: f64) -> Result<NonConReport> {
        check_exponent(s, 1.0)?;
        if self.points.is_empty() {
            return Ok(NonConReport::empty(s));
        }
        let radii = padded_radii::<T>(self.scale);
        let pts = &self.points;
        let mut best = NonConReport::empty(s);
        for &x in pts {
            for (k, &r) in radii.iter().enumerate() {
                let lo = pts.partition_point(|&y| y < x - r);
                let hi = pts.partition_point(|&y| y <= x + r);
                let count = hi - lo;
                let ratio = count as f64 / (k as f64 * s).exp2();
                if ratio > best.constant {
                    best.constant = ratio;
                    best.witness = Some(Witness {
                        center: vec![x.to_f64_lossy()],
                        radius: self.scale.delta_f64() * (k as f64).exp2(),
                        count,
                    });
                }
            }
        }
        Ok(best)
    }

    fn ambient_dimension(&self) -> f64 {
        1.0
    }
}

impl<T: Real> PointCloud for PointSet2D<T> {
    fn scale(&self) -> Scale {
        self.scale
    }

    fn len(&self) -> usize {
        self.points.len()
    }

    fn covering_number(&self) -> usize {
        covering_count_points(&self.points, self.scale.delta::<T>())
    }

    fn is_delta_separated(&self) -> bool {
        let delta = self.scale.delta::<T>();
        let min = delta - T::sep_tolerance(delta);
        let min_sq = min * min;
        let mut grid: std::collections::HashMap<(i64, i64), Vec<usize>> = Default::default();
        for (i, p) in self.points.iter().enumerate() {
            grid.entry(p.cell(delta)).or_default().push(i);
        }
        for (i, p) in self.points.iter().enumerate() {
            let (cx, cy) = p.cell(delta);
            for dx in -1..=1 {
                for dy in -1..=1 {
                    if let Some(bucket) = grid.get(&(cx + dx, cy + dy)) {
                        for &j in bucket {
                            if j != i && p.dist_sq(self.points[j]) < min_sq {
                                return false;
                            }
                        }
                    }
                }
            }
        }
        true
    }

    fn nonconcentration(&self, s: f64) -> Result<NonConReport> {
        check_exponent(s, 2.0)?;
        if self.points.is_empty() {
            return Ok(NonConReport::empty(s));
        }
        let radii_sq: Vec<T> = padded_radii::<T>(self.scale)
            .into_iter()
            .map(|r| r * r)
            .collect();
        let pts = &self.points;
        let nk = radii_sq.len();
        // Per center: bin every other point by the first dyadic radius that
        // reaches it, then accumulate.
        let per_center: Vec<(f64, usize, usize)> = pts
            .par_iter()
            .map(|&c| {
                let mut hist = vec![0usize; nk + 1];
                for &p in pts {
                    let d2 = c.dist_sq(p);
                    hist[radii_sq.partition_point(|&r2| r2 < d2)] += 1;
                }
                let mut best = (0.0f64, 0usize, 0usize);
                let mut cum = 0;
                for (k, &h) in hist.iter().take(nk).enumerate() {
                    cum += h;
                    let ratio = cum as f64 / (k as f64 * s).exp2();
                    if ratio > best.0 {
                        best = (ratio, k, cum);
                    }
                }
                best
            })
            .collect();
        let mut best = NonConReport::empty(s);
        for (i, &(ratio, k, count)) in per_center.iter().enumerate() {
            if ratio > best.constant {
                best.constant = ratio;
                best.witness = Some(Witness {
                    center: pts[i].to_f64().to_vec(),
                    radius: self.scale.delta_f64() * (k as f64).exp2(),
                    count,
                });
            }
        }
        Ok(best)
    }

    fn ambient_dimension(&self) -> f64 {
        2.0
    }
}
