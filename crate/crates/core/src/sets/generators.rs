//! Deterministic generators of (δ,s)-sets and of the column example.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::geometry::{Point2, Scale};
use crate::scalar::Real;

use super::{extract_ds_subset, PointSet1D, PointSet2D};

fn grid_point<T: Real>(k: u64, scale: Scale) -> T {
    T::lit(k as f64 * scale.delta_f64())
}

/// Arithmetic progression with gap `δ^s` rounded to a multiple of δ.
pub fn gen_ap_set<T: Real>(scale: Scale, s: f64) -> Result<PointSet1D<T>> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(invalid("s", format!("{s} outside (0, 1]")));
    }
    let gap = (scale.m() as f64 * (1.0 - s)).exp2().round().max(1.0) as u64;
    let points = (0..=scale.cells() / gap)
        .map(|k| grid_point(k * gap, scale))
        .collect();
    PointSet1D::new(points, scale)
}

/// Keep `kept` of `2^level_bits` branches per level.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CantorParameters {
    pub kept: u64,
    pub level_bits: u32,
}

impl CantorParameters {
    pub fn dimension(self) -> f64 {
        (self.kept as f64).log2() / self.level_bits as f64
    }
}

/// Smallest-level Cantor parameters realizing `s` exactly at scale `m`
/// (`level_bits` must divide `m`).
pub fn cantor_parameters(scale: Scale, s: f64) -> Result<CantorParameters> {
    let m = scale.m();
    let mut nearest: Option<f64> = None;
    for bits in (1..=m).filter(|b| m % b == 0) {
        for kept in 1..=(1u64 << bits) {
            let p = CantorParameters {
                kept,
                level_bits: bits,
            };
            let dim = p.dimension();
            if (dim - s).abs() < 1e-9 {
                return Ok(p);
            }
            if nearest.map_or(true, |n| (dim - s).abs() < (n - s).abs()) {
                nearest = Some(dim);
            }
        }
    }
    Err(Error::UnrealizableDimension {
        requested: s,
        nearest: nearest.unwrap_or(0.0),
        m,
    })
}

/// Dyadic Cantor set: at each of `m / level_bits` levels every interval is
/// split into `2^level_bits` children of which `kept`, evenly spread, survive.
/// Points are the left endpoints of the final δ-intervals.
pub fn gen_cantor_set<T: Real>(scale: Scale, s: f64) -> Result<PointSet1D<T>> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(invalid("s", format!("{s} outside (0, 1]")));
    }
    let params = cantor_parameters(scale, s)?;
    let branches = 1u64 << params.level_bits;
    let children: Vec<u64> = if params.kept == 1 {
        vec![0]
    } else {
        (0..params.kept)
            .map(|i| ((i * (branches - 1)) as f64 / (params.kept - 1) as f64).round() as u64)
            .collect()
    };
    let mut cells = vec![0u64];
    for _ in 0..scale.m() / params.level_bits {
        cells = cells
            .iter()
            .flat_map(|&c| children.iter().map(move |&ch| c * branches + ch))
            .collect();
    }
    cells.sort_unstable();
    PointSet1D::new(cells.into_iter().map(|k| grid_point(k, scale)).collect(), scale)
}

/// `ceil(δ^-s)` distinct uniform grid cells (seeded ChaCha8) thinned by
/// [`extract_ds_subset`].
pub fn gen_random_ds_set<T: Real>(scale: Scale, s: f64, seed: u64) -> Result<PointSet1D<T>> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(invalid("s", format!("{s} outside (0, 1]")));
    }
    let cells = scale.cells() as usize;
    let amount = (scale.delta_pow(-s) - 1e-9).ceil().min(cells as f64) as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = rand::seq::index::sample(&mut rng, cells, amount).into_vec();
    picked.sort_unstable();
    let raw = PointSet1D::new(
        picked.into_iter().map(|k| grid_point(k as u64, scale)).collect(),
        scale,
    )?;
    extract_ds_subset(&raw, s)
}

/// The column example: `δ^-1/2` vertical columns at horizontal spacing
/// `δ^1/2`, each made of `δ^-1/2` points at vertical spacing δ. Column `c`
/// starts at height `c δ^1/2`, so the columns form a staircase and the
/// horizontal projection is a full δ-grid while the vertical one has only
/// `δ^-1/2` cells.
pub fn gen_figure3_set<T: Real>(scale: Scale) -> Result<PointSet2D<T>> {
    if scale.m() % 2 != 0 {
        return Err(Error::OddScale(scale.m()));
    }
    let side = 1u64 << (scale.m() / 2);
    let mut points = Vec::with_capacity((side * side) as usize);
    for c in 0..side {
        let x = grid_point::<T>(c * side, scale);
        for j in 0..side {
            points.push(Point2::new(x, grid_point(c * side + j, scale)));
        }
    }
    PointSet2D::new(points, scale)
}

/// Cartesian product `A × A2`, row-major in `A`.
pub fn product_set<T: Real>(a: &PointSet1D<T>, a2: &PointSet1D<T>) -> Result<PointSet2D<T>> {
    if a.scale() != a2.scale() {
        return Err(Error::ScaleMismatch(a.scale().m(), a2.scale().m()));
    }
    let points = a
        .points()
        .iter()
        .flat_map(|&x| a2.points().iter().map(move |&y| Point2::new(x, y)))
        .collect();
    PointSet2D::new(points, a.scale())
}
