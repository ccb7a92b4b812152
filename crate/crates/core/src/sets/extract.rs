use crate::error::{invalid, Result};
use crate::scalar::Real;

use super::{PointCloud, PointSet1D};

/// Non-concentration budget guaranteed by [`extract_ds_subset`].
pub const EXTRACT_BUDGET: f64 = 4.0;

/// Greedy multi-scale thinning of `x` to a (δ,s)-subset.
///
/// Steps, all deterministic and keeping the leftmost points:
/// 1. left-to-right δ-separation;
/// 2. for dyadic levels `j = 0..=m+1` (finest first) every half-open interval
///    of length `δ 2^j` keeps at most `floor(2^(1-s) 2^(js))` points;
/// 3. while the scan constant exceeds 4, drop the rightmost point of the
///    witness ball.
///
/// A closed ball of radius `δ 2^k` meets at most two level-`k+1` intervals,
/// so step 2 alone caps every tested ratio at 4; step 3 only absorbs rounding
/// at interval boundaries.
pub fn extract_ds_subset<T: Real>(x: &PointSet1D<T>, s: f64) -> Result<PointSet1D<T>> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(invalid("s", format!("{s} outside (0, 1]")));
    }
    let scale = x.scale();
    let delta = scale.delta::<T>();
    let tol = T::sep_tolerance(delta);

    let mut kept: Vec<T> = Vec::with_capacity(x.len());
    for &p in x.points() {
        if kept.last().map_or(true, |&q| p - q >= delta - tol) {
            kept.push(p);
        }
    }

    for level in 0..=scale.m() + 1 {
        let len = delta * T::lit((level as f64).exp2());
        let cap = ((1.0 - s + level as f64 * s).exp2() + 1e-9).floor() as usize;
        let mut out = Vec::with_capacity(kept.len());
        let mut cell = None;
        let mut used = 0;
        for &p in &kept {
            let c = p.cell(len);
            if cell != Some(c) {
                cell = Some(c);
                used = 0;
            }
            if used < cap {
                out.push(p);
                used += 1;
            }
        }
        kept = out;
    }

    loop {
        let set = PointSet1D::new(kept, scale)?;
        let report = set.nonconcentration(s)?;
        if report.constant <= EXTRACT_BUDGET {
            return Ok(set);
        }
        let w = report.witness.expect("nonzero constant has a witness");
        let hi = T::lit(w.center[0] + w.radius) + tol;
        kept = set.into_points();
        let idx = kept.partition_point(|&y| y <= hi) - 1;
        kept.remove(idx);
    }
}
