//! Brute-force oracles and fixtures shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use sumproj::geometry::Point2;
use sumproj::planted::{gen_planted_fan, PlantedFan, PlantedFanSpec};
use sumproj::solymosi::{
    prune_heavy_points, quartile_filter, remove_near_apex, select_rich_tubes, white_regions, FanView, ViewTube,
    WhiteRegion,
};
use sumproj::sets::{PointSet1D, PointSet2D};
use sumproj::tubes::{find_fan, pruned_families, FanOutcome, FanParams, Tube};
use sumproj::Scale;

pub fn sc(m: u32) -> Scale {
    Scale::new(m).unwrap()
}

/// Distinct `floor(v / δ)` values via a sorted set.
pub fn bucket_oracle(values: &[f64], delta: f64) -> usize {
    values
        .iter()
        .map(|v| (v / delta).floor() as i64)
        .collect::<BTreeSet<_>>()
        .len()
}

pub fn bucket_oracle_2d(points: &[Point2<f64>], delta: f64) -> usize {
    points
        .iter()
        .map(|p| ((p.x / delta).floor() as i64, (p.y / delta).floor() as i64))
        .collect::<BTreeSet<_>>()
        .len()
}

/// Max of `|X ∩ B(x, r)| / (r/δ)^s` over `x ∈ X`, `r = δ 2^k`, by double loop.
pub fn noncon_oracle_1d(x: &PointSet1D<f64>, s: f64) -> f64 {
    let delta = x.scale().delta_f64();
    let pts = x.points();
    let mut best = 0.0f64;
    for k in 0..=x.scale().m() {
        let r = delta * (k as f64).exp2();
        for &c in pts {
            let n = pts.iter().filter(|&&p| (p - c).abs() <= r + 1e-12).count();
            best = best.max(n as f64 / (r / delta).powf(s));
        }
    }
    best
}

pub fn noncon_oracle_2d(x: &PointSet2D<f64>, s: f64) -> f64 {
    let delta = x.scale().delta_f64();
    let pts = x.points();
    let mut best = 0.0f64;
    for k in 0..=x.scale().m() {
        let r = delta * (k as f64).exp2();
        for &c in pts {
            let n = pts.iter().filter(|&&p| p.dist(c) <= r + 1e-12).count();
            best = best.max(n as f64 / (r / delta).powf(s));
        }
    }
    best
}

pub fn separated_oracle_2d(pts: &[Point2<f64>], delta: f64) -> bool {
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            if pts[i].dist(pts[j]) < delta - 1e-12 {
                return false;
            }
        }
    }
    true
}

/// Small one-sided fan in the first quadrant of its apex, used for
/// white-region checks. Sizes vary with the seed.
pub fn random_fan_spec(scale: Scale, params: &FanParams, seed: u64) -> PlantedFanSpec {
    PlantedFanSpec {
        lines: 3 + (seed % 8) as usize,
        per_line: 10 + (seed % 20) as usize,
        noise: 0.0,
        apex_box: (0.05, 0.2),
        angles: (0.1, 1.47),
        radii: (params.near_radius(scale) * 1.05, 1.7),
        two_sided: false,
        seed,
    }
}

pub struct FanInstance {
    pub planted: PlantedFan<f64>,
    pub view: FanView<f64>,
    pub rich: Vec<ViewTube<f64>>,
    pub params: FanParams,
}

/// Runs fan detection and the point filters on a random planted fan.
/// `None` when any stage leaves fewer than two rich tubes.
pub fn fan_instance(m: u32, seed: u64) -> Option<FanInstance> {
    let scale = sc(m);
    let params = FanParams::new(0.55, 0.5);
    let planted = gen_planted_fan::<f64>(scale, &random_fan_spec(scale, &params, seed)).unwrap();
    let (_, fams) = pruned_families(&planted.set, &planted.directions, &params).unwrap();
    let FanOutcome::Found(fan) = find_fan(&planted.set, &fams, &params) else {
        return None;
    };
    let (view, _) = quartile_filter(&fan, &planted.set);
    let (view, _) = prune_heavy_points(&view, &planted.set, &params);
    let (view, nr) = remove_near_apex(&view, &planted.set, &params);
    if nr.emptied {
        return None;
    }
    let (rich, _) = select_rich_tubes(&view, scale, &params).ok()?;
    Some(FanInstance {
        planted,
        view,
        rich,
        params,
    })
}

/// Membership rebuilt from the ray normals: `ν = perp(ray)` points from the
/// lower ray towards the upper one, and each slab becomes an interval of
/// `ν`-coordinates.
pub fn region_oracle(w: &WhiteRegion<f64>, q: Point2<f64>) -> bool {
    let d2 = 2.0 * w.scale.delta_f64();
    let side = |tube: &Tube<f64>, ray: Point2<f64>| -> (f64, f64, f64) {
        let nu = ray.perp();
        let flip = if tube.e.unit().dot(nu) > 0.0 { 1.0 } else { -1.0 };
        let lo = d2 * tube.index as f64;
        let hi = d2 * (tube.index + 1) as f64;
        let t = nu.dot(q) * flip;
        (t, lo, hi)
    };
    let (t_lo, lo_lo, hi_lo) = side(&w.lower, w.lower_ray);
    let past_lower = if w.lower.e.unit().dot(w.lower_ray.perp()) > 0.0 {
        t_lo >= hi_lo
    } else {
        t_lo < lo_lo
    };
    let (t_hi, lo_hi, hi_hi) = side(&w.upper, w.upper_ray);
    let before_upper = if w.upper.e.unit().dot(w.upper_ray.perp()) > 0.0 {
        t_hi < lo_hi
    } else {
        t_hi >= hi_hi
    };
    past_lower && before_upper
}

/// `(Σ_j distinct cells, union of cells)` by brute force.
pub fn sums_oracle(view: &FanView<f64>, rich: &[ViewTube<f64>], b: &PointSet2D<f64>, params: &FanParams) -> (usize, usize) {
    let delta = b.scale().delta_f64();
    let regions = white_regions(view, rich, b.scale(), params);
    let mut total = 0;
    let mut union = BTreeSet::new();
    for w in &regions {
        let mut cells = BTreeSet::new();
        for &x in &rich[w.j].members {
            for &y in &rich[w.j + 1].members {
                let s = b.points()[x] + b.points()[y];
                if region_oracle(w, s - w.apex) {
                    cells.insert(((s.x / delta).floor() as i64, (s.y / delta).floor() as i64));
                }
            }
        }
        total += cells.len();
        union.extend(cells);
    }
    (total, union.len())
}
