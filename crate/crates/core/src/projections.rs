//! Orthogonal projections, sumset entropies `N_δ(A + tA)`, sweeps for
//! exceptional parameters and non-concentration of direction sets on S¹.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::{Point2, Scale};
use crate::scalar::Real;
use crate::sets::{covering_count_values, product_set, NonConReport, PointSet1D, PointSet2D, Witness};

/// Unit direction `(cos θ, sin θ)` with `θ ∈ [0, 2π)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Direction<T> {
    theta: T,
}

impl<T: Real> Direction<T> {
    pub fn from_angle(theta: T) -> Self {
        let tau = T::TAU();
        let mut t = theta % tau;
        if t < T::zero() {
            t = t + tau;
        }
        if t >= tau {
            t = T::zero();
        }
        Self { theta: t }
    }

    /// Direction of `(1, t)`; the projection of `A × A` onto it is a rescaled
    /// copy of `A + tA`.
    pub fn from_slope(t: T) -> Self {
        Self::from_angle(t.atan2(T::one()))
    }

    pub fn theta(self) -> T {
        self.theta
    }

    pub fn unit(self) -> Point2<T> {
        let (s, c) = self.theta.sin_cos();
        Point2::new(c, s)
    }

    /// Same line, opposite orientation.
    pub fn opposite(self) -> Self {
        Self::from_angle(self.theta + T::PI())
    }

    /// Arc-length distance on S¹.
    pub fn arc_distance(self, other: Self) -> T {
        let d = (self.theta - other.theta).abs();
        d.min(T::TAU() - d)
    }
}

/// Finite set of directions sorted by angle, without exact duplicates.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectionSet<T> {
    directions: Vec<Direction<T>>,
    scale: Scale,
    declared_s: Option<f64>,
}

impl<T: Real> DirectionSet<T> {
    pub fn new(mut directions: Vec<Direction<T>>, scale: Scale, declared_s: Option<f64>) -> Self {
        directions.sort_by(|a, b| a.theta.partial_cmp(&b.theta).expect("NaN-free angle"));
        directions.dedup();
        Self {
            directions,
            scale,
            declared_s,
        }
    }

    /// Slope-to-angle adapter: `t ↦ (1, t)/|(1, t)|`.
    pub fn from_slopes(slopes: &[T], scale: Scale, declared_s: Option<f64>) -> Self {
        Self::new(
            slopes.iter().map(|&t| Direction::from_slope(t)).collect(),
            scale,
            declared_s,
        )
    }

    /// Angles `lo + k δ^s` in `[lo, hi)`.
    pub fn angle_grid(scale: Scale, s: f64, lo: T, hi: T) -> Self {
        let step = T::lit(scale.delta_pow(s));
        let mut dirs = Vec::new();
        let mut k = 0u32;
        loop {
            let a = lo + step * T::lit(k as f64);
            if a >= hi {
                break;
            }
            dirs.push(Direction::from_angle(a));
            k += 1;
        }
        Self::new(dirs, scale, Some(s))
    }

    pub fn directions(&self) -> &[Direction<T>] {
        &self.directions
    }

    pub fn scale(&self) -> Scale {
        self.scale
    }

    pub fn declared_s(&self) -> Option<f64> {
        self.declared_s
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }
}

/// Projected values in input order plus a sorted copy.
#[derive(Clone, Debug, PartialEq)]
pub struct Projection<T> {
    pub values: Vec<T>,
    pub sorted: Vec<T>,
}

impl<T: Real> Projection<T> {
    pub fn covering_number(&self, delta: T) -> usize {
        covering_count_values(&self.sorted, delta)
    }
}

pub fn project_points<T: Real>(points: &[Point2<T>], e: Direction<T>) -> Projection<T> {
    let u = e.unit();
    let values: Vec<T> = points.iter().map(|&p| u.dot(p)).collect();
    let mut sorted = values.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("NaN-free projection"));
    Projection { values, sorted }
}

/// `π_e(B) = {e · x : x ∈ B}`.
pub fn project<T: Real>(b: &PointSet2D<T>, e: Direction<T>) -> Projection<T> {
    project_points(b.points(), e)
}

fn check_parameter<T: Real>(t: T) -> Result<()> {
    if !(t >= T::zero() && t <= T::one()) {
        return Err(invalid("t", format!("{t} outside [0, 1]")));
    }
    Ok(())
}

pub fn sumset_values<T: Real>(a: &PointSet1D<T>, t: T) -> Vec<T> {
    let pts = a.points();
    pts.iter()
        .flat_map(|&x| pts.iter().map(move |&y| x + t * y))
        .collect()
}

/// `N_δ(A + tA)` by bucketing every sum `a + t a'`.
pub fn sumset_entropy<T: Real>(a: &PointSet1D<T>, t: T) -> Result<usize> {
    check_parameter(t)?;
    Ok(covering_count_values(&sumset_values(a, t), a.scale().delta()))
}

/// Second route to the same count: project `A × A` onto `e_t ∝ (1, t)` and
/// undo the normalization `1/√(1+t²)`.
pub fn sumset_entropy_via_projection<T: Real>(a: &PointSet1D<T>, t: T) -> Result<usize> {
    check_parameter(t)?;
    let b = product_set(a, a)?;
    let norm = (T::one() + t * t).sqrt();
    let proj = project(&b, Direction::from_slope(t));
    let rescaled: Vec<T> = proj.values.iter().map(|&v| v * norm).collect();
    Ok(covering_count_values(&rescaled, a.scale().delta()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub t: f64,
    pub entropy: usize,
    pub threshold: f64,
    pub exceptional: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExceptionalSweep {
    pub s: f64,
    pub c_e: f64,
    pub rows: Vec<SweepRow>,
}

impl ExceptionalSweep {
    /// Sorted parameters whose entropy is at most `C_E δ^-s`.
    pub fn exceptional(&self) -> Vec<f64> {
        self.rows
            .iter()
            .filter(|r| r.exceptional)
            .map(|r| r.t)
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,entropy,threshold,exceptional_flag\n");
        for r in &self.rows {
            writeln!(out, "{},{},{},{}", r.t, r.entropy, r.threshold, r.exceptional as u8).unwrap();
        }
        out
    }
}

/// `δ^s`-grid of `[0, 1]`, the default candidate list for sweeps.
pub fn default_parameter_grid<T: Real>(scale: Scale, s: f64) -> Vec<T> {
    let step = scale.delta_pow(s);
    (0..)
        .map(|k| k as f64 * step)
        .take_while(|&t| t <= 1.0)
        .map(T::lit)
        .collect()
}

/// Candidates `t` with `N_δ(A + tA) <= C_E δ^-s`; every row keeps its raw
/// entropy so thresholds can be re-derived.
pub fn exceptional_parameters<T: Real>(
    a: &PointSet1D<T>,
    s: f64,
    c_e: f64,
    candidates: &[T],
) -> Result<ExceptionalSweep> {
    if !(c_e >= 1.0) {
        return Err(invalid("c_e", format!("{c_e} < 1")));
    }
    let mut ts = candidates.to_vec();
    ts.sort_by(|x, y| x.partial_cmp(y).expect("NaN-free parameter"));
    ts.dedup();
    let threshold = c_e * a.scale().delta_pow(-s);
    let rows = ts
        .par_iter()
        .map(|&t| {
            let entropy = sumset_entropy(a, t)?;
            Ok(SweepRow {
                t: t.to_f64_lossy(),
                entropy,
                threshold,
                exceptional: entropy as f64 <= threshold,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExceptionalSweep { s, c_e, rows })
}

/// Candidate directions `e` with `N_δ(π_e B) <= C_E δ^-s`.
pub fn exceptional_directions<T: Real>(b: &PointSet2D<T>, candidates: &[Direction<T>], s: f64, c_e: f64) -> DirectionSet<T> {
    let scale = b.scale();
    let threshold = c_e * scale.delta_pow(-s);
    let keep: Vec<bool> = candidates
        .par_iter()
        .map(|&e| project(b, e).covering_number(scale.delta()) as f64 <= threshold)
        .collect();
    let dirs = candidates
        .iter()
        .zip(keep)
        .filter(|(_, k)| *k)
        .map(|(&e, _)| e)
        .collect();
    DirectionSet::new(dirs, scale, None)
}

/// Greedy subset, in angular order, with consecutive angles at least `δ^s`
/// apart (the wrap-around gap included).
pub fn thin_directions<T: Real>(e: &DirectionSet<T>, s: f64) -> DirectionSet<T> {
    let scale = e.scale();
    let step = T::lit(scale.delta_pow(s));
    let mut kept: Vec<Direction<T>> = Vec::new();
    for &d in e.directions() {
        let ok = match (kept.first(), kept.last()) {
            (Some(&first), Some(&last)) => d.theta() - last.theta() >= step && first.theta() + T::TAU() - d.theta() >= step,
            _ => true,
        };
        if ok {
            kept.push(d);
        }
    }
    DirectionSet::new(kept, scale, Some(s))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectionNonConReport {
    pub report: NonConReport,
    /// Smallest arc between consecutive directions (wrapping around).
    pub min_gap: f64,
    /// Whether the stronger `δ^s`-separation also holds.
    pub delta_s_separated: bool,
}

/// Non-concentration of `E` in the arc-length metric of S¹, centers in `E`
/// and radii `δ 2^k`, `0 <= k <= m`.
pub fn direction_nonconcentration<T: Real>(e: &DirectionSet<T>, s: f64) -> Result<DirectionNonConReport> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(invalid("s", format!("{s} outside (0, 1]")));
    }
    let scale = e.scale();
    let delta = scale.delta::<T>();
    let tol = T::sep_tolerance(delta);
    let tau = T::TAU();
    let angles: Vec<T> = e.directions().iter().map(|d| d.theta()).collect();
    let n = angles.len();
    if n == 0 {
        return Ok(DirectionNonConReport {
            report: NonConReport {
                s,
                constant: 0.0,
                witness: None,
            },
            min_gap: f64::INFINITY,
            delta_s_separated: true,
        });
    }
    let mut extended = Vec::with_capacity(3 * n);
    extended.extend(angles.iter().map(|&a| a - tau));
    extended.extend(angles.iter().copied());
    extended.extend(angles.iter().map(|&a| a + tau));

    let mut report = NonConReport {
        s,
        constant: 0.0,
        witness: None,
    };
    for &c in &angles {
        for k in 0..=scale.m() {
            let r = delta * T::lit((k as f64).exp2()) + tol;
            let lo = extended.partition_point(|&a| a < c - r);
            let hi = extended.partition_point(|&a| a <= c + r);
            let count = (hi - lo).min(n);
            let ratio = count as f64 / (k as f64 * s).exp2();
            if ratio > report.constant {
                report.constant = ratio;
                report.witness = Some(Witness {
                    center: vec![c.to_f64_lossy()],
                    radius: scale.delta_f64() * (k as f64).exp2(),
                    count,
                });
            }
        }
    }

    let min_gap = if n == 1 {
        f64::INFINITY
    } else {
        let mut g = (angles[0] + tau - angles[n - 1]).to_f64_lossy();
        for w in angles.windows(2) {
            g = g.min((w[1] - w[0]).to_f64_lossy());
        }
        g
    };
    let sep = scale.delta_pow(s) - tol.to_f64_lossy();
    Ok(DirectionNonConReport {
        report,
        min_gap,
        delta_s_separated: min_gap >= sep,
    })
}
