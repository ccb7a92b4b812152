//! 2δ-tube partitions, tube energies, E₀ selection, pruning and fan search.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{Point2, Scale};
use crate::projections::{Direction, DirectionSet};
use crate::scalar::Real;
use crate::sets::PointSet2D;

/// Upper end of the admissible range for `s`.
pub const S_MAX: f64 = 2.0 - std::f64::consts::SQRT_2;

/// Fraction of multi-point-tube mass that pruning must retain.
pub const RETENTION_TARGET: f64 = 0.9;

/// The slab `{x : 2nδ <= e·x < 2(n+1)δ}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tube<T> {
    pub e: Direction<T>,
    pub index: i64,
}

impl<T: Real> Tube<T> {
    pub fn new(e: Direction<T>, index: i64) -> Self {
        Self { e, index }
    }

    /// `(2n+1)δ`.
    pub fn center_offset(&self, scale: Scale) -> T {
        scale.delta::<T>() * T::lit((2 * self.index + 1) as f64)
    }

    pub fn contains(&self, x: Point2<T>, scale: Scale) -> bool {
        tube_index(x, self.e, scale) == self.index
    }
}

/// `floor(e·x / 2δ)`; a point on a slab boundary belongs to the upper slab.
pub fn tube_index<T: Real>(x: Point2<T>, e: Direction<T>, scale: Scale) -> i64 {
    e.unit().dot(x).cell(scale.delta::<T>() * T::lit(2.0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TubeEnergy<T> {
    pub tube: Tube<T>,
    pub value: T,
    pub point_count: usize,
}

/// Constants and exponents of the fan argument. Every threshold used by the
/// tube and sum-counting stages is derived from these fields.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FanParams {
    pub s: f64,
    pub sigma: f64,
    pub tau: f64,
    pub c_avg: f64,
    /// Exponent constant `c` in the σ-good threshold.
    pub good_c: f64,
    /// Exceptional-set constant: `N_δ(A + tA) <= C_E δ^-s`.
    pub c_e: f64,
    /// Multiplier on `D` in the bad-tube threshold.
    pub c_bad: f64,
    pub c_fan: f64,
    pub c_heavy: f64,
    pub c_near: f64,
    pub c_rich: f64,
    /// Constant in the per-cell collision bound.
    pub k_mult: f64,
}

impl FanParams {
    pub fn new(s: f64, sigma: f64) -> Self {
        Self {
            s,
            sigma,
            tau: Self::default_tau(s, sigma),
            c_avg: 4.0,
            good_c: 2.0,
            c_e: 4.0,
            c_bad: 1.0,
            c_fan: 1.0 / 16.0,
            c_heavy: 1.0 / 16.0,
            c_near: 16.0,
            c_rich: 1.0 / 16.0,
            k_mult: 1.0,
        }
    }

    pub fn default_tau(s: f64, sigma: f64) -> f64 {
        2.0 * (s - sigma) / (1.0 - s)
    }

    /// Smallest admissible τ (exclusive).
    pub fn tau_floor(&self) -> f64 {
        (self.s - self.sigma) / (1.0 - self.s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.s >= 0.5 && self.s < S_MAX) {
            return Err(invalid("s", format!("{} outside [1/2, 2 - sqrt 2)", self.s)));
        }
        if !(self.sigma > 0.0 && self.sigma < self.s) {
            return Err(invalid("sigma", format!("{} outside (0, s = {})", self.sigma, self.s)));
        }
        if !(self.tau > self.tau_floor()) {
            return Err(invalid(
                "tau",
                format!("{} must exceed (s - sigma)/(1 - s) = {}", self.tau, self.tau_floor()),
            ));
        }
        if !(self.c_e >= 1.0) {
            return Err(invalid("c_e", format!("{} < 1", self.c_e)));
        }
        for (name, v) in [
            ("c_avg", self.c_avg),
            ("good_c", self.good_c),
            ("c_bad", self.c_bad),
            ("c_fan", self.c_fan),
            ("c_heavy", self.c_heavy),
            ("c_near", self.c_near),
            ("c_rich", self.c_rich),
            ("k_mult", self.k_mult),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(name, format!("{v} must be positive and finite")));
            }
        }
        Ok(())
    }

    /// `max(τ, c(s - σ))`.
    pub fn kappa(&self) -> f64 {
        self.tau.max(self.good_c * (self.s - self.sigma))
    }

    /// `⌈C_E δ^-s⌉`, the tube budget per direction.
    pub fn tube_budget(&self, scale: Scale) -> usize {
        (self.c_e * scale.delta_pow(-self.s)).ceil() as usize
    }

    /// `C_avg δ^(σ+s-2) log(1/δ)`.
    pub fn average_threshold(&self, scale: Scale) -> f64 {
        self.c_avg * scale.delta_pow(self.sigma + self.s - 2.0) * scale.log_inv_delta()
    }

    /// `D = C_avg^(3/2) sqrt(log 1/δ) δ^((σ-s)/2)`.
    pub fn d_factor(&self, scale: Scale) -> f64 {
        self.c_avg.powf(1.5) * scale.log_inv_delta().sqrt() * scale.delta_pow((self.sigma - self.s) / 2.0)
    }

    pub fn bad_threshold(&self, scale: Scale) -> f64 {
        self.c_bad
            * self.d_factor(scale)
            * scale.delta_pow(self.sigma + self.s - 2.0)
            * scale.log_inv_delta()
    }

    /// `c_fan δ^(τ-1)`.
    pub fn fan_threshold(&self, scale: Scale) -> f64 {
        self.c_fan * scale.delta_pow(self.tau - 1.0)
    }

    /// `c_heavy δ^(s-1-2κ) log^(3/2)(1/δ)`.
    pub fn heavy_threshold(&self, scale: Scale) -> f64 {
        self.c_heavy
            * scale.delta_pow(self.s - 1.0 - 2.0 * self.kappa())
            * scale.log_inv_delta().powf(1.5)
    }

    /// `C_near δ^(1-s)`.
    pub fn near_radius(&self, scale: Scale) -> f64 {
        self.c_near * scale.delta_pow(1.0 - self.s)
    }

    /// `c_rich δ^(κ+s-1)`.
    pub fn rich_threshold(&self, scale: Scale) -> f64 {
        self.c_rich * scale.delta_pow(self.kappa() + self.s - 1.0)
    }

    /// `δ^(4κ-s)`, the rich-tube count expected when the fan has full mass.
    pub fn rich_count_target(&self, scale: Scale) -> f64 {
        scale.delta_pow(4.0 * self.kappa() - self.s)
    }

    /// `K_mult δ^(s(s-1)-3κ)`.
    pub fn collision_bound(&self, scale: Scale) -> f64 {
        self.k_mult * scale.delta_pow(self.s * (self.s - 1.0) - 3.0 * self.kappa())
    }
}

/// Tubes of one direction, keyed by slab index, holding indices into `B`.
#[derive(Clone, Debug, PartialEq)]
pub struct TubeFamily<T> {
    pub e: Direction<T>,
    pub tubes: BTreeMap<i64, Vec<usize>>,
    /// Slab index of every point of `B`.
    pub point_tube: Vec<i64>,
}

impl<T: Real> TubeFamily<T> {
    pub fn build(b: &PointSet2D<T>, e: Direction<T>) -> Self {
        let scale = b.scale();
        let point_tube: Vec<i64> = b.points().iter().map(|&x| tube_index(x, e, scale)).collect();
        let mut tubes: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for (i, &n) in point_tube.iter().enumerate() {
            tubes.entry(n).or_default().push(i);
        }
        Self { e, tubes, point_tube }
    }

    pub fn nonempty(&self) -> usize {
        self.tubes.len()
    }
}

fn energy_of<T: Real>(points: &[Point2<T>], members: &[usize], exponent: T) -> Result<T> {
    let mut total = T::zero();
    for (a, &i) in members.iter().enumerate() {
        let mut row = T::zero();
        for &j in &members[a + 1..] {
            let d = points[i].dist(points[j]);
            if d == T::zero() {
                return Err(Error::CoincidentPoints(i, j));
            }
            row = row + d.powf(exponent);
        }
        total = total + row;
    }
    Ok(total * T::lit(2.0))
}

/// `Σ_{x≠y ∈ B∩T} |x - y|^(s-1)` over ordered pairs.
pub fn tube_energy<T: Real>(b: &PointSet2D<T>, tube: Tube<T>, s: f64) -> Result<TubeEnergy<T>> {
    if !(s > 0.0 && s < 1.0) {
        return Err(invalid("s", format!("{s} outside (0, 1)")));
    }
    let scale = b.scale();
    let members: Vec<usize> = (0..b.len())
        .filter(|&i| tube.contains(b.points()[i], scale))
        .collect();
    Ok(TubeEnergy {
        tube,
        value: energy_of(b.points(), &members, T::lit(s - 1.0))?,
        point_count: members.len(),
    })
}

/// `Σ_{x≠y} |x - y|^-1` over ordered pairs. Rows are summed in parallel and
/// combined in index order, so the result does not depend on the pool size.
pub fn riesz_sum<T: Real>(b: &PointSet2D<T>) -> Result<T> {
    let pts = b.points();
    let rows: Vec<Result<T>> = (0..pts.len())
        .into_par_iter()
        .map(|i| {
            let mut row = T::zero();
            for (j, &q) in pts.iter().enumerate() {
                if j == i {
                    continue;
                }
                let d = pts[i].dist(q);
                if d == T::zero() {
                    return Err(Error::CoincidentPoints(i.min(j), i.max(j)));
                }
                row = row + d.recip();
            }
            Ok(row)
        })
        .collect();
    let mut total = T::zero();
    for r in rows {
        total = total + r?;
    }
    Ok(total)
}

/// Tube family of one direction together with its energies.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectionAnalysis<T> {
    pub family: TubeFamily<T>,
    /// Energies in slab-index order.
    pub energies: Vec<TubeEnergy<T>>,
    /// Tube count used for averaging: nonempty tubes clipped to the budget.
    pub n_used: usize,
    pub average: f64,
    /// More nonempty tubes than `⌈C_E δ^-s⌉`.
    pub over_budget: bool,
}

pub fn analyze_direction<T: Real>(b: &PointSet2D<T>, e: Direction<T>, params: &FanParams) -> Result<DirectionAnalysis<T>> {
    let family = TubeFamily::build(b, e);
    let exponent = T::lit(params.s - 1.0);
    let energies = family
        .tubes
        .iter()
        .map(|(&n, members)| {
            Ok(TubeEnergy {
                tube: Tube::new(e, n),
                value: energy_of(b.points(), members, exponent)?,
                point_count: members.len(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let budget = params.tube_budget(b.scale());
    let n_used = family.nonempty().min(budget).max(1);
    let total: f64 = energies.iter().map(|t| t.value.to_f64_lossy()).sum();
    Ok(DirectionAnalysis {
        over_budget: family.nonempty() > budget,
        average: total / n_used as f64,
        n_used,
        energies,
        family,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct E0Selection<T> {
    pub analyses: Vec<DirectionAnalysis<T>>,
    /// Indices into `analyses` of the kept directions.
    pub kept: Vec<usize>,
    pub threshold: f64,
    /// Mean over directions of the per-direction average energy.
    pub global_average: f64,
    /// The global average is at most half the threshold, so Markov's
    /// inequality forces `|E₀| >= |E|/2`.
    pub markov_applies: bool,
    /// `markov_applies` holds but fewer than half of the directions survived.
    pub markov_violated: bool,
    pub over_budget: usize,
    pub diagnostic: Option<String>,
}

impl<T: Real> E0Selection<T> {
    pub fn kept_directions(&self, scale: Scale) -> DirectionSet<T> {
        DirectionSet::new(
            self.kept.iter().map(|&i| self.analyses[i].family.e).collect(),
            scale,
            None,
        )
    }

    pub fn retained_fraction(&self) -> f64 {
        if self.analyses.is_empty() {
            return 0.0;
        }
        self.kept.len() as f64 / self.analyses.len() as f64
    }

    pub fn kept_analyses(&self) -> impl Iterator<Item = &DirectionAnalysis<T>> {
        self.kept.iter().map(|&i| &self.analyses[i])
    }
}

/// Keeps the directions whose average tube energy is below
/// `C_avg δ^(σ+s-2) log(1/δ)`.
pub fn select_e0<T: Real>(b: &PointSet2D<T>, e: &DirectionSet<T>, params: &FanParams) -> Result<E0Selection<T>> {
    params.validate()?;
    if e.is_empty() {
        return Err(Error::NoDirections);
    }
    let analyses = e
        .directions()
        .par_iter()
        .map(|&d| analyze_direction(b, d, params))
        .collect::<Result<Vec<_>>>()?;
    let threshold = params.average_threshold(b.scale());
    let kept: Vec<usize> = (0..analyses.len())
        .filter(|&i| analyses[i].average < threshold)
        .collect();
    let global_average = analyses.iter().map(|a| a.average).sum::<f64>() / analyses.len() as f64;
    let markov_applies = global_average <= threshold / 2.0;
    let markov_violated = markov_applies && 2 * kept.len() < analyses.len();
    let over_budget = analyses.iter().filter(|a| a.over_budget).count();
    let diagnostic = if kept.is_empty() {
        Some(format!(
            "all {} directions discarded: smallest average energy {:.6e} vs threshold {:.6e}",
            analyses.len(),
            analyses.iter().map(|a| a.average).fold(f64::INFINITY, f64::min),
            threshold
        ))
    } else {
        None
    };
    Ok(E0Selection {
        analyses,
        kept,
        threshold,
        global_average,
        markov_applies,
        markov_violated,
        over_budget,
        diagnostic,
    })
}

/// Surviving tubes of one direction after the bad-tube and single-point
/// discards.
#[derive(Clone, Debug, PartialEq)]
pub struct PrunedFamily<T> {
    pub e: Direction<T>,
    pub tubes: BTreeMap<i64, Vec<usize>>,
    pub point_tube: Vec<i64>,
    pub threshold: f64,
    /// Points in multi-point tubes before the energy discard.
    pub coverage_before: usize,
    pub coverage_after: usize,
    pub single_point_dropped: usize,
    pub energy_dropped: usize,
}

impl<T: Real> PrunedFamily<T> {
    pub fn coverage_ratio(&self) -> f64 {
        if self.coverage_before == 0 {
            1.0
        } else {
            self.coverage_after as f64 / self.coverage_before as f64
        }
    }

    pub fn flagged(&self) -> bool {
        self.coverage_ratio() < RETENTION_TARGET
    }

    /// Surviving tube containing point `i`, if any.
    pub fn tube_of(&self, i: usize) -> Option<(i64, &[usize])> {
        let n = self.point_tube[i];
        self.tubes.get(&n).map(|m| (n, m.as_slice()))
    }
}

pub fn prune_bad_tubes<T: Real>(analysis: &DirectionAnalysis<T>, scale: Scale, params: &FanParams) -> PrunedFamily<T> {
    let threshold = params.bad_threshold(scale);
    let mut tubes = BTreeMap::new();
    let (mut before, mut after, mut singles, mut dropped) = (0, 0, 0, 0);
    for t in &analysis.energies {
        if t.point_count < 2 {
            singles += 1;
            continue;
        }
        before += t.point_count;
        if t.value.to_f64_lossy() >= threshold {
            dropped += 1;
            continue;
        }
        after += t.point_count;
        tubes.insert(t.tube.index, analysis.family.tubes[&t.tube.index].clone());
    }
    PrunedFamily {
        e: analysis.family.e,
        tubes,
        point_tube: analysis.family.point_tube.clone(),
        threshold,
        coverage_before: before,
        coverage_after: after,
        single_point_dropped: singles,
        energy_dropped: dropped,
    }
}

/// Runs E₀ selection and pruning; the families come back in direction order.
pub fn pruned_families<T: Real>(
    b: &PointSet2D<T>,
    e: &DirectionSet<T>,
    params: &FanParams,
) -> Result<(E0Selection<T>, Vec<PrunedFamily<T>>)> {
    let sel = select_e0(b, e, params)?;
    let fams = sel
        .kept_analyses()
        .map(|a| prune_bad_tubes(a, b.scale(), params))
        .collect();
    Ok((sel, fams))
}

/// `Σ_{b≠b'} #{e : b, b' share a surviving tube of e}`.
pub fn count_related_pairs<T: Real>(families: &[PrunedFamily<T>]) -> u64 {
    families
        .iter()
        .flat_map(|f| f.tubes.values())
        .map(|m| (m.len() as u64) * (m.len() as u64 - 1))
        .sum()
}

/// Number of directions for which `i` and `j` share a surviving tube.
pub fn related_directions<T: Real>(families: &[PrunedFamily<T>], i: usize, j: usize) -> usize {
    families
        .iter()
        .filter(|f| f.point_tube[i] == f.point_tube[j] && f.tubes.contains_key(&f.point_tube[i]))
        .count()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Fan<T> {
    pub apex_index: usize,
    pub apex: Point2<T>,
    /// One tube per direction of `E'`, in direction order.
    pub tubes: Vec<Tube<T>>,
    pub tube_members: Vec<Vec<usize>>,
    /// `G(b₀)` as sorted indices into `B`.
    pub members: Vec<usize>,
    pub tau: f64,
    pub threshold: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoFanReport {
    pub best_apex_index: Option<usize>,
    pub best_mass: usize,
    pub threshold: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum FanOutcome<T> {
    Found(Fan<T>),
    NoFan(NoFanReport),
}

impl<T: Real> FanOutcome<T> {
    pub fn fan(&self) -> Option<&Fan<T>> {
        match self {
            FanOutcome::Found(f) => Some(f),
            FanOutcome::NoFan(_) => None,
        }
    }
}

impl<T: Real> Fan<T> {
    pub fn mass(&self) -> usize {
        self.members.len()
    }

    pub fn directions(&self) -> Vec<Direction<T>> {
        self.tubes.iter().map(|t| t.e).collect()
    }

    /// `|B ∩ ⋃ tubes|` counted from scratch.
    pub fn recount(&self, b: &PointSet2D<T>) -> usize {
        let scale = b.scale();
        b.points()
            .iter()
            .filter(|&&x| self.tubes.iter().any(|t| t.contains(x, scale)))
            .count()
    }

    fn assemble(b: &PointSet2D<T>, apex_index: usize, tubes: Vec<Tube<T>>, tube_members: Vec<Vec<usize>>, tau: f64, threshold: f64) -> Self {
        let mut members: Vec<usize> = tube_members.iter().flatten().copied().collect();
        members.sort_unstable();
        members.dedup();
        Self {
            apex_index,
            apex: b.points()[apex_index],
            tubes,
            tube_members,
            members,
            tau,
            threshold,
        }
    }

    pub fn to_record(&self) -> String {
        let mut out = String::new();
        writeln!(out, "fan.apex_index={}", self.apex_index).unwrap();
        writeln!(out, "fan.apex={},{}", self.apex.x, self.apex.y).unwrap();
        writeln!(out, "fan.tau={}", self.tau).unwrap();
        writeln!(out, "fan.threshold={}", self.threshold).unwrap();
        writeln!(out, "fan.member_count={}", self.members.len()).unwrap();
        for (k, (t, m)) in self.tubes.iter().zip(&self.tube_members).enumerate() {
            writeln!(out, "fan.tube.{k}={},{},{}", t.e.theta(), t.index, m.len()).unwrap();
        }
        out
    }

    /// Rebuilds a fan over `b` from [`Fan::to_record`] output, recomputing
    /// every membership and checking the recorded counts.
    pub fn from_record(text: &str, b: &PointSet2D<T>) -> Result<Self> {
        let perr = |line: usize, msg: String| Error::Parse { line, msg };
        let mut apex_index = None;
        let mut tau = None;
        let mut threshold = None;
        let mut count = None;
        let mut tubes = Vec::new();
        let mut counts = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| perr(ln + 1, format!("expected key=value, got `{line}`")))?;
            let num = |s: &str| s.trim().parse::<f64>().map_err(|e| perr(ln + 1, e.to_string()));
            match k.trim() {
                "fan.apex_index" => apex_index = Some(v.trim().parse::<usize>().map_err(|e| perr(ln + 1, e.to_string()))?),
                "fan.apex" => {}
                "fan.tau" => tau = Some(num(v)?),
                "fan.threshold" => threshold = Some(num(v)?),
                "fan.member_count" => count = Some(num(v)? as usize),
                key if key.starts_with("fan.tube.") => {
                    let parts: Vec<&str> = v.split(',').collect();
                    if parts.len() != 3 {
                        return Err(perr(ln + 1, "tube needs theta,index,count".into()));
                    }
                    let theta: T = parts[0].trim().parse().map_err(|_| perr(ln + 1, format!("bad angle `{}`", parts[0])))?;
                    let index: i64 = parts[1].trim().parse().map_err(|e: std::num::ParseIntError| perr(ln + 1, e.to_string()))?;
                    tubes.push(Tube::new(Direction::from_angle(theta), index));
                    counts.push(num(parts[2])? as usize);
                }
                other => return Err(perr(ln + 1, format!("unknown key `{other}`"))),
            }
        }
        let missing = |f: &str| perr(0, format!("missing {f}"));
        let apex_index = apex_index.ok_or_else(|| missing("fan.apex_index"))?;
        if apex_index >= b.len() {
            return Err(perr(0, format!("apex index {apex_index} out of range")));
        }
        let scale = b.scale();
        let tube_members: Vec<Vec<usize>> = tubes
            .iter()
            .map(|t| (0..b.len()).filter(|&i| t.contains(b.points()[i], scale)).collect())
            .collect();
        for (k, (m, &c)) in tube_members.iter().zip(&counts).enumerate() {
            if m.len() != c {
                return Err(perr(0, format!("tube {k}: recorded {c} members, recomputed {}", m.len())));
            }
        }
        let fan = Self::assemble(
            b,
            apex_index,
            tubes,
            tube_members,
            tau.ok_or_else(|| missing("fan.tau"))?,
            threshold.ok_or_else(|| missing("fan.threshold"))?,
        );
        let count = count.ok_or_else(|| missing("fan.member_count"))?;
        if fan.mass() != count {
            return Err(perr(0, format!("recorded {count} members, recomputed {}", fan.mass())));
        }
        Ok(fan)
    }
}

/// `|G(b)|` for every `b ∈ B`.
pub fn fan_masses<T: Real>(n: usize, families: &[PrunedFamily<T>]) -> Vec<usize> {
    (0..n)
        .into_par_iter()
        .map_init(
            || vec![usize::MAX; n],
            |stamp, b| {
                let mut mass = 0;
                for f in families {
                    if let Some((_, members)) = f.tube_of(b) {
                        for &x in members {
                            if stamp[x] != b {
                                stamp[x] = b;
                                mass += 1;
                            }
                        }
                    }
                }
                mass
            },
        )
        .collect()
}

/// Apex maximizing `|G(b)|` (ties go to the lexicographically smallest
/// point); a fan is reported when the mass reaches `c_fan δ^(τ-1)`.
pub fn find_fan<T: Real>(b: &PointSet2D<T>, families: &[PrunedFamily<T>], params: &FanParams) -> FanOutcome<T> {
    let threshold = params.fan_threshold(b.scale());
    let masses = fan_masses(b.len(), families);
    let pts = b.points();
    let best = (0..b.len()).min_by(|&i, &j| masses[j].cmp(&masses[i]).then_with(|| pts[i].lex_cmp(&pts[j])));
    let Some(apex) = best else {
        return FanOutcome::NoFan(NoFanReport {
            best_apex_index: None,
            best_mass: 0,
            threshold,
        });
    };
    if (masses[apex] as f64) < threshold {
        return FanOutcome::NoFan(NoFanReport {
            best_apex_index: Some(apex),
            best_mass: masses[apex],
            threshold,
        });
    }
    let mut tubes = Vec::new();
    let mut tube_members = Vec::new();
    for f in families {
        if let Some((n, members)) = f.tube_of(apex) {
            tubes.push(Tube::new(f.e, n));
            tube_members.push(members.to_vec());
        }
    }
    FanOutcome::Found(Fan::assemble(b, apex, tubes, tube_members, params.tau, threshold))
}
