//! Post-fan processing and the vector-sum count: quartile restriction, heavy
//! and near-apex pruning, rich tubes, white regions and the full pipeline.

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{Point2, Scale};
use crate::projections::{direction_nonconcentration, exceptional_parameters, sumset_entropy, DirectionSet};
use crate::scalar::Real;
use crate::sets::{product_set, PointCloud, PointSet1D, PointSet2D};
use crate::tubes::{find_fan, pruned_families, tube_index, Fan, FanOutcome, FanParams, Tube, RETENTION_TARGET};

/// Budget on the `(δ, 1/2)` constant of the input set.
pub const INPUT_NONCON_BUDGET: f64 = 8.0;
/// Assumed `(δ, 1)` constant when bounding the near-apex removal.
pub const NEAR_APEX_CONSTANT: f64 = 8.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Quadrant {
    NE,
    NW,
    SW,
    SE,
}

impl Quadrant {
    pub const ALL: [Quadrant; 4] = [Quadrant::NE, Quadrant::NW, Quadrant::SW, Quadrant::SE];

    /// Half-open quadrants partitioning the plane minus the origin.
    pub fn of<T: Real>(v: Point2<T>) -> Option<Self> {
        let z = T::zero();
        if v.x > z && v.y >= z {
            Some(Quadrant::NE)
        } else if v.x <= z && v.y > z {
            Some(Quadrant::NW)
        } else if v.x < z && v.y <= z {
            Some(Quadrant::SW)
        } else if v.x >= z && v.y < z {
            Some(Quadrant::SE)
        } else {
            None
        }
    }

    /// Counter-clockwise boundary ray.
    pub fn base<T: Real>(self) -> Point2<T> {
        let (o, z) = (T::one(), T::zero());
        match self {
            Quadrant::NE => Point2::new(o, z),
            Quadrant::NW => Point2::new(z, o),
            Quadrant::SW => Point2::new(-o, z),
            Quadrant::SE => Point2::new(z, -o),
        }
    }

    /// Angle of `u` measured from [`Quadrant::base`], in `(-π, π]`.
    pub fn relative_angle<T: Real>(self, u: Point2<T>) -> f64 {
        let b = self.base::<T>();
        b.cross(u).to_f64_lossy().atan2(b.dot(u).to_f64_lossy())
    }
}

/// A fan tube together with its outward ray and current members.
#[derive(Clone, Debug, PartialEq)]
pub struct ViewTube<T> {
    pub tube: Tube<T>,
    /// Unit vector along the tube pointing into the chosen quadrant.
    pub ray: Point2<T>,
    pub rel_angle: f64,
    pub members: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FanView<T> {
    pub apex_index: usize,
    pub apex: Point2<T>,
    pub quadrant: Quadrant,
    pub tubes: Vec<ViewTube<T>>,
}

impl<T: Real> FanView<T> {
    pub fn mass(&self) -> usize {
        let mut all: Vec<usize> = self.tubes.iter().flat_map(|t| t.members.iter().copied()).collect();
        all.sort_unstable();
        all.dedup();
        all.len()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuartileReport {
    pub quadrant: Quadrant,
    /// Fan members (apex excluded) in NE, NW, SW, SE.
    pub quadrant_counts: [usize; 4],
    pub input_mass: usize,
    pub retained: usize,
    /// A quarter of the fan threshold.
    pub budget: f64,
}

/// Keeps the quadrant around the apex holding the most fan members and the
/// tubes whose direction points into it.
pub fn quartile_filter<T: Real>(fan: &Fan<T>, b: &PointSet2D<T>) -> (FanView<T>, QuartileReport) {
    let pts = b.points();
    let mut counts = [0usize; 4];
    for &i in &fan.members {
        if let Some(q) = Quadrant::of(pts[i] - fan.apex) {
            counts[q as usize] += 1;
        }
    }
    let best = (0..4).fold(0, |acc, k| if counts[k] > counts[acc] { k } else { acc });
    let quadrant = Quadrant::ALL[best];
    let slack = 1e-12;
    let mut tubes = Vec::new();
    for (t, m) in fan.tubes.iter().zip(&fan.tube_members) {
        let d = t.e.unit().perp();
        let ray = [d, -d]
            .into_iter()
            .map(|u| (u, quadrant.relative_angle(u)))
            .find(|&(_, a)| a >= -slack && a <= FRAC_PI_2 + slack);
        let Some((ray, rel_angle)) = ray else { continue };
        let members = m
            .iter()
            .copied()
            .filter(|&i| Quadrant::of(pts[i] - fan.apex) == Some(quadrant))
            .collect();
        tubes.push(ViewTube {
            tube: *t,
            ray,
            rel_angle,
            members,
        });
    }
    tubes.sort_by(|a, b| a.rel_angle.total_cmp(&b.rel_angle));
    let view = FanView {
        apex_index: fan.apex_index,
        apex: fan.apex,
        quadrant,
        tubes,
    };
    let report = QuartileReport {
        quadrant,
        quadrant_counts: counts,
        input_mass: fan.mass(),
        retained: view.mass(),
        budget: fan.threshold / 4.0,
    };
    (view, report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeavyReport {
    pub threshold: f64,
    pub input_mass: usize,
    pub removed: usize,
    pub surviving: usize,
    pub max_energy_kept: f64,
    /// Fewer than half of the input points survived.
    pub flagged: bool,
}

/// Drops every member whose in-tube energy `Σ_y |x - y|^(s-1)` reaches
/// `c_heavy δ^(s-1-2κ) log^(3/2)(1/δ)`.
pub fn prune_heavy_points<T: Real>(view: &FanView<T>, b: &PointSet2D<T>, params: &FanParams) -> (FanView<T>, HeavyReport) {
    let threshold = params.heavy_threshold(b.scale());
    let exponent = T::lit(params.s - 1.0);
    let pts = b.points();
    let per_tube: Vec<(Vec<usize>, f64)> = view
        .tubes
        .par_iter()
        .map(|t| {
            let mut kept = Vec::with_capacity(t.members.len());
            let mut max_kept = 0.0f64;
            for &x in &t.members {
                let energy: T = t
                    .members
                    .iter()
                    .filter(|&&y| y != x)
                    .map(|&y| pts[x].dist(pts[y]).powf(exponent))
                    .sum();
                let energy = energy.to_f64_lossy();
                if energy < threshold {
                    kept.push(x);
                    max_kept = max_kept.max(energy);
                }
            }
            (kept, max_kept)
        })
        .collect();
    let mut out = view.clone();
    let mut max_energy_kept = 0.0f64;
    for (t, (kept, mx)) in out.tubes.iter_mut().zip(per_tube) {
        t.members = kept;
        max_energy_kept = max_energy_kept.max(mx);
    }
    let input_mass = view.mass();
    let surviving = out.mass();
    let report = HeavyReport {
        threshold,
        input_mass,
        removed: input_mass - surviving,
        surviving,
        max_energy_kept,
        flagged: 2 * surviving < input_mass,
    };
    (out, report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NearApexReport {
    pub radius: f64,
    pub removed: usize,
    /// `8 C_near δ^-s`.
    pub bound: f64,
    pub over_bound: bool,
    pub emptied: bool,
}

/// Removes members within `C_near δ^(1-s)` of the apex.
pub fn remove_near_apex<T: Real>(view: &FanView<T>, b: &PointSet2D<T>, params: &FanParams) -> (FanView<T>, NearApexReport) {
    let scale = b.scale();
    let radius = params.near_radius(scale);
    let r = T::lit(radius);
    let pts = b.points();
    let mut out = view.clone();
    for t in &mut out.tubes {
        t.members.retain(|&i| pts[i].dist(view.apex) > r);
    }
    let removed = view.mass() - out.mass();
    let bound = NEAR_APEX_CONSTANT * params.c_near * scale.delta_pow(-params.s);
    let report = NearApexReport {
        radius,
        removed,
        bound,
        over_bound: removed as f64 > bound,
        emptied: out.mass() == 0 && view.mass() > 0,
    };
    (out, report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RichReport {
    pub threshold: f64,
    pub candidates: usize,
    pub kept: usize,
    /// `c_rich δ^(4κ-s)`.
    pub count_target: f64,
    pub below_target: bool,
}

/// Tubes with at least `c_rich δ^(κ+s-1)` members, in angular order.
pub fn select_rich_tubes<T: Real>(view: &FanView<T>, scale: Scale, params: &FanParams) -> Result<(Vec<ViewTube<T>>, RichReport)> {
    let threshold = params.rich_threshold(scale);
    let mut rich: Vec<ViewTube<T>> = view
        .tubes
        .iter()
        .filter(|t| t.members.len() as f64 >= threshold)
        .cloned()
        .collect();
    rich.sort_by(|a, b| a.rel_angle.total_cmp(&b.rel_angle));
    if rich.len() < 2 {
        return Err(Error::TooFewRichTubes(rich.len()));
    }
    let count_target = params.c_rich * params.rich_count_target(scale);
    let report = RichReport {
        threshold,
        candidates: view.tubes.len(),
        kept: rich.len(),
        count_target,
        below_target: (rich.len() as f64) < count_target,
    };
    Ok((rich, report))
}

/// Cone at `b₀` between the rays of two consecutive rich tubes, outside both
/// tubes.
#[derive(Clone, Debug, PartialEq)]
pub struct WhiteRegion<T> {
    pub j: usize,
    pub apex: Point2<T>,
    pub lower: Tube<T>,
    pub upper: Tube<T>,
    pub lower_ray: Point2<T>,
    pub upper_ray: Point2<T>,
    pub exclusion_radius: f64,
    pub scale: Scale,
}

impl<T: Real> WhiteRegion<T> {
    pub fn new(j: usize, apex: Point2<T>, lower: &ViewTube<T>, upper: &ViewTube<T>, exclusion_radius: f64, scale: Scale) -> Self {
        Self {
            j,
            apex,
            lower: lower.tube,
            upper: upper.tube,
            lower_ray: lower.ray,
            upper_ray: upper.ray,
            exclusion_radius,
            scale,
        }
    }
}

/// True iff `q` lies past the far edge of the lower tube (on the side of the
/// upper ray) and short of the near edge of the upper tube.
pub fn white_region_membership<T: Real>(w: &WhiteRegion<T>, q: Point2<T>) -> bool {
    let z = T::zero();
    let nu_lo = w.lower_ray.perp();
    let nu_hi = w.upper_ray.perp();
    let n_lo = tube_index(q, w.lower.e, w.scale);
    let n_hi = tube_index(q, w.upper.e, w.scale);
    let past_lower = if w.lower.e.unit().dot(nu_lo) > z {
        n_lo > w.lower.index
    } else {
        n_lo < w.lower.index
    };
    let before_upper = if w.upper.e.unit().dot(nu_hi) > z {
        n_hi < w.upper.index
    } else {
        n_hi > w.upper.index
    };
    past_lower && before_upper
}

pub fn white_regions<T: Real>(view: &FanView<T>, rich: &[ViewTube<T>], scale: Scale, params: &FanParams) -> Vec<WhiteRegion<T>> {
    let r = params.near_radius(scale);
    rich.windows(2)
        .enumerate()
        .map(|(j, w)| WhiteRegion::new(j, view.apex, &w[0], &w[1], r, scale))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionCount {
    pub j: usize,
    pub pairs: usize,
    /// Distinct δ-cells of `x + y` over sums landing in `W_j`.
    pub cells: usize,
    /// Sums `(x + y) - b₀` outside `W_j`.
    pub violations: usize,
    pub max_multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SumCountReport {
    pub regions: Vec<RegionCount>,
    /// `Σ_j` cells.
    pub total: usize,
    /// Distinct cells over all regions; at most `N_δ(A+A)²` for `B = A×A`.
    pub union_cells: usize,
    pub n_rich: usize,
    pub kappa: f64,
    pub violations: usize,
    pub max_multiplicity: usize,
    pub collision_bound: f64,
    pub collision_flag: bool,
    /// `9κ + 2s - s² - 2`.
    pub target_exponent: f64,
    /// `total / δ^target_exponent`.
    pub measured_constant: f64,
    /// `sqrt(union_cells)`, a lower bound for `N_δ(A+A)` when `B = A×A`.
    pub sumset_lower_bound: f64,
}

fn region_cells<T: Real>(w: &WhiteRegion<T>, xs: &[usize], ys: &[usize], pts: &[Point2<T>]) -> (Vec<(i64, i64)>, RegionCount) {
    let delta = w.scale.delta::<T>();
    let mut cells = Vec::with_capacity(xs.len() * ys.len());
    let mut violations = 0;
    for &x in xs {
        for &y in ys {
            let sum = pts[x] + pts[y];
            if white_region_membership(w, sum - w.apex) {
                cells.push(sum.cell(delta));
            } else {
                violations += 1;
            }
        }
    }
    cells.sort_unstable();
    let mut max_multiplicity = 0;
    let mut distinct = Vec::new();
    let mut k = 0;
    while k < cells.len() {
        let run = cells[k..].iter().take_while(|&&c| c == cells[k]).count();
        max_multiplicity = max_multiplicity.max(run);
        distinct.push(cells[k]);
        k += run;
    }
    let count = RegionCount {
        j: w.j,
        pairs: xs.len() * ys.len(),
        cells: distinct.len(),
        violations,
        max_multiplicity,
    };
    (distinct, count)
}

/// Counts δ-cells of the sums `x + y`, `x ∈ T_j`, `y ∈ T_{j+1}`, whose
/// shifted point `(x + y) - b₀` falls in `W_j`.
pub fn count_separated_sums<T: Real>(
    view: &FanView<T>,
    rich: &[ViewTube<T>],
    b: &PointSet2D<T>,
    params: &FanParams,
) -> Result<SumCountReport> {
    if rich.len() < 2 {
        return Err(Error::TooFewRichTubes(rich.len()));
    }
    let scale = b.scale();
    let required = scale.delta_pow(params.s) / 2.0;
    for (j, w) in rich.windows(2).enumerate() {
        let gap = w[1].rel_angle - w[0].rel_angle;
        if gap < required {
            return Err(Error::SeparationViolated {
                j,
                next: j + 1,
                gap,
                required,
            });
        }
    }
    let regions = white_regions(view, rich, scale, params);
    let pts = b.points();
    let per: Vec<(Vec<(i64, i64)>, RegionCount)> = regions
        .par_iter()
        .map(|w| region_cells(w, &rich[w.j].members, &rich[w.j + 1].members, pts))
        .collect();
    let mut union: Vec<(i64, i64)> = per.iter().flat_map(|(c, _)| c.iter().copied()).collect();
    union.sort_unstable();
    union.dedup();
    let counts: Vec<RegionCount> = per.into_iter().map(|(_, c)| c).collect();
    let total = counts.iter().map(|c| c.cells).sum();
    let max_multiplicity = counts.iter().map(|c| c.max_multiplicity).max().unwrap_or(0);
    let collision_bound = params.collision_bound(scale);
    let kappa = params.kappa();
    let s = params.s;
    let target_exponent = 9.0 * kappa + 2.0 * s - s * s - 2.0;
    Ok(SumCountReport {
        violations: counts.iter().map(|c| c.violations).sum(),
        total,
        union_cells: union.len(),
        n_rich: rich.len(),
        kappa,
        max_multiplicity,
        collision_bound,
        collision_flag: max_multiplicity as f64 > collision_bound,
        target_exponent,
        measured_constant: total as f64 / scale.delta_pow(target_exponent),
        sumset_lower_bound: (union.len() as f64).sqrt(),
        regions: counts,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StageStatus {
    Pass,
    Flag,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub name: String,
    pub status: StageStatus,
    pub measured: f64,
    pub budget: f64,
    pub note: String,
}

impl StageRecord {
    fn new(name: &str, ok: bool, fail: bool, measured: f64, budget: f64, note: String) -> Self {
        let status = if fail {
            StageStatus::Fail
        } else if ok {
            StageStatus::Pass
        } else {
            StageStatus::Flag
        };
        Self {
            name: name.into(),
            status,
            measured,
            budget,
            note,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum PipelineOutcome {
    /// Some `t ∈ E` has `N_δ(A + tA) > C_E δ^-s`.
    Witness { t: f64, entropy: usize, threshold: f64 },
    /// Stage (ii) ran to the end.
    SumCount {
        lower_bound: f64,
        measured_sumset: usize,
        /// The lower bound exceeds `C_E δ^-s`, contradicting smallness of
        /// every projection.
        contradiction: bool,
    },
    /// Stage (ii) stopped; `stage` names the failing step.
    StageFailure { stage: String, reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub m: u32,
    pub params: FanParams,
    /// `E` is not δ^s-separated, so the direction hypotheses are not met.
    pub non_con_e: bool,
    pub stages: Vec<StageRecord>,
    pub outcome: PipelineOutcome,
    pub sum_counts: Option<SumCountReport>,
}

impl PipelineReport {
    pub fn flags(&self) -> impl Iterator<Item = &StageRecord> {
        self.stages.iter().filter(|r| r.status != StageStatus::Pass)
    }
}

fn fail(stages: &mut Vec<StageRecord>, name: &str, measured: f64, budget: f64, reason: String) -> PipelineOutcome {
    stages.push(StageRecord::new(name, false, true, measured, budget, reason.clone()));
    PipelineOutcome::StageFailure {
        stage: name.into(),
        reason,
    }
}

/// Runs the sweep over `E` and, when every sumset is small, the fan argument
/// on `B = A×A`.
pub fn sum_product_pipeline<T: Real>(a: &PointSet1D<T>, e: &[T], params: &FanParams) -> Result<PipelineReport> {
    params.validate()?;
    if e.is_empty() {
        return Err(Error::NoDirections);
    }
    let scale = a.scale();
    let ds = a.nonconcentration(0.5)?;
    if !ds.passes(INPUT_NONCON_BUDGET) || !a.is_delta_separated() {
        return Err(invalid(
            "A",
            format!(
                "not a (delta, 1/2)-set: constant {} exceeds {INPUT_NONCON_BUDGET} or points closer than delta",
                ds.constant
            ),
        ));
    }
    let mut stages = Vec::new();
    let s = params.s;
    let dirs = DirectionSet::from_slopes(e, scale, Some(s));
    let dn = direction_nonconcentration(&dirs, s)?;
    let non_con_e = !dn.delta_s_separated;
    stages.push(StageRecord::new(
        "direction_check",
        !non_con_e,
        false,
        dn.min_gap,
        scale.delta_pow(s),
        format!("min angular gap; non-concentration constant {}", dn.report.constant),
    ));

    // Runs with |E| within a factor 2 of δ^-σ are flagged, not rejected.
    let sigma_count = scale.delta_pow(-params.sigma);
    let ratio = dirs.len() as f64 / sigma_count;
    let note = if ratio < 0.5 {
        "below the sigma cardinality threshold"
    } else if ratio < 2.0 {
        "near the sigma cardinality threshold"
    } else {
        "above the sigma cardinality threshold"
    };
    stages.push(StageRecord::new(
        "direction_count",
        ratio >= 2.0,
        false,
        dirs.len() as f64,
        sigma_count,
        note.into(),
    ));

    let sweep = exceptional_parameters(a, s, params.c_e, e)?;
    let best = sweep
        .rows
        .iter()
        .filter(|r| !r.exceptional)
        .max_by(|x, y| x.entropy.cmp(&y.entropy).then(y.t.total_cmp(&x.t)));
    let threshold = params.c_e * scale.delta_pow(-s);
    let max_entropy = sweep.rows.iter().map(|r| r.entropy).max().unwrap_or(0);
    stages.push(StageRecord::new(
        "exceptional_sweep",
        true,
        false,
        max_entropy as f64,
        threshold,
        format!("{} of {} parameters exceptional", sweep.exceptional().len(), sweep.rows.len()),
    ));
    if let Some(w) = best {
        return Ok(PipelineReport {
            m: scale.m(),
            params: params.clone(),
            non_con_e,
            stages,
            outcome: PipelineOutcome::Witness {
                t: w.t,
                entropy: w.entropy,
                threshold: w.threshold,
            },
            sum_counts: None,
        });
    }

    let b = product_set(a, a)?;
    let (sel, fams) = pruned_families(&b, &dirs, params)?;
    stages.push(StageRecord::new(
        "select_e0",
        !sel.markov_violated && sel.over_budget == 0 && !sel.kept.is_empty(),
        false,
        sel.global_average,
        sel.threshold,
        format!(
            "kept {} of {} directions; {} over the tube budget {}",
            sel.kept.len(),
            sel.analyses.len(),
            sel.over_budget,
            params.tube_budget(scale)
        ),
    ));
    if sel.kept.is_empty() {
        let outcome = fail(
            &mut stages,
            "select_e0",
            sel.global_average,
            sel.threshold,
            sel.diagnostic.clone().unwrap_or_default(),
        );
        return Ok(report(scale, params, non_con_e, stages, outcome, None));
    }
    let worst = fams.iter().map(|f| f.coverage_ratio()).fold(1.0, f64::min);
    stages.push(StageRecord::new(
        "prune_bad_tubes",
        worst >= RETENTION_TARGET,
        false,
        worst,
        RETENTION_TARGET,
        "smallest retained fraction of multi-point-tube mass".into(),
    ));

    let fan = match find_fan(&b, &fams, params) {
        FanOutcome::Found(f) => f,
        FanOutcome::NoFan(nf) => {
            let outcome = fail(
                &mut stages,
                "find_fan",
                nf.best_mass as f64,
                nf.threshold,
                "largest |G(b)| is below c_fan delta^(tau-1)".into(),
            );
            return Ok(report(scale, params, non_con_e, stages, outcome, None));
        }
    };
    stages.push(StageRecord::new(
        "find_fan",
        true,
        false,
        fan.mass() as f64,
        fan.threshold,
        format!("apex index {} with {} tubes", fan.apex_index, fan.tubes.len()),
    ));

    let (view, qr) = quartile_filter(&fan, &b);
    stages.push(StageRecord::new(
        "quartile_filter",
        qr.retained as f64 >= qr.budget,
        false,
        qr.retained as f64,
        qr.budget,
        format!("quadrant {:?}, {} tubes point into it", qr.quadrant, view.tubes.len()),
    ));

    let (view, hr) = prune_heavy_points(&view, &b, params);
    stages.push(StageRecord::new(
        "prune_heavy_points",
        !hr.flagged,
        false,
        hr.surviving as f64,
        hr.input_mass as f64 / 2.0,
        format!("removed {} points at threshold {}", hr.removed, hr.threshold),
    ));

    let (view, nr) = remove_near_apex(&view, &b, params);
    if nr.emptied {
        let outcome = fail(
            &mut stages,
            "remove_near_apex",
            nr.removed as f64,
            nr.bound,
            format!("every member lies within {} of the apex", nr.radius),
        );
        return Ok(report(scale, params, non_con_e, stages, outcome, None));
    }
    stages.push(StageRecord::new(
        "remove_near_apex",
        !nr.over_bound,
        false,
        nr.removed as f64,
        nr.bound,
        format!("exclusion radius {}", nr.radius),
    ));

    let (rich, rr) = match select_rich_tubes(&view, scale, params) {
        Ok(x) => x,
        Err(err) => {
            let threshold = params.rich_threshold(scale);
            let n = view.tubes.iter().filter(|t| t.members.len() as f64 >= threshold).count();
            let outcome = fail(&mut stages, "select_rich_tubes", n as f64, 2.0, err.to_string());
            return Ok(report(scale, params, non_con_e, stages, outcome, None));
        }
    };
    stages.push(StageRecord::new(
        "select_rich_tubes",
        !rr.below_target,
        false,
        rr.kept as f64,
        rr.count_target,
        format!("member threshold {}", rr.threshold),
    ));

    let counts = match count_separated_sums(&view, &rich, &b, params) {
        Ok(c) => c,
        Err(err) => {
            let outcome = fail(&mut stages, "count_separated_sums", 0.0, 0.0, err.to_string());
            return Ok(report(scale, params, non_con_e, stages, outcome, None));
        }
    };
    stages.push(StageRecord::new(
        "count_separated_sums",
        !counts.collision_flag && counts.violations == 0,
        false,
        counts.max_multiplicity as f64,
        counts.collision_bound,
        format!(
            "total {} cells over {} regions, {} outside their region",
            counts.total,
            counts.regions.len(),
            counts.violations
        ),
    ));
    let measured_sumset = sumset_entropy(a, T::one())?;
    let lower_bound = counts.sumset_lower_bound;
    let outcome = PipelineOutcome::SumCount {
        lower_bound,
        measured_sumset,
        contradiction: lower_bound > threshold,
    };
    Ok(report(scale, params, non_con_e, stages, outcome, Some(counts)))
}

fn report(
    scale: Scale,
    params: &FanParams,
    non_con_e: bool,
    stages: Vec<StageRecord>,
    outcome: PipelineOutcome,
    sum_counts: Option<SumCountReport>,
) -> PipelineReport {
    PipelineReport {
        m: scale.m(),
        params: params.clone(),
        non_con_e,
        stages,
        outcome,
        sum_counts,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projections::Direction;
    use crate::sets::gen_ap_set;

    fn sc(m: u32) -> Scale {
        Scale::new(m).unwrap()
    }

    #[test]
    fn quadrants_partition() {
        assert_eq!(Quadrant::of(Point2::new(1.0, 0.0)), Some(Quadrant::NE));
        assert_eq!(Quadrant::of(Point2::new(0.0, 1.0)), Some(Quadrant::NW));
        assert_eq!(Quadrant::of(Point2::new(-1.0, 0.0)), Some(Quadrant::SW));
        assert_eq!(Quadrant::of(Point2::new(0.0, -1.0)), Some(Quadrant::SE));
        assert_eq!(Quadrant::of(Point2::new(0.0f64, 0.0)), None);
    }

    fn two_tube_view(scale: Scale, b: &PointSet2D<f64>, apex: usize, angles: [f64; 2], members: [Vec<usize>; 2]) -> FanView<f64> {
        let tubes = angles
            .iter()
            .zip(members)
            .map(|(&phi, m)| {
                let e = Direction::from_angle(phi + FRAC_PI_2);
                let ray = Point2::new(phi.cos(), phi.sin());
                ViewTube {
                    tube: Tube::new(e, tube_index(b.points()[apex], e, scale)),
                    ray,
                    rel_angle: phi,
                    members: m,
                }
            })
            .collect();
        FanView {
            apex_index: apex,
            apex: b.points()[apex],
            quadrant: Quadrant::NE,
            tubes,
        }
    }

    #[test]
    fn one_point_per_tube_gives_one_sum() {
        let scale = sc(10);
        let pts = vec![Point2::new(0.1, 0.1), Point2::new(0.9, 0.1), Point2::new(0.1, 0.9)];
        let b = PointSet2D::new(pts, scale).unwrap();
        let view = two_tube_view(scale, &b, 0, [0.0, FRAC_PI_2], [vec![1], vec![2]]);
        let params = FanParams::new(0.55, 0.5);
        let r = count_separated_sums(&view, &view.tubes, &b, &params).unwrap();
        assert_eq!(r.total, 1);
        assert_eq!(r.violations, 0);
        let w = &white_regions(&view, &view.tubes, scale, &params)[0];
        assert!(white_region_membership(w, Point2::new(0.5, 0.5)));
        assert!(!white_region_membership(w, Point2::new(0.5, 0.1)));
    }

    #[test]
    fn close_angles_are_rejected() {
        let scale = sc(10);
        let pts = vec![Point2::new(0.1, 0.1), Point2::new(0.9, 0.1), Point2::new(0.9, 0.12)];
        let b = PointSet2D::new(pts, scale).unwrap();
        let view = two_tube_view(scale, &b, 0, [0.0, 1e-3], [vec![1], vec![2]]);
        let r = count_separated_sums(&view, &view.tubes, &b, &FanParams::new(0.55, 0.5));
        assert!(matches!(r, Err(Error::SeparationViolated { .. })));
    }

    #[test]
    fn pipeline_rejects_bad_inputs() {
        let a = gen_ap_set::<f64>(sc(10), 0.5).unwrap();
        assert!(matches!(
            sum_product_pipeline(&a, &[], &FanParams::new(0.55, 0.5)),
            Err(Error::NoDirections)
        ));
        assert!(sum_product_pipeline(&a, &[1.0], &FanParams::new(0.6, 0.5)).is_err());
    }
}
