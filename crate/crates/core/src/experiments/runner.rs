use std::fs;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{ExperimentConfig, ExperimentKind, GeneratorKind};
use super::fit::fit_exponent;
use super::report::Report;
use crate::discrete::{
    direction_set, gen_grid_example, gen_parallel_lines_example, kaufman_pair_count, primitive_classes,
    rich_line_search, st_incidences, LatticeLine, LatticePoint, Slope,
};
use crate::error::Result;
use crate::geometry::Scale;
use crate::planted::{gen_planted_fan, PlantedFanSpec};
use crate::projections::{
    default_parameter_grid, exceptional_directions, exceptional_parameters, thin_directions, Direction, DirectionSet,
};
use crate::sets::{gen_ap_set, gen_cantor_set, gen_figure3_set, gen_random_ds_set, product_set, PointSet1D, PointSet2D};
use crate::solymosi::{sum_product_pipeline, PipelineOutcome, StageStatus};
use crate::tubes::{find_fan, pruned_families, riesz_sum, FanOutcome};

/// One `(experiment, m)` cell.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaleOutput {
    pub m: u32,
    pub report: Report,
    pub flags: Vec<String>,
    /// Extra files (name, contents) written next to the report.
    pub attachments: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentOutput {
    pub scales: Vec<ScaleOutput>,
    pub summary: Report,
    pub flags: Vec<String>,
    pub files: Vec<PathBuf>,
}

fn linear_set(config: &ExperimentConfig, scale: Scale, s: f64) -> Result<PointSet1D<f64>> {
    match config.generator {
        GeneratorKind::Ap => gen_ap_set(scale, s),
        GeneratorKind::Cantor => gen_cantor_set(scale, s),
        _ => gen_random_ds_set(scale, s, config.seed),
    }
}

/// Directions near the vertical-projection direction of the column example
/// whose projections are small, thinned to `δ^s`-separation.
pub fn figure3_directions(b: &PointSet2D<f64>, s: f64, c_e: f64) -> DirectionSet<f64> {
    let scale = b.scale();
    let step = 4.0 * scale.delta_f64();
    let reach = (8.0 * scale.delta_pow(0.5) / step).ceil() as i64;
    let candidates: Vec<Direction<f64>> = (-reach..=reach).map(|k| Direction::from_angle(k as f64 * step)).collect();
    thin_directions(&exceptional_directions(b, &candidates, s, c_e), s)
}

pub fn run_scale(config: &ExperimentConfig, m: u32) -> Result<ScaleOutput> {
    let scale = Scale::new(m)?;
    let mut report = Report::new(format!("{} m={m}", config.kind));
    report.put("kind", config.kind);
    report.put("m", m);
    report.put("delta", scale.delta_f64());
    report.put("s", config.s);
    report.put("generator", config.generator);
    report.put("seed", config.seed);
    let mut flags = Vec::new();
    let mut attachments = Vec::new();
    match config.kind {
        ExperimentKind::Riesz => riesz(config, scale, &mut report, &mut flags)?,
        ExperimentKind::Fan => fan(config, scale, &mut report, &mut flags)?,
        ExperimentKind::Pipeline => pipeline(config, scale, &mut report, &mut flags)?,
        ExperimentKind::DiscreteSt => discrete_st(config, scale, &mut report, &mut flags),
        ExperimentKind::Examples => examples(config, scale, &mut report, &mut flags)?,
        ExperimentKind::Sweep => {
            let a = linear_set(config, scale, 0.5)?;
            let c_e = config.fan_params().c_e;
            let sweep = exceptional_parameters(&a, config.s, c_e, &default_parameter_grid::<f64>(scale, config.s))?;
            let exc = sweep.exceptional();
            report.put("points", a.len());
            report.put("candidates", sweep.rows.len());
            report.put("exceptional", exc.len());
            report.put("threshold", c_e * scale.delta_pow(-config.s));
            report.put("min_entropy", sweep.rows.iter().map(|r| r.entropy).min().unwrap_or(0));
            report.put("max_entropy", sweep.rows.iter().map(|r| r.entropy).max().unwrap_or(0));
            report.point("exceptional_count", m as f64, exc.len() as f64);
            attachments.push((format!("sweep_m{m}.csv"), sweep.to_csv()));
        }
    }
    report.put("flags", flags.len());
    for (i, f) in flags.iter().enumerate() {
        report.put(format!("flag.{i}"), f);
        report.note(format!("warning: {f}"));
    }
    Ok(ScaleOutput {
        m,
        report,
        flags,
        attachments,
    })
}

fn riesz(config: &ExperimentConfig, scale: Scale, report: &mut Report, flags: &mut Vec<String>) -> Result<()> {
    let a = linear_set(config, scale, config.s)?;
    let b = product_set(&a, &a)?;
    let value = riesz_sum(&b)?;
    let unit = scale.delta_pow(-2.0) * scale.log_inv_delta();
    report.put("points", b.len());
    report.put("riesz", value);
    report.put("normalized", value / unit);
    report.put("bound", 64.0 * unit);
    if value > 64.0 * unit {
        flags.push(format!("riesz sum {value} exceeds 64 delta^-2 log(1/delta) = {}", 64.0 * unit));
    }
    report.point("riesz", 1.0 / scale.delta_f64(), value);
    report.note(format!("{} points, riesz sum {value:.6e} = {:.4} delta^-2 m", b.len(), value / unit));
    Ok(())
}

fn fan(config: &ExperimentConfig, scale: Scale, report: &mut Report, flags: &mut Vec<String>) -> Result<()> {
    let params = config.fan_params();
    let (b, e) = match config.generator {
        GeneratorKind::Planted => {
            let pf = gen_planted_fan::<f64>(scale, &PlantedFanSpec::standard(scale, config.seed))?;
            report.put("planted_mass", pf.planted_mass);
            report.put("planted_apex_index", pf.apex_index);
            (pf.set, pf.directions)
        }
        GeneratorKind::Figure3 => {
            let b = gen_figure3_set::<f64>(scale)?;
            let e = figure3_directions(&b, config.s, params.c_e);
            (b, e)
        }
        _ => {
            let a = linear_set(config, scale, 0.5)?;
            let e = DirectionSet::angle_grid(scale, config.s, 0.0, std::f64::consts::FRAC_PI_2);
            (product_set(&a, &a)?, e)
        }
    };
    report.put("points", b.len());
    report.put("directions", e.len());
    let (sel, fams) = pruned_families(&b, &e, &params)?;
    report.put("e0_kept", sel.kept.len());
    report.put("e0_threshold", sel.threshold);
    report.put("global_average", sel.global_average);
    report.put("markov_applies", sel.markov_applies);
    let worst = fams.iter().map(|f| f.coverage_ratio()).fold(1.0, f64::min);
    report.put("min_coverage_ratio", worst);
    if sel.markov_violated {
        flags.push(format!("select_e0 kept {} of {} directions although Markov applies", sel.kept.len(), e.len()));
    }
    if sel.over_budget > 0 {
        flags.push(format!("select_e0: {} directions exceed the tube budget", sel.over_budget));
    }
    if worst < crate::tubes::RETENTION_TARGET {
        flags.push(format!("prune_bad_tubes retained only {worst} of the multi-point-tube mass"));
    }
    let outcome = find_fan(&b, &fams, &params);
    let (found, mass) = match &outcome {
        FanOutcome::Found(f) => {
            report.put("apex_index", f.apex_index);
            report.put("apex", format!("{},{}", f.apex.x, f.apex.y));
            report.put("fan_tubes", f.tubes.len());
            (true, f.mass())
        }
        FanOutcome::NoFan(r) => (false, r.best_mass),
    };
    report.put("fan_found", found);
    report.put("fan_mass", mass);
    report.put("fan_threshold", params.fan_threshold(scale));
    report.point("fan_mass", scale.m() as f64, mass as f64);
    let lo = params.tau_floor() * 1.05;
    let hi = 2.0 * params.tau;
    for i in 0..5 {
        let tau = lo + (hi - lo) * i as f64 / 4.0;
        report.point("fan_tau", tau, mass as f64 / (params.c_fan * scale.delta_pow(tau - 1.0)));
    }
    report.note(format!(
        "{} of {} directions kept; largest |G(b)| = {mass} against {:.3}",
        sel.kept.len(),
        e.len(),
        params.fan_threshold(scale)
    ));
    Ok(())
}

fn pipeline(config: &ExperimentConfig, scale: Scale, report: &mut Report, flags: &mut Vec<String>) -> Result<()> {
    let a = linear_set(config, scale, 0.5)?;
    let e = default_parameter_grid::<f64>(scale, config.s);
    let r = sum_product_pipeline(&a, &e, &config.fan_params())?;
    report.put("points", a.len());
    report.put("parameters", e.len());
    report.put("non_con_e", r.non_con_e);
    for (i, st) in r.stages.iter().enumerate() {
        report.put(format!("stage.{i}.name"), &st.name);
        report.put(format!("stage.{i}.status"), format!("{:?}", st.status));
        report.put(format!("stage.{i}.measured"), st.measured);
        report.put(format!("stage.{i}.budget"), st.budget);
        let ratio = if st.budget > 0.0 { st.measured / st.budget } else { 0.0 };
        report.point("stages", i as f64, ratio);
        if st.status != StageStatus::Pass {
            flags.push(format!(
                "stage {} {:?}: measured {} against budget {} ({})",
                st.name, st.status, st.measured, st.budget, st.note
            ));
        }
        report.note(format!("{:<22} {:?} {}", st.name, st.status, st.note));
    }
    match &r.outcome {
        PipelineOutcome::Witness { t, entropy, threshold } => {
            report.put("outcome", "witness");
            report.put("witness_t", t);
            report.put("witness_entropy", entropy);
            report.put("witness_threshold", threshold);
        }
        PipelineOutcome::SumCount {
            lower_bound,
            measured_sumset,
            contradiction,
        } => {
            report.put("outcome", "sum_count");
            report.put("lower_bound", lower_bound);
            report.put("measured_sumset", measured_sumset);
            report.put("contradiction", contradiction);
        }
        PipelineOutcome::StageFailure { stage, reason } => {
            report.put("outcome", "stage_failure");
            report.put("failed_stage", stage);
            report.put("failure_reason", reason);
        }
    }
    Ok(())
}

/// Seeded incidence instance: `n` random points in a small grid and lines
/// through random pairs of them.
pub fn random_st_instance(n: usize, seed: u64) -> (Vec<LatticeLine>, Vec<LatticePoint>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let side = ((n as f64).sqrt().ceil() as i64 * 2).max(2);
    let mut pts = std::collections::BTreeSet::new();
    while pts.len() < n.min((side * side) as usize) {
        pts.insert(LatticePoint::new(rng.gen_range(0..side), rng.gen_range(0..side)));
    }
    let pts: Vec<LatticePoint> = pts.into_iter().collect();
    let mut lines = std::collections::BTreeSet::new();
    let mut attempts = 0;
    while lines.len() < n && attempts < 20 * n {
        attempts += 1;
        let (i, j) = (rng.gen_range(0..pts.len()), rng.gen_range(0..pts.len()));
        if i == j {
            continue;
        }
        let v = Slope::between(pts[i], pts[j]).ok().flatten().expect("distinct points");
        lines.insert(LatticeLine::through(pts[i], v).expect("small coordinates"));
    }
    (lines.into_iter().collect(), pts)
}

fn discrete_st(config: &ExperimentConfig, scale: Scale, report: &mut Report, flags: &mut Vec<String>) {
    let n = (scale.cells() as usize).min(2000);
    let (lines, pts) = random_st_instance(n, config.seed ^ u64::from(scale.m()));
    let st = st_incidences(&lines, &pts);
    report.put("points", st.points);
    report.put("lines", st.lines);
    report.put("incidences", st.incidences);
    report.put("st_ratio", st.ratio);
    if st.ratio > 4.0 {
        flags.push(format!("ST ratio {} exceeds 4", st.ratio));
    }
    report.point("st_ratio", n as f64, st.ratio);
}

fn examples(config: &ExperimentConfig, scale: Scale, report: &mut Report, flags: &mut Vec<String>) -> Result<()> {
    let n = scale.cells();
    let s = config.s;
    let ex2 = gen_parallel_lines_example(n, s)?;
    let k = ex2.parameter as u64;
    let expected = n.div_ceil(k);
    let res = rich_line_search(&ex2.points, &ex2.pairs, s, config.c_st())?;
    report.put("ex2.n", n);
    report.put("ex2.lines", k);
    report.put("ex2.pairs", ex2.pairs.len());
    report.put("ex2.directions", ex2.directions);
    report.put("ex2.rich_count", res.count);
    report.put("ex2.expected_count", expected);
    report.put("ex2.pigeonhole_failed", res.trace.pigeonhole_failed);
    if res.count != expected {
        flags.push(format!("rich line has {} points, expected {expected}", res.count));
    }
    report.point("rich_line", n as f64, res.count as f64);
    if scale.m() % 2 == 0 && scale.m() <= 12 {
        let ex1 = gen_grid_example(n, s)?;
        let dirs = direction_set(&ex1.points, &ex1.pairs)?;
        let r = ex1.parameter;
        let floor = (n as f64).powf(1.5) / (4.0 * r);
        let min_count = dirs
            .iter()
            .map(|&v| kaufman_pair_count(&ex1.points, v))
            .min()
            .unwrap_or(0);
        report.put("ex1.r", r);
        report.put("ex1.pairs", ex1.pairs.len());
        report.put("ex1.directions", dirs.len());
        report.put("ex1.primitive_classes", primitive_classes(n, s).len());
        report.put("ex1.min_pair_count", min_count);
        report.put("ex1.pair_floor", floor);
        if (min_count as f64) < floor {
            flags.push(format!("grid example pair count {min_count} below {floor}"));
        }
    }
    Ok(())
}

/// Runs every scale of `config` (in parallel), writes one report per scale
/// plus a summary, and returns the flags raised along the way.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    config.validate()?;
    let scales = config
        .m_values
        .par_iter()
        .map(|&m| run_scale(config, m))
        .collect::<Result<Vec<_>>>()?;

    let mut summary = Report::new(format!("{} summary", config.kind));
    summary.put("kind", config.kind);
    let ms: Vec<String> = config.m_values.iter().map(u32::to_string).collect();
    summary.put("m_values", ms.join(","));
    summary.put("s", config.s);
    summary.put("generator", config.generator);
    summary.put("seed", config.seed);
    let mut flags = Vec::new();
    for out in &scales {
        summary.put(format!("m{}.report", out.m), format!("{}_m{}.txt", config.kind, out.m));
        summary.put(format!("m{}.flags", out.m), out.flags.len());
        for f in &out.flags {
            flags.push(format!("m={}: {f}", out.m));
        }
        for (name, pts) in &out.report.panels {
            for &(x, y) in pts {
                summary.point(name, x, y);
            }
        }
    }
    let fit_key = match config.kind {
        ExperimentKind::Riesz => Some("riesz"),
        ExperimentKind::Fan => Some("fan_mass"),
        _ => None,
    };
    if let Some(key) = fit_key {
        let series: Vec<(f64, f64)> = scales
            .iter()
            .filter_map(|o| Some((o.report.get_f64("delta")?, o.report.get_f64(key)?)))
            .collect();
        if series.len() >= 3 && series.iter().all(|&(_, v)| v > 0.0) {
            let fit = fit_exponent(&series)?;
            summary.put("fit.quantity", key);
            summary.put("fit.slope", fit.slope);
            summary.put("fit.intercept", fit.intercept);
            summary.put("fit.max_residual", fit.max_residual);
            summary.note(format!("log2({key}) ~ {:.4} log2(1/delta) + {:.4}", fit.slope, fit.intercept));
        }
    }
    summary.put("flags", flags.len());
    for f in &flags {
        summary.note(format!("warning: {f}"));
    }

    let dir = &config.out_dir;
    fs::create_dir_all(dir)?;
    let mut files = Vec::new();
    let cfg_path = dir.join("config.txt");
    fs::write(&cfg_path, config.to_text())?;
    files.push(cfg_path);
    for out in &scales {
        let path = dir.join(format!("{}_m{}.txt", config.kind, out.m));
        out.report.write(&path)?;
        files.push(path);
        for (name, body) in &out.attachments {
            let path = dir.join(name);
            fs::write(&path, body)?;
            files.push(path);
        }
    }
    let path = dir.join(format!("{}_summary.txt", config.kind));
    summary.write(&path)?;
    files.push(path);
    Ok(ExperimentOutput {
        scales,
        summary,
        flags,
        files,
    })
}
