mod common;

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sumproj::geometry::Point2;
use sumproj::projections::{
    default_parameter_grid, direction_nonconcentration, exceptional_parameters, project, sumset_entropy,
    sumset_entropy_via_projection, thin_directions, Direction, DirectionSet,
};
use sumproj::sets::{gen_ap_set, gen_random_ds_set, PointCloud, PointSet2D};

#[test]
fn project_small_cases() {
    let b = PointSet2D::new(vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0)], sc(4)).unwrap();
    let px = project(&b, Direction::from_angle(0.0));
    assert_eq!(px.values, vec![0.0, 1.0]);
    let py = project(&b, Direction::from_angle(std::f64::consts::FRAC_PI_2));
    assert!(py.values.iter().all(|v| v.abs() < 1e-15));
    assert_eq!(py.values.len(), 2);
}

#[test]
fn direction_units_and_slopes() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..1000 {
        let d = Direction::from_angle(rng.gen_range(-10.0..10.0f64));
        assert!((d.unit().norm() - 1.0).abs() < 1e-12);
        assert!(d.theta() >= 0.0 && d.theta() < std::f64::consts::TAU);
        let t = rng.gen_range(0.0..1.0f64);
        let e = Direction::from_slope(t).unit();
        assert!((e.y / e.x - t).abs() < 1e-12);
    }
}

#[test]
fn sumset_entropy_cases() {
    let scale = sc(10);
    let a = gen_ap_set::<f64>(scale, 0.5).unwrap();
    assert_eq!(sumset_entropy(&a, 0.0).unwrap(), a.covering_number());
    let full = sumset_entropy(&a, 1.0).unwrap() as f64;
    assert!(full <= 2.0 * scale.delta_pow(-0.5) + 2.0);
    let spread = sumset_entropy(&a, scale.delta_pow(0.5)).unwrap() as f64;
    assert!(spread >= scale.delta_pow(-1.0) / 8.0);
    assert!(sumset_entropy(&a, 1.5).is_err());
    assert!(sumset_entropy(&a, -0.1).is_err());
}

#[test]
fn sumset_matches_bucket_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for m in [6, 8, 10] {
        let scale = sc(m);
        let a = gen_random_ds_set::<f64>(scale, 0.5, m as u64).unwrap();
        for _ in 0..10 {
            let t: f64 = rng.gen_range(0.0..=1.0);
            let sums: Vec<f64> = a
                .points()
                .iter()
                .flat_map(|&x| a.points().iter().map(move |&y| x + t * y))
                .collect();
            assert_eq!(sumset_entropy(&a, t).unwrap(), bucket_oracle(&sums, scale.delta_f64()));
        }
    }
}

#[test]
fn both_sumset_routes_agree_within_factor_two() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for i in 0..50 {
        let m = rng.gen_range(4..=10);
        let a = gen_random_ds_set::<f64>(sc(m), rng.gen_range(0.3..=1.0), i).unwrap();
        let t: f64 = rng.gen_range(0.0..=1.0);
        let direct = sumset_entropy(&a, t).unwrap() as f64;
        let via = sumset_entropy_via_projection(&a, t).unwrap() as f64;
        assert!(direct <= 2.0 * via && via <= 2.0 * direct, "{direct} vs {via}");
        assert!(direct >= a.covering_number() as f64 / 2.0);
    }
}

#[test]
fn exceptional_ap_cases() {
    let scale = sc(12);
    let a = gen_ap_set::<f64>(scale, 0.5).unwrap();
    let grid: Vec<f64> = (0..=scale.cells()).map(|k| k as f64 * scale.delta_f64()).collect();
    let sweep = exceptional_parameters(&a, 0.55, 4.0, &grid).unwrap();
    let exc = sweep.exceptional();
    assert!(exc.contains(&0.0));
    assert!(exc.contains(&1.0));
    for r in &sweep.rows {
        assert_eq!(r.exceptional, r.entropy as f64 <= r.threshold);
    }

    let small = exceptional_parameters(&a, 0.45, 1.0, &default_parameter_grid::<f64>(scale, 0.45)).unwrap();
    assert!(small.exceptional().is_empty());
    assert!(exceptional_parameters(&a, 0.55, 4.0, &[]).unwrap().rows.is_empty());

    let csv = sweep.to_csv();
    assert!(csv.starts_with("t,entropy,threshold,exceptional_flag\n"));
    assert_eq!(csv.lines().count(), grid.len() + 1);
}

#[test]
fn exceptional_set_grows_with_constant() {
    let scale = sc(10);
    let a = gen_random_ds_set::<f64>(scale, 0.5, 4).unwrap();
    let grid = default_parameter_grid::<f64>(scale, 0.55);
    let mut prev: Vec<f64> = Vec::new();
    for c in [1.0, 2.0, 4.0, 8.0, 16.0] {
        let exc = exceptional_parameters(&a, 0.55, c, &grid).unwrap().exceptional();
        assert!(prev.iter().all(|t| exc.contains(t)));
        prev = exc;
    }
}

#[test]
fn random_set_sweep_is_recorded() {
    let scale = sc(10);
    let a = gen_random_ds_set::<f64>(scale, 0.5, 21).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let ts: Vec<f64> = (0..64).map(|_| rng.gen_range(0.0..=1.0)).collect();
    let sweep = exceptional_parameters(&a, 0.55, 4.0, &ts).unwrap();
    assert_eq!(sweep.rows.len(), 64);
    eprintln!("random set: {} of 64 parameters exceptional", sweep.exceptional().len());
}

#[test]
fn rotation_covariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let scale = sc(8);
    let pts: Vec<Point2<f64>> = (0..100)
        .map(|_| Point2::new(rng.gen_range(0.5..1.5), rng.gen_range(0.5..1.5)))
        .collect();
    let b = PointSet2D::new(pts.clone(), scale).unwrap();
    for _ in 0..20 {
        let phi: f64 = rng.gen_range(-0.3..0.3);
        let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let centre = Point2::new(1.0, 1.0);
        let rotated: Vec<Point2<f64>> = pts.iter().map(|&p| centre + (p - centre).rotate(phi)).collect();
        let rb = PointSet2D::new(rotated, scale).unwrap();
        let e = Direction::from_angle(theta);
        let re = Direction::from_angle(theta + phi);
        let shift = centre.dot(e.unit()) - centre.dot(re.unit());
        let p = project(&b, e);
        let q = project(&rb, re);
        for (x, y) in p.values.iter().zip(&q.values) {
            assert!((x - (y + shift)).abs() < 1e-9);
        }
    }
}

#[test]
fn direction_noncon_cases() {
    let scale = sc(16);
    let sep = DirectionSet::angle_grid(scale, 0.5, 0.0, 0.5);
    let r = direction_nonconcentration(&sep, 0.5).unwrap();
    assert!(r.delta_s_separated);
    assert!(r.report.constant <= 2.0);

    let arc = scale.delta_pow(0.5);
    let cluster: Vec<Direction<f64>> = (0..256)
        .map(|k| Direction::from_angle(1.0 + arc * k as f64 / 256.0))
        .collect();
    let cl = direction_nonconcentration(&DirectionSet::new(cluster, scale, None), 0.5).unwrap();
    assert!(!cl.delta_s_separated);
    assert!(cl.report.constant >= 4.0);

    let one = DirectionSet::new(vec![Direction::from_angle(0.3)], scale, None);
    assert_eq!(direction_nonconcentration(&one, 0.5).unwrap().report.constant, 1.0);
}

#[test]
fn thinning_restores_separation() {
    let scale = sc(12);
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let dirs: Vec<Direction<f64>> = (0..500).map(|_| Direction::from_angle(rng.gen_range(0.0..0.2))).collect();
    let e = DirectionSet::new(dirs, scale, None);
    let thin = thin_directions(&e, 0.55);
    let r = direction_nonconcentration(&thin, 0.55).unwrap();
    assert!(r.delta_s_separated);
    assert!(thin.directions().iter().all(|d| e.directions().contains(d)));
}
