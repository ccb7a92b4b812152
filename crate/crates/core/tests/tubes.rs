mod common;

use std::f64::consts::{FRAC_PI_2, PI};

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sumproj::geometry::Point2;
use sumproj::planted::{gen_planted_fan, PlantedFanSpec};
use sumproj::projections::{Direction, DirectionSet};
use sumproj::sets::{gen_ap_set, gen_figure3_set, product_set, PointSet2D};
use sumproj::tubes::{
    count_related_pairs, find_fan, prune_bad_tubes, pruned_families, riesz_sum, select_e0, tube_energy,
    tube_index, Fan, FanOutcome, FanParams, Tube, TubeFamily,
};
use sumproj::Error;

#[test]
fn tube_index_cases() {
    let e = Direction::from_angle(0.0);
    assert_eq!(tube_index(Point2::new(0.3, 0.9), e, sc(3)), 1);
    assert_eq!(tube_index(Point2::new(0.25, 0.4), e, sc(3)), 1);
}

#[test]
fn tube_membership_oracle() {
    let scale = sc(8);
    let d = scale.delta_f64();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..1000 {
        let x = Point2::new(rng.gen_range(0.0..2.0), rng.gen_range(0.0..2.0));
        let e = Direction::from_angle(rng.gen_range(0.0..2.0 * PI));
        let n = tube_index(x, e, scale);
        for k in n - 2..=n + 2 {
            let c = (2 * k + 1) as f64 * d;
            let v = e.unit().dot(x);
            let inside = v >= c - d && v < c + d;
            assert_eq!(inside, k == n);
            assert_eq!(Tube::new(e, k).contains(x, scale), inside);
        }
    }
}

#[test]
fn tube_family_partitions_points() {
    let b = gen_figure3_set::<f64>(sc(8)).unwrap();
    for k in 0..16 {
        let e = Direction::from_angle(k as f64 * 0.37);
        let fam = TubeFamily::build(&b, e);
        let total: usize = fam.tubes.values().map(|m| m.len()).sum();
        assert_eq!(total, b.len());
        for (&n, members) in &fam.tubes {
            assert!(members.iter().all(|&i| fam.point_tube[i] == n));
        }
    }
}

fn naive_energy(pts: &[Point2<f64>], s: f64) -> f64 {
    let mut total = 0.0;
    for i in (0..pts.len()).rev() {
        for j in 0..pts.len() {
            if i != j {
                total += pts[i].dist(pts[j]).powf(s - 1.0);
            }
        }
    }
    total
}

#[test]
fn tube_energy_cases() {
    let scale = sc(10);
    let e = Direction::from_angle(FRAC_PI_2);
    let two = PointSet2D::new(vec![Point2::new(0.1, 0.5), Point2::new(0.35, 0.5)], scale).unwrap();
    let tube = Tube::new(e, tube_index(two.points()[0], e, scale));
    let v = tube_energy(&two, tube, 0.55).unwrap();
    assert!((v.value - 2.0 * 0.25f64.powf(-0.45)).abs() < 1e-12);
    assert_eq!(v.point_count, 2);

    let one = PointSet2D::new(vec![Point2::new(0.1, 0.5)], scale).unwrap();
    assert_eq!(tube_energy(&one, tube, 0.55).unwrap().value, 0.0);
    assert!(tube_energy(&two, tube, 1.0).is_err());

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let d = scale.delta_f64();
    for _ in 0..10 {
        let n0 = rng.gen_range(100..400);
        let mut pts = Vec::new();
        while pts.len() < 50 {
            let p = Point2::new(rng.gen_range(0.0..2.0), (2 * n0) as f64 * d + rng.gen_range(0.0..2.0 * d));
            if pts.iter().all(|q: &Point2<f64>| q.dist(p) >= d) {
                pts.push(p);
            }
        }
        let b = PointSet2D::new(pts.clone(), scale).unwrap();
        let got = tube_energy(&b, Tube::new(e, n0), 0.6).unwrap();
        assert_eq!(got.point_count, 50);
        let want = naive_energy(&pts, 0.6);
        assert!((got.value - want).abs() <= 1e-9 * want);
    }

    let dup = PointSet2D::new(vec![Point2::new(0.1, 0.5), Point2::new(0.1, 0.5)], scale).unwrap();
    assert!(matches!(tube_energy(&dup, tube, 0.5), Err(Error::CoincidentPoints(..))));
}

#[test]
fn riesz_cases() {
    let scale = sc(10);
    let two = PointSet2D::new(vec![Point2::new(0.5, 0.5), Point2::new(1.0, 0.5)], scale).unwrap();
    assert_eq!(riesz_sum(&two).unwrap(), 4.0);

    let a = gen_ap_set::<f64>(scale, 0.5).unwrap();
    let b = product_set(&a, &a).unwrap();
    let r = riesz_sum(&b).unwrap();
    assert!(r <= 32.0 * scale.delta_pow(-2.0) * 10.0);
    let want = naive_energy(b.points(), 0.0);
    assert!((r - want).abs() <= 1e-9 * want);

    let halved: Vec<Point2<f64>> = b.points().iter().map(|&p| p * 0.5).collect();
    let h = PointSet2D::new(halved, scale).unwrap();
    assert_eq!(riesz_sum(&h).unwrap(), 2.0 * r);

    let dup = PointSet2D::new(vec![Point2::new(0.5, 0.5); 2], scale).unwrap();
    assert!(riesz_sum(&dup).is_err());
}

#[test]
fn riesz_bound_for_unit_dimensional_sets() {
    for m in [6, 8, 10] {
        let scale = sc(m);
        let bound = 64.0 * scale.delta_pow(-2.0) * m as f64;
        let f = gen_figure3_set::<f64>(scale).unwrap();
        assert!(riesz_sum(&f).unwrap() <= bound);
        let a = gen_ap_set::<f64>(scale, 0.5).unwrap();
        assert!(riesz_sum(&product_set(&a, &a).unwrap()).unwrap() <= bound);
    }
}

#[test]
fn e0_discards_single_heavy_line() {
    let scale = sc(10);
    let d = scale.delta_f64();
    let pts = (0..=scale.cells()).map(|k| Point2::new(k as f64 * d, 0.5)).collect();
    let b = PointSet2D::new(pts, scale).unwrap();
    let e = DirectionSet::new(vec![Direction::from_angle(FRAC_PI_2)], scale, None);
    let sel = select_e0(&b, &e, &FanParams::new(0.55, 0.5)).unwrap();
    assert!(sel.kept.is_empty());
    assert!(sel.diagnostic.is_some());

    let empty = DirectionSet::new(vec![], scale, None);
    assert!(select_e0(&b, &empty, &FanParams::new(0.55, 0.5)).is_err());
}

#[test]
fn e0_and_pruning_on_product_set() {
    let scale = sc(10);
    let params = FanParams::new(0.55, 0.5);
    let a = gen_ap_set::<f64>(scale, 0.5).unwrap();
    let b = product_set(&a, &a).unwrap();
    let e = DirectionSet::angle_grid(scale, 0.55, 0.0, FRAC_PI_2);
    let (sel, fams) = pruned_families(&b, &e, &params).unwrap();
    assert!(2 * sel.kept.len() >= e.len());
    for f in &fams {
        assert!(f.coverage_ratio() >= 0.9, "coverage {}", f.coverage_ratio());
        assert!(f.tubes.values().all(|m| m.len() >= 2));
    }
}

#[test]
fn pruning_drops_one_heavy_tube() {
    let scale = sc(10);
    let d = scale.delta_f64();
    let pts = (0..=scale.cells()).map(|k| Point2::new(k as f64 * d, 0.5)).collect();
    let b = PointSet2D::new(pts, scale).unwrap();
    let mut params = FanParams::new(0.55, 0.5);
    params.c_avg = 1e12;
    let e = DirectionSet::new(vec![Direction::from_angle(FRAC_PI_2)], scale, None);
    let sel = select_e0(&b, &e, &params).unwrap();
    let mut strict = params.clone();
    strict.c_avg = 4.0;
    let pf = prune_bad_tubes(&sel.analyses[0], scale, &strict);
    assert!(pf.tubes.is_empty());
    assert!(pf.flagged());
}

#[test]
fn related_pairs_small_cases() {
    let scale = sc(8);
    let d = scale.delta_f64();
    let mut params = FanParams::new(0.55, 0.5);
    params.c_avg = 1e12;
    params.c_bad = 1e12;
    let e = DirectionSet::new(vec![Direction::from_angle(FRAC_PI_2)], scale, None);
    let two = PointSet2D::new(vec![Point2::new(0.2, 0.5), Point2::new(0.7, 0.5)], scale).unwrap();
    let (_, fams) = pruned_families(&two, &e, &params).unwrap();
    assert_eq!(count_related_pairs(&fams), 2);

    let k = 37;
    let line = PointSet2D::new((0..k).map(|i| Point2::new(i as f64 * 4.0 * d, 0.5)).collect(), scale).unwrap();
    let (_, fams) = pruned_families(&line, &e, &params).unwrap();
    assert_eq!(count_related_pairs(&fams), (k * (k - 1)) as u64);
}

#[test]
fn related_pairs_triple_loop_oracle() {
    let scale = sc(6);
    let d = scale.delta_f64();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..5 {
        let mut pts: Vec<Point2<f64>> = Vec::new();
        while pts.len() < 120 {
            let p = Point2::new(rng.gen_range(0..64) as f64 * d, rng.gen_range(0..64) as f64 * d);
            if !pts.contains(&p) {
                pts.push(p);
            }
        }
        let b = PointSet2D::new(pts.clone(), scale).unwrap();
        let e = DirectionSet::angle_grid(scale, 0.55, 0.0, PI);
        let mut params = FanParams::new(0.55, 0.5);
        params.c_avg = 1e6;
        let (_, fams) = pruned_families(&b, &e, &params).unwrap();
        let mut want = 0u64;
        for i in 0..pts.len() {
            for j in 0..pts.len() {
                if i == j {
                    continue;
                }
                for f in &fams {
                    let u = f.e.unit();
                    let ni = (u.dot(pts[i]) / (2.0 * d)).floor() as i64;
                    let nj = (u.dot(pts[j]) / (2.0 * d)).floor() as i64;
                    if ni == nj && f.tubes.contains_key(&ni) {
                        want += 1;
                    }
                }
            }
        }
        assert_eq!(count_related_pairs(&fams), want);
    }
}

/// Two arcs of half-width `asin(2δ/d)` each hold at most `len/δ^s + 1`
/// directions of a `δ^s`-separated set.
fn pair_bound(dist: f64, delta: f64, s_sep: f64) -> f64 {
    4.0 * (2.0 * delta / dist).min(1.0).asin() / s_sep + 2.0
}

#[test]
fn geometric_pair_bound_holds() {
    let scale = sc(10);
    let d = scale.delta_f64();
    let s = 0.55;
    let e = DirectionSet::angle_grid(scale, s, 0.0, PI);
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..2000 {
        let p = Point2::new(rng.gen_range(0.0..2.0), rng.gen_range(0.0..2.0));
        let r = (rng.gen_range(0.0..10.0f64)).exp2() * d;
        let q = p + Point2::new(1.0, 0.0).rotate(rng.gen_range(0.0..2.0 * PI)) * r;
        let count = e
            .directions()
            .iter()
            .filter(|&&dir| tube_index(p, dir, scale) == tube_index(q, dir, scale))
            .count();
        assert!(count as f64 <= pair_bound(r, d, scale.delta_pow(s)));
    }
}

#[test]
fn planted_fan_recovered() {
    let scale = sc(10);
    let params = FanParams::new(0.55, 0.5);
    for seed in 0..5 {
        let pf = gen_planted_fan::<f64>(scale, &PlantedFanSpec::standard(scale, seed)).unwrap();
        let (_, fams) = pruned_families(&pf.set, &pf.directions, &params).unwrap();
        let FanOutcome::Found(fan) = find_fan(&pf.set, &fams, &params) else {
            panic!("no fan for seed {seed}");
        };
        assert_eq!(fan.apex_index, pf.apex_index);
        assert!(fan.mass() as f64 >= 0.8 * pf.planted_mass as f64);
        assert_eq!(fan.recount(&pf.set), fan.mass());
        assert!(fan.tubes.iter().all(|t| t.contains(fan.apex, scale)));
        let back = Fan::from_record(&fan.to_record(), &pf.set).unwrap();
        assert_eq!(back, fan);
    }
}

#[test]
fn collinear_points_form_one_fan() {
    let scale = sc(10);
    let d = scale.delta_f64();
    let b = PointSet2D::new((0..64).map(|i| Point2::new(0.2 + i as f64 * 4.0 * d, 0.5)).collect(), scale).unwrap();
    let mut params = FanParams::new(0.55, 0.5);
    params.c_avg = 1e12;
    params.c_bad = 1e12;
    let e = DirectionSet::new(vec![Direction::from_angle(FRAC_PI_2)], scale, None);
    let (_, fams) = pruned_families(&b, &e, &params).unwrap();
    let fan = find_fan(&b, &fams, &params).fan().cloned().unwrap();
    assert_eq!(fan.mass(), b.len());
    assert_eq!(fan.apex_index, 0);
}

#[test]
fn figure3_has_no_fan() {
    let scale = sc(12);
    let mut params = FanParams::new(0.55, 0.53);
    params.tau = FanParams::default_tau(0.55, 0.53);
    let b = gen_figure3_set::<f64>(scale).unwrap();
    let e = sumproj::experiments::figure3_directions(&b, 0.55, params.c_e);
    assert!(!e.is_empty());
    let (_, fams) = pruned_families(&b, &e, &params).unwrap();
    match find_fan(&b, &fams, &params) {
        FanOutcome::NoFan(nf) => assert!((nf.best_mass as f64) < nf.threshold),
        FanOutcome::Found(f) => panic!("unexpected fan of mass {}", f.mass()),
    }
}

#[test]
fn params_validation() {
    assert!(FanParams::new(0.55, 0.5).validate().is_ok());
    assert!(FanParams::new(0.45, 0.4).validate().is_err());
    assert!(FanParams::new(0.6, 0.5).validate().is_err());
    assert!(FanParams::new(0.55, 0.6).validate().is_err());
    let mut p = FanParams::new(0.55, 0.5);
    p.tau = p.tau_floor();
    assert!(p.validate().is_err());
    let mut p = FanParams::new(0.55, 0.5);
    p.c_e = 0.5;
    assert!(p.validate().is_err());
}
