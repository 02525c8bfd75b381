mod common;

use common::*;
use rinr::compress::{dynamic_ratio, prune_l1, PruneSchedule};
use rinr::encoder::dynamic_prune;
use rinr::net::{cosine_lr, CoordinateGrid};
use rinr::{init, Architecture, InrModel};

#[test]
fn analytic_gradient_matches_central_differences() {
    let err = gradient_oracle(10, 42);
    assert!(err <= 1e-4, "relative error {err:e}");
}

#[test]
fn schedules_match_reference_everywhere() {
    for (schedule, reference, knots) in [
        (PruneSchedule::cifar(), cifar_reference as fn(f64) -> f64, [30.0, 35.0]),
        (PruneSchedule::large(), large_reference, [35.0, 40.0]),
    ] {
        for p in schedule_grid(0.0, 80.0, 10_000, &knots) {
            assert!((dynamic_ratio(&schedule, p) - reference(p)).abs() <= 1e-12, "{} at {p}", schedule.name);
        }
        assert_eq!(dynamic_ratio(&schedule, f64::INFINITY), schedule.above);
        assert_eq!(dynamic_ratio(&schedule, f64::NEG_INFINITY), schedule.below);
    }
}

#[test]
fn schedule_spot_values() {
    let c = PruneSchedule::cifar();
    assert_eq!(c.ratio(29.9), 0.0);
    assert!((c.ratio(32.0) - 0.1).abs() < 1e-12);
    assert_eq!(c.ratio(50.0), 0.25);
    let l = PruneSchedule::large();
    assert_eq!(l.ratio(20.0), 0.2);
    assert!((l.ratio(37.5) - 0.3).abs() < 1e-12);
    assert_eq!(l.ratio(45.0), 0.4);
}

#[test]
fn round_two_prune_count_is_exact() {
    let arch = Architecture::cifar();
    for seed in 0..20 {
        let m: InrModel = init(&arch, seed);
        let p = prune_l1(&m, 0.2).unwrap();
        assert_eq!(p.pruned_count(), 60);
        assert_eq!(p.weight_count() - p.kept_count(), 60);
        assert_eq!(p.layers.iter().map(|l| l.b.len()).sum::<usize>(), 33);
    }
}

#[test]
fn dynamic_prune_hits_total_ratio() {
    let m: InrModel = init(&Architecture::cifar(), 3);
    let round2 = prune_l1(&m, 0.2).unwrap();
    for tenth_db in 300..=420 {
        let psnr = tenth_db as f64 / 10.0;
        let (p, r) = dynamic_prune(&round2, &PruneSchedule::large(), psnr).unwrap();
        assert!((p.prune_ratio() - r).abs() <= 1.0 / 333.0, "psnr {psnr}");
        // round-2 zeros survive
        for (a, b) in p.mask.iter().flatten().zip(round2.mask.iter().flatten()) {
            if !b {
                assert!(!a);
            }
        }
    }
}

#[test]
fn cosine_schedule_shape() {
    assert_eq!(cosine_lr(1e-3, 0, 100), 1e-3);
    assert!((cosine_lr(1e-3, 50, 100) - 5e-4).abs() < 1e-15);
    assert!(cosine_lr(1e-3, 99, 100) > 0.0);
    assert_eq!(cosine_lr(1e-3, 100, 100), 0.0);
}

#[test]
fn grid_is_inclusive() {
    let g = CoordinateGrid::new(3, 5);
    assert_eq!(g.coords()[0], [0.0, 0.0]);
    assert_eq!(g.coords()[14], [1.0, 1.0]);
    assert_eq!(g.coords()[1], [0.25, 0.0]);
}
