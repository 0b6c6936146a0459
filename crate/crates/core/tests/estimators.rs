mod common;

use common::{rng, scale, RigidMotion};
use phdim::synth::median;
use phdim::{mle_estimate, phd_estimate, sample_manifold, ManifoldKind, ManifoldSpec, PhdParams, PointCloud};
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

fn cube(d: usize, ambient: usize, n: usize, seed: u64) -> PointCloud {
    sample_manifold(&ManifoldSpec::cube(d, ambient, n, 0.0, seed)).unwrap()
}

fn phd(c: &PointCloud, seed: u64) -> f64 {
    phd_estimate(c, &PhdParams::with_seed(seed)).unwrap().value
}

#[test]
fn square_in_768_dims() {
    let values: Vec<f64> = (0..20u64)
        .into_par_iter()
        .map(|s| phd(&cube(2, 768, 500, 1000 + s), s))
        .collect();
    assert!(values.iter().all(|v| (1.6..=2.4).contains(v)), "{values:?}");
    let m = median(&values).unwrap();
    assert!((m - 2.0).abs() <= 0.15 * 2.0, "median {m}");
}

#[test]
fn estimate_shape() {
    let c = cube(3, 5, 120, 9);
    let e = phd_estimate(&c, &PhdParams::with_seed(4)).unwrap();
    assert_eq!(e.slopes.len(), 3);
    assert_eq!(e.regression_points.len(), 3);
    assert!(e.regression_points.iter().all(|r| r.len() == 8));
    let mean = e.slopes.iter().sum::<f64>() / 3.0;
    assert_eq!(e.value, 1.0 / (1.0 - mean));
    let first: Vec<f64> = e.regression_points[0].iter().map(|p| p.0.exp().round()).collect();
    assert_eq!(first, vec![40.0, 51.0, 63.0, 74.0, 86.0, 97.0, 109.0, 120.0]);
}

#[test]
fn deterministic_across_thread_pools() {
    let c = cube(4, 20, 300, 3);
    let p = PhdParams::with_seed(77);
    let a = phd_estimate(&c, &p).unwrap();
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let b = single.install(|| phd_estimate(&c, &p).unwrap());
    let many = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let d = many.install(|| phd_estimate(&c, &p).unwrap());
    assert_eq!(a, b);
    assert_eq!(a, d);
}

#[test]
fn seed_and_id_select_the_subsets() {
    let c = cube(4, 20, 300, 3);
    let a = phd(&c, 1);
    assert_ne!(a, phd(&c, 2));
    assert_ne!(a, phd(&c.clone().with_id("other"), 1));
}

#[test]
fn phd_scale_invariance() {
    let c = cube(3, 10, 250, 21);
    let base = phd(&c, 5);
    for k in [1e-3, 1.0, 1e3, 7.5] {
        let v = phd(&scale(&c, k), 5);
        assert!((v - base).abs() <= 1e-9, "scale {k}: {v} vs {base}");
    }
}

#[test]
fn rigid_motion_invariance() {
    let c = cube(3, 12, 200, 8);
    let moved = RigidMotion::random(&mut rng(4), 12, 60).apply(&c);
    assert!((phd(&c, 3) - phd(&moved, 3)).abs() <= 1e-9);
    let (a, b) = (mle_estimate(&c, 20).unwrap(), mle_estimate(&moved, 20).unwrap());
    assert!((a - b).abs() <= 1e-9);
}

#[test]
fn permutation_invariance() {
    let c = cube(3, 6, 150, 12);
    let mut order: Vec<usize> = (0..c.len()).collect();
    order.shuffle(&mut rng(1));
    let rows: Vec<Vec<f64>> = order.iter().map(|&i| c.point(i).to_vec()).collect();
    let shuffled = PointCloud::from_rows(c.id(), &rows).unwrap();

    // per-point terms are summed in a different order
    let (m1, m2) = (mle_estimate(&c, 20).unwrap(), mle_estimate(&shuffled, 20).unwrap());
    assert!((m1 - m2).abs() <= 1e-12 * m1, "{m1} vs {m2}");

    let p = PhdParams {
        canonical_order: true,
        ..PhdParams::with_seed(6)
    };
    let a = phd_estimate(&c, &p).unwrap().value;
    let b = phd_estimate(&shuffled, &p).unwrap().value;
    assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
}

#[test]
fn phd_increases_with_dimension() {
    let medians: Vec<f64> = [2usize, 4, 6, 8]
        .iter()
        .map(|&d| {
            let v: Vec<f64> = (0..20u64)
                .into_par_iter()
                .map(|s| phd(&cube(d, d, 500, 50 * d as u64 + s), s))
                .collect();
            median(&v).unwrap()
        })
        .collect();
    assert!(medians.windows(2).all(|w| w[0] < w[1]), "{medians:?}");
}

#[test]
fn mle_on_random_segment() {
    let mut r = rng(31);
    let dir: Vec<f64> = {
        let v: Vec<f64> = (0..768).map(|_| r.random::<f64>() - 0.5).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.into_iter().map(|x| x / n).collect()
    };
    let rows: Vec<Vec<f64>> = (0..500)
        .map(|_| {
            let t: f64 = r.random();
            dir.iter().map(|u| t * u).collect()
        })
        .collect();
    let c = PointCloud::from_rows("segment", &rows).unwrap();
    let d = mle_estimate(&c, 20).unwrap();
    assert!((0.9..=1.1).contains(&d), "{d}");
}

#[test]
fn mle_on_equally_spaced_segment_matches_closed_form() {
    let spec = ManifoldSpec {
        kind: ManifoldKind::Segment,
        intrinsic_d: 1,
        ambient_d: 768,
        n_points: 500,
        noise_sigma: 0.0,
        seed: 2,
    };
    let c = sample_manifold(&spec).unwrap();
    let k = 20;
    // neighbour ranks of lattice point p among 0..n: distances sorted
    let n = 500i64;
    let mut log_sum = 0.0;
    for p in 0..n {
        let mut ds: Vec<i64> = (0..n).filter(|&q| q != p).map(|q| (q - p).abs()).collect();
        ds.sort();
        let tk = ds[k - 1] as f64;
        log_sum += ds[..k - 1].iter().map(|&t| (tk / t as f64).ln()).sum::<f64>();
    }
    let expected = 1.0 / (log_sum / (n as f64 * (k - 1) as f64));
    let d = mle_estimate(&c, k).unwrap();
    assert!((d - expected).abs() <= 1e-6 * expected, "{d} vs {expected}");
    assert!(expected > 1.1, "lattice estimate is biased upward: {expected}");
}

#[test]
fn mle_on_five_cube() {
    let values: Vec<f64> = (0..20u64)
        .into_par_iter()
        .map(|s| mle_estimate(&cube(5, 5, 500, 300 + s), 20).unwrap())
        .collect();
    let m = median(&values).unwrap();
    assert!((4.0..=6.0).contains(&m), "median {m}");
}

#[test]
fn mle_exact_scale_invariance_for_powers_of_two() {
    let c = cube(3, 8, 200, 17);
    let base = mle_estimate(&c, 10).unwrap();
    for k in [0.25, 4.0, 1024.0] {
        assert_eq!(mle_estimate(&scale(&c, k), 10).unwrap(), base);
    }
    for k in [1e-3, 1e3] {
        assert!((mle_estimate(&scale(&c, k), 10).unwrap() - base).abs() <= 1e-9);
    }
}
