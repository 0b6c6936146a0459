//! Independent oracles and fixtures shared by the integration tests.
#![allow(dead_code)]

use phdim::PointCloud;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_cloud(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> PointCloud {
    let coords: Vec<f64> = (0..n * dim).map(|_| rng.random::<f64>()).collect();
    PointCloud::from_flat(format!("random-{n}x{dim}"), dim, coords).unwrap()
}

/// Kruskal over all pairs with its own union-find; total MST weight.
pub fn kruskal_total(cloud: &PointCloud) -> f64 {
    let n = cloud.len();
    let mut edges = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            let d: f64 = cloud
                .point(i)
                .iter()
                .zip(cloud.point(j))
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            edges.push((d, i, j));
        }
    }
    edges.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            x = p[x];
        }
        x
    }
    let mut total = 0.0;
    let mut used = 0;
    for (d, i, j) in edges {
        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
        if ri != rj {
            parent[ri] = rj;
            total += d;
            used += 1;
            if used == n - 1 {
                break;
            }
        }
    }
    total
}

/// Random proper rotation built from Givens rotations on random planes,
/// followed by a translation.
pub struct RigidMotion {
    planes: Vec<(usize, usize, f64, f64)>,
    shift: Vec<f64>,
}

impl RigidMotion {
    pub fn random(rng: &mut ChaCha8Rng, dim: usize, rotations: usize) -> Self {
        // a line has no rotation plane; only the translation applies
        let rotations = if dim < 2 { 0 } else { rotations };
        let planes = (0..rotations)
            .map(|_| {
                let a = rng.random_range(0..dim);
                let mut b = rng.random_range(0..dim);
                while b == a {
                    b = rng.random_range(0..dim);
                }
                let theta = rng.random_range(0.0..std::f64::consts::TAU);
                (a, b, theta.cos(), theta.sin())
            })
            .collect();
        let shift = (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect();
        Self { planes, shift }
    }

    pub fn apply(&self, cloud: &PointCloud) -> PointCloud {
        cloud
            .map_points(|p| {
                let mut v = p.to_vec();
                for &(a, b, c, s) in &self.planes {
                    let (x, y) = (v[a], v[b]);
                    v[a] = c * x - s * y;
                    v[b] = s * x + c * y;
                }
                v.iter_mut().zip(&self.shift).for_each(|(x, t)| *x += t);
                v
            })
            .unwrap()
    }
}

pub fn scale(cloud: &PointCloud, c: f64) -> PointCloud {
    cloud.map_points(|p| p.iter().map(|x| x * c).collect()).unwrap()
}

/// Mann–Whitney by counting every pair: `(2 * concordant + ties) / (2 n m)`.
pub fn brute_auc(human: &[f64], generated: &[f64]) -> f64 {
    let mut twice = 0u128;
    for &g in generated {
        for &h in human {
            if g < h {
                twice += 2;
            } else if g == h {
                twice += 1;
            }
        }
    }
    twice as f64 / (2 * human.len() as u128 * generated.len() as u128) as f64
}

/// Sweeps every human score (and "below all") as a threshold and keeps the
/// largest whose flagged fraction is within the target.
pub fn brute_fpr_threshold(human: &[f64], target: f64) -> f64 {
    let min = human.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut best = min.next_down();
    for &t in human {
        let flagged = human.iter().filter(|&&h| h <= t).count();
        if flagged as f64 / human.len() as f64 <= target && t > best {
            best = t;
        }
    }
    best
}

/// Exhaustive EER sweep over midpoints of adjacent distinct pooled scores
/// and both extremes, comparing rates as exact fractions.
/// Returns `(threshold, eer)`.
pub fn brute_eer(human: &[f64], generated: &[f64]) -> (f64, f64) {
    let mut pooled: Vec<f64> = human.iter().chain(generated).cloned().collect();
    pooled.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pooled.dedup();
    let mut candidates = vec![pooled[0].next_down()];
    for w in pooled.windows(2) {
        candidates.push(w[0] + (w[1] - w[0]) / 2.0);
    }
    candidates.push(*pooled.last().unwrap());

    let (nh, ng) = (human.len() as i128, generated.len() as i128);
    let mut best: Option<(i128, i128, f64, f64)> = None;
    for t in candidates {
        let fp = human.iter().filter(|&&h| h <= t).count() as i128;
        let fnn = generated.iter().filter(|&&g| g > t).count() as i128;
        let gap = (fp * ng - fnn * nh).abs();
        let sum = fp * ng + fnn * nh;
        let eer = (fp as f64 / nh as f64 + fnn as f64 / ng as f64) / 2.0;
        let better = match best {
            None => true,
            Some((bg, bs, _, _)) => (gap, sum) < (bg, bs),
        };
        if better {
            best = Some((gap, sum, t, eer));
        }
    }
    let (_, _, t, e) = best.unwrap();
    (t, e)
}
