//! Ground-truth manifolds and an estimator-comparison harness.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::estimators::{mle_estimate, phd_estimate, streams, Method, PhdParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ManifoldKind {
    /// Uniform in `[0, 1]^d`, in the first `d` ambient coordinates.
    Cube,
    /// Uniform on the unit `d`-sphere, in the first `d + 1` coordinates.
    Sphere,
    /// Equally spaced points on a unit segment with a random direction.
    Segment,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifoldSpec {
    pub kind: ManifoldKind,
    pub intrinsic_d: usize,
    pub ambient_d: usize,
    pub n_points: usize,
    /// Standard deviation of Gaussian noise added to every ambient coordinate.
    #[serde(default)]
    pub noise_sigma: f64,
    #[serde(default)]
    pub seed: u64,
}

impl ManifoldSpec {
    pub fn cube(d: usize, ambient: usize, n: usize, sigma: f64, seed: u64) -> Self {
        Self {
            kind: ManifoldKind::Cube,
            intrinsic_d: d,
            ambient_d: ambient,
            n_points: n,
            noise_sigma: sigma,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let min_ambient = match self.kind {
            ManifoldKind::Sphere => self.intrinsic_d + 1,
            _ => self.intrinsic_d,
        };
        if self.intrinsic_d < 1 {
            return Err(Error::Param("intrinsic_d must be >= 1".into()));
        }
        if self.kind == ManifoldKind::Segment && self.intrinsic_d != 1 {
            return Err(Error::Param("a segment has intrinsic_d = 1".into()));
        }
        if self.ambient_d < min_ambient {
            return Err(Error::Param(format!(
                "{:?} of dimension {} needs ambient_d >= {min_ambient}, got {}",
                self.kind, self.intrinsic_d, self.ambient_d
            )));
        }
        if self.n_points < 2 {
            return Err(Error::Param("n_points must be >= 2".into()));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::Param(format!(
                "noise_sigma must be a finite nonnegative number, got {}",
                self.noise_sigma
            )));
        }
        Ok(())
    }

    /// Cloud id used for generated samples; distinct per parameter set and seed.
    pub fn cloud_id(&self) -> String {
        format!(
            "{:?}-d{}-D{}-n{}-s{}-seed{}",
            self.kind, self.intrinsic_d, self.ambient_d, self.n_points, self.noise_sigma, self.seed
        )
        .to_lowercase()
    }
}

/// Draws a point cloud from `spec`. Deterministic in `spec.seed`.
pub fn sample_manifold(spec: &ManifoldSpec) -> Result<PointCloud> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (n, d, amb) = (spec.n_points, spec.intrinsic_d, spec.ambient_d);
    let mut coords = vec![0.0; n * amb];

    match spec.kind {
        ManifoldKind::Cube => {
            for row in coords.chunks_exact_mut(amb) {
                for c in &mut row[..d] {
                    *c = rng.random::<f64>();
                }
            }
        }
        ManifoldKind::Sphere => {
            for row in coords.chunks_exact_mut(amb) {
                let head = &mut row[..d + 1];
                loop {
                    for c in head.iter_mut() {
                        *c = StandardNormal.sample(&mut rng);
                    }
                    let norm = head.iter().map(|c| c * c).sum::<f64>().sqrt();
                    if norm > 1e-12 {
                        head.iter_mut().for_each(|c| *c /= norm);
                        break;
                    }
                }
            }
        }
        ManifoldKind::Segment => {
            let dir = random_direction(&mut rng, amb);
            for (i, row) in coords.chunks_exact_mut(amb).enumerate() {
                let t = i as f64 / (n - 1) as f64;
                row.iter_mut().zip(&dir).for_each(|(c, u)| *c = t * u);
            }
        }
    }

    if spec.noise_sigma > 0.0 {
        let noise = Normal::new(0.0, spec.noise_sigma).map_err(|e| Error::Param(e.to_string()))?;
        coords.iter_mut().for_each(|c| *c += noise.sample(&mut rng));
    }
    PointCloud::from_flat(spec.cloud_id(), amb, coords)
}

fn random_direction(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut *rng)).collect();
        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|c| c / norm).collect();
        }
    }
}

/// Estimator settings for a benchmark run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkParams {
    pub phd: PhdParams,
    pub mle_neighbors: usize,
}

impl Default for BenchmarkParams {
    fn default() -> Self {
        Self {
            phd: PhdParams::default(),
            mle_neighbors: crate::estimators::DEFAULT_MLE_NEIGHBORS,
        }
    }
}

/// One (spec, estimator) cell of a benchmark.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkCell {
    pub spec: ManifoldSpec,
    pub estimator: Method,
    pub estimates: Vec<f64>,
    /// Error kinds of repeats that failed, with the repeat index.
    pub failures: Vec<(usize, String)>,
    pub median: Option<f64>,
    /// `|median - intrinsic_d| / intrinsic_d`.
    pub median_abs_pct_error: Option<f64>,
    /// Mean over repeats of `|estimate - intrinsic_d| / intrinsic_d`.
    pub mean_abs_pct_error: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub cells: Vec<BenchmarkCell>,
}

/// Seed of repeat `r` of a spec.
pub fn repeat_seed(base: u64, repeat: usize) -> u64 {
    streams::mix(base, &[repeat as u64])
}

/// Generates `repeats` clouds per spec and runs each requested estimator.
/// Estimator failures are recorded in the cell instead of aborting.
pub fn run_benchmark(
    specs: &[ManifoldSpec],
    estimators: &[Method],
    repeats: usize,
    params: &BenchmarkParams,
) -> Result<BenchmarkReport> {
    if repeats < 1 {
        return Err(Error::Param("repeats must be >= 1".into()));
    }
    for s in specs {
        s.validate()?;
    }
    let cells: Vec<(usize, Method)> = specs
        .iter()
        .enumerate()
        .flat_map(|(i, _)| estimators.iter().map(move |&m| (i, m)))
        .collect();

    let cells = cells
        .par_iter()
        .map(|&(i, method)| run_cell(&specs[i], method, repeats, params))
        .collect::<Result<Vec<_>>>()?;
    Ok(BenchmarkReport { cells })
}

fn run_cell(
    spec: &ManifoldSpec,
    method: Method,
    repeats: usize,
    params: &BenchmarkParams,
) -> Result<BenchmarkCell> {
    let outcomes: Vec<Result<f64>> = (0..repeats)
        .into_par_iter()
        .map(|r| {
            let seed = repeat_seed(spec.seed, r);
            let cloud = sample_manifold(&ManifoldSpec { seed, ..spec.clone() })?;
            match method {
                Method::Phd => phd_estimate(&cloud, &PhdParams { seed, ..params.phd.clone() })
                    .map(|e| e.value),
                Method::Mle => mle_estimate(&cloud, params.mle_neighbors),
            }
        })
        .collect();

    let mut estimates = Vec::new();
    let mut failures = Vec::new();
    for (r, o) in outcomes.into_iter().enumerate() {
        match o {
            Ok(v) => estimates.push(v),
            Err(e) if e.is_estimator_failure() || matches!(e, Error::Param(_)) => {
                failures.push((r, e.kind().to_string()))
            }
            Err(e) => return Err(e),
        }
    }

    let truth = spec.intrinsic_d as f64;
    let median = median(&estimates);
    let median_abs_pct_error = median.map(|m| (m - truth).abs() / truth);
    let mean_abs_pct_error = (!estimates.is_empty()).then(|| {
        estimates.iter().map(|e| (e - truth).abs() / truth).sum::<f64>() / estimates.len() as f64
    });
    Ok(BenchmarkCell {
        spec: spec.clone(),
        estimator: method,
        estimates,
        failures,
        median,
        median_abs_pct_error,
        mean_abs_pct_error,
    })
}

/// Median of a sample; the mean of the two central values for even sizes.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[m] } else { 0.5 * (v[m - 1] + v[m]) })
}
