use rand::seq::index;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::streams::sample_rng;
use crate::cloud::{DistanceMatrix, PointCloud};
use crate::error::{Error, Result};
use crate::geometry::{check_alpha, score_lengths, subset_mst_lengths};

/// Parameters of the PHD estimator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhdParams {
    /// Exponent of the persistence score. The returned value is
    /// `1 / (1 - κ)`, which estimates `d / alpha`; keep `alpha = 1` for a
    /// dimension estimate.
    pub alpha: f64,
    /// Number of subsample sizes on the regression grid.
    pub k_grid: usize,
    /// Subsets drawn per grid size; their median score is regressed.
    pub j_samples: usize,
    /// Independent regression rounds whose slopes are averaged.
    pub rounds: usize,
    /// Smallest subsample size (first grid point).
    pub min_subsample: usize,
    pub seed: u64,
    /// Sample from points sorted lexicographically instead of in file
    /// order, making the estimate independent of point order.
    #[serde(default)]
    pub canonical_order: bool,
}

impl Default for PhdParams {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            k_grid: 8,
            j_samples: 7,
            rounds: 3,
            min_subsample: 40,
            seed: 0,
            canonical_order: false,
        }
    }
}

impl PhdParams {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_alpha(self.alpha)?;
        if self.k_grid < 2 {
            return Err(Error::Param(format!("k_grid must be >= 2, got {}", self.k_grid)));
        }
        if self.j_samples < 1 {
            return Err(Error::Param("j_samples must be >= 1".into()));
        }
        if self.rounds < 1 {
            return Err(Error::Param("rounds must be >= 1".into()));
        }
        if self.min_subsample < 2 {
            return Err(Error::Param(format!(
                "min_subsample must be >= 2, got {}",
                self.min_subsample
            )));
        }
        Ok(())
    }
}

/// Result of a PHD estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionEstimate {
    pub value: f64,
    /// Regression slope of each round.
    pub slopes: Vec<f64>,
    /// `(ln n_i, ln E_i)` pairs of each round.
    pub regression_points: Vec<Vec<(f64, f64)>>,
    pub params: PhdParams,
}

/// Grid of subsample sizes from `min_subsample` up to `n`, evenly spaced and
/// rounded half up.
pub fn subsample_sizes(n: usize, params: &PhdParams) -> Result<Vec<usize>> {
    params.validate()?;
    let lo = params.min_subsample;
    if n < lo {
        return Err(Error::TooFewPoints { have: n, need: lo });
    }
    let steps = params.k_grid - 1;
    let span = n - lo;
    Ok((0..params.k_grid)
        .map(|i| lo + (2 * i * span + steps) / (2 * steps))
        .collect())
}

/// `1 / (1 - kappa)`; slopes at or above 1 have no finite dimension.
pub fn slope_to_dimension(kappa: f64) -> Result<f64> {
    if !kappa.is_finite() {
        return Err(Error::UnstableEstimate(format!("non-finite slope {kappa}")));
    }
    if kappa >= 1.0 {
        return Err(Error::UnstableEstimate(format!(
            "regression slope {kappa} >= 1 has no finite dimension"
        )));
    }
    Ok(1.0 / (1.0 - kappa))
}

/// Persistent-homology dimension of `cloud`.
///
/// For each round and each grid size `n_i`, draws `j_samples` subsets of
/// `n_i` points without replacement, takes the median persistence score,
/// fits `ln E` against `ln n` by least squares, and maps the mean slope to
/// a dimension. Subset draws come from RNG streams keyed by
/// `(seed, cloud id, round, i, j)`, so the result does not depend on
/// evaluation order or thread count.
pub fn phd_estimate(cloud: &PointCloud, params: &PhdParams) -> Result<DimensionEstimate> {
    let n = cloud.len();
    if n < 2 {
        return Err(Error::TooFewPoints { have: n, need: params.min_subsample.max(2) });
    }
    let sizes = subsample_sizes(n, params)?;
    if sizes[0] == sizes[sizes.len() - 1] {
        return Err(Error::UnstableEstimate(format!(
            "cloud of {n} points gives a degenerate size grid (all sizes {})",
            sizes[0]
        )));
    }

    let matrix = DistanceMatrix::new(cloud);
    let order = sampling_order(cloud, params.canonical_order);

    let cells: Vec<(usize, usize)> = (0..params.rounds)
        .flat_map(|r| (0..sizes.len()).map(move |i| (r, i)))
        .collect();
    let medians: Vec<f64> = cells
        .par_iter()
        .map(|&(round, i)| median_score(&matrix, &order, cloud.id(), params, round, i, sizes[i]))
        .collect::<Result<_>>()?;

    let log_sizes: Vec<f64> = sizes.iter().map(|&s| (s as f64).ln()).collect();
    let mut slopes = Vec::with_capacity(params.rounds);
    let mut regression_points = Vec::with_capacity(params.rounds);
    for round_medians in medians.chunks_exact(sizes.len()) {
        let points: Vec<(f64, f64)> = log_sizes
            .iter()
            .zip(round_medians)
            .map(|(&x, &e)| (x, e.ln()))
            .collect();
        slopes.push(ols_slope(&points));
        regression_points.push(points);
    }

    let mean_slope = slopes.iter().sum::<f64>() / slopes.len() as f64;
    let value = slope_to_dimension(mean_slope)?;
    Ok(DimensionEstimate {
        value,
        slopes,
        regression_points,
        params: params.clone(),
    })
}

fn sampling_order(cloud: &PointCloud, canonical: bool) -> Vec<usize> {
    let mut order: Vec<usize> = (0..cloud.len()).collect();
    if canonical {
        order.sort_by(|&a, &b| {
            cloud
                .point(a)
                .iter()
                .zip(cloud.point(b))
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
    }
    order
}

fn median_score(
    matrix: &DistanceMatrix,
    order: &[usize],
    id: &str,
    params: &PhdParams,
    round: usize,
    grid: usize,
    size: usize,
) -> Result<f64> {
    let n = order.len();
    let mut scores = Vec::with_capacity(params.j_samples);
    if size == n {
        // every draw is the whole cloud
        let s = score_lengths(&subset_mst_lengths(matrix, order), params.alpha)?;
        scores.resize(params.j_samples, s);
    } else {
        let mut subset = Vec::with_capacity(size);
        for j in 0..params.j_samples {
            let mut rng = sample_rng(params.seed, id, round, grid, j);
            subset.clear();
            subset.extend(index::sample(&mut rng, n, size).into_iter().map(|k| order[k]));
            scores.push(score_lengths(&subset_mst_lengths(matrix, &subset), params.alpha)?);
        }
    }
    scores.sort_by(f64::total_cmp);
    let median = scores[(scores.len() - 1) / 2];
    if median > 0.0 && median.is_finite() {
        Ok(median)
    } else {
        Err(Error::DegenerateCloud(format!(
            "median persistence score {median} at subsample size {size}"
        )))
    }
}

/// Ordinary least-squares slope of y on x.
fn ols_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (sxy, sxx) = points.iter().fold((0.0, 0.0), |(sxy, sxx), &(x, y)| {
        (sxy + (x - mx) * (y - my), sxx + (x - mx) * (x - mx))
    });
    sxy / sxx
}
