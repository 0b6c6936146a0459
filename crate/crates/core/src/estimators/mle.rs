use crate::cloud::{sq_dist, PointCloud};
use crate::error::{Error, Result};

pub const DEFAULT_MLE_NEIGHBORS: usize = 20;

/// Levina–Bickel maximum-likelihood dimension with MacKay–Ghahramani
/// pooling: the inverse of the grand mean of `ln(T_k(x) / T_j(x))` over all
/// points `x` and `j = 1..k-1`, where `T_j(x)` is the distance from `x` to
/// its `j`-th nearest neighbour.
///
/// Terms with `T_j(x) = 0` are dropped.
pub fn mle_estimate(cloud: &PointCloud, k_neighbors: usize) -> Result<f64> {
    let n = cloud.len();
    if k_neighbors < 2 || k_neighbors >= n {
        return Err(Error::Param(format!(
            "k_neighbors must satisfy 2 <= k < cloud size ({n}), got {k_neighbors}"
        )));
    }

    let mut row = Vec::with_capacity(n - 1);
    let mut log_sum = 0.0;
    let mut terms = 0usize;
    for i in 0..n {
        row.clear();
        let p = cloud.point(i);
        row.extend((0..n).filter(|&j| j != i).map(|j| sq_dist(p, cloud.point(j))));
        row.select_nth_unstable_by(k_neighbors - 1, f64::total_cmp);
        let nearest = &mut row[..k_neighbors];
        nearest.sort_unstable_by(f64::total_cmp);

        let t_k = nearest[k_neighbors - 1].sqrt();
        let before = terms;
        for &sq in &nearest[..k_neighbors - 1] {
            if sq > 0.0 {
                log_sum += (t_k / sq.sqrt()).ln();
                terms += 1;
            }
        }
        if terms == before {
            return Err(Error::DegenerateCloud(format!(
                "point {i} has {k_neighbors} neighbours at distance zero"
            )));
        }
    }

    let mean = log_sum / terms as f64;
    if mean > 0.0 && mean.is_finite() {
        Ok(1.0 / mean)
    } else {
        Err(Error::DegenerateCloud(format!(
            "mean log distance ratio is {mean}"
        )))
    }
}
