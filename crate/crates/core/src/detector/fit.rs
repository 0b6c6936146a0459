use super::{Calibration, CalibrationMethod, DecisionRule, DetectorModel, Direction, Label, ScoredSample};
use crate::error::{Error, Result};

fn sorted_finite(scores: &[f64], what: &str) -> Result<Vec<f64>> {
    if scores.is_empty() {
        return Err(Error::Data(format!("no {what} scores")));
    }
    if let Some(bad) = scores.iter().find(|s| !s.is_finite()) {
        return Err(Error::Data(format!("non-finite {what} score {bad}")));
    }
    let mut v = scores.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// Number of values in sorted `v` that are `<= t`.
pub(super) fn count_le(v: &[f64], t: f64) -> usize {
    v.partition_point(|&x| x <= t)
}

/// Largest threshold that flags at most `target_fpr` of the human scores.
/// Candidates are the human scores themselves, plus the float just below
/// the smallest one when even that flags too many.
pub fn fit_threshold_at_fpr(human_scores: &[f64], target_fpr: f64) -> Result<DetectorModel> {
    if !(target_fpr > 0.0 && target_fpr < 1.0) {
        return Err(Error::Param(format!(
            "target_fpr must lie in (0, 1), got {target_fpr}"
        )));
    }
    let human = sorted_finite(human_scores, "human")?;
    let threshold = threshold_at_fpr_sorted(&human, target_fpr);
    Ok(DetectorModel::threshold(
        threshold,
        Calibration {
            method: CalibrationMethod::TargetFpr { target_fpr },
            training_set: None,
            n_human: human.len(),
            n_generated: 0,
            note: None,
        },
    ))
}

pub(super) fn threshold_at_fpr_sorted(human: &[f64], target_fpr: f64) -> f64 {
    let n = human.len() as f64;
    let mut best = human[0].next_down();
    let mut i = 0;
    while i < human.len() {
        let v = human[i];
        let flagged = count_le(human, v);
        if flagged as f64 / n <= target_fpr {
            best = v;
        } else {
            break;
        }
        i = flagged;
    }
    best
}

/// Operating point of a threshold against both populations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(super) struct Operating {
    pub threshold: f64,
    pub false_pos: usize,
    pub false_neg: usize,
}

/// Threshold minimising `|FPR - FNR|` over midpoints of adjacent distinct
/// pooled scores and the two extremes. Ties prefer the lower mean error,
/// then the lower threshold.
pub(super) fn eer_point(human: &[f64], generated: &[f64]) -> Operating {
    let mut pooled: Vec<f64> = human.iter().chain(generated).copied().collect();
    pooled.sort_by(f64::total_cmp);
    pooled.dedup();

    let mut candidates = Vec::with_capacity(pooled.len() + 1);
    candidates.push(pooled[0].next_down());
    candidates.extend(pooled.windows(2).map(|w| w[0] + (w[1] - w[0]) / 2.0));
    candidates.push(pooled[pooled.len() - 1]);

    let (nh, ng) = (human.len() as u128, generated.len() as u128);
    let key = |op: &Operating| {
        // both rates scaled by nh * ng to compare exactly
        let fpr = op.false_pos as u128 * ng;
        let fnr = op.false_neg as u128 * nh;
        (fpr.abs_diff(fnr), fpr + fnr)
    };
    candidates
        .into_iter()
        .map(|t| Operating {
            threshold: t,
            false_pos: count_le(human, t),
            false_neg: generated.len() - count_le(generated, t),
        })
        .min_by(|a, b| key(a).cmp(&key(b)))
        .expect("at least two candidates")
}

impl Operating {
    pub fn eer(&self, n_human: usize, n_generated: usize) -> f64 {
        let fpr = self.false_pos as f64 / n_human as f64;
        let fnr = self.false_neg as f64 / n_generated as f64;
        (fpr + fnr) / 2.0
    }
}

/// Equal-error-rate threshold. Returns the model and the achieved
/// `(FPR + FNR) / 2`.
pub fn fit_threshold_eer(human: &[f64], generated: &[f64]) -> Result<(DetectorModel, f64)> {
    let human = sorted_finite(human, "human")?;
    let generated = sorted_finite(generated, "generated")?;
    let op = eer_point(&human, &generated);
    let eer = op.eer(human.len(), generated.len());
    let model = DetectorModel::threshold(
        op.threshold,
        Calibration {
            method: CalibrationMethod::Eer { eer },
            training_set: None,
            n_human: human.len(),
            n_generated: generated.len(),
            note: None,
        },
    );
    Ok((model, eer))
}

const MAX_ITERATIONS: usize = 100;
const LOGLIK_TOLERANCE: f64 = 1e-10;

/// Logistic regression of `label == generated` on the score, fitted by
/// iteratively reweighted least squares.
///
/// When the classes are perfectly separated the likelihood has no maximum;
/// a threshold rule at the midpoint of the gap is returned instead, with a
/// note on the calibration record.
pub fn fit_logistic_1d(samples: &[ScoredSample]) -> Result<DetectorModel> {
    let (mut human, mut generated) = (Vec::new(), Vec::new());
    for s in samples {
        if !s.score.is_finite() {
            return Err(Error::Data(format!("non-finite score for {}", s.id)));
        }
        match s.label {
            Label::Human => human.push(s.score),
            Label::Generated => generated.push(s.score),
        }
    }
    if human.is_empty() || generated.is_empty() {
        return Err(Error::Data(format!(
            "logistic fit needs both classes, got {} human and {} generated",
            human.len(),
            generated.len()
        )));
    }
    let calibration = |note: Option<String>| Calibration {
        method: CalibrationMethod::Logistic,
        training_set: None,
        n_human: human.len(),
        n_generated: generated.len(),
        note,
    };

    let fold = |v: &[f64], f: fn(f64, f64) -> f64, init: f64| v.iter().copied().fold(init, f);
    let (gen_max, gen_min) = (fold(&generated, f64::max, f64::MIN), fold(&generated, f64::min, f64::MAX));
    let (hum_max, hum_min) = (fold(&human, f64::max, f64::MIN), fold(&human, f64::min, f64::MAX));
    if gen_max < hum_min {
        let t = gen_max + (hum_min - gen_max) / 2.0;
        return Ok(DetectorModel::threshold(
            t,
            calibration(Some(format!(
                "perfect separation (generated <= {gen_max} < {hum_min} <= human); \
                 likelihood unbounded, using midpoint threshold"
            ))),
        ));
    }
    if hum_max < gen_min {
        let t = hum_max + (gen_min - hum_max) / 2.0;
        return Ok(DetectorModel::threshold(
            t,
            calibration(Some(format!(
                "reversed perfect separation (human <= {hum_max} < {gen_min} <= generated); \
                 likelihood unbounded, midpoint threshold keeps the fixed direction and \
                 misclassifies every sample"
            ))),
        ));
    }

    let xs: Vec<f64> = samples.iter().map(|s| s.score).collect();
    let ys: Vec<f64> = samples
        .iter()
        .map(|s| if s.label == Label::Generated { 1.0 } else { 0.0 })
        .collect();
    let (weight, bias, note) = irls(&xs, &ys);
    Ok(DetectorModel {
        rule: DecisionRule::Logistic { weight, bias },
        direction: Direction::LowerIsGenerated,
        calibration: calibration(note),
    })
}

fn log_likelihood(zs: &[f64], ys: &[f64], w: f64, b: f64) -> f64 {
    zs.iter()
        .zip(ys)
        .map(|(&z, &y)| {
            let eta = w * z + b;
            // y*eta - ln(1 + e^eta), stable for large |eta|
            y * eta - (eta.max(0.0) + (-eta.abs()).exp().ln_1p())
        })
        .sum()
}

/// Newton–Raphson on standardized scores; returns `(weight, bias)` on the
/// original scale.
fn irls(xs: &[f64], ys: &[f64]) -> (f64, f64, Option<String>) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt();
    let p = ys.iter().sum::<f64>() / n;
    if sd == 0.0 {
        return (0.0, (p / (1.0 - p)).ln(), Some("all scores equal; intercept-only fit".into()));
    }
    let zs: Vec<f64> = xs.iter().map(|x| (x - mean) / sd).collect();

    let (mut w, mut b) = (0.0, (p / (1.0 - p)).ln());
    let mut ll = log_likelihood(&zs, ys, w, b);
    let mut note = None;
    for iter in 0..MAX_ITERATIONS {
        let (mut gw, mut gb, mut hww, mut hwb, mut hbb) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (&z, &y) in zs.iter().zip(ys) {
            let mu = 1.0 / (1.0 + (-(w * z + b)).exp());
            let r = y - mu;
            let v = mu * (1.0 - mu);
            gw += r * z;
            gb += r;
            hww += v * z * z;
            hwb += v * z;
            hbb += v;
        }
        let det = hww * hbb - hwb * hwb;
        if det <= 0.0 || !det.is_finite() {
            note = Some(format!("singular Hessian at iteration {iter}"));
            break;
        }
        let dw = (hbb * gw - hwb * gb) / det;
        let db = (hww * gb - hwb * gw) / det;

        let mut step = 1.0;
        let (mut nw, mut nb, mut nll);
        loop {
            nw = w + step * dw;
            nb = b + step * db;
            nll = log_likelihood(&zs, ys, nw, nb);
            if nll >= ll || step < 1e-8 {
                break;
            }
            step *= 0.5;
        }
        let gain = nll - ll;
        if gain < 0.0 {
            break;
        }
        w = nw;
        b = nb;
        ll = nll;
        if gain < LOGLIK_TOLERANCE {
            break;
        }
        if iter + 1 == MAX_ITERATIONS {
            note = Some(format!("stopped after {MAX_ITERATIONS} iterations"));
        }
    }
    (w / sd, b - w * mean / sd, note)
}
