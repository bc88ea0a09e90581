//! Post-processing of sampled curves.

use crate::error::{Error, Result};

/// Ranks starting at 1, ties sharing their average rank.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = 0.5 * (i + j) as f64 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(a: &[f64], b: &[f64]) -> Result<f64> {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    if va == 0.0 || vb == 0.0 {
        return Err(Error::ConstantSeries);
    }
    Ok(cov / (va * vb).sqrt())
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), got: b.len() });
    }
    if a.len() < 2 {
        return Err(Error::InvalidArgument("rank correlation needs at least two points".into()));
    }
    pearson(&average_ranks(a), &average_ranks(b))
}

fn check_grid(xs: &[f64], ys: &[f64], min_len: usize) -> Result<()> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch { expected: xs.len(), got: ys.len() });
    }
    if xs.len() < min_len {
        return Err(Error::InvalidArgument(format!("need at least {min_len} samples")));
    }
    if xs.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("sample points must increase strictly".into()));
    }
    Ok(())
}

/// Location of the steepest slope of a sampled curve, i.e. its inflection
/// point when the curve is sigmoidal. Slopes are taken between neighbouring
/// samples and the maximum is refined by a parabola through three slopes.
pub fn steepest_point(xs: &[f64], ys: &[f64]) -> Result<f64> {
    check_grid(xs, ys, 3)?;
    let mids: Vec<f64> = xs.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    let slopes: Vec<f64> = xs.windows(2).zip(ys.windows(2)).map(|(x, y)| ((y[1] - y[0]) / (x[1] - x[0])).abs()).collect();
    let k = (0..slopes.len()).max_by(|&a, &b| slopes[a].total_cmp(&slopes[b])).unwrap_or(0);
    if k == 0 || k + 1 == slopes.len() {
        return Ok(mids[k]);
    }
    let (x0, x1, x2) = (mids[k - 1], mids[k], mids[k + 1]);
    let (s0, s1, s2) = (slopes[k - 1], slopes[k], slopes[k + 1]);
    let denom = (x0 - x1) * (x0 - x2) * (x1 - x2);
    let a = (x2 * (s1 - s0) + x1 * (s0 - s2) + x0 * (s2 - s1)) / denom;
    let b = (x2 * x2 * (s0 - s1) + x1 * x1 * (s2 - s0) + x0 * x0 * (s1 - s2)) / denom;
    if a >= 0.0 {
        return Ok(x1);
    }
    Ok((-b / (2.0 * a)).clamp(x0, x2))
}

/// First point where the curve rises through `fraction` of its maximum,
/// linearly interpolated between samples.
pub fn onset(xs: &[f64], ys: &[f64], fraction: f64) -> Result<f64> {
    check_grid(xs, ys, 2)?;
    let max = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(max > 0.0) {
        return Err(Error::ConstantSeries);
    }
    let level = fraction * max;
    if ys[0] >= level {
        return Ok(xs[0]);
    }
    for i in 1..xs.len() {
        if ys[i] >= level {
            let t = (level - ys[i - 1]) / (ys[i] - ys[i - 1]);
            return Ok(xs[i - 1] + t * (xs[i] - xs[i - 1]));
        }
    }
    unreachable!("the maximum reaches the level")
}

/// `max |a - b| / max |reference|`.
pub fn relative_sup_distance(a: &[f64], reference: &[f64]) -> Result<f64> {
    if a.len() != reference.len() {
        return Err(Error::DimensionMismatch { expected: reference.len(), got: a.len() });
    }
    let scale = reference.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(Error::ConstantSeries);
    }
    Ok(a.iter().zip(reference).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / scale)
}

/// Parses `start:stop:step` into the inclusive grid it describes.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || Error::InvalidArgument(format!("grid '{text}' is not start:stop:step"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let nums: Vec<f64> = parts.iter().map(|p| p.trim().parse::<f64>().map_err(|_| bad())).collect::<Result<_>>()?;
    let (start, stop, step) = (nums[0], nums[1], nums[2]);
    if !(step > 0.0) || !(stop >= start) || !start.is_finite() || !stop.is_finite() {
        return Err(bad());
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}
