//! Summary statistics and the singular values used by the protocols.

use sbkrylov::{DenseBlock, C64};
use statrs::statistics::{Data, Distribution, Median};

#[derive(Clone, Debug, PartialEq)]
pub struct Moments {
    pub mean: f64,
    pub median: f64,
    /// Most frequent value; the smallest one on ties.
    pub mode: f64,
    /// Sample standard deviation (`n − 1` normalization).
    pub std_dev: f64,
}

pub fn moments(values: &[f64]) -> Option<Moments> {
    if values.is_empty() {
        return None;
    }
    let data = Data::new(values.to_vec());
    let std_dev = if values.len() > 1 { data.std_dev().unwrap_or(0.0) } else { 0.0 };
    Some(Moments {
        mean: data.mean().unwrap_or(f64::NAN),
        median: data.median(),
        mode: mode(values),
        std_dev,
    })
}

fn mode(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let (mut best, mut best_count) = (sorted[0], 0);
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        if j - i > best_count {
            best = sorted[i];
            best_count = j - i;
        }
        i = j;
    }
    best
}

/// `mean = …, median = …, mode = …, standard deviation = …`.
pub fn caption(m: &Moments) -> String {
    format!(
        "mean = {}, median = {}, mode = {}, standard deviation = {}",
        round(m.mean),
        round(m.median),
        round(m.mode),
        round(m.std_dev)
    )
}

fn round(v: f64) -> f64 {
    (v * 1e3).round() / 1e3
}

/// Equal-width bins over `[min, max]`: `(lower, upper, count)`.
pub fn histogram(values: &[f64], bins: usize) -> Vec<(f64, f64, usize)> {
    if values.is_empty() || bins == 0 {
        return Vec::new();
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
    let mut counts = vec![0; bins];
    for &v in values {
        let b = (((v - lo) / width) as usize).min(bins - 1);
        counts[b] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(b, c)| (lo + b as f64 * width, lo + (b + 1) as f64 * width, c))
        .collect()
}

/// Singular values of `a`, descending, by one-sided Jacobi rotations.
pub fn singular_values(a: &DenseBlock) -> Vec<f64> {
    let (m, n) = (a.n_rows(), a.n_cols());
    let mut cols: Vec<Vec<C64>> = a.columns().map(<[C64]>::to_vec).collect();
    if n == 0 {
        return Vec::new();
    }
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let (alpha, beta, gamma) = {
                    let (cp, cq) = (&cols[p], &cols[q]);
                    let mut al = 0.0;
                    let mut be = 0.0;
                    let mut ga = C64::default();
                    for i in 0..m {
                        al += cp[i].norm_sqr();
                        be += cq[i].norm_sqr();
                        ga += cp[i].conj() * cq[i];
                    }
                    (al, be, ga)
                };
                let g = gamma.norm();
                if g == 0.0 || g <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // rotate so that the pair becomes orthogonal
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..m {
                    let xp = cols[p][i];
                    let xq = cols[q][i];
                    cols[p][i] = xp * c - xq * phase.conj() * s;
                    cols[q][i] = xp * phase * s + xq * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = cols
        .iter()
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Number of singular values above `rel_threshold · σ₁`.
pub fn numerical_rank(singular: &[f64], rel_threshold: f64) -> usize {
    match singular.first() {
        Some(&s1) if s1 > 0.0 => singular.iter().filter(|&&s| s > rel_threshold * s1).count(),
        _ => 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use sbkrylov::c64;

    #[test]
    fn moments_of_small_sample() {
        let m = moments(&[1.0, 2.0, 2.0, 5.0]).unwrap();
        assert_eq!(m.mean, 2.5);
        assert_eq!(m.median, 2.0);
        assert_eq!(m.mode, 2.0);
        assert!((m.std_dev - 3.0f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn singular_values_of_diagonal() {
        let a = DenseBlock::from_diagonal(&[c64(3.0), c64(-5.0), c64(1.0)]);
        let s = singular_values(&a);
        assert!((s[0] - 5.0).abs() < 1e-14 && (s[1] - 3.0).abs() < 1e-14 && (s[2] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rank_of_rank_one_block() {
        let u = [c64(1.0), c64(2.0), c64(3.0)];
        let cols: Vec<Vec<C64>> = (1..=4).map(|k| u.iter().map(|x| x * k as f64).collect()).collect();
        let a = DenseBlock::from_columns(3, &cols).unwrap();
        assert_eq!(numerical_rank(&singular_values(&a), 1e-10), 1);
    }
}
