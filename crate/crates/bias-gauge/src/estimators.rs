//! Task-parameter estimators: intrinsic dimension, class margin, input radius.
//!
//! Dimension uses the nearest-neighbor maximum-likelihood estimator with
//! inverse-of-mean aggregation over anchors:
//!
//! ```text
//! m_hat = [ 1/(N (k-1)) * sum_i sum_{j=1}^{k-1} ln( T_k(x_i) / T_j(x_i) ) ]^-1
//! ```
//!
//! where `T_j(x_i)` is the distance from `x_i` to its j-th nearest neighbor.
//! The margin is the minimum cross-class distance, computed exactly by a
//! pairwise scan or extrapolated from sampled pairs with the moment tail
//! estimator when the pair count makes the scan impractical.

use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Vectors plus optional integer labels in `[0, class_count)`.
#[derive(Clone, Debug)]
pub struct LabeledDataset {
    vectors: Vec<Vec<f64>>,
    labels: Option<Vec<usize>>,
    class_count: usize,
}

impl LabeledDataset {
    pub fn labeled(vectors: Vec<Vec<f64>>, labels: Vec<usize>) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::Estimation("dataset must be nonempty".into()));
        }
        if vectors.len() != labels.len() {
            return Err(Error::CountMismatch {
                images: vectors.len(),
                labels: labels.len(),
            });
        }
        Self::check_vectors(&vectors)?;
        let class_count = labels.iter().max().map_or(0, |m| m + 1);
        Ok(LabeledDataset {
            vectors,
            labels: Some(labels),
            class_count,
        })
    }

    pub fn unlabeled(vectors: Vec<Vec<f64>>) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::Estimation("dataset must be nonempty".into()));
        }
        Self::check_vectors(&vectors)?;
        Ok(LabeledDataset {
            vectors,
            labels: None,
            class_count: 0,
        })
    }

    fn check_vectors(vectors: &[Vec<f64>]) -> Result<()> {
        let dim = vectors[0].len();
        for (i, v) in vectors.iter().enumerate() {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: v.len(),
                });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::Estimation(format!(
                    "non-finite coordinate in vector {i}"
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.vectors[0].len()
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    /// Number of unordered cross-class pairs; `None` for unlabeled data.
    pub fn cross_class_pairs(&self) -> Option<u128> {
        let labels = self.labels.as_ref()?;
        let mut counts = vec![0u128; self.class_count];
        for &l in labels {
            counts[l] += 1;
        }
        let n = labels.len() as u128;
        let same: u128 = counts.iter().map(|&c| c * c).sum();
        Some((n * n - same) / 2)
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>()
}

/// Distances from `vectors[idx]` to its k nearest neighbors (self excluded),
/// ascending. Exact scan; no approximate search.
fn knn_distances(vectors: &[Vec<f64>], idx: usize, k: usize) -> Vec<f64> {
    // `heap` holds the k smallest squared distances, descending
    let mut heap: Vec<f64> = Vec::with_capacity(k + 1);
    let me = &vectors[idx];
    for (j, v) in vectors.iter().enumerate() {
        if j == idx {
            continue;
        }
        let d = sq_dist(me, v);
        if heap.len() < k {
            heap.push(d);
            if heap.len() == k {
                heap.sort_by(|a, b| b.partial_cmp(a).unwrap());
            }
        } else if d < heap[0] {
            heap[0] = d;
            let mut i = 0;
            while i + 1 < k && heap[i] < heap[i + 1] {
                heap.swap(i, i + 1);
                i += 1;
            }
        }
    }
    heap.sort_by(|a, b| a.partial_cmp(b).unwrap());
    heap.iter().map(|d| d.sqrt()).collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DimensionEstimate {
    pub m_hat: f64,
    pub k: usize,
    pub anchors_used: usize,
    pub skipped_pairs: usize,
    pub warnings: Vec<String>,
}

/// Nearest-neighbor MLE of intrinsic dimension.
///
/// When `anchors` is set, a seeded random subset of points serves as query
/// anchors while neighbors are searched in the full set; `anchors = N`
/// reproduces the anchor-free path bit for bit. Duplicate points that
/// produce zero neighbor distances are skipped with a warning.
pub fn intrinsic_dim_mle(
    vectors: &[Vec<f64>],
    k: usize,
    anchors: Option<usize>,
    seed: u64,
) -> Result<DimensionEstimate> {
    let n = vectors.len();
    if k < 2 {
        return Err(Error::Estimation("dimension MLE needs k >= 2".into()));
    }
    if n <= k {
        return Err(Error::Estimation(format!(
            "dimension MLE needs more than k points, got n={n}, k={k}"
        )));
    }
    let anchor_ids: Vec<usize> = match anchors {
        None => (0..n).collect(),
        Some(a) => {
            if a == 0 || a > n {
                return Err(Error::Estimation(format!(
                    "anchors must be in [1, {n}], got {a}"
                )));
            }
            // partial Fisher-Yates, then sorted so the anchors = N case is
            // bit-identical to the anchor-free path
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut pool: Vec<usize> = (0..n).collect();
            for i in 0..a {
                let j = rng.gen_range(i..n);
                pool.swap(i, j);
            }
            let mut ids = pool[..a].to_vec();
            ids.sort_unstable();
            ids
        }
    };

    // per-anchor partial sums, reduced sequentially in anchor order so the
    // result does not depend on the thread count
    let partials: Vec<(f64, usize, usize)> = anchor_ids
        .par_iter()
        .map(|&i| {
            let dists = knn_distances(vectors, i, k);
            let t_k = dists[k - 1];
            let mut sum = 0.0;
            let mut used = 0usize;
            let mut skipped = 0usize;
            for &t_j in &dists[..k - 1] {
                if t_j <= 0.0 || t_k <= 0.0 {
                    skipped += 1;
                    continue;
                }
                sum += (t_k / t_j).ln();
                used += 1;
            }
            (sum, used, skipped)
        })
        .collect();

    let mut total = 0.0;
    let mut used = 0usize;
    let mut skipped = 0usize;
    for (s, u, sk) in partials {
        total += s;
        used += u;
        skipped += sk;
    }
    if used == 0 || total <= 0.0 {
        return Err(Error::DegenerateGeometry);
    }
    let mut warnings = Vec::new();
    if skipped > 0 {
        warnings.push(format!(
            "skipped {skipped} neighbor pairs with zero distance (duplicate points)"
        ));
    }
    Ok(DimensionEstimate {
        m_hat: used as f64 / total,
        k,
        anchors_used: anchor_ids.len(),
        skipped_pairs: skipped,
        warnings,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MarginEstimate {
    pub delta: f64,
    /// Set when delta == 0: downstream frequency cutoffs would be infinite.
    pub zero_margin: bool,
}

fn distinct_classes(data: &LabeledDataset) -> Result<usize> {
    let labels = data.labels().ok_or(Error::Unlabeled("margin estimation"))?;
    let mut seen = vec![false; data.class_count()];
    labels.iter().for_each(|&l| seen[l] = true);
    Ok(seen.iter().filter(|&&s| s).count())
}

/// Exact minimum distance between points of different classes.
pub fn margin_exact(data: &LabeledDataset) -> Result<MarginEstimate> {
    let distinct = distinct_classes(data)?;
    if distinct < 2 {
        return Err(Error::SingleClass(distinct));
    }
    let labels = data.labels().unwrap();
    let vectors = data.vectors();
    let n = vectors.len();
    let min_sq = (0..n - 1)
        .into_par_iter()
        .map(|i| {
            let mut best = f64::INFINITY;
            for j in (i + 1)..n {
                if labels[i] != labels[j] {
                    let d = sq_dist(&vectors[i], &vectors[j]);
                    if d < best {
                        best = d;
                    }
                }
            }
            best
        })
        .reduce(|| f64::INFINITY, f64::min);
    let delta = min_sq.sqrt();
    Ok(MarginEstimate {
        delta,
        zero_margin: delta == 0.0,
    })
}

/// Moment estimator diagnostics for the extreme value index.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EvtDiagnostics {
    pub gamma_hat: f64,
    pub m1: f64,
    pub m2: f64,
    /// The anchor order statistic `X_{n-k,n}`.
    pub anchor_order_stat: f64,
    pub n: usize,
    pub k: usize,
    /// Quantile extrapolation factor `a_n = k P / n`; filled by the margin
    /// estimator once the population pair count P is known.
    pub a_n: Option<f64>,
    /// `P = n_data^2 (1 - 1/C)`, the approximate cross-class pair count of
    /// the underlying dataset.
    pub p_est: Option<f64>,
}

/// Moment estimate of the extreme value index from the top k order
/// statistics of an ascending-sorted positive sample:
///
/// ```text
/// M(r)      = 1/k * sum_{i=0}^{k-1} (ln X_{n-i,n} - ln X_{n-k,n})^r
/// gamma_hat = M(1) + 1 - 1/2 * (1 - M(1)^2 / M(2))^-1
/// ```
pub fn evt_gamma(sorted: &[f64], k: usize) -> Result<EvtDiagnostics> {
    let n = sorted.len();
    if k < 2 || n <= k {
        return Err(Error::Estimation(format!(
            "moment estimator needs n > k >= 2, got n={n}, k={k}"
        )));
    }
    let anchor = sorted[n - 1 - k];
    if !(anchor > 0.0) {
        return Err(Error::Estimation(
            "anchor order statistic must be positive".into(),
        ));
    }
    debug_assert!(
        sorted.windows(2).all(|w| w[0] <= w[1]),
        "samples must be sorted ascending"
    );
    let ln_anchor = anchor.ln();
    let (mut m1, mut m2) = (0.0f64, 0.0f64);
    for &x in &sorted[n - k..] {
        let e = x.ln() - ln_anchor;
        m1 += e;
        m2 += e * e;
    }
    m1 /= k as f64;
    m2 /= k as f64;
    if m2 == 0.0 {
        return Err(Error::DegenerateTail);
    }
    let gamma_hat = m1 + 1.0 - 0.5 / (1.0 - m1 * m1 / m2);
    Ok(EvtDiagnostics {
        gamma_hat,
        m1,
        m2,
        anchor_order_stat: anchor,
        n,
        k,
        a_n: None,
        p_est: None,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EvtMarginEstimate {
    pub delta_hat: f64,
    /// Mean of the per-trial estimates of 1/delta.
    pub inv_delta_mean: f64,
    pub trials: Vec<EvtDiagnostics>,
    /// Trials where gamma_hat <= 0 fell back to the sample maximum of the
    /// reciprocal distances.
    pub evt_fallback: bool,
    pub n_sub: usize,
    pub k: usize,
}

/// Tail-extrapolated class margin.
///
/// Per trial: sample `n_sub` cross-class pairs uniformly with replacement,
/// take reciprocal distances, estimate the extreme value index from the top
/// `k` order statistics and extrapolate the `1 - 1/P` quantile of `1/delta`:
///
/// ```text
/// 1/delta ~= (a_n^gamma - 1)/gamma * X_{n-k,n} M(1) + X_{n-k,n}
/// a_n = k P / n_sub,  P = n_data^2 (1 - 1/C)
/// ```
///
/// The trial estimates of `1/delta` are averaged and inverted.
pub fn evt_margin(
    data: &LabeledDataset,
    n_sub: usize,
    k: usize,
    trials: usize,
    seed: u64,
) -> Result<EvtMarginEstimate> {
    let distinct = distinct_classes(data)?;
    if distinct < 2 {
        return Err(Error::SingleClass(distinct));
    }
    if n_sub <= k || trials == 0 {
        return Err(Error::Estimation(format!(
            "need n_sub > k and trials >= 1, got n_sub={n_sub}, k={k}, trials={trials}"
        )));
    }
    let labels = data.labels().unwrap();
    let n_data = data.len() as f64;
    let c = distinct as f64;
    let p_est = n_data * n_data * (1.0 - 1.0 / c);
    let a_n = k as f64 * p_est / n_sub as f64;
    let ln_a_n = a_n.ln();

    let vectors = data.vectors();
    let mut inv_estimates = Vec::with_capacity(trials);
    let mut diagnostics = Vec::with_capacity(trials);
    let mut fallback = false;

    for trial in 0..trials {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed.wrapping_add(trial as u64));
        let mut recip = Vec::with_capacity(n_sub);
        while recip.len() < n_sub {
            let i = rng.gen_range(0..vectors.len());
            let j = rng.gen_range(0..vectors.len());
            if labels[i] == labels[j] {
                continue;
            }
            let d = sq_dist(&vectors[i], &vectors[j]).sqrt();
            if d == 0.0 {
                // coincident cross-class points: the margin is literally zero
                return Ok(EvtMarginEstimate {
                    delta_hat: 0.0,
                    inv_delta_mean: f64::INFINITY,
                    trials: diagnostics,
                    evt_fallback: false,
                    n_sub,
                    k,
                });
            }
            recip.push(1.0 / d);
        }
        recip.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut diag = evt_gamma(&recip, k)?;
        diag.a_n = Some(a_n);
        diag.p_est = Some(p_est);
        let inv_delta = if diag.gamma_hat > 0.0 {
            let anchor = diag.anchor_order_stat;
            ((diag.gamma_hat * ln_a_n).exp() - 1.0) / diag.gamma_hat * anchor * diag.m1 + anchor
        } else {
            fallback = true;
            *recip.last().unwrap()
        };
        inv_estimates.push(inv_delta);
        diagnostics.push(diag);
    }

    let inv_mean = inv_estimates.iter().sum::<f64>() / inv_estimates.len() as f64;
    Ok(EvtMarginEstimate {
        delta_hat: 1.0 / inv_mean,
        inv_delta_mean: inv_mean,
        trials: diagnostics,
        evt_fallback: fallback,
        n_sub,
        k,
    })
}

/// Maximum Euclidean norm over the dataset's vectors.
pub fn max_norm_r(vectors: &[Vec<f64>]) -> f64 {
    vectors
        .par_iter()
        .map(|v| v.iter().map(|x| x * x).sum::<f64>())
        .reduce(|| 0.0, f64::max)
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_distr::{Distribution, StandardNormal};

    fn two_clusters(gap: f64, per_side: usize, dim: usize, seed: u64) -> LabeledDataset {
        // intra-cluster spread well under gap/10
        let spread = gap / 40.0;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut vectors = Vec::new();
        let mut labels = Vec::new();
        for side in 0..2usize {
            let offset = if side == 0 { 0.0 } else { gap + 2.0 * spread };
            for _ in 0..per_side {
                let mut v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-spread..spread)).collect();
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm > spread {
                    v.iter_mut().for_each(|x| *x *= spread / norm);
                }
                v[0] += offset;
                vectors.push(v);
                labels.push(side);
            }
        }
        LabeledDataset::labeled(vectors, labels).unwrap()
    }

    #[test]
    fn dimension_of_a_line_is_one() {
        use rand::Rng;
        // 100 distinct collinear points in 10-d ambient space
        let dir: Vec<f64> = (0..10).map(|i| (i as f64 + 1.0).sin()).collect();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let vectors: Vec<Vec<f64>> = (0..100)
            .map(|_| {
                let t: f64 = rng.gen_range(0.0..50.0);
                dir.iter().map(|d| d * t).collect()
            })
            .collect();
        let est = intrinsic_dim_mle(&vectors, 5, None, 0).unwrap();
        assert!(
            est.m_hat > 0.8 && est.m_hat < 1.2,
            "collinear m_hat = {}",
            est.m_hat
        );
    }

    #[test]
    fn dimension_of_a_two_sphere() {
        // the band covers the estimator's sampling spread across draws
        for seed in [77u64, 78, 79, 80, 81] {
            let cloud = crate::transport::sample_uniform_sphere(2, 2000, seed);
            let est = intrinsic_dim_mle(cloud.points(), 5, None, 0).unwrap();
            assert!(
                est.m_hat > 1.7 && est.m_hat < 2.4,
                "2-sphere m_hat = {} at seed {seed}",
                est.m_hat
            );
        }
    }

    #[test]
    fn dimension_invariant_under_isometry() {
        let cloud = crate::transport::sample_uniform_sphere(3, 400, 5);
        let base = intrinsic_dim_mle(cloud.points(), 5, None, 0).unwrap().m_hat;
        // random rotation via Gram-Schmidt on Gaussian columns, plus a shift
        let dim = 4usize;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        let mut basis: Vec<Vec<f64>> = Vec::new();
        while basis.len() < dim {
            let mut v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
            for b in &basis {
                let proj: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
                v.iter_mut().zip(b).for_each(|(x, y)| *x -= proj * y);
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-6 {
                v.iter_mut().for_each(|x| *x /= norm);
                basis.push(v);
            }
        }
        let shift: Vec<f64> = (0..dim).map(|i| i as f64 * 0.3 - 1.0).collect();
        let rotated: Vec<Vec<f64>> = cloud
            .points()
            .iter()
            .map(|p| {
                (0..dim)
                    .map(|r| basis[r].iter().zip(p).map(|(x, y)| x * y).sum::<f64>() + shift[r])
                    .collect()
            })
            .collect();
        let rotated_est = intrinsic_dim_mle(&rotated, 5, None, 0).unwrap().m_hat;
        assert!(
            (base - rotated_est).abs() < 1e-6,
            "isometry changed m_hat: {base} vs {rotated_est}"
        );
    }

    #[test]
    fn anchors_equal_to_n_match_full_path_bitwise() {
        let cloud = crate::transport::sample_uniform_sphere(2, 300, 9);
        let full = intrinsic_dim_mle(cloud.points(), 5, None, 42).unwrap();
        let anchored = intrinsic_dim_mle(cloud.points(), 5, Some(300), 42).unwrap();
        assert_eq!(full.m_hat.to_bits(), anchored.m_hat.to_bits());
    }

    #[test]
    fn duplicates_are_skipped_with_warning() {
        let mut vectors: Vec<Vec<f64>> =
            (0..50).map(|t| vec![t as f64, (t as f64).cos()]).collect();
        vectors.push(vectors[0].clone()); // one duplicate pair
        let est = intrinsic_dim_mle(&vectors, 5, None, 0).unwrap();
        assert!(est.skipped_pairs > 0);
        assert!(!est.warnings.is_empty());

        // all points identical -> degenerate geometry
        let all_same: Vec<Vec<f64>> = (0..10).map(|_| vec![1.0, 2.0]).collect();
        assert!(matches!(
            intrinsic_dim_mle(&all_same, 5, None, 0),
            Err(Error::DegenerateGeometry)
        ));
    }

    #[test]
    fn margin_two_points() {
        let data =
            LabeledDataset::labeled(vec![vec![0.0, 0.0], vec![0.0, 3.0]], vec![0, 1]).unwrap();
        let est = margin_exact(&data).unwrap();
        assert!((est.delta - 3.0).abs() < 1e-12);
        assert!(!est.zero_margin);
    }

    #[test]
    fn margin_of_planted_clusters() {
        let gap = 2.5;
        let data = two_clusters(gap, 60, 6, 3);
        let est = margin_exact(&data).unwrap();
        assert!(
            (est.delta - gap).abs() < gap / 5.0,
            "planted {gap}, got {}",
            est.delta
        );
    }

    #[test]
    fn margin_matches_exhaustive_oracle() {
        use rand::Rng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        let vectors: Vec<Vec<f64>> = (0..200)
            .map(|_| (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let labels: Vec<usize> = (0..200).map(|_| rng.gen_range(0..3)).collect();
        let data = LabeledDataset::labeled(vectors.clone(), labels.clone()).unwrap();
        let est = margin_exact(&data).unwrap();
        let mut want = f64::INFINITY;
        for i in 0..200 {
            for j in 0..200 {
                if labels[i] != labels[j] {
                    want = want.min(sq_dist(&vectors[i], &vectors[j]).sqrt());
                }
            }
        }
        assert_eq!(est.delta, want);
        // the minimum never exceeds any particular cross-class pair
        let mut rng2 = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for _ in 0..20 {
            let i = rng2.gen_range(0..200);
            let j = rng2.gen_range(0..200);
            if labels[i] != labels[j] {
                assert!(est.delta <= sq_dist(&vectors[i], &vectors[j]).sqrt());
            }
        }
    }

    #[test]
    fn margin_rejects_single_class() {
        let data =
            LabeledDataset::labeled(vec![vec![0.0], vec![1.0], vec![2.0]], vec![1, 1, 1]).unwrap();
        assert!(matches!(margin_exact(&data), Err(Error::SingleClass(1))));
    }

    #[test]
    fn evt_gamma_recovers_pareto_tail_index() {
        use rand::Rng;
        // X = 1/U has tail index 1
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
        let mut samples: Vec<f64> = (0..5000)
            .map(|_| 1.0 / rng.gen_range(0.0f64..1.0).max(1e-12))
            .collect();
        samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let diag = evt_gamma(&samples, 50).unwrap();
        assert!(
            diag.gamma_hat > 0.7 && diag.gamma_hat < 1.3,
            "gamma_hat = {}",
            diag.gamma_hat
        );
        // Cauchy-Schwarz on the log-excesses
        assert!(diag.m2 >= diag.m1 * diag.m1);
    }

    #[test]
    fn evt_gamma_recovers_half_index_tail() {
        use rand::Rng;
        // X = U^(-1/2) has tail index 1/2
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(321);
        let mut samples: Vec<f64> = (0..8000)
            .map(|_| rng.gen_range(0.0f64..1.0).max(1e-12).powf(-0.5))
            .collect();
        samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let diag = evt_gamma(&samples, 80).unwrap();
        assert!(
            diag.gamma_hat > 0.3 && diag.gamma_hat < 0.7,
            "gamma_hat = {}",
            diag.gamma_hat
        );
    }

    #[test]
    fn evt_gamma_scale_invariant() {
        use rand::Rng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        let mut samples: Vec<f64> = (0..1000)
            .map(|_| 1.0 / rng.gen_range(0.001f64..1.0))
            .collect();
        samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let g1 = evt_gamma(&samples, 30).unwrap().gamma_hat;
        let scaled: Vec<f64> = samples.iter().map(|x| x * 17.5).collect();
        let g2 = evt_gamma(&scaled, 30).unwrap().gamma_hat;
        assert!((g1 - g2).abs() < 1e-12);
    }

    #[test]
    fn evt_gamma_degenerate_tail_errors() {
        let mut samples: Vec<f64> = (1..=100).map(|i| i as f64).collect();
        // top k+1 all equal
        for x in samples.iter_mut().rev().take(6) {
            *x = 500.0;
        }
        assert!(matches!(evt_gamma(&samples, 5), Err(Error::DegenerateTail)));
    }

    #[test]
    fn evt_margin_brackets_planted_gap() {
        let gap = 1.8;
        let data = two_clusters(gap, 150, 8, 21);
        let est = evt_margin(&data, 5000, 50, 10, 7).unwrap();
        assert!(
            est.delta_hat > 0.5 * gap && est.delta_hat < 1.5 * gap,
            "planted {gap}, estimated {}",
            est.delta_hat
        );
    }

    #[test]
    fn evt_margin_scales_with_data_and_shrinks_with_gap() {
        let data = two_clusters(2.0, 100, 5, 2);
        let est = evt_margin(&data, 2000, 40, 4, 5).unwrap();
        // uniform scaling scales the estimate by the same factor
        let scaled_vectors: Vec<Vec<f64>> = data
            .vectors()
            .iter()
            .map(|v| v.iter().map(|x| x * 3.0).collect())
            .collect();
        let scaled =
            LabeledDataset::labeled(scaled_vectors, data.labels().unwrap().to_vec()).unwrap();
        let est_scaled = evt_margin(&scaled, 2000, 40, 4, 5).unwrap();
        assert!(
            (est_scaled.delta_hat / est.delta_hat - 3.0).abs() < 1e-9,
            "scaling broke: {} vs {}",
            est_scaled.delta_hat,
            est.delta_hat
        );
        // larger planted gap -> smaller 1/delta estimate
        let wide = two_clusters(8.0, 100, 5, 2);
        let est_wide = evt_margin(&wide, 2000, 40, 4, 5).unwrap();
        assert!(est_wide.inv_delta_mean < est.inv_delta_mean);
    }

    #[test]
    fn max_norm_values() {
        assert_eq!(max_norm_r(&[vec![3.0, 4.0]]), 5.0);
        assert_eq!(max_norm_r(&[vec![0.0; 7], vec![0.0; 7]]), 0.0);
        use rand::Rng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(55);
        let vectors: Vec<Vec<f64>> = (0..1000)
            .map(|_| (0..6).map(|_| rng.gen_range(-2.0..2.0)).collect())
            .collect();
        let want = vectors
            .iter()
            .map(|v| v.iter().map(|x| x * x).sum::<f64>().sqrt())
            .fold(0.0f64, f64::max);
        assert!((max_norm_r(&vectors) - want).abs() < 1e-12);
    }

    #[test]
    fn cross_class_pair_count() {
        let data = two_clusters(1.0, 10, 2, 0);
        assert_eq!(data.cross_class_pairs(), Some(100));
        let unl = LabeledDataset::unlabeled(vec![vec![1.0], vec![2.0]]).unwrap();
        assert_eq!(unl.cross_class_pairs(), None);
    }
}
