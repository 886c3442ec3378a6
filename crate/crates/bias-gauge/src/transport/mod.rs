//! Wasserstein distances between training and test distributions.
//!
//! Two closed-form approximations drive the difficulty formulas (hypercube
//! tilings of spheres and of the torus), and an exact solver on empirical
//! point clouds backs the scaling experiment that validates them.

mod simplex;

use crate::{Error, Result};
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

/// Uniformly weighted point cloud.
#[derive(Clone, Debug)]
pub struct EmpiricalDistribution {
    points: Vec<Vec<f64>>,
    dim: usize,
}

impl EmpiricalDistribution {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::EmptyDistribution);
        };
        let dim = first.len();
        for p in &points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: p.len(),
                });
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::Estimation("non-finite coordinate in point".into()));
            }
        }
        Ok(EmpiricalDistribution { points, dim })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }
}

/// Certifying optimal transport plan between two empirical distributions.
/// Row sums recover the source weights and column sums the sink weights.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TransportPlan {
    /// (source index, sink index, mass) triples with positive mass.
    pub flows: Vec<(usize, usize, f64)>,
    pub cost: f64,
}

/// Closed-form Wasserstein approximation on `z` m-spheres of radius `r`
/// tiled by `n` hypercube cells:
///
/// `W ~= s * sqrt(m/6)`, `s = r n^(-1/m) (2 pi^((m+1)/2) z / Gamma((m+1)/2))^(1/m)`
pub fn wasserstein_sphere_approx(m: u64, n: u64, r: f64, z: u64) -> f64 {
    assert!(m >= 1 && n >= 1 && z >= 1 && r > 0.0);
    let mf = m as f64;
    let ln_cell = (std::f64::consts::LN_2
        + 0.5 * (mf + 1.0) * std::f64::consts::PI.ln()
        + (z as f64).ln()
        - ln_gamma((mf + 1.0) / 2.0))
        / mf;
    let ln_w = r.ln() - (n as f64).ln() / mf + 0.5 * (mf / 6.0).ln() + ln_cell;
    ln_w.exp()
}

/// Hypercube-domain variant used by the RL formulas:
/// `W ~= sqrt(m/6) * 2 pi * n^(-1/m)`.
pub fn wasserstein_cube_approx(m: u64, n: u64) -> f64 {
    assert!(m >= 1 && n >= 1);
    let mf = m as f64;
    (mf / 6.0).sqrt() * 2.0 * std::f64::consts::PI * (n as f64).powf(-1.0 / mf)
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Exact 1-Wasserstein distance between the uniform empirical measures on
/// `p` and `q` under Euclidean ground cost, solved to optimality as a
/// transportation problem. Unequal counts are handled by scaling supplies
/// and demands to a common integer grid, so fractional mass splits exactly.
pub fn exact_wasserstein(
    p: &EmpiricalDistribution,
    q: &EmpiricalDistribution,
) -> Result<(f64, TransportPlan)> {
    if p.dim != q.dim {
        return Err(Error::DimensionMismatch {
            left: p.dim,
            right: q.dim,
        });
    }
    let ns = p.len();
    let nt = q.len();
    let g = gcd(ns as u64, nt as u64);
    let supply = nt as u64 / g; // per source
    let demand = ns as u64 / g; // per sink
    let total_units = (ns as u64) * (nt as u64) / g;

    let mut costs = vec![0.0f64; ns * nt];
    costs
        .par_chunks_mut(nt)
        .zip(p.points.par_iter())
        .for_each(|(row, a)| {
            for (j, b) in q.points.iter().enumerate() {
                row[j] = euclidean(a, b);
            }
        });

    let supplies = vec![supply; ns];
    let demands = vec![demand; nt];
    let sol = simplex::solve_transport(&costs, ns, nt, &supplies, &demands)?;

    let scale = 1.0 / total_units as f64;
    let flows: Vec<(usize, usize, f64)> = sol
        .flows
        .iter()
        .map(|&(i, j, units)| (i, j, units as f64 * scale))
        .collect();
    let cost = sol.unit_cost * scale;
    Ok((cost, TransportPlan { flows, cost }))
}

/// `count` points uniform on the unit m-sphere embedded in (m+1)-space,
/// via normalized isotropic Gaussian draws. Deterministic for a fixed seed.
pub fn sample_uniform_sphere(m: u64, count: usize, seed: u64) -> EmpiricalDistribution {
    assert!(count >= 1);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let dim = m as usize + 1;
    let mut points = Vec::with_capacity(count);
    while points.len() < count {
        let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-12 {
            continue;
        }
        points.push(v.into_iter().map(|x| x / norm).collect());
    }
    EmpiricalDistribution { points, dim }
}

/// Ordinary least squares of y on x. Returns (slope, intercept, r2).
pub fn ols_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    assert_eq!(xs.len(), ys.len());
    assert!(xs.len() >= 2);
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let r2 = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    (slope, intercept, r2)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScalingConfig {
    pub m_values: Vec<u64>,
    pub n_values: Vec<usize>,
    pub ref_size: usize,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ScalingRow {
    pub m: u64,
    pub n: usize,
    pub trial: usize,
    pub wasserstein: f64,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ScalingFit {
    pub m: u64,
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScalingResult {
    pub rows: Vec<ScalingRow>,
    pub fits: Vec<ScalingFit>,
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    let mut s = splitmix(base);
    for &p in parts {
        s = splitmix(s ^ p);
    }
    s
}

/// Distance-decay experiment: for each (m, n, trial) cell, sample a
/// `ref_size` reference cloud and an n-point cloud on the unit m-sphere,
/// solve the exact transport problem between them, then fit log W against
/// log n per m (on the per-setting means across trials).
pub fn scaling_experiment(cfg: &ScalingConfig) -> Result<ScalingResult> {
    let max_n = *cfg.n_values.iter().max().unwrap_or(&0);
    if cfg.ref_size <= max_n {
        return Err(Error::InvalidSpec(format!(
            "ref_size {} must exceed the largest n {}",
            cfg.ref_size, max_n
        )));
    }
    if cfg.trials == 0 || cfg.m_values.is_empty() || cfg.n_values.is_empty() {
        return Err(Error::InvalidSpec(
            "scaling experiment needs at least one m, one n and one trial".into(),
        ));
    }

    let mut cellspec = Vec::new();
    for &m in &cfg.m_values {
        for &n in &cfg.n_values {
            for trial in 0..cfg.trials {
                cellspec.push((m, n, trial));
            }
        }
    }

    let rows: Result<Vec<ScalingRow>> = cellspec
        .par_iter()
        .map(|&(m, n, trial)| {
            let ref_seed = derive_seed(cfg.seed, &[m, n as u64, trial as u64, 0]);
            let sub_seed = derive_seed(cfg.seed, &[m, n as u64, trial as u64, 1]);
            let reference = sample_uniform_sphere(m, cfg.ref_size, ref_seed);
            let sample = sample_uniform_sphere(m, n, sub_seed);
            let (w, _) = exact_wasserstein(&sample, &reference)?;
            Ok(ScalingRow {
                m,
                n,
                trial,
                wasserstein: w,
            })
        })
        .collect();
    let rows = rows?;

    let mut fits = Vec::new();
    for &m in &cfg.m_values {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for &n in &cfg.n_values {
            let logs: Vec<f64> = rows
                .iter()
                .filter(|r| r.m == m && r.n == n)
                .map(|r| r.wasserstein.ln())
                .collect();
            xs.push((n as f64).ln());
            ys.push(logs.iter().sum::<f64>() / logs.len() as f64);
        }
        let (slope, intercept, r2) = ols_fit(&xs, &ys);
        fits.push(ScalingFit {
            m,
            slope,
            intercept,
            r2,
        });
    }

    Ok(ScalingResult { rows, fits })
}

impl ScalingResult {
    pub fn write_rows_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "m,n,trial,wasserstein")?;
        for r in &self.rows {
            writeln!(w, "{},{},{},{}", r.m, r.n, r.trial, r.wasserstein)?;
        }
        Ok(())
    }

    pub fn write_fits_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "m,slope,intercept,r2")?;
        for f in &self.fits {
            writeln!(w, "{},{},{},{}", f.m, f.slope, f.intercept, f.r2)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn cloud(rng: &mut impl Rng, n: usize, dim: usize) -> EmpiricalDistribution {
        EmpiricalDistribution::new(
            (0..n)
                .map(|_| (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn sphere_approx_matches_independent_evaluation() {
        // m=6, n=64, r=1, z=1 evaluated straight from the closed form
        let (m, n) = (6.0f64, 64.0f64);
        let gamma_35 = 2.5 * 1.5 * 0.5 * std::f64::consts::PI.sqrt();
        let s = n.powf(-1.0 / m)
            * (2.0 * std::f64::consts::PI.powf(3.5) / gamma_35).powf(1.0 / m);
        let want = s * (m / 6.0).sqrt();
        let got = wasserstein_sphere_approx(6, 64, 1.0, 1);
        assert!(((got - want) / want).abs() < 1e-12, "got {got} want {want}");
    }

    #[test]
    fn sphere_approx_homogeneous_in_r_and_decaying_in_n() {
        let base = wasserstein_sphere_approx(5, 100, 1.5, 3);
        assert!((wasserstein_sphere_approx(5, 100, 3.0, 3) / base - 2.0).abs() < 1e-12);
        assert!(wasserstein_sphere_approx(5, 50, 1.5, 3) > base);
        assert!(wasserstein_sphere_approx(5, 200, 1.5, 3) < base);
    }

    #[test]
    fn sphere_approx_with_z_equals_class_count_form() {
        // z = d reproduces the printed classification form exactly
        let (m, n, r, d) = (9u64, 777u64, 2.5f64, 10u64);
        let mf = m as f64;
        let want = r
            * (n as f64).powf(-1.0 / mf)
            * (mf / 6.0).sqrt()
            * ((2.0 * std::f64::consts::PI.powf((mf + 1.0) / 2.0) * d as f64)
                / gamma_f64((mf + 1.0) / 2.0))
            .powf(1.0 / mf);
        let got = wasserstein_sphere_approx(m, n, r, d);
        assert!(((got - want) / want).abs() < 1e-12);
    }

    fn gamma_f64(x: f64) -> f64 {
        statrs::function::gamma::gamma(x)
    }

    #[test]
    fn cube_approx_values() {
        assert!((wasserstein_cube_approx(6, 1) - 2.0 * std::f64::consts::PI).abs() < 1e-12);
        let got = wasserstein_cube_approx(2, 10_000);
        let want = (1.0f64 / 3.0).sqrt() * 2.0 * std::f64::consts::PI * 0.01;
        assert!(((got - want) / want).abs() < 1e-12);
        assert!((got - 0.036276).abs() < 1e-6);
        let mut prev = f64::INFINITY;
        for n in [1u64, 2, 5, 33, 1000] {
            let w = wasserstein_cube_approx(3, n);
            assert!(w < prev);
            prev = w;
        }
    }

    #[test]
    fn exact_identical_clouds_cost_zero() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let p = cloud(&mut rng, 12, 3);
        let (w, plan) = exact_wasserstein(&p, &p).unwrap();
        assert_eq!(w, 0.0);
        assert!((plan.flows.iter().map(|f| f.2).sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exact_singletons() {
        let p = EmpiricalDistribution::new(vec![vec![0.0, 0.0]]).unwrap();
        let q = EmpiricalDistribution::new(vec![vec![3.0, 4.0]]).unwrap();
        let (w, _) = exact_wasserstein(&p, &q).unwrap();
        assert!((w - 5.0).abs() < 1e-12);
    }

    #[test]
    fn exact_errors() {
        let p = EmpiricalDistribution::new(vec![vec![0.0, 0.0]]).unwrap();
        let q = EmpiricalDistribution::new(vec![vec![1.0, 2.0, 3.0]]).unwrap();
        assert!(matches!(
            exact_wasserstein(&p, &q),
            Err(crate::Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            EmpiricalDistribution::new(vec![]),
            Err(crate::Error::EmptyDistribution)
        ));
    }

    #[test]
    fn exact_matches_brute_force_on_2x4() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..20 {
            let p = cloud(&mut rng, 2, 2);
            let q = cloud(&mut rng, 4, 2);
            let (w, _) = exact_wasserstein(&p, &q).unwrap();
            // oracle: integer-margin enumeration on the scaled grid
            let mut costs = vec![0.0; 8];
            for i in 0..2 {
                for j in 0..4 {
                    costs[i * 4 + j] = euclidean(&p.points()[i], &q.points()[j]);
                }
            }
            let want =
                simplex::testutil::brute_force_min(&costs, 2, 4, &[2, 2], &[1, 1, 1, 1]) / 4.0;
            assert!((w - want).abs() < 1e-9, "got {w} want {want}");
        }
    }

    #[test]
    fn exact_is_symmetric_and_triangular() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..8 {
            let p = cloud(&mut rng, 5, 3);
            let q = cloud(&mut rng, 7, 3);
            let r = cloud(&mut rng, 4, 3);
            let (wpq, _) = exact_wasserstein(&p, &q).unwrap();
            let (wqp, _) = exact_wasserstein(&q, &p).unwrap();
            assert!((wpq - wqp).abs() < 1e-9);
            let (wpr, _) = exact_wasserstein(&p, &r).unwrap();
            let (wqr, _) = exact_wasserstein(&q, &r).unwrap();
            assert!(wpq <= wpr + wqr + 1e-7, "triangle inequality violated");
        }
    }

    #[test]
    fn exact_invariant_under_point_permutation_with_heavy_ties() {
        // quantized coordinates force many equal costs; the optimum must not
        // depend on point order or argument order
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        let quantize = |x: f64| (x * 4.0).round() / 4.0;
        let p_pts: Vec<Vec<f64>> = (0..40)
            .map(|_| (0..2).map(|_| quantize(rng.gen_range(-1.0..1.0))).collect())
            .collect();
        let q_pts: Vec<Vec<f64>> = (0..25)
            .map(|_| (0..2).map(|_| quantize(rng.gen_range(-1.0..1.0))).collect())
            .collect();
        let p = EmpiricalDistribution::new(p_pts.clone()).unwrap();
        let q = EmpiricalDistribution::new(q_pts).unwrap();
        let (w, _) = exact_wasserstein(&p, &q).unwrap();
        let (w_swapped, _) = exact_wasserstein(&q, &p).unwrap();
        assert!((w - w_swapped).abs() < 1e-9);
        let mut shuffled = p_pts;
        shuffled.reverse();
        shuffled.swap(0, 17);
        let p2 = EmpiricalDistribution::new(shuffled).unwrap();
        let (w_perm, _) = exact_wasserstein(&p2, &q).unwrap();
        assert!((w - w_perm).abs() < 1e-9, "{w} vs {w_perm}");
    }

    #[test]
    fn plan_margins_match_weights() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let p = cloud(&mut rng, 3, 2);
        let q = cloud(&mut rng, 5, 2);
        let (_, plan) = exact_wasserstein(&p, &q).unwrap();
        let mut row = vec![0.0; 3];
        let mut col = vec![0.0; 5];
        for &(i, j, mass) in &plan.flows {
            row[i] += mass;
            col[j] += mass;
        }
        for s in row {
            assert!((s - 1.0 / 3.0).abs() < 1e-9);
        }
        for s in col {
            assert!((s - 1.0 / 5.0).abs() < 1e-9);
        }
        let recomputed: f64 = plan
            .flows
            .iter()
            .map(|&(i, j, mass)| mass * euclidean(&p.points()[i], &q.points()[j]))
            .sum();
        assert!((recomputed - plan.cost).abs() < 1e-9);
    }

    #[test]
    fn sphere_sampler_contract() {
        let d = sample_uniform_sphere(4, 10_000, 123);
        assert_eq!(d.dim(), 5);
        for p in d.points() {
            let norm = p.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() < 1e-12);
        }
        // determinism
        let d2 = sample_uniform_sphere(4, 10_000, 123);
        assert_eq!(d.points(), d2.points());
        let d3 = sample_uniform_sphere(4, 100, 124);
        assert_ne!(&d.points()[..100], d3.points());
        // coordinate-wise mean shrinks like 1/sqrt(count)
        for axis in 0..5 {
            let mean: f64 =
                d.points().iter().map(|p| p[axis]).sum::<f64>() / d.len() as f64;
            assert!(mean.abs() <= 4.0 / (d.len() as f64).sqrt());
        }
    }

    #[test]
    fn subset_distance_bounded_by_sphere_diameter() {
        let reference = sample_uniform_sphere(3, 60, 1);
        for take in [1usize, 9, 30] {
            let sub =
                EmpiricalDistribution::new(reference.points()[..take].to_vec()).unwrap();
            let (w, _) = exact_wasserstein(&sub, &reference).unwrap();
            assert!((0.0..=2.0).contains(&w), "n={take}: W={w}");
        }
    }

    #[test]
    fn scaling_experiment_small_run() {
        let cfg = ScalingConfig {
            m_values: vec![3],
            n_values: vec![10, 40, 160],
            ref_size: 400,
            trials: 2,
            seed: 99,
        };
        let res = scaling_experiment(&cfg).unwrap();
        assert_eq!(res.rows.len(), 6);
        assert!(res.rows.iter().all(|r| r.wasserstein > 0.0));
        // per-n means decrease
        let mean = |n: usize| {
            let v: Vec<f64> = res
                .rows
                .iter()
                .filter(|r| r.n == n)
                .map(|r| r.wasserstein)
                .collect();
            v.iter().sum::<f64>() / v.len() as f64
        };
        assert!(mean(10) > mean(40) && mean(40) > mean(160));
        let fit = &res.fits[0];
        assert!(fit.slope < 0.0);
        assert!(fit.r2 > 0.5);
        // ref_size guard
        let bad = ScalingConfig {
            ref_size: 100,
            ..cfg
        };
        assert!(scaling_experiment(&bad).is_err());
    }

    #[test]
    fn ols_recovers_exact_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys = [3.0, 5.0, 7.0, 9.0];
        let (slope, intercept, r2) = ols_fit(&xs, &ys);
        assert!((slope - 2.0).abs() < 1e-12);
        assert!((intercept - 1.0).abs() < 1e-12);
        assert!((r2 - 1.0).abs() < 1e-12);
    }
}
