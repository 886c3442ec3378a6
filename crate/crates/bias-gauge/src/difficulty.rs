//! The difficulty engine: how much information a task demands beyond its data.
//!
//! For a task with `n` training points on `z` m-spheres of radius `r`, output
//! dimension `d`, output bound `b`, resolution `delta` and performance target
//! `eps_over_l`, the requirement in nats is
//!
//! ```text
//! I ~= (2 d z E - n d) (ln b + 1/2 ln z + ln d + ln K - (1/m) ln n
//!                        - ln(eps/L) + ln c)
//! c  = sqrt(m/6) (2 pi^((m+1)/2) z / Gamma((m+1)/2))^(1/m)
//! ```
//!
//! with `K` and `E` the mode cutoff and eigenfunction count at frequency
//! `M = 2 pi r / delta`. Classification is the `z = d` specialization. RL
//! tasks on a hypercube observation domain use the ball-volume mode count
//! and bake in `b = sqrt(d)`:
//!
//! ```text
//! I ~= d (2 (2 pi / delta)^m V_m - n) (ln(4 pi^2 / sqrt 6) + ln d
//!       + 1/2 ln m - ln delta - (1/m) ln n - ln(eps/L))
//! ```
//!
//! Meta-learning composes an outer task whose output is the inner
//! classifier's parameter vector; all composition happens in log space since
//! the outer `n` and `d` overflow doubles in general. Everything internal is
//! nats; bits appear only in the report.

use crate::numerics::{log_add, log_binomial, LogScalar};
use crate::spectral::{self, SpectrumParams};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;
use std::f64::consts::{LN_2, PI};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    Classification,
    General,
    RlCube,
}

/// The full parameter tuple feeding every difficulty formula.
///
/// `n`, `d` and `z` are carried as reals so composed tasks with
/// astronomically many training tuples stay representable; user-authored
/// specs use ordinary integer values. Classification enforces `z = d`
/// (`z` may be omitted and defaults accordingly); RL ignores `r`, `b`, `z`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub kind: TaskKind,
    pub m: u64,
    pub n: f64,
    pub d: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<f64>,
    #[serde(default = "default_one")]
    pub r: f64,
    pub delta: f64,
    #[serde(default = "default_one")]
    pub b: f64,
    pub eps_over_l: f64,
}

fn default_one() -> f64 {
    1.0
}

impl TaskSpec {
    /// Validates fields and resolves the submanifold count.
    pub fn validated(&self) -> Result<ResolvedTaskSpec> {
        let err = |msg: String| Err(Error::InvalidSpec(msg));
        if self.m == 0 {
            return err("m must be a positive integer".into());
        }
        for (name, v) in [
            ("n", self.n),
            ("d", self.d),
            ("r", self.r),
            ("delta", self.delta),
            ("b", self.b),
            ("eps_over_l", self.eps_over_l),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return err(format!("{name} must be positive and finite, got {v}"));
            }
        }
        if self.d < 1.0 {
            return err(format!("d must be at least 1, got {}", self.d));
        }
        let z = match (self.kind, self.z) {
            (TaskKind::Classification, None) => self.d,
            (TaskKind::Classification, Some(z)) => {
                if z != self.d {
                    return err(format!(
                        "classification requires z = d, got z={z}, d={}",
                        self.d
                    ));
                }
                z
            }
            (TaskKind::General, None) => {
                return err("general tasks must specify the submanifold count z".into())
            }
            (TaskKind::General, Some(z)) => {
                if z < 1.0 || !z.is_finite() {
                    return err(format!("z must be at least 1, got {z}"));
                }
                z
            }
            (TaskKind::RlCube, z) => match z {
                None | Some(1.0) => 1.0,
                Some(z) => return err(format!("RL tasks have a single manifold, got z={z}")),
            },
        };
        Ok(ResolvedTaskSpec {
            spec: TaskSpec {
                z: Some(z),
                ..self.clone()
            },
        })
    }
}

/// A validated spec with `z` resolved.
#[derive(Clone, Debug)]
pub struct ResolvedTaskSpec {
    spec: TaskSpec,
}

impl ResolvedTaskSpec {
    pub fn spec(&self) -> &TaskSpec {
        &self.spec
    }

    pub fn z(&self) -> f64 {
        self.spec.z.unwrap()
    }

    fn to_log(&self) -> LogTaskSpec {
        let s = &self.spec;
        LogTaskSpec {
            kind: s.kind,
            m: s.m,
            ln_n: s.n.ln(),
            ln_d: s.d.ln(),
            ln_z: self.z().ln(),
            r: s.r,
            delta: s.delta,
            ln_b: s.b.ln(),
            eps_over_l: s.eps_over_l,
        }
    }
}

/// Internal all-log-space task parameters. Meta composition builds these
/// directly so quantities beyond double range never materialize.
#[derive(Clone, Debug)]
pub struct LogTaskSpec {
    pub kind: TaskKind,
    pub m: u64,
    pub ln_n: f64,
    pub ln_d: f64,
    pub ln_z: f64,
    pub r: f64,
    pub delta: f64,
    pub ln_b: f64,
    pub eps_over_l: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub kind: TaskKind,
    pub m: u64,
    pub ln_n: f64,
    pub ln_d: f64,
    pub ln_z: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub r: Option<f64>,
    pub delta: f64,
    pub ln_b: f64,
    pub eps_over_l: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub max_freq: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub max_mode: Option<u64>,
    pub eigen_count: LogScalar,
    pub flags: Vec<String>,
    pub notes: Vec<String>,
}

/// Per-term breakdown plus totals in nats and bits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DifficultyReport {
    /// The dominant factor `2 d z E - n d`.
    pub dominant_dim: LogScalar,
    /// Named bracket terms in nats, in formula order.
    pub bracket_terms: Vec<(String, f64)>,
    pub bracket_sum_nats: f64,
    pub total_nats: LogScalar,
    pub total_bits: LogScalar,
    /// True exactly when `2 d z E <= n d`: the data alone pins the
    /// hypothesis space and the requirement clamps to zero.
    pub data_sufficient: bool,
    pub metadata: ReportMetadata,
}

impl DifficultyReport {
    /// Two-column (term, nats) rendering plus totals.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let width = self
            .bracket_terms
            .iter()
            .map(|(n, _)| n.len())
            .max()
            .unwrap_or(8)
            .max("bracket_sum".len());
        out.push_str(&format!("{:<width$}  nats\n", "term"));
        for (name, nats) in &self.bracket_terms {
            out.push_str(&format!("{name:<width$}  {nats:.6}\n"));
        }
        out.push_str(&format!(
            "{:<width$}  {:.6}\n",
            "bracket_sum", self.bracket_sum_nats
        ));
        out.push_str(&format!(
            "dominant_dim     {}\ntotal            {} nats = {} bits\ndata_sufficient  {}\n",
            self.dominant_dim.to_scientific(),
            self.total_nats.to_scientific(),
            self.total_bits.to_scientific(),
            self.data_sufficient
        ));
        out
    }
}

const STANDARD_NOTES: [&str; 2] = [
    "information accumulates in nats internally; bits are derived at the report boundary",
    "eps_over_l is the task's desired performance level used verbatim in the bracket",
];

/// `ln c` for the sphere geometry term, from `ln z` so composed tasks with
/// huge submanifold counts stay in log space.
fn ln_geometry_c(m: u64, ln_z: f64) -> f64 {
    let mf = m as f64;
    0.5 * (mf / 6.0).ln()
        + (LN_2 + 0.5 * (mf + 1.0) * PI.ln() + ln_z - ln_gamma((mf + 1.0) / 2.0)) / mf
}

/// Relative slack under which `2 d z E` and `n d` count as equal, so the
/// boundary case lands on the data-sufficient side deterministically.
const DOMINANT_TIE_TOL: f64 = 1e-12;

fn assemble(
    dominant: LogScalar,
    two_dze_ln: f64,
    nd_ln: f64,
    terms: Vec<(String, f64)>,
    mut metadata: ReportMetadata,
) -> DifficultyReport {
    let bracket_sum: f64 = terms.iter().map(|(_, v)| v).sum();
    let data_sufficient = two_dze_ln <= nd_ln + DOMINANT_TIE_TOL;
    let total_nats = if data_sufficient {
        metadata.flags.push("data_sufficient".into());
        LogScalar::ZERO
    } else if bracket_sum <= 0.0 {
        // outside the regime the formula addresses; a negative requirement
        // is meaningless, so clamp and flag
        metadata.flags.push("bracket_nonpositive".into());
        LogScalar::ZERO
    } else {
        dominant.mul_f64(bracket_sum)
    };
    DifficultyReport {
        dominant_dim: dominant,
        bracket_terms: terms,
        bracket_sum_nats: bracket_sum,
        total_nats,
        total_bits: total_nats.to_bits(),
        data_sufficient,
        metadata,
    }
}

/// Difficulty of a task expressed directly in log-space parameters.
pub fn evaluate_log(ls: &LogTaskSpec) -> Result<DifficultyReport> {
    match ls.kind {
        TaskKind::RlCube => evaluate_rl_log(ls),
        TaskKind::Classification | TaskKind::General => evaluate_sphere_log(ls),
    }
}

fn evaluate_sphere_log(ls: &LogTaskSpec) -> Result<DifficultyReport> {
    let spectrum = SpectrumParams::new(ls.m, ls.r, ls.delta)?;
    let max_freq = spectrum.max_freq();
    let k_max = spectrum.max_mode();
    if k_max == 0 {
        return Err(Error::ResolutionTooCoarse { max_freq });
    }
    let eigen = spectrum.eigen_count();

    let two_dze_ln = LN_2 + ls.ln_d + ls.ln_z + eigen.ln_mag();
    let nd_ln = ls.ln_n + ls.ln_d;
    let dominant = LogScalar::from_sign_ln(1, two_dze_ln).sub(&LogScalar::from_sign_ln(1, nd_ln));

    let mf = ls.m as f64;
    let ln_k = (k_max as f64).ln();
    let ln_c = ln_geometry_c(ls.m, ls.ln_z);
    let terms: Vec<(String, f64)> = match ls.kind {
        TaskKind::Classification => vec![
            ("log_b".into(), ls.ln_b),
            ("three_halves_log_d".into(), 1.5 * ls.ln_d),
            ("log_k".into(), ln_k),
            ("neg_log_n_over_m".into(), -ls.ln_n / mf),
            ("neg_log_eps_over_l".into(), -ls.eps_over_l.ln()),
            ("log_c".into(), ln_c),
        ],
        _ => vec![
            ("log_b".into(), ls.ln_b),
            ("half_log_z".into(), 0.5 * ls.ln_z),
            ("log_d".into(), ls.ln_d),
            ("log_k".into(), ln_k),
            ("neg_log_n_over_m".into(), -ls.ln_n / mf),
            ("neg_log_eps_over_l".into(), -ls.eps_over_l.ln()),
            ("log_c".into(), ln_c),
        ],
    };

    let metadata = ReportMetadata {
        kind: ls.kind,
        m: ls.m,
        ln_n: ls.ln_n,
        ln_d: ls.ln_d,
        ln_z: ls.ln_z,
        r: Some(ls.r),
        delta: ls.delta,
        ln_b: ls.ln_b,
        eps_over_l: ls.eps_over_l,
        max_freq: Some(max_freq),
        max_mode: Some(k_max),
        eigen_count: eigen,
        flags: Vec::new(),
        notes: STANDARD_NOTES.iter().map(|s| s.to_string()).collect(),
    };
    Ok(assemble(dominant, two_dze_ln, nd_ln, terms, metadata))
}

fn evaluate_rl_log(ls: &LogTaskSpec) -> Result<DifficultyReport> {
    let eigen = spectral::euclidean_mode_count(ls.m, ls.delta);
    let two_e_ln = LN_2 + eigen.ln_mag();
    let diff = LogScalar::from_sign_ln(1, two_e_ln).sub(&LogScalar::from_sign_ln(1, ls.ln_n));
    let dominant = diff.mul(&LogScalar::from_sign_ln(1, ls.ln_d));

    let mf = ls.m as f64;
    let terms: Vec<(String, f64)> = vec![
        (
            "log_4pi2_over_sqrt6".into(),
            (4.0 * PI * PI / 6.0f64.sqrt()).ln(),
        ),
        ("log_d".into(), ls.ln_d),
        ("half_log_m".into(), 0.5 * mf.ln()),
        ("neg_log_delta".into(), -ls.delta.ln()),
        ("neg_log_n_over_m".into(), -ls.ln_n / mf),
        ("neg_log_eps_over_l".into(), -ls.eps_over_l.ln()),
    ];

    let mut notes: Vec<String> = STANDARD_NOTES.iter().map(|s| s.to_string()).collect();
    notes.push("hypercube observation domain; output bound b = sqrt(d) is baked in".into());
    let metadata = ReportMetadata {
        kind: ls.kind,
        m: ls.m,
        ln_n: ls.ln_n,
        ln_d: ls.ln_d,
        ln_z: 0.0,
        r: None,
        delta: ls.delta,
        ln_b: 0.5 * ls.ln_d,
        eps_over_l: ls.eps_over_l,
        max_freq: None,
        max_mode: None,
        eigen_count: eigen,
        flags: Vec::new(),
        notes,
    };
    Ok(assemble(
        dominant,
        two_e_ln + ls.ln_d,
        ls.ln_n + ls.ln_d,
        terms,
        metadata,
    ))
}

/// Difficulty of a validated task spec (any kind).
pub fn evaluate(spec: &TaskSpec) -> Result<DifficultyReport> {
    let resolved = spec.validated()?;
    evaluate_log(&resolved.to_log())
}

/// Generalized sphere-geometry difficulty; rejects RL specs.
pub fn difficulty_general(spec: &TaskSpec) -> Result<DifficultyReport> {
    if spec.kind == TaskKind::RlCube {
        return Err(Error::InvalidSpec(
            "difficulty_general expects a classification or general task".into(),
        ));
    }
    evaluate(spec)
}

/// RL difficulty on an m-dimensional hypercube observation domain.
pub fn difficulty_rl(
    m: u64,
    delta: f64,
    n: f64,
    d: u64,
    eps_over_l: f64,
) -> Result<DifficultyReport> {
    let spec = TaskSpec {
        kind: TaskKind::RlCube,
        m,
        n,
        d: d as f64,
        z: None,
        r: 1.0,
        delta,
        b: 1.0,
        eps_over_l,
    };
    evaluate(&spec)
}

/// Inner-task parameters of a few-shot episode classifier.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InnerTaskParams {
    pub z_g: u64,
    pub d_g: u64,
    pub m_g: u64,
    pub r_g: f64,
    pub delta_g: f64,
    pub b_g: f64,
}

/// Few-shot meta-learning task: learn a map from a W-way support set to a
/// classifier over the W classes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetaTaskSpec {
    pub ways: u64,
    pub shots_per_letter: u64,
    pub alphabet_sizes: Vec<u64>,
    pub inner: InnerTaskParams,
    /// Whole-dataset intrinsic dimension; must be at least the per-alphabet
    /// dimension `inner.m_g`.
    pub m1: f64,
    pub eps_over_l: f64,
}

impl MetaTaskSpec {
    fn validate(&self) -> Result<()> {
        let err = |msg: String| Err(Error::InvalidSpec(msg));
        if self.ways == 0 || self.shots_per_letter == 0 {
            return err("ways and shots_per_letter must be positive".into());
        }
        if self.inner.d_g == 0 {
            return err("inner classifier has zero-dimensional output (d_g = 0)".into());
        }
        if self.inner.z_g == 0 || self.inner.m_g == 0 {
            return err("inner z_g and m_g must be positive".into());
        }
        if self.alphabet_sizes.is_empty() || self.alphabet_sizes.contains(&0) {
            return err("alphabet_sizes must be nonempty positive counts".into());
        }
        for (name, v) in [
            ("r_g", self.inner.r_g),
            ("delta_g", self.inner.delta_g),
            ("b_g", self.inner.b_g),
            ("eps_over_l", self.eps_over_l),
            ("m1", self.m1),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return err(format!("{name} must be positive and finite, got {v}"));
            }
        }
        if self.m1 < self.inner.m_g as f64 {
            return err(format!(
                "m1 ({}) must be at least the per-alphabet dimension m_g ({})",
                self.m1, self.inner.m_g
            ));
        }
        Ok(())
    }

    /// Composes the outer task in log space:
    ///
    /// ```text
    /// d_f = 2 z_g d_g E_g          z_f = 1
    /// m_f = m1 + (W-1) m_g         r_f = r_g sqrt(W)
    /// delta_f = delta_g            b_f = b_g sqrt(z_g d_g)
    /// n   = sum_a C(max(l_a, W), W) * s^W
    /// ```
    pub fn compose(&self) -> Result<(LogTaskSpec, MetaComposition)> {
        self.validate()?;
        let inner = &self.inner;
        let spectrum = SpectrumParams::new(inner.m_g, inner.r_g, inner.delta_g)?;
        let k_g = spectrum.max_mode();
        if k_g == 0 {
            return Err(Error::ResolutionTooCoarse {
                max_freq: spectrum.max_freq(),
            });
        }
        let e_g = spectrum.eigen_count();
        let ln_d_f = LN_2 + (inner.z_g as f64).ln() + (inner.d_g as f64).ln() + e_g.ln_mag();

        let w = self.ways;
        let ln_shots = (self.shots_per_letter as f64).ln();
        let mut n_total = LogScalar::ZERO;
        for &letters in &self.alphabet_sizes {
            let choose = log_binomial(letters.max(w), w);
            let sets = LogScalar::from_sign_ln(1, choose.ln_mag() + w as f64 * ln_shots);
            n_total = log_add(n_total, sets);
        }

        let m_f_real = self.m1 + (w - 1) as f64 * inner.m_g as f64;
        let m_f = m_f_real.round().max(1.0) as u64;

        let ls = LogTaskSpec {
            kind: TaskKind::General,
            m: m_f,
            ln_n: n_total.ln_mag(),
            ln_d: ln_d_f,
            ln_z: 0.0,
            r: inner.r_g * (w as f64).sqrt(),
            delta: inner.delta_g,
            ln_b: inner.b_g.ln() + 0.5 * ((inner.z_g as f64).ln() + (inner.d_g as f64).ln()),
            eps_over_l: self.eps_over_l,
        };
        let composition = MetaComposition {
            k_g,
            eigen_count_g: e_g,
            ln_d_f,
            m_f,
            m_f_real,
            ln_n: n_total.ln_mag(),
        };
        Ok((ls, composition))
    }
}

/// Derived quantities of a meta composition, echoed into report notes.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct MetaComposition {
    pub k_g: u64,
    pub eigen_count_g: LogScalar,
    pub ln_d_f: f64,
    pub m_f: u64,
    pub m_f_real: f64,
    pub ln_n: f64,
}

/// Difficulty of the composed meta-learning task.
pub fn difficulty_meta(spec: &MetaTaskSpec) -> Result<DifficultyReport> {
    let (ls, comp) = spec.compose()?;
    let mut report = evaluate_log(&ls)?;
    report.metadata.notes.push(format!(
        "meta composition: W={} s={} K_g={} ln E_g={:.6} ln d_f={:.6} m_f={}",
        spec.ways,
        spec.shots_per_letter,
        comp.k_g,
        comp.eigen_count_g.ln_mag(),
        comp.ln_d_f,
        comp.m_f
    ));
    if (comp.m_f_real - comp.m_f as f64).abs() > 1e-9 {
        report
            .metadata
            .flags
            .push(format!("m_f rounded from {:.4}", comp.m_f_real));
    }
    Ok(report)
}

/// Bounds on the difficulty of solving two tasks jointly.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CombineOutcome {
    /// Lower bound in nats: `-ln(exp(-I1') + exp(-I2'))`.
    pub lower: LogScalar,
    /// Upper bound in nats: `I1' + I2'`.
    pub upper: LogScalar,
    pub i1_aug: DifficultyReport,
    pub i2_aug: DifficultyReport,
}

fn augmented(own: &ResolvedTaskSpec, other: &ResolvedTaskSpec) -> LogTaskSpec {
    let (a, b) = (own.spec(), other.spec());
    LogTaskSpec {
        kind: TaskKind::General,
        m: a.m + b.m,
        ln_n: a.n.ln() + b.n.ln(),
        ln_d: a.d.ln(),
        ln_z: own.z().ln() + other.z().ln(),
        r: (a.r * a.r + b.r * b.r).sqrt(),
        delta: a.delta,
        ln_b: 0.5 * (a.b * a.b + b.b * b.b).ln(),
        eps_over_l: a.eps_over_l,
    }
}

/// Combined-task difficulty bounds. Each side is augmented with the other
/// task's manifold as a distractor (m, n, z, b, r combine; delta, d and eps
/// stay the task's own), then
///
/// ```text
/// -ln(e^{-I1'} + e^{-I2'}) <= I <= I1' + I2'
/// ```
///
/// with the lower bound evaluated stably as
/// `min(I1', I2') - ln(1 + e^{-|I1' - I2'|})`.
pub fn combine(a: &TaskSpec, b: &TaskSpec) -> Result<CombineOutcome> {
    if a.kind == TaskKind::RlCube || b.kind == TaskKind::RlCube {
        return Err(Error::InvalidSpec(
            "combine expects sphere-geometry tasks".into(),
        ));
    }
    let ra = a.validated()?;
    let rb = b.validated()?;
    let i1 = evaluate_log(&augmented(&ra, &rb))?;
    let i2 = evaluate_log(&augmented(&rb, &ra))?;

    let upper = i1.total_nats.add(&i2.total_nats);
    let (lo, hi) = if i1.total_nats <= i2.total_nats {
        (i1.total_nats, i2.total_nats)
    } else {
        (i2.total_nats, i1.total_nats)
    };
    let gap = hi.sub(&lo).to_f64(); // >= 0; may overflow to +inf harmlessly
    let correction = (-gap).exp().ln_1p();
    let lower = lo.sub(&LogScalar::from_f64(correction));
    let lower = if lower.is_positive() {
        lower
    } else {
        // vacuous regime (a side clamped to zero); information is nonnegative
        LogScalar::ZERO
    };
    Ok(CombineOutcome {
        lower,
        upper,
        i1_aug: i1,
        i2_aug: i2,
    })
}

/// Information contributed by a model that reaches `test_error_rate` on the
/// task: the error rate substitutes for `eps_over_l` and the total is
/// returned in bits.
pub fn model_information(spec: &TaskSpec, test_error_rate: f64) -> Result<LogScalar> {
    if !(test_error_rate > 0.0 && test_error_rate < 1.0) {
        return Err(Error::InvalidSpec(format!(
            "test_error_rate must lie in (0,1), got {test_error_rate}"
        )));
    }
    let adjusted = TaskSpec {
        eps_over_l: test_error_rate,
        ..spec.clone()
    };
    Ok(evaluate(&adjusted)?.total_bits)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    N,
    EpsOverL,
    M,
    D,
    Delta,
}

impl std::str::FromStr for SweepParam {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "n" => Ok(SweepParam::N),
            "eps" | "eps_over_l" => Ok(SweepParam::EpsOverL),
            "m" => Ok(SweepParam::M),
            "d" => Ok(SweepParam::D),
            "delta" => Ok(SweepParam::Delta),
            other => Err(Error::InvalidSpec(format!(
                "unknown sweep parameter {other}"
            ))),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepPoint {
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub report: Option<DifficultyReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

/// Evaluates the spec at each value of one parameter, holding the rest
/// fixed. Sweeping `d` on a classification spec moves `z` in lockstep.
/// Per-point failures are recorded in the row and the sweep continues.
pub fn sweep(spec: &TaskSpec, param: SweepParam, values: &[f64]) -> Vec<SweepPoint> {
    values
        .iter()
        .map(|&value| {
            let mut s = spec.clone();
            match param {
                SweepParam::N => s.n = value,
                SweepParam::EpsOverL => s.eps_over_l = value,
                SweepParam::M => s.m = value.round().max(0.0) as u64,
                SweepParam::Delta => s.delta = value,
                SweepParam::D => {
                    s.d = value;
                    if s.kind == TaskKind::Classification {
                        s.z = None; // re-resolves to d
                    }
                }
            }
            match evaluate(&s) {
                Ok(report) => SweepPoint {
                    value,
                    report: Some(report),
                    error: None,
                },
                Err(e) => SweepPoint {
                    value,
                    report: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect()
}
