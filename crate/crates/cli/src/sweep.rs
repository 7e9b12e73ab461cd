//! Sweep expansion and CSV/JSON emission.
//!
//! A sweep is a list of (policy, M) pairs crossed with a list of K values;
//! every grid point runs one ensemble and becomes one output row carrying
//! the Holevo variance, its confidence interval, and the reference curves
//! at that resource count. Row seeds are derived from the master seed and
//! the point coordinates, so a sweep is reproducible as a whole while every
//! row is also reproducible on its own through the library API.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

use phasesim_core::{
    mix64, resource_count, run_ensemble_with, stage_passes, AdaptiveObjective, EnsembleOpts,
    PolicyKind, PolicySpec, TrialConfig, Visibility, MAX_K,
};

/// Fixed, versioned CSV column header (the `schema` column carries
/// [`SCHEMA_VERSION`]).
pub const CSV_HEADER: &str =
    "schema,N,policy,M,K,trials,v_holevo,sigma,ci_low,ci_high,sql_ref,hl_ref,asym_ref,seed";

/// Version number emitted in the `schema` column.
pub const SCHEMA_VERSION: u32 = 1;

/// Output encoding for sweep rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Everything that can go wrong while expanding or running a sweep.
#[derive(Debug, thiserror::Error)]
pub enum SweepError {
    /// Invalid flag combination or value; maps to the usage exit code.
    #[error("{0}")]
    Usage(String),
    /// The simulation rejected a configuration.
    #[error("{0}")]
    Sim(#[from] phasesim_core::Error),
    /// Output could not be written.
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

/// Visibility as requested on the command line: one scalar for every pass
/// count, or explicit per-pass values (unlisted pass counts default to 1).
#[derive(Debug, Clone, PartialEq)]
pub enum VisibilityArg {
    Scalar(f64),
    PerPass(BTreeMap<u32, f64>),
}

impl Default for VisibilityArg {
    fn default() -> Self {
        VisibilityArg::Scalar(1.0)
    }
}

impl VisibilityArg {
    /// Parse `"0.9"` or `"32:0.954,2:0.97,1:0.99"`.
    pub fn parse(s: &str) -> Result<Self, String> {
        if !s.contains(':') {
            let v: f64 = s
                .parse()
                .map_err(|_| format!("invalid visibility `{s}` (expected a number)"))?;
            return Ok(VisibilityArg::Scalar(v));
        }
        let mut map = BTreeMap::new();
        for pair in s.split(',') {
            let (p, v) = pair
                .split_once(':')
                .ok_or_else(|| format!("invalid visibility entry `{pair}` (expected p:v)"))?;
            let p: u32 = p
                .trim()
                .parse()
                .map_err(|_| format!("invalid pass count `{p}` in visibility"))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| format!("invalid visibility value `{v}`"))?;
            map.insert(p, v);
        }
        Ok(VisibilityArg::PerPass(map))
    }

    /// The multipass [`Visibility`] for a run with maximum exponent `k`:
    /// per-pass maps are completed with 1.0 at scheduled pass counts the
    /// user did not list.
    fn for_schedule(&self, k: u32) -> Visibility {
        match self {
            VisibilityArg::Scalar(v) => Visibility::Uniform(*v),
            VisibilityArg::PerPass(map) => {
                let mut filled = map.clone();
                for p in stage_passes(k) {
                    filled.entry(p).or_insert(1.0);
                }
                Visibility::PerPass(filled)
            }
        }
    }

    /// The single-pass scalar used by the standard scheme.
    fn single_pass(&self) -> f64 {
        match self {
            VisibilityArg::Scalar(v) => *v,
            VisibilityArg::PerPass(map) => map.get(&1).copied().unwrap_or(1.0),
        }
    }
}

/// Parse K specifications: each item is an integer or an inclusive range
/// like `0..5`.
pub fn parse_k_items(items: &[String]) -> Result<Vec<u32>, String> {
    let mut ks = Vec::new();
    for item in items {
        let item = item.trim();
        if let Some((a, b)) = item.split_once("..") {
            let a: u32 = a
                .parse()
                .map_err(|_| format!("invalid K range start `{a}`"))?;
            let b: u32 = b.parse().map_err(|_| format!("invalid K range end `{b}`"))?;
            if a > b {
                return Err(format!("empty K range `{item}`"));
            }
            ks.extend(a..=b);
        } else {
            ks.push(
                item.parse()
                    .map_err(|_| format!("invalid K value `{item}`"))?,
            );
        }
    }
    Ok(ks)
}

/// One grid point of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepPoint {
    pub policy: PolicyKind,
    pub m: u32,
    pub k: u32,
}

/// A validated sweep request.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    /// (policy, M) pairs, swept in order.
    pub pairs: Vec<(PolicyKind, u32)>,
    /// K values, swept in order for each pair.
    pub k_values: Vec<u32>,
    /// Trials per grid point.
    pub trials: u64,
    /// Fringe visibility for every point.
    pub visibility: VisibilityArg,
    /// True phase in radians (the initial feedback phase is randomized per
    /// trial regardless).
    pub phi_true: f64,
    /// Master seed; row seeds derive from it.
    pub seed: u64,
    /// Bootstrap resample count for the confidence intervals.
    pub bootstrap_b: u32,
    /// Objective used by the adaptive policy.
    pub objective: AdaptiveObjective,
    /// Output destination; `None` means standard output.
    pub out: Option<PathBuf>,
    /// Output encoding.
    pub format: OutputFormat,
}

impl SweepSpec {
    /// Build a sweep from flag-level lists, validating the cross product.
    /// Remaining settings start at their defaults and can be overridden on
    /// the returned value.
    pub fn from_flags(
        policies: &[String],
        ms: &[u32],
        k_items: &[String],
    ) -> Result<Self, SweepError> {
        if policies.is_empty() {
            return Err(SweepError::Usage(
                "no policies requested; pass --policy or --preset".into(),
            ));
        }
        if k_items.is_empty() {
            return Err(SweepError::Usage(
                "no K values requested; pass --k (e.g. --k 0..5)".into(),
            ));
        }
        let k_values = parse_k_items(k_items).map_err(SweepError::Usage)?;
        let ms: Vec<u32> = if ms.is_empty() { vec![1] } else { ms.to_vec() };
        let mut pairs = Vec::new();
        for name in policies {
            let policy: PolicyKind = name
                .parse()
                .map_err(|_| SweepError::Usage(format!("unknown policy `{name}`")))?;
            for &m in &ms {
                pairs.push((policy, m));
            }
        }
        let spec = Self {
            pairs,
            k_values,
            ..Self::base()
        };
        spec.validate()?;
        Ok(spec)
    }

    /// The three-policy comparison preset: nonadaptive (resource-matched),
    /// Kitaev (M=1), and six-photon adaptive, at K = 0..5 with 1000 trials
    /// per point — 18 rows.
    pub fn fig3() -> Self {
        Self {
            pairs: vec![
                (PolicyKind::Nonadaptive, 6),
                (PolicyKind::Kitaev, 1),
                (PolicyKind::Adaptive, 6),
            ],
            k_values: (0..=5).collect(),
            ..Self::base()
        }
    }

    fn base() -> Self {
        Self {
            pairs: Vec::new(),
            k_values: Vec::new(),
            trials: 1000,
            visibility: VisibilityArg::default(),
            phi_true: 0.0,
            seed: 0,
            bootstrap_b: phasesim_core::DEFAULT_BOOTSTRAP_B,
            objective: AdaptiveObjective::ExpectedSharpness,
            out: None,
            format: OutputFormat::Csv,
        }
    }

    /// Check the grid is non-empty and every point is runnable.
    pub fn validate(&self) -> Result<(), SweepError> {
        if self.pairs.is_empty() {
            return Err(SweepError::Usage("no (policy, M) pairs to sweep".into()));
        }
        if self.k_values.is_empty() {
            return Err(SweepError::Usage("no K values to sweep".into()));
        }
        if self.trials < 2 {
            return Err(SweepError::Usage(format!(
                "need at least 2 trials per point, got {}",
                self.trials
            )));
        }
        for &(policy, m) in &self.pairs {
            if m == 0 {
                return Err(SweepError::Usage("M must be at least 1".into()));
            }
            if policy == PolicyKind::Kitaev && m != 1 {
                return Err(SweepError::Usage(format!(
                    "kitaev uses exactly one photon per stage; got M = {m}"
                )));
            }
        }
        for &k in &self.k_values {
            if k > MAX_K {
                return Err(SweepError::Usage(format!(
                    "K = {k} exceeds the supported maximum {MAX_K}"
                )));
            }
        }
        match &self.visibility {
            VisibilityArg::Scalar(v) => {
                if !(0.0..=1.0).contains(v) {
                    return Err(SweepError::Usage(format!(
                        "visibility must lie in [0, 1], got {v}"
                    )));
                }
            }
            VisibilityArg::PerPass(map) => {
                for (p, v) in map {
                    if !(0.0..=1.0).contains(v) {
                        return Err(SweepError::Usage(format!(
                            "visibility must lie in [0, 1], got {v} at p = {p}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// The grid points in output order (pair-major, then K ascending).
    pub fn points(&self) -> Vec<SweepPoint> {
        let mut pts = Vec::with_capacity(self.pairs.len() * self.k_values.len());
        for &(policy, m) in &self.pairs {
            for &k in &self.k_values {
                pts.push(SweepPoint { policy, m, k });
            }
        }
        pts
    }
}

/// One output row; field order matches [`CSV_HEADER`] and the JSON mirror
/// uses the same names.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Row {
    pub schema: u32,
    #[serde(rename = "N")]
    pub n: u64,
    pub policy: PolicyKind,
    #[serde(rename = "M")]
    pub m: u32,
    #[serde(rename = "K")]
    pub k: u32,
    pub trials: u64,
    pub v_holevo: f64,
    pub sigma: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub sql_ref: f64,
    pub hl_ref: f64,
    pub asym_ref: f64,
    pub seed: u64,
}

impl Row {
    /// Serialize in CSV column order with 17 significant digits per float.
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
            self.schema,
            self.n,
            self.policy,
            self.m,
            self.k,
            self.trials,
            self.v_holevo,
            self.sigma,
            self.ci_low,
            self.ci_high,
            self.sql_ref,
            self.hl_ref,
            self.asym_ref,
            self.seed,
        )
    }
}

fn policy_tag(policy: PolicyKind) -> u64 {
    match policy {
        PolicyKind::Kitaev => 1,
        PolicyKind::Adaptive => 2,
        PolicyKind::Nonadaptive => 3,
    }
}

/// Seed for one grid point, derived from the master seed and the point
/// coordinates. Pure, so any row can be reproduced without running the rest
/// of the sweep.
pub fn row_seed(master: u64, point: &SweepPoint) -> u64 {
    let tag = (policy_tag(point.policy) << 48) | ((point.m as u64) << 16) | point.k as u64;
    mix64(master ^ mix64(tag))
}

/// Build the trial configuration for one grid point.
fn point_config(spec: &SweepSpec, point: &SweepPoint) -> Result<TrialConfig, SweepError> {
    let seed = row_seed(spec.seed, point);
    match point.policy {
        PolicyKind::Nonadaptive => {
            // Resource-matched: N single-pass photons, where N is the
            // resource count of the multipass points at the same (M, K).
            let n = resource_count(point.k, point.m)?;
            let mut cfg = TrialConfig::standard(n, spec.visibility.single_pass())?;
            cfg.seed = seed;
            Ok(cfg)
        }
        kind => {
            let mut policy = match kind {
                PolicyKind::Kitaev => PolicySpec::kitaev(),
                _ => PolicySpec::adaptive(),
            };
            policy.objective = spec.objective;
            Ok(TrialConfig {
                k: point.k,
                m: point.m,
                policy,
                visibility: spec.visibility.for_schedule(point.k),
                seed,
            })
        }
    }
}

/// Run one grid point and summarize it as an output row.
pub fn run_point(spec: &SweepSpec, point: &SweepPoint) -> Result<Row, SweepError> {
    let cfg = point_config(spec, point)?;
    let summary = run_ensemble_with(
        &cfg,
        spec.trials,
        cfg.seed,
        &EnsembleOpts {
            phi_true: spec.phi_true,
            bootstrap_b: spec.bootstrap_b,
        },
    )?;
    Ok(Row {
        schema: SCHEMA_VERSION,
        n: summary.n,
        policy: point.policy,
        m: point.m,
        k: point.k,
        trials: spec.trials,
        v_holevo: summary.v_holevo,
        sigma: summary.sigma,
        ci_low: summary.ci_low,
        ci_high: summary.ci_high,
        sql_ref: summary.sql_ref,
        hl_ref: summary.hl_ref,
        asym_ref: summary.asym_ref,
        seed: cfg.seed,
    })
}

/// Run the whole sweep, writing rows to `out` in the requested format.
///
/// Progress goes to standard error; the data stream stays machine-clean.
/// Output is byte-identical across runs for a fixed spec.
pub fn run_sweep<W: Write>(spec: &SweepSpec, out: &mut W) -> Result<Vec<Row>, SweepError> {
    spec.validate()?;
    let points = spec.points();
    let total = points.len();
    let mut rows = Vec::with_capacity(total);
    for (i, point) in points.iter().enumerate() {
        let row = run_point(spec, point)?;
        eprintln!(
            "[{}/{}] {} M={} K={} N={} v_holevo={:.4e}",
            i + 1,
            total,
            point.policy,
            point.m,
            point.k,
            row.n,
            row.v_holevo
        );
        rows.push(row);
    }
    match spec.format {
        OutputFormat::Csv => {
            writeln!(out, "{CSV_HEADER}")?;
            for row in &rows {
                writeln!(out, "{}", row.to_csv())?;
            }
        }
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut *out, &rows)
                .map_err(|e| SweepError::Io(e.into()))?;
            writeln!(out)?;
        }
    }
    out.flush()?;
    Ok(rows)
}

/// Run the sweep against its configured destination (file or stdout).
pub fn run_sweep_to_output(spec: &SweepSpec) -> Result<Vec<Row>, SweepError> {
    match &spec.out {
        Some(path) => {
            let mut file = std::fs::File::create(path)?;
            run_sweep(spec, &mut file)
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            run_sweep(spec, &mut lock)
        }
    }
}
