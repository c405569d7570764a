//! Seeded Monte Carlo experiments checking distributional statements about
//! Haar unitaries, plus a few deterministic cross-checks.
//!
//! Every trial draws from its own [`RngStream`] substream, so reports are
//! identical across runs and thread counts. Kolmogorov–Smirnov sub-tests are
//! judged jointly: the experiment passes when every p-value clears the
//! Bonferroni threshold `alpha / m`.

use std::collections::BTreeMap;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, identity, ComplexMatrix, UnitaryOperator};
use crate::measures::{moment_space_position, spectral_measure, MatrixMeasure, MomentPosition};
use crate::mopuc::{bernstein_szego_density, verblunsky_by_deflation, VerblunskySeq};
use crate::rates::{rate_ac_measure, rate_ball, rate_seq};
use crate::rng::RngStream;
use crate::sampling::{self, corner_log_density, haar_corner, sample_haar, sample_weights, HaarBackend};
use crate::stats::{bonferroni, correlation, ks_statistic, ks_two_sample, normal_cdf};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    VerblunskyLaw,
    Clt,
    CornerClt,
    PowerEntries,
    WeightsEquivalence,
    Independence,
    SzegoIdentity,
    MomentInterior,
    LdpDecay,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 9] = [
        ExperimentKind::VerblunskyLaw,
        ExperimentKind::Clt,
        ExperimentKind::CornerClt,
        ExperimentKind::PowerEntries,
        ExperimentKind::WeightsEquivalence,
        ExperimentKind::Independence,
        ExperimentKind::SzegoIdentity,
        ExperimentKind::MomentInterior,
        ExperimentKind::LdpDecay,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::VerblunskyLaw => "verblunsky-law",
            ExperimentKind::Clt => "clt",
            ExperimentKind::CornerClt => "corner-clt",
            ExperimentKind::PowerEntries => "power-entries",
            ExperimentKind::WeightsEquivalence => "weights-equivalence",
            ExperimentKind::Independence => "independence",
            ExperimentKind::SzegoIdentity => "szego-identity",
            ExperimentKind::MomentInterior => "moment-interior",
            ExperimentKind::LdpDecay => "ldp-decay",
        }
    }

    /// The statement the experiment checks.
    pub fn statement(self) -> &'static str {
        match self {
            ExperimentKind::VerblunskyLaw => {
                "For Haar U of size N = Qp + r, the Verblunsky coefficients a_0..a_{Q-2} of (U, span{e_1..e_p}) \
                 are independent and a_j has the law Cor(N - pj, p) of a p x p Haar corner"
            }
            ExperimentKind::Clt => "sqrt(N) a_j converges to Gin(p) for each fixed j",
            ExperimentKind::CornerClt => "sqrt(N) times the p x p corner of a Haar unitary converges to Gin(p)",
            ExperimentKind::PowerEntries => "sqrt(N) [U^n]_{ij} converges to a standard complex Gaussian for fixed n, i, j",
            ExperimentKind::WeightsEquivalence => {
                "Spectral weights of a Haar unitary have the law of h^{-1/2} a_k a_k^* h^{-1/2} with Gaussian a_k"
            }
            ExperimentKind::Independence => "Eigenvalues and spectral weights of a Haar unitary are independent",
            ExperimentKind::SzegoIdentity => {
                "Matrix Szego identity: -int log det W dtheta/2pi = -sum_j log det(I - a_j^* a_j) for Bernstein-Szego W"
            }
            ExperimentKind::MomentInterior => {
                "Moments m_0..m_J of the spectral measure of a Haar unitary lie in the interior of the moment space for J <= Q - 1"
            }
            ExperimentKind::LdpDecay => "-(1/N) log density of Cor(N, 1) at v approaches -log(1 - |v|^2)",
        }
    }
}

impl std::fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown experiment '{s}'")))
    }
}

/// User-facing configuration; unset fields take per-experiment defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Option<ExperimentKind>,
    #[serde(rename = "N")]
    pub n: Option<usize>,
    pub p: Option<usize>,
    /// Number of coefficients, powers or moments, depending on the experiment.
    #[serde(rename = "J")]
    pub j: Option<usize>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub grid_size: Option<usize>,
    /// Family-wise significance level.
    pub alpha: Option<f64>,
    /// Absolute tolerance for deterministic checks.
    pub tolerance: Option<f64>,
    pub backend: Option<HaarBackend>,
    /// Matrix sizes for `ldp-decay`.
    pub sizes: Option<Vec<usize>>,
    /// Evaluation point for `ldp-decay`.
    pub point: Option<f64>,
    pub out: Option<String>,
}

/// Configuration with every default filled in.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResolvedConfig {
    pub experiment: ExperimentKind,
    #[serde(rename = "N")]
    pub n: usize,
    pub p: usize,
    #[serde(rename = "Q")]
    pub q: usize,
    pub r: usize,
    #[serde(rename = "J")]
    pub j: usize,
    pub samples: usize,
    pub seed: u64,
    pub grid_size: usize,
    pub alpha: f64,
    pub tolerance: f64,
    pub backend: HaarBackend,
    pub sizes: Vec<usize>,
    pub point: f64,
}

impl ExperimentConfig {
    pub fn for_experiment(kind: ExperimentKind) -> Self {
        Self { experiment: Some(kind), ..Self::default() }
    }

    pub fn resolve(&self) -> Result<ResolvedConfig> {
        use ExperimentKind::*;
        let kind = self
            .experiment
            .ok_or_else(|| Error::InvalidArgument("no experiment selected".into()))?;
        let (n_default, p_default, samples_default, backend_default) = match kind {
            VerblunskyLaw => (48, 2, 2000, HaarBackend::Dense),
            Clt | CornerClt | PowerEntries => (256, 1, 2000, HaarBackend::Householder),
            WeightsEquivalence => (16, 2, 5000, HaarBackend::Dense),
            Independence => (16, 2, 2000, HaarBackend::Dense),
            SzegoIdentity => (0, 3, 100, HaarBackend::Dense),
            MomentInterior => (48, 2, 500, HaarBackend::Dense),
            LdpDecay => (0, 1, 0, HaarBackend::Dense),
        };
        let n = self.n.unwrap_or(n_default);
        let p = self.p.unwrap_or(p_default);
        if p == 0 {
            return Err(Error::InvalidArgument("p must be positive".into()));
        }
        let (q, r) = (n / p, n % p);
        let j = match kind {
            VerblunskyLaw => self.j.unwrap_or(q.saturating_sub(1)),
            Clt | PowerEntries => self.j.unwrap_or(3),
            SzegoIdentity => self.j.unwrap_or(4),
            MomentInterior => self.j.unwrap_or(q.saturating_sub(1)),
            _ => self.j.unwrap_or(0),
        };
        let resolved = ResolvedConfig {
            experiment: kind,
            n,
            p,
            q,
            r,
            j,
            samples: self.samples.unwrap_or(samples_default),
            seed: self.seed.unwrap_or(0),
            grid_size: self.grid_size.unwrap_or(crate::measures::DEFAULT_GRID_SIZE),
            alpha: self.alpha.unwrap_or(0.01),
            tolerance: self.tolerance.unwrap_or(1e-6),
            backend: self.backend.unwrap_or(backend_default),
            sizes: self.sizes.clone().unwrap_or_else(|| vec![200, 400, 800]),
            point: self.point.unwrap_or(0.5),
        };
        resolved.validate()?;
        Ok(resolved)
    }
}

impl ResolvedConfig {
    fn validate(&self) -> Result<()> {
        use ExperimentKind::*;
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad(format!("alpha must lie in (0, 1), got {}", self.alpha));
        }
        let needs_ks = matches!(self.experiment, VerblunskyLaw | Clt | CornerClt | PowerEntries | WeightsEquivalence);
        if needs_ks && self.samples < crate::stats::KS_MIN_SAMPLES {
            return Err(Error::TooFewSamples { needed: crate::stats::KS_MIN_SAMPLES, got: self.samples });
        }
        match self.experiment {
            VerblunskyLaw => {
                if self.q <= 2 {
                    return bad(format!("verblunsky-law needs Q > 2, got N = {} = {}p + {}", self.n, self.q, self.r));
                }
                if self.j == 0 || self.j > self.q - 1 {
                    return bad(format!("J must lie in 1..={} (coefficients a_0..a_{{Q-2}})", self.q - 1));
                }
            }
            Clt => {
                if self.j == 0 || self.p * (self.j + 1) > self.n {
                    return bad(format!("clt needs p (J + 1) <= N, got p = {}, J = {}, N = {}", self.p, self.j, self.n));
                }
            }
            CornerClt => {
                if self.p > self.n {
                    return bad("corner-clt needs p <= N".into());
                }
            }
            PowerEntries => {
                if self.j == 0 || self.p > self.n {
                    return bad("power-entries needs J >= 1 and p <= N".into());
                }
            }
            WeightsEquivalence | Independence => {
                if self.p > self.n {
                    return bad("need p <= N".into());
                }
            }
            SzegoIdentity => {
                if self.samples == 0 || !self.grid_size.is_power_of_two() {
                    return bad("szego-identity needs samples >= 1 and a power-of-two grid".into());
                }
            }
            MomentInterior => {
                if self.samples == 0 || self.p > self.n {
                    return bad("moment-interior needs samples >= 1 and p <= N".into());
                }
            }
            LdpDecay => {
                if self.sizes.iter().any(|&n| n < 3) || self.point.is_nan() || self.point.abs() >= 1.0 {
                    return bad("ldp-decay needs sizes >= 3 and |point| < 1".into());
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SubTestKind {
    /// Kolmogorov–Smirnov test, passes when `p_value > threshold`.
    Ks,
    /// Deterministic or empirical bound, passes when `statistic <= threshold`.
    Bound,
    /// Empirical frequency, passes when `statistic >= threshold`.
    Frequency,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubTest {
    pub name: String,
    pub functional: String,
    pub kind: SubTestKind,
    pub statistic: f64,
    pub p_value: Option<f64>,
    pub threshold: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Timing {
    pub wall_seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub experiment: ExperimentKind,
    pub statement: &'static str,
    pub config: ResolvedConfig,
    pub family_alpha: f64,
    pub ks_tests: usize,
    pub per_test_threshold: f64,
    pub tests: Vec<SubTest>,
    pub diagnostics: BTreeMap<String, f64>,
    pub passed: bool,
    /// Wall-clock time; the only field that differs between identical runs.
    pub timing: Timing,
}

impl ExperimentReport {
    /// The report without timing, which is reproducible from the config.
    pub fn deterministic_value(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("reports serialize");
        v.as_object_mut().unwrap().remove("timing");
        v
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("experiment,test,functional,kind,statistic,p_value,threshold,passed\n");
        for t in &self.tests {
            out.push_str(&format!(
                "{},{},\"{}\",{},{},{},{},{}\n",
                self.experiment,
                t.name,
                t.functional.replace('"', "'"),
                serde_json::to_value(t.kind).unwrap().as_str().unwrap(),
                t.statistic,
                t.p_value.map_or(String::new(), |p| p.to_string()),
                t.threshold,
                t.passed
            ));
        }
        out
    }

    /// Smallest KS p-value, if any KS test ran.
    pub fn min_p_value(&self) -> Option<f64> {
        self.tests.iter().filter_map(|t| t.p_value).reduce(f64::min)
    }
}

struct Pending {
    name: String,
    functional: String,
    kind: SubTestKind,
    statistic: f64,
    p_value: Option<f64>,
    threshold: f64,
}

fn ks_pending(name: String, functional: String, r: crate::stats::KsResult) -> Pending {
    Pending { name, functional, kind: SubTestKind::Ks, statistic: r.statistic, p_value: Some(r.p_value), threshold: 0.0 }
}

fn finish(cfg: ResolvedConfig, pending: Vec<Pending>, diagnostics: BTreeMap<String, f64>, start: Instant) -> ExperimentReport {
    let ks_tests = pending.iter().filter(|t| t.kind == SubTestKind::Ks).count();
    let per_test_threshold = bonferroni(cfg.alpha, ks_tests);
    let tests: Vec<SubTest> = pending
        .into_iter()
        .map(|t| {
            let threshold = if t.kind == SubTestKind::Ks { per_test_threshold } else { t.threshold };
            let passed = match t.kind {
                SubTestKind::Ks => t.p_value.is_some_and(|p| p > threshold),
                SubTestKind::Bound => t.statistic <= threshold,
                SubTestKind::Frequency => t.statistic >= threshold,
            };
            SubTest { name: t.name, functional: t.functional, kind: t.kind, statistic: t.statistic, p_value: t.p_value, threshold, passed }
        })
        .collect();
    let passed = tests.iter().all(|t| t.passed);
    ExperimentReport {
        experiment: cfg.experiment,
        statement: cfg.experiment.statement(),
        family_alpha: cfg.alpha,
        ks_tests,
        per_test_threshold,
        tests,
        diagnostics,
        passed,
        timing: Timing { wall_seconds: start.elapsed().as_secs_f64() },
        config: cfg,
    }
}

/// Runs `f` once per trial, each with its own substream, in parallel and in order.
fn trials<T: Send>(seed: u64, family: u32, count: usize, f: impl Fn(&mut RngStream) -> Result<T> + Sync) -> Result<Vec<T>> {
    (0..count)
        .into_par_iter()
        .map(|i| f(&mut RngStream::substream(seed, family, i as u64)))
        .collect()
}

fn log_det_gap(a: &ComplexMatrix) -> f64 {
    let p = a.nrows();
    linalg::log_det_hermitian(&linalg::hermitian_part(&(identity(p) - a * a.adjoint()))).unwrap_or(f64::NEG_INFINITY)
}

/// Runs one experiment.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let cfg = config.resolve()?;
    let start = Instant::now();
    let (pending, diagnostics) = match cfg.experiment {
        ExperimentKind::VerblunskyLaw => verblunsky_law(&cfg)?,
        ExperimentKind::Clt => clt(&cfg)?,
        ExperimentKind::CornerClt => corner_clt(&cfg)?,
        ExperimentKind::PowerEntries => power_entries(&cfg)?,
        ExperimentKind::WeightsEquivalence => weights_equivalence(&cfg)?,
        ExperimentKind::Independence => independence(&cfg)?,
        ExperimentKind::SzegoIdentity => szego_identity(&cfg)?,
        ExperimentKind::MomentInterior => moment_interior(&cfg)?,
        ExperimentKind::LdpDecay => ldp_decay(&cfg)?,
    };
    Ok(finish(cfg, pending, diagnostics, start))
}

type Outcome = Result<(Vec<Pending>, BTreeMap<String, f64>)>;

fn verblunsky_law(cfg: &ResolvedConfig) -> Outcome {
    let (n, p, count) = (cfg.n, cfg.p, cfg.j);
    let observed: Vec<Vec<f64>> = trials(cfg.seed, 1, cfg.samples, |rng| {
        let u = cfg.backend.sample(n, rng);
        let seq = verblunsky_by_deflation(&u, p, count)?;
        Ok(seq.coeffs().iter().map(log_det_gap).collect())
    })?;
    let mut pending = Vec::with_capacity(count);
    let mut columns = Vec::with_capacity(count);
    for j in 0..count {
        let size = n - p * j;
        let reference: Vec<f64> = trials(cfg.seed, 100 + j as u32, cfg.samples, |rng| {
            Ok(log_det_gap(&haar_corner(size, p, cfg.backend, rng)?))
        })?;
        let column: Vec<f64> = observed.iter().map(|row| row[j]).collect();
        pending.push(ks_pending(
            format!("a_{j}"),
            format!("log det(I - a_{j} a_{j}^*) vs corner of Haar({size})"),
            ks_two_sample(&column, &reference)?,
        ));
        columns.push(column);
    }
    let mut diagnostics = BTreeMap::new();
    let max_corr = (0..count)
        .flat_map(|a| ((a + 1)..count).map(move |b| (a, b)))
        .map(|(a, b)| correlation(&columns[a], &columns[b]).abs())
        .fold(0.0, f64::max);
    diagnostics.insert("max_pairwise_abs_correlation".into(), max_corr);
    Ok((pending, diagnostics))
}

fn entry_tests(pending: &mut Vec<Pending>, label: &str, values: &[Complex64], scale: f64) -> Result<()> {
    let re: Vec<f64> = values.iter().map(|z| z.re * scale).collect();
    let im: Vec<f64> = values.iter().map(|z| z.im * scale).collect();
    for (part, xs) in [("Re", re), ("Im", im)] {
        pending.push(ks_pending(
            format!("{part} {label}"),
            format!("sqrt(N) {part}({label}) vs normal(0, 1/2)"),
            ks_statistic(&xs, |x| normal_cdf(x, 0.5))?,
        ));
    }
    Ok(())
}

fn clt(cfg: &ResolvedConfig) -> Outcome {
    let (n, p, k) = (cfg.n, cfg.p, cfg.j);
    let draws: Vec<Vec<Complex64>> = trials(cfg.seed, 2, cfg.samples, |rng| {
        let u = cfg.backend.sample(n, rng);
        let seq = verblunsky_by_deflation(&u, p, k)?;
        Ok(seq.coeffs().iter().map(|a| a[(0, 0)]).collect())
    })?;
    let scale = (n as f64).sqrt();
    let mut pending = Vec::new();
    for j in 0..k {
        let values: Vec<Complex64> = draws.iter().map(|d| d[j]).collect();
        entry_tests(&mut pending, &format!("(a_{j})_11"), &values, scale)?;
    }
    Ok((pending, BTreeMap::new()))
}

fn corner_clt(cfg: &ResolvedConfig) -> Outcome {
    let (n, p) = (cfg.n, cfg.p);
    let draws: Vec<ComplexMatrix> = trials(cfg.seed, 3, cfg.samples, |rng| haar_corner(n, p, cfg.backend, rng))?;
    let scale = (n as f64).sqrt();
    let mut pending = Vec::new();
    for i in 0..p {
        for j in 0..p {
            let values: Vec<Complex64> = draws.iter().map(|v| v[(i, j)]).collect();
            entry_tests(&mut pending, &format!("V_{}{}", i + 1, j + 1), &values, scale)?;
        }
    }
    Ok((pending, BTreeMap::new()))
}

fn power_entries(cfg: &ResolvedConfig) -> Outcome {
    let (n, p, n0) = (cfg.n, cfg.p, cfg.j);
    let draws: Vec<Vec<ComplexMatrix>> = trials(cfg.seed, 4, cfg.samples, |rng| {
        let u = cfg.backend.sample(n, rng);
        let mut cols = identity(n).columns(0, p).into_owned();
        let mut corners = Vec::with_capacity(n0);
        for _ in 0..n0 {
            cols = u.apply(&cols);
            corners.push(cols.rows(0, p).into_owned());
        }
        Ok(corners)
    })?;
    let scale = (n as f64).sqrt();
    let mut pending = Vec::new();
    for power in 1..=n0 {
        for i in 0..p {
            for j in 0..p {
                let values: Vec<Complex64> = draws.iter().map(|c| c[power - 1][(i, j)]).collect();
                entry_tests(&mut pending, &format!("[U^{power}]_{}{}", i + 1, j + 1), &values, scale)?;
            }
        }
    }
    Ok((pending, BTreeMap::new()))
}

/// Gaussian weights, drawing again on the (probability zero) singular event.
fn gaussian_weights(n: usize, p: usize, rng: &mut RngStream) -> Result<Vec<ComplexMatrix>> {
    loop {
        match sample_weights(n, p, rng) {
            Err(Error::SingularSample) => continue,
            other => return other,
        }
    }
}

fn weights_equivalence(cfg: &ResolvedConfig) -> Outcome {
    let (n, p) = (cfg.n, cfg.p);
    let spectral: Vec<f64> = trials(cfg.seed, 5, cfg.samples, |rng| {
        let mu = spectral_measure(&sample_haar(n, rng), p)?;
        Ok(mu.weights()[0].trace().re)
    })?;
    let gaussian: Vec<f64> = trials(cfg.seed, 6, cfg.samples, |rng| Ok(gaussian_weights(n, p, rng)?[0].trace().re))?;
    let pending = vec![ks_pending(
        "tr(w_1)".into(),
        "tr(w_1): spectral weights of Haar(N) vs Gaussian construction".into(),
        ks_two_sample(&spectral, &gaussian)?,
    )];
    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("mean_tr_w1_spectral".into(), crate::stats::mean(&spectral));
    diagnostics.insert("mean_tr_w1_gaussian".into(), crate::stats::mean(&gaussian));
    diagnostics.insert("expected_mean_tr_w1".into(), p as f64 / n as f64);
    Ok((pending, diagnostics))
}

fn independence(cfg: &ResolvedConfig) -> Outcome {
    let (n, p) = (cfg.n, cfg.p);
    let mid = n / 2;
    let rows: Vec<[f64; 4]> = trials(cfg.seed, 7, cfg.samples, |rng| {
        let u = sample_haar(n, rng);
        let mu = spectral_measure(&u, p)?;
        if mu.len() != n {
            return Err(Error::Postcondition("Haar sample with a repeated eigenvalue".into()));
        }
        let cos_sum: f64 = mu.atoms().iter().map(|t| t.cos()).sum();
        Ok([mu.atoms()[0], cos_sum, mu.weights()[0].trace().re, mu.weights()[mid][(0, 0)].re])
    })?;
    let column = |k: usize| -> Vec<f64> { rows.iter().map(|r| r[k]).collect() };
    let threshold = 4.0 / (cfg.samples as f64).sqrt();
    let names = ["theta_min", "sum_k cos theta_k", "tr(w_1)", &format!("(w_{})_11", mid + 1)];
    let mut pending = Vec::new();
    for a in 0..2 {
        for b in 2..4 {
            pending.push(Pending {
                name: format!("corr({}, {})", names[a], names[b]),
                functional: format!("|sample correlation| of {} and {}", names[a], names[b]),
                kind: SubTestKind::Bound,
                statistic: correlation(&column(a), &column(b)).abs(),
                p_value: None,
                threshold,
            });
        }
    }
    Ok((pending, BTreeMap::new()))
}

/// Random Verblunsky sequence with `‖α_j‖ <= max_norm`.
pub fn random_sequence(p: usize, len: usize, max_norm: f64, rng: &mut RngStream) -> VerblunskySeq {
    let coeffs = (0..len)
        .map(|_| {
            let g = sampling::sample_ginibre(p, rng);
            let target = max_norm * rng.uniform();
            let norm = linalg::operator_norm(&g);
            g * Complex64::new(target / norm, 0.0)
        })
        .collect();
    VerblunskySeq::new(p, coeffs).expect("scaled into the ball")
}

fn szego_identity(cfg: &ResolvedConfig) -> Outcome {
    let deviations: Vec<f64> = trials(cfg.seed, 8, cfg.samples, |rng| {
        let p = 1 + (rng.next_u64() % cfg.p as u64) as usize;
        let len = 1 + (rng.next_u64() % cfg.j.max(1) as u64) as usize;
        let seq = random_sequence(p, len, 0.7, rng);
        let lhs = rate_seq(&seq).value.finite().ok_or_else(|| Error::Postcondition("infinite rate".into()))?;
        let rhs = rate_ac_measure(&bernstein_szego_density(&seq, cfg.grid_size)?)
            .value
            .finite()
            .ok_or_else(|| Error::Postcondition("infinite entropy".into()))?;
        Ok((lhs - rhs).abs())
    })?;
    let worst = deviations.iter().copied().fold(0.0, f64::max);
    let pending = vec![Pending {
        name: "max deviation".into(),
        functional: "|rate_seq(a) - rate_ac_measure(bernstein_szego_density(a))|".into(),
        kind: SubTestKind::Bound,
        statistic: worst,
        p_value: None,
        threshold: cfg.tolerance,
    }];
    Ok((pending, BTreeMap::new()))
}

fn moment_interior(cfg: &ResolvedConfig) -> Outcome {
    let (n, p, jmax) = (cfg.n, cfg.p, cfg.j);
    let verdicts: Vec<MomentPosition> = trials(cfg.seed, 9, cfg.samples, |rng| {
        let mu = spectral_measure(&sample_haar(n, rng), p)?;
        moment_space_position(&mu.moments(jmax))
    })?;
    let interior = verdicts.iter().filter(|v| **v == MomentPosition::Interior).count();
    let pending = vec![Pending {
        name: "interior frequency".into(),
        functional: format!("fraction of trials with m_0..m_{jmax} interior"),
        kind: SubTestKind::Frequency,
        statistic: interior as f64 / cfg.samples as f64,
        p_value: None,
        threshold: 1.0,
    }];
    Ok((pending, BTreeMap::new()))
}

fn ldp_decay(cfg: &ResolvedConfig) -> Outcome {
    let v = ComplexMatrix::from_element(1, 1, Complex64::new(cfg.point, 0.0));
    let rate = rate_ball(&v).value.finite().expect("point inside the disc");
    let mut pending = Vec::new();
    for &n in &cfg.sizes {
        let decay = -corner_log_density(&v, n, 1)? / n as f64;
        let nf = n as f64;
        pending.push(Pending {
            name: format!("N = {n}"),
            functional: "|-(1/N) log density(v) - rate_ball(v)|".into(),
            kind: SubTestKind::Bound,
            statistic: (decay - rate).abs(),
            p_value: None,
            threshold: 2.0 * nf.ln() / nf,
        });
    }
    Ok((pending, BTreeMap::new()))
}
