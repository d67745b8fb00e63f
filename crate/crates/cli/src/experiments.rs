//! Named experiments: sweep axes, curve definitions and evaluation.

use std::collections::BTreeMap;
use std::fmt::Display;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use netmimo::analytic::{
    eta_grid, isolated_cell_rate, per_bs_ergodic_sum_rate, AnalyticParams, QuadratureSpec, RateMethod, RateResult,
};
use netmimo::config::SystemConfig;
use netmimo::montecarlo::{self, Association, Beamformer, BsCountModel, EmptyCenter, Scenario, SimPlan, SimResult};
use netmimo::stats::median;

use crate::error::{CliError, Result};
use crate::validation::{self, ValidationSettings};

/// Largest average cluster size simulated; larger points are analytic only.
pub const MAX_SIMULATED_CLUSTER: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentName {
    /// Per-BS rate vs cluster size for several loading factors.
    Fig2EtaClusterSweep,
    /// Per-BS rate vs loading factor; reports the optimum.
    Fig3EtaSweep,
    /// ZF vs regularized ZF under random scheduling.
    FigSchedulingRzf,
    /// Cluster-size gain under several association and BS-count models.
    Fig4ClusterScaling,
    /// Clustered vs isolated cluster vs isolated cell, up to very large clusters.
    Fig5IsolatedComparison,
    /// Distribution of long-run user rates under round-robin scheduling.
    CdfUserRates,
    /// The acceptance and property suites.
    Validate,
}

impl ExperimentName {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentName::Fig2EtaClusterSweep => "fig2-eta-cluster-sweep",
            ExperimentName::Fig3EtaSweep => "fig3-eta-sweep",
            ExperimentName::FigSchedulingRzf => "fig-scheduling-rzf",
            ExperimentName::Fig4ClusterScaling => "fig4-cluster-scaling",
            ExperimentName::Fig5IsolatedComparison => "fig5-isolated-comparison",
            ExperimentName::CdfUserRates => "cdf-user-rates",
            ExperimentName::Validate => "validate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Analytic,
    Montecarlo,
    Both,
}

impl Method {
    fn analytic(self) -> bool {
        matches!(self, Method::Analytic | Method::Both)
    }

    fn montecarlo(self) -> bool {
        matches!(self, Method::Montecarlo | Method::Both)
    }
}

/// Treatment of simulated topologies whose measured cluster has no BS.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EmptyPolicy {
    /// Redraw the topology.
    #[default]
    Redraw,
    /// Keep it with zero rate.
    Zero,
}

impl From<EmptyPolicy> for EmptyCenter {
    fn from(p: EmptyPolicy) -> Self {
        match p {
            EmptyPolicy::Redraw => EmptyCenter::Redraw,
            EmptyPolicy::Zero => EmptyCenter::CountZero,
        }
    }
}

/// Every input that determines an experiment's output files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRequest {
    pub experiment: ExperimentName,
    pub method: Method,
    pub seed: u64,
    pub topologies: usize,
    pub fading: usize,
    pub quad_tol: f64,
    pub empty_center: EmptyPolicy,
    /// Overrides the experiment's default loading-factor axis.
    pub eta: Option<Vec<f64>>,
    /// Overrides the experiment's default cluster-size axis.
    pub cluster_sizes: Option<Vec<f64>>,
    pub config: SystemConfig,
}

impl RunRequest {
    pub fn new(experiment: ExperimentName) -> Self {
        Self {
            experiment,
            method: Method::Both,
            seed: 1,
            topologies: 200,
            fading: 20,
            quad_tol: 1e-4,
            empty_center: EmptyPolicy::default(),
            eta: None,
            cluster_sizes: None,
            config: SystemConfig::default(),
        }
    }

    fn quadrature(&self) -> QuadratureSpec {
        QuadratureSpec::default().with_tolerance(self.quad_tol)
    }

    fn plan(&self, eta: f64, avg_cluster_size: f64) -> SimPlan {
        SimPlan {
            n_topologies: self.topologies,
            n_fading: self.fading,
            seed: self.seed,
            empty_center: self.empty_center.into(),
            ..SimPlan::new(eta, avg_cluster_size)
        }
    }
}

/// Resolved sweep axes of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub name: ExperimentName,
    pub method: Method,
    pub eta: Vec<f64>,
    pub cluster_sizes: Vec<f64>,
}

fn integers(lo: u32, hi: u32) -> Vec<f64> {
    (lo..=hi).map(f64::from).collect()
}

impl ExperimentSpec {
    /// Default axes for the experiment, replaced by any overrides in `req`,
    /// then range-checked.
    pub fn resolve(req: &RunRequest) -> Result<Self> {
        use ExperimentName::*;
        let (eta, sizes) = match req.experiment {
            Fig2EtaClusterSweep => (vec![0.2, 0.4, 0.6, 0.8, 1.0], integers(1, 10)),
            Fig3EtaSweep => (eta_grid(0.05, 1.0, 0.05)?, vec![4.0, 6.0]),
            FigSchedulingRzf => (eta_grid(0.1, 1.0, 0.1)?, vec![4.0]),
            Fig4ClusterScaling => (vec![0.6], integers(1, 10)),
            Fig5IsolatedComparison => (
                vec![0.6],
                vec![1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0, 500.0, 1000.0, 2000.0],
            ),
            CdfUserRates => (vec![0.6], vec![4.0, 16.0]),
            Validate => (Vec::new(), Vec::new()),
        };
        let spec = Self {
            name: req.experiment,
            method: req.method,
            eta: req.eta.clone().unwrap_or(eta),
            cluster_sizes: req.cluster_sizes.clone().unwrap_or(sizes),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.name == ExperimentName::Validate {
            return Ok(());
        }
        if self.eta.is_empty() || self.cluster_sizes.is_empty() {
            return Err(CliError::Usage("sweep axes must not be empty".into()));
        }
        if let Some(e) = self.eta.iter().find(|&&e| !(e > 0.0 && e <= 1.0)) {
            return Err(CliError::Usage(format!("loading factor {e} outside (0, 1]")));
        }
        if let Some(b) = self.cluster_sizes.iter().find(|&&b| !(b >= 1.0 && b.is_finite())) {
            return Err(CliError::Usage(format!("average cluster size {b} must be at least 1")));
        }
        if self.name == ExperimentName::CdfUserRates && !self.method.montecarlo() {
            return Err(CliError::Usage("cdf-user-rates is simulation only".into()));
        }
        Ok(())
    }
}

/// One row of a curve. Failed points keep their axis value with `NaN`
/// value and an `error: …` status.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub axis: f64,
    pub value: f64,
    pub ci: f64,
    pub method: String,
    pub status: String,
}

impl Point {
    pub fn ok(axis: f64, value: f64, ci: f64, method: &str) -> Self {
        Self {
            axis,
            value,
            ci,
            method: method.to_string(),
            status: "ok".to_string(),
        }
    }

    pub fn failed(axis: f64, method: &str, err: impl Display) -> Self {
        Self {
            axis,
            value: f64::NAN,
            ci: f64::NAN,
            method: method.to_string(),
            status: format!("error: {err}"),
        }
    }

    fn skipped(axis: f64, method: &str, reason: &str) -> Self {
        Self {
            status: format!("skipped: {reason}"),
            ..Self::failed(axis, method, "")
        }
    }

    fn from_rate(axis: f64, r: netmimo::Result<RateResult>, fallback: RateMethod) -> Self {
        match r {
            Ok(r) => Self::ok(axis, r.value, r.ci_halfwidth, r.method.as_str()),
            Err(e) => Self::failed(axis, fallback.as_str(), e),
        }
    }

    fn from_sim(axis: f64, r: &netmimo::Result<SimResult>) -> Self {
        let method = RateMethod::MonteCarlo.as_str();
        match r {
            Ok(r) => Self::ok(axis, r.per_bs_rate, r.ci95, method),
            Err(e) => Self::failed(axis, method, e),
        }
    }

    pub fn is_error(&self) -> bool {
        self.status.starts_with("error")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub name: String,
    /// What the `axis` column holds.
    pub axis: &'static str,
    pub points: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub spec: ExperimentSpec,
    pub curves: Vec<Curve>,
    /// Derived scalars (optima, ratios, medians); only finite values.
    pub summary: BTreeMap<String, f64>,
    /// For `validate`: whether every check passed.
    pub passed: Option<bool>,
}

impl ExperimentOutput {
    pub fn error_count(&self) -> usize {
        self.curves.iter().flat_map(|c| &c.points).filter(|p| p.is_error()).count()
    }
}

const ETA: &str = "eta";
const CLUSTER: &str = "avg_cluster_size";

struct Runner<'a> {
    req: &'a RunRequest,
    spec: ExperimentSpec,
    quad: QuadratureSpec,
    curves: Vec<Curve>,
    summary: BTreeMap<String, f64>,
}

impl Runner<'_> {
    fn config(&self) -> &SystemConfig {
        &self.req.config
    }

    fn analytic(&self, eta: f64, b: f64) -> netmimo::Result<RateResult> {
        per_bs_ergodic_sum_rate(&AnalyticParams::from_config(self.config(), eta, b)?, &self.quad)
    }

    fn isolated_cluster(&self, eta: f64, b: f64) -> netmimo::Result<RateResult> {
        per_bs_ergodic_sum_rate(&AnalyticParams::from_config(self.config(), eta, b)?.isolated(), &self.quad)
    }

    fn isolated_cell(&self, eta: f64) -> netmimo::Result<RateResult> {
        isolated_cell_rate(&AnalyticParams::from_config(self.config(), eta, 1.0)?, &self.quad)
    }

    fn simulate(&self, plan: &SimPlan) -> netmimo::Result<SimResult> {
        montecarlo::run(plan, self.config())
    }

    fn push(&mut self, name: String, axis: &'static str, points: Vec<Point>) {
        self.curves.push(Curve { name, axis, points });
    }

    fn note(&mut self, key: String, value: f64) {
        if value.is_finite() {
            self.summary.insert(key, value);
        }
    }

    /// Analytic rate curve over the cluster-size axis.
    fn analytic_over_sizes<F>(&self, eta: f64, f: F) -> Vec<Point>
    where
        F: Fn(&Self, f64, f64) -> netmimo::Result<RateResult>,
    {
        let sizes = self.spec.cluster_sizes.clone();
        sizes
            .into_iter()
            .map(|b| Point::from_rate(b, f(self, eta, b), RateMethod::AnalyticHypergeometric))
            .collect()
    }

    /// Simulated curve over the cluster-size axis with `tweak` applied to each plan.
    fn simulated_over_sizes<F>(&self, eta: f64, tweak: F) -> Vec<Point>
    where
        F: Fn(&mut SimPlan),
    {
        let mc = RateMethod::MonteCarlo.as_str();
        self.spec
            .cluster_sizes
            .iter()
            .map(|&b| {
                if b > MAX_SIMULATED_CLUSTER {
                    return Point::skipped(b, mc, "cluster too large to simulate");
                }
                let mut plan = self.req.plan(eta, b);
                tweak(&mut plan);
                Point::from_sim(b, &self.simulate(&plan))
            })
            .collect()
    }

    fn fig2(&mut self) {
        for eta in self.spec.eta.clone() {
            if self.spec.method.analytic() {
                let pts = self.analytic_over_sizes(eta, Self::analytic);
                self.push(format!("eta-{eta}-analytic"), CLUSTER, pts);
            }
            if self.spec.method.montecarlo() {
                let pts = self.simulated_over_sizes(eta, |_| {});
                self.push(format!("eta-{eta}-montecarlo"), CLUSTER, pts);
            }
        }
    }

    fn fig3(&mut self) {
        let etas = self.spec.eta.clone();
        for b in self.spec.cluster_sizes.clone() {
            if self.spec.method.analytic() {
                let pts: Vec<Point> = etas
                    .iter()
                    .map(|&e| Point::from_rate(e, self.analytic(e, b), RateMethod::AnalyticHypergeometric))
                    .collect();
                let name = format!("cluster-{b}-analytic");
                self.note(format!("{name}.best_eta"), argmax(&pts));
                self.push(name, ETA, pts);
            }
            if self.spec.method.montecarlo() {
                let pts: Vec<Point> = etas
                    .iter()
                    .map(|&e| Point::from_sim(e, &self.simulate(&self.req.plan(e, b))))
                    .collect();
                let name = format!("cluster-{b}-montecarlo");
                self.note(format!("{name}.best_eta"), argmax(&pts));
                self.push(name, ETA, pts);
            }
        }
    }

    fn scheduling(&mut self) {
        let etas = self.spec.eta.clone();
        for b in self.spec.cluster_sizes.clone() {
            if self.spec.method.analytic() {
                let pts = etas
                    .iter()
                    .map(|&e| Point::from_rate(e, self.analytic(e, b), RateMethod::AnalyticHypergeometric))
                    .collect();
                self.push(format!("cluster-{b}-zf-analytic"), ETA, pts);
            }
            if self.spec.method.montecarlo() {
                for (label, bf) in [("zf", Beamformer::Zf), ("rzf", Beamformer::Rzf)] {
                    let pts = etas
                        .iter()
                        .map(|&e| {
                            let plan = SimPlan {
                                beamformer: bf,
                                ..self.req.plan(e, b)
                            };
                            Point::from_sim(e, &self.simulate(&plan))
                        })
                        .collect();
                    self.push(format!("cluster-{b}-{label}-montecarlo"), ETA, pts);
                }
            }
        }
    }

    /// Single-cell processing over a window of the largest swept cluster size,
    /// repeated at every axis point as a baseline.
    fn single_cell_baseline(&self, eta: f64) -> (Vec<Point>, f64) {
        let window = self.spec.cluster_sizes.iter().cloned().fold(1.0, f64::max);
        let plan = SimPlan {
            scenario: Scenario::SingleCellProcessing,
            ..self.req.plan(eta, window)
        };
        let res = self.simulate(&plan);
        let pts = self.spec.cluster_sizes.iter().map(|&b| Point::from_sim(b, &res)).collect();
        (pts, res.map(|r| r.per_bs_rate).unwrap_or(f64::NAN))
    }

    fn fig4(&mut self) {
        for eta in self.spec.eta.clone() {
            if self.spec.method.analytic() {
                let pts = self.analytic_over_sizes(eta, Self::analytic);
                self.push(format!("eta-{eta}-analytic"), CLUSTER, pts);
            }
            if !self.spec.method.montecarlo() {
                continue;
            }
            let variants: [(&str, BsCountModel, Association); 3] = [
                ("poisson-location", BsCountModel::Poisson, Association::LocationBased),
                ("fixed-location", BsCountModel::FixedPerCluster, Association::LocationBased),
                ("poisson-channel", BsCountModel::Poisson, Association::ChannelBased),
            ];
            let mut clustered = Vec::new();
            for (label, model, assoc) in variants {
                let pts = self.simulated_over_sizes(eta, |p| {
                    p.bs_count_model = model;
                    p.association = assoc;
                });
                if clustered.is_empty() {
                    clustered = pts.clone();
                }
                self.push(format!("eta-{eta}-{label}-montecarlo"), CLUSTER, pts);
            }
            let (pts, baseline) = self.single_cell_baseline(eta);
            self.push(format!("eta-{eta}-single-cell-montecarlo"), CLUSTER, pts);
            if let Some(last) = clustered.last() {
                self.note(format!("eta-{eta}.gain_over_single_cell"), last.value / baseline);
            }
        }
    }

    fn fig5(&mut self) {
        for eta in self.spec.eta.clone() {
            if self.spec.method.analytic() {
                let clustered = self.analytic_over_sizes(eta, Self::analytic);
                let isolated = self.analytic_over_sizes(eta, Self::isolated_cluster);
                let cell = self.isolated_cell(eta);
                let cell_value = cell.as_ref().map(|r| r.value).unwrap_or(f64::NAN);
                let cell_pts = self
                    .spec
                    .cluster_sizes
                    .iter()
                    .map(|&b| Point::from_rate(b, cell.clone(), RateMethod::AnalyticQuadrature))
                    .collect();
                if let Some(last) = clustered.last() {
                    self.note(format!("eta-{eta}.clustered_over_isolated_cell"), last.value / cell_value);
                }
                self.push(format!("eta-{eta}-clustered-analytic"), CLUSTER, clustered);
                self.push(format!("eta-{eta}-isolated-cluster-analytic"), CLUSTER, isolated);
                self.push(format!("eta-{eta}-isolated-cell-analytic"), CLUSTER, cell_pts);
            }
            if self.spec.method.montecarlo() {
                let clustered = self.simulated_over_sizes(eta, |_| {});
                let isolated = self.simulated_over_sizes(eta, |p| p.scenario = Scenario::IsolatedCluster);
                let cell_plan = SimPlan {
                    scenario: Scenario::IsolatedCell,
                    ..self.req.plan(eta, 1.0)
                };
                let cell = self.simulate(&cell_plan);
                let cell_pts = self.spec.cluster_sizes.iter().map(|&b| Point::from_sim(b, &cell)).collect();
                self.push(format!("eta-{eta}-clustered-montecarlo"), CLUSTER, clustered);
                self.push(format!("eta-{eta}-isolated-cluster-montecarlo"), CLUSTER, isolated);
                self.push(format!("eta-{eta}-isolated-cell-montecarlo"), CLUSTER, cell_pts);
            }
        }
    }

    fn cdf_curve(&mut self, name: String, plan: &SimPlan) {
        let mc = RateMethod::MonteCarlo.as_str();
        let pts = match montecarlo::user_rate_cdf(plan, self.config()) {
            Ok(cdf) if cdf.is_empty() => vec![Point::failed(f64::NAN, mc, "no users were associated")],
            Ok(cdf) => {
                let rates: Vec<f64> = cdf.iter().map(|p| p.0).collect();
                self.note(format!("{name}.median"), median(&rates));
                cdf.into_iter().map(|(r, f)| Point::ok(r, f, 0.0, mc)).collect()
            }
            Err(e) => vec![Point::failed(f64::NAN, mc, e)],
        };
        self.push(name, "user_rate", pts);
    }

    fn cdf(&mut self) {
        let window = self.spec.cluster_sizes.iter().cloned().fold(1.0, f64::max);
        for eta in self.spec.eta.clone() {
            let single = SimPlan {
                scenario: Scenario::SingleCellProcessing,
                ..self.req.plan(eta, window)
            };
            self.cdf_curve(format!("eta-{eta}-single-cell-cdf"), &single);
            for b in self.spec.cluster_sizes.clone() {
                let plan = self.req.plan(eta, b);
                self.cdf_curve(format!("eta-{eta}-cluster-{b}-cdf"), &plan);
            }
        }
    }

    fn validate(&mut self) -> bool {
        let settings = ValidationSettings {
            seed: self.req.seed,
            topologies: self.req.topologies,
            fading: self.req.fading,
            quad: self.quad,
        };
        let checks = validation::run_all(self.config(), &settings);
        let pts = checks
            .iter()
            .map(|c| Point {
                axis: f64::from(c.criterion),
                value: c.metric,
                ci: 0.0,
                method: c.name.to_string(),
                status: format!("{}: {}", if c.passed { "pass" } else { "fail" }, c.detail),
            })
            .collect();
        self.push("validate".into(), "criterion", pts);
        checks.iter().all(|c| c.passed)
    }
}

/// Axis value of the largest successful point.
fn argmax(points: &[Point]) -> f64 {
    points
        .iter()
        .filter(|p| !p.value.is_nan())
        .fold((f64::NAN, f64::NEG_INFINITY), |best, p| {
            if p.value > best.1 {
                (p.axis, p.value)
            } else {
                best
            }
        })
        .0
}

/// Evaluate every curve of the requested experiment. Individual point
/// failures are recorded in the curves; only invalid requests fail outright.
pub fn run_experiment(req: &RunRequest) -> Result<ExperimentOutput> {
    req.config.validate()?;
    if req.topologies == 0 || req.fading == 0 {
        return Err(CliError::Usage("topology and fading counts must be at least 1".into()));
    }
    if !(req.quad_tol > 0.0 && req.quad_tol < 1.0) {
        return Err(CliError::Usage(format!("quadrature tolerance {} outside (0, 1)", req.quad_tol)));
    }
    let spec = ExperimentSpec::resolve(req)?;
    let mut runner = Runner {
        req,
        spec: spec.clone(),
        quad: req.quadrature(),
        curves: Vec::new(),
        summary: BTreeMap::new(),
    };
    let mut passed = None;
    match spec.name {
        ExperimentName::Fig2EtaClusterSweep => runner.fig2(),
        ExperimentName::Fig3EtaSweep => runner.fig3(),
        ExperimentName::FigSchedulingRzf => runner.scheduling(),
        ExperimentName::Fig4ClusterScaling => runner.fig4(),
        ExperimentName::Fig5IsolatedComparison => runner.fig5(),
        ExperimentName::CdfUserRates => runner.cdf(),
        ExperimentName::Validate => passed = Some(runner.validate()),
    }
    Ok(ExperimentOutput {
        spec,
        curves: runner.curves,
        summary: runner.summary,
        passed,
    })
}

/// Run `f` on a dedicated pool of `workers` threads (`None`: the global pool).
pub fn run_with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(0) => Err(CliError::Usage("need at least one worker".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| CliError::Pool(e.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_axes_are_valid() {
        for name in ExperimentName::value_variants() {
            let spec = ExperimentSpec::resolve(&RunRequest::new(*name)).unwrap();
            assert_eq!(spec.name, *name);
        }
    }

    #[test]
    fn out_of_range_axes_are_rejected() {
        let mut req = RunRequest::new(ExperimentName::Fig3EtaSweep);
        req.eta = Some(vec![0.5, 1.2]);
        assert!(matches!(ExperimentSpec::resolve(&req), Err(CliError::Usage(_))));
        req.eta = None;
        req.cluster_sizes = Some(vec![0.5]);
        assert!(matches!(ExperimentSpec::resolve(&req), Err(CliError::Usage(_))));
        let mut cdf = RunRequest::new(ExperimentName::CdfUserRates);
        cdf.method = Method::Analytic;
        assert!(ExperimentSpec::resolve(&cdf).is_err());
    }

    #[test]
    fn names_match_clap_values() {
        for name in ExperimentName::value_variants() {
            assert_eq!(name.to_possible_value().unwrap().get_name(), name.as_str());
        }
    }
}
