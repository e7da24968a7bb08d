//! Parameter sweeps, the headline results table, and the validation suite.
//!
//! Sweeps pair every closed-form curve with its Monte Carlo counterpart and
//! emit plot-ready CSV/JSON. `validate` runs the acceptance checks and
//! reports pass/fail per criterion; its output carries no timestamps so a
//! re-run with the same seed is byte-identical.

use serde::{Deserialize, Serialize};

use crate::analytic::{
    aud_from_moments, aud_mg1d_closed, aud_mg1d_general, aud_mg1m, aud_mg1m_closed,
    conditional_system_time, find_m0_star, pmis_mg1d, pmis_mg1m, SystemSpec,
};
use crate::distributions::{ArrivalLaw, DecisionLaw, ServiceLaw};
use crate::error::AudError;
use crate::simulator::{self, SimConfig};

pub const NOMINAL_LAMBDA: f64 = 0.75;
pub const NOMINAL_MU: f64 = 1.5;
pub const NOMINAL_NU: f64 = 15.0;

const SERVICE_LAWS: [fn(f64) -> ServiceLaw; 3] = [
    |mu| ServiceLaw::Exponential { mu },
    |mu| ServiceLaw::UniformMeanMatched { mu },
    |mu| ServiceLaw::Deterministic { mu },
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    Lambda,
    Mu,
    /// periodic-grid ratio; sets nu = m0 * mu
    M0,
    Nu,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Aud,
    Pmis,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimators {
    Analytic,
    Simulation,
    Both,
}

impl Estimators {
    fn wants_analytic(self) -> bool {
        matches!(self, Estimators::Analytic | Estimators::Both)
    }
    fn wants_sim(self) -> bool {
        matches!(self, Estimators::Simulation | Estimators::Both)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub grid: Vec<f64>,
    /// one template per curve; the swept parameter overrides the
    /// corresponding rate in each
    pub templates: Vec<SystemSpec>,
    pub metric: Metric,
    pub sim: SimConfig,
    pub estimators: Estimators,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub parameter: f64,
    pub variant: String,
    pub analytic: Option<f64>,
    pub sim_mean: Option<f64>,
    pub sim_ci_low: Option<f64>,
    pub sim_ci_high: Option<f64>,
    pub abs_gap: Option<f64>,
    pub rel_gap: Option<f64>,
    /// reason this grid point was skipped (e.g. unstable), if it was
    pub skipped: Option<String>,
}

fn apply_parameter(template: &SystemSpec, parameter: SweepParameter, value: f64) -> SystemSpec {
    let mut spec = *template;
    match parameter {
        SweepParameter::Lambda => {
            spec.arrival = match spec.arrival {
                ArrivalLaw::Poisson { .. } => ArrivalLaw::Poisson { lambda: value },
                ArrivalLaw::UniformMeanMatched { .. } => {
                    ArrivalLaw::UniformMeanMatched { lambda: value }
                }
                ArrivalLaw::Periodic { .. } => ArrivalLaw::Periodic { lambda: value },
            };
        }
        SweepParameter::Mu => {
            spec.service = match spec.service {
                ServiceLaw::Exponential { .. } => ServiceLaw::Exponential { mu: value },
                ServiceLaw::UniformMeanMatched { .. } => {
                    ServiceLaw::UniformMeanMatched { mu: value }
                }
                ServiceLaw::Deterministic { .. } => ServiceLaw::Deterministic { mu: value },
            };
        }
        SweepParameter::Nu | SweepParameter::M0 => {
            let nu = match parameter {
                SweepParameter::M0 => value * spec.mu(),
                _ => value,
            };
            spec.decision = match spec.decision {
                DecisionLaw::Poisson { .. } => DecisionLaw::Poisson { nu },
                DecisionLaw::Periodic { .. } => DecisionLaw::Periodic { nu },
            };
        }
    }
    spec
}

/// Closed-form value of `metric` for `spec`, or `None` where no formula
/// applies (non-Poisson arrivals, non-integer periodic ratio).
pub fn analytic_value(spec: &SystemSpec, metric: Metric) -> Option<f64> {
    let r = match (metric, &spec.decision) {
        (Metric::Aud, DecisionLaw::Poisson { .. }) => aud_mg1m_closed(spec),
        (Metric::Aud, DecisionLaw::Periodic { .. }) => aud_mg1d_closed(spec),
        (Metric::Pmis, DecisionLaw::Poisson { .. }) => pmis_mg1m(spec),
        (Metric::Pmis, DecisionLaw::Periodic { .. }) => pmis_mg1d(spec),
    };
    r.ok()
}

/// Run a sweep. One row per grid point per template, grid-major order;
/// unstable points become skipped rows rather than being dropped.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>, AudError> {
    if spec.grid.is_empty() {
        return Err(AudError::Config("sweep grid is empty".into()));
    }
    if spec.grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(AudError::Config("sweep grid must be strictly increasing".into()));
    }
    if spec.templates.is_empty() {
        return Err(AudError::Config("sweep needs at least one template".into()));
    }
    let mut rows = Vec::with_capacity(spec.grid.len() * spec.templates.len());
    for &value in &spec.grid {
        for template in &spec.templates {
            let point = apply_parameter(template, spec.parameter, value);
            let variant = point.kendall();
            if let Err(e) = point.validate() {
                rows.push(SweepRow {
                    parameter: value,
                    variant,
                    analytic: None,
                    sim_mean: None,
                    sim_ci_low: None,
                    sim_ci_high: None,
                    abs_gap: None,
                    rel_gap: None,
                    skipped: Some(e.to_string()),
                });
                continue;
            }
            let analytic =
                if spec.estimators.wants_analytic() { analytic_value(&point, spec.metric) } else { None };
            let (sim_mean, ci_low, ci_high) = if spec.estimators.wants_sim() {
                let est = simulator::estimate(&point, &spec.sim)?;
                match spec.metric {
                    Metric::Aud => {
                        (Some(est.mean_aud), Some(est.aud_ci95_low), Some(est.aud_ci95_high))
                    }
                    Metric::Pmis => (Some(est.p_mis_hat), None, None),
                }
            } else {
                (None, None, None)
            };
            let abs_gap = match (analytic, sim_mean) {
                (Some(a), Some(s)) => Some((s - a).abs()),
                _ => None,
            };
            let rel_gap = match (analytic, abs_gap) {
                (Some(a), Some(g)) if a != 0.0 => Some(g / a.abs()),
                _ => None,
            };
            rows.push(SweepRow {
                parameter: value,
                variant,
                analytic,
                sim_mean,
                sim_ci_low: ci_low,
                sim_ci_high: ci_high,
                abs_gap,
                rel_gap,
                skipped: None,
            });
        }
    }
    Ok(rows)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| format!("{x}"))
}

pub fn rows_to_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from(
        "parameter,variant,analytic,sim_mean,sim_ci_low,sim_ci_high,abs_gap,rel_gap,skipped\n",
    );
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.parameter,
            r.variant,
            fmt_opt(r.analytic),
            fmt_opt(r.sim_mean),
            fmt_opt(r.sim_ci_low),
            fmt_opt(r.sim_ci_high),
            fmt_opt(r.abs_gap),
            fmt_opt(r.rel_gap),
            r.skipped.as_deref().unwrap_or("")
        ));
    }
    s
}

pub fn rows_to_json(rows: &[SweepRow]) -> Result<String, AudError> {
    Ok(serde_json::to_string_pretty(rows)?)
}

fn float_grid(start: f64, step: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| start + step * i as f64).collect()
}

fn service_templates(
    lambda: f64,
    mu: f64,
    decision: DecisionLaw,
) -> Vec<SystemSpec> {
    SERVICE_LAWS
        .iter()
        .map(|mk| SystemSpec {
            arrival: ArrivalLaw::Poisson { lambda },
            service: mk(mu),
            decision,
        })
        .collect()
}

/// Figure presets. Grid densities are ours; the fixed rates are the ones
/// the source figures state.
pub fn preset(name: &str) -> Result<SweepSpec, AudError> {
    let sim = SimConfig::default();
    let spec = match name {
        // AuD vs arrival rate, Poisson decisions
        "fig3a" => SweepSpec {
            parameter: SweepParameter::Lambda,
            grid: float_grid(0.1, 0.05, 27),
            templates: service_templates(0.75, 1.5, DecisionLaw::Poisson { nu: NOMINAL_NU }),
            metric: Metric::Aud,
            sim,
            estimators: Estimators::Analytic,
        },
        // AuD vs service rate at lambda = 0.5; the low end of the grid is
        // deliberately unstable to exercise skipped rows
        "fig3b" => SweepSpec {
            parameter: SweepParameter::Mu,
            grid: float_grid(0.4, 0.2, 29),
            templates: service_templates(0.5, 1.5, DecisionLaw::Poisson { nu: NOMINAL_NU }),
            metric: Metric::Aud,
            sim,
            estimators: Estimators::Analytic,
        },
        // missing probability vs Poisson decision rate
        "fig4" => SweepSpec {
            parameter: SweepParameter::Nu,
            grid: float_grid(1.0, 1.0, 30),
            templates: service_templates(0.75, 1.5, DecisionLaw::Poisson { nu: NOMINAL_NU }),
            metric: Metric::Pmis,
            sim,
            estimators: Estimators::Analytic,
        },
        // AuD vs arrival rate, periodic decisions at m0 = 20
        "fig5a" => SweepSpec {
            parameter: SweepParameter::Lambda,
            grid: float_grid(0.1, 0.05, 27),
            templates: service_templates(0.75, 1.5, DecisionLaw::Periodic { nu: 20.0 * 1.5 }),
            metric: Metric::Aud,
            sim,
            estimators: Estimators::Analytic,
        },
        // AuD vs service rate with the periodic decision rate fixed at 30;
        // grid points are mu = 30/m0 so the ratio stays integral
        "fig5b" => SweepSpec {
            parameter: SweepParameter::Mu,
            grid: (2..=40).rev().map(|m0| 30.0 / m0 as f64).collect(),
            templates: service_templates(0.5, 1.5, DecisionLaw::Periodic { nu: 30.0 }),
            metric: Metric::Aud,
            sim,
            estimators: Estimators::Analytic,
        },
        // AuD vs m0: periodic curves fall onto the flat Poisson levels
        "fig6" => SweepSpec {
            parameter: SweepParameter::M0,
            grid: float_grid(1.0, 1.0, 50),
            templates: {
                let mut t = service_templates(0.75, 1.5, DecisionLaw::Periodic { nu: NOMINAL_NU });
                t.extend(service_templates(0.75, 1.5, DecisionLaw::Poisson { nu: NOMINAL_NU }));
                t
            },
            metric: Metric::Aud,
            sim,
            estimators: Estimators::Analytic,
        },
        // missing probability vs m0, periodic decisions
        "fig7" => SweepSpec {
            parameter: SweepParameter::M0,
            grid: float_grid(1.0, 1.0, 50),
            templates: {
                let mut t = service_templates(0.75, 1.5, DecisionLaw::Periodic { nu: NOMINAL_NU });
                t.extend(service_templates(0.75, 1.5, DecisionLaw::Poisson { nu: NOMINAL_NU }));
                t
            },
            metric: Metric::Pmis,
            sim,
            estimators: Estimators::Analytic,
        },
        other => return Err(AudError::Config(format!("unknown preset {other:?}"))),
    };
    Ok(spec)
}

pub const PRESET_NAMES: [&str; 7] =
    ["fig3a", "fig3b", "fig4", "fig5a", "fig5b", "fig6", "fig7"];

/// One cell of the headline results table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1Cell {
    pub row: String,
    pub column: String,
    pub kendall: String,
    pub analytic: Option<f64>,
    pub sim_mean: f64,
    pub sim_ci_low: f64,
    pub sim_ci_high: f64,
}

/// The 4x3 results matrix at lambda = 0.75, mu = 1.5, nu = 15.
///
/// First two rows: Poisson arrivals, each service law, Poisson then
/// periodic decisions (analytic + simulated). Last two rows: exponential
/// service with each arrival law (simulation only — the closed forms
/// require Poisson arrivals).
pub fn table1(sim: &SimConfig) -> Result<Vec<Table1Cell>, AudError> {
    let (lambda, mu, nu) = (NOMINAL_LAMBDA, NOMINAL_MU, NOMINAL_NU);
    let decisions =
        [DecisionLaw::Poisson { nu }, DecisionLaw::Periodic { nu }];
    let mut cells = Vec::with_capacity(12);
    for decision in decisions {
        for mk in SERVICE_LAWS {
            let spec = SystemSpec {
                arrival: ArrivalLaw::Poisson { lambda },
                service: mk(mu),
                decision,
            };
            let est = simulator::estimate(&spec, sim)?;
            cells.push(Table1Cell {
                row: format!("poisson-arrivals/{}-decisions", decision.name()),
                column: spec.service.name().to_string(),
                kendall: spec.kendall(),
                analytic: analytic_value(&spec, Metric::Aud),
                sim_mean: est.mean_aud,
                sim_ci_low: est.aud_ci95_low,
                sim_ci_high: est.aud_ci95_high,
            });
        }
    }
    let arrivals = [
        ArrivalLaw::Poisson { lambda },
        ArrivalLaw::UniformMeanMatched { lambda },
        ArrivalLaw::Periodic { lambda },
    ];
    for decision in decisions {
        for arrival in arrivals {
            let spec =
                SystemSpec { arrival, service: ServiceLaw::Exponential { mu }, decision };
            let est = simulator::estimate(&spec, sim)?;
            cells.push(Table1Cell {
                row: format!("exp-service/{}-decisions", decision.name()),
                column: spec.arrival.name().to_string(),
                kendall: spec.kendall(),
                analytic: analytic_value(&spec, Metric::Aud),
                sim_mean: est.mean_aud,
                sim_ci_low: est.aud_ci95_low,
                sim_ci_high: est.aud_ci95_high,
            });
        }
    }
    Ok(cells)
}

pub fn table1_csv(cells: &[Table1Cell]) -> String {
    let mut s =
        String::from("row,column,kendall,analytic,sim_mean,sim_ci_low,sim_ci_high\n");
    for c in cells {
        s.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            c.row,
            c.column,
            c.kendall,
            fmt_opt(c.analytic),
            c.sim_mean,
            c.sim_ci_low,
            c.sim_ci_high
        ));
    }
    s
}

// ---------------------------------------------------------------------------
// validation suite
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub details: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub seed: u64,
    pub passed: bool,
    pub criteria: Vec<CriterionResult>,
}

struct Checks {
    details: Vec<String>,
    passed: bool,
}

impl Checks {
    fn new() -> Self {
        Checks { details: Vec::new(), passed: true }
    }
    fn check(&mut self, ok: bool, msg: String) {
        self.details.push(format!("{} {msg}", if ok { "ok:" } else { "FAIL:" }));
        if !ok {
            self.passed = false;
        }
    }
}

fn criterion(
    id: u32,
    name: &str,
    body: impl FnOnce(&mut Checks) -> Result<(), AudError>,
) -> CriterionResult {
    let mut c = Checks::new();
    if let Err(e) = body(&mut c) {
        c.check(false, format!("aborted: {e}"));
    }
    CriterionResult { id, name: name.to_string(), passed: c.passed, details: c.details }
}

fn nominal(service: ServiceLaw, decision: DecisionLaw) -> Result<SystemSpec, AudError> {
    SystemSpec::poisson_arrivals(NOMINAL_LAMBDA, service, decision)
}

fn sim_config(seed: u64, n_updates: u64, replications: u64) -> SimConfig {
    SimConfig { n_updates, warmup_fraction: 0.1, seed, replications, random_phase: false }
}

const EXP: fn(f64) -> ServiceLaw = |mu| ServiceLaw::Exponential { mu };
const UNI: fn(f64) -> ServiceLaw = |mu| ServiceLaw::UniformMeanMatched { mu };
const DET: fn(f64) -> ServiceLaw = |mu| ServiceLaw::Deterministic { mu };

/// Criterion 1: headline analytic cells match their printed 4-decimal
/// values exactly.
pub fn criterion_1() -> CriterionResult {
    criterion(1, "headline analytic cells to 4 decimals", |c| {
        let cases: [(ServiceLaw, DecisionLaw, &str); 4] = [
            (EXP(1.5), DecisionLaw::Poisson { nu: 15.0 }, "2.3333"),
            (UNI(1.5), DecisionLaw::Poisson { nu: 15.0 }, "2.1658"),
            (EXP(1.5), DecisionLaw::Periodic { nu: 15.0 }, "2.3337"),
            (DET(1.5), DecisionLaw::Periodic { nu: 15.0 }, "2.0993"),
        ];
        for (service, decision, expect) in cases {
            let spec = nominal(service, decision)?;
            let got = format!("{:.4}", analytic_value(&spec, Metric::Aud).unwrap_or(f64::NAN));
            c.check(got == expect, format!("{} analytic {got}, expected {expect}", spec.kendall()));
        }
        Ok(())
    })
}

/// Criterion 2: the deterministic-service/Poisson-decision cell is 2.0991,
/// and simulation arbitrates it against the 2.0091 misprint.
pub fn criterion_2(seed: u64) -> CriterionResult {
    criterion(2, "M/D/1/M value arbitration", |c| {
        let spec = nominal(DET(1.5), DecisionLaw::Poisson { nu: 15.0 })?;
        let got = format!("{:.4}", aud_mg1m_closed(&spec)?);
        c.check(got == "2.0991", format!("analytic {got}, expected 2.0991"));
        let est = simulator::estimate(&spec, &sim_config(seed, 200_000, 20))?;
        let contains = |v: f64| est.aud_ci95_low <= v && v <= est.aud_ci95_high;
        c.check(
            contains(2.0991),
            format!("CI [{:.4}, {:.4}] contains 2.0991", est.aud_ci95_low, est.aud_ci95_high),
        );
        c.check(
            !contains(2.0091),
            format!("CI [{:.4}, {:.4}] excludes 2.0091", est.aud_ci95_low, est.aud_ci95_high),
        );
        Ok(())
    })
}

fn rho_grid() -> Vec<f64> {
    (1..=19).map(|i| i as f64 * 0.05).collect()
}

/// Criterion 3: the moment-based assemblies agree with the specialized
/// closed forms to 1e-9 relative.
pub fn criterion_3() -> CriterionResult {
    criterion(3, "dual-path identities", |c| {
        let mut worst_m = 0.0f64;
        for mk in SERVICE_LAWS {
            for rho in rho_grid() {
                let spec = SystemSpec::poisson_arrivals(
                    rho * 1.5,
                    mk(1.5),
                    DecisionLaw::Poisson { nu: 15.0 },
                )?;
                let a = aud_mg1m(&spec)?.avg_aud;
                let b = aud_mg1m_closed(&spec)?;
                worst_m = worst_m.max((a - b).abs() / b);
            }
        }
        c.check(worst_m <= 1e-9, format!("Poisson decisions worst rel dev {worst_m:.3e}"));
        let mut worst_d = 0.0f64;
        for mk in [EXP, DET] {
            for rho in rho_grid() {
                for m0 in 1..=50u64 {
                    let spec = SystemSpec::poisson_arrivals(
                        rho * 1.5,
                        mk(1.5),
                        DecisionLaw::Periodic { nu: m0 as f64 * 1.5 },
                    )?;
                    let a = aud_mg1d_general(&spec)?.avg_aud;
                    let b = aud_mg1d_closed(&spec)?;
                    worst_d = worst_d.max((a - b).abs() / b);
                }
            }
        }
        c.check(worst_d <= 1e-9, format!("periodic decisions worst rel dev {worst_d:.3e}"));
        Ok(())
    })
}

/// Criterion 4: simulated AuD within 1% of the closed form for every
/// service law at three load points.
pub fn criterion_4(seed: u64) -> CriterionResult {
    criterion(4, "simulation vs closed form, Poisson decisions", |c| {
        for (lambda, mu) in [(0.75, 1.5), (0.5, 1.5), (0.3, 1.0)] {
            for mk in SERVICE_LAWS {
                let spec = SystemSpec::poisson_arrivals(
                    lambda,
                    mk(mu),
                    DecisionLaw::Poisson { nu: 15.0 },
                )?;
                let analytic = aud_mg1m_closed(&spec)?;
                let est = simulator::estimate(&spec, &sim_config(seed, 200_000, 5))?;
                let dev = (est.mean_aud - analytic).abs() / analytic;
                c.check(
                    dev < 0.01,
                    format!(
                        "{} lambda={lambda} mu={mu}: sim {:.4} vs {:.4} (dev {:.2}%)",
                        spec.kendall(),
                        est.mean_aud,
                        analytic,
                        100.0 * dev
                    ),
                );
            }
        }
        Ok(())
    })
}

/// Criterion 5: missing-probability formulas against simulation.
pub fn criterion_5(seed: u64) -> CriterionResult {
    criterion(5, "missing probability", |c| {
        for nu in [3.0, 15.0, 50.0] {
            let spec = nominal(EXP(1.5), DecisionLaw::Poisson { nu })?;
            let analytic = pmis_mg1m(&spec)?;
            let sim = simulator::estimate_pmis(&spec, &sim_config(seed, 200_000, 5))?;
            let gap = (analytic - sim).abs();
            c.check(
                gap < 0.005,
                format!("Poisson decisions nu={nu}: |{analytic:.5} - {sim:.5}| = {gap:.5}"),
            );
        }
        for mk in [EXP, UNI] {
            for m0 in [5.0, 10.0, 20.0] {
                let spec = nominal(mk(1.5), DecisionLaw::Periodic { nu: m0 * 1.5 })?;
                let analytic = pmis_mg1d(&spec)?;
                let sim = simulator::estimate_pmis(&spec, &sim_config(seed, 200_000, 5))?;
                let gap = (analytic - sim).abs();
                c.check(
                    gap < 0.01,
                    format!(
                        "{} m0={m0}: |{analytic:.5} - {sim:.5}| = {gap:.5}",
                        spec.kendall()
                    ),
                );
            }
        }
        let spec = nominal(DET(1.5), DecisionLaw::Periodic { nu: 15.0 })?;
        let sim = simulator::estimate_pmis(&spec, &sim_config(seed, 50_000, 2))?;
        c.check(sim == 0.0, format!("M/D/1/D simulated p_mis = {sim} (exactly 0 expected)"));
        Ok(())
    })
}

/// Criterion 6: service-law ordering, periodic-vs-Poisson dominance, and
/// the uniform/exponential crossover.
pub fn criterion_6() -> CriterionResult {
    criterion(6, "orderings and crossover", |c| {
        let mut ordered = true;
        for rho in rho_grid() {
            let mut v = Vec::new();
            for mk in [DET, UNI, EXP] {
                let spec = SystemSpec::poisson_arrivals(
                    rho * 1.5,
                    mk(1.5),
                    DecisionLaw::Poisson { nu: 15.0 },
                )?;
                v.push(aud_mg1m_closed(&spec)?);
            }
            ordered &= v[0] < v[1] && v[1] < v[2];
        }
        c.check(ordered, "Det < Uniform < Exp at every rho grid point".to_string());
        for mk in SERVICE_LAWS {
            let m_spec = nominal(mk(1.5), DecisionLaw::Poisson { nu: 15.0 })?;
            let m_level = aud_mg1m_closed(&m_spec)?;
            let mut dominated = true;
            let mut first_violation = None;
            for m0 in 1..=100u64 {
                let d_spec = nominal(mk(1.5), DecisionLaw::Periodic { nu: m0 as f64 * 1.5 })?;
                if aud_mg1d_closed(&d_spec)? < m_level {
                    dominated = false;
                    first_violation.get_or_insert(m0);
                }
            }
            let far = nominal(mk(1.5), DecisionLaw::Periodic { nu: 1000.0 * 1.5 })?;
            let gap = aud_mg1d_closed(&far)? - m_level;
            c.check(
                dominated && (0.0..5e-3).contains(&gap),
                format!(
                    "{}: periodic >= Poisson over m0 1..100{}, gap at m0=1000 = {gap:.3e}",
                    m_spec.kendall(),
                    first_violation
                        .map_or(String::new(), |m| format!(" (first violation m0={m})"))
                ),
            );
        }
        let m0_star = find_m0_star(0.75, 1.5, 50)?;
        c.check(m0_star == Some(3), format!("crossover m0* = {m0_star:?}, expected Some(3)"));
        if let Some(star) = m0_star {
            let at = |mk: fn(f64) -> ServiceLaw, m0: u64| -> Result<f64, AudError> {
                aud_mg1d_closed(&nominal(mk(1.5), DecisionLaw::Periodic { nu: m0 as f64 * 1.5 })?)
            };
            let before = at(UNI, star - 1)? >= at(EXP, star - 1)?;
            let after = at(UNI, star)? < at(EXP, star)?;
            c.check(
                before && after,
                format!("ordering flips across m0* (before: {before}, after: {after})"),
            );
        }
        Ok(())
    })
}

/// Criterion 7: the uniform-service periodic approximation is within 5% of
/// simulation at m0 = 20 and tightens from m0 = 2 to m0 = 50.
pub fn criterion_7(seed: u64) -> CriterionResult {
    criterion(7, "uniform-service periodic approximation quality", |c| {
        let dev = |m0: f64| -> Result<f64, AudError> {
            let spec = nominal(UNI(1.5), DecisionLaw::Periodic { nu: m0 * 1.5 })?;
            let analytic = aud_mg1d_closed(&spec)?;
            let est = simulator::estimate(&spec, &sim_config(seed, 200_000, 10))?;
            Ok((analytic - est.mean_aud).abs() / est.mean_aud)
        };
        let (d2, d20, d50) = (dev(2.0)?, dev(20.0)?, dev(50.0)?);
        c.check(d20 < 0.05, format!("deviation at m0=20: {:.2}%", 100.0 * d20));
        c.check(
            d50 < d2,
            format!("deviation shrinks: {:.2}% at m0=50 vs {:.2}% at m0=2", 100.0 * d50, 100.0 * d2),
        );
        Ok(())
    })
}

/// Criterion 8: simulator diagnostics match the queueing identities.
pub fn criterion_8(seed: u64) -> CriterionResult {
    criterion(8, "simulator diagnostics", |c| {
        let spec = nominal(EXP(1.5), DecisionLaw::Poisson { nu: 15.0 })?;
        let est = simulator::estimate(&spec, &sim_config(seed, 200_000, 10))?;
        let rho = spec.rho();
        c.check(
            (est.prob_x_le_t - rho).abs() < 0.01,
            format!("Pr{{X <= T}} = {:.4} vs rho = {rho}", est.prob_x_le_t),
        );
        let ey = 1.0 / spec.lambda();
        c.check(
            (est.mean_y - ey).abs() / ey < 0.005,
            format!("E[Y] = {:.4} vs 1/lambda = {ey:.4}", est.mean_y),
        );
        let via_moments = aud_from_moments(est.mean_y, est.mean_y2, est.mean_ty)?;
        c.check(
            est.aud_ci95_low <= via_moments && via_moments <= est.aud_ci95_high,
            format!(
                "moment-form AuD {:.4} inside direct CI [{:.4}, {:.4}]",
                via_moments, est.aud_ci95_low, est.aud_ci95_high
            ),
        );
        let (t_le, t_gt) = conditional_system_time(&spec)?;
        c.check(
            (est.e_t_given_le - t_le).abs() / t_le < 0.02,
            format!("E[T | X <= T] sim {:.4} vs {t_le:.4}", est.e_t_given_le),
        );
        c.check(
            (est.e_t_given_gt - t_gt).abs() / t_gt < 0.02,
            format!("E[T | X > T] sim {:.4} vs {t_gt:.4}", est.e_t_given_gt),
        );
        Ok(())
    })
}

/// Criterion 9: shape-level figure reproduction.
pub fn criterion_9(seed: u64) -> CriterionResult {
    criterion(9, "figure shapes", |c| {
        // arrival-rate sweep: minimum in the middle of the stable range
        let rows = sweep(&preset("fig3a")?)?;
        for mk in SERVICE_LAWS {
            let tag = SystemSpec {
                arrival: ArrivalLaw::Poisson { lambda: 0.75 },
                service: mk(1.5),
                decision: DecisionLaw::Poisson { nu: 15.0 },
            }
            .kendall();
            let curve: Vec<(f64, f64)> = rows
                .iter()
                .filter(|r| r.variant == tag)
                .filter_map(|r| r.analytic.map(|a| (r.parameter, a)))
                .collect();
            let argmin = curve
                .iter()
                .cloned()
                .fold((f64::NAN, f64::INFINITY), |acc, p| if p.1 < acc.1 { p } else { acc })
                .0;
            c.check(
                (0.6..=1.05).contains(&argmin),
                format!("{tag}: AuD argmin over lambda = {argmin} in [0.6, 1.05]"),
            );
        }
        // service-rate sweep: decreasing toward 1/lambda
        let rows = sweep(&preset("fig3b")?)?;
        let skipped = rows.iter().filter(|r| r.skipped.is_some()).count();
        c.check(skipped > 0, format!("unstable grid points reported as skipped ({skipped})"));
        for mk in SERVICE_LAWS {
            let vals: Vec<(f64, f64)> = rows
                .iter()
                .filter(|r| r.variant.contains(&format!("/{}/", mk(1.5).kendall())))
                .filter_map(|r| r.analytic.map(|a| (r.parameter, a)))
                .collect();
            let decreasing = vals.windows(2).all(|w| w[1].1 < w[0].1);
            let (first, last) = (vals[0].1, vals[vals.len() - 1].1);
            c.check(
                decreasing && last - 2.0 < (first - 2.0) / 4.0 && (last - 2.0) / 2.0 < 0.1,
                format!(
                    "{} service: decreasing in mu ({decreasing}), {first:.3} -> {last:.3} toward 2.0",
                    mk(1.5).name()
                ),
            );
        }
        // decision-rate sweep: missing probability decreasing in nu
        let rows = sweep(&preset("fig4")?)?;
        for mk in SERVICE_LAWS {
            let vals: Vec<f64> = rows
                .iter()
                .filter(|r| r.variant.contains(&format!("/{}/", mk(1.5).kendall())))
                .filter_map(|r| r.analytic)
                .collect();
            let decreasing = vals.windows(2).all(|w| w[1] < w[0]);
            c.check(
                decreasing,
                format!("{} service: p_mis decreasing in nu", mk(1.5).name()),
            );
        }
        // periodic curves converge onto the Poisson levels at large m0
        for mk in SERVICE_LAWS {
            let level = aud_mg1m_closed(&nominal(mk(1.5), DecisionLaw::Poisson { nu: 15.0 })?)?;
            let spec = nominal(mk(1.5), DecisionLaw::Periodic { nu: 50.0 * 1.5 })?;
            let est = simulator::estimate(&spec, &sim_config(seed, 200_000, 5))?;
            let dev = (est.mean_aud - level).abs() / level;
            c.check(
                dev < 0.01,
                format!(
                    "{}: simulated AuD at m0=50 is {:.4} vs flat Poisson level {level:.4} ({:.2}%)",
                    spec.kendall(),
                    est.mean_aud,
                    100.0 * dev
                ),
            );
        }
        Ok(())
    })
}

/// Criterion 10: reproducibility of the pipeline under a fixed seed.
pub fn criterion_10(seed: u64) -> CriterionResult {
    criterion(10, "determinism", |c| {
        let spec = nominal(DET(1.5), DecisionLaw::Poisson { nu: 15.0 })?;
        let cfg = sim_config(seed, 100_000, 5);
        let a = serde_json::to_string(&simulator::estimate(&spec, &cfg)?)?;
        let b = serde_json::to_string(&simulator::estimate(&spec, &cfg)?)?;
        c.check(a == b, "repeated simulation serializes byte-identically".to_string());
        let rows_a = rows_to_csv(&sweep(&preset("fig3a")?)?);
        let rows_b = rows_to_csv(&sweep(&preset("fig3a")?)?);
        c.check(rows_a == rows_b, "repeated sweep CSV is byte-identical".to_string());
        Ok(())
    })
}

/// Run the full validation suite. Deterministic in `seed`; the report
/// contains no timestamps, so re-runs are byte-identical.
pub fn validate(seed: u64) -> ValidationReport {
    let criteria = vec![
        criterion_1(),
        criterion_2(seed),
        criterion_3(),
        criterion_4(seed),
        criterion_5(seed),
        criterion_6(),
        criterion_7(seed),
        criterion_8(seed),
        criterion_9(seed),
        criterion_10(seed),
    ];
    let passed = criteria.iter().all(|c| c.passed);
    ValidationReport { seed, passed, criteria }
}

pub fn report_text(report: &ValidationReport) -> String {
    let mut s = String::new();
    for c in &report.criteria {
        s.push_str(&format!(
            "criterion {:>2} [{}] {}\n",
            c.id,
            if c.passed { "PASS" } else { "FAIL" },
            c.name
        ));
        for d in &c.details {
            s.push_str(&format!("    {d}\n"));
        }
    }
    s.push_str(&format!("overall: {}\n", if report.passed { "PASS" } else { "FAIL" }));
    s
}
