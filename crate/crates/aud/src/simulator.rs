//! Discrete-event FCFS single-server simulation with a superimposed
//! decision-epoch stream.
//!
//! A full event calendar is not needed: the waiting-time (Lindley)
//! recursion `W_k = max(0, T_{k-1} - X_k)` drives departures, and decision
//! epochs are merged in a single forward pass. Serves as the independent
//! oracle for every closed form in [`crate::analytic`].

use serde::{Deserialize, Serialize};

use crate::analytic::SystemSpec;
use crate::distributions::{DecisionLaw, RandomStream, GENERATOR_NAME};
use crate::error::AudError;

/// Per-update timeline entry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UpdateRecord {
    pub index: u64,
    /// arrival time t_k
    pub arrival: f64,
    /// inter-arrival time X_k
    pub inter_arrival: f64,
    /// waiting time W_k
    pub waiting: f64,
    /// service time S_k
    pub service: f64,
    /// system time T_k = W_k + S_k
    pub system: f64,
    /// departure time t'_k = t_k + T_k
    pub departure: f64,
    /// inter-departure time Y_k = t'_k - t'_{k-1}
    pub inter_departure: f64,
    /// decision count in (t'_{k-1}, t'_k]
    pub n_decisions: u64,
}

/// Per-decision AuD sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecisionRecord {
    /// decision epoch tau_j
    pub epoch: f64,
    /// age upon decision: epoch minus the arrival time of the most
    /// recently departed update
    pub aud: f64,
    /// index of that update
    pub source_index: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n_updates: u64,
    /// fraction of updates discarded as warmup, in [0, 1)
    pub warmup_fraction: f64,
    pub seed: u64,
    pub replications: u64,
    /// uniformly random initial phase for the periodic decision grid
    /// (sensitivity checks; off by default)
    pub random_phase: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            n_updates: 200_000,
            warmup_fraction: 0.1,
            seed: 1,
            replications: 20,
            random_phase: false,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), AudError> {
        if self.n_updates < 100 {
            return Err(AudError::Config(format!("n_updates = {} < 100", self.n_updates)));
        }
        if !(0.0..1.0).contains(&self.warmup_fraction) {
            return Err(AudError::Config(format!(
                "warmup_fraction = {} outside [0, 1)",
                self.warmup_fraction
            )));
        }
        if self.replications < 1 {
            return Err(AudError::Config("replications must be >= 1".into()));
        }
        Ok(())
    }
}

/// Monte Carlo estimates with replication-based confidence intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimEstimate {
    pub kendall: String,
    pub mean_aud: f64,
    pub aud_stderr: f64,
    pub aud_ci95_low: f64,
    pub aud_ci95_high: f64,
    pub p_mis_hat: f64,
    pub mean_y: f64,
    pub mean_y2: f64,
    pub mean_ty: f64,
    pub prob_x_le_t: f64,
    /// empirical E[T_{k-1} | X_k <= T_{k-1}]
    pub e_t_given_le: f64,
    /// empirical E[T_{k-1} | X_k > T_{k-1}]
    pub e_t_given_gt: f64,
    pub n_decisions: u64,
    pub n_updates_counted: u64,
    pub per_replication_means: Vec<f64>,
    pub seed: u64,
    pub generator: String,
}

/// One replication's accumulated statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
struct RepStats {
    mean_aud: f64,
    n_decisions: u64,
    p_mis: f64,
    mean_y: f64,
    mean_y2: f64,
    mean_ty: f64,
    prob_x_le_t: f64,
    e_t_given_le: f64,
    e_t_given_gt: f64,
    n_updates_counted: u64,
}

/// Lazy decision-epoch stream.
enum DecisionStream {
    Poisson { next: f64, rate: f64, stream: RandomStream },
    Periodic { index: u64, spacing: f64, phase: f64 },
}

impl DecisionStream {
    fn new(law: &DecisionLaw, mut stream: RandomStream, random_phase: bool) -> Self {
        match *law {
            DecisionLaw::Poisson { nu } => {
                let first = stream.sample_exp(nu);
                DecisionStream::Poisson { next: first, rate: nu, stream }
            }
            DecisionLaw::Periodic { nu } => {
                let spacing = 1.0 / nu;
                let phase = if random_phase { stream.next_f64() * spacing } else { 0.0 };
                DecisionStream::Periodic { index: 1, spacing, phase }
            }
        }
    }

    fn peek(&self) -> f64 {
        match self {
            DecisionStream::Poisson { next, .. } => *next,
            // multiply instead of accumulating so the grid carries no
            // floating-point drift
            DecisionStream::Periodic { index, spacing, phase } => phase + *index as f64 * spacing,
        }
    }

    fn advance(&mut self) {
        match self {
            DecisionStream::Poisson { next, rate, stream } => *next += stream.sample_exp(*rate),
            DecisionStream::Periodic { index, .. } => *index += 1,
        }
    }
}

fn stream_base(rep: u64) -> u64 {
    rep * 4
}

/// Run one replication and return its estimates. Deterministic in
/// `(config.seed, rep)`.
pub fn run_replication(spec: &SystemSpec, config: &SimConfig, rep: u64) -> Result<SimEstimate, AudError> {
    let stats = run_replication_stats(spec, config, rep)?;
    Ok(SimEstimate {
        kendall: spec.kendall(),
        mean_aud: stats.mean_aud,
        aud_stderr: 0.0,
        aud_ci95_low: stats.mean_aud,
        aud_ci95_high: stats.mean_aud,
        p_mis_hat: stats.p_mis,
        mean_y: stats.mean_y,
        mean_y2: stats.mean_y2,
        mean_ty: stats.mean_ty,
        prob_x_le_t: stats.prob_x_le_t,
        e_t_given_le: stats.e_t_given_le,
        e_t_given_gt: stats.e_t_given_gt,
        n_decisions: stats.n_decisions,
        n_updates_counted: stats.n_updates_counted,
        per_replication_means: vec![stats.mean_aud],
        seed: config.seed,
        generator: GENERATOR_NAME.to_string(),
    })
}

fn run_replication_stats(spec: &SystemSpec, config: &SimConfig, rep: u64) -> Result<RepStats, AudError> {
    spec.validate()?;
    config.validate()?;
    let base = stream_base(rep);
    let mut arrivals = RandomStream::new(config.seed, base);
    let mut services = RandomStream::new(config.seed, base + 1);
    let decision_stream = RandomStream::new(config.seed, base + 2);
    let mut decisions = DecisionStream::new(&spec.decision, decision_stream, config.random_phase);

    let n = config.n_updates;
    // first retained update (0-based)
    let k0 = (config.warmup_fraction * n as f64).ceil() as u64;

    let mut t_arrival = 0.0f64;
    let mut prev_arrival = 0.0f64;
    let mut prev_departure = 0.0f64;
    let mut prev_system = 0.0f64;

    let mut aud_sum = 0.0f64;
    let mut aud_n = 0u64;
    let mut missed = 0u64;
    let mut pmis_n = 0u64;
    let mut sum_y = 0.0f64;
    let mut sum_y2 = 0.0f64;
    let mut sum_ty = 0.0f64;
    let mut n_le = 0u64;
    let mut sum_t_le = 0.0f64;
    let mut sum_t_gt = 0.0f64;
    let mut diag_n = 0u64;

    for k in 0..n {
        let x = spec.arrival.sample(&mut arrivals);
        t_arrival += x;
        let s = spec.service.sample(&mut services);
        let w = if k == 0 { 0.0 } else { (prev_system - x).max(0.0) };
        let t_sys = w + s;
        let departure = t_arrival + t_sys;

        // decisions falling in (t'_{k-1}, t'_k]; their source update is k-1
        let mut n_dec = 0u64;
        while decisions.peek() <= departure {
            let tau = decisions.peek();
            n_dec += 1;
            if k >= 1 && k - 1 >= k0 {
                aud_sum += tau - prev_arrival;
                aud_n += 1;
            }
            decisions.advance();
        }

        if k >= 1 && k >= k0 {
            // retained-update statistics; the interval of the first
            // retained update opens at the previous (discarded) departure
            pmis_n += 1;
            if n_dec == 0 {
                missed += 1;
            }
            let y = departure - prev_departure;
            sum_y += y;
            sum_y2 += y * y;
            sum_ty += prev_system * y;
            diag_n += 1;
            if x <= prev_system {
                n_le += 1;
                sum_t_le += prev_system;
            } else {
                sum_t_gt += prev_system;
            }
        }

        prev_arrival = t_arrival;
        prev_departure = departure;
        prev_system = t_sys;
    }

    let n_gt = diag_n - n_le;
    Ok(RepStats {
        mean_aud: aud_sum / aud_n as f64,
        n_decisions: aud_n,
        p_mis: missed as f64 / pmis_n as f64,
        mean_y: sum_y / diag_n as f64,
        mean_y2: sum_y2 / diag_n as f64,
        mean_ty: sum_ty / diag_n as f64,
        prob_x_le_t: n_le as f64 / diag_n as f64,
        e_t_given_le: if n_le > 0 { sum_t_le / n_le as f64 } else { f64::NAN },
        e_t_given_gt: if n_gt > 0 { sum_t_gt / n_gt as f64 } else { f64::NAN },
        n_updates_counted: pmis_n,
    })
}

/// Run all replications and aggregate. The CI is Student-t over the
/// per-replication AuD means; replications use disjoint stream indices.
pub fn estimate(spec: &SystemSpec, config: &SimConfig) -> Result<SimEstimate, AudError> {
    spec.validate()?;
    config.validate()?;
    let reps: Vec<RepStats> = (0..config.replications)
        .map(|rep| run_replication_stats(spec, config, rep))
        .collect::<Result<_, _>>()?;
    let r = reps.len() as f64;
    let means: Vec<f64> = reps.iter().map(|s| s.mean_aud).collect();
    let mean_aud = means.iter().sum::<f64>() / r;
    let (stderr, lo, hi) = if reps.len() >= 2 {
        let var = means.iter().map(|m| (m - mean_aud).powi(2)).sum::<f64>() / (r - 1.0);
        let stderr = (var / r).sqrt();
        let t = student_t_975(reps.len() as u64 - 1);
        (stderr, mean_aud - t * stderr, mean_aud + t * stderr)
    } else {
        (0.0, mean_aud, mean_aud)
    };
    let avg = |f: fn(&RepStats) -> f64| reps.iter().map(f).sum::<f64>() / r;
    Ok(SimEstimate {
        kendall: spec.kendall(),
        mean_aud,
        aud_stderr: stderr,
        aud_ci95_low: lo,
        aud_ci95_high: hi,
        p_mis_hat: avg(|s| s.p_mis),
        mean_y: avg(|s| s.mean_y),
        mean_y2: avg(|s| s.mean_y2),
        mean_ty: avg(|s| s.mean_ty),
        prob_x_le_t: avg(|s| s.prob_x_le_t),
        e_t_given_le: avg(|s| s.e_t_given_le),
        e_t_given_gt: avg(|s| s.e_t_given_gt),
        n_decisions: reps.iter().map(|s| s.n_decisions).sum(),
        n_updates_counted: reps.iter().map(|s| s.n_updates_counted).sum(),
        per_replication_means: means,
        seed: config.seed,
        generator: GENERATOR_NAME.to_string(),
    })
}

/// Fraction of retained updates whose inter-departure interval contains no
/// decision epoch.
pub fn estimate_pmis(spec: &SystemSpec, config: &SimConfig) -> Result<f64, AudError> {
    Ok(estimate(spec, config)?.p_mis_hat)
}

/// Empirical `(E[T|X<=T], E[T|X>T], E[Y^2], E[T Y])`.
pub fn conditional_diagnostics(
    spec: &SystemSpec,
    config: &SimConfig,
) -> Result<(f64, f64, f64, f64), AudError> {
    let est = estimate(spec, config)?;
    Ok((est.e_t_given_le, est.e_t_given_gt, est.mean_y2, est.mean_ty))
}

fn student_t_975(dof: u64) -> f64 {
    use statrs::distribution::ContinuousCDF;
    let t = statrs::distribution::StudentsT::new(0.0, 1.0, dof as f64).expect("dof >= 1");
    t.inverse_cdf(0.975)
}

/// Full per-update and per-decision trace of one replication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimTrace {
    pub updates: Vec<UpdateRecord>,
    pub decisions: Vec<DecisionRecord>,
}

/// Build the update timeline for explicit inter-arrival and service
/// sequences (Lindley recursion). Test and trace entry point.
pub fn lindley_updates(inter_arrivals: &[f64], services: &[f64]) -> Vec<UpdateRecord> {
    assert_eq!(inter_arrivals.len(), services.len());
    let mut out = Vec::with_capacity(services.len());
    let mut t_arrival = 0.0;
    let mut prev: Option<UpdateRecord> = None;
    for (k, (&x, &s)) in inter_arrivals.iter().zip(services).enumerate() {
        t_arrival += x;
        let w = prev.map_or(0.0, |p| (p.system - x).max(0.0));
        let system = w + s;
        let departure = t_arrival + system;
        let rec = UpdateRecord {
            index: k as u64,
            arrival: t_arrival,
            inter_arrival: x,
            waiting: w,
            service: s,
            system,
            departure,
            inter_departure: departure - prev.map_or(0.0, |p| p.departure),
            n_decisions: 0,
        };
        out.push(rec);
        prev = Some(rec);
    }
    out
}

/// Attach decision epochs to an update timeline, producing AuD samples and
/// filling each update's decision count. Epochs before the first departure
/// have no source update and are dropped.
pub fn decisions_for(updates: &mut [UpdateRecord], epochs: &[f64]) -> Vec<DecisionRecord> {
    let mut out = Vec::new();
    for &tau in epochs {
        // most recently departed update at tau
        let idx = updates.partition_point(|u| u.departure <= tau);
        if idx == 0 {
            continue;
        }
        let source = &updates[idx - 1];
        out.push(DecisionRecord { epoch: tau, aud: tau - source.arrival, source_index: source.index });
        if idx < updates.len() {
            updates[idx].n_decisions += 1;
        }
    }
    out
}

/// Simulate one replication keeping the full trace, with invariant checks.
pub fn trace(spec: &SystemSpec, config: &SimConfig, rep: u64) -> Result<SimTrace, AudError> {
    spec.validate()?;
    config.validate()?;
    let base = stream_base(rep);
    let mut arrivals = RandomStream::new(config.seed, base);
    let mut services = RandomStream::new(config.seed, base + 1);
    let inter_arrivals: Vec<f64> =
        (0..config.n_updates).map(|_| spec.arrival.sample(&mut arrivals)).collect();
    let service_times: Vec<f64> =
        (0..config.n_updates).map(|_| spec.service.sample(&mut services)).collect();
    let mut updates = lindley_updates(&inter_arrivals, &service_times);

    let horizon = updates.last().map_or(0.0, |u| u.departure);
    let decision_stream = RandomStream::new(config.seed, base + 2);
    let mut gen = DecisionStream::new(&spec.decision, decision_stream, config.random_phase);
    let mut epochs = Vec::new();
    while gen.peek() <= horizon {
        epochs.push(gen.peek());
        gen.advance();
    }
    let decisions = decisions_for(&mut updates, &epochs);

    for pair in updates.windows(2) {
        debug_assert!(pair[1].departure > pair[0].departure, "departures must increase");
    }
    for d in &decisions {
        let u = &updates[d.source_index as usize];
        debug_assert!(d.aud >= u.system - 1e-9, "aud below source system time");
    }
    Ok(SimTrace { updates, decisions })
}

/// One CSV row per update record.
pub fn updates_csv(updates: &[UpdateRecord]) -> String {
    let mut s = String::from(
        "index,arrival,inter_arrival,waiting,service,system,departure,inter_departure,n_decisions\n",
    );
    for u in updates {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            u.index,
            u.arrival,
            u.inter_arrival,
            u.waiting,
            u.service,
            u.system,
            u.departure,
            u.inter_departure,
            u.n_decisions
        ));
    }
    s
}

/// One CSV row per decision record.
pub fn decisions_csv(decisions: &[DecisionRecord]) -> String {
    let mut s = String::from("epoch,aud,source_index\n");
    for d in decisions {
        s.push_str(&format!("{},{},{}\n", d.epoch, d.aud, d.source_index));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{ArrivalLaw, DecisionLaw, ServiceLaw};
    use approx::assert_relative_eq;

    const EXP: ServiceLaw = ServiceLaw::Exponential { mu: 1.5 };
    const DET: ServiceLaw = ServiceLaw::Deterministic { mu: 1.5 };

    fn spec(lambda: f64, service: ServiceLaw, decision: DecisionLaw) -> SystemSpec {
        SystemSpec::poisson_arrivals(lambda, service, decision).unwrap()
    }

    fn quick(n: u64, reps: u64, seed: u64) -> SimConfig {
        SimConfig { n_updates: n, warmup_fraction: 0.1, seed, replications: reps, random_phase: false }
    }

    #[test]
    fn injected_trace_single_decision() {
        // arrival at 1.0, service 0.5 -> departure 1.5; decision at 2.0
        let mut updates = lindley_updates(&[1.0], &[0.5]);
        let ds = decisions_for(&mut updates, &[2.0]);
        assert_eq!(ds.len(), 1);
        assert_eq!(ds[0].aud, 1.0);
        assert_eq!(ds[0].source_index, 0);
    }

    #[test]
    fn injected_trace_busy_period_case() {
        // arrivals at 0, 1 with services 5, 1: T = [5, 5], departures [5, 6]
        let updates = lindley_updates(&[0.0, 1.0], &[5.0, 1.0]);
        assert_eq!(updates[0].system, 5.0);
        assert_eq!(updates[1].system, 5.0);
        assert_eq!(updates[0].departure, 5.0);
        assert_eq!(updates[1].departure, 6.0);
        // X_2 < T_1, so Y_2 = S_2
        assert_eq!(updates[1].inter_departure, updates[1].service);
    }

    #[test]
    fn decision_before_first_departure_is_dropped() {
        let mut updates = lindley_updates(&[1.0], &[0.5]);
        let ds = decisions_for(&mut updates, &[0.3, 1.4, 2.0]);
        assert_eq!(ds.len(), 1);
        assert_eq!(ds[0].epoch, 2.0);
    }

    #[test]
    fn determinism_bit_identical() {
        let s = spec(0.75, EXP, DecisionLaw::Poisson { nu: 15.0 });
        let c = quick(5_000, 3, 42);
        let a = estimate(&s, &c).unwrap();
        let b = estimate(&s, &c).unwrap();
        assert_eq!(a, b);
        let c2 = quick(5_000, 3, 43);
        assert_ne!(estimate(&s, &c2).unwrap().mean_aud, a.mean_aud);
    }

    #[test]
    fn rejects_unstable_spec_before_events() {
        let s = SystemSpec {
            arrival: ArrivalLaw::Poisson { lambda: 2.0 },
            service: EXP,
            decision: DecisionLaw::Poisson { nu: 15.0 },
        };
        assert!(run_replication(&s, &quick(1_000, 1, 1), 0).is_err());
    }

    #[test]
    fn mm1m_mean_aud_close_to_theory() {
        let s = spec(0.75, EXP, DecisionLaw::Poisson { nu: 15.0 });
        let est = estimate(&s, &quick(100_000, 4, 7)).unwrap();
        assert!((est.mean_aud - 2.3333).abs() < 0.05, "mean_aud {}", est.mean_aud);
        assert!(est.aud_ci95_low < est.mean_aud && est.mean_aud < est.aud_ci95_high);
    }

    #[test]
    fn diagnostics_match_identities() {
        let s = spec(0.75, EXP, DecisionLaw::Poisson { nu: 15.0 });
        let est = estimate(&s, &quick(100_000, 4, 11)).unwrap();
        assert!((est.prob_x_le_t - 0.5).abs() < 0.01);
        assert!((est.mean_y - 1.0 / 0.75).abs() / (1.0 / 0.75) < 0.005);
        // E[Y^2] = 2/lambda^2 for exponential service
        assert!((est.mean_y2 - 2.0 / 0.5625).abs() / (2.0 / 0.5625) < 0.03);
    }

    #[test]
    fn md1d_pmis_exactly_zero() {
        let s = spec(0.75, DET, DecisionLaw::Periodic { nu: 15.0 });
        let p = estimate_pmis(&s, &quick(50_000, 2, 5)).unwrap();
        assert_eq!(p, 0.0);
    }

    #[test]
    fn near_zero_decision_rate_misses_everything() {
        let s = spec(0.75, EXP, DecisionLaw::Poisson { nu: 0.001 });
        let p = estimate_pmis(&s, &quick(50_000, 2, 5)).unwrap();
        assert!(p >= 0.99, "p_mis {p}");
    }

    #[test]
    fn trace_invariants_and_sawtooth() {
        let s = spec(0.75, EXP, DecisionLaw::Periodic { nu: 15.0 });
        let tr = trace(&s, &quick(2_000, 1, 3), 0).unwrap();
        for pair in tr.updates.windows(2) {
            assert!(pair[1].departure > pair[0].departure);
            assert_relative_eq!(
                pair[1].system,
                pair[1].waiting + pair[1].service,
                max_relative = 1e-12
            );
            // Lindley case split for Y_k
            if pair[1].inter_arrival <= pair[0].system {
                assert_relative_eq!(
                    pair[1].inter_departure,
                    pair[1].service,
                    max_relative = 1e-9
                );
            } else {
                assert_relative_eq!(
                    pair[1].inter_departure,
                    pair[1].inter_arrival + pair[1].service - pair[0].system,
                    max_relative = 1e-9
                );
            }
        }
        let mut last_epoch = 0.0;
        for d in &tr.decisions {
            assert!(d.epoch > last_epoch);
            last_epoch = d.epoch;
            let u = &tr.updates[d.source_index as usize];
            assert!(d.aud >= u.system - 1e-9);
            // sawtooth: age grows linearly between the source departure
            // and the decision epoch
            assert_relative_eq!(d.aud, u.system + (d.epoch - u.departure), max_relative = 1e-9);
        }
    }

    #[test]
    fn poisson_decision_rate_invariance() {
        let cfg = quick(60_000, 4, 17);
        let mut ests = Vec::new();
        for nu in [1.0, 15.0, 100.0] {
            let s = spec(0.75, EXP, DecisionLaw::Poisson { nu });
            ests.push(estimate(&s, &cfg).unwrap());
        }
        for a in &ests {
            for b in &ests {
                assert!(
                    a.aud_ci95_low <= b.aud_ci95_high && b.aud_ci95_low <= a.aud_ci95_high,
                    "CIs do not overlap: [{}, {}] vs [{}, {}]",
                    a.aud_ci95_low,
                    a.aud_ci95_high,
                    b.aud_ci95_low,
                    b.aud_ci95_high
                );
            }
        }
    }

    #[test]
    fn non_poisson_arrivals_simulate() {
        for arrival in [
            ArrivalLaw::UniformMeanMatched { lambda: 0.75 },
            ArrivalLaw::Periodic { lambda: 0.75 },
        ] {
            let s = SystemSpec { arrival, service: EXP, decision: DecisionLaw::Poisson { nu: 15.0 } };
            let est = estimate(&s, &quick(50_000, 2, 9)).unwrap();
            assert!(est.mean_aud.is_finite() && est.mean_aud > 0.0);
        }
    }

    proptest::proptest! {
        // structural invariants of the Lindley timeline for arbitrary
        // positive inter-arrival/service sequences
        #[test]
        fn lindley_invariants(
            xs in proptest::collection::vec(1e-3..10.0f64, 2..40),
            ss in proptest::collection::vec(1e-3..10.0f64, 40),
            epochs in proptest::collection::vec(0.0..400.0f64, 0..60),
        ) {
            let ss = &ss[..xs.len()];
            let mut updates = lindley_updates(&xs, ss);
            for pair in updates.windows(2) {
                let (p, u) = (pair[0], pair[1]);
                proptest::prop_assert!(u.departure > p.departure);
                proptest::prop_assert!(u.waiting >= 0.0);
                proptest::prop_assert!(u.system >= u.service);
                let expect = if u.inter_arrival <= p.system {
                    u.service
                } else {
                    u.inter_arrival + u.service - p.system
                };
                proptest::prop_assert!((u.inter_departure - expect).abs() < 1e-9);
            }
            let mut epochs = epochs;
            epochs.sort_by(f64::total_cmp);
            let decisions = decisions_for(&mut updates, &epochs);
            let attached: u64 = updates.iter().map(|u| u.n_decisions).sum();
            // dropped ones are before the first departure or after the last
            let in_range = epochs
                .iter()
                .filter(|&&e| updates[0].departure <= e)
                .count() as u64;
            proptest::prop_assert_eq!(decisions.len() as u64, in_range);
            proptest::prop_assert!(attached <= in_range);
            for d in &decisions {
                let u = &updates[d.source_index as usize];
                proptest::prop_assert!(d.aud >= u.system - 1e-9);
                proptest::prop_assert!(d.epoch >= u.departure);
            }
        }
    }

    #[test]
    fn estimate_serializes_with_seed_and_generator() {
        let s = spec(0.75, EXP, DecisionLaw::Poisson { nu: 15.0 });
        let est = run_replication(&s, &quick(1_000, 1, 77), 0).unwrap();
        let json = serde_json::to_value(&est).unwrap();
        assert_eq!(json["seed"], 77);
        assert_eq!(json["generator"], "chacha12");
    }
}
