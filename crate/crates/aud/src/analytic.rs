//! Closed-form average age-upon-decisions (AuD) and missing probabilities
//! for FCFS M/G/1 update-and-decide queues.
//!
//! Two independent code paths exist for each decision regime: a general
//! moment-based assembly ([`aud_mg1m`], [`aud_mg1d_general`]) and
//! specialized closed forms per service law ([`aud_mg1m_closed`],
//! [`aud_mg1d_closed`]). The test suite holds the pairs against each other
//! and against the discrete-event simulator.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::distributions::{ArrivalLaw, DecisionLaw, ServiceLaw};
use crate::error::AudError;

/// Stability window for rho = lambda/mu. Evaluation outside this window is
/// numerically meaningless for the intended comparisons and is rejected.
pub const RHO_MIN: f64 = 1e-6;
pub const RHO_MAX: f64 = 0.999;

/// A full update-and-decide system configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemSpec {
    pub arrival: ArrivalLaw,
    pub service: ServiceLaw,
    pub decision: DecisionLaw,
}

impl SystemSpec {
    /// Poisson-arrival system, the common case.
    pub fn poisson_arrivals(
        lambda: f64,
        service: ServiceLaw,
        decision: DecisionLaw,
    ) -> Result<Self, AudError> {
        let spec = SystemSpec { arrival: ArrivalLaw::Poisson { lambda }, service, decision };
        spec.validate()?;
        Ok(spec)
    }

    pub fn lambda(&self) -> f64 {
        self.arrival.lambda()
    }

    pub fn mu(&self) -> f64 {
        self.service.mu()
    }

    pub fn nu(&self) -> f64 {
        self.decision.nu()
    }

    pub fn rho(&self) -> f64 {
        self.lambda() / self.mu()
    }

    /// Kendall-style tag, e.g. "M/U/1/D".
    pub fn kendall(&self) -> String {
        format!("{}/{}/1/{}", self.arrival.kendall(), self.service.kendall(), self.decision.kendall())
    }

    pub fn validate(&self) -> Result<(), AudError> {
        self.arrival.validate()?;
        self.service.validate()?;
        self.decision.validate()?;
        let rho = self.rho();
        if !(RHO_MIN..RHO_MAX).contains(&rho) {
            return Err(AudError::Unstable { rho, lambda: self.lambda(), mu: self.mu() });
        }
        Ok(())
    }

    fn require_poisson_arrivals(&self) -> Result<(), AudError> {
        match self.arrival {
            ArrivalLaw::Poisson { .. } => Ok(()),
            other => Err(AudError::NonPoissonArrivals(other.name().to_string())),
        }
    }

    /// Integer decision-to-service rate ratio, required by the
    /// periodic-decision formulas.
    pub fn m0(&self) -> Result<u64, AudError> {
        match self.decision {
            DecisionLaw::Periodic { nu } => {
                let ratio = nu / self.mu();
                let rounded = ratio.round();
                if rounded < 1.0 || (ratio - rounded).abs() > 1e-9 {
                    return Err(AudError::NonIntegerM0 { m0: ratio });
                }
                Ok(rounded as u64)
            }
            DecisionLaw::Poisson { .. } => {
                Err(AudError::WrongDecisionLaw { expected: "periodic", actual: "poisson" })
            }
        }
    }
}

/// Closed-form outputs plus all intermediate quantities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticReport {
    pub kendall: String,
    pub avg_aud: f64,
    pub p_mis: f64,
    pub intermediates: BTreeMap<String, f64>,
}

/// First and second moments of the decision counts N^1, N^2, N^3 under the
/// uniform-phase approximation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NkMoments {
    pub e_n1: f64,
    pub e_n1_sq: f64,
    pub e_n2: f64,
    pub e_n2_sq: f64,
    pub e_n3: f64,
    pub e_n3_sq: f64,
}

/// MGF of the system time, `G_T(s) = -s(1-rho)G_S(s) / (-s - lambda + lambda G_S(s))`.
///
/// Diagnostic only; the shipped formulas use [`omega`]'s closed form
/// directly rather than differentiating this.
pub fn system_time_mgf(spec: &SystemSpec, s: f64) -> Result<f64, AudError> {
    spec.validate()?;
    spec.require_poisson_arrivals()?;
    if s == 0.0 {
        return Ok(1.0);
    }
    let lambda = spec.lambda();
    let rho = spec.rho();
    let gs = spec.service.mgf(s)?;
    let denom = -s - lambda + lambda * gs;
    if denom.abs() < 1e-12 {
        return Err(AudError::NumericalSingularity { s, denom });
    }
    Ok(-s * (1.0 - rho) * gs / denom)
}

/// `omega = dG_T/ds at s=-lambda = (1-rho)(G_S(-lambda)-1) / (lambda G_S(-lambda))`.
/// Negative for every stable spec.
pub fn omega(spec: &SystemSpec) -> Result<f64, AudError> {
    spec.validate()?;
    spec.require_poisson_arrivals()?;
    let lambda = spec.lambda();
    let rho = spec.rho();
    let gs = spec.service.mgf(-lambda)?;
    Ok((1.0 - rho) * (gs - 1.0) / (lambda * gs))
}

/// Pollaczek-Khinchine mean system time `E[T] = 1/mu + lambda E[S^2] / (2(1-rho))`.
pub fn mean_system_time(spec: &SystemSpec) -> Result<f64, AudError> {
    spec.validate()?;
    spec.require_poisson_arrivals()?;
    let (_, es2) = spec.service.moments();
    Ok(1.0 / spec.mu() + spec.lambda() * es2 / (2.0 * (1.0 - spec.rho())))
}

/// `E[T | X <= T]` and `E[T | X > T]`.
pub fn conditional_system_time(spec: &SystemSpec) -> Result<(f64, f64), AudError> {
    let rho = spec.rho();
    let w = omega(spec)?;
    let et = mean_system_time(spec)?;
    Ok(((et + w) / rho, -w / (1.0 - rho)))
}

/// Average AuD from raw inter-departure moments:
/// `(E[Y^2] + 2 E[T Y]) / (2 E[Y])`. Works with analytic or simulated
/// moments alike.
pub fn aud_from_moments(e_y: f64, e_y2: f64, e_ty: f64) -> Result<f64, AudError> {
    if !(e_y > 0.0) {
        return Err(AudError::NonPositiveMeanY(e_y));
    }
    Ok((e_y2 + 2.0 * e_ty) / (2.0 * e_y))
}

/// Analytic inter-departure moments for a Poisson-arrival system:
/// `(E[Y], E[Y^2], E[T Y])`.
pub fn analytic_departure_moments(spec: &SystemSpec) -> Result<(f64, f64, f64), AudError> {
    let lambda = spec.lambda();
    let mu = spec.mu();
    let (_, es2) = spec.service.moments();
    let w = omega(spec)?;
    let e_y = 1.0 / lambda;
    let e_y2 = es2 + 2.0 / (lambda * lambda) - 2.0 / (mu * mu);
    let e_ty = 1.0 / (mu * mu) + lambda * es2 / (2.0 * (mu - lambda)) - w / lambda;
    Ok((e_y, e_y2, e_ty))
}

fn base_intermediates(spec: &SystemSpec) -> Result<BTreeMap<String, f64>, AudError> {
    let lambda = spec.lambda();
    let w = omega(spec)?;
    let et = mean_system_time(spec)?;
    let (e_t_le, e_t_gt) = conditional_system_time(spec)?;
    let (e_y, e_y2, e_ty) = analytic_departure_moments(spec)?;
    let (_, es2) = spec.service.moments();
    let mut m = BTreeMap::new();
    m.insert("rho".into(), spec.rho());
    m.insert("g_s_neg_lambda".into(), spec.service.mgf(-lambda)?);
    m.insert("omega".into(), w);
    m.insert("e_t".into(), et);
    m.insert("e_y".into(), e_y);
    m.insert("e_y_sq".into(), e_y2);
    m.insert("e_ty".into(), e_ty);
    m.insert("e_s_sq".into(), es2);
    m.insert("e_t_given_x_le_t".into(), e_t_le);
    m.insert("e_t_given_x_gt_t".into(), e_t_gt);
    Ok(m)
}

/// Average AuD of an M/G/1/M system (Poisson decisions):
/// `[lambda^2 E[S^2] + 2(1-rho)(1 - lambda omega)] / (2 lambda (1-rho))`.
/// Independent of the decision rate.
pub fn aud_mg1m(spec: &SystemSpec) -> Result<AnalyticReport, AudError> {
    spec.validate()?;
    spec.require_poisson_arrivals()?;
    if let DecisionLaw::Periodic { .. } = spec.decision {
        return Err(AudError::WrongDecisionLaw { expected: "poisson", actual: "periodic" });
    }
    let lambda = spec.lambda();
    let rho = spec.rho();
    let (_, es2) = spec.service.moments();
    let w = omega(spec)?;
    let avg_aud =
        (lambda * lambda * es2 + 2.0 * (1.0 - rho) * (1.0 - lambda * w)) / (2.0 * lambda * (1.0 - rho));
    let p_mis = pmis_mg1m(spec)?;
    Ok(AnalyticReport {
        kendall: spec.kendall(),
        avg_aud,
        p_mis,
        intermediates: base_intermediates(spec)?,
    })
}

/// Specialized M/U/1/M, M/M/1/M, and M/D/1/M closed forms; an independent
/// code path against [`aud_mg1m`].
pub fn aud_mg1m_closed(spec: &SystemSpec) -> Result<f64, AudError> {
    spec.validate()?;
    spec.require_poisson_arrivals()?;
    let lambda = spec.lambda();
    let rho = spec.rho();
    Ok(match spec.service {
        ServiceLaw::UniformMeanMatched { .. } => {
            let e2 = (2.0 * rho).exp();
            rho * (6.0 * rho * rho * e2 - 13.0 * rho * e2 + 9.0 * e2 + rho - 3.0)
                / (3.0 * lambda * (1.0 - rho) * (e2 - 1.0))
        }
        ServiceLaw::Exponential { .. } => (rho.powi(3) - rho * rho + 1.0) / (lambda * (1.0 - rho)),
        ServiceLaw::Deterministic { .. } => {
            let e = rho.exp();
            (rho * rho + 2.0 * (1.0 - rho) * (rho + e - rho * e)) / (2.0 * lambda * (1.0 - rho))
        }
    })
}

/// Missing probability under Poisson decisions:
/// `G_S(-nu) (rho nu + lambda) / (lambda + nu)`.
pub fn pmis_mg1m(spec: &SystemSpec) -> Result<f64, AudError> {
    spec.validate()?;
    spec.require_poisson_arrivals()?;
    let lambda = spec.lambda();
    let nu = spec.nu();
    let rho = spec.rho();
    Ok(spec.service.mgf(-nu)? * (rho * nu + lambda) / (lambda + nu))
}

/// Decision-count moments for periodic decisions under the uniform-phase
/// approximation. Requires integer m0 = nu/mu.
pub fn nk_moments(spec: &SystemSpec) -> Result<NkMoments, AudError> {
    spec.validate()?;
    spec.require_poisson_arrivals()?;
    let m0 = spec.m0()? as f64;
    let lambda = spec.lambda();
    let mu = spec.mu();
    let nu = spec.nu();
    let u0 = (-lambda / nu).exp();
    let w0 = (-mu / nu).exp();

    // N^2 counts decisions in the idle gap X - T ~ Exp(lambda); the same
    // for every service law.
    let e_n2 = nu / lambda;
    let e_n2_sq = nu * (1.0 + u0) / (lambda * (1.0 - u0));

    let (e_n1, e_n1_sq, e_n3, e_n3_sq) = match spec.service {
        ServiceLaw::Exponential { .. } => {
            let e = nu / mu;
            let e_sq = nu * (1.0 + w0) / (mu * (1.0 - w0));
            (e, e_sq, e, e_sq)
        }
        ServiceLaw::Deterministic { .. } => {
            // deterministic interval on a matched grid: exactly m0 decisions
            (m0, m0 * m0, m0, m0 * m0)
        }
        ServiceLaw::UniformMeanMatched { .. } => {
            let e = (2.0 * m0 + 1.0) / 2.0;
            let e_sq = (2.0 * m0 + 1.0) * (2.0 * m0 + 2.0) * (4.0 * m0 + 3.0) / 6.0;
            let e3_sq = (2.0 * m0 + 1.0) * (2.0 * m0 + 2.0) * (4.0 * m0 + 3.0) / (12.0 * m0);
            (e, e_sq, e, e3_sq)
        }
    };
    Ok(NkMoments { e_n1, e_n1_sq, e_n2, e_n2_sq, e_n3, e_n3_sq })
}

/// Average AuD of an M/G/1/D system assembled from the conditional system
/// times and decision-count moments.
///
/// The quadratic term of the second branch uses the expansion of
/// `E[(N^2 + N^3)^2]`, i.e. a `2 E[N^2] E[N^3]` cross term; this is what
/// makes the assembly agree with [`aud_mg1d_closed`] to machine precision
/// for exponential and deterministic service.
pub fn aud_mg1d_general(spec: &SystemSpec) -> Result<AnalyticReport, AudError> {
    spec.validate()?;
    spec.require_poisson_arrivals()?;
    let nk = nk_moments(spec)?;
    let (e_t_le, e_t_gt) = conditional_system_time(spec)?;
    let lambda = spec.lambda();
    let rho = spec.rho();
    let nu = spec.nu();

    let busy = e_t_le * nk.e_n1 + nk.e_n1_sq / (2.0 * nu);
    let idle_counts = nk.e_n2 + nk.e_n3;
    let idle_sq = nk.e_n2_sq + nk.e_n3_sq + 2.0 * nk.e_n2 * nk.e_n3;
    let idle = e_t_gt * idle_counts + idle_sq / (2.0 * nu);
    let avg_aud = lambda * rho / nu * busy + lambda * (1.0 - rho) / nu * idle;

    let mut intermediates = base_intermediates(spec)?;
    intermediates.insert("u0".into(), (-lambda / nu).exp());
    intermediates.insert("omega0".into(), (-spec.mu() / nu).exp());
    intermediates.insert("e_n1".into(), nk.e_n1);
    intermediates.insert("e_n1_sq".into(), nk.e_n1_sq);
    intermediates.insert("e_n2".into(), nk.e_n2);
    intermediates.insert("e_n2_sq".into(), nk.e_n2_sq);
    intermediates.insert("e_n3".into(), nk.e_n3);
    intermediates.insert("e_n3_sq".into(), nk.e_n3_sq);

    Ok(AnalyticReport {
        kendall: spec.kendall(),
        avg_aud,
        p_mis: pmis_mg1d(spec)?,
        intermediates,
    })
}

/// Specialized M/U/1/D, M/M/1/D, and M/D/1/D closed forms with
/// `omega0 = e^{-mu/nu}` and `u0 = e^{-lambda/nu}`.
pub fn aud_mg1d_closed(spec: &SystemSpec) -> Result<f64, AudError> {
    spec.validate()?;
    spec.require_poisson_arrivals()?;
    let m0 = spec.m0()? as f64;
    let mu = spec.mu();
    let nu = spec.nu();
    let rho = spec.rho();
    let u0 = (-spec.lambda() / nu).exp();
    let w0 = (-mu / nu).exp();
    // shared tail term (1-rho)(1+u0) / (2 mu m0 (1-u0))
    let idle_tail = (1.0 - rho) * (1.0 + u0) / (2.0 * mu * m0 * (1.0 - u0));
    Ok(match spec.service {
        ServiceLaw::UniformMeanMatched { .. } => {
            let e2 = (2.0 * rho).exp();
            2.0 * e2 * (1.0 - rho) / (mu * (e2 - 1.0)) + idle_tail
                - 1.0 / (mu * rho * (1.0 - rho))
                - ((2.0 * m0 * m0 + 1.0) * rho * rho + (16.0 * m0 * m0 - 1.0) * rho
                    - 36.0 * m0 * m0
                    - 6.0 * m0)
                    / (12.0 * m0 * m0 * mu * (1.0 - rho))
        }
        ServiceLaw::Exponential { .. } => {
            (2.0 * rho * rho - 3.0 * rho + 2.0) / (mu * (1.0 - rho))
                + rho * (1.0 + w0) / (2.0 * mu * m0 * (1.0 - w0))
                + idle_tail
        }
        ServiceLaw::Deterministic { .. } => {
            rho.exp() * (1.0 - rho) / (mu * rho)
                + idle_tail
                + (-3.0 * rho * rho + 6.0 * rho - 2.0) / (2.0 * mu * rho * (1.0 - rho))
        }
    })
}

/// Missing probability under periodic decisions (uniform-phase
/// approximation); exactly zero for deterministic service.
pub fn pmis_mg1d(spec: &SystemSpec) -> Result<f64, AudError> {
    spec.validate()?;
    spec.require_poisson_arrivals()?;
    let m0 = spec.m0()? as f64;
    let rho = spec.rho();
    let u0 = (-spec.lambda() / spec.nu()).exp();
    Ok(match spec.service {
        ServiceLaw::UniformMeanMatched { .. } => {
            1.0 / (8.0 * m0) + (1.0 - rho) * (m0 * (1.0 - u0) - rho) / (4.0 * rho * rho)
        }
        ServiceLaw::Exponential { .. } => 0.5 + m0 * (u0 - 1.0) / (2.0 * rho),
        ServiceLaw::Deterministic { .. } => 0.0,
    })
}

/// Smallest integer m0 at which the uniform-service periodic-decision AuD
/// drops below the exponential-service one. Linear scan; each point is a
/// pair of O(1) closed-form evaluations, and the scan exits at the first
/// hit.
pub fn find_m0_star(lambda: f64, mu: f64, m0_max: u64) -> Result<Option<u64>, AudError> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(AudError::InvalidRate { name: "lambda", value: lambda });
    }
    if !(mu > 0.0) || !mu.is_finite() || lambda >= mu {
        return Err(AudError::Unstable { rho: lambda / mu, lambda, mu });
    }
    for m0 in 1..=m0_max {
        let nu = m0 as f64 * mu;
        let uni = SystemSpec::poisson_arrivals(
            lambda,
            ServiceLaw::UniformMeanMatched { mu },
            DecisionLaw::Periodic { nu },
        )?;
        let exp = SystemSpec::poisson_arrivals(
            lambda,
            ServiceLaw::Exponential { mu },
            DecisionLaw::Periodic { nu },
        )?;
        if aud_mg1d_closed(&uni)? < aud_mg1d_closed(&exp)? {
            return Ok(Some(m0));
        }
    }
    Ok(None)
}
