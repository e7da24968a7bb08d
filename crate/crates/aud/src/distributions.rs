//! Parametric probability laws for inter-arrival times, service times, and
//! inter-decision times: exact moments, MGF evaluation, and deterministic
//! seeded sampling.
//!
//! Every law is normalized so its mean equals the reciprocal of its rate.
//! In particular the mean-matched uniform service law has support
//! `(0, 2/mu)` with density `mu/2`.

use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::AudError;

/// Name of the generator behind [`RandomStream`], embedded in simulation
/// output for reproducibility.
pub const GENERATOR_NAME: &str = "chacha12";

/// Service-time law with mean `1/mu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ServiceLaw {
    /// Exponential with rate `mu`.
    Exponential { mu: f64 },
    /// Uniform on `(0, 2/mu)`.
    UniformMeanMatched { mu: f64 },
    /// All mass at `1/mu`.
    Deterministic { mu: f64 },
}

/// Inter-arrival law with mean `1/lambda`. The analytic module accepts
/// Poisson only; the other variants are simulator-only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ArrivalLaw {
    Poisson { lambda: f64 },
    UniformMeanMatched { lambda: f64 },
    Periodic { lambda: f64 },
}

/// Decision-epoch law with rate `nu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DecisionLaw {
    /// Poisson decision epochs (exponential inter-decision times).
    Poisson { nu: f64 },
    /// Epochs on a grid of spacing exactly `1/nu`.
    Periodic { nu: f64 },
}

impl ServiceLaw {
    pub fn from_name(name: &str, mu: f64) -> Result<Self, AudError> {
        let law = match name {
            "exp" => ServiceLaw::Exponential { mu },
            "uniform" => ServiceLaw::UniformMeanMatched { mu },
            "det" => ServiceLaw::Deterministic { mu },
            other => return Err(AudError::UnknownLaw(other.to_string())),
        };
        law.validate()?;
        Ok(law)
    }

    pub fn name(&self) -> &'static str {
        match self {
            ServiceLaw::Exponential { .. } => "exp",
            ServiceLaw::UniformMeanMatched { .. } => "uniform",
            ServiceLaw::Deterministic { .. } => "det",
        }
    }

    /// One-letter Kendall symbol: M, U, or D.
    pub fn kendall(&self) -> &'static str {
        match self {
            ServiceLaw::Exponential { .. } => "M",
            ServiceLaw::UniformMeanMatched { .. } => "U",
            ServiceLaw::Deterministic { .. } => "D",
        }
    }

    pub fn mu(&self) -> f64 {
        match *self {
            ServiceLaw::Exponential { mu }
            | ServiceLaw::UniformMeanMatched { mu }
            | ServiceLaw::Deterministic { mu } => mu,
        }
    }

    pub fn validate(&self) -> Result<(), AudError> {
        let mu = self.mu();
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(AudError::InvalidRate { name: "mu", value: mu });
        }
        Ok(())
    }

    /// `E[e^{sS}]`. Errors for `s >= mu` on the exponential variant, where
    /// the MGF diverges.
    pub fn mgf(&self, s: f64) -> Result<f64, AudError> {
        let mu = self.mu();
        match self {
            ServiceLaw::Exponential { .. } => {
                if s >= mu {
                    return Err(AudError::MgfDomain { s, mu });
                }
                Ok(mu / (mu - s))
            }
            ServiceLaw::UniformMeanMatched { .. } => Ok(expm1_over_x(2.0 * s / mu)),
            ServiceLaw::Deterministic { .. } => Ok((s / mu).exp()),
        }
    }

    /// `(E[S], E[S^2])`.
    pub fn moments(&self) -> (f64, f64) {
        let mu = self.mu();
        let second = match self {
            ServiceLaw::Exponential { .. } => 2.0 / (mu * mu),
            ServiceLaw::UniformMeanMatched { .. } => 4.0 / (3.0 * mu * mu),
            ServiceLaw::Deterministic { .. } => 1.0 / (mu * mu),
        };
        (1.0 / mu, second)
    }

    /// Exact CDF, for distribution tests.
    pub fn cdf(&self, x: f64) -> f64 {
        let mu = self.mu();
        if x <= 0.0 {
            return 0.0;
        }
        match self {
            ServiceLaw::Exponential { .. } => 1.0 - (-mu * x).exp(),
            ServiceLaw::UniformMeanMatched { .. } => (x * mu / 2.0).min(1.0),
            ServiceLaw::Deterministic { .. } => {
                if x >= 1.0 / mu {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    pub fn sample(&self, stream: &mut RandomStream) -> f64 {
        let mu = self.mu();
        match self {
            ServiceLaw::Exponential { .. } => stream.sample_exp(mu),
            ServiceLaw::UniformMeanMatched { .. } => stream.next_f64() * 2.0 / mu,
            ServiceLaw::Deterministic { .. } => 1.0 / mu,
        }
    }
}

impl ArrivalLaw {
    pub fn from_name(name: &str, lambda: f64) -> Result<Self, AudError> {
        let law = match name {
            "poisson" | "exp" => ArrivalLaw::Poisson { lambda },
            "uniform" => ArrivalLaw::UniformMeanMatched { lambda },
            "periodic" | "det" => ArrivalLaw::Periodic { lambda },
            other => return Err(AudError::UnknownLaw(other.to_string())),
        };
        law.validate()?;
        Ok(law)
    }

    pub fn name(&self) -> &'static str {
        match self {
            ArrivalLaw::Poisson { .. } => "poisson",
            ArrivalLaw::UniformMeanMatched { .. } => "uniform",
            ArrivalLaw::Periodic { .. } => "periodic",
        }
    }

    pub fn kendall(&self) -> &'static str {
        match self {
            ArrivalLaw::Poisson { .. } => "M",
            ArrivalLaw::UniformMeanMatched { .. } => "U",
            ArrivalLaw::Periodic { .. } => "D",
        }
    }

    pub fn lambda(&self) -> f64 {
        match *self {
            ArrivalLaw::Poisson { lambda }
            | ArrivalLaw::UniformMeanMatched { lambda }
            | ArrivalLaw::Periodic { lambda } => lambda,
        }
    }

    pub fn validate(&self) -> Result<(), AudError> {
        let lambda = self.lambda();
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(AudError::InvalidRate { name: "lambda", value: lambda });
        }
        Ok(())
    }

    /// One inter-arrival time.
    pub fn sample(&self, stream: &mut RandomStream) -> f64 {
        let lambda = self.lambda();
        match self {
            ArrivalLaw::Poisson { .. } => stream.sample_exp(lambda),
            ArrivalLaw::UniformMeanMatched { .. } => stream.next_f64() * 2.0 / lambda,
            ArrivalLaw::Periodic { .. } => 1.0 / lambda,
        }
    }
}

impl DecisionLaw {
    pub fn from_name(name: &str, nu: f64) -> Result<Self, AudError> {
        let law = match name {
            "poisson" => DecisionLaw::Poisson { nu },
            "periodic" => DecisionLaw::Periodic { nu },
            other => return Err(AudError::UnknownLaw(other.to_string())),
        };
        law.validate()?;
        Ok(law)
    }

    pub fn name(&self) -> &'static str {
        match self {
            DecisionLaw::Poisson { .. } => "poisson",
            DecisionLaw::Periodic { .. } => "periodic",
        }
    }

    pub fn kendall(&self) -> &'static str {
        match self {
            DecisionLaw::Poisson { .. } => "M",
            DecisionLaw::Periodic { .. } => "D",
        }
    }

    pub fn nu(&self) -> f64 {
        match *self {
            DecisionLaw::Poisson { nu } | DecisionLaw::Periodic { nu } => nu,
        }
    }

    pub fn validate(&self) -> Result<(), AudError> {
        let nu = self.nu();
        if !(nu > 0.0) || !nu.is_finite() {
            return Err(AudError::InvalidRate { name: "nu", value: nu });
        }
        Ok(())
    }
}

/// `(e^x - 1)/x` with the removable singularity at 0.
///
/// For |x| below 1e-4 the direct quotient loses digits to cancellation, so
/// a 4-term Taylor series is used there.
fn expm1_over_x(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 + x / 2.0 + x * x / 6.0 + x * x * x / 24.0
    } else {
        x.exp_m1() / x
    }
}

/// Deterministic seeded sample stream.
///
/// ChaCha12 keyed by the 64-bit seed (bytes 0..8) and the stream index
/// (bytes 8..16). Identical `(seed, stream)` pairs yield identical
/// sequences; distinct stream indices under one seed are independent.
#[derive(Debug, Clone)]
pub struct RandomStream {
    rng: rand_chacha::ChaCha12Rng,
    seed: u64,
    stream: u64,
}

impl RandomStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut key = [0u8; 32];
        key[0..8].copy_from_slice(&seed.to_le_bytes());
        key[8..16].copy_from_slice(&stream.to_le_bytes());
        RandomStream { rng: rand_chacha::ChaCha12Rng::from_seed(key), seed, stream }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Exponential variate with the given rate, by inversion.
    pub fn sample_exp(&mut self, rate: f64) -> f64 {
        let u = self.next_f64();
        -(-u).ln_1p() / rate
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const MU: f64 = 1.5;

    fn laws() -> [ServiceLaw; 3] {
        [
            ServiceLaw::Exponential { mu: MU },
            ServiceLaw::UniformMeanMatched { mu: MU },
            ServiceLaw::Deterministic { mu: MU },
        ]
    }

    /// Trapezoid quadrature of `int e^{sx} f(x) dx`, the independent route
    /// against the closed-form MGFs.
    fn mgf_quadrature(law: &ServiceLaw, s: f64) -> f64 {
        let mu = law.mu();
        match law {
            ServiceLaw::Deterministic { .. } => (s / mu).exp(),
            ServiceLaw::UniformMeanMatched { .. } => {
                let hi = 2.0 / mu;
                let n = 200_000;
                let h = hi / n as f64;
                let f = |x: f64| (s * x).exp() * mu / 2.0;
                let mut acc = (f(0.0) + f(hi)) / 2.0;
                for i in 1..n {
                    acc += f(i as f64 * h);
                }
                acc * h
            }
            ServiceLaw::Exponential { .. } => {
                // integrand decays like e^{(s-mu)x}; cut where it is < 1e-18
                let hi = 45.0 / (mu - s);
                let n = 400_000;
                let h = hi / n as f64;
                let f = |x: f64| (s * x).exp() * mu * (-mu * x).exp();
                let mut acc = (f(0.0) + f(hi)) / 2.0;
                for i in 1..n {
                    acc += f(i as f64 * h);
                }
                acc * h
            }
        }
    }

    #[test]
    fn mgf_at_zero_is_one() {
        for law in laws() {
            assert_eq!(law.mgf(0.0).unwrap(), 1.0);
        }
    }

    #[test]
    fn mgf_closed_forms() {
        let det = ServiceLaw::Deterministic { mu: 1.5 };
        assert_relative_eq!(det.mgf(-0.75).unwrap(), (-0.5f64).exp(), max_relative = 1e-12);
        assert_relative_eq!(det.mgf(-0.75).unwrap(), 0.606531, max_relative = 1e-6);

        let uni = ServiceLaw::UniformMeanMatched { mu: 1.5 };
        // Appendix form (1 - e^{-2 rho})/(2 rho) at rho = 0.5
        assert_relative_eq!(uni.mgf(-0.75).unwrap(), 1.0 - (-1.0f64).exp(), max_relative = 1e-12);
        assert_relative_eq!(uni.mgf(-0.75).unwrap(), 0.632121, max_relative = 1e-6);
    }

    #[test]
    fn mgf_domain_error_for_exponential() {
        let law = ServiceLaw::Exponential { mu: 1.5 };
        assert!(law.mgf(1.5).is_err());
        assert!(law.mgf(2.0).is_err());
        assert!(law.mgf(1.49).is_ok());
    }

    #[test]
    fn mgf_matches_quadrature() {
        for law in laws() {
            let s_hi = match law {
                ServiceLaw::Exponential { mu } => mu / 2.0,
                _ => 0.0,
            };
            let mut s = -5.0;
            while s <= s_hi + 1e-9 {
                let q = mgf_quadrature(&law, s);
                let m = law.mgf(s).unwrap();
                assert!((m - q).abs() < 1e-8, "{law:?} s={s}: {m} vs quadrature {q}");
                s += 0.5;
            }
        }
    }

    #[test]
    fn mgf_taylor_branch_is_continuous() {
        let uni = ServiceLaw::UniformMeanMatched { mu: 1.5 };
        // just inside the 1e-4 switch on x = 2s/mu the Taylor value must
        // agree with the exact expm1 form to machine accuracy
        for s in [-7.4e-5 * 0.75, 7.4e-5 * 0.75] {
            let x: f64 = 2.0 * s / 1.5;
            let exact = x.exp_m1() / x;
            assert_relative_eq!(uni.mgf(s).unwrap(), exact, max_relative = 1e-12);
        }
    }

    #[test]
    fn mgf_derivative_recovers_mean() {
        let h = 1e-6;
        for law in laws() {
            let d = (law.mgf(h).unwrap() - law.mgf(-h).unwrap()) / (2.0 * h);
            let (mean, _) = law.moments();
            assert_relative_eq!(d, mean, max_relative = 1e-6);
        }
    }

    #[test]
    fn moment_values() {
        let (m, m2) = ServiceLaw::Exponential { mu: 1.5 }.moments();
        assert_relative_eq!(m, 2.0 / 3.0, max_relative = 1e-12);
        assert_relative_eq!(m2, 0.888889, max_relative = 1e-5);
        let (m, m2) = ServiceLaw::UniformMeanMatched { mu: 1.5 }.moments();
        assert_relative_eq!(m, 2.0 / 3.0, max_relative = 1e-12);
        assert_relative_eq!(m2, 4.0 / (3.0 * 2.25), max_relative = 1e-12);
        assert_relative_eq!(m2, 0.592593, max_relative = 1e-5);
        let (m, m2) = ServiceLaw::Deterministic { mu: 1.5 }.moments();
        assert_relative_eq!(m, 2.0 / 3.0, max_relative = 1e-12);
        assert_relative_eq!(m2, 0.444444, max_relative = 1e-5);
    }

    #[test]
    fn second_moment_matches_quadrature() {
        // independent oracle: E[S^2] by trapezoid over the density
        let exp = ServiceLaw::Exponential { mu: 1.5 };
        let n = 400_000;
        let hi = 30.0;
        let h = hi / n as f64;
        let f = |x: f64| x * x * 1.5 * (-1.5 * x).exp();
        let mut acc = (f(0.0) + f(hi)) / 2.0;
        for i in 1..n {
            acc += f(i as f64 * h);
        }
        assert_relative_eq!(exp.moments().1, acc * h, max_relative = 1e-6);
    }

    #[test]
    fn deterministic_sample_is_point_mass() {
        let law = ServiceLaw::Deterministic { mu: 2.0 };
        let mut s = RandomStream::new(42, 0);
        for _ in 0..100 {
            assert_eq!(law.sample(&mut s), 0.5);
        }
    }

    #[test]
    fn sample_means_and_support() {
        let n = 1_000_000;
        let mut s = RandomStream::new(7, 0);
        let exp = ServiceLaw::Exponential { mu: 1.5 };
        let mean = (0..n).map(|_| exp.sample(&mut s)).sum::<f64>() / n as f64;
        assert!((mean - 2.0 / 3.0).abs() < 0.002, "exp mean {mean}");

        let uni = ServiceLaw::UniformMeanMatched { mu: 1.5 };
        let mut sum = 0.0;
        for _ in 0..n {
            let x = uni.sample(&mut s);
            assert!((0.0..4.0 / 3.0).contains(&x));
            sum += x;
        }
        assert!((sum / n as f64 - 2.0 / 3.0).abs() < 0.002);
    }

    #[test]
    fn empirical_cdf_sup_distance() {
        let n = 100_000;
        for law in [
            ServiceLaw::Exponential { mu: 1.5 },
            ServiceLaw::UniformMeanMatched { mu: 1.5 },
        ] {
            let mut s = RandomStream::new(3, 5);
            let mut xs: Vec<f64> = (0..n).map(|_| law.sample(&mut s)).collect();
            xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mut sup: f64 = 0.0;
            for (i, x) in xs.iter().enumerate() {
                let f = law.cdf(*x);
                let lo = i as f64 / n as f64;
                let hi = (i + 1) as f64 / n as f64;
                sup = sup.max((f - lo).abs()).max((f - hi).abs());
            }
            assert!(sup < 0.01, "{law:?} KS sup distance {sup}");
        }
    }

    #[test]
    fn stream_determinism_and_independence() {
        let mut a = RandomStream::new(99, 1);
        let mut b = RandomStream::new(99, 1);
        let mut c = RandomStream::new(99, 2);
        let xs: Vec<u64> = (0..64).map(|_| a.rng.next_u64()).collect();
        let ys: Vec<u64> = (0..64).map(|_| b.rng.next_u64()).collect();
        let zs: Vec<u64> = (0..64).map(|_| c.rng.next_u64()).collect();
        assert_eq!(xs, ys);
        assert_ne!(xs, zs);
    }

    #[test]
    fn law_name_round_trips() {
        for name in ["exp", "uniform", "det"] {
            assert_eq!(ServiceLaw::from_name(name, 1.0).unwrap().name(), name);
        }
        assert!(ServiceLaw::from_name("gamma", 1.0).is_err());
        assert!(ServiceLaw::from_name("exp", 0.0).is_err());
        assert!(DecisionLaw::from_name("periodic", 2.0).is_ok());
        assert!(DecisionLaw::from_name("det", 2.0).is_err());
    }
}
