//! Vertex weights, the anisotropy parameter and the phase diagram.

use std::fmt;

use rug::float::Constant;
use rug::{Float, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::precision::PrecisionContext;
use crate::scalar::Scalar;

/// The common weights `a = w1 = w2`, `b = w3 = w4`, `c = w5 = w6`.
#[derive(Clone, Debug, PartialEq)]
pub struct Weights<T> {
    a: T,
    b: T,
    c: T,
}

impl<T: Scalar> Weights<T> {
    pub fn new(a: T, b: T, c: T) -> Result<Self> {
        for (name, value) in [("a", &a), ("b", &b), ("c", &c)] {
            if !value.is_positive() {
                return Err(Error::domain(format!("weight {name} must be > 0, got {value:?}")));
            }
        }
        Ok(Weights { a, b, c })
    }

    pub fn a(&self) -> &T {
        &self.a
    }

    pub fn b(&self) -> &T {
        &self.b
    }

    pub fn c(&self) -> &T {
        &self.c
    }

    /// `Delta = (a^2 + b^2 - c^2) / (2ab)`.
    pub fn delta(&self) -> T {
        let a2 = self.a.mul_ref(&self.a);
        let b2 = self.b.mul_ref(&self.b);
        let c2 = self.c.mul_ref(&self.c);
        let num = a2.add_ref(&b2).sub_ref(&c2);
        let two_ab = self.a.mul_ref(&self.b).mul_ref(&self.a.u64_like(2));
        num.div_ref(&two_ab)
    }

    /// Phase of the weights. Float inputs treat `|Delta -/+ 1|` below the
    /// relative tolerance `2^(-bits/2)` as critical; rationals compare exactly.
    pub fn classify(&self, ctx: &PrecisionContext) -> PhaseClass<T> {
        let delta = self.delta();
        let one = delta.one_like();
        let minus_one = delta.zero_like().sub_ref(&one);
        let tol_bits = ctx.bits() / 2;
        let (phase, borderline) = if delta.approx_eq(&one, tol_bits) {
            (Phase::CriticalFd, delta.sub_ref(&one).as_rational().is_none_or(|r| r != 0))
        } else if delta.approx_eq(&minus_one, tol_bits) {
            (Phase::CriticalAfd, delta.sub_ref(&minus_one).as_rational().is_none_or(|r| r != 0))
        } else if delta.sub_ref(&one).is_positive() {
            (Phase::Ferroelectric, false)
        } else if minus_one.sub_ref(&delta).is_positive() {
            (Phase::Antiferroelectric, false)
        } else {
            (Phase::Disordered, false)
        };
        PhaseClass { phase, delta, borderline }
    }

    /// `(a/c, b/c, 1)` together with the scale `c`, so that
    /// `Z_n(a, b, c) = c^(n^2) Z_n(a/c, b/c, 1)`.
    pub fn normalize(&self) -> (Weights<T>, T) {
        let normalized = Weights {
            a: self.a.div_ref(&self.c),
            b: self.b.div_ref(&self.c),
            c: self.c.one_like(),
        };
        (normalized, self.c.clone())
    }

    /// Exchanges `a` and `b`. `Z_n` is invariant; this maps the `a > b + c`
    /// ferroelectric branch onto the parameterized `b > a + c` branch.
    pub fn swap_ab(&self) -> Weights<T> {
        Weights { a: self.b.clone(), b: self.a.clone(), c: self.c.clone() }
    }

    pub fn scaled(&self, factor: &T) -> Result<Weights<T>> {
        Weights::new(self.a.mul_ref(factor), self.b.mul_ref(factor), self.c.mul_ref(factor))
    }
}

impl Weights<Rational> {
    pub fn from_ints(a: i64, b: i64, c: i64) -> Result<Self> {
        Weights::new(Rational::from(a), Rational::from(b), Rational::from(c))
    }

    pub fn to_float(&self, bits: u32) -> Weights<Float> {
        Weights {
            a: Float::with_val(bits, &self.a),
            b: Float::with_val(bits, &self.b),
            c: Float::with_val(bits, &self.c),
        }
    }
}

impl Weights<Float> {
    pub fn from_f64(a: f64, b: f64, c: f64, bits: u32) -> Result<Self> {
        Weights::new(Float::with_val(bits, a), Float::with_val(bits, b), Float::with_val(bits, c))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Phase {
    Disordered,
    Ferroelectric,
    Antiferroelectric,
    CriticalFd,
    CriticalAfd,
}

impl Phase {
    pub fn is_critical(self) -> bool {
        matches!(self, Phase::CriticalFd | Phase::CriticalAfd)
    }

    pub fn name(self) -> &'static str {
        match self {
            Phase::Disordered => "disordered",
            Phase::Ferroelectric => "ferroelectric",
            Phase::Antiferroelectric => "antiferroelectric",
            Phase::CriticalFd => "critical-fd",
            Phase::CriticalAfd => "critical-afd",
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug)]
pub struct PhaseClass<T> {
    pub phase: Phase,
    pub delta: T,
    /// Set when a float input was classified critical by tolerance rather
    /// than exact equality.
    pub borderline: bool,
}

/// A validated point of one of the phase parameterizations.
///
/// Values are stored as given (any precision) and rounded to the working
/// precision of each evaluation, so reruns at higher precision see the same
/// parameter point.
#[derive(Clone, Debug, PartialEq)]
pub enum PhaseParams {
    /// `a = sin(gamma - t)`, `b = sin(gamma + t)`, `c = sin(2 gamma)`.
    Disordered { t: Float, gamma: Float },
    /// `a = sinh(t - gamma)`, `b = sinh(t + gamma)`, `c = sinh(2 gamma)`.
    Ferroelectric { t: Float, gamma: Float },
    /// `a = sinh(gamma - t)`, `b = sinh(gamma + t)`, `c = sinh(2 gamma)`.
    Antiferroelectric { t: Float, gamma: Float },
    /// `a/c = (alpha - 1)/2`, `b/c = (alpha + 1)/2`.
    CriticalFd { alpha: Float },
    /// `a/c = (1 - alpha)/2`, `b/c = (1 + alpha)/2`.
    CriticalAfd { alpha: Float },
}

impl PhaseParams {
    pub fn new(phase: Phase, t: Option<Float>, gamma: Option<Float>, alpha: Option<Float>) -> Result<Self> {
        let need = |v: Option<Float>, name: &str| {
            v.ok_or_else(|| Error::domain(format!("phase {phase} requires {name}")))
        };
        if phase.is_critical() {
            if t.is_some() || gamma.is_some() {
                return Err(Error::domain(format!("phase {phase} takes alpha only, not t/gamma")));
            }
            let alpha = need(alpha, "alpha")?;
            return match phase {
                Phase::CriticalFd => Self::critical_fd(alpha),
                _ => Self::critical_afd(alpha),
            };
        }
        if alpha.is_some() {
            return Err(Error::domain(format!("phase {phase} takes t and gamma, not alpha")));
        }
        let t = need(t, "t")?;
        let gamma = need(gamma, "gamma")?;
        match phase {
            Phase::Disordered => Self::disordered(t, gamma),
            Phase::Ferroelectric => Self::ferroelectric(t, gamma),
            _ => Self::antiferroelectric(t, gamma),
        }
    }

    pub fn disordered(t: Float, gamma: Float) -> Result<Self> {
        if !(gamma.is_sign_positive() && !gamma.is_zero()) {
            return Err(Error::domain("disordered: 0 < gamma violated"));
        }
        let half_pi = Float::with_val(gamma.prec() + 16, Constant::Pi) / 2u32;
        if gamma >= half_pi {
            return Err(Error::domain("disordered: gamma < pi/2 violated"));
        }
        if t.clone().abs() >= gamma {
            return Err(Error::domain("disordered: |t| < gamma violated"));
        }
        Ok(PhaseParams::Disordered { t, gamma })
    }

    pub fn ferroelectric(t: Float, gamma: Float) -> Result<Self> {
        if !(gamma.is_sign_positive() && !gamma.is_zero()) {
            return Err(Error::domain("ferroelectric: 0 < gamma violated (swap a and b for the other branch)"));
        }
        if gamma >= t {
            return Err(Error::domain("ferroelectric: gamma < t violated"));
        }
        Ok(PhaseParams::Ferroelectric { t, gamma })
    }

    pub fn antiferroelectric(t: Float, gamma: Float) -> Result<Self> {
        if !(gamma.is_sign_positive() && !gamma.is_zero()) {
            return Err(Error::domain("antiferroelectric: gamma > 0 violated"));
        }
        if t.clone().abs() >= gamma {
            return Err(Error::domain("antiferroelectric: |t| < gamma violated"));
        }
        Ok(PhaseParams::Antiferroelectric { t, gamma })
    }

    pub fn critical_fd(alpha: Float) -> Result<Self> {
        if alpha <= 1 {
            return Err(Error::domain("critical-fd: alpha > 1 violated"));
        }
        Ok(PhaseParams::CriticalFd { alpha })
    }

    pub fn critical_afd(alpha: Float) -> Result<Self> {
        if alpha <= -1 || alpha >= 1 {
            return Err(Error::domain("critical-afd: -1 < alpha < 1 violated"));
        }
        Ok(PhaseParams::CriticalAfd { alpha })
    }

    /// Convenience constructor from doubles (exactly representable inputs).
    pub fn from_f64(phase: Phase, t: f64, gamma: f64) -> Result<Self> {
        let f = |x: f64| Float::with_val(64, x);
        if phase.is_critical() {
            return PhaseParams::new(phase, None, None, Some(f(t)));
        }
        PhaseParams::new(phase, Some(f(t)), Some(f(gamma)), None)
    }

    pub fn phase(&self) -> Phase {
        match self {
            PhaseParams::Disordered { .. } => Phase::Disordered,
            PhaseParams::Ferroelectric { .. } => Phase::Ferroelectric,
            PhaseParams::Antiferroelectric { .. } => Phase::Antiferroelectric,
            PhaseParams::CriticalFd { .. } => Phase::CriticalFd,
            PhaseParams::CriticalAfd { .. } => Phase::CriticalAfd,
        }
    }

    /// `(t, gamma)` rounded to `bits`; `None` on the critical lines.
    pub fn t_gamma(&self, bits: u32) -> Option<(Float, Float)> {
        match self {
            PhaseParams::Disordered { t, gamma }
            | PhaseParams::Ferroelectric { t, gamma }
            | PhaseParams::Antiferroelectric { t, gamma } => {
                Some((Float::with_val(bits, t), Float::with_val(bits, gamma)))
            }
            _ => None,
        }
    }

    pub fn alpha(&self, bits: u32) -> Option<Float> {
        match self {
            PhaseParams::CriticalFd { alpha } | PhaseParams::CriticalAfd { alpha } => {
                Some(Float::with_val(bits, alpha))
            }
            _ => None,
        }
    }

    /// The same phase at a different `t`, revalidated.
    pub fn with_t(&self, t: Float) -> Result<Self> {
        match self {
            PhaseParams::Disordered { gamma, .. } => Self::disordered(t, gamma.clone()),
            PhaseParams::Ferroelectric { gamma, .. } => Self::ferroelectric(t, gamma.clone()),
            PhaseParams::Antiferroelectric { gamma, .. } => Self::antiferroelectric(t, gamma.clone()),
            _ => Err(Error::domain("critical phases have no t parameter")),
        }
    }

    pub(crate) fn require_noncritical(&self, what: &str) -> Result<(Phase, Float, Float)> {
        let phase = self.phase();
        match self {
            PhaseParams::Disordered { t, gamma }
            | PhaseParams::Ferroelectric { t, gamma }
            | PhaseParams::Antiferroelectric { t, gamma } => Ok((phase, t.clone(), gamma.clone())),
            _ => Err(Error::domain(format!("{what} is not defined on the critical line {phase}"))),
        }
    }

    /// The `(a, b, c)` triple of the phase parameterization. On the
    /// critical lines this is the normalized point with `c = 1`.
    pub fn weights(&self, ctx: &PrecisionContext) -> Weights<Float> {
        let bits = ctx.bits();
        match self {
            PhaseParams::Disordered { .. } => {
                let (t, g) = self.t_gamma(bits).unwrap();
                Weights {
                    a: Float::with_val(bits, &g - &t).sin(),
                    b: Float::with_val(bits, &g + &t).sin(),
                    c: Float::with_val(bits, &g * 2u32).sin(),
                }
            }
            PhaseParams::Ferroelectric { .. } => {
                let (t, g) = self.t_gamma(bits).unwrap();
                Weights {
                    a: Float::with_val(bits, &t - &g).sinh(),
                    b: Float::with_val(bits, &t + &g).sinh(),
                    c: Float::with_val(bits, &g * 2u32).sinh(),
                }
            }
            PhaseParams::Antiferroelectric { .. } => {
                let (t, g) = self.t_gamma(bits).unwrap();
                Weights {
                    a: Float::with_val(bits, &g - &t).sinh(),
                    b: Float::with_val(bits, &g + &t).sinh(),
                    c: Float::with_val(bits, &g * 2u32).sinh(),
                }
            }
            PhaseParams::CriticalFd { .. } => {
                let alpha = self.alpha(bits).unwrap();
                Weights {
                    a: Float::with_val(bits, &alpha - 1u32) / 2u32,
                    b: Float::with_val(bits, &alpha + 1u32) / 2u32,
                    c: Float::with_val(bits, 1),
                }
            }
            PhaseParams::CriticalAfd { .. } => {
                let alpha = self.alpha(bits).unwrap();
                Weights {
                    a: Float::with_val(bits, 1u32 - &alpha) / 2u32,
                    b: Float::with_val(bits, 1u32 + &alpha) / 2u32,
                    c: Float::with_val(bits, 1),
                }
            }
        }
    }
}

/// Parameterized weights; rejects nothing beyond the constructors' checks.
pub fn weights_from_params(p: &PhaseParams, ctx: &PrecisionContext) -> Weights<Float> {
    p.weights(ctx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    fn pi(bits: u32) -> Float {
        Float::with_val(bits, Constant::Pi)
    }

    #[test]
    fn delta_examples() {
        let w = Weights::from_ints(1, 1, 1).unwrap();
        assert_eq!(w.delta(), Rational::from((1, 2)));

        let sqrt2 = Float::with_val(256, 2).sqrt();
        let w = Weights::new(Float::with_val(256, 1), Float::with_val(256, 1), sqrt2).unwrap();
        assert!(w.delta().abs() < 1e-70);

        let s = |x: u32| Float::with_val(256, x).sinh();
        let w = Weights::new(s(1), s(3), s(2)).unwrap();
        let cosh2 = Float::with_val(256, 2).cosh();
        assert!(w.delta().approx_eq(&cosh2, 240));
        assert!((w.delta().to_f64() - 3.7622).abs() < 1e-4);
    }

    #[test]
    fn classify_examples() {
        let c = |a: (i64, i64), b: (i64, i64), c: (i64, i64)| {
            Weights::new(Rational::from(a), Rational::from(b), Rational::from(c)).unwrap().classify(&ctx()).phase
        };
        assert_eq!(c((1, 1), (1, 1), (1, 1)), Phase::Disordered);
        assert_eq!(c((1, 1), (5, 2), (1, 1)), Phase::Ferroelectric);
        assert_eq!(c((3, 10), (3, 10), (1, 1)), Phase::Antiferroelectric);
        assert_eq!(c((1, 1), (2, 1), (1, 1)), Phase::CriticalFd);
        assert_eq!(c((1, 2), (1, 2), (1, 1)), Phase::CriticalAfd);
    }

    #[test]
    fn float_critical_tie_rule() {
        let bits = 128;
        let tiny = Float::with_val(bits, Float::i_exp(1, -100));
        let b = Float::with_val(bits, 2) + &tiny;
        let w = Weights::new(Float::with_val(bits, 1), b, Float::with_val(bits, 1)).unwrap();
        let class = w.classify(&ctx().at_bits(bits));
        assert_eq!(class.phase, Phase::CriticalFd);
        assert!(class.borderline);

        let exact = Weights::from_f64(1.0, 2.0, 1.0, bits).unwrap().classify(&ctx().at_bits(bits));
        assert_eq!(exact.phase, Phase::CriticalFd);
        assert!(!exact.borderline);
    }

    #[test]
    fn weights_from_params_examples() {
        let bits = 256;
        let p = PhaseParams::disordered(Float::with_val(bits, 0), pi(bits) / 3u32).unwrap();
        let w = weights_from_params(&p, &ctx());
        let half_sqrt3 = Float::with_val(bits, 3).sqrt() / 2u32;
        for x in [w.a(), w.b(), w.c()] {
            assert!(x.approx_eq(&half_sqrt3, 240));
        }

        let p = PhaseParams::from_f64(Phase::Ferroelectric, 2.0, 1.0).unwrap();
        let w = weights_from_params(&p, &ctx());
        assert!(w.a().approx_eq(&Float::with_val(bits, 1).sinh(), 250));
        assert!(w.b().approx_eq(&Float::with_val(bits, 3).sinh(), 250));
        assert!(w.c().approx_eq(&Float::with_val(bits, 2).sinh(), 250));

        let p = PhaseParams::antiferroelectric(Float::with_val(bits, 0.3), Float::with_val(bits, 1)).unwrap();
        let w = weights_from_params(&p, &ctx());
        let t = Float::with_val(bits, 0.3);
        assert!(w.a().approx_eq(&Float::with_val(bits, 1 - t.clone()).sinh(), 250));
        assert!(w.b().approx_eq(&Float::with_val(bits, 1 + t).sinh(), 250));
    }

    #[test]
    fn domain_violations_name_the_inequality() {
        let err = PhaseParams::from_f64(Phase::Disordered, 1.0, 0.5).unwrap_err();
        assert!(err.to_string().contains("|t| < gamma"));
        let err = PhaseParams::from_f64(Phase::Disordered, 0.0, 1.6).unwrap_err();
        assert!(err.to_string().contains("pi/2"));
        let err = PhaseParams::from_f64(Phase::Ferroelectric, 0.5, 1.0).unwrap_err();
        assert!(err.to_string().contains("gamma < t"));
        let err = PhaseParams::from_f64(Phase::Antiferroelectric, 0.0, -1.0).unwrap_err();
        assert!(err.to_string().contains("gamma > 0"));
        assert!(PhaseParams::from_f64(Phase::CriticalFd, 1.0, 0.0).is_err());
        assert!(PhaseParams::from_f64(Phase::CriticalAfd, 1.0, 0.0).is_err());
        assert!(PhaseParams::new(Phase::CriticalFd, Some(Float::with_val(64, 1)), None, Some(Float::with_val(64, 3))).is_err());
        assert!(PhaseParams::new(Phase::Disordered, None, Some(Float::with_val(64, 1)), None).is_err());
    }

    #[test]
    fn normalize_examples() {
        let w = Weights::from_ints(2, 3, 4).unwrap();
        let (n, scale) = w.normalize();
        assert_eq!(n, Weights::new(Rational::from((1, 2)), Rational::from((3, 4)), Rational::from(1)).unwrap());
        assert_eq!(scale, 4);
        let (n, scale) = Weights::from_ints(1, 1, 1).unwrap().normalize();
        assert_eq!(n, Weights::from_ints(1, 1, 1).unwrap());
        assert_eq!(scale, 1);
    }

    #[test]
    fn rejects_nonpositive_weights() {
        assert!(Weights::from_ints(0, 1, 1).is_err());
        assert!(Weights::from_ints(1, -1, 1).is_err());
    }

    #[test]
    fn critical_points_sit_on_their_lines() {
        let p = PhaseParams::from_f64(Phase::CriticalFd, 3.0, 0.0).unwrap();
        let w = p.weights(&ctx());
        assert_eq!(w.classify(&ctx()).phase, Phase::CriticalFd);
        let p = PhaseParams::from_f64(Phase::CriticalAfd, 0.25, 0.0).unwrap();
        let w = p.weights(&ctx());
        assert_eq!(w.classify(&ctx()).phase, Phase::CriticalAfd);
    }
}
