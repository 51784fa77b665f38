use rug::ops::Pow;
use rug::Float;

use crate::error::{Error, Result};
use crate::model::{Phase, PhaseParams};
use crate::precision::PrecisionContext;

use super::phi::phi_derivatives_at;
use super::polylog::EulerianNumbers;
use super::factorial;

/// Origin of a moment sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MomentFamily {
    /// `phi^(k)(t)` in the disordered phase: the moments of `e^{tx} m(x)`.
    DisorderedPhi,
    /// `phi^(k)(t)` in the ferroelectric phase.
    FerroPhi,
    /// `phi^(k)(t)` in the antiferroelectric phase.
    AfPhi,
    /// `sum_{l>=1} l^k (e^{-2(t-g)l} - e^{-2(t+g)l})`.
    FerroDiscrete,
    /// `sum_{l in Z} l^k e^{2tl - 2g|l|}`.
    AfDiscrete,
    /// `int_0^inf x^k (e^{-x} - e^{-rx}) dx`, `r = (alpha+1)/(alpha-1)`.
    CritFd,
    /// `int_R x^k w(x) dx`, `w = e^{-x}` for `x >= 0` and `e^{rx}` below,
    /// `r = (1+alpha)/(1-alpha)`.
    CritAfd,
    /// Caller-supplied values; cannot be regenerated at another precision.
    Custom,
}

impl MomentFamily {
    pub(crate) fn phi_family(phase: Phase) -> Result<Self> {
        match phase {
            Phase::Disordered => Ok(MomentFamily::DisorderedPhi),
            Phase::Ferroelectric => Ok(MomentFamily::FerroPhi),
            Phase::Antiferroelectric => Ok(MomentFamily::AfPhi),
            other => Err(Error::domain(format!("phi is not defined on the critical line {other}"))),
        }
    }

    /// The orthogonality-weight family of a phase: the Laplace weight of
    /// `phi` in the disordered phase, the discrete weights in the
    /// ferroelectric and antiferroelectric phases and the limiting weights
    /// on the critical lines.
    pub fn weight_family(phase: Phase) -> Self {
        match phase {
            Phase::Disordered => MomentFamily::DisorderedPhi,
            Phase::Ferroelectric => MomentFamily::FerroDiscrete,
            Phase::Antiferroelectric => MomentFamily::AfDiscrete,
            Phase::CriticalFd => MomentFamily::CritFd,
            Phase::CriticalAfd => MomentFamily::CritAfd,
        }
    }

    fn expected_phase(self) -> Option<Phase> {
        match self {
            MomentFamily::DisorderedPhi => Some(Phase::Disordered),
            MomentFamily::FerroPhi | MomentFamily::FerroDiscrete => Some(Phase::Ferroelectric),
            MomentFamily::AfPhi | MomentFamily::AfDiscrete => Some(Phase::Antiferroelectric),
            MomentFamily::CritFd => Some(Phase::CriticalFd),
            MomentFamily::CritAfd => Some(Phase::CriticalAfd),
            MomentFamily::Custom => None,
        }
    }

    /// True when the measure lives on a lattice scaled by 2 relative to the
    /// `phi` route, so that `tau_n = 2^(n^2) prod h_k`.
    pub fn is_discrete(self) -> bool {
        matches!(self, MomentFamily::FerroDiscrete | MomentFamily::AfDiscrete)
    }
}

/// `mu_0 .. mu_m` of one weight family at one parameter point.
#[derive(Clone, Debug)]
pub struct MomentSequence {
    family: MomentFamily,
    params: Option<PhaseParams>,
    values: Vec<Float>,
    bits: u32,
}

impl MomentSequence {
    pub(crate) fn from_parts(
        family: MomentFamily,
        params: Option<PhaseParams>,
        values: Vec<Float>,
        bits: u32,
    ) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InsufficientData("a moment sequence needs mu_0".into()));
        }
        if !(values[0].is_sign_positive() && !values[0].is_zero()) {
            return Err(Error::domain("mu_0 must be positive"));
        }
        Ok(MomentSequence { family, params, values, bits })
    }

    /// Moments `0..=kmax` of `family` at `params`.
    pub fn generate(family: MomentFamily, params: &PhaseParams, kmax: usize, ctx: &PrecisionContext) -> Result<Self> {
        let bits = ctx.bits();
        if family.expected_phase() != Some(params.phase()) {
            return Err(Error::domain(format!(
                "moment family {family:?} does not match parameters of phase {}",
                params.phase()
            )));
        }
        let values = match family {
            MomentFamily::DisorderedPhi | MomentFamily::FerroPhi | MomentFamily::AfPhi => {
                phi_derivatives_at(params, kmax, bits)?
            }
            MomentFamily::FerroDiscrete => {
                let (t, g) = params.t_gamma(bits + 32).unwrap();
                ferro_moments(kmax, &t, &g, bits)?
            }
            MomentFamily::AfDiscrete => {
                let (t, g) = params.t_gamma(bits + 32).unwrap();
                af_moments(kmax, &t, &g, bits)?
            }
            MomentFamily::CritFd => {
                let alpha = params.alpha(bits + 32).unwrap();
                (0..=kmax).map(|k| crit_fd_moment(k, &alpha, bits)).collect::<Result<_>>()?
            }
            MomentFamily::CritAfd => {
                let alpha = params.alpha(bits + 32).unwrap();
                (0..=kmax).map(|k| crit_afd_moment(k, &alpha, bits)).collect::<Result<_>>()?
            }
            MomentFamily::Custom => return Err(Error::domain("custom moments cannot be generated")),
        };
        Self::from_parts(family, Some(params.clone()), values, bits)
    }

    /// Orthogonality-weight moments of the phase of `params`.
    pub fn weight(params: &PhaseParams, kmax: usize, ctx: &PrecisionContext) -> Result<Self> {
        Self::generate(MomentFamily::weight_family(params.phase()), params, kmax, ctx)
    }

    /// Caller-supplied moments.
    pub fn custom(values: Vec<Float>) -> Result<Self> {
        let bits = values.iter().map(Float::prec).max().unwrap_or(crate::precision::MIN_BITS);
        Self::from_parts(MomentFamily::Custom, None, values, bits)
    }

    pub fn family(&self) -> MomentFamily {
        self.family
    }

    pub fn params(&self) -> Option<&PhaseParams> {
        self.params.as_ref()
    }

    pub fn values(&self) -> &[Float] {
        &self.values
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn max_order(&self) -> usize {
        self.values.len() - 1
    }

    /// The same sequence evaluated at another precision. Generated families
    /// are recomputed from their parameters; custom values are rounded.
    pub fn at_precision(&self, bits: u32) -> Result<Self> {
        match (&self.params, self.family) {
            (Some(p), family) if family != MomentFamily::Custom => {
                Self::generate(family, p, self.max_order(), &PrecisionContext::default().at_bits(bits))
            }
            _ => Ok(MomentSequence {
                family: self.family,
                params: None,
                values: self.values.iter().map(|v| Float::with_val(bits, v)).collect(),
                bits,
            }),
        }
    }

    /// The same family extended (or truncated) to `kmax`.
    pub fn with_order(&self, kmax: usize, bits: u32) -> Result<Self> {
        match (&self.params, self.family) {
            (Some(p), family) if family != MomentFamily::Custom => {
                Self::generate(family, p, kmax, &PrecisionContext::default().at_bits(bits))
            }
            _ if kmax <= self.max_order() => Ok(MomentSequence {
                family: self.family,
                params: None,
                values: self.values[..=kmax].iter().map(|v| Float::with_val(bits, v)).collect(),
                bits,
            }),
            _ => Err(Error::InsufficientData(format!(
                "custom moments provide orders up to {}, {kmax} requested",
                self.max_order()
            ))),
        }
    }
}

fn check_ferro(t: &Float, gamma: &Float) -> Result<()> {
    if !(*gamma > 0 && t > gamma) {
        return Err(Error::domain("ferroelectric moments need t > gamma > 0"));
    }
    Ok(())
}

fn check_af(t: &Float, gamma: &Float) -> Result<()> {
    if !(*gamma > 0 && Float::with_val(t.prec(), t.abs_ref()) < *gamma) {
        return Err(Error::domain("antiferroelectric moments need |t| < gamma"));
    }
    Ok(())
}

fn exp_of(bits: u32, x: Float) -> Float {
    Float::with_val(bits, x.exp())
}

fn ferro_moments(kmax: usize, t: &Float, gamma: &Float, bits: u32) -> Result<Vec<Float>> {
    check_ferro(t, gamma)?;
    let work = bits + 32;
    let q1 = exp_of(work, Float::with_val(work, gamma - t) * 2u32);
    let q2 = exp_of(work, -Float::with_val(work, t + gamma) * 2u32);
    let table = EulerianNumbers::up_to(kmax);
    (0..=kmax)
        .map(|k| Ok(Float::with_val(bits, table.polylog(k, &q1)? - table.polylog(k, &q2)?)))
        .collect()
}

fn af_moments(kmax: usize, t: &Float, gamma: &Float, bits: u32) -> Result<Vec<Float>> {
    check_af(t, gamma)?;
    let work = bits + 32;
    let q_plus = exp_of(work, Float::with_val(work, t - gamma) * 2u32);
    let q_minus = exp_of(work, -Float::with_val(work, t + gamma) * 2u32);
    let table = EulerianNumbers::up_to(kmax);
    (0..=kmax)
        .map(|k| {
            let pos = table.polylog(k, &q_plus)?;
            let neg = table.polylog(k, &q_minus)?;
            let mut v = if k % 2 == 0 { pos + neg } else { pos - neg };
            if k == 0 {
                v += 1u32;
            }
            Ok(Float::with_val(bits, v))
        })
        .collect()
}

/// `sum_{l>=1} l^k 2 e^{-2tl} sinh(2 gamma l) = Li_{-k}(q1) - Li_{-k}(q2)`
/// with `q1 = e^{-2(t-gamma)}`, `q2 = e^{-2(t+gamma)}`.
pub fn ferro_moment(k: usize, t: &Float, gamma: &Float, bits: u32) -> Result<Float> {
    Ok(ferro_moments(k, t, gamma, bits)?.pop().unwrap())
}

/// `sum_{l in Z} l^k e^{2tl - 2 gamma |l|}
///  = [k = 0] + Li_{-k}(q+) + (-1)^k Li_{-k}(q-)`
/// with `q+ = e^{2(t-gamma)}`, `q- = e^{-2(t+gamma)}`.
pub fn af_moment(k: usize, t: &Float, gamma: &Float, bits: u32) -> Result<Float> {
    Ok(af_moments(k, t, gamma, bits)?.pop().unwrap())
}

/// `k! (1 - r^{-(k+1)})`, `r = (alpha + 1)/(alpha - 1)`.
pub fn crit_fd_moment(k: usize, alpha: &Float, bits: u32) -> Result<Float> {
    if *alpha <= 1 {
        return Err(Error::domain("critical-fd moments need alpha > 1"));
    }
    let work = bits + 32;
    let r = Float::with_val(work, alpha + 1u32) / Float::with_val(work, alpha - 1u32);
    let k32 = u32::try_from(k).map_err(|_| Error::domain("moment order too large"))?;
    let tail = Float::with_val(work, r.pow(k32 + 1)).recip();
    Ok(Float::with_val(bits, (1u32 - tail) * factorial(k32)))
}

/// `k! (1 + (-1)^k r^{-(k+1)})`, `r = (1 + alpha)/(1 - alpha)`.
pub fn crit_afd_moment(k: usize, alpha: &Float, bits: u32) -> Result<Float> {
    if *alpha <= -1 || *alpha >= 1 {
        return Err(Error::domain("critical-afd moments need -1 < alpha < 1"));
    }
    let work = bits + 32;
    let r = Float::with_val(work, 1u32 + alpha) / Float::with_val(work, 1u32 - alpha);
    let k32 = u32::try_from(k).map_err(|_| Error::domain("moment order too large"))?;
    let tail = Float::with_val(work, r.pow(k32 + 1)).recip();
    let v = if k.is_multiple_of(2) { 1u32 + tail } else { 1u32 - tail };
    Ok(Float::with_val(bits, v * factorial(k32)))
}
