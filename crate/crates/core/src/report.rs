//! Serializable views of results. Every real number is a decimal string
//! carrying the full precision it was computed at.

use rug::Float;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{AsymptoticPrediction, FitResult, FitTarget, GExponent};
use crate::error::{Error, Result};
use crate::hankel::{HankelResult, PartitionValue};
use crate::model::Phase;
use crate::orthopoly::{recurrence_r, NormSequence};
use crate::precision::decimal_digits;
use crate::scalar::float_decimal;
use crate::specfun::MomentFamily;

pub fn decimal(x: &Float) -> String {
    float_decimal(x, decimal_digits(x.prec()))
}

fn opt(x: &Option<Float>) -> Option<String> {
    x.as_ref().map(decimal)
}

/// Parses a decimal string produced by [`decimal`] at `bits`.
pub fn parse_decimal(s: &str, bits: u32) -> Result<Float> {
    Float::parse(s)
        .map(|v| Float::with_val(bits, v))
        .map_err(|e| Error::domain(format!("not a decimal number: {s:?} ({e})")))
}

pub fn family_name(f: MomentFamily) -> &'static str {
    match f {
        MomentFamily::DisorderedPhi => "disordered-phi",
        MomentFamily::FerroPhi => "ferroelectric-phi",
        MomentFamily::AfPhi => "antiferroelectric-phi",
        MomentFamily::FerroDiscrete => "ferroelectric-discrete",
        MomentFamily::AfDiscrete => "antiferroelectric-discrete",
        MomentFamily::CritFd => "critical-fd",
        MomentFamily::CritAfd => "critical-afd",
        MomentFamily::Custom => "custom",
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HankelReport {
    pub n: usize,
    pub tau: String,
    pub log_tau: String,
    pub precision_used: u32,
    pub verified: bool,
}

impl From<&HankelResult> for HankelReport {
    fn from(h: &HankelResult) -> Self {
        HankelReport {
            n: h.n,
            tau: decimal(&h.tau),
            log_tau: decimal(&h.log_tau),
            precision_used: h.precision_used,
            verified: h.verified,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionReport {
    pub n: usize,
    pub z: String,
    pub log_z: String,
    pub bits: u32,
}

impl From<&PartitionValue> for PartitionReport {
    fn from(v: &PartitionValue) -> Self {
        PartitionReport { n: v.n, z: decimal(&v.z), log_z: decimal(&v.log_z), bits: v.bits }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormsReport {
    pub family: String,
    pub phase: Option<Phase>,
    pub bits: u32,
    pub verified: bool,
    pub h: Vec<String>,
    /// `R_k = h_k / h_{k-1}` for `k >= 1`.
    pub r: Vec<String>,
}

impl From<&NormSequence> for NormsReport {
    fn from(ns: &NormSequence) -> Self {
        NormsReport {
            family: family_name(ns.family).to_string(),
            phase: ns.params.as_ref().map(|p| p.phase()),
            bits: ns.bits,
            verified: ns.verified,
            h: ns.norms.iter().map(decimal).collect(),
            r: recurrence_r(ns).iter().map(decimal).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredictionReport {
    pub phase: Phase,
    pub n: usize,
    #[serde(rename = "F")]
    pub f: String,
    pub kappa: Option<String>,
    #[serde(rename = "G")]
    pub g: Option<String>,
    pub g_exponent: Option<String>,
    #[serde(rename = "C")]
    pub c: Option<String>,
    pub theta_factor: Option<String>,
    pub omega: Option<String>,
    pub nome: Option<String>,
    pub log_prediction: String,
}

impl From<&AsymptoticPrediction> for PredictionReport {
    fn from(p: &AsymptoticPrediction) -> Self {
        PredictionReport {
            phase: p.phase,
            n: p.n,
            f: decimal(&p.f),
            kappa: opt(&p.kappa),
            g: opt(&p.g),
            g_exponent: p.g.as_ref().map(|_| {
                match p.g_exponent {
                    GExponent::N => "n",
                    GExponent::SqrtN => "sqrt_n",
                }
                .to_string()
            }),
            c: opt(&p.c),
            theta_factor: opt(&p.theta_factor),
            omega: opt(&p.omega),
            nome: opt(&p.nome),
            log_prediction: decimal(&p.log_prediction),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub n: usize,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    /// `log_F`, `kappa` or `log_C`.
    pub target: String,
    pub window: [usize; 2],
    pub per_n_estimates: Vec<EstimateReport>,
    pub extrapolated: String,
    pub residual_norm: String,
    pub intercept: Option<String>,
}

impl From<&FitResult> for FitReport {
    fn from(f: &FitResult) -> Self {
        FitReport {
            target: match f.target {
                FitTarget::F => "log_F",
                FitTarget::Kappa => "kappa",
                FitTarget::C => "log_C",
            }
            .to_string(),
            window: [f.window.lo, f.window.hi],
            per_n_estimates: f
                .per_n_estimates
                .iter()
                .map(|(n, v)| EstimateReport { n: *n, value: decimal(v) })
                .collect(),
            extrapolated: decimal(&f.extrapolated),
            residual_norm: decimal(&f.residual_norm),
            intercept: opt(&f.intercept),
        }
    }
}

/// One row of a computed-versus-predicted table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub n: usize,
    #[serde(rename = "Z_n")]
    pub z: String,
    #[serde(rename = "log_Zn")]
    pub log_zn: String,
    pub prediction: String,
    pub log_prediction: String,
    pub ratio: String,
}

/// Builds a row whose `ratio` is `exp(log_Zn - log_prediction)` evaluated
/// from the printed logarithms, so the table can be re-derived exactly from
/// its own cells.
pub fn compare_row(value: &PartitionValue, pred: &AsymptoticPrediction) -> Result<CompareRow> {
    let bits = value.bits.min(pred.log_prediction.prec());
    let log_zn = float_decimal(&value.log_z, decimal_digits(bits));
    let log_prediction = float_decimal(&pred.log_prediction, decimal_digits(bits));
    Ok(CompareRow {
        n: value.n,
        z: float_decimal(&value.z, decimal_digits(bits)),
        prediction: float_decimal(&pred.value(), decimal_digits(bits)),
        ratio: ratio_from_logs(&log_zn, &log_prediction, bits)?,
        log_zn,
        log_prediction,
    })
}

/// `exp(log_z - log_prediction)` from decimal strings, printed with the
/// digits that survive the subtraction.
pub fn ratio_from_logs(log_z: &str, log_prediction: &str, bits: u32) -> Result<String> {
    let diff = parse_decimal(log_z, bits)? - parse_decimal(log_prediction, bits)?;
    Ok(float_decimal(&diff.exp(), decimal_digits(bits).saturating_sub(10)))
}
