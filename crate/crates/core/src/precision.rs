use rug::Float;

use crate::error::{Error, Result};

/// Working precision for multiprecision evaluations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrecisionContext {
    bits: u32,
    verify_factor: u32,
}

pub const MIN_BITS: u32 = 64;
pub const DEFAULT_BITS: u32 = 256;

impl Default for PrecisionContext {
    fn default() -> Self {
        PrecisionContext { bits: DEFAULT_BITS, verify_factor: 2 }
    }
}

impl PrecisionContext {
    pub fn new(bits: u32) -> Result<Self> {
        Self::with_verify_factor(bits, 2)
    }

    pub fn with_verify_factor(bits: u32, verify_factor: u32) -> Result<Self> {
        if bits < MIN_BITS {
            return Err(Error::domain(format!("bits >= {MIN_BITS} required, got {bits}")));
        }
        if verify_factor < 2 {
            return Err(Error::domain(format!("verify_factor >= 2 required, got {verify_factor}")));
        }
        Ok(PrecisionContext { bits, verify_factor })
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn verify_factor(&self) -> u32 {
        self.verify_factor
    }

    pub fn verify_bits(&self) -> u32 {
        self.bits * self.verify_factor
    }

    /// Same verify factor, different working precision.
    pub fn at_bits(&self, bits: u32) -> Self {
        PrecisionContext { bits: bits.max(MIN_BITS), verify_factor: self.verify_factor }
    }

    /// Precision policy for an `n x n` Hankel determinant: `max(bits, 24 n)`.
    pub fn for_hankel(&self, n: usize) -> Self {
        let policy = u32::try_from(24 * n).unwrap_or(u32::MAX);
        self.at_bits(self.bits.max(policy))
    }

    /// Relative tolerance `2^(-bits/2)` used for verification and for the
    /// critical-line tie rule.
    pub fn half_precision_tolerance(&self) -> Float {
        let exp = -i32::try_from(self.bits / 2).unwrap_or(i32::MAX);
        Float::with_val(self.bits, Float::i_exp(1, exp))
    }

    /// Number of decimal digits that represent `bits` binary digits.
    pub fn decimal_digits(&self) -> usize {
        decimal_digits(self.bits)
    }
}

pub fn decimal_digits(bits: u32) -> usize {
    (f64::from(bits) * std::f64::consts::LOG10_2).ceil() as usize
}

/// `|a - b| / max(|a|, |b|)` evaluated at the precision of `a`.
pub fn relative_difference(a: &Float, b: &Float) -> Float {
    let prec = a.prec().max(b.prec());
    let diff = Float::with_val(prec, a - b).abs();
    let scale = Float::with_val(prec, a.abs_ref()).max(&Float::with_val(prec, b.abs_ref()));
    if scale.is_zero() {
        return Float::with_val(prec, 0);
    }
    diff / scale
}

/// Compares a primary result against its verification rerun.
pub(crate) fn check_agreement(
    what: &str,
    primary: &Float,
    verify: &Float,
    ctx: &PrecisionContext,
) -> Result<()> {
    let rel = relative_difference(primary, verify);
    let allowed = ctx.half_precision_tolerance();
    if rel.is_nan() || rel > allowed {
        return Err(Error::Precision {
            what: what.to_string(),
            bits: ctx.bits(),
            verify_bits: ctx.verify_bits(),
            rel_diff: rel.to_f64(),
            allowed: allowed.to_f64(),
        });
    }
    Ok(())
}
