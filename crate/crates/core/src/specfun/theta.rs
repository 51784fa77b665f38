use rug::Float;

use crate::error::{Error, Result};

/// Nomes at or above this value are rejected rather than transformed.
pub const MAX_NOME: f64 = 0.9;

fn check_nome(q: &Float) -> Result<()> {
    if q.is_nan() || *q < 0 || *q >= MAX_NOME {
        return Err(Error::domain(format!("theta nome must satisfy 0 <= q < {MAX_NOME}, got {}", q.to_f64())));
    }
    Ok(())
}

/// Truncation: stop once the term bound falls below `2^(-bits-8)` of the
/// partial sum, or below `2^(-2 bits)` of the first term when the sum
/// itself vanishes.
fn converged(bound: &Float, sum: &Float, first: &Float, bits: u32) -> bool {
    let rel = -i32::try_from(bits + 8).unwrap_or(i32::MAX);
    let abs = -i32::try_from(2 * bits).unwrap_or(i32::MAX);
    let rel_limit = Float::with_val(bits, sum.abs_ref()) * Float::with_val(bits, Float::i_exp(1, rel));
    let abs_limit = Float::with_val(bits, first * Float::with_val(bits, Float::i_exp(1, abs)));
    *bound <= rel_limit || *bound <= abs_limit
}

/// `q^((k + 1/2)^2)` for `k = 0, 1, ...`, computed as `exp((k+1/2)^2 ln q)`.
fn half_integer_powers(q: &Float, bits: u32) -> impl Iterator<Item = Float> {
    let ln_q = Float::with_val(bits, q.ln_ref());
    (0u64..).map(move |k| {
        let e = Float::with_val(bits, k as f64 + 0.5).square();
        Float::with_val(bits, &ln_q * e).exp()
    })
}

/// `theta_1(z, q) = 2 sum_{k>=0} (-1)^k q^((k+1/2)^2) sin((2k+1) z)`.
pub fn theta1(z: &Float, q: &Float, bits: u32) -> Result<Float> {
    check_nome(q)?;
    if q.is_zero() {
        return Ok(Float::with_val(bits, 0));
    }
    let z = Float::with_val(bits, z);
    let mut sum = Float::with_val(bits, 0);
    let mut first = None;
    for (k, qk) in half_integer_powers(q, bits).enumerate() {
        let bound = Float::with_val(bits, &qk * 2u32);
        let first = first.get_or_insert_with(|| bound.clone());
        let arg = Float::with_val(bits, &z * (2 * k as u64 + 1));
        let term = bound.clone() * arg.sin();
        if k % 2 == 0 {
            sum += &term;
        } else {
            sum -= &term;
        }
        if converged(&bound, &sum, first, bits) {
            break;
        }
    }
    Ok(sum)
}

/// `theta_1'(0, q) = 2 sum_{k>=0} (-1)^k (2k+1) q^((k+1/2)^2)`.
pub fn theta1_prime0(q: &Float, bits: u32) -> Result<Float> {
    check_nome(q)?;
    if q.is_zero() {
        return Ok(Float::with_val(bits, 0));
    }
    let mut sum = Float::with_val(bits, 0);
    let mut first = None;
    for (k, qk) in half_integer_powers(q, bits).enumerate() {
        let term = Float::with_val(bits, &qk * (2 * (2 * k as u64 + 1)));
        let first = first.get_or_insert_with(|| term.clone());
        if k % 2 == 0 {
            sum += &term;
        } else {
            sum -= &term;
        }
        if converged(&term, &sum, first, bits) {
            break;
        }
    }
    Ok(sum)
}

/// `theta_4(z, q) = 1 + 2 sum_{k>=1} (-1)^k q^(k^2) cos(2kz)`.
pub fn theta4(z: &Float, q: &Float, bits: u32) -> Result<Float> {
    check_nome(q)?;
    let mut sum = Float::with_val(bits, 1);
    if q.is_zero() {
        return Ok(sum);
    }
    let z = Float::with_val(bits, z);
    let one = Float::with_val(bits, 1);
    let ln_q = Float::with_val(bits, q.ln_ref());
    for k in 1u64.. {
        let bound = Float::with_val(bits, &ln_q * (k * k)).exp() * 2u32;
        let arg = Float::with_val(bits, &z * (2 * k));
        let term = bound.clone() * arg.cos();
        if k % 2 == 1 {
            sum -= &term;
        } else {
            sum += &term;
        }
        if converged(&bound, &sum, &one, bits) {
            break;
        }
    }
    Ok(sum)
}
