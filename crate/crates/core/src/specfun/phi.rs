use rug::{Float, Integer};

use crate::error::{Error, Result};
use crate::model::{Phase, PhaseParams};
use crate::precision::PrecisionContext;

use super::moments::{MomentFamily, MomentSequence};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrigKind {
    /// `cot u`, with `d/du cot u = -(1 + cot^2 u)`.
    Cot,
    /// `coth u`, with `d/du coth u = 1 - coth^2 u`.
    Coth,
}

/// Integer coefficients (lowest degree first) of the polynomial `P_k` with
/// `d^k/du^k f(u) = P_k(f(u))` for `f = cot` or `coth`.
pub fn derivative_polynomial(kind: TrigKind, k: usize) -> Vec<Integer> {
    derivative_polynomials(kind, k).pop().unwrap()
}

/// `P_0 .. P_kmax`, generated by `P_{k+1} = s (1 + sigma x^2) P_k'`.
fn derivative_polynomials(kind: TrigKind, kmax: usize) -> Vec<Vec<Integer>> {
    let (s, sigma): (i64, i64) = match kind {
        TrigKind::Cot => (-1, 1),
        TrigKind::Coth => (1, -1),
    };
    let mut polys = Vec::with_capacity(kmax + 1);
    polys.push(vec![Integer::new(), Integer::from(1)]);
    for k in 0..kmax {
        let p = &polys[k];
        let deriv: Vec<Integer> = p.iter().enumerate().skip(1).map(|(i, c)| Integer::from(c * i as u64)).collect();
        let mut next = vec![Integer::new(); deriv.len() + 2];
        for (i, c) in deriv.iter().enumerate() {
            next[i] += Integer::from(c * s);
            next[i + 2] += Integer::from(c * (s * sigma));
        }
        while next.len() > 1 && next.last().is_some_and(|c| *c == 0) {
            next.pop();
        }
        polys.push(next);
    }
    polys
}

fn horner(coeffs: &[Integer], x: &Float) -> Float {
    let mut acc = Float::with_val(x.prec(), 0);
    for c in coeffs.iter().rev() {
        acc *= x;
        acc += c;
    }
    acc
}

fn check_pole(phase: Phase, t: &Float, gamma: &Float) -> Result<()> {
    let at_pole = match phase {
        Phase::Disordered | Phase::Antiferroelectric | Phase::Ferroelectric => {
            Float::with_val(t.prec(), t - gamma).is_zero() || Float::with_val(t.prec(), t + gamma).is_zero()
        }
        _ => false,
    };
    if at_pole {
        return Err(Error::domain(format!("phi has a pole at t = +/-gamma ({phase})")));
    }
    Ok(())
}

/// `phi(t) = c / (ab)` for the parameterized weights of a non-critical phase.
pub fn phi(p: &PhaseParams, ctx: &PrecisionContext) -> Result<Float> {
    let (phase, _, _) = p.require_noncritical("phi")?;
    let bits = ctx.bits();
    let (t, g) = p.t_gamma(bits).unwrap();
    check_pole(phase, &t, &g)?;
    let two_g = Float::with_val(bits, &g * 2u32);
    let value = match phase {
        Phase::Disordered => {
            two_g.sin() / (Float::with_val(bits, &g - &t).sin() * Float::with_val(bits, &g + &t).sin())
        }
        Phase::Ferroelectric => {
            two_g.sinh() / (Float::with_val(bits, &t + &g).sinh() * Float::with_val(bits, &t - &g).sinh())
        }
        _ => two_g.sinh() / (Float::with_val(bits, &g - &t).sinh() * Float::with_val(bits, &g + &t).sinh()),
    };
    Ok(value)
}

/// `phi(t), phi'(t), ..., phi^(kmax)(t)` as a moment sequence.
pub fn phi_derivatives(p: &PhaseParams, kmax: usize, ctx: &PrecisionContext) -> Result<MomentSequence> {
    let values = phi_derivatives_at(p, kmax, ctx.bits())?;
    MomentSequence::from_parts(MomentFamily::phi_family(p.phase())?, Some(p.clone()), values, ctx.bits())
}

/// Derivatives of `phi` from the decompositions
/// `cot(g - t) + cot(g + t)`, `coth(t - g) - coth(t + g)` and
/// `coth(g - t) + coth(g + t)`, each differentiated exactly through
/// [`derivative_polynomial`].
pub fn phi_derivatives_at(p: &PhaseParams, kmax: usize, bits: u32) -> Result<Vec<Float>> {
    let (phase, _, _) = p.require_noncritical("phi derivatives")?;
    // Guard bits absorb the cancellation inside the coth polynomials.
    let work = bits + 64 + 2 * u32::try_from(kmax).unwrap_or(u32::MAX / 4);
    let (t, g) = p.t_gamma(work).unwrap();
    check_pole(phase, &t, &g)?;
    let kind = match phase {
        Phase::Disordered => TrigKind::Cot,
        _ => TrigKind::Coth,
    };
    let (x1, x2) = match phase {
        Phase::Disordered => (
            Float::with_val(work, &g - &t).tan().recip(),
            Float::with_val(work, &g + &t).tan().recip(),
        ),
        Phase::Ferroelectric => (
            Float::with_val(work, &t - &g).tanh().recip(),
            Float::with_val(work, &t + &g).tanh().recip(),
        ),
        _ => (
            Float::with_val(work, &g - &t).tanh().recip(),
            Float::with_val(work, &g + &t).tanh().recip(),
        ),
    };
    let polys = derivative_polynomials(kind, kmax);
    let values = polys
        .iter()
        .enumerate()
        .map(|(k, poly)| {
            let first = horner(poly, &x1);
            let second = horner(poly, &x2);
            let odd = k % 2 == 1;
            let v = match phase {
                // d/dt hits cot(g - t) with a minus sign per order.
                Phase::Disordered | Phase::Antiferroelectric => {
                    if odd {
                        second - first
                    } else {
                        first + second
                    }
                }
                _ => first - second,
            };
            Float::with_val(bits, v)
        })
        .collect();
    Ok(values)
}
