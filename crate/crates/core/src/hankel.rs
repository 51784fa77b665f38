//! Hankel determinants of moment sequences, the Izergin–Korepin partition
//! function and the Toda-equation check.
//!
//! Every determinant is computed twice: at the working precision and at
//! `verify_factor` times that precision, with moments regenerated from
//! their parameters. Results that disagree beyond `2^(-bits/2)` relative are
//! reported as [`Error::Precision`].

use rug::ops::Pow;
use rug::Float;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::model::PhaseParams;
use crate::precision::{check_agreement, PrecisionContext};
use crate::specfun::{phi_derivatives, superfactorial, MomentSequence};

#[derive(Clone, Debug)]
pub struct HankelResult {
    pub n: usize,
    pub tau: Float,
    /// `ln |tau|`.
    pub log_tau: Float,
    pub precision_used: u32,
    pub verified: bool,
}

/// The `n x n` matrix with entry `(i, k) = mu_{i+k}` (0-based).
pub fn hankel_matrix(moments: &[Float], n: usize, bits: u32) -> Result<Vec<Vec<Float>>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    if moments.len() < 2 * n - 1 {
        return Err(Error::InsufficientData(format!(
            "an {n} x {n} Hankel matrix needs moments up to order {}, have {}",
            2 * n - 2,
            moments.len().saturating_sub(1)
        )));
    }
    Ok((0..n).map(|i| (0..n).map(|k| Float::with_val(bits, &moments[i + k])).collect()).collect())
}

/// Eliminates below `pivot` in column `col`, in parallel over rows.
fn eliminate_below(rows: &mut [Vec<Float>], pivot: &[Float], col: usize, exec: Execution) {
    exec.for_each_mut(rows, |_, row| {
        if row[col].is_zero() {
            return;
        }
        let factor = Float::with_val(row[col].prec(), &row[col] / &pivot[col]);
        for (x, p) in row[col + 1..].iter_mut().zip(&pivot[col + 1..]) {
            *x -= Float::with_val(p.prec(), &factor * p);
        }
        row[col] = Float::with_val(row[col].prec(), 0);
    });
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn det_pivoted(mut a: Vec<Vec<Float>>, exec: Execution) -> Float {
    let n = a.len();
    if n == 0 {
        return Float::with_val(crate::precision::MIN_BITS, 1);
    }
    let bits = a[0][0].prec();
    let mut det = Float::with_val(bits, 1);
    for col in 0..n {
        let (best, _) = a[col..]
            .iter()
            .enumerate()
            .max_by(|(_, x), (_, y)| x[col].cmp_abs(&y[col]).unwrap_or(std::cmp::Ordering::Equal))
            .unwrap();
        let best = best + col;
        if a[best][col].is_zero() {
            return Float::with_val(bits, 0);
        }
        if best != col {
            a.swap(best, col);
            det = -det;
        }
        det *= &a[col][col];
        let (head, tail) = a.split_at_mut(col + 1);
        eliminate_below(tail, &head[col], col, exec);
    }
    det
}

/// Pivots of unpivoted elimination, `d_k = D_{k+1} / D_k` with `D_k` the
/// leading principal minors. Stops with an error at the first pivot that is
/// not positive.
pub fn leading_pivots(mut a: Vec<Vec<Float>>, what: &str, exec: Execution) -> Result<Vec<Float>> {
    let n = a.len();
    let mut pivots = Vec::with_capacity(n);
    for col in 0..n {
        let p = a[col][col].clone();
        if !(p.is_sign_positive() && !p.is_zero()) || p.is_nan() {
            return Err(Error::NonPositivePivot { what: what.to_string(), index: col, bits: p.prec() });
        }
        pivots.push(p);
        let (head, tail) = a.split_at_mut(col + 1);
        eliminate_below(tail, &head[col], col, exec);
    }
    Ok(pivots)
}

fn ln_abs(x: &Float) -> Float {
    Float::with_val(x.prec(), x.abs_ref()).ln()
}

pub fn hankel_det(m: &MomentSequence, n: usize, ctx: &PrecisionContext) -> Result<HankelResult> {
    hankel_det_with(m, n, ctx, Execution::default())
}

/// `tau_n = det(mu_{i+k})_{0 <= i,k < n}`, verified at higher precision.
pub fn hankel_det_with(m: &MomentSequence, n: usize, ctx: &PrecisionContext, exec: Execution) -> Result<HankelResult> {
    if n == 0 {
        return Err(Error::domain("Hankel determinant size must be at least 1"));
    }
    let kmax = 2 * n - 2;
    if m.max_order() < kmax {
        return Err(Error::InsufficientData(format!(
            "tau_{n} needs moments up to order {kmax}, sequence stops at {}",
            m.max_order()
        )));
    }
    let run = |bits: u32| -> Result<Float> {
        let moments = m.with_order(kmax, bits)?;
        Ok(det_pivoted(hankel_matrix(moments.values(), n, bits)?, exec))
    };
    let (primary, verify) = exec.join(|| run(ctx.bits()), || run(ctx.verify_bits()));
    let (primary, verify) = (primary?, verify?);
    check_agreement(&format!("Hankel determinant tau_{n}"), &primary, &verify, ctx)?;
    Ok(HankelResult { n, log_tau: ln_abs(&primary), tau: primary, precision_used: ctx.bits(), verified: true })
}

/// A partition function value with its logarithm.
#[derive(Clone, Debug)]
pub struct PartitionValue {
    pub n: usize,
    pub z: Float,
    pub log_z: Float,
    pub bits: u32,
}

#[derive(Clone, Debug)]
pub struct IkResult {
    pub value: PartitionValue,
    pub tau: HankelResult,
}

/// `Z_n = (ab)^(n^2) tau_n / (prod_{k<n} k!)^2` at the precision
/// `max(bits, 24 n)`.
pub fn zn_ik(p: &PhaseParams, n: usize, ctx: &PrecisionContext) -> Result<IkResult> {
    zn_ik_with(p, n, ctx, Execution::default())
}

pub fn zn_ik_with(p: &PhaseParams, n: usize, ctx: &PrecisionContext, exec: Execution) -> Result<IkResult> {
    p.require_noncritical("the Izergin-Korepin formula")?;
    if n == 0 {
        return Err(Error::domain("n must be at least 1"));
    }
    let ctx = ctx.for_hankel(n);
    let moments = phi_derivatives(p, 2 * n - 2, &ctx)?;
    let tau = hankel_det_with(&moments, n, &ctx, exec)?;
    let value = ik_prefactor(p, n, &tau.tau, &tau.log_tau, &ctx);
    Ok(IkResult { value, tau })
}

/// Applies `(ab)^(n^2) / (prod k!)^2` to `tau_n`.
pub(crate) fn ik_prefactor(p: &PhaseParams, n: usize, tau: &Float, log_tau: &Float, ctx: &PrecisionContext) -> PartitionValue {
    let bits = ctx.bits();
    let w = p.weights(ctx);
    let ab = Float::with_val(bits, w.a() * w.b());
    let n2 = u32::try_from(n * n).expect("n^2 fits in u32");
    let sf = Float::with_val(bits, superfactorial(n));
    let sf2 = Float::with_val(bits, sf.square_ref());
    let z = Float::with_val(bits, (&ab).pow(n2)) * tau / &sf2;
    let log_z = Float::with_val(bits, ab.ln() * n2) + log_tau - sf2.ln();
    PartitionValue { n, z, log_z, bits }
}

/// `tau_n` from `phi` derivatives; `tau_0 = 1`.
fn tau_at(p: &PhaseParams, n: usize, ctx: &PrecisionContext, exec: Execution) -> Result<Float> {
    if n == 0 {
        return Ok(Float::with_val(ctx.bits(), 1));
    }
    let moments = phi_derivatives(p, 2 * n - 2, ctx)?;
    Ok(hankel_det_with(&moments, n, ctx, exec)?.tau)
}

/// Relative residual of `tau_n tau_n'' - (tau_n')^2 = tau_{n+1} tau_{n-1}`
/// with second-order central differences in `t` at step `h`.
pub fn toda_residual(p: &PhaseParams, n: usize, h: &Float, ctx: &PrecisionContext) -> Result<Float> {
    let (_, t, _) = p.require_noncritical("the Toda equation")?;
    if n == 0 {
        return Err(Error::domain("the Toda equation is stated for n >= 1"));
    }
    if !(h.is_sign_positive() && !h.is_zero()) {
        return Err(Error::domain("step h must be positive"));
    }
    let ctx = ctx.for_hankel(n + 1);
    let bits = ctx.bits();
    let shift_bits = ctx.verify_bits() + 64;
    let shifted = |sign: i32| -> Result<PhaseParams> {
        let t_new = Float::with_val(shift_bits, &t + Float::with_val(shift_bits, h * sign));
        p.with_t(t_new)
            .map_err(|e| Error::domain(format!("t {} h leaves the phase domain: {e}", if sign > 0 { "+" } else { "-" })))
    };
    let (p_minus, p_plus) = (shifted(-1)?, shifted(1)?);
    let exec = Execution::default();
    let values = exec.map_range(0..5, |i| match i {
        0 => tau_at(&p_minus, n, &ctx, Execution::Sequential),
        1 => tau_at(p, n, &ctx, Execution::Sequential),
        2 => tau_at(&p_plus, n, &ctx, Execution::Sequential),
        3 => tau_at(p, n + 1, &ctx, Execution::Sequential),
        _ => tau_at(p, n - 1, &ctx, Execution::Sequential),
    });
    let mut it = values.into_iter();
    let mut next = || it.next().unwrap();
    let (tm, t0, tp, up, down) = (next()?, next()?, next()?, next()?, next()?);
    let h = Float::with_val(bits, h);
    let first = Float::with_val(bits, &tp - &tm) / Float::with_val(bits, &h * 2u32);
    let second = Float::with_val(bits, &tp - Float::with_val(bits, &t0 * 2u32) + &tm) / Float::with_val(bits, h.square_ref());
    let rhs = Float::with_val(bits, &up * &down);
    let lhs = Float::with_val(bits, &t0 * &second) - Float::with_val(bits, first.square_ref());
    Ok((lhs - &rhs).abs() / rhs)
}

/// Observed convergence order `ln(r1/r2) / ln(h1/h2)` of the Toda residual.
pub fn toda_observed_order(p: &PhaseParams, n: usize, h1: &Float, h2: &Float, ctx: &PrecisionContext) -> Result<f64> {
    let r1 = toda_residual(p, n, h1, ctx)?;
    let r2 = toda_residual(p, n, h2, ctx)?;
    let num = Float::with_val(64, &r1 / &r2).ln();
    let den = Float::with_val(64, Float::with_val(h1.prec().max(64), h1 / h2).ln());
    Ok((num / den).to_f64())
}

#[cfg(test)]
mod tests {
    use rug::float::Constant;

    use super::*;
    use crate::lattice::enumerate_dfs;
    use crate::model::Phase;
    use crate::precision::relative_difference;

    fn f(x: f64) -> Float {
        Float::with_val(256, x)
    }

    #[test]
    fn small_sizes() {
        let ctx = PrecisionContext::default();
        let m = MomentSequence::custom(vec![f(2.0), f(3.0), f(7.0)]).unwrap();
        assert_eq!(hankel_det(&m, 1, &ctx).unwrap().tau, 2);
        // 2*7 - 3^2
        assert!(relative_difference(&hankel_det(&m, 2, &ctx).unwrap().tau, &f(5.0)) < 1e-70);
        assert!(matches!(hankel_det(&m, 3, &ctx), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn disordered_pi_over_three_tau2() {
        let ctx = PrecisionContext::default();
        let p = PhaseParams::disordered(Float::with_val(512, 0), Float::with_val(512, Constant::Pi) / 3u32).unwrap();
        let m = phi_derivatives(&p, 2, &ctx).unwrap();
        let tau = hankel_det(&m, 2, &ctx).unwrap();
        assert!(relative_difference(&tau.tau, &(Float::with_val(256, 32) / 9u32)) < 1e-70);
        assert!(tau.verified);
    }

    #[test]
    fn pivoting_matches_known_determinant() {
        let m: Vec<Vec<Float>> = [[0.0, 2.0, 1.0], [1.0, 1.0, 0.0], [3.0, 0.0, 1.0]]
            .iter()
            .map(|r| r.iter().map(|&x| f(x)).collect())
            .collect();
        // 0(1) - 2(1) + 1(-3) = -5
        assert_eq!(det_pivoted(m.clone(), Execution::Sequential), -5);
        assert_eq!(det_pivoted(m, Execution::Parallel), -5);
    }

    #[test]
    fn leading_pivots_are_minor_ratios() {
        let m = MomentSequence::custom(vec![f(1.0), f(0.0), f(1.0), f(0.0), f(3.0)]).unwrap();
        let a = hankel_matrix(m.values(), 3, 256).unwrap();
        let pivots = leading_pivots(a, "test", Execution::Sequential).unwrap();
        // Gaussian measure: h_k = k!
        assert_eq!(pivots, vec![f(1.0), f(1.0), f(2.0)]);
        let bad = hankel_matrix(&[f(1.0), f(2.0), f(1.0)], 2, 256).unwrap();
        assert!(matches!(leading_pivots(bad, "test", Execution::Sequential), Err(Error::NonPositivePivot { index: 1, .. })));
    }

    #[test]
    fn single_site_partition_function_is_c() {
        let ctx = PrecisionContext::default();
        for p in [
            PhaseParams::from_f64(Phase::Disordered, 0.1, 0.7).unwrap(),
            PhaseParams::from_f64(Phase::Ferroelectric, 2.0, 1.0).unwrap(),
            PhaseParams::from_f64(Phase::Antiferroelectric, 0.3, 1.0).unwrap(),
        ] {
            let z = zn_ik(&p, 1, &ctx).unwrap().value.z;
            let c = p.weights(&ctx).c().clone();
            assert!(relative_difference(&z, &c) < 1e-70);
        }
    }

    #[test]
    fn ferro_n4_matches_enumeration() {
        let ctx = PrecisionContext::default();
        let p = PhaseParams::from_f64(Phase::Ferroelectric, 2.0, 1.0).unwrap();
        let z = zn_ik(&p, 4, &ctx).unwrap().value;
        let w = p.weights(&ctx.at_bits(512));
        let (exact, _) = enumerate_dfs(4, &w).unwrap();
        assert!(relative_difference(&z.z, &exact) < 1e-30);
        assert!(relative_difference(&z.log_z, &exact.ln()) < 1e-30);
    }

    #[test]
    fn toda_n1_is_second_order() {
        let ctx = PrecisionContext::new(512).unwrap();
        let p = PhaseParams::from_f64(Phase::Disordered, 0.4, 1.2).unwrap();
        let order = toda_observed_order(&p, 1, &Float::with_val(64, 1e-6), &Float::with_val(64, 5e-7), &ctx).unwrap();
        assert!((order - 2.0).abs() < 0.05, "order {order}");
    }

    #[test]
    fn toda_domain_exit() {
        let ctx = PrecisionContext::new(256).unwrap();
        let p = PhaseParams::from_f64(Phase::Disordered, 0.5, 0.5 + 1e-9).unwrap();
        assert!(toda_residual(&p, 2, &Float::with_val(64, 1e-6), &ctx).is_err());
    }
}
