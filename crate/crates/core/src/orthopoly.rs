//! Norms of monic orthogonal polynomials from moment sequences, Meixner
//! closed forms and the partition function on the two critical lines.

use rug::ops::Pow;
use rug::Float;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::hankel::{hankel_matrix, ik_prefactor, leading_pivots, PartitionValue};
use crate::model::{Phase, PhaseParams};
use crate::precision::{check_agreement, PrecisionContext};
use crate::specfun::{factorial, superfactorial, MomentFamily, MomentSequence};

/// `h_0 .. h_{n-1}` for one moment functional.
#[derive(Clone, Debug)]
pub struct NormSequence {
    pub family: MomentFamily,
    pub params: Option<PhaseParams>,
    pub norms: Vec<Float>,
    pub bits: u32,
    pub verified: bool,
}

impl NormSequence {
    pub fn len(&self) -> usize {
        self.norms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.norms.is_empty()
    }

    /// `prod_{k<m} h_k = tau_m` for `m <= len`.
    pub fn product(&self, m: usize) -> Float {
        let mut acc = Float::with_val(self.bits, 1);
        for h in &self.norms[..m] {
            acc *= h;
        }
        acc
    }

    /// `sum_{k<m} ln h_k`.
    pub fn log_product(&self, m: usize) -> Float {
        let mut acc = Float::with_val(self.bits, 0);
        for h in &self.norms[..m] {
            acc += Float::with_val(self.bits, h.ln_ref());
        }
        acc
    }
}

pub fn norms_from_moments(m: &MomentSequence, n: usize, ctx: &PrecisionContext) -> Result<NormSequence> {
    norms_from_moments_with(m, n, ctx, Execution::default())
}

/// Pivots of the unpivoted elimination of the Hankel matrix, which are
/// `D_{k+1}/D_k`. Computed at working and verification precision.
pub fn norms_from_moments_with(
    m: &MomentSequence,
    n: usize,
    ctx: &PrecisionContext,
    exec: Execution,
) -> Result<NormSequence> {
    if n == 0 {
        return Err(Error::domain("at least one norm must be requested"));
    }
    let kmax = 2 * n - 2;
    if m.max_order() < kmax {
        return Err(Error::InsufficientData(format!(
            "{n} norms need moments up to order {kmax}, sequence stops at {}",
            m.max_order()
        )));
    }
    let what = format!("orthogonal-polynomial norms ({n} terms)");
    let run = |bits: u32| -> Result<Vec<Float>> {
        let moments = m.with_order(kmax, bits)?;
        leading_pivots(hankel_matrix(moments.values(), n, bits)?, &what, exec)
    };
    let (primary, verify) = exec.join(|| run(ctx.bits()), || run(ctx.verify_bits()));
    let (primary, verify) = (primary?, verify?);
    for (k, (a, b)) in primary.iter().zip(&verify).enumerate() {
        check_agreement(&format!("norm h_{k}"), a, b, ctx)?;
    }
    Ok(NormSequence {
        family: m.family(),
        params: m.params().cloned(),
        norms: primary,
        bits: ctx.bits(),
        verified: true,
    })
}

/// `R_k = h_k / h_{k-1}` for `k = 1 .. n-1`.
pub fn recurrence_r(ns: &NormSequence) -> Vec<Float> {
    ns.norms.windows(2).map(|w| Float::with_val(ns.bits, &w[1] / &w[0])).collect()
}

fn meixner_q(t: &Float, gamma: &Float, bits: u32) -> Result<Float> {
    let work = bits + 32;
    let q = Float::with_val(work, Float::with_val(work, gamma - t) * 2u32).exp();
    if !(q > 0 && q < 1) {
        return Err(Error::domain("Meixner nome q = exp(2 gamma - 2 t) must lie in (0, 1), i.e. t > gamma"));
    }
    Ok(q)
}

/// `h_k^Q = (k!)^2 q^(k+1) / (1 - q)^(2k+1)` with `q = exp(2 gamma - 2 t)`.
pub fn meixner_norm(k: usize, t: &Float, gamma: &Float, bits: u32) -> Result<Float> {
    let q = meixner_q(t, gamma, bits)?;
    let k32 = u32::try_from(k).map_err(|_| Error::domain("index too large"))?;
    let work = q.prec();
    let kf = Float::with_val(work, factorial(k32));
    let num = Float::with_val(work, kf.square_ref()) * Float::with_val(work, (&q).pow(k32 + 1));
    let den = Float::with_val(work, (1u32 - q).pow(2 * k32 + 1));
    Ok(Float::with_val(bits, num / den))
}

/// `h_k / h_k^Q` for `k = 0 ..= kmax`, with `h_k` the norms of the
/// ferroelectric discrete weight.
pub fn meixner_ratios(kmax: usize, t: &Float, gamma: &Float, ctx: &PrecisionContext) -> Result<Vec<Float>> {
    let ctx = ctx.for_hankel(kmax + 1);
    let p = PhaseParams::ferroelectric(t.clone(), gamma.clone())?;
    let m = MomentSequence::generate(MomentFamily::FerroDiscrete, &p, 2 * kmax, &ctx)?;
    let ns = norms_from_moments(&m, kmax + 1, &ctx)?;
    let exec = Execution::default();
    exec.map_range(0..kmax + 1, |k| {
        Ok(Float::with_val(ctx.bits(), &ns.norms[k] / meixner_norm(k, t, gamma, ctx.bits())?))
    })
    .into_iter()
    .collect()
}

pub fn meixner_ratio(k: usize, t: &Float, gamma: &Float, ctx: &PrecisionContext) -> Result<Float> {
    Ok(meixner_ratios(k, t, gamma, ctx)?.pop().unwrap())
}

/// `b^(n^2) tau_n / (prod k!)^2`, the common shape of both critical-line
/// formulas, with `b` the second weight of the normalized critical point.
fn crit_value(p: &PhaseParams, n: usize, log_tau: &Float, tau: &Float, ctx: &PrecisionContext) -> PartitionValue {
    let bits = ctx.bits();
    let b = p.weights(ctx).b().clone();
    let n2 = u32::try_from(n * n).expect("n^2 fits in u32");
    let sf = Float::with_val(bits, superfactorial(n));
    let sf2 = Float::with_val(bits, sf.square_ref());
    let z = Float::with_val(bits, (&b).pow(n2)) * tau / &sf2;
    let log_z = Float::with_val(bits, b.ln() * n2) + log_tau - sf2.ln();
    PartitionValue { n, z, log_z, bits }
}

fn zn_critical(p: &PhaseParams, n: usize, ctx: &PrecisionContext) -> Result<PartitionValue> {
    Ok(zn_sequence(p, n, ctx)?.pop().unwrap())
}

/// `Z_n = ((alpha+1)/2)^(n^2) prod h_k / (k!)^2` on the FE-D critical line.
pub fn zn_crit_fd(n: usize, alpha: &Float, ctx: &PrecisionContext) -> Result<PartitionValue> {
    zn_critical(&PhaseParams::critical_fd(alpha.clone())?, n, ctx)
}

/// `Z_n = ((1+alpha)/2)^(n^2) prod h_k / (k!)^2` on the AF-D critical line.
pub fn zn_crit_afd(n: usize, alpha: &Float, ctx: &PrecisionContext) -> Result<PartitionValue> {
    zn_critical(&PhaseParams::critical_afd(alpha.clone())?, n, ctx)
}

pub fn zn_sequence(p: &PhaseParams, nmax: usize, ctx: &PrecisionContext) -> Result<Vec<PartitionValue>> {
    zn_sequence_with(p, nmax, ctx, Execution::default())
}

/// `Z_1 .. Z_nmax` for any phase from a single elimination: the
/// Izergin-Korepin determinant off the critical lines, the limiting
/// weights on them. Precision is `max(bits, 24 nmax)`.
pub fn zn_sequence_with(
    p: &PhaseParams,
    nmax: usize,
    ctx: &PrecisionContext,
    exec: Execution,
) -> Result<Vec<PartitionValue>> {
    if nmax == 0 {
        return Err(Error::domain("nmax must be at least 1"));
    }
    let ctx = ctx.for_hankel(nmax);
    let family = match p.phase() {
        Phase::CriticalFd | Phase::CriticalAfd => MomentFamily::weight_family(p.phase()),
        phase => MomentFamily::phi_family(phase)?,
    };
    let m = MomentSequence::generate(family, p, 2 * nmax - 2, &ctx)?;
    let ns = norms_from_moments_with(&m, nmax, &ctx, exec)?;
    let bits = ctx.bits();
    let mut tau = Float::with_val(bits, 1);
    let mut log_tau = Float::with_val(bits, 0);
    let mut out = Vec::with_capacity(nmax);
    for (k, h) in ns.norms.iter().enumerate() {
        tau *= h;
        log_tau += Float::with_val(bits, h.ln_ref());
        let n = k + 1;
        out.push(if p.phase().is_critical() {
            crit_value(p, n, &log_tau, &tau, &ctx)
        } else {
            ik_prefactor(p, n, &tau, &log_tau, &ctx)
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use rug::float::Constant;

    use super::*;
    use crate::hankel::{hankel_det, zn_ik};
    use crate::precision::relative_difference;
    use crate::specfun::phi_derivatives;

    fn f(x: f64) -> Float {
        Float::with_val(256, x)
    }

    fn close(a: &Float, b: &Float, tol: f64) -> bool {
        relative_difference(a, b) < tol
    }

    #[test]
    fn disordered_pi_over_three() {
        let ctx = PrecisionContext::default();
        let p = PhaseParams::disordered(f(0.0), Float::with_val(512, Constant::Pi) / 3u32).unwrap();
        let m = phi_derivatives(&p, 4, &ctx).unwrap();
        let ns = norms_from_moments(&m, 2, &ctx).unwrap();
        let tau1 = Float::with_val(256, 3).sqrt().recip() * 2u32;
        let tau2 = f(32.0) / 9u32;
        assert!(close(&ns.norms[0], &tau1, 1e-70));
        assert!(close(&ns.norms[1], &Float::with_val(256, &tau2 / &tau1), 1e-70));
        let r = recurrence_r(&ns);
        assert_eq!(r.len(), 1);
        assert!(close(&r[0], &(tau2 * 3u32 / 4u32), 1e-70));
    }

    #[test]
    fn disordered_h0_closed_form() {
        let ctx = PrecisionContext::default();
        let (t, g) = (f(0.2), f(0.9));
        let p = PhaseParams::disordered(t.clone(), g.clone()).unwrap();
        let ns = norms_from_moments(&phi_derivatives(&p, 0, &ctx).unwrap(), 1, &ctx).unwrap();
        let expected = Float::with_val(256, &g * 2u32).sin()
            / (Float::with_val(256, &g + &t).sin() * Float::with_val(256, &g - &t).sin());
        assert!(close(&ns.norms[0], &expected, 1e-70));
    }

    #[test]
    fn norms_multiply_to_tau() {
        let ctx = PrecisionContext::default().for_hankel(8);
        let p = PhaseParams::from_f64(Phase::Antiferroelectric, 0.3, 1.0).unwrap();
        let m = MomentSequence::weight(&p, 14, &ctx).unwrap();
        let ns = norms_from_moments(&m, 8, &ctx).unwrap();
        let tau = hankel_det(&m, 8, &ctx).unwrap().tau;
        assert!(close(&ns.product(8), &tau, 1e-50));
        assert!(close(&ns.log_product(8), &Float::with_val(256, tau.ln_ref()), 1e-50));
        // telescoping reconstruction
        let r = recurrence_r(&ns);
        let mut h = ns.norms[0].clone();
        for (k, rk) in r.iter().enumerate() {
            h *= rk;
            assert!(close(&h, &ns.norms[k + 1], 1e-60));
        }
    }

    #[test]
    fn meixner_examples() {
        let half = Float::with_val(256, 2).ln() / 2u32;
        // q = exp(-2 ln2 / 2 * 2)... choose t - gamma = ln2 / 2 so q = 1/2
        let (t, g) = (Float::with_val(256, &half + 1u32), f(1.0));
        assert!(close(&meixner_norm(0, &t, &g, 256).unwrap(), &f(1.0), 1e-70));
        assert!(close(&meixner_norm(1, &t, &g, 256).unwrap(), &f(2.0), 1e-70));
        assert!(meixner_norm(0, &f(1.0), &f(2.0), 256).is_err());
    }

    #[test]
    fn meixner_ratio_k0() {
        let ctx = PrecisionContext::default();
        let (t, g) = (f(2.0), f(1.0));
        let r = meixner_ratio(0, &t, &g, &ctx).unwrap();
        let q1 = Float::with_val(256, -2).exp();
        let q2 = Float::with_val(256, -6).exp();
        let li0 = |q: &Float| Float::with_val(256, q / Float::with_val(256, 1u32 - q));
        let expected = (li0(&q1) - li0(&q2)) / li0(&q1);
        assert!(close(&r, &expected, 1e-70));
    }

    #[test]
    fn critical_z1_is_one() {
        let ctx = PrecisionContext::default();
        for a in [1.5, 3.0, 10.0] {
            assert!(close(&zn_crit_fd(1, &f(a), &ctx).unwrap().z, &f(1.0), 1e-70));
        }
        for a in [-0.7, 0.0, 0.4] {
            assert!(close(&zn_crit_afd(1, &f(a), &ctx).unwrap().z, &f(1.0), 1e-70));
        }
    }

    #[test]
    fn critical_afd_symmetric_point() {
        let ctx = PrecisionContext::default();
        let p = PhaseParams::critical_afd(f(0.0)).unwrap();
        let m = MomentSequence::weight(&p, 2, &ctx).unwrap();
        let ns = norms_from_moments(&m, 2, &ctx).unwrap();
        // odd moments vanish, so h_1 = D_2 / D_1 = mu_2 = 4
        assert!(close(&ns.norms[1], &f(4.0), 1e-70));
        // Z_2 = (1/2)^4 * 2 * 4 = c^2 (a^2 + b^2) at (1/2, 1/2, 1)
        assert!(close(&zn_crit_afd(2, &f(0.0), &ctx).unwrap().z, &f(0.5), 1e-70));
    }

    #[test]
    fn crit_fd_alpha3_two_paths() {
        let ctx = PrecisionContext::default();
        let p = PhaseParams::critical_fd(f(3.0)).unwrap();
        let m = MomentSequence::weight(&p, 2, &ctx).unwrap();
        let v = m.values();
        let tau2 = Float::with_val(256, &v[0] * &v[2]) - Float::with_val(256, v[1].square_ref());
        let expected = tau2 * 16u32;
        assert!(close(&zn_crit_fd(2, &f(3.0), &ctx).unwrap().z, &expected, 1e-70));
    }

    #[test]
    fn sequence_matches_single_evaluations() {
        let ctx = PrecisionContext::default();
        let p = PhaseParams::from_f64(Phase::Disordered, 0.1, 0.8).unwrap();
        let seq = zn_sequence(&p, 6, &ctx).unwrap();
        for v in &seq {
            let single = zn_ik(&p, v.n, &ctx).unwrap().value;
            assert!(close(&v.z, &single.z, 1e-60));
            assert!(close(&v.log_z, &single.log_z, 1e-60));
        }
        assert_eq!(
            zn_sequence_with(&p, 6, &ctx, Execution::Sequential).unwrap().last().unwrap().z,
            seq.last().unwrap().z
        );
    }
}
