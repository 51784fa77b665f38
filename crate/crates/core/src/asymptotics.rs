//! Leading-order asymptotics of `Z_n` in each phase, and fits of the free
//! energy, the power-law exponent and the constant from computed sequences.
//!
//! Predictions have the shape `C n^kappa G^(n or sqrt n) theta_4(n omega)
//! F^(n^2)`; factors a phase does not have, or whose value is unknown, are
//! left out of `log_prediction`.

use rug::float::Constant;
use rug::Float;

use crate::error::{Error, Result};
use crate::model::{Phase, PhaseParams};
use crate::precision::PrecisionContext;
use crate::specfun::{theta1, theta1_prime0, theta4, zeta_three_halves};

/// How the `G` factor enters: `G^n` or `G^(sqrt n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GExponent {
    N,
    SqrtN,
}

#[derive(Clone, Debug)]
pub struct AsymptoticPrediction {
    pub phase: Phase,
    pub n: usize,
    pub f: Float,
    pub kappa: Option<Float>,
    pub g: Option<Float>,
    pub g_exponent: GExponent,
    pub c: Option<Float>,
    pub theta_factor: Option<Float>,
    /// `omega` and the nome `q` of the antiferroelectric theta factor.
    pub omega: Option<Float>,
    pub nome: Option<Float>,
    pub log_prediction: Float,
}

impl AsymptoticPrediction {
    fn assemble(
        phase: Phase,
        n: usize,
        f: Float,
        kappa: Option<Float>,
        g: Option<(Float, GExponent)>,
        c: Option<Float>,
        theta: Option<(Float, Float, Float)>,
    ) -> Self {
        let bits = f.prec();
        let n2 = u32::try_from(n * n).expect("n^2 fits in u32");
        let mut log = Float::with_val(bits, f.ln_ref()) * n2;
        let ln_n = Float::with_val(bits, n).ln();
        if let Some(c) = &c {
            log += Float::with_val(bits, c.ln_ref());
        }
        if let Some(k) = &kappa {
            log += Float::with_val(bits, k * &ln_n);
        }
        let g_exponent = g.as_ref().map_or(GExponent::N, |(_, e)| *e);
        if let Some((g, e)) = &g {
            let power = match e {
                GExponent::N => Float::with_val(bits, n),
                GExponent::SqrtN => Float::with_val(bits, n).sqrt(),
            };
            log += Float::with_val(bits, g.ln_ref()) * power;
        }
        let (theta_factor, omega, nome) = match theta {
            Some((th, om, q)) => {
                log += Float::with_val(bits, th.ln_ref());
                (Some(th), Some(om), Some(q))
            }
            None => (None, None, None),
        };
        AsymptoticPrediction {
            phase,
            n,
            f,
            kappa,
            g: g.map(|(g, _)| g),
            g_exponent,
            c,
            theta_factor,
            omega,
            nome,
            log_prediction: log,
        }
    }

    /// `exp(log_prediction)`.
    pub fn value(&self) -> Float {
        Float::with_val(self.log_prediction.prec(), self.log_prediction.exp_ref())
    }

    /// The same prediction with a fitted constant folded in.
    pub fn with_constant(&self, c: Float) -> Self {
        let mut out = self.clone();
        if let Some(old) = &self.c {
            out.log_prediction -= Float::with_val(old.prec(), old.ln_ref());
        }
        out.log_prediction += Float::with_val(c.prec(), c.ln_ref());
        out.c = Some(c);
        out
    }
}

/// `kappa(gamma) = 1/12 - 2 gamma^2 / (3 pi (pi - 2 gamma))`.
pub fn kappa_disordered(gamma: &Float, bits: u32) -> Float {
    let pi = Float::with_val(bits, Constant::Pi);
    let g2 = Float::with_val(bits, gamma.square_ref()) * 2u32;
    let den = Float::with_val(bits, &pi - Float::with_val(bits, gamma * 2u32)) * &pi * 3u32;
    Float::with_val(bits, 12).recip() - g2 / den
}

pub fn predict_disordered(t: &Float, gamma: &Float, n: usize, ctx: &PrecisionContext) -> Result<AsymptoticPrediction> {
    let p = PhaseParams::disordered(t.clone(), gamma.clone())?;
    let bits = ctx.bits();
    let w = p.weights(ctx);
    let (t, g) = p.t_gamma(bits).unwrap();
    let pi = Float::with_val(bits, Constant::Pi);
    let cos = (Float::with_val(bits, &pi * &t) / Float::with_val(bits, &g * 2u32)).cos();
    let f = Float::with_val(bits, &pi * w.a()) * w.b() / (Float::with_val(bits, &g * 2u32) * cos);
    Ok(AsymptoticPrediction::assemble(Phase::Disordered, n, f, Some(kappa_disordered(&g, bits)), None, None, None))
}

pub fn predict_ferro(t: &Float, gamma: &Float, n: usize, ctx: &PrecisionContext) -> Result<AsymptoticPrediction> {
    let p = PhaseParams::ferroelectric(t.clone(), gamma.clone())?;
    let bits = ctx.bits();
    let (t, g) = p.t_gamma(bits).unwrap();
    let c = 1u32 - Float::with_val(bits, Float::with_val(bits, -&g) * 4u32).exp();
    let gg = Float::with_val(bits, &g - &t).exp();
    let f = p.weights(ctx).b().clone();
    Ok(AsymptoticPrediction::assemble(Phase::Ferroelectric, n, f, None, Some((gg, GExponent::N)), Some(c), None))
}

/// `prod_{k>=1} (1 - e^(-4 gamma k))`. Its first factor is the constant `C`
/// used by [`predict_ferro`]; exact `Z_n` sequences approach
/// `prod * G^n F^(n^2)`, so the remaining factors measure the gap between
/// the two.
pub fn ferro_euler_product(gamma: &Float, bits: u32) -> Result<Float> {
    if *gamma <= 0 {
        return Err(Error::domain("gamma > 0 required"));
    }
    let work = bits + 32;
    let x = Float::with_val(work, Float::with_val(work, -gamma) * 4u32).exp();
    let eps = Float::with_val(work, Float::i_exp(1, -i32::try_from(bits).unwrap_or(i32::MAX) - 8));
    let mut prod = Float::with_val(work, 1);
    let mut power = x.clone();
    while power > eps {
        prod *= Float::with_val(work, 1u32 - &power);
        power *= &x;
    }
    Ok(Float::with_val(bits, prod))
}

pub fn predict_crit_fd(alpha: &Float, n: usize, ctx: &PrecisionContext) -> Result<AsymptoticPrediction> {
    let p = PhaseParams::critical_fd(alpha.clone())?;
    let bits = ctx.bits();
    let w = p.weights(ctx);
    let pi = Float::with_val(bits, Constant::Pi);
    let root = Float::with_val(bits, w.a() / &pi).sqrt();
    let g = (-(zeta_three_halves(bits) * root)).exp();
    let kappa = Float::with_val(bits, 0.25);
    Ok(AsymptoticPrediction::assemble(
        Phase::CriticalFd,
        n,
        w.b().clone(),
        Some(kappa),
        Some((g, GExponent::SqrtN)),
        None,
        None,
    ))
}

/// Antiferroelectric leading term `theta_4(n omega) F^(n^2)` with
/// `F = pi a b theta_1'(0) / (2 gamma theta_1(omega))`,
/// `omega = (pi/2)(1 + t/gamma)` and nome `q = exp(-pi^2 / (2 gamma))`.
pub fn predict_af(t: &Float, gamma: &Float, n: usize, ctx: &PrecisionContext) -> Result<AsymptoticPrediction> {
    let p = PhaseParams::antiferroelectric(t.clone(), gamma.clone())?;
    let bits = ctx.bits();
    let w = p.weights(ctx);
    let (t, g) = p.t_gamma(bits).unwrap();
    let pi = Float::with_val(bits, Constant::Pi);
    let q = (-Float::with_val(bits, pi.square_ref()) / Float::with_val(bits, &g * 2u32)).exp();
    let omega = Float::with_val(bits, &pi / 2u32) * (Float::with_val(bits, &t / &g) + 1u32);
    let th1 = theta1(&omega, &q, bits)?;
    let th1p = theta1_prime0(&q, bits)?;
    let f = Float::with_val(bits, &pi * w.a()) * w.b() * th1p / (Float::with_val(bits, &g * 2u32) * th1);
    let n_omega = Float::with_val(bits, &omega * u32::try_from(n).expect("n fits in u32"));
    let theta_factor = theta4(&n_omega, &q, bits)?;
    Ok(AsymptoticPrediction::assemble(Phase::Antiferroelectric, n, f, None, None, None, Some((theta_factor, omega, q))))
}

/// Dispatches on the phase. The AF-D critical line has no asymptotic
/// statement and is rejected.
pub fn predict(p: &PhaseParams, n: usize, ctx: &PrecisionContext) -> Result<AsymptoticPrediction> {
    let bits = ctx.bits();
    match p.phase() {
        Phase::Disordered => {
            let (t, g) = p.t_gamma(bits).unwrap();
            predict_disordered(&t, &g, n, ctx)
        }
        Phase::Ferroelectric => {
            let (t, g) = p.t_gamma(bits).unwrap();
            predict_ferro(&t, &g, n, ctx)
        }
        Phase::Antiferroelectric => {
            let (t, g) = p.t_gamma(bits).unwrap();
            predict_af(&t, &g, n, ctx)
        }
        Phase::CriticalFd => predict_crit_fd(&p.alpha(bits).unwrap(), n, ctx),
        Phase::CriticalAfd => Err(Error::domain("no asymptotic prediction is available on the critical-afd line")),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FitTarget {
    /// Values are `log F`.
    F,
    Kappa,
    /// Values are `log C`.
    C,
}

/// Inclusive range of `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FitWindow {
    pub lo: usize,
    pub hi: usize,
}

impl FitWindow {
    pub fn new(lo: usize, hi: usize) -> Result<Self> {
        if lo > hi {
            return Err(Error::domain(format!("empty fit window {lo}:{hi}")));
        }
        Ok(FitWindow { lo, hi })
    }

    pub fn contains(&self, n: usize) -> bool {
        (self.lo..=self.hi).contains(&n)
    }

    /// The top third of `1..=nmax`.
    pub fn top_third(nmax: usize) -> Self {
        let width = nmax.div_ceil(3).max(1);
        FitWindow { lo: nmax + 1 - width, hi: nmax }
    }
}

impl std::str::FromStr for FitWindow {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (lo, hi) = s
            .split_once(':')
            .ok_or_else(|| Error::domain(format!("fit window must look like LO:HI, got {s:?}")))?;
        let parse = |x: &str| {
            x.trim().parse::<usize>().map_err(|_| Error::domain(format!("bad fit window bound {x:?}")))
        };
        FitWindow::new(parse(lo)?, parse(hi)?)
    }
}

#[derive(Clone, Debug)]
pub struct FitResult {
    pub target: FitTarget,
    pub per_n_estimates: Vec<(usize, Float)>,
    pub extrapolated: Float,
    pub window: FitWindow,
    pub residual_norm: Float,
    /// `log C` from the intercept of the exponent fit.
    pub intercept: Option<Float>,
}

fn check_series(series: &[(usize, Float)], min: usize) -> Result<u32> {
    if series.len() < min {
        return Err(Error::InsufficientData(format!("need at least {min} values of n, have {}", series.len())));
    }
    if series.windows(2).any(|w| w[1].0 != w[0].0 + 1) {
        return Err(Error::InsufficientData("values of n must be consecutive and increasing".into()));
    }
    Ok(series.iter().map(|(_, v)| v.prec()).max().unwrap())
}

fn select(est: &[(usize, Float)], window: FitWindow) -> Result<Vec<&(usize, Float)>> {
    let chosen: Vec<_> = est.iter().filter(|(n, _)| window.contains(*n)).collect();
    if chosen.is_empty() {
        return Err(Error::InsufficientData(format!(
            "fit window {}:{} contains no estimates",
            window.lo, window.hi
        )));
    }
    Ok(chosen)
}

fn mean_and_rms(values: &[&(usize, Float)], bits: u32) -> (Float, Float) {
    let count = values.len() as u32;
    let mut mean = Float::with_val(bits, 0);
    for (_, v) in values {
        mean += v;
    }
    mean /= count;
    let mut ss = Float::with_val(bits, 0);
    for (_, v) in values {
        ss += Float::with_val(bits, v - &mean).square();
    }
    (mean, (ss / count).sqrt())
}

/// `log F_n = (L_{n+1} - 2 L_n + L_{n-1}) / 2` for interior `n`, averaged
/// over the window (default: the top third of the available `n`).
pub fn fit_free_energy(series: &[(usize, Float)], window: Option<FitWindow>) -> Result<FitResult> {
    let bits = check_series(series, 4)?;
    let est: Vec<(usize, Float)> = series
        .windows(3)
        .map(|w| {
            let d2 = Float::with_val(bits, &w[2].1 - Float::with_val(bits, &w[1].1 * 2u32)) + &w[0].1;
            (w[1].0, d2 / 2u32)
        })
        .collect();
    let window = window.unwrap_or_else(|| default_window(series));
    let chosen = select(&est, window)?;
    let (mean, rms) = mean_and_rms(&chosen, bits);
    Ok(FitResult { target: FitTarget::F, per_n_estimates: est, extrapolated: mean, window, residual_norm: rms, intercept: None })
}

fn default_window(series: &[(usize, Float)]) -> FitWindow {
    let hi = series.last().unwrap().0;
    let lo = series[0].0;
    let width = (hi - lo + 1).div_ceil(3).max(2);
    FitWindow { lo: (hi + 1).saturating_sub(width).max(lo), hi }
}

fn kappa_residuals(series: &[(usize, Float)], log_f: &Float, log_g: Option<&Float>, mode: GExponent, bits: u32) -> Vec<(usize, Float)> {
    series
        .iter()
        .map(|(n, l)| {
            let n2 = u32::try_from(n * n).expect("n^2 fits in u32");
            let mut r = Float::with_val(bits, l - Float::with_val(bits, log_f * n2));
            if let Some(g) = log_g {
                let power = match mode {
                    GExponent::N => Float::with_val(bits, *n),
                    GExponent::SqrtN => Float::with_val(bits, *n).sqrt(),
                };
                r -= Float::with_val(bits, g * power);
            }
            (*n, r)
        })
        .collect()
}

/// Least-squares slope of `r_n = log Z_n - n^2 log F - (n or sqrt n) log G`
/// against `log n` over the window; the intercept estimates `log C`.
/// Per-n estimates are the slopes between consecutive `n`.
pub fn fit_kappa(
    series: &[(usize, Float)],
    log_f: &Float,
    log_g: Option<&Float>,
    mode: GExponent,
    window: Option<FitWindow>,
) -> Result<FitResult> {
    let bits = check_series(series, 2)?.max(log_f.prec());
    let r = kappa_residuals(series, log_f, log_g, mode, bits);
    let window = window.unwrap_or_else(|| default_window(series));
    let chosen = select(&r, window)?;
    if chosen.len() < 2 {
        return Err(Error::InsufficientData("the exponent fit needs at least two values of n in the window".into()));
    }
    let xs: Vec<Float> = chosen.iter().map(|(n, _)| Float::with_val(bits, *n).ln()).collect();
    let count = chosen.len() as u32;
    let mut mx = Float::with_val(bits, 0);
    let mut my = Float::with_val(bits, 0);
    for (x, (_, y)) in xs.iter().zip(&chosen) {
        mx += x;
        my += y;
    }
    mx /= count;
    my /= count;
    let mut sxy = Float::with_val(bits, 0);
    let mut sxx = Float::with_val(bits, 0);
    for (x, (_, y)) in xs.iter().zip(&chosen) {
        let dx = Float::with_val(bits, x - &mx);
        sxy += Float::with_val(bits, &dx * Float::with_val(bits, y - &my));
        sxx += dx.square();
    }
    let slope = sxy / sxx;
    let intercept = Float::with_val(bits, &my - Float::with_val(bits, &slope * &mx));
    let mut ss = Float::with_val(bits, 0);
    for (x, (_, y)) in xs.iter().zip(&chosen) {
        let fit = Float::with_val(bits, &slope * x) + &intercept;
        ss += Float::with_val(bits, y - fit).square();
    }
    let per_n = r
        .windows(2)
        .map(|w| {
            let dx = Float::with_val(bits, w[1].0).ln() - Float::with_val(bits, w[0].0).ln();
            (w[1].0, Float::with_val(bits, &w[1].1 - &w[0].1) / dx)
        })
        .collect();
    Ok(FitResult {
        target: FitTarget::Kappa,
        per_n_estimates: per_n,
        extrapolated: slope,
        window,
        residual_norm: (ss / count).sqrt(),
        intercept: Some(intercept),
    })
}

/// `log C` as the window mean of `log Z_n - log_prediction_n`, for
/// predictions that leave the constant out.
pub fn fit_constant(
    series: &[(usize, Float)],
    predictions: &[AsymptoticPrediction],
    window: Option<FitWindow>,
) -> Result<FitResult> {
    let bits = check_series(series, 1)?;
    if predictions.len() != series.len() || predictions.iter().zip(series).any(|(p, (n, _))| p.n != *n) {
        return Err(Error::InsufficientData("predictions must cover the same n as the series".into()));
    }
    let est: Vec<(usize, Float)> = series
        .iter()
        .zip(predictions)
        .map(|((n, l), p)| (*n, Float::with_val(bits, l - &p.log_prediction)))
        .collect();
    let window = window.unwrap_or_else(|| default_window(series));
    let chosen = select(&est, window)?;
    let (mean, rms) = mean_and_rms(&chosen, bits);
    Ok(FitResult { target: FitTarget::C, per_n_estimates: est, extrapolated: mean, window, residual_norm: rms, intercept: None })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(x: f64) -> Float {
        Float::with_val(256, x)
    }

    fn pi_over(k: u32) -> Float {
        Float::with_val(256, Constant::Pi) / k
    }

    fn near(a: &Float, b: f64, tol: f64) -> bool {
        (a.to_f64() - b).abs() < tol
    }

    #[test]
    fn disordered_values() {
        let ctx = PrecisionContext::default();
        let p = predict_disordered(&f(0.0), &pi_over(3), 5, &ctx).unwrap();
        assert!((p.f.clone() - f(9.0) / 8u32).abs() < 1e-70);
        assert!((p.kappa.clone().unwrap() + f(5.0) / 36u32).abs() < 1e-70);
        assert!(kappa_disordered(&pi_over(4), 256).abs() < 1e-70);
        assert!(near(&kappa_disordered(&f(1e-12), 256), 1.0 / 12.0, 1e-12));
        assert!(p.g.is_none() && p.c.is_none());
    }

    #[test]
    fn ferro_n1() {
        let ctx = PrecisionContext::default();
        let p = predict_ferro(&f(2.0), &f(1.0), 1, &ctx).unwrap();
        let expected = (1.0 - (-4f64).exp()) * (-1f64).exp() * 3f64.sinh();
        assert!((p.value().to_f64() / expected - 1.0).abs() < 1e-14);
        assert!(*p.g.as_ref().unwrap() < 1);
    }

    #[test]
    fn euler_product_first_factor() {
        let g = f(1.0);
        let prod = ferro_euler_product(&g, 256).unwrap();
        let c = predict_ferro(&f(2.0), &g, 1, &PrecisionContext::default()).unwrap().c.unwrap();
        assert!(prod < c);
        // second factor dominates the gap
        let gap = Float::with_val(256, &prod / &c);
        assert!(near(&gap, 1.0 - (-8f64).exp(), 1e-5));
        assert!(near(&prod, 0.9813489005452084, 1e-15));
    }

    #[test]
    fn crit_fd_alpha3() {
        let ctx = PrecisionContext::default();
        let p = predict_crit_fd(&f(3.0), 4, &ctx).unwrap();
        assert_eq!(p.f, 2);
        let expected = (-2.612375348685488 / std::f64::consts::PI.sqrt()).exp();
        assert!(near(p.g.as_ref().unwrap(), expected, 1e-14));
        assert_eq!(p.g_exponent, GExponent::SqrtN);
        assert!(predict_crit_fd(&f(1.0), 4, &ctx).is_err());
    }

    #[test]
    fn af_theta_alternates_at_t0() {
        let ctx = PrecisionContext::default();
        let even = predict_af(&f(0.0), &f(1.0), 4, &ctx).unwrap();
        let odd = predict_af(&f(0.0), &f(1.0), 3, &ctx).unwrap();
        let q = even.nome.clone().unwrap();
        let t0 = theta4(&f(0.0), &q, 256).unwrap();
        let t1 = theta4(&pi_over(2), &q, 256).unwrap();
        assert!((even.theta_factor.unwrap() - t0).abs() < 1e-60);
        assert!((odd.theta_factor.unwrap() - t1).abs() < 1e-60);
        let p = predict_af(&f(0.3), &f(1.0), 7, &ctx).unwrap();
        assert!(p.f > 0 && p.f.is_finite());
        let th = p.theta_factor.unwrap();
        assert!(th > 0 && th < 2);
    }

    #[test]
    fn critical_afd_has_no_prediction() {
        let ctx = PrecisionContext::default();
        assert!(predict(&PhaseParams::critical_afd(f(0.2)).unwrap(), 3, &ctx).is_err());
    }

    fn synthetic(log_f: f64, log_g: f64, log_c: f64, kappa: f64) -> Vec<(usize, Float)> {
        (1..=20)
            .map(|n| {
                let nf = f(n as f64);
                let v = f(log_f) * (n * n) as u32 + f(log_g) * n as u32 + f(log_c) + nf.ln() * f(kappa);
                (n, v)
            })
            .collect()
    }

    #[test]
    fn free_energy_exact_on_synthetic() {
        let fit = fit_free_energy(&synthetic(0.7, -0.3, 1.1, 0.0), None).unwrap();
        for (_, e) in &fit.per_n_estimates {
            assert!(near(e, 0.7, 1e-60));
        }
        assert!(near(&fit.extrapolated, 0.7, 1e-60));
        assert_eq!(fit.window, FitWindow { lo: 14, hi: 20 });
        assert!(fit_free_energy(&synthetic(0.7, 0.0, 0.0, 0.0)[..3], None).is_err());
    }

    #[test]
    fn kappa_exact_on_synthetic() {
        let s: Vec<_> = (1..=10).map(|n| (n, f(n as f64).ln() * 0.25 + 1u32)).collect();
        let fit = fit_kappa(&s, &f(0.0), None, GExponent::N, None).unwrap();
        assert!(near(&fit.extrapolated, 0.25, 1e-60));
        assert!(near(&fit.intercept.unwrap().exp(), std::f64::consts::E, 1e-14));
        let s = synthetic(0.5, -0.2, 0.3, -0.4);
        let fit = fit_kappa(&s, &f(0.5), Some(&f(-0.2)), GExponent::N, Some(FitWindow::new(5, 20).unwrap())).unwrap();
        assert!(near(&fit.extrapolated, -0.4, 1e-60));
        assert!(near(&fit.intercept.unwrap(), 0.3, 1e-60));
    }

    #[test]
    fn window_parsing() {
        assert_eq!("15:30".parse::<FitWindow>().unwrap(), FitWindow { lo: 15, hi: 30 });
        assert!("30:15".parse::<FitWindow>().is_err());
        assert!("abc".parse::<FitWindow>().is_err());
        assert_eq!(FitWindow::top_third(30), FitWindow { lo: 21, hi: 30 });
    }
}
