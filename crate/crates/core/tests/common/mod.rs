//! Independent numerical oracles shared by the integration tests.
#![allow(dead_code)]

use rug::float::Constant;
use rug::Float;

pub fn fl(bits: u32, x: f64) -> Float {
    Float::with_val(bits, x)
}

pub fn pi(bits: u32) -> Float {
    Float::with_val(bits, Constant::Pi)
}

pub fn rel(a: &Float, b: &Float) -> f64 {
    sixvertex::precision::relative_difference(a, b).to_f64()
}

/// Trapezoid sum of `g(u)` over the real line with step `h`, walking out
/// from zero in both directions until the terms are negligible.
fn trapezoid_line<F: Fn(&Float) -> Float>(g: &F, h: &Float, bits: u32) -> Float {
    let eps = Float::with_val(bits, Float::i_exp(1, -(bits as i32) - 16));
    let mut sum = g(&Float::with_val(bits, 0));
    for sign in [1i32, -1] {
        let mut quiet = 0;
        for k in 1u32.. {
            let u = Float::with_val(bits, h * k) * sign;
            let term = g(&u);
            sum += &term;
            let small = Float::with_val(bits, term.abs_ref()) <= Float::with_val(bits, sum.abs_ref()) * &eps;
            quiet = if small { quiet + 1 } else { 0 };
            if quiet >= 3 || k > 200_000 {
                break;
            }
        }
    }
    sum * h
}

/// Halves the step until two successive trapezoid sums agree to `tol`.
fn refine<F: Fn(&Float) -> Float>(g: F, bits: u32, tol: f64) -> Float {
    let mut h = fl(bits, 0.25);
    let mut prev = trapezoid_line(&g, &h, bits);
    loop {
        h /= 2u32;
        let next = trapezoid_line(&g, &h, bits);
        let diff = rel(&prev, &next);
        if diff < tol || h < 1e-6 {
            return next;
        }
        prev = next;
    }
}

/// `int_0^inf f(x) dx` by the exp-sinh substitution `x = exp(pi/2 sinh u)`.
pub fn integrate_half_line<F: Fn(&Float) -> Float>(f: F, bits: u32, tol: f64) -> Float {
    let half_pi = pi(bits) / 2u32;
    refine(
        |u| {
            let s = Float::with_val(bits, &half_pi * Float::with_val(bits, u.sinh_ref()));
            let x = Float::with_val(bits, s.exp_ref());
            let jac = Float::with_val(bits, &x * &half_pi) * Float::with_val(bits, u.cosh_ref());
            f(&x) * jac
        },
        bits,
        tol,
    )
}

/// `int_R f(x) dx` by the sinh-sinh substitution `x = sinh(pi/2 sinh u)`.
pub fn integrate_line<F: Fn(&Float) -> Float>(f: F, bits: u32, tol: f64) -> Float {
    let half_pi = pi(bits) / 2u32;
    refine(
        |u| {
            let s = Float::with_val(bits, &half_pi * Float::with_val(bits, u.sinh_ref()));
            let x = Float::with_val(bits, s.sinh_ref());
            let jac = Float::with_val(bits, s.cosh_ref()) * &half_pi * Float::with_val(bits, u.cosh_ref());
            f(&x) * jac
        },
        bits,
        tol,
    )
}

/// `k`-th derivative by the central difference
/// `sum_j (-1)^j C(k,j) f(x + (k/2 - j) h) / h^k`, error `O(h^2)`.
pub fn central_derivative<F: Fn(&Float) -> Float>(f: F, x: &Float, k: u32, h: &Float, bits: u32) -> Float {
    let mut sum = Float::with_val(bits, 0);
    let mut binom = rug::Integer::from(1);
    for j in 0..=k {
        let offset = Float::with_val(bits, k as f64 / 2.0 - j as f64) * h;
        let term = f(&Float::with_val(bits, x + offset)) * &binom;
        if j % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        binom *= k - j;
        binom /= j + 1;
    }
    use rug::ops::Pow;
    sum / Float::with_val(bits, h.pow(k))
}

/// `sum_{l >= start} term(l)` until the terms have been negligible for a
/// while; for rapidly decaying positive tails.
pub fn direct_sum<F: Fn(i64) -> Float>(term: F, start: i64, step: i64, bits: u32) -> Float {
    let eps = Float::with_val(bits, Float::i_exp(1, -(bits as i32) - 16));
    let mut sum = Float::with_val(bits, 0);
    let mut quiet = 0;
    let mut l = start;
    loop {
        let t = term(l);
        sum += &t;
        let small = Float::with_val(bits, t.abs_ref()) <= Float::with_val(bits, sum.abs_ref()) * &eps;
        quiet = if small { quiet + 1 } else { 0 };
        if quiet >= 5 || (l - start).abs() > 10_000_000 {
            return sum;
        }
        l += step;
    }
}
