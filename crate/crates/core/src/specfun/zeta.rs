use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::precision::PrecisionContext;

/// `zeta(3/2)` from the alternating eta series, accelerated with the
/// Borwein weights `d_k`: `zeta(3/2) = eta(3/2) / (1 - 2^(-1/2))`.
pub fn zeta_three_halves(bits: u32) -> Float {
    let work = bits + 32;
    // Error of the n-term acceleration is about 3 / (3 + sqrt 8)^n.
    let n = ((f64::from(work) * std::f64::consts::LN_2) / (3.0 + 8f64.sqrt()).ln()).ceil() as u64 + 2;

    // d_k = n sum_{i<=k} (n+i-1)! 4^i / ((n-i)! (2i)!)
    let mut d = Vec::with_capacity(n as usize + 1);
    let mut acc = Rational::new();
    for i in 0..=n {
        let num = Integer::from(Integer::factorial((n + i - 1) as u32)) * Integer::from(Integer::u_pow_u(4, i as u32));
        let den = Integer::from(Integer::factorial((n - i) as u32)) * Integer::from(Integer::factorial((2 * i) as u32));
        acc += Rational::from((num, den));
        d.push(Rational::from(&acc * n));
    }
    let dn = &d[n as usize];
    let s = Float::with_val(work, 1.5);
    let mut sum = Float::with_val(work, 0);
    for k in 0..n {
        let weight = Float::with_val(work, Rational::from(&d[k as usize] - dn));
        let term = weight / Float::with_val(work, k + 1).pow(&s);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    let eta = -sum / Float::with_val(work, dn);
    let factor = Float::with_val(work, 1) - Float::with_val(work, 2).sqrt().recip();
    Float::with_val(bits, eta / factor)
}

pub fn zeta_three_halves_ctx(ctx: &PrecisionContext) -> Float {
    zeta_three_halves(ctx.bits())
}
