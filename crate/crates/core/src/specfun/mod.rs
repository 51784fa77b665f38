//! Multiprecision scalar kernels: derivatives of `phi`, negative-order
//! polylogarithms, Jacobi theta functions, `zeta(3/2)` and the moment
//! sequences of the five weight families.

mod moments;
mod phi;
mod polylog;
mod theta;
mod zeta;

pub use moments::{
    af_moment, crit_afd_moment, crit_fd_moment, ferro_moment, MomentFamily, MomentSequence,
};
pub use phi::{derivative_polynomial, phi, phi_derivatives, phi_derivatives_at, TrigKind};
pub use polylog::{eulerian_row, polylog_neg, polylog_neg_exact, polylog_numerator, EulerianNumbers};
pub use theta::{theta1, theta1_prime0, theta4, MAX_NOME};
pub use zeta::{zeta_three_halves, zeta_three_halves_ctx};

use rug::Integer;

/// `k!` as an exact integer.
pub fn factorial(k: u32) -> Integer {
    Integer::from(Integer::factorial(k))
}

/// `prod_{k<n} k!`.
pub fn superfactorial(n: usize) -> Integer {
    let mut acc = Integer::from(1);
    let mut f = Integer::from(1);
    for k in 0..n {
        if k > 0 {
            f *= k as u64;
        }
        acc *= &f;
    }
    acc
}
