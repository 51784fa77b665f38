use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Rows of Eulerian numbers `A(k, j)`, built once and shared read-only.
#[derive(Clone, Debug)]
pub struct EulerianNumbers {
    rows: Vec<Vec<Integer>>,
}

impl EulerianNumbers {
    /// Rows `0..=kmax`. Row 0 is `[1]` so that `Li_0(q) = q / (1 - q)`
    /// follows the same closed form as the other orders.
    pub fn up_to(kmax: usize) -> Self {
        let mut rows: Vec<Vec<Integer>> = vec![vec![Integer::from(1)]];
        for k in 1..=kmax {
            let prev = &rows[k - 1];
            let row = (0..k)
                .map(|j| {
                    let mut v = Integer::new();
                    if j < prev.len() {
                        v += Integer::from(&prev[j] * (j as u64 + 1));
                    }
                    if j >= 1 && j - 1 < prev.len() && k > 1 {
                        v += Integer::from(&prev[j - 1] * (k - j) as u64);
                    }
                    v
                })
                .collect();
            rows.push(row);
        }
        EulerianNumbers { rows }
    }

    pub fn row(&self, k: usize) -> &[Integer] {
        &self.rows[k]
    }

    pub fn max_order(&self) -> usize {
        self.rows.len() - 1
    }

    /// `Li_{-k}(q) = q sum_j A(k, j) q^j / (1 - q)^(k+1)`.
    pub fn polylog<T: Scalar>(&self, k: usize, q: &T) -> Result<T> {
        check_unit_interval(q)?;
        let one = q.one_like();
        let mut num = q.zero_like();
        for c in self.row(k).iter().rev() {
            num = num.mul_ref(q).add_ref(&q.integer_like(c));
        }
        num = num.mul_ref(q);
        let exp = u32::try_from(k + 1).map_err(|_| Error::domain("polylog order too large"))?;
        let den = one.sub_ref(q).pow_u32(exp);
        Ok(num.div_ref(&den))
    }
}

fn check_unit_interval<T: Scalar>(q: &T) -> Result<()> {
    if !q.is_positive() || !q.one_like().sub_ref(q).is_positive() {
        return Err(Error::domain(format!("polylogarithm argument must satisfy 0 < q < 1, got {}", q.to_f64())));
    }
    Ok(())
}

pub fn eulerian_row(k: usize) -> Vec<Integer> {
    EulerianNumbers::up_to(k).rows.pop().unwrap()
}

/// Coefficients of the numerator `N_k(q) = sum_j A(k, j) q^(j+1)`, lowest
/// degree first, so that `Li_{-k}(q) = N_k(q) / (1 - q)^(k+1)`.
pub fn polylog_numerator(k: usize) -> Vec<Integer> {
    let mut coeffs = vec![Integer::new()];
    coeffs.extend(eulerian_row(k));
    coeffs
}

/// `Li_{-k}(q) = sum_{l >= 1} l^k q^l` for `0 < q < 1`.
pub fn polylog_neg(k: usize, q: &Float) -> Result<Float> {
    EulerianNumbers::up_to(k).polylog(k, q)
}

/// Exact rational `Li_{-k}(q)`.
pub fn polylog_neg_exact(k: usize, q: &Rational) -> Result<Rational> {
    EulerianNumbers::up_to(k).polylog(k, q)
}
