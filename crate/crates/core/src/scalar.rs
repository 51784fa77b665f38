//! Arithmetic shared by the exact (rational) and multiprecision (float)
//! evaluation paths.

use std::fmt::Debug;

use rug::{Float, Integer, Rational};

/// A field element usable as a vertex weight.
///
/// Every value carries its own context (float precision), so constants are
/// derived from an existing value rather than created from nothing.
pub trait Scalar: Clone + Debug + Send + Sync {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn integer_like(&self, value: &Integer) -> Self;
    fn add_ref(&self, rhs: &Self) -> Self;
    fn sub_ref(&self, rhs: &Self) -> Self;
    fn mul_ref(&self, rhs: &Self) -> Self;
    fn div_ref(&self, rhs: &Self) -> Self;
    fn pow_u32(&self, exp: u32) -> Self;
    fn is_positive(&self) -> bool;
    fn is_zero(&self) -> bool;
    /// Equality within relative `2^(-tol_bits)`; exact for rationals.
    fn approx_eq(&self, rhs: &Self, tol_bits: u32) -> bool;
    fn to_f64(&self) -> f64;
    /// Exact rational value when the representation is exact.
    fn as_rational(&self) -> Option<Rational>;

    fn u64_like(&self, value: u64) -> Self {
        self.integer_like(&Integer::from(value))
    }

    fn add_assign_ref(&mut self, rhs: &Self) {
        *self = self.add_ref(rhs);
    }
}

impl Scalar for Rational {
    fn zero_like(&self) -> Self {
        Rational::new()
    }
    fn one_like(&self) -> Self {
        Rational::from(1)
    }
    fn integer_like(&self, value: &Integer) -> Self {
        Rational::from(value)
    }
    fn add_ref(&self, rhs: &Self) -> Self {
        Rational::from(self + rhs)
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        Rational::from(self - rhs)
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        Rational::from(self * rhs)
    }
    fn div_ref(&self, rhs: &Self) -> Self {
        Rational::from(self / rhs)
    }
    fn pow_u32(&self, exp: u32) -> Self {
        use rug::ops::Pow;
        Rational::from(self.pow(exp))
    }
    fn is_positive(&self) -> bool {
        self.cmp0() == std::cmp::Ordering::Greater
    }
    fn is_zero(&self) -> bool {
        self.cmp0() == std::cmp::Ordering::Equal
    }
    fn approx_eq(&self, rhs: &Self, _tol_bits: u32) -> bool {
        self == rhs
    }
    fn to_f64(&self) -> f64 {
        Rational::to_f64(self)
    }
    fn as_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }
    fn add_assign_ref(&mut self, rhs: &Self) {
        *self += rhs;
    }
}

impl Scalar for Float {
    fn zero_like(&self) -> Self {
        Float::with_val(self.prec(), 0)
    }
    fn one_like(&self) -> Self {
        Float::with_val(self.prec(), 1)
    }
    fn integer_like(&self, value: &Integer) -> Self {
        Float::with_val(self.prec(), value)
    }
    fn add_ref(&self, rhs: &Self) -> Self {
        Float::with_val(self.prec(), self + rhs)
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        Float::with_val(self.prec(), self - rhs)
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        Float::with_val(self.prec(), self * rhs)
    }
    fn div_ref(&self, rhs: &Self) -> Self {
        Float::with_val(self.prec(), self / rhs)
    }
    fn pow_u32(&self, exp: u32) -> Self {
        use rug::ops::Pow;
        Float::with_val(self.prec(), self.pow(exp))
    }
    fn is_positive(&self) -> bool {
        self.is_sign_positive() && !Float::is_zero(self) && !self.is_nan()
    }
    fn is_zero(&self) -> bool {
        Float::is_zero(self)
    }
    fn approx_eq(&self, rhs: &Self, tol_bits: u32) -> bool {
        let prec = self.prec().max(rhs.prec());
        let diff = Float::with_val(prec, self - rhs).abs();
        let scale = Float::with_val(prec, self.abs_ref()).max(&Float::with_val(prec, rhs.abs_ref()));
        let exp = -i32::try_from(tol_bits).unwrap_or(i32::MAX);
        diff <= scale * Float::with_val(prec, Float::i_exp(1, exp))
    }
    fn to_f64(&self) -> f64 {
        Float::to_f64(self)
    }
    fn as_rational(&self) -> Option<Rational> {
        self.to_rational()
    }
    fn add_assign_ref(&mut self, rhs: &Self) {
        *self += rhs;
    }
}

/// Parses a decimal literal (`"0.3"`, `"-1.5e-2"`, `"7/3"`) exactly.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    if let Ok(r) = text.parse::<Rational>() {
        return Some(r);
    }
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all_digits = format!("{int_part}{frac_part}");
    let numer: Integer = all_digits.parse().ok()?;
    let scale = exponent - i32::try_from(frac_part.len()).ok()?;
        let mut value = Rational::from(numer);
    if scale >= 0 {
        value *= Integer::from(Integer::u_pow_u(10, scale.unsigned_abs()));
    } else {
        value /= Integer::from(Integer::u_pow_u(10, scale.unsigned_abs()));
    }
    if negative {
        value = -value;
    }
    Some(value)
}

/// Exact decimal expansion of a rational, when it terminates.
pub fn terminating_decimal(value: &Rational) -> Option<String> {
    let mut den = value.denom().clone();
    let mut twos = 0u32;
    let mut fives = 0u32;
    while den.is_divisible_u(2) {
        den /= 2;
        twos += 1;
    }
    while den.is_divisible_u(5) {
        den /= 5;
        fives += 1;
    }
    if den != 1 {
        return None;
    }
    let places = twos.max(fives);
    let scaled = Rational::from(value * Integer::from(Integer::u_pow_u(10, places)));
    let digits = scaled.numer().clone().abs().to_string();
    let sign = if value.cmp0() == std::cmp::Ordering::Less { "-" } else { "" };
    if places == 0 {
        return Some(format!("{sign}{digits}"));
    }
    let places = places as usize;
    let padded = format!("{digits:0>width$}", width = places + 1);
    let (int_part, frac_part) = padded.split_at(padded.len() - places);
    Some(format!("{sign}{int_part}.{frac_part}"))
}

/// Decimal string of a float carrying `digits` significant digits.
pub fn float_decimal(value: &Float, digits: usize) -> String {
    value.to_string_radix(10, Some(digits.max(1)))
}

/// Decimal string of a rational: exact when the expansion terminates,
/// `p/q` otherwise.
pub fn rational_string(value: &Rational) -> String {
    terminating_decimal(value).unwrap_or_else(|| value.to_string())
}
