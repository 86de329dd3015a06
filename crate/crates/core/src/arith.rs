//! Arbitrary-precision integer primitives.
//!
//! Everything here is exact: Jacobi symbols by binary reciprocity, square
//! roots by integer Newton iteration with a final equality check, p-adic
//! valuations by exact division, and a Miller–Rabin primality test that is
//! deterministic below 2⁶⁴.

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ArithError {
    #[error("Jacobi symbol lower argument must be odd and positive, got {0}")]
    BadJacobiLower(BigInt),
    #[error("square root of negative number {0}")]
    NegativeSquareInput(BigInt),
    #[error("p-adic valuation of 0 is undefined")]
    ValuationOfZero,
    #[error("{0} is not prime")]
    NotPrime(BigInt),
}

/// Value of a Jacobi symbol. `Zero` exactly when the arguments share a
/// common factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum JacobiSign {
    MinusOne,
    Zero,
    One,
}

impl JacobiSign {
    pub fn unit(self) -> i8 {
        match self {
            JacobiSign::MinusOne => -1,
            JacobiSign::Zero => 0,
            JacobiSign::One => 1,
        }
    }

    pub fn from_unit(v: i8) -> JacobiSign {
        match v {
            -1 => JacobiSign::MinusOne,
            0 => JacobiSign::Zero,
            1 => JacobiSign::One,
            other => panic!("not a Jacobi symbol value: {other}"),
        }
    }
}

impl std::ops::Neg for JacobiSign {
    type Output = JacobiSign;
    fn neg(self) -> JacobiSign {
        match self {
            JacobiSign::MinusOne => JacobiSign::One,
            JacobiSign::Zero => JacobiSign::Zero,
            JacobiSign::One => JacobiSign::MinusOne,
        }
    }
}

impl std::ops::Mul for JacobiSign {
    type Output = JacobiSign;
    fn mul(self, rhs: JacobiSign) -> JacobiSign {
        JacobiSign::from_unit(self.unit() * rhs.unit())
    }
}

impl std::fmt::Display for JacobiSign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            JacobiSign::MinusOne => "-1",
            JacobiSign::Zero => "0",
            JacobiSign::One => "+1",
        })
    }
}

fn low_u32(x: &BigInt, m: u32) -> u32 {
    (x % m).to_u32().expect("remainder fits in u32")
}

/// Jacobi symbol `(upper | lower)` for odd positive `lower`.
///
/// The upper argument may be any integer: a negative upper contributes the
/// factor `(−1 | n) = (−1)^((n−1)/2)`, and `(0 | 1) = 1` while `(0 | n) = 0`
/// for `n > 1`.  The symbol is completely multiplicative in both arguments.
pub fn jacobi(upper: &BigInt, lower: &BigInt) -> Result<JacobiSign, ArithError> {
    if !lower.is_positive() || lower.is_even() {
        return Err(ArithError::BadJacobiLower(lower.clone()));
    }
    let mut n = lower.clone();
    let mut a = upper.clone();
    let mut acc = JacobiSign::One;
    if a.is_negative() {
        // (−1 | n) = −1 exactly when n ≡ 3 (mod 4)
        if low_u32(&n, 4) == 3 {
            acc = -acc;
        }
        a = -a;
    }
    a = a.mod_floor(&n);
    while !a.is_zero() {
        let tz = a.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            a >>= tz;
            // (2 | n) = −1 exactly when n ≡ ±3 (mod 8)
            let n8 = low_u32(&n, 8);
            if tz % 2 == 1 && (n8 == 3 || n8 == 5) {
                acc = -acc;
            }
        }
        // reciprocity: both sides odd here
        if low_u32(&a, 4) == 3 && low_u32(&n, 4) == 3 {
            acc = -acc;
        }
        std::mem::swap(&mut a, &mut n);
        a = a.mod_floor(&n);
    }
    if n.is_one() {
        Ok(acc)
    } else {
        Ok(JacobiSign::Zero)
    }
}

/// Specialization of [`jacobi`] to machine words, for the sieve's inner
/// loops.  `lower` must be odd and positive.
pub fn jacobi_u64(upper: u64, lower: u64) -> JacobiSign {
    debug_assert!(lower % 2 == 1 && lower > 0);
    let mut a = upper % lower;
    let mut n = lower;
    let mut acc = 1i8;
    while a != 0 {
        let tz = a.trailing_zeros();
        a >>= tz;
        let n8 = n % 8;
        if tz % 2 == 1 && (n8 == 3 || n8 == 5) {
            acc = -acc;
        }
        if a % 4 == 3 && n % 4 == 3 {
            acc = -acc;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    if n == 1 {
        JacobiSign::from_unit(acc)
    } else {
        JacobiSign::Zero
    }
}

/// Exact square root: `Some(r)` with `r² = m` when `m` is a perfect square,
/// `None` otherwise.  Rejects negative input; never goes through floats.
pub fn integer_sqrt_exact(m: &BigInt) -> Result<Option<BigInt>, ArithError> {
    if m.is_negative() {
        return Err(ArithError::NegativeSquareInput(m.clone()));
    }
    let r = m.sqrt();
    if &(&r * &r) == m {
        Ok(Some(r))
    } else {
        Ok(None)
    }
}

/// Floor square root of a `u128`, by Newton iteration on an initial float
/// estimate.
pub fn isqrt_u128(n: u128) -> u128 {
    if n == 0 {
        return 0;
    }
    let mut x = (n as f64).sqrt() as u128 + 2;
    loop {
        let y = (x + n / x) / 2;
        if y >= x {
            break;
        }
        x = y;
    }
    while x.checked_mul(x).map_or(true, |sq| sq > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).map_or(false, |sq| sq <= n) {
        x += 1;
    }
    x
}

/// Perfect-square test for a `u128`, with a residue pre-filter in front of
/// the Newton iteration.
pub fn is_square_u128(n: u128) -> Option<u128> {
    // squares mod 64 land in 12 of the 64 classes
    const SQUARE_MOD_64: u64 = {
        let mut mask = 0u64;
        let mut r = 0u64;
        while r < 64 {
            mask |= 1 << ((r * r) % 64);
            r += 1;
        }
        mask
    };
    if SQUARE_MOD_64 >> ((n % 64) as u32) & 1 == 0 {
        return None;
    }
    let r = isqrt_u128(n);
    if r * r == n {
        Some(r)
    } else {
        None
    }
}

/// Largest `e` with `pᵉ | m`, for prime `p` and nonzero `m`.
///
/// Strips one factor at a time but accelerates through high valuations by
/// squaring the divisor, so the number of exact divisions is logarithmic in
/// the result.
pub fn padic_valuation(p: &BigInt, m: &BigInt) -> Result<u64, ArithError> {
    if m.is_zero() {
        return Err(ArithError::ValuationOfZero);
    }
    if !is_prime(p) {
        return Err(ArithError::NotPrime(p.clone()));
    }
    let mut val = 0u64;
    let mut current = m.abs();
    loop {
        let (q, r) = current.div_rem(p);
        if !r.is_zero() {
            break;
        }
        val += 1;
        current = q;
        let mut power = p * p;
        let mut step = 2u64;
        loop {
            let (q2, r2) = current.div_rem(&power);
            if !r2.is_zero() {
                break;
            }
            val += step;
            current = q2;
            power = &power * &power;
            step *= 2;
        }
    }
    Ok(val)
}

/// Witnesses that make Miller–Rabin deterministic for all inputs < 3.3·10²⁴,
/// which covers every `u64`.
const SMALL_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Miller–Rabin primality test.  Deterministic for |n| < 2⁶⁴; for larger
/// inputs uses 40 fixed prime bases (see [`is_prime_with_rounds`]).
pub fn is_prime(n: &BigInt) -> bool {
    is_prime_with_rounds(n, 40)
}

/// Miller–Rabin with a configurable number of rounds for inputs above 2⁶⁴.
/// Rounds use the first `rounds` primes as bases, so results are
/// reproducible run to run.
pub fn is_prime_with_rounds(n: &BigInt, rounds: u32) -> bool {
    if n.is_negative() {
        return false;
    }
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    // n > 2^64 here, so every small prime base is a valid witness candidate
    if n.is_even() {
        return false;
    }
    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    let mut base_iter = (2u64..).filter(|&b| is_prime_u64(b));
    for _ in 0..rounds {
        let b = BigInt::from(base_iter.next().unwrap());
        if !miller_rabin_round(n, &n_minus_1, &d, s, &b) {
            return false;
        }
    }
    true
}

fn miller_rabin_round(n: &BigInt, n_minus_1: &BigInt, d: &BigInt, s: u64, base: &BigInt) -> bool {
    let mut x = base.modpow(d, n);
    if x.is_one() || x == *n_minus_1 {
        return true;
    }
    for _ in 1..s {
        x = x.modpow(&BigInt::from(2u32), n);
        if x == *n_minus_1 {
            return true;
        }
    }
    false
}

/// Deterministic Miller–Rabin for machine words.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in SMALL_WITNESSES.iter() {
        let mut x = pow_mod_u64(a % n, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u64(acc, base, m);
        }
        base = mul_mod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}
