//! k-Fibonacci / k-Lucas sequences and their relatives.
//!
//! `F_{k,n}` satisfies `F_{k,n+2} = k·F_{k,n+1} + F_{k,n}` with `F_{k,0} = 0`,
//! `F_{k,1} = 1`; the companion `L_{k,n}` starts `(2, k)`.  All exact values
//! are computed by fast doubling on the pair `(F_n, F_{n+1})`, and the
//! modular variants run the same ladder in word arithmetic.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::arith;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RecurrenceError {
    #[error("recurrence multiplier must be positive")]
    ZeroMultiplier,
    #[error("negative index {n} is only supported for k = 1, got k = {k}")]
    NegativeIndex { k: u64, n: i64 },
    #[error("modulus must be at least 2, got {0}")]
    BadModulus(u64),
    #[error("period search modulo {modulus} aborted past the bound {bound}")]
    PeriodSearchExceeded { modulus: u64, bound: u128 },
    #[error("degenerate recurrence: U₁² − A·U₀·U₁ − U₀² = 0")]
    DegenerateRecurrence,
    #[error("index multiplier g must be odd, got {0}")]
    EvenMultiplier(i64),
    #[error("index out of machine range")]
    IndexOverflow,
    #[error("valuation rule requires a positive index divisible by 8, got {0}")]
    IndexNotMultipleOf8(u64),
}

/// The multiplier `k` of a k-Fibonacci / k-Lucas pair, with its
/// discriminant `D = k² + 4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RecurrenceParams {
    k: u64,
}

impl RecurrenceParams {
    /// Classical Fibonacci/Lucas: `k = 1`.
    pub const CLASSICAL: RecurrenceParams = RecurrenceParams { k: 1 };

    pub fn new(k: u64) -> Result<Self, RecurrenceError> {
        if k == 0 {
            return Err(RecurrenceError::ZeroMultiplier);
        }
        Ok(RecurrenceParams { k })
    }

    pub fn k(self) -> u64 {
        self.k
    }

    /// `D = k² + 4`.
    pub fn discriminant(self) -> BigInt {
        BigInt::from(self.k) * BigInt::from(self.k) + 4
    }
}

/// One evaluated index: `(n, F_{k,n}, L_{k,n})`.
///
/// Every pair satisfies `L² − (k²+4)·F² = 4·(−1)ⁿ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairFL {
    pub n: i64,
    pub f: BigInt,
    pub l: BigInt,
}

/// `(F_{k,n}, F_{k,n+1})` by fast doubling, exact.
fn fib_pair(k: u64, n: u64) -> (BigInt, BigInt) {
    let kb = BigInt::from(k);
    let mut f = BigInt::zero();
    let mut g = BigInt::one();
    if n == 0 {
        return (f, g);
    }
    let bits = 64 - n.leading_zeros();
    for i in (0..bits).rev() {
        // (F_m, F_{m+1}) → (F_{2m}, F_{2m+1})
        let c = &f * (2u32 * &g - &kb * &f);
        let d = &f * &f + &g * &g;
        if (n >> i) & 1 == 1 {
            g = &kb * &d + c;
            f = d;
        } else {
            f = c;
            g = d;
        }
    }
    (f, g)
}

/// Exact `(F_{k,n}, L_{k,n})` in O(log n) doubling steps.
///
/// Negative indices follow the classical extension `F_{−n} = (−1)^{n+1}·F_n`,
/// `L_{−n} = (−1)ⁿ·L_n` and are supported for `k = 1` only.
pub fn fib_lucas(params: RecurrenceParams, n: i64) -> Result<PairFL, RecurrenceError> {
    let k = params.k;
    let (mag, flip_f, flip_l) = if n < 0 {
        if k != 1 {
            return Err(RecurrenceError::NegativeIndex { k, n });
        }
        let mag = n.unsigned_abs();
        (mag, mag % 2 == 0, mag % 2 == 1)
    } else {
        (n as u64, false, false)
    };
    let (f, fnext) = fib_pair(k, mag);
    let l = 2u32 * fnext - BigInt::from(k) * &f;
    let pair = PairFL {
        n,
        f: if flip_f { -f } else { f },
        l: if flip_l { -l } else { l },
    };
    debug_assert!({
        let pell = &pair.l * &pair.l - params.discriminant() * &pair.f * &pair.f;
        pell == BigInt::from(if n.rem_euclid(2) == 0 { 4 } else { -4 })
    });
    Ok(pair)
}

fn fib_pair_mod(k: u64, n: u64, m: u64) -> (u64, u64) {
    let m128 = m as u128;
    let k = (k % m) as u128;
    let mut f = 0u128;
    let mut g = 1 % m128;
    if n == 0 {
        return (f as u64, g as u64);
    }
    let bits = 64 - n.leading_zeros();
    for i in (0..bits).rev() {
        let t = (2 * g % m128 + m128 - k * f % m128) % m128;
        let c = f * t % m128;
        let d = (f * f % m128 + g * g % m128) % m128;
        if (n >> i) & 1 == 1 {
            g = (k * d + c) % m128;
            f = d;
        } else {
            f = c;
            g = d;
        }
    }
    (f as u64, g as u64)
}

/// `(F_{k,n} mod m, L_{k,n} mod m)`, agreeing with [`fib_lucas`] reduced
/// mod `m`.  Requires `m ≥ 2`; negative `n` follows the `k = 1` extension.
pub fn fib_lucas_mod(
    params: RecurrenceParams,
    n: i64,
    m: u64,
) -> Result<(u64, u64), RecurrenceError> {
    if m < 2 {
        return Err(RecurrenceError::BadModulus(m));
    }
    let k = params.k;
    let (mag, flip_f, flip_l) = if n < 0 {
        if k != 1 {
            return Err(RecurrenceError::NegativeIndex { k, n });
        }
        let mag = n.unsigned_abs();
        (mag, mag % 2 == 0, mag % 2 == 1)
    } else {
        (n as u64, false, false)
    };
    let m128 = m as u128;
    let (f, fnext) = fib_pair_mod(k, mag, m);
    let l = ((2 * fnext as u128 % m128 + m128 - (k % m) as u128 * f as u128 % m128) % m128) as u64;
    let negate = |v: u64| if v == 0 { 0 } else { m - v };
    Ok((
        if flip_f { negate(f) } else { f },
        if flip_l { negate(l) } else { l },
    ))
}

/// Minimal π with `(F_{n+π}, L_{n+π}) ≡ (F_n, L_n) (mod m)` for all n.
///
/// Scans for the first return of the state `(F_n, F_{n+1}) mod m` to its
/// initial value; the step map is invertible mod every m, so the first
/// return is the period.  Aborts past `6·m²`.
pub fn pisano_period(params: RecurrenceParams, m: u64) -> Result<u64, RecurrenceError> {
    if m < 2 {
        return Err(RecurrenceError::BadModulus(m));
    }
    let m128 = m as u128;
    let k = (params.k % m) as u128;
    let bound = 6 * m128 * m128;
    let init = (0u128, 1 % m128);
    let (mut a, mut b) = init;
    let mut steps: u128 = 0;
    loop {
        let next = (k * b + a) % m128;
        a = b;
        b = next;
        steps += 1;
        if (a, b) == init {
            return Ok(steps as u64);
        }
        if steps > bound {
            return Err(RecurrenceError::PeriodSearchExceeded { modulus: m, bound });
        }
    }
}

/// Residue tables above this period length are not materialized; lookups
/// fall back to modular fast doubling.
pub const DEFAULT_TABLE_CAP: u64 = 1_000_000;

/// The orbit of `(F_{k,n}, L_{k,n}) mod m`: its period and, when small
/// enough, the full residue tables.  Immutable once built.
#[derive(Debug, Clone)]
pub struct ModularOrbit {
    params: RecurrenceParams,
    modulus: u64,
    period: u64,
    tables: Option<(Vec<u64>, Vec<u64>)>,
}

impl ModularOrbit {
    pub fn new(params: RecurrenceParams, m: u64) -> Result<Self, RecurrenceError> {
        Self::with_table_cap(params, m, DEFAULT_TABLE_CAP)
    }

    pub fn with_table_cap(
        params: RecurrenceParams,
        m: u64,
        cap: u64,
    ) -> Result<Self, RecurrenceError> {
        let period = pisano_period(params, m)?;
        let tables = if period <= cap {
            let m128 = m as u128;
            let k = (params.k % m) as u128;
            let mut f_table = Vec::with_capacity(period as usize);
            let mut l_table = Vec::with_capacity(period as usize);
            let (mut a, mut b) = (0u128, 1 % m128);
            for _ in 0..period {
                f_table.push(a as u64);
                l_table.push(((2 * b % m128 + m128 - k * a % m128) % m128) as u64);
                let next = (k * b + a) % m128;
                a = b;
                b = next;
            }
            Some((f_table, l_table))
        } else {
            None
        };
        Ok(ModularOrbit { params, modulus: m, period, tables })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn period(&self) -> u64 {
        self.period
    }

    /// `(F_{k,n} mod m, L_{k,n} mod m)` for any n ≥ 0.
    pub fn f_l(&self, n: u64) -> (u64, u64) {
        let r = n % self.period;
        match &self.tables {
            Some((f_table, l_table)) => (f_table[r as usize], l_table[r as usize]),
            None => fib_lucas_mod(self.params, r as i64, self.modulus)
                .expect("modulus validated at construction"),
        }
    }

    pub fn f(&self, n: u64) -> u64 {
        self.f_l(n).0
    }

    pub fn l(&self, n: u64) -> u64 {
        self.f_l(n).1
    }
}

/// A second-order recurrence `U_{n+2} = A·U_{n+1} + U_n` with arbitrary
/// integer seeds, together with the data of its associate sequence.
///
/// Non-degeneracy means `C = U₁² − A·U₀·U₁ − U₀² ≠ 0`; the associate `V`
/// (seeds `V₀ = 2U₁ − A·U₀`, `V₁ = A·U₁ + 2U₀`) then satisfies
/// `V² − (A²+4)·U² = 4C·(−1)ⁿ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralRecurrence {
    a: u64,
    u0: BigInt,
    u1: BigInt,
}

impl GeneralRecurrence {
    pub fn new(a: u64, u0: BigInt, u1: BigInt) -> Result<Self, RecurrenceError> {
        if a == 0 {
            return Err(RecurrenceError::ZeroMultiplier);
        }
        let rec = GeneralRecurrence { a, u0, u1 };
        if rec.invariant_c().is_zero() {
            return Err(RecurrenceError::DegenerateRecurrence);
        }
        Ok(rec)
    }

    pub fn multiplier(&self) -> u64 {
        self.a
    }

    pub fn seeds(&self) -> (&BigInt, &BigInt) {
        (&self.u0, &self.u1)
    }

    /// `C = U₁² − A·U₀·U₁ − U₀²`.
    pub fn invariant_c(&self) -> BigInt {
        &self.u1 * &self.u1 - BigInt::from(self.a) * &self.u0 * &self.u1 - &self.u0 * &self.u0
    }

    /// `D = A² + 4`.
    pub fn discriminant(&self) -> BigInt {
        BigInt::from(self.a) * BigInt::from(self.a) + 4
    }

    /// `(V₀, V₁)`.
    pub fn associate_seeds(&self) -> (BigInt, BigInt) {
        let a = BigInt::from(self.a);
        (2 * &self.u1 - &a * &self.u0, a * &self.u1 + 2 * &self.u0)
    }
}

/// Exact `(U_n, V_n)` of a non-degenerate recurrence and its associate.
///
/// Both sequences are combinations of the k-Fibonacci basis with `k = A`:
/// `U_n = U₁·F_n + U₀·F_{n−1}`, and likewise for `V`.
pub fn associate_pair(rec: &GeneralRecurrence, n: u64) -> (BigInt, BigInt) {
    let (v0, v1) = rec.associate_seeds();
    if n == 0 {
        return (rec.u0.clone(), v0);
    }
    let (f, fnext) = fib_pair(rec.a, n);
    let fprev = fnext - BigInt::from(rec.a) * &f;
    let u = &rec.u1 * &f + &rec.u0 * &fprev;
    let v = v1 * &f + v0 * fprev;
    (u, v)
}

/// One identity that failed at one index (expected never).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityViolation {
    pub identity: &'static str,
    pub n: u64,
}

/// Outcome of [`identity_suite`].
#[derive(Debug, Clone)]
pub struct IdentityReport {
    pub k: u64,
    pub n_max: u64,
    pub checks: u64,
    pub violations: Vec<IdentityViolation>,
}

impl IdentityReport {
    pub fn all_hold(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks, for all `0 ≤ n ≤ n_max`:
///
/// * `L_{k,2n} = L_{k,n}² − 2(−1)ⁿ`
/// * `F_{k,2n} = F_{k,n}·L_{k,n}`
/// * `2L_{k,2n} = (k²+4)F_{k,n}² + L_{k,n}²`
/// * `L_{k,n}² − (k²+4)F_{k,n}² = 4(−1)ⁿ`
///
/// Both windows advance by pure recurrence unrolling, so the checks do not
/// assume the doubling formulas they certify.
pub fn identity_suite(params: RecurrenceParams, n_max: u64) -> IdentityReport {
    let kb = BigInt::from(params.k);
    let disc = params.discriminant();
    let mut violations = Vec::new();
    let mut checks = 0u64;
    let step = |f: &mut BigInt, g: &mut BigInt| {
        let next = &kb * &*g + &*f;
        *f = std::mem::replace(g, next);
    };
    let (mut f_n, mut g_n) = (BigInt::zero(), BigInt::one());
    let (mut f_2n, mut g_2n) = (BigInt::zero(), BigInt::one());
    for n in 0..=n_max {
        let l_n = 2u32 * &g_n - &kb * &f_n;
        let l_2n = 2u32 * &g_2n - &kb * &f_2n;
        let unit = BigInt::from(if n % 2 == 0 { 1 } else { -1 });
        let mut check = |name: &'static str, holds: bool| {
            checks += 1;
            if !holds {
                violations.push(IdentityViolation { identity: name, n });
            }
        };
        check("L_{k,2n} = L_{k,n}^2 - 2(-1)^n", l_2n == &l_n * &l_n - 2 * &unit);
        check("F_{k,2n} = F_{k,n} L_{k,n}", f_2n == &f_n * &l_n);
        check(
            "2 L_{k,2n} = (k^2+4) F_{k,n}^2 + L_{k,n}^2",
            2u32 * &l_2n == &disc * &f_n * &f_n + &l_n * &l_n,
        );
        check(
            "L_{k,n}^2 - (k^2+4) F_{k,n}^2 = 4(-1)^n",
            &l_n * &l_n - &disc * &f_n * &f_n == 4 * unit,
        );
        step(&mut f_n, &mut g_n);
        step(&mut f_2n, &mut g_2n);
        step(&mut f_2n, &mut g_2n);
    }
    IdentityReport { k: params.k, n_max, checks, violations }
}

/// Certificate produced by [`lemma1_reduce`]: the congruence
/// `F_{2kg+m} ≡ sign·F_{2k+m} (mod L_{2k})` together with the exact
/// quotient witnessing it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexReduction {
    pub sign: i8,
    pub modulus: BigInt,
    pub quotient: BigInt,
}

/// Reduces a classical Fibonacci index modulo `L_{2·kk}`:
/// `F_{2·kk·g+m} ≡ F_{2·kk+m} (mod L_{2·kk})` when `g ≡ 1 (mod 4)` and
/// `≡ −F_{2·kk+m}` when `g ≡ 3 (mod 4)`.  The returned quotient `q`
/// satisfies `F_{2·kk·g+m} − sign·F_{2·kk+m} = q·L_{2·kk}` exactly.
pub fn lemma1_reduce(kk: u64, g: i64, m: i64) -> Result<IndexReduction, RecurrenceError> {
    if g.rem_euclid(2) == 0 {
        return Err(RecurrenceError::EvenMultiplier(g));
    }
    let sign: i8 = if g.rem_euclid(4) == 1 { 1 } else { -1 };
    let to_i64 = |v: i128| i64::try_from(v).map_err(|_| RecurrenceError::IndexOverflow);
    let two_kk = 2i128 * kk as i128;
    let idx_full = to_i64(two_kk * g as i128 + m as i128)?;
    let idx_reduced = to_i64(two_kk + m as i128)?;
    let classical = RecurrenceParams::CLASSICAL;
    let f_full = fib_lucas(classical, idx_full)?.f;
    let f_reduced = fib_lucas(classical, idx_reduced)?.f;
    let modulus = fib_lucas(classical, to_i64(two_kk)?)?.l;
    let diff = if sign == 1 { f_full - f_reduced } else { f_full + f_reduced };
    let (quotient, remainder) = diff.div_rem(&modulus);
    assert!(
        remainder.is_zero(),
        "index reduction congruence failed at kk={kk}, g={g}, m={m}"
    );
    Ok(IndexReduction { sign, modulus, quotient })
}

/// Indices up to this bound have the valuation rule re-checked against a
/// direct computation of `ν₇(F_m)`.
pub const NU7_VERIFY_BOUND: u64 = 1 << 14;

/// `ν₇(F_m) = ν₇(m) + 1` for `m ≡ 0 (mod 8)` (classical sequence).
///
/// Returns the rule's value; for `m ≤ 2¹⁴` it is cross-checked against the
/// valuation of the fully computed Fibonacci number.
pub fn nu7_rule(m: u64) -> Result<u64, RecurrenceError> {
    if m == 0 || m % 8 != 0 {
        return Err(RecurrenceError::IndexNotMultipleOf8(m));
    }
    let mut e = 0u64;
    let mut t = m;
    while t % 7 == 0 {
        t /= 7;
        e += 1;
    }
    let value = e + 1;
    if m <= NU7_VERIFY_BOUND {
        let f = fib_lucas(RecurrenceParams::CLASSICAL, m as i64)?.f;
        let direct = arith::padic_valuation(&BigInt::from(7), &f)
            .expect("F_m > 0 for m > 0");
        assert_eq!(direct, value, "valuation rule failed at m = {m}");
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(k: u64) -> RecurrenceParams {
        RecurrenceParams::new(k).unwrap()
    }

    fn naive_fl(k: u64, n: u64) -> (BigInt, BigInt) {
        let kb = BigInt::from(k);
        let (mut f0, mut f1) = (BigInt::zero(), BigInt::one());
        let (mut l0, mut l1) = (BigInt::from(2), kb.clone());
        for _ in 0..n {
            f0 = std::mem::replace(&mut f1, &kb * &f1 + f0);
            l0 = std::mem::replace(&mut l1, &kb * &l1 + l0);
        }
        (f0, l0)
    }

    #[test]
    fn initial_terms() {
        let p = fib_lucas(params(1), 0).unwrap();
        assert_eq!((p.f, p.l), (BigInt::zero(), BigInt::from(2)));
    }

    #[test]
    fn small_unrolled_values() {
        // k=2: 0,1,2,5 and 2,2,6,14
        let p = fib_lucas(params(2), 3).unwrap();
        assert_eq!((p.f, p.l), (BigInt::from(5), BigInt::from(14)));
        let p = fib_lucas(params(1), 16).unwrap();
        assert_eq!((p.f, p.l), (BigInt::from(987), BigInt::from(2207)));
    }

    #[test]
    fn doubling_matches_naive_exact() {
        for k in 1..=9u64 {
            let kb = BigInt::from(k);
            let (mut f0, mut f1) = (BigInt::zero(), BigInt::one());
            let (mut l0, mut l1) = (BigInt::from(2), kb.clone());
            for n in 0..=2000i64 {
                let p = fib_lucas(params(k), n).unwrap();
                assert_eq!(p.f, f0, "F k={k} n={n}");
                assert_eq!(p.l, l0, "L k={k} n={n}");
                f0 = std::mem::replace(&mut f1, &kb * &f1 + f0);
                l0 = std::mem::replace(&mut l1, &kb * &l1 + l0);
            }
        }
    }

    #[test]
    fn doubling_matches_naive_modular() {
        for k in 1..=9u64 {
            for m in [2u64, 3, 67, 1000] {
                let (mut a, mut b) = (0u64, 1 % m);
                for n in 0..=10_000i64 {
                    let (f, l) = fib_lucas_mod(params(k), n, m).unwrap();
                    assert_eq!(f, a, "k={k} n={n} m={m}");
                    let expect_l = (2 * b as u128 % m as u128 + m as u128
                        - (k % m) as u128 * a as u128 % m as u128)
                        % m as u128;
                    assert_eq!(l as u128, expect_l, "k={k} n={n} m={m}");
                    let next = ((k % m) as u128 * b as u128 + a as u128) % m as u128;
                    a = b;
                    b = next as u64;
                }
            }
        }
    }

    #[test]
    fn modular_agrees_with_exact() {
        let (f, l) = fib_lucas_mod(params(1), 256, 67).unwrap();
        assert_eq!(f, 18);
        let exact = fib_lucas(params(1), 256).unwrap();
        assert_eq!(BigInt::from(f), exact.f.mod_floor(&BigInt::from(67)));
        assert_eq!(BigInt::from(l), exact.l.mod_floor(&BigInt::from(67)));
        assert_eq!(fib_lucas_mod(params(1), 0, 5).unwrap(), (0, 2));
        assert!(fib_lucas_mod(params(1), 3, 1).is_err());
    }

    #[test]
    fn negative_indices_classical_only() {
        for n in 1..=50i64 {
            let pos = fib_lucas(RecurrenceParams::CLASSICAL, n).unwrap();
            let neg = fib_lucas(RecurrenceParams::CLASSICAL, -n).unwrap();
            let sign = BigInt::from(if n % 2 == 0 { -1 } else { 1 });
            assert_eq!(neg.f, sign * &pos.f);
            let lsign = BigInt::from(if n % 2 == 0 { 1 } else { -1 });
            assert_eq!(neg.l, lsign * &pos.l);
        }
        assert_eq!(
            fib_lucas(params(2), -1).unwrap_err(),
            RecurrenceError::NegativeIndex { k: 2, n: -1 }
        );
    }

    #[test]
    fn negative_indices_match_backwards_recurrence() {
        // F_{n} = F_{n+2} − F_{n+1} run downwards from (F_0, F_1)
        let (mut f_next, mut f_cur) = (BigInt::one(), BigInt::zero()); // F_1, F_0
        let (mut l_next, mut l_cur) = (BigInt::one(), BigInt::from(2)); // L_1, L_0
        for n in 0..=60i64 {
            let p = fib_lucas(RecurrenceParams::CLASSICAL, -n).unwrap();
            assert_eq!(p.f, f_cur, "n={n}");
            assert_eq!(p.l, l_cur, "n={n}");
            f_cur = std::mem::replace(&mut f_next, f_cur.clone()) - &f_cur;
            l_cur = std::mem::replace(&mut l_next, l_cur.clone()) - &l_cur;
        }
    }

    #[test]
    fn pisano_small_periods() {
        assert_eq!(pisano_period(params(1), 3).unwrap(), 8);
        assert_eq!(pisano_period(params(1), 7).unwrap(), 16);
        assert_eq!(pisano_period(params(1), 67).unwrap(), 136);
        assert_eq!(pisano_period(params(1), 1601).unwrap(), 160);
        assert!(pisano_period(params(1), 0).is_err());
        assert!(pisano_period(params(1), 1).is_err());
    }

    #[test]
    fn orbit_tables_reproduce_sequence() {
        for k in [1u64, 3] {
            for m in [3u64, 7, 67] {
                let orbit = ModularOrbit::new(params(k), m).unwrap();
                for n in 0..3 * orbit.period() {
                    let (f, l) = fib_lucas_mod(params(k), n as i64, m).unwrap();
                    assert_eq!(orbit.f_l(n), (f, l), "k={k} m={m} n={n}");
                }
            }
        }
    }

    #[test]
    fn orbit_without_tables_falls_back() {
        let with_tables = ModularOrbit::new(params(1), 67).unwrap();
        let on_demand = ModularOrbit::with_table_cap(params(1), 67, 1).unwrap();
        assert_eq!(on_demand.period(), 136);
        for n in 0..300 {
            assert_eq!(with_tables.f_l(n), on_demand.f_l(n));
        }
    }

    #[test]
    fn associate_classical_specialization() {
        let rec = GeneralRecurrence::new(1, BigInt::zero(), BigInt::one()).unwrap();
        assert_eq!(associate_pair(&rec, 0), (BigInt::zero(), BigInt::from(2)));
        assert_eq!(associate_pair(&rec, 5), (BigInt::from(5), BigInt::from(11)));
    }

    #[test]
    fn associate_satisfies_pell_identity() {
        let rec = GeneralRecurrence::new(3, BigInt::from(-2), BigInt::from(5)).unwrap();
        let d = rec.discriminant();
        let c = rec.invariant_c();
        // independent seed iteration for U and V
        let (mut u0, mut u1) = (rec.seeds().0.clone(), rec.seeds().1.clone());
        let (mut v0, mut v1) = rec.associate_seeds();
        let a = BigInt::from(rec.multiplier());
        for n in 0..=200u64 {
            let (u, v) = associate_pair(&rec, n);
            assert_eq!(u, u0, "U at {n}");
            assert_eq!(v, v0, "V at {n}");
            let unit = BigInt::from(if n % 2 == 0 { 1 } else { -1 });
            assert_eq!(&v * &v - &d * &u * &u, 4 * &c * unit, "Pell at {n}");
            u0 = std::mem::replace(&mut u1, &a * &u1 + u0);
            v0 = std::mem::replace(&mut v1, &a * &v1 + v0);
        }
    }

    #[test]
    fn degenerate_recurrence_rejected() {
        // U₀ = 0, U₁ = 0 has C = 0
        assert_eq!(
            GeneralRecurrence::new(2, BigInt::zero(), BigInt::zero()).unwrap_err(),
            RecurrenceError::DegenerateRecurrence
        );
    }

    #[test]
    fn identity_suite_examples() {
        // k=1, n=8: L₁₆ = L₈² − 2 and F₁₆ = F₈·L₈
        let report = identity_suite(params(1), 8);
        assert!(report.all_hold());
        let l8 = fib_lucas(params(1), 8).unwrap().l;
        assert_eq!(BigInt::from(2207), &l8 * &l8 - 2);
        assert_eq!(BigInt::from(987), BigInt::from(21) * 47);
        // k=3, n=0: 2L₀ = 13·0 + 4
        assert!(identity_suite(params(3), 0).all_hold());
    }

    #[test]
    fn lemma1_examples() {
        let r = lemma1_reduce(2, 1, 0).unwrap();
        assert_eq!(r.sign, 1);
        assert!(r.quotient.is_zero());

        // F₁₉ ≡ −F₇ (mod L₆): 4181 + 13 = 18·233
        let r = lemma1_reduce(3, 3, 1).unwrap();
        assert_eq!(r.sign, -1);
        assert_eq!(r.modulus, BigInt::from(18));
        assert_eq!(r.quotient, BigInt::from(233));

        let r = lemma1_reduce(8, 7, 4).unwrap();
        assert_eq!(r.sign, -1);

        assert_eq!(lemma1_reduce(3, 4, 0).unwrap_err(), RecurrenceError::EvenMultiplier(4));
    }

    #[test]
    fn lemma1_sweep() {
        for kk in 1..=20u64 {
            for m in -40..=40i64 {
                for g in [1i64, 3, 5, 7, 9, 11] {
                    lemma1_reduce(kk, g, m).unwrap();
                }
            }
        }
    }

    #[test]
    fn nu7_rule_examples() {
        assert_eq!(nu7_rule(8).unwrap(), 1); // F₈ = 21 = 3·7
        assert_eq!(nu7_rule(16).unwrap(), 1); // F₁₆ = 987 = 3·7·47
        assert_eq!(nu7_rule(56).unwrap(), 2);
        assert_eq!(nu7_rule(392).unwrap(), 3); // ν₇(392) = 2
        assert!(nu7_rule(12).is_err());
        assert!(nu7_rule(0).is_err());
    }

    proptest! {
        #[test]
        fn pell_identity_holds(k in 1u64..=9, n in 0i64..=500) {
            let p = fib_lucas(params(k), n).unwrap();
            let d = params(k).discriminant();
            let unit = BigInt::from(if n % 2 == 0 { 4 } else { -4 });
            prop_assert_eq!(&p.l * &p.l - d * &p.f * &p.f, unit);
        }

        #[test]
        fn modular_reduction_consistent(k in 1u64..=9, n in 0i64..=600, m in 2u64..5000) {
            let exact = fib_lucas(params(k), n).unwrap();
            let (f, l) = fib_lucas_mod(params(k), n, m).unwrap();
            prop_assert_eq!(BigInt::from(f), exact.f.mod_floor(&BigInt::from(m)));
            prop_assert_eq!(BigInt::from(l), exact.l.mod_floor(&BigInt::from(m)));
        }

        #[test]
        fn index_reduction_congruence(kk in 1u64..=20, g_idx in 0usize..6, m in -40i64..=40) {
            let g = [1i64, 3, 5, 7, 9, 11][g_idx];
            let r = lemma1_reduce(kk, g, m).unwrap();
            prop_assert_eq!(r.sign, if g % 4 == 1 { 1 } else { -1 });
        }
    }
}
