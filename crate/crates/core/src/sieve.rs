//! Modular square-exclusion sieve.
//!
//! For a condition `T(n) = ±4a·F_{k,n} + d²`, a perfect square `T(n)` forces
//! `(T(n) | Q) ≠ −1` for every odd prime `Q`.  Each sieve step tabulates the
//! symbol over one period of `F mod Q` and excludes the residue classes
//! where it is −1; folding steps over several primes confines the candidate
//! indices to ever sparser residue sets.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use rayon::prelude::*;
use thiserror::Error;

use crate::arith::{is_prime_u64, jacobi_u64, JacobiSign};
use crate::recurrences::{fib_lucas, ModularOrbit, RecurrenceError, RecurrenceParams};
use crate::Sign;

/// The thirteen-prime schedule whose combined exclusions confine solutions
/// of `4·F_n + 9 = square` to `n ≡ 0 (mod 2800)`.
pub const PLAN_2800: [u64; 13] = [3, 7, 5, 11, 401, 3001, 101, 13, 29, 281, 2801, 47, 1601];

/// Residue sets would explode past this combined modulus; `refine` errors
/// out instead.
pub const DEFAULT_MODULUS_CAP: u64 = 10_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SieveError {
    #[error("sieve modulus {0} must be an odd prime")]
    NotOddPrime(u64),
    #[error("duplicate prime {0} in plan")]
    DuplicatePrime(u64),
    #[error(
        "combined modulus {required} exceeds the cap {cap}; \
         reorder the plan so that small-period primes come first"
    )]
    ModulusCapExceeded { required: u128, cap: u64 },
    #[error("plan line {line}: cannot parse {content:?} as a prime")]
    PlanParse { line: usize, content: String },
    #[error("square condition requires positive a and d")]
    InvalidCondition,
    #[error(transparent)]
    Recurrence(#[from] RecurrenceError),
}

/// The square condition `T(n) = sign·4a·F_{k,n} + d²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SquareCondition {
    a: u64,
    d: u64,
    sign: Sign,
    params: RecurrenceParams,
}

impl SquareCondition {
    /// Condition on the classical sequence (`k = 1`).
    pub fn new(a: u64, d: u64, sign: Sign) -> Result<Self, SieveError> {
        Self::with_params(a, d, sign, RecurrenceParams::CLASSICAL)
    }

    pub fn with_params(
        a: u64,
        d: u64,
        sign: Sign,
        params: RecurrenceParams,
    ) -> Result<Self, SieveError> {
        if a == 0 || d == 0 {
            return Err(SieveError::InvalidCondition);
        }
        Ok(SquareCondition { a, d, sign, params })
    }

    pub fn a(&self) -> u64 {
        self.a
    }
    pub fn d(&self) -> u64 {
        self.d
    }
    pub fn sign(&self) -> Sign {
        self.sign
    }
    pub fn params(&self) -> RecurrenceParams {
        self.params
    }

    /// `T(n)` exactly.
    pub fn t_exact(&self, n: u64) -> BigInt {
        let f = fib_lucas(self.params, n as i64).expect("nonnegative index").f;
        self.t_of_f(&f)
    }

    /// `T` as a function of an externally supplied `F_{k,n}` value.
    pub fn t_of_f(&self, f: &BigInt) -> BigInt {
        BigInt::from(self.sign.unit()) * 4 * BigInt::from(self.a) * f
            + BigInt::from(self.d) * BigInt::from(self.d)
    }

    fn t_mod(&self, f_mod: u64, q: u64) -> u64 {
        let q = q as u128;
        let x = (4 * self.a as u128 % q) * (f_mod as u128) % q;
        let d2 = (self.d as u128 % q) * (self.d as u128 % q) % q;
        (match self.sign {
            Sign::Plus => (x + d2) % q,
            Sign::Minus => (d2 + q - x) % q,
        }) as u64
    }
}

/// Exclusions contributed by a single odd prime `Q`: the residues
/// `r mod period` with `(T(r) | Q) = −1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepResult {
    pub q: u64,
    pub period: u64,
    pub excluded: BTreeSet<u64>,
}

/// Tabulates the symbol `(T(r) | Q)` over one period of `F_{k,·} mod Q`.
/// Residues with `T(r) ≡ 0 (mod Q)` prove nothing about squareness and are
/// never excluded.
pub fn step_excluded(cond: &SquareCondition, q: u64) -> Result<StepResult, SieveError> {
    if q < 3 || q % 2 == 0 || !is_prime_u64(q) {
        return Err(SieveError::NotOddPrime(q));
    }
    let orbit = ModularOrbit::new(cond.params, q)?;
    let period = orbit.period();
    let mut excluded = BTreeSet::new();
    for r in 0..period {
        let t = cond.t_mod(orbit.f(r), q);
        if t != 0 && jacobi_u64(t, q) == JacobiSign::MinusOne {
            excluded.insert(r);
        }
    }
    Ok(StepResult { q, period, excluded })
}

/// Residue classes not yet excluded: every `n` with `T(n)` a perfect square
/// satisfies `n mod modulus ∈ allowed`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SieveState {
    modulus: u64,
    allowed: Vec<u64>,
    cap: u64,
}

impl Default for SieveState {
    fn default() -> Self {
        Self::new()
    }
}

impl SieveState {
    /// The unrestricted state: modulus 1, every index allowed.
    pub fn new() -> Self {
        Self::with_cap(DEFAULT_MODULUS_CAP)
    }

    pub fn with_cap(cap: u64) -> Self {
        SieveState { modulus: 1, allowed: vec![0], cap }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Sorted allowed residues in `[0, modulus)`.
    pub fn allowed(&self) -> &[u64] {
        &self.allowed
    }

    pub fn contains(&self, n: u64) -> bool {
        self.allowed.binary_search(&(n % self.modulus)).is_ok()
    }

    /// The allowed residues reduced mod `m`.
    pub fn reduce_mod(&self, m: u64) -> BTreeSet<u64> {
        self.allowed.iter().map(|r| r % m).collect()
    }

    /// Smallest modulus `m | modulus` whose lift reproduces the state
    /// exactly, with the reduced residue set.  A state that is really a
    /// single congruence (say `n ≡ 0 (mod 2800)` stored mod 5600) prints
    /// through this.
    pub fn canonical(&self) -> (u64, Vec<u64>) {
        let m = self.modulus;
        let mut divisors: Vec<u64> = Vec::new();
        let mut d = 1;
        while d * d <= m {
            if m % d == 0 {
                divisors.push(d);
                divisors.push(m / d);
            }
            d += 1;
        }
        divisors.sort_unstable();
        divisors.dedup();
        for d in divisors {
            let reduced: BTreeSet<u64> = self.allowed.iter().map(|r| r % d).collect();
            if reduced.len() as u64 * (m / d) == self.allowed.len() as u64 {
                return (d, reduced.into_iter().collect());
            }
        }
        unreachable!("d = modulus always reproduces the state")
    }
}

/// Lifts the state to `lcm(modulus, step.period)` and drops every residue
/// the step excludes.  Soundness is preserved: excluded classes cannot
/// carry perfect squares.
pub fn refine(state: &SieveState, step: &StepResult) -> Result<SieveState, SieveError> {
    let gcd = state.modulus.gcd(&step.period);
    let required = state.modulus as u128 / gcd as u128 * step.period as u128;
    if required > state.cap as u128 {
        return Err(SieveError::ModulusCapExceeded { required, cap: state.cap });
    }
    let modulus = required as u64;
    let mut allowed = Vec::new();
    for &r0 in &state.allowed {
        let mut r = r0;
        while r < modulus {
            if !step.excluded.contains(&(r % step.period)) {
                allowed.push(r);
            }
            r += state.modulus;
        }
    }
    allowed.sort_unstable();
    Ok(SieveState { modulus, allowed, cap: state.cap })
}

/// One line of a pipeline trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceRecord {
    pub q: u64,
    pub period: u64,
    pub excluded_count: u64,
    pub modulus: u64,
    pub allowed_count: u64,
}

/// Folds [`refine`] over the steps of every prime in order.  Step tables
/// for distinct primes are computed concurrently; the fold itself is
/// order-independent up to the intermediate trace.
pub fn run_pipeline(
    cond: &SquareCondition,
    primes: &[u64],
) -> Result<(SieveState, Vec<TraceRecord>), SieveError> {
    run_pipeline_from(cond, primes, SieveState::new())
}

pub fn run_pipeline_from(
    cond: &SquareCondition,
    primes: &[u64],
    initial: SieveState,
) -> Result<(SieveState, Vec<TraceRecord>), SieveError> {
    let mut seen = BTreeSet::new();
    for &q in primes {
        if !seen.insert(q) {
            return Err(SieveError::DuplicatePrime(q));
        }
    }
    let steps: Vec<StepResult> = primes
        .par_iter()
        .map(|&q| step_excluded(cond, q))
        .collect::<Result<_, _>>()?;
    let mut state = initial;
    let mut trace = Vec::with_capacity(steps.len());
    for step in &steps {
        state = refine(&state, step)?;
        trace.push(TraceRecord {
            q: step.q,
            period: step.period,
            excluded_count: step.excluded.len() as u64,
            modulus: state.modulus,
            allowed_count: state.allowed.len() as u64,
        });
    }
    Ok((state, trace))
}

/// Scans odd primes up to `prime_bound` and reports, without mutating the
/// state, those whose step would remove at least one currently-allowed
/// residue, together with the number removed.  Primes whose period would
/// push the combined modulus past the cap are passed over.
pub fn auto_search(
    cond: &SquareCondition,
    prime_bound: u64,
    state: &SieveState,
) -> Vec<(u64, u64)> {
    odd_primes_up_to(prime_bound)
        .into_par_iter()
        .filter_map(|q| {
            let step = step_excluded(cond, q).ok()?;
            let next = refine(state, &step).ok()?;
            let lifted = state.allowed.len() as u64 * (next.modulus() / state.modulus());
            let gain = lifted - next.allowed().len() as u64;
            (gain >= 1).then_some((q, gain))
        })
        .collect()
}

fn odd_primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 3 {
        return Vec::new();
    }
    let mut composite = vec![false; bound as usize + 1];
    let mut primes = Vec::new();
    for p in 3..=bound as usize {
        if p % 2 == 0 || composite[p] {
            continue;
        }
        primes.push(p as u64);
        let mut multiple = p * p;
        while multiple <= bound as usize {
            composite[multiple] = true;
            multiple += p;
        }
    }
    primes
}

/// Parses a sieve plan: one prime per line, `#` starts a comment, blank
/// lines ignored.  Primality itself is validated later, by the pipeline.
pub fn parse_plan(text: &str) -> Result<Vec<u64>, SieveError> {
    let mut primes = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let q: u64 = line.parse().map_err(|_| SieveError::PlanParse {
            line: idx + 1,
            content: line.to_string(),
        })?;
        primes.push(q);
    }
    Ok(primes)
}
