//! Computational toolkit for k-Fibonacci and k-Lucas numbers.
//!
//! The crate bundles the machinery needed to decide, with exact integer
//! arithmetic, whether expressions of the form `±4a·F_{k,n} + d²` can be
//! perfect squares, and to enumerate the integer points of the quartic
//! curves `y² = a²(k²+4)(x+b)²(x+c)² + 4(−1)ⁿ` that such questions encode:
//!
//! * [`arith`] — Jacobi symbols, exact integer square roots, p-adic
//!   valuations and a Miller–Rabin primality test;
//! * [`recurrences`] — fast-doubling evaluation of `F_{k,n}` / `L_{k,n}`
//!   (exact and modular), Pisano periods, the associate of a general
//!   second-order recurrence, and the index-reduction and valuation rules
//!   the sieve relies on;
//! * [`criterion`] — the two-sided Jacobi symbol identity relating
//!   `(±4a·F_{k,2n}+d² | L_{k,2n})` to `(±8a·F_{k,n}+d²·L_{k,n} | 64a²+(k²+4)d⁴)`,
//!   with a sweep harness;
//! * [`sieve`] — residue-class exclusion for `±4a·F_n + d²` square
//!   conditions, driven by per-prime Jacobi symbol tables;
//! * [`curves`] — brute-force and discriminant-based search for integer
//!   points on the quartic curves, plus the Pell correspondence.

pub mod arith;
pub mod criterion;
pub mod curves;
pub mod recurrences;
pub mod sieve;

use std::fmt;

/// The `±` choice appearing throughout the square conditions and the
/// two-sided criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    /// Both choices, in the order they are usually swept.
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    /// +1 or −1 as a machine integer.
    pub fn unit(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn is_plus(self) -> bool {
        matches!(self, Sign::Plus)
    }
}

impl std::ops::Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

impl std::str::FromStr for Sign {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "+" | "plus" => Ok(Sign::Plus),
            "-" | "minus" => Ok(Sign::Minus),
            other => Err(format!("expected '+' or '-', got {other:?}")),
        }
    }
}
