//! Exact scalars: the cyclotomic field Q(ζ_{4k}), its formal radical
//! extension, and q-numbers.
//!
//! q = ζ⁴, q^{1/2} = ζ², q^{1/4} = ζ with ζ = exp(2πi/(4k)).

mod cyclotomic;
mod radical;

pub use cyclotomic::{cyclotomic_polynomial, Cyclotomic};
pub use radical::{RadicalScalar, MAX_RADICAL_ORDER};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("order mismatch: k={left} vs k={right}")]
    OrderMismatch { left: u32, right: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("expected a single-term radical monomial, found {0} terms")]
    NotMonomial(usize),
    #[error("radical s_{n} is not defined for k={k}")]
    RadicalOutOfRange { k: u32, n: u32 },
}

/// ζ^j for ζ = exp(2πi/(4k)).
pub fn zeta_power(k: u32, j: i64) -> Cyclotomic {
    Cyclotomic::zeta_power(k, j)
}

/// [n]_q = 1 + q + … + q^{n-1}, or the q̄ version when `conjugate` is set.
pub fn q_number(k: u32, n: u32, conjugate: bool) -> Cyclotomic {
    let step = if conjugate { -4 } else { 4 };
    (0..n as i64).fold(Cyclotomic::zero(k), |acc, j| {
        &acc + &Cyclotomic::zeta_power(k, step * j)
    })
}

/// [n]_q! = [1]_q ⋯ [n]_q, with [0]_q! = 1. Zero once n ≥ k.
pub fn q_factorial(k: u32, n: u32, conjugate: bool) -> Cyclotomic {
    (1..=n).fold(Cyclotomic::one(k), |acc, j| &acc * &q_number(k, j, conjugate))
}
