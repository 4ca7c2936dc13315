//! The formal radical extension Q(ζ)[s_2, …, s_{k-1}] with s_n² = [n]_q.
//!
//! `s_1` is identified with 1 since [1]_q = 1. Each term is a cyclotomic
//! coefficient times a square-free monomial in the remaining symbols, keyed
//! by a bit mask (bit n set ⇔ s_n present).

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_rational::BigRational;

use super::cyclotomic::{tables, Cyclotomic};
use super::ScalarError;

/// Largest order for which formal radicals are available (mask width).
pub const MAX_RADICAL_ORDER: u32 = 64;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RadicalScalar {
    k: u32,
    terms: BTreeMap<u64, Cyclotomic>,
}

impl RadicalScalar {
    pub fn zero(k: u32) -> Self {
        assert!(k >= 2, "order k must be at least 2");
        RadicalScalar {
            k,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(k: u32) -> Self {
        Self::from_cyclotomic(Cyclotomic::one(k))
    }

    pub fn from_integer(k: u32, value: i64) -> Self {
        Self::from_cyclotomic(Cyclotomic::from_integer(k, value))
    }

    pub fn from_cyclotomic(c: Cyclotomic) -> Self {
        let mut out = Self::zero(c.order());
        if !c.is_zero() {
            out.terms.insert(0, c);
        }
        out
    }

    /// The formal square root s_n = √[n]_q for 0 ≤ n ≤ k-1.
    pub fn sqrt_q_number(k: u32, n: u32) -> Result<Self, ScalarError> {
        if n >= k || k > MAX_RADICAL_ORDER {
            return Err(ScalarError::RadicalOutOfRange { k, n });
        }
        Ok(match n {
            0 => Self::zero(k),
            1 => Self::one(k),
            _ => {
                let mut out = Self::zero(k);
                out.terms.insert(1u64 << n, Cyclotomic::one(k));
                out
            }
        })
    }

    /// √([n]_q!) = s_1 s_2 ⋯ s_n as a radical monomial.
    pub fn sqrt_q_factorial(k: u32, n: u32) -> Result<Self, ScalarError> {
        if n >= k || k > MAX_RADICAL_ORDER {
            return Err(ScalarError::RadicalOutOfRange { k, n });
        }
        let mask = (2..=n).fold(0u64, |m, j| m | (1u64 << j));
        let mut out = Self::zero(k);
        out.terms.insert(mask, Cyclotomic::one(k));
        Ok(out)
    }

    pub fn order(&self) -> u32 {
        self.k
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).is_some_and(Cyclotomic::is_one)
    }

    /// Number of stored terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms as (radical indices, coefficient) pairs in mask order.
    pub fn terms(&self) -> impl Iterator<Item = (Vec<u32>, &Cyclotomic)> {
        self.terms.iter().map(|(&mask, c)| (mask_indices(mask), c))
    }

    /// The pure cyclotomic value, if no radical symbol remains.
    pub fn as_cyclotomic(&self) -> Option<Cyclotomic> {
        match self.terms.len() {
            0 => Some(Cyclotomic::zero(self.k)),
            1 => self.terms.get(&0).cloned(),
            _ => None,
        }
    }

    fn insert_term(&mut self, mask: u64, c: Cyclotomic) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&mask) {
            Some(existing) => {
                *existing += &c;
                if existing.is_zero() {
                    self.terms.remove(&mask);
                }
            }
            None => {
                self.terms.insert(mask, c);
            }
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, ScalarError> {
        check_order(self.k, other.k)?;
        let mut out = self.clone();
        for (&mask, c) in &other.terms {
            out.insert_term(mask, c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, ScalarError> {
        check_order(self.k, other.k)?;
        let t = tables(self.k);
        let mut out = Self::zero(self.k);
        for (&ma, ca) in &self.terms {
            for (&mb, cb) in &other.terms {
                let mut coeff = ca * cb;
                let mut shared = ma & mb;
                while shared != 0 {
                    let n = shared.trailing_zeros() as usize;
                    coeff = &coeff * t.q_number(n);
                    shared &= shared - 1;
                }
                out.insert_term(ma ^ mb, coeff);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Cyclotomic) -> Self {
        let mut out = Self::zero(self.k);
        for (&mask, coeff) in &self.terms {
            out.insert_term(mask, coeff * c);
        }
        out
    }

    pub fn scale_rational(&self, r: &BigRational) -> Self {
        let mut out = Self::zero(self.k);
        for (&mask, coeff) in &self.terms {
            out.insert_term(mask, coeff.scale(r));
        }
        out
    }

    /// Inverse of a single-term element, using 1/s_n = s_n/[n]_q.
    pub fn invert_monomial(&self) -> Result<Self, ScalarError> {
        let (&mask, c) = match self.terms.len() {
            0 => return Err(ScalarError::DivisionByZero),
            1 => self.terms.iter().next().unwrap(),
            _ => return Err(ScalarError::NotMonomial(self.terms.len())),
        };
        let t = tables(self.k);
        let mut denom = c.clone();
        let mut rest = mask;
        while rest != 0 {
            let n = rest.trailing_zeros() as usize;
            denom = &denom * t.q_number(n);
            rest &= rest - 1;
        }
        let mut out = Self::zero(self.k);
        out.terms.insert(mask, denom.inv()?);
        Ok(out)
    }

    /// Conjugation lifted to the radical ring: cyclotomic parts are
    /// conjugated and s_n ↦ ζ^{-2(n-1)} s_n, so that star(s_n)² = [n]_q̄.
    pub fn star(&self) -> Self {
        let mut out = Self::zero(self.k);
        for (&mask, c) in &self.terms {
            let shift: i64 = mask_indices(mask).iter().map(|&n| n as i64 - 1).sum();
            let phase = Cyclotomic::zeta_power(self.k, -2 * shift);
            out.insert_term(mask, &c.conj() * &phase);
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(self.k), |acc, _| &acc * self)
    }

    /// Float value with each s_n taken as the principal square root of
    /// [n]_q (argument in (-π/2, π/2]). For display and cross-checks only.
    pub fn to_complex(&self) -> Complex64 {
        let t = tables(self.k);
        self.terms
            .iter()
            .map(|(&mask, c)| {
                mask_indices(mask)
                    .into_iter()
                    .map(|n| t.q_number(n as usize).to_complex().sqrt())
                    .fold(c.to_complex(), |acc, s| acc * s)
            })
            .sum()
    }
}

fn mask_indices(mut mask: u64) -> Vec<u32> {
    let mut out = Vec::new();
    while mask != 0 {
        out.push(mask.trailing_zeros());
        mask &= mask - 1;
    }
    out
}

fn check_order(a: u32, b: u32) -> Result<(), ScalarError> {
    if a == b {
        Ok(())
    } else {
        Err(ScalarError::OrderMismatch { left: a, right: b })
    }
}

impl<'a> Add<&'a RadicalScalar> for &'a RadicalScalar {
    type Output = RadicalScalar;
    fn add(self, rhs: &'a RadicalScalar) -> RadicalScalar {
        self.checked_add(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Add for RadicalScalar {
    type Output = RadicalScalar;
    fn add(self, rhs: RadicalScalar) -> RadicalScalar {
        &self + &rhs
    }
}

impl<'a> Sub<&'a RadicalScalar> for &'a RadicalScalar {
    type Output = RadicalScalar;
    fn sub(self, rhs: &'a RadicalScalar) -> RadicalScalar {
        self + &(-rhs)
    }
}

impl Sub for RadicalScalar {
    type Output = RadicalScalar;
    fn sub(self, rhs: RadicalScalar) -> RadicalScalar {
        &self - &rhs
    }
}

impl Neg for &RadicalScalar {
    type Output = RadicalScalar;
    fn neg(self) -> RadicalScalar {
        RadicalScalar {
            k: self.k,
            terms: self.terms.iter().map(|(&m, c)| (m, -c)).collect(),
        }
    }
}

impl Neg for RadicalScalar {
    type Output = RadicalScalar;
    fn neg(self) -> RadicalScalar {
        -&self
    }
}

impl<'a> Mul<&'a RadicalScalar> for &'a RadicalScalar {
    type Output = RadicalScalar;
    fn mul(self, rhs: &'a RadicalScalar) -> RadicalScalar {
        self.checked_mul(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Mul for RadicalScalar {
    type Output = RadicalScalar;
    fn mul(self, rhs: RadicalScalar) -> RadicalScalar {
        &self * &rhs
    }
}

impl From<Cyclotomic> for RadicalScalar {
    fn from(c: Cyclotomic) -> Self {
        Self::from_cyclotomic(c)
    }
}

/// Renders as `(c)*s2*s3 + (c')` with terms in mask order; `0` for zero.
impl fmt::Display for RadicalScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (&mask, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            for n in mask_indices(mask) {
                write!(f, "*s{n}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for RadicalScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RadicalScalar[k={}]({})", self.k, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q_number;

    fn s(k: u32, n: u32) -> RadicalScalar {
        RadicalScalar::sqrt_q_number(k, n).unwrap()
    }

    #[test]
    fn square_of_radical_is_q_number() {
        for k in 3..=9 {
            for n in 1..k {
                let sq = &s(k, n) * &s(k, n);
                assert_eq!(sq.as_cyclotomic(), Some(q_number(k, n, false)), "k={k} n={n}");
            }
        }
    }

    #[test]
    fn identity_is_neutral() {
        let x = &s(5, 2) + &s(5, 3).scale(&Cyclotomic::zeta_power(5, 3));
        assert_eq!(&RadicalScalar::one(5) * &x, x);
    }

    #[test]
    fn difference_of_squares() {
        // (s1 + s2)(s1 - s2) = [1] - [2]
        let k = 4;
        let lhs = &(&s(k, 1) + &s(k, 2)) * &(&s(k, 1) - &s(k, 2));
        let rhs = &q_number(k, 1, false) - &q_number(k, 2, false);
        assert_eq!(lhs.as_cyclotomic(), Some(rhs.clone()));
        // principal-branch float cross-check
        let a = s(k, 1).to_complex() + s(k, 2).to_complex();
        let b = s(k, 1).to_complex() - s(k, 2).to_complex();
        assert!((a * b - rhs.to_complex()).norm() < 1e-12);
    }

    #[test]
    fn invert_monomials() {
        assert!(RadicalScalar::one(3).invert_monomial().unwrap().is_one());
        assert_eq!(s(3, 1).invert_monomial().unwrap(), s(3, 1));
        for k in 3..=8 {
            let inv = s(k, 2).invert_monomial().unwrap();
            let expected = s(k, 2).scale(&q_number(k, 2, false).inv().unwrap());
            assert_eq!(inv, expected);
            assert!((&s(k, 2) * &inv).is_one());
        }
        let f = RadicalScalar::sqrt_q_factorial(6, 5).unwrap();
        assert!((&f * &f.invert_monomial().unwrap()).is_one());
    }

    #[test]
    fn invert_rejects_bad_input() {
        assert_eq!(
            (&s(4, 2) + &s(4, 3)).invert_monomial(),
            Err(ScalarError::NotMonomial(2))
        );
        assert_eq!(
            RadicalScalar::zero(4).invert_monomial(),
            Err(ScalarError::DivisionByZero)
        );
    }

    #[test]
    fn star_examples() {
        let k = 5;
        let q = RadicalScalar::from(Cyclotomic::q_power(k, 1));
        assert_eq!(q.star(), RadicalScalar::from(Cyclotomic::q_power(k, -1)));
        assert_eq!(s(k, 1).star(), s(k, 1));
        assert_eq!(s(k, 2).star().star(), s(k, 2));
        for n in 1..k {
            let st = s(k, n).star();
            assert_eq!((&st * &st).as_cyclotomic(), Some(q_number(k, n, true)));
        }
    }

    #[test]
    fn to_complex_examples() {
        assert!((RadicalScalar::one(2).to_complex() - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let q4 = RadicalScalar::from(Cyclotomic::q_power(4, 1)).to_complex();
        assert!((q4 - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        // √(1 + exp(2πi/3)) on the principal branch
        let radicand = Complex64::new(1.0, 0.0) + Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
        assert!((s(3, 2).to_complex() - radicand.sqrt()).norm() < 1e-12);
    }

    #[test]
    fn out_of_range_radical() {
        assert_eq!(
            RadicalScalar::sqrt_q_number(3, 3),
            Err(ScalarError::RadicalOutOfRange { k: 3, n: 3 })
        );
    }

    #[test]
    fn display_format() {
        let k = 3;
        let x = &s(k, 2) + &RadicalScalar::from_integer(k, 2);
        assert_eq!(x.to_string(), "(2) + (1)*s2");
    }
}
