//! Exact arithmetic in the cyclotomic field Q(ζ) with ζ = exp(2πi/(4k)).
//!
//! Elements are stored in the power basis {1, ζ, …, ζ^(d-1)} where d is the
//! degree of Φ_{4k}. Every value is kept reduced modulo Φ_{4k}, so two
//! elements are equal exactly when their coefficient vectors are equal.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::ScalarError;

/// Precomputed reduction data for one order k.
#[derive(Debug)]
pub(crate) struct FieldTables {
    pub(crate) k: u32,
    /// 4k, the multiplicative order of ζ.
    pub(crate) modulus: u32,
    pub(crate) degree: usize,
    /// ζ^j reduced into the power basis, for j in 0..modulus.
    pub(crate) powers: Vec<Vec<i64>>,
    /// [n]_q for n in 0..k, filled lazily.
    q_numbers: OnceLock<Vec<Cyclotomic>>,
}

impl FieldTables {
    fn build(k: u32) -> Self {
        let modulus = 4 * k;
        let phi = cyclotomic_polynomial(modulus as usize);
        let degree = phi.len() - 1;

        let mut powers = Vec::with_capacity(modulus as usize);
        let mut current = vec![0i64; degree];
        current[0] = 1;
        for _ in 0..modulus {
            powers.push(current.clone());
            // multiply by x and fold x^degree back using the monic Φ.
            let carry = current[degree - 1];
            for i in (1..degree).rev() {
                current[i] = current[i - 1];
            }
            current[0] = 0;
            if carry != 0 {
                for (i, c) in current.iter_mut().enumerate() {
                    *c -= carry * phi[i];
                }
            }
        }
        debug_assert!(current[0] == 1 && current[1..].iter().all(|&c| c == 0));

        FieldTables {
            k,
            modulus,
            degree,
            powers,
            q_numbers: OnceLock::new(),
        }
    }

    /// [n]_q for 0 ≤ n < k.
    pub(crate) fn q_number(&'static self, n: usize) -> &'static Cyclotomic {
        let table = self.q_numbers.get_or_init(|| {
            let q = Cyclotomic::zeta_power(self.k, 4);
            let mut out = Vec::with_capacity(self.k as usize);
            let mut acc = Cyclotomic::zero(self.k);
            let mut power = Cyclotomic::one(self.k);
            for _ in 0..self.k {
                out.push(acc.clone());
                acc = &acc + &power;
                power = &power * &q;
            }
            out
        });
        &table[n]
    }
}

/// Integer coefficients (low degree first) of the n-th cyclotomic polynomial.
pub fn cyclotomic_polynomial(n: usize) -> Vec<i64> {
    assert!(n >= 1);
    // x^n - 1
    let mut poly = vec![0i64; n + 1];
    poly[0] = -1;
    poly[n] = 1;
    for d in 1..n {
        if n.is_multiple_of(d) {
            poly = exact_div(&poly, &cyclotomic_polynomial(d));
        }
    }
    poly
}

/// Division of integer polynomials by a monic divisor, assumed exact.
fn exact_div(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let qd = num.len() - 1 - dd;
    let mut quot = vec![0i64; qd + 1];
    for i in (0..=qd).rev() {
        let c = rem[i + dd];
        quot[i] = c;
        for (j, &d) in den.iter().enumerate() {
            rem[i + j] -= c * d;
        }
    }
    debug_assert!(rem.iter().all(|&c| c == 0), "inexact cyclotomic division");
    quot
}

pub(crate) fn tables(k: u32) -> &'static FieldTables {
    static REGISTRY: OnceLock<Mutex<HashMap<u32, &'static FieldTables>>> = OnceLock::new();
    let registry = REGISTRY.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = registry.lock().expect("field registry poisoned");
    guard
        .entry(k)
        .or_insert_with(|| Box::leak(Box::new(FieldTables::build(k))))
}

/// Element of Q(ζ_{4k}) in canonical reduced form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Cyclotomic {
    k: u32,
    coeffs: Vec<BigRational>,
}

impl Cyclotomic {
    fn tables(&self) -> &'static FieldTables {
        tables(self.k)
    }

    pub fn zero(k: u32) -> Self {
        assert!(k >= 2, "order k must be at least 2");
        let degree = tables(k).degree;
        Cyclotomic {
            k,
            coeffs: vec![BigRational::zero(); degree],
        }
    }

    pub fn one(k: u32) -> Self {
        Self::from_rational(k, BigRational::one())
    }

    pub fn from_integer(k: u32, value: i64) -> Self {
        Self::from_rational(k, BigRational::from_integer(BigInt::from(value)))
    }

    pub fn from_rational(k: u32, value: BigRational) -> Self {
        let mut out = Self::zero(k);
        out.coeffs[0] = value;
        out
    }

    /// ζ^j with ζ = exp(2πi/(4k)); j may be negative.
    pub fn zeta_power(k: u32, j: i64) -> Self {
        let mut out = Self::zero(k);
        let t = out.tables();
        let idx = j.rem_euclid(t.modulus as i64) as usize;
        for (c, &p) in out.coeffs.iter_mut().zip(&t.powers[idx]) {
            *c = BigRational::from_integer(BigInt::from(p));
        }
        out
    }

    /// q^j = ζ^{4j}.
    pub fn q_power(k: u32, j: i64) -> Self {
        Self::zeta_power(k, 4 * j)
    }

    pub fn order(&self) -> u32 {
        self.k
    }

    /// Power-basis coefficients, low degree first.
    pub fn coefficients(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// The rational value if the element lies in Q.
    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    pub fn scale(&self, factor: &BigRational) -> Self {
        Cyclotomic {
            k: self.k,
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, ScalarError> {
        check_order(self.k, other.k)?;
        Ok(Cyclotomic {
            k: self.k,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, ScalarError> {
        check_order(self.k, other.k)?;
        let t = self.tables();
        let d = t.degree;
        let mut conv = vec![BigRational::zero(); 2 * d - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                conv[i + j] += a * b;
            }
        }
        let mut coeffs: Vec<BigRational> = conv.drain(..d).collect();
        for (offset, c) in conv.into_iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (slot, &p) in coeffs.iter_mut().zip(&t.powers[d + offset]) {
                if p != 0 {
                    *slot += &c * BigInt::from(p);
                }
            }
        }
        Ok(Cyclotomic { k: self.k, coeffs })
    }

    /// Complex conjugation, the field automorphism ζ ↦ ζ^{-1}.
    pub fn conj(&self) -> Self {
        let t = self.tables();
        let mut out = Self::zero(self.k);
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let idx = (t.modulus as usize - j) % t.modulus as usize;
            for (slot, &p) in out.coeffs.iter_mut().zip(&t.powers[idx]) {
                if p != 0 {
                    *slot += c * BigInt::from(p);
                }
            }
        }
        out
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.k);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse, found by solving the multiplication-matrix
    /// system over Q.
    pub fn inv(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        let d = self.tables().degree;
        // column j of the system is self * ζ^j
        let columns: Vec<Cyclotomic> = (0..d)
            .map(|j| self * &Cyclotomic::zeta_power(self.k, j as i64))
            .collect();
        let mut rows: Vec<Vec<BigRational>> = (0..d)
            .map(|i| {
                let mut row: Vec<BigRational> = columns.iter().map(|c| c.coeffs[i].clone()).collect();
                row.push(if i == 0 {
                    BigRational::one()
                } else {
                    BigRational::zero()
                });
                row
            })
            .collect();

        for col in 0..d {
            let pivot = (col..d)
                .find(|&r| !rows[r][col].is_zero())
                .ok_or(ScalarError::DivisionByZero)?;
            rows.swap(col, pivot);
            let lead = rows[col][col].clone();
            for v in rows[col].iter_mut() {
                *v /= &lead;
            }
            let pivot_row = rows[col].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r == col || row[col].is_zero() {
                    continue;
                }
                let factor = row[col].clone();
                for (v, p) in row.iter_mut().zip(&pivot_row) {
                    *v -= &factor * p;
                }
            }
        }
        Ok(Cyclotomic {
            k: self.k,
            coeffs: rows.into_iter().map(|mut row| row.pop().unwrap()).collect(),
        })
    }

    /// If the element is r·ζ^j for a single j in 0..4k, returns (r, j).
    pub fn as_root_monomial(&self) -> Option<(BigRational, u32)> {
        if self.is_zero() {
            return None;
        }
        let modulus = self.tables().modulus;
        (0..modulus).find_map(|j| {
            let shifted = self * &Cyclotomic::zeta_power(self.k, -(j as i64));
            shifted.as_rational().map(|r| (r.clone(), j))
        })
    }

    pub fn to_complex(&self) -> Complex64 {
        let modulus = self.tables().modulus as f64;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| {
                let theta = 2.0 * std::f64::consts::PI * j as f64 / modulus;
                Complex64::from_polar(rational_to_f64(c), theta)
            })
            .sum()
    }
}

pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // very large numerators or denominators: scale down first
            let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(900);
            let n = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
            let d = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
            n / d
        }
    }
}

fn check_order(a: u32, b: u32) -> Result<(), ScalarError> {
    if a == b {
        Ok(())
    } else {
        Err(ScalarError::OrderMismatch { left: a, right: b })
    }
}

impl<'a> Add<&'a Cyclotomic> for &'a Cyclotomic {
    type Output = Cyclotomic;
    fn add(self, rhs: &'a Cyclotomic) -> Cyclotomic {
        self.checked_add(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Add for Cyclotomic {
    type Output = Cyclotomic;
    fn add(self, rhs: Cyclotomic) -> Cyclotomic {
        &self + &rhs
    }
}

impl AddAssign<&Cyclotomic> for Cyclotomic {
    fn add_assign(&mut self, rhs: &Cyclotomic) {
        check_order(self.k, rhs.k).unwrap_or_else(|e| panic!("{e}"));
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

impl<'a> Sub<&'a Cyclotomic> for &'a Cyclotomic {
    type Output = Cyclotomic;
    fn sub(self, rhs: &'a Cyclotomic) -> Cyclotomic {
        self + &(-rhs)
    }
}

impl Sub for Cyclotomic {
    type Output = Cyclotomic;
    fn sub(self, rhs: Cyclotomic) -> Cyclotomic {
        &self - &rhs
    }
}

impl Neg for &Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        Cyclotomic {
            k: self.k,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        -&self
    }
}

impl<'a> Mul<&'a Cyclotomic> for &'a Cyclotomic {
    type Output = Cyclotomic;
    fn mul(self, rhs: &'a Cyclotomic) -> Cyclotomic {
        self.checked_mul(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Mul for Cyclotomic {
    type Output = Cyclotomic;
    fn mul(self, rhs: Cyclotomic) -> Cyclotomic {
        &self * &rhs
    }
}

/// Renders as `c0 + c1*z^1 + …` over the power basis; `0` for zero.
impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            first = false;
            let mag = c.abs();
            if j == 0 {
                write!(f, "{mag}")?;
            } else {
                write!(f, "{mag}*z^{j}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cyclotomic[k={}]({})", self.k, self)
    }
}
