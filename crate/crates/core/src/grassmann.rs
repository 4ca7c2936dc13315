//! Generalized Grassmann variables z, z̄ with z^k = z̄^k = 0 and the
//! exchange rule z z̄ = q^{1/2} z̄ z.
//!
//! Elements are stored in the normal order z̄^m z^n (all z̄ to the left).
//! Reordering phases are paid in [`GrassmannElement::mul`]; the Berezin
//! integrals are plain coefficient extractions on this normal order.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::matrix::Matrix;
use crate::report::Report;
use crate::scalar::{q_number, Cyclotomic, RadicalScalar, ScalarError};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GrassmannElement {
    k: u32,
    /// (m, n) ↦ coefficient of z̄^m z^n
    coeffs: BTreeMap<(u32, u32), RadicalScalar>,
}

impl GrassmannElement {
    pub fn zero(k: u32) -> Self {
        assert!(k >= 2, "order k must be at least 2");
        GrassmannElement {
            k,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one(k: u32) -> Self {
        Self::monomial(k, 0, 0, RadicalScalar::one(k))
    }

    pub fn scalar(c: RadicalScalar) -> Self {
        let k = c.order();
        Self::monomial(k, 0, 0, c)
    }

    /// c · z̄^m z^n; zero when either exponent reaches k.
    pub fn monomial(k: u32, zbar_exp: u32, z_exp: u32, c: RadicalScalar) -> Self {
        let mut out = Self::zero(k);
        if zbar_exp < k && z_exp < k && !c.is_zero() {
            out.coeffs.insert((zbar_exp, z_exp), c);
        }
        out
    }

    pub fn z(k: u32) -> Self {
        Self::monomial(k, 0, 1, RadicalScalar::one(k))
    }

    pub fn zbar(k: u32) -> Self {
        Self::monomial(k, 1, 0, RadicalScalar::one(k))
    }

    pub fn z_pow(k: u32, n: u32) -> Self {
        Self::monomial(k, 0, n, RadicalScalar::one(k))
    }

    pub fn zbar_pow(k: u32, m: u32) -> Self {
        Self::monomial(k, m, 0, RadicalScalar::one(k))
    }

    pub fn order(&self) -> u32 {
        self.k
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of z̄^m z^n in normal order.
    pub fn coeff(&self, zbar_exp: u32, z_exp: u32) -> RadicalScalar {
        self.coeffs
            .get(&(zbar_exp, z_exp))
            .cloned()
            .unwrap_or_else(|| RadicalScalar::zero(self.k))
    }

    /// Nonzero terms as ((m, n), coefficient) in lexicographic order.
    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &RadicalScalar)> {
        self.coeffs.iter()
    }

    fn accumulate(&mut self, key: (u32, u32), c: RadicalScalar) {
        if c.is_zero() {
            return;
        }
        let updated = match self.coeffs.get(&key) {
            Some(existing) => existing + &c,
            None => c,
        };
        if updated.is_zero() {
            self.coeffs.remove(&key);
        } else {
            self.coeffs.insert(key, updated);
        }
    }

    pub fn scale(&self, c: &RadicalScalar) -> Self {
        let mut out = Self::zero(self.k);
        for (&key, v) in &self.coeffs {
            out.accumulate(key, v * c);
        }
        out
    }

    /// Product in written order, reordered to z̄-before-z normal form with
    /// one factor q^{1/2} per z moved across a z̄.
    pub fn checked_mul(&self, other: &Self) -> Result<Self, ScalarError> {
        if self.k != other.k {
            return Err(ScalarError::OrderMismatch {
                left: self.k,
                right: other.k,
            });
        }
        let k = self.k;
        let mut out = Self::zero(k);
        for (&(a, b), x) in &self.coeffs {
            for (&(c, d), y) in &other.coeffs {
                if a + c >= k || b + d >= k {
                    continue;
                }
                // z^b z̄^c = q^{bc/2} z̄^c z^b
                let phase = Cyclotomic::zeta_power(k, 2 * (b * c) as i64);
                out.accumulate((a + c, b + d), (x * y).scale(&phase));
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(self.k), |acc, _| &acc * self)
    }
}

impl<'a> Mul<&'a GrassmannElement> for &'a GrassmannElement {
    type Output = GrassmannElement;
    fn mul(self, rhs: &'a GrassmannElement) -> GrassmannElement {
        self.checked_mul(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl<'a> Add<&'a GrassmannElement> for &'a GrassmannElement {
    type Output = GrassmannElement;
    fn add(self, rhs: &'a GrassmannElement) -> GrassmannElement {
        assert_eq!(self.k, rhs.k, "order mismatch");
        let mut out = self.clone();
        for (&key, v) in &rhs.coeffs {
            out.accumulate(key, v.clone());
        }
        out
    }
}

impl<'a> Sub<&'a GrassmannElement> for &'a GrassmannElement {
    type Output = GrassmannElement;
    fn sub(self, rhs: &'a GrassmannElement) -> GrassmannElement {
        self + &(-rhs)
    }
}

impl Neg for &GrassmannElement {
    type Output = GrassmannElement;
    fn neg(self) -> GrassmannElement {
        GrassmannElement {
            k: self.k,
            coeffs: self.coeffs.iter().map(|(&key, v)| (key, -v)).collect(),
        }
    }
}

impl fmt::Display for GrassmannElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (i, (&(m, n), c)) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "[{c}]")?;
            if m > 0 {
                write!(f, "*zb^{m}")?;
            }
            if n > 0 {
                write!(f, "*z^{n}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for GrassmannElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GrassmannElement[k={}]({})", self.k, self)
    }
}

/// Phase picked up by ∂_z for each z̄ standing to its left, as a power of
/// ζ = q^{1/4}. The default is q^{1/2} per crossing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CrossingPhase {
    zeta_per_crossing: i64,
}

impl CrossingPhase {
    pub const ZERO: CrossingPhase = CrossingPhase { zeta_per_crossing: 0 };
    pub const HALF: CrossingPhase = CrossingPhase { zeta_per_crossing: 2 };
    pub const ONE: CrossingPhase = CrossingPhase { zeta_per_crossing: 4 };
    pub const MINUS_HALF: CrossingPhase = CrossingPhase { zeta_per_crossing: -2 };

    /// q^{α} per crossing with α = `zeta_exp` / 4.
    pub fn from_zeta_exponent(zeta_exp: i64) -> Self {
        CrossingPhase {
            zeta_per_crossing: zeta_exp,
        }
    }

    pub fn zeta_exponent(self) -> i64 {
        self.zeta_per_crossing
    }
}

impl Default for CrossingPhase {
    fn default() -> Self {
        CrossingPhase::HALF
    }
}

/// ∂_z with the default crossing phase: z̄^m z^n ↦ q^{m/2}[n]_q z̄^m z^{n-1}.
pub fn d_z(a: &GrassmannElement) -> GrassmannElement {
    d_z_with(a, CrossingPhase::default())
}

pub fn d_z_with(a: &GrassmannElement, phase: CrossingPhase) -> GrassmannElement {
    let k = a.k;
    let mut out = GrassmannElement::zero(k);
    for (&(m, n), c) in &a.coeffs {
        if n == 0 {
            continue;
        }
        let factor = &Cyclotomic::zeta_power(k, phase.zeta_per_crossing * m as i64) * &q_number(k, n, false);
        out.accumulate((m, n - 1), c.scale(&factor));
    }
    out
}

/// ∂_z̄: z̄^m z^n ↦ [m]_q̄ z̄^{m-1} z^n (z̄ is leftmost, no crossing).
pub fn d_zbar(a: &GrassmannElement) -> GrassmannElement {
    let k = a.k;
    let mut out = GrassmannElement::zero(k);
    for (&(m, n), c) in &a.coeffs {
        if m == 0 {
            continue;
        }
        out.accumulate((m - 1, n), c.scale(&q_number(k, m, true)));
    }
    out
}

/// ∫dz: keeps the coefficient of z^{k-1}, leaving a z̄-only element.
pub fn berezin_z(a: &GrassmannElement) -> GrassmannElement {
    let top = a.k - 1;
    let mut out = GrassmannElement::zero(a.k);
    for (&(m, n), c) in &a.coeffs {
        if n == top {
            out.accumulate((m, 0), c.clone());
        }
    }
    out
}

/// ∫dz̄: keeps the coefficient of z̄^{k-1}, leaving a z-only element.
pub fn berezin_zbar(a: &GrassmannElement) -> GrassmannElement {
    let top = a.k - 1;
    let mut out = GrassmannElement::zero(a.k);
    for (&(m, n), c) in &a.coeffs {
        if m == top {
            out.accumulate((0, n), c.clone());
        }
    }
    out
}

/// Matrix of a linear map on the k²-dimensional space spanned by z̄^m z^n
/// (basis index m·k + n).
pub fn linear_map_matrix(k: u32, f: impl Fn(&GrassmannElement) -> GrassmannElement) -> Matrix {
    let dim = (k * k) as usize;
    let mut out = Matrix::zero(k, dim);
    for m in 0..k {
        for n in 0..k {
            let col = (m * k + n) as usize;
            let image = f(&GrassmannElement::monomial(k, m, n, RadicalScalar::one(k)));
            for (&(i, j), c) in image.terms() {
                out.set((i * k + j) as usize, col, c.clone());
            }
        }
    }
    out
}

/// The four realization maps: left multiplication by z and z̄, ∂_z, ∂_z̄.
pub struct RealizationMaps {
    pub z: Matrix,
    pub zbar: Matrix,
    pub d_z: Matrix,
    pub d_zbar: Matrix,
}

impl RealizationMaps {
    pub fn new(k: u32, phase: CrossingPhase) -> Self {
        let z = GrassmannElement::z(k);
        let zbar = GrassmannElement::zbar(k);
        RealizationMaps {
            z: linear_map_matrix(k, |x| &z * x),
            zbar: linear_map_matrix(k, |x| &zbar * x),
            d_z: linear_map_matrix(k, |x| d_z_with(x, phase)),
            d_zbar: linear_map_matrix(k, d_zbar),
        }
    }
}

fn first_nonzero(m: &Matrix) -> Option<(usize, usize)> {
    m.first_difference(&Matrix::zero(m.order(), m.dim()))
}

/// Checks the images of the defining relations under a₋ → ∂_z, a₊ → z,
/// a₊⁺ → ∂_z̄, a₋⁺ → z̄ on the full k²-dimensional space, using the default
/// crossing phase.
pub fn realization_check(k: u32) -> Report {
    realization_check_with(k, CrossingPhase::default())
}

pub fn realization_check_with(k: u32, phase: CrossingPhase) -> Report {
    let maps = RealizationMaps::new(k, phase);
    let dim = (k * k) as usize;
    let id = Matrix::identity(k, dim);
    let q = Cyclotomic::q_power(k, 1);
    let qbar = Cyclotomic::q_power(k, -1);

    let mut report = Report::new(k);
    let lhs = &(&maps.d_z * &maps.z) - &(&maps.z * &maps.d_z).scale_cyclotomic(&q);
    report.push("1a: d_z z - q z d_z = id", lhs.first_difference(&id));
    let lhs = &(&maps.d_zbar * &maps.zbar) - &(&maps.zbar * &maps.d_zbar).scale_cyclotomic(&qbar);
    report.push("1a': d_zbar zbar - qbar zbar d_zbar = id", lhs.first_difference(&id));
    report.push(
        "1d: z^k = zbar^k = 0",
        first_nonzero(&maps.z.pow(k)).or_else(|| first_nonzero(&maps.zbar.pow(k))),
    );
    report.push(
        "4: d_z^k = d_zbar^k = 0",
        first_nonzero(&maps.d_z.pow(k)).or_else(|| first_nonzero(&maps.d_zbar.pow(k))),
    );
    let lhs = &maps.d_z * &maps.d_zbar;
    let rhs = (&maps.d_zbar * &maps.d_z).scale_cyclotomic(&Cyclotomic::zeta_power(k, -2));
    report.push("1e: d_z d_zbar = qbar^(1/2) d_zbar d_z", lhs.first_difference(&rhs));
    let lhs = &maps.z * &maps.zbar;
    let rhs = (&maps.zbar * &maps.z).scale_cyclotomic(&Cyclotomic::zeta_power(k, 2));
    report.push("1e': z zbar = q^(1/2) zbar z", lhs.first_difference(&rhs));
    report
}

/// The (1a) images restricted to functions of one variable: ∂_z∘z − q z∘∂_z
/// on span{z^n}, and ∂_z̄∘z̄ − q̄ z̄∘∂_z̄ on span{z̄^m}.
pub fn single_variable_check(k: u32, phase: CrossingPhase) -> Report {
    let maps = RealizationMaps::new(k, phase);
    let dim = (k * k) as usize;
    let id = Matrix::identity(k, dim);
    let q = Cyclotomic::q_power(k, 1);
    let qbar = Cyclotomic::q_power(k, -1);

    let restricted = |lhs: &Matrix, cols: &[usize]| -> Option<(usize, usize)> {
        cols.iter()
            .find_map(|&c| (0..dim).find(|&r| lhs.get(r, c) != id.get(r, c)).map(|r| (r, c)))
    };
    let z_only: Vec<usize> = (0..k as usize).collect();
    let zbar_only: Vec<usize> = (0..k as usize).map(|m| m * k as usize).collect();

    let mut report = Report::new(k);
    let lhs = &(&maps.d_z * &maps.z) - &(&maps.z * &maps.d_z).scale_cyclotomic(&q);
    report.push("1a on f(z): d_z z - q z d_z = id", restricted(&lhs, &z_only));
    let lhs = &(&maps.d_zbar * &maps.zbar) - &(&maps.zbar * &maps.d_zbar).scale_cyclotomic(&qbar);
    report.push(
        "1a' on g(zbar): d_zbar zbar - qbar zbar d_zbar = id",
        restricted(&lhs, &zbar_only),
    );
    report
}
