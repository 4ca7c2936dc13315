//! k-fermionic coherent states |z), |z̄), their bras, the finite
//! q-exponential, the measure μ and the resolution of identity.
//!
//! Fock amplitudes are Grassmann-valued. Radical normalizations such as
//! 1/√([n]_q!) are exact monomial inverses in [`RadicalScalar`].

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::fock::{generator_matrix, Generator};
use crate::grassmann::{berezin_z, berezin_zbar, GrassmannElement};
use crate::matrix::Matrix;
use crate::report::Report;
use crate::scalar::{q_factorial, Cyclotomic, RadicalScalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoherentError {
    #[error("incompatible orders: k={left} vs k={right}")]
    IncompatibleOrders { left: u32, right: u32 },
    #[error("unknown integration convention `{0}`")]
    UnknownConvention(String),
}

/// Which Grassmann variable labels the state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Variant {
    /// |z) and (z|
    Z,
    /// |z̄) and (z̄|
    Zbar,
}

/// 1/√([n]_q!) exactly.
fn inv_sqrt_factorial(k: u32, n: u32) -> RadicalScalar {
    RadicalScalar::sqrt_q_factorial(k, n)
        .and_then(|r| r.invert_monomial())
        .expect("√([n]_q!) is invertible for n < k")
}

/// 1/√([n]_q̄!) exactly, with √([n]_q̄!) = star(√([n]_q!)).
fn inv_sqrt_factorial_bar(k: u32, n: u32) -> RadicalScalar {
    RadicalScalar::sqrt_q_factorial(k, n)
        .map(|r| r.star())
        .and_then(|r| r.invert_monomial())
        .expect("√([n]_q̄!) is invertible for n < k")
}

/// z^n/√([n]_q!) — the |z) amplitude and the (z̄| amplitude.
fn z_amplitude(k: u32, n: u32) -> GrassmannElement {
    GrassmannElement::monomial(k, 0, n, inv_sqrt_factorial(k, n))
}

/// z̄^n/√([n]_q̄!) — the |z̄) amplitude and the (z| amplitude.
fn zbar_amplitude(k: u32, n: u32) -> GrassmannElement {
    GrassmannElement::monomial(k, n, 0, inv_sqrt_factorial_bar(k, n))
}

/// Coherent ket; `amps[n]` is the Grassmann coefficient of |n⟩.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoherentKet {
    k: u32,
    variant: Variant,
    amps: Vec<GrassmannElement>,
}

/// Coherent bra; `amps[n]` multiplies ⟨n| from the right.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoherentBra {
    k: u32,
    variant: Variant,
    amps: Vec<GrassmannElement>,
}

impl CoherentKet {
    pub fn order(&self) -> u32 {
        self.k
    }
    pub fn variant(&self) -> Variant {
        self.variant
    }
    pub fn amplitudes(&self) -> &[GrassmannElement] {
        &self.amps
    }
}

impl CoherentBra {
    pub fn order(&self) -> u32 {
        self.k
    }
    pub fn variant(&self) -> Variant {
        self.variant
    }
    pub fn amplitudes(&self) -> &[GrassmannElement] {
        &self.amps
    }
}

pub fn ket(k: u32, variant: Variant) -> CoherentKet {
    let amps = (0..k)
        .map(|n| match variant {
            Variant::Z => z_amplitude(k, n),
            Variant::Zbar => zbar_amplitude(k, n),
        })
        .collect();
    CoherentKet { k, variant, amps }
}

/// (z| carries z̄-powers with q̄-factorials; (z̄| carries z-powers with
/// q-factorials.
pub fn bra(k: u32, variant: Variant) -> CoherentBra {
    let amps = (0..k)
        .map(|n| match variant {
            Variant::Z => zbar_amplitude(k, n),
            Variant::Zbar => z_amplitude(k, n),
        })
        .collect();
    CoherentBra { k, variant, amps }
}

/// Applies a Fock operator to a Grassmann-valued state; the Grassmann
/// coefficients stay in place as left multipliers.
fn apply_operator(op: &Matrix, amps: &[GrassmannElement]) -> Vec<GrassmannElement> {
    let k = op.order();
    (0..amps.len())
        .map(|i| {
            amps.iter()
                .enumerate()
                .filter(|(j, _)| !op.get(i, *j).is_zero())
                .fold(GrassmannElement::zero(k), |acc, (j, a)| &acc + &a.scale(op.get(i, j)))
        })
        .collect()
}

fn first_mismatch(lhs: &[GrassmannElement], rhs: &[GrassmannElement]) -> Option<(usize, usize)> {
    lhs.iter().zip(rhs).position(|(a, b)| a != b).map(|n| (n, 0))
}

/// a₋|z) = z|z) and a₊⁺|z̄) = z̄|z̄).
pub fn eigenstate_check(k: u32) -> Report {
    let mut report = Report::new(k);

    let zk = ket(k, Variant::Z);
    let lhs = apply_operator(&generator_matrix(k, Generator::AMinus), &zk.amps);
    let z = GrassmannElement::z(k);
    let rhs: Vec<_> = zk.amps.iter().map(|a| &z * a).collect();
    report.push("am |z) = z |z)", first_mismatch(&lhs, &rhs));

    let zbk = ket(k, Variant::Zbar);
    let lhs = apply_operator(&generator_matrix(k, Generator::APlusDagger), &zbk.amps);
    let zbar = GrassmannElement::zbar(k);
    let rhs: Vec<_> = zbk.amps.iter().map(|a| &zbar * a).collect();
    report.push("apd |zbar) = zbar |zbar)", first_mismatch(&lhs, &rhs));

    report
}

/// e_q(x) = Σ_{n<k} xⁿ/[n]_q!, or with q̄-factorials when `conjugate` is set.
pub fn q_exponential(k: u32, x: &GrassmannElement, conjugate: bool) -> GrassmannElement {
    let mut acc = GrassmannElement::zero(k);
    let mut power = GrassmannElement::one(k);
    for n in 0..k {
        let inv = q_factorial(k, n, conjugate).inv().expect("[n]_q! ≠ 0 for n < k");
        acc = &acc + &power.scale(&inv.into());
        power = &power * x;
    }
    acc
}

/// Σ_n (bra amplitude)(ket amplitude), multiplied in written order.
pub fn overlap(b: &CoherentBra, a: &CoherentKet) -> Result<GrassmannElement, CoherentError> {
    if b.k != a.k {
        return Err(CoherentError::IncompatibleOrders { left: b.k, right: a.k });
    }
    Ok(b.amps
        .iter()
        .zip(&a.amps)
        .fold(GrassmannElement::zero(a.k), |acc, (x, y)| &acc + &(x * y)))
}

/// μ(z, z̄) = Σ_n √([n]_q! [n]_q̄!) z^{k-1-n} z̄^{k-1-n}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Measure {
    k: u32,
    coefficients: Vec<RadicalScalar>,
    value: GrassmannElement,
}

impl Measure {
    /// √([n]_q! [n]_q̄!) for n = 0..k-1.
    pub fn coefficients(&self) -> &[RadicalScalar] {
        &self.coefficients
    }

    /// μ(z, z̄) in z̄-before-z normal order.
    pub fn value(&self) -> &GrassmannElement {
        &self.value
    }
}

/// √([n]_q!)·star(√([n]_q!)); the radicals pair off into a cyclotomic value.
fn measure_coefficient(k: u32, n: u32) -> RadicalScalar {
    let root = RadicalScalar::sqrt_q_factorial(k, n).expect("n < k");
    &root * &root.star()
}

pub fn measure_mu(k: u32) -> Measure {
    let coefficients: Vec<_> = (0..k).map(|n| measure_coefficient(k, n)).collect();
    let value = coefficients
        .iter()
        .enumerate()
        .fold(GrassmannElement::zero(k), |acc, (n, c)| {
            let e = k - 1 - n as u32;
            let term = &GrassmannElement::z_pow(k, e) * &GrassmannElement::zbar_pow(k, e);
            &acc + &term.scale(c)
        });
    Measure { k, coefficients, value }
}

/// Which variable's top power is brought next to its differential and
/// extracted first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ExtractFirst {
    /// Integrand rearranged to z^{k-1} z̄^{k-1} before extraction.
    Z,
    /// Integrand read in z̄^{k-1} z^{k-1} normal order.
    Zbar,
}

/// Whether μ's two monomial factors are used as written or swapped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum MeasureForm {
    Written,
    Swapped,
}

/// Where the bra amplitude sits in the integrand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BraSide {
    /// ket · μ · bra
    Right,
    /// bra · ket · μ
    Left,
}

/// One point of the finite set of integration conventions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Convention {
    pub extract_first: ExtractFirst,
    pub measure: MeasureForm,
    pub bra: BraSide,
}

impl Convention {
    /// ∫dz |z) μ (z| dz̄ read literally: dz acts first on z^{k-1}, μ as
    /// written, bra on the right. Reduces to the ordinary Berezin rule at k=2.
    pub const CLASSICAL: Convention = Convention {
        extract_first: ExtractFirst::Z,
        measure: MeasureForm::Written,
        bra: BraSide::Right,
    };

    pub fn all() -> Vec<Convention> {
        let mut out = Vec::with_capacity(8);
        for extract_first in [ExtractFirst::Z, ExtractFirst::Zbar] {
            for measure in [MeasureForm::Written, MeasureForm::Swapped] {
                for bra in [BraSide::Right, BraSide::Left] {
                    out.push(Convention {
                        extract_first,
                        measure,
                        bra,
                    });
                }
            }
        }
        out
    }

    /// The literal reading of the integral ∫dz |·) μ (·| dz̄ for each variant.
    pub fn literal(variant: Variant) -> Convention {
        match variant {
            Variant::Z => Convention::CLASSICAL,
            Variant::Zbar => Convention {
                extract_first: ExtractFirst::Zbar,
                ..Convention::CLASSICAL
            },
        }
    }

    pub fn id(&self) -> String {
        let first = match self.extract_first {
            ExtractFirst::Z => "zfirst",
            ExtractFirst::Zbar => "zbarfirst",
        };
        let measure = match self.measure {
            MeasureForm::Written => "written",
            MeasureForm::Swapped => "swapped",
        };
        let bra = match self.bra {
            BraSide::Right => "right",
            BraSide::Left => "left",
        };
        format!("{first}-{measure}-{bra}")
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

impl FromStr for Convention {
    type Err = CoherentError;
    fn from_str(s: &str) -> Result<Self, CoherentError> {
        if s == "classical" {
            return Ok(Convention::CLASSICAL);
        }
        Convention::all()
            .into_iter()
            .find(|c| c.id() == s)
            .ok_or_else(|| CoherentError::UnknownConvention(s.to_string()))
    }
}

impl Serialize for Convention {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.id())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityResolution {
    pub matrix: Matrix,
    pub passes: bool,
}

/// Forms ∫ |·) μ (·| entry by entry under the given convention and compares
/// with the identity matrix.
pub fn resolve_identity(k: u32, variant: Variant, convention: Convention) -> IdentityResolution {
    let kets = ket(k, variant);
    let bras = bra(k, variant);
    let m = measure_mu(k);

    // μ(z, z̄) as written is z^a z̄^a; μ(z̄, z) is z̄^a z^a.
    let measure = m
        .coefficients
        .iter()
        .enumerate()
        .fold(GrassmannElement::zero(k), |acc, (n, c)| {
            let e = k - 1 - n as u32;
            let (zf, zbf) = (GrassmannElement::z_pow(k, e), GrassmannElement::zbar_pow(k, e));
            let z_first = matches!(
                (variant, convention.measure),
                (Variant::Z, MeasureForm::Written) | (Variant::Zbar, MeasureForm::Swapped)
            );
            let term = if z_first { &zf * &zbf } else { &zbf * &zf };
            &acc + &term.scale(c)
        });

    // canonical z̄^{k-1} z^{k-1} = q^{-(k-1)²/2} z^{k-1} z̄^{k-1}
    let top = (k - 1) as i64;
    let reorder = match convention.extract_first {
        ExtractFirst::Zbar => RadicalScalar::one(k),
        ExtractFirst::Z => Cyclotomic::zeta_power(k, -2 * top * top).into(),
    };

    let mut matrix = Matrix::zero(k, k as usize);
    for (i, ket_amp) in kets.amps.iter().enumerate() {
        for (j, bra_amp) in bras.amps.iter().enumerate() {
            let integrand = match convention.bra {
                BraSide::Right => &(ket_amp * &measure) * bra_amp,
                BraSide::Left => &(bra_amp * ket_amp) * &measure,
            };
            let value = berezin_zbar(&berezin_z(&integrand)).coeff(0, 0);
            matrix.set(i, j, &value * &reorder);
        }
    }
    let passes = matrix == Matrix::identity(k, k as usize);
    IdentityResolution { matrix, passes }
}

/// Every convention under which the resolution of identity holds exactly.
pub fn passing_conventions(k: u32, variant: Variant) -> Vec<Convention> {
    Convention::all()
        .into_iter()
        .filter(|&c| resolve_identity(k, variant, c).passes)
        .collect()
}

/// Per-k record of the convention sweep, stored as a golden file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityRecord {
    pub k: u32,
    pub passing_conventions: Vec<Convention>,
    pub conjugate_passing_conventions: Vec<Convention>,
    pub mu_coefficients: Vec<String>,
}

impl IdentityRecord {
    pub fn compute(k: u32) -> Self {
        IdentityRecord {
            k,
            passing_conventions: passing_conventions(k, Variant::Z),
            conjugate_passing_conventions: passing_conventions(k, Variant::Zbar),
            mu_coefficients: measure_mu(k).coefficients.iter().map(ToString::to_string).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fermion_ket_is_one_plus_z() {
        let k = 2;
        let state = ket(k, Variant::Z);
        assert_eq!(state.amplitudes(), &[GrassmannElement::one(k), GrassmannElement::z(k)]);
        // (1 + z a₊)|0⟩ with z as a left multiplier
        let ap = generator_matrix(k, Generator::APlus);
        let vacuum = vec![GrassmannElement::one(k), GrassmannElement::zero(k)];
        let raised = apply_operator(&ap, &vacuum);
        let z = GrassmannElement::z(k);
        let classical: Vec<_> = vacuum.iter().zip(&raised).map(|(v, r)| v + &(&z * r)).collect();
        assert_eq!(state.amplitudes(), classical.as_slice());
    }

    #[test]
    fn ket_amplitude_uses_radical_factorial() {
        let k = 3;
        let state = ket(k, Variant::Z);
        let amp = &state.amplitudes()[2];
        let norm = RadicalScalar::sqrt_q_factorial(k, 2)
            .unwrap()
            .invert_monomial()
            .unwrap();
        assert_eq!(amp, &GrassmannElement::monomial(k, 0, 2, norm));
    }

    #[test]
    fn eigenstates() {
        for k in [2, 3, 6] {
            assert!(eigenstate_check(k).all_hold(), "k={k}");
        }
    }

    #[test]
    fn q_exponential_small_cases() {
        for k in 2..=5 {
            assert_eq!(
                q_exponential(k, &GrassmannElement::zero(k), false),
                GrassmannElement::one(k)
            );
        }
        let k = 2;
        let x = &GrassmannElement::zbar(k) * &GrassmannElement::z(k);
        assert_eq!(q_exponential(k, &x, false), &GrassmannElement::one(k) + &x);
    }

    #[test]
    fn q_exponential_derivative_defect() {
        use crate::grassmann::d_z;
        for k in 2..=6 {
            let e = q_exponential(k, &GrassmannElement::z(k), false);
            let inv = q_factorial(k, k - 1, false).inv().unwrap();
            let top = GrassmannElement::monomial(k, 0, k - 1, inv.into());
            assert_eq!(d_z(&e), &e - &top, "k={k}");
        }
    }

    #[test]
    fn overlaps_are_q_exponentials() {
        let k = 2;
        let zz = overlap(&bra(k, Variant::Z), &ket(k, Variant::Z)).unwrap();
        let x = &GrassmannElement::zbar(k) * &GrassmannElement::z(k);
        assert_eq!(zz, &GrassmannElement::one(k) + &x);

        let k = 4;
        let zz = overlap(&bra(k, Variant::Z), &ket(k, Variant::Z)).unwrap();
        let x = &GrassmannElement::zbar(k) * &GrassmannElement::z(k);
        assert_eq!(zz, q_exponential(k, &x, false));
        let bb = overlap(&bra(k, Variant::Zbar), &ket(k, Variant::Zbar)).unwrap();
        let y = &GrassmannElement::z(k) * &GrassmannElement::zbar(k);
        assert_eq!(bb, q_exponential(k, &y, true));
    }

    #[test]
    fn overlap_rejects_mixed_orders() {
        assert_eq!(
            overlap(&bra(2, Variant::Z), &ket(3, Variant::Z)),
            Err(CoherentError::IncompatibleOrders { left: 2, right: 3 })
        );
    }

    #[test]
    fn fermion_measure() {
        // μ = z z̄ + 1 = q^{1/2} z̄ z + 1 in normal order
        let k = 2;
        let mu = measure_mu(k);
        let expected = &(&GrassmannElement::z(k) * &GrassmannElement::zbar(k)) + &GrassmannElement::one(k);
        assert_eq!(mu.value(), &expected);
        assert_eq!(
            mu.value().coeff(1, 1),
            RadicalScalar::from(Cyclotomic::zeta_power(k, 2))
        );
    }

    #[test]
    fn measure_structure() {
        for k in 2..=7u32 {
            let mu = measure_mu(k);
            assert_eq!(mu.value().terms().count(), k as usize);
            let exps: Vec<_> = mu.value().terms().map(|(&key, _)| key).collect();
            let expected: Vec<_> = (0..k).map(|e| (e, e)).collect();
            assert_eq!(exps, expected);
            // n = k-1 term is the constant √([k-1]_q! [k-1]_q̄!)
            assert_eq!(mu.value().coeff(0, 0), mu.coefficients()[k as usize - 1]);
            for c in mu.coefficients() {
                assert_eq!(&c.star(), c);
                assert!(c.as_cyclotomic().is_some());
                let v = c.to_complex();
                assert!(v.im.abs() < 1e-12 && v.re > 0.0);
            }
        }
        // the n-th coefficient has modulus |[n]_q!|
        let k = 5;
        let mu = measure_mu(k);
        for n in 0..k {
            let fact = q_factorial(k, n, false).to_complex().norm();
            assert!((mu.coefficients()[n as usize].to_complex().re - fact).abs() < 1e-12);
        }
    }

    #[test]
    fn convention_ids_roundtrip() {
        let all = Convention::all();
        assert_eq!(all.len(), 8);
        for c in &all {
            assert_eq!(c.id().parse::<Convention>().unwrap(), *c);
        }
        assert_eq!("classical".parse::<Convention>().unwrap(), Convention::CLASSICAL);
        assert_eq!(
            "bogus".parse::<Convention>(),
            Err(CoherentError::UnknownConvention("bogus".into()))
        );
    }

    #[test]
    fn classical_convention_resolves_identity() {
        for k in 2..=4 {
            assert!(resolve_identity(k, Variant::Z, Convention::CLASSICAL).passes, "k={k}");
            assert!(resolve_identity(k, Variant::Zbar, Convention::literal(Variant::Zbar)).passes);
        }
    }

    #[test]
    fn off_diagonal_entries_vanish() {
        for k in 2..=4 {
            for c in Convention::all() {
                let m = resolve_identity(k, Variant::Z, c).matrix;
                for i in 0..k as usize {
                    for j in 0..k as usize {
                        if i != j {
                            assert!(m.get(i, j).is_zero());
                        }
                    }
                }
            }
        }
    }
}
