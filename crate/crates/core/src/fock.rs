//! Matrix representation of the k-fermion algebra on the k-dimensional Fock
//! space {|0⟩, …, |k-1⟩}.
//!
//! a₋ and a₊⁺ lower the occupation number with entries s_n = √[n]_q and
//! star(s_n) = √[n]_q̄; a₊ and a₋⁺ raise it with the same radicals; N is
//! diagonal.

use std::fmt;
use std::ops::{Add, Deref, Mul, Sub};
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::matrix::Matrix;
use crate::report::Report;
use crate::scalar::{Cyclotomic, RadicalScalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FockError {
    #[error("unknown generator `{0}` (expected ap, am, apd, amd or N)")]
    UnknownGenerator(String),
    #[error("state index {n} out of range for k={k}")]
    IndexOutOfRange { k: u32, n: u32 },
}

/// The five generators a₊, a₋, a₊⁺, a₋⁺, N.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Generator {
    /// a₊, creation in the q sector.
    APlus,
    /// a₋, annihilation in the q sector.
    AMinus,
    /// a₊⁺, annihilation in the q̄ sector.
    APlusDagger,
    /// a₋⁺, creation in the q̄ sector.
    AMinusDagger,
    Number,
}

impl Generator {
    pub const ALL: [Generator; 5] = [
        Generator::APlus,
        Generator::AMinus,
        Generator::APlusDagger,
        Generator::AMinusDagger,
        Generator::Number,
    ];

    /// Surface-syntax name.
    pub fn name(self) -> &'static str {
        match self {
            Generator::APlus => "ap",
            Generator::AMinus => "am",
            Generator::APlusDagger => "apd",
            Generator::AMinusDagger => "amd",
            Generator::Number => "N",
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Generator {
    type Err = FockError;
    fn from_str(s: &str) -> Result<Self, FockError> {
        match s {
            "ap" | "a+" | "a₊" => Ok(Generator::APlus),
            "am" | "a-" | "a₋" => Ok(Generator::AMinus),
            "apd" | "a+^+" | "a₊⁺" => Ok(Generator::APlusDagger),
            "amd" | "a-^+" | "a₋⁺" => Ok(Generator::AMinusDagger),
            "N" => Ok(Generator::Number),
            other => Err(FockError::UnknownGenerator(other.to_string())),
        }
    }
}

/// k×k operator on Fock space.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OpMatrix(Matrix);

impl OpMatrix {
    pub fn zero(k: u32) -> Self {
        OpMatrix(Matrix::zero(k, k as usize))
    }

    pub fn identity(k: u32) -> Self {
        OpMatrix(Matrix::identity(k, k as usize))
    }

    pub fn scale(&self, c: &RadicalScalar) -> Self {
        OpMatrix(self.0.scale(c))
    }

    pub fn scale_cyclotomic(&self, c: &Cyclotomic) -> Self {
        OpMatrix(self.0.scale_cyclotomic(c))
    }

    pub fn pow(&self, e: u32) -> Self {
        OpMatrix(self.0.pow(e))
    }

    pub fn star_transpose(&self) -> Self {
        OpMatrix(self.0.star_transpose())
    }

    pub fn apply(&self, v: &FockVector) -> FockVector {
        FockVector {
            k: v.k,
            amps: self.0.apply(&v.amps),
        }
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }
}

impl Deref for OpMatrix {
    type Target = Matrix;
    fn deref(&self) -> &Matrix {
        &self.0
    }
}

impl<'a> Mul<&'a OpMatrix> for &'a OpMatrix {
    type Output = OpMatrix;
    fn mul(self, rhs: &'a OpMatrix) -> OpMatrix {
        OpMatrix(&self.0 * &rhs.0)
    }
}

impl<'a> Add<&'a OpMatrix> for &'a OpMatrix {
    type Output = OpMatrix;
    fn add(self, rhs: &'a OpMatrix) -> OpMatrix {
        OpMatrix(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a OpMatrix> for &'a OpMatrix {
    type Output = OpMatrix;
    fn sub(self, rhs: &'a OpMatrix) -> OpMatrix {
        OpMatrix(&self.0 - &rhs.0)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FockVector {
    k: u32,
    amps: Vec<RadicalScalar>,
}

impl FockVector {
    /// The basis vector |n⟩.
    pub fn basis(k: u32, n: u32) -> Result<Self, FockError> {
        if n >= k {
            return Err(FockError::IndexOutOfRange { k, n });
        }
        let mut amps = vec![RadicalScalar::zero(k); k as usize];
        amps[n as usize] = RadicalScalar::one(k);
        Ok(FockVector { k, amps })
    }

    pub fn amplitudes(&self) -> &[RadicalScalar] {
        &self.amps
    }

    pub fn is_zero(&self) -> bool {
        self.amps.iter().all(RadicalScalar::is_zero)
    }

    pub fn scale(&self, c: &RadicalScalar) -> Self {
        FockVector {
            k: self.k,
            amps: self.amps.iter().map(|a| a * c).collect(),
        }
    }
}

fn radical(k: u32, n: u32) -> RadicalScalar {
    RadicalScalar::sqrt_q_number(k, n).expect("radical index within 1..k")
}

/// Exact matrix of a generator. Panics if k < 2.
pub fn generator_matrix(k: u32, g: Generator) -> OpMatrix {
    assert!(k >= 2, "order k must be at least 2");
    let mut m = OpMatrix::zero(k);
    for n in 0..k {
        let col = n as usize;
        match g {
            // a₋|n⟩ = s_n |n-1⟩
            Generator::AMinus if n >= 1 => m.0.set(col - 1, col, radical(k, n)),
            // a₊⁺|n⟩ = star(s_n) |n-1⟩
            Generator::APlusDagger if n >= 1 => m.0.set(col - 1, col, radical(k, n).star()),
            // a₊|n⟩ = s_{n+1} |n+1⟩
            Generator::APlus if n + 1 < k => m.0.set(col + 1, col, radical(k, n + 1)),
            // a₋⁺|n⟩ = star(s_{n+1}) |n+1⟩
            Generator::AMinusDagger if n + 1 < k => m.0.set(col + 1, col, radical(k, n + 1).star()),
            Generator::Number => m.0.set(col, col, RadicalScalar::from_integer(k, n as i64)),
            _ => {}
        }
    }
    m
}

/// The five generator matrices for one order, indexed like [`Generator::ALL`].
#[derive(Clone, Debug)]
pub struct GeneratorSet {
    k: u32,
    mats: [OpMatrix; 5],
}

impl GeneratorSet {
    pub fn new(k: u32) -> Self {
        GeneratorSet {
            k,
            mats: Generator::ALL.map(|g| generator_matrix(k, g)),
        }
    }

    pub fn order(&self) -> u32 {
        self.k
    }

    pub fn get(&self, g: Generator) -> &OpMatrix {
        let idx = Generator::ALL.iter().position(|&x| x == g).unwrap();
        &self.mats[idx]
    }
}

fn diff(lhs: &OpMatrix, rhs: &OpMatrix) -> Option<(usize, usize)> {
    lhs.first_difference(rhs)
}

fn first_nonzero(m: &OpMatrix) -> Option<(usize, usize)> {
    diff(m, &OpMatrix::zero(m.order()))
}

/// Exact check of the ten defining relations (both sides of each
/// displayed equivalence).
pub fn verify_relations(k: u32) -> Report {
    use Generator::*;
    let g = GeneratorSet::new(k);
    let (ap, am, apd, amd, n) = (
        g.get(APlus),
        g.get(AMinus),
        g.get(APlusDagger),
        g.get(AMinusDagger),
        g.get(Number),
    );
    let id = OpMatrix::identity(k);
    let q = Cyclotomic::q_power(k, 1);
    let qbar = Cyclotomic::q_power(k, -1);
    let sqrt_q = Cyclotomic::zeta_power(k, 2);
    let sqrt_qbar = Cyclotomic::zeta_power(k, -2);

    let mut report = Report::new(k);
    report.push(
        "1a: am ap - q ap am = 1",
        diff(&(&(am * ap) - &(ap * am).scale_cyclotomic(&q)), &id),
    );
    report.push(
        "1a': apd amd - qbar amd apd = 1",
        diff(&(&(apd * amd) - &(amd * apd).scale_cyclotomic(&qbar)), &id),
    );
    report.push("1b: N ap - ap N = ap", diff(&(&(n * ap) - &(ap * n)), ap));
    report.push(
        "1b': N apd - apd N = -apd",
        diff(
            &(&(n * apd) - &(apd * n)),
            &apd.scale(&RadicalScalar::from_integer(k, -1)),
        ),
    );
    report.push(
        "1c: N am - am N = -am",
        diff(&(&(n * am) - &(am * n)), &am.scale(&RadicalScalar::from_integer(k, -1))),
    );
    report.push("1c': N amd - amd N = amd", diff(&(&(n * amd) - &(amd * n)), amd));
    report.push(
        "1d: ap^k = am^k = 0",
        first_nonzero(&ap.pow(k)).or_else(|| first_nonzero(&am.pow(k))),
    );
    report.push(
        "1d': apd^k = amd^k = 0",
        first_nonzero(&apd.pow(k)).or_else(|| first_nonzero(&amd.pow(k))),
    );
    report.push(
        "1e: am apd = qbar^(1/2) apd am",
        diff(&(am * apd), &(apd * am).scale_cyclotomic(&sqrt_qbar)),
    );
    report.push(
        "1e': ap amd = q^(1/2) amd ap",
        diff(&(ap * amd), &(amd * ap).scale_cyclotomic(&sqrt_q)),
    );
    report
}

/// Which creation operator builds |n⟩ from the vacuum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateRoute {
    /// (a₊)^n |0⟩ / √([n]_q!)
    APlus,
    /// (a₋⁺)^n |0⟩ / √([n]_q̄!)
    AMinusDagger,
}

/// Builds |n⟩ by applying the chosen creation operator n times to the
/// vacuum and dividing by the matching radical factorial.
pub fn build_state(k: u32, n: u32, route: StateRoute) -> Result<FockVector, FockError> {
    if n >= k {
        return Err(FockError::IndexOutOfRange { k, n });
    }
    let (op, norm) = match route {
        StateRoute::APlus => (
            generator_matrix(k, Generator::APlus),
            RadicalScalar::sqrt_q_factorial(k, n).expect("n < k"),
        ),
        StateRoute::AMinusDagger => (
            generator_matrix(k, Generator::AMinusDagger),
            RadicalScalar::sqrt_q_factorial(k, n).expect("n < k").star(),
        ),
    };
    let raised = op.pow(n).apply(&FockVector::basis(k, 0)?);
    let inv = norm
        .invert_monomial()
        .expect("radical factorial is an invertible monomial");
    Ok(raised.scale(&inv))
}

/// a₊⁺ and a₋⁺ are the star-transposes of a₊ and a₋.
pub fn adjoint_check(k: u32) -> Report {
    use Generator::*;
    let g = GeneratorSet::new(k);
    let mut report = Report::new(k);
    report.push(
        "apd = star-transpose(ap)",
        diff(g.get(APlusDagger), &g.get(APlus).star_transpose()),
    );
    report.push(
        "amd = star-transpose(am)",
        diff(g.get(AMinusDagger), &g.get(AMinus).star_transpose()),
    );
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q_number;

    #[test]
    fn fermion_lowering_matrix() {
        let am = generator_matrix(2, Generator::AMinus);
        let mut expected = OpMatrix::zero(2);
        expected.0.set(0, 1, RadicalScalar::one(2));
        assert_eq!(am, expected);
        assert_eq!(generator_matrix(2, Generator::APlusDagger), am);
        assert_eq!(
            generator_matrix(2, Generator::AMinusDagger),
            generator_matrix(2, Generator::APlus)
        );
    }

    #[test]
    fn number_operator_is_diagonal() {
        for k in 2..=6 {
            let n = generator_matrix(k, Generator::Number);
            for i in 0..k as usize {
                for j in 0..k as usize {
                    let expected = if i == j {
                        RadicalScalar::from_integer(k, i as i64)
                    } else {
                        RadicalScalar::zero(k)
                    };
                    assert_eq!(n.get(i, j), &expected);
                }
            }
        }
    }

    #[test]
    fn relations_hold_for_small_orders() {
        for k in [2, 3, 8] {
            let report = verify_relations(k);
            assert_eq!(report.checks.len(), 10);
            assert!(report.all_hold(), "k={k}: {:?}", report.failures().collect::<Vec<_>>());
        }
    }

    #[test]
    fn perturbed_relation_reports_witness() {
        // (1a) with q replaced by q̄ must fail for k ≥ 3 and name an entry.
        let k = 3;
        let g = GeneratorSet::new(k);
        let (ap, am) = (g.get(Generator::APlus), g.get(Generator::AMinus));
        let lhs = &(am * ap) - &(ap * am).scale_cyclotomic(&Cyclotomic::q_power(k, -1));
        assert_eq!(diff(&lhs, &OpMatrix::identity(k)), Some((1, 1)));
    }

    #[test]
    fn nilpotency_is_sharp() {
        for k in 2..=6 {
            for g in [
                Generator::APlus,
                Generator::AMinus,
                Generator::APlusDagger,
                Generator::AMinusDagger,
            ] {
                let m = generator_matrix(k, g);
                assert!(!m.pow(k - 1).is_zero(), "k={k} {g}");
                assert!(m.pow(k).is_zero(), "k={k} {g}");
            }
        }
    }

    #[test]
    fn vacuum_and_top_are_annihilated() {
        for k in 2..=6 {
            let am = generator_matrix(k, Generator::AMinus);
            let ap = generator_matrix(k, Generator::APlus);
            assert!(am.apply(&FockVector::basis(k, 0).unwrap()).is_zero());
            assert!(ap.apply(&FockVector::basis(k, k - 1).unwrap()).is_zero());
        }
    }

    #[test]
    fn states_from_vacuum() {
        assert_eq!(
            build_state(3, 0, StateRoute::APlus).unwrap(),
            FockVector::basis(3, 0).unwrap()
        );
        assert_eq!(
            build_state(3, 0, StateRoute::AMinusDagger).unwrap(),
            FockVector::basis(3, 0).unwrap()
        );
        assert_eq!(
            build_state(3, 2, StateRoute::APlus).unwrap(),
            FockVector::basis(3, 2).unwrap()
        );
        assert_eq!(
            build_state(4, 3, StateRoute::AMinusDagger).unwrap(),
            FockVector::basis(4, 3).unwrap()
        );
        assert_eq!(
            build_state(4, 4, StateRoute::APlus),
            Err(FockError::IndexOutOfRange { k: 4, n: 4 })
        );
    }

    #[test]
    fn adjoints() {
        for k in [2, 3, 5] {
            assert!(adjoint_check(k).all_hold(), "k={k}");
        }
    }

    #[test]
    fn generator_names() {
        for g in Generator::ALL {
            assert_eq!(g.name().parse::<Generator>().unwrap(), g);
        }
        assert_eq!("b".parse::<Generator>(), Err(FockError::UnknownGenerator("b".into())));
    }

    #[test]
    fn boson_surrogate_convergence() {
        for k in [32u32, 48, 64] {
            for n in 0..4u32 {
                let entry = generator_matrix(k, Generator::APlus);
                let sq = entry.get(n as usize + 1, n as usize);
                let squared = (sq * sq).as_cyclotomic().unwrap();
                assert_eq!(squared, q_number(k, n + 1, false));
                let err = (squared.to_complex() - (n + 1) as f64).norm();
                let bound = 2.0 * std::f64::consts::PI * (n * (n + 1)) as f64 / k as f64;
                assert!(err <= bound + 1e-12, "k={k} n={n} err={err}");
            }
        }
    }
}
