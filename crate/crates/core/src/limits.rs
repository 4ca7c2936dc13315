//! Floating-point checks of the Q → q degeneration of Q-deformed coherent
//! states into a boson ⊗ k-fermion product.
//!
//! Q approaches q = exp(2πi/k) radially, Q(ε) = q·e^ε with ε > 0, so |Q| ≠ 1
//! along the whole path.

use std::fmt;
use std::io::{self, Write};

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::scalar::RadicalScalar;

/// Below this distance from 1 the closed form (1 - Qⁿ)/(1 - Q) is replaced
/// by the term sum.
pub const NEAR_ONE: f64 = 1e-8;

/// Errors at or below this size count as exact agreement.
pub const EXACT_TOL: f64 = 1e-13;

/// Accepted empirical convergence order.
pub const SLOPE_RANGE: (f64, f64) = (0.8, 1.2);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LimitError {
    #[error("eps schedule must be non-empty, positive and strictly decreasing")]
    InvalidSchedule,
    #[error("{0}")]
    InvalidParameter(String),
    #[error("|Q| = 1: deformation parameter must lie off the unit circle")]
    OnUnitCircle,
    #[error("numeric range exceeded while forming {0}")]
    Range(String),
}

/// [n]_Q in floating point.
pub fn q_number_f(q: Complex64, n: u32) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    if (one - q).norm() < NEAR_ONE {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut p = one;
        for _ in 0..n {
            acc += p;
            p *= q;
        }
        acc
    } else {
        (one - q.powu(n)) / (one - q)
    }
}

/// [n]_Q! in floating point.
pub fn q_factorial_f(q: Complex64, n: u32) -> Complex64 {
    (1..=n).map(|j| q_number_f(q, j)).product()
}

/// q = exp(2πi/k).
pub fn root_of_unity(k: u32) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / k as f64)
}

/// Q(ε) = q·e^ε.
pub fn radial_path(k: u32, eps: f64) -> Complex64 {
    root_of_unity(k) * eps.exp()
}

/// Positive, strictly decreasing ε values.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsSchedule(Vec<f64>);

impl EpsSchedule {
    pub fn new(values: Vec<f64>) -> Result<Self, LimitError> {
        let valid = !values.is_empty()
            && values.iter().all(|&e| e > 0.0 && e.is_finite())
            && values.windows(2).all(|w| w[1] < w[0]);
        if valid {
            Ok(EpsSchedule(values))
        } else {
            Err(LimitError::InvalidSchedule)
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

impl Default for EpsSchedule {
    fn default() -> Self {
        EpsSchedule(vec![1e-2, 1e-3, 1e-4])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Quantity {
    /// [k]_Q / [rk]_Q → 1/r
    KRatio,
    /// [s]_Q / [rk+s]_Q → 1
    SRatio,
    /// [rk+s]_Q! / ([s]_Q! ([k]_Q!)^r r!) → 1
    Factorization,
    /// rescaled deformed amplitude at level rk+s → α^r/√(r!)
    Amplitude,
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Quantity::KRatio => "k_ratio",
            Quantity::SRatio => "s_ratio",
            Quantity::Factorization => "factorization",
            Quantity::Amplitude => "amplitude",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub eps: f64,
    pub error: f64,
}

/// |value(ε) − limit| over an ε schedule with its log-log slope.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub quantity: Quantity,
    pub k: u32,
    pub r: u32,
    pub s: u32,
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares slope of ln(error) against ln(ε); `None` when the
    /// table is exact or has fewer than two rows.
    pub slope: Option<f64>,
}

impl ConvergenceTable {
    fn new(quantity: Quantity, k: u32, r: u32, s: u32, rows: Vec<ConvergenceRow>) -> Self {
        let slope = if rows.len() >= 2 && rows.iter().all(|row| row.error > EXACT_TOL) {
            Some(log_log_slope(&rows))
        } else {
            None
        };
        ConvergenceTable {
            quantity,
            k,
            r,
            s,
            rows,
            slope,
        }
    }

    /// Every error is at round-off level.
    pub fn is_exact(&self) -> bool {
        self.rows.iter().all(|row| row.error <= EXACT_TOL)
    }

    /// Exact, or converging with slope inside [`SLOPE_RANGE`].
    pub fn passes(&self) -> bool {
        self.is_exact() || self.slope.is_some_and(|m| (SLOPE_RANGE.0..=SLOPE_RANGE.1).contains(&m))
    }

    /// Error at the smallest ε.
    pub fn final_error(&self) -> f64 {
        self.rows.last().map_or(f64::NAN, |row| row.error)
    }
}

fn log_log_slope(rows: &[ConvergenceRow]) -> f64 {
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.eps.ln(), r.error.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

fn check_s(k: u32, s: u32) -> Result<(), LimitError> {
    if k < 2 {
        return Err(LimitError::InvalidParameter(format!("k must be at least 2, got {k}")));
    }
    if s >= k {
        return Err(LimitError::InvalidParameter(format!("s must be below k={k}, got {s}")));
    }
    Ok(())
}

/// Convergence of [k]_Q/[rk]_Q → 1/r (for r ≥ 1) and [s]_Q/[rk+s]_Q → 1
/// (for s ≥ 1; the s = 0 ratio is 0/0-free only as the empty product and
/// is not tabulated).
pub fn ratio_limits(k: u32, r: u32, s: u32, schedule: &EpsSchedule) -> Result<Vec<ConvergenceTable>, LimitError> {
    check_s(k, s)?;
    let mut tables = Vec::new();
    if r >= 1 {
        let rows = schedule
            .values()
            .iter()
            .map(|&eps| {
                let q = radial_path(k, eps);
                let ratio = q_number_f(q, k) / q_number_f(q, r * k);
                ConvergenceRow {
                    eps,
                    error: (ratio - 1.0 / r as f64).norm(),
                }
            })
            .collect();
        tables.push(ConvergenceTable::new(Quantity::KRatio, k, r, s, rows));
    }
    if s >= 1 {
        let rows = schedule
            .values()
            .iter()
            .map(|&eps| {
                let q = radial_path(k, eps);
                let ratio = q_number_f(q, s) / q_number_f(q, r * k + s);
                ConvergenceRow {
                    eps,
                    error: (ratio - 1.0).norm(),
                }
            })
            .collect();
        tables.push(ConvergenceTable::new(Quantity::SRatio, k, r, s, rows));
    }
    Ok(tables)
}

fn guarded(value: Complex64, what: &str) -> Result<Complex64, LimitError> {
    let norm = value.norm();
    if norm.is_finite() && norm >= f64::MIN_POSITIVE {
        Ok(value)
    } else {
        Err(LimitError::Range(what.to_string()))
    }
}

/// [rk+s]_Q! / ([s]_Q! ([k]_Q!)^r r!) at a single Q, formed directly; fails
/// with [`LimitError::Range`] if any factor leaves the normal f64 range.
pub fn factorization_ratio(q: Complex64, k: u32, r: u32, s: u32) -> Result<Complex64, LimitError> {
    let mut numerator = Complex64::new(1.0, 0.0);
    for m in 1..=(r * k + s) {
        numerator = guarded(numerator * q_number_f(q, m), "[rk+s]_Q!")?;
    }
    let k_fact = guarded(q_factorial_f(q, k), "[k]_Q!")?;
    let mut denominator = guarded(q_factorial_f(q, s), "[s]_Q!")?;
    for _ in 0..r {
        denominator = guarded(denominator * k_fact, "([k]_Q!)^r")?;
    }
    for j in 1..=r {
        denominator = guarded(denominator * j as f64, "r!")?;
    }
    Ok(numerator / denominator)
}

/// Convergence of the scalar core of the coefficient factorization.
pub fn factorization_check(k: u32, r: u32, s: u32, schedule: &EpsSchedule) -> Result<ConvergenceTable, LimitError> {
    check_s(k, s)?;
    let rows = schedule
        .values()
        .iter()
        .map(|&eps| {
            let ratio = factorization_ratio(radial_path(k, eps), k, r, s)?;
            Ok(ConvergenceRow {
                eps,
                error: (ratio - 1.0).norm(),
            })
        })
        .collect::<Result<Vec<_>, LimitError>>()?;
    Ok(ConvergenceTable::new(Quantity::Factorization, k, r, s, rows))
}

/// Q-deformed oscillator truncated to Fock levels 0..levels-1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeformedOscillator {
    q: Complex64,
    levels: u32,
}

impl DeformedOscillator {
    pub fn new(q: Complex64, levels: u32) -> Result<Self, LimitError> {
        if (q.norm() - 1.0).abs() < f64::EPSILON {
            return Err(LimitError::OnUnitCircle);
        }
        if levels == 0 {
            return Err(LimitError::InvalidParameter("truncation must be at least 1".into()));
        }
        Ok(DeformedOscillator { q, levels })
    }

    pub fn q(&self) -> Complex64 {
        self.q
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    /// Coherent state Σ Zⁿ/√([n]_Q!) |n⟩, built by the b₊ recurrence
    /// amp(n+1) = amp(n)·Z/√([n+1]_Q) with principal square roots.
    pub fn coherent_state(&self, z: Complex64) -> DeformedKet {
        let mut amps = Vec::with_capacity(self.levels as usize);
        let mut amp = Complex64::new(1.0, 0.0);
        for n in 0..self.levels {
            amps.push(amp);
            amp = amp * z / q_number_f(self.q, n + 1).sqrt();
        }
        DeformedKet { z, amps }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeformedKet {
    pub z: Complex64,
    pub amps: Vec<Complex64>,
}

/// Boson coherent factor ⊗ k-fermion factor.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuperCoherentState {
    pub k: u32,
    pub alpha: (f64, f64),
    /// α^r/√(r!) for r = 0..R-1.
    pub boson: Vec<(f64, f64)>,
    /// 1/√([s]_q!) for s = 0..k-1; the Grassmann factor z^s is implicit.
    pub kfermion: Vec<(f64, f64)>,
}

fn pair(c: Complex64) -> (f64, f64) {
    (c.re, c.im)
}

fn unpair(p: (f64, f64)) -> Complex64 {
    Complex64::new(p.0, p.1)
}

impl SuperCoherentState {
    /// Joint amplitude at Fock level rk + s.
    pub fn joint(&self, r: usize, s: usize) -> Complex64 {
        unpair(self.boson[r]) * unpair(self.kfermion[s])
    }

    /// Joint amplitudes ordered by level rk + s.
    pub fn joint_amplitudes(&self) -> Vec<Complex64> {
        (0..self.boson.len())
            .flat_map(|r| (0..self.kfermion.len()).map(move |s| (r, s)))
            .map(|(r, s)| self.joint(r, s))
            .collect()
    }
}

pub fn assemble_super_state(k: u32, alpha: Complex64, truncation: u32) -> Result<SuperCoherentState, LimitError> {
    if truncation == 0 {
        return Err(LimitError::InvalidParameter("truncation must be at least 1".into()));
    }
    if k < 2 {
        return Err(LimitError::InvalidParameter(format!("k must be at least 2, got {k}")));
    }
    let mut boson = Vec::with_capacity(truncation as usize);
    let mut amp = Complex64::new(1.0, 0.0);
    for r in 0..truncation {
        boson.push(pair(amp));
        amp = amp * alpha / ((r + 1) as f64).sqrt();
    }
    let kfermion = (0..k)
        .map(|s| {
            let inv = RadicalScalar::sqrt_q_factorial(k, s)
                .and_then(|x| x.invert_monomial())
                .expect("√([s]_q!) is invertible for s < k");
            pair(inv.to_complex())
        })
        .collect();
    Ok(SuperCoherentState {
        k,
        alpha: pair(alpha),
        boson,
        kfermion,
    })
}

/// Deformed amplitude at level rk+s divided by the k-fermion factor
/// Z^s/√([s]_Q!), with Z chosen so that Z^k/√([k]_Q!) = α.
pub fn rescaled_deformed_amplitude(k: u32, alpha: Complex64, r: u32, s: u32, eps: f64) -> Complex64 {
    let q = radial_path(k, eps);
    let sqrt_k_fact: Complex64 = (1..=k).map(|j| q_number_f(q, j).sqrt()).product();
    // Z^{rk} / Π_{j=s+1}^{rk+s} √[j]_Q, with Z^{rk} = (Z^k)^r
    let zk = alpha * sqrt_k_fact;
    (s + 1..=r * k + s).fold(zk.powu(r), |acc, j| acc / q_number_f(q, j).sqrt())
}

/// Convergence of the rescaled deformed amplitude to α^r/√(r!).
pub fn amplitude_check(
    k: u32,
    alpha: Complex64,
    r: u32,
    s: u32,
    schedule: &EpsSchedule,
) -> Result<ConvergenceTable, LimitError> {
    check_s(k, s)?;
    let target = (1..=r).fold(alpha.powu(r), |acc, j| acc / (j as f64).sqrt());
    let rows = schedule
        .values()
        .iter()
        .map(|&eps| ConvergenceRow {
            eps,
            error: (rescaled_deformed_amplitude(k, alpha, r, s, eps) - target).norm(),
        })
        .collect();
    Ok(ConvergenceTable::new(Quantity::Amplitude, k, r, s, rows))
}

/// CSV with header `k,r,s,eps,error,slope,quantity`; the slope column is
/// empty for exact tables.
pub fn write_csv<W: Write>(tables: &[ConvergenceTable], mut out: W) -> io::Result<()> {
    writeln!(out, "k,r,s,eps,error,slope,quantity")?;
    for t in tables {
        let slope = t.slope.map(|m| format!("{m:.6}")).unwrap_or_default();
        for row in &t.rows {
            writeln!(
                out,
                "{},{},{},{:e},{:e},{},{}",
                t.k, t.r, t.s, row.eps, row.error, slope, t.quantity
            )?;
        }
    }
    Ok(())
}
