//! Continuous-time Laplacian quantum walks `U(t) = exp(-i t L)` on graphs
//! with a known dephased diagonaliser.
//!
//! Times and phases are exact rational fractions of a full turn (`2π`).
//! Fractional revival from `a` to `b` at time `τ` means
//! `U(τ) e_a = α e_a + β e_b` with `α = cos γ e^{iγ}`, `β = -i sin γ e^{iγ}`
//! and `β ≠ 0`; `γ` is taken in `(-π/2, π/2]`.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::diagonalise::{certify, regularity_check, DiagonaliseError, SpectrumAssignment, Target};
use crate::graphs::{cayley, double_cover, AbelianGroup, GraphError, WeightedGraph};
use crate::hadamard::{character_table, ButsonMatrix, HadamardError};

/// Tolerance for float cross-checks of exact certificates.
pub const FLOAT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WalkError {
    #[error("exact certification needs integer eigenvalues; eigenvalue {0} is not an integer")]
    NonIntegerSpectrum(usize),
    #[error("vertex {0} out of range")]
    BadVertex(usize),
    #[error("invalid angle: {0}")]
    BadAngle(String),
    #[error("incompatible inputs: {0}")]
    Incompatible(String),
    #[error("consistency failure: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Diagonalise(#[from] DiagonaliseError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Hadamard(#[from] HadamardError),
}

/// The angle `2π · num / den`, reduced, with `num` in `[0, den)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Deserialize)]
#[serde(try_from = "AngleJson")]
pub struct RationalAngle {
    num: i64,
    den: i64,
}

impl RationalAngle {
    pub fn new(num: i64, den: i64) -> Result<Self, WalkError> {
        if den <= 0 {
            return Err(WalkError::BadAngle(format!("denominator {den} must be positive")));
        }
        let g = num.gcd(&den);
        let (num, den) = (num / g, den / g);
        Ok(Self { num: num.rem_euclid(den), den })
    }

    pub fn zero() -> Self {
        Self { num: 0, den: 1 }
    }

    /// `π · num / den`.
    pub fn of_pi(num: i64, den: i64) -> Result<Self, WalkError> {
        Self::new(num, 2 * den)
    }

    pub fn num(&self) -> i64 {
        self.num
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn times(&self, k: &BigInt) -> Self {
        let den = BigInt::from(self.den);
        let num = (k * self.num).mod_floor(&den);
        Self::new(num.to_i64().expect("reduced below den"), self.den).expect("den > 0")
    }

    pub fn add(&self, other: &Self) -> Self {
        let den = self.den.lcm(&other.den);
        Self::new(self.num * (den / self.den) + other.num * (den / other.den), den).expect("den > 0")
    }

    pub fn neg(&self) -> Self {
        Self::new(-self.num, self.den).expect("den > 0")
    }

    /// Half of this angle, as a phase defined modulo `π`.
    fn half(&self) -> Self {
        Self::new(self.num, 2 * self.den).expect("den > 0")
    }

    /// Representative in `(-1/2, 1/2]` turn.
    pub fn signed(&self) -> (i64, i64) {
        if 2 * self.num > self.den {
            (self.num - self.den, self.den)
        } else {
            (self.num, self.den)
        }
    }

    /// Signed value in radians.
    pub fn radians(&self) -> f64 {
        let (p, q) = self.signed();
        std::f64::consts::TAU * p as f64 / q as f64
    }

    /// Reduces a phase defined modulo `π` into `(-π/2, π/2]`, returned as
    /// an angle whose [`signed`](Self::signed) form lies in `(-1/4, 1/4]`.
    pub fn mod_pi(&self) -> Self {
        // Work modulo 1/2 turn: shift into (-1/4, 1/4].
        let (mut p, mut q) = (self.num, self.den);
        if q % 2 == 1 {
            p *= 2;
            q *= 2;
        }
        let half = q / 2;
        let mut r = p.rem_euclid(half);
        if 4 * r > q {
            r -= half;
        }
        Self::new(r, q).expect("den > 0")
    }
}

impl fmt::Display for RationalAngle {
    /// Signed form, e.g. `-1/6 of 2pi`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (p, q) = self.signed();
        write!(f, "{p}/{q} of 2pi")
    }
}

impl FromStr for RationalAngle {
    type Err = WalkError;

    /// Accepts `p/q`, `p/q of 2pi`, or `p/q pi`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || WalkError::BadAngle(s.to_string());
        let t = s.trim();
        let (frac, of_pi) = if let Some(x) = t.strip_suffix("of 2pi") {
            (x.trim(), false)
        } else if let Some(x) = t.strip_suffix("pi") {
            (x.trim(), true)
        } else {
            (t, false)
        };
        let (p, q) = match frac.split_once('/') {
            Some((p, q)) => (p.trim().parse::<i64>().map_err(|_| bad())?, q.trim().parse::<i64>().map_err(|_| bad())?),
            None => (frac.parse::<i64>().map_err(|_| bad())?, 1),
        };
        if of_pi {
            Self::of_pi(p, q)
        } else {
            Self::new(p, q)
        }
    }
}

impl Serialize for RationalAngle {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum AngleJson {
    Text(String),
    Object { num: i64, den: i64 },
}

impl TryFrom<AngleJson> for RationalAngle {
    type Error = WalkError;

    fn try_from(v: AngleJson) -> Result<Self, Self::Error> {
        match v {
            AngleJson::Text(s) => s.parse(),
            AngleJson::Object { num, den } => Self::new(num, den),
        }
    }
}

fn complex_pair<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

/// A verified fractional revival `U(τ) e_a = α e_a + β e_b`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FRCertificate {
    pub a: usize,
    pub b: usize,
    pub tau: RationalAngle,
    /// Normalised into `(-π/2, π/2]`.
    pub gamma: RationalAngle,
    #[serde(serialize_with = "complex_pair")]
    pub alpha: Complex64,
    #[serde(serialize_with = "complex_pair")]
    pub beta: Complex64,
    pub sign_pattern: Vec<i8>,
}

impl FRCertificate {
    pub fn is_pst(&self) -> bool {
        self.gamma == RationalAngle::new(1, 4).expect("valid")
    }
}

/// `α = cos γ e^{iγ}` and `β = -i sin γ e^{iγ}`.
pub fn alpha_beta(gamma: &RationalAngle) -> (Complex64, Complex64) {
    let g = gamma.radians();
    let phase = Complex64::from_polar(1.0, g);
    (phase * g.cos(), -Complex64::i() * phase * g.sin())
}

fn eigen_f64(spectrum: &SpectrumAssignment) -> Vec<f64> {
    spectrum.eigenvalues.iter().map(|e| e.to_complex().re).collect()
}

/// `(1/n) H exp(-i t Λ) H*`.
pub fn evolve(h: &ButsonMatrix, spectrum: &SpectrumAssignment, t: f64) -> DMatrix<Complex64> {
    let n = h.order();
    let hc = h.to_complex();
    let mut scaled = hc.clone();
    for (j, lam) in eigen_f64(spectrum).into_iter().enumerate() {
        let phase = Complex64::from_polar(1.0, -t * lam);
        for u in 0..n {
            scaled[(u, j)] *= phase;
        }
    }
    scaled * hc.adjoint() / Complex64::new(n as f64, 0.0)
}

/// Column `a` of [`evolve`], i.e. `U(t) e_a`.
pub fn evolve_column(h: &ButsonMatrix, spectrum: &SpectrumAssignment, t: f64, a: usize) -> Vec<Complex64> {
    let n = h.order();
    let lams = eigen_f64(spectrum);
    let weights: Vec<Complex64> = (0..n)
        .map(|j| Complex64::from_polar(1.0, -t * lams[j]) * h.entry(a, j).conj())
        .collect();
    (0..n)
        .map(|u| (0..n).map(|j| h.entry(u, j) * weights[j]).sum::<Complex64>() / n as f64)
        .collect()
}

/// Largest entry of `|X - Y|`.
pub fn max_abs_diff(x: &DMatrix<Complex64>, y: &DMatrix<Complex64>) -> f64 {
    x.iter().zip(y.iter()).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max)
}

/// Signs `σ_j` with `H[a][j] = σ_j H[b][j]`, if they exist.
pub fn strongly_cospectral(h: &ButsonMatrix, a: usize, b: usize) -> Option<Vec<i8>> {
    let r = h.root_order();
    let n = h.order();
    if a >= n || b >= n {
        return None;
    }
    (0..n)
        .map(|j| {
            let (x, y) = (h.exp(a, j), h.exp(b, j));
            if x == y {
                Some(1)
            } else if r.is_multiple_of(2) && (x + r - y) % r == r / 2 {
                Some(-1)
            } else {
                None
            }
        })
        .collect()
}

fn integer_spectrum(spectrum: &SpectrumAssignment) -> Result<Vec<BigInt>, WalkError> {
    spectrum
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(j, e)| e.as_integer().ok_or(WalkError::NonIntegerSpectrum(j)))
        .collect()
}

fn check_vertices(h: &ButsonMatrix, a: usize, b: usize) -> Result<(), WalkError> {
    let n = h.order();
    for v in [a, b] {
        if v >= n {
            return Err(WalkError::BadVertex(v));
        }
    }
    Ok(())
}

/// Exact fractional revival test: `σ_j = +1` needs `τ λ_j ≡ 0` and
/// `σ_j = -1` needs `-τ λ_j ≡ 2γ (mod 2π)`, with `2γ ≢ 0` so that `β ≠ 0`.
pub fn check_fr(
    h: &ButsonMatrix,
    spectrum: &SpectrumAssignment,
    a: usize,
    b: usize,
    tau: &RationalAngle,
    gamma: &RationalAngle,
) -> Result<bool, WalkError> {
    check_vertices(h, a, b)?;
    let lams = integer_spectrum(spectrum)?;
    let two_gamma = gamma.times(&BigInt::from(2));
    if two_gamma.is_zero() {
        return Ok(false);
    }
    let Some(sigma) = strongly_cospectral(h, a, b) else {
        return Ok(false);
    };
    if !sigma.contains(&-1) {
        return Ok(false);
    }
    Ok(sigma.iter().zip(&lams).all(|(&s, lam)| {
        let phase = tau.times(lam);
        if s == 1 {
            phase.is_zero()
        } else {
            phase.neg() == two_gamma
        }
    }))
}

/// Perfect state transfer: [`check_fr`] with `γ = π/2`.
pub fn check_pst(
    h: &ButsonMatrix,
    spectrum: &SpectrumAssignment,
    a: usize,
    b: usize,
    tau: &RationalAngle,
) -> Result<bool, WalkError> {
    check_fr(h, spectrum, a, b, tau, &RationalAngle::new(1, 4).expect("valid"))
}

fn divisors(m: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= m {
        if m.is_multiple_of(d) {
            small.push(d);
            if d * d != m {
                large.push(m / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Every fractional revival between vertex pairs `a < b`, with times
/// `τ = 2π s / q` in `(0, 2π)`.
///
/// With `P` and `M` the eigenvalues on the `σ = +1` and `σ = -1` columns,
/// a valid `q` divides every nonzero element of `P` and every difference
/// within `M`, and `2γ ≡ -s μ / q` for any `μ ∈ M`. If those constraints
/// leave `q` unbounded, `q` is limited to divisors of `2 lcm(|M|)`.
/// Each certificate is cross-checked against [`evolve_column`].
pub fn find_fr(h: &ButsonMatrix, spectrum: &SpectrumAssignment) -> Result<Vec<FRCertificate>, WalkError> {
    let lams = integer_spectrum(spectrum)?;
    let n = h.order();
    let small: Vec<i64> = lams
        .iter()
        .map(|x| x.to_i64().filter(|v| v.abs() < 1 << 40))
        .collect::<Option<_>>()
        .ok_or_else(|| WalkError::Incompatible("eigenvalues too large".into()))?;
    let per_a: Vec<Result<Vec<FRCertificate>, WalkError>> = (0..n)
        .into_par_iter()
        .map(|a| {
            let mut out = Vec::new();
            for b in (a + 1)..n {
                let Some(sigma) = strongly_cospectral(h, a, b) else {
                    continue;
                };
                out.extend(pair_certificates(h, spectrum, &small, a, b, sigma)?);
            }
            Ok(out)
        })
        .collect();
    let mut all = Vec::new();
    for chunk in per_a {
        all.extend(chunk?);
    }
    Ok(all)
}

fn pair_certificates(
    h: &ButsonMatrix,
    spectrum: &SpectrumAssignment,
    lams: &[i64],
    a: usize,
    b: usize,
    sigma: Vec<i8>,
) -> Result<Vec<FRCertificate>, WalkError> {
    let plus: Vec<i64> = sigma.iter().zip(lams).filter(|(s, _)| **s == 1).map(|(_, &l)| l).collect();
    let minus: Vec<i64> = sigma.iter().zip(lams).filter(|(s, _)| **s == -1).map(|(_, &l)| l).collect();
    let Some(&mu) = minus.first() else {
        return Ok(Vec::new());
    };
    let mut g: u64 = 0;
    for &x in plus.iter().filter(|x| **x != 0) {
        g = g.gcd(&x.unsigned_abs());
    }
    for &x in &minus {
        g = g.gcd(&(x - mu).unsigned_abs());
    }
    let bound = if g == 0 {
        let l = minus
            .iter()
            .filter(|x| **x != 0)
            .fold(1u64, |acc, x| acc.lcm(&x.unsigned_abs()));
        2 * l
    } else {
        g
    };
    let mut out = Vec::new();
    for q in divisors(bound).into_iter().filter(|&q| q > 1) {
        let q_i = q as i64;
        if mu.rem_euclid(q_i) == 0 {
            continue; // 2γ ≡ 0, so β = 0.
        }
        for s in (1..q_i).filter(|s| s.gcd(&q_i) == 1) {
            let tau = RationalAngle::new(s, q_i)?;
            let two_gamma = tau.times(&BigInt::from(mu)).neg();
            let gamma = two_gamma.half().mod_pi();
            debug_assert!(check_fr(h, spectrum, a, b, &tau, &gamma).unwrap_or(false));
            let (alpha, beta) = alpha_beta(&gamma);
            let col = evolve_column(h, spectrum, std::f64::consts::TAU * s as f64 / q as f64, a);
            let err = col
                .iter()
                .enumerate()
                .map(|(u, z)| {
                    let want = if u == a {
                        alpha
                    } else if u == b {
                        beta
                    } else {
                        Complex64::zero()
                    };
                    (z - want).norm()
                })
                .fold(0.0, f64::max);
            if err > FLOAT_TOL {
                return Err(WalkError::Inconsistent(format!(
                    "certificate ({a}, {b}, {tau}) deviates from evolution by {err:e}"
                )));
            }
            out.push(FRCertificate { a, b, tau, gamma, alpha, beta, sign_pattern: sigma.clone() });
        }
    }
    out.sort_by_key(|c| (c.tau.den, c.tau.num));
    Ok(out)
}

/// The three conditions for fractional revival on a Cayley graph, with
/// `β` identified as `1 - α`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CayleyFrReport {
    pub integer_spectrum: bool,
    pub order_two: bool,
    /// `e^{-iτλ_j} = α + χ_j(a - b)(1 - α)` for a common `α`.
    pub phase_identity: bool,
    pub beta_nonzero: bool,
    /// `γ` with `α - β = e^{2iγ}`, when the identity holds.
    pub gamma: Option<RationalAngle>,
    pub holds: bool,
}

pub fn cayley_fr_conditions(
    group: &AbelianGroup,
    connection: &[Vec<usize>],
    a: &[usize],
    b: &[usize],
    tau: &RationalAngle,
) -> Result<CayleyFrReport, WalkError> {
    let g = cayley(group, connection)?;
    let h = character_table(group.moduli())?;
    let spectrum = certify(&g, &h, Target::Laplacian)?
        .ok_or_else(|| WalkError::Inconsistent("character table does not diagonalise the Cayley graph".into()))?;
    let diff = group.sub(a, b);
    let order_two = group.element_order(&diff) == 2;
    let lams = integer_spectrum(&spectrum).ok();
    let integer = lams.is_some();
    let (mut phase_identity, mut gamma) = (false, None);
    if let (Some(lams), true) = (lams, order_two) {
        let row = group.index(&diff)?;
        let r = h.root_order();
        // χ_j(a - b) is ±1 because a - b has order two.
        let mut minus_phase: Option<RationalAngle> = None;
        phase_identity = (0..h.order()).all(|j| {
            let phase = tau.times(&lams[j]).neg();
            if h.exp(row, j) == 0 {
                phase.is_zero()
            } else {
                debug_assert_eq!(2 * h.exp(row, j), r);
                *minus_phase.get_or_insert(phase) == phase
            }
        });
        if phase_identity {
            gamma = minus_phase.map(|p| p.half().mod_pi());
        }
    }
    let beta_nonzero = gamma.is_some_and(|g| !g.is_zero());
    Ok(CayleyFrReport {
        integer_spectrum: integer,
        order_two,
        phase_identity,
        beta_nonzero,
        gamma,
        holds: integer && order_two && phase_identity && beta_nonzero,
    })
}

/// Fractional revival from `(a, 0)` to `(a, 1)` on `G1 ⋉ G2`: returns
/// `γ = -d_2 τ (mod π)` when `τ(λ_j ± μ_j) ≡ 0` for every column and
/// `β ≠ 0`. The answer is cross-checked with [`check_fr`] on the cover
/// under `double(H)` for `a = 0`.
pub fn double_cover_fr(
    g1: &WeightedGraph,
    g2: &WeightedGraph,
    h: &ButsonMatrix,
    tau: &RationalAngle,
) -> Result<Option<RationalAngle>, WalkError> {
    let s1 = certify(g1, h, Target::Laplacian)?
        .ok_or_else(|| WalkError::Incompatible("H does not diagonalise G1".into()))?;
    let s2 = certify(g2, h, Target::Laplacian)?
        .ok_or_else(|| WalkError::Incompatible("H does not diagonalise G2".into()))?;
    let lam = integer_spectrum(&s1)?;
    let mu = integer_spectrum(&s2)?;
    let d2 = regularity_check(g2)
        .filter(|d| d.is_integer())
        .ok_or_else(|| WalkError::Incompatible("G2 must have integer degree".into()))?
        .to_integer();
    let congruent = lam
        .iter()
        .zip(&mu)
        .all(|(l, m)| tau.times(&(l + m)).is_zero() && tau.times(&(l - m)).is_zero());
    let gamma = tau.times(&d2).neg().mod_pi();
    let answer = (congruent && !gamma.is_zero()).then_some(gamma);

    let cover = double_cover(g1, g2)?;
    let dh = h.double();
    let sc = certify(&cover, &dh, Target::Laplacian)?
        .ok_or_else(|| WalkError::Inconsistent("double(H) does not diagonalise the cover".into()))?;
    let n = g1.order();
    if check_fr(&dh, &sc, 0, n, tau, &gamma)? != answer.is_some() {
        return Err(WalkError::Inconsistent("cover check disagrees with the congruences".into()));
    }
    Ok(answer)
}

/// `exp(-itA) = e^{-idt} conj(exp(-itL))` within [`FLOAT_TOL`].
pub fn adjacency_walk_relation(
    g: &WeightedGraph,
    h: &ButsonMatrix,
    laplacian: &SpectrumAssignment,
    t: f64,
) -> Result<bool, WalkError> {
    let d = regularity_check(g).ok_or_else(|| WalkError::Incompatible("graph is not regular".into()))?;
    let adjacency = certify(g, h, Target::Adjacency)?
        .ok_or_else(|| WalkError::Inconsistent("adjacency not diagonalised".into()))?;
    let d = crate::diagonalise::Eigenvalue::Rational(d).to_complex().re;
    let ua = evolve(h, &adjacency, t);
    let ul = evolve(h, laplacian, t).map(|z| z.conj()) * Complex64::from_polar(1.0, -d * t);
    Ok(max_abs_diff(&ua, &ul) <= FLOAT_TOL)
}

#[cfg(test)]
mod tests;
