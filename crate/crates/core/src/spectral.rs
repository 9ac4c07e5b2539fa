//! Exact Cheeger constants and edge densities by subset enumeration.
//!
//! Subsets are visited in Gray-code order with vertex 0 always inside, so
//! each unordered cut `{S, V - S}` is seen once and every step changes the
//! cut weight by one vertex's contribution. Both objectives are symmetric
//! under complement, and the lexicographically least witness always
//! contains vertex 0.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::diagonalise::{regularity_check, DiagonaliseError, SpectrumAssignment, Target};
use crate::graphs::WeightedGraph;
use crate::hadamard::{ButsonMatrix, Classification};
use crate::linalg::{integer_spectrum, symmetric_eigenvalues};

/// Largest order accepted by the brute-force routines.
pub const MAX_ORDER: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpectralError {
    #[error("graph has {0} vertices; brute force supports at most {MAX_ORDER}")]
    ScaleGuard(usize),
    #[error("graph needs at least two vertices and one edge")]
    Degenerate,
    #[error("weights too large for exact 128-bit enumeration")]
    Overflow,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Diagonalise(#[from] DiagonaliseError),
}

/// Exact statistics of one cut `(S, V - S)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutReport {
    pub subset: Vec<usize>,
    pub cut_weight: BigRational,
    /// `None` when one side has zero volume.
    pub cheeger_value: Option<BigRational>,
    pub density: BigRational,
}

impl Serialize for CutReport {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("CutReport", 4)?;
        st.serialize_field("subset", &self.subset)?;
        st.serialize_field("cut_weight", &self.cut_weight.to_string())?;
        st.serialize_field("cheeger_value", &self.cheeger_value.as_ref().map(ToString::to_string))?;
        st.serialize_field("density", &self.density.to_string())?;
        st.end()
    }
}

/// Direct evaluation of a cut. `subset` must be a nonempty proper subset.
pub fn cut_report(g: &WeightedGraph, subset: &[usize]) -> CutReport {
    let n = g.order();
    let mut inside = vec![false; n];
    for &v in subset {
        inside[v] = true;
    }
    let mut cut = BigRational::zero();
    let mut vol_in = BigRational::zero();
    let mut vol_out = BigRational::zero();
    for u in 0..n {
        let deg = g.degree(u);
        if inside[u] {
            vol_in += &deg;
            for v in 0..n {
                if !inside[v] {
                    cut += g.weight(u, v);
                }
            }
        } else {
            vol_out += &deg;
        }
    }
    let k = subset.len();
    let small = vol_in.min(vol_out);
    let cheeger_value = (!small.is_zero()).then(|| &cut / &small);
    let density = &cut * BigRational::from_integer(BigInt::from(n)) / BigRational::from_integer(BigInt::from(k * (n - k)));
    let mut subset = subset.to_vec();
    subset.sort_unstable();
    CutReport { subset, cut_weight: cut, cheeger_value, density }
}

#[derive(Clone, Copy)]
enum Objective {
    Cheeger,
    Density,
}

/// Integer form of a graph: weights scaled by the lcm of denominators.
struct Scaled {
    n: usize,
    w: Vec<i128>,
    deg: Vec<i128>,
    total_vol: i128,
    scale: i128,
}

impl Scaled {
    fn new(g: &WeightedGraph) -> Result<Self, SpectralError> {
        let n = g.order();
        if n > MAX_ORDER {
            return Err(SpectralError::ScaleGuard(n));
        }
        if n < 2 {
            return Err(SpectralError::Degenerate);
        }
        let (a, s) = g.scaled_adjacency();
        let w: Vec<i128> = a
            .iter()
            .map(|x| x.to_i128().filter(|v| v.abs() < 1 << 80))
            .collect::<Option<_>>()
            .ok_or(SpectralError::Overflow)?;
        let scale = s.to_i128().filter(|v| *v < 1 << 20).ok_or(SpectralError::Overflow)?;
        let deg: Vec<i128> = (0..n).map(|u| w[u * n..(u + 1) * n].iter().sum()).collect();
        let total_vol = deg.iter().sum();
        Ok(Self { n, w, deg, total_vol, scale })
    }

    /// Objective as a fraction `(num, den)`, or `None` if undefined.
    fn value(&self, obj: Objective, cut: i128, vol: i128, size: usize) -> Option<(i128, i128)> {
        match obj {
            Objective::Cheeger => {
                let den = vol.min(self.total_vol - vol);
                (den > 0).then_some((cut, den))
            }
            Objective::Density => {
                let n = self.n as i128;
                let k = size as i128;
                Some((n * cut, self.scale * k * (n - k)))
            }
        }
    }
}

#[derive(Clone, Copy)]
struct Best {
    num: i128,
    den: i128,
    mask: u32,
}

fn better(a: &Best, b: &Best) -> bool {
    match (a.num * b.den).cmp(&(b.num * a.den)) {
        Ordering::Less => true,
        Ordering::Greater => false,
        Ordering::Equal => lex_less(a.mask, b.mask),
    }
}

/// Lexicographic order of the sorted vertex lists of two masks.
fn lex_less(mut a: u32, mut b: u32) -> bool {
    while a != 0 && b != 0 {
        let (x, y) = (a.trailing_zeros(), b.trailing_zeros());
        if x != y {
            return x < y;
        }
        a &= a - 1;
        b &= b - 1;
    }
    a == 0 && b != 0
}

fn minimise(g: &WeightedGraph, obj: Objective) -> Result<(BigRational, CutReport), SpectralError> {
    let sc = Scaled::new(g)?;
    let n = sc.n;
    let free = n - 1;
    let steps: u64 = 1 << free;
    let chunk_bits = free.min(6);
    let chunks: u64 = 1 << chunk_bits;
    let per_chunk = steps / chunks;
    let full = (1u32 << n) - 1;

    let best = (0..chunks)
        .into_par_iter()
        .filter_map(|c| {
            let start = c * per_chunk;
            let gray = |i: u64| (i ^ (i >> 1)) as u32;
            // Vertex v >= 1 is bit v - 1 of the Gray code; vertex 0 is always in S.
            let mut mask = 1u32 | (gray(start) << 1);
            let mut into = vec![0i128; n];
            let (mut cut, mut vol) = (0i128, 0i128);
            for u in (0..n).filter(|&u| mask >> u & 1 == 1) {
                vol += sc.deg[u];
                for v in 0..n {
                    into[v] += sc.w[v * n + u];
                }
            }
            for u in (0..n).filter(|&u| mask >> u & 1 == 1) {
                cut += sc.deg[u] - into[u];
            }
            let mut local: Option<Best> = None;
            for i in start..start + per_chunk {
                if i > start {
                    let v = (gray(i) ^ gray(i - 1)).trailing_zeros() as usize + 1;
                    if mask >> v & 1 == 0 {
                        cut += sc.deg[v] - 2 * into[v];
                        vol += sc.deg[v];
                        mask |= 1 << v;
                        for u in 0..n {
                            into[u] += sc.w[u * n + v];
                        }
                    } else {
                        mask &= !(1 << v);
                        for u in 0..n {
                            into[u] -= sc.w[u * n + v];
                        }
                        cut -= sc.deg[v] - 2 * into[v];
                        vol -= sc.deg[v];
                    }
                }
                if mask == full {
                    continue;
                }
                let size = mask.count_ones() as usize;
                if let Some((num, den)) = sc.value(obj, cut, vol, size) {
                    let cand = Best { num, den, mask };
                    if local.as_ref().is_none_or(|b| better(&cand, b)) {
                        local = Some(cand);
                    }
                }
            }
            local
        })
        .reduce_with(|a, b| if better(&b, &a) { b } else { a })
        .ok_or(SpectralError::Degenerate)?;

    let subset: Vec<usize> = (0..n).filter(|&v| best.mask >> v & 1 == 1).collect();
    let report = cut_report(g, &subset);
    let value = match obj {
        Objective::Cheeger => report.cheeger_value.clone().expect("defined by construction"),
        Objective::Density => report.density.clone(),
    };
    debug_assert_eq!(value, BigRational::new(best.num.into(), best.den.into()));
    Ok((value, report))
}

/// `h_G = min_S |E(S, V-S)| / min(vol S, vol(V-S))`, with the
/// lexicographically least minimising subset.
pub fn cheeger(g: &WeightedGraph) -> Result<(BigRational, CutReport), SpectralError> {
    minimise(g, Objective::Cheeger)
}

/// `min_S n |E(S, V-S)| / (|S| |V-S|)`, with the lexicographically least
/// minimising subset.
pub fn min_edge_density(g: &WeightedGraph) -> Result<(BigRational, CutReport), SpectralError> {
    minimise(g, Objective::Density)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TightnessReport {
    pub h: String,
    pub lambda2: String,
    pub degree: String,
    pub gamma2: String,
    /// `h_G = γ_2 / 2`.
    pub tight: bool,
    /// Cut from the `{±1, ±i}` column of `λ_2`.
    pub witness: CutReport,
    pub witness_column: usize,
    /// `h_G(S) = γ_2 / 2` and `2 d h_G(S) = ρ(S)` for the witness.
    pub witness_tight: bool,
    pub min_density: String,
    /// `λ_2 = min ρ(S)`.
    pub density_matches: bool,
}

impl TightnessReport {
    pub fn holds(&self) -> bool {
        self.tight && self.witness_tight && self.density_matches
    }
}

/// Compares the brute-force Cheeger constant and minimum edge density
/// with `λ_2` for a graph certified by a Real or Turyn matrix.
pub fn tightness_check(
    g: &WeightedGraph,
    h: &ButsonMatrix,
    spectrum: &SpectrumAssignment,
) -> Result<TightnessReport, SpectralError> {
    let pre = |m: &str| Err(SpectralError::Precondition(m.to_string()));
    if !matches!(h.classify(), Classification::Real | Classification::Turyn) {
        return pre("diagonaliser must be Real or Turyn");
    }
    if !g.is_unweighted() || !g.is_connected() {
        return pre("graph must be unweighted and connected");
    }
    if spectrum.target != Target::Laplacian || spectrum.len() != g.order() {
        return pre("a Laplacian spectrum for this graph is required");
    }
    let Some(d) = regularity_check(g) else {
        return pre("graph is not regular");
    };
    let vals = spectrum
        .rationals()
        .ok_or_else(|| SpectralError::Precondition("spectrum is not rational".into()))?;
    let mut sorted = vals.clone();
    sorted.sort();
    let lambda2 = sorted.get(1).cloned().ok_or(SpectralError::Degenerate)?;
    let two = BigRational::from_integer(2.into());
    let gamma2 = &lambda2 / &d;
    let half = &gamma2 / &two;

    let (h_g, _) = cheeger(g)?;
    let (rho, _) = min_edge_density(g)?;

    let col = (1..g.order())
        .find(|&k| vals[k] == lambda2)
        .expect("λ_2 is attained by a non-trivial column");
    let r = h.root_order();
    let subset: Vec<usize> = h
        .column(col)
        .iter()
        .enumerate()
        .filter(|(_, &e)| 4 * e % r == 0 && 4 * e / r < 2)
        .map(|(v, _)| v)
        .collect();
    let witness = cut_report(g, &subset);
    let witness_tight = witness.cheeger_value.as_ref() == Some(&half)
        && witness.cheeger_value.as_ref().map(|x| &two * &d * x) == Some(witness.density.clone());

    Ok(TightnessReport {
        h: h_g.to_string(),
        lambda2: lambda2.to_string(),
        degree: d.to_string(),
        gamma2: gamma2.to_string(),
        tight: h_g == half,
        witness,
        witness_column: col,
        witness_tight,
        min_density: rho.to_string(),
        density_matches: rho == lambda2,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheegerAudit {
    pub h: String,
    pub lambda2: String,
    pub gamma2: String,
    /// Whether `λ_2` was known exactly.
    pub exact: bool,
    pub lower_holds: bool,
    pub upper_holds: bool,
}

/// Checks `γ_2 / 2 <= h_G <= sqrt(2 γ_2)` for a regular graph. `λ_2` comes
/// from `spectrum` when it is rational, else from an exact integer
/// factorisation of the characteristic polynomial, else from a float
/// eigensolve. The upper bound is compared as `h_G^2 <= 2 γ_2`.
pub fn cheeger_inequality_audit(
    g: &WeightedGraph,
    spectrum: Option<&SpectrumAssignment>,
) -> Result<CheegerAudit, SpectralError> {
    let d = regularity_check(g).ok_or_else(|| SpectralError::Precondition("graph is not regular".into()))?;
    if d.is_zero() {
        return Err(SpectralError::Degenerate);
    }
    let (h_g, _) = cheeger(g)?;
    let two = BigRational::from_integer(2.into());
    let exact_lambda2 = spectrum
        .filter(|s| s.target == Target::Laplacian)
        .and_then(SpectrumAssignment::sorted_rationals)
        .and_then(|v| v.get(1).cloned())
        .or_else(|| {
            let n = g.order();
            let (a, s) = g.scaled_adjacency();
            let mut l: Vec<BigInt> = a.iter().map(|x| -x).collect();
            for u in 0..n {
                l[u * n + u] = a[u * n..(u + 1) * n].iter().sum();
            }
            integer_spectrum(&l, n).map(|v| BigRational::new(v[1].clone(), s))
        });
    match exact_lambda2 {
        Some(lambda2) => {
            let gamma2 = &lambda2 / &d;
            Ok(CheegerAudit {
                h: h_g.to_string(),
                lambda2: lambda2.to_string(),
                gamma2: gamma2.to_string(),
                exact: true,
                lower_holds: &gamma2 / &two <= h_g,
                upper_holds: &h_g * &h_g <= &two * &gamma2,
            })
        }
        None => {
            let lf: Vec<f64> = g.laplacian().iter().map(to_f64).collect();
            let lambda2 = symmetric_eigenvalues(&lf, g.order())[1];
            let gamma2 = lambda2 / to_f64(&d);
            let h = to_f64(&h_g);
            Ok(CheegerAudit {
                h: h_g.to_string(),
                lambda2: format!("{lambda2:.12}"),
                gamma2: format!("{gamma2:.12}"),
                exact: false,
                lower_holds: gamma2 / 2.0 <= h + 1e-12,
                upper_holds: h * h <= 2.0 * gamma2 + 1e-12,
            })
        }
    }
}

fn to_f64(q: &BigRational) -> f64 {
    q.numer().to_f64().unwrap_or(f64::NAN) / q.denom().to_f64().unwrap_or(f64::NAN)
}
