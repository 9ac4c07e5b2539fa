//! Exact certification that a dephased Butson matrix diagonalises a
//! graph, and the structural consequences that follow from it.

pub mod catalogue;
pub mod partition;

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::cyclotomic::CyclotomicInt;
use crate::graphs::{GraphError, WeightedGraph};
use crate::hadamard::{is_prime, weighted_root_sum, ButsonMatrix, Classification, HadamardError};

pub use catalogue::{catalogue, graphs_diagonalised_by, Catalogue, CatalogueEntry};
pub use partition::{
    bipartition_from_column, four_cell_partition, p_partition_from_column, split_check, EquitablePartition,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagonaliseError {
    #[error("graph has {graph} vertices but the matrix has order {matrix}")]
    OrderMismatch { graph: usize, matrix: usize },
    #[error("matrix is not a complex Hadamard matrix")]
    NotHadamard,
    #[error("matrix is not dephased; dephase it first")]
    NotDephased,
    #[error("column {0} is out of range or is the all-ones column")]
    BadColumn(usize),
    #[error("column {0} has entries outside {{1, i, -1, -i}}")]
    UnsupportedColumn(usize),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("consistency failure: {0}")]
    Inconsistent(String),
    #[error("max_n = {0} exceeds the supported limit of 8")]
    ScaleGuard(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Hadamard(#[from] HadamardError),
}

/// Which matrix of the graph is being diagonalised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Laplacian,
    Adjacency,
}

/// An exact eigenvalue. Algebraic values are stored as `scaled / denom`
/// with `scaled` a cyclotomic integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Eigenvalue {
    Rational(BigRational),
    Algebraic { scaled: CyclotomicInt, denom: BigInt },
}

impl Eigenvalue {
    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Eigenvalue::Rational(q) => Some(q),
            Eigenvalue::Algebraic { .. } => None,
        }
    }

    pub fn as_integer(&self) -> Option<BigInt> {
        self.as_rational().filter(|q| q.is_integer()).map(|q| q.to_integer())
    }

    pub fn to_complex(&self) -> Complex64 {
        match self {
            Eigenvalue::Rational(q) => Complex64::new(rational_to_f64(q), 0.0),
            Eigenvalue::Algebraic { scaled, denom } => {
                scaled.to_complex() / denom.to_f64().unwrap_or(f64::NAN)
            }
        }
    }
}

impl fmt::Display for Eigenvalue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Eigenvalue::Rational(q) => write!(f, "{q}"),
            Eigenvalue::Algebraic { scaled, denom } if denom.is_one() => write!(f, "{scaled}"),
            Eigenvalue::Algebraic { scaled, denom } => write!(f, "({scaled})/{denom}"),
        }
    }
}

impl Serialize for Eigenvalue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

pub(crate) fn rational_to_f64(q: &BigRational) -> f64 {
    q.numer().to_f64().unwrap_or(f64::NAN) / q.denom().to_f64().unwrap_or(f64::NAN)
}

/// Eigenvalue `λ_j` for column `h_j` of a dephased diagonaliser.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpectrumAssignment {
    pub target: Target,
    pub root_order: usize,
    pub dephased: bool,
    pub eigenvalues: Vec<Eigenvalue>,
}

impl SpectrumAssignment {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// All eigenvalues, if every one is rational.
    pub fn rationals(&self) -> Option<Vec<BigRational>> {
        self.eigenvalues.iter().map(|e| e.as_rational().cloned()).collect()
    }

    /// All eigenvalues, if every one is an integer.
    pub fn integers(&self) -> Option<Vec<BigInt>> {
        self.eigenvalues.iter().map(Eigenvalue::as_integer).collect()
    }

    /// Sorted rational eigenvalues, if all are rational.
    pub fn sorted_rationals(&self) -> Option<Vec<BigRational>> {
        let mut v = self.rationals()?;
        v.sort();
        Some(v)
    }
}

/// Integer matrix `s * M` with `s` the lcm of the weight denominators.
fn scaled_matrix(g: &WeightedGraph, target: Target) -> (Vec<BigInt>, BigInt) {
    let (mut a, s) = g.scaled_adjacency();
    let n = g.order();
    if target == Target::Laplacian {
        for u in 0..n {
            let deg: BigInt = a[u * n..(u + 1) * n].iter().sum();
            for v in 0..n {
                a[u * n + v] = -&a[u * n + v];
            }
            a[u * n + u] = deg;
        }
    }
    (a, s)
}

/// Exact certification that every column of `h` is an eigenvector of the
/// chosen matrix of `g`. Returns `None` when some column fails.
pub fn certify(
    g: &WeightedGraph,
    h: &ButsonMatrix,
    target: Target,
) -> Result<Option<SpectrumAssignment>, DiagonaliseError> {
    let n = g.order();
    if h.order() != n {
        return Err(DiagonaliseError::OrderMismatch { graph: n, matrix: h.order() });
    }
    if !h.verify() {
        return Err(DiagonaliseError::NotHadamard);
    }
    if !h.is_dephased() {
        return Err(DiagonaliseError::NotDephased);
    }
    // A dephased diagonaliser has the all-ones column, which forces regularity.
    if regularity_check(g).is_none() {
        return Ok(None);
    }
    let (m, s) = scaled_matrix(g, target);
    let r = h.root_order();
    let columns: Vec<Option<CyclotomicInt>> = (0..n)
        .into_par_iter()
        .map(|j| certify_column(&m, n, r, &h.column(j)))
        .collect();
    let Some(scaled) = columns.into_iter().collect::<Option<Vec<_>>>() else {
        return Ok(None);
    };
    let eigenvalues = scaled
        .into_iter()
        .map(|lam| match lam.as_rational() {
            Some(k) => Eigenvalue::Rational(BigRational::new(k, s.clone())),
            None => Eigenvalue::Algebraic { scaled: lam, denom: s.clone() },
        })
        .collect();
    Ok(Some(SpectrumAssignment {
        target,
        root_order: r,
        dephased: true,
        eigenvalues,
    }))
}

/// `λ = (M h)_0`, then checks `M h = λ h` entry by entry.
fn certify_column(m: &[BigInt], n: usize, r: usize, col: &[usize]) -> Option<CyclotomicInt> {
    let row_image = |u: usize| {
        weighted_root_sum(
            r,
            (0..n)
                .filter(|&w| !m[u * n + w].is_zero())
                .map(|w| (col[w], &m[u * n + w])),
        )
    };
    let lambda = row_image(0);
    for u in 1..n {
        let diff = row_image(u)
            .checked_sub(&lambda.mul_root(col[u] as i64))
            .expect("same order");
        if !diff.is_zero() {
            return None;
        }
    }
    Some(lambda)
}

/// Common weighted degree, if the graph is weighted-regular.
pub fn regularity_check(g: &WeightedGraph) -> Option<BigRational> {
    let degs = g.degrees();
    match degs.first() {
        None => Some(BigRational::zero()),
        Some(d) => degs.iter().all(|x| x == d).then(|| d.clone()),
    }
}

/// Outcome of the eigenvalue theorems for a certified graph. Each
/// optional field is `None` when its hypothesis does not apply.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TheoremReport {
    pub classification: Classification,
    pub degree: Option<String>,
    pub first_eigenvalue_zero: bool,
    pub trace_matches: bool,
    /// Real or Turyn diagonaliser: every eigenvalue is an even integer.
    pub all_even: Option<bool>,
    /// Root order a power of two: every rational eigenvalue is an even integer.
    pub rational_even: Option<bool>,
    /// Prime root order `p`: nonzero integer eigenvalues are divisible by
    /// `p` and have multiplicity at least `p - 1`.
    pub prime_divisibility: Option<bool>,
    pub violations: Vec<String>,
}

impl TheoremReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every eigenvalue theorem whose hypotheses hold for `(g, h)`.
pub fn theorem_checks(g: &WeightedGraph, h: &ButsonMatrix, spectrum: &SpectrumAssignment) -> TheoremReport {
    let n = g.order();
    let degree = regularity_check(g);
    let mut violations = Vec::new();

    let first_eigenvalue_zero = match (spectrum.target, spectrum.eigenvalues.first()) {
        (Target::Laplacian, Some(Eigenvalue::Rational(q))) => q.is_zero(),
        (Target::Adjacency, Some(Eigenvalue::Rational(q))) => Some(q) == degree.as_ref(),
        (_, None) => true,
        _ => false,
    };
    if !first_eigenvalue_zero {
        violations.push("eigenvalue of the all-ones column is not the expected value".into());
    }

    let trace = match spectrum.target {
        Target::Laplacian => g.degrees().into_iter().sum(),
        Target::Adjacency => BigRational::zero(),
    };
    let trace_matches = eigenvalue_sum_equals(spectrum, &trace);
    if !trace_matches {
        violations.push("eigenvalues do not sum to the trace".into());
    }

    let laplacian = spectrum.target == Target::Laplacian && g.is_integer_weighted();
    let class = h.classify();
    let r = h.minimal_root_form().root_order();
    let two = BigInt::from(2);
    let even = |x: &BigInt| (x % &two).is_zero();

    let all_even = (laplacian && matches!(class, Classification::Real | Classification::Turyn)).then(|| {
        let ok = spectrum.integers().is_some_and(|v| v.iter().all(even));
        if !ok {
            violations.push("a Real/Turyn diagonaliser gave an eigenvalue that is not an even integer".into());
        }
        ok
    });

    let rational_even = (laplacian && r.is_power_of_two() && r >= 2).then(|| {
        let ok = spectrum
            .eigenvalues
            .iter()
            .filter_map(Eigenvalue::as_rational)
            .all(|q| q.is_integer() && even(&q.to_integer()));
        if !ok {
            violations.push(format!("root order {r}: a rational eigenvalue is not an even integer"));
        }
        ok
    });

    let prime_divisibility = (laplacian && is_prime(r)).then(|| {
        let p = BigInt::from(r);
        let ints: Vec<BigInt> = spectrum.eigenvalues.iter().filter_map(Eigenvalue::as_integer).collect();
        let mut ok = true;
        for lam in ints.iter().filter(|x| !x.is_zero()) {
            if !(lam % &p).is_zero() {
                ok = false;
                violations.push(format!("eigenvalue {lam} is not divisible by {r}"));
            }
            let mult = ints.iter().filter(|x| *x == lam).count();
            if mult < r - 1 {
                ok = false;
                violations.push(format!("eigenvalue {lam} has multiplicity {mult} < {}", r - 1));
            }
        }
        ok
    });
    violations.dedup();

    debug_assert!(n == spectrum.len());
    TheoremReport {
        classification: class,
        degree: degree.map(|d| d.to_string()),
        first_eigenvalue_zero,
        trace_matches,
        all_even,
        rational_even,
        prime_divisibility,
        violations,
    }
}

fn eigenvalue_sum_equals(spectrum: &SpectrumAssignment, want: &BigRational) -> bool {
    let r = spectrum.root_order;
    let mut rational = BigRational::zero();
    let mut algebraic: Option<(CyclotomicInt, BigInt)> = None;
    for e in &spectrum.eigenvalues {
        match e {
            Eigenvalue::Rational(q) => rational += q,
            Eigenvalue::Algebraic { scaled, denom } => {
                let acc = algebraic.get_or_insert_with(|| (CyclotomicInt::zero(r).expect("r >= 1"), denom.clone()));
                acc.0 = acc.0.checked_add(scaled).expect("same order");
            }
        }
    }
    let rest = want - rational;
    match algebraic {
        None => rest.is_zero(),
        Some((sum, denom)) => {
            // sum / denom must equal rest.
            let lhs = sum.scale(rest.denom());
            let rhs = CyclotomicInt::integer(r, rest.numer() * &denom).expect("r >= 1");
            lhs.checked_sub(&rhs).expect("same order").is_zero()
        }
    }
}

/// Whether `g` is a union of an odd number (at least three) of connected
/// graphs of equal order, which no Real or Turyn matrix can diagonalise.
pub fn odd_union_obstruction(g: &WeightedGraph) -> bool {
    let comps = g.components();
    let k = comps.len();
    k >= 3 && k % 2 == 1 && comps.iter().all(|c| c.len() == comps[0].len())
}

/// `λ^c_j = n - λ_j` for `j > 0`, and `0` for the all-ones column.
pub fn complement_spectrum(spectrum: &SpectrumAssignment) -> Option<Vec<BigRational>> {
    let n = BigRational::from_integer(spectrum.len().into());
    let vals = spectrum.rationals()?;
    Some(
        vals.iter()
            .enumerate()
            .map(|(j, l)| if j == 0 { BigRational::zero() } else { &n - l })
            .collect(),
    )
}
