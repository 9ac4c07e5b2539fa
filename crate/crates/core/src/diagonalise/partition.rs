//! Equitable partitions read off the columns of a diagonaliser.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::{regularity_check, DiagonaliseError, SpectrumAssignment, Target};
use crate::graphs::WeightedGraph;
use crate::hadamard::{is_prime, ButsonMatrix};

/// A vertex partition in which every vertex of cell `i` has the same total
/// edge weight `quotient[i][j]` into cell `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquitablePartition {
    pub cells: Vec<Vec<usize>>,
    pub quotient: Vec<Vec<BigRational>>,
}

impl EquitablePartition {
    /// Validates that `cells` partition the vertex set and are equitable.
    pub fn from_cells(g: &WeightedGraph, cells: Vec<Vec<usize>>) -> Result<Self, DiagonaliseError> {
        let n = g.order();
        let mut cell_of = vec![usize::MAX; n];
        for (i, cell) in cells.iter().enumerate() {
            if cell.is_empty() {
                return Err(DiagonaliseError::Precondition(format!("cell {i} is empty")));
            }
            for &v in cell {
                if v >= n || cell_of[v] != usize::MAX {
                    return Err(DiagonaliseError::Precondition(format!(
                        "vertex {v} is out of range or in two cells"
                    )));
                }
                cell_of[v] = i;
            }
        }
        if let Some(v) = cell_of.iter().position(|&c| c == usize::MAX) {
            return Err(DiagonaliseError::Precondition(format!("vertex {v} is in no cell")));
        }
        let p = cells.len();
        let mut quotient: Vec<Vec<BigRational>> = Vec::with_capacity(p);
        for (i, cell) in cells.iter().enumerate() {
            let mut row: Option<Vec<BigRational>> = None;
            for &u in cell {
                let mut into = vec![BigRational::zero(); p];
                for v in g.neighbours(u) {
                    into[cell_of[v]] += g.weight(u, v);
                }
                match &row {
                    None => row = Some(into),
                    Some(r) if *r == into => {}
                    Some(_) => {
                        return Err(DiagonaliseError::Precondition(format!(
                            "cell {i} is not equitable (vertex {u} differs)"
                        )))
                    }
                }
            }
            quotient.push(row.expect("cell is nonempty"));
        }
        Ok(Self { cells, quotient })
    }
}

impl Serialize for EquitablePartition {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let q: Vec<Vec<String>> = self
            .quotient
            .iter()
            .map(|row| row.iter().map(ToString::to_string).collect())
            .collect();
        let mut st = s.serialize_struct("EquitablePartition", 2)?;
        st.serialize_field("cells", &self.cells)?;
        st.serialize_field("quotient", &q)?;
        st.end()
    }
}

/// Quarter-turn index (0 for 1, 1 for i, 2 for -1, 3 for -i) of each
/// entry of column `k`.
fn quarter_turns(h: &ButsonMatrix, k: usize) -> Result<Vec<usize>, DiagonaliseError> {
    if k == 0 || k >= h.order() {
        return Err(DiagonaliseError::BadColumn(k));
    }
    let r = h.root_order();
    h.column(k)
        .into_iter()
        .map(|e| {
            if (4 * e) % r == 0 {
                Ok(4 * e / r)
            } else {
                Err(DiagonaliseError::UnsupportedColumn(k))
            }
        })
        .collect()
}

fn laplacian_eigenvalue(spectrum: &SpectrumAssignment, k: usize) -> Result<BigRational, DiagonaliseError> {
    if spectrum.target != Target::Laplacian {
        return Err(DiagonaliseError::Precondition("a Laplacian spectrum is required".into()));
    }
    spectrum
        .eigenvalues
        .get(k)
        .and_then(|e| e.as_rational().cloned())
        .ok_or_else(|| DiagonaliseError::Precondition(format!("eigenvalue {k} is not rational")))
}

fn degree(g: &WeightedGraph) -> Result<BigRational, DiagonaliseError> {
    regularity_check(g).ok_or_else(|| DiagonaliseError::Precondition("graph is not regular".into()))
}

/// Two-cell partition `(R+ ∪ I+, R- ∪ I-)` from a column with entries in
/// `{±1, ±i}`, with quotient `[[d - λ/2, λ/2], [λ/2, d - λ/2]]`.
pub fn bipartition_from_column(
    g: &WeightedGraph,
    h: &ButsonMatrix,
    spectrum: &SpectrumAssignment,
    k: usize,
) -> Result<EquitablePartition, DiagonaliseError> {
    let quarters = quarter_turns(h, k)?;
    let lambda = laplacian_eigenvalue(spectrum, k)?;
    let d = degree(g)?;
    let plus: Vec<usize> = (0..g.order()).filter(|&v| quarters[v] < 2).collect();
    let minus: Vec<usize> = (0..g.order()).filter(|&v| quarters[v] >= 2).collect();
    if plus.len() != minus.len() {
        return Err(DiagonaliseError::Inconsistent(format!(
            "column {k} splits the vertices {}/{}",
            plus.len(),
            minus.len()
        )));
    }
    let part = EquitablePartition::from_cells(g, vec![plus, minus])
        .map_err(|e| DiagonaliseError::Inconsistent(format!("column {k}: {e}")))?;
    let half = &lambda / BigRational::from_integer(2.into());
    let stay = &d - &half;
    let expected = vec![vec![stay.clone(), half.clone()], vec![half, stay]];
    if part.quotient != expected {
        return Err(DiagonaliseError::Inconsistent(format!(
            "column {k}: quotient differs from [[d - λ/2, λ/2], [λ/2, d - λ/2]]"
        )));
    }
    Ok(part)
}

/// The finer partition `(R+, I+, R-, I-)` of a `{±1, ±i}` column, dropping
/// empty cells. Returned only when it happens to be equitable.
pub fn four_cell_partition(
    g: &WeightedGraph,
    h: &ButsonMatrix,
    k: usize,
) -> Result<Option<EquitablePartition>, DiagonaliseError> {
    let quarters = quarter_turns(h, k)?;
    let cells: Vec<Vec<usize>> = [0, 1, 2, 3]
        .iter()
        .map(|&q| (0..g.order()).filter(|&v| quarters[v] == q).collect::<Vec<_>>())
        .filter(|c| !c.is_empty())
        .collect();
    Ok(EquitablePartition::from_cells(g, cells).ok())
}

/// Checks that the real-support and imaginary-support parts of a
/// `{±1, ±i}` column are each zero or an eigenvector for `λ_k`.
pub fn split_check(
    g: &WeightedGraph,
    h: &ButsonMatrix,
    spectrum: &SpectrumAssignment,
    k: usize,
) -> Result<bool, DiagonaliseError> {
    let quarters = quarter_turns(h, k)?;
    let lambda = laplacian_eigenvalue(spectrum, k)?;
    let n = g.order();
    let lap = g.laplacian();
    let ok = [0usize, 1].iter().all(|&parity| {
        // Entries are i^q, represented in Z[i] with q in 0..4.
        let v: Vec<Option<usize>> = quarters
            .iter()
            .map(|&q| (q % 2 == parity).then_some(q))
            .collect();
        (0..n).all(|u| {
            let mut lhs = gaussian_zero();
            for w in 0..n {
                if let Some(q) = v[w] {
                    add_gaussian(&mut lhs, &lap[u * n + w], q);
                }
            }
            let mut rhs = gaussian_zero();
            if let Some(q) = v[u] {
                add_gaussian(&mut rhs, &lambda, q);
            }
            lhs == rhs
        })
    });
    Ok(ok)
}

fn gaussian_zero() -> (BigRational, BigRational) {
    (BigRational::zero(), BigRational::zero())
}

fn add_gaussian(acc: &mut (BigRational, BigRational), c: &BigRational, q: usize) {
    match q % 4 {
        0 => acc.0 += c,
        1 => acc.1 += c,
        2 => acc.0 -= c,
        _ => acc.1 -= c,
    }
}

/// `p`-cell partition `X_j = {s : h_k(s) = ζ_p^j}` for a diagonaliser with
/// prime root order `p` and a nonzero integer eigenvalue `λ_k`.
pub fn p_partition_from_column(
    g: &WeightedGraph,
    h: &ButsonMatrix,
    spectrum: &SpectrumAssignment,
    k: usize,
    p: usize,
) -> Result<EquitablePartition, DiagonaliseError> {
    if !is_prime(p) {
        return Err(DiagonaliseError::Precondition(format!("{p} is not prime")));
    }
    let m = h.minimal_root_form();
    if m.root_order() != p {
        return Err(DiagonaliseError::Precondition(format!(
            "matrix has root order {}, not {p}",
            m.root_order()
        )));
    }
    if k == 0 || k >= h.order() {
        return Err(DiagonaliseError::BadColumn(k));
    }
    let lambda = laplacian_eigenvalue(spectrum, k)?;
    let pq = BigRational::from_integer(BigInt::from(p));
    if lambda.is_zero() || !lambda.is_integer() || !(lambda.to_integer() % BigInt::from(p)).is_zero() {
        return Err(DiagonaliseError::Precondition(format!(
            "eigenvalue {lambda} is not a nonzero multiple of {p}"
        )));
    }
    let d = degree(g)?;
    let col = m.column(k);
    let cells: Vec<Vec<usize>> = (0..p)
        .map(|j| (0..g.order()).filter(|&v| col[v] == j).collect())
        .collect();
    if cells.iter().any(|c| c.len() * p != g.order()) {
        return Err(DiagonaliseError::Inconsistent(format!("column {k} cells have unequal sizes")));
    }
    let part = EquitablePartition::from_cells(g, cells)
        .map_err(|e| DiagonaliseError::Inconsistent(format!("column {k}: {e}")))?;
    let off = &lambda / &pq;
    let diag = &d - &off * (&pq - BigRational::one());
    let ok = (0..p).all(|i| (0..p).all(|j| part.quotient[i][j] == if i == j { diag.clone() } else { off.clone() }));
    if !ok {
        return Err(DiagonaliseError::Inconsistent(format!(
            "column {k}: quotient differs from the predicted form"
        )));
    }
    Ok(part)
}
