//! Small graphs diagonalisable by a Real or Turyn Hadamard matrix.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::{certify, odd_union_obstruction, DiagonaliseError, Target};
use crate::graphs::enumerate::{canonical_code_of, graph_from_masks, masks_from_code, regular_classes};
use crate::graphs::{combine, complement, named, product, Combine, Family, Product, WeightedGraph};
use crate::hadamard::library::instances;
use crate::hadamard::{ButsonMatrix, Classification};
use crate::linalg::integer_spectrum;

/// Largest order the catalogue will enumerate.
pub const CATALOGUE_LIMIT: usize = 8;

/// Largest order for the first-row search in [`graphs_diagonalised_by`].
pub const FIRST_ROW_LIMIT: usize = 20;

#[derive(Debug, Clone, Serialize)]
pub struct CatalogueEntry {
    pub order: usize,
    pub degree: usize,
    pub name: String,
    pub code: u64,
    /// Labeled so that `witness` diagonalises it as given.
    pub graph: WeightedGraph,
    pub witness_name: String,
    pub witness: ButsonMatrix,
    pub spectrum: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Catalogue {
    pub max_n: usize,
    pub entries: Vec<CatalogueEntry>,
    /// Regular graphs with an even integer spectrum removed by the odd-union test.
    pub ruled_out: Vec<String>,
    /// Graphs that pass every necessary condition but have no witness in the library.
    pub unresolved: Vec<String>,
}

/// Enumerates regular graphs of every even order up to `max_n`, keeps those
/// with an even integer Laplacian spectrum that escape the odd-union
/// obstruction, and confirms each one with a library witness.
pub fn catalogue(max_n: usize) -> Result<Catalogue, DiagonaliseError> {
    if max_n > CATALOGUE_LIMIT {
        return Err(DiagonaliseError::ScaleGuard(max_n));
    }
    let mut entries = Vec::new();
    let mut ruled_out = Vec::new();
    let mut unresolved = Vec::new();
    for n in (2..=max_n).step_by(2) {
        let witnesses = witness_index(n)?;
        let names = name_index(n)?;
        let label = |code: u64| names.get(&code).cloned().unwrap_or_else(|| format!("graph{n}#{code:x}"));
        for d in 0..n {
            for code in regular_classes(n, d)? {
                let g = graph_from_masks(&masks_from_code(n, code));
                let Some(spectrum) = integer_spectrum(&laplacian_ints(&g), n) else {
                    continue;
                };
                if spectrum.iter().any(|x| x % 2 != BigInt::ZERO) {
                    continue;
                }
                if odd_union_obstruction(&g) || odd_union_obstruction(&complement(&g)?) {
                    ruled_out.push(label(code));
                    continue;
                }
                let Some((labeled, wname, h)) = witnesses.get(&code) else {
                    unresolved.push(label(code));
                    continue;
                };
                if certify(labeled, h, Target::Laplacian)?.is_none() {
                    return Err(DiagonaliseError::Inconsistent(format!(
                        "witness {wname} does not certify {}",
                        label(code)
                    )));
                }
                entries.push(CatalogueEntry {
                    order: n,
                    degree: d,
                    name: label(code),
                    code,
                    graph: labeled.clone(),
                    witness_name: wname.clone(),
                    witness: h.clone(),
                    spectrum: spectrum.iter().map(ToString::to_string).collect(),
                });
            }
        }
    }
    entries.sort_by_key(|e| (e.order, e.code));
    Ok(Catalogue { max_n, entries, ruled_out, unresolved })
}

fn laplacian_ints(g: &WeightedGraph) -> Vec<BigInt> {
    g.laplacian().iter().map(|q| q.to_integer()).collect()
}

/// Canonical code -> (labeled graph, witness name, witness) over every
/// Real or Turyn matrix of order `n` in the library.
fn witness_index(n: usize) -> Result<BTreeMap<u64, (WeightedGraph, String, ButsonMatrix)>, DiagonaliseError> {
    let mut index = BTreeMap::new();
    for inst in instances(n) {
        if !matches!(inst.matrix.classify(), Classification::Real | Classification::Turyn) {
            continue;
        }
        for g in graphs_diagonalised_by(&inst.matrix)? {
            let code = canonical_code_of(&g)?;
            index
                .entry(code)
                .or_insert_with(|| (g, inst.name.clone(), inst.matrix.clone()));
        }
    }
    Ok(index)
}

/// Every unweighted graph, in the vertex order of `h`, whose Laplacian is
/// diagonalised by the dephased matrix `h`.
///
/// Such a graph is determined by its first adjacency row `a`: the
/// eigenvalue of column `k` is `(A h_k)_0 = sum_v a_v H[v][k]`, and then
/// `A = H Λ H* / n`. Each of the `2^(n-1)` rows is tried, the
/// reconstruction is rounded, and survivors are certified exactly.
pub fn graphs_diagonalised_by(h: &ButsonMatrix) -> Result<Vec<WeightedGraph>, DiagonaliseError> {
    let n = h.order();
    if n > FIRST_ROW_LIMIT {
        return Err(DiagonaliseError::Precondition(format!(
            "first-row search supports order at most {FIRST_ROW_LIMIT}"
        )));
    }
    if !h.verify() {
        return Err(DiagonaliseError::NotHadamard);
    }
    if !h.is_dephased() {
        return Err(DiagonaliseError::NotDephased);
    }
    if n == 1 {
        return Ok(vec![WeightedGraph::empty(1)]);
    }
    let hc = h.to_complex();
    let found: Vec<Option<WeightedGraph>> = (0u64..1 << (n - 1))
        .into_par_iter()
        .map(|bits| {
            let row: Vec<bool> = (0..n).map(|v| v > 0 && (bits >> (v - 1)) & 1 == 1).collect();
            let masks = reconstruct(&hc, &row)?;
            let g = graph_from_masks(&masks);
            match certify(&g, h, Target::Adjacency) {
                Ok(Some(_)) => Some(g),
                _ => None,
            }
        })
        .collect();
    Ok(found.into_iter().flatten().collect())
}

fn reconstruct(hc: &DMatrix<Complex64>, row: &[bool]) -> Option<Vec<u64>> {
    let n = row.len();
    let lambda: Vec<Complex64> = (0..n)
        .map(|k| (0..n).filter(|&v| row[v]).map(|v| hc[(v, k)]).sum())
        .collect();
    let mut masks = vec![0u64; n];
    for u in 0..n {
        for v in u..n {
            let z: Complex64 = (0..n).map(|k| hc[(u, k)] * lambda[k] * hc[(v, k)].conj()).sum::<Complex64>() / n as f64;
            if (z - 1.0).norm() < 1e-6 && u != v {
                masks[u] |= 1 << v;
                masks[v] |= 1 << u;
            } else if z.norm() >= 1e-6 {
                return None;
            }
        }
    }
    Some(masks)
}

/// Display names for the regular graphs that can appear up to order 8.
fn name_index(n: usize) -> Result<BTreeMap<u64, String>, DiagonaliseError> {
    let k = |m| named(&Family::Complete(m));
    let union = |a: &WeightedGraph, b: &WeightedGraph| combine(a, b, Combine::Union);
    let mut named_graphs: Vec<(String, WeightedGraph)> = vec![
        (format!("K_{n}"), k(n)?),
        (format!("K_{n}^c"), WeightedGraph::empty(n)),
    ];
    match n {
        4 => {
            named_graphs.push(("C_4".into(), named(&Family::Cycle(4))?));
            named_graphs.push(("K_2+K_2".into(), union(&k(2)?, &k(2)?)?));
        }
        6 => {
            let three_k2 = union(&union(&k(2)?, &k(2)?)?, &k(2)?)?;
            named_graphs.push(("K_{2,2,2}".into(), complement(&three_k2)?));
            named_graphs.push(("K_2+K_2+K_2".into(), three_k2));
            named_graphs.push(("C_6".into(), named(&Family::Cycle(6))?));
            named_graphs.push(("K_3+K_3".into(), union(&k(3)?, &k(3)?)?));
            named_graphs.push(("K_{3,3}".into(), named(&Family::CompleteBipartite(3, 3))?));
            named_graphs.push(("K_3□K_2".into(), product(&k(3)?, &k(2)?, Product::Cartesian)?));
        }
        8 => {
            let c4 = named(&Family::Cycle(4))?;
            let c4c4 = union(&c4, &c4)?;
            let k22 = named(&Family::CompleteBipartite(2, 2))?;
            let prism = product(&k22, &k(2)?, Product::Cartesian)?;
            named_graphs.push(("K_{2,2,2,2}".into(), named(&Family::CompleteMultipartite(vec![2; 4]))?));
            named_graphs.push(("(C_4+C_4)^c".into(), complement(&c4c4)?));
            named_graphs.push(("(K_{2,2}□K_2)^c".into(), complement(&prism)?));
            named_graphs.push(("K_{4,4}".into(), named(&Family::CompleteBipartite(4, 4))?));
            named_graphs.push(("K_4+K_4".into(), union(&k(4)?, &k(4)?)?));
            named_graphs.push(("K_{2,2}□K_2".into(), prism));
            named_graphs.push(("C_4+C_4".into(), c4c4));
            let two_k2 = union(&k(2)?, &k(2)?)?;
            named_graphs.push(("K_2+K_2+K_2+K_2".into(), union(&two_k2, &two_k2)?));
        }
        _ => {}
    }
    let mut index = BTreeMap::new();
    for (name, g) in named_graphs {
        index.entry(canonical_code_of(&g)?).or_insert(name);
    }
    Ok(index)
}
