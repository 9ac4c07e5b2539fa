//! Enumeration of small regular graphs and a canonical form for them.
//!
//! Graphs are handled as neighbourhood bitmasks. The canonical code of a
//! graph is the least adjacency code over all vertex orderings, where the
//! code lists the pairs `(0,1), (0,2), (1,2), (0,3), (1,3), (2,3), ...`
//! from the most significant bit down. Placing vertices one at a time
//! therefore fixes the code from the top, which makes branch-and-bound
//! effective.

use std::collections::BTreeSet;

use rayon::prelude::*;

use super::{GraphError, WeightedGraph};

/// Largest order supported by the 64-bit canonical code.
pub const MAX_CODE_ORDER: usize = 11;

/// All labeled `d`-regular graphs on `n` vertices, as neighbour masks.
pub fn labeled_regular(n: usize, d: usize) -> Vec<Vec<u64>> {
    regular_search(n, d, false)
}

/// One representative per isomorphism class of `d`-regular graphs on `n`
/// vertices, as canonical codes in increasing order.
pub fn regular_classes(n: usize, d: usize) -> Result<Vec<u64>, GraphError> {
    check_order(n)?;
    let labeled = regular_search(n, d, true);
    let codes: BTreeSet<u64> = labeled.par_iter().map(|m| canonical_code(m)).collect();
    Ok(codes.into_iter().collect())
}

fn check_order(n: usize) -> Result<(), GraphError> {
    if n > MAX_CODE_ORDER {
        return Err(GraphError::Parameter(format!(
            "canonical codes support at most {MAX_CODE_ORDER} vertices"
        )));
    }
    Ok(())
}

/// Row-by-row backtracking. With `pin_first`, vertex 0 is adjacent to
/// exactly `1..=d`, which every isomorphism class admits.
fn regular_search(n: usize, d: usize, pin_first: bool) -> Vec<Vec<u64>> {
    if n == 0 || d >= n || (n * d) % 2 == 1 || n > 64 {
        return Vec::new();
    }
    let mut masks = vec![0u64; n];
    let mut out = Vec::new();
    if pin_first {
        for v in 1..=d {
            masks[0] |= 1 << v;
            masks[v] |= 1;
        }
        fill_row(1, n, d, &mut masks, &mut out);
    } else {
        fill_row(0, n, d, &mut masks, &mut out);
    }
    out
}

fn fill_row(u: usize, n: usize, d: usize, masks: &mut [u64], out: &mut Vec<Vec<u64>>) {
    if u == n {
        out.push(masks.to_vec());
        return;
    }
    let have = masks[u].count_ones() as usize;
    if have > d {
        return;
    }
    let candidates: Vec<usize> = ((u + 1)..n)
        .filter(|&v| (masks[v].count_ones() as usize) < d)
        .collect();
    choose(u, n, d, &candidates, 0, d - have, masks, out);
}

#[allow(clippy::too_many_arguments)]
fn choose(
    u: usize,
    n: usize,
    d: usize,
    candidates: &[usize],
    start: usize,
    need: usize,
    masks: &mut [u64],
    out: &mut Vec<Vec<u64>>,
) {
    if need == 0 {
        // Every later vertex must still be able to reach degree d.
        let feasible = ((u + 1)..n).all(|v| {
            let deg = masks[v].count_ones() as usize;
            deg <= d && d - deg + u + 2 <= n
        });
        if feasible {
            fill_row(u + 1, n, d, masks, out);
        }
        return;
    }
    if candidates.len() - start < need {
        return;
    }
    for i in start..candidates.len() {
        if candidates.len() - i < need {
            break;
        }
        let v = candidates[i];
        masks[u] |= 1 << v;
        masks[v] |= 1 << u;
        choose(u, n, d, candidates, i + 1, need - 1, masks, out);
        masks[u] &= !(1 << v);
        masks[v] &= !(1 << u);
    }
}

/// Least adjacency code over all vertex orderings.
///
/// # Panics
/// If `masks.len() > MAX_CODE_ORDER`.
pub fn canonical_code(masks: &[u64]) -> u64 {
    let n = masks.len();
    assert!(n <= MAX_CODE_ORDER, "order {n} too large for a canonical code");
    let total = n * n.saturating_sub(1) / 2;
    let mut search = Canon {
        masks,
        total,
        order: Vec::with_capacity(n),
        used: 0,
        best: None,
    };
    search.dfs(0);
    search.best.unwrap_or(0)
}

struct Canon<'a> {
    masks: &'a [u64],
    total: usize,
    order: Vec<usize>,
    used: u64,
    best: Option<u64>,
}

impl Canon<'_> {
    fn dfs(&mut self, prefix: u64) {
        let depth = self.order.len();
        let n = self.masks.len();
        if depth == n {
            if self.best.is_none_or(|b| prefix < b) {
                self.best = Some(prefix);
            }
            return;
        }
        let len = (depth + 1) * depth / 2;
        for v in 0..n {
            if self.used & (1 << v) != 0 {
                continue;
            }
            let mut next = prefix;
            for &w in &self.order {
                next = (next << 1) | ((self.masks[v] >> w) & 1);
            }
            if let Some(b) = self.best {
                let bound = b >> (self.total - len);
                if next > bound {
                    continue;
                }
            }
            self.order.push(v);
            self.used |= 1 << v;
            self.dfs(next);
            self.used &= !(1 << v);
            self.order.pop();
        }
    }
}

/// Adjacency code of the identity ordering.
pub fn code_of(masks: &[u64]) -> u64 {
    let n = masks.len();
    let mut code = 0u64;
    for j in 1..n {
        for i in 0..j {
            code = (code << 1) | ((masks[j] >> i) & 1);
        }
    }
    code
}

/// Inverse of [`code_of`].
pub fn masks_from_code(n: usize, code: u64) -> Vec<u64> {
    let total = n * n.saturating_sub(1) / 2;
    let mut masks = vec![0u64; n];
    let mut bit = total;
    for j in 1..n {
        for i in 0..j {
            bit -= 1;
            if (code >> bit) & 1 == 1 {
                masks[i] |= 1 << j;
                masks[j] |= 1 << i;
            }
        }
    }
    masks
}

pub fn graph_from_masks(masks: &[u64]) -> WeightedGraph {
    let n = masks.len();
    let edges = (0..n).flat_map(|u| ((u + 1)..n).filter(move |&v| (masks[u] >> v) & 1 == 1).map(move |v| (u, v)));
    WeightedGraph::unweighted(n, edges.collect::<Vec<_>>()).expect("masks describe a simple graph")
}

/// Canonical code of an unweighted graph.
pub fn canonical_code_of(g: &WeightedGraph) -> Result<u64, GraphError> {
    check_order(g.order())?;
    let masks = g.neighbour_masks().ok_or(GraphError::Weighted)?;
    Ok(canonical_code(&masks))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{complement, named, Family};
    use proptest::prelude::*;

    #[test]
    fn labeled_counts() {
        // Perfect matchings of K_6 and K_8.
        assert_eq!(labeled_regular(6, 1).len(), 15);
        assert_eq!(labeled_regular(8, 1).len(), 105);
        // Labeled 2-regular graphs on 6 vertices: hexagons (60) plus pairs of triangles (10).
        assert_eq!(labeled_regular(6, 2).len(), 70);
        let six: usize = (0..6).map(|d| labeled_regular(6, d).len()).sum();
        assert_eq!(six, 172);
        assert!(labeled_regular(5, 3).is_empty());
        assert_eq!(labeled_regular(4, 3).len(), 1);
        assert_eq!(labeled_regular(4, 0).len(), 1);
    }

    #[test]
    fn class_counts() {
        // Known numbers of regular graphs up to isomorphism.
        let six: Vec<usize> = (0..6).map(|d| regular_classes(6, d).unwrap().len()).collect();
        assert_eq!(six, vec![1, 1, 2, 2, 1, 1]);
        let eight: Vec<usize> = (0..8).map(|d| regular_classes(8, d).unwrap().len()).collect();
        assert_eq!(eight, vec![1, 1, 3, 6, 6, 3, 1, 1]);
    }

    #[test]
    fn code_round_trip() {
        let c6 = named(&Family::Cycle(6)).unwrap();
        let masks = c6.neighbour_masks().unwrap();
        assert_eq!(masks_from_code(6, code_of(&masks)), masks);
        let canon = canonical_code(&masks);
        let back = masks_from_code(6, canon);
        assert_eq!(canonical_code(&back), canon);
        assert_ne!(
            canonical_code_of(&c6).unwrap(),
            canonical_code_of(&complement(&c6).unwrap()).unwrap()
        );
    }

    proptest! {
        #[test]
        fn canonical_code_is_label_invariant(
            edges in proptest::collection::vec((0usize..7, 0usize..7), 0..15),
            perm in Just((0..7).collect::<Vec<usize>>()).prop_shuffle(),
        ) {
            let edges: BTreeSet<(usize, usize)> = edges
                .into_iter()
                .filter(|(u, v)| u != v)
                .map(|(u, v)| (u.min(v), u.max(v)))
                .collect();
            let g = WeightedGraph::unweighted(7, edges).unwrap();
            let h = g.permute(&perm).unwrap();
            prop_assert_eq!(canonical_code_of(&g).unwrap(), canonical_code_of(&h).unwrap());
        }
    }
}
