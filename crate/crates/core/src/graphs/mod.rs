//! Simple undirected graphs with nonnegative rational edge weights, and
//! the constructions used to build Hadamard-diagonalisable families.
//!
//! Product-like constructions index vertices in mixed radix, row-major:
//! vertex `(u1, ..., uk)` of a product is `((u1 * n2) + u2) * n3 + ...`.
//! This matches the row/column order of [`ButsonMatrix::tensor`].
//!
//! [`ButsonMatrix::tensor`]: crate::hadamard::ButsonMatrix::tensor

pub mod enumerate;

use std::collections::{BTreeSet, VecDeque};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    Loop(usize),
    #[error("edge {{{0}, {1}}} listed more than once")]
    MultiEdge(usize, usize),
    #[error("negative weight on edge {{{0}, {1}}}")]
    NegativeWeight(usize, usize),
    #[error("adjacency matrix is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("invalid weight `{0}`")]
    BadWeight(String),
    #[error("operation requires an unweighted graph")]
    Weighted,
    #[error("orders differ: {0} vs {1}")]
    OrderMismatch(usize, usize),
    #[error("connection set contains the identity, which would create loops")]
    IdentityInConnection,
    #[error("connection set is not closed under negation (missing {0:?})")]
    NotInverseClosed(Vec<usize>),
    #[error("group element {0:?} does not match the group Z_{1:?}")]
    BadElement(Vec<usize>, Vec<usize>),
    #[error("invalid basis tuple: {0}")]
    BadBasis(String),
    #[error("construction is not a simple graph: {0}")]
    NotSimple(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
}

/// A simple undirected graph with nonnegative rational weights.
///
/// Invariants: the weight matrix is symmetric with zero diagonal and
/// nonnegative entries, all in lowest terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GraphJson", into = "GraphJson")]
pub struct WeightedGraph {
    n: usize,
    weights: Vec<BigRational>,
}

impl WeightedGraph {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            weights: vec![BigRational::zero(); n * n],
        }
    }

    /// Builds a graph from an edge list. Zero-weight edges are dropped.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize, BigRational)>,
    {
        let mut g = Self::empty(n);
        for (u, v, w) in edges {
            g.check_vertex(u)?;
            g.check_vertex(v)?;
            if u == v {
                return Err(GraphError::Loop(u));
            }
            if w.is_negative() {
                return Err(GraphError::NegativeWeight(u, v));
            }
            if !g.weight(u, v).is_zero() {
                return Err(GraphError::MultiEdge(u.min(v), u.max(v)));
            }
            g.weights[u * n + v] = w.clone();
            g.weights[v * n + u] = w;
        }
        Ok(g)
    }

    pub fn unweighted<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Self::from_edges(
            n,
            edges.into_iter().map(|(u, v)| (u, v, BigRational::one())),
        )
    }

    /// Builds a graph from a full row-major weight matrix.
    pub fn from_adjacency(n: usize, weights: Vec<BigRational>) -> Result<Self, GraphError> {
        if weights.len() != n * n {
            return Err(GraphError::Parameter(format!(
                "adjacency has {} entries, expected {}",
                weights.len(),
                n * n
            )));
        }
        for u in 0..n {
            if !weights[u * n + u].is_zero() {
                return Err(GraphError::NotSimple(format!("nonzero diagonal at vertex {u}")));
            }
            for v in (u + 1)..n {
                let w = &weights[u * n + v];
                if w != &weights[v * n + u] {
                    return Err(GraphError::NotSymmetric(u, v));
                }
                if w.is_negative() {
                    return Err(GraphError::NegativeWeight(u, v));
                }
            }
        }
        Ok(Self { n, weights })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn weight(&self, u: usize, v: usize) -> &BigRational {
        &self.weights[u * self.n + v]
    }

    pub fn adjacency(&self) -> &[BigRational] {
        &self.weights
    }

    pub fn is_edge(&self, u: usize, v: usize) -> bool {
        !self.weight(u, v).is_zero()
    }

    /// Edges `(u, v, w)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, &BigRational)> + '_ {
        (0..self.n).flat_map(move |u| {
            ((u + 1)..self.n).filter_map(move |v| {
                let w = self.weight(u, v);
                (!w.is_zero()).then_some((u, v, w))
            })
        })
    }

    pub fn edge_count(&self) -> usize {
        self.edges().count()
    }

    pub fn neighbours(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&v| self.is_edge(u, v))
    }

    pub fn degree(&self, u: usize) -> BigRational {
        self.weights[u * self.n..(u + 1) * self.n].iter().sum()
    }

    /// Weighted degrees.
    pub fn degrees(&self) -> Vec<BigRational> {
        (0..self.n).map(|u| self.degree(u)).collect()
    }

    /// `L = D - A`, row-major.
    pub fn laplacian(&self) -> Vec<BigRational> {
        let n = self.n;
        let mut l: Vec<BigRational> = self.weights.iter().map(|w| -w).collect();
        for u in 0..n {
            l[u * n + u] = self.degree(u);
        }
        l
    }

    /// All weights are 0 or 1.
    pub fn is_unweighted(&self) -> bool {
        self.weights.iter().all(|w| w.is_zero() || w.is_one())
    }

    /// All weights are integers.
    pub fn is_integer_weighted(&self) -> bool {
        self.weights.iter().all(|w| w.is_integer())
    }

    /// Least common multiple of all weight denominators.
    pub fn weight_denominator(&self) -> BigInt {
        self.weights
            .iter()
            .fold(BigInt::one(), |acc, w| acc.lcm(w.denom()))
    }

    /// The weight matrix multiplied by [`Self::weight_denominator`].
    pub fn scaled_adjacency(&self) -> (Vec<BigInt>, BigInt) {
        let s = self.weight_denominator();
        let scaled = self
            .weights
            .iter()
            .map(|w| (w * &s).to_integer())
            .collect();
        (scaled, s)
    }

    /// Neighbourhood bitmasks; `None` for weighted graphs or `n > 64`.
    pub fn neighbour_masks(&self) -> Option<Vec<u64>> {
        if self.n > 64 || !self.is_unweighted() {
            return None;
        }
        Some(
            (0..self.n)
                .map(|u| self.neighbours(u).fold(0u64, |m, v| m | (1 << v)))
                .collect(),
        )
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut comps = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for v in self.neighbours(u) {
                    if !seen[v] {
                        seen[v] = true;
                        comp.push(v);
                        queue.push_back(v);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.components().len() == 1
    }

    /// Relabels vertices: vertex `v` of `self` becomes `perm[v]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self, GraphError> {
        let n = self.n;
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(GraphError::Parameter("not a permutation".into()));
        }
        let mut w = vec![BigRational::zero(); n * n];
        for u in 0..n {
            for v in 0..n {
                w[perm[u] * n + perm[v]] = self.weight(u, v).clone();
            }
        }
        Ok(Self { n, weights: w })
    }

    fn check_vertex(&self, v: usize) -> Result<(), GraphError> {
        if v >= self.n {
            return Err(GraphError::VertexOutOfRange { vertex: v, n: self.n });
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<(usize, usize, WeightJson)>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum WeightJson {
    Int(i64),
    Text(String),
}

impl TryFrom<GraphJson> for WeightedGraph {
    type Error = GraphError;

    fn try_from(value: GraphJson) -> Result<Self, Self::Error> {
        let edges = value
            .edges
            .into_iter()
            .map(|(u, v, w)| {
                let w = match w {
                    WeightJson::Int(i) => BigRational::from_integer(i.into()),
                    WeightJson::Text(s) => parse_rational(&s)?,
                };
                Ok((u, v, w))
            })
            .collect::<Result<Vec<_>, GraphError>>()?;
        WeightedGraph::from_edges(value.n, edges)
    }
}

impl From<WeightedGraph> for GraphJson {
    fn from(g: WeightedGraph) -> Self {
        let edges = g
            .edges()
            .map(|(u, v, w)| (u, v, WeightJson::Text(w.to_string())))
            .collect();
        GraphJson { n: g.n, edges }
    }
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Result<BigRational, GraphError> {
    let t = s.trim();
    let bad = || GraphError::BadWeight(s.to_string());
    match t.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
            let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(p, q))
        }
        None => Ok(BigRational::from_integer(
            BigInt::from_str(t).map_err(|_| bad())?,
        )),
    }
}

/// `Z_{m_1} x ... x Z_{m_k}` with elements written as digit tuples.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbelianGroup {
    moduli: Vec<usize>,
}

impl AbelianGroup {
    pub fn new(moduli: Vec<usize>) -> Result<Self, GraphError> {
        if moduli.is_empty() || moduli.contains(&0) {
            return Err(GraphError::Parameter("group moduli must be positive".into()));
        }
        Ok(Self { moduli })
    }

    pub fn moduli(&self) -> &[usize] {
        &self.moduli
    }

    pub fn order(&self) -> usize {
        self.moduli.iter().product()
    }

    /// Mixed-radix index, first modulus most significant.
    pub fn index(&self, g: &[usize]) -> Result<usize, GraphError> {
        self.check(g)?;
        Ok(g.iter().zip(&self.moduli).fold(0, |acc, (x, m)| acc * m + x))
    }

    pub fn element(&self, mut idx: usize) -> Vec<usize> {
        let mut g = vec![0; self.moduli.len()];
        for (i, m) in self.moduli.iter().enumerate().rev() {
            g[i] = idx % m;
            idx /= m;
        }
        g
    }

    pub fn sub(&self, a: &[usize], b: &[usize]) -> Vec<usize> {
        a.iter()
            .zip(b)
            .zip(&self.moduli)
            .map(|((x, y), m)| (x + m - y) % m)
            .collect()
    }

    pub fn neg(&self, a: &[usize]) -> Vec<usize> {
        a.iter().zip(&self.moduli).map(|(x, m)| (m - x) % m).collect()
    }

    /// `Some(k)` for the additive order of `g`.
    pub fn element_order(&self, g: &[usize]) -> usize {
        g.iter()
            .zip(&self.moduli)
            .fold(1usize, |acc, (&x, &m)| acc.lcm(&(m / m.gcd(&x))))
    }

    fn check(&self, g: &[usize]) -> Result<(), GraphError> {
        if g.len() != self.moduli.len() || g.iter().zip(&self.moduli).any(|(x, m)| x >= m) {
            return Err(GraphError::BadElement(g.to_vec(), self.moduli.clone()));
        }
        Ok(())
    }
}

/// Undirected Cayley graph: `u ~ v` iff `u - v` lies in the connection set.
pub fn cayley(group: &AbelianGroup, connection: &[Vec<usize>]) -> Result<WeightedGraph, GraphError> {
    let mut set = BTreeSet::new();
    for c in connection {
        group.check(c)?;
        if c.iter().all(|&x| x == 0) {
            return Err(GraphError::IdentityInConnection);
        }
        set.insert(c.clone());
    }
    for c in &set {
        let neg = group.neg(c);
        if !set.contains(&neg) {
            return Err(GraphError::NotInverseClosed(neg));
        }
    }
    let n = group.order();
    let mut edges = Vec::new();
    for u in 0..n {
        let gu = group.element(u);
        for v in (u + 1)..n {
            if set.contains(&group.sub(&gu, &group.element(v))) {
                edges.push((u, v));
            }
        }
    }
    WeightedGraph::unweighted(n, edges)
}

pub fn complement(g: &WeightedGraph) -> Result<WeightedGraph, GraphError> {
    if !g.is_unweighted() {
        return Err(GraphError::Weighted);
    }
    let n = g.order();
    let edges = (0..n)
        .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
        .filter(|&(u, v)| !g.is_edge(u, v));
    WeightedGraph::unweighted(n, edges)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Combine {
    Union,
    Join,
}

/// Disjoint union `G1 + G2`, or join `G1 ∨ G2` (union plus every cross edge).
pub fn combine(g1: &WeightedGraph, g2: &WeightedGraph, kind: Combine) -> Result<WeightedGraph, GraphError> {
    if kind == Combine::Join && !(g1.is_unweighted() && g2.is_unweighted()) {
        return Err(GraphError::Weighted);
    }
    let (n1, n2) = (g1.order(), g2.order());
    let n = n1 + n2;
    let mut w = vec![BigRational::zero(); n * n];
    for u in 0..n1 {
        for v in 0..n1 {
            w[u * n + v] = g1.weight(u, v).clone();
        }
    }
    for u in 0..n2 {
        for v in 0..n2 {
            w[(n1 + u) * n + n1 + v] = g2.weight(u, v).clone();
        }
    }
    if kind == Combine::Join {
        for u in 0..n1 {
            for v in n1..n {
                w[u * n + v] = BigRational::one();
                w[v * n + u] = BigRational::one();
            }
        }
    }
    WeightedGraph::from_adjacency(n, w)
}

/// Merge with adjacency `[[w1 A1, w2 A2], [w2 A2, w1 A1]]`.
pub fn merge(
    g1: &WeightedGraph,
    g2: &WeightedGraph,
    w1: &BigRational,
    w2: &BigRational,
) -> Result<WeightedGraph, GraphError> {
    if g1.order() != g2.order() {
        return Err(GraphError::OrderMismatch(g1.order(), g2.order()));
    }
    if !w1.is_positive() || !w2.is_positive() {
        return Err(GraphError::Parameter("merge weights must be positive".into()));
    }
    let n = g1.order();
    weighted_tensor_sum(&[
        TensorTerm::new(w1.clone(), vec![Factor::Identity(2), Factor::Graph(g1)]),
        TensorTerm::new(w2.clone(), vec![Factor::Graph(&k2()), Factor::Graph(g2)]),
    ])
    .inspect(|g| {
        debug_assert_eq!(g.order(), 2 * n);
    })
}

/// The double cover `G1 ⋉ G2`, i.e. `merge(G1, G2, 1, 1)`.
pub fn double_cover(g1: &WeightedGraph, g2: &WeightedGraph) -> Result<WeightedGraph, GraphError> {
    merge(g1, g2, &BigRational::one(), &BigRational::one())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Product {
    Direct,
    Cartesian,
}

pub fn product(g1: &WeightedGraph, g2: &WeightedGraph, kind: Product) -> Result<WeightedGraph, GraphError> {
    let one = BigRational::one;
    let terms = match kind {
        Product::Direct => vec![TensorTerm::new(one(), vec![Factor::Graph(g1), Factor::Graph(g2)])],
        Product::Cartesian => vec![
            TensorTerm::new(one(), vec![Factor::Graph(g1), Factor::Identity(g2.order())]),
            TensorTerm::new(one(), vec![Factor::Identity(g1.order()), Factor::Graph(g2)]),
        ],
    };
    weighted_tensor_sum(&terms)
}

/// NEPS with basis `Ω`: `sum_{β ∈ Ω} A1^{β1} ⊗ ... ⊗ Ad^{βd}`, with `A^0 = I`.
pub fn neps(graphs: &[WeightedGraph], basis: &[Vec<u8>]) -> Result<WeightedGraph, GraphError> {
    if graphs.is_empty() {
        return Err(GraphError::BadBasis("no factor graphs".into()));
    }
    if basis.is_empty() {
        return Err(GraphError::BadBasis("basis set is empty".into()));
    }
    let unique: BTreeSet<&Vec<u8>> = basis.iter().collect();
    let mut terms = Vec::with_capacity(unique.len());
    for beta in unique {
        if beta.len() != graphs.len() {
            return Err(GraphError::BadBasis(format!(
                "tuple {beta:?} has length {}, expected {}",
                beta.len(),
                graphs.len()
            )));
        }
        if beta.iter().any(|&b| b > 1) {
            return Err(GraphError::BadBasis(format!("tuple {beta:?} is not 0/1")));
        }
        if beta.iter().all(|&b| b == 0) {
            return Err(GraphError::BadBasis("the all-zero tuple is not allowed".into()));
        }
        let factors = beta
            .iter()
            .zip(graphs)
            .map(|(&b, g)| if b == 1 { Factor::Graph(g) } else { Factor::Identity(g.order()) })
            .collect();
        terms.push(TensorTerm::new(BigRational::one(), factors));
    }
    weighted_tensor_sum(&terms)
}

/// One Kronecker factor: a graph's adjacency matrix or an identity.
#[derive(Debug, Clone, Copy)]
pub enum Factor<'a> {
    Graph(&'a WeightedGraph),
    Identity(usize),
}

impl Factor<'_> {
    fn order(&self) -> usize {
        match self {
            Factor::Graph(g) => g.order(),
            Factor::Identity(n) => *n,
        }
    }

    fn entry(&self, u: usize, v: usize) -> BigRational {
        match self {
            Factor::Graph(g) => g.weight(u, v).clone(),
            Factor::Identity(_) if u == v => BigRational::one(),
            Factor::Identity(_) => BigRational::zero(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TensorTerm<'a> {
    pub weight: BigRational,
    pub factors: Vec<Factor<'a>>,
}

impl<'a> TensorTerm<'a> {
    pub fn new(weight: BigRational, factors: Vec<Factor<'a>>) -> Self {
        Self { weight, factors }
    }
}

/// Graph with adjacency `sum_t w_t (F_{t,1} ⊗ ... ⊗ F_{t,k})`.
pub fn weighted_tensor_sum(terms: &[TensorTerm<'_>]) -> Result<WeightedGraph, GraphError> {
    let first = terms
        .first()
        .ok_or_else(|| GraphError::Parameter("no terms".into()))?;
    let shape: Vec<usize> = first.factors.iter().map(Factor::order).collect();
    if shape.is_empty() {
        return Err(GraphError::Parameter("term without factors".into()));
    }
    for t in terms {
        let s: Vec<usize> = t.factors.iter().map(Factor::order).collect();
        if s != shape {
            return Err(GraphError::Parameter(format!(
                "factor orders {s:?} do not match {shape:?}"
            )));
        }
    }
    let n: usize = shape.iter().product();
    let digits = |mut x: usize| {
        let mut d = vec![0; shape.len()];
        for (i, m) in shape.iter().enumerate().rev() {
            d[i] = x % m;
            x /= m;
        }
        d
    };
    let idx: Vec<Vec<usize>> = (0..n).map(digits).collect();
    let mut w = vec![BigRational::zero(); n * n];
    for t in terms {
        for u in 0..n {
            for v in 0..n {
                let mut prod = t.weight.clone();
                for (f, (&a, &b)) in t.factors.iter().zip(idx[u].iter().zip(&idx[v])) {
                    if prod.is_zero() {
                        break;
                    }
                    prod *= f.entry(a, b);
                }
                if !prod.is_zero() {
                    w[u * n + v] += prod;
                }
            }
        }
    }
    for u in 0..n {
        if !w[u * n + u].is_zero() {
            return Err(GraphError::NotSimple(format!("diagonal entry at vertex {u}")));
        }
        for v in 0..n {
            if w[u * n + v].is_negative() {
                return Err(GraphError::NotSimple(format!("negative weight at ({u}, {v})")));
            }
        }
    }
    WeightedGraph::from_adjacency(n, w)
}

/// Standard unweighted families.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Family {
    Complete(usize),
    Empty(usize),
    Cycle(usize),
    Hypercube(usize),
    /// `(nK_2)^c` on `2n` vertices
    Cocktail(usize),
    CompleteBipartite(usize, usize),
    CompleteMultipartite(Vec<usize>),
}

pub fn named(family: &Family) -> Result<WeightedGraph, GraphError> {
    let bad = |msg: &str| Err(GraphError::Parameter(msg.to_string()));
    match family {
        Family::Complete(n) | Family::Empty(n) if *n == 0 => bad("order must be at least 1"),
        Family::Complete(n) => complement(&WeightedGraph::empty(*n)),
        Family::Empty(n) => Ok(WeightedGraph::empty(*n)),
        Family::Cycle(r) if *r < 3 => bad("a cycle needs at least 3 vertices"),
        Family::Cycle(r) => {
            let r = *r;
            WeightedGraph::unweighted(r, (0..r).map(|u| (u, (u + 1) % r)))
        }
        Family::Hypercube(d) => {
            let group = AbelianGroup::new(vec![2; (*d).max(1)])?;
            if *d == 0 {
                return Ok(WeightedGraph::empty(1));
            }
            let conn: Vec<Vec<usize>> = (0..*d)
                .map(|i| (0..*d).map(|j| usize::from(i == j)).collect())
                .collect();
            cayley(&group, &conn)
        }
        Family::Cocktail(n) if *n == 0 => bad("cocktail party graph needs n >= 1"),
        Family::Cocktail(n) => {
            let m = 2 * n;
            WeightedGraph::unweighted(
                m,
                (0..m)
                    .flat_map(|u| ((u + 1)..m).map(move |v| (u, v)))
                    .filter(|&(u, v)| v != u + n),
            )
        }
        Family::CompleteBipartite(a, b) => named(&Family::CompleteMultipartite(vec![*a, *b])),
        Family::CompleteMultipartite(parts) if parts.is_empty() || parts.contains(&0) => {
            bad("parts must be nonempty")
        }
        Family::CompleteMultipartite(parts) => {
            let n: usize = parts.iter().sum();
            let part_of: Vec<usize> = parts
                .iter()
                .enumerate()
                .flat_map(|(i, &p)| std::iter::repeat_n(i, p))
                .collect();
            WeightedGraph::unweighted(
                n,
                (0..n)
                    .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
                    .filter(|&(u, v)| part_of[u] != part_of[v]),
            )
        }
    }
}

fn k2() -> WeightedGraph {
    WeightedGraph::unweighted(2, [(0, 1)]).expect("K_2")
}
