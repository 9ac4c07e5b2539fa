//! Butson-type complex Hadamard matrices stored as exponent matrices.
//!
//! Entry `(j, k)` of a [`ButsonMatrix`] is `zeta_r^exps[j][k]`. All
//! verification happens in `Z[zeta_r]`; complex floats are only derived
//! views.

pub mod library;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cyclotomic::CyclotomicInt;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HadamardError {
    #[error("root order r must be at least 1")]
    InvalidRootOrder,
    #[error("malformed exponent matrix: {0}")]
    Shape(String),
    #[error("matrix is not a complex Hadamard matrix")]
    NotHadamard,
    #[error("not a symmetric conference matrix: {0}")]
    NotConference(String),
    #[error("invalid monomial transform: {0}")]
    Transform(String),
    #[error("character table needs at least one modulus, all positive")]
    InvalidModuli,
}

/// Which family a verified matrix belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "class", content = "root_order")]
pub enum Classification {
    /// all entries are `±1`
    Real,
    /// entries in `{±1, ±i}`, not all real
    Turyn,
    /// smallest root order containing every entry
    Butson(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ButsonJson", into = "ButsonJson")]
pub struct ButsonMatrix {
    n: usize,
    r: usize,
    exps: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct ButsonJson {
    n: usize,
    r: usize,
    exps: Vec<Vec<i64>>,
}

impl TryFrom<ButsonJson> for ButsonMatrix {
    type Error = HadamardError;

    fn try_from(value: ButsonJson) -> Result<Self, Self::Error> {
        if value.exps.len() != value.n {
            return Err(HadamardError::Shape(format!(
                "field `exps` has {} rows but n = {}",
                value.exps.len(),
                value.n
            )));
        }
        ButsonMatrix::new(value.r, value.exps)
    }
}

impl From<ButsonMatrix> for ButsonJson {
    fn from(m: ButsonMatrix) -> Self {
        let exps = (0..m.n)
            .map(|j| m.row(j).iter().map(|&e| e as i64).collect())
            .collect();
        ButsonJson {
            n: m.n,
            r: m.r,
            exps,
        }
    }
}

impl ButsonMatrix {
    /// Builds a matrix from a square table of exponents, reducing each modulo `r`.
    pub fn new(r: usize, exps: Vec<Vec<i64>>) -> Result<Self, HadamardError> {
        if r == 0 {
            return Err(HadamardError::InvalidRootOrder);
        }
        let n = exps.len();
        if n == 0 {
            return Err(HadamardError::Shape("matrix must be at least 1x1".into()));
        }
        let mut flat = Vec::with_capacity(n * n);
        for (j, row) in exps.iter().enumerate() {
            if row.len() != n {
                return Err(HadamardError::Shape(format!(
                    "row {j} has length {}, expected {n}",
                    row.len()
                )));
            }
            flat.extend(row.iter().map(|&e| e.rem_euclid(r as i64) as usize));
        }
        Ok(Self { n, r, exps: flat })
    }

    fn from_flat(n: usize, r: usize, exps: Vec<usize>) -> Self {
        debug_assert_eq!(exps.len(), n * n);
        Self { n, r, exps }
    }

    /// The Sylvester real Hadamard matrix `[[1,1],[1,-1]]^{⊗d}`.
    pub fn sylvester(d: usize) -> Self {
        let base = Self::from_flat(2, 2, vec![0, 0, 0, 1]);
        (0..d).fold(Self::from_flat(1, 1, vec![0]), |acc, _| acc.tensor(&base))
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn root_order(&self) -> usize {
        self.r
    }

    pub fn exp(&self, row: usize, col: usize) -> usize {
        self.exps[row * self.n + col]
    }

    pub fn row(&self, j: usize) -> &[usize] {
        &self.exps[j * self.n..(j + 1) * self.n]
    }

    /// Column `h_k` as exponents.
    pub fn column(&self, k: usize) -> Vec<usize> {
        (0..self.n).map(|j| self.exp(j, k)).collect()
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        root(self.exp(row, col), self.r)
    }

    pub fn to_complex(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.n, self.n, |j, k| self.entry(j, k))
    }

    /// `H H^* = n I`, checked exactly in `Z[zeta_r]`.
    ///
    /// The diagonal of `H H^*` is `n` for any unimodular matrix, so only
    /// distinct row pairs need to be checked for orthogonality.
    pub fn verify(&self) -> bool {
        let (n, r) = (self.n, self.r);
        let mut counts = vec![0i64; r];
        for a in 0..n {
            for b in (a + 1)..n {
                counts.iter_mut().for_each(|c| *c = 0);
                for (ea, eb) in self.row(a).iter().zip(self.row(b)) {
                    counts[(ea + r - eb) % r] += 1;
                }
                let inner = CyclotomicInt::from_i64s(r, &counts).expect("r >= 1");
                if !inner.is_zero() {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_dephased(&self) -> bool {
        (0..self.n).all(|k| self.exp(0, k) == 0 && self.exp(k, 0) == 0)
    }

    /// Normalises the first row and column to all ones.
    ///
    /// Columns are first multiplied by the inverse of their first-row entry,
    /// then rows by the inverse of their first-column entry.
    pub fn dephase(&self) -> Result<Self, HadamardError> {
        if !self.verify() {
            return Err(HadamardError::NotHadamard);
        }
        let (n, r) = (self.n, self.r);
        let mut exps = self.exps.clone();
        for j in 0..n {
            for k in 0..n {
                exps[j * n + k] = (exps[j * n + k] + r - self.exp(0, k)) % r;
            }
        }
        for j in 0..n {
            let first = exps[j * n];
            for k in 0..n {
                exps[j * n + k] = (exps[j * n + k] + r - first) % r;
            }
        }
        Ok(Self::from_flat(n, r, exps))
    }

    /// Kronecker product over the common root order `lcm(r1, r2)`.
    ///
    /// Row and column indices follow the mixed-radix convention
    /// `(a, b) -> a * n2 + b`.
    pub fn tensor(&self, other: &Self) -> Self {
        let r = self.r.lcm(&other.r);
        let (s1, s2) = (r / self.r, r / other.r);
        let (n1, n2) = (self.n, other.n);
        let n = n1 * n2;
        let mut exps = vec![0; n * n];
        for a in 0..n1 {
            for b in 0..n2 {
                let row = a * n2 + b;
                for c in 0..n1 {
                    for d in 0..n2 {
                        let col = c * n2 + d;
                        exps[row * n + col] = (self.exp(a, c) * s1 + other.exp(b, d) * s2) % r;
                    }
                }
            }
        }
        Self::from_flat(n, r, exps)
    }

    /// `[[H, H], [H, -H]]`.
    pub fn double(&self) -> Self {
        Self::sylvester(1).tensor(self)
    }

    /// Smallest root order containing every entry.
    pub fn effective_root_order(&self) -> usize {
        self.exps
            .iter()
            .fold(1usize, |acc, &e| acc.lcm(&(self.r / self.r.gcd(&e))))
    }

    /// The same matrix re-expressed over its effective root order.
    pub fn minimal_root_form(&self) -> Self {
        let r = self.effective_root_order();
        let step = self.r / r;
        Self::from_flat(self.n, r, self.exps.iter().map(|e| e / step).collect())
    }

    /// The same matrix over a multiple `r` of the current root order.
    pub fn promote(&self, r: usize) -> Result<Self, HadamardError> {
        if r == 0 || !r.is_multiple_of(self.r) {
            return Err(HadamardError::Shape(format!(
                "root order {r} is not a multiple of {}",
                self.r
            )));
        }
        let step = r / self.r;
        Ok(Self::from_flat(
            self.n,
            r,
            self.exps.iter().map(|e| e * step).collect(),
        ))
    }

    pub fn classify(&self) -> Classification {
        match self.effective_root_order() {
            1 | 2 => Classification::Real,
            4 => Classification::Turyn,
            r => Classification::Butson(r),
        }
    }

    /// Applies `M H N` where `M` permutes rows then scales them by
    /// `zeta^row_phases`, and `N` permutes columns then scales them by
    /// `zeta^col_phases`:
    /// `out[j][k] = row_phases[j] + exps[row_perm[j]][col_perm[k]] + col_phases[k]`.
    pub fn monomial_transform(
        &self,
        row_perm: &[usize],
        col_perm: &[usize],
        row_phases: &[i64],
        col_phases: &[i64],
    ) -> Result<Self, HadamardError> {
        let n = self.n;
        check_permutation("row", row_perm, n)?;
        check_permutation("column", col_perm, n)?;
        for (what, len) in [("row", row_phases.len()), ("column", col_phases.len())] {
            if len != n {
                return Err(HadamardError::Transform(format!(
                    "{what} phase vector has length {len}, expected {n}"
                )));
            }
        }
        let r = self.r as i64;
        let mut exps = vec![0; n * n];
        for j in 0..n {
            for k in 0..n {
                let e = row_phases[j] + self.exp(row_perm[j], col_perm[k]) as i64 + col_phases[k];
                exps[j * n + k] = e.rem_euclid(r) as usize;
            }
        }
        Ok(Self::from_flat(n, self.r, exps))
    }

    /// Character `chi_j`, i.e. column `j`, evaluated at the group element
    /// indexed by `g`. Only meaningful for character tables.
    pub fn character(&self, j: usize, g: usize) -> usize {
        self.exp(g, j)
    }
}

fn check_permutation(what: &str, perm: &[usize], n: usize) -> Result<(), HadamardError> {
    if perm.len() != n {
        return Err(HadamardError::Transform(format!(
            "{what} permutation has length {}, expected {n}",
            perm.len()
        )));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(HadamardError::Transform(format!(
                "{what} permutation is not a bijection of 0..{n}"
            )));
        }
    }
    Ok(())
}

pub(crate) fn root(e: usize, r: usize) -> Complex64 {
    Complex64::from_polar(1.0, std::f64::consts::TAU * e as f64 / r as f64)
}

/// Transposed character table of `Z_{m_1} x ... x Z_{m_k}`.
///
/// Group elements are indexed in mixed radix with the first modulus most
/// significant. Columns are the characters; the result is dephased.
pub fn character_table(moduli: &[usize]) -> Result<ButsonMatrix, HadamardError> {
    if moduli.is_empty() || moduli.contains(&0) {
        return Err(HadamardError::InvalidModuli);
    }
    let r = moduli.iter().fold(1usize, |acc, m| acc.lcm(m));
    let n: usize = moduli.iter().product();
    let digits = |mut x: usize| {
        let mut d = vec![0; moduli.len()];
        for (i, m) in moduli.iter().enumerate().rev() {
            d[i] = x % m;
            x /= m;
        }
        d
    };
    let elems: Vec<Vec<usize>> = (0..n).map(digits).collect();
    let mut exps = vec![0; n * n];
    for (g, eg) in elems.iter().enumerate() {
        for (j, ej) in elems.iter().enumerate() {
            let e: usize = moduli
                .iter()
                .enumerate()
                .map(|(i, m)| (r / m) * eg[i] * ej[i])
                .sum();
            exps[g * n + j] = e % r;
        }
    }
    Ok(ButsonMatrix::from_flat(n, r, exps))
}

/// Dephased exponent form of `I + iC` for a symmetric conference matrix `C`.
pub fn conference_lift(c: &[Vec<i64>]) -> Result<ButsonMatrix, HadamardError> {
    let n = c.len();
    if n < 2 {
        return Err(HadamardError::NotConference("order must be at least 2".into()));
    }
    for (j, row) in c.iter().enumerate() {
        if row.len() != n {
            return Err(HadamardError::NotConference(format!("row {j} has wrong length")));
        }
        for (k, &v) in row.iter().enumerate() {
            if j == k && v != 0 {
                return Err(HadamardError::NotConference(format!("diagonal entry {j} is nonzero")));
            }
            if j != k && v.abs() != 1 {
                return Err(HadamardError::NotConference(format!("entry ({j},{k}) is not ±1")));
            }
            if v != c[k][j] {
                return Err(HadamardError::NotConference("matrix is not symmetric".into()));
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            let dot: i64 = (0..n).map(|k| c[k][a] * c[k][b]).sum();
            let want = if a == b { n as i64 - 1 } else { 0 };
            if dot != want {
                return Err(HadamardError::NotConference(format!(
                    "(C^T C)[{a}][{b}] = {dot}, expected {want}"
                )));
            }
        }
    }
    let exps = c
        .iter()
        .enumerate()
        .map(|(j, row)| {
            row.iter()
                .enumerate()
                .map(|(k, &v)| match (j == k, v) {
                    (true, _) => 0,
                    (false, 1) => 1,
                    _ => 3,
                })
                .collect()
        })
        .collect();
    ButsonMatrix::new(4, exps)?.dephase()
}

/// Symmetric Paley conference matrix of order `q + 1` for a prime `q ≡ 1 (mod 4)`.
pub fn paley_conference(q: usize) -> Result<Vec<Vec<i64>>, HadamardError> {
    if q < 5 || q % 4 != 1 || !is_prime(q) {
        return Err(HadamardError::NotConference(format!(
            "Paley construction needs a prime q ≡ 1 (mod 4), got {q}"
        )));
    }
    let mut residue = vec![false; q];
    for x in 1..q {
        residue[x * x % q] = true;
    }
    let n = q + 1;
    let mut c = vec![vec![0i64; n]; n];
    for k in 1..n {
        c[0][k] = 1;
        c[k][0] = 1;
    }
    for a in 0..q {
        for b in 0..q {
            if a != b {
                c[a + 1][b + 1] = if residue[(a + q - b) % q] { 1 } else { -1 };
            }
        }
    }
    Ok(c)
}

pub(crate) fn is_prime(p: usize) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// Exponent sum `sum_s weight_s * zeta^{e_s}` as a cyclotomic integer.
pub(crate) fn weighted_root_sum<'a>(
    r: usize,
    terms: impl IntoIterator<Item = (usize, &'a BigInt)>,
) -> CyclotomicInt {
    let mut acc = CyclotomicInt::zero(r).expect("r >= 1");
    for (e, w) in terms {
        acc.add_term(e as i64, w);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn h2() -> ButsonMatrix {
        ButsonMatrix::sylvester(1)
    }

    fn cocktail_conference6() -> Vec<Vec<i64>> {
        paley_conference(5).unwrap()
    }

    #[test]
    fn verify_examples() {
        let z4 = character_table(&[4]).unwrap();
        let displayed = ButsonMatrix::new(
            4,
            vec![
                vec![0, 0, 0, 0],
                vec![0, 1, 2, 3],
                vec![0, 2, 0, 2],
                vec![0, 3, 2, 1],
            ],
        )
        .unwrap();
        assert_eq!(z4, displayed);
        assert!(z4.verify());
        assert!(!ButsonMatrix::new(2, vec![vec![0, 0], vec![0, 0]]).unwrap().verify());
        assert!(ButsonMatrix::sylvester(3).verify());
    }

    #[test]
    fn json_shape_errors_name_the_problem() {
        let bad = r#"{"n": 2, "r": 2, "exps": [[0, 0], [0]]}"#;
        let err = serde_json::from_str::<ButsonMatrix>(bad).unwrap_err().to_string();
        assert!(err.contains("row 1"), "{err}");
        let bad = r#"{"n": 3, "r": 2, "exps": [[0, 0], [0, 1]]}"#;
        let err = serde_json::from_str::<ButsonMatrix>(bad).unwrap_err().to_string();
        assert!(err.contains("exps"), "{err}");
        let h: ButsonMatrix =
            serde_json::from_str(r#"{"n": 2, "r": 4, "exps": [[0, 0], [0, -2]]}"#).unwrap();
        assert_eq!(h.exp(1, 1), 2);
    }

    #[test]
    fn dephase_examples() {
        let z4 = character_table(&[4]).unwrap();
        assert_eq!(z4.dephase().unwrap(), z4);

        let shifted = z4.monomial_transform(&[0, 1, 2, 3], &[0, 1, 2, 3], &[1, 0, 0, 0], &[0; 4]).unwrap();
        assert_eq!(shifted.row(0), &[1, 1, 1, 1]);
        let d = shifted.dephase().unwrap();
        assert_eq!(d.row(0), &[0, 0, 0, 0]);
        assert!(d.is_dephased());

        let bad = ButsonMatrix::new(2, vec![vec![0, 0], vec![0, 0]]).unwrap();
        assert_eq!(bad.dephase().unwrap_err(), HadamardError::NotHadamard);
    }

    #[test]
    fn conference_lift_of_order_six() {
        let h = conference_lift(&cocktail_conference6()).unwrap();
        assert_eq!(h.order(), 6);
        assert!(h.verify());
        assert!(h.is_dephased());
        assert_eq!(h.classify(), Classification::Turyn);
        // second row is (1, -1, ±i, ±i, ±i, ±i)
        let second = h.row(1);
        assert_eq!(&second[..2], &[0, 2]);
        assert!(second[2..].iter().all(|&e| e == 1 || e == 3));
    }

    #[test]
    fn conference_lift_edge_cases() {
        let h = conference_lift(&[vec![0, 1], vec![1, 0]]).unwrap();
        assert!(h.verify());
        assert_eq!(h.minimal_root_form(), h2());
        let mut ones = vec![vec![1i64; 4]; 4];
        (0..4).for_each(|j| ones[j][j] = 0);
        assert!(matches!(conference_lift(&ones), Err(HadamardError::NotConference(_))));
        assert!(paley_conference(7).is_err());
    }

    #[test]
    fn character_tables() {
        assert_eq!(character_table(&[2]).unwrap(), h2());
        assert_eq!(character_table(&[2, 2]).unwrap(), h2().tensor(&h2()));
        let z4 = character_table(&[4]).unwrap();
        assert_eq!(z4.tensor(&z4), character_table(&[4, 4]).unwrap());
        for moduli in [vec![3], vec![6], vec![2, 3], vec![5, 5], vec![4, 2], vec![3, 4, 5]] {
            let h = character_table(&moduli).unwrap();
            assert!(h.verify(), "{moduli:?}");
            assert!(h.is_dephased());
        }
        assert!(character_table(&[]).is_err());
        assert!(character_table(&[3, 0]).is_err());
    }

    #[test]
    fn tensor_and_double() {
        let one = ButsonMatrix::new(1, vec![vec![0]]).unwrap();
        let z3 = character_table(&[3]).unwrap();
        assert_eq!(z3.tensor(&one), z3);
        assert_eq!(one.double(), h2());
        let d = z3.double();
        assert_eq!(d.order(), 6);
        assert_eq!(d.root_order(), 6);
        assert_eq!(d, h2().tensor(&z3));
        let real4 = h2().double();
        assert!(real4.verify());
        assert_eq!(real4.classify(), Classification::Real);
        // mixed root orders promote to the lcm
        let mixed = character_table(&[4]).unwrap().tensor(&character_table(&[6]).unwrap());
        assert_eq!(mixed.root_order(), 12);
        assert!(mixed.verify());
    }

    #[test]
    fn classification() {
        assert_eq!(h2().classify(), Classification::Real);
        assert_eq!(character_table(&[4]).unwrap().classify(), Classification::Turyn);
        assert_eq!(character_table(&[3]).unwrap().classify(), Classification::Butson(3));
        // a real matrix stored over r = 8 is still real
        assert_eq!(h2().promote(8).unwrap().classify(), Classification::Real);
        assert_eq!(h2().promote(8).unwrap().minimal_root_form(), h2());
    }

    #[test]
    fn monomial_transform_errors() {
        let h = character_table(&[4]).unwrap();
        let id: Vec<usize> = (0..4).collect();
        assert_eq!(h.monomial_transform(&id, &id, &[0; 4], &[0; 4]).unwrap(), h);
        assert!(h.monomial_transform(&[0, 1, 2], &id, &[0; 4], &[0; 4]).is_err());
        assert!(h.monomial_transform(&[0, 1, 1, 2], &id, &[0; 4], &[0; 4]).is_err());
        assert!(h.monomial_transform(&id, &id, &[0; 3], &[0; 4]).is_err());
        let swapped = h.monomial_transform(&[1, 0, 2, 3], &id, &[0; 4], &[0; 4]).unwrap();
        assert!(swapped.verify());
    }

    fn arb_instance() -> impl Strategy<Value = ButsonMatrix> {
        prop::sample::select(vec![
            vec![2usize],
            vec![3],
            vec![4],
            vec![5],
            vec![2, 2],
            vec![2, 3],
            vec![6],
            vec![2, 4],
            vec![2, 2, 2],
            vec![8],
            vec![3, 3],
        ])
        .prop_map(|m| character_table(&m).unwrap())
        .boxed()
        .prop_union(Just(conference_lift(&paley_conference(5).unwrap()).unwrap()).boxed())
    }

    fn arb_transform() -> impl Strategy<Value = (ButsonMatrix, Vec<usize>, Vec<usize>, Vec<i64>, Vec<i64>)> {
        arb_instance().prop_flat_map(|h| {
            let n = h.order();
            let idx: Vec<usize> = (0..n).collect();
            (
                Just(h),
                Just(idx.clone()).prop_shuffle(),
                Just(idx).prop_shuffle(),
                prop::collection::vec(-50i64..50, n),
                prop::collection::vec(-50i64..50, n),
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn transforms_preserve_hadamard_property((h, rp, cp, rph, cph) in arb_transform()) {
            let t = h.monomial_transform(&rp, &cp, &rph, &cph).unwrap();
            prop_assert!(t.verify());
            let d = t.dephase().unwrap();
            prop_assert!(d.is_dephased());
            prop_assert!(d.verify());
            prop_assert_eq!(d.dephase().unwrap(), d.clone());
            // the dephased form only uses roots already present up to phases
            prop_assert_eq!(d.root_order(), h.root_order());
        }

        #[test]
        fn products_of_instances_verify(a in arb_instance(), b in arb_instance()) {
            let t = a.tensor(&b);
            prop_assert!(t.verify());
            prop_assert!(a.double().verify());
            prop_assert!(t.is_dephased());
        }

        #[test]
        fn order_constraints_of_real_and_turyn((h, rp, cp, rph, cph) in arb_transform()) {
            let t = h.monomial_transform(&rp, &cp, &rph, &cph).unwrap();
            match t.classify() {
                Classification::Real => prop_assert!(t.order() <= 2 || t.order() % 4 == 0),
                Classification::Turyn => prop_assert!(t.order() % 2 == 0),
                Classification::Butson(_) => {}
            }
        }
    }
}
