//! Small exact and floating-point linear algebra helpers.

use nalgebra::{DMatrix, SymmetricEigen};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};

/// Characteristic polynomial `det(xI - M)` of an integer matrix, as
/// coefficients `c_0, ..., c_n` (so `c_n = 1`), by Faddeev–LeVerrier.
/// Every division in the recurrence is exact over the integers.
pub fn charpoly(m: &[BigInt], n: usize) -> Vec<BigInt> {
    assert_eq!(m.len(), n * n, "matrix must be n x n");
    let mut coeffs = vec![BigInt::zero(); n + 1];
    coeffs[n] = BigInt::from(1);
    // mk holds M_k; starts at M_0 = 0.
    let mut mk = vec![BigInt::zero(); n * n];
    for k in 1..=n {
        let mut next = matmul(m, &mk, n);
        for i in 0..n {
            next[i * n + i] += &coeffs[n - k + 1];
        }
        let am = matmul(m, &next, n);
        let trace: BigInt = (0..n).map(|i| &am[i * n + i]).sum();
        coeffs[n - k] = -(trace / BigInt::from(k));
        mk = next;
    }
    coeffs
}

fn matmul(a: &[BigInt], b: &[BigInt], n: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); n * n];
    for i in 0..n {
        for k in 0..n {
            let x = &a[i * n + k];
            if x.is_zero() {
                continue;
            }
            for j in 0..n {
                let y = &b[k * n + j];
                if !y.is_zero() {
                    out[i * n + j] += x * y;
                }
            }
        }
    }
    out
}

/// Integer roots of a polynomial with multiplicity, plus the degree of
/// the cofactor left after dividing them out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerRoots {
    pub roots: Vec<BigInt>,
    pub residual_degree: usize,
}

/// Finds every integer root of absolute value at most `bound`.
pub fn integer_roots(poly: &[BigInt], bound: &BigInt) -> IntegerRoots {
    let mut p: Vec<BigInt> = poly.to_vec();
    while p.len() > 1 && p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    let mut roots = Vec::new();
    let mut x = -bound.clone();
    while &x <= bound && p.len() > 1 {
        match divide_root(&p, &x) {
            Some(q) => {
                roots.push(x.clone());
                p = q;
            }
            None => x += 1,
        }
    }
    IntegerRoots {
        roots,
        residual_degree: p.len() - 1,
    }
}

/// Synthetic division by `(x - root)`; `None` if the remainder is nonzero.
fn divide_root(p: &[BigInt], root: &BigInt) -> Option<Vec<BigInt>> {
    let deg = p.len() - 1;
    let mut q = vec![BigInt::zero(); deg];
    let mut carry = BigInt::zero();
    for i in (0..=deg).rev() {
        let v = &p[i] + &carry * root;
        if i == 0 {
            return v.is_zero().then_some(q);
        }
        q[i - 1] = v.clone();
        carry = v;
    }
    unreachable!()
}

/// Sorted integer eigenvalues of a symmetric integer matrix, or `None`
/// when some eigenvalue is not an integer.
pub fn integer_spectrum(m: &[BigInt], n: usize) -> Option<Vec<BigInt>> {
    let bound = (0..n)
        .map(|i| m[i * n..(i + 1) * n].iter().map(|x| x.abs()).sum::<BigInt>())
        .max()
        .unwrap_or_default();
    let found = integer_roots(&charpoly(m, n), &bound);
    (found.residual_degree == 0).then_some(found.roots)
}

/// Ascending eigenvalues of a real symmetric matrix.
pub fn symmetric_eigenvalues(m: &[f64], n: usize) -> Vec<f64> {
    if n == 0 {
        return Vec::new();
    }
    let mat = DMatrix::from_row_slice(n, n, m);
    let mut vals: Vec<f64> = SymmetricEigen::new(mat).eigenvalues.iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    vals
}
