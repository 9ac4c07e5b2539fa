//! Exact arithmetic in the ring of cyclotomic integers `Z[zeta_r]`.
//!
//! Elements are kept in the redundant basis `1, zeta, ..., zeta^(r-1)`.
//! Nothing is reduced until a question about the value is asked
//! (equality, zero test, rationality), at which point the coefficient
//! polynomial is reduced modulo the cyclotomic polynomial `Phi_r`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CyclotomicError {
    #[error("root order must be at least 1")]
    InvalidOrder,
    #[error("coefficient vector has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("cannot combine elements of Z[zeta_{left}] and Z[zeta_{right}]")]
    OrderMismatch { left: usize, right: usize },
}

/// Ring operation selector for [`arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

/// An element `sum_j a_j zeta_r^j` with integer coefficients.
#[derive(Clone, Debug)]
pub struct CyclotomicInt {
    order: usize,
    coeffs: Vec<BigInt>,
}

impl CyclotomicInt {
    pub fn new(order: usize, coeffs: Vec<BigInt>) -> Result<Self, CyclotomicError> {
        if order == 0 {
            return Err(CyclotomicError::InvalidOrder);
        }
        if coeffs.len() != order {
            return Err(CyclotomicError::LengthMismatch {
                expected: order,
                got: coeffs.len(),
            });
        }
        Ok(Self { order, coeffs })
    }

    pub fn from_i64s(order: usize, coeffs: &[i64]) -> Result<Self, CyclotomicError> {
        Self::new(order, coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero(order: usize) -> Result<Self, CyclotomicError> {
        Self::new(order, vec![BigInt::zero(); order])
    }

    /// The rational integer `value` viewed inside `Z[zeta_order]`.
    pub fn integer(order: usize, value: impl Into<BigInt>) -> Result<Self, CyclotomicError> {
        let mut x = Self::zero(order)?;
        x.coeffs[0] = value.into();
        Ok(x)
    }

    /// `zeta_r^(k mod r)`.
    pub fn root_of_unity(r: usize, k: i64) -> Result<Self, CyclotomicError> {
        let mut x = Self::zero(r)?;
        x.coeffs[wrap(k, r)] = BigInt::one();
        Ok(x)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Adds `coeff * zeta^exp` in place.
    pub fn add_term(&mut self, exp: i64, coeff: &BigInt) {
        let idx = wrap(exp, self.order);
        self.coeffs[idx] += coeff;
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, CyclotomicError> {
        self.same_order(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            order: self.order,
            coeffs,
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, CyclotomicError> {
        self.same_order(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self {
            order: self.order,
            coeffs,
        })
    }

    /// Product; exponents add modulo the order.
    pub fn checked_mul(&self, other: &Self) -> Result<Self, CyclotomicError> {
        self.same_order(other)?;
        let r = self.order;
        let mut out = vec![BigInt::zero(); r];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                out[(i + j) % r] += a * b;
            }
        }
        Ok(Self {
            order: r,
            coeffs: out,
        })
    }

    /// Multiplication by `zeta^k`, a cyclic shift of the coefficients.
    pub fn mul_root(&self, k: i64) -> Self {
        let r = self.order;
        let shift = wrap(k, r);
        let mut out = vec![BigInt::zero(); r];
        for (i, a) in self.coeffs.iter().enumerate() {
            out[(i + shift) % r] = a.clone();
        }
        Self {
            order: r,
            coeffs: out,
        }
    }

    pub fn scale(&self, factor: &BigInt) -> Self {
        Self {
            order: self.order,
            coeffs: self.coeffs.iter().map(|a| a * factor).collect(),
        }
    }

    /// Complex conjugation: the coefficient of `zeta^j` moves to `zeta^(r-j)`.
    pub fn conjugate(&self) -> Self {
        let r = self.order;
        let mut out = vec![BigInt::zero(); r];
        for (j, a) in self.coeffs.iter().enumerate() {
            out[(r - j) % r] = a.clone();
        }
        Self {
            order: r,
            coeffs: out,
        }
    }

    /// Remainder of the coefficient polynomial modulo `Phi_r`, as the
    /// `phi(r)` coordinates in the power basis `1, zeta, ..., zeta^(phi(r)-1)`.
    /// This representation is unique.
    pub fn reduce(&self) -> Vec<BigInt> {
        let phi = cyclotomic_polynomial(self.order);
        let deg = phi.len() - 1;
        let mut rem = self.coeffs.clone();
        for top in (deg..rem.len()).rev() {
            let lead = std::mem::take(&mut rem[top]);
            if lead.is_zero() {
                continue;
            }
            // Phi_r is monic, so the quotient coefficient is `lead` itself.
            let base = top - deg;
            for (k, c) in phi.iter().enumerate().take(deg) {
                if !c.is_zero() {
                    rem[base + k] -= &lead * c;
                }
            }
        }
        rem.truncate(deg);
        rem
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero) || self.reduce().iter().all(Zero::is_zero)
    }

    /// The value as a rational number, if it is one.
    ///
    /// `Z[zeta] ∩ Q = Z`, so a rational value is always an integer and is
    /// returned as such.
    pub fn as_rational(&self) -> Option<BigInt> {
        let reduced = self.reduce();
        let mut it = reduced.into_iter();
        let constant = it.next().unwrap_or_default();
        if it.all(|c| c.is_zero()) {
            Some(constant)
        } else {
            None
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        let r = self.order as f64;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, a)| !a.is_zero())
            .map(|(j, a)| {
                let theta = std::f64::consts::TAU * j as f64 / r;
                Complex64::from_polar(a.to_f64().unwrap_or(f64::NAN), theta)
            })
            .sum()
    }

    fn same_order(&self, other: &Self) -> Result<(), CyclotomicError> {
        if self.order != other.order {
            return Err(CyclotomicError::OrderMismatch {
                left: self.order,
                right: other.order,
            });
        }
        Ok(())
    }
}

/// Elements of different orders never compare equal; no implicit embedding.
impl PartialEq for CyclotomicInt {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order
            && self
                .checked_sub(other)
                .map(|d| d.is_zero())
                .unwrap_or(false)
    }
}

impl Eq for CyclotomicInt {}

impl fmt::Display for CyclotomicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(q) = self.as_rational() {
            return write!(f, "{q}");
        }
        let mut first = true;
        for (j, a) in self.reduce().iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let sign = if a.is_negative() { "-" } else { "+" };
            let mag = a.abs();
            if first {
                if a.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match (j, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (_, true) => write!(f, "z{}^{j}", self.order)?,
                (_, false) => write!(f, "{mag}*z{}^{j}", self.order)?,
            }
        }
        Ok(())
    }
}

/// Ring arithmetic dispatcher.
pub fn arith(
    x: &CyclotomicInt,
    y: &CyclotomicInt,
    op: ArithOp,
) -> Result<CyclotomicInt, CyclotomicError> {
    match op {
        ArithOp::Add => x.checked_add(y),
        ArithOp::Sub => x.checked_sub(y),
        ArithOp::Mul => x.checked_mul(y),
    }
}

fn wrap(k: i64, r: usize) -> usize {
    k.rem_euclid(r as i64) as usize
}

/// Coefficients (constant term first) of the `r`-th cyclotomic polynomial.
///
/// Computed as `(x^r - 1) / prod_{d | r, d < r} Phi_d` by exact division and
/// memoised process-wide.
///
/// # Panics
/// If `r == 0`.
pub fn cyclotomic_polynomial(r: usize) -> Arc<[BigInt]> {
    assert!(r > 0, "cyclotomic polynomial of order 0");
    static CACHE: OnceLock<RwLock<HashMap<usize, Arc<[BigInt]>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(p) = cache.read().expect("poisoned cache").get(&r) {
        return p.clone();
    }
    let mut num = vec![BigInt::zero(); r + 1];
    num[0] = -BigInt::one();
    num[r] = BigInt::one();
    for d in (1..r).filter(|d| r.is_multiple_of(*d)) {
        let phi_d = cyclotomic_polynomial(d);
        num = exact_div_monic(&num, &phi_d);
    }
    let poly: Arc<[BigInt]> = num.into();
    cache
        .write()
        .expect("poisoned cache")
        .insert(r, poly.clone());
    poly
}

fn exact_div_monic(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let dd = den.len() - 1;
    let mut rem = num.to_vec();
    let mut quot = vec![BigInt::zero(); num.len() - dd];
    for top in (dd..rem.len()).rev() {
        let lead = std::mem::take(&mut rem[top]);
        if lead.is_zero() {
            continue;
        }
        let base = top - dd;
        for (k, c) in den.iter().enumerate().take(dd) {
            rem[base + k] -= &lead * c;
        }
        quot[base] = lead;
    }
    debug_assert!(rem.iter().all(Zero::is_zero), "division was not exact");
    quot
}

/// Euler's totient, the degree of `Phi_r`.
pub fn totient(r: usize) -> usize {
    cyclotomic_polynomial(r).len() - 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(order: usize, v: &[i64]) -> CyclotomicInt {
        CyclotomicInt::from_i64s(order, v).unwrap()
    }

    #[test]
    fn roots_of_unity_basis() {
        assert_eq!(
            CyclotomicInt::root_of_unity(4, 2).unwrap().coeffs(),
            c(4, &[0, 0, 1, 0]).coeffs()
        );
        assert_eq!(
            CyclotomicInt::root_of_unity(1, 0).unwrap().coeffs(),
            c(1, &[1]).coeffs()
        );
        assert_eq!(
            CyclotomicInt::root_of_unity(4, 6).unwrap().coeffs(),
            c(4, &[0, 0, 1, 0]).coeffs()
        );
        assert_eq!(
            CyclotomicInt::root_of_unity(0, 1).unwrap_err(),
            CyclotomicError::InvalidOrder
        );
    }

    #[test]
    fn known_cyclotomic_polynomials() {
        let as_i64 = |r| -> Vec<i64> {
            cyclotomic_polynomial(r)
                .iter()
                .map(|x| x.to_i64().unwrap())
                .collect()
        };
        assert_eq!(as_i64(1), vec![-1, 1]);
        assert_eq!(as_i64(2), vec![1, 1]);
        assert_eq!(as_i64(4), vec![1, 0, 1]);
        assert_eq!(as_i64(5), vec![1, 1, 1, 1, 1]);
        assert_eq!(as_i64(6), vec![1, -1, 1]);
        assert_eq!(as_i64(8), vec![1, 0, 0, 0, 1]);
        assert_eq!(as_i64(12), vec![1, 0, -1, 0, 1]);
        // first cyclotomic polynomial with a coefficient outside {-1, 0, 1}
        assert!(as_i64(105).contains(&-2));
        assert_eq!(totient(105), 48);
    }

    #[test]
    fn arithmetic_examples() {
        let i = CyclotomicInt::root_of_unity(4, 1).unwrap();
        let minus_i = CyclotomicInt::root_of_unity(4, 3).unwrap();
        let one = CyclotomicInt::integer(4, 1).unwrap();
        assert_eq!(arith(&i, &minus_i, ArithOp::Mul).unwrap(), one);

        let sum = arith(&i, &minus_i, ArithOp::Add).unwrap();
        assert_eq!(sum.coeffs(), c(4, &[0, 1, 0, 1]).coeffs());
        assert!(sum.is_zero());

        let a = c(5, &[1, 1, 0, 0, 0]);
        let b = c(5, &[1, 0, 0, 0, 1]);
        let prod = arith(&a, &b, ArithOp::Mul).unwrap();
        assert_eq!(prod, c(5, &[2, 1, 0, 0, 1]));
        let z = Complex64::from_polar(1.0, std::f64::consts::TAU / 5.0);
        let expected = (1.0 + z) * (1.0 + z.powu(4));
        assert!((prod.to_complex() - expected).norm() < 1e-12);
    }

    #[test]
    fn mismatched_orders_are_rejected() {
        let err = arith(&c(3, &[1, 0, 0]), &c(4, &[1, 0, 0, 0]), ArithOp::Add).unwrap_err();
        assert_eq!(err, CyclotomicError::OrderMismatch { left: 3, right: 4 });
        assert_ne!(c(3, &[1, 0, 0]), c(4, &[1, 0, 0, 0]));
    }

    #[test]
    fn conjugation() {
        let i = CyclotomicInt::root_of_unity(4, 1).unwrap();
        assert_eq!(i.conjugate().coeffs(), c(4, &[0, 0, 0, 1]).coeffs());
        let five = c(6, &[5, 0, 0, 0, 0, 0]);
        assert_eq!(five.conjugate().coeffs(), five.coeffs());
    }

    #[test]
    fn rationality() {
        assert_eq!(c(5, &[1, 1, 1, 1, 1]).as_rational(), Some(BigInt::zero()));
        assert_eq!(c(3, &[0, 1, 0]).as_rational(), None);
        // a_j = a_{r/2 + j} for j >= 1 forces a rational value when r = 8
        for a1 in [-3i64, 0, 2, 7] {
            let x = c(8, &[4, a1, 0, 0, 0, a1, 0, 0]);
            assert_eq!(x.as_rational(), Some(BigInt::from(4)));
        }
        // 2 - zeta_6 - zeta_6^5 = 2 - 2cos(pi/3) = 1
        assert_eq!(c(6, &[2, -1, 0, 0, 0, -1]).as_rational(), Some(BigInt::one()));
    }

    #[test]
    fn display_is_readable() {
        assert_eq!(c(4, &[3, 0, 0, 0]).to_string(), "3");
        assert_eq!(c(5, &[2, -1, 0, 0, -1]).to_string(), "3 + z5^2 + z5^3");
        assert_eq!(c(3, &[0, 1, 0]).to_string(), "z3^1");
    }

    fn arb_elem(order: usize) -> impl Strategy<Value = CyclotomicInt> {
        prop::collection::vec(-20i64..20, order).prop_map(move |v| c(order, &v))
    }

    fn arb_triple() -> impl Strategy<Value = (CyclotomicInt, CyclotomicInt, CyclotomicInt)> {
        (1usize..=16).prop_flat_map(|r| (arb_elem(r), arb_elem(r), arb_elem(r)))
    }

    proptest! {
        #[test]
        fn conjugation_is_an_involution(x in (1usize..=16).prop_flat_map(arb_elem)) {
            let twice = x.conjugate().conjugate();
            prop_assert_eq!(twice.coeffs(), x.coeffs());
        }

        #[test]
        fn ring_laws_hold_exactly((x, y, z) in arb_triple()) {
            let xy_z = x.checked_mul(&y).unwrap().checked_mul(&z).unwrap();
            let x_yz = x.checked_mul(&y.checked_mul(&z).unwrap()).unwrap();
            prop_assert_eq!(&xy_z, &x_yz);
            let lhs = x.checked_mul(&y.checked_add(&z).unwrap()).unwrap();
            let rhs = x.checked_mul(&y).unwrap().checked_add(&x.checked_mul(&z).unwrap()).unwrap();
            prop_assert_eq!(&lhs, &rhs);
            prop_assert_eq!(x.checked_add(&y).unwrap(), y.checked_add(&x).unwrap());
        }

        #[test]
        fn to_complex_is_a_ring_homomorphism((x, y, _z) in arb_triple()) {
            let s = x.checked_add(&y).unwrap().to_complex();
            let p = x.checked_mul(&y).unwrap().to_complex();
            prop_assert!((s - (x.to_complex() + y.to_complex())).norm() < 1e-9);
            prop_assert!((p - x.to_complex() * y.to_complex()).norm() < 1e-9);
        }

        #[test]
        fn rational_values_agree_with_float(x in (1usize..=16).prop_flat_map(arb_elem)) {
            if let Some(q) = x.as_rational() {
                let z = x.to_complex();
                prop_assert!(z.im.abs() < 1e-9);
                prop_assert!((z.re - q.to_f64().unwrap()).abs() < 1e-9);
            }
        }

        #[test]
        fn prime_order_rational_sums_have_flat_tail(
            p in prop::sample::select(vec![2usize, 3, 5, 7, 11, 13]),
            a0 in -10i64..10,
            flat in -10i64..10,
            bump in -3i64..3,
            pos in 1usize..13,
        ) {
            let mut v = vec![flat; p];
            v[0] = a0;
            let pos = 1 + pos % (p - 1).max(1);
            let perturbed = pos < p && bump != 0;
            if perturbed {
                v[pos] += bump;
            }
            let x = c(p, &v);
            let z = x.to_complex();
            let float_rational = z.im.abs() < 1e-9 && (z.re - z.re.round()).abs() < 1e-9;
            prop_assert_eq!(x.as_rational().is_some(), float_rational);
            prop_assert_eq!(x.as_rational().is_some(), !perturbed || p == 2);
        }

        #[test]
        fn power_of_two_symmetric_coefficients_are_rational(
            m in 1u32..=4,
            coeffs in prop::collection::vec(-10i64..10, 16),
        ) {
            let r = 1usize << m;
            let half = r / 2;
            let mut v = vec![0i64; r];
            v[0] = coeffs[0];
            v[half] = coeffs[half % 16];
            for j in 1..half {
                v[j] = coeffs[j];
                v[half + j] = coeffs[j];
            }
            prop_assert!(c(r, &v).as_rational().is_some());
        }
    }
}
