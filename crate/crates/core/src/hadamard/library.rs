//! A small built-in catalogue of explicit complex Hadamard matrices.
//!
//! For an order `n` this collects character tables of every abelian group
//! of order `n`, Sylvester matrices, conference lifts, and the doubles and
//! tensor products of smaller instances. Every entry is dephased and
//! verified; duplicates (after reduction to the minimal root order) are
//! dropped, keeping the first name generated.

use std::collections::HashSet;

use super::{character_table, conference_lift, is_prime, paley_conference, ButsonMatrix};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedMatrix {
    pub name: String,
    pub matrix: ButsonMatrix,
}

/// Instances of order `n`, in a fixed deterministic order.
pub fn instances(n: usize) -> Vec<NamedMatrix> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    let mut push = |name: String, m: ButsonMatrix| {
        let m = m.minimal_root_form();
        debug_assert!(m.verify() && m.is_dephased(), "{name}");
        if seen.insert(m.clone()) {
            out.push(NamedMatrix { name, matrix: m });
        }
    };

    if n.is_power_of_two() {
        let d = n.trailing_zeros() as usize;
        push(format!("sylvester({d})"), ButsonMatrix::sylvester(d));
    }
    for moduli in abelian_groups(n) {
        let label = moduli.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(",");
        push(
            format!("character_table({label})"),
            character_table(&moduli).expect("valid moduli"),
        );
    }
    if n == 2 {
        push(
            "conference_lift(order 2)".into(),
            conference_lift(&[vec![0, 1], vec![1, 0]]).expect("order-2 conference matrix"),
        );
    }
    if n >= 6 && is_prime(n - 1) && (n - 1) % 4 == 1 {
        let c = paley_conference(n - 1).expect("Paley prime");
        push(
            format!("conference_lift(paley {})", n - 1),
            conference_lift(&c).expect("Paley conference matrix"),
        );
    }
    if n.is_multiple_of(2) && n >= 2 {
        for inner in instances(n / 2) {
            push(format!("double({})", inner.name), inner.matrix.double());
        }
    }
    for a in 2..n {
        if !n.is_multiple_of(a) || a * a > n {
            continue;
        }
        let b = n / a;
        for left in instances(a) {
            for right in instances(b) {
                push(
                    format!("tensor({}, {})", left.name, right.name),
                    left.matrix.tensor(&right.matrix),
                );
                if a != b {
                    push(
                        format!("tensor({}, {})", right.name, left.name),
                        right.matrix.tensor(&left.matrix),
                    );
                }
            }
        }
    }
    out
}

/// Abelian groups of order `n` as lists of cyclic moduli: every
/// elementary-divisor decomposition, plus the cyclic group `Z_n` itself.
pub fn abelian_groups(n: usize) -> Vec<Vec<usize>> {
    if n == 1 {
        return vec![vec![1]];
    }
    let mut per_prime: Vec<Vec<Vec<usize>>> = Vec::new();
    let mut rest = n;
    let mut p = 2;
    while rest > 1 {
        if rest.is_multiple_of(p) {
            let mut e = 0;
            while rest.is_multiple_of(p) {
                rest /= p;
                e += 1;
            }
            per_prime.push(
                partitions(e)
                    .into_iter()
                    .map(|parts| parts.into_iter().map(|k| p.pow(k as u32)).collect())
                    .collect(),
            );
        }
        p += 1;
    }
    let mut groups: Vec<Vec<usize>> = vec![vec![]];
    for options in per_prime {
        groups = groups
            .into_iter()
            .flat_map(|g| {
                options.iter().map(move |o| {
                    let mut h = g.clone();
                    h.extend(o);
                    h
                })
            })
            .collect();
    }
    if !groups.contains(&vec![n]) {
        groups.insert(0, vec![n]);
    }
    groups
}

/// Integer partitions of `e`, parts in non-increasing order.
fn partitions(e: usize) -> Vec<Vec<usize>> {
    fn go(rem: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rem == 0 {
            out.push(cur.clone());
            return;
        }
        for part in (1..=rem.min(max)).rev() {
            cur.push(part);
            go(rem - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(e, e, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hadamard::Classification;

    #[test]
    fn group_enumeration() {
        assert_eq!(abelian_groups(8), vec![vec![8], vec![4, 2], vec![2, 2, 2]]);
        assert_eq!(abelian_groups(6), vec![vec![6], vec![2, 3]]);
        assert_eq!(abelian_groups(12).len(), 3);
        assert_eq!(abelian_groups(1), vec![vec![1]]);
    }

    #[test]
    fn library_contents() {
        for n in 1..=12 {
            let lib = instances(n);
            assert!(!lib.is_empty(), "order {n}");
            for inst in &lib {
                assert_eq!(inst.matrix.order(), n);
                assert!(inst.matrix.verify(), "{}", inst.name);
                assert!(inst.matrix.is_dephased(), "{}", inst.name);
            }
        }
        let six = instances(6);
        assert!(six.iter().any(|m| m.matrix.classify() == Classification::Turyn));
        let eight = instances(8);
        assert_eq!(eight[0].name, "sylvester(3)");
        assert!(eight.iter().any(|m| m.matrix.classify() == Classification::Turyn));
    }
}
