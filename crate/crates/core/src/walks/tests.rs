use super::*;
use crate::graphs::{complement, named, Family};
use crate::hadamard::character_table;
use proptest::prelude::*;
use std::f64::consts::{PI, TAU};

fn angle(p: i64, q: i64) -> RationalAngle {
    RationalAngle::new(p, q).unwrap()
}

fn lap(g: &WeightedGraph, h: &ButsonMatrix) -> SpectrumAssignment {
    certify(g, h, Target::Laplacian).unwrap().unwrap()
}

fn cocktail(n: usize) -> (WeightedGraph, ButsonMatrix) {
    (named(&Family::Cocktail(n)).unwrap(), character_table(&[2 * n]).unwrap())
}

fn cube(d: usize) -> (WeightedGraph, ButsonMatrix) {
    (named(&Family::Hypercube(d)).unwrap(), ButsonMatrix::sylvester(d))
}

fn k(n: usize) -> WeightedGraph {
    named(&Family::Complete(n)).unwrap()
}

/// Independent oracle: exp(-itL) through a dense symmetric eigensolver.
fn oracle_evolve(g: &WeightedGraph, t: f64) -> DMatrix<Complex64> {
    let n = g.order();
    let l: Vec<f64> = g.laplacian().iter().map(crate::diagonalise::rational_to_f64).collect();
    let eig = nalgebra::SymmetricEigen::new(DMatrix::from_row_slice(n, n, &l));
    let v = eig.eigenvectors.map(|x| Complex64::new(x, 0.0));
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|x| Complex64::from_polar(1.0, -t * x)));
    &v * d * v.adjoint()
}

#[test]
fn angle_arithmetic() {
    assert_eq!(angle(7, 6), angle(1, 6));
    assert_eq!(angle(-1, 6), angle(5, 6));
    assert_eq!(RationalAngle::of_pi(1, 3).unwrap(), angle(1, 6));
    assert_eq!(angle(5, 6).to_string(), "-1/6 of 2pi");
    assert_eq!(angle(1, 2).to_string(), "1/2 of 2pi");
    assert_eq!("1/6 of 2pi".parse::<RationalAngle>().unwrap(), angle(1, 6));
    assert_eq!("1/3 pi".parse::<RationalAngle>().unwrap(), angle(1, 6));
    assert_eq!("-1/4".parse::<RationalAngle>().unwrap(), angle(3, 4));
    assert!("x/2".parse::<RationalAngle>().is_err());
    assert!(RationalAngle::new(1, 0).is_err());
    assert_eq!(angle(1, 6).add(&angle(1, 3)), angle(1, 2));
    assert_eq!(angle(1, 6).times(&BigInt::from(4)), angle(2, 3));
    // Modulo half a turn into (-1/4, 1/4].
    assert_eq!(angle(1, 3).mod_pi().signed(), (-1, 6));
    assert_eq!(angle(1, 4).mod_pi().signed(), (1, 4));
    assert_eq!(angle(3, 4).mod_pi().signed(), (1, 4));
    assert_eq!(angle(1, 2).mod_pi(), RationalAngle::zero());
    assert_eq!(angle(2, 5).mod_pi().signed(), (-1, 10));
}

#[test]
fn angle_json_forms() {
    let a: RationalAngle = serde_json::from_str("\"1/6 of 2pi\"").unwrap();
    let b: RationalAngle = serde_json::from_str("{\"num\": 7, \"den\": 6}").unwrap();
    assert_eq!(a, b);
    assert_eq!(serde_json::to_string(&angle(5, 6)).unwrap(), "\"-1/6 of 2pi\"");
}

#[test]
fn alpha_beta_identities() {
    for (p, q) in [(1, 4), (1, 6), (-1, 6), (1, 10), (1, 8)] {
        let (alpha, beta) = alpha_beta(&angle(p, q));
        let g = angle(p, q).radians();
        assert!((alpha + beta - 1.0).norm() < 1e-12);
        assert!((alpha.norm_sqr() + beta.norm_sqr() - 1.0).abs() < 1e-12);
        assert!((alpha - beta - Complex64::from_polar(1.0, 2.0 * g)).norm() < 1e-12);
    }
    let (alpha, beta) = alpha_beta(&angle(1, 4));
    assert!(alpha.norm() < 1e-12 && (beta.norm() - 1.0).abs() < 1e-12);
}

#[test]
fn evolve_basics() {
    let (g, h) = cube(3);
    let s = lap(&g, &h);
    let id = DMatrix::<Complex64>::identity(8, 8);
    assert!(max_abs_diff(&evolve(&h, &s, 0.0), &id) < 1e-12);
    for t in [0.3, 1.0, 2.5] {
        assert!(max_abs_diff(&evolve(&h, &s, t), &oracle_evolve(&g, t)) < 1e-9);
    }

    let k2 = k(2);
    let h2 = ButsonMatrix::sylvester(1);
    let u = evolve(&h2, &lap(&k2, &h2), PI / 2.0);
    // L = [[1,-1],[-1,1]] gives U(t) = e^{-it}[[cos t, i sin t],[i sin t, cos t]].
    let closed = Complex64::from_polar(1.0, -PI / 2.0) * Complex64::i();
    assert!((u[(1, 0)] - closed).norm() < 1e-12);
    assert!(u[(0, 0)].norm() < 1e-12);

    let col = evolve_column(&h, &s, 0.7, 3);
    let full = evolve(&h, &s, 0.7);
    for (u, z) in col.iter().enumerate() {
        assert!((z - full[(u, 3)]).norm() < 1e-12);
    }
}

#[test]
fn cocktail_revival_amplitudes() {
    let (g, h) = cocktail(3);
    let s = lap(&g, &h);
    let col = evolve_column(&h, &s, PI / 3.0, 0);
    let (alpha, beta) = alpha_beta(&RationalAngle::of_pi(1, 3).unwrap());
    assert!((col[0] - alpha).norm() < 1e-9);
    assert!((col[3] - beta).norm() < 1e-9);
    for u in [1, 2, 4, 5] {
        assert!(col[u].norm() < 1e-9);
    }
}

#[test]
fn strong_cospectrality() {
    let (_, h) = cube(3);
    assert_eq!(strongly_cospectral(&h, 5, 5), Some(vec![1; 8]));
    let sigma = strongly_cospectral(&h, 0, 7).unwrap();
    let parity: Vec<i8> = (0..8u32).map(|j| if j.count_ones() % 2 == 0 { 1 } else { -1 }).collect();
    assert_eq!(sigma, parity);
    let z3 = character_table(&[3]).unwrap();
    assert_eq!(strongly_cospectral(&z3, 0, 1), None);
    assert_eq!(strongly_cospectral(&z3, 1, 2), None);
    // In Z_6, rows 0 and 1 differ by a primitive sixth root.
    let z6 = character_table(&[6]).unwrap();
    assert_eq!(strongly_cospectral(&z6, 0, 1), None);
    assert!(strongly_cospectral(&z6, 1, 4).is_some());
}

#[test]
fn cocktail_phase_sign() {
    for n in 3..=6usize {
        let (g, h) = cocktail(n);
        let s = lap(&g, &h);
        let n_i = n as i64;
        let tau = RationalAngle::of_pi(1, n_i).unwrap();
        let plus = RationalAngle::of_pi(1, n_i).unwrap();
        let minus = RationalAngle::of_pi(-1, n_i).unwrap();
        for a in 0..n {
            assert!(check_fr(&h, &s, a, a + n, &tau, &plus).unwrap(), "n={n}");
            assert!(!check_fr(&h, &s, a, a + n, &tau, &minus).unwrap(), "n={n}");
        }
        // The negative phase belongs to the time 2π - π/n.
        let late = RationalAngle::of_pi(2 * n_i - 1, n_i).unwrap();
        assert!(check_fr(&h, &s, 0, n, &late, &minus).unwrap());
        assert!(!check_fr(&h, &s, 0, n, &RationalAngle::zero(), &plus).unwrap());
    }
}

#[test]
fn fr_rejects_trivial_and_non_integer() {
    let (g, h) = cube(3);
    let s = lap(&g, &h);
    assert!(!check_fr(&h, &s, 0, 7, &RationalAngle::zero(), &angle(1, 4)).unwrap());
    assert!(!check_fr(&h, &s, 0, 0, &angle(1, 4), &angle(1, 4)).unwrap());
    assert!(!check_fr(&h, &s, 0, 7, &angle(1, 4), &RationalAngle::zero()).unwrap());
    assert!(matches!(check_fr(&h, &s, 0, 8, &angle(1, 4), &angle(1, 4)), Err(WalkError::BadVertex(8))));

    let c5 = named(&Family::Cycle(5)).unwrap();
    let z5 = character_table(&[5]).unwrap();
    let s5 = lap(&c5, &z5);
    assert!(matches!(
        check_fr(&z5, &s5, 0, 1, &angle(1, 4), &angle(1, 4)),
        Err(WalkError::NonIntegerSpectrum(_))
    ));
    assert!(matches!(find_fr(&z5, &s5), Err(WalkError::NonIntegerSpectrum(_))));
}

#[test]
fn pst_examples() {
    let k2 = k(2);
    let h2 = ButsonMatrix::sylvester(1);
    assert!(check_pst(&h2, &lap(&k2, &h2), 0, 1, &angle(1, 4)).unwrap());

    let (q3, h) = cube(3);
    let s = lap(&q3, &h);
    assert!(check_pst(&h, &s, 0, 7, &angle(1, 4)).unwrap());
    assert!(check_pst(&h, &s, 7, 0, &angle(1, 4)).unwrap());
    assert!(!check_pst(&h, &s, 0, 3, &angle(1, 4)).unwrap());

    let q3c = complement(&q3).unwrap();
    let cover = double_cover(&q3c, &q3).unwrap();
    let dh = h.double();
    let sc = lap(&cover, &dh);
    for a in 0..8 {
        assert!(check_pst(&dh, &sc, a, a + 8, &angle(1, 4)).unwrap());
    }
}

#[test]
fn double_cover_of_complete_graph() {
    for n in 3..=6usize {
        let g1 = WeightedGraph::empty(n);
        let g2 = k(n);
        let h = character_table(&[n]).unwrap();
        let tau = angle(1, n as i64);
        let gamma = double_cover_fr(&g1, &g2, &h, &tau).unwrap().expect("revival");
        assert_eq!(gamma, tau.mod_pi(), "n={n}");
        let cover = double_cover(&g1, &g2).unwrap();
        let dh = h.double();
        assert!(check_fr(&dh, &lap(&cover, &dh), 0, n, &tau, &gamma).unwrap());
    }
    // n = 4 is perfect state transfer.
    let h = character_table(&[4]).unwrap();
    let gamma = double_cover_fr(&WeightedGraph::empty(4), &k(4), &h, &angle(1, 4)).unwrap();
    assert_eq!(gamma, Some(angle(1, 4)));
    // Congruence failure.
    let h = character_table(&[3]).unwrap();
    assert_eq!(double_cover_fr(&WeightedGraph::empty(3), &k(3), &h, &angle(1, 4)).unwrap(), None);
}

#[test]
fn double_cover_of_cube() {
    let (q3, h) = cube(3);
    let q3c = complement(&q3).unwrap();
    assert_eq!(double_cover_fr(&q3c, &q3, &h, &angle(1, 4)).unwrap(), Some(angle(1, 4)));
    assert_eq!(double_cover_fr(&q3c, &q3, &h, &angle(1, 8)).unwrap(), None);
    let c5 = named(&Family::Cycle(5)).unwrap();
    assert!(matches!(
        double_cover_fr(&q3c, &c5, &h, &angle(1, 4)),
        Err(WalkError::Diagonalise(_))
    ));
}

#[test]
fn find_fr_examples() {
    let (g, h) = cocktail(3);
    let certs = find_fr(&h, &lap(&g, &h)).unwrap();
    for a in 0..3 {
        assert!(certs
            .iter()
            .any(|c| c.a == a && c.b == a + 3 && c.tau == angle(1, 6) && c.gamma == angle(1, 6)));
        assert!(certs
            .iter()
            .any(|c| c.a == a && c.b == a + 3 && c.tau == angle(5, 6) && c.gamma == angle(-1, 6)));
    }
    let k3 = k(3);
    let z3 = character_table(&[3]).unwrap();
    assert!(find_fr(&z3, &lap(&k3, &z3)).unwrap().is_empty());

    let (q3, h) = cube(3);
    let certs = find_fr(&h, &lap(&q3, &h)).unwrap();
    assert!(certs.iter().any(|c| c.a == 0 && c.b == 7 && c.tau == angle(1, 4) && c.is_pst()));
    let keys: Vec<(usize, usize, i64, i64)> = certs.iter().map(|c| (c.a, c.b, c.tau.den(), c.tau.num())).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
}

#[test]
fn find_fr_certificates_are_consistent() {
    let cases = [cocktail(3), cocktail(4), cube(3), cube(2), (k(2), ButsonMatrix::sylvester(1))];
    for (g, h) in cases {
        let s = lap(&g, &h);
        let certs = find_fr(&h, &s).unwrap();
        assert!(!certs.is_empty());
        for c in &certs {
            assert!(strongly_cospectral(&h, c.a, c.b).is_some());
            assert!(check_fr(&h, &s, c.a, c.b, &c.tau, &c.gamma).unwrap());
            assert!(check_fr(&h, &s, c.b, c.a, &c.tau, &c.gamma).unwrap());
            assert!((c.alpha + c.beta - 1.0).norm() < 1e-12);
            assert!(c.beta.norm() > 1e-9);
            let (gp, gq) = c.gamma.signed();
            assert!(-gq < 4 * gp && 4 * gp <= gq);
            let u = oracle_evolve(&g, c.tau.radians().rem_euclid(TAU));
            assert!((u[(c.a, c.a)] - c.alpha).norm() < 1e-9);
            assert!((u[(c.b, c.a)] - c.beta).norm() < 1e-9);
        }
    }
}

#[test]
fn pst_periodicity() {
    let (g, h) = cube(3);
    let s = lap(&g, &h);
    let tau = angle(1, 4);
    assert!(check_pst(&h, &s, 0, 7, &tau).unwrap());
    let col = evolve_column(&h, &s, 2.0 * tau.radians(), 0);
    assert!((col[0].norm() - 1.0).abs() < 1e-9);
}

#[test]
fn cayley_conditions() {
    let cube_group = AbelianGroup::new(vec![2, 2, 2]).unwrap();
    let conn = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]];
    let r = cayley_fr_conditions(&cube_group, &conn, &[1, 1, 1], &[0, 0, 0], &angle(1, 4)).unwrap();
    assert!(r.order_two && r.integer_spectrum && r.holds);
    assert_eq!(r.gamma, Some(angle(1, 4)));

    let z6 = AbelianGroup::new(vec![6]).unwrap();
    let conn: Vec<Vec<usize>> = [1, 2, 4, 5].iter().map(|&c| vec![c]).collect();
    let r = cayley_fr_conditions(&z6, &conn, &[2], &[0], &angle(1, 6)).unwrap();
    assert!(!r.order_two && !r.holds);

    for n in 3..=6usize {
        let group = AbelianGroup::new(vec![2 * n]).unwrap();
        let conn: Vec<Vec<usize>> = (1..2 * n).filter(|&c| c != n).map(|c| vec![c]).collect();
        let tau = RationalAngle::of_pi(1, n as i64).unwrap();
        let r = cayley_fr_conditions(&group, &conn, &[n], &[0], &tau).unwrap();
        assert!(r.holds, "n={n}");
        let (g, h) = cocktail(n);
        let gamma = r.gamma.unwrap();
        assert!(check_fr(&h, &lap(&g, &h), n, 0, &tau, &gamma).unwrap());
        // A time with β = 0 fails the last condition.
        let r = cayley_fr_conditions(&group, &conn, &[n], &[0], &RationalAngle::zero()).unwrap();
        assert!(r.phase_identity && !r.beta_nonzero && !r.holds);
    }
}

#[test]
fn adjacency_relation() {
    let h4 = character_table(&[4]).unwrap();
    let k4 = k(4);
    let s = lap(&k4, &h4);
    assert!(adjacency_walk_relation(&k4, &h4, &s, 0.0).unwrap());
    assert!(adjacency_walk_relation(&k4, &h4, &s, PI / 3.0).unwrap());
    let path = WeightedGraph::unweighted(3, [(0usize, 1usize), (1, 2)]).unwrap();
    let z3 = character_table(&[3]).unwrap();
    assert!(adjacency_walk_relation(&path, &z3, &s, 1.0).is_err());
}

fn walk_cases() -> Vec<(WeightedGraph, ButsonMatrix)> {
    vec![cube(3), cocktail(3), (k(4), character_table(&[4]).unwrap()), (named(&Family::Cycle(6)).unwrap(), character_table(&[6]).unwrap())]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn evolution_is_unitary(case in 0usize..4, t in 0.0..TAU) {
        let (g, h) = &walk_cases()[case];
        let u = evolve(h, &lap(g, h), t);
        let n = g.order();
        prop_assert!(max_abs_diff(&(&u * u.adjoint()), &DMatrix::identity(n, n)) < 1e-9);
    }

    #[test]
    fn evolution_group_law(case in 0usize..4, t1 in 0.0..TAU, t2 in 0.0..TAU) {
        let (g, h) = &walk_cases()[case];
        let s = lap(g, h);
        let lhs = evolve(h, &s, t1) * evolve(h, &s, t2);
        prop_assert!(max_abs_diff(&lhs, &evolve(h, &s, t1 + t2)) < 1e-9);
    }

    #[test]
    fn adjacency_relation_on_cube(t in 0.0..TAU) {
        let (g, h) = cube(3);
        let s = lap(&g, &h);
        prop_assert!(adjacency_walk_relation(&g, &h, &s, t).unwrap());
    }

    #[test]
    fn fr_symmetric_in_endpoints(a in 0usize..8, b in 0usize..8, p in 0i64..24, gp in -5i64..6) {
        let (g, h) = cube(3);
        let s = lap(&g, &h);
        let tau = angle(p, 24);
        let gamma = angle(gp, 24);
        prop_assert_eq!(
            check_fr(&h, &s, a, b, &tau, &gamma).unwrap(),
            check_fr(&h, &s, b, a, &tau, &gamma).unwrap()
        );
    }

    #[test]
    fn mod_pi_is_a_half_turn_reduction(p in -100i64..100, q in 1i64..30) {
        let x = angle(p, q);
        let y = x.mod_pi();
        let (yp, yq) = y.signed();
        prop_assert!(-yq < 4 * yp && 4 * yp <= yq);
        prop_assert_eq!(x.times(&BigInt::from(2)), y.times(&BigInt::from(2)));
    }
}
