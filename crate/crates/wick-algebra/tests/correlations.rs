use num_complex::Complex64;
use propagators::{kms_two_point, FieldParams};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use wick_algebra::*;

/// Sum over perfect matchings of labelled legs with no same-vertex pair.
fn pairing_oracle(powers: &[u32], table: &ContractionTable) -> Complex64 {
    let legs: Vec<usize> = powers.iter().enumerate().flat_map(|(v, &a)| std::iter::repeat(v).take(a as usize)).collect();
    fn rec(legs: &[usize], used: &mut Vec<bool>, table: &ContractionTable) -> Complex64 {
        let Some(first) = used.iter().position(|&u| !u) else {
            return Complex64::new(1.0, 0.0);
        };
        used[first] = true;
        let mut acc = Complex64::new(0.0, 0.0);
        for k in first + 1..legs.len() {
            if used[k] || legs[k] == legs[first] {
                continue;
            }
            used[k] = true;
            acc += table.get(legs[first], legs[k]) * rec(legs, used, table);
            used[k] = false;
        }
        used[first] = false;
        acc
    }
    rec(&legs, &mut vec![false; legs.len()], table)
}

/// Distinct multigraphs reached by leg pairings.
fn pairing_graphs(powers: &[u32]) -> BTreeSet<Vec<u32>> {
    let n = powers.len();
    let legs: Vec<usize> = powers.iter().enumerate().flat_map(|(v, &a)| std::iter::repeat(v).take(a as usize)).collect();
    let mut out = BTreeSet::new();
    fn rec(legs: &[usize], used: &mut Vec<bool>, counts: &mut Vec<u32>, n: usize, out: &mut BTreeSet<Vec<u32>>) {
        let Some(first) = used.iter().position(|&u| !u) else {
            out.insert(counts.clone());
            return;
        };
        used[first] = true;
        for k in first + 1..legs.len() {
            if used[k] || legs[k] == legs[first] {
                continue;
            }
            used[k] = true;
            let (i, j) = (legs[first].min(legs[k]), legs[first].max(legs[k]));
            counts[i * n + j] += 1;
            rec(legs, used, counts, n, out);
            counts[i * n + j] -= 1;
            used[k] = false;
        }
        used[first] = false;
    }
    rec(&legs, &mut vec![false; legs.len()], &mut vec![0; n * n], n, &mut out);
    out
}

fn as_counts(g: &Multigraph) -> Vec<u32> {
    let n = g.vertex_count();
    let mut v = vec![0; n * n];
    for ((i, j), l) in g.edges() {
        v[i * n + j] = l;
    }
    v
}

fn random_table(rng: &mut ChaCha8Rng, n: usize) -> ContractionTable {
    ContractionTable::from_fn(n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

#[test]
fn enumeration_matches_pairing_quotient() {
    for powers in [vec![2, 2, 2], vec![1, 1, 1, 1], vec![4, 4], vec![2, 4, 4], vec![3, 1, 2, 2], vec![4, 4, 4, 4], vec![1, 3]] {
        let enumerated: BTreeSet<Vec<u32>> = enumerate_graphs(&powers).iter().map(as_counts).collect();
        assert_eq!(enumerated.len(), enumerate_graphs(&powers).len());
        assert_eq!(enumerated, pairing_graphs(&powers), "powers {powers:?}");
    }
}

#[test]
fn graph_sum_matches_pairing_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let n = rng.gen_range(1..=4);
        let powers: Vec<u32> = (0..n).map(|_| rng.gen_range(0..=4)).collect();
        let table = random_table(&mut rng, n);
        let a = full_from_table(&powers, &table);
        let b = pairing_oracle(&powers, &table);
        assert!((a - b).norm() <= 1e-12 * b.norm().max(1.0), "{powers:?}: {a} vs {b}");
    }
}

#[test]
fn pairing_count_with_unit_contractions() {
    // 2k distinct :φ: factors: (2k-1)!! pairings
    for k in 1..=4usize {
        let powers = vec![1; 2 * k];
        let table = ContractionTable::from_fn(2 * k, |_, _| Complex64::new(1.0, 0.0));
        let double_fact: f64 = (1..2 * k).step_by(2).map(|x| x as f64).product();
        assert_eq!(full_from_table(&powers, &table).re, double_fact);
    }
}

fn point(label: usize, power: u32, u: f64, x: [f64; 3]) -> WickMonomial {
    WickMonomial::new(label, power, 0.0, u, x)
}

#[test]
fn textbook_cases() {
    let state = FieldParams::thermal(1.0, 2.0);
    let d = |a: &WickMonomial, b: &WickMonomial| kms_two_point(&a.displacement_to(b), &state).unwrap();
    let p0 = point(0, 1, 0.0, [0.0; 3]);
    let p1 = point(1, 1, 0.4, [0.3, 0.0, 0.0]);
    let two = CorrelationProblem::new(vec![p0, p1], state);
    assert!((full_correlation(&two).unwrap() - d(&p0, &p1)).norm() < 1e-15);

    let mixed = CorrelationProblem::new(vec![p0, point(1, 3, 0.4, [0.3, 0.0, 0.0])], state);
    assert_eq!(full_correlation(&mixed).unwrap(), Complex64::new(0.0, 0.0));

    let pts = [
        point(0, 1, 0.0, [0.0; 3]),
        point(1, 1, 0.2, [0.5, 0.0, 0.0]),
        point(2, 1, 0.5, [0.0, 0.7, 0.0]),
        point(3, 1, 1.1, [0.1, 0.2, 0.9]),
    ];
    let four = CorrelationProblem::new(pts.to_vec(), state);
    let want = d(&pts[0], &pts[1]) * d(&pts[2], &pts[3])
        + d(&pts[0], &pts[2]) * d(&pts[1], &pts[3])
        + d(&pts[0], &pts[3]) * d(&pts[1], &pts[2]);
    assert!((full_correlation(&four).unwrap() - want).norm() < 1e-13 * want.norm());
    assert_eq!(connected_correlation(&four).unwrap(), Complex64::new(0.0, 0.0));

    let single = CorrelationProblem::new(vec![point(0, 2, 0.0, [0.0; 3])], state);
    assert_eq!(connected_correlation(&single).unwrap(), full_correlation(&single).unwrap());
    assert_eq!(full_correlation(&single).unwrap(), Complex64::new(0.0, 0.0));

    let q0 = point(0, 2, 0.0, [0.0; 3]);
    let q1 = point(1, 2, 0.7, [0.0, 0.0, 1.2]);
    let sq = CorrelationProblem::new(vec![q0, q1], state);
    let want = d(&q0, &q1).powi(2) * 2.0;
    assert!((connected_correlation(&sq).unwrap() - want).norm() < 1e-14 * want.norm());

    let g = Multigraph::from_lines(2, &[((0, 1), 2)]);
    assert!((graph_weight(&g, &sq).unwrap() - want).norm() < 1e-14 * want.norm());
    let quartic = CorrelationProblem::new(vec![point(0, 4, 0.0, [0.0; 3]), point(1, 4, 0.7, [0.0, 0.0, 1.2])], state);
    let g = Multigraph::from_lines(2, &[((0, 1), 4)]);
    assert!((graph_weight(&g, &quartic).unwrap() - d(&q0, &q1).powi(4) * 24.0).norm() < 1e-13);
}

#[test]
fn oracle_two_factor_and_single_factor() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let table = random_table(&mut rng, 2);
    let powers = [2, 2];
    let full = full_from_table(&powers, &table);
    let oracle = oracle_from_table(&powers, &table).unwrap();
    // ω(A)ω(B) vanishes for Wick monomials of positive power
    assert!((oracle - full).norm() < 1e-15);
    assert_eq!(oracle_from_table(&[0], &ContractionTable::zeros(1)).unwrap(), Complex64::new(1.0, 0.0));
    assert!(oracle_from_table(&[1; 9], &ContractionTable::zeros(9)).is_err());
}

fn random_problem(rng: &mut ChaCha8Rng) -> CorrelationProblem {
    let thermal = rng.gen_bool(0.7);
    let state = if thermal {
        FieldParams::thermal(rng.gen_range(0.5..2.0), rng.gen_range(0.8..3.0))
    } else {
        FieldParams::vacuum(rng.gen_range(0.5..2.0))
    };
    let n = rng.gen_range(1..=4);
    let spread = if thermal { 0.95 * state.beta } else { 3.0 };
    let mut us: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..spread)).collect();
    us.sort_by(f64::total_cmp);
    let mut powers: Vec<u32> = (0..n).map(|_| rng.gen_range(0..=4)).collect();
    if powers.iter().sum::<u32>() % 2 == 1 && rng.gen_bool(0.8) {
        let k = rng.gen_range(0..n);
        powers[k] = if powers[k] == 4 { 3 } else { powers[k] + 1 };
    }
    let monomials = (0..n)
        .map(|i| {
            let x = [rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)];
            WickMonomial::new(i, powers[i], 0.0, us[i] - us[0], x)
        })
        .collect();
    CorrelationProblem::new(monomials, state)
}

#[test]
fn connected_graph_sum_matches_moebius_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut nonzero = 0;
    for _ in 0..200 {
        let p = random_problem(&mut rng);
        let table = p.contractions().unwrap();
        let powers = p.powers();
        let a = connected_from_table(&powers, &table);
        let b = oracle_from_table(&powers, &table).unwrap();
        if b.norm() > 0.0 {
            nonzero += 1;
        }
        assert!((a - b).norm() <= 1e-12 * b.norm().max(f64::MIN_POSITIVE), "{powers:?}: {a} vs {b}");
    }
    assert!(nonzero > 50);
}

#[test]
fn triangle_matches_oracle() {
    let state = FieldParams::thermal(1.0, 2.0);
    let p = CorrelationProblem::new(
        vec![point(0, 2, 0.0, [0.0; 3]), point(1, 2, 0.5, [1.0, 0.0, 0.0]), point(2, 2, 1.0, [2.0, 0.0, 0.0])],
        state,
    );
    let a = connected_correlation(&p).unwrap();
    let b = connected_oracle(&p).unwrap();
    assert!((a - b).norm() < 1e-12 * b.norm());
}

#[test]
fn equal_time_factors_commute() {
    let state = FieldParams::thermal(1.0, 1.5);
    let a = point(0, 2, 0.3, [0.0, 0.0, 0.0]);
    let b = point(1, 3, 0.3, [0.8, 0.0, 0.0]);
    let c = point(2, 1, 0.9, [0.0, 0.5, 0.0]);
    let base = point(3, 2, 0.0, [0.1, 0.1, 0.1]);
    let p1 = CorrelationProblem::new(vec![base, a, b, c], state);
    let p2 = CorrelationProblem::new(vec![base, b, a, c], state);
    let (x, y) = (full_correlation(&p1).unwrap(), full_correlation(&p2).unwrap());
    assert!((x - y).norm() < 1e-13 * x.norm());
}

#[test]
fn invalid_problems_are_rejected() {
    let state = FieldParams::thermal(1.0, 1.0);
    let dup = CorrelationProblem::new(vec![point(0, 1, 0.0, [0.0; 3]), point(0, 1, 0.5, [1.0, 0.0, 0.0])], state);
    assert!(full_correlation(&dup).is_err());
    let unordered = CorrelationProblem::new(vec![point(0, 1, 0.5, [0.0; 3]), point(1, 1, 0.1, [1.0, 0.0, 0.0])], state);
    assert!(full_correlation(&unordered).is_err());
    let wide = CorrelationProblem::new(vec![point(0, 1, 0.0, [0.0; 3]), point(1, 1, 1.0, [1.0, 0.0, 0.0])], state);
    assert!(full_correlation(&wide).is_err());
    let high = CorrelationProblem::new(vec![point(0, 7, 0.0, [0.0; 3]), point(1, 7, 0.5, [1.0, 0.0, 0.0])], state);
    assert!(full_correlation(&high).is_err());
}

proptest! {
    #[test]
    fn odd_total_degree_vanishes(powers in proptest::collection::vec(0u32..5, 1..5), seed in 0u64..1000) {
        prop_assume!(powers.iter().sum::<u32>() % 2 == 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let table = random_table(&mut rng, powers.len());
        prop_assert_eq!(full_from_table(&powers, &table), Complex64::new(0.0, 0.0));
        prop_assert_eq!(connected_from_table(&powers, &table), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn enumerated_graphs_have_prescribed_degrees(powers in proptest::collection::vec(0u32..5, 1..5)) {
        for g in enumerate_graphs(&powers) {
            for (i, &a) in powers.iter().enumerate() {
                prop_assert_eq!(g.degree(i), a);
            }
        }
    }

    #[test]
    fn self_contraction_moment_matches_reordering(c in 0.01f64..1.0, seed in 0u64..1000) {
        // :φ²:_old = :φ²:_new + c, so ω(:φ²:_old(0) :φ²:_old(1)) = 2D² + c²
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let table = random_table(&mut rng, 2);
        let v = full_with_self_contractions(&[2, 2], &table, &[c, c]);
        let want = table.get(0, 1).powi(2) * 2.0 + c * c;
        prop_assert!((v - want).norm() < 1e-13);
    }
}
