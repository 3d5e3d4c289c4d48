use itertools::Itertools;
use ldgm_sm::gf::BitMatrix;
use ldgm_sm::peg::{
    builtin_fixtures, format_poly_matrix, parse_poly_matrix, peg_protograph, qc_peg_shifts, DegreeSequence,
    Protograph, QcLift,
};
use proptest::prelude::*;

/// A binary matrix has a length-4 Tanner cycle iff two rows share two columns.
fn has_four_cycle(m: &BitMatrix) -> bool {
    (0..m.rows()).tuple_combinations().any(|(a, b)| {
        m.row(a)
            .words()
            .iter()
            .zip(m.row(b).words())
            .map(|(x, y)| (x & y).count_ones())
            .sum::<u32>()
            >= 2
    })
}

/// Every distinct-shift assignment for a protograph.
fn all_lifts(proto: &Protograph, n: usize) -> Vec<QcLift> {
    let entries: Vec<(usize, usize, usize)> = (0..proto.n_c())
        .cartesian_product(0..proto.n_v())
        .map(|(i, j)| (i, j, proto.get(i, j)))
        .collect();
    let choices: Vec<Vec<Vec<usize>>> = entries
        .iter()
        .map(|&(_, _, b)| (0..n).combinations(b).collect())
        .collect();
    choices
        .iter()
        .map(|c| c.iter())
        .multi_cartesian_product()
        .map(|pick| {
            let mut shifts = vec![vec![Vec::new(); proto.n_v()]; proto.n_c()];
            for (&(i, j, _), s) in entries.iter().zip(pick) {
                shifts[i][j] = s.clone();
            }
            QcLift::new(n, shifts).unwrap()
        })
        .collect()
}

#[test]
fn greedy_shifts_avoid_four_cycles_whenever_possible() {
    let mut checked = 0;
    for n_c in 1..=3usize {
        for n_v in 1..=3usize {
            for cells in (0..n_c * n_v).map(|_| 0..=2usize).multi_cartesian_product() {
                if cells.iter().sum::<usize>() > 6 {
                    continue;
                }
                let proto = Protograph::from_rows(cells.chunks(n_v).map(<[usize]>::to_vec).collect()).unwrap();
                for n in 2..=5 {
                    if proto.max_entry() > n {
                        continue;
                    }
                    let possible = all_lifts(&proto, n).iter().any(|l| !has_four_cycle(&l.expand()));
                    let got = qc_peg_shifts(&proto, n, 0).unwrap();
                    if possible {
                        assert!(!has_four_cycle(&got.expand()), "{proto:?} N={n}: {}", format_poly_matrix(&got));
                    }
                    assert_eq!(got.proto(), &proto);
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 1000);
}

#[test]
fn two_by_two_exhaustive_cycle_sums() {
    let proto = Protograph::from_rows(vec![vec![1, 1], vec![1, 1]]).unwrap();
    let avoidable = (0..3)
        .map(|_| 0..3i64)
        .multi_cartesian_product()
        .any(|s| (s[0] - s[1] + s[2]).rem_euclid(3) != 0);
    assert!(avoidable);
    for seed in 0..10 {
        let l = qc_peg_shifts(&proto, 3, seed).unwrap();
        let s = |i, j| l.shifts(i, j)[0] as i64;
        assert_ne!((s(0, 0) - s(0, 1) + s(1, 1) - s(1, 0)).rem_euclid(3), 0);
    }
}

const EXAMPLE_PROTOGRAPHS: [&str; 4] = [
    "1 2 1 2 2\n2 1 2 1 1",
    "1 0 1 1 1 0 1 1 0 1\n0 1 1 1 1 1 1 0 1 1\n1 1 0 0 1 1 1 1 1 0\n1 1 1 1 0 1 0 1 1 1",
    "1 1 0 0 1 0 1 1 0 0 0 1 0 1 1\n1 0 0 1 0 0 0 1 1 0 1 1 1 0 0\n1 1 1 0 0 1 0 0 0 1 1 0 0 1 0\n\
     0 1 1 1 1 0 0 1 1 1 0 0 0 0 0\n0 0 0 0 1 1 1 0 1 0 1 0 1 1 1\n0 0 1 1 0 1 1 0 0 1 0 1 1 0 1",
    "1 0 0 1 0 0 1 0 0 0 0 1 0 0 0 0 1 0 1 1\n1 1 0 1 0 1 0 0 1 0 1 0 0 0 1 0 0 1 0 0\n\
     0 0 0 0 0 1 0 0 0 0 0 0 1 1 1 1 1 0 0 1\n0 1 1 0 1 0 0 0 0 1 1 0 0 1 0 0 0 0 1 1\n\
     0 1 0 0 1 0 1 0 1 0 1 1 0 0 0 1 0 0 0 0\n0 0 1 1 0 1 0 1 1 1 0 1 0 1 0 0 0 0 0 0\n\
     1 0 1 0 1 0 0 1 0 1 0 0 1 0 0 0 1 1 0 0\n0 0 0 0 0 0 1 1 0 0 0 0 1 0 1 1 0 1 1 0",
];

#[test]
fn example_protographs_have_uniform_column_degree_three() {
    for text in EXAMPLE_PROTOGRAPHS {
        let p: Protograph = text.parse().unwrap();
        assert_eq!(p.col_sums(), vec![3; p.n_v()]);
        assert_eq!(p.num_edges(), 3 * p.n_v());
    }
}

#[test]
fn lifted_fixtures_sit_on_example_protographs() {
    let fixtures = builtin_fixtures().unwrap();
    let base: Vec<Protograph> = EXAMPLE_PROTOGRAPHS.iter().map(|t| t.parse().unwrap()).collect();
    let by_name = |n: &str| fixtures.iter().find(|(m, _)| *m == n).unwrap().1.lift.proto().clone();
    assert_eq!(by_name("h2x5_1"), base[0]);
    assert_eq!(by_name("h2x5_2"), base[0]);
    assert_eq!(by_name("h6x15"), base[2]);
    assert_eq!(by_name("h8x20"), base[3]);
    for name in ["h4x10_1", "h4x10_2"] {
        assert_eq!(by_name(name).col_sums(), vec![3; 10]);
    }
}

#[test]
fn fixture_text_round_trips() {
    for (name, text) in ldgm_sm::peg::BUILTIN_FIXTURES {
        let lift = parse_poly_matrix(text).unwrap();
        let body: String = text.lines().filter(|l| !l.starts_with("expect=")).map(|l| format!("{l}\n")).collect();
        assert_eq!(format_poly_matrix(&lift), body, "{name}");
    }
}

#[test]
fn peg_matches_degree_sequences_for_all_shapes() {
    for (n_c, n_v, n) in [(2, 5, 12), (4, 10, 6), (6, 15, 4), (8, 20, 3), (12, 30, 2), (24, 60, 1)] {
        for seed in 0..4 {
            let p = peg_protograph(n_c, n_v, &DegreeSequence::uniform(n_v, 3), n, seed).unwrap();
            assert_eq!(p.col_sums(), vec![3; n_v]);
            let rows = p.row_sums();
            assert_eq!(rows.iter().sum::<usize>(), 3 * n_v);
            assert!(rows.iter().all(|&r| r > 0), "{n_c}x{n_v} seed {seed}: {rows:?}");
            assert!(p.max_entry() <= n);
        }
    }
}

#[test]
fn construction_is_seed_deterministic() {
    let ds = DegreeSequence::uniform(10, 3);
    let a = ldgm_sm::peg::construct(4, 10, &ds, 6, 17).unwrap();
    let b = ldgm_sm::peg::construct(4, 10, &ds, 6, 17).unwrap();
    assert_eq!(a.1, b.1);
    assert_eq!(a.2, b.2);
}

fn lift_strategy() -> impl Strategy<Value = QcLift> {
    (1usize..4, 1usize..6, 1usize..8).prop_flat_map(|(n_c, n_v, n)| {
        prop::collection::vec(prop::collection::vec(prop::collection::btree_set(0..n, 0..=n.min(3)), n_v), n_c)
            .prop_map(move |rows| {
                let shifts = rows
                    .into_iter()
                    .map(|r| r.into_iter().map(|s| s.into_iter().collect()).collect())
                    .collect();
                QcLift::new(n, shifts).unwrap()
            })
    })
}

proptest! {
    #[test]
    fn expansion_inherits_protograph_weights(lift in lift_strategy()) {
        let m = lift.expand();
        let n = lift.lifting_factor();
        let cols = lift.proto().col_sums();
        let rows = lift.proto().row_sums();
        for (c, w) in m.col_weights().into_iter().enumerate() {
            prop_assert_eq!(w, cols[c / n]);
        }
        for (r, w) in m.row_weights().into_iter().enumerate() {
            prop_assert_eq!(w, rows[r / n]);
        }
        prop_assert_eq!(parse_poly_matrix(&format_poly_matrix(&lift)).unwrap(), lift);
    }

    #[test]
    fn qc_shifts_are_distinct_and_sized(
        (rows, n, seed) in (1usize..4, 1usize..6, 2usize..7).prop_flat_map(|(r, c, n)| {
            (prop::collection::vec(prop::collection::vec(0usize..=2, c), r), Just(n), any::<u64>())
        })
    ) {
        let proto = Protograph::from_rows(rows).unwrap();
        let lift = qc_peg_shifts(&proto, n, seed).unwrap();
        for i in 0..proto.n_c() {
            for j in 0..proto.n_v() {
                let s = lift.shifts(i, j);
                prop_assert_eq!(s.len(), proto.get(i, j));
                prop_assert!(s.windows(2).all(|w| w[0] < w[1]));
                prop_assert!(s.iter().all(|&x| x < n));
            }
        }
    }
}
