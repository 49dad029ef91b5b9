mod common;

use common::{brute_force_index_count, label, literal_matching_sum, word};
use surftrace_core::matchenum::{count_n_exponent, enumerate_match, j_n, MatchOptions};
use surftrace_core::oracle::j_via_traces;
use surftrace_core::surfacegeom::build_surface;

#[test]
fn index_counts_are_powers_of_the_type_one_count() {
    let w = word("abAB");
    let mut checked = 0;
    for (k, l, step) in [
        (1, 0, 1),
        (0, 1, 1),
        (1, 1, 3001),
        (2, 0, 4999),
        (0, 2, 4999),
    ] {
        let data = enumerate_match(&w, k, l, &MatchOptions::default()).unwrap();
        for d in data.step_by(step).take(12) {
            let c = build_surface(&d, &w).unwrap().type_i as u32;
            assert_eq!(count_n_exponent(&d, &w).unwrap() as u32, c);
            for n in [2u64, 3] {
                assert_eq!(
                    brute_force_index_count(&w, &d, n as usize),
                    n.pow(c),
                    "{d:?}"
                );
            }
            checked += 1;
        }
    }
    assert!(checked >= 20);
}

#[test]
fn matching_sum_matches_the_literal_expansion() {
    let w = word("abAB");
    for lab in [label(&[1], &[]), label(&[], &[1])] {
        let j = j_n(&w, &lab, false).unwrap().j;
        for n in [3usize, 4] {
            assert_eq!(
                j.eval_int(n as i64).unwrap(),
                literal_matching_sum(&w, &lab, n),
                "{lab}"
            );
        }
    }
}

#[test]
fn matching_sum_matches_the_power_sum_route() {
    for s in ["abAB", "acAC"] {
        let w = word(s);
        for lab in [label(&[1], &[]), label(&[], &[1]), label(&[1], &[1])] {
            assert_eq!(
                j_n(&w, &lab, false).unwrap().j,
                j_via_traces(&w, &lab).unwrap(),
                "{s} {lab}"
            );
        }
    }
}
