mod common;

use num_traits::{One, Zero};
use proptest::prelude::*;
use surftrace_core::exactnum::{rat, PolyN, Rat, RatFuncN};
use surftrace_core::matchenum::{enumerate_match, MatchOptions};
use surftrace_core::montecarlo::mc_word_trace;
use surftrace_core::surfacegeom::{build_surface, collapse, piece_decomposition};
use surftrace_core::symgroup::{count_cycles, sym_vec};
use surftrace_core::weingarten::{entry_integral, wg_coeff};
use surftrace_core::wordintegral::haar_word_integral;
use surftrace_core::words::{dehn_shorten, is_shortest_conj_rep, Letter, Word};
use surftrace_core::Permutation;

fn poly() -> impl Strategy<Value = PolyN> {
    prop::collection::vec(-5i64..=5, 0..5).prop_map(|c| PolyN::from_ints(&c))
}

fn perm(m: usize) -> impl Strategy<Value = Permutation> {
    Just((0..m as u8).collect::<Vec<_>>())
        .prop_shuffle()
        .prop_map(|v| Permutation::from_images(v).unwrap())
}

fn letters(rank: u8, max_len: usize) -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec((0..rank, any::<bool>()), 0..=max_len)
        .prop_map(|v| v.into_iter().map(|(g, i)| Letter::new(g, i)).collect())
}

fn word_over(rank: u8, max_len: usize) -> impl Strategy<Value = Word> {
    letters(rank, max_len).prop_map(move |l| Word::new(rank as usize, l).unwrap())
}

/// Exact inverse of the Gram matrix `n^{cycles(s t^-1)}` by Gaussian elimination.
fn gram_inverse_row(m: usize, n: i64) -> Vec<(Permutation, Rat)> {
    let perms = sym_vec(m).unwrap();
    let size = perms.len();
    let mut a: Vec<Vec<Rat>> = perms
        .iter()
        .map(|s| {
            let mut row: Vec<Rat> = perms
                .iter()
                .map(|t| {
                    let c = count_cycles(s.compose(&t.inverse()).images()) as u32;
                    Rat::from_integer(n.pow(c).into())
                })
                .collect();
            row.extend((0..size).map(|j| {
                if *s == perms[j] {
                    Rat::one()
                } else {
                    Rat::zero()
                }
            }));
            row
        })
        .collect();
    for col in 0..size {
        let piv = (col..size)
            .find(|&r| !a[r][col].is_zero())
            .expect("invertible");
        a.swap(col, piv);
        let p = a[col][col].clone();
        for x in a[col].iter_mut() {
            *x = &*x / &p;
        }
        for r in 0..size {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                let pivot_row = a[col].clone();
                for (x, y) in a[r].iter_mut().zip(pivot_row) {
                    *x -= &f * y;
                }
            }
        }
    }
    let id = perms.iter().position(|s| s.is_identity()).unwrap();
    perms
        .iter()
        .enumerate()
        .map(|(j, s)| (s.clone(), a[id][size + j].clone()))
        .collect()
}

#[test]
fn weingarten_inverts_the_gram_matrix() {
    for m in 1..=3 {
        for n in [3i64, 4, 5] {
            for (s, v) in gram_inverse_row(m, n) {
                assert_eq!(
                    wg_coeff(&s).unwrap().eval_int(n).unwrap(),
                    v,
                    "m={m} n={n} {s}"
                );
            }
        }
    }
}

/// `int prod u_{i j} prod conj(u_{i' j'})` at `n = 3` from Gram-inverse values.
fn entry_by_gram(i: &[usize], j: &[usize], ip: &[usize], jp: &[usize]) -> Rat {
    let k = i.len();
    let wg: Vec<(Permutation, Rat)> = gram_inverse_row(k, 3);
    let value = |p: &Permutation| wg.iter().find(|(s, _)| s == p).unwrap().1.clone();
    let mut total = Rat::zero();
    for s in sym_vec(k).unwrap() {
        if !(0..k).all(|a| i[a] == ip[s.apply(a)]) {
            continue;
        }
        for t in sym_vec(k).unwrap() {
            if (0..k).all(|a| j[a] == jp[t.apply(a)]) {
                total += value(&t.compose(&s.inverse()));
            }
        }
    }
    total
}

#[test]
fn entry_integrals_at_three() {
    let idx = |v: u32, k: usize| -> Vec<usize> {
        (0..k)
            .map(|a| (v / 3u32.pow(a as u32) % 3) as usize + 1)
            .collect()
    };
    for k in 1..=2usize {
        let span = 3u32.pow(k as u32);
        for x in 0..span * span {
            let (i, j) = (idx(x % span, k), idx(x / span, k));
            for y in (0..span * span).step_by(5) {
                let (ip, jp) = (idx(y % span, k), idx(y / span, k));
                assert_eq!(
                    entry_integral(&i, &j, &ip, &jp, 3).unwrap(),
                    entry_by_gram(&i, &j, &ip, &jp)
                );
            }
        }
    }
    // |u_11|^4 = 2 / (n (n + 1)).
    assert_eq!(
        entry_integral(&[1, 1], &[1, 1], &[1, 1], &[1, 1], 3).unwrap(),
        rat(1, 6)
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn polynomial_ring_laws(a in poly(), b in poly(), c in poly(), x in -6i64..6) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!((&a * &b).eval_int(x), a.eval_int(x) * b.eval_int(x));
    }

    #[test]
    fn rational_function_division(a in poly(), b in poly(), x in 7i64..20) {
        prop_assume!(!b.is_zero());
        let fa = RatFuncN::from_poly(a.clone());
        let fb = RatFuncN::from_poly(b.clone());
        let q = fa.checked_div(&fb).unwrap();
        prop_assert_eq!(&q * &fb, fa.clone());
        if !b.eval_int(x).is_zero() {
            prop_assert_eq!(q.eval_int(x).unwrap(), a.eval_int(x) / b.eval_int(x));
        }
    }

    #[test]
    fn permutation_group_laws(s in perm(6), t in perm(6), u in perm(6)) {
        prop_assert_eq!(s.compose(&t).compose(&u), s.compose(&t.compose(&u)));
        prop_assert!(s.compose(&s.inverse()).is_identity());
        prop_assert_eq!(s.cycle_type().size(), 6);
        prop_assert_eq!(s.transposition_norm(), 6 - s.num_cycles());
        prop_assert_eq!(s.compose(&t).cycle_type(), t.compose(&s).cycle_type());
    }

    #[test]
    fn weingarten_is_a_class_function(s in perm(4), t in perm(4)) {
        let conj = t.compose(&s).compose(&t.inverse());
        prop_assert_eq!(wg_coeff(&s).unwrap(), wg_coeff(&conj).unwrap());
        prop_assert_eq!(wg_coeff(&s).unwrap(), wg_coeff(&s.inverse()).unwrap());
    }

    #[test]
    fn word_integral_invariances(w in word_over(2, 8), rot in 0usize..8, flip in any::<bool>()) {
        let base = haar_word_integral(2, &w).unwrap().value;
        // Cyclic rotation and inversion leave a real trace integral unchanged.
        let r = w.rotate(rot % w.len().max(1));
        prop_assert_eq!(&haar_word_integral(2, &r).unwrap().value, &base);
        prop_assert_eq!(&haar_word_integral(2, &w.inverse()).unwrap().value, &base);
        // Haar measure is invariant under inverting or swapping generators.
        let image: Vec<Letter> = w
            .letters()
            .iter()
            .map(|l| if flip { Letter::new(l.gen, !l.inv) } else { Letter::new(1 - l.gen, l.inv) })
            .collect();
        let v = Word::new(2, image).unwrap();
        prop_assert_eq!(&haar_word_integral(2, &v).unwrap().value, &base);
        if !w.is_empty() {
            prop_assert!(base.degree_at_most(0));
        }
    }

    #[test]
    fn dehn_is_idempotent_and_shortening(w in word_over(4, 14)) {
        let s = dehn_shorten(&w, 2);
        prop_assert!(s.len() <= w.cyclic_reduce().len());
        prop_assert_eq!(dehn_shorten(&s, 2), s.clone());
        prop_assert!(s.is_empty() || is_shortest_conj_rep(&s, 2));
    }

    #[test]
    fn starred_surfaces_satisfy_the_axioms(idx in 0usize..20000, kl in 0usize..3) {
        let (k, l) = [(1, 1), (2, 0), (0, 2)][kl];
        let w = common::word("abAB");
        let opts = MatchOptions::star(true);
        let mut it = enumerate_match(&w, k, l, &opts).unwrap();
        let count = enumerate_match(&w, k, l, &opts).unwrap().count();
        let d = it.nth(idx % count).unwrap();
        let s = build_surface(&d, &w).unwrap();
        prop_assert_eq!(s.chi_graph, -(4 + 8 * (k + l) as i64));
        let c = collapse(&s).unwrap();
        prop_assert_eq!(c.chi, s.chi);
        prop_assert!(c.chi <= -((k + l) as i64));
        let pieces = piece_decomposition(&c).unwrap();
        let wr: usize = pieces.iter().map(|p| p.e_count).sum();
        prop_assert_eq!(wr, c.n_wr);
        prop_assert!(pieces.iter().all(|p| p.satisfies_inequality(2)));
    }

    #[test]
    fn reruns_are_identical(seed in any::<u64>()) {
        let w = common::word("abAB");
        let a = mc_word_trace(4, &w, 3, 300, seed).unwrap();
        let b = mc_word_trace(4, &w, 3, 300, seed).unwrap();
        prop_assert_eq!(a, b);
    }
}
