//! Oracles shared by the integration tests and the acceptance runner.

#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap, VecDeque};

use num_traits::{One, Zero};
use surftrace_core::exactnum::Rat;
use surftrace_core::matchenum::{enumerate_match, MatchOptions, MatchingDatum};
use surftrace_core::mixedrep::z_theta;
use surftrace_core::oracle::mixed_character_power_sums;
use surftrace_core::repdata::{dim_mixed_poly, MixedLabel};
use surftrace_core::weingarten::wg_coeff;
use surftrace_core::wordintegral::multi_trace_integral;
use surftrace_core::words::{surface_relator, Word};
use surftrace_core::{Permutation, RatFuncN};

/// Genus-two words certified as shortest representatives in the runner.
pub const PANEL: [&str; 11] = [
    "abAB", "aBAb", "acAC", "bdBD", "abcABC", "aabAAB", "abCBAc", "abcdABCD", "aabbAABB",
    "acbdCABD", "abABdcDC",
];

pub fn word(s: &str) -> Word {
    Word::parse_free(s, 4).unwrap()
}

pub fn label(mu: &[u32], nu: &[u32]) -> MixedLabel {
    MixedLabel::from_parts(mu, nu).unwrap()
}

/// Junction conditions `[left] o pi = [right]` for genus two, written as
/// (left over R-slots, left over R^-1-slots, right over R-slots, right over
/// R^-1-slots). Lower/upper case pairs: `r`/`s` are 0/1 ends of positive
/// R-intervals, `S`/`R` 0/1 ends of negative ones, `u`/`v` and `V`/`U` the
/// same for R^-1-intervals.
const JUNCTIONS: [(&str, &str, &str, &str); 8] = [
    ("sa", "Ub", "rb", "Va"),
    ("sb", "va", "Sa", "Vb"),
    ("Ra", "vb", "Sb", "ua"),
    ("Rb", "Uc", "rc", "ub"),
    ("sc", "Ud", "rd", "Vc"),
    ("sd", "vc", "Sc", "Vd"),
    ("Rc", "vd", "Sd", "uc"),
    ("Rd", "Ua", "ra", "ud"),
];

/// Index variables named after the index functions of the expanded integral.
struct Vars {
    names: BTreeMap<(char, usize, usize), usize>,
    count: usize,
}

impl Vars {
    fn id(&mut self, family: char, gen: usize, slot: usize) -> usize {
        let next = self.count;
        let id = *self.names.entry((family, gen, slot)).or_insert(next);
        if id == next {
            self.count += 1;
        }
        id
    }
}

/// Number of index assignments in `[n]` satisfying every matching and
/// junction condition of the datum, counted by exhaustive search with
/// early rejection.
pub fn brute_force_index_count(w: &Word, d: &MatchingDatum, n: usize) -> u64 {
    assert_eq!(d.g, 2);
    let (k, l) = (d.k, d.l);
    let m = k + l;
    let len = w.len();
    let mut vars = Vars {
        names: BTreeMap::new(),
        count: 0,
    };
    // `a` indices: a(t) enters letter t, a(t+1) leaves it.
    let a = |vars: &mut Vars, t: usize| vars.id('a', 0, t % len);
    let mut eq: Vec<(usize, usize)> = Vec::new();
    for f in 0..4 {
        let pos: Vec<usize> = (0..len)
            .filter(|&t| w.letters()[t].gen as usize == f && !w.letters()[t].inv)
            .collect();
        let neg: Vec<usize> = (0..len)
            .filter(|&t| w.letters()[t].gen as usize == f && w.letters()[t].inv)
            .collect();
        // Row indices: plus side r | u | a(start), minus side R | U | a(end).
        let plus_row = |vars: &mut Vars, i: usize| {
            if i < k {
                vars.id('r', f, i)
            } else if i < m {
                vars.id('u', f, i)
            } else {
                a(vars, pos[i - m])
            }
        };
        let minus_row = |vars: &mut Vars, j: usize| {
            if j < k {
                vars.id('R', f, j)
            } else if j < m {
                vars.id('U', f, j)
            } else {
                a(vars, neg[j - m] + 1)
            }
        };
        let plus_col = |vars: &mut Vars, i: usize| {
            if i < k {
                vars.id('s', f, i)
            } else if i < m {
                vars.id('v', f, i)
            } else {
                a(vars, pos[i - m] + 1)
            }
        };
        let minus_col = |vars: &mut Vars, j: usize| {
            if j < k {
                vars.id('S', f, j)
            } else if j < m {
                vars.id('V', f, j)
            } else {
                a(vars, neg[j - m])
            }
        };
        for i in 0..m + pos.len() {
            let x = plus_row(&mut vars, i);
            let y = minus_row(&mut vars, d.sigma[f].apply(i));
            eq.push((x, y));
            let x = plus_col(&mut vars, i);
            let y = minus_col(&mut vars, d.tau[f].apply(i));
            eq.push((x, y));
        }
    }
    let named = |vars: &mut Vars, name: &str, x: usize| {
        let mut ch = name.chars();
        let fam = ch.next().unwrap();
        let gen = (ch.next().unwrap() as u8 - b'a') as usize;
        vars.id(fam, gen, x)
    };
    for (i, (lr, li, rr, ri)) in JUNCTIONS.iter().enumerate() {
        let left = |vars: &mut Vars, x: usize| {
            if x < k {
                named(vars, lr, x)
            } else {
                named(vars, li, x)
            }
        };
        let right = |vars: &mut Vars, x: usize| {
            if x < k {
                named(vars, rr, x)
            } else {
                named(vars, ri, x)
            }
        };
        for x in 0..m {
            let r = right(&mut vars, x);
            let lft = left(&mut vars, d.pis[i].apply(x));
            eq.push((r, lft));
        }
    }
    let nv = vars.count;
    // Breadth-first variable order so that most variables are forced.
    let mut adj = vec![Vec::new(); nv];
    for &(x, y) in &eq {
        adj[x].push(y);
        adj[y].push(x);
    }
    let mut order = Vec::with_capacity(nv);
    let mut placed = vec![false; nv];
    for s in 0..nv {
        if placed[s] {
            continue;
        }
        placed[s] = true;
        let mut q = VecDeque::from([s]);
        while let Some(v) = q.pop_front() {
            order.push(v);
            for &u in &adj[v] {
                if !placed[u] {
                    placed[u] = true;
                    q.push_back(u);
                }
            }
        }
    }
    let mut rank = vec![0; nv];
    for (i, &v) in order.iter().enumerate() {
        rank[v] = i;
    }
    // Conditions checked when the later of their two variables is set.
    let mut checks: Vec<Vec<usize>> = vec![Vec::new(); nv];
    for &(x, y) in &eq {
        let (early, late) = if rank[x] < rank[y] { (x, y) } else { (y, x) };
        checks[rank[late]].push(early);
    }
    let mut value = vec![usize::MAX; nv];
    fn go(
        pos: usize,
        order: &[usize],
        checks: &[Vec<usize>],
        value: &mut [usize],
        n: usize,
    ) -> u64 {
        if pos == order.len() {
            return 1;
        }
        let v = order[pos];
        let mut total = 0;
        for x in 0..n {
            if checks[pos].iter().all(|&e| e == v || value[e] == x) {
                value[v] = x;
                total += go(pos + 1, order, checks, value, n);
            }
        }
        value[v] = usize::MAX;
        total
    }
    let mut count = go(0, &order, &checks, &mut value, n);
    if len == 0 {
        count *= n as u64;
    }
    count
}

/// The matching sum written out term by term at a fixed `n`: Weingarten
/// values, junction coefficients, index counts from the brute-force search
/// and one dimension factor per junction.
pub fn literal_matching_sum(w: &Word, lab: &MixedLabel, n: usize) -> Rat {
    let z = z_theta(lab).unwrap();
    let dim = dim_mixed_poly(lab).unwrap().eval_int(n as i64);
    let ni = n as i64;
    let mut wg_cache: HashMap<Permutation, Rat> = HashMap::new();
    let mut wg = |s: Permutation| -> Rat {
        wg_cache
            .entry(s.clone())
            .or_insert_with(|| wg_coeff(&s).unwrap().eval_int(ni).unwrap())
            .clone()
    };
    let mut total = Rat::zero();
    for d in enumerate_match(w, lab.k(), lab.l(), &MatchOptions::default()).unwrap() {
        let mut term = Rat::one();
        for p in &d.pis {
            term *= z.coeff(p).eval_int(ni).unwrap();
        }
        if term.is_zero() {
            continue;
        }
        for (s, t) in d.sigma.iter().zip(&d.tau) {
            term *= wg(s.compose(&t.inverse()));
        }
        let count = brute_force_index_count(w, &d, n);
        total += term * Rat::from_integer(count.into());
    }
    let mut scale = Rat::one();
    for _ in 0..8 {
        scale *= &dim;
    }
    total * scale
}

fn power(w: &Word, e: u32) -> Word {
    (0..e).fold(Word::identity(w.rank()), |acc, _| acc.concat(w))
}

/// `int tr(w) s_label(R) dx` by the power-sum expansion, with the trace
/// integrals shared between labels through `cache`.
pub fn j_by_traces_cached(
    w: &Word,
    lab: &MixedLabel,
    cache: &mut HashMap<(Vec<u32>, Vec<u32>), RatFuncN>,
) -> RatFuncN {
    let rel = surface_relator(w.rank() / 2);
    let rel_inv = rel.inverse();
    let mut total = RatFuncN::zero();
    for t in mixed_character_power_sums(lab).unwrap() {
        let key = (t.pos.parts().to_vec(), t.neg.parts().to_vec());
        let v = cache.entry(key).or_insert_with(|| {
            let mut words = vec![w.clone()];
            words.extend(t.pos.parts().iter().map(|&e| power(&rel, e)));
            words.extend(t.neg.parts().iter().map(|&e| power(&rel_inv, e)));
            multi_trace_integral(w.rank(), &words).unwrap()
        });
        total = &total + &v.scale(&t.coeff);
    }
    total
}
