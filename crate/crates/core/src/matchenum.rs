//! Matching data for `int tr(w) s_[mu,nu](R)` over `U(n)^{2g}` and the
//! combinatorial evaluation of that integral.
//!
//! Every letter of `w` is a w-interval. Each of the `k` copies of the surface
//! relator `R` contributes one R-interval per letter and each of the `l`
//! copies of `R^-1` one R^-1-interval per letter. Per generator `f` the
//! intervals split into a positive and a negative block, ordered as
//! R-slots, R^-1-slots, then w-occurrences by position. A datum pairs
//! positive with negative intervals twice (`sigma_f` on 0-ends against
//! 1-ends, `tau_f` on 1-ends against 0-ends) and wires consecutive relator
//! letters through one permutation `pi_i` of `S_{k+l}` per letter junction.

use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::dsu::RollbackDsu;
use crate::error::{Error, Result};
use crate::exactnum::{PolyN, Rat, RatFuncN};
use crate::mixedrep::z_table;
use crate::repdata::{dim_mixed_poly, labels_up_to, witten_zeta_truncated, MixedLabel};
use crate::symgroup::{factorial, sym_vec, young_subgroup, Permutation};
use crate::weingarten::{wg_table, WgTable};
use crate::wordintegral::haar_word_integral;
use crate::words::{surface_relator, Word};

/// Default bound on the number of data a single enumeration may visit.
pub const DEFAULT_COST_LIMIT: u128 = 100_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum IntervalKind {
    W,
    R,
    RInv,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Interval {
    pub kind: IntervalKind,
    pub gen: usize,
    pub plus: bool,
    /// Position in `w` for w-intervals, copy index in `[0, k+l)` otherwise.
    pub slot: usize,
    /// Letter index inside `R` for relator intervals.
    pub letter: usize,
}

/// Endpoint `end` (0 or 1) of interval `iv`.
pub fn endpoint(iv: usize, end: usize) -> usize {
    2 * iv + end
}

/// Endpoints glued by one junction permutation: `right[x]` meets `left[pi(x)]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Junction {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

/// Where the junction wiring comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Wiring {
    /// The eight genus-two maps, read from [`PI_MAPS_G2`].
    Table,
    /// The cyclic rule valid for every genus.
    Generic,
}

/// Genus-two junction maps. Entry `i` reads `(left_R, left_Rinv, right_R,
/// right_Rinv)` and states `[left_R ⊔ left_Rinv] o pi_i = [right_R ⊔ right_Rinv]`.
/// Variable names: `r`, `s` are the 0- and 1-ends of positive R-intervals,
/// `S`, `R` the 0- and 1-ends of negative R-intervals, `u`, `v` the 0- and
/// 1-ends of positive R^-1-intervals, `V`, `U` the 0- and 1-ends of negative
/// R^-1-intervals; the second character names the generator.
pub const PI_MAPS_G2: [(&str, &str, &str, &str); 8] = [
    ("sa", "Ub", "rb", "Va"),
    ("sb", "va", "Sa", "Vb"),
    ("Ra", "vb", "Sb", "ua"),
    ("Rb", "Uc", "rc", "ub"),
    ("sc", "Ud", "rd", "Vc"),
    ("sd", "vc", "Sc", "Vd"),
    ("Rc", "vd", "Sd", "uc"),
    ("Rd", "Ua", "ra", "ud"),
];

/// Interval and endpoint bookkeeping for a triple `(w, k, l)`.
#[derive(Clone, Debug, Serialize)]
pub struct Layout {
    pub g: usize,
    pub k: usize,
    pub l: usize,
    #[serde(skip)]
    pub word: Word,
    pub intervals: Vec<Interval>,
    /// Positive block of each generator, by interval id.
    pub plus: Vec<Vec<usize>>,
    /// Negative block of each generator, by interval id.
    pub minus: Vec<Vec<usize>>,
    pub junctions: Vec<Junction>,
    /// Pairs `(1-end of letter t, 0-end of letter t+1)` around `w`.
    pub w_connectors: Vec<(usize, usize)>,
    /// Relator interval id at `[slot][letter]`.
    pub relator_interval: Vec<Vec<usize>>,
}

fn genus_of(w: &Word) -> Result<usize> {
    let r = w.rank();
    if !r.is_multiple_of(2) || r < 4 {
        return Err(Error::InvalidArgument(format!(
            "word rank {r} is not 2g with g >= 2"
        )));
    }
    Ok(r / 2)
}

impl Layout {
    pub fn new(w: &Word, k: usize, l: usize, wiring: Wiring) -> Result<Self> {
        let g = genus_of(w)?;
        if wiring == Wiring::Table && g != 2 {
            return Err(Error::InvalidArgument(
                "the transcribed junction table covers genus 2 only".into(),
            ));
        }
        let rel = surface_relator(g);
        let rl = rel.letters();
        let m = k + l;
        let mut intervals = Vec::new();
        for (t, letter) in w.letters().iter().enumerate() {
            intervals.push(Interval {
                kind: IntervalKind::W,
                gen: letter.gen as usize,
                plus: !letter.inv,
                slot: t,
                letter: t,
            });
        }
        let mut relator_interval = vec![vec![0usize; rl.len()]; m];
        for (x, row) in relator_interval.iter_mut().enumerate() {
            for (t, letter) in rl.iter().enumerate() {
                row[t] = intervals.len();
                let (kind, plus) = if x < k {
                    (IntervalKind::R, !letter.inv)
                } else {
                    (IntervalKind::RInv, letter.inv)
                };
                intervals.push(Interval {
                    kind,
                    gen: letter.gen as usize,
                    plus,
                    slot: x,
                    letter: t,
                });
            }
        }
        let ngen = 2 * g;
        let pos_letter: Vec<usize> = (0..ngen)
            .map(|f| {
                rl.iter()
                    .position(|x| x.gen as usize == f && !x.inv)
                    .unwrap()
            })
            .collect();
        let neg_letter: Vec<usize> = (0..ngen)
            .map(|f| {
                rl.iter()
                    .position(|x| x.gen as usize == f && x.inv)
                    .unwrap()
            })
            .collect();
        let mut plus = vec![Vec::new(); ngen];
        let mut minus = vec![Vec::new(); ngen];
        for f in 0..ngen {
            for x in 0..m {
                let (tp, tm) = if x < k {
                    (pos_letter[f], neg_letter[f])
                } else {
                    (neg_letter[f], pos_letter[f])
                };
                plus[f].push(relator_interval[x][tp]);
                minus[f].push(relator_interval[x][tm]);
            }
        }
        for (t, letter) in w.letters().iter().enumerate() {
            let f = letter.gen as usize;
            if letter.inv {
                minus[f].push(t);
            } else {
                plus[f].push(t);
            }
        }
        let len = w.len();
        let w_connectors = (0..len)
            .map(|t| (endpoint(t, 1), endpoint((t + 1) % len, 0)))
            .collect();
        let mut layout = Layout {
            g,
            k,
            l,
            word: w.clone(),
            intervals,
            plus,
            minus,
            junctions: Vec::new(),
            w_connectors,
            relator_interval,
        };
        layout.junctions = match wiring {
            Wiring::Generic => layout.generic_junctions(),
            Wiring::Table => layout.table_junctions()?,
        };
        Ok(layout)
    }

    fn generic_junctions(&self) -> Vec<Junction> {
        let nl = 4 * self.g;
        let m = self.k + self.l;
        (0..nl)
            .map(|t| {
                let next = (t + 1) % nl;
                let left = (0..m)
                    .map(|y| {
                        if y < self.k {
                            endpoint(self.relator_interval[y][t], 1)
                        } else {
                            endpoint(self.relator_interval[y][next], 1)
                        }
                    })
                    .collect();
                let right = (0..m)
                    .map(|x| {
                        if x < self.k {
                            endpoint(self.relator_interval[x][next], 0)
                        } else {
                            endpoint(self.relator_interval[x][t], 0)
                        }
                    })
                    .collect();
                Junction { left, right }
            })
            .collect()
    }

    /// Endpoints named by a table variable, over its block of slots.
    fn named_endpoints(&self, name: &str) -> Result<Vec<usize>> {
        let mut ch = name.chars();
        let (v, gch) = match (ch.next(), ch.next()) {
            (Some(v), Some(gc)) => (v, gc),
            _ => return Err(Error::Parse(format!("bad variable {name}"))),
        };
        let f = (gch as u8).wrapping_sub(b'a') as usize;
        if f >= 2 * self.g {
            return Err(Error::Parse(format!("bad generator in {name}")));
        }
        // (block is R, interval is positive, end)
        let (r_block, positive, end) = match v {
            'r' => (true, true, 0),
            's' => (true, true, 1),
            'S' => (true, false, 0),
            'R' => (true, false, 1),
            'u' => (false, true, 0),
            'v' => (false, true, 1),
            'V' => (false, false, 0),
            'U' => (false, false, 1),
            _ => return Err(Error::Parse(format!("bad variable {name}"))),
        };
        let block = if positive {
            &self.plus[f]
        } else {
            &self.minus[f]
        };
        let range = if r_block {
            0..self.k
        } else {
            self.k..self.k + self.l
        };
        Ok(range.map(|x| endpoint(block[x], end)).collect())
    }

    fn table_junctions(&self) -> Result<Vec<Junction>> {
        PI_MAPS_G2
            .iter()
            .map(|(lr, li, rr, ri)| {
                let mut left = self.named_endpoints(lr)?;
                left.extend(self.named_endpoints(li)?);
                let mut right = self.named_endpoints(rr)?;
                right.extend(self.named_endpoints(ri)?);
                Ok(Junction { left, right })
            })
            .collect()
    }

    pub fn num_endpoints(&self) -> usize {
        2 * self.intervals.len()
    }

    /// `k + l + p_f` for each generator.
    pub fn block_sizes(&self) -> Vec<usize> {
        self.plus.iter().map(|b| b.len()).collect()
    }

    /// True when neither block-crossing direction between R- and
    /// R^-1-slots occurs.
    pub fn respects_blocks(&self, s: &[u8]) -> bool {
        let (k, m) = (self.k, self.k + self.l);
        (0..m).all(|x| {
            let y = s[x] as usize;
            !((x < k && (k..m).contains(&y)) || ((k..m).contains(&x) && y < k))
        })
    }

    /// Endpoint pairs of the sigma arcs for one generator.
    pub fn sigma_arcs(&self, f: usize, s: &[u8]) -> impl Iterator<Item = (usize, usize)> + '_ {
        let s = s.to_vec();
        (0..s.len()).map(move |x| {
            (
                endpoint(self.plus[f][x], 0),
                endpoint(self.minus[f][s[x] as usize], 1),
            )
        })
    }

    /// Endpoint pairs of the tau arcs for one generator.
    pub fn tau_arcs(&self, f: usize, t: &[u8]) -> impl Iterator<Item = (usize, usize)> + '_ {
        let t = t.to_vec();
        (0..t.len()).map(move |x| {
            (
                endpoint(self.plus[f][x], 1),
                endpoint(self.minus[f][t[x] as usize], 0),
            )
        })
    }

    /// Endpoint pairs glued by `pi` at junction `i`.
    pub fn pi_connectors<'a>(
        &'a self,
        i: usize,
        pi: &'a [u8],
    ) -> impl Iterator<Item = (usize, usize)> + 'a {
        let j = &self.junctions[i];
        (0..pi.len()).map(move |x| (j.right[x], j.left[pi[x] as usize]))
    }
}

/// One element of `MATCH(w, k, l)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MatchingDatum {
    pub g: usize,
    pub k: usize,
    pub l: usize,
    pub sigma: Vec<Permutation>,
    pub tau: Vec<Permutation>,
    pub pis: Vec<Permutation>,
}

impl MatchingDatum {
    pub fn is_star(&self) -> bool {
        self.sigma == self.tau && self.pis.iter().all(|p| p.preserves_block(self.k))
    }
}

/// Enumeration and evaluation settings.
#[derive(Clone, Copy, Debug)]
pub struct MatchOptions {
    /// Restrict to `tau = sigma` and junction maps in `S_k x S_l`.
    pub star: bool,
    pub cost_limit: u128,
    /// Allow genus other than two, wired by the cyclic rule.
    pub general_genus: bool,
}

impl Default for MatchOptions {
    fn default() -> Self {
        MatchOptions {
            star: false,
            cost_limit: DEFAULT_COST_LIMIT,
            general_genus: false,
        }
    }
}

impl MatchOptions {
    pub fn star(star: bool) -> Self {
        MatchOptions {
            star,
            ..Default::default()
        }
    }
}

fn check_word(w: &Word) -> Result<()> {
    if !w.in_commutator_subgroup() {
        return Err(Error::NotInCommutatorSubgroup(w.to_string()));
    }
    if !w.is_cyclically_reduced() {
        return Err(Error::NotCyclicallyReduced(w.to_string()));
    }
    Ok(())
}

/// Layout for a validated triple, with the genus gate applied.
pub fn layout_for(w: &Word, k: usize, l: usize, opts: &MatchOptions) -> Result<Layout> {
    check_word(w)?;
    if k + l == 0 {
        return Err(Error::InvalidArgument("k + l must be at least 1".into()));
    }
    let g = genus_of(w)?;
    let wiring = if g == 2 {
        Wiring::Table
    } else if opts.general_genus {
        Wiring::Generic
    } else {
        return Err(Error::InvalidArgument(format!(
            "genus {g} needs the general-genus option"
        )));
    };
    Layout::new(w, k, l, wiring)
}

/// Number of data visited: `prod_f (m_f!)^2 ((k+l)!)^{4g}`, or
/// `prod_f m_f! (k! l!)^{4g}` when restricted to the starred subset.
pub fn enumeration_cost(layout: &Layout, star: bool) -> u128 {
    let mut c: u128 = 1;
    for m in layout.block_sizes() {
        let f = factorial(m);
        c = c.saturating_mul(if star { f } else { f.saturating_mul(f) });
    }
    let pi = if star {
        factorial(layout.k) * factorial(layout.l)
    } else {
        factorial(layout.k + layout.l)
    };
    for _ in 0..4 * layout.g {
        c = c.saturating_mul(pi);
    }
    c
}

fn check_cost(layout: &Layout, opts: &MatchOptions) -> Result<()> {
    let cost = enumeration_cost(layout, opts.star);
    if cost > opts.cost_limit {
        return Err(Error::GuardExceeded {
            what: "matching data",
            cost,
            limit: opts.cost_limit,
        });
    }
    Ok(())
}

struct Choices {
    /// Allowed sigma (and tau) images per generator.
    gen_perms: Vec<Vec<Vec<u8>>>,
    /// Candidate junction maps.
    pi_perms: Vec<Vec<u8>>,
}

fn choices(layout: &Layout, star: bool) -> Result<Choices> {
    let gen_perms = layout
        .block_sizes()
        .iter()
        .map(|&m| {
            Ok(sym_vec(m)?
                .into_iter()
                .map(|s| s.images().to_vec())
                .filter(|s| layout.respects_blocks(s))
                .collect())
        })
        .collect::<Result<Vec<_>>>()?;
    let pi_perms = if star {
        young_subgroup(&[layout.k, layout.l])?
    } else {
        sym_vec(layout.k + layout.l)?
    };
    let mut pi_perms: Vec<Vec<u8>> = pi_perms.iter().map(|s| s.images().to_vec()).collect();
    pi_perms.sort();
    Ok(Choices {
        gen_perms,
        pi_perms,
    })
}

/// Iterator over `MATCH(w, k, l)` (or `MATCH*`), lexicographic in the sigma
/// tuple, then the tau tuple, then the junction maps.
pub struct MatchIter {
    layout: Arc<Layout>,
    choices: Choices,
    star: bool,
    digits: Vec<usize>,
    radix: Vec<usize>,
    done: bool,
}

impl MatchIter {
    pub fn layout(&self) -> &Layout {
        &self.layout
    }
}

impl Iterator for MatchIter {
    type Item = MatchingDatum;

    fn next(&mut self) -> Option<MatchingDatum> {
        if self.done {
            return None;
        }
        let ngen = self.choices.gen_perms.len();
        let perm = |v: &[u8]| Permutation::from_images(v.to_vec()).expect("valid images");
        let sigma: Vec<Permutation> = (0..ngen)
            .map(|f| perm(&self.choices.gen_perms[f][self.digits[f]]))
            .collect();
        let (tau, pi_off) = if self.star {
            (sigma.clone(), ngen)
        } else {
            (
                (0..ngen)
                    .map(|f| perm(&self.choices.gen_perms[f][self.digits[ngen + f]]))
                    .collect(),
                2 * ngen,
            )
        };
        let pis = (0..4 * self.layout.g)
            .map(|i| perm(&self.choices.pi_perms[self.digits[pi_off + i]]))
            .collect();
        let d = MatchingDatum {
            g: self.layout.g,
            k: self.layout.k,
            l: self.layout.l,
            sigma,
            tau,
            pis,
        };
        // Advance the mixed-radix counter, last digit fastest.
        let mut i = self.digits.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            self.digits[i] += 1;
            if self.digits[i] < self.radix[i] {
                break;
            }
            self.digits[i] = 0;
        }
        Some(d)
    }
}

/// All data of `MATCH(w, k, l)`, or of `MATCH*` with `opts.star`.
pub fn enumerate_match(w: &Word, k: usize, l: usize, opts: &MatchOptions) -> Result<MatchIter> {
    let layout = layout_for(w, k, l, opts)?;
    check_cost(&layout, opts)?;
    let choices = choices(&layout, opts.star)?;
    let ngen = choices.gen_perms.len();
    let mut radix: Vec<usize> = choices.gen_perms.iter().map(|v| v.len()).collect();
    if !opts.star {
        radix.extend(choices.gen_perms.iter().map(|v| v.len()));
    }
    radix.extend(std::iter::repeat_n(choices.pi_perms.len(), 4 * layout.g));
    let done = radix.contains(&0) || ngen == 0;
    Ok(MatchIter {
        layout: Arc::new(layout),
        digits: vec![0; radix.len()],
        radix,
        choices,
        star: opts.star,
        done,
    })
}

pub(crate) fn datum_consistent(layout: &Layout, d: &MatchingDatum) -> Result<()> {
    let sizes = layout.block_sizes();
    let m = layout.k + layout.l;
    let bad = d.g != layout.g
        || d.k != layout.k
        || d.l != layout.l
        || d.sigma.len() != sizes.len()
        || d.tau.len() != sizes.len()
        || d.pis.len() != 4 * layout.g
        || d.sigma.iter().zip(&sizes).any(|(s, &n)| s.degree() != n)
        || d.tau.iter().zip(&sizes).any(|(s, &n)| s.degree() != n)
        || d.pis.iter().any(|p| p.degree() != m);
    if bad {
        return Err(Error::InvalidArgument(
            "matching datum does not fit the word and block sizes".into(),
        ));
    }
    Ok(())
}

/// Union-find over endpoints joined by the given edge families.
pub(crate) fn glue(
    layout: &Layout,
    d: &MatchingDatum,
    connectors: bool,
    arcs: bool,
) -> RollbackDsu {
    let mut dsu = RollbackDsu::new(layout.num_endpoints());
    if connectors {
        for &(a, b) in &layout.w_connectors {
            dsu.union(a as u32, b as u32);
        }
        for (i, p) in d.pis.iter().enumerate() {
            for (a, b) in layout.pi_connectors(i, p.images()) {
                dsu.union(a as u32, b as u32);
            }
        }
    }
    if arcs {
        for f in 0..d.sigma.len() {
            for (a, b) in layout.sigma_arcs(f, d.sigma[f].images()) {
                dsu.union(a as u32, b as u32);
            }
            for (a, b) in layout.tau_arcs(f, d.tau[f].images()) {
                dsu.union(a as u32, b as u32);
            }
        }
    }
    dsu
}

/// Exponent `c` with `N(datum) = n^c`: the number of classes of endpoints
/// under the connector and arc identifications.
pub fn count_n_exponent(d: &MatchingDatum, w: &Word) -> Result<usize> {
    let opts = MatchOptions {
        general_genus: true,
        ..Default::default()
    };
    let layout = layout_for(w, d.k, d.l, &opts)?;
    datum_consistent(&layout, d)?;
    let extra = usize::from(w.is_empty());
    Ok(glue(&layout, d, true, true).components() + extra)
}

/// `int tr(w) s_label(R) dx` with its normalisation by the label dimension.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JResult {
    pub j: RatFuncN,
    pub dj: RatFuncN,
    pub match_count: u128,
    pub max_chi: i64,
    pub star: bool,
}

struct JTask<'a> {
    layout: &'a Layout,
    gen_perms: &'a [Vec<Vec<u8>>],
    gen_inv: Vec<Vec<Vec<u8>>>,
    pi_perms: &'a [Vec<u8>],
    pi_zclass: Vec<usize>,
    z_base: u128,
    wg: Vec<Arc<WgTable>>,
    wg_radix: Vec<u128>,
    id_class: Vec<u128>,
    star: bool,
}

struct JWalker<'a> {
    task: &'a JTask<'a>,
    dsu: RollbackDsu,
    acc: HashMap<(u128, u128), Vec<u64>>,
    ncomp: usize,
}

impl JWalker<'_> {
    fn gen_level(&mut self, f: usize, wg_key: u128) {
        let task = self.task;
        if f == task.gen_perms.len() {
            self.pi_level(0, wg_key, 0);
            return;
        }
        for si in 0..task.gen_perms[f].len() {
            let mark = self.dsu.mark();
            let s = &task.gen_perms[f][si];
            for (a, b) in task.layout.sigma_arcs(f, s) {
                self.dsu.union(a as u32, b as u32);
            }
            if task.star {
                for (a, b) in task.layout.tau_arcs(f, s) {
                    self.dsu.union(a as u32, b as u32);
                }
                let key = wg_key * task.wg_radix[f] + task.id_class[f];
                self.gen_level(f + 1, key);
            } else {
                self.tau_level(f, si, wg_key);
            }
            self.dsu.rollback(mark);
        }
    }

    fn tau_level(&mut self, f: usize, si: usize, wg_key: u128) {
        let task = self.task;
        let s = &task.gen_perms[f][si];
        let m = s.len();
        let mut buf = [0u8; 32];
        for ti in 0..task.gen_perms[f].len() {
            let mark = self.dsu.mark();
            let t = &task.gen_perms[f][ti];
            for (a, b) in task.layout.tau_arcs(f, t) {
                self.dsu.union(a as u32, b as u32);
            }
            let t_inv = &task.gen_inv[f][ti];
            for x in 0..m {
                buf[x] = s[t_inv[x] as usize];
            }
            let class = task.wg[f].class_of_images(&buf[..m]) as u128;
            self.gen_level(f + 1, wg_key * task.wg_radix[f] + class);
            self.dsu.rollback(mark);
        }
    }

    fn pi_level(&mut self, i: usize, wg_key: u128, z_key: u128) {
        let task = self.task;
        if i == task.layout.junctions.len() {
            let c = self.dsu.components();
            let n = self.ncomp;
            self.acc
                .entry((wg_key, z_key))
                .or_insert_with(|| vec![0; n + 1])[c] += 1;
            return;
        }
        for (pi_idx, p) in task.pi_perms.iter().enumerate() {
            let mark = self.dsu.mark();
            for (a, b) in task.layout.pi_connectors(i, p) {
                self.dsu.union(a as u32, b as u32);
            }
            let zk = z_key + task.z_base.pow(task.pi_zclass[pi_idx] as u32);
            self.pi_level(i + 1, wg_key, zk);
            self.dsu.rollback(mark);
        }
    }
}

fn invert(img: &[u8]) -> Vec<u8> {
    let mut inv = vec![0u8; img.len()];
    for (i, &x) in img.iter().enumerate() {
        inv[x as usize] = i as u8;
    }
    inv
}

/// `int tr(w(x)) s_label(R_g(x)) dx` over `U(n)^{2g}` by summing over matching
/// data, exactly as a rational function of `n`.
pub fn j_n(w: &Word, label: &MixedLabel, star_only: bool) -> Result<JResult> {
    j_n_with(w, label, &MatchOptions::star(star_only))
}

pub fn j_n_with(w: &Word, label: &MixedLabel, opts: &MatchOptions) -> Result<JResult> {
    let (k, l) = (label.k(), label.l());
    let layout = layout_for(w, k, l, opts)?;
    check_cost(&layout, opts)?;
    let zt = z_table(label)?;
    let ch = choices(&layout, opts.star)?;

    // Junction maps with equal z coefficient share a class.
    let mut zvalues: Vec<PolyN> = Vec::new();
    let pi_zclass: Vec<usize> = ch
        .pi_perms
        .iter()
        .map(|p| {
            let idx = zt
                .perms
                .binary_search_by(|q| q.images().cmp(p.as_slice()))
                .expect("junction map lies in the symmetric group");
            let v = &zt.numerators[idx];
            match zvalues.iter().position(|x| x == v) {
                Some(i) => i,
                None => {
                    zvalues.push(v.clone());
                    zvalues.len() - 1
                }
            }
        })
        .collect();
    let nj = layout.junctions.len();
    let z_base = nj as u128 + 1;
    let z_space = z_base.checked_pow(zvalues.len() as u32);
    let wg: Vec<Arc<WgTable>> = layout
        .block_sizes()
        .iter()
        .map(|&m| wg_table(m))
        .collect::<Result<_>>()?;
    let wg_radix: Vec<u128> = wg.iter().map(|t| t.classes().len() as u128).collect();
    let wg_space = wg_radix.iter().try_fold(1u128, |a, &r| a.checked_mul(r));
    if z_space.is_none() || wg_space.is_none() {
        return Err(Error::GuardExceeded {
            what: "aggregation key space",
            cost: u128::MAX,
            limit: u128::MAX,
        });
    }

    let task = JTask {
        layout: &layout,
        gen_inv: ch
            .gen_perms
            .iter()
            .map(|v| v.iter().map(|s| invert(s)).collect())
            .collect(),
        gen_perms: &ch.gen_perms,
        pi_perms: &ch.pi_perms,
        pi_zclass,
        z_base,
        id_class: wg
            .iter()
            .zip(layout.block_sizes())
            .map(|(t, m)| t.class_of_images(&(0..m as u8).collect::<Vec<_>>()) as u128)
            .collect(),
        wg,
        wg_radix,
        star: opts.star,
    };
    let mut base = RollbackDsu::new(layout.num_endpoints());
    for &(a, b) in &layout.w_connectors {
        base.union(a as u32, b as u32);
    }
    let ncomp = layout.num_endpoints();
    let first = &ch.gen_perms[0];
    let acc = (0..first.len())
        .into_par_iter()
        .map(|si| {
            let mut walker = JWalker {
                task: &task,
                dsu: base.clone(),
                acc: HashMap::new(),
                ncomp,
            };
            let s = &task.gen_perms[0][si];
            for (a, b) in layout.sigma_arcs(0, s) {
                walker.dsu.union(a as u32, b as u32);
            }
            if task.star {
                for (a, b) in layout.tau_arcs(0, s) {
                    walker.dsu.union(a as u32, b as u32);
                }
                walker.gen_level(1, task.id_class[0]);
            } else {
                walker.tau_level(0, si, 0);
            }
            walker.acc
        })
        .reduce(HashMap::new, |mut a, b| {
            for (key, v) in b {
                match a.get_mut(&key) {
                    Some(x) => x.iter_mut().zip(v).for_each(|(x, y)| *x += y),
                    None => {
                        a.insert(key, v);
                    }
                }
            }
            a
        });

    let extra = usize::from(w.is_empty());
    let chi_graph = -((w.len() + 4 * layout.g * (k + l)) as i64);
    let mut keys: Vec<_> = acc.into_iter().collect();
    keys.sort_by_key(|(key, _)| *key);
    let mut match_count: u128 = 0;
    let mut max_chi = i64::MIN;
    let mut num = PolyN::zero();
    let mut wg_cache: HashMap<u128, (PolyN, i64)> = HashMap::new();
    let mut z_cache: HashMap<u128, PolyN> = HashMap::new();
    for ((wg_key, z_key), by_c) in keys {
        let (wg_num, type_two) = wg_cache
            .entry(wg_key)
            .or_insert_with(|| {
                let mut key = wg_key;
                let mut p = PolyN::one();
                let mut cycles = 0i64;
                for (f, t) in task.wg.iter().enumerate().rev() {
                    let class = (key % task.wg_radix[f]) as usize;
                    key /= task.wg_radix[f];
                    cycles += t.classes()[class].len() as i64;
                    p = &p * t.numerator_by_class(class);
                }
                (p, cycles)
            })
            .clone();
        let z_num = z_cache
            .entry(z_key)
            .or_insert_with(|| {
                let mut key = z_key;
                let mut p = PolyN::one();
                for v in &zvalues {
                    let cnt = (key % z_base) as u32;
                    key /= z_base;
                    p = &p * &v.pow(cnt);
                }
                p
            })
            .clone();
        let mut comp_poly = Vec::with_capacity(by_c.len() + extra);
        comp_poly.extend(std::iter::repeat_n(Rat::from_integer(0.into()), extra));
        for (c, &cnt) in by_c.iter().enumerate() {
            if cnt > 0 {
                match_count += cnt as u128;
                max_chi = max_chi.max(chi_graph + c as i64 + type_two);
            }
            comp_poly.push(Rat::from_integer(cnt.into()));
        }
        let term = &(&PolyN::from_coeffs(comp_poly) * &wg_num) * &z_num;
        num = &num + &term;
    }
    let den = task
        .wg
        .iter()
        .fold(zt.common_den.pow(nj as u32), |acc, t| &acc * t.common_den());
    let dim = RatFuncN::from_poly(zt.dim.clone());
    let j = &RatFuncN::new(num, den)? * &dim.pow(nj as u32);
    let dj = &j * &dim;
    Ok(JResult {
        j,
        dj,
        match_count,
        max_chi,
        star: opts.star,
    })
}

/// The labelled contribution table behind [`assemble_expected_trace`].
#[derive(Clone, Debug, Serialize)]
pub struct ExpectedTrace {
    #[serde(with = "crate::exactnum::rat_serde")]
    pub value: Rat,
    #[serde(with = "crate::exactnum::rat_serde")]
    pub zeta: Rat,
    #[serde(with = "crate::exactnum::rat_serde")]
    pub trivial_term: Rat,
    pub terms: Vec<LabelTerm>,
}

/// `D_label(n0) J(n0)` for one label.
#[derive(Clone, Debug, Serialize)]
pub struct LabelTerm {
    pub label: String,
    #[serde(with = "crate::exactnum::rat_serde")]
    pub value: Rat,
}

/// Heuristic finite-label approximation of the expected trace of `w` under
/// the surface-group measure: `zeta(2g-2)^-1 (E[tr w] + sum D J)` with the
/// zeta function and the label sum both truncated at `max_boxes`.
pub fn assemble_expected_trace(w: &Word, max_boxes: usize, n0: usize) -> Result<Rat> {
    Ok(expected_trace_terms(w, max_boxes, n0, &MatchOptions::default())?.value)
}

pub fn expected_trace_terms(
    w: &Word,
    max_boxes: usize,
    n0: usize,
    opts: &MatchOptions,
) -> Result<ExpectedTrace> {
    let g = genus_of(w)?;
    if n0 < 2 * max_boxes || n0 < 2 {
        return Err(Error::InvalidArgument(format!(
            "n0 = {n0} must be at least max(2, 2 * max_boxes)"
        )));
    }
    let zeta = witten_zeta_truncated((2 * g - 2) as u32, n0, max_boxes)?;
    let zero = Rat::from_integer(0.into());
    if !w.in_commutator_subgroup() {
        return Ok(ExpectedTrace {
            value: zero.clone(),
            zeta,
            trivial_term: zero,
            terms: Vec::new(),
        });
    }
    let wr = w.cyclic_reduce();
    let n = n0 as i64;
    let trivial_term = haar_word_integral(2 * g, &wr)?.value.eval_int(n)?;
    let mut total = trivial_term.clone();
    let mut terms = Vec::new();
    for label in labels_up_to(max_boxes).into_iter().skip(1) {
        let dj = j_n_with(&wr, &label, opts)?.dj.eval_int(n)?;
        total += &dj;
        terms.push(LabelTerm {
            label: label.to_string(),
            value: dj,
        });
    }
    Ok(ExpectedTrace {
        value: total / &zeta,
        zeta,
        trivial_term,
        terms,
    })
}

/// `D_label(n)` as a rational function, re-exported for reporting.
pub fn label_dimension(label: &MixedLabel) -> Result<RatFuncN> {
    Ok(RatFuncN::from_poly(dim_mixed_poly(label)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::parse_word;

    fn w(s: &str) -> Word {
        parse_word(s, 2).unwrap()
    }

    #[test]
    fn table_matches_generic_wiring() {
        for (k, l) in [(1, 0), (0, 1), (1, 1), (2, 1), (1, 2)] {
            let a = Layout::new(&w("abAB"), k, l, Wiring::Table).unwrap();
            let b = Layout::new(&w("abAB"), k, l, Wiring::Generic).unwrap();
            assert_eq!(a.junctions, b.junctions, "k={k} l={l}");
        }
    }

    #[test]
    fn every_endpoint_has_one_connector() {
        let lay = Layout::new(&w("abAcBC"), 2, 1, Wiring::Generic).unwrap();
        let mut deg = vec![0; lay.num_endpoints()];
        for &(a, b) in &lay.w_connectors {
            deg[a] += 1;
            deg[b] += 1;
        }
        for j in &lay.junctions {
            for &e in j.left.iter().chain(&j.right) {
                deg[e] += 1;
            }
        }
        assert!(deg.iter().all(|&d| d == 1));
    }

    #[test]
    fn enumeration_counts() {
        let it = enumerate_match(&w("abAB"), 1, 0, &MatchOptions::star(false)).unwrap();
        assert_eq!(it.count(), 16);
        let it = enumerate_match(&w("abAB"), 1, 0, &MatchOptions::star(true)).unwrap();
        assert_eq!(it.count(), 4);
        assert!(enumerate_match(&w("a"), 1, 0, &MatchOptions::default()).is_err());
    }

    #[test]
    fn counts_agree_with_aggregation() {
        let label = MixedLabel::from_parts(&[1], &[1]).unwrap();
        let r = j_n(&w("abAB"), &label, true).unwrap();
        let it = enumerate_match(&w("abAB"), 1, 1, &MatchOptions::star(true)).unwrap();
        assert_eq!(r.match_count, it.count() as u128);
    }

    #[test]
    fn agrees_with_trace_route() {
        for (mu, nu) in [
            (&[1u32][..], &[][..]),
            (&[], &[1]),
            (&[1], &[1]),
            (&[2], &[]),
            (&[1, 1], &[]),
        ] {
            let label = MixedLabel::from_parts(mu, nu).unwrap();
            let a = j_n(&w("abAB"), &label, false).unwrap().j;
            let b = crate::oracle::j_via_traces(&w("abAB"), &label).unwrap();
            assert_eq!(a, b, "{label}");
        }
    }
}
