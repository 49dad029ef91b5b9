//! Exact Haar integrals of products of traces of words in independent
//! Haar unitaries, as rational functions of `n`.
//!
//! Each generator with `p` positive and `p` negative occurrences contributes
//! a sum over pairs `(s, t)` in `S_p x S_p` weighted by `Wg(t s^-1)`; the
//! index deltas glue the free matrix indices and every resulting class of
//! indices contributes a factor `n`.

use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::dsu::RollbackDsu;
use crate::error::{Error, Result};
use crate::exactnum::{PolyN, Rat, RatFuncN};
use crate::symgroup::{factorial, sym_vec};
use crate::weingarten::{wg_table, WgTable};
use crate::words::Word;

/// Longest word accepted by [`haar_word_integral`].
pub const MAX_WORD_LEN: usize = 12;
/// Largest number of matching tuples [`multi_trace_integral`] will visit.
pub const MAX_MULTI_TRACE_COST: u128 = 100_000_000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WordIntegralResult {
    pub value: RatFuncN,
    pub normalized: RatFuncN,
    /// `None` stands for the degree of the zero function.
    pub degree: Option<i64>,
}

fn check_rank(r: usize, w: &Word) -> Result<()> {
    if let Some(l) = w.letters().iter().find(|l| l.gen as usize >= r) {
        return Err(Error::InvalidArgument(format!(
            "word {w} uses generator {} beyond r = {r}",
            l.gen + 1
        )));
    }
    Ok(())
}

/// `int tr(w(x)) dx` over `U(n)^r`.
pub fn haar_word_integral(r: usize, w: &Word) -> Result<WordIntegralResult> {
    check_rank(r, w)?;
    if w.len() > MAX_WORD_LEN {
        return Err(Error::OutOfRange {
            what: "word length",
            value: w.len() as i64,
            range: "0..=12",
        });
    }
    let value = multi_trace_integral(r, std::slice::from_ref(w))?;
    let normalized = value
        .checked_div(&RatFuncN::var())
        .expect("n is a nonzero function");
    Ok(WordIntegralResult {
        degree: value.degree(),
        value,
        normalized,
    })
}

/// `(1/n) int tr(w(x)) dx`.
pub fn normalized_trace(r: usize, w: &Word) -> Result<RatFuncN> {
    Ok(haar_word_integral(r, w)?.normalized)
}

struct GenData {
    p: usize,
    perms: Arc<Vec<Vec<u8>>>,
    inv_perms: Arc<Vec<Vec<u8>>>,
    rows_plus: Vec<u32>,
    rows_minus: Vec<u32>,
    cols_plus: Vec<u32>,
    cols_minus: Vec<u32>,
    table: Arc<WgTable>,
    radix: u128,
}

/// `int prod_j tr(w_j(x)) dx` over `U(n)^r`; the empty word contributes `n`.
pub fn multi_trace_integral(r: usize, words: &[Word]) -> Result<RatFuncN> {
    for w in words {
        check_rank(r, w)?;
    }
    let mut sums = vec![0i64; r];
    for w in words {
        for l in w.letters() {
            sums[l.gen as usize] += l.sign();
        }
    }
    if sums.iter().any(|&s| s != 0) {
        return Ok(RatFuncN::zero());
    }

    // One index variable per letter boundary; variable `base + t` is the
    // index entering position `t` of its word.
    let mut occ: Vec<[Vec<(u32, u32)>; 2]> = (0..r).map(|_| [Vec::new(), Vec::new()]).collect();
    let mut nvars = 0u32;
    for w in words {
        let len = w.len().max(1) as u32;
        for (t, l) in w.letters().iter().enumerate() {
            let start = nvars + t as u32;
            let end = nvars + (t as u32 + 1) % len;
            if l.inv {
                // conj(u_{end, start})
                occ[l.gen as usize][1].push((end, start));
            } else {
                occ[l.gen as usize][0].push((start, end));
            }
        }
        nvars += len;
    }

    let mut cost: u128 = 1;
    let mut gens = Vec::new();
    for o in occ.into_iter().filter(|o| !o[0].is_empty()) {
        let p = o[0].len();
        let f = factorial(p);
        cost = cost.saturating_mul(f.saturating_mul(f));
        if cost > MAX_MULTI_TRACE_COST {
            return Err(Error::GuardExceeded {
                what: "multi-trace matching tuples",
                cost,
                limit: MAX_MULTI_TRACE_COST,
            });
        }
        let table = wg_table(p)?;
        let perms: Vec<Vec<u8>> = sym_vec(p)?.iter().map(|s| s.images().to_vec()).collect();
        let inv_perms = perms
            .iter()
            .map(|img| {
                let mut inv = vec![0u8; p];
                for (i, &x) in img.iter().enumerate() {
                    inv[x as usize] = i as u8;
                }
                inv
            })
            .collect();
        gens.push(GenData {
            p,
            radix: table.classes().len() as u128,
            perms: Arc::new(perms),
            inv_perms: Arc::new(inv_perms),
            rows_plus: o[0].iter().map(|x| x.0).collect(),
            cols_plus: o[0].iter().map(|x| x.1).collect(),
            rows_minus: o[1].iter().map(|x| x.0).collect(),
            cols_minus: o[1].iter().map(|x| x.1).collect(),
            table,
        });
    }
    if gens
        .iter()
        .try_fold(1u128, |acc, g| acc.checked_mul(g.radix))
        .is_none()
    {
        return Err(Error::GuardExceeded {
            what: "class key space",
            cost: u128::MAX,
            limit: u128::MAX,
        });
    }

    let dsu = RollbackDsu::new(nvars as usize);
    let counts = if gens.is_empty() {
        let mut m = HashMap::new();
        m.insert(0u128, vec![0u64; nvars as usize + 1]);
        m.get_mut(&0).unwrap()[dsu.components()] = 1;
        m
    } else {
        let first = &gens[0];
        (0..first.perms.len())
            .into_par_iter()
            .map(|si| {
                let mut walker = Walker {
                    gens: &gens,
                    dsu: dsu.clone(),
                    acc: HashMap::new(),
                    nvars: nvars as usize,
                };
                walker.sigma_level(0, si, 0);
                walker.acc
            })
            .reduce(HashMap::new, merge_counts)
    };
    Ok(assemble(&gens, counts))
}

fn merge_counts(
    mut a: HashMap<u128, Vec<u64>>,
    b: HashMap<u128, Vec<u64>>,
) -> HashMap<u128, Vec<u64>> {
    for (k, v) in b {
        match a.get_mut(&k) {
            Some(x) => x.iter_mut().zip(v).for_each(|(x, y)| *x += y),
            None => {
                a.insert(k, v);
            }
        }
    }
    a
}

struct Walker<'a> {
    gens: &'a [GenData],
    dsu: RollbackDsu,
    acc: HashMap<u128, Vec<u64>>,
    nvars: usize,
}

impl Walker<'_> {
    fn sigma_level(&mut self, gi: usize, si: usize, key: u128) {
        let g = &self.gens[gi];
        let mark = self.dsu.mark();
        let s = &g.perms[si];
        for a in 0..g.p {
            self.dsu.union(g.rows_plus[a], g.rows_minus[s[a] as usize]);
        }
        let s_inv = &g.inv_perms[si];
        let mut buf = [0u8; 32];
        for t in g.perms.iter() {
            let mark_t = self.dsu.mark();
            for a in 0..g.p {
                self.dsu.union(g.cols_plus[a], g.cols_minus[t[a] as usize]);
            }
            for a in 0..g.p {
                buf[a] = t[s_inv[a] as usize];
            }
            let class = g.table.class_of_images(&buf[..g.p]) as u128;
            let key = key * g.radix + class;
            if gi + 1 == self.gens.len() {
                let c = self.dsu.components();
                let n = self.nvars;
                self.acc.entry(key).or_insert_with(|| vec![0; n + 1])[c] += 1;
            } else {
                for si2 in 0..self.gens[gi + 1].perms.len() {
                    self.sigma_level(gi + 1, si2, key);
                }
            }
            self.dsu.rollback(mark_t);
        }
        self.dsu.rollback(mark);
    }
}

fn assemble(gens: &[GenData], counts: HashMap<u128, Vec<u64>>) -> RatFuncN {
    let den = gens
        .iter()
        .fold(PolyN::one(), |acc, g| &acc * g.table.common_den());
    let mut keys: Vec<_> = counts.into_iter().collect();
    keys.sort_by_key(|(k, _)| *k);
    let mut num = PolyN::zero();
    for (mut key, by_c) in keys {
        let mut term =
            PolyN::from_coeffs(by_c.iter().map(|&c| Rat::from_integer(c.into())).collect());
        for g in gens.iter().rev() {
            let class = (key % g.radix) as usize;
            key /= g.radix;
            term = &term * g.table.numerator_by_class(class);
        }
        num = &num + &term;
    }
    RatFuncN::new(num, den).expect("product of nonzero denominators")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;

    fn w(s: &str, r: usize) -> Word {
        Word::parse_free(s, r).unwrap()
    }

    #[test]
    fn trivial_cases() {
        assert_eq!(
            haar_word_integral(1, &Word::identity(1)).unwrap().value,
            RatFuncN::var()
        );
        assert!(haar_word_integral(1, &w("a", 1)).unwrap().value.is_zero());
        assert_eq!(normalized_trace(1, &w("aA", 1)).unwrap(), RatFuncN::one());
    }

    #[test]
    fn commutator_is_small() {
        // Averaging over a first: int tr(a b A B) = (1/n) E|tr b|^2 = 1/n.
        let v = haar_word_integral(2, &w("abAB", 2)).unwrap();
        assert_eq!(v.value.degree(), Some(-1));
        assert_eq!(v.value.eval_int(4).unwrap(), rat(1, 4));
    }

    #[test]
    fn product_of_traces() {
        // E|tr u|^2 = 1 for n >= 1.
        let v = multi_trace_integral(1, &[w("a", 1), w("A", 1)]).unwrap();
        assert_eq!(v, RatFuncN::one());
        // E tr(u^2) tr(u^-2) = 2 for n >= 2.
        let v = multi_trace_integral(1, &[w("aa", 1), w("AA", 1)]).unwrap();
        assert_eq!(v, RatFuncN::from_int(2));
    }

    #[test]
    fn length_guard() {
        let long = w("abababababAbAbAB", 2);
        assert!(haar_word_integral(2, &long).unwrap_err().is_guard());
    }
}
