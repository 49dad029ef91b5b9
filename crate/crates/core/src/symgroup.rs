//! Permutations, partitions and characters of symmetric groups.
//!
//! Permutations act on `{0, .., m-1}` internally and print 1-based in cycle
//! notation. Products compose right to left: `(s * t)(i) = s(t(i))`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{rat, Rat, RatFuncN};

/// Largest degree for which the full group may be enumerated.
pub const MAX_ENUM_DEGREE: usize = 9;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    img: Vec<u8>,
}

impl Permutation {
    pub fn identity(m: usize) -> Self {
        Permutation {
            img: (0..m as u8).collect(),
        }
    }

    /// Builds from 0-based images, checking bijectivity.
    pub fn from_images(img: Vec<u8>) -> Result<Self> {
        let m = img.len();
        let mut seen = vec![false; m];
        for &x in &img {
            let x = x as usize;
            if x >= m || seen[x] {
                return Err(Error::InvalidArgument(format!(
                    "{img:?} is not a permutation"
                )));
            }
            seen[x] = true;
        }
        Ok(Permutation { img })
    }

    /// Builds from 1-based images `[s(1), .., s(m)]`.
    pub fn from_one_based(img: &[usize]) -> Result<Self> {
        let v = img
            .iter()
            .map(|&x| {
                x.checked_sub(1)
                    .map(|y| y as u8)
                    .ok_or_else(|| Error::InvalidArgument("images are 1-based".into()))
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::from_images(v)
    }

    /// Builds from 1-based cycles; unlisted points are fixed.
    pub fn from_cycles(m: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut img: Vec<u8> = (0..m as u8).collect();
        let mut seen = vec![false; m];
        for c in cycles {
            for (i, &x) in c.iter().enumerate() {
                if x == 0 || x > m || seen[x - 1] {
                    return Err(Error::InvalidArgument(format!("bad cycle {c:?}")));
                }
                seen[x - 1] = true;
                img[x - 1] = (c[(i + 1) % c.len()] - 1) as u8;
            }
        }
        Ok(Permutation { img })
    }

    /// Parses cycle notation such as `(1 2)(3 4 5)` or `()`.
    pub fn parse_cycles(m: usize, s: &str) -> Result<Self> {
        let mut cycles = Vec::new();
        let mut rest = s.trim();
        while !rest.is_empty() {
            let body = rest
                .strip_prefix('(')
                .and_then(|r| r.split_once(')'))
                .ok_or_else(|| Error::Parse(format!("bad cycle notation {s:?}")))?;
            let cycle = body
                .0
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad cycle notation {s:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            if !cycle.is_empty() {
                cycles.push(cycle);
            }
            rest = body.1.trim_start();
        }
        Self::from_cycles(m, &cycles)
    }

    /// The permutation with the given cycle type, cycles on consecutive points.
    pub fn of_cycle_type(ct: &Partition) -> Self {
        let mut img = Vec::with_capacity(ct.size());
        let mut start = 0usize;
        for &p in ct.parts() {
            let p = p as usize;
            for i in 0..p {
                img.push((start + (i + 1) % p) as u8);
            }
            start += p;
        }
        Permutation { img }
    }

    pub fn degree(&self) -> usize {
        self.img.len()
    }

    pub fn images(&self) -> &[u8] {
        &self.img
    }

    pub fn apply(&self, i: usize) -> usize {
        self.img[i] as usize
    }

    pub fn is_identity(&self) -> bool {
        self.img.iter().enumerate().all(|(i, &x)| i == x as usize)
    }

    /// `self ∘ other`, i.e. apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        debug_assert_eq!(self.degree(), other.degree());
        Permutation {
            img: other.img.iter().map(|&x| self.img[x as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u8; self.img.len()];
        for (i, &x) in self.img.iter().enumerate() {
            inv[x as usize] = i as u8;
        }
        Permutation { img: inv }
    }

    /// Direct sum: `self` on the first block, `other` shifted onto the second.
    pub fn direct_sum(&self, other: &Permutation) -> Permutation {
        let k = self.img.len() as u8;
        let mut img = self.img.clone();
        img.extend(other.img.iter().map(|&x| x + k));
        Permutation { img }
    }

    /// All cycles, including fixed points, each starting at its least element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let m = self.img.len();
        let mut seen = vec![false; m];
        let mut out = Vec::new();
        for s in 0..m {
            if seen[s] {
                continue;
            }
            let mut c = Vec::new();
            let mut x = s;
            while !seen[x] {
                seen[x] = true;
                c.push(x);
                x = self.img[x] as usize;
            }
            out.push(c);
        }
        out
    }

    pub fn num_cycles(&self) -> usize {
        count_cycles(&self.img)
    }

    pub fn cycle_type(&self) -> Partition {
        let mut parts: Vec<u32> = self.cycles().iter().map(|c| c.len() as u32).collect();
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition { parts }
    }

    /// Minimal number of transpositions whose product is `self`.
    pub fn transposition_norm(&self) -> usize {
        self.degree() - self.num_cycles()
    }

    /// True when `self` maps `{0..k}` into itself.
    pub fn preserves_block(&self, k: usize) -> bool {
        self.img[..k].iter().all(|&x| (x as usize) < k)
    }
}

/// Number of cycles of a permutation given by its image array.
pub fn count_cycles(img: &[u8]) -> usize {
    let m = img.len();
    let mut seen = [false; 64];
    debug_assert!(m <= 64);
    let mut c = 0;
    for s in 0..m {
        if seen[s] {
            continue;
        }
        c += 1;
        let mut x = s;
        while !seen[x] {
            seen[x] = true;
            x = img[x] as usize;
        }
    }
    c
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles: Vec<_> = self.cycles().into_iter().filter(|c| c.len() > 1).collect();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            let s: Vec<String> = c.iter().map(|x| (x + 1).to_string()).collect();
            write!(f, "({})", s.join(" "))?;
        }
        Ok(())
    }
}

impl Serialize for Permutation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Lexicographic iterator over `S_m`.
pub struct SymIter {
    next: Option<Vec<u8>>,
}

impl Iterator for SymIter {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let cur = self.next.take()?;
        let mut a = cur.clone();
        // Standard next-permutation step.
        let m = a.len();
        if m > 1 {
            let mut i = m - 1;
            while i > 0 && a[i - 1] >= a[i] {
                i -= 1;
            }
            if i > 0 {
                let mut j = m - 1;
                while a[j] <= a[i - 1] {
                    j -= 1;
                }
                a.swap(i - 1, j);
                a[i..].reverse();
                self.next = Some(a);
            }
        }
        Some(Permutation { img: cur })
    }
}

/// Every permutation of `{0..m}` in lexicographic order of image arrays.
pub fn enumerate_sym(m: usize) -> Result<SymIter> {
    if m > MAX_ENUM_DEGREE {
        return Err(Error::OutOfRange {
            what: "symmetric group degree",
            value: m as i64,
            range: "0..=9",
        });
    }
    Ok(SymIter {
        next: Some((0..m as u8).collect()),
    })
}

/// Collects `S_m` into a vector.
pub fn sym_vec(m: usize) -> Result<Vec<Permutation>> {
    Ok(enumerate_sym(m)?.collect())
}

/// Elements of the Young subgroup for consecutive blocks of the given sizes.
pub fn young_subgroup(blocks: &[usize]) -> Result<Vec<Permutation>> {
    let mut acc = vec![Permutation::identity(0)];
    for &b in blocks {
        let factor = sym_vec(b)?;
        acc = acc
            .iter()
            .flat_map(|p| factor.iter().map(move |q| p.direct_sum(q)))
            .collect();
    }
    Ok(acc)
}

/// `min |s0^-1 s|` over `s0` in `S_k x S_l` acting on the two blocks.
pub fn coset_norm(sigma: &Permutation, k: usize, l: usize) -> Result<usize> {
    if sigma.degree() != k + l {
        return Err(Error::DegreeMismatch {
            expected: k + l,
            got: sigma.degree(),
        });
    }
    let mut best = usize::MAX;
    for s0 in young_subgroup(&[k, l])? {
        best = best.min(s0.inverse().compose(sigma).transposition_norm());
        if best == 0 {
            break;
        }
    }
    Ok(best)
}

/// A weakly decreasing sequence of positive parts; serves both as Young
/// diagram and as cycle type.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Partition {
    parts: Vec<u32>,
}

pub type YoungDiagram = Partition;

impl TryFrom<Vec<u32>> for Partition {
    type Error = Error;
    fn try_from(v: Vec<u32>) -> Result<Self> {
        Partition::new(v)
    }
}

impl From<Partition> for Vec<u32> {
    fn from(p: Partition) -> Vec<u32> {
        p.parts
    }
}

impl Partition {
    /// Accepts a weakly decreasing sequence; trailing zeros are dropped.
    pub fn new(mut parts: Vec<u32>) -> Result<Self> {
        while parts.last() == Some(&0) {
            parts.pop();
        }
        if parts.windows(2).any(|w| w[0] < w[1]) || parts.contains(&0) {
            return Err(Error::InvalidArgument(format!(
                "{parts:?} is not a partition"
            )));
        }
        Ok(Partition { parts })
    }

    pub fn empty() -> Self {
        Partition { parts: Vec::new() }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn size(&self) -> usize {
        self.parts.iter().map(|&p| p as usize).sum()
    }

    /// Number of rows.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn conjugate(&self) -> Partition {
        let cols = self.parts.first().copied().unwrap_or(0);
        let parts = (1..=cols)
            .map(|j| self.parts.iter().filter(|&&p| p >= j).count() as u32)
            .collect();
        Partition { parts }
    }

    /// Boxes as `(row, col)`, 0-based.
    pub fn boxes(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.parts
            .iter()
            .enumerate()
            .flat_map(|(i, &p)| (0..p as usize).map(move |j| (i, j)))
    }

    pub fn hook_length(&self, row: usize, col: usize) -> usize {
        let arm = self.parts[row] as usize - col - 1;
        let leg = self.parts[row + 1..]
            .iter()
            .filter(|&&p| p as usize > col)
            .count();
        arm + leg + 1
    }

    /// Order of the centralizer of a permutation with this cycle type.
    pub fn centralizer_order(&self) -> u128 {
        let mut counts: BTreeMap<u32, u32> = BTreeMap::new();
        for &p in &self.parts {
            *counts.entry(p).or_default() += 1;
        }
        counts
            .iter()
            .map(|(&p, &c)| (p as u128).pow(c) * factorial(c as usize))
            .product()
    }

    /// Number of permutations with this cycle type.
    pub fn class_size(&self) -> u128 {
        factorial(self.size()) / self.centralizer_order()
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

pub fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// All partitions of `k` in reverse lexicographic order, starting with `(k)`.
pub fn partitions(k: usize) -> Vec<Partition> {
    fn rec(rest: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if rest == 0 {
            out.push(Partition { parts: cur.clone() });
            return;
        }
        for p in (1..=rest.min(max)).rev() {
            cur.push(p);
            rec(rest - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(k as u32, k as u32, &mut Vec::new(), &mut out);
    out
}

/// Dimension of the irreducible representation of `S_k` by the hook length formula.
pub fn dim_irrep(lambda: &Partition) -> u128 {
    let hooks: u128 = lambda
        .boxes()
        .map(|(i, j)| lambda.hook_length(i, j) as u128)
        .product();
    factorial(lambda.size()) / hooks
}

type CharKey = (Vec<u32>, Vec<u32>);

fn char_memo() -> &'static Mutex<HashMap<CharKey, i64>> {
    static MEMO: OnceLock<Mutex<HashMap<CharKey, i64>>> = OnceLock::new();
    MEMO.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Irreducible character value by the Murnaghan–Nakayama rule.
pub fn character(lambda: &Partition, rho: &Partition) -> Result<i64> {
    if lambda.size() != rho.size() {
        return Err(Error::SizeMismatch {
            expected: lambda.size(),
            got: rho.size(),
        });
    }
    Ok(mn_rec(&lambda.parts, &rho.parts))
}

fn mn_rec(lambda: &[u32], rho: &[u32]) -> i64 {
    if rho.is_empty() {
        return 1;
    }
    let key = (lambda.to_vec(), rho.to_vec());
    if let Some(&v) = char_memo().lock().unwrap().get(&key) {
        return v;
    }
    let r = rho[0] as i64;
    let len = lambda.len() as i64;
    let beta: Vec<i64> = lambda
        .iter()
        .enumerate()
        .map(|(i, &p)| p as i64 + len - 1 - i as i64)
        .collect();
    let mut total = 0i64;
    for (idx, &b) in beta.iter().enumerate() {
        let nb = b - r;
        if nb < 0 || beta.contains(&nb) {
            continue;
        }
        let height = beta.iter().filter(|&&x| x > nb && x < b).count();
        let mut nbeta = beta.clone();
        nbeta[idx] = nb;
        nbeta.sort_unstable_by(|a, b| b.cmp(a));
        let nl = nbeta.len() as i64;
        let nlambda: Vec<u32> = nbeta
            .iter()
            .enumerate()
            .map(|(i, &x)| (x - (nl - 1 - i as i64)) as u32)
            .filter(|&p| p > 0)
            .collect();
        let sign = if height % 2 == 0 { 1 } else { -1 };
        total += sign * mn_rec(&nlambda, &rho[1..]);
    }
    char_memo().lock().unwrap().insert(key, total);
    total
}

/// Coefficient of `sigma` in the central idempotent of the irreducible `lambda`.
pub fn central_idempotent_coeff(lambda: &Partition, sigma: &Permutation) -> Result<Rat> {
    let chi = character(lambda, &sigma.cycle_type())?;
    let d = dim_irrep(lambda) as i64;
    Ok(rat(d * chi, 1) / Rat::from_integer((factorial(lambda.size())).into()))
}

/// Ring operations needed for group algebra coefficients.
pub trait Scalar: Clone + PartialEq + fmt::Debug {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
}

impl Scalar for Rat {
    fn zero() -> Self {
        Zero::zero()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
}

impl Scalar for RatFuncN {
    fn zero() -> Self {
        RatFuncN::zero()
    }
    fn is_zero(&self) -> bool {
        RatFuncN::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
}

/// Sparse element of the group algebra of `S_m`; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupAlgebraElement<C: Scalar> {
    degree: usize,
    terms: BTreeMap<Permutation, C>,
}

impl<C: Scalar> GroupAlgebraElement<C> {
    pub fn zero(degree: usize) -> Self {
        GroupAlgebraElement {
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn add_term(&mut self, sigma: Permutation, c: C) {
        debug_assert_eq!(sigma.degree(), self.degree);
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&sigma) {
            Some(v) => {
                let s = v.add(&c);
                if s.is_zero() {
                    self.terms.remove(&sigma);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(sigma, c);
            }
        }
    }

    pub fn coeff(&self, sigma: &Permutation) -> C {
        self.terms.get(sigma).cloned().unwrap_or_else(C::zero)
    }

    pub fn terms(&self) -> &BTreeMap<Permutation, C> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (s, c) in &other.terms {
            out.add_term(s.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero(self.degree);
        for (s, v) in &self.terms {
            out.add_term(s.clone(), v.mul(c));
        }
        out
    }

    /// Convolution product: the coefficient of `s t` collects `a(s) b(t)`.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.degree, other.degree, "group algebra degree mismatch");
        let mut acc: BTreeMap<Permutation, C> = BTreeMap::new();
        for (s, a) in &self.terms {
            for (t, b) in &other.terms {
                let st = s.compose(t);
                let v = a.mul(b);
                match acc.get_mut(&st) {
                    Some(x) => *x = x.add(&v),
                    None => {
                        acc.insert(st, v);
                    }
                }
            }
        }
        acc.retain(|_, v| !v.is_zero());
        GroupAlgebraElement {
            degree: self.degree,
            terms: acc,
        }
    }
}

impl GroupAlgebraElement<Rat> {
    /// Sum of the given permutations with coefficient one each.
    pub fn indicator(degree: usize, elems: &[Permutation]) -> Self {
        let mut out = Self::zero(degree);
        for s in elems {
            out.add_term(s.clone(), Rat::one());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[u32]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn enumeration_sizes_and_guard() {
        assert_eq!(enumerate_sym(0).unwrap().count(), 1);
        assert_eq!(enumerate_sym(4).unwrap().count(), 24);
        assert!(matches!(enumerate_sym(10), Err(Error::OutOfRange { .. })));
        let v = sym_vec(3).unwrap();
        assert!(v.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn coset_norm_examples() {
        let t = Permutation::from_cycles(2, &[vec![1, 2]]).unwrap();
        assert_eq!(coset_norm(&t, 1, 1).unwrap(), 1);
        assert_eq!(coset_norm(&t, 2, 0).unwrap(), 0);
        assert!(coset_norm(&t, 2, 1).is_err());
    }

    #[test]
    fn small_characters() {
        assert_eq!(character(&p(&[1, 1]), &p(&[2])).unwrap(), -1);
        assert_eq!(character(&p(&[2, 1]), &p(&[3])).unwrap(), -1);
        assert_eq!(dim_irrep(&p(&[2, 1])), 2);
        assert!(character(&p(&[2]), &p(&[3])).is_err());
    }

    #[test]
    fn cycle_notation_round_trip() {
        let s = Permutation::parse_cycles(5, "(1 3)(2 5 4)").unwrap();
        assert_eq!(s.to_string(), "(1 3)(2 5 4)");
        assert_eq!(
            Permutation::parse_cycles(3, "()").unwrap(),
            Permutation::identity(3)
        );
    }

    #[test]
    fn partition_counts() {
        let counts: Vec<usize> = (0..8).map(|k| partitions(k).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 3, 5, 7, 11, 15]);
    }
}
