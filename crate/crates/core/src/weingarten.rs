//! The unitary Weingarten function as an exact rational function of `n`.
//!
//! `Wg(s) = (1/k!^2) sum_lambda d_lambda^2 chi_lambda(s) / D_lambda(n)` with
//! `D_lambda` the polynomial dimension of `lambda`; the identity holds for
//! every `n >= k`, where no partition of `k` has more than `n` rows.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exactnum::{lcm_denominators, numerator_over, PolyN, Rat, RatFuncN};
use crate::repdata::dim_un_poly;
use crate::symgroup::{
    character, dim_irrep, enumerate_sym, factorial, partitions, GroupAlgebraElement, Partition,
    Permutation,
};

pub type GroupAlgElem = GroupAlgebraElement<RatFuncN>;

/// Largest `k` for which whole group algebra elements are materialised.
pub const MAX_WG_ELEMENT_DEGREE: usize = 7;

/// Largest `k` for which class coefficients are tabulated.
pub const MAX_WG_TABLE_DEGREE: usize = 16;

/// Weingarten coefficients of `S_m` indexed by cycle type.
#[derive(Debug)]
pub struct WgTable {
    m: usize,
    classes: Vec<Partition>,
    index: HashMap<Partition, usize>,
    coeffs: Vec<RatFuncN>,
    common_den: PolyN,
    numerators: Vec<PolyN>,
    by_code: HashMap<u128, usize>,
}

/// Sorted cycle lengths packed five bits apiece.
pub(crate) fn cycle_code(img: &[u8]) -> u128 {
    let mut seen = [false; 32];
    let mut lens = [0u8; 32];
    let mut nl = 0;
    for start in 0..img.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0u8;
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            x = img[x] as usize;
            len += 1;
        }
        lens[nl] = len;
        nl += 1;
    }
    let lens = &mut lens[..nl];
    lens.sort_unstable_by(|a, b| b.cmp(a));
    lens.iter().fold(0u128, |acc, &l| (acc << 5) | l as u128)
}

impl WgTable {
    fn build(m: usize) -> Self {
        let classes = partitions(m);
        let index = classes
            .iter()
            .enumerate()
            .map(|(i, c)| (c.clone(), i))
            .collect();
        let kf = Rat::from_integer(BigInt::from(factorial(m)));
        let norm = (&kf * &kf).recip();
        let lambdas = partitions(m);
        let irreps: Vec<(i128, RatFuncN)> = lambdas
            .iter()
            .map(|lam| {
                let d = dim_irrep(lam) as i128;
                let dp = RatFuncN::from_poly(dim_un_poly(lam));
                (d * d, dp.recip().expect("dimension polynomial is nonzero"))
            })
            .collect();
        let coeffs: Vec<RatFuncN> = classes
            .iter()
            .map(|rho| {
                let mut acc = RatFuncN::zero();
                for (lam, (d2, inv)) in lambdas.iter().zip(&irreps) {
                    let chi = character(lam, rho).expect("sizes agree") as i128;
                    if chi == 0 {
                        continue;
                    }
                    let c = Rat::from_integer(BigInt::from(d2 * chi));
                    acc = &acc + &inv.scale(&c);
                }
                acc.scale(&norm)
            })
            .collect();
        let common_den = lcm_denominators(&coeffs);
        let numerators = coeffs
            .iter()
            .map(|c| numerator_over(c, &common_den).expect("lcm is a common multiple"))
            .collect();
        let by_code = classes
            .iter()
            .enumerate()
            .map(|(i, c)| {
                (
                    c.parts()
                        .iter()
                        .fold(0u128, |acc, &l| (acc << 5) | l as u128),
                    i,
                )
            })
            .collect();
        WgTable {
            m,
            by_code,
            classes,
            index,
            coeffs,
            common_den,
            numerators,
        }
    }

    pub fn degree(&self) -> usize {
        self.m
    }

    pub fn classes(&self) -> &[Partition] {
        &self.classes
    }

    pub fn class_index(&self, ct: &Partition) -> usize {
        self.index[ct]
    }

    /// Class index of the permutation with the given images.
    pub fn class_of_images(&self, img: &[u8]) -> usize {
        self.by_code[&cycle_code(img)]
    }

    pub fn coeff_by_class(&self, idx: usize) -> &RatFuncN {
        &self.coeffs[idx]
    }

    pub fn coeff(&self, sigma: &Permutation) -> &RatFuncN {
        &self.coeffs[self.class_index(&sigma.cycle_type())]
    }

    /// Monic least common denominator of every class coefficient.
    pub fn common_den(&self) -> &PolyN {
        &self.common_den
    }

    /// Class coefficient multiplied by [`Self::common_den`].
    pub fn numerator_by_class(&self, idx: usize) -> &PolyN {
        &self.numerators[idx]
    }

    /// Exact values at a fixed `n`, indexed by class.
    pub fn values_at(&self, n: i64) -> Result<Vec<Rat>> {
        self.coeffs.iter().map(|c| c.eval_int(n)).collect()
    }
}

/// Cached Weingarten table for `S_m`.
pub fn wg_table(m: usize) -> Result<Arc<WgTable>> {
    if m > MAX_WG_TABLE_DEGREE {
        return Err(Error::OutOfRange {
            what: "Weingarten degree",
            value: m as i64,
            range: "0..=16",
        });
    }
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<WgTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().unwrap().get(&m) {
        return Ok(t.clone());
    }
    let t = Arc::new(WgTable::build(m));
    Ok(cache.lock().unwrap().entry(m).or_insert(t).clone())
}

/// `Wg_{n,k}(sigma)` with `k` the degree of `sigma`.
pub fn wg_coeff(sigma: &Permutation) -> Result<RatFuncN> {
    Ok(wg_table(sigma.degree())?.coeff(sigma).clone())
}

/// The full Weingarten element of `C[S_k]` for `1 <= k <= 7`.
pub fn wg_element(k: usize) -> Result<GroupAlgElem> {
    if !(1..=MAX_WG_ELEMENT_DEGREE).contains(&k) {
        return Err(Error::OutOfRange {
            what: "Weingarten element degree",
            value: k as i64,
            range: "1..=7",
        });
    }
    let t = wg_table(k)?;
    let mut out = GroupAlgElem::zero(k);
    for s in enumerate_sym(k)? {
        let c = t.coeff(&s).clone();
        out.add_term(s, c);
    }
    Ok(out)
}

/// `int u_{i1 j1} .. u_{ik jk} conj(u_{i'1 j'1}) .. conj(u_{i'k j'k}) du` over
/// `U(n0)`, with 1-based index tuples of a common length `k <= n0`.
pub fn entry_integral(
    i: &[usize],
    j: &[usize],
    ip: &[usize],
    jp: &[usize],
    n0: usize,
) -> Result<Rat> {
    let k = i.len();
    for v in [j, ip, jp] {
        if v.len() != k {
            return Err(Error::SizeMismatch {
                expected: k,
                got: v.len(),
            });
        }
    }
    if n0 < k.max(1) {
        return Err(Error::InvalidArgument(format!(
            "need n0 >= k, got n0 = {n0}, k = {k}"
        )));
    }
    if let Some(&x) = i
        .iter()
        .chain(j)
        .chain(ip)
        .chain(jp)
        .find(|&&x| x == 0 || x > n0)
    {
        return Err(Error::InvalidArgument(format!(
            "index {x} outside 1..={n0}"
        )));
    }
    let t = wg_table(k)?;
    let vals = t.values_at(n0 as i64)?;
    let perms: Vec<Permutation> = enumerate_sym(k)?.collect();
    let rows: Vec<&Permutation> = perms
        .iter()
        .filter(|s| (0..k).all(|a| i[a] == ip[s.apply(a)]))
        .collect();
    let cols: Vec<&Permutation> = perms
        .iter()
        .filter(|s| (0..k).all(|a| j[a] == jp[s.apply(a)]))
        .collect();
    let mut total = Rat::zero();
    for s in &rows {
        let s_inv = s.inverse();
        for t_ in &cols {
            total += &vals[t.class_index(&t_.compose(&s_inv).cycle_type())];
        }
    }
    Ok(total)
}
