//! A second route to `int tr(w) s_label(R) dx` that never builds matching
//! data: expand the mixed character in power sums,
//! `s_[mu,nu](U) = sum_alpha (-1)^|alpha| s_{mu/alpha}(U) s_{nu/alpha'}(conj U)`,
//! and integrate each product of traces of powers of `R` directly.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::Result;
use crate::exactnum::{PolyN, Rat, RatFuncN};
use crate::repdata::MixedLabel;
use crate::symgroup::{character, partitions, Partition};
use crate::wordintegral::multi_trace_integral;
use crate::words::{surface_relator, Word};

fn union(a: &Partition, b: &Partition) -> Partition {
    let mut v: Vec<u32> = a.parts().iter().chain(b.parts()).copied().collect();
    v.sort_unstable_by(|x, y| y.cmp(x));
    Partition::new(v).expect("positive parts")
}

fn contains(outer: &Partition, inner: &Partition) -> bool {
    inner.len() <= outer.len() && inner.parts().iter().zip(outer.parts()).all(|(a, b)| a <= b)
}

fn z_rat(p: &Partition) -> Rat {
    Rat::from_integer(BigInt::from(p.centralizer_order()))
}

/// Coefficients of the power sums `p_rho` in the skew Schur function
/// `s_{lambda/alpha}`.
pub fn skew_schur_power_sums(
    lambda: &Partition,
    alpha: &Partition,
) -> Result<BTreeMap<Partition, Rat>> {
    let mut out = BTreeMap::new();
    if !contains(lambda, alpha) {
        return Ok(out);
    }
    let rest = lambda.size() - alpha.size();
    for rho in partitions(rest) {
        let mut c = Rat::zero();
        for sigma in partitions(alpha.size()) {
            let x = character(lambda, &union(&sigma, &rho))? * character(alpha, &sigma)?;
            if x != 0 {
                c += Rat::from_integer(BigInt::from(x)) / z_rat(&sigma);
            }
        }
        if !c.is_zero() {
            out.insert(rho.clone(), c / z_rat(&rho));
        }
    }
    Ok(out)
}

/// `coeff * prod_i tr(U^{pos_i}) * prod_j tr(U^{-neg_j})`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PowerSumTerm {
    #[serde(with = "crate::exactnum::rat_serde")]
    pub coeff: Rat,
    pub pos: Partition,
    pub neg: Partition,
}

/// The mixed character as a combination of traces of powers.
pub fn mixed_character_power_sums(label: &MixedLabel) -> Result<Vec<PowerSumTerm>> {
    let mut acc: BTreeMap<(Partition, Partition), Rat> = BTreeMap::new();
    for a in 0..=label.k().min(label.l()) {
        for alpha in partitions(a) {
            let alpha_t = alpha.conjugate();
            if !contains(&label.mu, &alpha) || !contains(&label.nu, &alpha_t) {
                continue;
            }
            let sign = if a % 2 == 0 { Rat::one() } else { -Rat::one() };
            let left = skew_schur_power_sums(&label.mu, &alpha)?;
            let right = skew_schur_power_sums(&label.nu, &alpha_t)?;
            for (p, cp) in &left {
                for (q, cq) in &right {
                    *acc.entry((p.clone(), q.clone())).or_insert_with(Rat::zero) += &sign * cp * cq;
                }
            }
        }
    }
    Ok(acc
        .into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|((pos, neg), coeff)| PowerSumTerm { coeff, pos, neg })
        .collect())
}

/// The expansion evaluated at the identity of `U(n)`, a polynomial in `n`.
pub fn power_sum_dimension(label: &MixedLabel) -> Result<PolyN> {
    let mut p = PolyN::zero();
    for t in mixed_character_power_sums(label)? {
        p = &p + &PolyN::monomial(t.coeff, t.pos.len() + t.neg.len());
    }
    Ok(p)
}

fn power(w: &Word, e: u32) -> Word {
    (0..e).fold(Word::identity(w.rank()), |acc, _| acc.concat(w))
}

/// `int tr(w(x)) s_label(R_g(x)) dx` over `U(n)^{2g}` by the power-sum route.
pub fn j_via_traces(w: &Word, label: &MixedLabel) -> Result<RatFuncN> {
    let g = w.rank() / 2;
    let rel = surface_relator(g);
    let rel_inv = rel.inverse();
    let mut total = RatFuncN::zero();
    for t in mixed_character_power_sums(label)? {
        let mut words = vec![w.clone()];
        words.extend(t.pos.parts().iter().map(|&e| power(&rel, e)));
        words.extend(t.neg.parts().iter().map(|&e| power(&rel_inv, e)));
        let v = multi_trace_integral(2 * g, &words)?;
        total = &total + &v.scale(&t.coeff);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;
    use crate::repdata::{dim_mixed_poly, labels_up_to};

    #[test]
    fn adjoint_expansion() {
        let l = MixedLabel::from_parts(&[1], &[1]).unwrap();
        let terms = mixed_character_power_sums(&l).unwrap();
        assert_eq!(terms.len(), 2);
        assert!(terms.contains(&PowerSumTerm {
            coeff: rat(-1, 1),
            pos: Partition::empty(),
            neg: Partition::empty()
        }));
    }

    #[test]
    fn expansion_reproduces_dimensions() {
        for l in labels_up_to(4) {
            assert_eq!(
                power_sum_dimension(&l).unwrap(),
                dim_mixed_poly(&l).unwrap(),
                "{l}"
            );
        }
    }
}
