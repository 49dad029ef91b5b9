//! Highest weights of irreducible unitary representations and their dimensions.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};
use crate::exactnum::{rat_int, PolyN, Rat};
use crate::symgroup::{partitions, Partition};

/// Weakly decreasing integer highest weight of `U(n)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature(pub Vec<i64>);

impl Signature {
    pub fn new(v: Vec<i64>) -> Result<Self> {
        if v.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument(format!(
                "{v:?} is not weakly decreasing"
            )));
        }
        Ok(Signature(v))
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }
}

/// A pair of Young diagrams `[mu, nu]`: positive part `mu`, negative part `nu`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MixedLabel {
    pub mu: Partition,
    pub nu: Partition,
}

impl MixedLabel {
    pub fn new(mu: Partition, nu: Partition) -> Self {
        MixedLabel { mu, nu }
    }

    pub fn from_parts(mu: &[u32], nu: &[u32]) -> Result<Self> {
        Ok(MixedLabel {
            mu: Partition::new(mu.to_vec())?,
            nu: Partition::new(nu.to_vec())?,
        })
    }

    /// Number of boxes in `mu`.
    pub fn k(&self) -> usize {
        self.mu.size()
    }

    /// Number of boxes in `nu`.
    pub fn l(&self) -> usize {
        self.nu.size()
    }

    /// Smallest `n` for which the label names a representation of `U(n)`.
    pub fn min_rank(&self) -> usize {
        self.mu.len() + self.nu.len()
    }

    /// The label of the dual representation.
    pub fn dual(&self) -> MixedLabel {
        MixedLabel {
            mu: self.nu.clone(),
            nu: self.mu.clone(),
        }
    }
}

impl fmt::Display for MixedLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.mu, self.nu)
    }
}

/// `(mu_1, .., mu_r, 0, .., 0, -nu_s, .., -nu_1)` of length `n`.
pub fn signature_of(label: &MixedLabel, n: usize) -> Result<Signature> {
    if n < label.min_rank() {
        return Err(Error::InvalidArgument(format!(
            "label {label} needs n >= {}",
            label.min_rank()
        )));
    }
    let mut v = vec![0i64; n];
    for (i, &p) in label.mu.parts().iter().enumerate() {
        v[i] = p as i64;
    }
    for (j, &q) in label.nu.parts().iter().enumerate() {
        v[n - 1 - j] = -(q as i64);
    }
    Signature::new(v)
}

/// Weyl dimension formula evaluated exactly.
pub fn weyl_dimension(sig: &Signature) -> BigInt {
    let l = &sig.0;
    let n = l.len();
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..n {
        for j in i + 1..n {
            num *= BigInt::from(l[i] - l[j] + (j - i) as i64);
            den *= BigInt::from((j - i) as i64);
        }
    }
    num / den
}

/// Dimension of the polynomial representation `lambda` of `U(n)` as a
/// polynomial in `n`, by the hook-content formula.
pub fn dim_un_poly(lambda: &Partition) -> PolyN {
    let mut p = PolyN::one();
    let mut hooks = BigInt::one();
    for (i, j) in lambda.boxes() {
        p = &p * &PolyN::linear(j as i64 - i as i64);
        hooks *= BigInt::from(lambda.hook_length(i, j));
    }
    p.scale(&Rat::new(BigInt::one(), hooks))
}

/// Dimension of the mixed representation `[mu, nu]` as a polynomial in `n`,
/// interpolated from the Weyl formula with surplus points as a check.
pub fn dim_mixed_poly(label: &MixedLabel) -> Result<PolyN> {
    let degree = label.k() + label.l();
    let start = label.min_rank().max(1);
    let points: Vec<(Rat, Rat)> = (start..start + degree + 3)
        .map(|n| {
            let d = weyl_dimension(&signature_of(label, n)?);
            Ok((rat_int(n as i64), Rat::from_integer(d)))
        })
        .collect::<Result<_>>()?;
    PolyN::interpolate(&points, degree)
}

/// All labels with `|mu| + |nu| <= max_boxes`, ordered by total size.
pub fn labels_up_to(max_boxes: usize) -> Vec<MixedLabel> {
    let mut out = Vec::new();
    for total in 0..=max_boxes {
        for k in (0..=total).rev() {
            for mu in partitions(k) {
                for nu in partitions(total - k) {
                    out.push(MixedLabel::new(mu.clone(), nu));
                }
            }
        }
    }
    out
}

/// `sum 1/dim(lambda)^s` over irreducibles of `SU(n)` with at most `max_boxes`
/// boxes, each written as a partition with at most `n - 1` rows.
pub fn witten_zeta_truncated(s: u32, n: usize, max_boxes: usize) -> Result<Rat> {
    if s < 1 {
        return Err(Error::InvalidArgument("exponent must be at least 1".into()));
    }
    if n < 2 {
        return Err(Error::InvalidArgument("rank must be at least 2".into()));
    }
    let mut total = Rat::zero();
    let nn = n as i64;
    for b in 0..=max_boxes {
        for lambda in partitions(b) {
            if lambda.len() > n - 1 {
                continue;
            }
            let d = dim_un_poly(&lambda).eval_int(nn);
            total += num_traits::pow(d, s as usize).recip();
        }
    }
    Ok(total)
}
