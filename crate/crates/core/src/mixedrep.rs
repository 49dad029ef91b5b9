//! The group algebra element whose image under the tensor action gives the
//! averaged projection onto a mixed irreducible `[mu, nu]`.
//!
//! With `p` the central idempotent of `mu ⊗ nu` in `C[S_k x S_l]` and
//! `Y = S_mu x S_nu` the Young subgroup fixing the highest weight vector,
//! `z = (1/|theta|^2) p (sum_Y y) p Wg_{n,k+l}`. The projection itself is
//! `D_{[mu,nu]}(n)` times the image of `z`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exactnum::{numerator_over, PolyN, Rat, RatFuncN};
use crate::repdata::{dim_mixed_poly, MixedLabel};
use crate::symgroup::{
    character, dim_irrep, factorial, sym_vec, young_subgroup, GroupAlgebraElement, Partition,
    Permutation,
};
use crate::weingarten::{wg_table, GroupAlgElem};

/// Largest `|mu| + |nu|` accepted by [`theta_norm_sq`].
pub const MAX_THETA_BOXES: usize = 6;
/// Largest `|mu| + |nu|` accepted by [`z_theta`].
pub const MAX_Z_BOXES: usize = 5;

fn guard(label: &MixedLabel, max: usize, what: &'static str) -> Result<()> {
    let b = label.k() + label.l();
    if b > max {
        return Err(Error::OutOfRange {
            what,
            value: b as i64,
            range: if max == MAX_Z_BOXES { "1..=5" } else { "0..=6" },
        });
    }
    Ok(())
}

fn parts_usize(p: &Partition) -> Vec<usize> {
    p.parts().iter().map(|&x| x as usize).collect()
}

/// `sum over cosets s Y of (sum_{y in Y} chi(s y))^2` for one factor.
fn coset_character_square_sum(lambda: &Partition) -> Result<Rat> {
    let k = lambda.size();
    let sub = young_subgroup(&parts_usize(lambda))?;
    let mut seen: std::collections::HashSet<Permutation> = Default::default();
    let mut total = BigInt::zero();
    for s in sym_vec(k)? {
        if seen.contains(&s) {
            continue;
        }
        let mut inner = 0i64;
        for y in &sub {
            let sy = s.compose(y);
            inner += character(lambda, &sy.cycle_type())?;
            seen.insert(sy);
        }
        total += BigInt::from(inner) * BigInt::from(inner);
    }
    Ok(Rat::from_integer(total))
}

/// Squared norm of the projected highest weight vector.
pub fn theta_norm_sq(label: &MixedLabel) -> Result<Rat> {
    guard(label, MAX_THETA_BOXES, "theta boxes")?;
    let (k, l) = (label.k(), label.l());
    let c = Rat::new(
        BigInt::from(dim_irrep(&label.mu) * dim_irrep(&label.nu)),
        BigInt::from(factorial(k) * factorial(l)),
    );
    Ok(&c * &c * coset_character_square_sum(&label.mu)? * coset_character_square_sum(&label.nu)?)
}

/// Central idempotent of `mu ⊗ nu` inside `C[S_{k+l}]`.
pub fn p_mu_tensor_nu(label: &MixedLabel) -> Result<GroupAlgebraElement<Rat>> {
    guard(label, MAX_THETA_BOXES, "projector boxes")?;
    let (k, l) = (label.k(), label.l());
    let c = Rat::new(
        BigInt::from(dim_irrep(&label.mu) * dim_irrep(&label.nu)),
        BigInt::from(factorial(k) * factorial(l)),
    );
    let mu_chars: Vec<(Permutation, i64)> = sym_vec(k)?
        .into_iter()
        .map(|s| {
            let x = character(&label.mu, &s.cycle_type())?;
            Ok((s, x))
        })
        .collect::<Result<_>>()?;
    let nu_chars: Vec<(Permutation, i64)> = sym_vec(l)?
        .into_iter()
        .map(|s| {
            let x = character(&label.nu, &s.cycle_type())?;
            Ok((s, x))
        })
        .collect::<Result<_>>()?;
    let mut out = GroupAlgebraElement::zero(k + l);
    for (s1, x1) in &mu_chars {
        for (s2, x2) in &nu_chars {
            let v = x1 * x2;
            if v != 0 {
                out.add_term(s1.direct_sum(s2), &c * Rat::from_integer(BigInt::from(v)));
            }
        }
    }
    Ok(out)
}

/// `p (sum_Y y) p` with rational coefficients.
fn sandwich(label: &MixedLabel) -> Result<GroupAlgebraElement<Rat>> {
    let p = p_mu_tensor_nu(label)?;
    let (k, l) = (label.k(), label.l());
    let mu_sub = young_subgroup(&parts_usize(&label.mu))?;
    let nu_sub = young_subgroup(&parts_usize(&label.nu))?;
    let y: Vec<Permutation> = mu_sub
        .iter()
        .flat_map(|a| nu_sub.iter().map(move |b| a.direct_sum(b)))
        .collect();
    debug_assert!(y.iter().all(|s| s.degree() == k + l));
    let ind = GroupAlgebraElement::indicator(k + l, &y);
    Ok(p.mul(&ind).mul(&p))
}

/// `z_theta` for `1 <= |mu| + |nu| <= 5`.
pub fn z_theta(label: &MixedLabel) -> Result<GroupAlgElem> {
    let t = z_table(label)?;
    let mut out = GroupAlgElem::zero(t.degree);
    for (s, c) in t.perms.iter().zip(&t.coeffs) {
        out.add_term(s.clone(), c.clone());
    }
    Ok(out)
}

/// Dense table of `z_theta` coefficients over `S_{k+l}` in lexicographic order.
#[derive(Debug)]
pub struct ZTable {
    pub label: MixedLabel,
    pub degree: usize,
    pub perms: Vec<Permutation>,
    pub coeffs: Vec<RatFuncN>,
    /// Denominator shared by every coefficient.
    pub common_den: PolyN,
    /// Coefficients multiplied by `common_den`.
    pub numerators: Vec<PolyN>,
    /// `D_{[mu,nu]}(n)`.
    pub dim: PolyN,
}

/// Cached [`ZTable`] for a label with `1 <= |mu| + |nu| <= 5`.
pub fn z_table(label: &MixedLabel) -> Result<Arc<ZTable>> {
    let m = label.k() + label.l();
    if m == 0 {
        return Err(Error::OutOfRange {
            what: "z_theta boxes",
            value: 0,
            range: "1..=5",
        });
    }
    guard(label, MAX_Z_BOXES, "z_theta boxes")?;
    static CACHE: OnceLock<Mutex<HashMap<MixedLabel, Arc<ZTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().unwrap().get(label) {
        return Ok(t.clone());
    }
    let t = Arc::new(build_z_table(label)?);
    Ok(cache
        .lock()
        .unwrap()
        .entry(label.clone())
        .or_insert(t)
        .clone())
}

fn build_z_table(label: &MixedLabel) -> Result<ZTable> {
    let m = label.k() + label.l();
    let a = sandwich(label)?;
    let norm = theta_norm_sq(label)?;
    let inv_norm = norm.recip();
    let wg = wg_table(m)?;
    let perms = sym_vec(m)?;
    let nclass = wg.classes().len();
    let mut coeffs = Vec::with_capacity(perms.len());
    for tau in &perms {
        // z(tau) = sum_s A(s) Wg(s^-1 tau), grouped by the class of s^-1 tau.
        let mut by_class = vec![Rat::zero(); nclass];
        for (s, c) in a.terms() {
            let idx = wg.class_index(&s.inverse().compose(tau).cycle_type());
            by_class[idx] += c;
        }
        let mut num = PolyN::zero();
        for (idx, c) in by_class.iter().enumerate() {
            if !c.is_zero() {
                num = &num + &wg.numerator_by_class(idx).scale(&(c * &inv_norm));
            }
        }
        coeffs.push(RatFuncN::new(num, wg.common_den().clone())?);
    }
    let common_den = wg.common_den().clone();
    let numerators = coeffs
        .iter()
        .map(|c| numerator_over(c, &common_den))
        .collect::<Result<_>>()?;
    Ok(ZTable {
        label: label.clone(),
        degree: m,
        perms,
        coeffs,
        common_den,
        numerators,
        dim: dim_mixed_poly(label)?,
    })
}

/// Coefficients of `z_theta` grouped by permutation, for reporting.
pub fn z_theta_map(label: &MixedLabel) -> Result<BTreeMap<String, RatFuncN>> {
    let t = z_table(label)?;
    Ok(t.perms
        .iter()
        .zip(&t.coeffs)
        .filter(|(_, c)| !c.is_zero())
        .map(|(s, c)| (s.to_string(), c.clone()))
        .collect())
}

/// `D_{[mu,nu]}(n)` times `z_theta`, the coefficients of the projection itself.
pub fn projection_coeffs(label: &MixedLabel) -> Result<Vec<RatFuncN>> {
    let t = z_table(label)?;
    let d = RatFuncN::from_poly(t.dim.clone());
    Ok(t.coeffs.iter().map(|c| c * &d).collect())
}

/// `sum_{s in S_mu x S_nu} p(s)`, an independent route to the squared norm.
pub fn theta_norm_sq_via_projector(label: &MixedLabel) -> Result<Rat> {
    let p = p_mu_tensor_nu(label)?;
    let mu_sub = young_subgroup(&parts_usize(&label.mu))?;
    let nu_sub = young_subgroup(&parts_usize(&label.nu))?;
    let mut total = Rat::zero();
    for a in &mu_sub {
        for b in &nu_sub {
            total += p.coeff(&a.direct_sum(b));
        }
    }
    Ok(total)
}

/// Squared norm and projection coefficients of one label.
#[derive(Clone, Debug)]
pub struct ThetaData {
    pub label: MixedLabel,
    pub norm_sq: Rat,
    pub z: GroupAlgElem,
}

pub fn theta_data(label: &MixedLabel) -> Result<ThetaData> {
    Ok(ThetaData {
        label: label.clone(),
        norm_sq: theta_norm_sq(label)?,
        z: z_theta(label)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{rat, PolyN};

    fn label(mu: &[u32], nu: &[u32]) -> MixedLabel {
        MixedLabel::from_parts(mu, nu).unwrap()
    }

    #[test]
    fn norms() {
        assert_eq!(theta_norm_sq(&label(&[1], &[])).unwrap(), rat(1, 1));
        assert_eq!(theta_norm_sq(&label(&[2], &[])).unwrap(), rat(1, 1));
        assert_eq!(theta_norm_sq(&label(&[1, 1], &[])).unwrap(), rat(1, 2));
    }

    #[test]
    fn z_for_single_box_is_wg1() {
        let z = z_theta(&label(&[1], &[])).unwrap();
        assert_eq!(z.len(), 1);
        assert_eq!(
            z.coeff(&Permutation::identity(1)),
            RatFuncN::new(PolyN::one(), PolyN::var()).unwrap()
        );
    }

    #[test]
    fn z_symmetric_square_identity() {
        let z = z_theta(&label(&[2], &[])).unwrap();
        let expected = RatFuncN::new(PolyN::one(), PolyN::from_ints(&[0, 1, 1])).unwrap();
        assert_eq!(z.coeff(&Permutation::identity(2)), expected);
    }

    #[test]
    fn projector_examples() {
        let p = p_mu_tensor_nu(&label(&[2], &[])).unwrap();
        let t = Permutation::from_cycles(2, &[vec![1, 2]]).unwrap();
        assert_eq!(p.coeff(&Permutation::identity(2)), rat(1, 2));
        assert_eq!(p.coeff(&t), rat(1, 2));
        let p = p_mu_tensor_nu(&label(&[1], &[1])).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.coeff(&Permutation::identity(2)), rat(1, 1));
    }

    #[test]
    fn norm_agrees_with_projector_route() {
        for l in crate::repdata::labels_up_to(5) {
            let a = theta_norm_sq(&l).unwrap();
            assert!(a > Rat::zero(), "{l}");
            assert_eq!(a, theta_norm_sq_via_projector(&l).unwrap(), "{l}");
        }
    }

    #[test]
    fn projector_idempotent() {
        for l in crate::repdata::labels_up_to(4) {
            let p = p_mu_tensor_nu(&l).unwrap();
            assert_eq!(p.mul(&p), p, "{l}");
        }
    }

    #[test]
    fn coefficient_degree_bound() {
        for l in crate::repdata::labels_up_to(4).into_iter().skip(1) {
            let t = z_table(&l).unwrap();
            for (s, c) in t.perms.iter().zip(&t.coeffs) {
                let norm = crate::symgroup::coset_norm(s, l.k(), l.l()).unwrap() as i64;
                let bound = -((l.k() + l.l()) as i64) - norm;
                assert!(c.degree_at_most(bound), "{l} {s} {c}");
            }
        }
    }

    #[test]
    fn z_is_inversion_symmetric() {
        for l in crate::repdata::labels_up_to(4).into_iter().skip(1) {
            let z = z_theta(&l).unwrap();
            for (s, c) in z.terms() {
                assert_eq!(&z.coeff(&s.inverse()), c, "{l} {s}");
            }
        }
    }

    #[test]
    fn z_guard() {
        assert!(z_theta(&label(&[3], &[3])).is_err());
        assert!(z_theta(&label(&[], &[])).is_err());
    }
}
