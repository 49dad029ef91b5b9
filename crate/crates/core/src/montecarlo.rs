//! Floating-point Haar sampling on `U(n)` and Monte Carlo estimates of word
//! traces and mixed characters, used to cross-check the exact pipelines.
//!
//! Samples are drawn in fixed chunks; chunk `c` uses the ChaCha8 stream `c`
//! of the seeded generator, so estimates do not depend on the thread count.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::repdata::{signature_of, MixedLabel};
use crate::words::{surface_relator, Word};

pub const MAX_DIM: usize = 256;
pub const MAX_SAMPLES: u64 = 10_000_000;
/// Samples per RNG stream.
pub const CHUNK: u64 = 256;
/// Below this eigenvalue gap the Weyl ratio is replaced by the dual
/// Jacobi-Trudi determinant.
const MIN_GAP: f64 = 1e-3;

pub type CMatrix = DMatrix<Complex64>;

/// A seeded source of independent Haar unitaries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct HaarSampler {
    pub seed: u64,
    pub n: usize,
}

impl HaarSampler {
    pub fn new(seed: u64, n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(HaarSampler { seed, n })
    }

    /// Generator for stream `stream`.
    pub fn stream(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DIM {
        return Err(Error::OutOfRange {
            what: "matrix dimension",
            value: n as i64,
            range: "1..=256",
        });
    }
    Ok(())
}

fn check_samples(samples: u64) -> Result<()> {
    if samples == 0 || samples > MAX_SAMPLES {
        return Err(Error::OutOfRange {
            what: "sample count",
            value: samples as i64,
            range: "1..=10000000",
        });
    }
    Ok(())
}

/// Haar unitary from the QR factorisation of a complex Ginibre matrix, with
/// the phases of the diagonal of `R` moved into `Q`.
pub fn haar_sample<R: Rng>(n: usize, rng: &mut R) -> CMatrix {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let z = CMatrix::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * scale, im * scale)
    });
    let qr = z.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// `max |(U^* U - I)_{ij}|`.
pub fn unitarity_residual(u: &CMatrix) -> f64 {
    let p = u.adjoint() * u;
    let mut worst: f64 = 0.0;
    for i in 0..u.nrows() {
        for j in 0..u.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((p[(i, j)] - Complex64::new(target, 0.0)).norm());
        }
    }
    worst
}

/// `w` evaluated at the given matrices.
pub fn eval_word(w: &Word, mats: &[CMatrix], n: usize) -> CMatrix {
    let mut out = CMatrix::identity(n, n);
    for l in w.letters() {
        let m = &mats[l.gen as usize];
        out = if l.inv { out * m.adjoint() } else { out * m };
    }
    out
}

/// Compensated sum.
#[derive(Clone, Copy, Debug, Default)]
struct Kahan {
    sum: f64,
    c: f64,
}

impl Kahan {
    fn add(&mut self, x: f64) {
        let y = x - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct Moments {
    re: Kahan,
    im: Kahan,
    sq: Kahan,
    count: u64,
}

impl Moments {
    fn push(&mut self, x: Complex64) {
        self.re.add(x.re);
        self.im.add(x.im);
        self.sq.add(x.norm_sqr());
        self.count += 1;
    }

    fn merge(&mut self, o: &Moments) {
        self.re.add(o.re.sum);
        self.im.add(o.im.sum);
        self.sq.add(o.sq.sum);
        self.count += o.count;
    }
}

/// Sample mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean_re: f64,
    pub mean_im: f64,
    /// Sample standard deviation over `sqrt(samples)`.
    pub std_error: f64,
    pub samples: u64,
}

impl McEstimate {
    pub fn mean(&self) -> Complex64 {
        Complex64::new(self.mean_re, self.mean_im)
    }

    /// `|mean - target|` in units of the standard error.
    pub fn z_score(&self, target: Complex64) -> f64 {
        let d = (self.mean() - target).norm();
        if self.std_error == 0.0 {
            if d <= 1e-9 * (1.0 + target.norm()) {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            d / self.std_error
        }
    }

    fn from_moments(m: &Moments) -> Self {
        let k = m.count as f64;
        let mean = Complex64::new(m.re.sum / k, m.im.sum / k);
        let var = if m.count > 1 {
            ((m.sq.sum - k * mean.norm_sqr()) / (k - 1.0)).max(0.0)
        } else {
            0.0
        };
        McEstimate {
            mean_re: mean.re,
            mean_im: mean.im,
            std_error: (var / k).sqrt(),
            samples: m.count,
        }
    }
}

/// Mean of `f(sample of r unitaries)` over `samples` draws.
pub fn mc_estimate<F>(sampler: HaarSampler, r: usize, samples: u64, f: F) -> Result<McEstimate>
where
    F: Fn(&[CMatrix]) -> Complex64 + Sync,
{
    check_samples(samples)?;
    let chunks = samples.div_ceil(CHUNK);
    let parts: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = sampler.stream(c);
            let size = CHUNK.min(samples - c * CHUNK);
            let mut m = Moments::default();
            for _ in 0..size {
                let mats: Vec<CMatrix> = (0..r).map(|_| haar_sample(sampler.n, &mut rng)).collect();
                m.push(f(&mats));
            }
            m
        })
        .collect();
    let mut total = Moments::default();
    for p in &parts {
        total.merge(p);
    }
    Ok(McEstimate::from_moments(&total))
}

/// Estimate of `int tr(w(x)) dx` over `U(n)^r`.
pub fn mc_word_trace(r: usize, w: &Word, n: usize, samples: u64, seed: u64) -> Result<McEstimate> {
    check_rank(r, w)?;
    let sampler = HaarSampler::new(seed, n)?;
    mc_estimate(sampler, r, samples, |mats| eval_word(w, mats, n).trace())
}

fn check_rank(r: usize, w: &Word) -> Result<()> {
    if w.letters().iter().any(|l| l.gen as usize >= r) {
        return Err(Error::InvalidArgument(format!(
            "word {w} needs more than {r} generators"
        )));
    }
    Ok(())
}

fn det(m: &CMatrix) -> Complex64 {
    if m.nrows() == 0 {
        return Complex64::new(1.0, 0.0);
    }
    m.clone().lu().determinant()
}

/// Eigenvalues of a unitary matrix.
pub fn unitary_eigenvalues(u: &CMatrix) -> Result<Vec<Complex64>> {
    u.eigenvalues()
        .map(|v| v.iter().copied().collect())
        .ok_or_else(|| Error::Violation("eigenvalue iteration did not converge".into()))
}

/// `s_label` at a unitary with the given eigenvalues, by the Weyl ratio of
/// alternants when the spectrum is well separated and by the dual
/// Jacobi-Trudi determinant otherwise.
pub fn mixed_character_from_eigenvalues(label: &MixedLabel, z: &[Complex64]) -> Result<Complex64> {
    let n = z.len();
    let sig = signature_of(label, n)?;
    let mut gap = f64::INFINITY;
    for i in 0..n {
        for j in i + 1..n {
            gap = gap.min((z[i] - z[j]).norm());
        }
    }
    if gap >= MIN_GAP {
        Ok(weyl_ratio(&sig.0, z))
    } else {
        Ok(dual_jacobi_trudi(&sig.0, z))
    }
}

/// `det(z_i^{lambda_j + n - j}) / det(z_i^{n - j})` for unimodular `z`.
pub fn weyl_ratio(sig: &[i64], z: &[Complex64]) -> Complex64 {
    let n = z.len();
    let num = CMatrix::from_fn(n, n, |i, j| z[i].powi((sig[j] + (n - 1 - j) as i64) as i32));
    let den = CMatrix::from_fn(n, n, |i, j| z[i].powi((n - 1 - j) as i32));
    det(&num) / det(&den)
}

/// Elementary symmetric polynomials `e_0..e_n` of `z`.
fn elementary(z: &[Complex64]) -> Vec<Complex64> {
    let mut e = vec![Complex64::new(0.0, 0.0); z.len() + 1];
    e[0] = Complex64::new(1.0, 0.0);
    for (m, &x) in z.iter().enumerate() {
        for j in (1..=m + 1).rev() {
            let prev = e[j - 1];
            e[j] += x * prev;
        }
    }
    e
}

/// `det(z)^{-c} det(e_{kappa'_i - i + j})` with `kappa = sig + c` a partition.
pub fn dual_jacobi_trudi(sig: &[i64], z: &[Complex64]) -> Complex64 {
    let n = z.len();
    let c = (-sig.iter().copied().min().unwrap_or(0)).max(0);
    let kappa: Vec<i64> = sig.iter().map(|&x| x + c).collect();
    let width = kappa.first().copied().unwrap_or(0).max(0) as usize;
    let conj: Vec<i64> = (0..width)
        .map(|col| kappa.iter().filter(|&&r| r > col as i64).count() as i64)
        .collect();
    let e = elementary(z);
    let get = |j: i64| -> Complex64 {
        if j < 0 || j as usize > n {
            Complex64::new(0.0, 0.0)
        } else {
            e[j as usize]
        }
    };
    let m = CMatrix::from_fn(width, width, |i, j| get(conj[i] - i as i64 + j as i64));
    let detz: Complex64 = z.iter().product();
    det(&m) * detz.powi(-(c as i32))
}

/// `s_label(U)`, the trace of `U` in the irreducible representation.
pub fn mixed_character(label: &MixedLabel, u: &CMatrix) -> Result<Complex64> {
    mixed_character_from_eigenvalues(label, &unitary_eigenvalues(u)?)
}

/// Estimate of `int tr(w(x)) s_label(R(x)) dx` over `U(n)^{2g}`.
pub fn mc_j(w: &Word, label: &MixedLabel, n: usize, samples: u64, seed: u64) -> Result<McEstimate> {
    let r = w.rank();
    if !r.is_multiple_of(2) || r < 2 {
        return Err(Error::InvalidArgument(format!("word rank {r} is not 2g")));
    }
    signature_of(label, n)?;
    let rel = surface_relator(r / 2);
    let sampler = HaarSampler::new(seed, n)?;
    let trivial = label.k() + label.l() == 0;
    mc_estimate(sampler, r, samples, |mats| {
        let t = eval_word(w, mats, n).trace();
        if trivial {
            return t;
        }
        let rm = eval_word(&rel, mats, n);
        match mixed_character(label, &rm) {
            Ok(s) => t * s,
            Err(_) => Complex64::new(f64::NAN, f64::NAN),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn samples_are_unitary_and_reproducible() {
        let s = HaarSampler::new(7, 8).unwrap();
        let a = haar_sample(8, &mut s.stream(0));
        let b = haar_sample(8, &mut s.stream(0));
        assert!(unitarity_residual(&a) <= 1e-10);
        assert_eq!(a, b);
        let one = haar_sample(1, &mut s.stream(3));
        assert!((one[(0, 0)].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identity_word_is_exact() {
        let w = Word::identity(2);
        let e = mc_word_trace(2, &w, 5, 300, 1).unwrap();
        assert_eq!(e.mean(), c(5.0));
        assert_eq!(e.std_error, 0.0);
    }

    #[test]
    fn character_basics() {
        let s = HaarSampler::new(3, 5).unwrap();
        let u = haar_sample(5, &mut s.stream(0));
        let fund = MixedLabel::from_parts(&[1], &[]).unwrap();
        let dual = MixedLabel::from_parts(&[], &[1]).unwrap();
        assert!((mixed_character(&fund, &u).unwrap() - u.trace()).norm() < 1e-9);
        assert!((mixed_character(&dual, &u).unwrap() - u.trace().conj()).norm() < 1e-9);
        let adj = MixedLabel::from_parts(&[1], &[1]).unwrap();
        let at_id = mixed_character(&adj, &CMatrix::identity(5, 5)).unwrap();
        assert!((at_id - c(24.0)).norm() < 1e-9);
    }

    #[test]
    fn weyl_and_jacobi_trudi_agree() {
        let s = HaarSampler::new(11, 6).unwrap();
        let mut rng = s.stream(0);
        for label in crate::repdata::labels_up_to(3) {
            let u = haar_sample(6, &mut rng);
            let z = unitary_eigenvalues(&u).unwrap();
            let sig = signature_of(&label, 6).unwrap().0;
            let a = weyl_ratio(&sig, &z);
            let b = dual_jacobi_trudi(&sig, &z);
            assert!((a - b).norm() < 1e-8 * (1.0 + a.norm()), "{label}");
        }
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(HaarSampler::new(0, 0).unwrap_err().is_guard());
        assert!(mc_word_trace(1, &Word::identity(1), 2, 0, 0)
            .unwrap_err()
            .is_guard());
    }
}
