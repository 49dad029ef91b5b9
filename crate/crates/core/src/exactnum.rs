//! Exact rationals, univariate polynomials in `n`, and reduced rational functions.
//!
//! Polynomials are dense with ascending coefficients and no trailing zeros, so
//! the zero polynomial is the empty vector. Rational functions keep a monic
//! denominator coprime to the numerator; zero is stored as `0/1`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rat = BigRational;

pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

pub fn rat_int(p: i64) -> Rat {
    Rat::from_integer(BigInt::from(p))
}

/// Renders a rational as `"p/q"`, always with an explicit denominator.
pub fn rat_to_string(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `"p/q"` or a bare integer `"p"`.
pub fn rat_from_str(s: &str) -> Result<Rat> {
    let s = s.trim();
    let parse = |t: &str| {
        t.trim()
            .parse::<BigInt>()
            .map_err(|_| Error::Parse(format!("bad rational {s:?}")))
    };
    match s.split_once('/') {
        Some((p, q)) => {
            let q = parse(q)?;
            if q.is_zero() {
                return Err(Error::DivisionByZero);
            }
            Ok(Rat::new(parse(p)?, q))
        }
        None => Ok(Rat::from_integer(parse(s)?)),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct PolyN {
    coeffs: Vec<Rat>,
}

impl PolyN {
    pub fn zero() -> Self {
        PolyN { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// The polynomial `n`.
    pub fn var() -> Self {
        Self::monomial(Rat::one(), 1)
    }

    /// The linear polynomial `n + c`.
    pub fn linear(c: i64) -> Self {
        Self::from_coeffs(vec![rat_int(c), Rat::one()])
    }

    pub fn monomial(c: Rat, degree: usize) -> Self {
        let mut coeffs = vec![Rat::zero(); degree + 1];
        coeffs[degree] = c;
        Self::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        PolyN { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| rat_int(c)).collect())
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rat {
        self.coeffs.get(i).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rat> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_int(&self, x: i64) -> Rat {
        let x = BigInt::from(x);
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * &x + c;
        }
        acc
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        PolyN {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Multiplies by `n^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Rat::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        PolyN { coeffs }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Self::zero(),
            Some(l) => {
                let inv = l.recip();
                self.scale(&inv)
            }
        }
    }

    pub fn div_rem(&self, divisor: &PolyN) -> Result<(PolyN, PolyN)> {
        let dd = divisor.degree().ok_or(Error::DivisionByZero)?;
        let lead_inv = divisor.coeffs[dd].recip();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((PolyN::zero(), self.clone()));
        }
        let mut quot = vec![Rat::zero(); rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let q = &rem[i + dd] * &lead_inv;
            if !q.is_zero() {
                for (j, d) in divisor.coeffs.iter().enumerate() {
                    rem[i + j] -= &q * d;
                }
            }
            quot[i] = q;
        }
        rem.truncate(dd);
        Ok((PolyN::from_coeffs(quot), PolyN::from_coeffs(rem)))
    }

    /// Divides by `n - root`, assuming the remainder is zero.
    fn deflate(&self, root: &BigInt) -> PolyN {
        let d = self.coeffs.len() - 1;
        let mut quot = vec![Rat::zero(); d];
        let mut carry = Rat::zero();
        for i in (0..d).rev() {
            carry = &self.coeffs[i + 1] + carry * root;
            quot[i] = carry.clone();
        }
        PolyN::from_coeffs(quot)
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &PolyN) -> PolyN {
        let mut a = self.monic();
        let mut b = other.monic();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("divisor is nonzero");
            a = b;
            b = r.monic();
        }
        a
    }

    /// Integer-coefficient multiple with coprime coefficients, for fast modular checks.
    fn primitive_integer_coeffs(&self) -> Vec<BigInt> {
        let mut lcm = BigInt::one();
        for c in &self.coeffs {
            lcm = lcm.lcm(c.denom());
        }
        self.coeffs
            .iter()
            .map(|c| (c * Rat::from_integer(lcm.clone())).to_integer())
            .collect()
    }

    /// Interpolates the unique polynomial of degree at most `degree_bound`
    /// through the first `degree_bound + 1` points and checks that every
    /// remaining point lies on it.
    pub fn interpolate(points: &[(Rat, Rat)], degree_bound: usize) -> Result<PolyN> {
        let needed = degree_bound + 1;
        if points.len() < needed {
            return Err(Error::InsufficientPoints {
                needed,
                got: points.len(),
            });
        }
        let (fit, extra) = points.split_at(needed);
        for i in 0..fit.len() {
            for j in 0..i {
                if fit[i].0 == fit[j].0 {
                    return Err(Error::InvalidArgument("repeated interpolation node".into()));
                }
            }
        }
        // Newton divided differences.
        let xs: Vec<&Rat> = fit.iter().map(|p| &p.0).collect();
        let mut dd: Vec<Rat> = fit.iter().map(|p| p.1.clone()).collect();
        for level in 1..needed {
            for i in (level..needed).rev() {
                dd[i] = (&dd[i] - &dd[i - 1]) / (xs[i] - xs[i - level]);
            }
        }
        let mut poly = PolyN::constant(dd[needed - 1].clone());
        for i in (0..needed - 1).rev() {
            let factor = PolyN::from_coeffs(vec![-xs[i].clone(), Rat::one()]);
            poly = &(&poly * &factor) + &PolyN::constant(dd[i].clone());
        }
        for (x, y) in extra {
            if &poly.eval(x) != y {
                return Err(Error::InterpolationMismatch(degree_bound));
            }
        }
        Ok(poly)
    }
}

impl fmt::Display for PolyN {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let show_coeff = i == 0 || !abs.is_one();
            if show_coeff {
                if abs.is_integer() {
                    write!(f, "{}", abs.numer())?;
                } else {
                    write!(f, "({}/{})", abs.numer(), abs.denom())?;
                }
            }
            match i {
                0 => {}
                1 => write!(f, "{}n", if show_coeff { "*" } else { "" })?,
                _ => write!(f, "{}n^{}", if show_coeff { "*" } else { "" }, i)?,
            }
        }
        Ok(())
    }
}

impl Add for &PolyN {
    type Output = PolyN;
    fn add(self, rhs: &PolyN) -> PolyN {
        let (long, short) = if self.coeffs.len() >= rhs.coeffs.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut coeffs = long.coeffs.clone();
        for (c, s) in coeffs.iter_mut().zip(&short.coeffs) {
            *c += s;
        }
        PolyN::from_coeffs(coeffs)
    }
}

impl Sub for &PolyN {
    type Output = PolyN;
    fn sub(self, rhs: &PolyN) -> PolyN {
        self + &(-rhs)
    }
}

impl Neg for &PolyN {
    type Output = PolyN;
    fn neg(self) -> PolyN {
        PolyN {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &PolyN {
    type Output = PolyN;
    fn mul(self, rhs: &PolyN) -> PolyN {
        if self.is_zero() || rhs.is_zero() {
            return PolyN::zero();
        }
        let mut coeffs = vec![Rat::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        PolyN::from_coeffs(coeffs)
    }
}

const MOD_PRIME: u64 = 0x1fff_ffff_ffff_ffff; // 2^61 - 1

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % MOD_PRIME as u128) as u64
}

fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    r
}

fn to_mod(x: &BigInt) -> u64 {
    let m = BigInt::from(MOD_PRIME);
    x.mod_floor(&m).to_u64().expect("reduced below modulus")
}

/// Degree of `gcd(a, b)` over `Z/p`, or `None` if reduction mod p loses degree.
fn modular_gcd_degree(a: &PolyN, b: &PolyN) -> Option<usize> {
    let reduce = |p: &PolyN| -> Option<Vec<u64>> {
        let ints = p.primitive_integer_coeffs();
        let v: Vec<u64> = ints.iter().map(to_mod).collect();
        if *v.last()? == 0 {
            None
        } else {
            Some(v)
        }
    };
    let mut x = reduce(a)?;
    let mut y = reduce(b)?;
    let trim = |v: &mut Vec<u64>| {
        while v.last() == Some(&0) {
            v.pop();
        }
    };
    while !y.is_empty() {
        // x mod y
        let inv = powmod(*y.last().unwrap(), MOD_PRIME - 2);
        while x.len() >= y.len() {
            let q = mulmod(*x.last().unwrap(), inv);
            let off = x.len() - y.len();
            for (j, &yj) in y.iter().enumerate() {
                let t = mulmod(q, yj);
                x[off + j] = (x[off + j] + MOD_PRIME - t) % MOD_PRIME;
            }
            trim(&mut x);
            if x.is_empty() {
                break;
            }
        }
        std::mem::swap(&mut x, &mut y);
    }
    x.len().checked_sub(1)
}

/// Reduced quotient of two polynomials in `n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFuncN {
    num: PolyN,
    den: PolyN,
}

impl RatFuncN {
    pub fn zero() -> Self {
        RatFuncN {
            num: PolyN::zero(),
            den: PolyN::one(),
        }
    }

    pub fn one() -> Self {
        Self::from_poly(PolyN::one())
    }

    /// The function `n`.
    pub fn var() -> Self {
        Self::from_poly(PolyN::var())
    }

    pub fn from_poly(p: PolyN) -> Self {
        RatFuncN {
            num: p,
            den: PolyN::one(),
        }
    }

    pub fn from_rat(r: Rat) -> Self {
        Self::from_poly(PolyN::constant(r))
    }

    pub fn from_int(i: i64) -> Self {
        Self::from_rat(rat_int(i))
    }

    pub fn new(num: PolyN, den: PolyN) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::reduce(num, den))
    }

    /// `n^e` for a possibly negative exponent.
    pub fn var_pow(e: i64) -> Self {
        let m = PolyN::monomial(Rat::one(), e.unsigned_abs() as usize);
        if e >= 0 {
            Self::from_poly(m)
        } else {
            RatFuncN {
                num: PolyN::one(),
                den: m,
            }
        }
    }

    fn reduce(mut num: PolyN, mut den: PolyN) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        if den.degree() != Some(0)
            && num.degree() != Some(0)
            && modular_gcd_degree(&num, &den) != Some(0)
        {
            // Strip shared integer roots cheaply; our denominators factor into
            // linear terms with small integer roots.
            let bound = den.degree().unwrap() as i64 + 24;
            for r in -bound..=bound {
                if den.degree() == Some(0) || num.degree() == Some(0) {
                    break;
                }
                let root = BigInt::from(r);
                while den.degree().unwrap_or(0) > 0
                    && num.degree().unwrap_or(0) > 0
                    && den.eval_int(r).is_zero()
                    && num.eval_int(r).is_zero()
                {
                    den = den.deflate(&root);
                    num = num.deflate(&root);
                }
            }
            if den.degree().unwrap() > 0
                && num.degree().unwrap() > 0
                && modular_gcd_degree(&num, &den) != Some(0)
            {
                let g = num.gcd(&den);
                if g.degree() != Some(0) {
                    num = num.div_rem(&g).expect("gcd is nonzero").0;
                    den = den.div_rem(&g).expect("gcd is nonzero").0;
                }
            }
        }
        let lead = den.leading().expect("denominator is nonzero").recip();
        RatFuncN {
            num: num.scale(&lead),
            den: den.scale(&lead),
        }
    }

    pub fn num(&self) -> &PolyN {
        &self.num
    }

    pub fn den(&self) -> &PolyN {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// `deg num - deg den`; `None` stands for minus infinity (the zero function).
    pub fn degree(&self) -> Option<i64> {
        let dn = self.num.degree()? as i64;
        Some(dn - self.den.degree().expect("denominator is nonzero") as i64)
    }

    /// True when the degree is at most `bound` (always true for zero).
    pub fn degree_at_most(&self, bound: i64) -> bool {
        self.degree().is_none_or(|d| d <= bound)
    }

    pub fn eval_int(&self, n: i64) -> Result<Rat> {
        let d = self.den.eval_int(n);
        if d.is_zero() {
            return Err(Error::Pole(n));
        }
        Ok(self.num.eval_int(n) / d)
    }

    pub fn eval_f64(&self, n: f64) -> f64 {
        let ev = |p: &PolyN| {
            p.coeffs()
                .iter()
                .rev()
                .fold(0.0, |acc, c| acc * n + c.to_f64().unwrap_or(f64::NAN))
        };
        ev(&self.num) / ev(&self.den)
    }

    pub fn checked_div(&self, rhs: &RatFuncN) -> Result<RatFuncN> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::reduce(&self.num * &rhs.den, &self.den * &rhs.num))
    }

    pub fn recip(&self) -> Result<RatFuncN> {
        Self::one().checked_div(self)
    }

    pub fn scale(&self, c: &Rat) -> RatFuncN {
        if c.is_zero() {
            return Self::zero();
        }
        RatFuncN {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn pow(&self, e: u32) -> RatFuncN {
        RatFuncN {
            num: self.num.pow(e),
            den: self.den.pow(e),
        }
    }
}

impl fmt::Display for RatFuncN {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl Add for &RatFuncN {
    type Output = RatFuncN;
    fn add(self, rhs: &RatFuncN) -> RatFuncN {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return RatFuncN::reduce(&self.num + &rhs.num, self.den.clone());
        }
        RatFuncN::reduce(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl Sub for &RatFuncN {
    type Output = RatFuncN;
    fn sub(self, rhs: &RatFuncN) -> RatFuncN {
        self + &(-rhs)
    }
}

impl Neg for &RatFuncN {
    type Output = RatFuncN;
    fn neg(self) -> RatFuncN {
        RatFuncN {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Mul for &RatFuncN {
    type Output = RatFuncN;
    fn mul(self, rhs: &RatFuncN) -> RatFuncN {
        if self.is_zero() || rhs.is_zero() {
            return RatFuncN::zero();
        }
        RatFuncN::reduce(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

macro_rules! forward_owned {
    ($t:ty, $($tr:ident :: $m:ident),*) => {$(
        impl $tr for $t {
            type Output = $t;
            fn $m(self, rhs: $t) -> $t {
                (&self).$m(&rhs)
            }
        }
    )*};
}
forward_owned!(PolyN, Add::add, Sub::sub, Mul::mul);
forward_owned!(RatFuncN, Add::add, Sub::sub, Mul::mul);

#[derive(Serialize, Deserialize)]
struct RatFuncRepr {
    num: Vec<String>,
    den: Vec<String>,
    /// Human-readable form; ignored when reading.
    #[serde(default, skip_deserializing)]
    text: String,
}

impl Serialize for RatFuncN {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RatFuncRepr {
            num: self.num.coeffs().iter().map(rat_to_string).collect(),
            den: self.den.coeffs().iter().map(rat_to_string).collect(),
            text: self.to_string(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RatFuncN {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = RatFuncRepr::deserialize(d)?;
        let parse = |v: &[String]| -> std::result::Result<PolyN, D::Error> {
            v.iter()
                .map(|s| rat_from_str(s).map_err(D::Error::custom))
                .collect::<std::result::Result<Vec<_>, _>>()
                .map(PolyN::from_coeffs)
        };
        RatFuncN::new(parse(&repr.num)?, parse(&repr.den)?).map_err(D::Error::custom)
    }
}

impl Serialize for PolyN {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<String> = self.coeffs.iter().map(rat_to_string).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PolyN {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| rat_from_str(s).map_err(D::Error::custom))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(PolyN::from_coeffs)
    }
}

/// Serde adapter writing a [`Rat`] as `"p/q"`, for `#[serde(with = ..)]`.
pub mod rat_serde {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rat, s: S) -> std::result::Result<S::Ok, S::Error> {
        rat_to_string(r).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rat, D::Error> {
        let t = String::deserialize(d)?;
        rat_from_str(&t).map_err(D::Error::custom)
    }
}

/// Accumulates a sum of fractions sharing a fixed denominator, reducing once at the end.
#[derive(Clone, Debug)]
pub struct FixedDenSum {
    num: PolyN,
    den: PolyN,
}

impl FixedDenSum {
    pub fn new(den: PolyN) -> Self {
        FixedDenSum {
            num: PolyN::zero(),
            den,
        }
    }

    pub fn add_numerator(&mut self, p: &PolyN) {
        self.num = &self.num + p;
    }

    pub fn finish(self) -> Result<RatFuncN> {
        RatFuncN::new(self.num, self.den)
    }
}

/// Brings each function to the denominator `common`, which must be a multiple
/// of its reduced denominator; returns the numerator over `common`.
pub fn numerator_over(f: &RatFuncN, common: &PolyN) -> Result<PolyN> {
    let (q, r) = common.div_rem(f.den())?;
    if !r.is_zero() {
        return Err(Error::Violation(
            "common denominator is not a multiple".into(),
        ));
    }
    Ok(f.num() * &q)
}

/// Least common multiple of the denominators, monic.
pub fn lcm_denominators<'a>(fs: impl IntoIterator<Item = &'a RatFuncN>) -> PolyN {
    let mut l = PolyN::one();
    for f in fs {
        let g = l.gcd(f.den());
        l = (&l * f.den())
            .div_rem(&g)
            .expect("gcd is nonzero")
            .0
            .monic();
    }
    l
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n_plus(c: i64) -> PolyN {
        PolyN::linear(c)
    }

    #[test]
    fn sum_of_reciprocals() {
        let a = RatFuncN::new(PolyN::one(), n_plus(-1)).unwrap();
        let b = RatFuncN::new(PolyN::one(), n_plus(1)).unwrap();
        let s = &a + &b;
        assert_eq!(s.num(), &PolyN::from_ints(&[0, 2]));
        assert_eq!(s.den(), &PolyN::from_ints(&[-1, 0, 1]));
    }

    #[test]
    fn cancellation() {
        let f = RatFuncN::new(PolyN::from_ints(&[-1, 0, 1]), n_plus(-1)).unwrap();
        assert_eq!(f, RatFuncN::from_poly(n_plus(1)));
    }

    #[test]
    fn evaluation_and_poles() {
        let f = RatFuncN::new(PolyN::one(), PolyN::from_ints(&[-1, 0, 1])).unwrap();
        assert_eq!(f.eval_int(3).unwrap(), rat(1, 8));
        assert_eq!(f.eval_int(1), Err(Error::Pole(1)));
    }

    #[test]
    fn degree_of_reciprocal_cubic() {
        let f = RatFuncN::new(PolyN::one(), PolyN::from_ints(&[0, -1, 0, 1])).unwrap();
        assert_eq!(f.degree(), Some(-3));
        assert_eq!(RatFuncN::zero().degree(), None);
    }

    #[test]
    fn interpolation_recovers_binomial() {
        let pts: Vec<(Rat, Rat)> = [(2, 1), (3, 3), (4, 6), (5, 10)]
            .iter()
            .map(|&(x, y)| (rat_int(x), rat_int(y)))
            .collect();
        let p = PolyN::interpolate(&pts, 2).unwrap();
        assert_eq!(
            p,
            PolyN::from_coeffs(vec![rat_int(0), rat(-1, 2), rat(1, 2)])
        );
    }

    #[test]
    fn interpolation_detects_inconsistency() {
        let pts: Vec<(Rat, Rat)> = [(1, 1), (2, 2), (3, 5)]
            .iter()
            .map(|&(x, y)| (rat_int(x), rat_int(y)))
            .collect();
        assert_eq!(
            PolyN::interpolate(&pts, 1),
            Err(Error::InterpolationMismatch(1))
        );
    }

    #[test]
    fn division_by_zero() {
        assert_eq!(
            RatFuncN::one().checked_div(&RatFuncN::zero()),
            Err(Error::DivisionByZero)
        );
        assert!(RatFuncN::new(PolyN::one(), PolyN::zero()).is_err());
    }

    #[test]
    fn json_round_trip() {
        let f = RatFuncN::new(
            PolyN::from_coeffs(vec![rat(-2, 3), rat_int(0), rat(5, 7)]),
            PolyN::from_ints(&[0, -4, 0, 1]),
        )
        .unwrap();
        let s = serde_json::to_string(&f).unwrap();
        let g: RatFuncN = serde_json::from_str(&s).unwrap();
        assert_eq!(f, g);
        assert_eq!(serde_json::to_string(&g).unwrap(), s);
    }

    #[test]
    fn gcd_beyond_integer_roots() {
        // (n^2 + 1)(n + 1/2) / (n^2 + 1)
        let q = PolyN::from_ints(&[1, 0, 1]);
        let num = &q * &PolyN::from_coeffs(vec![rat(1, 2), rat_int(1)]);
        let f = RatFuncN::new(num, q).unwrap();
        assert!(f.den().is_one());
        assert_eq!(f.num(), &PolyN::from_coeffs(vec![rat(1, 2), rat_int(1)]));
    }
}
