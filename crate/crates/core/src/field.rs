//! Scalar fields.
//!
//! Every algorithm in the crate is generic over [`Field`], a runtime field
//! descriptor that owns the arithmetic of its element type. Four fields are
//! provided:
//!
//! * [`PrimeField`]: GF(p) for a prime `p < 2^31`, exact residue arithmetic;
//! * [`Rationals`]: exact arbitrary-precision fractions;
//! * [`Reals`] and [`Complexes`]: IEEE doubles with a relative zero threshold
//!   `eps` that drives every rank decision.
//!
//! The involution (`conj`) is complex conjugation over the complex numbers and
//! the identity everywhere else.
//!
//! [`FieldSpec`] is the tagged, serializable description used by the text
//! formats and the CLI.

use std::fmt;
use std::str::FromStr;

use num::{BigInt, BigRational, Complex, One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Default relative zero threshold for the floating fields.
pub const DEFAULT_EPS: f64 = 1e-10;

/// Largest admissible prime modulus (exclusive).
pub const MAX_PRIME: u32 = 1 << 31;

/// Tagged field descriptor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FieldSpec {
    Prime(u32),
    Rational,
    Real { eps: f64 },
    Complex { eps: f64 },
}

impl FieldSpec {
    /// Replaces the zero threshold of a floating field; exact fields are
    /// returned unchanged.
    pub fn with_eps(self, eps: f64) -> Self {
        match self {
            FieldSpec::Real { .. } => FieldSpec::Real { eps },
            FieldSpec::Complex { .. } => FieldSpec::Complex { eps },
            other => other,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, FieldSpec::Prime(_) | FieldSpec::Rational)
    }

    /// Checks the descriptor's invariants (primality, positive `eps`).
    pub fn validate(&self) -> Result<()> {
        match *self {
            FieldSpec::Prime(p) => PrimeField::new(p).map(|_| ()),
            FieldSpec::Rational => Ok(()),
            FieldSpec::Real { eps } | FieldSpec::Complex { eps } => {
                if eps > 0.0 && eps.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidField(format!("eps must be positive, got {eps}")))
                }
            }
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Prime(p) => write!(f, "gf {p}"),
            FieldSpec::Rational => f.write_str("rational"),
            FieldSpec::Real { .. } => f.write_str("real"),
            FieldSpec::Complex { .. } => f.write_str("complex"),
        }
    }
}

impl FromStr for FieldSpec {
    type Err = Error;

    /// Accepts `gf <p>`, `gf<p>`, `gf(<p>)`, `rational`, `real`, `complex`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        let spec = match t.as_str() {
            "rational" | "q" => FieldSpec::Rational,
            "real" | "r" => FieldSpec::Real { eps: DEFAULT_EPS },
            "complex" | "c" => FieldSpec::Complex { eps: DEFAULT_EPS },
            _ => {
                let rest = t
                    .strip_prefix("gf")
                    .ok_or_else(|| Error::InvalidField(format!("unknown field `{s}`")))?;
                let rest = rest.trim().trim_start_matches('(').trim_end_matches(')').trim();
                let p: u32 = rest
                    .parse()
                    .map_err(|_| Error::InvalidField(format!("bad modulus in `{s}`")))?;
                FieldSpec::Prime(p)
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl Serialize for FieldSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Field arithmetic over an element type.
///
/// A field value is a small descriptor (it carries `p` or `eps`) and every
/// operation goes through it, so elements themselves stay plain data.
pub trait Field: Clone + PartialEq + fmt::Debug + Send + Sync {
    type Elem: Clone + PartialEq + fmt::Debug + Send + Sync;

    fn spec(&self) -> FieldSpec;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    #[allow(clippy::wrong_self_convention)]
    fn from_i64(&self, v: i64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;

    /// Multiplicative inverse; `ZeroInverse` for (numerically) zero input.
    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem>;

    /// Reciprocal of anything but an exact zero. Elimination uses this after
    /// it has applied its own scale-aware pivot threshold.
    fn recip(&self, a: &Self::Elem) -> Option<Self::Elem>;

    /// The field involution.
    fn conj(&self, a: &Self::Elem) -> Self::Elem {
        a.clone()
    }

    /// Exact zero test.
    fn is_zero(&self, a: &Self::Elem) -> bool;

    /// Absolute value for the floating fields. Exact fields only use this for
    /// norms in diagnostics.
    fn magnitude(&self, a: &Self::Elem) -> f64;

    /// Relative zero threshold; `0.0` for exact fields.
    fn eps(&self) -> f64 {
        0.0
    }

    fn is_exact(&self) -> bool {
        self.eps() == 0.0
    }

    /// `x == 0` for exact fields, `|x| <= eps * max(scale, 1)` otherwise.
    fn approx_zero(&self, a: &Self::Elem, scale: f64) -> bool {
        if self.is_exact() {
            self.is_zero(a)
        } else {
            self.magnitude(a) <= self.eps() * scale.max(1.0)
        }
    }

    /// Number of elements for finite fields.
    fn order(&self) -> Option<u64> {
        None
    }

    /// The `k`-th element in a fixed enumeration; only meaningful when
    /// [`Field::order`] is `Some` and `k` is below it.
    fn nth_element(&self, k: u64) -> Self::Elem {
        self.from_i64(k as i64)
    }

    /// Draws a random element: uniform over GF(p), an integer in `[-3, 3]`
    /// over the rationals, standard normal (per component) for floats.
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem;

    fn parse_elem(&self, s: &str) -> Result<Self::Elem>;
    fn format_elem(&self, a: &Self::Elem) -> String;
}

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse {
        line: 0,
        msg: msg.into(),
    }
}

/// GF(p) with residues in `[0, p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u32,
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    if p < 4 {
        return true;
    }
    if p.is_multiple_of(2) {
        return false;
    }
    let p = p as u64;
    let mut d = 3u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

impl PrimeField {
    pub fn new(p: u32) -> Result<Self> {
        if p >= MAX_PRIME {
            return Err(Error::InvalidField(format!("modulus {p} must be below 2^31")));
        }
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        Ok(PrimeField { p })
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    fn reduce(&self, v: i64) -> u32 {
        v.rem_euclid(self.p as i64) as u32
    }
}

impl Field for PrimeField {
    type Elem = u32;

    fn spec(&self) -> FieldSpec {
        FieldSpec::Prime(self.p)
    }
    fn zero(&self) -> u32 {
        0
    }
    fn one(&self) -> u32 {
        1 % self.p
    }
    fn from_i64(&self, v: i64) -> u32 {
        self.reduce(v)
    }
    fn add(&self, a: &u32, b: &u32) -> u32 {
        let s = *a + *b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    fn sub(&self, a: &u32, b: &u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
    fn mul(&self, a: &u32, b: &u32) -> u32 {
        ((*a as u64 * *b as u64) % self.p as u64) as u32
    }
    fn neg(&self, a: &u32) -> u32 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn inv(&self, a: &u32) -> Result<u32> {
        if *a == 0 {
            return Err(Error::ZeroInverse);
        }
        // extended Euclid on (a, p)
        let (mut r0, mut r1) = (self.p as i64, *a as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        Ok(self.reduce(t0))
    }
    fn recip(&self, a: &u32) -> Option<u32> {
        self.inv(a).ok()
    }
    fn is_zero(&self, a: &u32) -> bool {
        *a == 0
    }
    fn magnitude(&self, a: &u32) -> f64 {
        if *a == 0 {
            0.0
        } else {
            1.0
        }
    }
    fn order(&self) -> Option<u64> {
        Some(self.p as u64)
    }
    fn nth_element(&self, k: u64) -> u32 {
        (k % self.p as u64) as u32
    }
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        rng.random_range(0..self.p)
    }
    fn parse_elem(&self, s: &str) -> Result<u32> {
        let v: BigInt = s
            .trim()
            .parse()
            .map_err(|_| parse_err(format!("`{s}` is not an integer")))?;
        let r = v.mod_floor_p(self.p);
        Ok(r)
    }
    fn format_elem(&self, a: &u32) -> String {
        a.to_string()
    }
}

trait ModFloor {
    fn mod_floor_p(&self, p: u32) -> u32;
}

impl ModFloor for BigInt {
    fn mod_floor_p(&self, p: u32) -> u32 {
        let m = BigInt::from(p);
        let r = ((self % &m) + &m) % &m;
        r.to_u32().expect("residue below modulus")
    }
}

/// Exact rationals with arbitrary-precision numerator and denominator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn spec(&self) -> FieldSpec {
        FieldSpec::Rational
    }
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_i64(&self, v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> Result<BigRational> {
        if a.is_zero() {
            Err(Error::ZeroInverse)
        } else {
            Ok(a.recip())
        }
    }
    fn recip(&self, a: &BigRational) -> Option<BigRational> {
        self.inv(a).ok()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn magnitude(&self, a: &BigRational) -> f64 {
        a.abs().to_f64().unwrap_or(f64::INFINITY)
    }
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> BigRational {
        self.from_i64(rng.random_range(-3..=3))
    }
    fn parse_elem(&self, s: &str) -> Result<BigRational> {
        let s = s.trim();
        let bad = || parse_err(format!("`{s}` is not a rational number"));
        match s.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().map_err(|_| bad())?;
                let d: BigInt = d.trim().parse().map_err(|_| bad())?;
                if d.is_zero() {
                    return Err(parse_err(format!("zero denominator in `{s}`")));
                }
                Ok(BigRational::new(n, d))
            }
            None => {
                let n: BigInt = s.parse().map_err(|_| bad())?;
                Ok(BigRational::from_integer(n))
            }
        }
    }
    fn format_elem(&self, a: &BigRational) -> String {
        if a.denom().is_one() {
            a.numer().to_string()
        } else {
            format!("{}/{}", a.numer(), a.denom())
        }
    }
}

/// Real doubles with relative zero threshold `eps`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Reals {
    eps: f64,
}

impl Reals {
    pub fn new(eps: f64) -> Self {
        assert!(eps > 0.0, "eps must be positive");
        Reals { eps }
    }
}

impl Default for Reals {
    fn default() -> Self {
        Reals { eps: DEFAULT_EPS }
    }
}

impl Field for Reals {
    type Elem = f64;

    fn spec(&self) -> FieldSpec {
        FieldSpec::Real { eps: self.eps }
    }
    fn zero(&self) -> f64 {
        0.0
    }
    fn one(&self) -> f64 {
        1.0
    }
    fn from_i64(&self, v: i64) -> f64 {
        v as f64
    }
    fn add(&self, a: &f64, b: &f64) -> f64 {
        a + b
    }
    fn sub(&self, a: &f64, b: &f64) -> f64 {
        a - b
    }
    fn mul(&self, a: &f64, b: &f64) -> f64 {
        a * b
    }
    fn neg(&self, a: &f64) -> f64 {
        -a
    }
    fn inv(&self, a: &f64) -> Result<f64> {
        if self.approx_zero(a, 1.0) {
            Err(Error::ZeroInverse)
        } else {
            Ok(1.0 / a)
        }
    }
    fn recip(&self, a: &f64) -> Option<f64> {
        (*a != 0.0).then(|| 1.0 / a)
    }
    fn is_zero(&self, a: &f64) -> bool {
        *a == 0.0
    }
    fn magnitude(&self, a: &f64) -> f64 {
        a.abs()
    }
    fn eps(&self) -> f64 {
        self.eps
    }
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        rng.sample(StandardNormal)
    }
    fn parse_elem(&self, s: &str) -> Result<f64> {
        s.trim()
            .parse()
            .map_err(|_| parse_err(format!("`{s}` is not a real number")))
    }
    fn format_elem(&self, a: &f64) -> String {
        format!("{a:?}")
    }
}

pub type C64 = Complex<f64>;

/// Complex doubles with relative zero threshold `eps`; the involution is
/// conjugation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Complexes {
    eps: f64,
}

impl Complexes {
    pub fn new(eps: f64) -> Self {
        assert!(eps > 0.0, "eps must be positive");
        Complexes { eps }
    }
}

impl Default for Complexes {
    fn default() -> Self {
        Complexes { eps: DEFAULT_EPS }
    }
}

fn parse_complex(s: &str) -> Option<C64> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let Some(body) = s.strip_suffix('i') else {
        return s.parse::<f64>().ok().map(|re| C64::new(re, 0.0));
    };
    // split at the last sign that is not the sign of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (body[..k].parse::<f64>().ok()?, &body[k..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        t => t.parse::<f64>().ok()?,
    };
    Some(C64::new(re, im))
}

impl Field for Complexes {
    type Elem = C64;

    fn spec(&self) -> FieldSpec {
        FieldSpec::Complex { eps: self.eps }
    }
    fn zero(&self) -> C64 {
        C64::new(0.0, 0.0)
    }
    fn one(&self) -> C64 {
        C64::new(1.0, 0.0)
    }
    fn from_i64(&self, v: i64) -> C64 {
        C64::new(v as f64, 0.0)
    }
    fn add(&self, a: &C64, b: &C64) -> C64 {
        a + b
    }
    fn sub(&self, a: &C64, b: &C64) -> C64 {
        a - b
    }
    fn mul(&self, a: &C64, b: &C64) -> C64 {
        a * b
    }
    fn neg(&self, a: &C64) -> C64 {
        -a
    }
    fn inv(&self, a: &C64) -> Result<C64> {
        if self.approx_zero(a, 1.0) {
            Err(Error::ZeroInverse)
        } else {
            Ok(a.inv())
        }
    }
    fn recip(&self, a: &C64) -> Option<C64> {
        (!self.is_zero(a)).then(|| a.inv())
    }
    fn conj(&self, a: &C64) -> C64 {
        a.conj()
    }
    fn is_zero(&self, a: &C64) -> bool {
        a.re == 0.0 && a.im == 0.0
    }
    fn magnitude(&self, a: &C64) -> f64 {
        a.norm()
    }
    fn eps(&self) -> f64 {
        self.eps
    }
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> C64 {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im)
    }
    fn parse_elem(&self, s: &str) -> Result<C64> {
        parse_complex(s).ok_or_else(|| parse_err(format!("`{s}` is not a complex number")))
    }
    fn format_elem(&self, a: &C64) -> String {
        if a.im.is_sign_negative() {
            format!("{:?}-{:?}i", a.re, -a.im)
        } else {
            format!("{:?}+{:?}i", a.re, a.im)
        }
    }
}
