//! Exact rational arithmetic and sparse multivariate polynomials.
//!
//! Everything downstream (tensor fields, differential forms, the operator
//! derivations) is built on [`Poly`]: a polynomial in 2 or 3 variables with
//! arbitrary-precision rational coefficients and a graded-lexicographic
//! canonical term order, so equality of values is structural equality of
//! representations. The radial transform [`radial_beta_transform`] evaluates
//! the weighted line integrals `∫₀¹ tᵃ(1−t)ᵇ p(tx) dt` exactly via Beta
//! integrals on each homogeneous component.

use num_bigint::{BigInt, Sign as IntSign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};
use thiserror::Error;

/// Errors from polynomial construction and arithmetic.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("unsupported dimension {0} (only 2 and 3)")]
    BadDim(usize),
    #[error("variable index {0} out of range for dimension {1}")]
    BadVar(usize, usize),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("malformed rational string: {0}")]
    BadRational(String),
    #[error("malformed polynomial JSON: {0}")]
    BadJson(String),
}

/// Arbitrary-precision rational number, always reduced, denominator > 0.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rat(BigRational);

impl Rat {
    pub fn zero() -> Self {
        Rat(BigRational::zero())
    }

    pub fn one() -> Self {
        Rat(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Rat(BigRational::from_integer(BigInt::from(n)))
    }

    /// `num/den` reduced; fails on zero denominator.
    pub fn new(num: i64, den: i64) -> Result<Self, PolyError> {
        if den == 0 {
            return Err(PolyError::ZeroDenominator);
        }
        Ok(Rat(BigRational::new(BigInt::from(num), BigInt::from(den))))
    }

    pub fn from_big(num: BigInt, den: BigInt) -> Result<Self, PolyError> {
        if den.is_zero() {
            return Err(PolyError::ZeroDenominator);
        }
        Ok(Rat(BigRational::new(num, den)))
    }

    /// Parse from decimal integer strings (the JSON wire encoding).
    pub fn from_decimal_strings(num: &str, den: &str) -> Result<Self, PolyError> {
        let n: BigInt = num
            .parse()
            .map_err(|_| PolyError::BadRational(num.to_string()))?;
        let d: BigInt = den
            .parse()
            .map_err(|_| PolyError::BadRational(den.to_string()))?;
        Self::from_big(n, d)
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn abs(&self) -> Self {
        Rat(self.0.abs())
    }

    pub fn recip(&self) -> Self {
        Rat(self.0.recip())
    }

    pub fn pow(&self, e: u32) -> Self {
        Rat(num_traits::pow::pow(self.0.clone(), e as usize))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or_else(|| {
            // Fall back to a quotient of lossy conversions for huge operands.
            let n = self.0.numer().to_f64().unwrap_or(f64::NAN);
            let d = self.0.denom().to_f64().unwrap_or(f64::NAN);
            n / d
        })
    }

    /// Exact factorial as a rational.
    pub fn factorial(n: u64) -> Self {
        let mut acc = BigInt::one();
        for k in 2..=n {
            acc *= BigInt::from(k);
        }
        Rat(BigRational::from_integer(acc))
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Self {
        Rat::from_int(n)
    }
}

macro_rules! rat_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat((self.0).$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Rat> for &'a Rat {
            type Output = Rat;
            fn $method(self, rhs: &'a Rat) -> Rat {
                Rat((&self.0).$method(&rhs.0))
            }
        }
    };
}

rat_binop!(Add, add);
rat_binop!(Sub, sub);
rat_binop!(Mul, mul);
rat_binop!(Div, div);

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-&self.0)
    }
}

impl AddAssign<&Rat> for Rat {
    fn add_assign(&mut self, rhs: &Rat) {
        self.0 += &rhs.0;
    }
}

/// Exponent multi-index with graded-lexicographic ordering.
///
/// Always stored as three exponents; dimension-2 polynomials keep the third
/// slot at zero. Ordering compares total degree first, then exponents
/// lexicographically, which fixes the canonical term order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Mono(pub [u16; 3]);

impl Mono {
    pub fn constant() -> Self {
        Mono([0, 0, 0])
    }

    pub fn var(i: usize) -> Self {
        let mut e = [0u16; 3];
        e[i] = 1;
        Mono(e)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        Mono([
            self.0[0] + other.0[0],
            self.0[1] + other.0[1],
            self.0[2] + other.0[2],
        ])
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.total_degree(), self.0).cmp(&(other.total_degree(), other.0))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse multivariate polynomial over [`Rat`] in `dim ∈ {2,3}` variables.
///
/// Invariants: no zero coefficients are stored; terms are kept in
/// graded-lexicographic order by the backing `BTreeMap`, so `PartialEq` is
/// semantic equality.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Poly {
    dim: usize,
    terms: BTreeMap<Mono, Rat>,
}

impl Poly {
    pub fn zero(dim: usize) -> Self {
        Poly {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: Rat) -> Self {
        let mut p = Poly::zero(dim);
        if !c.is_zero() {
            p.terms.insert(Mono::constant(), c);
        }
        p
    }

    pub fn one(dim: usize) -> Self {
        Poly::constant(dim, Rat::one())
    }

    pub fn from_int(dim: usize, n: i64) -> Self {
        Poly::constant(dim, Rat::from_int(n))
    }

    /// The coordinate polynomial `x_i` (0-based index).
    pub fn var(dim: usize, i: usize) -> Self {
        assert!(i < dim, "variable index {i} out of range for dim {dim}");
        let mut p = Poly::zero(dim);
        p.terms.insert(Mono::var(i), Rat::one());
        p
    }

    /// Single term `c · x^exps`.
    pub fn monomial(dim: usize, exps: [u16; 3], c: Rat) -> Self {
        debug_assert!(dim == 3 || exps[2] == 0);
        let mut p = Poly::zero(dim);
        if !c.is_zero() {
            p.terms.insert(Mono(exps), c);
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.total_degree()).max()
    }

    pub fn is_homogeneous(&self, r: u32) -> bool {
        self.terms.keys().all(|m| m.total_degree() == r)
    }

    fn insert_term(&mut self, m: Mono, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                *existing += &c;
                if existing.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    fn check_dim(&self, other: &Poly) -> Result<(), PolyError> {
        if self.dim != other.dim {
            Err(PolyError::DimMismatch(self.dim, other.dim))
        } else {
            Ok(())
        }
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.dim);
        }
        Poly {
            dim: self.dim,
            terms: self.terms.iter().map(|(m, a)| (*m, a * c)).collect(),
        }
    }

    /// Partial derivative `∂_i`.
    pub fn partial(&self, i: usize) -> Poly {
        assert!(i < self.dim);
        let mut out = Poly::zero(self.dim);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut exps = m.0;
            exps[i] = e - 1;
            out.insert_term(Mono(exps), c * &Rat::from_int(e as i64));
        }
        out
    }

    /// Exact evaluation at a rational point.
    pub fn eval(&self, point: &[Rat]) -> Rat {
        assert_eq!(point.len(), self.dim);
        let mut acc = Rat::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (i, p) in point.iter().enumerate() {
                let e = m.0[i] as u32;
                if e > 0 {
                    term = &term * &p.pow(e);
                }
            }
            acc += &term;
        }
        acc
    }

    /// Floating-point evaluation (used by the numeric path integrator).
    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (m, c) in &self.terms {
            let mut term = c.to_f64();
            for (i, &p) in point.iter().enumerate().take(self.dim) {
                term *= p.powi(m.0[i] as i32);
            }
            acc += term;
        }
        acc
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one(self.dim);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Split into homogeneous components keyed by degree.
    pub fn homogeneous_parts(&self) -> HomoDecomp {
        let mut parts: BTreeMap<u32, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            parts
                .entry(m.total_degree())
                .or_insert_with(|| Poly::zero(self.dim))
                .insert_term(*m, c.clone());
        }
        HomoDecomp { parts }
    }

    /// The degree-`r` homogeneous component.
    pub fn homogeneous_part(&self, r: u32) -> Poly {
        let mut out = Poly::zero(self.dim);
        for (m, c) in &self.terms {
            if m.total_degree() == r {
                out.insert_term(*m, c.clone());
            }
        }
        out
    }

    /// `p(t·x)` as a polynomial in the auxiliary scale variable `t`:
    /// the coefficient of `t^r` is the degree-`r` homogeneous part.
    pub fn scale_substitution(&self) -> BTreeMap<u32, Poly> {
        self.homogeneous_parts().parts
    }

    /// `p(x + a)`, expanded exactly.
    pub fn shift(&self, a: &[Rat]) -> Poly {
        assert_eq!(a.len(), self.dim);
        let mut out = Poly::zero(self.dim);
        for (m, c) in &self.terms {
            // Expand ∏_i (x_i + a_i)^{e_i} term by term.
            let mut expanded = Poly::constant(self.dim, c.clone());
            for (i, offset) in a.iter().enumerate() {
                let factor = &Poly::var(self.dim, i) + &Poly::constant(self.dim, offset.clone());
                expanded = &expanded * &factor.pow(m.0[i] as u32);
            }
            out = &out + &expanded;
        }
        out
    }

    /// Largest absolute coefficient as f64 (diagnostics only).
    pub fn max_abs_coeff_f64(&self) -> f64 {
        self.terms
            .values()
            .map(|c| c.abs().to_f64())
            .fold(0.0, f64::max)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.check_dim(rhs).expect("polynomial dim mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.insert_term(*m, c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.check_dim(rhs).expect("polynomial dim mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.insert_term(*m, -c);
        }
        out
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.check_dim(rhs).expect("polynomial dim mismatch");
        let mut out = Poly::zero(self.dim);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.insert_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            dim: self.dim,
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let names = ["x1", "x2", "x3"];
        let mut first = true;
        // Highest-degree terms first reads more naturally.
        for (m, c) in self.terms.iter().rev() {
            let neg = c.numer().sign() == IntSign::Minus;
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut wrote_factor = false;
            if !mag.is_one() || m.total_degree() == 0 {
                write!(f, "{}", mag)?;
                wrote_factor = true;
            }
            for (name, &e) in names.iter().zip(&m.0).take(self.dim) {
                if e == 0 {
                    continue;
                }
                if wrote_factor {
                    write!(f, "*")?;
                }
                write!(f, "{}", name)?;
                if e > 1 {
                    write!(f, "^{}", e)?;
                }
                wrote_factor = true;
            }
        }
        Ok(())
    }
}

/// Decomposition of a polynomial into homogeneous components.
#[derive(Clone, Debug, PartialEq)]
pub struct HomoDecomp {
    pub parts: BTreeMap<u32, Poly>,
}

impl HomoDecomp {
    pub fn sum(&self, dim: usize) -> Poly {
        self.parts.values().fold(Poly::zero(dim), |acc, p| &acc + p)
    }
}

/// Exact Beta-integral factor `∫₀¹ tᵐ (1−t)ᵇ dt = m!·b!/(m+b+1)!`.
pub fn beta_factor(m: u32, b: u32) -> Rat {
    let num = &Rat::factorial(m as u64) * &Rat::factorial(b as u64);
    let den = Rat::factorial((m + b + 1) as u64);
    &num / &den
}

/// `∫₀¹ tᵃ (1−t)ᵇ p(t·x) dt`, computed exactly.
///
/// Each homogeneous component of degree `r` contributes `t^r` under the
/// substitution, so it is scaled by `(a+r)!·b!/(a+r+b+1)!`. Degrees are
/// unchanged.
pub fn radial_beta_transform(p: &Poly, a: u32, b: u32) -> Poly {
    let mut out = Poly::zero(p.dim());
    for (r, part) in p.homogeneous_parts().parts {
        out = &out + &part.scale(&beta_factor(a + r, b));
    }
    out
}

// ---------------------------------------------------------------------------
// JSON wire format
// ---------------------------------------------------------------------------

/// One JSON polynomial term: exponent vector plus decimal-string rational.
#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct TermJson {
    pub exp: Vec<u16>,
    pub num: String,
    pub den: String,
}

/// JSON polynomial fragment: `{"terms": [{"exp": [..], "num": "..", "den": ".."}]}`.
#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct PolyJson {
    pub terms: Vec<TermJson>,
}

impl Poly {
    pub fn to_json(&self) -> PolyJson {
        PolyJson {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| TermJson {
                    exp: m.0[..self.dim].to_vec(),
                    num: c.numer().to_string(),
                    den: c.denom().to_string(),
                })
                .collect(),
        }
    }

    pub fn from_json(dim: usize, json: &PolyJson) -> Result<Poly, PolyError> {
        if dim != 2 && dim != 3 {
            return Err(PolyError::BadDim(dim));
        }
        let mut p = Poly::zero(dim);
        for t in &json.terms {
            if t.exp.len() != dim {
                return Err(PolyError::BadJson(format!(
                    "exponent vector {:?} does not match dimension {}",
                    t.exp, dim
                )));
            }
            let mut exps = [0u16; 3];
            exps[..dim].copy_from_slice(&t.exp);
            let c = Rat::from_decimal_strings(&t.num, &t.den)?;
            p.insert_term(Mono(exps), c);
        }
        Ok(p)
    }
}
