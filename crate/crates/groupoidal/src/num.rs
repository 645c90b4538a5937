//! Scalar arithmetic: exact rationals, exact cyclotomic sums, and floating complex.
//!
//! Two numeric modes run through the whole crate. In [`NumMode::Exact`] every
//! weight is a `BigRational` and every algebra coefficient is a [`Cyc`], a
//! formal rational combination of roots of unity; identities that the theory
//! predicts to be exact are then checked with residual exactly zero. In
//! [`NumMode::Float`] everything is `Complex<f64>` and residuals are compared
//! against documented tolerances.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Which scalar tower to build values in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NumMode {
    /// Exact rationals and roots of unity.
    Exact,
    /// `f64`/`Complex64` with tolerances.
    Float,
}

fn big_ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 { a } else { gcd(b, a % b) }
}

fn lcm(a: u32, b: u32) -> u32 {
    a / gcd(a, b) * b
}

// ---------------------------------------------------------------------------
// Real weights
// ---------------------------------------------------------------------------

/// A real scalar: exact rational or `f64`, used for Haar weights, measures,
/// and modular functions. Mixed-mode arithmetic degrades to `f64`.
#[derive(Debug, Clone)]
pub enum Real {
    Rat(BigRational),
    F64(f64),
}

impl Real {
    pub fn zero(mode: NumMode) -> Self {
        match mode {
            NumMode::Exact => Real::Rat(BigRational::zero()),
            NumMode::Float => Real::F64(0.0),
        }
    }

    pub fn one(mode: NumMode) -> Self {
        match mode {
            NumMode::Exact => Real::Rat(BigRational::one()),
            NumMode::Float => Real::F64(1.0),
        }
    }

    pub fn from_ratio(num: i64, den: i64, mode: NumMode) -> Self {
        assert!(den != 0, "zero denominator");
        match mode {
            NumMode::Exact => Real::Rat(big_ratio(num, den)),
            NumMode::Float => Real::F64(num as f64 / den as f64),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Real::Rat(q) => q.to_f64().unwrap_or(f64::NAN),
            Real::F64(x) => *x,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Real::Rat(q) => q.is_zero(),
            Real::F64(x) => *x == 0.0,
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Real::Rat(q) => q.is_positive(),
            Real::F64(x) => *x > 0.0,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Real::Rat(q) => q.is_negative(),
            Real::F64(x) => *x < 0.0,
        }
    }

    pub fn recip(&self) -> Real {
        match self {
            Real::Rat(q) => Real::Rat(q.recip()),
            Real::F64(x) => Real::F64(1.0 / x),
        }
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Real::Rat(a), Real::Rat(b)) => a == b,
            (a, b) => a.to_f64() == b.to_f64(),
        }
    }
}

macro_rules! real_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                match (self, rhs) {
                    (Real::Rat(a), Real::Rat(b)) => Real::Rat(a.$method(b)),
                    (a, b) => Real::F64(a.to_f64().$method(b.to_f64())),
                }
            }
        }
        impl $trait for &Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                self.clone().$method(rhs.clone())
            }
        }
    };
}

real_binop!(Add, add);
real_binop!(Sub, sub);
real_binop!(Mul, mul);

impl Div for Real {
    type Output = Real;
    fn div(self, rhs: Real) -> Real {
        match (self, rhs) {
            (Real::Rat(a), Real::Rat(b)) => {
                assert!(!b.is_zero(), "division by zero weight");
                Real::Rat(a / b)
            }
            (a, b) => Real::F64(a.to_f64() / b.to_f64()),
        }
    }
}

impl Div for &Real {
    type Output = Real;
    fn div(self, rhs: &Real) -> Real {
        self.clone() / rhs.clone()
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Real::Rat(q) => write!(f, "{q}"),
            Real::F64(x) => write!(f, "{x}"),
        }
    }
}

// ---------------------------------------------------------------------------
// Cyclotomic sums
// ---------------------------------------------------------------------------

/// An exact formal sum `sum_j c_j zeta^j` with `zeta = e^{2 pi i / order}`
/// and rational `c_j`, reduced by the folding relation
/// `zeta^{order/2} = -1` when the order is even.
///
/// Zero testing is coefficientwise in this quotient ring, which maps onto
/// the cyclotomic field, so a zero here is a true zero. The identities this
/// crate asserts exactly cancel term by term after regrouping (up to the
/// folding relation), so no further reduction modulo cyclotomic polynomials
/// is needed.
#[derive(Debug, Clone)]
pub struct Cyc {
    order: u32,
    coeffs: Vec<BigRational>,
}

impl Cyc {
    pub fn zero() -> Self {
        Cyc { order: 1, coeffs: vec![BigRational::zero()] }
    }

    pub fn one() -> Self {
        Cyc { order: 1, coeffs: vec![BigRational::one()] }
    }

    pub fn from_rational(q: BigRational) -> Self {
        Cyc { order: 1, coeffs: vec![q] }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_rational(big_ratio(num, den))
    }

    /// `e^{2 pi i num/ord}` as an exact root of unity.
    pub fn root(num: i64, ord: u32) -> Self {
        assert!(ord > 0);
        let j = num.rem_euclid(ord as i64) as usize;
        let mut coeffs = vec![BigRational::zero(); ord as usize];
        coeffs[j] = BigRational::one();
        let mut c = Cyc { order: ord, coeffs };
        c.fold();
        c
    }

    /// Applies `zeta^{order/2} = -1` for even orders, emptying the upper
    /// half of the coefficient vector.
    fn fold(&mut self) {
        if self.order % 2 != 0 {
            return;
        }
        let half = (self.order / 2) as usize;
        for j in half..self.order as usize {
            if !self.coeffs[j].is_zero() {
                let c = std::mem::replace(&mut self.coeffs[j], BigRational::zero());
                self.coeffs[j - half] = &self.coeffs[j - half] - c;
            }
        }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    fn promote(&self, order: u32) -> Cyc {
        debug_assert!(order % self.order == 0);
        if order == self.order {
            return self.clone();
        }
        let step = (order / self.order) as usize;
        let mut coeffs = vec![BigRational::zero(); order as usize];
        for (j, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                coeffs[j * step] = c.clone();
            }
        }
        Cyc { order, coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// The value as a plain rational, if no positive power of `zeta` occurs.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    /// Multiplicative inverse for monomials `q * zeta^j`; `None` otherwise.
    pub fn monomial_inv(&self) -> Option<Cyc> {
        let mut found: Option<(usize, &BigRational)> = None;
        for (j, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                if found.is_some() {
                    return None;
                }
                found = Some((j, c));
            }
        }
        let (j, c) = found?;
        let mut coeffs = vec![BigRational::zero(); self.order as usize];
        let inv_idx = (self.order as usize - j) % self.order as usize;
        coeffs[inv_idx] = c.recip();
        let mut out = Cyc { order: self.order, coeffs };
        out.fold();
        Some(out)
    }

    pub fn conj(&self) -> Cyc {
        let n = self.order as usize;
        let mut coeffs = vec![BigRational::zero(); n];
        for (j, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                coeffs[(n - j) % n] = c.clone();
            }
        }
        let mut out = Cyc { order: self.order, coeffs };
        out.fold();
        out
    }

    pub fn to_c64(&self) -> Complex64 {
        let n = self.order as f64;
        let mut z = Complex64::new(0.0, 0.0);
        for (j, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                let theta = std::f64::consts::TAU * j as f64 / n;
                z += Complex64::from_polar(c.to_f64().unwrap_or(f64::NAN), theta);
            }
        }
        z
    }

    fn binop(&self, rhs: &Cyc, f: impl Fn(&BigRational, &BigRational) -> BigRational) -> Cyc {
        let order = lcm(self.order, rhs.order);
        let a = self.promote(order);
        let b = rhs.promote(order);
        let coeffs = a
            .coeffs
            .iter()
            .zip(b.coeffs.iter())
            .map(|(x, y)| f(x, y))
            .collect();
        let mut out = Cyc { order, coeffs };
        out.fold();
        out
    }
}

impl PartialEq for Cyc {
    fn eq(&self, other: &Self) -> bool {
        self.binop(other, |a, b| a - b).is_zero()
    }
}

impl Add for &Cyc {
    type Output = Cyc;
    fn add(self, rhs: &Cyc) -> Cyc {
        self.binop(rhs, |a, b| a + b)
    }
}

impl Sub for &Cyc {
    type Output = Cyc;
    fn sub(self, rhs: &Cyc) -> Cyc {
        self.binop(rhs, |a, b| a - b)
    }
}

impl Mul for &Cyc {
    type Output = Cyc;
    fn mul(self, rhs: &Cyc) -> Cyc {
        let order = lcm(self.order, rhs.order);
        let a = self.promote(order);
        let b = rhs.promote(order);
        let n = order as usize;
        let mut coeffs = vec![BigRational::zero(); n];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let k = (i + j) % n;
                coeffs[k] = &coeffs[k] + x * y;
            }
        }
        let mut out = Cyc { order, coeffs };
        out.fold();
        out
    }
}

impl Neg for &Cyc {
    type Output = Cyc;
    fn neg(self) -> Cyc {
        Cyc {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl fmt::Display for Cyc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if j == 0 {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}*z{}^{j}", self.order)?;
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Complex scalars
// ---------------------------------------------------------------------------

/// A complex scalar in one of the two towers.
#[derive(Debug, Clone)]
pub enum Scalar {
    Exact(Cyc),
    Float(Complex64),
}

impl Scalar {
    pub fn zero(mode: NumMode) -> Self {
        match mode {
            NumMode::Exact => Scalar::Exact(Cyc::zero()),
            NumMode::Float => Scalar::Float(Complex64::new(0.0, 0.0)),
        }
    }

    pub fn one(mode: NumMode) -> Self {
        match mode {
            NumMode::Exact => Scalar::Exact(Cyc::one()),
            NumMode::Float => Scalar::Float(Complex64::new(1.0, 0.0)),
        }
    }

    pub fn from_ratio(num: i64, den: i64, mode: NumMode) -> Self {
        match mode {
            NumMode::Exact => Scalar::Exact(Cyc::from_ratio(num, den)),
            NumMode::Float => Scalar::Float(Complex64::new(num as f64 / den as f64, 0.0)),
        }
    }

    pub fn from_real(r: &Real) -> Self {
        match r {
            Real::Rat(q) => Scalar::Exact(Cyc::from_rational(q.clone())),
            Real::F64(x) => Scalar::Float(Complex64::new(*x, 0.0)),
        }
    }

    /// `e^{2 pi i num/ord}` in the requested tower.
    pub fn root_of_unity(num: i64, ord: u32, mode: NumMode) -> Self {
        match mode {
            NumMode::Exact => Scalar::Exact(Cyc::root(num, ord)),
            NumMode::Float => {
                let theta = std::f64::consts::TAU * num as f64 / ord as f64;
                Scalar::Float(Complex64::from_polar(1.0, theta))
            }
        }
    }

    pub fn mode(&self) -> NumMode {
        match self {
            Scalar::Exact(_) => NumMode::Exact,
            Scalar::Float(_) => NumMode::Float,
        }
    }

    pub fn to_c64(&self) -> Complex64 {
        match self {
            Scalar::Exact(c) => c.to_c64(),
            Scalar::Float(z) => *z,
        }
    }

    pub fn conj(&self) -> Scalar {
        match self {
            Scalar::Exact(c) => Scalar::Exact(c.conj()),
            Scalar::Float(z) => Scalar::Float(z.conj()),
        }
    }

    /// Exact zero in the exact tower, literal `0.0` in the float tower.
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(c) => c.is_zero(),
            Scalar::Float(z) => z.re == 0.0 && z.im == 0.0,
        }
    }

    pub fn abs(&self) -> f64 {
        self.to_c64().norm()
    }

    /// Multiplicative inverse; defined for floats and for exact monomials.
    pub fn inv(&self) -> Option<Scalar> {
        match self {
            Scalar::Exact(c) => c.monomial_inv().map(Scalar::Exact),
            Scalar::Float(z) => {
                if z.norm() == 0.0 {
                    None
                } else {
                    Some(Scalar::Float(z.inv()))
                }
            }
        }
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            (a, b) => a.to_c64() == b.to_c64(),
        }
    }
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a.$method(b)),
                    (a, b) => Scalar::Float(a.to_c64().$method(b.to_c64())),
                }
            }
        }
        impl $trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
    };
}

scalar_binop!(Add, add);
scalar_binop!(Sub, sub);
scalar_binop!(Mul, mul);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(c) => Scalar::Exact(-c),
            Scalar::Float(z) => Scalar::Float(-z),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(c) => write!(f, "{c}"),
            Scalar::Float(z) => write!(f, "{z}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_of_unity_multiply_by_adding_exponents() {
        let a = Cyc::root(1, 4);
        let b = Cyc::root(3, 4);
        assert_eq!(&a * &b, Cyc::one());
        assert_eq!(&a * &a, Cyc::root(1, 2));
    }

    #[test]
    fn mixed_orders_promote() {
        let half = Cyc::root(1, 2);
        let quarter = Cyc::root(1, 4);
        assert_eq!(&quarter * &quarter, half);
        let s = &half + &quarter;
        assert!(!s.is_zero());
        assert!((&s - &s).is_zero());
    }

    #[test]
    fn conj_inverts_roots() {
        let z = Cyc::root(1, 6);
        assert_eq!(z.conj(), Cyc::root(5, 6));
        assert!((&(&z * &z.conj()) - &Cyc::one()).is_zero());
    }

    #[test]
    fn monomial_inverse() {
        let z = &Cyc::from_ratio(3, 2) * &Cyc::root(1, 4);
        let inv = z.monomial_inv().unwrap();
        assert_eq!(&z * &inv, Cyc::one());
        let s = &Cyc::one() + &Cyc::root(1, 4);
        assert!(s.monomial_inv().is_none());
    }

    #[test]
    fn to_c64_matches_float_tower() {
        let e = Scalar::root_of_unity(1, 3, NumMode::Exact);
        let f = Scalar::root_of_unity(1, 3, NumMode::Float);
        assert!((e.to_c64() - f.to_c64()).norm() < 1e-15);
    }

    #[test]
    fn real_rational_arithmetic_is_exact() {
        let a = Real::from_ratio(1, 3, NumMode::Exact);
        let b = Real::from_ratio(2, 3, NumMode::Exact);
        assert_eq!(&a + &b, Real::one(NumMode::Exact));
        assert!((&a - &a).is_zero());
    }
}
