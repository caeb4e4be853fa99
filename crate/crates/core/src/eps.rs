//! Numbers `a + b·ε` with rational `a`, `b` and `ε` a positive infinitesimal.
//!
//! Ordering is lexicographic: standard parts first, then ε-coefficients. This
//! turns statements that hold "for ε sufficiently small" into exact
//! comparisons. Only first-order expressions are representable; a product
//! that would produce an `ε²` term is an error.
//!
//! [`audit_comparisons`] records every ordering decision made on the current
//! thread so that callers can find a concrete `ε₀` below which all of them
//! survive substitution of a rational for `ε`.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EpsError {
    #[error("product has a nonzero ε² term")]
    QuadraticTerm,
    #[error("ε must be instantiated at a positive rational, got {0}")]
    NonPositiveEps(BigRational),
    #[error("cannot parse {input:?} as a + b*eps: {reason}")]
    Parse { input: String, reason: String },
}

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn integer(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct EpsRational {
    standard: BigRational,
    eps: BigRational,
}

impl EpsRational {
    pub fn new(standard: BigRational, eps: BigRational) -> Self {
        EpsRational { standard, eps }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_rational(BigRational::one())
    }

    /// The infinitesimal ε itself.
    pub fn epsilon() -> Self {
        Self::new(BigRational::zero(), BigRational::one())
    }

    pub fn from_rational(r: BigRational) -> Self {
        Self::new(r, BigRational::zero())
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(integer(n))
    }

    /// `n·ε`.
    pub fn eps_times(n: i64) -> Self {
        Self::new(BigRational::zero(), integer(n))
    }

    /// `a + b·ε` from small integers.
    pub fn affine(a: i64, b: i64) -> Self {
        Self::new(integer(a), integer(b))
    }

    pub fn standard_part(&self) -> &BigRational {
        &self.standard
    }

    pub fn eps_coefficient(&self) -> &BigRational {
        &self.eps
    }

    pub fn is_zero(&self) -> bool {
        self.standard.is_zero() && self.eps.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        *self > Self::zero()
    }

    pub fn scale(&self, factor: &BigRational) -> Self {
        Self::new(&self.standard * factor, &self.eps * factor)
    }

    /// Product of two affine expressions, rejected if it is not affine.
    pub fn checked_mul(&self, other: &Self) -> Result<Self, EpsError> {
        if !self.eps.is_zero() && !other.eps.is_zero() {
            return Err(EpsError::QuadraticTerm);
        }
        Ok(Self::new(
            &self.standard * &other.standard,
            &self.standard * &other.eps + &self.eps * &other.standard,
        ))
    }

    /// Substitutes a concrete positive rational for ε.
    pub fn instantiate(&self, eps_value: &BigRational) -> Result<BigRational, EpsError> {
        if !eps_value.is_positive() {
            return Err(EpsError::NonPositiveEps(eps_value.clone()));
        }
        Ok(&self.standard + &self.eps * eps_value)
    }

    /// Largest ε for which the sign of this difference still matches its
    /// lexicographic sign, when that is bounded.
    pub fn sign_threshold(&self) -> Option<BigRational> {
        let a = &self.standard;
        let b = &self.eps;
        if a.is_zero() || b.is_zero() || a.is_positive() == b.is_positive() {
            None
        } else {
            Some(a.abs() / b.abs())
        }
    }

    fn lex_cmp(&self, other: &Self) -> Ordering {
        self.standard
            .cmp(&other.standard)
            .then_with(|| self.eps.cmp(&other.eps))
    }
}

/// Default ε for exporting weights of a graph on `n` marks with a discrete
/// base of size `k`: `1 / (n (k + 3))`.
pub fn default_eps(n: usize, k: usize) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(n * (k + 3)))
}

/// `ε₀` such that every strict comparison among `values` keeps its outcome
/// for all `0 < ε < ε₀`. Returns 1 when nothing constrains ε.
pub fn separation_bound(values: &[EpsRational]) -> BigRational {
    let diffs = values
        .iter()
        .enumerate()
        .flat_map(|(i, x)| values[i + 1..].iter().map(move |y| x - y));
    min_threshold(diffs)
}

fn min_threshold(diffs: impl IntoIterator<Item = EpsRational>) -> BigRational {
    diffs
        .into_iter()
        .filter_map(|d| d.sign_threshold())
        .min()
        .unwrap_or_else(BigRational::one)
}

impl Ord for EpsRational {
    fn cmp(&self, other: &Self) -> Ordering {
        let ord = self.lex_cmp(other);
        if ord != Ordering::Equal {
            record(self, other, ord);
        }
        ord
    }
}

impl PartialOrd for EpsRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

thread_local! {
    static AUDIT: RefCell<Option<BTreeSet<(BigRational, BigRational)>>> = const { RefCell::new(None) };
}

fn record(x: &EpsRational, y: &EpsRational, ord: Ordering) {
    AUDIT.with(|cell| {
        if let Ok(mut slot) = cell.try_borrow_mut() {
            if let Some(set) = slot.as_mut() {
                // store the positive one of ±(x - y)
                let (p, q) = if ord == Ordering::Greater {
                    (x, y)
                } else {
                    (y, x)
                };
                set.insert((&p.standard - &q.standard, &p.eps - &q.eps));
            }
        }
    });
}

/// Differences `x - y` of all strict comparisons observed by
/// [`audit_comparisons`], each stored with its lexicographically positive sign.
#[derive(Debug, Clone, Default)]
pub struct ComparisonAudit {
    differences: BTreeSet<(BigRational, BigRational)>,
}

impl ComparisonAudit {
    pub fn len(&self) -> usize {
        self.differences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.differences.is_empty()
    }

    pub fn differences(&self) -> impl Iterator<Item = EpsRational> + '_ {
        self.differences
            .iter()
            .map(|(a, b)| EpsRational::new(a.clone(), b.clone()))
    }

    pub fn merge(&mut self, other: ComparisonAudit) {
        self.differences.extend(other.differences);
    }

    pub fn separation_bound(&self) -> BigRational {
        min_threshold(self.differences())
    }

    /// The first recorded difference that is not positive at `eps_value`.
    pub fn first_violation(
        &self,
        eps_value: &BigRational,
    ) -> Result<Option<EpsRational>, EpsError> {
        for d in self.differences() {
            if !d.instantiate(eps_value)?.is_positive() {
                return Ok(Some(d));
            }
        }
        Ok(None)
    }
}

/// Runs `f`, recording every strict [`EpsRational`] comparison it makes on
/// this thread. Nested audits also report to the enclosing one.
pub fn audit_comparisons<R>(f: impl FnOnce() -> R) -> (R, ComparisonAudit) {
    let outer = AUDIT.with(|cell| cell.borrow_mut().replace(BTreeSet::new()));
    let result = f();
    let differences = AUDIT.with(|cell| {
        let mut slot = cell.borrow_mut();
        let mine = slot.take().unwrap_or_default();
        if let Some(mut outer) = outer {
            outer.extend(mine.iter().cloned());
            *slot = Some(outer);
        }
        mine
    });
    (result, ComparisonAudit { differences })
}

impl Add for &EpsRational {
    type Output = EpsRational;
    fn add(self, rhs: &EpsRational) -> EpsRational {
        EpsRational::new(&self.standard + &rhs.standard, &self.eps + &rhs.eps)
    }
}

impl Add for EpsRational {
    type Output = EpsRational;
    fn add(self, rhs: EpsRational) -> EpsRational {
        &self + &rhs
    }
}

impl AddAssign<&EpsRational> for EpsRational {
    fn add_assign(&mut self, rhs: &EpsRational) {
        self.standard += &rhs.standard;
        self.eps += &rhs.eps;
    }
}

impl Sub for &EpsRational {
    type Output = EpsRational;
    fn sub(self, rhs: &EpsRational) -> EpsRational {
        EpsRational::new(&self.standard - &rhs.standard, &self.eps - &rhs.eps)
    }
}

impl Sub for EpsRational {
    type Output = EpsRational;
    fn sub(self, rhs: EpsRational) -> EpsRational {
        &self - &rhs
    }
}

impl Neg for &EpsRational {
    type Output = EpsRational;
    fn neg(self) -> EpsRational {
        EpsRational::new(-&self.standard, -&self.eps)
    }
}

impl Neg for EpsRational {
    type Output = EpsRational;
    fn neg(self) -> EpsRational {
        -&self
    }
}

impl Mul<&BigRational> for &EpsRational {
    type Output = EpsRational;
    fn mul(self, rhs: &BigRational) -> EpsRational {
        self.scale(rhs)
    }
}

impl<'a> Sum<&'a EpsRational> for EpsRational {
    fn sum<I: Iterator<Item = &'a EpsRational>>(iter: I) -> Self {
        let mut acc = EpsRational::zero();
        for x in iter {
            acc += x;
        }
        acc
    }
}

impl Sum for EpsRational {
    fn sum<I: Iterator<Item = EpsRational>>(iter: I) -> Self {
        let mut acc = EpsRational::zero();
        for x in iter {
            acc += &x;
        }
        acc
    }
}

impl From<BigRational> for EpsRational {
    fn from(r: BigRational) -> Self {
        Self::from_rational(r)
    }
}

impl From<i64> for EpsRational {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

fn write_eps_term(f: &mut fmt::Formatter<'_>, coeff: &BigRational) -> fmt::Result {
    if coeff.is_one() {
        f.write_str("eps")
    } else {
        write!(f, "{coeff}*eps")
    }
}

impl fmt::Display for EpsRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.standard.is_zero(), self.eps.is_zero()) {
            (_, true) => write!(f, "{}", self.standard),
            (true, false) => {
                if self.eps.is_negative() {
                    f.write_str("-")?;
                }
                write_eps_term(f, &self.eps.abs())
            }
            (false, false) => {
                write!(f, "{}", self.standard)?;
                f.write_str(if self.eps.is_negative() { "-" } else { "+" })?;
                write_eps_term(f, &self.eps.abs())
            }
        }
    }
}

impl fmt::Debug for EpsRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for EpsRational {
    type Err = EpsError;

    /// Accepts sums of terms such as `1-3*eps`, `1/2+1/2*eps`, `4e`, `-e` and
    /// `(1+e)/2`. Both `eps` and `e` denote ε.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = ExprParser {
            src: s,
            bytes: s.as_bytes(),
            pos: 0,
        };
        let value = p.sum()?;
        p.skip_ws();
        if p.pos != p.bytes.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(value)
    }
}

struct ExprParser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl ExprParser<'_> {
    fn error(&self, reason: &str) -> EpsError {
        EpsError::Parse {
            input: self.src.to_string(),
            reason: format!("{reason} at offset {}", self.pos),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn sum(&mut self) -> Result<EpsRational, EpsError> {
        let mut acc = EpsRational::zero();
        let mut first = true;
        loop {
            let sign = match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    integer(1)
                }
                Some(b'-') => {
                    self.pos += 1;
                    integer(-1)
                }
                _ if first => integer(1),
                _ => return Ok(acc),
            };
            first = false;
            acc += &self.term()?.scale(&sign);
        }
    }

    fn integer(&mut self) -> Result<Option<BigInt>, EpsError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Ok(None);
        }
        self.src[start..self.pos]
            .parse()
            .map(Some)
            .map_err(|_| self.error("bad integer"))
    }

    fn eat_eps(&mut self) -> bool {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        for token in ["eps", "e", "ε"] {
            if rest.starts_with(token) {
                self.pos += token.len();
                return true;
            }
        }
        false
    }

    fn divisor(&mut self) -> Result<Option<BigInt>, EpsError> {
        if self.peek() != Some(b'/') {
            return Ok(None);
        }
        self.pos += 1;
        match self.integer()? {
            Some(d) if !d.is_zero() => Ok(Some(d)),
            _ => Err(self.error("expected a nonzero denominator")),
        }
    }

    fn term(&mut self) -> Result<EpsRational, EpsError> {
        if self.peek() == Some(b'(') {
            self.pos += 1;
            let inner = self.sum()?;
            if self.peek() != Some(b')') {
                return Err(self.error("expected ')'"));
            }
            self.pos += 1;
            return Ok(match self.divisor()? {
                Some(d) => inner.scale(&BigRational::new(BigInt::one(), d)),
                None => inner,
            });
        }
        let coeff = match self.integer()? {
            Some(num) => {
                let den = self.divisor()?.unwrap_or_else(BigInt::one);
                Some(BigRational::new(num, den))
            }
            None => None,
        };
        if let (Some(c), Some(b'*')) = (&coeff, self.peek()) {
            self.pos += 1;
            if !self.eat_eps() {
                return Err(self.error("expected eps after '*'"));
            }
            return Ok(EpsRational::new(BigRational::zero(), c.clone()));
        }
        if self.eat_eps() {
            let c = coeff.unwrap_or_else(BigRational::one);
            // trailing "/q" after eps, e.g. "e/2"
            let c = match self.divisor()? {
                Some(d) => c / BigRational::from_integer(d),
                None => c,
            };
            return Ok(EpsRational::new(BigRational::zero(), c));
        }
        coeff
            .map(EpsRational::from_rational)
            .ok_or_else(|| self.error("expected a number or eps"))
    }
}

#[derive(Serialize, Deserialize)]
struct EpsPair {
    a: String,
    b: String,
}

impl Serialize for EpsRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        EpsPair {
            a: self.standard.to_string(),
            b: self.eps.to_string(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for EpsRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let pair = EpsPair::deserialize(deserializer)?;
        let parse = |s: &str| {
            s.parse::<BigRational>()
                .map_err(|_| serde::de::Error::custom(format!("bad rational {s:?}")))
        };
        Ok(EpsRational::new(parse(&pair.a)?, parse(&pair.b)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(s: &str) -> EpsRational {
        s.parse().unwrap()
    }

    #[test]
    fn arithmetic() {
        assert_eq!(e("1-3e") + e("4e"), e("1+e"));
        assert_eq!(e("1") - e("1"), EpsRational::zero());
        let omega = ["1", "1-3e", "4e", "4e", "e", "e"];
        let total: EpsRational = omega.iter().map(|s| e(s)).sum();
        assert_eq!(total, EpsRational::affine(2, 7));
        assert_eq!(-e("2-e"), e("-2+e"));
        assert_eq!(e("1+2e").scale(&rational(1, 2)), e("1/2+e"));
    }

    #[test]
    fn ordering() {
        assert_eq!(e("1+e").cmp(&e("1")), Ordering::Greater);
        for k in 1..5 {
            assert!(EpsRational::affine(1, -k) < e("1"));
        }
        assert_eq!(e("1/2+2e").cmp(&e("1/2+2e")), Ordering::Equal);
        assert!(e("e") > EpsRational::zero());
        assert!(e("1000e") < e("1/1000"));
    }

    #[test]
    fn instantiation() {
        assert_eq!(
            e("1-3e").instantiate(&rational(1, 100)).unwrap(),
            rational(97, 100)
        );
        assert_eq!(e("e").instantiate(&rational(1, 7)).unwrap(), rational(1, 7));
        assert_eq!(
            EpsRational::zero().instantiate(&rational(5, 3)).unwrap(),
            integer(0)
        );
        assert!(matches!(
            e("1").instantiate(&integer(0)),
            Err(EpsError::NonPositiveEps(_))
        ));
        assert!(e("1").instantiate(&integer(-1)).is_err());
    }

    #[test]
    fn products() {
        assert_eq!(e("2").checked_mul(&e("1-e")).unwrap(), e("2-2e"));
        assert_eq!(e("e").checked_mul(&e("e")), Err(EpsError::QuadraticTerm));
    }

    #[test]
    fn text_forms() {
        for (input, shown) in [
            ("1-3*eps", "1-3*eps"),
            ("1-3e", "1-3*eps"),
            ("e", "eps"),
            ("-e", "-eps"),
            ("4e", "4*eps"),
            ("0", "0"),
            ("1/2+1/2*eps", "1/2+1/2*eps"),
            ("(1+e)/2", "1/2+1/2*eps"),
            ("e/2", "1/2*eps"),
            ("1 + 2 e", "1+2*eps"),
            ("2/4", "1/2"),
        ] {
            assert_eq!(e(input).to_string(), shown, "{input}");
            assert_eq!(e(shown), e(input));
        }
        for bad in ["", "1+", "e*e", "1/0", "(1+e", "x", "1e2x", "3*"] {
            assert!(bad.parse::<EpsRational>().is_err(), "{bad:?}");
        }
    }

    #[test]
    fn json_pairs() {
        let x = e("1/2-3e");
        let json = serde_json::to_string(&x).unwrap();
        assert_eq!(json, r#"{"a":"1/2","b":"-3"}"#);
        assert_eq!(serde_json::from_str::<EpsRational>(&json).unwrap(), x);
    }

    #[test]
    fn separation() {
        // 1 - 3e vs 1/2: holds while 3 eps < 1/2
        let vals = [e("1-3e"), e("1/2"), e("e")];
        assert_eq!(separation_bound(&vals), rational(1, 6));
        assert_eq!(separation_bound(&[e("1"), e("2")]), integer(1));
    }

    #[test]
    fn audit_records_strict_comparisons() {
        let (_, audit) = audit_comparisons(|| {
            let _ = e("1-3e") > e("1/2");
            let _ = e("1") == e("1");
            let _ = e("1").cmp(&e("1"));
            let _ = e("e") < e("2e");
        });
        assert_eq!(audit.len(), 2);
        let eps0 = audit.separation_bound();
        assert_eq!(eps0, rational(1, 6));
        assert_eq!(
            audit.first_violation(&(eps0.clone() / integer(2))).unwrap(),
            None
        );
        assert!(audit.first_violation(&eps0).unwrap().is_some());
    }

    #[test]
    fn nested_audits_propagate() {
        let (inner, outer) = audit_comparisons(|| {
            let (_, inner) = audit_comparisons(|| e("1") < e("2"));
            let _ = e("e") < e("1");
            inner
        });
        assert_eq!(inner.len(), 1);
        assert_eq!(outer.len(), 2);
    }
}
