//! Exact Laurent polynomials in one variable with big-integer coefficients.
//!
//! The variable carries a tag so that the three bracket normalizations
//! (`A`, `q`, and quarter powers of `t`) cannot be mixed by accident.
//! Conversions between tags are exact substitutions:
//!
//! * `A^2 -> -q^{-1}` (so `A^{2m} -> (-1)^m q^{-m}`),
//! * `A -> t^{-1/4}` (exponent `e` of `A` becomes `-e` quarter powers of `t`).

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The formal variable of a [`Laurent`] polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    A,
    Q,
    /// `t^{1/4}`; exponent `e` means `t^{e/4}`.
    TQuarter,
    T,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::A => "A",
            Var::Q => "q",
            Var::TQuarter => "tQuarter",
            Var::T => "t",
        }
    }

    pub fn from_name(s: &str) -> Result<Var> {
        match s {
            "A" => Ok(Var::A),
            "q" => Ok(Var::Q),
            "tQuarter" => Ok(Var::TQuarter),
            "t" => Ok(Var::T),
            other => Err(Error::Parse(format!("unknown variable tag `{other}`"))),
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Exact Laurent polynomial. No zero coefficient is ever stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Laurent {
    var: Var,
    terms: BTreeMap<i64, BigInt>,
}

impl Laurent {
    pub fn zero(var: Var) -> Self {
        Laurent {
            var,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(var: Var) -> Self {
        Self::monomial(var, 0, 1)
    }

    pub fn monomial(var: Var, exponent: i64, coeff: impl Into<BigInt>) -> Self {
        let mut p = Self::zero(var);
        p.add_term(exponent, coeff.into());
        p
    }

    pub fn from_terms<I, C>(var: Var, terms: I) -> Self
    where
        I: IntoIterator<Item = (i64, C)>,
        C: Into<BigInt>,
    {
        let mut p = Self::zero(var);
        for (e, c) in terms {
            p.add_term(e, c.into());
        }
        p
    }

    /// The loop value `-A^2 - A^{-2}`.
    pub fn delta() -> Self {
        Self::from_terms(Var::A, [(2, -1), (-2, -1)])
    }

    /// `q + q^{-1}`.
    pub fn q_circle() -> Self {
        Self::from_terms(Var::Q, [(1, 1), (-1, 1)])
    }

    pub fn var(&self) -> Var {
        self.var
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn coeff(&self, exponent: i64) -> BigInt {
        self.terms.get(&exponent).cloned().unwrap_or_default()
    }

    pub fn min_exponent(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exponent(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, exponent: i64, coeff: BigInt) {
        if coeff.is_zero() {
            return;
        }
        let slot = self.terms.entry(exponent).or_default();
        *slot += coeff;
        if slot.is_zero() {
            self.terms.remove(&exponent);
        }
    }

    fn same_var(&self, other: &Laurent) {
        assert_eq!(
            self.var, other.var,
            "Laurent arithmetic across variables {} and {}",
            self.var, other.var
        );
    }

    pub fn scale(&self, c: &BigInt) -> Laurent {
        let mut out = Laurent::zero(self.var);
        for (e, v) in &self.terms {
            out.add_term(*e, v * c);
        }
        out
    }

    /// Multiply by `var^shift`.
    pub fn shift(&self, shift: i64) -> Laurent {
        Laurent {
            var: self.var,
            terms: self.terms.iter().map(|(e, c)| (e + shift, c.clone())).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Laurent {
        let mut acc = Laurent::one(self.var);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Substitute `x -> x^{-1}`.
    pub fn invert_variable(&self) -> Laurent {
        Laurent {
            var: self.var,
            terms: self.terms.iter().map(|(e, c)| (-e, c.clone())).collect(),
        }
    }

    /// Exact division. Fails if the divisor does not divide `self`.
    pub fn div_exact(&self, divisor: &Laurent) -> Result<Laurent> {
        self.same_var(divisor);
        let (dmax, dlead) = match divisor.terms.iter().next_back() {
            Some((e, c)) => (*e, c.clone()),
            None => return Err(Error::InexactDivision),
        };
        let dmin = divisor.min_exponent().unwrap();
        let floor = match self.min_exponent() {
            Some(m) => m - dmin,
            None => return Ok(Laurent::zero(self.var)),
        };
        let mut rem = self.clone();
        let mut quot = Laurent::zero(self.var);
        while let Some((&top, c)) = rem.terms.iter().next_back() {
            let shift = top - dmax;
            if shift < floor {
                return Err(Error::InexactDivision);
            }
            let (q, r) = c.div_rem(&dlead);
            if !r.is_zero() {
                return Err(Error::InexactDivision);
            }
            for (e, dc) in &divisor.terms {
                rem.add_term(e + shift, -(dc * &q));
            }
            quot.add_term(shift, q);
        }
        Ok(quot)
    }

    /// Evaluate at a complex point.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        if z == Complex64::new(0.0, 0.0) {
            if let Some(e) = self.min_exponent().filter(|e| *e < 0) {
                return Err(Error::ZeroEvaluation(e));
            }
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let cf = c.to_f64().unwrap_or(f64::NAN);
            acc += z.powi(*e as i32) * cf;
        }
        Ok(acc)
    }

    /// Re-express over another variable tag by exact substitution.
    ///
    /// Strict targets fail when an exponent is not divisible as required
    /// (odd `A` exponents for `q`, `t^{1/4}` exponents not divisible by 4
    /// for `t`).
    pub fn convert(&self, to: Var) -> Result<Laurent> {
        if self.var == to {
            return Ok(self.clone());
        }
        let in_a = self.to_a()?;
        in_a.from_a(to)
    }

    /// Jones-style form: `t` when every exponent is integral, else `tQuarter`.
    pub fn to_t_or_quarter(&self) -> Result<Laurent> {
        match self.convert(Var::T) {
            Ok(p) => Ok(p),
            Err(Error::Divisibility { .. }) => self.convert(Var::TQuarter),
            Err(e) => Err(e),
        }
    }

    fn to_a(&self) -> Result<Laurent> {
        let mut out = Laurent::zero(Var::A);
        for (e, c) in &self.terms {
            match self.var {
                Var::A => out.add_term(*e, c.clone()),
                // q = -A^{-2}
                Var::Q => {
                    let sign = if e.rem_euclid(2) == 0 { 1 } else { -1 };
                    out.add_term(-2 * e, c * sign);
                }
                Var::TQuarter => out.add_term(-e, c.clone()),
                Var::T => out.add_term(-4 * e, c.clone()),
            }
        }
        Ok(out)
    }

    fn from_a(&self, to: Var) -> Result<Laurent> {
        debug_assert_eq!(self.var, Var::A);
        let mut out = Laurent::zero(to);
        for (e, c) in &self.terms {
            match to {
                Var::A => out.add_term(*e, c.clone()),
                Var::Q => {
                    if e % 2 != 0 {
                        return Err(Error::Divisibility {
                            exponent: *e,
                            target: "q",
                        });
                    }
                    let m = e / 2;
                    let sign = if m.rem_euclid(2) == 0 { 1 } else { -1 };
                    out.add_term(-m, c * sign);
                }
                Var::TQuarter => out.add_term(-e, c.clone()),
                Var::T => {
                    if e % 4 != 0 {
                        return Err(Error::Divisibility {
                            exponent: -e,
                            target: "t",
                        });
                    }
                    out.add_term(-e / 4, c.clone());
                }
            }
        }
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("polynomial serializes")
    }

    pub fn from_json(text: &str) -> Result<Laurent> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

impl Add<&Laurent> for &Laurent {
    type Output = Laurent;
    fn add(self, rhs: &Laurent) -> Laurent {
        self.same_var(rhs);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl Add for Laurent {
    type Output = Laurent;
    fn add(self, rhs: Laurent) -> Laurent {
        &self + &rhs
    }
}

impl AddAssign<Laurent> for Laurent {
    fn add_assign(&mut self, rhs: Laurent) {
        *self += &rhs;
    }
}

impl AddAssign<&Laurent> for Laurent {
    fn add_assign(&mut self, rhs: &Laurent) {
        self.same_var(rhs);
        for (e, c) in &rhs.terms {
            self.add_term(*e, c.clone());
        }
    }
}

impl Sub<&Laurent> for &Laurent {
    type Output = Laurent;
    fn sub(self, rhs: &Laurent) -> Laurent {
        self + &(-rhs)
    }
}

impl Sub for Laurent {
    type Output = Laurent;
    fn sub(self, rhs: Laurent) -> Laurent {
        &self - &rhs
    }
}

impl Neg for &Laurent {
    type Output = Laurent;
    fn neg(self) -> Laurent {
        Laurent {
            var: self.var,
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

impl Neg for Laurent {
    type Output = Laurent;
    fn neg(self) -> Laurent {
        -&self
    }
}

impl Mul<&Laurent> for &Laurent {
    type Output = Laurent;
    fn mul(self, rhs: &Laurent) -> Laurent {
        self.same_var(rhs);
        let mut out = Laurent::zero(self.var);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

impl Mul for Laurent {
    type Output = Laurent;
    fn mul(self, rhs: Laurent) -> Laurent {
        &self * &rhs
    }
}

impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let v = match self.var {
            Var::TQuarter => "t^(1/4)",
            other => other.name(),
        };
        for (k, (e, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if k == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            let unit = mag.is_one();
            match (*e, unit) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "{v}")?,
                (1, false) => write!(f, "{mag}*{v}")?,
                (e, true) => write!(f, "{v}^{e}")?,
                (e, false) => write!(f, "{mag}*{v}^{e}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for Laurent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let terms: Vec<(i64, serde_json::Number)> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let n: serde_json::Number = c.to_string().parse().expect("integer literal");
                (*e, n)
            })
            .collect();
        let mut st = serializer.serialize_struct("Laurent", 2)?;
        st.serialize_field("var", self.var.name())?;
        st.serialize_field("terms", &terms)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for Laurent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            var: String,
            terms: Vec<(i64, serde_json::Number)>,
        }
        let raw = Raw::deserialize(deserializer)?;
        let var = Var::from_name(&raw.var).map_err(de::Error::custom)?;
        let mut p = Laurent::zero(var);
        let mut last = None;
        for (e, n) in raw.terms {
            if last.is_some_and(|l| l >= e) {
                return Err(de::Error::custom("terms must be sorted by strictly ascending exponent"));
            }
            last = Some(e);
            let c: BigInt = n
                .to_string()
                .parse()
                .map_err(|_| de::Error::custom(format!("coefficient `{n}` is not an integer")))?;
            if c.is_zero() {
                return Err(de::Error::custom("zero coefficient stored"));
            }
            p.add_term(e, c);
        }
        Ok(p)
    }
}
