//! Truncated power series with exact rational coefficients.
//!
//! A series lives in one of a few fixed variable sets. Truncation is by the
//! degree of the leading variable (`lambda`, `tau`, `rho` or `sigma`); the
//! remaining variables enter polynomially, which is exact for every
//! expansion built here because each order of the leading variable carries
//! a finite polynomial in the others.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// Exponents of (leading, second, third) variables; unused slots stay zero.
pub type Exponents = [u32; 3];

/// The formal variables of a series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variables {
    /// `(lambda, mu)`.
    LambdaMu,
    /// `(tau, mu, 1/pi)`; the third slot carries powers of `1/pi`.
    TauMu,
    /// `rho = xi / kappa`.
    Rho,
    /// `sigma`, the offset of `a` from one half.
    Sigma,
}

impl Variables {
    pub fn names(&self) -> &'static [&'static str] {
        match self {
            Variables::LambdaMu => &["lambda", "mu"],
            Variables::TauMu => &["tau", "mu", "inv_pi"],
            Variables::Rho => &["rho"],
            Variables::Sigma => &["sigma"],
        }
    }

    pub fn arity(&self) -> usize {
        self.names().len()
    }
}

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// A truncated multivariate power series over the rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesPoly {
    vars: Variables,
    order: u32,
    terms: BTreeMap<Exponents, BigRational>,
    dropped: usize,
}

impl SeriesPoly {
    pub fn zero(vars: Variables, order: u32) -> Self {
        Self {
            vars,
            order,
            terms: BTreeMap::new(),
            dropped: 0,
        }
    }

    pub fn constant(vars: Variables, order: u32, c: BigRational) -> Self {
        let mut s = Self::zero(vars, order);
        s.add_term([0, 0, 0], c);
        s
    }

    pub fn one(vars: Variables, order: u32) -> Self {
        Self::constant(vars, order, BigRational::one())
    }

    pub fn monomial(vars: Variables, order: u32, exps: Exponents, c: BigRational) -> Self {
        let mut s = Self::zero(vars, order);
        s.add_term(exps, c);
        s
    }

    /// The variable in slot `index` as a series.
    pub fn variable(vars: Variables, order: u32, index: usize) -> Self {
        let mut exps = [0; 3];
        exps[index] = 1;
        Self::monomial(vars, order, exps, BigRational::one())
    }

    /// `sum_k coeffs[k] t^(stride k)` in the leading variable.
    pub fn univariate(vars: Variables, order: u32, coeffs: &[BigRational], stride: u32) -> Self {
        let mut s = Self::zero(vars, order);
        for (k, c) in coeffs.iter().enumerate() {
            s.add_term([stride * k as u32, 0, 0], c.clone());
        }
        s
    }

    pub fn vars(&self) -> Variables {
        self.vars
    }

    /// Highest kept exponent of the leading variable.
    pub fn order(&self) -> u32 {
        self.order
    }

    /// Number of terms discarded by truncation while building this series.
    pub fn dropped(&self) -> usize {
        self.dropped
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &BigRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: Exponents) -> BigRational {
        self.terms
            .get(&exps)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn constant_term(&self) -> BigRational {
        self.coeff([0, 0, 0])
    }

    /// Adds `c * monomial`, or records a drop beyond the truncation order.
    pub fn add_term(&mut self, exps: Exponents, c: BigRational) {
        if c.is_zero() {
            return;
        }
        if exps[0] > self.order {
            self.dropped += 1;
            return;
        }
        let entry = self.terms.entry(exps).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&exps);
        }
    }

    fn check_compatible(&self, other: &Self) {
        assert_eq!(self.vars, other.vars, "series over different variables");
    }

    fn result_order(&self, other: &Self) -> u32 {
        self.order.min(other.order)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_compatible(other);
        let mut out = Self::zero(self.vars, self.result_order(other));
        out.dropped = self.dropped + other.dropped;
        for (e, c) in self.terms.iter().chain(other.terms.iter()) {
            out.add_term(*e, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&int(-1))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut out = Self::zero(self.vars, self.order);
        out.dropped = self.dropped;
        for (e, v) in &self.terms {
            out.add_term(*e, v * c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_compatible(other);
        let mut out = Self::zero(self.vars, self.result_order(other));
        out.dropped = self.dropped + other.dropped;
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]];
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut out = Self::one(self.vars, self.order);
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Keeps only terms up to `order` in the leading variable.
    pub fn truncate(&self, order: u32) -> Self {
        let mut out = Self::zero(self.vars, order.min(self.order));
        out.dropped = self.dropped;
        for (e, c) in &self.terms {
            out.add_term(*e, c.clone());
        }
        out
    }

    /// All terms with leading exponent exactly `k`.
    pub fn slice(&self, k: u32) -> Self {
        let mut out = Self::zero(self.vars, self.order);
        for (e, c) in self.terms.iter().filter(|(e, _)| e[0] == k) {
            out.add_term(*e, c.clone());
        }
        out
    }

    fn lowest_leading_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e[0]).min()
    }

    /// Composition `f(self)` for `f(t) = sum_k coeffs[k] t^k`.
    ///
    /// Requires every term of `self` to carry the leading variable, so that
    /// powers of `self` vanish beyond the truncation order.
    pub fn compose(&self, coeffs: &[BigRational]) -> Result<Self> {
        let low = self.lowest_leading_degree().unwrap_or(u32::MAX);
        if low == 0 {
            return Err(Error::Domain {
                what: "series argument without leading-variable factor, terms",
                value: self.len() as f64,
            });
        }
        let needed = if low == u32::MAX {
            0
        } else {
            (self.order / low) as usize
        };
        let top = needed.min(coeffs.len().saturating_sub(1));
        let mut acc = Self::constant(
            self.vars,
            self.order,
            coeffs.get(top).cloned().unwrap_or_default(),
        );
        for k in (0..top).rev() {
            acc = acc.mul(self);
            acc.add_term([0, 0, 0], coeffs[k].clone());
        }
        acc.dropped += self.dropped;
        Ok(acc)
    }

    /// `1 / self`, for a series whose non-constant part carries the leading variable.
    pub fn reciprocal(&self) -> Result<Self> {
        let c0 = self.constant_term();
        if c0.is_zero() {
            return Err(Error::Domain {
                what: "constant term of reciprocal",
                value: 0.0,
            });
        }
        let inv = c0.recip();
        // 1/(c0 (1 + g)) = inv * sum (-g)^k
        let mut g = self.scale(&inv);
        g.add_term([0, 0, 0], int(-1));
        let geometric: Vec<BigRational> = (0..=self.order as i64)
            .map(|k| if k % 2 == 0 { int(1) } else { int(-1) })
            .collect();
        Ok(g.compose(&geometric)?.scale(&inv))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.reciprocal()?))
    }

    /// Replaces the leading variable by `replacement` (a series over
    /// `replacement.vars()`); the second and third slots map across unchanged.
    pub fn substitute_leading(&self, replacement: &SeriesPoly) -> Result<Self> {
        let low = replacement.lowest_leading_degree().unwrap_or(u32::MAX);
        if low == 0 {
            return Err(Error::Domain {
                what: "replacement without leading-variable factor, terms",
                value: replacement.len() as f64,
            });
        }
        let vars = replacement.vars;
        let order = replacement.order;
        let mut out = Self::zero(vars, order);
        let mut power = Self::one(vars, order);
        let top = self.terms.keys().map(|e| e[0]).max().unwrap_or(0);
        for k in 0..=top {
            if k > 0 {
                power = power.mul(replacement);
            }
            if power.is_empty() {
                break;
            }
            for (e, c) in self.terms.iter().filter(|(e, _)| e[0] == k) {
                let rest = Self::monomial(vars, order, [0, e[1], e[2]], c.clone());
                out = out.add(&power.mul(&rest));
            }
        }
        out.dropped += self.dropped;
        Ok(out)
    }

    /// Numeric value; `point` holds one value per variable of the set.
    ///
    /// Horner in the leading variable, with each coefficient polynomial
    /// evaluated by Horner in the second variable.
    pub fn evaluate(&self, point: &[f64]) -> f64 {
        let x = point.first().copied().unwrap_or(0.0);
        let y = point.get(1).copied().unwrap_or(0.0);
        let w = point.get(2).copied().unwrap_or(0.0);
        let top = self.terms.keys().map(|e| e[0]).max().unwrap_or(0);
        let mut acc = 0.0;
        for k in (0..=top).rev() {
            let mut inner: BTreeMap<u32, f64> = BTreeMap::new();
            for (e, c) in self.terms.iter().filter(|(e, _)| e[0] == k) {
                let v = c.to_f64().unwrap_or(f64::NAN) * w.powi(e[2] as i32);
                *inner.entry(e[1]).or_insert(0.0) += v;
            }
            let jtop = inner.keys().copied().max().unwrap_or(0);
            let mut poly = 0.0;
            for j in (0..=jtop).rev() {
                poly = poly * y + inner.get(&j).copied().unwrap_or(0.0);
            }
            acc = acc * x + poly;
        }
        acc
    }

    /// One line per term: the exponents of each variable, then `num/den`.
    pub fn to_table(&self) -> String {
        let arity = self.vars.arity();
        let mut out = String::new();
        for (e, c) in &self.terms {
            for exp in e.iter().take(arity) {
                out.push_str(&exp.to_string());
                out.push(' ');
            }
            out.push_str(&format!("{}/{}\n", c.numer(), c.denom()));
        }
        out
    }
}

impl fmt::Display for SeriesPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let names = self.vars.names();
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let sign = if c.is_negative() { "-" } else { "+" };
            if i > 0 || c.is_negative() {
                write!(f, "{}{}", if i > 0 { " " } else { "" }, sign)?;
                if i > 0 {
                    write!(f, " ")?;
                }
            }
            write!(f, "{}", c.abs())?;
            for (slot, name) in names.iter().enumerate() {
                match e[slot] {
                    0 => {}
                    1 => write!(f, "*{name}")?,
                    p => write!(f, "*{name}^{p}")?,
                }
            }
        }
        Ok(())
    }
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Taylor coefficients of `sin t` through `t^n`.
pub fn sin_coeffs(n: u32) -> Vec<BigRational> {
    (0..=n)
        .map(|k| {
            if k % 2 == 0 {
                BigRational::zero()
            } else {
                let sign = if (k / 2) % 2 == 0 { 1 } else { -1 };
                BigRational::new(BigInt::from(sign), factorial(k))
            }
        })
        .collect()
}

/// Taylor coefficients of `cos t` through `t^n`.
pub fn cos_coeffs(n: u32) -> Vec<BigRational> {
    (0..=n)
        .map(|k| {
            if k % 2 == 1 {
                BigRational::zero()
            } else {
                let sign = if (k / 2) % 2 == 0 { 1 } else { -1 };
                BigRational::new(BigInt::from(sign), factorial(k))
            }
        })
        .collect()
}

/// Taylor coefficients of `arcsin t` through `t^n`:
/// `sum (2k)! / (4^k (k!)^2 (2k + 1)) t^(2k+1)`.
pub fn asin_coeffs(n: u32) -> Vec<BigRational> {
    (0..=n)
        .map(|j| {
            if j % 2 == 0 {
                BigRational::zero()
            } else {
                let k = (j - 1) / 2;
                let num = factorial(2 * k);
                let den = BigInt::from(4).pow(k) * factorial(k).pow(2) * BigInt::from(2 * k + 1);
                BigRational::new(num, den)
            }
        })
        .collect()
}

/// Binomial coefficients of `(1 + t)^p` through `t^n` for rational `p`.
pub fn binomial_coeffs(p: &BigRational, n: u32) -> Vec<BigRational> {
    let mut out = Vec::with_capacity(n as usize + 1);
    let mut c = BigRational::one();
    out.push(c.clone());
    for k in 1..=n {
        c = c * (p - int(k as i64 - 1)) / int(k as i64);
        out.push(c.clone());
    }
    out
}

/// Coefficients of `g(c t)` given those of `g(t)`.
pub fn rescale_coeffs(coeffs: &[BigRational], c: &BigRational) -> Vec<BigRational> {
    let mut factor = BigRational::one();
    coeffs
        .iter()
        .map(|a| {
            let v = a * &factor;
            factor *= c;
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lm(order: u32) -> (SeriesPoly, SeriesPoly) {
        (
            SeriesPoly::variable(Variables::LambdaMu, order, 0),
            SeriesPoly::variable(Variables::LambdaMu, order, 1),
        )
    }

    #[test]
    fn truncation_drops_and_records() {
        let (l, _) = lm(3);
        let p = l.powi(5);
        assert!(p.is_empty());
        assert!(p.dropped() > 0);
        let q = l.powi(3);
        assert_eq!(q.coeff([3, 0, 0]), int(1));
    }

    #[test]
    fn sin_squared_plus_cos_squared() {
        let (l, m) = lm(12);
        let t = l.mul(&m).add(&l.powi(2));
        let s = t.compose(&sin_coeffs(12)).unwrap();
        let c = t.compose(&cos_coeffs(12)).unwrap();
        let sum = s.mul(&s).add(&c.mul(&c));
        assert_eq!(sum.len(), 1);
        assert_eq!(sum.constant_term(), int(1));
    }

    #[test]
    fn asin_inverts_sin() {
        let (l, _) = lm(11);
        let s = l.compose(&sin_coeffs(11)).unwrap();
        let back = s.compose(&asin_coeffs(11)).unwrap();
        assert_eq!(back.terms().count(), 1);
        assert_eq!(back.coeff([1, 0, 0]), int(1));
    }

    #[test]
    fn binomial_half_squares_to_linear() {
        let (l, _) = lm(10);
        let root = l.compose(&binomial_coeffs(&rational(1, 2), 10)).unwrap();
        let sq = root.mul(&root);
        assert_eq!(sq.constant_term(), int(1));
        assert_eq!(sq.coeff([1, 0, 0]), int(1));
        assert_eq!(sq.terms().count(), 2);
    }

    #[test]
    fn reciprocal_of_geometric() {
        let (l, m) = lm(9);
        let one = SeriesPoly::one(Variables::LambdaMu, 9);
        let f = one.sub(&l.mul(&m));
        let inv = f.reciprocal().unwrap();
        for k in 0..=9 {
            assert_eq!(inv.coeff([k, k, 0]), int(1));
        }
        assert!(SeriesPoly::zero(Variables::LambdaMu, 4)
            .reciprocal()
            .is_err());
    }

    #[test]
    fn compose_rejects_constant_part() {
        let (l, m) = lm(4);
        assert!(l.add(&m).compose(&sin_coeffs(4)).is_err());
    }

    #[test]
    fn table_lines_carry_exponents_and_fraction() {
        let (l, m) = lm(6);
        let s = l
            .powi(2)
            .mul(&m.powi(2))
            .add(&l.powi(6).mul(&m.powi(6)).scale(&rational(7, 6)));
        assert_eq!(s.to_table(), "2 2 1/1\n6 6 7/6\n");
    }

    #[test]
    fn substitution_maps_mu_slot() {
        let (l, m) = lm(4);
        let s = l.powi(2).mul(&m);
        let t = SeriesPoly::variable(Variables::TauMu, 4, 0);
        let p = SeriesPoly::variable(Variables::TauMu, 4, 2);
        let repl = t.mul(&p).scale(&int(-1));
        let out = s.substitute_leading(&repl).unwrap();
        assert_eq!(out.coeff([2, 1, 2]), int(1));
    }

    proptest! {
        #[test]
        fn evaluation_is_a_ring_homomorphism(
            ca in -5i64..5, cb in -5i64..5, x in -0.5f64..0.5, y in -2.0f64..2.0
        ) {
            let (l, m) = lm(8);
            let a = l.mul(&m).scale(&int(ca)).add(&l.powi(3)).add(&SeriesPoly::one(Variables::LambdaMu, 8));
            let b = l.powi(2).scale(&int(cb)).add(&m.mul(&l));
            let pt = [x, y];
            let prod = a.mul(&b).evaluate(&pt);
            prop_assert!((prod - a.evaluate(&pt) * b.evaluate(&pt)).abs() < 1e-12);
            let sum = a.add(&b).evaluate(&pt);
            prop_assert!((sum - a.evaluate(&pt) - b.evaluate(&pt)).abs() < 1e-12);
        }
    }
}
