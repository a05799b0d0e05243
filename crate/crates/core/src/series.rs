//! Truncated power and Laurent series in one variable over exact rationals.

use std::ops::{Add, Mul, Neg, Sub};

use crate::scalar::{Rational, Scalar};

/// `Σ coeffs[k] y^k`, known modulo `y^prec`.
///
/// Constants built with [`Scalar::from_i64`] are exact (`prec == usize::MAX`);
/// arithmetic keeps the smaller precision of its operands.
#[derive(Clone, Debug)]
pub struct PowerSeries {
    coeffs: Vec<Rational>,
    prec: usize,
}

impl PowerSeries {
    pub fn new(mut coeffs: Vec<Rational>, prec: usize) -> Self {
        coeffs.truncate(prec);
        let mut s = PowerSeries { coeffs, prec };
        s.trim();
        s
    }

    pub fn constant(c: Rational) -> Self {
        PowerSeries::new(vec![c], usize::MAX)
    }

    /// The variable `y` known modulo `y^prec`.
    pub fn var(prec: usize) -> Self {
        PowerSeries::new(vec![<Rational as Scalar>::zero(), <Rational as Scalar>::one()], prec)
    }

    /// `c · y^k` known modulo `y^prec`.
    pub fn monomial(c: Rational, k: usize, prec: usize) -> Self {
        let mut v = vec![<Rational as Scalar>::zero(); k + 1];
        v[k] = c;
        PowerSeries::new(v, prec)
    }

    pub fn prec(&self) -> usize {
        self.prec
    }

    /// Coefficient of `y^k` (zero beyond the stored terms).
    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(<Rational as Scalar>::zero)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn truncate(&self, prec: usize) -> Self {
        PowerSeries::new(self.coeffs.clone(), prec.min(self.prec))
    }

    /// Substitutes `y -> s·y`.
    pub fn rescale(&self, s: &Rational) -> Self {
        let mut p = <Rational as Scalar>::one();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            out.push(c * &p);
            p = &p * s;
        }
        PowerSeries::new(out, self.prec)
    }

    /// Largest coefficient magnitude over `y^0..y^{upto}`.
    pub fn max_coeff_upto(&self, upto: usize) -> f64 {
        (0..=upto.min(self.coeffs.len().saturating_sub(1)))
            .map(|k| self.coeffs[k].magnitude())
            .fold(0.0, f64::max)
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Scalar::is_zero) {
            self.coeffs.pop();
        }
    }
}

impl PartialEq for PowerSeries {
    fn eq(&self, other: &Self) -> bool {
        let p = self.prec.min(other.prec);
        let n = self.coeffs.len().max(other.coeffs.len()).min(p);
        (0..n).all(|k| self.coeff(k) == other.coeff(k))
    }
}

impl Add for PowerSeries {
    type Output = PowerSeries;
    fn add(self, rhs: Self) -> Self {
        let prec = self.prec.min(rhs.prec);
        let n = self.coeffs.len().max(rhs.coeffs.len()).min(prec);
        PowerSeries::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect(), prec)
    }
}

impl Sub for PowerSeries {
    type Output = PowerSeries;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for PowerSeries {
    type Output = PowerSeries;
    fn neg(self) -> Self {
        PowerSeries {
            coeffs: self.coeffs.into_iter().map(|c| -c).collect(),
            prec: self.prec,
        }
    }
}

impl Mul for PowerSeries {
    type Output = PowerSeries;
    fn mul(self, rhs: Self) -> Self {
        let prec = self.prec.min(rhs.prec);
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return PowerSeries::new(Vec::new(), prec);
        }
        let n = (self.coeffs.len() + rhs.coeffs.len() - 1).min(prec);
        let mut out = vec![<Rational as Scalar>::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if i >= n || Scalar::is_zero(a) {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if i + j >= n {
                    break;
                }
                out[i + j] += a * b;
            }
        }
        PowerSeries::new(out, prec)
    }
}

impl Scalar for PowerSeries {
    fn zero() -> Self {
        PowerSeries::new(Vec::new(), usize::MAX)
    }
    fn one() -> Self {
        PowerSeries::constant(<Rational as Scalar>::one())
    }
    fn from_i64(v: i64) -> Self {
        PowerSeries::constant(Rational::from_i64(v))
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        PowerSeries::constant(Rational::from_ratio(num, den))
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn inv(&self) -> Option<Self> {
        let c0 = self.coeffs.first()?.clone();
        let c0i = Scalar::inv(&c0)?;
        if self.coeffs.len() == 1 {
            return Some(PowerSeries::new(vec![c0i], self.prec));
        }
        if self.prec == usize::MAX {
            return None;
        }
        let n = self.prec;
        let mut out: Vec<Rational> = Vec::with_capacity(n);
        out.push(c0i.clone());
        for k in 1..n {
            let mut s = <Rational as Scalar>::zero();
            for j in 1..=k.min(self.coeffs.len() - 1) {
                s += &self.coeffs[j] * &out[k - j];
            }
            out.push(-(s * &c0i));
        }
        Some(PowerSeries::new(out, n))
    }
    fn magnitude(&self) -> f64 {
        self.coeffs.iter().map(|c| c.magnitude()).fold(0.0, f64::max)
    }
}

/// `y^val · body`, a truncated Laurent series; precision is absolute (`val + body.prec()`).
#[derive(Clone, Debug)]
pub struct LaurentSeries {
    val: i64,
    body: PowerSeries,
}

fn shift_up(s: &PowerSeries, k: usize) -> PowerSeries {
    if k == 0 {
        return s.clone();
    }
    let mut v = vec![<Rational as Scalar>::zero(); k];
    v.extend_from_slice(s.coeffs());
    let prec = if s.prec() == usize::MAX {
        usize::MAX
    } else {
        s.prec() + k
    };
    PowerSeries::new(v, prec)
}

impl LaurentSeries {
    pub fn from_power(body: PowerSeries) -> Self {
        LaurentSeries { val: 0, body }.normalized()
    }

    pub fn constant(c: Rational) -> Self {
        LaurentSeries::from_power(PowerSeries::constant(c))
    }

    /// `y` known modulo `y^prec`.
    pub fn var(prec: usize) -> Self {
        LaurentSeries::monomial(<Rational as Scalar>::one(), 1, prec as i64)
    }

    /// `c · y^k` known modulo `y^abs_prec`.
    pub fn monomial(c: Rational, k: i64, abs_prec: i64) -> Self {
        let rel = (abs_prec - k).max(0) as usize;
        LaurentSeries {
            val: k,
            body: PowerSeries::new(vec![c], rel),
        }
        .normalized()
    }

    /// `Σ coeffs[k] y^k` known modulo `y^abs_prec`.
    pub fn from_coeffs(coeffs: Vec<Rational>, abs_prec: usize) -> Self {
        LaurentSeries::from_power(PowerSeries::new(coeffs, abs_prec))
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn valuation(&self) -> Option<i64> {
        (!self.body.coeffs().is_empty()).then_some(self.val)
    }

    /// Exponent below which all coefficients are known; `None` when exact.
    pub fn abs_prec(&self) -> Option<i64> {
        (self.body.prec() != usize::MAX).then(|| self.val + self.body.prec() as i64)
    }

    pub fn coeff(&self, k: i64) -> Rational {
        if k < self.val {
            return <Rational as Scalar>::zero();
        }
        self.body.coeff((k - self.val) as usize)
    }

    /// Substitutes `y -> s·y`.
    pub fn rescale(&self, s: &Rational) -> Self {
        let lead = Scalar::powi(s, self.val).expect("nonzero rescaling factor");
        LaurentSeries {
            val: self.val,
            body: self.body.rescale(s),
        } * LaurentSeries::constant(lead)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        self.clone() * LaurentSeries::constant(c.clone())
    }

    fn normalized(mut self) -> Self {
        let z = self.body.coeffs().iter().take_while(|c| Scalar::is_zero(*c)).count();
        if z > 0 && z < self.body.coeffs().len() {
            let rest = self.body.coeffs()[z..].to_vec();
            let prec = if self.body.prec() == usize::MAX {
                usize::MAX
            } else {
                self.body.prec() - z
            };
            self.body = PowerSeries::new(rest, prec);
            self.val += z as i64;
        }
        self
    }
}

impl PartialEq for LaurentSeries {
    fn eq(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).is_zero()
    }
}

impl Add for LaurentSeries {
    type Output = LaurentSeries;
    fn add(self, rhs: Self) -> Self {
        let v = self.val.min(rhs.val);
        let a = shift_up(&self.body, (self.val - v) as usize);
        let b = shift_up(&rhs.body, (rhs.val - v) as usize);
        LaurentSeries { val: v, body: a + b }.normalized()
    }
}

impl Sub for LaurentSeries {
    type Output = LaurentSeries;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for LaurentSeries {
    type Output = LaurentSeries;
    fn neg(self) -> Self {
        LaurentSeries {
            val: self.val,
            body: -self.body,
        }
    }
}

impl Mul for LaurentSeries {
    type Output = LaurentSeries;
    fn mul(self, rhs: Self) -> Self {
        LaurentSeries {
            val: self.val + rhs.val,
            body: self.body * rhs.body,
        }
        .normalized()
    }
}

impl Scalar for LaurentSeries {
    fn zero() -> Self {
        LaurentSeries::from_power(PowerSeries::zero())
    }
    fn one() -> Self {
        LaurentSeries::from_power(PowerSeries::one())
    }
    fn from_i64(v: i64) -> Self {
        LaurentSeries::from_power(PowerSeries::from_i64(v))
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        LaurentSeries::from_power(PowerSeries::from_ratio(num, den))
    }
    fn is_zero(&self) -> bool {
        self.body.is_zero()
    }
    fn inv(&self) -> Option<Self> {
        if self.body.is_zero() {
            return None;
        }
        Some(LaurentSeries {
            val: -self.val,
            body: self.body.inv()?,
        })
    }
    fn magnitude(&self) -> f64 {
        self.body.magnitude()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn geometric_inverse() {
        let y = PowerSeries::var(6);
        let one_minus = PowerSeries::one() - y;
        let inv = one_minus.inv().unwrap();
        for k in 0..6 {
            assert_eq!(inv.coeff(k), rat(1, 1));
        }
        assert_eq!(inv.prec(), 6);
    }

    #[test]
    fn exact_constants_do_not_truncate() {
        let c = PowerSeries::from_ratio(3, 4);
        assert_eq!(c.inv().unwrap(), PowerSeries::from_ratio(4, 3));
        let p = PowerSeries::new(vec![rat(1, 1), rat(1, 1)], usize::MAX);
        assert!(p.inv().is_none());
    }

    #[test]
    fn rescale_substitutes() {
        let s = PowerSeries::new(vec![rat(1, 1), rat(1, 1), rat(1, 1)], 3);
        let r = s.rescale(&rat(2, 1));
        assert_eq!(r.coeff(2), rat(4, 1));
    }
    #[test]
    fn laurent_inverse_of_monomial_shift() {
        let y = LaurentSeries::var(8);
        let t = y.scale(&rat(2, 1));
        let ti = t.inv().unwrap();
        assert_eq!(ti.valuation(), Some(-1));
        assert_eq!(ti.coeff(-1), rat(1, 2));
        let one = t.clone() * ti;
        assert_eq!(one.coeff(0), rat(1, 1));
        let u = (LaurentSeries::one() - t.clone() * t).inv().unwrap();
        assert_eq!(u.coeff(4), rat(16, 1));
        assert_eq!(u.abs_prec(), Some(9));
    }

    #[test]
    fn laurent_rescale_and_precision() {
        let y = LaurentSeries::var(6);
        let yi = y.inv().unwrap();
        let s = (yi + y).rescale(&rat(3, 1));
        assert_eq!(s.coeff(-1), rat(1, 3));
        assert_eq!(s.coeff(1), rat(3, 1));
        assert!(s.abs_prec().unwrap() <= 6);
    }
}
