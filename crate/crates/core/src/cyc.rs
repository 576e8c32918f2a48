//! Exact elements of cyclotomic fields `Q(ζ_n)`.
//!
//! An element stores its order `n`, integer coefficients on the powers
//! `ζ_n^0..ζ_n^{n-1}` and a common positive denominator. Coefficients are
//! kept in the canonical basis obtained by writing `Q(ζ_n)` as the tensor
//! product of `Q(ζ_{ℓ^e})` over the prime powers of `n` and reducing each
//! factor by `Φ_{ℓ^e}`, so `is_zero` and equality are exact.
//! Binary operations lift both operands to the lcm of their orders.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub, SubAssign};
use std::rc::Rc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::padic::{inv_mod, prime_factors};

struct Factor {
    ell: u64,
    pe: u64,
    phi: u64,
    step: u64,
}

struct Layout {
    n: u64,
    factors: Vec<Factor>,
}

impl Layout {
    fn build(n: u64) -> Layout {
        let factors = prime_factors(n)
            .into_iter()
            .map(|(ell, e)| {
                let pe = ell.pow(e);
                let rest = n / pe;
                let idem = if rest == 1 { 1 % n } else { (rest * inv_mod(rest % pe, pe).unwrap()) % n };
                let step = ((pe / ell) as u128 * idem as u128 % n as u128) as u64;
                Factor { ell, pe, phi: pe - pe / ell, step }
            })
            .collect();
        Layout { n, factors }
    }

    fn reduce<T>(&self, v: &mut [T])
    where
        T: Zero + Clone + for<'a> SubAssign<&'a T>,
    {
        let n = self.n;
        for f in &self.factors {
            for k in 0..n {
                if (k % f.pe) < f.phi || v[k as usize].is_zero() {
                    continue;
                }
                let c = std::mem::replace(&mut v[k as usize], T::zero());
                for t in 1..f.ell {
                    let off = ((t as u128 * f.step as u128) % n as u128) as u64;
                    let k2 = (k + n - off) % n;
                    v[k2 as usize] -= &c;
                }
            }
        }
    }
}

thread_local! {
    static LAYOUTS: RefCell<HashMap<u64, Rc<Layout>>> = RefCell::new(HashMap::new());
}

fn layout(n: u64) -> Rc<Layout> {
    LAYOUTS.with(|c| c.borrow_mut().entry(n).or_insert_with(|| Rc::new(Layout::build(n))).clone())
}

#[derive(Clone, Debug)]
pub struct CycNumber {
    order: u64,
    num: Vec<BigInt>,
    den: BigInt,
}

impl CycNumber {
    pub fn zero() -> Self {
        CycNumber { order: 1, num: vec![BigInt::zero()], den: BigInt::one() }
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    pub fn from_integer(n: i64) -> Self {
        CycNumber { order: 1, num: vec![BigInt::from(n)], den: BigInt::one() }
    }

    pub fn from_rational(r: &BigRational) -> Self {
        let mut x = CycNumber { order: 1, num: vec![r.numer().clone()], den: r.denom().clone() };
        x.normalize();
        x
    }

    /// `ζ_n^k`.
    pub fn root(k: i64, n: u64) -> Self {
        assert!(n >= 1);
        let mut num = vec![BigInt::zero(); n as usize];
        num[k.rem_euclid(n as i64) as usize] = BigInt::one();
        Self::from_raw(n, num, BigInt::one())
    }

    /// `scale · Σ_k counts[k] ζ_n^k` where `n = counts.len()`.
    pub fn from_counts(counts: &[i64], scale: &BigRational) -> Self {
        let n = counts.len() as u64;
        let mut v: Vec<i128> = counts.iter().map(|&c| c as i128).collect();
        layout(n).reduce(&mut v);
        let num = v.into_iter().map(|c| BigInt::from(c) * scale.numer()).collect();
        let mut x = CycNumber { order: n, num, den: scale.denom().clone() };
        x.normalize();
        x
    }

    fn from_raw(n: u64, mut num: Vec<BigInt>, den: BigInt) -> Self {
        layout(n).reduce(&mut num);
        let mut x = CycNumber { order: n, num, den };
        x.normalize();
        x
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    fn normalize(&mut self) {
        if self.den.is_negative() {
            self.den = -self.den.clone();
            for c in &mut self.num {
                *c = -c.clone();
            }
        }
        let mut g = self.den.clone();
        for c in &self.num {
            if !c.is_zero() {
                g = g.gcd(c);
                if g.is_one() {
                    break;
                }
            }
        }
        if !g.is_one() && !g.is_zero() {
            for c in &mut self.num {
                if !c.is_zero() {
                    *c /= &g;
                }
            }
            self.den /= &g;
        }
        if self.order > 1 && self.num.iter().skip(1).all(Zero::is_zero) {
            let c0 = std::mem::take(&mut self.num[0]);
            self.num = vec![c0];
            self.order = 1;
        }
        if self.num.iter().all(Zero::is_zero) {
            self.den = BigInt::one();
        }
    }

    fn lifted(&self, n: u64) -> Vec<BigInt> {
        if n == self.order {
            return self.num.clone();
        }
        let f = n / self.order;
        let mut v = vec![BigInt::zero(); n as usize];
        for (k, c) in self.num.iter().enumerate() {
            if !c.is_zero() {
                v[k * f as usize] = c.clone();
            }
        }
        layout(n).reduce(&mut v);
        v
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }

    /// The rational value, if this element lies in `Q`.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.order == 1 {
            Some(BigRational::new(self.num[0].clone(), self.den.clone()))
        } else {
            None
        }
    }

    /// `gcd(coefficients) / denominator`, positive; zero for zero.
    pub fn content(&self) -> BigRational {
        let g = self.num.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
        BigRational::new(g, self.den.clone())
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        let num = self.num.iter().map(|c| c * r.numer()).collect();
        let mut x = CycNumber { order: self.order, num, den: &self.den * r.denom() };
        x.normalize();
        x
    }

    /// The Galois automorphism `ζ ↦ ζ^k`, `k` prime to the order.
    pub fn galois(&self, k: i64) -> Self {
        let n = self.order;
        let k = k.rem_euclid(n as i64) as u64;
        assert!(k.gcd(&n) == 1 || n == 1, "galois exponent must be a unit");
        let mut v = vec![BigInt::zero(); n as usize];
        for (i, c) in self.num.iter().enumerate() {
            if !c.is_zero() {
                v[((i as u64 * k) % n) as usize] = c.clone();
            }
        }
        Self::from_raw(n, v, self.den.clone())
    }

    pub fn conj(&self) -> Self {
        self.galois(-1)
    }

    pub fn mag_sq(&self) -> Self {
        self * &self.conj()
    }

    /// `x · conj(x)` as a rational when it is one.
    pub fn mag_sq_rational(&self) -> Option<BigRational> {
        self.mag_sq().as_rational()
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(r) = self.as_rational() {
            return Ok(Self::from_rational(&r.recip()));
        }
        if let Some(r) = self.mag_sq_rational() {
            return Ok(self.conj().scale(&r.recip()));
        }
        // Product of the other Galois conjugates over the norm.
        let n = self.order as i64;
        let mut prod = CycNumber::one();
        for k in 2..n {
            if k.gcd(&n) == 1 {
                prod = &prod * &self.galois(k);
            }
        }
        let norm = (self * &prod).as_rational().expect("norm is rational");
        Ok(prod.scale(&norm.recip()))
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self * &o.inv()?)
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut r = CycNumber::one();
        for _ in 0..e.unsigned_abs() {
            r = &r * &base;
        }
        Ok(r)
    }

    /// `k` with `self = ζ_n^k`, searching `0 ≤ k < n`.
    pub fn root_exponent(&self, n: u64) -> Option<u64> {
        (0..n).find(|&k| (self - &CycNumber::root(k as i64, n)).is_zero())
    }

    fn nonzero_i64(&self) -> Option<(Vec<(usize, i64)>, u128)> {
        let mut out = Vec::new();
        let mut max = 0u128;
        for (k, c) in self.num.iter().enumerate() {
            if !c.is_zero() {
                let v = c.to_i64()?;
                max = max.max(v.unsigned_abs() as u128);
                out.push((k, v));
            }
        }
        Some((out, max))
    }

    fn mul_ref(&self, o: &Self) -> Self {
        if self.order == 1 {
            return o.scale(&BigRational::new(self.num[0].clone(), self.den.clone()));
        }
        if o.order == 1 {
            return self.scale(&BigRational::new(o.num[0].clone(), o.den.clone()));
        }
        let n = self.order.lcm(&o.order);
        let (a, b) = (self.lift_to(n), o.lift_to(n));
        let den = &self.den * &o.den;
        let lay = layout(n);
        if let (Some((xa, ma)), Some((xb, mb))) = (a.nonzero_i64(), b.nonzero_i64()) {
            let bound = ma
                .checked_mul(mb)
                .and_then(|v| v.checked_mul(xa.len().min(xb.len()) as u128 + 1))
                .and_then(|v| v.checked_mul(n as u128 + 1));
            if matches!(bound, Some(v) if v < (1u128 << 125)) {
                let mut acc = vec![0i128; n as usize];
                for &(i, ci) in &xa {
                    for &(j, cj) in &xb {
                        acc[(i + j) % n as usize] += ci as i128 * cj as i128;
                    }
                }
                lay.reduce(&mut acc);
                let mut x = CycNumber { order: n, num: acc.into_iter().map(BigInt::from).collect(), den };
                x.normalize();
                return x;
            }
        }
        let mut acc = vec![BigInt::zero(); n as usize];
        for (i, ci) in a.num.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            for (j, cj) in b.num.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                acc[(i + j) % n as usize] += ci * cj;
            }
        }
        lay.reduce(&mut acc);
        let mut x = CycNumber { order: n, num: acc, den };
        x.normalize();
        x
    }

    fn lift_to(&self, n: u64) -> CycNumber {
        CycNumber { order: n, num: self.lifted(n), den: self.den.clone() }
    }

    fn add_ref(&self, o: &Self, sign: i8) -> Self {
        let n = self.order.lcm(&o.order);
        let a = self.lifted(n);
        let b = o.lifted(n);
        let num = a
            .iter()
            .zip(b.iter())
            .map(|(x, y)| {
                let l = x * &o.den;
                let r = y * &self.den;
                if sign > 0 {
                    l + r
                } else {
                    l - r
                }
            })
            .collect();
        let mut x = CycNumber { order: n, num, den: &self.den * &o.den };
        x.normalize();
        x
    }
}

impl PartialEq for CycNumber {
    fn eq(&self, o: &Self) -> bool {
        (self - o).is_zero()
    }
}

impl Eq for CycNumber {}

impl<'a> Add<&'a CycNumber> for &'a CycNumber {
    type Output = CycNumber;
    fn add(self, o: &CycNumber) -> CycNumber {
        self.add_ref(o, 1)
    }
}

impl<'a> Sub<&'a CycNumber> for &'a CycNumber {
    type Output = CycNumber;
    fn sub(self, o: &CycNumber) -> CycNumber {
        self.add_ref(o, -1)
    }
}

impl<'a> Mul<&'a CycNumber> for &'a CycNumber {
    type Output = CycNumber;
    fn mul(self, o: &CycNumber) -> CycNumber {
        self.mul_ref(o)
    }
}

impl Neg for &CycNumber {
    type Output = CycNumber;
    fn neg(self) -> CycNumber {
        CycNumber { order: self.order, num: self.num.iter().map(|c| -c).collect(), den: self.den.clone() }
    }
}

impl Add for CycNumber {
    type Output = CycNumber;
    fn add(self, o: CycNumber) -> CycNumber {
        &self + &o
    }
}

impl Sub for CycNumber {
    type Output = CycNumber;
    fn sub(self, o: CycNumber) -> CycNumber {
        &self - &o
    }
}

impl Mul for CycNumber {
    type Output = CycNumber;
    fn mul(self, o: CycNumber) -> CycNumber {
        &self * &o
    }
}

impl Neg for CycNumber {
    type Output = CycNumber;
    fn neg(self) -> CycNumber {
        -&self
    }
}

/// Canonical text for a rational: `a` or `a/b`.
pub fn fmt_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for CycNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let coef = fmt_rational(&BigRational::new(c.clone(), self.den.clone()));
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            if k == 0 {
                f.write_str(&coef)?;
            } else if coef == "1" {
                write!(f, "zeta_{}^{}", self.order, k)?;
            } else {
                write!(f, "({})*zeta_{}^{}", coef, self.order, k)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn roots_multiply_to_one() {
        for n in [3u64, 8, 12, 40, 54] {
            for k in 0..n as i64 {
                let x = &CycNumber::root(k, n) * &CycNumber::root(n as i64 - k, n);
                assert_eq!(x.as_rational(), Some(rat(1, 1)));
            }
        }
    }

    #[test]
    fn full_root_sum_vanishes() {
        for n in [3u64, 4, 9, 12, 24, 45] {
            let mut s = CycNumber::zero();
            for k in 0..n as i64 {
                s = &s + &CycNumber::root(k, n);
            }
            assert!(s.is_zero(), "n={n}");
        }
    }

    #[test]
    fn mag_sq_of_gauss_difference() {
        let x = &CycNumber::root(1, 3) - &CycNumber::root(2, 3);
        assert_eq!(x.mag_sq_rational(), Some(rat(3, 1)));
    }

    #[test]
    fn conj_involution_and_inverse() {
        let x = &(&CycNumber::root(1, 20) + &CycNumber::root(7, 20).scale(&rat(2, 3))) + &CycNumber::from_integer(5);
        assert_eq!(x.conj().conj(), x);
        let y = x.inv().unwrap();
        assert_eq!((&x * &y).as_rational(), Some(rat(1, 1)));
        assert_eq!(CycNumber::zero().inv(), Err(Error::DivisionByZero));
    }

    #[test]
    fn mixed_orders_compare() {
        // ζ_4 = ζ_8^2, and -1 = ζ_6^3.
        assert_eq!(CycNumber::root(1, 4), CycNumber::root(2, 8));
        assert_eq!(CycNumber::root(3, 6), CycNumber::from_integer(-1));
        assert_eq!(CycNumber::root(1, 3), CycNumber::root(2, 6));
    }

    #[test]
    fn display_is_canonical() {
        assert_eq!(CycNumber::from_rational(&rat(-2, 6)).to_string(), "-1/3");
        assert_eq!(CycNumber::root(1, 8).to_string(), "zeta_8^1");
    }
}
