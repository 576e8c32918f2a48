//! Residue rings `Z/p^K`, scaled p-adic numbers, square classes, Legendre and
//! Hilbert symbols.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn pow_u64(base: u64, exp: u32) -> u64 {
    base.checked_pow(exp).expect("p-power overflow")
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let g = (a as i128).extended_gcd(&(m as i128));
    if g.gcd != 1 {
        return None;
    }
    Some(g.x.rem_euclid(m as i128) as u64)
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

pub fn prime_factors(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        let mut e = 0;
        while n.is_multiple_of(d) {
            n /= d;
            e += 1;
        }
        if e > 0 {
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// `φ(p^n)` for `n ≥ 1`, and 1 for `n = 0`.
pub fn phi_pn(p: u64, n: u32) -> u64 {
    if n == 0 {
        1
    } else {
        (p - 1) * pow_u64(p, n - 1)
    }
}

/// Smallest positive integer that generates `(Z/p^n)^×` for every `n ≥ 1`.
pub fn primitive_root(p: u64) -> u64 {
    let m = p * p;
    let order = p * (p - 1);
    let factors = prime_factors(order);
    (2..m).find(|&g| g % p != 0 && factors.iter().all(|&(l, _)| pow_mod(g, order / l, m) != 1)).expect("primitive root exists")
}

/// Smallest positive non-residue mod `p`.
pub fn smallest_nonresidue(p: u64) -> u64 {
    (2..p).find(|&u| pow_mod(u, (p - 1) / 2, p) == p - 1).expect("p odd prime")
}

/// Working configuration: the prime, the unit precision and the fixed non-square `ξ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldConfig {
    pub p: u64,
    pub precision: u32,
    pub xi: u64,
}

impl FieldConfig {
    pub fn new(p: u64, precision: u32) -> Result<Self> {
        if p < 3 || !is_prime(p) {
            return Err(Error::Invalid(format!("p = {p} must be an odd prime")));
        }
        if precision < 3 {
            return Err(Error::Invalid("precision must be at least 3".into()));
        }
        Ok(FieldConfig { p, precision, xi: smallest_nonresidue(p) })
    }

    pub fn q(&self) -> u64 {
        self.p
    }

    /// A cyclotomic order holding every value the configuration can produce.
    pub fn cyclotomic_order(&self) -> u64 {
        let pn = pow_u64(self.p, self.precision);
        (8 * pn * (self.p - 1)) / (8u64.gcd(&(self.p - 1)))
    }

    pub fn varpi(&self) -> ScaledPAdic {
        ScaledPAdic::from_parts(self.p, 1, 1, self.precision)
    }

    pub fn xi(&self) -> ScaledPAdic {
        ScaledPAdic::from_parts(self.p, 0, self.xi, self.precision)
    }

    pub fn int(&self, n: i64) -> Result<ScaledPAdic> {
        ScaledPAdic::from_int(self.p, n, self.precision)
    }
}

/// An integer modulo `p^level`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ResidueInt {
    pub p: u64,
    pub level: u32,
    pub value: u64,
}

impl ResidueInt {
    pub fn new(p: u64, level: u32, value: i64) -> Self {
        let m = pow_u64(p, level) as i64;
        ResidueInt { p, level, value: value.rem_euclid(m) as u64 }
    }

    pub fn modulus(&self) -> u64 {
        pow_u64(self.p, self.level)
    }

    pub fn is_unit(&self) -> bool {
        !self.value.is_multiple_of(self.p)
    }
}

/// Legendre symbol of a unit residue.
pub fn legendre(u: ResidueInt) -> Result<i8> {
    if !u.is_unit() {
        return Err(Error::NotAUnit);
    }
    Ok(legendre_u64(u.value, u.p))
}

pub(crate) fn legendre_u64(u: u64, p: u64) -> i8 {
    if pow_mod(u % p, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// A nonzero element `ϖ^val · unit` of `Q_p`, the unit known modulo `p^prec`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ScaledPAdic {
    pub p: u64,
    pub val: i64,
    pub unit: u64,
    pub prec: u32,
}

impl ScaledPAdic {
    pub fn from_parts(p: u64, val: i64, unit: u64, prec: u32) -> Self {
        let m = pow_u64(p, prec);
        let unit = unit % m;
        assert!(!unit.is_multiple_of(p), "unit part must be prime to p");
        ScaledPAdic { p, val, unit, prec }
    }

    pub fn one(p: u64, prec: u32) -> Self {
        Self::from_parts(p, 0, 1, prec)
    }

    pub fn from_int(p: u64, n: i64, prec: u32) -> Result<Self> {
        Self::from_rational(p, &BigRational::from_integer(BigInt::from(n)), prec)
    }

    pub fn from_rational(p: u64, x: &BigRational, prec: u32) -> Result<Self> {
        if x.is_zero() {
            return Err(Error::Zero);
        }
        let (vn, un) = split_p(x.numer(), p);
        let (vd, ud) = split_p(x.denom(), p);
        let m = pow_u64(p, prec);
        let mb = BigInt::from(m);
        let un = un.mod_floor(&mb).to_u64().unwrap();
        let ud = ud.mod_floor(&mb).to_u64().unwrap();
        let unit = mul_mod(un, inv_mod(ud, m).unwrap(), m);
        Ok(ScaledPAdic { p, val: vn - vd, unit, prec })
    }

    /// The exact rational `ϖ^val · unit` with `unit` read as an integer in `[0, p^prec)`.
    pub fn to_rational(&self) -> BigRational {
        let u = BigRational::from_integer(BigInt::from(self.unit));
        u * rational_pow(self.p, self.val)
    }

    pub fn ord(&self) -> i64 {
        self.val
    }

    pub fn modulus(&self) -> u64 {
        pow_u64(self.p, self.prec)
    }

    pub fn unit_residue(&self) -> ResidueInt {
        ResidueInt { p: self.p, level: self.prec, value: self.unit }
    }

    pub fn unit_mod(&self, k: u32) -> Result<u64> {
        if k > self.prec {
            return Err(Error::PrecisionExhausted);
        }
        Ok(self.unit % pow_u64(self.p, k))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let prec = self.prec.min(o.prec);
        let m = pow_u64(self.p, prec);
        ScaledPAdic { p: self.p, val: self.val + o.val, unit: mul_mod(self.unit % m, o.unit % m, m), prec }
    }

    pub fn inv(&self) -> Self {
        let m = self.modulus();
        ScaledPAdic { p: self.p, val: -self.val, unit: inv_mod(self.unit, m).unwrap(), prec: self.prec }
    }

    pub fn div(&self, o: &Self) -> Self {
        self.mul(&o.inv())
    }

    pub fn neg(&self) -> Self {
        let m = self.modulus();
        ScaledPAdic { unit: m - self.unit, ..*self }
    }

    pub fn pow(&self, e: i64) -> Self {
        let base = if e < 0 { self.inv() } else { *self };
        let m = self.modulus();
        ScaledPAdic { p: self.p, val: self.val * e, unit: pow_mod(base.unit, e.unsigned_abs(), m), prec: self.prec }
    }

    /// Sum with precision tracking; cancellation of every known digit is an error.
    pub fn add(&self, o: &Self) -> Result<Self> {
        let (lo, hi) = if self.val <= o.val { (self, o) } else { (o, self) };
        let shift = (hi.val - lo.val) as u32;
        let prec = lo.prec.min(hi.prec.saturating_add(shift));
        let m = pow_u64(self.p, prec);
        let hi_part = if shift >= prec { 0 } else { mul_mod(hi.unit % m, pow_u64(self.p, shift), m) };
        let s = (lo.unit % m + hi_part) % m;
        if s == 0 {
            return Err(Error::PrecisionExhausted);
        }
        let mut k = 0;
        let mut t = s;
        while t.is_multiple_of(self.p) {
            t /= self.p;
            k += 1;
        }
        Ok(ScaledPAdic { p: self.p, val: lo.val + k as i64, unit: t, prec: prec - k })
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }

    pub fn square_class(&self) -> SquareClass {
        let odd = self.val.rem_euclid(2) == 1;
        let xi = legendre_u64(self.unit, self.p) == -1;
        SquareClass::from_flags(xi, odd)
    }
}

impl fmt::Display for ScaledPAdic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}*{} (mod {}^{})", self.p, self.val, self.unit, self.p, self.prec)
    }
}

/// `p`-adic valuation and prime-to-`p` part of a nonzero integer.
pub fn split_p(n: &BigInt, p: u64) -> (i64, BigInt) {
    let pb = BigInt::from(p);
    let mut v = 0;
    let mut n = n.clone();
    while (&n % &pb).is_zero() {
        n /= &pb;
        v += 1;
    }
    (v, n)
}

/// `ord_p` of a nonzero rational.
pub fn rational_ord(x: &BigRational, p: u64) -> i64 {
    split_p(x.numer(), p).0 - split_p(x.denom(), p).0
}

pub fn rational_pow(p: u64, e: i64) -> BigRational {
    let b = BigInt::from(p).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        BigRational::from_integer(b)
    } else {
        BigRational::new(BigInt::one(), b)
    }
}

/// The four classes of `F^×/F^{×2}` for `p` odd.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SquareClass {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "xi")]
    Xi,
    #[serde(rename = "pi")]
    Pi,
    #[serde(rename = "xipi")]
    XiPi,
}

impl SquareClass {
    pub const ALL: [SquareClass; 4] = [SquareClass::One, SquareClass::Xi, SquareClass::Pi, SquareClass::XiPi];

    pub fn from_flags(xi: bool, odd: bool) -> Self {
        match (xi, odd) {
            (false, false) => SquareClass::One,
            (true, false) => SquareClass::Xi,
            (false, true) => SquareClass::Pi,
            (true, true) => SquareClass::XiPi,
        }
    }

    pub fn has_xi(self) -> bool {
        matches!(self, SquareClass::Xi | SquareClass::XiPi)
    }

    /// Valuation of the representative, 0 or 1.
    pub fn ord(self) -> i64 {
        matches!(self, SquareClass::Pi | SquareClass::XiPi) as i64
    }

    pub fn mul(self, o: SquareClass) -> SquareClass {
        SquareClass::from_flags(self.has_xi() ^ o.has_xi(), (self.ord() + o.ord()) % 2 == 1)
    }

    pub fn representative(self, cfg: &FieldConfig) -> ScaledPAdic {
        let u = if self.has_xi() { cfg.xi } else { 1 };
        ScaledPAdic::from_parts(cfg.p, self.ord(), u, cfg.precision)
    }

    pub fn name(self) -> &'static str {
        match self {
            SquareClass::One => "1",
            SquareClass::Xi => "xi",
            SquareClass::Pi => "pi",
            SquareClass::XiPi => "xipi",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "1" | "one" => Ok(SquareClass::One),
            "xi" => Ok(SquareClass::Xi),
            "pi" | "varpi" => Ok(SquareClass::Pi),
            "xipi" | "xivarpi" => Ok(SquareClass::XiPi),
            _ => Err(Error::Invalid(format!("unknown square class '{s}'"))),
        }
    }
}

impl fmt::Display for SquareClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn square_class(x: &ScaledPAdic) -> SquareClass {
    x.square_class()
}

/// Hilbert symbol `(a, b)_2` over `Q_p`, `p` odd.
pub fn hilbert(a: &ScaledPAdic, b: &ScaledPAdic) -> i8 {
    let p = a.p;
    let (al, be) = (a.val.rem_euclid(2), b.val.rem_euclid(2));
    let eps = if p % 4 == 3 { -1i8 } else { 1 };
    let mut r = 1i8;
    if al * be == 1 {
        r *= eps;
    }
    if be == 1 {
        r *= legendre_u64(a.unit, p);
    }
    if al == 1 {
        r *= legendre_u64(b.unit, p);
    }
    r
}

/// Hilbert symbol of two square classes.
pub fn hilbert_classes(cfg: &FieldConfig, a: SquareClass, b: SquareClass) -> i8 {
    hilbert(&a.representative(cfg), &b.representative(cfg))
}

/// Hilbert symbol of exact nonzero rationals.
pub fn hilbert_rational(p: u64, a: &BigRational, b: &BigRational) -> Result<i8> {
    let a = ScaledPAdic::from_rational(p, a, 1)?;
    let b = ScaledPAdic::from_rational(p, b, 1)?;
    Ok(hilbert(&a, &b))
}

/// Brute-force Hilbert symbol: searches for a primitive solution of
/// `z² ≡ a x² + b y² (mod p^K)`.
pub fn hilbert_oracle(a: &ScaledPAdic, b: &ScaledPAdic, k: u32) -> Result<i8> {
    if k < 3 {
        return Err(Error::Invalid("oracle precision must be at least 3".into()));
    }
    let p = a.p;
    let m = pow_u64(p, k);
    let reduce = |x: &ScaledPAdic| -> Result<u64> {
        let u = x.unit_mod(k)?;
        Ok(if x.val.rem_euclid(2) == 1 { mul_mod(u, p, m) } else { u })
    };
    let (ar, br) = (reduce(a)?, reduce(b)?);
    let mut any = vec![false; m as usize];
    let mut unit = vec![false; m as usize];
    for z in 0..m {
        let s = mul_mod(z, z, m) as usize;
        any[s] = true;
        if z % p != 0 {
            unit[s] = true;
        }
    }
    for x in 0..m {
        let ax = mul_mod(ar, mul_mod(x, x, m), m);
        for y in 0..m {
            let t = ((ax + mul_mod(br, mul_mod(y, y, m), m)) % m) as usize;
            let primitive_xy = x % p != 0 || y % p != 0;
            if (primitive_xy && any[t]) || (!primitive_xy && unit[t]) {
                return Ok(1);
            }
        }
    }
    Ok(-1)
}
