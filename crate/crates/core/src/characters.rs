//! Additive characters `ψ⁰_a`, characters `η` of `O^×`, characters `μ` of
//! `F^×` and the quadratic characters `χ_a`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::cyc::{fmt_rational, CycNumber};
use crate::error::{Error, Result};
use crate::padic::{
    hilbert_classes, inv_mod, mul_mod, phi_pn, pow_u64, primitive_root, rational_ord, FieldConfig, ScaledPAdic, SquareClass,
};

/// `ψ⁰_a(x) = ψ⁰(ax)` with `ψ⁰(x) = ζ_{p^k}^{p^k x mod p^k}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AdditiveCharacter {
    pub shift: ScaledPAdic,
}

impl AdditiveCharacter {
    pub fn base(cfg: &FieldConfig) -> Self {
        AdditiveCharacter { shift: ScaledPAdic::one(cfg.p, cfg.precision) }
    }

    /// `ψ^ε = ψ⁰_{ϖ^ε}`, of conductor `−ε`.
    pub fn psi_eps(cfg: &FieldConfig, eps: u8) -> Self {
        AdditiveCharacter { shift: ScaledPAdic::from_parts(cfg.p, eps as i64, 1, cfg.precision) }
    }

    pub fn with_shift(shift: ScaledPAdic) -> Self {
        AdditiveCharacter { shift }
    }

    pub fn p(&self) -> u64 {
        self.shift.p
    }

    pub fn conductor(&self) -> i64 {
        -self.shift.val
    }

    /// `ψ_b(x) = ψ(bx)`.
    pub fn twist(&self, b: &ScaledPAdic) -> Self {
        AdditiveCharacter { shift: self.shift.mul(b) }
    }

    /// Exponent of `ψ(x)` for an integer `x` as a multiple of `1/p^c`, `c = conductor`.
    pub fn int_exponent(&self, x: u64) -> Result<u64> {
        let c = self.conductor();
        if c <= 0 {
            return Ok(0);
        }
        let m = pow_u64(self.p(), c as u32);
        let u = self.shift.unit_mod(c as u32)?;
        Ok(mul_mod(u, x % m, m))
    }

    /// `ψ(x)` for an exact rational `x`.
    pub fn eval(&self, x: &BigRational) -> Result<CycNumber> {
        if x.is_zero() {
            return Ok(CycNumber::one());
        }
        let p = self.p();
        if self.shift.val + self.shift.prec as i64 + rational_ord(x, p) < 0 {
            return Err(Error::PrecisionExhausted);
        }
        let y = self.shift.to_rational() * x;
        let (t, m) = frac_mod_one(&y, p);
        Ok(CycNumber::root(t as i64, m))
    }

    pub fn eval_padic(&self, x: &ScaledPAdic) -> Result<CycNumber> {
        let y = self.shift.mul(x);
        if y.val >= 0 {
            return Ok(CycNumber::one());
        }
        let k = (-y.val) as u32;
        let t = y.unit_mod(k)?;
        Ok(CycNumber::root(t as i64, pow_u64(y.p, k)))
    }
}

/// `(t, p^k)` with `y ≡ t/p^k mod Z_p`.
pub fn frac_mod_one(y: &BigRational, p: u64) -> (u64, u64) {
    if y.is_zero() {
        return (0, 1);
    }
    let k = (-rational_ord(y, p)).max(0) as u32;
    if k == 0 {
        return (0, 1);
    }
    let m = pow_u64(p, k);
    let mb = BigInt::from(m);
    let scaled = y * BigRational::from_integer(mb.clone());
    let n = scaled.numer().mod_floor(&mb).to_u64().unwrap();
    let d = scaled.denom().mod_floor(&mb).to_u64().unwrap();
    (mul_mod(n, inv_mod(d, m).unwrap(), m), m)
}

struct DlogTable {
    modulus: u64,
    dlog: Vec<u32>,
}

thread_local! {
    static DLOGS: RefCell<HashMap<(u64, u32), Rc<DlogTable>>> = RefCell::new(HashMap::new());
}

fn dlog_table(p: u64, n: u32) -> Rc<DlogTable> {
    DLOGS.with(|c| {
        c.borrow_mut()
            .entry((p, n))
            .or_insert_with(|| {
                let m = pow_u64(p, n);
                let g = primitive_root(p) % m;
                let mut dlog = vec![u32::MAX; m as usize];
                let mut x = 1 % m;
                for k in 0..phi_pn(p, n) {
                    dlog[x as usize] = k as u32;
                    x = mul_mod(x, g, m);
                }
                Rc::new(DlogTable { modulus: m, dlog })
            })
            .clone()
    })
}

/// Discrete log of a unit modulo `p^n` to the base [`primitive_root`].
pub fn dlog(p: u64, n: u32, u: u64) -> Result<u64> {
    let t = dlog_table(p, n);
    match t.dlog[(u % t.modulus) as usize] {
        u32::MAX => Err(Error::NotAUnit),
        d => Ok(d as u64),
    }
}

/// A character of `O^× = Z_p^×`, stored reduced so that `level` is its conductor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UnitCharacter {
    pub p: u64,
    pub level: u32,
    pub exponent: u64,
}

impl UnitCharacter {
    pub fn trivial(p: u64) -> Self {
        UnitCharacter { p, level: 0, exponent: 0 }
    }

    pub fn new(p: u64, level: u32, exponent: i64) -> Self {
        let mut level = level;
        let mut e = exponent.rem_euclid(phi_pn(p, level) as i64) as u64;
        loop {
            if level == 0 {
                return UnitCharacter { p, level: 0, exponent: 0 };
            }
            if level == 1 {
                if e == 0 {
                    level = 0;
                    continue;
                }
                break;
            }
            if e.is_multiple_of(p) {
                e /= p;
                level -= 1;
            } else {
                break;
            }
        }
        UnitCharacter { p, level, exponent: e }
    }

    /// The quadratic character `u ↦ (u/p)`.
    pub fn legendre(p: u64) -> Self {
        Self::new(p, 1, ((p - 1) / 2) as i64)
    }

    pub fn conductor(&self) -> u32 {
        self.level
    }

    pub fn is_trivial(&self) -> bool {
        self.level == 0
    }

    pub fn order_of_values(&self) -> u64 {
        phi_pn(self.p, self.level)
    }

    fn exponent_at(&self, n: u32) -> u64 {
        if self.level == 0 {
            return 0;
        }
        self.exponent * pow_u64(self.p, n - self.level)
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.level.max(o.level);
        Self::new(self.p, n, (self.exponent_at(n) + o.exponent_at(n)) as i64)
    }

    pub fn inv(&self) -> Self {
        Self::new(self.p, self.level, -(self.exponent as i64))
    }

    pub fn pow(&self, k: i64) -> Self {
        Self::new(self.p, self.level, self.exponent as i64 * k)
    }

    /// `k` with `η(u) = ζ_{φ(p^level)}^k` for an integer unit `u`.
    pub fn value_exponent(&self, u: u64) -> Result<u64> {
        if u.is_multiple_of(self.p) {
            return Err(Error::NotAUnit);
        }
        if self.level == 0 {
            return Ok(0);
        }
        let d = dlog(self.p, self.level, u)?;
        Ok((self.exponent * d) % self.order_of_values())
    }

    pub fn eval(&self, u: u64) -> Result<CycNumber> {
        Ok(CycNumber::root(self.value_exponent(u)? as i64, self.order_of_values()))
    }

    pub fn eval_residue(&self, u: &crate::padic::ResidueInt) -> Result<CycNumber> {
        if u.level < self.level {
            return Err(Error::PrecisionExhausted);
        }
        self.eval(u.value)
    }

    pub fn eval_padic_unit(&self, u: &ScaledPAdic) -> Result<CycNumber> {
        self.eval(u.unit_mod(self.level.max(1))?)
    }

    /// `η(−1) ∈ {±1}`.
    pub fn sign(&self) -> i8 {
        if self.level == 0 {
            return 1;
        }
        let m = pow_u64(self.p, self.level);
        let k = self.value_exponent(m - 1).unwrap();
        if k == 0 {
            1
        } else {
            -1
        }
    }

    /// Every character of conductor at most `n`, in exponent order at level `n`.
    pub fn all_up_to(p: u64, n: u32) -> Vec<UnitCharacter> {
        (0..phi_pn(p, n)).map(|e| Self::new(p, n, e as i64)).collect()
    }
}

impl fmt::Display for UnitCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "eta[{}:{}]", self.level, self.exponent)
    }
}

/// A character `μ` of `F^×`: unit part and `μ(ϖ) = ζ^{root} · q^{−qexp}`,
/// the root stored as a fraction of a full turn.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultCharacter {
    pub unit: UnitCharacter,
    pub root: Ratio<i64>,
    pub qexp: Ratio<i64>,
}

impl MultCharacter {
    pub fn new(unit: UnitCharacter, root: Ratio<i64>, qexp: Ratio<i64>) -> Self {
        let r = root - Ratio::from_integer(root.floor().to_integer());
        MultCharacter { unit, root: r, qexp }
    }

    pub fn unramified(p: u64) -> Self {
        Self::new(UnitCharacter::trivial(p), Ratio::from_integer(0), Ratio::from_integer(0))
    }

    pub fn conductor(&self) -> u32 {
        self.unit.conductor()
    }

    pub fn is_unramified(&self) -> bool {
        self.unit.is_trivial()
    }

    pub fn sign(&self) -> i8 {
        self.unit.sign()
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(self.unit.mul(&o.unit), self.root + o.root, self.qexp + o.qexp)
    }

    pub fn inv(&self) -> Self {
        Self::new(self.unit.inv(), -self.root, -self.qexp)
    }

    /// `μ · |·|^s`.
    pub fn twist_abs(&self, s: Ratio<i64>) -> Self {
        Self::new(self.unit, self.root, self.qexp + s)
    }

    /// `μ² = |·|^{±1}`.
    pub fn is_exceptional(&self) -> bool {
        let sq = self.mul(self);
        sq.unit.is_trivial() && sq.root.is_integer() && sq.qexp.abs() == Ratio::from_integer(1)
    }

    pub fn varpi_root(&self) -> CycNumber {
        CycNumber::root(*self.root.numer(), *self.root.denom() as u64)
    }

    pub fn varpi_root_text(&self) -> String {
        format!("zeta_{}^{}", self.root.denom(), self.root.numer())
    }

    /// The quadratic character `χ_a(x) = (x, a)_2`.
    pub fn quadratic(cfg: &FieldConfig, a: SquareClass) -> Self {
        let unit = if a.ord() == 1 { UnitCharacter::legendre(cfg.p) } else { UnitCharacter::trivial(cfg.p) };
        let at_varpi = hilbert_classes(cfg, SquareClass::Pi, a);
        let root = if at_varpi == 1 { Ratio::from_integer(0) } else { Ratio::new(1, 2) };
        Self::new(unit, root, Ratio::from_integer(0))
    }

    /// Inverse of [`MultCharacter::quadratic`].
    pub fn square_class(&self, cfg: &FieldConfig) -> Option<SquareClass> {
        SquareClass::ALL.into_iter().find(|&a| &Self::quadratic(cfg, a) == self)
    }
}

impl fmt::Display for MultCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "mu[{}:{};{};{}]", self.unit.level, self.unit.exponent, self.varpi_root_text(), self.qexp)
    }
}

/// `χ_a|_{O^×}`.
pub fn quadratic_unit_part(p: u64, a: SquareClass) -> UnitCharacter {
    if a.ord() == 1 {
        UnitCharacter::legendre(p)
    } else {
        UnitCharacter::trivial(p)
    }
}

/// `χ_a(−1) = (−1, a)_2`.
pub fn quadratic_sign(p: u64, a: SquareClass) -> i8 {
    quadratic_unit_part(p, a).sign()
}

/// Flat JSON form shared by all three character kinds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacterJson {
    pub kind: String,
    pub p: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponent: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub varpi_root: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub varpi_qexp: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift_val: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift_unit: Option<i64>,
}

pub fn parse_ratio(s: &str) -> Result<Ratio<i64>> {
    let bad = || Error::Invalid(format!("bad rational '{s}'"));
    match s.split_once('/') {
        Some((a, b)) => {
            let d: i64 = b.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Ok(Ratio::new(a.trim().parse().map_err(|_| bad())?, d))
        }
        None => Ok(Ratio::from_integer(s.trim().parse().map_err(|_| bad())?)),
    }
}

/// Parses `zeta_n^k` (or a bare fraction of a turn `k/n`).
pub fn parse_root(s: &str) -> Result<Ratio<i64>> {
    if let Some(rest) = s.strip_prefix("zeta_") {
        let (n, k) = rest.split_once('^').ok_or_else(|| Error::Invalid(format!("bad root '{s}'")))?;
        let n: i64 = n.parse().map_err(|_| Error::Invalid(format!("bad root '{s}'")))?;
        let k: i64 = k.parse().map_err(|_| Error::Invalid(format!("bad root '{s}'")))?;
        if n <= 0 {
            return Err(Error::Invalid(format!("bad root '{s}'")));
        }
        Ok(Ratio::new(k, n))
    } else {
        parse_ratio(s)
    }
}

impl CharacterJson {
    fn check_p(p: u64) -> Result<()> {
        FieldConfig::new(p, 3).map(|_| ())
    }

    pub fn from_unit(e: &UnitCharacter) -> Self {
        CharacterJson {
            kind: "unit".into(),
            p: e.p,
            level: Some(e.level),
            exponent: Some(e.exponent as i64),
            varpi_root: None,
            varpi_qexp: None,
            shift_val: None,
            shift_unit: None,
        }
    }

    pub fn from_mult(m: &MultCharacter) -> Self {
        CharacterJson {
            kind: "mult".into(),
            varpi_root: Some(m.varpi_root_text()),
            varpi_qexp: Some(fmt_rational(&BigRational::new(BigInt::from(*m.qexp.numer()), BigInt::from(*m.qexp.denom())))),
            ..Self::from_unit(&m.unit)
        }
    }

    pub fn from_additive(a: &AdditiveCharacter) -> Self {
        CharacterJson {
            kind: "additive".into(),
            p: a.p(),
            level: None,
            exponent: None,
            varpi_root: None,
            varpi_qexp: None,
            shift_val: Some(a.shift.val),
            shift_unit: Some(a.shift.unit as i64),
        }
    }

    pub fn to_unit(&self) -> Result<UnitCharacter> {
        Self::check_p(self.p)?;
        if self.kind != "unit" && self.kind != "mult" {
            return Err(Error::Invalid(format!("expected a unit character, got '{}'", self.kind)));
        }
        let level = self.level.unwrap_or(0);
        if level > 6 {
            return Err(Error::Invalid("level too large".into()));
        }
        Ok(UnitCharacter::new(self.p, level, self.exponent.unwrap_or(0)))
    }

    pub fn to_mult(&self) -> Result<MultCharacter> {
        let unit = self.to_unit()?;
        let root = self.varpi_root.as_deref().map(parse_root).transpose()?.unwrap_or_else(|| Ratio::from_integer(0));
        let qexp = self.varpi_qexp.as_deref().map(parse_ratio).transpose()?.unwrap_or_else(|| Ratio::from_integer(0));
        Ok(MultCharacter::new(unit, root, qexp))
    }

    pub fn to_additive(&self, precision: u32) -> Result<AdditiveCharacter> {
        Self::check_p(self.p)?;
        if self.kind != "additive" {
            return Err(Error::Invalid(format!("expected an additive character, got '{}'", self.kind)));
        }
        let unit = self.shift_unit.unwrap_or(1);
        if unit.rem_euclid(self.p as i64) == 0 {
            return Err(Error::NotAUnit);
        }
        let m = pow_u64(self.p, precision) as i64;
        Ok(AdditiveCharacter::with_shift(ScaledPAdic::from_parts(
            self.p,
            self.shift_val.unwrap_or(0),
            unit.rem_euclid(m) as u64,
            precision,
        )))
    }
}
