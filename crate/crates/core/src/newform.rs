//! Closed dimension formulas for `π^{K^ε_m}_η`, conductors, newform profiles,
//! genericity and Whittaker nonvanishing data.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::Zero;
use serde::Serialize;

use crate::characters::{parse_ratio, parse_root, quadratic_unit_part, AdditiveCharacter, MultCharacter, UnitCharacter};
use crate::cosets::{hom_condition, CosetLabel};
use crate::error::{Error, Result};
use crate::gauss::gauss_h_oracle;
use crate::padic::{pow_u64, smallest_nonresidue, ScaledPAdic, SquareClass};

/// Data of a supercuspidal `cInd(σ s^δ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ScData {
    pub delta: u8,
    pub c_sigma: u32,
    pub defect: u8,
    pub central_sign: i8,
    pub is_odd_weil: bool,
}

/// An irreducible genuine representation. Classes are relative to `ψ^ε`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ReprDescriptor {
    PrincipalSeries { mu: MultCharacter },
    EvenWeil { p: u64, chi: SquareClass },
    OddWeil { p: u64, chi: SquareClass },
    Steinberg { p: u64, chi: SquareClass },
    Supercuspidal { p: u64, sc: ScData },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LevelQuery {
    pub eps: u8,
    pub eta: UnitCharacter,
    pub m: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum DimValue {
    Known(u64),
    Unknown,
}

impl DimValue {
    pub fn known(self) -> Option<u64> {
        match self {
            DimValue::Known(d) => Some(d),
            DimValue::Unknown => None,
        }
    }
}

impl fmt::Display for DimValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DimValue::Known(d) => write!(f, "{d}"),
            DimValue::Unknown => f.write_str("unknown"),
        }
    }
}

/// `c^ε_η(π)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Level {
    Finite(u32),
    Infinite,
    Unknown,
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Level::Finite(m) => write!(f, "{m}"),
            Level::Infinite => f.write_str("inf"),
            Level::Unknown => f.write_str("unknown"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    True,
    False,
    Unknown,
}

impl Verdict {
    fn of(b: bool) -> Self {
        if b {
            Verdict::True
        } else {
            Verdict::False
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::True => "true",
            Verdict::False => "false",
            Verdict::Unknown => "unknown",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NewformProfile {
    pub first_level: Level,
    pub dims_new: BTreeMap<u32, u64>,
    pub window: u32,
}

impl NewformProfile {
    fn from_run(m0: u32, dims: &[u64]) -> Self {
        let dims_new = dims.iter().enumerate().map(|(k, &d)| (m0 + k as u32, d)).collect();
        NewformProfile { first_level: Level::Finite(m0), dims_new, window: dims.len() as u32 - 1 }
    }

    pub fn total(&self) -> u64 {
        self.dims_new.values().sum()
    }

    pub fn at(&self, m: u32) -> u64 {
        self.dims_new.get(&m).copied().unwrap_or(0)
    }
}

fn c(x: &UnitCharacter) -> i64 {
    x.conductor() as i64
}

fn kd(s: i64) -> i64 {
    (s == 0) as i64
}

fn pos(r: i64) -> i64 {
    r.max(0)
}

fn floor2(x: i64) -> i64 {
    Integer::div_floor(&x, &2)
}

fn ceil2(x: i64) -> i64 {
    Integer::div_ceil(&x, &2)
}

/// The principal-series expression in the conductors `c(μ), c(η), c(ημ), c(ημ^{-1})`.
/// Defined for exceptional `μ` as well.
fn ps_expr(cm: i64, ce: i64, cp: i64, cn: i64, m: i64) -> i64 {
    if cm == 0 && ce == 0 && m == 0 {
        return 1;
    }
    if m < cm {
        0
    } else if m < 2 * cm {
        2 * (pos(m - cm - cp + 1) + pos(m - cm - cn + 1)) - kd(cp) - kd(cn)
    } else {
        2 * pos(m - cp - cn + 1) - kd(cp) - kd(cn)
    }
}

fn even_weil_expr(cec: i64, cchi: i64, m: i64) -> i64 {
    pos(floor2(m - 2 * cec - cchi) + 1)
}

fn steinberg_expr(ramified: bool, ce: i64, cec: i64, m: i64) -> i64 {
    if ramified {
        pos(ceil2(3 * (m - 2 * cec) - 1) + 2 - 2 * kd(cec))
    } else {
        pos(ceil2(3 * (m - 2 * ce)) + 1 - 2 * kd(ce))
    }
}

fn sc_expr(sc: &ScData, eps: u8, m: i64) -> i64 {
    let cs = sc.c_sigma as i64;
    if sc.defect == 1 {
        return pos(m - 2 * cs + 2);
    }
    if sc.is_odd_weil {
        if m < 2 {
            return 0;
        }
        return if (eps + sc.delta).is_multiple_of(2) { floor2(m - 1) } else { ceil2(m - 1) };
    }
    if m < 2 * cs {
        return 0;
    }
    if (cs + (eps + sc.delta) as i64) % 2 == 1 {
        2 * floor2(m - 2 * cs + 1)
    } else {
        2 * ceil2(m - 2 * cs + 1)
    }
}

fn nonneg(d: i64) -> Result<DimValue> {
    u64::try_from(d).map(DimValue::Known).map_err(|_| Error::Invalid(format!("negative dimension {d}")))
}

impl ReprDescriptor {
    /// Principal series `π_ψ(μ)`; rejects `μ² = |·|^{±1}`.
    pub fn principal_series(mu: MultCharacter) -> Result<Self> {
        if mu.is_exceptional() {
            return Err(Error::Reducible);
        }
        Ok(ReprDescriptor::PrincipalSeries { mu })
    }

    pub fn supercuspidal(p: u64, delta: u8, c_sigma: u32, defect: u8, central_sign: i8, is_odd_weil: bool) -> Result<Self> {
        if delta > 1 || defect > 1 || c_sigma == 0 || !(central_sign == 1 || central_sign == -1) {
            return Err(Error::Invalid("supercuspidal data out of range".into()));
        }
        if defect == 1 && delta != 1 {
            return Err(Error::Invalid("defect 1 forces delta = 1".into()));
        }
        if defect == 1 && c_sigma < 2 {
            return Err(Error::Invalid("defect 1 forces c(sigma) >= 2".into()));
        }
        if is_odd_weil && (c_sigma != 1 || defect != 0) {
            return Err(Error::Invalid("odd Weil representations have c(sigma) = 1 and defect 0".into()));
        }
        Ok(ReprDescriptor::Supercuspidal { p, sc: ScData { delta, c_sigma, defect, central_sign, is_odd_weil } })
    }

    pub fn p(&self) -> u64 {
        match self {
            ReprDescriptor::PrincipalSeries { mu } => mu.unit.p,
            ReprDescriptor::EvenWeil { p, .. }
            | ReprDescriptor::OddWeil { p, .. }
            | ReprDescriptor::Steinberg { p, .. }
            | ReprDescriptor::Supercuspidal { p, .. } => *p,
        }
    }

    /// `ω^-_{ψ^ε_a}` as `cInd(σ s^δ)` with `c(σ) = 1`, `δ ≡ 1 + c(ψ^ε_a)`.
    pub fn odd_weil_as_supercuspidal(p: u64, chi: SquareClass, eps: u8) -> Self {
        let delta = ((1 + eps as i64 + chi.ord()) % 2) as u8;
        let sign = -quadratic_unit_part(p, chi).sign();
        ReprDescriptor::supercuspidal(p, delta, 1, 0, sign, true).expect("valid odd Weil data")
    }

    /// Replaces `OddWeil` by its supercuspidal form; other variants unchanged.
    pub fn normalized(&self, eps: u8) -> Self {
        match self {
            ReprDescriptor::OddWeil { p, chi } => Self::odd_weil_as_supercuspidal(*p, *chi, eps),
            other => other.clone(),
        }
    }

    /// Parses `ps:L:E[:ROOT[:QEXP]]`, `even-weil:A`, `odd-weil:A`, `steinberg:A`,
    /// `sc:DELTA:C:DEFECT:SIGN[:oddweil]`.
    pub fn parse(s: &str, p: u64) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::Invalid(format!("bad representation '{s}'"));
        let int = |x: &str| x.parse::<i64>().map_err(|_| bad());
        match parts[0] {
            "ps" if (3..=5).contains(&parts.len()) => {
                let level = u32::try_from(int(parts[1])?).map_err(|_| bad())?;
                let unit = UnitCharacter::new(p, level, int(parts[2])?);
                let root = parts.get(3).map(|r| parse_root(r)).transpose()?.unwrap_or_else(Ratio::zero);
                let qexp = parts.get(4).map(|r| parse_ratio(r)).transpose()?.unwrap_or_else(Ratio::zero);
                Self::principal_series(MultCharacter::new(unit, root, qexp))
            }
            "even-weil" | "odd-weil" | "steinberg" if parts.len() == 2 => {
                let chi = SquareClass::parse(parts[1])?;
                Ok(match parts[0] {
                    "even-weil" => ReprDescriptor::EvenWeil { p, chi },
                    "odd-weil" => ReprDescriptor::OddWeil { p, chi },
                    _ => ReprDescriptor::Steinberg { p, chi },
                })
            }
            "sc" if parts.len() == 5 || (parts.len() == 6 && parts[5] == "oddweil") => {
                let small = |x: &str| u8::try_from(int(x)?).map_err(|_| bad());
                let sign = match parts[4] {
                    "+" | "+1" | "1" => 1,
                    "-" | "-1" => -1,
                    _ => return Err(bad()),
                };
                let cs = u32::try_from(int(parts[2])?).map_err(|_| bad())?;
                Self::supercuspidal(p, small(parts[1])?, cs, small(parts[3])?, sign, parts.len() == 6)
            }
            _ => Err(bad()),
        }
    }

    /// `z_{ψ^ε}(π)`.
    pub fn central_sign(&self, eps: u8) -> i8 {
        match self.normalized(eps) {
            ReprDescriptor::PrincipalSeries { mu } => mu.sign(),
            ReprDescriptor::EvenWeil { p, chi } | ReprDescriptor::Steinberg { p, chi } => quadratic_unit_part(p, chi).sign(),
            ReprDescriptor::Supercuspidal { sc, .. } => sc.central_sign,
            ReprDescriptor::OddWeil { .. } => unreachable!(),
        }
    }

    /// `#F_ψ(π)/F^{×2}`.
    pub fn generic_count(&self) -> u32 {
        match self {
            ReprDescriptor::PrincipalSeries { .. } => 4,
            ReprDescriptor::Steinberg { .. } => 3,
            ReprDescriptor::EvenWeil { .. } | ReprDescriptor::OddWeil { .. } => 1,
            ReprDescriptor::Supercuspidal { sc, .. } => {
                if sc.is_odd_weil {
                    1
                } else {
                    2
                }
            }
        }
    }

    pub fn is_supercuspidal(&self) -> bool {
        matches!(self, ReprDescriptor::OddWeil { .. } | ReprDescriptor::Supercuspidal { .. })
    }
}

impl fmt::Display for ReprDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReprDescriptor::PrincipalSeries { mu } => {
                write!(f, "ps:{}:{}:{}:{}", mu.unit.level, mu.unit.exponent, mu.varpi_root_text(), mu.qexp)
            }
            ReprDescriptor::EvenWeil { chi, .. } => write!(f, "even-weil:{chi}"),
            ReprDescriptor::OddWeil { chi, .. } => write!(f, "odd-weil:{chi}"),
            ReprDescriptor::Steinberg { chi, .. } => write!(f, "steinberg:{chi}"),
            ReprDescriptor::Supercuspidal { sc, .. } => {
                let sign = if sc.central_sign == 1 { "+" } else { "-" };
                write!(f, "sc:{}:{}:{}:{}", sc.delta, sc.c_sigma, sc.defect, sign)?;
                if sc.is_odd_weil {
                    f.write_str(":oddweil")?;
                }
                Ok(())
            }
        }
    }
}

fn check_p(pi: &ReprDescriptor, eta: &UnitCharacter) -> Result<()> {
    if pi.p() != eta.p {
        return Err(Error::Invalid(format!("prime mismatch: {} vs {}", pi.p(), eta.p)));
    }
    Ok(())
}

/// Whether the supercuspidal hypothesis `c(η) ≤ c(σ) − d(σ)` holds.
fn sc_hypothesis(sc: &ScData, eta: &UnitCharacter) -> bool {
    c(eta) <= sc.c_sigma as i64 - sc.defect as i64
}

/// `dim π_ψ(μ)^{K_m}_η` in closed form, admitting exceptional `μ`.
pub fn dim_fixed_ps_expr(mu: &MultCharacter, q: &LevelQuery) -> Result<u64> {
    if q.eta.sign() != mu.sign() || q.m < q.eta.conductor() {
        return Ok(0);
    }
    let u = mu.unit;
    let d = ps_expr(c(&u), c(&q.eta), c(&q.eta.mul(&u)), c(&q.eta.mul(&u.inv())), q.m as i64);
    Ok(nonneg(d)?.known().unwrap())
}

/// `dim π^{K^ε_m}_η`.
pub fn dim_fixed(pi: &ReprDescriptor, q: &LevelQuery) -> Result<DimValue> {
    check_p(pi, &q.eta)?;
    let pi = pi.normalized(q.eps);
    if pi.central_sign(q.eps) != q.eta.sign() {
        return Ok(DimValue::Known(0));
    }
    if q.m < q.eta.conductor() {
        return Ok(DimValue::Known(0));
    }
    let m = q.m as i64;
    let d = match &pi {
        ReprDescriptor::PrincipalSeries { mu } => {
            if mu.is_exceptional() {
                return Err(Error::Reducible);
            }
            dim_fixed_ps_expr(mu, q)? as i64
        }
        ReprDescriptor::EvenWeil { p, chi } => {
            let cu = quadratic_unit_part(*p, *chi);
            even_weil_expr(c(&q.eta.mul(&cu)), chi.ord(), m)
        }
        ReprDescriptor::Steinberg { p, chi } => {
            let cu = quadratic_unit_part(*p, *chi);
            steinberg_expr(chi.ord() == 1, c(&q.eta), c(&q.eta.mul(&cu)), m)
        }
        ReprDescriptor::Supercuspidal { sc, .. } => {
            let vanish = 2 * sc.c_sigma as i64 - 1 - sc.defect as i64;
            if m <= vanish {
                return Ok(DimValue::Known(0));
            }
            if !sc_hypothesis(sc, &q.eta) {
                return Ok(DimValue::Unknown);
            }
            sc_expr(sc, q.eps, m)
        }
        ReprDescriptor::OddWeil { .. } => unreachable!(),
    };
    nonneg(d)
}

/// `dim St^{K_m}_η` as `dim π_ψ(χ|·|^{1/2}) − dim ω^+_{ψ,χ}` through the exact sequence.
pub fn steinberg_by_exact_sequence(p: u64, chi: SquareClass, q: &LevelQuery) -> Result<i64> {
    let mu = MultCharacter::new(quadratic_unit_part(p, chi), Ratio::zero(), Ratio::new(-1, 2));
    let ps = dim_fixed_ps_expr(&mu, q)? as i64;
    let ew = dim_fixed(&ReprDescriptor::EvenWeil { p, chi }, q)?.known().unwrap() as i64;
    Ok(ps - ew)
}

fn scan_bound(pi: &ReprDescriptor, eta: &UnitCharacter) -> u32 {
    let base = match pi {
        ReprDescriptor::PrincipalSeries { mu } => mu.conductor(),
        ReprDescriptor::Supercuspidal { sc, .. } => sc.c_sigma,
        _ => 1,
    };
    2 * base.max(eta.conductor()) + 6
}

/// `c^ε_η(π)` as the first level with a nonzero fixed space.
pub fn conductor(pi: &ReprDescriptor, eps: u8, eta: &UnitCharacter) -> Result<Level> {
    check_p(pi, eta)?;
    let pi = pi.normalized(eps);
    if pi.central_sign(eps) != eta.sign() {
        return Ok(Level::Infinite);
    }
    let bound = scan_bound(&pi, eta);
    for m in 0..=bound {
        match dim_fixed(&pi, &LevelQuery { eps, eta: *eta, m })? {
            DimValue::Known(0) => {}
            DimValue::Known(_) => return Ok(Level::Finite(m)),
            DimValue::Unknown => return Ok(Level::Unknown),
        }
    }
    Err(Error::NoStabilization(format!("no nonzero level up to {bound}")))
}

/// `c^ε_η(π)` in closed form, where one is known.
pub fn conductor_closed(pi: &ReprDescriptor, eps: u8, eta: &UnitCharacter) -> Option<Level> {
    let pi = pi.normalized(eps);
    if pi.central_sign(eps) != eta.sign() {
        return Some(Level::Infinite);
    }
    match &pi {
        ReprDescriptor::PrincipalSeries { mu } => (*eta == mu.unit || *eta == mu.unit.inv()).then_some(Level::Finite(mu.conductor())),
        ReprDescriptor::EvenWeil { p, chi } => {
            let cu = quadratic_unit_part(*p, *chi);
            Some(Level::Finite(2 * eta.mul(&cu).conductor() + chi.ord() as u32))
        }
        ReprDescriptor::Steinberg { p, chi } => {
            let cu = quadratic_unit_part(*p, *chi);
            Some(Level::Finite(if *eta == cu { 1 } else { 2 * eta.mul(&cu).conductor() }))
        }
        ReprDescriptor::Supercuspidal { sc, .. } => {
            if !sc_hypothesis(sc, eta) {
                return Some(Level::Unknown);
            }
            Some(Level::Finite(sc_min(sc, eps)))
        }
        ReprDescriptor::OddWeil { .. } => unreachable!(),
    }
}

fn sc_min(sc: &ScData, eps: u8) -> u32 {
    let cs = sc.c_sigma;
    if sc.defect == 1 {
        2 * cs - 1
    } else if sc.is_odd_weil {
        if (eps + sc.delta) % 2 == 1 {
            2
        } else {
            3
        }
    } else if (cs + (eps + sc.delta) as u32).is_multiple_of(2) {
        2 * cs
    } else {
        2 * cs + 1
    }
}

/// `c^ε_min(π)` in closed form.
pub fn conductor_min(pi: &ReprDescriptor, eps: u8) -> u32 {
    match pi.normalized(eps) {
        ReprDescriptor::PrincipalSeries { mu } => mu.conductor(),
        ReprDescriptor::EvenWeil { chi, .. } => chi.ord() as u32,
        ReprDescriptor::Steinberg { .. } => 1,
        ReprDescriptor::Supercuspidal { sc, .. } => sc_min(&sc, eps),
        ReprDescriptor::OddWeil { .. } => unreachable!(),
    }
}

/// Minimum of `c^ε_η(π)` over every `η` of conductor at most `max_c` with a determined value.
pub fn conductor_min_scan(pi: &ReprDescriptor, eps: u8, max_c: u32) -> Result<Option<u32>> {
    let mut best: Option<u32> = None;
    for eta in UnitCharacter::all_up_to(pi.p(), max_c) {
        if let Level::Finite(m) = conductor(pi, eps, &eta)? {
            best = Some(best.map_or(m, |b| b.min(m)));
        }
    }
    Ok(best)
}

/// Dimensions of the newform spaces, from the case analysis of the corollaries.
pub fn newform_profile(pi: &ReprDescriptor, eps: u8, eta: &UnitCharacter) -> Result<NewformProfile> {
    check_p(pi, eta)?;
    let pi = pi.normalized(eps);
    let big_m = match conductor(&pi, eps, eta)? {
        Level::Finite(m) => m,
        Level::Infinite => return Err(Error::CentralSign),
        Level::Unknown => return Err(Error::Undetermined),
    };
    let dims: &[u64] = match &pi {
        ReprDescriptor::PrincipalSeries { mu } => {
            let (u, ui) = (mu.unit, mu.unit.inv());
            if mu.conductor() == 0 && eta.conductor() == 0 {
                &[1, 1, 1, 1]
            } else if (*eta == u && u != ui) || (*eta == ui && u != ui) {
                &[1, 2, 1]
            } else {
                &[2, 2]
            }
        }
        ReprDescriptor::EvenWeil { .. } => &[1],
        ReprDescriptor::Steinberg { p, chi } => {
            let cu = quadratic_unit_part(*p, *chi);
            match (chi.ord() == 0, eta.mul(&cu).conductor() == 0) {
                (true, true) => &[1, 1, 1],
                (true, false) | (false, true) => &[1, 2],
                (false, false) => &[2, 1],
            }
        }
        ReprDescriptor::Supercuspidal { sc, .. } => {
            if sc.defect == 1 {
                &[1, 1]
            } else if sc.is_odd_weil {
                &[1]
            } else {
                &[2]
            }
        }
        ReprDescriptor::OddWeil { .. } => unreachable!(),
    };
    Ok(NewformProfile::from_run(big_m, dims))
}

/// `Σ_m dim π^{K_m,new}_η = #F_ψ(π)/F^{×2}`.
pub fn rs_sum_check(pi: &ReprDescriptor, eps: u8, eta: &UnitCharacter) -> Result<bool> {
    Ok(newform_profile(pi, eps, eta)?.total() == pi.generic_count() as u64)
}

/// The oldform bounds `d(m) − d(m−1) − d(m−2) ≤ new(m) ≤ d(m) − d(m−1)`, with equality
/// `new(0) = d(0)`, `new(1) = d(1) − d(0)`.
pub fn oldform_bounds_check(pi: &ReprDescriptor, eps: u8, eta: &UnitCharacter, m_max: u32) -> Result<bool> {
    if m_max < 2 {
        return Err(Error::Invalid("m_max must be at least 2".into()));
    }
    let prof = newform_profile(pi, eps, eta)?;
    let mut d = Vec::new();
    for m in 0..=m_max {
        match dim_fixed(pi, &LevelQuery { eps, eta: *eta, m })? {
            DimValue::Known(x) => d.push(x as i64),
            DimValue::Unknown => return Err(Error::Undetermined),
        }
    }
    for m in 0..=m_max as usize {
        let new = prof.at(m as u32) as i64;
        let ok = match m {
            0 => new == d[0],
            1 => new == d[1] - d[0],
            _ => new <= d[m] - d[m - 1] && new >= d[m] - d[m - 1] - d[m - 2],
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `c(Ψ)` for `Ψ = ψ^ε_b`.
fn psi_conductor(eps: u8, class: SquareClass) -> i64 {
    -(eps as i64) - class.ord()
}

/// Whether `π` is `ψ^ε_b`-generic.
pub fn is_generic(pi: &ReprDescriptor, eps: u8, class: SquareClass) -> Verdict {
    match pi {
        ReprDescriptor::PrincipalSeries { .. } => Verdict::True,
        ReprDescriptor::EvenWeil { chi, .. } | ReprDescriptor::OddWeil { chi, .. } => Verdict::of(*chi == class),
        ReprDescriptor::Steinberg { chi, .. } => {
            if class == SquareClass::One {
                Verdict::of(*chi != SquareClass::One)
            } else {
                Verdict::Unknown
            }
        }
        ReprDescriptor::Supercuspidal { sc, .. } => {
            let parity_ok = (psi_conductor(eps, class) + sc.delta as i64).rem_euclid(2) == 0;
            if sc.defect == 1 {
                Verdict::Unknown
            } else if sc.is_odd_weil {
                if parity_ok {
                    Verdict::Unknown
                } else {
                    Verdict::False
                }
            } else {
                Verdict::of(parity_ok)
            }
        }
    }
}

/// The level from which the corollaries assert a nonzero `Ψ`-Whittaker functional on
/// `π^{K_m}_η`, if they do.
fn whittaker_stated_level(pi: &ReprDescriptor, eps: u8, eta: &UnitCharacter, class: SquareClass, big_m: u32) -> Option<u32> {
    let i = class.ord() as u32;
    match pi {
        ReprDescriptor::PrincipalSeries { mu } => {
            if mu.conductor() == 0 && eta.conductor() == 0 {
                Some(2 * i)
            } else {
                Some(big_m + i)
            }
        }
        ReprDescriptor::EvenWeil { .. } => Some(big_m),
        ReprDescriptor::Steinberg { .. } => Some(big_m + i),
        ReprDescriptor::Supercuspidal { sc, .. } => {
            if sc.defect == 1 {
                let c_psi = psi_conductor(eps, class);
                Some(if (c_psi + eps as i64).rem_euclid(2) == 0 { big_m } else { big_m + 1 })
            } else {
                Some(big_m)
            }
        }
        ReprDescriptor::OddWeil { .. } => unreachable!(),
    }
}

/// Whether the `ψ^ε_b`-Whittaker functional is nonzero on `π^{K_m}_η`.
/// Unknown genericity is taken as a hypothesis.
pub fn whittaker_nonvanishing(pi: &ReprDescriptor, eps: u8, eta: &UnitCharacter, class: SquareClass, m: u32) -> Result<Verdict> {
    check_p(pi, eta)?;
    if is_generic(pi, eps, class) == Verdict::False {
        return Err(Error::NotGeneric);
    }
    let pi = pi.normalized(eps);
    let big_m = match conductor(&pi, eps, eta)? {
        Level::Finite(x) => x,
        Level::Infinite => return Err(Error::CentralSign),
        Level::Unknown => return Ok(Verdict::Unknown),
    };
    if m < big_m {
        return Ok(Verdict::False);
    }
    Ok(match whittaker_stated_level(&pi, eps, eta, class, big_m) {
        Some(l) if m >= l => Verdict::True,
        _ => Verdict::Unknown,
    })
}

/// A vector of the principal-series model named by its support `B̃ x K_m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PsVector {
    W,
    One,
    /// `x = n^op(ξ^{[xi]} ϖ^{c(ημ^{-1})+i+ε})`.
    N {
        i: u32,
        xi: bool,
    },
}

impl PsVector {
    fn label(self, eta: &UnitCharacter, mu: &MultCharacter) -> CosetLabel {
        match self {
            PsVector::W => CosetLabel::W,
            PsVector::One => CosetLabel::One,
            PsVector::N { i, xi } => CosetLabel::NOp { delta: xi as u8, i: eta.mul(&mu.unit.inv()).conductor() + i },
        }
    }
}

/// The predicted Whittaker nonvanishing, and the value after exact evaluation where
/// nonvanishing reduces to a Gauss sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct VectorVerdict {
    pub stated: Verdict,
    pub resolved: Verdict,
}

fn vector_exists(mu: &MultCharacter, eta: &UnitCharacter, m: u32, v: PsVector) -> Result<bool> {
    let label = v.label(eta, mu);
    if m < eta.conductor() || eta.sign() != mu.sign() {
        return Ok(false);
    }
    match label {
        CosetLabel::One => Ok(m >= 1 && hom_condition(label, m, eta, mu)?),
        // at level 0 the cosets of 1 and w coincide
        CosetLabel::W if m == 0 => Ok(hom_condition(CosetLabel::One, 0, eta, mu)?),
        CosetLabel::W => Ok(hom_condition(label, m, eta, mu)?),
        CosetLabel::NOp { i, .. } => Ok(i >= 1 && i < m && hom_condition(label, m, eta, mu)?),
    }
}

/// `h(ημ^{-1}, ψ^ε_{−ξ^k ϖ^{−c(ημ^{-1})−ε}})` is nonzero.
pub fn ps_h_nonzero(mu: &MultCharacter, eta: &UnitCharacter, xi: bool) -> Result<bool> {
    let p = eta.p;
    let chi = eta.mul(&mu.unit.inv());
    let cc = chi.conductor();
    let prec = cc + 2;
    let modulus = pow_u64(p, prec);
    let u = if xi { smallest_nonresidue(p) } else { 1 };
    // ψ^ε_{x} = ψ⁰_{ϖ^ε x}, so the ε cancels.
    let shift = ScaledPAdic::from_parts(p, -(cc as i64), modulus - u, prec);
    Ok(!gauss_h_oracle(&chi, &AdditiveCharacter::with_shift(shift))?.is_zero())
}

fn sign_root(mu: &MultCharacter, xi_psi: bool) -> bool {
    // 1 + s q^{-1/2} μ(ϖ) = 0 with s = χ_ξ(ϖ) = −1 for Ψ = ψ_ξ.
    let half = Ratio::new(1, 2);
    let target = if xi_psi { Ratio::zero() } else { half };
    mu.qexp == -half && mu.root == target
}

/// Nonvanishing of `λ_Ψ` at the vector `v ∈ π_ψ(μ)^{K_m}_η`, `Ψ = ψ^ε_b`.
pub fn ps_vector_whittaker(
    mu: &MultCharacter,
    eps: u8,
    eta: &UnitCharacter,
    class: SquareClass,
    m: u32,
    v: PsVector,
) -> Result<VectorVerdict> {
    let _ = eps;
    if eta.sign() != mu.sign() {
        return Err(Error::CentralSign);
    }
    if !vector_exists(mu, eta, m, v)? {
        return Err(Error::Invalid(format!("no vector {v:?} at level {m}")));
    }
    let i_psi = class.ord() as u32;
    let unknown = VectorVerdict { stated: Verdict::Unknown, resolved: Verdict::Unknown };
    Ok(match v {
        PsVector::W if i_psi == 0 => {
            if m >= 1 {
                VectorVerdict { stated: Verdict::True, resolved: Verdict::True }
            } else {
                let r = Verdict::of(!sign_root(mu, class.has_xi()));
                VectorVerdict { stated: if mu.is_exceptional() { Verdict::Unknown } else { Verdict::True }, resolved: r }
            }
        }
        PsVector::One if i_psi == 0 => {
            let u = mu.unit;
            if *eta == u && u.mul(&u).is_trivial() && m >= 1 {
                VectorVerdict { stated: Verdict::True, resolved: Verdict::True }
            } else {
                unknown
            }
        }
        PsVector::N { i, xi } if i == i_psi => {
            let r = ps_h_nonzero(mu, eta, xi ^ class.has_xi())?;
            VectorVerdict { stated: Verdict::Unknown, resolved: Verdict::of(r) }
        }
        _ => unknown,
    })
}

/// The pair `f_{i,2}, f_{i,ξ}`: at least one has nonzero `λ_Ψ`.
pub fn ps_pair_whittaker(mu: &MultCharacter, eps: u8, eta: &UnitCharacter, class: SquareClass, m: u32, i: u32) -> Result<VectorVerdict> {
    if class.ord() as u32 != i {
        return Ok(VectorVerdict { stated: Verdict::Unknown, resolved: Verdict::Unknown });
    }
    let a = ps_vector_whittaker(mu, eps, eta, class, m, PsVector::N { i, xi: false })?;
    let b = ps_vector_whittaker(mu, eps, eta, class, m, PsVector::N { i, xi: true })?;
    let any = a.resolved == Verdict::True || b.resolved == Verdict::True;
    Ok(VectorVerdict { stated: Verdict::True, resolved: Verdict::of(any) })
}

/// Every vector of the coset basis of `π_ψ(μ)^{K_m}_η`.
pub fn ps_basis_vectors(mu: &MultCharacter, eps: u8, eta: &UnitCharacter, m: u32) -> Result<Vec<PsVector>> {
    let _ = eps;
    let mut out = Vec::new();
    let heads: &[PsVector] = if m == 0 { &[PsVector::W] } else { &[PsVector::W, PsVector::One] };
    for &v in heads {
        if vector_exists(mu, eta, m, v)? {
            out.push(v);
        }
    }
    let cn = eta.mul(&mu.unit.inv()).conductor();
    for j in 1..m {
        if j < cn {
            continue;
        }
        for xi in [false, true] {
            let v = PsVector::N { i: j - cn, xi };
            if vector_exists(mu, eta, m, v)? {
                out.push(v);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(eps: u8, eta: UnitCharacter, m: u32) -> LevelQuery {
        LevelQuery { eps, eta, m }
    }

    fn dims(pi: &ReprDescriptor, eps: u8, eta: UnitCharacter, n: u32) -> Vec<u64> {
        (0..=n).map(|m| dim_fixed(pi, &q(eps, eta, m)).unwrap().known().unwrap()).collect()
    }

    #[test]
    fn ps_unramified() {
        let pi = ReprDescriptor::principal_series(MultCharacter::unramified(3)).unwrap();
        assert_eq!(dims(&pi, 0, UnitCharacter::trivial(3), 3), vec![1, 2, 4, 6]);
        let prof = newform_profile(&pi, 0, &UnitCharacter::trivial(3)).unwrap();
        assert_eq!(prof.dims_new.values().copied().collect::<Vec<_>>(), vec![1, 1, 1, 1]);
        assert_eq!(prof.window, 3);
    }

    #[test]
    fn even_weil_trivial() {
        let pi = ReprDescriptor::EvenWeil { p: 5, chi: SquareClass::One };
        assert_eq!(dim_fixed(&pi, &q(0, UnitCharacter::trivial(5), 5)).unwrap(), DimValue::Known(3));
    }

    #[test]
    fn sc_examples() {
        let pi = ReprDescriptor::supercuspidal(3, 0, 1, 0, 1, false).unwrap();
        let e = UnitCharacter::trivial(3);
        assert_eq!(dim_fixed(&pi, &q(0, e, 2)).unwrap(), DimValue::Known(0));
        assert_eq!(dim_fixed(&pi, &q(0, e, 3)).unwrap(), DimValue::Known(2));
        let big = UnitCharacter::new(3, 2, 1);
        let pi1 = ReprDescriptor::supercuspidal(3, 1, 2, 1, big.sign(), false).unwrap();
        assert_eq!(dim_fixed(&pi1, &q(0, big, 2)).unwrap(), DimValue::Known(0));
        assert_eq!(dim_fixed(&pi1, &q(0, big, 3)).unwrap(), DimValue::Unknown);
    }

    #[test]
    fn steinberg_examples() {
        let pi = ReprDescriptor::Steinberg { p: 3, chi: SquareClass::One };
        assert_eq!(dims(&pi, 0, UnitCharacter::trivial(3), 2), vec![0, 1, 2]);
        assert_eq!(pi.central_sign(0), 1);
    }

    #[test]
    fn descriptor_validation() {
        let bad = MultCharacter::new(UnitCharacter::trivial(3), Ratio::zero(), Ratio::new(1, 2));
        assert_eq!(ReprDescriptor::principal_series(bad), Err(Error::Reducible));
        assert!(ReprDescriptor::supercuspidal(3, 0, 2, 1, 1, false).is_err());
        assert!(ReprDescriptor::supercuspidal(3, 0, 2, 0, 1, true).is_err());
    }

    #[test]
    fn odd_weil_alias() {
        for eps in 0..2u8 {
            for chi in SquareClass::ALL {
                let a = ReprDescriptor::OddWeil { p: 5, chi };
                let b = ReprDescriptor::odd_weil_as_supercuspidal(5, chi, eps);
                assert_eq!(a.central_sign(eps), b.central_sign(eps));
                for eta in UnitCharacter::all_up_to(5, 1) {
                    for m in 0..6 {
                        assert_eq!(dim_fixed(&a, &q(eps, eta, m)), dim_fixed(&b, &q(eps, eta, m)));
                    }
                }
            }
        }
        // ω^-_ψ has `c^ε_η = 2`
        let pi = ReprDescriptor::OddWeil { p: 3, chi: SquareClass::One };
        let eta = UnitCharacter::legendre(3);
        assert_eq!(conductor(&pi, 0, &eta).unwrap(), Level::Finite(2));
        assert_eq!(conductor(&pi, 1, &eta).unwrap(), Level::Finite(2));
    }

    #[test]
    fn parse_roundtrip() {
        for s in ["ps:1:1:zeta_4^1:1/3", "even-weil:xi", "odd-weil:pi", "steinberg:xipi", "sc:1:2:1:-", "sc:0:1:0:+:oddweil"] {
            let d = ReprDescriptor::parse(s, 5).unwrap();
            assert_eq!(ReprDescriptor::parse(&d.to_string(), 5).unwrap(), d);
        }
        assert!(ReprDescriptor::parse("ps:0:0:0:1/2", 5).is_err());
        assert!(ReprDescriptor::parse("weil:1", 5).is_err());
    }
}
