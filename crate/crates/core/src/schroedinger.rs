//! A truncated Schrödinger model of the even Weil representation `ω^+_{ψ',}` and
//! a linear-algebra computation of `dim (ω^+_{ψ,χ})^{K_m}_η`.
//!
//! An `η`-equivariant even function is determined by its values `φ(ϖ^i)`. The
//! unknowns are those values on `[⌈ν/2⌉, i_max]` plus, for a trivial twist, the
//! common value beyond `i_max`; invariance under `n^op(p^{m+ε})` becomes one
//! linear equation per valuation of `y` in the Fourier-transformed form.

use std::cell::RefCell;
use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::characters::{quadratic_unit_part, AdditiveCharacter, UnitCharacter};
use crate::cyc::CycNumber;
use crate::error::{Error, Result};
use crate::gauss::gauss_g_oracle;
use crate::padic::{mul_mod, pow_u64, rational_pow, FieldConfig, ScaledPAdic, SquareClass};
use crate::weil_index::weil_index_unit_sign;

/// `φ ∈ S^+(F)` with `φ(ϖ^i u) = τ(u) φ(ϖ^i)`, `τ = unit_twist`, support in `p^{i_min}`
/// and `φ(ϖ^i) = tail` for `i > i_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedEvenFunction {
    pub i_min: i64,
    pub i_max: i64,
    pub vals: Vec<CycNumber>,
    pub tail: CycNumber,
    pub unit_twist: UnitCharacter,
}

impl TruncatedEvenFunction {
    pub fn new(i_min: i64, vals: Vec<CycNumber>, tail: CycNumber, unit_twist: UnitCharacter) -> Result<Self> {
        if !unit_twist.is_trivial() && !tail.is_zero() {
            return Err(Error::Invalid("a nontrivial unit twist forces a zero tail".into()));
        }
        if unit_twist.sign() != 1 {
            return Err(Error::OddCharacter);
        }
        let i_max = i_min + vals.len() as i64 - 1;
        Ok(TruncatedEvenFunction { i_min, i_max, vals, tail, unit_twist })
    }

    /// `φ(ϖ^i u)` for an integer unit `u`.
    pub fn eval(&self, i: i64, u: u64) -> Result<CycNumber> {
        let base = if i < self.i_min {
            CycNumber::zero()
        } else if i > self.i_max {
            self.tail.clone()
        } else {
            self.vals[(i - self.i_min) as usize].clone()
        };
        Ok(&base * &self.unit_twist.eval(u)?)
    }

    fn map_values(&self, f: impl Fn(i64, &CycNumber) -> Result<CycNumber>) -> Result<Self> {
        let vals = (0..self.vals.len()).map(|k| f(self.i_min + k as i64, &self.vals[k])).collect::<Result<_>>()?;
        Ok(TruncatedEvenFunction { vals, tail: f(self.i_max + 1, &self.tail)?, ..self.clone() })
    }

    pub fn scale(&self, c: &CycNumber) -> Self {
        self.map_values(|_, v| Ok(v * c)).expect("scaling")
    }
}

/// Generators of the Borel part of `K^ε_m` acting in the truncated model.
#[derive(Debug, Clone)]
pub enum BorelGen {
    /// `(t(a), s^ε(t(a)))` for a unit `a`.
    Torus(ScaledPAdic),
    /// `n(b)`.
    Unipotent(BigRational),
}

/// The action of a Borel generator on `φ ∈ ω_{ψ'}` where `ψ = ψ^ε`.
pub fn weil_action_b(
    gen: &BorelGen,
    phi: &TruncatedEvenFunction,
    psi: &AdditiveCharacter,
    psi_prime: &AdditiveCharacter,
) -> Result<TruncatedEvenFunction> {
    match gen {
        BorelGen::Torus(a) => {
            if a.val != 0 {
                return Err(Error::OutsideModel);
            }
            // ε(t(a)) γ(a,ψ')^{-1} φ(ay) with ε(t(a)) = γ(a,ψ), all signs.
            let s = weil_index_unit_sign(a, psi)? * weil_index_unit_sign(a, psi_prime)?;
            let u = a.unit_mod(phi.unit_twist.conductor().max(1))?;
            let c = phi.unit_twist.eval(u)?.scale(&BigRational::from_integer(BigInt::from(s)));
            Ok(phi.scale(&c))
        }
        BorelGen::Unipotent(b) => {
            if b.is_zero() {
                return Ok(phi.clone());
            }
            let p = psi.p();
            let ob = crate::padic::rational_ord(b, p);
            phi.map_values(|i, v| {
                if v.is_zero() {
                    return Ok(v.clone());
                }
                // ψ'(b ϖ^{2i} u²) must not depend on the unit u.
                let k = (psi_prime.conductor() - ob - 2 * i).max(0) as u32;
                let first = psi_prime.eval(&(b * rational_pow(p, 2 * i)))?;
                let m = pow_u64(p, k.max(1));
                for u in (1..m).filter(|u| u % p != 0) {
                    let x = b * rational_pow(p, 2 * i) * BigRational::from_integer(BigInt::from(mul_mod(u, u, m)));
                    if psi_prime.eval(&x)? != first {
                        return Err(Error::OutsideModel);
                    }
                }
                Ok(v * &first)
            })
        }
    }
}

/// `ω_{ψ^ε,χ_a}` data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WeilRepConfig {
    pub p: u64,
    pub eps: u8,
    pub chi: SquareClass,
    pub eta: UnitCharacter,
}

impl WeilRepConfig {
    fn field(&self) -> Result<FieldConfig> {
        FieldConfig::new(self.p, 12)
    }

    /// `ψ' = ψ^ε_a`.
    pub fn psi_prime(&self) -> Result<AdditiveCharacter> {
        let cfg = self.field()?;
        Ok(AdditiveCharacter::psi_eps(&cfg, self.eps).twist(&self.chi.representative(&cfg)))
    }

    /// `χη^{-1}` restricted to `O^×`.
    pub fn unit_twist(&self) -> UnitCharacter {
        quadratic_unit_part(self.p, self.chi).mul(&self.eta.inv())
    }
}

thread_local! {
    static GCACHE: RefCell<HashMap<(UnitCharacter, i64, u64), CycNumber>> = RefCell::new(HashMap::new());
}

const GAUSS_BRUTE_LIMIT: u64 = 20_000;

/// `g(τ, ψ⁰_{ϖ^v u})`, brute force while `p^K` is small; beyond that `c(ψ) > max(1, c(τ))`
/// and the value vanishes.
fn gauss_coeff(tau: &UnitCharacter, v: i64, unit: u64) -> Result<CycNumber> {
    let p = tau.p;
    let c = -v;
    if c <= 0 {
        let cfg = FieldConfig::new(p, 3)?;
        return gauss_g_oracle(tau, &AdditiveCharacter::with_shift(ScaledPAdic::from_parts(p, v, 1, cfg.precision)));
    }
    let k = (c as u32).max(tau.conductor()).max(1);
    let key = (*tau, v, unit % pow_u64(p, c as u32));
    if let Some(x) = GCACHE.with(|t| t.borrow().get(&key).cloned()) {
        return Ok(x);
    }
    let x = if pow_u64(p, k) <= GAUSS_BRUTE_LIMIT {
        gauss_g_oracle(tau, &AdditiveCharacter::with_shift(ScaledPAdic::from_parts(p, v, unit, c as u32)))?
    } else if c as u32 > tau.conductor().max(1) {
        CycNumber::zero()
    } else {
        return Err(Error::ResourceLimit(format!("Gauss coefficient over Z/{p}^{k}")));
    };
    GCACHE.with(|t| t.borrow_mut().insert(key, x.clone()));
    Ok(x)
}

/// The linear system for a fixed truncation `i_max`.
struct System {
    i0: i64,
    i_max: i64,
    has_tail: bool,
    rows: Vec<Vec<CycNumber>>,
}

fn build_system(cfg: &WeilRepConfig, m: u32, i_max: i64) -> Result<System> {
    let p = cfg.p;
    let eps = cfg.eps as i64;
    let tau = cfg.unit_twist();
    let a_ord = cfg.chi.ord();
    let a_unit = if cfg.chi.has_xi() { crate::padic::smallest_nonresidue(p) } else { 1 };
    let cp = -eps - a_ord;
    let nu = cp + eps;
    let i0 = nu.div_euclid(2) + nu.rem_euclid(2);
    let has_tail = tau.is_trivial();
    let j_max = (cp - m as i64 - eps).div_euclid(2) + (cp - m as i64 - eps).rem_euclid(2) - 1;
    let j_min = cp - i_max - 4;
    let xi = crate::padic::smallest_nonresidue(p);
    let qr = |e: i64| rational_pow(p, e);
    let mut rows = Vec::new();
    for j in (j_min..=j_max).rev() {
        for yu in [1u64, xi] {
            // ψ'_{2yϖ^i} = ψ⁰ shifted by ϖ^{ε + ord a + j + i} · (2 a_u y_u).
            let unit = 2 * a_unit * yu;
            let val = |i: i64| eps + a_ord + j + i;
            let mut row = Vec::new();
            for i in i0..=i_max {
                row.push(gauss_coeff(&tau, val(i), unit)?.scale(&qr(-i)));
            }
            if has_tail {
                let mut t = CycNumber::zero();
                let mut i = i_max + 1;
                while -val(i) >= 1 {
                    t = t + gauss_coeff(&tau, val(i), unit)?.scale(&qr(-i));
                    i += 1;
                }
                let g = gauss_coeff(&tau, val(i), unit)?;
                let geo = qr(-i) * BigRational::new(BigInt::from(p), BigInt::from(p - 1));
                t = t + g.scale(&geo);
                row.push(t);
            }
            if row.iter().any(|x| !x.is_zero()) {
                rows.push(row);
            }
        }
    }
    Ok(System { i0, i_max, has_tail, rows })
}

fn ncols(s: &System) -> usize {
    (s.i_max - s.i0 + 1) as usize + s.has_tail as usize
}

fn row_content(row: &[CycNumber]) -> BigRational {
    let mut g = BigInt::zero();
    let mut l = BigInt::one();
    for x in row.iter().filter(|x| !x.is_zero()) {
        let c = x.content();
        g = g.gcd(c.numer());
        l = l.lcm(c.denom());
    }
    BigRational::new(g, l)
}

fn normalize_row(row: &mut [CycNumber]) {
    let c = row_content(row);
    if !c.is_zero() && !c.is_one() {
        let r = c.recip();
        for x in row.iter_mut() {
            *x = x.scale(&r);
        }
    }
}

/// Rank by fraction-free elimination.
pub fn rank(mut rows: Vec<Vec<CycNumber>>, ncols: usize) -> usize {
    let mut r = 0;
    for col in 0..ncols {
        let Some(piv) = (r..rows.len()).find(|&k| !rows[k][col].is_zero()) else { continue };
        rows.swap(r, piv);
        let pr = rows[r].clone();
        for k in r + 1..rows.len() {
            if rows[k][col].is_zero() {
                continue;
            }
            let f = rows[k][col].clone();
            for c in col..ncols {
                rows[k][c] = &(&pr[col] * &rows[k][c]) - &(&f * &pr[c]);
            }
            normalize_row(&mut rows[k]);
        }
        r += 1;
    }
    r
}

/// A basis of the right kernel, by reduced row echelon form over the field.
pub fn kernel_basis(mut rows: Vec<Vec<CycNumber>>, ncols: usize) -> Result<Vec<Vec<CycNumber>>> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(piv) = (r..rows.len()).find(|&k| !rows[k][col].is_zero()) else { continue };
        rows.swap(r, piv);
        let inv = rows[r][col].inv()?;
        for c in 0..ncols {
            rows[r][c] = &rows[r][c] * &inv;
        }
        let pr = rows[r].clone();
        for k in 0..rows.len() {
            if k != r && !rows[k][col].is_zero() {
                let f = rows[k][col].clone();
                for c in 0..ncols {
                    rows[k][c] = &rows[k][c] - &(&f * &pr[c]);
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![CycNumber::zero(); ncols];
        v[free] = CycNumber::one();
        for (k, &pc) in pivots.iter().enumerate() {
            v[pc] = -&rows[k][free];
        }
        basis.push(v);
    }
    Ok(basis)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvenWeilOracle {
    pub dim: u32,
    pub i_max: i64,
    pub basis: Vec<TruncatedEvenFunction>,
}

/// `dim (ω^+_{ψ^ε,χ})^{K^ε_m}_η` from the linear conditions; `i_max` is raised
/// until the dimension is unchanged over two further steps.
pub fn even_weil_fixed_dim_oracle(cfg: &WeilRepConfig, m: u32) -> Result<u32> {
    Ok(even_weil_oracle(cfg, m, false)?.dim)
}

pub fn even_weil_oracle(cfg: &WeilRepConfig, m: u32, with_basis: bool) -> Result<EvenWeilOracle> {
    let chi_sign = quadratic_unit_part(cfg.p, cfg.chi).sign();
    if cfg.eta.sign() != chi_sign || m < cfg.eta.conductor() {
        return Ok(EvenWeilOracle { dim: 0, i_max: 0, basis: vec![] });
    }
    let nu = -cfg.chi.ord();
    let start = nu.div_euclid(2) + nu.rem_euclid(2) + m as i64 / 2 + 1;
    let mut dims = Vec::new();
    for step in 0..12 {
        let s = build_system(cfg, m, start + step)?;
        let n = ncols(&s);
        dims.push(n - rank(s.rows, n));
        let k = dims.len();
        if k >= 3 && dims[k - 1] == dims[k - 2] && dims[k - 2] == dims[k - 3] {
            let i_max = start + step;
            let mut basis = Vec::new();
            if with_basis {
                let s = build_system(cfg, m, i_max)?;
                let n = ncols(&s);
                for v in kernel_basis(s.rows, n)? {
                    let (vals, tail) = if s.has_tail { (v[..n - 1].to_vec(), v[n - 1].clone()) } else { (v, CycNumber::zero()) };
                    basis.push(TruncatedEvenFunction::new(s.i0, vals, tail, cfg.unit_twist())?);
                }
            }
            return Ok(EvenWeilOracle { dim: dims[k - 1] as u32, i_max, basis });
        }
    }
    Err(Error::NoStabilization(format!("even Weil oracle {cfg:?} m={m}")))
}

/// Checks `ω(t(a))φ = η(a)^{-1}φ` and `ω(n(b))φ = φ` for sampled Borel generators of `K^ε_m`.
pub fn check_invariance(cfg: &WeilRepConfig, phi: &TruncatedEvenFunction) -> Result<bool> {
    let field = cfg.field()?;
    let psi = AdditiveCharacter::psi_eps(&field, cfg.eps);
    let psi_prime = cfg.psi_prime()?;
    let p = cfg.p;
    let mut units = vec![field.xi(), field.int(-1)?, field.int(2)?];
    units.push(field.int(p as i64 + 1)?);
    for a in &units {
        let lhs = weil_action_b(&BorelGen::Torus(*a), phi, &psi, &psi_prime)?;
        let e = cfg.eta.inv().eval(a.unit_mod(cfg.eta.conductor().max(1))?)?;
        if lhs != phi.scale(&e) {
            return Ok(false);
        }
    }
    let eps = cfg.eps as i64;
    for b in [rational_pow(p, -eps), rational_pow(p, -eps) * BigRational::from_integer(BigInt::from(2)), BigRational::one()] {
        if weil_action_b(&BorelGen::Unipotent(b), phi, &psi, &psi_prime)? != *phi {
            return Ok(false);
        }
    }
    Ok(true)
}
