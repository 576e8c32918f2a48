//! The metaplectic double cover of `SL_2(Q_p)`: Kubota cocycle, group law,
//! the compact subgroups `K^ε_m` and their splittings `s^ε`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::characters::AdditiveCharacter;
use crate::error::{Error, Result};
use crate::padic::{hilbert_rational, pow_u64, rational_ord, rational_pow, FieldConfig, ScaledPAdic};
use crate::weil_index::weil_index_unit_sign;

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// An element of `SL_2(Q)` viewed inside `SL_2(Q_p)`. Exact zeros stay exact.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SL2Elem {
    pub a: BigRational,
    pub b: BigRational,
    pub c: BigRational,
    pub d: BigRational,
}

impl SL2Elem {
    pub fn new(a: BigRational, b: BigRational, c: BigRational, d: BigRational) -> Result<Self> {
        let g = SL2Elem { a, b, c, d };
        if &g.a * &g.d - &g.b * &g.c != BigRational::one() {
            return Err(Error::Invalid("determinant is not 1".into()));
        }
        Ok(g)
    }

    pub fn from_ints(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        Self::new(q(a), q(b), q(c), q(d))
    }

    pub fn identity() -> Self {
        SL2Elem { a: q(1), b: q(0), c: q(0), d: q(1) }
    }

    pub fn minus_identity() -> Self {
        SL2Elem { a: q(-1), b: q(0), c: q(0), d: q(-1) }
    }

    pub fn t(a: &BigRational) -> Self {
        SL2Elem { a: a.clone(), b: q(0), c: q(0), d: a.recip() }
    }

    pub fn n(b: &BigRational) -> Self {
        SL2Elem { a: q(1), b: b.clone(), c: q(0), d: q(1) }
    }

    pub fn n_op(c: &BigRational) -> Self {
        SL2Elem { a: q(1), b: q(0), c: c.clone(), d: q(1) }
    }

    pub fn w() -> Self {
        SL2Elem { a: q(0), b: q(1), c: q(-1), d: q(0) }
    }

    /// `w t(ϖ^ε)`.
    pub fn w_eps(p: u64, eps: u8) -> Self {
        Self::w().mul(&Self::t(&rational_pow(p, eps as i64)))
    }

    pub fn mul(&self, o: &Self) -> Self {
        SL2Elem {
            a: &self.a * &o.a + &self.b * &o.c,
            b: &self.a * &o.b + &self.b * &o.d,
            c: &self.c * &o.a + &self.d * &o.c,
            d: &self.c * &o.b + &self.d * &o.d,
        }
    }

    pub fn inv(&self) -> Self {
        SL2Elem { a: self.d.clone(), b: -&self.b, c: -&self.c, d: self.a.clone() }
    }

    /// `β g β^{-1}` with `β = diag(1, ϖ)`.
    pub fn conj_beta(&self, p: u64) -> Self {
        let pi = q(p as i64);
        SL2Elem { a: self.a.clone(), b: &self.b / &pi, c: &self.c * &pi, d: self.d.clone() }
    }

    /// `β^{-1} g β`.
    pub fn conj_beta_inv(&self, p: u64) -> Self {
        let pi = q(p as i64);
        SL2Elem { a: self.a.clone(), b: &self.b * &pi, c: &self.c / &pi, d: self.d.clone() }
    }

    pub fn entries(&self) -> [&BigRational; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }
}

impl fmt::Display for SL2Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e: Vec<String> = self.entries().iter().map(|x| crate::cyc::fmt_rational(x)).collect();
        write!(f, "[[{}, {}], [{}, {}]]", e[0], e[1], e[2], e[3])
    }
}

/// `ord_p`, with `+∞` for zero represented as `i64::MAX`.
pub fn ord0(x: &BigRational, p: u64) -> i64 {
    if x.is_zero() {
        i64::MAX
    } else {
        rational_ord(x, p)
    }
}

/// `x(g)`: the lower-left entry if nonzero, else the lower-right one.
pub fn kubota_x(g: &SL2Elem) -> BigRational {
    if g.c.is_zero() {
        g.d.clone()
    } else {
        g.c.clone()
    }
}

/// The Kubota cocycle `c(g1, g2)`.
pub fn kubota_cocycle(p: u64, g1: &SL2Elem, g2: &SL2Elem) -> Result<i8> {
    let x12 = kubota_x(&g1.mul(g2));
    hilbert_rational(p, &(kubota_x(g1) / &x12), &(kubota_x(g2) / &x12))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MpElem {
    pub g: SL2Elem,
    pub eps: i8,
}

impl MpElem {
    pub fn new(g: SL2Elem, eps: i8) -> Self {
        MpElem { g, eps }
    }

    pub fn identity() -> Self {
        MpElem { g: SL2Elem::identity(), eps: 1 }
    }
}

pub fn mp_mul(p: u64, x: &MpElem, y: &MpElem) -> Result<MpElem> {
    let c = kubota_cocycle(p, &x.g, &y.g)?;
    Ok(MpElem { g: x.g.mul(&y.g), eps: x.eps * y.eps * c })
}

pub fn mp_inv(p: u64, x: &MpElem) -> Result<MpElem> {
    let gi = x.g.inv();
    let c = kubota_cocycle(p, &x.g, &gi)?;
    Ok(MpElem { g: gi, eps: x.eps * c })
}

/// `-1_ψ = (-1_2, γ_F(-1, ψ))`.
pub fn minus_one_psi(psi: &AdditiveCharacter) -> Result<MpElem> {
    let m1 = ScaledPAdic::from_int(psi.p(), -1, psi.shift.prec)?;
    Ok(MpElem { g: SL2Elem::minus_identity(), eps: weil_index_unit_sign(&m1, psi)? })
}

/// The compact open subgroup `K^ε_m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CompactSubgroupSpec {
    pub eps: u8,
    pub m: u32,
}

impl CompactSubgroupSpec {
    pub fn contains(&self, p: u64, g: &SL2Elem) -> bool {
        let e = self.eps as i64;
        ord0(&g.a, p) >= 0 && ord0(&g.d, p) >= 0 && ord0(&g.b, p) >= -e && ord0(&g.c, p) >= e + self.m as i64
    }
}

pub fn in_compact(p: u64, eps: u8, g: &SL2Elem) -> bool {
    CompactSubgroupSpec { eps, m: 0 }.contains(p, g)
}

thread_local! {
    static TORUS_SIGNS: RefCell<HashMap<(u64, u8, i8), i8>> = RefCell::new(HashMap::new());
}

/// `γ_F(a, ψ^ε)` for a unit `a`, which depends only on the Legendre symbol of `a`.
pub fn torus_sign(p: u64, eps: u8, a: &BigRational) -> Result<i8> {
    let cfg = FieldConfig::new(p, 10)?;
    let a = ScaledPAdic::from_rational(p, a, cfg.precision)?;
    if a.val != 0 {
        return Err(Error::NotAUnit);
    }
    let leg = crate::padic::legendre_u64(a.unit, p);
    if let Some(s) = TORUS_SIGNS.with(|t| t.borrow().get(&(p, eps, leg)).copied()) {
        return Ok(s);
    }
    let s = weil_index_unit_sign(&a, &AdditiveCharacter::psi_eps(&cfg, eps))?;
    TORUS_SIGNS.with(|t| t.borrow_mut().insert((p, eps, leg), s));
    Ok(s)
}

fn is_unit(x: &BigRational, p: u64) -> bool {
    !x.is_zero() && rational_ord(x, p) == 0
}

/// `s^ε(k)` for `d` a unit, via `k = n(b/d) t(1/d) n^op(c/d)`.
fn splitting_unit_d(p: u64, eps: u8, k: &SL2Elem) -> Result<i8> {
    let n = MpElem::new(SL2Elem::n(&(&k.b / &k.d)), 1);
    let t = MpElem::new(SL2Elem::t(&k.d.recip()), torus_sign(p, eps, &k.d.recip())?);
    let nop = MpElem::new(SL2Elem::n_op(&(&k.c / &k.d)), 1);
    let prod = mp_mul(p, &mp_mul(p, &n, &t)?, &nop)?;
    debug_assert_eq!(&prod.g, k);
    Ok(prod.eps)
}

/// `s^ε(k)` for `k ∈ K^ε`, by factoring `k` into the generators
/// `n(b)`, `t(a)`, `n^op(c)`, `w t(ϖ^ε)` and multiplying in the cover.
pub fn splitting_s(p: u64, eps: u8, k: &SL2Elem) -> Result<i8> {
    if !in_compact(p, eps, k) {
        return Err(Error::NotInCompact { eps, detail: k.to_string() });
    }
    if is_unit(&k.d, p) {
        return splitting_unit_d(p, eps, k);
    }
    let we = SL2Elem::w_eps(p, eps);
    let k1 = k.mul(&we.inv());
    if !is_unit(&k1.d, p) {
        return Err(Error::NotInCompact { eps, detail: k.to_string() });
    }
    let s1 = splitting_unit_d(p, eps, &k1)?;
    Ok(s1 * kubota_cocycle(p, &k1, &we)?)
}

/// The second factorization route through `w t(ϖ^ε)`, available when `c` and `d` are both units.
pub fn splitting_s_alt(p: u64, eps: u8, k: &SL2Elem) -> Result<Option<i8>> {
    if !in_compact(p, eps, k) {
        return Err(Error::NotInCompact { eps, detail: k.to_string() });
    }
    let we = SL2Elem::w_eps(p, eps);
    let k1 = k.mul(&we.inv());
    if !is_unit(&k1.d, p) || !is_unit(&k.d, p) {
        return Ok(None);
    }
    Ok(Some(splitting_unit_d(p, eps, &k1)? * kubota_cocycle(p, &k1, &we)?))
}

/// Closed candidate for `s^0`: `(c, d)_2` when `c ∈ p \ {0}`, else `1`.
pub fn splitting_s0_closed(p: u64, k: &SL2Elem) -> Result<i8> {
    if !k.c.is_zero() && rational_ord(&k.c, p) >= 1 {
        hilbert_rational(p, &k.c, &k.d)
    } else {
        Ok(1)
    }
}

fn rand_int(rng: &mut ChaCha8Rng, m: u64) -> BigRational {
    q(rng.gen_range(0..m) as i64)
}

fn rand_unit(rng: &mut ChaCha8Rng, p: u64, m: u64) -> BigRational {
    loop {
        let x = rng.gen_range(1..m);
        if x % p != 0 {
            let s = if rng.gen_bool(0.5) { 1 } else { -1 };
            return q(s * x as i64);
        }
    }
}

/// A random element of `K^0 = SL_2(Z_p)` lifted from `SL_2(Z/p^N)` with integer
/// or `p`-integral rational entries; exact zeros in `c` or `d` occur with positive probability.
pub fn random_k0(rng: &mut ChaCha8Rng, p: u64, n: u32) -> SL2Elem {
    let m = pow_u64(p, n);
    match rng.gen_range(0..8) {
        0 => {
            let d = rand_unit(rng, p, m);
            SL2Elem { a: d.recip(), b: rand_int(rng, m), c: q(0), d }
        }
        1 => {
            let c = rand_unit(rng, p, m);
            SL2Elem { a: rand_int(rng, m), b: -c.recip(), c, d: q(0) }
        }
        _ => loop {
            let c = rand_int(rng, m);
            let d = rand_int(rng, m);
            if is_unit(&d, p) {
                let b = rand_int(rng, m);
                let a = (q(1) + &b * &c) / &d;
                return SL2Elem { a, b, c, d };
            }
            if is_unit(&c, p) {
                let a = rand_int(rng, m);
                let b = (&a * &d - q(1)) / &c;
                return SL2Elem { a, b, c, d };
            }
        },
    }
}

/// A random element of `K^ε`.
pub fn random_k(rng: &mut ChaCha8Rng, p: u64, n: u32, eps: u8) -> SL2Elem {
    let g = random_k0(rng, p, n);
    if eps == 1 {
        g.conj_beta(p)
    } else {
        g
    }
}

/// A random element of `SL_2(Q)` with denominators of moderate `p`-adic size.
pub fn random_sl2(rng: &mut ChaCha8Rng, p: u64, n: u32) -> SL2Elem {
    let k1 = random_k0(rng, p, n);
    let k2 = random_k0(rng, p, n);
    let a = rational_pow(p, rng.gen_range(-2..=2)) * rand_unit(rng, p, pow_u64(p, 2));
    let b = rand_int(rng, pow_u64(p, n)) / q(p as i64);
    k1.mul(&SL2Elem::t(&a)).mul(&SL2Elem::n(&b)).mul(&k2)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampledCheck {
    pub name: String,
    pub seed: u64,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl SampledCheck {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Associativity of the group law on random triples.
pub fn cocycle_check(p: u64, samples: usize, seed: u64) -> Result<SampledCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    for _ in 0..samples {
        let g: Vec<MpElem> = (0..3).map(|_| MpElem::new(random_sl2(&mut rng, p, 3), if rng.gen_bool(0.5) { 1 } else { -1 })).collect();
        let l = mp_mul(p, &mp_mul(p, &g[0], &g[1])?, &g[2])?;
        let r = mp_mul(p, &g[0], &mp_mul(p, &g[1], &g[2])?)?;
        if l != r {
            failures.push(format!("{} {} {}", g[0].g, g[1].g, g[2].g));
        }
    }
    Ok(SampledCheck { name: format!("cocycle p={p}"), seed, cases: samples, failures })
}

/// Homomorphism property of `s^ε` on random pairs, path independence of the
/// factorization, the generator table, and for `ε = 0` the closed candidate.
pub fn splitting_check(p: u64, eps: u8, samples: usize, seed: u64) -> Result<SampledCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    let mut cases = 0;
    for _ in 0..samples {
        let k1 = random_k(&mut rng, p, 3, eps);
        let k2 = random_k(&mut rng, p, 3, eps);
        let k12 = k1.mul(&k2);
        let (s1, s2, s12) = (splitting_s(p, eps, &k1)?, splitting_s(p, eps, &k2)?, splitting_s(p, eps, &k12)?);
        cases += 1;
        if s1 * s2 * kubota_cocycle(p, &k1, &k2)? != s12 {
            failures.push(format!("homomorphism: {k1} {k2}"));
        }
        for k in [&k1, &k2, &k12] {
            if let Some(alt) = splitting_s_alt(p, eps, k)? {
                cases += 1;
                if alt != splitting_s(p, eps, k)? {
                    failures.push(format!("path dependence: {k}"));
                }
            }
            if eps == 0 {
                cases += 1;
                if splitting_s0_closed(p, k)? != splitting_s(p, eps, k)? {
                    failures.push(format!("closed candidate: {k}"));
                }
            }
        }
    }
    for f in generator_table_check(p, eps)? {
        failures.push(f);
    }
    cases += 4;
    Ok(SampledCheck { name: format!("splitting p={p} eps={eps}"), seed, cases, failures })
}

/// The displayed generator values of `s^ε`.
pub fn generator_table_check(p: u64, eps: u8) -> Result<Vec<String>> {
    let mut failures = Vec::new();
    let pe = rational_pow(p, -(eps as i64));
    for b in [q(1), q(p as i64 - 1) * &pe, pe.clone()] {
        if splitting_s(p, eps, &SL2Elem::n(&b))? != 1 {
            failures.push(format!("s(n({b}))"));
        }
    }
    for c in [q(p as i64), q(p as i64).pow(2), rational_pow(p, eps as i64) * q(2)] {
        if splitting_s(p, eps, &SL2Elem::n_op(&c))? != 1 {
            failures.push(format!("s(n^op({c}))"));
        }
    }
    let cfg = FieldConfig::new(p, 10)?;
    let psi = AdditiveCharacter::psi_eps(&cfg, eps);
    for u in 1..p as i64 {
        let a = q(u);
        let expect = weil_index_unit_sign(&ScaledPAdic::from_int(p, u, 10)?, &psi)?;
        if splitting_s(p, eps, &SL2Elem::t(&a))? != expect {
            failures.push(format!("s(t({u}))"));
        }
    }
    if splitting_s(p, eps, &SL2Elem::w_eps(p, eps))? != 1 {
        failures.push("s(w t(varpi^eps))".into());
    }
    Ok(failures)
}

/// Numerator and denominator reduction of a `p`-integral rational mod `p^k`.
pub fn reduce_mod(x: &BigRational, p: u64, k: u32) -> Result<u64> {
    let m = BigInt::from(pow_u64(p, k));
    let den = x.denom().mod_floor(&m);
    let den: u64 = den.try_into().map_err(|_| Error::Invalid("denominator".into()))?;
    let inv = crate::padic::inv_mod(den, pow_u64(p, k)).ok_or(Error::NotAUnit)?;
    let num: u64 = x.numer().mod_floor(&m).try_into().map_err(|_| Error::Invalid("numerator".into()))?;
    Ok(crate::padic::mul_mod(num, inv, pow_u64(p, k)))
}
