//! The Weil index `γ_F(ψ)` of `x ↦ ψ(x²)` and its normalized form
//! `γ_F(a,ψ) = γ_F(ψ_a)/γ_F(ψ)`, computed from stabilized truncated integrals.
//!
//! Values are embedded in `C` through `ζ_n = e^{2πi/n}`; under that embedding
//! the positive square root of `p` is `Σ_x ζ_p^{x²}` for `p ≡ 1 (4)` and
//! `−ζ_4 Σ_x ζ_p^{x²}` for `p ≡ 3 (4)`.

use num_rational::BigRational;

use crate::characters::AdditiveCharacter;
use crate::cyc::CycNumber;
use crate::error::{Error, Result};
use crate::padic::{hilbert, mul_mod, pow_u64, rational_pow, FieldConfig, ScaledPAdic, SquareClass};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeilIndex {
    pub value: CycNumber,
}

impl WeilIndex {
    /// `k` with `value = ζ_8^k`.
    pub fn eighth_root(&self) -> Option<u64> {
        self.value.root_exponent(8)
    }

    /// `±1` when the value is real.
    pub fn sign(&self) -> Option<i8> {
        match self.eighth_root()? {
            0 => Some(1),
            4 => Some(-1),
            _ => None,
        }
    }

    pub fn text(&self) -> String {
        match self.eighth_root() {
            Some(k) => format!("zeta_8^{k}"),
            None => self.value.to_string(),
        }
    }
}

/// The positive real square root of `p` as a cyclotomic number.
pub fn sqrt_p(p: u64) -> CycNumber {
    let mut counts = vec![0i64; p as usize];
    for x in 0..p {
        counts[mul_mod(x, x, p) as usize] += 1;
    }
    let g = CycNumber::from_counts(&counts, &BigRational::from_integer(1.into()));
    if p % 4 == 1 {
        g
    } else {
        -&(&CycNumber::root(1, 4) * &g)
    }
}

/// `q^{k/2}`.
pub fn q_half_power(p: u64, k: i64) -> CycNumber {
    let half = CycNumber::from_rational(&rational_pow(p, k.div_euclid(2)));
    if k.rem_euclid(2) == 0 {
        half
    } else {
        &half * &sqrt_p(p)
    }
}

/// `W(r) = ∫_{p^{-r}} ψ(x²) dx`.
pub fn truncated_integral(psi: &AdditiveCharacter, r: i64) -> Result<CycNumber> {
    let p = psi.p();
    let scaled = psi.twist(&ScaledPAdic::from_parts(p, -2 * r, 1, psi.shift.prec));
    let c = scaled.conductor();
    let vol = rational_pow(p, r);
    if c <= 0 {
        return Ok(CycNumber::from_rational(&vol));
    }
    let k = c as u32;
    let m = pow_u64(p, k);
    if m > 10_000_000 {
        return Err(Error::ResourceLimit("truncated integral".into()));
    }
    let mut counts = vec![0i64; m as usize];
    for y in 0..m {
        counts[scaled.int_exponent(mul_mod(y, y, m))? as usize] += 1;
    }
    Ok(CycNumber::from_counts(&counts, &(vol * rational_pow(p, -(k as i64)))))
}

/// `lim_r W(r)`, detected as the first `r` with `W(r) = W(r+1) = W(r+2)`.
pub fn stable_integral(psi: &AdditiveCharacter) -> Result<CycNumber> {
    let c = psi.conductor();
    let r_max = c.abs() + 4;
    let mut w = vec![truncated_integral(psi, 0)?, truncated_integral(psi, 1)?];
    for r in 0..=r_max {
        w.push(truncated_integral(psi, r + 2)?);
        let i = r as usize;
        if w[i] == w[i + 1] && w[i + 1] == w[i + 2] {
            return Ok(w[i].clone());
        }
    }
    Err(Error::NoStabilization(format!("truncated integral for conductor {c}")))
}

/// Unnormalized `γ_F(ψ)`: the stable integral against the self-dual measure of `ψ_2`.
pub fn gamma_unnormalized(psi: &AdditiveCharacter) -> Result<CycNumber> {
    let w = stable_integral(psi)?;
    Ok(&q_half_power(psi.p(), psi.conductor()) * &w)
}

/// `γ_F(a,ψ) = γ_F(ψ_a)/γ_F(ψ)`.
pub fn weil_index(a: &ScaledPAdic, psi: &AdditiveCharacter) -> Result<WeilIndex> {
    let num = gamma_unnormalized(&psi.twist(a))?;
    let den = gamma_unnormalized(psi)?;
    let value = num.div(&den)?;
    Ok(WeilIndex { value })
}

/// The unit sign `γ_F(a,ψ)` for a unit `a`, which is `±1`.
pub fn weil_index_unit_sign(a: &ScaledPAdic, psi: &AdditiveCharacter) -> Result<i8> {
    weil_index(a, psi)?.sign().ok_or_else(|| Error::Invalid("Weil index of a unit is not real".into()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityResult {
    pub name: String,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl IdentityResult {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks the four displayed Weil-index identities and the parity consequence for
/// `ψ` over all square classes, with extra representatives for square invariance.
pub fn weil_index_identities_check(cfg: &FieldConfig, psi: &AdditiveCharacter) -> Result<Vec<IdentityResult>> {
    let p = cfg.p;
    let reps: Vec<(SquareClass, ScaledPAdic)> = SquareClass::ALL.iter().map(|&a| (a, a.representative(cfg))).collect();
    let g: Vec<WeilIndex> = reps.iter().map(|(_, r)| weil_index(r, psi)).collect::<Result<_>>()?;
    let mut out = Vec::new();

    let squares: Vec<ScaledPAdic> = vec![cfg.int(2)?, cfg.varpi(), cfg.varpi().inv(), cfg.int(p as i64 + 1)?, cfg.xi().mul(&cfg.varpi())];
    let mut r = IdentityResult { name: "square invariance".into(), cases: 0, failures: vec![] };
    for (i, (a, ra)) in reps.iter().enumerate() {
        for c in &squares {
            r.cases += 1;
            if weil_index(&ra.mul(&c.mul(c)), psi)? != g[i] {
                r.failures.push(format!("a={a}, c={c}"));
            }
        }
    }
    out.push(r);

    let mut r = IdentityResult { name: "multiplicativity".into(), cases: 0, failures: vec![] };
    for (i, (a, ra)) in reps.iter().enumerate() {
        for (j, (b, rb)) in reps.iter().enumerate() {
            r.cases += 1;
            let lhs = weil_index(&ra.mul(rb), psi)?.value;
            let rhs = (&g[i].value * &g[j].value).scale(&BigRational::from_integer(hilbert(ra, rb).into()));
            if lhs != rhs {
                r.failures.push(format!("a={a}, b={b}"));
            }
        }
    }
    out.push(r);

    let mut r = IdentityResult { name: "twist".into(), cases: 0, failures: vec![] };
    for (i, (a, ra)) in reps.iter().enumerate() {
        for (c, rc) in &reps {
            r.cases += 1;
            let lhs = weil_index(ra, &psi.twist(rc))?.value;
            let rhs = g[i].value.scale(&BigRational::from_integer(hilbert(ra, rc).into()));
            if lhs != rhs {
                r.failures.push(format!("a={a}, c={c}"));
            }
        }
    }
    out.push(r);

    let mut r = IdentityResult { name: "minus one".into(), cases: 0, failures: vec![] };
    for (c, rc) in &reps {
        r.cases += 1;
        let twisted = psi.twist(rc);
        let lhs = weil_index(&cfg.int(-1)?, &twisted)?.value;
        let rhs = gamma_unnormalized(&twisted)?.pow(-2)?;
        if lhs != rhs {
            r.failures.push(format!("psi twisted by {c}"));
        }
    }
    out.push(r);

    let mut r = IdentityResult { name: "parity".into(), cases: 0, failures: vec![] };
    let units = [cfg.int(2)?, cfg.xi(), cfg.int(-1)?, cfg.int(p as i64 + 2)?];
    for (_, rc) in &reps {
        let cval = ScaledPAdic::from_parts(p, rc.val + (rc.val - psi.conductor()).rem_euclid(2), rc.unit, rc.prec);
        let gc = weil_index(&cval, psi)?;
        for u in &units {
            r.cases += 1;
            if weil_index(&u.mul(&cval), psi)? != gc {
                r.failures.push(format!("a={u}, c={cval}"));
            }
        }
    }
    out.push(r);
    Ok(out)
}
