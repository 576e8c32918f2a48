//! The Gauss sums `g(χ,ψ) = ∫_{O^×} χ(x)ψ(x)dx` and `h(χ,ψ) = ∫_{O^×} χ(x)ψ(x²)dx`:
//! brute-force evaluation over `(Z/p^K)^×` and the closed forms.

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::characters::{AdditiveCharacter, UnitCharacter};
use crate::cyc::CycNumber;
use crate::error::{Error, Result};
use crate::padic::{mul_mod, phi_pn, pow_u64, rational_pow, ScaledPAdic};

#[derive(Debug, Clone, PartialEq)]
pub enum GaussValue {
    ExactValue(CycNumber),
    ZeroExact,
    MagSqOnly(BigRational),
}

impl GaussValue {
    pub fn mag_sq(&self) -> BigRational {
        match self {
            GaussValue::ExactValue(v) => v.mag_sq_rational().expect("rational magnitude"),
            GaussValue::ZeroExact => BigRational::zero(),
            GaussValue::MagSqOnly(r) => r.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            GaussValue::ExactValue(v) => v.is_zero(),
            GaussValue::ZeroExact => true,
            GaussValue::MagSqOnly(r) => r.is_zero(),
        }
    }
}

#[derive(Clone, Copy)]
enum Variant {
    Linear,
    Square,
}

fn oracle(chi: &UnitCharacter, psi: &AdditiveCharacter, variant: Variant, level: Option<u32>) -> Result<CycNumber> {
    let p = chi.p;
    let cpsi = psi.conductor().max(0) as u32;
    let base = 1.max(chi.conductor()).max(cpsi);
    let k = level.unwrap_or(base);
    if k < base {
        return Err(Error::Invalid("level below conductors".into()));
    }
    if cpsi > psi.shift.prec {
        return Err(Error::PrecisionExhausted);
    }
    let m = pow_u64(p, k);
    if m > 50_000_000 {
        return Err(Error::ResourceLimit(format!("Gauss sum over Z/{p}^{k}")));
    }
    let phi1 = phi_pn(p, chi.conductor());
    let m2 = pow_u64(p, cpsi);
    let n = phi1.lcm(&m2);
    let (f1, f2) = (n / phi1, n / m2);
    let mut counts = vec![0i64; n as usize];
    for x in 0..m {
        if x % p == 0 {
            continue;
        }
        let e1 = chi.value_exponent(x % pow_u64(p, chi.conductor().max(1)))?;
        let arg = match variant {
            Variant::Linear => x,
            Variant::Square => mul_mod(x, x, m),
        };
        let e2 = psi.int_exponent(arg)?;
        counts[((e1 * f1 + e2 * f2) % n) as usize] += 1;
    }
    Ok(CycNumber::from_counts(&counts, &rational_pow(p, -(k as i64))))
}

/// `g(χ,ψ)` by summation over `(Z/p^K)^×`, `K = max(1, c(χ), c(ψ))`.
pub fn gauss_g_oracle(chi: &UnitCharacter, psi: &AdditiveCharacter) -> Result<CycNumber> {
    oracle(chi, psi, Variant::Linear, None)
}

/// `h(χ,ψ)` by summation over `(Z/p^K)^×`.
pub fn gauss_h_oracle(chi: &UnitCharacter, psi: &AdditiveCharacter) -> Result<CycNumber> {
    oracle(chi, psi, Variant::Square, None)
}

/// `g` summed at an explicit level `K ≥ max(1, c(χ), c(ψ))`.
pub fn gauss_g_at_level(chi: &UnitCharacter, psi: &AdditiveCharacter, k: u32) -> Result<CycNumber> {
    oracle(chi, psi, Variant::Linear, Some(k))
}

fn q_pow(q: u64, e: i64) -> BigRational {
    rational_pow(q, e)
}

/// Closed form of `g(χ,ψ)`.
pub fn gauss_g_closed(chi: &UnitCharacter, psi: &AdditiveCharacter) -> GaussValue {
    let q = chi.p;
    let (cc, cp) = (chi.conductor() as i64, psi.conductor());
    if cc == 0 {
        return if cp <= 0 {
            GaussValue::ExactValue(CycNumber::from_rational(&(BigRational::one() - q_pow(q, -1))))
        } else if cp == 1 {
            GaussValue::ExactValue(CycNumber::from_rational(&-q_pow(q, -1)))
        } else {
            GaussValue::ZeroExact
        };
    }
    if cp == cc {
        GaussValue::MagSqOnly(q_pow(q, -cp))
    } else {
        GaussValue::ZeroExact
    }
}

/// Closed form of `h(χ,ψ)` where it is determined: odd `χ`, or `c(ψ) ≤ 0`.
pub fn gauss_h_closed(chi: &UnitCharacter, psi: &AdditiveCharacter) -> Option<GaussValue> {
    let q = chi.p;
    if chi.sign() == -1 {
        return Some(GaussValue::ZeroExact);
    }
    if psi.conductor() <= 0 {
        return Some(if chi.is_trivial() {
            GaussValue::ExactValue(CycNumber::from_rational(&(BigRational::one() - q_pow(q, -1))))
        } else {
            GaussValue::ZeroExact
        });
    }
    None
}

/// `|h(χ,ψ)|² + |h(χ,ψ_ξ)|²` from the closed form.
pub fn gauss_h_pair_magsq(chi: &UnitCharacter, psi: &AdditiveCharacter) -> Result<BigRational> {
    if chi.sign() == -1 {
        return Err(Error::OddCharacter);
    }
    let (cc, cp) = (chi.conductor() as i64, psi.conductor());
    if cp < 1 {
        return Err(Error::Invalid("c(psi) must be at least 1".into()));
    }
    let q = chi.p;
    Ok(if cc == cp {
        BigRational::from_integer(4.into()) * q_pow(q, -cp)
    } else if cc == 0 && cp == 1 {
        BigRational::from_integer(2.into()) * (q_pow(q, -1) + q_pow(q, -2))
    } else {
        BigRational::zero()
    })
}

/// `|h(χ,ψ)|²` and `|h(χ,ψ_ξ)|²`, evaluated exactly.
pub fn gauss_h_pair_oracle(chi: &UnitCharacter, psi: &AdditiveCharacter, xi: &ScaledPAdic) -> Result<(BigRational, BigRational)> {
    let a = gauss_h_oracle(chi, psi)?.mag_sq_rational().expect("rational");
    let b = gauss_h_oracle(chi, &psi.twist(xi))?.mag_sq_rational().expect("rational");
    Ok((a, b))
}
