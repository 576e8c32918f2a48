//! Double cosets `K^ε_m \ G / B`, their representatives, and the brute-force
//! principal-series dimension count built on them.

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::characters::{MultCharacter, UnitCharacter};
use crate::error::{Error, Result};
use crate::metaplectic::{reduce_mod, SL2Elem};
use crate::padic::{inv_mod, mul_mod, pow_u64, primitive_root, rational_ord, rational_pow, smallest_nonresidue};
use crate::par::{self, Exec};

/// Which standard double-coset representative an element is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CosetLabel {
    One,
    W,
    /// `n^op(ξ^δ ϖ^{i+ε})`.
    NOp {
        delta: u8,
        i: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetRep {
    pub label: CosetLabel,
    pub g: SL2Elem,
}

fn qi(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Representatives of `K^ε_m \ G / B`.
pub fn coset_reps(p: u64, eps: u8, m: u32) -> Vec<CosetRep> {
    let mut out = vec![CosetRep { label: CosetLabel::One, g: SL2Elem::identity() }];
    if m == 0 {
        return out;
    }
    out.push(CosetRep { label: CosetLabel::W, g: SL2Elem::w() });
    let xi = qi(smallest_nonresidue(p) as i64);
    for i in 1..m {
        for delta in 0..2u8 {
            let mut z = rational_pow(p, (i + eps as u32) as i64);
            if delta == 1 {
                z *= &xi;
            }
            out.push(CosetRep { label: CosetLabel::NOp { delta, i }, g: SL2Elem::n_op(&z) });
        }
    }
    out
}

type Mat = [u32; 4];

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let g = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = g;
            x = g;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi as usize] = lo;
        }
    }
}

/// The partition of `SL_2(Z/p^m)` into double cosets of the upper triangular subgroup.
pub struct CosetPartition {
    pub p: u64,
    pub m: u32,
    elems: Vec<Mat>,
    index: HashMap<Mat, u32>,
    root: Vec<u32>,
    /// Canonical (lexicographically least) element of each coset, sorted.
    pub canonical: Vec<Mat>,
}

const MAX_GROUP: u64 = 4_000_000;

fn mat_mul(x: &Mat, y: &Mat, n: u64) -> Mat {
    let f = |a: u32, b: u32, c: u32, d: u32| ((mul_mod(a as u64, b as u64, n) + mul_mod(c as u64, d as u64, n)) % n) as u32;
    [f(x[0], y[0], x[1], y[2]), f(x[0], y[1], x[1], y[3]), f(x[2], y[0], x[3], y[2]), f(x[2], y[1], x[3], y[3])]
}

impl CosetPartition {
    pub fn build(p: u64, m: u32, exec: Exec) -> Result<Self> {
        let n = pow_u64(p, m);
        let order = n * n * n - n * n * n / (p * p);
        if m > 0 && order > MAX_GROUP {
            return Err(Error::ResourceLimit(format!("SL2(Z/{p}^{m}) has {order} elements")));
        }
        if m == 0 {
            let e = [0u32; 4];
            return Ok(CosetPartition { p, m, elems: vec![e], index: HashMap::from([(e, 0)]), root: vec![0], canonical: vec![e] });
        }
        let rows: Vec<Vec<Mat>> = par::map_range(exec, n as usize, |a| {
            let a = a as u64;
            let mut v = Vec::new();
            for c in 0..n {
                if !a.is_multiple_of(p) {
                    let ai = inv_mod(a, n).unwrap();
                    for b in 0..n {
                        let d = mul_mod(1 + mul_mod(b, c, n), ai, n);
                        v.push([a as u32, b as u32, c as u32, d as u32]);
                    }
                } else if c % p != 0 {
                    let ci = inv_mod(c, n).unwrap();
                    for d in 0..n {
                        let b = mul_mod((mul_mod(a, d, n) + n - 1) % n, ci, n);
                        v.push([a as u32, b as u32, c as u32, d as u32]);
                    }
                }
            }
            v.sort();
            v
        });
        let elems: Vec<Mat> = rows.into_iter().flatten().collect();
        let index: HashMap<Mat, u32> = elems.iter().enumerate().map(|(i, e)| (*e, i as u32)).collect();
        let g = primitive_root(p) as u32;
        let gi = inv_mod(g as u64, n).unwrap() as u32;
        let gens: [Mat; 2] = [[g, 0, 0, gi], [1, 1, 0, 1]];
        let mut uf = UnionFind { parent: (0..elems.len() as u32).collect() };
        for (i, e) in elems.iter().enumerate() {
            for h in &gens {
                uf.union(i as u32, index[&mat_mul(h, e, n)]);
                uf.union(i as u32, index[&mat_mul(e, h, n)]);
            }
        }
        let root: Vec<u32> = (0..elems.len() as u32).map(|i| uf.find(i)).collect();
        let mut least: HashMap<u32, Mat> = HashMap::new();
        for (i, e) in elems.iter().enumerate() {
            let r = least.entry(root[i]).or_insert(*e);
            if *e < *r {
                *r = *e;
            }
        }
        let mut canonical: Vec<Mat> = least.into_values().collect();
        canonical.sort();
        Ok(CosetPartition { p, m, elems, index, root, canonical })
    }

    pub fn count(&self) -> usize {
        self.canonical.len()
    }

    pub fn group_order(&self) -> usize {
        self.elems.len()
    }

    /// Canonical element of the coset containing `g ∈ K^0`.
    pub fn coset_of(&self, g: &SL2Elem) -> Result<Mat> {
        if self.m == 0 {
            return Ok([0; 4]);
        }
        let mut key = [0u32; 4];
        for (k, x) in g.entries().iter().enumerate() {
            key[k] = reduce_mod(x, self.p, self.m)? as u32;
        }
        let i = *self.index.get(&key).ok_or_else(|| Error::Invalid("not in SL2".into()))?;
        let r = self.root[i as usize];
        let mut best = self.elems[r as usize];
        for (j, e) in self.elems.iter().enumerate() {
            if self.root[j] == r && *e < best {
                best = *e;
            }
        }
        Ok(best)
    }
}

/// Iwasawa decomposition `g = k b` with `k ∈ K^0`, `b ∈ B`; returns `k`.
pub fn iwasawa_k(p: u64, g: &SL2Elem) -> SL2Elem {
    let ord = |x: &BigRational| if x.is_zero() { i64::MAX } else { rational_ord(x, p) };
    let v = ord(&g.a).min(ord(&g.c));
    let s = rational_pow(p, -v);
    let (a, c) = (&g.a * &s, &g.c * &s);
    if ord(&a) == 0 {
        SL2Elem { d: a.recip(), a, b: qi(0), c }
    } else {
        SL2Elem { b: -c.recip(), a, c, d: qi(0) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetReport {
    pub p: u64,
    pub m: u32,
    pub count: usize,
    pub expected: usize,
    pub reps_distinct: [bool; 2],
    pub reps_complete: [bool; 2],
    pub reps: Vec<String>,
}

impl CosetReport {
    pub fn pass(&self) -> bool {
        self.count == self.expected && self.reps_distinct.iter().all(|&b| b) && self.reps_complete.iter().all(|&b| b)
    }
}

/// Counts double cosets in `SL_2(Z/p^m)` and checks both representative lists.
pub fn coset_oracle(p: u64, m: u32, exec: Exec) -> Result<CosetReport> {
    let part = CosetPartition::build(p, m, exec)?;
    let expected = if m == 0 { 1 } else { 2 * m as usize };
    let mut distinct = [false; 2];
    let mut complete = [false; 2];
    for eps in 0..2u8 {
        let mut seen = BTreeSet::new();
        let reps = coset_reps(p, eps, m);
        for r in &reps {
            let k = if eps == 0 { r.g.clone() } else { iwasawa_k(p, &r.g.conj_beta_inv(p)) };
            seen.insert(part.coset_of(&k)?);
        }
        distinct[eps as usize] = seen.len() == reps.len();
        complete[eps as usize] = seen.len() == part.count();
    }
    let reps = coset_reps(p, 0, m).iter().map(|r| r.g.to_string()).collect();
    Ok(CosetReport { p, m, count: part.count(), expected, reps_distinct: distinct, reps_complete: complete, reps })
}

/// Whether `η^g = μ` on `K_m^g ∩ B`, by the closed criterion.
pub fn hom_condition(label: CosetLabel, m: u32, eta: &UnitCharacter, mu: &MultCharacter) -> Result<bool> {
    if eta.sign() != mu.sign() {
        return Err(Error::CentralSign);
    }
    let mu_u = mu.unit;
    Ok(match label {
        CosetLabel::One => *eta == mu_u.inv(),
        CosetLabel::W => *eta == mu_u,
        CosetLabel::NOp { i, .. } => {
            let (cm, cp, cn) = (mu_u.conductor(), eta.mul(&mu_u).conductor(), eta.mul(&mu_u.inv()).conductor());
            if 2 * i >= m {
                cm <= i && cp <= m - i
            } else {
                cm <= m - i && cn <= i
            }
        }
    })
}

type PairSet = Rc<Vec<(u64, u64)>>;

thread_local! {
    static PAIRS: RefCell<HashMap<(u64, CosetLabel, u32, u8, u32), PairSet>> = RefCell::new(HashMap::new());
}

const MAX_ENUM: u64 = 5_000_000;

/// The distinct pairs `(a, δ)` mod `p^L` where `x = [[a, b], [0, a^{-1}]]` runs over
/// `K_m^g ∩ B` and `δ` is the lower-right entry of `g x g^{-1}`.
fn hom_pairs(p: u64, label: CosetLabel, g: &SL2Elem, eps: u8, m: u32, l: u32) -> Result<PairSet> {
    let key = (p, label, m, eps, l);
    if let Some(s) = PAIRS.with(|t| t.borrow().get(&key).cloned()) {
        return Ok(s);
    }
    let e = eps as u32;
    let nl = pow_u64(p, l);
    let big = pow_u64(p, l + e);
    let units = nl - nl / p;
    if units * big > MAX_ENUM {
        return Err(Error::ResourceLimit(format!("hom oracle at p={p}, L={l}")));
    }
    // Scaled integer entries of g and g^{-1} modulo p^{L+ε}; g has p-integral entries here.
    let red = |x: &BigRational| reduce_mod(x, p, l + e);
    let (ga, gb, gc, gd) = (red(&g.a)?, red(&g.b)?, red(&g.c)?, red(&g.d)?);
    let pe = pow_u64(p, e);
    let mut set = BTreeSet::new();
    for alpha in (1..nl).filter(|a| a % p != 0) {
        let ai = inv_mod(alpha, nl).unwrap();
        for t in 0..big {
            // p^ε x = [[p^ε α, t], [0, p^ε α^{-1}]] mod p^{L+ε}
            let x = [mul_mod(pe, alpha, big), t, 0, mul_mod(pe, ai, big)];
            let gx = [
                (mul_mod(ga, x[0], big) + mul_mod(gb, x[2], big)) % big,
                (mul_mod(ga, x[1], big) + mul_mod(gb, x[3], big)) % big,
                (mul_mod(gc, x[0], big) + mul_mod(gd, x[2], big)) % big,
                (mul_mod(gc, x[1], big) + mul_mod(gd, x[3], big)) % big,
            ];
            // g^{-1} = [[d, -b], [-c, a]]
            let (ia, ib, ic, id) = (gd, (big - gb) % big, (big - gc) % big, ga);
            let s = [
                (mul_mod(gx[0], ia, big) + mul_mod(gx[1], ic, big)) % big,
                (mul_mod(gx[0], ib, big) + mul_mod(gx[1], id, big)) % big,
                (mul_mod(gx[2], ia, big) + mul_mod(gx[3], ic, big)) % big,
                (mul_mod(gx[2], ib, big) + mul_mod(gx[3], id, big)) % big,
            ];
            if !s[0].is_multiple_of(pe) || !s[2].is_multiple_of(pow_u64(p, (m + 2 * e).min(l + e))) || !s[3].is_multiple_of(pe) {
                continue;
            }
            let dd = s[3] / pe;
            if dd.is_multiple_of(p) {
                continue;
            }
            set.insert((alpha, dd % nl));
        }
    }
    let v: PairSet = Rc::new(set.into_iter().collect());
    PAIRS.with(|t| t.borrow_mut().insert(key, v.clone()));
    Ok(v)
}

fn same_value(eta: &UnitCharacter, d: u64, mu: &UnitCharacter, a: u64) -> Result<bool> {
    let (k1, n1) = (eta.value_exponent(d)? as u128, eta.order_of_values() as u128);
    let (k2, n2) = (mu.value_exponent(a)? as u128, mu.order_of_values() as u128);
    Ok(k1 * n2 == k2 * n1)
}

/// Brute-force version of [`hom_condition`]: enumerates `K_m^g ∩ B` in `SL_2(Z/p^L)`.
pub fn hom_condition_oracle(p: u64, rep: &CosetRep, eps: u8, m: u32, eta: &UnitCharacter, mu: &MultCharacter, l: u32) -> Result<bool> {
    if eta.sign() != mu.sign() {
        return Err(Error::CentralSign);
    }
    let pairs = hom_pairs(p, rep.label, &rep.g, eps, m, l)?;
    for &(a, d) in pairs.iter() {
        if !same_value(eta, d, &mu.unit, a)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `dim π_ψ(μ)^{K_m}_η` by counting double cosets that satisfy the oracle condition.
pub fn dim_fixed_ps_oracle(p: u64, mu: &MultCharacter, eps: u8, eta: &UnitCharacter, m: u32) -> Result<u32> {
    if eta.sign() != mu.sign() || m < eta.conductor() {
        return Ok(0);
    }
    let l = m.max(eta.conductor()).max(mu.conductor()) + 1;
    let mut n = 0;
    for rep in coset_reps(p, eps, m) {
        if hom_condition_oracle(p, &rep, eps, m, eta, mu, l)? {
            n += 1;
        }
    }
    Ok(n)
}

/// `dim π_ψ(μ)^{K_m}_η` by counting double cosets that satisfy the closed criterion.
pub fn dim_fixed_ps_by_cosets(p: u64, mu: &MultCharacter, eps: u8, eta: &UnitCharacter, m: u32) -> Result<u32> {
    if eta.sign() != mu.sign() || m < eta.conductor() {
        return Ok(0);
    }
    let mut n = 0;
    for rep in coset_reps(p, eps, m) {
        if hom_condition(rep.label, m, eta, mu)? {
            n += 1;
        }
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    #[test]
    fn reps_shapes() {
        assert_eq!(coset_reps(3, 0, 0).len(), 1);
        assert_eq!(coset_reps(3, 0, 1).len(), 2);
        let r = coset_reps(3, 1, 2);
        assert_eq!(r[2].g, SL2Elem::n_op(&qi(9)));
        assert_eq!(r[3].g, SL2Elem::n_op(&qi(18)));
    }

    #[test]
    fn small_coset_counts() {
        for (p, m) in [(3, 0), (3, 1), (3, 2), (5, 1), (5, 2)] {
            let r = coset_oracle(p, m, Exec::Sequential).unwrap();
            assert!(r.pass(), "{r:?}");
        }
    }

    #[test]
    fn iwasawa_recovers() {
        let g = SL2Elem::w().conj_beta_inv(3);
        let k = iwasawa_k(3, &g);
        let b = k.inv().mul(&g);
        assert!(b.c.is_zero());
        assert!(crate::metaplectic::in_compact(3, 0, &k));
    }

    #[test]
    fn oracle_matches_closed_criterion_small() {
        let p = 3;
        for eps in 0..2u8 {
            for m in 0..=2u32 {
                for eta in UnitCharacter::all_up_to(p, 2) {
                    for mu_u in UnitCharacter::all_up_to(p, 2) {
                        if eta.sign() != mu_u.sign() {
                            continue;
                        }
                        let mu = MultCharacter::new(mu_u, Ratio::new(0, 1), Ratio::new(0, 1));
                        let l = m.max(eta.conductor()).max(mu.conductor()) + 1;
                        for rep in coset_reps(p, eps, m) {
                            if m < eta.conductor() {
                                continue;
                            }
                            assert_eq!(
                                hom_condition_oracle(p, &rep, eps, m, &eta, &mu, l).unwrap(),
                                hom_condition(rep.label, m, &eta, &mu).unwrap(),
                                "eps={eps} m={m} eta={eta} mu={mu} {:?}",
                                rep.label
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn unramified_sequence() {
        let mu = MultCharacter::unramified(3);
        let eta = UnitCharacter::trivial(3);
        let dims: Vec<u32> = (0..4).map(|m| dim_fixed_ps_oracle(3, &mu, 0, &eta, m).unwrap()).collect();
        assert_eq!(dims, vec![1, 2, 4, 6]);
    }
}
