use mp2_core::characters::{quadratic_unit_part, AdditiveCharacter, UnitCharacter};
use mp2_core::cyc::CycNumber;
use mp2_core::gauss::gauss_g_oracle;
use mp2_core::metaplectic::{kubota_cocycle, mp_mul, random_k, random_sl2, splitting_s, MpElem};
use mp2_core::newform::{conductor, conductor_min, dim_fixed, DimValue, Level, LevelQuery, ReprDescriptor};
use mp2_core::padic::{hilbert, hilbert_classes, FieldConfig, ScaledPAdic, SquareClass};
use mp2_core::report::Case;
use mp2_core::schroedinger::{even_weil_fixed_dim_oracle, WeilRepConfig};
use mp2_core::weil_index::weil_index;
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const PREC: u32 = 6;

fn prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![3u64, 5, 7])
}

fn class() -> impl Strategy<Value = SquareClass> {
    prop::sample::select(SquareClass::ALL.to_vec())
}

fn rational(p: u64) -> impl Strategy<Value = BigRational> {
    (-500i64..500, 0u32..3).prop_map(move |(n, k)| BigRational::new(BigInt::from(n), BigInt::from(p.pow(k))))
}

fn cyc() -> impl Strategy<Value = CycNumber> {
    (prop::sample::select(vec![8u64, 9, 12, 24]), prop::collection::vec(-5i64..5, 1..6)).prop_map(|(n, cs)| {
        cs.iter().enumerate().fold(CycNumber::zero(), |acc, (k, &c)| {
            &acc + &CycNumber::root(k as i64 * 5 + 1, n).scale(&BigRational::from_integer(c.into()))
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hilbert_symmetric_bimultiplicative(p in prime(), a in class(), b in class(), c in class()) {
        let cfg = FieldConfig::new(p, PREC).unwrap();
        let h = |x, y| hilbert_classes(&cfg, x, y);
        prop_assert_eq!(h(a, b), h(b, a));
        prop_assert_eq!(h(a.mul(c), b), h(a, b) * h(c, b));
        let ra = a.representative(&cfg);
        prop_assert_eq!(hilbert(&ra, &ra.neg()), 1);
    }

    #[test]
    fn square_class_ignores_squares(p in prime(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pick = |rng: &mut ChaCha8Rng| {
            use rand::Rng;
            let mut u: u64 = rng.gen_range(1..10_000);
            if u.is_multiple_of(p) { u += 1; }
            ScaledPAdic::from_parts(p, rng.gen_range(-3..=3), u, PREC)
        };
        let (x, y) = (pick(&mut rng), pick(&mut rng));
        prop_assert_eq!(x.mul(&y.mul(&y)).square_class(), x.square_class());
        prop_assert_eq!(hilbert(&x, &y), hilbert(&y, &x));
    }

    #[test]
    fn cyclotomic_ring_laws(x in cyc(), y in cyc(), z in cyc()) {
        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        prop_assert_eq!((&x * &y).mag_sq(), &x.mag_sq() * &y.mag_sq());
        prop_assert!((&x - &x).is_zero());
    }

    #[test]
    fn additive_character_homomorphism(p in prime(), v in -2i64..=2, x in rational(5), y in rational(5)) {
        let psi = AdditiveCharacter::with_shift(ScaledPAdic::from_parts(p, v, 1, PREC));
        let (x, y) = (x * BigRational::from_integer(p.into()), y);
        prop_assert_eq!(psi.eval(&(&x + &y)).unwrap(), &psi.eval(&x).unwrap() * &psi.eval(&y).unwrap());
    }

    #[test]
    fn additive_conductor_is_minus_ord(p in prime(), v in -3i64..=3, u in 1u64..1000) {
        let u = if u % p == 0 { u + 1 } else { u };
        let psi = AdditiveCharacter::with_shift(ScaledPAdic::from_parts(p, 0, 1, PREC)).twist(&ScaledPAdic::from_parts(p, v, u, PREC));
        prop_assert_eq!(psi.conductor(), -v);
    }

    #[test]
    fn quadratic_characters_multiplicative(p in prime(), a in class(), x in class(), y in class()) {
        let cfg = FieldConfig::new(p, PREC).unwrap();
        prop_assert_eq!(hilbert_classes(&cfg, x, a) * hilbert_classes(&cfg, y, a), hilbert_classes(&cfg, x.mul(y), a));
    }

    #[test]
    fn gauss_twist_equivariance(p in prime(), level in 0u32..=2, e in 0i64..1000, c in -1i64..=2, a in 1u64..500) {
        let a = if a % p == 0 { a + 1 } else { a };
        let chi = UnitCharacter::new(p, level, e);
        let psi = AdditiveCharacter::with_shift(ScaledPAdic::from_parts(p, -c, 1, PREC));
        let g = gauss_g_oracle(&chi, &psi).unwrap();
        let ga = gauss_g_oracle(&chi, &psi.twist(&ScaledPAdic::from_parts(p, 0, a, PREC))).unwrap();
        prop_assert_eq!(ga, &chi.eval(a % p.pow(level.max(1))).unwrap().inv().unwrap() * &g);
    }

    #[test]
    fn weil_index_eighth_root_and_class_function(p in prime(), a in class(), eps in 0u8..2, u in 1u64..200, v in -1i64..=1) {
        let cfg = FieldConfig::new(p, PREC).unwrap();
        let psi = AdditiveCharacter::psi_eps(&cfg, eps);
        let ra = a.representative(&cfg);
        let g = weil_index(&ra, &psi).unwrap();
        prop_assert_eq!(g.value.pow(8).unwrap(), CycNumber::one());
        let u = if u % p == 0 { u + 1 } else { u };
        let s = ScaledPAdic::from_parts(p, v, u, PREC);
        prop_assert_eq!(weil_index(&ra.mul(&s.mul(&s)), &psi).unwrap(), g);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cocycle_condition(p in prop::sample::select(vec![3u64, 5]), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g: Vec<_> = (0..3).map(|_| random_sl2(&mut rng, p, 3)).collect();
        let c = |x, y| kubota_cocycle(p, x, y).unwrap();
        let (g01, g12) = (g[0].mul(&g[1]), g[1].mul(&g[2]));
        prop_assert_eq!(c(&g[0], &g[1]) * c(&g01, &g[2]), c(&g[1], &g[2]) * c(&g[0], &g12));
        let m: Vec<_> = g.iter().map(|x| MpElem::new(x.clone(), 1)).collect();
        let l = mp_mul(p, &mp_mul(p, &m[0], &m[1]).unwrap(), &m[2]).unwrap();
        let r = mp_mul(p, &m[0], &mp_mul(p, &m[1], &m[2]).unwrap()).unwrap();
        prop_assert_eq!(l, r);
    }

    #[test]
    fn splitting_is_homomorphism(p in prop::sample::select(vec![3u64, 5]), eps in 0u8..2, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (k1, k2) = (random_k(&mut rng, p, 3, eps), random_k(&mut rng, p, 3, eps));
        let s = |k| splitting_s(p, eps, k).unwrap();
        prop_assert_eq!(s(&k1) * s(&k2) * kubota_cocycle(p, &k1, &k2).unwrap(), s(&k1.mul(&k2)));
    }

    #[test]
    fn dims_nondecreasing_and_zero_below_eta(
        p in prop::sample::select(vec![3u64, 5]),
        eps in 0u8..2,
        level in 0u32..=3,
        e in 0i64..200,
        kind in 0usize..4,
        chi in class(),
        cs in 1u32..=4,
    ) {
        let eta = UnitCharacter::new(p, level, e);
        let pi = match kind {
            0 => ReprDescriptor::EvenWeil { p, chi },
            1 => ReprDescriptor::Steinberg { p, chi },
            2 => ReprDescriptor::OddWeil { p, chi },
            _ => ReprDescriptor::supercuspidal(p, eps, cs, 0, eta.sign(), false).unwrap(),
        };
        let mut prev = 0;
        for m in 0..=12 {
            let d = dim_fixed(&pi, &LevelQuery { eps, eta, m }).unwrap();
            if m < eta.conductor() {
                prop_assert_eq!(d, DimValue::Known(0));
            }
            if let DimValue::Known(x) = d {
                prop_assert!(x >= prev);
                prev = x;
            }
        }
    }

    #[test]
    fn supercuspidal_vanishing_clause(p in prop::sample::select(vec![3u64, 5]), eps in 0u8..2, delta in 0u8..2, cs in 2u32..=4, defect in 0u8..2, level in 0u32..=4, e in 0i64..100) {
        let defect = defect * delta;
        let eta = UnitCharacter::new(p, level, e);
        let pi = ReprDescriptor::supercuspidal(p, delta, cs, defect, eta.sign(), false).unwrap();
        for m in 0..=(2 * cs - 1 - defect as u32) {
            prop_assert_eq!(dim_fixed(&pi, &LevelQuery { eps, eta, m }).unwrap(), DimValue::Known(0));
        }
    }

    #[test]
    fn supercuspidal_min_conductor_is_trivial_eta(p in prop::sample::select(vec![3u64, 5]), eps in 0u8..2, cs in 1u32..=4) {
        let pi = ReprDescriptor::supercuspidal(p, eps, cs, 0, 1, false).unwrap();
        prop_assert_eq!(conductor(&pi, eps, &UnitCharacter::trivial(p)).unwrap(), Level::Finite(conductor_min(&pi, eps)));
    }

    #[test]
    fn case_pass_iff_equal(a in any::<i32>(), b in any::<i32>()) {
        let c = Case::new("k", serde_json::Value::Null, serde_json::json!(a), serde_json::json!(b));
        prop_assert_eq!(c.pass, a == b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn even_weil_oracle_monotone_and_sign(p in prop::sample::select(vec![3u64, 5]), eps in 0u8..2, chi in class(), level in 0u32..=2, e in 0i64..20) {
        let eta = UnitCharacter::new(p, level, e);
        let cfg = WeilRepConfig { p, eps, chi, eta };
        let dims: Vec<u32> = (0..=5).map(|m| even_weil_fixed_dim_oracle(&cfg, m).unwrap()).collect();
        prop_assert!(dims.windows(2).all(|w| w[0] <= w[1]));
        if eta.sign() != quadratic_unit_part(p, chi).sign() {
            prop_assert!(dims.iter().all(|&d| d == 0));
        }
    }
}
