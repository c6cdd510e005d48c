use magicfiber::charpoly::default_tol;
use magicfiber::entropy::roots_agree;
use magicfiber::homology::*;
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn h(x: i64, y: i64, z: i64) -> HClass {
    HClass::new(x, y, z)
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn gcd0(a: i64, b: i64) -> i64 {
    num_integer::gcd(a, b)
}

#[test]
fn thurston_norm_examples() {
    assert_eq!(thurston_norm(&h(1, 1, 1)), BigInt::from(1));
    assert_eq!(thurston_norm(&h(0, 0, 0)), BigInt::from(0));
    assert_eq!(thurston_norm(&h(2, 2, -1)), BigInt::from(5));
    // Vertices of the unit ball.
    for v in [h(1, 0, 0), h(0, 1, 0), h(0, 0, 1), h(1, 1, 1)] {
        assert_eq!(thurston_norm(&v), BigInt::from(1));
    }
}

#[test]
fn cone_location() {
    assert_eq!(locate_cone(&h(1, 1, 0)), Cone::Delta);
    assert_eq!(locate_cone(&h(1, -2, 1)), Cone::Delta1);
    assert_eq!(locate_cone(&h(1, 1, 2)), Cone::NotFibered);
    assert_eq!(locate_cone(&h(0, 0, 0)), Cone::NotFibered);
    assert_eq!(locate_cone(&h(-1, -1, 0)), Cone::DeltaP);
    // On the boundary of the Δ cone.
    assert_eq!(locate_cone(&h(1, 1, 1)), Cone::NotFibered);
}

#[test]
fn sigma_examples() {
    assert_eq!(sigma(&h(1, 1, 0)).unwrap(), h(1, 1, 0));
    assert_eq!(sigma(&h(1, -2, 1)).unwrap(), h(1, 1, -2));
    assert_eq!(sigma(&h(-1, -1, 0)).unwrap(), h(1, 1, 0));
    assert!(matches!(sigma(&h(1, 1, 2)), Err(HomologyError::NotFibered(_))));
}

#[test]
fn slopes() {
    let (a, b, g) = boundary_slopes(&h(2, 2, -1)).unwrap();
    assert_eq!((a, b, g), (Slope::new(1, -2), Slope::new(1, -2), Slope::new(4, 1)));
    let (a, b, g) = boundary_slopes(&h(1, 1, 1)).unwrap();
    assert_eq!((a, b, g), (Slope::new(-2, 1), Slope::new(-2, 1), Slope::new(-2, 1)));
    let (_, _, g) = boundary_slopes(&h(1, 1, 0)).unwrap();
    assert!(g.is_infinite());
}

#[test]
fn slope_parsing_and_normalization() {
    let s: Slope = "-6".parse().unwrap();
    assert_eq!(s, Slope::new(6, -1));
    assert_eq!(s.to_string(), "-6");
    assert_eq!("3/-2".parse::<Slope>().unwrap(), Slope::new(-3, 2));
    assert_eq!(Slope::new(3, -2).to_string(), "3/-2");
    assert_eq!(Slope::new(4, 2), Slope::new(2, 1));
    assert_eq!(Slope::new(5, 0), Slope::infinity());
    assert!("1/0".parse::<Slope>().unwrap().is_infinite());
    assert!("x".parse::<Slope>().is_err());
    let n = Slope::new(-10, 4);
    assert_eq!(Slope::new(n.p.clone(), n.q.clone()), n);
}

#[test]
fn fiber_info_examples() {
    let f = fiber_info(&h(2, 2, -1)).unwrap();
    assert_eq!(f.counts(), [1.into(), 1.into(), 1.into()]);
    assert_eq!(f.genus, BigInt::from(2));
    assert_eq!(f.prongs(), [2.into(), 2.into(), 6.into()]);
    assert!(f.orientable && f.in_m);

    let f = fiber_info(&h(8, 4, -3)).unwrap();
    assert_eq!(f.counts(), [1.into(), 1.into(), 3.into()]);
    assert_eq!(f.genus, BigInt::from(6));
    assert!(f.in_m);

    let f = fiber_info(&h(1, 1, 0)).unwrap();
    assert_eq!(f.counts(), [1.into(), 1.into(), 2.into()]);
    assert_eq!(f.genus, BigInt::from(0));
    assert_eq!(f.prongs(), [1.into(), 1.into(), 1.into()]);
    assert!(!f.in_m);

    assert!(matches!(fiber_info(&h(2, 2, 0)), Err(HomologyError::NotPrimitive(_))));
    assert!(matches!(fiber_info(&h(1, 1, 2)), Err(HomologyError::NotFibered(_))));
}

#[test]
fn whitehead_classes_carry_cusp_data_through_sigma() {
    // (k, -k-l, l) lies in Δ₁: one boundary on α with 1 prong, k+l on β, l on γ.
    for (k, l) in [(1i64, 1i64), (2, 1), (3, 2), (5, 3)] {
        let f = fiber_info(&h(k, -k - l, l)).unwrap();
        assert_eq!(f.counts(), [k.into(), (k + l).into(), l.into()]);
        assert_eq!(f.prongs(), [1.into(), 3.into(), 1.into()]);
        assert_eq!(f.genus, BigInt::from(1), "({}, {})", k, l);
    }
}

#[test]
fn dilatation_examples() {
    assert!((dilatation(&h(1, 1, 0)).unwrap().approx - (2.0 + 3f64.sqrt())).abs() < 1e-12);
    assert!((dilatation(&h(13, 12, 5)).unwrap().approx - 1.1487).abs() < 1e-4);
    assert!((dilatation(&h(18, 22, 15)).unwrap().approx - 1.1762).abs() < 1e-4);
    assert!(dilatation(&h(2, 2, 0)).is_err());
    let r = class_root(&h(2, 2, 0)).unwrap();
    assert!((r.approx - (2.0 + 3f64.sqrt()).sqrt()).abs() < 1e-12);
}

#[test]
fn entropy_on_rays() {
    let two_log = 2.0 * (2.0 + 3f64.sqrt()).ln();
    let half = RClass::new(rat(1, 2), rat(1, 2), rat(0, 1));
    assert!((entropy(&half).unwrap() - two_log).abs() < 1e-12);
    assert!((normalized_entropy(&half).unwrap() - two_log).abs() < 1e-12);
    assert!((class_ent(&h(1, 1, 0)).unwrap() - two_log).abs() < 1e-12);
    let e2 = entropy(&h(2, 2, 0).to_rational()).unwrap();
    assert!((e2 - 0.5 * (2.0 + 3f64.sqrt()).ln()).abs() < 1e-12);
    let third = RClass::new(rat(1, 3), rat(1, 3), rat(-1, 3));
    assert!((entropy(&third).unwrap() - 3.0 * ((3.0 + 5f64.sqrt()) / 2.0).ln()).abs() < 1e-12);
    // Norm-one point [1/2,1/2] attains 2 log(2+√3).
    let p = FacePoint::new(rat(1, 2), rat(1, 2)).unwrap();
    assert!((normalized_entropy(&p.class()).unwrap() - two_log).abs() < 1e-12);
    assert!((face_ent_f64(0.5, 0.5).unwrap() - two_log).abs() < 1e-12);
}

#[test]
fn symmetry_orbit_of_2_2_minus1() {
    let orbit = symmetry_orbit(&h(2, 2, -1)).unwrap();
    for m in [h(2, 2, -1), h(3, 2, 0), h(3, 3, 1), h(2, 3, 0)] {
        assert!(orbit.contains(&m), "missing {}", m);
    }
    assert_eq!(orbit.len(), 4);
    let orbit = symmetry_orbit(&h(1, 1, 0)).unwrap();
    assert!(orbit.contains(&h(1, 1, 0)) && orbit.len() <= 8);
}

#[test]
fn face_point_domain() {
    assert!(FacePoint::new(rat(0, 1), rat(1, 2)).is_none());
    assert!(FacePoint::new(rat(1, 2), rat(1, 1)).is_none());
    let p = FacePoint::new(rat(1, 3), rat(1, 2)).unwrap();
    assert_eq!(thurston_norm_rational(&p.class()), rat(1, 1));
}

#[test]
fn mirror_laws_on_delta() {
    let tol = default_tol();
    // λ_{[x0, 1/2 - t]} = λ_{[x0, 1/2 + t]}.
    for x0 in [rat(1, 5), rat(1, 3), rat(2, 5), rat(3, 4)] {
        for t in [rat(1, 10), rat(1, 6), rat(1, 4)] {
            let a = FacePoint::new(x0.clone(), rat(1, 2) - &t).unwrap().class();
            let b = FacePoint::new(x0.clone(), rat(1, 2) + &t).unwrap().class();
            let (a0, _) = a.primitive_on_ray().unwrap();
            let (b0, _) = b.primitive_on_ray().unwrap();
            let ea = normalized_entropy(&a).unwrap();
            let eb = normalized_entropy(&b).unwrap();
            assert!((ea - eb).abs() < 1e-10, "{} {} {}", x0, t, a0);
            let _ = (b0, &tol);
        }
    }
    // Along y = -x + c the minimum sits at the diagonal.
    for c in [rat(1, 2), rat(1, 1), rat(6, 5)] {
        let mut best = (f64::INFINITY, rat(0, 1));
        for i in 1..40 {
            let x = rat(i, 40);
            let y = &c - &x;
            if let Some(p) = FacePoint::new(x.clone(), y) {
                let v = normalized_entropy(&p.class()).unwrap();
                if v < best.0 - 1e-12 {
                    best = (v, x);
                }
            }
        }
        assert_eq!(best.1, &c / rat(2, 1));
    }
}

fn fibered_class() -> impl Strategy<Value = HClass> {
    (-30i64..30, -30i64..30, -30i64..30)
        .prop_map(|(x, y, z)| h(x, y, z))
        .prop_filter("primitive fibered", |a| a.is_primitive() && locate_cone(a) != Cone::NotFibered)
}

fn interior_class() -> impl Strategy<Value = HClass> {
    (1i64..30, 1i64..30)
        .prop_flat_map(|(x, y)| (Just(x), Just(y), -30i64..x.min(y)))
        .prop_map(|(x, y, z)| h(x, y, z))
        .prop_filter("primitive", |a| a.is_primitive())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn norm_is_minus_euler_characteristic(a in fibered_class()) {
        let f = fiber_info(&a).unwrap();
        prop_assert_eq!(&f.norm, &thurston_norm(&a));
        prop_assert_eq!(f.norm.clone(), BigInt::from(2) * &f.genus - 2 + f.boundary_total());
        let in_m = f.prongs().iter().all(|p| *p >= BigInt::from(2));
        prop_assert_eq!(f.in_m, in_m);
    }

    #[test]
    fn fiber_counts_match_direct_gcds(a in interior_class()) {
        let (x, y, z) = (a.x.clone(), a.y.clone(), a.z.clone());
        let to = |v: &BigInt| -> i64 { v.try_into().unwrap() };
        let (x, y, z) = (to(&x), to(&y), to(&z));
        let f = fiber_info(&a).unwrap();
        prop_assert_eq!(f.counts(), [gcd0(x, y + z).into(), gcd0(y, z + x).into(), gcd0(z, x + y).into()]);
        prop_assert_eq!(f.prongs_alpha.clone(), BigInt::from(x / gcd0(x, y + z)));
        prop_assert_eq!(f.prongs_beta.clone(), BigInt::from(y / gcd0(y, x + z)));
        prop_assert_eq!(f.prongs_gamma.clone(), BigInt::from((x + y - 2 * z) / gcd0(z, x + y)));
        prop_assert_eq!(f.orientable, x % 2 == 0 && y % 2 == 0 && z.rem_euclid(2) == 1);
        prop_assert_eq!(thurston_norm(&a), BigInt::from(x + y - z));
    }

    #[test]
    fn sigma_is_idempotent_and_preserves_data(a in fibered_class()) {
        let s = sigma(&a).unwrap();
        prop_assert_eq!(locate_cone(&s), Cone::Delta);
        prop_assert_eq!(sigma(&s).unwrap(), s.clone());
        prop_assert_eq!(thurston_norm(&s), thurston_norm(&a));
        prop_assert_eq!(sigma(&a.neg()).unwrap(), s.clone());
        let la = dilatation(&a).unwrap();
        let ls = dilatation(&s).unwrap();
        prop_assert!(roots_agree(&la, &ls, &default_tol()));
    }

    #[test]
    fn swap_symmetry(a in interior_class()) {
        let la = dilatation(&a).unwrap();
        let lb = dilatation(&a.swap_xy()).unwrap();
        prop_assert!(roots_agree(&la, &lb, &default_tol()));
    }

    #[test]
    fn orbit_shares_one_polynomial(a in interior_class()) {
        let f = class_polynomial(&a).unwrap();
        let orbit = symmetry_orbit(&a).unwrap();
        prop_assert!(orbit.len() <= 8);
        for b in orbit {
            prop_assert_eq!(locate_cone(&b), Cone::Delta);
            prop_assert_eq!(thurston_norm(&b), thurston_norm(&a));
            let g = class_polynomial(&b).unwrap();
            prop_assert!(g == f || g == class_polynomial(&b.swap_xy()).unwrap());
            prop_assert_eq!(&class_polynomial(&b.swap_xy()).unwrap(), &f);
        }
    }

    #[test]
    fn slope_one_propagates(k in 1i64..40, l in -40i64..40) {
        // S_β(1) is spanned by (1,-1,0) and (0,-1,1).
        let a = h(k, -k - l, l);
        prop_assume!(!a.is_zero() && a.y != BigInt::from(0));
        let (sa, sb, sg) = boundary_slopes(&a).unwrap();
        prop_assert_eq!(&sb, &Slope::new(1, 1));
        if a.x != BigInt::from(0) { prop_assert_eq!(&sa, &Slope::new(1, 1)); }
        if a.z != BigInt::from(0) { prop_assert_eq!(&sg, &Slope::new(1, 1)); }
    }

    #[test]
    fn real_exponent_solver_matches_exact_roots(a in interior_class()) {
        let (x, y, z) = a.to_f64();
        let s = log_dilatation_real(x, y, z).unwrap();
        let exact = dilatation(&a).unwrap().log();
        prop_assert!((s - exact).abs() < 1e-9 * exact.max(1.0));
    }
}
