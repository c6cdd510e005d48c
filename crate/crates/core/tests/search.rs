use magicfiber::charpoly::{default_tol, lt_polynomial, specialize_fibered};
use magicfiber::dehn::{self, FaceKind};
use magicfiber::entropy::roots_agree;
use magicfiber::homology::{self, fiber_info, locate_cone, Cone, HClass, Slope};
use magicfiber::search::*;
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use std::cmp::Ordering;

fn s(p: i64, q: i64) -> Slope {
    Slope::new(p, q)
}

fn kl(v: &[(BigInt, BigInt)]) -> Vec<(i64, i64)> {
    v.iter().map(|(k, l)| (i64::try_from(k).unwrap(), i64::try_from(l).unwrap())).collect()
}

fn same_root(a: &magicfiber::RootEnclosure, b: &magicfiber::RootEnclosure) -> bool {
    roots_agree(a, b, &default_tol())
}

fn naive_scan(r: &Slope, bound: i64, reach: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    for k in -reach..=reach {
        for l in -reach..=reach {
            if (k, l) <= (0, 0) && !(k == 0 && l > 0) || k < 0 {
                continue;
            }
            if num_integer::gcd(k, l) != 1 {
                continue;
            }
            let n = dehn::filled_norm_kl(r, &BigRational::from_integer(k.into()), &BigRational::from_integer(l.into()))
                .unwrap();
            if n <= BigRational::from_integer(bound.into()) {
                out.push((k, l));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn lattice_examples() {
    assert_eq!(kl(&lattice_points(&s(1, 1), 1).unwrap()), vec![(0, 1), (1, 0)]);
    assert_eq!(kl(&lattice_points(&s(3, -2), 2).unwrap()), vec![(0, 1), (1, -1), (1, 0), (1, 1)]);
}

#[test]
fn lattice_matches_rectangle_scan() {
    let cases = [(s(1, 1), 7), (s(2, 1), 9), (s(3, -2), 11), (s(1, -2), 8), (s(-4, 1), 10),
        (s(5, -3), 12), (s(1, 2), 6), (s(7, -2), 9), (s(-6, 1), 8), (s(4, 3), 10)];
    for (r, b) in cases {
        let got = kl(&lattice_points(&r, b).unwrap());
        let want = naive_scan(&r, b, 4 * b);
        assert_eq!(got, want, "{} bound {}", r, b);
    }
}

#[test]
fn enumerate_with_face_filter_partitions() {
    for r in [s(2, 1), s(-5, 1), s(1, 2)] {
        let all = enumerate_filled(&r, 15, None).unwrap();
        let a = enumerate_filled(&r, 15, Some(FaceKind::A)).unwrap();
        let sf = enumerate_filled(&r, 15, Some(FaceKind::S)).unwrap();
        assert!(a.len() + sf.len() <= all.len());
        assert!(!a.is_empty() && !sf.is_empty(), "{}", r);
        for fc in a.iter().chain(sf.iter()) {
            assert!(all.contains(fc));
        }
    }
    let r = s(3, -2);
    assert!(enumerate_filled(&r, 15, Some(FaceKind::S)).unwrap().is_empty());
    let n = enumerate_filled(&r, 15, None).unwrap().len();
    assert!(enumerate_filled(&r, 15, Some(FaceKind::A)).unwrap().len() <= n);
}

#[test]
fn genus_five_on_slope_two() {
    let res = min_dilatation_genus(&s(2, 1), 5, true, false).unwrap();
    let f = lt_polynomial(5, 1).unwrap();
    assert_eq!(f.to_string(), "t^10 - t^6 - t^5 - t^4 + 1");
    assert!(same_root(&res.lambda, &lt_root(5, 1).unwrap()));
    assert_eq!(res.genus, BigInt::from(5));
    assert!(res.candidates_scanned > 0);
}

#[test]
fn slope_two_gives_lt_g1() {
    for g in 3..=8i64 {
        let res = min_dilatation_genus(&s(2, 1), g, true, false).unwrap();
        assert!(same_root(&res.lambda, &lt_root(g as u64, 1).unwrap()), "g={}", g);
        let fib = fiber_info(&res.best_class.lift).unwrap();
        assert!(fib.in_m);
    }
}

#[test]
fn slope_minus_half_by_residue() {
    for g in 3..=10i64 {
        let res = min_dilatation_genus(&s(1, -2), g, true, false).unwrap();
        let l = if matches!(g % 6, 2 | 5) { 1 } else { 3 };
        assert!(same_root(&res.lambda, &lt_root((g + 1) as u64, l).unwrap()), "g={}", g);
    }
}

#[test]
fn orientable_genus_seven() {
    let res = min_dilatation_genus(&s(1, -2), 7, true, true).unwrap();
    assert!(res.orientable);
    assert!(same_root(&res.lambda, &lt_root(8, 3).unwrap()));
}

#[test]
fn orientable_empty_at_multiples_of_six() {
    for r in [s(2, 1), s(3, -2), s(1, -2)] {
        for g in [6, 12] {
            let res = min_dilatation_genus(&r, g, true, true);
            assert!(matches!(res, Err(SearchError::NoClassFound)), "{} g={}", r, g);
        }
    }
    assert_eq!(SearchError::NoClassFound.to_string(), "no class found");
}

#[test]
fn search_rejects_bad_input() {
    assert!(min_dilatation_genus(&s(-1, 1), 4, true, false).is_err());
    assert!(min_dilatation_genus(&s(2, 1), 1, true, false).is_err());
}

#[test]
fn doubling_the_cap_changes_nothing() {
    for r in [s(2, 1), s(1, -2), s(3, -2)] {
        for g in 2..=8 {
            for ori in [false, true] {
                let base = SearchOptions { require_m: true, orientable_only: ori, cap_factor: 1 };
                let wide = SearchOptions { cap_factor: 2, ..base };
                match (min_dilatation_genus_with(&r, g, base), min_dilatation_genus_with(&r, g, wide)) {
                    (Ok(a), Ok(b)) => {
                        assert!(same_root(&a.lambda, &b.lambda), "{} g={}", r, g);
                        assert_eq!((a.k, a.l), (b.k, b.l));
                    }
                    (Err(SearchError::NoClassFound), Err(SearchError::NoClassFound)) => {}
                    (a, b) => panic!("{} g={} ori={}: {:?} vs {:?}", r, g, ori, a.is_ok(), b.is_ok()),
                }
            }
        }
    }
}

#[test]
fn search_result_representative_is_unprimed() {
    let res = min_dilatation_genus(&s(3, -2), 7, true, false).unwrap();
    let c = locate_cone(&res.best_class.lift);
    assert!(matches!(c, Cone::Delta | Cone::Delta1 | Cone::Delta2));
    assert!(res.best_class.lift.is_primitive());
    assert_eq!(dehn::compose(&s(3, -2), &res.k, &res.l).unwrap(), res.best_class.lift);
}

#[test]
fn lt_ordering() {
    for k in 3..=40u64 {
        for l in 1..k - 1 {
            let a = lt_root(k, l).unwrap();
            let b = lt_root(k, l + 1).unwrap();
            assert_eq!(cmp_roots(&a, &b), Ordering::Less, "({},{}) vs ({},{})", k, l, k, l + 1);
        }
    }
    for g in 2..=40u64 {
        assert_eq!(cmp_roots(&lt_root(g, 1).unwrap(), &lt_root(g + 1, 1).unwrap()), Ordering::Greater);
    }
    let l41 = lt_root(4, 1).unwrap().approx;
    let l53 = lt_root(5, 3).unwrap().approx;
    assert!((l41 - 1.2806).abs() < 1e-4);
    assert!((l53 - 1.2612).abs() < 1e-4);
}

#[test]
fn lt_examples() {
    let r21 = lt_consistency(2, 1).unwrap();
    assert!(r21.ok());
    for m in &r21.members {
        assert!((m.3.approx - 1.72208).abs() < 1e-5);
    }
    let r81 = lt_consistency(8, 1).unwrap();
    assert!(r81.ok());
    assert!(same_root(&r81.root, &lt_root(8, 1).unwrap()));
    let r53 = lt_consistency(5, 3).unwrap();
    assert!(r53.ok());
    assert!((r53.root.approx - 1.2612).abs() < 1e-4);
    assert!(lt_consistency(4, 2).is_err());
    assert!(lt_consistency(3, 3).is_err());
}

#[test]
fn lt_consistency_up_to_twelve() {
    for k in 2..=12u64 {
        for l in 1..k {
            if num_integer::gcd(k, l) != 1 {
                continue;
            }
            let rep = lt_consistency(k, l).unwrap();
            assert!(rep.ok(), "({},{})", k, l);
            assert_eq!(rep.members.len(), 6);
        }
    }
}

#[test]
fn table1_examples() {
    let rows = table1(6..=216).unwrap();
    assert_eq!(rows.len(), 36);
    let g6 = rows.iter().find(|r| r.g == 6).unwrap();
    assert_eq!(g6.class, HClass::new(10, 8, 3));
    assert!((g6.lambda.approx - 1.20189).abs() < 1e-5);
    assert!((g6.lambda_ggm1.approx - 1.22571).abs() < 1e-5);
    let g216 = rows.iter().find(|r| r.g == 216).unwrap();
    assert!((g216.lambda.approx - 1.00529).abs() < 1e-5);
    assert!((g216.lambda_ggm1.approx - 1.00610).abs() < 1e-5);
    let g18 = rows.iter().find(|r| r.g == 18).unwrap();
    assert_eq!(g18.class, HClass::new(20, 16, -9));
    assert!((g18.lambda_ggm1.approx - 1.07382).abs() < 1e-5);
    for r in &rows {
        assert_eq!(r.g % 6, 0);
        assert!(r.lambda.approx < r.lambda_ggm1.approx, "g={}", r.g);
    }
}

#[test]
fn table1_left_classes_have_the_row_genus() {
    for (g, [x, y, z]) in TABLE1_CLASSES {
        let ext = dehn::closed_extension(&HClass::new(x, y, z)).unwrap();
        assert_eq!(ext.genus, BigInt::from(g), "({},{},{})", x, y, z);
        assert!(ext.orientable);
    }
}

#[test]
fn family_examples() {
    let f0 = family_6mod12(0).unwrap();
    assert_eq!(f0.class, HClass::new(8, 4, -3));
    assert_eq!(f0.genus, BigInt::from(6));
    assert!(f0.boundary_ok);
    let (alt, lam) = f0.alternative.clone().unwrap();
    assert_eq!(alt, HClass::new(10, 8, 3));
    assert!((lam.approx - 1.20189).abs() < 1e-5);
    assert_eq!(f0.alternative_smaller, Some(true));
    for i in 0..=6 {
        let f = family_6mod12(i).unwrap();
        assert_eq!(f.genus, BigInt::from(6 + 12 * i));
        assert!(f.boundary_ok);
        let q = 3 * i;
        assert_eq!(f.class, HClass::new(4 * q + 8, 4 * q + 4, -2 * q - 3));
        let info = fiber_info(&f.class).unwrap();
        assert_eq!((info.n_alpha, info.n_beta, info.n_gamma), (1.into(), 1.into(), (2 * q + 3).into()));
    }
    assert!(family_6mod12(-1).is_err());
}

#[test]
fn whitehead_examples() {
    let w2 = whitehead_minima(2).unwrap();
    assert_eq!((w2.k, w2.l), (1, 1));
    assert_eq!(w2.polynomial.to_string(), "t^4 - 2t^3 - 2t + 1");
    let w4 = whitehead_minima(4).unwrap();
    assert_eq!((w4.k, w4.l), (3, 1));
    assert_eq!(w4.polynomial, specialize_fibered(&3.into(), &1.into(), &(-4).into()).unwrap());
    assert_eq!(w4.polynomial.to_string(), "t^8 - t^7 - t^5 - t^3 - t + 1");
    let w5 = whitehead_minima(5).unwrap();
    assert_eq!((w5.k, w5.l), (3, 2));
    assert_eq!(w5.polynomial, specialize_fibered(&3.into(), &2.into(), &(-5).into()).unwrap());
    for n in 2..=12 {
        let w = whitehead_minima(n).unwrap();
        assert!(w.confirmed(), "n={}", n);
        assert_eq!(w.genus, BigInt::from(1));
    }
    assert!(whitehead_minima(1).is_err());
}

#[test]
fn census_rows() {
    let rows = census_entropy_table().unwrap();
    let names: Vec<_> = rows.iter().map(|r| r.manifold).collect();
    assert_eq!(names, ["m003", "m004", "m009", "m010", "m011", "m016"]);
    let want = [0.9624, 0.9624, 1.3169, 1.3169, 1.2484, 1.4612];
    for (r, w) in rows.iter().zip(want) {
        assert!((r.normalized_entropy - w).abs() < 1e-4, "{}: {}", r.manifold, r.normalized_entropy);
    }
    let m011 = &rows[4];
    assert!((m011.normalized_entropy - 9.0 * homology::dilatation(&HClass::new(13, 12, 5)).unwrap().log()).abs() < 1e-12);
    assert_eq!(m011.fiber(), "Sigma_{5,1}");
    let golden = (3.0 + 5f64.sqrt()) / 2.0;
    assert!((rows[1].lambda.approx - golden).abs() < 1e-12);
    assert!((rows[2].lambda.approx - (2.0 + 3f64.sqrt())).abs() < 1e-12);
}

#[test]
fn m_is_generic_on_three_halves() {
    let r = s(3, -2);
    let eight = BigRational::from_integer(8.into());
    let mut failures = 0;
    for (k, l) in lattice_points(&r, 100).unwrap() {
        let a = dehn::compose(&r, &k, &l).unwrap();
        if locate_cone(&a) == Cone::NotFibered {
            continue;
        }
        if !fiber_info(&a).unwrap().in_m {
            failures += 1;
            let n = dehn::filled_norm_kl(&r, &BigRational::from_integer(k), &BigRational::from_integer(l)).unwrap();
            assert!(n <= eight);
        }
    }
    assert!(failures > 0);
}

#[test]
fn bound_constants() {
    assert_eq!(finite_set_constant(), BigRational::new(97999.into(), 100000.into()));
    assert_eq!(large_bunbo_constant(), BigRational::new(197475.into(), 100000.into()));
    assert_eq!(num_boundary_bound(&s(3, -2)), BigInt::from(10));
    assert_eq!(norm_cap(&s(3, -2), 5), 18);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lattice_points_are_primitive_and_bounded(p in 1i64..8, q in -5i64..6, b in 1i64..14) {
        prop_assume!(q != 0 && num_integer::gcd(p, q) == 1);
        let r = s(p, q);
        prop_assume!(dehn::is_hyperbolic_slope(&r));
        let pts = lattice_points(&r, b).unwrap();
        let bound = BigRational::from_integer(b.into());
        for (k, l) in kl(&pts) {
            prop_assert_eq!(num_integer::gcd(k, l), 1);
            prop_assert!(k > 0 || (k == 0 && l > 0));
            let n = dehn::filled_norm_kl(&r, &BigRational::from_integer(k.into()), &BigRational::from_integer(l.into())).unwrap();
            prop_assert!(n <= bound);
        }
    }

    #[test]
    fn unfilled_alpha_boundary_matches_fiber_info(x in 1i64..40, y in 1i64..40, z in -39i64..39) {
        prop_assume!(z < x && z < y);
        let a = HClass::new(x, y, z);
        prop_assume!(a.is_primitive());
        let info = fiber_info(&a).unwrap();
        prop_assert_eq!(unfilled_boundary_alpha(&a), &info.n_beta + &info.n_gamma);
    }
}
