//! Lattice searches over filled norm balls and reproduction of the tables.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use rayon::prelude::*;
use thiserror::Error;

use crate::charpoly::{
    default_tol, divides, largest_real_root, lt_polynomial, specialize_fibered, IntPoly,
    PolyError, RootEnclosure,
};
use crate::dehn::{self, compose, filling_basis, norm_ball, Cusp, DehnError, FaceKind, FilledClass};
use crate::entropy::roots_agree;
use crate::homology::{
    self, fiber_info, locate_cone, log_dilatation_real, sigma, Cone, HClass, HomologyError, Slope,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("no class found")]
    NoClassFound,
    #[error("invalid input: {0}")]
    Domain(String),
    #[error(transparent)]
    Dehn(#[from] DehnError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Primitive `(k, l)`, one per `±` pair, with filled norm of `k 𝔞_r + l 𝔟_r` at most
/// `norm_bound`. Sorted lexicographically.
pub fn lattice_points(r: &Slope, norm_bound: i64) -> Result<Vec<(BigInt, BigInt)>, DehnError> {
    let ball = norm_ball(r)?;
    let (a, b) = filling_basis(r)?;
    let to_i = |v: &BigInt| v.to_i128().expect("basis fits in i128");
    let av = [to_i(&a.x), to_i(&a.y), to_i(&a.z)];
    let bv = [to_i(&b.x), to_i(&b.y), to_i(&b.z)];
    let max_v = ball
        .vertices
        .iter()
        .flat_map(|(u, v)| [u.abs(), v.abs()])
        .max()
        .unwrap_or_else(BigRational::one);
    let reach = (BigRational::from_integer(norm_bound.into()) * max_v
        / BigRational::from_integer(ball.radius.clone()))
    .ceil()
    .to_integer()
    .to_i64()
    .unwrap_or(0);
    let bound = norm_bound as i128;
    let mut out = Vec::new();
    for k in 0..=reach {
        let l_start = if k == 0 { 1 } else { -reach };
        for l in l_start..=reach {
            if num_integer::gcd(k, l) != 1 {
                continue;
            }
            let (k1, l1) = (k as i128, l as i128);
            let x = k1 * av[0] + l1 * bv[0];
            let y = k1 * av[1] + l1 * bv[1];
            let z = k1 * av[2] + l1 * bv[2];
            let norm = (x + y - z).abs().max((z + x - y).abs()).max((y + z - x).abs());
            // y = -q (k + l), so |y / q| = |k + l|.
            if norm - (k1 + l1).abs() <= bound {
                out.push((BigInt::from(k), BigInt::from(l)));
            }
        }
    }
    Ok(out)
}

/// Filled classes of `N(r)` up to `norm_bound`, optionally restricted to one face type.
pub fn enumerate_filled(
    r: &Slope,
    norm_bound: i64,
    face_filter: Option<FaceKind>,
) -> Result<Vec<FilledClass>, DehnError> {
    let ball = norm_ball(r)?;
    let mut out = Vec::new();
    for (k, l) in lattice_points(r, norm_bound)? {
        if let Some(want) = face_filter {
            let kr = BigRational::from_integer(k.clone());
            let lr = BigRational::from_integer(l.clone());
            match ball.face_of(&kr, &lr) {
                Some(i) if ball.faces[i].kind == want => {}
                _ => continue,
            }
        }
        out.push(FilledClass::beta(r.clone(), compose(r, &k, &l)?)?);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchResult {
    pub best_class: FilledClass,
    pub k: BigInt,
    pub l: BigInt,
    pub lambda: RootEnclosure,
    pub genus: BigInt,
    pub orientable: bool,
    pub candidates_scanned: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    pub require_m: bool,
    pub orientable_only: bool,
    /// Multiplies the filled-norm cap; 1 is the boundary-count bound.
    pub cap_factor: i64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { require_m: true, orientable_only: false, cap_factor: 1 }
    }
}

/// `2g - 2 + 2(p + |q|)`.
pub fn norm_cap(r: &Slope, g: i64) -> i64 {
    let pq = (&r.p + r.q.abs()).to_i64().unwrap_or(i64::MAX / 4);
    2 * g - 2 + 2 * pq
}

/// Minimal dilatation among fibered `a ∈ S_β(r)` whose capped fiber has genus `g`.
pub fn min_dilatation_genus(
    r: &Slope,
    g: i64,
    require_m: bool,
    orientable_only: bool,
) -> Result<SearchResult, SearchError> {
    min_dilatation_genus_with(r, g, SearchOptions { require_m, orientable_only, cap_factor: 1 })
}

pub fn min_dilatation_genus_with(
    r: &Slope,
    g: i64,
    opts: SearchOptions,
) -> Result<SearchResult, SearchError> {
    if !dehn::is_hyperbolic_slope(r) {
        return Err(DehnError::NotHyperbolic(r.to_string()).into());
    }
    if g < 2 {
        return Err(SearchError::Domain(format!("genus must be at least 2, got {}", g)));
    }
    let cap = norm_cap(r, g) * opts.cap_factor;
    let pts = lattice_points(r, cap)?;
    let scanned = pts.len();
    let gb = BigInt::from(g);
    // (k, l, class, log λ estimate, orientable)
    let mut cands: Vec<(BigInt, BigInt, HClass, f64, bool)> = pts
        .into_par_iter()
        .filter_map(|(k, l)| {
            let a = compose(r, &k, &l).ok()?;
            if locate_cone(&a) == Cone::NotFibered {
                return None;
            }
            let info = fiber_info(&a).ok()?;
            if info.genus != gb || (opts.require_m && !info.in_m) {
                return None;
            }
            if opts.orientable_only && !info.orientable {
                return None;
            }
            let s = sigma(&a).ok()?;
            let (x, y, z) = s.to_f64();
            let est = log_dilatation_real(x, y, z)?;
            Some((k, l, a, est, info.orientable))
        })
        .collect();
    if cands.is_empty() {
        return Err(SearchError::NoClassFound);
    }
    let best_est = cands.iter().map(|c| c.3).fold(f64::INFINITY, f64::min);
    cands.retain(|c| c.3 <= best_est * (1.0 + 1e-9) + 1e-12);
    cands.sort_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)));
    let tol = default_tol();
    let mut best: Option<(BigInt, BigInt, HClass, RootEnclosure, bool)> = None;
    for (k, l, a, _, ori) in cands {
        let lam = homology::dilatation(&a)?;
        let better = match &best {
            None => true,
            Some((_, _, _, b, _)) => lam.hi < b.lo && !roots_agree(&lam, b, &tol),
        };
        if better {
            best = Some((k, l, a, lam, ori));
        }
    }
    let (mut k, mut l, mut a, lambda, orientable) = best.unwrap();
    // Report the representative whose lift lies in an unprimed cone.
    if matches!(locate_cone(&a), Cone::DeltaP | Cone::Delta1P | Cone::Delta2P) {
        k = -k;
        l = -l;
        a = a.neg();
    }
    Ok(SearchResult {
        best_class: FilledClass::beta(r.clone(), a)?,
        k,
        l,
        lambda,
        genus: gb,
        orientable,
        candidates_scanned: scanned,
    })
}

/// Largest real root of `f_(k,l)`.
pub fn lt_root(k: u64, l: u64) -> Result<RootEnclosure, PolyError> {
    largest_real_root(&lt_polynomial(k, l)?, &default_tol())
}

/// Left-column classes of the orientable upper-bound table, by genus.
pub const TABLE1_CLASSES: [(i64, [i64; 3]); 36] = [
    (6, [10, 8, 3]),
    (12, [12, 20, 3]),
    (18, [20, 16, -9]),
    (24, [32, 28, 3]),
    (30, [46, 44, 15]),
    (36, [50, 52, 15]),
    (42, [64, 62, 21]),
    (48, [66, 68, 19]),
    (54, [82, 80, 27]),
    (60, [80, 76, 15]),
    (66, [68, 64, -33]),
    (72, [96, 92, 19]),
    (78, [118, 116, 39]),
    (84, [114, 116, 31]),
    (90, [136, 134, 45]),
    (96, [132, 140, 43]),
    (102, [104, 100, -51]),
    (108, [146, 148, 39]),
    (114, [172, 170, 57]),
    (120, [164, 172, 51]),
    (126, [190, 188, 63]),
    (132, [174, 164, 31]),
    (138, [208, 206, 69]),
    (144, [194, 196, 51]),
    (150, [152, 148, -75]),
    (156, [210, 212, 55]),
    (162, [244, 242, 81]),
    (168, [228, 236, 67]),
    (174, [262, 260, 87]),
    (180, [240, 236, 55]),
    (186, [188, 184, -93]),
    (192, [258, 260, 67]),
    (198, [298, 296, 99]),
    (204, [276, 284, 79]),
    (210, [316, 314, 105]),
    (216, [290, 292, 75]),
];

#[derive(Clone, Debug, PartialEq)]
pub struct Table1Row {
    pub g: i64,
    pub class: HClass,
    pub lambda: RootEnclosure,
    pub lambda_ggm1: RootEnclosure,
}

pub fn table1(g_range: std::ops::RangeInclusive<i64>) -> Result<Vec<Table1Row>, SearchError> {
    let rows: Vec<_> = TABLE1_CLASSES.iter().filter(|(g, _)| g_range.contains(g)).collect();
    rows.into_par_iter()
        .map(|&(g, [x, y, z])| {
            let class = HClass::new(x, y, z);
            let lambda = homology::dilatation(&class)?;
            let lambda_ggm1 = homology::dilatation(&HClass::new(g, g, -1))?;
            Ok(Table1Row { g, class, lambda, lambda_ggm1 })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct FamilyResult {
    pub i: i64,
    pub genus: BigInt,
    pub class: HClass,
    pub lambda: RootEnclosure,
    pub closed_ent: f64,
    pub boundary_ok: bool,
    /// The competing class for genera `≡ 6, 30, 42, 54, 78 (mod 84)`, or
    /// `(g+2, g-2, -g/2)` for `≡ 18, 66 (mod 84)`.
    pub alternative: Option<(HClass, RootEnclosure)>,
    pub alternative_smaller: Option<bool>,
}

/// `a_q = (4q+8, 4q+4, -2q-3)` with `q = 3i`, whose capped fiber has genus `6 + 12i`.
pub fn family_6mod12(i: i64) -> Result<FamilyResult, SearchError> {
    if i < 0 {
        return Err(SearchError::Domain("i must be non-negative".into()));
    }
    let q = 3 * i;
    let class = HClass::new(4 * q + 8, 4 * q + 4, -2 * q - 3);
    let info = fiber_info(&class)?;
    let g = 6 + 12 * i;
    let boundary_ok = info.genus == BigInt::from(g)
        && info.n_alpha.is_one()
        && info.n_beta.is_one()
        && info.n_gamma == BigInt::from(2 * q + 3);
    let closed = dehn::closed_extension(&class)?;
    let lambda = closed.lambda.clone();
    let alternative = match g.rem_euclid(84) {
        6 | 30 | 42 | 54 | 78 => {
            let qq = (g - 2) / 4;
            Some(HClass::new(6 * qq + 4, 6 * qq + 2, 2 * qq + 1))
        }
        18 | 66 => Some(HClass::new(g + 2, g - 2, -g / 2)),
        _ => None,
    };
    let alternative = match alternative {
        Some(a) => {
            let lam = homology::dilatation(&a)?;
            Some((a, lam))
        }
        None => None,
    };
    let alternative_smaller = alternative.as_ref().map(|(_, l)| l.hi < lambda.lo);
    Ok(FamilyResult {
        i,
        genus: info.genus,
        class,
        lambda,
        closed_ent: closed.ent,
        boundary_ok,
        alternative,
        alternative_smaller,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct WhiteheadResult {
    pub n: i64,
    pub k: i64,
    pub l: i64,
    pub class: FilledClass,
    pub polynomial: IntPoly,
    pub formula_polynomial: IntPoly,
    pub lambda: RootEnclosure,
    /// Brute-force minimizers over coprime `k + l = n` (ties included).
    pub brute_force_minimizers: Vec<(i64, i64)>,
    pub holes: BigInt,
    pub genus: BigInt,
}

impl WhiteheadResult {
    pub fn confirmed(&self) -> bool {
        self.polynomial == self.formula_polynomial
            && self.brute_force_minimizers.contains(&(self.k, self.l))
    }
}

/// The class of `𝒲_n` with minimal dilatation and the triple whose polynomial it carries.
pub fn whitehead_formula(n: i64) -> Option<((i64, i64), [i64; 3])> {
    if n < 2 {
        return None;
    }
    if n == 2 {
        return Some(((1, 1), [1, 1, -2]));
    }
    if n % 2 == 1 {
        let k = (n + 1) / 2;
        return Some(((k, k - 1), [k, k - 1, -2 * k + 1]));
    }
    if n % 4 == 0 {
        let k = n / 4;
        return Some(((2 * k + 1, 2 * k - 1), [2 * k + 1, 2 * k - 1, -4 * k]));
    }
    let k = (n - 2) / 4;
    Some(((2 * k + 3, 2 * k - 1), [2 * k + 3, 2 * k - 1, -4 * k - 2]))
}

pub fn whitehead_minima(n: i64) -> Result<WhiteheadResult, SearchError> {
    let ((k, l), [x, y, z]) =
        whitehead_formula(n).ok_or_else(|| SearchError::Domain("n must be at least 2".into()))?;
    let r = Slope::new(1, 1);
    let lift = compose(&r, &k.into(), &l.into())?;
    let class = FilledClass::beta(r.clone(), lift.clone())?;
    let polynomial = homology::class_polynomial(&lift)?;
    let formula_polynomial = specialize_fibered(&x.into(), &y.into(), &z.into())?;
    let lambda = homology::dilatation(&lift)?;
    let filled = dehn::filled_fiber(&class)?;

    let tol = default_tol();
    let mut all: Vec<((i64, i64), RootEnclosure)> = Vec::new();
    for kk in 1..n {
        let ll = n - kk;
        if num_integer::gcd(kk, ll) != 1 {
            continue;
        }
        let a = compose(&r, &kk.into(), &ll.into())?;
        all.push(((kk, ll), homology::dilatation(&a)?));
    }
    let min = all
        .iter()
        .min_by(|a, b| a.1.lo.cmp(&b.1.lo))
        .map(|(_, e)| e.clone())
        .ok_or(SearchError::NoClassFound)?;
    let brute_force_minimizers =
        all.iter().filter(|(_, e)| roots_agree(e, &min, &tol)).map(|(kl, _)| *kl).collect();
    Ok(WhiteheadResult {
        n,
        k,
        l,
        class,
        polynomial,
        formula_polynomial,
        lambda,
        brute_force_minimizers,
        holes: filled.boundary,
        genus: filled.genus,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct LtReport {
    pub k: u64,
    pub l: u64,
    pub root: RootEnclosure,
    /// The six classes with the slope of the sublattice that contains each.
    pub members: Vec<(HClass, Cusp, Slope, RootEnclosure, bool)>,
    pub roots_agree: bool,
    pub all_divide: bool,
}

impl LtReport {
    pub fn ok(&self) -> bool {
        self.roots_agree && self.all_divide
    }
}

/// Checks that `f_(k,l)` divides the polynomials of its six specializing classes and
/// shares their largest root.
pub fn lt_consistency(k: u64, l: u64) -> Result<LtReport, SearchError> {
    if l == 0 || l >= k || num_integer::gcd(k, l) != 1 {
        return Err(SearchError::Domain(format!("need coprime 0 < l < k, got ({}, {})", k, l)));
    }
    let f = lt_polynomial(k, l)?;
    let tol = default_tol();
    let root = largest_real_root(&f, &tol)?;
    let (k, l) = (k as i64, l as i64);
    let members = [
        (HClass::new(2 * k + l, 2 * k + 2 * l, k + 2 * l), Cusp::Beta, Slope::new(3, -2)),
        (HClass::new(2 * k - l, 2 * k - 2 * l, k - 2 * l), Cusp::Beta, Slope::new(3, -2)),
        (HClass::new(k, 2 * k + 2 * l, l), Cusp::Beta, Slope::new(1, -2)),
        (HClass::new(k, 2 * k - 2 * l, -l), Cusp::Beta, Slope::new(1, -2)),
        (HClass::new(k + l, k - l, -k), Cusp::Gamma, Slope::new(2, 1)),
        (HClass::new(k - l, k + l, -k), Cusp::Gamma, Slope::new(2, 1)),
    ];
    let mut out = Vec::new();
    let mut agree = true;
    let mut all_divide = true;
    for (a, cusp, s) in members {
        let poly = homology::class_polynomial(&a)?;
        let lam = largest_real_root(&poly, &tol)?;
        let div = divides(&f, &poly)?;
        agree &= roots_agree(&lam, &root, &tol);
        all_divide &= div && dehn::in_s_set(cusp, &s, &a);
        out.push((a, cusp, s, lam, div));
    }
    Ok(LtReport { k: k as u64, l: l as u64, root, members: out, roots_agree: agree, all_divide })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CensusRow {
    pub manifold: &'static str,
    pub filling: &'static str,
    pub fiber_genus: i64,
    pub fiber_punctures: i64,
    pub polynomial: IntPoly,
    pub lambda: RootEnclosure,
    pub entropy: f64,
    pub normalized_entropy: f64,
}

impl CensusRow {
    pub fn fiber(&self) -> String {
        format!("Sigma_{{{},{}}}", self.fiber_genus, self.fiber_punctures)
    }
}

/// The fibered one-cusped manifolds obtained by filling two cusps of `N`.
pub fn census_entropy_table() -> Result<Vec<CensusRow>, SearchError> {
    let tol = default_tol();
    let mut rows = Vec::new();
    // Once-punctured torus bundles: monodromies with traces 3 and 4.
    let torus = [
        ("m003", "N(1,-4)", 3i64),
        ("m004", "N(1,2)", 3),
        ("m009", "N(1,3)", 4),
        ("m010", "N(1,-5)", 4),
    ];
    for (m, filling, trace) in torus {
        let poly = IntPoly::from_coeffs(&[1, -trace, 1]);
        let lambda = largest_real_root(&poly, &tol)?;
        let e = lambda.log();
        rows.push(CensusRow {
            manifold: m,
            filling,
            fiber_genus: 1,
            fiber_punctures: 1,
            polynomial: poly,
            lambda,
            entropy: e,
            normalized_entropy: e,
        });
    }
    for (m, filling, a) in [
        ("m011", "N(3/-2,-5)", HClass::new(13, 12, 5)),
        ("m016", "N(3/-2,8/-3)", HClass::new(18, 22, 15)),
    ] {
        let info = fiber_info(&a)?;
        // β and γ are filled; the α boundary remains.
        let punctures = info.n_alpha.to_i64().unwrap();
        let genus = info.genus.to_i64().unwrap();
        let chi = 2 * genus - 2 + punctures;
        let poly = homology::class_polynomial(&a)?;
        let lambda = largest_real_root(&poly, &tol)?;
        let e = lambda.log();
        rows.push(CensusRow {
            manifold: m,
            filling,
            fiber_genus: genus,
            fiber_punctures: punctures,
            polynomial: poly,
            lambda,
            entropy: e,
            normalized_entropy: chi as f64 * e,
        });
    }
    Ok(rows)
}

/// `1 - 1/50 - 1/100000`, the constant bounding the finite slope set.
pub fn finite_set_constant() -> BigRational {
    BigRational::one()
        - BigRational::new(1.into(), 50.into())
        - BigRational::new(1.into(), 100000.into())
}

/// `(3/4) · 2.633`, the threshold used for large denominators.
pub fn large_bunbo_constant() -> BigRational {
    BigRational::new(3.into(), 4.into()) * BigRational::new(2633.into(), 1000.into())
}

/// Boundary components off the filled cusp for `a ∈ S_α(p/q)`:
/// `gcd(y, z+x) + gcd(z, x+y)`.
pub fn unfilled_boundary_alpha(a: &HClass) -> BigInt {
    a.y.gcd(&(&a.z + &a.x)) + a.z.gcd(&(&a.x + &a.y))
}

pub fn num_boundary_bound(r: &Slope) -> BigInt {
    BigInt::from(2) * (&r.p + r.q.abs())
}

/// Orders two enclosures, treating overlapping brackets as equal.
pub fn cmp_roots(a: &RootEnclosure, b: &RootEnclosure) -> Ordering {
    if a.hi < b.lo {
        Ordering::Less
    } else if b.hi < a.lo {
        Ordering::Greater
    } else {
        Ordering::Equal
    }
}
