//! Minimal normalized entropy on the fibered faces of `N(r)`.
//!
//! S-faces have a closed form at the center of `int(Δ) ∩ S_γ(r)`. A-faces are
//! minimized numerically over `int(Δ) ∩ S_β(r)` where the objective is convex.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::charpoly::{default_tol, RootEnclosure};
use crate::dehn::{
    self, compose, face_kind_of_lift, filled_norm_kl, has_s_faces, is_hyperbolic_slope,
    partner_slope, Cusp, DehnError, FaceKind,
};
use crate::homology::{self, face_ent_f64, thurston_norm, FacePoint, HClass, Slope};

/// Parameter bracket used when none is given.
pub const DEFAULT_PARAM_TOL: f64 = 1e-10;
/// Largest denominator of the rational witness on a segment.
pub const WITNESS_DENOM_CAP: u64 = 1_000_000;

/// The part of `S_cusp(r)` inside the closed face, as a segment between two
/// boundary points of Δ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SegmentOnDelta {
    pub cusp: Cusp,
    pub slope: Slope,
    pub start: (BigRational, BigRational),
    pub end: (BigRational, BigRational),
}

impl SegmentOnDelta {
    pub fn point_at(&self, t: &BigRational) -> (BigRational, BigRational) {
        (
            &self.start.0 + t * (&self.end.0 - &self.start.0),
            &self.start.1 + t * (&self.end.1 - &self.start.1),
        )
    }

    fn point_at_f64(&self, t: f64) -> (f64, f64) {
        let f = |v: &BigRational| v.to_f64().unwrap_or(f64::NAN);
        let (x0, y0, x1, y1) = (f(&self.start.0), f(&self.start.1), f(&self.end.0), f(&self.end.1));
        (x0 + t * (x1 - x0), y0 + t * (y1 - y0))
    }
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// The line `A x + B y = C` of `S_cusp(r)` in face coordinates `[x, y]`.
fn face_line(cusp: Cusp, r: &Slope) -> (BigRational, BigRational, BigRational) {
    let p = BigRational::from_integer(r.p.clone());
    let q = BigRational::from_integer(r.q.clone());
    let two = rat(2);
    match cusp {
        // p x + q (x + 2y - 1) = 0
        Cusp::Alpha => (&p + &q, &two * &q, q.clone()),
        // p y + q (2x + y - 1) = 0
        Cusp::Beta => (&two * &q, &p + &q, q.clone()),
        // p (x + y - 1) + q (x + y) = 0
        Cusp::Gamma => (&p + &q, &p + &q, p.clone()),
    }
}

/// Clips the `S_cusp(r)` line to the unit square.
pub fn segment(cusp: Cusp, r: &Slope) -> Result<SegmentOnDelta, DehnError> {
    if !is_hyperbolic_slope(r) {
        return Err(DehnError::NotHyperbolic(r.to_string()));
    }
    let (a, b, c) = face_line(cusp, r);
    let zero = BigRational::zero();
    let one = BigRational::one();
    let in_unit = |v: &BigRational| *v >= zero && *v <= one;
    let mut pts: Vec<(BigRational, BigRational)> = Vec::new();
    for xv in [&zero, &one] {
        if !b.is_zero() {
            let y = (&c - &a * xv) / &b;
            if in_unit(&y) {
                pts.push((xv.clone(), y));
            }
        }
    }
    for yv in [&zero, &one] {
        if !a.is_zero() {
            let x = (&c - &b * yv) / &a;
            if in_unit(&x) {
                pts.push((x, yv.clone()));
            }
        }
    }
    pts.sort();
    pts.dedup();
    if pts.len() != 2 {
        return Err(DehnError::SlopeRange(r.to_string()));
    }
    // Start from the point with y = 0 when there is one, matching the usual tables.
    if pts[1].1.is_zero() && !pts[0].1.is_zero() {
        pts.swap(0, 1);
    }
    let end = pts.pop().unwrap();
    let start = pts.pop().unwrap();
    Ok(SegmentOnDelta { cusp, slope: r.clone(), start, end })
}

#[derive(Clone, Debug, PartialEq)]
pub struct MinEntResult {
    pub value: f64,
    pub witness: FacePoint,
    pub face: FaceKind,
    pub certified_width: f64,
}

/// Best rational approximation of `v` in `[0, 1]` with denominator at most `cap`.
pub fn rational_near(v: f64, cap: u64) -> BigRational {
    let v = v.clamp(0.0, 1.0);
    let (mut p0, mut q0, mut p1, mut q1) = (0u64, 1u64, 1u64, 0u64);
    let mut x = v;
    loop {
        let a = x.floor();
        if a > cap as f64 {
            break;
        }
        let a = a as u64;
        let q2 = q0.saturating_add(a.saturating_mul(q1));
        if q2 > cap {
            // Best semiconvergent below the cap versus the last convergent.
            let k = (cap - q0) / q1;
            let (ps, qs) = (p0 + k * p1, q0 + k * q1);
            let ds = (ps as f64 / qs as f64 - v).abs();
            let dc = (p1 as f64 / q1 as f64 - v).abs();
            if ds < dc {
                return BigRational::new(ps.into(), qs.into());
            }
            break;
        }
        let p2 = p0 + a * p1;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let frac = x - a as f64;
        if frac <= 1e-18 {
            break;
        }
        x = 1.0 / frac;
    }
    BigRational::new(p1.into(), q1.into())
}

/// Golden-section search for the minimum of a convex function on `(0, 1)`.
/// Returns `(argmin, bracket width)`.
pub fn minimize_convex<F: Fn(f64) -> f64>(f: F, param_tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.0f64, 1.0f64);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > param_tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        if c == d {
            break;
        }
    }
    (0.5 * (a + b), b - a)
}

fn inf_if_none(v: Option<f64>) -> f64 {
    v.unwrap_or(f64::INFINITY)
}

/// Weighted entropy `w([x,y]) · log λ_[x,y]` along a segment.
fn minimize_on_segment<W>(seg: &SegmentOnDelta, weight: W, param_tol: f64) -> (FacePoint, f64, f64)
where
    W: Fn(f64, f64) -> f64,
{
    let objective = |t: f64| {
        let (x, y) = seg.point_at_f64(t);
        let w = weight(x, y);
        w * inf_if_none(face_ent_f64(x, y))
    };
    let (t, width) = minimize_convex(objective, param_tol);
    let tr = rational_near(t, WITNESS_DENOM_CAP);
    let (x, y) = seg.point_at(&tr);
    let fp = FacePoint::new(x, y).expect("minimizer on the open segment");
    let (xf, yf) = fp.to_f64();
    let value = weight(xf, yf) * inf_if_none(face_ent_f64(xf, yf));
    (fp, value, width)
}

/// Closed form `(1 - 1/(p+q)) log λ_[c,c]`, `c = p/(2p+2q)`.
pub fn min_ent_s(r: &Slope) -> Result<MinEntResult, DehnError> {
    if !is_hyperbolic_slope(r) {
        return Err(DehnError::NotHyperbolic(r.to_string()));
    }
    if !has_s_faces(r) {
        return Err(DehnError::NoSFaces(r.to_string()));
    }
    if !dehn::face_satisfies_star(r, FaceKind::S)? {
        return Err(DehnError::StarViolated);
    }
    let pq = &r.p + &r.q;
    // The center ray is spanned by (p, p, -2q).
    let mut a0 = HClass::new(r.p.clone(), r.p.clone(), -BigInt::from(2) * &r.q);
    let g = a0.content();
    a0 = HClass::new(&a0.x / &g, &a0.y / &g, &a0.z / &g);
    let lam = homology::dilatation(&a0)?;
    let ent_center = thurston_norm(&a0).to_f64().unwrap() * lam.log();
    let factor = 1.0 - 1.0 / pq.to_f64().unwrap();
    let c = BigRational::new(r.p.clone(), BigInt::from(2) * &pq);
    Ok(MinEntResult {
        value: factor * ent_center,
        witness: FacePoint::new(c.clone(), c).expect("center lies in the open face"),
        face: FaceKind::S,
        certified_width: 0.0,
    })
}

/// Minimizes `(1 - |y/q|) log λ_[x,y]` over `int(Δ) ∩ S_β(r)`.
pub fn min_ent_a(r: &Slope, param_tol: f64) -> Result<MinEntResult, DehnError> {
    if !is_hyperbolic_slope(r) {
        return Err(DehnError::NotHyperbolic(r.to_string()));
    }
    if !dehn::face_satisfies_star(r, FaceKind::A)? {
        return Err(DehnError::StarViolated);
    }
    let seg = segment(Cusp::Beta, r)?;
    let q = r.q.to_f64().unwrap().abs();
    let (witness, value, width) = minimize_on_segment(&seg, |_, y| 1.0 - (y / q).abs(), param_tol);
    Ok(MinEntResult { value, witness, face: FaceKind::A, certified_width: width })
}

/// The same minimum computed over `int(Δ) ∩ S_α(r)` with weight `1 - |x/q|`.
pub fn min_ent_a_alpha(r: &Slope, param_tol: f64) -> Result<MinEntResult, DehnError> {
    if !is_hyperbolic_slope(r) {
        return Err(DehnError::NotHyperbolic(r.to_string()));
    }
    if !dehn::face_satisfies_star(r, FaceKind::A)? {
        return Err(DehnError::StarViolated);
    }
    let seg = segment(Cusp::Alpha, r)?;
    let q = r.q.to_f64().unwrap().abs();
    let (witness, value, width) = minimize_on_segment(&seg, |x, _| 1.0 - (x / q).abs(), param_tol);
    Ok(MinEntResult { value, witness, face: FaceKind::A, certified_width: width })
}

/// Runs the numerical minimizer on the S-face segment; it should land on the center.
pub fn min_ent_s_numeric(r: &Slope, param_tol: f64) -> Result<MinEntResult, DehnError> {
    if !has_s_faces(r) {
        return Err(DehnError::NoSFaces(r.to_string()));
    }
    let seg = segment(Cusp::Gamma, r)?;
    let pq = (&r.p + &r.q).to_f64().unwrap();
    let factor = 1.0 - 1.0 / pq;
    let (witness, value, width) = minimize_on_segment(&seg, |_, _| factor, param_tol);
    Ok(MinEntResult { value, witness, face: FaceKind::S, certified_width: width })
}

pub fn min_ent(r: &Slope, face: FaceKind) -> Result<MinEntResult, DehnError> {
    match face {
        FaceKind::S => min_ent_s(r),
        FaceKind::A => min_ent_a(r, DEFAULT_PARAM_TOL),
    }
}

/// `min Ent(N) = 2 log(2 + √3)`, attained at `[1/2, 1/2]`.
pub fn min_ent_magic() -> MinEntResult {
    let a = HClass::new(1, 1, 0);
    let lam = homology::dilatation(&a).expect("(1,1,0) is fibered");
    let half = BigRational::new(1.into(), 2.into());
    MinEntResult {
        value: 2.0 * lam.log(),
        witness: FacePoint::new(half.clone(), half).unwrap(),
        face: FaceKind::A,
        certified_width: 0.0,
    }
}

/// Checks midpoint convexity of `F` on sampled triples of the A-segment.
pub fn convexity_probe(r: &Slope, samples: usize) -> Result<bool, DehnError> {
    let seg = segment(Cusp::Beta, r)?;
    let q = r.q.to_f64().unwrap().abs();
    let f = |t: f64| {
        let (x, y) = seg.point_at_f64(t);
        (1.0 - (y / q).abs()) * inf_if_none(face_ent_f64(x, y))
    };
    for i in 1..samples {
        for j in 1..(samples - i).min(8) {
            let t1 = i as f64 / samples as f64;
            let t3 = (i + 2 * j) as f64 / samples as f64;
            if t3 >= 1.0 {
                continue;
            }
            let t2 = 0.5 * (t1 + t3);
            let (a, b, c) = (f(t1), f(t2), f(t3));
            if b > 0.5 * (a + c) + 1e-12 * b.abs() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Debug)]
pub struct MonotonicityReport {
    pub entries: Vec<(Slope, f64, f64)>,
    pub ok: bool,
    pub first_failure: Option<String>,
}

/// Along slopes `p/q` with fixed `q`, A-face minima increase with `|1 + p/q|`.
pub fn verify_monotonicity(q: i64, p_list: &[i64]) -> Result<MonotonicityReport, DehnError> {
    let mut entries = Vec::new();
    for &p in p_list {
        let r = Slope::new(p, q);
        let key = (1.0 + p as f64 / q as f64).abs();
        let v = min_ent_a(&r, DEFAULT_PARAM_TOL)?.value;
        entries.push((r, key, v));
    }
    let mut first_failure = None;
    'outer: for i in 0..entries.len() {
        for j in 0..entries.len() {
            let (ri, ki, vi) = &entries[i];
            let (rj, kj, vj) = &entries[j];
            let bad = if (ki - kj).abs() < 1e-15 {
                (vi - vj).abs() > 1e-9
            } else {
                ki < kj && !(vi < vj)
            };
            if bad {
                first_failure = Some(format!("{} ({}) vs {} ({})", ri, vi, rj, vj));
                break 'outer;
            }
        }
    }
    Ok(MonotonicityReport { ok: first_failure.is_none(), entries, first_failure })
}

/// True when two certified enclosures agree within `2 tol`.
pub fn roots_agree(a: &RootEnclosure, b: &RootEnclosure, tol: &BigRational) -> bool {
    let slack = tol * BigRational::from_integer(2.into());
    a.lo <= &b.hi + &slack && b.lo <= &a.hi + &slack
}

#[derive(Clone, Debug)]
pub struct EquivalenceReport {
    pub slope: Slope,
    pub partner: Slope,
    pub checked: usize,
    pub ok: bool,
    pub first_failure: Option<String>,
}

/// The map `k 𝔞_r + l 𝔟_r -> k 𝔞_{r'} + l 𝔟_{r'}` with `r' = -2 - r` preserves the
/// filled norm, and the dilatation of fibered classes.
pub fn verify_entropy_equivalence(
    r: &Slope,
    sample_count: usize,
    norm_bound: i64,
) -> Result<EquivalenceReport, DehnError> {
    let rv = r.value().ok_or_else(|| DehnError::NotHyperbolic(r.to_string()))?;
    if !is_hyperbolic_slope(r) || rv >= rat(-1) {
        return Err(DehnError::SlopeRange(r.to_string()));
    }
    if r.q.abs().is_one() || (&r.p + BigInt::from(2) * &r.q).is_one() {
        return Err(DehnError::StarViolated);
    }
    let rp = partner_slope(r);
    let tol = default_tol();
    let pts = crate::search::lattice_points(r, norm_bound)?;
    let stride = (pts.len() / sample_count.max(1)).max(1);
    let mut checked = 0;
    for (k, l) in pts.into_iter().step_by(stride).take(sample_count) {
        let kr = BigRational::from_integer(k.clone());
        let lr = BigRational::from_integer(l.clone());
        let n1 = filled_norm_kl(r, &kr, &lr)?;
        let n2 = filled_norm_kl(&rp, &kr, &lr)?;
        if n1 != n2 {
            return Ok(failure(r, &rp, checked, format!("norm differs at ({},{}): {} vs {}", k, l, n1, n2)));
        }
        let a1 = compose(r, &k, &l)?;
        let a2 = compose(&rp, &k, &l)?;
        let f1 = face_kind_of_lift(&a1);
        let f2 = face_kind_of_lift(&a2);
        if f1.is_some() != f2.is_some() {
            return Ok(failure(r, &rp, checked, format!("fiberedness differs at ({},{})", k, l)));
        }
        if f1.is_some() {
            let l1 = homology::dilatation(&a1)?;
            let l2 = homology::dilatation(&a2)?;
            if !roots_agree(&l1, &l2, &tol) {
                return Ok(failure(
                    r,
                    &rp,
                    checked,
                    format!("dilatation differs at ({},{}): {} vs {}", k, l, l1.approx, l2.approx),
                ));
            }
        }
        checked += 1;
    }
    Ok(EquivalenceReport { slope: r.clone(), partner: rp, checked, ok: true, first_failure: None })
}

fn failure(r: &Slope, rp: &Slope, checked: usize, msg: String) -> EquivalenceReport {
    EquivalenceReport { slope: r.clone(), partner: rp.clone(), checked, ok: false, first_failure: Some(msg) }
}

#[derive(Clone, Debug)]
pub struct InvolutionEntry {
    pub k: i64,
    pub l: i64,
    pub plus: HClass,
    pub minus: HClass,
    pub lambda_plus: Option<RootEnclosure>,
    pub lambda_minus: Option<RootEnclosure>,
    pub equal: bool,
}

#[derive(Clone, Debug)]
pub struct InvolutionReport {
    pub entries: Vec<InvolutionEntry>,
    pub ok: bool,
    pub first_failure: Option<String>,
}

/// Compares the dilatations of the lifts of `k 𝔞_1 ± l 𝔟_1` for coprime `k, l` with
/// `k + l <= bound`.
pub fn verify_whitehead_involution(bound: i64) -> InvolutionReport {
    let r = Slope::new(1, 1);
    let tol = default_tol();
    let mut entries = Vec::new();
    let mut first_failure = None;
    for n in 2..=bound {
        for k in 1..n {
            let l = n - k;
            if num_integer::gcd(k, l) != 1 {
                continue;
            }
            let plus = compose(&r, &k.into(), &l.into()).unwrap();
            let minus = compose(&r, &k.into(), &(-l).into()).unwrap();
            let lp = homology::dilatation(&plus).ok();
            let lm = homology::dilatation(&minus).ok();
            let equal = match (&lp, &lm) {
                (Some(a), Some(b)) => roots_agree(a, b, &tol),
                _ => false,
            };
            if !equal && first_failure.is_none() {
                first_failure = Some(format!(
                    "k={}, l={}: λ{} = {} vs λ{} = {}",
                    k,
                    l,
                    plus,
                    lp.as_ref().map(|e| e.approx.to_string()).unwrap_or_else(|| "not fibered".into()),
                    minus,
                    lm.as_ref().map(|e| e.approx.to_string()).unwrap_or_else(|| "not fibered".into()),
                ));
            }
            entries.push(InvolutionEntry { k, l, plus, minus, lambda_plus: lp, lambda_minus: lm, equal });
        }
    }
    InvolutionReport { ok: first_failure.is_none(), entries, first_failure }
}

/// `Ent` of a face point computed exactly through its primitive integral class.
pub fn face_ent_exact(p: &FacePoint) -> Result<f64, DehnError> {
    Ok(homology::normalized_entropy(&p.class())?)
}

/// `|y/q|` for the S_β weight, exact.
pub fn beta_weight(r: &Slope, p: &FacePoint) -> BigRational {
    BigRational::one() - (&p.y / BigRational::from_integer(r.q.clone())).abs()
}
