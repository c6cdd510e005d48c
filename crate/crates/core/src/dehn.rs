//! Dehn fillings `N(r)` of the β cusp: the sublattices `S_•(r)`, the filling basis
//! `(𝔞_r, 𝔟_r)`, filled norms, norm-ball polygons with A/S face labels, and the
//! fiber data that survives the filling.
//!
//! Fillings of α and γ are carried to β by the cusp-permuting maps
//! `(x, y, z) -> (z, x, y)` and `(x, y, z) -> (y, z, x)`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::charpoly::RootEnclosure;
use crate::homology::{
    self, fiber_info, locate_cone, thurston_norm, thurston_norm_rational, Cone, HClass,
    HomologyError, RClass, Slope,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DehnError {
    #[error("slope {0} is not hyperbolic")]
    NotHyperbolic(String),
    #[error("class {0} does not satisfy the S-set equation for slope {1} at cusp {2}")]
    NotInSSet(String, String, &'static str),
    #[error("slope {0} has no S-faces")]
    NoSFaces(String),
    #[error("slope {0} is outside the range of this formula")]
    SlopeRange(String),
    #[error("face violates (*): dilatation may drop under filling; unsupported")]
    StarViolated,
    #[error("class {0} is not in the open cone of a fibered face")]
    NotFibered(String),
    #[error("degenerate closed surface: norm {0} does not exceed boundary count {1}")]
    Degenerate(String, String),
    #[error("monodromy of {0} has a 1-pronged boundary component")]
    NotInM(String),
    #[error(transparent)]
    Homology(#[from] HomologyError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Cusp {
    Alpha,
    Beta,
    Gamma,
}

impl Cusp {
    pub fn name(self) -> &'static str {
        match self {
            Cusp::Alpha => "alpha",
            Cusp::Beta => "beta",
            Cusp::Gamma => "gamma",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FaceKind {
    A,
    S,
}

impl fmt::Display for FaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FaceKind::A => "A",
            FaceKind::S => "S",
        })
    }
}

impl std::str::FromStr for FaceKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "A" | "a" => Ok(FaceKind::A),
            "S" | "s" => Ok(FaceKind::S),
            _ => Err(format!("face must be A or S, got {:?}", s)),
        }
    }
}

fn q_of(r: &Slope) -> BigRational {
    BigRational::from_integer(r.q.clone())
}

fn rat(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

/// `r` is a finite rational outside `{-3, -2, -1, 0}`.
pub fn is_hyperbolic_slope(r: &Slope) -> bool {
    if r.is_infinite() {
        return false;
    }
    if r.p.is_zero() {
        return false;
    }
    !(r.q == -BigInt::one() && r.p <= BigInt::from(3))
}

fn require_hyperbolic(r: &Slope) -> Result<(), DehnError> {
    if is_hyperbolic_slope(r) {
        Ok(())
    } else {
        Err(DehnError::NotHyperbolic(r.to_string()))
    }
}

/// `p · coord + q · (sum of the other two) = 0` for the given cusp.
pub fn in_s_set(cusp: Cusp, r: &Slope, a: &HClass) -> bool {
    let (c, rest) = match cusp {
        Cusp::Alpha => (&a.x, &a.y + &a.z),
        Cusp::Beta => (&a.y, &a.z + &a.x),
        Cusp::Gamma => (&a.z, &a.x + &a.y),
    };
    (&r.p * c + &r.q * rest).is_zero()
}

/// Carries a class in `S_cusp(r)` to `S_β(r)`.
pub fn to_beta(cusp: Cusp, a: &HClass) -> HClass {
    match cusp {
        Cusp::Beta => a.clone(),
        Cusp::Alpha => a.rotate(),
        Cusp::Gamma => a.rotate_back(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilledClass {
    pub cusp: Cusp,
    pub slope: Slope,
    pub lift: HClass,
}

impl FilledClass {
    pub fn new(cusp: Cusp, slope: Slope, lift: HClass) -> Result<Self, DehnError> {
        if !in_s_set(cusp, &slope, &lift) {
            return Err(DehnError::NotInSSet(lift.to_string(), slope.to_string(), cusp.name()));
        }
        Ok(FilledClass { cusp, slope, lift })
    }

    pub fn beta(slope: Slope, lift: HClass) -> Result<Self, DehnError> {
        Self::new(Cusp::Beta, slope, lift)
    }
}

/// `(𝔞_r, 𝔟_r)`, a basis of `S_β(r)`.
pub fn filling_basis(r: &Slope) -> Result<(HClass, HClass), DehnError> {
    require_hyperbolic(r)?;
    let p = &r.p;
    let mq = -&r.q;
    let two = BigInt::from(2);
    if p.is_odd() {
        let h1: BigInt = (p + 1) / &two;
        let h0: BigInt = (p - 1) / &two;
        Ok((
            HClass::new(h1.clone(), mq.clone(), h0.clone()),
            HClass::new(h0, mq, h1),
        ))
    } else {
        let h = p / &two;
        Ok((HClass::new(&h + 1, mq.clone(), &h - 1), HClass::new(h.clone(), mq, h)))
    }
}

pub fn compose(r: &Slope, k: &BigInt, l: &BigInt) -> Result<HClass, DehnError> {
    let (a, b) = filling_basis(r)?;
    Ok(a.scale(k).add(&b.scale(l)))
}

/// Coordinates `(k, l)` with `a = k 𝔞_r + l 𝔟_r`.
pub fn decompose(r: &Slope, a: &HClass) -> Result<(BigInt, BigInt), DehnError> {
    require_hyperbolic(r)?;
    if !in_s_set(Cusp::Beta, r, a) {
        return Err(DehnError::NotInSSet(a.to_string(), r.to_string(), Cusp::Beta.name()));
    }
    let (_, b) = filling_basis(r)?;
    // 𝔞 - 𝔟 = (1, 0, -1), and both have y = -q.
    let (s, rem) = (-&a.y).div_rem(&r.q);
    debug_assert!(rem.is_zero());
    let k = &a.x - &s * &b.x;
    let l = &s - &k;
    debug_assert_eq!(compose(r, &k, &l).ok().as_ref(), Some(a));
    Ok((k, l))
}

/// `‖a‖ - |coord / q|` for the filled cusp.
pub fn filled_norm(fc: &FilledClass) -> BigRational {
    filled_norm_rational(fc.cusp, &fc.slope, &fc.lift.to_rational())
}

pub fn filled_norm_rational(cusp: Cusp, r: &Slope, a: &RClass) -> BigRational {
    let c = match cusp {
        Cusp::Alpha => &a.x,
        Cusp::Beta => &a.y,
        Cusp::Gamma => &a.z,
    };
    thurston_norm_rational(a) - (c / q_of(r)).abs()
}

/// Filled norm of `k 𝔞_r + l 𝔟_r` for rational `(k, l)`.
pub fn filled_norm_kl(r: &Slope, k: &BigRational, l: &BigRational) -> Result<BigRational, DehnError> {
    let (a, b) = filling_basis(r)?;
    let ar = a.to_rational();
    let br = b.to_rational();
    let c = RClass::new(
        k * &ar.x + l * &br.x,
        k * &ar.y + l * &br.y,
        k * &ar.z + l * &br.z,
    );
    Ok(filled_norm_rational(Cusp::Beta, r, &c))
}

pub type Point2 = (BigRational, BigRational);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    pub from: usize,
    pub to: usize,
    pub kind: FaceKind,
}

/// Norm ball `B_r(radius)` in `(𝔞_r, 𝔟_r)` coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormBall2D {
    pub slope: Slope,
    pub radius: BigInt,
    /// Counterclockwise.
    pub vertices: Vec<Point2>,
    /// `faces[i]` joins `vertices[i]` and `vertices[i+1]`.
    pub faces: Vec<Face>,
}

fn cross(a: &Point2, b: &Point2) -> BigRational {
    &a.0 * &b.1 - &a.1 * &b.0
}

fn half(p: &Point2) -> u8 {
    let zero = BigRational::zero();
    if p.1 > zero || (p.1 == zero && p.0 > zero) {
        0
    } else {
        1
    }
}

fn angle_cmp(a: &Point2, b: &Point2) -> Ordering {
    half(a).cmp(&half(b)).then_with(|| BigRational::zero().cmp(&cross(a, b)))
}

fn is_positive_multiple(v: &Point2, w: &Point2) -> bool {
    cross(v, w).is_zero() && (&v.0 * &w.0 + &v.1 * &w.1).is_positive()
}

fn strictly_between(u: &Point2, v: &Point2, w: &Point2) -> bool {
    // w lies in the open cone spanned by u, v (u to v counterclockwise, angle < π).
    cross(u, w).is_positive() && cross(w, v).is_positive()
}

pub fn norm_ball(r: &Slope) -> Result<NormBall2D, DehnError> {
    require_hyperbolic(r)?;
    let p = rat(r.p.clone());
    let q = q_of(r);
    let one = BigRational::one();
    let two = rat(2);
    let odd = r.p.is_odd();
    let rv = r.value().unwrap();
    let unit_q = r.q.abs().is_one();
    let minus_two = rat(-2);
    let mut half_verts: Vec<Point2> = Vec::new();
    let radius: BigInt;
    if rv > minus_two && rv.is_negative() {
        if odd {
            radius = -&r.q;
            let c = &q / (&two * &q + &two);
            half_verts.push((c.clone(), c));
            half_verts.push((-&q / &two, &q / &two));
        } else {
            radius = -&r.q - 1;
            half_verts.push((BigRational::zero(), one.clone()));
            let c = (&q + &one) / &two;
            half_verts.push((-c.clone(), c));
        }
    } else {
        radius = &r.p + &r.q - 1;
        let pq1 = (&p + &q - &one) / &two;
        if rv < minus_two {
            let s = &p + &two * &q;
            if odd {
                half_verts.push(((&s + &one) / &two, -(&s - &one) / &two));
                half_verts.push(((&s - &one) / &two, -(&s + &one) / &two));
            } else {
                half_verts.push((&s / &two, -(&s - &two) / &two));
                half_verts.push((&s / &two, -(&s + &two) / &two));
            }
        } else if odd {
            half_verts.push(((&p + &one) / &two, -(&p - &one) / &two));
            half_verts.push(((&p - &one) / &two, -(&p + &one) / &two));
        } else {
            half_verts.push((&p / &two, -(&p - &two) / &two));
            half_verts.push((&p / &two, -(&p + &two) / &two));
        }
        if !unit_q {
            half_verts.push((pq1.clone(), -pq1));
        }
    }
    let mut vertices: Vec<Point2> = half_verts
        .iter()
        .cloned()
        .chain(half_verts.iter().map(|(a, b)| (-a, -b)))
        .collect();
    vertices.sort_by(angle_cmp);
    vertices.dedup();

    let amb: Point2 = (one.clone(), -one.clone());
    let amb_neg: Point2 = (-one.clone(), one.clone());
    let n = vertices.len();
    let faces = (0..n)
        .map(|i| {
            let u = &vertices[i];
            let v = &vertices[(i + 1) % n];
            let kind = if !unit_q {
                let touches = [u, v]
                    .iter()
                    .any(|w| is_positive_multiple(w, &amb) || is_positive_multiple(w, &amb_neg));
                if touches {
                    FaceKind::A
                } else {
                    FaceKind::S
                }
            } else if strictly_between(u, v, &amb) || strictly_between(u, v, &amb_neg) {
                FaceKind::A
            } else {
                FaceKind::S
            };
            Face { from: i, to: (i + 1) % n, kind }
        })
        .collect();
    Ok(NormBall2D { slope: r.clone(), radius, vertices, faces })
}

impl NormBall2D {
    /// Linear functional equal to 1 on the edge `i`.
    fn edge_functional(&self, i: usize) -> Point2 {
        let u = &self.vertices[self.faces[i].from];
        let v = &self.vertices[self.faces[i].to];
        let det = cross(u, v);
        // Solve a·u = 1, a·v = 1.
        ((&v.1 - &u.1) / &det, (&u.0 - &v.0) / &det)
    }

    /// Norm of `k 𝔞 + l 𝔟` read off the polygon: `radius · gauge(k, l)`.
    pub fn norm_of(&self, k: &BigRational, l: &BigRational) -> BigRational {
        let g = (0..self.faces.len())
            .map(|i| {
                let f = self.edge_functional(i);
                &f.0 * k + &f.1 * l
            })
            .max()
            .unwrap_or_default();
        g * rat(self.radius.clone())
    }

    /// Index of the face whose open cone contains `(k, l)`.
    pub fn face_of(&self, k: &BigRational, l: &BigRational) -> Option<usize> {
        let w = (k.clone(), l.clone());
        (0..self.faces.len()).find(|&i| {
            strictly_between(&self.vertices[self.faces[i].from], &self.vertices[self.faces[i].to], &w)
        })
    }

    pub fn count(&self, kind: FaceKind) -> usize {
        self.faces.iter().filter(|f| f.kind == kind).count()
    }
}

/// Prong count on the filled cusp: `p + 2q` on S-faces, `|q|` on A-faces.
pub fn filled_prongs(r: &Slope, face: FaceKind) -> Result<BigInt, DehnError> {
    require_hyperbolic(r)?;
    match face {
        FaceKind::A => Ok(r.q.abs()),
        FaceKind::S => {
            if has_s_faces(r) {
                Ok(&r.p + BigInt::from(2) * &r.q)
            } else {
                Err(DehnError::NoSFaces(r.to_string()))
            }
        }
    }
}

/// S-faces exist exactly when `r ∉ (-2, 0)`.
pub fn has_s_faces(r: &Slope) -> bool {
    match r.value() {
        Some(v) => !(v > rat(-2) && v.is_negative()),
        None => true,
    }
}

pub fn face_satisfies_star(r: &Slope, face: FaceKind) -> Result<bool, DehnError> {
    Ok(!filled_prongs(r, face)?.is_one())
}

/// Face type of `ā` for a fibered lift in `S_β(r)`, read from the cone of the lift.
pub fn face_kind_of_lift(a: &HClass) -> Option<FaceKind> {
    match locate_cone(a) {
        Cone::Delta | Cone::DeltaP | Cone::Delta2 | Cone::Delta2P => Some(FaceKind::A),
        Cone::Delta1 | Cone::Delta1P => Some(FaceKind::S),
        Cone::NotFibered => None,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FilledInfo {
    pub genus: BigInt,
    pub boundary: BigInt,
    pub face: FaceKind,
    pub lambda: RootEnclosure,
}

pub fn filled_fiber(fc: &FilledClass) -> Result<FilledInfo, DehnError> {
    require_hyperbolic(&fc.slope)?;
    let b = to_beta(fc.cusp, &fc.lift);
    let face = face_kind_of_lift(&b).ok_or_else(|| DehnError::NotFibered(fc.lift.to_string()))?;
    if !face_satisfies_star(&fc.slope, face)? {
        return Err(DehnError::StarViolated);
    }
    let info = fiber_info(&fc.lift)?;
    let filled = match fc.cusp {
        Cusp::Alpha => &info.n_alpha,
        Cusp::Beta => &info.n_beta,
        Cusp::Gamma => &info.n_gamma,
    };
    let boundary = info.boundary_total() - filled;
    let lambda = homology::dilatation(&fc.lift)?;
    Ok(FilledInfo { genus: info.genus, boundary, face, lambda })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClosedInfo {
    pub genus: BigInt,
    pub ent: f64,
    pub lambda: RootEnclosure,
    pub orientable: bool,
    pub all_prongs_even: bool,
}

/// Closed surface obtained by capping every boundary component of the fiber.
pub fn closed_extension(a: &HClass) -> Result<ClosedInfo, DehnError> {
    let info = fiber_info(a)?;
    if !info.in_m {
        return Err(DehnError::NotInM(a.to_string()));
    }
    let total = info.boundary_total();
    if info.norm <= total {
        return Err(DehnError::Degenerate(info.norm.to_string(), total.to_string()));
    }
    let lambda = homology::dilatation(a)?;
    let chi = (&info.norm - &total).to_f64().unwrap_or(f64::NAN);
    Ok(ClosedInfo {
        genus: info.genus,
        ent: chi * lambda.log(),
        lambda,
        orientable: info.orientable,
        all_prongs_even: info.all_prongs_even,
    })
}

/// The slope `(-2q - p)/q`, i.e. `-2 - r`.
pub fn partner_slope(r: &Slope) -> Slope {
    Slope::new(-BigInt::from(2) * &r.q - &r.p, r.q.clone())
}

/// Thurston norm of the lift, exposed for callers that only have `(k, l)`.
pub fn lift_norm(r: &Slope, k: &BigInt, l: &BigInt) -> Result<BigInt, DehnError> {
    Ok(thurston_norm(&compose(r, k, l)?))
}
