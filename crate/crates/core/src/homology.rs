//! Classes in `H_2(N, ∂N)` for the magic manifold `N`, written `(x, y, z)` in the
//! basis dual to the cusps α, β, γ.
//!
//! The norm ball is the parallelepiped whose six faces are the fibered faces
//! Δ, Δ₁, Δ₂ and their opposites. Everything is reduced to the open cone over Δ
//! through the map σ.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::charpoly::{self, largest_real_root, IntPoly, PolyError, RootEnclosure};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HomologyError {
    #[error("not a fibered class: {0}")]
    NotFibered(String),
    #[error("class {0} is not primitive")]
    NotPrimitive(String),
    #[error("zero class")]
    Zero,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HClass {
    pub x: BigInt,
    pub y: BigInt,
    pub z: BigInt,
}

impl HClass {
    pub fn new(x: impl Into<BigInt>, y: impl Into<BigInt>, z: impl Into<BigInt>) -> Self {
        HClass { x: x.into(), y: y.into(), z: z.into() }
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero() && self.z.is_zero()
    }

    pub fn content(&self) -> BigInt {
        self.x.gcd(&self.y).gcd(&self.z)
    }

    pub fn is_primitive(&self) -> bool {
        self.content().is_one()
    }

    pub fn neg(&self) -> HClass {
        HClass { x: -&self.x, y: -&self.y, z: -&self.z }
    }

    pub fn add(&self, o: &HClass) -> HClass {
        HClass { x: &self.x + &o.x, y: &self.y + &o.y, z: &self.z + &o.z }
    }

    pub fn scale(&self, k: &BigInt) -> HClass {
        HClass { x: &self.x * k, y: &self.y * k, z: &self.z * k }
    }

    pub fn swap_xy(&self) -> HClass {
        HClass { x: self.y.clone(), y: self.x.clone(), z: self.z.clone() }
    }

    /// `(x, y, z) -> (z, x, y)`.
    pub fn rotate(&self) -> HClass {
        HClass { x: self.z.clone(), y: self.x.clone(), z: self.y.clone() }
    }

    /// `(x, y, z) -> (y, z, x)`.
    pub fn rotate_back(&self) -> HClass {
        HClass { x: self.y.clone(), y: self.z.clone(), z: self.x.clone() }
    }

    pub fn to_rational(&self) -> RClass {
        RClass {
            x: BigRational::from_integer(self.x.clone()),
            y: BigRational::from_integer(self.y.clone()),
            z: BigRational::from_integer(self.z.clone()),
        }
    }

    pub fn to_f64(&self) -> (f64, f64, f64) {
        (
            self.x.to_f64().unwrap_or(f64::NAN),
            self.y.to_f64().unwrap_or(f64::NAN),
            self.z.to_f64().unwrap_or(f64::NAN),
        )
    }
}

impl fmt::Display for HClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.x, self.y, self.z)
    }
}

/// Rational class; entropy is defined on rays so these are allowed as inputs.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RClass {
    pub x: BigRational,
    pub y: BigRational,
    pub z: BigRational,
}

impl RClass {
    pub fn new(x: BigRational, y: BigRational, z: BigRational) -> Self {
        RClass { x, y, z }
    }

    /// Writes `self = r * a0` with `a0` primitive integral and `r > 0`.
    pub fn primitive_on_ray(&self) -> Option<(HClass, BigRational)> {
        let l = self.x.denom().lcm(self.y.denom()).lcm(self.z.denom());
        let ix = (&self.x * BigRational::from_integer(l.clone())).to_integer();
        let iy = (&self.y * BigRational::from_integer(l.clone())).to_integer();
        let iz = (&self.z * BigRational::from_integer(l.clone())).to_integer();
        let g = ix.gcd(&iy).gcd(&iz);
        if g.is_zero() {
            return None;
        }
        let a0 = HClass::new(&ix / &g, &iy / &g, &iz / &g);
        Some((a0, BigRational::new(g, l)))
    }
}

/// `max(|x+y-z|, |z+x-y|, |y+z-x|)`.
pub fn thurston_norm(a: &HClass) -> BigInt {
    let u = (&a.x + &a.y - &a.z).abs();
    let v = (&a.z + &a.x - &a.y).abs();
    let w = (&a.y + &a.z - &a.x).abs();
    u.max(v).max(w)
}

pub fn thurston_norm_rational(a: &RClass) -> BigRational {
    let u = (&a.x + &a.y - &a.z).abs();
    let v = (&a.z + &a.x - &a.y).abs();
    let w = (&a.y + &a.z - &a.x).abs();
    u.max(v).max(w)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Cone {
    Delta,
    Delta1,
    Delta2,
    DeltaP,
    Delta1P,
    Delta2P,
    NotFibered,
}

impl Cone {
    pub fn name(self) -> &'static str {
        match self {
            Cone::Delta => "Δ",
            Cone::Delta1 => "Δ₁",
            Cone::Delta2 => "Δ₂",
            Cone::DeltaP => "Δ′",
            Cone::Delta1P => "Δ₁′",
            Cone::Delta2P => "Δ₂′",
            Cone::NotFibered => "not fibered",
        }
    }
}

fn in_open_delta<T: PartialOrd + Zero>(x: &T, y: &T, z: &T) -> bool {
    *x > T::zero() && *y > T::zero() && x > z && y > z
}

pub fn in_delta(a: &HClass) -> bool {
    in_open_delta(&a.x, &a.y, &a.z)
}

pub fn locate_cone(a: &HClass) -> Cone {
    let m = a.neg();
    if in_open_delta(&a.x, &a.y, &a.z) {
        Cone::Delta
    } else if in_open_delta(&a.z, &a.x, &a.y) {
        Cone::Delta1
    } else if in_open_delta(&a.y, &a.z, &a.x) {
        Cone::Delta2
    } else if in_open_delta(&m.x, &m.y, &m.z) {
        Cone::DeltaP
    } else if in_open_delta(&m.z, &m.x, &m.y) {
        Cone::Delta1P
    } else if in_open_delta(&m.y, &m.z, &m.x) {
        Cone::Delta2P
    } else {
        Cone::NotFibered
    }
}

pub fn locate_cone_rational(a: &RClass) -> Cone {
    match a.primitive_on_ray() {
        Some((a0, _)) => locate_cone(&a0),
        None => Cone::NotFibered,
    }
}

/// Moves a fibered class into the open cone over Δ.
pub fn sigma(a: &HClass) -> Result<HClass, HomologyError> {
    Ok(sigma_with_cone(a)?.0)
}

fn sigma_with_cone(a: &HClass) -> Result<(HClass, Cone), HomologyError> {
    let c = locate_cone(a);
    let s = match c {
        Cone::Delta => a.clone(),
        Cone::Delta1 => a.rotate(),
        Cone::Delta2 => a.rotate_back(),
        Cone::DeltaP => a.neg(),
        Cone::Delta1P => a.neg().rotate(),
        Cone::Delta2P => a.neg().rotate_back(),
        Cone::NotFibered => return Err(HomologyError::NotFibered(a.to_string())),
    };
    Ok((s, c))
}

/// Normalized rational slope `p/q` with `p >= 0`, `gcd(p, |q|) = 1`; ∞ is `1/0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Slope {
    pub p: BigInt,
    pub q: BigInt,
}

impl Slope {
    /// The slope `num/den`; panics on `0/0`.
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Self {
        let (mut p, mut q): (BigInt, BigInt) = (num.into(), den.into());
        assert!(!(p.is_zero() && q.is_zero()), "0/0 is not a slope");
        if q.is_zero() {
            return Slope { p: BigInt::one(), q: BigInt::zero() };
        }
        if p.is_zero() {
            return Slope { p, q: BigInt::one() };
        }
        let g = p.gcd(&q);
        p /= &g;
        q /= &g;
        if p.is_negative() {
            p = -p;
            q = -q;
        }
        Slope { p, q }
    }

    pub fn infinity() -> Self {
        Slope { p: BigInt::one(), q: BigInt::zero() }
    }

    pub fn is_infinite(&self) -> bool {
        self.q.is_zero()
    }

    pub fn value(&self) -> Option<BigRational> {
        if self.q.is_zero() {
            None
        } else {
            Some(BigRational::new(self.p.clone(), self.q.clone()))
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.q.is_zero() {
            f64::INFINITY
        } else {
            self.p.to_f64().unwrap_or(f64::NAN) / self.q.to_f64().unwrap_or(f64::NAN)
        }
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q.is_one() {
            write!(f, "{}", self.p)
        } else if self.q == -BigInt::one() {
            write!(f, "-{}", self.p)
        } else {
            write!(f, "{}/{}", self.p, self.q)
        }
    }
}

impl std::str::FromStr for Slope {
    type Err = String;

    /// Accepts `p/q` or an integer; `-6` means `6/-1`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let n: BigInt = n.parse().map_err(|_| format!("bad slope numerator in {:?}", s))?;
        let d: BigInt = d.parse().map_err(|_| format!("bad slope denominator in {:?}", s))?;
        if n.is_zero() && d.is_zero() {
            return Err("0/0 is not a slope".into());
        }
        Ok(Slope::new(n, d))
    }
}

/// `(b_α, b_β, b_γ) = ((y+z)/(-x), (z+x)/(-y), (x+y)/(-z))`.
pub fn boundary_slopes(a: &HClass) -> Result<(Slope, Slope, Slope), HomologyError> {
    if a.is_zero() {
        return Err(HomologyError::Zero);
    }
    let s = |n: BigInt, d: &BigInt| {
        if n.is_zero() && d.is_zero() {
            // The whole torus misses the fiber; report ∞ as the degenerate slope.
            Slope::infinity()
        } else {
            Slope::new(n, -d)
        }
    };
    Ok((s(&a.y + &a.z, &a.x), s(&a.z + &a.x, &a.y), s(&a.x + &a.y, &a.z)))
}

/// `gcd` with the convention `gcd(0, w) = |w|`.
pub fn gcd0(a: &BigInt, b: &BigInt) -> BigInt {
    a.gcd(b)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberInfo {
    pub norm: BigInt,
    pub n_alpha: BigInt,
    pub n_beta: BigInt,
    pub n_gamma: BigInt,
    pub genus: BigInt,
    pub prongs_alpha: BigInt,
    pub prongs_beta: BigInt,
    pub prongs_gamma: BigInt,
    pub orientable: bool,
    pub all_prongs_even: bool,
    pub in_m: bool,
}

impl FiberInfo {
    pub fn boundary_total(&self) -> BigInt {
        &self.n_alpha + &self.n_beta + &self.n_gamma
    }

    pub fn counts(&self) -> [BigInt; 3] {
        [self.n_alpha.clone(), self.n_beta.clone(), self.n_gamma.clone()]
    }

    pub fn prongs(&self) -> [BigInt; 3] {
        [self.prongs_alpha.clone(), self.prongs_beta.clone(), self.prongs_gamma.clone()]
    }
}

/// Per-cusp data of `σ(a)` carried back to the cusps of `a`.
fn unpermute<T: Clone>(cone: Cone, d: [T; 3]) -> [T; 3] {
    let [a, b, c] = d;
    match cone {
        Cone::Delta | Cone::DeltaP => [a, b, c],
        // σ(a) = (z, x, y): its α-entry belongs to the γ cusp of a.
        Cone::Delta1 | Cone::Delta1P => [b, c, a],
        Cone::Delta2 | Cone::Delta2P => [c, a, b],
        Cone::NotFibered => unreachable!(),
    }
}

pub fn fiber_info(a: &HClass) -> Result<FiberInfo, HomologyError> {
    if a.is_zero() {
        return Err(HomologyError::Zero);
    }
    if !a.is_primitive() {
        return Err(HomologyError::NotPrimitive(a.to_string()));
    }
    let (s, cone) = sigma_with_cone(a)?;
    let (x, y, z) = (&s.x, &s.y, &s.z);
    let n = [gcd0(x, &(y + z)), gcd0(y, &(z + x)), gcd0(z, &(x + y))];
    let pr = [x / &n[0], y / &n[1], (x + y - z - z) / &n[2]];
    let two = BigInt::from(2);
    let orientable = x.is_even() && y.is_even() && z.is_odd();
    let norm = thurston_norm(a);
    let [na, nb, ng] = unpermute(cone, n);
    let [pa, pb, pg] = unpermute(cone, pr);
    let total = &na + &nb + &ng;
    let genus = (&norm - &total + &two) / &two;
    let all_prongs_even = pa.is_even() && pb.is_even() && pg.is_even();
    let in_m = pa >= two && pb >= two && pg >= two;
    Ok(FiberInfo {
        norm,
        n_alpha: na,
        n_beta: nb,
        n_gamma: ng,
        genus,
        prongs_alpha: pa,
        prongs_beta: pb,
        prongs_gamma: pg,
        orientable,
        all_prongs_even,
        in_m,
    })
}

/// The dilatation polynomial of a fibered class, computed on `σ(a)`.
pub fn class_polynomial(a: &HClass) -> Result<IntPoly, HomologyError> {
    let s = sigma(a)?;
    Ok(charpoly::specialize_fibered(&s.x, &s.y, &s.z)?)
}

pub fn dilatation(a: &HClass) -> Result<RootEnclosure, HomologyError> {
    dilatation_tol(a, &charpoly::default_tol())
}

pub fn dilatation_tol(a: &HClass, tol: &BigRational) -> Result<RootEnclosure, HomologyError> {
    if !a.is_primitive() {
        return Err(HomologyError::NotPrimitive(a.to_string()));
    }
    let f = class_polynomial(a)?;
    Ok(largest_real_root(&f, tol)?)
}

/// Largest root of the class polynomial without the primitivity check.
/// For `a = k a0` this is `λ(a0)^(1/k)`.
pub fn class_root(a: &HClass) -> Result<RootEnclosure, HomologyError> {
    let f = class_polynomial(a)?;
    Ok(largest_real_root(&f, &charpoly::default_tol())?)
}

/// Entropy of a rational class: `(1/|r|) log λ(a0)` where `a = r a0`.
pub fn entropy(a: &RClass) -> Result<f64, HomologyError> {
    let (a0, r) = a.primitive_on_ray().ok_or(HomologyError::Zero)?;
    let lam = dilatation(&a0)?;
    Ok(lam.log() / r.to_f64().unwrap_or(f64::NAN))
}

/// Normalized entropy `‖a‖ · ent(a)`, constant on rays.
pub fn normalized_entropy(a: &RClass) -> Result<f64, HomologyError> {
    let e = entropy(a)?;
    Ok(thurston_norm_rational(a).to_f64().unwrap_or(f64::NAN) * e)
}

/// Normalized entropy of an integral class.
pub fn class_ent(a: &HClass) -> Result<f64, HomologyError> {
    normalized_entropy(&a.to_rational())
}

/// The four classes sharing the dilatation polynomial of `a`, with their x↔y swaps.
pub fn symmetry_orbit(a: &HClass) -> Result<Vec<HClass>, HomologyError> {
    if !in_delta(a) {
        return Err(HomologyError::NotFibered(format!("{} is not in the open cone over Δ", a)));
    }
    let (x, y, z) = (&a.x, &a.y, &a.z);
    let base = [
        a.clone(),
        HClass::new(y - z, y.clone(), y - x),
        HClass::new(y - z, x - z, -z),
        HClass::new(x.clone(), x - z, x - y),
    ];
    let mut out = BTreeSet::new();
    for b in base {
        out.insert(b.swap_xy());
        out.insert(b);
    }
    Ok(out.into_iter().collect())
}

/// A point `[x, y] = (x, y, x+y-1)` of the open face Δ.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FacePoint {
    pub x: BigRational,
    pub y: BigRational,
}

impl FacePoint {
    pub fn new(x: BigRational, y: BigRational) -> Option<Self> {
        let zero = BigRational::zero();
        let one = BigRational::one();
        if x > zero && x < one && y > zero && y < one {
            Some(FacePoint { x, y })
        } else {
            None
        }
    }

    pub fn class(&self) -> RClass {
        RClass {
            x: self.x.clone(),
            y: self.y.clone(),
            z: &self.x + &self.y - BigRational::one(),
        }
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.x.to_f64().unwrap_or(f64::NAN), self.y.to_f64().unwrap_or(f64::NAN))
    }
}

impl fmt::Display for FacePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.x, self.y)
    }
}

/// `log λ` of a real class in the open cone over Δ.
///
/// Solves `e^{s(x+y-z)} - e^{sx} - e^{sy} - e^{s(x-z)} - e^{s(y-z)} + 1 = 0` for
/// `s > 0`; for integral classes this is the log of the largest root of the
/// dilatation polynomial, and it scales inversely along rays.
pub fn log_dilatation_real(x: f64, y: f64, z: f64) -> Option<f64> {
    if !(x > 0.0 && y > 0.0 && x > z && y > z) {
        return None;
    }
    let top = x + y - z;
    let g = |s: f64| {
        // Divide through by e^{s top} to keep magnitudes bounded.
        1.0 - (-s * (top - x)).exp() - (-s * (top - y)).exp() - (-s * (top - x + z)).exp()
            - (-s * (top - y + z)).exp()
            + (-s * top).exp()
    };
    let mut hi = 1.0 / top;
    while g(hi) <= 0.0 {
        hi *= 2.0;
        if hi > 1e300 {
            return None;
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Normalized entropy of a face point in floating point.
pub fn face_ent_f64(x: f64, y: f64) -> Option<f64> {
    log_dilatation_real(x, y, x + y - 1.0)
}
