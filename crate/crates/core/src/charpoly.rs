//! Sparse integer polynomials and certified isolation of the largest real root.
//!
//! Signs are always evaluated exactly with big integers; floats only appear in
//! the `approx` field of a [`RootEnclosure`].

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("no root > 1 found")]
    NoRootAboveOne,
    #[error("could not certify that the bracketed root is the largest real root")]
    Uncertified,
    #[error("tolerance must be positive")]
    BadTolerance,
    #[error("invalid parameters: {0}")]
    Domain(String),
}

/// Integer polynomial in `t`, stored sparsely as exponent -> nonzero coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    terms: BTreeMap<u64, BigInt>,
}

impl IntPoly {
    pub fn zero() -> Self {
        IntPoly { terms: BTreeMap::new() }
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs. Repeated exponents
    /// are summed, zero coefficients dropped, and the lowest power of `t` divided out.
    pub fn from_terms<I, C>(terms: I) -> Self
    where
        I: IntoIterator<Item = (u64, C)>,
        C: Into<BigInt>,
    {
        let mut map: BTreeMap<u64, BigInt> = BTreeMap::new();
        for (e, c) in terms {
            *map.entry(e).or_insert_with(BigInt::zero) += c.into();
        }
        map.retain(|_, c| !c.is_zero());
        let mut p = IntPoly { terms: map };
        p.normalize();
        p
    }

    /// Dense constructor, `coeffs[i]` is the coefficient of `t^i`.
    pub fn from_coeffs(coeffs: &[i64]) -> Self {
        Self::from_terms(coeffs.iter().enumerate().map(|(i, &c)| (i as u64, c)))
    }

    fn normalize(&mut self) {
        let shift = match self.terms.keys().next() {
            Some(&s) if s > 0 => s,
            _ => return,
        };
        let old = std::mem::take(&mut self.terms);
        self.terms = old.into_iter().map(|(e, c)| (e - shift, c)).collect();
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<u64> {
        self.terms.keys().next_back().copied()
    }

    pub fn coeff(&self, e: u64) -> BigInt {
        self.terms.get(&e).cloned().unwrap_or_default()
    }

    pub fn leading_coeff(&self) -> Option<&BigInt> {
        self.terms.values().next_back()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (u64, &BigInt)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Multiplies by `t^k`; since storage is normalized this is the identity.
    pub fn shifted(&self, k: u64) -> Self {
        Self::from_terms(self.terms.iter().map(|(e, c)| (e + k, c.clone())))
    }

    /// Coefficients from the constant term up to the leading one.
    pub fn dense(&self) -> Vec<BigInt> {
        let d = match self.degree() {
            Some(d) => d as usize,
            None => return Vec::new(),
        };
        let mut v = vec![BigInt::zero(); d + 1];
        for (e, c) in &self.terms {
            v[*e as usize] = c.clone();
        }
        v
    }

    /// True when the dense coefficient list equals its reverse.
    pub fn is_palindromic(&self) -> bool {
        let d = match self.degree() {
            Some(d) => d,
            None => return true,
        };
        self.terms.iter().all(|(e, c)| self.terms.get(&(d - e)) == Some(c))
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        let mut acc: BTreeMap<u64, BigInt> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                *acc.entry(e1 + e2).or_insert_with(BigInt::zero) += c1 * c2;
            }
        }
        IntPoly::from_terms(acc)
    }

    /// Long division over the rationals. Returns `(quotient, remainder)` as dense
    /// rational coefficient vectors (lowest degree first).
    pub fn div_rem(&self, g: &IntPoly) -> Result<(Vec<BigRational>, Vec<BigRational>), PolyError> {
        if g.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        let gd = g.dense();
        let dg = gd.len() - 1;
        let lead = BigRational::from_integer(gd[dg].clone());
        let mut rem: Vec<BigRational> =
            self.dense().into_iter().map(BigRational::from_integer).collect();
        if rem.len() <= dg {
            return Ok((vec![], rem));
        }
        let mut quot = vec![BigRational::zero(); rem.len() - dg];
        for i in (0..quot.len()).rev() {
            let c = &rem[i + dg] / &lead;
            if c.is_zero() {
                continue;
            }
            for (j, gj) in gd.iter().enumerate() {
                if !gj.is_zero() {
                    rem[i + j] -= &c * BigRational::from_integer(gj.clone());
                }
            }
            quot[i] = c;
        }
        rem.truncate(dg);
        Ok((quot, rem))
    }

    /// Exact quotient when `g` divides `self` with integer quotient.
    pub fn exact_quotient(&self, g: &IntPoly) -> Result<Option<IntPoly>, PolyError> {
        let (q, r) = self.div_rem(g)?;
        if r.iter().any(|c| !c.is_zero()) || q.iter().any(|c| !c.is_integer()) {
            return Ok(None);
        }
        Ok(Some(IntPoly::from_terms(
            q.into_iter().enumerate().map(|(i, c)| (i as u64, c.to_integer())),
        )))
    }

    /// Number of sign changes in the coefficient sequence.
    pub fn sign_variations(&self) -> usize {
        let mut last: Option<Sign> = None;
        let mut n = 0;
        for c in self.terms.values() {
            let s = c.sign();
            if let Some(l) = last {
                if l != s {
                    n += 1;
                }
            }
            last = Some(s);
        }
        n
    }

    /// Sign of `f(m / 2^k)`.
    pub fn sign_at_dyadic(&self, m: &BigInt, k: u32) -> Ordering {
        self.scaled_value_at_dyadic(m, k).sign_ord()
    }

    /// `2^(k*deg) * f(m / 2^k)`, an integer with the sign of `f(m/2^k)`.
    fn scaled_value_at_dyadic(&self, m: &BigInt, k: u32) -> BigInt {
        let d = match self.degree() {
            Some(d) => d,
            None => return BigInt::zero(),
        };
        let mut acc = BigInt::zero();
        let mut prev = d;
        for (&e, c) in self.terms.iter().rev() {
            if prev > e {
                acc *= pow_u64(m, prev - e);
            }
            acc += c << ((k as u64) * (d - e));
            prev = e;
        }
        if prev > 0 {
            acc *= pow_u64(m, prev);
        }
        acc
    }

    /// Sign of `f(n / den)` for a positive denominator.
    pub fn sign_at_fraction(&self, n: &BigInt, den: &BigInt) -> Ordering {
        let d = match self.degree() {
            Some(d) => d,
            None => return Ordering::Equal,
        };
        let mut acc = BigInt::zero();
        let mut prev = d;
        for (&e, c) in self.terms.iter().rev() {
            if prev > e {
                acc *= pow_u64(n, prev - e);
            }
            acc += c * pow_u64(den, d - e);
            prev = e;
        }
        if prev > 0 {
            acc *= pow_u64(n, prev);
        }
        acc.sign_ord()
    }

    /// Float evaluation, used only for polishing.
    pub fn eval_f64(&self, t: f64) -> f64 {
        self.terms.iter().map(|(e, c)| c.to_f64().unwrap_or(f64::NAN) * t.powf(*e as f64)).sum()
    }

    fn derivative_f64(&self, t: f64) -> f64 {
        self.terms
            .iter()
            .filter(|(e, _)| **e > 0)
            .map(|(e, c)| c.to_f64().unwrap_or(f64::NAN) * (*e as f64) * t.powf(*e as f64 - 1.0))
            .sum()
    }

    /// Integer polynomial `g(u) = 2^(k*deg) f((m + u) / 2^k)`; its positive roots are the
    /// roots of `f` above `m / 2^k`.
    fn taylor_shift_dyadic(&self, m: &BigInt, k: u32) -> IntPoly {
        let d = self.degree().unwrap_or(0);
        let mut v: Vec<BigInt> = vec![BigInt::zero(); d as usize + 1];
        for (&e, c) in &self.terms {
            v[e as usize] = c << ((k as u64) * (d - e));
        }
        // Horner-style Taylor shift by m.
        let n = v.len();
        for i in 0..n {
            for j in (i..n - 1).rev() {
                let t = &v[j + 1] * m;
                v[j] += t;
            }
        }
        IntPoly::from_terms(v.into_iter().enumerate().map(|(i, c)| (i as u64, c)))
    }
}

fn pow_u64(b: &BigInt, e: u64) -> BigInt {
    num_traits::pow(b.clone(), e as usize)
}

trait SignOrd {
    fn sign_ord(&self) -> Ordering;
}

impl SignOrd for BigInt {
    fn sign_ord(&self) -> Ordering {
        match self.sign() {
            Sign::Minus => Ordering::Less,
            Sign::NoSign => Ordering::Equal,
            Sign::Plus => Ordering::Greater,
        }
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&e, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let show_coeff = !a.is_one() || e == 0;
            if show_coeff {
                write!(f, "{}", a)?;
            }
            match e {
                0 => {}
                1 => write!(f, "t")?,
                _ => write!(f, "t^{}", e)?,
            }
        }
        Ok(())
    }
}

/// Exact value of `f` at a rational point.
pub fn evaluate_exact(f: &IntPoly, x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    let mut prev: Option<u64> = None;
    for (&e, c) in f.terms.iter().rev() {
        if let Some(p) = prev {
            acc *= num_traits::pow(x.clone(), (p - e) as usize);
        }
        acc += BigRational::from_integer(c.clone());
        prev = Some(e);
    }
    if let Some(p) = prev {
        acc *= num_traits::pow(x.clone(), p as usize);
    }
    acc
}

/// True iff `g` divides `f` exactly over the rationals.
pub fn divides(g: &IntPoly, f: &IntPoly) -> Result<bool, PolyError> {
    let (_, r) = f.div_rem(g)?;
    Ok(r.iter().all(|c| c.is_zero()))
}

/// The dilatation polynomial `t^{x+y-z} - t^x - t^y - t^{x-z} - t^{y-z} + 1` for
/// `x > 0`, `y > 0`, `x > z`, `y > z`.
pub fn specialize_fibered(x: &BigInt, y: &BigInt, z: &BigInt) -> Result<IntPoly, PolyError> {
    if !(x.is_positive() && y.is_positive() && x > z && y > z) {
        return Err(PolyError::Domain(format!("({}, {}, {}) is not in the open cone over the standard face", x, y, z)));
    }
    let e = |v: BigInt| {
        v.to_u64().ok_or_else(|| PolyError::Domain("exponent does not fit in 64 bits".into()))
    };
    let top = e(x + y - z)?;
    Ok(IntPoly::from_terms([
        (top, 1i64),
        (e(x.clone())?, -1),
        (e(y.clone())?, -1),
        (e(x - z)?, -1),
        (e(y - z)?, -1),
        (0, 1),
    ]))
}

/// `t^{2k} - t^{k+l} - t^k - t^{k-l} + 1` for `0 < l < k`.
pub fn lt_polynomial(k: u64, l: u64) -> Result<IntPoly, PolyError> {
    if l == 0 || l >= k {
        return Err(PolyError::Domain(format!("need 0 < l < k, got k={}, l={}", k, l)));
    }
    Ok(IntPoly::from_terms([(2 * k, 1i64), (k + l, -1), (k, -1), (k - l, -1), (0, 1)]))
}

/// Bracket `[lo, hi]` around the largest real root.
#[derive(Clone, Debug, PartialEq)]
pub struct RootEnclosure {
    pub lo: BigRational,
    pub hi: BigRational,
    pub approx: f64,
}

impl RootEnclosure {
    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn log(&self) -> f64 {
        self.approx.ln()
    }
}

/// `2^-48`.
pub fn default_tol() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << 48u32)
}

/// Rational tolerance from a float, rounded down to a power of two.
pub fn tol_from_f64(tol: f64) -> BigRational {
    let mut k = 0u32;
    let mut w = 1.0f64;
    while w > tol && k < 2000 {
        w /= 2.0;
        k += 1;
    }
    BigRational::new(BigInt::one(), BigInt::one() << k)
}

/// `ceil(1 + max|c_i| / |lead|)` over the non-leading coefficients.
pub fn cauchy_bound(f: &IntPoly) -> BigInt {
    let lead = match f.leading_coeff() {
        Some(l) => l.abs(),
        None => return BigInt::one(),
    };
    let d = f.degree().unwrap();
    let m = f
        .terms
        .iter()
        .filter(|(e, _)| **e < d)
        .map(|(_, c)| c.abs())
        .max()
        .unwrap_or_default();
    let (q, r) = m.div_rem(&lead);
    BigInt::one() + q + if r.is_zero() { BigInt::zero() } else { BigInt::one() }
}

/// Certified enclosure of the largest real root, assumed to exceed 1.
///
/// Scans down from the Cauchy bound in unit steps, bisects the first sign change
/// at dyadic points, then certifies with Descartes' rule of signs that nothing
/// lies above the bracket.
pub fn largest_real_root(f: &IntPoly, tol: &BigRational) -> Result<RootEnclosure, PolyError> {
    if !tol.is_positive() {
        return Err(PolyError::BadTolerance);
    }
    let lead_sign = match f.leading_coeff() {
        Some(l) if f.degree() > Some(0) => l.sign_ord(),
        _ => return Err(PolyError::NoRootAboveOne),
    };
    let one = BigInt::one();
    let mut c = cauchy_bound(f);
    // f has the sign of its leading coefficient on [c, oo).
    let mut found = false;
    while c > one {
        let below = &c - &one;
        if f.sign_at_dyadic(&below, 0) != lead_sign {
            found = true;
            break;
        }
        c = below;
    }
    if !found {
        return Err(PolyError::NoRootAboveOne);
    }

    // Invariant: sign(f(hi)) == lead_sign, sign(f(lo)) != lead_sign, lo = hi - 2^-k.
    let mut k: u32 = 0;
    let mut hi_m = c;
    let mut lo_m = &hi_m - &one;
    let mut exact: Option<(BigInt, u32)> = None;
    if f.sign_at_dyadic(&lo_m, 0) == Ordering::Equal {
        exact = Some((lo_m.clone(), 0));
    }
    while exact.is_none() && !dyadic_width_ok(k, tol) {
        k += 1;
        lo_m <<= 1u32;
        hi_m <<= 1u32;
        let mid = &lo_m + &one;
        match f.sign_at_dyadic(&mid, k) {
            Ordering::Equal => exact = Some((mid, k)),
            s if s == lead_sign => hi_m = mid,
            _ => lo_m = mid,
        }
    }
    if let Some((m, k0)) = exact {
        let (l, h, kk) = bracket_exact_root(f, &m, k0, tol, lead_sign)?;
        lo_m = l;
        hi_m = h;
        k = kk;
    }
    let den = BigInt::one() << k;
    let lo = BigRational::new(lo_m.clone(), den.clone());
    let hi = BigRational::new(hi_m.clone(), den);

    if !certify_no_root_above(f, &hi_m, k, lead_sign) {
        return Err(PolyError::Uncertified);
    }
    let approx = polish(f, &lo, &hi);
    Ok(RootEnclosure { lo, hi, approx })
}

fn dyadic_width_ok(k: u32, tol: &BigRational) -> bool {
    BigRational::new(BigInt::one(), BigInt::one() << k) <= *tol
}

/// Brackets a root sitting exactly at `m / 2^k` by strict sign changes.
fn bracket_exact_root(
    f: &IntPoly,
    m: &BigInt,
    k: u32,
    tol: &BigRational,
    lead_sign: Ordering,
) -> Result<(BigInt, BigInt, u32), PolyError> {
    let mut kk = k + 1;
    let mut center = m << 1u32;
    loop {
        let lo = &center - 1;
        let hi = &center + 1;
        let sl = f.sign_at_dyadic(&lo, kk);
        let sh = f.sign_at_dyadic(&hi, kk);
        if sh == lead_sign && sl != Ordering::Equal && sl != sh && dyadic_width_ok(kk - 1, tol) {
            return Ok((lo, hi, kk));
        }
        if kk > k + 4096 {
            return Err(PolyError::Uncertified);
        }
        kk += 1;
        center <<= 1u32;
    }
}

/// No real root above `hi_m / 2^k`, given `sign f(hi) = lead_sign` and one root just below.
fn certify_no_root_above(f: &IntPoly, hi_m: &BigInt, k: u32, lead_sign: Ordering) -> bool {
    debug_assert_eq!(f.sign_at_dyadic(hi_m, k), lead_sign);
    // Roots above hi come in an even number (counted with multiplicity) and at
    // least one positive root lies below hi, so two variations leave room for none.
    if f.sign_variations() <= 2 {
        return true;
    }
    f.taylor_shift_dyadic(hi_m, k).sign_variations() == 0
}

fn polish(f: &IntPoly, lo: &BigRational, hi: &BigRational) -> f64 {
    let l = lo.to_f64().unwrap_or(f64::NAN);
    let h = hi.to_f64().unwrap_or(f64::NAN);
    let mut t = ((lo + hi) / BigRational::from_integer(2.into())).to_f64().unwrap_or(f64::NAN);
    if h - l <= f64::EPSILON * t.abs() * 4.0 {
        return t;
    }
    for _ in 0..8 {
        let d = f.derivative_f64(t);
        if d == 0.0 || !d.is_finite() {
            break;
        }
        let next = t - f.eval_f64(t) / d;
        if !(next >= l && next <= h) {
            break;
        }
        if (next - t).abs() <= f64::EPSILON * t.abs() {
            t = next;
            break;
        }
        t = next;
    }
    t
}
