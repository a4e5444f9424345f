//! Exact arithmetic: big rationals, the extended line Q ∪ {∞}, integer 2×2
//! matrices acting by Möbius maps, rational enclosures, and real quadratic
//! numbers a + b√d with exact floor and comparison.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::Error as CoreError;

pub type Int = BigInt;
pub type Rat = BigRational;

pub fn int(v: i64) -> Int {
    BigInt::from(v)
}

pub fn rat(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: Int) -> Rat {
    BigRational::from_integer(n)
}

/// Natural log of a positive big integer without overflowing f64.
pub fn ln_big(n: &Int) -> f64 {
    assert!(n.is_positive(), "ln of non-positive integer");
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    let top: BigInt = n >> shift;
    top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

/// An element of Q ∪ {∞}.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExtRational {
    Finite(Rat),
    Infinity,
}

impl ExtRational {
    pub fn from_int(v: i64) -> Self {
        ExtRational::Finite(rat(v, 1))
    }

    pub fn frac(n: i64, d: i64) -> Self {
        if d == 0 {
            ExtRational::Infinity
        } else {
            ExtRational::Finite(rat(n, d))
        }
    }

    /// n/d with the c/0 = ∞ convention (c ≠ 0).
    pub fn from_pair(n: &Int, d: &Int) -> Result<Self, CoreError> {
        if d.is_zero() {
            if n.is_zero() {
                return Err(CoreError::Indeterminate);
            }
            Ok(ExtRational::Infinity)
        } else {
            Ok(ExtRational::Finite(BigRational::new(n.clone(), d.clone())))
        }
    }

    pub fn finite(&self) -> Option<&Rat> {
        match self {
            ExtRational::Finite(r) => Some(r),
            ExtRational::Infinity => None,
        }
    }
}

impl fmt::Display for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRational::Finite(r) => write!(f, "{r}"),
            ExtRational::Infinity => write!(f, "inf"),
        }
    }
}

/// Integer matrix [[a, b], [c, d]].
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mat2 {
    pub a: Int,
    pub b: Int,
    pub c: Int,
    pub d: Int,
}

impl Mat2 {
    pub fn new(a: Int, b: Int, c: Int, d: Int) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn from_i64(a: i64, b: i64, c: i64, d: i64) -> Self {
        Mat2::new(int(a), int(b), int(c), int(d))
    }

    pub fn identity() -> Self {
        Mat2::from_i64(1, 0, 0, 1)
    }

    pub fn det(&self) -> Int {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn transpose(&self) -> Self {
        Mat2::new(self.a.clone(), self.c.clone(), self.b.clone(), self.d.clone())
    }

    /// Adjugate, i.e. det · inverse.
    pub fn adjugate(&self) -> Self {
        Mat2::new(self.d.clone(), -&self.b, -&self.c, self.a.clone())
    }

    pub fn scale(&self, r: &Int) -> Self {
        Mat2::new(&self.a * r, &self.b * r, &self.c * r, &self.d * r)
    }

    pub fn mul_ref(&self, o: &Mat2) -> Mat2 {
        Mat2::new(
            &self.a * &o.a + &self.b * &o.c,
            &self.a * &o.b + &self.b * &o.d,
            &self.c * &o.a + &self.d * &o.c,
            &self.c * &o.b + &self.d * &o.d,
        )
    }

    /// Matrix times column vector.
    pub fn apply_vec(&self, v: (&Int, &Int)) -> (Int, Int) {
        (&self.a * v.0 + &self.b * v.1, &self.c * v.0 + &self.d * v.1)
    }

    pub fn columns(&self) -> [(Int, Int); 2] {
        [(self.a.clone(), self.c.clone()), (self.b.clone(), self.d.clone())]
    }

    /// Möbius action on the extended rationals.
    pub fn mobius(&self, z: &ExtRational) -> Result<ExtRational, CoreError> {
        if self.det().is_zero() {
            return Err(CoreError::ZeroDeterminant);
        }
        match z {
            ExtRational::Infinity => ExtRational::from_pair(&self.a, &self.c),
            ExtRational::Finite(q) => {
                let (n, d) = (q.numer(), q.denom());
                let num = &self.a * n + &self.b * d;
                let den = &self.c * n + &self.d * d;
                ExtRational::from_pair(&num, &den)
            }
        }
    }

    /// Möbius action on a quadratic number; errors on a pole.
    pub fn mobius_quad(&self, z: &Quad) -> Result<Quad, CoreError> {
        if self.det().is_zero() {
            return Err(CoreError::ZeroDeterminant);
        }
        let num = z.mul_int(&self.a).add_int(&self.b);
        let den = z.mul_int(&self.c).add_int(&self.d);
        if den.is_zero() {
            return Err(CoreError::Pole);
        }
        Ok(num.div(&den))
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        self.mul_ref(&o)
    }
}

impl<'a> Mul<&'a Mat2> for &'a Mat2 {
    type Output = Mat2;
    fn mul(self, o: &Mat2) -> Mat2 {
        self.mul_ref(o)
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// Left-to-right product of a nonempty sequence.
pub fn mat_product<'a, I: IntoIterator<Item = &'a Mat2>>(ms: I) -> Result<Mat2, CoreError> {
    let mut it = ms.into_iter();
    let first = it.next().ok_or(CoreError::EmptyProduct)?.clone();
    Ok(it.fold(first, |acc, m| acc.mul_ref(m)))
}

/// Closed rational interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalInterval {
    pub lo: Rat,
    pub hi: Rat,
}

impl RationalInterval {
    pub fn new(lo: Rat, hi: Rat) -> Self {
        assert!(lo <= hi, "interval bounds out of order");
        RationalInterval { lo, hi }
    }

    pub fn point(v: Rat) -> Self {
        RationalInterval { lo: v.clone(), hi: v }
    }

    pub fn contains(&self, v: &Rat) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    /// Intersect with a tighter enclosure of the same real.
    pub fn refine(&self, other: &RationalInterval) -> RationalInterval {
        let lo = if other.lo > self.lo { other.lo.clone() } else { self.lo.clone() };
        let hi = if other.hi < self.hi { other.hi.clone() } else { self.hi.clone() };
        assert!(lo <= hi, "refinement with a disjoint enclosure");
        RationalInterval { lo, hi }
    }

    /// Ordering against a rational when certain.
    pub fn cmp_rat(&self, v: &Rat) -> Option<Ordering> {
        if &self.hi < v {
            Some(Ordering::Less)
        } else if &self.lo > v {
            Some(Ordering::Greater)
        } else if self.is_point() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    pub fn to_f64_bounds(&self) -> (f64, f64) {
        (self.lo.to_f64().unwrap_or(f64::NAN), self.hi.to_f64().unwrap_or(f64::NAN))
    }
}

fn squarefree_split(d: &Int) -> (Int, Int) {
    // d = s² · d' with d' squarefree (trial division for moderate d)
    let mut rest = d.clone();
    let mut s = Int::one();
    if rest.bits() > 48 {
        return (s, rest);
    }
    let mut p = int(2);
    while &p * &p <= rest {
        let pp = &p * &p;
        while (&rest % &pp).is_zero() {
            rest /= &pp;
            s *= &p;
        }
        p += 1;
    }
    (s, rest)
}

/// Real number a + b√d with a, b rational and d > 1 squarefree; b = 0 means
/// rational and then d is stored as 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Quad {
    a: Rat,
    b: Rat,
    d: Int,
}

impl Quad {
    pub fn rational(a: Rat) -> Quad {
        Quad { a, b: Rat::zero(), d: Int::zero() }
    }

    pub fn from_int(v: i64) -> Quad {
        Quad::rational(rat(v, 1))
    }

    pub fn frac(n: i64, d: i64) -> Quad {
        Quad::rational(rat(n, d))
    }

    pub fn zero() -> Quad {
        Quad::from_int(0)
    }

    pub fn one() -> Quad {
        Quad::from_int(1)
    }

    /// a + b√d, normalised.
    pub fn new(a: Rat, b: Rat, d: Int) -> Result<Quad, CoreError> {
        if d.is_negative() {
            return Err(CoreError::NegativeRadicand);
        }
        if b.is_zero() || d.is_zero() {
            return Ok(Quad::rational(a));
        }
        let (s, rest) = squarefree_split(&d);
        let b = b * rat_int(s);
        if rest.is_one() {
            return Ok(Quad::rational(a + b));
        }
        Ok(Quad { a, b, d: rest })
    }

    pub fn sqrt_int(d: i64) -> Result<Quad, CoreError> {
        Quad::new(Rat::zero(), Rat::one(), int(d))
    }

    /// (√5 − 1)/2.
    pub fn golden_frac() -> Quad {
        Quad::new(rat(-1, 2), rat(1, 2), int(5)).unwrap()
    }

    pub fn parts(&self) -> (&Rat, &Rat, &Int) {
        (&self.a, &self.b, &self.d)
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn as_rational(&self) -> Option<&Rat> {
        if self.is_rational() {
            Some(&self.a)
        } else {
            None
        }
    }

    pub fn is_zero(&self) -> bool {
        self.b.is_zero() && self.a.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.b.is_zero() && self.a.is_one()
    }

    fn field(&self, o: &Quad) -> Result<Int, CoreError> {
        match (self.is_rational(), o.is_rational()) {
            (true, true) => Ok(Int::zero()),
            (true, false) => Ok(o.d.clone()),
            (false, true) => Ok(self.d.clone()),
            (false, false) if self.d == o.d => Ok(self.d.clone()),
            _ => Err(CoreError::FieldMismatch),
        }
    }

    fn mk(a: Rat, b: Rat, d: Int) -> Quad {
        if b.is_zero() {
            Quad::rational(a)
        } else {
            Quad { a, b, d }
        }
    }

    pub fn checked_add(&self, o: &Quad) -> Result<Quad, CoreError> {
        let d = self.field(o)?;
        Ok(Quad::mk(&self.a + &o.a, &self.b + &o.b, d))
    }

    pub fn checked_sub(&self, o: &Quad) -> Result<Quad, CoreError> {
        let d = self.field(o)?;
        Ok(Quad::mk(&self.a - &o.a, &self.b - &o.b, d))
    }

    pub fn checked_mul(&self, o: &Quad) -> Result<Quad, CoreError> {
        let d = self.field(o)?;
        let dr = rat_int(d.clone());
        let a = &self.a * &o.a + &self.b * &o.b * &dr;
        let b = &self.a * &o.b + &self.b * &o.a;
        Ok(Quad::mk(a, b, d))
    }

    pub fn recip(&self) -> Result<Quad, CoreError> {
        if self.is_zero() {
            return Err(CoreError::DivisionByZero);
        }
        if self.is_rational() {
            return Ok(Quad::rational(self.a.recip()));
        }
        // 1/(a + b√d) = (a − b√d)/(a² − b²d)
        let n = &self.a * &self.a - &self.b * &self.b * rat_int(self.d.clone());
        Ok(Quad::mk(&self.a / &n, -(&self.b / &n), self.d.clone()))
    }

    pub fn checked_div(&self, o: &Quad) -> Result<Quad, CoreError> {
        self.checked_mul(&o.recip()?)
    }

    pub fn div(&self, o: &Quad) -> Quad {
        self.checked_div(o).expect("quadratic division")
    }

    pub fn add_int(&self, v: &Int) -> Quad {
        Quad::mk(&self.a + rat_int(v.clone()), self.b.clone(), self.d.clone())
    }

    pub fn add_rat(&self, v: &Rat) -> Quad {
        Quad::mk(&self.a + v, self.b.clone(), self.d.clone())
    }

    pub fn mul_int(&self, v: &Int) -> Quad {
        let r = rat_int(v.clone());
        Quad::mk(&self.a * &r, &self.b * &r, self.d.clone())
    }

    pub fn signum(&self) -> i32 {
        let sa = sgn(&self.a);
        let sb = sgn(&self.b);
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        let a2 = &self.a * &self.a;
        let b2d = &self.b * &self.b * rat_int(self.d.clone());
        if a2 > b2d {
            sa
        } else {
            sb
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn abs(&self) -> Quad {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// Exact floor.
    pub fn floor(&self) -> Int {
        if self.is_rational() {
            return self.a.floor().to_integer();
        }
        let l = self.a.denom().lcm(self.b.denom());
        let big_a = self.a.numer() * (&l / self.a.denom());
        let big_b = self.b.numer() * (&l / self.b.denom());
        let s = (&big_b * &big_b * &self.d).sqrt();
        if big_b.is_positive() {
            (big_a + s).div_floor(&l)
        } else {
            (big_a - s - Int::one()).div_floor(&l)
        }
    }

    /// Exact comparison; across different fields by squaring.
    pub fn cmp_quad(&self, o: &Quad) -> Ordering {
        match self.checked_sub(o) {
            Ok(diff) => diff.signum().cmp(&0),
            Err(_) => cross_field_cmp(self, o),
        }
    }

    pub fn cmp_rat(&self, r: &Rat) -> Ordering {
        self.add_rat(&-r.clone()).signum().cmp(&0)
    }

    /// Rational enclosure of width 2^-bits (a point when rational).
    pub fn enclosure(&self, bits: u32) -> RationalInterval {
        if self.is_rational() {
            return RationalInterval::point(self.a.clone());
        }
        let scale = Int::one() << bits;
        let f = self.mul_int(&scale).floor();
        let den = scale.clone();
        RationalInterval::new(
            BigRational::new(f.clone(), den.clone()),
            BigRational::new(f + 1, den),
        )
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_rational() {
            return rat_to_f64(&self.a);
        }
        let mag = self.a.abs() + self.b.abs() * rat_int(self.d.sqrt() + 1);
        let mag_bits = mag.ceil().to_integer().bits() as i64;
        let bits = (110 - mag_bits).max(64) as u32;
        let e = self.enclosure(bits);
        rat_to_f64(&e.lo)
    }

    /// Split x ∈ (0, 1] as 1/x = n + t with n = ⌊1/x⌋ and t ∈ [0, 1).
    pub fn gauss_split(&self) -> Result<(Int, Quad), CoreError> {
        if !self.is_positive() {
            return Err(CoreError::DivisionByZero);
        }
        if self.is_rational() {
            let (p, q) = (self.a.numer(), self.a.denom());
            let (n, r) = q.div_mod_floor(p);
            // gcd(r, p) = gcd(q, p) = 1 so no reduction is needed
            let t = if r.is_zero() {
                Rat::zero()
            } else {
                BigRational::new_raw(r, p.clone())
            };
            return Ok((n, Quad::rational(t)));
        }
        let inv = self.recip()?;
        let n = inv.floor();
        let t = inv.add_int(&-n.clone());
        Ok((n, t))
    }

    pub fn sqrt_d(&self) -> Option<&Int> {
        if self.is_rational() {
            None
        } else {
            Some(&self.d)
        }
    }
}

fn sgn(r: &Rat) -> i32 {
    match r.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // huge numerator and denominator: scale down both
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let shift_n = (nb - 60).max(0) as u64;
    let shift_d = (db - 60).max(0) as u64;
    let n = (r.numer() >> shift_n).to_f64().unwrap();
    let d = (r.denom() >> shift_d).to_f64().unwrap();
    n / d * 2f64.powi((shift_n as i64 - shift_d as i64) as i32)
}

fn cross_field_cmp(u: &Quad, v: &Quad) -> Ordering {
    // u − v = (a1 − a2) + b1√d1 − b2√d2 with d1 ≠ d2 both irrational;
    // compare r + s with t where r = a1 − a2, s = b1√d1, t = b2√d2
    let r = Quad::rational(&u.a - &v.a);
    let s = Quad::mk(Rat::zero(), u.b.clone(), u.d.clone());
    let t = Quad::mk(Rat::zero(), v.b.clone(), v.d.clone());
    // compare r + s vs t: sign of (r + s) and t
    let lhs = r.checked_add(&s).unwrap();
    let (sl, st) = (lhs.signum(), t.signum());
    if sl != st {
        return sl.cmp(&st);
    }
    // same sign: compare squares; lhs² and t² are in Q(√d1) and Q respectively
    let l2 = lhs.checked_mul(&lhs).unwrap();
    let t2 = t.checked_mul(&t).unwrap();
    let c = l2.checked_sub(&t2).unwrap().signum().cmp(&0);
    if sl >= 0 {
        c
    } else {
        c.reverse()
    }
}

impl Ord for Quad {
    fn cmp(&self, o: &Self) -> Ordering {
        self.cmp_quad(o)
    }
}

impl PartialOrd for Quad {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Add for Quad {
    type Output = Quad;
    fn add(self, o: Quad) -> Quad {
        self.checked_add(&o).expect("mixed quadratic fields")
    }
}

impl Sub for Quad {
    type Output = Quad;
    fn sub(self, o: Quad) -> Quad {
        self.checked_sub(&o).expect("mixed quadratic fields")
    }
}

impl Mul for Quad {
    type Output = Quad;
    fn mul(self, o: Quad) -> Quad {
        self.checked_mul(&o).expect("mixed quadratic fields")
    }
}

impl<'a> Add<&'a Quad> for &'a Quad {
    type Output = Quad;
    fn add(self, o: &Quad) -> Quad {
        self.checked_add(o).expect("mixed quadratic fields")
    }
}

impl<'a> Sub<&'a Quad> for &'a Quad {
    type Output = Quad;
    fn sub(self, o: &Quad) -> Quad {
        self.checked_sub(o).expect("mixed quadratic fields")
    }
}

impl<'a> Mul<&'a Quad> for &'a Quad {
    type Output = Quad;
    fn mul(self, o: &Quad) -> Quad {
        self.checked_mul(o).expect("mixed quadratic fields")
    }
}

impl Neg for Quad {
    type Output = Quad;
    fn neg(self) -> Quad {
        Quad::mk(-self.a, -self.b, self.d)
    }
}

impl fmt::Display for Quad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            write!(f, "{}", self.a)
        } else if self.a.is_zero() {
            write!(f, "({})*sqrt({})", self.b, self.d)
        } else {
            write!(f, "{} + ({})*sqrt({})", self.a, self.b, self.d)
        }
    }
}

impl From<Rat> for Quad {
    fn from(r: Rat) -> Quad {
        Quad::rational(r)
    }
}
