//! Points of Ω = [0,1]² held as digit data, Ito's map 𝔉 and the Gauss natural
//! extension 𝒢 acting symbolically on them, cells V_a ∩ H_b, and densities.
//!
//! x is stored as 1/(a1 + t) with t ∈ [0, 1) exact; y as a persistent list of
//! leading RCF digits followed by an exact tail value. Both maps only touch
//! the front of these structures.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact_core::{Int, Mat2, Quad, RationalInterval};

struct Node {
    d: Int,
    next: Option<Arc<Node>>,
}

impl Drop for Node {
    fn drop(&mut self) {
        // unlink iteratively so long lists do not overflow the stack
        let mut next = self.next.take();
        while let Some(n) = next {
            match Arc::try_unwrap(n) {
                Ok(mut node) => next = node.next.take(),
                Err(_) => break,
            }
        }
    }
}

/// Persistent cons-list of digits.
#[derive(Clone, Default)]
pub struct DList {
    head: Option<Arc<Node>>,
    len: usize,
}

impl DList {
    pub fn new() -> Self {
        DList::default()
    }

    pub fn from_slice(ds: &[Int]) -> Self {
        let mut l = DList::new();
        for d in ds.iter().rev() {
            l.push_front(d.clone());
        }
        l
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn front(&self) -> Option<&Int> {
        self.head.as_ref().map(|n| &n.d)
    }

    pub fn push_front(&mut self, d: Int) {
        let next = self.head.take();
        self.head = Some(Arc::new(Node { d, next }));
        self.len += 1;
    }

    pub fn pop_front(&mut self) -> Option<Int> {
        let node = self.head.take()?;
        self.head = node.next.clone();
        self.len -= 1;
        Some(node.d.clone())
    }

    pub fn iter(&self) -> impl Iterator<Item = &Int> {
        let mut cur = self.head.as_deref();
        std::iter::from_fn(move || {
            let n = cur?;
            cur = n.next.as_deref();
            Some(&n.d)
        })
    }
}

impl fmt::Debug for DList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.iter()).finish()
    }
}

/// x = 1/(head + tail), or x = 0 when head is None.
#[derive(Clone, Debug)]
pub struct XState {
    head: Option<Int>,
    tail: Quad,
}

impl XState {
    pub fn from_value(x: &Quad) -> Result<Self> {
        if x.is_negative() || x.cmp_quad(&Quad::one()).is_gt() {
            return Err(Error::OutOfDomain(format!("x = {x}")));
        }
        if x.is_zero() {
            return Ok(XState { head: None, tail: Quad::zero() });
        }
        let (a, t) = x.gauss_split()?;
        Ok(XState { head: Some(a), tail: t })
    }

    pub fn zero() -> Self {
        XState { head: None, tail: Quad::zero() }
    }

    pub fn a1(&self) -> Option<&Int> {
        self.head.as_ref()
    }

    /// The value after the leading digit, [0; a2, a3, ...].
    pub fn tail(&self) -> &Quad {
        &self.tail
    }

    pub fn is_zero(&self) -> bool {
        self.head.is_none()
    }

    pub fn value(&self) -> Quad {
        match &self.head {
            None => Quad::zero(),
            Some(h) => self.tail.add_int(h).recip().unwrap(),
        }
    }

    pub fn epsilon(&self) -> u8 {
        u8::from(self.head.as_ref().is_some_and(|h| h.is_one()))
    }

    /// Farey step; returns ε.
    pub fn farey_forward(&mut self) -> u8 {
        match &mut self.head {
            None => 0,
            Some(h) if !h.is_one() => {
                *h -= 1;
                0
            }
            Some(_) => {
                *self = XState::from_value(&self.tail).unwrap();
                1
            }
        }
    }

    /// Drop `j` from the leading digit; requires j < a1.
    pub fn farey_forward_many(&mut self, j: &Int) {
        if let Some(h) = &mut self.head {
            *h -= j;
            debug_assert!(*h >= Int::one());
        }
    }

    /// Inverse Farey branch ε.
    pub fn farey_backward(&mut self, e: u8) {
        if e == 0 {
            if let Some(h) = &mut self.head {
                *h += 1;
            }
        } else {
            let v = self.value();
            *self = XState { head: Some(Int::one()), tail: v };
        }
    }

    pub fn gauss_forward(&mut self) -> Option<Int> {
        let h = self.head.take()?;
        *self = XState::from_value(&self.tail).unwrap();
        Some(h)
    }

    /// x ↦ 1/(c + x).
    pub fn push_digit(&mut self, c: Int) {
        let v = self.value();
        *self = XState { head: Some(c), tail: v };
    }

    /// Compare x with a real, reading the leading digit first.
    pub fn cmp_value(&self, v: &Quad) -> std::cmp::Ordering {
        use std::cmp::Ordering::*;
        let Some(h) = &self.head else {
            return Quad::zero().cmp_quad(v);
        };
        // x ∈ (1/(h+1), 1/h]
        let hi = Quad::rational(num_rational::BigRational::new(Int::one(), h.clone()));
        if hi.cmp_quad(v).is_lt() {
            return Less;
        }
        let lo = Quad::rational(num_rational::BigRational::new(Int::one(), h + 1));
        if lo.cmp_quad(v).is_ge() {
            return Greater;
        }
        self.value().cmp_quad(v)
    }

    pub fn enclosure(&self, bits: u32) -> RationalInterval {
        self.value().enclosure(bits)
    }

    pub fn digits(&self, limit: usize) -> Vec<Int> {
        let mut out = Vec::new();
        let mut s = self.clone();
        while out.len() < limit {
            match s.gauss_forward() {
                Some(a) => out.push(a),
                None => break,
            }
        }
        out
    }
}

/// y = [0; d1, ..., dk + tail]: listed digits then an exact tail in [0, 1).
#[derive(Clone, Debug)]
pub struct YState {
    digits: DList,
    tail: Quad,
}

impl YState {
    pub fn from_value(y: &Quad) -> Result<Self> {
        if y.is_negative() || y.cmp_quad(&Quad::one()).is_gt() {
            return Err(Error::OutOfDomain(format!("y = {y}")));
        }
        if y.is_one() {
            return Ok(YState::one());
        }
        Ok(YState { digits: DList::new(), tail: y.clone() })
    }

    pub fn from_digits(ds: &[Int], tail: Quad) -> Self {
        YState { digits: DList::from_slice(ds), tail }
    }

    pub fn zero() -> Self {
        YState { digits: DList::new(), tail: Quad::zero() }
    }

    pub fn one() -> Self {
        YState::from_digits(&[Int::one()], Quad::zero())
    }

    pub fn listed(&self) -> &DList {
        &self.digits
    }

    pub fn is_zero(&self) -> bool {
        self.digits.is_empty() && self.tail.is_zero()
    }

    fn split_tail(&mut self) {
        if self.digits.is_empty() && !self.tail.is_zero() {
            let (a, t) = self.tail.gauss_split().unwrap();
            self.digits.push_front(a);
            self.tail = t;
        }
    }

    /// Leading digit of the stored (symbolic) expansion; None when y = 0.
    pub fn b1(&self) -> Option<Int> {
        match self.digits.front() {
            Some(d) => Some(d.clone()),
            None if self.tail.is_zero() => None,
            None => Some(self.tail.gauss_split().unwrap().0),
        }
    }

    /// Leading digit of the canonical (shorter) expansion of the value.
    pub fn b1_canonical(&self) -> Option<Int> {
        let b = self.b1()?;
        if self.digits.len() == 2 && self.tail.is_zero() && self.digits.iter().nth(1).unwrap().is_one() {
            return Some(b + Int::one());
        }
        Some(b)
    }

    /// Add `j` to the leading digit (no-op at y = 0).
    pub fn increment_b1(&mut self, j: &Int) {
        self.split_tail();
        if let Some(d) = self.digits.pop_front() {
            self.digits.push_front(d + j);
        }
    }

    /// Subtract `j` from the leading digit; requires b1 > j.
    pub fn decrement_b1(&mut self, j: &Int) {
        self.split_tail();
        if let Some(d) = self.digits.pop_front() {
            debug_assert!(&d > j);
            self.digits.push_front(d - j);
        }
    }

    pub fn push_front(&mut self, d: Int) {
        self.digits.push_front(d);
    }

    pub fn pop_front(&mut self) -> Option<Int> {
        self.split_tail();
        self.digits.pop_front()
    }

    /// [[p', p], [q', q]] of the listed digits, so y = M·tail.
    fn list_matrix(&self, limit: usize) -> Mat2 {
        let mut m = Mat2::identity();
        for d in self.digits.iter().take(limit) {
            // M · [[0, 1], [1, d]]
            m = Mat2::new(m.b.clone(), &m.a + &m.b * d, m.d.clone(), &m.c + &m.d * d);
        }
        m
    }

    pub fn value(&self) -> Quad {
        self.list_matrix(usize::MAX).mobius_quad(&self.tail).unwrap()
    }

    /// Enclosure from the first `depth` digits (exact when fewer are stored
    /// and the tail is rational).
    pub fn enclosure(&self, depth: usize) -> RationalInterval {
        if self.digits.len() <= depth && self.tail.is_rational() {
            return RationalInterval::point(self.value().as_rational().unwrap().clone());
        }
        if self.digits.len() <= depth {
            return self.value().enclosure(64);
        }
        let m = self.list_matrix(depth);
        let a = num_rational::BigRational::new(m.b.clone(), m.d.clone());
        let b = num_rational::BigRational::new(&m.a + &m.b, &m.c + &m.d);
        if a <= b {
            RationalInterval::new(a, b)
        } else {
            RationalInterval::new(b, a)
        }
    }

    /// Symbolic digits, listed first then those of the tail.
    pub fn digits(&self, limit: usize) -> Vec<Int> {
        let mut out: Vec<Int> = self.digits.iter().take(limit).cloned().collect();
        let mut cur = self.tail.clone();
        while out.len() < limit && !cur.is_zero() {
            let (a, t) = cur.gauss_split().unwrap();
            out.push(a);
            cur = t;
        }
        out
    }

    pub fn is_exactly_one(&self) -> bool {
        self.digits.len() == 1 && self.tail.is_zero() && self.digits.front().unwrap().is_one()
    }
}

/// Cell indices (a, b) of V_a ∩ H_b; None stands for ∞ (coordinate 0).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CellIndex {
    pub a: Option<Int>,
    pub b: Option<Int>,
}

impl CellIndex {
    pub fn new(a: u64, b: u64) -> Self {
        CellIndex { a: Some(Int::from(a)), b: Some(Int::from(b)) }
    }
}

impl fmt::Display for CellIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = |v: &Option<Int>| v.as_ref().map_or("inf".to_string(), |x| x.to_string());
        write!(f, "({}, {})", s(&self.a), s(&self.b))
    }
}

#[derive(Clone, Debug)]
pub struct OmegaPoint {
    pub x: XState,
    pub y: YState,
}

impl OmegaPoint {
    pub fn new(x: &Quad, y: &Quad) -> Result<Self> {
        Ok(OmegaPoint { x: XState::from_value(x)?, y: YState::from_value(y)? })
    }

    /// (x, 1).
    pub fn on_top_edge(x: &Quad) -> Result<Self> {
        Ok(OmegaPoint { x: XState::from_value(x)?, y: YState::one() })
    }

    pub fn from_states(x: XState, y: YState) -> Self {
        OmegaPoint { x, y }
    }

    pub fn x_value(&self) -> Quad {
        self.x.value()
    }

    pub fn y_value(&self) -> Quad {
        self.y.value()
    }

    /// Cell from the stored digits.
    pub fn cell(&self) -> CellIndex {
        CellIndex { a: self.x.a1().cloned(), b: self.y.b1() }
    }

    /// Cell of the value with half-open cells (1/(k+1), 1/k].
    pub fn cell_canonical(&self) -> CellIndex {
        CellIndex { a: self.x.a1().cloned(), b: self.y.b1_canonical() }
    }

    /// One step of 𝔉 in place; returns ε.
    pub fn ito_step_mut(&mut self) -> u8 {
        let e = self.x.farey_forward();
        if e == 0 {
            self.y.increment_b1(&Int::one());
        } else {
            self.y.push_front(Int::one());
        }
        e
    }

    pub fn ito_step(&self) -> (u8, OmegaPoint) {
        let mut z = self.clone();
        let e = z.ito_step_mut();
        (e, z)
    }

    /// `j` consecutive ε = 0 steps; requires j < a1.
    pub fn ito_steps_flat(&mut self, j: &Int) {
        self.x.farey_forward_many(j);
        self.y.increment_b1(j);
    }

    /// One step of 𝔉⁻¹ in place; returns the ε of the preimage.
    pub fn ito_step_back_mut(&mut self) -> u8 {
        match self.y.b1() {
            Some(b) if b.is_one() => {
                self.y.pop_front();
                self.x.farey_backward(1);
                1
            }
            Some(_) => {
                self.y.decrement_b1(&Int::one());
                self.x.farey_backward(0);
                0
            }
            None => {
                self.x.farey_backward(0);
                0
            }
        }
    }

    pub fn gauss_ne_step(&self) -> OmegaPoint {
        let mut z = self.clone();
        if let Some(a) = z.x.gauss_forward() {
            z.y.push_front(a);
        }
        z
    }

    /// 𝒢⁻¹; None on y = 0 away from the fixed line.
    pub fn gauss_ne_step_back(&self) -> Option<OmegaPoint> {
        if self.x.is_zero() && self.y.is_zero() {
            return Some(self.clone());
        }
        let mut z = self.clone();
        let c = z.y.pop_front()?;
        z.x.push_digit(c);
        Some(z)
    }

    pub fn x_enclosure(&self, bits: u32) -> RationalInterval {
        self.x.enclosure(bits)
    }

    pub fn y_enclosure(&self, depth: usize) -> RationalInterval {
        self.y.enclosure(depth)
    }

    /// Same point of Ω (value equality).
    pub fn same_point(&self, o: &OmegaPoint) -> bool {
        self.x_value() == o.x_value() && self.y_value() == o.y_value()
    }
}

/// (𝔉ᵏ z, cell) for k = 0..=n.
pub fn ito_orbit(z: &OmegaPoint, n: usize) -> Vec<(OmegaPoint, CellIndex)> {
    let mut out = Vec::with_capacity(n + 1);
    let mut w = z.clone();
    out.push((w.clone(), w.cell()));
    for _ in 0..n {
        w.ito_step_mut();
        out.push((w.clone(), w.cell()));
    }
    out
}

/// Density of μ̄, 1/(x + y − xy)².
pub fn mu_bar_density(x: f64, y: f64) -> Result<f64> {
    if x == 0.0 && y == 0.0 {
        return Err(Error::SingularAtOrigin);
    }
    let s = x + y - x * y;
    Ok(1.0 / (s * s))
}

/// Density of the Gauss measure on Ω, 1/(ln 2 (1 + xy)²).
pub fn nu_g_density(x: f64, y: f64) -> f64 {
    let s = 1.0 + x * y;
    1.0 / (std::f64::consts::LN_2 * s * s)
}

/// One CSV row of an orbit dump.
#[derive(Clone, Debug, Serialize)]
pub struct OrbitRow {
    pub n: u64,
    pub x_lo: f64,
    pub x_hi: f64,
    pub y_lo: f64,
    pub y_hi: f64,
    pub cell_a: String,
    pub cell_b: String,
}

impl OrbitRow {
    pub fn of(n: u64, z: &OmegaPoint) -> Self {
        let (x_lo, x_hi) = z.x_enclosure(64).to_f64_bounds();
        let (y_lo, y_hi) = z.y_enclosure(48).to_f64_bounds();
        let c = z.cell();
        let s = |v: &Option<Int>| v.as_ref().map_or("inf".to_string(), |x| x.to_string());
        OrbitRow { n, x_lo, x_hi, y_lo, y_hi, cell_a: s(&c.a), cell_b: s(&c.b) }
    }
}

pub fn small(v: &Int) -> u64 {
    v.to_u64().unwrap_or(u64::MAX)
}
