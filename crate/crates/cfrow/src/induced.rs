//! Regions of Ω, hitting times N_R, the induced map 𝔉_R with its matrix
//! A_R = A_{ε1}···A_{εN}, accumulated products, and the digit maps d_R, α_R, β_R.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exact_core::{Int, Mat2, Quad, Rat};
use crate::farey_maps::{a_eps_mul, mul_a_eps};
use crate::natural_extensions::{CellIndex, OmegaPoint, YState};

/// Default step cap for hitting-time searches.
pub const DEFAULT_CAP: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    In,
    Out,
    Undecided,
}

impl Membership {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Membership::In
        } else {
            Membership::Out
        }
    }

    pub fn decided(self) -> Result<bool> {
        match self {
            Membership::In => Ok(true),
            Membership::Out => Ok(false),
            Membership::Undecided => Err(Error::BoundaryUndecidable),
        }
    }
}

/// Membership oracle for regions that are not plain cell or rectangle unions.
pub trait RegionOracle: Send + Sync + fmt::Debug {
    fn contains(&self, z: &OmegaPoint) -> Result<Membership>;
    /// Lower-left corner (x0, y0) of a window [x0,1]×[y0,1] covering the region.
    fn window(&self) -> (f64, f64);
    fn touches_bottom_edge(&self) -> bool;
    fn describe(&self) -> Value;
}

/// Closed rectangle [x0, x1] × [y0, y1] with rational corners.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rect {
    pub x: (Rat, Rat),
    pub y: (Rat, Rat),
}

impl Rect {
    pub fn new(x0: Rat, x1: Rat, y0: Rat, y1: Rat) -> Result<Self> {
        let zero = Rat::zero();
        let one = Rat::one();
        let ok = |lo: &Rat, hi: &Rat| lo <= hi && *lo >= zero && *hi <= one;
        if !ok(&x0, &x1) || !ok(&y0, &y1) {
            return Err(Error::InvalidRegion("rectangle outside [0,1]² or inverted".into()));
        }
        Ok(Rect { x: (x0, x1), y: (y0, y1) })
    }

    pub fn contains(&self, z: &OmegaPoint) -> bool {
        if z.x.cmp_value(&Quad::rational(self.x.0.clone())).is_lt()
            || z.x.cmp_value(&Quad::rational(self.x.1.clone())).is_gt()
        {
            return false;
        }
        y_cmp(&z.y, &self.y.0) != Ordering::Less && y_cmp(&z.y, &self.y.1) != Ordering::Greater
    }

    /// Membership for plain values.
    pub fn contains_values(&self, x: &Quad, y: &Quad) -> bool {
        x.cmp_rat(&self.x.0).is_ge()
            && x.cmp_rat(&self.x.1).is_le()
            && y.cmp_rat(&self.y.0).is_ge()
            && y.cmp_rat(&self.y.1).is_le()
    }

    pub fn to_json(&self) -> Value {
        json!({"x": [self.x.0.to_string(), self.x.1.to_string()],
               "y": [self.y.0.to_string(), self.y.1.to_string()]})
    }
}

/// Compare y with a rational: cheap enclosures first, then the exact value.
pub fn y_cmp(y: &YState, r: &Rat) -> Ordering {
    for depth in [8usize, 32] {
        if let Some(o) = y.enclosure(depth).cmp_rat(r) {
            return o;
        }
    }
    y.value().cmp_rat(r)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Part {
    /// V_a ∩ H_b; a missing index means no constraint on that coordinate.
    Cell { a: Option<u64>, b: Option<u64> },
    Rect(Rect),
}

#[derive(Clone)]
pub struct Region {
    pub name: String,
    /// Cells are read from the stored digits (the adjusted map on the y = 1
    /// edge) instead of the canonical expansion of y.
    pub altered: bool,
    pub(crate) omega: bool,
    pub(crate) parts: Vec<Part>,
    pub(crate) oracle: Option<Arc<dyn RegionOracle>>,
}

impl fmt::Debug for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Region({})", self.name)
    }
}

impl Region {
    pub fn omega() -> Self {
        Region { name: "omega".into(), altered: false, omega: true, parts: vec![], oracle: None }
    }

    pub fn from_parts(name: &str, parts: Vec<Part>, altered: bool) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::NotInducible(0.0));
        }
        for p in &parts {
            if let Part::Cell { a, b } = p {
                if a == &Some(0) || b == &Some(0) {
                    return Err(Error::InvalidRegion("cell indices start at 1".into()));
                }
                if a.is_none() && b.is_none() {
                    return Err(Error::InvalidRegion("unbounded cell; use omega".into()));
                }
            }
        }
        Ok(Region { name: name.into(), altered, omega: false, parts, oracle: None })
    }

    pub fn with_oracle(name: &str, oracle: Arc<dyn RegionOracle>, parts: Vec<Part>, altered: bool) -> Self {
        Region { name: name.into(), altered, omega: false, parts, oracle: Some(oracle) }
    }

    pub fn is_omega(&self) -> bool {
        self.omega
    }

    pub fn parts(&self) -> &[Part] {
        &self.parts
    }

    pub fn oracle(&self) -> Option<&Arc<dyn RegionOracle>> {
        self.oracle.as_ref()
    }

    pub fn cell_only(&self) -> bool {
        !self.omega && self.oracle.is_none() && self.parts.iter().all(|p| matches!(p, Part::Cell { .. }))
    }

    fn cell_of(&self, z: &OmegaPoint) -> CellIndex {
        if self.altered {
            z.cell()
        } else {
            z.cell_canonical()
        }
    }

    pub fn membership(&self, z: &OmegaPoint) -> Result<Membership> {
        if self.omega {
            return Ok(Membership::In);
        }
        let cell = self.cell_of(z);
        for p in &self.parts {
            let hit = match p {
                Part::Cell { a, b } => cell_match(&cell, *a, *b),
                Part::Rect(r) => r.contains(z),
            };
            if hit {
                return Ok(Membership::In);
            }
        }
        match &self.oracle {
            Some(o) => o.contains(z),
            None => Ok(Membership::Out),
        }
    }

    pub fn contains(&self, z: &OmegaPoint) -> Result<bool> {
        self.membership(z)?.decided()
    }

    pub fn touches_bottom_edge(&self) -> bool {
        self.omega
            || self.oracle.as_ref().is_some_and(|o| o.touches_bottom_edge())
            || self.parts.iter().any(|p| match p {
                Part::Cell { b, .. } => b.is_none(),
                Part::Rect(r) => r.y.0.is_zero(),
            })
    }

    /// Lower-left corner of a covering window [x0,1]×[y0,1].
    pub fn window(&self) -> (f64, f64) {
        if self.omega {
            return (0.0, 0.0);
        }
        let mut w = (1.0f64, 1.0f64);
        let mut upd = |x0: f64, y0: f64| {
            w.0 = w.0.min(x0);
            w.1 = w.1.min(y0);
        };
        for p in &self.parts {
            match p {
                Part::Cell { a, b } => upd(
                    a.map_or(0.0, |a| 1.0 / (a as f64 + 1.0)),
                    b.map_or(0.0, |b| 1.0 / (b as f64 + 1.0)),
                ),
                Part::Rect(r) => upd(
                    crate::exact_core::rat_to_f64(&r.x.0),
                    crate::exact_core::rat_to_f64(&r.y.0),
                ),
            }
        }
        if let Some(o) = &self.oracle {
            let (x0, y0) = o.window();
            upd(x0, y0);
        }
        w
    }

    pub fn describe(&self) -> Value {
        let parts: Vec<Value> = self
            .parts
            .iter()
            .map(|p| match p {
                Part::Cell { a, b } => json!({"a": a, "b": b}),
                Part::Rect(r) => r.to_json(),
            })
            .collect();
        json!({
            "name": self.name,
            "altered": self.altered,
            "omega": self.omega,
            "parts": parts,
            "oracle": self.oracle.as_ref().map(|o| o.describe()),
        })
    }

    /// Least j in 1..limit with a part containing cell (a − j, b + j); a is
    /// None for x = 0 (no upper limit on j), b None for y = 0.
    fn first_cell_hit(&self, a: Option<&Int>, b: Option<&Int>) -> Option<Int> {
        let mut best: Option<Int> = None;
        let in_range = |j: &Int| j >= &Int::one() && a.is_none_or(|a| j < a);
        for p in &self.parts {
            let Part::Cell { a: pa, b: pb } = p else { continue };
            let ja = pa.and_then(|pa| a.map(|a| a - Int::from(pa)));
            let jb = pb.and_then(|pb| b.map(|b| Int::from(pb) - b));
            let cand = match (pa, pb) {
                (Some(_), Some(_)) => match (ja, jb) {
                    (Some(x), Some(y)) if x == y => Some(x),
                    _ => None,
                },
                (Some(_), None) => ja,
                (None, Some(_)) => jb,
                (None, None) => Some(Int::one()),
            };
            if let Some(j) = cand.filter(in_range) {
                if best.as_ref().is_none_or(|bb| &j < bb) {
                    best = Some(j);
                }
            }
        }
        best
    }
}

fn cell_match(c: &CellIndex, a: Option<u64>, b: Option<u64>) -> bool {
    let ok = |want: Option<u64>, have: &Option<Int>| match want {
        None => true,
        Some(w) => have.as_ref().is_some_and(|h| h.to_u64() == Some(w)),
    };
    ok(a, &c.a) && ok(b, &c.b)
}

/// One application of the induced map.
#[derive(Clone, Debug)]
pub struct InducedRecord {
    pub n: u64,
    pub a: Mat2,
    pub next: OmegaPoint,
}

impl InducedRecord {
    pub fn u(&self) -> &Int {
        &self.a.a
    }
    pub fn t(&self) -> &Int {
        &self.a.b
    }
    pub fn s(&self) -> &Int {
        &self.a.c
    }
    pub fn r(&self) -> &Int {
        &self.a.d
    }

    /// 1 <= s and 0 <= u <= s.
    pub fn bounds_hold(&self) -> bool {
        self.s() >= &Int::one() && !self.u().is_negative() && self.u() <= self.s()
    }
}

/// First entry of 𝔉ⁿ(z), n >= 1, into R.
pub fn induced_step(region: &Region, z: &OmegaPoint, cap: u64) -> Result<InducedRecord> {
    let mut w = z.clone();
    let mut m = Mat2::identity();
    let mut n: u64 = 0;
    if region.omega {
        let e = w.ito_step_mut();
        return Ok(InducedRecord { n: 1, a: mul_a_eps(&m, e), next: w });
    }
    let fast = region.cell_only();
    loop {
        if fast {
            let a = w.x.a1().cloned();
            let b = effective_b(region, &w);
            if let Some(j) = region.first_cell_hit(a.as_ref(), b.as_ref()) {
                let jj = j.to_u64().unwrap_or(u64::MAX);
                if n.saturating_add(jj) > cap {
                    return Err(Error::CapExceeded(cap));
                }
                w.ito_steps_flat(&j);
                m = Mat2::new(&m.a + &j * &m.b, m.b.clone(), &m.c + &j * &m.d, m.d.clone());
                return Ok(InducedRecord { n: n + jj, a: m, next: w });
            }
            let Some(a) = a else { return Err(Error::CapExceeded(cap)) };
            // skip the rest of the block and take its final ε = 1 step
            let flat = &a - Int::one();
            let fl = flat.to_u64().unwrap_or(u64::MAX);
            if n.saturating_add(fl).saturating_add(1) > cap {
                return Err(Error::CapExceeded(cap));
            }
            if !flat.is_zero() {
                w.ito_steps_flat(&flat);
                m = Mat2::new(&m.a + &flat * &m.b, m.b.clone(), &m.c + &flat * &m.d, m.d.clone());
            }
            let e = w.ito_step_mut();
            m = mul_a_eps(&m, e);
            n += fl + 1;
        } else {
            if n >= cap {
                return Err(Error::CapExceeded(cap));
            }
            let e = w.ito_step_mut();
            m = mul_a_eps(&m, e);
            n += 1;
        }
        if region.contains(&w)? {
            return Ok(InducedRecord { n, a: m, next: w });
        }
    }
}

fn effective_b(region: &Region, w: &OmegaPoint) -> Option<Int> {
    if region.altered {
        w.y.b1()
    } else {
        w.y.b1_canonical()
    }
}

pub fn hitting_time(region: &Region, z: &OmegaPoint, cap: u64) -> Result<u64> {
    Ok(induced_step(region, z, cap)?.n)
}

/// Records for z^R_0 = z, ..., z^R_{n−1}.
#[derive(Clone, Debug)]
pub struct InducedOrbit {
    pub start: OmegaPoint,
    pub records: Vec<InducedRecord>,
}

impl InducedOrbit {
    pub fn point(&self, k: usize) -> &OmegaPoint {
        if k == 0 {
            &self.start
        } else {
            &self.records[k - 1].next
        }
    }

    /// N^R_k = Σ_{l<k} N_R(z^R_l).
    pub fn index(&self, k: usize) -> u64 {
        self.records[..k].iter().map(|r| r.n).sum()
    }
}

pub fn induced_orbit(region: &Region, z: &OmegaPoint, n: usize, cap: u64) -> Result<InducedOrbit> {
    let mut records = Vec::with_capacity(n);
    let mut cur = z.clone();
    for _ in 0..n {
        let rec = induced_step(region, &cur, cap)?;
        cur = rec.next.clone();
        records.push(rec);
    }
    Ok(InducedOrbit { start: z.clone(), records })
}

/// (N^R_k, A^R_{[0,k]}) for k = 0..=n.
pub fn induced_products(region: &Region, z: &OmegaPoint, n: usize, cap: u64) -> Result<Vec<(u64, Mat2)>> {
    let orbit = induced_orbit(region, z, n, cap)?;
    Ok(accumulate(&orbit))
}

pub fn accumulate(orbit: &InducedOrbit) -> Vec<(u64, Mat2)> {
    let mut out = vec![(0u64, Mat2::identity())];
    for rec in &orbit.records {
        let (n, m) = out.last().unwrap();
        out.push((n + rec.n, m.mul_ref(&rec.a)));
    }
    out
}

#[derive(Clone, Debug)]
pub enum Preimage {
    /// w ∈ R with 𝔉_R(w) = z, found `steps` steps back; `a` is A_R(w).
    Found { w: OmegaPoint, steps: u64, a: Mat2 },
    NoPreimage,
    CapExceeded,
}

/// Backward search for 𝔉_R⁻¹(z).
pub fn induced_preimage(region: &Region, z: &OmegaPoint, cap: u64) -> Result<Preimage> {
    if z.y.is_exactly_one() {
        return Ok(Preimage::NoPreimage);
    }
    let bottom = region.touches_bottom_edge();
    let mut w = z.clone();
    let mut m = Mat2::identity();
    for j in 1..=cap {
        if w.y.is_zero() && !bottom {
            return Ok(Preimage::NoPreimage);
        }
        if w.y.is_zero() && w.x.is_zero() {
            return Ok(Preimage::NoPreimage);
        }
        let e = w.ito_step_back_mut();
        m = a_eps_mul(e, &m);
        if region.contains(&w)? {
            return Ok(Preimage::Found { w, steps: j, a: m });
        }
    }
    Ok(Preimage::CapExceeded)
}

#[derive(Clone, Debug)]
pub struct DigitMaps {
    pub d: Int,
    pub alpha: Int,
    pub beta: Int,
    pub preimage: Preimage,
}

/// d_R, α_R, β_R at z.
pub fn digit_maps(region: &Region, z: &OmegaPoint, cap: u64) -> Result<DigitMaps> {
    let rec0 = induced_step(region, z, cap)?;
    let rec1 = induced_step(region, &rec0.next, cap)?;
    let preimage = induced_preimage(region, z, cap)?;
    let d = match &preimage {
        Preimage::Found { a, .. } => a.c.clone(),
        _ => Int::one(),
    };
    let (alpha, beta) = alpha_beta(&rec0, &rec1, &d);
    Ok(DigitMaps { d, alpha, beta, preimage })
}

/// α_R(z) and β_R(z) from the records at z and at 𝔉_R(z).
pub fn alpha_beta(rec0: &InducedRecord, rec1: &InducedRecord, d: &Int) -> (Int, Int) {
    let alpha = -rec0.a.det() * d * rec1.s();
    let beta = rec0.s() * rec1.u() + rec0.r() * rec1.s();
    (alpha, beta)
}

/// Exact division helper for checked integer quotients.
pub fn exact_div(n: &Int, d: &Int) -> Result<Int> {
    use num_integer::Integer;
    let (q, r) = n.div_rem(d);
    if !r.is_zero() {
        return Err(Error::Internal(format!("{n} is not divisible by {d}")));
    }
    Ok(q)
}

pub fn rat_of(n: i64, d: i64) -> Rat {
    BigRational::new(Int::from(n), Int::from(d))
}
