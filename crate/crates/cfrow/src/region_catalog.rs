//! Named regions: H1 and the V/H cell family, S-expansion regions built from
//! a singularisation area, and α-CF regions decided by the parity of k(z).

use std::sync::Arc;

use num_traits::{One, ToPrimitive};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exact_core::{rat, rat_to_f64, Int, Quad, Rat};
use crate::farey_maps::parse_real;
use crate::induced::{Membership, Part, Rect, Region, RegionOracle};
use crate::natural_extensions::OmegaPoint;

/// Default backward cap for the k(z) search.
pub const DEFAULT_BACKWARD_CAP: u64 = 1_000_000;

pub fn region_omega() -> Region {
    Region::omega()
}

/// H1 with the adjusted map on the y = 1 edge.
pub fn region_h1() -> Region {
    Region::from_parts("h1", vec![Part::Cell { a: None, b: Some(1) }], true).unwrap()
}

pub fn region_h(b: u64) -> Result<Region> {
    Region::from_parts(&format!("h:{b}"), vec![Part::Cell { a: None, b: Some(b) }], false)
}

pub fn region_v(a: u64) -> Result<Region> {
    Region::from_parts(&format!("v:{a}"), vec![Part::Cell { a: Some(a), b: None }], false)
}

pub fn region_vh(a: u64, b: u64) -> Result<Region> {
    Region::from_parts(&format!("vh:{a},{b}"), vec![Part::Cell { a: Some(a), b: Some(b) }], false)
}

/// V_{a−λ} ∩ H_{λ+1}.
pub fn region_cell(a: u64, lambda: u64) -> Result<Region> {
    if lambda >= a {
        return Err(Error::InvalidRegion(format!("cell({a},{lambda}) needs λ < a")));
    }
    let r = region_vh(a - lambda, lambda + 1)?;
    Ok(Region { name: format!("cell:{a},{lambda}"), ..r })
}

/// Finite union of closed rational rectangles inside the closure of V1 with
/// S ∩ 𝒢(S) = ∅.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingularisationArea {
    rects: Vec<Rect>,
}

impl SingularisationArea {
    pub fn new(rects: Vec<Rect>) -> Result<Self> {
        let half = rat(1, 2);
        if rects.iter().any(|r| r.x.0 < half) {
            return Err(Error::InvalidSingularisationArea('a'));
        }
        let images: Vec<Rect> = rects.iter().map(gauss_image).collect();
        for s in &rects {
            for g in &images {
                if overlaps(s, g) {
                    return Err(Error::InvalidSingularisationArea('b'));
                }
            }
        }
        Ok(SingularisationArea { rects })
    }

    pub fn rects(&self) -> &[Rect] {
        &self.rects
    }

    /// w ∈ S: x > 1/2 and inside some rectangle.
    pub fn contains(&self, w: &OmegaPoint) -> bool {
        w.x.a1().is_some_and(|a| a.is_one()) && self.rects.iter().any(|r| r.contains(w))
    }

    pub fn contains_values(&self, x: &Quad, y: &Quad) -> bool {
        x.cmp_rat(&rat(1, 2)).is_gt() && self.rects.iter().any(|r| r.contains_values(x, y))
    }
}

/// Closed hull of 𝒢(rect) for a rectangle in the closure of V1.
fn gauss_image(r: &Rect) -> Rect {
    let one = Rat::one();
    Rect {
        x: (r.x.1.recip() - &one, r.x.0.recip() - &one),
        y: ((&one + &r.y.1).recip(), (&one + &r.y.0).recip()),
    }
}

fn overlaps(p: &Rect, q: &Rect) -> bool {
    p.x.0 <= q.x.1 && q.x.0 <= p.x.1 && p.y.0 <= q.y.1 && q.y.0 <= p.y.1
}

/// ψ(z) = 𝒢⁻¹(φ_{H1}(z)) for z = (x, [0; 1, c, rest]): (1/(c + x), [0; rest]).
pub fn psi(z: &OmegaPoint) -> Option<OmegaPoint> {
    if !z.y.b1()?.is_one() {
        return None;
    }
    let mut w = z.clone();
    w.y.pop_front();
    let c = w.y.pop_front()?;
    w.x.push_digit(c);
    Some(w)
}

#[derive(Debug)]
struct SExpansionOracle {
    area: SingularisationArea,
}

impl RegionOracle for SExpansionOracle {
    fn contains(&self, z: &OmegaPoint) -> Result<Membership> {
        if z.x.is_zero() {
            return Ok(Membership::Out);
        }
        Ok(Membership::from_bool(psi(z).is_some_and(|w| !self.area.contains(&w))))
    }

    fn window(&self) -> (f64, f64) {
        (0.0, 0.5)
    }

    fn touches_bottom_edge(&self) -> bool {
        false
    }

    fn describe(&self) -> Value {
        json!({"builder": "s_expansion",
               "rects": self.area.rects.iter().map(Rect::to_json).collect::<Vec<_>>()})
    }
}

/// ψ⁻¹(Δ) with Δ = Ω \ S.
pub fn build_s_expansion_region(area: SingularisationArea) -> Region {
    Region::with_oracle("s_expansion", Arc::new(SExpansionOracle { area }), vec![], true)
}

#[derive(Clone, Debug)]
pub struct AlphaRegionSpec {
    pub alpha: Quad,
    pub backward_cap: u64,
}

impl AlphaRegionSpec {
    pub fn new(alpha: Quad) -> Self {
        AlphaRegionSpec { alpha, backward_cap: DEFAULT_BACKWARD_CAP }
    }
}

#[derive(Debug)]
struct AlphaOracle {
    alpha: Quad,
    cap: u64,
    /// ⌊1/α⌋, bounding the cells that can meet the region.
    inv_floor: Int,
}

impl AlphaOracle {
    /// z ∈ A for z with symbolic b1 = 1: k(z) odd.
    fn in_a(&self, z: &OmegaPoint) -> Result<bool> {
        let mut w = z.clone();
        let mut k: u64 = 1;
        loop {
            // inverse of the adjusted H1 map: [0; 1, c, rest] ↦ [0; 1, rest], x ↦ 1/(c + x)
            w.y.pop_front();
            // on the y = 1 edge the preimage is the limit x → 0 < α
            let Some(c) = w.y.pop_front() else { return Ok(k % 2 == 1) };
            w.y.push_front(Int::one());
            w.x.push_digit(c);
            if w.x.cmp_value(&self.alpha).is_lt() {
                return Ok(k % 2 == 1);
            }
            k += 1;
            if k > self.cap {
                return Err(Error::BackwardCapExceeded(self.cap));
            }
        }
    }
}

impl RegionOracle for AlphaOracle {
    fn contains(&self, z: &OmegaPoint) -> Result<Membership> {
        let (Some(a), Some(b)) = (z.x.a1().cloned(), z.y.b1()) else {
            return Ok(Membership::Out);
        };
        if b.is_one() {
            return Ok(Membership::from_bool(self.in_a(z)?));
        }
        // pushed-down part: undo λ = b − 1 flat steps
        let lambda = &b - Int::one();
        if &a + &lambda > self.inv_floor {
            return Ok(Membership::Out);
        }
        let mut w = z.clone();
        w.y.decrement_b1(&lambda);
        for _ in 0..lambda.to_u64().unwrap() {
            w.x.farey_backward(0);
        }
        if w.x.cmp_value(&self.alpha).is_lt() {
            return Ok(Membership::Out);
        }
        Ok(Membership::from_bool(self.in_a(&w)?))
    }

    fn window(&self) -> (f64, f64) {
        let f = self.inv_floor.to_f64().unwrap_or(f64::MAX);
        (0.0, 1.0 / (f + 1.0))
    }

    fn touches_bottom_edge(&self) -> bool {
        false
    }

    fn describe(&self) -> Value {
        json!({"builder": "alpha", "alpha": self.alpha.to_string(), "alpha_approx": self.alpha.to_f64(),
               "backward_cap": self.cap})
    }
}

pub fn build_alpha_region(spec: &AlphaRegionSpec) -> Result<Region> {
    let a = &spec.alpha;
    if !a.is_positive() || a.cmp_quad(&Quad::one()).is_gt() {
        return Err(Error::OutOfDomain(format!("alpha = {a}")));
    }
    let inv_floor = a.recip()?.floor();
    let oracle = AlphaOracle { alpha: a.clone(), cap: spec.backward_cap, inv_floor };
    Ok(Region::with_oracle(&format!("alpha:{a}"), Arc::new(oracle), vec![], true))
}

fn parse_rational(v: &Value) -> Result<Rat> {
    let q = match v {
        Value::String(s) => parse_real(s)?,
        Value::Number(n) => parse_real(&n.to_string())?,
        _ => return Err(Error::Parse(format!("expected a rational, got {v}"))),
    };
    q.as_rational().cloned().ok_or_else(|| Error::Parse(format!("{v} is not rational")))
}

fn parse_rect(v: &Value) -> Result<Rect> {
    let pair = |k: &str| -> Result<(Rat, Rat)> {
        let arr = v.get(k).and_then(Value::as_array).filter(|a| a.len() == 2);
        let arr = arr.ok_or_else(|| Error::Parse(format!("rect needs \"{k}\": [lo, hi]")))?;
        Ok((parse_rational(&arr[0])?, parse_rational(&arr[1])?))
    };
    let (x, y) = (pair("x")?, pair("y")?);
    Rect::new(x.0, x.1, y.0, y.1)
}

/// Region from its JSON description.
pub fn region_from_json(v: &Value) -> Result<Region> {
    let mut parts = Vec::new();
    if let Some(cells) = v.get("cells").and_then(Value::as_array) {
        for c in cells {
            let idx = |k: &str| c.get(k).and_then(Value::as_u64);
            parts.push(Part::Cell { a: idx("a"), b: idx("b") });
        }
    }
    if let Some(rects) = v.get("rects").and_then(Value::as_array) {
        for r in rects {
            parts.push(Part::Rect(parse_rect(r)?));
        }
    }
    let altered = v.get("altered").and_then(Value::as_bool);
    let params = v.get("params").cloned().unwrap_or(json!({}));
    let builder = v.get("builder").and_then(Value::as_str);
    let region = match builder {
        None => {
            if parts.is_empty() {
                return Err(Error::InvalidRegion("region has no cells, rects or builder".into()));
            }
            let mut r = Region::from_parts("custom", parts, altered.unwrap_or(false))?;
            r.altered = altered.unwrap_or(false);
            r
        }
        Some("omega") => Region::omega(),
        Some("h1") => {
            parts.push(Part::Cell { a: None, b: Some(1) });
            Region::from_parts("h1", parts, altered.unwrap_or(true))?
        }
        Some("alpha") => {
            let a = params.get("alpha").ok_or_else(|| Error::Parse("alpha builder needs params.alpha".into()))?;
            let alpha = match a {
                Value::String(s) => parse_real(s)?,
                other => parse_real(&other.to_string())?,
            };
            let mut spec = AlphaRegionSpec::new(alpha);
            if let Some(c) = params.get("backward_cap").and_then(Value::as_u64) {
                spec.backward_cap = c;
            }
            with_extra(build_alpha_region(&spec)?, parts, altered)
        }
        Some("s_expansion") => {
            let mut rects = Vec::new();
            if let Some(rs) = params.get("rects").and_then(Value::as_array) {
                for r in rs {
                    rects.push(parse_rect(r)?);
                }
            }
            with_extra(build_s_expansion_region(SingularisationArea::new(rects)?), parts, altered)
        }
        Some(other) => return Err(Error::InvalidRegion(format!("unknown builder {other:?}"))),
    };
    Ok(region)
}

fn with_extra(r: Region, parts: Vec<Part>, altered: Option<bool>) -> Region {
    let name = r.name.clone();
    let oracle = r.oracle().cloned().expect("builder region");
    Region::with_oracle(&name, oracle, parts, altered.unwrap_or(true))
}

/// Shorthands: omega, h1, h:B, v:A, vh:A,B, cell:A,L, alpha:<real>, or JSON.
pub fn parse_region(text: &str) -> Result<Region> {
    let t = text.trim();
    if t.starts_with('{') {
        let v: Value = serde_json::from_str(t).map_err(|e| Error::Parse(e.to_string()))?;
        return region_from_json(&v);
    }
    let num = |s: &str| -> Result<u64> { s.trim().parse().map_err(|_| Error::Parse(format!("bad index {s:?}"))) };
    let two = |s: &str| -> Result<(u64, u64)> {
        let (a, b) = s.split_once(',').ok_or_else(|| Error::Parse(format!("expected a,b in {s:?}")))?;
        Ok((num(a)?, num(b)?))
    };
    match t.split_once(':') {
        None => match t {
            "omega" => Ok(Region::omega()),
            "h1" => Ok(region_h1()),
            _ => Err(Error::Parse(format!("unknown region {t:?}"))),
        },
        Some(("h", b)) => region_h(num(b)?),
        Some(("v", a)) => region_v(num(a)?),
        Some(("vh", s)) => {
            let (a, b) = two(s)?;
            region_vh(a, b)
        }
        Some(("cell", s)) => {
            let (a, l) = two(s)?;
            region_cell(a, l)
        }
        Some(("alpha", s)) => build_alpha_region(&AlphaRegionSpec::new(parse_real(s)?)),
        _ => Err(Error::Parse(format!("unknown region {t:?}"))),
    }
}

/// Closed-form μ̄ of the α-region where known: log(1+g) on [g², g],
/// log(1+α) above g.
pub fn alpha_region_measure_reference(alpha: f64) -> Option<f64> {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    if alpha > g && alpha <= 1.0 {
        Some((1.0 + alpha).ln())
    } else if alpha >= g * g && alpha <= g {
        Some((1.0 + g).ln())
    } else {
        None
    }
}

pub fn rect_from_f(x0: (i64, i64), x1: (i64, i64), y0: (i64, i64), y1: (i64, i64)) -> Result<Rect> {
    Rect::new(rat(x0.0, x0.1), rat(x1.0, x1.1), rat(y0.0, y0.1), rat(y1.0, y1.1))
}

pub fn rect_area_f64(r: &Rect) -> f64 {
    (rat_to_f64(&r.x.1) - rat_to_f64(&r.x.0)) * (rat_to_f64(&r.y.1) - rat_to_f64(&r.y.0))
}
