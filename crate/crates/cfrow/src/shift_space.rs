//! The conjugated system (Ω_R, τ_R): coordinates φ_R, the shift
//! τ_R(X, Y) = (α_R/X − β_R, 1/(β_R + α_R Y)) and bilateral digit strings.
//! Only regions with s_R ≡ 1 are supported.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact_core::{Int, Quad};
use crate::induced::{alpha_beta, induced_preimage, induced_step, InducedRecord, Preimage, Region};
use crate::natural_extensions::OmegaPoint;

#[derive(Clone, Debug)]
pub struct ShiftPoint {
    pub x: Quad,
    pub y: Quad,
    /// The point of R this came from, when known.
    pub origin: Option<OmegaPoint>,
}

fn unit_record(region: &Region, z: &OmegaPoint, cap: u64) -> Result<InducedRecord> {
    let rec = induced_step(region, z, cap)?;
    if !rec.s().is_one() {
        return Err(Error::NotUnitDenominator(rec.s().to_string()));
    }
    Ok(rec)
}

/// φ_R(z) = (x − u_R, (1−y)/y) or (x − 1, 1 − y).
pub fn phi(region: &Region, z: &OmegaPoint, cap: u64) -> Result<ShiftPoint> {
    let rec = unit_record(region, z, cap)?;
    phi_with(z, rec.u())
}

fn phi_with(z: &OmegaPoint, u: &Int) -> Result<ShiftPoint> {
    let (x, y) = (z.x_value(), z.y_value());
    let one = Quad::one();
    let (sx, sy) = if u.is_zero() {
        if y.is_zero() {
            return Err(Error::NullSetPoint);
        }
        (x, (&one - &y).div(&y))
    } else if u.is_one() {
        (x.add_int(&Int::from(-1)), &one - &y)
    } else {
        return Err(Error::Internal(format!("u_R = {u} with s_R = 1")));
    };
    Ok(ShiftPoint { x: sx, y: sy, origin: Some(z.clone()) })
}

/// (X, 1/(Y+1)) for X > 0, (X+1, 1−Y) for X < 0.
pub fn phi_inverse(w: &ShiftPoint) -> Result<OmegaPoint> {
    let one = Quad::one();
    if w.x.is_zero() {
        return Err(Error::FixedRay);
    }
    if w.x.is_positive() {
        OmegaPoint::new(&w.x, &w.y.checked_add(&one)?.recip()?)
    } else {
        OmegaPoint::new(&w.x.checked_add(&one)?, &one.checked_sub(&w.y)?)
    }
}

/// τ_R(w); the fixed ray X = 0 is returned unchanged.
pub fn tau_step(region: &Region, w: &ShiftPoint, cap: u64) -> Result<ShiftPoint> {
    if w.x.is_zero() {
        return Ok(w.clone());
    }
    let z = match &w.origin {
        Some(z) => z.clone(),
        None => phi_inverse(w)?,
    };
    let rec0 = unit_record(region, &z, cap)?;
    let rec1 = unit_record(region, &rec0.next, cap)?;
    let (alpha, beta) = alpha_beta(&rec0, &rec1, &Int::one());
    let nx = Quad::rational(num_rational::BigRational::from_integer(alpha.clone()))
        .checked_div(&w.x)?
        .add_int(&-beta.clone());
    let ny = w.y.mul_int(&alpha).add_int(&beta).recip()?;
    Ok(ShiftPoint { x: nx, y: ny, origin: Some(rec0.next) })
}

/// Digit pairs (α_R, β_R) at z^R_{−m}, ..., z^R_{−1} (past, nearest first)
/// and at z^R_0, ..., z^R_{n−1} (future).
pub fn bilateral_digits(
    region: &Region,
    z: &OmegaPoint,
    m: usize,
    n: usize,
    cap: u64,
) -> Result<(Vec<(Int, Int)>, Vec<(Int, Int)>)> {
    // backward points p_1 = 𝔉_R⁻¹ z, p_2, ...
    let mut back: Vec<OmegaPoint> = Vec::new();
    let mut cur = z.clone();
    let mut exhausted = false;
    while back.len() < m + 1 {
        match induced_preimage(region, &cur, cap)? {
            Preimage::Found { w, .. } => {
                back.push(w.clone());
                cur = w;
            }
            Preimage::NoPreimage => {
                exhausted = true;
                break;
            }
            Preimage::CapExceeded => return Err(Error::BackwardCapExceeded(cap)),
        }
    }
    // forward records at z_0 .. z_n
    let mut recs = Vec::with_capacity(n + 1);
    let mut p = z.clone();
    for _ in 0..=n {
        let r = induced_step(region, &p, cap)?;
        p = r.next.clone();
        recs.push(r);
    }
    let d_of = |prev: Option<&InducedRecord>| prev.map_or(Int::one(), |r| r.s().clone());
    let back_recs: Vec<InducedRecord> = back
        .iter()
        .map(|w| induced_step(region, w, cap))
        .collect::<Result<_>>()?;
    let mut future = Vec::with_capacity(n);
    for k in 0..n {
        let prev = if k == 0 { back_recs.first() } else { Some(&recs[k - 1]) };
        future.push(alpha_beta(&recs[k], &recs[k + 1], &d_of(prev)));
    }
    let mut past = Vec::new();
    let avail = if exhausted { back.len() } else { back.len().saturating_sub(1) };
    for j in 0..avail.min(m) {
        let next = if j == 0 { &recs[0] } else { &back_recs[j - 1] };
        past.push(alpha_beta(&back_recs[j], next, &d_of(back_recs.get(j + 1))));
    }
    Ok((past, future))
}
