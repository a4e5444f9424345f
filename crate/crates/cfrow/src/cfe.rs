//! Contracted Farey expansions with respect to a region, built twice: by
//! contracting the Farey expansion along the entrance indices, and directly
//! from the induced records.

use num_traits::{One, Zero};

use crate::contraction::{contract, ContractionPlan};
use crate::error::{Error, Result};
use crate::exact_core::Int;
use crate::farey_maps::farey_expansion;
use crate::gcf::{convergents, reduce_pair, GcfDigits};
use crate::induced::{alpha_beta, exact_div, induced_orbit, induced_preimage, InducedOrbit, InducedRecord, Preimage, Region};
use crate::natural_extensions::OmegaPoint;

#[derive(Clone, Debug)]
pub struct CfeResult {
    pub digits: GcfDigits,
    /// (P_k, Q_k) for k = 0..n−1.
    pub convergents: Vec<(Int, Int)>,
    /// Records at z^R_0, ..., z^R_n.
    pub witness: Vec<InducedRecord>,
}

/// Plan n_k = N^R_{k+1} − 1 for k < n.
pub fn induced_plan(orbit: &InducedOrbit, n: usize) -> Result<ContractionPlan> {
    let mut idx = Vec::with_capacity(n);
    let mut acc: u64 = 0;
    for rec in orbit.records.iter().take(n) {
        acc += rec.n;
        idx.push((acc - 1) as usize);
    }
    ContractionPlan::new(idx)
}

/// n digits by contracting the Farey expansion of x.
pub fn cfe_by_contraction(region: &Region, z: &OmegaPoint, n: usize, cap: u64) -> Result<GcfDigits> {
    let orbit = induced_orbit(region, z, n, cap)?;
    contraction_from_orbit(&orbit, z, n)
}

fn contraction_from_orbit(orbit: &InducedOrbit, z: &OmegaPoint, n: usize) -> Result<GcfDigits> {
    let plan = induced_plan(orbit, n)?;
    let last = plan.indices().last().copied().unwrap_or(0);
    let farey = farey_expansion(&z.x_value(), last + 1)?;
    contract(&farey, &plan)
}

/// n digits from the induced records.
pub fn cfe_direct(region: &Region, z: &OmegaPoint, n: usize, cap: u64) -> Result<GcfDigits> {
    let orbit = induced_orbit(region, z, n.max(1), cap)?;
    direct_from_orbit(region, &orbit, n, cap)
}

fn direct_from_orbit(region: &Region, orbit: &InducedOrbit, n: usize, cap: u64) -> Result<GcfDigits> {
    let recs = &orbit.records;
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return Ok(GcfDigits::from_vec(out));
    }
    out.push((recs[0].s().clone(), recs[0].u().clone()));
    if n >= 2 {
        let d0 = match induced_preimage(region, &orbit.start, cap)? {
            Preimage::Found { a, .. } => a.c,
            _ => Int::one(),
        };
        let (alpha, beta) = alpha_beta(&recs[0], &recs[1], &d0);
        out.push((exact_div(&alpha, &d0)?, beta));
    }
    for k in 1..n.saturating_sub(1) {
        // d_R(z^R_k) = s_R(z^R_{k−1}) along the orbit
        let d = recs[k - 1].s();
        let (alpha, beta) = alpha_beta(&recs[k], &recs[k + 1], d);
        out.push((alpha, beta));
    }
    Ok(GcfDigits::from_vec(out))
}

/// Direct digits, their convergents, and the witness records.
pub fn cfe(region: &Region, z: &OmegaPoint, n: usize, cap: u64) -> Result<CfeResult> {
    let orbit = induced_orbit(region, z, n.max(1), cap)?;
    let digits = direct_from_orbit(region, &orbit, n, cap)?;
    let convergents = if n == 0 { vec![] } else { convergents(&digits, n - 1)?.split_off(2) };
    Ok(CfeResult { digits, convergents, witness: orbit.records })
}

/// Both routes on one orbit; errors with the first differing index.
pub fn cfe_both(region: &Region, z: &OmegaPoint, n: usize, cap: u64) -> Result<GcfDigits> {
    let orbit = induced_orbit(region, z, n.max(1), cap)?;
    let a = contraction_from_orbit(&orbit, z, n)?;
    let b = direct_from_orbit(region, &orbit, n, cap)?;
    let (va, vb) = (a.to_vec(n), b.to_vec(n));
    if let Some(k) = (0..n).find(|&k| va.get(k) != vb.get(k)) {
        return Err(Error::MismatchAt(k));
    }
    Ok(b)
}

/// Checks (P_k, Q_k) = c_k (u_{k+1}, s_{k+1}) with c_k = ∏_{j<k} s_R(z^R_j).
pub fn cfe_convergents(res: &CfeResult) -> Result<()> {
    let mut acc = crate::exact_core::Mat2::identity();
    let mut c = Int::one();
    for (k, (p, q)) in res.convergents.iter().enumerate() {
        let rec = res.witness.get(k).ok_or(Error::MismatchAt(k))?;
        acc = acc.mul_ref(&rec.a);
        let (u, s) = (&acc.a, &acc.c);
        if *p != &c * u || *q != &c * s {
            return Err(Error::MismatchAt(k));
        }
        if !s.is_zero() && reduce_pair(p, q) != reduce_pair(u, s) {
            return Err(Error::MismatchAt(k));
        }
        c *= rec.s();
    }
    Ok(())
}
