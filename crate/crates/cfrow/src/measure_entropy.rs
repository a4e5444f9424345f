//! μ̄-measure of regions (quadrature for cell and rectangle unions, seeded
//! Monte Carlo for oracle regions), entropy π²/(6 μ̄(R)), and denominator
//! growth along induced orbits.

use num_bigint::{BigInt, RandBigInt};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact_core::{ln_big, rat_to_f64, Quad};
use crate::induced::{induced_products, Part, Region};
use crate::natural_extensions::OmegaPoint;

pub const LEVY: f64 = std::f64::consts::PI * std::f64::consts::PI / (12.0 * std::f64::consts::LN_2);

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Method {
    ExactIntegral,
    Quadrature,
    MonteCarlo { seed: u64, samples: u64 },
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct MeasureEstimate {
    pub value: f64,
    /// Quadrature tolerance, or three standard errors.
    pub error_bound: f64,
    pub std_error: f64,
    pub method: Method,
}

#[derive(Clone, Copy, Debug)]
pub struct MeasureOptions {
    pub tol: f64,
    pub samples: u64,
    pub seed: u64,
}

impl Default for MeasureOptions {
    fn default() -> Self {
        MeasureOptions { tol: 1e-9, samples: 1_000_000, seed: 1 }
    }
}

/// μ̄ of [x0,x1]×[y0,y1]: [ln((y0 + x(1−y0))/(y1 + x(1−y1)))] from x0 to x1.
pub fn rect_mu_bar(x0: f64, x1: f64, y0: f64, y1: f64) -> f64 {
    let f = |x: f64| ((y0 + x * (1.0 - y0)) / (y1 + x * (1.0 - y1))).ln();
    f(x1) - f(x0)
}

/// Gauss measure of [x0,x1]×[y0,y1]: [ln((1 + x y1)/(1 + x y0))]/ln 2 from x0 to x1.
pub fn rect_nu_g(x0: f64, x1: f64, y0: f64, y1: f64) -> f64 {
    let f = |x: f64| ((1.0 + x * y1) / (1.0 + x * y0)).ln();
    (f(x1) - f(x0)) / std::f64::consts::LN_2
}

/// ∫_{y0}^{y1} dy/(x + y − xy)².
fn inner(x: f64, y0: f64, y1: f64) -> f64 {
    let h0 = y0 + x * (1.0 - y0);
    let h1 = y1 + x * (1.0 - y1);
    (y1 - y0) / (h0 * h1)
}

fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 48)
}

/// (x-range, y-range) of a part as closed f64 boxes.
fn part_box(p: &Part) -> ((f64, f64), (f64, f64)) {
    let cell = |k: Option<u64>| match k {
        None => (0.0, 1.0),
        Some(k) => (1.0 / (k as f64 + 1.0), 1.0 / k as f64),
    };
    match p {
        Part::Cell { a, b } => (cell(*a), cell(*b)),
        Part::Rect(r) => ((rat_to_f64(&r.x.0), rat_to_f64(&r.x.1)), (rat_to_f64(&r.y.0), rat_to_f64(&r.y.1))),
    }
}

/// Quadrature for regions made of cells and rectangles only.
pub fn quadrature_measure(region: &Region, tol: f64) -> Result<MeasureEstimate> {
    if region.is_omega() || region.oracle().is_some() {
        return Err(Error::NonIntegrable);
    }
    let boxes: Vec<_> = region.parts().iter().map(part_box).collect();
    if boxes.iter().any(|(x, y)| x.0 == 0.0 && y.0 == 0.0) {
        return Err(Error::NonIntegrable);
    }
    let mut cuts: Vec<f64> = boxes.iter().flat_map(|(x, _)| [x.0, x.1]).collect();
    cuts.push(0.0);
    cuts.push(1.0);
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();
    // y-section at x: union of intervals
    let section = |x: f64| -> f64 {
        let mut ivs: Vec<(f64, f64)> = boxes.iter().filter(|(bx, _)| bx.0 <= x && x <= bx.1).map(|(_, by)| *by).collect();
        ivs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut total = 0.0;
        let mut cur: Option<(f64, f64)> = None;
        for (lo, hi) in ivs {
            match &mut cur {
                Some(c) if lo <= c.1 => c.1 = c.1.max(hi),
                _ => {
                    if let Some(c) = cur {
                        total += inner(x, c.0, c.1);
                    }
                    cur = Some((lo, hi));
                }
            }
        }
        if let Some(c) = cur {
            total += inner(x, c.0, c.1);
        }
        total
    };
    let pieces = (cuts.len() - 1) as f64;
    let mut value = 0.0;
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mid = 0.5 * (a + b);
        if section(mid) == 0.0 {
            continue;
        }
        // integrate strictly inside the piece so boundaries do not toggle parts
        let f = |x: f64| section(x.clamp(a + (b - a) * 1e-15, b - (b - a) * 1e-15));
        value += simpson(&f, a, b, tol / pieces);
    }
    if value <= 0.0 {
        return Err(Error::NotInducible(value));
    }
    Ok(MeasureEstimate { value, error_bound: tol, std_error: 0.0, method: Method::Quadrature })
}

/// Sampler for μ̄ restricted to [x0,1]×[y0,1], normalised.
#[derive(Clone, Copy, Debug)]
pub struct WindowSampler {
    pub x0: f64,
    pub y0: f64,
    pub mass: f64,
}

impl WindowSampler {
    pub fn new(x0: f64, y0: f64) -> Result<Self> {
        if x0 <= 0.0 && y0 <= 0.0 {
            return Err(Error::NonIntegrable);
        }
        Ok(WindowSampler { x0, y0, mass: rect_mu_bar(x0, 1.0, y0, 1.0) })
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> (f64, f64) {
        let (x0, y0) = (self.x0, self.y0);
        // marginal ∝ (1−y0)/(y0 + x(1−y0))
        let h_lo = y0 + x0 * (1.0 - y0);
        let u: f64 = rng.gen();
        let h = h_lo * (-(u * h_lo.ln())).exp();
        let x = if y0 < 1.0 { ((h - y0) / (1.0 - y0)).clamp(x0, 1.0) } else { x0 };
        // conditional ∝ 1/(x + y(1−x))² on [y0, 1]
        let v: f64 = rng.gen();
        let y = if 1.0 - x < 1e-12 {
            y0 + v * (1.0 - y0)
        } else {
            let g0 = 1.0 / (x + y0 * (1.0 - x));
            let inv = g0 - v * (g0 - 1.0);
            ((1.0 / inv - x) / (1.0 - x)).clamp(y0, 1.0)
        };
        (x, y)
    }
}

/// Gauss measure on Ω: x = 2^u − 1, then y | x by inverse CDF.
pub fn sample_nu_g<R: Rng>(rng: &mut R) -> (f64, f64) {
    let u: f64 = rng.gen();
    let v: f64 = rng.gen();
    let x = 2f64.powf(u) - 1.0;
    let y = v / (1.0 + x - v * x);
    (x, y)
}

/// f64 in [0,1] refined to a 256-bit rational with random low bits.
pub fn jitter_rational<R: Rng>(v: f64, rng: &mut R) -> BigRational {
    let top = BigInt::from((v.clamp(0.0, 1.0) * 9007199254740992.0).floor() as u64);
    let low = rng.gen_bigint_range(&BigInt::zero(), &(BigInt::one() << 203u32));
    let num = (top << 203u32) + low;
    let den = BigInt::one() << 256u32;
    let r = BigRational::new(num, den);
    if r > BigRational::one() {
        BigRational::one()
    } else {
        r
    }
}

const CHUNK: u64 = 4096;

/// Chunked seeded streams: chunk i uses ChaCha8(seed) on stream i.
pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Fraction of μ̄-distributed window samples landing in R, scaled by the window mass.
pub fn monte_carlo_measure(region: &Region, samples: u64, seed: u64) -> Result<MeasureEstimate> {
    let (x0, y0) = region.window();
    let sampler = WindowSampler::new(x0, y0)?;
    let chunks = samples.div_ceil(CHUNK);
    let hits: Result<u64> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = chunk_rng(seed, c);
            let n = CHUNK.min(samples - c * CHUNK);
            let mut h = 0u64;
            for _ in 0..n {
                let (x, y) = sampler.sample(&mut rng);
                let xr = jitter_rational(x, &mut rng);
                let yr = jitter_rational(y, &mut rng);
                let z = OmegaPoint::new(&Quad::rational(xr), &Quad::rational(yr))?;
                if region.contains(&z)? {
                    h += 1;
                }
            }
            Ok(h)
        })
        .sum();
    let hits = hits?;
    let p = hits as f64 / samples as f64;
    let value = sampler.mass * p;
    let std_error = sampler.mass * (p * (1.0 - p) / samples as f64).sqrt();
    if hits == 0 {
        return Err(Error::NotInducible(0.0));
    }
    Ok(MeasureEstimate { value, error_bound: 3.0 * std_error, std_error, method: Method::MonteCarlo { seed, samples } })
}

/// μ̄(R): quadrature when the region is a cell/rectangle union, Monte Carlo otherwise.
pub fn measure_of(region: &Region, opts: &MeasureOptions) -> Result<MeasureEstimate> {
    if region.is_omega() {
        return Err(Error::NonIntegrable);
    }
    if region.oracle().is_none() {
        quadrature_measure(region, opts.tol)
    } else {
        monte_carlo_measure(region, opts.samples, opts.seed)
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct EntropyEstimate {
    pub entropy: f64,
    pub entropy_err: f64,
    pub measure: MeasureEstimate,
}

pub fn entropy_from_measure(m: &MeasureEstimate) -> EntropyEstimate {
    let c = std::f64::consts::PI * std::f64::consts::PI / 6.0;
    EntropyEstimate { entropy: c / m.value, entropy_err: c * m.error_bound / (m.value * m.value), measure: *m }
}

/// π²/(6 μ̄(R)).
pub fn entropy_of(region: &Region, opts: &MeasureOptions) -> Result<EntropyEstimate> {
    Ok(entropy_from_measure(&measure_of(region, opts)?))
}

/// (1/n) log s^R_n(z).
pub fn empirical_denominator_growth(region: &Region, z: &OmegaPoint, n: usize, cap: u64) -> Result<f64> {
    let prods = induced_products(region, z, n, cap)?;
    let s = &prods[n].1.c;
    Ok(ln_big(s) / n as f64)
}
