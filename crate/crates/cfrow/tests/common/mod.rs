//! Test helpers: seeded generators and oracles written independently of the
//! library's digit machinery.
#![allow(dead_code)]

use cfrow::exact_core::{int, Int, Quad, Rat};
use cfrow::farey_maps::cf_value;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// [0; prefix, (period)] with digits in 1..=9; `forced` digits are spliced
/// into the period.
pub fn random_periodic(r: &mut impl Rng, forced: &[u64]) -> Quad {
    let pre_len = r.gen_range(0..3);
    let per_len = r.gen_range(1..5);
    let mut prefix = vec![Int::zero()];
    prefix.extend((0..pre_len).map(|_| int(r.gen_range(1..10))));
    let mut period: Vec<Int> = (0..per_len).map(|_| int(r.gen_range(1..10))).collect();
    for &f in forced {
        let at = r.gen_range(0..=period.len());
        period.insert(at, Int::from(f));
    }
    cf_value(&prefix, &period).unwrap()
}

/// Fractional part of (p + q√d)/r for random small p, q, r and non-square d.
pub fn random_surd(r: &mut impl Rng) -> Quad {
    loop {
        let d: i64 = r.gen_range(2..400);
        let s = (d as f64).sqrt() as i64;
        if s * s == d || (s + 1) * (s + 1) == d {
            continue;
        }
        let p: i64 = r.gen_range(-60..60);
        let q: i64 = r.gen_range(1..4);
        let den: i64 = r.gen_range(1..25);
        let v = Quad::new(Rat::new(int(p), int(den)), Rat::new(int(q), int(den)), int(d)).unwrap();
        if v.is_rational() {
            continue;
        }
        let f = v.floor();
        return v.add_int(&-f);
    }
}

/// RCF digits a1..an of x ∈ (0,1) irrational, by the classical integer
/// recurrence on (P + √D)/Q.
pub fn rcf_oracle(x: &Quad, n: usize) -> Vec<Int> {
    let (a, b, d) = x.parts();
    // x = (A + B√d)/C with B > 0 (C may be negative)
    let c = a.denom().lcm(b.denom());
    let mut big_a = a.numer() * (&c / a.denom());
    let mut big_b = b.numer() * (&c / b.denom());
    let mut c = c;
    if big_b.is_negative() {
        big_a = -big_a;
        big_b = -big_b;
        c = -c;
    }
    // (A|C| + √(B² d C²)) / (C|C|) keeps Q | D − P²
    let mut p = &big_a * c.abs();
    let dd = &big_b * &big_b * d * &c * &c;
    let mut q = &c * c.abs();
    let root = dd.sqrt();
    let mut out = Vec::new();
    // skip a0
    for i in 0..=n {
        // √D lies strictly between root and root + 1
        let ai = if q.is_positive() { (&p + &root).div_floor(&q) } else { (&p + &root + Int::one()).div_floor(&q) };
        if i > 0 {
            out.push(ai.clone());
        }
        p = &ai * &q - &p;
        q = (&dd - &p * &p) / &q;
    }
    out
}

/// RCF digits of a rational in (0,1] by Euclid (shorter expansion).
pub fn rcf_rational(r: &Rat) -> Vec<Int> {
    let (mut p, mut q) = (r.numer().clone(), r.denom().clone());
    let mut out = Vec::new();
    while !p.is_zero() {
        let (a, rem) = q.div_rem(&p);
        out.push(a);
        q = p;
        p = rem;
    }
    out
}

/// RCF convergents p_k/q_k for k = -1..=n−1 from digits a0 = 0, a1, ...
pub fn rcf_convergents(digits: &[Int]) -> Vec<(Int, Int)> {
    let mut out = vec![(Int::one(), Int::zero()), (Int::zero(), Int::one())];
    for a in digits {
        let l = out.len();
        let p = a * &out[l - 1].0 + &out[l - 2].0;
        let q = a * &out[l - 1].1 + &out[l - 2].1;
        out.push((p, q));
    }
    out
}

/// Floor of a real given by shrinking rational enclosures.
fn floor_by_enclosure(f: impl Fn(u32) -> (Rat, Rat)) -> Option<Int> {
    for bits in [128u32, 256, 512, 1024] {
        let (lo, hi) = f(bits);
        let (fl, fh) = (lo.floor().to_integer(), hi.floor().to_integer());
        if fl == fh && hi.floor() != hi {
            return Some(fl);
        }
    }
    None
}

/// One G_α step using rational enclosures; exact arithmetic only when the
/// enclosure straddles an integer.
pub fn g_alpha_oracle(alpha: &Quad, x: &Quad) -> (i8, Int, Quad) {
    let ax = x.abs();
    let inv = ax.recip().unwrap();
    let d = floor_by_enclosure(|bits| {
        let e = inv.enclosure(bits);
        let ea = alpha.enclosure(bits);
        (&e.lo + Rat::one() - &ea.hi, &e.hi + Rat::one() - &ea.lo)
    })
    .unwrap_or_else(|| inv.add_int(&Int::one()).checked_sub(alpha).unwrap().floor());
    let sign = if x.is_negative() { -1 } else { 1 };
    (sign, d.clone(), inv.add_int(&-d))
}

pub fn gcd_pair(p: &Int, q: &Int) -> Int {
    p.gcd(q)
}

/// Closed rational rectangle [x0, x1] × [y0, y1].
pub type RectSpec = (Rat, Rat, Rat, Rat);

/// Walks 𝒢ʲ(x, 0) = (Tʲx, q_{j−1}/q_j) for j < m; returns the indices j with
/// 𝒢ʲ(x, 0) in S (x > 1/2 and inside a rectangle) and the RCF digits used.
pub fn gauss_orbit_hits(x: &Quad, rects: &[RectSpec], m: usize) -> (Vec<usize>, Vec<Int>) {
    let a = rcf_oracle(x, m + 2);
    let rc = rcf_convergents(&a);
    let half = Rat::new(Int::one(), Int::from(2));
    let mut t = x.clone();
    let mut hits = Vec::new();
    for j in 0..m {
        // rc[j] = (p_{j−1}, q_{j−1}), rc[j + 1] = (p_j, q_j)
        let v = Rat::new(rc[j].1.clone(), rc[j + 1].1.clone());
        let inside = t.cmp_rat(&half).is_gt()
            && rects.iter().any(|(x0, x1, y0, y1)| {
                t.cmp_rat(x0).is_ge() && t.cmp_rat(x1).is_le() && &v >= y0 && &v <= y1
            });
        if inside {
            hits.push(j);
        }
        t = t.recip().unwrap().add_int(&-a[j].clone());
    }
    (hits, a)
}

/// z-threshold for `cells` simultaneous two-sided comparisons whose joint
/// false-alarm rate equals that of a single 3σ test.
pub fn family_z(cells: usize) -> f64 {
    use statrs::distribution::{ContinuousCDF, Normal};
    let n = Normal::new(0.0, 1.0).unwrap();
    let p = 2.0 * n.cdf(-3.0) / cells as f64;
    -n.inverse_cdf(p / 2.0)
}

/// Grid test of invariance: samples come from `sample`, `step` maps a point,
/// and the hit fraction of each cell of a k×k grid on [0,1]² is compared with
/// `mass(cell)`. Returns the worst |z|-score over the cells.
pub fn grid_invariance<R: Rng>(
    rng: &mut R,
    n: usize,
    k: usize,
    mut sample: impl FnMut(&mut R) -> (f64, f64),
    mut step: impl FnMut(f64, f64) -> (f64, f64),
    mass: impl Fn(f64, f64, f64, f64) -> f64,
) -> f64 {
    let mut counts = vec![0usize; k * k];
    for _ in 0..n {
        let (x, y) = sample(rng);
        let (fx, fy) = step(x, y);
        let i = ((fx * k as f64) as usize).min(k - 1);
        let j = ((fy * k as f64) as usize).min(k - 1);
        counts[i * k + j] += 1;
    }
    let h = 1.0 / k as f64;
    let mut worst = 0f64;
    for i in 0..k {
        for j in 0..k {
            let p = mass(i as f64 * h, (i + 1) as f64 * h, j as f64 * h, (j + 1) as f64 * h);
            let se = (p * (1.0 - p) / n as f64).sqrt();
            let got = counts[i * k + j] as f64 / n as f64;
            worst = worst.max((got - p).abs() / se);
        }
    }
    worst
}
