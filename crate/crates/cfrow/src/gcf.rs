//! Generalised continued fractions [β0/α0; α1/β1, α2/β2, ...] with
//! x = (β0 + α1/(β1 + α2/(β2 + ...)))/α0, their convergents via
//! B_n = [[0, α_n], [1, β_n]], digit recovery, and singularisation.

use std::fmt;
use std::sync::Arc;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exact_core::{int, ExtRational, Int, Mat2};

/// One digit pair; `beta == None` stands for β = ∞.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Digit {
    pub alpha: Int,
    pub beta: Option<Int>,
}

impl Digit {
    pub fn new(alpha: Int, beta: Int) -> Self {
        Digit { alpha, beta: Some(beta) }
    }
}

type DigitFn = dyn Fn(usize) -> Option<Digit> + Send + Sync;

#[derive(Clone)]
enum Source {
    Finite(Arc<Vec<(Int, Int)>>),
    Lazy(Arc<DigitFn>),
}

/// Digit sequence, finite or generated on demand by a pure function of the index.
#[derive(Clone)]
pub struct GcfDigits {
    src: Source,
}

impl fmt::Debug for GcfDigits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.src {
            Source::Finite(v) => f.debug_list().entries(v.iter()).finish(),
            Source::Lazy(_) => write!(f, "GcfDigits(lazy)"),
        }
    }
}

impl PartialEq for GcfDigits {
    fn eq(&self, o: &Self) -> bool {
        match (&self.src, &o.src) {
            (Source::Finite(a), Source::Finite(b)) => a == b,
            _ => false,
        }
    }
}

impl fmt::Display for GcfDigits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.src {
            Source::Lazy(_) => write!(f, "[lazy]"),
            Source::Finite(v) => {
                write!(f, "[")?;
                for (i, (a, b)) in v.iter().enumerate() {
                    match i {
                        0 => write!(f, "{b}/{a};")?,
                        1 => write!(f, " {a}/{b}")?,
                        _ => write!(f, ", {a}/{b}")?,
                    }
                }
                write!(f, "]")
            }
        }
    }
}

impl GcfDigits {
    /// Finite expansion; a β = ∞ at index n truncates before n.
    pub fn from_digits(ds: Vec<Digit>) -> Self {
        let mut v = Vec::with_capacity(ds.len());
        for d in ds {
            match d.beta {
                Some(b) => v.push((d.alpha, b)),
                None => break,
            }
        }
        GcfDigits { src: Source::Finite(Arc::new(v)) }
    }

    pub fn from_vec(v: Vec<(Int, Int)>) -> Self {
        GcfDigits { src: Source::Finite(Arc::new(v)) }
    }

    pub fn from_pairs(ps: &[(i64, i64)]) -> Self {
        GcfDigits::from_vec(ps.iter().map(|&(a, b)| (int(a), int(b))).collect())
    }

    /// RCF [a0; a1, a2, ...].
    pub fn rcf(a0: Int, rest: &[Int]) -> Self {
        let mut v = vec![(Int::one(), a0)];
        v.extend(rest.iter().map(|a| (Int::one(), a.clone())));
        GcfDigits::from_vec(v)
    }

    pub fn lazy<F>(f: F) -> Self
    where
        F: Fn(usize) -> Option<Digit> + Send + Sync + 'static,
    {
        GcfDigits { src: Source::Lazy(Arc::new(f)) }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.src, Source::Finite(_))
    }

    pub fn finite_len(&self) -> Option<usize> {
        match &self.src {
            Source::Finite(v) => Some(v.len()),
            Source::Lazy(_) => None,
        }
    }

    /// Digit n, or None past the end.
    pub fn get(&self, n: usize) -> Option<(Int, Int)> {
        match &self.src {
            Source::Finite(v) => v.get(n).cloned(),
            Source::Lazy(f) => f(n).and_then(|d| d.beta.map(|b| (d.alpha, b))),
        }
    }

    pub fn digit(&self, n: usize) -> Result<(Int, Int)> {
        self.get(n).ok_or(Error::IndexBeyondExpansion(n))
    }

    /// First `len` digits as a finite expansion.
    pub fn prefix(&self, len: usize) -> Result<GcfDigits> {
        let mut v = Vec::with_capacity(len);
        for n in 0..len {
            v.push(self.digit(n)?);
        }
        Ok(GcfDigits::from_vec(v))
    }

    /// Digits of a finite expansion, or up to `limit` of a lazy one.
    pub fn to_vec(&self, limit: usize) -> Vec<(Int, Int)> {
        match &self.src {
            Source::Finite(v) => v.iter().take(limit).cloned().collect(),
            Source::Lazy(_) => (0..limit).map_while(|n| self.get(n)).collect(),
        }
    }

    pub fn alphas(&self, limit: usize) -> Vec<Int> {
        self.to_vec(limit).into_iter().map(|d| d.0).collect()
    }

    pub fn betas(&self, limit: usize) -> Vec<Int> {
        self.to_vec(limit).into_iter().map(|d| d.1).collect()
    }

    /// {"alpha": [...], "beta": [...]}; big values become strings.
    pub fn to_json(&self, limit: usize) -> Value {
        let v = self.to_vec(limit);
        json!({
            "alpha": v.iter().map(|d| int_json(&d.0)).collect::<Vec<_>>(),
            "beta": v.iter().map(|d| int_json(&d.1)).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<GcfDigits> {
        let arr = |k: &str| -> Result<Vec<Value>> {
            v.get(k)
                .and_then(Value::as_array)
                .cloned()
                .ok_or_else(|| Error::Parse(format!("missing array \"{k}\"")))
        };
        let (al, be) = (arr("alpha")?, arr("beta")?);
        if al.len() != be.len() {
            return Err(Error::Parse("alpha and beta lengths differ".into()));
        }
        let mut ds = Vec::with_capacity(al.len());
        for (a, b) in al.iter().zip(&be) {
            let alpha = json_int(a)?.ok_or_else(|| Error::Parse("alpha cannot be inf".into()))?;
            if alpha.is_zero() {
                return Err(Error::ZeroNumerator(ds.len()));
            }
            ds.push(Digit { alpha, beta: json_int(b)? });
        }
        Ok(GcfDigits::from_digits(ds))
    }
}

pub fn int_json(v: &Int) -> Value {
    match v.to_i64() {
        Some(x) => json!(x),
        None => json!(v.to_string()),
    }
}

/// Integer from a JSON number or string; "inf" gives None.
pub fn json_int(v: &Value) -> Result<Option<Int>> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(|x| Some(int(x)))
            .ok_or_else(|| Error::Parse(format!("not an integer: {n}"))),
        Value::String(s) if s == "inf" || s == "∞" => Ok(None),
        Value::String(s) => s
            .trim()
            .parse::<Int>()
            .map(Some)
            .map_err(|_| Error::Parse(format!("not an integer: {s}"))),
        _ => Err(Error::Parse(format!("unexpected value {v}"))),
    }
}

pub fn b_matrix(alpha: &Int, beta: &Int) -> Mat2 {
    Mat2::new(Int::zero(), alpha.clone(), Int::one(), beta.clone())
}

/// B_{-1}.
pub fn b_minus_one() -> Mat2 {
    Mat2::from_i64(0, 1, 1, 0)
}

/// B_m ··· B_n; the empty range m = n + 1 is the identity.
pub fn partial_matrix(g: &GcfDigits, m: i64, n: i64) -> Result<Mat2> {
    if m < -1 || n < m - 1 {
        return Err(Error::BadRange(m, n));
    }
    let mut acc = Mat2::identity();
    for k in m..=n {
        let b = if k == -1 {
            b_minus_one()
        } else {
            let (a, b) = g.digit(k as usize)?;
            b_matrix(&a, &b)
        };
        acc = acc.mul_ref(&b);
    }
    Ok(acc)
}

/// Q_[m,n], with Q_[m,m-1] = 1.
pub fn q_range(g: &GcfDigits, m: i64, n: i64) -> Result<Int> {
    Ok(partial_matrix(g, m, n)?.d)
}

/// P_[m,n].
pub fn p_range(g: &GcfDigits, m: i64, n: i64) -> Result<Int> {
    Ok(partial_matrix(g, m, n)?.b)
}

/// (P_k, Q_k) for k = -2..=n.
pub fn convergents(g: &GcfDigits, n: usize) -> Result<Vec<(Int, Int)>> {
    let mut out = Vec::with_capacity(n + 3);
    out.push((Int::zero(), Int::one()));
    out.push((Int::one(), Int::zero()));
    for k in 0..=n {
        let (a, b) = g.digit(k)?;
        let (p1, q1) = &out[k + 1];
        let (p2, q2) = &out[k];
        let p = &b * p1 + &a * p2;
        let q = &b * q1 + &a * q2;
        out.push((p, q));
    }
    Ok(out)
}

/// Convergents of all digits of a finite expansion, k = -2..=len-1.
pub fn all_convergents(g: &GcfDigits) -> Result<Vec<(Int, Int)>> {
    let len = g.finite_len().ok_or(Error::Internal("lazy expansion".into()))?;
    if len == 0 {
        return Ok(vec![(Int::zero(), Int::one()), (Int::one(), Int::zero())]);
    }
    convergents(g, len - 1)
}

pub fn reduce_pair(p: &Int, q: &Int) -> (Int, Int) {
    let g = p.gcd(q);
    if g.is_zero() {
        return (p.clone(), q.clone());
    }
    let (mut p, mut q) = (p / &g, q / &g);
    if q.is_negative() {
        p = -p;
        q = -q;
    }
    (p, q)
}

/// Value of a finite expansion.
pub fn evaluate_finite(g: &GcfDigits) -> Result<ExtRational> {
    let cs = all_convergents(g)?;
    let (p, q) = cs.last().unwrap();
    ExtRational::from_pair(p, q)
}

/// Digits from convergents (P_0, Q_0), (P_1, Q_1), ... with the standard seeds.
pub fn digits_from_convergents(ps: &[(Int, Int)]) -> Result<GcfDigits> {
    let mut prev = (Int::zero(), Int::one());
    let mut cur = (Int::one(), Int::zero());
    let mut out = Vec::with_capacity(ps.len());
    for (k, (p, q)) in ps.iter().enumerate() {
        // [[P_{k-2}, P_{k-1}], [Q_{k-2}, Q_{k-1}]]^{-1} (p, q)
        let m = Mat2::new(prev.0.clone(), cur.0.clone(), prev.1.clone(), cur.1.clone());
        let det = m.det();
        if det.is_zero() {
            return Err(Error::SingularPrefix(k as i64 - 1));
        }
        let (an, bn) = m.adjugate().apply_vec((p, q));
        let (alpha, ra) = an.div_rem(&det);
        let (beta, rb) = bn.div_rem(&det);
        if !ra.is_zero() || !rb.is_zero() {
            return Err(Error::NonIntegralDigit(k as i64));
        }
        if alpha.is_zero() {
            return Err(Error::ZeroNumerator(k));
        }
        out.push((alpha, beta));
        prev = std::mem::replace(&mut cur, (p.clone(), q.clone()));
    }
    Ok(GcfDigits::from_vec(out))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SrcfClass {
    /// Regular; `verified_depth` digits inspected.
    Rcf { verified_depth: usize },
    /// Semi-regular; the tail condition holds within the inspected window.
    Srcf { verified_depth: usize },
    Neither(String),
}

/// Check the SRCF conditions on a finite expansion or a window of a lazy one.
pub fn validate_srcf(g: &GcfDigits, window: usize) -> SrcfClass {
    let ds = g.to_vec(window);
    if ds.is_empty() {
        return SrcfClass::Neither("empty expansion".into());
    }
    if !ds[0].0.is_one() {
        return SrcfClass::Neither("alpha_0 != 1".into());
    }
    let mut regular = true;
    for (n, (a, b)) in ds.iter().enumerate().skip(1) {
        if a.abs() != Int::one() {
            return SrcfClass::Neither(format!("|alpha_{n}| != 1"));
        }
        if !b.is_positive() {
            return SrcfClass::Neither(format!("beta_{n} <= 0"));
        }
        if a.is_negative() {
            regular = false;
        }
    }
    for n in 1..ds.len().saturating_sub(1) {
        if &ds[n + 1].0 + &ds[n].1 < Int::one() {
            return SrcfClass::Neither(format!("alpha_{} + beta_{n} < 1", n + 1));
        }
    }
    if !g.is_finite() {
        // the infinitely-often condition, visible only on the window
        let tail_ok = (1..ds.len().saturating_sub(1))
            .rev()
            .take(8)
            .any(|n| &ds[n + 1].0 + &ds[n].1 >= int(2));
        if ds.len() > 2 && !tail_ok {
            return SrcfClass::Neither("alpha_{n+1} + beta_n < 2 near the window end".into());
        }
    }
    let verified_depth = ds.len();
    if regular {
        SrcfClass::Rcf { verified_depth }
    } else {
        SrcfClass::Srcf { verified_depth }
    }
}

/// Singularise a finite SRCF at the given positions (each deletes P_n/Q_n).
pub fn singularise(g: &GcfDigits, positions: &[usize]) -> Result<GcfDigits> {
    let mut v = g.to_vec(g.finite_len().ok_or(Error::Internal("lazy expansion".into()))?);
    let mut pos = positions.to_vec();
    pos.sort_unstable();
    pos.dedup();
    for w in pos.windows(2) {
        if w[1] == w[0] + 1 {
            return Err(Error::AdjacentPositions(w[0], w[1]));
        }
    }
    for &n in &pos {
        if n + 2 >= v.len() || !v[n + 1].1.is_one() || !v[n + 2].0.is_one() {
            return Err(Error::NotSingularisable(n));
        }
    }
    for &n in pos.iter().rev() {
        let a1 = v[n + 1].0.clone();
        let b2 = v[n + 2].1.clone();
        v[n].1 += &a1;
        v[n + 2] = (-a1, b2 + Int::one());
        v.remove(n + 1);
    }
    Ok(GcfDigits::from_vec(v))
}

/// (j, λ) with n = a1 + ... + a_j + λ and 0 <= λ < a_{j+1}; `rcf` holds a1, a2, ...
pub fn classify_farey_index(rcf: &[Int], n: u64) -> Result<(usize, u64)> {
    let mut rest = Int::from(n);
    for (j, a) in rcf.iter().enumerate() {
        if &rest < a {
            return Ok((j, rest.to_u64().unwrap()));
        }
        rest -= a;
    }
    Err(Error::IndexBeyondExpansion(rcf.len()))
}
