//! Contraction of a GCF along a strictly increasing index sequence: the
//! contracted expansion has convergents P'_k/Q'_k = P_{n_k}/Q_{n_k}, and as
//! pairs (P'_k, Q'_k) = c_k (P_{n_k}, Q_{n_k}).

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact_core::Int;
use crate::gcf::{convergents, GcfDigits};

/// Strictly increasing indices n_0 < n_1 < ..., with n_k = k for k < 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContractionPlan {
    idx: Vec<usize>,
}

impl ContractionPlan {
    pub fn new(idx: Vec<usize>) -> Result<Self> {
        if idx.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::BadPlan);
        }
        Ok(ContractionPlan { idx })
    }

    /// n_k = step·k + offset for k < len.
    pub fn arithmetic(offset: usize, step: usize, len: usize) -> Result<Self> {
        ContractionPlan::new((0..len).map(|k| offset + step * k).collect())
    }

    pub fn len(&self) -> usize {
        self.idx.len()
    }

    pub fn is_empty(&self) -> bool {
        self.idx.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.idx
    }

    pub fn n(&self, k: i64) -> i64 {
        if k < 0 {
            k
        } else {
            self.idx[k as usize] as i64
        }
    }
}

/// Digits 0..=last in memory, with Q over index ranges.
struct Window {
    ds: Vec<(Int, Int)>,
}

impl Window {
    fn new(g: &GcfDigits, last: i64) -> Result<Self> {
        let mut ds = Vec::new();
        for k in 0..=last.max(-1) {
            ds.push(g.digit(k as usize)?);
        }
        Ok(Window { ds })
    }

    /// Q_[m,n] (bottom-right entry of B_m···B_n), 1 on an empty range.
    fn q(&self, m: i64, n: i64) -> Result<Int> {
        if n < m - 1 || m < -1 {
            return Err(Error::BadRange(m, n));
        }
        // bottom row of the running product
        let (mut c, mut d) = (Int::zero(), Int::one());
        for k in m..=n {
            let (a, b) = if k == -1 {
                (Int::one(), Int::zero())
            } else {
                self.ds[k as usize].clone()
            };
            let nd = &c * &a + &d * &b;
            c = std::mem::replace(&mut d, nd);
        }
        Ok(d)
    }

    fn nonzero_q(&self, m: i64, n: i64) -> Result<Int> {
        let q = self.q(m, n)?;
        if q.is_zero() {
            return Err(Error::NotContractable(m, n));
        }
        Ok(q)
    }

    /// det B_[m,n] = ∏ (−α_k).
    fn det(&self, m: i64, n: i64) -> Int {
        let mut acc = Int::one();
        for k in m..=n {
            if k == -1 {
                acc = -acc;
            } else {
                acc *= -&self.ds[k as usize].0;
            }
        }
        acc
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Contractability {
    Contractable { depth: usize },
    /// Q_[m, n] vanishes.
    Fails { m: i64, n: i64 },
}

/// Checks Q_[m+1,n] ≠ 0 for 0 <= m <= n <= depth via
/// Q_[m+1,n] · det B_[-1,m] = Q_n P_{m-1} − P_n Q_{m-1}.
pub fn is_contractable(g: &GcfDigits, depth: usize) -> Result<Contractability> {
    let cs = convergents(g, depth)?;
    let pq = |k: i64| &cs[(k + 2) as usize];
    for n in 0..=depth as i64 {
        let (pn, qn) = pq(n);
        for m in 0..=n {
            let (pm, qm) = pq(m - 1);
            if (qn * pm - pn * qm).is_zero() {
                return Ok(Contractability::Fails { m: m + 1, n });
            }
        }
    }
    Ok(Contractability::Contractable { depth })
}

/// The contracted expansion, one output digit per plan entry.
pub fn contract(g: &GcfDigits, plan: &ContractionPlan) -> Result<GcfDigits> {
    if plan.is_empty() {
        return Ok(GcfDigits::from_vec(vec![]));
    }
    let kk = plan.len() as i64 - 1;
    let w = Window::new(g, plan.n(kk))?;
    let n = |k: i64| plan.n(k);
    let mut out = Vec::with_capacity(plan.len());
    for k in -1..kk {
        let det = w.det(n(k - 1) + 2, n(k) + 1);
        let q_left = w.nonzero_q(n(k - 2) + 2, n(k - 1))?;
        let q_right = w.nonzero_q(n(k) + 2, n(k + 1))?;
        let alpha = -det * q_left * q_right;
        let beta = w.q(n(k - 1) + 2, n(k + 1))?;
        out.push((alpha, beta));
    }
    Ok(GcfDigits::from_vec(out))
}

/// c_0, ..., c_{k_max} with c_k = ∏_{j<k} Q_[n_{j-1}+2, n_j].
pub fn seidel_scalars(g: &GcfDigits, plan: &ContractionPlan, k_max: usize) -> Result<Vec<Int>> {
    if k_max > plan.len() {
        return Err(Error::BadPlan);
    }
    let last = if k_max == 0 { -1 } else { plan.n(k_max as i64 - 1) };
    let w = Window::new(g, last)?;
    let mut c = Int::one();
    let mut out = vec![c.clone()];
    for j in 0..k_max as i64 {
        c *= w.nonzero_q(plan.n(j - 1) + 2, plan.n(j))?;
        out.push(c.clone());
    }
    Ok(out)
}

/// Verifies (P'_k, Q'_k) = c_k (P_{n_k}, Q_{n_k}) for every plan entry.
pub fn seidel_check(g: &GcfDigits, plan: &ContractionPlan) -> Result<bool> {
    if plan.is_empty() {
        return Ok(true);
    }
    let contracted = contract(g, plan)?;
    let cp = convergents(&contracted, plan.len() - 1)?;
    let co = convergents(g, *plan.indices().last().unwrap())?;
    let cs = seidel_scalars(g, plan, plan.len() - 1)?;
    for k in 0..plan.len() {
        let (p, q) = &co[plan.indices()[k] + 2];
        let (pp, qp) = &cp[k + 2];
        if *pp != &cs[k] * p || *qp != &cs[k] * q {
            return Ok(false);
        }
    }
    Ok(true)
}
