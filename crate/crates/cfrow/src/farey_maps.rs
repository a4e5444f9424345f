//! Interval maps on exact reals: the Farey tent map, the Gauss map and
//! Nakada's α-maps; ε-digit streams, A-matrix products, Farey and Lehner
//! expansions, and a small parser for textual reals.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact_core::{int, rat, rat_int, Int, Mat2, Quad, Rat};
use crate::gcf::GcfDigits;

/// Real inputs are exact rationals or real quadratic numbers.
pub type RealRep = Quad;

fn check_unit(x: &Quad) -> Result<()> {
    if x.is_negative() || x.cmp_quad(&Quad::one()).is_gt() {
        return Err(Error::OutOfDomain(x.to_string()));
    }
    Ok(())
}

/// ε(x) = [x > 1/2].
pub fn epsilon(x: &Quad) -> u8 {
    u8::from(x.cmp_rat(&rat(1, 2)).is_gt())
}

pub fn farey_step(x: &Quad) -> Result<(u8, Quad)> {
    check_unit(x)?;
    let e = epsilon(x);
    let one = Quad::one();
    let nx = if e == 0 {
        if x.is_zero() {
            Quad::zero()
        } else {
            x.div(&(&one - x))
        }
    } else {
        (&one - x).div(x)
    };
    Ok((e, nx))
}

/// (⌊1/x⌋, 1/x − ⌊1/x⌋); the digit is None (∞) at 0.
pub fn gauss_step(x: &Quad) -> Result<(Option<Int>, Quad)> {
    check_unit(x)?;
    if x.is_zero() {
        return Ok((None, Quad::zero()));
    }
    let (a, t) = x.gauss_split()?;
    Ok((Some(a), t))
}

/// One step of G_α on [α−1, α): (sign x, ⌊1/|x| + 1 − α⌋, image).
pub fn alpha_step(alpha: &Quad, x: &Quad) -> Result<(i8, Int, Quad)> {
    if !alpha.is_positive() || alpha.cmp_quad(&Quad::one()).is_gt() {
        return Err(Error::OutOfDomain(format!("alpha = {alpha}")));
    }
    let lower = alpha.add_int(&int(-1));
    if x.cmp_quad(&lower).is_lt() || x.cmp_quad(alpha).is_ge() {
        return Err(Error::OutOfDomain(x.to_string()));
    }
    if x.is_zero() {
        return Err(Error::ZeroInput);
    }
    let sign: i8 = if x.is_negative() { -1 } else { 1 };
    let inv = x.abs().recip()?;
    let f = inv.floor();
    // d is f + 1 when 1/|x| − (f + 1) >= α − 1, else f
    let t = inv.add_int(&-(&f + Int::one()));
    let (d, nx) = if t.cmp_quad(&lower).is_ge() {
        (f + Int::one(), t)
    } else {
        let t = inv.add_int(&-f.clone());
        (f, t)
    };
    Ok((sign, d, nx))
}

/// α-expansion x = a0 + s1/(d1 + s2/(d2 + ...)) with up to n digits.
pub fn alpha_expansion(alpha: &Quad, x: &Quad, n: usize) -> Result<(Int, Vec<(i8, Int)>)> {
    // a0 = ⌊x + 1 − α⌋ puts x − a0 in [α−1, α)
    let shifted = x.checked_add(&Quad::one())?.checked_sub(alpha);
    let a0 = match shifted {
        Ok(v) => v.floor(),
        Err(_) => {
            let f = x.floor();
            let cand = x.add_int(&-(&f + Int::one()));
            if cand.cmp_quad(&alpha.add_int(&int(-1))).is_ge() {
                f + Int::one()
            } else {
                f
            }
        }
    };
    let mut cur = x.add_int(&-a0.clone());
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        match alpha_step(alpha, &cur) {
            Ok((s, d, nx)) => {
                out.push((s, d));
                cur = nx;
            }
            Err(Error::ZeroInput) => break,
            Err(e) => return Err(e),
        }
    }
    Ok((a0, out))
}

/// RCF digits a1, a2, ... of x ∈ [0, 1], at most n, stopping at 0.
pub fn rcf_digits(x: &Quad, n: usize) -> Result<Vec<Int>> {
    check_unit(x)?;
    let mut cur = x.clone();
    let mut out = Vec::new();
    while out.len() < n && !cur.is_zero() {
        let (a, t) = cur.gauss_split()?;
        out.push(a);
        cur = t;
    }
    Ok(out)
}

/// ε_1, ..., ε_n, generated block by block as 0^{a1−1} 1 0^{a2−1} 1 ...
pub fn epsilon_stream(x: &Quad, n: usize) -> Result<Vec<u8>> {
    check_unit(x)?;
    let mut out = Vec::with_capacity(n);
    let mut cur = x.clone();
    while out.len() < n {
        if cur.is_zero() {
            out.resize(n, 0);
            break;
        }
        let (a, t) = cur.gauss_split()?;
        let zeros = &a - Int::one();
        let room = (n - out.len()) as u64;
        let z = if zeros > Int::from(room) { room } else { num_traits::ToPrimitive::to_u64(&zeros).unwrap() };
        out.extend(std::iter::repeat(0).take(z as usize));
        if out.len() < n {
            out.push(1);
        }
        cur = t;
    }
    Ok(out)
}

pub fn a_eps(e: u8) -> Mat2 {
    if e == 0 {
        Mat2::from_i64(1, 0, 1, 1)
    } else {
        Mat2::from_i64(0, 1, 1, 1)
    }
}

/// Right multiplication by A_ε without a general product.
pub fn mul_a_eps(m: &Mat2, e: u8) -> Mat2 {
    if e == 0 {
        Mat2::new(&m.a + &m.b, m.b.clone(), &m.c + &m.d, m.d.clone())
    } else {
        Mat2::new(m.b.clone(), &m.a + &m.b, m.d.clone(), &m.c + &m.d)
    }
}

/// Left multiplication by A_ε.
pub fn a_eps_mul(e: u8, m: &Mat2) -> Mat2 {
    if e == 0 {
        Mat2::new(m.a.clone(), m.b.clone(), &m.a + &m.c, &m.b + &m.d)
    } else {
        Mat2::new(m.c.clone(), m.d.clone(), &m.a + &m.c, &m.b + &m.d)
    }
}

/// A_{[0,n]} = A_{ε1} ··· A_{εn}.
pub fn a_matrix_forward(x: &Quad, n: usize) -> Result<Mat2> {
    Ok(epsilon_stream(x, n)?.iter().fold(Mat2::identity(), |m, &e| mul_a_eps(&m, e)))
}

/// A_{[n,0]} = A_{εn} ··· A_{ε1}.
pub fn a_matrix_backward(x: &Quad, n: usize) -> Result<Mat2> {
    Ok(epsilon_stream(x, n)?.iter().fold(Mat2::identity(), |m, &e| a_eps_mul(e, &m)))
}

/// (u_k, s_k) for k = 0..=n, the left columns of A_{[0,k]}.
pub fn farey_convergents(x: &Quad, n: usize) -> Result<Vec<(Int, Int)>> {
    let es = epsilon_stream(x, n)?;
    let mut m = Mat2::identity();
    let mut out = vec![(m.a.clone(), m.c.clone())];
    for e in es {
        m = mul_a_eps(&m, e);
        out.push((m.a.clone(), m.c.clone()));
    }
    Ok(out)
}

/// Farey expansion digits 0..=n.
pub fn farey_expansion(x: &Quad, n: usize) -> Result<GcfDigits> {
    let es = epsilon_stream(x, n + 1)?;
    let mut v = Vec::with_capacity(n + 1);
    v.push((Int::one(), int(1 - es[0] as i64)));
    for k in 1..=n {
        v.push((int(2 * es[k - 1] as i64 - 1), int(2 - es[k] as i64)));
    }
    Ok(GcfDigits::from_vec(v))
}

/// Lehner pairs (b_k, e_{k+1}) for k = 0..n−1.
pub fn lehner_pairs(x: &Quad, n: usize) -> Result<Vec<(Int, Int)>> {
    Ok(epsilon_stream(x, n)?
        .into_iter()
        .map(|e| (int(2 - e as i64), int(2 * e as i64 - 1)))
        .collect())
}

/// x = [b0 − 1 / 1; e1/b1, e2/b2, ...] from the Lehner pairs of x + 1.
pub fn lehner_expansion(x: &Quad, n: usize) -> Result<GcfDigits> {
    let ps = lehner_pairs(x, n + 1)?;
    let mut v = Vec::with_capacity(n + 1);
    v.push((Int::one(), &ps[0].0 - Int::one()));
    for k in 1..=n {
        v.push((ps[k - 1].1.clone(), ps[k].0.clone()));
    }
    Ok(GcfDigits::from_vec(v))
}

/// Value of [a0; a1, ..., ak, (c1, ..., cm)] (parenthesised block repeats).
pub fn cf_value(prefix: &[Int], period: &[Int]) -> Result<Quad> {
    if prefix.is_empty() {
        return Err(Error::Parse("empty continued fraction".into()));
    }
    let cf_mat = |ds: &[Int]| {
        ds.iter()
            .fold(Mat2::identity(), |m, d| m.mul_ref(&Mat2::new(d.clone(), Int::one(), Int::one(), Int::zero())))
    };
    for d in prefix.iter().skip(1).chain(period) {
        if !d.is_positive() {
            return Err(Error::Parse("continued fraction digits must be positive".into()));
        }
    }
    let pre = cf_mat(prefix);
    if period.is_empty() {
        // value of the finite expansion is the last convergent
        return Ok(Quad::rational(Rat::new(pre.a.clone(), pre.c.clone())));
    }
    // y = [c1; c2, ..., cm, y] solves c y² + (d − a) y − b = 0 for M = [[a, b], [c, d]]
    let m = cf_mat(period);
    let disc = (&m.d - &m.a) * (&m.d - &m.a) + int(4) * &m.b * &m.c;
    let two_c = rat_int(int(2) * &m.c);
    let y = Quad::new(rat_int(&m.a - &m.d) / &two_c, Rat::one() / &two_c, disc)?;
    pre.mobius_quad(&y).map_err(|e| Error::Parse(e.to_string()))
}

/// Parses "sqrt(2)-1", "p/q", "0.45", "g" / "phi-frac", "phi",
/// "[0;2,2,2]" or "[0;(2)]", and arithmetic over these.
pub fn parse_real(text: &str) -> Result<Quad> {
    let mut p = Parser { s: text.as_bytes(), i: 0 };
    let v = p.expr()?;
    p.ws();
    if p.i != p.s.len() {
        return Err(Error::Parse(format!("trailing input in {text:?}")));
    }
    Ok(v)
}

struct Parser<'a> {
    s: &'a [u8],
    i: usize,
}

impl Parser<'_> {
    fn ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.i).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Parse(format!("{msg} at byte {}", self.i)))
    }

    fn expr(&mut self) -> Result<Quad> {
        let mut v = self.term()?;
        loop {
            if self.eat(b'+') {
                v = v.checked_add(&self.term()?)?;
            } else if self.eat(b'-') {
                v = v.checked_sub(&self.term()?)?;
            } else {
                return Ok(v);
            }
        }
    }

    fn term(&mut self) -> Result<Quad> {
        let mut v = self.unary()?;
        loop {
            if self.eat(b'*') {
                v = v.checked_mul(&self.unary()?)?;
            } else if self.eat(b'/') {
                let d = self.unary()?;
                v = v.checked_div(&d)?;
            } else {
                return Ok(v);
            }
        }
    }

    fn unary(&mut self) -> Result<Quad> {
        if self.eat(b'-') {
            return Ok(-self.unary()?);
        }
        self.atom()
    }

    fn integer(&mut self) -> Result<Int> {
        self.ws();
        let neg = self.eat(b'-');
        self.ws();
        let st = self.i;
        while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
            self.i += 1;
        }
        if st == self.i {
            return self.err("expected integer");
        }
        let v: Int = std::str::from_utf8(&self.s[st..self.i]).unwrap().parse().unwrap();
        Ok(if neg { -v } else { v })
    }

    fn cf_literal(&mut self) -> Result<Quad> {
        let mut prefix = vec![self.integer()?];
        let mut period = Vec::new();
        if self.eat(b';') {
            loop {
                if self.eat(b'(') {
                    loop {
                        period.push(self.integer()?);
                        if !self.eat(b',') {
                            break;
                        }
                    }
                    if !self.eat(b')') {
                        return self.err("expected ')'");
                    }
                    break;
                }
                prefix.push(self.integer()?);
                if !self.eat(b',') {
                    break;
                }
            }
        }
        if !self.eat(b']') {
            return self.err("expected ']'");
        }
        cf_value(&prefix, &period)
    }

    fn atom(&mut self) -> Result<Quad> {
        match self.peek() {
            Some(b'(') => {
                self.i += 1;
                let v = self.expr()?;
                if !self.eat(b')') {
                    return self.err("expected ')'");
                }
                Ok(v)
            }
            Some(b'[') => {
                self.i += 1;
                self.cf_literal()
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let st = self.i;
                while self.i < self.s.len() && (self.s[self.i].is_ascii_digit() || self.s[self.i] == b'.') {
                    self.i += 1;
                }
                let txt = std::str::from_utf8(&self.s[st..self.i]).unwrap();
                parse_decimal(txt).map(Quad::rational)
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let st = self.i;
                while self.i < self.s.len() && (self.s[self.i].is_ascii_alphanumeric() || self.s[self.i] == b'_') {
                    self.i += 1;
                }
                let mut name = std::str::from_utf8(&self.s[st..self.i]).unwrap().to_string();
                if name == "phi" && self.s[self.i..].starts_with(b"-frac") {
                    self.i += 5;
                    name.push_str("-frac");
                }
                match name.as_str() {
                    "g" | "phi-frac" | "phi_frac" => Ok(Quad::golden_frac()),
                    "phi" => Ok(Quad::golden_frac().add_int(&Int::one())),
                    "sqrt" => {
                        if !self.eat(b'(') {
                            return self.err("expected '(' after sqrt");
                        }
                        let v = self.expr()?;
                        if !self.eat(b')') {
                            return self.err("expected ')'");
                        }
                        let r = v.as_rational().ok_or_else(|| Error::Parse("sqrt of an irrational".into()))?.clone();
                        if r.is_negative() {
                            return Err(Error::NegativeRadicand);
                        }
                        // √(p/q) = √(pq)/q
                        let pq = r.numer() * r.denom();
                        Quad::new(Rat::zero(), Rat::new(Int::one(), r.denom().clone()), pq)
                    }
                    _ => Err(Error::Parse(format!("unknown name {name:?}"))),
                }
            }
            _ => self.err("unexpected input"),
        }
    }
}

fn parse_decimal(txt: &str) -> Result<Rat> {
    let bad = || Error::Parse(format!("bad number {txt:?}"));
    match txt.split_once('.') {
        None => Ok(rat_int(txt.parse().map_err(|_| bad())?)),
        Some((w, f)) => {
            if f.contains('.') || (w.is_empty() && f.is_empty()) {
                return Err(bad());
            }
            let whole: Int = if w.is_empty() { Int::zero() } else { w.parse().map_err(|_| bad())? };
            let frac: Int = if f.is_empty() { Int::zero() } else { f.parse().map_err(|_| bad())? };
            let scale = num_traits::pow(int(10), f.len());
            Ok(rat_int(whole) + Rat::new(frac, scale))
        }
    }
}
