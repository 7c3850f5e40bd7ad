//! Canonical sparse polynomials over `F_q` and the brute-force root oracle.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::field::{Element, FieldCtx, FieldError};
use crate::numtheory::{divisors, gcd, mul_mod};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("exponent overflow at byte {offset}")]
    ExponentOverflow { offset: usize },
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("polynomials live over different fields")]
    FieldMismatch,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// `f = sum c_i x^{e_i}` with strictly decreasing exponents and nonzero
/// coefficients. The zero polynomial has no terms.
#[derive(Clone, PartialEq, Eq)]
pub struct SparsePoly {
    ctx: Arc<FieldCtx>,
    terms: Vec<(u64, Element)>,
}

impl fmt::Debug for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SparsePoly[{}]({})", self.ctx, self)
    }
}

/// Exact root set `Z(f)` in `F_q^*`, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootReport {
    pub roots: Vec<Element>,
    pub count: usize,
}

impl RootReport {
    fn new(mut roots: Vec<Element>) -> Self {
        roots.sort_unstable();
        let count = roots.len();
        RootReport { roots, count }
    }

    /// One CSV record: field, polynomial, count, `;`-separated roots.
    pub fn csv_record(&self, f: &SparsePoly) -> [String; 4] {
        let ctx = f.ctx();
        let roots: Vec<String> = self.roots.iter().map(|&r| ctx.fmt_element(r)).collect();
        [ctx.spec(), f.to_string(), self.count.to_string(), roots.join(";")]
    }
}

/// How the brute-force oracle walks `F_q^*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootStrategy {
    /// Square-and-multiply evaluation at every element.
    Naive,
    /// Walk powers of a generator, updating each term's discrete log.
    LogWalk,
    /// Split `F_q^*` into the `d` cosets of the `d`-th powers and evaluate the
    /// exponent-reduced polynomial on each (`y^e = xi^a y^b` on a coset).
    Cosets(u64),
}

const PAR_THRESHOLD: u64 = 1 << 14;

impl SparsePoly {
    pub fn zero(ctx: Arc<FieldCtx>) -> Self {
        SparsePoly { ctx, terms: Vec::new() }
    }

    pub fn constant(ctx: Arc<FieldCtx>, c: Element) -> Self {
        Self::monomial(ctx, 0, c)
    }

    pub fn monomial(ctx: Arc<FieldCtx>, e: u64, c: Element) -> Self {
        let terms = if c.is_zero() { Vec::new() } else { vec![(e, c)] };
        SparsePoly { ctx, terms }
    }

    /// Canonicalizes arbitrary `(exponent, coefficient)` pairs: like terms are
    /// combined and zero coefficients dropped.
    pub fn from_terms(ctx: Arc<FieldCtx>, terms: impl IntoIterator<Item = (u64, Element)>) -> Self {
        let mut raw: Vec<(u64, Element)> = terms.into_iter().collect();
        raw.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        let terms = merge_sorted(&ctx, raw);
        SparsePoly { ctx, terms }
    }

    /// Convenience constructor from integer coefficients (prime subfield).
    pub fn from_ints(ctx: Arc<FieldCtx>, terms: &[(u64, i64)]) -> Self {
        let t: Vec<_> = terms.iter().map(|&(e, c)| (e, ctx.from_int(c))).collect();
        Self::from_terms(ctx, t)
    }

    pub fn parse(text: &str, ctx: Arc<FieldCtx>) -> Result<Self, PolyError> {
        Parser { src: text.as_bytes(), pos: 0, ctx: &ctx }.poly().map(|t| Self::from_terms(ctx.clone(), t))
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn terms(&self) -> &[(u64, Element)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of terms `t`.
    pub fn sparsity(&self) -> usize {
        self.terms.len()
    }

    /// `f°`, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u64> {
        self.terms.first().map(|t| t.0)
    }

    /// `f°°`, the exponent of the second-highest term.
    pub fn second_degree(&self) -> Option<u64> {
        self.terms.get(1).map(|t| t.0)
    }

    pub fn leading_coeff(&self) -> Option<Element> {
        self.terms.first().map(|t| t.1)
    }

    pub fn constant_term(&self) -> Element {
        match self.terms.last() {
            Some(&(0, c)) => c,
            _ => Element::ZERO,
        }
    }

    pub fn coeff(&self, e: u64) -> Element {
        self.terms
            .binary_search_by(|t| e.cmp(&t.0))
            .map(|i| self.terms[i].1)
            .unwrap_or(Element::ZERO)
    }

    pub fn is_monic(&self) -> bool {
        self.leading_coeff() == Some(self.ctx.one())
    }

    /// Polynomial minus its leading term.
    pub fn tail(&self) -> SparsePoly {
        SparsePoly { ctx: self.ctx.clone(), terms: self.terms.iter().skip(1).copied().collect() }
    }

    /// `sum c_i a^{e_i}`, one square-and-multiply per term.
    pub fn eval(&self, a: Element) -> Element {
        let ctx = &self.ctx;
        self.terms
            .iter()
            .fold(Element::ZERO, |acc, &(e, c)| ctx.add(acc, ctx.mul(c, ctx.pow(a, e))))
    }

    fn same_field(&self, other: &SparsePoly) -> Result<(), PolyError> {
        if Arc::ptr_eq(&self.ctx, &other.ctx) || self.ctx == other.ctx {
            Ok(())
        } else {
            Err(PolyError::FieldMismatch)
        }
    }

    pub fn add(&self, other: &SparsePoly) -> Result<SparsePoly, PolyError> {
        self.same_field(other)?;
        let mut all = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < other.terms.len() {
            let take_left = j == other.terms.len()
                || (i < self.terms.len() && self.terms[i].0 >= other.terms[j].0);
            if take_left {
                all.push(self.terms[i]);
                i += 1;
            } else {
                all.push(other.terms[j]);
                j += 1;
            }
        }
        Ok(SparsePoly { ctx: self.ctx.clone(), terms: merge_sorted(&self.ctx, all) })
    }

    pub fn neg(&self) -> SparsePoly {
        let ctx = &self.ctx;
        SparsePoly { ctx: ctx.clone(), terms: self.terms.iter().map(|&(e, c)| (e, ctx.neg(c))).collect() }
    }

    pub fn sub(&self, other: &SparsePoly) -> Result<SparsePoly, PolyError> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: Element) -> SparsePoly {
        if c.is_zero() {
            return SparsePoly::zero(self.ctx.clone());
        }
        let ctx = &self.ctx;
        SparsePoly { ctx: ctx.clone(), terms: self.terms.iter().map(|&(e, a)| (e, ctx.mul(a, c))).collect() }
    }

    /// Multiplies by `x^s`.
    pub fn shift(&self, s: u64) -> Result<SparsePoly, PolyError> {
        let terms = self
            .terms
            .iter()
            .map(|&(e, c)| e.checked_add(s).map(|e| (e, c)).ok_or(PolyError::ExponentOverflow { offset: 0 }))
            .collect::<Result<_, _>>()?;
        Ok(SparsePoly { ctx: self.ctx.clone(), terms })
    }

    pub fn mul(&self, other: &SparsePoly) -> Result<SparsePoly, PolyError> {
        self.same_field(other)?;
        let ctx = &self.ctx;
        let mut prod = Vec::with_capacity(self.terms.len() * other.terms.len());
        for &(e1, c1) in &self.terms {
            for &(e2, c2) in &other.terms {
                let e = e1.checked_add(e2).ok_or(PolyError::ExponentOverflow { offset: 0 })?;
                prod.push((e, ctx.mul(c1, c2)));
            }
        }
        prod.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        Ok(SparsePoly { ctx: ctx.clone(), terms: merge_sorted(ctx, prod) })
    }

    /// `f^n` by repeated squaring; `f^0 = 1`.
    pub fn pow(&self, mut n: u64) -> Result<SparsePoly, PolyError> {
        if let Some(deg) = self.degree() {
            deg.checked_mul(n).ok_or(PolyError::ExponentOverflow { offset: 0 })?;
        }
        let mut acc = SparsePoly::constant(self.ctx.clone(), self.ctx.one());
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// `x^{f°} f(1/x)`: exponent `e` becomes `f° - e`.
    pub fn reversal(&self) -> Result<SparsePoly, PolyError> {
        let deg = self.degree().ok_or(PolyError::ZeroPolynomial)?;
        let terms = self.terms.iter().rev().map(|&(e, c)| (deg - e, c)).collect();
        Ok(SparsePoly { ctx: self.ctx.clone(), terms })
    }

    /// Divides through by the leading coefficient.
    pub fn make_monic(&self) -> Result<SparsePoly, PolyError> {
        let lead = self.leading_coeff().ok_or(PolyError::ZeroPolynomial)?;
        Ok(self.scale(self.ctx.inv(lead)?))
    }

    /// Factors out the largest power of `x`: returns `(v, f / x^v)`.
    pub fn strip_x_power(&self) -> (u64, SparsePoly) {
        let v = self.terms.last().map_or(0, |t| t.0);
        let terms = self.terms.iter().map(|&(e, c)| (e - v, c)).collect();
        (v, SparsePoly { ctx: self.ctx.clone(), terms })
    }

    /// Maps each positive exponent `e` to `e mod (q-1)`; `Z(f)` is unchanged
    /// because `a^{q-1} = 1` on `F_q^*`.
    pub fn reduce_exponents(&self) -> SparsePoly {
        let n = self.ctx.order();
        let t = self.terms.iter().map(|&(e, c)| (if e > 0 { e % n } else { 0 }, c));
        SparsePoly::from_terms(self.ctx.clone(), t)
    }

    /// `gcd` of all exponents together with `q-1` (`D(f)`); a constant gives `q-1`.
    pub fn exponent_gcd_with_group(&self) -> Result<u64, PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        Ok(self.terms.iter().fold(self.ctx.order(), |g, &(e, _)| gcd(g, e)))
    }

    /// Exact `Z(f)` by exhaustive evaluation over `F_q^*`.
    pub fn count_roots_bruteforce(&self) -> Result<RootReport, PolyError> {
        self.roots_with(RootStrategy::LogWalk)
    }

    pub fn roots_with(&self, strategy: RootStrategy) -> Result<RootReport, PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        self.ctx.check_cap()?;
        let roots = match strategy {
            RootStrategy::Naive => self.ctx.nonzero().filter(|&a| self.eval(a).is_zero()).collect(),
            RootStrategy::LogWalk => self.roots_log_walk()?,
            RootStrategy::Cosets(d) => self.roots_by_cosets(d)?,
        };
        Ok(RootReport::new(roots))
    }

    /// Boolean root indicator indexed by discrete log: `out[j]` iff `f(g^j) = 0`.
    pub(crate) fn root_logs(&self) -> Result<Vec<bool>, PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        let ctx = &self.ctx;
        let tables = ctx.tables()?;
        let n = ctx.order();
        let terms: Vec<(u64, u64)> = self
            .terms
            .iter()
            .map(|&(e, c)| (tables.log[c.value() as usize] as u64, e % n))
            .collect();
        let scan = |start: u64, end: u64| -> Vec<bool> {
            let mut idx: Vec<u64> = terms.iter().map(|&(lc, e)| (lc + mul_mod(start, e, n)) % n).collect();
            let mut out = Vec::with_capacity((end - start) as usize);
            for _ in start..end {
                let mut acc = Element::ZERO;
                for (slot, &(_, e)) in idx.iter_mut().zip(&terms) {
                    acc = ctx.add(acc, Element::from_packed(tables.exp[*slot as usize] as u64));
                    *slot += e;
                    if *slot >= n {
                        *slot -= n;
                    }
                }
                out.push(acc.is_zero());
            }
            out
        };
        if n < PAR_THRESHOLD {
            return Ok(scan(0, n));
        }
        let chunk = PAR_THRESHOLD;
        let starts: Vec<u64> = (0..n).step_by(chunk as usize).collect();
        let parts: Vec<Vec<bool>> = starts.par_iter().map(|&s| scan(s, (s + chunk).min(n))).collect();
        Ok(parts.concat())
    }

    fn roots_log_walk(&self) -> Result<Vec<Element>, PolyError> {
        let tables = self.ctx.tables()?;
        Ok(self
            .root_logs()?
            .iter()
            .enumerate()
            .filter(|(_, &z)| z)
            .map(|(j, _)| Element::from_packed(tables.exp[j] as u64))
            .collect())
    }

    fn roots_by_cosets(&self, d: u64) -> Result<Vec<Element>, PolyError> {
        let ctx = &self.ctx;
        ctx.check_divisor(d)?;
        let tables = ctx.tables()?;
        let n = ctx.order();
        let m = n / d;
        let per_coset = |i: u64| -> Vec<Element> {
            // xi_i = g^{i m}; on the coset {g^{i + d j}}, y^e = xi_i^a y^b.
            let reduced = SparsePoly::from_terms(
                ctx.clone(),
                self.terms.iter().map(|&(e, c)| {
                    let (a, b) = (e / m, e % m);
                    let xi_pow = tables.exp[(mul_mod(mul_mod(i, m, n), a % n, n)) as usize] as u64;
                    (b, ctx.mul(c, Element::from_packed(xi_pow)))
                }),
            );
            if reduced.is_zero() {
                return (0..m).map(|j| Element::from_packed(tables.exp[(i + d * j) as usize] as u64)).collect();
            }
            let terms: Vec<(u64, u64)> = reduced
                .terms
                .iter()
                .map(|&(b, c)| (tables.log[c.value() as usize] as u64, b))
                .collect();
            let mut out = Vec::new();
            for j in 0..m {
                let y = i + d * j;
                let mut acc = Element::ZERO;
                for &(lc, b) in &terms {
                    let idx = (lc + mul_mod(y, b, n)) % n;
                    acc = ctx.add(acc, Element::from_packed(tables.exp[idx as usize] as u64));
                }
                if acc.is_zero() {
                    out.push(Element::from_packed(tables.exp[y as usize] as u64));
                }
            }
            out
        };
        Ok((0..d).into_par_iter().flat_map_iter(per_coset).collect())
    }

    /// Whether `f(a) = 0` for every `a` in `coset`.
    pub fn vanishes_on_coset(&self, coset: &[Element]) -> bool {
        coset.iter().all(|&a| self.eval(a).is_zero())
    }

    /// Representatives (as discrete-log residues `r`, `0 <= r < d`) of the
    /// cosets `{g^{r + d j}}` of `(F_q^*)^d` on which `f` vanishes entirely.
    pub fn vanishing_cosets(&self, d: u64) -> Result<Vec<u64>, PolyError> {
        self.ctx.check_divisor(d)?;
        let roots = self.root_logs()?;
        Ok(vanishing_residues(&roots, d))
    }

    /// `C(f)`: size of the largest coset `aH` of a subgroup `H` of `F_q^*`
    /// on which `f` vanishes; 0 when `f` has no root in `F_q^*`.
    pub fn largest_vanishing_coset(&self) -> Result<u64, PolyError> {
        let roots = self.root_logs()?;
        let n = self.ctx.order();
        for size in divisors(n).into_iter().rev() {
            // Cosets of the size-`size` subgroup are residue classes mod n/size.
            if !vanishing_residues(&roots, n / size).is_empty() {
                return Ok(size);
            }
        }
        Ok(0)
    }

    /// Renders with coefficients in `(-p/2, p/2]` for prime fields, e.g.
    /// `x^188 - 54x^2 - 255x - 1`. Extension fields fall back to `Display`.
    pub fn render_signed(&self) -> String {
        if !self.ctx.is_prime_field() || self.is_zero() {
            return self.to_string();
        }
        let p = self.ctx.p();
        let mut out = String::new();
        for (i, &(e, c)) in self.terms.iter().enumerate() {
            let v = c.value();
            let (neg, mag) = if v > p / 2 { (true, p - v) } else { (false, v) };
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            push_term(&mut out, e, if mag == 1 && e > 0 { None } else { Some(mag.to_string()) });
        }
        out
    }
}

fn vanishing_residues(root_logs: &[bool], step: u64) -> Vec<u64> {
    let n = root_logs.len() as u64;
    (0..step)
        .filter(|&r| (r..n).step_by(step as usize).all(|j| root_logs[j as usize]))
        .collect()
}

fn merge_sorted(ctx: &FieldCtx, sorted_desc: Vec<(u64, Element)>) -> Vec<(u64, Element)> {
    let mut out: Vec<(u64, Element)> = Vec::with_capacity(sorted_desc.len());
    for (e, c) in sorted_desc {
        match out.last_mut() {
            Some(last) if last.0 == e => {
                last.1 = ctx.add(last.1, c);
                if last.1.is_zero() {
                    out.pop();
                }
            }
            _ if c.is_zero() => {}
            _ => out.push((e, c)),
        }
    }
    out
}

fn push_term(out: &mut String, e: u64, coeff: Option<String>) {
    if let Some(c) = coeff {
        out.push_str(&c);
    }
    match e {
        0 => {}
        1 => out.push('x'),
        _ => {
            out.push_str("x^");
            out.push_str(&e.to_string());
        }
    }
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut out = String::new();
        for (i, &(e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                out.push_str(" + ");
            }
            let coeff = if c == self.ctx.one() && e > 0 { None } else { Some(self.ctx.fmt_element(c)) };
            push_term(&mut out, e, coeff);
        }
        f.write_str(&out)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    ctx: &'a FieldCtx,
}

impl Parser<'_> {
    fn err(&self, message: impl Into<String>) -> PolyError {
        PolyError::Syntax { offset: self.pos, message: message.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn poly(&mut self) -> Result<Vec<(u64, Element)>, PolyError> {
        let mut terms = Vec::new();
        let mut negate = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                true
            }
            Some(b'+') => {
                self.pos += 1;
                false
            }
            None => return Err(self.err("empty polynomial")),
            _ => false,
        };
        loop {
            let (e, c) = self.term()?;
            terms.push((e, if negate { self.ctx.neg(c) } else { c }));
            match self.peek() {
                None => break,
                Some(b'+') => negate = false,
                Some(b'-') => negate = true,
                Some(_) => return Err(self.err("expected `+` or `-`")),
            }
            self.pos += 1;
        }
        Ok(terms)
    }

    fn term(&mut self) -> Result<(u64, Element), PolyError> {
        let coeff = match self.peek() {
            Some(b'0'..=b'9') => Some(self.integer_coeff()),
            Some(b'(') => Some(self.vector_coeff()?),
            _ => None,
        };
        if coeff.is_some() && self.peek() == Some(b'*') {
            self.pos += 1;
        }
        let exponent = if self.peek() == Some(b'x') {
            self.pos += 1;
            if self.peek() == Some(b'^') {
                self.pos += 1;
                self.peek();
                self.exponent()?
            } else {
                1
            }
        } else if coeff.is_none() {
            return Err(self.err("expected a coefficient or `x`"));
        } else {
            0
        };
        Ok((exponent, coeff.unwrap_or(self.ctx.one())))
    }

    fn digits(&mut self) -> &[u8] {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        &self.src[start..self.pos]
    }

    fn integer_mod_p(&mut self) -> Result<u64, PolyError> {
        let p = self.ctx.p();
        let digits = self.digits();
        if digits.is_empty() {
            return Err(self.err("expected digits"));
        }
        Ok(digits.iter().fold(0u64, |acc, &d| (acc * 10 + (d - b'0') as u64) % p))
    }

    fn integer_coeff(&mut self) -> Element {
        let n = self.integer_mod_p().expect("caller saw a digit");
        self.ctx.from_int(n as i64)
    }

    fn vector_coeff(&mut self) -> Result<Element, PolyError> {
        self.pos += 1; // '('
        let mut coeffs = Vec::new();
        loop {
            self.skip_ws();
            coeffs.push(self.integer_mod_p()?);
            match self.peek() {
                Some(b',') => self.pos += 1,
                Some(b')') => {
                    self.pos += 1;
                    break;
                }
                _ => return Err(self.err("expected `,` or `)`")),
            }
        }
        if coeffs.len() > self.ctx.k() as usize {
            return Err(self.err(format!("coefficient vector longer than k = {}", self.ctx.k())));
        }
        Ok(self.ctx.from_coeffs(&coeffs)?)
    }

    fn exponent(&mut self) -> Result<u64, PolyError> {
        let start = self.pos;
        let digits = self.digits();
        if digits.is_empty() {
            return Err(self.err("expected exponent"));
        }
        let mut e = 0u64;
        for &d in digits {
            e = e
                .checked_mul(10)
                .and_then(|e| e.checked_add((d - b'0') as u64))
                .ok_or(PolyError::ExponentOverflow { offset: start })?;
        }
        Ok(e)
    }
}
