//! Finite fields `F_q`, `q = p^k`, and the multiplicative-group machinery
//! (orders, power residues, cosets) the root bounds are stated in.
//!
//! Elements are packed into a single `u64`. For a prime field the packed
//! value is the integer representative in `[0, p)`. For an extension field
//! with coefficient vector `(c_0, ..., c_{k-1})` (constant term first) the
//! packed value is `c_0 p^{k-1} + c_1 p^{k-2} + ... + c_{k-1}`, so integer
//! order on packed values is lexicographic order on the coefficient vectors.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use thiserror::Error;

use crate::numtheory::{factorize, inv_mod, is_prime, prime_power};

/// Default upper limit on `q` for anything that enumerates `F_q`.
pub const DEFAULT_CAP: u64 = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NonPrime(u64),
    #[error("modulus is reducible over F_{0}")]
    ReducibleModulus(u64),
    #[error("modulus must be monic of degree {expected}, got {found}")]
    DegreeMismatch { expected: u32, found: String },
    #[error("field order {0} is outside the supported range")]
    FieldTooLarge(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("element {0} does not belong to this field")]
    FieldMismatch(u64),
    #[error("{d} does not divide q-1 = {order}")]
    NotADivisor { d: u64, order: u64 },
    #[error("zero is not in the multiplicative group")]
    ZeroInput,
    #[error("invalid field specification `{0}`")]
    InvalidSpec(String),
}

/// A field element in packed canonical form. Only meaningful together with
/// the [`FieldCtx`] that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Element(u64);

impl Element {
    pub const ZERO: Element = Element(0);

    /// Wraps a packed value already known to be canonical for its field.
    pub(crate) fn from_packed(v: u64) -> Element {
        Element(v)
    }

    /// Packed representative.
    pub fn value(self) -> u64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Discrete-log tables relative to a fixed primitive element.
pub(crate) struct LogTables {
    pub generator: Element,
    /// `exp[i] = g^i` for `0 <= i < q-1`.
    pub exp: Vec<u32>,
    /// `log[g^i] = i`; `log[0]` is unused.
    pub log: Vec<u32>,
}

/// The field `F_q`. Immutable after construction; log tables are built
/// lazily the first time an enumerating routine asks for them.
pub struct FieldCtx {
    p: u64,
    k: u32,
    q: u64,
    /// Monic modulus, constant coefficient first, length `k + 1` (only `k > 1`).
    modulus: Option<Vec<u64>>,
    cap: u64,
    one: Element,
    tables: OnceLock<LogTables>,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldCtx")
            .field("p", &self.p)
            .field("k", &self.k)
            .field("q", &self.q)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.k == other.k && self.modulus == other.modulus
    }
}
impl Eq for FieldCtx {}

impl FieldCtx {
    /// Builds `F_{p^k}`. When `k > 1` and no modulus is given, the
    /// lexicographically smallest monic irreducible of degree `k` is used
    /// (coefficients compared constant term first).
    pub fn new(p: u64, k: u32, modulus: Option<&[u64]>) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NonPrime(p));
        }
        if k == 0 {
            return Err(FieldError::DegreeMismatch { expected: 1, found: "0".into() });
        }
        let q = p
            .checked_pow(k)
            .filter(|&q| q <= u32::MAX as u64)
            .ok_or_else(|| FieldError::FieldTooLarge(format!("{p}^{k}")))?;
        let modulus = if k == 1 {
            match modulus {
                None => None,
                Some(m) => {
                    // A linear modulus x - c gives F_p again; only accept monic x + c.
                    if m.len() != 2 || m[1] % p != 1 {
                        return Err(FieldError::DegreeMismatch {
                            expected: 1,
                            found: format!("{m:?}"),
                        });
                    }
                    None
                }
            }
        } else {
            let m = match modulus {
                Some(m) => {
                    let m: Vec<u64> = m.iter().map(|c| c % p).collect();
                    if m.len() != k as usize + 1 || m[k as usize] != 1 {
                        return Err(FieldError::DegreeMismatch {
                            expected: k,
                            found: format!("{m:?}"),
                        });
                    }
                    if !is_irreducible(&m, p) {
                        return Err(FieldError::ReducibleModulus(p));
                    }
                    m
                }
                None => smallest_irreducible(p, k),
            };
            Some(m)
        };
        let one = Element(if k == 1 { 1 } else { p.pow(k - 1) });
        Ok(FieldCtx { p, k, q, modulus, cap: DEFAULT_CAP, one, tables: OnceLock::new() })
    }

    /// Sets the enumeration cap (`q` above it makes oracles refuse).
    pub fn with_cap(mut self, cap: u64) -> Self {
        self.cap = cap;
        self
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn k(&self) -> u32 {
        self.k
    }
    pub fn q(&self) -> u64 {
        self.q
    }
    /// Order of the multiplicative group, `q - 1`.
    pub fn order(&self) -> u64 {
        self.q - 1
    }
    pub fn cap(&self) -> u64 {
        self.cap
    }
    pub fn modulus(&self) -> Option<&[u64]> {
        self.modulus.as_deref()
    }
    pub fn is_prime_field(&self) -> bool {
        self.k == 1
    }

    pub fn zero(&self) -> Element {
        Element::ZERO
    }
    pub fn one(&self) -> Element {
        self.one
    }

    /// Validates a packed representative.
    pub fn element(&self, packed: u64) -> Result<Element, FieldError> {
        if packed < self.q {
            Ok(Element(packed))
        } else {
            Err(FieldError::FieldMismatch(packed))
        }
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> Element {
        let r = n.rem_euclid(self.p as i64) as u64;
        Element(r * self.one.0)
    }

    /// Element with the given coefficient vector (constant first); missing
    /// trailing coefficients are zero, entries are reduced mod `p`.
    pub fn from_coeffs(&self, coeffs: &[u64]) -> Result<Element, FieldError> {
        if coeffs.len() > self.k as usize {
            return Err(FieldError::FieldMismatch(coeffs.len() as u64));
        }
        let mut v = 0u64;
        for i in 0..self.k as usize {
            v = v * self.p + coeffs.get(i).map_or(0, |c| c % self.p);
        }
        Ok(Element(v))
    }

    /// Coefficient vector of `a`, constant term first, length `k`.
    pub fn coeffs(&self, a: Element) -> Vec<u64> {
        let mut out = vec![0u64; self.k as usize];
        let mut v = a.0;
        for slot in out.iter_mut().rev() {
            *slot = v % self.p;
            v /= self.p;
        }
        out
    }

    /// Integer representative if `a` lies in the prime subfield.
    pub fn as_prime_subfield(&self, a: Element) -> Option<u64> {
        if a.0 % self.one.0 == 0 {
            Some(a.0 / self.one.0)
        } else {
            None
        }
    }

    /// Every element in canonical order, zero first.
    pub fn elements(&self) -> impl Iterator<Item = Element> {
        (0..self.q).map(Element)
    }

    /// Every nonzero element in canonical order.
    pub fn nonzero(&self) -> impl Iterator<Item = Element> {
        (1..self.q).map(Element)
    }

    pub fn add(&self, a: Element, b: Element) -> Element {
        if self.k == 1 {
            let s = a.0 + b.0;
            return Element(if s >= self.p { s - self.p } else { s });
        }
        self.digitwise(a, b, |x, y, p| (x + y) % p)
    }

    pub fn sub(&self, a: Element, b: Element) -> Element {
        if self.k == 1 {
            return Element(if a.0 >= b.0 { a.0 - b.0 } else { a.0 + self.p - b.0 });
        }
        self.digitwise(a, b, |x, y, p| (x + p - y) % p)
    }

    pub fn neg(&self, a: Element) -> Element {
        self.sub(Element::ZERO, a)
    }

    fn digitwise(&self, a: Element, b: Element, op: impl Fn(u64, u64, u64) -> u64) -> Element {
        let p = self.p;
        let (mut x, mut y) = (a.0, b.0);
        let mut out = 0u64;
        let mut scale = 1u64;
        for _ in 0..self.k {
            out += op(x % p, y % p, p) * scale;
            x /= p;
            y /= p;
            scale *= p;
        }
        Element(out)
    }

    pub fn mul(&self, a: Element, b: Element) -> Element {
        if self.k == 1 {
            return Element(a.0 * b.0 % self.p);
        }
        if a.is_zero() || b.is_zero() {
            return Element::ZERO;
        }
        let m = self.modulus.as_ref().expect("extension field has a modulus");
        let prod = fp_poly::mul(&self.coeffs(a), &self.coeffs(b), self.p);
        let rem = fp_poly::rem(&prod, m, self.p);
        self.from_coeffs(&rem).expect("remainder has degree < k")
    }

    /// Multiplicative inverse.
    pub fn inv(&self, a: Element) -> Result<Element, FieldError> {
        if a.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        if self.k == 1 {
            return Ok(Element(inv_mod(a.0, self.p).expect("p is prime")));
        }
        Ok(self.pow(a, self.q - 2))
    }

    pub fn div(&self, a: Element, b: Element) -> Result<Element, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Checked binary operation on packed elements.
    pub fn arith(&self, a: Element, b: Element, op: ArithOp) -> Result<Element, FieldError> {
        self.element(a.0)?;
        self.element(b.0)?;
        match op {
            ArithOp::Add => Ok(self.add(a, b)),
            ArithOp::Sub => Ok(self.sub(a, b)),
            ArithOp::Mul => Ok(self.mul(a, b)),
            ArithOp::Div => self.div(a, b),
        }
    }

    /// `a^e` by binary exponentiation, with `0^0 = 1`.
    pub fn pow(&self, a: Element, mut e: u64) -> Element {
        let mut acc = self.one;
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(base, base);
            }
        }
        acc
    }

    pub fn check_divisor(&self, d: u64) -> Result<(), FieldError> {
        if d == 0 || self.order() % d != 0 {
            Err(FieldError::NotADivisor { d, order: self.order() })
        } else {
            Ok(())
        }
    }

    /// Whether `a` lies in the subgroup `(F_q^*)^d` of `d`-th powers.
    pub fn is_dth_power(&self, a: Element, d: u64) -> Result<bool, FieldError> {
        if a.is_zero() {
            return Err(FieldError::ZeroInput);
        }
        self.check_divisor(d)?;
        Ok(self.pow(a, self.order() / d) == self.one)
    }

    /// Fails when `q` exceeds the enumeration cap.
    pub fn check_cap(&self) -> Result<(), FieldError> {
        if self.q > self.cap {
            Err(FieldError::FieldTooLarge(format!("q = {} exceeds cap {}", self.q, self.cap)))
        } else {
            Ok(())
        }
    }

    /// Partition of `F_q^*` into the fibres of `a -> a^{(q-1)/d}`.
    pub fn coset_decomposition(&self, d: u64) -> Result<CosetDecomposition, FieldError> {
        self.check_divisor(d)?;
        self.check_cap()?;
        let m = self.order() / d;
        let mut fibres: std::collections::BTreeMap<Element, Vec<Element>> = Default::default();
        for a in self.nonzero() {
            fibres.entry(self.pow(a, m)).or_default().push(a);
        }
        let (xi_list, cosets) = fibres.into_iter().unzip();
        Ok(CosetDecomposition { d, xi_list, cosets })
    }

    /// A primitive element: the smallest packed value generating `F_q^*`.
    pub fn primitive_element(&self) -> Element {
        if let Some(t) = self.tables.get() {
            return t.generator;
        }
        let n = self.order();
        let primes: Vec<u64> = factorize(n).into_iter().map(|(r, _)| r).collect();
        self.nonzero()
            .find(|&g| primes.iter().all(|r| self.pow(g, n / r) != self.one))
            .expect("F_q^* is cyclic")
    }

    pub(crate) fn tables(&self) -> Result<&LogTables, FieldError> {
        self.check_cap()?;
        Ok(self.tables.get_or_init(|| {
            let generator = self.primitive_element();
            let n = self.order() as usize;
            let mut exp = Vec::with_capacity(n);
            let mut log = vec![0u32; self.q as usize];
            let mut x = self.one;
            for i in 0..n {
                exp.push(x.0 as u32);
                log[x.0 as usize] = i as u32;
                x = self.mul(x, generator);
            }
            debug_assert_eq!(x, self.one);
            LogTables { generator, exp, log }
        }))
    }

    /// Human-readable element: an integer for prime-subfield elements,
    /// otherwise the parenthesised coefficient vector (constant first).
    pub fn fmt_element(&self, a: Element) -> String {
        match self.as_prime_subfield(a) {
            Some(n) => n.to_string(),
            None => {
                let cs: Vec<String> = self.coeffs(a).iter().map(u64::to_string).collect();
                format!("({})", cs.join(","))
            }
        }
    }

    /// Text form accepted by [`FieldCtx::from_str`]: `47` or `3^2:1,0,1`.
    pub fn spec(&self) -> String {
        match &self.modulus {
            None => self.p.to_string(),
            Some(m) => {
                let cs: Vec<String> = m.iter().map(u64::to_string).collect();
                format!("{}^{}:{}", self.p, self.k, cs.join(","))
            }
        }
    }
}

impl fmt::Display for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.spec())
    }
}

impl FromStr for FieldCtx {
    type Err = FieldError;

    /// Accepts `47`, `9` (any prime power), `3^2`, or `3^2:1,0,1` where the
    /// list after `:` is the monic modulus, constant coefficient first.
    fn from_str(s: &str) -> Result<Self, FieldError> {
        let bad = || FieldError::InvalidSpec(s.to_string());
        let s = s.trim();
        let (head, modulus) = match s.split_once(':') {
            Some((h, m)) => {
                let coeffs = m
                    .split(',')
                    .map(|c| c.trim().parse::<u64>().map_err(|_| bad()))
                    .collect::<Result<Vec<_>, _>>()?;
                (h.trim(), Some(coeffs))
            }
            None => (s, None),
        };
        let (p, k) = match head.split_once('^') {
            Some((p, k)) => (
                p.trim().parse::<u64>().map_err(|_| bad())?,
                k.trim().parse::<u32>().map_err(|_| bad())?,
            ),
            None => {
                let q: u64 = head.parse().map_err(|_| bad())?;
                if is_prime(q) {
                    (q, 1)
                } else {
                    prime_power(q).ok_or(FieldError::NonPrime(q))?
                }
            }
        };
        FieldCtx::new(p, k, modulus.as_deref())
    }
}

/// Cosets of the index-`d` subgroup `(F_q^*)^d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetDecomposition {
    pub d: u64,
    /// The `d` values of `a^{(q-1)/d}`, ascending.
    pub xi_list: Vec<Element>,
    /// `cosets[i] = { a : a^{(q-1)/d} = xi_list[i] }`, each ascending.
    pub cosets: Vec<Vec<Element>>,
}

fn is_irreducible(m: &[u64], p: u64) -> bool {
    let k = m.len() - 1;
    if k <= 1 {
        return true;
    }
    // Degree 2 and 3 are irreducible iff rootless.
    let has_root = (0..p).any(|x| fp_poly::eval(m, x, p) == 0);
    if has_root {
        return false;
    }
    if k <= 3 {
        return true;
    }
    // Rabin: m | x^{p^k} - x and gcd(x^{p^{k/r}} - x, m) = 1 for primes r | k.
    let x = vec![0, 1];
    let frob = |times: usize| {
        let mut acc = x.clone();
        for _ in 0..times {
            acc = fp_poly::pow_mod(&acc, p, m, p);
        }
        acc
    };
    let full = fp_poly::sub(&frob(k), &x, p);
    if !fp_poly::rem(&full, m, p).is_empty() {
        return false;
    }
    factorize(k as u64).iter().all(|&(r, _)| {
        let h = fp_poly::sub(&frob(k / r as usize), &x, p);
        fp_poly::gcd(&h, m, p).len() == 1
    })
}

fn smallest_irreducible(p: u64, k: u32) -> Vec<u64> {
    let count = p.pow(k);
    (0..count)
        .map(|idx| {
            // Same packing as elements: constant coefficient most significant.
            let mut coeffs = vec![0u64; k as usize + 1];
            let mut v = idx;
            for slot in coeffs[..k as usize].iter_mut().rev() {
                *slot = v % p;
                v /= p;
            }
            coeffs[k as usize] = 1;
            coeffs
        })
        .find(|m| is_irreducible(m, p))
        .expect("irreducible polynomials exist in every degree")
}

/// Dense polynomials over `F_p`, constant coefficient first, trimmed so the
/// last entry is nonzero (the zero polynomial is empty).
pub(crate) mod fp_poly {
    use crate::numtheory::inv_mod;

    pub fn trim(mut a: Vec<u64>) -> Vec<u64> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    pub fn eval(a: &[u64], x: u64, p: u64) -> u64 {
        a.iter().rev().fold(0, |acc, &c| (acc * x + c) % p)
    }

    pub fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let n = a.len().max(b.len());
        let out = (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect();
        trim(out)
    }

    pub fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y) % p;
            }
        }
        trim(out)
    }

    pub fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        let mut r = trim(a.to_vec());
        let dm = m.len() - 1;
        let lead_inv = inv_mod(m[dm], p).expect("nonzero leading coefficient");
        while r.len() > dm {
            let shift = r.len() - 1 - dm;
            let c = r[r.len() - 1] * lead_inv % p;
            for (i, &mc) in m.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p - c * mc % p) % p;
            }
            r = trim(r);
        }
        r
    }

    pub fn pow_mod(a: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
        let mut acc = vec![1u64];
        let mut base = rem(a, m, p);
        while e > 0 {
            if e & 1 == 1 {
                acc = rem(&mul(&acc, &base, p), m, p);
            }
            base = rem(&mul(&base, &base, p), m, p);
            e >>= 1;
        }
        acc
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }
}
