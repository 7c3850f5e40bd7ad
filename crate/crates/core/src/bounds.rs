//! Closed-form upper bounds on `|Z(f)|` and the batch driver [`bound_all`].

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use serde::Serialize;
use thiserror::Error;

use crate::field::{FieldCtx, FieldError};
use crate::iteration;
use crate::numtheory::{divisors, isqrt};
use crate::poly::{PolyError, SparsePoly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoundError {
    #[error("constant term is zero")]
    ConstantTermZero,
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("degree {degree} exceeds (q-1)/d = {limit}; use the excess form")]
    DegreeTooLarge { degree: u64, limit: u64 },
    #[error("degree {degree} does not exceed (q-1)/d = {limit}; use the lacunary form")]
    DegreeNotAbove { degree: u64, limit: u64 },
    #[error("too few terms: need a tail of degree at least 1")]
    TooFewTerms,
    #[error("invalid shape: need 1 <= g° < (q-1)/d - l")]
    InvalidShape,
    #[error("vanishes on the coset with log residue {residue} mod {d}")]
    VanishesOnCoset { residue: u64, d: u64 },
    #[error("s/t and g are linearly dependent")]
    DependentPair,
    #[error("h vanishes at {root}")]
    HVanishes { root: String },
    #[error("h is constant")]
    HConstant,
    #[error("not a trinomial x^n + a x^s + b with n > s > 0, b != 0")]
    NotTrinomial,
    #[error("degree {degree} >= q-1 = {order}; rerun with --reduce-exponents")]
    ExponentsNotReduced { degree: u64, order: u64 },
    #[error("d = 1: the iteration needs d >= 2; use the lacunary bound")]
    DEqualsOne,
    #[error("l must be positive to iterate")]
    EllNotPositive,
    #[error("no improvement region applies")]
    NoRegion,
    #[error("non-integral value {0}")]
    NonIntegralValue(String),
    #[error("value {0} does not fit in 128 bits")]
    Overflow(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Bound identifiers, in tie-break order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Degree,
    Lacunary,
    LacunaryD1,
    GeometricMean,
    Excess,
    Region,
    Rational,
    Interval,
    MaxGap,
    KarpinskiShparlinski,
    Kelley,
    KelleyOwen,
    IteratedMin,
    IteratedBest,
}

impl Method {
    pub const ALL: [Method; 14] = [
        Method::Degree,
        Method::Lacunary,
        Method::LacunaryD1,
        Method::GeometricMean,
        Method::Excess,
        Method::Region,
        Method::Rational,
        Method::Interval,
        Method::MaxGap,
        Method::KarpinskiShparlinski,
        Method::Kelley,
        Method::KelleyOwen,
        Method::IteratedMin,
        Method::IteratedBest,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Degree => "degree",
            Method::Lacunary => "lacunary",
            Method::LacunaryD1 => "lacunary-d1",
            Method::GeometricMean => "geometric-mean",
            Method::Excess => "excess",
            Method::Region => "region",
            Method::Rational => "rational",
            Method::Interval => "interval",
            Method::MaxGap => "max-gap",
            Method::KarpinskiShparlinski => "karpinski-shparlinski",
            Method::Kelley => "kelley",
            Method::KelleyOwen => "kelley-owen",
            Method::IteratedMin => "iterated-min",
            Method::IteratedBest => "iterated-best",
        }
    }

    /// Bounds whose hypotheses are not the lacunary shape; reported for
    /// comparison.
    pub fn comparison_only(self) -> bool {
        matches!(self, Method::Kelley | Method::KelleyOwen)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One exponent split as `e = a M + b` with `-M < b < M`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResidueTerm {
    pub exponent: u64,
    pub a: u64,
    pub b: i64,
}

/// Representatives `b_i` of the exponents mod `M = (q-1)/d`, all inside `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResidueInterval {
    pub d: u64,
    pub modulus: u64,
    pub terms: Vec<ResidueTerm>,
    pub lo: i64,
    pub hi: i64,
}

impl ResidueInterval {
    pub fn width(&self) -> u64 {
        (self.hi - self.lo) as u64
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    Inapplicable { reason: String },
    Degree { degree: u64 },
    Lacunary { ell: u64, g_degree: u64, delta: u64, gap_form: u64 },
    TopGap { delta: u64 },
    GeometricMean { product: u128 },
    Excess { m: u64, g_degree: u64 },
    Region { region: u8 },
    Rational { s_degree: u64, g_degree: u64, t_degree: u64 },
    Interval(ResidueInterval),
    MaxGap { delta: u64, upper: u64, lower: u64 },
    Sparsity { terms: usize },
    Kelley { terms: usize, largest_coset: u64, real: String },
    KelleyOwen { gcd: u64, n: u64, s: u64 },
    IteratedMin { index: u32, k: i32 },
    IteratedBest { case: u8, i: i32 },
}

impl Witness {
    /// Short human-readable form for the text table.
    pub fn summary(&self) -> String {
        match self {
            Witness::Inapplicable { reason } => reason.clone(),
            Witness::Degree { degree } => format!("f°={degree}"),
            Witness::Lacunary { ell, g_degree, delta, gap_form } => {
                format!("l={ell} g°={g_degree} delta={delta} (q-1-d*delta={gap_form})")
            }
            Witness::TopGap { delta } => format!("delta={delta}"),
            Witness::GeometricMean { product } => format!("floor(sqrt({product}))"),
            Witness::Excess { m, g_degree } => format!("m={m} g°={g_degree}"),
            Witness::Region { region } => format!("region {region}"),
            Witness::Rational { s_degree, g_degree, t_degree } => {
                format!("s°={s_degree} g°={g_degree} t°={t_degree}")
            }
            Witness::Interval(iv) => format!("[A,B]=[{},{}] M={}", iv.lo, iv.hi, iv.modulus),
            Witness::MaxGap { delta, upper, lower } => format!("delta={delta} between x^{upper} and x^{lower}"),
            Witness::Sparsity { terms } => format!("t={terms}"),
            Witness::Kelley { terms, largest_coset, real } => format!("t={terms} C(f)={largest_coset} real={real}"),
            Witness::KelleyOwen { gcd, n, s } => format!("D(f)={gcd} n={n} s={s}"),
            Witness::IteratedMin { index, k } => format!("min at i={index}, k={k}"),
            Witness::IteratedBest { case, i } => format!("case {case}, i={i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundOutcome {
    pub method: Method,
    pub d: Option<u64>,
    pub applicable: bool,
    pub value: Option<u64>,
    pub witness: Witness,
}

impl BoundOutcome {
    pub fn new(method: Method, d: Option<u64>, value: u64, witness: Witness) -> Self {
        BoundOutcome { method, d, applicable: true, value: Some(value), witness }
    }

    pub fn inapplicable(method: Method, d: Option<u64>, err: &BoundError) -> Self {
        BoundOutcome {
            method,
            d,
            applicable: false,
            value: None,
            witness: Witness::Inapplicable { reason: err.to_string() },
        }
    }

    fn from_result(method: Method, d: Option<u64>, r: Result<BoundOutcome, BoundError>) -> Self {
        r.unwrap_or_else(|e| Self::inapplicable(method, d, &e))
    }

    pub fn reason(&self) -> Option<&str> {
        match &self.witness {
            Witness::Inapplicable { reason } => Some(reason),
            _ => None,
        }
    }

    pub fn witness_json(&self) -> String {
        serde_json::to_string(&self.witness).expect("witness serializes")
    }

    pub const CSV_HEADER: [&'static str; 5] = ["method", "d", "applicable", "value", "witness"];

    pub fn csv_record(&self) -> [String; 5] {
        [
            self.method.to_string(),
            self.d.map(|d| d.to_string()).unwrap_or_default(),
            self.applicable.to_string(),
            self.value.map(|v| v.to_string()).unwrap_or_default(),
            self.witness_json(),
        ]
    }
}

/// Aligned plain-text table of outcomes.
pub fn render_table(outcomes: &[BoundOutcome]) -> String {
    let rows: Vec<[String; 4]> = outcomes
        .iter()
        .map(|o| {
            [
                o.method.to_string(),
                o.d.map(|d| d.to_string()).unwrap_or_else(|| "-".into()),
                o.value.map(|v| v.to_string()).unwrap_or_else(|| "n/a".into()),
                o.witness.summary(),
            ]
        })
        .collect();
    let header = ["method", "d", "value", "detail"];
    let mut widths = header.map(str::len);
    for r in &rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let mut out = String::new();
    let mut line = |cells: [&str; 4]| {
        let s = format!(
            "{:<w0$}  {:>w1$}  {:>w2$}  {}",
            cells[0],
            cells[1],
            cells[2],
            cells[3],
            w0 = widths[0],
            w1 = widths[1],
            w2 = widths[2]
        );
        out.push_str(s.trim_end());
        out.push('\n');
    };
    line(header);
    for r in &rows {
        line([&r[0], &r[1], &r[2], &r[3]]);
    }
    out
}

/// The integer data of `f = x^{M - l} + g` with `M = (q-1)/d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct LacunaryShape {
    pub order: u64,
    pub d: u64,
    pub ell: u64,
    pub g_degree: u64,
}

impl LacunaryShape {
    pub fn new(order: u64, d: u64, ell: u64, g_degree: u64) -> Result<Self, BoundError> {
        if d == 0 || order % d != 0 {
            return Err(FieldError::NotADivisor { d, order }.into());
        }
        let shape = LacunaryShape { order, d, ell, g_degree };
        let m = shape.m();
        if g_degree == 0 || ell >= m || g_degree >= m - ell {
            return Err(BoundError::InvalidShape);
        }
        Ok(shape)
    }

    /// `M = (q-1)/d`.
    pub fn m(&self) -> u64 {
        self.order / self.d
    }

    /// `f° = M - l`.
    pub fn degree(&self) -> u64 {
        self.m() - self.ell
    }

    /// `delta = M - l - g°`.
    pub fn delta(&self) -> u64 {
        self.degree() - self.g_degree
    }
}

/// `f = x^{M - l} + g` with `g(0) != 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LacunaryForm {
    pub shape: LacunaryShape,
    pub g: SparsePoly,
}

impl LacunaryForm {
    pub fn ctx(&self) -> &Arc<FieldCtx> {
        self.g.ctx()
    }

    pub fn d(&self) -> u64 {
        self.shape.d
    }

    pub fn ell(&self) -> u64 {
        self.shape.ell
    }

    pub fn g_degree(&self) -> u64 {
        self.shape.g_degree
    }

    pub fn delta(&self) -> u64 {
        self.shape.delta()
    }

    /// Reassembles `x^{M - l} + g`.
    pub fn poly(&self) -> SparsePoly {
        let lead = SparsePoly::monomial(self.ctx().clone(), self.shape.degree(), self.ctx().one());
        lead.add(&self.g).expect("same field")
    }
}

/// `f = x^{M + m} + g` with `g(0) != 0` and `g° >= 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExcessForm {
    pub d: u64,
    pub m: u64,
    pub g: SparsePoly,
}

fn check_tail(f: &SparsePoly) -> Result<SparsePoly, BoundError> {
    if f.is_zero() {
        return Err(PolyError::ZeroPolynomial.into());
    }
    if !f.is_monic() {
        return Err(BoundError::NotMonic);
    }
    if f.constant_term().is_zero() {
        return Err(BoundError::ConstantTermZero);
    }
    let g = f.tail();
    match g.degree() {
        Some(deg) if deg >= 1 => Ok(g),
        _ => Err(BoundError::TooFewTerms),
    }
}

pub fn decompose_lacunary(f: &SparsePoly, d: u64) -> Result<LacunaryForm, BoundError> {
    let ctx = f.ctx();
    ctx.check_divisor(d)?;
    let g = check_tail(f)?;
    let m = ctx.order() / d;
    let degree = f.degree().expect("nonzero");
    if degree > m {
        return Err(BoundError::DegreeTooLarge { degree, limit: m });
    }
    let shape = LacunaryShape::new(ctx.order(), d, m - degree, g.degree().expect("nonzero tail"))?;
    Ok(LacunaryForm { shape, g })
}

pub fn decompose_excess(f: &SparsePoly, d: u64) -> Result<ExcessForm, BoundError> {
    let ctx = f.ctx();
    ctx.check_divisor(d)?;
    let g = check_tail(f)?;
    let m = ctx.order() / d;
    let degree = f.degree().expect("nonzero");
    if degree <= m {
        return Err(BoundError::DegreeNotAbove { degree, limit: m });
    }
    Ok(ExcessForm { d, m: degree - m, g })
}

/// Removes any power of `x` and divides by the leading coefficient; neither
/// step changes `Z(f)`.
pub fn normalize(f: &SparsePoly) -> Result<SparsePoly, BoundError> {
    Ok(f.strip_x_power().1.make_monic()?)
}

pub fn degree_bound(f: &SparsePoly) -> Result<BoundOutcome, BoundError> {
    let degree = f.degree().ok_or(PolyError::ZeroPolynomial)?;
    Ok(BoundOutcome::new(Method::Degree, None, degree, Witness::Degree { degree }))
}

/// `d(l + g°) = q - 1 - d delta`.
pub fn lacunary_bound(shape: &LacunaryShape) -> BoundOutcome {
    let value = shape.d * (shape.ell + shape.g_degree);
    let gap_form = shape.order - shape.d * shape.delta();
    debug_assert_eq!(value, gap_form);
    BoundOutcome::new(
        Method::Lacunary,
        Some(shape.d),
        value,
        Witness::Lacunary { ell: shape.ell, g_degree: shape.g_degree, delta: shape.delta(), gap_form },
    )
}

/// `q - 1 - (f° - f°°)` for monic `f` with `f(0) != 0` and `f° <= q - 1`.
pub fn top_gap_bound(f: &SparsePoly) -> Result<BoundOutcome, BoundError> {
    let order = f.ctx().order();
    let g = check_tail(f)?;
    let degree = f.degree().expect("nonzero");
    if degree > order {
        return Err(BoundError::DegreeTooLarge { degree, limit: order });
    }
    let delta = degree - g.degree().expect("nonzero tail");
    Ok(BoundOutcome::new(Method::LacunaryD1, None, order - delta, Witness::TopGap { delta }))
}

/// `floor(sqrt((q-1)(l + g°)))`.
pub fn geometric_mean_bound(shape: &LacunaryShape) -> BoundOutcome {
    let product = shape.order as u128 * (shape.ell + shape.g_degree) as u128;
    BoundOutcome::new(
        Method::GeometricMean,
        Some(shape.d),
        isqrt(product) as u64,
        Witness::GeometricMean { product },
    )
}

/// `d max{m, g°}`.
pub fn excess_bound(form: &ExcessForm) -> BoundOutcome {
    let g_degree = form.g.degree().expect("validated tail");
    BoundOutcome::new(
        Method::Excess,
        Some(form.d),
        form.d * form.m.max(g_degree),
        Witness::Excess { m: form.m, g_degree },
    )
}

/// Which of the three improvement regions `(l, g°)` falls in, if any.
pub fn classify_region(shape: &LacunaryShape) -> Option<u8> {
    let (q1, d, l, g) = (
        shape.order as u128,
        shape.d as u128,
        shape.ell as u128,
        shape.g_degree as u128,
    );
    if d * (d + 1) * l + d * d * g < q1 {
        Some(1)
    } else if d * d * (l + g) <= q1 && d * (d + 1) * l > q1 {
        Some(2)
    } else if d * d * (l + g) > q1 && d * l + d * d * d * g < q1 && d * (d * d + 1) * l + d * d * d * g < q1 * (d + 1) {
        Some(3)
    } else {
        None
    }
}

/// The bound accompanying [`classify_region`].
pub fn region_bound(shape: &LacunaryShape) -> Result<BoundOutcome, BoundError> {
    let region = classify_region(shape).ok_or(BoundError::NoRegion)?;
    let (q1, d, l, g, m) = (shape.order, shape.d, shape.ell, shape.g_degree, shape.m());
    let value = match region {
        1 => d * (l + g),
        2 => q1 - d * d * l,
        _ => d * (d * (l + g) - m).max(d * g),
    };
    Ok(BoundOutcome::new(Method::Region, Some(d), value, Witness::Region { region }))
}

/// `f = h^{(q-1)/d} s/t + g` with `h` root-free on `F_q^*` and `s/t`, `g`
/// linearly independent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalForm {
    pub d: u64,
    pub s: SparsePoly,
    pub t: SparsePoly,
    pub g: SparsePoly,
    pub h: SparsePoly,
}

impl RationalForm {
    pub fn new(d: u64, s: SparsePoly, t: SparsePoly, g: SparsePoly, h: SparsePoly) -> Result<Self, BoundError> {
        let ctx = s.ctx().clone();
        ctx.check_divisor(d)?;
        if t.is_zero() {
            return Err(PolyError::ZeroPolynomial.into());
        }
        let tg = t.mul(&g)?;
        if s.is_zero() || tg.is_zero() {
            return Err(BoundError::DependentPair);
        }
        let c = ctx.div(s.leading_coeff().expect("nonzero"), tg.leading_coeff().expect("nonzero"))?;
        if tg.scale(c) == s {
            return Err(BoundError::DependentPair);
        }
        if h.degree().unwrap_or(0) == 0 {
            return Err(BoundError::HConstant);
        }
        if let Some(&root) = h.count_roots_bruteforce()?.roots.first() {
            return Err(BoundError::HVanishes { root: ctx.fmt_element(root) });
        }
        s.add(&h)?;
        Ok(RationalForm { d, s, t, g, h })
    }

    /// Number of `a` in `F_q^*` with `t(a) != 0` and `h(a)^M s(a)/t(a) + g(a) = 0`.
    pub fn count_roots(&self) -> Result<u64, BoundError> {
        let ctx = self.s.ctx();
        ctx.check_cap()?;
        let m = ctx.order() / self.d;
        let mut count = 0;
        for a in ctx.nonzero() {
            let ta = self.t.eval(a);
            if ta.is_zero() {
                continue;
            }
            let lhs = ctx.mul(ctx.pow(self.h.eval(a), m), ctx.div(self.s.eval(a), ta)?);
            if ctx.add(lhs, self.g.eval(a)).is_zero() {
                count += 1;
            }
        }
        Ok(count)
    }
}

/// `d max{s°, g° + t°}`.
pub fn rational_bound(form: &RationalForm) -> BoundOutcome {
    let deg = |p: &SparsePoly| p.degree().unwrap_or(0);
    let (s_degree, g_degree, t_degree) = (deg(&form.s), deg(&form.g), deg(&form.t));
    BoundOutcome::new(
        Method::Rational,
        Some(form.d),
        form.d * s_degree.max(g_degree + t_degree),
        Witness::Rational { s_degree, g_degree, t_degree },
    )
}

/// Chooses representatives `b_i` of `e_i mod M` minimizing `B - A`: residues
/// sit on a circle of circumference `M` and the interval is the complement of
/// the largest gap. Ties go to the wraparound gap, then the lowest position.
pub fn minimal_residue_interval(exponents: &[u64], d: u64, order: u64) -> ResidueInterval {
    let m = order / d;
    let mut rs: Vec<u64> = exponents.iter().map(|&e| e % m).collect();
    rs.sort_unstable();
    rs.dedup();
    let (lo, hi) = match rs.as_slice() {
        [] => (0, 0),
        [r] => (*r as i64, *r as i64),
        _ => {
            let last = *rs.last().expect("nonempty");
            let wrap = m - last + rs[0];
            let (mut best, mut at) = (wrap, None);
            for j in 0..rs.len() - 1 {
                let gap = rs[j + 1] - rs[j];
                if gap > best {
                    best = gap;
                    at = Some(j);
                }
            }
            match at {
                None => (rs[0] as i64, last as i64),
                Some(j) => (rs[j + 1] as i64 - m as i64, rs[j] as i64),
            }
        }
    };
    let terms = exponents
        .iter()
        .map(|&e| {
            let r = (e % m) as i64;
            let b = if r > hi { r - m as i64 } else { r };
            ResidueTerm { exponent: e, a: ((e as i128 - b as i128) / m as i128) as u64, b }
        })
        .collect();
    ResidueInterval { d, modulus: m, terms, lo, hi }
}

fn check_no_vanishing_coset(root_logs: &[bool], d: u64) -> Result<(), BoundError> {
    let n = root_logs.len() as u64;
    for r in 0..d {
        if (r..n).step_by(d as usize).all(|j| root_logs[j as usize]) {
            return Err(BoundError::VanishesOnCoset { residue: r, d });
        }
    }
    Ok(())
}

/// Cached per-polynomial data shared by several bounds.
pub struct RootCache {
    pub root_logs: Vec<bool>,
    pub largest_coset: u64,
}

impl RootCache {
    pub fn new(f: &SparsePoly) -> Result<Self, BoundError> {
        Ok(RootCache { root_logs: f.root_logs()?, largest_coset: f.largest_vanishing_coset()? })
    }
}

/// `d (B - A)` for the minimal residue interval.
pub fn interval_bound(h: &SparsePoly, d: u64) -> Result<BoundOutcome, BoundError> {
    h.ctx().check_divisor(d)?;
    interval_bound_cached(h, d, &h.root_logs()?)
}

fn interval_bound_cached(h: &SparsePoly, d: u64, root_logs: &[bool]) -> Result<BoundOutcome, BoundError> {
    h.ctx().check_divisor(d)?;
    check_no_vanishing_coset(root_logs, d)?;
    let exps: Vec<u64> = h.terms().iter().map(|t| t.0).collect();
    let iv = minimal_residue_interval(&exps, d, h.ctx().order());
    Ok(BoundOutcome::new(Method::Interval, Some(d), d * iv.width(), Witness::Interval(iv)))
}

/// `q - 1 - d delta` with `delta` the largest gap between consecutive exponents.
pub fn max_gap_bound(h: &SparsePoly, d: u64) -> Result<BoundOutcome, BoundError> {
    h.ctx().check_divisor(d)?;
    max_gap_bound_cached(h, d, &h.root_logs()?)
}

fn max_gap_bound_cached(h: &SparsePoly, d: u64, root_logs: &[bool]) -> Result<BoundOutcome, BoundError> {
    let ctx = h.ctx();
    ctx.check_divisor(d)?;
    if h.sparsity() < 2 {
        return Err(BoundError::TooFewTerms);
    }
    let m = ctx.order() / d;
    let degree = h.degree().expect("nonzero");
    if degree > m {
        return Err(BoundError::DegreeTooLarge { degree, limit: m });
    }
    check_no_vanishing_coset(root_logs, d)?;
    let (delta, upper, lower) = h
        .terms()
        .windows(2)
        .map(|w| (w[0].0 - w[1].0, w[0].0, w[1].0))
        .max_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)))
        .expect("at least two terms");
    Ok(BoundOutcome::new(
        Method::MaxGap,
        Some(d),
        ctx.order() - d * delta,
        Witness::MaxGap { delta, upper, lower },
    ))
}

fn check_reduced(f: &SparsePoly) -> Result<(), BoundError> {
    let order = f.ctx().order();
    let degree = f.degree().ok_or(PolyError::ZeroPolynomial)?;
    if degree >= order && f.sparsity() > 1 {
        return Err(BoundError::ExponentsNotReduced { degree, order });
    }
    Ok(())
}

/// `floor((t-1)(q-1)/t)`.
pub fn sparsity_bound(f: &SparsePoly) -> Result<BoundOutcome, BoundError> {
    check_reduced(f)?;
    let t = f.sparsity() as u64;
    let value = (t - 1) * f.ctx().order() / t;
    Ok(BoundOutcome::new(
        Method::KarpinskiShparlinski,
        None,
        value,
        Witness::Sparsity { terms: f.sparsity() },
    ))
}

/// `2 (q-1)^{1-1/(t-1)} C(f)^{1/(t-1)}`; the floor is exact.
pub fn kelley_bound(f: &SparsePoly) -> Result<BoundOutcome, BoundError> {
    check_reduced(f)?;
    kelley_bound_with(f, f.largest_vanishing_coset()?)
}

fn kelley_bound_with(f: &SparsePoly, c: u64) -> Result<BoundOutcome, BoundError> {
    check_reduced(f)?;
    let t = f.sparsity();
    if t < 2 {
        return Err(BoundError::TooFewTerms);
    }
    let q1 = f.ctx().order();
    let witness = |real: String| Witness::Kelley { terms: t, largest_coset: c, real };
    if c == 0 {
        return Ok(BoundOutcome::new(Method::Kelley, None, 0, witness("0.000000".into())));
    }
    let k = (t - 1) as u32;
    let radicand = BigUint::from(2u32).pow(k) * BigUint::from(q1).pow(k - 1) * BigUint::from(c);
    let floor = radicand.nth_root(k);
    let real = 2.0 * (q1 as f64).powf(1.0 - 1.0 / k as f64) * (c as f64).powf(1.0 / k as f64);
    let value = u64::try_from(floor).expect("bounded by 2(q-1)");
    Ok(BoundOutcome::new(Method::Kelley, None, value, witness(format!("{real:.6}"))))
}

/// `D(f) floor(1/2 + sqrt((q-1)/D(f)))` for a monic trinomial
/// `x^n + a x^s + b`, reading the radicand's divisor as `D(f)`.
pub fn kelley_owen_bound(f: &SparsePoly) -> Result<BoundOutcome, BoundError> {
    check_reduced(f)?;
    let terms = f.terms();
    if terms.len() != 3 || !f.is_monic() || terms[2].0 != 0 {
        return Err(BoundError::NotTrinomial);
    }
    let (n, s) = (terms[0].0, terms[1].0);
    let dd = f.exponent_gcd_with_group()?;
    let q1 = f.ctx().order() as u128;
    // Largest k with k - 1/2 <= sqrt((q-1)/D), i.e. D (2k-1)^2 <= 4(q-1).
    let mut k = (isqrt(4 * q1 / dd as u128) + 1) / 2 + 1;
    while k > 0 && dd as u128 * (2 * k - 1) * (2 * k - 1) > 4 * q1 {
        k -= 1;
    }
    Ok(BoundOutcome::new(
        Method::KelleyOwen,
        None,
        dd * k as u64,
        Witness::KelleyOwen { gcd: dd, n, s },
    ))
}

fn sort_outcomes(out: &mut [BoundOutcome]) {
    out.sort_by(|a, b| {
        (!a.applicable, a.value, a.method, a.d).cmp(&(!b.applicable, b.value, b.method, b.d))
    });
}

/// Every bound for every divisor `d` of `q-1` (or only `only_d`), applied to
/// the normalized polynomial. Precondition failures become inapplicable
/// entries. Applicable entries come first, ascending by value.
pub fn bound_all(f: &SparsePoly, only_d: Option<u64>) -> Result<Vec<BoundOutcome>, BoundError> {
    let ctx = f.ctx();
    if let Some(d) = only_d {
        ctx.check_divisor(d)?;
    }
    let f = normalize(f)?;
    if f.sparsity() == 1 {
        return Ok(vec![sparsity_bound(&f)?]);
    }
    let cache = RootCache::new(&f);
    let cache_err = |e: &BoundError| e.clone();
    let mut out = vec![
        BoundOutcome::from_result(Method::Degree, None, degree_bound(&f)),
        BoundOutcome::from_result(Method::LacunaryD1, None, top_gap_bound(&f)),
        BoundOutcome::from_result(Method::KarpinskiShparlinski, None, sparsity_bound(&f)),
        BoundOutcome::from_result(
            Method::Kelley,
            None,
            cache.as_ref().map_err(cache_err).and_then(|c| kelley_bound_with(&f, c.largest_coset)),
        ),
        BoundOutcome::from_result(Method::KelleyOwen, None, kelley_owen_bound(&f)),
    ];
    let ds = match only_d {
        Some(d) => vec![d],
        None => divisors(ctx.order()),
    };
    for d in ds {
        let dd = Some(d);
        match decompose_lacunary(&f, d) {
            Ok(form) => {
                out.push(lacunary_bound(&form.shape));
                out.push(geometric_mean_bound(&form.shape));
                out.push(BoundOutcome::from_result(Method::Region, dd, region_bound(&form.shape)));
                out.push(BoundOutcome::from_result(
                    Method::IteratedMin,
                    dd,
                    iteration::min_bound_lemma(&form.shape, iteration::DEFAULT_CAP).map(|r| r.outcome()),
                ));
                out.push(BoundOutcome::from_result(
                    Method::IteratedBest,
                    dd,
                    iteration::best_bound(&form.shape).map(|r| r.outcome()),
                ));
            }
            Err(e) => {
                for m in [Method::Lacunary, Method::GeometricMean, Method::Region, Method::IteratedMin, Method::IteratedBest] {
                    out.push(BoundOutcome::inapplicable(m, dd, &e));
                }
            }
        }
        out.push(BoundOutcome::from_result(
            Method::Excess,
            dd,
            decompose_excess(&f, d).map(|form| excess_bound(&form)),
        ));
        let logs = cache.as_ref().map(|c| c.root_logs.as_slice()).map_err(cache_err);
        out.push(BoundOutcome::from_result(
            Method::Interval,
            dd,
            logs.clone().and_then(|l| interval_bound_cached(&f, d, l)),
        ));
        out.push(BoundOutcome::from_result(
            Method::MaxGap,
            dd,
            logs.and_then(|l| max_gap_bound_cached(&f, d, l)),
        ));
    }
    sort_outcomes(&mut out);
    Ok(out)
}

/// Smallest applicable value in a [`bound_all`] result.
pub fn best(outcomes: &[BoundOutcome]) -> Option<&BoundOutcome> {
    outcomes.iter().filter(|o| o.applicable).min_by_key(|o| (o.value, o.method, o.d))
}
