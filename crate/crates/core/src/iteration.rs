//! Iterating `f_i = x^{M - l_i} + g_i` to `f_{i+1}`, whose root count is no
//! smaller, and the bounds read off the sequence `d(l_i + g_i°)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::bounds::{BoundError, BoundOutcome, ExcessForm, LacunaryForm, LacunaryShape, Method, Witness};
use crate::poly::SparsePoly;

/// Default search cap on the iteration index.
pub const DEFAULT_CAP: u32 = 64;

/// `l_i + g_i°` at index `i`, with `a_i = (l_i + g_i°) / d^i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceValue {
    pub i: u32,
    pub a: BigRational,
    pub sum: BigInt,
}

fn big(x: u64) -> BigInt {
    BigInt::from(x)
}

/// Parity-split closed form for `l_i + g_i°`, evaluated over the rationals.
pub fn closed_form(shape: &LacunaryShape, i: u32) -> Result<SequenceValue, BoundError> {
    let d = big(shape.d);
    let di = d.pow(i);
    let t = BigRational::new(big(shape.order), &d * (&d + 1u32));
    let di_r = BigRational::from_integer(di.clone());
    let value = if i % 2 == 0 {
        BigRational::from_integer(&di * big(shape.ell + shape.g_degree)) - t * (&di_r - BigRational::one())
    } else {
        BigRational::from_integer(-&di * big(shape.ell)) + t * (&di_r + BigRational::one())
    };
    if !value.is_integer() {
        return Err(BoundError::NonIntegralValue(value.to_string()));
    }
    let sum = value.to_integer();
    Ok(SequenceValue { i, a: BigRational::new(sum.clone(), di), sum })
}

/// `(l_i, g_i°)` for `0 <= i <= n` straight from the recurrence
/// `l_{i+1} = M - d(l_i + g_i°)`, `g_{i+1}° = d g_i°`.
pub fn recurrence(shape: &LacunaryShape, n: u32) -> Vec<(BigInt, BigInt)> {
    let (m, d) = (big(shape.m()), big(shape.d));
    let mut cur = (big(shape.ell), big(shape.g_degree));
    let mut out = vec![cur.clone()];
    for _ in 0..n {
        let next = (&m - &d * (&cur.0 + &cur.1), &d * &cur.1);
        out.push(next.clone());
        cur = next;
    }
    out
}

/// `d(l_i + g_i°)` from the closed form, in machine integers when they fit.
pub fn scaled_term(shape: &LacunaryShape, i: u32) -> Result<i128, BoundError> {
    let fast = || -> Option<i128> {
        let (q, d, l, g) = (shape.order as i128, shape.d as i128, shape.ell as i128, shape.g_degree as i128);
        let w = d * (d + 1);
        let di = d.checked_pow(i)?;
        let num = if i % 2 == 0 {
            di.checked_mul(l + g)?.checked_mul(w)?.checked_sub(q.checked_mul(di - 1)?)?
        } else {
            q.checked_mul(di + 1)?.checked_sub(di.checked_mul(l)?.checked_mul(w)?)?
        };
        (num % w == 0).then(|| d * (num / w))
    };
    match fast() {
        Some(v) => Ok(v),
        None => {
            let v = closed_form(shape, i)?.sum * big(shape.d);
            v.to_i128().ok_or_else(|| BoundError::Overflow(v.to_string()))
        }
    }
}

/// The first five terms of `d(l_i + g_i°)` written out explicitly.
pub fn five_bounds(shape: &LacunaryShape) -> [i128; 5] {
    let (q, d, l, g) = (shape.order as i128, shape.d as i128, shape.ell as i128, shape.g_degree as i128);
    [
        d * (l + g),
        q - d * d * l,
        d.pow(3) * (l + g) - q * (d - 1),
        q * (d * d - d + 1) - d.pow(4) * l,
        d.pow(5) * (l + g) - q * (d.pow(3) - d * d + d - 1),
    ]
}

/// Minimum of `d(l_i + g_i°)` over `0 <= i <= k + 1`, where `k <= cap` is the
/// largest index with `d(l_i + g_i°) < M` for all `i <= k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaBound {
    pub k: i32,
    pub index: u32,
    pub value: u64,
    pub terms: Vec<i128>,
}

impl LemmaBound {
    pub fn outcome(&self) -> BoundOutcome {
        BoundOutcome::new(
            Method::IteratedMin,
            None,
            self.value,
            Witness::IteratedMin { index: self.index, k: self.k },
        )
    }
}

pub fn min_bound_lemma(shape: &LacunaryShape, cap: u32) -> Result<LemmaBound, BoundError> {
    let m = shape.m() as i128;
    let mut terms = vec![scaled_term(shape, 0)?];
    let mut k: i32 = -1;
    if shape.ell > 0 {
        while (k + 1) as u32 <= cap && terms[(k + 1) as usize] < m {
            k += 1;
            terms.push(scaled_term(shape, (k + 1) as u32)?);
        }
    }
    terms.truncate((k + 2) as usize);
    let (index, &value) = terms
        .iter()
        .enumerate()
        .min_by_key(|&(i, v)| (*v, i))
        .expect("at least one term");
    let value = u64::try_from(value).map_err(|_| BoundError::NonIntegralValue(value.to_string()))?;
    Ok(LemmaBound { k, index: index as u32, value, terms })
}

/// Which of the four regimes applies, the index `i` found in regimes 1-2,
/// and the bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BestBound {
    pub case: u8,
    pub i: i32,
    pub value: u64,
}

impl BestBound {
    pub fn outcome(&self) -> BoundOutcome {
        BoundOutcome::new(
            Method::IteratedBest,
            None,
            self.value,
            Witness::IteratedBest { case: self.case, i: self.i },
        )
    }
}

/// Largest `i >= 0` with `d^{2i + offset} * x < q` (for positive `x`), or
/// `-1` if none; capped at [`DEFAULT_CAP`].
fn largest_index(d: i128, offset: u32, x: i128, q: i128) -> i32 {
    let mut best = -1;
    for i in 0..=DEFAULT_CAP as i32 {
        let holds = d
            .checked_pow(2 * i as u32 + offset)
            .and_then(|p| p.checked_mul(x))
            .is_some_and(|v| v < q);
        if !holds {
            break;
        }
        best = i;
    }
    best
}

pub fn best_bound(shape: &LacunaryShape) -> Result<BestBound, BoundError> {
    if shape.d == 1 {
        return Err(BoundError::DEqualsOne);
    }
    let (q, d, l, g) = (shape.order as i128, shape.d as i128, shape.ell as i128, shape.g_degree as i128);
    let w = d * (d + 1);
    let exact = |num: i128| -> Result<u64, BoundError> {
        if num % w != 0 || num < 0 {
            return Err(BoundError::NonIntegralValue(format!("{num}/{w}")));
        }
        Ok((num / w) as u64)
    };
    if l * w > q {
        // l + g° < q(1 + d^{-2i-1})/(d(d+1))  <=>  d^{2i+1} ((l+g°)w - q) < q.
        let i = largest_index(d, 1, (l + g) * w - q, q);
        let value = exact(q * d - d.pow((2 * i + 2) as u32) * (l * w - q))?;
        return Ok(BestBound { case: 1, i, value });
    }
    if (l + g) * w < q {
        // l > q(1 - d^{-2i-2})/(d(d+1))  <=>  d^{2i+2} (q - l w) < q; i = -1 needs l > 0.
        let i = if l > 0 { largest_index(d, 2, q - l * w, q) } else { -1 };
        let value = exact(q * d - d.pow((2 * i + 3) as u32) * (q - (l + g) * w))?;
        return Ok(BestBound { case: 2, i, value });
    }
    if l * w + d * d * g < q {
        return Ok(BestBound { case: 3, i: -1, value: shape.d * (shape.ell + shape.g_degree) });
    }
    Ok(BestBound { case: 4, i: -1, value: shape.degree() })
}

/// Degree bound minus [`best_bound`]. In regime 2 this is checked against
/// `(1 + d^{2i+3})(T - (l + g°)) + g°` with `T = (q-1)/(d(d+1))`.
pub fn improvement_margin(shape: &LacunaryShape) -> Result<u64, BoundError> {
    let b = best_bound(shape)?;
    let margin = shape.degree() - b.value;
    if b.case == 2 {
        let (q, d, l, g) = (shape.order as i128, shape.d as i128, shape.ell as i128, shape.g_degree as i128);
        let w = d * (d + 1);
        let num = (1 + d.pow((2 * b.i + 3) as u32)) * (q - (l + g) * w) + g * w;
        if num % w != 0 || num / w != margin as i128 {
            return Err(BoundError::NonIntegralValue(format!("{num}/{w} vs {margin}")));
        }
    }
    Ok(margin)
}

/// Result of one iteration step: `f_{i+1}` in lacunary form when `l_{i+1} >= 0`,
/// otherwise in excess form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stepped {
    Lacunary(LacunaryForm),
    Excess(ExcessForm),
}

impl Stepped {
    pub fn poly(&self) -> SparsePoly {
        match self {
            Stepped::Lacunary(f) => f.poly(),
            Stepped::Excess(f) => {
                let ctx = f.g.ctx();
                let lead = SparsePoly::monomial(ctx.clone(), ctx.order() / f.d + f.m, ctx.one());
                lead.add(&f.g).expect("same field")
            }
        }
    }
}

/// `f_{i+1}(y) = y^{d(l+g°)} + (-1)^{d+1} y^{d g°} g^d(1/y)`.
///
/// Every nonzero root `a` of `f_i` gives a root `1/a` of `f_{i+1}`. For even
/// `d` (or characteristic 2) the sign is `-1`.
pub fn iterate_step(form: &LacunaryForm) -> Result<Stepped, BoundError> {
    if form.ell() == 0 {
        return Err(BoundError::EllNotPositive);
    }
    if form.g.constant_term().is_zero() {
        return Err(BoundError::ConstantTermZero);
    }
    let ctx = form.ctx();
    let d = form.d();
    let mut g_next = form.g.pow(d)?.reversal()?;
    if d % 2 == 0 {
        g_next = g_next.neg();
    }
    let degree = d * (form.ell() + form.g_degree());
    let m = ctx.order() / d;
    if degree <= m {
        let shape = LacunaryShape::new(ctx.order(), d, m - degree, d * form.g_degree())?;
        Ok(Stepped::Lacunary(LacunaryForm { shape, g: g_next }))
    } else {
        Ok(Stepped::Excess(ExcessForm { d, m: degree - m, g: g_next }))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    Cap,
    ConditionFailed,
    EllNotPositive,
}

#[derive(Debug, Clone)]
pub struct TraceRow {
    pub i: u32,
    pub ell: i128,
    pub g_degree: i128,
    /// `d(l_i + g_i°)`.
    pub bound: i128,
    /// Whether `d(l_i + g_i°) < M`.
    pub below_m: bool,
    pub poly: Option<SparsePoly>,
}

#[derive(Debug, Clone)]
pub struct IterationTrace {
    pub base: LacunaryShape,
    pub rows: Vec<TraceRow>,
    pub termination: Termination,
    pub lemma: LemmaBound,
}

impl IterationTrace {
    pub const CSV_HEADER: [&'static str; 6] = ["i", "ell", "g_degree", "bound", "below_m", "poly"];

    pub fn csv_records(&self) -> Vec<[String; 6]> {
        self.rows
            .iter()
            .map(|r| {
                [
                    r.i.to_string(),
                    r.ell.to_string(),
                    r.g_degree.to_string(),
                    r.bound.to_string(),
                    r.below_m.to_string(),
                    r.poly.as_ref().map(|p| p.render_signed()).unwrap_or_default(),
                ]
            })
            .collect()
    }
}

/// Rows `i = 0 ..= k + 1` of the iteration, optionally with each `f_i`.
pub fn trace(form: &LacunaryForm, cap: u32, materialize: bool) -> Result<IterationTrace, BoundError> {
    let shape = form.shape;
    let lemma = min_bound_lemma(&shape, cap)?;
    let termination = if shape.ell == 0 {
        Termination::EllNotPositive
    } else if lemma.k as u32 == cap {
        Termination::Cap
    } else {
        Termination::ConditionFailed
    };
    let m = shape.m() as i128;
    let mut rows = Vec::with_capacity(lemma.terms.len());
    let mut current: Option<Stepped> = materialize.then(|| Stepped::Lacunary(form.clone()));
    for (i, &bound) in lemma.terms.iter().enumerate() {
        let g_degree = (shape.g_degree as i128) * (shape.d as i128).pow(i as u32);
        let poly = current.as_ref().map(Stepped::poly);
        if i + 1 < lemma.terms.len() {
            current = match current {
                Some(Stepped::Lacunary(f)) => Some(iterate_step(&f)?),
                _ => None,
            };
        }
        rows.push(TraceRow {
            i: i as u32,
            ell: bound / shape.d as i128 - g_degree,
            g_degree,
            bound,
            below_m: bound < m,
            poly,
        });
    }
    Ok(IterationTrace { base: shape, rows, termination, lemma })
}

/// Checks the `a_i` recursion `a_{i+1} + a_i = (q-1)/d^{i+2} + g°` on a
/// closed-form value pair; used by tests and the acceptance suite.
pub fn a_recursion_holds(shape: &LacunaryShape, i: u32) -> Result<bool, BoundError> {
    let a0 = closed_form(shape, i)?.a;
    let a1 = closed_form(shape, i + 1)?.a;
    let rhs = BigRational::new(big(shape.order), big(shape.d).pow(i + 2)) + BigRational::from_integer(big(shape.g_degree));
    Ok(a0 + a1 == rhs)
}
