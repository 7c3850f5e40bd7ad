//! Families of polynomials whose root count meets a bound exactly. Each
//! constructor checks its number-theoretic side conditions directly and
//! confirms the root set with the brute-force oracle before returning.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::bounds::{decompose_excess, decompose_lacunary, excess_bound, lacunary_bound, normalize, BoundError, Method};
use crate::field::{Element, FieldCtx, FieldError};
use crate::poly::{PolyError, SparsePoly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructionError {
    #[error("p = {p} is not {residue} mod {modulus} (or too small)")]
    CongruenceViolated { p: u64, modulus: u64, residue: u64 },
    #[error("{0} is not a nonzero quadratic residue")]
    NotResidue(u64),
    #[error("r1 and r2 must be distinct")]
    EqualResidues,
    #[error("side condition failed: {0}")]
    SideCondition(String),
    #[error("expected roots {expected:?}, oracle found {found:?}")]
    RootMismatch { expected: Vec<String>, found: Vec<String> },
    #[error("{method} gives {bound}, not the root count {count}")]
    NotSaturated { method: Method, bound: u64, count: u64 },
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
    #[error(transparent)]
    Bound(#[from] BoundError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// `x^{(p-1)/2 - 1} - 16a x^2 - (4a + 5)`, six roots.
    ThreeResidues,
    /// `x^{(p-1)/2 + 1} + a x^2 + a r1 r2`, four roots.
    TwoResidues,
    /// `6500 x^{(p-1)/2 + 1} + (x-4)(x-9)(x-16)(x+29) - 6500x`, eight roots.
    FourResidues,
    /// `(x^{D(n+1)} - 1)/(x^D - 1)`, `Dn` roots.
    Cyclotomic,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::ThreeResidues => "three-residues",
            Family::TwoResidues => "two-residues",
            Family::FourResidues => "four-residues",
            Family::Cyclotomic => "cyclotomic",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = ConstructionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "three-residues" | "ex1" => Ok(Family::ThreeResidues),
            "two-residues" | "ex2" => Ok(Family::TwoResidues),
            "four-residues" | "ex3" => Ok(Family::FourResidues),
            "cyclotomic" => Ok(Family::Cyclotomic),
            _ => Err(ConstructionError::UnknownFamily(s.into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructedExample {
    pub family: Family,
    pub params: Vec<(&'static str, u64)>,
    pub poly: SparsePoly,
    /// Sorted ascending.
    pub expected_roots: Vec<Element>,
    pub claimed_bound: u64,
    pub bound_method: Method,
}

impl ConstructedExample {
    pub fn root_strings(&self) -> Vec<String> {
        self.expected_roots.iter().map(|&r| self.poly.ctx().fmt_element(r)).collect()
    }

    fn check(self) -> Result<Self, ConstructionError> {
        let found = self.poly.count_roots_bruteforce()?.roots;
        if found != self.expected_roots {
            let ctx = self.poly.ctx();
            return Err(ConstructionError::RootMismatch {
                expected: self.root_strings(),
                found: found.iter().map(|&r| ctx.fmt_element(r)).collect(),
            });
        }
        let count = found.len() as u64;
        if self.claimed_bound != count {
            return Err(ConstructionError::NotSaturated {
                method: self.bound_method,
                bound: self.claimed_bound,
                count,
            });
        }
        Ok(self)
    }
}

fn prime_field(p: u64) -> Result<Arc<FieldCtx>, ConstructionError> {
    Ok(Arc::new(FieldCtx::new(p, 1, None)?))
}

fn require_congruence(p: u64, modulus: u64, residue: u64, min: u64) -> Result<(), ConstructionError> {
    if p % modulus != residue || p <= min {
        return Err(ConstructionError::CongruenceViolated { p, modulus, residue });
    }
    Ok(())
}

fn sorted(mut v: Vec<Element>) -> Vec<Element> {
    v.sort_unstable();
    v.dedup();
    v
}

fn check_residue_split(ctx: &FieldCtx, s: &[Element]) -> Result<(), ConstructionError> {
    for &a in s {
        if !ctx.is_dth_power(a, 2)? {
            return Err(ConstructionError::SideCondition(format!("{} is a non-residue", ctx.fmt_element(a))));
        }
        if ctx.is_dth_power(ctx.neg(a), 2)? {
            return Err(ConstructionError::SideCondition(format!("-{} is a residue", ctx.fmt_element(a))));
        }
    }
    Ok(())
}

/// Needs `p = 7 mod 20`, `p > 7`. With `a = -1/5` and `S = {1, 4, 4a}`,
/// the roots are `S^{-1}` and `-S^{-1}`.
pub fn three_residues(p: u64) -> Result<ConstructedExample, ConstructionError> {
    require_congruence(p, 20, 7, 7)?;
    let ctx = prime_field(p)?;
    let a = ctx.neg(ctx.inv(ctx.from_int(5))?);
    let s = [ctx.one(), ctx.from_int(4), ctx.mul(ctx.from_int(4), a)];
    check_residue_split(&ctx, &s)?;
    let poly = SparsePoly::from_terms(
        ctx.clone(),
        [
            ((p - 1) / 2 - 1, ctx.one()),
            (2, ctx.neg(ctx.mul(ctx.from_int(16), a))),
            (0, ctx.neg(ctx.add(ctx.mul(ctx.from_int(4), a), ctx.from_int(5)))),
        ],
    );
    let mut roots = Vec::new();
    for &x in &s {
        let inv = ctx.inv(x)?;
        roots.extend([inv, ctx.neg(inv)]);
    }
    let claimed = lacunary_bound(&decompose_lacunary(&poly, 2)?.shape).value.expect("applicable");
    ConstructedExample {
        family: Family::ThreeResidues,
        params: vec![("p", p), ("a", a.value())],
        poly,
        expected_roots: sorted(roots),
        claimed_bound: claimed,
        bound_method: Method::Lacunary,
    }
    .check()
}

/// Needs `p = 3 mod 4`, `p > 3`, and distinct quadratic residues `r1`, `r2`
/// (default: the two smallest). With `a = -1/(r1 + r2)` the roots are
/// `+-r1`, `+-r2`.
pub fn two_residues(p: u64, r: Option<(u64, u64)>) -> Result<ConstructedExample, ConstructionError> {
    require_congruence(p, 4, 3, 3)?;
    let ctx = prime_field(p)?;
    let (r1, r2) = match r {
        Some(pair) => pair,
        None => {
            let mut qr = (1..p).filter(|&x| ctx.is_dth_power(ctx.from_int(x as i64), 2).unwrap_or(false));
            (qr.next().expect("1 is a residue"), qr.next().expect("p > 3"))
        }
    };
    let (e1, e2) = (ctx.from_int(r1 as i64), ctx.from_int(r2 as i64));
    for (raw, e) in [(r1, e1), (r2, e2)] {
        if e.is_zero() || !ctx.is_dth_power(e, 2)? {
            return Err(ConstructionError::NotResidue(raw));
        }
    }
    if e1 == e2 {
        return Err(ConstructionError::EqualResidues);
    }
    let a = ctx.neg(ctx.inv(ctx.add(e1, e2))?);
    let poly = SparsePoly::from_terms(
        ctx.clone(),
        [((p - 1) / 2 + 1, ctx.one()), (2, a), (0, ctx.mul(a, ctx.mul(e1, e2)))],
    );
    let roots = vec![e1, e2, ctx.neg(e1), ctx.neg(e2)];
    let claimed = excess_bound(&decompose_excess(&poly, 2)?).value.expect("applicable");
    ConstructedExample {
        family: Family::TwoResidues,
        params: vec![("p", p), ("r1", e1.value()), ("r2", e2.value()), ("a", a.value())],
        poly,
        expected_roots: sorted(roots),
        claimed_bound: claimed,
        bound_method: Method::Excess,
    }
    .check()
}

/// Needs `p = 31 mod 116`. Roots are `S` and `-S` for `S = {4, 9, 16, -29}`.
pub fn four_residues(p: u64) -> Result<ConstructedExample, ConstructionError> {
    require_congruence(p, 116, 31, 30)?;
    let ctx = prime_field(p)?;
    let s: Vec<Element> = [4, 9, 16, -29].iter().map(|&x| ctx.from_int(x)).collect();
    check_residue_split(&ctx, &s)?;
    let c = ctx.from_int(6500);
    let mut quartic = SparsePoly::constant(ctx.clone(), ctx.one());
    for &r in &s {
        let linear = SparsePoly::from_terms(ctx.clone(), [(1, ctx.one()), (0, ctx.neg(r))]);
        quartic = quartic.mul(&linear)?;
    }
    let poly = SparsePoly::monomial(ctx.clone(), (p - 1) / 2 + 1, c)
        .add(&quartic)?
        .sub(&SparsePoly::monomial(ctx.clone(), 1, c))?;
    let mut roots = s.clone();
    roots.extend(s.iter().map(|&r| ctx.neg(r)));
    let claimed = excess_bound(&decompose_excess(&normalize(&poly)?, 2)?).value.expect("applicable");
    ConstructedExample {
        family: Family::FourResidues,
        params: vec![("p", p)],
        poly,
        expected_roots: sorted(roots),
        claimed_bound: claimed,
        bound_method: Method::Excess,
    }
    .check()
}

/// `x^{Dn} + x^{D(n-1)} + ... + x^D + 1`, vanishing exactly on the
/// `D(n+1)`-th roots of unity that are not `D`-th roots of unity.
pub fn cyclotomic(ctx: Arc<FieldCtx>, big_d: u64, n: u64) -> Result<ConstructedExample, ConstructionError> {
    if big_d == 0 || n == 0 {
        return Err(ConstructionError::SideCondition("D and n must be positive".into()));
    }
    let period = big_d
        .checked_mul(n + 1)
        .ok_or_else(|| ConstructionError::SideCondition("D(n+1) overflows".into()))?;
    ctx.check_divisor(period)?;
    let poly = SparsePoly::from_terms(ctx.clone(), (0..=n).map(|j| (big_d * j, ctx.one())));
    let roots: Vec<Element> = ctx
        .nonzero()
        .filter(|&a| ctx.pow(a, period) == ctx.one() && ctx.pow(a, big_d) != ctx.one())
        .collect();
    ConstructedExample {
        family: Family::Cyclotomic,
        params: vec![("D", big_d), ("n", n)],
        claimed_bound: poly.degree().expect("nonzero"),
        poly,
        expected_roots: sorted(roots),
        bound_method: Method::Degree,
    }
    .check()
}
