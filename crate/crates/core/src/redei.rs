//! Exhaustive check that a divisor of `x^{q-1} - 1` of degree `M = (q-1)/d`
//! whose second exponent is at most `(q-1)/d^2` is an Euler binomial
//! `x^M - a` or, for `d = 2` with `4 | q - 1` in odd characteristic,
//! `(x^{M/2} - b)(x^{M/2} - c)` with `b^2 = 1`, `c^2 = -1`.
//!
//! Divisors of `x^{q-1} - 1` correspond to subsets of `F_q^*`, so this walks
//! all `C(q-1, M)` subsets.

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::field::{Element, FieldCtx, FieldError};
use crate::poly::SparsePoly;

pub const DEFAULT_ENUMERATION_CAP: u64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RedeiError {
    #[error("C({n}, {k}) exceeds the enumeration cap {cap}")]
    EnumerationTooLarge { n: u64, k: u64, cap: u64 },
    #[error("d must be at least 2")]
    DTooSmall,
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SurvivorKind {
    EulerBinomial { alpha: u64 },
    SquareRootPair { beta: u64, gamma: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Survivor {
    pub poly: SparsePoly,
    pub kind: Option<SurvivorKind>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RedeiReport {
    pub q: u64,
    pub d: u64,
    pub subsets: u64,
    pub survivors: Vec<Survivor>,
    /// How many survivors the two admissible shapes predict.
    pub expected: u64,
}

impl RedeiReport {
    pub fn unexplained(&self) -> impl Iterator<Item = &Survivor> {
        self.survivors.iter().filter(|s| s.kind.is_none())
    }

    pub fn passes(&self) -> bool {
        self.unexplained().next().is_none() && self.survivors.len() as u64 == self.expected
    }
}

/// `C(n, k)`, or `None` once it exceeds `cap`.
fn binomial_capped(n: u64, k: u64, cap: u64) -> Option<u64> {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > cap as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

fn pair_form(ctx: &FieldCtx, m: u64) -> bool {
    ctx.p() != 2 && m % 2 == 0 && ctx.order() % 4 == 0
}

fn classify(ctx: &FieldCtx, f: &SparsePoly, d: u64) -> Option<SurvivorKind> {
    let m = ctx.order() / d;
    let terms = f.terms();
    let one = ctx.one();
    match terms {
        [(e, c), (0, a)] if *e == m && *c == one => {
            let alpha = ctx.neg(*a);
            (ctx.pow(alpha, d) == one).then_some(SurvivorKind::EulerBinomial { alpha: alpha.value() })
        }
        [(e, c), (h, s), (0, p)] if d == 2 && *e == m && *h == m / 2 && *c == one && pair_form(ctx, m) => {
            let minus_one = ctx.neg(one);
            [one, minus_one].into_iter().find_map(|beta| {
                let gamma = ctx.div(*p, beta).ok()?;
                let ok = ctx.mul(gamma, gamma) == minus_one && ctx.add(beta, gamma) == ctx.neg(*s);
                ok.then_some(SurvivorKind::SquareRootPair { beta: beta.value(), gamma: gamma.value() })
            })
        }
        _ => None,
    }
}

struct Walk<'a> {
    ctx: &'a FieldCtx,
    elems: Vec<Element>,
    m: usize,
    limit: u64,
    subsets: u64,
    found: Vec<Vec<Element>>,
}

impl Walk<'_> {
    /// `prod` holds the dense product so far, constant term first.
    fn dfs(&mut self, start: usize, prod: &[Element]) {
        let depth = prod.len() - 1;
        if depth == self.m {
            self.subsets += 1;
            let second = (0..self.m).rev().find(|&e| !prod[e].is_zero()).unwrap_or(0);
            if second as u64 <= self.limit {
                self.found.push(prod.to_vec());
            }
            return;
        }
        let remaining = self.m - depth;
        for i in start..=self.elems.len() - remaining {
            let a = self.elems[i];
            let mut next = vec![self.ctx.zero(); prod.len() + 1];
            for (j, &c) in prod.iter().enumerate() {
                next[j + 1] = self.ctx.add(next[j + 1], c);
                next[j] = self.ctx.sub(next[j], self.ctx.mul(a, c));
            }
            self.dfs(i + 1, &next);
        }
    }
}

pub fn redei_check(ctx: Arc<FieldCtx>, d: u64, cap: u64) -> Result<RedeiReport, RedeiError> {
    if d < 2 {
        return Err(RedeiError::DTooSmall);
    }
    ctx.check_divisor(d)?;
    let order = ctx.order();
    let m = order / d;
    if binomial_capped(order, m, cap).is_none() {
        return Err(RedeiError::EnumerationTooLarge { n: order, k: m, cap });
    }
    let mut walk = Walk {
        ctx: &ctx,
        elems: ctx.nonzero().collect(),
        m: m as usize,
        limit: order / (d * d),
        subsets: 0,
        found: Vec::new(),
    };
    walk.dfs(0, &[ctx.one()]);
    let survivors = walk
        .found
        .into_iter()
        .map(|dense| {
            let poly = SparsePoly::from_terms(ctx.clone(), dense.into_iter().enumerate().map(|(e, c)| (e as u64, c)));
            let kind = classify(&ctx, &poly, d);
            Survivor { poly, kind }
        })
        .collect();
    let expected = d + if d == 2 && pair_form(&ctx, m) { 4 } else { 0 };
    Ok(RedeiReport { q: ctx.q(), d, subsets: walk.subsets, survivors, expected })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(s: &str) -> Arc<FieldCtx> {
        Arc::new(s.parse().unwrap())
    }

    #[test]
    fn f13_square_case() {
        let ctx = field("13");
        let r = redei_check(ctx.clone(), 2, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(r.subsets, 924);
        assert!(r.passes());
        let mut polys: Vec<String> = r.survivors.iter().map(|s| s.poly.to_string()).collect();
        polys.sort();
        let mut want: Vec<String> = ["x^6 + 12", "x^6 + 1"]
            .iter()
            .map(|s| SparsePoly::parse(s, ctx.clone()).unwrap().to_string())
            .collect();
        for (b, g) in [(1, 5), (1, 8), (12, 5), (12, 8)] {
            let f = SparsePoly::parse(&format!("x^3 - {b}"), ctx.clone())
                .unwrap()
                .mul(&SparsePoly::parse(&format!("x^3 - {g}"), ctx.clone()).unwrap())
                .unwrap();
            want.push(f.to_string());
        }
        want.sort();
        assert_eq!(polys, want);
    }

    #[test]
    fn f7_cube_case() {
        let r = redei_check(field("7"), 3, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(r.subsets, 15);
        let mut alphas: Vec<u64> = r
            .survivors
            .iter()
            .map(|s| match s.kind {
                Some(SurvivorKind::EulerBinomial { alpha }) => alpha,
                other => panic!("{other:?}"),
            })
            .collect();
        alphas.sort();
        assert_eq!(alphas, vec![1, 2, 4]);
    }

    #[test]
    fn extension_fields() {
        let r = redei_check(field("3^2"), 2, DEFAULT_ENUMERATION_CAP).unwrap();
        assert!(r.passes());
        assert_eq!(r.survivors.len(), 6);
        for (q, d) in [("2^4", 3), ("2^4", 5), ("5^2", 3)] {
            assert!(redei_check(field(q), d, DEFAULT_ENUMERATION_CAP).unwrap().passes(), "{q} {d}");
        }
    }

    #[test]
    fn all_small_fields() {
        for q in [3u64, 4, 5, 7, 8, 9, 11, 13, 16] {
            let ctx: Arc<FieldCtx> = field(&match crate::numtheory::prime_power(q).unwrap() {
                (p, 1) => p.to_string(),
                (p, k) => format!("{p}^{k}"),
            });
            for d in crate::numtheory::divisors(q - 1).into_iter().filter(|&d| d >= 2) {
                let r = redei_check(ctx.clone(), d, DEFAULT_ENUMERATION_CAP).unwrap();
                assert!(r.passes(), "q={q} d={d}: {:?}", r.survivors);
            }
        }
    }

    #[test]
    fn refuses_large_enumerations() {
        assert_eq!(
            redei_check(field("101"), 2, DEFAULT_ENUMERATION_CAP),
            Err(RedeiError::EnumerationTooLarge { n: 100, k: 50, cap: DEFAULT_ENUMERATION_CAP })
        );
        assert_eq!(redei_check(field("13"), 1, 10), Err(RedeiError::DTooSmall));
        assert!(matches!(redei_check(field("13"), 5, 10), Err(RedeiError::Field(FieldError::NotADivisor { .. }))));
    }
}
