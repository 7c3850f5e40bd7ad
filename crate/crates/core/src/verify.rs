//! Seeded random soundness checks: every applicable bound must be at least
//! the brute-force root count.
//!
//! Trial `j` draws from `ChaCha8Rng::seed_from_u64(seed + j)`:
//! - `q` uniform over the odd prime powers up to `max_q`;
//! - with probability 4/5 a lacunary instance `x^{M - l} + g`: `d` uniform
//!   over divisors `>= 2` of `q - 1` with `M = (q-1)/d >= 2`, `l` uniform in
//!   `[0, M - 2]`, `g°` uniform in `[1, M - l - 1]`, `t` uniform in `[2, 6]`
//!   terms (fewer if `g°` is too small), nonzero constant term;
//! - otherwise a general polynomial with 1 to 6 terms, exponents below `q - 1`.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::bounds::{bound_all, normalize, BoundError, BoundOutcome, Method};
use crate::field::{FieldCtx, FieldError};
use crate::numtheory::{divisors, prime_power};
use crate::poly::{PolyError, SparsePoly};

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("no odd prime power q <= {0}")]
    EmptyFieldList(u64),
    #[error(transparent)]
    Bound(#[from] BoundError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyConfig {
    pub seed: u64,
    pub trials: u64,
    pub max_q: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { seed: 1, trials: 10_000, max_q: 997 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    /// `None` for injected instances.
    pub trial: Option<u64>,
    pub field: String,
    pub poly: String,
    pub method: Method,
    pub d: Option<u64>,
    pub bound: u64,
    pub roots: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tightness {
    pub ratio: f64,
    pub method: Method,
    pub roots: u64,
    pub bound: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialResult {
    pub roots: u64,
    pub bounds_checked: u64,
    pub tightest: Option<Tightness>,
    pub violations: Vec<Violation>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub trials: u64,
    pub injected: u64,
    pub bounds_checked: u64,
    pub max_tightness: Option<Tightness>,
    pub violations: Vec<Violation>,
}

impl VerifyReport {
    pub fn is_sound(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Odd prime powers `q <= max_q`.
pub fn odd_prime_powers(max_q: u64) -> Vec<u64> {
    (3..=max_q).step_by(2).filter(|&q| prime_power(q).is_some()).collect()
}

/// Compares each applicable outcome with the root count of the normalized
/// polynomial.
pub fn check_outcomes(f: &SparsePoly, outcomes: &[BoundOutcome], trial: Option<u64>) -> Result<TrialResult, VerifyError> {
    let g = normalize(f)?;
    let roots = g.count_roots_bruteforce()?.count as u64;
    let mut result = TrialResult { roots, bounds_checked: 0, tightest: None, violations: Vec::new() };
    for o in outcomes.iter().filter(|o| o.applicable) {
        let bound = o.value.expect("applicable outcomes carry a value");
        result.bounds_checked += 1;
        if bound < roots {
            result.violations.push(Violation {
                trial,
                field: f.ctx().spec(),
                poly: f.to_string(),
                method: o.method,
                d: o.d,
                bound,
                roots,
            });
        } else if bound > 0 {
            let ratio = roots as f64 / bound as f64;
            if result.tightest.map_or(true, |t| ratio > t.ratio) {
                result.tightest = Some(Tightness { ratio, method: o.method, roots, bound });
            }
        }
    }
    Ok(result)
}

pub fn check_instance(f: &SparsePoly, trial: Option<u64>) -> Result<TrialResult, VerifyError> {
    check_outcomes(f, &bound_all(f, None)?, trial)
}

fn random_terms(rng: &mut ChaCha8Rng, ctx: &Arc<FieldCtx>, exps: impl IntoIterator<Item = u64>) -> Vec<(u64, crate::field::Element)> {
    let q = ctx.q();
    exps.into_iter()
        .map(|e| (e, ctx.element(rng.gen_range(1..q)).expect("below q")))
        .collect()
}

/// The polynomial for trial `index`.
pub fn random_instance(seed: u64, index: u64, fields: &[Arc<FieldCtx>]) -> SparsePoly {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(index));
    let ctx = fields.choose(&mut rng).expect("nonempty field list").clone();
    let order = ctx.order();
    let ds: Vec<u64> = divisors(order).into_iter().filter(|&d| d >= 2 && order / d >= 2).collect();
    if ds.is_empty() || rng.gen_range(0..5) == 0 {
        let t = rng.gen_range(1..=6usize).min(order as usize);
        let exps = rand::seq::index::sample(&mut rng, order as usize, t).into_iter().map(|e| e as u64);
        let terms = random_terms(&mut rng, &ctx, exps);
        return SparsePoly::from_terms(ctx, terms);
    }
    let d = *ds.choose(&mut rng).expect("nonempty");
    let m = order / d;
    let ell = rng.gen_range(0..=m - 2);
    let g_degree = rng.gen_range(1..=m - ell - 1);
    let t = rng.gen_range(2..=6u64).min(g_degree + 1);
    let mut exps = vec![g_degree, 0];
    exps.extend(
        rand::seq::index::sample(&mut rng, (g_degree - 1) as usize, (t - 2) as usize)
            .into_iter()
            .map(|e| e as u64 + 1),
    );
    let mut terms = random_terms(&mut rng, &ctx, exps);
    terms.push((m - ell, ctx.one()));
    SparsePoly::from_terms(ctx, terms)
}

fn merge(mut acc: VerifyReport, r: TrialResult) -> VerifyReport {
    acc.bounds_checked += r.bounds_checked;
    if let Some(t) = r.tightest {
        if acc.max_tightness.map_or(true, |m| t.ratio > m.ratio) {
            acc.max_tightness = Some(t);
        }
    }
    acc.violations.extend(r.violations);
    acc
}

/// Runs the seeded trials plus any injected instances. Trials run in
/// parallel; results are reduced in trial order so the report depends only
/// on the configuration.
pub fn run(config: &VerifyConfig, injected: &[SparsePoly]) -> Result<VerifyReport, VerifyError> {
    let qs = odd_prime_powers(config.max_q);
    if qs.is_empty() {
        return Err(VerifyError::EmptyFieldList(config.max_q));
    }
    let mut fields = Vec::with_capacity(qs.len());
    for q in qs {
        let (p, k) = prime_power(q).expect("filtered");
        fields.push(Arc::new(FieldCtx::new(p, k, None)?));
    }
    let results: Vec<TrialResult> = (0..config.trials)
        .into_par_iter()
        .map(|j| check_instance(&random_instance(config.seed, j, &fields), Some(j)))
        .collect::<Result<_, _>>()?;
    let mut report = VerifyReport {
        trials: config.trials,
        injected: injected.len() as u64,
        bounds_checked: 0,
        max_tightness: None,
        violations: Vec::new(),
    };
    for r in results {
        report = merge(report, r);
    }
    for f in injected {
        report = merge(report, check_instance(f, None)?);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(s: &str) -> Arc<FieldCtx> {
        Arc::new(s.parse().unwrap())
    }

    #[test]
    fn field_list() {
        let qs = odd_prime_powers(30);
        assert_eq!(qs, vec![3, 5, 7, 9, 11, 13, 17, 19, 23, 25, 27, 29]);
    }

    #[test]
    fn instances_are_reproducible() {
        let fields: Vec<_> = [47u64, 49, 379].iter().map(|&q| {
            let (p, k) = prime_power(q).unwrap();
            Arc::new(FieldCtx::new(p, k, None).unwrap())
        }).collect();
        for j in 0..50 {
            let a = random_instance(9, j, &fields);
            let b = random_instance(9, j, &fields);
            assert_eq!(a, b);
            assert!(!a.is_zero());
            assert!(a.degree().unwrap() < a.ctx().order());
        }
    }

    #[test]
    fn small_run_is_sound_and_deterministic() {
        let cfg = VerifyConfig { seed: 3, trials: 200, max_q: 101 };
        let a = run(&cfg, &[]).unwrap();
        assert!(a.is_sound(), "{:?}", a.violations);
        assert_eq!(a, run(&cfg, &[]).unwrap());
        assert!(a.max_tightness.unwrap().ratio <= 1.0);
    }

    #[test]
    fn injected_instance_is_counted() {
        let ctx = field("47");
        let f = SparsePoly::parse("x^22+22x^2+24", ctx).unwrap();
        let cfg = VerifyConfig { seed: 1, trials: 0, max_q: 47 };
        let r = run(&cfg, &[f]).unwrap();
        assert_eq!(r.injected, 1);
        assert!(r.is_sound());
        let t = r.max_tightness.unwrap();
        assert_eq!((t.roots, t.bound, t.ratio), (6, 6, 1.0));
    }

    #[test]
    fn corrupted_bound_is_flagged() {
        let ctx = field("47");
        let f = SparsePoly::parse("x^22+22x^2+24", ctx).unwrap();
        let mut outcomes = bound_all(&f, None).unwrap();
        let target = outcomes.iter_mut().find(|o| o.method == Method::Lacunary && o.applicable).unwrap();
        target.value = Some(5);
        let r = check_outcomes(&f, &outcomes, Some(0)).unwrap();
        assert_eq!(r.violations.len(), 1);
        let v = &r.violations[0];
        assert_eq!((v.method, v.d, v.bound, v.roots), (Method::Lacunary, Some(2), 5, 6));
        assert_eq!(v.field, "47");
    }
}
