//! Verification suites behind `ikeda verify`.

use std::collections::BTreeSet;

use rayon::prelude::*;

use ikeda_core::arith::factorize;
use ikeda_core::elliptic::eigenform;
use ikeda_core::kohnen::{check_eligibility, plus_space_eigenform, shimura_consistency, SUPPORTED_KAPPA};
use ikeda_core::lift::{fourier_table, invariance_check, maass_check, LiftJob};
use ikeda_core::quadform::{enumerate_forms, Bound, HalfIntegralMatrix};
use ikeda_core::siegel::{siegel_poly, OracleOptions};
use ikeda_core::theta::{SchottkyOracle, MAX_NORM};
use ikeda_core::{Rat, Report};
use num_traits::Zero;

use crate::fixtures::{FixtureStore, Provenance, SchottkyFixture, SCHOTTKY_NAME};
use crate::{oracle_checked_poly, CliError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Shimura,
    Maass,
    Schottky,
    Funceq,
    Oracle,
    Invariance,
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub kappa: Option<u32>,
    pub n: Option<u32>,
    pub bound: Option<Bound>,
    pub limit: u64,
    pub samples: usize,
    pub seed: u64,
    pub primes: u64,
}

pub fn run(suite: Suite, cfg: &VerifyConfig, store: &FixtureStore) -> Result<Report, CliError> {
    match suite {
        Suite::Shimura => shimura(cfg),
        Suite::Maass => maass(cfg),
        Suite::Schottky => schottky(cfg, store),
        Suite::Funceq => funceq(cfg),
        Suite::Oracle => oracle(cfg, store),
        Suite::Invariance => invariance(cfg),
    }
}

fn default_bound(n: u32, binary: i64, quaternary: i64) -> Bound {
    if n == 1 {
        Bound::Det(binary)
    } else {
        Bound::Trace(quaternary)
    }
}

fn shimura(cfg: &VerifyConfig) -> Result<Report, CliError> {
    let kappas: Vec<u32> = cfg.kappa.map_or(SUPPORTED_KAPPA.to_vec(), |k| vec![k]);
    let mut report = Report::new("shimura");
    for kappa in kappas {
        let n = cfg.n.unwrap_or(if kappa % 2 == 0 { 2 } else { 1 });
        let h = plus_space_eigenform(kappa, n, cfg.limit)?;
        let f = eigenform(2 * kappa, 64)?;
        report.merge(shimura_consistency(&h, &f, cfg.limit)?);
    }
    Ok(report)
}

fn maass(cfg: &VerifyConfig) -> Result<Report, CliError> {
    let kappa = cfg.kappa.unwrap_or(9);
    if cfg.n.is_some_and(|n| n != 1) {
        return Err(CliError::Config("the Maass suite needs --degree 2".into()));
    }
    let max_det = match cfg.bound {
        None => 200,
        Some(Bound::Det(d)) => d,
        Some(Bound::Trace(_)) => return Err(CliError::Config("the Maass suite takes --max-det".into())),
    };
    let job = LiftJob::new(kappa, 1, Bound::Det(max_det))?;
    Ok(maass_check(&job, max_det)?)
}

fn max_diagonal(t: &HalfIntegralMatrix) -> i64 {
    (0..t.size()).map(|i| t.entry(i, i)).max().unwrap_or(0)
}

fn schottky(cfg: &VerifyConfig, store: &FixtureStore) -> Result<Report, CliError> {
    if cfg.kappa.is_some_and(|k| k != 6) || cfg.n.is_some_and(|n| n != 2) {
        return Err(CliError::Config("the Schottky suite is defined for --kappa 6 --degree 4".into()));
    }
    let bound = cfg.bound.unwrap_or(Bound::Trace(10));
    let job = LiftJob::new(6, 2, bound)?;
    let table: Vec<_> = fourier_table(&job)?.into_iter().filter(|c| max_diagonal(&c.t) <= MAX_NORM).collect();
    let norm = table.iter().map(|c| max_diagonal(&c.t)).max().unwrap_or(2);

    let mut fixture: SchottkyFixture = store
        .load(SCHOTTKY_NAME)
        .filter(|f: &SchottkyFixture| f.provenance.depth as i64 >= norm)
        .unwrap_or_else(|| SchottkyFixture {
            provenance: Provenance::today("theta difference, two search orders", norm as u32),
            values: Default::default(),
        });
    let missing: Vec<&HalfIntegralMatrix> =
        table.iter().map(|c| &c.t).filter(|t| !fixture.values.contains_key(&t.to_string())).collect();
    if !missing.is_empty() {
        let oracle = SchottkyOracle::new(norm)?;
        for t in missing {
            let s = oracle.schottky_coefficient_checked(t)?;
            fixture.values.insert(t.to_string(), s);
        }
        fixture.provenance = Provenance::today(&fixture.provenance.oracle, fixture.provenance.depth);
        store.store(SCHOTTKY_NAME, &fixture).map_err(|e| CliError::Io(e.to_string()))?;
    }

    let mut report = Report::new("schottky");
    let mut ratio: Option<Rat> = None;
    for c in &table {
        let s = fixture.values[&c.t.to_string()];
        match (c.value.is_zero(), s == 0) {
            (false, false) => {
                let r = &c.value / Rat::from_integer(s.into());
                let r0 = ratio.get_or_insert_with(|| r.clone()).clone();
                report.check(r == r0, || format!("{}: ratio {r} differs from {r0}", c.t));
            }
            (zero, _) => report.check(zero && s == 0, || format!("{}: lift {} but theta difference {s}", c.t, c.value)),
        }
    }
    report.check(ratio.is_some(), || "no form with both values nonzero".into());
    Ok(report)
}

fn primes_of(t: &HalfIntegralMatrix) -> BTreeSet<u64> {
    factorize(t.det_two_t() as u64).into_iter().map(|(p, _)| p).collect()
}

fn siegel_forms(cfg: &VerifyConfig, binary: i64, quaternary: i64) -> Result<Vec<HalfIntegralMatrix>, CliError> {
    let n = cfg.n.unwrap_or(1);
    if let Some(kappa) = cfg.kappa {
        check_eligibility(kappa, n)?;
    }
    let bound = cfg.bound.unwrap_or(default_bound(n, binary, quaternary));
    Ok(enumerate_forms(2 * n as usize, bound, true))
}

fn funceq(cfg: &VerifyConfig) -> Result<Report, CliError> {
    let forms = siegel_forms(cfg, 200, 10)?;
    let cases: Vec<(String, Option<String>)> = forms
        .par_iter()
        .flat_map_iter(|t| {
            primes_of(t).into_iter().map(move |p| (format!("{t} at p = {p}"), siegel_poly(t, p).err().map(|e| e.to_string())))
        })
        .collect();
    let mut report = Report::new("funceq");
    for (case, failure) in cases {
        report.check(failure.is_none(), || format!("{case}: {}", failure.unwrap_or_default()));
    }
    Ok(report)
}

fn oracle(cfg: &VerifyConfig, store: &FixtureStore) -> Result<Report, CliError> {
    let forms = siegel_forms(cfg, 60, 8)?;
    let mut report = Report::new("oracle");
    for t in &forms {
        for p in primes_of(t).into_iter().filter(|&p| p <= cfg.primes) {
            let failure = oracle_checked_poly(t, p, OracleOptions::default(), store).err();
            report.check(failure.is_none(), || format!("{t} at p = {p}: {}", failure.map(|e| e.to_string()).unwrap_or_default()));
        }
    }
    Ok(report)
}

fn invariance(cfg: &VerifyConfig) -> Result<Report, CliError> {
    let kappa = cfg.kappa.unwrap_or(9);
    let n = cfg.n.unwrap_or(if kappa.is_multiple_of(2) { 2 } else { 1 });
    let job = LiftJob::new(kappa, n, cfg.bound.unwrap_or(default_bound(n, 100, 8)))?;
    let forms: Vec<HalfIntegralMatrix> = fourier_table(&job)?.into_iter().map(|c| c.t).collect();
    Ok(invariance_check(&job, &forms, cfg.samples, cfg.seed)?)
}
