//! Verification campaigns: every requested checker over seeded random instances.

use std::fmt::Write as _;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraShape, BlockDiagonalElement, MapKind, TracialMap};
use crate::checks::{self, CheckId};
use crate::error::{Error, Result};
use crate::functions::FunctionPair;
use crate::instances::{
    derive_seed, random_central, random_density, random_element, random_hermitian_element, random_normal_element,
    random_positive_element, rng_from_seed, stream_seed, InstanceRng, PairFamily, POSITIVE_SHIFT,
};
use crate::measures::MeasureContext;
use crate::report::{format_sig6, to_json_string, MarginReport, DEFAULT_TOLERANCE};

/// Attempts per instance before it is recorded as an error.
pub const MAX_ATTEMPTS: u32 = 16;

pub const DEFAULT_INSTANCES: usize = 1000;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_OUTPUT: &str = "qitineq-report.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub checks: Vec<CheckId>,
    pub instances_per_check: usize,
    pub seed: u64,
    pub shapes: Vec<AlgebraShape>,
    pub map_kinds: Vec<MapKind>,
    pub pair_families: Vec<PairFamily>,
    pub tolerance: f64,
    pub output_path: String,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        Self {
            checks: CheckId::ALL.to_vec(),
            instances_per_check: DEFAULT_INSTANCES,
            seed: DEFAULT_SEED,
            shapes: ["2", "3", "4", "2,2"].iter().map(|s| AlgebraShape::parse(s).expect("valid")).collect(),
            map_kinds: MapKind::ALL.to_vec(),
            pair_families: PairFamily::SOUND.to_vec(),
            tolerance: DEFAULT_TOLERANCE,
            output_path: DEFAULT_OUTPUT.into(),
        }
    }
}

fn split_list(s: &str, sep: char) -> impl Iterator<Item = &str> {
    s.split(sep).map(str::trim).filter(|t| !t.is_empty())
}

/// `"all"` or a comma-separated list of check ids.
pub fn parse_checks(s: &str) -> Result<Vec<CheckId>> {
    if s.trim() == "all" {
        return Ok(CheckId::ALL.to_vec());
    }
    let checks = split_list(s, ',').map(str::parse).collect::<Result<Vec<CheckId>>>()?;
    non_empty(dedup(checks), "checks")
}

/// Semicolon-separated shapes, e.g. `"2,2;3"`.
pub fn parse_shapes(s: &str) -> Result<Vec<AlgebraShape>> {
    let shapes = split_list(s, ';').map(AlgebraShape::parse).collect::<Result<Vec<_>>>()?;
    non_empty(dedup(shapes), "shapes")
}

pub fn parse_map_kinds(s: &str) -> Result<Vec<MapKind>> {
    if s.trim() == "all" {
        return Ok(MapKind::ALL.to_vec());
    }
    let kinds = split_list(s, ',').map(MapKind::parse).collect::<Result<Vec<_>>>()?;
    non_empty(dedup(kinds), "map kinds")
}

pub fn parse_pair_families(s: &str) -> Result<Vec<PairFamily>> {
    if s.trim() == "all" {
        return Ok(PairFamily::ALL.to_vec());
    }
    let families = split_list(s, ',').map(str::parse).collect::<Result<Vec<PairFamily>>>()?;
    non_empty(dedup(families), "pair families")
}

fn dedup<T: PartialEq>(items: Vec<T>) -> Vec<T> {
    let mut out = Vec::with_capacity(items.len());
    for x in items {
        if !out.contains(&x) {
            out.push(x);
        }
    }
    out
}

fn non_empty<T>(items: Vec<T>, what: &str) -> Result<Vec<T>> {
    if items.is_empty() {
        Err(Error::Parse(format!("no {what} given")))
    } else {
        Ok(items)
    }
}

/// One (shape, map, family) slot a check cycles through.
#[derive(Debug, Clone)]
struct Combo {
    shape: AlgebraShape,
    map: TracialMap,
    family: Option<PairFamily>,
}

impl CampaignConfig {
    pub fn validate(&self) -> Result<()> {
        if self.instances_per_check == 0 {
            return Err(Error::Parse("instances per check must be at least 1".into()));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(Error::Parse(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        for (empty, what) in [
            (self.checks.is_empty(), "checks"),
            (self.shapes.is_empty(), "shapes"),
            (self.map_kinds.is_empty(), "map kinds"),
            (self.pair_families.is_empty(), "pair families"),
        ] {
            if empty {
                return Err(Error::Parse(format!("no {what} given")));
            }
        }
        for shape in &self.shapes {
            for kind in &self.map_kinds {
                kind.build(shape)?;
            }
        }
        Ok(())
    }

    fn combos(&self, check: CheckId) -> Result<Vec<Combo>> {
        let families: Vec<Option<PairFamily>> = if check.uses_pair() {
            self.pair_families.iter().copied().map(Some).collect()
        } else {
            vec![None]
        };
        let mut out = Vec::new();
        for shape in &self.shapes {
            for &kind in self.map_kinds.iter().filter(|&&k| check.supports(k)) {
                let map = kind.build(shape)?;
                for &family in &families {
                    out.push(Combo {
                        shape: shape.clone(),
                        map: map.clone(),
                        family,
                    });
                }
            }
        }
        Ok(out)
    }
}

/// Result of one instance of one check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignEntry {
    pub check_id: CheckId,
    pub instance_index: usize,
    pub shape: AlgebraShape,
    pub map_kind: MapKind,
    pub pair_family: Option<PairFamily>,
    pub regenerations: u32,
    pub report: Option<MarginReport>,
    pub error: Option<String>,
}

impl CampaignEntry {
    pub fn is_violation(&self) -> bool {
        self.report.as_ref().is_some_and(|r| !r.passed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub check_id: CheckId,
    pub instances: usize,
    pub min_margin: Option<f64>,
    pub violations: usize,
    pub boundary: usize,
    pub regenerations: u64,
    pub errors: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub seed: u64,
    pub tolerance: f64,
    pub reports: Vec<CampaignEntry>,
    pub summary: Vec<CheckSummary>,
}

impl CampaignReport {
    pub fn violations(&self) -> usize {
        self.summary.iter().map(|s| s.violations).sum()
    }

    pub fn errors(&self) -> usize {
        self.summary.iter().map(|s| s.errors).sum()
    }

    /// 0 when every instance ran and passed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.violations() == 0 && self.errors() == 0 {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        to_json_string(self).expect("campaign reports serialize")
    }

    pub fn summary_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<26} {:>9} {:>13} {:>10} {:>8} {:>7} {:>6}",
            "check_id", "instances", "min_margin", "violations", "boundary", "regens", "errors"
        );
        for s in &self.summary {
            let min = s.min_margin.map_or_else(|| "-".to_string(), format_sig6);
            let _ = writeln!(
                out,
                "{:<26} {:>9} {:>13} {:>10} {:>8} {:>7} {:>6}",
                s.check_id.name(),
                s.instances,
                min,
                s.violations,
                s.boundary,
                s.regenerations,
                s.errors
            );
        }
        let _ = writeln!(
            out,
            "{} violation(s), {} error(s) at tolerance {}",
            self.violations(),
            self.errors(),
            format_sig6(self.tolerance)
        );
        out
    }
}

fn hermitian_pair(rng: &mut InstanceRng, shape: &AlgebraShape) -> (BlockDiagonalElement<f64>, BlockDiagonalElement<f64>) {
    let a = random_hermitian_element(rng, shape);
    (a, random_hermitian_element(rng, shape))
}

fn any_pair(rng: &mut InstanceRng, shape: &AlgebraShape) -> (BlockDiagonalElement<f64>, BlockDiagonalElement<f64>) {
    let a = random_element(rng, shape);
    (a, random_element(rng, shape))
}

/// Draws one instance of `check` from `seed` and runs it.
fn run_once(check: CheckId, combo: &Combo, index: usize, seed: u64) -> Result<MarginReport> {
    let mut rng = rng_from_seed(seed);
    let density = random_density::<f64, _>(&mut rng, &combo.map);
    let shape = density.rho().shape().clone();
    let pair = combo.family.map(|f| f.sample(&mut rng));
    let waived = combo.family.is_some_and(|f| !f.is_same_monotone());
    let context = |pair: FunctionPair| -> Result<MeasureContext<f64>> {
        let ctx = MeasureContext::new(combo.map.clone(), density.rho().clone(), pair)?;
        Ok(if waived { ctx.waive_same_monotone() } else { ctx })
    };
    let pair_or_err = || pair.clone().ok_or_else(|| Error::Precondition(format!("{check} needs a function pair")));
    match check {
        CheckId::ClassicalHeisenberg => {
            let (a, b) = hermitian_pair(&mut rng, &shape);
            checks::check_classical_heisenberg(&density, &a, &b)
        }
        CheckId::ClassicalSchrodinger => {
            let (a, b) = hermitian_pair(&mut rng, &shape);
            checks::check_classical_schrodinger(&density, &a, &b)
        }
        CheckId::ClassicalCorrCs => {
            let alpha = rng.gen_range(0.0..=1.0);
            let (a, b) = hermitian_pair(&mut rng, &shape);
            checks::check_classical_corr_cs(&density, alpha, &a, &b)
        }
        CheckId::VarianceCovariance => {
            let (a, b) = any_pair(&mut rng, &shape);
            checks::check_variance_covariance_classical(&density, &a, &b)
        }
        CheckId::VarCovMatrix => {
            let (a, b) = any_pair(&mut rng, &shape);
            checks::check_var_cov_matrix(&context(pair_or_err()?)?, &a, &b)
        }
        CheckId::SchrodingerCommutative => {
            let (a, b) = hermitian_pair(&mut rng, &shape);
            checks::check_schrodinger_commutative(&context(pair_or_err()?)?, &a, &b)
        }
        CheckId::Kadison => {
            let a = random_element::<f64, _>(&mut rng, &shape);
            let b = random_positive_element(&mut rng, &shape, POSITIVE_SHIFT);
            checks::check_kadison(&combo.map, &a, &b)
        }
        CheckId::HeisenbergGeneral => {
            let (a, b) = hermitian_pair(&mut rng, &shape);
            checks::check_heisenberg_general(&context(pair_or_err()?)?, &a, &b)
        }
        CheckId::SkewPositivity => {
            let a = random_hermitian_element::<f64, _>(&mut rng, &shape);
            checks::check_skew_positivity(&context(pair_or_err()?)?, &a)
        }
        CheckId::SkewSum => {
            let a = random_element::<f64, _>(&mut rng, &shape);
            checks::check_skew_sum_nonneg(&context(pair_or_err()?)?, &a)
        }
        CheckId::CorrCsMatrix => {
            let (a, b) = hermitian_pair(&mut rng, &shape);
            checks::check_corr_cs_matrix(&context(pair_or_err()?)?, &a, &b)
        }
        CheckId::CorrCsNorm => {
            let (a, b) = hermitian_pair(&mut rng, &shape);
            checks::check_corr_cs_norm(&context(pair_or_err()?)?, &a, &b)
        }
        CheckId::ConditionalExpectationCs => {
            let pair = pair_or_err()?;
            // odd instances exercise the normal-operator case with f = g
            let (pair, a, b) = if index % 2 == 1 {
                let a = random_normal_element(&mut rng, &shape);
                let b = random_normal_element(&mut rng, &shape);
                (FunctionPair::new(pair.f.clone(), pair.f), a, b)
            } else {
                let (a, b) = hermitian_pair(&mut rng, &shape);
                (pair, a, b)
            };
            let c = random_central(&mut rng, &shape);
            checks::check_conditional_expectation_cs(&context(pair)?, &a, &b, &c)
        }
        CheckId::Chain => {
            let a = if index.is_multiple_of(2) {
                random_hermitian_element::<f64, _>(&mut rng, &shape)
            } else {
                random_element::<f64, _>(&mut rng, &shape)
            };
            checks::check_chain(&context(pair_or_err()?)?, &a)
        }
        CheckId::AlphaChain => {
            let alpha = rng.gen_range(0.0..=1.0);
            let a = random_hermitian_element::<f64, _>(&mut rng, &shape);
            checks::check_alpha_chain(&density, alpha, &a)
        }
    }
}

/// Runs instance `index` of `check`, regenerating from the next derived seed when
/// a drawn instance violates a precondition of the checker.
fn run_instance(check: CheckId, combo: &Combo, stream: u64, index: usize, tolerance: f64) -> CampaignEntry {
    let first = derive_seed(stream, index as u64);
    let mut last_error = None;
    let mut report = None;
    let mut attempt = 0;
    while attempt < MAX_ATTEMPTS {
        let seed = if attempt == 0 { first } else { derive_seed(first, u64::from(attempt)) };
        match run_once(check, combo, index, seed) {
            Ok(r) => {
                report = Some(r.with_seed(seed).with_tolerance(tolerance));
                break;
            }
            Err(e) => last_error = Some(e),
        }
        attempt += 1;
    }
    CampaignEntry {
        check_id: check,
        instance_index: index,
        shape: combo.shape.clone(),
        map_kind: combo.map.kind(),
        pair_family: combo.family,
        regenerations: attempt,
        error: if report.is_none() { last_error.map(|e| e.to_string()) } else { None },
        report,
    }
}

fn summarize(check: CheckId, entries: &[CampaignEntry]) -> CheckSummary {
    let reports: Vec<&MarginReport> = entries.iter().filter_map(|e| e.report.as_ref()).collect();
    CheckSummary {
        check_id: check,
        instances: entries.len(),
        min_margin: reports.iter().map(|r| r.min_margin()).reduce(f64::min),
        violations: reports.iter().filter(|r| !r.passed).count(),
        boundary: reports.iter().filter(|r| r.is_boundary()).count(),
        regenerations: entries.iter().map(|e| u64::from(e.regenerations)).sum(),
        errors: entries.iter().filter(|e| e.report.is_none()).count(),
    }
}

/// Runs the campaign. Output depends only on the config, not on scheduling.
pub fn run_campaign(config: &CampaignConfig) -> Result<CampaignReport> {
    config.validate()?;
    let mut checks = config.checks.clone();
    checks.sort_by_key(|c| c.name());
    let mut jobs = Vec::new();
    let mut plans = Vec::new();
    for &check in &checks {
        let combos = config.combos(check)?;
        let stream = stream_seed(config.seed, check.name());
        if !combos.is_empty() {
            for index in 0..config.instances_per_check {
                jobs.push((check, plans.len(), stream, index));
            }
        }
        plans.push(combos);
    }
    let reports: Vec<CampaignEntry> = jobs
        .into_par_iter()
        .map(|(check, plan, stream, index)| {
            let combos = &plans[plan];
            run_instance(check, &combos[index % combos.len()], stream, index, config.tolerance)
        })
        .collect();
    let summary = checks
        .iter()
        .map(|&check| {
            let start = reports.partition_point(|e| e.check_id.name() < check.name());
            let end = reports.partition_point(|e| e.check_id.name() <= check.name());
            summarize(check, &reports[start..end])
        })
        .collect();
    Ok(CampaignReport {
        seed: config.seed,
        tolerance: config.tolerance,
        reports,
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(checks: &str, instances: usize) -> CampaignConfig {
        CampaignConfig {
            checks: parse_checks(checks).unwrap(),
            instances_per_check: instances,
            ..CampaignConfig::default()
        }
    }

    #[test]
    fn parsers() {
        assert_eq!(parse_checks("all").unwrap().len(), 15);
        assert_eq!(parse_checks("kadison, chain,kadison").unwrap(), vec![CheckId::Kadison, CheckId::Chain]);
        assert!(parse_checks("bogus").is_err());
        assert!(parse_checks("").is_err());
        let shapes = parse_shapes("2,2;3").unwrap();
        assert_eq!(shapes[0].block_dims(), &[2, 2]);
        assert_eq!(shapes[1].block_dims(), &[3]);
        assert!(parse_shapes("2;x").is_err());
        assert_eq!(parse_map_kinds("doubling,scalar_trace").unwrap(), vec![MapKind::Doubling, MapKind::ScalarTrace]);
        assert_eq!(parse_pair_families("adversarial_non_monotone").unwrap(), vec![PairFamily::AdversarialNonMonotone]);
    }

    #[test]
    fn config_validation() {
        assert!(CampaignConfig::default().validate().is_ok());
        let zero = CampaignConfig {
            instances_per_check: 0,
            ..CampaignConfig::default()
        };
        assert!(zero.validate().is_err());
        let tol = CampaignConfig {
            tolerance: 0.0,
            ..CampaignConfig::default()
        };
        assert!(tol.validate().is_err());
        let big = CampaignConfig {
            shapes: parse_shapes("20").unwrap(),
            ..CampaignConfig::default()
        };
        assert!(big.validate().is_err(), "doubling a 20-dim shape exceeds the size cap");
    }

    #[test]
    fn every_check_passes_a_short_campaign() {
        let report = run_campaign(&small("all", 24)).unwrap();
        assert_eq!(report.summary.len(), 15);
        for s in &report.summary {
            assert_eq!(s.instances, 24, "{:?}", s.check_id);
            assert_eq!(s.errors, 0, "{:?}", s.check_id);
            assert_eq!(s.violations, 0, "{:?} min {:?}", s.check_id, s.min_margin);
        }
        assert_eq!(report.exit_code(), 0);
        let names: Vec<&str> = report.reports.iter().map(|e| e.check_id.name()).collect();
        assert!(names.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn campaigns_are_deterministic() {
        let config = small("skew_sum,kadison,chain", 12);
        let a = run_campaign(&config).unwrap().to_json();
        let b = run_campaign(&config).unwrap().to_json();
        assert_eq!(a, b);
        let other = run_campaign(&CampaignConfig { seed: 7, ..config }).unwrap().to_json();
        assert_ne!(a, other);
    }

    #[test]
    fn report_json_round_trips() {
        let report = run_campaign(&small("classical_heisenberg,conditional_expectation_cs", 6)).unwrap();
        let back: CampaignReport = serde_json::from_str(&report.to_json()).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn adversarial_pair_is_caught() {
        let config = CampaignConfig {
            checks: vec![CheckId::SkewPositivity],
            instances_per_check: 200,
            shapes: parse_shapes("2").unwrap(),
            map_kinds: vec![MapKind::ScalarTrace],
            pair_families: vec![PairFamily::AdversarialNonMonotone],
            ..CampaignConfig::default()
        };
        let report = run_campaign(&config).unwrap();
        assert!(report.summary[0].violations > 0);
        assert!(report.summary[0].min_margin.unwrap() < -1e-6);
        assert_eq!(report.exit_code(), 1);
    }

    #[test]
    fn classical_checks_skip_without_scalar_trace() {
        let config = CampaignConfig {
            map_kinds: vec![MapKind::BlockTrace],
            ..small("classical_heisenberg,kadison", 3)
        };
        let report = run_campaign(&config).unwrap();
        assert_eq!(report.summary[0].check_id, CheckId::ClassicalHeisenberg);
        assert_eq!(report.summary[0].instances, 0);
        assert_eq!(report.summary[0].min_margin, None);
        assert_eq!(report.summary[1].instances, 3);
        assert!(report.summary_table().contains("classical_heisenberg"));
    }
}
