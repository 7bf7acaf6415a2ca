//! The bundled example files and the checks run against each of them.

use std::fmt;

use rayon::prelude::*;

use super::{certificate, parse, CertificateDocument, ModelDocument};
use crate::toral::SearchSpace;

/// What a fixture asserts about one of its blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Check {
    /// `check-d2` on a model or witness.
    Differential { name: &'static str, valid: bool },
    /// Finiteness verdict of a model or of a witness' total model.
    Finite { name: &'static str, finite: bool },
    Witness { name: &'static str, certified: bool },
    MapWitness { name: &'static str, certified: bool },
    /// Total dimension of cohomology up to the formal dimension bound.
    TotalCohomology { name: &'static str, dimension: usize },
    /// Total dimension of the image of the induced map in cohomology.
    ImageDimension { map: &'static str, dimension: usize },
    SearchRank { model: &'static str, rank: usize, found: bool },
    SearchMap { map: &'static str, rank: usize, found: bool },
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let yes_no = |b: bool, y: &'static str, n: &'static str| if b { y } else { n };
        match self {
            Check::Differential { name, valid } => write!(f, "d-squared {name}: {}", yes_no(*valid, "zero", "nonzero")),
            Check::Finite { name, finite } => write!(f, "elliptic {name}: {}", yes_no(*finite, "finite", "not finite")),
            Check::Witness { name, certified } => {
                write!(f, "witness {name}: {}", yes_no(*certified, "certified", "rejected"))
            }
            Check::MapWitness { name, certified } => {
                write!(f, "map witness {name}: {}", yes_no(*certified, "certified", "rejected"))
            }
            Check::TotalCohomology { name, dimension } => write!(f, "dim H({name}) = {dimension}"),
            Check::ImageDimension { map, dimension } => write!(f, "dim Im H({map}) = {dimension}"),
            Check::SearchRank { model, rank, found } => {
                write!(f, "search {model} rank {rank}: {}", yes_no(*found, "found", "not found"))
            }
            Check::SearchMap { map, rank, found } => {
                write!(f, "search map {map} rank {rank}: {}", yes_no(*found, "found", "not found"))
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: &'static str,
    pub source: &'static str,
    pub checks: Vec<Check>,
}

impl Fixture {
    pub fn document(&self) -> ModelDocument {
        parse(self.source).unwrap_or_else(|e| panic!("bundled fixture {} fails to parse: {e}", self.name))
    }
}

#[derive(Debug, Clone)]
pub struct CheckReport {
    pub check: Check,
    pub passed: bool,
    /// Summary of the certificate, or the error raised.
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct FixtureReport {
    pub name: &'static str,
    pub checks: Vec<CheckReport>,
}

impl FixtureReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

macro_rules! fixture {
    ($name:literal) => {
        ($name, include_str!(concat!("../../fixtures/", $name, ".sm")))
    };
}

/// Fixture names and their text, in a fixed order.
pub const SOURCES: &[(&str, &str)] = &[
    fixture!("hopf"),
    fixture!("constant_map"),
    fixture!("s5_fibration"),
    fixture!("sphere_products"),
    fixture!("composite_rank"),
    fixture!("rank_two_group"),
    fixture!("su6_su3"),
    fixture!("su6_su3su3"),
    fixture!("nonprincipal"),
    fixture!("product_gap"),
    fixture!("remark25_printed"),
    fixture!("image_gap"),
    fixture!("s3_bundle"),
];

/// Text of a bundled fixture by name (without the `.sm` extension).
pub fn source(name: &str) -> Option<&'static str> {
    SOURCES.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

fn checks_for(name: &str) -> Vec<Check> {
    use Check::*;
    match name {
        "hopf" => vec![
            Differential { name: "S3", valid: true },
            Differential { name: "S7", valid: true },
            Witness { name: "W", certified: true },
            Witness { name: "W7", certified: true },
            TotalCohomology { name: "W", dimension: 2 },
            TotalCohomology { name: "W7", dimension: 4 },
            MapWitness { name: "H", certified: true },
            SearchMap { map: "f", rank: 1, found: true },
        ],
        "constant_map" => vec![
            Differential { name: "X", valid: true },
            Differential { name: "Y", valid: true },
            Finite { name: "E1", finite: true },
            Finite { name: "E2", finite: true },
            MapWitness { name: "C", certified: true },
        ],
        "s5_fibration" => vec![
            Witness { name: "Wx", certified: true },
            Witness { name: "Wy", certified: true },
            SearchMap { map: "f", rank: 1, found: false },
        ],
        "sphere_products" => vec![
            MapWitness { name: "Hf", certified: true },
            MapWitness { name: "Hg", certified: true },
            MapWitness { name: "Hgf", certified: true },
        ],
        "composite_rank" => vec![
            Differential { name: "X", valid: true },
            Witness { name: "Dz", certified: true },
            Witness { name: "Dx", certified: true },
            MapWitness { name: "H", certified: true },
            SearchMap { map: "g", rank: 1, found: false },
            SearchRank { model: "Y", rank: 1, found: true },
        ],
        "rank_two_group" => vec![
            SearchRank { model: "G", rank: 2, found: true },
            SearchRank { model: "S3", rank: 1, found: true },
        ],
        "su6_su3" => vec![
            Witness { name: "D2", certified: true },
            Witness { name: "D1", certified: true },
            TotalCohomology { name: "D1", dimension: 6 },
            TotalCohomology { name: "D2", dimension: 48 },
            MapWitness { name: "G", certified: true },
        ],
        "su6_su3su3" => vec![
            Differential { name: "P", valid: true },
            Differential { name: "B", valid: true },
            Witness { name: "Dt", certified: true },
            MapWitness { name: "Hg", certified: true },
            Witness { name: "Db", certified: true },
            MapWitness { name: "Hf", certified: true },
        ],
        "nonprincipal" => vec![
            Differential { name: "X", valid: true },
            Differential { name: "Eprinted", valid: false },
            Differential { name: "E", valid: true },
            Differential { name: "C", valid: true },
            Witness { name: "Dc", certified: true },
            MapWitness { name: "G", certified: true },
            SearchMap { map: "g", rank: 1, found: true },
        ],
        "product_gap" => vec![
            Differential { name: "X2", valid: true },
            Finite { name: "X2", finite: true },
        ],
        "remark25_printed" => vec![
            Differential { name: "W", valid: false },
            Witness { name: "W", certified: false },
        ],
        "image_gap" => vec![
            ImageDimension { map: "f", dimension: 1 },
            Witness { name: "D1", certified: true },
            Witness { name: "D2", certified: true },
            MapWitness { name: "H", certified: true },
        ],
        "s3_bundle" => vec![
            Differential { name: "E", valid: true },
            Witness { name: "Wf", certified: true },
            Witness { name: "We", certified: true },
        ],
        _ => Vec::new(),
    }
}

pub fn fixtures() -> Vec<Fixture> {
    SOURCES
        .iter()
        .map(|&(name, source)| Fixture {
            name,
            source,
            checks: checks_for(name),
        })
        .collect()
}

fn run_check(doc: &ModelDocument, check: &Check) -> CheckReport {
    let space = SearchSpace::default();
    let result: Result<(bool, CertificateDocument), super::OpError> = match check {
        Check::Differential { name, valid } => certificate::check_d2(doc, Some(name)).map(|c| (c.success == *valid, c)),
        Check::Finite { name, finite } => certificate::elliptic(doc, name).map(|c| (c.success == *finite, c)),
        Check::Witness { name, certified } => {
            certificate::verify_witness(doc, name).map(|c| (c.success == *certified, c))
        }
        Check::MapWitness { name, certified } => {
            certificate::verify_map_witness(doc, name).map(|c| (c.success == *certified, c))
        }
        Check::TotalCohomology { name, dimension } => certificate::cohomology(doc, name, None)
            .map(|c| (c.evidence["total"].as_u64() == Some(*dimension as u64), c)),
        Check::ImageDimension { map, dimension } => certificate::induced_map(doc, map, None).map(|c| {
            (
                c.evidence["total_image_dimension"].as_u64() == Some(*dimension as u64),
                c,
            )
        }),
        Check::SearchRank { model, rank, found } => {
            certificate::search(doc, model, *rank, &space).map(|c| (c.success == *found, c))
        }
        Check::SearchMap { map, rank, found } => {
            certificate::search(doc, map, *rank, &space).map(|c| (c.success == *found, c))
        }
    };
    match result {
        Ok((passed, c)) => CheckReport {
            check: check.clone(),
            passed,
            detail: c.summary,
        },
        Err(e) => CheckReport {
            check: check.clone(),
            passed: false,
            detail: e.to_string(),
        },
    }
}

pub fn run_fixture(fixture: &Fixture) -> FixtureReport {
    let checks = match parse(fixture.source) {
        Ok(doc) => fixture.checks.par_iter().map(|c| run_check(&doc, c)).collect(),
        Err(e) => vec![CheckReport {
            check: Check::Differential {
                name: "<parse>",
                valid: true,
            },
            passed: false,
            detail: e.to_string(),
        }],
    };
    FixtureReport {
        name: fixture.name,
        checks,
    }
}

/// Runs every bundled fixture; reports come back in fixture order.
pub fn run_corpus() -> Vec<FixtureReport> {
    fixtures().par_iter().map(run_fixture).collect()
}
