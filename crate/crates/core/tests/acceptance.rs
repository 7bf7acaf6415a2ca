//! One line per acceptance criterion; exits non-zero if any fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use common::*;
use toralrank::frontend::corpus;
use toralrank::model::Violation;
use toralrank::{
    decide_finite, induced_maps, parse, search_map_witness, search_rank_witness, total_cohomology, trc_map_report,
    verify_map_rank_witness, verify_rank_witness, Element, ModelDocument, Rejection, SearchOutcome, SearchSpace,
    SullivanModel, ToralError,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

/// A bundled fixture, optionally with extra blocks appended.
fn fixture_with(name: &str, extra: &str) -> ModelDocument {
    let text = format!("{}\n{extra}", corpus::source(name).expect("bundled fixture"));
    parse(&text).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn fixture(name: &str) -> ModelDocument {
    fixture_with(name, "")
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn total_dim(m: &SullivanModel) -> usize {
    let bound = toralrank::formal_dimension_bound(m).max(0) as u32;
    total_cohomology(m, bound).total()
}

fn borel_total(doc: &ModelDocument, witness: &str) -> SullivanModel {
    doc.witness(witness).unwrap().build().unwrap().total().clone()
}

fn d_of(doc: &ModelDocument, witness: &str, generator: &str) -> Element {
    let total = borel_total(doc, witness);
    let i = total.gens().index_of(generator).unwrap();
    total.d_of(i).clone()
}

/// Compares a fixture witness with one written out in full.
fn same_total(doc: &ModelDocument, witness: &str, reference: &str) -> Result<(), String> {
    let (a, b) = (borel_total(doc, witness), borel_total(doc, reference));
    ensure(a == b, format!("{witness} differs from {reference}"))
}

fn criterion_1() -> Outcome {
    let doc = fixture("hopf");
    let w = doc.map_witness("H").unwrap();
    let v = verify_map_rank_witness(w);
    ensure(v.is_certified(), format!("rejected: {:?}", v.rejection()))?;
    ensure(w.rank() == 1, "rank is not 1")?;
    let (e1, e2) = (total_dim(&borel_total(&doc, "W")), total_dim(&borel_total(&doc, "W7")));
    ensure((e1, e2) == (2, 4), format!("dim H(E1) = {e1}, dim H(E2) = {e2}"))?;
    Ok(format!("r = 1 certified; dim H(E1) = {e1}, dim H(E2) = {e2}"))
}

fn criterion_2() -> Outcome {
    let doc = fixture_with(
        "constant_map",
        "witness RefE1 for X rank 1 { d z = x*y + t^4 }
         witness RefE2 for Y rank 1 { d z' = x'*y' + t^6 }
         map RefF : RefE2 -> RefE1 { x' -> x*t; y' -> y*t; z' -> z*t^2; }
         mapwitness RefC for c { source RefE2; target RefE1; lift RefF; }",
    );
    same_total(&doc, "E1", "RefE1")?;
    same_total(&doc, "E2", "RefE2")?;
    let (w, reference) = (doc.map_witness("C").unwrap(), doc.map_witness("RefC").unwrap());
    ensure(w.lift_images() == reference.lift_images(), "lift differs from F(x')=xt, F(y')=yt, F(z')=zt^2")?;
    let v = verify_map_rank_witness(w);
    let c = v.certificate().ok_or_else(|| format!("rejected: {:?}", v.rejection()))?;
    ensure(c.source.finiteness.is_finite() && c.target.finiteness.is_finite(), "a verdict is not finite")?;
    ensure(decide_finite(&borel_total(&doc, "E1")).is_finite(), "E1 not finite")?;
    ensure(decide_finite(&borel_total(&doc, "E2")).is_finite(), "E2 not finite")?;
    Ok(format!("D1z = {}, r0(c) >= 1 certified, both verdicts finite", d_of(&doc, "E1", "z")))
}

fn criterion_3() -> Outcome {
    let doc = fixture_with("su6_su3", "witness Ref for SU6 rank 2 { d v1 = t1^2 d v2 = t2^3 }");
    same_total(&doc, "D2", "Ref")?;
    let v = verify_rank_witness(doc.witness("D2").unwrap());
    ensure(v.is_certified(), format!("rejected: {:?}", v.rejection()))?;
    ensure(verify_map_rank_witness(doc.map_witness("G").unwrap()).is_certified(), "map witness rejected")?;
    let (e1, e2) = (total_dim(&borel_total(&doc, "D1")), total_dim(&borel_total(&doc, "D2")));
    ensure((e1, e2) == (6, 48), format!("dim H(E1) = {e1}, dim H(D2 side) = {e2}"))?;
    Ok(format!("certified; dim H(E1) = {e1}, dim H(D2 side) = {e2} = 6 x 2^3"))
}

fn criterion_4() -> Outcome {
    let doc = fixture_with(
        "su6_su3su3",
        "witness RefDt for P rank 4 {
           d u1 = x1 + t1^2  d u2 = x2 + t2^3  d u1' = x1' + t3^2  d u2' = x2' + t4^3
         }
         witness RefDb for B rank 1 { d v4 = x1*x2 + t^5 }",
    );
    same_total(&doc, "Dt", "RefDt")?;
    same_total(&doc, "Db", "RefDb")?;
    for w in ["Dt", "Db"] {
        let v = verify_rank_witness(doc.witness(w).unwrap());
        ensure(v.is_certified(), format!("{w} rejected: {:?}", v.rejection()))?;
    }
    for h in ["Hg", "Hf"] {
        let v = verify_map_rank_witness(doc.map_witness(h).unwrap());
        ensure(v.is_certified(), format!("{h} rejected: {:?}", v.rejection()))?;
    }
    Ok("rank-4 g-witness and rank-1 f-witness certified, with their lifts".into())
}

fn criterion_5() -> Outcome {
    let doc = fixture_with("composite_rank", "witness RefDz for Z rank 2 { d w3 = t1^2 d w4 = t2^2 }");
    same_total(&doc, "Dz", "RefDz")?;
    let w = doc.map_witness("H").unwrap();
    ensure(w.rank() == 2, "rank is not 2")?;
    let v = verify_map_rank_witness(w);
    ensure(v.is_certified(), format!("rejected: {:?}", v.rejection()))?;
    let out = search_map_witness(doc.morphism("g").unwrap(), 1, &SearchSpace::default()).map_err(|e| e.to_string())?;
    match out {
        SearchOutcome::NotFound { explored, truncated } => Ok(format!(
            "r0(g o f) >= 2 certified; search for g at r = 1: not found among {explored} assignments{}",
            if truncated { " (truncated)" } else { "" }
        )),
        SearchOutcome::Found { witness, .. } => Err(format!("search found {:?}", witness.source().perturbations())),
    }
}

fn criterion_6() -> Outcome {
    let doc = fixture_with(
        "image_gap",
        "witness RefD2 for Y rank 1 { d v2 = x*y + t^2 }
         witness RefD1 for X rank 1 { d v2 = t^2 }",
    );
    same_total(&doc, "D2", "RefD2")?;
    same_total(&doc, "D1", "RefD1")?;
    let f = doc.morphism("f").unwrap();
    let cutoff = toralrank::formal_dimension_bound(f.source()).max(0) as u32;
    let (_, image) = induced_maps(f, cutoff).map_err(|e| e.to_string())?;
    ensure(image == 1, format!("dim Im H*(f) = {image}"))?;
    let w = doc.map_witness("H").unwrap();
    let lift_ok = ["x", "y"].iter().all(|n| {
        let i = w.source().gens().index_of(n).unwrap();
        w.lift_images()[i].is_zero()
    });
    ensure(lift_ok, "F(x) or F(y) is not zero")?;
    let v = verify_map_rank_witness(w);
    ensure(v.is_certified(), format!("rejected: {:?}", v.rejection()))?;
    let report = trc_map_report(w).map_err(|e| e.to_string())?;
    ensure(!report.satisfied, "map-level inequality unexpectedly holds")?;
    Ok(format!("dim Im H*(f) = {image} < 2^1 while r0(f) >= 1 certified"))
}

fn criterion_7() -> Outcome {
    let doc = fixture_with(
        "nonprincipal",
        "witness RefDc for C rank 1 { d v3 = v2^2 d v5 = v2*v4 + t^3 d v7 = v4^2 }
         witness RefD2 for X rank 1 { d u2 = w*u1 + t^3 }",
    );
    same_total(&doc, "Dc", "RefDc")?;
    let v = verify_rank_witness(doc.witness("Dc").unwrap());
    let c = v.certificate().ok_or_else(|| format!("rejected: {:?}", v.rejection()))?;
    let f = &c.finiteness;
    ensure(f.is_finite(), "verdict not finite")?;
    let reference = borel_total(&doc, "RefDc");
    let expected: Vec<Element> = ["v3", "v5", "v7"]
        .iter()
        .map(|n| reference.d_of(reference.gens().index_of(n).unwrap()).clone())
        .collect();
    let matches = |e: &Element| f.reduced_ideal.iter().any(|r| r == e || *r == -e);
    ensure(
        f.eliminated.is_empty() && f.reduced_ideal.len() == 3 && expected.iter().all(matches),
        format!("pure quotient ideal {:?}", f.reduced_ideal.iter().map(|e| e.to_string()).collect::<Vec<_>>()),
    )?;
    let mut vars = f.variables.clone();
    vars.sort();
    ensure(vars == ["t1", "v2", "v4"], format!("variables {vars:?}"))?;

    let out = search_map_witness(doc.morphism("g").unwrap(), 1, &SearchSpace::default()).map_err(|e| e.to_string())?;
    let found = out.witness().ok_or("search found nothing")?;
    ensure(verify_map_rank_witness(found).is_certified(), "found map witness does not re-verify")?;
    let d2 = found.source().build().map_err(|e| e.to_string())?;
    ensure(d2.total() == &borel_total(&doc, "RefD2"), "found D2 u2 is not w*u1 + t^3")?;
    Ok(format!(
        "r0(C) >= 1 certified via Q[t,v2,v4]/({}); searched D2 u2 = {} re-verifies",
        f.reduced_ideal.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(", "),
        d2.total().d_of(d2.total().gens().index_of("u2").unwrap())
    ))
}

fn criterion_8() -> Outcome {
    let doc = fixture("remark25_printed");
    let v = verify_rank_witness(doc.witness("W").unwrap());
    let r = v.rejection().ok_or("printed witness was certified")?;
    let located = matches!(
        r,
        Rejection::Build(ToralError::Invalid(Violation::DegreeMismatch { generator, .. })) if generator == "v"
    );
    let message = r.to_string();
    ensure(located && message.contains("u1*y*t1"), format!("diagnostic: {message}"))?;
    let x2 = fixture("product_gap");
    let c = decide_finite(x2.model("X2").unwrap());
    ensure(c.is_finite(), "X_2 not finite")?;
    let images: Vec<(String, String)> = c.pure_images.iter().map(|(n, e)| (n.clone(), e.to_string())).collect();
    ensure(images == [("v".to_string(), "w^2".to_string())], format!("pure images {images:?}"))?;
    Ok(format!("rejected with \"{message}\"; X_2 finite via v -> w^2"))
}

fn criterion_9() -> Outcome {
    let doc = fixture("rank_two_group");
    let start = Instant::now();
    let first = search_rank_witness(doc.model("G").unwrap(), 2, &SearchSpace::default()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let second = search_rank_witness(doc.model("G").unwrap(), 2, &SearchSpace::default()).map_err(|e| e.to_string())?;
    ensure(first == second, "search is not deterministic")?;
    let w = first.witness().ok_or("no witness found")?;
    let p: Vec<String> = w.perturbations().iter().map(|e| e.to_string().trim_start_matches('-').to_string()).collect();
    ensure(p == ["t1^2", "t2^3"], format!("found {p:?}"))?;
    ensure(elapsed.as_secs_f64() < 5.0, format!("took {elapsed:?}"))?;
    Ok(format!("found v1 -> {}, v2 -> {} in {:.1} ms", p[0], p[1], elapsed.as_secs_f64() * 1e3))
}

fn criterion_10() -> Outcome {
    let suites: Vec<(&str, Result<(), String>)> = vec![
        ("sign laws", run((graded(), graded()), |(a, b)| check_sign_law(a, b))),
        ("Leibniz", run((any_model(), graded(), graded()), |(m, a, b)| check_leibniz(m, a, b))),
        ("rank-nullity", run(pure_model(), check_model_rank_nullity).and(run(matrix(), check_matrix_rank_nullity))),
        (
            "Hilbert basis counts",
            run((proptest::collection::vec(2u32..=7, 1..=5), 0u32..=16), |(d, k)| check_hilbert(d, k)),
        ),
        ("witness round-trip", run(pure_witness(), check_witness_round_trip)),
        ("pure-part idempotence", run(any_model(), check_pure_part)),
    ];
    let failed: Vec<String> = suites
        .iter()
        .filter_map(|(n, r)| r.as_ref().err().map(|e| format!("{n}: {e}")))
        .collect();
    ensure(failed.is_empty(), failed.join("; "))?;
    let names: Vec<&str> = suites.iter().map(|s| s.0).collect();
    Ok(format!("{} x {CASES} cases: {}", names.len(), names.join(", ")))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("Hopf fixture", criterion_1),
        ("constant map", criterion_2),
        ("SU(3) -> SU(6)", criterion_3),
        ("SU(3) x SU(3) -> SU(6)", criterion_4),
        ("composite of rank 2n - 2", criterion_5),
        ("image dimension below 2^r", criterion_6),
        ("non-principal fibrations", criterion_7),
        ("printed product witness", criterion_8),
        ("search on rank 2 group", criterion_9),
        ("property suites", criterion_10),
    ];
    let mut failures = 0;
    for (i, (title, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS criterion {:>2} {title}: {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL criterion {:>2} {title}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
