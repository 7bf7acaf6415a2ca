//! Machine-readable results of the operations, with a short human summary.

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::algebra::Element;
use crate::cohomology::{induced_maps, total_cohomology, BettiTable, CohomologyError};
use crate::ellipticity::{decide_finite, formal_dimension_bound, FinitenessCertificate, FinitenessEvidence};
use crate::model::SullivanModel;
use crate::toral::{
    search_map_witness, search_rank_witness, verify_map_rank_witness, verify_rank_witness, RankWitness, Rejection,
    SearchOutcome, SearchSpace, ToralError, Verification,
};

use super::{render_document, render_witness, ModelDocument};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OpError {
    #[error("no {kind} named '{name}'")]
    Unknown { kind: &'static str, name: String },
    #[error(transparent)]
    Toral(#[from] ToralError),
}

/// Result of one operation. The JSON form holds `op`, `inputs_digest`,
/// `verdict`, `evidence` and `tables` with sorted keys.
#[derive(Debug, Clone, PartialEq)]
pub struct CertificateDocument {
    pub op: String,
    pub inputs_digest: String,
    pub verdict: String,
    pub evidence: Value,
    pub tables: Value,
    pub summary: String,
    /// Whether the verdict is the positive one (certified, finite, found, ...).
    pub success: bool,
}

impl CertificateDocument {
    #[allow(clippy::too_many_arguments)]
    fn new(
        op: &str,
        doc: &ModelDocument,
        args: &[(&str, String)],
        verdict: &str,
        success: bool,
        evidence: Value,
        tables: Value,
        summary: String,
    ) -> Self {
        let mut h = Sha256::new();
        h.update(op.as_bytes());
        h.update(b"\n");
        for (k, v) in args {
            h.update(format!("{k}={v}\n").as_bytes());
        }
        h.update(render_document(doc).as_bytes());
        CertificateDocument {
            op: op.to_string(),
            inputs_digest: hex::encode(h.finalize()),
            verdict: verdict.to_string(),
            evidence,
            tables,
            summary,
            success,
        }
    }

    pub fn to_value(&self) -> Value {
        json!({
            "op": self.op,
            "inputs_digest": self.inputs_digest,
            "verdict": self.verdict,
            "evidence": self.evidence,
            "tables": self.tables,
        })
    }

    /// Pretty-printed JSON with sorted keys.
    pub fn render_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("JSON values serialize")
    }

    pub fn exit_code(&self) -> i32 {
        if self.success {
            0
        } else {
            1
        }
    }
}

fn pairs<T: Into<Value> + Copy>(rows: &[(u32, T)]) -> Value {
    Value::Array(rows.iter().map(|&(k, d)| json!([k, d.into()])).collect())
}

fn render_pairs(rows: &[(u32, usize)]) -> String {
    rows.iter().map(|(k, d)| format!("{k}:{d}")).collect::<Vec<_>>().join(" ")
}

fn betti_value(t: &BettiTable) -> Value {
    pairs(&t.support())
}

fn named_elements<'a>(items: impl IntoIterator<Item = (&'a str, &'a Element)>) -> Value {
    let mut m = Map::new();
    for (k, e) in items {
        m.insert(k.to_string(), Value::String(e.to_string()));
    }
    Value::Object(m)
}

fn perturbations_value(w: &RankWitness) -> Value {
    named_elements(
        w.perturbations()
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(|(i, p)| (w.base().gens().name(i), p)),
    )
}

pub(crate) fn finiteness_value(c: &FinitenessCertificate) -> Value {
    let mut v = json!({
        "verdict": c.verdict.as_str(),
        "pure_images": named_elements(c.pure_images.iter().map(|(n, e)| (n.as_str(), e))),
        "eliminated": named_elements(c.eliminated.iter().map(|(n, e)| (n.as_str(), e))),
        "reduced_ideal": c.reduced_ideal.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
        "variables": c.variables,
        "formal_dimension_bound": c.formal_dimension_bound,
        "relies_on_pure_reduction": true,
    });
    let obj = v.as_object_mut().expect("object");
    match &c.evidence {
        FinitenessEvidence::Finite {
            window,
            hilbert,
            quotient_dimension,
        } => {
            obj.insert("window".into(), json!(window));
            obj.insert("hilbert".into(), pairs(hilbert));
            obj.insert("quotient_dimension".into(), json!(quotient_dimension));
        }
        FinitenessEvidence::Infinite { free_variable } => {
            obj.insert("free_variable".into(), json!(free_variable));
        }
        FinitenessEvidence::Unknown { cutoff } => {
            obj.insert("cutoff".into(), json!(cutoff));
        }
    }
    v
}

fn finiteness_line(c: &FinitenessCertificate) -> String {
    match &c.evidence {
        FinitenessEvidence::Finite {
            window,
            quotient_dimension,
            ..
        } => {
            let w = window
                .iter()
                .map(|k| k.to_string())
                .collect::<Vec<_>>()
                .join(",");
            format!("finite: pure quotient has dimension {quotient_dimension}, vanishing in degrees {{{w}}}")
        }
        FinitenessEvidence::Infinite { free_variable } => {
            format!("infinite: every power of {free_variable} survives in the pure quotient")
        }
        FinitenessEvidence::Unknown { cutoff } => format!("unknown up to degree {cutoff}"),
    }
}

fn rejection_value(r: &Rejection) -> Value {
    let mut v = json!({ "reason": r.to_string(), "generator": r.generator() });
    if let Rejection::NotFinite(c) = r {
        v["finiteness"] = finiteness_value(c);
    }
    v
}

/// A model by name, or the total model of a named witness.
fn resolve_model(doc: &ModelDocument, name: &str) -> Result<SullivanModel, OpError> {
    if let Some(m) = doc.model(name) {
        return Ok(m.clone());
    }
    if let Some(w) = doc.witness(name) {
        return Ok(w.build()?.total().clone());
    }
    Err(OpError::Unknown {
        kind: "model or witness",
        name: name.to_string(),
    })
}

fn default_cutoff(m: &SullivanModel) -> u32 {
    formal_dimension_bound(m).max(0) as u32
}

/// Checks degrees and `D∘D = 0` of one model or witness, or of all of them.
pub fn check_d2(doc: &ModelDocument, name: Option<&str>) -> Result<CertificateDocument, OpError> {
    let names: Vec<String> = match name {
        Some(n) => {
            if doc.model(n).is_none() && doc.witness(n).is_none() {
                return Err(OpError::Unknown {
                    kind: "model or witness",
                    name: n.to_string(),
                });
            }
            vec![n.to_string()]
        }
        None => doc.models.keys().chain(doc.witnesses.keys()).cloned().collect(),
    };
    let mut checked = Map::new();
    let mut lines = Vec::new();
    let mut all_ok = true;
    for n in &names {
        let failure: Option<(String, Option<String>)> = if let Some(m) = doc.model(n) {
            m.check_differential()
                .err()
                .map(|v| (v.to_string(), v.generator().map(str::to_string)))
        } else {
            let w = doc.witness(n).expect("listed");
            w.build().err().map(|e| {
                let r = Rejection::Build(e);
                (r.to_string(), r.generator().map(str::to_string))
            })
        };
        all_ok &= failure.is_none();
        match &failure {
            None => lines.push(format!("{n}: ok")),
            Some((reason, _)) => lines.push(format!("{n}: {reason}")),
        }
        checked.insert(
            n.clone(),
            json!({
                "valid": failure.is_none(),
                "reason": failure.as_ref().map(|f| f.0.clone()),
                "generator": failure.as_ref().and_then(|f| f.1.clone()),
            }),
        );
    }
    let arg = name.unwrap_or("*").to_string();
    Ok(CertificateDocument::new(
        "check-d2",
        doc,
        &[("model", arg)],
        if all_ok { "valid" } else { "invalid" },
        all_ok,
        json!({ "checked": checked }),
        json!({}),
        lines.join("\n"),
    ))
}

/// Betti numbers up to `max_degree` (default: the formal dimension bound).
pub fn cohomology(doc: &ModelDocument, name: &str, max_degree: Option<u32>) -> Result<CertificateDocument, OpError> {
    let m = resolve_model(doc, name)?;
    let cutoff = max_degree.unwrap_or_else(|| default_cutoff(&m));
    let table = total_cohomology(&m, cutoff);
    let summary = format!(
        "H^*({name}) in degrees 0..={cutoff}: {} (total {})",
        render_pairs(&table.support()),
        table.total()
    );
    Ok(CertificateDocument::new(
        "cohomology",
        doc,
        &[("model", name.to_string()), ("max_degree", cutoff.to_string())],
        "computed",
        true,
        json!({ "max_degree": cutoff, "total": table.total() }),
        json!({ "betti": betti_value(&table) }),
        summary,
    ))
}

/// Finiteness verdict for a model or the total model of a witness.
pub fn elliptic(doc: &ModelDocument, name: &str) -> Result<CertificateDocument, OpError> {
    let m = resolve_model(doc, name)?;
    let c = decide_finite(&m);
    let tables = match &c.evidence {
        FinitenessEvidence::Finite { hilbert, .. } => json!({ "quotient_hilbert": pairs(hilbert) }),
        _ => json!({}),
    };
    Ok(CertificateDocument::new(
        "elliptic",
        doc,
        &[("model", name.to_string())],
        c.verdict.as_str(),
        c.is_finite(),
        finiteness_value(&c),
        tables,
        format!("{name}: {}", finiteness_line(&c)),
    ))
}

pub fn verify_witness(doc: &ModelDocument, name: &str) -> Result<CertificateDocument, OpError> {
    let w = doc.witness(name).ok_or_else(|| OpError::Unknown {
        kind: "witness",
        name: name.to_string(),
    })?;
    let (verdict, evidence, tables, summary) = match verify_rank_witness(w) {
        Verification::Certified(c) => {
            let tables = match &c.finiteness.evidence {
                FinitenessEvidence::Finite { hilbert, .. } => json!({ "quotient_hilbert": pairs(hilbert) }),
                _ => json!({}),
            };
            (
                "certified",
                json!({
                    "rank": w.rank(),
                    "perturbations": perturbations_value(w),
                    "finiteness": finiteness_value(&c.finiteness),
                }),
                tables,
                format!(
                    "{name}: certified, toral rank at least {}; {}",
                    w.rank(),
                    finiteness_line(&c.finiteness)
                ),
            )
        }
        Verification::Rejected(r) => (
            "rejected",
            json!({ "rank": w.rank(), "rejection": rejection_value(&r) }),
            json!({}),
            format!("{name}: rejected: {r}"),
        ),
    };
    let success = verdict == "certified";
    Ok(CertificateDocument::new(
        "verify-witness",
        doc,
        &[("witness", name.to_string())],
        verdict,
        success,
        evidence,
        tables,
        summary,
    ))
}

pub fn verify_map_witness(doc: &ModelDocument, name: &str) -> Result<CertificateDocument, OpError> {
    let w = doc.map_witness(name).ok_or_else(|| OpError::Unknown {
        kind: "map witness",
        name: name.to_string(),
    })?;
    let (verdict, evidence, summary) = match verify_map_rank_witness(w) {
        Verification::Certified(c) => {
            let sg = c.lift.source().gens();
            let lift = named_elements(
                c.lift
                    .images()
                    .iter()
                    .enumerate()
                    .map(|(i, e)| (sg.name(i), e)),
            );
            (
                "certified",
                json!({
                    "rank": w.rank(),
                    "source": {
                        "perturbations": perturbations_value(w.source()),
                        "finiteness": finiteness_value(&c.source.finiteness),
                    },
                    "target": {
                        "perturbations": perturbations_value(w.target()),
                        "finiteness": finiteness_value(&c.target.finiteness),
                    },
                    "lift": lift,
                }),
                format!(
                    "{name}: certified, map toral rank at least {}; source {}; target {}",
                    w.rank(),
                    finiteness_line(&c.source.finiteness),
                    finiteness_line(&c.target.finiteness)
                ),
            )
        }
        Verification::Rejected(r) => (
            "rejected",
            json!({ "rank": w.rank(), "rejection": rejection_value(&r) }),
            format!("{name}: rejected: {r}"),
        ),
    };
    let success = verdict == "certified";
    Ok(CertificateDocument::new(
        "verify-map-witness",
        doc,
        &[("witness", name.to_string())],
        verdict,
        success,
        evidence,
        json!({}),
        summary,
    ))
}

fn space_args(space: &SearchSpace) -> Vec<(&'static str, String)> {
    let coeffs = space
        .coefficients
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(",");
    vec![
        ("coefficients", coeffs),
        ("max_terms", space.max_terms.to_string()),
        (
            "max_assignments",
            space.max_assignments.map_or("none".to_string(), |c| c.to_string()),
        ),
    ]
}

/// Bounded witness search on a model (`name` a model) or a map (`name` a map
/// between models).
pub fn search(doc: &ModelDocument, name: &str, rank: usize, space: &SearchSpace) -> Result<CertificateDocument, OpError> {
    let mut args = vec![("target", name.to_string()), ("rank", rank.to_string())];
    args.extend(space_args(space));
    let space_value = json!({
        "coefficients": space.coefficients.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        "max_terms": space.max_terms,
        "max_assignments": space.max_assignments,
    });
    if let Some(m) = doc.model(name) {
        let out = search_rank_witness(m, rank, space)?;
        let (verdict, witness, summary) = match &out {
            SearchOutcome::Found { witness, .. } => (
                "found",
                perturbations_value(witness),
                format!("found after {} assignments:\n{}", out.explored(), render_witness("Found", name, witness)),
            ),
            SearchOutcome::NotFound { explored, truncated } => (
                "not-found",
                Value::Null,
                format!(
                    "no certified witness of rank {rank} for {name} among {explored} assignments{}",
                    if *truncated { " (search truncated)" } else { "" }
                ),
            ),
        };
        return Ok(CertificateDocument::new(
            "search",
            doc,
            &args,
            verdict,
            out.is_found(),
            json!({
                "rank": rank,
                "explored": out.explored(),
                "truncated": matches!(out, SearchOutcome::NotFound { truncated: true, .. }),
                "space": space_value,
                "witness": witness,
            }),
            json!({}),
            summary,
        ));
    }
    let f = doc.morphism(name).ok_or_else(|| OpError::Unknown {
        kind: "model or map",
        name: name.to_string(),
    })?;
    let out = search_map_witness(f, rank, space)?;
    let (verdict, witness, summary) = match &out {
        SearchOutcome::Found { witness, .. } => {
            let sg = witness.source().gens();
            let lift = named_elements(
                witness
                    .lift_images()
                    .iter()
                    .enumerate()
                    .map(|(i, e)| (sg.name(i), e)),
            );
            let text = format!(
                "found after {} assignments:\n{}{}lift: {}",
                out.explored(),
                render_witness("Source", "source", witness.source()),
                render_witness("Target", "target", witness.target()),
                lift
            );
            (
                "found",
                json!({
                    "source": perturbations_value(witness.source()),
                    "target": perturbations_value(witness.target()),
                    "lift": lift,
                }),
                text,
            )
        }
        SearchOutcome::NotFound { explored, truncated } => (
            "not-found",
            Value::Null,
            format!(
                "no certified map witness of rank {rank} for {name} among {explored} assignments{}",
                if *truncated { " (search truncated)" } else { "" }
            ),
        ),
    };
    Ok(CertificateDocument::new(
        "search-map",
        doc,
        &args,
        verdict,
        out.is_found(),
        json!({
            "rank": rank,
            "explored": out.explored(),
            "truncated": matches!(out, SearchOutcome::NotFound { truncated: true, .. }),
            "space": space_value,
            "witness": witness,
        }),
        json!({}),
        summary,
    ))
}

/// Ranks of `H^k(f)` for a map between models.
pub fn induced_map(doc: &ModelDocument, name: &str, max_degree: Option<u32>) -> Result<CertificateDocument, OpError> {
    let f = doc.morphism(name).ok_or_else(|| OpError::Unknown {
        kind: "map between models",
        name: name.to_string(),
    })?;
    let cutoff = max_degree.unwrap_or_else(|| default_cutoff(f.source()));
    let args = [("map", name.to_string()), ("max_degree", cutoff.to_string())];
    match induced_maps(f, cutoff) {
        Ok((maps, total)) => {
            let ranks: Vec<(u32, usize)> = maps.iter().filter(|m| m.rank > 0).map(|m| (m.degree, m.rank)).collect();
            Ok(CertificateDocument::new(
                "induced-map",
                doc,
                &args,
                "computed",
                true,
                json!({ "max_degree": cutoff, "total_image_dimension": total }),
                json!({ "ranks": pairs(&ranks) }),
                format!(
                    "H^*({name}) in degrees 0..={cutoff}: ranks {}; image dimension {total}",
                    render_pairs(&ranks)
                ),
            ))
        }
        Err(CohomologyError::NotChainMap(v)) => Ok(CertificateDocument::new(
            "induced-map",
            doc,
            &args,
            "not-a-chain-map",
            false,
            json!({ "max_degree": cutoff, "reason": v.to_string(), "generator": v.generator() }),
            json!({}),
            format!("{name}: {v}"),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse;

    const HOPF: &str = "model S3 { gen x : 3 } witness W for S3 rank 1 { d x += t^2 }";

    #[test]
    fn json_keys_sorted_and_stable() {
        let doc = parse(HOPF).unwrap();
        let a = verify_witness(&doc, "W").unwrap();
        let b = verify_witness(&doc, "W").unwrap();
        assert_eq!(a.render_json(), b.render_json());
        let text = a.render_json();
        let keys: Vec<usize> = ["evidence", "inputs_digest", "op", "tables", "verdict"]
            .iter()
            .map(|k| text.find(&format!("\n  \"{k}\"")).unwrap())
            .collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(a.verdict, "certified");
        assert_eq!(a.exit_code(), 0);
    }

    #[test]
    fn betti_pairs_ascending() {
        let doc = parse(HOPF).unwrap();
        let c = cohomology(&doc, "W", Some(6)).unwrap();
        assert_eq!(c.tables["betti"], json!([[0, 1], [2, 1]]));
        assert!(c.summary.contains("0:1 2:1"));
    }

    #[test]
    fn rejected_witness_names_generator() {
        let doc = parse("model S3 { gen x : 3 } witness W for S3 rank 1 { }").unwrap();
        let c = verify_witness(&doc, "W").unwrap();
        assert_eq!(c.verdict, "rejected");
        assert_eq!(c.exit_code(), 1);
        assert_eq!(c.evidence["rejection"]["finiteness"]["free_variable"], json!("t1"));
    }

    #[test]
    fn unknown_names() {
        let doc = parse(HOPF).unwrap();
        assert!(matches!(verify_witness(&doc, "nope"), Err(OpError::Unknown { .. })));
    }
}
