//! Values computed independently of the library: by hand, by product
//! formulas for complete intersections, or by a Gröbner basis computation.

use toralrank::frontend::corpus;
use toralrank::{
    adjoin_sphere_variable, decide_finite, formal_dimension_bound, induced_map, parse, total_cohomology,
    transplant_fiber_witness, trc_map_report, trc_report, verify_map_rank_witness, verify_rank_witness,
    FinitenessEvidence, ModelDocument, RelativeModel, SullivanModel,
};

fn fixture(name: &str) -> ModelDocument {
    parse(corpus::source(name).unwrap()).unwrap()
}

fn borel_total(doc: &ModelDocument, witness: &str) -> SullivanModel {
    doc.witness(witness).unwrap().build().unwrap().total().clone()
}

fn support(m: &SullivanModel) -> Vec<(u32, usize)> {
    let bound = formal_dimension_bound(m).max(0) as u32;
    total_cohomology(m, bound + 4).support()
}

/// Coefficients of `prod (1 - x^r) / prod (1 - x^v)` for relation degrees `r`
/// and variable degrees `v`; exact when the quotient is finite.
fn complete_intersection(relations: &[u32], variables: &[u32]) -> Vec<(u32, usize)> {
    let top: u32 = relations.iter().sum::<u32>() - variables.iter().sum::<u32>();
    let n = top as usize + 1;
    let mut series = vec![0i64; n];
    series[0] = 1;
    for &r in relations {
        for j in (r as usize..n).rev() {
            series[j] -= series[j - r as usize];
        }
    }
    for &v in variables {
        for j in v as usize..n {
            series[j] += series[j - v as usize];
        }
    }
    series
        .into_iter()
        .enumerate()
        .filter(|&(_, c)| c != 0)
        .map(|(k, c)| (k as u32, c as usize))
        .collect()
}

#[test]
fn heisenberg_type_model_by_hand() {
    let doc = parse("model M { gen x : 3 gen y : 5 gen z : 7 d z = x*y }").unwrap();
    let m = doc.model("M").unwrap();
    assert_eq!(support(m), vec![(0, 1), (3, 1), (5, 1), (10, 1), (12, 1), (15, 1)]);
    assert_eq!(formal_dimension_bound(m), 15);
}

#[test]
fn projective_spaces() {
    for n in 1..=5u32 {
        let doc = parse(&format!("model S {{ gen x : {} }} witness W for S rank 1 {{ d x += t^{} }}", 2 * n + 1, n + 1)).unwrap();
        let e = borel_total(&doc, "W");
        let expected: Vec<(u32, usize)> = (0..=n).map(|i| (2 * i, 1)).collect();
        assert_eq!(support(&e), expected, "CP^{n}");
    }
}

#[test]
fn complete_intersection_cohomology() {
    let doc = fixture("su6_su3su3");
    assert_eq!(support(&borel_total(&doc, "Db")), complete_intersection(&[8, 10, 12], &[4, 6, 2]));
    assert_eq!(total_cohomology(&borel_total(&doc, "Db"), 18).total(), 20);

    let doc = fixture("image_gap");
    assert_eq!(support(&borel_total(&doc, "D2")), complete_intersection(&[4, 4, 4], &[2, 2, 2]));
}

#[test]
fn fibre_quotient_from_groebner_basis() {
    // Standard monomials of (v2^2, v2*v4 + t^3, v4^2) in grevlex.
    let hilbert = vec![(0, 1), (2, 2), (4, 3), (6, 3), (8, 2), (10, 1)];
    let doc = fixture("nonprincipal");
    let c = decide_finite(&borel_total(&doc, "Dc"));
    let FinitenessEvidence::Finite { hilbert: h, quotient_dimension, .. } = &c.evidence else {
        panic!("expected a finite verdict");
    };
    let nonzero: Vec<(u32, usize)> = h.iter().copied().filter(|p| p.1 > 0).collect();
    assert_eq!(nonzero, hilbert);
    assert_eq!(*quotient_dimension, 12);
    assert_eq!(complete_intersection(&[4, 6, 8], &[2, 2, 4]), hilbert);
    assert_eq!(support(&borel_total(&doc, "Dc")), hilbert);
}

#[test]
fn exterior_times_truncated_polynomial() {
    let doc = fixture("su6_su3su3");
    assert_eq!(total_cohomology(&borel_total(&doc, "Ds"), 43).total(), 5 * 16);
    let doc = fixture("constant_map");
    assert_eq!(formal_dimension_bound(&borel_total(&doc, "E1")), 14);
}

#[test]
fn formal_dimension_bounds() {
    let doc = fixture("su6_su3");
    assert_eq!(formal_dimension_bound(doc.model("SU6").unwrap()), 35);
    assert_eq!(formal_dimension_bound(&borel_total(&doc, "D2")), 33);
    assert_eq!(formal_dimension_bound(&borel_total(&doc, "D1")), 6);
    let doc = fixture("product_gap");
    assert_eq!(formal_dimension_bound(doc.model("X2").unwrap()), 6 * 3 + 11 - 5);
}

#[test]
fn hopf_lift_in_cohomology() {
    let doc = fixture("hopf");
    let w = doc.map_witness("H").unwrap();
    let cert = verify_map_rank_witness(w);
    let lift = &cert.certificate().unwrap().lift;
    let ranks: Vec<usize> = (0..=7).map(|k| induced_map(lift, k).unwrap().rank).collect();
    assert_eq!(ranks, vec![1, 0, 1, 0, 0, 0, 0, 0]);
}

#[test]
fn composable_corpus_maps() {
    let doc = fixture("composite_rank");
    let (g, f, gf) = (
        doc.morphism("g").unwrap(),
        doc.morphism("f").unwrap(),
        doc.morphism("gf").unwrap(),
    );
    for m in [g, f, gf] {
        assert!(m.check_chain_map().is_ok());
    }
    let composed = g.compose(f).unwrap();
    assert_eq!(&composed, gf);
    for k in 0..=16 {
        let (hg, hf, hgf) = (
            induced_map(g, k).unwrap(),
            induced_map(f, k).unwrap(),
            induced_map(gf, k).unwrap(),
        );
        assert_eq!(hgf.matrix, hf.matrix.mul(&hg.matrix), "degree {k}");
    }
}

#[test]
fn trc_reports() {
    let doc = fixture("su6_su3");
    let r = trc_report(doc.witness("D2").unwrap());
    assert_eq!((r.dimension, r.bound, r.satisfied), (32, 4, true));
    let doc = fixture("image_gap");
    let r = trc_map_report(doc.map_witness("H").unwrap()).unwrap();
    assert_eq!((r.dimension, r.bound, r.satisfied), (1, 2, false));
    let doc = fixture("rank_two_group");
    let trivial = toralrank::RankWitness::trivial(doc.model("G").unwrap().clone(), 0).unwrap();
    assert!(trc_report(&trivial).satisfied);
}

#[test]
fn transplant_on_bundle_fixture() {
    let doc = fixture("s3_bundle");
    let rel = RelativeModel::new(doc.model("B").unwrap().clone(), doc.model("E").unwrap().clone()).unwrap();
    let t = transplant_fiber_witness(&rel, doc.witness("Wf").unwrap()).unwrap();
    assert!(t.verification.is_certified());
    assert_eq!(&t.witness, doc.witness("We").unwrap());
}

#[test]
fn sphere_adjoined_to_fibre_witness() {
    let text = format!(
        "{}\nmodel Cs {{ gen v2 : 2 gen v3 : 3 gen v4 : 4 gen v5 : 5 gen v7 : 7 gen s : 7
           d v3 = v2^2  d v5 = v2*v4  d v7 = v4^2 }}
         witness Ws for Cs rank 1 {{ d v5 += t^3 }}",
        corpus::source("nonprincipal").unwrap()
    );
    let doc = parse(&text).unwrap();
    let b = doc.witness("Ws").unwrap().build().unwrap();
    assert!(verify_rank_witness(doc.witness("Ws").unwrap()).is_certified());
    let ext = adjoin_sphere_variable(&b, "s", 4).unwrap();
    assert_eq!(ext.borel.rank(), 2);
    assert!(ext.finiteness.is_finite());
    assert_eq!(ext.borel.perturbation(ext.borel.total().gens().index_of("s").unwrap()).to_string(), "t2^4");
}
