//! Strategies and property checks shared by the property suite and the
//! acceptance runner.
#![allow(dead_code)]

use std::collections::BTreeMap;

use proptest::collection::vec;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use toralrank::linalg::{kernel_basis, rank, rank_rational, SparseVec};
use toralrank::{
    decide_finite, formal_dimension_bound, induced_map, monomial_basis, parse, rat, total_cohomology,
    verify_rank_witness, BorelModel, Element, GeneratorSet, Morphism, Rational, RankWitness, SullivanModel,
};
use toralrank::cohomology::{betti, chain_dimension, differential_rank};

pub const CASES: u32 = 256;

pub fn config() -> Config {
    Config {
        cases: CASES,
        failure_persistence: None,
        ..Config::default()
    }
}

pub fn mixed_gens() -> GeneratorSet {
    GeneratorSet::from_degrees([("a", 2), ("b", 4), ("x", 3), ("y", 3), ("z", 5)]).unwrap()
}

pub fn pure_gens() -> GeneratorSet {
    GeneratorSet::from_degrees([("e", 2), ("f", 4), ("x", 3), ("y", 5), ("z", 7)]).unwrap()
}

fn combination(gens: &GeneratorSet, basis: Vec<toralrank::Monomial>, max_terms: usize) -> BoxedStrategy<Element> {
    let g = gens.clone();
    if basis.is_empty() {
        return Just(Element::zero(&g)).boxed();
    }
    let n = basis.len();
    vec((0..n, -3i64..=3), 0..=max_terms)
        .prop_map(move |picks| Element::from_terms(&g, picks.into_iter().map(|(i, c)| (basis[i].clone(), rat(c)))))
        .boxed()
}

/// A random element of degree `k`.
pub fn homogeneous(gens: &GeneratorSet, k: u32) -> BoxedStrategy<Element> {
    combination(gens, monomial_basis(gens, k), 4)
}

/// A random element of degree `k` in the even generators only.
pub fn even_only(gens: &GeneratorSet, k: u32) -> BoxedStrategy<Element> {
    let basis = monomial_basis(gens, k).into_iter().filter(|m| !m.has_odd()).collect();
    combination(gens, basis, 3)
}

pub fn graded() -> BoxedStrategy<(u32, Element)> {
    (0u32..=9)
        .prop_flat_map(|k| (Just(k), homogeneous(&mixed_gens(), k)))
        .boxed()
}

/// Any degree-raising derivation on the mixed generators; `D∘D` need not vanish.
pub fn any_model() -> BoxedStrategy<SullivanModel> {
    let g = mixed_gens();
    let parts: Vec<BoxedStrategy<Element>> = g.iter().map(|x| homogeneous(&g, x.degree() + 1)).collect();
    parts
        .prop_map(move |d| SullivanModel::new(g.clone(), d).unwrap())
        .boxed()
}

/// Pure models: odd generators go to polynomials in `e`, `f`.
pub fn pure_model() -> BoxedStrategy<SullivanModel> {
    let g = pure_gens();
    let parts: Vec<BoxedStrategy<Element>> = g
        .iter()
        .map(|x| {
            if x.is_odd() {
                even_only(&g, x.degree() + 1)
            } else {
                Just(Element::zero(&g)).boxed()
            }
        })
        .collect();
    parts
        .prop_map(move |d| SullivanModel::new(g.clone(), d).unwrap())
        .boxed()
}

/// Small pure base with a random rank-one witness whose perturbations avoid
/// odd generators.
pub fn pure_witness() -> BoxedStrategy<RankWitness> {
    let base_gens = GeneratorSet::from_degrees([("e", 2), ("x", 3), ("y", 5)]).unwrap();
    let borel = BorelModel::borel_generators(&base_gens, 1).unwrap();
    let t = borel.index_of("t1").unwrap();
    let base_parts: Vec<BoxedStrategy<Element>> = base_gens
        .iter()
        .map(|x| {
            if x.is_odd() {
                even_only(&base_gens, x.degree() + 1)
            } else {
                Just(Element::zero(&base_gens)).boxed()
            }
        })
        .collect();
    let pert_parts: Vec<BoxedStrategy<Element>> = base_gens
        .iter()
        .map(|x| {
            if x.is_odd() {
                let basis = monomial_basis(&borel, x.degree() + 1)
                    .into_iter()
                    .filter(|m| !m.has_odd() && m.contains(t))
                    .collect();
                combination(&borel, basis, 2)
            } else {
                Just(Element::zero(&borel)).boxed()
            }
        })
        .collect();
    (base_parts, pert_parts)
        .prop_map(move |(d, p)| {
            let base = SullivanModel::new(base_gens.clone(), d).unwrap();
            RankWitness::new(base, 1, p).unwrap()
        })
        .boxed()
}

pub fn matrix() -> BoxedStrategy<Vec<SparseVec<Rational>>> {
    (1usize..=6, 1usize..=6)
        .prop_flat_map(|(rows, cols)| vec(vec((0..rows, -4i64..=4), 0..=rows), cols))
        .prop_map(|cols| {
            cols.into_iter()
                .map(|entries| {
                    let mut v = SparseVec::new();
                    for (i, c) in entries {
                        if c != 0 {
                            v.insert(i, rat(c));
                        }
                    }
                    v
                })
                .collect()
        })
        .boxed()
}

/// Coefficient of `x^k` in the product of `1/(1-x^d)` over even generators
/// and `1+x^d` over odd generators.
pub fn hilbert_oracle(degrees: &[u32], k: u32) -> usize {
    let mut series = vec![0usize; k as usize + 1];
    series[0] = 1;
    for &d in degrees {
        let d = d as usize;
        if d.is_multiple_of(2) {
            for j in d..=k as usize {
                series[j] += series[j - d];
            }
        } else {
            for j in (d..=k as usize).rev() {
                series[j] += series[j - d];
            }
        }
    }
    series[k as usize]
}

fn sign(p: u32, q: u32) -> Rational {
    if p % 2 == 1 && q % 2 == 1 {
        rat(-1)
    } else {
        rat(1)
    }
}

pub fn check_sign_law((p, a): (u32, Element), (q, b): (u32, Element)) -> Result<(), TestCaseError> {
    let ab = a.multiply(&b).unwrap();
    let ba = b.multiply(&a).unwrap();
    prop_assert_eq!(ab, ba.scale(&sign(p, q)));
    if p % 2 == 1 {
        prop_assert!(a.multiply(&a).unwrap().is_zero());
    }
    Ok(())
}

pub fn check_associativity(a: Element, b: Element, c: Element) -> Result<(), TestCaseError> {
    let left = a.multiply(&b).unwrap().multiply(&c).unwrap();
    let right = a.multiply(&b.multiply(&c).unwrap()).unwrap();
    prop_assert_eq!(left, right);
    let sum = (&b + &c).multiply(&a).unwrap();
    prop_assert_eq!(sum, &b.multiply(&a).unwrap() + &c.multiply(&a).unwrap());
    Ok(())
}

pub fn check_leibniz(m: SullivanModel, (p, a): (u32, Element), (_, b): (u32, Element)) -> Result<(), TestCaseError> {
    let lhs = m.apply_d(&a.multiply(&b).unwrap()).unwrap();
    let first = m.apply_d(&a).unwrap().multiply(&b).unwrap();
    let second = a.multiply(&m.apply_d(&b).unwrap()).unwrap().scale(&sign(p, 1));
    prop_assert_eq!(lhs, &first + &second);
    Ok(())
}

pub fn check_matrix_rank_nullity(cols: Vec<SparseVec<Rational>>) -> Result<(), TestCaseError> {
    let r = rank(&cols);
    prop_assert_eq!(r, rank_rational(&cols));
    let kernel = kernel_basis(&cols);
    prop_assert_eq!(r + kernel.len(), cols.len());
    for v in &kernel {
        let mut image: BTreeMap<usize, Rational> = BTreeMap::new();
        for (j, c) in v {
            for (i, a) in &cols[*j] {
                *image.entry(*i).or_insert_with(|| rat(0)) += a * c;
            }
        }
        prop_assert!(image.values().all(|x| *x == rat(0)));
    }
    Ok(())
}

/// `dim A^k = rank d_k + dim Z^k` and `dim Z^k = rank d_{k-1} + b_k`, summed
/// into the truncated Euler characteristic.
pub fn check_model_rank_nullity(m: SullivanModel) -> Result<(), TestCaseError> {
    const N: u32 = 14;
    let table = total_cohomology(&m, N);
    let mut chain = 0i64;
    let mut homology = 0i64;
    for k in 0..=N {
        let s = if k % 2 == 0 { 1 } else { -1 };
        let c = chain_dimension(&m, k);
        let b = betti(&m, k);
        prop_assert_eq!(table.get(k), b);
        prop_assert!(differential_rank(&m, k) <= c);
        chain += s * c as i64;
        homology += s * b as i64;
    }
    let s = if N.is_multiple_of(2) { 1 } else { -1 };
    prop_assert_eq!(chain - homology, s * differential_rank(&m, N) as i64);
    Ok(())
}

pub fn check_hilbert(degrees: Vec<u32>, k: u32) -> Result<(), TestCaseError> {
    let names: Vec<String> = (0..degrees.len()).map(|i| format!("g{i}")).collect();
    let gens = GeneratorSet::from_degrees(names.iter().map(String::as_str).zip(degrees.iter().copied())).unwrap();
    let basis = monomial_basis(&gens, k);
    prop_assert_eq!(basis.len(), hilbert_oracle(&degrees, k));
    prop_assert!(basis.iter().all(|m| gens.monomial_degree(m) == k));
    prop_assert!(basis.windows(2).all(|w| w[0] < w[1]));
    Ok(())
}

pub fn check_witness_round_trip(w: RankWitness) -> Result<(), TestCaseError> {
    let b = w.build().unwrap();
    prop_assert_eq!(&RankWitness::from_borel(&b), &w);
    prop_assert_eq!(&b.restrict_fiber(), w.base());
    prop_assert!(b.total().check_differential().is_ok());
    let direct = decide_finite(b.total());
    let verdict = verify_rank_witness(&w);
    prop_assert_eq!(verdict.is_certified(), direct.is_finite());
    if let Some(c) = verdict.certificate() {
        prop_assert_eq!(&c.finiteness, &direct);
        prop_assert!(c.finiteness.recheck());
        let rebuilt = RankWitness::from_borel(&c.borel);
        prop_assert!(verify_rank_witness(&rebuilt).is_certified());
    }
    Ok(())
}

pub fn check_pure_part(m: SullivanModel) -> Result<(), TestCaseError> {
    let p = m.pure_part();
    prop_assert_eq!(&p.pure_part(), &p);
    for (i, d) in p.differential().iter().enumerate() {
        if p.gens().is_odd(i) {
            prop_assert!(d.terms().all(|(mono, _)| !mono.has_odd()));
            prop_assert_eq!(d.clone(), m.d_of(i).filter_terms(|mono| !mono.has_odd()));
        } else {
            prop_assert!(d.is_zero());
        }
    }
    Ok(())
}

pub fn model_text(m: &SullivanModel) -> String {
    let mut s = String::from("model M {\n");
    for g in m.gens().iter() {
        s += &format!("  gen {} : {}\n", g.name(), g.degree());
    }
    for (i, d) in m.differential().iter().enumerate() {
        if !d.is_zero() {
            s += &format!("  d {} = {d}\n", m.gens().name(i));
        }
    }
    s + "}\n"
}

pub fn check_render_parse(m: SullivanModel) -> Result<(), TestCaseError> {
    let doc = parse(&model_text(&m)).unwrap();
    prop_assert_eq!(doc.model("M").unwrap(), &m);
    let again = parse(&toralrank::render_document(&doc)).unwrap();
    prop_assert_eq!(again, doc);
    Ok(())
}

/// A finite verdict must agree with cohomology vanishing past the formal
/// dimension bound.
pub fn check_window(m: SullivanModel) -> Result<(), TestCaseError> {
    let c = decide_finite(&m);
    if c.is_finite() {
        prop_assert!(c.recheck());
        let bound = formal_dimension_bound(&m);
        prop_assert!(bound >= 0);
        let table = total_cohomology(&m, bound as u32 + 6);
        for (k, d) in table.support() {
            prop_assert!(k as i64 <= bound, "H^{} = {} above bound {}", k, d, bound);
        }
        prop_assert_eq!(table.get(bound as u32), 1);
    }
    Ok(())
}

/// Inclusion into `M ⊗ Λ(n)` followed by the projection back.
pub fn check_functoriality(m: SullivanModel) -> Result<(), TestCaseError> {
    let n = SullivanModel::free(GeneratorSet::from_degrees([("n", 3)]).unwrap());
    let t = m.tensor(&n).unwrap();
    let incl_images = (0..m.gens().len()).map(|i| t.gens().generator(i)).collect();
    let incl = Morphism::new(m.clone(), t.clone(), incl_images).unwrap();
    let mut proj_images: Vec<Element> = (0..m.gens().len()).map(|i| m.gens().generator(i)).collect();
    proj_images.push(Element::zero(m.gens()));
    let proj = Morphism::new(t.clone(), m.clone(), proj_images).unwrap();
    let id = incl.compose(&proj).unwrap();
    prop_assert!(id.check_chain_map().is_ok());
    for k in 0..=10 {
        let hi = induced_map(&incl, k).unwrap();
        let hp = induced_map(&proj, k).unwrap();
        let hid = induced_map(&id, k).unwrap();
        prop_assert_eq!(&hid.matrix, &hp.matrix.mul(&hi.matrix));
        prop_assert_eq!(&hid.matrix, &toralrank::DenseMatrix::identity(hid.matrix.rows));
        prop_assert_eq!(hp.rank, hid.rank);
    }
    Ok(())
}

/// Runs a check through proptest with the shared configuration.
pub fn run<S: Strategy>(
    strategy: S,
    check: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    let mut runner = TestRunner::new(config());
    runner.run(&strategy, check).map_err(|e| e.to_string())
}
