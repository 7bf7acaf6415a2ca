//! Text format for models, witnesses and maps, certificate documents, and the
//! bundled example corpus.
//!
//! ```text
//! model S7 { gen y : 7 }
//! model S3 { gen x : 3 }
//! witness W7 for S7 rank 1 { d y += t^4 }
//! witness W3 for S3 rank 1 { d x = t^2 }
//! map f : S7 -> S3 { }
//! map F : W7 -> W3 { y -> x*t^2; }
//! mapwitness H for f { source W7; target W3; lift F; }
//! ```
//!
//! `d v = e` gives the whole differential and `d v += e` only the part added to
//! the base differential. Witness blocks of rank `r` declare `t1..tr` of
//! degree 2; in rank one `t` also names `t1`. Unlisted map images are zero,
//! except that `t_i` goes to `t_i` in maps between witnesses.

mod certificate;
pub mod corpus;
mod lexer;
mod parser;

use std::fmt::Write as _;

use indexmap::IndexMap;
use thiserror::Error;

use crate::model::{Morphism, SullivanModel};
use crate::toral::{MapRankWitness, RankWitness};

pub use certificate::{
    check_d2, cohomology, elliptic, induced_map, search, verify_map_witness, verify_witness, CertificateDocument,
    OpError,
};
pub use lexer::Pos;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(pos: Pos, message: impl Into<String>) -> Self {
        ParseError {
            line: pos.line,
            column: pos.column,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessBlock {
    pub model: String,
    pub witness: RankWitness,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MapBlock {
    Models {
        source: String,
        target: String,
        morphism: Morphism,
    },
    /// Images of the source Borel generators in the target Borel algebra.
    Witnesses {
        source: String,
        target: String,
        images: Vec<crate::algebra::Element>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapWitnessBlock {
    pub map: String,
    pub source: String,
    pub target: String,
    pub lift: String,
    pub witness: MapRankWitness,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ModelDocument {
    pub models: IndexMap<String, SullivanModel>,
    pub witnesses: IndexMap<String, WitnessBlock>,
    pub maps: IndexMap<String, MapBlock>,
    pub map_witnesses: IndexMap<String, MapWitnessBlock>,
}

impl ModelDocument {
    pub fn model(&self, name: &str) -> Option<&SullivanModel> {
        self.models.get(name)
    }

    pub fn witness(&self, name: &str) -> Option<&RankWitness> {
        self.witnesses.get(name).map(|w| &w.witness)
    }

    pub fn morphism(&self, name: &str) -> Option<&Morphism> {
        match self.maps.get(name) {
            Some(MapBlock::Models { morphism, .. }) => Some(morphism),
            _ => None,
        }
    }

    pub fn map_witness(&self, name: &str) -> Option<&MapRankWitness> {
        self.map_witnesses.get(name).map(|w| &w.witness)
    }
}

pub fn parse(text: &str) -> Result<ModelDocument, ParseError> {
    parser::parse_document(text)
}

fn render_model(out: &mut String, name: &str, m: &SullivanModel) {
    let _ = writeln!(out, "model {name} {{");
    for g in m.gens().iter() {
        let _ = writeln!(out, "  gen {} : {}", g.name(), g.degree());
    }
    for (i, d) in m.differential().iter().enumerate() {
        if !d.is_zero() {
            let _ = writeln!(out, "  d {} = {d}", m.gens().name(i));
        }
    }
    out.push_str("}\n");
}

/// A witness block listing the nonzero perturbations.
pub fn render_witness(name: &str, model: &str, w: &RankWitness) -> String {
    let mut out = format!("witness {name} for {model} rank {} {{\n", w.rank());
    for (i, p) in w.perturbations().iter().enumerate() {
        if !p.is_zero() {
            let _ = writeln!(out, "  d {} += {p}", w.base().gens().name(i));
        }
    }
    out.push_str("}\n");
    out
}

fn render_map(out: &mut String, name: &str, doc: &ModelDocument, block: &MapBlock) {
    match block {
        MapBlock::Models {
            source,
            target,
            morphism,
        } => {
            let _ = writeln!(out, "map {name} : {source} -> {target} {{");
            let sg = morphism.source().gens();
            for (i, img) in morphism.images().iter().enumerate() {
                if !img.is_zero() {
                    let _ = writeln!(out, "  {} -> {img};", sg.name(i));
                }
            }
        }
        MapBlock::Witnesses {
            source,
            target,
            images,
        } => {
            let _ = writeln!(out, "map {name} : {source} -> {target} {{");
            let (s, t) = (&doc.witnesses[source].witness, &doc.witnesses[target].witness);
            let defaults = parser::default_lift(s, t);
            for (i, img) in images.iter().enumerate() {
                if *img != defaults[i] {
                    let _ = writeln!(out, "  {} -> {img};", s.gens().name(i));
                }
            }
        }
    }
    out.push_str("}\n");
}

/// Canonical text: models, witnesses, maps, then map witnesses, each in
/// declaration order.
pub fn render_document(doc: &ModelDocument) -> String {
    let mut blocks = Vec::new();
    for (name, m) in &doc.models {
        let mut s = String::new();
        render_model(&mut s, name, m);
        blocks.push(s);
    }
    for (name, w) in &doc.witnesses {
        blocks.push(render_witness(name, &w.model, &w.witness));
    }
    for (name, m) in &doc.maps {
        let mut s = String::new();
        render_map(&mut s, name, doc, m);
        blocks.push(s);
    }
    for (name, w) in &doc.map_witnesses {
        blocks.push(format!(
            "mapwitness {name} for {} {{\n  source {};\n  target {};\n  lift {};\n}}\n",
            w.map, w.source, w.target, w.lift
        ));
    }
    blocks.join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_generator_model() {
        let doc = parse("model S3 { gen v : 3 }").unwrap();
        assert_eq!(doc.models.len(), 1);
        assert_eq!(doc.models["S3"].gens().len(), 1);
    }

    #[test]
    fn non_homogeneous_rejected() {
        let e = parse("model M {\n  gen x : 3\n  gen t : 2\n  d x = x + t\n}").unwrap_err();
        assert_eq!(e.line, 4);
        assert!(e.message.contains("non-homogeneous"), "{}", e.message);
    }

    #[test]
    fn unknown_and_duplicate_names() {
        let e = parse("model M { gen x : 3 d x = y^2 }").unwrap_err();
        assert!(e.message.contains("unknown generator 'y'"));
        assert_eq!(e.column, 27);
        let e = parse("model M { gen x : 3 gen x : 5 }").unwrap_err();
        assert!(e.message.contains("duplicate generator"));
        assert_eq!(e.column, 25);
        let e = parse("model M { gen x : 1 }").unwrap_err();
        assert_eq!(e.column, 15);
    }

    #[test]
    fn witness_forms_agree() {
        let text = "model X { gen x : 3  gen y : 5  gen z : 7  d z = x*y }
                    witness A for X rank 1 { d z = x*y + t^4 }
                    witness B for X rank 1 { d z += t1^4 }";
        let doc = parse(text).unwrap();
        assert_eq!(doc.witness("A").unwrap(), doc.witness("B").unwrap());
        let b = doc.witness("A").unwrap().build().unwrap();
        assert_eq!(b.total().d_of(2).to_string(), "t1^4 + x*y");
    }

    #[test]
    fn reserved_borel_names() {
        let e = parse("model X { gen t1 : 2 } witness W for X rank 1 { }").unwrap_err();
        assert!(e.message.contains("reserved"));
    }

    #[test]
    fn map_images_and_defaults() {
        let text = "model A { gen a : 3 gen b : 3 }
                    model B { gen a : 3 }
                    map f : A -> B { a -> a; }";
        let doc = parse(text).unwrap();
        let f = doc.morphism("f").unwrap();
        assert!(f.image(1).is_zero());
        let e = parse("model A { gen a : 3 } model B { gen c : 5 } map f : A -> B { a -> c; }").unwrap_err();
        assert!(e.message.contains("degree"));
    }

    #[test]
    fn rational_coefficients_and_unicode() {
        let doc = parse("model M { gen a : 2 gen b : 2 gen v : 3 d v = −1/2*a^2 + 2*a*b }").unwrap();
        assert_eq!(doc.models["M"].d_of(2).to_string(), "2*a*b - 1/2*a^2");
    }

    #[test]
    fn render_round_trip() {
        let text = "model S7 { gen y : 7 }
                    model S3 { gen x : 3 }
                    witness W7 for S7 rank 1 { d y += t^4 }
                    witness W3 for S3 rank 1 { d x = t^2 }
                    map f : S7 -> S3 { }
                    map F : W7 -> W3 { y -> x*t^2; }
                    mapwitness H for f { source W7; target W3; lift F; }";
        let doc = parse(text).unwrap();
        let rendered = render_document(&doc);
        let again = parse(&rendered).unwrap();
        assert_eq!(again, doc);
        assert_eq!(render_document(&again), rendered);
    }
}
