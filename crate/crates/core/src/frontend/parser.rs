//! Recursive-descent parser and name resolution.

use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::algebra::{Element, Generator, GeneratorSet, HomogeneousDegree, Rational};
use crate::model::{borel_name, BorelModel, Morphism, SullivanModel};
use crate::toral::{MapRankWitness, RankWitness};

use super::lexer::{tokenize, Pos, Tok, Token};
use super::{MapBlock, MapWitnessBlock, ModelDocument, ParseError, WitnessBlock};

#[derive(Debug, Clone)]
struct Name {
    text: String,
    pos: Pos,
}

#[derive(Debug, Clone)]
struct Factor {
    name: Name,
    exp: u32,
}

#[derive(Debug, Clone)]
struct Term {
    coeff: Rational,
    factors: Vec<Factor>,
}

#[derive(Debug, Clone)]
struct Expr {
    pos: Pos,
    terms: Vec<Term>,
}

#[derive(Debug, Clone)]
struct Diff {
    gen: Name,
    additive: bool,
    expr: Expr,
}

#[derive(Debug, Clone)]
enum Block {
    Model {
        name: Name,
        gens: Vec<(Name, u32)>,
        diffs: Vec<Diff>,
    },
    Witness {
        name: Name,
        model: Name,
        rank: usize,
        diffs: Vec<Diff>,
    },
    Map {
        name: Name,
        source: Name,
        target: Name,
        images: Vec<(Name, Expr)>,
    },
    MapWitness {
        name: Name,
        map: Name,
        source: Name,
        target: Name,
        lift: Name,
    },
}

impl Block {
    fn name(&self) -> &Name {
        match self {
            Block::Model { name, .. }
            | Block::Witness { name, .. }
            | Block::Map { name, .. }
            | Block::MapWitness { name, .. } => name,
        }
    }
}

struct Parser {
    tokens: Vec<Token>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.at]
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.at].clone();
        if self.at + 1 < self.tokens.len() {
            self.at += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::new(self.peek().pos, message))
    }

    fn expect(&mut self, tok: Tok) -> Result<Pos, ParseError> {
        if self.peek().tok == tok {
            Ok(self.next().pos)
        } else {
            self.error(format!("expected {}, found {}", tok.describe(), self.peek().tok.describe()))
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == kw)
    }

    fn keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.is_keyword(kw) {
            self.next();
            Ok(())
        } else {
            self.error(format!("expected '{kw}', found {}", self.peek().tok.describe()))
        }
    }

    fn name(&mut self) -> Result<Name, ParseError> {
        match &self.peek().tok {
            Tok::Ident(s) => {
                let text = s.clone();
                let pos = self.next().pos;
                Ok(Name { text, pos })
            }
            other => self.error(format!("expected a name, found {}", other.describe())),
        }
    }

    fn int(&mut self) -> Result<(BigInt, Pos), ParseError> {
        match &self.peek().tok {
            Tok::Int(n) => {
                let n = n.clone();
                Ok((n, self.next().pos))
            }
            other => self.error(format!("expected an integer, found {}", other.describe())),
        }
    }

    fn small_int(&mut self) -> Result<u32, ParseError> {
        let (n, pos) = self.int()?;
        n.to_u32()
            .ok_or_else(|| ParseError::new(pos, format!("integer {n} is too large")))
    }

    fn skip_semi(&mut self) {
        if self.peek().tok == Tok::Semi {
            self.next();
        }
    }

    fn document(&mut self) -> Result<Vec<Block>, ParseError> {
        let mut blocks = Vec::new();
        while self.peek().tok != Tok::Eof {
            blocks.push(self.block()?);
        }
        Ok(blocks)
    }

    fn block(&mut self) -> Result<Block, ParseError> {
        if self.is_keyword("model") {
            self.model()
        } else if self.is_keyword("witness") {
            self.witness()
        } else if self.is_keyword("map") {
            self.map()
        } else if self.is_keyword("mapwitness") {
            self.map_witness()
        } else {
            self.error(format!(
                "expected 'model', 'witness', 'map' or 'mapwitness', found {}",
                self.peek().tok.describe()
            ))
        }
    }

    fn model(&mut self) -> Result<Block, ParseError> {
        self.keyword("model")?;
        let name = self.name()?;
        self.expect(Tok::LBrace)?;
        let mut gens = Vec::new();
        let mut diffs = Vec::new();
        while self.peek().tok != Tok::RBrace {
            if self.is_keyword("gen") {
                self.next();
                let mut names = vec![self.name()?];
                while self.peek().tok == Tok::Comma {
                    self.next();
                    names.push(self.name()?);
                }
                self.expect(Tok::Colon)?;
                let deg = self.small_int()?;
                gens.extend(names.into_iter().map(|n| (n, deg)));
                self.skip_semi();
            } else if self.is_keyword("d") {
                diffs.push(self.diff()?);
            } else {
                return self.error(format!("expected 'gen', 'd' or '}}', found {}", self.peek().tok.describe()));
            }
        }
        self.expect(Tok::RBrace)?;
        Ok(Block::Model { name, gens, diffs })
    }

    fn diff(&mut self) -> Result<Diff, ParseError> {
        self.keyword("d")?;
        let gen = self.name()?;
        let additive = match self.peek().tok {
            Tok::Eq => false,
            Tok::PlusEq => true,
            _ => return self.error(format!("expected '=' or '+=', found {}", self.peek().tok.describe())),
        };
        self.next();
        let expr = self.expr()?;
        self.skip_semi();
        Ok(Diff { gen, additive, expr })
    }

    fn witness(&mut self) -> Result<Block, ParseError> {
        self.keyword("witness")?;
        let name = self.name()?;
        self.keyword("for")?;
        let model = self.name()?;
        self.keyword("rank")?;
        let rank = self.small_int()? as usize;
        self.expect(Tok::LBrace)?;
        let mut diffs = Vec::new();
        while self.peek().tok != Tok::RBrace {
            diffs.push(self.diff()?);
        }
        self.expect(Tok::RBrace)?;
        Ok(Block::Witness {
            name,
            model,
            rank,
            diffs,
        })
    }

    fn map(&mut self) -> Result<Block, ParseError> {
        self.keyword("map")?;
        let name = self.name()?;
        self.expect(Tok::Colon)?;
        let source = self.name()?;
        self.expect(Tok::Arrow)?;
        let target = self.name()?;
        self.expect(Tok::LBrace)?;
        let mut images = Vec::new();
        while self.peek().tok != Tok::RBrace {
            let g = self.name()?;
            self.expect(Tok::Arrow)?;
            let e = self.expr()?;
            self.expect(Tok::Semi)?;
            images.push((g, e));
        }
        self.expect(Tok::RBrace)?;
        Ok(Block::Map {
            name,
            source,
            target,
            images,
        })
    }

    fn map_witness(&mut self) -> Result<Block, ParseError> {
        self.keyword("mapwitness")?;
        let name = self.name()?;
        self.keyword("for")?;
        let map = self.name()?;
        self.expect(Tok::LBrace)?;
        let mut source = None;
        let mut target = None;
        let mut lift = None;
        while self.peek().tok != Tok::RBrace {
            let slot = if self.is_keyword("source") {
                &mut source
            } else if self.is_keyword("target") {
                &mut target
            } else if self.is_keyword("lift") {
                &mut lift
            } else {
                return self.error(format!(
                    "expected 'source', 'target' or 'lift', found {}",
                    self.peek().tok.describe()
                ));
            };
            let kw_pos = self.next().pos;
            if slot.is_some() {
                return Err(ParseError::new(kw_pos, "entry given twice"));
            }
            *slot = Some(self.name()?);
            self.skip_semi();
        }
        let close = self.expect(Tok::RBrace)?;
        let missing = |what: &str| ParseError::new(close, format!("map witness needs a '{what}' entry"));
        Ok(Block::MapWitness {
            name,
            map,
            source: source.ok_or_else(|| missing("source"))?,
            target: target.ok_or_else(|| missing("target"))?,
            lift: lift.ok_or_else(|| missing("lift"))?,
        })
    }

    fn rational(&mut self) -> Result<Rational, ParseError> {
        let (n, _) = self.int()?;
        if self.peek().tok == Tok::Slash {
            self.next();
            let (d, pos) = self.int()?;
            if d.is_zero() {
                return Err(ParseError::new(pos, "zero denominator"));
            }
            Ok(Rational::new(n, d))
        } else {
            Ok(Rational::from_integer(n))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let pos = self.peek().pos;
        let mut terms = Vec::new();
        let mut negative = match self.peek().tok {
            Tok::Minus => {
                self.next();
                true
            }
            Tok::Plus => {
                self.next();
                false
            }
            _ => false,
        };
        loop {
            let mut t = self.term()?;
            if negative {
                t.coeff = -t.coeff;
            }
            terms.push(t);
            negative = match self.peek().tok {
                Tok::Plus => false,
                Tok::Minus => true,
                _ => break,
            };
            self.next();
        }
        Ok(Expr { pos, terms })
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let mut coeff = Rational::from_integer(1.into());
        let mut factors = Vec::new();
        if matches!(self.peek().tok, Tok::Int(_)) {
            coeff = self.rational()?;
            if self.peek().tok != Tok::Star {
                return Ok(Term { coeff, factors });
            }
            self.next();
        }
        loop {
            let name = self.name()?;
            let exp = if self.peek().tok == Tok::Caret {
                self.next();
                self.small_int()?
            } else {
                1
            };
            factors.push(Factor { name, exp });
            if self.peek().tok != Tok::Star {
                break;
            }
            self.next();
        }
        Ok(Term { coeff, factors })
    }
}

/// Generator lookup for expressions, including the `t` alias in rank-one
/// witnesses.
struct Scope<'a> {
    gens: &'a GeneratorSet,
    alias: HashMap<String, usize>,
}

impl<'a> Scope<'a> {
    fn plain(gens: &'a GeneratorSet) -> Self {
        Scope {
            gens,
            alias: HashMap::new(),
        }
    }

    fn borel(gens: &'a GeneratorSet, base_len: usize, rank: usize) -> Self {
        let mut alias = HashMap::new();
        if rank == 1 && gens.index_of("t").is_none() {
            alias.insert("t".to_string(), base_len);
        }
        Scope { gens, alias }
    }

    fn lookup(&self, name: &Name) -> Result<usize, ParseError> {
        self.gens
            .index_of(&name.text)
            .or_else(|| self.alias.get(&name.text).copied())
            .ok_or_else(|| ParseError::new(name.pos, format!("unknown generator '{}'", name.text)))
    }

    fn element(&self, e: &Expr) -> Result<Element, ParseError> {
        let mut out = Element::zero(self.gens);
        for t in &e.terms {
            let mut term = Element::constant(self.gens, t.coeff.clone());
            for f in &t.factors {
                let i = self.lookup(&f.name)?;
                term = &term * &self.gens.generator(i).pow(f.exp);
            }
            out = &out + &term;
        }
        if out.homogeneous_degree() == HomogeneousDegree::NotHomogeneous {
            return Err(ParseError::new(e.pos, format!("non-homogeneous image {out}")));
        }
        Ok(out)
    }
}

fn witness_generators(model_name: &Name, base: &SullivanModel, rank: usize) -> Result<GeneratorSet, ParseError> {
    for i in 1..=rank {
        let t = borel_name(i);
        if base.gens().index_of(&t).is_some() {
            return Err(ParseError::new(
                model_name.pos,
                format!("model '{}' declares '{t}', which is reserved in rank {rank} witnesses", model_name.text),
            ));
        }
    }
    BorelModel::borel_generators(base.gens(), rank).map_err(|e| ParseError::new(model_name.pos, e.to_string()))
}

fn resolve_model(gens: &[(Name, u32)], diffs: &[Diff]) -> Result<SullivanModel, ParseError> {
    let mut seen = HashSet::new();
    for (n, _) in gens {
        if !seen.insert(n.text.as_str()) {
            return Err(ParseError::new(n.pos, format!("duplicate generator '{}'", n.text)));
        }
    }
    // positioned degree check
    for (n, d) in gens {
        if *d < 2 {
            return Err(ParseError::new(n.pos, format!("generator '{}' must have degree at least 2", n.text)));
        }
    }
    let set = GeneratorSet::new(gens.iter().map(|(n, d)| Generator::new(n.text.clone(), *d)).collect())
        .map_err(|e| {
            let pos = gens.first().map_or_else(Pos::default, |(n, _)| n.pos);
            ParseError::new(pos, e.to_string())
        })?;
    let scope = Scope::plain(&set);
    let mut differential = vec![Element::zero(&set); set.len()];
    let mut defined = HashSet::new();
    for d in diffs {
        if d.additive {
            return Err(ParseError::new(d.gen.pos, "'+=' is only allowed in witness blocks"));
        }
        let i = scope.lookup(&d.gen)?;
        if !defined.insert(i) {
            return Err(ParseError::new(d.gen.pos, format!("differential of '{}' given twice", d.gen.text)));
        }
        differential[i] = scope.element(&d.expr)?;
    }
    Ok(SullivanModel::new(set, differential).expect("elements built over the model generators"))
}

fn resolve_witness(model_name: &Name, base: &SullivanModel, rank: usize, diffs: &[Diff]) -> Result<RankWitness, ParseError> {
    let gens = witness_generators(model_name, base, rank)?;
    let nb = base.gens().len();
    let scope = Scope::borel(&gens, nb, rank);
    let mut perts = vec![Element::zero(&gens); nb];
    let mut defined = HashSet::new();
    for d in diffs {
        let i = scope.lookup(&d.gen)?;
        if i >= nb {
            return Err(ParseError::new(d.gen.pos, format!("'{}' is a Borel generator; its differential is zero", d.gen.text)));
        }
        if !defined.insert(i) {
            return Err(ParseError::new(d.gen.pos, format!("differential of '{}' given twice", d.gen.text)));
        }
        let e = scope.element(&d.expr)?;
        perts[i] = if d.additive {
            e
        } else {
            let base_d = base.d_of(i).embed(&gens).expect("prefix");
            &e - &base_d
        };
    }
    Ok(RankWitness::new(base.clone(), rank, perts).expect("shape built here"))
}

#[derive(Clone, Copy)]
enum End<'a> {
    Model(&'a SullivanModel),
    Witness(&'a RankWitness),
}

pub fn parse_document(text: &str) -> Result<ModelDocument, ParseError> {
    let tokens = tokenize(text)?;
    let blocks = Parser { tokens, at: 0 }.document()?;

    let mut names = HashSet::new();
    for b in &blocks {
        let n = b.name();
        if !names.insert(n.text.clone()) {
            return Err(ParseError::new(n.pos, format!("duplicate block name '{}'", n.text)));
        }
    }

    let mut doc = ModelDocument::default();
    for b in &blocks {
        if let Block::Model { name, gens, diffs } = b {
            doc.models.insert(name.text.clone(), resolve_model(gens, diffs)?);
        }
    }
    for b in &blocks {
        if let Block::Witness { name, model, rank, diffs } = b {
            let base = doc
                .models
                .get(&model.text)
                .ok_or_else(|| ParseError::new(model.pos, format!("unknown model '{}'", model.text)))?;
            let witness = resolve_witness(model, base, *rank, diffs)?;
            doc.witnesses.insert(
                name.text.clone(),
                WitnessBlock {
                    model: model.text.clone(),
                    witness,
                },
            );
        }
    }
    for b in &blocks {
        if let Block::Map {
            name,
            source,
            target,
            images,
        } = b
        {
            let block = resolve_map(&doc, source, target, images)?;
            doc.maps.insert(name.text.clone(), block);
        }
    }
    for b in &blocks {
        if let Block::MapWitness {
            name,
            map,
            source,
            target,
            lift,
        } = b
        {
            let block = resolve_map_witness(&doc, name, map, source, target, lift)?;
            doc.map_witnesses.insert(name.text.clone(), block);
        }
    }
    Ok(doc)
}

fn end<'a>(doc: &'a ModelDocument, n: &Name) -> Result<End<'a>, ParseError> {
    if let Some(m) = doc.models.get(&n.text) {
        Ok(End::Model(m))
    } else if let Some(w) = doc.witnesses.get(&n.text) {
        Ok(End::Witness(&w.witness))
    } else {
        Err(ParseError::new(n.pos, format!("unknown model or witness '{}'", n.text)))
    }
}

fn resolve_map(doc: &ModelDocument, source: &Name, target: &Name, images: &[(Name, Expr)]) -> Result<MapBlock, ParseError> {
    let (src, tgt) = (end(doc, source)?, end(doc, target)?);
    match (src, tgt) {
        (End::Model(s), End::Model(t)) => {
            let src_scope = Scope::plain(s.gens());
            let tgt_scope = Scope::plain(t.gens());
            let mut imgs = vec![Element::zero(t.gens()); s.gens().len()];
            assign_images(&src_scope, &tgt_scope, images, &mut imgs)?;
            let morphism = Morphism::new(s.clone(), t.clone(), imgs).map_err(|e| {
                let pos = images.first().map_or(source.pos, |(n, _)| n.pos);
                ParseError::new(pos, e.to_string())
            })?;
            Ok(MapBlock::Models {
                source: source.text.clone(),
                target: target.text.clone(),
                morphism,
            })
        }
        (End::Witness(s), End::Witness(t)) => {
            let sg = s.gens();
            let tg = t.gens();
            let src_scope = Scope::borel(sg, s.base().gens().len(), s.rank());
            let tgt_scope = Scope::borel(tg, t.base().gens().len(), t.rank());
            let mut imgs = default_lift(s, t);
            assign_images(&src_scope, &tgt_scope, images, &mut imgs)?;
            Ok(MapBlock::Witnesses {
                source: source.text.clone(),
                target: target.text.clone(),
                images: imgs,
            })
        }
        _ => Err(ParseError::new(
            target.pos,
            "a map goes between two models or between two witnesses",
        )),
    }
}

/// `t_i ↦ t_i` where the target has `t_i`, everything else to zero.
pub(super) fn default_lift(s: &RankWitness, t: &RankWitness) -> Vec<Element> {
    let nb = s.base().gens().len();
    (0..s.gens().len())
        .map(|i| {
            if i >= nb && i - nb < t.rank() {
                t.t(i - nb + 1)
            } else {
                Element::zero(t.gens())
            }
        })
        .collect()
}

fn assign_images(
    src: &Scope<'_>,
    tgt: &Scope<'_>,
    images: &[(Name, Expr)],
    out: &mut [Element],
) -> Result<(), ParseError> {
    let mut defined = HashSet::new();
    for (n, e) in images {
        let i = src.lookup(n)?;
        if !defined.insert(i) {
            return Err(ParseError::new(n.pos, format!("image of '{}' given twice", n.text)));
        }
        let img = tgt.element(e)?;
        let expected = src.gens.degree(i);
        let deg = img.homogeneous_degree();
        if !deg.admits(expected) {
            return Err(ParseError::new(
                e.pos,
                format!("image of '{}' must have degree {expected}, found {img}", n.text),
            ));
        }
        out[i] = img;
    }
    Ok(())
}

fn resolve_map_witness(
    doc: &ModelDocument,
    name: &Name,
    map: &Name,
    source: &Name,
    target: &Name,
    lift: &Name,
) -> Result<MapWitnessBlock, ParseError> {
    let f_model = match doc.maps.get(&map.text) {
        Some(MapBlock::Models { morphism, .. }) => morphism.clone(),
        Some(_) => return Err(ParseError::new(map.pos, format!("'{}' must be a map between models", map.text))),
        None => return Err(ParseError::new(map.pos, format!("unknown map '{}'", map.text))),
    };
    let get_witness = |n: &Name| {
        doc.witnesses
            .get(&n.text)
            .map(|w| w.witness.clone())
            .ok_or_else(|| ParseError::new(n.pos, format!("unknown witness '{}'", n.text)))
    };
    let ws = get_witness(source)?;
    let wt = get_witness(target)?;
    let images = match doc.maps.get(&lift.text) {
        Some(MapBlock::Witnesses {
            source: ls,
            target: lt,
            images,
        }) => {
            if *ls != source.text || *lt != target.text {
                return Err(ParseError::new(
                    lift.pos,
                    format!("lift '{}' must go from '{}' to '{}'", lift.text, source.text, target.text),
                ));
            }
            images.clone()
        }
        Some(_) => return Err(ParseError::new(lift.pos, format!("'{}' must be a map between witnesses", lift.text))),
        None => return Err(ParseError::new(lift.pos, format!("unknown map '{}'", lift.text))),
    };
    let witness = MapRankWitness::new(f_model, ws, wt, images).map_err(|e| ParseError::new(name.pos, e.to_string()))?;
    Ok(MapWitnessBlock {
        map: map.text.clone(),
        source: source.text.clone(),
        target: target.text.clone(),
        lift: lift.text.clone(),
        witness,
    })
}
