//! Sullivan models, morphisms between them, and Borel extensions.

use std::fmt;

use crate::algebra::{AlgebraError, Element, Generator, GeneratorSet};

/// A reason a model, morphism or extension fails one of the checks.
///
/// Checks report the first offending generator in declaration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// A term of `D(generator)` does not have degree `|generator| + 1`.
    DegreeMismatch {
        generator: String,
        expected: u32,
        term: String,
        found: u32,
    },
    /// `D(D(generator))` is not zero.
    NonzeroSquare { generator: String, residue: Element },
    /// `φ(D v) - D(φ v)` is not zero.
    NotChainMap { generator: String, difference: Element },
    /// Setting every `t_i` to zero in `F(v)` does not give the base map's image.
    LiftMismatch {
        generator: String,
        expected: Element,
        found: Element,
    },
    /// A Borel generator is not sent to itself, or has a nonzero differential.
    BorelNotFixed { generator: String, image: Element },
    /// The Borel differential does not reduce to the base differential.
    NotAnExtension {
        generator: String,
        expected: Element,
        found: Element,
    },
    /// Objects whose shapes do not fit together.
    Incompatible(String),
}

impl Violation {
    pub fn generator(&self) -> Option<&str> {
        match self {
            Violation::DegreeMismatch { generator, .. }
            | Violation::NonzeroSquare { generator, .. }
            | Violation::NotChainMap { generator, .. }
            | Violation::LiftMismatch { generator, .. }
            | Violation::BorelNotFixed { generator, .. }
            | Violation::NotAnExtension { generator, .. } => Some(generator),
            Violation::Incompatible(_) => None,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DegreeMismatch {
                generator,
                expected,
                term,
                found,
            } => write!(
                f,
                "degree mismatch at {generator}: term {term} has degree {found}, expected {expected}"
            ),
            Violation::NonzeroSquare { generator, residue } => {
                write!(f, "D(D({generator})) = {residue} is not zero")
            }
            Violation::NotChainMap {
                generator,
                difference,
            } => write!(
                f,
                "not a chain map at {generator}: F(D {generator}) - D(F {generator}) = {difference}"
            ),
            Violation::LiftMismatch {
                generator,
                expected,
                found,
            } => write!(
                f,
                "lift mismatch at {generator}: F({generator}) restricts to {found}, base map gives {expected}"
            ),
            Violation::BorelNotFixed { generator, image } => {
                write!(f, "Borel generator {generator} is sent to {image}")
            }
            Violation::NotAnExtension {
                generator,
                expected,
                found,
            } => write!(
                f,
                "D({generator}) reduces to {found} modulo (t), base differential is {expected}"
            ),
            Violation::Incompatible(reason) => write!(f, "{reason}"),
        }
    }
}

/// A free graded-commutative algebra with a differential given on generators.
///
/// Construction only checks that the images live in the algebra; degree and
/// `D∘D = 0` are checked by [`SullivanModel::check_differential`] so that
/// malformed models can be represented and diagnosed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SullivanModel {
    gens: GeneratorSet,
    differential: Vec<Element>,
}

impl SullivanModel {
    pub fn new(gens: GeneratorSet, differential: Vec<Element>) -> Result<Self, AlgebraError> {
        if differential.len() != gens.len() {
            return Err(AlgebraError::Arity {
                expected: gens.len(),
                found: differential.len(),
            });
        }
        if differential.iter().any(|e| *e.gens() != gens) {
            return Err(AlgebraError::GeneratorSetMismatch);
        }
        Ok(SullivanModel { gens, differential })
    }

    /// The model with zero differential.
    pub fn free(gens: GeneratorSet) -> Self {
        let differential = (0..gens.len()).map(|_| Element::zero(&gens)).collect();
        SullivanModel { gens, differential }
    }

    /// Builds a model from named images; unnamed generators get `d = 0`.
    pub fn from_named<'a>(
        gens: GeneratorSet,
        images: impl IntoIterator<Item = (&'a str, Element)>,
    ) -> Result<Self, AlgebraError> {
        let mut differential: Vec<Element> = (0..gens.len()).map(|_| Element::zero(&gens)).collect();
        for (name, e) in images {
            let i = gens
                .index_of(name)
                .ok_or_else(|| AlgebraError::UnknownGenerator(name.to_string()))?;
            differential[i] = e;
        }
        Self::new(gens, differential)
    }

    pub fn gens(&self) -> &GeneratorSet {
        &self.gens
    }

    pub fn differential(&self) -> &[Element] {
        &self.differential
    }

    pub fn d_of(&self, i: usize) -> &Element {
        &self.differential[i]
    }

    /// Leibniz extension of the differential.
    pub fn apply_d(&self, a: &Element) -> Result<Element, AlgebraError> {
        if *a.gens() != self.gens {
            return Err(AlgebraError::GeneratorSetMismatch);
        }
        Ok(a.derive(&self.differential))
    }

    /// Checks that each generator image has degree `|v| + 1` and that
    /// `D(D(v)) = 0` for every generator.
    pub fn check_differential(&self) -> Result<(), Violation> {
        for (i, dv) in self.differential.iter().enumerate() {
            let expected = self.gens.degree(i) + 1;
            for (m, _) in dv.terms() {
                let found = self.gens.monomial_degree(m);
                if found != expected {
                    return Err(Violation::DegreeMismatch {
                        generator: self.gens.name(i).to_string(),
                        expected,
                        term: m.display(&self.gens).to_string(),
                        found,
                    });
                }
            }
        }
        for (i, dv) in self.differential.iter().enumerate() {
            let residue = dv.derive(&self.differential);
            if !residue.is_zero() {
                return Err(Violation::NonzeroSquare {
                    generator: self.gens.name(i).to_string(),
                    residue,
                });
            }
        }
        Ok(())
    }

    /// The associated pure differential: even generators go to zero, odd
    /// generators keep only the terms of `d(v)` free of odd generators.
    pub fn pure_part(&self) -> SullivanModel {
        let differential = self
            .differential
            .iter()
            .enumerate()
            .map(|(i, dv)| {
                if self.gens.is_odd(i) {
                    dv.filter_terms(|m| !m.has_odd())
                } else {
                    Element::zero(&self.gens)
                }
            })
            .collect();
        SullivanModel {
            gens: self.gens.clone(),
            differential,
        }
    }

    /// Whether the differential is decomposable (no image has a term that is a
    /// single generator). Advisory only; Borel models are usually not minimal.
    pub fn is_minimal(&self) -> bool {
        self.differential.iter().all(|dv| {
            dv.terms().all(|(m, _)| {
                let linear = m.odd_len() + m.even_part().map(|(_, e)| e as usize).sum::<usize>();
                linear >= 2
            })
        })
    }

    /// Tensor product: generators of `self` followed by those of `other`.
    pub fn tensor(&self, other: &SullivanModel) -> Result<SullivanModel, AlgebraError> {
        let gens = self.gens.extended(other.gens.iter().cloned())?;
        let offset = self.gens.len();
        let right_images: Vec<Element> = (0..other.gens.len())
            .map(|i| gens.generator(offset + i))
            .collect();
        let mut differential = Vec::with_capacity(gens.len());
        for dv in &self.differential {
            differential.push(dv.embed(&gens)?);
        }
        for dv in &other.differential {
            differential.push(dv.substitute(&gens, &right_images)?);
        }
        SullivanModel::new(gens, differential)
    }
}

/// Free-function forms of the model operations.
pub fn apply_d(m: &SullivanModel, a: &Element) -> Result<Element, AlgebraError> {
    m.apply_d(a)
}

pub fn check_differential(m: &SullivanModel) -> Result<(), Violation> {
    m.check_differential()
}

pub fn pure_part(m: &SullivanModel) -> SullivanModel {
    m.pure_part()
}

/// A degree-preserving algebra map given on generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Morphism {
    source: SullivanModel,
    target: SullivanModel,
    images: Vec<Element>,
}

impl Morphism {
    pub fn new(
        source: SullivanModel,
        target: SullivanModel,
        images: Vec<Element>,
    ) -> Result<Self, AlgebraError> {
        let sg = source.gens();
        if images.len() != sg.len() {
            return Err(AlgebraError::Arity {
                expected: sg.len(),
                found: images.len(),
            });
        }
        for (i, img) in images.iter().enumerate() {
            if img.gens() != target.gens() {
                return Err(AlgebraError::GeneratorSetMismatch);
            }
            let deg = img.homogeneous_degree();
            if !deg.admits(sg.degree(i)) {
                return Err(AlgebraError::ImageDegree {
                    generator: sg.name(i).to_string(),
                    expected: sg.degree(i),
                    found: deg,
                });
            }
        }
        Ok(Morphism {
            source,
            target,
            images,
        })
    }

    /// Builds a morphism from named images; unnamed generators map to zero.
    pub fn from_named<'a>(
        source: SullivanModel,
        target: SullivanModel,
        images: impl IntoIterator<Item = (&'a str, Element)>,
    ) -> Result<Self, AlgebraError> {
        let mut imgs: Vec<Element> = (0..source.gens().len())
            .map(|_| Element::zero(target.gens()))
            .collect();
        for (name, e) in images {
            let i = source
                .gens()
                .index_of(name)
                .ok_or_else(|| AlgebraError::UnknownGenerator(name.to_string()))?;
            imgs[i] = e;
        }
        Self::new(source, target, imgs)
    }

    pub fn identity(m: &SullivanModel) -> Self {
        let images = (0..m.gens().len()).map(|i| m.gens().generator(i)).collect();
        Morphism {
            source: m.clone(),
            target: m.clone(),
            images,
        }
    }

    pub fn source(&self) -> &SullivanModel {
        &self.source
    }

    pub fn target(&self) -> &SullivanModel {
        &self.target
    }

    pub fn images(&self) -> &[Element] {
        &self.images
    }

    pub fn image(&self, i: usize) -> &Element {
        &self.images[i]
    }

    pub fn apply(&self, a: &Element) -> Result<Element, AlgebraError> {
        if a.gens() != self.source.gens() {
            return Err(AlgebraError::GeneratorSetMismatch);
        }
        a.substitute(self.target.gens(), &self.images)
    }

    /// `then ∘ self`.
    pub fn compose(&self, then: &Morphism) -> Result<Morphism, AlgebraError> {
        if self.target.gens() != then.source.gens() {
            return Err(AlgebraError::GeneratorSetMismatch);
        }
        let images = self
            .images
            .iter()
            .map(|e| then.apply(e))
            .collect::<Result<Vec<_>, _>>()?;
        Morphism::new(self.source.clone(), then.target.clone(), images)
    }

    /// Checks `φ(D_source v) = D_target(φ v)` for every source generator.
    pub fn check_chain_map(&self) -> Result<(), Violation> {
        for i in 0..self.source.gens().len() {
            if let Some(difference) = self.chain_defect(i) {
                return Err(Violation::NotChainMap {
                    generator: self.source.gens().name(i).to_string(),
                    difference,
                });
            }
        }
        Ok(())
    }

    /// `φ(D v_i) - D(φ v_i)` when nonzero.
    pub(crate) fn chain_defect(&self, i: usize) -> Option<Element> {
        let lhs = self
            .source
            .d_of(i)
            .substitute(self.target.gens(), &self.images)
            .expect("validated morphism");
        let rhs = self.images[i].derive(self.target.differential());
        let diff = &lhs - &rhs;
        (!diff.is_zero()).then_some(diff)
    }
}

pub fn check_chain_map(phi: &Morphism) -> Result<(), Violation> {
    phi.check_chain_map()
}

/// `Q[t_1..t_r] ⊗ ΛV` with a differential that kills every `t_i` and
/// reduces to the base differential modulo `(t_1, …, t_r)`.
///
/// The generators of the total model are the base generators followed by
/// `t1..tr`, so base elements embed without reindexing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BorelModel {
    base: SullivanModel,
    rank: usize,
    total: SullivanModel,
}

/// Canonical name of the `i`-th (1-based) Borel generator.
pub fn borel_name(i: usize) -> String {
    format!("t{i}")
}

impl BorelModel {
    /// The generator set `base ++ t1..tr`.
    pub fn borel_generators(base: &GeneratorSet, rank: usize) -> Result<GeneratorSet, AlgebraError> {
        base.extended((1..=rank).map(|i| Generator::borel(borel_name(i))))
    }

    /// Wraps a total model, validating the Borel shape: generator layout,
    /// `D t_i = 0`, and reduction to the base differential modulo `(t)`.
    pub fn from_total(
        base: SullivanModel,
        rank: usize,
        total: SullivanModel,
    ) -> Result<Self, Violation> {
        let tg = total.gens().clone();
        let bg = base.gens().clone();
        let shape_ok = bg.is_prefix_of(&tg)
            && tg.len() == bg.len() + rank
            && (bg.len()..tg.len()).all(|i| tg.get(i).is_borel())
            && bg.iter().all(|g| !g.is_borel());
        if !shape_ok {
            return Err(Violation::Incompatible(format!(
                "total generators {:?} are not base generators {:?} followed by {} Borel generators",
                tg, bg, rank
            )));
        }
        for i in bg.len()..tg.len() {
            if !total.d_of(i).is_zero() {
                return Err(Violation::BorelNotFixed {
                    generator: tg.name(i).to_string(),
                    image: total.d_of(i).clone(),
                });
            }
        }
        let b = BorelModel { base, rank, total };
        let restricted = b.restrict_fiber();
        for i in 0..bg.len() {
            if restricted.d_of(i) != b.base.d_of(i) {
                return Err(Violation::NotAnExtension {
                    generator: bg.name(i).to_string(),
                    expected: b.base.d_of(i).clone(),
                    found: restricted.d_of(i).clone(),
                });
            }
        }
        Ok(b)
    }

    /// The extension with `D(t_i) = 0` and `D(v) = d(v) + perturbations[v]`.
    /// Does not check the perturbations; see [`crate::toral::build_borel`].
    pub(crate) fn assemble(
        base: &SullivanModel,
        rank: usize,
        perturbations: &[Element],
    ) -> Result<SullivanModel, AlgebraError> {
        let gens = Self::borel_generators(base.gens(), rank)?;
        let mut differential = Vec::with_capacity(gens.len());
        for (i, dv) in base.differential().iter().enumerate() {
            let p = perturbations
                .get(i)
                .cloned()
                .unwrap_or_else(|| Element::zero(&gens));
            differential.push(dv.embed(&gens)?.try_add(&p)?);
        }
        for _ in 0..rank {
            differential.push(Element::zero(&gens));
        }
        SullivanModel::new(gens, differential)
    }

    pub fn base(&self) -> &SullivanModel {
        &self.base
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn total(&self) -> &SullivanModel {
        &self.total
    }

    /// The `i`-th Borel generator (0-based) as an element of the total algebra.
    pub fn t(&self, i: usize) -> Element {
        self.total.gens().generator(self.base.gens().len() + i)
    }

    /// `D(v) - d(v)` for the base generator `i`.
    pub fn perturbation(&self, i: usize) -> Element {
        let d = self
            .base
            .d_of(i)
            .embed(self.total.gens())
            .expect("prefix layout");
        self.total.d_of(i) - &d
    }

    pub fn perturbations(&self) -> Vec<Element> {
        (0..self.base.gens().len()).map(|i| self.perturbation(i)).collect()
    }

    /// Sets every `t_i` to zero in every generator image.
    pub fn restrict_fiber(&self) -> SullivanModel {
        let bg = self.base.gens();
        let differential = (0..bg.len())
            .map(|i| self.total.d_of(i).truncate(bg).expect("prefix layout"))
            .collect();
        SullivanModel {
            gens: bg.clone(),
            differential,
        }
    }
}

pub fn restrict_fiber(b: &BorelModel) -> SullivanModel {
    b.restrict_fiber()
}

/// Checks that `lift` (between Borel total models) fixes every `t_i` and
/// reduces to `base` once all `t_i` are set to zero.
pub fn check_lift(lift: &Morphism, base: &Morphism) -> Result<(), Violation> {
    let ls = lift.source().gens();
    let lt = lift.target().gens();
    let bs = base.source().gens();
    let bt = base.target().gens();
    if !bs.is_prefix_of(ls) || !bt.is_prefix_of(lt) {
        return Err(Violation::Incompatible(
            "lift and base map have unrelated generator sets".into(),
        ));
    }
    let src_borel: Vec<usize> = (bs.len()..ls.len()).collect();
    let tgt_borel: Vec<usize> = (bt.len()..lt.len()).collect();
    if src_borel.len() != tgt_borel.len()
        || src_borel.iter().any(|&i| !ls.get(i).is_borel())
        || tgt_borel.iter().any(|&i| !lt.get(i).is_borel())
    {
        return Err(Violation::Incompatible(
            "lift must go between Borel extensions of equal rank".into(),
        ));
    }
    for (&i, &j) in src_borel.iter().zip(&tgt_borel) {
        let expected = lt.generator(j);
        if *lift.image(i) != expected {
            return Err(Violation::BorelNotFixed {
                generator: ls.name(i).to_string(),
                image: lift.image(i).clone(),
            });
        }
    }
    for i in 0..bs.len() {
        let found = lift.image(i).truncate(bt).expect("prefix checked");
        if found != *base.image(i) {
            return Err(Violation::LiftMismatch {
                generator: bs.name(i).to_string(),
                expected: base.image(i).clone(),
                found,
            });
        }
    }
    Ok(())
}
