//! Rank witnesses for spaces and maps: Borel extensions with finite
//! cohomology, constructions that produce them, and a bounded search.

mod construct;
mod report;
mod search;

use std::fmt;

use thiserror::Error;

use crate::algebra::{AlgebraError, Element, GeneratorSet};
use crate::ellipticity::{decide_finite, FinitenessCertificate};
use crate::model::{check_lift, BorelModel, Morphism, SullivanModel, Violation};

pub use construct::{adjoin_sphere_variable, transplant_fiber_witness, RelativeModel, SphereExtension, Transplanted};
pub use report::{trc_map_report, trc_report, TrcReport};
pub use search::{search_map_witness, search_rank_witness, SearchOutcome, SearchSpace};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ToralError {
    #[error("perturbation of {generator} is not in the ideal (t): term {term}")]
    NotInIdeal { generator: String, term: String },
    #[error("{0}")]
    Invalid(Violation),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("not pure over the base at {generator}: {reason}")]
    NotPure { generator: String, reason: String },
    #[error("{generator} has degree {degree}, above the bound {bound}")]
    DegreeBound {
        generator: String,
        degree: u32,
        bound: u32,
    },
    #[error("{0}")]
    Precondition(String),
}

/// A Borel extension of `base` given by the `(t)`-part of its differential.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankWitness {
    base: SullivanModel,
    rank: usize,
    gens: GeneratorSet,
    perturbations: Vec<Element>,
}

impl RankWitness {
    /// `perturbations[i]` is added to `d(v_i)`; elements live over the base
    /// generators followed by `t1..tr`.
    pub fn new(base: SullivanModel, rank: usize, perturbations: Vec<Element>) -> Result<Self, ToralError> {
        let gens = BorelModel::borel_generators(base.gens(), rank)?;
        if perturbations.len() != base.gens().len() {
            return Err(AlgebraError::Arity {
                expected: base.gens().len(),
                found: perturbations.len(),
            }
            .into());
        }
        if perturbations.iter().any(|p| *p.gens() != gens) {
            return Err(AlgebraError::GeneratorSetMismatch.into());
        }
        Ok(RankWitness {
            base,
            rank,
            gens,
            perturbations,
        })
    }

    /// Named perturbations; unlisted generators are unperturbed.
    pub fn from_named<'a>(
        base: SullivanModel,
        rank: usize,
        perturbations: impl IntoIterator<Item = (&'a str, Element)>,
    ) -> Result<Self, ToralError> {
        let gens = BorelModel::borel_generators(base.gens(), rank)?;
        let mut perts = vec![Element::zero(&gens); base.gens().len()];
        for (name, p) in perturbations {
            let i = base
                .gens()
                .index_of(name)
                .ok_or_else(|| AlgebraError::UnknownGenerator(name.to_string()))?;
            perts[i] = p;
        }
        Self::new(base, rank, perts)
    }

    /// The zero-perturbation witness.
    pub fn trivial(base: SullivanModel, rank: usize) -> Result<Self, ToralError> {
        Self::from_named(base, rank, [])
    }

    pub fn from_borel(b: &BorelModel) -> Self {
        RankWitness {
            base: b.base().clone(),
            rank: b.rank(),
            gens: b.total().gens().clone(),
            perturbations: b.perturbations(),
        }
    }

    pub fn base(&self) -> &SullivanModel {
        &self.base
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Base generators followed by `t1..tr`.
    pub fn gens(&self) -> &GeneratorSet {
        &self.gens
    }

    pub fn perturbations(&self) -> &[Element] {
        &self.perturbations
    }

    pub fn perturbation(&self, i: usize) -> &Element {
        &self.perturbations[i]
    }

    /// `t_i` (1-based) as an element of the Borel algebra.
    pub fn t(&self, i: usize) -> Element {
        self.gens.generator(self.base.gens().len() + i - 1)
    }

    pub fn build(&self) -> Result<BorelModel, ToralError> {
        build_borel(&self.base, self.rank, &self.perturbations)
    }
}

/// Assembles `D t_i = 0`, `D v = d v + perturbation(v)` and validates it.
///
/// Perturbations with a term outside `(t_1, …, t_r)` are rejected before the
/// differential is checked.
pub fn build_borel(base: &SullivanModel, rank: usize, perturbations: &[Element]) -> Result<BorelModel, ToralError> {
    let n = base.gens().len();
    for (i, p) in perturbations.iter().enumerate() {
        if let Some((m, _)) = p.terms().find(|(m, _)| !m.support().any(|j| j >= n)) {
            return Err(ToralError::NotInIdeal {
                generator: base.gens().name(i).to_string(),
                term: m.display(p.gens()).to_string(),
            });
        }
    }
    let total = BorelModel::assemble(base, rank, perturbations)?;
    total.check_differential().map_err(ToralError::Invalid)?;
    BorelModel::from_total(base.clone(), rank, total).map_err(ToralError::Invalid)
}

/// Why a witness was not certified.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rejection {
    Build(ToralError),
    NotFinite(Box<FinitenessCertificate>),
    RankMismatch { source: usize, target: usize },
    Source(Box<Rejection>),
    Target(Box<Rejection>),
    Lift(Violation),
}

impl Rejection {
    /// The generator the rejection points at, if any.
    pub fn generator(&self) -> Option<&str> {
        match self {
            Rejection::Build(ToralError::NotInIdeal { generator, .. })
            | Rejection::Build(ToralError::NotPure { generator, .. })
            | Rejection::Build(ToralError::DegreeBound { generator, .. }) => Some(generator),
            Rejection::Build(ToralError::Invalid(v)) | Rejection::Lift(v) => v.generator(),
            Rejection::Source(r) | Rejection::Target(r) => r.generator(),
            _ => None,
        }
    }
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rejection::Build(e) => write!(f, "{e}"),
            Rejection::NotFinite(c) => write!(f, "cohomology is not known to be finite ({})", c.verdict.as_str()),
            Rejection::RankMismatch { source, target } => {
                write!(f, "ranks differ: source {source}, target {target}")
            }
            Rejection::Source(r) => write!(f, "source witness: {r}"),
            Rejection::Target(r) => write!(f, "target witness: {r}"),
            Rejection::Lift(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verification<C> {
    Certified(C),
    Rejected(Rejection),
}

impl<C> Verification<C> {
    pub fn is_certified(&self) -> bool {
        matches!(self, Verification::Certified(_))
    }

    pub fn certificate(&self) -> Option<&C> {
        match self {
            Verification::Certified(c) => Some(c),
            Verification::Rejected(_) => None,
        }
    }

    pub fn rejection(&self) -> Option<&Rejection> {
        match self {
            Verification::Certified(_) => None,
            Verification::Rejected(r) => Some(r),
        }
    }
}

/// A validated Borel model with finite cohomology.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankCertificate {
    pub borel: BorelModel,
    pub finiteness: FinitenessCertificate,
}

/// Certifies `r_0 ≥ rank` for the base model.
pub fn verify_rank_witness(w: &RankWitness) -> Verification<RankCertificate> {
    let borel = match w.build() {
        Ok(b) => b,
        Err(e) => return Verification::Rejected(Rejection::Build(e)),
    };
    certify_borel(borel)
}

pub(crate) fn certify_borel(borel: BorelModel) -> Verification<RankCertificate> {
    let finiteness = decide_finite(borel.total());
    if finiteness.is_finite() {
        Verification::Certified(RankCertificate { borel, finiteness })
    } else {
        Verification::Rejected(Rejection::NotFinite(Box::new(finiteness)))
    }
}

/// Witnesses on both ends of `f_model` and a map `F` between their Borel
/// models. `f_model` goes from the model of the target space to the model of
/// the source space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapRankWitness {
    f_model: Morphism,
    source: RankWitness,
    target: RankWitness,
    lift: Vec<Element>,
}

impl MapRankWitness {
    /// `lift[i]` is the image of the `i`-th generator of the source Borel
    /// algebra (base generators, then `t1..tr`) in the target Borel algebra.
    pub fn new(
        f_model: Morphism,
        source: RankWitness,
        target: RankWitness,
        lift: Vec<Element>,
    ) -> Result<Self, ToralError> {
        if f_model.source() != source.base() || f_model.target() != target.base() {
            return Err(ToralError::Precondition(
                "witness bases do not match the ends of the map".into(),
            ));
        }
        if lift.len() != source.gens().len() {
            return Err(AlgebraError::Arity {
                expected: source.gens().len(),
                found: lift.len(),
            }
            .into());
        }
        if lift.iter().any(|e| e.gens() != target.gens()) {
            return Err(AlgebraError::GeneratorSetMismatch.into());
        }
        Ok(MapRankWitness {
            f_model,
            source,
            target,
            lift,
        })
    }

    /// Named images of base generators; unlisted ones go to zero and each
    /// `t_i` to the target's `t_i` when the ranks agree.
    pub fn from_named<'a>(
        f_model: Morphism,
        source: RankWitness,
        target: RankWitness,
        images: impl IntoIterator<Item = (&'a str, Element)>,
    ) -> Result<Self, ToralError> {
        let sg = source.gens().clone();
        let nb = source.base().gens().len();
        let mut lift: Vec<Element> = (0..sg.len())
            .map(|i| {
                if i >= nb && i - nb < target.rank() {
                    target.t(i - nb + 1)
                } else {
                    Element::zero(target.gens())
                }
            })
            .collect();
        for (name, e) in images {
            let i = sg
                .index_of(name)
                .ok_or_else(|| AlgebraError::UnknownGenerator(name.to_string()))?;
            lift[i] = e;
        }
        Self::new(f_model, source, target, lift)
    }

    pub fn f_model(&self) -> &Morphism {
        &self.f_model
    }

    pub fn source(&self) -> &RankWitness {
        &self.source
    }

    pub fn target(&self) -> &RankWitness {
        &self.target
    }

    pub fn lift_images(&self) -> &[Element] {
        &self.lift
    }

    pub fn rank(&self) -> usize {
        self.source.rank()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapCertificate {
    pub source: RankCertificate,
    pub target: RankCertificate,
    pub lift: Morphism,
}

/// Certifies `r_0(f) ≥ rank`.
pub fn verify_map_rank_witness(w: &MapRankWitness) -> Verification<MapCertificate> {
    if w.source.rank() != w.target.rank() {
        return Verification::Rejected(Rejection::RankMismatch {
            source: w.source.rank(),
            target: w.target.rank(),
        });
    }
    let source = match verify_rank_witness(&w.source) {
        Verification::Certified(c) => c,
        Verification::Rejected(r) => return Verification::Rejected(Rejection::Source(Box::new(r))),
    };
    let target = match verify_rank_witness(&w.target) {
        Verification::Certified(c) => c,
        Verification::Rejected(r) => return Verification::Rejected(Rejection::Target(Box::new(r))),
    };
    match certify_lift(&w.f_model, &source.borel, &target.borel, w.lift.clone()) {
        Ok(lift) => Verification::Certified(MapCertificate { source, target, lift }),
        Err(r) => Verification::Rejected(r),
    }
}

pub(crate) fn certify_lift(
    f_model: &Morphism,
    source: &BorelModel,
    target: &BorelModel,
    images: Vec<Element>,
) -> Result<Morphism, Rejection> {
    let lift = Morphism::new(source.total().clone(), target.total().clone(), images)
        .map_err(|e| Rejection::Build(e.into()))?;
    check_lift(&lift, f_model).map_err(Rejection::Lift)?;
    lift.check_chain_map().map_err(Rejection::Lift)?;
    Ok(lift)
}
