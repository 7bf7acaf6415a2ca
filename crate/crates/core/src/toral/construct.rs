//! Witnesses built from other witnesses.

use crate::algebra::{Element, GeneratorSet};
use crate::ellipticity::{decide_finite, FinitenessCertificate};
use crate::model::{BorelModel, SullivanModel, Violation};

use super::{verify_rank_witness, RankCertificate, RankWitness, ToralError, Verification};

/// A relative model `ΛW → ΛW ⊗ ΛV`: the total generators start with the base
/// generators and the base differential is unchanged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelativeModel {
    base: SullivanModel,
    total: SullivanModel,
}

impl RelativeModel {
    pub fn new(base: SullivanModel, total: SullivanModel) -> Result<Self, ToralError> {
        let bg = base.gens();
        if !bg.is_prefix_of(total.gens()) {
            return Err(ToralError::Precondition(
                "base generators must come first in the total model".into(),
            ));
        }
        for i in 0..bg.len() {
            let d = base.d_of(i).embed(total.gens())?;
            if *total.d_of(i) != d {
                return Err(ToralError::Invalid(Violation::NotAnExtension {
                    generator: bg.name(i).to_string(),
                    expected: d,
                    found: total.d_of(i).clone(),
                }));
            }
        }
        Ok(RelativeModel { base, total })
    }

    pub fn base(&self) -> &SullivanModel {
        &self.base
    }

    pub fn total(&self) -> &SullivanModel {
        &self.total
    }

    fn fiber_gens(&self) -> Result<GeneratorSet, ToralError> {
        let nb = self.base.gens().len();
        Ok(GeneratorSet::new(self.total.gens().generators()[nb..].to_vec())?)
    }

    /// The fiber `(ΛV, d̄)`: base generators set to zero.
    pub fn fiber(&self) -> Result<SullivanModel, ToralError> {
        let fg = self.fiber_gens()?;
        let nb = self.base.gens().len();
        let images: Vec<Element> = (0..self.total.gens().len())
            .map(|i| {
                if i < nb {
                    Element::zero(&fg)
                } else {
                    fg.generator(i - nb)
                }
            })
            .collect();
        let differential = (nb..self.total.gens().len())
            .map(|i| self.total.d_of(i).substitute(&fg, &images))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SullivanModel::new(fg, differential)?)
    }

    /// Odd fiber generators must land in `ΛW ⊗ ΛV^even`, even ones must be
    /// cycles.
    pub fn check_pure_over_base(&self) -> Result<(), ToralError> {
        let g = self.total.gens();
        let nb = self.base.gens().len();
        for i in nb..g.len() {
            let dv = self.total.d_of(i);
            if !g.is_odd(i) {
                if !dv.is_zero() {
                    return Err(ToralError::NotPure {
                        generator: g.name(i).to_string(),
                        reason: format!("even generator with differential {dv}"),
                    });
                }
                continue;
            }
            let mixed = dv
                .terms()
                .find(|(m, _)| m.odd_part().any(|j| j >= nb));
            if let Some((m, _)) = mixed {
                return Err(ToralError::NotPure {
                    generator: g.name(i).to_string(),
                    reason: format!("term {} involves an odd fiber generator", m.display(g)),
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transplanted {
    pub witness: RankWitness,
    pub verification: Verification<RankCertificate>,
}

/// Moves a fiber witness to the total model: `D_t(v) = D v + (d_t − d)(v)`
/// on fiber generators, the base differential elsewhere. Finiteness of the
/// result is decided directly.
pub fn transplant_fiber_witness(
    relative: &RelativeModel,
    fiber_witness: &RankWitness,
) -> Result<Transplanted, ToralError> {
    relative.check_pure_over_base()?;
    let fiber = relative.fiber()?;
    if *fiber_witness.base() != fiber {
        return Err(ToralError::Precondition(
            "fiber witness is not over the fiber of the relative model".into(),
        ));
    }
    let rank = fiber_witness.rank();
    let total = relative.total();
    let gens = BorelModel::borel_generators(total.gens(), rank)?;
    let nb = relative.base().gens().len();
    let nf = fiber.gens().len();
    // fiber Borel algebra → total Borel algebra
    let images: Vec<Element> = (0..nf + rank)
        .map(|j| {
            if j < nf {
                gens.generator(nb + j)
            } else {
                gens.generator(nb + nf + (j - nf))
            }
        })
        .collect();
    let mut perturbations = vec![Element::zero(&gens); total.gens().len()];
    for (j, p) in fiber_witness.perturbations().iter().enumerate() {
        perturbations[nb + j] = p.substitute(&gens, &images)?;
    }
    let witness = RankWitness::new(total.clone(), rank, perturbations)?;
    let verification = verify_rank_witness(&witness);
    Ok(Transplanted {
        witness,
        verification,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SphereExtension {
    pub borel: BorelModel,
    pub finiteness: FinitenessCertificate,
}

/// Adds a Borel generator `t_{r+1}` with `D'(y) = D(y) + t_{r+1}^n`.
///
/// `y` must be an odd base generator of degree `2n − 1` and every other base
/// generator must have degree at most `2n`.
pub fn adjoin_sphere_variable(b: &BorelModel, y: &str, n: u32) -> Result<SphereExtension, ToralError> {
    let bg = b.base().gens();
    let iy = bg
        .index_of(y)
        .ok_or_else(|| ToralError::Precondition(format!("{y} is not a base generator")))?;
    if n == 0 || bg.degree(iy) != 2 * n - 1 {
        return Err(ToralError::Precondition(format!(
            "{y} has degree {}, expected {}",
            bg.degree(iy),
            (2 * n).saturating_sub(1)
        )));
    }
    if let Some(g) = bg.iter().find(|g| g.degree() > 2 * n) {
        return Err(ToralError::DegreeBound {
            generator: g.name().to_string(),
            degree: g.degree(),
            bound: 2 * n,
        });
    }
    let rank = b.rank() + 1;
    let gens = BorelModel::borel_generators(bg, rank)?;
    let mut perturbations = b
        .perturbations()
        .iter()
        .map(|p| p.embed(&gens))
        .collect::<Result<Vec<_>, _>>()?;
    let t_new = gens.generator(bg.len() + rank - 1);
    perturbations[iy] = &perturbations[iy] + &t_new.pow(n);
    let borel = super::build_borel(b.base(), rank, &perturbations)?;
    let finiteness = decide_finite(borel.total());
    Ok(SphereExtension { borel, finiteness })
}
