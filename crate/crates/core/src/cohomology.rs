//! Degreewise cohomology of Sullivan models and induced maps.

use std::collections::HashMap;

use num_traits::Zero;
use rayon::prelude::*;
use thiserror::Error;

use crate::algebra::{monomial_basis, Element, GeneratorSet, Monomial, Rational};
use crate::linalg::{kernel_basis, rank, DenseMatrix, Echelon, SparseVec};
use crate::model::{Morphism, SullivanModel, Violation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CohomologyError {
    #[error("morphism is not a chain map: {0}")]
    NotChainMap(Violation),
}

/// Dimensions of `H^k` for `k = 0..=max_degree`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BettiTable {
    pub dims: Vec<(u32, usize)>,
    pub max_degree: u32,
}

impl BettiTable {
    pub fn total(&self) -> usize {
        self.dims.iter().map(|&(_, d)| d).sum()
    }

    pub fn get(&self, k: u32) -> usize {
        self.dims
            .iter()
            .find(|&&(d, _)| d == k)
            .map_or(0, |&(_, n)| n)
    }

    /// Degrees with nonzero cohomology.
    pub fn support(&self) -> Vec<(u32, usize)> {
        self.dims.iter().copied().filter(|&(_, n)| n > 0).collect()
    }

    pub fn top_degree(&self) -> Option<u32> {
        self.support().last().map(|&(k, _)| k)
    }
}

/// Monomial basis of one degree with a reverse index.
struct DegreeBasis {
    monomials: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
}

impl DegreeBasis {
    fn new(gens: &GeneratorSet, k: u32) -> Self {
        let monomials = monomial_basis(gens, k);
        let index = monomials
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        DegreeBasis { monomials, index }
    }

    fn len(&self) -> usize {
        self.monomials.len()
    }

    fn vector(&self, e: &Element) -> SparseVec<Rational> {
        e.terms()
            .map(|(m, c)| (self.index[m], c.clone()))
            .collect()
    }

    fn element(&self, gens: &GeneratorSet, v: &SparseVec<Rational>) -> Element {
        Element::from_terms(
            gens,
            v.iter().map(|(&i, c)| (self.monomials[i].clone(), c.clone())),
        )
    }
}

/// Columns of `D: A^k → A^{k+1}` in monomial coordinates.
fn differential_columns(
    m: &SullivanModel,
    source: &DegreeBasis,
    target: &DegreeBasis,
) -> Vec<SparseVec<Rational>> {
    let gens = m.gens();
    source
        .monomials
        .iter()
        .map(|mono| {
            let e = Element::from_monomial(gens, mono.clone(), Rational::from_integer(1.into()));
            let de = m.apply_d(&e).expect("same generators");
            target.vector(&de)
        })
        .collect()
}

/// Rank of `D: A^k → A^{k+1}`.
pub fn differential_rank(m: &SullivanModel, k: u32) -> usize {
    let src = DegreeBasis::new(m.gens(), k);
    if src.len() == 0 {
        return 0;
    }
    let tgt = DegreeBasis::new(m.gens(), k + 1);
    rank(&differential_columns(m, &src, &tgt))
}

/// `dim A^k`.
pub fn chain_dimension(m: &SullivanModel, k: u32) -> usize {
    monomial_basis(m.gens(), k).len()
}

/// `dim H^k` by exact ranks of the differential.
pub fn betti(m: &SullivanModel, k: u32) -> usize {
    let incoming = if k == 0 { 0 } else { differential_rank(m, k - 1) };
    chain_dimension(m, k) - differential_rank(m, k) - incoming
}

/// Betti numbers in degrees `0..=cutoff`; degrees are processed in parallel.
pub fn total_cohomology(m: &SullivanModel, cutoff: u32) -> BettiTable {
    let ranks: Vec<usize> = (0..=cutoff)
        .into_par_iter()
        .map(|k| differential_rank(m, k))
        .collect();
    let dims = (0..=cutoff)
        .into_par_iter()
        .map(|k| {
            let incoming = if k == 0 { 0 } else { ranks[k as usize - 1] };
            (k, chain_dimension(m, k) - ranks[k as usize] - incoming)
        })
        .collect();
    BettiTable {
        dims,
        max_degree: cutoff,
    }
}

/// Cocycle representatives whose classes form a basis of `H^k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CohomologyBasis {
    pub degree: u32,
    pub representatives: Vec<Element>,
}

/// Everything needed to express cocycles of one degree in a cohomology basis.
struct DegreeCohomology {
    basis: DegreeBasis,
    representatives: Vec<SparseVec<Rational>>,
    /// Echelon form of boundaries followed by representatives; tags record
    /// coefficients on representatives only.
    echelon: Echelon,
}

impl DegreeCohomology {
    fn compute(m: &SullivanModel, k: u32) -> Self {
        let gens = m.gens();
        let basis = DegreeBasis::new(gens, k);
        let next = DegreeBasis::new(gens, k + 1);
        let d_k = differential_columns(m, &basis, &next);
        // kernel vectors are coefficient vectors over the degree-k monomials
        let cocycles = kernel_basis(&d_k);
        let mut echelon = Echelon::new();
        if k > 0 {
            let prev = DegreeBasis::new(gens, k - 1);
            for b in differential_columns(m, &prev, &basis) {
                echelon.insert(b, SparseVec::new());
            }
        }
        let mut representatives = Vec::new();
        for z in cocycles {
            let mut tag = SparseVec::new();
            tag.insert(representatives.len(), Rational::from_integer(1.into()));
            if echelon.insert(z.clone(), tag).is_none() {
                representatives.push(z);
            }
        }
        DegreeCohomology {
            basis,
            representatives,
            echelon,
        }
    }

    /// Coordinates of the class of a cocycle in the representative basis.
    fn coordinates(&self, cocycle: &Element) -> Vec<Rational> {
        let v = self.basis.vector(cocycle);
        let (residual, tag) = self.echelon.reduce(v, SparseVec::new());
        debug_assert!(residual.is_empty(), "not a cocycle modulo boundaries");
        // reduce() returns the negated combination
        (0..self.representatives.len())
            .map(|i| tag.get(&i).map_or_else(Rational::zero, |c| -c.clone()))
            .collect()
    }
}

pub fn cohomology_basis(m: &SullivanModel, k: u32) -> CohomologyBasis {
    let dc = DegreeCohomology::compute(m, k);
    CohomologyBasis {
        degree: k,
        representatives: dc
            .representatives
            .iter()
            .map(|v| dc.basis.element(m.gens(), v))
            .collect(),
    }
}

/// Matrix of `H^k(φ)` in the computed bases (rows: target classes).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedMap {
    pub degree: u32,
    pub matrix: DenseMatrix,
    pub rank: usize,
}

fn induced_unchecked(phi: &Morphism, k: u32) -> InducedMap {
    let src = DegreeCohomology::compute(phi.source(), k);
    let tgt = DegreeCohomology::compute(phi.target(), k);
    let mut matrix = DenseMatrix::zeros(tgt.representatives.len(), src.representatives.len());
    for (j, rep) in src.representatives.iter().enumerate() {
        let z = src.basis.element(phi.source().gens(), rep);
        let image = phi.apply(&z).expect("validated morphism");
        for (i, c) in tgt.coordinates(&image).into_iter().enumerate() {
            matrix.entries[i][j] = c;
        }
    }
    let rank = matrix.rank();
    InducedMap {
        degree: k,
        matrix,
        rank,
    }
}

/// `H^k(φ)`. Rejects morphisms that are not chain maps.
pub fn induced_map(phi: &Morphism, k: u32) -> Result<InducedMap, CohomologyError> {
    phi.check_chain_map().map_err(CohomologyError::NotChainMap)?;
    Ok(induced_unchecked(phi, k))
}

/// Induced maps in degrees `0..=cutoff` and the total image dimension.
pub fn induced_maps(
    phi: &Morphism,
    cutoff: u32,
) -> Result<(Vec<InducedMap>, usize), CohomologyError> {
    phi.check_chain_map().map_err(CohomologyError::NotChainMap)?;
    let maps: Vec<InducedMap> = (0..=cutoff)
        .into_par_iter()
        .map(|k| induced_unchecked(phi, k))
        .collect();
    let total = maps.iter().map(|m| m.rank).sum();
    Ok((maps, total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::GeneratorSet;

    #[test]
    fn exterior_on_one_generator() {
        let m = SullivanModel::free(GeneratorSet::from_degrees([("v", 3)]).unwrap());
        assert_eq!(betti(&m, 3), 1);
        assert_eq!(betti(&m, 6), 0);
        assert_eq!(betti(&m, 0), 1);
    }

    #[test]
    fn projective_line() {
        let g = GeneratorSet::from_degrees([("x", 3), ("t", 2)]).unwrap();
        let t = g.generator(1);
        let m = SullivanModel::from_named(g, [("x", t.pow(2))]).unwrap();
        let table = total_cohomology(&m, 10);
        assert_eq!(table.support(), vec![(0, 1), (2, 1)]);
        assert_eq!(table.total(), 2);
    }

    #[test]
    fn unit_only_model() {
        let m = SullivanModel::free(GeneratorSet::new(vec![]).unwrap());
        let table = total_cohomology(&m, 5);
        assert_eq!(table.support(), vec![(0, 1)]);
    }

    #[test]
    fn basis_representatives_are_cocycles() {
        let g = GeneratorSet::from_degrees([("x", 3), ("t", 2)]).unwrap();
        let t = g.generator(1);
        let m = SullivanModel::from_named(g, [("x", t.pow(2))]).unwrap();
        let b = cohomology_basis(&m, 2);
        assert_eq!(b.representatives.len(), 1);
        assert_eq!(b.representatives[0], t);
        assert!(cohomology_basis(&m, 4).representatives.is_empty());
    }

    #[test]
    fn identity_induces_identity() {
        let g = GeneratorSet::from_degrees([("a", 3), ("b", 3)]).unwrap();
        let m = SullivanModel::free(g);
        let id = Morphism::identity(&m);
        let h = induced_map(&id, 3).unwrap();
        assert_eq!(h.matrix, DenseMatrix::identity(2));
        assert_eq!(h.rank, betti(&m, 3));
    }

    #[test]
    fn non_chain_map_rejected() {
        let g = GeneratorSet::from_degrees([("x", 3), ("t", 2)]).unwrap();
        let t = g.generator(1);
        let src = SullivanModel::from_named(g.clone(), [("x", t.pow(2))]).unwrap();
        let tgt = SullivanModel::free(g.clone());
        let phi = Morphism::new(src, tgt, vec![g.generator(0), g.generator(1)]).unwrap();
        assert!(matches!(induced_map(&phi, 3), Err(CohomologyError::NotChainMap(_))));
    }
}
