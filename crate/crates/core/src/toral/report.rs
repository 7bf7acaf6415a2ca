//! Comparisons of cohomology size with `2^r`.

use crate::cohomology::{induced_maps, total_cohomology, CohomologyError};
use crate::ellipticity::formal_dimension_bound;
use crate::model::SullivanModel;

use super::{MapRankWitness, RankWitness};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrcReport {
    pub rank: usize,
    /// `dim H*` of the base model, or the total image dimension of the map.
    pub dimension: usize,
    pub bound: u128,
    /// Degrees up to which cohomology was computed.
    pub cutoff: u32,
    pub satisfied: bool,
}

fn cutoff_for(m: &SullivanModel) -> u32 {
    formal_dimension_bound(m).max(0) as u32
}

fn report(rank: usize, dimension: usize, cutoff: u32) -> TrcReport {
    let bound = 1u128 << rank.min(127);
    TrcReport {
        rank,
        dimension,
        bound,
        cutoff,
        satisfied: dimension as u128 >= bound,
    }
}

/// `dim H*(base) ≥ 2^r`. Intended for certified witnesses, whose base has
/// cohomology concentrated in degrees up to the formal dimension bound.
pub fn trc_report(w: &RankWitness) -> TrcReport {
    let cutoff = cutoff_for(w.base());
    let dim = total_cohomology(w.base(), cutoff).total();
    report(w.rank(), dim, cutoff)
}

/// `dim Im H*(f) ≥ 2^r` for the map model of a map witness.
pub fn trc_map_report(w: &MapRankWitness) -> Result<TrcReport, CohomologyError> {
    let cutoff = cutoff_for(w.f_model().source());
    let (_, image) = induced_maps(w.f_model(), cutoff)?;
    Ok(report(w.rank(), image, cutoff))
}
