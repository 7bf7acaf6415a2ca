//! Bounded deterministic search for rank witnesses.
//!
//! Perturbation options for a generator are sums of at most `max_terms`
//! distinct candidate monomials with coefficients from the search space.
//! Candidates have the right degree and lie in `(t)`; pure powers of the `t_i`
//! come before monomials that also involve base generators, each group in
//! canonical monomial order. Assignments are enumerated by increasing total
//! number of terms, then lexicographically over generators in declaration
//! order.

use std::cell::Cell;
use std::ops::ControlFlow;

use crate::algebra::{monomial_basis, rat, Element, GeneratorSet, Monomial, Rational};
use crate::model::{BorelModel, Morphism, SullivanModel};

use super::{
    certify_lift, verify_rank_witness, MapCertificate, MapRankWitness, RankCertificate,
    RankWitness, ToralError, Verification,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchSpace {
    pub coefficients: Vec<Rational>,
    pub max_terms: usize,
    /// Stop after this many complete assignments have been evaluated.
    pub max_assignments: Option<u64>,
}

impl Default for SearchSpace {
    fn default() -> Self {
        SearchSpace {
            coefficients: vec![rat(1), rat(-1)],
            max_terms: 2,
            max_assignments: Some(2_000_000),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome<W, C> {
    Found {
        witness: W,
        certificate: C,
        explored: u64,
    },
    /// Nothing certified in the searched space. This is not a proof that no
    /// witness exists.
    NotFound { explored: u64, truncated: bool },
}

impl<W, C> SearchOutcome<W, C> {
    pub fn is_found(&self) -> bool {
        matches!(self, SearchOutcome::Found { .. })
    }

    pub fn witness(&self) -> Option<&W> {
        match self {
            SearchOutcome::Found { witness, .. } => Some(witness),
            SearchOutcome::NotFound { .. } => None,
        }
    }

    pub fn explored(&self) -> u64 {
        match self {
            SearchOutcome::Found { explored, .. } | SearchOutcome::NotFound { explored, .. } => *explored,
        }
    }
}

/// Assignment counter shared by nested searches.
struct Budget {
    explored: Cell<u64>,
    cap: Option<u64>,
    truncated: Cell<bool>,
}

impl Budget {
    fn new(cap: Option<u64>) -> Self {
        Budget {
            explored: Cell::new(0),
            cap,
            truncated: Cell::new(false),
        }
    }

    /// Counts one evaluated assignment; false once the cap is exhausted.
    fn tick(&self) -> bool {
        if self.cap.is_some_and(|c| self.explored.get() >= c) {
            self.truncated.set(true);
            return false;
        }
        self.explored.set(self.explored.get() + 1);
        true
    }
}

/// Monomials of degree `k` over `gens` that involve some generator with index
/// `>= first_borel`: pure Borel monomials first.
fn candidates(gens: &GeneratorSet, first_borel: usize, k: u32) -> Vec<Monomial> {
    let all = monomial_basis(gens, k);
    let (mut pure, mixed): (Vec<_>, Vec<_>) = all
        .into_iter()
        .filter(|m| m.support().any(|i| i >= first_borel))
        .partition(|m| m.support().all(|i| i >= first_borel));
    pure.extend(mixed);
    pure
}

/// `options[k]` lists the sums of exactly `k` distinct candidates.
fn options(gens: &GeneratorSet, cands: &[Monomial], space: &SearchSpace) -> Vec<Vec<Element>> {
    let mut out = vec![vec![Element::zero(gens)]];
    for k in 1..=space.max_terms.min(cands.len()) {
        let mut level = Vec::new();
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            let mut coeff = vec![0usize; k];
            loop {
                let e = Element::from_terms(
                    gens,
                    idx.iter()
                        .zip(&coeff)
                        .map(|(&i, &c)| (cands[i].clone(), space.coefficients[c].clone())),
                );
                level.push(e);
                // next coefficient tuple
                let mut p = k;
                while p > 0 {
                    p -= 1;
                    coeff[p] += 1;
                    if coeff[p] < space.coefficients.len() {
                        break;
                    }
                    coeff[p] = 0;
                }
                if coeff.iter().all(|&c| c == 0) {
                    break;
                }
            }
            // next index combination
            let mut p = k;
            let mut advanced = false;
            while p > 0 {
                p -= 1;
                if idx[p] < cands.len() - (k - p) {
                    idx[p] += 1;
                    for q in p + 1..k {
                        idx[q] = idx[q - 1] + 1;
                    }
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                break;
            }
        }
        out.push(level);
    }
    out
}

/// Largest base-generator index (below `nb`) in the support of `e`.
fn last_base_index(e: &Element, nb: usize) -> Option<usize> {
    e.support().into_iter().filter(|&i| i < nb).max()
}

struct RankEnumerator<'a> {
    base: &'a SullivanModel,
    rank: usize,
    gens: GeneratorSet,
    options: Vec<Vec<Vec<Element>>>,
    base_d: Vec<Element>,
}

impl<'a> RankEnumerator<'a> {
    fn new(base: &'a SullivanModel, rank: usize, space: &SearchSpace) -> Result<Self, ToralError> {
        let gens = BorelModel::borel_generators(base.gens(), rank)?;
        let nb = base.gens().len();
        let options = (0..nb)
            .map(|i| {
                let c = if rank == 0 {
                    Vec::new()
                } else {
                    candidates(&gens, nb, base.gens().degree(i) + 1)
                };
                options(&gens, &c, space)
            })
            .collect();
        let base_d = base
            .differential()
            .iter()
            .map(|d| d.embed(&gens))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(RankEnumerator {
            base,
            rank,
            gens,
            options,
            base_d,
        })
    }

    /// Calls `visit` on every certified witness in enumeration order.
    fn run(
        &self,
        budget: &Budget,
        visit: &mut dyn FnMut(RankWitness, RankCertificate) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let nb = self.base.gens().len();
        let max_total: usize = self.options.iter().map(|o| o.len() - 1).sum();
        let mut diff: Vec<Element> = vec![Element::zero(&self.gens); self.gens.len()];
        let mut chosen: Vec<Element> = vec![Element::zero(&self.gens); nb];
        let mut ready = vec![0usize; nb];
        for total in 0..=max_total {
            self.dfs(0, total, &mut diff, &mut chosen, &mut ready, budget, visit)?;
        }
        ControlFlow::Continue(())
    }

    #[allow(clippy::too_many_arguments)]
    fn dfs(
        &self,
        i: usize,
        remaining: usize,
        diff: &mut Vec<Element>,
        chosen: &mut Vec<Element>,
        ready: &mut Vec<usize>,
        budget: &Budget,
        visit: &mut dyn FnMut(RankWitness, RankCertificate) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let nb = self.base.gens().len();
        if i == nb {
            if remaining != 0 {
                return ControlFlow::Continue(());
            }
            if !budget.tick() {
                return ControlFlow::Break(());
            }
            let w = RankWitness::new(self.base.clone(), self.rank, chosen.clone())
                .expect("enumerated witness has the right shape");
            if let Verification::Certified(c) = verify_rank_witness(&w) {
                return visit(w, c);
            }
            return ControlFlow::Continue(());
        }
        let capacity: usize = self.options[i..].iter().map(|o| o.len() - 1).sum();
        if remaining > capacity {
            return ControlFlow::Continue(());
        }
        let opts = &self.options[i];
        for (k, group) in opts.iter().enumerate().take(remaining + 1) {
            for opt in group {
                diff[i] = &self.base_d[i] + opt;
                chosen[i] = opt.clone();
                ready[i] = last_base_index(&diff[i], nb).map_or(i, |j| j.max(i));
                let ok = (0..=i)
                    .filter(|&j| ready[j] == i)
                    .all(|j| diff[j].derive(diff).is_zero());
                if ok {
                    self.dfs(i + 1, remaining - k, diff, chosen, ready, budget, visit)?;
                }
            }
        }
        diff[i] = Element::zero(&self.gens);
        ControlFlow::Continue(())
    }
}

/// Returns the first certified witness of the given rank in enumeration order.
pub fn search_rank_witness(
    base: &SullivanModel,
    rank: usize,
    space: &SearchSpace,
) -> Result<SearchOutcome<RankWitness, RankCertificate>, ToralError> {
    base.check_differential().map_err(ToralError::Invalid)?;
    let e = RankEnumerator::new(base, rank, space)?;
    let budget = Budget::new(space.max_assignments);
    let mut found = None;
    let _ = e.run(&budget, &mut |w, c| {
        found = Some((w, c));
        ControlFlow::Break(())
    });
    Ok(match found {
        Some((witness, certificate)) => SearchOutcome::Found {
            witness,
            certificate,
            explored: budget.explored.get(),
        },
        None => SearchOutcome::NotFound {
            explored: budget.explored.get(),
            truncated: budget.truncated.get(),
        },
    })
}

/// Searches for the lift `F` between two fixed certified Borel models.
struct LiftSearch<'a> {
    f_model: &'a Morphism,
    source: &'a BorelModel,
    target: &'a BorelModel,
    options: Vec<Vec<Vec<Element>>>,
    ready: Vec<usize>,
}

impl<'a> LiftSearch<'a> {
    fn new(
        f_model: &'a Morphism,
        source: &'a BorelModel,
        target: &'a BorelModel,
        space: &SearchSpace,
    ) -> Result<Self, ToralError> {
        let sg = source.base().gens();
        let tg = target.total().gens();
        let ntb = target.base().gens().len();
        let nb = sg.len();
        let mut options = Vec::with_capacity(nb);
        let mut ready = Vec::with_capacity(nb);
        for i in 0..nb {
            let base_image = f_model.image(i).embed(tg)?;
            let c = candidates(tg, ntb, sg.degree(i));
            let opts = options_shifted(tg, &c, space, &base_image);
            options.push(opts);
            let r = last_base_index(source.total().d_of(i), nb).map_or(i, |j| j.max(i));
            ready.push(r);
        }
        Ok(LiftSearch {
            f_model,
            source,
            target,
            options,
            ready,
        })
    }

    fn run(&self, budget: &Budget) -> ControlFlow<Option<Morphism>> {
        let sg = self.source.total().gens();
        let nb = self.source.base().gens().len();
        let tg = self.target.total().gens();
        let ntb = self.target.base().gens().len();
        let mut images: Vec<Element> = (0..sg.len())
            .map(|i| {
                if i < nb {
                    Element::zero(tg)
                } else {
                    tg.generator(ntb + (i - nb))
                }
            })
            .collect();
        self.dfs(0, &mut images, budget)?;
        ControlFlow::Continue(())
    }

    fn dfs(&self, i: usize, images: &mut Vec<Element>, budget: &Budget) -> ControlFlow<Option<Morphism>> {
        let nb = self.source.base().gens().len();
        if i == nb {
            if !budget.tick() {
                return ControlFlow::Break(None);
            }
            return match certify_lift(self.f_model, self.source, self.target, images.clone()) {
                Ok(lift) => ControlFlow::Break(Some(lift)),
                Err(_) => ControlFlow::Continue(()),
            };
        }
        let tgt_d = self.target.total().differential();
        let tg = self.target.total().gens();
        for level in &self.options[i] {
            for opt in level {
                images[i] = opt.clone();
                let ok = (0..=i).filter(|&j| self.ready[j] == i).all(|j| {
                    let lhs = self
                        .source
                        .total()
                        .d_of(j)
                        .substitute(tg, images)
                        .expect("same generators");
                    lhs == images[j].derive(tgt_d)
                });
                if ok {
                    self.dfs(i + 1, images, budget)?;
                }
            }
        }
        images[i] = Element::zero(tg);
        ControlFlow::Continue(())
    }
}

fn options_shifted(
    gens: &GeneratorSet,
    cands: &[Monomial],
    space: &SearchSpace,
    shift: &Element,
) -> Vec<Vec<Element>> {
    options(gens, cands, space)
        .into_iter()
        .map(|level| level.into_iter().map(|e| shift + &e).collect())
        .collect()
}

/// Searches pairs of certified witnesses (source outer, target inner) and a
/// lift between them; returns the first certified map witness.
pub fn search_map_witness(
    f_model: &Morphism,
    rank: usize,
    space: &SearchSpace,
) -> Result<SearchOutcome<MapRankWitness, MapCertificate>, ToralError> {
    let src_base = f_model.source();
    let tgt_base = f_model.target();
    src_base.check_differential().map_err(ToralError::Invalid)?;
    tgt_base.check_differential().map_err(ToralError::Invalid)?;
    let budget = Budget::new(space.max_assignments);

    let mut targets: Vec<(RankWitness, RankCertificate)> = Vec::new();
    let _ = RankEnumerator::new(tgt_base, rank, space)?.run(&budget, &mut |w, c| {
        targets.push((w, c));
        ControlFlow::Continue(())
    });

    let mut found: Option<(MapRankWitness, MapCertificate)> = None;
    let mut error: Option<ToralError> = None;
    let sources = RankEnumerator::new(src_base, rank, space)?;
    let _ = sources.run(&budget, &mut |ws, cs| {
        for (wt, ct) in &targets {
            let search = match LiftSearch::new(f_model, &cs.borel, &ct.borel, space) {
                Ok(s) => s,
                Err(e) => {
                    error = Some(e);
                    return ControlFlow::Break(());
                }
            };
            match search.run(&budget) {
                ControlFlow::Break(Some(lift)) => {
                    let witness = MapRankWitness::new(
                        f_model.clone(),
                        ws.clone(),
                        wt.clone(),
                        lift.images().to_vec(),
                    )
                    .expect("lift built from these witnesses");
                    found = Some((
                        witness,
                        MapCertificate {
                            source: cs.clone(),
                            target: ct.clone(),
                            lift,
                        },
                    ));
                    return ControlFlow::Break(());
                }
                ControlFlow::Break(None) => return ControlFlow::Break(()),
                ControlFlow::Continue(()) => {}
            }
        }
        ControlFlow::Continue(())
    });
    if let Some(e) = error {
        return Err(e);
    }
    Ok(match found {
        Some((witness, certificate)) => SearchOutcome::Found {
            witness,
            certificate,
            explored: budget.explored.get(),
        },
        None => SearchOutcome::NotFound {
            explored: budget.explored.get(),
            truncated: budget.truncated.get(),
        },
    })
}
