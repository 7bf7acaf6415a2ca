//! Finiteness of cohomology through the associated pure model.
//!
//! A finitely generated model has finite-dimensional cohomology exactly when its
//! associated pure model does, and a pure model has finite cohomology exactly
//! when the polynomial algebra on its even generators modulo the pure images of
//! its odd generators is finite-dimensional. That quotient is decided degree by
//! degree: once it vanishes on every even degree of a window as wide as the
//! largest variable degree, it vanishes from there on.

use std::collections::BTreeSet;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::algebra::{monomial_basis_in, Element, GeneratorSet, HomogeneousDegree, Rational};
use crate::linalg::{rank, SparseVec};
use crate::model::SullivanModel;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EllipticityError {
    #[error("ideal generator {0} involves an odd generator")]
    OddGenerator(String),
    #[error("ideal generator {0} is not homogeneous")]
    NotHomogeneous(String),
    #[error("ideal generators live over a different generator set")]
    GeneratorSetMismatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Finite,
    Infinite,
    Unknown,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Finite => "finite",
            Verdict::Infinite => "infinite",
            Verdict::Unknown => "unknown",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FinitenessEvidence {
    /// The reduced quotient vanishes on every degree of `window`; `hilbert`
    /// lists its dimensions in every even degree up to the window's end.
    Finite {
        window: Vec<u32>,
        hilbert: Vec<(u32, usize)>,
        quotient_dimension: usize,
    },
    /// No ideal generator has a term that is a pure power of this variable, so
    /// all of its powers survive in the quotient.
    Infinite { free_variable: String },
    /// Neither certificate was found in degrees up to `cutoff`.
    Unknown { cutoff: u32 },
}

/// Verdict on `dim H* < ∞` with re-checkable evidence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinitenessCertificate {
    pub verdict: Verdict,
    /// Nonzero pure images `d_σ(v)` of odd generators, by generator name.
    pub pure_images: Vec<(String, Element)>,
    /// Variables eliminated through ideal generators linear in them, with the
    /// polynomial they were replaced by.
    pub eliminated: Vec<(String, Element)>,
    /// Ideal generators after elimination.
    pub reduced_ideal: Vec<Element>,
    /// Even generators still present after elimination.
    pub variables: Vec<String>,
    pub evidence: FinitenessEvidence,
    pub formal_dimension_bound: i64,
}

impl FinitenessCertificate {
    pub fn is_finite(&self) -> bool {
        self.verdict == Verdict::Finite
    }

    /// Recomputes the quotient dimensions in the stated window.
    pub fn recheck(&self) -> bool {
        let FinitenessEvidence::Finite { window, .. } = &self.evidence else {
            return self.verdict != Verdict::Finite;
        };
        let Some(gens) = self.reduced_ideal.first().map(|e| e.gens().clone()) else {
            return self.variables.is_empty();
        };
        let vars: Vec<usize> = self
            .variables
            .iter()
            .filter_map(|n| gens.index_of(n))
            .collect();
        window
            .iter()
            .all(|&k| quotient_dim_in(&gens, &vars, &self.reduced_ideal, k) == 0)
    }
}

/// `Σ_{odd}|v| − Σ_{even}(|x| − 1)`.
pub fn formal_dimension_bound(m: &SullivanModel) -> i64 {
    m.gens()
        .iter()
        .map(|g| {
            if g.is_odd() {
                g.degree() as i64
            } else {
                -(g.degree() as i64 - 1)
            }
        })
        .sum()
}

fn validate_ideal(gens: &GeneratorSet, ideal: &[Element]) -> Result<(), EllipticityError> {
    for f in ideal {
        if f.gens() != gens {
            return Err(EllipticityError::GeneratorSetMismatch);
        }
        if f.terms().any(|(m, _)| m.has_odd()) {
            return Err(EllipticityError::OddGenerator(f.to_string()));
        }
        if f.homogeneous_degree() == HomogeneousDegree::NotHomogeneous {
            return Err(EllipticityError::NotHomogeneous(f.to_string()));
        }
    }
    Ok(())
}

/// Dimension of the degree-`k` part of `Q[even generators] / (ideal)`.
pub fn quotient_dim(gens: &GeneratorSet, ideal: &[Element], k: u32) -> Result<usize, EllipticityError> {
    validate_ideal(gens, ideal)?;
    Ok(quotient_dim_in(gens, &gens.even_indices(), ideal, k))
}

/// Quotient dimension using only the variables in `vars`; ideal generators
/// must not involve other generators.
pub(crate) fn quotient_dim_in(gens: &GeneratorSet, vars: &[usize], ideal: &[Element], k: u32) -> usize {
    let monomials = monomial_basis_in(gens, vars, k);
    if monomials.is_empty() {
        return 0;
    }
    let index: std::collections::HashMap<_, _> = monomials
        .iter()
        .enumerate()
        .map(|(i, m)| (m.clone(), i))
        .collect();
    let mut columns: Vec<SparseVec<Rational>> = Vec::new();
    for f in ideal {
        let HomogeneousDegree::Exactly(df) = f.homogeneous_degree() else {
            continue;
        };
        if df > k {
            continue;
        }
        for mult in monomial_basis_in(gens, vars, k - df) {
            let prod = f.mul_monomial(&mult, true);
            columns.push(prod.terms().map(|(m, c)| (index[m], c.clone())).collect());
        }
    }
    monomials.len() - rank(&columns)
}

/// Replaces generators that occur linearly (and nowhere else) in some ideal
/// generator by the rest of that generator. The quotient ring is unchanged up
/// to isomorphism.
fn eliminate_linear(
    gens: &GeneratorSet,
    mut vars: Vec<usize>,
    mut ideal: Vec<Element>,
) -> (Vec<usize>, Vec<Element>, Vec<(String, Element)>) {
    let mut eliminated = Vec::new();
    'outer: loop {
        ideal.retain(|f| !f.is_zero());
        for (gi, f) in ideal.iter().enumerate() {
            for (vi, &x) in vars.iter().enumerate() {
                let lin = crate::algebra::Monomial::generator(x, false);
                let c = f.coefficient(&lin);
                if c.is_zero() {
                    continue;
                }
                let rest = f.filter_terms(|m| *m != lin);
                if rest.support().contains(&x) {
                    continue;
                }
                // x = -rest / c
                let replacement = rest.scale(&(-Rational::one() / c));
                let mut images: Vec<Element> = (0..gens.len()).map(|i| gens.generator(i)).collect();
                images[x] = replacement.clone();
                let mut next = Vec::with_capacity(ideal.len() - 1);
                for (j, h) in ideal.iter().enumerate() {
                    if j != gi {
                        next.push(h.substitute(gens, &images).expect("same generators"));
                    }
                }
                eliminated.push((gens.name(x).to_string(), replacement));
                vars.remove(vi);
                ideal = next;
                continue 'outer;
            }
        }
        break;
    }
    (vars, ideal, eliminated)
}

/// Decides finiteness with the default scan cutoff.
pub fn decide_finite(m: &SullivanModel) -> FinitenessCertificate {
    decide_finite_with(m, None)
}

/// Decides finiteness, scanning quotient degrees up to `cutoff` (default: the
/// sum of the reduced ideal generator degrees plus twice the largest variable
/// degree).
pub fn decide_finite_with(m: &SullivanModel, cutoff: Option<u32>) -> FinitenessCertificate {
    let gens = m.gens();
    let pure = m.pure_part();
    let mut pure_images = Vec::new();
    let mut ideal = Vec::new();
    for i in gens.odd_indices() {
        let e = pure.d_of(i);
        if !e.is_zero() {
            pure_images.push((gens.name(i).to_string(), e.clone()));
            ideal.push(e.clone());
        }
    }
    let (vars, reduced, eliminated) = eliminate_linear(gens, gens.even_indices(), ideal);
    let variables: Vec<String> = vars.iter().map(|&i| gens.name(i).to_string()).collect();
    let formal = formal_dimension_bound(m);
    let finish = |verdict, evidence| FinitenessCertificate {
        verdict,
        pure_images: pure_images.clone(),
        eliminated: eliminated.clone(),
        reduced_ideal: reduced.clone(),
        variables: variables.clone(),
        evidence,
        formal_dimension_bound: formal,
    };

    if vars.is_empty() {
        return finish(
            Verdict::Finite,
            FinitenessEvidence::Finite {
                window: Vec::new(),
                hilbert: vec![(0, 1)],
                quotient_dimension: 1,
            },
        );
    }

    for &x in &vars {
        let touched = reduced
            .iter()
            .any(|f| f.terms().any(|(mono, _)| mono.support().all(|i| i == x)));
        if !touched {
            return finish(
                Verdict::Infinite,
                FinitenessEvidence::Infinite {
                    free_variable: gens.name(x).to_string(),
                },
            );
        }
    }

    let g = vars.iter().map(|&i| gens.degree(i)).max().unwrap_or(2);
    let needed = (g / 2) as usize;
    let cutoff = cutoff.unwrap_or_else(|| {
        let s: u32 = reduced
            .iter()
            .filter_map(|f| match f.homogeneous_degree() {
                HomogeneousDegree::Exactly(d) => Some(d),
                _ => None,
            })
            .sum();
        s + 2 * g
    });
    let mut hilbert = Vec::new();
    let mut zero_run: Vec<u32> = Vec::new();
    let mut k = 0;
    while k <= cutoff {
        let q = quotient_dim_in(gens, &vars, &reduced, k);
        hilbert.push((k, q));
        if q == 0 {
            zero_run.push(k);
            if zero_run.len() >= needed {
                let quotient_dimension = hilbert.iter().map(|&(_, d)| d).sum();
                return finish(
                    Verdict::Finite,
                    FinitenessEvidence::Finite {
                        window: zero_run,
                        hilbert,
                        quotient_dimension,
                    },
                );
            }
        } else {
            zero_run.clear();
        }
        k += 2;
    }
    finish(Verdict::Unknown, FinitenessEvidence::Unknown { cutoff })
}

/// Names of the even generators of a model, for diagnostics.
pub fn even_generator_names(m: &SullivanModel) -> BTreeSet<String> {
    m.gens()
        .even_indices()
        .into_iter()
        .map(|i| m.gens().name(i).to_string())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::GeneratorSet;

    #[test]
    fn quotient_by_complete_intersection() {
        let g = GeneratorSet::from_degrees([("t1", 2), ("t2", 2)]).unwrap();
        let (t1, t2) = (g.generator(0), g.generator(1));
        let ideal = vec![t1.pow(2), t2.pow(3)];
        let dims: Vec<usize> = (0..=10)
            .step_by(2)
            .map(|k| quotient_dim(&g, &ideal, k).unwrap())
            .collect();
        assert_eq!(dims, vec![1, 2, 2, 1, 0, 0]);
    }

    #[test]
    fn quotient_of_single_power() {
        let g = GeneratorSet::from_degrees([("w", 6)]).unwrap();
        let ideal = vec![g.generator(0).pow(2)];
        let dims: Vec<usize> = (0..=18).map(|k| quotient_dim(&g, &ideal, k).unwrap()).collect();
        let nonzero: Vec<usize> = (0..=18).filter(|&k| dims[k] > 0).collect();
        assert_eq!(nonzero, vec![0, 6]);
    }

    #[test]
    fn empty_ideal_is_polynomial_ring() {
        let g = GeneratorSet::from_degrees([("t", 2)]).unwrap();
        for k in (0..20).step_by(2) {
            assert_eq!(quotient_dim(&g, &[], k).unwrap(), 1);
        }
    }

    #[test]
    fn odd_ideal_generator_rejected() {
        let g = GeneratorSet::from_degrees([("t", 2), ("x", 3)]).unwrap();
        let bad = &g.generator(0) * &g.generator(1);
        assert!(matches!(quotient_dim(&g, &[bad], 5), Err(EllipticityError::OddGenerator(_))));
    }

    #[test]
    fn formal_dimension_examples() {
        let su6 = SullivanModel::free(
            GeneratorSet::from_degrees([("v1", 3), ("v2", 5), ("v3", 7), ("v4", 9), ("v5", 11)]).unwrap(),
        );
        assert_eq!(formal_dimension_bound(&su6), 35);
        let cp1 = SullivanModel::free(GeneratorSet::from_degrees([("t", 2), ("x", 3)]).unwrap());
        assert_eq!(formal_dimension_bound(&cp1), 2);
        let s3 = SullivanModel::free(GeneratorSet::from_degrees([("v", 3)]).unwrap());
        assert_eq!(formal_dimension_bound(&s3), 3);
    }

    #[test]
    fn linear_elimination() {
        // v -> x + t^2 with |x| = 4 eliminates x
        let g = GeneratorSet::from_degrees([("x", 4), ("t", 2), ("v", 3), ("u", 7)]).unwrap();
        let (x, t) = (g.generator(0), g.generator(1));
        let m = SullivanModel::from_named(g, [("v", &x + &t.pow(2)), ("u", x.pow(2))]).unwrap();
        let c = decide_finite(&m);
        assert_eq!(c.verdict, Verdict::Finite);
        assert_eq!(c.eliminated.len(), 1);
        assert_eq!(c.eliminated[0].0, "x");
        assert_eq!(c.variables, vec!["t".to_string()]);
        assert!(c.recheck());
    }
}
