//! Exact computations with Sullivan models over the rationals: graded algebra,
//! cohomology, finiteness of cohomology, toral rank witnesses and their search,
//! and a small text format for models, witnesses and maps.

pub mod algebra;
pub mod cohomology;
pub mod ellipticity;
pub mod frontend;
pub mod linalg;
pub mod model;

pub use algebra::{
    monomial_basis, multiply, rat, AlgebraError, Element, GenKind, Generator, GeneratorSet,
    HomogeneousDegree, Monomial, Rational,
};
pub use cohomology::{
    betti, cohomology_basis, induced_map, induced_maps, total_cohomology, BettiTable,
    CohomologyBasis, CohomologyError, InducedMap,
};
pub use ellipticity::{
    decide_finite, decide_finite_with, formal_dimension_bound, quotient_dim, EllipticityError,
    FinitenessCertificate, FinitenessEvidence, Verdict,
};
pub use linalg::DenseMatrix;
pub use model::{
    apply_d, check_chain_map, check_differential, check_lift, pure_part, restrict_fiber,
    BorelModel, Morphism, SullivanModel, Violation,
};
pub mod toral;

pub use toral::{
    adjoin_sphere_variable, build_borel, search_map_witness, search_rank_witness,
    transplant_fiber_witness, trc_map_report, trc_report, verify_map_rank_witness,
    verify_rank_witness, MapCertificate, MapRankWitness, RankCertificate, RankWitness, Rejection,
    RelativeModel, SearchOutcome, SearchSpace, SphereExtension, ToralError, TrcReport,
    Transplanted, Verification,
};
pub use frontend::{
    parse, render_document, CertificateDocument, ModelDocument, OpError, ParseError,
};
