use thiserror::Error;

/// Errors reported by the reduction pipeline.
///
/// Variants split into two classes: user-input problems (bad prime, bad
/// branch locus, polynomial that does not split) and internal guards that
/// fire only on a bug in the construction itself. [`Error::is_internal`]
/// distinguishes them so callers can map them to different exit codes.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus {0} is not prime")]
    CompositeModulus(u64),
    #[error("residue characteristic 2 is not supported; the prime must be odd")]
    ResidueCharTwo,
    #[error("the zero polynomial has no Gauss valuation")]
    ZeroPolynomial,
    #[error("valuation mismatch: expected Gauss valuation {expected}, found {found}")]
    ValuationMismatch { expected: i64, found: i64 },
    #[error(
        "the polynomial does not split into rational linear factors; \
         supply the branch points explicitly over an extension field"
    )]
    IrrationalBranchPoints,
    #[error("repeated root {0}: the defining polynomial must be squarefree")]
    NotSquarefree(String),
    #[error("duplicate branch point {0}")]
    DuplicatePoints(String),
    #[error("need an even number (at least 4) of branch points, got {0}")]
    WrongPointCount(usize),
    #[error("leading coefficient must be nonzero")]
    ZeroLeadingCoefficient,
    #[error("residue of zero has no Legendre symbol")]
    ZeroResidue,
    #[error("genus must be at least 1, got {0}")]
    GenusTooSmall(usize),
    #[error("internal: marked tree stabilization reached an invalid fixed point: {0}")]
    InternalInstability(String),
    #[error("internal: residue collision on vertex chart: {0}")]
    ResidueCollision(String),
    #[error("internal: odd double point with odd extended thickness {0}")]
    ThicknessParity(u64),
    #[error("internal: toric rank {from_counts} from component counts != Betti number {from_graph}")]
    RankMismatch { from_counts: i64, from_graph: i64 },
    #[error("internal: component has nonempty branch locus or non-square equation: {0}")]
    NotTwoLineComponent(String),
}

impl Error {
    /// True for guard errors that indicate a bug in this library rather
    /// than a problem with the input.
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            Error::InternalInstability(_)
                | Error::ResidueCollision(_)
                | Error::ThicknessParity(_)
                | Error::RankMismatch { .. }
                | Error::NotTwoLineComponent(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
