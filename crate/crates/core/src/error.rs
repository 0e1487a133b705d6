use crate::scalar::Scalar;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point does not satisfy the constraints of the set")]
    PointNotInSet,
    #[error("polyhedron is not homogeneous, so it is not a cone")]
    NotACone,
    #[error("ordering cone is not pointed")]
    ConeNotPointed,
    #[error("ordering cone has empty interior")]
    ConeNotSolid,
    #[error("dual cone has empty interior")]
    ConeDegenerate,
    #[error("point cloud is empty")]
    EmptyCloud,
    #[error("feasible set is empty at p = {}", fmt_vec(.0))]
    Infeasible(Vec<Scalar>),
    #[error("weighted-sum scalarization is unbounded for w = {}", fmt_vec(.0))]
    UnboundedScalarization(Vec<Scalar>),
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("unsupported constraint kind: {0}")]
    UnsupportedConstraintKind(String),
    #[error("base point is infeasible")]
    InfeasiblePoint,
    #[error("base point is not efficient; x = {} dominates it", fmt_vec(.witness_x))]
    NotEfficient { witness_x: Vec<Scalar>, witness_y: Vec<Scalar> },
    #[error("qualification conditions fail: {0}")]
    QualificationFailed(String),
    #[error("domination property is not certified")]
    DominationNotCertified,
    #[error("weak variant requires a cone_tilde")]
    MissingTildeCone,
    #[error("cone_tilde minus the origin is not inside int K")]
    TildeConeNotInterior,
    #[error("base point is not on the graph")]
    BasePointNotOnGraph,
    #[error("no intermediate point links the two maps")]
    NoIntermediatePoint,
    #[error("no feasible split of the base value")]
    NoFeasibleSplit,
    #[error("subspace condition fails: {0}")]
    SubspaceConditionFailed(String),
    #[error("active parameter {0} of a semi-infinite family is irrational")]
    IrrationalRoot(f64),
    #[error("Abadie constraint qualification fails")]
    AcqRequired,
    #[error("basic constraint qualification fails")]
    BcqRequired,
    #[error("frontier is empty at p = {}", fmt_vec(.0))]
    FrontierEmpty(Vec<Scalar>),
    #[error("constraint family is not polyhedral: {0}")]
    NotPolyhedral(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("{0}")]
    Io(String),
}

impl Error {
    /// Process exit status used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Schema { .. } | Error::DimensionMismatch(_) | Error::Io(_) => 2,
            Error::Infeasible(_) | Error::InfeasiblePoint => 3,
            Error::UnboundedScalarization(_) => 4,
            Error::QualificationFailed(_)
            | Error::SubspaceConditionFailed(_)
            | Error::AcqRequired
            | Error::BcqRequired => 5,
            Error::DominationNotCertified => 6,
            _ => 1,
        }
    }
}

fn fmt_vec(v: &[Scalar]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(", "))
}
