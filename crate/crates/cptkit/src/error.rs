//! Error types for the toolkit, one enum per subsystem.

use thiserror::Error;

use crate::cml::Violation;
use crate::mask::MaskClass;

/// Errors raised while parsing CML text.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum CmlError {
    #[error("malformed markup at line {line}: {message}")]
    MalformedXml { line: usize, message: String },
    #[error("unknown element <{tag}> at line {line}")]
    UnknownElement { line: usize, tag: String },
    #[error("invalid attribute {attr}=\"{value}\" on <{tag}>: {reason}")]
    InvalidAttribute {
        tag: String,
        attr: String,
        value: String,
        reason: String,
    },
    #[error("duplicate element id \"{id}\"")]
    DuplicateId { id: String },
    #[error("duplicate entityId \"{id}\"")]
    DuplicateEntityId { id: String },
}

/// Errors from resolving an attribute path against a document.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum PathError {
    #[error("no element with identity \"{id}\"")]
    UnknownTarget { id: String },
    #[error("attribute path \"{path}\" does not resolve on element \"{id}\"")]
    UnknownPath { id: String, path: String },
    #[error("value \"{value}\" is not valid for path \"{path}\": {reason}")]
    InvalidValue {
        path: String,
        value: String,
        reason: String,
    },
}

/// Errors from mask planning and application.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum MaskError {
    #[error("no attribute of the requested classes found in scope")]
    NoSitesFound,
    #[error("scope id \"{id}\" does not match any element")]
    UnknownScopeId { id: String },
    #[error("plan is stale: site {path} on element \"{id}\" no longer resolves ({reason})")]
    StalePlan {
        id: String,
        path: String,
        reason: String,
    },
}

/// Errors from prediction parsing, infilling and diff/apply.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum InfillError {
    #[error("prediction names unknown token \"{token}\"")]
    UnknownToken { token: String },
    #[error("duplicate prediction for token \"{token}\"")]
    DuplicateToken { token: String },
    #[error("no prediction for token \"{token}\"")]
    MissingToken { token: String },
    #[error("invalid {class:?} value \"{raw}\": {reason}")]
    InvalidValue {
        class: MaskClass,
        raw: String,
        reason: String,
    },
    #[error("infilled document fails validation: {0:?}")]
    ValidationFailed(Vec<Violation>),
    #[error("documents differ structurally: {detail}")]
    StructuralMismatch { detail: String },
    #[error("edit on \"{id}\" {path}: expected old value \"{expected}\", found \"{found}\"")]
    OldValueMismatch {
        id: String,
        path: String,
        expected: String,
        found: String,
    },
    #[error(transparent)]
    Path(#[from] PathError),
}

/// Transport-level failures talking to a remote completion or judge endpoint.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum EndpointError {
    #[error("endpoint returned HTTP {status}: {detail}")]
    Http { status: u16, detail: String },
    #[error("transport error: {detail}")]
    Transport { detail: String },
    #[error("request timed out after {detail}")]
    Timeout { detail: String },
    #[error("endpoint not configured: set {var}")]
    MissingConfig { var: String },
    #[error("endpoint response is not in the expected shape: {detail}")]
    Malformed { detail: String },
}

/// Errors from the predictor layer.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum PredictError {
    #[error(transparent)]
    Endpoint(#[from] EndpointError),
    #[error("completion could not be parsed: {source}")]
    MalformedCompletion {
        #[source]
        source: InfillError,
    },
    #[error("brand constraint has no {class:?} entries but {class:?} sites are masked")]
    ConstraintUnsatisfiable { class: MaskClass },
}

/// Errors from the design scorer (judging, ranking, evaluation).
#[derive(Debug, Clone, Error, PartialEq)]
pub enum ScorerError {
    #[error(transparent)]
    Endpoint(#[from] EndpointError),
    #[error("judge response does not match '<bucket>: <explanation>': {raw:?}")]
    UnparseableVerdict { raw: String },
    #[error("verdict list ({verdicts}) and human label list ({labels}) differ in length")]
    LengthMismatch { verdicts: usize, labels: usize },
}
