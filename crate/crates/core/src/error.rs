use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid typestr {input:?}: {reason} at position {position}")]
    TypestrParse {
        input: String,
        position: usize,
        reason: String,
    },

    #[error("unsupported byte order in {0:?}: big-endian data is not supported")]
    UnsupportedByteOrder(String),

    #[error("unsupported element type {0}")]
    UnsupportedDType(String),

    #[error("structured dtype {0} has no typestr representation")]
    NotRepresentable(String),

    #[error("duplicate field name {0:?}")]
    DuplicateField(String),

    #[error("field names must be non-empty")]
    EmptyFieldName,

    #[error("structured dtype needs at least one field")]
    EmptyStruct,

    #[error("no field named {name:?}; available fields: {}", available.join(", "))]
    FieldNotFound { name: String, available: Vec<String> },

    #[error("dtype {0} is not structured")]
    NotStructured(String),

    #[error("cannot allocate {0:?}: byte size overflows")]
    AllocationOverflow(Vec<usize>),

    #[error("allocation of {0} bytes failed")]
    AllocationFailed(usize),

    #[error("index {index} is out of bounds for axis {axis} with extent {extent}")]
    IndexOutOfBounds {
        axis: usize,
        index: usize,
        extent: usize,
    },

    #[error("expected {expected} indices, got {found}")]
    RankMismatch { expected: usize, found: usize },

    #[error("axis {axis} is out of range for rank {rank}")]
    AxisOutOfRange { axis: usize, rank: usize },

    #[error("slice step on axis {0} must be non-zero")]
    ZeroStep(usize),

    #[error("arange step must be non-zero")]
    ZeroArangeStep,

    #[error("array is not writeable")]
    ReadOnly,

    #[error("cannot reshape {from:?} into {to:?}: element counts differ")]
    Reshape { from: Vec<usize>, to: Vec<usize> },

    #[error("cannot reinterpret as {dtype}: {reason}")]
    Reinterpret { dtype: String, reason: String },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("shapes cannot be broadcast: axis {axis} has extents {left} and {right}")]
    Broadcast {
        axis: usize,
        left: usize,
        right: usize,
    },

    #[error("in-place operand of shape {operand:?} would expand target of shape {target:?}")]
    InplaceShape {
        target: Vec<usize>,
        operand: Vec<usize>,
    },

    #[error("in-place target aliases elements through a zero stride on axis {0}")]
    InplaceZeroStride(usize),

    #[error("cannot store {from} results into a {to} array in place")]
    Casting { from: String, to: String },

    #[error("operation requires numeric data, got {0}")]
    NonNumeric(String),

    #[error("value {value} does not match dtype {dtype}")]
    ValueMismatch { value: String, dtype: String },

    #[error("integer division by zero")]
    DivideByZero,

    #[error("division by zero third coordinate in row {0}")]
    ZeroDepth(usize),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("array is not backed by a mapped file")]
    NotMapped,

    #[error("file not found: {0}")]
    FileNotFound(PathBuf),

    #[error("permission denied: {0}")]
    PermissionDenied(PathBuf),

    #[error("file holds {actual} bytes, need at least {expected}")]
    FileTooSmall { expected: u64, actual: u64 },

    #[error("file size {size} is not a multiple of item size {itemsize} (remainder {remainder})")]
    RecordSize {
        size: u64,
        itemsize: usize,
        remainder: u64,
    },

    #[error("array interface data location is null")]
    NullData,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn io_at(err: std::io::Error, path: &std::path::Path) -> Self {
        match err.kind() {
            std::io::ErrorKind::NotFound => Error::FileNotFound(path.to_path_buf()),
            std::io::ErrorKind::PermissionDenied => Error::PermissionDenied(path.to_path_buf()),
            _ => Error::Io(err),
        }
    }
}
