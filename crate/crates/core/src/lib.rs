//! Strided n-dimensional arrays over shared byte buffers.
//!
//! An [`ArrayView`] is a small header (offset, shape, byte strides, dtype,
//! flags) over a reference-counted [`Buffer`]. Slicing, transposing,
//! broadcasting and field selection only produce new headers; data is
//! copied only when a kernel writes a result or a reshape cannot be
//! expressed with strides.
//!
//! ```
//! use ndview::kernels::{elementwise_binary, BinaryOp};
//! use ndview::{ArrayView, SliceSpec};
//!
//! let x = ArrayView::from_vec((0..9i64).collect(), &[3, 3])?;
//! let y = x.slice(&[SliceSpec::every(2), SliceSpec::every(2)])?;
//! assert_eq!(y.strides(), &[48, 16]);
//! y.set(&[0, 0], 100)?;
//! assert_eq!(x.to_vec::<i64>()[0], 100);
//!
//! let row = ArrayView::from_slice(&[1i64, 2, 3]);
//! let sum = elementwise_binary(BinaryOp::Add, &x, &row)?;
//! assert_eq!(sum.to_string(), "[[101, 3, 5], [4, 6, 8], [7, 9, 11]]");
//! # Ok::<(), ndview::Error>(())
//! ```

mod array;
pub mod broadcast;
mod buffer;
pub mod counters;
pub mod dtype;
mod element;
mod error;
pub mod kernels;
pub mod pipelines;
pub mod storage;
mod value;
mod walk;

pub use array::{arange, contiguous_strides, create, fortran_strides, ArrayView, Flags, Header, SliceSpec};
pub use broadcast::{broadcast_shapes, broadcast_view, newaxis_view, BroadcastPlan};
pub use buffer::{Backing, Buffer};
pub use counters::{measure, CounterReport, CounterSession};
pub use dtype::{
    format_typestr, make_struct_dtype, parse_typestr, parse_typestr_any_order, struct_dtype, ByteOrder,
    DType, Field, FieldSpec, Kind, ScalarType,
};
pub use element::Element;
pub use error::{Error, Result};
pub use value::{Scalar, Value};
