use std::fmt;
use std::str::FromStr;

use crate::array::ArrayView;
use crate::error::{Error, Result};
use crate::kernels::{
    elementwise_binary, elementwise_binary_inplace, elementwise_unary, scalar_binary, BinaryOp,
    ScalarSide, UnaryOp,
};
use crate::value::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Scalar get/set in a loop.
    PerElement,
    /// One kernel per operation, each allocating its result.
    Vectorized,
    /// Allocate `x²` and `3x`, then update in place.
    InPlace,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::PerElement, Strategy::Vectorized, Strategy::InPlace];
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::PerElement => "per_element",
            Strategy::Vectorized => "vectorized",
            Strategy::InPlace => "inplace",
        })
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "per_element" => Ok(Strategy::PerElement),
            "vectorized" => Ok(Strategy::Vectorized),
            "inplace" => Ok(Strategy::InPlace),
            other => Err(Error::InvalidArgument(format!("unknown strategy {other:?}"))),
        }
    }
}

fn f_scalar(v: Value) -> Value {
    match v {
        Value::Float(x) => Value::Float(x * x - 3.0 * x + 4.0),
        Value::UInt(x) => Value::UInt(x.wrapping_mul(x).wrapping_sub(x.wrapping_mul(3)).wrapping_add(4)),
        other => {
            let x = other.as_i64().expect("numeric element");
            Value::Int(x.wrapping_mul(x).wrapping_sub(x.wrapping_mul(3)).wrapping_add(4))
        }
    }
}

/// `f(x) = x² − 3x + 4` evaluated with the chosen strategy.
pub fn evaluate_f(x: &ArrayView, strategy: Strategy) -> Result<ArrayView> {
    if x.ndim() != 1 {
        return Err(Error::Shape(format!("expected a 1-D array, got shape {:?}", x.shape())));
    }
    if x.dtype().scalar_type().is_none() {
        return Err(Error::NonNumeric(x.dtype().to_string()));
    }
    match strategy {
        Strategy::PerElement => {
            let out = ArrayView::zeros(x.shape(), x.dtype().clone())?;
            for i in 0..x.len() {
                out.set(&[i], f_scalar(x.get(&[i])?))?;
            }
            Ok(out)
        }
        Strategy::Vectorized => {
            let a = elementwise_unary(UnaryOp::Square, x)?;
            let b = scalar_binary(BinaryOp::Mul, x, 3, ScalarSide::Left)?;
            let c = elementwise_binary(BinaryOp::Sub, &a, &b)?;
            scalar_binary(BinaryOp::Add, &c, 4, ScalarSide::Right)
        }
        Strategy::InPlace => {
            let fx = elementwise_unary(UnaryOp::Square, x)?;
            let three_x = scalar_binary(BinaryOp::Mul, x, 3, ScalarSide::Left)?;
            elementwise_binary_inplace(BinaryOp::Sub, &fx, &three_x)?;
            elementwise_binary_inplace(BinaryOp::Add, &fx, 4)?;
            Ok(fx)
        }
    }
}
