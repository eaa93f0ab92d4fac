use std::fmt;

use crate::dtype::{DType, Kind, ScalarType};
use crate::element::{dispatch_scalar, Element};
use crate::error::{Error, Result};

/// A single decoded element. Structured elements decode to a record of
/// named members in declaration order.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Bool(bool),
    Int(i64),
    UInt(u64),
    Float(f64),
    Record(Vec<(String, Value)>),
}

impl Value {
    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Value::Bool(b) => Some(b as u8 as f64),
            Value::Int(v) => Some(v as f64),
            Value::UInt(v) => Some(v as f64),
            Value::Float(v) => Some(v),
            Value::Record(_) => None,
        }
    }

    pub fn as_i64(&self) -> Option<i64> {
        match *self {
            Value::Bool(b) => Some(b as i64),
            Value::Int(v) => Some(v),
            Value::UInt(v) => i64::try_from(v).ok(),
            Value::Float(_) | Value::Record(_) => None,
        }
    }

    pub fn field(&self, name: &str) -> Option<&Value> {
        match self {
            Value::Record(members) => members.iter().find(|(n, _)| n == name).map(|(_, v)| v),
            _ => None,
        }
    }

    pub(crate) fn decode(dtype: &DType, bytes: &[u8]) -> Value {
        debug_assert_eq!(bytes.len(), dtype.itemsize());
        match dtype.scalar_type() {
            Some(ty) => dispatch_scalar!(ty, T => {
                // SAFETY: `bytes` holds exactly one element.
                unsafe { T::load(bytes.as_ptr()) }.to_value()
            }),
            None => Value::Record(
                dtype
                    .fields()
                    .iter()
                    .map(|f| {
                        let end = f.offset + f.dtype.itemsize();
                        (f.name.clone(), Value::decode(&f.dtype, &bytes[f.offset..end]))
                    })
                    .collect(),
            ),
        }
    }

    pub(crate) fn encode(&self, dtype: &DType, out: &mut [u8]) -> Result<()> {
        debug_assert_eq!(out.len(), dtype.itemsize());
        let mismatch = || Error::ValueMismatch {
            value: self.to_string(),
            dtype: dtype.to_string(),
        };
        match (dtype.scalar_type(), self) {
            (Some(_), Value::Record(_)) => Err(mismatch()),
            (Some(ty), v) => {
                dispatch_scalar!(ty, T => {
                    let x: T = match *v {
                        Value::Bool(b) => T::from_bool(b),
                        Value::Int(i) => T::from_i64(i),
                        Value::UInt(u) => T::from_u64(u),
                        Value::Float(f) => T::from_f64(f),
                        Value::Record(_) => unreachable!(),
                    };
                    // SAFETY: `out` holds exactly one element.
                    unsafe { x.store(out.as_mut_ptr()) };
                });
                Ok(())
            }
            (None, Value::Record(members)) => {
                if members.len() != dtype.fields().len() {
                    return Err(mismatch());
                }
                for (field, (name, v)) in dtype.fields().iter().zip(members) {
                    if &field.name != name {
                        return Err(mismatch());
                    }
                    let end = field.offset + field.dtype.itemsize();
                    v.encode(&field.dtype, &mut out[field.offset..end])?;
                }
                Ok(())
            }
            (None, _) => Err(mismatch()),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{}", if *b { "True" } else { "False" }),
            Value::Int(v) => write!(f, "{v}"),
            Value::UInt(v) => write!(f, "{v}"),
            Value::Float(v) => write!(f, "{v:?}"),
            Value::Record(members) => {
                f.write_str("(")?;
                for (i, (_, v)) in members.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

impl From<i64> for Value {
    fn from(v: i64) -> Self {
        Value::Int(v)
    }
}

impl From<i32> for Value {
    fn from(v: i32) -> Self {
        Value::Int(v as i64)
    }
}

impl From<u64> for Value {
    fn from(v: u64) -> Self {
        Value::UInt(v)
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Float(v)
    }
}

/// A number used as a zero-rank operand.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Scalar {
    Int(i64),
    Float(f64),
}

impl Scalar {
    /// The smallest dtype able to hold this value without loss, given the
    /// dtype of the array it is combined with.
    pub(crate) fn resolve_with(self, array: ScalarType) -> ScalarType {
        match self {
            Scalar::Float(_) if array.is_float() => array,
            Scalar::Float(_) => ScalarType::Float64,
            Scalar::Int(_) if array.is_float() => array,
            Scalar::Int(_) if array == ScalarType::Bool => ScalarType::Int64,
            Scalar::Int(v) => {
                if int_fits(v, array) {
                    return array;
                }
                let ladder = if v < 0 || array.kind() == Kind::SignedInt {
                    [ScalarType::Int16, ScalarType::Int32, ScalarType::Int64]
                } else {
                    [ScalarType::UInt16, ScalarType::UInt32, ScalarType::UInt64]
                };
                ladder
                    .into_iter()
                    .find(|&t| t.itemsize() > array.itemsize() && int_fits(v, t))
                    .unwrap_or(ScalarType::Float64)
            }
        }
    }

    pub(crate) fn get<T: Element>(self) -> T {
        match self {
            Scalar::Int(v) => T::from_i64(v),
            Scalar::Float(v) => T::from_f64(v),
        }
    }
}

fn int_fits(v: i64, ty: ScalarType) -> bool {
    match ty {
        ScalarType::Int8 => i8::try_from(v).is_ok(),
        ScalarType::Int16 => i16::try_from(v).is_ok(),
        ScalarType::Int32 => i32::try_from(v).is_ok(),
        ScalarType::Int64 => true,
        ScalarType::UInt8 => u8::try_from(v).is_ok(),
        ScalarType::UInt16 => u16::try_from(v).is_ok(),
        ScalarType::UInt32 => u32::try_from(v).is_ok(),
        ScalarType::UInt64 => v >= 0,
        _ => false,
    }
}

impl From<i64> for Scalar {
    fn from(v: i64) -> Self {
        Scalar::Int(v)
    }
}

impl From<i32> for Scalar {
    fn from(v: i32) -> Self {
        Scalar::Int(v as i64)
    }
}

impl From<f64> for Scalar {
    fn from(v: f64) -> Self {
        Scalar::Float(v)
    }
}
