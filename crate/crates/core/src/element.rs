//! Native Rust types backing each scalar dtype.

use std::fmt::Debug;

use crate::dtype::ScalarType;
use crate::value::Value;

pub trait Element: Copy + PartialOrd + Debug + Send + Sync + 'static {
    const TYPE: ScalarType;

    /// Reads a little-endian value from possibly unaligned memory.
    ///
    /// # Safety
    /// `ptr` must be valid for reading `size_of::<Self>()` bytes.
    unsafe fn load(ptr: *const u8) -> Self;

    /// # Safety
    /// `ptr` must be valid for writing `size_of::<Self>()` bytes.
    unsafe fn store(self, ptr: *mut u8);

    fn from_i64(v: i64) -> Self;
    fn from_u64(v: u64) -> Self;
    fn from_f64(v: f64) -> Self;
    fn from_bool(v: bool) -> Self;
    fn to_f64(self) -> f64;
    fn to_value(self) -> Value;

    fn add(self, rhs: Self) -> Self;
    fn sub(self, rhs: Self) -> Self;
    fn mul(self, rhs: Self) -> Self;
    /// `None` signals an integer zero divisor.
    fn div(self, rhs: Self) -> Option<Self>;
    fn neg(self) -> Self;
}

macro_rules! int_element {
    ($t:ty, $ty:ident, $value:ident, $wide:ty) => {
        impl Element for $t {
            const TYPE: ScalarType = ScalarType::$ty;

            #[inline]
            unsafe fn load(ptr: *const u8) -> Self {
                <$t>::from_le(std::ptr::read_unaligned(ptr as *const $t))
            }
            #[inline]
            unsafe fn store(self, ptr: *mut u8) {
                std::ptr::write_unaligned(ptr as *mut $t, self.to_le())
            }
            #[inline]
            fn from_i64(v: i64) -> Self {
                v as $t
            }
            #[inline]
            fn from_u64(v: u64) -> Self {
                v as $t
            }
            #[inline]
            fn from_f64(v: f64) -> Self {
                v as $t
            }
            #[inline]
            fn from_bool(v: bool) -> Self {
                v as $t
            }
            #[inline]
            fn to_f64(self) -> f64 {
                self as f64
            }
            fn to_value(self) -> Value {
                Value::$value(self as $wide)
            }
            #[inline]
            fn add(self, rhs: Self) -> Self {
                self.wrapping_add(rhs)
            }
            #[inline]
            fn sub(self, rhs: Self) -> Self {
                self.wrapping_sub(rhs)
            }
            #[inline]
            fn mul(self, rhs: Self) -> Self {
                self.wrapping_mul(rhs)
            }
            #[inline]
            fn div(self, rhs: Self) -> Option<Self> {
                if rhs == 0 {
                    None
                } else {
                    Some(self.wrapping_div(rhs))
                }
            }
            #[inline]
            fn neg(self) -> Self {
                self.wrapping_neg()
            }
        }
    };
}

int_element!(i8, Int8, Int, i64);
int_element!(i16, Int16, Int, i64);
int_element!(i32, Int32, Int, i64);
int_element!(i64, Int64, Int, i64);
int_element!(u8, UInt8, UInt, u64);
int_element!(u16, UInt16, UInt, u64);
int_element!(u32, UInt32, UInt, u64);
int_element!(u64, UInt64, UInt, u64);

macro_rules! float_element {
    ($t:ty, $ty:ident, $bits:ty) => {
        impl Element for $t {
            const TYPE: ScalarType = ScalarType::$ty;

            #[inline]
            unsafe fn load(ptr: *const u8) -> Self {
                <$t>::from_bits(<$bits>::from_le(std::ptr::read_unaligned(ptr as *const $bits)))
            }
            #[inline]
            unsafe fn store(self, ptr: *mut u8) {
                std::ptr::write_unaligned(ptr as *mut $bits, self.to_bits().to_le())
            }
            #[inline]
            fn from_i64(v: i64) -> Self {
                v as $t
            }
            #[inline]
            fn from_u64(v: u64) -> Self {
                v as $t
            }
            #[inline]
            fn from_f64(v: f64) -> Self {
                v as $t
            }
            #[inline]
            fn from_bool(v: bool) -> Self {
                if v {
                    1.0
                } else {
                    0.0
                }
            }
            #[inline]
            fn to_f64(self) -> f64 {
                self as f64
            }
            fn to_value(self) -> Value {
                Value::Float(self as f64)
            }
            #[inline]
            fn add(self, rhs: Self) -> Self {
                self + rhs
            }
            #[inline]
            fn sub(self, rhs: Self) -> Self {
                self - rhs
            }
            #[inline]
            fn mul(self, rhs: Self) -> Self {
                self * rhs
            }
            #[inline]
            fn div(self, rhs: Self) -> Option<Self> {
                Some(self / rhs)
            }
            #[inline]
            fn neg(self) -> Self {
                -self
            }
        }
    };
}

float_element!(f32, Float32, u32);
float_element!(f64, Float64, u64);

impl Element for bool {
    const TYPE: ScalarType = ScalarType::Bool;

    #[inline]
    unsafe fn load(ptr: *const u8) -> Self {
        *ptr != 0
    }
    #[inline]
    unsafe fn store(self, ptr: *mut u8) {
        *ptr = self as u8
    }
    fn from_i64(v: i64) -> Self {
        v != 0
    }
    fn from_u64(v: u64) -> Self {
        v != 0
    }
    fn from_f64(v: f64) -> Self {
        v != 0.0
    }
    fn from_bool(v: bool) -> Self {
        v
    }
    fn to_f64(self) -> f64 {
        self as u8 as f64
    }
    fn to_value(self) -> Value {
        Value::Bool(self)
    }
    // Logical or/xor/and, as for a one-bit integer ring.
    fn add(self, rhs: Self) -> Self {
        self | rhs
    }
    fn sub(self, rhs: Self) -> Self {
        self ^ rhs
    }
    fn mul(self, rhs: Self) -> Self {
        self & rhs
    }
    fn div(self, rhs: Self) -> Option<Self> {
        rhs.then_some(self)
    }
    fn neg(self) -> Self {
        self
    }
}

pub(crate) type Loader<T> = unsafe fn(*const u8) -> T;

/// A reader that decodes a stored `ty` value and converts it to `T`.
pub(crate) fn loader<T: Element>(ty: ScalarType) -> Loader<T> {
    unsafe fn via_i64<S: Element + Into<i64>, T: Element>(p: *const u8) -> T {
        T::from_i64(S::load(p).into())
    }
    unsafe fn via_u64<S: Element + Into<u64>, T: Element>(p: *const u8) -> T {
        T::from_u64(S::load(p).into())
    }
    unsafe fn via_f64<S: Element + Into<f64>, T: Element>(p: *const u8) -> T {
        T::from_f64(S::load(p).into())
    }
    unsafe fn via_bool<T: Element>(p: *const u8) -> T {
        T::from_bool(bool::load(p))
    }
    unsafe fn same<T: Element>(p: *const u8) -> T {
        T::load(p)
    }
    if ty == T::TYPE {
        return same::<T>;
    }
    match ty {
        ScalarType::Bool => via_bool::<T>,
        ScalarType::Int8 => via_i64::<i8, T>,
        ScalarType::Int16 => via_i64::<i16, T>,
        ScalarType::Int32 => via_i64::<i32, T>,
        ScalarType::Int64 => via_i64::<i64, T>,
        ScalarType::UInt8 => via_u64::<u8, T>,
        ScalarType::UInt16 => via_u64::<u16, T>,
        ScalarType::UInt32 => via_u64::<u32, T>,
        ScalarType::UInt64 => via_u64::<u64, T>,
        ScalarType::Float32 => via_f64::<f32, T>,
        ScalarType::Float64 => via_f64::<f64, T>,
    }
}

/// Expands `$body` once per scalar type with `$t` bound to the native type.
macro_rules! dispatch_scalar {
    ($ty:expr, $t:ident => $body:expr) => {
        match $ty {
            $crate::dtype::ScalarType::Bool => {
                type $t = bool;
                $body
            }
            $crate::dtype::ScalarType::Int8 => {
                type $t = i8;
                $body
            }
            $crate::dtype::ScalarType::Int16 => {
                type $t = i16;
                $body
            }
            $crate::dtype::ScalarType::Int32 => {
                type $t = i32;
                $body
            }
            $crate::dtype::ScalarType::Int64 => {
                type $t = i64;
                $body
            }
            $crate::dtype::ScalarType::UInt8 => {
                type $t = u8;
                $body
            }
            $crate::dtype::ScalarType::UInt16 => {
                type $t = u16;
                $body
            }
            $crate::dtype::ScalarType::UInt32 => {
                type $t = u32;
                $body
            }
            $crate::dtype::ScalarType::UInt64 => {
                type $t = u64;
                $body
            }
            $crate::dtype::ScalarType::Float32 => {
                type $t = f32;
                $body
            }
            $crate::dtype::ScalarType::Float64 => {
                type $t = f64;
                $body
            }
        }
    };
}
pub(crate) use dispatch_scalar;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loaders_convert_between_types() {
        let bytes = 300i16.to_le_bytes();
        let as_f64 = loader::<f64>(ScalarType::Int16);
        let as_u8 = loader::<u8>(ScalarType::Int16);
        unsafe {
            assert_eq!(as_f64(bytes.as_ptr()), 300.0);
            assert_eq!(as_u8(bytes.as_ptr()), 44);
        }
        let big = u64::MAX.to_le_bytes();
        unsafe {
            assert_eq!(loader::<f64>(ScalarType::UInt64)(big.as_ptr()), u64::MAX as f64);
        }
    }

    #[test]
    fn integer_division_truncates() {
        assert_eq!(Element::div(-7i64, 2), Some(-3));
        assert_eq!(Element::div(7i64, 0), None);
        assert_eq!(Element::div(i64::MIN, -1), Some(i64::MIN));
        assert!(Element::div(1.0f64, 0.0).unwrap().is_infinite());
    }

    #[test]
    fn stores_little_endian() {
        let mut out = [0u8; 8];
        unsafe { 100i64.store(out.as_mut_ptr()) };
        assert_eq!(out, [100, 0, 0, 0, 0, 0, 0, 0]);
    }
}
