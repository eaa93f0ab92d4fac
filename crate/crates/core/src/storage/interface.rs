use std::ptr::NonNull;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::array::{byte_span, contiguous_strides, ArrayView};
use crate::buffer::Buffer;
use crate::dtype::parse_typestr;
use crate::error::{Error, Result};

/// Address of the first element of exported memory.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DataLocation(pub usize);

impl DataLocation {
    pub fn from_ptr(ptr: *const u8) -> Self {
        DataLocation(ptr as usize)
    }
}

/// Description of memory owned by another object, in the layout of the
/// array interface protocol: `shape`, `data` as `(address, read_only)`,
/// `typestr`, and optional `strides` (absent means C-contiguous).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrayInterfaceDescriptor {
    pub shape: Vec<usize>,
    pub data: (DataLocation, bool),
    pub typestr: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strides: Option<Vec<isize>>,
}

/// Implemented by objects that expose their memory as an array.
pub trait ArrayInterface {
    fn array_interface(&self) -> ArrayInterfaceDescriptor;
}

/// Wraps exported memory as an array without copying. Writes through the
/// returned view land in the exporter's memory.
///
/// # Safety
/// Every byte the descriptor addresses must stay valid (and writable unless
/// the read-only flag is set) for as long as the view, or any view derived
/// from it, is alive.
pub unsafe fn from_interface(desc: &ArrayInterfaceDescriptor) -> Result<ArrayView> {
    let dtype = parse_typestr(&desc.typestr)?;
    let (DataLocation(addr), read_only) = desc.data;
    let base = NonNull::new(addr as *mut u8).ok_or(Error::NullData)?;
    let strides = match &desc.strides {
        Some(s) if s.len() != desc.shape.len() => {
            return Err(Error::Shape(format!(
                "{} strides for {} axes",
                s.len(),
                desc.shape.len()
            )))
        }
        Some(s) => s.clone(),
        None => contiguous_strides(&desc.shape, dtype.itemsize()),
    };
    let (lo, hi) = byte_span(&desc.shape, &strides, dtype.itemsize());
    // the buffer starts at the lowest addressed byte
    let start = NonNull::new(base.as_ptr().wrapping_offset(lo)).ok_or(Error::NullData)?;
    let buffer = Arc::new(Buffer::foreign(start, (hi - lo) as usize, read_only));
    ArrayView::from_parts(buffer, (-lo) as usize, desc.shape.clone(), strides, dtype, true)
}

/// A growable-free byte string that exports its storage as `|u1` elements.
pub struct MutableString {
    ptr: NonNull<u8>,
    len: usize,
}

impl MutableString {
    pub fn new(s: &str) -> Self {
        let boxed: Box<[u8]> = s.as_bytes().into();
        let len = boxed.len();
        let ptr = NonNull::new(Box::into_raw(boxed) as *mut u8).expect("box pointer is non-null");
        MutableString { ptr, len }
    }

    pub fn bytes(&self) -> Vec<u8> {
        // SAFETY: ptr..ptr+len is owned by self.
        unsafe { std::slice::from_raw_parts(self.ptr.as_ptr(), self.len) }.to_vec()
    }
}

impl std::fmt::Display for MutableString {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&String::from_utf8_lossy(&self.bytes()))
    }
}

impl ArrayInterface for MutableString {
    fn array_interface(&self) -> ArrayInterfaceDescriptor {
        ArrayInterfaceDescriptor {
            shape: vec![self.len],
            data: (DataLocation::from_ptr(self.ptr.as_ptr()), false),
            typestr: "|u1".into(),
            strides: None,
        }
    }
}

impl Drop for MutableString {
    fn drop(&mut self) {
        // SAFETY: created by Box::into_raw in `new` with this length.
        unsafe {
            drop(Box::from_raw(std::ptr::slice_from_raw_parts_mut(
                self.ptr.as_ptr(),
                self.len,
            )))
        }
    }
}
