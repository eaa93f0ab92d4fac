//! The array header and its zero-copy view transformations.
//!
//! Every array is a view: a shared [`Buffer`] plus the byte offset of the
//! first element, per-axis extents, signed per-axis byte strides and a
//! dtype. Slicing, transposing, reshaping contiguous data and
//! reinterpreting the element type only build a new header.

use std::fmt;
use std::ops::{Range, RangeFrom, RangeFull, RangeTo};
use std::sync::Arc;

use crate::buffer::Buffer;
use crate::dtype::DType;
use crate::element::{dispatch_scalar, loader, Element};
use crate::error::{Error, Result};
use crate::value::Value;
use crate::walk::walk;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Flags {
    pub writeable: bool,
    pub c_contiguous: bool,
    pub f_contiguous: bool,
    /// True when the header was derived from another array rather than
    /// created together with its buffer.
    pub is_view: bool,
}

/// Row-major byte strides for `shape`.
pub fn contiguous_strides(shape: &[usize], itemsize: usize) -> Vec<isize> {
    let mut strides = vec![0isize; shape.len()];
    let mut step = itemsize as isize;
    for (s, &n) in strides.iter_mut().zip(shape).rev() {
        *s = step;
        step *= n as isize;
    }
    strides
}

/// Column-major byte strides for `shape`.
pub fn fortran_strides(shape: &[usize], itemsize: usize) -> Vec<isize> {
    let mut strides = vec![0isize; shape.len()];
    let mut step = itemsize as isize;
    for (s, &n) in strides.iter_mut().zip(shape) {
        *s = step;
        step *= n as isize;
    }
    strides
}

fn layout_matches<'a>(
    axes: impl Iterator<Item = (&'a usize, &'a isize)>,
    itemsize: usize,
) -> bool {
    let mut expected = itemsize as isize;
    for (&n, &s) in axes {
        if n != 1 && s != expected {
            return false;
        }
        expected *= n as isize;
    }
    true
}

/// Contiguity flags. Axes of extent 1 may carry any stride, and empty
/// arrays count as contiguous in both orders.
pub(crate) fn contiguity(shape: &[usize], strides: &[isize], itemsize: usize) -> (bool, bool) {
    if shape.contains(&0) {
        return (true, true);
    }
    let c = layout_matches(shape.iter().zip(strides).rev(), itemsize);
    let f = layout_matches(shape.iter().zip(strides), itemsize);
    (c, f)
}

/// Lowest and one-past-highest byte touched, relative to element zero.
pub(crate) fn byte_span(shape: &[usize], strides: &[isize], itemsize: usize) -> (isize, isize) {
    if shape.contains(&0) {
        return (0, 0);
    }
    let mut lo = 0isize;
    let mut hi = 0isize;
    for (&n, &s) in shape.iter().zip(strides) {
        let reach = s * (n as isize - 1);
        if reach < 0 {
            lo += reach;
        } else {
            hi += reach;
        }
    }
    (lo, hi + itemsize as isize)
}

/// One axis of a slice: half-open `start..stop` stepping by `step`.
/// Omitted bounds and negative indices follow the usual conventions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SliceSpec {
    pub start: Option<isize>,
    pub stop: Option<isize>,
    pub step: isize,
}

impl SliceSpec {
    pub const fn full() -> Self {
        SliceSpec {
            start: None,
            stop: None,
            step: 1,
        }
    }

    pub const fn new(start: Option<isize>, stop: Option<isize>, step: isize) -> Self {
        SliceSpec { start, stop, step }
    }

    /// `::step`
    pub const fn every(step: isize) -> Self {
        SliceSpec {
            start: None,
            stop: None,
            step,
        }
    }

    /// Resolved first index and element count for an axis of extent `len`.
    fn resolve(&self, len: usize) -> (isize, usize) {
        let len = len as isize;
        let step = self.step;
        if step > 0 {
            let clamp = |v: Option<isize>, default: isize| match v {
                None => default,
                Some(v) if v < 0 => (v + len).max(0),
                Some(v) => v.min(len),
            };
            let start = clamp(self.start, 0);
            let stop = clamp(self.stop, len);
            let count = if stop > start {
                (stop - start + step - 1) / step
            } else {
                0
            };
            (start, count as usize)
        } else {
            let clamp = |v: Option<isize>, default: isize| match v {
                None => default,
                Some(v) if v < 0 => (v + len).max(-1),
                Some(v) => v.min(len - 1),
            };
            let start = clamp(self.start, len - 1);
            let stop = clamp(self.stop, -1);
            let count = if start > stop {
                (start - stop - step - 1) / -step
            } else {
                0
            };
            (start, count as usize)
        }
    }
}

impl From<RangeFull> for SliceSpec {
    fn from(_: RangeFull) -> Self {
        SliceSpec::full()
    }
}

impl From<Range<isize>> for SliceSpec {
    fn from(r: Range<isize>) -> Self {
        SliceSpec::new(Some(r.start), Some(r.end), 1)
    }
}

impl From<RangeFrom<isize>> for SliceSpec {
    fn from(r: RangeFrom<isize>) -> Self {
        SliceSpec::new(Some(r.start), None, 1)
    }
}

impl From<RangeTo<isize>> for SliceSpec {
    fn from(r: RangeTo<isize>) -> Self {
        SliceSpec::new(None, Some(r.end), 1)
    }
}

/// The comparable part of an array header.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Header {
    pub buffer_id: u64,
    pub offset: usize,
    pub shape: Vec<usize>,
    pub strides: Vec<isize>,
    pub dtype: DType,
    pub flags: Flags,
}

#[derive(Clone)]
pub struct ArrayView {
    buffer: Arc<Buffer>,
    offset: usize,
    shape: Vec<usize>,
    strides: Vec<isize>,
    dtype: DType,
    flags: Flags,
}

fn byte_len(shape: &[usize], itemsize: usize) -> Option<usize> {
    shape
        .iter()
        .try_fold(itemsize, |acc, &n| acc.checked_mul(n))
        .filter(|&n| n <= isize::MAX as usize)
}

impl ArrayView {
    /// Builds a header over `buffer`, checking that every element it can
    /// address lies inside the buffer.
    pub(crate) fn from_parts(
        buffer: Arc<Buffer>,
        offset: usize,
        shape: Vec<usize>,
        strides: Vec<isize>,
        dtype: DType,
        is_view: bool,
    ) -> Result<ArrayView> {
        dtype.ensure_native()?;
        if shape.len() != strides.len() {
            return Err(Error::Shape(format!(
                "{} extents but {} strides",
                shape.len(),
                strides.len()
            )));
        }
        let (lo, hi) = byte_span(&shape, &strides, dtype.itemsize());
        if lo != hi && (offset as isize + lo < 0 || offset as isize + hi > buffer.len() as isize) {
            return Err(Error::Shape(format!(
                "view of shape {shape:?} with strides {strides:?} at offset {offset} \
                 exceeds buffer of {} bytes",
                buffer.len()
            )));
        }
        let writeable = !buffer.is_read_only();
        let mut view = ArrayView {
            buffer,
            offset,
            shape,
            strides,
            dtype,
            flags: Flags {
                writeable,
                c_contiguous: false,
                f_contiguous: false,
                is_view,
            },
        };
        view.recompute_flags();
        Ok(view)
    }

    /// A new zero-filled, C-contiguous array.
    pub fn zeros(shape: &[usize], dtype: DType) -> Result<ArrayView> {
        dtype.ensure_native()?;
        let nbytes = byte_len(shape, dtype.itemsize())
            .ok_or_else(|| Error::AllocationOverflow(shape.to_vec()))?;
        let buffer = Arc::new(Buffer::zeroed(nbytes)?);
        let strides = contiguous_strides(shape, dtype.itemsize());
        ArrayView::from_parts(buffer, 0, shape.to_vec(), strides, dtype, false)
    }

    /// Evenly spaced values `start, start+step, ...` below `stop` (above,
    /// for negative steps).
    pub fn arange(start: f64, stop: f64, step: f64, dtype: DType) -> Result<ArrayView> {
        if step == 0.0 {
            return Err(Error::ZeroArangeStep);
        }
        let ty = dtype
            .scalar_type()
            .ok_or_else(|| Error::NonNumeric(dtype.to_string()))?;
        let n = ((stop - start) / step).ceil().max(0.0) as usize;
        let out = ArrayView::zeros(&[n], dtype)?;
        let ptr = out.buffer.as_ptr();
        dispatch_scalar!(ty, T => {
            let size = std::mem::size_of::<T>();
            for i in 0..n {
                let v = T::from_f64(start + i as f64 * step);
                // SAFETY: fresh contiguous buffer of n elements.
                unsafe { v.store(ptr.add(i * size)) };
            }
        });
        Ok(out)
    }

    /// Copies `data` into a new C-contiguous array of the given shape.
    pub fn from_vec<T: Element>(data: Vec<T>, shape: &[usize]) -> Result<ArrayView> {
        let expected: usize = shape.iter().product();
        if data.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                found: data.len(),
            });
        }
        let out = ArrayView::zeros(shape, DType::scalar(T::TYPE))?;
        let ptr = out.buffer.as_ptr();
        let size = std::mem::size_of::<T>();
        for (i, v) in data.into_iter().enumerate() {
            // SAFETY: fresh contiguous buffer of `expected` elements.
            unsafe { v.store(ptr.add(i * size)) };
        }
        Ok(out)
    }

    /// A 1-D array of the given elements.
    pub fn from_slice<T: Element>(data: &[T]) -> ArrayView {
        ArrayView::from_vec(data.to_vec(), &[data.len()]).expect("length matches shape")
    }

    /// Builds a structured (or scalar) array from decoded values.
    pub fn from_values(values: &[Value], shape: &[usize], dtype: DType) -> Result<ArrayView> {
        let expected: usize = shape.iter().product();
        if values.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                found: values.len(),
            });
        }
        let out = ArrayView::zeros(shape, dtype)?;
        let size = out.dtype.itemsize();
        let mut scratch = vec![0u8; size];
        for (i, v) in values.iter().enumerate() {
            v.encode(&out.dtype, &mut scratch)?;
            out.buffer.write(i * size, &scratch)?;
        }
        Ok(out)
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn strides(&self) -> &[isize] {
        &self.strides
    }

    pub fn ndim(&self) -> usize {
        self.shape.len()
    }

    /// Number of elements.
    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dtype(&self) -> &DType {
        &self.dtype
    }

    pub fn itemsize(&self) -> usize {
        self.dtype.itemsize()
    }

    pub fn nbytes(&self) -> usize {
        self.len() * self.itemsize()
    }

    pub fn flags(&self) -> Flags {
        self.flags
    }

    /// Byte offset of element `(0, ..., 0)` within the buffer.
    pub fn offset(&self) -> usize {
        self.offset
    }

    pub fn buffer(&self) -> &Arc<Buffer> {
        &self.buffer
    }

    pub fn shares_buffer(&self, other: &ArrayView) -> bool {
        Arc::ptr_eq(&self.buffer, &other.buffer)
    }

    pub fn header(&self) -> Header {
        Header {
            buffer_id: self.buffer.id(),
            offset: self.offset,
            shape: self.shape.clone(),
            strides: self.strides.clone(),
            dtype: self.dtype.clone(),
            flags: self.flags,
        }
    }

    pub fn recompute_flags(&mut self) -> Flags {
        let (c, f) = contiguity(&self.shape, &self.strides, self.dtype.itemsize());
        self.flags.c_contiguous = c;
        self.flags.f_contiguous = f;
        self.flags
    }

    pub(crate) fn set_writeable(&mut self, writeable: bool) {
        self.flags.writeable = writeable && !self.buffer.is_read_only();
    }

    /// A view with a different header over the same buffer.
    pub(crate) fn derive(
        &self,
        offset: usize,
        shape: Vec<usize>,
        strides: Vec<isize>,
        dtype: DType,
    ) -> ArrayView {
        let mut view = ArrayView {
            buffer: Arc::clone(&self.buffer),
            offset,
            shape,
            strides,
            dtype,
            flags: Flags {
                is_view: true,
                ..self.flags
            },
        };
        view.recompute_flags();
        debug_assert!(view.in_bounds(), "derived view escapes its buffer");
        view
    }

    fn in_bounds(&self) -> bool {
        let (lo, hi) = byte_span(&self.shape, &self.strides, self.itemsize());
        lo == hi
            || (self.offset as isize + lo >= 0
                && self.offset as isize + hi <= self.buffer.len() as isize)
    }

    pub fn element_offset(&self, idx: &[usize]) -> Result<usize> {
        if idx.len() != self.ndim() {
            return Err(Error::RankMismatch {
                expected: self.ndim(),
                found: idx.len(),
            });
        }
        let mut off = self.offset as isize;
        for (axis, ((&i, &n), &s)) in idx.iter().zip(&self.shape).zip(&self.strides).enumerate() {
            if i >= n {
                return Err(Error::IndexOutOfBounds {
                    axis,
                    index: i,
                    extent: n,
                });
            }
            off += i as isize * s;
        }
        Ok(off as usize)
    }

    pub fn get(&self, idx: &[usize]) -> Result<Value> {
        let off = self.element_offset(idx)?;
        let mut bytes = vec![0u8; self.itemsize()];
        self.buffer.read(off, &mut bytes);
        Ok(Value::decode(&self.dtype, &bytes))
    }

    pub fn set(&self, idx: &[usize], value: impl Into<Value>) -> Result<()> {
        if !self.flags.writeable {
            return Err(Error::ReadOnly);
        }
        let off = self.element_offset(idx)?;
        let mut bytes = vec![0u8; self.itemsize()];
        value.into().encode(&self.dtype, &mut bytes)?;
        self.buffer.write(off, &bytes)
    }

    /// Basic slicing. `spec` may cover fewer axes than the rank; the rest
    /// pass through whole.
    pub fn slice(&self, spec: &[SliceSpec]) -> Result<ArrayView> {
        if spec.len() > self.ndim() {
            return Err(Error::RankMismatch {
                expected: self.ndim(),
                found: spec.len(),
            });
        }
        let mut offset = self.offset as isize;
        let mut shape = self.shape.clone();
        let mut strides = self.strides.clone();
        for (axis, s) in spec.iter().enumerate() {
            if s.step == 0 {
                return Err(Error::ZeroStep(axis));
            }
            let (start, count) = s.resolve(self.shape[axis]);
            if count > 0 {
                offset += start * self.strides[axis];
            }
            shape[axis] = count;
            strides[axis] = self.strides[axis] * s.step;
        }
        Ok(self.derive(offset as usize, shape, strides, self.dtype.clone()))
    }

    /// Drops `axis` by fixing its index to `index`.
    pub fn index_axis(&self, axis: usize, index: usize) -> Result<ArrayView> {
        if axis >= self.ndim() {
            return Err(Error::AxisOutOfRange {
                axis,
                rank: self.ndim(),
            });
        }
        if index >= self.shape[axis] {
            return Err(Error::IndexOutOfBounds {
                axis,
                index,
                extent: self.shape[axis],
            });
        }
        let offset = (self.offset as isize + index as isize * self.strides[axis]) as usize;
        let mut shape = self.shape.clone();
        let mut strides = self.strides.clone();
        shape.remove(axis);
        strides.remove(axis);
        Ok(self.derive(offset, shape, strides, self.dtype.clone()))
    }

    /// Reverses the axis order.
    pub fn transpose(&self) -> ArrayView {
        let shape = self.shape.iter().rev().copied().collect();
        let strides = self.strides.iter().rev().copied().collect();
        self.derive(self.offset, shape, strides, self.dtype.clone())
    }

    /// Zero-copy on C-contiguous input; otherwise the elements are copied
    /// in C order and the result is a fresh array (`is_view == false`).
    pub fn reshape(&self, new_shape: &[usize]) -> Result<ArrayView> {
        let count: usize = new_shape.iter().product();
        if count != self.len() {
            return Err(Error::Reshape {
                from: self.shape.clone(),
                to: new_shape.to_vec(),
            });
        }
        let strides = contiguous_strides(new_shape, self.itemsize());
        if self.flags.c_contiguous {
            return Ok(self.derive(self.offset, new_shape.to_vec(), strides, self.dtype.clone()));
        }
        let copy = self.to_contiguous()?;
        ArrayView::from_parts(
            Arc::clone(&copy.buffer),
            0,
            new_shape.to_vec(),
            strides,
            self.dtype.clone(),
            false,
        )
    }

    /// Views the same bytes as a different element type. The last axis must
    /// be contiguous and its byte length divisible by the new item size.
    pub fn reinterpret(&self, new_dtype: DType) -> Result<ArrayView> {
        new_dtype.ensure_native()?;
        let err = |reason: String| Error::Reinterpret {
            dtype: new_dtype.to_string(),
            reason,
        };
        let old_size = self.itemsize();
        let new_size = new_dtype.itemsize();
        let last = self
            .ndim()
            .checked_sub(1)
            .ok_or_else(|| err("zero-rank arrays have no last axis".into()))?;
        if self.shape[last] > 1 && self.strides[last] != old_size as isize {
            return Err(err(format!(
                "last-axis stride {} is not the item size {old_size}",
                self.strides[last]
            )));
        }
        let last_bytes = self.shape[last] * old_size;
        if !last_bytes.is_multiple_of(new_size) {
            return Err(err(format!(
                "last axis spans {last_bytes} bytes, not a multiple of {new_size}"
            )));
        }
        let mut shape = self.shape.clone();
        let mut strides = self.strides.clone();
        shape[last] = last_bytes / new_size;
        strides[last] = new_size as isize;
        Ok(self.derive(self.offset, shape, strides, new_dtype))
    }

    /// Looks up a field of a structured array. The result steps over whole
    /// records, so its strides are unchanged.
    pub fn field(&self, name: &str) -> Result<ArrayView> {
        let (offset, dtype) = self.dtype.field(name)?;
        let dtype = dtype.clone();
        Ok(self.derive(
            self.offset + offset,
            self.shape.clone(),
            self.strides.clone(),
            dtype,
        ))
    }

    /// Assigns `source`'s elements (read in C order) to this array's
    /// elements in C order, converting between numeric types.
    pub fn fill_flat(&self, source: &ArrayView) -> Result<()> {
        if !self.flags.writeable {
            return Err(Error::ReadOnly);
        }
        if source.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                found: source.len(),
            });
        }
        let (dst_ty, src_ty) = match (self.dtype.scalar_type(), source.dtype.scalar_type()) {
            (Some(d), Some(s)) => (d, s),
            _ if self.dtype == source.dtype => {
                let bytes = source.to_bytes();
                let size = self.itemsize();
                let mut i = 0;
                walk(&self.shape, [self.offset as isize], [&self.strides], |[o]| {
                    // writeable checked above
                    let _ = self.buffer.write(o as usize, &bytes[i * size..(i + 1) * size]);
                    i += 1;
                });
                return Ok(());
            }
            _ => {
                return Err(Error::ValueMismatch {
                    value: source.dtype.to_string(),
                    dtype: self.dtype.to_string(),
                })
            }
        };
        let flat = source.to_contiguous_if_needed()?;
        let src = flat.buffer.as_ptr().wrapping_add(flat.offset);
        let src_size = src_ty.itemsize();
        let dst = self.buffer.as_ptr();
        dispatch_scalar!(dst_ty, T => {
            let load = loader::<T>(src_ty);
            let mut i = 0usize;
            walk(&self.shape, [self.offset as isize], [&self.strides], |[o]| {
                // SAFETY: i < len; `o` addresses an element of a writeable view.
                unsafe { load(src.add(i * src_size)).store(dst.offset(o)) };
                i += 1;
            });
        });
        Ok(())
    }

    /// Element bytes in C order.
    pub fn to_bytes(&self) -> Vec<u8> {
        let size = self.itemsize();
        if self.flags.c_contiguous {
            let mut out = vec![0u8; self.nbytes()];
            if !out.is_empty() {
                self.buffer.read(self.offset, &mut out);
            }
            return out;
        }
        let mut out = Vec::with_capacity(self.nbytes());
        let src = self.buffer.as_ptr();
        walk(&self.shape, [self.offset as isize], [&self.strides], |[o]| {
            // SAFETY: `o` addresses an element inside the buffer.
            out.extend_from_slice(unsafe {
                std::slice::from_raw_parts(src.offset(o), size)
            });
        });
        out
    }

    /// A fresh C-contiguous copy.
    pub fn to_contiguous(&self) -> Result<ArrayView> {
        let bytes = self.to_bytes();
        let buffer = Arc::new(Buffer::from_vec(bytes));
        let strides = contiguous_strides(&self.shape, self.itemsize());
        ArrayView::from_parts(buffer, 0, self.shape.clone(), strides, self.dtype.clone(), false)
    }

    fn to_contiguous_if_needed(&self) -> Result<ArrayView> {
        if self.flags.c_contiguous {
            Ok(self.clone())
        } else {
            self.to_contiguous()
        }
    }

    /// Elements in C order, converted to `T`.
    pub fn to_vec<T: Element>(&self) -> Vec<T> {
        let ty = self
            .dtype
            .scalar_type()
            .unwrap_or_else(|| panic!("to_vec on structured dtype {}", self.dtype));
        let load = loader::<T>(ty);
        let src = self.buffer.as_ptr();
        let mut out = Vec::with_capacity(self.len());
        walk(&self.shape, [self.offset as isize], [&self.strides], |[o]| {
            // SAFETY: `o` addresses an element inside the buffer.
            out.push(unsafe { load(src.offset(o)) });
        });
        out
    }

    /// Decoded elements in C order.
    pub fn values(&self) -> Vec<Value> {
        let size = self.itemsize();
        self.to_bytes()
            .chunks_exact(size.max(1))
            .take(self.len())
            .map(|b| Value::decode(&self.dtype, b))
            .collect()
    }

    pub(crate) fn base(&self) -> isize {
        self.offset as isize
    }

    pub(crate) fn raw_ptr(&self) -> *mut u8 {
        self.buffer.as_ptr()
    }
}

pub fn create(shape: &[usize], dtype: DType) -> Result<ArrayView> {
    ArrayView::zeros(shape, dtype)
}

pub fn arange(start: f64, stop: f64, step: f64, dtype: DType) -> Result<ArrayView> {
    ArrayView::arange(start, stop, step, dtype)
}

impl fmt::Debug for ArrayView {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ArrayView")
            .field("buffer", &self.buffer)
            .field("offset", &self.offset)
            .field("shape", &self.shape)
            .field("strides", &self.strides)
            .field("dtype", &self.dtype.to_string())
            .field("flags", &self.flags)
            .finish()
    }
}

impl fmt::Display for ArrayView {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn nested(
            f: &mut fmt::Formatter<'_>,
            shape: &[usize],
            values: &mut std::slice::Iter<'_, Value>,
        ) -> fmt::Result {
            match shape.split_first() {
                None => write!(f, "{}", values.next().expect("value count matches shape")),
                Some((&n, rest)) => {
                    f.write_str("[")?;
                    for i in 0..n {
                        if i > 0 {
                            f.write_str(", ")?;
                        }
                        nested(f, rest, values)?;
                    }
                    f.write_str("]")
                }
            }
        }
        let values = self.values();
        nested(f, &self.shape, &mut values.iter())
    }
}
