//! Element-wise kernels.
//!
//! Kernels iterate the broadcast output shape in C order. Broadcast
//! operands are never materialized: their expanded axes have stride 0, so
//! the same bytes are simply read again. Every kernel bumps the scalar
//! operation counter by the number of output elements it produced.

mod matmul;
mod promote;
mod select;

pub use matmul::dot;
pub use promote::{can_store, promote};
pub use select::{field_view, mask_select};

use crate::array::ArrayView;
use crate::broadcast::{aligned_strides, broadcast_shapes};
use crate::counters;
use crate::dtype::{DType, ScalarType};
use crate::element::{dispatch_scalar, loader, Element, Loader};
use crate::error::{Error, Result};
use crate::value::Scalar;
use crate::walk::walk;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    /// Integer division truncates toward zero.
    Div,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnaryOp {
    Square,
    /// Integer input produces float64 output. Negative input yields NaN.
    Sqrt,
    Neg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CompareOp {
    Ge,
    Gt,
    Le,
    Lt,
    Eq,
    Ne,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScalarSide {
    Left,
    Right,
}

/// Right-hand side of a kernel: an array or a zero-rank number.
#[derive(Clone, Copy, Debug)]
pub enum Operand<'a> {
    Array(&'a ArrayView),
    Scalar(Scalar),
}

impl<'a> From<&'a ArrayView> for Operand<'a> {
    fn from(v: &'a ArrayView) -> Self {
        Operand::Array(v)
    }
}

impl From<Scalar> for Operand<'_> {
    fn from(s: Scalar) -> Self {
        Operand::Scalar(s)
    }
}

impl From<i64> for Operand<'_> {
    fn from(v: i64) -> Self {
        Operand::Scalar(Scalar::Int(v))
    }
}

impl From<i32> for Operand<'_> {
    fn from(v: i32) -> Self {
        Operand::Scalar(Scalar::Int(v as i64))
    }
}

impl From<f64> for Operand<'_> {
    fn from(v: f64) -> Self {
        Operand::Scalar(Scalar::Float(v))
    }
}

fn numeric_type(v: &ArrayView) -> Result<ScalarType> {
    v.dtype()
        .scalar_type()
        .ok_or_else(|| Error::NonNumeric(v.dtype().to_string()))
}

impl Operand<'_> {
    fn shape(&self) -> &[usize] {
        match self {
            Operand::Array(v) => v.shape(),
            Operand::Scalar(_) => &[],
        }
    }

    fn array_type(&self) -> Result<Option<ScalarType>> {
        match self {
            Operand::Array(v) => numeric_type(v).map(Some),
            Operand::Scalar(_) => Ok(None),
        }
    }
}

/// Common computation type of two operands.
fn result_type(lhs: &Operand<'_>, rhs: &Operand<'_>) -> Result<ScalarType> {
    match (lhs.array_type()?, rhs.array_type()?) {
        (Some(a), Some(b)) => Ok(promote(a, b)),
        (Some(a), None) => Ok(scalar_type_against(rhs, a)),
        (None, Some(b)) => Ok(scalar_type_against(lhs, b)),
        (None, None) => {
            let resolve = |o: &Operand<'_>| match o {
                Operand::Scalar(Scalar::Int(_)) => ScalarType::Int64,
                _ => ScalarType::Float64,
            };
            Ok(promote(resolve(lhs), resolve(rhs)))
        }
    }
}

fn scalar_type_against(op: &Operand<'_>, array: ScalarType) -> ScalarType {
    match op {
        Operand::Scalar(s) => promote(array, s.resolve_with(array)),
        Operand::Array(_) => unreachable!(),
    }
}

/// A strided input converted to `T` on load.
struct Source<T> {
    ptr: *const u8,
    base: isize,
    strides: Vec<isize>,
    load: Loader<T>,
}

/// Scalars are staged in a small stack buffer and read through zero strides.
type ScalarSlot = [u8; 8];

fn source<T: Element>(op: &Operand<'_>, shape: &[usize], slot: &mut ScalarSlot) -> Source<T> {
    match op {
        Operand::Array(v) => Source {
            ptr: v.raw_ptr(),
            base: v.base(),
            strides: aligned_strides(v.shape(), v.strides(), shape),
            load: loader::<T>(numeric_type(v).expect("checked by result_type")),
        },
        Operand::Scalar(s) => {
            // SAFETY: every element type fits in 8 bytes.
            unsafe { s.get::<T>().store(slot.as_mut_ptr()) };
            Source {
                ptr: slot.as_ptr(),
                base: 0,
                strides: vec![0; shape.len()],
                load: loader::<T>(T::TYPE),
            }
        }
    }
}

/// Applies `f` over broadcast operands, writing `R` results through
/// `out_ptr`/`out_base`/`out_strides`. Returns false if `f` ever failed.
fn run_binary<T: Element, R: Element>(
    lhs: &Operand<'_>,
    rhs: &Operand<'_>,
    shape: &[usize],
    out_ptr: *mut u8,
    out_base: isize,
    out_strides: &[isize],
    f: impl Fn(T, T) -> Option<R>,
) -> bool {
    let (mut ls, mut rs) = ([0u8; 8], [0u8; 8]);
    let a = source::<T>(lhs, shape, &mut ls);
    let b = source::<T>(rhs, shape, &mut rs);
    let mut ok = true;
    walk(
        shape,
        [a.base, b.base, out_base],
        [&a.strides, &b.strides, out_strides],
        |[oa, ob, oo]| {
            // SAFETY: offsets come from in-bounds views (or the scalar slot)
            // walked over their own broadcast-aligned strides.
            unsafe {
                match f((a.load)(a.ptr.offset(oa)), (b.load)(b.ptr.offset(ob))) {
                    Some(r) => r.store(out_ptr.offset(oo)),
                    None => ok = false,
                }
            }
        },
    );
    ok
}

fn apply<T: Element>(op: BinaryOp) -> impl Fn(T, T) -> Option<T> {
    move |x, y| match op {
        BinaryOp::Add => Some(x.add(y)),
        BinaryOp::Sub => Some(x.sub(y)),
        BinaryOp::Mul => Some(x.mul(y)),
        BinaryOp::Div => x.div(y),
    }
}

fn binary(op: BinaryOp, lhs: Operand<'_>, rhs: Operand<'_>) -> Result<ArrayView> {
    let ty = result_type(&lhs, &rhs)?;
    if ty == ScalarType::Bool {
        return Err(Error::NonNumeric("bool".into()));
    }
    let shape = broadcast_shapes(lhs.shape(), rhs.shape())?;
    let out = ArrayView::zeros(&shape, DType::scalar(ty))?;
    let ok = dispatch_scalar!(ty, T => run_binary::<T, T>(
        &lhs, &rhs, &shape, out.raw_ptr(), 0, out.strides(), apply::<T>(op),
    ));
    counters::record_ops(out.len());
    if !ok {
        return Err(Error::DivideByZero);
    }
    Ok(out)
}

/// `a op b` with broadcasting, into a fresh array of the promoted type.
pub fn elementwise_binary(op: BinaryOp, a: &ArrayView, b: &ArrayView) -> Result<ArrayView> {
    binary(op, Operand::Array(a), Operand::Array(b))
}

/// `a op s` (or `s op a` for [`ScalarSide::Left`]). A scalar that does not
/// fit the array's type promotes the result instead of being truncated.
pub fn scalar_binary(
    op: BinaryOp,
    a: &ArrayView,
    s: impl Into<Scalar>,
    side: ScalarSide,
) -> Result<ArrayView> {
    let s = Operand::Scalar(s.into());
    match side {
        ScalarSide::Right => binary(op, Operand::Array(a), s),
        ScalarSide::Left => binary(op, s, Operand::Array(a)),
    }
}

pub fn elementwise_unary(op: UnaryOp, a: &ArrayView) -> Result<ArrayView> {
    let src_ty = numeric_type(a)?;
    if src_ty == ScalarType::Bool {
        return Err(Error::NonNumeric("bool".into()));
    }
    let out_ty = match op {
        UnaryOp::Sqrt if !src_ty.is_float() => ScalarType::Float64,
        _ => src_ty,
    };
    let out = ArrayView::zeros(a.shape(), DType::scalar(out_ty))?;
    let dst = out.raw_ptr();
    let src = a.raw_ptr();
    dispatch_scalar!(out_ty, T => {
        let load = loader::<T>(src_ty);
        let f = move |x: T| -> T {
            match op {
                UnaryOp::Square => x.mul(x),
                UnaryOp::Neg => x.neg(),
                UnaryOp::Sqrt => T::from_f64(x.to_f64().sqrt()),
            }
        };
        walk(a.shape(), [a.base(), 0], [a.strides(), out.strides()], |[i, o]| {
            // SAFETY: in-bounds offsets of `a` and the fresh output.
            unsafe { f(load(src.offset(i))).store(dst.offset(o)) }
        });
    });
    counters::record_ops(out.len());
    Ok(out)
}

/// `target op= operand`. The operand must broadcast to the target's shape
/// without expanding it, and no new buffer is allocated.
///
/// Aliasing between `target` and `operand` through different strides is
/// not detected; results are then unspecified.
pub fn elementwise_binary_inplace<'a>(
    op: BinaryOp,
    target: &ArrayView,
    operand: impl Into<Operand<'a>>,
) -> Result<()> {
    let operand = operand.into();
    if !target.flags().writeable {
        return Err(Error::ReadOnly);
    }
    let ty = numeric_type(target)?;
    if let Some(axis) = target
        .shape()
        .iter()
        .zip(target.strides())
        .position(|(&n, &s)| n > 1 && s == 0)
    {
        return Err(Error::InplaceZeroStride(axis));
    }
    let shape = broadcast_shapes(target.shape(), operand.shape())?;
    if shape != target.shape() {
        return Err(Error::InplaceShape {
            target: target.shape().to_vec(),
            operand: operand.shape().to_vec(),
        });
    }
    let computed = result_type(&Operand::Array(target), &operand)?;
    if !can_store(computed, ty) {
        return Err(Error::Casting {
            from: computed.name().into(),
            to: ty.name().into(),
        });
    }
    if ty == ScalarType::Bool {
        return Err(Error::NonNumeric("bool".into()));
    }
    let ok = dispatch_scalar!(ty, T => run_binary::<T, T>(
        &Operand::Array(target), &operand, &shape,
        target.raw_ptr(), target.base(), target.strides(), apply::<T>(op),
    ));
    counters::record_ops(target.len());
    if !ok {
        return Err(Error::DivideByZero);
    }
    Ok(())
}

/// Element-wise comparison producing a bool array.
pub fn compare<'a>(op: CompareOp, a: &ArrayView, b: impl Into<Operand<'a>>) -> Result<ArrayView> {
    let lhs = Operand::Array(a);
    let rhs = b.into();
    let ty = result_type(&lhs, &rhs)?;
    let shape = broadcast_shapes(lhs.shape(), rhs.shape())?;
    let out = ArrayView::zeros(&shape, DType::bool())?;
    dispatch_scalar!(ty, T => {
        // also instantiated with T = bool
        #[allow(clippy::bool_comparison)]
        let f = move |x: T, y: T| -> Option<bool> {
            Some(match op {
                CompareOp::Ge => x >= y,
                CompareOp::Gt => x > y,
                CompareOp::Le => x <= y,
                CompareOp::Lt => x < y,
                CompareOp::Eq => x == y,
                CompareOp::Ne => x != y,
            })
        };
        run_binary::<T, bool>(&lhs, &rhs, &shape, out.raw_ptr(), 0, out.strides(), f);
    });
    counters::record_ops(out.len());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::broadcast::broadcast_view;
    use crate::counters::CounterSession;

    fn ints(v: &[i64]) -> ArrayView {
        ArrayView::from_slice(v)
    }

    #[test]
    fn binary_examples() {
        let b = ints(&[3, 9, 15]);
        let a = ints(&[1, 3, 5]);
        assert_eq!(elementwise_binary(BinaryOp::Sub, &b, &a).unwrap().to_vec::<i64>(), vec![2, 6, 10]);
        let m = ArrayView::arange(0.0, 6.0, 1.0, DType::int64()).unwrap().reshape(&[2, 3]).unwrap();
        let s = elementwise_binary(BinaryOp::Add, &b, &m).unwrap();
        assert_eq!(s.shape(), &[2, 3]);
        assert_eq!(s.to_vec::<i64>(), vec![3, 10, 17, 6, 13, 20]);
        let z = ArrayView::zeros(&[3], DType::int64()).unwrap();
        assert_eq!(elementwise_binary(BinaryOp::Add, &a, &z).unwrap().to_vec::<i64>(), a.to_vec::<i64>());
    }

    #[test]
    fn scalar_examples() {
        let a = ints(&[1, 3, 5]);
        let b = scalar_binary(BinaryOp::Mul, &a, 3, ScalarSide::Left).unwrap();
        assert_eq!(b.to_vec::<i64>(), vec![3, 9, 15]);
        assert_eq!(b.dtype(), &DType::int64());
        assert_eq!(scalar_binary(BinaryOp::Add, &a, 0, ScalarSide::Right).unwrap().to_vec::<i64>(), vec![1, 3, 5]);
        let h = scalar_binary(BinaryOp::Mul, &ints(&[1, 2]), 0.5, ScalarSide::Right).unwrap();
        assert_eq!(h.dtype(), &DType::float64());
        assert_eq!(h.to_vec::<f64>(), vec![0.5, 1.0]);
        let left = scalar_binary(BinaryOp::Sub, &a, 10, ScalarSide::Left).unwrap();
        assert_eq!(left.to_vec::<i64>(), vec![9, 7, 5]);
    }

    #[test]
    fn unary_examples() {
        let x = ints(&[0, 2, 4, 6, 8]);
        assert_eq!(elementwise_unary(UnaryOp::Square, &x).unwrap().to_vec::<i64>(), vec![0, 4, 16, 36, 64]);
        let r = elementwise_unary(UnaryOp::Sqrt, &ints(&[0, 1, 4])).unwrap();
        assert_eq!(r.dtype(), &DType::float64());
        assert_eq!(r.to_vec::<f64>(), vec![0.0, 1.0, 2.0]);
        let nn = elementwise_unary(UnaryOp::Neg, &elementwise_unary(UnaryOp::Neg, &x).unwrap()).unwrap();
        assert_eq!(nn.to_vec::<i64>(), x.to_vec::<i64>());
        assert!(elementwise_unary(UnaryOp::Sqrt, &ints(&[-1])).unwrap().to_vec::<f64>()[0].is_nan());
    }

    #[test]
    fn integer_division() {
        let q = elementwise_binary(BinaryOp::Div, &ints(&[7, -7]), &ints(&[2, 2])).unwrap();
        assert_eq!(q.to_vec::<i64>(), vec![3, -3]);
        assert!(matches!(
            elementwise_binary(BinaryOp::Div, &ints(&[1]), &ints(&[0])),
            Err(Error::DivideByZero)
        ));
        let f = ArrayView::from_slice(&[1.0f64, -1.0, 0.0]);
        let z = ArrayView::from_slice(&[0.0f64, 0.0, 0.0]);
        let r = elementwise_binary(BinaryOp::Div, &f, &z).unwrap().to_vec::<f64>();
        assert_eq!(r[0], f64::INFINITY);
        assert_eq!(r[1], f64::NEG_INFINITY);
        assert!(r[2].is_nan());
    }

    #[test]
    fn inplace_evaluation() {
        let x = ints(&[0, 1, 2]);
        let fx = elementwise_unary(UnaryOp::Square, &x).unwrap();
        let three_x = scalar_binary(BinaryOp::Mul, &x, 3, ScalarSide::Left).unwrap();
        let s = CounterSession::start();
        elementwise_binary_inplace(BinaryOp::Sub, &fx, &three_x).unwrap();
        elementwise_binary_inplace(BinaryOp::Add, &fx, 4).unwrap();
        assert_eq!(s.report().buffers_allocated, 0);
        assert_eq!(s.report().scalar_ops, 6);
        assert_eq!(fx.to_vec::<i64>(), vec![4, 2, 2]);
    }

    #[test]
    fn inplace_row_slice() {
        let b = ArrayView::arange(0.0, 12.0, 1.0, DType::int64()).unwrap().reshape(&[3, 4]).unwrap();
        let row = b.index_axis(0, 1).unwrap();
        elementwise_binary_inplace(BinaryOp::Mul, &row, 2).unwrap();
        assert_eq!(b.to_vec::<i64>(), vec![0, 1, 2, 3, 8, 10, 12, 14, 8, 9, 10, 11]);
    }

    #[test]
    fn inplace_rejections() {
        let v = ints(&[1, 2, 3]);
        let b = broadcast_view(&v, &[2, 3]).unwrap();
        assert!(matches!(elementwise_binary_inplace(BinaryOp::Add, &b, 1), Err(Error::ReadOnly)));
        let m = ArrayView::zeros(&[2, 3], DType::int64()).unwrap();
        assert!(matches!(
            elementwise_binary_inplace(BinaryOp::Add, &v, &m),
            Err(Error::InplaceShape { .. })
        ));
        assert!(matches!(
            elementwise_binary_inplace(BinaryOp::Add, &v, 0.5),
            Err(Error::Casting { .. })
        ));
        // a zero stride on an extent-1 axis aliases nothing
        let col = crate::broadcast::newaxis_view(&v, 1).unwrap();
        assert!(elementwise_binary_inplace(BinaryOp::Add, &col, 1).is_ok());
    }

    #[test]
    fn inplace_on_bytes_keeps_type() {
        let bytes = ArrayView::from_slice(&[97u8, 98, 99, 100, 101]);
        elementwise_binary_inplace(BinaryOp::Add, &bytes, 2).unwrap();
        assert_eq!(bytes.to_vec::<u8>(), b"cdefg".to_vec());
    }

    #[test]
    fn compare_examples() {
        let t = ArrayView::from_slice(&[1u64, 2, 3]);
        let m = compare(CompareOp::Ge, &t, 2).unwrap();
        assert_eq!(m.dtype(), &DType::bool());
        assert_eq!(m.to_vec::<bool>(), vec![false, true, true]);
        assert_eq!(m.to_string(), "[False, True, True]");
        assert!(compare(CompareOp::Eq, &t, &t).unwrap().to_vec::<bool>().iter().all(|&b| b));
        assert!(matches!(
            compare(CompareOp::Ge, &ints(&[1, 2, 3]), &ints(&[1, 2, 3, 4])),
            Err(Error::Broadcast { .. })
        ));
    }

    #[test]
    fn op_counts_match_output_size() {
        let a = ArrayView::zeros(&[4, 1], DType::float64()).unwrap();
        let b = ArrayView::zeros(&[3], DType::float64()).unwrap();
        let s = CounterSession::start();
        let c = elementwise_binary(BinaryOp::Add, &a, &b).unwrap();
        let r = s.report();
        assert_eq!(r.scalar_ops, 12);
        assert_eq!(r.buffers_allocated, 1);
        assert_eq!(r.bytes_allocated, c.nbytes() as u64);
    }

    #[test]
    fn mixed_types_promote() {
        let a = ArrayView::from_slice(&[200u8]);
        let b = ArrayView::from_slice(&[-1i8]);
        let c = elementwise_binary(BinaryOp::Add, &a, &b).unwrap();
        assert_eq!(c.dtype(), &DType::scalar(ScalarType::Int16));
        assert_eq!(c.to_vec::<i64>(), vec![199]);
    }

    #[test]
    fn bool_arithmetic_is_rejected() {
        let m = ArrayView::from_slice(&[true, false]);
        assert!(matches!(
            elementwise_binary(BinaryOp::Add, &m, &m),
            Err(Error::NonNumeric(_))
        ));
        let i = ints(&[1, 2]);
        assert_eq!(elementwise_binary(BinaryOp::Add, &m, &i).unwrap().to_vec::<i64>(), vec![2, 2]);
    }
}
