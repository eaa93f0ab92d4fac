use std::sync::Arc;

use crate::array::{contiguous_strides, ArrayView};
use crate::buffer::Buffer;
use crate::dtype::ScalarType;
use crate::error::{Error, Result};

/// Copies the rows (first-axis entries) of `a` where `mask` is true.
pub fn mask_select(a: &ArrayView, mask: &ArrayView) -> Result<ArrayView> {
    if mask.dtype().scalar_type() != Some(ScalarType::Bool) || mask.ndim() != 1 {
        return Err(Error::Shape(format!(
            "mask must be a 1-D bool array, got {} of shape {:?}",
            mask.dtype(),
            mask.shape()
        )));
    }
    let rows = *a
        .shape()
        .first()
        .ok_or_else(|| Error::Shape("cannot mask a zero-rank array".into()))?;
    if mask.len() != rows {
        return Err(Error::LengthMismatch {
            expected: rows,
            found: mask.len(),
        });
    }
    let keep: Vec<usize> = mask
        .to_vec::<bool>()
        .into_iter()
        .enumerate()
        .filter_map(|(i, m)| m.then_some(i))
        .collect();
    let row_bytes = a.shape()[1..].iter().product::<usize>() * a.itemsize();
    let mut bytes = Vec::with_capacity(keep.len() * row_bytes);
    for &i in &keep {
        bytes.extend(a.index_axis(0, i)?.to_bytes());
    }
    let mut shape = a.shape().to_vec();
    shape[0] = keep.len();
    let strides = contiguous_strides(&shape, a.itemsize());
    ArrayView::from_parts(
        Arc::new(Buffer::from_vec(bytes)),
        0,
        shape,
        strides,
        a.dtype().clone(),
        false,
    )
}

/// Zero-copy view of one field of a structured array.
pub fn field_view(a: &ArrayView, name: &str) -> Result<ArrayView> {
    a.field(name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dtype::{struct_dtype, DType, FieldSpec};
    use crate::kernels::{compare, CompareOp};
    use crate::value::Value;

    fn records() -> ArrayView {
        let dt = struct_dtype([
            ("time", FieldSpec::from(ScalarType::UInt64)),
            (
                "pos",
                FieldSpec::Nested(vec![
                    ("x".into(), ScalarType::Float64.into()),
                    ("y".into(), ScalarType::Float64.into()),
                ]),
            ),
        ])
        .unwrap();
        let rec = |t: u64, x: f64, y: f64| {
            Value::Record(vec![
                ("time".into(), Value::UInt(t)),
                ("pos".into(), Value::Record(vec![("x".into(), Value::Float(x)), ("y".into(), Value::Float(y))])),
            ])
        };
        ArrayView::from_values(&[rec(1, 0.0, 0.5), rec(2, 0.0, 10.3), rec(3, 5.5, 1.1)], &[3], dt).unwrap()
    }

    #[test]
    fn field_views_step_whole_records() {
        let x = records();
        let t = field_view(&x, "time").unwrap();
        assert_eq!(t.strides(), &[24]);
        assert_eq!(t.dtype(), &DType::uint64());
        assert_eq!(t.to_vec::<u64>(), vec![1, 2, 3]);
        let px = field_view(&field_view(&x, "pos").unwrap(), "x").unwrap();
        assert_eq!(px.offset(), 8);
        assert_eq!(px.to_vec::<f64>(), vec![0.0, 0.0, 5.5]);
        assert!(matches!(field_view(&x, "z"), Err(Error::FieldNotFound { .. })));
    }

    #[test]
    fn masked_positions() {
        let x = records();
        let times = compare(CompareOp::Ge, &field_view(&x, "time").unwrap(), 2).unwrap();
        assert_eq!(times.to_vec::<bool>(), vec![false, true, true]);
        let sel = mask_select(&x, &times).unwrap();
        assert_eq!(sel.len(), 2);
        let px = sel.field("pos").unwrap().field("x").unwrap();
        assert_eq!(px.to_vec::<f64>(), vec![0.0, 5.5]);
    }

    #[test]
    fn all_false_and_bad_masks() {
        let x = records();
        let none = ArrayView::from_slice(&[false, false, false]);
        assert!(mask_select(&x, &none).unwrap().is_empty());
        let short = ArrayView::from_slice(&[true, false]);
        assert!(matches!(mask_select(&x, &short), Err(Error::LengthMismatch { .. })));
        let not_bool = ArrayView::from_slice(&[1i64, 0, 1]);
        assert!(mask_select(&x, &not_bool).is_err());
    }

    #[test]
    fn selects_matrix_rows() {
        let m = ArrayView::arange(0.0, 6.0, 1.0, DType::int64()).unwrap().reshape(&[3, 2]).unwrap();
        let r = mask_select(&m, &ArrayView::from_slice(&[true, false, true])).unwrap();
        assert_eq!(r.shape(), &[2, 2]);
        assert_eq!(r.to_vec::<i64>(), vec![0, 1, 4, 5]);
    }
}
