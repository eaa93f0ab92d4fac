use crate::array::ArrayView;
use crate::counters;
use crate::dtype::DType;
use crate::element::{loader, Element};
use crate::error::{Error, Result};

/// Rows, columns and strides of a rank-1 or rank-2 operand viewed as a
/// matrix. A vector on the left is a row; on the right, a column.
fn as_matrix(v: &ArrayView, left: bool) -> Result<(usize, usize, isize, isize)> {
    match (v.shape(), v.strides()) {
        (&[n], &[s]) if left => Ok((1, n, 0, s)),
        (&[n], &[s]) => Ok((n, 1, s, 0)),
        (&[r, c], &[rs, cs]) => Ok((r, c, rs, cs)),
        _ => Err(Error::Shape(format!(
            "dot expects 1-D or 2-D operands, got shape {:?}",
            v.shape()
        ))),
    }
}

/// Matrix product by the plain triple loop, accumulated in float64.
///
/// 1-D operands follow the usual convention and the corresponding axis is
/// dropped from the result. Counts two scalar operations (multiply and add)
/// per inner-loop step.
pub fn dot(a: &ArrayView, b: &ArrayView) -> Result<ArrayView> {
    let (m, k, ars, acs) = as_matrix(a, true)?;
    let (k2, n, brs, bcs) = as_matrix(b, false)?;
    if k != k2 {
        return Err(Error::Shape(format!(
            "dot inner dimensions differ: {:?} and {:?}",
            a.shape(),
            b.shape()
        )));
    }
    let ta = a
        .dtype()
        .scalar_type()
        .ok_or_else(|| Error::NonNumeric(a.dtype().to_string()))?;
    let tb = b
        .dtype()
        .scalar_type()
        .ok_or_else(|| Error::NonNumeric(b.dtype().to_string()))?;
    let mut shape = Vec::with_capacity(2);
    if a.ndim() == 2 {
        shape.push(m);
    }
    if b.ndim() == 2 {
        shape.push(n);
    }
    let out = ArrayView::zeros(&shape, DType::float64())?;
    let (la, lb) = (loader::<f64>(ta), loader::<f64>(tb));
    let (pa, pb, po) = (a.raw_ptr(), b.raw_ptr(), out.raw_ptr());
    let (base_a, base_b) = (a.base(), b.base());
    for i in 0..m {
        for j in 0..n {
            let mut acc = 0.0f64;
            for p in 0..k {
                // SAFETY: i < m, j < n, p < k index in-bounds elements.
                let (x, y) = unsafe {
                    (
                        la(pa.offset(base_a + i as isize * ars + p as isize * acs)),
                        lb(pb.offset(base_b + p as isize * brs + j as isize * bcs)),
                    )
                };
                acc += x * y;
            }
            // SAFETY: the output is a fresh m×n (or reduced) contiguous array.
            unsafe { acc.store(po.add((i * n + j) * 8)) };
        }
    }
    counters::record_ops(2 * m * n * k);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counters::CounterSession;

    fn matrix(rows: &[&[f64]]) -> ArrayView {
        let data: Vec<f64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        ArrayView::from_vec(data, &[rows.len(), rows[0].len()]).unwrap()
    }

    #[test]
    fn identity_times_vector() {
        let eye = matrix(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]);
        let v = ArrayView::from_slice(&[3.5, -2.0, 7.25]);
        let r = dot(&eye, &v).unwrap();
        assert_eq!(r.shape(), &[3]);
        assert_eq!(r.to_vec::<f64>(), vec![3.5, -2.0, 7.25]);
    }

    #[test]
    fn camera_maps_principal_point() {
        let camera = matrix(&[&[500.0, 0.0, 320.0], &[0.0, 500.0, 240.0], &[0.0, 0.0, 1.0]]);
        let p = matrix(&[&[0.0], &[0.0], &[1.0]]);
        let r = dot(&camera, &p).unwrap();
        assert_eq!(r.shape(), &[3, 1]);
        assert_eq!(r.to_vec::<f64>(), vec![320.0, 240.0, 1.0]);
    }

    #[test]
    fn counts_two_ops_per_step() {
        let a = ArrayView::zeros(&[5, 4], DType::float64()).unwrap();
        let b = ArrayView::zeros(&[4, 3], DType::int64()).unwrap();
        let s = CounterSession::start();
        let c = dot(&a, &b).unwrap();
        assert_eq!(c.shape(), &[5, 3]);
        assert_eq!(s.report().scalar_ops, 2 * 5 * 3 * 4);
    }

    #[test]
    fn vector_dot_vector_is_rank_zero() {
        let v = ArrayView::from_slice(&[1.0, 2.0, 3.0]);
        let r = dot(&v, &v).unwrap();
        assert!(r.shape().is_empty());
        assert_eq!(r.to_vec::<f64>(), vec![14.0]);
    }

    #[test]
    fn mismatched_inner_dimension() {
        let a = ArrayView::zeros(&[2, 3], DType::float64()).unwrap();
        let b = ArrayView::zeros(&[2, 3], DType::float64()).unwrap();
        assert!(matches!(dot(&a, &b), Err(Error::Shape(_))));
        let c = ArrayView::zeros(&[2, 3, 1], DType::float64()).unwrap();
        assert!(dot(&c, &b).is_err());
    }

    #[test]
    fn works_on_transposed_views() {
        let a = matrix(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let r = dot(&a.transpose(), &a).unwrap();
        assert_eq!(r.to_vec::<f64>(), vec![10.0, 14.0, 14.0, 20.0]);
    }
}
