use crate::array::{ArrayView, SliceSpec};
use crate::error::{Error, Result};
use crate::kernels::{elementwise_binary, BinaryOp};

fn check(x: &ArrayView, y: &ArrayView, min: usize) -> Result<()> {
    if x.ndim() != 1 || y.ndim() != 1 {
        return Err(Error::Shape("finite differences need 1-D inputs".into()));
    }
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    if x.len() < min {
        return Err(Error::InvalidArgument(format!(
            "need at least {min} samples, got {}",
            x.len()
        )));
    }
    Ok(())
}

/// `(v[shift:] - v[:-shift])` built from two zero-copy slices.
fn shifted_difference(v: &ArrayView, shift: isize) -> Result<ArrayView> {
    let upper = v.slice(&[(shift..).into()])?;
    let lower = v.slice(&[SliceSpec::from(..-shift)])?;
    elementwise_binary(BinaryOp::Sub, &upper, &lower)
}

/// Forward divided differences `(y[1:] - y[:-1]) / (x[1:] - x[:-1])`.
pub fn forward_diff(x: &ArrayView, y: &ArrayView) -> Result<ArrayView> {
    check(x, y, 2)?;
    let dy = shifted_difference(y, 1)?;
    let dx = shifted_difference(x, 1)?;
    elementwise_binary(BinaryOp::Div, &dy, &dx)
}

/// Central divided differences `(y[2:] - y[:-2]) / (x[2:] - x[:-2])`.
pub fn central_diff(x: &ArrayView, y: &ArrayView) -> Result<ArrayView> {
    check(x, y, 3)?;
    let dy = shifted_difference(y, 2)?;
    let dx = shifted_difference(x, 2)?;
    elementwise_binary(BinaryOp::Div, &dy, &dx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dtype::DType;
    use crate::kernels::{elementwise_unary, UnaryOp};

    fn samples() -> (ArrayView, ArrayView) {
        let x = ArrayView::arange(0.0, 10.0, 2.0, DType::int64()).unwrap();
        let y = elementwise_unary(UnaryOp::Square, &x).unwrap();
        (x, y)
    }

    #[test]
    fn forward_of_squares() {
        let (x, y) = samples();
        assert_eq!(y.to_vec::<i64>(), vec![0, 4, 16, 36, 64]);
        assert_eq!(forward_diff(&x, &y).unwrap().to_vec::<i64>(), vec![2, 6, 10, 14]);
    }

    #[test]
    fn central_of_squares() {
        let (x, y) = samples();
        assert_eq!(central_diff(&x, &y).unwrap().to_vec::<i64>(), vec![4, 8, 12]);
    }

    #[test]
    fn six_samples_give_printed_arrays() {
        let x = ArrayView::arange(0.0, 12.0, 2.0, DType::int64()).unwrap();
        let y = elementwise_unary(UnaryOp::Square, &x).unwrap();
        assert_eq!(forward_diff(&x, &y).unwrap().to_vec::<i64>(), vec![2, 6, 10, 14, 18]);
        assert_eq!(central_diff(&x, &y).unwrap().to_vec::<i64>(), vec![4, 8, 12, 16]);
    }

    #[test]
    fn constant_and_linear() {
        let x = ArrayView::from_slice(&[0.0, 0.5, 1.5, 2.0]);
        let c = ArrayView::from_slice(&[3.0; 4]);
        assert!(forward_diff(&x, &c).unwrap().to_vec::<f64>().iter().all(|&d| d == 0.0));
        let lin = ArrayView::from_slice(&[0.0, 1.0, 3.0, 4.0]);
        assert!(central_diff(&x, &lin).unwrap().to_vec::<f64>().iter().all(|&d| d == 2.0));
    }

    #[test]
    fn too_short() {
        let one = ArrayView::from_slice(&[1i64]);
        assert!(forward_diff(&one, &one).is_err());
        let two = ArrayView::from_slice(&[1i64, 2]);
        assert!(central_diff(&two, &two).is_err());
        assert!(forward_diff(&two, &one).is_err());
    }
}
