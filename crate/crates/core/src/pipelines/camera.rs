use crate::array::ArrayView;
use crate::broadcast::newaxis_view;
use crate::dtype::DType;
use crate::error::{Error, Result};
use crate::kernels::{dot, elementwise_binary, BinaryOp};

/// Projects `n×3` points through a `3×3` camera matrix and divides each
/// row by its third component, giving homogeneous pixel coordinates.
pub fn project_points(points: &ArrayView, camera: &ArrayView) -> Result<ArrayView> {
    if points.ndim() != 2 || points.shape()[1] != 3 {
        return Err(Error::Shape(format!("points must be n×3, got {:?}", points.shape())));
    }
    if camera.shape() != [3, 3] {
        return Err(Error::Shape(format!("camera must be 3×3, got {:?}", camera.shape())));
    }
    let vecs = dot(camera, &points.transpose())?.transpose();
    let depth = vecs.index_axis(1, 2)?;
    if let Some(row) = depth.to_vec::<f64>().iter().position(|&z| z == 0.0) {
        return Err(Error::ZeroDepth(row));
    }
    let column = newaxis_view(&depth, 1)?;
    let out = elementwise_binary(BinaryOp::Div, &vecs, &column)?;
    debug_assert_eq!(out.dtype(), &DType::float64());
    Ok(out)
}
