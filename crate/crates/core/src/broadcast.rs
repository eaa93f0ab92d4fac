//! Shape compatibility and zero-stride expansion.
//!
//! Shapes are aligned on their trailing axes. Two extents are compatible
//! when they are equal or one of them is 1; a missing leading axis behaves
//! like an extent of 1. Expanded axes get stride 0 so the same bytes are
//! read for every position along them.

use crate::array::ArrayView;
use crate::error::{Error, Result};

pub fn broadcast_shapes(a: &[usize], b: &[usize]) -> Result<Vec<usize>> {
    let rank = a.len().max(b.len());
    let mut out = vec![0usize; rank];
    for (axis, slot) in out.iter_mut().enumerate() {
        let pick = |s: &[usize]| {
            (axis + s.len())
                .checked_sub(rank)
                .map(|i| s[i])
                .unwrap_or(1)
        };
        let (x, y) = (pick(a), pick(b));
        *slot = match (x, y) {
            _ if x == y => x,
            (1, _) => y,
            (_, 1) => x,
            _ => {
                return Err(Error::Broadcast {
                    axis,
                    left: x,
                    right: y,
                })
            }
        };
    }
    Ok(out)
}

/// Strides that read an array of `shape`/`strides` as if it had
/// `target` shape. The caller guarantees compatibility.
pub(crate) fn aligned_strides(shape: &[usize], strides: &[isize], target: &[usize]) -> Vec<isize> {
    let lead = target.len() - shape.len();
    (0..target.len())
        .map(|axis| match axis.checked_sub(lead) {
            Some(i) if shape[i] == target[axis] => strides[i],
            _ => 0,
        })
        .collect()
}

/// Output shape and per-operand aligned strides for a set of operands.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BroadcastPlan {
    pub output_shape: Vec<usize>,
    pub operand_strides: Vec<Vec<isize>>,
}

impl BroadcastPlan {
    pub fn new(operands: &[&ArrayView]) -> Result<BroadcastPlan> {
        let output_shape = operands
            .iter()
            .try_fold(Vec::new(), |acc, v| broadcast_shapes(&acc, v.shape()))?;
        let operand_strides = operands
            .iter()
            .map(|v| aligned_strides(v.shape(), v.strides(), &output_shape))
            .collect();
        Ok(BroadcastPlan {
            output_shape,
            operand_strides,
        })
    }
}

/// A read-only view of `v` expanded to `target`.
pub fn broadcast_view(v: &ArrayView, target: &[usize]) -> Result<ArrayView> {
    let out = broadcast_shapes(v.shape(), target)?;
    if out != target {
        // `target` itself would have to grow to accommodate `v`
        let lead_t = out.len() - target.len();
        let lead_v = out.len() - v.ndim();
        let axis = (0..out.len())
            .find(|&a| a < lead_t || out[a] != target[a - lead_t])
            .unwrap_or(0);
        let left = axis.checked_sub(lead_v).map(|i| v.shape()[i]).unwrap_or(1);
        let right = axis.checked_sub(lead_t).map(|i| target[i]).unwrap_or(1);
        return Err(Error::Broadcast { axis, left, right });
    }
    let strides = aligned_strides(v.shape(), v.strides(), target);
    let mut view = v.derive(v.offset(), target.to_vec(), strides, v.dtype().clone());
    view.set_writeable(false);
    Ok(view)
}

/// Inserts an extent-1, stride-0 axis before position `axis`.
pub fn newaxis_view(v: &ArrayView, axis: usize) -> Result<ArrayView> {
    if axis > v.ndim() {
        return Err(Error::AxisOutOfRange {
            axis,
            rank: v.ndim(),
        });
    }
    let mut shape = v.shape().to_vec();
    let mut strides = v.strides().to_vec();
    shape.insert(axis, 1);
    strides.insert(axis, 0);
    Ok(v.derive(v.offset(), shape, strides, v.dtype().clone()))
}
