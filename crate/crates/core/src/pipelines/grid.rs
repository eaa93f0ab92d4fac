use std::fmt;
use std::str::FromStr;

use crate::array::ArrayView;
use crate::counters::CounterSession;
use crate::dtype::DType;
use crate::element::Element;
use crate::error::{Error, Result};
use crate::kernels::{elementwise_binary, elementwise_unary, BinaryOp, UnaryOp};

fn check_ranges(ranges: &[(i64, i64)]) -> Result<()> {
    if ranges.is_empty() {
        return Err(Error::InvalidArgument("grid needs at least one range".into()));
    }
    if let Some(&(a, b)) = ranges.iter().find(|(a, b)| b <= a) {
        return Err(Error::InvalidArgument(format!("empty grid range {a}..{b}")));
    }
    Ok(())
}

/// Dense coordinate grids: array `k` has the full grid shape and varies
/// along axis `k` only. Every array is materialized.
pub fn mgrid(ranges: &[(i64, i64)]) -> Result<Vec<ArrayView>> {
    check_ranges(ranges)?;
    let shape: Vec<usize> = ranges.iter().map(|&(a, b)| (b - a) as usize).collect();
    ranges
        .iter()
        .enumerate()
        .map(|(axis, &(start, _))| {
            let out = ArrayView::zeros(&shape, DType::int64())?;
            // extent of the block over which the axis coordinate is constant
            let inner: usize = shape[axis + 1..].iter().product();
            let n = shape[axis];
            let ptr = out.raw_ptr();
            for i in 0..out.len() {
                let coord = start + ((i / inner) % n) as i64;
                // SAFETY: fresh contiguous int64 buffer of out.len() elements.
                unsafe { coord.store(ptr.add(i * 8)) };
            }
            Ok(out)
        })
        .collect()
}

/// Open coordinate grids: vector `k` has extent `n_k` on axis `k` and 1
/// elsewhere, ready to be combined by broadcasting.
pub fn ogrid(ranges: &[(i64, i64)]) -> Result<Vec<ArrayView>> {
    check_ranges(ranges)?;
    let rank = ranges.len();
    ranges
        .iter()
        .enumerate()
        .map(|(axis, &(start, stop))| {
            let v = ArrayView::arange(start as f64, stop as f64, 1.0, DType::int64())?;
            if rank == 1 {
                return Ok(v);
            }
            let mut shape = vec![1; rank];
            shape[axis] = v.len();
            v.reshape(&shape)
        })
        .collect()
}

/// The symmetric coordinate range used for a grid of extent `n`.
pub fn grid_range(n: usize) -> (i64, i64) {
    let half = (n / 2) as i64;
    (-half, n as i64 - half)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridMethod {
    /// Three full coordinate grids.
    Dense,
    /// Three coordinate vectors combined by broadcasting.
    Broadcast,
}

impl fmt::Display for GridMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GridMethod::Dense => "dense",
            GridMethod::Broadcast => "broadcast",
        })
    }
}

impl FromStr for GridMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dense" => Ok(GridMethod::Dense),
            "broadcast" => Ok(GridMethod::Broadcast),
            other => Err(Error::InvalidArgument(format!("unknown grid method {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridReport {
    pub n: usize,
    pub method: GridMethod,
    pub scalar_ops: u64,
    pub buffers_allocated: u64,
    pub bytes_allocated: u64,
    /// Sum of every element of the distance grid.
    pub checksum: f64,
}

impl fmt::Display for GridReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "method={}", self.method)?;
        writeln!(f, "n={}", self.n)?;
        writeln!(f, "scalar_ops={}", self.scalar_ops)?;
        writeln!(f, "buffers_allocated={}", self.buffers_allocated)?;
        writeln!(f, "bytes_allocated={}", self.bytes_allocated)?;
        write!(f, "checksum={:.6}", self.checksum)
    }
}

/// `R[i,j,k] = sqrt(i² + j² + k²)` over an `n³` grid centred on the origin.
///
/// Stages run in a fixed order (square each coordinate, add the first two,
/// add the third, take the root) so the recorded counts are deterministic.
pub fn distance_grid(n: usize, method: GridMethod) -> Result<(ArrayView, GridReport)> {
    if n == 0 {
        return Err(Error::InvalidArgument("grid extent must be positive".into()));
    }
    let session = CounterSession::start();
    let range = grid_range(n);
    let coords = match method {
        GridMethod::Dense => mgrid(&[range; 3])?,
        GridMethod::Broadcast => ogrid(&[range; 3])?,
    };
    let [i, j, k] = <[ArrayView; 3]>::try_from(coords).expect("three coordinate arrays");
    let i2 = elementwise_unary(UnaryOp::Square, &i)?;
    let j2 = elementwise_unary(UnaryOp::Square, &j)?;
    let k2 = elementwise_unary(UnaryOp::Square, &k)?;
    let ij = elementwise_binary(BinaryOp::Add, &i2, &j2)?;
    let ijk = elementwise_binary(BinaryOp::Add, &ij, &k2)?;
    let r = elementwise_unary(UnaryOp::Sqrt, &ijk)?;
    let counts = session.report();
    let checksum = r.to_vec::<f64>().iter().sum();
    let report = GridReport {
        n,
        method,
        scalar_ops: counts.scalar_ops,
        buffers_allocated: counts.buffers_allocated,
        bytes_allocated: counts.bytes_allocated,
        checksum,
    };
    Ok((r, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::broadcast::BroadcastPlan;

    #[test]
    fn mgrid_examples() {
        let g = mgrid(&[(0, 3)]).unwrap();
        assert_eq!(g[0].to_vec::<i64>(), vec![0, 1, 2]);
        let g = mgrid(&[(0, 2), (0, 2)]).unwrap();
        assert_eq!(g[0].to_string(), "[[0, 0], [1, 1]]");
        assert_eq!(g[1].to_string(), "[[0, 1], [0, 1]]");
        assert!(mgrid(&[]).is_err());
        assert!(mgrid(&[(3, 3)]).is_err());
    }

    #[test]
    fn ogrid_examples() {
        let g = ogrid(&[(-2, 2), (-2, 2), (-2, 2)]).unwrap();
        assert_eq!(g[0].shape(), &[4, 1, 1]);
        assert_eq!(g[1].shape(), &[1, 4, 1]);
        assert_eq!(g[2].shape(), &[1, 1, 4]);
        let plan = BroadcastPlan::new(&[&g[0], &g[1], &g[2]]).unwrap();
        assert_eq!(plan.output_shape, vec![4, 4, 4]);
        assert_eq!(plan.operand_strides[0], vec![8, 0, 0]);
        let one = ogrid(&[(0, 5)]).unwrap();
        assert_eq!(one[0].shape(), &[5]);
    }

    #[test]
    fn ranges_are_centred() {
        assert_eq!(grid_range(200), (-100, 100));
        assert_eq!(grid_range(1), (0, 1));
        assert_eq!(grid_range(5), (-2, 3));
    }

    #[test]
    fn unit_grid_is_origin() {
        let (r, report) = distance_grid(1, GridMethod::Broadcast).unwrap();
        assert_eq!(r.shape(), &[1, 1, 1]);
        assert_eq!(r.to_vec::<f64>(), vec![0.0]);
        assert_eq!(report.checksum, 0.0);
    }

    #[test]
    fn report_format() {
        let (_, report) = distance_grid(2, GridMethod::Dense).unwrap();
        let text = report.to_string();
        assert!(text.starts_with("method=dense\nn=2\nscalar_ops=48\n"), "{text}");
    }
}
