//! C-order traversal of one or more strided operands sharing a shape.

/// Calls `f` with the byte offsets of every operand for each index of
/// `shape`, in row-major order. The innermost axis runs as a tight loop.
pub(crate) fn walk<const N: usize>(
    shape: &[usize],
    bases: [isize; N],
    strides: [&[isize]; N],
    mut f: impl FnMut([isize; N]),
) {
    if shape.contains(&0) {
        return;
    }
    let rank = shape.len();
    if rank == 0 {
        f(bases);
        return;
    }
    for s in &strides {
        debug_assert_eq!(s.len(), rank);
    }
    let inner = rank - 1;
    let inner_len = shape[inner];
    let inner_step: [isize; N] = std::array::from_fn(|k| strides[k][inner]);

    let mut index = vec![0usize; inner];
    let mut row = bases;
    loop {
        let mut cur = row;
        for _ in 0..inner_len {
            f(cur);
            for k in 0..N {
                cur[k] += inner_step[k];
            }
        }
        // advance the outer odometer
        let mut axis = inner;
        loop {
            if axis == 0 {
                return;
            }
            axis -= 1;
            index[axis] += 1;
            for k in 0..N {
                row[k] += strides[k][axis];
            }
            if index[axis] < shape[axis] {
                break;
            }
            for k in 0..N {
                row[k] -= strides[k][axis] * shape[axis] as isize;
            }
            index[axis] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn visits_row_major_order() {
        let mut seen = Vec::new();
        walk(&[2, 3], [0], [&[24, 8]], |[o]| seen.push(o));
        assert_eq!(seen, vec![0, 8, 16, 24, 32, 40]);
    }

    #[test]
    fn handles_rank_zero_and_empty() {
        let mut n = 0;
        walk(&[], [5], [&[]], |[o]| {
            assert_eq!(o, 5);
            n += 1
        });
        assert_eq!(n, 1);
        walk(&[3, 0], [0], [&[8, 8]], |_| panic!("no elements"));
    }

    #[test]
    fn zero_strides_repeat() {
        let mut seen = Vec::new();
        walk(&[2, 2], [0, 100], [&[0, 8], &[16, 0]], |o| seen.push(o));
        assert_eq!(seen, vec![[0, 100], [8, 100], [0, 116], [8, 116]]);
    }
}
