use std::fs;
use std::path::Path;
use std::sync::Arc;

use crate::array::{contiguous_strides, ArrayView};
use crate::buffer::Buffer;
use crate::dtype::DType;
use crate::error::{Error, Result};

/// Reads a file of packed records into a fresh 1-D heap array.
pub fn fromfile(path: impl AsRef<Path>, dtype: DType) -> Result<ArrayView> {
    let path = path.as_ref();
    dtype.ensure_native()?;
    let bytes = fs::read(path).map_err(|e| Error::io_at(e, path))?;
    let size = bytes.len() as u64;
    let itemsize = dtype.itemsize();
    let remainder = size % itemsize as u64;
    if remainder != 0 {
        return Err(Error::RecordSize {
            size,
            itemsize,
            remainder,
        });
    }
    let shape = vec![bytes.len() / itemsize];
    let strides = contiguous_strides(&shape, itemsize);
    ArrayView::from_parts(Arc::new(Buffer::from_vec(bytes)), 0, shape, strides, dtype, false)
}

/// Writes the elements of `v` in C order, whatever its strides.
pub fn tofile(v: &ArrayView, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, v.to_bytes()).map_err(|e| Error::io_at(e, path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dtype::{struct_dtype, FieldSpec, ScalarType};
    use crate::value::Value;
    use proptest::prelude::*;

    fn record_dtype() -> DType {
        struct_dtype([
            ("time", FieldSpec::from(ScalarType::UInt64)),
            (
                "pos",
                FieldSpec::Nested(vec![
                    ("x".into(), ScalarType::Float64.into()),
                    ("y".into(), ScalarType::Float64.into()),
                ]),
            ),
        ])
        .unwrap()
    }

    fn packed(records: &[(u64, f64, f64)]) -> Vec<u8> {
        let mut out = Vec::new();
        for &(t, x, y) in records {
            out.extend(t.to_le_bytes());
            out.extend(x.to_le_bytes());
            out.extend(y.to_le_bytes());
        }
        out
    }

    #[test]
    fn reads_hand_packed_records() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("foo.dat");
        fs::write(&path, packed(&[(1, 0.0, 0.5), (2, 0.0, 10.3), (3, 5.5, 1.1)])).unwrap();
        let data = fromfile(&path, record_dtype()).unwrap();
        assert_eq!(data.shape(), &[3]);
        let shown: Vec<String> = data.values().iter().map(Value::to_string).collect();
        assert_eq!(shown, ["(1, (0.0, 0.5))", "(2, (0.0, 10.3))", "(3, (5.5, 1.1))"]);
    }

    #[test]
    fn empty_and_ragged_files() {
        let dir = tempfile::tempdir().unwrap();
        let empty = dir.path().join("empty");
        fs::write(&empty, []).unwrap();
        assert!(fromfile(&empty, record_dtype()).unwrap().is_empty());
        let ragged = dir.path().join("ragged");
        fs::write(&ragged, [0u8; 25]).unwrap();
        assert!(matches!(
            fromfile(&ragged, record_dtype()),
            Err(Error::RecordSize { size: 25, itemsize: 24, remainder: 1 })
        ));
        assert!(matches!(
            fromfile(dir.path().join("nope"), DType::int64()),
            Err(Error::FileNotFound(_))
        ));
    }

    #[test]
    fn matrix_round_trip_flattens() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m");
        let m = ArrayView::arange(0.0, 9.0, 1.0, DType::int64()).unwrap().reshape(&[3, 3]).unwrap();
        tofile(&m, &path).unwrap();
        assert_eq!(fs::metadata(&path).unwrap().len(), 72);
        let back = fromfile(&path, DType::int64()).unwrap();
        assert_eq!(back.shape(), &[9]);
        assert_eq!(back.to_vec::<i64>(), m.to_vec::<i64>());
    }

    #[test]
    fn strided_views_write_logical_order() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t");
        let m = ArrayView::arange(0.0, 4.0, 1.0, DType::int64()).unwrap().reshape(&[2, 2]).unwrap();
        tofile(&m.transpose(), &path).unwrap();
        assert_eq!(fromfile(&path, DType::int64()).unwrap().to_vec::<i64>(), vec![0, 2, 1, 3]);
    }

    fn scalar_bytes() -> impl Strategy<Value = (ScalarType, Vec<u8>)> {
        prop::sample::select(ScalarType::ALL.to_vec()).prop_flat_map(|ty| {
            prop::collection::vec(any::<u8>(), 0..16)
                .prop_map(move |raw| {
                    let n = raw.len() / ty.itemsize();
                    let mut bytes = raw[..n * ty.itemsize()].to_vec();
                    if ty == ScalarType::Bool {
                        bytes.iter_mut().for_each(|b| *b &= 1);
                    }
                    (ty, bytes)
                })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn scalar_files_round_trip((ty, bytes) in scalar_bytes()) {
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("p");
            fs::write(&path, &bytes).unwrap();
            let a = fromfile(&path, DType::scalar(ty)).unwrap();
            let out = dir.path().join("q");
            tofile(&a, &out).unwrap();
            let b = fromfile(&out, DType::scalar(ty)).unwrap();
            prop_assert_eq!(b.to_bytes(), bytes);
        }
    }
}
