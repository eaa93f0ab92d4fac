use std::fmt;
use std::fs::{File, OpenOptions};
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use memmap2::{MmapMut, MmapOptions};

use crate::array::{contiguous_strides, ArrayView};
use crate::buffer::{Backing, Buffer, Mapping};
use crate::dtype::DType;
use crate::error::{Error, Result};

/// How a file is mapped. Parsed from the tokens `write`, `r+` and `r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MemmapMode {
    /// Create or truncate, then map read-write.
    Write,
    /// Map an existing file read-write.
    ReadWrite,
    /// Map an existing file read-only.
    ReadOnly,
}

impl FromStr for MemmapMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "write" | "w+" => Ok(MemmapMode::Write),
            "r+" | "readwrite" => Ok(MemmapMode::ReadWrite),
            "r" | "readonly" => Ok(MemmapMode::ReadOnly),
            other => Err(Error::InvalidArgument(format!(
                "unknown memmap mode {other:?} (expected write, r+ or r)"
            ))),
        }
    }
}

impl fmt::Display for MemmapMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MemmapMode::Write => "write",
            MemmapMode::ReadWrite => "r+",
            MemmapMode::ReadOnly => "r",
        })
    }
}

fn map_len(shape: &[usize], dtype: &DType) -> Result<usize> {
    shape
        .iter()
        .try_fold(dtype.itemsize(), |acc, &n| acc.checked_mul(n))
        .ok_or_else(|| Error::AllocationOverflow(shape.to_vec()))
}

fn check_size(file: &File, path: &Path, needed: usize) -> Result<()> {
    let actual = file.metadata().map_err(|e| Error::io_at(e, path))?.len();
    if actual < needed as u64 {
        return Err(Error::FileTooSmall {
            expected: needed as u64,
            actual,
        });
    }
    Ok(())
}

/// Maps `path` as a C-contiguous array. Changes made through a writable
/// mapping reach the file on [`flush`] (or when the OS writes them back).
pub fn memmap_open(
    path: impl AsRef<Path>,
    mode: MemmapMode,
    shape: &[usize],
    dtype: DType,
) -> Result<ArrayView> {
    let path = path.as_ref();
    dtype.ensure_native()?;
    let len = map_len(shape, &dtype)?;
    let io = |e| Error::io_at(e, path);
    let mapping = match mode {
        MemmapMode::Write => {
            let file = OpenOptions::new()
                .read(true)
                .write(true)
                .create(true)
                .truncate(true)
                .open(path)
                .map_err(io)?;
            file.set_len(len as u64).map_err(io)?;
            writable(&file, len).map_err(io)?
        }
        MemmapMode::ReadWrite => {
            let file = OpenOptions::new().read(true).write(true).open(path).map_err(io)?;
            check_size(&file, path, len)?;
            writable(&file, len).map_err(io)?
        }
        MemmapMode::ReadOnly => {
            let file = File::open(path).map_err(io)?;
            check_size(&file, path, len)?;
            if len == 0 {
                Mapping::Empty
            } else {
                // SAFETY: the mapping is private to this buffer; concurrent
                // modification of the file by other writers is outside the
                // library's contract.
                Mapping::ReadOnly(unsafe { MmapOptions::new().len(len).map(&file) }.map_err(io)?)
            }
        }
    };
    let buffer = Arc::new(Buffer::mapped(mapping));
    let strides = contiguous_strides(shape, dtype.itemsize());
    ArrayView::from_parts(buffer, 0, shape.to_vec(), strides, dtype, false)
}

fn writable(file: &File, len: usize) -> std::io::Result<Mapping> {
    if len == 0 {
        return Ok(Mapping::Empty);
    }
    // SAFETY: see `memmap_open`.
    let map: MmapMut = unsafe { MmapOptions::new().len(len).map_mut(file)? };
    Ok(Mapping::Writable(map))
}

/// Writes pending changes of a file-mapped array back to its file.
pub fn flush(v: &ArrayView) -> Result<()> {
    if v.buffer().backing() != Backing::FileMapped {
        return Err(Error::NotMapped);
    }
    v.buffer().flush()
}
