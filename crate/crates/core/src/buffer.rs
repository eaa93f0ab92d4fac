use std::ptr::NonNull;
use std::sync::atomic::{AtomicU64, Ordering};

use memmap2::{Mmap, MmapMut};

use crate::counters;
use crate::error::{Error, Result};

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backing {
    Heap,
    FileMapped,
    Foreign,
}

pub(crate) enum Mapping {
    Writable(MmapMut),
    ReadOnly(Mmap),
    /// Zero-length files cannot be mapped.
    Empty,
}

enum Owner {
    Heap,
    Mapped(Mapping),
    Foreign,
}

/// A fixed-length block of bytes shared by every view created over it.
///
/// Views write through a raw pointer, so a buffer behaves like a C array:
/// concurrent reads are fine, but a writer needs exclusive access to the
/// region it touches. The library does not synchronize writers.
pub struct Buffer {
    ptr: NonNull<u8>,
    len: usize,
    read_only: bool,
    id: u64,
    owner: Owner,
}

// SAFETY: the pointer is owned by the buffer (heap, mapping) or guaranteed
// valid by the exporter of foreign memory. Write exclusivity is part of the
// documented contract.
unsafe impl Send for Buffer {}
unsafe impl Sync for Buffer {}

fn next_id() -> u64 {
    NEXT_ID.fetch_add(1, Ordering::Relaxed)
}

impl Buffer {
    /// Allocates `len` zeroed bytes on the heap and records the allocation.
    pub fn zeroed(len: usize) -> Result<Buffer> {
        let mut bytes: Vec<u8> = Vec::new();
        bytes
            .try_reserve_exact(len)
            .map_err(|_| Error::AllocationFailed(len))?;
        bytes.resize(len, 0);
        Ok(Buffer::from_vec(bytes))
    }

    /// Takes ownership of existing bytes. Counts as an allocation.
    pub fn from_vec(bytes: Vec<u8>) -> Buffer {
        let boxed = bytes.into_boxed_slice();
        let len = boxed.len();
        let ptr = NonNull::new(Box::into_raw(boxed) as *mut u8).expect("box pointer is non-null");
        counters::record_allocation(len);
        Buffer {
            ptr,
            len,
            read_only: false,
            id: next_id(),
            owner: Owner::Heap,
        }
    }

    pub(crate) fn mapped(mapping: Mapping) -> Buffer {
        let (ptr, len, read_only) = match &mapping {
            Mapping::Writable(m) => (m.as_ptr() as *mut u8, m.len(), false),
            Mapping::ReadOnly(m) => (m.as_ptr() as *mut u8, m.len(), true),
            Mapping::Empty => (NonNull::dangling().as_ptr(), 0, false),
        };
        counters::record_allocation(len);
        Buffer {
            ptr: NonNull::new(ptr).expect("mapping pointer is non-null"),
            len,
            read_only,
            id: next_id(),
            owner: Owner::Mapped(mapping),
        }
    }

    /// Wraps memory owned elsewhere. Not counted as an allocation.
    ///
    /// # Safety
    /// `ptr..ptr+len` must stay valid (and, unless `read_only`, writable) for
    /// the lifetime of the buffer and every view over it.
    pub unsafe fn foreign(ptr: NonNull<u8>, len: usize, read_only: bool) -> Buffer {
        Buffer {
            ptr,
            len,
            read_only,
            id: next_id(),
            owner: Owner::Foreign,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_read_only(&self) -> bool {
        self.read_only
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn backing(&self) -> Backing {
        match self.owner {
            Owner::Heap => Backing::Heap,
            Owner::Mapped(_) => Backing::FileMapped,
            Owner::Foreign => Backing::Foreign,
        }
    }

    pub(crate) fn as_ptr(&self) -> *mut u8 {
        self.ptr.as_ptr()
    }

    /// Copies `out.len()` bytes starting at `offset`.
    pub fn read(&self, offset: usize, out: &mut [u8]) {
        assert!(
            offset.checked_add(out.len()).is_some_and(|end| end <= self.len),
            "read of {} bytes at {offset} exceeds buffer of {}",
            out.len(),
            self.len
        );
        // SAFETY: range checked above.
        unsafe { std::ptr::copy(self.ptr.as_ptr().add(offset), out.as_mut_ptr(), out.len()) }
    }

    pub fn write(&self, offset: usize, bytes: &[u8]) -> Result<()> {
        if self.read_only {
            return Err(Error::ReadOnly);
        }
        assert!(
            offset.checked_add(bytes.len()).is_some_and(|end| end <= self.len),
            "write of {} bytes at {offset} exceeds buffer of {}",
            bytes.len(),
            self.len
        );
        // SAFETY: range checked above; buffer is writable.
        unsafe { std::ptr::copy(bytes.as_ptr(), self.ptr.as_ptr().add(offset), bytes.len()) }
        Ok(())
    }

    /// A copy of the whole buffer.
    pub fn to_vec(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.len];
        self.read(0, &mut out);
        out
    }

    pub(crate) fn flush(&self) -> Result<()> {
        match &self.owner {
            Owner::Mapped(Mapping::Writable(m)) => Ok(m.flush()?),
            Owner::Mapped(_) => Ok(()),
            _ => Err(Error::NotMapped),
        }
    }
}

impl Drop for Buffer {
    fn drop(&mut self) {
        if let Owner::Heap = self.owner {
            // SAFETY: created by Box::into_raw in `from_vec` with this length.
            unsafe {
                drop(Box::from_raw(std::ptr::slice_from_raw_parts_mut(
                    self.ptr.as_ptr(),
                    self.len,
                )));
            }
        }
    }
}

impl std::fmt::Debug for Buffer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Buffer")
            .field("id", &self.id)
            .field("len", &self.len)
            .field("backing", &self.backing())
            .field("read_only", &self.read_only)
            .finish()
    }
}
