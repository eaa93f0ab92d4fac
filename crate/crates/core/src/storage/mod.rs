//! Persistence and interop.
//!
//! Files hold raw element bytes only: packed little-endian, C order, no
//! header and no padding. Shape and dtype travel out of band.

mod interface;
mod memmap;
mod rawfile;

pub use interface::{
    from_interface, ArrayInterface, ArrayInterfaceDescriptor, DataLocation, MutableString,
};
pub use memmap::{flush, memmap_open, MemmapMode};
pub use rawfile::{fromfile, tofile};
