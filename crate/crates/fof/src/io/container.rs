//! The `.fof` container: a fixed little-endian header followed by the raw
//! float32 coefficients, row by row, coefficient fastest.
//!
//! ```text
//! offset  size  field
//!      0     4  magic "FOF1"
//!      4     2  version (u16) = 1
//!      6     1  dtype (u8) = 0, float32
//!      7     1  reserved (u8) = 0
//!      8     4  height H (u32)
//!     12     4  width W (u32)
//!     16     4  terms N (u32)
//!     20  4HWN  payload
//! ```

use std::io::{Read, Write};

use fof_core::FofGrid;

use super::{Error, FormatError, Result};

pub const FOF_MAGIC: [u8; 4] = *b"FOF1";
pub const FOF_VERSION: u16 = 1;
pub const FOF_HEADER_LEN: usize = 20;
const DTYPE_F32: u8 = 0;

/// Writes `grid` with every coefficient rounded to the nearest float32.
pub fn write_fof(mut out: impl Write, grid: &FofGrid) -> Result<()> {
    let dims = [grid.height(), grid.width(), grid.terms()].map(|d| {
        u32::try_from(d).map_err(|_| std::io::Error::new(std::io::ErrorKind::InvalidInput, "grid too large for the container"))
    });
    let mut header = Vec::with_capacity(FOF_HEADER_LEN);
    header.extend_from_slice(&FOF_MAGIC);
    header.extend_from_slice(&FOF_VERSION.to_le_bytes());
    header.push(DTYPE_F32);
    header.push(0);
    for d in dims {
        header.extend_from_slice(&d?.to_le_bytes());
    }
    out.write_all(&header)?;

    let mut chunk = Vec::with_capacity(4 * 4096);
    for values in grid.data().chunks(4096) {
        chunk.clear();
        for &v in values {
            let f = v as f32;
            if !f.is_finite() {
                return Err(std::io::Error::new(
                    std::io::ErrorKind::InvalidInput,
                    format!("coefficient {v} overflows float32"),
                )
                .into());
            }
            chunk.extend_from_slice(&f.to_le_bytes());
        }
        out.write_all(&chunk)?;
    }
    Ok(())
}

pub fn read_fof(mut input: impl Read) -> Result<FofGrid> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    if bytes.len() < FOF_HEADER_LEN {
        if bytes.len() >= 4 && bytes[..4] != FOF_MAGIC {
            return Err(FormatError::BadMagic(bytes[..4].try_into().unwrap()).into());
        }
        return Err(FormatError::Truncated {
            what: "header",
            expected: FOF_HEADER_LEN as u64,
            actual: bytes.len() as u64,
        }
        .into());
    }
    let magic: [u8; 4] = bytes[..4].try_into().unwrap();
    if magic != FOF_MAGIC {
        return Err(FormatError::BadMagic(magic).into());
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != FOF_VERSION {
        return Err(FormatError::Version(version).into());
    }
    if bytes[6] != DTYPE_F32 {
        return Err(FormatError::Dtype(bytes[6]).into());
    }
    if bytes[7] != 0 {
        return Err(FormatError::Reserved(bytes[7]).into());
    }
    let word = |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap());
    let (height, width, terms) = (word(8), word(12), word(16));
    let expected = (height as u64)
        .checked_mul(width as u64)
        .and_then(|v| v.checked_mul(terms as u64))
        .and_then(|v| v.checked_mul(4))
        .filter(|&v| usize::try_from(v).is_ok())
        .ok_or(FormatError::TooLarge { height, width, terms })?;
    let actual = (bytes.len() - FOF_HEADER_LEN) as u64;
    if actual < expected {
        return Err(FormatError::Truncated {
            what: "payload",
            expected,
            actual,
        }
        .into());
    }
    if actual > expected {
        return Err(FormatError::TrailingBytes(actual - expected).into());
    }
    let data = bytes[FOF_HEADER_LEN..]
        .chunks_exact(4)
        .map(|b| f32::from_le_bytes(b.try_into().unwrap()) as f64)
        .collect();
    FofGrid::from_data(height as usize, width as usize, terms as usize, data)
        .map_err(|e| Error::Format(FormatError::Grid(e)))
}
