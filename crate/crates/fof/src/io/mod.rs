//! Mesh and grid files.

mod container;
mod obj;
mod ply;

pub use container::{read_fof, write_fof, FOF_HEADER_LEN, FOF_MAGIC, FOF_VERSION};
pub use obj::{read_obj, write_obj};
pub use ply::{read_ply, write_ply, PlyEncoding, PlyOptions, PlyScalar};

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use fof_core::{FofGrid, TriangleMesh};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("invalid mesh: {0}")]
    Mesh(#[from] fof_core::Error),
    #[error("unknown mesh extension {0:?} (expected .obj or .ply)")]
    UnknownExtension(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Malformed mesh text or header. `line` is 1-based when known.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{}{message}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
pub struct ParseError {
    pub line: Option<usize>,
    pub message: String,
}

impl ParseError {
    pub(crate) fn at(line: usize, message: impl Into<String>) -> Self {
        Self {
            line: Some(line),
            message: message.into(),
        }
    }

    pub(crate) fn new(message: impl Into<String>) -> Self {
        Self {
            line: None,
            message: message.into(),
        }
    }
}

/// A `.fof` file that does not follow the container layout.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FormatError {
    #[error("bad magic {0:?}, expected \"FOF1\"")]
    BadMagic([u8; 4]),
    #[error("unsupported version {0}")]
    Version(u16),
    #[error("unsupported dtype {0}")]
    Dtype(u8),
    #[error("reserved byte is {0}, expected 0")]
    Reserved(u8),
    #[error("truncated {what}: expected {expected} bytes, found {actual}")]
    Truncated {
        what: &'static str,
        expected: u64,
        actual: u64,
    },
    #[error("{0} bytes after the payload")]
    TrailingBytes(u64),
    #[error("grid size {height}x{width}x{terms} does not fit in memory")]
    TooLarge { height: u32, width: u32, terms: u32 },
    #[error("invalid grid: {0}")]
    Grid(fof_core::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Obj,
    Ply,
}

impl MeshFormat {
    pub fn from_path(path: &Path) -> Result<Self> {
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .unwrap_or_default()
            .to_ascii_lowercase();
        match ext.as_str() {
            "obj" => Ok(MeshFormat::Obj),
            "ply" => Ok(MeshFormat::Ply),
            _ => Err(Error::UnknownExtension(ext)),
        }
    }
}

/// Reads an OBJ or PLY file, chosen by extension.
pub fn load_mesh(path: impl AsRef<Path>) -> Result<TriangleMesh> {
    let path = path.as_ref();
    let format = MeshFormat::from_path(path)?;
    let reader = BufReader::new(File::open(path)?);
    match format {
        MeshFormat::Obj => read_obj(reader),
        MeshFormat::Ply => read_ply(reader),
    }
}

/// Writes an OBJ, or a binary float32 PLY, chosen by extension.
pub fn save_mesh(path: impl AsRef<Path>, mesh: &TriangleMesh) -> Result<()> {
    let path = path.as_ref();
    let format = MeshFormat::from_path(path)?;
    let mut out = BufWriter::new(File::create(path)?);
    match format {
        MeshFormat::Obj => write_obj(&mut out, mesh)?,
        MeshFormat::Ply => write_ply(&mut out, mesh, PlyOptions::default())?,
    }
    out.flush()?;
    Ok(())
}

pub fn load_fof(path: impl AsRef<Path>) -> Result<FofGrid> {
    read_fof(BufReader::new(File::open(path)?))
}

pub fn save_fof(path: impl AsRef<Path>, grid: &FofGrid) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_fof(&mut out, grid)?;
    out.flush()?;
    Ok(())
}
