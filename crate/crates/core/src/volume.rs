//! Input volumes: loading, validation and the superlevel/sublevel conventions.
//!
//! A [`VoxelGrid`] always stores its values in `(x, y, z)` order with `z`
//! varying fastest, so that the flat offset of voxel `(x, y, z)` is
//! `(x * n2 + y) * n3 + z`. Inputs of rank one or two are promoted to rank
//! three by appending unit axes.

use std::borrow::Cow;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use npyz::{DType, NpyFile, Order, TypeChar, WriterBuilder};

use crate::error::{Error, Result};

/// Largest supported extent along one axis; coordinates are packed into 20 bits.
pub const MAX_AXIS_LEN: usize = 1 << 20;

/// Direction in which the filtration sweeps through intensities.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum FiltrationMode {
    /// Cells enter at low values first.
    #[default]
    Sublevel,
    /// Cells enter at high values first (foreground = bright).
    Superlevel,
}

impl FiltrationMode {
    /// Maps an internal (sublevel) value back to the user's intensity scale.
    #[inline]
    pub fn report(self, value: f64) -> f64 {
        match self {
            FiltrationMode::Sublevel => value,
            FiltrationMode::Superlevel if value.is_infinite() => value,
            FiltrationMode::Superlevel => canonical(-value),
        }
    }

    /// Maps a user-facing intensity to the internal sublevel scale.
    #[inline]
    pub fn internal(self, value: f64) -> f64 {
        match self {
            FiltrationMode::Sublevel => value,
            FiltrationMode::Superlevel => canonical(-value),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FiltrationMode::Sublevel => "sublevel",
            FiltrationMode::Superlevel => "superlevel",
        }
    }
}

/// Folds `-0.0` into `0.0` so that total ordering and `==` agree.
#[inline]
pub(crate) fn canonical(value: f64) -> f64 {
    value + 0.0
}

/// A 3D grayscale volume together with its filtration direction.
#[derive(Clone, Debug, PartialEq)]
pub struct VoxelGrid {
    values: Vec<f64>,
    shape: [usize; 3],
    mode: FiltrationMode,
}

impl VoxelGrid {
    /// Builds a sublevel grid from values in `(x, y, z)` order (z fastest).
    ///
    /// `shape` may have rank 1 to 3; missing trailing axes get extent 1.
    pub fn new(values: Vec<f64>, shape: &[usize]) -> Result<Self> {
        let shape = promote_shape(shape)?;
        let expected: usize = shape.iter().product();
        if values.len() != expected {
            return Err(Error::Shape(format!(
                "shape {:?} needs {} values, got {}",
                shape,
                expected,
                values.len()
            )));
        }
        let mut values = values;
        for (offset, v) in values.iter_mut().enumerate() {
            if v.is_nan() {
                return Err(Error::Value(format!("NaN at flat offset {offset}")));
            }
            if v.is_infinite() {
                return Err(Error::Value(format!("infinite value at flat offset {offset}")));
            }
            *v = canonical(*v);
        }
        Ok(VoxelGrid {
            values,
            shape,
            mode: FiltrationMode::Sublevel,
        })
    }

    /// Builds a grid by evaluating `f` at every voxel.
    pub fn from_fn(shape: &[usize], mut f: impl FnMut(usize, usize, usize) -> f64) -> Result<Self> {
        let s = promote_shape(shape)?;
        let mut values = Vec::with_capacity(s[0] * s[1] * s[2]);
        for x in 0..s[0] {
            for y in 0..s[1] {
                for z in 0..s[2] {
                    values.push(f(x, y, z));
                }
            }
        }
        VoxelGrid::new(values, &s)
    }

    pub fn with_mode(mut self, mode: FiltrationMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn shape(&self) -> [usize; 3] {
        self.shape
    }

    pub fn mode(&self) -> FiltrationMode {
        self.mode
    }

    /// Raw values as supplied by the user, `(x, y, z)` order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn offset(&self, x: usize, y: usize, z: usize) -> usize {
        (x * self.shape[1] + y) * self.shape[2] + z
    }

    pub fn get(&self, x: usize, y: usize, z: usize) -> f64 {
        self.values[self.offset(x, y, z)]
    }

    pub fn set(&mut self, x: usize, y: usize, z: usize, value: f64) {
        let i = self.offset(x, y, z);
        self.values[i] = canonical(value);
    }

    /// Number of axes with extent greater than one.
    pub fn effective_rank(&self) -> usize {
        self.shape.iter().filter(|&&n| n > 1).count()
    }

    /// Negates every value and switches to the sublevel convention.
    ///
    /// Applying it to a sublevel grid flips it to superlevel, so the map is an involution.
    pub fn to_sublevel(&self) -> VoxelGrid {
        let mode = match self.mode {
            FiltrationMode::Superlevel => FiltrationMode::Sublevel,
            FiltrationMode::Sublevel => FiltrationMode::Superlevel,
        };
        VoxelGrid {
            values: self.values.iter().map(|v| canonical(-v)).collect(),
            shape: self.shape,
            mode,
        }
    }

    /// Values in the internal sublevel orientation.
    pub fn sublevel_values(&self) -> Cow<'_, [f64]> {
        match self.mode {
            FiltrationMode::Sublevel => Cow::Borrowed(&self.values),
            FiltrationMode::Superlevel => {
                Cow::Owned(self.values.iter().map(|v| canonical(-v)).collect())
            }
        }
    }

    /// Maps every value to 1 if it exceeds `threshold` and to 0 otherwise.
    pub fn binarize(&self, threshold: f64) -> VoxelGrid {
        VoxelGrid {
            values: self
                .values
                .iter()
                .map(|&v| if v > threshold { 1.0 } else { 0.0 })
                .collect(),
            shape: self.shape,
            mode: self.mode,
        }
    }

    /// Whether every value lies in `{0, 1}`.
    pub fn is_binary(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0 || v == 1.0)
    }
}

fn promote_shape(shape: &[usize]) -> Result<[usize; 3]> {
    if shape.len() > 3 {
        return Err(Error::Shape(format!(
            "rank {} exceeds 3 (shape {:?})",
            shape.len(),
            shape
        )));
    }
    let mut out = [1usize; 3];
    out[..shape.len()].copy_from_slice(shape);
    for &n in &out {
        if n == 0 {
            return Err(Error::Shape(format!("zero-length axis in {shape:?}")));
        }
        if n > MAX_AXIS_LEN {
            return Err(Error::Shape(format!(
                "axis length {n} exceeds the limit of {MAX_AXIS_LEN}"
            )));
        }
    }
    Ok(out)
}

/// Element type of a headerless raw file.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RawDtype {
    U8,
    U16,
    I16,
    I32,
    F32,
    F64,
}

impl RawDtype {
    pub fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "u8" | "uint8" => RawDtype::U8,
            "u16" | "uint16" => RawDtype::U16,
            "i16" | "int16" => RawDtype::I16,
            "i32" | "int32" => RawDtype::I32,
            "f32" | "float32" => RawDtype::F32,
            "f64" | "float64" => RawDtype::F64,
            _ => return None,
        })
    }

    fn width(self) -> usize {
        match self {
            RawDtype::U8 => 1,
            RawDtype::U16 | RawDtype::I16 => 2,
            RawDtype::I32 | RawDtype::F32 => 4,
            RawDtype::F64 => 8,
        }
    }

    fn decode(self, b: &[u8]) -> f64 {
        match self {
            RawDtype::U8 => b[0] as f64,
            RawDtype::U16 => u16::from_le_bytes([b[0], b[1]]) as f64,
            RawDtype::I16 => i16::from_le_bytes([b[0], b[1]]) as f64,
            RawDtype::I32 => i32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64,
            RawDtype::F32 => f32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64,
            RawDtype::F64 => f64::from_le_bytes(b.try_into().unwrap()),
        }
    }
}

/// On-disk container of a volume.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VolumeFormat {
    Npy,
    /// Little-endian, C order, shape supplied out of band.
    Raw { shape: Vec<usize>, dtype: RawDtype },
}

/// Loads a volume as a sublevel grid.
pub fn load_volume(path: impl AsRef<Path>, format: &VolumeFormat) -> Result<VoxelGrid> {
    let file = File::open(path.as_ref())?;
    let reader = BufReader::new(file);
    match format {
        VolumeFormat::Npy => read_npy(reader),
        VolumeFormat::Raw { shape, dtype } => read_raw(reader, shape, *dtype),
    }
}

/// Reads an NPY (v1/v2/v3) array of booleans, integers or floats.
pub fn read_npy(reader: impl Read) -> Result<VoxelGrid> {
    let npy = NpyFile::new(reader).map_err(|e| Error::Parse(format!("npy header: {e}")))?;
    let shape: Vec<usize> = npy.shape().iter().map(|&n| n as usize).collect();
    if shape.len() > 3 {
        return Err(Error::Shape(format!("rank {} exceeds 3", shape.len())));
    }
    let order = npy.order();
    let type_str = match npy.dtype() {
        DType::Plain(ts) => ts,
        other => return Err(Error::Parse(format!("unsupported dtype {}", other.descr()))),
    };
    let size = type_str.size_field();
    let data_err = |e: io::Error| Error::Parse(format!("npy payload: {e}"));
    let flat: Vec<f64> = match (type_str.type_char(), size) {
        (TypeChar::Float, 8) => npy.into_vec::<f64>().map_err(data_err)?,
        (TypeChar::Float, 4) => widen(npy.into_vec::<f32>().map_err(data_err)?),
        (TypeChar::Int, 1) => widen(npy.into_vec::<i8>().map_err(data_err)?),
        (TypeChar::Int, 2) => widen(npy.into_vec::<i16>().map_err(data_err)?),
        (TypeChar::Int, 4) => widen(npy.into_vec::<i32>().map_err(data_err)?),
        (TypeChar::Int, 8) => npy
            .into_vec::<i64>()
            .map_err(data_err)?
            .into_iter()
            .map(|v| v as f64)
            .collect(),
        (TypeChar::Uint, 1) => widen(npy.into_vec::<u8>().map_err(data_err)?),
        (TypeChar::Uint, 2) => widen(npy.into_vec::<u16>().map_err(data_err)?),
        (TypeChar::Uint, 4) => widen(npy.into_vec::<u32>().map_err(data_err)?),
        (TypeChar::Uint, 8) => npy
            .into_vec::<u64>()
            .map_err(data_err)?
            .into_iter()
            .map(|v| v as f64)
            .collect(),
        (TypeChar::Bool, 1) => npy
            .into_vec::<bool>()
            .map_err(data_err)?
            .into_iter()
            .map(|b| if b { 1.0 } else { 0.0 })
            .collect(),
        _ => return Err(Error::Parse(format!("unsupported dtype {type_str}"))),
    };
    let flat = match order {
        Order::C => flat,
        Order::Fortran => fortran_to_c(&flat, &shape),
    };
    VoxelGrid::new(flat, &shape)
}

fn widen<T: Into<f64> + Copy>(v: Vec<T>) -> Vec<f64> {
    v.into_iter().map(Into::into).collect()
}

fn fortran_to_c(flat: &[f64], shape: &[usize]) -> Vec<f64> {
    let mut s = [1usize; 3];
    s[..shape.len()].copy_from_slice(shape);
    let mut out = Vec::with_capacity(flat.len());
    for x in 0..s[0] {
        for y in 0..s[1] {
            for z in 0..s[2] {
                out.push(flat[x + s[0] * (y + s[1] * z)]);
            }
        }
    }
    out
}

fn read_raw(mut reader: impl Read, shape: &[usize], dtype: RawDtype) -> Result<VoxelGrid> {
    let promoted = promote_shape(shape)?;
    let count: usize = promoted.iter().product();
    let mut bytes = Vec::new();
    reader.read_to_end(&mut bytes)?;
    if bytes.len() != count * dtype.width() {
        return Err(Error::Parse(format!(
            "raw file has {} bytes, shape {:?} of {:?} needs {}",
            bytes.len(),
            shape,
            dtype,
            count * dtype.width()
        )));
    }
    let values = bytes.chunks_exact(dtype.width()).map(|b| dtype.decode(b)).collect();
    VoxelGrid::new(values, &promoted)
}

/// Writes the raw values of `grid` as a little-endian `f8` NPY file in C order.
///
/// Unit axes are kept, so the written array always has rank three.
pub fn write_npy(writer: impl Write, grid: &VoxelGrid) -> Result<()> {
    let shape: Vec<u64> = grid.shape().iter().map(|&n| n as u64).collect();
    let mut out = npyz::WriteOptions::new()
        .default_dtype()
        .shape(&shape)
        .writer(writer)
        .begin_nd()?;
    out.extend(grid.values().iter().copied())?;
    out.finish()?;
    Ok(())
}

pub fn save_npy(path: impl AsRef<Path>, grid: &VoxelGrid) -> Result<()> {
    let file = File::create(path.as_ref())?;
    let mut w = BufWriter::new(file);
    write_npy(&mut w, grid)?;
    w.flush()?;
    Ok(())
}
