//! Spatial-temporal scalar grids (T planes of HxW values in [0, 1]) and the
//! flat binary layout used by the CLI and test fixtures.

use crate::geometry::{GeometryError, GridFrame, Point2};
use std::io::{self, Read, Write};
use thiserror::Error;

const MAGIC: &[u8; 8] = b"STGRID01";

#[derive(Debug, Error)]
pub enum GridError {
    #[error("grid value out of [0, 1] at (t={t}, row={row}, col={col}): {value}")]
    ValueOutOfRange {
        t: usize,
        row: usize,
        col: usize,
        value: f64,
    },
    #[error("value buffer has {got} entries, expected {expected}")]
    SizeMismatch { got: usize, expected: usize },
    #[error("frames differ: {0}")]
    FrameMismatch(String),
    #[error("bad grid file: {0}")]
    Format(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// T x H x W scalar field with a world geo-reference. Values live in [0, 1];
/// storage is row-major per timestep.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialTemporalGrid {
    pub frame: GridFrame,
    pub timesteps: usize,
    values: Vec<f64>,
}

impl SpatialTemporalGrid {
    pub fn zeros(frame: GridFrame, timesteps: usize) -> Self {
        let n = frame.pixel_count() * timesteps;
        SpatialTemporalGrid {
            frame,
            timesteps,
            values: vec![0.0; n],
        }
    }

    /// Construct from a raw buffer, validating the [0, 1] invariant.
    pub fn from_values(
        frame: GridFrame,
        timesteps: usize,
        values: Vec<f64>,
    ) -> Result<Self, GridError> {
        let expected = frame.pixel_count() * timesteps;
        if values.len() != expected {
            return Err(GridError::SizeMismatch {
                got: values.len(),
                expected,
            });
        }
        let grid = SpatialTemporalGrid {
            frame,
            timesteps,
            values,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<(), GridError> {
        let (w, h) = (self.frame.width, self.frame.height);
        for (i, &v) in self.values.iter().enumerate() {
            if !(0.0..=1.0).contains(&v) || !v.is_finite() {
                let plane = w * h;
                return Err(GridError::ValueOutOfRange {
                    t: i / plane,
                    row: (i % plane) / w,
                    col: i % w,
                    value: v,
                });
            }
        }
        Ok(())
    }

    #[inline]
    pub fn index(&self, t: usize, row: usize, col: usize) -> usize {
        (t * self.frame.height + row) * self.frame.width + col
    }

    #[inline]
    pub fn get(&self, t: usize, row: usize, col: usize) -> f64 {
        self.values[self.index(t, row, col)]
    }

    #[inline]
    pub fn set(&mut self, t: usize, row: usize, col: usize, v: f64) {
        debug_assert!((0.0..=1.0).contains(&v), "grid value {v} out of range");
        let i = self.index(t, row, col);
        self.values[i] = v;
    }

    pub fn plane(&self, t: usize) -> &[f64] {
        let n = self.frame.pixel_count();
        &self.values[t * n..(t + 1) * n]
    }

    pub fn plane_mut(&mut self, t: usize) -> &mut [f64] {
        let n = self.frame.pixel_count();
        &mut self.values[t * n..(t + 1) * n]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// World position of a pixel center.
    pub fn pixel_center(&self, row: usize, col: usize) -> Point2 {
        self.frame.grid_to_world(col as f64, row as f64)
    }

    /// Serialize: magic, u32 LE {T, H, W}, f64 LE {origin x, origin y,
    /// resolution, orientation}, then T*H*W f32 LE values.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<(), GridError> {
        w.write_all(MAGIC)?;
        for v in [
            self.timesteps as u32,
            self.frame.height as u32,
            self.frame.width as u32,
        ] {
            w.write_all(&v.to_le_bytes())?;
        }
        for v in [
            self.frame.origin.x,
            self.frame.origin.y,
            self.frame.resolution,
            self.frame.orientation,
        ] {
            w.write_all(&v.to_le_bytes())?;
        }
        for &v in &self.values {
            w.write_all(&(v as f32).to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self, GridError> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(GridError::Format(format!(
                "bad magic {:?}, expected {:?}",
                magic, MAGIC
            )));
        }
        let mut u = [0u8; 4];
        let mut read_u32 = |r: &mut R| -> Result<u32, GridError> {
            r.read_exact(&mut u)?;
            Ok(u32::from_le_bytes(u))
        };
        let t = read_u32(&mut r)? as usize;
        let h = read_u32(&mut r)? as usize;
        let w = read_u32(&mut r)? as usize;
        let mut f = [0u8; 8];
        let mut read_f64 = |r: &mut R| -> Result<f64, GridError> {
            r.read_exact(&mut f)?;
            Ok(f64::from_le_bytes(f))
        };
        let ox = read_f64(&mut r)?;
        let oy = read_f64(&mut r)?;
        let res = read_f64(&mut r)?;
        let orient = read_f64(&mut r)?;
        let frame = GridFrame::new(Point2::new(ox, oy), res, w, h, orient)?;
        let n = t
            .checked_mul(h)
            .and_then(|x| x.checked_mul(w))
            .ok_or_else(|| GridError::Format("dimension overflow".into()))?;
        let mut values = Vec::with_capacity(n);
        let mut b = [0u8; 4];
        for _ in 0..n {
            r.read_exact(&mut b)?;
            // clamp away f32 rounding excursions outside [0, 1]
            values.push((f32::from_le_bytes(b) as f64).clamp(0.0, 1.0));
        }
        SpatialTemporalGrid::from_values(frame, t, values)
    }

    pub fn save(&self, path: &std::path::Path) -> Result<(), GridError> {
        let mut f = io::BufWriter::new(std::fs::File::create(path)?);
        self.write_binary(&mut f)?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Self, GridError> {
        let f = io::BufReader::new(std::fs::File::open(path)?);
        Self::read_binary(f)
    }
}
