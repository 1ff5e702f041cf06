//! Escape-time images of the dynamical and parameter planes of `e^z + c`
//! with ray overlays.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use image::{GrayImage, Luma, Rgb, RgbImage};
use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::numerics::RayTrace;

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("invalid render job: {0}")]
    InvalidJob(String),
    #[error("cannot write {path}: {message}")]
    Io { path: PathBuf, message: String },
}

/// Rectangle of the plane sampled on a pixel grid; pixel centres are sampled
/// and row 0 is the top.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    pub center: Complex64,
    pub width: f64,
    pub height: f64,
    pub pixels_x: u32,
    pub pixels_y: u32,
}

impl Window {
    pub fn new(center: Complex64, width: f64, height: f64, pixels_x: u32, pixels_y: u32) -> Result<Self, RenderError> {
        let w = Window {
            center,
            width,
            height,
            pixels_x,
            pixels_y,
        };
        w.validate()?;
        Ok(w)
    }

    /// Window of the given width whose height follows the pixel aspect ratio.
    pub fn with_width(center: Complex64, width: f64, pixels_x: u32, pixels_y: u32) -> Result<Self, RenderError> {
        let height = width * pixels_y as f64 / pixels_x.max(1) as f64;
        Window::new(center, width, height, pixels_x, pixels_y)
    }

    fn validate(&self) -> Result<(), RenderError> {
        let bad = |why: String| Err(RenderError::InvalidJob(why));
        if self.pixels_x == 0 || self.pixels_y == 0 {
            return bad("pixel grid must be nonempty".into());
        }
        if !(self.width > 0.0 && self.height > 0.0 && self.width.is_finite() && self.height.is_finite()) {
            return bad(format!("extent {} x {} must be positive", self.width, self.height));
        }
        if !(self.center.re.is_finite() && self.center.im.is_finite()) {
            return bad("window center must be finite".into());
        }
        let extent = self.width / self.height;
        let grid = self.pixels_x as f64 / self.pixels_y as f64;
        if (extent / grid - 1.0).abs() > 1e-6 {
            return bad(format!(
                "aspect ratio {extent} of the extent differs from {grid} of the pixel grid"
            ));
        }
        Ok(())
    }

    pub fn left(&self) -> f64 {
        self.center.re - self.width / 2.0
    }

    pub fn right(&self) -> f64 {
        self.center.re + self.width / 2.0
    }

    pub fn top(&self) -> f64 {
        self.center.im + self.height / 2.0
    }

    pub fn bottom(&self) -> f64 {
        self.center.im - self.height / 2.0
    }

    pub fn pixel_size(&self) -> f64 {
        self.width / self.pixels_x as f64
    }

    /// Plane point at the centre of pixel `(x, y)`.
    pub fn point(&self, x: u32, y: u32) -> Complex64 {
        let s = self.pixel_size();
        Complex64::new(self.left() + (x as f64 + 0.5) * s, self.top() - (y as f64 + 0.5) * s)
    }

    /// Continuous pixel coordinates of a plane point.
    pub fn to_pixel(&self, z: Complex64) -> (f64, f64) {
        let s = self.pixel_size();
        ((z.re - self.left()) / s - 0.5, (self.top() - z.im) / s - 0.5)
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.left() && z.re <= self.right() && z.im >= self.bottom() && z.im <= self.top()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Mode {
    /// Iterates `e^z + c` from `z₀ =` pixel.
    Dynamical(Complex64),
    /// Iterates the singular orbit `z₀ = c =` pixel.
    Parameter,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Palette {
    /// 8-bit grayscale, overlays in black or white, whichever contrasts.
    #[default]
    Gray,
    /// RGB with overlays in red.
    Color,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RenderJob {
    pub mode: Mode,
    pub window: Window,
    pub max_iter: u32,
    /// Points escape once `Re z` exceeds this.
    pub escape_threshold: f64,
    pub overlays: Vec<RayTrace>,
    pub palette: Palette,
    pub output: PathBuf,
}

pub const DEFAULT_ESCAPE_THRESHOLD: f64 = 50.0;

impl RenderJob {
    pub fn new(mode: Mode, window: Window, output: impl Into<PathBuf>) -> Self {
        RenderJob {
            mode,
            window,
            max_iter: 100,
            escape_threshold: DEFAULT_ESCAPE_THRESHOLD,
            overlays: Vec::new(),
            palette: Palette::Gray,
            output: output.into(),
        }
    }

    pub fn validate(&self) -> Result<(), RenderError> {
        self.window.validate()?;
        if self.max_iter == 0 {
            return Err(RenderError::InvalidJob("max_iter must be at least 1".into()));
        }
        if self.escape_threshold.is_nan() || self.escape_threshold <= self.window.right() {
            return Err(RenderError::InvalidJob(format!(
                "escape threshold {} must exceed the right edge {} of the window",
                self.escape_threshold,
                self.window.right()
            )));
        }
        if let Mode::Dynamical(c) = self.mode {
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(RenderError::InvalidJob("parameter must be finite".into()));
            }
        }
        Ok(())
    }

    /// Metadata file written next to the image.
    pub fn sidecar_path(&self) -> PathBuf {
        let mut name = self.output.as_os_str().to_owned();
        name.push(".txt");
        PathBuf::from(name)
    }

    /// `key=value` description of the job.
    pub fn describe(&self) -> String {
        let mut out = String::new();
        let w = &self.window;
        match self.mode {
            Mode::Dynamical(c) => {
                let _ = writeln!(out, "mode=dynamical");
                let _ = writeln!(out, "c={:?} {:?}", c.re, c.im);
            }
            Mode::Parameter => {
                let _ = writeln!(out, "mode=parameter");
            }
        }
        let _ = writeln!(out, "center={:?} {:?}", w.center.re, w.center.im);
        let _ = writeln!(out, "width={:?}", w.width);
        let _ = writeln!(out, "height={:?}", w.height);
        let _ = writeln!(out, "pixels={}x{}", w.pixels_x, w.pixels_y);
        let _ = writeln!(out, "max_iter={}", self.max_iter);
        let _ = writeln!(out, "escape_threshold={:?}", self.escape_threshold);
        let _ = writeln!(
            out,
            "palette={}",
            match self.palette {
                Palette::Gray => "gray",
                Palette::Color => "color",
            }
        );
        let _ = writeln!(out, "output={}", self.output.display());
        for tr in &self.overlays {
            let _ = writeln!(out, "overlay={} samples={}", tr.address, tr.samples.len());
        }
        out
    }
}

/// Iterate at which the orbit first has `Re z > threshold`.
pub fn escape_time(mode: Mode, p: Complex64, max_iter: u32, threshold: f64) -> Option<u32> {
    let (c, mut z) = match mode {
        Mode::Dynamical(c) => (c, p),
        Mode::Parameter => (p, p),
    };
    for n in 0..max_iter {
        if z.re > threshold {
            return Some(n);
        }
        if z.re.is_nan() || z.im.is_nan() {
            return None;
        }
        z = z.exp() + c;
    }
    None
}

/// Gray level of a pixel escaping at iterate `n`; black if it never escapes.
pub fn shade(escape: Option<u32>) -> u8 {
    match escape {
        None => 0,
        Some(n) => 16 + (239.0 * 0.75f64.powi(n.min(64) as i32)).round() as u8,
    }
}

/// Escape-time shades, row-major.
pub fn escape_field(job: &RenderJob) -> Vec<u8> {
    let w = job.window;
    let mut field = vec![0u8; w.pixels_x as usize * w.pixels_y as usize];
    field
        .par_chunks_mut(w.pixels_x as usize)
        .enumerate()
        .for_each(|(y, row)| {
            for (x, px) in row.iter_mut().enumerate() {
                let p = w.point(x as u32, y as u32);
                *px = shade(escape_time(job.mode, p, job.max_iter, job.escape_threshold));
            }
        });
    field
}

/// Anti-aliased coverage of a segment in pixel coordinates (Xiaolin Wu).
fn wu_line(x0: f64, y0: f64, x1: f64, y1: f64, plot: &mut impl FnMut(i64, i64, f64)) {
    let steep = (y1 - y0).abs() > (x1 - x0).abs();
    let (mut x0, mut y0, mut x1, mut y1) = if steep { (y0, x0, y1, x1) } else { (x0, y0, x1, y1) };
    if x0 > x1 {
        std::mem::swap(&mut x0, &mut x1);
        std::mem::swap(&mut y0, &mut y1);
    }
    let dx = x1 - x0;
    let gradient = if dx == 0.0 { 1.0 } else { (y1 - y0) / dx };
    let mut put = |a: i64, b: i64, v: f64| {
        if steep {
            plot(b, a, v)
        } else {
            plot(a, b, v)
        }
    };
    let xs = x0.round() as i64;
    let xe = x1.round() as i64;
    for x in xs..=xe {
        let y = y0 + gradient * (x as f64 - x0);
        let yf = y.floor();
        let frac = y - yf;
        put(x, yf as i64, 1.0 - frac);
        put(x, yf as i64 + 1, frac);
    }
}

/// Summary of a finished render.
#[derive(Clone, Debug, PartialEq)]
pub struct RenderReport {
    pub width: u32,
    pub height: u32,
    pub escaped_pixels: usize,
    pub warnings: Vec<String>,
    pub sidecar: PathBuf,
}

fn overlay_coverage(job: &RenderJob, warnings: &mut Vec<String>) -> Vec<f64> {
    let w = job.window;
    let (nx, ny) = (w.pixels_x as i64, w.pixels_y as i64);
    let mut cover = vec![0.0f64; (nx * ny) as usize];
    for tr in &job.overlays {
        let pts = tr.points();
        let outside = pts.iter().filter(|z| !w.contains(**z)).count();
        if outside > 0 {
            warnings.push(format!(
                "overlay {} has {outside} of {} samples outside the window; clipped",
                tr.address,
                pts.len()
            ));
        }
        for seg in pts.windows(2) {
            let (a, b) = (seg[0], seg[1]);
            if (a.re.max(b.re) < w.left() || a.re.min(b.re) > w.right())
                || (a.im.max(b.im) < w.bottom() || a.im.min(b.im) > w.top())
            {
                continue;
            }
            let (x0, y0) = w.to_pixel(a);
            let (x1, y1) = w.to_pixel(b);
            let limit = 4.0 * (nx + ny) as f64;
            if [x0, y0, x1, y1].iter().any(|v| !v.is_finite() || v.abs() > limit) {
                continue;
            }
            wu_line(x0, y0, x1, y1, &mut |x, y, v| {
                if (0..nx).contains(&x) && (0..ny).contains(&y) {
                    let c = &mut cover[(y * nx + x) as usize];
                    *c = c.max(v.clamp(0.0, 1.0));
                }
            });
        }
    }
    cover
}

fn blend(base: u8, ink: u8, alpha: f64) -> u8 {
    (base as f64 * (1.0 - alpha) + ink as f64 * alpha).round() as u8
}

/// Renders the job to a PNG and writes the sidecar file.
pub fn render(job: &RenderJob) -> Result<RenderReport, RenderError> {
    job.validate()?;
    let w = job.window;
    let field = escape_field(job);
    let mut warnings = Vec::new();
    let cover = overlay_coverage(job, &mut warnings);
    let io = |path: &Path, e: &dyn std::fmt::Display| RenderError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    match job.palette {
        Palette::Gray => {
            let img = GrayImage::from_fn(w.pixels_x, w.pixels_y, |x, y| {
                let i = (y * w.pixels_x + x) as usize;
                let ink = if field[i] >= 128 { 0 } else { 255 };
                Luma([blend(field[i], ink, cover[i])])
            });
            img.save_with_format(&job.output, image::ImageFormat::Png)
                .map_err(|e| io(&job.output, &e))?;
        }
        Palette::Color => {
            let img = RgbImage::from_fn(w.pixels_x, w.pixels_y, |x, y| {
                let i = (y * w.pixels_x + x) as usize;
                let g = field[i];
                Rgb([blend(g, 230, cover[i]), blend(g, 20, cover[i]), blend(g, 20, cover[i])])
            });
            img.save_with_format(&job.output, image::ImageFormat::Png)
                .map_err(|e| io(&job.output, &e))?;
        }
    }
    let sidecar = job.sidecar_path();
    let mut text = job.describe();
    for warning in &warnings {
        let _ = writeln!(text, "warning={warning}");
    }
    std::fs::write(&sidecar, text).map_err(|e| io(&sidecar, &e))?;
    Ok(RenderReport {
        width: w.pixels_x,
        height: w.pixels_y,
        escaped_pixels: field.iter().filter(|&&v| v != 0).count(),
        warnings,
        sidecar,
    })
}
