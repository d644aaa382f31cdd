//! 8-bit rasters (binary PGM / PPM), row-major with the origin at the top
//! left.

use std::io::{self, Write};

use rayon::prelude::*;
use realshadow_core::mirrors::MirrorSet;
use realshadow_core::potential::green;
use realshadow_core::{Complex, Polynomial, OVERFLOW_GUARD};

/// Rectangle `[x0, x1] × [y0, y1]` sampled at pixel centres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Viewport {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
    pub width: usize,
    pub height: usize,
}

impl Viewport {
    pub fn pixel_center(&self, col: usize, row: usize) -> Complex {
        let (dx, dy) = self.pixel_size();
        Complex::new(self.x0 + (col as f64 + 0.5) * dx, self.y1 - (row as f64 + 0.5) * dy)
    }

    pub fn pixel_size(&self) -> (f64, f64) {
        ((self.x1 - self.x0) / self.width as f64, (self.y1 - self.y0) / self.height as f64)
    }

    /// Pixel containing `z`, if it is inside the viewport.
    pub fn locate(&self, z: Complex) -> Option<(usize, usize)> {
        let (dx, dy) = self.pixel_size();
        let col = ((z.re - self.x0) / dx).floor();
        let row = ((self.y1 - z.im) / dy).floor();
        let inside = (0.0..self.width as f64).contains(&col) && (0.0..self.height as f64).contains(&row);
        inside.then_some((col as usize, row as usize))
    }

    fn map_pixels<T: Send>(&self, f: impl Fn(Complex) -> T + Sync) -> Vec<T> {
        (0..self.width * self.height)
            .into_par_iter()
            .map(|k| f(self.pixel_center(k % self.width, k / self.width)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gray {
    pub width: usize,
    pub height: usize,
    pub data: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rgb {
    pub width: usize,
    pub height: usize,
    /// `r, g, b` per pixel.
    pub data: Vec<u8>,
}

impl Gray {
    pub fn get(&self, col: usize, row: usize) -> u8 {
        self.data[row * self.width + col]
    }

    pub fn write_pgm(&self, w: &mut impl Write) -> io::Result<()> {
        write!(w, "P5\n{} {}\n255\n", self.width, self.height)?;
        w.write_all(&self.data)
    }
}

impl Rgb {
    pub fn get(&self, col: usize, row: usize) -> [u8; 3] {
        let k = 3 * (row * self.width + col);
        [self.data[k], self.data[k + 1], self.data[k + 2]]
    }

    fn set(&mut self, col: usize, row: usize, rgb: [u8; 3]) {
        let k = 3 * (row * self.width + col);
        self.data[k..k + 3].copy_from_slice(&rgb);
    }

    pub fn write_ppm(&self, w: &mut impl Write) -> io::Result<()> {
        write!(w, "P6\n{} {}\n255\n", self.width, self.height)?;
        w.write_all(&self.data)
    }
}

/// Green function clipped to `[0, g_max]`, black at 0 and white at `g_max`.
/// Orbits still bounded after `budget` steps count as `g = 0`.
pub fn green_field(p: &Polynomial, vp: &Viewport, budget: usize, g_max: f64) -> Gray {
    let data = vp.map_pixels(|z| {
        let g = green(p, z, budget).map_or(0.0, |v| v.g);
        (255.0 * (g / g_max).clamp(0.0, 1.0)).round() as u8
    });
    Gray { width: vp.width, height: vp.height, data }
}

/// Filled Julia set in black on white. A pixel is black if its centre stays
/// bounded for `budget` steps or if the distance estimate
/// `|z_n| log|z_n| / |(P^n)'(z)|` puts the set within one pixel.
pub fn escape_raster(p: &Polynomial, vp: &Viewport, budget: usize) -> Gray {
    let (dx, dy) = vp.pixel_size();
    let pixel = dx.max(dy);
    let data = vp.map_pixels(|z| if near_filled_set(p, z, budget, pixel) { 0 } else { 255 });
    Gray { width: vp.width, height: vp.height, data }
}

fn near_filled_set(p: &Polynomial, z0: Complex, budget: usize, pixel: f64) -> bool {
    const BAILOUT: f64 = 1e10;
    let (mut z, mut dz) = (z0, Complex::new(1.0, 0.0));
    for _ in 0..budget {
        let (v, dv) = p.eval_with_derivative(z);
        dz *= dv;
        z = v;
        if z.norm() > BAILOUT {
            let r = z.norm();
            let dist = if dz.norm() > 0.0 && dz.norm() < OVERFLOW_GUARD { r * r.ln() / dz.norm() } else { 0.0 };
            return dist < pixel;
        }
    }
    true
}

/// Escape raster in two greys with mirror sets overlaid: base points red,
/// their mirrors blue, each as a 3 × 3 dot.
pub fn mirror_overlay(p: &Polynomial, vp: &Viewport, budget: usize, sets: &[MirrorSet]) -> Rgb {
    let base = escape_raster(p, vp, budget);
    let mut img = Rgb {
        width: vp.width,
        height: vp.height,
        data: base.data.iter().flat_map(|&v| if v == 0 { [70; 3] } else { [235; 3] }).collect(),
    };
    let mut dot = |z: Complex, rgb: [u8; 3]| {
        if let Some((col, row)) = vp.locate(z) {
            for r in row.saturating_sub(1)..=(row + 1).min(vp.height - 1) {
                for c in col.saturating_sub(1)..=(col + 1).min(vp.width - 1) {
                    img.set(c, r, rgb);
                }
            }
        }
    };
    for m in sets {
        dot(m.base, [220, 30, 30]);
        for &w in &m.mirrors {
            dot(w, [30, 60, 220]);
        }
    }
    img
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vp(w: usize, h: usize) -> Viewport {
        Viewport { x0: -2.0, x1: 2.0, y0: -2.0, y1: 2.0, width: w, height: h }
    }

    #[test]
    fn pixel_geometry() {
        let v = vp(4, 4);
        assert_eq!(v.pixel_center(0, 0), Complex::new(-1.5, 1.5));
        assert_eq!(v.pixel_center(3, 3), Complex::new(1.5, -1.5));
        assert_eq!(v.locate(Complex::new(-1.5, 1.5)), Some((0, 0)));
        assert_eq!(v.locate(Complex::new(2.5, 0.0)), None);
    }

    #[test]
    fn headers() {
        let g = Gray { width: 2, height: 1, data: vec![0, 255] };
        let mut out = Vec::new();
        g.write_pgm(&mut out).unwrap();
        assert_eq!(out, b"P5\n2 1\n255\n\x00\xff");
        let c = Rgb { width: 1, height: 1, data: vec![1, 2, 3] };
        let mut out = Vec::new();
        c.write_ppm(&mut out).unwrap();
        assert_eq!(out, b"P6\n1 1\n255\n\x01\x02\x03");
    }

    #[test]
    fn green_field_of_square_is_radial() {
        let sq = Polynomial::from_real(&[0.0, 0.0, 1.0]).unwrap();
        let g = green_field(&sq, &vp(41, 41), 200, 2.0);
        assert_eq!(g.get(20, 20), 0);
        assert_eq!(g.get(0, 20), g.get(40, 20));
        assert_eq!(g.get(20, 0), g.get(20, 40));
        assert_eq!(g.get(0, 20), g.get(20, 0));
        assert!(g.get(0, 0) > g.get(0, 20));
    }

    #[test]
    fn chebyshev_escape_raster_is_a_segment() {
        let cheb = Polynomial::from_real(&[-2.0, 0.0, 1.0]).unwrap();
        let v = Viewport { x0: -2.5, x1: 2.5, y0: -1.0, y1: 1.0, width: 100, height: 41 };
        let img = escape_raster(&cheb, &v, 200);
        let centre = 20;
        for col in 0..100 {
            let x = v.pixel_center(col, centre).re;
            if x.abs() < 1.95 {
                assert_eq!(img.get(col, centre), 0, "col {col}");
            }
            if x.abs() > 2.1 {
                assert_eq!(img.get(col, centre), 255, "col {col}");
            }
        }
        for row in (0..41).filter(|r: &usize| r.abs_diff(centre) > 2) {
            assert!((0..100).all(|col| img.get(col, row) == 255), "row {row}");
        }
    }
}
