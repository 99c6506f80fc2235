//! Sampling, trigonometric projection and quadrature on the unit circle.
//!
//! Every function on the circle is carried as samples on the equispaced grid
//! `θ_j = 2πj/G`. The trapezoid rule on that grid is the DFT, so projection and
//! inner products are exact for trigonometric polynomials of low enough degree.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

pub type C64 = Complex64;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn forward_plan(len: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(len))
}

fn inverse_plan(len: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(len))
}

/// Signed frequency of FFT bin `j` on a grid of size `g`. The Nyquist bin maps to `-g/2`.
#[inline]
pub fn signed_mode(j: usize, g: usize) -> i64 {
    if j < g / 2 {
        j as i64
    } else {
        j as i64 - g as i64
    }
}

/// FFT bin holding signed frequency `l`.
#[inline]
pub fn bin_of(l: i64, g: usize) -> usize {
    l.rem_euclid(g as i64) as usize
}

/// Smallest power of two that is at least `8(M+1)`.
pub fn default_grid_size(mode_bound: usize) -> usize {
    (8 * (mode_bound + 1)).next_power_of_two()
}

#[inline]
pub fn grid_angle(j: usize, g: usize) -> f64 {
    2.0 * PI * j as f64 / g as f64
}

/// Samples of a complex function at `θ_j = 2πj/G`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    samples: Vec<C64>,
}

impl GridFunction {
    pub fn new(samples: Vec<C64>) -> Result<Self> {
        let g = samples.len();
        if g < 4 || !g.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "grid size must be even and at least 4, got {g}"
            )));
        }
        if samples.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidGrid("non-finite sample".into()));
        }
        Ok(Self { samples })
    }

    /// Internal constructor for samples already known to be valid.
    pub(crate) fn from_samples_unchecked(samples: Vec<C64>) -> Self {
        debug_assert!(samples.len() >= 4 && samples.len().is_multiple_of(2));
        Self { samples }
    }

    pub fn from_fn(grid_size: usize, f: impl Fn(f64) -> C64) -> Result<Self> {
        Self::new((0..grid_size).map(|j| f(grid_angle(j, grid_size))).collect())
    }

    pub fn constant(grid_size: usize, value: C64) -> Result<Self> {
        Self::new(vec![value; grid_size])
    }

    pub fn grid_size(&self) -> usize {
        self.samples.len()
    }

    pub fn samples(&self) -> &[C64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<C64> {
        self.samples
    }

    pub fn angle(&self, j: usize) -> f64 {
        grid_angle(j, self.samples.len())
    }

    pub fn sup_norm(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self::from_samples_unchecked(self.samples.iter().map(|&z| f(z)).collect())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        check_same_grid(self, other)?;
        Ok(Self::from_samples_unchecked(
            self.samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a * b)
                .collect(),
        ))
    }

    pub fn scale(&self, c: C64) -> Self {
        self.map(|z| z * c)
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    /// Linear combination `a·self + b·other`.
    pub fn combine(&self, a: C64, other: &Self, b: C64) -> Result<Self> {
        check_same_grid(self, other)?;
        Ok(Self::from_samples_unchecked(
            self.samples
                .iter()
                .zip(&other.samples)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        ))
    }

    /// All `G` DFT coefficients `c_l = (1/G) Σ_j g_j e^{-ilθ_j}`, stored in FFT bin order.
    pub fn spectrum(&self) -> Vec<C64> {
        let g = self.samples.len();
        let mut buf = self.samples.clone();
        forward_plan(g).process(&mut buf);
        let inv = 1.0 / g as f64;
        buf.iter_mut().for_each(|c| *c *= inv);
        buf
    }

    /// Inverse of [`GridFunction::spectrum`].
    pub fn from_spectrum(mut spectrum: Vec<C64>) -> Result<Self> {
        let g = spectrum.len();
        if g < 4 || !g.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!("bad spectrum length {g}")));
        }
        inverse_plan(g).process(&mut spectrum);
        Ok(Self::from_samples_unchecked(spectrum))
    }

    /// `Σ_{|l| > M} |c_l|²`, the energy the projection onto `|l| ≤ M` drops.
    pub fn tail_mass(&self, mode_bound: usize) -> f64 {
        let g = self.samples.len();
        self.spectrum()
            .iter()
            .enumerate()
            .filter(|(j, _)| signed_mode(*j, g).unsigned_abs() as usize > mode_bound)
            .map(|(_, c)| c.norm_sqr())
            .sum()
    }

    /// Spectral angular derivative `d/dθ`; the Nyquist mode is discarded.
    pub fn angular_derivative(&self) -> Self {
        let g = self.samples.len();
        let mut spec = self.spectrum();
        for (j, c) in spec.iter_mut().enumerate() {
            let l = signed_mode(j, g);
            if 2 * l.unsigned_abs() as usize == g {
                *c = C64::new(0.0, 0.0);
            } else {
                *c *= C64::new(0.0, l as f64);
            }
        }
        Self::from_spectrum(spec).expect("spectrum length comes from a valid grid")
    }

    /// Samples of `θ ↦ g(θ + φ)` by spectral interpolation.
    pub fn rotated(&self, phi: f64) -> Self {
        let g = self.samples.len();
        let mut spec = self.spectrum();
        for (j, c) in spec.iter_mut().enumerate() {
            let l = signed_mode(j, g);
            if 2 * l.unsigned_abs() as usize == g {
                // keep the Nyquist term real-symmetric under rotation
                *c *= (l as f64 * phi).cos();
            } else {
                *c *= C64::from_polar(1.0, l as f64 * phi);
            }
        }
        Self::from_spectrum(spec).expect("spectrum length comes from a valid grid")
    }

    /// Trigonometric interpolant with modes `|l| < G/2`; the Nyquist term is dropped.
    pub fn interpolant(&self) -> FourierPoly {
        let g = self.samples.len();
        let spec = self.spectrum();
        let m = g / 2 - 1;
        let mut p = FourierPoly::zeros(m);
        for l in -(m as i64)..=m as i64 {
            p.set(l, spec[bin_of(l, g)]);
        }
        p
    }

    /// Mean value `(1/G) Σ_j g_j`, the quadrature of `∮ g dm`.
    pub fn mean(&self) -> C64 {
        self.samples.iter().sum::<C64>() / self.samples.len() as f64
    }
}

fn check_same_grid(a: &GridFunction, b: &GridFunction) -> Result<()> {
    if a.grid_size() != b.grid_size() {
        return Err(Error::GridMismatch(a.grid_size(), b.grid_size()));
    }
    Ok(())
}

/// A trigonometric polynomial `Σ_{|l| ≤ M} c_l z^l`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierPoly {
    mode_bound: usize,
    coeffs: Vec<C64>,
}

impl FourierPoly {
    pub fn zeros(mode_bound: usize) -> Self {
        Self {
            mode_bound,
            coeffs: vec![C64::new(0.0, 0.0); 2 * mode_bound + 1],
        }
    }

    /// Coefficients ordered `c_{-M}, ..., c_M`.
    pub fn new(mode_bound: usize, coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len() != 2 * mode_bound + 1 {
            return Err(Error::InvalidParameter(format!(
                "expected {} coefficients for mode bound {mode_bound}, got {}",
                2 * mode_bound + 1,
                coeffs.len()
            )));
        }
        Ok(Self { mode_bound, coeffs })
    }

    pub fn monomial(mode_bound: usize, l: i64, c: C64) -> Result<Self> {
        let mut p = Self::zeros(mode_bound);
        if l.unsigned_abs() as usize > mode_bound {
            return Err(Error::InvalidParameter(format!(
                "mode {l} exceeds bound {mode_bound}"
            )));
        }
        p.set(l, c);
        Ok(p)
    }

    pub fn mode_bound(&self) -> usize {
        self.mode_bound
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn coeff(&self, l: i64) -> C64 {
        if l.unsigned_abs() as usize > self.mode_bound {
            C64::new(0.0, 0.0)
        } else {
            self.coeffs[(l + self.mode_bound as i64) as usize]
        }
    }

    pub fn set(&mut self, l: i64, c: C64) {
        let idx = (l + self.mode_bound as i64) as usize;
        self.coeffs[idx] = c;
    }

    /// Evaluates at one angle; Horner in `e^{iθ}` for `l ≥ 0` and in `e^{-iθ}` for `l < 0`.
    pub fn eval(&self, theta: f64) -> C64 {
        let m = self.mode_bound;
        let w = C64::from_polar(1.0, theta);
        let wb = w.conj();
        let mut pos = C64::new(0.0, 0.0);
        for l in (0..=m).rev() {
            pos = pos * w + self.coeffs[m + l];
        }
        let mut neg = C64::new(0.0, 0.0);
        for l in (1..=m).rev() {
            neg = (neg + self.coeffs[m - l]) * wb;
        }
        pos + neg
    }

    /// Samples on a `G`-point grid via the inverse FFT. Requires `G ≥ 2M+2`.
    pub fn to_grid(&self, grid_size: usize) -> Result<GridFunction> {
        check_resolution(grid_size, self.mode_bound)?;
        let mut spec = vec![C64::new(0.0, 0.0); grid_size];
        for l in -(self.mode_bound as i64)..=self.mode_bound as i64 {
            spec[bin_of(l, grid_size)] = self.coeff(l);
        }
        inverse_plan(grid_size).process(&mut spec);
        Ok(GridFunction::from_samples_unchecked(spec))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }
}

fn check_resolution(grid_size: usize, mode_bound: usize) -> Result<()> {
    let needed = 2 * mode_bound + 2;
    if grid_size < needed {
        return Err(Error::GridTooSmall {
            grid: grid_size,
            modes: mode_bound,
            needed,
        });
    }
    Ok(())
}

/// `c_l = (1/G) Σ_j g(θ_j) e^{-ilθ_j}` for `|l| ≤ M`.
pub fn project_to_modes(g: &GridFunction, mode_bound: usize) -> Result<FourierPoly> {
    let size = g.grid_size();
    check_resolution(size, mode_bound)?;
    let spec = g.spectrum();
    let mut p = FourierPoly::zeros(mode_bound);
    for l in -(mode_bound as i64)..=mode_bound as i64 {
        p.set(l, spec[bin_of(l, size)]);
    }
    Ok(p)
}

pub fn evaluate_poly(p: &FourierPoly, points: &[f64]) -> Vec<C64> {
    points.iter().map(|&t| p.eval(t)).collect()
}

/// `(1/G) Σ_j g1(θ_j) conj(g2(θ_j))`.
pub fn quadrature_inner(g1: &GridFunction, g2: &GridFunction) -> Result<C64> {
    check_same_grid(g1, g2)?;
    let s: C64 = g1
        .samples
        .iter()
        .zip(&g2.samples)
        .map(|(a, b)| a * b.conj())
        .sum();
    Ok(s / g1.grid_size() as f64)
}
