//! Periodic grid with Fourier differentiation and quadrature.
//!
//! The box is `[-L, L)` sampled at `N` equispaced nodes (N a power of two),
//! so `x_j = -L + j*dx` with `dx = 2L/N` and the nodes satisfy the
//! reflection symmetry `x_{N-j} = -x_j` used by the parity machinery.
//! Wavenumbers are `k_m = pi*m/L` over the standard symmetric index set;
//! the Nyquist mode of odd-order derivatives is zeroed so real fields stay
//! real.

use std::sync::Arc;

use num_complex::Complex64 as Cx;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Complex samples aligned with the grid nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct Field(pub Vec<Cx>);

impl Field {
    pub fn zeros(n: usize) -> Self {
        Field(vec![Cx::new(0.0, 0.0); n])
    }

    pub fn from_re(re: Vec<f64>) -> Self {
        Field(re.into_iter().map(|r| Cx::new(r, 0.0)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn re(&self) -> Vec<f64> {
        self.0.iter().map(|z| z.re).collect()
    }

    pub fn im(&self) -> Vec<f64> {
        self.0.iter().map(|z| z.im).collect()
    }

    pub fn scale(&self, a: f64) -> Field {
        Field(self.0.iter().map(|z| z * a).collect())
    }

    /// Largest |value| over the nodes.
    pub fn sup(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl std::ops::Deref for Field {
    type Target = [Cx];
    fn deref(&self) -> &[Cx] {
        &self.0
    }
}

impl std::ops::DerefMut for Field {
    fn deref_mut(&mut self) -> &mut [Cx] {
        &mut self.0
    }
}

/// Periodic uniform grid plus planned FFTs.
///
/// All operations are pure with respect to the caller-visible state; the
/// planned FFTs are immutable and shareable across threads.
#[derive(Clone)]
pub struct Grid {
    half_length: f64,
    n: usize,
    dx: f64,
    nodes: Vec<f64>,
    k: Vec<f64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Grid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Grid")
            .field("half_length", &self.half_length)
            .field("num_points", &self.n)
            .field("dx", &self.dx)
            .finish()
    }
}

impl Grid {
    /// Build a grid over `[-half_length, half_length)` with `num_points`
    /// nodes.  `num_points` must be a power of two, at least 16.
    pub fn new(half_length: f64, num_points: usize) -> Result<Grid> {
        if !(half_length.is_finite() && half_length > 0.0) {
            return Err(Error::invalid(format!("half_length must be positive, got {half_length}")));
        }
        if num_points < 16 || !num_points.is_power_of_two() {
            return Err(Error::invalid(format!(
                "num_points must be a power of two >= 16, got {num_points}"
            )));
        }
        let dx = 2.0 * half_length / num_points as f64;
        let nodes = (0..num_points).map(|j| -half_length + j as f64 * dx).collect();
        // k_m = pi*m/L, m = 0..N/2 then negative frequencies. The slot at
        // m = N/2 keeps the positive Nyquist magnitude; odd-order derivative
        // multipliers zero it out.
        let k0 = std::f64::consts::PI / half_length;
        let mut k = vec![0.0; num_points];
        for (m, km) in k.iter_mut().enumerate().take(num_points / 2 + 1) {
            *km = k0 * m as f64;
        }
        for m in num_points / 2 + 1..num_points {
            k[m] = -k0 * (num_points - m) as f64;
        }
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(num_points);
        let inv = planner.plan_fft_inverse(num_points);
        Ok(Grid { half_length, n: num_points, dx, nodes, k, fwd, inv })
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn num_points(&self) -> usize {
        self.n
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.k
    }

    /// Largest resolved wavenumber, `pi/dx`.
    pub fn k_max(&self) -> f64 {
        std::f64::consts::PI / self.dx
    }

    /// Index of the node at `-x_j` (periodic reflection through the origin).
    pub fn reflect(&self, j: usize) -> usize {
        if j == 0 {
            0
        } else {
            self.n - j
        }
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(Error::invalid(format!("field length {len} != grid size {}", self.n)));
        }
        Ok(())
    }

    pub fn fft(&self, f: &Field) -> Field {
        let mut buf = f.0.clone();
        self.fwd.process(&mut buf);
        Field(buf)
    }

    pub fn ifft(&self, f: &Field) -> Field {
        let mut buf = f.0.clone();
        self.inv.process(&mut buf);
        let s = 1.0 / self.n as f64;
        for z in &mut buf {
            *z *= s;
        }
        Field(buf)
    }

    /// Spectral derivative of the given order: multiplication by `(ik)^order`
    /// in Fourier space, Nyquist mode zeroed for odd orders.
    pub fn derivative(&self, f: &Field, order: u32) -> Result<Field> {
        self.check_len(f.len())?;
        if order == 0 {
            return Ok(f.clone());
        }
        let mut hat = f.0.clone();
        self.fwd.process(&mut hat);
        let zero_nyquist = order % 2 == 1;
        let nyq = self.n / 2;
        for (m, h) in hat.iter_mut().enumerate() {
            if zero_nyquist && m == nyq {
                *h = Cx::new(0.0, 0.0);
            } else {
                *h *= Cx::new(0.0, self.k[m]).powu(order);
            }
        }
        self.inv.process(&mut hat);
        let s = 1.0 / self.n as f64;
        for z in &mut hat {
            *z *= s;
        }
        Ok(Field(hat))
    }

    /// Derivative of a real field; imaginary round-off is discarded, which is
    /// exact because the true derivative of a real field is real once the
    /// Nyquist mode of odd orders is zeroed.
    pub fn derivative_re(&self, f: &[f64], order: u32) -> Result<Vec<f64>> {
        let d = self.derivative(&Field::from_re(f.to_vec()), order)?;
        Ok(d.re())
    }

    /// Rectangle-rule quadrature (spectrally accurate on periodic data).
    pub fn integrate(&self, f: &[f64]) -> f64 {
        f.iter().sum::<f64>() * self.dx
    }

    pub fn integrate_cx(&self, f: &Field) -> Cx {
        f.0.iter().sum::<Cx>() * self.dx
    }

    /// Inverse of `d/dx` on zero-mean real fields: division by `ik` in
    /// Fourier space with the zero mode pinned to zero, so the result has
    /// zero mean and derivative equal to `f`.
    pub fn antiderivative_zero_mean(&self, f: &[f64]) -> Result<Vec<f64>> {
        self.check_len(f.len())?;
        let rms = (f.iter().map(|x| x * x).sum::<f64>() / self.n as f64).sqrt();
        let mean = f.iter().sum::<f64>() / self.n as f64;
        if mean.abs() > 1e-10 * rms.max(1e-300) {
            return Err(Error::NonzeroMean { mean });
        }
        let mut hat = Field::from_re(f.to_vec()).0;
        self.fwd.process(&mut hat);
        let nyq = self.n / 2;
        for (m, h) in hat.iter_mut().enumerate() {
            if m == 0 || m == nyq {
                *h = Cx::new(0.0, 0.0);
            } else {
                *h /= Cx::new(0.0, self.k[m]);
            }
        }
        self.inv.process(&mut hat);
        let s = 1.0 / self.n as f64;
        Ok(hat.iter().map(|z| z.re * s).collect())
    }

    /// Zero all modes with |k| above two thirds of the Nyquist wavenumber
    /// (2/3-rule dealiasing, exposed as a stress-test toggle).
    pub fn dealias_23(&self, f: &Field) -> Field {
        let mut hat = f.0.clone();
        self.fwd.process(&mut hat);
        let cut = self.k_max() * 2.0 / 3.0;
        for (m, h) in hat.iter_mut().enumerate() {
            if self.k[m].abs() > cut || m == self.n / 2 {
                *h = Cx::new(0.0, 0.0);
            }
        }
        self.inv.process(&mut hat);
        let s = 1.0 / self.n as f64;
        for z in &mut hat {
            *z *= s;
        }
        Field(hat)
    }

    /// Indices of nodes lying in `[a, b]`.
    pub fn interval_indices(&self, a: f64, b: f64) -> Vec<usize> {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, &x)| x >= a && x <= b)
            .map(|(j, _)| j)
            .collect()
    }

    /// Fold `y` into `[-L, L)`.
    pub fn wrap(&self, y: f64) -> f64 {
        let period = 2.0 * self.half_length;
        let w = y - period * (y / period).round();
        if w >= self.half_length {
            w - period
        } else {
            w
        }
    }
}
