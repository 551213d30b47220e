//! Closed-form solitary waves and structured initial data.
//!
//! These are the solver oracles: every constructor here satisfies its PDE
//! to spectral accuracy, which the tests assert by plugging the profiles
//! into the right-hand sides.  Two sign conventions differ from commonly
//! quoted forms because the equations force them (see the unit tests):
//! the Zakharov `n`-profile is negative, `n = -|u|^2/(1-c^2)`, and both
//! families carry `v = c n` so that `n_t + v_x = 0` along the motion.
//! For the same reason the Zakharov carrier rotates as `e^{+i omega t}`
//! and the KGZ time derivative is `u_t = -(i omega + c d/dx) u` for the
//! right-moving profile.

use num_complex::Complex64 as Cx;

use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::state::{KGZState, NLSState, ZakharovState};

/// Solitary-wave parameters.  `speed` is the traveling-wave speed (the
/// family's `c`, renamed to avoid a clash with the plasma frequency).
#[derive(Clone, Copy, Debug)]
pub struct SolitonParams {
    pub omega: f64,
    pub speed: f64,
    pub center: f64,
}

impl SolitonParams {
    pub fn new(omega: f64, speed: f64, center: f64) -> Self {
        SolitonParams { omega, speed, center }
    }

    /// Wu family exists for `4 omega + c^2 >= 0` and `1 - c^2 > 0`.
    pub fn wu_valid(&self) -> bool {
        4.0 * self.omega + self.speed * self.speed >= 0.0 && 1.0 - self.speed * self.speed > 0.0
    }

    /// Chen family exists for `1 - c^2 - omega^2 > 0`.
    pub fn chen_valid(&self) -> bool {
        1.0 - self.speed * self.speed - self.omega * self.omega > 0.0
    }
}

fn sech(x: f64) -> f64 {
    1.0 / x.cosh()
}

/// Wu solitary wave of the Zakharov system:
/// envelope `A sech(B(x - ct - x0))` with `B = sqrt(4w+c^2)/2`,
/// `A = sqrt((4w+c^2)(1-c^2)/2)`, carrier `exp(i(w t + q(x-ct-x0) + q c t))`
/// with `q = c/2`, density `n = -(2w + c^2/2) sech^2(B(x-ct-x0))` and
/// `v = c n`.
pub fn wu_soliton(p: &SolitonParams, t: f64, g: &Grid) -> Result<ZakharovState> {
    if !p.wu_valid() {
        return Err(Error::invalid(format!(
            "Wu soliton needs 4*omega + speed^2 >= 0 and 1 - speed^2 > 0; got omega={}, speed={}",
            p.omega, p.speed
        )));
    }
    let c = p.speed;
    let disc = 4.0 * p.omega + c * c;
    let b = disc.sqrt() / 2.0;
    let amp = (disc * (1.0 - c * c) / 2.0).sqrt();
    let q = c / 2.0;
    let n_amp = -(2.0 * p.omega + c * c / 2.0);
    let n_pts = g.num_points();
    let mut u = Field::zeros(n_pts);
    let mut n = vec![0.0; n_pts];
    let mut v = vec![0.0; n_pts];
    for (j, &x) in g.nodes().iter().enumerate() {
        let y = g.wrap(x - c * t - p.center);
        let env = amp * sech(b * y);
        let phase = p.omega * t + q * (y + c * t);
        u.0[j] = env * Cx::new(0.0, phase).exp();
        n[j] = n_amp * sech(b * y).powi(2);
        v[j] = c * n[j];
    }
    Ok(ZakharovState { u, n, v, t })
}

/// Chen solitary wave of the KGZ system (alpha = c_plasma = 1):
/// `u = A sech(B y) exp(i(-w t + q y))`, `y = x - ct - x0`,
/// `B = sqrt(1-c^2-w^2)/(1-c^2)`, `A = sqrt(2(1-c^2-w^2))`,
/// `q = w c/(1-c^2)`, `n = -A^2/(1-c^2) sech^2(B y)`, `v = c n`,
/// `u_t = -(i w u + c u_x)` (chain rule for the right-moving profile).
pub fn chen_soliton(p: &SolitonParams, t: f64, g: &Grid) -> Result<KGZState> {
    if !p.chen_valid() {
        return Err(Error::invalid(format!(
            "Chen soliton needs 1 - speed^2 - omega^2 > 0; got omega={}, speed={}",
            p.omega, p.speed
        )));
    }
    let c = p.speed;
    let one_mc2 = 1.0 - c * c;
    let disc = one_mc2 - p.omega * p.omega;
    let b = disc.sqrt() / one_mc2;
    let amp = (2.0 * disc).sqrt();
    let q = p.omega * c / one_mc2;
    let n_amp = -2.0 * disc / one_mc2;
    let n_pts = g.num_points();
    let mut u = Field::zeros(n_pts);
    let mut ut = Field::zeros(n_pts);
    let mut n = vec![0.0; n_pts];
    let mut v = vec![0.0; n_pts];
    let i = Cx::new(0.0, 1.0);
    for (j, &x) in g.nodes().iter().enumerate() {
        let y = g.wrap(x - c * t - p.center);
        let s = sech(b * y);
        let env = amp * s;
        let phase = Cx::new(0.0, -p.omega * t + q * y).exp();
        let uj = env * phase;
        // u_x = (iq - b tanh(b y)) u, exact for the profile
        let ux = (i * q - b * (b * y).tanh()) * uj;
        u.0[j] = uj;
        ut.0[j] = -(i * p.omega * uj + c * ux);
        n[j] = n_amp * s * s;
        v[j] = c * n[j];
    }
    Ok(KGZState { u, ut, n, v, t })
}

/// Ground-state soliton of the focusing cubic NLS: `sqrt(2) sech(x) e^{it}`.
pub fn nls_soliton(t: f64, g: &Grid) -> NLSState {
    let phase = Cx::new(0.0, t).exp();
    let u = Field(
        g.nodes().iter().map(|&x| 2f64.sqrt() * sech(x) * phase).collect(),
    );
    NLSState { u, t }
}

/// Odd-sector Gaussian data: `u = amp x e^{-x^2/w^2}` (odd),
/// `n = -amp^2 e^{-x^2/w^2}` (even), `v = amp^2 x e^{-x^2/w^2}` (odd).
pub fn odd_packet(amp: f64, width: f64, g: &Grid) -> ZakharovState {
    let w2 = width * width;
    let n_pts = g.num_points();
    let mut u = Field::zeros(n_pts);
    let mut n = vec![0.0; n_pts];
    let mut v = vec![0.0; n_pts];
    for (j, &x) in g.nodes().iter().enumerate() {
        let env = (-x * x / w2).exp();
        u.0[j] = Cx::new(amp * x * env, 0.0);
        n[j] = -amp * amp * env;
        v[j] = amp * amp * x * env;
    }
    ZakharovState { u, n, v, t: 0.0 }
}

/// KGZ variant of the odd packet with `u_t = 0`.
pub fn odd_packet_kgz(amp: f64, width: f64, g: &Grid) -> KGZState {
    let z = odd_packet(amp, width, g);
    KGZState { u: z.u, ut: Field::zeros(g.num_points()), n: z.n, v: z.v, t: 0.0 }
}

/// H1 norm of a complex field, `sqrt(int |u|^2 + |u_x|^2)`.
pub fn h1_norm(u: &Field, g: &Grid) -> f64 {
    let ux = g.derivative(u, 1).expect("shape");
    let dens: Vec<f64> =
        u.iter().zip(ux.iter()).map(|(a, b)| a.norm_sqr() + b.norm_sqr()).collect();
    g.integrate(&dens).sqrt()
}

/// Odd packet rescaled so that `||u||_{H1}` equals `target` exactly
/// (`u` scales linearly in `amp`; `n`, `v` quadratically).
/// Returns the state together with the measured norm.
pub fn odd_packet_h1(target: f64, width: f64, g: &Grid) -> (ZakharovState, f64) {
    if target == 0.0 {
        return (odd_packet(0.0, width, g), 0.0);
    }
    let probe = odd_packet(1.0, width, g);
    let base = h1_norm(&probe.u, g);
    let state = odd_packet(target / base, width, g);
    let measured = h1_norm(&state.u, g);
    (state, measured)
}

pub fn odd_packet_kgz_h1(target: f64, width: f64, g: &Grid) -> (KGZState, f64) {
    let (z, h1) = odd_packet_h1(target, width, g);
    (KGZState { u: z.u, ut: Field::zeros(g.num_points()), n: z.n, v: z.v, t: 0.0 }, h1)
}

/// Even Gaussian data for the far-field runs (no parity requirement):
/// `u = amp e^{-x^2/w^2}`, `n = n_amp e^{-x^2/w^2}`,
/// `v = v_amp x e^{-x^2/w^2}`.
pub fn gaussian_data(amp: f64, width: f64, n_amp: f64, v_amp: f64, g: &Grid) -> ZakharovState {
    let w2 = width * width;
    let n_pts = g.num_points();
    let mut u = Field::zeros(n_pts);
    let mut n = vec![0.0; n_pts];
    let mut v = vec![0.0; n_pts];
    for (j, &x) in g.nodes().iter().enumerate() {
        let env = (-x * x / w2).exp();
        u.0[j] = Cx::new(amp * env, 0.0);
        n[j] = n_amp * env;
        v[j] = v_amp * x * env;
    }
    ZakharovState { u, n, v, t: 0.0 }
}
