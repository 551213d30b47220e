//! Right-hand sides of the three first-order systems and time integration.
//!
//! Zakharov:            i u_t + u_xx = n u,
//!                      n_t = -alpha v_x,   v_t = -alpha (n + |u|^2)_x
//! Klein-Gordon-Zakharov: c^{-2} u_tt - u_xx + c^2 u = -n u, same wave pair
//! NLS:                 i u_t + u_xx +/- |u|^{p-1} u = 0
//!
//! Eliminating `v` from the wave pair recovers
//! `alpha^{-2} n_tt - n_xx = (|u|^2)_xx`.  One explicit RK4 scheme covers
//! all three systems (conservation is monitored, not enforced); Strang
//! splitting is available for NLS.

use num_complex::Complex64 as Cx;

use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::state::{KGZState, NLSState, ZakharovState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum System {
    Zakharov,
    Kgz,
    Nls,
}

impl std::fmt::Display for System {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            System::Zakharov => "zakharov",
            System::Kgz => "kgz",
            System::Nls => "nls",
        };
        write!(f, "{s}")
    }
}

/// Physical parameters: `alpha` is the ion sound speed, `c` the plasma
/// frequency (KGZ), `p`/`focusing` the NLS nonlinearity.
#[derive(Clone, Copy, Debug)]
pub struct ModelParams {
    pub system: System,
    pub alpha: f64,
    pub c: f64,
    pub p: f64,
    pub focusing: bool,
    /// 2/3-rule spectral truncation applied to the state after each step
    /// (off by default; stress-test toggle).
    pub dealias: bool,
}

impl ModelParams {
    pub fn zakharov(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::invalid(format!("alpha must be positive, got {alpha}")));
        }
        Ok(ModelParams { system: System::Zakharov, alpha, c: 1.0, p: 3.0, focusing: true, dealias: false })
    }

    pub fn kgz(alpha: f64, c: f64) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::invalid(format!("alpha must be positive, got {alpha}")));
        }
        if !(c > 0.0) {
            return Err(Error::invalid(format!("c must be positive, got {c}")));
        }
        Ok(ModelParams { system: System::Kgz, alpha, c, p: 3.0, focusing: true, dealias: false })
    }

    pub fn nls(p: f64, focusing: bool) -> Result<Self> {
        if !(p > 1.0 && p < 5.0) {
            return Err(Error::invalid(format!("p must lie in (1,5), got {p}")));
        }
        Ok(ModelParams { system: System::Nls, alpha: 1.0, c: 1.0, p, focusing, dealias: false })
    }

    /// Largest imaginary eigenvalue of the linear part; RK4 needs
    /// `dt * stiffness` inside its imaginary-axis stability interval.
    pub fn stiffness(&self, g: &Grid) -> f64 {
        let kmax = g.k_max();
        match self.system {
            System::Zakharov => (kmax * kmax).max(self.alpha * kmax),
            System::Nls => kmax * kmax,
            System::Kgz => (self.c * (kmax * kmax + self.c * self.c).sqrt()).max(self.alpha * kmax),
        }
    }

    /// Step-size guard: `pi / stiffness`.  For Schrödinger-type stiffness
    /// this equals `0.5 * dx^2 * (2/pi)`.
    pub fn dt_limit(&self, g: &Grid) -> f64 {
        std::f64::consts::PI / self.stiffness(g)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Rk4,
    StrangNls,
}

#[derive(Clone, Copy, Debug)]
pub struct StepperConfig {
    pub dt: f64,
    pub scheme: Scheme,
    pub record_every: usize,
    pub t_final: f64,
    /// Bypass the stiffness guard.
    pub force: bool,
}

impl StepperConfig {
    pub fn rk4(dt: f64, record_every: usize, t_final: f64) -> Self {
        StepperConfig { dt, scheme: Scheme::Rk4, record_every, t_final, force: false }
    }
}

/// Scalar diagnostics recorded along a trajectory.
#[derive(Clone, Debug, Default)]
pub struct TimeSeries {
    pub names: Vec<String>,
    pub times: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
}

impl TimeSeries {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.names.iter().position(|n| n == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Named scalar observer evaluated at every record.
pub struct Recorder<S> {
    pub name: String,
    pub eval: Box<dyn Fn(&S, &Grid) -> f64>,
}

impl<S> Recorder<S> {
    pub fn new(name: impl Into<String>, eval: impl Fn(&S, &Grid) -> f64 + 'static) -> Self {
        Recorder { name: name.into(), eval: Box::new(eval) }
    }
}

/// A state that can be advanced by the method-of-lines steppers.
///
/// `rhs` returns the time derivative stored in the same shape with the time
/// slot set to 1, so `axpy(a, k)` advances fields and clock together.
pub trait Flow: Clone {
    fn rhs(&self, g: &Grid, prm: &ModelParams) -> Self;
    fn axpy(&self, a: f64, k: &Self) -> Self;
    fn time(&self) -> f64;
    fn set_time(&mut self, t: f64);
    fn field_sups(&self) -> Vec<(&'static str, f64)>;
    fn apply_dealias(&mut self, g: &Grid);

    fn step(&self, g: &Grid, prm: &ModelParams, scheme: Scheme, dt: f64) -> Result<Self> {
        match scheme {
            Scheme::Rk4 => step_rk4(self, g, prm, dt),
            Scheme::StrangNls => {
                Err(Error::invalid("strang_nls scheme is only valid for the nls system"))
            }
        }
    }
}

/// Classical four-stage Runge-Kutta step of the full method-of-lines system.
pub fn step_rk4<S: Flow>(y: &S, g: &Grid, prm: &ModelParams, dt: f64) -> Result<S> {
    let before = y.field_sups();
    let k1 = y.rhs(g, prm);
    let k2 = y.axpy(0.5 * dt, &k1).rhs(g, prm);
    let k3 = y.axpy(0.5 * dt, &k2).rhs(g, prm);
    let k4 = y.axpy(dt, &k3).rhs(g, prm);
    let mut out = y
        .axpy(dt / 6.0, &k1)
        .axpy(dt / 3.0, &k2)
        .axpy(dt / 3.0, &k3)
        .axpy(dt / 6.0, &k4);
    out.set_time(y.time() + dt);
    for ((name, b), (_, a)) in before.iter().zip(out.field_sups()) {
        let floor = 1e-12;
        if *b > floor && (a > 10.0 * b || !a.is_finite()) {
            return Err(Error::UnstableStep { t: y.time(), field: name, ratio: a / b });
        }
    }
    Ok(out)
}

/// Zakharov right-hand side:
/// `u_t = i(u_xx - n u)`, `n_t = -alpha v_x`, `v_t = -alpha (n + |u|^2)_x`.
pub fn zakharov_rhs(s: &ZakharovState, g: &Grid, prm: &ModelParams) -> ZakharovState {
    let uxx = g.derivative(&s.u, 2).expect("shape");
    let i = Cx::new(0.0, 1.0);
    let ut: Vec<Cx> =
        s.u.iter().zip(uxx.iter()).zip(&s.n).map(|((u, uxx), n)| i * (uxx - n * u)).collect();
    let vx = g.derivative_re(&s.v, 1).expect("shape");
    let nt: Vec<f64> = vx.iter().map(|d| -prm.alpha * d).collect();
    let nu2: Vec<f64> = s.n.iter().zip(s.u.iter()).map(|(n, u)| n + u.norm_sqr()).collect();
    let vt: Vec<f64> =
        g.derivative_re(&nu2, 1).expect("shape").iter().map(|d| -prm.alpha * d).collect();
    ZakharovState { u: Field(ut), n: nt, v: vt, t: 1.0 }
}

/// KGZ right-hand side in first-order form: `u_t = ut`,
/// `ut_t = c^2 u_xx - c^4 u - c^2 n u`, plus the Zakharov wave pair.
pub fn kgz_rhs(s: &KGZState, g: &Grid, prm: &ModelParams) -> KGZState {
    let c2 = prm.c * prm.c;
    let uxx = g.derivative(&s.u, 2).expect("shape");
    let utt: Vec<Cx> = s
        .u
        .iter()
        .zip(uxx.iter())
        .zip(&s.n)
        .map(|((u, uxx), n)| c2 * (uxx - c2 * u - n * u))
        .collect();
    let vx = g.derivative_re(&s.v, 1).expect("shape");
    let nt: Vec<f64> = vx.iter().map(|d| -prm.alpha * d).collect();
    let nu2: Vec<f64> = s.n.iter().zip(s.u.iter()).map(|(n, u)| n + u.norm_sqr()).collect();
    let vt: Vec<f64> =
        g.derivative_re(&nu2, 1).expect("shape").iter().map(|d| -prm.alpha * d).collect();
    KGZState { u: s.ut.clone(), ut: Field(utt), n: nt, v: vt, t: 1.0 }
}

/// NLS right-hand side: `u_t = i(u_xx +/- |u|^{p-1} u)`.
pub fn nls_rhs(s: &NLSState, g: &Grid, prm: &ModelParams) -> NLSState {
    let uxx = g.derivative(&s.u, 2).expect("shape");
    let sign = if prm.focusing { 1.0 } else { -1.0 };
    let i = Cx::new(0.0, 1.0);
    let ut: Vec<Cx> = s
        .u
        .iter()
        .zip(uxx.iter())
        .map(|(u, uxx)| i * (uxx + sign * u.norm().powf(prm.p - 1.0) * u))
        .collect();
    NLSState { u: Field(ut), t: 1.0 }
}

impl Flow for ZakharovState {
    fn rhs(&self, g: &Grid, prm: &ModelParams) -> Self {
        zakharov_rhs(self, g, prm)
    }

    fn axpy(&self, a: f64, k: &Self) -> Self {
        ZakharovState {
            u: Field(self.u.iter().zip(k.u.iter()).map(|(x, d)| x + a * d).collect()),
            n: self.n.iter().zip(&k.n).map(|(x, d)| x + a * d).collect(),
            v: self.v.iter().zip(&k.v).map(|(x, d)| x + a * d).collect(),
            t: self.t + a * k.t,
        }
    }

    fn time(&self) -> f64 {
        self.t
    }

    fn set_time(&mut self, t: f64) {
        self.t = t;
    }

    fn field_sups(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("u", self.u.sup()),
            ("n", self.n.iter().fold(0.0, |m, x| x.abs().max(m))),
            ("v", self.v.iter().fold(0.0, |m, x| x.abs().max(m))),
        ]
    }

    fn apply_dealias(&mut self, g: &Grid) {
        self.u = g.dealias_23(&self.u);
        self.n = g.dealias_23(&Field::from_re(self.n.clone())).re();
        self.v = g.dealias_23(&Field::from_re(self.v.clone())).re();
    }
}

impl Flow for KGZState {
    fn rhs(&self, g: &Grid, prm: &ModelParams) -> Self {
        kgz_rhs(self, g, prm)
    }

    fn axpy(&self, a: f64, k: &Self) -> Self {
        KGZState {
            u: Field(self.u.iter().zip(k.u.iter()).map(|(x, d)| x + a * d).collect()),
            ut: Field(self.ut.iter().zip(k.ut.iter()).map(|(x, d)| x + a * d).collect()),
            n: self.n.iter().zip(&k.n).map(|(x, d)| x + a * d).collect(),
            v: self.v.iter().zip(&k.v).map(|(x, d)| x + a * d).collect(),
            t: self.t + a * k.t,
        }
    }

    fn time(&self) -> f64 {
        self.t
    }

    fn set_time(&mut self, t: f64) {
        self.t = t;
    }

    fn field_sups(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("u", self.u.sup()),
            ("ut", self.ut.sup()),
            ("n", self.n.iter().fold(0.0, |m, x| x.abs().max(m))),
            ("v", self.v.iter().fold(0.0, |m, x| x.abs().max(m))),
        ]
    }

    fn apply_dealias(&mut self, g: &Grid) {
        self.u = g.dealias_23(&self.u);
        self.ut = g.dealias_23(&self.ut);
        self.n = g.dealias_23(&Field::from_re(self.n.clone())).re();
        self.v = g.dealias_23(&Field::from_re(self.v.clone())).re();
    }
}

impl Flow for NLSState {
    fn rhs(&self, g: &Grid, prm: &ModelParams) -> Self {
        nls_rhs(self, g, prm)
    }

    fn axpy(&self, a: f64, k: &Self) -> Self {
        NLSState {
            u: Field(self.u.iter().zip(k.u.iter()).map(|(x, d)| x + a * d).collect()),
            t: self.t + a * k.t,
        }
    }

    fn time(&self) -> f64 {
        self.t
    }

    fn set_time(&mut self, t: f64) {
        self.t = t;
    }

    fn field_sups(&self) -> Vec<(&'static str, f64)> {
        vec![("u", self.u.sup())]
    }

    fn apply_dealias(&mut self, g: &Grid) {
        self.u = g.dealias_23(&self.u);
    }

    fn step(&self, g: &Grid, prm: &ModelParams, scheme: Scheme, dt: f64) -> Result<Self> {
        match scheme {
            Scheme::Rk4 => step_rk4(self, g, prm, dt),
            Scheme::StrangNls => step_strang_nls(self, g, prm, dt),
        }
    }
}

/// Strang splitting for NLS: half-step pointwise nonlinear phase, exact
/// linear step in Fourier space, half-step nonlinear phase.  Both substeps
/// are L2 isometries, so mass is conserved to machine precision.
pub fn step_strang_nls(s: &NLSState, g: &Grid, prm: &ModelParams, dt: f64) -> Result<NLSState> {
    let sign = if prm.focusing { 1.0 } else { -1.0 };
    let half_phase = |u: &Field| -> Field {
        Field(
            u.iter()
                .map(|z| z * Cx::new(0.0, sign * z.norm().powf(prm.p - 1.0) * dt * 0.5).exp())
                .collect(),
        )
    };
    let mut u = half_phase(&s.u);
    let mut hat = g.fft(&u);
    for (m, h) in hat.iter_mut().enumerate() {
        let k = g.wavenumbers()[m];
        *h *= Cx::new(0.0, -k * k * dt).exp();
    }
    u = g.ifft(&hat);
    u = half_phase(&u);
    Ok(NLSState { u, t: s.t + dt })
}

/// Integrate to `cfg.t_final`, recording every `record_every` steps
/// (the initial and final states are always recorded).  Deterministic for
/// fixed inputs.
pub fn evolve<S: Flow>(
    state: &S,
    g: &Grid,
    prm: &ModelParams,
    cfg: &StepperConfig,
    observers: &[Recorder<S>],
) -> Result<(TimeSeries, S)> {
    if !(cfg.dt > 0.0) {
        return Err(Error::invalid(format!("dt must be positive, got {}", cfg.dt)));
    }
    if cfg.record_every == 0 {
        return Err(Error::invalid("record_every must be >= 1"));
    }
    let t0 = state.time();
    if cfg.t_final < t0 {
        return Err(Error::invalid(format!("t_final {} precedes state time {t0}", cfg.t_final)));
    }
    let guard = prm.dt_limit(g);
    if cfg.scheme == Scheme::Rk4 && cfg.dt > guard && !cfg.force {
        return Err(Error::invalid(format!(
            "dt = {} exceeds the stability guard {:.3e} for k_max = {:.3}; pass force to override",
            cfg.dt,
            guard,
            g.k_max()
        )));
    }

    let span = cfg.t_final - t0;
    let n_steps = (span / cfg.dt).round() as usize;
    let mut series = TimeSeries {
        names: observers.iter().map(|o| o.name.clone()).collect(),
        times: Vec::new(),
        rows: Vec::new(),
    };
    let mut y = state.clone();
    let record = |series: &mut TimeSeries, y: &S| {
        series.times.push(y.time());
        series.rows.push(observers.iter().map(|o| (o.eval)(y, g)).collect());
    };
    record(&mut series, &y);
    for i in 0..n_steps {
        y = y.step(g, prm, cfg.scheme, cfg.dt)?;
        // pin the clock to an exact multiple to avoid accumulation drift
        y.set_time(t0 + (i + 1) as f64 * cfg.dt);
        if prm.dealias {
            y.apply_dealias(g);
        }
        if (i + 1) % cfg.record_every == 0 || i + 1 == n_steps {
            record(&mut series, &y);
        }
    }
    Ok((series, y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact;
    use std::f64::consts::PI;

    fn small_grid() -> Grid {
        Grid::new(20.0, 256).unwrap()
    }

    fn sup_diff(a: &Field, b: &Field) -> f64 {
        a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn zero_state_has_zero_rhs() {
        let g = small_grid();
        let prm = ModelParams::zakharov(1.0).unwrap();
        let d = zakharov_rhs(&ZakharovState::zero(&g), &g, &prm);
        assert!(d.u.sup() == 0.0 && d.n.iter().all(|&x| x == 0.0) && d.v.iter().all(|&x| x == 0.0));

        let pk = ModelParams::kgz(1.0, 1.0).unwrap();
        let dk = kgz_rhs(&KGZState::zero(&g), &g, &pk);
        assert!(dk.u.sup() == 0.0 && dk.ut.sup() == 0.0);

        let pn = ModelParams::nls(3.0, true).unwrap();
        let dn = nls_rhs(&NLSState::zero(&g), &g, &pn);
        assert!(dn.u.sup() == 0.0);
    }

    #[test]
    fn zakharov_plane_wave_dispersion() {
        // u = e^{ikx}, n = v = 0  =>  u_t = -i k^2 u
        let g = Grid::new(PI, 64).unwrap();
        let prm = ModelParams::zakharov(1.0).unwrap();
        let k = 3.0;
        let u = Field(g.nodes().iter().map(|&x| Cx::new(0.0, k * x).exp()).collect());
        let s = ZakharovState { u: u.clone(), n: vec![0.0; 64], v: vec![0.0; 64], t: 0.0 };
        let d = zakharov_rhs(&s, &g, &prm);
        let expect = Field(u.iter().map(|z| Cx::new(0.0, -k * k) * z).collect());
        assert!(sup_diff(&d.u, &expect) < 1e-10);
    }

    #[test]
    fn kgz_linear_mode_dispersion() {
        // u = e^{ikx}, n = v = 0, alpha = c = 1  =>  u_tt = -(k^2+1) u
        let g = Grid::new(PI, 64).unwrap();
        let prm = ModelParams::kgz(1.0, 1.0).unwrap();
        let k = 4.0;
        let u = Field(g.nodes().iter().map(|&x| Cx::new(0.0, k * x).exp()).collect());
        let s = KGZState {
            u: u.clone(),
            ut: Field::zeros(64),
            n: vec![0.0; 64],
            v: vec![0.0; 64],
            t: 0.0,
        };
        let d = kgz_rhs(&s, &g, &prm);
        let expect = Field(u.iter().map(|z| -(k * k + 1.0) * z).collect());
        assert!(sup_diff(&d.ut, &expect) < 1e-9);
    }

    #[test]
    fn nls_soliton_relation_and_plane_wave() {
        let g = Grid::new(30.0, 1024).unwrap();
        let prm = ModelParams::nls(3.0, true).unwrap();
        // sqrt(2) sech(x): u_xx + |u|^2 u = u, so rhs = i u
        let s = exact::nls_soliton(0.0, &g);
        let d = nls_rhs(&s, &g, &prm);
        let expect = Field(s.u.iter().map(|z| Cx::new(0.0, 1.0) * z).collect());
        assert!(sup_diff(&d.u, &expect) < 1e-10);

        // plane wave amplitude a: u_t = i(-k^2 + a^2) u
        let gpi = Grid::new(PI, 64).unwrap();
        let (k, a) = (2.0, 1.5);
        let u = Field(gpi.nodes().iter().map(|&x| a * Cx::new(0.0, k * x).exp()).collect());
        let s = NLSState { u: u.clone(), t: 0.0 };
        let d = nls_rhs(&s, &gpi, &prm);
        let expect = Field(u.iter().map(|z| Cx::new(0.0, -k * k + a * a) * z).collect());
        assert!(sup_diff(&d.u, &expect) < 1e-9);
    }

    #[test]
    fn wu_stationary_profile_has_static_wave_part() {
        // n + |u|^2 = 0 for the omega=1, c=0 Wu profile, so n_t = v_t = 0
        let g = Grid::new(30.0, 1024).unwrap();
        let prm = ModelParams::zakharov(1.0).unwrap();
        let s = exact::wu_soliton(&exact::SolitonParams::new(1.0, 0.0, 0.0), 0.0, &g).unwrap();
        let d = zakharov_rhs(&s, &g, &prm);
        let nt_sup = d.n.iter().fold(0.0f64, |m, x| x.abs().max(m));
        let vt_sup = d.v.iter().fold(0.0f64, |m, x| x.abs().max(m));
        assert!(nt_sup < 1e-8, "n_t sup {nt_sup}");
        assert!(vt_sup < 1e-8, "v_t sup {vt_sup}");
    }

    #[test]
    fn chen_stationary_is_a_fixed_point() {
        let g = Grid::new(30.0, 1024).unwrap();
        let prm = ModelParams::kgz(1.0, 1.0).unwrap();
        let s = exact::chen_soliton(&exact::SolitonParams::new(0.0, 0.0, 0.0), 0.0, &g).unwrap();
        let d = kgz_rhs(&s, &g, &prm);
        assert!(d.u.sup() < 1e-8);
        assert!(d.ut.sup() < 1e-8, "-u_xx + u + nu residual {}", d.ut.sup());
        assert!(d.n.iter().all(|x| x.abs() < 1e-8));
        assert!(d.v.iter().all(|x| x.abs() < 1e-8));
    }

    #[test]
    fn rk4_zero_state_stays_zero() {
        let g = small_grid();
        let prm = ModelParams::zakharov(1.0).unwrap();
        let s = step_rk4(&ZakharovState::zero(&g), &g, &prm, 1e-3).unwrap();
        assert!(s.u.sup() == 0.0);
        assert!((s.t - 1e-3).abs() < 1e-18);
    }

    #[test]
    fn rk4_linear_schrodinger_phase() {
        // e^{ix} under i u_t + u_xx = 0 rotates by e^{-i dt}
        let g = Grid::new(PI, 64).unwrap();
        let prm = ModelParams::zakharov(1.0).unwrap();
        let u = Field(g.nodes().iter().map(|&x| Cx::new(0.0, x).exp()).collect());
        let s = ZakharovState { u: u.clone(), n: vec![0.0; 64], v: vec![0.0; 64], t: 0.0 };
        let dt = 1e-3;
        let out = step_rk4(&s, &g, &prm, dt).unwrap();
        let expect = Field(u.iter().map(|z| z * Cx::new(0.0, -dt).exp()).collect());
        assert!(sup_diff(&out.u, &expect) < 1e-14, "one-step error above O(dt^5)");
    }

    #[test]
    fn rk4_one_step_error_is_fifth_order() {
        // Richardson: one step at dt vs dt/2, each against a dt/10 reference;
        // the local error ratio should be ~2^5 = 32.
        let g = small_grid();
        let prm = ModelParams::zakharov(1.0).unwrap();
        let s = exact::wu_soliton(&exact::SolitonParams::new(1.0, 0.4, 0.0), 0.0, &g).unwrap();
        let err_one_step = |dt: f64| -> f64 {
            let coarse = step_rk4(&s, &g, &prm, dt).unwrap();
            let mut fine = s.clone();
            for _ in 0..10 {
                fine = step_rk4(&fine, &g, &prm, dt / 10.0).unwrap();
            }
            sup_diff(&coarse.u, &fine.u)
        };
        let dt = 0.02;
        let e1 = err_one_step(dt);
        let e2 = err_one_step(dt / 2.0);
        let ratio = e1 / e2;
        assert!(
            (16.0..64.0).contains(&ratio),
            "local order-5 ratio expected ~32, got {ratio} (e1={e1:.3e}, e2={e2:.3e})"
        );
    }

    #[test]
    fn strang_reduces_to_exact_linear_propagator() {
        let g = Grid::new(PI, 64).unwrap();
        let prm = ModelParams::nls(3.0, true).unwrap();
        let amp = 1e-9;
        let u = Field(g.nodes().iter().map(|&x| amp * Cx::new(0.0, 2.0 * x).exp()).collect());
        let s = NLSState { u: u.clone(), t: 0.0 };
        let dt = 0.1;
        let out = step_strang_nls(&s, &g, &prm, dt).unwrap();
        let expect = Field(u.iter().map(|z| z * Cx::new(0.0, -4.0 * dt).exp()).collect());
        assert!(sup_diff(&out.u, &expect) < amp * 1e-6 + 1e-12);
    }

    #[test]
    fn strang_conserves_mass_exactly() {
        let g = small_grid();
        let prm = ModelParams::nls(3.0, true).unwrap();
        let mut s = exact::nls_soliton(0.0, &g);
        let mass = |s: &NLSState| g.integrate(&s.u.iter().map(|z| z.norm_sqr()).collect::<Vec<_>>());
        let m0 = mass(&s);
        for _ in 0..100 {
            s = step_strang_nls(&s, &g, &prm, 0.05).unwrap();
        }
        assert!((mass(&s) - m0).abs() < 1e-12 * m0, "strang mass drift");
    }

    #[test]
    fn strang_soliton_error_is_second_order() {
        let g = small_grid();
        let prm = ModelParams::nls(3.0, true).unwrap();
        let s0 = exact::nls_soliton(0.0, &g);
        let err = |dt: f64| -> f64 {
            let steps = (1.0 / dt).round() as usize;
            let mut s = s0.clone();
            for _ in 0..steps {
                s = step_strang_nls(&s, &g, &prm, dt).unwrap();
            }
            let exact_t1 = exact::nls_soliton(1.0, &g);
            let d2: f64 = s
                .u
                .iter()
                .zip(exact_t1.u.iter())
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                * g.dx();
            d2.sqrt()
        };
        let e1 = err(0.02);
        let e2 = err(0.01);
        let order = (e1 / e2).log2();
        assert!((1.7..2.3).contains(&order), "strang order ~2 expected, got {order}");
    }

    #[test]
    fn evolve_zero_span_returns_initial_record() {
        let g = small_grid();
        let prm = ModelParams::zakharov(1.0).unwrap();
        let s = ZakharovState::zero(&g);
        let cfg = StepperConfig::rk4(1e-3, 1, 0.0);
        let (series, fin) = evolve(&s, &g, &prm, &cfg, &[Recorder::new("sup", |s: &ZakharovState, _| s.u.sup())]).unwrap();
        assert_eq!(series.len(), 1);
        assert_eq!(fin.t, 0.0);
    }

    #[test]
    fn evolve_rejects_dt_above_guard() {
        let g = Grid::new(PI, 256).unwrap(); // dx small -> strict guard
        let prm = ModelParams::zakharov(1.0).unwrap();
        let s = ZakharovState::zero(&g);
        let cfg = StepperConfig::rk4(0.1, 1, 1.0);
        assert!(evolve(&s, &g, &prm, &cfg, &[]).is_err());
        let forced = StepperConfig { force: true, ..cfg };
        assert!(evolve(&s, &g, &prm, &forced, &[]).is_ok());
    }

    #[test]
    fn unstable_step_is_reported() {
        // dt far above the stability limit on non-trivial data blows up
        let g = Grid::new(PI, 256).unwrap();
        let prm = ModelParams::zakharov(1.0).unwrap();
        let u = Field(
            g.nodes()
                .iter()
                .map(|&x| Cx::new((-x * x * 40.0).exp(), 0.0))
                .collect(),
        );
        let s = ZakharovState { u, n: vec![0.0; 256], v: vec![0.0; 256], t: 0.0 };
        let cfg = StepperConfig { force: true, ..StepperConfig::rk4(0.5, 1, 5.0) };
        match evolve(&s, &g, &prm, &cfg, &[]) {
            Err(Error::UnstableStep { .. }) => {}
            other => panic!("expected unstable_step, got {other:?}"),
        }
    }

    #[test]
    fn time_reversibility_of_zakharov_flow() {
        let g = small_grid();
        let prm = ModelParams::zakharov(1.0).unwrap();
        let s0 = exact::odd_packet(0.5, 2.0, &g);
        let dt = 1e-3;
        let mut s = s0.clone();
        for _ in 0..200 {
            s = step_rk4(&s, &g, &prm, dt).unwrap();
        }
        for _ in 0..200 {
            s = step_rk4(&s, &g, &prm, -dt).unwrap();
        }
        let err = sup_diff(&s.u, &s0.u);
        assert!(err < 1e-10, "forward-backward error {err}");
    }

    #[test]
    fn eliminating_v_recovers_wave_equation() {
        // centered second difference of n in time ~ alpha^2 (n + |u|^2)_xx
        let g = small_grid();
        let alpha = 2.0;
        let prm = ModelParams::zakharov(alpha).unwrap();
        let s0 = exact::odd_packet(1.0, 2.0, &g);
        let dt = 5e-4;
        let s1 = step_rk4(&s0, &g, &prm, dt).unwrap();
        let s2 = step_rk4(&s1, &g, &prm, dt).unwrap();
        let nu2: Vec<f64> =
            s1.n.iter().zip(s1.u.iter()).map(|(n, u)| n + u.norm_sqr()).collect();
        let rhs = g.derivative_re(&nu2, 2).unwrap();
        let mut max_err = 0.0f64;
        let mut scale = 0.0f64;
        for j in 0..g.num_points() {
            let ntt = (s2.n[j] - 2.0 * s1.n[j] + s0.n[j]) / (dt * dt);
            max_err = max_err.max((ntt - alpha * alpha * rhs[j]).abs());
            scale = scale.max((alpha * alpha * rhs[j]).abs());
        }
        assert!(max_err < 1e-3 * scale.max(1.0), "wave-elimination residual {max_err}");
    }

    #[test]
    fn odd_sector_is_flow_invariant() {
        use crate::state::{parity_violation, StateRef};
        let g = small_grid();
        let prm = ModelParams::zakharov(1.0).unwrap();
        let s = exact::odd_packet(0.5, 2.0, &g);
        let cfg = StepperConfig::rk4(2e-3, 100, 2.0);
        let (_, fin) = evolve(&s, &g, &prm, &cfg, &[]).unwrap();
        let viol = parity_violation(StateRef::Zakharov(&fin), &g);
        assert!(viol < 1e-8, "parity violation after evolution: {viol}");
    }

    #[test]
    fn dealias_toggle_changes_marginally_resolved_run() {
        let g = Grid::new(10.0, 64).unwrap(); // deliberately coarse
        let mut prm = ModelParams::zakharov(1.0).unwrap();
        let s = exact::odd_packet(1.5, 1.0, &g);
        let cfg = StepperConfig::rk4(1e-3, 100, 0.5);
        let (_, plain) = evolve(&s, &g, &prm, &cfg, &[]).unwrap();
        prm.dealias = true;
        let (_, filtered) = evolve(&s, &g, &prm, &cfg, &[]).unwrap();
        let diff = sup_diff(&plain.u, &filtered.u);
        assert!(diff > 1e-12, "2/3-rule toggle should alter a coarse run");
        assert!(diff < 1e-1, "aliasing correction should stay small, got {diff}");
    }
}
