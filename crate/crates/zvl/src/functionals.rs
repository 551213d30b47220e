//! Conserved quantities, weight families, moving curves and a-priori bounds.
//!
//! Conserved functionals (alpha = 1 forms):
//!   mass     M = int |u|^2
//!   energy   E_s  = int |u_x|^2 + (n^2 + v^2)/2 + n |u|^2
//!   momentum P_s  = Im int u conj(u)_x - int v n
//!   KGZ      E_kg = int |u|^2 + |u_x|^2 + |u_t|^2 + (n^2+v^2)/2 + n|u|^2
//!            P_kg = int Re(u_t conj(u)_x) - (1/2) int v n
//!
//! Weight families: `phi = lambda tanh(x/lambda)` (virial I), a C^2
//! decreasing cutoff and a smooth bump on [-3/4, -1/4] (moving functionals
//! K and J), plain `sech` (localized conclusion functionals), and the
//! constant weight (recovers plain momentum as a degenerate virial).



use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::state::{KGZState, ZakharovState};

// ---------------------------------------------------------------- norms --

pub fn l2_norm_re(f: &[f64], g: &Grid) -> f64 {
    (f.iter().map(|x| x * x).sum::<f64>() * g.dx()).sqrt()
}

pub fn l2_norm(f: &Field, g: &Grid) -> f64 {
    (f.iter().map(|z| z.norm_sqr()).sum::<f64>() * g.dx()).sqrt()
}

pub fn h1_norm(f: &Field, g: &Grid) -> f64 {
    let fx = g.derivative(f, 1).expect("shape");
    let dens: Vec<f64> =
        f.iter().zip(fx.iter()).map(|(a, b)| a.norm_sqr() + b.norm_sqr()).collect();
    g.integrate(&dens).sqrt()
}

pub fn h2_norm(f: &Field, g: &Grid) -> f64 {
    let fx = g.derivative(f, 1).expect("shape");
    let fxx = g.derivative(f, 2).expect("shape");
    let dens: Vec<f64> = (0..f.len())
        .map(|j| f[j].norm_sqr() + fx[j].norm_sqr() + fxx[j].norm_sqr())
        .collect();
    g.integrate(&dens).sqrt()
}

/// L2 norm restricted to the nodes of `[a, b]`.
pub fn l2_interval(f: &Field, g: &Grid, a: f64, b: f64) -> f64 {
    let s: f64 = g
        .interval_indices(a, b)
        .into_iter()
        .map(|j| f[j].norm_sqr())
        .sum();
    (s * g.dx()).sqrt()
}

pub fn l2_interval_re(f: &[f64], g: &Grid, a: f64, b: f64) -> f64 {
    let s: f64 = g.interval_indices(a, b).into_iter().map(|j| f[j] * f[j]).sum();
    (s * g.dx()).sqrt()
}

pub fn linf_interval(f: &Field, g: &Grid, a: f64, b: f64) -> f64 {
    g.interval_indices(a, b).into_iter().map(|j| f[j].norm()).fold(0.0, f64::max)
}

pub fn h1_interval(f: &Field, g: &Grid, a: f64, b: f64) -> f64 {
    let fx = g.derivative(f, 1).expect("shape");
    let s: f64 = g
        .interval_indices(a, b)
        .into_iter()
        .map(|j| f[j].norm_sqr() + fx[j].norm_sqr())
        .sum();
    (s * g.dx()).sqrt()
}

/// L2 norm over a union of intervals (the mirrored far-field regions).
pub fn l2_regions(f: &Field, g: &Grid, regions: &[(f64, f64)]) -> f64 {
    let s: f64 = regions
        .iter()
        .flat_map(|&(a, b)| g.interval_indices(a, b))
        .map(|j| f[j].norm_sqr())
        .sum();
    (s * g.dx()).sqrt()
}

pub fn l2_regions_re(f: &[f64], g: &Grid, regions: &[(f64, f64)]) -> f64 {
    let s: f64 = regions
        .iter()
        .flat_map(|&(a, b)| g.interval_indices(a, b))
        .map(|j| f[j] * f[j])
        .sum();
    (s * g.dx()).sqrt()
}

pub fn h1_regions(f: &Field, g: &Grid, regions: &[(f64, f64)]) -> f64 {
    let fx = g.derivative(f, 1).expect("shape");
    let s: f64 = regions
        .iter()
        .flat_map(|&(a, b)| g.interval_indices(a, b))
        .map(|j| f[j].norm_sqr() + fx[j].norm_sqr())
        .sum();
    (s * g.dx()).sqrt()
}

// --------------------------------------------------- conserved quantities --

/// `int |u|^2`.
pub fn mass(u: &Field, g: &Grid) -> f64 {
    g.integrate(&u.iter().map(|z| z.norm_sqr()).collect::<Vec<_>>())
}

/// Zakharov energy `int |u_x|^2 + (n^2 + v^2)/2 + n |u|^2`.
pub fn energy_zakharov(s: &ZakharovState, g: &Grid) -> f64 {
    let ux = g.derivative(&s.u, 1).expect("shape");
    let dens: Vec<f64> = (0..g.num_points())
        .map(|j| {
            ux[j].norm_sqr() + 0.5 * (s.n[j] * s.n[j] + s.v[j] * s.v[j])
                + s.n[j] * s.u[j].norm_sqr()
        })
        .collect();
    g.integrate(&dens)
}

/// Zakharov momentum `Im int u conj(u)_x - int v n`.
pub fn momentum_zakharov(s: &ZakharovState, g: &Grid) -> f64 {
    let ux = g.derivative(&s.u, 1).expect("shape");
    let dens: Vec<f64> = (0..g.num_points())
        .map(|j| (s.u[j] * ux[j].conj()).im - s.v[j] * s.n[j])
        .collect();
    g.integrate(&dens)
}

/// KGZ energy (alpha = c = 1 form).
pub fn energy_kgz(s: &KGZState, g: &Grid) -> f64 {
    let ux = g.derivative(&s.u, 1).expect("shape");
    let dens: Vec<f64> = (0..g.num_points())
        .map(|j| {
            s.u[j].norm_sqr() + ux[j].norm_sqr() + s.ut[j].norm_sqr()
                + 0.5 * (s.n[j] * s.n[j] + s.v[j] * s.v[j])
                + s.n[j] * s.u[j].norm_sqr()
        })
        .collect();
    g.integrate(&dens)
}

/// KGZ momentum `int Re(u_t conj(u)_x) - (1/2) int v n`.
pub fn momentum_kgz(s: &KGZState, g: &Grid) -> f64 {
    let ux = g.derivative(&s.u, 1).expect("shape");
    let dens: Vec<f64> = (0..g.num_points())
        .map(|j| (s.ut[j] * ux[j].conj()).re - 0.5 * s.v[j] * s.n[j])
        .collect();
    g.integrate(&dens)
}

// ------------------------------------------------------------- weights --

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WeightFamily {
    /// `phi = lambda tanh(x/lambda)`, `phi' = sech^2(x/lambda) > 0`.
    TanhLambda { lambda: f64 },
    /// C^2 decreasing, 1 on `s <= -1`, 0 on `s >= 0` (quintic smoothstep).
    Cutoff,
    /// Smooth bump supported on `[-3/4, -1/4]`, values in `[0, 1]`.
    Bump,
    /// Plain `sech(x)`.
    SechPlain,
    /// `phi = 1`: the degenerate weight that turns the virial `I` into the
    /// plain momentum.
    ConstOne,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightProfile {
    pub family: WeightFamily,
}

fn smoothstep5(r: f64) -> f64 {
    ((6.0 * r - 15.0) * r + 10.0) * r * r * r
}

fn smoothstep5_d(r: f64) -> f64 {
    ((30.0 * r - 60.0) * r + 30.0) * r * r
}

fn smoothstep5_d3(r: f64) -> f64 {
    (360.0 * r - 360.0) * r + 60.0
}

impl WeightProfile {
    pub fn tanh_lambda(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(Error::invalid(format!("lambda must be positive, got {lambda}")));
        }
        Ok(WeightProfile { family: WeightFamily::TanhLambda { lambda } })
    }

    pub fn cutoff() -> Self {
        WeightProfile { family: WeightFamily::Cutoff }
    }

    pub fn bump() -> Self {
        WeightProfile { family: WeightFamily::Bump }
    }

    pub fn sech_plain() -> Self {
        WeightProfile { family: WeightFamily::SechPlain }
    }

    pub fn const_one() -> Self {
        WeightProfile { family: WeightFamily::ConstOne }
    }

    pub fn phi(&self, x: f64) -> f64 {
        match self.family {
            WeightFamily::TanhLambda { lambda } => lambda * (x / lambda).tanh(),
            WeightFamily::Cutoff => {
                if x <= -1.0 {
                    1.0
                } else if x >= 0.0 {
                    0.0
                } else {
                    1.0 - smoothstep5(x + 1.0)
                }
            }
            WeightFamily::Bump => {
                let z = 4.0 * x + 2.0;
                if z.abs() >= 1.0 {
                    0.0
                } else {
                    (1.0 - 1.0 / (1.0 - z * z)).exp()
                }
            }
            WeightFamily::SechPlain => 1.0 / x.cosh(),
            WeightFamily::ConstOne => 1.0,
        }
    }

    pub fn phi_d(&self, x: f64) -> f64 {
        match self.family {
            WeightFamily::TanhLambda { lambda } => {
                let s = 1.0 / (x / lambda).cosh();
                s * s
            }
            WeightFamily::Cutoff => {
                if (-1.0..0.0).contains(&x) {
                    -smoothstep5_d(x + 1.0)
                } else {
                    0.0
                }
            }
            WeightFamily::Bump => {
                let z = 4.0 * x + 2.0;
                if z.abs() >= 1.0 {
                    0.0
                } else {
                    let d = 1.0 - z * z;
                    self.phi(x) * (-2.0 * z / (d * d)) * 4.0
                }
            }
            WeightFamily::SechPlain => {
                let s = 1.0 / x.cosh();
                -s * x.tanh()
            }
            WeightFamily::ConstOne => 0.0,
        }
    }

    pub fn phi_d3(&self, x: f64) -> f64 {
        match self.family {
            WeightFamily::TanhLambda { lambda } => {
                // phi''' = (2/lambda^2) sech^2(s) (2 - 3 sech^2(s)), s = x/lambda
                let s2 = {
                    let s = 1.0 / (x / lambda).cosh();
                    s * s
                };
                2.0 / (lambda * lambda) * s2 * (2.0 - 3.0 * s2)
            }
            WeightFamily::Cutoff => {
                if (-1.0..0.0).contains(&x) {
                    -smoothstep5_d3(x + 1.0)
                } else {
                    0.0
                }
            }
            WeightFamily::SechPlain => {
                // d^3/dx^3 sech = -tanh sech (tanh^2 - 5 sech^2)
                let s = 1.0 / x.cosh();
                let t = x.tanh();
                -t * s * (t * t - 5.0 * s * s)
            }
            WeightFamily::ConstOne => 0.0,
            WeightFamily::Bump => {
                // not used by any identity; finite differences keep the
                // surface total without an unwieldy closed form
                let h = 1e-4;
                (self.phi_d(x + h) - 2.0 * self.phi_d(x) + self.phi_d(x - h)) / (h * h)
            }
        }
    }

    /// `omega = sqrt(phi')` where `phi' >= 0`.
    pub fn omega(&self, x: f64) -> f64 {
        match self.family {
            WeightFamily::TanhLambda { lambda } => 1.0 / (x / lambda).cosh(),
            _ => self.phi_d(x).max(0.0).sqrt(),
        }
    }

    /// Does `phi' >= 0` hold everywhere (required for weighted norms)?
    pub fn nonnegative_density(&self) -> bool {
        matches!(self.family, WeightFamily::TanhLambda { .. } | WeightFamily::ConstOne)
    }
}

/// `int phi' |f|^2`.
pub fn weighted_l2_sq(f: &Field, w: &WeightProfile, g: &Grid) -> Result<f64> {
    if !w.nonnegative_density() {
        return Err(Error::NegativeWeight(format!(
            "{:?} has sign-changing phi'; weighted norms need phi' >= 0",
            w.family
        )));
    }
    let dens: Vec<f64> = g
        .nodes()
        .iter()
        .zip(f.iter())
        .map(|(&x, z)| w.phi_d(x) * z.norm_sqr())
        .collect();
    Ok(g.integrate(&dens))
}

pub fn weighted_l2_sq_re(f: &[f64], w: &WeightProfile, g: &Grid) -> Result<f64> {
    if !w.nonnegative_density() {
        return Err(Error::NegativeWeight(format!(
            "{:?} has sign-changing phi'; weighted norms need phi' >= 0",
            w.family
        )));
    }
    let dens: Vec<f64> =
        g.nodes().iter().zip(f.iter()).map(|(&x, v)| w.phi_d(x) * v * v).collect();
    Ok(g.integrate(&dens))
}

/// `int phi' (|f_x|^2 + |f|^2)`.
pub fn weighted_h1_sq(f: &Field, w: &WeightProfile, g: &Grid) -> Result<f64> {
    let fx = g.derivative(f, 1).expect("shape");
    Ok(weighted_l2_sq(f, w, g)? + weighted_l2_sq(&fx, w, g)?)
}

// --------------------------------------------------------------- curves --

/// How the regularity factor `f(t)` in `lambda(t) = t log^{1+delta}(t) f(t)`
/// is supplied.
#[derive(Clone, Debug)]
pub enum FMode {
    Constant(f64),
    /// Monotone piecewise-linear envelope of measured `||u||_{H2}` samples.
    Envelope(Envelope),
}

/// Cumulative-max table evaluated by linear interpolation.
#[derive(Clone, Debug, Default)]
pub struct Envelope {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl Envelope {
    pub fn from_samples(times: &[f64], values: &[f64]) -> Envelope {
        let mut out = Envelope::default();
        let mut m = f64::NEG_INFINITY;
        for (&t, &v) in times.iter().zip(values) {
            m = m.max(v);
            out.times.push(t);
            out.values.push(m);
        }
        out
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self.times.iter().position(|&ti| ti >= t) {
            Some(0) => self.values[0],
            Some(i) => {
                let (t0, t1) = (self.times[i - 1], self.times[i]);
                let (v0, v1) = (self.values[i - 1], self.values[i]);
                v0 + (v1 - v0) * (t - t0) / (t1 - t0)
            }
            None => *self.values.last().unwrap_or(&1.0),
        }
    }

    pub fn slope(&self, t: f64) -> f64 {
        match self.times.iter().position(|&ti| ti >= t) {
            Some(0) | None => 0.0,
            Some(i) => {
                (self.values[i] - self.values[i - 1]) / (self.times[i] - self.times[i - 1])
            }
        }
    }
}

/// Far-field curve `lambda(t) = t log^{1+delta}(t) f(t)`, `mu = lambda`,
/// defined for `t >= 2`.  The mirrored regions are
/// `[-mu - 3 lambda/4, -mu - lambda/4]` and `[mu + lambda/4, mu + 3 lambda/4]`
/// (where `(x + mu)/lambda` or its mirror lies in `[-3/4, -1/4]`).
#[derive(Clone, Debug)]
pub struct Curve {
    pub delta: f64,
    pub f: FMode,
}

impl Curve {
    pub fn new(delta: f64, f: FMode) -> Result<Curve> {
        if !(delta > 0.0) {
            return Err(Error::invalid(format!("delta must be positive, got {delta}")));
        }
        if let FMode::Constant(c) = f {
            if !(c > 0.0) {
                return Err(Error::invalid(format!("constant f must be positive, got {c}")));
            }
        }
        Ok(Curve { delta, f })
    }

    fn f_val(&self, t: f64) -> f64 {
        match &self.f {
            FMode::Constant(c) => *c,
            FMode::Envelope(e) => e.eval(t).max(1e-12),
        }
    }

    fn f_dot(&self, t: f64) -> f64 {
        match &self.f {
            FMode::Constant(_) => 0.0,
            FMode::Envelope(e) => e.slope(t),
        }
    }

    pub fn check_time(&self, t: f64) -> Result<()> {
        if t < 2.0 {
            return Err(Error::invalid(format!("curve domain is t >= 2, got {t}")));
        }
        Ok(())
    }

    pub fn lambda(&self, t: f64) -> f64 {
        t * t.ln().powf(1.0 + self.delta) * self.f_val(t)
    }

    pub fn lambda_dot(&self, t: f64) -> f64 {
        let l = t.ln();
        let base = l.powf(1.0 + self.delta) + (1.0 + self.delta) * l.powf(self.delta);
        base * self.f_val(t) + t * l.powf(1.0 + self.delta) * self.f_dot(t)
    }

    pub fn mu(&self, t: f64) -> f64 {
        self.lambda(t)
    }

    pub fn mu_dot(&self, t: f64) -> f64 {
        self.lambda_dot(t)
    }

    /// The two mirrored far-field intervals at time `t`.
    pub fn region(&self, t: f64) -> [(f64, f64); 2] {
        let l = self.lambda(t);
        let m = self.mu(t);
        [(-m - 0.75 * l, -m - 0.25 * l), (m + 0.25 * l, m + 0.75 * l)]
    }
}

// ------------------------------------------------ inequalities / bounds --

/// Sharp 1-D Gagliardo-Nirenberg check:
/// `int |u|^4 <= (sqrt(3)/3) ||u_x|| ||u||^3`, equality at `sqrt(2) sech`.
pub fn gn_quartic_check(u: &Field, g: &Grid) -> (f64, f64, bool) {
    let lhs = g.integrate(&u.iter().map(|z| z.norm_sqr().powi(2)).collect::<Vec<_>>());
    let rhs = (3f64.sqrt() / 3.0) * {
        let ux = g.derivative(u, 1).expect("shape");
        l2_norm(&ux, g) * l2_norm(u, g).powi(3)
    };
    (lhs, rhs, lhs <= rhs * (1.0 + 1e-10) + 1e-300)
}

/// A-priori energy-norm bound from conservation:
/// `int |u_x|^2 + (v^2+n^2)/2  <=  2 E_0 + (sqrt(3)/6) M_0^3`,
/// and with the mass added, `int(... + |u|^2) <= 2*bound + M_0`.
#[derive(Clone, Copy, Debug)]
pub struct EnergyBound {
    pub lhs: f64,
    pub bound: f64,
    pub ok: bool,
    pub full_lhs: f64,
    pub full_bound: f64,
    pub full_ok: bool,
}

pub fn energy_bound_check(s: &ZakharovState, g: &Grid, m0: f64, e0: f64) -> EnergyBound {
    let ux = g.derivative(&s.u, 1).expect("shape");
    let dens: Vec<f64> = (0..g.num_points())
        .map(|j| ux[j].norm_sqr() + 0.5 * (s.v[j] * s.v[j] + s.n[j] * s.n[j]))
        .collect();
    let lhs = g.integrate(&dens);
    let bound = 2.0 * e0 + 3f64.sqrt() / 6.0 * m0.powi(3);
    // full E4 combination: |u_x|^2 + |u|^2 + v^2 + n^2 <= 2*bound + M0
    let dens_full: Vec<f64> = (0..g.num_points())
        .map(|j| {
            ux[j].norm_sqr() + s.u[j].norm_sqr() + s.v[j] * s.v[j] + s.n[j] * s.n[j]
        })
        .collect();
    let full_lhs = g.integrate(&dens_full);
    let full_bound = 2.0 * bound + m0;
    EnergyBound {
        lhs,
        bound,
        ok: lhs <= bound + 1e-12 * bound.abs().max(1.0),
        full_lhs,
        full_bound,
        full_ok: full_lhs <= full_bound + 1e-12 * full_bound.abs().max(1.0),
    }
}

/// Domination constants of the bump against |cutoff'| on the bump support:
/// returns `(sup bump/|phi'|, sup |bump'|/|phi'|)` sampled on a fine mesh.
pub fn bump_domination_constants() -> (f64, f64) {
    let cut = WeightProfile::cutoff();
    let bump = WeightProfile::bump();
    let mut c0 = 0.0f64;
    let mut c1 = 0.0f64;
    let m = 20_000;
    for i in 0..=m {
        let s = -0.75 + 0.5 * i as f64 / m as f64;
        let denom = cut.phi_d(s).abs();
        c0 = c0.max(bump.phi(s) / denom);
        c1 = c1.max(bump.phi_d(s).abs() / denom);
    }
    (c0, c1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{self, SolitonParams};
    use num_complex::Complex64 as Cx;
    use proptest::prelude::*;

    fn grid() -> Grid {
        Grid::new(20.0, 1024).unwrap()
    }

    #[test]
    fn mass_of_ground_state_and_scaling() {
        let g = grid();
        let s = exact::nls_soliton(0.0, &g);
        assert!((mass(&s.u, &g) - 4.0).abs() < 1e-12);
        let doubled = Field(s.u.iter().map(|z| 2.0 * z).collect());
        assert!((mass(&doubled, &g) - 16.0).abs() < 1e-11);
        assert_eq!(mass(&Field::zeros(1024), &g), 0.0);
    }

    #[test]
    fn zakharov_energy_of_wu_soliton() {
        // E = 4/3 + 8/3 - 16/3 = -4/3 from sech-power integrals
        let g = grid();
        let s = exact::wu_soliton(&SolitonParams::new(1.0, 0.0, 0.0), 0.0, &g).unwrap();
        let e = energy_zakharov(&s, &g);
        assert!((e + 4.0 / 3.0).abs() < 1e-10, "E = {e}");
        assert_eq!(energy_zakharov(&ZakharovState::zero(&g), &g), 0.0);
    }

    #[test]
    fn zakharov_energy_of_pure_wave_data() {
        let g = grid();
        let n: Vec<f64> = g.nodes().iter().map(|&x| 1.0 / x.cosh()).collect();
        let s = ZakharovState { u: Field::zeros(1024), n: n.clone(), v: n, t: 0.0 };
        assert!((energy_zakharov(&s, &g) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn momentum_examples() {
        let g = grid();
        // stationary Wu: real profile, v = 0
        let s = exact::wu_soliton(&SolitonParams::new(1.0, 0.0, 0.0), 0.0, &g).unwrap();
        assert!(momentum_zakharov(&s, &g).abs() < 1e-12);

        // u = e^{ix} sech(x): Im int u conj(u)_x = -int sech^2 = -2
        let u = Field(
            g.nodes()
                .iter()
                .map(|&x| Cx::new(0.0, x).exp() / x.cosh())
                .collect(),
        );
        let s2 = ZakharovState { u, n: vec![0.0; 1024], v: vec![0.0; 1024], t: 0.0 };
        assert!((momentum_zakharov(&s2, &g) + 2.0).abs() < 1e-10);

        // momentum flips sign under spatial reflection
        let mut refl = s2.clone();
        for j in 0..1024 {
            refl.u.0[j] = s2.u[g.reflect(j)];
        }
        assert!((momentum_zakharov(&refl, &g) - 2.0).abs() < 1e-10);
    }

    #[test]
    fn kgz_energy_and_momentum_of_chen() {
        let g = grid();
        let s = exact::chen_soliton(&SolitonParams::new(0.0, 0.0, 0.0), 0.0, &g).unwrap();
        // E = 4 + 4/3 + 8/3 - 16/3 = 8/3
        let e = energy_kgz(&s, &g);
        assert!((e - 8.0 / 3.0).abs() < 1e-10, "E_kg = {e}");
        assert!(momentum_kgz(&s, &g).abs() < 1e-12);
        let z = KGZState::zero(&g);
        assert_eq!(energy_kgz(&z, &g), 0.0);
        assert_eq!(momentum_kgz(&z, &g), 0.0);
    }

    #[test]
    fn weighted_norms_tanh_family() {
        let g = grid();
        let w = WeightProfile::tanh_lambda(1.0).unwrap();
        let one = Field::from_re(vec![1.0; 1024]);
        // int sech^2 = 2
        assert!((weighted_l2_sq(&one, &w, &g).unwrap() - 2.0).abs() < 1e-12);
        let sech = Field::from_re(g.nodes().iter().map(|&x| 1.0 / x.cosh()).collect());
        // int sech^4 = 4/3
        assert!((weighted_l2_sq(&sech, &w, &g).unwrap() - 4.0 / 3.0).abs() < 1e-12);
        // cutoff weight is rejected
        assert!(matches!(
            weighted_l2_sq(&one, &WeightProfile::cutoff(), &g),
            Err(Error::NegativeWeight(_))
        ));
    }

    #[test]
    fn tanh_phi_third_derivative_identity() {
        // phi''' = (omega^2)'' for omega = sech(x/lambda); the box must be
        // wide relative to lambda or boundary ringing pollutes the spectral
        // second derivative
        let g = Grid::new(40.0, 2048).unwrap();
        for lambda in [0.7, 1.0, 2.5] {
            let w = WeightProfile::tanh_lambda(lambda).unwrap();
            let om2: Vec<f64> = g.nodes().iter().map(|&x| w.omega(x).powi(2)).collect();
            let dd = g.derivative_re(&om2, 2).unwrap();
            for (j, &x) in g.nodes().iter().enumerate() {
                assert!(
                    (w.phi_d3(x) - dd[j]).abs() < 1e-10,
                    "lambda={lambda}, x={x}: {} vs {}",
                    w.phi_d3(x),
                    dd[j]
                );
            }
        }
    }

    #[test]
    fn cutoff_shape_and_sign_structure() {
        let w = WeightProfile::cutoff();
        assert_eq!(w.phi(-1.5), 1.0);
        assert_eq!(w.phi(0.5), 0.0);
        assert!((w.phi(-1.0) - 1.0).abs() < 1e-15);
        assert!(w.phi(0.0).abs() < 1e-15);
        // phi' <= 0, phi'(s) s >= 0, sampled finely; C^2 seams
        let m = 4000;
        for i in 0..=m {
            let s = -2.0 + 3.0 * i as f64 / m as f64;
            assert!(w.phi_d(s) <= 0.0, "phi'({s}) > 0");
            assert!(w.phi_d(s) * s >= -1e-15, "phi'(s) s < 0 at {s}");
        }
        assert!(w.phi_d(-1.0).abs() < 1e-12 && w.phi_d(0.0).abs() < 1e-12);
        // decreasing
        assert!(w.phi(-0.75) > w.phi(-0.25));
    }

    #[test]
    fn bump_support_range_and_domination() {
        let w = WeightProfile::bump();
        assert_eq!(w.phi(-0.76), 0.0);
        assert_eq!(w.phi(-0.24), 0.0);
        assert!((w.phi(-0.5) - 1.0).abs() < 1e-15);
        let m = 2000;
        for i in 0..=m {
            let s = -1.0 + i as f64 / m as f64;
            let v = w.phi(s);
            assert!((0.0..=1.0).contains(&v));
        }
        let (c0, c1) = bump_domination_constants();
        assert!(c0.is_finite() && c1.is_finite());
        assert!(c0 < 2.0, "bump/|cutoff'| = {c0}");
        assert!(c1 < 10.0, "|bump'|/|cutoff'| = {c1}");
    }

    #[test]
    fn curve_rates_and_region_geometry() {
        let c = Curve::new(0.5, FMode::Constant(1.0)).unwrap();
        assert!(c.check_time(1.0).is_err());
        for t in [2.0f64, 5.0, 20.0] {
            // lambda'/lambda = 1/t + (1+delta)/(t log t) for mu = lambda, f const
            let expect = 1.0 / t + 1.5 / (t * t.ln());
            let got = c.lambda_dot(t) / c.lambda(t);
            assert!((got - expect).abs() < 1e-12 * expect, "t={t}");
            // region endpoints satisfy (x+mu)/lambda in [-3/4,-1/4] exactly
            let [(a, b), (a2, b2)] = c.region(t);
            let (l, m) = (c.lambda(t), c.mu(t));
            assert!(((a + m) / l + 0.75).abs() < 1e-12);
            assert!(((b + m) / l + 0.25).abs() < 1e-12);
            // mirrored side: (-x + mu)/lambda sweeps the same [-3/4, -1/4]
            assert!(((-a2 + m) / l + 0.25).abs() < 1e-12);
            assert!(((-b2 + m) / l + 0.75).abs() < 1e-12);
            assert!(c.lambda(t) > 0.0);
        }
    }

    #[test]
    fn envelope_is_monotone_and_interpolates() {
        let e = Envelope::from_samples(&[0.0, 1.0, 2.0, 3.0], &[1.0, 0.5, 2.0, 1.5]);
        assert_eq!(e.values, vec![1.0, 1.0, 2.0, 2.0]);
        assert!((e.eval(1.5) - 1.5).abs() < 1e-15);
        assert_eq!(e.eval(10.0), 2.0);
        assert_eq!(e.slope(0.5), 0.0);
        assert!((e.slope(1.5) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gn_is_sharp_at_the_ground_state() {
        let g = grid();
        let q = exact::nls_soliton(0.0, &g).u;
        let (lhs, rhs, ok) = gn_quartic_check(&q, &g);
        assert!(ok);
        assert!((lhs - 16.0 / 3.0).abs() < 1e-10);
        assert!((lhs - rhs).abs() < 1e-10 * lhs, "equality at the optimizer");
        let (l0, r0, ok0) = gn_quartic_check(&Field::zeros(1024), &g);
        assert!(ok0 && l0 == 0.0 && r0 == 0.0);
    }

    #[test]
    fn energy_bound_on_wu_soliton() {
        let g = grid();
        let s = exact::wu_soliton(&SolitonParams::new(1.0, 0.0, 0.0), 0.0, &g).unwrap();
        let m0 = mass(&s.u, &g);
        let e0 = energy_zakharov(&s, &g);
        let r = energy_bound_check(&s, &g, m0, e0);
        assert!((r.lhs - 4.0).abs() < 1e-10, "lhs = {}", r.lhs);
        assert!((r.bound - 15.8085).abs() < 1e-3, "bound = {}", r.bound);
        assert!(r.ok && r.full_ok);
        let z = ZakharovState::zero(&g);
        let rz = energy_bound_check(&z, &g, 0.0, 0.0);
        assert!(rz.ok && rz.lhs == 0.0 && rz.bound == 0.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        /// GN holds on random smooth two-bump fields.
        #[test]
        fn gn_holds_on_random_smooth_fields(
            a1 in -2.0f64..2.0, a2 in -2.0f64..2.0,
            w1 in 0.4f64..3.0, w2 in 0.4f64..3.0,
            x1 in -5.0f64..5.0, x2 in -5.0f64..5.0,
            k in 0.0f64..3.0,
        ) {
            let g = Grid::new(20.0, 256).unwrap();
            let u = Field(g.nodes().iter().map(|&x| {
                let e1 = a1 * (-(x - x1).powi(2) / (w1 * w1)).exp();
                let e2 = a2 * (-(x - x2).powi(2) / (w2 * w2)).exp();
                Cx::new(e1, e2) * Cx::new(0.0, k * x).exp()
            }).collect());
            let (lhs, rhs, ok) = gn_quartic_check(&u, &g);
            prop_assert!(ok, "GN violated: {lhs} > {rhs}");
        }
    }
}
