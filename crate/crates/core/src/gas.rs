//! Ideal charged Fermi gas in a uniform field, summed over Landau levels.
//!
//! Per level and per state, the transverse density of states is `|q|B/(2π)`
//! and the longitudinal one `dp_z/(2π)`, giving
//!
//! `n = (|q|B / 2π²) Σ_n g_n ∫₀^∞ dp_z f(E_n(p_z))`
//!
//! with `E_n(p_z) = √(p_z² + m² + 2n|q|B)` and `f` the Fermi–Dirac occupation
//! (a step at `T = 0`).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spin {
    Half,
    ThreeHalves,
}

impl Spin {
    /// `2s + 1`.
    pub fn multiplicity(self) -> u32 {
        match self {
            Spin::Half => 2,
            Spin::ThreeHalves => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Species {
    pub name: String,
    pub mass: f64,
    pub q_abs: f64,
    pub spin: Spin,
}

impl Species {
    pub fn new(name: impl Into<String>, mass: f64, q_abs: f64, spin: Spin) -> Self {
        Species {
            name: name.into(),
            mass,
            q_abs,
            spin,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GasState {
    pub mu: f64,
    pub temperature: f64,
    pub b_field: f64,
    pub species: Species,
}

impl GasState {
    pub fn new(mu: f64, temperature: f64, b_field: f64, species: Species) -> Result<Self> {
        let state = GasState {
            mu,
            temperature,
            b_field,
            species,
        };
        state.validate()?;
        Ok(state)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.mu.is_finite() {
            return Err(Error::domain("chemical potential must be finite"));
        }
        if !(self.temperature >= 0.0 && self.temperature.is_finite()) {
            return Err(Error::domain("temperature must be finite and >= 0"));
        }
        if !(self.b_field > 0.0 && self.b_field.is_finite()) {
            return Err(Error::domain("B must be positive and finite"));
        }
        if !(self.species.q_abs > 0.0) {
            return Err(Error::domain("Landau quantization needs |q| > 0"));
        }
        if !(self.species.mass > 0.0 && self.species.mass.is_finite()) {
            return Err(Error::domain("mass must be positive and finite"));
        }
        Ok(())
    }

    pub fn qb(&self) -> f64 {
        self.species.q_abs * self.b_field
    }

    fn prefactor(&self) -> f64 {
        self.qb() / (2.0 * PI * PI)
    }
}

/// States per Landau level: spin 1/2 has `2 − δ_{n0}`, spin 3/2 has
/// `4 − δ_{n1} − 2δ_{n0}`.
pub fn level_degeneracy(spin: Spin, n: i64) -> Result<u32> {
    if n < 0 {
        return Err(Error::NegativeIndex(n));
    }
    Ok(match (spin, n) {
        (Spin::Half, 0) => 1,
        (Spin::Half, _) => 2,
        (Spin::ThreeHalves, 0) => 2,
        (Spin::ThreeHalves, 1) => 3,
        (Spin::ThreeHalves, _) => 4,
    })
}

/// `p_F(n)² = μ² − m² − 2n|q|B`.
fn fermi_momentum_sq(state: &GasState, n: u64) -> f64 {
    let m = state.species.mass;
    state.mu * state.mu - m * m - 2.0 * n as f64 * state.qb()
}

/// Levels with real Fermi momentum at `T = 0`: `⌊(μ² − m²)/(2|q|B)⌋ + 1`, or 0
/// when `μ < m`.
pub fn occupied_levels(state: &GasState) -> u64 {
    let m = state.species.mass;
    if state.mu < m {
        return 0;
    }
    ((state.mu * state.mu - m * m) / (2.0 * state.qb())).floor() as u64 + 1
}

/// Zero-temperature particle density. The temperature field of `state` is
/// ignored.
pub fn number_density_t0(state: &GasState) -> Result<f64> {
    state.validate()?;
    let mut sum = 0.0;
    for n in 0..occupied_levels(state) {
        let pf2 = fermi_momentum_sq(state, n);
        if pf2 > 0.0 {
            sum += f64::from(level_degeneracy(state.species.spin, n as i64)?) * pf2.sqrt();
        }
    }
    Ok(state.prefactor() * sum)
}

/// Field-free zero-temperature density `(2s+1) p_F³ / (6π²)`.
pub fn free_density_t0(spin: Spin, mass: f64, mu: f64) -> f64 {
    if mu <= mass {
        return 0.0;
    }
    let pf = (mu * mu - mass * mass).sqrt();
    f64::from(spin.multiplicity()) * pf.powi(3) / (6.0 * PI * PI)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiniteTOptions {
    /// Relative tolerance for both the momentum integrals and the level sum.
    pub tol: f64,
    /// Return particle minus antiparticle density.
    pub antiparticles: bool,
}

impl Default for FiniteTOptions {
    fn default() -> Self {
        FiniteTOptions {
            tol: 1e-10,
            antiparticles: false,
        }
    }
}

pub const MAX_LEVELS: u64 = 1_000_000;

/// Finite-temperature density. Level contributions are added until one drops
/// below `tol` times the running total above the chemical potential.
pub fn number_density_finite_t(state: &GasState, opts: FiniteTOptions) -> Result<f64> {
    state.validate()?;
    if !(state.temperature > 0.0) {
        return Err(Error::domain("finite-temperature density needs T > 0"));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::domain("tolerance must be positive"));
    }
    let particles = level_sum(state, state.mu, opts.tol)?;
    if opts.antiparticles {
        Ok(particles - level_sum(state, -state.mu, opts.tol)?)
    } else {
        Ok(particles)
    }
}

fn fermi_dirac(x: f64) -> f64 {
    if x > 0.0 {
        let e = (-x).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + x.exp())
    }
}

/// Boltzmann-suppressed tail cut: `e^{-40}` relative.
const TAIL: f64 = 40.0;

fn level_sum(state: &GasState, mu: f64, tol: f64) -> Result<f64> {
    let t = state.temperature;
    let m = state.species.mass;
    let qb = state.qb();
    let mut total = 0.0;
    for n in 0..MAX_LEVELS {
        let mass_sq = m * m + 2.0 * n as f64 * qb;
        let threshold = mass_sq.sqrt();
        let e_top = threshold.max(mu) + TAIL * t;
        let p_top = (e_top * e_top - mass_sq).sqrt();
        let occupation = |p: f64| fermi_dirac(((p * p + mass_sq).sqrt() - mu) / t);
        let mut breaks = vec![0.0];
        if mu > threshold {
            breaks.push((mu * mu - mass_sq).sqrt());
        }
        breaks.push(p_top);
        let integral: f64 = breaks
            .windows(2)
            .map(|w| adaptive_gk(&occupation, w[0], w[1], tol))
            .sum();
        let term = f64::from(level_degeneracy(state.species.spin, n as i64)?) * integral;
        total += term;
        if threshold > mu && term <= tol * total {
            return Ok(state.prefactor() * total);
        }
    }
    Err(Error::ConvergenceFailure { levels: MAX_LEVELS })
}

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const K15_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const G7_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = K15_WEIGHTS[7] * fc;
    let mut gauss = G7_WEIGHTS[3] * fc;
    for i in 0..7 {
        let x = h * GK_NODES[i];
        let pair = f(c - x) + f(c + x);
        kronrod += K15_WEIGHTS[i] * pair;
        if i % 2 == 1 {
            gauss += G7_WEIGHTS[i / 2] * pair;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Recursive bisection on the Gauss–Kronrod error estimate.
fn adaptive_gk(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn recurse(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, abs_floor: f64, depth: u32) -> f64 {
        let (value, err) = gk15(f, a, b);
        if err <= (tol * value.abs()).max(abs_floor) || depth == 0 {
            return value;
        }
        let mid = 0.5 * (a + b);
        recurse(f, a, mid, tol, abs_floor / 2.0, depth - 1) + recurse(f, mid, b, tol, abs_floor / 2.0, depth - 1)
    }
    if b <= a {
        return 0.0;
    }
    let (coarse, _) = gk15(f, a, b);
    recurse(f, a, b, tol, 1e-3 * tol * coarse.abs(), 40)
}
