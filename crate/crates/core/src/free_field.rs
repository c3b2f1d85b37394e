//! Field-free (B = 0) plane-wave vector spinors, used to cross-check the
//! Levi-Civita form of the field equation against the Dirac form plus
//! constraints.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::gamma::{AnalyticField, GammaSet, VectorSpinor, C64, I, METRIC, ZERO};
use crate::linalg::nullspace;

/// `ψ_λ(x) = u_λ exp(-i p_μ x^μ)`.
#[derive(Debug, Clone)]
pub struct PlaneWave {
    /// `p_μ` (lower index): `(E, -p_x, -p_y, -p_z)`.
    pub momentum_lower: [f64; 4],
    pub amplitude: VectorSpinor,
}

impl PlaneWave {
    fn phase(&self, point: [f64; 4]) -> C64 {
        let arg: f64 = self.momentum_lower.iter().zip(point).map(|(p, x)| p * x).sum();
        C64::from_polar(1.0, -arg)
    }
}

impl AnalyticField for PlaneWave {
    fn value(&self, point: [f64; 4]) -> VectorSpinor {
        let ph = self.phase(point);
        self.amplitude.map(|s| s.map(|c| c * ph))
    }

    fn gradient(&self, point: [f64; 4]) -> [VectorSpinor; 4] {
        let psi = self.value(point);
        std::array::from_fn(|rho| {
            let f = -I * self.momentum_lower[rho];
            psi.map(|s| s.map(|c| c * f))
        })
    }
}

/// Positive-energy plane-wave solutions at fixed three-momentum.
///
/// `dirac_basis` spans amplitudes with `(γ^μ p_μ − m) u_λ = 0` for every λ
/// (8 dimensional); `constrained_basis` additionally has `γ^λ u_λ = 0`
/// (4 dimensional).
#[derive(Debug, Clone)]
pub struct FreeModeSpace {
    pub momentum_lower: [f64; 4],
    pub mass: f64,
    pub dirac_basis: Vec<DVector<C64>>,
    pub constrained_basis: Vec<DVector<C64>>,
}

const RANK_TOL: f64 = 1e-10;

impl FreeModeSpace {
    pub fn new(gammas: &GammaSet, p3: [f64; 3], mass: f64) -> Result<Self> {
        if !(mass > 0.0) || p3.iter().any(|p| !p.is_finite()) {
            return Err(Error::domain("free modes need m > 0 and finite momentum"));
        }
        let energy = (mass * mass + p3.iter().map(|p| p * p).sum::<f64>()).sqrt();
        let momentum_lower = [energy, -p3[0], -p3[1], -p3[2]];

        let mut slash = crate::gamma::ComplexMatrix4::identity() * (-mass);
        for mu in 0..4 {
            slash = slash + gammas.upper[mu] * momentum_lower[mu];
        }
        let mut dirac = DMatrix::<C64>::zeros(16, 16);
        for lam in 0..4 {
            for a in 0..4 {
                for b in 0..4 {
                    dirac[(4 * lam + a, 4 * lam + b)] = slash[(a, b)];
                }
            }
        }
        let mut trace = DMatrix::<C64>::zeros(4, 16);
        for lam in 0..4 {
            for a in 0..4 {
                for b in 0..4 {
                    trace[(a, 4 * lam + b)] = gammas.upper[lam][(a, b)];
                }
            }
        }
        let dirac_basis = nullspace(&dirac, RANK_TOL).basis;
        let constrained_basis = nullspace(&stack(&dirac, &trace), RANK_TOL).basis;
        Ok(FreeModeSpace {
            momentum_lower,
            mass,
            dirac_basis,
            constrained_basis,
        })
    }

    pub fn wave(&self, amplitude: &DVector<C64>) -> PlaneWave {
        let mut amp = [[ZERO; 4]; 4];
        for lam in 0..4 {
            for a in 0..4 {
                amp[lam][a] = amplitude[4 * lam + a];
            }
        }
        PlaneWave {
            momentum_lower: self.momentum_lower,
            amplitude: amp,
        }
    }

    /// Superposition of the constrained basis with the given weights.
    pub fn constrained_wave(&self, weights: &[C64]) -> PlaneWave {
        self.wave(&combine(&self.constrained_basis, weights))
    }

    /// A Dirac solution with the constrained subspace projected out, so that
    /// `γ^λ u_λ ≠ 0` for nonzero weights.
    pub fn violating_wave(&self, weights: &[C64]) -> PlaneWave {
        let mut v = combine(&self.dirac_basis, weights);
        for c in &self.constrained_basis {
            let overlap = c.dotc(&v);
            v -= c * overlap;
        }
        self.wave(&v)
    }

    /// `p^μ` as used in a `p·ψ` contraction.
    pub fn momentum_upper(&self) -> [f64; 4] {
        std::array::from_fn(|mu| METRIC[mu] * self.momentum_lower[mu])
    }
}

fn stack(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    let mut m = DMatrix::<C64>::zeros(a.nrows() + b.nrows(), a.ncols());
    m.view_mut((0, 0), a.shape()).copy_from(a);
    m.view_mut((a.nrows(), 0), b.shape()).copy_from(b);
    m
}

fn combine(basis: &[DVector<C64>], weights: &[C64]) -> DVector<C64> {
    let mut v = DVector::<C64>::zeros(16);
    for (b, w) in basis.iter().zip(weights) {
        v += b * *w;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma::{rs_operator_levi_civita, vector_spinor_norm};

    fn weights(k: usize) -> Vec<C64> {
        (0..k)
            .map(|i| C64::new(1.0 + i as f64 * 0.3, 0.5 - 0.2 * i as f64))
            .collect()
    }

    #[test]
    fn dimensions_of_solution_spaces() {
        let g = GammaSet::dirac();
        let s = FreeModeSpace::new(&g, [0.2, -0.4, 0.9], 1.0).unwrap();
        assert_eq!(s.dirac_basis.len(), 8);
        assert_eq!(s.constrained_basis.len(), 4);
    }

    #[test]
    fn constrained_wave_has_zero_residual() {
        let g = GammaSet::dirac();
        let s = FreeModeSpace::new(&g, [0.0, 0.0, 0.8], 1.3).unwrap();
        let w = s.constrained_wave(&weights(4));
        let pt = [0.3, -0.2, 1.1, 0.4];
        let r = rs_operator_levi_civita(&g, &w, s.mass, pt);
        let scale = vector_spinor_norm(&w.value(pt));
        assert!(vector_spinor_norm(&r) <= 1e-12 * scale);
    }

    #[test]
    fn zero_field_gives_zero() {
        let g = GammaSet::dirac();
        let s = FreeModeSpace::new(&g, [0.1, 0.2, 0.3], 1.0).unwrap();
        let w = s.wave(&DVector::zeros(16));
        let r = rs_operator_levi_civita(&g, &w, 1.0, [1.0, 2.0, 3.0, 4.0]);
        assert_eq!(vector_spinor_norm(&r), 0.0);
    }

    #[test]
    fn trace_violation_is_detected() {
        let g = GammaSet::dirac();
        let s = FreeModeSpace::new(&g, [0.0, 0.0, 0.8], 1.0).unwrap();
        let w = s.violating_wave(&weights(8));
        let pt = [0.0; 4];
        let psi = w.value(pt);
        assert!(crate::gamma::spinor_norm(&g.trace(&psi)) > 1e-3);
        let r = rs_operator_levi_civita(&g, &w, 1.0, pt);
        assert!(vector_spinor_norm(&r) > 1e-3 * vector_spinor_norm(&psi));
    }

    #[test]
    fn constrained_waves_are_divergence_free() {
        let g = GammaSet::dirac();
        let s = FreeModeSpace::new(&g, [0.5, -0.3, 0.2], 0.9).unwrap();
        let p = s.momentum_upper();
        for b in &s.constrained_basis {
            let w = s.wave(b);
            let mut div = [ZERO; 4];
            for lam in 0..4 {
                for a in 0..4 {
                    div[a] += p[lam] * w.amplitude[lam][a];
                }
            }
            assert!(crate::gamma::spinor_norm(&div) < 1e-12);
        }
    }
}
