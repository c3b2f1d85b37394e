//! Vector-spinor Landau modes in a constant magnetic field along z.
//!
//! Gauge: vector potential `(A_x, A_y, A_z) = (0, xB, 0)`, so that the
//! covariant derivative is `D_μ = ∂_μ − i ε_q |q| B x δ_{μ2}`. A mode is
//!
//! `ψ_μ(t, x, y, z) = f_μ(x) exp(−iεEt + iεp_y y + iεp_z z)`
//!
//! with each spinor slot of `f_μ` proportional to one oscillator function
//! `v_k(ξ(x))`. For positive charge slots 1 and 3 carry `v_n` and slots 2 and 4
//! carry `v_{n−1}`; negative charge swaps the roles.
//!
//! Note: `E = √(p_z² + m² + 2n|q|B)` is real for every `B > 0`. Above
//! `B = m²/(2n|q|)` outputs carry a strong-field flag instead of a complex
//! spectrum.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gamma::{GammaSet, Spinor, VectorSpinor, C64, I, METRIC, ZERO};
use crate::oscillator::{eval_v, ladder_action, p_level, Ladder, XiMapping};
use crate::sign::Sign;

/// One Landau mode: level, energy and charge signs, and the field/particle data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeSpec {
    pub n: u32,
    pub eps: Sign,
    pub eps_q: Sign,
    pub q_abs: f64,
    pub b_field: f64,
    pub mass: f64,
    pub py: f64,
    pub pz: f64,
}

impl ModeSpec {
    #[allow(clippy::too_many_arguments)]
    pub fn new(n: u32, eps: Sign, eps_q: Sign, q_abs: f64, b_field: f64, mass: f64, py: f64, pz: f64) -> Result<Self> {
        let mode = ModeSpec {
            n,
            eps,
            eps_q,
            q_abs,
            b_field,
            mass,
            py,
            pz,
        };
        mode.validate()?;
        Ok(mode)
    }

    /// Mode with unit charge, so `b_field` is `|q|B` directly.
    pub fn with_qb(n: u32, eps: Sign, eps_q: Sign, qb: f64, mass: f64, py: f64, pz: f64) -> Result<Self> {
        Self::new(n, eps, eps_q, 1.0, qb, mass, py, pz)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.q_abs) {
            return Err(Error::domain(format!("|q| must be positive, got {}", self.q_abs)));
        }
        if !positive(self.b_field) {
            return Err(Error::domain(format!("B must be positive, got {}", self.b_field)));
        }
        if !positive(self.mass) {
            return Err(Error::domain(format!("m must be positive, got {}", self.mass)));
        }
        if !self.py.is_finite() || !self.pz.is_finite() {
            return Err(Error::domain("momenta must be finite"));
        }
        Ok(())
    }

    pub fn qb(&self) -> f64 {
        self.q_abs * self.b_field
    }

    pub fn energy(&self) -> f64 {
        energy(self.n, self.pz, self.mass, self.qb())
    }

    pub fn p_n(&self) -> f64 {
        p_level(i64::from(self.n), self.qb())
    }

    pub fn xi_mapping(&self) -> XiMapping {
        XiMapping {
            qb: self.qb(),
            py: self.py,
            eps: self.eps,
            eps_q: self.eps_q,
        }
    }

    /// Oscillator index carried by spinor slot `a` (0-based).
    pub fn slot_index(&self, a: usize) -> i64 {
        let n = i64::from(self.n);
        let upper_first = a.is_multiple_of(2);
        match (self.eps_q, upper_first) {
            (Sign::Plus, true) | (Sign::Minus, false) => n,
            _ => n - 1,
        }
    }

    /// `|εE + m|` must exceed this for the coefficient relation to be used.
    pub fn denominator_tolerance(&self) -> f64 {
        1e-12 * (self.energy() + self.mass)
    }

    pub fn strong_field(&self) -> bool {
        is_strong_field(self.n, self.mass, self.q_abs, self.b_field)
    }
}

/// `E = √(p_z² + m² + 2n|q|B)`.
pub fn energy(n: u32, pz: f64, mass: f64, qb: f64) -> f64 {
    (pz * pz + mass * mass + 2.0 * f64::from(n) * qb).sqrt()
}

/// Field strength `m²/(2n|q|)` above which level `n` is flagged.
pub fn critical_field(n: u32, mass: f64, q_abs: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("level 0 has no critical field"));
    }
    if !(q_abs > 0.0) {
        return Err(Error::domain("critical field needs |q| > 0"));
    }
    Ok(mass * mass / (2.0 * f64::from(n) * q_abs))
}

/// `B > m²/(2n|q|)`, strictly. Never true for `n = 0`.
pub fn is_strong_field(n: u32, mass: f64, q_abs: f64, b_field: f64) -> bool {
    critical_field(n, mass, q_abs).is_ok_and(|bc| b_field > bc)
}

/// `C_{μa}`: Lorentz index μ ∈ {0, x, y, z} by spinor slot a.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VectorSpinorCoefficients(pub [[C64; 4]; 4]);

impl VectorSpinorCoefficients {
    pub fn norm(&self) -> f64 {
        self.0.iter().flatten().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Fills slots 3 and 4 from the free amplitudes `(C_{μ1}, C_{μ2})`:
///
/// `C_{μ3} = (εp_z C_{μ1} + iε_q p_n C_{μ2}) / (εE + m)`
/// `C_{μ4} = (−iε_q p_n C_{μ1} − εp_z C_{μ2}) / (εE + m)`
///
/// Slots attached to a negative oscillator index are set to zero, both in the
/// inputs and in the outputs.
pub fn complete_coefficients(mode: &ModeSpec, free: &[[C64; 2]; 4]) -> Result<VectorSpinorCoefficients> {
    let rel = DiracRelation::new(mode)?;
    let mut c = [[ZERO; 4]; 4];
    for (mu, pair) in free.iter().enumerate() {
        let c1 = if mode.slot_index(0) < 0 { ZERO } else { pair[0] };
        let c2 = if mode.slot_index(1) < 0 { ZERO } else { pair[1] };
        let [c3, c4] = rel.lower_slots(c1, c2);
        c[mu] = [c1, c2, c3, c4];
        for (a, v) in c[mu].iter_mut().enumerate() {
            if mode.slot_index(a) < 0 {
                *v = ZERO;
            }
        }
    }
    Ok(VectorSpinorCoefficients(c))
}

/// The 2×2 map `(C1, C2) ↦ (C3, C4)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct DiracRelation {
    /// rows: slot 3, slot 4; columns: C1, C2
    pub m: [[C64; 2]; 2],
}

impl DiracRelation {
    pub fn new(mode: &ModeSpec) -> Result<Self> {
        mode.validate()?;
        let den = mode.eps.value() * mode.energy() + mode.mass;
        let tol = mode.denominator_tolerance();
        if den.abs() <= tol {
            return Err(Error::DenominatorSingular {
                denominator: den.abs(),
                tolerance: tol,
            });
        }
        let epz = C64::new(mode.eps.value() * mode.pz / den, 0.0);
        let ipn = I * (mode.eps_q.value() * mode.p_n() / den);
        Ok(DiracRelation {
            m: [[epz, ipn], [-ipn, -epz]],
        })
    }

    pub fn lower_slots(&self, c1: C64, c2: C64) -> [C64; 2] {
        [
            self.m[0][0] * c1 + self.m[0][1] * c2,
            self.m[1][0] * c1 + self.m[1][1] * c2,
        ]
    }
}

/// A mode together with its coefficients.
#[derive(Debug, Clone, Copy)]
pub struct ModeFunction {
    pub mode: ModeSpec,
    pub coeffs: VectorSpinorCoefficients,
}

impl ModeFunction {
    /// Coefficients on slots with negative oscillator index are dropped.
    pub fn new(mode: ModeSpec, mut coeffs: VectorSpinorCoefficients) -> Result<Self> {
        mode.validate()?;
        for row in coeffs.0.iter_mut() {
            for (a, v) in row.iter_mut().enumerate() {
                if mode.slot_index(a) < 0 {
                    *v = ZERO;
                }
            }
        }
        Ok(ModeFunction { mode, coeffs })
    }

    pub fn from_free(mode: ModeSpec, free: &[[C64; 2]; 4]) -> Result<Self> {
        let coeffs = complete_coefficients(&mode, free)?;
        Ok(ModeFunction { mode, coeffs })
    }

    fn phase(&self, point: [f64; 4]) -> C64 {
        let [t, _, y, z] = point;
        let m = &self.mode;
        let arg = m.eps.value() * (-m.energy() * t + m.py * y + m.pz * z);
        C64::from_polar(1.0, arg)
    }

    /// `ψ_μ` at `(t, x, y, z)`.
    pub fn evaluate(&self, point: [f64; 4]) -> VectorSpinor {
        let xi = self.mode.xi_mapping().xi(point[1]);
        let ph = self.phase(point);
        let v: [f64; 4] = std::array::from_fn(|a| eval_v(self.mode.slot_index(a), xi));
        self.coeffs.0.map(|row| std::array::from_fn(|a| row[a] * v[a] * ph))
    }

    /// `∂_x ψ_μ` from the ladder identities, `∂_x = (Ô₁ + Ô₂)/(2i)`.
    pub fn x_derivative(&self, point: [f64; 4]) -> VectorSpinor {
        let m = &self.mode;
        let xi = m.xi_mapping().xi(point[1]);
        let ph = self.phase(point);
        let dv: [C64; 4] = std::array::from_fn(|a| {
            let k = m.slot_index(a);
            if k < 0 {
                return ZERO;
            }
            let mut sum = ZERO;
            for which in [Ladder::O1, Ladder::O2] {
                let t = ladder_action(which, m.eps_q, k, m.qb()).expect("k >= 0");
                sum += t.coefficient * eval_v(t.index, xi);
            }
            sum / (2.0 * I)
        });
        self.coeffs.0.map(|row| std::array::from_fn(|a| row[a] * dv[a] * ph))
    }

    /// Central-difference `∂_x ψ_μ`, step `h`.
    pub fn x_derivative_fd(&self, point: [f64; 4], h: f64) -> VectorSpinor {
        let [t, x, y, z] = point;
        let plus = self.evaluate([t, x + h, y, z]);
        let minus = self.evaluate([t, x - h, y, z]);
        std::array::from_fn(|mu| std::array::from_fn(|a| (plus[mu][a] - minus[mu][a]) / (2.0 * h)))
    }

    /// `D_ρ ψ_λ` indexed `[ρ][λ]`, with the x-derivative supplied by the caller.
    fn covariant_gradient(&self, point: [f64; 4], dx: VectorSpinor) -> [VectorSpinor; 4] {
        let m = &self.mode;
        let psi = self.evaluate(point);
        let x = point[1];
        let eps = m.eps.value();
        let scaled = |f: C64| psi.map(|s| s.map(|c| c * f));
        let gauge = LandauGauge { b_field: m.b_field };
        [
            scaled(-I * eps * m.energy()),
            dx,
            scaled(I * (eps * m.py + gauge.coupling_y(m.eps_q, m.q_abs, x))),
            scaled(I * eps * m.pz),
        ]
    }

    fn dirac_residual_from(&self, gammas: &GammaSet, point: [f64; 4], dx: VectorSpinor) -> VectorSpinor {
        let grad = self.covariant_gradient(point, dx);
        let psi = self.evaluate(point);
        std::array::from_fn(|nu| {
            let mut out: Spinor = psi[nu].map(|c| -self.mode.mass * c);
            for (rho, g) in grad.iter().enumerate() {
                for (o, c) in out.iter_mut().zip(gammas.upper[rho].apply(&g[nu])) {
                    *o += I * c;
                }
            }
            out
        })
    }

    /// `(iγ^μ D_μ − m) ψ_ν` for each ν, with analytic derivatives.
    pub fn dirac_residual(&self, gammas: &GammaSet, point: [f64; 4]) -> VectorSpinor {
        self.dirac_residual_from(gammas, point, self.x_derivative(point))
    }

    /// Same residual with the x-derivative from central differences.
    pub fn dirac_residual_fd(&self, gammas: &GammaSet, point: [f64; 4], h: f64) -> VectorSpinor {
        self.dirac_residual_from(gammas, point, self.x_derivative_fd(point, h))
    }

    /// `(γ^μ ψ_μ, D^μ ψ_μ)` at the point.
    pub fn subsidiary_residuals(&self, gammas: &GammaSet, point: [f64; 4]) -> (Spinor, Spinor) {
        let psi = self.evaluate(point);
        let grad = self.covariant_gradient(point, self.x_derivative(point));
        let trace = gammas.trace(&psi);
        let mut div = [ZERO; 4];
        for (mu, g) in grad.iter().enumerate() {
            for (d, c) in div.iter_mut().zip(g[mu]) {
                *d += METRIC[mu] * c;
            }
        }
        (trace, div)
    }
}

/// `A = (0, xB, 0)`: uniform field `B ê_z` with `∇·A = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LandauGauge {
    pub b_field: f64,
}

impl LandauGauge {
    pub fn vector_potential(&self, r: [f64; 3]) -> [f64; 3] {
        [0.0, r[0] * self.b_field, 0.0]
    }

    /// `∂_j A_i`, indexed `[i][j]`. Constant in this gauge.
    pub fn jacobian(&self) -> [[f64; 3]; 3] {
        let mut j = [[0.0; 3]; 3];
        j[1][0] = self.b_field;
        j
    }

    pub fn divergence(&self) -> f64 {
        let j = self.jacobian();
        j[0][0] + j[1][1] + j[2][2]
    }

    pub fn curl(&self) -> [f64; 3] {
        let j = self.jacobian();
        [j[2][1] - j[1][2], j[0][2] - j[2][0], j[1][0] - j[0][1]]
    }

    /// The term that `D_2` adds to `∂_y`, divided by `i`: `−ε_q|q|Bx`.
    pub fn coupling_y(&self, eps_q: Sign, q_abs: f64, x: f64) -> f64 {
        -eps_q.value() * q_abs * self.vector_potential([x, 0.0, 0.0])[1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma::vector_spinor_norm;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_free(rng: &mut ChaCha8Rng) -> [[C64; 2]; 4] {
        std::array::from_fn(|_| std::array::from_fn(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
    }

    fn random_point(rng: &mut ChaCha8Rng, mode: &ModeSpec) -> [f64; 4] {
        let reach = (2.0 * f64::from(mode.n) + 1.0).sqrt() + 2.0;
        let xi = rng.gen_range(-reach..reach);
        [
            rng.gen_range(-5.0..5.0),
            mode.xi_mapping().x(xi),
            rng.gen_range(-5.0..5.0),
            rng.gen_range(-5.0..5.0),
        ]
    }

    #[test]
    fn energy_examples() {
        assert_eq!(energy(0, 0.0, 1.7, 0.3), 1.7);
        assert!((energy(1, 0.0, 1.0, 1.0) - 3f64.sqrt()).abs() < 1e-15);
        assert!((energy(2, 3.0, 4.0, 0.5) - 27f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn critical_field_examples() {
        assert_eq!(critical_field(1, 1.0, 1.0).unwrap(), 0.5);
        assert_eq!(critical_field(2, 1.0, 1.0).unwrap(), 0.25);
        assert_eq!(critical_field(1, 2.0, 1.0).unwrap(), 2.0);
        assert!(critical_field(0, 1.0, 1.0).is_err());
        assert!(is_strong_field(1, 1.0, 1.0, 0.6));
        assert!(!is_strong_field(1, 1.0, 1.0, 0.5));
        assert!(!is_strong_field(0, 1.0, 1.0, 1e9));
    }

    #[test]
    fn rejects_zero_field() {
        assert!(ModeSpec::new(1, Sign::Plus, Sign::Plus, 1.0, 0.0, 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn completion_examples() {
        let one = [[c(1.0, 0.0), ZERO]; 4];
        let mode = ModeSpec::with_qb(0, Sign::Plus, Sign::Plus, 0.4, 1.0, 0.0, 0.0).unwrap();
        let co = complete_coefficients(&mode, &one).unwrap();
        assert_eq!(co.0[0], [c(1.0, 0.0), ZERO, ZERO, ZERO]);

        let mode = ModeSpec::with_qb(0, Sign::Plus, Sign::Plus, 0.4, 1.0, 0.0, 1.0).unwrap();
        let co = complete_coefficients(&mode, &one).unwrap();
        assert!((co.0[2][2] - c(1.0 / (2f64.sqrt() + 1.0), 0.0)).norm() < 1e-15);
        assert_eq!(co.0[2][3], ZERO);

        let mode = ModeSpec::with_qb(0, Sign::Minus, Sign::Plus, 0.4, 1.0, 0.0, 0.0).unwrap();
        assert!(matches!(
            complete_coefficients(&mode, &one),
            Err(Error::DenominatorSingular { .. })
        ));
    }

    #[test]
    fn ground_level_prunes_slots() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mode = ModeSpec::with_qb(0, Sign::Plus, Sign::Minus, 0.4, 1.0, 0.2, 0.5).unwrap();
        let co = complete_coefficients(&mode, &random_free(&mut rng)).unwrap();
        for row in co.0 {
            assert_eq!(row[0], ZERO);
            assert_eq!(row[2], ZERO);
        }
    }

    #[test]
    fn evaluation_single_term() {
        let mode = ModeSpec::with_qb(3, Sign::Plus, Sign::Plus, 0.7, 1.0, 0.4, 0.3).unwrap();
        let mut co = VectorSpinorCoefficients::default();
        co.0[0][0] = c(0.3, -1.2);
        let mf = ModeFunction::new(mode, co).unwrap();
        let x = 0.37;
        let psi = mf.evaluate([0.0, x, 0.0, 0.0]);
        let want = co.0[0][0] * eval_v(3, mode.xi_mapping().xi(x));
        assert!((psi[0][0] - want).norm() < 1e-15);
        let rest: f64 = psi.iter().flatten().skip(1).map(|v| v.norm()).sum();
        assert_eq!(rest, 0.0);
    }

    #[test]
    fn zero_field_and_zero_residual() {
        let g = GammaSet::dirac();
        let mode = ModeSpec::with_qb(2, Sign::Plus, Sign::Minus, 0.3, 1.0, 0.1, 0.2).unwrap();
        let mf = ModeFunction::new(mode, VectorSpinorCoefficients::default()).unwrap();
        let p = [0.1, 0.2, 0.3, 0.4];
        assert_eq!(vector_spinor_norm(&mf.evaluate(p)), 0.0);
        assert_eq!(vector_spinor_norm(&mf.dirac_residual(&g, p)), 0.0);
        let (tr, div) = mf.subsidiary_residuals(&g, p);
        assert_eq!(crate::gamma::spinor_norm(&tr) + crate::gamma::spinor_norm(&div), 0.0);
    }

    #[test]
    fn modulus_is_time_independent() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mode = ModeSpec::with_qb(4, Sign::Plus, Sign::Plus, 0.3, 1.2, 0.1, 0.9).unwrap();
        let mf = ModeFunction::from_free(mode, &random_free(&mut rng)).unwrap();
        let a = mf.evaluate([0.0, 0.8, 0.1, 0.2]);
        let b = mf.evaluate([17.3, 0.8, 0.1, 0.2]);
        for (u, v) in a.iter().flatten().zip(b.iter().flatten()) {
            assert!((u.norm() - v.norm()).abs() < 1e-14);
        }
    }

    #[test]
    fn dirac_residual_vanishes_for_completed_coefficients() {
        let g = GammaSet::dirac();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &(n, eps, eps_q) in &[
            (0, Sign::Plus, Sign::Plus),
            (0, Sign::Plus, Sign::Minus),
            (1, Sign::Plus, Sign::Minus),
            (3, Sign::Minus, Sign::Plus),
            (6, Sign::Plus, Sign::Plus),
        ] {
            let mode = ModeSpec::new(n, eps, eps_q, 1.5, 0.2, 1.0, 0.4, 0.7).unwrap();
            let mf = ModeFunction::from_free(mode, &random_free(&mut rng)).unwrap();
            for _ in 0..20 {
                let p = random_point(&mut rng, &mode);
                let r = vector_spinor_norm(&mf.dirac_residual(&g, p));
                let s = vector_spinor_norm(&mf.evaluate(p));
                assert!(r <= 1e-12 * s.max(1e-300) || r < 1e-14, "n={n}: {r} vs {s}");
            }
        }
    }

    #[test]
    fn perturbed_lower_slot_breaks_dirac_equation() {
        let g = GammaSet::dirac();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mode = ModeSpec::with_qb(2, Sign::Plus, Sign::Plus, 0.3, 1.0, 0.0, 0.5).unwrap();
        let mut mf = ModeFunction::from_free(mode, &random_free(&mut rng)).unwrap();
        mf.coeffs.0[1][2] += c(0.1, 0.0);
        let p = [0.0, mode.xi_mapping().x(0.3), 0.0, 0.0];
        let r = vector_spinor_norm(&mf.dirac_residual(&g, p));
        assert!(r > 1e-3, "{r}");
    }

    #[test]
    fn analytic_derivative_matches_central_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [0, 1, 4, 9] {
            let mode = ModeSpec::with_qb(n, Sign::Plus, Sign::Minus, 1.0, 1.0, 0.3, -0.4).unwrap();
            let mf = ModeFunction::from_free(mode, &random_free(&mut rng)).unwrap();
            for _ in 0..10 {
                let p = random_point(&mut rng, &mode);
                let a = mf.x_derivative(p);
                let f = mf.x_derivative_fd(p, 1e-4);
                let diff: f64 = a
                    .iter()
                    .flatten()
                    .zip(f.iter().flatten())
                    .map(|(u, v)| (u - v).norm())
                    .fold(0.0, f64::max);
                assert!(diff <= 1e-6 * mf.coeffs.norm(), "n={n}: {diff}");
            }
        }
    }

    #[test]
    fn gauge_structure() {
        let gauge = LandauGauge { b_field: 0.37 };
        assert_eq!(gauge.divergence(), 0.0);
        assert_eq!(gauge.curl(), [0.0, 0.0, 0.37]);
        // D_2 = ∂_y − iε_q|q|Bx
        assert_eq!(gauge.coupling_y(Sign::Plus, 2.0, 1.5), -2.0 * 0.37 * 1.5);
        assert_eq!(gauge.coupling_y(Sign::Minus, 2.0, 1.5), 2.0 * 0.37 * 1.5);
    }

    #[test]
    fn energy_monotone() {
        for n in 0..10 {
            assert!(energy(n + 1, 0.3, 1.0, 0.2) > energy(n, 0.3, 1.0, 0.2));
            assert!(energy(n, 0.6, 1.0, 0.2) > energy(n, 0.3, 1.0, 0.2));
            assert!(energy(n, -0.6, 1.0, 0.2) > energy(n, 0.3, 1.0, 0.2));
            if n > 0 {
                assert!(energy(n, 0.3, 1.0, 0.25) > energy(n, 0.3, 1.0, 0.2));
            }
        }
    }
}
