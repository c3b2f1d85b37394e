//! Self-check suites run by `rarita verify`.
//!
//! Every suite reports the number of cases, the worst residual seen, the
//! threshold it was held to, and pass/fail. Random draws come from a ChaCha8
//! stream seeded by the caller, so a report is reproducible from its seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::constraint::{degeneracy, degeneracy_formula, spin_labels, DEFAULT_SVD_TOL};
use crate::error::Result;
use crate::free_field::FreeModeSpace;
use crate::gamma::{
    b_of_a, c_of_a, rs_operator_levi_civita, spinor_norm, vector_spinor_norm, AnalyticField, GammaSet,
    RsLagrangianMatrices, C64,
};
use crate::gas::{free_density_t0, number_density_t0, GasState, Species, Spin};
use crate::mode::{critical_field, is_strong_field, ModeFunction, ModeSpec};
use crate::oscillator::{check_ladder_numeric, orthonormality_matrix, Ladder};
use crate::sign::Sign;

#[derive(Debug, Clone, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub cases: usize,
    pub max_residual: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl SuiteResult {
    /// Passes when `max_residual <= threshold`.
    fn at_most(name: &'static str, cases: usize, max_residual: f64, threshold: f64) -> Self {
        SuiteResult {
            name,
            cases,
            max_residual,
            threshold,
            pass: max_residual <= threshold,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub suites: Vec<SuiteResult>,
    pub all_pass: bool,
}

pub fn run(seed: u64) -> Result<VerifyReport> {
    run_with(seed, &GammaSet::dirac())
}

/// Runs every suite against the supplied gamma matrices. Only the algebra
/// suites consume `gammas`; the mode suites always build the Dirac set.
pub fn run_with(seed: u64, gammas: &GammaSet) -> Result<VerifyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let suites = vec![
        clifford(gammas),
        lagrangian_scalars(),
        levi_civita_equivalence(gammas, &mut rng)?,
        orthonormality()?,
        ladder_identities(&mut rng)?,
        dirac_residual(&mut rng)?,
        derivative_crosscheck(&mut rng)?,
        degeneracy_law(&mut rng)?,
        subsidiary_residuals(&mut rng)?,
        spin_label_counts()?,
        gas_continuum_limit()?,
        critical_field_flags()?,
    ];
    let all_pass = suites.iter().all(|s| s.pass);
    Ok(VerifyReport { seed, suites, all_pass })
}

pub fn clifford(gammas: &GammaSet) -> SuiteResult {
    SuiteResult {
        name: "clifford_algebra",
        cases: 16,
        max_residual: gammas.clifford_defect(),
        threshold: 0.0,
        pass: gammas.satisfies_clifford(),
    }
}

pub fn lagrangian_scalars() -> SuiteResult {
    let cases = [(-1.0, 1.0, 1.0), (0.0, 0.5, 1.0), (-1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0)];
    let worst = cases
        .iter()
        .map(|&(a, b, c)| (b_of_a(a) - b).abs().max((c_of_a(a) - c).abs()))
        .fold(0.0, f64::max);
    let rejects = RsLagrangianMatrices::new(-0.5, &GammaSet::dirac()).is_err();
    let mut r = SuiteResult::at_most("lagrangian_scalars", cases.len() + 1, worst, 1e-15);
    r.pass &= rejects;
    r
}

/// Largest pointwise field norm over a set of sample points.
pub fn field_scale(field: &ModeFunction, points: &[[f64; 4]]) -> f64 {
    points
        .iter()
        .map(|&p| vector_spinor_norm(&field.evaluate(p)))
        .fold(0.0, f64::max)
}

fn random_weights(rng: &mut ChaCha8Rng, k: usize) -> Vec<C64> {
    (0..k)
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

fn random_spacetime(rng: &mut ChaCha8Rng) -> [f64; 4] {
    std::array::from_fn(|_| rng.gen_range(-10.0..10.0))
}

/// Constrained plane waves must give zero; trace-violating ones must not.
pub fn levi_civita_equivalence(gammas: &GammaSet, rng: &mut ChaCha8Rng) -> Result<SuiteResult> {
    let mass = 1.0;
    let mut worst_good = 0.0f64;
    let mut weakest_bad = f64::INFINITY;
    let trials = 20;
    for _ in 0..trials {
        let p3 = [
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
        ];
        let space = FreeModeSpace::new(gammas, p3, mass)?;
        let point = random_spacetime(rng);

        let good = space.constrained_wave(&random_weights(rng, space.constrained_basis.len()));
        let r = vector_spinor_norm(&rs_operator_levi_civita(gammas, &good, mass, point));
        worst_good = worst_good.max(r / vector_spinor_norm(&good.value(point)));

        let bad = space.violating_wave(&random_weights(rng, space.dirac_basis.len()));
        let r = vector_spinor_norm(&rs_operator_levi_civita(gammas, &bad, mass, point));
        weakest_bad = weakest_bad.min(r / vector_spinor_norm(&bad.value(point)));
    }
    let mut res = SuiteResult::at_most("levi_civita_equivalence", 2 * trials, worst_good, 1e-12);
    res.pass &= weakest_bad >= 1e-3;
    Ok(res)
}

pub fn orthonormality() -> Result<SuiteResult> {
    let m = orthonormality_matrix(20, 64)?;
    let worst = m
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let (i, j) = (k % 21, k / 21);
            (v - if i == j { 1.0 } else { 0.0 }).abs()
        })
        .fold(0.0, f64::max);
    Ok(SuiteResult::at_most("oscillator_orthonormality", 21 * 21, worst, 1e-10))
}

pub fn ladder_identities(rng: &mut ChaCha8Rng) -> Result<SuiteResult> {
    let mut worst = 0.0f64;
    let mut cases = 0;
    for n in 0..=50i64 {
        for which in [Ladder::O1, Ladder::O2] {
            for eps_q in [Sign::Plus, Sign::Minus] {
                let reach = (2.0 * n as f64 + 1.0).sqrt() + 1.0;
                let xi = rng.gen_range(-reach..reach);
                worst = worst.max(check_ladder_numeric(which, eps_q, n, xi, 1e-4, 1.0)?);
                cases += 1;
            }
        }
    }
    Ok(SuiteResult::at_most("ladder_identities", cases, worst, 1e-6))
}

/// A random positive-energy mode with `p_z ∈ [0, 3m]`, `|q|B ∈ [0.05, 0.5] m²`.
pub fn random_mode(rng: &mut ChaCha8Rng, n: u32, eps_q: Sign) -> Result<ModeSpec> {
    ModeSpec::with_qb(
        n,
        Sign::Plus,
        eps_q,
        rng.gen_range(0.05..0.5),
        1.0,
        rng.gen_range(-1.0..1.0),
        rng.gen_range(0.0..3.0),
    )
}

/// Sample points spanning the classically allowed region of the mode.
pub fn mode_points(rng: &mut ChaCha8Rng, mode: &ModeSpec, count: usize) -> Vec<[f64; 4]> {
    let reach = (2.0 * f64::from(mode.n) + 1.0).sqrt() + 1.5;
    let map = mode.xi_mapping();
    (0..count)
        .map(|_| {
            let [t, _, y, z] = random_spacetime(rng);
            [t, map.x(rng.gen_range(-reach..reach)), y, z]
        })
        .collect()
}

fn random_free(rng: &mut ChaCha8Rng) -> [[C64; 2]; 4] {
    std::array::from_fn(|_| std::array::from_fn(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
}

pub fn dirac_residual(rng: &mut ChaCha8Rng) -> Result<SuiteResult> {
    let gammas = GammaSet::dirac();
    let mut worst = 0.0f64;
    let mut cases = 0;
    for n in 0..=10 {
        for eps_q in [Sign::Plus, Sign::Minus] {
            let mode = random_mode(rng, n, eps_q)?;
            let mf = ModeFunction::from_free(mode, &random_free(rng))?;
            let points = mode_points(rng, &mode, 100);
            let scale = field_scale(&mf, &points);
            for p in points {
                worst = worst.max(vector_spinor_norm(&mf.dirac_residual(&gammas, p)) / scale);
                cases += 1;
            }
        }
    }
    Ok(SuiteResult::at_most("dirac_residual", cases, worst, 1e-12))
}

pub fn derivative_crosscheck(rng: &mut ChaCha8Rng) -> Result<SuiteResult> {
    let gammas = GammaSet::dirac();
    let mut worst = 0.0f64;
    let mut cases = 0;
    for n in 0..=10 {
        for eps_q in [Sign::Plus, Sign::Minus] {
            let mode = ModeSpec::with_qb(
                n,
                Sign::Plus,
                eps_q,
                1.0,
                1.0,
                rng.gen_range(-1.0..1.0),
                rng.gen_range(0.0..3.0),
            )?;
            let mf = ModeFunction::from_free(mode, &random_free(rng))?;
            let points = mode_points(rng, &mode, 20);
            let scale = field_scale(&mf, &points);
            for p in points {
                let a = mf.dirac_residual(&gammas, p);
                let f = mf.dirac_residual_fd(&gammas, p, 1e-4);
                let diff = a
                    .iter()
                    .flatten()
                    .zip(f.iter().flatten())
                    .map(|(u, v)| (u - v).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                worst = worst.max(diff / scale);
                cases += 1;
            }
        }
    }
    Ok(SuiteResult::at_most("derivative_crosscheck", cases, worst, 1e-6))
}

/// Nullity against `g_n` for negative charge, positive energy, `n ≤ 10`.
/// `max_residual` is the largest `|nullity − g_n|` seen.
pub fn degeneracy_law(rng: &mut ChaCha8Rng) -> Result<SuiteResult> {
    let mut worst = 0usize;
    let mut cases = 0;
    for n in 0..=10u32 {
        for _ in 0..50 {
            let r = degeneracy(&random_mode(rng, n, Sign::Minus)?, DEFAULT_SVD_TOL)?;
            worst = worst.max(r.nullity.abs_diff(r.formula as usize));
            cases += 1;
        }
    }
    Ok(SuiteResult::at_most("degeneracy_law", cases, worst as f64, 0.0))
}

pub fn subsidiary_residuals(rng: &mut ChaCha8Rng) -> Result<SuiteResult> {
    let gammas = GammaSet::dirac();
    let mut worst = 0.0f64;
    let mut cases = 0;
    for n in 0..=10 {
        for eps_q in [Sign::Plus, Sign::Minus] {
            let mode = random_mode(rng, n, eps_q)?;
            let report = degeneracy(&mode, DEFAULT_SVD_TOL)?;
            for coeffs in report.basis {
                let mf = ModeFunction::new(mode, coeffs)?;
                let points = mode_points(rng, &mode, 100);
                let scale = field_scale(&mf, &points);
                for p in points {
                    let (tr, div) = mf.subsidiary_residuals(&gammas, p);
                    worst = worst.max(spinor_norm(&tr).max(spinor_norm(&div)) / scale);
                    cases += 1;
                }
            }
        }
    }
    Ok(SuiteResult::at_most("subsidiary_residuals", cases, worst, 1e-10))
}

pub fn spin_label_counts() -> Result<SuiteResult> {
    let mut worst = 0u32;
    for eps_q in [Sign::Plus, Sign::Minus] {
        for n in 0..=10 {
            let len = spin_labels(n, eps_q).len() as u32;
            worst = worst.max(len.abs_diff(degeneracy_formula(i64::from(n))?));
        }
    }
    let mut r = SuiteResult::at_most("spin_labels", 22, f64::from(worst), 0.0);
    r.pass &= spin_labels(0, Sign::Minus) == vec![(0, -1), (1, -3)];
    Ok(r)
}

/// Relative deviation of the weak-field T = 0 density from the free gas.
pub fn gas_continuum_limit() -> Result<SuiteResult> {
    let mut worst = 0.0f64;
    for spin in [Spin::Half, Spin::ThreeHalves] {
        let state = GasState::new(2.0, 0.0, 1e-3, Species::new("probe", 1.0, 1.0, spin))?;
        let free = free_density_t0(spin, 1.0, 2.0);
        worst = worst.max(((number_density_t0(&state)? - free) / free).abs());
    }
    Ok(SuiteResult::at_most("gas_continuum_limit", 2, worst, 5e-3))
}

/// Flags must coincide with `B > m²/(2n|q|)`; the boundary itself is unflagged.
pub fn critical_field_flags() -> Result<SuiteResult> {
    let mut mismatches = 0;
    let mut cases = 0;
    for n in 1..=8u32 {
        for (mass, q) in [(1.0, 1.0), (2.0, 0.5), (0.7, 3.0)] {
            let bc = critical_field(n, mass, q)?;
            for (b, want) in [
                (bc * 0.5, false),
                (bc, false),
                (bc * (1.0 + 1e-12), true),
                (bc * 3.0, true),
            ] {
                cases += 1;
                if is_strong_field(n, mass, q, b) != want {
                    mismatches += 1;
                }
            }
        }
    }
    for b in [0.1, 1.0, 1e6] {
        cases += 1;
        if is_strong_field(0, 1.0, 1.0, b) {
            mismatches += 1;
        }
    }
    Ok(SuiteResult::at_most(
        "critical_field_flags",
        cases,
        f64::from(mismatches),
        0.0,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corrupted_gammas_fail_clifford_suite() {
        let bad = GammaSet::dirac().with_corrupted_sign(1);
        assert!(!clifford(&bad).pass);
        assert!(clifford(&GammaSet::dirac()).pass);
    }

    #[test]
    fn algebra_suites_pass() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(lagrangian_scalars().pass);
        assert!(levi_civita_equivalence(&GammaSet::dirac(), &mut rng).unwrap().pass);
        assert!(orthonormality().unwrap().pass);
        assert!(spin_label_counts().unwrap().pass);
        assert!(critical_field_flags().unwrap().pass);
        assert!(gas_continuum_limit().unwrap().pass);
    }
}
