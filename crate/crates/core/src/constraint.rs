//! Linear constraint system for the free mode amplitudes and its nullspace.
//!
//! Each active unknown is one of the eight amplitudes `C_{μ1}`, `C_{μ2}`. Slots
//! 3 and 4 are eliminated through the Dirac relation. The two subsidiary
//! conditions `γ^μ ψ_μ = 0` and `D^μ ψ_μ = 0` are expanded on the oscillator
//! basis. Since the `v_k` are linearly independent, every (condition, spinor
//! component, k) triple gives one scalar row. The nullspace of the stacked rows
//! is the space of admissible vector-spinor states at the given level.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gamma::{GammaSet, C64, I, ZERO};
use crate::linalg::{nullspace, Nullspace};
use crate::mode::{complete_coefficients, DiracRelation, ModeSpec, VectorSpinorCoefficients};
use crate::oscillator::{ladder_action, Ladder};
use crate::sign::Sign;

/// Default relative rank cut.
pub const DEFAULT_SVD_TOL: f64 = 1e-10;

/// `C_{μ,slot}` with slot 0 or 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Unknown {
    pub mu: usize,
    pub slot: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Condition {
    /// `γ^μ ψ_μ = 0`
    Trace,
    /// `D^μ ψ_μ = 0`
    Divergence,
}

/// What one matrix row is the coefficient of.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct RowLabel {
    pub condition: Condition,
    pub component: usize,
    pub basis_index: i64,
}

#[derive(Debug, Clone)]
pub struct ConstraintSystem {
    pub mode: ModeSpec,
    pub unknowns: Vec<Unknown>,
    pub rows: Vec<RowLabel>,
    pub matrix: DMatrix<C64>,
    /// Number of rows with a nonnegative basis index, before any were dropped.
    pub raw_row_count: usize,
}

/// Linear form over the active unknowns.
type Form = Vec<C64>;

fn add_scaled(acc: &mut Form, f: &Form, s: C64) {
    for (a, b) in acc.iter_mut().zip(f) {
        *a += b * s;
    }
}

pub fn assemble_constraints(mode: &ModeSpec) -> Result<ConstraintSystem> {
    let gammas = GammaSet::dirac();
    let rel = DiracRelation::new(mode)?;

    let unknowns: Vec<Unknown> = (0..4)
        .flat_map(|mu| (0..2).map(move |slot| Unknown { mu, slot }))
        .filter(|u| mode.slot_index(u.slot) >= 0)
        .collect();
    let width = unknowns.len();
    let column = |mu: usize, slot: usize| unknowns.iter().position(|u| *u == Unknown { mu, slot });

    // forms[mu][a]: full coefficient C_{μa} as a form over the unknowns
    let forms: Vec<[Form; 4]> = (0..4)
        .map(|mu| {
            let unit = |slot: usize| {
                let mut f = vec![ZERO; width];
                if let Some(j) = column(mu, slot) {
                    f[j] = C64::new(1.0, 0.0);
                }
                f
            };
            let (c1, c2) = (unit(0), unit(1));
            let lower = |row: usize| {
                let mut f = vec![ZERO; width];
                add_scaled(&mut f, &c1, rel.m[row][0]);
                add_scaled(&mut f, &c2, rel.m[row][1]);
                f
            };
            let mut slots = [c1.clone(), c2.clone(), lower(0), lower(1)];
            for (a, f) in slots.iter_mut().enumerate() {
                if mode.slot_index(a) < 0 {
                    f.iter_mut().for_each(|v| *v = ZERO);
                }
            }
            slots
        })
        .collect();

    let mut rows: BTreeMap<RowLabel, Form> = BTreeMap::new();
    let mut push = |condition, component, basis_index: i64, f: &Form, s: C64| {
        if basis_index < 0 {
            return;
        }
        let label = RowLabel {
            condition,
            component,
            basis_index,
        };
        add_scaled(rows.entry(label).or_insert_with(|| vec![ZERO; width]), f, s);
    };

    // γ^μ ψ_μ: component c collects γ^μ[c][s] C_{μs} v_{k_s}
    for (mu, slots) in forms.iter().enumerate() {
        for c in 0..4 {
            for (s, f) in slots.iter().enumerate() {
                let g = gammas.upper[mu][(c, s)];
                if g != ZERO {
                    push(Condition::Trace, c, mode.slot_index(s), f, g);
                }
            }
        }
    }

    // D^μ ψ_μ = D_0ψ_0 − D_1ψ_1 − D_2ψ_2 − D_3ψ_3, per spinor component s.
    // D_0 → −iεE, D_3 → iεp_z, D_1 = (Ô₁ + Ô₂)/(2i), D_2 = (Ô₁ − Ô₂)/2.
    let eps = mode.eps.value();
    let qb = mode.qb();
    for s in 0..4 {
        let k = mode.slot_index(s);
        if k < 0 {
            continue;
        }
        push(Condition::Divergence, s, k, &forms[0][s], -I * eps * mode.energy());
        push(Condition::Divergence, s, k, &forms[3][s], -I * eps * mode.pz);
        for which in [Ladder::O1, Ladder::O2] {
            let t = ladder_action(which, mode.eps_q, k, qb)?;
            let sign = if which == Ladder::O1 { 1.0 } else { -1.0 };
            push(
                Condition::Divergence,
                s,
                t.index,
                &forms[1][s],
                -t.coefficient / (2.0 * I),
            );
            push(
                Condition::Divergence,
                s,
                t.index,
                &forms[2][s],
                -t.coefficient * (0.5 * sign),
            );
        }
    }

    let raw_row_count = rows.len();
    let scale = rows.values().flatten().map(|v| v.norm()).fold(0.0, f64::max);
    let mut kept: Vec<(RowLabel, Form)> = Vec::new();
    for (label, form) in rows {
        if form.iter().all(|v| v.norm() <= 1e-14 * scale) {
            continue;
        }
        let normalized = normalize(&form);
        let duplicate = kept.iter().any(|(_, other)| {
            normalize(other)
                .iter()
                .zip(&normalized)
                .all(|(a, b)| (a - b).norm() <= 1e-12)
        });
        if !duplicate {
            kept.push((label, form));
        }
    }

    let matrix = DMatrix::from_fn(kept.len(), width, |i, j| kept[i].1[j]);
    Ok(ConstraintSystem {
        mode: *mode,
        unknowns,
        rows: kept.into_iter().map(|(l, _)| l).collect(),
        matrix,
        raw_row_count,
    })
}

/// Unit norm with the first significant entry made real and positive.
fn normalize(f: &Form) -> Form {
    let norm = f.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let lead = f
        .iter()
        .find(|v| v.norm() > 1e-12 * norm)
        .copied()
        .unwrap_or(C64::new(1.0, 0.0));
    let phase = lead.conj() / lead.norm();
    f.iter().map(|v| v * phase / norm).collect()
}

impl ConstraintSystem {
    /// Expands a vector over the active unknowns into the free amplitudes
    /// `(C_{μ1}, C_{μ2})`.
    pub fn free_amplitudes(&self, v: &DVector<C64>) -> [[C64; 2]; 4] {
        let mut free = [[ZERO; 2]; 4];
        for (u, c) in self.unknowns.iter().zip(v.iter()) {
            free[u.mu][u.slot] = *c;
        }
        free
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DegeneracyReport {
    pub n: u32,
    pub eps: Sign,
    pub eps_q: Sign,
    pub active_unknowns: usize,
    pub rows: usize,
    pub rank: usize,
    pub nullity: usize,
    pub singular_values: Vec<f64>,
    /// Smallest kept over largest dropped singular value, when both exist.
    pub gap: Option<f64>,
    pub formula: u32,
    pub spin_labels: Vec<(u32, i32)>,
    /// Nullspace directions, completed to all four slots; unit norm over the
    /// free amplitudes.
    #[serde(skip)]
    pub basis: Vec<VectorSpinorCoefficients>,
}

impl DegeneracyReport {
    pub fn matches_formula(&self) -> bool {
        self.nullity == self.formula as usize
    }
}

/// Numerical nullity of the constraint system.
///
/// Fails with [`Error::IllConditioned`] if a singular value sits within a
/// factor of 10 of the cut `svd_tol · σ_max`.
pub fn degeneracy(mode: &ModeSpec, svd_tol: f64) -> Result<DegeneracyReport> {
    let system = assemble_constraints(mode)?;
    let ns: Nullspace = nullspace(&system.matrix, svd_tol);
    if let Some(&s) = ns
        .singular_values
        .iter()
        .find(|&&s| s > ns.cut / 10.0 && s < ns.cut * 10.0)
    {
        return Err(Error::IllConditioned {
            singular_value: s,
            cut: ns.cut,
        });
    }
    let basis = ns
        .basis
        .iter()
        .map(|v| complete_coefficients(mode, &system.free_amplitudes(v)))
        .collect::<Result<Vec<_>>>()?;
    Ok(DegeneracyReport {
        n: mode.n,
        eps: mode.eps,
        eps_q: mode.eps_q,
        active_unknowns: system.unknowns.len(),
        rows: system.matrix.nrows(),
        rank: ns.rank,
        nullity: ns.nullity(),
        gap: ns.gap(),
        singular_values: ns.singular_values,
        formula: degeneracy_formula(i64::from(mode.n))?,
        spin_labels: spin_labels(mode.n, mode.eps_q),
        basis,
    })
}

/// `g_n = 4 − δ_{n1} − 2δ_{n0}`.
pub fn degeneracy_formula(n: i64) -> Result<u32> {
    match n {
        n if n < 0 => Err(Error::NegativeIndex(n)),
        0 => Ok(2),
        1 => Ok(3),
        _ => Ok(4),
    }
}

/// All `(l, s)` with `l ≥ 0`, `s ∈ {±1, ±3}` and `n = l − (s/2)ε_q + 1/2`,
/// ordered by `l`.
pub fn spin_labels(n: u32, eps_q: Sign) -> Vec<(u32, i32)> {
    // 2n = 2l − sε_q + 1  ⇒  2l = 2n + sε_q − 1
    let mut out: Vec<(u32, i32)> = [-3i32, -1, 1, 3]
        .into_iter()
        .filter_map(|s| {
            let two_l = 2 * i64::from(n) + i64::from(s) * eps_q.as_i64() - 1;
            (two_l >= 0 && two_l % 2 == 0).then_some(((two_l / 2) as u32, s))
        })
        .collect();
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mode(n: u32, eps_q: Sign) -> ModeSpec {
        ModeSpec::with_qb(n, Sign::Plus, eps_q, 0.2, 1.0, 0.0, 0.3).unwrap()
    }

    #[test]
    fn row_count_at_level_two() {
        let sys = assemble_constraints(&mode(2, Sign::Minus)).unwrap();
        assert_eq!(sys.unknowns.len(), 8);
        assert_eq!(sys.raw_row_count, 20);
        assert!(sys.matrix.nrows() <= 20);
    }

    #[test]
    fn ground_level_prunes_unknowns() {
        let sys = assemble_constraints(&mode(0, Sign::Minus)).unwrap();
        assert_eq!(sys.unknowns.len(), 4);
        assert!(sys.unknowns.iter().all(|u| u.slot == 1));
        let sys = assemble_constraints(&mode(0, Sign::Plus)).unwrap();
        assert!(sys.unknowns.iter().all(|u| u.slot == 0));
    }

    #[test]
    fn no_zero_rows() {
        for n in 0..6 {
            let sys = assemble_constraints(&mode(n, Sign::Minus)).unwrap();
            for i in 0..sys.matrix.nrows() {
                assert!(sys.matrix.row(i).iter().any(|v| v.norm() > 0.0));
            }
        }
    }

    #[test]
    fn singular_negative_energy_mode_propagates() {
        let m = ModeSpec::with_qb(0, Sign::Minus, Sign::Minus, 0.2, 1.0, 0.0, 0.0).unwrap();
        assert!(matches!(
            assemble_constraints(&m),
            Err(Error::DenominatorSingular { .. })
        ));
    }

    #[test]
    fn formula_values() {
        assert_eq!(degeneracy_formula(0), Ok(2));
        assert_eq!(degeneracy_formula(1), Ok(3));
        assert_eq!(degeneracy_formula(7), Ok(4));
        assert_eq!(degeneracy_formula(-1), Err(Error::NegativeIndex(-1)));
    }

    #[test]
    fn spin_label_examples() {
        assert_eq!(spin_labels(0, Sign::Minus), vec![(0, -1), (1, -3)]);
        assert_eq!(spin_labels(1, Sign::Minus), vec![(0, 1), (1, -1), (2, -3)]);
        let four = spin_labels(4, Sign::Minus);
        assert_eq!(four.len(), 4);
        assert!(four.contains(&(2, 3)));
    }

    #[test]
    fn spin_labels_brute_force() {
        for eps_q in [Sign::Plus, Sign::Minus] {
            for n in 0..=10u32 {
                let mut brute = Vec::new();
                for l in 0..=n + 2 {
                    for s in [-3i32, -1, 1, 3] {
                        // n = l − (s/2)ε_q + 1/2, in halves
                        if 2 * n as i64 == 2 * l as i64 - s as i64 * eps_q.as_i64() + 1 {
                            brute.push((l, s));
                        }
                    }
                }
                assert_eq!(spin_labels(n, eps_q), brute);
                assert_eq!(brute.len() as u32, degeneracy_formula(n as i64).unwrap());
            }
        }
    }

    #[test]
    fn rank_plus_nullity_is_width() {
        for n in 0..5 {
            for q in [Sign::Plus, Sign::Minus] {
                let r = degeneracy(&mode(n, q), DEFAULT_SVD_TOL).unwrap();
                assert_eq!(r.rank + r.nullity, r.active_unknowns);
                assert_eq!(r.basis.len(), r.nullity);
            }
        }
    }

    #[test]
    fn ill_conditioned_guard_fires_near_cut() {
        // a cut placed just above an actual singular value
        let m = mode(3, Sign::Minus);
        let ns = nullspace(&assemble_constraints(&m).unwrap().matrix, 1.0);
        let s_min = *ns.singular_values.last().unwrap();
        let tol = s_min / ns.singular_values[0] * 2.0;
        assert!(matches!(degeneracy(&m, tol), Err(Error::IllConditioned { .. })));
    }
}
