//! Rank of the subsidiary conditions measured directly on sampled fields.
//!
//! Each free amplitude is switched on in turn, the resulting mode is sampled
//! at many spacetime points, and the trace and covariant divergence are formed
//! with hand-written gamma matrices and finite differences in all four
//! coordinates. The rank of that sample matrix is found by Gaussian
//! elimination and compared with the SVD nullity of the assembled system.

use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rarita::constraint::{degeneracy, DEFAULT_SVD_TOL};
use rarita::mode::{ModeFunction, ModeSpec};
use rarita::Sign;

fn gammas() -> [[[C; 4]; 4]; 4] {
    let o = C::new(0.0, 0.0);
    let l = C::new(1.0, 0.0);
    let i = C::new(0.0, 1.0);
    [
        [[l, o, o, o], [o, l, o, o], [o, o, -l, o], [o, o, o, -l]],
        [[o, o, o, l], [o, o, l, o], [o, -l, o, o], [-l, o, o, o]],
        [[o, o, o, -i], [o, o, i, o], [o, i, o, o], [-i, o, o, o]],
        [[o, o, l, o], [o, o, o, -l], [-l, o, o, o], [o, l, o, o]],
    ]
}

/// Trace and divergence, eight complex numbers, at one point.
fn conditions(mf: &ModeFunction, p: [f64; 4]) -> Vec<C> {
    let g = gammas();
    let psi = mf.evaluate(p);
    let h = 1e-4;
    let mut out = vec![C::new(0.0, 0.0); 8];
    for mu in 0..4 {
        for a in 0..4 {
            for b in 0..4 {
                out[a] += g[mu][a][b] * psi[mu][b];
            }
        }
        let mut fwd = p;
        let mut back = p;
        fwd[mu] += h;
        back[mu] -= h;
        let (f, bk) = (mf.evaluate(fwd), mf.evaluate(back));
        let metric = if mu == 0 { 1.0 } else { -1.0 };
        let m = &mf.mode;
        for a in 0..4 {
            let mut d = (f[mu][a] - bk[mu][a]) / (2.0 * h);
            if mu == 2 {
                d -= C::new(0.0, m.eps_q.value() * m.q_abs * m.b_field * p[1]) * psi[mu][a];
            }
            out[4 + a] += metric * d;
        }
    }
    out
}

fn rank(mut rows: Vec<Vec<C>>, rel_tol: f64) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let scale = rows.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max);
    let mut r = 0;
    let mut cols: Vec<usize> = (0..ncols).collect();
    while r < ncols.min(rows.len()) {
        let mut best = (0.0, r, r);
        for (i, row) in rows.iter().enumerate().skip(r) {
            for (j, &c) in cols.iter().enumerate().skip(r) {
                if row[c].norm() > best.0 {
                    best = (row[c].norm(), i, j);
                }
            }
        }
        if best.0 <= rel_tol * scale {
            break;
        }
        rows.swap(r, best.1);
        cols.swap(r, best.2);
        let pivot = rows[r][cols[r]];
        let prow = rows[r].clone();
        for row in rows.iter_mut().skip(r + 1) {
            let f = row[cols[r]] / pivot;
            for (v, &pv) in row.iter_mut().zip(&prow) {
                *v -= f * pv;
            }
        }
        r += 1;
    }
    r
}

fn sampled_nullity(mode: &ModeSpec, rng: &mut ChaCha8Rng) -> usize {
    let active: Vec<usize> = (0..2).filter(|&a| mode.slot_index(a) >= 0).collect();
    let reach = (2.0 * f64::from(mode.n) + 1.0).sqrt() + 1.0;
    let points: Vec<[f64; 4]> = (0..12)
        .map(|_| {
            let x = mode.xi_mapping().x(rng.gen_range(-reach..reach));
            [
                rng.gen_range(-3.0..3.0),
                x,
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-3.0..3.0),
            ]
        })
        .collect();
    let mut columns = Vec::new();
    for mu in 0..4 {
        for &a in &active {
            let mut free = [[C::new(0.0, 0.0); 2]; 4];
            free[mu][a] = C::new(1.0, 0.0);
            let mf = ModeFunction::from_free(*mode, &free).unwrap();
            columns.push(points.iter().flat_map(|&p| conditions(&mf, p)).collect::<Vec<_>>());
        }
    }
    let nrows = columns[0].len();
    let rows: Vec<Vec<C>> = (0..nrows).map(|i| columns.iter().map(|c| c[i]).collect()).collect();
    columns.len() - rank(rows, 1e-6)
}

#[test]
fn sampled_rank_agrees_with_assembled_system() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for eps_q in [Sign::Minus, Sign::Plus] {
        for n in 0..=6u32 {
            for _ in 0..3 {
                let qb = rng.gen_range(0.05..0.5);
                let mode = ModeSpec::with_qb(
                    n,
                    Sign::Plus,
                    eps_q,
                    qb,
                    1.0,
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(0.0..3.0),
                )
                .unwrap();
                let oracle = sampled_nullity(&mode, &mut rng);
                let svd = degeneracy(&mode, DEFAULT_SVD_TOL).unwrap().nullity;
                assert_eq!(oracle, svd, "n={n} eps_q={eps_q}");
                assert_eq!(svd, if n == 0 { 1 } else { 0 }, "n={n} eps_q={eps_q}");
            }
        }
    }
}

#[test]
fn nullity_is_scale_free() {
    for n in 0..=4u32 {
        let base = degeneracy(
            &ModeSpec::with_qb(n, Sign::Plus, Sign::Minus, 0.2, 1.0, 0.3, 0.8).unwrap(),
            DEFAULT_SVD_TOL,
        )
        .unwrap()
        .nullity;
        for k in [0.1, 10.0] {
            // every dimensionful input scaled by k, k², or left alone
            let m = ModeSpec::with_qb(n, Sign::Plus, Sign::Minus, 0.2 * k * k, k, 0.3 * k, 0.8 * k).unwrap();
            assert_eq!(degeneracy(&m, DEFAULT_SVD_TOL).unwrap().nullity, base, "n={n} k={k}");
        }
    }
}

#[test]
fn ground_level_solution_satisfies_both_conditions() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for eps_q in [Sign::Minus, Sign::Plus] {
        let mode = ModeSpec::with_qb(0, Sign::Plus, eps_q, 0.3, 1.0, 0.4, 0.7).unwrap();
        let report = degeneracy(&mode, DEFAULT_SVD_TOL).unwrap();
        assert_eq!(report.basis.len(), 1);
        let mf = ModeFunction::new(mode, report.basis[0]).unwrap();
        let mut worst = 0.0f64;
        let mut scale = 0.0f64;
        for _ in 0..50 {
            let x = mode.xi_mapping().x(rng.gen_range(-2.0..2.0));
            let p = [
                rng.gen_range(-3.0..3.0),
                x,
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-3.0..3.0),
            ];
            scale = scale.max(
                mf.evaluate(p)
                    .iter()
                    .flatten()
                    .map(|v| v.norm_sqr())
                    .sum::<f64>()
                    .sqrt(),
            );
            worst = worst.max(conditions(&mf, p).iter().map(|v| v.norm()).fold(0.0, f64::max));
        }
        // finite differences limit the agreement
        assert!(worst <= 1e-7 * scale, "{worst} vs {scale}");
    }
}
