//! Normalized Hermite functions `v_n(ξ)`, the transverse ladder operators and
//! Gauss–Hermite quadrature.
//!
//! `v_n(ξ) = (π^{1/2} 2^n n!)^{-1/2} H_n(ξ) e^{-ξ²/2}`, with `v_n ≡ 0` for `n < 0`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::gamma::{C64, I};
use crate::sign::Sign;

const RESCALE: f64 = 1e200;

/// Evaluates `v_n(ξ)`.
///
/// Runs the normalized three-term recurrence on `v_k e^{ξ²/2}` with running
/// rescaling, and applies the Gaussian only at the end, so that neither
/// `2^n n!` nor `e^{-ξ²/2}` is ever formed on its own.
pub fn eval_v(n: i64, xi: f64) -> f64 {
    if n < 0 {
        return 0.0;
    }
    let (u, log_scale) = scaled_recurrence(n as usize, xi);
    finish(u, log_scale, xi)
}

/// `[v_0(ξ), …, v_{n_max}(ξ)]`.
pub fn eval_v_all(n_max: usize, xi: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25);
    let mut log_scale = 0.0;
    out.push(finish(cur, log_scale, xi));
    for k in 0..n_max {
        let kf = k as f64;
        let next = xi * (2.0 / (kf + 1.0)).sqrt() * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            prev /= RESCALE;
            log_scale += RESCALE.ln();
        }
        out.push(finish(cur, log_scale, xi));
    }
    out
}

fn scaled_recurrence(n: usize, xi: f64) -> (f64, f64) {
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25);
    let mut log_scale = 0.0;
    for k in 0..n {
        let kf = k as f64;
        let next = xi * (2.0 / (kf + 1.0)).sqrt() * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            prev /= RESCALE;
            log_scale += RESCALE.ln();
        }
    }
    (cur, log_scale)
}

fn finish(u: f64, log_scale: f64, xi: f64) -> f64 {
    if u == 0.0 {
        return 0.0;
    }
    u.signum() * (u.abs().ln() + log_scale - 0.5 * xi * xi).exp()
}

/// `dv_n/dξ = √(n/2) v_{n-1} − √((n+1)/2) v_{n+1}`.
pub fn eval_dv(n: i64, xi: f64) -> f64 {
    if n < 0 {
        return 0.0;
    }
    let nf = n as f64;
    (nf / 2.0).sqrt() * eval_v(n - 1, xi) - ((nf + 1.0) / 2.0).sqrt() * eval_v(n + 1, xi)
}

/// `p_n = √(2n|q|B)`, zero for `n ≤ 0`.
pub fn p_level(n: i64, qb: f64) -> f64 {
    if n <= 0 {
        0.0
    } else {
        (2.0 * n as f64 * qb).sqrt()
    }
}

/// Affine map between the lab coordinate `x` and the oscillator variable `ξ`:
/// `ξ = √(|q|B) x − ε ε_q p_y / √(|q|B)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiMapping {
    pub qb: f64,
    pub py: f64,
    pub eps: Sign,
    pub eps_q: Sign,
}

impl XiMapping {
    pub fn new(qb: f64, py: f64, eps: Sign, eps_q: Sign) -> Result<Self> {
        if !(qb > 0.0 && qb.is_finite()) {
            return Err(Error::domain(format!("|q|B must be positive, got {qb}")));
        }
        Ok(XiMapping { qb, py, eps, eps_q })
    }

    fn center(&self) -> f64 {
        (self.eps * self.eps_q).value() * self.py / self.qb
    }

    pub fn xi(&self, x: f64) -> f64 {
        self.qb.sqrt() * (x - self.center())
    }

    pub fn x(&self, xi: f64) -> f64 {
        xi / self.qb.sqrt() + self.center()
    }

    /// `dξ/dx`.
    pub fn jacobian(&self) -> f64 {
        self.qb.sqrt()
    }
}

/// The two first-order operators
/// `Ô₁ = i√(|q|B)(−ε_q ξ + ∂_ξ)` and `Ô₂ = i√(|q|B)(ε_q ξ + ∂_ξ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ladder {
    O1,
    O2,
}

/// `Ô v_n = coefficient · v_index`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderTerm {
    pub coefficient: C64,
    pub index: i64,
}

/// Exact image of `v_n` under a ladder operator.
///
/// `Ô₁` raises for positive charge and lowers for negative charge; `Ô₂` the
/// reverse. An index of `-1` may come back (with a zero coefficient, since
/// `p_0 = 0`); it denotes the zero function.
pub fn ladder_action(which: Ladder, eps_q: Sign, n: i64, qb: f64) -> Result<LadderTerm> {
    if n < 0 {
        return Err(Error::NegativeIndex(n));
    }
    let raises = matches!((which, eps_q), (Ladder::O1, Sign::Plus) | (Ladder::O2, Sign::Minus));
    Ok(if raises {
        LadderTerm {
            coefficient: -I * p_level(n + 1, qb),
            index: n + 1,
        }
    } else {
        LadderTerm {
            coefficient: I * p_level(n, qb),
            index: n - 1,
        }
    })
}

/// `|(Ô v_n)(ξ) − coefficient · v_index(ξ)|` with `∂_ξ` replaced by a central
/// difference of step `h`. Zero for `n < 0`, where `v_n` vanishes identically.
pub fn check_ladder_numeric(which: Ladder, eps_q: Sign, n: i64, xi: f64, h: f64, qb: f64) -> Result<f64> {
    if !(qb > 0.0) || !(h > 0.0) {
        return Err(Error::domain("check_ladder_numeric needs qB > 0 and h > 0"));
    }
    if n < 0 {
        return Ok(0.0);
    }
    let dv = (eval_v(n, xi + h) - eval_v(n, xi - h)) / (2.0 * h);
    let sign_xi = match which {
        Ladder::O1 => -eps_q.value(),
        Ladder::O2 => eps_q.value(),
    };
    let numeric = I * qb.sqrt() * (sign_xi * xi * eval_v(n, xi) + dv);
    let term = ladder_action(which, eps_q, n, qb)?;
    let exact = term.coefficient * eval_v(term.index, xi);
    Ok((numeric - exact).norm())
}

/// Gauss–Hermite rule for `∫ e^{-ξ²} f(ξ) dξ`.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussHermite {
    /// Nodes from the eigenvalues of the symmetric Jacobi matrix; weights from
    /// the Christoffel sum `1 / Σ_k h_k(x)²` over orthonormal Hermite
    /// polynomials, which keeps the tiny outer weights relatively accurate.
    pub fn new(points: usize) -> Result<Self> {
        if points == 0 {
            return Err(Error::domain("Gauss-Hermite needs at least one point"));
        }
        let mut jacobi = DMatrix::<f64>::zeros(points, points);
        for k in 1..points {
            let off = (k as f64 / 2.0).sqrt();
            jacobi[(k, k - 1)] = off;
            jacobi[(k - 1, k)] = off;
        }
        let mut nodes: Vec<f64> = SymmetricEigen::new(jacobi).eigenvalues.iter().copied().collect();
        nodes.sort_by(f64::total_cmp);
        // exact symmetry of the rule
        let n = nodes.len();
        for i in 0..n / 2 {
            let sym = 0.5 * (nodes[n - 1 - i] - nodes[i]);
            nodes[i] = -sym;
            nodes[n - 1 - i] = sym;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        let weights = nodes
            .iter()
            .map(|&x| {
                // orthonormal polynomials w.r.t. e^{-x²}: h_k = v_k e^{x²/2}
                let (mut prev, mut cur) = (0.0, PI.powf(-0.25));
                let mut sum = cur * cur;
                for k in 0..points - 1 {
                    let kf = k as f64;
                    let next = x * (2.0 / (kf + 1.0)).sqrt() * cur - (kf / (kf + 1.0)).sqrt() * prev;
                    prev = cur;
                    cur = next;
                    sum += cur * cur;
                }
                1.0 / sum
            })
            .collect();
        Ok(GaussHermite { nodes, weights })
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// Largest `|x_i + x_{n-1-i}|`; zero by construction.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.nodes.len();
        (0..n)
            .map(|i| (self.nodes[i] + self.nodes[n - 1 - i]).abs())
            .fold(0.0, f64::max)
    }
}

/// Matrix of `∫ v_n v_m dξ` for `0 ≤ n, m ≤ n_max`.
pub fn orthonormality_matrix(n_max: usize, quadrature_points: usize) -> Result<DMatrix<f64>> {
    if quadrature_points < n_max + 1 {
        return Err(Error::domain(format!(
            "need at least {} quadrature points for n_max = {n_max}, got {quadrature_points}",
            n_max + 1
        )));
    }
    let rule = GaussHermite::new(quadrature_points)?;
    // v_n(x) v_m(x) = e^{-x²} h_n(x) h_m(x); integrate h_n h_m against the rule.
    let table: Vec<Vec<f64>> = rule
        .nodes
        .iter()
        .map(|&x| {
            eval_v_all(n_max, x)
                .into_iter()
                .map(|v| v * (0.5 * x * x).exp())
                .collect()
        })
        .collect();
    Ok(DMatrix::from_fn(n_max + 1, n_max + 1, |n, m| {
        table.iter().zip(&rule.weights).map(|(h, w)| w * h[n] * h[m]).sum()
    }))
}
