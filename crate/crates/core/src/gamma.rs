//! Dirac-representation gamma matrices and the matrices built from them.
//!
//! Lorentz indices run 0..4 as (t, x, y, z). The metric is `diag(+1, -1, -1, -1)`
//! and the Levi-Civita symbol is fixed by `ε^{0123} = +1`.
//!
//! Every constructor here produces entries in `{0, ±1, ±i}` (or small integer
//! multiples), so products and anticommutators are exact in floating point and
//! identities can be checked with `==`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Four complex spinor components.
pub type Spinor = [C64; 4];

/// One spinor per Lorentz index, `ψ_μ` with the index lowered.
pub type VectorSpinor = [Spinor; 4];

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Diagonal of `g_{μν}` (equal to `g^{μν}`).
pub const METRIC: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

#[inline]
pub fn metric(mu: usize, nu: usize) -> f64 {
    if mu == nu {
        METRIC[mu]
    } else {
        0.0
    }
}

/// `ε^{μνρλ}` with `ε^{0123} = +1`.
pub fn levi_civita(idx: [usize; 4]) -> i32 {
    let mut sign = 1;
    for i in 0..4 {
        for j in (i + 1)..4 {
            if idx[i] == idx[j] {
                return 0;
            }
            if idx[i] > idx[j] {
                sign = -sign;
            }
        }
    }
    sign
}

/// Dense 4×4 complex matrix acting on Dirac spinors.
#[derive(Clone, Copy, PartialEq)]
pub struct ComplexMatrix4(pub [[C64; 4]; 4]);

impl ComplexMatrix4 {
    pub const fn zero() -> Self {
        ComplexMatrix4([[ZERO; 4]; 4])
    }

    pub fn identity() -> Self {
        Self::diag([ONE; 4])
    }

    pub fn diag(d: [C64; 4]) -> Self {
        let mut m = Self::zero();
        for (i, v) in d.into_iter().enumerate() {
            m.0[i][i] = v;
        }
        m
    }

    /// Builds `[[0, a], [b, 0]]` from 2×2 blocks.
    fn off_diagonal_blocks(a: [[C64; 2]; 2], b: [[C64; 2]; 2]) -> Self {
        let mut m = Self::zero();
        for i in 0..2 {
            for j in 0..2 {
                m.0[i][j + 2] = a[i][j];
                m.0[i + 2][j] = b[i][j];
            }
        }
        m
    }

    pub fn dagger(&self) -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] = self.0[j][i].conj();
            }
        }
        m
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut m = *self;
        m.0.iter_mut().flatten().for_each(|v| *v *= s);
        m
    }

    pub fn apply(&self, v: &Spinor) -> Spinor {
        let mut out = [ZERO; 4];
        for (i, row) in self.0.iter().enumerate() {
            out[i] = row.iter().zip(v).map(|(a, b)| a * b).sum();
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().flatten().all(|v| *v == ZERO)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        *self * *other + *other * *self
    }

    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }
}

impl fmt::Debug for ComplexMatrix4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix4[")?;
        for row in &self.0 {
            let cells: Vec<String> = row.iter().map(|c| format!("{c}")).collect();
            writeln!(f, "  {}", cells.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Index<(usize, usize)> for ComplexMatrix4 {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix4 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.0[i][j]
    }
}

impl Add for ComplexMatrix4 {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for i in 0..4 {
            for j in 0..4 {
                self.0[i][j] += rhs.0[i][j];
            }
        }
        self
    }
}

impl Sub for ComplexMatrix4 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for ComplexMatrix4 {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-ONE)
    }
}

impl Mul for ComplexMatrix4 {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] = (0..4).map(|k| self.0[i][k] * rhs.0[k][j]).sum();
            }
        }
        m
    }
}

impl Mul<f64> for ComplexMatrix4 {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        self.scale(C64::new(rhs, 0.0))
    }
}

impl Mul<C64> for ComplexMatrix4 {
    type Output = Self;
    fn mul(self, rhs: C64) -> Self {
        self.scale(rhs)
    }
}

fn pauli(k: usize) -> [[C64; 2]; 2] {
    match k {
        1 => [[ZERO, ONE], [ONE, ZERO]],
        2 => [[ZERO, -I], [I, ZERO]],
        3 => [[ONE, ZERO], [ZERO, -ONE]],
        _ => unreachable!("pauli index {k}"),
    }
}

/// `γ^μ`, `γ5` and `σ^{μν}` in the Dirac representation.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaSet {
    /// `γ^μ` (upper index).
    pub upper: [ComplexMatrix4; 4],
    /// `γ5 = iγ⁰γ¹γ²γ³`.
    pub gamma5: ComplexMatrix4,
    /// `σ^{μν} = (i/2)[γ^μ, γ^ν]`, all index pairs.
    pub sigma: [[ComplexMatrix4; 4]; 4],
}

impl GammaSet {
    pub fn dirac() -> Self {
        let mut upper = [ComplexMatrix4::zero(); 4];
        upper[0] = ComplexMatrix4::diag([ONE, ONE, -ONE, -ONE]);
        for k in 1..4 {
            let s = pauli(k);
            let neg_s = s.map(|row| row.map(|v| -v));
            upper[k] = ComplexMatrix4::off_diagonal_blocks(s, neg_s);
        }
        Self::from_upper(upper)
    }

    fn from_upper(upper: [ComplexMatrix4; 4]) -> Self {
        let gamma5 = (upper[0] * upper[1] * upper[2] * upper[3]).scale(I);
        let mut sigma = [[ComplexMatrix4::zero(); 4]; 4];
        for mu in 0..4 {
            for nu in 0..4 {
                sigma[mu][nu] = upper[mu].commutator(&upper[nu]).scale(C64::new(0.0, 0.5));
            }
        }
        GammaSet { upper, gamma5, sigma }
    }

    /// `γ_μ = g_{μν} γ^ν`.
    pub fn lower(&self, mu: usize) -> ComplexMatrix4 {
        self.upper[mu] * METRIC[mu]
    }

    /// Test hook: the same set with `γ^mu` negated in one entry so that the
    /// Clifford relations break.
    #[doc(hidden)]
    pub fn with_corrupted_sign(mut self, mu: usize) -> Self {
        let (i, j) = (0..16)
            .map(|k| (k / 4, k % 4))
            .find(|&(i, j)| self.upper[mu][(i, j)] != ZERO)
            .expect("gamma matrices are nonzero");
        self.upper[mu][(i, j)] = -self.upper[mu][(i, j)];
        Self::from_upper(self.upper)
    }

    /// `max |{γ^μ, γ^ν} − 2 g^{μν} I|` over all index pairs. Zero for a valid set.
    pub fn clifford_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for mu in 0..4 {
            for nu in 0..4 {
                let lhs = self.upper[mu].anticommutator(&self.upper[nu]);
                let rhs = ComplexMatrix4::identity() * (2.0 * metric(mu, nu));
                worst = worst.max((lhs - rhs).max_abs());
            }
        }
        worst
    }

    /// Exact check of `{γ^μ, γ^ν} = 2 g^{μν} I` for all pairs.
    pub fn satisfies_clifford(&self) -> bool {
        (0..4).all(|mu| {
            (0..4).all(|nu| {
                self.upper[mu].anticommutator(&self.upper[nu]) == ComplexMatrix4::identity() * (2.0 * metric(mu, nu))
            })
        })
    }

    /// `γ^μ v_μ` for a spinor per Lorentz index (index lowered on `v`).
    pub fn trace(&self, v: &VectorSpinor) -> Spinor {
        let mut out = [ZERO; 4];
        for (g, s) in self.upper.iter().zip(v) {
            for (o, c) in out.iter_mut().zip(g.apply(s)) {
                *o += c;
            }
        }
        out
    }
}

/// Matrices `Γ_μ^α_ν(A)` and `B_μν(A)` of the A-parameterized spin-3/2 Lagrangian.
#[derive(Debug, Clone)]
pub struct RsLagrangianMatrices {
    pub a: f64,
    pub b_of_a: f64,
    pub c_of_a: f64,
    /// Indexed `[μ][α][ν]`, with μ, ν lower and α upper.
    pub gamma: Vec<ComplexMatrix4>,
    /// Indexed `[μ][ν]`, both lower.
    pub bmat: [[ComplexMatrix4; 4]; 4],
}

pub fn b_of_a(a: f64) -> f64 {
    1.5 * a * a + a + 0.5
}

pub fn c_of_a(a: f64) -> f64 {
    3.0 * a * a + 3.0 * a + 1.0
}

impl RsLagrangianMatrices {
    pub fn new(a: f64, gammas: &GammaSet) -> Result<Self> {
        if !a.is_finite() {
            return Err(Error::domain(format!("A must be finite, got {a}")));
        }
        if a == -0.5 {
            return Err(Error::domain("A = -1/2 is excluded"));
        }
        let (b, c) = (b_of_a(a), c_of_a(a));
        let id = ComplexMatrix4::identity();
        let mut gamma = Vec::with_capacity(64);
        for mu in 0..4 {
            let g_mu = gammas.lower(mu);
            for alpha in 0..4 {
                for nu in 0..4 {
                    let g_nu = gammas.lower(nu);
                    // g_ν^α = g_μ^α = δ
                    let delta = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
                    let term = gammas.upper[alpha] * metric(mu, nu)
                        + (g_mu * delta(nu, alpha) + g_nu * delta(mu, alpha)) * a
                        + (g_mu * gammas.upper[alpha] * g_nu) * b;
                    gamma.push(term);
                }
            }
        }
        let mut bmat = [[ComplexMatrix4::zero(); 4]; 4];
        for (mu, row) in bmat.iter_mut().enumerate() {
            for (nu, m) in row.iter_mut().enumerate() {
                *m = id * metric(mu, nu) - (gammas.lower(mu) * gammas.lower(nu)) * c;
            }
        }
        Ok(RsLagrangianMatrices {
            a,
            b_of_a: b,
            c_of_a: c,
            gamma,
            bmat,
        })
    }

    pub fn gamma(&self, mu: usize, alpha: usize, nu: usize) -> &ComplexMatrix4 {
        &self.gamma[16 * mu + 4 * alpha + nu]
    }
}

/// A vector-spinor field that can report its value and exact first derivatives.
pub trait AnalyticField {
    fn value(&self, point: [f64; 4]) -> VectorSpinor;
    /// `∂_ρ ψ_λ` indexed `[ρ][λ]`.
    fn gradient(&self, point: [f64; 4]) -> [VectorSpinor; 4];
}

/// Residual of the first-order Levi-Civita form of the free spin-3/2 equation,
///
/// `R^μ = i ε^{μνρλ} γ5 γ_ν ∂_ρ ψ_λ + m σ^{μλ} ψ_λ`,
///
/// one spinor per free index μ. It vanishes exactly on fields obeying the
/// Dirac equation together with `γ^μ ψ_μ = 0`.
pub fn rs_operator_levi_civita(
    gammas: &GammaSet,
    field: &impl AnalyticField,
    mass: f64,
    point: [f64; 4],
) -> VectorSpinor {
    let psi = field.value(point);
    let grad = field.gradient(point);
    let lowered: [ComplexMatrix4; 4] = std::array::from_fn(|nu| gammas.gamma5 * gammas.lower(nu));
    let mut out = [[ZERO; 4]; 4];
    for (mu, res) in out.iter_mut().enumerate() {
        for nu in 0..4 {
            for rho in 0..4 {
                for lam in 0..4 {
                    let e = levi_civita([mu, nu, rho, lam]);
                    if e == 0 {
                        continue;
                    }
                    let v = lowered[nu].apply(&grad[rho][lam]);
                    for (r, c) in res.iter_mut().zip(v) {
                        *r += I * f64::from(e) * c;
                    }
                }
            }
        }
        for (lam, p) in psi.iter().enumerate() {
            let v = gammas.sigma[mu][lam].apply(p);
            for (r, c) in res.iter_mut().zip(v) {
                *r += mass * c;
            }
        }
    }
    out
}

pub fn spinor_norm(s: &Spinor) -> f64 {
    s.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Euclidean norm over all 16 components.
pub fn vector_spinor_norm(v: &VectorSpinor) -> f64 {
    v.iter().flatten().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vector_spinor_max(v: &VectorSpinor) -> f64 {
    v.iter().flatten().map(|c| c.norm()).fold(0.0, f64::max)
}
