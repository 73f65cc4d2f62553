//! Spectral constants, machine-checkable problem assumptions, and the
//! parameter certificate that guarantees convergence of the linearized ADMM.
//!
//! With `L_w = L_g + L_h`, `L_A = λ_max(AᵀA)` and `λ_BB = λ_min(BᵀB)`, the
//! parameters are certified when
//!
//! ```text
//!   L_x ≥ L_g + β L_A + 6 L_w² + 1
//!   L_y ≥ L_w + L_w² + 3
//!   C_m = (L_y + L_w²) / 2
//!   β   ≥ max{ (L_w + L_y + 2)/λ_BB, 3(L_w² + L_y²)/(λ_BB C_m), 3 L_y²/λ_BB }
//! ```
//!
//! and the descent coefficients satisfy `C_0 − C_2 ≥ ½`, `C_1 − C_3 − C_m ≥ ½`
//! and `C_m − C_4 > 0`, where
//!
//! ```text
//!   C_0 = (L_x − L_g − β L_A)/2     C_1 = (2 L_y − L_w)/2
//!   C_2 = 3 L_w² / (β λ_BB)         C_3 = 3 L_y² / (β λ_BB)
//!   C_4 = 3 (L_w² + L_y²) / (β λ_BB)
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, norm, symmetric_eigen, Cholesky, Matrix};
use crate::model::ProblemSpec;

pub const SPECTRAL_TOL: f64 = 1e-10;
pub const SPECTRAL_MAX_ITERS: usize = 20_000;
/// `BᵀB` counts as singular when `λ_min ≤ RANK_TOL · λ_max`.
pub const RANK_TOL: f64 = 1e-10;
pub const RANGE_TOL: f64 = 1e-8;
/// Relative slack allowed when re-checking inequalities that were set with equality.
const CERT_REL_TOL: f64 = 1e-12;

/// Width of the block used by the spectral iterations. Clustered extreme
/// eigenvalues inside the block are separated by the Rayleigh–Ritz step.
const BLOCK: usize = 4;

#[derive(Clone, Copy, PartialEq)]
enum End {
    Top,
    Bottom,
}

/// Block iteration with Rayleigh–Ritz on a symmetric PSD operator `G`.
///
/// Each step projects `G` onto the current orthonormal basis, takes the
/// extreme Ritz pair `(θ, y)`, and asks `stop(θ, ‖Gy − θy‖, θ_prev)`.
/// The basis then moves to `orth(advance(v, Gv))` column by column.
fn ritz_iterate<A, N, S>(dim: usize, mut apply: A, mut advance: N, end: End, mut stop: S) -> Result<f64>
where
    A: FnMut(&[f64], &mut [f64]),
    N: FnMut(&[f64], &[f64], &mut [f64]),
    S: FnMut(f64, f64, f64) -> bool,
{
    let p = dim.min(BLOCK);
    let mut basis = orthonormalize((0..p).map(|k| start_vector(dim, k)).collect());
    let mut images = vec![vec![0.0; dim]; p];
    let mut prev = f64::NAN;
    for iter in 0..=SPECTRAL_MAX_ITERS {
        for (v, w) in basis.iter().zip(images.iter_mut()) {
            apply(v, w);
        }
        let mut h = vec![0.0; p * p];
        for i in 0..p {
            for j in 0..=i {
                let x = 0.5 * (dot(&basis[i], &images[j]) + dot(&basis[j], &images[i]));
                h[i * p + j] = x;
                h[j * p + i] = x;
            }
        }
        let (values, vectors) = symmetric_eigen(h, p);
        let k = if end == End::Top { p - 1 } else { 0 };
        let theta = values[k];
        let mut res = 0.0;
        for r in 0..dim {
            let (y, gy) = (0..p).fold((0.0, 0.0), |(y, gy), i| {
                (y + vectors[k][i] * basis[i][r], gy + vectors[k][i] * images[i][r])
            });
            res += (gy - theta * y) * (gy - theta * y);
        }
        if stop(theta, res.sqrt(), prev) {
            return Ok(theta);
        }
        if iter == SPECTRAL_MAX_ITERS {
            return Err(Error::SpectralNonConvergence {
                iterations: iter,
                estimate: theta,
            });
        }
        prev = theta;
        let next = basis
            .iter()
            .zip(&images)
            .map(|(v, w)| {
                let mut out = vec![0.0; dim];
                advance(v, w, &mut out);
                out
            })
            .collect();
        basis = orthonormalize(next);
    }
    unreachable!()
}

/// Deterministic start vectors from additive-recurrence sequences; the first
/// is all ones.
fn start_vector(dim: usize, k: usize) -> Vec<f64> {
    if k == 0 {
        return vec![1.0; dim];
    }
    let alpha = [0.754_877_666_246_692_7, 0.569_840_290_998_053_3, 0.618_033_988_749_894_8][(k - 1) % 3];
    (0..dim)
        .map(|i| ((i as f64 + k as f64) * alpha).fract() - 0.5)
        .collect()
}

/// Modified Gram–Schmidt, run twice. Columns that collapse (the operator
/// annihilated them) are replaced by coordinate vectors.
fn orthonormalize(mut cols: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let dim = cols.first().map_or(0, Vec::len);
    let mut fresh = 0;
    for j in 0..cols.len() {
        loop {
            let before = norm(&cols[j]);
            for _ in 0..2 {
                for i in 0..j {
                    let (done, rest) = cols.split_at_mut(j);
                    let c = dot(&done[i], &rest[0]);
                    rest[0].iter_mut().zip(&done[i]).for_each(|(x, q)| *x -= c * q);
                }
            }
            let n = norm(&cols[j]);
            if n > 1e-10 * before && n > 0.0 {
                cols[j].iter_mut().for_each(|x| *x /= n);
                break;
            }
            cols[j] = vec![0.0; dim];
            cols[j][fresh % dim] = 1.0;
            fresh += 1;
        }
    }
    cols
}

fn frobenius_sq(m: &Matrix) -> f64 {
    m.as_slice().iter().map(|v| v * v).sum()
}

/// Largest eigenvalue of `MᵀM`, by block iteration applied as `Mᵀ(Mv)`.
///
/// Stops once the top Ritz pair has `‖Gy − θy‖ ≤ 1e-10·θ`, which bounds the
/// distance from `θ` to the spectrum, or once the residual reaches the
/// round-off floor and `θ` no longer moves.
pub fn top_eigenvalue_gram(m: &Matrix) -> Result<f64> {
    if m.rows() == 0 || m.cols() == 0 {
        return Err(Error::InvalidParameter("empty matrix has no Gram spectrum".into()));
    }
    let scale = frobenius_sq(m);
    if scale == 0.0 {
        return Ok(0.0);
    }
    let mut tmp = vec![0.0; m.rows()];
    ritz_iterate(
        m.cols(),
        |v, out| {
            tmp.iter_mut().for_each(|x| *x = 0.0);
            m.mul_vec_acc(v, &mut tmp);
            m.tr_mul_vec_into(&tmp, out);
        },
        |_, gv, out| out.copy_from_slice(gv),
        End::Top,
        |theta, res, prev| res <= SPECTRAL_TOL * theta || at_floor(theta, res, prev, scale),
    )
}

fn at_floor(theta: f64, res: f64, prev: f64, scale: f64) -> bool {
    res <= 64.0 * f64::EPSILON * scale && (theta - prev).abs() <= 4.0 * f64::EPSILON * theta.abs()
}

/// Smallest eigenvalue of `BᵀB`, by block inverse iteration with the
/// Cholesky factor of `BᵀB`. Residuals are measured with `BᵀB` itself, so the
/// round-off floor is `ε·λ_max` rather than `ε·κ`.
pub fn min_eigenvalue_gram(b: &Matrix) -> Result<f64> {
    if b.rows() < b.cols() {
        return Err(Error::RankDeficient {
            min_eigenvalue: 0.0,
            max_eigenvalue: f64::NAN,
        });
    }
    let s = top_eigenvalue_gram(b)?;
    let rank_error = |min: f64| Error::RankDeficient {
        min_eigenvalue: min,
        max_eigenvalue: s,
    };
    if s == 0.0 {
        return Err(rank_error(0.0));
    }
    let g = b.gram();
    let chol = Cholesky::factor(&g).map_err(|_| rank_error(0.0))?;
    let lambda = ritz_iterate(
        g.cols(),
        |v, out| {
            out.iter_mut().for_each(|x| *x = 0.0);
            g.mul_vec_acc(v, out);
        },
        |v, _, out| {
            out.copy_from_slice(v);
            chol.solve_in_place(out);
        },
        End::Bottom,
        |lambda, res, prev| {
            res <= SPECTRAL_TOL * lambda.abs() || at_floor(lambda, res, prev, s) || lambda <= RANK_TOL * s
        },
    )?;
    if lambda <= RANK_TOL * s {
        return Err(rank_error(lambda));
    }
    Ok(lambda)
}

/// True iff every column `a_j` of `A` satisfies `‖B z_j − a_j‖ ≤ 1e-8 (1 + ‖a_j‖)`
/// for the least-squares solution `z_j` of `B z = a_j`.
pub fn check_range_inclusion(a: &Matrix, b: &Matrix) -> Result<bool> {
    if a.rows() != b.rows() {
        return Err(Error::Dimension {
            context: "range inclusion needs equal row counts",
            expected: b.rows(),
            found: a.rows(),
        });
    }
    min_eigenvalue_gram(b)?;
    let chol = Cholesky::factor(&b.gram())?;
    for j in 0..a.cols() {
        let aj = a.column(j);
        let mut z = b.tr_mul_vec(&aj);
        chol.solve_in_place(&mut z);
        let bz = b.mul_vec(&z);
        let miss = bz
            .iter()
            .zip(&aj)
            .map(|(u, v)| (u - v) * (u - v))
            .sum::<f64>()
            .sqrt();
        if miss > RANGE_TOL * (1.0 + norm(&aj)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Rank of `B` and range inclusion `Im(A) ⊆ Im(B)`. Coercivity cannot be
/// checked here and is carried by [`ProblemSpec::coercive_attested`].
pub fn check_assumptions(spec: &ProblemSpec) -> Result<()> {
    if !check_range_inclusion(&spec.a_stacked(), spec.b())? {
        return Err(Error::Assumption("Im(A) is not contained in Im(B)".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralConstants {
    /// `λ_max(AᵀA)` for the stacked `A`.
    pub l_a: f64,
    /// `λ_min(BᵀB)`.
    pub lambda_bb: f64,
    /// `L_g + L_h`.
    pub l_w: f64,
}

impl SpectralConstants {
    pub fn new(l_a: f64, lambda_bb: f64, l_g: f64, l_h: f64) -> Self {
        SpectralConstants {
            l_a,
            lambda_bb,
            l_w: l_g + l_h,
        }
    }

    pub fn of(spec: &ProblemSpec) -> Result<Self> {
        Ok(Self::new(
            top_eigenvalue_gram(&spec.a_stacked())?,
            min_eigenvalue_gram(spec.b())?,
            spec.g().lipschitz_constant(),
            spec.h().lipschitz_constant(),
        ))
    }
}

/// A failed inequality, with both sides as evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub beta: f64,
    pub l_x: f64,
    pub l_y: f64,
    pub c_m: f64,
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub l_g: f64,
    pub l_h: f64,
    pub l_a: f64,
    pub lambda_bb: f64,
    pub certified: bool,
    pub violations: Vec<Violation>,
}

impl Certificate {
    pub fn l_w(&self) -> f64 {
        self.l_g + self.l_h
    }

    fn assemble(beta: f64, l_x: f64, l_y: f64, constants: &SpectralConstants, l_g: f64, l_h: f64) -> Self {
        let l_w = l_g + l_h;
        let lw2 = l_w * l_w;
        let ly2 = l_y * l_y;
        let bl = beta * constants.lambda_bb;
        Certificate {
            beta,
            l_x,
            l_y,
            c_m: (l_y + lw2) / 2.0,
            c0: (l_x - l_g - beta * constants.l_a) / 2.0,
            c1: (2.0 * l_y - l_w) / 2.0,
            c2: 3.0 * lw2 / bl,
            c3: 3.0 * ly2 / bl,
            c4: 3.0 * (lw2 + ly2) / bl,
            l_g,
            l_h,
            l_a: constants.l_a,
            lambda_bb: constants.lambda_bb,
            certified: false,
            violations: Vec::new(),
        }
    }
}

fn check_inputs(constants: &SpectralConstants, l_g: f64, l_h: f64) -> Result<()> {
    if !(constants.lambda_bb > 0.0) || !constants.lambda_bb.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "lambda_BB must be positive, got {}",
            constants.lambda_bb
        )));
    }
    if !(constants.l_a >= 0.0) || !(l_g >= 0.0) || !(l_h >= 0.0) {
        return Err(Error::InvalidParameter(
            "L_A, L_g and L_h must be nonnegative".into(),
        ));
    }
    let l_w = l_g + l_h;
    if (constants.l_w - l_w).abs() > 1e-12 * (1.0 + l_w) {
        return Err(Error::InvalidParameter(format!(
            "constants carry L_w = {} but L_g + L_h = {l_w}",
            constants.l_w
        )));
    }
    Ok(())
}

/// Smallest parameters allowed by the certificate: each bound taken with equality.
pub fn derive_parameters(constants: &SpectralConstants, l_g: f64, l_h: f64) -> Result<Certificate> {
    check_inputs(constants, l_g, l_h)?;
    let l_w = l_g + l_h;
    let lam = constants.lambda_bb;
    let l_y = l_w + l_w * l_w + 3.0;
    let c_m = (l_y + l_w * l_w) / 2.0;
    let beta = ((l_w + l_y + 2.0) / lam)
        .max(3.0 * (l_w * l_w + l_y * l_y) / (lam * c_m))
        .max(3.0 * l_y * l_y / lam);
    let l_x = l_g + beta * constants.l_a + 6.0 * l_w * l_w + 1.0;
    let mut cert = Certificate::assemble(beta, l_x, l_y, constants, l_g, l_h);
    cert.certified = true;
    Ok(cert)
}

/// Checks user-chosen parameters against every certificate inequality.
/// The coefficients `C_0..C_4` are always filled in.
pub fn validate_parameters(
    beta: f64,
    l_x: f64,
    l_y: f64,
    constants: &SpectralConstants,
    l_g: f64,
    l_h: f64,
) -> Certificate {
    let mut cert = Certificate::assemble(beta, l_x, l_y, constants, l_g, l_h);
    let mut violations = Vec::new();
    let mut ge = |name: &str, lhs: f64, rhs: f64, scale: f64| {
        if !(lhs >= rhs - CERT_REL_TOL * scale.max(1.0)) {
            violations.push(Violation {
                name: name.to_string(),
                lhs,
                rhs,
            });
        }
    };
    for (name, v) in [("beta > 0", beta), ("L_x > 0", l_x), ("L_y > 0", l_y)] {
        if !(v > 0.0) || !v.is_finite() {
            ge(name, v, 0.0, 0.0);
        }
    }
    if let Err(e) = check_inputs(constants, l_g, l_h) {
        ge(&format!("inputs: {e}"), f64::NAN, 0.0, 0.0);
    }

    let l_w = l_g + l_h;
    let lw2 = l_w * l_w;
    let lam = constants.lambda_bb;
    let rhs = l_g + beta * constants.l_a + 6.0 * lw2 + 1.0;
    ge("L_x >= L_g + beta*L_A + 6*L_w^2 + 1", l_x, rhs, rhs.abs().max(l_x.abs()));
    let rhs = l_w + lw2 + 3.0;
    ge("L_y >= L_w + L_w^2 + 3", l_y, rhs, rhs.max(l_y.abs()));
    let rhs = (l_w + l_y + 2.0) / lam;
    ge("beta >= (L_w + L_y + 2)/lambda_BB", beta, rhs, rhs.abs().max(beta.abs()));
    let rhs = 3.0 * (lw2 + l_y * l_y) / (lam * cert.c_m);
    ge("beta >= 3*(L_w^2 + L_y^2)/(lambda_BB*C_m)", beta, rhs, rhs.abs().max(beta.abs()));
    let rhs = 3.0 * l_y * l_y / lam;
    ge("beta >= 3*L_y^2/lambda_BB", beta, rhs, rhs.abs().max(beta.abs()));
    ge(
        "C_0 - C_2 >= 1/2",
        cert.c0 - cert.c2,
        0.5,
        l_x.abs() + l_g + (beta * constants.l_a).abs() + cert.c2.abs(),
    );
    ge(
        "C_1 - C_3 - C_m >= 1/2",
        cert.c1 - cert.c3 - cert.c_m,
        0.5,
        cert.c1.abs() + cert.c3.abs() + cert.c_m.abs(),
    );
    if !(cert.c_m - cert.c4 > 0.0) {
        violations.push(Violation {
            name: "C_m - C_4 > 0".into(),
            lhs: cert.c_m - cert.c4,
            rhs: 0.0,
        });
    }
    cert.certified = violations.is_empty();
    cert.violations = violations;
    cert
}
