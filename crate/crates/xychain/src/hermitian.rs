//! Small dense Hermitian linear algebra.
//!
//! Everything here targets matrices of dimension <= 8: eigendecomposition
//! by cyclic Jacobi rotations, the principal square root of a positive
//! semidefinite state, and a closed-form maximum eigenpair for real
//! symmetric 3x3 matrices. No external solver is involved, which keeps the
//! whole measure pipeline self-contained and bit-reproducible.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::states::DensityMatrix;

pub const MAX_DIM: usize = 8;
const HERMITICITY_TOL: f64 = 1e-12;
const EIGENVALUE_FLOOR: f64 = -1e-10;

/// Dense square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, C64::new(1.0, 0.0));
        }
        m
    }

    /// Build from real row-major entries.
    pub fn from_real(dim: usize, entries: &[f64]) -> Self {
        assert_eq!(entries.len(), dim * dim, "entry count must be dim^2");
        Self {
            dim,
            data: entries.iter().map(|&x| C64::new(x, 0.0)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn mul(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix product needs equal dims");
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    let v = out.get(i, j) + a * rhs.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> CMatrix {
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, self.get(j, i).conj());
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn kron(&self, rhs: &CMatrix) -> CMatrix {
        let (n, m) = (self.dim, rhs.dim);
        let mut out = CMatrix::zeros(n * m);
        for i in 0..n {
            for j in 0..n {
                let a = self.get(i, j);
                for k in 0..m {
                    for l in 0..m {
                        out.set(i * m + k, j * m + l, a * rhs.get(k, l));
                    }
                }
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// max |a_ij - conj(a_ji)|
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }
}

/// A validated Hermitian matrix of dimension <= 8.
#[derive(Clone, Debug)]
pub struct HermitianMatrix {
    mat: CMatrix,
}

impl HermitianMatrix {
    pub fn new(mat: CMatrix) -> Result<Self> {
        if mat.dim() == 0 || mat.dim() > MAX_DIM {
            return Err(Error::InvalidParameter {
                name: "dim",
                reason: format!("Hermitian matrices are supported up to dim {MAX_DIM}, got {}", mat.dim()),
            });
        }
        let defect = mat.hermitian_defect();
        if defect > HERMITICITY_TOL {
            return Err(Error::NotHermitian { max_asymmetry: defect });
        }
        Ok(Self { mat })
    }

    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        Self::new(CMatrix::from_real(dim, entries))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }
}

pub fn pauli_x() -> HermitianMatrix {
    HermitianMatrix::from_real(2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
}

pub fn pauli_y() -> HermitianMatrix {
    let mut m = CMatrix::zeros(2);
    m.set(0, 1, C64::new(0.0, -1.0));
    m.set(1, 0, C64::new(0.0, 1.0));
    HermitianMatrix::new(m).unwrap()
}

pub fn pauli_z() -> HermitianMatrix {
    HermitianMatrix::from_real(2, &[1.0, 0.0, 0.0, -1.0]).unwrap()
}

/// Sorted eigendecomposition; `vectors` holds orthonormal eigenvectors as
/// columns, matching the ascending `values`.
#[derive(Clone, Debug)]
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

const MAX_SWEEPS: usize = 60;

/// Eigendecomposition by cyclic Jacobi rotations.
///
/// Each rotation annihilates one off-diagonal pair; for dims <= 8 the
/// off-diagonal mass collapses quadratically and a handful of sweeps give
/// reconstruction residuals at the 1e-15 * ||M|| level. Eigenvalues come
/// back ascending; each eigenvector is phased so its first component of
/// magnitude > 1e-12 is real positive.
pub fn eigh(m: &HermitianMatrix) -> Result<Eigh> {
    let n = m.dim();
    let mut a = m.matrix().clone();
    let mut v = CMatrix::identity(n);
    let scale = a.max_abs().max(1.0);
    let stop = 1e-15 * n as f64 * scale;
    let skip = 1e-300;

    let mut converged = false;
    let mut off = 0.0;
    for _sweep in 0..MAX_SWEEPS {
        off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a.get(p, q).norm();
            }
        }
        if off <= stop {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                let abs_apq = apq.norm();
                if abs_apq <= skip {
                    continue;
                }
                let app = a.get(p, p).re;
                let aqq = a.get(q, q).re;
                let tau = (aqq - app) / (2.0 * abs_apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = (apq / abs_apq) * (t * c);

                // column update: B = A J with J_pp = J_qq = c, J_pq = s,
                // J_qp = -conj(s)
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, c * akp - s.conj() * akq);
                    a.set(k, q, s * akp + c * akq);
                }
                // row update: A' = J^H B
                for k in 0..n {
                    let bpk = a.get(p, k);
                    let bqk = a.get(q, k);
                    a.set(p, k, c * bpk - s * bqk);
                    a.set(q, k, s.conj() * bpk + c * bqk);
                }
                a.set(p, q, C64::new(0.0, 0.0));
                a.set(q, p, C64::new(0.0, 0.0));
                let dp = a.get(p, p);
                let dq = a.get(q, q);
                a.set(p, p, C64::new(dp.re, 0.0));
                a.set(q, q, C64::new(dq.re, 0.0));

                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s.conj() * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }
    if !converged {
        return Err(Error::EighNonConvergence {
            sweeps: MAX_SWEEPS,
            off_diagonal: off,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(i, i).re.total_cmp(&a.get(j, j).re));
    let values: Vec<f64> = order.iter().map(|&i| a.get(i, i).re).collect();
    let mut vectors = CMatrix::zeros(n);
    for (col, &src) in order.iter().enumerate() {
        for k in 0..n {
            vectors.set(k, col, v.get(k, src));
        }
    }
    for col in 0..n {
        if let Some(k) = (0..n).find(|&k| vectors.get(k, col).norm() > 1e-12) {
            let z = vectors.get(k, col);
            let phase = z.conj() / z.norm();
            for row in 0..n {
                let w = vectors.get(row, col) * phase;
                vectors.set(row, col, w);
            }
        }
    }
    Ok(Eigh { values, vectors })
}

/// Principal square root of a state: V diag(sqrt(max(lambda, 0))) V^H.
///
/// Eigenvalues in [-1e-10, 0) are quadrature noise and clamp to zero;
/// anything below that is rejected as not a state.
pub fn sqrt_psd(rho: &DensityMatrix) -> Result<HermitianMatrix> {
    let h = HermitianMatrix::new(CMatrix::from_real(rho.dim(), rho.entries()))?;
    let eig = eigh(&h)?;
    if let Some(&bad) = eig.values.iter().find(|&&l| l < EIGENVALUE_FLOOR) {
        return Err(Error::NotAState {
            reason: format!("eigenvalue {bad:.3e} below {EIGENVALUE_FLOOR:.1e}"),
        });
    }
    let n = rho.dim();
    let top = eig.values.last().copied().unwrap_or(0.0).abs();
    let floor = 16.0 * f64::EPSILON * top;
    let roots: Vec<f64> = eig
        .values
        .iter()
        .map(|&l| if l < floor { 0.0 } else { l.sqrt() })
        .collect();
    let mut out = CMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for (k, &root) in roots.iter().enumerate() {
                acc += eig.vectors.get(i, k) * eig.vectors.get(j, k).conj() * root;
            }
            out.set(i, j, acc);
        }
    }
    // symmetrize away rounding in the reconstruction
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = (out.get(i, j) + out.get(j, i).conj()) * 0.5;
            out.set(i, j, avg);
            out.set(j, i, avg.conj());
        }
        let d = out.get(i, i);
        out.set(i, i, C64::new(d.re, 0.0));
    }
    HermitianMatrix::new(out)
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn dominant_index(v: [f64; 3]) -> usize {
    let mut best = 0;
    for i in 1..3 {
        if v[i].abs() > v[best].abs() {
            best = i;
        }
    }
    best
}

fn fix_sign(mut v: [f64; 3]) -> [f64; 3] {
    if let Some(&first) = v.iter().find(|x| x.abs() > 1e-12) {
        if first < 0.0 {
            for x in &mut v {
                *x = -*x;
            }
        }
    }
    v
}

fn rayleigh(w: &[[f64; 3]; 3], v: [f64; 3]) -> f64 {
    let mut acc = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            acc += v[i] * w[i][j] * v[j];
        }
    }
    acc
}

/// Largest eigenvalue and a unit eigenvector of a real symmetric 3x3
/// matrix, by the trigonometric solution of the characteristic cubic.
///
/// Degenerate top eigenvalues are resolved deterministically: candidate
/// eigenvectors are ordered by the index of their largest-magnitude
/// component and the first nonzero component is made positive.
pub fn max_eig_sym3(w: &[[f64; 3]; 3]) -> Result<(f64, [f64; 3])> {
    let defect = (w[0][1] - w[1][0])
        .abs()
        .max((w[0][2] - w[2][0]).abs())
        .max((w[1][2] - w[2][1]).abs());
    if defect > HERMITICITY_TOL {
        return Err(Error::NotHermitian { max_asymmetry: defect });
    }

    let scale = w
        .iter()
        .flatten()
        .fold(0.0f64, |acc, &x| acc.max(x.abs()))
        .max(1.0);
    let q = (w[0][0] + w[1][1] + w[2][2]) / 3.0;
    let p1 = w[0][1] * w[0][1] + w[0][2] * w[0][2] + w[1][2] * w[1][2];
    let p2 = (w[0][0] - q).powi(2) + (w[1][1] - q).powi(2) + (w[2][2] - q).powi(2) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    if p < 1e-14 * scale {
        // (near-)scalar matrix: every direction is an eigenvector
        return Ok((q, [1.0, 0.0, 0.0]));
    }

    // B = (W - qI)/p has eigenvalues 2 cos(theta + 2 pi k / 3)
    let mut b = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            b[i][j] = (w[i][j] - if i == j { q } else { 0.0 }) / p;
        }
    }
    let det_b = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1])
        - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
        + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
    let r = (det_b / 2.0).clamp(-1.0, 1.0);
    let theta = r.acos() / 3.0;
    let lambda_max = q + 2.0 * p * theta.cos();

    // eigenvector from the null space of W - lambda_max I
    let rows: [[f64; 3]; 3] = [
        [w[0][0] - lambda_max, w[0][1], w[0][2]],
        [w[1][0], w[1][1] - lambda_max, w[1][2]],
        [w[2][0], w[2][1], w[2][2] - lambda_max],
    ];
    let candidates = [
        cross(rows[0], rows[1]),
        cross(rows[0], rows[2]),
        cross(rows[1], rows[2]),
    ];
    let (best, best_norm) = candidates
        .iter()
        .map(|&c| (c, norm3(c)))
        .max_by(|x, y| x.1.total_cmp(&y.1))
        .unwrap();
    // the trigonometric lambda_max loses half its digits near a degenerate
    // top pair, which smears the shifted rows by ~sqrt(eps); anything below
    // this floor is treated as rank-deficient and the final eigenvalue is
    // recovered from the Rayleigh quotient of the selected vector
    let rank_tol = 1e-6 * scale * scale;
    if best_norm > rank_tol {
        let v = fix_sign([best[0] / best_norm, best[1] / best_norm, best[2] / best_norm]);
        return Ok((rayleigh(w, v), v));
    }

    // top eigenvalue at least doubly degenerate: the shifted matrix has
    // rank <= 1, the eigenspace is the plane orthogonal to its largest row
    let (row, row_norm) = rows
        .iter()
        .map(|&r| (r, norm3(r)))
        .max_by(|x, y| x.1.total_cmp(&y.1))
        .unwrap();
    if row_norm <= 1e-7 * scale {
        return Ok((lambda_max, [1.0, 0.0, 0.0]));
    }
    let unit = [row[0] / row_norm, row[1] / row_norm, row[2] / row_norm];
    let mut pick: Option<([f64; 3], usize)> = None;
    for axis in 0..3 {
        let mut e = [0.0; 3];
        e[axis] = 1.0;
        let dot = e[0] * unit[0] + e[1] * unit[1] + e[2] * unit[2];
        let proj = [e[0] - dot * unit[0], e[1] - dot * unit[1], e[2] - dot * unit[2]];
        let n = norm3(proj);
        if n < 0.1 {
            continue;
        }
        let v = [proj[0] / n, proj[1] / n, proj[2] / n];
        let idx = dominant_index(v);
        if pick.map_or(true, |(_, best_idx)| idx < best_idx) {
            pick = Some((v, idx));
        }
    }
    let (v, _) = pick.expect("a projected axis always survives");
    let v = fix_sign(v);
    Ok((rayleigh(w, v), v))
}

/// A single-qubit observable n . sigma for a unit Bloch vector n;
/// traceless, Hermitian, squares to the identity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalObservable {
    n: [f64; 3],
}

impl LocalObservable {
    pub fn new(direction: [f64; 3]) -> Result<Self> {
        let norm = norm3(direction);
        if !(norm > 1e-12) || !norm.is_finite() {
            return Err(Error::InvalidParameter {
                name: "direction",
                reason: "Bloch vector must be nonzero and finite".into(),
            });
        }
        Ok(Self {
            n: [direction[0] / norm, direction[1] / norm, direction[2] / norm],
        })
    }

    pub fn x() -> Self {
        Self { n: [1.0, 0.0, 0.0] }
    }

    pub fn y() -> Self {
        Self { n: [0.0, 1.0, 0.0] }
    }

    pub fn z() -> Self {
        Self { n: [0.0, 0.0, 1.0] }
    }

    pub fn from_polar(theta: f64, phi: f64) -> Self {
        Self {
            n: [
                theta.sin() * phi.cos(),
                theta.sin() * phi.sin(),
                theta.cos(),
            ],
        }
    }

    pub fn direction(&self) -> [f64; 3] {
        self.n
    }

    /// The 2x2 matrix n . sigma.
    pub fn matrix(&self) -> HermitianMatrix {
        let [nx, ny, nz] = self.n;
        let mut m = CMatrix::zeros(2);
        m.set(0, 0, C64::new(nz, 0.0));
        m.set(0, 1, C64::new(nx, -ny));
        m.set(1, 0, C64::new(nx, ny));
        m.set(1, 1, C64::new(-nz, 0.0));
        HermitianMatrix::new(m).unwrap()
    }

    /// (n . sigma) acting on the first spin of a pair: K tensor I.
    pub fn acting_on_first(&self) -> HermitianMatrix {
        let k = self.matrix();
        HermitianMatrix::new(k.matrix().kron(&CMatrix::identity(2))).unwrap()
    }
}
