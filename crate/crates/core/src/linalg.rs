//! Exact small-dimension complex linear algebra.
//!
//! Everything here works on dense matrices of dimension at most [`MAX_DIM`].
//! Hermitian spectra are computed with cyclic Jacobi rotations on the real
//! symmetric embedding `[[A, -B], [B, A]]` of `A + iB`; every eigenvalue of the
//! embedding appears twice, so the complex spectrum is read off every other entry.

use std::fmt;

use num_complex::Complex64;

use crate::error::{invalid, Result};

/// Largest supported Hilbert-space dimension.
pub const MAX_DIM: usize = 16;

/// Tolerance for constructed objects (norms, traces, Hermiticity).
pub const CONSTRUCTION_TOL: f64 = 1e-12;

/// Tolerance for quantities derived from a spectrum.
pub const SPECTRAL_TOL: f64 = 1e-10;

pub type C64 = Complex64;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = self[(i, j)];
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 || dim > MAX_DIM {
        return invalid(format!("dimension {dim} outside 1..={MAX_DIM}"));
    }
    Ok(())
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            m[(i, i)] = c(1.0, 0.0);
        }
        Ok(m)
    }

    /// Builds a matrix from rows; every row must have the same length as the
    /// number of rows.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let dim = rows.len();
        check_dim(dim)?;
        if rows.iter().any(|r| r.len() != dim) {
            return invalid("matrix rows must form a square array");
        }
        Ok(Self {
            dim,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| c(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn diag(values: &[f64]) -> Result<Self> {
        let mut m = Self::zeros(values.len())?;
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = c(v, 0.0);
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn adjoint(&self) -> Self {
        let mut out = self.clone();
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(i, j)] = self[(j, i)].conj();
            }
        }
        out
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol
    }

    pub fn scale(&self, k: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * k).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return invalid("matrix dimension mismatch in add");
        }
        Ok(Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return invalid("matrix dimension mismatch in matmul");
        }
        let n = self.dim;
        let mut out = Self::zeros(n)?;
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Result<Self> {
        let n = self.dim * other.dim;
        let mut out = Self::zeros(n)?;
        for i in 0..self.dim {
            for j in 0..self.dim {
                let a = self[(i, j)];
                for k in 0..other.dim {
                    for l in 0..other.dim {
                        out[(i * other.dim + k, j * other.dim + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        Ok(out)
    }

    /// Checks the density-matrix invariants: Hermitian and unit trace within
    /// [`CONSTRUCTION_TOL`] (scaled by the dimension).
    pub fn validate_density(&self) -> Result<()> {
        let tol = CONSTRUCTION_TOL * self.dim as f64;
        if !self.is_hermitian(tol) {
            return invalid(format!(
                "matrix is not Hermitian (defect {:.3e})",
                self.hermitian_defect()
            ));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > SPECTRAL_TOL || tr.im.abs() > SPECTRAL_TOL {
            return invalid(format!("density matrix trace {tr} differs from 1"));
        }
        Ok(())
    }
}

/// Unit-norm state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<C64>,
}

impl StateVector {
    /// Wraps amplitudes that are already normalized.
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        check_dim(amps.len())?;
        let norm_sq: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq.sqrt() - 1.0).abs() > CONSTRUCTION_TOL {
            return invalid(format!("state norm {} differs from 1", norm_sq.sqrt()));
        }
        Ok(Self { amps })
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn normalized(amps: Vec<C64>) -> Result<Self> {
        check_dim(amps.len())?;
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return invalid("cannot normalize a zero vector");
        }
        Ok(Self {
            amps: amps.into_iter().map(|a| a / norm).collect(),
        })
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::new(amps.iter().map(|&x| c(x, 0.0)).collect())
    }

    /// Computational basis state `|index⟩` (zero-based).
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        check_dim(dim)?;
        if index >= dim {
            return invalid(format!("basis index {index} out of range for dim {dim}"));
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[index] = c(1.0, 0.0);
        Ok(Self { amps })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        if self.dim() != other.dim() {
            return invalid("state dimension mismatch in inner product");
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn kron(&self, other: &Self) -> Result<Self> {
        let n = self.dim() * other.dim();
        check_dim(n)?;
        let mut amps = Vec::with_capacity(n);
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(Self { amps })
    }

    /// Projector `|ψ⟩⟨ψ|`.
    pub fn projector(&self) -> ComplexMatrix {
        let n = self.dim();
        let mut m = ComplexMatrix {
            dim: n,
            data: vec![C64::new(0.0, 0.0); n * n],
        };
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = self.amps[i] * self.amps[j].conj();
            }
        }
        m
    }
}

fn jacobi_symmetric(mut a: Vec<f64>, n: usize) -> Vec<f64> {
    let off = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i * n + j] * a[i * n + j];
                }
            }
        }
        s
    };
    let scale: f64 = a.iter().map(|x| x * x).sum::<f64>().max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        if off(&a) <= 1e-30 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = cs * akp - sn * akq;
                    a[k * n + q] = sn * akp + cs * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = cs * apk - sn * aqk;
                    a[q * n + k] = sn * apk + cs * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i * n + i]).collect()
}

/// All eigenvalues of a Hermitian matrix, sorted in descending order.
pub fn eigvals_hermitian(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let n = m.dim();
    let max_entry = m.data.iter().map(|z| z.norm()).fold(1.0_f64, f64::max);
    if m.hermitian_defect() > CONSTRUCTION_TOL * max_entry {
        return invalid(format!(
            "matrix is not Hermitian (defect {:.3e})",
            m.hermitian_defect()
        ));
    }
    let big = 2 * n;
    let mut emb = vec![0.0; big * big];
    for i in 0..n {
        for j in 0..n {
            // symmetrize away the sub-tolerance defect
            let z = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            emb[i * big + j] = z.re;
            emb[(i + n) * big + (j + n)] = z.re;
            emb[i * big + (j + n)] = -z.im;
            emb[(i + n) * big + j] = z.im;
        }
    }
    let mut vals = jacobi_symmetric(emb, big);
    vals.sort_by(|a, b| b.total_cmp(a));
    Ok(vals.into_iter().step_by(2).collect())
}

/// `-Σ λ log₂ λ` over a probability spectrum, with `0·log₂0 = 0`.
///
/// Eigenvalues in `[-SPECTRAL_TOL, 0)` are clamped to zero; anything more
/// negative is rejected.
pub fn entropy_of_spectrum(spectrum: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &l in spectrum {
        if l < -SPECTRAL_TOL || !l.is_finite() {
            return invalid(format!("negative eigenvalue {l:.3e} in density spectrum"));
        }
        if l > 0.0 {
            s -= l * l.log2();
        }
    }
    Ok(s.max(0.0))
}

/// Von Neumann entropy `S(ρ) = -tr(ρ log₂ ρ)` in bits.
pub fn von_neumann_entropy(rho: &ComplexMatrix) -> Result<f64> {
    rho.validate_density()?;
    entropy_of_spectrum(&eigvals_hermitian(rho)?)
}

/// Binary Shannon entropy `h(q)` in bits.
pub fn binary_entropy(q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&q) {
        return invalid(format!("binary entropy argument {q} outside [0, 1]"));
    }
    Ok(h2(q))
}

/// Unchecked binary entropy for internal callers that already hold a
/// probability.
pub(crate) fn h2(q: f64) -> f64 {
    let term = |p: f64| if p > 0.0 { -p * p.log2() } else { 0.0 };
    term(q) + term(1.0 - q)
}

/// Reduced density matrix of subsystem `keep` of a multipartite operator whose
/// factor dimensions are `dims` (first factor most significant).
pub fn partial_trace(rho: &ComplexMatrix, dims: &[usize], keep: usize) -> Result<ComplexMatrix> {
    let total: usize = dims.iter().product();
    if dims.is_empty() || total != rho.dim() {
        return invalid(format!(
            "factor dimensions {dims:?} do not multiply to {}",
            rho.dim()
        ));
    }
    if keep >= dims.len() {
        return invalid(format!("subsystem index {keep} out of range"));
    }
    let d_keep = dims[keep];
    // stride of the kept factor, and the block structure around it
    let inner: usize = dims[keep + 1..].iter().product();
    let outer: usize = dims[..keep].iter().product();
    let mut out = ComplexMatrix::zeros(d_keep)?;
    for i in 0..d_keep {
        for j in 0..d_keep {
            let mut acc = C64::new(0.0, 0.0);
            for o in 0..outer {
                for r in 0..inner {
                    let row = (o * d_keep + i) * inner + r;
                    let col = (o * d_keep + j) * inner + r;
                    acc += rho[(row, col)];
                }
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}
