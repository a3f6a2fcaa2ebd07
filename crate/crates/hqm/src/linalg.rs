//! Dense complex linear algebra and superoperator machinery.
//!
//! Every Hilbert space in this crate is small (≤ 36 dimensions, so
//! Liouvillians are at most 1296×1296), which makes dense row-major
//! storage the right tool: no sparsity bookkeeping, predictable memory,
//! and exact reproducibility.
//!
//! # Conventions
//!
//! * **Tensor factor order.** A composite space `[d₀, d₁, …]` is laid out
//!   so that factor 0 is the most significant index:
//!   `|i₀ i₁ …⟩ ↦ i₀·(d₁·d₂·…) + i₁·(d₂·…) + …`, matching
//!   `kron(A₀, kron(A₁, …))`.
//! * **Vectorization.** Superoperators use *column stacking*:
//!   `vec(X)[c·d + r] = X[r,c]`, under which `vec(A·X·B) = (Bᵀ ⊗ A)·vec(X)`.
//!   All superoperator code in the crate must use this convention.
//! * **Dissipator form.** `liouvillian` builds the generator of
//!
//!   dρ/dt = −i[H, ρ] + Σₖ rₖ (2 Oₖ ρ Oₖ† − ρ Oₖ†Oₖ − Oₖ†Oₖ ρ),
//!
//!   i.e. each channel is passed as `(Oₖ, rₖ)` with the factor-2 form
//!   above; rate prefactors like γ/2 belong to the caller.

use num_complex::Complex64;

use crate::error::{HqmError, Result};

/// Complex double-precision zero.
pub const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
/// Complex double-precision one.
pub const C_ONE: Complex64 = Complex64::new(1.0, 0.0);
/// The imaginary unit i.
pub const C_I: Complex64 = Complex64::new(0.0, 1.0);

/// Dense complex matrix, row-major storage.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Zero matrix of the given shape.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            entries: vec![C_ZERO; rows * cols],
        }
    }

    /// Identity matrix of dimension `n`.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, C_ONE);
        }
        m
    }

    /// Build from nested rows; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows in from_rows");
            entries.extend_from_slice(row);
        }
        ComplexMatrix {
            rows: r,
            cols: c,
            entries,
        }
    }

    /// Build a square diagonal matrix from complex diagonal entries.
    pub fn from_diag(diag: &[Complex64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, d);
        }
        m
    }

    /// Number of rows.
    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of columns.
    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// True when the matrix is square.
    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Entry accessor.
    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.entries[r * self.cols + c]
    }

    /// Entry mutator.
    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.entries[r * self.cols + c] = v;
    }

    /// Add `v` to the entry at `(r, c)`.
    #[inline]
    pub fn add_to(&mut self, r: usize, c: usize, v: Complex64) {
        self.entries[r * self.cols + c] += v;
    }

    /// Raw entries in row-major order.
    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Conjugate transpose A†.
    pub fn dagger(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c).conj());
            }
        }
        out
    }

    /// Transpose Aᵀ (no conjugation).
    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c));
            }
        }
        out
    }

    /// Entry-wise complex conjugate.
    pub fn conj(&self) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|z| z.conj()).collect(),
        }
    }

    /// Matrix trace (square matrices only).
    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square(), "trace of non-square matrix");
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    /// Scalar multiple s·A.
    pub fn scale(&self, s: Complex64) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|z| z * s).collect(),
        }
    }

    /// Matrix product A·B.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "matmul dimension mismatch: {}x{} · {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == C_ZERO {
                    continue;
                }
                for c in 0..other.cols {
                    out.entries[r * other.cols + c] += a * other.get(k, c);
                }
            }
        }
        out
    }

    /// Matrix-vector product A·v.
    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len(), "matvec dimension mismatch");
        let mut out = vec![C_ZERO; self.rows];
        for r in 0..self.rows {
            let mut acc = C_ZERO;
            let row = &self.entries[r * self.cols..(r + 1) * self.cols];
            for (a, x) in row.iter().zip(v.iter()) {
                acc += a * x;
            }
            out[r] = acc;
        }
        out
    }

    /// In-place `self += s·other`.
    pub fn add_scaled(&mut self, other: &Self, s: Complex64) {
        assert_eq!(self.rows, other.rows);
        assert_eq!(self.cols, other.cols);
        for (a, b) in self.entries.iter_mut().zip(other.entries.iter()) {
            *a += s * b;
        }
    }

    /// Frobenius norm ‖A‖_F = √Σ|aᵢⱼ|².
    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Induced 1-norm: maximum absolute column sum.
    pub fn one_norm(&self) -> f64 {
        let mut best = 0.0f64;
        for c in 0..self.cols {
            let mut s = 0.0;
            for r in 0..self.rows {
                s += self.get(r, c).norm();
            }
            best = best.max(s);
        }
        best
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Hermiticity check: ‖A − A†‖_max ≤ tol. Square matrices only.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        assert!(
            self.is_square(),
            "is_hermitian is only defined for square matrices"
        );
        for r in 0..self.rows {
            for c in r..self.cols {
                let d = self.get(r, c) - self.get(c, r).conj();
                if d.norm() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// Column `c` as a vector.
    pub fn column(&self, c: usize) -> Vec<Complex64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }
}

impl std::ops::Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.rows, rhs.rows);
        assert_eq!(self.cols, rhs.cols);
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(rhs.entries.iter())
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl std::ops::Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.rows, rhs.rows);
        assert_eq!(self.cols, rhs.cols);
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(rhs.entries.iter())
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl std::ops::Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

/// Composite Hilbert space described by its ordered subsystem dimensions.
///
/// The ordering is part of the space's identity: basis index
/// `i₀·(d₁·d₂·…) + i₁·(d₂·…) + …` corresponds to `|i₀ i₁ …⟩`, so factor 0
/// is the leftmost Kronecker factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HilbertSpace {
    dims: Vec<usize>,
}

impl HilbertSpace {
    /// Build from subsystem dimensions; every dimension must be ≥ 1.
    pub fn new(dims: &[usize]) -> Self {
        assert!(
            dims.iter().all(|&d| d >= 1),
            "subsystem dimensions must be positive"
        );
        HilbertSpace {
            dims: dims.to_vec(),
        }
    }

    /// Ordered subsystem dimensions.
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Number of tensor factors.
    pub fn n_subsystems(&self) -> usize {
        self.dims.len()
    }

    /// Total dimension = product of subsystem dimensions.
    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }
}

/// Kronecker product A ⊗ B.
///
/// `(A ⊗ B)[i·rB + j, k·cB + l] = A[i,k]·B[j,l]`, so the left factor is the
/// most significant index, consistent with [`HilbertSpace`] ordering.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(a.rows() * b.rows(), a.cols() * b.cols());
    for i in 0..a.rows() {
        for k in 0..a.cols() {
            let av = a.get(i, k);
            if av == C_ZERO {
                continue;
            }
            for j in 0..b.rows() {
                for l in 0..b.cols() {
                    out.set(i * b.rows() + j, k * b.cols() + l, av * b.get(j, l));
                }
            }
        }
    }
    out
}

/// Embed a single-subsystem operator into the full space:
/// identity on all other factors, `op` on factor `index`.
pub fn embed(op: &ComplexMatrix, space: &HilbertSpace, index: usize) -> Result<ComplexMatrix> {
    if index >= space.n_subsystems() {
        return Err(HqmError::DimensionMismatch(format!(
            "embed: subsystem index {} out of range for {} factors",
            index,
            space.n_subsystems()
        )));
    }
    if !op.is_square() || op.rows() != space.dims()[index] {
        return Err(HqmError::DimensionMismatch(format!(
            "embed: operator is {}x{} but subsystem {} has dimension {}",
            op.rows(),
            op.cols(),
            index,
            space.dims()[index]
        )));
    }
    let mut out = ComplexMatrix::identity(1);
    for (k, &d) in space.dims().iter().enumerate() {
        if k == index {
            out = kron(&out, op);
        } else {
            out = kron(&out, &ComplexMatrix::identity(d));
        }
    }
    Ok(out)
}

/// Matrix exponential exp(M) by scaling and squaring with a Taylor kernel.
///
/// The argument is scaled by 2⁻ˢ until its 1-norm is ≤ 0.5, the Taylor
/// series is summed to the requested tolerance, and the result is squared
/// `s` times. For the matrices in scope (Hamiltonians ≤ 36×36, Liouvillians
/// ≤ 1296×1296) this meets a relative accuracy near `tol`; the crate-wide
/// default target is 1e−12.
pub fn matrix_exponential(m: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(HqmError::DimensionMismatch(format!(
            "matrix_exponential: non-square input {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    let norm = m.one_norm();
    if norm == 0.0 {
        return Ok(ComplexMatrix::identity(n));
    }
    // Scale down to norm ≤ 0.5 so the Taylor series converges fast and
    // without catastrophic cancellation.
    let s = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = m.scale(Complex64::new(1.0 / 2f64.powi(s as i32), 0.0));

    let kernel_tol = (tol * 1e-3).max(1e-18);
    let mut acc = ComplexMatrix::identity(n);
    let mut term = ComplexMatrix::identity(n);
    for k in 1..=64u32 {
        term = term.matmul(&scaled).scale(Complex64::new(1.0 / k as f64, 0.0));
        acc.add_scaled(&term, C_ONE);
        if term.frobenius_norm() <= kernel_tol {
            break;
        }
    }
    let mut out = acc;
    for _ in 0..s {
        out = out.matmul(&out);
    }
    Ok(out)
}

/// Partial trace keeping the subsystems listed in `keep` (in their original
/// order) and tracing out all others. The trace is preserved.
pub fn partial_trace(
    rho: &ComplexMatrix,
    space: &HilbertSpace,
    keep: &[usize],
) -> Result<ComplexMatrix> {
    let total = space.total_dim();
    if !rho.is_square() || rho.rows() != total {
        return Err(HqmError::DimensionMismatch(format!(
            "partial_trace: matrix is {}x{} but space has total dimension {}",
            rho.rows(),
            rho.cols(),
            total
        )));
    }
    let nsub = space.n_subsystems();
    let mut keep_sorted = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();
    if keep_sorted.len() != keep.len() || keep_sorted.iter().any(|&k| k >= nsub) {
        return Err(HqmError::DimensionMismatch(
            "partial_trace: keep set must be distinct valid subsystem indices".into(),
        ));
    }
    let traced: Vec<usize> = (0..nsub).filter(|k| !keep_sorted.contains(k)).collect();

    // Strides of each factor in the full big-endian index.
    let mut strides = vec![1usize; nsub];
    for k in (0..nsub.saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * space.dims()[k + 1];
    }

    let keep_dims: Vec<usize> = keep_sorted.iter().map(|&k| space.dims()[k]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&k| space.dims()[k]).collect();
    let d_keep: usize = keep_dims.iter().product();
    let d_traced: usize = traced_dims.iter().product();

    // Decompose a compound index over `dims` into per-factor digits
    // (big-endian), then rebuild the contribution to the full index.
    let offset = |compound: usize, dims: &[usize], subs: &[usize]| -> usize {
        let mut rem = compound;
        let mut off = 0usize;
        for i in (0..dims.len()).rev() {
            let digit = rem % dims[i];
            rem /= dims[i];
            off += digit * strides[subs[i]];
        }
        off
    };

    let mut out = ComplexMatrix::zeros(d_keep, d_keep);
    for kr in 0..d_keep {
        let base_r = offset(kr, &keep_dims, &keep_sorted);
        for kc in 0..d_keep {
            let base_c = offset(kc, &keep_dims, &keep_sorted);
            let mut acc = C_ZERO;
            for t in 0..d_traced {
                let toff = offset(t, &traced_dims, &traced);
                acc += rho.get(base_r + toff, base_c + toff);
            }
            out.set(kr, kc, acc);
        }
    }
    Ok(out)
}

/// Column-stacking vectorization: `vec(X)[c·d + r] = X[r,c]`.
pub fn vec_col(m: &ComplexMatrix) -> Vec<Complex64> {
    let mut v = Vec::with_capacity(m.rows() * m.cols());
    for c in 0..m.cols() {
        for r in 0..m.rows() {
            v.push(m.get(r, c));
        }
    }
    v
}

/// Inverse of [`vec_col`]: rebuild the d×d matrix from its column stack.
pub fn unvec_col(v: &[Complex64], d: usize) -> ComplexMatrix {
    assert_eq!(v.len(), d * d, "unvec_col: length must be d²");
    let mut m = ComplexMatrix::zeros(d, d);
    for c in 0..d {
        for r in 0..d {
            m.set(r, c, v[c * d + r]);
        }
    }
    m
}

/// Superoperator for left multiplication: vec(A·X) = (I ⊗ A)·vec(X).
pub fn spre(a: &ComplexMatrix) -> ComplexMatrix {
    kron(&ComplexMatrix::identity(a.rows()), a)
}

/// Superoperator for right multiplication: vec(X·B) = (Bᵀ ⊗ I)·vec(X).
pub fn spost(b: &ComplexMatrix) -> ComplexMatrix {
    kron(&b.transpose(), &ComplexMatrix::identity(b.rows()))
}

/// Commutator superoperator −i(I⊗H − Hᵀ⊗I), the generator of vec(−i[H, ρ]).
pub fn commutator_superop(h: &ComplexMatrix) -> ComplexMatrix {
    let mut l = spre(h);
    l.add_scaled(&spost(h), -C_ONE);
    l.scale(-C_I)
}

/// Build the Lindblad generator in column-stacked form.
///
/// Returns the d²×d² matrix L with `vec(dρ/dt) = L·vec(ρ)` for
///
/// dρ/dt = −i[H, ρ] + Σₖ rₖ (2 Oₖ ρ Oₖ† − ρ Oₖ†Oₖ − Oₖ†Oₖ ρ).
///
/// Each dissipator is `(Oₖ, rₖ)` with rₖ ≥ 0; the conventional γ/2-style
/// prefactors are the caller's responsibility (see `dynamics`).
pub fn liouvillian(
    h: &ComplexMatrix,
    dissipators: &[(ComplexMatrix, f64)],
) -> Result<ComplexMatrix> {
    if !h.is_square() {
        return Err(HqmError::DimensionMismatch(
            "liouvillian: Hamiltonian must be square".into(),
        ));
    }
    let d = h.rows();
    let mut l = commutator_superop(h);
    for (op, rate) in dissipators {
        if *rate < 0.0 {
            return Err(HqmError::InvalidParameter(format!(
                "liouvillian: negative dissipator rate {rate}"
            )));
        }
        if !op.is_square() || op.rows() != d {
            return Err(HqmError::DimensionMismatch(format!(
                "liouvillian: dissipator is {}x{} but Hamiltonian dimension is {}",
                op.rows(),
                op.cols(),
                d
            )));
        }
        if *rate == 0.0 {
            continue;
        }
        let od = op.dagger();
        let odo = od.matmul(op);
        let r = Complex64::new(*rate, 0.0);
        // 2 O ρ O†  →  2 (conj O ⊗ O)
        l.add_scaled(&kron(&op.conj(), op), 2.0 * r);
        // −O†O ρ  →  −(I ⊗ O†O)
        l.add_scaled(&spre(&odo), -r);
        // −ρ O†O  →  −((O†O)ᵀ ⊗ I)
        l.add_scaled(&spost(&odo), -r);
    }
    Ok(l)
}

/// Eigendecomposition of a Hermitian matrix by the cyclic complex Jacobi
/// method. Returns eigenvalues in ascending order and the unitary matrix
/// whose columns are the matching eigenvectors (A = V·diag(λ)·V†).
///
/// Quadratically convergent and unconditionally stable for the small
/// matrices in scope (≤ 36×36 here).
pub fn hermitian_eigen(a: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    if !a.is_square() {
        return Err(HqmError::DimensionMismatch(
            "hermitian_eigen: non-square input".into(),
        ));
    }
    let n = a.rows();
    if n == 0 {
        return Ok((vec![], ComplexMatrix::zeros(0, 0)));
    }
    let mut m = a.clone();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);
    let tol = 1e-14 * scale;

    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m.get(p, q).norm_sqr();
            }
        }
        if off.sqrt() <= tol {
            // Converged: diagonal holds the eigenvalues.
            let mut idx: Vec<usize> = (0..n).collect();
            let evals: Vec<f64> = (0..n).map(|i| m.get(i, i).re).collect();
            idx.sort_by(|&i, &j| evals[i].partial_cmp(&evals[j]).unwrap());
            let sorted: Vec<f64> = idx.iter().map(|&i| evals[i]).collect();
            let mut vs = ComplexMatrix::zeros(n, n);
            for (new_c, &old_c) in idx.iter().enumerate() {
                for r in 0..n {
                    vs.set(r, new_c, v.get(r, old_c));
                }
            }
            return Ok((sorted, vs));
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.get(p, q);
                if apq.norm() <= tol / (n as f64) {
                    continue;
                }
                let app = m.get(p, p).re;
                let aqq = m.get(q, q).re;
                let abs_apq = apq.norm();
                let phase = apq / Complex64::new(abs_apq, 0.0); // e^{iφ}
                let tau = (aqq - app) / (2.0 * abs_apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // J: identity except J[p,p]=c, J[p,q]=s·e^{iφ},
                // J[q,p]=−s·e^{−iφ}, J[q,q]=c. Apply M ← J†·M·J, V ← V·J.
                let jp = Complex64::new(c, 0.0);
                let jpq = phase * s;
                let jqp = -phase.conj() * s;

                // Column update (M·J and V·J).
                for r in 0..n {
                    let mp = m.get(r, p);
                    let mq = m.get(r, q);
                    m.set(r, p, mp * jp + mq * jqp);
                    m.set(r, q, mp * jpq + mq * jp);
                    let vp = v.get(r, p);
                    let vq = v.get(r, q);
                    v.set(r, p, vp * jp + vq * jqp);
                    v.set(r, q, vp * jpq + vq * jp);
                }
                // Row update (J†·M).
                for cidx in 0..n {
                    let mp = m.get(p, cidx);
                    let mq = m.get(q, cidx);
                    m.set(p, cidx, mp * jp.conj() + mq * jqp.conj());
                    m.set(q, cidx, mp * jpq.conj() + mq * jp.conj());
                }
            }
        }
    }
    Err(HqmError::Convergence(
        "hermitian_eigen: Jacobi sweeps did not converge".into(),
    ))
}

/// Trace distance ½‖A − B‖₁ = ½ Σ|λᵢ(A−B)| for Hermitian A, B.
pub fn trace_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    let diff = a - b;
    let (evals, _) = hermitian_eigen(&diff)?;
    Ok(0.5 * evals.iter().map(|l| l.abs()).sum::<f64>())
}

/// Pauli σ_x.
pub fn sigma_x() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[vec![C_ZERO, C_ONE], vec![C_ONE, C_ZERO]])
}

/// Pauli σ_y.
pub fn sigma_y() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[vec![C_ZERO, -C_I], vec![C_I, C_ZERO]])
}

/// Pauli σ_z in the ordering |0⟩ = ground, |1⟩ = excited: diag(−1, +1).
pub fn sigma_z() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[vec![-C_ONE, C_ZERO], vec![C_ZERO, C_ONE]])
}

/// Qubit lowering operator σ⁻ = |0⟩⟨1|.
pub fn sigma_minus() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[vec![C_ZERO, C_ONE], vec![C_ZERO, C_ZERO]])
}

/// Qubit raising operator σ⁺ = |1⟩⟨0|.
pub fn sigma_plus() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[vec![C_ZERO, C_ZERO], vec![C_ONE, C_ZERO]])
}

/// Projector |1⟩⟨1| onto the qubit excited state.
pub fn projector_excited() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[vec![C_ZERO, C_ZERO], vec![C_ZERO, C_ONE]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                m.set(
                    r,
                    c,
                    Complex64::new(
                        rng.gen_range(-1.0..1.0) * scale,
                        rng.gen_range(-1.0..1.0) * scale,
                    ),
                );
            }
        }
        m
    }

    fn random_hermitian(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> ComplexMatrix {
        let m = random_matrix(rng, n, scale);
        let mut h = &m + &m.dagger();
        h = h.scale(Complex64::new(0.5, 0.0));
        h
    }

    fn assert_close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64, what: &str) {
        let d = (a - b).max_abs();
        assert!(d <= tol, "{what}: max deviation {d:.3e} > tol {tol:.1e}");
    }

    #[test]
    fn kron_of_identities_is_identity() {
        let i2 = ComplexMatrix::identity(2);
        let i3 = ComplexMatrix::identity(3);
        assert_close(&kron(&i2, &i3), &ComplexMatrix::identity(6), 0.0, "I2⊗I3");
    }

    #[test]
    fn kron_sigma_z_with_identity_diagonal() {
        let m = kron(&sigma_z(), &ComplexMatrix::identity(2));
        // σ_z = diag(−1,+1), so σ_z ⊗ I₂ = diag(−1,−1,+1,+1).
        let want = [-1.0, -1.0, 1.0, 1.0];
        for (i, w) in want.iter().enumerate() {
            assert!((m.get(i, i).re - w).abs() < 1e-15);
            assert!(m.get(i, i).im.abs() < 1e-15);
        }
    }

    #[test]
    fn kron_sigma_x_sigma_x_permutes_basis() {
        let m = kron(&sigma_x(), &sigma_x());
        let e0 = [C_ONE, C_ZERO, C_ZERO, C_ZERO];
        let out = m.matvec(&e0);
        // (σ_x⊗σ_x)|00⟩ = |11⟩ = e₃.
        assert!((out[3] - C_ONE).norm() < 1e-15);
        assert!(out[0].norm() + out[1].norm() + out[2].norm() < 1e-15);
    }

    #[test]
    fn kron_is_associative_and_bilinear() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = random_matrix(&mut rng, 2, 1.0);
        let b = random_matrix(&mut rng, 3, 1.0);
        let c = random_matrix(&mut rng, 2, 1.0);
        assert_close(
            &kron(&kron(&a, &b), &c),
            &kron(&a, &kron(&b, &c)),
            1e-12,
            "kron associativity",
        );
        let b2 = random_matrix(&mut rng, 3, 1.0);
        let lhs = kron(&a, &(&b + &b2));
        let rhs = &kron(&a, &b) + &kron(&a, &b2);
        assert_close(&lhs, &rhs, 1e-12, "kron bilinearity");
    }

    #[test]
    fn embed_matches_explicit_kron() {
        let space = HilbertSpace::new(&[2, 3]);
        let e = embed(&sigma_z(), &space, 0).unwrap();
        let want = kron(&sigma_z(), &ComplexMatrix::identity(3));
        assert_close(&e, &want, 0.0, "embed(σ_z, [2,3], 0)");
    }

    #[test]
    fn embed_identity_gives_total_identity() {
        let space = HilbertSpace::new(&[2, 4, 3]);
        let e = embed(&ComplexMatrix::identity(4), &space, 1).unwrap();
        assert_close(&e, &ComplexMatrix::identity(24), 0.0, "embed identity");
    }

    #[test]
    fn embeds_on_disjoint_factors_commute() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let space = HilbertSpace::new(&[2, 4, 3]);
        let a = embed(&random_matrix(&mut rng, 4, 1.0), &space, 1).unwrap();
        let b = embed(&random_matrix(&mut rng, 3, 1.0), &space, 2).unwrap();
        assert_close(&a.matmul(&b), &b.matmul(&a), 1e-12, "disjoint embeds commute");
    }

    #[test]
    fn embed_rejects_wrong_dimension() {
        let space = HilbertSpace::new(&[2, 3]);
        assert!(embed(&sigma_z(), &space, 1).is_err());
        assert!(embed(&sigma_z(), &space, 5).is_err());
    }

    #[test]
    fn expm_of_zero_is_identity() {
        let z = ComplexMatrix::zeros(4, 4);
        let e = matrix_exponential(&z, 1e-12).unwrap();
        assert_close(&e, &ComplexMatrix::identity(4), 1e-15, "exp(0)");
    }

    #[test]
    fn expm_of_diagonal_exponentiates_entries() {
        let d = ComplexMatrix::from_diag(&[
            Complex64::new(0.3, -1.2),
            Complex64::new(-2.0, 0.5),
            Complex64::new(1.0, 3.0),
        ]);
        let e = matrix_exponential(&d, 1e-12).unwrap();
        for i in 0..3 {
            let want = d.get(i, i).exp();
            assert!((e.get(i, i) - want).norm() < 1e-12 * want.norm().max(1.0));
        }
    }

    #[test]
    fn expm_rotation_identity() {
        // exp(i(π/2)σ_x) = i·σ_x.
        let m = sigma_x().scale(C_I * Complex64::new(std::f64::consts::FRAC_PI_2, 0.0));
        let e = matrix_exponential(&m, 1e-12).unwrap();
        let want = sigma_x().scale(C_I);
        assert_close(&e, &want, 1e-13, "exp(iπσ_x/2)");
    }

    #[test]
    fn expm_inverse_property_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..4 {
            let mut a = random_matrix(&mut rng, 6, 1.0);
            // Scale to norm ≤ 10 — the documented accuracy envelope.
            let target: f64 = rng.gen_range(0.5..10.0);
            let norm = a.one_norm();
            a = a.scale(Complex64::new(target / norm, 0.0));
            let e = matrix_exponential(&a, 1e-12).unwrap();
            let em = matrix_exponential(&a.scale(-C_ONE), 1e-12).unwrap();
            let prod = e.matmul(&em);
            let dev = (&prod - &ComplexMatrix::identity(6)).max_abs();
            assert!(dev < 1e-9, "exp(A)exp(−A)=I deviation {dev:.3e}");
        }
    }

    #[test]
    fn expm_rejects_non_square() {
        let m = ComplexMatrix::zeros(2, 3);
        assert!(matrix_exponential(&m, 1e-12).is_err());
    }

    #[test]
    fn partial_trace_of_product_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        // ρ_A ⊗ ρ_B with tr ρ_B = 1: reduction onto A returns ρ_A.
        let a = {
            let h = random_hermitian(&mut rng, 2, 1.0);
            let t = h.trace();
            h.scale(C_ONE / t)
        };
        let b = {
            let h = random_hermitian(&mut rng, 3, 1.0);
            let t = h.trace();
            h.scale(C_ONE / t)
        };
        let rho = kron(&a, &b);
        let space = HilbertSpace::new(&[2, 3]);
        let red = partial_trace(&rho, &space, &[0]).unwrap();
        assert_close(&red, &a, 1e-12, "partial trace of product state");
    }

    #[test]
    fn partial_trace_preserves_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let space = HilbertSpace::new(&[2, 4, 3]);
        let rho = random_hermitian(&mut rng, 24, 1.0);
        let red = partial_trace(&rho, &space, &[0, 2]).unwrap();
        assert_eq!(red.rows(), 6);
        assert!((red.trace() - rho.trace()).norm() < 1e-12);
    }

    #[test]
    fn bell_state_reduces_to_maximally_mixed() {
        // |Φ⁺⟩ = (|00⟩ + |11⟩)/√2 → tracing either qubit leaves I/2.
        let s = 1.0 / 2f64.sqrt();
        let mut rho = ComplexMatrix::zeros(4, 4);
        for &r in &[0usize, 3] {
            for &c in &[0usize, 3] {
                rho.set(r, c, Complex64::new(s * s, 0.0));
            }
        }
        let space = HilbertSpace::new(&[2, 2]);
        let red = partial_trace(&rho, &space, &[1]).unwrap();
        let want = ComplexMatrix::identity(2).scale(Complex64::new(0.5, 0.0));
        assert_close(&red, &want, 1e-15, "Bell state reduction");
    }

    #[test]
    fn vectorization_round_trip_and_product_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let x = random_matrix(&mut rng, 3, 1.0);
        let a = random_matrix(&mut rng, 3, 1.0);
        let b = random_matrix(&mut rng, 3, 1.0);
        // Round trip.
        assert_close(&unvec_col(&vec_col(&x), 3), &x, 0.0, "vec/unvec round trip");
        // vec(A X B) = (Bᵀ ⊗ A) vec(X) — the column-stacking identity.
        let lhs = vec_col(&a.matmul(&x).matmul(&b));
        let rhs = kron(&b.transpose(), &a).matvec(&vec_col(&x));
        for (l, r) in lhs.iter().zip(rhs.iter()) {
            assert!((l - r).norm() < 1e-12);
        }
    }

    #[test]
    fn liouvillian_with_nothing_is_zero() {
        let h = ComplexMatrix::zeros(3, 3);
        let l = liouvillian(&h, &[]).unwrap();
        assert!(l.max_abs() == 0.0);
    }

    #[test]
    fn liouvillian_hamiltonian_part_matches_commutator() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let h = random_hermitian(&mut rng, 4, 1.0);
        let rho = random_hermitian(&mut rng, 4, 1.0);
        let l = liouvillian(&h, &[]).unwrap();
        let lhs = unvec_col(&l.matvec(&vec_col(&rho)), 4);
        let rhs = (&h.matmul(&rho) - &rho.matmul(&h)).scale(-C_I);
        assert_close(&lhs, &rhs, 1e-12, "L·vec(ρ) vs −i[H,ρ]");
    }

    #[test]
    fn liouvillian_full_action_matches_direct_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let h = random_hermitian(&mut rng, 3, 1.0);
        let o1 = random_matrix(&mut rng, 3, 1.0);
        let o2 = random_matrix(&mut rng, 3, 1.0);
        let rho = random_hermitian(&mut rng, 3, 1.0);
        let rates = [0.37, 1.21];
        let l = liouvillian(&h, &[(o1.clone(), rates[0]), (o2.clone(), rates[1])]).unwrap();
        let lhs = unvec_col(&l.matvec(&vec_col(&rho)), 3);

        let mut rhs = (&h.matmul(&rho) - &rho.matmul(&h)).scale(-C_I);
        for (op, rate) in [(&o1, rates[0]), (&o2, rates[1])] {
            let od = op.dagger();
            let odo = od.matmul(op);
            let r = Complex64::new(rate, 0.0);
            rhs.add_scaled(&op.matmul(&rho).matmul(&od), 2.0 * r);
            rhs.add_scaled(&rho.matmul(&odo), -r);
            rhs.add_scaled(&odo.matmul(&rho), -r);
        }
        assert_close(&lhs, &rhs, 1e-12, "full Lindblad action");
    }

    #[test]
    fn liouvillian_rejects_negative_rate() {
        let h = ComplexMatrix::zeros(2, 2);
        assert!(liouvillian(&h, &[(sigma_minus(), -0.1)]).is_err());
    }

    #[test]
    fn liouvillian_rejects_dimension_mismatch() {
        let h = ComplexMatrix::zeros(3, 3);
        assert!(liouvillian(&h, &[(sigma_minus(), 0.1)]).is_err());
    }

    #[test]
    fn hermitian_eigen_known_two_by_two() {
        // [[1, i], [−i, 1]] has eigenvalues 0 and 2.
        let m = ComplexMatrix::from_rows(&[vec![C_ONE, C_I], vec![-C_I, C_ONE]]);
        let (evals, v) = hermitian_eigen(&m).unwrap();
        assert!((evals[0] - 0.0).abs() < 1e-12);
        assert!((evals[1] - 2.0).abs() < 1e-12);
        // Reconstruct.
        let lam = ComplexMatrix::from_diag(&[
            Complex64::new(evals[0], 0.0),
            Complex64::new(evals[1], 0.0),
        ]);
        let rec = v.matmul(&lam).matmul(&v.dagger());
        assert_close(&rec, &m, 1e-12, "eigen reconstruction 2x2");
    }

    #[test]
    fn hermitian_eigen_random_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let a = random_hermitian(&mut rng, 8, 2.0);
        let (evals, v) = hermitian_eigen(&a).unwrap();
        // Ascending order.
        for w in evals.windows(2) {
            assert!(w[0] <= w[1] + 1e-14);
        }
        // Unitarity of V.
        let vv = v.dagger().matmul(&v);
        assert_close(&vv, &ComplexMatrix::identity(8), 1e-10, "V†V = I");
        // A = V Λ V†.
        let lam = ComplexMatrix::from_diag(
            &evals.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>(),
        );
        let rec = v.matmul(&lam).matmul(&v.dagger());
        assert_close(&rec, &a, 1e-10, "eigen reconstruction 8x8");
    }

    #[test]
    fn trace_distance_basics() {
        let p0 = ComplexMatrix::from_diag(&[C_ONE, C_ZERO]);
        let p1 = ComplexMatrix::from_diag(&[C_ZERO, C_ONE]);
        // Orthogonal pure states: distance 1; identical states: 0.
        assert!((trace_distance(&p0, &p1).unwrap() - 1.0).abs() < 1e-12);
        assert!(trace_distance(&p0, &p0).unwrap() < 1e-14);
        let mixed = ComplexMatrix::identity(2).scale(Complex64::new(0.5, 0.0));
        assert!((trace_distance(&p0, &mixed).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn hilbert_space_total_dim() {
        let s = HilbertSpace::new(&[2, 4, 3]);
        assert_eq!(s.total_dim(), 24);
        assert_eq!(s.n_subsystems(), 3);
    }
}
