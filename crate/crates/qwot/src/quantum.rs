//! States, observable collections, couplings, and quantum channels.
//!
//! A coupling of two states `ρ` and `ω` is a state `Π` on `H ⊗ H*` whose
//! partial trace over the dual factor is `ω` and whose partial trace over the
//! first factor is `ρᵀ`. Couplings correspond one-to-one with channels sending
//! `ρ` to `ω`; both directions of that correspondence are implemented here via
//! the canonical purification `vec(ρ^{1/2})` (row-major vectorization, matching
//! the transpose convention of [`crate::linalg`]).

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{
    apply_scalar_function, default_cluster_tol, eigh, kron, partial_trace, ComplexMatrix,
    EigenDecomposition, HermitianOperator, TraceSide,
};

/// PSD gate for state construction: eigenvalues may dip this far below zero.
pub const STATE_PSD_TOL: f64 = 1e-10;
/// Trace gate for state construction.
pub const STATE_TRACE_TOL: f64 = 1e-10;
/// Marginal residual accepted by [`Coupling::new`].
pub const COUPLING_MARGINAL_TOL: f64 = 1e-8;
/// Trace-preservation gate for [`Channel::new`].
pub const CHANNEL_TP_TOL: f64 = 1e-10;
/// Support cutoff for pseudo-inverses of rank-deficient states.
pub const SUPPORT_CUTOFF: f64 = 1e-10;

/// A density operator: positive semidefinite with unit trace.
///
/// The stored matrix is projected to exact PSD form at construction (negative
/// eigenvalues within tolerance are clipped) and renormalized to trace one.
#[derive(Debug, Clone)]
pub struct State {
    dim: usize,
    rho: HermitianOperator,
}

impl State {
    /// Validates PSD (eigenvalues ≥ −1e−10) and unit trace (±1e−10), then
    /// stores the clipped, renormalized form.
    pub fn new(h: HermitianOperator) -> Result<Self> {
        Self::with_tolerances(h, STATE_PSD_TOL, STATE_TRACE_TOL)
    }

    /// Same projection with caller-chosen gates. Used for inputs rounded to a
    /// few decimals, where the PSD defect can exceed the strict gate.
    pub fn with_tolerances(h: HermitianOperator, psd_tol: f64, trace_tol: f64) -> Result<Self> {
        let dim = h.dim();
        let tr = h.matrix().trace().re;
        if (tr - 1.0).abs() > trace_tol {
            return Err(Error::Domain(format!(
                "state trace is {tr:.12}, expected 1 within {trace_tol:.1e}"
            )));
        }
        let decomp = eigh(&h, default_cluster_tol(&h))?;
        if let Some(&min) = decomp
            .eigenvalues
            .first()
            .filter(|&&l| l < -psd_tol)
        {
            return Err(Error::Domain(format!(
                "state has eigenvalue {min:.3e} below the PSD gate -{psd_tol:.1e}"
            )));
        }
        let clipped: Vec<f64> = decomp.eigenvalues.iter().map(|&l| l.max(0.0)).collect();
        let total: f64 = clipped.iter().sum();
        if total <= 0.0 {
            return Err(Error::Domain("state has no positive spectral weight".into()));
        }
        let normalized: Vec<f64> = clipped.iter().map(|l| l / total).collect();
        let rho = HermitianOperator::new(decomp.assemble(&normalized).hermitian_part())?;
        Ok(Self { dim, rho })
    }

    /// Maximally mixed state `I/d`.
    pub fn maximally_mixed(dim: usize) -> Self {
        let m = ComplexMatrix::identity(dim).scale_re(1.0 / dim as f64);
        Self { dim, rho: HermitianOperator::new(m).unwrap() }
    }

    /// Pure state `|v⟩⟨v|` from a (not necessarily normalized) vector.
    pub fn pure_from_vector(v: &[Complex64]) -> Result<Self> {
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::Domain("zero vector cannot define a pure state".into()));
        }
        let unit: Vec<Complex64> = v.iter().map(|z| z / norm).collect();
        let m = ComplexMatrix::outer(&unit, &unit);
        Ok(Self { dim: v.len(), rho: HermitianOperator::new(m.hermitian_part())? })
    }

    /// Computational basis state `|k⟩⟨k|`.
    pub fn basis_state(dim: usize, k: usize) -> Self {
        let mut v = vec![Complex64::new(0.0, 0.0); dim];
        v[k] = Complex64::new(1.0, 0.0);
        Self::pure_from_vector(&v).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.rho
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.rho.matrix()
    }

    /// PSD square root `ρ^{1/2}`. Eigenvalues at rounding-noise level are
    /// treated as exact zeros so that the root does not amplify them (a
    /// `1e−17` residue would otherwise surface as `3e−9` in the root).
    pub fn sqrt(&self) -> HermitianOperator {
        apply_scalar_function(&self.rho, |x| if x <= 1e-14 { 0.0 } else { x.sqrt() })
            .expect("sqrt is finite on a clipped spectrum")
    }

    /// `tr[ρ²]`.
    pub fn purity(&self) -> f64 {
        self.rho.matrix().matmul(self.rho.matrix()).trace().re
    }

    pub fn eigen(&self) -> EigenDecomposition {
        eigh(&self.rho, default_cluster_tol(&self.rho)).expect("state eigendecomposition")
    }

    /// Expectation value `tr[ρ A]`.
    pub fn expectation(&self, a: &HermitianOperator) -> f64 {
        self.rho.pair(a)
    }
}

/// `true` iff `tr[ρ²] ≥ 1 − tol`.
pub fn is_pure(rho: &State, tol: f64) -> bool {
    rho.purity() >= 1.0 - tol
}

/// An ordered, non-empty list of observables on a common space.
#[derive(Debug, Clone)]
pub struct ObservableCollection {
    dim: usize,
    observables: Vec<HermitianOperator>,
}

impl ObservableCollection {
    pub fn new(observables: Vec<HermitianOperator>) -> Result<Self> {
        let first = observables
            .first()
            .ok_or_else(|| Error::Domain("observable collection must be non-empty".into()))?;
        let dim = first.dim();
        if observables.iter().any(|a| a.dim() != dim) {
            return Err(Error::Shape("all observables must share one dimension".into()));
        }
        Ok(Self { dim, observables })
    }

    pub fn single(a: HermitianOperator) -> Self {
        Self { dim: a.dim(), observables: vec![a] }
    }

    /// The Pauli triple σ₁, σ₂, σ₃ on ℂ².
    pub fn pauli_triple() -> Self {
        let c = Complex64::new;
        let sx = ComplexMatrix::from_rows(vec![
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        let sy = ComplexMatrix::from_rows(vec![
            vec![c(0.0, 0.0), c(0.0, -1.0)],
            vec![c(0.0, 1.0), c(0.0, 0.0)],
        ])
        .unwrap();
        let sz = ComplexMatrix::from_rows(vec![
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(-1.0, 0.0)],
        ])
        .unwrap();
        Self::new(vec![
            HermitianOperator::new(sx).unwrap(),
            HermitianOperator::new(sy).unwrap(),
            HermitianOperator::new(sz).unwrap(),
        ])
        .unwrap()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.observables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observables.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, HermitianOperator> {
        self.observables.iter()
    }

    pub fn get(&self, k: usize) -> &HermitianOperator {
        &self.observables[k]
    }
}

/// A coupling of `ρ` and `ω`: a state on `H ⊗ H*` with marginals `ω` (over the
/// dual factor) and `ρᵀ` (over the first factor).
#[derive(Debug, Clone)]
pub struct Coupling {
    dim: usize,
    pi: State,
    marginal_omega: State,
    marginal_rho: State,
}

impl Coupling {
    /// Validates both marginal residuals in max-norm.
    pub fn new(pi: State, rho: &State, omega: &State) -> Result<Self> {
        let dim = omega.dim();
        if rho.dim() != dim {
            return Err(Error::Shape("marginals must share one dimension".into()));
        }
        if pi.dim() != dim * dim {
            return Err(Error::Shape(format!(
                "coupling must live on dimension {}, got {}",
                dim * dim,
                pi.dim()
            )));
        }
        let m2 = partial_trace(pi.matrix(), (dim, dim), TraceSide::Second)?;
        let r2 = m2.sub(omega.matrix()).max_abs();
        if r2 > COUPLING_MARGINAL_TOL {
            return Err(Error::InvalidCoupling(format!(
                "omega-marginal residual {r2:.3e} exceeds {COUPLING_MARGINAL_TOL:.1e}"
            )));
        }
        let m1 = partial_trace(pi.matrix(), (dim, dim), TraceSide::First)?;
        let r1 = m1.sub(&rho.matrix().transpose()).max_abs();
        if r1 > COUPLING_MARGINAL_TOL {
            return Err(Error::InvalidCoupling(format!(
                "rho-marginal residual {r1:.3e} exceeds {COUPLING_MARGINAL_TOL:.1e}"
            )));
        }
        Ok(Self { dim, pi, marginal_omega: omega.clone(), marginal_rho: rho.clone() })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pi(&self) -> &State {
        &self.pi
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.pi.matrix()
    }

    pub fn marginal_omega(&self) -> &State {
        &self.marginal_omega
    }

    pub fn marginal_rho(&self) -> &State {
        &self.marginal_rho
    }
}

/// The always-feasible product coupling `ω ⊗ ρᵀ`.
pub fn trivial_coupling(rho: &State, omega: &State) -> Result<Coupling> {
    if rho.dim() != omega.dim() {
        return Err(Error::Shape("states must share one dimension".into()));
    }
    let pi = kron(omega.matrix(), &rho.matrix().transpose())?;
    let pi = State::new(HermitianOperator::new(pi.hermitian_part())?)?;
    Coupling::new(pi, rho, omega)
}

/// A quantum channel in Kraus form. Trace preservation is validated at
/// construction; complete positivity is automatic for a Kraus family.
#[derive(Debug, Clone)]
pub struct Channel {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<ComplexMatrix>,
}

impl Channel {
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::InvalidChannel("empty Kraus family".into()))?;
        let (dim_out, dim_in) = (first.rows(), first.cols());
        if kraus.iter().any(|k| k.rows() != dim_out || k.cols() != dim_in) {
            return Err(Error::InvalidChannel("Kraus operators must share one shape".into()));
        }
        let mut sum = ComplexMatrix::zeros(dim_in, dim_in);
        for k in &kraus {
            sum = sum.add(&k.dagger().matmul(k));
        }
        let defect = sum.sub(&ComplexMatrix::identity(dim_in)).max_abs();
        if defect > CHANNEL_TP_TOL {
            return Err(Error::InvalidChannel(format!(
                "Σ K†K deviates from identity by {defect:.3e}"
            )));
        }
        Ok(Self { dim_in, dim_out, kraus })
    }

    pub fn identity(dim: usize) -> Self {
        Self { dim_in: dim, dim_out: dim, kraus: vec![ComplexMatrix::identity(dim)] }
    }

    /// The state-replacing channel `X ↦ ω·tr[X]`.
    pub fn constant(omega: &State, dim_in: usize) -> Self {
        let eig = omega.eigen();
        let mut kraus = Vec::new();
        for (idx, &w) in eig.eigenvalues.iter().enumerate() {
            if w <= 0.0 {
                continue;
            }
            let v = eig.eigenvectors.column(idx);
            for m in 0..dim_in {
                let mut k = ComplexMatrix::zeros(omega.dim(), dim_in);
                for (a, &va) in v.iter().enumerate() {
                    k.set(a, m, va.scale(w.sqrt()));
                }
                kraus.push(k);
            }
        }
        Self { dim_in, dim_out: omega.dim(), kraus }
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    /// `Φ(X) = Σ K X K†`.
    pub fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim_out, self.dim_out);
        for k in &self.kraus {
            out = out.add(&k.matmul(x).matmul(&k.dagger()));
        }
        out
    }

    pub fn apply_to_state(&self, rho: &State) -> Result<State> {
        State::new(HermitianOperator::new(self.apply(rho.matrix()).hermitian_part())?)
    }

    /// Choi matrix `Σ_ij Φ(E_ij) ⊗ E_ij`, equal to `Σ_m vec(K_m) vec(K_m)†`
    /// with row-major vectorization.
    pub fn choi(&self) -> ComplexMatrix {
        let n = self.dim_out * self.dim_in;
        let mut j = ComplexMatrix::zeros(n, n);
        for k in &self.kraus {
            let w = vec_row_major(k);
            j = j.add(&ComplexMatrix::outer(&w, &w));
        }
        j
    }

    /// Reassembles a Kraus family from a Choi matrix. Fails when the Choi
    /// matrix is not PSD within tolerance (the map is not completely positive).
    pub fn from_choi(choi: &ComplexMatrix, dim_in: usize, dim_out: usize) -> Result<Self> {
        let h = HermitianOperator::from_matrix_lenient(choi.clone())?;
        let decomp = eigh(&h, default_cluster_tol(&h))?;
        let scale = decomp
            .eigenvalues
            .iter()
            .fold(0.0_f64, |m, &l| m.max(l.abs()))
            .max(1.0);
        let mut kraus = Vec::new();
        for (idx, &lam) in decomp.eigenvalues.iter().enumerate() {
            if lam < -1e-8 * scale {
                return Err(Error::InvalidChannel(format!(
                    "Choi matrix has negative eigenvalue {lam:.3e}"
                )));
            }
            if lam <= SUPPORT_CUTOFF * scale {
                continue;
            }
            let w = decomp.eigenvectors.column(idx);
            let mut k = ComplexMatrix::zeros(dim_out, dim_in);
            for a in 0..dim_out {
                for i in 0..dim_in {
                    k.set(a, i, w[a * dim_in + i].scale(lam.sqrt()));
                }
            }
            kraus.push(k);
        }
        Self::new(kraus)
    }
}

fn vec_row_major(m: &ComplexMatrix) -> Vec<Complex64> {
    let mut v = Vec::with_capacity(m.rows() * m.cols());
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            v.push(m.get(i, j));
        }
    }
    v
}

/// `Φ†(A) = Σ K† A K`; unital whenever `Φ` is trace preserving.
pub fn channel_adjoint_apply(phi: &Channel, a: &HermitianOperator) -> Result<HermitianOperator> {
    if a.dim() != phi.dim_out {
        return Err(Error::Shape("observable dimension must match the channel output".into()));
    }
    let mut out = ComplexMatrix::zeros(phi.dim_in, phi.dim_in);
    for k in &phi.kraus {
        out = out.add(&k.dagger().matmul(a.matrix()).matmul(k));
    }
    HermitianOperator::new(out.hermitian_part())
}

/// Canonical purification of `ρ` on `H ⊗ H*`: the row-major vectorization of
/// `ρ^{1/2}`, so that tracing out the first factor yields `ρᵀ`.
pub fn canonical_purification(rho: &State) -> Vec<Complex64> {
    vec_row_major(rho.sqrt().matrix())
}

/// Builds the coupling `(Φ ⊗ id)(|vec ρ^{1/2}⟩⟨vec ρ^{1/2}|)` of `ρ` and `Φ(ρ)`.
pub fn channel_to_coupling(phi: &Channel, rho: &State) -> Result<Coupling> {
    let d = rho.dim();
    if phi.dim_in != d || phi.dim_out != d {
        return Err(Error::InvalidChannel(format!(
            "channel must act on dimension {d}, got {}→{}",
            phi.dim_in, phi.dim_out
        )));
    }
    let w = canonical_purification(rho);
    let purification = ComplexMatrix::outer(&w, &w);
    let identity = ComplexMatrix::identity(d);
    let mut pi = ComplexMatrix::zeros(d * d, d * d);
    for k in &phi.kraus {
        let lifted = kron(k, &identity)?;
        pi = pi.add(&lifted.matmul(&purification).matmul(&lifted.dagger()));
    }
    let omega = phi.apply_to_state(rho)?;
    let pi = State::new(HermitianOperator::new(pi.hermitian_part())?)?;
    Coupling::new(pi, rho, &omega)
}

/// Recovers the channel corresponding to a coupling.
///
/// The Choi matrix is `(I ⊗ (ρᵀ)^{-1/2}) Π (I ⊗ (ρᵀ)^{-1/2})`, with the
/// inverse square root taken on the support of `ρ` (singular-value cutoff
/// 1e−10). Off the support the action is completed to a trace-preserving map
/// by Kraus elements sending the kernel to `ω`.
pub fn coupling_to_channel(c: &Coupling) -> Result<Channel> {
    let d = c.dim();
    let rho_t = HermitianOperator::new(c.marginal_rho().matrix().transpose())?;
    let decomp = eigh(&rho_t, default_cluster_tol(&rho_t))?;
    let inv_sqrt: Vec<f64> = decomp
        .eigenvalues
        .iter()
        .map(|&l| if l > SUPPORT_CUTOFF { 1.0 / l.sqrt() } else { 0.0 })
        .collect();
    let sandwich = kron(
        &ComplexMatrix::identity(d),
        &decomp.assemble(&inv_sqrt),
    )?;
    let choi = sandwich.matmul(c.matrix()).matmul(&sandwich.dagger());
    let scale = choi.max_abs().max(1.0);
    let h = HermitianOperator::from_matrix_lenient(choi)?;
    let choi_eigen = eigh(&h, default_cluster_tol(&h))?;
    if let Some(&min) = choi_eigen.eigenvalues.first() {
        if min < -1e-7 * scale {
            return Err(Error::InvalidCoupling(format!(
                "coupling does not define a completely positive map (Choi eigenvalue {min:.3e})"
            )));
        }
    }
    let mut kraus = Vec::new();
    for (idx, &lam) in choi_eigen.eigenvalues.iter().enumerate() {
        if lam <= SUPPORT_CUTOFF * scale {
            continue;
        }
        let w = choi_eigen.eigenvectors.column(idx);
        let mut k = ComplexMatrix::zeros(d, d);
        for a in 0..d {
            for i in 0..d {
                k.set(a, i, w[a * d + i].scale(lam.sqrt()));
            }
        }
        kraus.push(k);
    }
    // Trace-preserving completion on the kernel of ρ: send it to ω.
    let kernel: Vec<usize> = decomp
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &l)| l <= SUPPORT_CUTOFF)
        .map(|(i, _)| i)
        .collect();
    if !kernel.is_empty() {
        let omega_eig = c.marginal_omega().eigen();
        for &r in &kernel {
            let kv = decomp.eigenvectors.column(r);
            for (m, &wm) in omega_eig.eigenvalues.iter().enumerate() {
                if wm <= 0.0 {
                    continue;
                }
                let v = omega_eig.eigenvectors.column(m);
                let mut k = ComplexMatrix::zeros(d, d);
                for a in 0..d {
                    for i in 0..d {
                        k.set(a, i, v[a] * kv[i].conj() * Complex64::new(wm.sqrt(), 0.0));
                    }
                }
                kraus.push(k);
            }
        }
    }
    Channel::new(kraus)
}

/// Generalized Bloch vector: the expectation profile of `ρ` over a collection.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochVector {
    pub coords: Vec<f64>,
}

impl BlochVector {
    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn distance(&self, other: &BlochVector) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

/// `(tr[ρ A_k])_k`.
pub fn bloch_vector(rho: &State, collection: &ObservableCollection) -> Result<BlochVector> {
    if rho.dim() != collection.dim() {
        return Err(Error::Shape("state and observables must share one dimension".into()));
    }
    Ok(BlochVector {
        coords: collection.iter().map(|a| rho.expectation(a)).collect(),
    })
}

fn complex_gaussian(rng: &mut ChaCha12Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

/// Ginibre-induced random state of the given rank. Deterministic per seed.
pub fn random_state(dim: usize, rank: usize, seed: u64) -> Result<State> {
    if rank == 0 || rank > dim {
        return Err(Error::Domain(format!("rank must lie in 1..={dim}, got {rank}")));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut g = ComplexMatrix::zeros(dim, rank);
    for i in 0..dim {
        for j in 0..rank {
            g.set(i, j, complex_gaussian(&mut rng));
        }
    }
    let gg = g.matmul(&g.dagger());
    let tr = gg.trace().re;
    State::new(HermitianOperator::new(gg.scale_re(1.0 / tr).hermitian_part())?)
}

/// Haar-like random pure state (normalized Gaussian vector).
pub fn random_pure_state(dim: usize, seed: u64) -> State {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let v: Vec<Complex64> = (0..dim).map(|_| complex_gaussian(&mut rng)).collect();
    State::pure_from_vector(&v).expect("Gaussian vector is nonzero")
}

/// Random observable with Hermitianized Gaussian entries.
pub fn random_observable(dim: usize, seed: u64) -> HermitianOperator {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut g = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            g.set(i, j, complex_gaussian(&mut rng));
        }
    }
    HermitianOperator::new(g.hermitian_part()).expect("Hermitian part is Hermitian")
}

/// Random trace-preserving Kraus channel with the given number of operators.
pub fn random_channel(dim: usize, kraus_count: usize, seed: u64) -> Channel {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let blocks: Vec<ComplexMatrix> = (0..kraus_count.max(1))
        .map(|_| {
            let mut g = ComplexMatrix::zeros(dim, dim);
            for i in 0..dim {
                for j in 0..dim {
                    g.set(i, j, complex_gaussian(&mut rng));
                }
            }
            g
        })
        .collect();
    let mut s = ComplexMatrix::zeros(dim, dim);
    for b in &blocks {
        s = s.add(&b.dagger().matmul(b));
    }
    let sh = HermitianOperator::from_matrix_lenient(s).unwrap();
    let s_inv_sqrt = apply_scalar_function(&sh, |x| {
        if x > SUPPORT_CUTOFF {
            1.0 / x.sqrt()
        } else {
            0.0
        }
    })
    .unwrap();
    let kraus: Vec<ComplexMatrix> = blocks
        .iter()
        .map(|b| b.matmul(s_inv_sqrt.matrix()))
        .collect();
    Channel::new(kraus).expect("normalized Kraus family is trace preserving")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::abs_pow;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn trivial_coupling_of_maximally_mixed_qubits() {
        let rho = State::maximally_mixed(2);
        let omega = State::maximally_mixed(2);
        let cpl = trivial_coupling(&rho, &omega).unwrap();
        let expected = ComplexMatrix::identity(4).scale_re(0.25);
        assert!(cpl.matrix().sub(&expected).max_abs() < 1e-14);
    }

    #[test]
    fn trivial_coupling_of_pure_basis_states() {
        let rho = State::basis_state(2, 0);
        let omega = State::basis_state(2, 1);
        let cpl = trivial_coupling(&rho, &omega).unwrap();
        // |1⟩⟨1| ⊗ |0⟩⟨0|ᵀ: single unit entry at index (1·2+0, 1·2+0).
        let mut expected = ComplexMatrix::zeros(4, 4);
        expected.set(2, 2, c(1.0, 0.0));
        assert!(cpl.matrix().sub(&expected).max_abs() < 1e-14);
    }

    #[test]
    fn trivial_coupling_marginals_random_qutrits() {
        let rho = random_state(3, 3, 5).unwrap();
        let omega = random_state(3, 3, 6).unwrap();
        let cpl = trivial_coupling(&rho, &omega).unwrap();
        let m2 = partial_trace(cpl.matrix(), (3, 3), TraceSide::Second).unwrap();
        let m1 = partial_trace(cpl.matrix(), (3, 3), TraceSide::First).unwrap();
        assert!(m2.sub(omega.matrix()).max_abs() < 1e-12);
        assert!(m1.sub(&rho.matrix().transpose()).max_abs() < 1e-12);
    }

    #[test]
    fn purity_classifier() {
        assert!(is_pure(&State::basis_state(2, 0), 1e-9));
        assert!(!is_pure(&State::maximally_mixed(2), 1e-9));
        let nearly = State::new(HermitianOperator::from_diag(&[0.999, 0.001])).unwrap();
        assert!((nearly.purity() - 0.998002).abs() < 1e-12);
        assert!(!is_pure(&nearly, 1e-6));
    }

    #[test]
    fn trivial_coupling_recovers_constant_channel() {
        let rho = random_state(3, 3, 11).unwrap();
        let omega = random_state(3, 3, 12).unwrap();
        let cpl = trivial_coupling(&rho, &omega).unwrap();
        let phi = coupling_to_channel(&cpl).unwrap();
        // Φ(X) = ω tr[X] on a random test matrix and on ρ itself.
        let x = random_observable(3, 13);
        let got = phi.apply(x.matrix());
        let expected = omega.matrix().scale(x.matrix().trace());
        assert!(got.sub(&expected).max_abs() < 1e-8);
        // Adjoint: Φ†(A) = I · tr[ωA].
        let a = random_observable(3, 14);
        let adj = channel_adjoint_apply(&phi, &a).unwrap();
        let expected_adj = ComplexMatrix::identity(3).scale_re(omega.expectation(&a));
        assert!(adj.matrix().sub(&expected_adj).max_abs() < 1e-8);
    }

    #[test]
    fn identity_channel_round_trips_through_coupling() {
        let rho = random_state(3, 3, 21).unwrap();
        let phi = Channel::identity(3);
        let cpl = channel_to_coupling(&phi, &rho).unwrap();
        let back = coupling_to_channel(&cpl).unwrap();
        let dist = back.choi().sub(&phi.choi()).max_abs();
        assert!(dist < 1e-8, "Choi distance {dist:.3e}");
    }

    #[test]
    fn random_channel_round_trips_through_coupling() {
        for seed in 0..6u64 {
            let rho = random_state(3, 3, 100 + seed).unwrap();
            let phi = random_channel(3, 3, 200 + seed);
            let cpl = channel_to_coupling(&phi, &rho).unwrap();
            let back = coupling_to_channel(&cpl).unwrap();
            let dist = back.choi().sub(&phi.choi()).max_abs();
            assert!(dist < 1e-8, "seed {seed}: Choi distance {dist:.3e}");
        }
    }

    #[test]
    fn channel_to_coupling_of_identity_on_pure_state() {
        let rho = random_pure_state(3, 31);
        let cpl = channel_to_coupling(&Channel::identity(3), &rho).unwrap();
        let expected = kron(rho.matrix(), &rho.matrix().transpose()).unwrap();
        assert!(cpl.matrix().sub(&expected).max_abs() < 1e-12);
    }

    #[test]
    fn channel_to_coupling_of_constant_channel_is_trivial() {
        let rho = random_state(3, 3, 41).unwrap();
        let omega = random_state(3, 3, 42).unwrap();
        let phi = Channel::constant(&omega, 3);
        let cpl = channel_to_coupling(&phi, &rho).unwrap();
        let expected = kron(omega.matrix(), &rho.matrix().transpose()).unwrap();
        assert!(cpl.matrix().sub(&expected).max_abs() < 1e-10);
    }

    #[test]
    fn random_kraus_coupling_marginals() {
        let rho = random_state(3, 3, 51).unwrap();
        let phi = random_channel(3, 4, 52);
        let cpl = channel_to_coupling(&phi, &rho).unwrap();
        let m2 = partial_trace(cpl.matrix(), (3, 3), TraceSide::Second).unwrap();
        let m1 = partial_trace(cpl.matrix(), (3, 3), TraceSide::First).unwrap();
        assert!(m2.sub(phi.apply_to_state(&rho).unwrap().matrix()).max_abs() < 1e-10);
        assert!(m1.sub(&rho.matrix().transpose()).max_abs() < 1e-10);
    }

    #[test]
    fn coupling_pairing_matches_channel_form() {
        // tr[Π(A ⊗ Bᵀ)] = tr[ρ^{1/2} B ρ^{1/2} Φ†(A)].
        for seed in 0..5u64 {
            let rho = random_state(3, 3, 300 + seed).unwrap();
            let phi = random_channel(3, 2, 400 + seed);
            let cpl = channel_to_coupling(&phi, &rho).unwrap();
            let a = random_observable(3, 500 + seed);
            let b = random_observable(3, 600 + seed);
            let lhs = kron(a.matrix(), &b.matrix().transpose())
                .unwrap()
                .matmul(cpl.matrix())
                .trace()
                .re;
            let root = rho.sqrt();
            let adj = channel_adjoint_apply(&phi, &a).unwrap();
            let rhs = root
                .matrix()
                .matmul(b.matrix())
                .matmul(root.matrix())
                .matmul(adj.matrix())
                .trace()
                .re;
            assert!((lhs - rhs).abs() < 1e-8, "seed {seed}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn adjoint_identities() {
        let a = random_observable(3, 61);
        let id = Channel::identity(3);
        assert!(channel_adjoint_apply(&id, &a)
            .unwrap()
            .matrix()
            .sub(a.matrix())
            .max_abs()
            < 1e-14);

        // Unitality and the duality pairing.
        let phi = random_channel(3, 3, 62);
        let unital = channel_adjoint_apply(&phi, &HermitianOperator::identity(3)).unwrap();
        assert!(unital.matrix().sub(&ComplexMatrix::identity(3)).max_abs() < 1e-10);
        let x = random_observable(3, 63);
        let lhs = phi.apply(x.matrix()).hs_inner(a.matrix());
        let rhs = x
            .matrix()
            .hs_inner(channel_adjoint_apply(&phi, &a).unwrap().matrix());
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn bloch_vectors_on_qubits() {
        let paulis = ObservableCollection::pauli_triple();
        let mixed = bloch_vector(&State::maximally_mixed(2), &paulis).unwrap();
        assert!(mixed.norm() < 1e-14);
        let up = bloch_vector(&State::basis_state(2, 0), &paulis).unwrap();
        assert!((up.coords[0]).abs() < 1e-14);
        assert!((up.coords[1]).abs() < 1e-14);
        assert!((up.coords[2] - 1.0).abs() < 1e-14);
        // Physical states live in the unit ball.
        for seed in 0..10u64 {
            let b = bloch_vector(&random_state(2, 2, seed).unwrap(), &paulis).unwrap();
            assert!(b.norm() <= 1.0 + 1e-10);
        }
    }

    #[test]
    fn random_state_properties() {
        let pure = random_pure_state(2, 9);
        assert!((pure.purity() - 1.0).abs() < 1e-12);
        let full = random_state(3, 3, 9).unwrap();
        let eig = full.eigen();
        assert!(eig.eigenvalues.iter().all(|&l| l > 0.0));
        assert!((full.matrix().trace().re - 1.0).abs() < 1e-12);
        // Determinism.
        let again = random_state(3, 3, 9).unwrap();
        assert!(full.matrix().sub(again.matrix()).max_abs() == 0.0);
        assert!(matches!(random_state(3, 0, 1), Err(Error::Domain(_))));
        assert!(matches!(random_state(3, 4, 1), Err(Error::Domain(_))));
    }

    #[test]
    fn lieb_monotonicity_seeded_sample() {
        // tr[((Φ(ρ))^{1/2} A)²] ≥ tr[(ρ^{1/2} Φ†(A))²] within slack.
        for seed in 0..40u64 {
            let d = 2 + (seed % 2) as usize;
            let rho = random_state(d, d, 1000 + seed).unwrap();
            let phi = random_channel(d, 2, 2000 + seed);
            let a = random_observable(d, 3000 + seed);
            let lhs = {
                let root = phi.apply_to_state(&rho).unwrap().sqrt();
                let m = root.matrix().matmul(a.matrix());
                m.matmul(&m).trace().re
            };
            let rhs = {
                let root = rho.sqrt();
                let adj = channel_adjoint_apply(&phi, &a).unwrap();
                let m = root.matrix().matmul(adj.matrix());
                m.matmul(&m).trace().re
            };
            assert!(lhs >= rhs - 1e-9, "seed {seed}: {lhs} < {rhs}");
        }
    }

    #[test]
    fn cauchy_schwarz_and_pure_state_identity() {
        for seed in 0..40u64 {
            let d = 2 + (seed % 2) as usize;
            let x = random_state(d, d, 4000 + seed).unwrap();
            let y = random_observable(d, 5000 + seed);
            let xy = x.sqrt().matrix().matmul(y.matrix());
            let lhs = xy.matmul(&xy).trace().re;
            let rhs = x.expectation(&y).powi(2);
            assert!(lhs >= rhs - 1e-9, "seed {seed}");

            let p = random_pure_state(d, 6000 + seed);
            let py = p.sqrt().matrix().matmul(y.matrix());
            let pl = py.matmul(&py).trace().re;
            let pr = p.expectation(&y).powi(2);
            assert!((pl - pr).abs() < 1e-10, "seed {seed}: {pl} vs {pr}");
        }
    }

    #[test]
    fn scalar_function_zero_power_convention() {
        assert_eq!(abs_pow(0.0, 0.5), 0.0);
        assert_eq!(abs_pow(-2.0, 1.0), 2.0);
    }
}
