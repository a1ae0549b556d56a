//! ADMM splitting for the transport SDP.
//!
//! The iteration alternates between the affine subspace of Hermitian matrices
//! with the prescribed marginals (a closed-form least-squares projection; the
//! objective is folded into this step) and the PSD cone (eigenvalue
//! clipping). Dual multipliers for the marginal constraints fall out of the
//! stationarity of the affine step and give a certified lower bound after a
//! spectral shift, so every reported optimum carries a weak-duality gap.
//!
//! Optimal plans often sit on a low-rank face of the spectrahedron, where the
//! two sets meet at a shallow angle and plain splitting approaches primal
//! feasibility slowly. The returned plan therefore comes from a deep
//! alternating-projection polish of the final iterate; individual polish
//! rounds are a single small eigendecomposition and thousands of them are
//! cheaper than a handful of outer iterations.

use crate::error::{Error, Result};
use crate::linalg::{
    default_cluster_tol, eigh, kron, partial_trace, ComplexMatrix, HermitianOperator, TraceSide,
};
use crate::quantum::{Coupling, State};
use crate::solver::{CertificateKind, DualCertificate, TransportProblem, TransportResult};

/// A marginal with largest eigenvalue above `1 − 1e−10` is treated as pure;
/// the coupling set is then the single product point.
const PURE_SHORTCUT_TOL: f64 = 1e-10;

/// Feasibility gates a candidate plan must satisfy before it can be reported.
/// Tighter than the coupling and state construction gates so that validation
/// downstream cannot fail.
const PLAN_MARGINAL_TOL: f64 = 1e-9;
const PLAN_EIG_TOL: f64 = 5e-11;
const PLAN_TRACE_TOL: f64 = 5e-11;

const CHECK_EVERY: usize = 20;
const ADAPT_EVERY: usize = 10;
const DEEP_POLISH_ROUNDS: usize = 20_000;
/// Over-relaxation factor for the second splitting block.
const RELAXATION: f64 = 1.7;

struct Workspace<'a> {
    d: usize,
    omega: &'a ComplexMatrix,
    rho_t: ComplexMatrix,
}

impl Workspace<'_> {
    /// Minimal-norm solution of `A A* (Y₁, Y₂) = (R₁, R₂)` for the marginal
    /// constraint map `A(Π) = (tr₂ Π, tr₁ Π)`.
    fn constraint_lsq(
        &self,
        r1: &ComplexMatrix,
        r2: &ComplexMatrix,
    ) -> (ComplexMatrix, ComplexMatrix) {
        let d = self.d as f64;
        let t = r1.trace().re;
        let shift = t / (2.0 * d * d);
        let id = ComplexMatrix::identity(self.d);
        let y1 = r1.scale_re(1.0 / d).sub(&id.scale_re(shift));
        let y2 = r2.scale_re(1.0 / d).sub(&id.scale_re(shift));
        (y1, y2)
    }

    /// `Y₁ ⊗ I + I ⊗ Y₂`.
    fn lift(&self, y1: &ComplexMatrix, y2: &ComplexMatrix) -> ComplexMatrix {
        let id = ComplexMatrix::identity(self.d);
        kron(y1, &id).unwrap().add(&kron(&id, y2).unwrap())
    }

    /// Orthogonal projection onto `{X = X†, tr₂X = ω, tr₁X = ρᵀ}`.
    fn project_affine(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let d = self.d;
        let mh = m.hermitian_part();
        let r1 = partial_trace(&mh, (d, d), TraceSide::Second)
            .unwrap()
            .sub(self.omega);
        let r2 = partial_trace(&mh, (d, d), TraceSide::First)
            .unwrap()
            .sub(&self.rho_t);
        let (y1, y2) = self.constraint_lsq(&r1, &r2);
        // Single-pass mh − Y₁ ⊗ I − I ⊗ Y₂.
        let mut out = mh;
        for i in 0..d {
            for j in 0..d {
                let y1ij = y1.get(i, j);
                for a in 0..d {
                    let row = i * d + a;
                    let base = j * d;
                    let v = out.get(row, base + a) - y1ij;
                    out.set(row, base + a, v);
                    if i == j {
                        for b in 0..d {
                            let w = out.get(row, base + b) - y2.get(a, b);
                            out.set(row, base + b, w);
                        }
                    }
                }
            }
        }
        out
    }

    fn marginal_residual(&self, m: &ComplexMatrix) -> f64 {
        let r1 = partial_trace(m, (self.d, self.d), TraceSide::Second)
            .unwrap()
            .sub(self.omega)
            .max_abs();
        let r2 = partial_trace(m, (self.d, self.d), TraceSide::First)
            .unwrap()
            .sub(&self.rho_t)
            .max_abs();
        r1.max(r2)
    }
}

/// Positive part and the most negative eigenvalue of a Hermitian matrix.
fn psd_clip(m: &ComplexMatrix) -> Result<(ComplexMatrix, f64)> {
    let h = HermitianOperator::from_matrix_lenient(m.clone())?;
    let dec = eigh(&h, default_cluster_tol(&h))?;
    let min_eig = dec.eigenvalues[0];
    if min_eig >= 0.0 {
        return Ok((h.matrix().clone(), min_eig));
    }
    let clipped: Vec<f64> = dec.eigenvalues.iter().map(|&l| l.max(0.0)).collect();
    Ok((dec.assemble(&clipped), min_eig))
}

struct Candidate {
    matrix: ComplexMatrix,
    marginal: f64,
    trace_dev: f64,
    min_eig: f64,
}

impl Candidate {
    fn feasible(&self) -> bool {
        self.marginal <= PLAN_MARGINAL_TOL
            && self.trace_dev <= PLAN_TRACE_TOL
            && self.min_eig >= -PLAN_EIG_TOL
    }
}

/// One clip of the iterate followed by the exact marginal repair. Near
/// convergence this is already a valid plan.
fn cheap_candidate(ws: &Workspace, x: &ComplexMatrix) -> Result<Candidate> {
    let (clipped, _) = psd_clip(&x.hermitian_part())?;
    let repaired = marginal_repair(ws, &clipped)?;
    let marginal = ws.marginal_residual(&repaired);
    let trace_dev = (repaired.trace().re - 1.0).abs();
    let h = HermitianOperator::from_matrix_lenient(repaired.clone())?;
    let min_eig = eigh(&h, default_cluster_tol(&h))?.eigenvalues[0];
    Ok(Candidate { matrix: repaired, marginal, trace_dev, min_eig })
}

/// Exact marginal repair: adds the unique correction of product form
/// `Δ₁ ⊗ ρᵀ + ω ⊗ Δ₂ − tr(Δ₁)·(ω ⊗ ρᵀ)` cancelling the marginal defect of
/// `m`. Perturbs eigenvalues by at most the defect size.
fn marginal_repair(ws: &Workspace, m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let d = ws.d;
    let d1 = ws
        .omega
        .sub(&partial_trace(m, (d, d), TraceSide::Second)?);
    let d2 = ws
        .rho_t
        .sub(&partial_trace(m, (d, d), TraceSide::First)?);
    let t = d1.trace().re;
    let correction = kron(&d1, &ws.rho_t)?
        .add(&kron(ws.omega, &d2)?)
        .sub(&kron(ws.omega, &ws.rho_t)?.scale_re(t));
    Ok(m.add(&correction).hermitian_part())
}

/// Real coordinates of a Hermitian matrix, isometric for the Frobenius inner
/// product: diagonal entries, then `√2·Re` and `√2·Im` of the upper triangle.
fn herm_coords(m: &ComplexMatrix) -> Vec<f64> {
    let d = m.rows();
    let sqrt2 = std::f64::consts::SQRT_2;
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        out.push(m.get(i, i).re);
    }
    for i in 0..d {
        for j in i + 1..d {
            out.push(sqrt2 * m.get(i, j).re);
            out.push(sqrt2 * m.get(i, j).im);
        }
    }
    out
}

/// Cancels the marginal defect of a PSD matrix by a correction restricted to
/// the span of its eigenvectors above `theta`. On that face the constraint
/// map is well conditioned even when the full problem meets the PSD cone
/// tangentially. Returns `None` when the face cannot represent the defect or
/// the correction would push an eigenvalue below the plan gate.
fn face_repair(
    ws: &Workspace,
    cand: &ComplexMatrix,
    dec: &crate::linalg::EigenDecomposition,
    theta: f64,
) -> Option<ComplexMatrix> {
    let d = ws.d;
    let n = d * d;
    let keep: Vec<usize> = dec
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > theta)
        .map(|(i, _)| i)
        .collect();
    let r = keep.len();
    if r == 0 {
        return None;
    }
    let rest: Vec<usize> = (0..n).filter(|i| !keep.contains(i)).collect();
    let vectors: Vec<Vec<num_complex::Complex64>> =
        keep.iter().map(|&i| dec.eigenvectors.column(i)).collect();
    let complement: Vec<Vec<num_complex::Complex64>> =
        rest.iter().map(|&i| dec.eigenvectors.column(i)).collect();

    // Correction space: the face block V·V† plus the face–complement cross
    // blocks. Cross terms of size δ push eigenvalues down only at second
    // order (−δ²/λ_face), so they are admissible repairs; the pure
    // complement block is excluded because it breaks positivity at first
    // order.
    let sqrt2_inv = 1.0 / std::f64::consts::SQRT_2;
    let mut gens: Vec<ComplexMatrix> = Vec::with_capacity(r * r + 2 * r * (n - r));
    for k in 0..r {
        gens.push(ComplexMatrix::outer(&vectors[k], &vectors[k]));
    }
    for k in 0..r {
        for l in k + 1..r {
            let kl = ComplexMatrix::outer(&vectors[k], &vectors[l]);
            let lk = ComplexMatrix::outer(&vectors[l], &vectors[k]);
            gens.push(kl.add(&lk).scale_re(sqrt2_inv));
            gens.push(
                kl.sub(&lk)
                    .scale(num_complex::Complex64::new(0.0, 1.0))
                    .scale_re(sqrt2_inv),
            );
        }
    }
    for v in &vectors {
        for w in &complement {
            let vw = ComplexMatrix::outer(v, w);
            let wv = ComplexMatrix::outer(w, v);
            gens.push(vw.add(&wv).scale_re(sqrt2_inv));
            gens.push(
                vw.sub(&wv)
                    .scale(num_complex::Complex64::new(0.0, 1.0))
                    .scale_re(sqrt2_inv),
            );
        }
    }
    let images: Vec<Vec<f64>> = gens
        .iter()
        .map(|g| {
            let mut v = herm_coords(&partial_trace(g, (d, d), TraceSide::Second).unwrap());
            v.extend(herm_coords(&partial_trace(g, (d, d), TraceSide::First).unwrap()));
            v
        })
        .collect();

    let mut delta = herm_coords(
        &ws.omega
            .sub(&partial_trace(cand, (d, d), TraceSide::Second).unwrap()),
    );
    delta.extend(herm_coords(
        &ws.rho_t
            .sub(&partial_trace(cand, (d, d), TraceSide::First).unwrap()),
    ));
    let m = delta.len();
    let defect_scale = delta.iter().fold(0.0_f64, |a, &v| a.max(v.abs()));

    // Minimal-norm solution of (images)ᵀ m = delta via the constraint-side
    // normal matrix, pseudo-inverted through the Jacobi eigensolver.
    let mut normal = ComplexMatrix::zeros(m, m);
    for img in &images {
        for a in 0..m {
            if img[a] == 0.0 {
                continue;
            }
            for b in 0..m {
                let v = normal.get(a, b) + num_complex::Complex64::new(img[a] * img[b], 0.0);
                normal.set(a, b, v);
            }
        }
    }
    let nh = HermitianOperator::from_matrix_lenient(normal).ok()?;
    let ndec = eigh(&nh, default_cluster_tol(&nh)).ok()?;
    let lmax = ndec.eigenvalues.last().copied()?.max(1e-300);
    // z = (A Aᵀ)⁺ delta in the eigenbasis of the normal matrix.
    let mut z = vec![0.0; m];
    for (idx, &lam) in ndec.eigenvalues.iter().enumerate() {
        if lam <= 1e-12 * lmax {
            continue;
        }
        let col = ndec.eigenvectors.column(idx);
        let proj: f64 = (0..m).map(|a| col[a].re * delta[a]).sum();
        for a in 0..m {
            z[a] += col[a].re * proj / lam;
        }
    }
    // m_j = a_jᵀ z, correction = Σ m_j G_j.
    let mut correction = ComplexMatrix::zeros(d * d, d * d);
    for (img, g) in images.iter().zip(&gens) {
        let coeff: f64 = img.iter().zip(&z).map(|(a, b)| a * b).sum();
        if coeff != 0.0 {
            correction = correction.add(&g.scale_re(coeff));
        }
    }
    let repaired = cand.add(&correction).hermitian_part();

    // The face must absorb the bulk of the defect; the small remainder is
    // cancelled exactly by the product-form repair.
    let remainder = ws.marginal_residual(&repaired);
    let debug = std::env::var("QWOT_DEBUG").is_ok();
    if remainder > 0.05 * defect_scale.max(1e-13) {
        if debug {
            eprintln!(
                "face_repair: theta={theta:.1e} r={r} defect={defect_scale:.3e} remainder={remainder:.3e} REJECT(span)"
            );
        }
        return None;
    }
    let repaired = marginal_repair(ws, &repaired).ok()?;
    let h = HermitianOperator::from_matrix_lenient(repaired.clone()).ok()?;
    let min_eig = eigh(&h, default_cluster_tol(&h)).ok()?.eigenvalues[0];
    if min_eig < -PLAN_EIG_TOL {
        if debug {
            eprintln!(
                "face_repair: theta={theta:.1e} r={r} defect={defect_scale:.3e} remainder={remainder:.3e} mineig={min_eig:.3e} REJECT(psd)"
            );
        }
        return None;
    }
    Some(repaired)
}

/// Turns the affine iterate into a reportable plan: a short alternating
/// projection burst, then a face-restricted marginal repair (threshold
/// ladder), with a long projection run plus product-form repair as fallback.
fn deep_polish(ws: &Workspace, x: &ComplexMatrix) -> Result<Candidate> {
    let debug = std::env::var("QWOT_DEBUG").is_ok();
    let measure = |cand: ComplexMatrix, rounds: usize, tag: &str| -> Result<Candidate> {
        let marginal = ws.marginal_residual(&cand);
        let trace_dev = (cand.trace().re - 1.0).abs();
        let h = HermitianOperator::from_matrix_lenient(cand.clone())?;
        let min_eig = eigh(&h, default_cluster_tol(&h))?.eigenvalues[0];
        if debug {
            eprintln!(
                "deep_polish[{tag}]: rounds={rounds} marg={marginal:.3e} trace={trace_dev:.3e} mineig={min_eig:.3e}"
            );
        }
        Ok(Candidate { matrix: cand, marginal, trace_dev, min_eig })
    };

    let mut cand = x.hermitian_part();
    let scale = cand.max_abs().max(1.0);
    let mut rounds = 0usize;
    for _ in 0..300 {
        rounds += 1;
        let (clipped, min_eig) = psd_clip(&cand)?;
        if min_eig >= -1e-12 * scale {
            cand = clipped;
            break;
        }
        cand = ws.project_affine(&clipped);
    }
    let (clipped, _) = psd_clip(&cand)?;
    let h = HermitianOperator::from_matrix_lenient(clipped.clone())?;
    let dec = eigh(&h, default_cluster_tol(&h))?;
    let lmax = dec.eigenvalues.last().copied().unwrap_or(0.0).max(1e-300);
    for theta_rel in [1e-4, 1e-6, 1e-8, 1e-10] {
        if let Some(repaired) = face_repair(ws, &clipped, &dec, theta_rel * lmax) {
            return measure(repaired, rounds, "face");
        }
    }

    // Fallback: long projection run, then exact product-form repair.
    for _ in rounds..DEEP_POLISH_ROUNDS {
        rounds += 1;
        let (clipped, min_eig) = psd_clip(&cand)?;
        if min_eig >= -1e-12 * scale {
            cand = clipped;
            break;
        }
        cand = ws.project_affine(&clipped);
    }
    let (cand, _) = psd_clip(&cand)?;
    let cand = marginal_repair(ws, &cand)?;
    measure(cand, rounds, "fallback")
}

fn max_eigenvalue(state: &State) -> f64 {
    state.eigen().eigenvalues.last().copied().unwrap_or(0.0)
}

/// Minimizes `tr[Π C]` over the couplings of `ρ` and `ω`.
///
/// The returned plan is the best feasible candidate encountered, its value is
/// certified by the dual bound, and the marginals of the plan hold to the
/// coupling tolerance. Initialization is the trivial coupling `ω ⊗ ρᵀ` (and
/// for self-transport also the identity-channel coupling, which is exactly
/// optimal in the quadratic case), so instances whose optimum is one of those
/// plans converge at once.
pub fn solve_transport(prob: &TransportProblem) -> Result<TransportResult> {
    let d = prob.rho.dim();
    if prob.tol <= 0.0 {
        return Err(Error::InvalidProblem("tolerance must be positive".into()));
    }

    // A pure marginal forces the unique coupling ω ⊗ ρᵀ.
    if max_eigenvalue(&prob.rho) >= 1.0 - PURE_SHORTCUT_TOL
        || max_eigenvalue(&prob.omega) >= 1.0 - PURE_SHORTCUT_TOL
    {
        let plan = crate::quantum::trivial_coupling(&prob.rho, &prob.omega)?;
        let value = prob.cost.pair_with(&plan).max(0.0);
        return Ok(TransportResult {
            value,
            plan,
            dual_value: value,
            primal_residual: 0.0,
            dual_residual: 0.0,
            gap: 0.0,
            iterations: 0,
            converged: true,
            certificate: CertificateKind::UniqueCoupling,
            multipliers: None,
            value_trace: vec![value],
        });
    }

    let cost = prob.cost.matrix().matrix();
    let omega = prob.omega.matrix();
    let rho_t = prob.rho.matrix().transpose();
    let ws = Workspace { d, omega, rho_t };

    // Feasible starting plans: the product coupling always, and for
    // self-transport also the purification coupling.
    let mut starts: Vec<ComplexMatrix> = vec![kron(ws.omega, &ws.rho_t)?];
    if prob.rho.matrix().sub(prob.omega.matrix()).max_abs() <= 1e-14 {
        let w = crate::quantum::canonical_purification(&prob.rho);
        starts.push(ComplexMatrix::outer(&w, &w));
    }
    let mut best: Option<(f64, ComplexMatrix)> = None;
    for start in &starts {
        let val = cost.trace_product(start).re;
        if best.as_ref().map_or(true, |(bv, _)| val < *bv) {
            best = Some((val, start.clone()));
        }
    }
    let mut z = best
        .as_ref()
        .map(|(_, m)| m.clone())
        .expect("at least one feasible start");
    let mut u = ComplexMatrix::zeros(d * d, d * d);
    let mut sigma = 1.0;

    let mut value_trace: Vec<f64> = Vec::new();
    let mut dual_best = f64::NEG_INFINITY;
    let mut multipliers: Option<DualCertificate> = None;
    let mut last_r = f64::INFINITY;
    let mut last_s = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;
    let mut last_x = z.clone();

    let accept = |best: &mut Option<(f64, ComplexMatrix)>, val: f64, m: ComplexMatrix| {
        let improved = match best {
            None => true,
            Some((bv, _)) => val < *bv - 1e-12 * bv.abs().max(1.0),
        };
        if improved {
            *best = Some((val, m));
        }
    };

    // The residual target tightens whenever the deep-polished plan is not yet
    // accurate enough to close the duality gap.
    let mut residual_target = prob.tol;

    'outer: while iterations < prob.max_iters {
        // Main splitting loop until the residuals settle below the target.
        while iterations < prob.max_iters {
            iterations += 1;
            let iter = iterations;
            let x = ws.project_affine(&z.sub(&u).sub(&cost.scale_re(1.0 / sigma)));

            let checkpoint = iter % CHECK_EVERY == 0 || iter == prob.max_iters || iter == 1;
            if std::env::var("QWOT_DEBUG").is_ok() && iter % 5000 == 0 {
                eprintln!("iter {iter}: r={last_r:.3e} s={last_s:.3e} sigma={sigma:.3e}");
            }
            if checkpoint {
                if let Ok(cand) = cheap_candidate(&ws, &x) {
                    if cand.feasible() {
                        let val = cost.trace_product(&cand.matrix).re;
                        accept(&mut best, val, cand.matrix);
                    }
                }
                if let Some((bv, _)) = &best {
                    value_trace.push(*bv);
                }

                // Dual bound from the stationarity of the affine step:
                // C + σ(X − Z + U) lies in the range of the constraint
                // adjoint; a spectral shift makes the slack PSD.
                let g = cost.add(&x.sub(&z).add(&u).scale_re(sigma));
                let r1 = partial_trace(&g, (d, d), TraceSide::Second)?;
                let r2 = partial_trace(&g, (d, d), TraceSide::First)?;
                let (y1, y2) = ws.constraint_lsq(&r1, &r2);
                let slack = cost.sub(&ws.lift(&y1, &y2));
                let sh = HermitianOperator::from_matrix_lenient(slack)?;
                let min_eig = eigh(&sh, default_cluster_tol(&sh))?.eigenvalues[0];
                let shift = min_eig.min(0.0);
                let raw = omega.trace_product(&y1).re + ws.rho_t.trace_product(&y2).re;
                let dual = raw + shift;
                if dual > dual_best {
                    dual_best = dual;
                    let y1_shifted = y1.add(&ComplexMatrix::identity(d).scale_re(shift));
                    multipliers = Some(DualCertificate {
                        y_omega: HermitianOperator::from_matrix_lenient(y1_shifted)?,
                        y_rho: HermitianOperator::from_matrix_lenient(y2)?,
                    });
                }
            }

            let x_relaxed = x.scale_re(RELAXATION).add(&z.scale_re(1.0 - RELAXATION));
            let w = x_relaxed.add(&u).hermitian_part();
            let (z_new, _) = psd_clip(&w)?;
            let r = x.sub(&z_new).frobenius_norm();
            let s = sigma * z_new.sub(&z).frobenius_norm();
            u = u.add(&x_relaxed).sub(&z_new);
            z = z_new;
            last_r = r;
            last_s = s;
            last_x = x;

            if checkpoint && r <= residual_target && s <= residual_target {
                break;
            }

            if iter % ADAPT_EVERY == 0 {
                // Residual balancing: doubling rule past ratio 10, gentle
                // square-root rebalancing past ratio 2.
                if r > 10.0 * s && sigma < 1e8 {
                    sigma *= 2.0;
                    u = u.scale_re(0.5);
                } else if s > 10.0 * r && sigma > 1e-8 {
                    sigma /= 2.0;
                    u = u.scale_re(2.0);
                } else if iter % (ADAPT_EVERY * 10) == 0 && r > 0.0 && s > 0.0 {
                    let ratio = (r / s).sqrt().clamp(0.25, 4.0);
                    if !(0.9..=1.1).contains(&ratio) {
                        sigma = (sigma * ratio).clamp(1e-8, 1e8);
                        u = u.scale_re(1.0 / ratio);
                    }
                }
            }
        }

        // Deep-polish the affine iterate into the feasible set and test the
        // full convergence criteria on the best plan so far.
        if let Ok(cand) = deep_polish(&ws, &last_x) {
            if cand.feasible() {
                let val = cost.trace_product(&cand.matrix).re;
                accept(&mut best, val, cand.matrix);
                if let Some((bv, _)) = &best {
                    value_trace.push(*bv);
                }
            }
        }
        if let Some((bv, _)) = &best {
            let gap = bv - dual_best;
            if last_r <= prob.tol
                && last_s <= prob.tol
                && gap.abs() <= prob.tol * bv.abs().max(1.0)
            {
                converged = true;
                break 'outer;
            }
        }
        if iterations >= prob.max_iters {
            break;
        }
        residual_target *= 0.1;
    }

    let (value, plan_matrix) = best.expect("a feasible start always seeds the candidate set");
    let plan = Coupling::new(
        State::new(HermitianOperator::from_matrix_lenient(plan_matrix)?)?,
        &prob.rho,
        &prob.omega,
    )?;
    let value = value.max(0.0);
    let gap = value - dual_best;
    let result = TransportResult {
        value,
        plan,
        dual_value: dual_best,
        primal_residual: last_r,
        dual_residual: last_s,
        gap,
        iterations,
        converged,
        certificate: CertificateKind::AdmmDual,
        multipliers,
        value_trace,
    };
    if converged {
        Ok(result)
    } else {
        Err(Error::NotConverged {
            iterations,
            primal_residual: last_r,
            dual_residual: last_s,
            gap,
            best: Box::new(result),
        })
    }
}
