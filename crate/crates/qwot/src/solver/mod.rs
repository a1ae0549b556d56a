//! Conic optimization over the coupling set.
//!
//! Minimizing `tr[Π C]` over all couplings of two states is a small dense
//! semidefinite program: the feasible set is the intersection of the PSD cone
//! with the affine subspace pinned down by the two marginal constraints.
//! [`solve_transport`] splits exactly along those two sets with ADMM and
//! reports a dual certificate alongside the optimal plan. When either
//! marginal is pure the coupling set is a single point and the solver returns
//! it directly.
//!
//! [`classical::solve_classical_lp`] is an independent oracle for commuting
//! instances: a network-simplex solve of the discrete transport polytope.

mod admm;
pub mod classical;

pub use admm::solve_transport;
pub use classical::{solve_classical_lp, ClassicalTransportProblem, DiscreteDistribution};

use crate::cost::CostOperator;
use crate::error::{Error, Result};
use crate::linalg::{default_cluster_tol, eigh, kron, partial_trace, ComplexMatrix, HermitianOperator, TraceSide};
use crate::quantum::{Coupling, State};

/// Default solver tolerance.
pub const DEFAULT_TOL: f64 = 1e-7;
/// Default iteration cap.
pub const DEFAULT_MAX_ITERS: usize = 50_000;

/// A transport problem: two marginals, a cost operator, and accuracy knobs.
#[derive(Debug, Clone)]
pub struct TransportProblem {
    pub rho: State,
    pub omega: State,
    pub cost: CostOperator,
    pub tol: f64,
    pub max_iters: usize,
}

impl TransportProblem {
    pub fn new(rho: State, omega: State, cost: CostOperator) -> Result<Self> {
        if rho.dim() != omega.dim() {
            return Err(Error::InvalidProblem("marginals must share one dimension".into()));
        }
        if cost.dim() != rho.dim() * rho.dim() {
            return Err(Error::InvalidProblem(format!(
                "cost operator lives on dimension {}, expected {}",
                cost.dim(),
                rho.dim() * rho.dim()
            )));
        }
        let trace_gap = (rho.matrix().trace().re - omega.matrix().trace().re).abs();
        if trace_gap > 1e-10 {
            return Err(Error::InvalidProblem(format!(
                "marginal traces differ by {trace_gap:.3e}"
            )));
        }
        Ok(Self { rho, omega, cost, tol: DEFAULT_TOL, max_iters: DEFAULT_MAX_ITERS })
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }
}

/// How the reported optimum is certified.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertificateKind {
    /// ADMM dual multipliers with a weak-duality gap.
    AdmmDual,
    /// A pure marginal makes the coupling set a single point; the optimum is
    /// the value at that point, no dual needed.
    UniqueCoupling,
}

/// Dual multipliers for the two marginal constraints. The certified dual
/// bound is `tr[ω Y_ω] + tr[ρᵀ Y_ρ]` with `C − Y_ω ⊗ I − I ⊗ Y_ρ ⪰ 0`.
#[derive(Debug, Clone)]
pub struct DualCertificate {
    pub y_omega: HermitianOperator,
    pub y_rho: HermitianOperator,
}

/// Outcome of a transport solve.
#[derive(Debug, Clone)]
pub struct TransportResult {
    /// `tr[plan · C]`, the certified primal value.
    pub value: f64,
    pub plan: Coupling,
    /// Best dual lower bound found (weak duality: `value ≥ dual_value − tol`).
    pub dual_value: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    /// `value − dual_value`.
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
    pub certificate: CertificateKind,
    pub multipliers: Option<DualCertificate>,
    /// Best value seen at each solver checkpoint; non-increasing.
    pub value_trace: Vec<f64>,
}

/// Report produced by [`verify_kkt`]: independently recomputed optimality
/// conditions for a transport result.
#[derive(Debug, Clone)]
pub struct KktReport {
    /// Max-norm residual of both marginal constraints of the plan.
    pub primal_marginal_residual: f64,
    /// Smallest eigenvalue of the plan (should be ≥ 0 up to rounding).
    pub plan_min_eigenvalue: f64,
    /// `max(0, −λ_min(C − Y_ω ⊗ I − I ⊗ Y_ρ))`, scaled by the cost norm.
    pub dual_feasibility_violation: f64,
    /// `|tr[(C − Y_ω ⊗ I − I ⊗ Y_ρ) · Π]|`, the complementary slackness
    /// residual.
    pub complementarity_residual: f64,
    /// `|value − dual_value|` recomputed from the certificate.
    pub duality_gap: f64,
    /// Human-readable description of every violation above `10 · tol`.
    pub flags: Vec<String>,
    pub passed: bool,
}

/// Recomputes primal feasibility, dual feasibility, and complementary
/// slackness for a solver result. Report-only: never fails.
pub fn verify_kkt(result: &TransportResult, prob: &TransportProblem) -> KktReport {
    let d = prob.rho.dim();
    let tol = prob.tol;
    let plan = result.plan.matrix();

    let marg_omega = partial_trace(plan, (d, d), TraceSide::Second)
        .map(|m| m.sub(prob.omega.matrix()).max_abs())
        .unwrap_or(f64::INFINITY);
    let marg_rho = partial_trace(plan, (d, d), TraceSide::First)
        .map(|m| m.sub(&prob.rho.matrix().transpose()).max_abs())
        .unwrap_or(f64::INFINITY);
    let primal_marginal_residual = marg_omega.max(marg_rho);

    let plan_h = HermitianOperator::from_matrix_lenient(plan.clone()).unwrap();
    let plan_min_eigenvalue = eigh(&plan_h, default_cluster_tol(&plan_h))
        .map(|dec| dec.eigenvalues[0])
        .unwrap_or(f64::NEG_INFINITY);

    let cost_scale = prob.cost.matrix().matrix().max_abs().max(1.0);
    let (dual_feasibility_violation, complementarity_residual) = match &result.multipliers {
        Some(cert) => {
            let id = ComplexMatrix::identity(d);
            let lifted = kron(cert.y_omega.matrix(), &id)
                .and_then(|a| kron(&id, cert.y_rho.matrix()).map(|b| a.add(&b)));
            match lifted {
                Ok(ay) => {
                    let slack = prob.cost.matrix().matrix().sub(&ay);
                    let sh = HermitianOperator::from_matrix_lenient(slack.clone()).unwrap();
                    let min_eig = eigh(&sh, default_cluster_tol(&sh))
                        .map(|dec| dec.eigenvalues[0])
                        .unwrap_or(f64::NEG_INFINITY);
                    let compl = slack.matmul(plan).trace().re.abs();
                    ((-min_eig).max(0.0), compl)
                }
                Err(_) => (f64::INFINITY, f64::INFINITY),
            }
        }
        // Unique-coupling certificate: the optimum is constructive, the dual
        // side is vacuous.
        None => (0.0, (result.value - result.dual_value).abs()),
    };

    let duality_gap = (result.value - result.dual_value).abs();

    let mut flags = Vec::new();
    if primal_marginal_residual > 10.0 * tol {
        flags.push(format!("marginal residual {primal_marginal_residual:.3e} > 10·tol"));
    }
    if plan_min_eigenvalue < -10.0 * tol {
        flags.push(format!("plan eigenvalue {plan_min_eigenvalue:.3e} < −10·tol"));
    }
    if dual_feasibility_violation > 10.0 * tol * cost_scale {
        flags.push(format!(
            "dual feasibility violation {dual_feasibility_violation:.3e} > 10·tol·‖C‖"
        ));
    }
    let value_scale = result.value.abs().max(1.0);
    if complementarity_residual > 10.0 * tol * value_scale {
        flags.push(format!(
            "complementarity residual {complementarity_residual:.3e} > 10·tol·max(1,|value|)"
        ));
    }
    if duality_gap > 10.0 * tol * value_scale {
        flags.push(format!("duality gap {duality_gap:.3e} > 10·tol·max(1,|value|)"));
    }
    let passed = flags.is_empty();
    KktReport {
        primal_marginal_residual,
        plan_min_eigenvalue,
        dual_feasibility_violation,
        complementarity_residual,
        duality_gap,
        flags,
        passed,
    }
}
