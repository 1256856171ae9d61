//! Mean-field pressure objectives, their critical points, Taylor jets,
//! classification and phase diagrams.

mod critical;
mod model;
mod phase;
pub mod series;
mod solve;
mod taylor;
mod tuning;

pub use critical::{
    classify_critical_point, coupling_speed, coupling_transversality, default_couplings,
    CriticalClassification, CLASSIFY_ORDER,
};
pub use model::{
    objective, objective_gradient, objective_jet, pressure_p0, MeanFieldParams, ModelError,
    ModelSpec, Objective, Perturbed, StrongCoupling,
};
pub use phase::{
    classify_edge, parse_sweep, phase_diagram, Edge, Phase, PhaseCell, PhaseDiagram, PhaseOpts,
    PhaseSummary, SweepAxis, SweepError,
};
pub use solve::{
    annotate, find_critical_points, global_minimizer, grid_resolution, hessian_eigenvalues,
    local_minimize, newton_critical, CriticalPoint, Minimizer, SolveOpts,
};
pub use taylor::{finite_difference_jet, taylor_at, TaylorMethod, TaylorResult, RESIDUAL_GATE};
pub use tuning::{
    second_order_u1, tune_pairing, tune_strong_coupling, tune_theofin1, PairingTuning,
    TricriticalPoint, TuningError,
};
