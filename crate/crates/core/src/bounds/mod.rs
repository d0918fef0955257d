//! Adjoint spacing sequences, the growth lower bounds and almost orthonormal systems.

mod adjoint;
mod orthonormal;
mod theorems;
mod weyl;

pub use adjoint::{build_adjoint, constant_adjoint, power_law_adjoint, AdjointReport, AdjointSequence, RateProfile, MIN_DYADIC_TAIL};
pub use orthonormal::{
    almost_orthonormal_lower, almost_orthonormal_trials, min_eigenvalue, random_instance, system_growth_check,
    toeplitz, AlmostOrthonormal, FunctionSystem, SystemCheckRow, SystemMember, TrialSummary, FORM_TOL,
};
pub use theorems::{
    cor_reccur_bound, cor_reccur_chain, thm_basis_bound, thm_main_bound, thm_mixing_bound, thm_nonrig_bound,
    ReccurChain,
};
pub use weyl::{weyl_check, WeylRow, WeylTable, MAX_WEYL_N};

use crate::csv::{num, CsvTable};

/// `(n, measured, bound, ok)` rows.
pub fn system_check_csv(rows: &[SystemCheckRow]) -> CsvTable {
    let mut t = CsvTable::new(["n", "measured", "bound", "ok"]);
    for r in rows {
        t.push(vec![r.n.to_string(), num(r.measured), num(r.bound), r.ok.to_string()]);
    }
    t
}
