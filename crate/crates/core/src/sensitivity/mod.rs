//! Variance-based (Sobol) and one-factor-at-a-time sensitivity analysis.

mod design;
mod indices;
mod ofat;
mod sobol;

pub use design::{saltelli_design, FactorBox, RowKind, SobolDesign};
pub use indices::{sobol_indices, BootstrapConfig, IndexEstimate, PairIndex, SensitivityResult};
pub use ofat::{correlation_p_value, ofat_sweep, pearson, OfatResult, SIGNIFICANCE_LEVEL};
pub use sobol::{sobol_sequence, SobolSequence, MAX_DIMENSION};
