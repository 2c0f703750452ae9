//! Simple, double and triple cusp-surgery spaces and the order arithmetic of
//! the calculus, computed by pushing index families through the fixtures.

mod fixture;
mod orders;

use thiserror::Error;

use crate::corners::CornersError;
use crate::Rational;

pub use fixture::{build_fixture, fixture, InvariantCheck, SurgeryFixture};
pub use orders::{
    composition_orders, composition_trace, kernel_index_family, mapping_orders, mapping_trace,
    parametrix_orders, trace_expansion_terms, trace_index_set, trace_set_closed_form,
    CompositionTrace, MappingTrace, OpOrders,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurgeryError {
    #[error(transparent)]
    Corners(#[from] CornersError),
    #[error("not trace class: need alpha < -1 and beta <= 0, got alpha = {alpha}, beta = {beta}")]
    TraceClassViolated { alpha: Rational, beta: Rational },
    #[error("index set at `{0}` is empty, no leading order")]
    EmptyLeadingOrder(String),
}
