//! Wide-stencil discretisation of the Bellman operator on unstructured
//! meshes: clipped stencils, unequal-arm second differences evaluated by P1
//! interpolation, the residual with its maximising controls, and the
//! frozen-control Jacobian.

mod discrete;
mod stencil;

pub use discrete::{
    difference_weights, jacobian, residual, sample_nodes, second_difference, DiscreteOperator, LinearizedOperator,
    ResidualResult,
};
pub use stencil::{build_stencils, ArmSlot, ClipMode, Endpoint, StencilArm, StencilTable};
