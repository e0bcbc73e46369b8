//! Triangular meshes: generation, uniform refinement, point location and P1
//! interpolation.

mod generate;
mod io;
mod refine;
mod structured;
mod trimesh;

pub use generate::{generate_mesh, MIN_ANGLE_DEG};
pub use io::{read_mesh, write_mesh};
pub use refine::refine_uniform;
pub use structured::lattice_mesh;
pub use trimesh::{InterpolationStencil, TriMesh, LOCATE_TOL};
