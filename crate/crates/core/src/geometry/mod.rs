//! Planar geometry: points, the domain polygon with membership and ray
//! clipping, and the benchmark domain families.

mod domains;
mod io;
mod point;
mod polygon;

pub use domains::{build_domain, concave_bent_radius, convex_bent_radius, DomainSpec, MIN_ARC_SEGMENTS};
pub use io::{read_polygon, write_polygon};
pub(crate) use point::BucketGrid;
pub use point::{segment_distance, Aabb, Point2};
pub use polygon::{signed_area, Containment, DomainPolygon};
