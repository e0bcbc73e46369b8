//! Wide-stencil finite differences for the two-dimensional Monge-Ampere
//! equation `det D^2 u = (f/2)^2`, posed as the Bellman problem
//! `sup_B (-B : D^2 u + f sqrt(det B)) = 0` over unit-trace positive
//! semidefinite `B`, on unstructured triangle meshes of polygonal domains.
//!
//! The numerical core is generic over the scalar type ([`Real`], implemented
//! for `f32` and `f64`); the aliases below fix it to `f64`, which is what the
//! benchmark catalog in [`experiments`] uses.

// `!(x > 0)` guards deliberately reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bellman;
mod error;
pub mod experiments;
pub mod geometry;
pub mod mesh;
pub mod operator;
mod scalar;
pub mod solver;
pub mod sparse;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Point = geometry::Point2<f64>;
pub type Polygon = geometry::DomainPolygon<f64>;
pub type Mesh = mesh::TriMesh<f64>;
pub type Directions = bellman::DirectionSet<f64>;
pub type Matrix2 = bellman::SymMatrix2<f64>;
pub type Stencils = operator::StencilTable<f64>;
pub type Operator = operator::DiscreteOperator<f64>;
pub type Newton = solver::NewtonConfig<f64>;
pub type Report = solver::NewtonReport<f64>;
