//! Constructors for the benchmark domain families.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use super::point::Point2;
use super::polygon::DomainPolygon;
use crate::{Error, Real, Result};

/// Minimum number of segments a curved boundary arc must be split into.
pub const MIN_ARC_SEGMENTS: usize = 8;

/// Analytic domain families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DomainSpec {
    /// `[(0,1)x(-1,1)] U [(-1,1)x(0,1)]`.
    LShape,
    /// Unit disc united with the unit square `(0,1)^2`.
    DiscUnionSquare,
    /// Two half-discs of radius 1/2 on the right, unit half-disc on the left;
    /// inward cusp at the origin.
    Heart,
    /// Intersection of four discs centred `(+-c,0), (0,+-c)` through the square's corners.
    BentSquareConvex { c: f64 },
    /// `[-1,1]^2` minus four discs centred `(+-c,0), (0,+-c)` through adjacent corners.
    BentSquareConcave { c: f64 },
    /// `[-1,1]^2`.
    Square,
    /// `(0,1)^2`.
    UnitSquareTest,
}

impl DomainSpec {
    pub fn family_name(&self) -> &'static str {
        match self {
            DomainSpec::LShape => "lshape",
            DomainSpec::DiscUnionSquare => "disc-square",
            DomainSpec::Heart => "heart",
            DomainSpec::BentSquareConvex { .. } => "bent-square-convex",
            DomainSpec::BentSquareConcave { .. } => "bent-square-concave",
            DomainSpec::Square => "square",
            DomainSpec::UnitSquareTest => "unit-square",
        }
    }

    /// Parses a family name; `c` is required for the bent-square families.
    pub fn from_name(name: &str, c: Option<f64>) -> Result<Self> {
        let need_c = || c.ok_or_else(|| Error::InvalidArgument(format!("domain `{name}` needs parameter c")));
        let spec = match name {
            "lshape" | "l-shape" | "l_shape" => DomainSpec::LShape,
            "disc-square" | "disc_union_square" => DomainSpec::DiscUnionSquare,
            "heart" => DomainSpec::Heart,
            "bent-square-convex" | "bent_square_convex" => DomainSpec::BentSquareConvex { c: need_c()? },
            "bent-square-concave" | "bent_square_concave" => DomainSpec::BentSquareConcave { c: need_c()? },
            "square" => DomainSpec::Square,
            "unit-square" | "unit_square_test" => DomainSpec::UnitSquareTest,
            other => return Err(Error::UnknownFamily(other.to_string())),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            DomainSpec::BentSquareConvex { c } | DomainSpec::BentSquareConcave { c } if !(c > 1.0) => Err(
                Error::InvalidArgument(format!("bent-square parameter c must exceed 1, got {c}")),
            ),
            _ => Ok(()),
        }
    }

    /// Names accepted by [`DomainSpec::from_name`].
    pub fn family_names() -> &'static [&'static str] {
        &[
            "lshape",
            "disc-square",
            "heart",
            "bent-square-convex",
            "bent-square-concave",
            "square",
            "unit-square",
        ]
    }
}

impl fmt::Display for DomainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainSpec::BentSquareConvex { c } | DomainSpec::BentSquareConcave { c } => {
                write!(f, "{}-c{}", self.family_name(), c)
            }
            _ => f.write_str(self.family_name()),
        }
    }
}

impl FromStr for DomainSpec {
    type Err = Error;

    /// Accepts `name` or `name-c<value>` as produced by `Display`.
    fn from_str(s: &str) -> Result<Self> {
        if let Some((head, c)) = s.rsplit_once("-c") {
            if let Ok(c) = c.parse::<f64>() {
                return DomainSpec::from_name(head, Some(c));
            }
        }
        DomainSpec::from_name(s, None)
    }
}

/// Radius of the circles centred at distance `c` whose intersection is the
/// convex bent square: they pass through the two far corners.
pub fn convex_bent_radius(c: f64) -> f64 {
    ((c + 1.0).powi(2) + 1.0).sqrt()
}

/// Radius of the carving circles of the concave bent square: they pass through
/// the two near corners.
pub fn concave_bent_radius(c: f64) -> f64 {
    ((c - 1.0).powi(2) + 1.0).sqrt()
}

/// Appends the interior samples of a circular arc from `start` to `end`
/// (both excluded) at arc-length step at most `h`.
fn push_arc<T: Real>(
    out: &mut Vec<Point2<T>>,
    center: (f64, f64),
    start: (f64, f64),
    end: (f64, f64),
    ccw: bool,
    h: f64,
) -> Result<()> {
    let r = (start.0 - center.0).hypot(start.1 - center.1);
    let a0 = (start.1 - center.1).atan2(start.0 - center.0);
    let mut a1 = (end.1 - center.1).atan2(end.0 - center.0);
    if ccw {
        while a1 <= a0 {
            a1 += 2.0 * PI;
        }
    } else {
        while a1 >= a0 {
            a1 -= 2.0 * PI;
        }
    }
    let sweep = (a1 - a0).abs();
    let segments = (sweep * r / h).ceil() as usize;
    if segments < MIN_ARC_SEGMENTS {
        return Err(Error::SamplingTooCoarse { samples: segments });
    }
    for k in 1..segments {
        let a = a0 + (a1 - a0) * (k as f64) / (segments as f64);
        out.push(Point2::from_f64(center.0 + r * a.cos(), center.1 + r * a.sin()));
    }
    Ok(())
}

/// Builds the polygonal computational domain for `spec`, sampling curved
/// boundary pieces at arc-length step `sampling_h`.
pub fn build_domain<T: Real>(spec: DomainSpec, sampling_h: f64) -> Result<DomainPolygon<T>> {
    spec.validate()?;
    if !(sampling_h > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "sampling_h must be positive, got {sampling_h}"
        )));
    }
    let h = sampling_h;
    let p = |x: f64, y: f64| Point2::<T>::from_f64(x, y);
    let mut v: Vec<Point2<T>> = Vec::new();
    match spec {
        DomainSpec::LShape => {
            v.extend([p(1., -1.), p(1., 1.), p(-1., 1.), p(-1., 0.), p(0., 0.), p(0., -1.)]);
        }
        DomainSpec::Square => v.extend([p(-1., -1.), p(1., -1.), p(1., 1.), p(-1., 1.)]),
        DomainSpec::UnitSquareTest => v.extend([p(0., 0.), p(1., 0.), p(1., 1.), p(0., 1.)]),
        DomainSpec::DiscUnionSquare => {
            v.extend([p(1., 0.), p(1., 1.), p(0., 1.)]);
            push_arc(&mut v, (0., 0.), (0., 1.), (1., 0.), true, h)?;
        }
        DomainSpec::Heart => {
            v.push(p(0., 0.));
            push_arc(&mut v, (0., 0.5), (0., 0.), (0., 1.), true, h)?;
            v.push(p(0., 1.));
            push_arc(&mut v, (0., 0.), (0., 1.), (0., -1.), true, h)?;
            v.push(p(0., -1.));
            push_arc(&mut v, (0., -0.5), (0., -1.), (0., 0.), true, h)?;
        }
        DomainSpec::BentSquareConvex { c } => {
            // each face is the arc of the circle centred on the opposite side
            let faces = [
                ((-c, 0.), (1., -1.), (1., 1.)),
                ((0., -c), (1., 1.), (-1., 1.)),
                ((c, 0.), (-1., 1.), (-1., -1.)),
                ((0., c), (-1., -1.), (1., -1.)),
            ];
            for (centre, a, b) in faces {
                v.push(p(a.0, a.1));
                push_arc(&mut v, centre, a, b, true, h)?;
            }
        }
        DomainSpec::BentSquareConcave { c } => {
            let faces = [
                ((c, 0.), (1., -1.), (1., 1.)),
                ((0., c), (1., 1.), (-1., 1.)),
                ((-c, 0.), (-1., 1.), (-1., -1.)),
                ((0., -c), (-1., -1.), (1., -1.)),
            ];
            for (centre, a, b) in faces {
                v.push(p(a.0, a.1));
                push_arc(&mut v, centre, a, b, false, h)?;
            }
        }
    }
    DomainPolygon::new(v, spec.to_string(), T::lit(sampling_h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Containment;

    #[test]
    fn lshape_is_exact() {
        let poly = build_domain::<f64>(DomainSpec::LShape, 0.3).unwrap();
        let expect = [(1., -1.), (1., 1.), (-1., 1.), (-1., 0.), (0., 0.), (0., -1.)];
        assert_eq!(poly.len(), 6);
        for (v, e) in poly.vertices().iter().zip(expect) {
            assert_eq!((v.x, v.y), e);
        }
        assert_eq!(poly.area(), 3.0);
        assert_eq!(poly.contains(Point2::new(-0.5, -0.5)), Containment::Exterior);
    }

    #[test]
    fn square_is_exact() {
        let poly = build_domain::<f64>(DomainSpec::Square, 10.0).unwrap();
        assert_eq!(poly.len(), 4);
        assert_eq!(poly.area(), 4.0);
    }

    #[test]
    fn bent_radii_pass_through_corners() {
        for c in [1.5, 3.0, 10.0, 100.0] {
            let r = convex_bent_radius(c);
            // far corners of the circle centred (c, 0)
            assert!(((-1.0 - c).hypot(1.0) - r).abs() < 1e-12);
            assert!(((-1.0 - c).hypot(-1.0) - r).abs() < 1e-12);
            // origin must be strictly inside for a nonempty intersection
            assert!(c < r);
            let rho = concave_bent_radius(c);
            assert!(((1.0 - c).hypot(1.0) - rho).abs() < 1e-12);
            assert!(((1.0 - c).hypot(-1.0) - rho).abs() < 1e-12);
            assert!(c - rho < 1.0);
        }
        assert_eq!(convex_bent_radius(3.0), 17f64.sqrt());
        assert_eq!(concave_bent_radius(3.0), 5f64.sqrt());
    }

    #[test]
    fn curved_vertices_lie_on_their_circles() {
        let h = 0.05;
        let poly = build_domain::<f64>(DomainSpec::Heart, h).unwrap();
        for v in poly.vertices() {
            let on_big = (v.norm() - 1.0).abs() < 1e-12 && v.x <= 1e-12;
            let on_up = (v.dist(Point2::new(0.0, 0.5)) - 0.5).abs() < 1e-12;
            let on_dn = (v.dist(Point2::new(0.0, -0.5)) - 0.5).abs() < 1e-12;
            assert!(on_big || on_up || on_dn, "{v:?}");
        }
        for c in [3.0, 10.0] {
            let poly = build_domain::<f64>(DomainSpec::BentSquareConcave { c }, h).unwrap();
            let rho = concave_bent_radius(c);
            for v in poly.vertices() {
                let centres = [(c, 0.0), (-c, 0.0), (0.0, c), (0.0, -c)];
                assert!(centres
                    .iter()
                    .any(|&(x, y)| (v.dist(Point2::new(x, y)) - rho).abs() < 1e-12));
            }
        }
    }

    #[test]
    fn bent_convex_is_convex() {
        for c in [3.0, 10.0, 100.0] {
            let poly = build_domain::<f64>(DomainSpec::BentSquareConvex { c }, 0.05).unwrap();
            assert!(poly.is_convex(1e-12), "c = {c}");
            assert!(poly.area() > 4.0);
        }
        let concave = build_domain::<f64>(DomainSpec::BentSquareConcave { c: 3.0 }, 0.05).unwrap();
        assert!(!concave.is_convex(1e-12));
        assert!(concave.area() < 4.0);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            DomainSpec::from_name("triangle", None),
            Err(Error::UnknownFamily(_))
        ));
        assert!(build_domain::<f64>(DomainSpec::BentSquareConvex { c: 1.0 }, 0.1).is_err());
        assert!(build_domain::<f64>(DomainSpec::BentSquareConcave { c: 0.5 }, 0.1).is_err());
        assert!(matches!(
            build_domain::<f64>(DomainSpec::Heart, 0.5),
            Err(Error::SamplingTooCoarse { .. })
        ));
        assert!(build_domain::<f64>(DomainSpec::Square, 0.0).is_err());
    }

    #[test]
    fn spec_display_roundtrip() {
        for s in [
            DomainSpec::LShape,
            DomainSpec::BentSquareConcave { c: 10.0 },
            DomainSpec::BentSquareConvex { c: 3.0 },
        ] {
            assert_eq!(s.to_string().parse::<DomainSpec>().unwrap(), s);
        }
    }
}
