//! Floor plan geometry and deterministic received-signal computation.
//!
//! Propagation follows a log-distance law with an additive penalty for every
//! wall the straight FAP-to-MS path crosses:
//!
//! ```text
//! loss = ref_loss + 10 * exponent * log10(max(d, min_distance)) + sum(wall attenuation)
//! rssi = tx_power - loss
//! ```
//!
//! There is no fading or shadowing term, so a given geometry always yields
//! the same RSSI.

use thiserror::Error;

use crate::num::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("coordinate is not finite")]
    NonFinite,
    #[error("wall endpoints coincide")]
    DegenerateWall,
    #[error("wall attenuation must be >= 0 dB, got {0}")]
    NegativeAttenuation(f64),
    #[error("floor plan dimensions must be positive, got {width} x {height}")]
    BadBounds { width: f64, height: f64 },
    #[error("wall endpoint ({x}, {y}) lies outside the floor plan")]
    WallOutOfBounds { x: f64, y: f64 },
    #[error("path-loss exponent must be > 0, got {0}")]
    BadExponent(f64),
    #[error("minimum distance must be > 0, got {0}")]
    BadMinDistance(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2D<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Point2D<T> {
    pub fn new(x: T, y: T) -> Self {
        Point2D { x, y }
    }

    pub fn distance(&self, other: &Self) -> T {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Point `t` of the way from `self` to `other`.
    pub fn lerp(&self, other: &Self, t: T) -> Self {
        Point2D::new(
            self.x + (other.x - self.x) * t,
            self.y + (other.y - self.y) * t,
        )
    }
}

/// Signed area of the triangle (p, q, r), doubled. Positive when r is left of p->q.
fn orient<T: Scalar>(p: &Point2D<T>, q: &Point2D<T>, r: &Point2D<T>) -> T {
    (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x)
}

/// Orders the endpoints so every geometric test sees the same operand order
/// whichever way the path is traversed.
fn canonical<T: Scalar>(a: Point2D<T>, b: Point2D<T>) -> (Point2D<T>, Point2D<T>) {
    if (a.x, a.y) <= (b.x, b.y) {
        (a, b)
    } else {
        (b, a)
    }
}

/// An attenuating obstacle between two points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WallSegment<T> {
    pub a: Point2D<T>,
    pub b: Point2D<T>,
    /// Penalty in dB applied once per crossing.
    pub attenuation: T,
}

impl<T: Scalar> WallSegment<T> {
    pub fn new(a: Point2D<T>, b: Point2D<T>, attenuation: T) -> Result<Self, GeometryError> {
        if !a.is_finite() || !b.is_finite() || !attenuation.is_finite() {
            return Err(GeometryError::NonFinite);
        }
        if a == b {
            return Err(GeometryError::DegenerateWall);
        }
        if attenuation < T::zero() {
            return Err(GeometryError::NegativeAttenuation(attenuation.as_f64()));
        }
        Ok(WallSegment { a, b, attenuation })
    }

    /// True when the open path (a, b) passes through this wall. Touching a
    /// wall endpoint counts; grazing along the wall's own line does not.
    pub fn crossed_by(&self, a: Point2D<T>, b: Point2D<T>) -> bool {
        let (p, q) = canonical(a, b);
        if p == q {
            return false;
        }
        let zero = T::zero();
        let side_p = orient(&self.a, &self.b, &p);
        let side_q = orient(&self.a, &self.b, &q);
        let straddles = (side_p > zero && side_q < zero) || (side_p < zero && side_q > zero);
        if !straddles {
            return false;
        }
        let side_wa = orient(&p, &q, &self.a);
        let side_wb = orient(&p, &q, &self.b);
        (side_wa >= zero && side_wb <= zero) || (side_wa <= zero && side_wb >= zero)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FloorPlan<T> {
    pub width: T,
    pub height: T,
    pub walls: Vec<WallSegment<T>>,
}

impl<T: Scalar> FloorPlan<T> {
    pub fn new(width: T, height: T, walls: Vec<WallSegment<T>>) -> Result<Self, GeometryError> {
        if !width.is_finite() || !height.is_finite() {
            return Err(GeometryError::NonFinite);
        }
        if width <= T::zero() || height <= T::zero() {
            return Err(GeometryError::BadBounds {
                width: width.as_f64(),
                height: height.as_f64(),
            });
        }
        let plan = FloorPlan {
            width,
            height,
            walls: Vec::new(),
        };
        for wall in &walls {
            for p in [wall.a, wall.b] {
                if !plan.contains(&p) {
                    return Err(GeometryError::WallOutOfBounds {
                        x: p.x.as_f64(),
                        y: p.y.as_f64(),
                    });
                }
            }
        }
        Ok(FloorPlan { walls, ..plan })
    }

    pub fn contains(&self, p: &Point2D<T>) -> bool {
        p.is_finite()
            && p.x >= T::zero()
            && p.y >= T::zero()
            && p.x <= self.width
            && p.y <= self.height
    }

    /// Projects `p` onto the plan rectangle.
    pub fn clamp(&self, p: Point2D<T>) -> Point2D<T> {
        Point2D::new(
            p.x.max(T::zero()).min(self.width),
            p.y.max(T::zero()).min(self.height),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationParams<T> {
    /// Transmit power in dBm.
    pub tx_power: T,
    /// Loss at the 1 m reference distance, dB.
    pub ref_loss: T,
    pub exponent: T,
    /// Distances below this are clamped, meters.
    pub min_distance: T,
}

impl<T: Scalar> PropagationParams<T> {
    pub fn new(tx_power: T, ref_loss: T, exponent: T, min_distance: T) -> Result<Self, GeometryError> {
        if !tx_power.is_finite() || !ref_loss.is_finite() {
            return Err(GeometryError::NonFinite);
        }
        if !(exponent > T::zero()) || !exponent.is_finite() {
            return Err(GeometryError::BadExponent(exponent.as_f64()));
        }
        if !(min_distance > T::zero()) || !min_distance.is_finite() {
            return Err(GeometryError::BadMinDistance(min_distance.as_f64()));
        }
        Ok(PropagationParams {
            tx_power,
            ref_loss,
            exponent,
            min_distance,
        })
    }

    pub fn with_tx_power(self, tx_power: T) -> Self {
        PropagationParams { tx_power, ..self }
    }
}

impl<T: Scalar> Default for PropagationParams<T> {
    fn default() -> Self {
        PropagationParams {
            tx_power: T::lit(10.0),
            ref_loss: T::lit(37.0),
            exponent: T::lit(3.0),
            min_distance: T::lit(0.5),
        }
    }
}

/// Walls crossed by the segment from `a` to `b`, in floor plan order.
pub fn wall_crossings<'p, T: Scalar>(
    a: Point2D<T>,
    b: Point2D<T>,
    plan: &'p FloorPlan<T>,
) -> Vec<&'p WallSegment<T>> {
    plan.walls.iter().filter(|w| w.crossed_by(a, b)).collect()
}

/// Total wall attenuation along a -> b, dB.
pub fn wall_loss<T: Scalar>(a: Point2D<T>, b: Point2D<T>, plan: &FloorPlan<T>) -> T {
    plan.walls
        .iter()
        .filter(|w| w.crossed_by(a, b))
        .fold(T::zero(), |acc, w| acc + w.attenuation)
}

pub fn path_loss<T: Scalar>(
    a: Point2D<T>,
    b: Point2D<T>,
    plan: &FloorPlan<T>,
    params: &PropagationParams<T>,
) -> T {
    let d = a.distance(&b).max(params.min_distance);
    params.ref_loss + T::lit(10.0) * params.exponent * d.log10() + wall_loss(a, b, plan)
}

/// Received power at `ms_pos` from a transmitter at `fap_pos`, dBm.
pub fn rssi<T: Scalar>(
    fap_pos: Point2D<T>,
    ms_pos: Point2D<T>,
    plan: &FloorPlan<T>,
    params: &PropagationParams<T>,
) -> T {
    params.tx_power - path_loss(fap_pos, ms_pos, plan, params)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-9
    }

    fn p(x: f64, y: f64) -> Point2D<f64> {
        Point2D::new(x, y)
    }

    fn wall(x1: f64, y1: f64, x2: f64, y2: f64, att: f64) -> WallSegment<f64> {
        WallSegment::new(p(x1, y1), p(x2, y2), att).unwrap()
    }

    fn open_plan() -> FloorPlan<f64> {
        FloorPlan::new(20.0, 20.0, vec![]).unwrap()
    }

    #[test]
    fn zero_length_segment_crosses_nothing() {
        let plan = FloorPlan::new(4.0, 4.0, vec![wall(0.0, 1.0, 2.0, 1.0, 10.0)]).unwrap();
        assert!(wall_crossings(p(1.0, 1.0), p(1.0, 1.0), &plan).is_empty());
    }

    #[test]
    fn orthogonal_crossing() {
        let plan = FloorPlan::new(4.0, 2.0, vec![wall(2.0, 0.0, 2.0, 2.0, 10.0)]).unwrap();
        let hits = wall_crossings(p(0.0, 1.0), p(4.0, 1.0), &plan);
        assert_eq!(hits, vec![&plan.walls[0]]);
    }

    #[test]
    fn endpoint_touch_counts() {
        let plan = FloorPlan::new(4.0, 4.0, vec![wall(2.0, 1.0, 2.0, 3.0, 10.0)]).unwrap();
        assert_eq!(wall_crossings(p(0.0, 1.0), p(4.0, 1.0), &plan).len(), 1);
        assert_eq!(wall_crossings(p(0.0, 0.5), p(4.0, 0.5), &plan).len(), 0);
    }

    #[test]
    fn collinear_path_does_not_cross() {
        let plan = FloorPlan::new(10.0, 10.0, vec![wall(2.0, 2.0, 6.0, 2.0, 10.0)]).unwrap();
        assert!(wall_crossings(p(0.0, 2.0), p(10.0, 2.0), &plan).is_empty());
    }

    #[test]
    fn staggered_walls_on_diagonal() {
        let plan = FloorPlan::new(
            10.0,
            10.0,
            vec![
                wall(1.0, 3.0, 3.0, 1.0, 5.0),
                wall(4.0, 6.0, 6.0, 4.0, 5.0),
                wall(7.0, 9.0, 9.0, 7.0, 5.0),
                wall(0.0, 9.0, 3.0, 9.0, 5.0),
            ],
        )
        .unwrap();
        let hits = wall_crossings(p(0.0, 0.0), p(10.0, 10.0), &plan);
        assert_eq!(hits.len(), 3);
        assert!(!hits.contains(&&plan.walls[3]));
    }

    #[test]
    fn path_loss_reference_values() {
        let params = PropagationParams::new(10.0, 37.0, 3.0, 0.5).unwrap();
        let plan = open_plan();
        assert!(close(path_loss(p(0.0, 0.0), p(1.0, 0.0), &plan, &params), 37.0));
        assert!(close(path_loss(p(0.0, 0.0), p(10.0, 0.0), &plan, &params), 67.0));
        let walled = FloorPlan::new(20.0, 20.0, vec![wall(5.0, 0.0, 5.0, 5.0, 10.0)]).unwrap();
        assert!(close(path_loss(p(0.0, 1.0), p(10.0, 1.0), &walled, &params), 77.0));
    }

    #[test]
    fn rssi_reference_values() {
        let params = PropagationParams::new(10.0, 37.0, 3.0, 0.5).unwrap();
        let plan = open_plan();
        assert!(close(rssi(p(0.0, 0.0), p(1.0, 0.0), &plan, &params), -27.0));
        assert!(close(rssi(p(0.0, 1.0), p(10.0, 1.0), &plan, &params), -57.0));
        let walled = FloorPlan::new(20.0, 20.0, vec![wall(5.0, 0.0, 5.0, 5.0, 10.0)]).unwrap();
        assert!(close(rssi(p(0.0, 1.0), p(10.0, 1.0), &walled, &params), -67.0));
    }

    #[test]
    fn distance_is_clamped() {
        let params = PropagationParams::<f64>::default();
        let plan = open_plan();
        let at_zero = path_loss(p(3.0, 3.0), p(3.0, 3.0), &plan, &params);
        let at_min = path_loss(p(3.0, 3.0), p(3.5, 3.0), &plan, &params);
        assert!(at_zero.is_finite());
        assert_eq!(at_zero, at_min);
    }

    #[test]
    fn invalid_inputs_rejected() {
        assert_eq!(
            WallSegment::new(p(1.0, 1.0), p(1.0, 1.0), 3.0),
            Err(GeometryError::DegenerateWall)
        );
        assert!(matches!(
            WallSegment::new(p(0.0, 0.0), p(1.0, 1.0), -1.0),
            Err(GeometryError::NegativeAttenuation(_))
        ));
        assert!(FloorPlan::<f64>::new(0.0, 5.0, vec![]).is_err());
        assert!(matches!(
            FloorPlan::new(5.0, 5.0, vec![wall(0.0, 0.0, 6.0, 1.0, 1.0)]),
            Err(GeometryError::WallOutOfBounds { .. })
        ));
        assert!(PropagationParams::new(10.0, 37.0, 0.0, 0.5).is_err());
        assert!(PropagationParams::new(10.0, 37.0, 3.0, 0.0).is_err());
    }

    #[test]
    fn works_in_single_precision() {
        let params = PropagationParams::<f32>::new(10.0, 37.0, 3.0, 0.5).unwrap();
        let plan = FloorPlan::<f32>::new(20.0, 20.0, vec![]).unwrap();
        let r = rssi(Point2D::new(0.0f32, 1.0), Point2D::new(10.0, 1.0), &plan, &params);
        assert!((r + 57.0).abs() < 1e-4);
    }
}
