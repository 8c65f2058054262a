//! Planar geometry and the geographic relay-selection metric.
//!
//! Everything here is a pure value-level computation: progress
//! classification and sub-area indexing for contention forwarding, the
//! Gabriel proximity test used by planarization, Reuleaux candidate regions
//! for relay election, and the weighted two-anchor metric
//! `f(x) = A^2 d(x,S)^p + B d(x,D)^p` together with its optimum and its
//! `[0,1]` mapping.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance for geometric comparisons.
pub const GEOM_EPS: f64 = 1e-9;

/// A position in the plane, in meters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point2D {
    pub x: f64,
    pub y: f64,
}

impl Point2D {
    pub fn new(x: f64, y: f64) -> Self {
        debug_assert!(x.is_finite() && y.is_finite());
        Self { x, y }
    }

    #[inline]
    pub fn distance_to(self, other: Point2D) -> f64 {
        distance(self, other)
    }
}

/// Euclidean distance between two points.
#[inline]
pub fn distance(a: Point2D, b: Point2D) -> f64 {
    (a.x - b.x).hypot(a.y - b.y)
}

/// Where a candidate sits relative to the sender's coverage disk and the
/// destination: closer than the sender (positive progress), farther
/// (negative progress), or simply out of range.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProgressClass {
    Ppa,
    Npa,
    OutOfRange,
}

/// Classify a candidate forwarder.
///
/// `OutOfRange` if the candidate is beyond `range` from the source, `Ppa`
/// if it is strictly closer to the destination than the source is, `Npa`
/// otherwise.
pub fn classify_progress(src: Point2D, dst: Point2D, cand: Point2D, range: f64) -> ProgressClass {
    debug_assert!(range > 0.0);
    if distance(src, cand) > range {
        ProgressClass::OutOfRange
    } else if distance(cand, dst) < distance(src, dst) {
        ProgressClass::Ppa
    } else {
        ProgressClass::Npa
    }
}

/// Normalized progress deficit of a candidate, in `[0, 1]`.
///
/// Zero means maximal progress (a candidate on the range circle straight
/// toward the destination), one means maximal negative progress. The
/// sub-area index is the floor of `nsa` times this fraction, and the
/// jitter-free contention timer is `t_max` times it.
pub fn progress_fraction(src: Point2D, dst: Point2D, cand: Point2D, range: f64) -> f64 {
    debug_assert!(range > 0.0);
    let progress = distance(src, dst) - distance(cand, dst);
    let frac = (range - progress) / (2.0 * range);
    frac.clamp(0.0, 1.0)
}

/// Common sub-area index of an in-range candidate: `floor(nsa * (r - progress) / 2r)`
/// clamped to `[0, nsa - 1]`. Index 0 is the sub-area closest to the
/// destination, `nsa - 1` the farthest.
pub fn csa_index(src: Point2D, dst: Point2D, cand: Point2D, range: f64, nsa: u32) -> Result<u32> {
    if nsa == 0 {
        return Err(Error::ZeroSubAreas);
    }
    let idx = (f64::from(nsa) * progress_fraction(src, dst, cand, range)).floor() as u32;
    Ok(idx.min(nsa - 1))
}

/// Gabriel proximity test: is `q` strictly inside the circle whose diameter
/// is the segment `a`-`b`? Boundary points are outside, so ties keep edges.
pub fn in_gabriel_region(a: Point2D, b: Point2D, q: Point2D) -> bool {
    debug_assert!(distance(a, b) > 0.0);
    let mid = Point2D::new(0.5 * (a.x + b.x), 0.5 * (a.y + b.y));
    distance(q, mid) < 0.5 * distance(a, b)
}

/// Relay candidate region: a Reuleaux triangle built on the sender, the
/// next hop and the equilateral third vertex. Every two points of the
/// region are within `side` of each other, so all candidates inside it can
/// hear each other's control frames.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReuleauxRegion {
    pub v1: Point2D,
    pub v2: Point2D,
    pub v3: Point2D,
    pub side: f64,
}

/// Build the Reuleaux region on `src` and `nexthop`. With `upper` the third
/// vertex lies to the left of the directed segment src -> nexthop (a +60
/// degree rotation about `src`), otherwise to the right.
pub fn reuleaux_region(src: Point2D, nexthop: Point2D, upper: bool) -> Result<ReuleauxRegion> {
    let side = distance(src, nexthop);
    if side <= 0.0 {
        return Err(Error::CoincidentPoints);
    }
    let angle = if upper {
        std::f64::consts::FRAC_PI_3
    } else {
        -std::f64::consts::FRAC_PI_3
    };
    let (sin, cos) = angle.sin_cos();
    let dx = nexthop.x - src.x;
    let dy = nexthop.y - src.y;
    let v3 = Point2D::new(src.x + dx * cos - dy * sin, src.y + dx * sin + dy * cos);
    Ok(ReuleauxRegion {
        v1: src,
        v2: nexthop,
        v3,
        side,
    })
}

/// Membership in the region: within `side` of all three vertices, with the
/// usual tolerance on the boundary.
pub fn reuleaux_contains(region: &ReuleauxRegion, q: Point2D) -> bool {
    let bound = region.side + GEOM_EPS;
    distance(q, region.v1) <= bound
        && distance(q, region.v2) <= bound
        && distance(q, region.v3) <= bound
}

impl ReuleauxRegion {
    #[inline]
    pub fn contains(&self, q: Point2D) -> bool {
        reuleaux_contains(self, q)
    }

    fn vertices(&self) -> [Point2D; 3] {
        [self.v1, self.v2, self.v3]
    }
}

/// Weights of the relay metric. `a_squared` multiplies the distance to the
/// sender, `b` the distance to the destination; both come from the
/// modulation-dependent error constants. `p` is the propagation exponent.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelayMetricParams {
    pub a_squared: f64,
    pub b: f64,
    pub p: f64,
}

impl RelayMetricParams {
    pub fn new(a_squared: f64, b: f64, p: f64) -> Result<Self> {
        if !(a_squared > 0.0) || !(b > 0.0) || !(p >= 2.0) {
            return Err(Error::InvalidConfig(format!(
                "relay metric params need a_squared > 0, b > 0, p >= 2 (got {a_squared}, {b}, {p})"
            )));
        }
        Ok(Self { a_squared, b, p })
    }
}

/// The relay metric `A^2 d(x, src)^p + B d(x, dst)^p`. Smaller is better.
pub fn relay_metric(x: Point2D, src: Point2D, dst: Point2D, params: &RelayMetricParams) -> f64 {
    params.a_squared * distance(x, src).powf(params.p) + params.b * distance(x, dst).powf(params.p)
}

/// Closed-form unconstrained minimizer of the relay metric for `p = 2`:
/// the weighted barycenter `(A^2 src + B dst) / (A^2 + B)`.
pub fn optimal_relay_point(
    src: Point2D,
    dst: Point2D,
    params: &RelayMetricParams,
) -> Result<Point2D> {
    if (params.p - 2.0).abs() > 1e-12 {
        return Err(Error::ClosedFormRequiresSquare(params.p));
    }
    let w = params.a_squared + params.b;
    Ok(Point2D::new(
        (params.a_squared * src.x + params.b * dst.x) / w,
        (params.a_squared * src.y + params.b * dst.y) / w,
    ))
}

/// Numeric minimizer of the relay metric for any exponent.
///
/// The metric is convex and symmetric across the src-dst line, so its
/// minimum lies on the segment between the two anchors; a golden-section
/// search along that segment finds it.
pub fn min_metric_point(src: Point2D, dst: Point2D, params: &RelayMetricParams) -> Point2D {
    let at = |t: f64| Point2D::new(src.x + t * (dst.x - src.x), src.y + t * (dst.y - src.y));
    let (t, _) = golden_min(|t| relay_metric(at(t), src, dst, params), 0.0, 1.0, 1e-12);
    at(t)
}

/// Map a metric value affinely onto `[0, 1]`: 0 at the optimum, 1 at the
/// region maximum.
pub fn map_metric(f_val: f64, f_star: f64, f_max: f64) -> Result<f64> {
    if !(f_max > f_star) {
        return Err(Error::DegenerateMetricRange { f_star, f_max });
    }
    Ok(((f_val - f_star) / (f_max - f_star)).clamp(0.0, 1.0))
}

/// Maximum of the relay metric over a Reuleaux region.
///
/// The metric is convex and the region is convex and compact, so the
/// maximum sits on the boundary. Each of the three arcs is sampled densely
/// (1e-3 of its length) and the best bracket is refined by golden-section
/// search to 1e-9 relative tolerance.
pub fn f_max_over_region(
    region: &ReuleauxRegion,
    src: Point2D,
    dst: Point2D,
    params: &RelayMetricParams,
) -> f64 {
    let vs = region.vertices();
    let mut best = f64::NEG_INFINITY;
    for i in 0..3 {
        let center = vs[i];
        let from = vs[(i + 1) % 3];
        let to = vs[(i + 2) % 3];
        let th0 = (from.y - center.y).atan2(from.x - center.x);
        let th1 = (to.y - center.y).atan2(to.x - center.x);
        // Sweep the short way round; Reuleaux arcs span 60 degrees.
        let mut dth = th1 - th0;
        while dth > std::f64::consts::PI {
            dth -= 2.0 * std::f64::consts::PI;
        }
        while dth < -std::f64::consts::PI {
            dth += 2.0 * std::f64::consts::PI;
        }
        let at = |th: f64| {
            Point2D::new(
                center.x + region.side * th.cos(),
                center.y + region.side * th.sin(),
            )
        };
        let eval = |t: f64| relay_metric(at(th0 + t * dth), src, dst, params);

        const SAMPLES: usize = 1000;
        let mut best_t = 0.0;
        let mut best_f = f64::NEG_INFINITY;
        for k in 0..=SAMPLES {
            let t = k as f64 / SAMPLES as f64;
            let f = eval(t);
            if f > best_f {
                best_f = f;
                best_t = t;
            }
        }
        let lo = (best_t - 1.0 / SAMPLES as f64).max(0.0);
        let hi = (best_t + 1.0 / SAMPLES as f64).min(1.0);
        let (_, refined) = golden_min(|t| -eval(t), lo, hi, 1e-9);
        best = best.max(-refined).max(best_f);
    }
    best
}

/// Golden-section minimization of a unimodal function on `[a, b]`.
/// Returns the abscissa and value of the minimum. `tol` is relative to the
/// interval width.
pub(crate) fn golden_min<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    const INVPHI: f64 = 0.618_033_988_749_894_8;
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - INVPHI * (hi - lo);
    let mut x2 = lo + INVPHI * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    let span = (b - a).abs().max(1.0);
    while (hi - lo).abs() > tol * span {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INVPHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INVPHI * (hi - lo);
            f2 = f(x2);
        }
    }
    let xm = 0.5 * (lo + hi);
    (xm, f(xm))
}
