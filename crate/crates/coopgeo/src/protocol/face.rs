//! Right-hand-rule face traversal over the planarized neighborhood.
//!
//! Recovery walks the faces of the local Gabriel subgraph: at each node the
//! next edge is the first one counterclockwise from the direction back to
//! the previous node (or from the destination direction on entry). When the
//! candidate edge crosses the segment from the recovery entry point to the
//! destination at a point strictly closer than the best crossing so far,
//! the walk switches faces and re-sweeps from the destination direction.
//! The episode aborts if it would retraverse a directed edge.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::geometry::{distance, Point2D, GEOM_EPS};
use crate::protocol::bfp::PlanarNeighborhood;
use crate::simcore::topology::{NodeId, Topology};

/// Where a recovery episode started.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RecoveryEntry {
    pub point: Point2D,
    pub distance: f64,
}

/// Face-traversal bookkeeping for one recovery episode.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FaceState {
    /// The node the packet arrived from, if any.
    pub incoming: Option<NodeId>,
    /// Distance to destination of the best crossing found on the
    /// entry-destination segment.
    pub crossing_distance: f64,
    /// Directed edges already traversed in this episode.
    pub traversed: BTreeSet<(NodeId, NodeId)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RoutingMode {
    Greedy,
    Recovery,
}

/// Per-route forwarding state: greedy by default, face traversal while
/// recovering from a local optimum.
#[derive(Clone, Debug, PartialEq)]
pub struct RoutingState {
    pub mode: RoutingMode,
    pub recovery_entry: Option<RecoveryEntry>,
    pub face: FaceState,
}

impl Default for RoutingState {
    fn default() -> Self {
        Self::new()
    }
}

impl RoutingState {
    pub fn new() -> Self {
        Self {
            mode: RoutingMode::Greedy,
            recovery_entry: None,
            face: FaceState::default(),
        }
    }

    pub fn enter_recovery(&mut self, at: Point2D, distance_to_dst: f64) {
        self.mode = RoutingMode::Recovery;
        self.recovery_entry = Some(RecoveryEntry {
            point: at,
            distance: distance_to_dst,
        });
        self.face = FaceState {
            incoming: None,
            crossing_distance: distance_to_dst,
            traversed: BTreeSet::new(),
        };
    }

    pub fn exit_recovery(&mut self) {
        self.mode = RoutingMode::Greedy;
        self.recovery_entry = None;
        self.face = FaceState::default();
    }
}

/// One face-routing step from the center of `planar`.
///
/// Fails with `DeadEnd` when no edges were retained and with
/// `TraversalLoop` when the episode would repeat a directed edge.
pub fn face_route_step(
    planar: &PlanarNeighborhood,
    state: &mut RoutingState,
    dst: Point2D,
    topo: &Topology,
) -> Result<NodeId> {
    debug_assert_eq!(state.mode, RoutingMode::Recovery);
    let entry = state
        .recovery_entry
        .expect("face_route_step requires an active recovery episode");
    let cur = planar.center;
    let cur_pos = topo.position(cur);
    if planar.edges.is_empty() {
        return Err(Error::DeadEnd(cur));
    }

    let angle_to = |p: Point2D| (p.y - cur_pos.y).atan2(p.x - cur_pos.x);
    let mut reference = match state.face.incoming {
        Some(prev) => angle_to(topo.position(prev)),
        None => angle_to(dst),
    };

    let first_ccw = |reference: f64| -> NodeId {
        let mut best: Option<(f64, NodeId)> = None;
        for &v in &planar.edges {
            let mut delta = angle_to(topo.position(v)) - reference;
            while delta <= 1e-12 {
                delta += 2.0 * std::f64::consts::PI;
            }
            while delta > 2.0 * std::f64::consts::PI {
                delta -= 2.0 * std::f64::consts::PI;
            }
            match best {
                Some((d, _)) if delta >= d => {}
                _ => best = Some((delta, v)),
            }
        }
        best.expect("non-empty edge set").1
    };

    let mut next = first_ccw(reference);
    // Face changes: while the chosen edge crosses the entry-destination
    // segment strictly closer to the destination than any previous
    // crossing, move to the adjacent face and re-sweep from the
    // destination direction.
    for _ in 0..=planar.edges.len() {
        let next_pos = topo.position(next);
        let Some(xc) = proper_intersection(cur_pos, next_pos, entry.point, dst) else {
            break;
        };
        let d = distance(xc, dst);
        if d < state.face.crossing_distance - GEOM_EPS {
            state.face.crossing_distance = d;
            reference = angle_to(dst);
            next = first_ccw(reference);
        } else {
            break;
        }
    }

    if !state.face.traversed.insert((cur, next)) {
        return Err(Error::TraversalLoop);
    }
    Ok(next)
}

/// Intersection point of segments `a0-a1` and `b0-b1`, excluding the
/// degenerate cases: collinear overlap and a crossing at `a0` itself.
fn proper_intersection(a0: Point2D, a1: Point2D, b0: Point2D, b1: Point2D) -> Option<Point2D> {
    let r = (a1.x - a0.x, a1.y - a0.y);
    let s = (b1.x - b0.x, b1.y - b0.y);
    let denom = r.0 * s.1 - r.1 * s.0;
    if denom.abs() < 1e-15 {
        return None;
    }
    let qp = (b0.x - a0.x, b0.y - a0.y);
    let t = (qp.0 * s.1 - qp.1 * s.0) / denom;
    let u = (qp.0 * r.1 - qp.1 * r.0) / denom;
    // t along the candidate edge, u along the entry-destination segment.
    if t > 1e-9 && t <= 1.0 + 1e-12 && (0.0..=1.0).contains(&u) {
        Some(Point2D::new(a0.x + t * r.0, a0.y + t * r.1))
    } else {
        None
    }
}
