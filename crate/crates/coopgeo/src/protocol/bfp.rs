//! Beaconless forwarder planarization: the select-and-protest construction
//! of a local Gabriel neighborhood without beacons.
//!
//! Selection phase: neighbors answer nearest-first with timers in the
//! second half of the contention window. A pending node cancels (becomes
//! "hidden") when it hears a CTF either from a node inside its own Gabriel
//! circle or while sitting inside the responder's circle. Hidden nodes keep
//! listening. Protest phase: a hidden node inside the circle of a node that
//! did respond protests that violating edge; the first protest per
//! violating node wins and the edge is dropped.
//!
//! With jitter disabled the timers are strictly distance-ordered and the
//! retained set equals the Gabriel graph restricted to the neighborhood.
//! Control frames here are treated as collision-free; contention losses
//! are modeled in the forwarding and relaying rounds.

use std::collections::BTreeSet;

use crate::contention::{t_bfp, ContentionConfig};
use crate::geometry::in_gabriel_region;
use crate::protocol::{Frame, FrameKind};
use crate::rng::SimRng;
use crate::simcore::events::EventQueue;
use crate::simcore::topology::{NodeId, Topology};

/// The edges a node retains around itself after selection and protest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanarNeighborhood {
    pub center: NodeId,
    pub edges: BTreeSet<NodeId>,
}

impl PlanarNeighborhood {
    /// Planarity invariant: no retained neighbor sits strictly inside the
    /// Gabriel circle of another retained edge.
    pub fn is_planar_around_center(&self, topo: &Topology) -> bool {
        let c = topo.position(self.center);
        for &v in &self.edges {
            for &w in &self.edges {
                if v != w && in_gabriel_region(c, topo.position(v), topo.position(w)) {
                    return false;
                }
            }
        }
        true
    }
}

pub struct BfpRun {
    pub planar: PlanarNeighborhood,
    /// CTF and protest frames, times relative to the start of the
    /// contention window.
    pub frames: Vec<Frame>,
}

/// Run both phases around `center` and return the retained neighborhood.
pub fn run_bfp(
    topo: &Topology,
    center: NodeId,
    cfg: &ContentionConfig,
    rng: &mut SimRng,
) -> PlanarNeighborhood {
    run_bfp_detailed(topo, center, cfg, rng).planar
}

pub fn run_bfp_detailed(
    topo: &Topology,
    center: NodeId,
    cfg: &ContentionConfig,
    rng: &mut SimRng,
) -> BfpRun {
    let c = topo.position(center);
    let range = topo.range();
    let neighbors = topo.neighbors(center);

    // Selection timers, drawn in node id order.
    let mut queue = EventQueue::new();
    for &n in neighbors {
        let d = c.distance_to(topo.position(n)).max(f64::MIN_POSITIVE);
        queue.push(t_bfp(d, range, cfg, rng), n);
    }

    let mut hidden: BTreeSet<NodeId> = BTreeSet::new();
    let mut responders: Vec<(NodeId, f64)> = Vec::new();
    let mut frames = Vec::new();

    while let Some((fire, node)) = queue.pop() {
        if hidden.contains(&node) {
            continue;
        }
        responders.push((node, fire));
        frames.push(Frame {
            kind: FrameKind::Ctf { decoded_ok: true },
            sender: node,
            sent_at_us: fire,
        });
        let np = topo.position(node);
        for &w in neighbors {
            if w == node || hidden.contains(&w) {
                continue;
            }
            if responders.iter().any(|&(r, _)| r == w) {
                continue;
            }
            let wp = topo.position(w);
            if np.distance_to(wp) > range {
                continue; // cannot hear this CTF
            }
            if in_gabriel_region(c, wp, np) || in_gabriel_region(c, np, wp) {
                hidden.insert(w);
            }
        }
    }

    // Protest timers reuse the selection form, shifted into a dedicated
    // window of length t_max/2 after the selection phase.
    let mut protest_time = std::collections::BTreeMap::new();
    for &h in &hidden {
        let d = c.distance_to(topo.position(h)).max(f64::MIN_POSITIVE);
        protest_time.insert(h, t_bfp(d, range, cfg, rng) + 0.5 * cfg.t_max_us);
    }

    let mut violated: BTreeSet<NodeId> = BTreeSet::new();
    for &(v, _) in &responders {
        let vp = topo.position(v);
        let protester = hidden
            .iter()
            .filter(|&&h| in_gabriel_region(c, vp, topo.position(h)))
            .min_by(|&&a, &&b| {
                protest_time[&a]
                    .total_cmp(&protest_time[&b])
                    .then(a.cmp(&b))
            });
        if let Some(&h) = protester {
            violated.insert(v);
            frames.push(Frame {
                kind: FrameKind::Protest { against: v },
                sender: h,
                sent_at_us: protest_time[&h],
            });
        }
    }

    let edges = responders
        .iter()
        .map(|&(v, _)| v)
        .filter(|v| !violated.contains(v))
        .collect();

    frames.sort_by(|a, b| a.sent_at_us.total_cmp(&b.sent_at_us));
    BfpRun {
        planar: PlanarNeighborhood { center, edges },
        frames,
    }
}

/// Brute-force Gabriel neighborhood: the edges of `center` whose diameter
/// circle contains no other neighbor. Used as the reference construction.
pub fn gabriel_neighborhood(topo: &Topology, center: NodeId) -> BTreeSet<NodeId> {
    let c = topo.position(center);
    let neighbors = topo.neighbors(center);
    neighbors
        .iter()
        .copied()
        .filter(|&v| {
            let vp = topo.position(v);
            !neighbors
                .iter()
                .any(|&w| w != v && in_gabriel_region(c, vp, topo.position(w)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point2D;

    fn cfg(jitter: bool) -> ContentionConfig {
        ContentionConfig {
            t_max_us: 500.0,
            nsa: 4,
            collision_window_us: 0.0,
            jitter,
        }
    }

    #[test]
    fn collinear_far_node_is_suppressed() {
        // center (0,0), near (1,0), far (2,0): the near node responds first
        // and sits inside the Gabriel circle of center-far, so the far node
        // cancels and stays silent; nothing is protested and only the near
        // edge survives, matching the brute-force Gabriel neighborhood.
        let topo = Topology::new(
            vec![
                Point2D::new(0.0, 0.0),
                Point2D::new(1.0, 0.0),
                Point2D::new(2.0, 0.0),
            ],
            2.5,
        );
        let mut rng = SimRng::from_seed(1);
        let run = run_bfp_detailed(&topo, NodeId(0), &cfg(false), &mut rng);
        let expect: BTreeSet<NodeId> = [NodeId(1)].into_iter().collect();
        assert_eq!(run.planar.edges, expect);
        assert_eq!(run.planar.edges, gabriel_neighborhood(&topo, NodeId(0)));
        // One CTF, no protests.
        assert_eq!(run.frames.len(), 1);
        assert!(matches!(run.frames[0].kind, FrameKind::Ctf { .. }));
    }

    #[test]
    fn six_neighbor_select_and_protest_scenario() {
        // Six neighbors around the sender. With this jitter draw the
        // responders are F1, F4 and F5 in that order; F2, F3 and F6 cancel
        // and stay listening; in the protest phase F2 protests F1 and F3
        // protests F4, so both edges are dropped and only F5 survives.
        // F2 sits just inside the circle of S-F1 and nearly tied with F1,
        // so the jitter decides which of the two answers first.
        let topo = Topology::new(
            vec![
                Point2D::new(0.0, 0.0),    // S
                Point2D::new(0.50, 0.00),  // F1
                Point2D::new(0.49, -0.05), // F2
                Point2D::new(0.55, 0.35),  // F3
                Point2D::new(0.45, 0.66),  // F4
                Point2D::new(-0.85, 0.0),  // F5
                Point2D::new(-0.90, 0.30), // F6
            ],
            1.0,
        );
        let mut rng = SimRng::from_seed(6);
        let run = run_bfp_detailed(&topo, NodeId(0), &cfg(true), &mut rng);

        let ctf_order: Vec<u32> = run
            .frames
            .iter()
            .filter_map(|f| match f.kind {
                FrameKind::Ctf { .. } => Some(f.sender.0),
                _ => None,
            })
            .collect();
        assert_eq!(ctf_order, vec![1, 4, 5]);

        let protests: Vec<(u32, u32)> = run
            .frames
            .iter()
            .filter_map(|f| match f.kind {
                FrameKind::Protest { against } => Some((f.sender.0, against.0)),
                _ => None,
            })
            .collect();
        assert_eq!(protests, vec![(2, 1), (3, 4)]);

        let expect: BTreeSet<NodeId> = [NodeId(5)].into_iter().collect();
        assert_eq!(run.planar.edges, expect);
        assert!(run.planar.is_planar_around_center(&topo));
    }

    #[test]
    fn already_planar_pair_is_kept() {
        let topo = Topology::new(
            vec![
                Point2D::new(0.0, 0.0),
                Point2D::new(1.0, 0.0),
                Point2D::new(-0.4, 0.9),
            ],
            2.0,
        );
        let mut rng = SimRng::from_seed(2);
        let planar = run_bfp(&topo, NodeId(0), &cfg(false), &mut rng);
        assert_eq!(planar.edges.len(), 2);
    }

    #[test]
    fn matches_gabriel_on_random_neighborhoods() {
        let mut rng = SimRng::from_seed(3);
        for _ in 0..300 {
            let mut pts = vec![Point2D::new(0.0, 0.0)];
            let k = 4 + (rng.uniform() * 10.0) as usize;
            for _ in 0..k {
                let r = 0.05 + 0.95 * rng.uniform();
                let th = 2.0 * std::f64::consts::PI * rng.uniform();
                pts.push(Point2D::new(r * th.cos(), r * th.sin()));
            }
            let topo = Topology::new(pts, 1.0);
            let planar = run_bfp(&topo, NodeId(0), &cfg(false), &mut rng);
            assert_eq!(planar.edges, gabriel_neighborhood(&topo, NodeId(0)));
        }
    }

    #[test]
    fn planarity_invariant_holds_with_jitter() {
        let mut rng = SimRng::from_seed(4);
        for _ in 0..10_000 {
            let mut pts = vec![Point2D::new(0.0, 0.0)];
            let k = 5 + (rng.uniform() * 12.0) as usize;
            for _ in 0..k {
                let r = 0.05 + 0.95 * rng.uniform();
                let th = 2.0 * std::f64::consts::PI * rng.uniform();
                pts.push(Point2D::new(r * th.cos(), r * th.sin()));
            }
            let topo = Topology::new(pts, 1.0);
            let planar = run_bfp(&topo, NodeId(0), &cfg(true), &mut rng);
            assert!(planar.is_planar_around_center(&topo));
        }
    }

    #[test]
    fn selection_frames_start_after_half_window() {
        let mut rng = SimRng::from_seed(5);
        let topo = Topology::new(
            vec![
                Point2D::new(0.0, 0.0),
                Point2D::new(0.3, 0.1),
                Point2D::new(-0.5, 0.4),
            ],
            1.0,
        );
        let run = run_bfp_detailed(&topo, NodeId(0), &cfg(true), &mut rng);
        for f in &run.frames {
            assert!(f.sent_at_us >= 250.0);
        }
    }
}
