//! The cross-layer forwarding machine.
//!
//! A hop runs as: the current holder broadcasts DATA; positive-progress
//! receivers contend with sub-area timers and the earliest CTF wins the
//! forwarding role, confirmed by a SELECT. Silence through the first half
//! window means a local optimum: the neighborhood planarizes itself
//! (select and protest) and the packet continues by face routing until it
//! reaches a node strictly closer to the destination than where recovery
//! began. A forwarder that could not decode the payload triggers relay
//! contention among decode-and-forward candidates inside the Reuleaux
//! region of the hop; the winning relay retransmits and the forwarder
//! combines both copies. With no relay available the sender retransmits
//! directly once.
//!
//! Every stochastic decision draws from one explicit stream in a fixed
//! order, so a hop is a pure function of (topology, config, stream state).

pub mod bfp;
pub mod face;

use std::collections::BTreeMap;

pub use bfp::{gabriel_neighborhood, run_bfp, run_bfp_detailed, BfpRun, PlanarNeighborhood};
pub use face::{face_route_step, FaceState, RecoveryEntry, RoutingMode, RoutingState};

use crate::channel::{
    draw_rayleigh_snr, mean_snr, mrc_combine, packet_success, ser_mqam, ChannelParams, Modulation,
};
use crate::contention::{
    resolve, t_cbf, t_cbr, Bid, BidKind, ContentionConfig, ContentionOutcome, ContentionResult,
};
use crate::error::Result;
use crate::geometry::{
    classify_progress, distance, f_max_over_region, map_metric, min_metric_point,
    optimal_relay_point, progress_fraction, relay_metric, reuleaux_region, Point2D, ProgressClass,
    RelayMetricParams, ReuleauxRegion,
};
use crate::rng::SimRng;
use crate::simcore::topology::{NodeId, Topology};

/// Protocol message types.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrameKind {
    Data,
    Ctf { decoded_ok: bool },
    Select { target: NodeId },
    Ctr,
    Protest { against: NodeId },
}

impl FrameKind {
    pub fn name(&self) -> &'static str {
        match self {
            FrameKind::Data => "DATA",
            FrameKind::Ctf { .. } => "CTF",
            FrameKind::Select { .. } => "SELECT",
            FrameKind::Ctr => "CTR",
            FrameKind::Protest { .. } => "PROTEST",
        }
    }
}

/// One transmitted frame in a hop's chronology.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Frame {
    pub kind: FrameKind,
    pub sender: NodeId,
    pub sent_at_us: f64,
}

/// Which path carried the packet across a hop.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HopMode {
    GreedyDirect,
    GreedyCooperative,
    GreedyDirectRetx,
    Recovery,
}

/// Record of one hop attempt.
#[derive(Clone, Debug)]
pub struct HopOutcome {
    /// The node that won the forwarding role, when one was selected.
    pub forwarder: Option<NodeId>,
    /// The relay used, only ever set in cooperative mode.
    pub relay: Option<NodeId>,
    pub mode: HopMode,
    /// Ordered frame log of the hop, times relative to the hop start.
    pub events: Vec<Frame>,
    pub collision_count: u32,
    /// The selected forwarder never obtained the payload.
    pub channel_failure: bool,
    pub elapsed_us: f64,
}

impl HopOutcome {
    /// A hop fails when no forwarder was selected (collision storm, dead
    /// end) or the payload never reached the selected forwarder.
    pub fn failed(&self) -> bool {
        self.forwarder.is_none() || self.channel_failure
    }
}

/// Which side of the hop segment hosts relay candidates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RelayRegionSides {
    Upper,
    Lower,
    /// Union of both triangles. The mutual-audibility bound then only
    /// holds within each side.
    Both,
}

/// Fully resolved per-hop parameters, derived once per run.
#[derive(Clone, Debug)]
pub struct HopContext {
    pub channel: ChannelParams,
    pub contention: ContentionConfig,
    pub modulation: Modulation,
    /// Constellation of control frames and packet headers; defaults to the
    /// base rate so control traffic stays robust at any data rate.
    pub ctl_modulation: Modulation,
    pub metric: RelayMetricParams,
    pub relay_region: RelayRegionSides,
    pub recovery_enabled: bool,
    pub cooperative: bool,
    /// Extra rounds granted to a collided contention before giving up.
    pub contention_retries: u32,
    pub n_data_symbols: u32,
    pub n_ctl_symbols: u32,
    pub data_airtime_us: f64,
    pub ctl_airtime_us: f64,
    pub payload_bits: u64,
}

impl HopContext {
    /// Mean link SNR with distances floored at the reference distance
    /// (the near field is credited the full reference-distance margin).
    pub fn link_mean_snr(&self, d: f64) -> f64 {
        let d = d.max(self.channel.reference_distance_m);
        mean_snr(d, &self.channel).expect("distance floored at reference")
    }

    fn draw_link(&self, d: f64, rng: &mut SimRng) -> LinkState {
        let mean = self.link_mean_snr(d);
        let snr = draw_rayleigh_snr(mean, rng)
            .expect("positive mean")
            .instantaneous_snr;
        // The header rides the robust control constellation; the payload
        // the configured one. Participation is the header decode.
        let hdr_ser = ser_mqam(snr, self.ctl_modulation);
        let participated = rng.bernoulli(packet_success(hdr_ser, self.n_ctl_symbols));
        let ser = ser_mqam(snr, self.modulation);
        let decoded = participated && rng.bernoulli(packet_success(ser, self.n_data_symbols));
        LinkState {
            snr,
            participated,
            decoded,
        }
    }

    /// Maximum waiting time of a relay round: worst mapped metric plus the
    /// full jitter width.
    pub fn cbr_window_us(&self) -> f64 {
        self.contention.t_max_us * (1.0 + 2.0 / f64::from(self.contention.nsa))
    }
}

/// Fading and decode state of one DATA reception.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinkState {
    /// Instantaneous SNR drawn at DATA time; also the stored copy the
    /// forwarder later feeds into combining.
    pub snr: f64,
    /// The header decoded: the node knows it is a candidate.
    pub participated: bool,
    /// The whole payload decoded.
    pub decoded: bool,
}

/// Draw the per-neighbor reception states for one DATA broadcast, in node
/// id order.
pub fn draw_links(
    topo: &Topology,
    center: NodeId,
    ctx: &HopContext,
    rng: &mut SimRng,
) -> BTreeMap<NodeId, LinkState> {
    let c = topo.position(center);
    topo.neighbors(center)
        .iter()
        .map(|&n| (n, ctx.draw_link(distance(c, topo.position(n)), rng)))
        .collect()
}

/// One armed forwarding candidate.
#[derive(Clone, Copy, Debug)]
pub struct CbfBid {
    pub node: NodeId,
    pub class: ProgressClass,
    pub csa: u32,
    pub fire_us: f64,
}

/// Result of one forwarding contention round.
#[derive(Clone, Debug)]
pub struct CbfRound {
    pub result: ContentionResult,
    pub bids: Vec<CbfBid>,
    pub links: BTreeMap<NodeId, LinkState>,
}

/// Run one forwarding contention round at `current` toward `dst`.
///
/// Every neighbor that received the DATA header and lies in the positive
/// progress area arms a sub-area timer; with recovery disabled,
/// negative-progress neighbors arm timers in the second half window as
/// well. The earliest CTF wins unless another lands within the collision
/// window.
pub fn run_cbf_round(
    topo: &Topology,
    current: NodeId,
    dst: Point2D,
    ctx: &HopContext,
    rng: &mut SimRng,
) -> CbfRound {
    let links = draw_links(topo, current, ctx, rng);
    let cur_pos = topo.position(current);
    let range = topo.range();
    let mut bids = Vec::new();
    for (&node, link) in &links {
        if !link.participated {
            continue;
        }
        let pos = topo.position(node);
        let class = classify_progress(cur_pos, dst, pos, range);
        let eligible = match class {
            ProgressClass::Ppa => true,
            ProgressClass::Npa => !ctx.recovery_enabled,
            ProgressClass::OutOfRange => false,
        };
        if !eligible {
            continue;
        }
        let frac = progress_fraction(cur_pos, dst, pos, range);
        let csa = ((f64::from(ctx.contention.nsa) * frac) as u32).min(ctx.contention.nsa - 1);
        let fire_us = if ctx.contention.jitter {
            t_cbf(csa, &ctx.contention, rng)
        } else {
            // Jitter-free timers refine the sub-area bands continuously so
            // distinct progress yields distinct fire times.
            ctx.contention.t_max_us * frac
        };
        bids.push(CbfBid {
            node,
            class,
            csa,
            fire_us,
        });
    }
    let raw: Vec<Bid> = bids
        .iter()
        .map(|b| Bid {
            node: b.node,
            fire_time_us: b.fire_us,
            kind: BidKind::Ctf,
        })
        .collect();
    let result = resolve(&raw, &ctx.contention);
    CbfRound {
        result,
        bids,
        links,
    }
}

/// A local optimum is declared when no positive-progress CTF fired before
/// the half window.
pub fn detect_local_optimum(round: &CbfRound, contention: &ContentionConfig) -> bool {
    !round
        .bids
        .iter()
        .any(|b| b.class == ProgressClass::Ppa && b.fire_us < contention.t_max_us / 2.0)
}

/// One relay candidate with its metric and timer.
#[derive(Clone, Copy, Debug)]
pub struct CbrCandidate {
    pub node: NodeId,
    pub metric: f64,
    pub mapped: f64,
    pub fire_us: f64,
}

/// Result of one relay contention round.
#[derive(Clone, Debug)]
pub struct CbrRound {
    pub result: ContentionResult,
    pub candidates: Vec<CbrCandidate>,
}

fn relay_regions(src: Point2D, forwarder: Point2D, sides: RelayRegionSides) -> Vec<ReuleauxRegion> {
    let mut regions = Vec::with_capacity(2);
    match sides {
        RelayRegionSides::Upper => regions.push(reuleaux_region(src, forwarder, true)),
        RelayRegionSides::Lower => regions.push(reuleaux_region(src, forwarder, false)),
        RelayRegionSides::Both => {
            regions.push(reuleaux_region(src, forwarder, true));
            regions.push(reuleaux_region(src, forwarder, false));
        }
    }
    regions.into_iter().filter_map(|r| r.ok()).collect()
}

/// Run one relay contention round for the hop `src -> forwarder`.
///
/// Candidates are neighbors that decoded the DATA broadcast (`links`),
/// overheard the handshake, and lie in the hop's Reuleaux region. Each
/// maps its metric into [0, 1] and arms a timer; the earliest CTR wins.
pub fn run_cbr_round(
    topo: &Topology,
    src: NodeId,
    forwarder: NodeId,
    links: &BTreeMap<NodeId, LinkState>,
    ctx: &HopContext,
    rng: &mut SimRng,
) -> CbrRound {
    let src_pos = topo.position(src);
    let fwd_pos = topo.position(forwarder);
    let regions = relay_regions(src_pos, fwd_pos, ctx.relay_region);
    if regions.is_empty() {
        return CbrRound {
            result: ContentionResult {
                outcome: ContentionOutcome::Silence,
                resolved_at_us: 0.0,
            },
            candidates: Vec::new(),
        };
    }

    // Mapping anchors: the metric optimum and the maximum over the region.
    // Both sides of the segment share them by mirror symmetry.
    let star = if (ctx.metric.p - 2.0).abs() <= 1e-12 {
        optimal_relay_point(src_pos, fwd_pos, &ctx.metric).expect("p = 2")
    } else {
        min_metric_point(src_pos, fwd_pos, &ctx.metric)
    };
    let f_star = relay_metric(star, src_pos, fwd_pos, &ctx.metric);
    let f_max = f_max_over_region(&regions[0], src_pos, fwd_pos, &ctx.metric);
    let degenerate = !(f_max - f_star > 1e-12 * f_star.max(1.0));

    let mut candidates = Vec::new();
    for (&node, link) in links {
        if node == forwarder || !link.decoded {
            continue;
        }
        let pos = topo.position(node);
        if !regions.iter().any(|r| r.contains(pos)) {
            continue;
        }
        let metric = relay_metric(pos, src_pos, fwd_pos, &ctx.metric);
        let mapped = if degenerate {
            0.0
        } else {
            map_metric(metric, f_star, f_max).unwrap_or(1.0)
        };
        let fire_us = t_cbr(mapped, &ctx.contention, rng);
        candidates.push(CbrCandidate {
            node,
            metric,
            mapped,
            fire_us,
        });
    }

    let raw: Vec<Bid> = candidates
        .iter()
        .map(|c| Bid {
            node: c.node,
            fire_time_us: c.fire_us,
            kind: BidKind::Ctr,
        })
        .collect();
    let result = resolve(&raw, &ctx.contention);
    CbrRound { result, candidates }
}

/// Ordered list of hops from source toward destination.
#[derive(Clone, Debug)]
pub struct DeliveryReport {
    pub hops: Vec<HopOutcome>,
    pub delivered: bool,
    /// The forwarding set: one node per successful hop, in order.
    pub forwarders: Vec<NodeId>,
    /// The relaying set: the relays that transmitted, in hop order.
    pub relays: Vec<NodeId>,
}

/// Execute one hop from `current` toward `dst_node`.
///
/// `state` carries the greedy/recovery mode across hops of one route.
pub fn run_hop(
    topo: &Topology,
    current: NodeId,
    dst_node: NodeId,
    ctx: &HopContext,
    state: &mut RoutingState,
    rng: &mut SimRng,
) -> HopOutcome {
    let dst = topo.position(dst_node);
    let cur_pos = topo.position(current);

    // Arriving strictly closer than where recovery began ends the episode.
    if state.mode == RoutingMode::Recovery {
        let entry = state.recovery_entry.expect("recovery carries its entry");
        if distance(cur_pos, dst) < entry.distance {
            state.exit_recovery();
        }
    }

    let mut frames = Vec::new();
    let mut collision_count = 0u32;
    let mut round_start = 0.0f64;
    frames.push(Frame {
        kind: FrameKind::Data,
        sender: current,
        sent_at_us: round_start,
    });
    let mut data_end = round_start + ctx.data_airtime_us;

    let mut links: Option<BTreeMap<NodeId, LinkState>> = None;
    let mut forwarder: Option<NodeId> = None;
    let mut mode = HopMode::GreedyDirect;
    let mut select_end = data_end;

    if state.mode == RoutingMode::Greedy {
        let mut attempt = 0u32;
        loop {
            let round = run_cbf_round(topo, current, dst, ctx, rng);
            match &round.result.outcome {
                ContentionOutcome::Winner(f) => {
                    let f = *f;
                    let ctf_at = data_end + round.result.resolved_at_us;
                    frames.push(Frame {
                        kind: FrameKind::Ctf {
                            decoded_ok: round.links[&f].decoded,
                        },
                        sender: f,
                        sent_at_us: ctf_at,
                    });
                    let select_at = ctf_at + ctx.ctl_airtime_us;
                    frames.push(Frame {
                        kind: FrameKind::Select { target: f },
                        sender: current,
                        sent_at_us: select_at,
                    });
                    select_end = select_at + ctx.ctl_airtime_us;
                    // Candidates out of the winner's range miss its CTF and
                    // fire until the SELECT silences them; harmless but
                    // visible in the chronology.
                    let f_pos = topo.position(f);
                    for b in &round.bids {
                        if b.node != f
                            && b.fire_us > round.result.resolved_at_us
                            && data_end + b.fire_us < select_end
                            && distance(topo.position(b.node), f_pos) > topo.range()
                        {
                            frames.push(Frame {
                                kind: FrameKind::Ctf {
                                    decoded_ok: round.links[&b.node].decoded,
                                },
                                sender: b.node,
                                sent_at_us: data_end + b.fire_us,
                            });
                        }
                    }
                    forwarder = Some(f);
                    links = Some(round.links);
                    break;
                }
                ContentionOutcome::Collision(_) => {
                    collision_count += 1;
                    if attempt >= ctx.contention_retries {
                        frames.sort_by(|a, b| a.sent_at_us.total_cmp(&b.sent_at_us));
                        let elapsed = data_end + round.result.resolved_at_us + ctx.ctl_airtime_us;
                        return HopOutcome {
                            forwarder: None,
                            relay: None,
                            mode: HopMode::GreedyDirect,
                            events: frames,
                            collision_count,
                            channel_failure: false,
                            elapsed_us: elapsed,
                        };
                    }
                    attempt += 1;
                    // Retry from scratch: rebroadcast after the garbled CTF.
                    round_start = data_end + round.result.resolved_at_us + ctx.ctl_airtime_us;
                    frames.push(Frame {
                        kind: FrameKind::Data,
                        sender: current,
                        sent_at_us: round_start,
                    });
                    data_end = round_start + ctx.data_airtime_us;
                }
                ContentionOutcome::Silence => {
                    let local_optimum = detect_local_optimum(&round, &ctx.contention);
                    links = Some(round.links);
                    if ctx.recovery_enabled && local_optimum {
                        state.enter_recovery(cur_pos, distance(cur_pos, dst));
                        break;
                    }
                    // No candidate at all and nowhere to recover to.
                    frames.sort_by(|a, b| a.sent_at_us.total_cmp(&b.sent_at_us));
                    return HopOutcome {
                        forwarder: None,
                        relay: None,
                        mode: HopMode::GreedyDirect,
                        events: frames,
                        collision_count,
                        channel_failure: false,
                        elapsed_us: data_end + ctx.contention.t_max_us / 2.0,
                    };
                }
            }
        }
    }

    if state.mode == RoutingMode::Recovery && forwarder.is_none() {
        // Planarize and take one face-routing step.
        let links_map = match links.take() {
            Some(l) => l,
            None => draw_links(topo, current, ctx, rng),
        };
        let bfp = run_bfp_detailed(topo, current, &ctx.contention, rng);
        for f in &bfp.frames {
            frames.push(Frame {
                sent_at_us: data_end + f.sent_at_us,
                ..*f
            });
        }
        let next = match face_route_step(&bfp.planar, state, dst, topo) {
            Ok(n) => n,
            Err(_) => {
                frames.sort_by(|a, b| a.sent_at_us.total_cmp(&b.sent_at_us));
                return HopOutcome {
                    forwarder: None,
                    relay: None,
                    mode: HopMode::Recovery,
                    events: frames,
                    collision_count,
                    channel_failure: false,
                    elapsed_us: data_end + 1.5 * ctx.contention.t_max_us,
                };
            }
        };
        state.face.incoming = Some(current);
        // The protest window closes at 1.5 t_max, but jittered protest
        // timers may run slightly past it; select only after the last one.
        let bfp_end = bfp
            .frames
            .last()
            .map(|f| f.sent_at_us + ctx.ctl_airtime_us)
            .unwrap_or(0.0)
            .max(1.5 * ctx.contention.t_max_us);
        let select_at = data_end + bfp_end;
        frames.push(Frame {
            kind: FrameKind::Select { target: next },
            sender: current,
            sent_at_us: select_at,
        });
        select_end = select_at + ctx.ctl_airtime_us;
        forwarder = Some(next);
        mode = HopMode::Recovery;
        links = Some(links_map);
    }

    let forwarder_id = forwarder.expect("forwarder selected on every non-failed path");
    let links = links.expect("links drawn with the DATA broadcast");
    let link = links[&forwarder_id];

    let mut relay = None;
    let mut channel_failure = false;
    let mut elapsed = select_end;

    if !link.decoded {
        let mut relayed = false;
        if ctx.cooperative && mode != HopMode::Recovery {
            // Relay contention; a collided round is retried like the
            // forwarding contention.
            let mut attempt = 0u32;
            let mut winner = None;
            let mut window_start = select_end;
            loop {
                let cbr = run_cbr_round(topo, current, forwarder_id, &links, ctx, rng);
                match &cbr.result.outcome {
                    ContentionOutcome::Winner(r) => {
                        winner = Some((*r, window_start + cbr.result.resolved_at_us));
                        break;
                    }
                    ContentionOutcome::Collision(_) => {
                        collision_count += 1;
                        if attempt >= ctx.contention_retries {
                            window_start += ctx.cbr_window_us();
                            break;
                        }
                        attempt += 1;
                        window_start += cbr.result.resolved_at_us + ctx.ctl_airtime_us;
                    }
                    ContentionOutcome::Silence => {
                        window_start += ctx.cbr_window_us();
                        break;
                    }
                }
            }
            if let Some((r, ctr_at)) = winner {
                frames.push(Frame {
                    kind: FrameKind::Ctr,
                    sender: r,
                    sent_at_us: ctr_at,
                });
                let relay_data_at = ctr_at + ctx.ctl_airtime_us;
                frames.push(Frame {
                    kind: FrameKind::Data,
                    sender: r,
                    sent_at_us: relay_data_at,
                });
                let d_rf = distance(topo.position(r), topo.position(forwarder_id));
                let relay_draw = draw_rayleigh_snr(ctx.link_mean_snr(d_rf), rng)
                    .expect("positive mean")
                    .instantaneous_snr;
                let combined = mrc_combine(link.snr, relay_draw);
                let ps = packet_success(ser_mqam(combined, ctx.modulation), ctx.n_data_symbols);
                channel_failure = !rng.bernoulli(ps);
                relay = Some(r);
                mode = HopMode::GreedyCooperative;
                relayed = true;
                elapsed = relay_data_at + ctx.data_airtime_us;
            } else {
                // No relay came forward; retransmit once directly.
                let retx_at = window_start;
                frames.push(Frame {
                    kind: FrameKind::Data,
                    sender: current,
                    sent_at_us: retx_at,
                });
                let d_sf = distance(cur_pos, topo.position(forwarder_id));
                let retx_draw = draw_rayleigh_snr(ctx.link_mean_snr(d_sf), rng)
                    .expect("positive mean")
                    .instantaneous_snr;
                let ps = packet_success(ser_mqam(retx_draw, ctx.modulation), ctx.n_data_symbols);
                channel_failure = !rng.bernoulli(ps);
                mode = HopMode::GreedyDirectRetx;
                relayed = true;
                elapsed = retx_at + ctx.data_airtime_us;
            }
        } else if ctx.cooperative {
            // Recovery hop: no relay region is defined, fall back to one
            // direct retransmission.
            let retx_at = select_end;
            frames.push(Frame {
                kind: FrameKind::Data,
                sender: current,
                sent_at_us: retx_at,
            });
            let d_sf = distance(cur_pos, topo.position(forwarder_id));
            let retx_draw = draw_rayleigh_snr(ctx.link_mean_snr(d_sf), rng)
                .expect("positive mean")
                .instantaneous_snr;
            let ps = packet_success(ser_mqam(retx_draw, ctx.modulation), ctx.n_data_symbols);
            channel_failure = !rng.bernoulli(ps);
            relayed = true;
            elapsed = retx_at + ctx.data_airtime_us;
        } else {
            channel_failure = true;
        }
        let _ = relayed;
    }

    frames.sort_by(|a, b| a.sent_at_us.total_cmp(&b.sent_at_us));
    HopOutcome {
        forwarder: Some(forwarder_id),
        relay,
        mode,
        events: frames,
        collision_count,
        channel_failure,
        elapsed_us: elapsed,
    }
}

/// Route a packet from `src` to `dst`, chaining hops until delivery, a hop
/// failure, or the hop limit.
pub fn run_route(
    topo: &Topology,
    src: NodeId,
    dst: NodeId,
    ctx: &HopContext,
    rng: &mut SimRng,
    hop_limit: u32,
) -> DeliveryReport {
    debug_assert_ne!(src, dst);
    let mut state = RoutingState::new();
    let mut report = DeliveryReport {
        hops: Vec::new(),
        delivered: false,
        forwarders: Vec::new(),
        relays: Vec::new(),
    };
    let mut current = src;
    for _ in 0..hop_limit {
        if current == dst {
            break;
        }
        let hop = run_hop(topo, current, dst, ctx, &mut state, rng);
        let failed = hop.failed();
        if let (Some(f), false) = (hop.forwarder, failed) {
            report.forwarders.push(f);
            if let Some(r) = hop.relay {
                report.relays.push(r);
            }
            current = f;
        }
        report.hops.push(hop);
        if failed {
            return report;
        }
    }
    report.delivered = current == dst;
    report
}

/// Default hop limit for a topology of `n` nodes.
pub fn default_hop_limit(n: usize) -> u32 {
    (4 * n).max(8) as u32
}

pub(crate) fn route_frame_log(report: &DeliveryReport) -> Vec<Frame> {
    // Concatenate hop logs on a global clock: each hop starts when the
    // previous one ended.
    let mut frames = Vec::new();
    let mut offset = 0.0;
    for hop in &report.hops {
        for f in &hop.events {
            frames.push(Frame {
                sent_at_us: offset + f.sent_at_us,
                ..*f
            });
        }
        offset += hop.elapsed_us;
    }
    frames
}

/// Ordered frame log of a whole route on one global clock.
pub fn frame_log(report: &DeliveryReport) -> Vec<Frame> {
    route_frame_log(report)
}

pub type RouteResult = Result<DeliveryReport>;
