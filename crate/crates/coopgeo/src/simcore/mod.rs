//! Experiment configuration, Monte-Carlo replication management, and the
//! packet-error / transmission-error / throughput estimators.

pub mod events;
pub mod topology;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{ser_constants, ChannelParams, Modulation, SerConstants};
use crate::contention::ContentionConfig;
use crate::error::{Error, Result};
use crate::geometry::RelayMetricParams;
use crate::protocol::{
    default_hop_limit, run_hop, run_route, HopContext, HopMode, HopOutcome, RelayRegionSides,
    RoutingState,
};
use crate::rng::SimRng;
use topology::{gen_area_topology, gen_per_hop_topology_with_dst, PER_HOP_DST, PER_HOP_SRC};

/// How each replication lays out its nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TopologyMode {
    /// One contending neighborhood: source at the origin, destination two
    /// ranges out, neighbors uniform in the source's disk. One hop per run.
    PerHopDisk,
    /// Nodes uniform in a square, source and destination nearest to
    /// opposite corners, full routes per run.
    MultiHopArea,
}

/// Full experiment parameterization.
#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub channel: ChannelParams,
    pub modulation: Modulation,
    /// Constellation of control frames and headers.
    pub control_modulation: Modulation,
    /// Override of the modulation-derived metric constants.
    pub ser_override: Option<SerConstants>,
    /// Metric exponent; defaults to the channel path-loss exponent.
    pub metric_exponent: Option<f64>,
    pub t_max_us: f64,
    pub nsa: u32,
    /// Collision window; defaults to one control-frame airtime.
    pub collision_window_us: Option<f64>,
    pub jitter: bool,
    pub contention_retries: u32,
    pub relay_region: RelayRegionSides,
    pub recovery_enabled: bool,
    pub packet_size_octets: u32,
    pub control_frame_octets: u32,
    pub range_m: f64,
    pub neighbor_count: u32,
    /// Destination distance in per-hop mode; defaults to two ranges.
    pub dst_distance_m: Option<f64>,
    pub topology_mode: TopologyMode,
    pub node_count: u32,
    /// Side of the deployment square; defaults to four ranges.
    pub area_side_m: Option<f64>,
    pub require_connected: bool,
    pub replications: u32,
    pub runs_per_topology: u32,
    pub seed: u64,
    pub cooperative: bool,
    /// 0 means four hops per node.
    pub hop_limit: u32,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            channel: ChannelParams::default(),
            modulation: Modulation::new(64).expect("64-QAM is supported"),
            control_modulation: Modulation::new(4).expect("QPSK is supported"),
            ser_override: None,
            metric_exponent: None,
            t_max_us: 500.0,
            nsa: 8,
            collision_window_us: None,
            jitter: true,
            contention_retries: 0,
            relay_region: RelayRegionSides::Both,
            recovery_enabled: true,
            packet_size_octets: 1538,
            control_frame_octets: 20,
            range_m: 1.2,
            neighbor_count: 10,
            dst_distance_m: None,
            topology_mode: TopologyMode::PerHopDisk,
            node_count: 50,
            area_side_m: None,
            require_connected: true,
            replications: 20_000,
            runs_per_topology: 1,
            seed: 1,
            cooperative: true,
            hop_limit: 0,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        self.channel.validate()?;
        if self.topology_mode == TopologyMode::PerHopDisk
            && !(1..=20).contains(&self.neighbor_count)
        {
            return Err(Error::InvalidConfig(format!(
                "neighbor_count must lie in [1, 20] in per-hop mode, got {}",
                self.neighbor_count
            )));
        }
        if self.replications < 1 {
            return Err(Error::InvalidConfig("replications must be >= 1".into()));
        }
        if self.runs_per_topology < 1 {
            return Err(Error::InvalidConfig(
                "runs_per_topology must be >= 1".into(),
            ));
        }
        if self.node_count < 2 {
            return Err(Error::InvalidConfig("node_count must be >= 2".into()));
        }
        if !(self.range_m > 0.0) {
            return Err(Error::InvalidConfig("range_m must be > 0".into()));
        }
        if !(self.packet_size_octets > 0) {
            return Err(Error::InvalidConfig(
                "packet_size_octets must be > 0".into(),
            ));
        }
        if !(self.control_frame_octets > 0) {
            return Err(Error::InvalidConfig(
                "control_frame_octets must be > 0".into(),
            ));
        }
        if let Some(w) = self.collision_window_us {
            if w < 0.0 {
                return Err(Error::InvalidConfig(
                    "collision_window_us must be >= 0".into(),
                ));
            }
        }
        if let Some(side) = self.area_side_m {
            if !(side > 0.0) {
                return Err(Error::InvalidConfig("area_side_m must be > 0".into()));
            }
        }
        if let Some(d) = self.dst_distance_m {
            if !(d > 0.0) {
                return Err(Error::InvalidConfig("dst_distance_m must be > 0".into()));
            }
        }
        if let Some(p) = self.metric_exponent {
            if !(p >= 2.0) {
                return Err(Error::InvalidConfig("metric_exponent must be >= 2".into()));
            }
        }
        if let Some(c) = self.ser_override {
            if !(c.a_squared > 0.0 && c.b > 0.0) {
                return Err(Error::InvalidConfig(
                    "ser constants must be strictly positive".into(),
                ));
            }
        }
        let contention = ContentionConfig {
            t_max_us: self.t_max_us,
            nsa: self.nsa,
            collision_window_us: self.collision_window_us.unwrap_or(0.0),
            jitter: self.jitter,
        };
        contention.validate()?;
        Ok(())
    }

    /// The error constants actually in effect: the override if present,
    /// otherwise the modulation-derived defaults.
    pub fn effective_ser_constants(&self) -> SerConstants {
        self.ser_override
            .unwrap_or_else(|| ser_constants(self.modulation))
    }

    /// Symbols per data packet at the configured constellation.
    pub fn data_symbols(&self) -> u32 {
        symbols_for(self.packet_size_octets, self.modulation)
    }

    /// Symbols per control frame, at the control constellation.
    pub fn control_symbols(&self) -> u32 {
        symbols_for(self.control_frame_octets, self.control_modulation)
    }

    /// Airtime of a data packet, in microseconds.
    pub fn data_airtime_us(&self) -> f64 {
        airtime_us(
            u64::from(self.packet_size_octets) * 8,
            self.modulation,
            &self.channel,
        )
    }

    /// Airtime of a control frame, in microseconds.
    pub fn control_airtime_us(&self) -> f64 {
        airtime_us(
            u64::from(self.control_frame_octets) * 8,
            self.control_modulation,
            &self.channel,
        )
    }

    pub fn effective_collision_window_us(&self) -> f64 {
        self.collision_window_us
            .unwrap_or_else(|| self.control_airtime_us())
    }

    pub fn effective_area_side_m(&self) -> f64 {
        self.area_side_m.unwrap_or(4.0 * self.range_m)
    }

    pub fn effective_dst_distance_m(&self) -> f64 {
        self.dst_distance_m.unwrap_or(2.0 * self.range_m)
    }

    pub fn effective_hop_limit(&self, nodes: usize) -> u32 {
        if self.hop_limit == 0 {
            default_hop_limit(nodes)
        } else {
            self.hop_limit
        }
    }

    /// Resolve every derived quantity into the per-hop context.
    pub fn hop_context(&self) -> Result<HopContext> {
        self.validate()?;
        let constants = self.effective_ser_constants();
        let metric = RelayMetricParams::new(
            constants.a_squared,
            constants.b,
            self.metric_exponent
                .unwrap_or(self.channel.path_loss_exponent),
        )?;
        Ok(HopContext {
            channel: self.channel,
            contention: ContentionConfig {
                t_max_us: self.t_max_us,
                nsa: self.nsa,
                collision_window_us: self.effective_collision_window_us(),
                jitter: self.jitter,
            },
            modulation: self.modulation,
            ctl_modulation: self.control_modulation,
            metric,
            relay_region: self.relay_region,
            recovery_enabled: self.recovery_enabled,
            cooperative: self.cooperative,
            contention_retries: self.contention_retries,
            n_data_symbols: self.data_symbols(),
            n_ctl_symbols: self.control_symbols(),
            data_airtime_us: self.data_airtime_us(),
            ctl_airtime_us: self.control_airtime_us(),
            payload_bits: u64::from(self.packet_size_octets) * 8,
        })
    }
}

/// Whole symbols needed for `octets` at the given constellation.
pub fn symbols_for(octets: u32, modulation: Modulation) -> u32 {
    let bits = u64::from(octets) * 8;
    let per = u64::from(modulation.bits_per_symbol());
    bits.div_ceil(per) as u32
}

/// Airtime of `bits` at one symbol per hertz-second of bandwidth,
/// in microseconds.
pub fn airtime_us(bits: u64, modulation: Modulation, channel: &ChannelParams) -> f64 {
    let symbol_rate = channel.bandwidth_hz;
    bits as f64 / (f64::from(modulation.bits_per_symbol()) * symbol_rate) * 1e6
}

/// 95% confidence half-widths of the reported estimates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Ci95 {
    pub per: f64,
    pub tx_error_prob: f64,
    pub saturated_throughput_bps: f64,
    pub collision_rate: f64,
}

/// Aggregate metrics of one experiment cell.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    /// Fraction of hops failing from collision or channel error.
    pub per: f64,
    /// Fraction of data transmissions whose final decode failed.
    pub tx_error_prob: f64,
    pub saturated_throughput_bps: f64,
    /// Fraction of hops that saw at least one contention collision.
    pub collision_rate: f64,
    pub ci95: Ci95,
    pub replications_used: u32,
}

/// Success flag and occupancy of one hop cycle, the input to the
/// throughput estimator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HopCycle {
    pub success: bool,
    pub cycle_us: f64,
}

/// Saturated throughput of a stream of hop cycles:
/// `payload_bits * success_fraction / mean(cycle_time)`.
pub fn saturated_throughput(cycles: &[HopCycle], payload_bits: u64) -> f64 {
    if cycles.is_empty() {
        return 0.0;
    }
    let successes = cycles.iter().filter(|c| c.success).count();
    if successes == 0 {
        return 0.0;
    }
    let mean_cycle_s = cycles.iter().map(|c| c.cycle_us).sum::<f64>() / cycles.len() as f64 * 1e-6;
    payload_bits as f64 * (successes as f64 / cycles.len() as f64) / mean_cycle_s
}

/// Time one hop occupied the channel, per the cycle model: a contention
/// period per round, the airtime of every data copy, the airtime of every
/// control frame, and the relay window when a relay transmitted.
pub fn hop_cycle_us(outcome: &HopOutcome, ctx: &HopContext) -> f64 {
    let t_max = ctx.contention.t_max_us;
    let contention = match outcome.mode {
        // Selection plus protest extends the window by half.
        HopMode::Recovery => 1.5 * t_max,
        _ => t_max,
    } * f64::from(1 + outcome.collision_count);
    let mut data_frames = 0u32;
    let mut control_frames = 0u32;
    for f in &outcome.events {
        match f.kind {
            crate::protocol::FrameKind::Data => data_frames += 1,
            _ => control_frames += 1,
        }
    }
    let relay_window = if outcome.mode == HopMode::GreedyCooperative {
        ctx.cbr_window_us()
    } else {
        0.0
    };
    contention
        + f64::from(data_frames) * ctx.data_airtime_us
        + f64::from(control_frames) * ctx.ctl_airtime_us
        + relay_window
}

#[derive(Clone, Copy, Debug, Default)]
struct Tally {
    hops: u64,
    failed_hops: u64,
    attempts: u64,
    decode_failures: u64,
    hops_with_collision: u64,
    successes: u64,
    cycle_us_sum: f64,
    cycle_us_sq_sum: f64,
}

impl Tally {
    fn absorb_hop(&mut self, hop: &HopOutcome, ctx: &HopContext) {
        self.hops += 1;
        if hop.failed() {
            self.failed_hops += 1;
        }
        if hop.forwarder.is_some() {
            self.attempts += 1;
            if hop.channel_failure {
                self.decode_failures += 1;
            }
        }
        if hop.collision_count > 0 {
            self.hops_with_collision += 1;
        }
        if !hop.failed() {
            self.successes += 1;
        }
        let cycle = hop_cycle_us(hop, ctx);
        self.cycle_us_sum += cycle;
        self.cycle_us_sq_sum += cycle * cycle;
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.hops += other.hops;
        self.failed_hops += other.failed_hops;
        self.attempts += other.attempts;
        self.decode_failures += other.decode_failures;
        self.hops_with_collision += other.hops_with_collision;
        self.successes += other.successes;
        self.cycle_us_sum += other.cycle_us_sum;
        self.cycle_us_sq_sum += other.cycle_us_sq_sum;
        self
    }
}

fn proportion_ci95(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 0.0);
    }
    let p = successes as f64 / trials as f64;
    (p, 1.96 * (p * (1.0 - p) / trials as f64).sqrt())
}

/// Execute the configured number of independent replications and fold
/// their tallies in replication order.
///
/// Replication `i` draws from substream `(seed, i)`; the fold order is
/// fixed, so the report is identical no matter how the replications are
/// scheduled.
pub fn run_replications(cfg: &SimConfig) -> Result<MetricsReport> {
    let ctx = cfg.hop_context()?;
    let tallies: Vec<Tally> = (0..cfg.replications)
        .into_par_iter()
        .map(|i| replicate(cfg, &ctx, u64::from(i)))
        .collect();
    let total = tallies.into_iter().fold(Tally::default(), Tally::merge);

    let (per, per_ci) = proportion_ci95(total.failed_hops, total.hops);
    let (tx_err, tx_ci) = proportion_ci95(total.decode_failures, total.attempts);
    let (coll, coll_ci) = proportion_ci95(total.hops_with_collision, total.hops);

    let payload_bits = u64::from(cfg.packet_size_octets) * 8;
    let n = total.hops as f64;
    let (throughput, thr_ci) = if total.hops == 0 || total.successes == 0 {
        (0.0, 0.0)
    } else {
        let mean_cycle_s = total.cycle_us_sum / n * 1e-6;
        let p_succ = total.successes as f64 / n;
        let thr = payload_bits as f64 * p_succ / mean_cycle_s;
        // Delta-method error of the ratio estimator.
        let var_p = p_succ * (1.0 - p_succ) / n;
        let mean_cycle_us = total.cycle_us_sum / n;
        let var_cycle = (total.cycle_us_sq_sum / n - mean_cycle_us * mean_cycle_us).max(0.0) / n;
        let rel_var = var_p / (p_succ * p_succ) + var_cycle / (mean_cycle_us * mean_cycle_us);
        (thr, 1.96 * thr * rel_var.sqrt())
    };

    Ok(MetricsReport {
        per,
        tx_error_prob: tx_err,
        saturated_throughput_bps: throughput,
        collision_rate: coll,
        ci95: Ci95 {
            per: per_ci,
            tx_error_prob: tx_ci,
            saturated_throughput_bps: thr_ci,
            collision_rate: coll_ci,
        },
        replications_used: cfg.replications,
    })
}

fn replicate(cfg: &SimConfig, ctx: &HopContext, index: u64) -> Tally {
    let mut rng = SimRng::substream(cfg.seed, index);
    let mut tally = Tally::default();
    match cfg.topology_mode {
        TopologyMode::PerHopDisk => {
            let topo = gen_per_hop_topology_with_dst(
                cfg.neighbor_count,
                cfg.range_m,
                cfg.effective_dst_distance_m(),
                &mut rng,
            );
            for _ in 0..cfg.runs_per_topology {
                let mut state = RoutingState::new();
                let hop = run_hop(&topo, PER_HOP_SRC, PER_HOP_DST, ctx, &mut state, &mut rng);
                tally.absorb_hop(&hop, ctx);
            }
        }
        TopologyMode::MultiHopArea => {
            let (topo, src, dst) = gen_area_topology(
                cfg.node_count,
                cfg.effective_area_side_m(),
                cfg.range_m,
                cfg.require_connected,
                &mut rng,
            );
            let hop_limit = cfg.effective_hop_limit(topo.len());
            for _ in 0..cfg.runs_per_topology {
                let report = run_route(&topo, src, dst, ctx, &mut rng, hop_limit);
                for hop in &report.hops {
                    tally.absorb_hop(hop, ctx);
                }
            }
        }
    }
    tally
}
