//! Flat key-value experiment configuration.
//!
//! One `key = value` per line, `#` starts a comment, unknown keys are hard
//! errors. Every key has a default, so an empty file is a complete
//! configuration. Values out of range are rejected with the offending key
//! and bound named.

use std::path::Path;

use coopgeo::channel::{Modulation, SerConstants};
use coopgeo::protocol::RelayRegionSides;
use coopgeo::simcore::{SimConfig, TopologyMode};

use crate::CliError;

/// Which scalar a sweep varies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepAxis {
    NeighborCount,
    Constellation,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::NeighborCount => "neighbor_count",
            SweepAxis::Constellation => "constellation_size",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub values: Vec<u32>,
    /// Emit each axis value under both cooperative flags.
    pub both_cooperative: bool,
}

/// A parsed experiment: the base configuration plus an optional sweep.
#[derive(Clone, Debug)]
pub struct ExperimentSpec {
    pub base: SimConfig,
    pub sweep: Option<SweepSpec>,
}

pub fn load_config(path: &Path) -> Result<ExperimentSpec, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<ExperimentSpec, CliError> {
    let mut cfg = SimConfig::default();
    let mut sweep_axis: Option<SweepAxis> = None;
    let mut sweep_values: Option<Vec<u32>> = None;
    let mut both_cooperative = true;
    let mut ser_a: Option<f64> = None;
    let mut ser_b: Option<f64> = None;
    let mut seen: Vec<String> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Config(format!(
                "line {line_no}: expected `key = value`, got `{line}`"
            )));
        };
        let key = key.trim();
        let value = value.trim();
        if seen.iter().any(|k| k == key) {
            return Err(CliError::Config(format!(
                "line {line_no}: duplicate key `{key}`"
            )));
        }
        seen.push(key.to_string());

        let err = |msg: String| CliError::Config(format!("line {line_no}: {msg}"));
        let f = |v: &str| -> Result<f64, CliError> {
            v.parse::<f64>()
                .map_err(|_| err(format!("`{key}` expects a number, got `{v}`")))
        };
        let u = |v: &str| -> Result<u32, CliError> {
            v.parse::<u32>()
                .map_err(|_| err(format!("`{key}` expects a non-negative integer, got `{v}`")))
        };
        let b = |v: &str| -> Result<bool, CliError> {
            match v {
                "true" | "1" | "yes" | "on" => Ok(true),
                "false" | "0" | "no" | "off" => Ok(false),
                _ => Err(err(format!("`{key}` expects true/false, got `{v}`"))),
            }
        };

        match key {
            "tx_power_dbm" => cfg.channel.tx_power_dbm = f(value)?,
            "noise_power_dbm" => cfg.channel.noise_power_dbm = f(value)?,
            "noise_figure_db" => cfg.channel.noise_figure_db = f(value)?,
            "carrier_freq_hz" => cfg.channel.carrier_freq_hz = f(value)?,
            "bandwidth_hz" => cfg.channel.bandwidth_hz = f(value)?,
            "path_loss_exponent" => cfg.channel.path_loss_exponent = f(value)?,
            "reference_distance_m" => cfg.channel.reference_distance_m = f(value)?,
            "constellation_size" => {
                cfg.modulation =
                    Modulation::new(u(value)?).map_err(|e| err(format!("`{key}`: {e}")))?;
            }
            "control_constellation_size" => {
                cfg.control_modulation =
                    Modulation::new(u(value)?).map_err(|e| err(format!("`{key}`: {e}")))?;
            }
            "ser_a_squared" => ser_a = Some(f(value)?),
            "ser_b" => ser_b = Some(f(value)?),
            "metric_exponent" => cfg.metric_exponent = Some(f(value)?),
            "t_max_us" => cfg.t_max_us = f(value)?,
            "nsa" => cfg.nsa = u(value)?,
            "collision_window_us" => cfg.collision_window_us = Some(f(value)?),
            "jitter" => cfg.jitter = b(value)?,
            "contention_retries" => cfg.contention_retries = u(value)?,
            "control_frame_octets" => cfg.control_frame_octets = u(value)?,
            "relay_region" => {
                cfg.relay_region = match value {
                    "upper" => RelayRegionSides::Upper,
                    "lower" => RelayRegionSides::Lower,
                    "both" => RelayRegionSides::Both,
                    _ => {
                        return Err(err(format!(
                            "`{key}` expects upper|lower|both, got `{value}`"
                        )))
                    }
                }
            }
            "recovery_enabled" => cfg.recovery_enabled = b(value)?,
            "hop_limit" => cfg.hop_limit = u(value)?,
            "packet_size_octets" => cfg.packet_size_octets = u(value)?,
            "range_m" => cfg.range_m = f(value)?,
            "dst_distance_m" => cfg.dst_distance_m = Some(f(value)?),
            "neighbor_count" => {
                let n = u(value)?;
                if !(1..=20).contains(&n) {
                    return Err(err(format!(
                        "`neighbor_count` must lie in [1, 20], got {n}"
                    )));
                }
                cfg.neighbor_count = n;
            }
            "topology_mode" => {
                cfg.topology_mode = match value {
                    "per-hop-disk" => TopologyMode::PerHopDisk,
                    "multi-hop-area" => TopologyMode::MultiHopArea,
                    _ => {
                        return Err(err(format!(
                            "`{key}` expects per-hop-disk|multi-hop-area, got `{value}`"
                        )))
                    }
                }
            }
            "node_count" => cfg.node_count = u(value)?,
            "area_side_m" => cfg.area_side_m = Some(f(value)?),
            "require_connected" => cfg.require_connected = b(value)?,
            "replications" => cfg.replications = u(value)?,
            "runs_per_topology" => cfg.runs_per_topology = u(value)?,
            "seed" => {
                cfg.seed = value
                    .parse::<u64>()
                    .map_err(|_| err(format!("`seed` expects a 64-bit integer, got `{value}`")))?;
            }
            "cooperative" => cfg.cooperative = b(value)?,
            "sweep_axis" => {
                sweep_axis = Some(match value {
                    "neighbor_count" => SweepAxis::NeighborCount,
                    "constellation" | "constellation_size" => SweepAxis::Constellation,
                    _ => {
                        return Err(err(format!(
                            "`{key}` expects neighbor_count|constellation, got `{value}`"
                        )))
                    }
                })
            }
            "sweep_values" => sweep_values = Some(parse_values(value).map_err(err)?),
            "sweep_cooperative" => {
                both_cooperative = match value {
                    "both" => true,
                    "fixed" => false,
                    _ => return Err(err(format!("`{key}` expects both|fixed, got `{value}`"))),
                }
            }
            _ => {
                return Err(err(format!("unknown key `{key}`")));
            }
        }
    }

    match (ser_a, ser_b) {
        (None, None) => {}
        (Some(a), Some(bb)) => {
            cfg.ser_override = Some(SerConstants {
                a_squared: a,
                b: bb,
            })
        }
        _ => {
            return Err(CliError::Config(
                "ser_a_squared and ser_b must be set together".into(),
            ))
        }
    }

    let sweep = match (sweep_axis, sweep_values) {
        (None, None) => None,
        (Some(axis), values) => {
            let values = values.unwrap_or_else(|| default_sweep_values(axis));
            if values.is_empty() {
                return Err(CliError::Config("sweep_values must be non-empty".into()));
            }
            for &v in &values {
                match axis {
                    SweepAxis::NeighborCount => {
                        if !(1..=20).contains(&v) {
                            return Err(CliError::Config(format!(
                                "sweep value {v} outside the neighbor_count bound [1, 20]"
                            )));
                        }
                    }
                    SweepAxis::Constellation => {
                        Modulation::new(v).map_err(|e| CliError::Config(e.to_string()))?;
                    }
                }
            }
            Some(SweepSpec {
                axis,
                values,
                both_cooperative,
            })
        }
        (None, Some(_)) => {
            return Err(CliError::Config(
                "sweep_values given without sweep_axis".into(),
            ))
        }
    };

    cfg.validate()
        .map_err(|e| CliError::Config(e.to_string()))?;
    Ok(ExperimentSpec { base: cfg, sweep })
}

fn default_sweep_values(axis: SweepAxis) -> Vec<u32> {
    match axis {
        SweepAxis::NeighborCount => (1..=20).collect(),
        SweepAxis::Constellation => vec![4, 16, 64],
    }
}

/// `1,2,5` lists and `2-20` inclusive ranges, mixed freely.
fn parse_values(text: &str) -> Result<Vec<u32>, String> {
    let mut out = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        if let Some((lo, hi)) = part.split_once('-') {
            let lo: u32 = lo
                .trim()
                .parse()
                .map_err(|_| format!("bad range start in `{part}`"))?;
            let hi: u32 = hi
                .trim()
                .parse()
                .map_err(|_| format!("bad range end in `{part}`"))?;
            if lo > hi {
                return Err(format!("empty range `{part}`"));
            }
            out.extend(lo..=hi);
        } else {
            out.push(part.parse().map_err(|_| format!("bad value `{part}`"))?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_gives_full_defaults() {
        let spec = parse_config("").unwrap();
        assert_eq!(spec.base.t_max_us, 500.0);
        assert_eq!(spec.base.packet_size_octets, 1538);
        assert_eq!(spec.base.modulation.size(), 64);
        assert_eq!(spec.base.channel.tx_power_dbm, 25.0);
        assert!(spec.sweep.is_none());
    }

    #[test]
    fn neighbor_count_bound_is_named() {
        let err = parse_config("neighbor_count = 21").unwrap_err().to_string();
        assert!(err.contains("[1, 20]"), "{err}");
        assert!(err.contains("line 1"), "{err}");
    }

    #[test]
    fn noise_override_accepted() {
        let spec = parse_config("noise_power_dbm = -20").unwrap();
        assert_eq!(spec.base.channel.noise_power_dbm, -20.0);
    }

    #[test]
    fn unknown_key_is_rejected_with_line() {
        let err = parse_config("t_max_us = 500\nbogus_key = 1")
            .unwrap_err()
            .to_string();
        assert!(err.contains("line 2"), "{err}");
        assert!(err.contains("bogus_key"), "{err}");
    }

    #[test]
    fn comments_and_blank_lines_ignored() {
        let spec = parse_config("# a comment\n\nseed = 9 # trailing\n").unwrap();
        assert_eq!(spec.base.seed, 9);
    }

    #[test]
    fn duplicate_key_rejected() {
        let err = parse_config("seed = 1\nseed = 2").unwrap_err().to_string();
        assert!(err.contains("duplicate"), "{err}");
    }

    #[test]
    fn sweep_ranges_parse() {
        let spec = parse_config("sweep_axis = neighbor_count\nsweep_values = 2-4,7\n").unwrap();
        let sweep = spec.sweep.unwrap();
        assert_eq!(sweep.values, vec![2, 3, 4, 7]);
        assert!(sweep.both_cooperative);
    }

    #[test]
    fn sweep_value_bound_checked() {
        let err = parse_config("sweep_axis = neighbor_count\nsweep_values = 1-25\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("[1, 20]"), "{err}");
    }

    #[test]
    fn ser_override_needs_both_constants() {
        assert!(parse_config("ser_a_squared = 1.0").is_err());
        let spec = parse_config("ser_a_squared = 1.0\nser_b = 1.0").unwrap();
        let c = spec.base.effective_ser_constants();
        assert_eq!((c.a_squared, c.b), (1.0, 1.0));
    }
}
