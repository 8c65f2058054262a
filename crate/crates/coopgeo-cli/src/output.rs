//! Self-describing result records and their CSV/JSON encodings.
//!
//! Every record embeds the full effective configuration and the seed, so a
//! results file can be re-run from its own header. Metric values are
//! rounded to six significant digits before encoding, which makes the CSV
//! and JSON encodings of one run numerically identical.

use std::io::Write;

use coopgeo::protocol::{Frame, FrameKind, RelayRegionSides};
use coopgeo::simcore::{MetricsReport, SimConfig, TopologyMode};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// One cell value, typed so JSON keeps numbers as numbers.
#[derive(Clone, Debug)]
pub enum Value {
    Float(f64),
    Int(u64),
    Bool(bool),
    Text(&'static str),
}

impl Value {
    fn to_json(&self) -> serde_json::Value {
        match self {
            Value::Float(x) => serde_json::json!(x),
            Value::Int(x) => serde_json::json!(x),
            Value::Bool(x) => serde_json::json!(x),
            Value::Text(x) => serde_json::json!(x),
        }
    }

    fn to_csv(&self) -> String {
        match self {
            Value::Float(x) => format!("{x}"),
            Value::Int(x) => format!("{x}"),
            Value::Bool(x) => format!("{x}"),
            Value::Text(x) => (*x).to_string(),
        }
    }
}

/// Round to six significant digits.
pub fn sig6(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let mag = x.abs().log10().floor();
    let factor = 10f64.powf(5.0 - mag);
    (x * factor).round() / factor
}

/// An ordered list of (column, value) pairs.
pub type Record = Vec<(&'static str, Value)>;

fn region_name(r: RelayRegionSides) -> &'static str {
    match r {
        RelayRegionSides::Upper => "upper",
        RelayRegionSides::Lower => "lower",
        RelayRegionSides::Both => "both",
    }
}

fn mode_name(m: TopologyMode) -> &'static str {
    match m {
        TopologyMode::PerHopDisk => "per-hop-disk",
        TopologyMode::MultiHopArea => "multi-hop-area",
    }
}

/// Metric columns shared by `run` and `sweep` records.
fn metric_columns(report: &MetricsReport) -> Record {
    vec![
        ("per", Value::Float(sig6(report.per))),
        ("tx_error_prob", Value::Float(sig6(report.tx_error_prob))),
        (
            "saturated_throughput_bps",
            Value::Float(sig6(report.saturated_throughput_bps)),
        ),
        ("per_ci95", Value::Float(sig6(report.ci95.per))),
        (
            "tx_error_prob_ci95",
            Value::Float(sig6(report.ci95.tx_error_prob)),
        ),
        (
            "saturated_throughput_bps_ci95",
            Value::Float(sig6(report.ci95.saturated_throughput_bps)),
        ),
        ("collision_rate", Value::Float(sig6(report.collision_rate))),
        (
            "collision_rate_ci95",
            Value::Float(sig6(report.ci95.collision_rate)),
        ),
        (
            "replications",
            Value::Int(u64::from(report.replications_used)),
        ),
    ]
}

/// The full effective configuration, echoed into every record.
fn config_columns(cfg: &SimConfig) -> Record {
    let constants = cfg.effective_ser_constants();
    vec![
        ("seed", Value::Int(cfg.seed)),
        ("cooperative", Value::Bool(cfg.cooperative)),
        ("neighbor_count", Value::Int(u64::from(cfg.neighbor_count))),
        ("topology_mode", Value::Text(mode_name(cfg.topology_mode))),
        (
            "constellation_size",
            Value::Int(u64::from(cfg.modulation.size())),
        ),
        (
            "control_constellation_size",
            Value::Int(u64::from(cfg.control_modulation.size())),
        ),
        (
            "packet_size_octets",
            Value::Int(u64::from(cfg.packet_size_octets)),
        ),
        (
            "control_frame_octets",
            Value::Int(u64::from(cfg.control_frame_octets)),
        ),
        ("tx_power_dbm", Value::Float(sig6(cfg.channel.tx_power_dbm))),
        (
            "noise_power_dbm",
            Value::Float(sig6(cfg.channel.noise_power_dbm)),
        ),
        (
            "noise_figure_db",
            Value::Float(sig6(cfg.channel.noise_figure_db)),
        ),
        (
            "carrier_freq_hz",
            Value::Float(sig6(cfg.channel.carrier_freq_hz)),
        ),
        ("bandwidth_hz", Value::Float(sig6(cfg.channel.bandwidth_hz))),
        (
            "path_loss_exponent",
            Value::Float(sig6(cfg.channel.path_loss_exponent)),
        ),
        (
            "reference_distance_m",
            Value::Float(sig6(cfg.channel.reference_distance_m)),
        ),
        ("range_m", Value::Float(sig6(cfg.range_m))),
        (
            "dst_distance_m",
            Value::Float(sig6(cfg.effective_dst_distance_m())),
        ),
        ("t_max_us", Value::Float(sig6(cfg.t_max_us))),
        ("nsa", Value::Int(u64::from(cfg.nsa))),
        (
            "collision_window_us",
            Value::Float(sig6(cfg.effective_collision_window_us())),
        ),
        ("jitter", Value::Bool(cfg.jitter)),
        (
            "contention_retries",
            Value::Int(u64::from(cfg.contention_retries)),
        ),
        ("a_squared", Value::Float(sig6(constants.a_squared))),
        ("b", Value::Float(sig6(constants.b))),
        (
            "metric_exponent",
            Value::Float(sig6(
                cfg.metric_exponent
                    .unwrap_or(cfg.channel.path_loss_exponent),
            )),
        ),
        ("relay_region", Value::Text(region_name(cfg.relay_region))),
        ("recovery_enabled", Value::Bool(cfg.recovery_enabled)),
        ("node_count", Value::Int(u64::from(cfg.node_count))),
        (
            "area_side_m",
            Value::Float(sig6(cfg.effective_area_side_m())),
        ),
        ("require_connected", Value::Bool(cfg.require_connected)),
        (
            "runs_per_topology",
            Value::Int(u64::from(cfg.runs_per_topology)),
        ),
        ("hop_limit", Value::Int(u64::from(cfg.hop_limit))),
    ]
}

/// Record for `run`: metrics first, then the config echo.
pub fn run_record(cfg: &SimConfig, report: &MetricsReport) -> Record {
    let mut rec = metric_columns(report);
    rec.extend(config_columns(cfg));
    rec
}

/// Record for one sweep cell: the axis and flag lead, then metrics and the
/// config echo.
pub fn sweep_record(
    axis: &'static str,
    axis_value: u32,
    cfg: &SimConfig,
    report: &MetricsReport,
) -> Record {
    let mut rec: Record = vec![
        ("sweep_axis", Value::Text(axis)),
        ("axis_value", Value::Int(u64::from(axis_value))),
        ("cooperative", Value::Bool(cfg.cooperative)),
    ];
    rec.extend(metric_columns(report));
    // The cooperative flag already led the record.
    rec.extend(
        config_columns(cfg)
            .into_iter()
            .filter(|(k, _)| *k != "cooperative"),
    );
    rec
}

pub fn write_records<W: Write>(
    mut w: W,
    records: &[Record],
    format: OutputFormat,
) -> Result<(), CliError> {
    match format {
        OutputFormat::Csv => {
            let Some(first) = records.first() else {
                return Ok(());
            };
            let header: Vec<&str> = first.iter().map(|(k, _)| *k).collect();
            writeln!(w, "{}", header.join(","))?;
            for rec in records {
                debug_assert!(rec.iter().map(|(k, _)| *k).eq(header.iter().copied()));
                let row: Vec<String> = rec.iter().map(|(_, v)| v.to_csv()).collect();
                writeln!(w, "{}", row.join(","))?;
            }
        }
        OutputFormat::Json => {
            let rows: Vec<serde_json::Value> = records
                .iter()
                .map(|rec| {
                    let mut obj = serde_json::Map::new();
                    for (k, v) in rec {
                        obj.insert((*k).to_string(), v.to_json());
                    }
                    serde_json::Value::Object(obj)
                })
                .collect();
            serde_json::to_writer_pretty(&mut w, &rows).map_err(|e| CliError::Io(e.to_string()))?;
            writeln!(w)?;
        }
    }
    Ok(())
}

/// Frame-log rows for `trace`: time in microseconds, frame kind, sender,
/// and the kind-specific flag (`decoded=`, `target=`, `against=`).
pub fn write_frames<W: Write>(
    mut w: W,
    frames: &[Frame],
    format: OutputFormat,
) -> Result<(), CliError> {
    let flag = |f: &Frame| -> String {
        match f.kind {
            FrameKind::Ctf { decoded_ok } => format!("decoded={decoded_ok}"),
            FrameKind::Select { target } => format!("target={target}"),
            FrameKind::Protest { against } => format!("against={against}"),
            FrameKind::Data | FrameKind::Ctr => String::new(),
        }
    };
    match format {
        OutputFormat::Csv => {
            writeln!(w, "time_us,kind,sender,flag")?;
            for f in frames {
                writeln!(
                    w,
                    "{},{},{},{}",
                    sig6(f.sent_at_us),
                    f.kind.name(),
                    f.sender,
                    flag(f)
                )?;
            }
        }
        OutputFormat::Json => {
            let rows: Vec<serde_json::Value> = frames
                .iter()
                .map(|f| {
                    serde_json::json!({
                        "time_us": sig6(f.sent_at_us),
                        "kind": f.kind.name(),
                        "sender": f.sender.0,
                        "flag": flag(f),
                    })
                })
                .collect();
            serde_json::to_writer_pretty(&mut w, &rows).map_err(|e| CliError::Io(e.to_string()))?;
            writeln!(w)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig6_rounding() {
        assert_eq!(sig6(0.0), 0.0);
        assert_eq!(sig6(0.123456789), 0.123457);
        assert_eq!(sig6(20_490_109.002826), 20_490_100.0);
        assert_eq!(sig6(1.0e-7), 1.0e-7);
        assert_eq!(sig6(-0.0123456789), -0.0123457);
    }

    #[test]
    fn csv_roundtrip_equals_value() {
        for x in [0.0794, 0.123457, 2.04901e7, 3.63636e-1] {
            let printed = Value::Float(sig6(x)).to_csv();
            let parsed: f64 = printed.parse().unwrap();
            assert_eq!(parsed.to_bits(), sig6(x).to_bits());
        }
    }
}
