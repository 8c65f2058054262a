//! Physical-layer abstraction.
//!
//! A link is a power-law path-loss budget feeding a flat Rayleigh fading
//! draw; packets survive a draw with probability `(1 - SER)^n` where the
//! symbol error rate is the square M-QAM expression. Cooperative reception
//! sums the instantaneous SNRs of the direct and relayed copies
//! (maximal-ratio combining).
//!
//! One fading draw is taken per (link, transmission attempt): block fading
//! within a packet. Control frames are treated as reliably decodable; the
//! channel acts on data payloads, and short-frame losses are covered by the
//! contention collision model instead.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SimRng;

/// Link-budget inputs.
///
/// Defaults follow the simulated environment this crate ships with, with
/// one reinterpretation worth calling out: the noise entries arrive as
/// "20 dBm average noise, 15 dBm noise figure", which would drown a 25 dBm
/// transmitter. They are read here as a -20 dBm noise floor and a 15 dB
/// noise figure; both remain overridable in every config surface.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub tx_power_dbm: f64,
    pub noise_power_dbm: f64,
    pub noise_figure_db: f64,
    pub carrier_freq_hz: f64,
    pub bandwidth_hz: f64,
    pub path_loss_exponent: f64,
    pub reference_distance_m: f64,
}

impl Default for ChannelParams {
    fn default() -> Self {
        Self {
            tx_power_dbm: 25.0,
            noise_power_dbm: -20.0,
            noise_figure_db: 15.0,
            carrier_freq_hz: 2.412e9,
            bandwidth_hz: 22.0e6,
            path_loss_exponent: 2.0,
            reference_distance_m: 1.0,
        }
    }
}

impl ChannelParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.bandwidth_hz > 0.0) {
            return Err(Error::InvalidConfig("bandwidth_hz must be > 0".into()));
        }
        if !(self.path_loss_exponent >= 2.0) {
            return Err(Error::InvalidConfig(
                "path_loss_exponent must be >= 2".into(),
            ));
        }
        if !(self.reference_distance_m > 0.0) {
            return Err(Error::InvalidConfig(
                "reference_distance_m must be > 0".into(),
            ));
        }
        Ok(())
    }

    /// Link margin at the reference distance, in dB.
    pub fn margin_db(&self) -> f64 {
        self.tx_power_dbm - self.noise_power_dbm - self.noise_figure_db
    }
}

#[inline]
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Square-QAM constellation. Supported sizes: 4, 16, 64.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Modulation {
    m: u32,
}

impl Modulation {
    pub fn new(m: u32) -> Result<Self> {
        match m {
            4 | 16 | 64 => Ok(Self { m }),
            other => Err(Error::UnsupportedConstellation(other)),
        }
    }

    #[inline]
    pub fn size(self) -> u32 {
        self.m
    }

    #[inline]
    pub fn bits_per_symbol(self) -> u32 {
        self.m.ilog2()
    }
}

/// Modulation-dependent constants weighing the source and destination legs
/// of the relay metric.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SerConstants {
    pub a_squared: f64,
    pub b: f64,
}

/// Default error constants for a constellation of size M:
/// `A = (1/pi) integral_0^{(M-1)pi/M} sin^2`, `B` the same with `sin^4`,
/// which evaluate to the closed forms used here. Returned as `(A^2, B)`.
pub fn ser_constants(modulation: Modulation) -> SerConstants {
    let m = f64::from(modulation.size());
    let two_pi_over_m = 2.0 * std::f64::consts::PI / m;
    let a = (m - 1.0) / (2.0 * m) + two_pi_over_m.sin() / (4.0 * std::f64::consts::PI);
    let b = 3.0 * (m - 1.0) / (8.0 * m) + two_pi_over_m.sin() / (4.0 * std::f64::consts::PI)
        - (2.0 * two_pi_over_m).sin() / (32.0 * std::f64::consts::PI);
    SerConstants {
        a_squared: a * a,
        b,
    }
}

/// One fading realization of a link.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinkDraw {
    pub instantaneous_snr: f64,
}

/// Mean SNR (linear) of a link of length `d`:
/// the linear link margin scaled by `(d_ref / d)^p`.
///
/// Distances below the reference are rejected rather than clamped; callers
/// decide how to treat the near field.
pub fn mean_snr(d: f64, params: &ChannelParams) -> Result<f64> {
    if d < params.reference_distance_m {
        return Err(Error::BelowReferenceDistance {
            distance: d,
            reference: params.reference_distance_m,
        });
    }
    Ok(db_to_linear(params.margin_db())
        * (params.reference_distance_m / d).powf(params.path_loss_exponent))
}

/// Rayleigh fading: the instantaneous SNR is exponential with the given mean.
pub fn draw_rayleigh_snr(mean: f64, rng: &mut SimRng) -> Result<LinkDraw> {
    if !(mean > 0.0) {
        return Err(Error::NonPositiveMeanSnr);
    }
    Ok(LinkDraw {
        instantaneous_snr: rng.exponential(mean),
    })
}

/// Gaussian tail function.
#[inline]
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Symbol error rate of square M-QAM at the given linear SNR:
/// `1 - (1 - 2(1 - 1/sqrt(M)) Q(sqrt(3 snr / (M-1))))^2`.
pub fn ser_mqam(snr: f64, modulation: Modulation) -> f64 {
    debug_assert!(snr >= 0.0);
    let m = f64::from(modulation.size());
    let arg = (3.0 * snr / (m - 1.0)).sqrt();
    let per_axis = 2.0 * (1.0 - 1.0 / m.sqrt()) * q_function(arg);
    1.0 - (1.0 - per_axis) * (1.0 - per_axis)
}

/// Probability that all `n_symbols` symbols of a packet survive.
pub fn packet_success(ser: f64, n_symbols: u32) -> f64 {
    debug_assert!((0.0..=1.0).contains(&ser));
    (1.0 - ser).powi(n_symbols as i32)
}

/// Maximal-ratio combining of two independently received copies.
#[inline]
pub fn mrc_combine(snr_direct: f64, snr_relay: f64) -> f64 {
    debug_assert!(snr_direct >= 0.0 && snr_relay >= 0.0);
    snr_direct + snr_relay
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qpsk() -> Modulation {
        Modulation::new(4).unwrap()
    }

    #[test]
    fn modulation_rejects_non_square() {
        assert!(Modulation::new(8).is_err());
        assert!(Modulation::new(0).is_err());
        assert_eq!(Modulation::new(64).unwrap().bits_per_symbol(), 6);
    }

    #[test]
    fn mean_snr_reference_and_decade() {
        let params = ChannelParams::default();
        // Full margin at the reference distance: 25 - (-20) - 15 = 30 dB.
        let at_ref = mean_snr(1.0, &params).unwrap();
        assert!((at_ref - 1000.0).abs() < 1e-9);
        // One decade out with p = 2: margin / 100.
        let at_10 = mean_snr(10.0, &params).unwrap();
        assert!((at_10 - 10.0).abs() < 1e-9);
        // Doubling distance divides the mean by 4.
        let d1 = mean_snr(3.0, &params).unwrap();
        let d2 = mean_snr(6.0, &params).unwrap();
        assert!((d1 / d2 - 4.0).abs() < 1e-9);
    }

    #[test]
    fn mean_snr_rejects_near_field() {
        let params = ChannelParams::default();
        assert!(matches!(
            mean_snr(0.5, &params),
            Err(Error::BelowReferenceDistance { .. })
        ));
    }

    #[test]
    fn rayleigh_sample_mean_and_tail() {
        let mut rng = SimRng::from_seed(17);
        let n = 1_000_000;
        let mean = 10.0;
        let mut sum = 0.0;
        let mut above = 0u32;
        for _ in 0..n {
            let draw = draw_rayleigh_snr(mean, &mut rng).unwrap().instantaneous_snr;
            sum += draw;
            if draw > mean {
                above += 1;
            }
        }
        let sample_mean = sum / f64::from(n);
        assert!((sample_mean - mean).abs() < 0.03, "mean {sample_mean}");
        let tail = f64::from(above) / f64::from(n);
        assert!((tail - (-1.0f64).exp()).abs() < 0.0015, "tail {tail}");
    }

    #[test]
    fn rayleigh_rejects_zero_mean() {
        let mut rng = SimRng::from_seed(1);
        assert!(matches!(
            draw_rayleigh_snr(0.0, &mut rng),
            Err(Error::NonPositiveMeanSnr)
        ));
    }

    #[test]
    fn ser_at_zero_and_infinity() {
        for m in [4, 16, 64] {
            let modulation = Modulation::new(m).unwrap();
            let expect = 1.0 - 1.0 / f64::from(m);
            assert!((ser_mqam(0.0, modulation) - expect).abs() < 1e-12);
            assert!(ser_mqam(1e9, modulation) < 1e-12);
        }
        assert!((ser_mqam(0.0, qpsk()) - 0.75).abs() < 1e-12);
    }

    #[test]
    fn ser_monotone_in_snr_and_constellation() {
        let snrs: Vec<f64> = (0..200).map(|i| f64::from(i) * 0.5).collect();
        for m in [4, 16, 64] {
            let modulation = Modulation::new(m).unwrap();
            for w in snrs.windows(2) {
                assert!(ser_mqam(w[1], modulation) <= ser_mqam(w[0], modulation) + 1e-15);
            }
        }
        for &snr in &snrs {
            let s4 = ser_mqam(snr, Modulation::new(4).unwrap());
            let s16 = ser_mqam(snr, Modulation::new(16).unwrap());
            let s64 = ser_mqam(snr, Modulation::new(64).unwrap());
            assert!(s4 <= s16 + 1e-15 && s16 <= s64 + 1e-15);
        }
    }

    #[test]
    fn qpsk_ser_against_symbol_simulation() {
        // 1e6 QPSK symbols through AWGN at snr = 10; Gray-free symbol errors.
        let modulation = qpsk();
        let snr = 10.0;
        let predicted = ser_mqam(snr, modulation);
        let mut rng = SimRng::from_seed(23);
        let n = 1_000_000u32;
        let sigma = (1.0 / (2.0 * snr)).sqrt();
        let mut errors = 0u32;
        for _ in 0..n {
            // Unit-energy QPSK: components +-1/sqrt(2).
            let si = if rng.bernoulli(0.5) { 1.0 } else { -1.0 } / 2f64.sqrt();
            let sq = if rng.bernoulli(0.5) { 1.0 } else { -1.0 } / 2f64.sqrt();
            let (g1, g2) = gaussian_pair(&mut rng);
            let ri = si + sigma * g1;
            let rq = sq + sigma * g2;
            if ri.signum() != si.signum() || rq.signum() != sq.signum() {
                errors += 1;
            }
        }
        let measured = f64::from(errors) / f64::from(n);
        let sd = (predicted * (1.0 - predicted) / f64::from(n)).sqrt();
        assert!(
            (measured - predicted).abs() < 3.0 * sd,
            "measured {measured}, predicted {predicted}"
        );
    }

    fn gaussian_pair(rng: &mut SimRng) -> (f64, f64) {
        let u1 = (1.0 - rng.uniform()).max(1e-300);
        let u2 = rng.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let th = 2.0 * std::f64::consts::PI * u2;
        (r * th.cos(), r * th.sin())
    }

    #[test]
    fn packet_success_cases() {
        assert_eq!(packet_success(0.0, 6152), 1.0);
        assert_eq!(packet_success(1.0, 6152), 0.0);
        // 1538 octets at 2 bits/symbol.
        assert!((packet_success(1e-4, 6152) - 0.5405).abs() < 1e-4);
    }

    #[test]
    fn packet_success_monotone() {
        assert!(packet_success(1e-3, 2000) < packet_success(1e-3, 1000));
        assert!(packet_success(2e-3, 1000) < packet_success(1e-3, 1000));
    }

    #[test]
    fn mrc_cases_and_dominance() {
        assert_eq!(mrc_combine(3.0, 0.0), 3.0);
        assert_eq!(mrc_combine(3.0, 4.0), 7.0);
        // Commutative exactly, associative up to float rounding.
        let (a, b, c) = (0.37, 118.2, 5.0e3);
        assert_eq!(mrc_combine(a, b), mrc_combine(b, a));
        let left = mrc_combine(mrc_combine(a, b), c);
        let right = mrc_combine(a, mrc_combine(b, c));
        assert!((left - right).abs() <= 1e-12 * left);
        let modulation = qpsk();
        let mut rng = SimRng::from_seed(31);
        for _ in 0..100_000 {
            let a = rng.exponential(5.0);
            let b = rng.exponential(20.0);
            let combined = ser_mqam(mrc_combine(a, b), modulation);
            let direct = ser_mqam(a, modulation);
            let relayed = ser_mqam(b, modulation);
            assert!(combined <= direct.min(relayed) + 1e-15);
        }
    }

    #[test]
    fn ser_constants_qpsk_closed_form() {
        let c = ser_constants(qpsk());
        let a = 0.375 + 1.0 / (4.0 * std::f64::consts::PI);
        assert!((c.a_squared - a * a).abs() < 1e-12);
        assert!((a - 0.4546).abs() < 1e-4);
        assert!((c.a_squared - 0.2066).abs() < 1e-4);
        assert!((c.b - 0.3608).abs() < 1e-4);
    }

    #[test]
    fn ser_constants_match_quadrature() {
        // A = (1/pi) int_0^{(M-1)pi/M} sin^2, B the same with sin^4.
        for m in [4u32, 16, 64] {
            let modulation = Modulation::new(m).unwrap();
            let c = ser_constants(modulation);
            let upper = (f64::from(m) - 1.0) * std::f64::consts::PI / f64::from(m);
            let a_num = simpson(|t| t.sin().powi(2), 0.0, upper, 20_000) / std::f64::consts::PI;
            let b_num = simpson(|t| t.sin().powi(4), 0.0, upper, 20_000) / std::f64::consts::PI;
            assert!((c.a_squared - a_num * a_num).abs() < 1e-10);
            assert!((c.b - b_num).abs() < 1e-10);
            assert!(c.a_squared > 0.0 && c.b > 0.0);
        }
    }

    #[test]
    fn link_per_matches_quadrature_expectation() {
        // Monte-Carlo per-link PER against the closed-form expectation
        // integral over the exponential fading density.
        let modulation = Modulation::new(16).unwrap();
        let n_symbols = 3076;
        let mean = 80.0;
        let mut rng = SimRng::from_seed(41);
        let n = 200_000u32;
        let mut failures = 0u32;
        for _ in 0..n {
            let draw = draw_rayleigh_snr(mean, &mut rng).unwrap();
            let ps = packet_success(ser_mqam(draw.instantaneous_snr, modulation), n_symbols);
            if !rng.bernoulli(ps) {
                failures += 1;
            }
        }
        let measured = f64::from(failures) / f64::from(n);
        let expected = 1.0
            - simpson(
                |g| packet_success(ser_mqam(g, modulation), n_symbols) * (-g / mean).exp() / mean,
                0.0,
                mean * 50.0,
                200_000,
            );
        let sd = (expected * (1.0 - expected) / f64::from(n)).sqrt();
        assert!(
            (measured - expected).abs() < 3.0 * sd,
            "measured {measured}, expected {expected}"
        );
    }

    fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
        let n = if n.is_multiple_of(2) { n } else { n + 1 };
        let h = (b - a) / n as f64;
        let mut acc = f(a) + f(b);
        for i in 1..n {
            let w = if i % 2 == 0 { 2.0 } else { 4.0 };
            acc += w * f(a + i as f64 * h);
        }
        acc * h / 3.0
    }
}
