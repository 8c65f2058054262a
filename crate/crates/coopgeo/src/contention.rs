//! Contention timers and winner resolution.
//!
//! Three timer families share one resolution rule: forwarding candidates
//! stagger by progress sub-area, planarization responders by distance to
//! the sender, relay candidates by their mapped metric. The earliest timer
//! wins unless another bid lands within the collision window, in which case
//! the round is a collision.

use crate::rng::SimRng;
use crate::simcore::topology::NodeId;

/// Timer parameters for one contention process.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContentionConfig {
    /// Maximum waiting time of a round, in microseconds.
    pub t_max_us: f64,
    /// Number of common sub-areas; even, at least 2.
    pub nsa: u32,
    /// Two bids within this window of each other collide, in microseconds.
    pub collision_window_us: f64,
    /// With jitter off, timers degenerate to their deterministic base so
    /// rounds are generically collision-free.
    pub jitter: bool,
}

impl ContentionConfig {
    pub fn validate(&self) -> Result<(), crate::error::Error> {
        if !(self.t_max_us > 0.0) {
            return Err(crate::error::Error::InvalidConfig(
                "t_max_us must be > 0".into(),
            ));
        }
        if self.nsa < 2 || !self.nsa.is_multiple_of(2) {
            return Err(crate::error::Error::InvalidConfig(
                "nsa must be even and >= 2".into(),
            ));
        }
        if self.collision_window_us < 0.0 {
            return Err(crate::error::Error::InvalidConfig(
                "collision_window_us must be >= 0".into(),
            ));
        }
        Ok(())
    }
}

/// What a pending timer will send when it fires.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BidKind {
    Ctf,
    Ctr,
    Protest,
}

/// One armed timer in a contention round.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bid {
    pub node: NodeId,
    pub fire_time_us: f64,
    pub kind: BidKind,
}

/// Outcome of a round.
#[derive(Clone, Debug, PartialEq)]
pub enum ContentionOutcome {
    Winner(NodeId),
    Collision(Vec<NodeId>),
    Silence,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContentionResult {
    pub outcome: ContentionOutcome,
    pub resolved_at_us: f64,
}

impl ContentionResult {
    pub fn winner(&self) -> Option<NodeId> {
        match self.outcome {
            ContentionOutcome::Winner(id) => Some(id),
            _ => None,
        }
    }
}

/// Forwarding timer: sub-area base plus uniform jitter over one band,
/// `csa * t_max/nsa + U(0, t_max/nsa)`. Positive-progress candidates
/// always fire in the first half window.
pub fn t_cbf(csa: u32, cfg: &ContentionConfig, rng: &mut SimRng) -> f64 {
    debug_assert!(csa < cfg.nsa);
    let band = cfg.t_max_us / f64::from(cfg.nsa);
    let jitter = if cfg.jitter {
        rng.uniform_in(band)
    } else {
        0.0
    };
    f64::from(csa) * band + jitter
}

/// Planarization response timer: affine in the distance to the sender,
/// `t_max/2 * (1 + d/range)`, plus at most `t_max/(4 nsa)` of jitter.
/// Always at or after `t_max/2`, so recovery responses start once the
/// greedy half-window has expired.
pub fn t_bfp(d_to_sender: f64, range: f64, cfg: &ContentionConfig, rng: &mut SimRng) -> f64 {
    debug_assert!(d_to_sender > 0.0 && d_to_sender <= range);
    let base = 0.5 * cfg.t_max_us * (1.0 + d_to_sender / range);
    let jitter = if cfg.jitter {
        rng.uniform_in(cfg.t_max_us / (4.0 * f64::from(cfg.nsa)))
    } else {
        0.0
    };
    base + jitter
}

/// Relay timer: `t_max * mapped + U(0, 2 t_max/nsa)` over the mapped
/// metric in `[0, 1]`.
pub fn t_cbr(mapped: f64, cfg: &ContentionConfig, rng: &mut SimRng) -> f64 {
    debug_assert!((0.0..=1.0).contains(&mapped));
    let jitter = if cfg.jitter {
        rng.uniform_in(2.0 * cfg.t_max_us / f64::from(cfg.nsa))
    } else {
        0.0
    };
    cfg.t_max_us * mapped + jitter
}

/// Resolve a round: the earliest bid wins and suppresses the rest, unless
/// another bid fires within the collision window of it. Deterministic and
/// invariant under permutations of the bid list.
pub fn resolve(bids: &[Bid], cfg: &ContentionConfig) -> ContentionResult {
    let Some(first) = bids
        .iter()
        .min_by(|a, b| {
            a.fire_time_us
                .total_cmp(&b.fire_time_us)
                .then(a.node.cmp(&b.node))
        })
        .copied()
    else {
        return ContentionResult {
            outcome: ContentionOutcome::Silence,
            resolved_at_us: 0.0,
        };
    };
    let mut colliding: Vec<NodeId> = bids
        .iter()
        .filter(|b| b.fire_time_us - first.fire_time_us <= cfg.collision_window_us)
        .map(|b| b.node)
        .collect();
    colliding.sort_unstable();
    colliding.dedup();
    let outcome = if colliding.len() >= 2 {
        ContentionOutcome::Collision(colliding)
    } else {
        ContentionOutcome::Winner(first.node)
    };
    ContentionResult {
        outcome,
        resolved_at_us: first.fire_time_us,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg(jitter: bool) -> ContentionConfig {
        ContentionConfig {
            t_max_us: 500.0,
            nsa: 4,
            collision_window_us: 20.0,
            jitter,
        }
    }

    fn bid(node: u32, at: f64) -> Bid {
        Bid {
            node: NodeId(node),
            fire_time_us: at,
            kind: BidKind::Ctf,
        }
    }

    #[test]
    fn cbf_band_bounds() {
        let mut rng = SimRng::from_seed(2);
        assert_eq!(t_cbf(0, &cfg(false), &mut rng), 0.0);
        for _ in 0..1000 {
            let t = t_cbf(1, &cfg(true), &mut rng);
            assert!((125.0..250.0).contains(&t), "t = {t}");
            let t = t_cbf(3, &cfg(true), &mut rng);
            assert!((375.0..500.0).contains(&t), "t = {t}");
        }
    }

    #[test]
    fn bfp_affine_form() {
        let mut rng = SimRng::from_seed(3);
        let c = cfg(false);
        assert!((t_bfp(100.0, 100.0, &c, &mut rng) - 500.0).abs() < 1e-12);
        assert!((t_bfp(1e-9, 100.0, &c, &mut rng) - 250.0).abs() < 1e-6);
        assert!((t_bfp(50.0, 100.0, &c, &mut rng) - 375.0).abs() < 1e-12);
        let jittered = cfg(true);
        for _ in 0..1000 {
            let t = t_bfp(30.0, 100.0, &jittered, &mut rng);
            assert!(t >= 250.0);
            assert!(t < 0.5 * 500.0 * 1.3 + 500.0 / 16.0 + 1e-9);
        }
    }

    #[test]
    fn cbr_bounds() {
        let mut rng = SimRng::from_seed(4);
        let c = cfg(false);
        assert_eq!(t_cbr(0.0, &c, &mut rng), 0.0);
        assert_eq!(t_cbr(1.0, &c, &mut rng), 500.0);
        let jittered = cfg(true);
        for _ in 0..1000 {
            let t = t_cbr(0.5, &jittered, &mut rng);
            assert!((250.0..500.0).contains(&t), "t = {t}");
        }
    }

    #[test]
    fn resolve_cases() {
        let c = cfg(false);
        assert_eq!(resolve(&[], &c).outcome, ContentionOutcome::Silence);
        let r = resolve(&[bid(1, 100.0), bid(2, 300.0)], &c);
        assert_eq!(r.outcome, ContentionOutcome::Winner(NodeId(1)));
        assert_eq!(r.resolved_at_us, 100.0);
        let r = resolve(&[bid(1, 100.0), bid(2, 110.0)], &c);
        assert_eq!(
            r.outcome,
            ContentionOutcome::Collision(vec![NodeId(1), NodeId(2)])
        );
    }

    proptest! {
        #[test]
        fn cbf_stays_in_band(csa in 0u32..4, seed in 0u64..500) {
            let mut rng = SimRng::from_seed(seed);
            let c = cfg(true);
            let band = c.t_max_us / f64::from(c.nsa);
            let t = t_cbf(csa, &c, &mut rng);
            prop_assert!(t >= f64::from(csa) * band);
            prop_assert!(t < f64::from(csa + 1) * band);
        }

        #[test]
        fn ppa_fires_before_npa(seed in 0u64..200) {
            let mut rng = SimRng::from_seed(seed);
            let c = cfg(true);
            let ppa_max = (0..c.nsa / 2)
                .map(|csa| t_cbf(csa, &c, &mut rng))
                .fold(f64::MIN, f64::max);
            let npa_min = (c.nsa / 2..c.nsa)
                .map(|csa| t_cbf(csa, &c, &mut rng))
                .fold(f64::MAX, f64::min);
            prop_assert!(ppa_max < c.t_max_us / 2.0);
            prop_assert!(npa_min >= c.t_max_us / 2.0);
        }

        #[test]
        fn cbr_order_preserving_without_jitter(a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let mut rng = SimRng::from_seed(0);
            let c = cfg(false);
            let ta = t_cbr(a, &c, &mut rng);
            let tb = t_cbr(b, &c, &mut rng);
            if a < b {
                prop_assert!(ta < tb);
            }
        }

        #[test]
        fn resolve_permutation_invariant(times in prop::collection::vec(0.0f64..500.0, 1..8), swap_seed in 0u64..64) {
            let c = cfg(false);
            let bids: Vec<Bid> = times
                .iter()
                .enumerate()
                .map(|(i, &t)| bid(i as u32, t))
                .collect();
            let mut shuffled = bids.clone();
            // Cheap deterministic shuffle.
            let mut s = swap_seed;
            for i in (1..shuffled.len()).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                shuffled.swap(i, (s % (i as u64 + 1)) as usize);
            }
            prop_assert_eq!(resolve(&bids, &c), resolve(&shuffled, &c));
        }

        #[test]
        fn zero_window_distinct_times_always_wins(times in prop::collection::vec(0.0f64..500.0, 2..8)) {
            let mut unique = times.clone();
            unique.sort_by(f64::total_cmp);
            unique.dedup();
            prop_assume!(unique.len() == times.len());
            let c = ContentionConfig { collision_window_us: 0.0, ..cfg(false) };
            let bids: Vec<Bid> = times.iter().enumerate().map(|(i, &t)| bid(i as u32, t)).collect();
            prop_assert!(matches!(resolve(&bids, &c).outcome, ContentionOutcome::Winner(_)));
        }
    }
}
