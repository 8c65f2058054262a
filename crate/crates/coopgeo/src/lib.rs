//! Deterministic simulator for beaconless geographic forwarding with
//! contention-based cooperative relaying.
//!
//! The crate models one contending neighborhood (or a full deployment) of
//! position-aware radios: next hops are elected by progress-staggered
//! timers without beacons, voids are bypassed by face routing over a
//! locally planarized (Gabriel) subgraph built with a select-and-protest
//! exchange, and failed payload decodes are repaired by a single
//! geographically chosen decode-and-forward relay whose copy is combined
//! at the receiver. The physical layer is a power-law link budget with
//! flat Rayleigh fading and square M-QAM symbol error rates.
//!
//! Everything is seedable and replications use independent derived
//! streams, so every experiment is bit-reproducible.

// Validation guards are written as `!(x > 0.0)` on purpose: the negated
// form rejects NaN along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod contention;
pub mod error;
pub mod geometry;
pub mod protocol;
pub mod rng;
pub mod simcore;

pub use channel::{ChannelParams, Modulation, SerConstants};
pub use contention::{Bid, BidKind, ContentionConfig, ContentionOutcome, ContentionResult};
pub use error::{Error, Result};
pub use geometry::{Point2D, ProgressClass, RelayMetricParams, ReuleauxRegion};
pub use protocol::{
    DeliveryReport, Frame, FrameKind, HopContext, HopMode, HopOutcome, PlanarNeighborhood,
    RelayRegionSides, RoutingState,
};
pub use rng::SimRng;
pub use simcore::topology::{NodeId, Topology};
pub use simcore::{MetricsReport, SimConfig, TopologyMode};
