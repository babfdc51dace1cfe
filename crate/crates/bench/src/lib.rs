//! Benchmarks for the regionlab core live in `benches/`. This crate only
//! provides the fixtures they share.

use regionlab_core::{build_system, ChannelParams, CodingParams, SignalSystem};

/// An interior operating point of the first comparison setting.
pub fn fixture() -> SignalSystem {
    let ch = ChannelParams {
        p1: 4.0,
        p2: 6.0,
        p3: 2.0,
        c21: 0.09,
        c12: 4.0,
    };
    let cp = CodingParams {
        alpha: 0.6,
        beta: 0.5,
        lam1: 0.3,
        lam2: 1.0,
        lam3: 1.0,
        gamma1: 0.8,
        gamma2: 0.4,
    };
    build_system(ch, cp).expect("fixture parameters are in range")
}
