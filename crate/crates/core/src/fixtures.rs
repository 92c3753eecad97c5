//! Small reference networks.
//!
//! Node numbering follows the graph convention of this crate: states first,
//! then inputs in order. The JSON files under `fixtures/` at the repository
//! root describe the same networks.

use crate::graph::{Sign, SignedNetwork};

use Sign::{Negative as N, Positive as P};

/// Five states, three inputs on states 3, 4 and 5, with a nominal weighting.
pub fn fig1() -> SignedNetwork {
    let weights = [
        (1, 2, 2.0),
        (1, 3, 1.0),
        (1, 5, -1.0),
        (2, 3, 1.0),
        (2, 4, 1.0),
        (2, 5, -1.0),
        (3, 4, 1.0),
        (4, 5, 3.0),
    ];
    SignedNetwork::new(5, weights.iter().map(|&(i, j, w)| (i, j, Sign::of(w))), [3, 4, 5])
        .and_then(|net| net.with_nominal_weights(weights))
        .expect("valid fixture")
}

/// `fig1` plus the edge (1,4) (positive).
pub fn fig8() -> SignedNetwork {
    fig1().with_edge_sign(1, 4, P).expect("valid fixture")
}

/// `fig8` topology with a mostly negative sign assignment under which some
/// integer weightings are uncontrollable.
pub fn fig8_signs() -> SignedNetwork {
    SignedNetwork::new(
        5,
        [
            (1, 2, P),
            (1, 3, N),
            (1, 4, N),
            (1, 5, N),
            (2, 3, N),
            (2, 4, N),
            (2, 5, N),
            (3, 4, N),
            (4, 5, P),
        ],
        [3, 4, 5],
    )
    .expect("valid fixture")
}

/// Path 1-2-3-4 driven at state 4.
pub fn fig2a() -> SignedNetwork {
    path(4)
}

/// Two leaves 1 and 2 hanging off state 3, which carries the only input.
pub fn fig2b() -> SignedNetwork {
    SignedNetwork::new(3, [(1, 3, P), (2, 3, P)], [3]).expect("valid fixture")
}

/// Triangle with one input at state 3.
pub fn fig3a() -> SignedNetwork {
    SignedNetwork::new(3, [(1, 2, P), (1, 3, P), (2, 3, P)], [3]).expect("valid fixture")
}

/// Triangle with inputs at states 3 and 1.
pub fn fig3b() -> SignedNetwork {
    SignedNetwork::new(3, [(1, 2, P), (1, 3, P), (2, 3, P)], [3, 1]).expect("valid fixture")
}

/// Four-cycle 1-2-3-4-1 with inputs at states 3 and 1.
pub fn fig4() -> SignedNetwork {
    SignedNetwork::new(4, [(1, 2, P), (1, 4, P), (3, 4, P), (2, 3, P)], [3, 1]).expect("valid fixture")
}

/// A driven path 1-2-3-4 and a doubly driven triangle 5-6-7 joined by (2,6).
pub fn fig5() -> SignedNetwork {
    SignedNetwork::new(
        7,
        [(1, 2, P), (2, 3, P), (3, 4, P), (5, 6, P), (5, 7, P), (6, 7, P), (2, 6, P)],
        [4, 7, 5],
    )
    .expect("valid fixture")
}

/// Path on `len` states driven at the last one.
pub fn path(len: usize) -> SignedNetwork {
    SignedNetwork::new(len, (1..len).map(|i| (i, i + 1, P)), [len]).expect("valid fixture")
}
