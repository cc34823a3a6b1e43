//! Wall-clock benchmark crate; see `benches/algorithms.rs`. Operation-count
//! scaling lives in the core acceptance tests, not here.
