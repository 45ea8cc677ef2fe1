//! Built-in networks.

use crate::error::Result;
use crate::network::ContinuousTemporalNetwork;
use crate::timefn::TimeFunction;

pub const PAPER_SYNTHETIC: &str = "paper-synthetic";

/// Edge expressions of the five-node undirected synthetic network on
/// `[0, 1]`, as 1-based `(i, j, a_ij(t))`.
pub const SYNTHETIC_EDGES: [(usize, usize, &str); 6] = [
    (1, 2, "0.5*(sin(2*pi*t)+1)"),
    (3, 5, "0.5"),
    (3, 4, "(exp(t)-1)/e"),
    (2, 5, "t^2"),
    (1, 4, "0.5*(cos(2*pi*t)+1)"),
    (2, 3, "1-(t-1)^2"),
];

pub fn paper_synthetic() -> Result<ContinuousTemporalNetwork> {
    let edges = SYNTHETIC_EDGES
        .iter()
        .map(|&(i, j, src)| Ok((i - 1, j - 1, TimeFunction::parse(src)?)))
        .collect::<Result<Vec<_>>>()?;
    ContinuousTemporalNetwork::new(5, (0.0, 1.0), true, edges)
}

pub fn by_name(name: &str) -> Option<Result<ContinuousTemporalNetwork>> {
    match name {
        PAPER_SYNTHETIC => Some(paper_synthetic()),
        _ => None,
    }
}
