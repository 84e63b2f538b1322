//! Shared fixtures for the benchmark targets.

use lpwave::initial_data::{make_bump, make_packet, PacketSpec};
use lpwave::{Grid, RealField};

/// A bump-modulated packet on an `N`-point production-density grid.
pub fn packet_fixture(n: usize) -> RealField {
    let grid = Grid::new(128.0, n).expect("bench grid");
    let bump = make_bump(&grid).expect("bench bump");
    make_packet(&PacketSpec::single(2, 1), &bump).expect("bench packet")
}
