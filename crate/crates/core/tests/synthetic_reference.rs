//! Continuous synthetic PageRank against reference values computed
//! independently (adaptive Gauss-Kronrod integrals, dense LU solve).

use temporank::accumulate::uniform_partition;
use temporank::presets::paper_synthetic;
use temporank::quadrature::QuadratureConfig;
use temporank::{trajectory_continuous, DampingSchedule, DecayKernel, PersonalizationSchedule, TrajectoryOptions};

const REFERENCE: &[(f64, f64, [f64; 5])] = &[
    (-4.0, 0.0, [0.2918918918918919, 0.11270270270270272, 0.2, 0.1954054054054054, 0.2]),
    (-4.0, 0.25, [0.30367902253211193, 0.19724906267026682, 0.18477522380443642, 0.1747000980349764, 0.13959659295820834]),
    (-4.0, 0.5, [0.2850515665774053, 0.22694214470195212, 0.19729208960597103, 0.156384583308142, 0.13432961580652955]),
    (-4.0, 1.0, [0.265148054898395, 0.23476591307554875, 0.2077121268152095, 0.15532748409670147, 0.13704642111414542]),
    (1.0, 0.0, [0.2918918918918919, 0.11270270270270272, 0.2, 0.1954054054054054, 0.2]),
    (1.0, 0.25, [0.2998840862360135, 0.21200094743227157, 0.18740862585661625, 0.16628688443609177, 0.13441945603900698]),
    (1.0, 0.5, [0.25067487950334744, 0.26503327774469043, 0.2230386680958543, 0.1268397253120477, 0.13441344934406027]),
    (1.0, 1.0, [0.1696859651285076, 0.2610271337723377, 0.25743896204274774, 0.15333503732715117, 0.15851290172925567]),
    (6.0, 0.0, [0.2918918918918919, 0.11270270270270272, 0.2, 0.1954054054054054, 0.2]),
    (6.0, 0.25, [0.295471819569965, 0.22532741472391746, 0.19065610014250636, 0.15793978425984245, 0.1306048813037688]),
    (6.0, 0.5, [0.21019362241421782, 0.29414881280581034, 0.25429741416640683, 0.10013946322272353, 0.14122068739084162]),
    (6.0, 1.0, [0.1494700762696145, 0.2511369322584438, 0.2538351520752683, 0.17950129327665776, 0.1660565461200156]),
];

#[test]
fn matches_reference() {
    let net = paper_synthetic().unwrap();
    let grid = uniform_partition(0.0, 1.0, 5);
    for alpha in [-4.0, 1.0, 6.0] {
        let opts = TrajectoryOptions::new(
            DecayKernel::exponential(alpha),
            DampingSchedule::Constant(0.85),
            PersonalizationSchedule::Uniform,
        );
        let traj = trajectory_continuous(&net, &opts, &grid, &QuadratureConfig::default()).unwrap();
        for (a, t, expected) in REFERENCE.iter().filter(|r| r.0 == alpha) {
            let k = grid.iter().position(|g| g == t).unwrap();
            for (i, (x, y)) in traj.scores[k].iter().zip(expected).enumerate() {
                assert!((x - y).abs() < 1e-9, "alpha {a}, t {t}, node {}: {x} vs {y}", i + 1);
            }
        }
    }
}
