use celltraj::evolution::{smooth_trajectory, EvolutionParams};
use celltraj::synth;
use celltraj::testing::polyline_crossings;
use std::time::Instant;

fn main() {
    for hbar in [0.5, 0.25] {
        for (name, traj) in [
            ("f8 r1.6 ppl28", synth::figure_eight("f8s", 28, 1.6, 2.5)),
            ("f8 r2.0 ppl36", synth::figure_eight("f8b", 36, 2.0, 2.5)),
            ("t3 r1.4 ppl14", synth::triple_loop("t3", 14, 1.4, 2.5)),
            ("t3 r1.8 ppl18", synth::triple_loop("t3b", 18, 1.8, 2.5)),
        ] {
            for (tag, params) in [
                ("tau2e-4", EvolutionParams { tau: 2e-4, ..Default::default() }),
                ("tau5e-4 d.01", EvolutionParams { tau: 5e-4, delta_min: 0.01, delta_max: 0.03, ..Default::default() }),
            ] {
                let t0 = Instant::now();
                match smooth_trajectory(&traj, hbar, &params) {
                    Ok(res) => {
                        let crossings = polyline_crossings(&res.curve.points);
                        let dead = res.ledger.segments().iter().filter(|s| s.disappeared).count();
                        let detail: Vec<String> = crossings.iter().map(|&(a, b)| {
                            let p = res.curve.points[a];
                            format!("({a},{b},gap{},len{:.3})", b - 1 - a,
                                res.curve.points[a-1..=b].windows(2).map(|w| w[0].distance(w[1])).sum::<f64>())
                        }).collect();
                        println!(
                            "hbar={hbar} {name:<14} {tag:<13} steps={:<7} conv={} dead={}/{} pts={} cross={:?} {:?}",
                            res.steps, res.converged, dead,
                            res.ledger.len(), res.curve.points.len(), detail, t0.elapsed()
                        );
                    }
                    Err(e) => println!("hbar={hbar} {name:<14} {tag:<13} ERROR {e}"),
                }
            }
        }
    }
}
