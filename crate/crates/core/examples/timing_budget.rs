//! Time per attempt, (N - 1) t0 + t1, with and without pulse overheads.

use std::f64::consts::PI;

use ion_photon::config::Config;
use ion_photon::protocol::{timing_estimate, timing_report};

fn main() -> ion_photon::Result<()> {
    let j = 6328.0;
    let t0 = PI / (2.0 * j);
    println!("J = {j} rad/s: t0 = {t0:.4e} s, N=2 total with t1 = 0: {:.4e} s", timing_estimate(2, t0, 0.0)?);

    for preset in ["bell_cavity", "ghz3_ideal", "ghz5_ideal"] {
        let mut exp = Config::preset(preset)?.run(None)?.experiment;
        exp.pi_pulse = 20e-6;
        exp.t1 = 0.5e-3;
        let t = timing_report(&exp, &exp.couplings()?)?;
        println!(
            "{preset}: t0 {:.4e} s, overhead x{:.3}, total {:.4e} s ({:.4e} s bare)",
            t.t0_with_overhead_s, t.echo_overhead_factor, t.total_with_overhead_s, t.total_no_overhead_s
        );
    }
    Ok(())
}
