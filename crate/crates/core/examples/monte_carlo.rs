//! Seeded Monte Carlo over repeated attempts, serial and parallel.

use ion_photon::config::Config;
use ion_photon::protocol::{sample_run, sample_run_parallel};

fn main() -> ion_photon::Result<()> {
    let mut exp = Config::preset("bell_cavity")?.run(None)?.experiment;
    for seed in [1, 2, 3] {
        exp.seed = seed;
        let serial = sample_run(&exp, 100_000)?;
        let parallel = sample_run_parallel(&exp, 100_000)?;
        assert_eq!(serial, parallel);
        println!("seed {seed}: emitted {} of {}, counts {:?}, within 3 sigma: {}", serial.emitted, serial.trials, serial.counts, serial.within_3sigma);
    }
    Ok(())
}
