//! Three ions in lossy cavities: the eight GHZ-class photon states and the
//! probability that all three photons were emitted.

use ion_photon::cavity::CavitySetup;
use ion_photon::config::Config;
use ion_photon::constants::MRAD_PER_S;
use ion_photon::protocol::run_pipeline;

fn main() -> ion_photon::Result<()> {
    let mut exp = Config::preset("ghz3_ideal")?.run(None)?.experiment;
    exp.cavities = vec![CavitySetup::symmetric(10.0 * MRAD_PER_S, 138.4 * MRAD_PER_S, 0.1 * MRAD_PER_S, 960.0 * MRAD_PER_S)?; 3];
    let out = run_pipeline(&exp)?;
    for row in &out.table.rows {
        println!("|{}>  p = {:.6}  ->  {}", row.ions, row.probability, row.photon_state);
    }
    println!("all three photons emitted with probability {:.6}", out.emission.total_probability);
    Ok(())
}
