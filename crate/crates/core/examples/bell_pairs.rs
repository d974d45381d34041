//! Two ions, two photons: the four ion measurement outcomes and the Bell
//! pair each one heralds.

use ion_photon::config::Config;
use ion_photon::protocol::run_pipeline;

fn main() -> ion_photon::Result<()> {
    let run = Config::preset("bell_ideal")?.run(None)?;
    let out = run_pipeline(&run.experiment)?;
    println!("J12 = {:.2} rad/s", out.couplings.get(0, 1));
    for row in &out.table.rows {
        println!("|{}>  p = {:.6}  ->  {}", row.ions, row.probability, row.photon_state);
    }
    Ok(())
}
