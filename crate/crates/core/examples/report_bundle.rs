//! Writes a report bundle the same way the binary does and prints its
//! manifest.

use ion_photon::cli::{cmd_couplings, Format};
use ion_photon::config::Config;

fn main() -> ion_photon::Result<()> {
    let bundle = cmd_couplings(&Config::preset("table1")?, Format::Csv)?;
    let dir = std::env::temp_dir().join("ion-photon-table1");
    bundle.write(&dir)?;
    print!("{}", bundle.summary);
    println!("bundle in {}", dir.display());
    print!("{}", bundle.manifest());
    Ok(())
}
