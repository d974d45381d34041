//! One ion emitting into its cavity: optimal stopping time, success
//! probability and the conditional spin-photon branch, for cavities of
//! several sizes.

use ion_photon::cavity::{emit, CavityScaling, CavitySetup};
use ion_photon::constants::{MICROMETRE, MRAD_PER_S};

fn main() -> ion_photon::Result<()> {
    let scaling = CavityScaling::default();
    let omega = 10.0 * MRAD_PER_S;
    let delta = 0.1 * MRAD_PER_S;
    println!("{:>8} {:>12} {:>12} {:>12} {:>10}", "R_um", "h_rad_s", "kappa_rad_s", "tau_s", "P");
    for r_um in [5.0, 10.0, 20.0, 40.0, 160.0] {
        let (h, kappa) = scaling.scale(r_um * MICROMETRE)?;
        let setup = CavitySetup::symmetric(omega, h, delta, kappa)?;
        let e = emit(&setup)?;
        println!("{r_um:>8} {h:>12.4e} {kappa:>12.4e} {:>12.4e} {:>10.6}", e.tau_star, e.p_success);
    }

    let setup = CavitySetup::symmetric(omega, 138.0 * MRAD_PER_S, delta, 960.0 * MRAD_PER_S)?;
    let e = emit(&setup)?;
    let c = e.conditional_state;
    println!("conditional branch: {:.6} |g,s0> + ({:.6}{:+.6}i) |e,s+>", c.amp_g.re, c.amp_e.re, c.amp_e.im);
    Ok(())
}
