//! Two-photon success probability against cavity decay rate, one curve per
//! Raman detuning, as CSV on stdout.

use ion_photon::cavity::{fig2_sweep, SweepTemplate};
use ion_photon::constants::MRAD_PER_S;
use ion_photon::format::num;

fn main() -> ion_photon::Result<()> {
    let template = SweepTemplate { omega_laser: 10.0 * MRAD_PER_S, g_cav: 138.0 * MRAD_PER_S };
    let kappas: Vec<f64> = (0..=20).map(|i| i as f64 * 50.0 * MRAD_PER_S).collect();
    let deltas = [1e-3, 0.1, 0.25, 0.5, 1.0].map(|d| d * MRAD_PER_S);
    println!("kappa_rad_s,delta_rad_s,tau_star_s,p_single,p_pair");
    for p in fig2_sweep(&template, &kappas, &deltas)? {
        println!("{},{},{},{},{}", num(p.kappa_rad_s), num(p.delta_rad_s), num(p.tau_star_s), num(p.p_single), num(p.p_pair));
    }
    Ok(())
}
