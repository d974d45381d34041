//! Equilibria, epsilon and Ising couplings for the two- and three-ion
//! configuration tables, printed next to the reference values.

use ion_photon::config::Config;
use ion_photon::crystal::CrystalAnalysis;

fn main() -> ion_photon::Result<()> {
    for preset in ["table1", "table2"] {
        let cfg = Config::preset(preset)?;
        let rows = cfg.crystal_rows()?;
        let refs = cfg.reference_rows(rows.len())?;
        println!("{preset}");
        for (row, r) in rows.iter().zip(&refs) {
            let a = CrystalAnalysis::compute(&row.traps, &row.gradient, &row.species)?;
            let dev = a.equilibrium.outward_deviations(&row.traps);
            let j12 = a.couplings.get(0, 1);
            print!(
                "  d={:4.1} um  delta={:.3} um (ref {:.3})  eps={:.4} (ref {:.4})  J12={:.3} (ref {:.3}) krad/s",
                row.spacing * 1e6,
                dev[0] * 1e6,
                r.delta_1.unwrap_or(f64::NAN) * 1e6,
                a.epsilon.eps_max,
                r.eps_max.unwrap_or(f64::NAN),
                j12 / 1e3,
                r.j_max.or(r.j12).unwrap_or(f64::NAN) / 1e3,
            );
            if row.traps.len() > 2 {
                print!("  J13={:.3} (ref {:.3})", a.couplings.get(0, 2) / 1e3, r.j13.unwrap_or(f64::NAN) / 1e3);
            }
            println!();
        }
    }
    Ok(())
}
