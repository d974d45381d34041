//! The six-factor CNOT decomposition in both polarities, checked against
//! ideal controlled-X gates.

use ion_photon::gates::{cnot_product, controlled_x, gate_fidelity, CnotConvention, SpinLevel, POLARITY_DIAGNOSTIC};

fn main() -> ion_photon::Result<()> {
    for conv in [CnotConvention::Verbatim, CnotConvention::ActiveOnE] {
        let u = cnot_product(conv, false);
        for level in [SpinLevel::E, SpinLevel::G] {
            let f = gate_fidelity(&controlled_x(2, 0, 1, level), &u)?;
            println!("{conv:?}: fidelity to CX active on |{}> = {f:.15}", level.label());
        }
    }
    println!("{POLARITY_DIAGNOSTIC}");
    Ok(())
}
