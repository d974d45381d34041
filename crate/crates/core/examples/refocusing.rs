//! Compiling a ZZ rotation and a CNOT on one pair of a four-ion register
//! while every other coupling stays on.

use std::f64::consts::FRAC_PI_4;

use ion_photon::crystal::CouplingMatrix;
use ion_photon::gates::{
    cnot_sequence, compile_refocused_zz, controlled_x, gate_fidelity, sequence_unitary, zz_rotation, CnotConvention,
};
use ion_photon::linalg::SquareMatrix;

fn main() -> ion_photon::Result<()> {
    let j = CouplingMatrix::from_matrix(&SquareMatrix::from_rows(&[
        vec![0.0, 1500.0, 900.0, 400.0],
        vec![1500.0, 0.0, 1400.0, 850.0],
        vec![900.0, 1400.0, 0.0, 1450.0],
        vec![400.0, 850.0, 1450.0, 0.0],
    ]));

    let zz = compile_refocused_zz(&j, 0, 2, FRAC_PI_4)?;
    print!("{}", zz.to_text());
    let f = gate_fidelity(&zz_rotation(4, 0, 2, FRAC_PI_4), &sequence_unitary(&zz, &j)?)?;
    println!("ZZ(1,3): {} elements, {:.4e} s free evolution, fidelity {f:.15}", zz.elements().len(), zz.total_duration());

    let cx = cnot_sequence(&j, 0, 3, CnotConvention::ActiveOnE)?;
    let f = gate_fidelity(&controlled_x(4, 0, 3, CnotConvention::ActiveOnE.active_level()), &sequence_unitary(&cx, &j)?)?;
    println!(
        "CNOT(1->4): {} rotations, {:.4e} s with 20 us pi pulses, fidelity {f:.15}",
        cx.rotation_count(),
        cx.duration_with_pulses(20e-6)
    );
    Ok(())
}
