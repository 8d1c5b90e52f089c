//! Dark-state parameters for multi-controlled gates and absorption of a
//! preceding single-qubit layer.

use std::f64::consts::PI;

use blockade_gate::experiments::named_gate;
use blockade_gate::gates::{
    absorb_single_qubit_gates, controlled_rotation_plan, distance_up_to_phase, ideal_unitary, layer_matrix,
    toffoli_spec, GateSpecFile,
};

fn main() -> blockade_gate::Result<()> {
    let toffoli = toffoli_spec(3)?;
    println!("{}: {:?}", toffoli.label, GateSpecFile::from_spec(&toffoli.spec, None));

    let plan = controlled_rotation_plan(3, [0.0, 1.0, 0.0], PI / 2.0, 0.0)?;
    println!(
        "C^2-Ry(pi/2): single operation {}, residual phase {:.3} pi",
        plan.single_operation,
        plan.residual_phase / PI
    );

    let pre = ["h", "s", "x"]
        .map(named_gate)
        .into_iter()
        .collect::<blockade_gate::Result<Vec<_>>>()?;
    let absorbed = absorb_single_qubit_gates(&pre, &toffoli.spec)?;
    let layer = layer_matrix(&pre);
    let err = distance_up_to_phase(
        &(ideal_unitary(&toffoli.spec) * &layer),
        &(&layer * ideal_unitary(&absorbed)),
    );
    println!("absorbed [h s x]: {:?}", GateSpecFile::from_spec(&absorbed, None));
    println!("equivalence error {err:.2e}");
    Ok(())
}
