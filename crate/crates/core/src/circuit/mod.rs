//! Analog model of the non-contact electrode front end.

mod formulas;
mod params;
mod poly;
mod response;
mod transfer;

pub use formulas::{
    bias_resistance, cancellation_capacitance, diode_pair_resistance, first_stage_gain,
    input_divider, neutralized_input_capacitance, BiasResistance, InputCapacitance,
};
pub use params::CircuitParams;
pub use poly::Polynomial;
pub use response::{
    cutoff_frequencies, evaluate_response, gain_sweep, logspace, FrequencyResponse, MIDBAND_HZ,
};
pub use transfer::{
    amplifier_transfer_function, build_transfer_function, coupling_transfer_function,
    input_node_impedance, RationalTransferFunction,
};
