//! Spin phase space: coherent states, the Husimi function, Wehrl entropy and
//! the two-mode (Schwinger) cross-representation.

mod coherent;
mod grid;
mod husimi;
mod tss;

pub use coherent::{coherent_state, CoherentState};
pub use grid::{gauss_legendre, SphereGrid, DEFAULT_N_PHI, DEFAULT_N_THETA};
pub use husimi::{
    husimi, husimi_adapted, husimi_in_frame, husimi_values, phase_space_currents, wehrl_entropy,
    HusimiField, LabNode, PhaseSpaceCurrents, ALIGN_Q_THRESHOLD,
};
pub use tss::{
    angle_action_map, from_action_angles, tss_correspondences, v_function, ActionAngles,
    TssCurrents, VDerivatives, VFunction,
};
