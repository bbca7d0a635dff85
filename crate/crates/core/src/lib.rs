pub mod channel;
pub mod entanglement;
pub mod numerics;
pub mod photonics;
pub mod sampling;
