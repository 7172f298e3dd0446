//! The local model `z ds/dz = A(z) s` near a Fuchsian singularity at the
//! origin: transport, monodromy, semisimplification, linearization and the
//! functor to monodromy data.

mod connection;
mod gauge;
mod monodromy;
mod path;
mod transport;

pub use connection::{gauge_transform, poly_eval, poly_euler_derivative, poly_mul, residue, PolyConnection};
pub use gauge::{functor_l, poincare_gauge, GaugeMode, GaugeSeries, LocalData, ResonantChoice};
pub use monodromy::{
    cocycle_residual_at, linearizability, monodromy, monodromy_at, semisimplify, verify_cocycle, Linearizability,
    Semisimplification,
};
pub use path::{Orientation, PathPiece, PathSpec};
pub use transport::{transport, transport_sampled, Transport, TransportSample};
pub(crate) use transport::{transport_system, RationalSystem};
