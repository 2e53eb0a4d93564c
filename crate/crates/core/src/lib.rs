//! Transition rates of an Unruh-DeWitt detector in uniform acceleration with
//! a constant transverse velocity, a quadrature oracle for them, and the
//! qubit coherence and wave-particle duality observables they feed.

pub mod model;
pub mod observables;
pub mod oracle;
pub mod quad;
pub mod rates;
pub mod special;
pub mod wightman;
