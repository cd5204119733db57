pub mod error;
pub mod group;
pub mod hyperbolic;
pub mod lamination;
pub mod markov;
pub mod render;
pub mod scene;
