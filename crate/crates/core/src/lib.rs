pub mod appendix;
pub mod experiments;
pub mod augmentation;
pub mod basis;
pub mod dg;
pub mod error;
pub mod limiter;
pub mod linalg;
pub mod mesh;
pub mod nlp;
pub mod poly;
pub mod quadrature;
