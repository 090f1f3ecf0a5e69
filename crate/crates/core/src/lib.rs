pub mod bands;
pub mod capacitance;
pub mod config;
pub mod hill;
pub mod io;
pub mod lattice;
pub mod linalg;
pub mod mathieu;
pub mod modulation;
pub mod ode;
pub mod run;
pub mod special;
