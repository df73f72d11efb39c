//! Sturm meanders: permutations, Morse and zero numbers, heteroclinic
//! connection graphs, trivial equivalences, suspensions, the Chafee–Infante
//! and 3-nose families, and a small reversible ODE model.

pub mod enumerate;
pub mod error;
pub mod export;
pub mod families;
pub mod connectivity;
pub mod kernel;
pub mod model;
pub mod ode;
pub mod transforms;
pub mod verify;

pub use error::{Result, SturmError};
pub use model::{
    Arc, ArcDiagram, ConnectionGraph, Label, MeanderAnalysis, MeanderPermutation, Reversor, Tag,
    Vertex,
};

/// Double-precision instances of the ODE types.
pub type State = ode::ModelState<f64>;
pub type Field = ode::ReversibleField<f64>;
pub type CiFlow = ode::CiField<f64>;
pub type Control = ode::StepControl<f64>;
pub type Path = ode::Trajectory<f64>;
