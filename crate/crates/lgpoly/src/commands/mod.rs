pub mod descent;
pub mod fluct;
pub mod laplace;
pub mod semidiscrete;
pub mod twdist;
