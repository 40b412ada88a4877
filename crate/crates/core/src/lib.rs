pub mod exactnum;
pub mod quadforms;
pub mod canon;
pub mod symalg;
pub mod latpoints;
pub mod problem;
pub mod density;
pub mod cli;
