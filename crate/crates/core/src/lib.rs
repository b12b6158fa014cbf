//! Past LTL, Krohn-Rhodes logic programs and automata cascades, with the
//! translations between them.

pub mod lexer;
pub mod pltl;
pub mod trace;
pub mod automata;
pub mod operators;
pub mod programs;
pub mod cascades;
pub mod algebra;
pub mod compile;
pub mod equiv;
