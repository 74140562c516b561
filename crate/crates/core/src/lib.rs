//! Reductions from the Post correspondence problem, Turing machines and
//! two-counter machines to probabilistic finite automata, checked with exact
//! rational arithmetic.

pub mod amplify;
pub mod binaut;
pub mod cl2cm;
pub mod exact;
pub mod golden;
pub mod intmat;
pub mod pcp;
pub mod pcp2pfa;
pub mod pfa;
pub mod tm2mpcp;
