#![allow(dead_code)]

pub mod order_type;
pub mod solver_check;
pub mod symbolic_check;
pub mod two_counter;
