//! The three-proposal worked example used throughout the tests and docs.
//!
//! Attributes are (safety and control, development speed, public trust); the
//! target is indifferent to safety, dislikes speed and likes trust. The
//! persuader wants A, the target starts on C and would pick B with full
//! information.

use crate::model::{Cell, CellSet, Instance, UtilityMatrix, ValueFunction};

pub const A_D: Cell = Cell::at(0, 1);
pub const B_D: Cell = Cell::at(1, 1);
pub const B_T: Cell = Cell::at(1, 2);
pub const C_D: Cell = Cell::at(2, 1);

pub fn worked_example() -> Instance {
    let matrix = UtilityMatrix::from_values(&[vec![0, -1, 0], vec![0, -1, 1], vec![0, 1, 1]])
        .expect("fixture matrix");
    let values = ValueFunction::new(&[0, -1, 1]).expect("fixture weights");
    let hidden: CellSet = [A_D, B_D, B_T, C_D].into_iter().collect();
    let reveal: CellSet = [A_D, C_D].into_iter().collect();
    Instance::new("llm", matrix, values, hidden, reveal).expect("fixture satisfies every condition")
}
