//! Square functions, sequence norms, Carleson-type sums, the corona
//! construction and the disjoint-support block of the shift kernel.

mod battery;
mod corona;
mod disjoint;
mod sequences;
mod square;

pub use battery::{battery_row_i_lhs, inequality_battery, BatteryRow, InequalityReport, BATTERY_ROWS};
pub use corona::{corona, CoronaDecomposition, DEFAULT_GAMMA};
pub use disjoint::{disjoint_block_matrix, disjoint_block_norm};
pub use sequences::{carleson_embedding_constant, cm_norm, embedding_sum, ell_inf_norm, s_coefficient, subtree_sums};
pub use square::{s_pi, s_pi_sharp_ratio, square_function, tilde_d_diagonal};
