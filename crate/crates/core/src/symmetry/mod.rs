//! Representation theory behind U(1)- and SU(d)-covariant codes: Hamming
//! charge sectors, Young diagrams and tableaux, permutation operators,
//! Young symmetrizers and an explicit Schur–Weyl basis.

mod hamming;
mod lr;
mod partition;
mod permutation;
mod schur;
mod tableau;
mod young;

pub use hamming::{charge_phases, HammingSectors};
pub use lr::lr_coefficient;
pub use partition::{adds_one_box, partitions, Partition};
pub use permutation::{
    all_permutations, permutation_average, permutation_index_map, permutation_operator, permute_vector, Permutation,
    GROUP_CAP,
};
pub use schur::{assemble_commutant, schur_decomposition, tensor_power, SchurBlock, SchurDecomposition};
pub use tableau::{hook_counts, hook_length, standard_tableaux, Tableau, TableauCounts};
pub use young::{row_and_column_sums, schur_projector, young_symmetrizer};
