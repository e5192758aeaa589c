pub mod graphs;
pub mod partitions;
pub mod permutations;

pub use graphs::{inversion_graph, Gr, Graph, MGr, MGrProduct, MarkedGraph};
pub use partitions::{integer_compositions, integer_partitions, SComp, SPart, SetComposition, SetPartition};
pub use permutations::{sum_decomposition, MPer, MarkedPermutation, Per, Permutation, Shape, SumDecomposition, SumKind};
