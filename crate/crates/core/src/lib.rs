//! Cubical persistence barcodes, image barcodes and the Betti matching
//! between 3D grayscale volumes.

pub mod bench;
pub mod complex;
pub mod cube;
mod engine;
pub mod error;
pub mod image;
pub mod loss;
pub mod matching;
pub mod options;
pub mod oracle;
pub mod persistence;
pub mod reduction;
pub mod report;
pub mod union_find;
pub mod volume;

pub use complex::GridComplex;
pub use cube::Cube;
pub use error::{Error, Result};
pub use options::{DimSet, Options, Timings};
pub use persistence::{compute_barcode, compute_barcode_timed, Barcode, Cell, Interval, PersistencePair};
pub use volume::{load_volume, save_npy, FiltrationMode, VolumeFormat, VoxelGrid};
pub use image::{compute_image_pairs, ImagePair};
pub use matching::{comparison_volume, compute_betti_matching, compute_betti_matching_timed, BettiMatchingResult, DimMatching, MatchedPair};
pub use loss::{betti_matching_loss, critical_voxels, feature_count_metric, CriticalVoxelReport, LossBreakdown};
pub use bench::{bench_barcode, bench_matching, BenchReport, Samples, Summary};
