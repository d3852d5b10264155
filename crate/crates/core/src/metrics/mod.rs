//! Field comparison: pointwise set metrics, POD bases and their cosine
//! similarity, dominant-frequency differences and the forecast-horizon study.

pub mod horizon;
pub mod pod;
pub mod report;
pub mod sets;
pub mod spectral;

pub use horizon::{horizon_evaluation, HorizonRow};
pub use pod::{cs_pod, pod_decompose, pod_of_matrix, snapshot_matrix, PodBasis};
pub use report::{horizon_csv, MetricReport, MetricRow};
pub use sets::{compare_fields, compare_sets, gather, mcs, mmsd, mse_sets, Comparison};
pub use spectral::{dft, dft_magnitude, freq_percent_diff, FrequencyDiff, Selector, Spectrum};
