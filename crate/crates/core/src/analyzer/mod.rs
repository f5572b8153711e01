//! Coefficient asymptotics: ratio sequences and their `b_∞(1 + σ/j)` fits for
//! one frequency, binomially weighted coefficient tables for two, and scans of
//! `b_∞^{-1/2}` over `α`.

mod fit;
mod plot;
mod ratios;
mod scan;
mod table;

pub use fit::{default_window, fit_asymptotic, richardson, RatioFit, Richardson, MAX_CONDITION, MIN_J, SIGMA_AGREEMENT};
pub use plot::{render_svg, PlotOptions};
pub use ratios::{ratios, RatioPoint, Ratios, MIN_COEFFICIENTS};
pub use scan::{
    alpha_scan, default_grid, read_scan_csv, scan_one, write_scan_csv, ScanOptions, ScanPoint, ScanStatus, GRID_DEN,
};
pub use table::{bombieri_row, bombieri_table, matches_printed, write_table_csv, TableRow};
