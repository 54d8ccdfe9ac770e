//! Named data fields and `--u0` resolution.

use std::path::Path;

use num_complex::Complex64;

use lplab_core::microlocal::sawtooth_datum;
use lplab_core::rng::LabRng;
use lplab_core::solver::critical_datum;
use lplab_core::{Grid, SpectralField};

use crate::error::{parse_err, AppResult};
use crate::lpf::read_field;

pub const NAMES: [&str; 5] = ["constant", "small", "large", "critical", "sawtooth"];

/// Value of `builtin:constant`.
pub const CONSTANT: f64 = 2.0;

/// Amplitude of `builtin:small`: smallness margin 4‖B‖‖a‖ ≈ 0.2 with the default
/// solver settings on the 2-d 32² grid.
pub const SMALL_AMP: f64 = 0.0164;

/// `builtin:large` is the small datum times this factor, well past the margin.
pub const LARGE_FACTOR: f64 = 20.0;

/// Low-band random datum normalised to unit sup of its coefficients.
fn low_band(grid: Grid) -> SpectralField {
    let f = LabRng::new(3, 1).bandlimited_field(grid, grid.j_min(), grid.j_min());
    f.scale_real(1.0 / f.max_abs_coef())
}

pub fn builtin(name: &str, grid: Grid) -> AppResult<SpectralField> {
    Ok(match name {
        "constant" => SpectralField::constant(grid, Complex64::new(CONSTANT, 0.0)),
        "small" => low_band(grid).scale_real(SMALL_AMP),
        "large" => low_band(grid).scale_real(SMALL_AMP * LARGE_FACTOR),
        "critical" => critical_datum(grid, 1.0),
        "sawtooth" => sawtooth_datum(grid, 1.0),
        _ => {
            return parse_err(format!(
                "unknown builtin '{name}' (one of {})",
                NAMES.join(", ")
            ))
        }
    })
}

/// `builtin:<name>` on `grid`, or an LPF1 file carrying its own grid.
pub fn resolve_u0(arg: &str, grid: Grid) -> AppResult<SpectralField> {
    match arg.strip_prefix("builtin:") {
        Some(name) => builtin(name, grid),
        None => read_field(Path::new(arg)),
    }
}
