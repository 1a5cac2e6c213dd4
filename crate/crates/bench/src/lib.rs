//! Fixtures shared by the benchmarks.

use heatindex_core::models::{FourierData, MatrixFourierData};

/// `(sin 2πx sin 2πy, cos 2πx, cos 2πy)`, the standard degree-two test triple.
pub fn sin_cos_triple() -> Vec<MatrixFourierData> {
    let s = |f: FourierData| MatrixFourierData::scalar(&f);
    vec![
        s(FourierData::sin((1, 0)).mul(&FourierData::sin((0, 1)))),
        s(FourierData::cos((1, 0))),
        s(FourierData::cos((0, 1))),
    ]
}

/// Spectrum sizes used by the supertrace benchmarks.
pub const LANDAU_LEVELS: [usize; 3] = [20, 80, 320];
