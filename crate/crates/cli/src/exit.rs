use isoatlas::AtlasError;

/// Malformed input: files, flags or documents.
#[derive(Debug)]
pub struct ParseError(pub String);

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ParseError {}

pub const OK: i32 = 0;
pub const FAILURE: i32 = 1;
pub const PARSE: i32 = 2;
pub const DEGENERATE: i32 = 3;
pub const CHART: i32 = 4;
pub const SHIFT: i32 = 5;
pub const OVERFLOW: i32 = 6;
pub const DIMENSION: i32 = 7;

pub fn atlas_code(e: &AtlasError) -> i32 {
    match e {
        AtlasError::DegenerateSpectrum { .. } | AtlasError::DegenerateVelocities => DEGENERATE,
        AtlasError::NotInChart { .. } | AtlasError::NotJacobi { .. } | AtlasError::SpectrumMismatch { .. } => CHART,
        AtlasError::ShiftOnSpectrum { .. } | AtlasError::OutsideDomain { .. } => SHIFT,
        AtlasError::Overflow(_) => OVERFLOW,
        AtlasError::Dimension(_) => DIMENSION,
        AtlasError::InvalidPermutation(_) | AtlasError::InvalidInput(_) => PARSE,
        AtlasError::SingularMatrix { .. } | AtlasError::PivotBreakdown { .. } | AtlasError::TailNotFree { .. } => FAILURE,
    }
}

/// Exit status for an error raised anywhere in a command.
pub fn code_of(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<AtlasError>() {
            return atlas_code(e);
        }
        if cause.is::<ParseError>() || cause.is::<serde_json::Error>() {
            return PARSE;
        }
    }
    FAILURE
}
