use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate region: side {side_m} m is smaller than one cell (isd {isd_m} m)")]
    DegenerateRegion { side_m: f64, isd_m: f64 },

    #[error("hotspot packing failed after {attempts} attempts ({placed}/{wanted} placed)")]
    HotspotPackingFailed {
        attempts: usize,
        placed: usize,
        wanted: usize,
    },

    #[error("position ({x:.2}, {y:.2}) lies outside the shadow field")]
    OutsideShadowField { x: f64, y: f64 },

    #[error("unknown site {0}")]
    UnknownSite(usize),

    #[error("no power-model row for isd {isd_m} m with {antennas} antenna(s)")]
    NoPowerModelRow { isd_m: f64, antennas: u32 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("cannot aggregate an empty set of runs")]
    EmptyInput,

    #[error("run {run_index}")]
    Run {
        run_index: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
