use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("degenerate scheduling horizon [{start}, {end}]")]
    DegenerateHorizon { start: f64, end: f64 },
    #[error("customer {customer} cannot be served even by a dedicated vehicle")]
    InfeasibleCustomer { customer: usize },
    #[error("position {position} of tour {tour} lies inside the committed prefix")]
    CommittedPosition { tour: usize, position: usize },
    #[error("committed prefix of tour {tour} cannot shrink from {current} to {requested}")]
    PrefixShrink {
        tour: usize,
        current: usize,
        requested: usize,
    },
    #[error("prefix length {requested} exceeds tour {tour} length {len}")]
    PrefixTooLong {
        tour: usize,
        requested: usize,
        len: usize,
    },
    #[error("no tour with index {0}")]
    NoSuchTour(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("reference length must be positive for pheromone initialisation")]
    ZeroReferenceLength,
}
