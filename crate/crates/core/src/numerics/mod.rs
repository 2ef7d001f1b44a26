pub mod gamma;
pub mod jet;
pub mod quadrature;
pub mod series;

pub use gamma::{gamma_ratio, ln_gamma_signed, SignedLogGamma};
pub use jet::{eps_limit_quotient, eps_limit_quotient_scaled, EpsJet};
pub use quadrature::quadrature;
pub use series::TruncatedSeries;
