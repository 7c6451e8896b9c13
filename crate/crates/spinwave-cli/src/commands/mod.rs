//! One module per subcommand.

pub mod curve;
pub mod figure;
pub mod fit;
pub mod oracle;
