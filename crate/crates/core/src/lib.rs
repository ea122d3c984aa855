pub mod clifford;
pub mod error;
pub mod expr;
pub mod fields;
pub mod lattice;
pub mod linalg;
pub mod parallel;
pub mod potential;
pub mod separation;
pub mod splitting;

pub use error::{Error, Result};

/// Which dotted spinor index carries the subsolution: `Dotted1` keeps η₁̇
/// (the P₄ form), `Dotted2` keeps η₂̇ (the P₃ form).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Dotted1,
    Dotted2,
}

impl Branch {
    pub const BOTH: [Branch; 2] = [Branch::Dotted1, Branch::Dotted2];

    pub fn projector(self) -> clifford::ProjectorId {
        match self {
            Branch::Dotted1 => clifford::ProjectorId::P4,
            Branch::Dotted2 => clifford::ProjectorId::P3,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Branch::Dotted1 => "dotted1",
            Branch::Dotted2 => "dotted2",
        }
    }
}

impl std::str::FromStr for Branch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dotted1" | "1" => Ok(Branch::Dotted1),
            "dotted2" | "2" => Ok(Branch::Dotted2),
            other => Err(Error::IncompatibleParameters(format!("unknown branch `{other}`"))),
        }
    }
}
