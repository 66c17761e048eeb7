use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "confint", version, about = "Jacobi diagrams, boundary faces, configuration-space charts and numeric checks")]
pub struct Cli {
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Unlabelled and labelled Jacobi diagrams.
    #[command(subcommand)]
    Diagrams(DiagramsCmd),
    /// The diagram algebra modulo AS and IHX.
    #[command(subcommand)]
    Algebra(AlgebraCmd),
    /// Boundary faces and the cancellation census.
    #[command(subcommand)]
    Faces(FacesCmd),
    /// Configuration-space charts.
    #[command(subcommand)]
    Charts(ChartsCmd),
    /// Matrix identities, degrees, linking numbers and the propagator.
    #[command(subcommand)]
    Geom(GeomCmd),
    /// Framing correction of a series.
    #[command(subcommand)]
    Invariant(InvariantCmd),
}

#[derive(Debug, Subcommand)]
pub enum DiagramsCmd {
    /// One diagram per isomorphism class.
    Gen {
        #[arg(long)]
        degree: usize,
        /// Keep disconnected diagrams.
        #[arg(long)]
        all: bool,
    },
    /// Automorphism count of a diagram.
    Aut(DiagramSource),
    /// Size of the labelled set by enumeration and by the closed form.
    Labelled {
        #[arg(long)]
        degree: usize,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct DiagramSource {
    /// Diagram JSON file.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub builtin: Option<Builtin>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Builtin {
    Theta,
    K4,
    DoubledSquare,
    ThetaTheta,
}

#[derive(Debug, Subcommand)]
pub enum AlgebraCmd {
    /// Dimension of the degree-n part.
    Dim {
        #[arg(long)]
        degree: usize,
    },
    /// Normal form of an element.
    Reduce(ElementSource),
    /// Truncated exponential of an element.
    Exp(ElementSource),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct ElementSource {
    /// Algebra element JSON file.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// The element c[θ] for the rational c, e.g. -1/12.
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<String>,
    /// Truncation bound for --theta.
    #[arg(long, default_value_t = 2)]
    pub bound: usize,
}

#[derive(Debug, Subcommand)]
pub enum FacesCmd {
    /// Codimension-one faces of a configuration space.
    Enumerate {
        #[arg(long)]
        points: usize,
        #[arg(long, value_enum, default_value_t = AmbientArg::Cv)]
        ambient: AmbientArg,
    },
    /// Cancellation census over the labelled diagrams of a degree.
    Check {
        #[arg(long)]
        degree: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AmbientArg {
    Cv,
    Sv,
}

#[derive(Debug, Subcommand)]
pub enum ChartsCmd {
    /// Random round trips r(ξ(P)) against P.
    Roundtrip {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        instances: usize,
        #[arg(long, value_enum)]
        variant: VariantArg,
    },
    /// Validates a tree JSON file.
    Validate {
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VariantArg {
    Finite,
    Infinity,
}

#[derive(Debug, Subcommand)]
pub enum GeomCmd {
    /// Monte Carlo degree of a map out of S³.
    Degree {
        #[arg(long, value_enum, default_value_t = MapArg::Rho)]
        map: MapArg,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Gauss linking integral of a two-component link.
    Linking {
        /// `hopf`, `split` or a link JSON file.
        #[arg(long)]
        link: String,
        #[arg(long, default_value_t = 256)]
        nodes: usize,
        /// Traverse the second component this many times.
        #[arg(long, default_value_t = 1)]
        repeat: u32,
    },
    /// g₃ against both conjugation formulas on random unit quaternions.
    G3check {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Block form of c(m_r) on random unit quaternions.
    Cmrcheck {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Boundary values of the propagator as limits of interior values.
    Propagator {
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MapArg {
    Identity,
    Constant,
    Square,
    Rho,
    RhoSquared,
    G3,
}

#[derive(Debug, Subcommand)]
pub enum InvariantCmd {
    /// Z(τ)·exp((p₁/4)·ξ) with ξ = −1/12[θ].
    Frame {
        #[arg(long, allow_hyphen_values = true)]
        p1: i64,
        /// Series JSON file; defaults to 1[∅].
        #[arg(long)]
        z: Option<PathBuf>,
        /// Truncation bound when --z is absent.
        #[arg(long, default_value_t = 1)]
        bound: usize,
        /// Require p1 ∈ 4ℤ.
        #[arg(long)]
        integral_sphere: bool,
    },
}
