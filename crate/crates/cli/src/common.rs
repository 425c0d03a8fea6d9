use std::fmt;
use std::path::Path;

use clap::{Args, ValueEnum};
use gbmech::decomposition::StarDecomposition;
use gbmech::mechanisms::{by_name, DecompositionSource, MechanismParams};
use gbmech::{Error, GFunction, Mechanism, Objective, TieBreak};

pub(crate) enum CliError {
    Core(Error),
    /// A core error raised while handling a file.
    File { path: String, error: Error },
    Io(String),
    /// Number of failed verification properties.
    Verification(usize),
}

impl CliError {
    pub(crate) fn at(path: &Path, error: Error) -> Self {
        CliError::File {
            path: path.display().to_string(),
            error,
        }
    }

    fn core(&self) -> Option<&Error> {
        match self {
            CliError::Core(e) | CliError::File { error: e, .. } => Some(e),
            _ => None,
        }
    }

    pub(crate) fn exit_code(&self) -> u8 {
        match self.core() {
            Some(Error::Capacity { .. }) => 3,
            Some(Error::Inapplicable { .. }) => 4,
            Some(_) => 2,
            None => match self {
                CliError::Verification(_) => 1,
                _ => 2,
            },
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::File {
                path,
                error: Error::Parse { line, column, message },
            } if *line > 0 => write!(f, "{path}:{line}:{column}: {message}"),
            CliError::File { path, error } => write!(f, "{path}: {error}"),
            CliError::Io(m) => f.write_str(m),
            CliError::Verification(n) => write!(f, "{n} properties failed"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub(crate) enum ObjectiveKind {
    Makespan,
    Sum,
    LpMin,
    LpMax,
}

impl ObjectiveKind {
    pub(crate) fn build(self, p: Option<f64>) -> Result<Objective, CliError> {
        let need = |what: &str| {
            p.ok_or_else(|| CliError::Core(Error::InvalidParameter(format!("objective {what} needs --objective-p"))))
        };
        Ok(match self {
            ObjectiveKind::Makespan => Objective::Makespan,
            ObjectiveKind::Sum => Objective::SumMin,
            ObjectiveKind::LpMin => Objective::lp_min(need("lp-min")?)?,
            ObjectiveKind::LpMax => Objective::lp_max(need("lp-max")?)?,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub(crate) enum Tie {
    Root,
    Leaf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub(crate) enum Source {
    Orientation,
    Degeneracy,
}

impl Source {
    pub(crate) fn source(self) -> DecompositionSource {
        match self {
            Source::Orientation => DecompositionSource::Orientation,
            Source::Degeneracy => DecompositionSource::Degeneracy,
        }
    }
}

/// Mechanism selection shared by the subcommands.
#[derive(Args, Clone, Debug)]
pub(crate) struct MechanismArgs {
    /// Mechanism name: vcg, hybrid-max, hybrid-lp, hybrid-lp-max, all-or-nothing,
    /// combined-max, star-cover, hyperstar-hybrid.
    #[arg(long)]
    pub mechanism: String,
    /// Norm parameter of the L^p mechanisms.
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, value_enum, default_value_t = Tie::Root)]
    pub tie: Tie,
    /// Decomposition used by star-cover.
    #[arg(long, value_enum, default_value_t = Source::Orientation)]
    pub decomposition: Source,
}

pub(crate) fn params(p: Option<f64>, tie: Tie, source: DecompositionSource) -> MechanismParams {
    MechanismParams {
        p,
        tie: match tie {
            Tie::Root => TieBreak::RootPreferring,
            Tie::Leaf => TieBreak::LeafPreferring,
        },
        decomposition: source,
        star_cover_g: GFunction::MaxLeaf,
    }
}

impl MechanismArgs {
    pub(crate) fn build(&self) -> Result<Box<dyn Mechanism>, CliError> {
        Ok(by_name(&self.mechanism, &params(self.p, self.tie, self.decomposition.source()))?)
    }
}

/// Formats a cost-like number the way the reports do: integers without a fraction.
pub(crate) fn num(x: f64) -> String {
    if x.is_infinite() {
        "inf".into()
    } else {
        format!("{x}")
    }
}

pub(crate) fn describe(decomp: &StarDecomposition) -> Vec<String> {
    decomp
        .stars()
        .iter()
        .map(|s| format!("root {} edges {:?}", s.root, s.edges))
        .collect()
}

pub(crate) fn objective_label(obj: Objective) -> String {
    match obj {
        Objective::Makespan => "makespan".into(),
        Objective::SumMin => "sum".into(),
        Objective::LpMin(p) => format!("lp-min (p = {p})"),
        Objective::LpMax(p) => format!("lp-max (p = {p})"),
    }
}
