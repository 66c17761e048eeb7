//! Enumeration bounds, overridable from the environment.

pub const DEFAULT_MAX_DEGREE: usize = 4;
pub const DEFAULT_MAX_LABELLED_DEGREE: usize = 2;
pub const DEFAULT_SERIES_BOUND: usize = 2;

pub const ENV_MAX_DEGREE: &str = "CONFINT_MAX_DEGREE";
pub const ENV_MAX_LABELLED_DEGREE: &str = "CONFINT_MAX_LABELLED_DEGREE";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest degree for unlabelled generation and algebra quotients.
    pub max_degree: usize,
    /// Largest degree for labelled enumeration.
    pub max_labelled_degree: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_degree: DEFAULT_MAX_DEGREE,
            max_labelled_degree: DEFAULT_MAX_LABELLED_DEGREE,
        }
    }
}

impl Limits {
    /// Defaults, replaced by any parseable value found in the environment.
    pub fn from_env() -> Self {
        let read = |name: &str, fallback: usize| {
            std::env::var(name)
                .ok()
                .and_then(|s| s.trim().parse().ok())
                .unwrap_or(fallback)
        };
        Limits {
            max_degree: read(ENV_MAX_DEGREE, DEFAULT_MAX_DEGREE),
            max_labelled_degree: read(ENV_MAX_LABELLED_DEGREE, DEFAULT_MAX_LABELLED_DEGREE),
        }
    }
}
