//! Configuration-driven experiments: closed-form scaling studies, Monte
//! Carlo bound checks, the min-entropy oracle suite and a verification
//! report. Results are written as CSV plus a JSON summary.

mod config;
mod oracle;
mod output;
mod run;

pub use config::{
    AlphaRule, DecouplingConfig, ExperimentConfig, LambdaRule, McSudConfig, McU1Config, MinEntropyConfig, NGrid,
    ScalingConfig, SudAverageConfig, VerifyConfig, WorstInputConfig,
};
pub use oracle::{
    kappa_sandwich_checks, lambda_equality_check, minentropy_oracle_suite, norm_bound_checks, pure_state_checks,
    structured_checks,
};
pub use output::{config_hash, csv_bytes, fit_loglog, write_outputs, Check, ExperimentOutput, NamedFit, ResultRow, SlopeFit};
pub use run::{
    run, run_decoupling, run_mc_sud, run_mc_u1, run_minentropy, run_scaling, run_sud_average, run_worst_input,
    verify_bounds,
};

use crate::error::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_CAP: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;
/// Any other failure (I/O, numerical breakdown).
pub const EXIT_OTHER: i32 = 1;

/// Process exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) => EXIT_CONFIG,
        e if e.is_cap() => EXIT_CAP,
        Error::Verification(_) => EXIT_VERIFY,
        _ => EXIT_OTHER,
    }
}

/// Built-in configuration for each subcommand.
pub fn default_config(subcommand: &str) -> Option<&'static str> {
    Some(match subcommand {
        "scaling" => include_str!("../../configs/scaling.toml"),
        "mc-u1" => include_str!("../../configs/mc-u1.toml"),
        "mc-sud" => include_str!("../../configs/mc-sud.toml"),
        "minentropy" => include_str!("../../configs/minentropy.toml"),
        "decoupling" => include_str!("../../configs/decoupling.toml"),
        "sud-average" => include_str!("../../configs/sud-average.toml"),
        "worst-input" => include_str!("../../configs/worst-input.toml"),
        "verify" => include_str!("../../configs/verify.toml"),
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_parse_and_match_subcommand() {
        for sub in ["scaling", "mc-u1", "mc-sud", "minentropy", "decoupling", "sud-average", "worst-input", "verify"] {
            let cfg = ExperimentConfig::parse(default_config(sub).unwrap()).unwrap();
            assert_eq!(cfg.name(), sub);
        }
        assert!(default_config("nope").is_none());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Config("x".into())), 2);
        assert_eq!(exit_code(&Error::DimensionCap { dim: 1, cap: 0 }), 3);
        assert_eq!(exit_code(&Error::Verification("x".into())), 4);
        assert_eq!(exit_code(&Error::Numerical("x".into())), 1);
    }
}
