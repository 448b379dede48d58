use crate::erasure::{Metric, ZetaStrategy};
use crate::error::{Error, Result};
use crate::symmetry::Partition;
use serde::{Deserialize, Serialize};

/// Values of `n` swept by an experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NGrid {
    List(Vec<usize>),
    /// `from, from·factor, ...` up to `to` inclusive.
    Geometric { from: usize, to: usize, factor: usize },
    /// `from, from+step, ...` up to `to` inclusive.
    Linear { from: usize, to: usize, step: usize },
}

impl NGrid {
    pub fn values(&self) -> Result<Vec<usize>> {
        let v = match *self {
            NGrid::List(ref v) => v.clone(),
            NGrid::Geometric { from, to, factor } => {
                if from == 0 || factor < 2 {
                    return Err(Error::Config("geometric grid needs from >= 1 and factor >= 2".into()));
                }
                std::iter::successors(Some(from), |&x| x.checked_mul(factor)).take_while(|&x| x <= to).collect()
            }
            NGrid::Linear { from, to, step } => {
                if step == 0 {
                    return Err(Error::Config("linear grid needs step >= 1".into()));
                }
                (from..=to).step_by(step).collect()
            }
        };
        if v.is_empty() {
            return Err(Error::Config("n grid is empty".into()));
        }
        Ok(v)
    }
}

/// How the ancilla weight `α` follows `n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum AlphaRule {
    /// `α = c`.
    Constant(usize),
    /// `α = ⌊r n⌋`.
    Ratio(f64),
}

impl AlphaRule {
    pub fn alpha(&self, n: usize) -> usize {
        match *self {
            AlphaRule::Constant(c) => c,
            AlphaRule::Ratio(r) => (r * n as f64 + 1e-9).floor() as usize,
        }
    }

    pub fn label(&self) -> String {
        match *self {
            AlphaRule::Constant(c) => format!("const:{c}"),
            AlphaRule::Ratio(r) => format!("ratio:{r}"),
        }
    }
}

/// The SU(d) ancilla irrep, a partition of `n - 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum LambdaRule {
    /// `(n-1)`.
    Symmetric,
    /// The most balanced partition of `n - 1` into `d` rows.
    Balanced,
    /// A fixed partition; only valid for the matching `n`.
    Explicit(Vec<usize>),
}

impl LambdaRule {
    pub fn partition(&self, n: usize, d: usize) -> Result<Partition> {
        let m = n.checked_sub(1).ok_or_else(|| Error::Config("n must be at least 1".into()))?;
        match self {
            LambdaRule::Symmetric => Partition::new(vec![m]),
            LambdaRule::Balanced => Partition::new((0..d).map(|i| m / d + usize::from(i < m % d)).collect()),
            LambdaRule::Explicit(p) => {
                let p = Partition::new(p.clone()).map_err(|e| Error::Config(e.to_string()))?;
                if p.size() != m {
                    return Err(Error::Config(format!("λ = {p} is not a partition of n - 1 = {m}")));
                }
                Ok(p)
            }
        }
    }

    pub fn label(&self, n: usize, d: usize) -> String {
        self.partition(n, d).map(|p| p.to_string()).unwrap_or_else(|_| "invalid".into())
    }
}

fn default_metrics() -> Vec<Metric> {
    vec![Metric::Purified, Metric::Trace]
}

fn default_zeta() -> ZetaStrategy {
    ZetaStrategy::Marginal
}

fn default_starts() -> usize {
    8
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingConfig {
    pub seed: u64,
    pub n: NGrid,
    pub k: usize,
    pub t: usize,
    pub alpha: Vec<AlphaRule>,
    #[serde(default = "default_metrics")]
    pub metrics: Vec<Metric>,
    /// Also emit the worst-case symmetry term.
    #[serde(default)]
    pub worst: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McU1Config {
    pub seed: u64,
    pub n: NGrid,
    pub k: usize,
    pub t: usize,
    pub alpha: Vec<AlphaRule>,
    pub samples: usize,
    #[serde(default = "default_zeta")]
    pub zeta: ZetaStrategy,
    /// Erase a fresh random set of `t` qubits per sample instead of the first `t`.
    #[serde(default)]
    pub random_pattern: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSudConfig {
    pub seed: u64,
    pub n: NGrid,
    pub d: usize,
    pub t: usize,
    pub lambda: LambdaRule,
    pub samples: usize,
    #[serde(default = "default_zeta")]
    pub zeta: ZetaStrategy,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MinEntropyConfig {
    pub seed: u64,
    pub n: NGrid,
    pub k: usize,
    pub t: usize,
    pub alpha: Vec<AlphaRule>,
    /// Check the closed-form bracket against the SDP where it fits.
    #[serde(default = "default_true")]
    pub sdp: bool,
    /// Random states per oracle family (pure, mixed, structured).
    #[serde(default)]
    pub oracle_states: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecouplingConfig {
    pub seed: u64,
    pub n: NGrid,
    pub k: usize,
    pub t: usize,
    pub alpha: Vec<AlphaRule>,
    pub samples: usize,
    /// Also run unrestricted Haar unitaries as a control.
    #[serde(default)]
    pub control: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SudAverageConfig {
    pub seed: u64,
    pub n: NGrid,
    pub d: usize,
    pub lambda: LambdaRule,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorstInputConfig {
    pub seed: u64,
    pub n: NGrid,
    pub d: Vec<usize>,
    #[serde(default = "default_starts")]
    pub starts: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Sizes for the U(1) Choi leading-order checks (`k = t = 1`, `α = n/2`).
    pub choi_n: Vec<usize>,
    /// Size for the U(1) worst-case checks (`t = 1`, `α = n/2`).
    pub worst_n: usize,
    pub worst_k: Vec<usize>,
    /// Relative tolerance of the leading-order checks.
    pub rel_tol: f64,
    /// SU(d) sizes for the closed-form symmetry term checks.
    #[serde(default)]
    pub sud_n: Vec<usize>,
    #[serde(default)]
    pub sud_d: Vec<usize>,
    /// Monte Carlo decoupling check; skipped when `decoupling_samples = 0`.
    #[serde(default)]
    pub decoupling_samples: usize,
    #[serde(default)]
    pub decoupling_n: usize,
}

/// One experiment, selected by the `kind` key.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ExperimentConfig {
    Scaling(ScalingConfig),
    McU1(McU1Config),
    McSud(McSudConfig),
    MinentropyVerify(MinEntropyConfig),
    Decoupling(DecouplingConfig),
    SudAverage(SudAverageConfig),
    WorstInput(WorstInputConfig),
    Verify(VerifyConfig),
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Experiment name used for output files and the `experiment` column.
    pub fn name(&self) -> &'static str {
        match self {
            Self::Scaling(_) => "scaling",
            Self::McU1(_) => "mc-u1",
            Self::McSud(_) => "mc-sud",
            Self::MinentropyVerify(_) => "minentropy",
            Self::Decoupling(_) => "decoupling",
            Self::SudAverage(_) => "sud-average",
            Self::WorstInput(_) => "worst-input",
            Self::Verify(_) => "verify",
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            Self::Scaling(c) => c.seed,
            Self::McU1(c) => c.seed,
            Self::McSud(c) => c.seed,
            Self::MinentropyVerify(c) => c.seed,
            Self::Decoupling(c) => c.seed,
            Self::SudAverage(c) => c.seed,
            Self::WorstInput(c) => c.seed,
            Self::Verify(c) => c.seed,
        }
    }

    pub fn set_seed(&mut self, seed: u64) {
        match self {
            Self::Scaling(c) => c.seed = seed,
            Self::McU1(c) => c.seed = seed,
            Self::McSud(c) => c.seed = seed,
            Self::MinentropyVerify(c) => c.seed = seed,
            Self::Decoupling(c) => c.seed = seed,
            Self::SudAverage(c) => c.seed = seed,
            Self::WorstInput(c) => c.seed = seed,
            Self::Verify(c) => c.seed = seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let nonempty = |ok: bool, what: &str| if ok { Ok(()) } else { Err(Error::Config(format!("{what} must be non-empty"))) };
        let positive = |x: usize, what: &str| if x > 0 { Ok(()) } else { Err(Error::Config(format!("{what} must be positive"))) };
        match self {
            Self::Scaling(c) => {
                c.n.values()?;
                nonempty(!c.alpha.is_empty(), "alpha")?;
                nonempty(!c.metrics.is_empty(), "metrics")
            }
            Self::McU1(c) => {
                c.n.values()?;
                nonempty(!c.alpha.is_empty(), "alpha")?;
                positive(c.samples, "samples")
            }
            Self::McSud(c) => {
                c.n.values()?;
                positive(c.samples, "samples")
            }
            Self::MinentropyVerify(c) => {
                c.n.values()?;
                nonempty(!c.alpha.is_empty(), "alpha")
            }
            Self::Decoupling(c) => {
                c.n.values()?;
                nonempty(!c.alpha.is_empty(), "alpha")?;
                positive(c.samples, "samples")
            }
            Self::SudAverage(c) => c.n.values().map(|_| ()),
            Self::WorstInput(c) => {
                c.n.values()?;
                nonempty(!c.d.is_empty(), "d")?;
                positive(c.starts, "starts")
            }
            Self::Verify(c) => {
                nonempty(!c.choi_n.is_empty() && !c.worst_k.is_empty(), "choi_n and worst_k")?;
                if c.rel_tol.is_nan() || c.rel_tol <= 0.0 {
                    return Err(Error::Config("rel_tol must be positive".into()));
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_rejects_unknown_keys() {
        let text = "kind = \"scaling\"\nseed = 1\nk = 2\nt = 2\nn = { from = 64, to = 65536, factor = 2 }\nalpha = [{ constant = 5 }, { ratio = 0.5 }]\n";
        let cfg = ExperimentConfig::parse(text).unwrap();
        let ExperimentConfig::Scaling(s) = &cfg else { panic!() };
        assert_eq!(s.n.values().unwrap().len(), 11);
        assert_eq!(s.alpha[1].alpha(100), 50);
        assert!(matches!(ExperimentConfig::parse(&format!("{text}typo = 3\n")), Err(Error::Config(_))));
        assert!(matches!(ExperimentConfig::parse(&text.replace("seed = 1\n", "")), Err(Error::Config(_))));
        assert!(matches!(ExperimentConfig::parse(&text.replace("scaling", "nope")), Err(Error::Config(_))));
    }

    #[test]
    fn grids_and_rules() {
        assert_eq!(NGrid::Linear { from: 4, to: 10, step: 3 }.values().unwrap(), vec![4, 7, 10]);
        assert!(NGrid::List(vec![]).values().is_err());
        assert_eq!(AlphaRule::Ratio(1.0 / 3.0).alpha(9), 3);
        assert_eq!(LambdaRule::Balanced.partition(8, 3).unwrap().parts(), &[3, 2, 2]);
        assert_eq!(LambdaRule::Symmetric.partition(5, 2).unwrap().parts(), &[4]);
        assert!(LambdaRule::Explicit(vec![2, 1]).partition(5, 2).is_err());
    }
}
