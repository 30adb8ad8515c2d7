use crate::dyson::WavePacket;
use crate::error::{Error, Result};
use crate::feynman_mc::GaussianPacket;
use crate::fourier_measure::io::{parse_potential, PotentialSpec};
use crate::fourier_measure::{LinearVectorPotential, PhysicalParams, PointMassMeasure, VectorPotentialFourier};
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const EXPERIMENTS: [&str; 6] =
    ["ito-vs-strat", "dyson-converge", "feynman-map", "renorm-basis", "solver-compare", "heat-analytic"];

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PotentialCfg {
    /// `a_j = amp·cos(k·x)` in component `component`.
    Cos { component: usize, k: [f64; 3], amp: f64 },
    /// `a_j = amp·sin(k·x)`.
    Sin { component: usize, k: [f64; 3], amp: f64 },
    /// `a = ½B×x` with `B = (0, 0, b)`.
    Symmetric { b: f64 },
    /// `a = αx`.
    Linear { alpha: [[f64; 3]; 3] },
    /// Text file in the potential format of `fourier_measure::io`.
    File { path: String },
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialCfg {
    /// Rows `[y1, y2, y3, re, im]` of `ψ₀ = Σ w·e^{iy·x}`.
    Atoms { atoms: Vec<[f64; 5]> },
    /// Planar Gaussian, constant along `x₃`.
    Gaussian {
        sigma: f64,
        center: [f64; 2],
        momentum: [f64; 2],
        #[serde(default)]
        chirp: f64,
    },
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ParamsCfg {
    pub hbar: f64,
    pub t: f64,
    pub lambda: f64,
    pub probes: Vec<[f64; 3]>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct BudgetCfg {
    pub n_steps: usize,
    pub n_samples: u64,
    /// Highest series order `M`.
    pub order: usize,
    pub grid_n: usize,
    pub half_width: f64,
    pub solver_steps: usize,
    pub fine_steps: usize,
    /// Not part of the config hash: results do not depend on it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

impl Default for BudgetCfg {
    fn default() -> Self {
        Self {
            n_steps: 512,
            n_samples: 100_000,
            order: 4,
            grid_n: 128,
            half_width: 8.0,
            solver_steps: 400,
            fine_steps: 1 << 14,
            threads: None,
        }
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct RenormCfg {
    /// `tent`, `trig`, `trig-unbalanced` or `trig-sub:1,4`.
    pub bases: Vec<String>,
    /// Stage counts: `2^J` segments for TENT, `K` frequency blocks for TRIG.
    pub stages: Vec<usize>,
    pub eig_n_basis: usize,
}

impl Default for RenormCfg {
    fn default() -> Self {
        Self {
            bases: vec!["tent".into(), "trig".into(), "trig-unbalanced".into(), "trig-sub:1,4".into()],
            stages: vec![2, 4, 8, 16, 32, 64],
            eig_n_basis: 64,
        }
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub seed: u64,
    #[serde(default = "default_out")]
    pub out: String,
    pub potential: PotentialCfg,
    pub psi0: InitialCfg,
    pub params: ParamsCfg,
    #[serde(default)]
    pub budget: BudgetCfg,
    #[serde(default)]
    pub renorm: RenormCfg,
}

fn default_out() -> String {
    "out".into()
}

/// Potential resolved from its config.
#[derive(Clone, Debug)]
pub enum ResolvedPotential {
    Fourier(VectorPotentialFourier<f64>),
    Linear(LinearVectorPotential<f64>),
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_text(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if !EXPERIMENTS.contains(&self.experiment.as_str()) {
            return Err(Error::Config(format!(
                "unknown experiment {:?}; expected one of {}",
                self.experiment,
                EXPERIMENTS.join(", ")
            )));
        }
        let b = &self.budget;
        if b.n_steps == 0 || b.n_samples < 2 || b.solver_steps == 0 || b.fine_steps == 0 {
            return Err(Error::Config("budgets must be positive (n_samples ≥ 2)".into()));
        }
        if !b.grid_n.is_power_of_two() || !b.fine_steps.is_power_of_two() {
            return Err(Error::Config("grid_n and fine_steps must be powers of two".into()));
        }
        if self.params.probes.is_empty() {
            return Err(Error::Config("at least one probe point is required".into()));
        }
        if let PotentialCfg::Cos { component, .. } | PotentialCfg::Sin { component, .. } = self.potential {
            if component > 2 {
                return Err(Error::Config(format!("component {component} is not 0, 1 or 2")));
            }
        }
        PhysicalParams::new(self.params.hbar, self.params.t, self.params.lambda, [0.0; 3])
            .map_err(|e| Error::Config(e.to_string()))?;
        Ok(())
    }

    /// Text with `threads` and `out` cleared: the settings that cannot
    /// change any result.
    pub fn canonical_text(&self) -> String {
        let mut c = self.clone();
        c.budget.threads = None;
        c.out = String::new();
        c.to_text()
    }

    /// First 16 hex digits of SHA-256 over [`ExperimentConfig::canonical_text`].
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical_text().as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    pub fn potential(&self) -> Result<ResolvedPotential> {
        Ok(match &self.potential {
            PotentialCfg::Cos { component, k, amp } => {
                ResolvedPotential::Fourier(VectorPotentialFourier::cos_field(*component, *k, *amp))
            }
            PotentialCfg::Sin { component, k, amp } => {
                let mut mu: [PointMassMeasure<f64>; 3] = Default::default();
                mu[*component] = PointMassMeasure::sine(*k, *amp);
                ResolvedPotential::Fourier(VectorPotentialFourier::real(mu)?)
            }
            PotentialCfg::Symmetric { b } => ResolvedPotential::Linear(LinearVectorPotential::symmetric_gauge(*b)),
            PotentialCfg::Linear { alpha } => ResolvedPotential::Linear(LinearVectorPotential::derive(*alpha)),
            PotentialCfg::File { path } => {
                let text = std::fs::read_to_string(path)?;
                match parse_potential::<f64>(&text)? {
                    PotentialSpec::Fourier(p) => ResolvedPotential::Fourier(p),
                    PotentialSpec::Linear(l) => ResolvedPotential::Linear(l),
                }
            }
        })
    }

    pub fn fourier_potential(&self) -> Result<VectorPotentialFourier<f64>> {
        match self.potential()? {
            ResolvedPotential::Fourier(p) => Ok(p),
            ResolvedPotential::Linear(_) => {
                Err(Error::Config(format!("{} needs a Fourier-measure potential", self.experiment)))
            }
        }
    }

    pub fn linear_potential(&self) -> Result<LinearVectorPotential<f64>> {
        match self.potential()? {
            ResolvedPotential::Linear(p) => Ok(p),
            ResolvedPotential::Fourier(_) => Err(Error::Config(format!("{} needs a linear potential", self.experiment))),
        }
    }

    pub fn packet(&self) -> Result<WavePacket<f64>> {
        match &self.psi0 {
            InitialCfg::Atoms { atoms } => Ok(WavePacket::new(
                atoms.iter().map(|r| ([r[0], r[1], r[2]], Complex::new(r[3], r[4]))).collect(),
            )),
            InitialCfg::Gaussian { .. } => Err(Error::Config(format!("{} needs an atom initial state", self.experiment))),
        }
    }

    pub fn gaussian(&self) -> Result<GaussianPacket> {
        match &self.psi0 {
            InitialCfg::Gaussian { sigma, center, momentum, chirp } => {
                if !(*sigma > 0.0) {
                    return Err(Error::Config("sigma must be positive".into()));
                }
                Ok(GaussianPacket::planar(*sigma, *center, *momentum).with_chirp(*chirp))
            }
            InitialCfg::Atoms { .. } => {
                Err(Error::Config(format!("{} needs a Gaussian initial state", self.experiment)))
            }
        }
    }

    pub fn params_at(&self, x: [f64; 3]) -> Result<PhysicalParams<f64>> {
        PhysicalParams::new(self.params.hbar, self.params.t, self.params.lambda, x)
    }

    /// A runnable starting point for each experiment.
    pub fn template(name: &str) -> Result<Self> {
        let probes = vec![[0.0, 0.0, 0.0], [0.5, -0.4, 0.0], [-0.8, 0.6, 0.0], [1.1, 0.3, 0.0]];
        let atoms = InitialCfg::Atoms { atoms: vec![[0.5, 0.0, 0.0, 1.0, 0.0], [0.0, -0.5, 0.0, 0.0, 0.5]] };
        let cos = PotentialCfg::Cos { component: 0, k: [0.0, 1.0, 0.0], amp: 1.0 };
        let gauss = InitialCfg::Gaussian { sigma: 1.0, center: [0.3, 0.0], momentum: [0.5, 0.0], chirp: 0.0 };
        let base = |potential, psi0, lambda| ExperimentConfig {
            experiment: name.into(),
            seed: 1,
            out: default_out(),
            potential,
            psi0,
            params: ParamsCfg { hbar: 1.0, t: 1.0, lambda, probes: probes.clone() },
            budget: BudgetCfg::default(),
            renorm: RenormCfg::default(),
        };
        let cfg = match name {
            "ito-vs-strat" => {
                let mut c = base(PotentialCfg::Sin { component: 0, k: [1.0, 0.0, 0.0], amp: 1.0 }, atoms, 1.0);
                c.budget.n_steps = 256;
                c.budget.n_samples = 20_000;
                c
            }
            "dyson-converge" => {
                let mut c = base(cos, atoms, 0.2);
                c.budget.order = 6;
                c
            }
            "feynman-map" => base(cos, atoms, 0.12),
            "renorm-basis" => {
                let mut c = base(
                    PotentialCfg::Linear { alpha: [[0.0, -0.5, 0.5], [0.5, 0.0, -0.5], [-0.5, 0.5, 0.0]] },
                    gauss,
                    1.0,
                );
                c.budget.n_samples = 20_000;
                c
            }
            "solver-compare" => {
                let mut c = base(PotentialCfg::Symmetric { b: 1.0 }, gauss, 1.0);
                c.params.t = 0.5;
                c
            }
            "heat-analytic" => {
                let mut c = base(cos, atoms, 0.1);
                c.params.t = 0.5;
                c.budget.order = 2;
                c
            }
            other => return Err(Error::Config(format!("unknown experiment {other:?}"))),
        };
        Ok(cfg)
    }
}

/// Parses `tent`, `trig`, `trig-unbalanced` or `trig-sub:j,k,…`.
pub fn parse_basis(s: &str) -> Result<crate::cameron_martin::BasisKind> {
    use crate::cameron_martin::BasisKind;
    match s {
        "tent" => Ok(BasisKind::Tent),
        "trig" => Ok(BasisKind::Trig),
        "trig-unbalanced" => Ok(BasisKind::TrigUnbalanced),
        _ => {
            let list = s.strip_prefix("trig-sub:").ok_or_else(|| Error::Config(format!("unknown basis {s:?}")))?;
            let js = list
                .split(',')
                .map(|p| p.trim().parse::<u8>().map_err(|e| Error::Config(format!("basis {s:?}: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            Ok(BasisKind::TrigSubfamily(js))
        }
    }
}

pub fn basis_label(k: &crate::cameron_martin::BasisKind) -> String {
    use crate::cameron_martin::BasisKind;
    match k {
        BasisKind::Tent => "tent".into(),
        BasisKind::Trig => "trig".into(),
        BasisKind::TrigUnbalanced => "trig-unbalanced".into(),
        BasisKind::TrigSubfamily(js) => {
            format!("trig-sub-{}", js.iter().map(|j| j.to_string()).collect::<Vec<_>>().join("-"))
        }
    }
}
