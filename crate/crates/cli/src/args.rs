use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Sweeps and reports for Leggett-Garg tests, coarse-grained spins, cat
/// dynamics, collective entanglement and Pauli-string decidability.
///
/// Lists accept comma-separated values and ranges `start:stop:step`
/// (integer ranges may omit the step). Without `--out`, output goes to
/// `$MACROLAB_OUT_DIR/<command>.<ext>` when that variable is set, else to
/// stdout. A summary is written to stderr.
#[derive(Debug, Parser)]
#[command(name = "macrolab", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Output format; JSON for `undecidability-audit` and `ghz`, CSV otherwise.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Output file.
    #[arg(long, short, global = true)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// Tolerance override `name=value`, repeatable (e.g. `--tol taylor_switch=1e-6`).
    #[arg(long = "tol", global = true, value_name = "NAME=VALUE")]
    pub tol: Vec<String>,
    /// Run the acceptance checks of this command's module instead.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub selftest: bool,
    /// Worker threads for sweeps (default: all cores). Output does not depend on it.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Four-time K for parity measurements on the maximally mixed spin, with the classical rotor.
    LgChsh(LgChsh),
    /// Three-time K of a two-level superposition.
    LgWigner(LgWigner),
    /// Large-spin parity K(x) against finite-j values.
    ParityViolation(ParityViolation),
    /// Overlap of Q for the equatorial coherent state with the post-measurement mixture.
    CoarseOverlap(CoarseOverlap),
    /// Quantum and classical characteristic functions of two-time J_z statistics.
    CharFn(CharFn),
    /// Which-hemisphere Leggett-Garg test of the oscillating cat.
    CatLg(CatLg),
    /// Survival probabilities of the cat under alternating evolution and dephasing.
    Decoherence(Decoherence),
    /// Qubit-chain circuit producing the cat amplitudes.
    CatCircuit(CatCircuit),
    /// Degree of entanglement of collective block operators in the harmonic chain.
    ChainEpsilon(ChainEpsilon),
    /// Klein-Gordon window propagators and their degree of entanglement.
    FieldPropagator(FieldPropagator),
    /// Collective entanglement of Dicke states.
    EnsembleDicke(EnsembleDicke),
    /// Collective entanglement of the singlet with admixture over (s, p).
    EnsembleSinglet(EnsembleSinglet),
    /// Critical block size of the singlet with admixture.
    EnsembleAdmixture(EnsembleAdmixture),
    /// Decidability against measurement randomness for every Pauli string.
    UndecidabilityAudit(UndecidabilityAudit),
    /// Logical derivation against the quantum value on the GHZ state.
    Ghz(Ghz),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::LgChsh(_) => "lg-chsh",
            Self::LgWigner(_) => "lg-wigner",
            Self::ParityViolation(_) => "parity-violation",
            Self::CoarseOverlap(_) => "coarse-overlap",
            Self::CharFn(_) => "char-fn",
            Self::CatLg(_) => "cat-lg",
            Self::Decoherence(_) => "decoherence",
            Self::CatCircuit(_) => "cat-circuit",
            Self::ChainEpsilon(_) => "chain-epsilon",
            Self::FieldPropagator(_) => "field-propagator",
            Self::EnsembleDicke(_) => "ensemble-dicke",
            Self::EnsembleSinglet(_) => "ensemble-singlet",
            Self::EnsembleAdmixture(_) => "ensemble-admixture",
            Self::UndecidabilityAudit(_) => "undecidability-audit",
            Self::Ghz(_) => "ghz",
        }
    }

    /// Library module whose acceptance checks `--selftest` runs.
    pub fn module(&self) -> &'static str {
        match self {
            Self::LgChsh(_) | Self::LgWigner(_) | Self::ParityViolation(_) => "lg",
            Self::CoarseOverlap(_) | Self::CharFn(_) => "coarse",
            Self::CatLg(_) | Self::Decoherence(_) | Self::CatCircuit(_) => "cat",
            Self::ChainEpsilon(_) | Self::FieldPropagator(_) => "chain",
            Self::EnsembleDicke(_) | Self::EnsembleSinglet(_) | Self::EnsembleAdmixture(_) => "ensemble",
            Self::UndecidabilityAudit(_) | Self::Ghz(_) => "undecidability",
        }
    }

    pub fn default_format(&self) -> Format {
        match self {
            Self::UndecidabilityAudit(_) | Self::Ghz(_) => Format::Json,
            _ => Format::Csv,
        }
    }

    pub fn config(&self) -> serde_json::Value {
        let v = match self {
            Self::LgChsh(a) => serde_json::to_value(a),
            Self::LgWigner(a) => serde_json::to_value(a),
            Self::ParityViolation(a) => serde_json::to_value(a),
            Self::CoarseOverlap(a) => serde_json::to_value(a),
            Self::CharFn(a) => serde_json::to_value(a),
            Self::CatLg(a) => serde_json::to_value(a),
            Self::Decoherence(a) => serde_json::to_value(a),
            Self::CatCircuit(a) => serde_json::to_value(a),
            Self::ChainEpsilon(a) => serde_json::to_value(a),
            Self::FieldPropagator(a) => serde_json::to_value(a),
            Self::EnsembleDicke(a) => serde_json::to_value(a),
            Self::EnsembleSinglet(a) => serde_json::to_value(a),
            Self::EnsembleAdmixture(a) => serde_json::to_value(a),
            Self::UndecidabilityAudit(a) => serde_json::to_value(a),
            Self::Ghz(a) => serde_json::to_value(a),
        };
        v.expect("argument structs serialize")
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LgChsh {
    /// Spin length j.
    #[arg(long, default_value_t = 0.5)]
    pub j: f64,
    /// Values of omega * dt.
    #[arg(long, default_value = "0:3.2:0.01")]
    pub sweep_omega_dt: String,
    /// Add a sampled K from this many runs per correlation (needs --seed).
    #[arg(long)]
    pub shots: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LgWigner {
    /// Values of dE * dt.
    #[arg(long, default_value = "0:3.2:0.01")]
    pub sweep_de_dt: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ParityViolation {
    /// Values of x = (2j+1) omega dt.
    #[arg(long, default_value = "0.02:3.2:0.02")]
    pub sweep_x: String,
    /// Spin lengths for the finite-j columns.
    #[arg(long, default_value = "10,50")]
    pub j: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CoarseOverlap {
    /// Spin lengths.
    #[arg(long, default_value = "25,100,400")]
    pub j: String,
    /// Slot widths; hemispheres when omitted.
    #[arg(long)]
    pub delta_m: Option<String>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CharFn {
    #[arg(long, default_value_t = 10000.0)]
    pub j: f64,
    /// xi = eta = scale / sqrt(j).
    #[arg(long, default_value = "0.1,2")]
    pub scale: String,
    /// Rotation angles theta.
    #[arg(long, default_value = "0:3.14:0.02")]
    pub sweep_theta: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DetectorArg {
    Povm,
    VonNeumann,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CatLg {
    #[arg(long, default_value_t = 50.0)]
    pub j: f64,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    /// Values of omega * dt for equidistant times.
    #[arg(long, default_value = "0.01:1.6:0.01")]
    pub sweep_omega_dt: String,
    /// Three-time or four-time inequality.
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u8).range(3..=4))]
    pub times: u8,
    #[arg(long, value_enum, default_value_t = DetectorArg::Povm)]
    pub detector: DetectorArg,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Decoherence {
    #[arg(long, default_value_t = 20.0)]
    pub j: f64,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    /// Time between dephasing events.
    #[arg(long, default_value_t = std::f64::consts::PI / 10.0)]
    pub dt: f64,
    #[arg(long, default_value_t = 40)]
    pub steps: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CatCircuit {
    #[arg(long, default_value_t = 4)]
    pub qubits: usize,
    #[arg(long, default_value_t = 0.1)]
    pub omega_dt: f64,
    /// Numbers of intervals.
    #[arg(long, default_value = "1:16")]
    pub intervals: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ChainEpsilon {
    #[arg(long, default_value_t = 0.99)]
    pub alpha: f64,
    /// Sites per block.
    #[arg(long, default_value = "1:12")]
    pub n: String,
    /// Gaps between the blocks.
    #[arg(long, default_value = "0")]
    pub d: String,
    /// Subblock sizes for periodic blocks (m = n / s); contiguous when omitted.
    #[arg(long)]
    pub s: Option<String>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FieldPropagator {
    #[arg(long, default_value = "0.5,1,2")]
    pub mass: String,
    /// Window lengths L.
    #[arg(long, default_value = "1,2")]
    pub l: String,
    /// Distances r in units of L.
    #[arg(long, default_value = "1,1.5,2,4")]
    pub r_over_l: String,
    /// Momentum cutoff of the D_Pi constant tail, in units of 2 pi / L.
    #[arg(long, default_value_t = macrolab_core::chain::DEFAULT_CUTOFF_PERIODS)]
    pub cutoff_periods: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EnsembleDicke {
    /// Total spin numbers N.
    #[arg(long = "N", default_value = "4:40:2")]
    pub n_total: String,
    /// Excitations k; 1 is the W state.
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Block size n.
    #[arg(long, default_value_t = 1)]
    pub block: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EnsembleSinglet {
    /// Block sizes n = 2s.
    #[arg(long, default_value = "1:20")]
    pub n: String,
    /// Singlet weights p.
    #[arg(long, default_value = "0:1:0.05")]
    pub p: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EnsembleAdmixture {
    #[arg(long, default_value = "0.1:0.9:0.1")]
    pub p: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct UndecidabilityAudit {
    /// Number of qubits.
    #[arg(long = "N", default_value_t = 2)]
    pub n: usize,
    /// `bell`, `ghz`, `z`, `x`, `random`, or comma-separated labels such as `ZZ,XX`.
    #[arg(long, default_value = "bell")]
    pub axioms: String,
    /// Truth bits of the axioms as a 0/1 string (all 0 when omitted).
    #[arg(long)]
    pub bits: Option<String>,
    /// Boolean functions in the black box, `y0`..`y3` per qubit; sets the bits.
    #[arg(long)]
    pub functions: Option<String>,
    #[arg(long, default_value_t = 10000)]
    pub shots: u64,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Ghz {}
