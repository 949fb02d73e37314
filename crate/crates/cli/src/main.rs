//! Command-line surface for building, exercising, and verifying
//! insertion/deletion codes.
//!
//! `build` writes a pair of files — `<out>.spec` holding the exact
//! construction inputs and `<out>.table` holding the inner code — and
//! every other subcommand loads a code back through `--code <prefix>`.
//! Loading re-runs the recorded construction (it is deterministic in
//! the stored search seed) and re-verifies both files against each
//! other: headers are claims, not trusted facts.
//!
//! Errors leave through a single-line `error: <kind>: <message>` on
//! stderr with a kind-specific exit status, so scripts can tell a
//! decode failure (3) from bad inputs (2), a resource limit (4), a
//! construction failure (5), a contract violation (6), or a crash (1).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::error::ErrorKind as ClapErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use insdel::channel::{apply_plan, corrupt, CorruptionPlan, Strategy};
use insdel::gf::{Fe, FieldSpec, Poly};
use insdel::highrate::{build_highrate_with, hr_decode, hr_encode, BuildMode, HighRateSpec};
use insdel::innersearch::{search_kary_with, CodeTable, SearchOptions};
use insdel::listconcat::{concat_encode, list_concat_decode, ConcatCodeSpec};
use insdel::regimes::{
    build_highnoise_with, build_kary_with, verify_code, CodeUnderTest, HighNoiseMode, KaryMode,
};
use insdel::rs::RsCodeSpec;
use insdel::seqkit::{format_strings, parse_strings, SymbolString};
use insdel::{frac, mul_floor, parse_frac, Error, Frac, Result};

#[derive(Parser)]
#[command(
    name = "insdel",
    version,
    about = "Build, corrupt, decode, and verify insertion/deletion codes"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Construct a code and write `<out>.spec` and `<out>.table`.
    Build {
        #[command(flatten)]
        build: BuildArgs,
        /// Output path prefix (no extension).
        #[arg(long)]
        out: PathBuf,
    },
    /// Encode a message with a built code.
    Encode {
        /// Path prefix of a built code (expects `.spec` and `.table`).
        #[arg(long)]
        code: PathBuf,
        /// Message coefficients, low degree first, e.g. "13 57".
        #[arg(long)]
        message: String,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply an adversarial corruption strategy to a word.
    Corrupt {
        #[arg(long)]
        code: PathBuf,
        /// Input word file.
        #[arg(long = "in")]
        input: PathBuf,
        /// Maximum number of edits.
        #[arg(long)]
        budget: usize,
        /// uniform | buffer-spoof | chunk-kill | block-shift
        #[arg(long)]
        strategy: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Corrupted word output file.
        #[arg(long)]
        out: PathBuf,
        /// Optional replayable edit-script output file.
        #[arg(long)]
        plan: Option<PathBuf>,
    },
    /// Decode a (possibly corrupted) word back to its message.
    Decode {
        #[arg(long)]
        code: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-measure a built code's claims and print the report.
    Verify {
        #[arg(long)]
        code: PathBuf,
        /// Pair budget per verification check.
        #[arg(long, default_value_t = 2000)]
        effort: usize,
    },
    /// Sweep budgets x strategies x trials and emit one CSV row each.
    Experiment {
        #[command(flatten)]
        build: BuildArgs,
        /// Comma-separated budget fractions of the total length, each in [0, 2].
        #[arg(long)]
        budget_fracs: String,
        #[arg(long)]
        trials: usize,
        /// Comma-separated strategy names.
        #[arg(long)]
        strategies: String,
        /// CSV output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Measure real decode times. Off by default so identical runs
        /// produce byte-identical CSV.
        #[arg(long)]
        timing: bool,
    },
    /// Re-apply a saved edit script to a word and decode the result.
    Replay {
        #[arg(long)]
        code: PathBuf,
        /// The original (uncorrupted) word file.
        #[arg(long = "in")]
        input: PathBuf,
        /// Edit-script file written by `corrupt --plan`.
        #[arg(long)]
        plan: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Regime {
    Highrate,
    Highnoise,
    Kary,
    Custom,
}

impl Regime {
    fn name(self) -> &'static str {
        match self {
            Regime::Highrate => "highrate",
            Regime::Highnoise => "highnoise",
            Regime::Kary => "kary",
            Regime::Custom => "custom",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Reference,
    Explicit,
}

impl Mode {
    fn name(self) -> &'static str {
        match self {
            Mode::Reference => "reference",
            Mode::Explicit => "explicit",
        }
    }
}

/// Construction flags shared by `build` and `experiment`. Which ones a
/// regime requires is checked after parsing, so the error can name the
/// missing or contradictory flag.
#[derive(Args, Clone, Debug)]
struct BuildArgs {
    /// highrate | highnoise | kary | custom
    #[arg(long)]
    regime: Regime,
    /// reference (built-in formulas) | explicit (directly chosen shape)
    #[arg(long, value_enum, default_value_t = Mode::Explicit)]
    mode: Mode,
    /// Design error fraction, e.g. "1/640".
    #[arg(long)]
    eps: Option<String>,
    /// Outer field order (prime power).
    #[arg(long)]
    q: u64,
    /// Inner alphabet size.
    #[arg(long)]
    k: Option<u32>,
    /// Inner block length.
    #[arg(long)]
    m: Option<usize>,
    /// Outer symbol packing depth (high-rate regime).
    #[arg(long)]
    h: Option<u32>,
    /// Outer code dimension (custom regime).
    #[arg(long)]
    d: Option<usize>,
    /// Inner error fraction.
    #[arg(long)]
    delta: Option<String>,
    /// List-decoding slack fraction (custom regime).
    #[arg(long)]
    gamma: Option<String>,
    /// Outer code rate (high-noise and k-ary regimes).
    #[arg(long)]
    rate: Option<String>,
    /// Buffer-detection ones-fraction threshold (high-rate regime).
    #[arg(long)]
    theta_buf: Option<String>,
    /// Root seed: seeds the table search, and in `experiment` also the
    /// per-trial expansion (where it is mandatory).
    #[arg(long)]
    seed: Option<u64>,
    /// Candidate budget for the inner-table search.
    #[arg(long, default_value_t = 1 << 22)]
    max_candidates: u64,
}

/// A fully resolved construction request: everything needed to re-run
/// the build deterministically. This is exactly what `.spec` files
/// store.
#[derive(Clone, Debug)]
struct BuildSpec {
    regime: Regime,
    mode: Mode,
    q: u64,
    eps: Option<Frac>,
    k: Option<u32>,
    m: Option<usize>,
    h: Option<u32>,
    d: Option<usize>,
    delta: Option<Frac>,
    gamma: Option<Frac>,
    rate: Option<Frac>,
    theta_buf: Option<Frac>,
    search_seed: u64,
    search_max: u64,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

fn parse_frac_flag(value: &Option<String>, flag: &str) -> Result<Option<Frac>> {
    match value {
        None => Ok(None),
        Some(text) => parse_frac(text)
            .map(Some)
            .map_err(|e| invalid(format!("{flag}: {e}"))),
    }
}

impl BuildSpec {
    fn from_args(args: &BuildArgs) -> Result<Self> {
        let mut spec = BuildSpec {
            regime: args.regime,
            mode: args.mode,
            q: args.q,
            eps: parse_frac_flag(&args.eps, "--eps")?,
            k: args.k,
            m: args.m,
            h: args.h,
            d: args.d,
            delta: parse_frac_flag(&args.delta, "--delta")?,
            gamma: parse_frac_flag(&args.gamma, "--gamma")?,
            rate: parse_frac_flag(&args.rate, "--rate")?,
            theta_buf: parse_frac_flag(&args.theta_buf, "--theta-buf")?,
            search_seed: args.seed.unwrap_or_else(|| SearchOptions::default().seed),
            search_max: args.max_candidates,
        };
        spec.validate()?;
        Ok(spec)
    }

    fn has(&self, name: &str) -> bool {
        match name {
            "eps" => self.eps.is_some(),
            "k" => self.k.is_some(),
            "m" => self.m.is_some(),
            "h" => self.h.is_some(),
            "d" => self.d.is_some(),
            "delta" => self.delta.is_some(),
            "gamma" => self.gamma.is_some(),
            "rate" => self.rate.is_some(),
            "theta_buf" => self.theta_buf.is_some(),
            other => unreachable!("unknown parameter {other}"),
        }
    }

    /// Enforces the per-regime flag contract, filling the one defaulted
    /// parameter (the high-rate buffer threshold) first.
    fn validate(&mut self) -> Result<()> {
        if self.q < 2 {
            return Err(invalid(format!("--q must be at least 2, got {}", self.q)));
        }
        if self.regime == Regime::Highrate && self.mode == Mode::Explicit && self.theta_buf.is_none()
        {
            self.theta_buf = Some(frac(1, 160));
        }
        let all = [
            "eps",
            "k",
            "m",
            "h",
            "d",
            "delta",
            "gamma",
            "rate",
            "theta_buf",
        ];
        let needed: &[&str] = match (self.regime, self.mode) {
            (Regime::Highrate, Mode::Reference) => &["eps"],
            (Regime::Highrate, Mode::Explicit) => &["eps", "m", "h", "delta", "theta_buf"],
            (Regime::Highnoise, Mode::Reference) => &["eps"],
            (Regime::Highnoise, Mode::Explicit) => &["eps", "k", "m", "rate"],
            (Regime::Kary, Mode::Reference) => &["eps", "k"],
            (Regime::Kary, Mode::Explicit) => &["eps", "k", "m", "rate"],
            (Regime::Custom, Mode::Reference) => {
                return Err(invalid(
                    "the custom regime has no reference parameterization; use --mode explicit",
                ));
            }
            (Regime::Custom, Mode::Explicit) => &["k", "m", "d", "delta", "gamma"],
        };
        for name in needed {
            if !self.has(name) {
                return Err(invalid(format!(
                    "regime {} in {} mode requires {}",
                    self.regime.name(),
                    self.mode.name(),
                    flag_label(name)
                )));
            }
        }
        for name in all.iter().filter(|n| !needed.contains(n)) {
            if self.has(name) {
                return Err(invalid(format!(
                    "{} does not apply to regime {} in {} mode",
                    flag_label(name),
                    self.regime.name(),
                    self.mode.name()
                )));
            }
        }
        Ok(())
    }

    fn kind(&self) -> &'static str {
        match self.regime {
            Regime::Highrate => "buffered",
            _ => "concat",
        }
    }

    /// The (key, value) pairs in their fixed serialization order.
    fn fields(&self) -> Vec<(&'static str, String)> {
        let mut out = vec![
            ("mode", self.mode.name().to_string()),
            ("q", self.q.to_string()),
        ];
        if let Some(v) = self.eps {
            out.push(("eps", v.to_string()));
        }
        if let Some(v) = self.k {
            out.push(("k", v.to_string()));
        }
        if let Some(v) = self.m {
            out.push(("m", v.to_string()));
        }
        if let Some(v) = self.h {
            out.push(("h", v.to_string()));
        }
        if let Some(v) = self.d {
            out.push(("d", v.to_string()));
        }
        if let Some(v) = self.delta {
            out.push(("delta", v.to_string()));
        }
        if let Some(v) = self.gamma {
            out.push(("gamma", v.to_string()));
        }
        if let Some(v) = self.rate {
            out.push(("rate", v.to_string()));
        }
        if let Some(v) = self.theta_buf {
            out.push(("theta_buf", v.to_string()));
        }
        out.push(("search_seed", self.search_seed.to_string()));
        out.push(("search_max", self.search_max.to_string()));
        out
    }

    fn to_file_text(&self) -> String {
        let mut out = String::from("# reproducible build inputs; loading re-runs this construction\n");
        out.push_str(&format!("kind={}\n", self.kind()));
        out.push_str(&format!("regime={}\n", self.regime.name()));
        for (key, value) in self.fields() {
            out.push_str(&format!("{key}={value}\n"));
        }
        out
    }

    fn from_file_text(text: &str) -> Result<Self> {
        let mut kind = None;
        let mut regime = None;
        let mut mode = None;
        let mut q = None;
        let mut eps = None;
        let mut k = None;
        let mut m = None;
        let mut h = None;
        let mut d = None;
        let mut delta = None;
        let mut gamma = None;
        let mut rate = None;
        let mut theta_buf = None;
        let mut search_seed = None;
        let mut search_max = None;
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| invalid(format!("spec line without '=': {line:?}")))?;
            let dup = |was: bool| -> Result<()> {
                if was {
                    Err(invalid(format!("duplicate spec key {key:?}")))
                } else {
                    Ok(())
                }
            };
            let bad = || invalid(format!("bad spec value for {key}: {value:?}"));
            match key {
                "kind" => {
                    dup(kind.is_some())?;
                    kind = Some(value.to_string());
                }
                "regime" => {
                    dup(regime.is_some())?;
                    regime = Some(match value {
                        "highrate" => Regime::Highrate,
                        "highnoise" => Regime::Highnoise,
                        "kary" => Regime::Kary,
                        "custom" => Regime::Custom,
                        _ => return Err(bad()),
                    });
                }
                "mode" => {
                    dup(mode.is_some())?;
                    mode = Some(match value {
                        "reference" => Mode::Reference,
                        "explicit" => Mode::Explicit,
                        _ => return Err(bad()),
                    });
                }
                "q" => {
                    dup(q.is_some())?;
                    q = Some(value.parse().map_err(|_| bad())?);
                }
                "eps" => {
                    dup(eps.is_some())?;
                    eps = Some(parse_frac(value).map_err(|_| bad())?);
                }
                "k" => {
                    dup(k.is_some())?;
                    k = Some(value.parse().map_err(|_| bad())?);
                }
                "m" => {
                    dup(m.is_some())?;
                    m = Some(value.parse().map_err(|_| bad())?);
                }
                "h" => {
                    dup(h.is_some())?;
                    h = Some(value.parse().map_err(|_| bad())?);
                }
                "d" => {
                    dup(d.is_some())?;
                    d = Some(value.parse().map_err(|_| bad())?);
                }
                "delta" => {
                    dup(delta.is_some())?;
                    delta = Some(parse_frac(value).map_err(|_| bad())?);
                }
                "gamma" => {
                    dup(gamma.is_some())?;
                    gamma = Some(parse_frac(value).map_err(|_| bad())?);
                }
                "rate" => {
                    dup(rate.is_some())?;
                    rate = Some(parse_frac(value).map_err(|_| bad())?);
                }
                "theta_buf" => {
                    dup(theta_buf.is_some())?;
                    theta_buf = Some(parse_frac(value).map_err(|_| bad())?);
                }
                "search_seed" => {
                    dup(search_seed.is_some())?;
                    search_seed = Some(value.parse().map_err(|_| bad())?);
                }
                "search_max" => {
                    dup(search_max.is_some())?;
                    search_max = Some(value.parse().map_err(|_| bad())?);
                }
                _ => return Err(invalid(format!("unknown spec key {key:?}"))),
            }
        }
        let mut spec = BuildSpec {
            regime: regime.ok_or_else(|| invalid("spec file missing regime="))?,
            mode: mode.ok_or_else(|| invalid("spec file missing mode="))?,
            q: q.ok_or_else(|| invalid("spec file missing q="))?,
            eps,
            k,
            m,
            h,
            d,
            delta,
            gamma,
            rate,
            theta_buf,
            search_seed: search_seed.ok_or_else(|| invalid("spec file missing search_seed="))?,
            search_max: search_max.ok_or_else(|| invalid("spec file missing search_max="))?,
        };
        spec.validate()?;
        let claimed = kind.ok_or_else(|| invalid("spec file missing kind="))?;
        if claimed != spec.kind() {
            return Err(invalid(format!(
                "spec file claims kind={claimed} but regime {} builds kind={}",
                spec.regime.name(),
                spec.kind()
            )));
        }
        Ok(spec)
    }

    /// Semicolon-joined `key=value` rendering for the CSV params column.
    fn params_csv(&self) -> String {
        self.fields()
            .into_iter()
            .map(|(key, value)| format!("{key}={value}"))
            .collect::<Vec<_>>()
            .join(";")
    }

    fn build(&self) -> Result<BuiltCode> {
        let opts = SearchOptions {
            target_size: None,
            max_candidates: self.search_max,
            seed: self.search_seed,
        };
        let need = |v: Option<Frac>| v.expect("validated");
        match self.regime {
            Regime::Highrate => {
                let mode = match self.mode {
                    Mode::Reference => BuildMode::Reference,
                    Mode::Explicit => BuildMode::Explicit {
                        delta: need(self.delta),
                        m: self.m.expect("validated"),
                        h: self.h.expect("validated"),
                        theta_buf: need(self.theta_buf),
                    },
                };
                let spec = build_highrate_with(need(self.eps), self.q, &mode, &opts)?;
                Ok(BuiltCode::Buffered(spec))
            }
            Regime::Highnoise => {
                let mode = match self.mode {
                    Mode::Reference => HighNoiseMode::Reference,
                    Mode::Explicit => HighNoiseMode::Explicit {
                        k: self.k.expect("validated"),
                        m: self.m.expect("validated"),
                        outer_rate: need(self.rate),
                    },
                };
                let spec = build_highnoise_with(need(self.eps), self.q, &mode, &opts)?;
                Ok(BuiltCode::Concat(spec))
            }
            Regime::Kary => {
                let mode = match self.mode {
                    Mode::Reference => KaryMode::Reference,
                    Mode::Explicit => KaryMode::Explicit {
                        m: self.m.expect("validated"),
                        outer_rate: need(self.rate),
                    },
                };
                let spec =
                    build_kary_with(self.k.expect("validated"), need(self.eps), self.q, &mode, &opts)?;
                Ok(BuiltCode::Concat(spec))
            }
            Regime::Custom => {
                let field = FieldSpec::with_order(self.q)?;
                let n = self.q as usize;
                let outer = RsCodeSpec::new(field, n, self.d.expect("validated"))?;
                let delta = need(self.delta);
                let search_opts = SearchOptions {
                    target_size: Some(n * n),
                    max_candidates: self.search_max,
                    seed: self.search_seed,
                };
                let tau = Frac::from_integer(1) - delta;
                let inner =
                    search_kary_with(self.m.expect("validated"), self.k.expect("validated"), tau, &search_opts)?;
                let spec = ConcatCodeSpec::new(outer, inner, delta, need(self.gamma))?;
                Ok(BuiltCode::Concat(spec))
            }
        }
    }
}

fn flag_label(name: &str) -> String {
    format!("--{}", name.replace('_', "-"))
}

/// A constructed code behind a uniform encode/decode surface.
enum BuiltCode {
    Buffered(HighRateSpec),
    Concat(ConcatCodeSpec),
}

impl BuiltCode {
    fn inner(&self) -> &CodeTable {
        match self {
            BuiltCode::Buffered(s) => s.inner(),
            BuiltCode::Concat(s) => s.inner(),
        }
    }

    fn outer_order(&self) -> u64 {
        match self {
            BuiltCode::Buffered(s) => s.outer().field().order() as u64,
            BuiltCode::Concat(s) => s.outer().field().order() as u64,
        }
    }

    fn outer_d(&self) -> usize {
        match self {
            BuiltCode::Buffered(s) => s.outer().d(),
            BuiltCode::Concat(s) => s.outer().d(),
        }
    }

    fn alphabet(&self) -> u32 {
        self.inner().k()
    }

    fn block_len(&self) -> usize {
        self.inner().m()
    }

    fn total_len(&self) -> usize {
        match self {
            BuiltCode::Buffered(s) => s.total_len(),
            BuiltCode::Concat(s) => s.total_len(),
        }
    }

    fn encode(&self, message: &Poly) -> Result<SymbolString> {
        match self {
            BuiltCode::Buffered(s) => hr_encode(s, message),
            BuiltCode::Concat(s) => concat_encode(s, message),
        }
    }

    fn decode(&self, s: &SymbolString) -> Result<Poly> {
        match self {
            BuiltCode::Buffered(spec) => hr_decode(spec, s),
            BuiltCode::Concat(spec) => list_concat_decode(spec, s),
        }
    }

    fn as_code_under_test(&self) -> CodeUnderTest<'_> {
        match self {
            BuiltCode::Buffered(s) => CodeUnderTest::Buffered(s),
            BuiltCode::Concat(s) => CodeUnderTest::Concat(s),
        }
    }

    fn rate(&self) -> f64 {
        let info = self.outer_d() as f64 * (self.outer_order() as f64).log2();
        info / (self.total_len() as f64 * (self.alphabet() as f64).log2())
    }

    /// Instantiates a named attack with this code's layout facts.
    fn strategy(&self, name: &str) -> Result<Strategy> {
        let block_len = self.block_len();
        let (buffer_len, ones_per_chunk) = match self {
            BuiltCode::Buffered(s) => (
                s.buffer_len(),
                mul_floor(s.theta_buf(), s.buffer_len()) + 1,
            ),
            BuiltCode::Concat(s) => (mul_floor(s.delta(), s.m()).max(1), 1),
        };
        match name {
            "uniform" => Ok(Strategy::Uniform),
            "buffer-spoof" => Ok(Strategy::BufferSpoof {
                block_len,
                buffer_len,
            }),
            "chunk-kill" => Ok(Strategy::ChunkKill {
                block_len,
                buffer_len,
                ones_per_chunk,
            }),
            "block-shift" => Ok(Strategy::BlockShift { block_len }),
            other => Err(invalid(format!(
                "unknown strategy {other:?}; expected uniform, buffer-spoof, chunk-kill, or block-shift"
            ))),
        }
    }

    fn summary(&self) -> String {
        let mut out = String::new();
        let mut line = |key: &str, value: String| out.push_str(&format!("{key}={value}\n"));
        match self {
            BuiltCode::Buffered(s) => {
                line("kind", "buffered".into());
                line("outer_order", s.outer().field().order().to_string());
                line("outer_n", s.n().to_string());
                line("outer_d", s.outer().d().to_string());
                line("block_len", s.m().to_string());
                line("buffer_len", s.buffer_len().to_string());
                line("inner_radius", s.inner().verified_radius().to_string());
                line("total_len", s.total_len().to_string());
                line("design_budget", s.design_budget().to_string());
            }
            BuiltCode::Concat(s) => {
                line("kind", "concat".into());
                line("outer_order", s.outer().field().order().to_string());
                line("outer_n", s.n().to_string());
                line("outer_d", s.outer().d().to_string());
                line("block_len", s.m().to_string());
                line("inner_alphabet", s.inner().k().to_string());
                line("inner_radius", s.inner().verified_radius().to_string());
                line("delta", s.delta().to_string());
                line("gamma", s.gamma().to_string());
                line("total_len", s.total_len().to_string());
                line("design_budget", s.decode_budget().to_string());
            }
        }
        out.push_str(&format!("rate={:.6}\n", self.rate()));
        out
    }
}

/// Minimal deterministic u64 stream (SplitMix64), so experiment results
/// can never shift under an external generator's version bump.
struct SplitMix64(u64);

impl SplitMix64 {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
}

/// Expands the root seed into one lane per (sweep point, trial).
fn trial_seed(root: u64, point: u64, trial: u64) -> u64 {
    let mut sm = SplitMix64(
        root.wrapping_mul(0xA24B_AED4_963E_E407)
            .wrapping_add(point.wrapping_mul(0x9FB2_1C65_1E98_DF25))
            .wrapping_add(trial),
    );
    sm.next()
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| invalid(format!("cannot write {}: {e}", path.display())))
}

fn write_out(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => write_text(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    PathBuf::from(format!("{}.{suffix}", prefix.display()))
}

/// Loads a built code: parses the spec file, re-runs its deterministic
/// construction, and demands that the stored table matches the rebuilt
/// one exactly.
fn load_code(prefix: &Path) -> Result<(BuildSpec, BuiltCode)> {
    let spec_path = with_suffix(prefix, "spec");
    let table_path = with_suffix(prefix, "table");
    let spec = BuildSpec::from_file_text(&read_text(&spec_path)?)?;
    let code = spec.build()?;
    let table = CodeTable::from_text(&read_text(&table_path)?)?;
    if table.to_text() != code.inner().to_text() {
        return Err(Error::ContractViolation(format!(
            "{} does not match the inner table reproduced from {}",
            table_path.display(),
            spec_path.display()
        )));
    }
    Ok((spec, code))
}

fn parse_message(text: &str, order: u64, d: usize) -> Result<Poly> {
    let mut coeffs = Vec::new();
    for token in text.split_whitespace() {
        let c: u64 = token
            .parse()
            .map_err(|_| invalid(format!("bad message coefficient {token:?}")))?;
        if c >= order {
            return Err(invalid(format!(
                "coefficient {c} outside the field of order {order}"
            )));
        }
        coeffs.push(Fe(c as u32));
    }
    if coeffs.is_empty() {
        return Err(invalid("empty message"));
    }
    if coeffs.len() > d {
        return Err(invalid(format!(
            "message has {} coefficients, outer dimension is {d}",
            coeffs.len()
        )));
    }
    Ok(Poly::from_coeffs(coeffs))
}

/// Renders a decoded message as exactly `d` coefficients, low first.
fn format_message(p: &Poly, d: usize) -> String {
    (0..d)
        .map(|i| p.coeff(i).0.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn read_word(path: &Path, expect_k: u32) -> Result<SymbolString> {
    let (k, mut words) = parse_strings(&read_text(path)?)?;
    if k != expect_k {
        return Err(Error::AlphabetMismatch(format!(
            "{} has alphabet {k}, the code uses {expect_k}",
            path.display()
        )));
    }
    if words.len() != 1 {
        return Err(invalid(format!(
            "expected exactly one word in {}, found {}",
            path.display(),
            words.len()
        )));
    }
    Ok(words.pop().expect("length checked"))
}

fn format_word(w: &SymbolString) -> Result<String> {
    format_strings(w.k(), std::slice::from_ref(w))
}

fn run_build(args: &BuildArgs, out: &Path) -> Result<()> {
    let spec = BuildSpec::from_args(args)?;
    let code = spec.build()?;
    let spec_path = with_suffix(out, "spec");
    let table_path = with_suffix(out, "table");
    write_text(&spec_path, &spec.to_file_text())?;
    write_text(&table_path, &code.inner().to_text())?;
    print!("{}", code.summary());
    println!("wrote {} and {}", spec_path.display(), table_path.display());
    Ok(())
}

fn run_encode(prefix: &Path, message: &str, out: &Option<PathBuf>) -> Result<()> {
    let (_, code) = load_code(prefix)?;
    let msg = parse_message(message, code.outer_order(), code.outer_d())?;
    let cw = code.encode(&msg)?;
    write_out(out, &format_word(&cw)?)
}

fn run_corrupt(
    prefix: &Path,
    input: &Path,
    budget: usize,
    strategy: &str,
    seed: u64,
    out: &Path,
    plan_path: &Option<PathBuf>,
) -> Result<()> {
    let (_, code) = load_code(prefix)?;
    let word = read_word(input, code.alphabet())?;
    let strat = code.strategy(strategy)?;
    let (corrupted, plan) = corrupt(&word, budget, &strat, seed)?;
    write_text(out, &format_word(&corrupted)?)?;
    if let Some(path) = plan_path {
        write_text(path, &plan.to_text())?;
    }
    println!("edits={}", plan.edits.len());
    Ok(())
}

fn run_decode(prefix: &Path, input: &Path, out: &Option<PathBuf>) -> Result<()> {
    let (_, code) = load_code(prefix)?;
    let word = read_word(input, code.alphabet())?;
    let message = code.decode(&word)?;
    write_out(out, &format!("{}\n", format_message(&message, code.outer_d())))
}

fn run_verify(prefix: &Path, effort: usize) -> Result<()> {
    let (_, code) = load_code(prefix)?;
    let report = verify_code(&code.as_code_under_test(), effort);
    print!("{}", report.to_text());
    if !report.all_pass() {
        let failed = report.checks.iter().filter(|c| !c.pass).count();
        return Err(Error::ContractViolation(format!(
            "{failed} of {} verification checks failed",
            report.checks.len()
        )));
    }
    Ok(())
}

fn run_replay(prefix: &Path, input: &Path, plan_path: &Path) -> Result<()> {
    let (_, code) = load_code(prefix)?;
    let original = read_word(input, code.alphabet())?;
    let plan = CorruptionPlan::from_text(&read_text(plan_path)?)?;
    let corrupted = apply_plan(&original, &plan)?;
    let message = code.decode(&corrupted)?;
    println!("{}", format_message(&message, code.outer_d()));
    Ok(())
}

/// One sweep point: fixed budget and strategy, `trials` independent
/// seeded trials. Returns the success count and the mean decode time.
fn run_point(
    code: &BuiltCode,
    budget: usize,
    strat: &Strategy,
    root: u64,
    point: u64,
    trials: usize,
) -> Result<(usize, Duration)> {
    let order = code.outer_order();
    let d = code.outer_d();
    let mut successes = 0;
    let mut spent = Duration::ZERO;
    for trial in 0..trials {
        let mut sm = SplitMix64(trial_seed(root, point, trial as u64));
        let coeffs = (0..d).map(|_| Fe((sm.next() % order) as u32)).collect();
        let message = Poly::from_coeffs(coeffs);
        let codeword = code.encode(&message)?;
        let (corrupted, _) = corrupt(&codeword, budget, strat, sm.next())?;
        let start = Instant::now();
        let outcome = code.decode(&corrupted);
        spent += start.elapsed();
        match outcome {
            Ok(p) if p == message => successes += 1,
            // A wrong answer or an in-protocol refusal is an
            // unsuccessful trial; anything else is a real error.
            Ok(_) => {}
            Err(Error::DecodeFailure(_))
            | Err(Error::ContractViolation(_))
            | Err(Error::ParameterError(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok((successes, spent))
}

#[allow(clippy::too_many_arguments)]
fn run_experiment(
    args: &BuildArgs,
    budget_fracs: &str,
    trials: usize,
    strategies: &str,
    out: &Option<PathBuf>,
    timing: bool,
) -> Result<()> {
    if args.seed.is_none() {
        return Err(invalid(
            "experiment requires --seed as the root for per-trial expansion",
        ));
    }
    let root = args.seed.expect("checked above");
    if trials == 0 {
        return Err(invalid("--trials must be positive"));
    }
    let spec = BuildSpec::from_args(args)?;
    let mut fracs = Vec::new();
    for piece in budget_fracs.split(',') {
        let f = parse_frac(piece)?;
        if f < Frac::from_integer(0) || f > Frac::from_integer(2) {
            return Err(invalid(format!("budget fraction {f} outside [0, 2]")));
        }
        fracs.push(f);
    }
    let names: Vec<&str> = strategies
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    if fracs.is_empty() || names.is_empty() {
        return Err(invalid("need at least one budget fraction and one strategy"));
    }
    let code = spec.build()?;
    let strats = names
        .iter()
        .map(|n| code.strategy(n))
        .collect::<Result<Vec<_>>>()?;
    let total = code.total_len();
    let points: Vec<(Frac, usize)> = fracs
        .iter()
        .flat_map(|&f| (0..names.len()).map(move |si| (f, si)))
        .collect();

    // Points run concurrently; rows are emitted in config order.
    let results: Vec<Result<(usize, Duration)>> = std::thread::scope(|scope| {
        let handles: Vec<_> = points
            .iter()
            .enumerate()
            .map(|(pi, &(f, si))| {
                let code = &code;
                let strat = &strats[si];
                scope.spawn(move || {
                    run_point(code, mul_floor(f, total), strat, root, pi as u64, trials)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("experiment worker panicked"))
            .collect()
    });

    let mut csv =
        String::from("regime,params,budget_fraction,strategy,trials,successes,mean_decode_ms\n");
    for (&(f, si), result) in points.iter().zip(results) {
        let (successes, spent) = result?;
        let mean = if timing {
            format!("{:.3}", spent.as_secs_f64() * 1000.0 / trials as f64)
        } else {
            "0.000".to_string()
        };
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            spec.regime.name(),
            spec.params_csv(),
            f,
            names[si],
            trials,
            successes,
            mean
        ));
    }
    write_out(out, &csv)
}

fn run(cli: Cli) -> Result<()> {
    match &cli.cmd {
        Cmd::Build { build, out } => run_build(build, out),
        Cmd::Encode { code, message, out } => run_encode(code, message, out),
        Cmd::Corrupt {
            code,
            input,
            budget,
            strategy,
            seed,
            out,
            plan,
        } => run_corrupt(code, input, *budget, strategy, *seed, out, plan),
        Cmd::Decode { code, input, out } => run_decode(code, input, out),
        Cmd::Verify { code, effort } => run_verify(code, *effort),
        Cmd::Experiment {
            build,
            budget_fracs,
            trials,
            strategies,
            out,
            timing,
        } => run_experiment(build, budget_fracs, *trials, strategies, out, *timing),
        Cmd::Replay { code, input, plan } => run_replay(code, input, plan),
    }
}

fn exit_status(e: &Error) -> u8 {
    match e {
        Error::AlphabetMismatch(_)
        | Error::RaggedLengths(_)
        | Error::InvalidInput(_)
        | Error::ParameterError(_)
        | Error::Arithmetic(_) => 2,
        Error::DecodeFailure(_) => 3,
        Error::ResourceLimit(_) => 4,
        Error::ConstructionFailure(_) => 5,
        Error::ContractViolation(_) => 6,
        Error::Io(_) => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(
                e.kind(),
                ClapErrorKind::DisplayHelp | ClapErrorKind::DisplayVersion
            ) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("bad arguments");
            eprintln!("error: invalid input: {first}");
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_status(&e))
        }
    }
}
