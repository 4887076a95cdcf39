//! Seeded Monte Carlo experiments: trial orchestration, paired decoder
//! comparisons, Wilson intervals, CSV output and figure presets.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::Rng;
use rayon::prelude::*;

use crate::bp::{bp_decode, cyclic_trellises, BpOptions, SectionPermutation};
use crate::channel::{
    bernoulli_block, channel_sample, derive_seed, stream_rng, ternary_source_block, ChannelKind, ChannelParam,
    TrialRng,
};
use crate::construction::{
    construct_from_scores, construct_rm, reliability_scores, CodeSpec, ConstructionOptions, RuleTag, DEFAULT_SEED,
};
use crate::error::{invalid, PolarError, Result};
use crate::map::{map_decode_bec, ml_oracle, MapOutcome};
use crate::sc::sc_decode;
use crate::source::{
    compress, erasure_quantize, hamming_quantize, hamming_quantizer, slepian_wolf_decode, slepian_wolf_encode,
    wyner_ziv_codes, wyner_ziv_decode, wyner_ziv_encode, PermutationFamily, WynerZivCodes,
};
use crate::transform::BitBlock;

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

/// Blocks quantized to measure the distortion fed to the Wyner-Ziv channel code.
pub const WZ_PILOT_BLOCKS: u64 = 64;

/// The simulated scheme.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scheme {
    ChannelSc,
    ChannelBp,
    ChannelBpMulti,
    ChannelMapBec,
    ChannelMlOracle,
    Lossless,
    SlepianWolf,
    ErasureQuant,
    HammingQuant,
    WynerZiv,
}

impl Scheme {
    pub const ALL: [Scheme; 10] = [
        Scheme::ChannelSc,
        Scheme::ChannelBp,
        Scheme::ChannelBpMulti,
        Scheme::ChannelMapBec,
        Scheme::ChannelMlOracle,
        Scheme::Lossless,
        Scheme::SlepianWolf,
        Scheme::ErasureQuant,
        Scheme::HammingQuant,
        Scheme::WynerZiv,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::ChannelSc => "channel-sc",
            Scheme::ChannelBp => "channel-bp",
            Scheme::ChannelBpMulti => "channel-bp-multi",
            Scheme::ChannelMapBec => "channel-map-bec",
            Scheme::ChannelMlOracle => "channel-ml-oracle",
            Scheme::Lossless => "lossless",
            Scheme::SlepianWolf => "slepian-wolf",
            Scheme::ErasureQuant => "erasure-quant",
            Scheme::HammingQuant => "hamming-quant",
            Scheme::WynerZiv => "wyner-ziv",
        }
    }

    pub fn is_channel(self) -> bool {
        matches!(
            self,
            Scheme::ChannelSc
                | Scheme::ChannelBp
                | Scheme::ChannelBpMulti
                | Scheme::ChannelMapBec
                | Scheme::ChannelMlOracle
        )
    }

    /// Channel scheme for a decoder name (`sc`, `bp`, `bp-multi`, `map-bec`, `ml`).
    pub fn from_decoder(name: &str) -> Result<Self> {
        match name {
            "sc" => Ok(Scheme::ChannelSc),
            "bp" => Ok(Scheme::ChannelBp),
            "bp-multi" => Ok(Scheme::ChannelBpMulti),
            "map-bec" | "map" => Ok(Scheme::ChannelMapBec),
            "ml" => Ok(Scheme::ChannelMlOracle),
            other => Err(PolarError::Config(format!("unknown decoder '{other}'"))),
        }
    }

    /// Domain tag of the trial streams; channel schemes share one so their
    /// realizations are paired.
    fn stream_domain(self) -> u64 {
        match self {
            s if s.is_channel() => 1,
            Scheme::Lossless => 2,
            Scheme::SlepianWolf => 3,
            Scheme::ErasureQuant => 4,
            Scheme::HammingQuant => 5,
            _ => 6,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = PolarError;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| PolarError::Config(format!("unknown scheme '{s}'")))
    }
}

/// Distortion assumed when building the Wyner-Ziv channel code.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WzChannelDesign {
    /// The design distortion `D`.
    Design,
    /// The mean distortion of a pilot quantization run.
    Measured,
}

/// One experiment: a scheme swept over block exponents and points.
///
/// `points` are code rates for channel schemes, source rates for `lossless`
/// and `slepian-wolf`, quantizer rates for `erasure-quant`, and design
/// distortions for `hamming-quant` and `wyner-ziv`. `channel` is the channel
/// for channel schemes, BEC(ε) for the erasure source, BSC(p) for the
/// Bernoulli(p) source of `lossless`/`slepian-wolf`, and the side-information
/// channel for `wyner-ziv`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub scheme: Scheme,
    pub ns: Vec<u32>,
    pub points: Vec<f64>,
    pub rule: RuleTag,
    pub channel: ChannelParam,
    pub trials: u64,
    pub seed: u64,
    pub max_rounds: usize,
    /// Permutation bits of `lossless`.
    pub m: u32,
    pub construction_trials: u64,
    pub wz_design: WzChannelDesign,
    /// Summed genie error estimate allowed for the Wyner-Ziv channel code.
    pub wz_target: f64,
    /// Bias of the Bernoulli source quantized by `hamming-quant` and `wyner-ziv`.
    pub source_bias: f64,
    /// Use this code instead of constructing one (channel, lossless and
    /// Slepian-Wolf schemes); `ns` and `points` are then ignored.
    pub code: Option<CodeSpec>,
}

impl ExperimentConfig {
    pub fn new(scheme: Scheme, channel: ChannelParam, ns: Vec<u32>, points: Vec<f64>) -> Self {
        Self {
            scheme,
            ns,
            points,
            rule: RuleTag::Arikan,
            channel,
            trials: 1000,
            seed: DEFAULT_SEED,
            max_rounds: BpOptions::default().max_rounds,
            m: 0,
            construction_trials: 20_000,
            wz_design: WzChannelDesign::Measured,
            wz_target: 0.02,
            source_bias: 0.5,
            code: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let config = |msg: String| Err(PolarError::Config(msg));
        if self.trials == 0 {
            return config("trials must be at least 1".into());
        }
        if self.code.is_none() && (self.ns.is_empty() || self.points.is_empty()) {
            return config("sweep needs at least one n and one point".into());
        }
        if self.construction_trials == 0 {
            return config("construction needs at least one trial".into());
        }
        let kind = self.channel.kind();
        let needs = |k: ChannelKind| -> Result<()> {
            if kind == k {
                Ok(())
            } else {
                Err(PolarError::Config(format!("{} requires a {} parameter", self.scheme, k.name())))
            }
        };
        match self.scheme {
            Scheme::ChannelMapBec | Scheme::ErasureQuant => needs(ChannelKind::Bec)?,
            Scheme::Lossless | Scheme::SlepianWolf | Scheme::WynerZiv => needs(ChannelKind::Bsc)?,
            _ => {}
        }
        if self.code.is_some() && matches!(self.scheme, Scheme::ErasureQuant | Scheme::HammingQuant | Scheme::WynerZiv) {
            return config(format!("{} constructs its own codes", self.scheme));
        }
        if matches!(self.scheme, Scheme::Lossless | Scheme::SlepianWolf | Scheme::WynerZiv)
            && !(self.channel.value() > 0.0 && self.channel.value() < 0.5)
        {
            return config(format!("{} needs a parameter in (0, 0.5)", self.scheme));
        }
        if matches!(self.scheme, Scheme::HammingQuant | Scheme::WynerZiv)
            && !(0.0..=1.0).contains(&self.source_bias)
        {
            return config("source bias outside [0, 1]".into());
        }
        Ok(())
    }
}

/// Result of one sweep point.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialSummary {
    pub scheme: Scheme,
    pub n: u32,
    pub rate: f64,
    pub rule: RuleTag,
    pub channel: ChannelParam,
    pub decoder: String,
    pub trials: u64,
    pub failures: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub mean_distortion: Option<f64>,
    pub distortion_std: Option<f64>,
    /// `|F_s ∖ F_c|` for Wyner-Ziv points.
    pub nesting_violations: Option<usize>,
    pub seed: u64,
    pub wall_time: Duration,
}

/// Wilson score interval at 95%.
pub fn confidence_interval(failures: u64, trials: u64) -> Result<(f64, f64)> {
    if trials == 0 {
        return Err(invalid("confidence interval over zero trials"));
    }
    if failures > trials {
        return Err(invalid(format!("{failures} failures out of {trials} trials")));
    }
    let t = trials as f64;
    let p = failures as f64 / t;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / t;
    let center = (p + z2 / (2.0 * t)) / denom;
    let half = Z95 * (p * (1.0 - p) / t + z2 / (4.0 * t * t)).sqrt() / denom;
    let low = if failures == 0 { 0.0 } else { (center - half).clamp(0.0, p) };
    let high = if failures == trials { 1.0 } else { (center + half).clamp(p, 1.0) };
    Ok((low, high))
}

/// Per-trial outcome.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Outcome {
    failed: bool,
    distortion: Option<f64>,
}

enum Prepared {
    Channel { code: CodeSpec, trellises: Vec<SectionPermutation> },
    Lossless { code: CodeSpec, family: PermutationFamily },
    SlepianWolf { code: CodeSpec },
    Erasure { dual: CodeSpec },
    Hamming { dual: CodeSpec, d: f64 },
    WynerZiv { codes: WynerZivCodes, d: f64 },
}

impl Prepared {
    fn rate(&self, m: u32) -> f64 {
        match self {
            Prepared::Channel { code, .. } => code.rate(),
            Prepared::Lossless { code, .. } => (code.frozen().len() as f64 + m as f64) / code.len() as f64,
            Prepared::SlepianWolf { code } => 1.0 - code.rate(),
            Prepared::Erasure { dual } | Prepared::Hamming { dual, .. } => dual.rate(),
            Prepared::WynerZiv { codes, .. } => codes.rate(),
        }
    }
}

/// Reliability scores shared by the points of one sweep.
#[derive(Default)]
struct ScoreCache {
    scores: HashMap<(u32, u64, u8), Vec<f64>>,
}

impl ScoreCache {
    fn get(&mut self, channel: &ChannelParam, n: u32, opts: &ConstructionOptions) -> Result<&[f64]> {
        let key = (n, channel.value().to_bits(), channel.kind() as u8);
        if !self.scores.contains_key(&key) {
            let s = reliability_scores(channel, n, opts)?;
            self.scores.insert(key, s);
        }
        Ok(&self.scores[&key])
    }
}

fn build_code(
    cache: &mut ScoreCache,
    rule: RuleTag,
    channel: &ChannelParam,
    n: u32,
    rate: f64,
    opts: &ConstructionOptions,
) -> Result<CodeSpec> {
    match rule {
        RuleTag::Rm => construct_rm(n, rate),
        RuleTag::Arikan => construct_from_scores(n, cache.get(channel, n, opts)?, rate),
        RuleTag::Explicit => Err(PolarError::Config("the explicit rule needs a fixed code".into())),
    }
}

fn construction_options(cfg: &ExperimentConfig) -> ConstructionOptions {
    ConstructionOptions {
        trials: cfg.construction_trials,
        seed: cfg.seed,
    }
}

fn trellises_for(scheme: Scheme, n: u32) -> Result<Vec<SectionPermutation>> {
    match scheme {
        Scheme::ChannelBp => Ok(vec![SectionPermutation::identity(n)?]),
        Scheme::ChannelBpMulti => cyclic_trellises(n),
        _ => Ok(Vec::new()),
    }
}

fn prepare(cfg: &ExperimentConfig, cache: &mut ScoreCache, n: u32, point_index: usize, point: f64) -> Result<Prepared> {
    let opts = construction_options(cfg);
    let fixed = cfg.code.clone();
    let p = cfg.channel.value();
    Ok(match cfg.scheme {
        s if s.is_channel() => {
            let code = match fixed {
                Some(code) => code,
                None => build_code(cache, cfg.rule, &cfg.channel, n, point, &opts)?,
            };
            let trellises = trellises_for(s, code.n())?;
            Prepared::Channel { code, trellises }
        }
        Scheme::Lossless | Scheme::SlepianWolf => {
            let code = match fixed {
                Some(code) => code,
                None => build_code(cache, cfg.rule, &cfg.channel, n, 1.0 - point, &opts)?,
            };
            if cfg.scheme == Scheme::Lossless {
                let family = PermutationFamily::new(code.n(), cfg.m, cfg.seed)?;
                Prepared::Lossless { code, family }
            } else {
                Prepared::SlepianWolf { code }
            }
        }
        Scheme::ErasureQuant => {
            let bec = ChannelParam::bec(1.0 - p)?;
            let code = build_code(cache, cfg.rule, &bec, n, 1.0 - point, &opts)?;
            Prepared::Erasure { dual: code.dual() }
        }
        Scheme::HammingQuant => Prepared::Hamming {
            dual: hamming_quantizer(n, point, &opts)?,
            d: point,
        },
        Scheme::WynerZiv => {
            let d_channel = match cfg.wz_design {
                WzChannelDesign::Design => point,
                WzChannelDesign::Measured => {
                    let dual = hamming_quantizer(n, point, &opts)?;
                    let pilot = derive_seed(cfg.seed, &[7, n as u64, point_index as u64]);
                    let total: f64 = (0..WZ_PILOT_BLOCKS)
                        .map(|t| {
                            let mut rng = stream_rng(pilot, t);
                            let x = bernoulli_block(cfg.source_bias, n, &mut rng)?;
                            Ok(hamming_quantize(&dual, &x, point)?.distortion)
                        })
                        .sum::<Result<f64>>()?;
                    (total / WZ_PILOT_BLOCKS as f64).clamp(1e-6, 0.499)
                }
            };
            Prepared::WynerZiv {
                codes: wyner_ziv_codes(n, point, p, d_channel, cfg.wz_target, &opts)?,
                d: point,
            }
        }
        _ => unreachable!("all schemes covered"),
    })
}

/// A channel realization: transmitted input and observations.
struct ChannelRealization {
    u: BitBlock,
    obs: crate::channel::SoftBlock,
}

fn channel_realization(code: &CodeSpec, channel: &ChannelParam, rng: &mut TrialRng) -> Result<ChannelRealization> {
    let info: Vec<u8> = (0..code.information_len()).map(|_| rng.random_range(0..2u8)).collect();
    let u = code.embed(&info)?;
    let obs = channel_sample(channel, &code.codeword_of(&u), rng);
    Ok(ChannelRealization { u, obs })
}

fn channel_failure(
    scheme: Scheme,
    code: &CodeSpec,
    trellises: &[SectionPermutation],
    max_rounds: usize,
    erasure: bool,
    r: &ChannelRealization,
) -> Result<bool> {
    Ok(match scheme {
        Scheme::ChannelSc => {
            let out = sc_decode(code, &r.obs)?;
            out.u != r.u || (erasure && out.ties > 0)
        }
        Scheme::ChannelBp | Scheme::ChannelBpMulti => {
            let opts = BpOptions {
                max_rounds,
                ..BpOptions::default()
            };
            let out = bp_decode(code, &r.obs, trellises, &opts)?;
            out.u != r.u || (erasure && out.unresolved > 0)
        }
        Scheme::ChannelMapBec => match map_decode_bec(code, &r.obs)? {
            MapOutcome::Unique(u) => u != r.u,
            MapOutcome::Ambiguous { .. } => true,
        },
        Scheme::ChannelMlOracle => ml_oracle(code, &r.obs)? != r.u,
        other => return Err(PolarError::Config(format!("{other} is not a channel scheme"))),
    })
}

fn run_trial(cfg: &ExperimentConfig, prepared: &Prepared, rng: &mut TrialRng) -> Result<Outcome> {
    let p = cfg.channel.value();
    let plain = |failed| Outcome {
        failed,
        distortion: None,
    };
    match prepared {
        Prepared::Channel { code, trellises } => {
            let r = channel_realization(code, &cfg.channel, rng)?;
            let erasure = cfg.channel.kind() == ChannelKind::Bec;
            channel_failure(cfg.scheme, code, trellises, cfg.max_rounds, erasure, &r).map(plain)
        }
        Prepared::Lossless { code, family } => {
            let x = bernoulli_block(p, code.n(), rng)?;
            Ok(plain(!compress(code, &x, p, family)?.success))
        }
        Prepared::SlepianWolf { code } => {
            let x = bernoulli_block(0.5, code.n(), rng)?;
            let z = bernoulli_block(p, code.n(), rng)?;
            let y = x.xor(&z)?;
            let s = slepian_wolf_encode(code, &y)?;
            Ok(plain(slepian_wolf_decode(code, &x, &s, p)? != y))
        }
        Prepared::Erasure { dual } => {
            let s = ternary_source_block(p, dual.n(), rng)?;
            let q = erasure_quantize(dual, &s)?;
            Ok(Outcome {
                failed: !q.is_exact(),
                distortion: Some(q.distortion),
            })
        }
        Prepared::Hamming { dual, d } => {
            let x = bernoulli_block(cfg.source_bias, dual.n(), rng)?;
            let q = hamming_quantize(dual, &x, *d)?;
            Ok(Outcome {
                failed: q.distortion > *d,
                distortion: Some(q.distortion),
            })
        }
        Prepared::WynerZiv { codes, d } => {
            let n = codes.source().n();
            let x = bernoulli_block(cfg.source_bias, n, rng)?;
            let noise = bernoulli_block(p, n, rng)?;
            let y = x.xor(&noise)?;
            let (payload, q) = wyner_ziv_encode(codes, &x, *d)?;
            let decoded = wyner_ziv_decode(codes, &payload, &y)?;
            Ok(Outcome {
                failed: decoded != q.reconstruction,
                distortion: Some(crate::channel::hamming_distortion(&decoded, &x)?),
            })
        }
    }
}

fn decoder_name(cfg: &ExperimentConfig) -> String {
    match cfg.scheme {
        Scheme::ChannelSc => "sc".into(),
        Scheme::ChannelBp => "bp".into(),
        Scheme::ChannelBpMulti => "bp-multi".into(),
        Scheme::ChannelMapBec => "map-bec".into(),
        Scheme::ChannelMlOracle => "ml".into(),
        Scheme::Lossless => format!("sc-m{}", cfg.m),
        _ => "sc".into(),
    }
}

fn summarize(
    cfg: &ExperimentConfig,
    n: u32,
    rate: f64,
    decoder: String,
    outcomes: &[Outcome],
    violations: Option<usize>,
    started: Instant,
) -> Result<TrialSummary> {
    let trials = outcomes.len() as u64;
    let failures = outcomes.iter().filter(|o| o.failed).count() as u64;
    let (ci_low, ci_high) = confidence_interval(failures, trials)?;
    let distortions: Vec<f64> = outcomes.iter().filter_map(|o| o.distortion).collect();
    let (mean_distortion, distortion_std) = if distortions.is_empty() {
        (None, None)
    } else {
        let k = distortions.len() as f64;
        let mean = distortions.iter().sum::<f64>() / k;
        let var = distortions.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / (k - 1.0).max(1.0);
        (Some(mean), Some(var.sqrt()))
    };
    Ok(TrialSummary {
        scheme: cfg.scheme,
        n,
        rate,
        rule: cfg.rule,
        channel: cfg.channel,
        decoder,
        trials,
        failures,
        p_hat: failures as f64 / trials as f64,
        ci_low,
        ci_high,
        mean_distortion,
        distortion_std,
        nesting_violations: violations,
        seed: cfg.seed,
        wall_time: started.elapsed(),
    })
}

fn sweep(cfg: &ExperimentConfig) -> Vec<(u32, usize, f64)> {
    match &cfg.code {
        Some(code) => vec![(code.n(), 0, code.rate())],
        None => cfg
            .ns
            .iter()
            .flat_map(|&n| cfg.points.iter().enumerate().map(move |(i, &p)| (n, i, p)))
            .collect(),
    }
}

fn trial_seed(cfg: &ExperimentConfig, n: u32, point_index: usize) -> u64 {
    derive_seed(cfg.seed, &[cfg.scheme.stream_domain(), n as u64, point_index as u64])
}

/// Runs every sweep point; trials fan out over the rayon pool and are reduced
/// in trial order, so the result does not depend on the thread count.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<TrialSummary>> {
    cfg.validate()?;
    let mut cache = ScoreCache::default();
    let mut out = Vec::new();
    for (n, pi, point) in sweep(cfg) {
        let started = Instant::now();
        let prepared = prepare(cfg, &mut cache, n, pi, point)?;
        let n = match &prepared {
            Prepared::Channel { code, .. } | Prepared::Lossless { code, .. } | Prepared::SlepianWolf { code } => code.n(),
            _ => n,
        };
        let seed = trial_seed(cfg, n, pi);
        let outcomes = (0..cfg.trials)
            .into_par_iter()
            .map(|t| run_trial(cfg, &prepared, &mut stream_rng(seed, t)))
            .collect::<Result<Vec<_>>>()?;
        let violations = match &prepared {
            Prepared::WynerZiv { codes, .. } => Some(codes.violations().len()),
            _ => None,
        };
        out.push(summarize(cfg, n, prepared.rate(cfg.m), decoder_name(cfg), &outcomes, violations, started)?);
    }
    Ok(out)
}

/// Paired results of several channel decoders at one sweep point.
#[derive(Clone, Debug, PartialEq)]
pub struct PairedReport {
    pub summaries: Vec<TrialSummary>,
    /// `dominance[a][b]` counts trials where decoder `a` fails and `b` succeeds.
    pub dominance: Vec<Vec<u64>>,
}

/// Feeds identical realizations to every decoder. `cfg.scheme` is ignored;
/// `decoders` must all be channel schemes.
pub fn paired_compare(cfg: &ExperimentConfig, decoders: &[Scheme]) -> Result<Vec<PairedReport>> {
    if decoders.is_empty() {
        return Err(PolarError::Config("paired comparison needs at least one decoder".into()));
    }
    if let Some(bad) = decoders.iter().find(|d| !d.is_channel()) {
        return Err(PolarError::Config(format!("{bad} is not a channel decoder")));
    }
    let configs: Vec<ExperimentConfig> = decoders
        .iter()
        .map(|&scheme| ExperimentConfig {
            scheme,
            ..cfg.clone()
        })
        .collect();
    for c in &configs {
        c.validate()?;
    }
    let erasure = cfg.channel.kind() == ChannelKind::Bec;
    let mut cache = ScoreCache::default();
    let mut reports = Vec::new();
    for (n, pi, point) in sweep(&configs[0]) {
        let started = Instant::now();
        let code = match prepare(&configs[0], &mut cache, n, pi, point)? {
            Prepared::Channel { code, .. } => code,
            _ => unreachable!("channel schemes prepare channel codes"),
        };
        let trellises: Vec<Vec<SectionPermutation>> =
            decoders.iter().map(|&d| trellises_for(d, code.n())).collect::<Result<_>>()?;
        let seed = trial_seed(&configs[0], code.n(), pi);
        let flags = (0..cfg.trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = stream_rng(seed, t);
                let r = channel_realization(&code, &cfg.channel, &mut rng)?;
                decoders
                    .iter()
                    .zip(&trellises)
                    .map(|(&d, tr)| channel_failure(d, &code, tr, cfg.max_rounds, erasure, &r))
                    .collect::<Result<Vec<bool>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let k = decoders.len();
        let mut dominance = vec![vec![0u64; k]; k];
        for f in &flags {
            for a in 0..k {
                for b in 0..k {
                    if f[a] && !f[b] {
                        dominance[a][b] += 1;
                    }
                }
            }
        }
        let summaries = configs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let outcomes: Vec<Outcome> = flags
                    .iter()
                    .map(|f| Outcome {
                        failed: f[i],
                        distortion: None,
                    })
                    .collect();
                summarize(c, code.n(), code.rate(), decoder_name(c), &outcomes, None, started)
            })
            .collect::<Result<Vec<_>>>()?;
        reports.push(PairedReport { summaries, dominance });
    }
    Ok(reports)
}

/// Exact CSV column list.
pub const CSV_HEADER: &str =
    "scheme,n,rate,rule,channel_kind,channel_param,decoder,trials,failures,p_hat,ci_low,ci_high,mean_distortion,seed";

/// Six significant digits, `%g` style.
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if !(-4..6).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim(mantissa), sign, exp.abs())
    } else {
        let decimals = (5 - exp).max(0) as usize;
        trim(&format!("{x:.decimals$}"))
    }
}

impl TrialSummary {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.scheme,
            self.n,
            format_sig6(self.rate),
            self.rule.name(),
            self.channel.kind().name(),
            format_sig6(self.channel.value()),
            self.decoder,
            self.trials,
            self.failures,
            format_sig6(self.p_hat),
            format_sig6(self.ci_low),
            format_sig6(self.ci_high),
            self.mean_distortion.map(format_sig6).unwrap_or_default(),
            self.seed,
        )
    }
}

/// Header plus one row per summary.
pub fn to_csv(summaries: &[TrialSummary]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for s in summaries {
        out.push_str(&s.csv_row());
        out.push('\n');
    }
    out
}

/// Figures with a preset sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Figure {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6Left,
    Fig6Right,
}

impl Figure {
    pub const ALL: [Figure; 6] = [
        Figure::Fig2,
        Figure::Fig3,
        Figure::Fig4,
        Figure::Fig5,
        Figure::Fig6Left,
        Figure::Fig6Right,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
            Figure::Fig4 => "fig4",
            Figure::Fig5 => "fig5",
            Figure::Fig6Left => "fig6L",
            Figure::Fig6Right => "fig6R",
        }
    }
}

impl FromStr for Figure {
    type Err = PolarError;

    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| PolarError::Config(format!("unknown figure '{s}'")))
    }
}

/// Preset size.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scale {
    Small,
    Paper,
}

impl FromStr for Scale {
    type Err = PolarError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "small" => Ok(Scale::Small),
            "paper" => Ok(Scale::Paper),
            other => Err(PolarError::Config(format!("unknown scale '{other}'"))),
        }
    }
}

/// The experiments behind a figure. Configurations of one figure share the
/// seed, so channel decoders see identical realizations.
pub fn preset_configs(figure: Figure, scale: Scale, seed: u64) -> Vec<ExperimentConfig> {
    let small = scale == Scale::Small;
    let trials = if small { 10_000 } else { 100_000 };
    let bec = ChannelParam::bec(0.5).expect("valid");
    let with = |scheme: Scheme, channel: ChannelParam, ns: Vec<u32>, points: Vec<f64>| ExperimentConfig {
        trials,
        seed,
        ..ExperimentConfig::new(scheme, channel, ns, points)
    };
    let bec_rates = vec![0.35, 0.375, 0.4, 0.425, 0.45];
    match figure {
        Figure::Fig2 => {
            let awgn = ChannelParam::bawgn(0.97865).expect("valid");
            let rates = vec![0.3, 0.35, 0.4, 0.45, 0.5];
            [Scheme::ChannelSc, Scheme::ChannelBp]
                .into_iter()
                .map(|s| with(s, awgn, vec![10], rates.clone()))
                .collect()
        }
        Figure::Fig3 => [RuleTag::Arikan, RuleTag::Rm]
            .into_iter()
            .map(|rule| ExperimentConfig {
                rule,
                ..with(Scheme::ChannelMapBec, bec, vec![10], bec_rates.clone())
            })
            .collect(),
        Figure::Fig4 => [
            Scheme::ChannelSc,
            Scheme::ChannelBp,
            Scheme::ChannelBpMulti,
            Scheme::ChannelMapBec,
        ]
        .into_iter()
        .map(|s| with(s, bec, vec![10], bec_rates.clone()))
        .collect(),
        Figure::Fig5 => {
            let source = ChannelParam::bsc(0.11).expect("valid");
            let rates: Vec<f64> = (0..=5).map(|k| 0.5 + 0.02 * k as f64).collect();
            (0..=2)
                .map(|m| ExperimentConfig {
                    m,
                    ..with(Scheme::Lossless, source, vec![10], rates.clone())
                })
                .collect()
        }
        Figure::Fig6Left => {
            let ns = if small { vec![9, 11] } else { vec![9, 11, 13, 15] };
            let test = ChannelParam::bsc(0.5).expect("valid");
            vec![ExperimentConfig {
                trials: if small { 2_000 } else { 10_000 },
                construction_trials: if small { 10_000 } else { 5_000 },
                ..with(Scheme::HammingQuant, test, ns, vec![0.1, 0.15, 0.2, 0.25, 0.3])
            }]
        }
        Figure::Fig6Right => {
            let ns = if small { vec![9, 11] } else { vec![9, 11, 13, 15] };
            let side = ChannelParam::bsc(0.3).expect("valid");
            vec![ExperimentConfig {
                trials: if small { 2_000 } else { 10_000 },
                construction_trials: if small { 10_000 } else { 5_000 },
                ..with(Scheme::WynerZiv, side, ns, vec![0.05, 0.1, 0.15, 0.2, 0.25])
            }]
        }
    }
}

/// Runs a list of configurations and concatenates their CSV rows.
pub fn run_configs(configs: &[ExperimentConfig]) -> Result<String> {
    let mut all = Vec::new();
    for cfg in configs {
        all.extend(run_experiment(cfg)?);
    }
    Ok(to_csv(&all))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_examples() {
        let (lo, hi) = confidence_interval(0, 100).unwrap();
        assert_eq!(lo, 0.0);
        assert!((hi - 0.0370).abs() < 1e-3, "{hi}");
        let (lo, hi) = confidence_interval(50, 100).unwrap();
        assert!((hi - lo - 0.19).abs() < 0.01);
        assert!(((lo + hi) / 2.0 - 0.5).abs() < 1e-12);
        let (lo, hi) = confidence_interval(500_000, 10_000_000).unwrap();
        assert!(hi - lo < 3e-4);
        assert!(confidence_interval(1, 0).is_err());
        assert!(confidence_interval(3, 2).is_err());
    }

    #[test]
    fn sig6_formatting() {
        assert_eq!(format_sig6(0.0), "0");
        assert_eq!(format_sig6(0.4), "0.4");
        assert_eq!(format_sig6(0.97865), "0.97865");
        assert_eq!(format_sig6(1.0 / 3.0), "0.333333");
        assert_eq!(format_sig6(123456789.0), "1.23457e+08");
        assert_eq!(format_sig6(0.0000123456789), "1.23457e-05");
        assert_eq!(format_sig6(0.000123456789), "0.000123457");
        assert_eq!(format_sig6(999999.7), "1e+06");
        assert_eq!(format_sig6(42.0), "42");
    }

    #[test]
    fn scheme_names_round_trip() {
        for s in Scheme::ALL {
            assert_eq!(s.name().parse::<Scheme>().unwrap(), s);
        }
        assert!(matches!("nope".parse::<Scheme>(), Err(PolarError::Config(_))));
        for f in Figure::ALL {
            assert_eq!(f.name().parse::<Figure>().unwrap(), f);
        }
    }

    #[test]
    fn noiseless_single_trial() {
        let cfg = ExperimentConfig {
            trials: 1,
            ..ExperimentConfig::new(Scheme::ChannelSc, ChannelParam::bec(0.0).unwrap(), vec![6], vec![0.5])
        };
        let s = &run_experiment(&cfg).unwrap()[0];
        assert_eq!(s.failures, 0);
        assert_eq!(s.p_hat, 0.0);
        assert!(s.ci_low <= s.p_hat && s.p_hat <= s.ci_high);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let base = ExperimentConfig::new(Scheme::ChannelMapBec, ChannelParam::bsc(0.1).unwrap(), vec![6], vec![0.5]);
        assert!(matches!(run_experiment(&base), Err(PolarError::Config(_))));
        let zero = ExperimentConfig {
            trials: 0,
            ..ExperimentConfig::new(Scheme::ChannelSc, ChannelParam::bec(0.3).unwrap(), vec![6], vec![0.5])
        };
        assert!(matches!(run_experiment(&zero), Err(PolarError::Config(_))));
    }

    #[test]
    fn same_seed_same_csv() {
        let cfg = ExperimentConfig {
            trials: 300,
            construction_trials: 500,
            ..ExperimentConfig::new(Scheme::ChannelSc, ChannelParam::bsc(0.05).unwrap(), vec![7], vec![0.3, 0.5])
        };
        let a = to_csv(&run_experiment(&cfg).unwrap());
        let b = to_csv(&run_experiment(&cfg).unwrap());
        assert_eq!(a, b);
        assert!(a.starts_with(CSV_HEADER));
        assert_eq!(a.lines().count(), 3);
    }

    #[test]
    fn sc_against_itself_has_no_dominance() {
        let cfg = ExperimentConfig {
            trials: 200,
            ..ExperimentConfig::new(Scheme::ChannelSc, ChannelParam::bec(0.5).unwrap(), vec![6], vec![0.4])
        };
        let r = &paired_compare(&cfg, &[Scheme::ChannelSc, Scheme::ChannelSc]).unwrap()[0];
        assert_eq!(r.dominance, vec![vec![0, 0], vec![0, 0]]);
    }
}
