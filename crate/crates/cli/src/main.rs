use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use polar_workbench::bp::{bp_decode, cyclic_trellises, BpOptions, SectionPermutation};
use polar_workbench::construction::{
    construct_arikan, construct_rm, min_distance, z_profile_bec, DEFAULT_SEED,
};
use polar_workbench::map::{map_decode_bec, ml_oracle, MapOutcome};
use polar_workbench::sc::sc_decode;
use polar_workbench::sim::{self, Figure, Scale, WzChannelDesign};
use polar_workbench::source::{
    compress, decompress, erasure_quantize, erasure_quantizer, hamming_quantize, hamming_quantizer,
    slepian_wolf_decode, slepian_wolf_encode, wyner_ziv_codes, wyner_ziv_decode, wyner_ziv_encode, CompressedBlock,
    PermutationFamily, WynerZivPayload,
};
use polar_workbench::{
    BitBlock, ChannelParam, CodeSpec, ConstructionOptions, ExperimentConfig, Observation, Orientation,
    PolarError, RuleTag, Scheme, SoftBlock, TernarySourceBlock,
};

#[derive(Parser, Debug)]
#[command(name = "polar", version, about = "Polar codes for channel and source coding")]
struct Cli {
    /// Seed for construction and simulation.
    #[arg(long, global = true, env = "POLAR_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Maximum worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Construct a code and write its JSON description.
    Construct(ConstructArgs),
    /// Encode information bits into a codeword.
    Encode(EncodeArgs),
    /// Decode one block of observations.
    Decode(DecodeArgs),
    /// Run a Monte Carlo sweep and append CSV rows.
    Simulate(SimulateArgs),
    /// Compress a Bernoulli source block.
    Compress(CompressArgs),
    /// Decompress a block written by `compress`.
    Decompress(DecompressArgs),
    /// Slepian-Wolf coding of `y` with side information `x`.
    Sw(SwArgs),
    /// Quantize one source block.
    Quantize(QuantizeArgs),
    /// Wyner-Ziv coding of one block.
    Wz(WzArgs),
    /// Print the BEC Bhattacharyya profile.
    Zprofile(ZprofileArgs),
    /// Run a figure preset.
    Preset(PresetArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Rule {
    Arikan,
    Rm,
}

impl Rule {
    fn tag(self) -> RuleTag {
        match self {
            Rule::Arikan => RuleTag::Arikan,
            Rule::Rm => RuleTag::Rm,
        }
    }
}

#[derive(Args, Debug)]
struct ConstructArgs {
    #[arg(long, default_value = "bec:0.5", value_parser = parse_channel)]
    channel: ChannelParam,
    #[arg(long)]
    n: u32,
    #[arg(long)]
    rate: f64,
    #[arg(long, value_enum, default_value_t = Rule::Arikan)]
    rule: Rule,
    /// Genie-aided trials for BSC/BAWGN construction.
    #[arg(long, default_value_t = 100_000)]
    construction_trials: u64,
    /// Output path; JSON goes to standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also output the dual code (frozen and information sets swapped).
    #[arg(long)]
    dual: bool,
}

#[derive(Args, Debug)]
struct EncodeArgs {
    #[arg(long)]
    code: PathBuf,
    /// Information bits as a 0/1 string, or `@path`.
    #[arg(long)]
    info: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Decoder {
    Sc,
    Bp,
    BpMulti,
    MapBec,
    Ml,
}

impl Decoder {
    fn scheme(self) -> Scheme {
        match self {
            Decoder::Sc => Scheme::ChannelSc,
            Decoder::Bp => Scheme::ChannelBp,
            Decoder::BpMulti => Scheme::ChannelBpMulti,
            Decoder::MapBec => Scheme::ChannelMapBec,
            Decoder::Ml => Scheme::ChannelMlOracle,
        }
    }
}

#[derive(Args, Debug)]
struct DecodeArgs {
    #[arg(long)]
    code: PathBuf,
    #[arg(long, value_enum, default_value_t = Decoder::Sc)]
    decoder: Decoder,
    /// Whitespace-separated LLRs (`inf`, `-inf`, `?` for an erasure), or `@path`.
    #[arg(long, allow_hyphen_values = true)]
    llrs: String,
    #[arg(long, default_value_t = BpOptions::default().max_rounds)]
    rounds: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum WzDesign {
    Design,
    Measured,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// Fixed code file; otherwise codes are constructed per `--n`/`--rate`.
    #[arg(long)]
    code: Option<PathBuf>,
    /// Channel decoder; shorthand for the matching channel scheme.
    #[arg(long, value_enum, conflicts_with = "scheme")]
    decoder: Option<Decoder>,
    /// Scheme name, e.g. `lossless` or `wyner-ziv`.
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long, value_parser = parse_channel)]
    channel: ChannelParam,
    /// Block exponents, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "10")]
    n: Vec<u32>,
    /// Sweep points (rates or design distortions), comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0.5")]
    rate: Vec<f64>,
    #[arg(long, value_enum, default_value_t = Rule::Arikan)]
    rule: Rule,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long, default_value_t = BpOptions::default().max_rounds)]
    rounds: usize,
    /// Permutation bits for `lossless`.
    #[arg(long, default_value_t = 0)]
    m: u32,
    #[arg(long, default_value_t = 20_000)]
    construction_trials: u64,
    #[arg(long, value_enum, default_value_t = WzDesign::Measured)]
    wz_design: WzDesign,
    #[arg(long, default_value_t = 0.02)]
    wz_target: f64,
    #[arg(long, default_value_t = 0.5)]
    source_bias: f64,
    /// CSV file to append to; standard output when omitted.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SourceCodeArgs {
    /// Code file; otherwise a code for BSC(p) is constructed.
    #[arg(long)]
    code: Option<PathBuf>,
    #[arg(long)]
    n: Option<u32>,
    /// Source rate before permutation bits.
    #[arg(long)]
    rate: Option<f64>,
    /// Source bias.
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = 20_000)]
    construction_trials: u64,
}

#[derive(Args, Debug)]
struct CompressArgs {
    #[command(flatten)]
    source: SourceCodeArgs,
    #[arg(long, default_value_t = 0)]
    m: u32,
    /// Source block as a 0/1 string, or `@path`.
    #[arg(long)]
    input: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct DecompressArgs {
    #[command(flatten)]
    source: SourceCodeArgs,
    #[arg(long)]
    input: PathBuf,
}

#[derive(Args, Debug)]
struct SwArgs {
    #[command(flatten)]
    source: SourceCodeArgs,
    /// Side information block.
    #[arg(long)]
    x: String,
    /// Block to transmit.
    #[arg(long)]
    y: String,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum QuantKind {
    Erasure,
    Hamming,
}

#[derive(Args, Debug)]
struct QuantizeArgs {
    #[arg(long, value_enum)]
    kind: QuantKind,
    #[arg(long)]
    n: u32,
    /// Erasure source: channel rate of the primal code.
    #[arg(long)]
    rate: Option<f64>,
    /// Erasure source: erasure probability used for construction.
    #[arg(long)]
    eps: Option<f64>,
    /// Hamming quantizer design distortion.
    #[arg(long)]
    distortion: Option<f64>,
    #[arg(long, default_value_t = 20_000)]
    construction_trials: u64,
    /// Source block (`0`, `1`, `*`), or `@path`.
    #[arg(long)]
    input: String,
}

#[derive(Args, Debug)]
struct WzArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    distortion: f64,
    /// Crossover of the side-information channel.
    #[arg(long)]
    q: f64,
    #[arg(long, default_value_t = 0.02)]
    target: f64,
    #[arg(long, default_value_t = 20_000)]
    construction_trials: u64,
    #[arg(long)]
    x: String,
    #[arg(long)]
    y: String,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OrientationArg {
    Primal,
    Dual,
}

#[derive(Args, Debug)]
struct ZprofileArgs {
    #[arg(long)]
    n: u32,
    /// Initial Bhattacharyya parameter (the erasure probability).
    #[arg(long)]
    z: f64,
    #[arg(long, value_enum, default_value_t = OrientationArg::Primal)]
    orientation: OrientationArg,
}

#[derive(Args, Debug)]
struct PresetArgs {
    #[arg(long, value_parser = parse_figure)]
    figure: Figure,
    #[arg(long, value_parser = parse_scale, default_value = "small")]
    scale: Scale,
    /// Override the per-point trial count.
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

fn parse_channel(s: &str) -> Result<ChannelParam, String> {
    s.parse().map_err(|e: PolarError| e.to_string())
}

fn parse_figure(s: &str) -> Result<Figure, String> {
    s.parse().map_err(|e: PolarError| e.to_string())
}

fn parse_scale(s: &str) -> Result<Scale, String> {
    s.parse().map_err(|e: PolarError| e.to_string())
}

/// Errors that should exit with the usage status.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

fn is_usage(err: &anyhow::Error) -> bool {
    if err.downcast_ref::<Usage>().is_some() {
        return true;
    }
    matches!(
        err.downcast_ref::<PolarError>(),
        Some(
            PolarError::Config(_)
                | PolarError::InvalidInput(_)
                | PolarError::NotPowerOfTwo(_)
                | PolarError::ExponentTooLarge(_)
                | PolarError::TooManyInformationBits { .. }
        )
    )
}

/// A literal argument, or the contents of the file after `@`.
fn text_arg(value: &str) -> anyhow::Result<String> {
    match value.strip_prefix('@') {
        Some(path) => fs::read_to_string(path).with_context(|| format!("reading {path}")),
        None => Ok(value.to_string()),
    }
}

fn bits_arg(value: &str) -> anyhow::Result<BitBlock> {
    Ok(text_arg(value)?.trim().parse::<BitBlock>()?)
}

fn read_code(path: &Path) -> anyhow::Result<CodeSpec> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    CodeSpec::from_json(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn parse_observations(text: &str) -> anyhow::Result<SoftBlock> {
    let values = text
        .split_whitespace()
        .map(|t| match t {
            "?" | "e" => Ok(Observation::Erasure),
            other => other
                .parse::<f64>()
                .map(Observation::Llr)
                .map_err(|_| usage(format!("bad observation '{other}'"))),
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    Ok(SoftBlock::new(values)?)
}

fn source_code(args: &SourceCodeArgs, seed: u64) -> anyhow::Result<CodeSpec> {
    if let Some(path) = &args.code {
        return read_code(path);
    }
    let (Some(n), Some(rate)) = (args.n, args.rate) else {
        return Err(usage("give --code or both --n and --rate"));
    };
    let opts = ConstructionOptions {
        trials: args.construction_trials,
        seed,
    };
    Ok(construct_arikan(&ChannelParam::bsc(args.p)?, n, 1.0 - rate, &opts)?)
}

fn write_or_print(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn bits_string(bits: &[u8]) -> String {
    bits.iter().map(|b| if *b == 1 { '1' } else { '0' }).collect()
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let seed = cli.seed;
    match cli.command {
        Command::Construct(a) => {
            let code = match a.rule {
                Rule::Rm => construct_rm(a.n, a.rate)?,
                Rule::Arikan => {
                    let opts = ConstructionOptions {
                        trials: a.construction_trials,
                        seed,
                    };
                    construct_arikan(&a.channel, a.n, a.rate, &opts)?
                }
            };
            let code = if a.dual { code.dual() } else { code };
            let d_min = min_distance(&code)?;
            println!(
                "rate={} frozen={} information={} d_min={}",
                code.rate(),
                code.frozen().len(),
                code.information_len(),
                d_min
            );
            write_or_print(a.out.as_deref(), &code.to_json())
        }
        Command::Encode(a) => {
            let code = read_code(&a.code)?;
            let info = polar_workbench::transform::parse_bit_string(&text_arg(&a.info)?)?;
            println!("{}", code.encode(&info)?);
            Ok(())
        }
        Command::Decode(a) => {
            let code = read_code(&a.code)?;
            let obs = parse_observations(&text_arg(&a.llrs)?)?;
            let u = match a.decoder {
                Decoder::Sc => {
                    let out = sc_decode(&code, &obs)?;
                    if out.ties > 0 {
                        eprintln!("ties={}", out.ties);
                    }
                    out.u
                }
                Decoder::Bp | Decoder::BpMulti => {
                    let trellises = if a.decoder == Decoder::Bp {
                        vec![SectionPermutation::identity(code.n())?]
                    } else {
                        cyclic_trellises(code.n())?
                    };
                    let opts = BpOptions {
                        max_rounds: a.rounds,
                        ..BpOptions::default()
                    };
                    let out = bp_decode(&code, &obs, &trellises, &opts)?;
                    eprintln!("rounds={} unresolved={}", out.rounds, out.unresolved);
                    out.u
                }
                Decoder::MapBec => match map_decode_bec(&code, &obs)? {
                    MapOutcome::Unique(u) => u,
                    MapOutcome::Ambiguous { free } => bail!("ambiguous: {free} information bits undetermined"),
                },
                Decoder::Ml => ml_oracle(&code, &obs)?,
            };
            println!("u={u}");
            println!("info={}", bits_string(&code.extract(&u)));
            Ok(())
        }
        Command::Simulate(a) => {
            let scheme = match (&a.decoder, &a.scheme) {
                (Some(d), None) => d.scheme(),
                (None, Some(s)) => s.parse::<Scheme>()?,
                (None, None) => Scheme::ChannelSc,
                (Some(_), Some(_)) => unreachable!("clap rejects both"),
            };
            let code = a.code.as_deref().map(read_code).transpose()?;
            let rule = match &code {
                Some(c) => c.rule(),
                None => a.rule.tag(),
            };
            let cfg = ExperimentConfig {
                rule,
                trials: a.trials,
                seed,
                max_rounds: a.rounds,
                m: a.m,
                construction_trials: a.construction_trials,
                wz_design: match a.wz_design {
                    WzDesign::Design => WzChannelDesign::Design,
                    WzDesign::Measured => WzChannelDesign::Measured,
                },
                wz_target: a.wz_target,
                source_bias: a.source_bias,
                code,
                ..ExperimentConfig::new(scheme, a.channel, a.n, a.rate)
            };
            cfg.validate()?;
            let rows = sim::run_experiment(&cfg)?;
            for r in &rows {
                eprintln!(
                    "{} n={} rate={:.4} failures={}/{} wall={:.2?}",
                    r.decoder, r.n, r.rate, r.failures, r.trials, r.wall_time
                );
            }
            match &a.csv {
                Some(path) => append_csv(path, &rows),
                None => {
                    print!("{}", sim::to_csv(&rows));
                    Ok(())
                }
            }
        }
        Command::Compress(a) => {
            let code = source_code(&a.source, seed)?;
            let family = PermutationFamily::new(code.n(), a.m, seed)?;
            let x = bits_arg(&a.input)?;
            let block = compress(&code, &x, a.source.p, &family)?;
            fs::write(&a.out, block.to_bytes()).with_context(|| format!("writing {}", a.out.display()))?;
            println!("success={} permutation={} rate={}", block.success, block.perm_index, block.rate());
            if block.success {
                Ok(())
            } else {
                bail!("no permutation round-trips this block")
            }
        }
        Command::Decompress(a) => {
            let code = source_code(&a.source, seed)?;
            let bytes = fs::read(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
            let block = CompressedBlock::from_bytes(&bytes)?;
            let family = PermutationFamily::new(code.n(), block.m, seed)?;
            println!("{}", decompress(&code, &block, a.source.p, &family)?);
            Ok(())
        }
        Command::Sw(a) => {
            let code = source_code(&a.source, seed)?;
            let x = bits_arg(&a.x)?;
            let y = bits_arg(&a.y)?;
            let s = slepian_wolf_encode(&code, &y)?;
            let decoded = slepian_wolf_decode(&code, &x, &s, a.source.p)?;
            println!("syndrome={}", bits_string(&s));
            println!("decoded={decoded}");
            println!("success={}", decoded == y);
            Ok(())
        }
        Command::Quantize(a) => {
            let opts = ConstructionOptions {
                trials: a.construction_trials,
                seed,
            };
            let q = match a.kind {
                QuantKind::Erasure => {
                    let (Some(rate), Some(eps)) = (a.rate, a.eps) else {
                        return Err(usage("erasure quantization needs --rate and --eps"));
                    };
                    let s: TernarySourceBlock = text_arg(&a.input)?.trim().parse()?;
                    erasure_quantize(&erasure_quantizer(eps, a.n, rate)?, &s)?
                }
                QuantKind::Hamming => {
                    let Some(d) = a.distortion else {
                        return Err(usage("hamming quantization needs --distortion"));
                    };
                    let x = bits_arg(&a.input)?;
                    hamming_quantize(&hamming_quantizer(a.n, d, &opts)?, &x, d)?
                }
            };
            println!("reconstruction={}", q.reconstruction);
            println!("distortion={}", q.distortion);
            Ok(())
        }
        Command::Wz(a) => {
            let opts = ConstructionOptions {
                trials: a.construction_trials,
                seed,
            };
            let codes = wyner_ziv_codes(a.n, a.distortion, a.q, a.distortion, a.target, &opts)?;
            let x = bits_arg(&a.x)?;
            let y = bits_arg(&a.y)?;
            let (payload, q): (WynerZivPayload, _) = wyner_ziv_encode(&codes, &x, a.distortion)?;
            let decoded = wyner_ziv_decode(&codes, &payload, &y)?;
            println!("rate={} violations={}", codes.rate(), codes.violations().len());
            println!("payload={}", bits_string(&payload.bits));
            println!("decoded={decoded}");
            println!("channel_success={}", decoded == q.reconstruction);
            println!("distortion={}", polar_workbench::channel::hamming_distortion(&decoded, &x)?);
            Ok(())
        }
        Command::Zprofile(a) => {
            let orientation = match a.orientation {
                OrientationArg::Primal => Orientation::Primal,
                OrientationArg::Dual => Orientation::Dual,
            };
            let profile = z_profile_bec(a.z, a.n, orientation)?;
            let mut out = std::io::stdout().lock();
            for (i, z) in profile.values().iter().enumerate() {
                writeln!(out, "{i} {z:.17e}")?;
            }
            Ok(())
        }
        Command::Preset(a) => {
            let mut configs = sim::preset_configs(a.figure, a.scale, seed);
            if let Some(t) = a.trials {
                if t == 0 {
                    return Err(usage("trials must be at least 1"));
                }
                for c in &mut configs {
                    c.trials = t;
                }
            }
            fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
            let csv = sim::run_configs(&configs)?;
            let path = a.out.join(format!("{}.csv", a.figure.name()));
            fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?;
            println!("{}", path.display());
            Ok(())
        }
    }
}

fn append_csv(path: &Path, rows: &[polar_workbench::TrialSummary]) -> anyhow::Result<()> {
    let fresh = fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let mut file = fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .with_context(|| format!("opening {}", path.display()))?;
    let text = sim::to_csv(rows);
    let body = if fresh {
        text.as_str()
    } else {
        text.split_once('\n').map(|(_, rest)| rest).unwrap_or("")
    };
    file.write_all(body.as_bytes())?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(1);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if is_usage(&e) { 1 } else { 2 })
        }
    }
}
