//! Channel and source models: BEC/BSC/BAWGN samplers producing soft
//! observations, Bernoulli and erasure-ternary sources, entropy helpers and
//! distortion measures.
//!
//! LLRs follow `log Pr(y|0) / Pr(y|1)`; BPSK maps `0 → +1`, `1 → −1`.
//! BEC outputs are `±∞` or the distinct [`Observation::Erasure`] symbol.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, PolarError, Result};
use crate::transform::{exponent_of, BitBlock};

/// Per-trial random stream.
pub type TrialRng = ChaCha8Rng;

/// Counter-based stream `stream` of the generator keyed by `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Mixes a base seed with tags into an independent seed (splitmix64 steps).
pub fn derive_seed(seed: u64, tags: &[u64]) -> u64 {
    let mut state = seed ^ 0x243F_6A88_85A3_08D3;
    for &tag in tags {
        state = splitmix(state ^ splitmix(tag.wrapping_add(0x9E37_79B9_7F4A_7C15)));
    }
    splitmix(state)
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelKind {
    Bec,
    Bsc,
    Bawgn,
}

impl ChannelKind {
    pub fn name(self) -> &'static str {
        match self {
            ChannelKind::Bec => "bec",
            ChannelKind::Bsc => "bsc",
            ChannelKind::Bawgn => "bawgn",
        }
    }
}

/// A symmetric binary-input channel: erasure probability, crossover
/// probability or noise standard deviation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelParam {
    kind: ChannelKind,
    value: f64,
}

impl ChannelParam {
    pub fn new(kind: ChannelKind, value: f64) -> Result<Self> {
        let ok = match kind {
            ChannelKind::Bec | ChannelKind::Bsc => (0.0..=1.0).contains(&value),
            ChannelKind::Bawgn => value > 0.0 && value.is_finite(),
        };
        if !ok {
            return Err(invalid(format!("{} parameter {value} out of range", kind.name())));
        }
        Ok(Self { kind, value })
    }

    pub fn bec(eps: f64) -> Result<Self> {
        Self::new(ChannelKind::Bec, eps)
    }

    pub fn bsc(p: f64) -> Result<Self> {
        Self::new(ChannelKind::Bsc, p)
    }

    pub fn bawgn(sigma: f64) -> Result<Self> {
        Self::new(ChannelKind::Bawgn, sigma)
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    /// Shannon capacity in bits per use. BAWGN capacity is integrated numerically.
    pub fn capacity(&self) -> f64 {
        match self.kind {
            ChannelKind::Bec => 1.0 - self.value,
            ChannelKind::Bsc => 1.0 - binary_entropy(self.value),
            ChannelKind::Bawgn => bawgn_capacity(self.value),
        }
    }
}

impl fmt::Display for ChannelParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.kind.name(), self.value)
    }
}

impl FromStr for ChannelParam {
    type Err = PolarError;

    /// Parses `kind:value`, e.g. `bec:0.5`, `bsc:0.11`, `bawgn:0.97865`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, value) = s
            .split_once(':')
            .ok_or_else(|| invalid(format!("expected kind:value, got {s:?}")))?;
        let kind = match kind.trim().to_ascii_lowercase().as_str() {
            "bec" => ChannelKind::Bec,
            "bsc" => ChannelKind::Bsc,
            "bawgn" | "awgn" | "bawgnc" => ChannelKind::Bawgn,
            other => return Err(invalid(format!("unknown channel kind {other:?}"))),
        };
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| invalid(format!("bad channel parameter {value:?}")))?;
        Self::new(kind, value)
    }
}

/// One channel output as seen by a decoder.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Observation {
    /// `log Pr(y|0)/Pr(y|1)`, possibly infinite.
    Llr(f64),
    Erasure,
}

impl Observation {
    /// LLR with erasures mapped to zero.
    #[inline]
    pub fn llr(self) -> f64 {
        match self {
            Observation::Llr(v) if !v.is_nan() => v,
            _ => 0.0,
        }
    }

    /// Hard value for erasure-type observations (`±∞`), `None` otherwise.
    pub fn known_bit(self) -> Option<u8> {
        match self {
            Observation::Llr(v) if v == f64::INFINITY => Some(0),
            Observation::Llr(v) if v == f64::NEG_INFINITY => Some(1),
            _ => None,
        }
    }

    fn is_erasure_type(self) -> bool {
        match self {
            Observation::Erasure => true,
            Observation::Llr(v) => v.is_infinite(),
        }
    }
}

/// Soft observations of a whole block.
#[derive(Clone, Debug, PartialEq)]
pub struct SoftBlock {
    n: u32,
    values: Vec<Observation>,
}

impl SoftBlock {
    pub fn new(values: Vec<Observation>) -> Result<Self> {
        let n = exponent_of(values.len())?;
        Ok(Self { n, values })
    }

    pub fn from_llrs(llrs: &[f64]) -> Result<Self> {
        Self::new(llrs.iter().map(|&v| Observation::Llr(v)).collect())
    }

    /// Noiseless observation of `x` (`±∞` everywhere).
    pub fn noiseless(x: &BitBlock) -> Self {
        Self {
            n: x.n(),
            values: x.iter().map(known).collect(),
        }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, i: usize) -> Observation {
        self.values[i]
    }

    pub fn values(&self) -> &[Observation] {
        &self.values
    }

    pub fn llrs(&self) -> Vec<f64> {
        self.values.iter().map(|o| o.llr()).collect()
    }

    /// True when every entry is an erasure or an infinite LLR.
    pub fn is_erasure_type(&self) -> bool {
        self.values.iter().all(|o| o.is_erasure_type())
    }

    pub fn erasure_count(&self) -> usize {
        self.values
            .iter()
            .filter(|o| matches!(o, Observation::Erasure))
            .count()
    }

    /// Hard decisions by LLR sign (ties and erasures give 0).
    pub fn hard_decisions(&self) -> BitBlock {
        let bits: Vec<u8> = self.values.iter().map(|o| u8::from(o.llr() < 0.0)).collect();
        BitBlock::from_bits(&bits).expect("power-of-two length")
    }

    /// Position-reversed copy.
    pub fn mirrored(&self) -> Self {
        Self {
            n: self.n,
            values: self.values.iter().rev().copied().collect(),
        }
    }
}

#[inline]
fn known(bit: u8) -> Observation {
    Observation::Llr(if bit == 0 { f64::INFINITY } else { f64::NEG_INFINITY })
}

/// Sends `x` through the channel.
pub fn channel_sample<R: Rng + ?Sized>(channel: &ChannelParam, x: &BitBlock, rng: &mut R) -> SoftBlock {
    let values = match channel.kind {
        ChannelKind::Bec => {
            let eps = channel.value;
            x.iter()
                .map(|b| if rng.random::<f64>() < eps { Observation::Erasure } else { known(b) })
                .collect()
        }
        ChannelKind::Bsc => {
            let p = channel.value;
            let mag = bsc_llr(p);
            x.iter()
                .map(|b| {
                    let y = b ^ u8::from(rng.random::<f64>() < p);
                    Observation::Llr(if y == 0 { mag } else { -mag })
                })
                .collect()
        }
        ChannelKind::Bawgn => {
            let sigma = channel.value;
            let scale = 2.0 / (sigma * sigma);
            x.iter()
                .map(|b| {
                    let noise: f64 = rng.sample(StandardNormal);
                    let y = if b == 0 { 1.0 } else { -1.0 } + sigma * noise;
                    Observation::Llr(scale * y)
                })
                .collect()
        }
    };
    SoftBlock { n: x.n(), values }
}

/// `log((1−p)/p)`: the LLR magnitude of a BSC(p) output.
pub fn bsc_llr(p: f64) -> f64 {
    ((1.0 - p) / p).ln()
}

/// Hard-valued soft evidence for `bits` under a BSC(p) model.
pub fn bsc_evidence(bits: &BitBlock, p: f64) -> SoftBlock {
    let mag = bsc_llr(p);
    SoftBlock {
        n: bits.n(),
        values: bits
            .iter()
            .map(|b| Observation::Llr(if b == 0 { mag } else { -mag }))
            .collect(),
    }
}

/// I.i.d. Ber(p) bits.
pub fn bernoulli_block<R: Rng + ?Sized>(p: f64, n: u32, rng: &mut R) -> Result<BitBlock> {
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("Bernoulli parameter {p} outside [0, 1]")));
    }
    let mut block = BitBlock::zeros(n)?;
    for i in 0..block.len() {
        if rng.random::<f64>() < p {
            block.set(i, 1);
        }
    }
    Ok(block)
}

/// A symbol of the erasure source.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Ternary {
    Zero,
    One,
    Star,
}

impl Ternary {
    pub fn as_char(self) -> char {
        match self {
            Ternary::Zero => '0',
            Ternary::One => '1',
            Ternary::Star => '*',
        }
    }
}

/// A block over `{0, 1, *}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TernarySourceBlock {
    n: u32,
    symbols: Vec<Ternary>,
}

impl TernarySourceBlock {
    pub fn new(symbols: Vec<Ternary>) -> Result<Self> {
        let n = exponent_of(symbols.len())?;
        Ok(Self { n, symbols })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn symbols(&self) -> &[Ternary] {
        &self.symbols
    }

    pub fn star_count(&self) -> usize {
        self.symbols.iter().filter(|&&s| s == Ternary::Star).count()
    }

    /// Soft evidence: `±∞` on known symbols, erasure on `*`.
    pub fn evidence(&self) -> SoftBlock {
        SoftBlock {
            n: self.n,
            values: self
                .symbols
                .iter()
                .map(|s| match s {
                    Ternary::Zero => known(0),
                    Ternary::One => known(1),
                    Ternary::Star => Observation::Erasure,
                })
                .collect(),
        }
    }
}

impl fmt::Display for TernarySourceBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.symbols {
            write!(f, "{}", s.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for TernarySourceBlock {
    type Err = PolarError;

    fn from_str(s: &str) -> Result<Self> {
        let symbols = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(Ternary::Zero),
                '1' => Ok(Ternary::One),
                '*' => Ok(Ternary::Star),
                other => Err(invalid(format!("unexpected symbol {other:?} in ternary block"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(symbols)
    }
}

/// I.i.d. symbols with `Pr(*) = eps`, `Pr(0) = Pr(1) = (1 − eps)/2`.
pub fn ternary_source_block<R: Rng + ?Sized>(eps: f64, n: u32, rng: &mut R) -> Result<TernarySourceBlock> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(invalid(format!("erasure probability {eps} outside [0, 1]")));
    }
    crate::transform::check_exponent(n)?;
    let symbols = (0..1usize << n)
        .map(|_| {
            if rng.random::<f64>() < eps {
                Ternary::Star
            } else if rng.random::<bool>() {
                Ternary::One
            } else {
                Ternary::Zero
            }
        })
        .collect();
    Ok(TernarySourceBlock { n, symbols })
}

/// `h2(p) = −p log2 p − (1−p) log2(1−p)`.
pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

/// Inverse of `h2` on the branch `[0, 1/2]`, by bisection.
pub fn binary_entropy_inverse(h: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&h) {
        return Err(invalid(format!("entropy value {h} outside [0, 1]")));
    }
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if binary_entropy(mid) < h {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Binary convolution `a∗b = a(1−b) + (1−a)b`.
pub fn star(a: f64, b: f64) -> f64 {
    a * (1.0 - b) + (1.0 - a) * b
}

/// Normalized Hamming distortion.
pub fn hamming_distortion(a: &BitBlock, b: &BitBlock) -> Result<f64> {
    Ok(a.distance(b)? as f64 / a.len() as f64)
}

/// Normalized erasure distortion: `*` positions cost nothing.
pub fn erasure_distortion(s: &TernarySourceBlock, b: &BitBlock) -> Result<f64> {
    if s.len() != b.len() {
        return Err(PolarError::LengthMismatch {
            expected: s.len(),
            actual: b.len(),
        });
    }
    let mismatches = s
        .symbols
        .iter()
        .zip(b.iter())
        .filter(|(s, bit)| match s {
            Ternary::Zero => *bit == 1,
            Ternary::One => *bit == 0,
            Ternary::Star => false,
        })
        .count();
    Ok(mismatches as f64 / s.len() as f64)
}

fn bawgn_capacity(sigma: f64) -> f64 {
    // I = 1 − E[log2(1 + e^{−L})] with L ~ N(2/σ², 4/σ²) given x = 0.
    let mean = 2.0 / (sigma * sigma);
    let sd = 2.0 / sigma;
    let steps = 20_000;
    let half_width = 12.0;
    let h = 2.0 * half_width / steps as f64;
    let mut acc = 0.0;
    for k in 0..=steps {
        let t = -half_width + k as f64 * h;
        let weight = if k == 0 || k == steps { 0.5 } else { 1.0 };
        let l = mean + sd * t;
        let density = (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
        acc += weight * density * softplus_neg(l) / std::f64::consts::LN_2;
    }
    1.0 - acc * h
}

/// `ln(1 + e^{−x})`, stable for large |x|.
pub(crate) fn softplus_neg(x: f64) -> f64 {
    if x > 0.0 {
        (-x).exp().ln_1p()
    } else {
        -x + x.exp().ln_1p()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_channel_params() {
        let c: ChannelParam = "bec:0.5".parse().unwrap();
        assert_eq!(c.kind(), ChannelKind::Bec);
        assert_eq!(c.value(), 0.5);
        assert!("bsc:1.5".parse::<ChannelParam>().is_err());
        assert!("bawgn:0".parse::<ChannelParam>().is_err());
        assert!("foo:0.1".parse::<ChannelParam>().is_err());
        assert!("bec".parse::<ChannelParam>().is_err());
    }

    #[test]
    fn bec_without_erasures_recovers_signs() {
        let mut rng = stream_rng(1, 0);
        let x: BitBlock = "01101100".parse().unwrap();
        let y = channel_sample(&ChannelParam::bec(0.0).unwrap(), &x, &mut rng);
        assert_eq!(y.erasure_count(), 0);
        assert_eq!(y.hard_decisions(), x);
    }

    #[test]
    fn bsc_half_has_zero_llr() {
        let mut rng = stream_rng(2, 0);
        let x: BitBlock = "0110".parse().unwrap();
        let y = channel_sample(&ChannelParam::bsc(0.5).unwrap(), &x, &mut rng);
        assert!(y.llrs().iter().all(|&l| l == 0.0));
    }

    #[test]
    fn bawgn_mutual_information_near_half() {
        let sigma = 0.97865;
        let channel = ChannelParam::bawgn(sigma).unwrap();
        assert!((channel.capacity() - 0.5).abs() < 1e-3, "{}", channel.capacity());
        let mut rng = stream_rng(3, 0);
        let x = BitBlock::zeros(20).unwrap();
        let y = channel_sample(&channel, &x, &mut rng);
        let loss: f64 = y.llrs().iter().map(|&l| softplus_neg(l)).sum::<f64>()
            / (y.len() as f64 * std::f64::consts::LN_2);
        let mi = 1.0 - loss;
        assert!((mi - 0.5).abs() < 0.01, "empirical MI {mi}");
    }

    #[test]
    fn hard_decisions_match_minimum_distance() {
        let mut rng = stream_rng(4, 0);
        let x: BitBlock = "0110100110010110".parse().unwrap();
        for channel in [ChannelParam::bsc(0.2).unwrap(), ChannelParam::bawgn(0.8).unwrap()] {
            let y = channel_sample(&channel, &x, &mut rng);
            for (i, o) in y.values().iter().enumerate() {
                let l = o.llr();
                if l != 0.0 {
                    // LLR sign agrees with the nearer BPSK point: 0 ↔ +, 1 ↔ −.
                    assert_eq!(y.hard_decisions().get(i), u8::from(l < 0.0));
                }
            }
        }
    }

    #[test]
    fn bernoulli_extremes_and_mean() {
        let mut rng = stream_rng(5, 0);
        assert_eq!(bernoulli_block(0.0, 6, &mut rng).unwrap().weight(), 0);
        assert_eq!(bernoulli_block(1.0, 6, &mut rng).unwrap().weight(), 64);
        let b = bernoulli_block(0.11, 20, &mut rng).unwrap();
        let mean = b.weight() as f64 / b.len() as f64;
        assert!((0.109..=0.111).contains(&mean), "{mean}");
        assert!(bernoulli_block(1.1, 3, &mut rng).is_err());
    }

    #[test]
    fn ternary_source_law() {
        let mut rng = stream_rng(6, 0);
        assert_eq!(ternary_source_block(1.0, 5, &mut rng).unwrap().star_count(), 32);
        let s = ternary_source_block(0.0, 8, &mut rng).unwrap();
        assert_eq!(s.star_count(), 0);
        let ones = s.symbols().iter().filter(|&&t| t == Ternary::One).count();
        assert!((80..=176).contains(&ones));
        let s = ternary_source_block(0.5, 20, &mut rng).unwrap();
        let freq = s.star_count() as f64 / s.len() as f64;
        assert!((0.499..=0.501).contains(&freq), "{freq}");
    }

    #[test]
    fn entropy_values() {
        assert!((binary_entropy(0.5) - 1.0).abs() < 1e-15);
        assert_eq!(binary_entropy(0.0), 0.0);
        assert_eq!(binary_entropy(1.0), 0.0);
        for h in [0.0, 0.1, 0.278, 0.5, 0.9, 1.0] {
            let p = binary_entropy_inverse(h).unwrap();
            assert!((0.0..=0.5).contains(&p));
            assert!((binary_entropy(p) - h).abs() < 1e-10, "h={h}");
        }
        // p = h2^{-1}(1 − h2(D)) and D = h2^{-1}(1 − h2(p)) are mutually consistent.
        let p = binary_entropy_inverse(1.0 - binary_entropy(0.11)).unwrap();
        let d = binary_entropy_inverse(1.0 - binary_entropy(p)).unwrap();
        assert!((d - 0.11).abs() < 1e-9, "{d}");
    }

    #[test]
    fn distortions() {
        let a: BitBlock = "0110".parse().unwrap();
        let b: BitBlock = "1001".parse().unwrap();
        assert_eq!(hamming_distortion(&a, &a).unwrap(), 0.0);
        assert_eq!(hamming_distortion(&a, &b).unwrap(), 1.0);
        let stars: TernarySourceBlock = "****".parse().unwrap();
        assert_eq!(erasure_distortion(&stars, &b).unwrap(), 0.0);
        let s: TernarySourceBlock = "0*1*".parse().unwrap();
        assert_eq!(erasure_distortion(&s, &a).unwrap(), 0.0);
        assert_eq!(erasure_distortion(&s, &b).unwrap(), 0.5);
        let short: BitBlock = "01".parse().unwrap();
        assert!(hamming_distortion(&a, &short).is_err());
        assert!(erasure_distortion(&s, &short).is_err());
    }

    #[test]
    fn seeded_streams_are_reproducible() {
        let x = BitBlock::zeros(8).unwrap();
        let c = ChannelParam::bawgn(1.0).unwrap();
        let a = channel_sample(&c, &x, &mut stream_rng(9, 4));
        let b = channel_sample(&c, &x, &mut stream_rng(9, 4));
        let other = channel_sample(&c, &x, &mut stream_rng(9, 5));
        assert_eq!(a, b);
        assert_ne!(a, other);
        assert_ne!(derive_seed(1, &[2, 3]), derive_seed(1, &[3, 2]));
    }
}
