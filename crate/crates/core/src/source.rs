//! Source coding with polar codes: syndrome compression with permutation
//! retry, the Slepian-Wolf corner point, erasure and Hamming quantization by
//! dual codes, and the nested Wyner-Ziv scheme.

use rand::seq::SliceRandom;

use crate::channel::{
    binary_entropy, binary_entropy_inverse, bsc_evidence, derive_seed, erasure_distortion, hamming_distortion,
    star, stream_rng, ChannelParam, TernarySourceBlock,
};
use crate::construction::{
    construct_arikan, construct_for_target, reliability_scores, CodeSpec, ConstructionOptions, DecodingOrder,
};
use crate::error::{invalid, PolarError, Result};
use crate::sc::{sc_decode, sc_quantize_dual, sc_source_decode};
use crate::transform::BitBlock;

/// Largest permutation budget accepted by [`PermutationFamily`].
pub const MAX_PERMUTATION_BITS: u32 = 16;

const FAILED_FLAG: u32 = 1 << 31;

const HEADER_BYTES: usize = 16;

/// Syndrome of `x`: the input vector `code.codeword_of(x)` restricted to the
/// frozen set (ascending). A block is a codeword iff its syndrome is zero.
pub fn syndrome(code: &CodeSpec, x: &BitBlock) -> Result<Vec<u8>> {
    check_len(code, x.len())?;
    let u = code.codeword_of(x);
    Ok(code.frozen().iter().map(|&f| u.get(f)).collect())
}

fn check_len(code: &CodeSpec, actual: usize) -> Result<()> {
    if actual == code.len() {
        Ok(())
    } else {
        Err(PolarError::LengthMismatch {
            expected: code.len(),
            actual,
        })
    }
}

/// `2^m` fixed index permutations shared by encoder and decoder. Permutation
/// 0 is the identity; permutation `k` depends only on `(seed, n, k)`, so a
/// family with a larger budget extends a smaller one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermutationFamily {
    n: u32,
    m: u32,
    seed: u64,
}

impl PermutationFamily {
    pub fn new(n: u32, m: u32, seed: u64) -> Result<Self> {
        crate::transform::check_exponent(n)?;
        if m > MAX_PERMUTATION_BITS {
            return Err(invalid(format!("permutation budget {m} exceeds {MAX_PERMUTATION_BITS} bits")));
        }
        Ok(Self { n, m, seed })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of permutations, `2^m`.
    pub fn len(&self) -> usize {
        1 << self.m
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Permutation `k` as an index table.
    pub fn permutation(&self, k: u32) -> Result<Vec<usize>> {
        if k as usize >= self.len() {
            return Err(invalid(format!("permutation index {k} outside [0, {})", self.len())));
        }
        let mut p: Vec<usize> = (0..1usize << self.n).collect();
        if k > 0 {
            p.shuffle(&mut stream_rng(derive_seed(self.seed, &[0x9E7, self.n as u64]), k as u64));
        }
        Ok(p)
    }

    /// `x_π` with `x_π[i] = x[π_k(i)]`.
    pub fn apply(&self, k: u32, x: &BitBlock) -> Result<BitBlock> {
        x.gather(&self.permutation(k)?)
    }

    /// Inverse of [`apply`](Self::apply).
    pub fn invert(&self, k: u32, y: &BitBlock) -> Result<BitBlock> {
        y.scatter(&self.permutation(k)?)
    }
}

/// A compressed source block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompressedBlock {
    pub n: u32,
    pub m: u32,
    pub perm_index: u32,
    /// Syndrome bits in ascending frozen-index order.
    pub syndrome: Vec<u8>,
    /// Whether the encoder verified that decompression reproduces the block.
    pub success: bool,
}

impl CompressedBlock {
    /// `(|F| + m) / 2^n`.
    pub fn rate(&self) -> f64 {
        (self.syndrome.len() as f64 + self.m as f64) / (1usize << self.n) as f64
    }

    /// Little-endian `u32` header `n, m, perm_index, |F|`, then the syndrome
    /// packed LSB-first. Bit 31 of the index word marks an unsuccessful block.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_BYTES + self.syndrome.len().div_ceil(8));
        let index = self.perm_index | if self.success { 0 } else { FAILED_FLAG };
        for v in [self.n, self.m, index, self.syndrome.len() as u32] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        for chunk in self.syndrome.chunks(8) {
            out.push(chunk.iter().enumerate().fold(0u8, |acc, (i, &b)| acc | (b << i)));
        }
        out
    }

    /// Parses [`to_bytes`](Self::to_bytes) output.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_BYTES {
            return Err(invalid("compressed block shorter than its header"));
        }
        let word = |i: usize| u32::from_le_bytes(bytes[4 * i..4 * i + 4].try_into().expect("four bytes"));
        let (n, m, index, f) = (word(0), word(1), word(2), word(3) as usize);
        let (perm_index, success) = (index & !FAILED_FLAG, index & FAILED_FLAG == 0);
        crate::transform::check_exponent(n)?;
        if f > 1usize << n {
            return Err(invalid(format!("frozen count {f} exceeds block length")));
        }
        let body = &bytes[HEADER_BYTES..];
        if body.len() != f.div_ceil(8) {
            return Err(PolarError::LengthMismatch {
                expected: HEADER_BYTES + f.div_ceil(8),
                actual: bytes.len(),
            });
        }
        let syndrome = (0..f).map(|i| (body[i / 8] >> (i % 8)) & 1).collect();
        Ok(Self {
            n,
            m,
            perm_index,
            syndrome,
            success,
        })
    }
}

/// Syndrome compression of a Bernoulli(`p`) block: tries the permutations in
/// family order and keeps the first whose syndrome decodes back to the
/// permuted block. Without success the identity syndrome is returned with
/// `success = false`.
pub fn compress(code: &CodeSpec, x: &BitBlock, p: f64, family: &PermutationFamily) -> Result<CompressedBlock> {
    check_len(code, x.len())?;
    if family.n() != code.n() {
        return Err(invalid("permutation family and code have different lengths"));
    }
    for k in 0..family.len() as u32 {
        let xp = family.apply(k, x)?;
        let s = syndrome(code, &xp)?;
        if sc_source_decode(code, p, &s)? == xp {
            return Ok(CompressedBlock {
                n: code.n(),
                m: family.m(),
                perm_index: k,
                syndrome: s,
                success: true,
            });
        }
    }
    Ok(CompressedBlock {
        n: code.n(),
        m: family.m(),
        perm_index: 0,
        syndrome: syndrome(code, x)?,
        success: false,
    })
}

/// Recovers the block from its syndrome and permutation index.
pub fn decompress(code: &CodeSpec, c: &CompressedBlock, p: f64, family: &PermutationFamily) -> Result<BitBlock> {
    if c.n != code.n() || c.syndrome.len() != code.frozen().len() {
        return Err(invalid("compressed block does not match the code"));
    }
    if !c.success {
        return Err(invalid("block was not compressed successfully"));
    }
    let z = sc_source_decode(code, p, &c.syndrome)?;
    family.invert(c.perm_index, &z)
}

/// Slepian-Wolf encoder for the compressed source `y`.
pub fn slepian_wolf_encode(code: &CodeSpec, y: &BitBlock) -> Result<Vec<u8>> {
    syndrome(code, y)
}

/// Slepian-Wolf decoder: estimates `y = x ⊕ z` from `x` and the syndrome of `y`.
pub fn slepian_wolf_decode(code: &CodeSpec, x: &BitBlock, syndrome_y: &[u8], p: f64) -> Result<BitBlock> {
    let sx = syndrome(code, x)?;
    if sx.len() != syndrome_y.len() {
        return Err(PolarError::LengthMismatch {
            expected: sx.len(),
            actual: syndrome_y.len(),
        });
    }
    let sz: Vec<u8> = sx.iter().zip(syndrome_y).map(|(a, b)| a ^ b).collect();
    let z = sc_source_decode(code, p, &sz)?;
    x.xor(&z)
}

/// Result of quantizing a block with a dual code.
#[derive(Clone, Debug, PartialEq)]
pub struct Quantization {
    pub u: BitBlock,
    pub reconstruction: BitBlock,
    pub distortion: f64,
}

impl Quantization {
    /// Zero distortion, as required of erasure quantization.
    pub fn is_exact(&self) -> bool {
        self.distortion == 0.0
    }
}

/// Dual of the Arıkan code for BEC(1 − ε) at channel rate `rate`.
pub fn erasure_quantizer(eps: f64, n: u32, rate: f64) -> Result<CodeSpec> {
    let channel = ChannelParam::bec(1.0 - eps)?;
    Ok(construct_arikan(&channel, n, rate, &ConstructionOptions::default())?.dual())
}

/// Covers the non-`*` symbols of `s` with a codeword of `dual`; success is
/// certified by recomputing the distortion.
pub fn erasure_quantize(dual: &CodeSpec, s: &TernarySourceBlock) -> Result<Quantization> {
    check_len(dual, s.len())?;
    let out = sc_quantize_dual(dual, &s.evidence())?;
    let reconstruction = dual.codeword_of(&out.u);
    let distortion = erasure_distortion(s, &reconstruction)?;
    Ok(Quantization {
        u: out.u,
        reconstruction,
        distortion,
    })
}

/// Test-channel parameter `p = h2⁻¹(1 − h2(D))`.
pub fn test_channel_param(d: f64) -> Result<f64> {
    if !(d > 0.0 && d < 0.5) {
        return Err(invalid(format!("distortion {d} outside (0, 0.5)")));
    }
    binary_entropy_inverse(1.0 - binary_entropy(d))
}

/// Dual of the BSC(p) Arıkan code, `p` the test-channel parameter of `d`;
/// the quantizer rate is `1 − h2(d)` (up to rounding of `2^n` times it).
pub fn hamming_quantizer(n: u32, d: f64, opts: &ConstructionOptions) -> Result<CodeSpec> {
    let p = test_channel_param(d)?;
    let channel = ChannelParam::bsc(p)?;
    let rate = 1.0 - binary_entropy(p);
    Ok(construct_arikan(&channel, n, rate, opts)?.dual())
}

/// Lossy encoding of `x` at design distortion `d` with SC over the BSC(d)
/// test-channel evidence.
pub fn hamming_quantize(dual: &CodeSpec, x: &BitBlock, d: f64) -> Result<Quantization> {
    check_len(dual, x.len())?;
    if !(d > 0.0 && d < 0.5) {
        return Err(invalid(format!("distortion {d} outside (0, 0.5)")));
    }
    let out = sc_quantize_dual(dual, &bsc_evidence(x, d))?;
    let reconstruction = dual.codeword_of(&out.u);
    let distortion = hamming_distortion(x, &reconstruction)?;
    Ok(Quantization {
        u: out.u,
        reconstruction,
        distortion,
    })
}

/// Source and channel codes of the Wyner-Ziv scheme, both in dual
/// orientation, with their nesting bookkeeping.
#[derive(Clone, Debug, PartialEq)]
pub struct WynerZivCodes {
    source: CodeSpec,
    channel: CodeSpec,
    channel_p: f64,
    payload_positions: Vec<usize>,
    violations: Vec<usize>,
}

impl WynerZivCodes {
    /// `source` quantizes (frozen set `F_s`); `channel` protects the
    /// reconstruction over BSC(`channel_p`) (frozen set `F_c`). Positions of
    /// `F_s ∖ F_c` are reported as nesting violations and sent as well.
    pub fn new(source: CodeSpec, channel: CodeSpec, channel_p: f64) -> Result<Self> {
        if source.n() != channel.n() {
            return Err(invalid("source and channel codes have different lengths"));
        }
        if source.order() != DecodingOrder::Dual || channel.order() != DecodingOrder::Dual {
            return Err(invalid("Wyner-Ziv codes must both be in dual orientation"));
        }
        if !(channel_p > 0.0 && channel_p < 0.5) {
            return Err(invalid(format!("channel parameter {channel_p} outside (0, 0.5)")));
        }
        let fs = source.frozen_mask();
        let fc = channel.frozen_mask();
        let payload_positions = (0..source.len()).filter(|&i| fs[i] != fc[i]).collect();
        let violations = (0..source.len()).filter(|&i| fs[i] && !fc[i]).collect();
        Ok(Self {
            source,
            channel,
            channel_p,
            payload_positions,
            violations,
        })
    }

    pub fn source(&self) -> &CodeSpec {
        &self.source
    }

    pub fn channel(&self) -> &CodeSpec {
        &self.channel
    }

    pub fn channel_p(&self) -> f64 {
        self.channel_p
    }

    /// `F_s ∖ F_c`.
    pub fn violations(&self) -> &[usize] {
        &self.violations
    }

    /// `(F_c ∖ F_s) ∪ (F_s ∖ F_c)`, ascending.
    pub fn payload_positions(&self) -> &[usize] {
        &self.payload_positions
    }

    /// Transmitted bits per source symbol, violations included.
    pub fn rate(&self) -> f64 {
        self.payload_positions.len() as f64 / self.source.len() as f64
    }

    /// Rate of the violation surcharge alone.
    pub fn surcharge(&self) -> f64 {
        self.violations.len() as f64 / self.source.len() as f64
    }
}

/// Builds the Wyner-Ziv code pair: the Hamming quantizer for distortion `d`
/// and, for side information through BSC(`q`), the channel code for
/// BSC(`d_channel ∗ q`) whose summed genie error estimate stays within
/// `target`. The channel code is mirrored into dual orientation.
pub fn wyner_ziv_codes(
    n: u32,
    d: f64,
    q: f64,
    d_channel: f64,
    target: f64,
    opts: &ConstructionOptions,
) -> Result<WynerZivCodes> {
    let source = hamming_quantizer(n, d, opts)?;
    let channel_p = star(d_channel, q);
    let scores = reliability_scores(&ChannelParam::bsc(channel_p)?, n, opts)?;
    let channel = construct_for_target(n, &scores, target)?.mirrored();
    WynerZivCodes::new(source, channel, channel_p)
}

/// Wyner-Ziv message: `û` on the payload positions.
#[derive(Clone, Debug, PartialEq)]
pub struct WynerZivPayload {
    pub bits: Vec<u8>,
    pub rate: f64,
}

/// Quantizes `x` at distortion `d` and extracts the payload; also returns the
/// encoder's reconstruction.
pub fn wyner_ziv_encode(codes: &WynerZivCodes, x: &BitBlock, d: f64) -> Result<(WynerZivPayload, Quantization)> {
    let q = hamming_quantize(&codes.source, x, d)?;
    let bits = codes.payload_positions.iter().map(|&i| q.u.get(i)).collect();
    Ok((WynerZivPayload { bits, rate: codes.rate() }, q))
}

/// Decodes the reconstruction from the payload and side information `y`.
pub fn wyner_ziv_decode(codes: &WynerZivCodes, payload: &WynerZivPayload, y: &BitBlock) -> Result<BitBlock> {
    check_len(&codes.source, y.len())?;
    if payload.bits.len() != codes.payload_positions.len() {
        return Err(PolarError::LengthMismatch {
            expected: codes.payload_positions.len(),
            actual: payload.bits.len(),
        });
    }
    let fs = codes.source.frozen_mask();
    let fc = codes.channel.frozen_mask();
    let mut values = vec![0u8; codes.source.len()];
    for (&i, &b) in codes.payload_positions.iter().zip(&payload.bits) {
        values[i] = b;
    }
    let frozen: Vec<usize> = (0..codes.source.len()).filter(|&i| fs[i] || fc[i]).collect();
    let frozen_values = frozen.iter().map(|&i| values[i]).collect();
    let decoder = CodeSpec::new(
        codes.source.n(),
        frozen,
        Some(frozen_values),
        codes.channel.rule(),
        DecodingOrder::Dual,
    )?;
    let out = sc_decode(&decoder, &bsc_evidence(y, codes.channel_p))?;
    Ok(decoder.codeword_of(&out.u))
}

/// Lower convex envelope of `h2(D ∗ q) − h2(D)` on `[0, q]` and the point
/// `(q, 0)`, evaluated at `d` (zero for `d ≥ q`).
pub fn wyner_ziv_bound(d: f64, q: f64) -> f64 {
    if d >= q {
        return 0.0;
    }
    let g = |a: f64| binary_entropy(star(a, q)) - binary_entropy(a);
    // The envelope follows g up to the tangency point of the line through (q, 0).
    const STEPS: usize = 20_000;
    let mut best = g(d.max(0.0));
    for s in 0..=STEPS {
        let a = d * s as f64 / STEPS as f64;
        best = best.min(g(a) * (q - d) / (q - a));
    }
    best
}
