//! Successive cancellation decoding in the bit-reversed order, its genie-aided
//! variant, syndrome-based source decoding and dual-order quantization.

use crate::channel::{bsc_llr, SoftBlock};
use crate::construction::{CodeSpec, DecodingOrder};
use crate::error::{invalid, PolarError, Result};
use crate::transform::{bit_reversal_table, BitBlock};

/// Result of one SC pass.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScOutput {
    /// Decided input vector, frozen positions included.
    pub u: BitBlock,
    /// Information positions decided on a zero (or conflicting) LLR.
    pub ties: usize,
}

/// Result of a genie-aided SC pass.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenieReport {
    /// `flags[i]` is set when the decision at information position `i` would
    /// have been wrong or a tie.
    pub flags: Vec<bool>,
    /// First flagged position in decoding order.
    pub first_error: Option<usize>,
}

impl GenieReport {
    pub fn error_count(&self) -> usize {
        self.flags.iter().filter(|&&f| f).count()
    }
}

/// Beyond this argument `ln(1 + e^−t)` is below `1e−17` and is dropped.
const CORRECTION_CUTOFF: f64 = 40.0;

/// Exact `2·atanh(tanh(a/2)·tanh(b/2))`, with infinities handled as hard
/// decisions and zero as complete uncertainty.
pub fn boxplus(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 || a.is_nan() || b.is_nan() {
        return 0.0;
    }
    let sign = if (a < 0.0) != (b < 0.0) { -1.0 } else { 1.0 };
    let (x, y) = (a.abs(), b.abs());
    if x.is_infinite() {
        return sign * y;
    }
    if y.is_infinite() {
        return sign * x;
    }
    let m = x.min(y);
    let (s, d) = (x + y, (x - y).abs());
    let mut v = m;
    if s < CORRECTION_CUTOFF {
        v += (-s).exp().ln_1p();
    }
    if d < CORRECTION_CUTOFF {
        v -= (-d).exp().ln_1p();
    }
    sign * v.max(0.0)
}

#[inline]
fn g_update(a1: f64, a2: f64, c: u8) -> f64 {
    let v = if c == 0 { a2 + a1 } else { a2 - a1 };
    if v.is_nan() {
        0.0
    } else {
        v
    }
}

/// Reusable buffers for one block exponent.
pub(crate) struct ScWorkspace {
    n: u32,
    llr: Vec<f64>,
    bits: Vec<u8>,
    perm: Vec<usize>,
}

impl ScWorkspace {
    pub(crate) fn new(n: u32) -> Self {
        let len = 1usize << n;
        Self {
            n,
            llr: vec![0.0; 2 * len],
            bits: vec![0; 2 * len],
            perm: bit_reversal_table(n),
        }
    }

    /// Runs SC over the natural-order LLRs of a standard-orientation code.
    /// `leaf` receives each input index (in decoding order) with its decision
    /// LLR and returns the bit to commit.
    pub(crate) fn run(&mut self, channel: &[f64], leaf: &mut dyn FnMut(usize, f64) -> u8) {
        let len = 1usize << self.n;
        for (j, &p) in self.perm.iter().enumerate() {
            self.llr[len + j] = channel[p];
        }
        node(&mut self.llr, &mut self.bits, &self.perm, self.n, 0, leaf);
    }

    /// Genie-aided pass with the all-zero input; every index is treated as
    /// information and `counts[i]` is bumped when its LLR is not positive.
    pub(crate) fn genie_count_zero(&mut self, channel: &[f64], counts: &mut [u64]) {
        self.run(channel, &mut |i, l| {
            if l.is_nan() || l <= 0.0 {
                counts[i] += 1;
            }
            0
        });
    }
}

fn node(llr: &mut [f64], bits: &mut [u8], perm: &[usize], m: u32, base: usize, leaf: &mut dyn FnMut(usize, f64) -> u8) {
    if m == 0 {
        bits[1] = leaf(perm[base], llr[1]);
        return;
    }
    let size = 1usize << m;
    let h = size / 2;
    {
        let (lo, parent) = llr.split_at_mut(size);
        let child = &mut lo[h..];
        for i in 0..h {
            child[i] = boxplus(parent[i], parent[i + h]);
        }
    }
    node(llr, bits, perm, m - 1, base, leaf);
    {
        let (lo, hi) = bits.split_at_mut(size);
        hi[..h].copy_from_slice(&lo[h..]);
    }
    {
        let (lo, parent) = llr.split_at_mut(size);
        let child = &mut lo[h..];
        for i in 0..h {
            child[i] = g_update(parent[i], parent[i + h], bits[size + i]);
        }
    }
    node(llr, bits, perm, m - 1, base + h, leaf);
    let (lo, hi) = bits.split_at_mut(size);
    for i in 0..h {
        hi[i] ^= lo[h + i];
        hi[h + i] = lo[h + i];
    }
}

/// The code in standard orientation together with the observation LLRs in
/// matching position order.
struct StandardView {
    frozen: Vec<Option<u8>>,
    llrs: Vec<f64>,
    mirrored: bool,
}

fn standard_view(code: &CodeSpec, obs: &SoftBlock) -> Result<StandardView> {
    if obs.len() != code.len() {
        return Err(PolarError::LengthMismatch {
            expected: code.len(),
            actual: obs.len(),
        });
    }
    let (code, obs, mirrored) = match code.order() {
        DecodingOrder::Standard => (code.clone(), obs.clone(), false),
        DecodingOrder::Dual => (code.mirrored(), obs.mirrored(), true),
    };
    let mut frozen = vec![None; code.len()];
    for (&f, &v) in code.frozen().iter().zip(code.frozen_values()) {
        frozen[f] = Some(v);
    }
    Ok(StandardView {
        frozen,
        llrs: obs.llrs(),
        mirrored,
    })
}

fn finish(u: BitBlock, mirrored: bool) -> BitBlock {
    if mirrored {
        u.mirrored()
    } else {
        u
    }
}

/// Input indices in the order SC decides them.
pub fn decoding_order(code: &CodeSpec) -> Vec<usize> {
    let perm = bit_reversal_table(code.n());
    match code.order() {
        DecodingOrder::Standard => perm,
        DecodingOrder::Dual => perm.into_iter().rev().collect(),
    }
}

/// SC decoding; also returns the LLR each input position was decided on.
pub fn sc_decode_detailed(code: &CodeSpec, obs: &SoftBlock) -> Result<(ScOutput, Vec<f64>)> {
    let view = standard_view(code, obs)?;
    let len = code.len();
    let mut u = BitBlock::zeros(code.n())?;
    let mut leaf_llrs = vec![0.0; len];
    let mut ties = 0;
    let mut ws = ScWorkspace::new(code.n());
    ws.run(&view.llrs, &mut |i, l| {
        leaf_llrs[i] = l;
        let bit = match view.frozen[i] {
            Some(v) => v,
            None => {
                if l.is_nan() || l == 0.0 {
                    ties += 1;
                    0
                } else {
                    u8::from(l < 0.0)
                }
            }
        };
        u.set(i, bit);
        bit
    });
    if view.mirrored {
        leaf_llrs.reverse();
    }
    Ok((
        ScOutput {
            u: finish(u, view.mirrored),
            ties,
        },
        leaf_llrs,
    ))
}

/// SC decoding; ties decide 0 and are counted.
pub fn sc_decode(code: &CodeSpec, obs: &SoftBlock) -> Result<ScOutput> {
    sc_decode_detailed(code, obs).map(|(out, _)| out)
}

/// Genie-aided SC: each decision is checked against `truth` and then forced
/// to the true value.
pub fn sc_decode_genie(code: &CodeSpec, obs: &SoftBlock, truth: &BitBlock) -> Result<GenieReport> {
    if truth.len() != code.len() {
        return Err(PolarError::LengthMismatch {
            expected: code.len(),
            actual: truth.len(),
        });
    }
    let view = standard_view(code, obs)?;
    let truth = if view.mirrored { truth.mirrored() } else { truth.clone() };
    let mut flags = vec![false; code.len()];
    let mut first_error = None;
    let mut ws = ScWorkspace::new(code.n());
    ws.run(&view.llrs, &mut |i, l| {
        let t = truth.get(i);
        if view.frozen[i].is_none() && (l.is_nan() || l == 0.0 || u8::from(l < 0.0) != t) {
            flags[i] = true;
            if first_error.is_none() {
                first_error = Some(i);
            }
        }
        t
    });
    if view.mirrored {
        flags.reverse();
        first_error = first_error.map(|i| code.len() - 1 - i);
    }
    Ok(GenieReport { flags, first_error })
}

/// Syndrome decoding of a Bernoulli(`p`) source: finds the low-weight `ẑ`
/// whose transform matches `syndrome` on the frozen set.
pub fn sc_source_decode(code: &CodeSpec, p: f64, syndrome: &[u8]) -> Result<BitBlock> {
    if !(p > 0.0 && p < 0.5) {
        return Err(invalid(format!("source parameter {p} outside (0, 0.5)")));
    }
    let with_syndrome = code.with_frozen_values(syndrome.to_vec())?;
    let obs = SoftBlock::from_llrs(&vec![bsc_llr(p); code.len()])?;
    let out = sc_decode(&with_syndrome, &obs)?;
    Ok(with_syndrome.codeword_of(&out.u))
}

/// Quantization with a dual-order code: SC over the test-channel evidence.
/// The reconstruction is `code.codeword_of(&out.u)`.
pub fn sc_quantize_dual(code: &CodeSpec, evidence: &SoftBlock) -> Result<ScOutput> {
    if code.order() != DecodingOrder::Dual {
        return Err(invalid("quantization expects a dual-order code"));
    }
    sc_decode(code, evidence)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{channel_sample, stream_rng, ChannelParam, Observation};
    use crate::construction::{construct_arikan, ConstructionOptions, RuleTag};
    use rand::Rng;

    #[test]
    fn boxplus_matches_tanh_rule() {
        for &(a, b) in &[(1.0, 2.0), (-0.5, 3.0), (4.0, -4.0), (0.1, 0.2), (-7.0, -1.5)] {
            let exact = 2.0 * ((a / 2.0f64).tanh() * (b / 2.0f64).tanh()).atanh();
            assert!((boxplus(a, b) - exact).abs() < 1e-12, "{a} {b}");
        }
        assert_eq!(boxplus(f64::INFINITY, -2.0), -2.0);
        assert_eq!(boxplus(f64::NEG_INFINITY, f64::NEG_INFINITY), f64::INFINITY);
        assert_eq!(boxplus(0.0, 5.0), 0.0);
        assert!(boxplus(60.0, 50.0) > 49.9);
    }

    #[test]
    fn decoding_order_is_bit_reversed() {
        let code = CodeSpec::from_information_set(3, &[7], RuleTag::Explicit).unwrap();
        assert_eq!(decoding_order(&code), vec![0, 4, 2, 6, 1, 5, 3, 7]);
        assert_eq!(decoding_order(&code.dual()), vec![7, 3, 5, 1, 6, 2, 4, 0]);
    }

    #[test]
    fn noiseless_decoding_recovers_message() {
        let bec = ChannelParam::bec(0.3).unwrap();
        let code = construct_arikan(&bec, 7, 0.5, &ConstructionOptions::default()).unwrap();
        let mut rng = stream_rng(3, 0);
        for _ in 0..20 {
            let info: Vec<u8> = (0..code.information_len()).map(|_| rng.random_range(0..2u8)).collect();
            let x = code.encode(&info).unwrap();
            let out = sc_decode(&code, &SoftBlock::noiseless(&x)).unwrap();
            assert_eq!(code.extract(&out.u), info);
            assert_eq!(out.ties, 0);
        }
    }

    #[test]
    fn dual_code_decodes_noiseless() {
        let code = CodeSpec::from_information_set(4, &[3, 5, 6, 7, 9, 10, 11, 12, 13, 14, 15], RuleTag::Explicit)
            .unwrap()
            .dual();
        let info: Vec<u8> = (0..code.information_len()).map(|i| (i % 2) as u8).collect();
        let x = code.encode(&info).unwrap();
        let out = sc_decode(&code, &SoftBlock::noiseless(&x)).unwrap();
        assert_eq!(code.extract(&out.u), info);
    }

    #[test]
    fn all_erased_block_ties_everywhere() {
        let code = CodeSpec::from_information_set(3, &[3, 5, 6, 7], RuleTag::Explicit).unwrap();
        let obs = SoftBlock::new(vec![Observation::Erasure; 8]).unwrap();
        let out = sc_decode(&code, &obs).unwrap();
        assert_eq!(out.ties, 4);
        assert_eq!(out.u.weight(), 0);
    }

    #[test]
    fn genie_with_truth_matches_plain_decoder_when_no_errors() {
        let bsc = ChannelParam::bsc(0.02).unwrap();
        let code = construct_arikan(&bsc, 6, 0.3, &ConstructionOptions { trials: 2000, seed: 1 }).unwrap();
        let mut rng = stream_rng(11, 0);
        let zero = BitBlock::zeros(6).unwrap();
        for _ in 0..50 {
            let obs = channel_sample(&bsc, &zero, &mut rng);
            let genie = sc_decode_genie(&code, &obs, &zero).unwrap();
            let out = sc_decode(&code, &obs).unwrap();
            if genie.first_error.is_none() {
                assert_eq!(out.u, zero);
            } else {
                assert!(out.ties > 0 || out.u != zero);
            }
        }
    }

    #[test]
    fn source_decoder_output_matches_syndrome() {
        let bsc = ChannelParam::bsc(0.11).unwrap();
        let code = construct_arikan(&bsc, 8, 0.4, &ConstructionOptions { trials: 2000, seed: 2 }).unwrap();
        let syndrome: Vec<u8> = (0..code.frozen().len()).map(|i| (i % 3 == 0) as u8).collect();
        let z = sc_source_decode(&code, 0.11, &syndrome).unwrap();
        let u = crate::transform::polar_transform(&z);
        let got: Vec<u8> = code.frozen().iter().map(|&f| u.get(f)).collect();
        assert_eq!(got, syndrome);
    }

    #[test]
    fn quantizer_requires_dual_order() {
        let code = CodeSpec::from_information_set(2, &[3], RuleTag::Explicit).unwrap();
        let ev = SoftBlock::from_llrs(&[1.0; 4]).unwrap();
        assert!(sc_quantize_dual(&code, &ev).is_err());
        assert!(sc_quantize_dual(&code.dual(), &ev).is_ok());
    }
}
