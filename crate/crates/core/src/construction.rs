//! Code construction: frozen-set selection by the Arıkan rule (exact
//! erasure recursion on the BEC, Monte Carlo genie-aided SC elsewhere) or by
//! the RM rule (largest row weight), BEC erasure-probability profiles for the
//! primal and dual orders, dual codes and minimum distance.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{channel_sample, derive_seed, stream_rng, ChannelKind, ChannelParam};
use crate::error::{invalid, PolarError, Result};
use crate::sc::ScWorkspace;
use crate::transform::{check_exponent, dual_transform, polar_transform, BitBlock};

/// Seed used when callers do not pick one.
pub const DEFAULT_SEED: u64 = 0x5EED_0F_C0DE;

/// How the frozen set was chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleTag {
    Arikan,
    Rm,
    Explicit,
}

impl RuleTag {
    pub fn name(self) -> &'static str {
        match self {
            RuleTag::Arikan => "arikan",
            RuleTag::Rm => "rm",
            RuleTag::Explicit => "explicit",
        }
    }
}

/// SC traversal order attached to a code.
///
/// `Standard` codes have codewords `u·G2^⊗n` and are decoded in the
/// bit-reversed order `π(0), …, π(N−1)`. `Dual` codes have codewords
/// `u·(G2^⊗n)^T` (the index-reversed graph) and are decoded in the reverse
/// order `π(N−1), …, π(0)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecodingOrder {
    #[default]
    Standard,
    Dual,
}

impl DecodingOrder {
    pub fn flipped(self) -> Self {
        match self {
            DecodingOrder::Standard => DecodingOrder::Dual,
            DecodingOrder::Dual => DecodingOrder::Standard,
        }
    }
}

/// One polar (or RM) code: block exponent, frozen set and frozen values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeSpec {
    n: u32,
    frozen: Vec<usize>,
    frozen_values: Vec<u8>,
    rule: RuleTag,
    order: DecodingOrder,
}

#[derive(Serialize, Deserialize)]
struct CodeSpecJson {
    n: u32,
    frozen: Vec<usize>,
    frozen_values: Vec<u8>,
    rule: RuleTag,
    #[serde(default, skip_serializing_if = "is_standard")]
    order: DecodingOrder,
}

fn is_standard(order: &DecodingOrder) -> bool {
    *order == DecodingOrder::Standard
}

impl CodeSpec {
    /// Builds a code from its frozen set. `frozen_values` defaults to all zero.
    pub fn new(
        n: u32,
        mut frozen: Vec<usize>,
        frozen_values: Option<Vec<u8>>,
        rule: RuleTag,
        order: DecodingOrder,
    ) -> Result<Self> {
        check_exponent(n)?;
        let len = 1usize << n;
        let values = match frozen_values {
            Some(values) => {
                if values.len() != frozen.len() {
                    return Err(PolarError::LengthMismatch {
                        expected: frozen.len(),
                        actual: values.len(),
                    });
                }
                if values.iter().any(|&v| v > 1) {
                    return Err(invalid("frozen values must be 0 or 1"));
                }
                let mut pairs: Vec<(usize, u8)> = frozen.iter().copied().zip(values).collect();
                pairs.sort_unstable();
                frozen = pairs.iter().map(|p| p.0).collect();
                pairs.into_iter().map(|p| p.1).collect()
            }
            None => {
                frozen.sort_unstable();
                vec![0; frozen.len()]
            }
        };
        if frozen.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid("frozen set contains duplicates"));
        }
        if let Some(&last) = frozen.last() {
            if last >= len {
                return Err(invalid(format!("frozen index {last} outside [0, {len})")));
            }
        }
        Ok(Self {
            n,
            frozen,
            frozen_values: values,
            rule,
            order,
        })
    }

    /// Builds a standard-order code from its information set.
    pub fn from_information_set(n: u32, information: &[usize], rule: RuleTag) -> Result<Self> {
        check_exponent(n)?;
        let len = 1usize << n;
        let mut is_info = vec![false; len];
        for &i in information {
            if i >= len {
                return Err(invalid(format!("information index {i} outside [0, {len})")));
            }
            if is_info[i] {
                return Err(invalid("information set contains duplicates"));
            }
            is_info[i] = true;
        }
        let frozen = (0..len).filter(|&i| !is_info[i]).collect();
        Self::new(n, frozen, None, rule, DecodingOrder::Standard)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        1 << self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Frozen indices, ascending.
    pub fn frozen(&self) -> &[usize] {
        &self.frozen
    }

    /// Values of the frozen positions, aligned with [`frozen`](Self::frozen).
    pub fn frozen_values(&self) -> &[u8] {
        &self.frozen_values
    }

    /// Information indices, ascending.
    pub fn information(&self) -> Vec<usize> {
        let mask = self.frozen_mask();
        (0..self.len()).filter(|&i| !mask[i]).collect()
    }

    pub fn information_len(&self) -> usize {
        self.len() - self.frozen.len()
    }

    pub fn rate(&self) -> f64 {
        self.information_len() as f64 / self.len() as f64
    }

    pub fn rule(&self) -> RuleTag {
        self.rule
    }

    pub fn order(&self) -> DecodingOrder {
        self.order
    }

    pub fn frozen_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.len()];
        for &f in &self.frozen {
            mask[f] = true;
        }
        mask
    }

    /// Per-index frozen value (0 at information positions).
    pub fn frozen_value_table(&self) -> Vec<u8> {
        let mut table = vec![0; self.len()];
        for (&f, &v) in self.frozen.iter().zip(&self.frozen_values) {
            table[f] = v;
        }
        table
    }

    /// Same frozen set with new frozen values (aligned with ascending indices).
    pub fn with_frozen_values(&self, values: Vec<u8>) -> Result<Self> {
        Self::new(self.n, self.frozen.clone(), Some(values), self.rule, self.order)
    }

    /// The input vector carrying `info` on the information positions.
    pub fn embed(&self, info: &[u8]) -> Result<BitBlock> {
        if info.len() != self.information_len() {
            return Err(PolarError::LengthMismatch {
                expected: self.information_len(),
                actual: info.len(),
            });
        }
        let mut u = BitBlock::zeros(self.n)?;
        for (&f, &v) in self.frozen.iter().zip(&self.frozen_values) {
            u.set(f, v);
        }
        for (i, &b) in self.information().iter().zip(info) {
            if b > 1 {
                return Err(invalid("information bits must be 0 or 1"));
            }
            u.set(*i, b);
        }
        Ok(u)
    }

    /// Information bits of an input vector.
    pub fn extract(&self, u: &BitBlock) -> Vec<u8> {
        self.information().iter().map(|&i| u.get(i)).collect()
    }

    /// Codeword of the input vector `u` under this code's orientation.
    pub fn codeword_of(&self, u: &BitBlock) -> BitBlock {
        match self.order {
            DecodingOrder::Standard => polar_transform(u),
            DecodingOrder::Dual => dual_transform(u),
        }
    }

    /// Codeword carrying `info` on the information positions.
    pub fn encode(&self, info: &[u8]) -> Result<BitBlock> {
        Ok(self.codeword_of(&self.embed(info)?))
    }

    /// The dual code: frozen and information roles swapped, traversal order
    /// reversed. Its codebook `{w·(G2^⊗n)^T : w_F' = 0}` is the orthogonal
    /// complement of a zero-frozen code. Frozen values of the result are zero.
    pub fn dual(&self) -> Self {
        Self {
            n: self.n,
            frozen: self.information(),
            frozen_values: vec![0; self.information_len()],
            rule: self.rule,
            order: self.order.flipped(),
        }
    }

    /// The same code with positions reversed, expressed in the other
    /// orientation: index `i` maps to `N − 1 − i` on both sides.
    pub fn mirrored(&self) -> Self {
        let last = self.len() - 1;
        let mut pairs: Vec<(usize, u8)> = self
            .frozen
            .iter()
            .zip(&self.frozen_values)
            .map(|(&f, &v)| (last - f, v))
            .collect();
        pairs.sort_unstable();
        Self {
            n: self.n,
            frozen: pairs.iter().map(|p| p.0).collect(),
            frozen_values: pairs.iter().map(|p| p.1).collect(),
            rule: self.rule,
            order: self.order.flipped(),
        }
    }

    pub fn to_json(&self) -> String {
        let doc = CodeSpecJson {
            n: self.n,
            frozen: self.frozen.clone(),
            frozen_values: self.frozen_values.clone(),
            rule: self.rule,
            order: self.order,
        };
        serde_json::to_string_pretty(&doc).expect("code spec serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: CodeSpecJson =
            serde_json::from_str(text).map_err(|e| invalid(format!("code spec JSON: {e}")))?;
        Self::new(doc.n, doc.frozen, Some(doc.frozen_values), doc.rule, doc.order)
    }
}

/// Which erasure recursion a profile follows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orientation {
    Primal,
    Dual,
}

/// Per-index erasure probabilities of SC decoding over a BEC.
#[derive(Clone, Debug, PartialEq)]
pub struct ZProfile {
    values: Vec<f64>,
    init: f64,
    orientation: Orientation,
}

impl ZProfile {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn init(&self) -> f64 {
        self.init
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// Sum over a set of indices.
    pub fn sum_over(&self, indices: &[usize]) -> f64 {
        indices.iter().map(|&i| self.values[i]).sum()
    }

    /// Maximum over a set of indices.
    pub fn max_over(&self, indices: &[usize]) -> f64 {
        indices.iter().map(|&i| self.values[i]).fold(0.0, f64::max)
    }
}

/// Runs the erasure recursion for every index, consuming bit `b_{k−1}` of the
/// index at step `k`.
///
/// Primal: `Z ← Z²` when the bit is 1, `Z ← 1 − (1 − Z)²` when it is 0.
/// Dual: the same with the bit roles exchanged. Seeded with `init`, the primal
/// profile is the per-bit erasure probability of standard-order SC over
/// BEC(`init`), and the dual profile that of dual-order SC over BEC(`init`).
pub fn z_profile_bec(init: f64, n: u32, orientation: Orientation) -> Result<ZProfile> {
    if !(0.0..=1.0).contains(&init) {
        return Err(invalid(format!("erasure probability {init} outside [0, 1]")));
    }
    check_exponent(n)?;
    let squared_on = match orientation {
        Orientation::Primal => 1,
        Orientation::Dual => 0,
    };
    let values = (0..1usize << n)
        .map(|i| {
            // Carry 1 − Z as well; the smaller of the pair comes from products
            // and the larger is its complement, so Z + (1 − Z) stays exact.
            let (mut z, mut c) = (init, 1.0 - init);
            for k in 0..n {
                if (i >> k) & 1 == squared_on {
                    (z, c) = (z * z, c * (1.0 + z));
                } else {
                    (z, c) = (z * (1.0 + c), c * c);
                }
                if z < c {
                    c = 1.0 - z;
                } else {
                    z = 1.0 - c;
                }
            }
            z
        })
        .collect();
    Ok(ZProfile {
        values,
        init,
        orientation,
    })
}

/// Monte Carlo budget for genie-aided construction on BSC/BAWGN.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConstructionOptions {
    pub trials: u64,
    pub seed: u64,
}

impl Default for ConstructionOptions {
    fn default() -> Self {
        Self {
            trials: 100_000,
            seed: DEFAULT_SEED,
        }
    }
}

/// Estimated per-bit error probability of genie-aided SC: all-zero input,
/// previous decisions forced correct, ties counted as errors.
pub fn genie_error_profile(channel: &ChannelParam, n: u32, opts: &ConstructionOptions) -> Result<Vec<f64>> {
    check_exponent(n)?;
    if opts.trials == 0 {
        return Err(invalid("construction needs at least one trial"));
    }
    let len = 1usize << n;
    let seed = derive_seed(opts.seed, &[0xC0457, n as u64, channel.value().to_bits()]);
    let zero = BitBlock::zeros(n)?;
    let counts = (0..opts.trials)
        .into_par_iter()
        .fold(
            || (vec![0u64; len], ScWorkspace::new(n)),
            |(mut counts, mut ws), trial| {
                let mut rng = stream_rng(seed, trial);
                let obs = channel_sample(channel, &zero, &mut rng);
                ws.genie_count_zero(&obs.llrs(), &mut counts);
                (counts, ws)
            },
        )
        .map(|(counts, _)| counts)
        .reduce(
            || vec![0u64; len],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    Ok(counts.into_iter().map(|c| c as f64 / opts.trials as f64).collect())
}

/// Per-bit unreliability used by the Arıkan rule: the exact erasure
/// probability on the BEC, a genie-aided Monte Carlo estimate otherwise.
pub fn reliability_scores(channel: &ChannelParam, n: u32, opts: &ConstructionOptions) -> Result<Vec<f64>> {
    match channel.kind() {
        ChannelKind::Bec => Ok(z_profile_bec(channel.value(), n, Orientation::Primal)?.values),
        ChannelKind::Bsc | ChannelKind::Bawgn => genie_error_profile(channel, n, opts),
    }
}

/// The `k` indices with the lowest score; equal scores prefer the higher index.
pub fn select_information_set(scores: &[f64], k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(b.cmp(&a)));
    let mut chosen: Vec<usize> = order.into_iter().take(k).collect();
    chosen.sort_unstable();
    chosen
}

/// `⌊2^n · rate⌋`, robust to binary rounding of decimal rates.
pub fn information_size(n: u32, rate: f64) -> usize {
    ((1usize << n) as f64 * rate + 1e-9).floor() as usize
}

fn check_rate(rate: f64) -> Result<()> {
    if rate > 0.0 && rate <= 1.0 {
        Ok(())
    } else {
        Err(invalid(format!("rate {rate} outside (0, 1]")))
    }
}

/// Arıkan-rule code from precomputed reliability scores.
pub fn construct_from_scores(n: u32, scores: &[f64], rate: f64) -> Result<CodeSpec> {
    check_rate(rate)?;
    if scores.len() != 1usize << n {
        return Err(PolarError::LengthMismatch {
            expected: 1 << n,
            actual: scores.len(),
        });
    }
    let info = select_information_set(scores, information_size(n, rate));
    CodeSpec::from_information_set(n, &info, RuleTag::Arikan)
}

/// Arıkan-rule code: the `⌊2^n·rate⌋` most reliable bit channels carry information.
pub fn construct_arikan(channel: &ChannelParam, n: u32, rate: f64, opts: &ConstructionOptions) -> Result<CodeSpec> {
    check_rate(rate)?;
    let scores = reliability_scores(channel, n, opts)?;
    construct_from_scores(n, &scores, rate)
}

/// Largest Arıkan-rule code whose summed per-bit error estimate stays within
/// `target`; bits are admitted in order of reliability.
pub fn construct_for_target(n: u32, scores: &[f64], target: f64) -> Result<CodeSpec> {
    let order = select_information_set(scores, scores.len());
    let mut ranked = order;
    ranked.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(b.cmp(&a)));
    let mut total = 0.0;
    let mut info = Vec::new();
    for i in ranked {
        if total + scores[i] > target {
            break;
        }
        total += scores[i];
        info.push(i);
    }
    info.sort_unstable();
    CodeSpec::from_information_set(n, &info, RuleTag::Arikan)
}

/// RM-rule code: information indices of largest weight, ties to the larger index.
pub fn construct_rm(n: u32, rate: f64) -> Result<CodeSpec> {
    check_rate(rate)?;
    check_exponent(n)?;
    let mut order: Vec<usize> = (0..1usize << n).collect();
    order.sort_by(|&a, &b| b.count_ones().cmp(&a.count_ones()).then(b.cmp(&a)));
    let mut info: Vec<usize> = order.into_iter().take(information_size(n, rate)).collect();
    info.sort_unstable();
    CodeSpec::from_information_set(n, &info, RuleTag::Rm)
}

/// RM(n, r): information set `{i : wt(i) ≥ n − r}`.
pub fn rm_code(n: u32, r: u32) -> Result<CodeSpec> {
    check_exponent(n)?;
    if r > n {
        return Err(invalid(format!("RM order {r} exceeds n = {n}")));
    }
    let info: Vec<usize> = (0..1usize << n).filter(|i| i.count_ones() >= n - r).collect();
    CodeSpec::from_information_set(n, &info, RuleTag::Rm)
}

/// Minimum distance `min_{i∈I} 2^wt(i)` (for dual-oriented codes the rows are
/// columns of `G2^⊗n`, of weight `2^(n − wt(i))`).
pub fn min_distance(code: &CodeSpec) -> Result<usize> {
    let info = code.information();
    if info.is_empty() {
        return Err(invalid("minimum distance of a code without information bits"));
    }
    let n = code.n();
    let exponent = |i: usize| match code.order() {
        DecodingOrder::Standard => i.count_ones(),
        DecodingOrder::Dual => n - i.count_ones(),
    };
    Ok(info.into_iter().map(|i| 1usize << exponent(i)).min().unwrap())
}

/// Checks `d_min(RM-rule code) ≤ 2^⌈n/2⌉`, which holds unconditionally for rates above ½.
pub fn min_distance_bound_check(n: u32, rate: f64) -> Result<bool> {
    let code = construct_rm(n, rate)?;
    Ok(min_distance(&code)? <= 1usize << n.div_ceil(2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z_profile_small_values() {
        let z = z_profile_bec(0.5, 2, Orientation::Primal).unwrap();
        let mut v = z.values().to_vec();
        v.sort_by(f64::total_cmp);
        let expected = [0.0625, 0.4375, 0.5625, 0.9375];
        for (a, b) in v.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(z.values()[3], 0.0625);
        let zero = z_profile_bec(0.0, 5, Orientation::Primal).unwrap();
        assert!(zero.values().iter().all(|&v| v == 0.0));
        assert!(z_profile_bec(1.2, 2, Orientation::Primal).is_err());
    }

    #[test]
    fn duality_identity() {
        for n in [1, 4, 8, 12, 16] {
            for k in 1..=9 {
                let eps = k as f64 / 10.0;
                let primal = z_profile_bec(1.0 - eps, n, Orientation::Primal).unwrap();
                let dual = z_profile_bec(eps, n, Orientation::Dual).unwrap();
                for (a, b) in primal.values().iter().zip(dual.values()) {
                    assert!((a + b - 1.0).abs() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn arikan_bec_examples() {
        let bec = ChannelParam::bec(0.5).unwrap();
        let opts = ConstructionOptions::default();
        let code = construct_arikan(&bec, 2, 0.25, &opts).unwrap();
        assert_eq!(code.information(), vec![3]);
        let full = construct_arikan(&bec, 4, 1.0, &opts).unwrap();
        assert!(full.frozen().is_empty());
        assert!(construct_arikan(&bec, 4, 0.0, &opts).is_err());
        assert!(construct_arikan(&bec, 4, 1.5, &opts).is_err());
    }

    #[test]
    fn rm_rule_examples() {
        assert_eq!(construct_rm(3, 0.5).unwrap().information(), vec![3, 5, 6, 7]);
        assert_eq!(construct_rm(3, 0.5).unwrap().frozen(), &[0, 1, 2, 4]);
        assert_eq!(construct_rm(2, 0.25).unwrap().information(), vec![3]);
        // n = 4, rate ½: weight ≥ 3 rows (1 + 4) plus the three largest weight-2 indices.
        assert_eq!(
            construct_rm(4, 0.5).unwrap().information(),
            vec![7, 9, 10, 11, 12, 13, 14, 15]
        );
        assert_eq!(rm_code(3, 1).unwrap().information(), vec![3, 5, 6, 7]);
    }

    #[test]
    fn rm_rule_reproduces_rm_codes() {
        for n in 1..=8u32 {
            for r in 0..=n {
                let k: usize = (0..=r).map(|i| binomial(n, i)).sum();
                let rate = k as f64 / (1usize << n) as f64;
                assert_eq!(construct_rm(n, rate).unwrap().frozen(), rm_code(n, r).unwrap().frozen());
                assert_eq!(min_distance(&rm_code(n, r).unwrap()).unwrap(), 1 << (n - r));
            }
        }
    }

    fn binomial(n: u32, k: u32) -> usize {
        (0..k).fold(1usize, |acc, i| acc * (n - i) as usize / (i + 1) as usize)
    }

    #[test]
    fn min_distance_examples() {
        assert_eq!(min_distance(&rm_code(3, 1).unwrap()).unwrap(), 4);
        let rep = CodeSpec::from_information_set(5, &[31], RuleTag::Explicit).unwrap();
        assert_eq!(min_distance(&rep).unwrap(), 32);
        let empty = CodeSpec::from_information_set(3, &[], RuleTag::Explicit).unwrap();
        assert!(min_distance(&empty).is_err());
    }

    #[test]
    fn bound_check_examples() {
        assert!(min_distance_bound_check(10, 0.6).unwrap());
        assert!(min_distance_bound_check(4, 0.75).unwrap());
        assert!(min_distance_bound_check(2, 1.0).unwrap());
        for n in 1..=14 {
            for rate in [0.51, 0.6, 0.75, 0.9, 1.0] {
                assert!(min_distance_bound_check(n, rate).unwrap(), "n={n} rate={rate}");
            }
        }
    }

    #[test]
    fn dual_code_properties() {
        let bec = ChannelParam::bec(0.3).unwrap();
        let code = construct_arikan(&bec, 6, 0.4, &ConstructionOptions::default()).unwrap();
        let dual = code.dual();
        assert_eq!(dual.dual(), code);
        assert!((dual.rate() - (1.0 - code.rate())).abs() < 1e-15);
        assert_eq!(dual.frozen(), code.information().as_slice());
        assert_eq!(dual.order(), DecodingOrder::Dual);
        assert_eq!(code.mirrored().mirrored(), code);
    }

    #[test]
    fn dual_codebook_is_orthogonal_complement() {
        let code = CodeSpec::from_information_set(3, &[3, 5, 6, 7], RuleTag::Explicit).unwrap();
        let dual = code.dual();
        let k = code.information_len();
        let kd = dual.information_len();
        for a in 0..1u32 << k {
            let info: Vec<u8> = (0..k).map(|b| ((a >> b) & 1) as u8).collect();
            let c = code.encode(&info).unwrap();
            for d in 0..1u32 << kd {
                let info_d: Vec<u8> = (0..kd).map(|b| ((d >> b) & 1) as u8).collect();
                let w = dual.encode(&info_d).unwrap();
                let dot = c.iter().zip(w.iter()).map(|(x, y)| x & y).sum::<u8>() % 2;
                assert_eq!(dot, 0);
            }
        }
    }

    #[test]
    fn mirrored_code_reverses_codewords() {
        let code = CodeSpec::from_information_set(4, &[7, 11, 13, 14, 15], RuleTag::Explicit).unwrap();
        let mirror = code.mirrored();
        for a in 0..32u32 {
            let info: Vec<u8> = (0..5).map(|b| ((a >> b) & 1) as u8).collect();
            let u = code.embed(&info).unwrap();
            assert_eq!(mirror.codeword_of(&u.mirrored()), code.codeword_of(&u).mirrored());
        }
    }

    #[test]
    fn json_round_trip_and_format() {
        let code = construct_rm(3, 0.5).unwrap();
        let text = code.to_json();
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["n"], 3);
        assert_eq!(value["frozen"], serde_json::json!([0, 1, 2, 4]));
        assert_eq!(value["frozen_values"], serde_json::json!([0, 0, 0, 0]));
        assert_eq!(value["rule"], "rm");
        assert!(value.get("order").is_none());
        assert_eq!(CodeSpec::from_json(&text).unwrap(), code);
        let dual = code.dual();
        assert_eq!(CodeSpec::from_json(&dual.to_json()).unwrap(), dual);
        assert!(CodeSpec::from_json(r#"{"n":2,"frozen":[4],"frozen_values":[0],"rule":"rm"}"#).is_err());
    }

    #[test]
    fn select_prefers_higher_index_on_ties() {
        assert_eq!(select_information_set(&[0.1, 0.1, 0.2, 0.1], 2), vec![1, 3]);
    }

    #[test]
    fn genie_profile_is_deterministic() {
        let bsc = ChannelParam::bsc(0.11).unwrap();
        let opts = ConstructionOptions { trials: 500, seed: 7 };
        let a = genie_error_profile(&bsc, 6, &opts).unwrap();
        let b = genie_error_profile(&bsc, 6, &opts).unwrap();
        assert_eq!(a, b);
        // Index 0 is the worst bit channel, index N−1 the best.
        assert!(a[0] > a[63]);
    }
}
