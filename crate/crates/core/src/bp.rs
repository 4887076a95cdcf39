//! Belief propagation over the n-section trellis of the polar transform.
//!
//! Column 0 of the trellis holds the codeword `x`, column `n` the input `u`.
//! Section `l` sits between columns `l` and `l + 1` and is made of the `N/2`
//! Z subgraphs pairing `j` with `k = j | 2^b`, where `b` is the section's
//! butterfly bit; the u-side values `A` and x-side values `B` satisfy
//! `B_j = A_j ⊕ A_k`, `B_k = A_k`. Butterfly stages commute, so every ordering
//! of the bits is a valid trellis for the same code.

use crate::channel::SoftBlock;
use crate::construction::{CodeSpec, DecodingOrder};
use crate::error::{invalid, PolarError, Result};
use crate::transform::{words_for, BitBlock, LOW_LANES};

/// Butterfly bit used by each section, listed from the x side.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SectionPermutation {
    layers: Vec<u32>,
}

impl SectionPermutation {
    pub fn new(layers: Vec<u32>) -> Result<Self> {
        let n = layers.len();
        if n == 0 {
            return Err(invalid("a trellis needs at least one section"));
        }
        let mut seen = vec![false; n];
        for &b in &layers {
            if b as usize >= n || seen[b as usize] {
                return Err(invalid(format!("{layers:?} is not a permutation of 0..{n}")));
            }
            seen[b as usize] = true;
        }
        Ok(Self { layers })
    }

    /// The trellis whose x-side section uses bit 0; it matches the SC recursion.
    pub fn identity(n: u32) -> Result<Self> {
        Self::new((0..n).collect())
    }

    pub fn n(&self) -> u32 {
        self.layers.len() as u32
    }

    pub fn layers(&self) -> &[u32] {
        &self.layers
    }
}

/// The `n` cyclic rotations of `(0, …, n−1)`, the identity first.
pub fn cyclic_trellises(n: u32) -> Result<Vec<SectionPermutation>> {
    if n == 0 {
        return Err(invalid("cyclic trellises need n ≥ 1"));
    }
    (0..n)
        .map(|r| SectionPermutation::new((0..n).map(|l| (l + r) % n).collect()))
        .collect()
}

/// A trellis as a linear map and as a set of Z subgraphs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrellisGraph {
    perm: SectionPermutation,
}

impl TrellisGraph {
    pub fn new(perm: SectionPermutation) -> Self {
        Self { perm }
    }

    pub fn n(&self) -> u32 {
        self.perm.n()
    }

    pub fn permutation(&self) -> &SectionPermutation {
        &self.perm
    }

    /// Butterfly bit of section `l`.
    pub fn section_bit(&self, l: usize) -> u32 {
        self.perm.layers[l]
    }

    /// The Z subgraphs `(j, k)` of section `l`, `j` ascending.
    pub fn z_subgraphs(&self, l: usize) -> Vec<(usize, usize)> {
        let s = 1usize << self.section_bit(l);
        (0..1usize << self.n()).filter(|j| j & s == 0).map(|j| (j, j | s)).collect()
    }

    /// Pushes `u` from column `n` to column 0.
    pub fn apply(&self, u: &BitBlock) -> Result<BitBlock> {
        if u.n() != self.n() {
            return Err(PolarError::LengthMismatch {
                expected: 1 << self.n(),
                actual: u.len(),
            });
        }
        let mut x = u.clone();
        for l in (0..self.n() as usize).rev() {
            for (j, k) in self.z_subgraphs(l) {
                let v = x.get(j) ^ x.get(k);
                x.set(j, v);
            }
        }
        Ok(x)
    }
}

/// Iteration limits for BP.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BpOptions {
    /// Round limit in LLR mode (one round = one double sweep of every trellis).
    pub max_rounds: usize,
    /// LLR mode stops once the hard decisions repeat this many rounds in a row.
    pub stable_rounds: usize,
}

impl Default for BpOptions {
    fn default() -> Self {
        Self {
            max_rounds: 60,
            stable_rounds: 2,
        }
    }
}

/// Hard decisions of a BP run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BpOutput {
    pub u: BitBlock,
    pub rounds: usize,
    /// Information positions left without evidence (unknown on the BEC, zero LLR otherwise).
    pub unresolved: usize,
}

/// BP decoding on one or more trellises. Erasure-type observations run the
/// exact erasure message passing to its fixed point; anything else runs LLR
/// message passing for at most `opts.max_rounds` rounds. Frozen positions act
/// as permanent priors.
pub fn bp_decode(code: &CodeSpec, obs: &SoftBlock, trellises: &[SectionPermutation], opts: &BpOptions) -> Result<BpOutput> {
    if obs.len() != code.len() {
        return Err(PolarError::LengthMismatch {
            expected: code.len(),
            actual: obs.len(),
        });
    }
    if trellises.is_empty() {
        return Err(invalid("BP needs at least one trellis"));
    }
    if let Some(t) = trellises.iter().find(|t| t.n() != code.n()) {
        return Err(invalid(format!("trellis with {} sections for a code with n = {}", t.n(), code.n())));
    }
    if code.order() == DecodingOrder::Dual {
        let mut out = bp_decode(&code.mirrored(), &obs.mirrored(), trellises, opts)?;
        out.u = out.u.mirrored();
        return Ok(out);
    }
    if obs.is_erasure_type() {
        Ok(bec_decode(code, obs, trellises))
    } else {
        llr_decode(code, obs, trellises, opts)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct Tern {
    known: u64,
    value: u64,
}

#[inline]
fn t_check(a: Tern, b: Tern) -> Tern {
    let known = a.known & b.known;
    Tern {
        known,
        value: (a.value ^ b.value) & known,
    }
}

#[inline]
fn t_var(a: Tern, b: Tern) -> Tern {
    Tern {
        known: a.known | b.known,
        value: (a.value & a.known) | (b.value & b.known),
    }
}

#[inline]
fn t_shr(a: Tern, s: u32) -> Tern {
    Tern {
        known: a.known >> s,
        value: a.value >> s,
    }
}

/// One directional update of a section on packed erasure messages:
/// `dst_j = a_j ⊞ (a_k + b_k)`, `dst_k = (a_j ⊞ b_j) + a_k`.
fn tern_section(bit: u32, a: &[Tern], b: &[Tern], dst: &mut [Tern]) -> bool {
    let mut changed = false;
    if bit < 6 {
        let s = 1u32 << bit;
        let m = LOW_LANES[bit as usize];
        for w in 0..dst.len() {
            let (aj, ak, bj, bk) = (a[w], t_shr(a[w], s), b[w], t_shr(b[w], s));
            let dj = t_check(aj, t_var(ak, bk));
            let dk = t_var(t_check(aj, bj), ak);
            let out = Tern {
                known: (dj.known & m) | ((dk.known & m) << s),
                value: (dj.value & m) | ((dk.value & m) << s),
            };
            changed |= out != dst[w];
            dst[w] = out;
        }
    } else {
        let d = 1usize << (bit - 6);
        for base in (0..dst.len()).step_by(2 * d) {
            for j in base..base + d {
                let k = j + d;
                let dj = t_check(a[j], t_var(a[k], b[k]));
                let dk = t_var(t_check(a[j], b[j]), a[k]);
                changed |= dj != dst[j] || dk != dst[k];
                dst[j] = dj;
                dst[k] = dk;
            }
        }
    }
    changed
}

struct TernTrellis {
    layers: Vec<u32>,
    from_x: Vec<Vec<Tern>>,
    from_u: Vec<Vec<Tern>>,
}

impl TernTrellis {
    fn new(perm: &SectionPermutation, words: usize) -> Self {
        let cols = perm.layers.len() + 1;
        Self {
            layers: perm.layers.clone(),
            from_x: vec![vec![Tern::default(); words]; cols],
            from_u: vec![vec![Tern::default(); words]; cols],
        }
    }

    fn round(&mut self) -> bool {
        let n = self.layers.len();
        let mut changed = false;
        for l in 0..n {
            let (lo, hi) = self.from_x.split_at_mut(l + 1);
            changed |= tern_section(self.layers[l], &lo[l], &self.from_u[l + 1], &mut hi[0]);
        }
        for l in (0..n).rev() {
            let (lo, hi) = self.from_u.split_at_mut(l + 1);
            changed |= tern_section(self.layers[l], &hi[0], &self.from_x[l], &mut lo[l]);
        }
        changed
    }
}

fn pack_known(bits: impl Iterator<Item = Option<u8>>, words: usize) -> Vec<Tern> {
    let mut out = vec![Tern::default(); words];
    for (i, b) in bits.enumerate() {
        if let Some(v) = b {
            out[i / 64].known |= 1 << (i % 64);
            out[i / 64].value |= (v as u64) << (i % 64);
        }
    }
    out
}

fn combine_others(base: &[Tern], ext: &[Vec<Tern>], skip: usize) -> Vec<Tern> {
    let mut out = base.to_vec();
    for (t, e) in ext.iter().enumerate() {
        if t != skip {
            for (o, &m) in out.iter_mut().zip(e) {
                *o = t_var(*o, m);
            }
        }
    }
    out
}

fn bec_decode(code: &CodeSpec, obs: &SoftBlock, trellises: &[SectionPermutation]) -> BpOutput {
    let len = code.len();
    let words = words_for(code.n());
    let channel = pack_known(obs.values().iter().map(|o| o.known_bit()), words);
    let table = code.frozen_value_table();
    let mask = code.frozen_mask();
    let prior = pack_known((0..len).map(|i| mask[i].then_some(table[i])), words);
    let mut states: Vec<TernTrellis> = trellises.iter().map(|p| TernTrellis::new(p, words)).collect();
    let mut ext_x = vec![vec![Tern::default(); words]; states.len()];
    let mut ext_u = vec![vec![Tern::default(); words]; states.len()];
    let n = code.n() as usize;
    let all_known = |ext_u: &[Vec<Tern>]| -> Vec<Tern> { combine_others(&prior, ext_u, usize::MAX) };
    let mut rounds = 0;
    loop {
        rounds += 1;
        let mut changed = false;
        for t in 0..states.len() {
            states[t].from_x[0] = combine_others(&channel, &ext_x, t);
            states[t].from_u[n] = combine_others(&prior, &ext_u, t);
            changed |= states[t].round();
            ext_x[t].clone_from(&states[t].from_u[0]);
            ext_u[t].clone_from(&states[t].from_x[n]);
        }
        let belief = all_known(&ext_u);
        let resolved = (0..len).all(|i| belief[i / 64].known >> (i % 64) & 1 == 1);
        if !changed || resolved {
            break;
        }
    }
    let belief = all_known(&ext_u);
    let mut u = BitBlock::zeros(code.n()).expect("valid exponent");
    let mut unresolved = 0;
    for i in 0..len {
        let w = belief[i / 64];
        if mask[i] {
            u.set(i, table[i]);
        } else if w.known >> (i % 64) & 1 == 1 {
            u.set(i, (w.value >> (i % 64) & 1) as u8);
        } else {
            unresolved += 1;
        }
    }
    BpOutput { u, rounds, unresolved }
}

fn llr_decode(code: &CodeSpec, obs: &SoftBlock, trellises: &[SectionPermutation], opts: &BpOptions) -> Result<BpOutput> {
    if opts.max_rounds == 0 {
        return Err(invalid("BP needs at least one round"));
    }
    let len = code.len();
    let channel = obs.llrs();
    let mask = code.frozen_mask();
    let table = code.frozen_value_table();
    let prior: Vec<f64> = (0..len)
        .map(|i| match (mask[i], table[i]) {
            (false, _) => 0.0,
            (true, 0) => f64::INFINITY,
            (true, _) => f64::NEG_INFINITY,
        })
        .collect();
    let mut states: Vec<reference::ScalarTrellis<f64>> =
        trellises.iter().map(|p| reference::ScalarTrellis::new(p)).collect();
    let mut ext_x = vec![vec![0.0; len]; states.len()];
    let mut ext_u = vec![vec![0.0; len]; states.len()];
    let n = code.n() as usize;
    let decide = |ext_u: &[Vec<f64>]| -> (Vec<u8>, usize) {
        let belief = reference::combine(&prior, ext_u, usize::MAX);
        let mut unresolved = 0;
        let bits = (0..len)
            .map(|i| {
                if mask[i] {
                    table[i]
                } else if belief[i] == 0.0 {
                    unresolved += 1;
                    0
                } else {
                    u8::from(belief[i] < 0.0)
                }
            })
            .collect();
        (bits, unresolved)
    };
    let mut previous: Option<Vec<u8>> = None;
    let mut stable = 0;
    let mut rounds = 0;
    let mut current = (vec![0; len], 0);
    while rounds < opts.max_rounds {
        rounds += 1;
        for t in 0..states.len() {
            states[t].from_x[0] = reference::combine(&channel, &ext_x, t);
            states[t].from_u[n] = reference::combine(&prior, &ext_u, t);
            states[t].sweep_round();
            ext_x[t].clone_from(&states[t].from_u[0]);
            ext_u[t].clone_from(&states[t].from_x[n]);
        }
        current = decide(&ext_u);
        if previous.as_ref() == Some(&current.0) {
            stable += 1;
            if stable >= opts.stable_rounds {
                break;
            }
        } else {
            stable = 0;
        }
        previous = Some(current.0.clone());
    }
    Ok(BpOutput {
        u: BitBlock::from_bits(&current.0)?,
        rounds,
        unresolved: current.1,
    })
}

/// Scalar message passing, generic over the message alphabet, with a sweep
/// and a flooding schedule. Used by the LLR decoder and as a cross-check for
/// the packed erasure decoder.
pub mod reference {
    use super::SectionPermutation;
    use crate::sc::boxplus as llr_check;

    /// A message alphabet with check-node and variable-node rules.
    pub trait Message: Copy + PartialEq + std::fmt::Debug {
        const UNKNOWN: Self;
        fn check(a: Self, b: Self) -> Self;
        fn var(a: Self, b: Self) -> Self;
    }

    impl Message for f64 {
        const UNKNOWN: Self = 0.0;

        fn check(a: Self, b: Self) -> Self {
            llr_check(a, b)
        }

        fn var(a: Self, b: Self) -> Self {
            let v = a + b;
            if v.is_nan() {
                0.0
            } else {
                v
            }
        }
    }

    /// Erasure-channel message.
    #[derive(Clone, Copy, Debug, PartialEq, Eq)]
    pub enum Tri {
        Zero,
        One,
        Unknown,
    }

    impl Tri {
        pub fn from_bit(bit: Option<u8>) -> Self {
            match bit {
                Some(0) => Tri::Zero,
                Some(_) => Tri::One,
                None => Tri::Unknown,
            }
        }

        pub fn bit(self) -> Option<u8> {
            match self {
                Tri::Zero => Some(0),
                Tri::One => Some(1),
                Tri::Unknown => None,
            }
        }
    }

    impl Message for Tri {
        const UNKNOWN: Self = Tri::Unknown;

        fn check(a: Self, b: Self) -> Self {
            match (a.bit(), b.bit()) {
                (Some(x), Some(y)) => Tri::from_bit(Some(x ^ y)),
                _ => Tri::Unknown,
            }
        }

        fn var(a: Self, b: Self) -> Self {
            if a == Tri::Unknown {
                b
            } else {
                a
            }
        }
    }

    /// Order in which section updates are applied.
    #[derive(Clone, Copy, Debug, PartialEq, Eq)]
    pub enum Schedule {
        /// Toward `u` section by section, then back toward `x`.
        Sweep,
        /// Every message recomputed from the previous round's state at once.
        Flooding,
    }

    /// Message state of one trellis: `from_x[c]` arrives at column `c` from
    /// the x side, `from_u[c]` from the u side.
    #[derive(Clone, Debug)]
    pub struct ScalarTrellis<M> {
        layers: Vec<u32>,
        pub from_x: Vec<Vec<M>>,
        pub from_u: Vec<Vec<M>>,
    }

    fn section<M: Message>(bit: u32, a: &[M], b: &[M], dst: &mut [M]) -> bool {
        let s = 1usize << bit;
        let mut changed = false;
        for base in (0..dst.len()).step_by(2 * s) {
            for j in base..base + s {
                let k = j + s;
                let dj = M::check(a[j], M::var(a[k], b[k]));
                let dk = M::var(M::check(a[j], b[j]), a[k]);
                changed |= dj != dst[j] || dk != dst[k];
                dst[j] = dj;
                dst[k] = dk;
            }
        }
        changed
    }

    impl<M: Message> ScalarTrellis<M> {
        pub fn new(perm: &SectionPermutation) -> Self {
            let len = 1usize << perm.n();
            let cols = perm.layers().len() + 1;
            Self {
                layers: perm.layers().to_vec(),
                from_x: vec![vec![M::UNKNOWN; len]; cols],
                from_u: vec![vec![M::UNKNOWN; len]; cols],
            }
        }

        /// One double sweep; returns whether any message changed.
        pub fn sweep_round(&mut self) -> bool {
            let n = self.layers.len();
            let mut changed = false;
            for l in 0..n {
                let (lo, hi) = self.from_x.split_at_mut(l + 1);
                changed |= section(self.layers[l], &lo[l], &self.from_u[l + 1], &mut hi[0]);
            }
            for l in (0..n).rev() {
                let (lo, hi) = self.from_u.split_at_mut(l + 1);
                changed |= section(self.layers[l], &hi[0], &self.from_x[l], &mut lo[l]);
            }
            changed
        }

        /// One flooding round; returns whether any message changed.
        pub fn flooding_round(&mut self) -> bool {
            let n = self.layers.len();
            let old_x = self.from_x.clone();
            let old_u = self.from_u.clone();
            let mut changed = false;
            for l in 0..n {
                changed |= section(self.layers[l], &old_x[l], &old_u[l + 1], &mut self.from_x[l + 1]);
                changed |= section(self.layers[l], &old_u[l + 1], &old_x[l], &mut self.from_u[l]);
            }
            changed
        }

        /// Runs rounds with fixed end inputs until nothing changes or
        /// `max_rounds` is reached; returns the u-side beliefs and the rounds used.
        pub fn run(&mut self, x_in: &[M], u_in: &[M], schedule: Schedule, max_rounds: usize) -> (Vec<M>, usize) {
            let n = self.layers.len();
            self.from_x[0] = x_in.to_vec();
            self.from_u[n] = u_in.to_vec();
            let mut rounds = 0;
            while rounds < max_rounds {
                rounds += 1;
                let changed = match schedule {
                    Schedule::Sweep => self.sweep_round(),
                    Schedule::Flooding => self.flooding_round(),
                };
                if !changed {
                    break;
                }
            }
            let beliefs = u_in.iter().zip(&self.from_x[n]).map(|(&a, &b)| M::var(a, b)).collect();
            (beliefs, rounds)
        }
    }

    /// `base` combined with every extrinsic vector except `skip`.
    pub fn combine<M: Message>(base: &[M], ext: &[Vec<M>], skip: usize) -> Vec<M> {
        let mut out = base.to_vec();
        for (t, e) in ext.iter().enumerate() {
            if t != skip {
                for (o, &m) in out.iter_mut().zip(e) {
                    *o = M::var(*o, m);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::reference::{Schedule, ScalarTrellis, Tri};
    use super::*;
    use crate::channel::{channel_sample, stream_rng, ChannelParam, Observation};
    use crate::construction::{construct_arikan, ConstructionOptions, RuleTag};
    use crate::sc::sc_decode;
    use crate::transform::polar_transform;
    use rand::Rng;

    #[test]
    fn cyclic_examples() {
        let t3: Vec<Vec<u32>> = cyclic_trellises(3).unwrap().iter().map(|p| p.layers().to_vec()).collect();
        assert_eq!(t3, vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]]);
        assert_eq!(cyclic_trellises(1).unwrap().len(), 1);
        assert!(cyclic_trellises(0).is_err());
        assert!(SectionPermutation::new(vec![0, 0]).is_err());
    }

    #[test]
    fn every_trellis_computes_the_transform() {
        for n in 1..=4u32 {
            for perm in cyclic_trellises(n).unwrap() {
                let g = TrellisGraph::new(perm);
                for l in 0..n as usize {
                    assert_eq!(g.z_subgraphs(l).len(), 1 << (n - 1));
                }
                for a in 0..1usize << (1 << n) {
                    let bits: Vec<u8> = (0..1usize << n).map(|i| ((a >> i) & 1) as u8).collect();
                    let u = BitBlock::from_bits(&bits).unwrap();
                    assert_eq!(g.apply(&u).unwrap(), polar_transform(&u));
                }
            }
        }
    }

    #[test]
    fn noiseless_bec_recovers_in_one_round() {
        let bec = ChannelParam::bec(0.5).unwrap();
        let code = construct_arikan(&bec, 6, 0.5, &ConstructionOptions::default()).unwrap();
        let info: Vec<u8> = (0..code.information_len()).map(|i| (i % 2) as u8).collect();
        let x = code.encode(&info).unwrap();
        let trellis = [SectionPermutation::identity(6).unwrap()];
        let out = bp_decode(&code, &SoftBlock::noiseless(&x), &trellis, &BpOptions::default()).unwrap();
        assert_eq!(code.extract(&out.u), info);
        assert_eq!(out.rounds, 1);
        assert_eq!(out.unresolved, 0);
    }

    #[test]
    fn packed_matches_scalar_reference() {
        let mut rng = stream_rng(5, 1);
        for n in [2u32, 3, 5, 7, 8] {
            let len = 1usize << n;
            let code = CodeSpec::from_information_set(n, &(len / 3..len).collect::<Vec<_>>(), RuleTag::Explicit).unwrap();
            for perm in cyclic_trellises(n).unwrap() {
                for _ in 0..10 {
                    let info: Vec<u8> = (0..code.information_len()).map(|_| rng.random_range(0..2u8)).collect();
                    let x = code.encode(&info).unwrap();
                    let obs = channel_sample(&ChannelParam::bec(0.45).unwrap(), &x, &mut rng);
                    let out = bp_decode(&code, &obs, std::slice::from_ref(&perm), &BpOptions::default()).unwrap();
                    let x_in: Vec<Tri> = obs.values().iter().map(|o| Tri::from_bit(o.known_bit())).collect();
                    let mask = code.frozen_mask();
                    let u_in: Vec<Tri> = (0..len).map(|i| Tri::from_bit(mask[i].then_some(0))).collect();
                    let mut sweep = ScalarTrellis::<Tri>::new(&perm);
                    let (beliefs, _) = sweep.run(&x_in, &u_in, Schedule::Sweep, usize::MAX);
                    let unresolved = (0..len).filter(|&i| !mask[i] && beliefs[i] == Tri::Unknown).count();
                    assert_eq!(unresolved, out.unresolved);
                    for i in 0..len {
                        if let Some(b) = beliefs[i].bit() {
                            assert_eq!(b, out.u.get(i));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn bp_beats_sc_on_some_pattern() {
        // Exhaustive over erasure patterns of a fixed n = 3 code.
        let code = CodeSpec::from_information_set(3, &[3, 5, 6, 7], RuleTag::Explicit).unwrap();
        let zero = BitBlock::zeros(3).unwrap();
        let trellis = [SectionPermutation::identity(3).unwrap()];
        let mut bp_only = 0;
        for pattern in 0..256u32 {
            let obs = SoftBlock::new(
                (0..8)
                    .map(|j| if pattern >> j & 1 == 1 { Observation::Erasure } else { Observation::Llr(f64::INFINITY) })
                    .collect(),
            )
            .unwrap();
            let sc = sc_decode(&code, &obs).unwrap();
            let bp = bp_decode(&code, &obs, &trellis, &BpOptions::default()).unwrap();
            let sc_ok = sc.ties == 0 && sc.u == zero;
            let bp_ok = bp.unresolved == 0 && bp.u == zero;
            assert!(!sc_ok || bp_ok, "pattern {pattern:08b}");
            if bp_ok && !sc_ok {
                bp_only += 1;
            }
        }
        assert!(bp_only > 0);
    }

    #[test]
    fn llr_bp_on_single_section_is_bitwise_map() {
        let code = CodeSpec::from_information_set(1, &[0, 1], RuleTag::Explicit).unwrap();
        let trellis = [SectionPermutation::identity(1).unwrap()];
        for &(l0, l1) in &[(0.3, -1.2), (-2.0, 0.5), (1.5, 1.0), (-0.4, -0.7)] {
            let obs = SoftBlock::from_llrs(&[l0, l1]).unwrap();
            let out = bp_decode(&code, &obs, &trellis, &BpOptions::default()).unwrap();
            // Codewords (u0 ⊕ u1, u1); exact bitwise posteriors by enumeration.
            let mut p = [[0.0f64; 2]; 2];
            for u0 in 0..2u8 {
                for u1 in 0..2u8 {
                    let x0 = u0 ^ u1;
                    let w = (if x0 == 0 { l0 / 2.0 } else { -l0 / 2.0 }).exp() * (if u1 == 0 { l1 / 2.0 } else { -l1 / 2.0 }).exp();
                    p[0][u0 as usize] += w;
                    p[1][u1 as usize] += w;
                }
            }
            assert_eq!(out.u.get(0), u8::from(p[0][1] > p[0][0]));
            assert_eq!(out.u.get(1), u8::from(p[1][1] > p[1][0]));
        }
    }

    #[test]
    fn dual_code_bp_decodes_noiseless() {
        let code = CodeSpec::from_information_set(4, &[0, 1, 2, 4, 8], RuleTag::Explicit).unwrap().dual();
        let info: Vec<u8> = (0..code.information_len()).map(|i| (i % 3 == 0) as u8).collect();
        let x = code.encode(&info).unwrap();
        let out = bp_decode(&code, &SoftBlock::noiseless(&x), &cyclic_trellises(4).unwrap(), &BpOptions::default()).unwrap();
        assert_eq!(code.extract(&out.u), info);
    }
}
