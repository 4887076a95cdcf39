//! Exact MAP decoding on the BEC by GF(2) elimination, and a brute-force ML
//! oracle for small codes.

use crate::channel::SoftBlock;
use crate::construction::{CodeSpec, DecodingOrder};
use crate::error::{invalid, PolarError, Result};
use crate::transform::BitBlock;

/// Largest information set the ML oracle will enumerate.
pub const ML_MAX_INFORMATION_BITS: usize = 20;

/// Outcome of MAP decoding on the BEC.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MapOutcome {
    /// Exactly one input is consistent with the observations.
    Unique(BitBlock),
    /// `free` information bits remain undetermined.
    Ambiguous { free: usize },
}

impl MapOutcome {
    pub fn is_unique(&self) -> bool {
        matches!(self, MapOutcome::Unique(_))
    }
}

/// Row-echelon basis over GF(2) keyed by each row's lowest set column.
struct Echelon {
    words: usize,
    rows: Vec<Option<(Vec<u64>, u8)>>,
    rank: usize,
}

impl Echelon {
    fn new(columns: usize) -> Self {
        Self {
            words: columns.div_ceil(64),
            rows: vec![None; columns],
            rank: 0,
        }
    }

    /// Adds `row · unknowns = rhs`; fails when it contradicts the basis.
    fn insert(&mut self, mut row: Vec<u64>, mut rhs: u8) -> Result<()> {
        loop {
            let Some(w) = row.iter().position(|&x| x != 0) else {
                return if rhs == 0 { Ok(()) } else { Err(PolarError::Inconsistent) };
            };
            let p = w * 64 + row[w].trailing_zeros() as usize;
            match &self.rows[p] {
                Some((basis, b)) => {
                    for (x, y) in row[w..].iter_mut().zip(&basis[w..]) {
                        *x ^= y;
                    }
                    rhs ^= b;
                }
                None => {
                    self.rows[p] = Some((row, rhs));
                    self.rank += 1;
                    return Ok(());
                }
            }
        }
    }

    /// Back substitution, valid once the basis has full rank.
    fn solve(&self) -> Vec<u8> {
        let columns = self.rows.len();
        let mut values = vec![0u64; self.words];
        for p in (0..columns).rev() {
            let (row, rhs) = self.rows[p].as_ref().expect("full rank");
            let mut v = *rhs;
            for (x, y) in row.iter().zip(&values) {
                v ^= ((x & y).count_ones() & 1) as u8;
            }
            values[p / 64] |= (v as u64) << (p % 64);
        }
        (0..columns).map(|c| ((values[c / 64] >> (c % 64)) & 1) as u8).collect()
    }
}

/// MAP decoding of erasure-type observations: solves the linear system
/// `x_j = ⊕_{i ⊇ j} u_i` over the unerased positions for the information bits.
pub fn map_decode_bec(code: &CodeSpec, obs: &SoftBlock) -> Result<MapOutcome> {
    if obs.len() != code.len() {
        return Err(PolarError::LengthMismatch {
            expected: code.len(),
            actual: obs.len(),
        });
    }
    if !obs.is_erasure_type() {
        return Err(invalid("MAP decoding on the BEC needs erasure-type observations"));
    }
    if code.order() == DecodingOrder::Dual {
        return Ok(match map_decode_bec(&code.mirrored(), &obs.mirrored())? {
            MapOutcome::Unique(u) => MapOutcome::Unique(u.mirrored()),
            other => other,
        });
    }
    let len = code.len();
    let info = code.information();
    let mut column = vec![usize::MAX; len];
    for (c, &i) in info.iter().enumerate() {
        column[i] = c;
    }
    let table = code.frozen_value_table();
    let mut system = Echelon::new(info.len());
    for j in 0..len {
        let Some(bit) = obs.get(j).known_bit() else {
            continue;
        };
        let mut row = vec![0u64; system.words];
        let mut rhs = bit;
        let mut i = j;
        loop {
            match column[i] {
                usize::MAX => rhs ^= table[i],
                c => row[c / 64] |= 1 << (c % 64),
            }
            if i == len - 1 {
                break;
            }
            i = (i + 1) | j;
        }
        system.insert(row, rhs)?;
    }
    if system.rank < info.len() {
        return Ok(MapOutcome::Ambiguous {
            free: info.len() - system.rank,
        });
    }
    Ok(MapOutcome::Unique(code.embed(&system.solve())?))
}

/// Maximum-likelihood input by enumeration of all `2^|I|` codewords.
///
/// Candidates are ranked by the number of disagreements with hard (`±∞`)
/// observations, then by `Σ_{x_j = 1} L_j` over the finite LLRs; remaining
/// ties go to the lexicographically smallest input.
pub fn ml_oracle(code: &CodeSpec, obs: &SoftBlock) -> Result<BitBlock> {
    if obs.len() != code.len() {
        return Err(PolarError::LengthMismatch {
            expected: code.len(),
            actual: obs.len(),
        });
    }
    let info = code.information();
    let k = info.len();
    if k > ML_MAX_INFORMATION_BITS {
        return Err(PolarError::TooManyInformationBits {
            k,
            max: ML_MAX_INFORMATION_BITS,
        });
    }
    let n = code.n();
    let rows: Vec<BitBlock> = info
        .iter()
        .map(|&i| {
            let unit = BitBlock::indicator(n, i).expect("index in range");
            code.codeword_of(&unit)
        })
        .collect();
    let hard: Vec<Option<u8>> = obs.values().iter().map(|o| o.known_bit()).collect();
    let soft: Vec<f64> = obs
        .values()
        .iter()
        .map(|o| {
            let l = o.llr();
            if l.is_finite() {
                l
            } else {
                0.0
            }
        })
        .collect();
    let score = |x: &BitBlock| -> (usize, f64) {
        let mut mismatches = 0;
        let mut metric = 0.0;
        for (j, bit) in x.iter().enumerate() {
            if let Some(h) = hard[j] {
                mismatches += usize::from(h != bit);
            }
            if bit == 1 {
                metric += soft[j];
            }
        }
        (mismatches, metric)
    };
    let mut info_bits = vec![0u8; k];
    let mut x = code.encode(&info_bits)?;
    let mut best_bits = info_bits.clone();
    let mut best = score(&x);
    for g in 1..1u64 << k {
        let flip = g.trailing_zeros() as usize;
        info_bits[flip] ^= 1;
        x = x.xor(&rows[flip])?;
        let s = score(&x);
        let better = s.0 < best.0
            || (s.0 == best.0 && (s.1 < best.1 || (s.1 == best.1 && info_bits < best_bits)));
        if better {
            best = s;
            best_bits.clone_from(&info_bits);
        }
    }
    code.embed(&best_bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{channel_sample, stream_rng, ChannelParam, Observation};
    use crate::construction::RuleTag;
    use crate::sc::sc_decode;

    fn code3() -> CodeSpec {
        CodeSpec::from_information_set(3, &[3, 5, 6, 7], RuleTag::Explicit).unwrap()
    }

    #[test]
    fn zero_erasures_gives_unique_sc_answer() {
        let code = code3();
        let x = code.encode(&[1, 0, 1, 1]).unwrap();
        let obs = SoftBlock::noiseless(&x);
        let sc = sc_decode(&code, &obs).unwrap();
        assert_eq!(map_decode_bec(&code, &obs).unwrap(), MapOutcome::Unique(sc.u));
    }

    #[test]
    fn all_erased_is_ambiguous() {
        let obs = SoftBlock::new(vec![Observation::Erasure; 8]).unwrap();
        assert_eq!(map_decode_bec(&code3(), &obs).unwrap(), MapOutcome::Ambiguous { free: 4 });
    }

    #[test]
    fn inconsistent_observations_are_rejected() {
        let code = CodeSpec::from_information_set(1, &[1], RuleTag::Explicit).unwrap();
        // Repetition code: x = (u1, u1); observing (0, 1) has no codeword.
        let obs = SoftBlock::new(vec![Observation::Llr(f64::INFINITY), Observation::Llr(f64::NEG_INFINITY)]).unwrap();
        assert_eq!(map_decode_bec(&code, &obs), Err(PolarError::Inconsistent));
        assert!(map_decode_bec(&code, &SoftBlock::from_llrs(&[0.5, 1.0]).unwrap()).is_err());
    }

    #[test]
    fn ml_recovers_noiseless_and_refuses_large_codes() {
        let code = code3();
        let x = code.encode(&[0, 1, 1, 0]).unwrap();
        let u = ml_oracle(&code, &SoftBlock::noiseless(&x)).unwrap();
        assert_eq!(code.codeword_of(&u), x);
        let big = CodeSpec::from_information_set(5, &(0..21).collect::<Vec<_>>(), RuleTag::Explicit).unwrap();
        assert!(matches!(
            ml_oracle(&big, &SoftBlock::from_llrs(&[1.0; 32]).unwrap()),
            Err(PolarError::TooManyInformationBits { k: 21, .. })
        ));
    }

    #[test]
    fn map_agrees_with_ml_on_random_bec_words() {
        let code = CodeSpec::from_information_set(5, &[7, 11, 13, 14, 15, 19, 21, 22, 23, 25, 26, 27, 28, 29, 30, 31], RuleTag::Explicit).unwrap();
        let bec = ChannelParam::bec(0.4).unwrap();
        let mut rng = stream_rng(9, 0);
        for t in 0..100u64 {
            let info: Vec<u8> = (0..16).map(|i| ((t >> (i % 7)) & 1) as u8).collect();
            let x = code.encode(&info).unwrap();
            let obs = channel_sample(&bec, &x, &mut rng);
            if let MapOutcome::Unique(u) = map_decode_bec(&code, &obs).unwrap() {
                assert_eq!(code.extract(&u), info);
                assert_eq!(ml_oracle(&code, &obs).unwrap(), u);
            }
        }
    }

    #[test]
    fn dual_codes_are_supported() {
        let code = code3().dual();
        let x = code.encode(&[1, 1, 0, 1]).unwrap();
        let mut values: Vec<Observation> = SoftBlock::noiseless(&x).values().to_vec();
        values[0] = Observation::Erasure;
        let out = map_decode_bec(&code, &SoftBlock::new(values).unwrap()).unwrap();
        match out {
            MapOutcome::Unique(u) => assert_eq!(code.codeword_of(&u), x),
            other => panic!("{other:?}"),
        }
    }
}
