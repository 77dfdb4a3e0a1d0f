//! Rate-1/3 LTE turbo code for the 768-bit drone-ID block: two 8-state
//! recursive systematic convolutional encoders (feedback 1+D^2+D^3,
//! feedforward 1+D+D^3) joined by a QPP interleaver, each terminated with
//! three tail steps.
//!
//! Soft values are log-likelihood ratios `ln P(0)/P(1)`: positive means 0.

use once_cell::sync::Lazy;

use crate::error::{Error, Result};

pub const INFO_BITS: usize = 768;
const TAIL: usize = 3;
/// Each of the three output streams carries `K + 4` bits.
pub const STREAM_LEN: usize = INFO_BITS + 4;
pub const CODED_BITS: usize = 3 * STREAM_LEN;

/// QPP coefficients for K = 768.
const QPP_F1: usize = 217;
const QPP_F2: usize = 48;

pub const MAX_ITERATIONS: usize = 8;
const EXTRINSIC_SCALE: f64 = 0.75;

const NUM_STATES: usize = 8;

/// `INTERLEAVER[i]` is the information index fed to encoder 2 at step `i`.
pub static INTERLEAVER: Lazy<Vec<usize>> = Lazy::new(|| {
    (0..INFO_BITS)
        .map(|i| (QPP_F1 * i + QPP_F2 * i * i) % INFO_BITS)
        .collect()
});

/// State bits: bit 2 is the most recent register.
#[derive(Clone, Copy)]
struct Branch {
    next: usize,
    parity: u8,
}

const fn branch(state: usize, input: u8) -> Branch {
    let s1 = (state >> 2) & 1;
    let s2 = (state >> 1) & 1;
    let s3 = state & 1;
    let a = input as usize ^ s2 ^ s3;
    Branch { next: (a << 2) | (s1 << 1) | s2, parity: (a ^ s1 ^ s3) as u8 }
}

const fn build_trellis() -> [[Branch; 2]; NUM_STATES] {
    let mut t = [[Branch { next: 0, parity: 0 }; 2]; NUM_STATES];
    let mut s = 0;
    while s < NUM_STATES {
        t[s][0] = branch(s, 0);
        t[s][1] = branch(s, 1);
        s += 1;
    }
    t
}

const TRELLIS: [[Branch; 2]; NUM_STATES] = build_trellis();

/// Tail input that drives the feedback bit to zero.
fn flushing_input(state: usize) -> u8 {
    (((state >> 1) ^ state) & 1) as u8
}

struct RscOutput {
    parity: Vec<u8>,
    tail_systematic: [u8; TAIL],
    tail_parity: [u8; TAIL],
}

fn rsc_encode(bits: impl Iterator<Item = u8>) -> RscOutput {
    let mut state = 0;
    let mut parity = Vec::with_capacity(INFO_BITS);
    for b in bits {
        let br = TRELLIS[state][b as usize];
        parity.push(br.parity);
        state = br.next;
    }
    let mut tail_systematic = [0; TAIL];
    let mut tail_parity = [0; TAIL];
    for j in 0..TAIL {
        let u = flushing_input(state);
        let br = TRELLIS[state][u as usize];
        tail_systematic[j] = u;
        tail_parity[j] = br.parity;
        state = br.next;
    }
    debug_assert_eq!(state, 0);
    RscOutput { parity, tail_systematic, tail_parity }
}

/// Positions of the twelve tail bits inside `d0 ++ d1 ++ d2`.
struct TailSlots {
    sys1: [usize; TAIL],
    par1: [usize; TAIL],
    sys2: [usize; TAIL],
    par2: [usize; TAIL],
}

const fn slot(stream: usize, offset: usize) -> usize {
    stream * STREAM_LEN + INFO_BITS + offset
}

const TAIL_SLOTS: TailSlots = TailSlots {
    sys1: [slot(0, 0), slot(2, 0), slot(1, 1)],
    par1: [slot(1, 0), slot(0, 1), slot(2, 1)],
    sys2: [slot(0, 2), slot(2, 2), slot(1, 3)],
    par2: [slot(1, 2), slot(0, 3), slot(2, 3)],
};

/// Encode 768 information bits into `d0 ++ d1 ++ d2` (2316 bits).
pub fn turbo_encode(info: &[u8]) -> Result<Vec<u8>> {
    if info.len() != INFO_BITS {
        return Err(Error::InvalidArgument(format!(
            "turbo block must be {INFO_BITS} bits, got {}",
            info.len()
        )));
    }
    let first = rsc_encode(info.iter().copied());
    let second = rsc_encode(INTERLEAVER.iter().map(|&i| info[i]));

    let mut out = vec![0u8; CODED_BITS];
    out[..INFO_BITS].copy_from_slice(info);
    out[STREAM_LEN..STREAM_LEN + INFO_BITS].copy_from_slice(&first.parity);
    out[2 * STREAM_LEN..2 * STREAM_LEN + INFO_BITS].copy_from_slice(&second.parity);
    for j in 0..TAIL {
        out[TAIL_SLOTS.sys1[j]] = first.tail_systematic[j];
        out[TAIL_SLOTS.par1[j]] = first.tail_parity[j];
        out[TAIL_SLOTS.sys2[j]] = second.tail_systematic[j];
        out[TAIL_SLOTS.par2[j]] = second.tail_parity[j];
    }
    Ok(out)
}

const NEG_INF: f64 = f64::NEG_INFINITY;

/// Max-log-MAP pass over a terminated trellis. Returns the a-posteriori
/// LLR of every step (information and tail).
fn max_log_map(systematic: &[f64], parity: &[f64], apriori: &[f64]) -> Vec<f64> {
    let steps = systematic.len();
    let gamma = |t: usize, input: usize, p: u8| {
        let xu = if input == 0 { 1.0 } else { -1.0 };
        let xp = if p == 0 { 1.0 } else { -1.0 };
        0.5 * (xu * (systematic[t] + apriori[t]) + xp * parity[t])
    };

    let mut alpha = vec![[NEG_INF; NUM_STATES]; steps + 1];
    alpha[0][0] = 0.0;
    for t in 0..steps {
        let mut next = [NEG_INF; NUM_STATES];
        for (s, &a) in alpha[t].iter().enumerate() {
            if a == NEG_INF {
                continue;
            }
            for (u, br) in TRELLIS[s].iter().enumerate() {
                let m = a + gamma(t, u, br.parity);
                if m > next[br.next] {
                    next[br.next] = m;
                }
            }
        }
        let norm = next.iter().copied().fold(NEG_INF, f64::max);
        next.iter_mut().for_each(|v| *v -= norm);
        alpha[t + 1] = next;
    }

    let mut beta = [NEG_INF; NUM_STATES];
    beta[0] = 0.0;
    let mut llr = vec![0.0; steps];
    for t in (0..steps).rev() {
        let mut best = [NEG_INF; 2];
        let mut prev = [NEG_INF; NUM_STATES];
        for (s, &a) in alpha[t].iter().enumerate() {
            for u in 0..2 {
                let br = TRELLIS[s][u];
                let b = beta[br.next];
                if b == NEG_INF {
                    continue;
                }
                let g = gamma(t, u, br.parity);
                if b + g > prev[s] {
                    prev[s] = b + g;
                }
                if a != NEG_INF && a + g + b > best[u] {
                    best[u] = a + g + b;
                }
            }
        }
        llr[t] = best[0] - best[1];
        let norm = prev.iter().copied().fold(NEG_INF, f64::max);
        prev.iter_mut().for_each(|v| *v -= norm);
        beta = prev;
    }
    llr
}

/// Iteratively decode soft values laid out as `d0 ++ d1 ++ d2`. `accept`
/// is consulted after every iteration; decoding stops at the first
/// decision it accepts. Returns the last hard decision and whether it
/// was accepted.
pub fn turbo_decode_soft(
    soft: &[f64],
    mut accept: impl FnMut(&[u8]) -> bool,
) -> Result<(Vec<u8>, bool)> {
    if soft.len() != CODED_BITS {
        return Err(Error::InvalidArgument(format!(
            "turbo decoder needs {CODED_BITS} soft values, got {}",
            soft.len()
        )));
    }
    let sys = &soft[..INFO_BITS];
    let par1 = &soft[STREAM_LEN..STREAM_LEN + INFO_BITS];
    let par2 = &soft[2 * STREAM_LEN..2 * STREAM_LEN + INFO_BITS];
    let pi = &*INTERLEAVER;
    let pick = |slots: &[usize; TAIL]| slots.map(|i| soft[i]);

    let mut sys1: Vec<f64> = sys.to_vec();
    sys1.extend(pick(&TAIL_SLOTS.sys1));
    let mut p1: Vec<f64> = par1.to_vec();
    p1.extend(pick(&TAIL_SLOTS.par1));
    let mut sys2: Vec<f64> = pi.iter().map(|&i| sys[i]).collect();
    sys2.extend(pick(&TAIL_SLOTS.sys2));
    let mut p2: Vec<f64> = par2.to_vec();
    p2.extend(pick(&TAIL_SLOTS.par2));

    let mut apriori1 = vec![0.0; INFO_BITS + TAIL];
    let mut apriori2 = vec![0.0; INFO_BITS + TAIL];
    let mut bits = vec![0u8; INFO_BITS];

    for _ in 0..MAX_ITERATIONS {
        let out1 = max_log_map(&sys1, &p1, &apriori1);
        for (i, &src) in pi.iter().enumerate() {
            let ext = out1[src] - sys1[src] - apriori1[src];
            apriori2[i] = EXTRINSIC_SCALE * ext;
        }
        let out2 = max_log_map(&sys2, &p2, &apriori2);
        for (i, &dst) in pi.iter().enumerate() {
            let ext = out2[i] - sys2[i] - apriori2[i];
            apriori1[dst] = EXTRINSIC_SCALE * ext;
            bits[dst] = (out2[i] < 0.0) as u8;
        }
        if accept(&bits) {
            return Ok((bits, true));
        }
    }
    Ok((bits, false))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pattern(seed: usize) -> Vec<u8> {
        (0..INFO_BITS).map(|i| ((i * 31 + seed * 17) ^ (i >> 3)).is_multiple_of(3) as u8).collect()
    }

    fn to_soft(bits: &[u8]) -> Vec<f64> {
        bits.iter().map(|&b| if b == 0 { 8.0 } else { -8.0 }).collect()
    }

    #[test]
    fn interleaver_is_a_permutation() {
        let mut seen = INTERLEAVER.clone();
        seen.sort_unstable();
        assert!(seen.iter().enumerate().all(|(i, &v)| i == v));
    }

    #[test]
    fn trellis_terminates() {
        for s in 0..NUM_STATES {
            let mut state = s;
            for _ in 0..TAIL {
                state = TRELLIS[state][flushing_input(state) as usize].next;
            }
            assert_eq!(state, 0);
        }
    }

    #[test]
    fn encoder_is_systematic() {
        let info = pattern(1);
        let coded = turbo_encode(&info).unwrap();
        assert_eq!(coded.len(), 2316);
        assert_eq!(&coded[..INFO_BITS], &info[..]);
        assert!(turbo_encode(&info[..700]).is_err());
    }

    #[test]
    fn zero_block_is_zero_codeword() {
        assert!(turbo_encode(&[0; INFO_BITS]).unwrap().iter().all(|&b| b == 0));
    }

    #[test]
    fn tail_slots_are_distinct() {
        let mut all: Vec<usize> = [TAIL_SLOTS.sys1, TAIL_SLOTS.par1, TAIL_SLOTS.sys2, TAIL_SLOTS.par2]
            .concat();
        all.sort_unstable();
        all.dedup();
        assert_eq!(all.len(), 12);
        assert!(all.iter().all(|&i| i % STREAM_LEN >= INFO_BITS));
    }

    #[test]
    fn clean_decode() {
        for seed in 0..5 {
            let info = pattern(seed);
            let soft = to_soft(&turbo_encode(&info).unwrap());
            let (bits, ok) = turbo_decode_soft(&soft, |b| b == info.as_slice()).unwrap();
            assert!(ok);
            assert_eq!(bits, info);
        }
    }

    #[test]
    fn corrects_scattered_errors() {
        let info = pattern(9);
        let coded = turbo_encode(&info).unwrap();
        let mut soft = to_soft(&coded);
        for i in (0..CODED_BITS).step_by(23) {
            soft[i] = -soft[i];
        }
        let (bits, _) = turbo_decode_soft(&soft, |_| false).unwrap();
        assert_eq!(bits, info);
    }

    #[test]
    fn deterministic() {
        let soft: Vec<f64> = (0..CODED_BITS).map(|i| ((i * 7919) % 13) as f64 - 6.0).collect();
        let a = turbo_decode_soft(&soft, |_| false).unwrap();
        let b = turbo_decode_soft(&soft, |_| false).unwrap();
        assert_eq!(a, b);
    }
}
