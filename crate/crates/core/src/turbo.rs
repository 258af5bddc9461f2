//! Rate-1/3 parallel-concatenated turbo codec: two recursive systematic
//! convolutional (RSC) constituent encoders joined by a random interleaver,
//! decoded by two Log-MAP decoders exchanging extrinsic information.
//!
//! LLR convention inside this module: positive means bit 1, i.e.
//! `L = log(P(bit=1)/P(bit=0))`, with bipolar mapping `c = +1` for bit 1.
//! This is the negation of what [`crate::modem::Constellation::demodulate_soft`]
//! produces; the simulation chain flips signs at the boundary.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::math::lse2;
use crate::{Error, Result, Scalar};

/// The RSC code graph: per-state, per-input successor state and parity bit.
#[derive(Debug, Clone)]
pub struct Trellis {
    memory: usize,
    n_states: usize,
    next_state: Vec<[usize; 2]>,
    parity: Vec<[u8; 2]>,
    /// Input bit that zeroes the feedback sum, used for termination.
    term_input: Vec<u8>,
}

impl Trellis {
    /// RSC encoder with the given register count and octal-style generator
    /// words. Bit `memory` of `feedback` is the input tap; lower bits tap the
    /// registers, newest first.
    pub fn rsc(memory: usize, feedback: u32, feedforward: u32) -> Self {
        let n_states = 1usize << memory;
        let state_mask = (n_states as u32) - 1;
        let fb_state = feedback & state_mask;
        let ff_state = feedforward & state_mask;
        let ff_input = (feedforward >> memory) & 1;
        let mut next_state = vec![[0usize; 2]; n_states];
        let mut parity = vec![[0u8; 2]; n_states];
        let mut term_input = vec![0u8; n_states];
        for s in 0..n_states {
            let fb_sum = ((s as u32 & fb_state).count_ones() & 1) as u8;
            term_input[s] = fb_sum;
            for u in 0..2u8 {
                let a = u ^ fb_sum;
                let p = (ff_input as u8 & a)
                    ^ ((s as u32 & ff_state).count_ones() & 1) as u8;
                next_state[s][u as usize] =
                    ((a as usize) << (memory - 1)) | (s >> 1);
                parity[s][u as usize] = p;
            }
        }
        Self {
            memory,
            n_states,
            next_state,
            parity,
            term_input,
        }
    }

    /// The 4-state constraint-length-3 code (feedback 7, feedforward 5
    /// octal) used throughout the simulator.
    pub fn wimax() -> Self {
        Self::rsc(2, 0o7, 0o5)
    }

    pub fn memory(&self) -> usize {
        self.memory
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn next_state(&self, state: usize, input: u8) -> usize {
        self.next_state[state][input as usize]
    }

    pub fn parity(&self, state: usize, input: u8) -> u8 {
        self.parity[state][input as usize]
    }
}

/// Encodes `bits` from state 0; returns (systematic, parity, final state).
pub fn rsc_encode(bits: &[u8], t: &Trellis) -> (Vec<u8>, Vec<u8>, usize) {
    let mut state = 0usize;
    let mut parity = Vec::with_capacity(bits.len());
    for &b in bits {
        parity.push(t.parity(state, b));
        state = t.next_state(state, b);
    }
    (bits.to_vec(), parity, state)
}

/// The `memory` input bits that drive the encoder from `state` back to
/// state 0.
pub fn terminate(mut state: usize, t: &Trellis) -> Vec<u8> {
    let mut tail = Vec::with_capacity(t.memory);
    for _ in 0..t.memory {
        let u = t.term_input[state];
        tail.push(u);
        state = t.next_state(state, u);
    }
    debug_assert_eq!(state, 0);
    tail
}

/// A fixed permutation of length L; `interleave` reads `out[k] = in[perm[k]]`.
#[derive(Debug, Clone)]
pub struct Interleaver {
    perm: Vec<usize>,
}

impl Interleaver {
    pub fn from_permutation(perm: Vec<usize>) -> Result<Self> {
        let l = perm.len();
        let mut seen = vec![false; l];
        for &p in &perm {
            if p >= l || seen[p] {
                return Err(Error::Parameter(
                    "permutation is not a bijection".into(),
                ));
            }
            seen[p] = true;
        }
        Ok(Self { perm })
    }

    /// Uniform random permutation (Fisher-Yates).
    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut perm: Vec<usize> = (0..len).collect();
        perm.shuffle(rng);
        Self { perm }
    }

    pub fn identity(len: usize) -> Self {
        Self {
            perm: (0..len).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    pub fn interleave<T: Copy>(&self, input: &[T]) -> Result<Vec<T>> {
        if input.len() != self.perm.len() {
            return Err(Error::InputShape(format!(
                "interleaver length {} vs input length {}",
                self.perm.len(),
                input.len()
            )));
        }
        Ok(self.perm.iter().map(|&p| input[p]).collect())
    }

    pub fn deinterleave<T: Copy>(&self, input: &[T]) -> Result<Vec<T>> {
        if input.len() != self.perm.len() {
            return Err(Error::InputShape(format!(
                "interleaver length {} vs input length {}",
                self.perm.len(),
                input.len()
            )));
        }
        // Seed with the input (every slot is overwritten by the scatter).
        let mut out = input.to_vec();
        for (k, &p) in self.perm.iter().enumerate() {
            out[p] = input[k];
        }
        Ok(out)
    }
}

/// A rate-1/3 turbo codeword. Encoder 1 is trellis-terminated, so the
/// systematic and first parity streams carry `memory` tail positions beyond
/// the `k` information bits; encoder 2 is left unterminated.
#[derive(Debug, Clone)]
pub struct Codeword {
    pub systematic: Vec<u8>,
    pub parity1: Vec<u8>,
    pub parity2: Vec<u8>,
    pub k: usize,
}

impl Codeword {
    /// Transmitted bit count: `3*(k + memory)`; the second parity stream is
    /// zero-padded over the tail so the three streams stay aligned.
    pub fn transmit_len(k: usize, t: &Trellis) -> usize {
        3 * (k + t.memory)
    }

    /// Serializes as one (systematic, parity1, parity2) triple per trellis
    /// step, tail steps included.
    pub fn transmit_bits(&self) -> Vec<u8> {
        let steps = self.systematic.len();
        let mut out = Vec::with_capacity(3 * steps);
        for i in 0..steps {
            out.push(self.systematic[i]);
            out.push(self.parity1[i]);
            out.push(*self.parity2.get(i).unwrap_or(&0));
        }
        out
    }
}

/// Splits a received LLR stream laid out by [`Codeword::transmit_bits`] back
/// into (systematic, parity1, parity2) streams. The LLRs of the zero-padded
/// tail positions of parity 2 are dropped.
pub fn split_llrs<S: Scalar>(
    llrs: &[S],
    k: usize,
    t: &Trellis,
) -> Result<(Vec<S>, Vec<S>, Vec<S>)> {
    let steps = k + t.memory;
    if llrs.len() != 3 * steps {
        return Err(Error::InputShape(format!(
            "expected {} codeword LLRs, got {}",
            3 * steps,
            llrs.len()
        )));
    }
    let mut sys = Vec::with_capacity(steps);
    let mut p1 = Vec::with_capacity(steps);
    let mut p2 = Vec::with_capacity(k);
    for i in 0..steps {
        sys.push(llrs[3 * i]);
        p1.push(llrs[3 * i + 1]);
        if i < k {
            p2.push(llrs[3 * i + 2]);
        }
    }
    Ok((sys, p1, p2))
}

/// Parallel-concatenated encoding: encoder 1 on `bits` (terminated),
/// encoder 2 on the interleaved bits (unterminated).
pub fn turbo_encode(bits: &[u8], t: &Trellis, il: &Interleaver) -> Result<Codeword> {
    if bits.len() != il.len() {
        return Err(Error::InputShape(format!(
            "message length {} vs interleaver length {}",
            bits.len(),
            il.len()
        )));
    }
    let (mut systematic, mut parity1, final_state) = rsc_encode(bits, t);
    let tail = terminate(final_state, t);
    let (tail_sys, tail_par, end) = {
        let mut state = final_state;
        let mut p = Vec::with_capacity(tail.len());
        for &u in &tail {
            p.push(t.parity(state, u));
            state = t.next_state(state, u);
        }
        (tail.clone(), p, state)
    };
    debug_assert_eq!(end, 0);
    systematic.extend_from_slice(&tail_sys);
    parity1.extend_from_slice(&tail_par);
    let permuted = il.interleave(bits)?;
    let (_, parity2, _) = rsc_encode(&permuted, t);
    Ok(Codeword {
        systematic,
        parity1,
        parity2,
        k: bits.len(),
    })
}

/// Forward/backward metrics of one Log-MAP pass, retained for inspection.
/// `alpha` and `beta` are log-domain and normalized so the states at each
/// step sum to one in probability.
#[derive(Debug, Clone)]
pub struct DecoderState<S> {
    pub alpha: Vec<Vec<S>>,
    pub beta: Vec<Vec<S>>,
    pub gamma: Vec<Vec<[S; 2]>>,
    pub llr: Vec<S>,
}

/// Log-domain branch metrics: `gamma[k][state][input]` is half the sum of
/// prior, systematic, and parity LLR terms, each weighted by the bipolar
/// code bit of the transition.
pub fn branch_metrics<S: Scalar>(
    sys_llr: &[S],
    par_llr: &[S],
    prior: &[S],
    t: &Trellis,
) -> Result<Vec<Vec<[S; 2]>>> {
    let steps = sys_llr.len();
    if par_llr.len() != steps || prior.len() != steps {
        return Err(Error::InputShape(
            "systematic, parity, and prior streams must have equal length".into(),
        ));
    }
    let half = S::cast(0.5);
    let mut gamma = vec![vec![[S::zero(); 2]; t.n_states()]; steps];
    for k in 0..steps {
        for s in 0..t.n_states() {
            for u in 0..2u8 {
                let cu = if u == 1 { S::one() } else { -S::one() };
                let cp = if t.parity(s, u) == 1 {
                    S::one()
                } else {
                    -S::one()
                };
                gamma[k][s][u as usize] =
                    half * (prior[k] * cu + sys_llr[k] * cu + par_llr[k] * cp);
            }
        }
    }
    Ok(gamma)
}

fn normalize_step<S: Scalar>(row: &mut [S]) -> Result<()> {
    let total = crate::math::log_sum_exp(row);
    if !total.is_finite() {
        return Err(Error::Numerical(
            "all states unreachable in recursion step".into(),
        ));
    }
    for v in row.iter_mut() {
        *v = *v - total;
    }
    Ok(())
}

/// Forward recursion: `alpha[0]` concentrates on state 0, each later step is
/// the normalized gamma-weighted sum over predecessors.
pub fn forward<S: Scalar>(gamma: &[Vec<[S; 2]>], t: &Trellis) -> Result<Vec<Vec<S>>> {
    let steps = gamma.len();
    let n = t.n_states();
    let mut alpha = vec![vec![S::neg_infinity(); n]; steps + 1];
    alpha[0][0] = S::zero();
    for k in 0..steps {
        let (head, tail) = alpha.split_at_mut(k + 1);
        let prev = &head[k];
        let next = &mut tail[0];
        for s in 0..n {
            if prev[s] == S::neg_infinity() {
                continue;
            }
            for u in 0..2usize {
                let ns = t.next_state[s][u];
                let m = prev[s] + gamma[k][s][u];
                next[ns] = lse2(next[ns], m);
            }
        }
        normalize_step(next)?;
    }
    Ok(alpha)
}

/// Backward recursion. With `terminated` the terminal distribution
/// concentrates on state 0 (tail bits guarantee it); otherwise it is
/// uniform. Normalized per step like the forward pass.
pub fn backward<S: Scalar>(
    gamma: &[Vec<[S; 2]>],
    t: &Trellis,
    terminated: bool,
) -> Result<Vec<Vec<S>>> {
    let steps = gamma.len();
    let n = t.n_states();
    let mut beta = vec![vec![S::neg_infinity(); n]; steps + 1];
    if terminated {
        beta[steps][0] = S::zero();
    } else {
        let uniform = -S::cast(n as f64).ln();
        for v in beta[steps].iter_mut() {
            *v = uniform;
        }
    }
    for k in (0..steps).rev() {
        let (head, tail) = beta.split_at_mut(k + 1);
        let cur = &mut head[k];
        let next = &tail[0];
        for s in 0..n {
            let mut acc = S::neg_infinity();
            for u in 0..2usize {
                let ns = t.next_state[s][u];
                if next[ns] == S::neg_infinity() {
                    continue;
                }
                acc = lse2(acc, next[ns] + gamma[k][s][u]);
            }
            cur[s] = acc;
        }
        normalize_step(cur)?;
    }
    Ok(beta)
}

/// Per-step posterior LLRs: log of the ratio of input-1 transition mass to
/// input-0 transition mass.
pub fn llr<S: Scalar>(
    alpha: &[Vec<S>],
    beta: &[Vec<S>],
    gamma: &[Vec<[S; 2]>],
    t: &Trellis,
) -> Result<Vec<S>> {
    let steps = gamma.len();
    let mut out = Vec::with_capacity(steps);
    for k in 0..steps {
        let mut num = S::neg_infinity();
        let mut den = S::neg_infinity();
        for s in 0..t.n_states() {
            if alpha[k][s] == S::neg_infinity() {
                continue;
            }
            for u in 0..2usize {
                let ns = t.next_state[s][u];
                let m = alpha[k][s] + gamma[k][s][u] + beta[k + 1][ns];
                if u == 1 {
                    num = lse2(num, m);
                } else {
                    den = lse2(den, m);
                }
            }
        }
        if num == S::neg_infinity() && den == S::neg_infinity() {
            return Err(Error::Numerical("both posterior sums vanished".into()));
        }
        out.push(num - den);
    }
    Ok(out)
}

/// One full Log-MAP pass over a constituent code.
pub fn constituent_decode<S: Scalar>(
    sys_llr: &[S],
    par_llr: &[S],
    prior: &[S],
    t: &Trellis,
    terminated: bool,
) -> Result<DecoderState<S>> {
    let gamma = branch_metrics(sys_llr, par_llr, prior, t)?;
    let alpha = forward(&gamma, t)?;
    let beta = backward(&gamma, t, terminated)?;
    let posterior = llr(&alpha, &beta, &gamma, t)?;
    Ok(DecoderState {
        alpha,
        beta,
        gamma,
        llr: posterior,
    })
}

fn hard<S: Scalar>(l: &[S]) -> Vec<u8> {
    l.iter().map(|&x| u8::from(x > S::zero())).collect()
}

/// Iterative turbo decoding with per-iteration hard-decision traces.
///
/// Inputs are channel LLRs in this module's convention (positive = bit 1):
/// `sys_llr` and `p1_llr` cover information plus tail positions, `p2_llr`
/// the information positions only. Returns the decoded information bits,
/// the number of iterations consumed, and the disagreement count between
/// the two decoders' hard decisions after each iteration.
pub fn turbo_decode_traced<S: Scalar>(
    sys_llr: &[S],
    p1_llr: &[S],
    p2_llr: &[S],
    t: &Trellis,
    il: &Interleaver,
    max_iters: usize,
) -> Result<(Vec<u8>, usize, Vec<usize>)> {
    if max_iters < 1 {
        return Err(Error::Parameter("max_iters must be >= 1".into()));
    }
    let k = il.len();
    let steps1 = k + t.memory;
    if sys_llr.len() != steps1 || p1_llr.len() != steps1 || p2_llr.len() != k {
        return Err(Error::InputShape(format!(
            "codeword LLR lengths ({}, {}, {}) do not match K={} and memory={}",
            sys_llr.len(),
            p1_llr.len(),
            p2_llr.len(),
            k,
            t.memory
        )));
    }
    let sys_info = &sys_llr[..k];
    let sys_perm = il.interleave(sys_info)?;
    let mut prior1 = vec![S::zero(); steps1];
    let mut disagreements = Vec::new();
    let mut decision = Vec::new();
    let mut iters_used = max_iters;
    for iter in 1..=max_iters {
        let d1 = constituent_decode(sys_llr, p1_llr, &prior1, t, true)?;
        let mut extrinsic1 = Vec::with_capacity(k);
        for i in 0..k {
            extrinsic1.push(d1.llr[i] - sys_llr[i] - prior1[i]);
        }
        let prior2 = il.interleave(&extrinsic1)?;
        let d2 = constituent_decode(&sys_perm, p2_llr, &prior2, t, false)?;
        let mut extrinsic2 = Vec::with_capacity(k);
        for i in 0..k {
            extrinsic2.push(d2.llr[i] - sys_perm[i] - prior2[i]);
        }
        let feedback = il.deinterleave(&extrinsic2)?;
        prior1[..k].copy_from_slice(&feedback);

        let hard1 = hard(&d1.llr[..k]);
        let llr2_deint = il.deinterleave(&d2.llr)?;
        let hard2 = hard(&llr2_deint);
        let diff = hard1
            .iter()
            .zip(&hard2)
            .filter(|(a, b)| a != b)
            .count();
        disagreements.push(diff);
        decision = hard2;
        if diff == 0 {
            iters_used = iter;
            break;
        }
    }
    Ok((decision, iters_used, disagreements))
}

/// Iterative turbo decoding; stops early once the two decoders' hard
/// decisions agree, and returns decoder 2's deinterleaved decisions.
pub fn turbo_decode<S: Scalar>(
    sys_llr: &[S],
    p1_llr: &[S],
    p2_llr: &[S],
    t: &Trellis,
    il: &Interleaver,
    max_iters: usize,
) -> Result<(Vec<u8>, usize)> {
    let (bits, iters, _) =
        turbo_decode_traced(sys_llr, p1_llr, p2_llr, t, il, max_iters)?;
    Ok((bits, iters))
}
