//! Shot-level Pauli-frame sampling of Clifford circuits under Pauli noise.
//!
//! One noiseless reference outcome comes from a stabilizer tableau. Each shot
//! then carries a Pauli frame, the difference between the noisy run and the
//! reference. Frames start as random Z operators, which act trivially on
//! `|0...0>` but make random measurement outcomes come out with the right
//! statistics. Shots are processed 64 at a time, one bit per shot.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::{word_count, BitString};
use crate::error::{Error, Result};
use crate::pauli::{Letter, Tpb};
use crate::sim::{splitmix, Circuit, Gate, PauliRates, ProbDist};

/// Largest register the frame sampler accepts.
pub const FRAME_LIMIT: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Op {
    H(usize),
    S(usize),
    X(usize),
    Y(usize),
    Z(usize),
    Cnot(usize, usize),
    Cz(usize, usize),
}

/// A circuit restricted to Clifford gates.
#[derive(Clone, Debug, PartialEq)]
pub struct CliffordCircuit {
    num_qubits: usize,
    gates: Vec<Gate>,
}

impl CliffordCircuit {
    /// Accepts H, S, X, Y, Z, CNOT, CZ and iSWAP; rotations are rejected.
    pub fn new(c: &Circuit) -> Result<Self> {
        if c.num_qubits() > FRAME_LIMIT {
            return Err(Error::Capacity {
                what: "frame simulation",
                requested: c.num_qubits(),
                limit: FRAME_LIMIT,
            });
        }
        if let Some(g) = c.gates().iter().find(|g| g.is_rotation()) {
            return Err(Error::Argument(format!("gate `{g}` is not Clifford")));
        }
        Ok(Self {
            num_qubits: c.num_qubits(),
            gates: c.gates().to_vec(),
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }
}

impl TryFrom<&Circuit> for CliffordCircuit {
    type Error = Error;
    fn try_from(c: &Circuit) -> Result<Self> {
        Self::new(c)
    }
}

fn ops(g: &Gate) -> Vec<Op> {
    match *g {
        Gate::H(q) => vec![Op::H(q)],
        Gate::S(q) => vec![Op::S(q)],
        Gate::X(q) => vec![Op::X(q)],
        Gate::Y(q) => vec![Op::Y(q)],
        Gate::Z(q) => vec![Op::Z(q)],
        Gate::Cnot(a, b) => vec![Op::Cnot(a, b)],
        Gate::Cz(a, b) => vec![Op::Cz(a, b)],
        // Equal to iSWAP exactly, no global phase.
        Gate::ISwap(a, b) => vec![
            Op::H(b),
            Op::Cnot(b, a),
            Op::Cnot(a, b),
            Op::H(a),
            Op::S(a),
            Op::S(b),
        ],
        Gate::Rx(..) | Gate::Ry(..) | Gate::Rz(..) => unreachable!("rejected on construction"),
    }
}

/// Pauli noise for the frame sampler, with its placement.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliNoiseSpec {
    pub rates: PauliRates,
    /// Apply the channel to the touched qubits after every gate.
    pub after_gates: bool,
    /// Apply the channel to every qubit right before measurement.
    pub before_measurement: bool,
}

impl Default for PauliNoiseSpec {
    fn default() -> Self {
        Self::new(PauliRates::default())
    }
}

impl PauliNoiseSpec {
    pub fn new(rates: PauliRates) -> Self {
        Self {
            rates,
            after_gates: true,
            before_measurement: true,
        }
    }

    pub fn noiseless() -> Self {
        Self::default()
    }

    /// Total rate `rate` with `pz = 10 px = 10 py`.
    pub fn dephasing_biased(rate: f64) -> Result<Self> {
        Ok(Self::new(PauliRates::dephasing_biased(rate)?))
    }

    pub fn bias_ratio(&self) -> f64 {
        self.rates.bias_ratio()
    }
}

/// A deterministic error inserted after gate `after_gate` (or before the
/// first gate when `None`), on top of any sampled noise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Injection {
    pub after_gate: Option<usize>,
    pub qubit: usize,
    pub letter: Letter,
}

/// Aaronson-Gottesman tableau, used once per circuit for the reference outcome.
struct Tableau {
    n: usize,
    words: usize,
    // 2n generator rows plus one scratch row.
    x: Vec<u64>,
    z: Vec<u64>,
    r: Vec<bool>,
}

impl Tableau {
    fn new(n: usize) -> Self {
        let words = word_count(n);
        let rows = 2 * n + 1;
        let mut t = Self {
            n,
            words,
            x: vec![0; rows * words],
            z: vec![0; rows * words],
            r: vec![false; rows],
        };
        for q in 0..n {
            t.x[q * words + q / 64] |= 1 << (q % 64);
            t.z[(n + q) * words + q / 64] |= 1 << (q % 64);
        }
        t
    }

    fn bit(v: &[u64], words: usize, row: usize, q: usize) -> bool {
        (v[row * words + q / 64] >> (q % 64)) & 1 == 1
    }

    fn apply(&mut self, op: Op) {
        let w = self.words;
        for row in 0..2 * self.n {
            let xb = |v: &Vec<u64>, q: usize| Self::bit(v, w, row, q);
            match op {
                Op::H(a) => {
                    let (xa, za) = (xb(&self.x, a), xb(&self.z, a));
                    self.r[row] ^= xa & za;
                    self.set(row, a, za, xa);
                }
                Op::S(a) => {
                    let (xa, za) = (xb(&self.x, a), xb(&self.z, a));
                    self.r[row] ^= xa & za;
                    self.set(row, a, xa, za ^ xa);
                }
                Op::X(a) => self.r[row] ^= xb(&self.z, a),
                Op::Z(a) => self.r[row] ^= xb(&self.x, a),
                Op::Y(a) => self.r[row] ^= xb(&self.x, a) ^ xb(&self.z, a),
                Op::Cnot(a, b) => {
                    let (xa, za) = (xb(&self.x, a), xb(&self.z, a));
                    let (xbb, zb) = (xb(&self.x, b), xb(&self.z, b));
                    self.r[row] ^= xa & zb & !(xbb ^ za);
                    self.set(row, b, xbb ^ xa, zb);
                    self.set(row, a, xa, za ^ zb);
                }
                Op::Cz(..) => unreachable!("expanded before use"),
            }
        }
    }

    fn apply_gate(&mut self, op: Op) {
        match op {
            Op::Cz(a, b) => {
                self.apply(Op::H(b));
                self.apply(Op::Cnot(a, b));
                self.apply(Op::H(b));
            }
            other => self.apply(other),
        }
    }

    fn set(&mut self, row: usize, q: usize, xv: bool, zv: bool) {
        let i = row * self.words + q / 64;
        let m = 1u64 << (q % 64);
        self.x[i] = (self.x[i] & !m) | if xv { m } else { 0 };
        self.z[i] = (self.z[i] & !m) | if zv { m } else { 0 };
    }

    /// Left-multiplies row `h` by row `i`, tracking the sign.
    fn rowsum(&mut self, h: usize, i: usize) {
        let w = self.words;
        let mut acc: i64 = 0;
        for k in 0..w {
            let (x1, z1) = (self.x[i * w + k], self.z[i * w + k]);
            let (x2, z2) = (self.x[h * w + k], self.z[h * w + k]);
            let y = x1 & z1;
            let xo = x1 & !z1;
            let zo = !x1 & z1;
            let plus = (y & z2 & !x2) | (xo & x2 & z2) | (zo & x2 & !z2);
            let minus = (y & x2 & !z2) | (xo & z2 & !x2) | (zo & x2 & z2);
            acc += plus.count_ones() as i64 - minus.count_ones() as i64;
            self.x[h * w + k] = x1 ^ x2;
            self.z[h * w + k] = z1 ^ z2;
        }
        let total = 2 * self.r[h] as i64 + 2 * self.r[i] as i64 + acc;
        self.r[h] = total.rem_euclid(4) == 2;
    }

    /// Z measurement of qubit `a`; random outcomes are resolved to 0.
    fn measure(&mut self, a: usize) -> bool {
        let (n, w) = (self.n, self.words);
        if let Some(p) = (n..2 * n).find(|&p| Self::bit(&self.x, w, p, a)) {
            for i in 0..2 * n {
                if i != p && Self::bit(&self.x, w, i, a) {
                    self.rowsum(i, p);
                }
            }
            let (src, dst) = (p * w, (p - n) * w);
            self.x.copy_within(src..src + w, dst);
            self.z.copy_within(src..src + w, dst);
            self.r[p - n] = self.r[p];
            self.x[src..src + w].fill(0);
            self.z[src..src + w].fill(0);
            self.z[src + a / 64] |= 1 << (a % 64);
            self.r[p] = false;
            false
        } else {
            let s = 2 * n;
            self.x[s * w..(s + 1) * w].fill(0);
            self.z[s * w..(s + 1) * w].fill(0);
            self.r[s] = false;
            for i in 0..n {
                if Self::bit(&self.x, w, i, a) {
                    self.rowsum(s, i + n);
                }
            }
            self.r[s]
        }
    }
}

/// One valid noiseless Z-basis outcome of `c`.
pub fn reference_sample(c: &CliffordCircuit) -> BitString {
    let mut t = Tableau::new(c.num_qubits);
    for g in &c.gates {
        for op in ops(g) {
            t.apply_gate(op);
        }
    }
    let mut out = BitString::zeros(c.num_qubits);
    for q in 0..c.num_qubits {
        out.set(q, t.measure(q));
    }
    out
}

/// Bernoulli slots visited in order, with geometric skips between hits.
struct EventStream {
    log_q: f64,
    countdown: u64,
    rates: PauliRates,
}

impl EventStream {
    fn new(rates: PauliRates, rng: &mut ChaCha8Rng) -> Self {
        let p = rates.total();
        let log_q = (1.0 - p).ln();
        let mut s = Self {
            log_q,
            countdown: 0,
            rates,
        };
        s.countdown = s.gap(rng);
        s
    }

    fn gap(&self, rng: &mut ChaCha8Rng) -> u64 {
        if self.log_q == f64::NEG_INFINITY {
            return 0;
        }
        if self.log_q == 0.0 {
            return u64::MAX;
        }
        let u: f64 = 1.0 - rng.random::<f64>(); // (0, 1]
        let g = (u.ln() / self.log_q).floor();
        if g >= u64::MAX as f64 { u64::MAX } else { g as u64 }
    }

    /// Applies the errors falling in the next 64 slots to one qubit's frame words.
    fn apply(&mut self, x: &mut u64, z: &mut u64, rng: &mut ChaCha8Rng) {
        while self.countdown < 64 {
            let bit = 1u64 << self.countdown;
            let r: f64 = rng.random::<f64>() * self.rates.total();
            if r < self.rates.px {
                *x ^= bit;
            } else if r < self.rates.px + self.rates.py {
                *x ^= bit;
                *z ^= bit;
            } else {
                *z ^= bit;
            }
            let g = self.gap(rng);
            self.countdown = self.countdown.saturating_add(1).saturating_add(g);
        }
        self.countdown -= 64;
    }
}

fn apply_frame(op: Op, x: &mut [u64], z: &mut [u64]) {
    match op {
        Op::H(a) => std::mem::swap(&mut x[a], &mut z[a]),
        Op::S(a) => z[a] ^= x[a],
        Op::X(_) | Op::Y(_) | Op::Z(_) => {}
        Op::Cnot(c, t) => {
            x[t] ^= x[c];
            z[c] ^= z[t];
        }
        Op::Cz(a, b) => {
            z[a] ^= x[b];
            z[b] ^= x[a];
        }
    }
}

fn inject(x: &mut [u64], z: &mut [u64], inj: &Injection, live: u64) {
    match inj.letter {
        Letter::I => {}
        Letter::X => x[inj.qubit] ^= live,
        Letter::Z => z[inj.qubit] ^= live,
        Letter::Y => {
            x[inj.qubit] ^= live;
            z[inj.qubit] ^= live;
        }
    }
}

const SHOTS_PER_BATCH: u64 = 64;

fn batch_rng(seed: u64, batch: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(splitmix(batch ^ 0x6672_616d_6573_6565));
    rng
}

fn run_batch(
    c: &CliffordCircuit,
    plan: &[Vec<Op>],
    noise: &PauliNoiseSpec,
    injections: &[Injection],
    reference: &BitString,
    live_shots: u64,
    mut rng: ChaCha8Rng,
) -> BTreeMap<BitString, u64> {
    let n = c.num_qubits;
    let live = if live_shots == 64 { u64::MAX } else { (1u64 << live_shots) - 1 };
    let mut x = vec![0u64; n];
    let mut z: Vec<u64> = (0..n).map(|_| rng.random::<u64>()).collect();
    let noisy = !noise.rates.is_zero();
    let mut events = noisy.then(|| EventStream::new(noise.rates, &mut rng));

    for inj in injections.iter().filter(|i| i.after_gate.is_none()) {
        inject(&mut x, &mut z, inj, live);
    }
    for (gi, (g, gops)) in c.gates.iter().zip(plan).enumerate() {
        for &op in gops {
            apply_frame(op, &mut x, &mut z);
        }
        if let (Some(ev), true) = (events.as_mut(), noise.after_gates) {
            for q in g.qubits() {
                ev.apply(&mut x[q], &mut z[q], &mut rng);
            }
        }
        for inj in injections.iter().filter(|i| i.after_gate == Some(gi)) {
            inject(&mut x, &mut z, inj, live);
        }
    }
    if let (Some(ev), true) = (events.as_mut(), noise.before_measurement) {
        for q in 0..n {
            ev.apply(&mut x[q], &mut z[q], &mut rng);
        }
    }

    let mut counts = BTreeMap::new();
    let words = word_count(n);
    for s in 0..live_shots {
        let mut w = reference.words().to_vec();
        for (q, xq) in x.iter().enumerate() {
            w[q / 64] ^= ((xq >> s) & 1) << (q % 64);
        }
        debug_assert_eq!(w.len(), words);
        *counts.entry(BitString::from_words(n, w)).or_insert(0) += 1;
    }
    counts
}

/// Samples `shots` Z-basis outcomes of `c` under `noise`.
pub fn frame_sample(
    c: &CliffordCircuit,
    noise: &PauliNoiseSpec,
    shots: u64,
    seed: u64,
) -> Result<ProbDist> {
    frame_sample_with(c, noise, shots, seed, &[])
}

/// `frame_sample` with additional deterministic errors.
pub fn frame_sample_with(
    c: &CliffordCircuit,
    noise: &PauliNoiseSpec,
    shots: u64,
    seed: u64,
    injections: &[Injection],
) -> Result<ProbDist> {
    if shots == 0 {
        return Err(Error::Argument("shots must be positive".into()));
    }
    noise.rates.validate()?;
    if let Some(bad) = injections
        .iter()
        .find(|i| i.qubit >= c.num_qubits || i.after_gate.is_some_and(|g| g >= c.gates.len()))
    {
        return Err(Error::Argument(format!("injection {bad:?} is out of range")));
    }
    let plan: Vec<Vec<Op>> = c.gates.iter().map(ops).collect();
    let reference = reference_sample(c);
    let batches = shots.div_ceil(SHOTS_PER_BATCH);
    let counts = (0..batches)
        .into_par_iter()
        .map(|b| {
            let live = (shots - b * SHOTS_PER_BATCH).min(SHOTS_PER_BATCH);
            run_batch(c, &plan, noise, injections, &reference, live, batch_rng(seed, b))
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        });
    ProbDist::from_counts(Tpb::all_z(c.num_qubits), counts)
}

/// `<Z...Z>` of a Z-basis distribution: the signed parity average.
pub fn spin_correlation(dist: &ProbDist) -> Result<f64> {
    if !dist.basis().is_all_z() {
        return Err(Error::Argument(format!(
            "spin correlation needs a Z-basis distribution, got {}",
            dist.basis()
        )));
    }
    let mut acc = 0.0;
    dist.for_each(|o, p| {
        let odd = match o {
            crate::sim::OutcomeRef::Index(i) => i.count_ones() % 2 == 1,
            crate::sim::OutcomeRef::Bits(b) => b.count_ones() % 2 == 1,
        };
        acc += if odd { -p } else { p };
    });
    Ok(acc)
}
