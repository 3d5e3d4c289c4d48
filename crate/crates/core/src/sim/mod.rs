//! Importance-sampling Monte Carlo under phenomenological noise.
//!
//! Failure probabilities p_L(w_q, w_m) are estimated per stratum of fixed
//! qubit-error weight w_q and measurement-error weight w_m, then recombined
//! with binomial occurrence probabilities into Pr(p).

mod output;
mod stats;

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{BitVec, Gf4, PauliVec};
use crate::sm_code::{encode_stabilizers, InfoSetDecoder, MeasuredStabilizerSet, SmCode, SmDecoder, SmLookupDecoder};
use crate::stabilizer::{for_each_pauli_of_weight, QuantumLookupDecoder, StabilizerCode};
use crate::util::{binomial, next_combination};

pub use output::{
    manifest_json, sha256_hex, write_results_csv, write_strata_csv, ResultRow, RunManifest, StratumRow,
};
pub use stats::{binomial_tail, binomial_weight, interval95, wilson_interval, Z95};

/// Which error types are active.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    MeasurementOnly,
    MeasurementPlusQubit,
}

impl ModelKind {
    pub fn label(self) -> &'static str {
        match self {
            ModelKind::MeasurementOnly => "meas",
            ModelKind::MeasurementPlusQubit => "combined",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub kind: ModelKind,
    pub p_m: f64,
    /// p_q = p_m / qubit_ratio in the combined model.
    pub qubit_ratio: f64,
}

impl NoiseModel {
    pub fn measurement_only(p_m: f64) -> Self {
        NoiseModel {
            kind: ModelKind::MeasurementOnly,
            p_m,
            qubit_ratio: 5.0,
        }
    }

    pub fn combined(p_m: f64, qubit_ratio: f64) -> Self {
        NoiseModel {
            kind: ModelKind::MeasurementPlusQubit,
            p_m,
            qubit_ratio,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p_m) {
            return Err(Error::InvalidParameter(format!("p_m = {} out of [0, 1]", self.p_m)));
        }
        if self.qubit_ratio.is_nan() || self.qubit_ratio <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "qubit ratio must be positive, got {}",
                self.qubit_ratio
            )));
        }
        Ok(())
    }

    pub fn p_q(&self) -> f64 {
        match self.kind {
            ModelKind::MeasurementOnly => 0.0,
            ModelKind::MeasurementPlusQubit => self.p_m / self.qubit_ratio,
        }
    }
}

/// How measured syndromes are decoded.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SmDecoderKind {
    /// Bounded-distance table; misses keep the raw pivot estimate.
    Bounded,
    /// Bounded-distance table, misses resolved by information-set search.
    MinWeight { order: usize },
}

/// One stabilizer code, SM code and decoder pair under simulation.
#[derive(Clone, Debug)]
pub struct SimSystem {
    id: String,
    code: Arc<StabilizerCode>,
    q_dec: Arc<QuantumLookupDecoder>,
    sm: SmCode,
    ms: MeasuredStabilizerSet,
    sm_dec: SmDecoder,
}

impl SimSystem {
    /// The SM table corrects up to ⌊(d_SM − 1)/2⌋ errors.
    pub fn new(
        id: impl Into<String>,
        code: Arc<StabilizerCode>,
        q_dec: Arc<QuantumLookupDecoder>,
        sm: SmCode,
        kind: SmDecoderKind,
    ) -> Result<Self> {
        let ms = encode_stabilizers(&code, &sm)?;
        let table = SmLookupDecoder::build(&sm, sm.correctable())?;
        let sm_dec = match kind {
            SmDecoderKind::Bounded => SmDecoder::Bounded(table),
            SmDecoderKind::MinWeight { order } => {
                SmDecoder::MinWeight(table, InfoSetDecoder::new(&sm, order)?)
            }
        };
        Ok(SimSystem {
            id: id.into(),
            code,
            q_dec,
            sm,
            ms,
            sm_dec,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn code(&self) -> &StabilizerCode {
        &self.code
    }

    pub fn sm(&self) -> &SmCode {
        &self.sm
    }

    pub fn measured_set(&self) -> &MeasuredStabilizerSet {
        &self.ms
    }

    pub fn sm_decoder(&self) -> &SmDecoder {
        &self.sm_dec
    }

    pub fn n_qubits(&self) -> usize {
        self.code.n()
    }

    pub fn n_meas(&self) -> usize {
        self.sm.n_sm()
    }
}

/// Uniformly random `w`-subset of `0..n_sites`, ascending.
pub fn sample_weighted_error<R: Rng + ?Sized>(n_sites: usize, w: usize, rng: &mut R) -> Result<Vec<usize>> {
    if w > n_sites {
        return Err(Error::InvalidParameter(format!(
            "weight {w} exceeds {n_sites} sites"
        )));
    }
    let mut v = index::sample(rng, n_sites, w).into_vec();
    v.sort_unstable();
    Ok(v)
}

const NONTRIVIAL: [Gf4; 3] = [Gf4::One, Gf4::OmegaBar, Gf4::Omega];

/// Weight-`w` Pauli error: uniform support, each site X, Y or Z uniformly.
pub fn sample_pauli_error<R: Rng + ?Sized>(n: usize, w: usize, rng: &mut R) -> Result<PauliVec> {
    let sites = sample_weighted_error(n, w, rng)?;
    let mut e = PauliVec::identity(n);
    for q in sites {
        e.set(q, NONTRIVIAL[rng.random_range(0..3)]);
    }
    Ok(e)
}

/// One decoding round: measure, decode the SM code, decode the stabilizer
/// code, apply the correction. Returns true on failure, i.e. when the
/// residual is not a stabilizer or the recovered syndrome has no entry in
/// the quantum lookup table.
pub fn run_trial(sys: &SimSystem, qubit_error: &PauliVec, meas_error: &BitVec) -> Result<bool> {
    if qubit_error.len() != sys.n_qubits() {
        return Err(Error::LengthMismatch {
            expected: sys.n_qubits(),
            got: qubit_error.len(),
        });
    }
    if meas_error.len() != sys.n_meas() {
        return Err(Error::LengthMismatch {
            expected: sys.n_meas(),
            got: meas_error.len(),
        });
    }
    Ok(trial(sys, qubit_error, meas_error))
}

#[inline]
fn trial(sys: &SimSystem, qubit_error: &PauliVec, meas_error: &BitVec) -> bool {
    let measured = sys.ms.measured_syndrome_unchecked(qubit_error, meas_error);
    let decoded = sys.sm_dec.decode(&sys.sm, &measured);
    match sys.q_dec.decode(&decoded.syndrome) {
        None => true,
        Some(correction) => sys.code.is_logical_failure(&(qubit_error + correction)),
    }
}

/// Trial counts for one (w_q, w_m) stratum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stratum {
    pub w_q: usize,
    pub w_m: usize,
    pub trials: u64,
    pub failures: u64,
    /// Every pattern of this stratum was enumerated once.
    pub exact: bool,
}

impl Stratum {
    pub fn p_l(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.failures as f64 / self.trials as f64
        }
    }

    /// 95% interval; degenerate for exact strata.
    pub fn interval(&self) -> (f64, f64) {
        if self.exact {
            let p = self.p_l();
            (p, p)
        } else {
            interval95(self.failures, self.trials)
        }
    }
}

/// Number of error patterns in a stratum.
pub fn stratum_size(n_qubits: usize, n_meas: usize, w_q: usize, w_m: usize) -> u128 {
    let q = binomial(n_qubits as u64, w_q as u64).saturating_mul(3u128.saturating_pow(w_q as u32));
    q.saturating_mul(binomial(n_meas as u64, w_m as u64))
}

/// RNG for one stratum or chunk: the master seed selects the key, the
/// stream id keeps substreams independent of scheduling.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn stratum_stream(code_index: usize, w_q: usize, w_m: usize) -> u64 {
    ((code_index as u64) << 40) | ((w_q as u64) << 20) | w_m as u64
}

/// Estimates p_L(w_q, w_m). Strata with at most `exhaustive_cap` patterns
/// are enumerated exactly; otherwise `trials` uniform patterns are drawn.
pub fn estimate_pl(
    sys: &SimSystem,
    w_q: usize,
    w_m: usize,
    trials: u64,
    rng: &mut ChaCha8Rng,
    exhaustive_cap: u128,
) -> Result<Stratum> {
    let (n_q, n_m) = (sys.n_qubits(), sys.n_meas());
    if w_q > n_q || w_m > n_m {
        return Err(Error::InvalidParameter(format!(
            "stratum ({w_q}, {w_m}) exceeds ({n_q}, {n_m}) sites"
        )));
    }
    let size = stratum_size(n_q, n_m, w_q, w_m);
    if size <= exhaustive_cap {
        let mut qubit_errors = Vec::with_capacity(size as usize);
        for_each_pauli_of_weight(n_q, w_q, |e| qubit_errors.push(e.clone()));
        let mut failures = 0u64;
        let mut idx: Vec<usize> = (0..w_m).collect();
        loop {
            let m = BitVec::from_indices(n_m, &idx);
            failures += qubit_errors.iter().filter(|e| trial(sys, e, &m)).count() as u64;
            if !next_combination(&mut idx, n_m) {
                break;
            }
        }
        return Ok(Stratum {
            w_q,
            w_m,
            trials: size as u64,
            failures,
            exact: true,
        });
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let mut failures = 0u64;
    for _ in 0..trials {
        let e = sample_pauli_error(n_q, w_q, rng)?;
        let m = BitVec::from_indices(n_m, &sample_weighted_error(n_m, w_m, rng)?);
        if trial(sys, &e, &m) {
            failures += 1;
        }
    }
    Ok(Stratum {
        w_q,
        w_m,
        trials,
        failures,
        exact: false,
    })
}

/// p_L estimates over a rectangle of strata.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlTable {
    pub n_qubits: usize,
    pub n_meas: usize,
    pub wq_max: usize,
    pub wm_max: usize,
    pub strata: BTreeMap<(usize, usize), Stratum>,
}

impl PlTable {
    pub fn new(n_qubits: usize, n_meas: usize) -> Self {
        PlTable {
            n_qubits,
            n_meas,
            wq_max: 0,
            wm_max: 0,
            strata: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, s: Stratum) {
        self.wq_max = self.wq_max.max(s.w_q);
        self.wm_max = self.wm_max.max(s.w_m);
        self.strata.insert((s.w_q, s.w_m), s);
    }

    pub fn get(&self, w_q: usize, w_m: usize) -> Option<&Stratum> {
        self.strata.get(&(w_q, w_m))
    }
}

/// Pr(p) with a 95% band and the truncated probability mass.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrEstimate {
    pub pr: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Probability of an error outside the stratum rectangle; also added to `ci_high`.
    pub tail: f64,
}

/// Σ p_L(w_q, w_m) A_{w_q}(p_q) A_{w_m}(p_m) over the table's rectangle
/// (w_q = 0 only in the measurement-only model). The band sums the stratum
/// interval ends with the same weights.
pub fn combine_pr(table: &PlTable, noise: &NoiseModel) -> Result<PrEstimate> {
    noise.validate()?;
    let wq_max = match noise.kind {
        ModelKind::MeasurementOnly => 0,
        ModelKind::MeasurementPlusQubit => table.wq_max,
    };
    let (p_q, p_m) = (noise.p_q(), noise.p_m);
    let (mut pr, mut lo, mut hi) = (0.0, 0.0, 0.0);
    for w_q in 0..=wq_max {
        let a_q = binomial_weight(table.n_qubits, w_q, p_q);
        for w_m in 0..=table.wm_max {
            let s = table.get(w_q, w_m).ok_or_else(|| {
                Error::InvalidParameter(format!("missing stratum ({w_q}, {w_m})"))
            })?;
            let a = a_q * binomial_weight(table.n_meas, w_m, p_m);
            let (l, h) = s.interval();
            pr += a * s.p_l();
            lo += a * l;
            hi += a * h;
        }
    }
    let t_q = binomial_tail(table.n_qubits, wq_max, p_q);
    let t_m = binomial_tail(table.n_meas, table.wm_max, p_m);
    let tail = t_q + t_m - t_q * t_m;
    Ok(PrEstimate {
        pr: pr.min(1.0),
        ci_low: lo.min(1.0),
        ci_high: (hi + tail).min(1.0),
        tail,
    })
}

/// Plain Monte Carlo estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub trials: u64,
    pub failures: u64,
    pub p: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

const MC_CHUNK: u64 = 4096;

/// Direct sampling: every qubit and measured bit fails independently at its
/// nominal rate. Used to cross-check [`combine_pr`].
pub fn direct_mc(sys: &SimSystem, noise: &NoiseModel, trials: u64, seed: u64) -> Result<McEstimate> {
    noise.validate()?;
    let (n_q, n_m) = (sys.n_qubits(), sys.n_meas());
    let (p_q, p_m) = (noise.p_q(), noise.p_m);
    let chunks = trials.div_ceil(MC_CHUNK);
    let failures: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = substream(seed, c);
            let count = MC_CHUNK.min(trials - c * MC_CHUNK);
            let mut fails = 0u64;
            for _ in 0..count {
                let mut e = PauliVec::identity(n_q);
                for q in 0..n_q {
                    if rng.random_bool(p_q) {
                        e.set(q, NONTRIVIAL[rng.random_range(0..3)]);
                    }
                }
                let mut m = BitVec::zeros(n_m);
                for k in 0..n_m {
                    if rng.random_bool(p_m) {
                        m.set(k, true);
                    }
                }
                if trial(sys, &e, &m) {
                    fails += 1;
                }
            }
            fails
        })
        .sum();
    let (ci_low, ci_high) = wilson_interval(failures, trials, Z95);
    Ok(McEstimate {
        trials,
        failures,
        p: if trials == 0 { 0.0 } else { failures as f64 / trials as f64 },
        ci_low,
        ci_high,
    })
}

/// Settings for [`run_sweep`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub seed: u64,
    pub grid: Vec<f64>,
    pub model: ModelKind,
    pub qubit_ratio: f64,
    /// Sampled trials per stratum.
    pub trials: u64,
    /// Initial truncation weights; raised while the tail is too large.
    pub wq_max: usize,
    pub wm_max: usize,
    /// Strata with at most this many patterns are enumerated.
    pub exhaustive_cap: u128,
    /// Target bound on tail / Pr at every grid point.
    pub tail_ratio: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            seed: 0,
            grid: log_grid(1e-3, 1e-1, 9),
            model: ModelKind::MeasurementOnly,
            qubit_ratio: 5.0,
            trials: 10_000,
            wq_max: 4,
            wm_max: 5,
            exhaustive_cap: 1_000_000,
            tail_ratio: 1e-3,
        }
    }
}

impl SweepConfig {
    pub fn noise(&self, p_m: f64) -> NoiseModel {
        NoiseModel {
            kind: self.model,
            p_m,
            qubit_ratio: self.qubit_ratio,
        }
    }
}

/// `points` values from `start` to `stop` inclusive, evenly spaced in log.
pub fn log_grid(start: f64, stop: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let (a, b) = (start.ln(), stop.ln());
            (0..points)
                .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp())
                .collect()
        }
    }
}

/// Evenly spaced values from `start` to `stop` inclusive.
pub fn linear_grid(start: f64, stop: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..points)
            .map(|i| start + (stop - start) * i as f64 / (points - 1) as f64)
            .collect(),
    }
}

/// Sweep output for one system.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodeSweep {
    pub code_id: String,
    pub table: PlTable,
    pub points: Vec<(NoiseModel, PrEstimate)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub config: SweepConfig,
    pub codes: Vec<CodeSweep>,
}

/// Estimates Pr(p) over the grid for every system.
///
/// Strata start at the configured truncation and grow, one weight at a
/// time in the dimension with the larger tail, until the tail is below
/// `tail_ratio` × Pr at every grid point or every weight is covered.
pub fn run_sweep(systems: &[SimSystem], cfg: &SweepConfig) -> Result<SweepResult> {
    if cfg.grid.is_empty() {
        return Err(Error::InvalidParameter("noise grid is empty".into()));
    }
    for &p in &cfg.grid {
        cfg.noise(p).validate()?;
    }
    let codes = systems
        .par_iter()
        .enumerate()
        .map(|(ci, sys)| sweep_one(ci, sys, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        config: cfg.clone(),
        codes,
    })
}

fn sweep_one(ci: usize, sys: &SimSystem, cfg: &SweepConfig) -> Result<CodeSweep> {
    let (n_q, n_m) = (sys.n_qubits(), sys.n_meas());
    let mut wq = match cfg.model {
        ModelKind::MeasurementOnly => 0,
        ModelKind::MeasurementPlusQubit => cfg.wq_max.min(n_q),
    };
    let mut wm = cfg.wm_max.min(n_m);
    let mut table = PlTable::new(n_q, n_m);
    loop {
        let missing: Vec<(usize, usize)> = (0..=wq)
            .flat_map(|a| (0..=wm).map(move |b| (a, b)))
            .filter(|k| !table.strata.contains_key(k))
            .collect();
        let done = missing
            .par_iter()
            .map(|&(a, b)| {
                let mut rng = substream(cfg.seed, stratum_stream(ci, a, b));
                estimate_pl(sys, a, b, cfg.trials, &mut rng, cfg.exhaustive_cap)
            })
            .collect::<Result<Vec<_>>>()?;
        for s in done {
            table.insert(s);
        }
        let points = cfg
            .grid
            .iter()
            .map(|&p| {
                let noise = cfg.noise(p);
                combine_pr(&table, &noise).map(|e| (noise, e))
            })
            .collect::<Result<Vec<_>>>()?;
        let worst = points
            .iter()
            .filter(|(_, e)| e.tail > cfg.tail_ratio * e.pr)
            .map(|(n, _)| {
                (
                    binomial_tail(n_q, wq, n.p_q()),
                    binomial_tail(n_m, wm, n.p_m),
                )
            })
            .fold(None::<(f64, f64)>, |acc, (tq, tm)| {
                Some(acc.map_or((tq, tm), |(a, b)| (a.max(tq), b.max(tm))))
            });
        let grow_q = cfg.model == ModelKind::MeasurementPlusQubit && wq < n_q;
        let grow_m = wm < n_m;
        match worst {
            Some((tq, tm)) if grow_q && (tq > tm || !grow_m) => wq += 1,
            Some(_) if grow_m => wm += 1,
            _ => {
                return Ok(CodeSweep {
                    code_id: sys.id().to_string(),
                    table,
                    points,
                })
            }
        }
    }
}

/// Builds the standard system set: one per named SM code, all sharing the
/// stabilizer code and its lookup decoder of radius `q_radius`.
pub fn build_systems(
    code: StabilizerCode,
    q_radius: usize,
    sm_codes: Vec<(String, SmCode)>,
    kind: SmDecoderKind,
) -> Result<Vec<SimSystem>> {
    let q_dec = Arc::new(QuantumLookupDecoder::build(&code, q_radius)?);
    let code = Arc::new(code);
    sm_codes
        .into_iter()
        .map(|(id, sm)| SimSystem::new(id, code.clone(), q_dec.clone(), sm, kind))
        .collect()
}
