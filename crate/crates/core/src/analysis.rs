//! Reproduction of the d = 4, t = 3 worked example and the success-probability
//! measurements behind it, with plain-text and JSON reports.

use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocol::{self, derive_seed, ProtocolParams, Variant, DEFAULT_SEED};
use crate::qudit_sim::{self, QuditRegister, PRUNE_TOL};

/// Tolerance for matching simulated amplitudes against the closed forms.
pub const EXAMPLE_TOL: f64 = 1e-12;

pub const EXAMPLE_D: u64 = 4;
pub const EXAMPLE_T: usize = 3;
pub const EXAMPLE_SECRET: u64 = 3;
pub const EXAMPLE_SPLIT: [u64; 3] = [3, 0, 0];
pub const DEFAULT_TRIALS: u64 = 10_000;

pub const VERDICT_CONFIRMED: &str = "comment confirmed: outcome uniform, secret not recoverable";
pub const VERDICT_REFUTED: &str = "comment not confirmed: outcome distribution is not uniform";

const fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `QFT^-1 (omega^{3k} |k>)` for d = 4 as written in closed form, in units of 1/2.
/// Row `k` is the input branch, column `j` the coefficient on `|j>`.
pub const EQ7_CLOSED_FORM: [[Complex64; 4]; 4] = [
    [c(1., 0.), c(1., 0.), c(1., 0.), c(1., 0.)],
    [c(0., -1.), c(-1., 0.), c(0., 1.), c(1., 0.)],
    [c(-1., 0.), c(1., 0.), c(-1., 0.), c(1., 0.)],
    [c(0., 1.), c(-1., 0.), c(0., -1.), c(1., 0.)],
];

/// Amplitudes on `|kkk>` after encoding the example, in units of 1/2: `omega^{3k}`.
pub const EQ5_CLOSED_FORM: [Complex64; 4] = [c(1., 0.), c(0., -1.), c(-1., 0.), c(0., 1.)];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeRow {
    /// Basis digits `(k_1, ..., k_t)`.
    pub basis: Vec<usize>,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeTable {
    pub d: usize,
    pub t: usize,
    pub rows: Vec<AmplitudeRow>,
    /// Sum of squared moduli over the listed rows.
    pub norm: f64,
}

impl AmplitudeTable {
    pub fn render_text(&self) -> String {
        let labels: Vec<String> = self.rows.iter().map(|r| basis_label(&r.basis, self.d)).collect();
        let width = labels.iter().map(|l| l.len()).max().unwrap_or(0).max(5);
        let mut out = String::new();
        let _ = writeln!(out, "{:<width$}  amplitude", "basis");
        for (label, row) in labels.iter().zip(&self.rows) {
            let _ = writeln!(out, "{label:<width$}  {}", fmt_complex(c(row.re, row.im)));
        }
        let _ = writeln!(out, "{:<width$}  {}", "norm", fmt_sig(self.norm));
        out
    }
}

fn basis_label(digits: &[usize], d: usize) -> String {
    let sep = if d > 10 { "," } else { "" };
    let inner: Vec<String> = digits.iter().map(|k| k.to_string()).collect();
    format!("|{}>", inner.join(sep))
}

/// Rounds to 12 significant digits; magnitudes below the pruning tolerance print as `0`.
pub fn fmt_sig(x: f64) -> String {
    if x.abs() < PRUNE_TOL {
        return "0".into();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (11 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// `a+bi` / `a-bi` with an explicit sign on the imaginary part.
pub fn fmt_complex(z: Complex64) -> String {
    let im = fmt_sig(z.im);
    let (sign, mag) = match im.strip_prefix('-') {
        Some(rest) => ('-', rest.to_string()),
        None => ('+', im),
    };
    format!("{}{sign}{mag}i", fmt_sig(z.re))
}

/// Non-negligible amplitudes in basis-index order.
pub fn amplitude_table(reg: &QuditRegister) -> AmplitudeTable {
    let rows: Vec<AmplitudeRow> = reg
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(_, a)| a.norm() >= PRUNE_TOL)
        .map(|(i, a)| AmplitudeRow { basis: reg.digits(i), re: a.re, im: a.im })
        .collect();
    let norm = rows.iter().map(|r| r.re * r.re + r.im * r.im).sum();
    AmplitudeTable { d: reg.dim(), t: reg.qudits(), rows, norm }
}

/// Exact probability that agent 1's lone measurement equals the secret.
pub fn success_probability_exact(params: &ProtocolParams) -> Result<f64> {
    let secret = params.resolve()?.expected_secret;
    let reg = protocol::song_final_state(params)?;
    Ok(qudit_sim::marginal(&reg, 1)?.prob(secret as usize))
}

/// Exact probability that the announced results of the all-measure variant sum
/// to the secret.
pub fn repaired_success_probability_exact(params: &ProtocolParams) -> Result<f64> {
    let secret = params.resolve()?.expected_secret;
    let joint = qudit_sim::joint_distribution(&protocol::repaired_final_state(params)?);
    Ok(joint
        .entries
        .iter()
        .filter(|(m, _)| m.iter().sum::<usize>() as u64 % params.d == secret)
        .map(|(_, p)| p)
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub trials: u64,
    pub seed: u64,
    pub estimate: f64,
    /// Binomial standard error `sqrt(p (1 - p) / trials)`.
    pub stderr: f64,
}

/// Fraction of seeded runs of agent 1's lone measurement that hit the secret.
pub fn success_probability_mc(params: &ProtocolParams, trials: u64, seed: u64) -> Result<McEstimate> {
    variant_success_mc(Variant::SongOriginal, params, trials, seed)
}

/// Monte-Carlo success rate of a multi-party variant. Trial `i` runs with
/// `derive_seed(seed, i)`, so the estimate does not depend on thread scheduling.
pub fn variant_success_mc(
    variant: Variant,
    params: &ProtocolParams,
    trials: u64,
    seed: u64,
) -> Result<McEstimate> {
    if trials == 0 {
        return Err(Error::InvalidParams("trials must be at least 1".into()));
    }
    params.validate()?;
    if variant == Variant::SongOriginal {
        return song_success_mc(params, trials, seed);
    }
    let hits = (0..trials)
        .into_par_iter()
        .map(|i| {
            let p = params.clone().with_seed(derive_seed(seed, i));
            protocol::run_variant(variant, &p).map(|tr| u64::from(tr.succeeded()))
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    let estimate = hits as f64 / trials as f64;
    let stderr = (estimate * (1.0 - estimate) / trials as f64).sqrt();
    Ok(McEstimate { trials, seed, estimate, stderr })
}

/// Agent 1's lone measurement is the only random step of
/// [`protocol::run_song_original`], so trial `i` draws from the shared final state
/// with the RNG stream `run_song_original` would use for seed
/// `derive_seed(seed, i)`. Outcomes match per-trial protocol runs exactly.
fn song_success_mc(params: &ProtocolParams, trials: u64, seed: u64) -> Result<McEstimate> {
    use rand::SeedableRng;
    let secret = params.resolve()?.expected_secret as usize;
    let dist = qudit_sim::marginal(&protocol::song_final_state(params)?, 1)?;
    let hits: u64 = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(derive_seed(seed, i));
            u64::from(dist.sample(&mut rng) == secret)
        })
        .sum();
    let estimate = hits as f64 / trials as f64;
    let stderr = (estimate * (1.0 - estimate) / trials as f64).sqrt();
    Ok(McEstimate { trials, seed, estimate, stderr })
}

/// `QFT^-1 (omega^{3k} |k>)` for d = 4 computed by the simulator; same layout
/// as [`EQ7_CLOSED_FORM`] but with the 1/2 factor applied.
pub fn eq7_expansions() -> [[Complex64; 4]; 4] {
    let d = EXAMPLE_D as usize;
    let u = qudit_sim::qft_inv(d);
    let mut out = [[c(0., 0.); 4]; 4];
    for (k, row) in out.iter_mut().enumerate() {
        let mut input = vec![c(0., 0.); d];
        input[k] = qudit_sim::root_of_unity(d, (EXAMPLE_SECRET as usize * k) as i64);
        row.copy_from_slice(&u.apply_vector(&input));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExampleParams {
    pub d: u64,
    pub t: usize,
    pub a0: u64,
    pub s_vector: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExampleReport {
    pub params: ExampleParams,
    /// State after every agent's phase gate.
    pub eq5_table: AmplitudeTable,
    /// State after agent 1's inverse Fourier transform.
    pub eq8_table: AmplitudeTable,
    /// Distribution of agent 1's outcome.
    pub marginal: Vec<f64>,
    /// `marginal[a0]`.
    pub exact_p: f64,
    pub mc: McEstimate,
    pub verdict: String,
}

impl ExampleReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    pub fn render_text(&self) -> String {
        let p = &self.params;
        let s: Vec<String> = p.s_vector.iter().map(|v| v.to_string()).collect();
        let mut out = String::new();
        let _ = writeln!(out, "worked example: d={} t={} a0={} s=({})", p.d, p.t, p.a0, s.join(","));
        let _ = writeln!(out);
        let _ = writeln!(out, "state after encoding:");
        out.push_str(&self.eq5_table.render_text());
        let _ = writeln!(out);
        let _ = writeln!(out, "state after QFT^-1 on qudit 1:");
        out.push_str(&self.eq8_table.render_text());
        let _ = writeln!(out);
        let marginal: Vec<String> = self.marginal.iter().map(|&p| fmt_sig(p)).collect();
        let _ = writeln!(out, "Bob1 marginal: ({})", marginal.join(", "));
        let _ = writeln!(out, "exact P[outcome = a0]: {}", fmt_sig(self.exact_p));
        let _ = writeln!(
            out,
            "monte carlo: {} / {} trials (seed {}), stderr {}",
            fmt_sig(self.mc.estimate),
            self.mc.trials,
            self.mc.seed,
            fmt_sig(self.mc.stderr)
        );
        let _ = writeln!(out, "verdict: {}", self.verdict);
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExampleConfig {
    pub split: Vec<u64>,
    pub trials: u64,
    pub seed: u64,
}

impl Default for ExampleConfig {
    fn default() -> Self {
        Self { split: EXAMPLE_SPLIT.to_vec(), trials: DEFAULT_TRIALS, seed: DEFAULT_SEED }
    }
}

pub fn reproduce_example_d4() -> Result<ExampleReport> {
    reproduce_example_with(&ExampleConfig::default())
}

fn mismatch(what: &str, index: usize, got: Complex64, want: Complex64) -> Error {
    Error::Reproduction(format!(
        "{what}: amplitude {index} is {} but closed form gives {}",
        fmt_complex(got),
        fmt_complex(want)
    ))
}

/// Builds the example from a chosen split of the phase, checks every amplitude
/// against the closed forms, and measures agent 1's success probability.
pub fn reproduce_example_with(config: &ExampleConfig) -> Result<ExampleReport> {
    let d = EXAMPLE_D as usize;
    if config.split.len() != EXAMPLE_T
        || config.split.iter().sum::<u64>() % EXAMPLE_D != EXAMPLE_SECRET
    {
        return Err(Error::InvalidParams(format!(
            "split must have {EXAMPLE_T} entries summing to {EXAMPLE_SECRET} mod {EXAMPLE_D}"
        )));
    }
    let params = ProtocolParams::direct(EXAMPLE_D, config.split.clone(), config.seed)?;

    let encoded = protocol::post_encoding_state(&params)?;
    for (i, &amp) in encoded.amplitudes().iter().enumerate() {
        let k = encoded.digits(i);
        let want = if k.iter().all(|&v| v == k[0]) { EQ5_CLOSED_FORM[k[0]] * 0.5 } else { c(0., 0.) };
        if (amp - want).norm() > EXAMPLE_TOL {
            return Err(mismatch("encoded state", i, amp, want));
        }
    }

    let computed = eq7_expansions();
    for (k, (row, closed)) in computed.iter().zip(&EQ7_CLOSED_FORM).enumerate() {
        for (j, (&got, &want)) in row.iter().zip(closed).enumerate() {
            if (got - want * 0.5).norm() > EXAMPLE_TOL {
                return Err(mismatch("single-qudit expansion", k * d + j, got, want * 0.5));
            }
        }
    }

    let evolved = qudit_sim::apply_local(&encoded, 1, &qudit_sim::qft_inv(d))?;
    for (i, &amp) in evolved.amplitudes().iter().enumerate() {
        let digits = evolved.digits(i);
        let (j, k) = (digits[0], digits[1]);
        let want = if digits[1] == digits[2] { EQ7_CLOSED_FORM[k][j] * 0.25 } else { c(0., 0.) };
        if (amp - want).norm() > EXAMPLE_TOL {
            return Err(mismatch("state after QFT^-1", i, amp, want));
        }
    }

    let marginal = qudit_sim::marginal(&evolved, 1)?;
    let exact_p = marginal.prob(EXAMPLE_SECRET as usize);
    let mc = success_probability_mc(&params, config.trials, config.seed)?;
    let verdict = if marginal.max_deviation_from_uniform() <= qudit_sim::STATE_TOL {
        VERDICT_CONFIRMED
    } else {
        VERDICT_REFUTED
    };

    Ok(ExampleReport {
        params: ExampleParams {
            d: EXAMPLE_D,
            t: EXAMPLE_T,
            a0: EXAMPLE_SECRET,
            s_vector: config.split.clone(),
        },
        eq5_table: amplitude_table(&encoded),
        eq8_table: amplitude_table(&evolved),
        marginal: marginal.probs,
        exact_p,
        mc,
        verdict: verdict.into(),
    })
}

/// One `(d, t, variant)` cell of an exact success-probability sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub d: u64,
    pub t: usize,
    pub variant: Variant,
    pub s_vectors: usize,
    pub p_min: f64,
    pub p_max: f64,
    pub expected: f64,
    pub ok: bool,
}

/// Upper bound on s-vectors checked per sweep cell; larger cells are sampled.
pub const SWEEP_MAX_S_VECTORS: usize = 64;

/// The s-vectors for a cell: every vector when there are at most `limit` of
/// them, otherwise `limit` vectors drawn from a seeded stream.
pub fn sweep_s_vectors(d: u64, t: usize, limit: usize, seed: u64) -> Vec<Vec<u64>> {
    use rand::{Rng, SeedableRng};
    let total = (d as usize).checked_pow(t as u32);
    match total {
        Some(n) if n <= limit => (0..n)
            .map(|mut i| {
                let mut v = vec![0; t];
                for slot in v.iter_mut().rev() {
                    *slot = (i % d as usize) as u64;
                    i /= d as usize;
                }
                v
            })
            .collect(),
        _ => {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(derive_seed(seed, d << 8 | t as u64));
            (0..limit).map(|_| (0..t).map(|_| rng.gen_range(0..d)).collect()).collect()
        }
    }
}

/// Expected exact success probability for a variant.
pub fn expected_success(variant: Variant, d: u64, t: usize) -> f64 {
    match variant {
        Variant::SongOriginal if t > 1 => 1.0 / d as f64,
        _ => 1.0,
    }
}

pub fn sweep_cell(variant: Variant, d: u64, t: usize, limit: usize, seed: u64) -> Result<SweepRow> {
    let vectors = match variant {
        Variant::ProductCounterfactual => (0..d).map(|s| vec![s]).collect(),
        _ => sweep_s_vectors(d, t, limit, seed),
    };
    let probs = vectors
        .par_iter()
        .map(|s| match variant {
            Variant::ProductCounterfactual => {
                let reg = protocol::product_counterfactual_state(s[0], d)?;
                Ok(qudit_sim::marginal(&reg, 1)?.prob(s[0] as usize))
            }
            Variant::SongOriginal => success_probability_exact(&ProtocolParams::direct(d, s.clone(), seed)?),
            Variant::Repaired => {
                repaired_success_probability_exact(&ProtocolParams::direct(d, s.clone(), seed)?)
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    let p_min = probs.iter().copied().fold(f64::INFINITY, f64::min);
    let p_max = probs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let expected = expected_success(variant, d, t);
    let ok = (p_min - expected).abs() <= 1e-10 && (p_max - expected).abs() <= 1e-10;
    Ok(SweepRow { d, t, variant, s_vectors: probs.len(), p_min, p_max, expected, ok })
}

pub fn render_sweep(rows: &[SweepRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<24} {:>3} {:>3} {:>6} {:>16} {:>16} {:>16}  ok",
        "variant", "d", "t", "n_s", "p_min", "p_max", "expected"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:<24} {:>3} {:>3} {:>6} {:>16} {:>16} {:>16}  {}",
            r.variant.as_str(),
            r.d,
            r.t,
            r.s_vectors,
            fmt_sig(r.p_min),
            fmt_sig(r.p_max),
            fmt_sig(r.expected),
            if r.ok { "yes" } else { "NO" }
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formatting() {
        assert_eq!(fmt_sig(0.25), "0.25");
        assert_eq!(fmt_sig(std::f64::consts::FRAC_1_SQRT_2), "0.707106781187");
        assert_eq!(fmt_sig(-0.5), "-0.5");
        assert_eq!(fmt_sig(1e-17), "0");
        assert_eq!(fmt_sig(1.0), "1");
        assert_eq!(fmt_complex(c(0.25, 0.0)), "0.25+0i");
        assert_eq!(fmt_complex(c(0.0, -0.25)), "0-0.25i");
        assert_eq!(fmt_complex(c(-0.5, 1e-17)), "-0.5+0i");
    }

    #[test]
    fn bell_table() {
        let table = amplitude_table(&qudit_sim::make_ghz(2, 2).unwrap());
        let basis: Vec<_> = table.rows.iter().map(|r| r.basis.clone()).collect();
        assert_eq!(basis, vec![vec![0, 0], vec![1, 1]]);
        for r in &table.rows {
            assert!((r.re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        }
        assert!(table.render_text().contains("|11>   0.707106781187+0i"));
    }

    #[test]
    fn collapsed_table_lists_survivors() {
        let reg = QuditRegister::basis(3, &[2, 0]).unwrap();
        let table = amplitude_table(&reg);
        assert_eq!(table.rows.len(), 1);
        assert_eq!(table.rows[0].basis, vec![2, 0]);
    }

    #[test]
    fn wide_labels_use_commas() {
        assert_eq!(basis_label(&[10, 3], 11), "|10,3>");
        assert_eq!(basis_label(&[1, 3], 4), "|13>");
    }

    #[test]
    fn exact_probabilities() {
        let p = ProtocolParams::direct(4, vec![1, 1, 1], 0).unwrap();
        assert!((success_probability_exact(&p).unwrap() - 0.25).abs() < 1e-12);
        for s in [vec![0, 0], vec![1, 0], vec![1, 1]] {
            let p = ProtocolParams::direct(2, s, 0).unwrap();
            assert!((success_probability_exact(&p).unwrap() - 0.5).abs() < 1e-12);
        }
        let p = ProtocolParams::direct(5, vec![2], 0).unwrap();
        assert!((success_probability_exact(&p).unwrap() - 1.0).abs() < 1e-12);
        let p = ProtocolParams::direct(3, vec![2, 1, 1], 0).unwrap();
        assert!((repaired_success_probability_exact(&p).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn mc_edge_cases() {
        let p = ProtocolParams::direct(6, vec![4], 0).unwrap();
        let est = success_probability_mc(&p, 100, 1).unwrap();
        assert_eq!((est.estimate, est.stderr), (1.0, 0.0));
        assert!(success_probability_mc(&p, 0, 1).is_err());
        let p = ProtocolParams::direct(4, vec![3, 0, 0], 0).unwrap();
        let est = variant_success_mc(Variant::Repaired, &p, 500, 2).unwrap();
        assert_eq!(est.estimate, 1.0);
    }

    #[test]
    fn song_mc_matches_per_trial_runs() {
        for s in [vec![3, 0, 0], vec![1, 2], vec![4]] {
            let d = 5;
            let params = ProtocolParams::direct(d, s, 0).unwrap();
            let trials = 300;
            let hits = (0..trials)
                .filter(|&i| {
                    let p = params.clone().with_seed(derive_seed(77, i));
                    protocol::run_song_original(&p).unwrap().succeeded()
                })
                .count();
            let est = success_probability_mc(&params, trials, 77).unwrap();
            assert_eq!(est.estimate, hits as f64 / trials as f64);
        }
    }

    #[test]
    fn example_rejects_bad_split() {
        let cfg = ExampleConfig { split: vec![1, 1, 0], ..Default::default() };
        assert!(reproduce_example_with(&cfg).is_err());
        let cfg = ExampleConfig { split: vec![3, 0], ..Default::default() };
        assert!(reproduce_example_with(&cfg).is_err());
    }

    #[test]
    fn s_vector_enumeration() {
        let all = sweep_s_vectors(3, 2, 64, 0);
        assert_eq!(all.len(), 9);
        assert_eq!(all[5], vec![1, 2]);
        let sampled = sweep_s_vectors(8, 4, 64, 0);
        assert_eq!(sampled.len(), 64);
        assert!(sampled.iter().all(|v| v.len() == 4 && v.iter().all(|&x| x < 8)));
        assert_eq!(sampled, sweep_s_vectors(8, 4, 64, 0));
    }

    #[test]
    fn sweep_cells() {
        let row = sweep_cell(Variant::SongOriginal, 3, 2, 64, 0).unwrap();
        assert!(row.ok && row.s_vectors == 9);
        let row = sweep_cell(Variant::SongOriginal, 3, 1, 64, 0).unwrap();
        assert!(row.ok && row.expected == 1.0);
        let row = sweep_cell(Variant::Repaired, 4, 3, 64, 0).unwrap();
        assert!(row.ok);
        let row = sweep_cell(Variant::ProductCounterfactual, 7, 1, 64, 0).unwrap();
        assert!(row.ok && row.s_vectors == 7);
    }
}
