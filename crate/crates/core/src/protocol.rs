//! Agent-level execution of the GHZ-based secret reconstruction protocol.
//!
//! Agents `1..=t` (the first `t` of `n`) take part; agent 1 prepares the GHZ
//! state and is the one who wants the secret. The quantum channel between
//! agents is ideal and only shows up as [`Event::QuditSent`] entries.
//!
//! Three variants are provided:
//! * [`run_song_original`]: only agent 1 applies the inverse Fourier transform
//!   and measures, without hearing from anyone.
//! * [`run_product_counterfactual`]: the same final step applied to an
//!   unentangled single qudit carrying the summed phase.
//! * [`run_repaired_all_measure`]: every agent Fourier-measures and agents
//!   `2..=t` announce their results; agent 1 adds them up. Not part of the
//!   original scheme, kept as a diagnostic.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modmath::{self, Share, SharePolynomial, ShareTerm};
use crate::qudit_sim::{self, QuditRegister, DEFAULT_SIZE_CAP};

/// Seed used when the caller does not pick one.
pub const DEFAULT_SEED: u64 = 20_170_727;

/// Independent per-trial seed, so parallel runs do not depend on scheduling order.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng.next_u64()
}

/// How the secret enters the protocol.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SecretSpec {
    /// Dealer polynomial plus one abscissa per agent (`n` of them).
    Polynomial { poly: SharePolynomial, xs: Vec<u64> },
    /// Lagrange terms `s_1..s_t` given directly; the secret is their sum mod d.
    Direct { s: Vec<u64> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtocolParams {
    pub d: u64,
    pub t: usize,
    pub n: usize,
    pub secret: SecretSpec,
    pub seed: u64,
    pub size_cap: usize,
}

/// Share material after Step 2's classical computation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedSecret {
    /// All `n` shares; empty on the direct path.
    pub shares: Vec<Share>,
    pub terms: Vec<ShareTerm>,
    pub expected_secret: u64,
}

impl ProtocolParams {
    /// Direct s-vector; `t = n = s.len()`.
    pub fn direct(d: u64, s: Vec<u64>, seed: u64) -> Result<Self> {
        let t = s.len();
        let params = Self {
            d,
            t,
            n: t,
            secret: SecretSpec::Direct { s },
            seed,
            size_cap: DEFAULT_SIZE_CAP,
        };
        params.validate()?;
        Ok(params)
    }

    /// Shamir path: `t` is the polynomial's threshold, `n = xs.len()`.
    pub fn shamir(poly: SharePolynomial, xs: Vec<u64>, seed: u64) -> Result<Self> {
        let params = Self {
            d: poly.modulus(),
            t: poly.threshold(),
            n: xs.len(),
            secret: SecretSpec::Polynomial { poly, xs },
            seed,
            size_cap: DEFAULT_SIZE_CAP,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_size_cap(mut self, cap: usize) -> Self {
        self.size_cap = cap;
        self
    }

    /// Sets the total agent count on the direct path, where it is informational.
    pub fn with_agents(mut self, n: usize) -> Result<Self> {
        self.n = n;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        modmath::check_modulus(self.d)?;
        if self.t == 0 {
            return Err(Error::InvalidThreshold("t must be at least 1".into()));
        }
        if self.t > self.n {
            return Err(Error::InvalidThreshold(format!(
                "t = {} exceeds n = {}",
                self.t, self.n
            )));
        }
        match &self.secret {
            SecretSpec::Direct { s } => {
                if s.len() != self.t {
                    return Err(Error::InvalidParams(format!(
                        "s-vector has {} entries, expected t = {}",
                        s.len(),
                        self.t
                    )));
                }
                if let Some(&bad) = s.iter().find(|&&v| v >= self.d) {
                    return Err(Error::ResidueOutOfRange { value: bad, modulus: self.d });
                }
            }
            SecretSpec::Polynomial { poly, xs } => {
                if poly.modulus() != self.d || poly.threshold() != self.t {
                    return Err(Error::InvalidParams(
                        "polynomial modulus/threshold disagree with d/t".into(),
                    ));
                }
                if xs.len() != self.n {
                    return Err(Error::InvalidParams(format!(
                        "{} abscissae given, expected n = {}",
                        xs.len(),
                        self.n
                    )));
                }
                modmath::gen_shares(poly, xs)?;
            }
        }
        Ok(())
    }

    /// Computes every participant's `s_r` and the secret they should recover.
    pub fn resolve(&self) -> Result<ResolvedSecret> {
        self.validate()?;
        match &self.secret {
            SecretSpec::Direct { s } => Ok(ResolvedSecret {
                shares: Vec::new(),
                terms: s
                    .iter()
                    .enumerate()
                    .map(|(i, &s)| ShareTerm { r: i + 1, s })
                    .collect(),
                expected_secret: s.iter().fold(0, |acc, v| (acc + v) % self.d),
            }),
            SecretSpec::Polynomial { poly, xs } => {
                let shares = modmath::gen_shares(poly, xs)?;
                let terms = modmath::lagrange_terms(&shares[..self.t], self.d)?;
                Ok(ResolvedSecret {
                    shares,
                    terms,
                    expected_secret: poly.secret(),
                })
            }
        }
    }

    fn dim(&self) -> usize {
        self.d as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    SongOriginal,
    ProductCounterfactual,
    Repaired,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::SongOriginal => "song-original",
            Variant::ProductCounterfactual => "product-counterfactual",
            Variant::Repaired => "repaired",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "song-original" => Ok(Variant::SongOriginal),
            "product-counterfactual" => Ok(Variant::ProductCounterfactual),
            "repaired" => Ok(Variant::Repaired),
            other => Err(Error::InvalidParams(format!("unknown variant {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Gate {
    /// Diagonal phase gate `U_{0,s}`.
    Phase,
    QftInv,
}

impl Gate {
    fn label(self) -> &'static str {
        match self {
            Gate::Phase => "U0",
            Gate::QftInv => "QFT^-1",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "kebab-case")]
pub enum Event {
    QuditSent { from: usize, to: usize, qudit: usize },
    GateApplied { agent: usize, gate: Gate, s: Option<u64> },
    Measured { agent: usize, basis: Basis, outcome: u64 },
    Announced { agent: usize, value: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Basis {
    /// `{|0>, ..., |d-1>}`.
    Computational,
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Basis::Computational => f.write_str("computational"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub variant: Variant,
    pub d: u64,
    pub t: usize,
    pub seed: u64,
    pub events: Vec<Event>,
    pub final_outcome: u64,
    pub expected_secret: u64,
}

impl Transcript {
    pub fn succeeded(&self) -> bool {
        self.final_outcome == self.expected_secret
    }

    pub fn verdict_line(&self) -> String {
        format!("outcome == secret: {}", if self.succeeded() { "yes" } else { "no" })
    }

    pub fn count(&self, pred: impl Fn(&Event) -> bool) -> usize {
        self.events.iter().filter(|e| pred(e)).count()
    }

    /// Line-oriented log: a header, one numbered line per event, then the result.
    pub fn render_log(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# variant={} d={} t={} seed={}",
            self.variant, self.d, self.t, self.seed
        );
        for (i, event) in self.events.iter().enumerate() {
            let _ = match event {
                Event::QuditSent { from, to, qudit } => {
                    writeln!(out, "{:>3} send     from=Bob{from} to=Bob{to} qudit={qudit}", i + 1)
                }
                Event::GateApplied { agent, gate, s } => match s {
                    Some(s) => writeln!(out, "{:>3} gate     Bob{agent} {} s={s}", i + 1, gate.label()),
                    None => writeln!(out, "{:>3} gate     Bob{agent} {}", i + 1, gate.label()),
                },
                Event::Measured { agent, basis, outcome } => writeln!(
                    out,
                    "{:>3} measure  Bob{agent} basis={basis} outcome={outcome}",
                    i + 1
                ),
                Event::Announced { agent, value } => {
                    writeln!(out, "{:>3} announce Bob{agent} value={value}", i + 1)
                }
            };
        }
        let _ = writeln!(out, "final_outcome={}", self.final_outcome);
        let _ = writeln!(out, "expected_secret={}", self.expected_secret);
        let _ = writeln!(out, "{}", self.verdict_line());
        out
    }
}

/// Steps 1 and 2: GHZ preparation, distribution and every agent's phase gate.
fn encode(params: &ProtocolParams, terms: &[ShareTerm], events: &mut Vec<Event>) -> Result<QuditRegister> {
    let d = params.dim();
    let mut reg = qudit_sim::make_ghz_capped(d, params.t, params.size_cap)?;
    for r in 2..=params.t {
        events.push(Event::QuditSent { from: 1, to: r, qudit: r });
    }
    for term in terms {
        reg = qudit_sim::apply_local(&reg, term.r, &qudit_sim::phase_gate(d, term.s))?;
        events.push(Event::GateApplied { agent: term.r, gate: Gate::Phase, s: Some(term.s) });
    }
    Ok(reg)
}

/// `|phi'> = (1/sqrt(d)) sum_k omega^{(sum_r s_r) k} |k>^{t}`, before any measurement.
pub fn post_encoding_state(params: &ProtocolParams) -> Result<QuditRegister> {
    let resolved = params.resolve()?;
    encode(params, &resolved.terms, &mut Vec::new())
}

/// The encoded state after agent 1 alone applies the inverse Fourier transform.
pub fn song_final_state(params: &ProtocolParams) -> Result<QuditRegister> {
    let reg = post_encoding_state(params)?;
    qudit_sim::apply_local(&reg, 1, &qudit_sim::qft_inv(params.dim()))
}

/// The encoded state after every agent applies the inverse Fourier transform.
pub fn repaired_final_state(params: &ProtocolParams) -> Result<QuditRegister> {
    let u = qudit_sim::qft_inv(params.dim());
    let mut reg = post_encoding_state(params)?;
    for q in 1..=params.t {
        reg = qudit_sim::apply_local(&reg, q, &u)?;
    }
    Ok(reg)
}

pub fn run_song_original(params: &ProtocolParams) -> Result<Transcript> {
    let resolved = params.resolve()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut events = Vec::new();
    let reg = encode(params, &resolved.terms, &mut events)?;

    let reg = qudit_sim::apply_local(&reg, 1, &qudit_sim::qft_inv(params.dim()))?;
    events.push(Event::GateApplied { agent: 1, gate: Gate::QftInv, s: None });
    let outcome = qudit_sim::sample_outcome(&reg, 1, &mut rng)?;
    events.push(Event::Measured {
        agent: 1,
        basis: Basis::Computational,
        outcome: outcome as u64,
    });

    Ok(Transcript {
        variant: Variant::SongOriginal,
        d: params.d,
        t: params.t,
        seed: params.seed,
        events,
        final_outcome: outcome as u64,
        expected_secret: resolved.expected_secret,
    })
}

pub fn run_repaired_all_measure(params: &ProtocolParams) -> Result<Transcript> {
    let resolved = params.resolve()?;
    let d = params.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut events = Vec::new();
    let mut reg = encode(params, &resolved.terms, &mut events)?;

    let u = qudit_sim::qft_inv(d);
    let mut results = Vec::with_capacity(params.t);
    for r in 1..=params.t {
        reg = qudit_sim::apply_local(&reg, r, &u)?;
        events.push(Event::GateApplied { agent: r, gate: Gate::QftInv, s: None });
        let (m, post) = qudit_sim::measure(&reg, r, &mut rng)?;
        reg = post;
        events.push(Event::Measured {
            agent: r,
            basis: Basis::Computational,
            outcome: m as u64,
        });
        results.push(m as u64);
    }
    for (r, &m) in results.iter().enumerate().skip(1) {
        events.push(Event::Announced { agent: r + 1, value: m });
    }
    let final_outcome = results.iter().fold(0, |acc, m| (acc + m) % params.d);

    Ok(Transcript {
        variant: Variant::Repaired,
        d: params.d,
        t: params.t,
        seed: params.seed,
        events,
        final_outcome,
        expected_secret: resolved.expected_secret,
    })
}

/// Inverse Fourier transform and measurement of a lone qudit carrying phase
/// `omega^{S k}`. The outcome is `S` with certainty.
pub fn run_product_counterfactual(s: u64, d: u64) -> Result<u64> {
    modmath::check_modulus(d)?;
    if s >= d {
        return Err(Error::ResidueOutOfRange { value: s, modulus: d });
    }
    let reg = product_counterfactual_state(s, d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    let (outcome, _) = qudit_sim::measure(&reg, 1, &mut rng)?;
    Ok(outcome as u64)
}

/// The counterfactual's pre-measurement state `QFT^-1 (1/sqrt(d)) sum_k omega^{S k} |k>`.
pub fn product_counterfactual_state(s: u64, d: u64) -> Result<QuditRegister> {
    modmath::check_modulus(d)?;
    let d = d as usize;
    qudit_sim::apply_local(&qudit_sim::fourier_state(d, s)?, 1, &qudit_sim::qft_inv(d))
}

/// Runs a multi-party variant. The product counterfactual has no transcript;
/// use [`run_product_counterfactual`] for it.
pub fn run_variant(variant: Variant, params: &ProtocolParams) -> Result<Transcript> {
    match variant {
        Variant::SongOriginal => run_song_original(params),
        Variant::Repaired => run_repaired_all_measure(params),
        Variant::ProductCounterfactual => Err(Error::InvalidParams(
            "product-counterfactual has no multi-party transcript".into(),
        )),
    }
}
