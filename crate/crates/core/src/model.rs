//! Ising model core: spin configurations, the Hamiltonian, local fields,
//! single-site conditionals and an exact enumeration oracle for small graphs.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graphs::InteractionMatrix;

/// A point of `{-1, +1}^n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SpinConfiguration(Vec<i8>);

impl SpinConfiguration {
    /// Fails unless every entry is exactly `-1` or `+1`.
    pub fn new(spins: Vec<i8>) -> Result<Self> {
        if let Some(k) = spins.iter().position(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidSpec(format!(
                "spin {k} is {}, expected -1 or +1",
                spins[k]
            )));
        }
        Ok(Self(spins))
    }

    pub fn all_plus(n: usize) -> Self {
        Self(vec![1; n])
    }

    pub fn all_minus(n: usize) -> Self {
        Self(vec![-1; n])
    }

    /// Configuration number `index` in the enumeration order used throughout
    /// the crate: bit `k` set means spin `k` is `+1`.
    pub fn from_index(n: usize, index: u64) -> Self {
        Self(
            (0..n)
                .map(|k| if index >> k & 1 == 1 { 1 } else { -1 })
                .collect(),
        )
    }

    /// Inverse of [`SpinConfiguration::from_index`].
    pub fn index(&self) -> u64 {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &s)| s == 1)
            .fold(0u64, |acc, (k, _)| acc | 1 << k)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn spins(&self) -> &[i8] {
        &self.0
    }

    pub fn get(&self, i: usize) -> f64 {
        self.0[i] as f64
    }

    /// Copy with spin `i` removed.
    pub fn without(&self, i: usize) -> Self {
        let mut spins = self.0.clone();
        spins.remove(i);
        Self(spins)
    }

    pub fn negated(&self) -> Self {
        Self(self.0.iter().map(|s| -s).collect())
    }

    /// Number of coordinates where `self` and `other` differ.
    pub fn hamming(&self, other: &Self) -> usize {
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }

    pub(crate) fn spins_mut(&mut self) -> &mut [i8] {
        &mut self.0
    }
}

impl From<SpinConfiguration> for Vec<i8> {
    fn from(x: SpinConfiguration) -> Self {
        x.0
    }
}

pub(crate) fn check_dims(j: &InteractionMatrix, x: &SpinConfiguration) -> Result<()> {
    if j.n() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: j.n(),
            actual: x.len(),
        });
    }
    Ok(())
}

/// `H(x) = sum_{i<j} J_ij x_i x_j`.
pub fn hamiltonian(j: &InteractionMatrix, x: &SpinConfiguration) -> Result<f64> {
    check_dims(j, x)?;
    Ok(j.edges()
        .iter()
        .map(|&(a, b, w)| w * x.get(a) * x.get(b))
        .sum())
}

/// `m_i(x) = sum_j J_ij x_j` for every node.
pub fn local_fields(j: &InteractionMatrix, x: &SpinConfiguration) -> Result<Vec<f64>> {
    check_dims(j, x)?;
    Ok(local_fields_unchecked(j, x.spins()))
}

pub(crate) fn local_fields_unchecked(j: &InteractionMatrix, spins: &[i8]) -> Vec<f64> {
    (0..j.n())
        .map(|i| {
            let (cols, vals) = j.row(i);
            cols.iter()
                .zip(vals)
                .map(|(&k, &w)| w * spins[k] as f64)
                .sum()
        })
        .collect()
}

/// `P_beta(X_i = +1 | x_{-i}) = e^{2 beta m} / (1 + e^{2 beta m})`, evaluated
/// as `(1 + tanh(beta m)) / 2` so that large fields cannot overflow.
pub fn conditional_prob_plus(beta: f64, m_i: f64) -> f64 {
    0.5 * (1.0 + (beta * m_i).tanh())
}

/// `log(1 / (1 + e^{-z}))` without overflow.
pub(crate) fn log_sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        -(-z).exp().ln_1p()
    } else {
        z - z.exp().ln_1p()
    }
}

/// Default ceiling for [`exact_summary`].
pub const ENUMERATION_LIMIT: usize = 20;

/// Partition function and (optionally) the full probability table.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactModelSummary {
    pub beta: f64,
    /// `Z(beta) = 2^{-N} sum_x e^{beta H(x)}`.
    pub z: f64,
    pub log_z: f64,
    pub log_z_over_n: f64,
    /// Indexed as in [`SpinConfiguration::from_index`].
    pub probabilities: Option<Vec<f64>>,
}

/// Calls `visit(index, spins, H)` for all `2^n` configurations, walking them
/// in Gray-code order so each step costs `O(deg)`.
pub fn for_each_configuration<F>(j: &InteractionMatrix, mut visit: F)
where
    F: FnMut(u64, &[i8], f64),
{
    let n = j.n();
    let mut spins = vec![-1i8; n];
    let mut fields = local_fields_unchecked(j, &spins);
    let mut h: f64 = j.edges().iter().map(|e| e.2).sum();
    let mut index = 0u64;
    visit(index, &spins, h);
    for step in 1u64..(1u64 << n) {
        let k = step.trailing_zeros() as usize;
        let old = spins[k] as f64;
        h -= 2.0 * old * fields[k];
        spins[k] = -spins[k];
        index ^= 1 << k;
        for (nb, w) in j.neighbors(k) {
            fields[nb] -= 2.0 * old * w;
        }
        visit(index, &spins, h);
    }
}

pub fn exact_summary(
    j: &InteractionMatrix,
    beta: f64,
    want_table: bool,
) -> Result<ExactModelSummary> {
    exact_summary_with_limit(j, beta, want_table, ENUMERATION_LIMIT)
}

/// [`exact_summary`] with a caller-chosen enumeration ceiling (at most 40).
pub fn exact_summary_with_limit(
    j: &InteractionMatrix,
    beta: f64,
    want_table: bool,
    limit: usize,
) -> Result<ExactModelSummary> {
    let n = j.n();
    let limit = limit.min(40);
    if n > limit {
        return Err(Error::TooLargeForEnumeration { n, limit });
    }
    let mut energies = vec![0.0; 1usize << n];
    for_each_configuration(j, |index, _, h| energies[index as usize] = beta * h);
    let max = energies.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = energies.iter().map(|e| (e - max).exp()).sum();
    let log_total = max + sum.ln();
    let log_z = log_total - n as f64 * std::f64::consts::LN_2;
    let probabilities =
        want_table.then(|| energies.iter().map(|e| (e - log_total).exp()).collect());
    Ok(ExactModelSummary {
        beta,
        z: log_z.exp(),
        log_z,
        log_z_over_n: log_z / n as f64,
        probabilities,
    })
}

fn parse_spin_token(token: &str) -> Option<i8> {
    match token.trim() {
        "+1" | "1" => Some(1),
        "-1" => Some(-1),
        _ => None,
    }
}

fn spin_parse_error(path: &Path, line: usize, token: &str) -> Error {
    Error::ParseError {
        path: path.to_path_buf(),
        line,
        message: format!("expected +1 or -1, found {token:?}"),
    }
}

/// Reads a single configuration stored one spin per line.
pub fn read_spins(path: impl AsRef<Path>) -> Result<SpinConfiguration> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut spins = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        spins.push(parse_spin_token(line).ok_or_else(|| spin_parse_error(path, k + 1, line))?);
    }
    SpinConfiguration::new(spins)
}

pub fn spins_to_string(x: &SpinConfiguration) -> String {
    let mut out = String::with_capacity(3 * x.len());
    for &s in x.spins() {
        out.push_str(if s > 0 { "+1\n" } else { "-1\n" });
    }
    out
}

pub fn write_spins(path: impl AsRef<Path>, x: &SpinConfiguration) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, spins_to_string(x)).map_err(|e| Error::io(path, e))
}

/// Reads a multi-sample CSV: one configuration per row, comma separated.
pub fn read_samples_csv(path: impl AsRef<Path>) -> Result<Vec<SpinConfiguration>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut samples: Vec<SpinConfiguration> = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let spins = line
            .split(',')
            .map(|t| parse_spin_token(t).ok_or_else(|| spin_parse_error(path, k + 1, t)))
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = samples.first() {
            if first.len() != spins.len() {
                return Err(Error::ParseError {
                    path: path.to_path_buf(),
                    line: k + 1,
                    message: format!("row has {} spins, expected {}", spins.len(), first.len()),
                });
            }
        }
        samples.push(SpinConfiguration::new(spins)?);
    }
    Ok(samples)
}

pub fn samples_to_csv(samples: &[SpinConfiguration]) -> String {
    let mut out = String::new();
    for x in samples {
        for (k, &s) in x.spins().iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            let _ = write!(out, "{}", if s > 0 { "1" } else { "-1" });
        }
        out.push('\n');
    }
    out
}

pub fn write_samples_csv(path: impl AsRef<Path>, samples: &[SpinConfiguration]) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, samples_to_csv(samples)).map_err(|e| Error::io(path, e))
}

/// Reads either format: rows containing commas are treated as a multi-sample
/// CSV, anything else as a one-spin-per-line single configuration.
pub fn read_sample_file(path: impl AsRef<Path>) -> Result<Vec<SpinConfiguration>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    if text.contains(',') {
        read_samples_csv(path)
    } else {
        Ok(vec![read_spins(path)?])
    }
}
