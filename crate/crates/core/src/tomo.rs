//! Pauli-basis tomography records: full reconstruction, permutation
//! averaging, and extraction of the four GHZ matrix elements from a reduced
//! set of settings.
//!
//! Conventions: labels are three letters over `I, X, Y, Z`, qubit 1 first.
//! `ρ = (1/8) Σ ⟨σ_j σ_k σ_l⟩ σ_j ⊗ σ_k ⊗ σ_l`.
//!
//! The coherence `c = ρ_{000,111}` expands as
//!
//! ```text
//! c = (1/8) [ XXX - (XYY + YXY + YYX) + i (YYY - (XXY + XYX + YXX)) ]
//! ```
//!
//! which under permutation averaging becomes `(1/8)(XXX - 3 XYY_pit)` for the
//! real part and `(1/8)(YYY - 3 XXY_pit)` for the imaginary part.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::config::{PAULI_RANGE_TOL, TOMO_NEGATIVE_TOL};
use crate::error::{Error, Result};
use crate::linalg::{kron3, pauli_x, pauli_y, pauli_z, ComplexMatrix, DensityMatrix};
use crate::twirl::PERMUTATIONS;

const LETTERS: [char; 4] = ['I', 'X', 'Y', 'Z'];

fn pauli(ch: char) -> ComplexMatrix {
    match ch {
        'X' => pauli_x(),
        'Y' => pauli_y(),
        'Z' => pauli_z(),
        _ => ComplexMatrix::identity(2),
    }
}

/// All 64 labels in lexicographic order over `I < X < Y < Z`.
pub fn all_labels() -> Vec<String> {
    let mut out = Vec::with_capacity(64);
    for a in LETTERS {
        for b in LETTERS {
            for d in LETTERS {
                out.push([a, b, d].iter().collect());
            }
        }
    }
    out
}

fn check_label(label: &str) -> Result<()> {
    if label.chars().count() != 3 || !label.chars().all(|ch| LETTERS.contains(&ch)) {
        return Err(Error::InvalidLabel(label.to_string()));
    }
    Ok(())
}

/// Permutation orbit of a label, sorted and deduplicated.
pub fn orbit(label: &str) -> Vec<String> {
    let ch: Vec<char> = label.chars().collect();
    let mut out: Vec<String> = PERMUTATIONS
        .iter()
        .map(|p| [ch[p[0]], ch[p[1]], ch[p[2]]].iter().collect())
        .collect();
    out.sort();
    out.dedup();
    out
}

pub fn pauli_string(label: &str) -> Result<ComplexMatrix> {
    check_label(label)?;
    let ch: Vec<char> = label.chars().collect();
    kron3(&pauli(ch[0]), &pauli(ch[1]), &pauli(ch[2]))
}

/// Measured Pauli expectation values keyed by label. `III` is implicitly 1.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PauliRecord {
    values: BTreeMap<String, f64>,
}

impl PauliRecord {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, label: &str, value: f64) -> Result<()> {
        check_label(label)?;
        if !value.is_finite() || value.abs() > 1.0 + PAULI_RANGE_TOL {
            return Err(Error::ValueOutOfRange {
                label: label.to_string(),
                value,
            });
        }
        if label == "III" && (value - 1.0).abs() > PAULI_RANGE_TOL {
            return Err(Error::ValueOutOfRange {
                label: label.to_string(),
                value,
            });
        }
        if self.values.contains_key(label) {
            return Err(Error::DuplicateLabel(label.to_string()));
        }
        self.values.insert(label.to_string(), value);
        Ok(())
    }

    pub fn get(&self, label: &str) -> Option<f64> {
        if label == "III" {
            return Some(1.0);
        }
        self.values.get(label).copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.values.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// Labels absent from the record (never includes `III`).
    pub fn missing(&self) -> Vec<String> {
        all_labels()
            .into_iter()
            .filter(|l| l != "III" && !self.values.contains_key(l))
            .collect()
    }

    /// Parses `LABEL value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rec = Self::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (Some(label), Some(value), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(Error::Parse {
                    line: n + 1,
                    msg: format!("expected `LABEL value`, got {line:?}"),
                });
            };
            let value: f64 = value.parse().map_err(|e| Error::Parse {
                line: n + 1,
                msg: format!("bad number {value:?}: {e}"),
            })?;
            rec.insert(&label.to_ascii_uppercase(), value)?;
        }
        Ok(rec)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.values {
            let _ = writeln!(out, "{k} {v:.17e}");
        }
        out
    }
}

/// All 64 expectation values `tr(ρ σσσ)`.
pub fn expectations_of(rho: &DensityMatrix) -> PauliRecord {
    let mut rec = PauliRecord::new();
    for label in all_labels() {
        let v = if label == "III" {
            1.0
        } else {
            rho.expect_op(&pauli_string(&label).expect("valid label")).re / rho.trace()
        };
        rec.insert(&label, v.clamp(-1.0, 1.0)).expect("fresh label");
    }
    rec
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReconstructMode {
    /// Every label must be present.
    Strict,
    /// Missing labels count as zero and are reported back.
    Partial,
}

/// Linear inversion. Returns the state and the labels that were assumed zero.
pub fn reconstruct(rec: &PauliRecord, mode: ReconstructMode) -> Result<(DensityMatrix, Vec<String>)> {
    let missing = rec.missing();
    if mode == ReconstructMode::Strict && !missing.is_empty() {
        return Err(Error::MissingLabels(missing));
    }
    let mut m = ComplexMatrix::identity(8).scale_re(0.125);
    for (label, v) in rec.iter() {
        if label == "III" {
            continue;
        }
        m = &m + &pauli_string(label)?.scale_re(v / 8.0);
    }
    let m = m.hermitian_part();
    let es = crate::linalg::herm_eigensystem(&m)?;
    if es.values[0] < -TOMO_NEGATIVE_TOL {
        return Err(Error::NotPositive(es.values[0]));
    }
    let m = if es.values[0] < 0.0 {
        let clipped = es.reconstruct_with(|l| l.max(0.0));
        let tr = clipped.trace().re;
        clipped.scale_re(1.0 / tr)
    } else {
        m
    };
    Ok((DensityMatrix::new(m)?, missing))
}

/// Replaces each value by the average over the present members of its
/// permutation orbit. Orbits with no measured member stay absent.
pub fn pit_record(rec: &PauliRecord) -> PauliRecord {
    let mut out = PauliRecord::new();
    for label in all_labels() {
        if label == "III" {
            continue;
        }
        let vals: Vec<f64> = orbit(&label).iter().filter_map(|l| rec.get(l)).collect();
        if !vals.is_empty() {
            let avg = vals.iter().sum::<f64>() / vals.len() as f64;
            out.insert(&label, avg).expect("averages stay in range");
        }
    }
    out
}

/// The entries `ρ_{000,000}`, `ρ_{111,111}` and `c = ρ_{000,111}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GhzElements {
    pub p000: f64,
    pub p111: f64,
    pub c_re: f64,
    pub c_im: Option<f64>,
}

impl GhzElements {
    pub fn from_state(rho: &DensityMatrix) -> Self {
        let coh = rho.entry(0, 7);
        Self {
            p000: rho.entry(0, 0).re,
            p111: rho.entry(7, 7).re,
            c_re: coh.re,
            c_im: Some(coh.im),
        }
    }

    pub fn abs_c(&self) -> f64 {
        match self.c_im {
            Some(im) => self.c_re.hypot(im),
            None => self.c_re.abs(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name: &'static str, value: f64| Err(Error::OutOfRange { name, value });
        if !(self.p000 >= -1e-9) {
            return bad("p000", self.p000);
        }
        if !(self.p111 >= -1e-9) {
            return bad("p111", self.p111);
        }
        if !(self.p000 + self.p111 <= 1.0 + 1e-9) {
            return bad("p000 + p111", self.p000 + self.p111);
        }
        if self.c_im.is_some() && self.abs_c() > (self.p000.max(0.0) * self.p111.max(0.0)).sqrt() + 1e-6 {
            return bad("|c|", self.abs_c());
        }
        Ok(())
    }
}

/// Orbit average over the present members, or the orbit itself if none is present.
fn orbit_average(rec: &PauliRecord, label: &str) -> std::result::Result<f64, Vec<String>> {
    let orb = orbit(label);
    let vals: Vec<f64> = orb.iter().filter_map(|l| rec.get(l)).collect();
    if vals.is_empty() {
        Err(orb)
    } else {
        Ok(vals.iter().sum::<f64>() / vals.len() as f64)
    }
}

/// GHZ elements from Z-string data plus the XXX and XYY (and for the
/// imaginary part YYY and XXY) permutation-averaged correlators.
pub fn ghz_elements_minimal(rec: &PauliRecord, with_imag: bool) -> Result<GhzElements> {
    let mut needed = vec!["ZII", "ZZI", "ZZZ", "XXX", "XYY"];
    if with_imag {
        needed.extend(["YYY", "XXY"]);
    }
    let mut missing = Vec::new();
    let mut val = BTreeMap::new();
    for l in needed {
        match orbit_average(rec, l) {
            Ok(v) => {
                val.insert(l, v);
            }
            Err(orb) => missing.extend(orb),
        }
    }
    if !missing.is_empty() {
        return Err(Error::MissingLabels(missing));
    }
    let (z1, z2, z3) = (val["ZII"], val["ZZI"], val["ZZZ"]);
    let e = GhzElements {
        p000: (1.0 + 3.0 * z1 + 3.0 * z2 + z3) / 8.0,
        p111: (1.0 - 3.0 * z1 + 3.0 * z2 - z3) / 8.0,
        c_re: (val["XXX"] - 3.0 * val["XYY"]) / 8.0,
        c_im: with_imag.then(|| (val["YYY"] - 3.0 * val["XXY"]) / 8.0),
    };
    Ok(e)
}

/// Witness-plane bound from the GHZ elements, using `|c|` in place of `Re c`.
pub fn bound_from_elements(e: &GhzElements) -> f64 {
    (16.0 / 7.0 * e.abs_c() + 20.0 / 7.0 * (e.p000 + e.p111) - 3.0).max(0.0)
}
