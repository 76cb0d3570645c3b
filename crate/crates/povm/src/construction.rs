//! Common POVM data model: rank-1 elements grouped into measurement
//! settings, each setting summing to the identity.

use ndarray::Array2;
use num_complex::Complex64;
use qudit_core::{CMat, CVec};
use serde::{Deserialize, Serialize};

use crate::PovmError;

/// Informational-completeness class of a construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IcClass {
    /// Uniquely identifies any state (F-IC).
    FullyIc,
    /// Uniquely identifies pure states among all states (R1S-IC).
    Rank1Strict,
    /// Identifies pure states only within the pure-state set (R1-IC).
    Rank1,
    /// Not informationally complete in any of the above senses.
    NotIc,
}

/// One POVM element E = |ket><ket| with its (setting, outcome) label.
#[derive(Debug, Clone)]
pub struct PovmElement {
    /// Unnormalized ket e with E = |e><e|.
    pub ket: CVec,
    pub setting: usize,
    pub outcome: usize,
}

impl PovmElement {
    pub fn operator(&self) -> CMat {
        let d = self.ket.len();
        let mut m: CMat = Array2::zeros((d, d));
        for i in 0..d {
            for j in 0..d {
                m[[i, j]] = self.ket[i] * self.ket[j].conj();
            }
        }
        m
    }

    /// Born-rule probability <psi| E |psi> = |<e|psi>|^2.
    pub fn probability(&self, rho: &CMat) -> f64 {
        let d = self.ket.len();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..d {
            let mut row = Complex64::new(0.0, 0.0);
            for j in 0..d {
                row += rho[[i, j]] * self.ket[j];
            }
            acc += self.ket[i].conj() * row;
        }
        acc.re
    }
}

/// A named POVM construction: an ordered list of measurement settings, each
/// a list of rank-1 elements that sums to the identity.
#[derive(Debug, Clone)]
pub struct PovmConstruction {
    pub name: String,
    pub dim: usize,
    pub ic_class: IcClass,
    pub settings: Vec<Vec<PovmElement>>,
    /// Free-form notes, e.g. how infeasible weight solves were completed.
    pub notes: Vec<String>,
}

impl PovmConstruction {
    pub fn n_settings(&self) -> usize {
        self.settings.len()
    }

    pub fn n_outcomes(&self) -> usize {
        self.settings.iter().map(|s| s.len()).sum()
    }

    pub fn elements(&self) -> impl Iterator<Item = &PovmElement> {
        self.settings.iter().flatten()
    }

    /// Per-setting completeness defect max over settings of ||sum E - I||_F.
    pub fn completeness_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for setting in &self.settings {
            let mut acc: CMat = Array2::zeros((self.dim, self.dim));
            for e in setting {
                acc = &acc + &e.operator();
            }
            let dev = qudit_core::linalg::frobenius_norm(
                &(&acc - &qudit_core::linalg::identity(self.dim)),
            );
            worst = worst.max(dev);
        }
        worst
    }

    /// For a setting whose elements form an orthonormal basis, the unitary
    /// with those kets as columns (the map used to realize the measurement).
    pub fn setting_basis(&self, setting: usize) -> Result<CMat, PovmError> {
        let els = &self.settings[setting];
        if els.len() != self.dim {
            return Err(PovmError::ConstructionFailed(format!(
                "setting {setting} has {} outcomes, not a basis of dim {}",
                els.len(),
                self.dim
            )));
        }
        let mut m: CMat = Array2::zeros((self.dim, self.dim));
        for (c, e) in els.iter().enumerate() {
            for r in 0..self.dim {
                m[[r, c]] = e.ket[r];
            }
        }
        let g = qudit_core::linalg::dagger(&m).dot(&m);
        let dev = qudit_core::linalg::frobenius_norm(&(&g - &qudit_core::linalg::identity(self.dim)));
        if dev > 1e-8 {
            return Err(PovmError::ConstructionFailed(format!(
                "setting {setting} kets are not orthonormal (deviation {dev:.2e})"
            )));
        }
        Ok(m)
    }

    /// Restriction to the first k settings, preserving labels and metadata.
    pub fn truncated(&self, k: usize) -> Result<PovmConstruction, PovmError> {
        if k == 0 || k > self.settings.len() {
            return Err(PovmError::ConstructionFailed(format!(
                "cannot keep {k} of {} settings",
                self.settings.len()
            )));
        }
        Ok(PovmConstruction {
            name: format!("{}[0..{}]", self.name, k),
            dim: self.dim,
            ic_class: IcClass::NotIc,
            settings: self.settings[..k].to_vec(),
            notes: self.notes.clone(),
        })
    }

    pub fn to_json(&self) -> String {
        let ser = SerializedConstruction::from(self);
        serde_json::to_string_pretty(&ser).expect("construction serialization")
    }

    pub fn from_json(s: &str) -> Result<PovmConstruction, PovmError> {
        let ser: SerializedConstruction =
            serde_json::from_str(s).map_err(|e| PovmError::Serde(e.to_string()))?;
        ser.build()
    }

    /// Build a basis-type construction from a list of unitaries whose
    /// columns are the basis kets.
    pub fn from_bases(
        name: impl Into<String>,
        ic_class: IcClass,
        bases: &[CMat],
    ) -> PovmConstruction {
        let dim = bases[0].nrows();
        let settings = bases
            .iter()
            .enumerate()
            .map(|(s, b)| {
                (0..dim)
                    .map(|c| PovmElement {
                        ket: CVec::from_iter((0..dim).map(|r| b[[r, c]])),
                        setting: s,
                        outcome: c,
                    })
                    .collect()
            })
            .collect();
        PovmConstruction { name: name.into(), dim, ic_class, settings, notes: Vec::new() }
    }
}

/// Logical (computational) basis as a single-setting construction.
pub fn logical_basis(dim: usize) -> PovmConstruction {
    let eye: CMat = Array2::eye(dim);
    let mut c = PovmConstruction::from_bases("LOGICAL", IcClass::NotIc, &[eye]);
    c.dim = dim;
    c
}

#[derive(Serialize, Deserialize)]
struct SerializedKet {
    re: Vec<f64>,
    im: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct SerializedConstruction {
    name: String,
    dim: usize,
    ic_class: IcClass,
    bases: Vec<Vec<SerializedKet>>,
    #[serde(default)]
    notes: Vec<String>,
}

impl From<&PovmConstruction> for SerializedConstruction {
    fn from(c: &PovmConstruction) -> Self {
        SerializedConstruction {
            name: c.name.clone(),
            dim: c.dim,
            ic_class: c.ic_class,
            bases: c
                .settings
                .iter()
                .map(|s| {
                    s.iter()
                        .map(|e| SerializedKet {
                            re: e.ket.iter().map(|z| z.re).collect(),
                            im: e.ket.iter().map(|z| z.im).collect(),
                        })
                        .collect()
                })
                .collect(),
            notes: c.notes.clone(),
        }
    }
}

impl SerializedConstruction {
    fn build(self) -> Result<PovmConstruction, PovmError> {
        let settings = self
            .bases
            .iter()
            .enumerate()
            .map(|(s, kets)| {
                kets.iter()
                    .enumerate()
                    .map(|(o, k)| {
                        if k.re.len() != self.dim || k.im.len() != self.dim {
                            return Err(PovmError::Serde(format!(
                                "ket length mismatch in setting {s} outcome {o}"
                            )));
                        }
                        Ok(PovmElement {
                            ket: CVec::from_iter(
                                k.re.iter().zip(k.im.iter()).map(|(&r, &i)| Complex64::new(r, i)),
                            ),
                            setting: s,
                            outcome: o,
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PovmConstruction {
            name: self.name,
            dim: self.dim,
            ic_class: self.ic_class,
            settings,
            notes: self.notes,
        })
    }
}
