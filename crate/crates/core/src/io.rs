//! JSON problem files.
//!
//! A cone program:
//!
//! ```json
//! { "m": 1, "n": 1,
//!   "A": [[0, 0, 1.0]],
//!   "b": [1.0], "c": [-1.0],
//!   "cones": [{ "type": "nonneg", "dim": 1 }] }
//! ```
//!
//! `A` is a list of `[row, col, value]` triplets. Cone types are `zero`,
//! `nonneg` and `soc` (epigraph coordinate first).
//!
//! A feasibility problem `{z : A(z − p) = rhs} ∩ (D₁ × D₂ × …)`:
//!
//! ```json
//! { "n": 2,
//!   "affine": { "rows": 1, "A": [[0, 1, 1.0]], "rhs": [0.0], "offset": [0.0, 0.0] },
//!   "sets": [{ "type": "nonneg", "dim": 2 }] }
//! ```
//!
//! `rhs` and `offset` default to zero. Set types are `zero`, `free`,
//! `nonneg`, `soc`, `box` (`lower`/`upper`, `null` for an infinite bound)
//! and `ball` (`center`, `radius`).

use std::fs;
use std::path::Path;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::cone::{ConeProgram, EmbeddedFeasibility};
use crate::error::{Error, Result};
use crate::projections::{AffineSubspace, Ball, BoxSet, ConvexSet, ProductSet};

pub type Triplet = (usize, usize, f64);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum ConeSpec {
    Zero { dim: usize },
    Nonneg { dim: usize },
    Soc { dim: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeProgramFile {
    pub m: usize,
    pub n: usize,
    #[serde(rename = "A")]
    pub a: Vec<Triplet>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub cones: Vec<ConeSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum SetSpec {
    Zero { dim: usize },
    Free { dim: usize },
    Nonneg { dim: usize },
    Soc { dim: usize },
    Box { lower: Vec<Option<f64>>, upper: Vec<Option<f64>> },
    Ball { center: Vec<f64>, radius: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffineSpec {
    pub rows: usize,
    #[serde(rename = "A")]
    pub a: Vec<Triplet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rhs: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeasibilityFile {
    pub n: usize,
    pub affine: AffineSpec,
    pub sets: Vec<SetSpec>,
}

/// Either kind of problem file.
#[derive(Debug, Clone, PartialEq)]
pub enum ProblemFile {
    Cone(ConeProgramFile),
    Feasibility(FeasibilityFile),
}

impl ProblemFile {
    /// Distinguishes the two formats by their `cones` / `affine` keys.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        let has = |k: &str| value.get(k).is_some();
        match (has("cones"), has("affine")) {
            (true, false) => Ok(Self::Cone(serde_json::from_value(value)?)),
            (false, true) => Ok(Self::Feasibility(serde_json::from_value(value)?)),
            _ => Err(Error::InvalidProblem(
                "expected exactly one of the keys \"cones\" (cone program) or \"affine\" (feasibility problem)".into(),
            )),
        }
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}

impl ConeSpec {
    fn to_set(&self) -> ConvexSet {
        match *self {
            ConeSpec::Zero { dim } => ConvexSet::Zero(dim),
            ConeSpec::Nonneg { dim } => ConvexSet::Nonnegative(dim),
            ConeSpec::Soc { dim } => ConvexSet::SecondOrderCone(dim),
        }
    }
}

impl ConeProgramFile {
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }

    pub fn to_program(&self) -> Result<ConeProgram> {
        let cones = ProductSet::new(self.cones.iter().map(ConeSpec::to_set).collect());
        ConeProgram::from_triplets(self.m, self.n, &self.a, self.b.clone(), self.c.clone(), cones)
    }
}

fn bound(v: &[Option<f64>], missing: f64) -> Vec<f64> {
    v.iter().map(|b| b.unwrap_or(missing)).collect()
}

fn finite_or_null(v: &[f64]) -> Vec<Option<f64>> {
    v.iter().map(|&b| b.is_finite().then_some(b)).collect()
}

impl SetSpec {
    pub fn to_set(&self) -> Result<ConvexSet> {
        Ok(match self {
            SetSpec::Zero { dim } => ConvexSet::Zero(*dim),
            SetSpec::Free { dim } => ConvexSet::Free(*dim),
            SetSpec::Nonneg { dim } => ConvexSet::Nonnegative(*dim),
            SetSpec::Soc { dim } => ConvexSet::SecondOrderCone(*dim),
            SetSpec::Box { lower, upper } => {
                ConvexSet::Box(BoxSet::new(bound(lower, f64::NEG_INFINITY), bound(upper, f64::INFINITY))?)
            }
            SetSpec::Ball { center, radius } => ConvexSet::Ball(Ball::new(center.clone(), *radius)?),
        })
    }

    /// Inverse of [`SetSpec::to_set`], flattening nested products. Affine
    /// components have no file representation.
    pub fn from_set(set: &ConvexSet, out: &mut Vec<SetSpec>) -> Result<()> {
        match set {
            ConvexSet::Zero(dim) => out.push(SetSpec::Zero { dim: *dim }),
            ConvexSet::Free(dim) => out.push(SetSpec::Free { dim: *dim }),
            ConvexSet::Nonnegative(dim) => out.push(SetSpec::Nonneg { dim: *dim }),
            ConvexSet::SecondOrderCone(dim) => out.push(SetSpec::Soc { dim: *dim }),
            ConvexSet::Box(b) => {
                out.push(SetSpec::Box { lower: finite_or_null(b.lower()), upper: finite_or_null(b.upper()) })
            }
            ConvexSet::Ball(b) => out.push(SetSpec::Ball { center: b.center().to_vec(), radius: b.radius() }),
            ConvexSet::Product(p) => {
                for c in p.components() {
                    Self::from_set(c, out)?;
                }
            }
            ConvexSet::Affine(_) => {
                return Err(Error::InvalidSet("affine components cannot appear in the set list".into()))
            }
        }
        Ok(())
    }
}

/// The two sets of a feasibility file: the affine one first.
#[derive(Debug, Clone)]
pub struct Feasibility {
    pub affine: AffineSubspace,
    pub set: ConvexSet,
}

impl Feasibility {
    pub fn sets(&self) -> Vec<ConvexSet> {
        vec![self.affine.clone().into(), self.set.clone()]
    }
}

impl FeasibilityFile {
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn from_embedding(e: &EmbeddedFeasibility) -> Result<Self> {
        let mut sets = Vec::new();
        SetSpec::from_set(&ConvexSet::Product(e.coneset().clone()), &mut sets)?;
        let a = e
            .matrix()
            .triplet_iter()
            .map(|(i, j, &v)| (i, j, v))
            .collect();
        Ok(Self {
            n: e.dim(),
            affine: AffineSpec { rows: e.matrix().nrows(), a, rhs: Some(e.rhs().as_slice().to_vec()), offset: None },
            sets,
        })
    }

    pub fn to_problem(&self) -> Result<Feasibility> {
        let n = self.n;
        let spec = &self.affine;
        let mut rhs = match &spec.rhs {
            Some(r) => DVector::from_column_slice(r),
            None => DVector::zeros(spec.rows),
        };
        if rhs.len() != spec.rows {
            return Err(Error::DimensionMismatch { expected: spec.rows, got: rhs.len() });
        }
        if let Some(p) = &spec.offset {
            if p.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: p.len() });
            }
            // A(z − p) = rhs  ⟺  A z = rhs + A p
            for &(i, j, v) in &spec.a {
                if i < spec.rows && j < n {
                    rhs[i] += v * p[j];
                }
            }
        }
        let affine = AffineSubspace::from_triplets(spec.rows, n, &spec.a, rhs)?;
        let components = self.sets.iter().map(SetSpec::to_set).collect::<Result<Vec<_>>>()?;
        let set = match components.len() {
            1 => components.into_iter().next().unwrap(),
            _ => ConvexSet::product(components),
        };
        if set.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: set.dim() });
        }
        Ok(Feasibility { affine, set })
    }
}
