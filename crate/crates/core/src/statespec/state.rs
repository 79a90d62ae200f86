use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::layout::{Factor, Role, SubsystemLayout};
use crate::error::{Error, Result};

/// Tolerance on the norm of a state vector.
pub const NORM_TOL: f64 = 1e-9;

/// A unit vector over the tensor product of labelled subsystems.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledPureState {
    layout: SubsystemLayout,
    amplitudes: Vec<Complex64>,
}

impl LabeledPureState {
    /// Wraps amplitudes that are already normalized.
    pub fn new(layout: SubsystemLayout, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_len(&layout, &amplitudes)?;
        let norm = norm(&amplitudes);
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NormViolation { norm });
        }
        Ok(LabeledPureState { layout, amplitudes })
    }

    /// Rescales amplitudes to unit norm.
    pub fn normalized(layout: SubsystemLayout, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        check_len(&layout, &amplitudes)?;
        let norm = norm(&amplitudes);
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::ZeroVector);
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Ok(LabeledPureState { layout, amplitudes })
    }

    /// Haar-random state: normalized i.i.d. complex Gaussian amplitudes.
    pub fn random<R: Rng + ?Sized>(layout: SubsystemLayout, rng: &mut R) -> Self {
        let amps = (0..layout.total_dim())
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        LabeledPureState::normalized(layout, amps).expect("gaussian vector is nonzero")
    }

    /// Tensor product of per-group amplitude blocks.
    ///
    /// Each entry lists factor labels and an amplitude vector over those
    /// factors (row-major in the listed order). Every factor of the layout
    /// must appear in exactly one group.
    pub fn from_factors(
        layout: SubsystemLayout,
        groups: &[(Vec<Complex64>, Vec<String>)],
    ) -> Result<Self> {
        let dims = layout.dims();
        let mut covered = vec![false; dims.len()];
        let mut placed = Vec::with_capacity(groups.len());
        for (amps, labels) in groups {
            let mut idx = Vec::with_capacity(labels.len());
            for l in labels {
                let i = layout
                    .index_of(l)
                    .ok_or_else(|| Error::UnknownLabel(l.clone()))?;
                if std::mem::replace(&mut covered[i], true) {
                    return Err(Error::InvalidLayout(format!(
                        "factor `{l}` appears in more than one group"
                    )));
                }
                idx.push(i);
            }
            let group_dim: usize = idx.iter().map(|&i| dims[i]).product();
            if group_dim != amps.len() {
                return Err(Error::IndexOutOfRange(format!(
                    "group over {labels:?} has dimension {group_dim} but {} amplitudes",
                    amps.len()
                )));
            }
            placed.push((amps, idx));
        }
        if let Some(i) = covered.iter().position(|c| !c) {
            return Err(Error::InvalidLayout(format!(
                "factor `{}` is not covered by any group",
                layout.factors()[i].label
            )));
        }

        let total = layout.total_dim();
        let mut out = vec![Complex64::new(0.0, 0.0); total];
        let mut digits = vec![0usize; dims.len()];
        for (flat, slot) in out.iter_mut().enumerate() {
            unflatten(flat, &dims, &mut digits);
            let mut amp = Complex64::new(1.0, 0.0);
            for (amps, idx) in &placed {
                let sub = idx.iter().fold(0, |acc, &i| acc * dims[i] + digits[i]);
                amp *= amps[sub];
                if amp == Complex64::new(0.0, 0.0) {
                    break;
                }
            }
            *slot = amp;
        }
        LabeledPureState::normalized(layout, out)
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn dims(&self) -> Vec<usize> {
        self.layout.dims()
    }

    /// Same amplitudes with the roles of two label lists exchanged.
    pub fn with_roles_swapped(&self, a: Role, b: Role) -> Self {
        LabeledPureState {
            layout: self.layout.with_roles_swapped(a, b),
            amplitudes: self.amplitudes.clone(),
        }
    }

    /// The target of the exchange: C_A now held by Bob, C_B by Alice.
    ///
    /// Only ownership changes; the amplitudes are untouched.
    pub fn exchanged(&self) -> Self {
        self.with_roles_swapped(Role::CA, Role::CB)
    }

    /// Tensor product with factors of `other` appended.
    pub fn tensor(&self, other: &LabeledPureState) -> Result<Self> {
        let layout = self.layout.tensor(&other.layout)?;
        let mut amps = Vec::with_capacity(self.amplitudes.len() * other.amplitudes.len());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amps.push(a * b);
            }
        }
        LabeledPureState::normalized(layout, amps)
    }

    /// Inner product ⟨self|other⟩ over identical factor orders.
    pub fn overlap(&self, other: &LabeledPureState) -> Option<Complex64> {
        if self.layout.dims() != other.layout.dims() {
            return None;
        }
        Some(
            self.amplitudes
                .iter()
                .zip(&other.amplitudes)
                .map(|(a, b)| a.conj() * b)
                .sum(),
        )
    }
}

fn check_len(layout: &SubsystemLayout, amps: &[Complex64]) -> Result<()> {
    if amps.len() != layout.total_dim() {
        return Err(Error::IndexOutOfRange(format!(
            "{} amplitudes for total dimension {}",
            amps.len(),
            layout.total_dim()
        )));
    }
    Ok(())
}

pub(crate) fn norm(amps: &[Complex64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn unflatten(mut flat: usize, dims: &[usize], digits: &mut [usize]) {
    for (d, dim) in digits.iter_mut().zip(dims).rev() {
        *d = flat % dim;
        flat /= dim;
    }
}

/// (1/√d) Σ_k |kkk⟩ on three d-dimensional factors.
pub fn build_ghz(d: usize) -> Result<Vec<Complex64>> {
    diagonal_state(d, 3)
}

/// (1/√d) Σ_k |kk⟩ on two d-dimensional factors.
pub fn build_maxent(d: usize) -> Result<Vec<Complex64>> {
    diagonal_state(d, 2)
}

fn diagonal_state(d: usize, parties: u32) -> Result<Vec<Complex64>> {
    if d < 2 {
        return Err(Error::Precondition(format!("local dimension {d} must be at least 2")));
    }
    let total = d.pow(parties);
    let mut amps = vec![Complex64::new(0.0, 0.0); total];
    let amp = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
    // index of |kk..k⟩ is k·(1 + d + d² + ...)
    let step: usize = (0..parties).map(|p| d.pow(p)).sum();
    for k in 0..d {
        amps[k * step] = amp;
    }
    Ok(amps)
}

/// A single GHZ or maximally entangled state on freshly labelled factors,
/// assigned to the given roles in order.
pub fn entangled_block(d: usize, parts: &[(&str, Role)]) -> Result<LabeledPureState> {
    let amps = match parts.len() {
        2 => build_maxent(d)?,
        3 => build_ghz(d)?,
        n => {
            return Err(Error::Precondition(format!(
                "entangled blocks span 2 or 3 factors, not {n}"
            )))
        }
    };
    let factors = parts.iter().map(|(l, _)| Factor::new(*l, d)).collect();
    let roles: Vec<(Role, Vec<String>)> = Role::ALL
        .into_iter()
        .map(|r| {
            (
                r,
                parts
                    .iter()
                    .filter(|(_, pr)| *pr == r)
                    .map(|(l, _)| l.to_string())
                    .collect(),
            )
        })
        .collect();
    let layout = SubsystemLayout::new(factors, &roles)?;
    LabeledPureState::new(layout, amps)
}
