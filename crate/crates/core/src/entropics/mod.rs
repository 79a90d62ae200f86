//! Reduced density matrices, Hermitian spectra and the entropic quantities
//! built from them. All entropies are in bits.
//!
//! Subsystem selections accept role names (`A`, `C_A`, `B`, `C_B`, `R`) and
//! factor labels interchangeably; roles expand to their factor lists.

mod eigen;
mod matrix;

use std::collections::HashMap;

use num_complex::Complex64;
use serde::Serialize;

pub use eigen::{jacobi_eigh, tridiagonal_eigenvalues, SWEEPS_PER_DIM};
pub use matrix::CMatrix;

use crate::error::{Error, Result};
use crate::statespec::{Factor, LabeledPureState, SubsystemLayout};

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-9;
/// Eigenvalues in `[-CLAMP_TOL, 0)` are numerical noise and clamp to zero.
pub const CLAMP_TOL: f64 = 1e-10;
pub const SPECTRUM_SUM_TOL: f64 = 1e-8;
pub const RESIDUAL_TOL: f64 = 1e-8;

/// Logarithm base for entropies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum LogBase {
    #[default]
    Bits,
    Nats,
}

impl LogBase {
    fn log(self, p: f64) -> f64 {
        match self {
            LogBase::Bits => p.log2(),
            LogBase::Nats => p.ln(),
        }
    }
}

/// A density operator on a subset of a layout's factors.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    factors: Vec<Factor>,
    matrix: CMatrix,
}

impl DensityMatrix {
    pub fn new(factors: Vec<Factor>, matrix: CMatrix) -> Result<Self> {
        let dim: usize = factors.iter().map(|f| f.dim).product();
        if dim != matrix.dim() {
            return Err(Error::InvalidDensityMatrix(format!(
                "factors span dimension {dim} but the matrix is {0}x{0}",
                matrix.dim()
            )));
        }
        let defect = matrix.hermiticity_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian (deviation {defect:e})"
            )));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidDensityMatrix(format!("trace {tr} is not 1")));
        }
        Ok(DensityMatrix { factors, matrix })
    }

    /// Maximally mixed state on the given factors.
    pub fn maximally_mixed(factors: Vec<Factor>) -> Self {
        let dim: usize = factors.iter().map(|f| f.dim).product();
        let m = CMatrix::from_diag(&vec![1.0 / dim as f64; dim]);
        DensityMatrix { factors, matrix: m }
    }

    pub fn labels(&self) -> Vec<&str> {
        self.factors.iter().map(|f| f.label.as_str()).collect()
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

/// Eigenvalues of a density matrix, sorted descending and clamped at zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
}

impl Spectrum {
    pub fn from_eigenvalues(mut values: Vec<f64>) -> Result<Self> {
        for v in &mut values {
            if *v < -CLAMP_TOL || v.is_nan() {
                return Err(Error::NegativeEigenvalue(*v));
            }
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        values.sort_by(|a, b| b.partial_cmp(a).expect("finite eigenvalues"));
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > SPECTRUM_SUM_TOL {
            return Err(Error::InvalidDensityMatrix(format!("eigenvalues sum to {sum}")));
        }
        Ok(Spectrum { eigenvalues: values })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn entropy(&self) -> f64 {
        self.entropy_in(LogBase::Bits)
    }

    pub fn entropy_in(&self, base: LogBase) -> f64 {
        shannon(&self.eigenvalues, base)
    }
}

fn shannon(p: &[f64], base: LogBase) -> f64 {
    let h: f64 = p
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * base.log(x))
        .sum();
    h.max(0.0)
}

/// Splits flat indices of a layout into (kept, traced) sub-indices.
pub(crate) struct IndexSplit {
    pub kept_dim: usize,
    pub traced_dim: usize,
    pub kept: Vec<usize>,
    pub traced: Vec<usize>,
}

impl IndexSplit {
    pub fn new(dims: &[usize], keep: &[bool]) -> Self {
        let mut kept_stride = vec![0; dims.len()];
        let mut traced_stride = vec![0; dims.len()];
        let (mut ks, mut ts) = (1, 1);
        for i in (0..dims.len()).rev() {
            if keep[i] {
                kept_stride[i] = ks;
                ks *= dims[i];
            } else {
                traced_stride[i] = ts;
                ts *= dims[i];
            }
        }
        let total: usize = dims.iter().product();
        let mut kept = Vec::with_capacity(total);
        let mut traced = Vec::with_capacity(total);
        let mut digits = vec![0usize; dims.len()];
        let (mut k, mut t) = (0, 0);
        for _ in 0..total {
            kept.push(k);
            traced.push(t);
            // odometer increment, last factor fastest
            for i in (0..dims.len()).rev() {
                digits[i] += 1;
                if keep[i] {
                    k += kept_stride[i];
                } else {
                    t += traced_stride[i];
                }
                if digits[i] < dims[i] {
                    break;
                }
                if keep[i] {
                    k -= kept_stride[i] * dims[i];
                } else {
                    t -= traced_stride[i] * dims[i];
                }
                digits[i] = 0;
            }
        }
        IndexSplit {
            kept_dim: ks,
            traced_dim: ts,
            kept,
            traced,
        }
    }

    /// Rearranges amplitudes into a kept × traced block.
    pub fn block(&self, amps: &[Complex64], out: &mut Vec<Complex64>) {
        out.clear();
        out.resize(self.kept_dim * self.traced_dim, Complex64::new(0.0, 0.0));
        for (flat, a) in amps.iter().enumerate() {
            out[self.kept[flat] * self.traced_dim + self.traced[flat]] = *a;
        }
    }
}

fn mask(n: usize, indices: &[usize]) -> Vec<bool> {
    let mut m = vec![false; n];
    for &i in indices {
        m[i] = true;
    }
    m
}

/// Partial trace of a pure state onto the selected subsystems.
///
/// Rows and columns are indexed row-major over the retained factors in
/// declared order.
pub fn reduce<S: AsRef<str>>(s: &LabeledPureState, keep: &[S]) -> Result<DensityMatrix> {
    let layout = s.layout();
    let idx = layout.resolve(keep)?;
    if idx.is_empty() {
        return Err(Error::Precondition("cannot retain an empty set of subsystems".into()));
    }
    let dims = layout.dims();
    let split = IndexSplit::new(&dims, &mask(dims.len(), &idx));
    let mut block = Vec::new();
    split.block(s.amplitudes(), &mut block);
    let m = CMatrix::gram_rows(&block, split.kept_dim, split.traced_dim);
    let factors = idx.iter().map(|&i| layout.factors()[i].clone()).collect();
    DensityMatrix::new(factors, m)
}

/// Partial trace of a density matrix onto labels in `keep`.
pub fn reduce_dm<S: AsRef<str>>(rho: &DensityMatrix, keep: &[S]) -> Result<DensityMatrix> {
    if keep.is_empty() {
        return Err(Error::Precondition("cannot retain an empty set of subsystems".into()));
    }
    let mut keep_mask = vec![false; rho.factors.len()];
    for k in keep {
        let k = k.as_ref();
        let i = rho
            .factors
            .iter()
            .position(|f| f.label == k)
            .ok_or_else(|| Error::UnknownLabel(k.to_string()))?;
        keep_mask[i] = true;
    }
    let dims: Vec<usize> = rho.factors.iter().map(|f| f.dim).collect();
    let split = IndexSplit::new(&dims, &keep_mask);
    let dk = split.kept_dim;
    let mut out = CMatrix::zeros(dk);
    let n = rho.dim();
    for i in 0..n {
        for j in 0..n {
            if split.traced[i] == split.traced[j] {
                out[(split.kept[i], split.kept[j])] += rho.matrix[(i, j)];
            }
        }
    }
    let factors = rho
        .factors
        .iter()
        .zip(&keep_mask)
        .filter(|(_, k)| **k)
        .map(|(f, _)| f.clone())
        .collect();
    DensityMatrix::new(factors, out)
}

/// Spectrum of a density matrix, with the Jacobi reconstruction residual
/// checked against [`RESIDUAL_TOL`].
pub fn hermitian_spectrum(rho: &DensityMatrix) -> Result<Spectrum> {
    spectrum_of(&rho.matrix)
}

pub(crate) fn spectrum_of(m: &CMatrix) -> Result<Spectrum> {
    let (values, vectors) = jacobi_eigh(m)?;
    let residual = CMatrix::reconstruct(&vectors, &values).max_abs_diff(m);
    if residual > RESIDUAL_TOL {
        return Err(Error::NonConvergence {
            dim: m.dim(),
            residual,
        });
    }
    Spectrum::from_eigenvalues(values)
}

pub fn entropy(rho: &DensityMatrix) -> Result<f64> {
    Ok(hermitian_spectrum(rho)?.entropy())
}

pub fn entropy_in(rho: &DensityMatrix, base: LogBase) -> Result<f64> {
    Ok(hermitian_spectrum(rho)?.entropy_in(base))
}

/// Entropy from the tridiagonal eigenvalue route, without eigenvectors.
pub fn fast_entropy(m: &CMatrix) -> Result<f64> {
    let values = tridiagonal_eigenvalues(m)?;
    Ok(Spectrum::from_eigenvalues(values)?.entropy())
}

/// Entropy of the marginal of a pure state on the factor set `idx`.
///
/// Uses whichever side of the bipartition is smaller; the nonzero spectra
/// of complementary marginals of a pure state coincide.
pub(crate) fn marginal_entropy_indices(
    amps: &[Complex64],
    dims: &[usize],
    idx: &[usize],
    base: LogBase,
) -> Result<f64> {
    if idx.is_empty() || idx.len() == dims.len() {
        return Ok(0.0);
    }
    let keep = mask(dims.len(), idx);
    let kept_dim: usize = idx.iter().map(|&i| dims[i]).product();
    let total: usize = dims.iter().product();
    let keep = if kept_dim * kept_dim <= total {
        keep
    } else {
        keep.iter().map(|k| !k).collect()
    };
    let split = IndexSplit::new(dims, &keep);
    let mut block = Vec::new();
    split.block(amps, &mut block);
    let m = CMatrix::gram_rows(&block, split.kept_dim, split.traced_dim);
    Ok(spectrum_of(&m)?.entropy_in(base))
}

/// H(X) of the marginal of a pure state.
pub fn marginal_entropy<S: AsRef<str>>(s: &LabeledPureState, x: &[S]) -> Result<f64> {
    marginal_entropy_in(s, x, LogBase::Bits)
}

pub fn marginal_entropy_in<S: AsRef<str>>(
    s: &LabeledPureState,
    x: &[S],
    base: LogBase,
) -> Result<f64> {
    let idx = s.layout().resolve(x)?;
    marginal_entropy_indices(s.amplitudes(), &s.dims(), &idx, base)
}

fn disjoint(layout: &SubsystemLayout, sets: &[&[usize]]) -> Result<()> {
    let mut seen = vec![false; layout.factors().len()];
    for set in sets {
        for &i in *set {
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::OverlappingSets(layout.factors()[i].label.clone()));
            }
        }
    }
    Ok(())
}

fn union(sets: &[&[usize]]) -> Vec<usize> {
    let mut u: Vec<usize> = sets.iter().flat_map(|s| s.iter().copied()).collect();
    u.sort_unstable();
    u
}

/// H(X|Y) = H(XY) − H(Y).
pub fn cond_entropy<S: AsRef<str>>(s: &LabeledPureState, x: &[S], y: &[S]) -> Result<f64> {
    let layout = s.layout();
    let (xi, yi) = (layout.resolve(x)?, layout.resolve(y)?);
    disjoint(layout, &[&xi, &yi])?;
    let (amps, dims) = (s.amplitudes(), s.dims());
    let hxy = marginal_entropy_indices(amps, &dims, &union(&[&xi, &yi]), LogBase::Bits)?;
    let hy = marginal_entropy_indices(amps, &dims, &yi, LogBase::Bits)?;
    Ok(hxy - hy)
}

/// I(X;Y|Z) = H(XZ) + H(YZ) − H(Z) − H(XYZ), unclamped.
pub fn qcmi<S: AsRef<str>>(s: &LabeledPureState, x: &[S], y: &[S], z: &[S]) -> Result<f64> {
    let layout = s.layout();
    let (xi, yi, zi) = (layout.resolve(x)?, layout.resolve(y)?, layout.resolve(z)?);
    disjoint(layout, &[&xi, &yi, &zi])?;
    let (amps, dims) = (s.amplitudes(), s.dims());
    let h = |sets: &[&[usize]]| marginal_entropy_indices(amps, &dims, &union(sets), LogBase::Bits);
    Ok(h(&[&xi, &zi])? + h(&[&yi, &zi])? - h(&[&zi])? - h(&[&xi, &yi, &zi])?)
}

/// h(p) = −p log₂ p − (1−p) log₂(1−p).
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Precondition(format!("probability {p} outside [0, 1]")));
    }
    Ok(shannon(&[p, 1.0 - p], LogBase::Bits))
}

/// Memoized marginal entropies of one pure state, keyed by factor set.
pub struct EntropyTable<'a> {
    state: &'a LabeledPureState,
    dims: Vec<usize>,
    base: LogBase,
    cache: HashMap<Vec<usize>, f64>,
}

impl<'a> EntropyTable<'a> {
    pub fn new(state: &'a LabeledPureState) -> Self {
        Self::with_base(state, LogBase::Bits)
    }

    pub fn with_base(state: &'a LabeledPureState, base: LogBase) -> Self {
        EntropyTable {
            state,
            dims: state.dims(),
            base,
            cache: HashMap::new(),
        }
    }

    pub fn state(&self) -> &LabeledPureState {
        self.state
    }

    /// H of the union of the named roles/labels.
    pub fn h(&mut self, names: &[&str]) -> Result<f64> {
        let idx = self.state.layout().resolve(names)?;
        if let Some(&v) = self.cache.get(&idx) {
            return Ok(v);
        }
        let v = marginal_entropy_indices(self.state.amplitudes(), &self.dims, &idx, self.base)?;
        self.cache.insert(idx, v);
        Ok(v)
    }

    /// H(X|Y), with X and Y given as name lists; overlap is rejected.
    pub fn cond(&mut self, x: &[&str], y: &[&str]) -> Result<f64> {
        let layout = self.state.layout();
        disjoint(layout, &[&layout.resolve(x)?, &layout.resolve(y)?])?;
        let xy: Vec<&str> = x.iter().chain(y).copied().collect();
        Ok(self.h(&xy)? - self.h(y)?)
    }

    /// I(X;Y|Z), unclamped.
    pub fn qcmi(&mut self, x: &[&str], y: &[&str], z: &[&str]) -> Result<f64> {
        let layout = self.state.layout();
        disjoint(
            layout,
            &[&layout.resolve(x)?, &layout.resolve(y)?, &layout.resolve(z)?],
        )?;
        let xz: Vec<&str> = x.iter().chain(z).copied().collect();
        let yz: Vec<&str> = y.iter().chain(z).copied().collect();
        let xyz: Vec<&str> = x.iter().chain(y).chain(z).copied().collect();
        Ok(self.h(&xz)? + self.h(&yz)? - self.h(z)? - self.h(&xyz)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statespec::{builtin, entangled_block, parse_state, ParamEnv, Role};
    use approx::assert_abs_diff_eq;

    fn appendix_c() -> LabeledPureState {
        parse_state(builtin::APPENDIX_C, &ParamEnv::new()).unwrap()
    }

    fn eq8(lambda: f64) -> LabeledPureState {
        parse_state(builtin::EQ8, &ParamEnv::new().with("lambda", lambda).unwrap()).unwrap()
    }

    #[test]
    fn bell_marginal_is_maximally_mixed() {
        let b = entangled_block(2, &[("X", Role::CA), ("Y", Role::CB)]).unwrap();
        let rho = reduce(&b, &["X"]).unwrap();
        assert!(rho.matrix().max_abs_diff(&CMatrix::from_diag(&[0.5, 0.5])) < 1e-15);
        assert_abs_diff_eq!(entropy(&rho).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn ghz_two_party_marginal() {
        let g = entangled_block(2, &[("X", Role::CA), ("Y", Role::CB), ("Z", Role::R)]).unwrap();
        let rho = reduce(&g, &["X", "Y"]).unwrap();
        assert!(rho.matrix().max_abs_diff(&CMatrix::from_diag(&[0.5, 0.0, 0.0, 0.5])) < 1e-15);
    }

    #[test]
    fn keeping_everything_gives_the_projector() {
        let s = eq8(0.3);
        let rho = reduce(&s, &["A", "C_A", "B", "C_B", "R"]).unwrap();
        assert!(rho.matrix().max_abs_diff(&CMatrix::projector(s.amplitudes())) < 1e-15);
        let spec = hermitian_spectrum(&rho).unwrap();
        assert_abs_diff_eq!(spec.eigenvalues()[0], 1.0, epsilon = 1e-12);
        assert!(spec.eigenvalues()[1..].iter().all(|&v| v.abs() < 1e-12));
        assert_abs_diff_eq!(entropy(&rho).unwrap(), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn reduce_dm_paths() {
        let s = appendix_c();
        let rho = reduce(&s, &["A", "C_A", "B"]).unwrap();
        assert_eq!(reduce_dm(&rho, &["A", "C_A", "B"]).unwrap(), rho);
        assert!(matches!(reduce_dm(&rho, &[] as &[&str]), Err(Error::Precondition(_))));
        assert!(matches!(reduce_dm(&rho, &["R"]), Err(Error::UnknownLabel(_))));

        let mixed = DensityMatrix::maximally_mixed(vec![Factor::new("x", 2), Factor::new("y", 2)]);
        let one = reduce_dm(&mixed, &["y"]).unwrap();
        assert!(one.matrix().max_abs_diff(&CMatrix::from_diag(&[0.5, 0.5])) < 1e-15);
    }

    #[test]
    fn unknown_labels() {
        let s = appendix_c();
        assert!(matches!(reduce(&s, &["Q"]), Err(Error::UnknownLabel(_))));
    }

    #[test]
    fn simple_spectra() {
        let half = DensityMatrix::new(vec![Factor::new("x", 2)], CMatrix::from_diag(&[0.5, 0.5])).unwrap();
        assert_eq!(hermitian_spectrum(&half).unwrap().eigenvalues(), &[0.5, 0.5]);
        assert_abs_diff_eq!(entropy(&half).unwrap(), 1.0);
    }

    #[test]
    fn appendix_c_two_by_two_spectrum() {
        // ρ_{C_A B} has eigenvalues (3 ± √5)/6
        let rho = reduce(&appendix_c(), &["C_A", "B"]).unwrap();
        let spec = hermitian_spectrum(&rho).unwrap();
        let s5 = 5f64.sqrt();
        assert_abs_diff_eq!(spec.eigenvalues()[0], (3.0 + s5) / 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(spec.eigenvalues()[1], (3.0 - s5) / 6.0, epsilon = 1e-12);
        assert!(spec.eigenvalues()[2..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn appendix_c_entropies() {
        let s = appendix_c();
        assert_abs_diff_eq!(marginal_entropy(&s, &["R", "B"]).unwrap(), 3f64.log2(), epsilon = 1e-12);
        assert_abs_diff_eq!(
            entropy(&reduce(&s, &["R", "B"]).unwrap()).unwrap(),
            1.584962500721156,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(marginal_entropy(&s, &["C_A", "B"]).unwrap(), 0.5500477595827573, epsilon = 1e-12);
    }

    #[test]
    fn conditional_entropy_examples() {
        assert_abs_diff_eq!(cond_entropy(&eq8(1.0), &["C_A"], &["B", "C_B"]).unwrap(), -1.0, epsilon = 1e-12);
        let basis = parse_state(
            "systems X:2 Y:2\nroles A=- C_A=X B=- C_B=Y R=-\nket 1 |00>\n",
            &ParamEnv::new(),
        )
        .unwrap();
        assert_abs_diff_eq!(cond_entropy(&basis, &["X"], &["Y"]).unwrap(), 0.0);
        // H(C_B|A): on the QCMI example state it is H(C_B A) − H(A)
        let s = appendix_c();
        let lhs = cond_entropy(&s, &["C_B"], &["A"]).unwrap();
        let rhs = marginal_entropy(&s, &["C_B", "A"]).unwrap() - marginal_entropy(&s, &["A"]).unwrap();
        assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-14);
        assert!(matches!(
            cond_entropy(&s, &["C_B", "A"], &["A"]),
            Err(Error::OverlappingSets(_))
        ));
    }

    #[test]
    fn qcmi_examples() {
        let s = appendix_c();
        assert!(qcmi(&s, &["R"], &["C_A"], &["A"]).unwrap().abs() <= 1e-9);
        assert_abs_diff_eq!(qcmi(&s, &["R"], &["C_B"], &["B"]).unwrap(), 2.0 / 3.0, epsilon = 1e-12);
        let product = parse_state(
            "systems X:2 Y:2 Z:2\nroles A=- C_A=X B=- C_B=Y R=Z\nket 1 |010>\n",
            &ParamEnv::new(),
        )
        .unwrap();
        assert_eq!(qcmi(&product, &["X"], &["Y"], &["Z"]).unwrap(), 0.0);
        assert!(matches!(qcmi(&s, &["R"], &["R"], &["A"]), Err(Error::OverlappingSets(_))));
    }

    #[test]
    fn binary_entropy_values() {
        assert_abs_diff_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_abs_diff_eq!(binary_entropy((3.0 - 5f64.sqrt()) / 6.0).unwrap(), 0.550048, epsilon = 1e-6);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert!(binary_entropy(1.5).is_err());
        assert!(binary_entropy(-0.1).is_err());
    }

    #[test]
    fn clamping_rules() {
        let s = Spectrum::from_eigenvalues(vec![1.0 + 5e-11, -5e-11]).unwrap();
        assert_eq!(s.eigenvalues(), &[1.0 + 5e-11, 0.0]);
        assert!(matches!(
            Spectrum::from_eigenvalues(vec![1.1, -0.1]),
            Err(Error::NegativeEigenvalue(_))
        ));
    }

    #[test]
    fn invalid_density_matrices() {
        let f = vec![Factor::new("x", 2)];
        assert!(DensityMatrix::new(f.clone(), CMatrix::from_diag(&[0.5, 0.4])).is_err());
        let mut m = CMatrix::from_diag(&[0.5, 0.5]);
        m[(0, 1)] = Complex64::new(0.1, 0.0);
        assert!(DensityMatrix::new(f.clone(), m).is_err());
        assert!(DensityMatrix::new(f, CMatrix::identity(4)).is_err());
    }

    #[test]
    fn table_matches_free_functions() {
        let s = appendix_c();
        let mut t = EntropyTable::new(&s);
        assert_abs_diff_eq!(t.h(&["R", "B"]).unwrap(), marginal_entropy(&s, &["R", "B"]).unwrap());
        assert_abs_diff_eq!(
            t.qcmi(&["R"], &["C_A"], &["B"]).unwrap(),
            qcmi(&s, &["R"], &["C_A"], &["B"]).unwrap(),
            epsilon = 1e-14
        );
        let mut nats = EntropyTable::with_base(&s, LogBase::Nats);
        assert_abs_diff_eq!(nats.h(&["R", "B"]).unwrap(), 3f64.ln(), epsilon = 1e-12);
    }
}
