//! Converse values of referee channels and a heuristic search over them.
//!
//! A channel on R is represented by its Stinespring isometry W: R → V ⊗ E.
//! The objective H(A C_B V) − H(A C_A V) is evaluated on the global pure
//! state (1 ⊗ W)|ψ⟩.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::entropics::{fast_entropy, CMatrix, EntropyTable, IndexSplit};
use crate::error::{Error, Result};
use crate::statespec::{Factor, LabeledPureState, Role, SubsystemLayout};

/// Largest number of R factors for exhaustive split enumeration.
pub const MAX_SPLIT_FACTORS: usize = 12;
/// Tolerance on W†W = 1.
pub const ISOMETRY_TOL: f64 = 1e-8;
/// Agreement required between a certified cost and the converse value.
pub const CERT_EQ_TOL: f64 = 1e-6;

const V_LABEL: &str = "V";
const E_LABEL: &str = "E";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ChannelSpec {
    /// R factors in `v_labels` go to V, the rest to E.
    Split { v_labels: Vec<String> },
    /// Row-major (dim_v·dim_e) × dim_R isometry.
    Isometry {
        dim_v: usize,
        dim_e: usize,
        matrix: Vec<Complex64>,
    },
}

impl ChannelSpec {
    pub fn split<S: AsRef<str>>(labels: &[S]) -> Self {
        ChannelSpec::Split {
            v_labels: labels.iter().map(|s| s.as_ref().to_string()).collect(),
        }
    }

    /// Short human-readable description.
    pub fn summary(&self) -> String {
        match self {
            ChannelSpec::Split { v_labels } => format!("Split{{{}}}", v_labels.join(",")),
            ChannelSpec::Isometry { dim_v, dim_e, .. } => {
                format!("Isometry{{dim_v={dim_v},dim_e={dim_e}}}")
            }
        }
    }

    /// The isometry realizing a split: a permutation of R's basis into
    /// V ⊗ E with V the selected factors in role-list order.
    pub fn split_as_isometry(layout: &SubsystemLayout, v_labels: &[String]) -> Result<Self> {
        let r_idx = layout.role_indices(Role::R);
        let v_pos = split_positions(layout, v_labels)?;
        let dims: Vec<usize> = r_idx.iter().map(|&i| layout.factors()[i].dim).collect();
        let in_v: Vec<bool> = (0..r_idx.len()).map(|p| v_pos.contains(&p)).collect();
        let split = IndexSplit::new(&dims, &in_v);
        let d_r: usize = dims.iter().product();
        let (dim_v, dim_e) = (split.kept_dim, split.traced_dim);
        let mut matrix = vec![Complex64::new(0.0, 0.0); d_r * d_r];
        for r in 0..d_r {
            let out = split.kept[r] * dim_e + split.traced[r];
            matrix[out * d_r + r] = Complex64::new(1.0, 0.0);
        }
        Ok(ChannelSpec::Isometry {
            dim_v,
            dim_e,
            matrix,
        })
    }
}

/// Positions (within R's role list) of the split labels.
fn split_positions(layout: &SubsystemLayout, v_labels: &[String]) -> Result<Vec<usize>> {
    let r_labels = layout.role_labels(Role::R);
    let mut pos = Vec::with_capacity(v_labels.len());
    for l in v_labels {
        let p = r_labels
            .iter()
            .position(|r| r == l)
            .ok_or_else(|| Error::InvalidChannel(format!("`{l}` is not a factor of R")))?;
        if pos.contains(&p) {
            return Err(Error::InvalidChannel(format!("`{l}` listed twice")));
        }
        pos.push(p);
    }
    Ok(pos)
}

/// The global pure state after a channel, with the V and E label sets.
#[derive(Debug, Clone)]
pub struct PostChannel {
    pub state: LabeledPureState,
    pub v: Vec<String>,
    pub e: Vec<String>,
}

/// Builds the post-channel state. For a split the state is unchanged and
/// V, E partition R's labels; for an isometry R is replaced by fresh
/// factors V and E (omitted when of dimension 1) and R's role list
/// becomes [V, E].
pub fn post_channel_state(s: &LabeledPureState, c: &ChannelSpec) -> Result<PostChannel> {
    let layout = s.layout();
    match c {
        ChannelSpec::Split { v_labels } => {
            split_positions(layout, v_labels)?;
            let e = layout
                .role_labels(Role::R)
                .into_iter()
                .filter(|l| !v_labels.iter().any(|v| v == l))
                .map(String::from)
                .collect();
            Ok(PostChannel {
                state: s.clone(),
                v: v_labels.clone(),
                e,
            })
        }
        ChannelSpec::Isometry {
            dim_v,
            dim_e,
            matrix,
        } => {
            let (dim_v, dim_e) = (*dim_v, *dim_e);
            let d_r = layout.role_dim(Role::R);
            validate_isometry(dim_v, dim_e, d_r, matrix)?;
            let RestBlock { psi, rest, rest_dim } = rest_block(s);
            let dout = dim_v * dim_e;
            let mut amps = vec![Complex64::new(0.0, 0.0); rest_dim * dout];
            apply_columns(&psi, rest_dim, d_r, &to_columns(matrix, dout, d_r), dout, &mut amps);

            let mut factors: Vec<Factor> = rest.iter().map(|&i| layout.factors()[i].clone()).collect();
            let v_label = fresh(&factors, V_LABEL);
            let e_label = fresh(&factors, E_LABEL);
            let mut roles: Vec<(Role, Vec<String>)> = Role::ALL
                .into_iter()
                .filter(|&r| r != Role::R)
                .map(|r| (r, layout.role_labels(r).into_iter().map(String::from).collect()))
                .collect();
            let mut r_labels = Vec::new();
            let (mut v, mut e) = (Vec::new(), Vec::new());
            if dim_v > 1 {
                factors.push(Factor::new(v_label.clone(), dim_v));
                r_labels.push(v_label.clone());
                v.push(v_label);
            }
            if dim_e > 1 {
                factors.push(Factor::new(e_label.clone(), dim_e));
                r_labels.push(e_label.clone());
                e.push(e_label);
            }
            roles.push((Role::R, r_labels));
            let new_layout = SubsystemLayout::new(factors, &roles)?;
            Ok(PostChannel {
                state: LabeledPureState::new(new_layout, amps)?,
                v,
                e,
            })
        }
    }
}

fn fresh(factors: &[Factor], base: &str) -> String {
    let taken = |l: &str| factors.iter().any(|f| f.label == l);
    if !taken(base) {
        return base.to_string();
    }
    (1..)
        .map(|k| format!("{base}{k}"))
        .find(|l| !taken(l))
        .expect("unbounded search")
}

fn validate_isometry(dim_v: usize, dim_e: usize, d_r: usize, w: &[Complex64]) -> Result<()> {
    if dim_v == 0 || dim_e == 0 {
        return Err(Error::InvalidChannel("dim_v and dim_e must be positive".into()));
    }
    let dout = dim_v * dim_e;
    if dout < d_r {
        return Err(Error::InvalidChannel(format!(
            "dim_v·dim_e = {dout} is smaller than dim R = {d_r}"
        )));
    }
    if w.len() != dout * d_r {
        return Err(Error::InvalidChannel(format!(
            "matrix has {} entries, expected {dout}×{d_r}",
            w.len()
        )));
    }
    let mut worst: f64 = 0.0;
    for a in 0..d_r {
        for b in a..d_r {
            let g: Complex64 = (0..dout).map(|o| w[o * d_r + a].conj() * w[o * d_r + b]).sum();
            let target = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((g - target).norm());
        }
    }
    if worst > ISOMETRY_TOL {
        return Err(Error::InvalidChannel(format!(
            "W†W deviates from the identity by {worst:e}"
        )));
    }
    Ok(())
}

struct RestBlock {
    /// rest_dim × d_r, row-major.
    psi: Vec<Complex64>,
    /// Non-R factor indices in declared order.
    rest: Vec<usize>,
    rest_dim: usize,
}

fn rest_block(s: &LabeledPureState) -> RestBlock {
    let layout = s.layout();
    let dims = layout.dims();
    let keep: Vec<bool> = (0..dims.len()).map(|i| layout.role_of(i) != Role::R).collect();
    let rest: Vec<usize> = (0..dims.len()).filter(|&i| keep[i]).collect();
    // traced side is R in declared factor order; reorder to role-list order
    let r_idx = layout.role_indices(Role::R).to_vec();
    let mut perm_dims = Vec::with_capacity(dims.len());
    for &i in &rest {
        perm_dims.push(dims[i]);
    }
    for &i in &r_idx {
        perm_dims.push(dims[i]);
    }
    let perm: Vec<usize> = rest.iter().chain(&r_idx).copied().collect();
    let total = s.amplitudes().len();
    let mut psi = vec![Complex64::new(0.0, 0.0); total];
    let mut digits = vec![0usize; dims.len()];
    for (flat, a) in s.amplitudes().iter().enumerate() {
        crate::statespec::unflatten(flat, &dims, &mut digits);
        let mut idx = 0;
        for (k, &f) in perm.iter().enumerate() {
            idx = idx * perm_dims[k] + digits[f];
        }
        psi[idx] = *a;
    }
    let rest_dim = rest.iter().map(|&i| dims[i]).product();
    RestBlock { psi, rest, rest_dim }
}

/// out[x, :] = Σ_r psi[x, r] · W[:, r], with W stored column by column.
fn apply_columns(
    psi: &[Complex64],
    rest_dim: usize,
    d_r: usize,
    cols: &[Complex64],
    dout: usize,
    out: &mut [Complex64],
) {
    for x in 0..rest_dim {
        let row = &psi[x * d_r..(x + 1) * d_r];
        let dst = &mut out[x * dout..(x + 1) * dout];
        dst.fill(Complex64::new(0.0, 0.0));
        for (r, &a) in row.iter().enumerate() {
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (slot, w) in dst.iter_mut().zip(&cols[r * dout..(r + 1) * dout]) {
                *slot += a * w;
            }
        }
    }
}

fn to_columns(w: &[Complex64], dout: usize, d_r: usize) -> Vec<Complex64> {
    let mut cols = vec![Complex64::new(0.0, 0.0); dout * d_r];
    for o in 0..dout {
        for r in 0..d_r {
            cols[r * dout + o] = w[o * d_r + r];
        }
    }
    cols
}

/// H(A C_B V) − H(A C_A V) on the post-channel state, in bits.
pub fn converse_value(s: &LabeledPureState, c: &ChannelSpec) -> Result<f64> {
    let post = post_channel_state(s, c)?;
    let mut t = EntropyTable::new(&post.state);
    let v: Vec<&str> = post.v.iter().map(String::as_str).collect();
    let mut acb = vec!["A", "C_B"];
    acb.extend(&v);
    let mut aca = vec!["A", "C_A"];
    aca.extend(&v);
    Ok(t.h(&acb)? - t.h(&aca)?)
}

/// Real parameters to an isometry: entries 2k and 2k+1 are the real and
/// imaginary parts of row-major entry k, columns are then orthonormalized
/// by modified Gram-Schmidt. `None` when the columns are dependent.
pub fn isometry_from_params(theta: &[f64], dout: usize, d_r: usize) -> Option<Vec<Complex64>> {
    let mut cols = Vec::with_capacity(dout * d_r);
    if !isometry_columns(theta, dout, d_r, &mut cols) {
        return None;
    }
    let mut w = vec![Complex64::new(0.0, 0.0); dout * d_r];
    for r in 0..d_r {
        for o in 0..dout {
            w[o * d_r + r] = cols[r * dout + o];
        }
    }
    Some(w)
}

/// As [`isometry_from_params`], leaving column r in `cols[r·dout..]`.
fn isometry_columns(theta: &[f64], dout: usize, d_r: usize, cols: &mut Vec<Complex64>) -> bool {
    assert_eq!(theta.len(), 2 * dout * d_r);
    cols.clear();
    cols.resize(dout * d_r, Complex64::new(0.0, 0.0));
    for o in 0..dout {
        for r in 0..d_r {
            let k = 2 * (o * d_r + r);
            cols[r * dout + o] = Complex64::new(theta[k], theta[k + 1]);
        }
    }
    for c in 0..d_r {
        let (done, rest) = cols.split_at_mut(c * dout);
        let col = &mut rest[..dout];
        for p in 0..c {
            let prev = &done[p * dout..(p + 1) * dout];
            let dot: Complex64 = prev.iter().zip(col.iter()).map(|(a, b)| a.conj() * b).sum();
            for (x, a) in col.iter_mut().zip(prev) {
                *x -= a * dot;
            }
        }
        let n = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(n > 1e-12) {
            return false;
        }
        let inv = 1.0 / n;
        col.iter_mut().for_each(|z| *z *= inv);
    }
    true
}

/// Search settings for [`optimize_converse`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConverseConfig {
    /// Defaults to dim R.
    pub dim_v: Option<usize>,
    /// Defaults to dim R.
    pub dim_e: Option<usize>,
    pub restarts: usize,
    pub max_iters: usize,
    pub step_tol: f64,
    pub seed: u64,
    pub splits_only: bool,
}

impl Default for ConverseConfig {
    fn default() -> Self {
        ConverseConfig {
            dim_v: None,
            dim_e: None,
            restarts: 8,
            max_iters: 200,
            step_tol: 1e-7,
            seed: 0,
            splits_only: false,
        }
    }
}

/// Candidates this close to the best value count as tied.
pub const TIE_TOL: f64 = 1e-12;
/// Relative central-difference step.
pub const FD_STEP: f64 = 1e-4;
/// Window over which improvement below `step_tol` stops a restart.
pub const STALL_WINDOW: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Candidate {
    pub channel: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizerTrace {
    pub seed: u64,
    pub restarts: usize,
    pub dim_v: usize,
    pub dim_e: usize,
    /// Iterations run by each restart.
    pub iterations: Vec<usize>,
    /// Best value among isometry candidates, if any ran.
    pub continuous_best: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConverseResult {
    /// Best value found; a lower bound on the maximum over all channels.
    pub value: f64,
    pub best_channel: ChannelSpec,
    pub per_candidate: Vec<Candidate>,
    pub trace: OptimizerTrace,
    pub caveat: String,
}

/// Exhaustive split enumeration, then (unless `splits_only`) finite
/// difference ascent over isometries from seeded random starts.
pub fn optimize_converse(s: &LabeledPureState, cfg: &ConverseConfig) -> Result<ConverseResult> {
    let layout = s.layout();
    let r_labels: Vec<String> = layout.role_labels(Role::R).into_iter().map(String::from).collect();
    if r_labels.len() > MAX_SPLIT_FACTORS {
        return Err(Error::InvalidConfig(format!(
            "R has {} factors; split enumeration is limited to {MAX_SPLIT_FACTORS}",
            r_labels.len()
        )));
    }
    let d_r = layout.role_dim(Role::R);
    let dim_v = cfg.dim_v.unwrap_or(d_r);
    let dim_e = cfg.dim_e.unwrap_or(d_r);
    if dim_v == 0 || dim_e == 0 {
        return Err(Error::InvalidConfig("dim_v and dim_e must be positive".into()));
    }
    if !(cfg.step_tol >= 0.0) {
        return Err(Error::InvalidConfig("step_tol must be nonnegative".into()));
    }
    let continuous = !cfg.splits_only && cfg.restarts > 0;
    if continuous && dim_v * dim_e < d_r {
        return Err(Error::InvalidConfig(format!(
            "dim_v·dim_e = {} is smaller than dim R = {d_r}",
            dim_v * dim_e
        )));
    }

    let mut channels = Vec::new();
    let mut per_candidate = Vec::new();
    for mask in 0u32..(1u32 << r_labels.len()) {
        let v: Vec<String> = r_labels
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, l)| l.clone())
            .collect();
        let c = ChannelSpec::Split { v_labels: v };
        let value = converse_value(s, &c)?;
        per_candidate.push(Candidate {
            channel: c.summary(),
            value,
        });
        channels.push(c);
    }

    let mut iterations = Vec::new();
    let mut continuous_best: Option<f64> = None;
    if continuous {
        let mut obj = IsometryObjective::new(s, dim_v, dim_e);
        for restart in 0..cfg.restarts {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(restart as u64);
            let (theta, iters) = obj.ascend(&mut rng, cfg);
            iterations.push(iters);
            let w = isometry_from_params(&theta, dim_v * dim_e, d_r)
                .ok_or_else(|| Error::InvalidChannel("degenerate isometry".into()))?;
            let c = ChannelSpec::Isometry {
                dim_v,
                dim_e,
                matrix: w,
            };
            // re-evaluate on the residual-checked path
            let value = converse_value(s, &c)?;
            continuous_best = Some(continuous_best.map_or(value, |b: f64| b.max(value)));
            per_candidate.push(Candidate {
                channel: format!("{} restart {restart}", c.summary()),
                value,
            });
            channels.push(c);
        }
    }

    // first candidate in index order within TIE_TOL of the maximum
    let max = per_candidate.iter().map(|c| c.value).fold(f64::NEG_INFINITY, f64::max);
    let best = per_candidate
        .iter()
        .position(|c| c.value >= max - TIE_TOL)
        .expect("at least the empty split");
    Ok(ConverseResult {
        value: per_candidate[best].value,
        best_channel: channels.swap_remove(best),
        per_candidate,
        trace: OptimizerTrace {
            seed: cfg.seed,
            restarts: if continuous { cfg.restarts } else { 0 },
            dim_v,
            dim_e,
            iterations,
            continuous_best,
        },
        caveat: format!(
            "heuristic search (dim_v={dim_v}, dim_e={dim_e}); the value is a lower bound on \
             the maximum over all channels, not the maximum itself"
        ),
    })
}

/// Objective in the optimizer's inner loop: eigenvalues only, buffers
/// reused between evaluations.
struct IsometryObjective {
    psi: Vec<Complex64>,
    rest_dim: usize,
    d_r: usize,
    dout: usize,
    /// Splits for A C_B V and A C_A V over (rest factors, V, E).
    splits: [IndexSplit; 2],
    /// Columns of W, contiguous.
    w: Vec<Complex64>,
    post: Vec<Complex64>,
    block: Vec<Complex64>,
}

impl IsometryObjective {
    fn new(s: &LabeledPureState, dim_v: usize, dim_e: usize) -> Self {
        let layout = s.layout();
        let RestBlock { psi, rest, rest_dim } = rest_block(s);
        let mut dims: Vec<usize> = rest.iter().map(|&i| layout.factors()[i].dim).collect();
        dims.push(dim_v);
        dims.push(dim_e);
        let n = dims.len();
        let total: usize = dims.iter().product();
        let side = |roles: [Role; 2]| {
            let mut keep: Vec<bool> = rest.iter().map(|&i| roles.contains(&layout.role_of(i))).collect();
            keep.push(true);
            keep.push(false);
            let kept: usize = (0..n).filter(|&i| keep[i]).map(|i| dims[i]).product();
            if kept * kept > total {
                keep.iter_mut().for_each(|k| *k = !*k);
            }
            IndexSplit::new(&dims, &keep)
        };
        let splits = [side([Role::A, Role::CB]), side([Role::A, Role::CA])];
        IsometryObjective {
            psi,
            rest_dim,
            d_r: layout.role_dim(Role::R),
            dout: dim_v * dim_e,
            splits,
            w: Vec::new(),
            post: vec![Complex64::new(0.0, 0.0); total],
            block: Vec::new(),
        }
    }

    fn eval(&mut self, theta: &[f64]) -> f64 {
        if !isometry_columns(theta, self.dout, self.d_r, &mut self.w) {
            return f64::NEG_INFINITY;
        }
        apply_columns(&self.psi, self.rest_dim, self.d_r, &self.w, self.dout, &mut self.post);
        let mut h = [0.0; 2];
        for (k, split) in self.splits.iter().enumerate() {
            split.block(&self.post, &mut self.block);
            let m = CMatrix::gram_rows(&self.block, split.kept_dim, split.traced_dim);
            match fast_entropy(&m) {
                Ok(v) => h[k] = v,
                Err(_) => return f64::NEG_INFINITY,
            }
        }
        h[0] - h[1]
    }

    fn gradient(&mut self, theta: &mut [f64], g: &mut [f64]) {
        for i in 0..theta.len() {
            let x = theta[i];
            let h = FD_STEP * x.abs().max(1.0);
            theta[i] = x + h;
            let fp = self.eval(theta);
            theta[i] = x - h;
            let fm = self.eval(theta);
            theta[i] = x;
            g[i] = (fp - fm) / (2.0 * h);
            if !g[i].is_finite() {
                g[i] = 0.0;
            }
        }
    }

    /// One restart; returns the final parameters and iterations used.
    fn ascend(&mut self, rng: &mut ChaCha8Rng, cfg: &ConverseConfig) -> (Vec<f64>, usize) {
        let n = 2 * self.dout * self.d_r;
        let mut theta: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let mut f = self.eval(&theta);
        let mut g = vec![0.0; n];
        let mut trial = vec![0.0; n];
        let mut history = vec![f];
        let mut alpha = 1.0;
        let mut iters = 0;
        while iters < cfg.max_iters {
            iters += 1;
            self.gradient(&mut theta, &mut g);
            let gnorm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
            if gnorm == 0.0 {
                break;
            }
            let mut accepted = false;
            while alpha > 1e-12 {
                for ((t, x), d) in trial.iter_mut().zip(&theta).zip(&g) {
                    *t = x + alpha * d / gnorm;
                }
                let ft = self.eval(&trial);
                if ft > f {
                    std::mem::swap(&mut theta, &mut trial);
                    f = ft;
                    accepted = true;
                    alpha *= 2.0;
                    break;
                }
                alpha *= 0.5;
            }
            history.push(f);
            if !accepted {
                break;
            }
            if history.len() > STALL_WINDOW
                && f - history[history.len() - 1 - STALL_WINDOW] < cfg.step_tol
            {
                break;
            }
        }
        (theta, iters)
    }
}

/// QCMIs behind the two exactness conditions for a given channel.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cor3iiReport {
    pub certified_u1: bool,
    pub certified_u2: bool,
    /// I(C_B;V|A), I(C_A;E|AV), I(C_A;E|B), I(C_B;V|BE).
    pub qcmi_values: [f64; 4],
    pub converse: f64,
    /// The certified exact cost, when either condition holds.
    pub exact_cost: Option<f64>,
}

pub fn certify_cor3ii(s: &LabeledPureState, c: &ChannelSpec, tol: f64) -> Result<Cor3iiReport> {
    if !(tol >= 0.0) {
        return Err(Error::Precondition(format!("tolerance {tol} must be nonnegative")));
    }
    let converse = converse_value(s, c)?;
    let post = post_channel_state(s, c)?;
    let mut t = EntropyTable::new(&post.state);
    let v: Vec<&str> = post.v.iter().map(String::as_str).collect();
    let e: Vec<&str> = post.e.iter().map(String::as_str).collect();
    let with = |base: &[&'static str], extra: &[&str]| -> Vec<String> {
        base.iter().map(|s| s.to_string()).chain(extra.iter().map(|s| s.to_string())).collect()
    };
    let av = with(&["A"], &v);
    let be = with(&["B"], &e);
    let av: Vec<&str> = av.iter().map(String::as_str).collect();
    let be: Vec<&str> = be.iter().map(String::as_str).collect();
    let q = [
        t.qcmi(&["C_B"], &v, &["A"])?,
        t.qcmi(&["C_A"], &e, &av)?,
        t.qcmi(&["C_A"], &e, &["B"])?,
        t.qcmi(&["C_B"], &v, &be)?,
    ];
    let mut bounds = EntropyTable::new(s);
    let u1 = bounds.cond(&["C_B"], &["A"])? + bounds.cond(&["C_A"], &["B", "C_B"])?;
    let u2 = bounds.cond(&["C_A"], &["B"])? + bounds.cond(&["C_B"], &["A", "C_A"])?;
    let certified_u1 = q[0] <= tol && q[1] <= tol;
    let certified_u2 = q[2] <= tol && q[3] <= tol;
    let mut exact_cost = None;
    for (ok, u, name) in [(certified_u1, u1, "u1"), (certified_u2, u2, "u2")] {
        if !ok {
            continue;
        }
        if (u - converse).abs() > CERT_EQ_TOL {
            return Err(Error::CertificateInconsistency(format!(
                "{name} = {u} but the converse value is {converse}"
            )));
        }
        exact_cost.get_or_insert(u);
    }
    Ok(Cor3iiReport {
        certified_u1,
        certified_u2,
        qcmi_values: q,
        converse,
        exact_cost,
    })
}
