//! Built-in reproduction checks over the shipped states.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bounds::{ghz_gap_check_with_targets, lower_bounds, upper_bounds, weak_lower_bounds, GHZ_TARGETS};
use crate::channelopt::{converse_value, optimize_converse, ChannelSpec, ConverseConfig};
use crate::conditions::{check_conditions, DEFAULT_TOL};
use crate::entropics::{EntropyTable, LogBase};
use crate::error::Result;
use crate::statespec::{builtin, parse_state, LabeledPureState, ParamEnv, Role, SubsystemLayout};

/// Deliberate faults used to confirm that the checks can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Fault {
    /// Reference entropies evaluated in nats.
    NaturalLog,
    /// GHZ factors attached to A, C_B, R.
    RoleOrder,
}

impl Fault {
    pub fn from_name(name: &str) -> Option<Fault> {
        match name {
            "natural-log" => Some(Fault::NaturalLog),
            "role-order" => Some(Fault::RoleOrder),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct VerifyOptions {
    pub fault: Option<Fault>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub seconds: f64,
    /// Individual sub-checks that failed.
    pub failures: Vec<String>,
    pub detail: String,
}

/// Collects sub-check outcomes for one criterion.
struct Check {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Check {
    fn new() -> Self {
        Check {
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn ensure(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn close(&mut self, what: &str, got: f64, want: f64, tol: f64) {
        let ok = (got - want).abs() <= tol;
        self.notes.push(format!("{what} = {got:.9}"));
        self.ensure(ok, format!("{what} = {got} (expected {want} ± {tol:e})"));
    }

    fn finish(self, id: usize, name: &'static str, started: Instant) -> CheckResult {
        CheckResult {
            id,
            name,
            passed: self.failures.is_empty(),
            seconds: started.elapsed().as_secs_f64(),
            failures: self.failures,
            detail: self.notes.join("; "),
        }
    }
}

/// Seeds of the random-state suites.
pub const GHZ_SEED: u64 = 3;
pub const PROPERTY_SEED: u64 = 5;
pub const SPLIT_SEED: u64 = 6;
pub const CONVERSE_SEED: u64 = 7;

/// Settings of the continuous converse search on the four-Bell-pair state.
pub fn eq5_search_config() -> ConverseConfig {
    ConverseConfig {
        dim_v: Some(4),
        dim_e: Some(4),
        restarts: 8,
        max_iters: 60,
        step_tol: 1e-7,
        seed: CONVERSE_SEED,
        splits_only: false,
    }
}

pub fn run_paper_suite(opts: &VerifyOptions) -> Result<Vec<CheckResult>> {
    Ok(vec![
        appendix_c_regression(opts)?,
        lambda_sweep()?,
        ghz_identity(opts)?,
        converse_gap()?,
        property_suite()?,
        trivial_splits()?,
    ])
}

fn appendix_c_regression(opts: &VerifyOptions) -> Result<CheckResult> {
    let started = Instant::now();
    let s = parse_state(builtin::APPENDIX_C, &ParamEnv::new())?;
    let base = match opts.fault {
        Some(Fault::NaturalLog) => LogBase::Nats,
        _ => LogBase::Bits,
    };
    let mut t = EntropyTable::with_base(&s, base);
    let mut c = Check::new();
    let h1 = 0.918296;
    let h2 = 1.58496;
    for set in [&["R", "A"][..], &["A"], &["B"], &["R", "C_A", "B"]] {
        c.close(&format!("H({})", set.join("")), t.h(set)?, h1, 1e-4);
    }
    for set in [&["C_B", "B"][..], &["R", "C_B", "B"], &["R", "B"]] {
        c.close(&format!("H({})", set.join("")), t.h(set)?, h2, 1e-4);
    }
    c.close("H(C_AB)", t.h(&["C_A", "B"])?, 0.550048, 1e-4);

    let r = check_conditions(&s, DEFAULT_TOL)?;
    let q: Vec<f64> = r.conditions.iter().map(|x| x.qcmi).collect();
    c.ensure(q[0] <= 1e-9, format!("I(R;C_A|A) = {:e} exceeds 1e-9", q[0]));
    for (k, v) in r.conditions.iter().zip(&q).skip(1) {
        c.ensure(*v > 0.05, format!("I({}) = {v} not above 0.05", k.key));
    }
    let holding = r.conditions.iter().filter(|x| x.holds).count();
    c.ensure(holding == 1, format!("{holding} conditions hold, expected exactly one"));
    c.notes.push(format!("QCMIs {q:.6?}"));
    Ok(c.finish(1, "reference-state entropies and condition membership", started))
}

/// u1 and l1 of the λ-family at every grid point.
pub fn lambda_grid(points: usize) -> Result<Vec<(f64, f64, f64)>> {
    (0..points)
        .map(|i| {
            let lambda = i as f64 / (points - 1) as f64;
            let s = parse_state(builtin::EQ8, &ParamEnv::new().with("lambda", lambda)?)?;
            let (u1, _) = upper_bounds(&s)?;
            let (l1, _) = lower_bounds(&s)?;
            Ok((lambda, u1, l1))
        })
        .collect()
}

fn lambda_sweep() -> Result<CheckResult> {
    let started = Instant::now();
    let grid = lambda_grid(101)?;
    let mut c = Check::new();
    let crossings: Vec<f64> = grid
        .windows(2)
        .filter(|w| (w[0].1 > 0.0) != (w[1].1 > 0.0))
        .map(|w| 0.5 * (w[0].0 + w[1].0))
        .collect();
    c.ensure(crossings.len() == 1, format!("u1 changes sign {} times", crossings.len()));
    if let Some(&x) = crossings.first() {
        c.ensure(x > 0.60 && x < 0.70, format!("u1 sign change near {x} outside (0.60, 0.70)"));
        c.notes.push(format!("u1 sign change near λ = {x:.3}"));
    }
    let &(_, u1, l1) = grid.last().expect("nonempty grid");
    c.close("u1(λ=1)", u1, -1.0, 1e-7);
    c.close("l1(λ=1)", l1, -1.0, 1e-7);
    Ok(c.finish(2, "λ-family sweep of u1", started))
}

fn ghz_identity(opts: &VerifyOptions) -> Result<CheckResult> {
    let started = Instant::now();
    let targets = match opts.fault {
        Some(Fault::RoleOrder) => [Role::A, Role::CB, Role::R],
        _ => GHZ_TARGETS,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(GHZ_SEED);
    let mut c = Check::new();
    let mut worst: f64 = 0.0;
    for d in [2usize, 3] {
        for k in 0..50 {
            let phi = LabeledPureState::random(SubsystemLayout::five_qubits(), &mut rng);
            let g = ghz_gap_check_with_targets(&phi, d, targets)?;
            // min(u) of φ minus min(u) of φ ⊗ GHZ(d)
            let diff = g.lhs - (g.rhs + (d as f64).log2());
            let err = (diff + (d as f64).log2()).abs();
            worst = worst.max(err);
            c.ensure(err <= 1e-7, format!("d={d}, state {k}: difference {diff}"));
        }
    }
    c.notes.push(format!("worst deviation {worst:e}"));
    Ok(c.finish(3, "GHZ block shifts min(u1,u2) by log d", started))
}

fn converse_gap() -> Result<CheckResult> {
    let started = Instant::now();
    let s = parse_state(builtin::EQ5, &ParamEnv::new())?;
    let mut c = Check::new();
    let (l1, l2) = lower_bounds(&s)?;
    c.close("l1", l1, 0.0, 1e-9);
    c.close("l2", l2, 0.0, 1e-9);
    let split = converse_value(&s, &ChannelSpec::split(&["R_A", "R_CA"]))?;
    c.close("split converse", split, 2.0, 1e-9);
    let r = optimize_converse(&s, &eq5_search_config())?;
    let best = r.trace.continuous_best.unwrap_or(f64::NEG_INFINITY);
    c.notes.push(format!("continuous search {best:.6}"));
    c.ensure(best >= 1.95, format!("continuous search reached {best}, below 1.95"));
    Ok(c.finish(4, "converse gap on four Bell pairs", started))
}

/// Ways of splitting the five roles into three nonempty groups.
fn tripartitions() -> Vec<[Vec<Role>; 3]> {
    let mut out = Vec::new();
    // assign each role a group label, keep canonical labelings only
    for code in 0..3usize.pow(5) {
        let mut g = [0usize; 5];
        let mut x = code;
        for slot in &mut g {
            *slot = x % 3;
            x /= 3;
        }
        let mut next = 0;
        let mut canonical = true;
        for &v in &g {
            if v > next {
                canonical = false;
                break;
            }
            if v == next {
                next += 1;
            }
        }
        if !canonical || next != 3 {
            continue;
        }
        let mut parts: [Vec<Role>; 3] = Default::default();
        for (role, &v) in Role::ALL.iter().zip(&g) {
            parts[v].push(*role);
        }
        out.push(parts);
    }
    out
}

fn names(roles: &[Role]) -> Vec<&'static str> {
    roles.iter().map(|r| r.name()).collect()
}

fn property_suite() -> Result<CheckResult> {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(PROPERTY_SEED);
    let mut c = Check::new();
    let parts = tripartitions();
    for k in 0..200 {
        let s = LabeledPureState::random(SubsystemLayout::five_qubits(), &mut rng);
        let (u1, u2) = upper_bounds(&s)?;
        let (l1, l2) = lower_bounds(&s)?;
        let (l3, l4) = weak_lower_bounds(&s)?;
        c.ensure(u1.min(u2) >= l1.max(l2) - 1e-7, format!("state {k}: sandwich"));
        c.ensure(l3 <= l1 + 1e-7, format!("state {k}: l3 > l1"));
        c.ensure(l4 <= l2 + 1e-7, format!("state {k}: l4 > l2"));
        let x = s.exchanged();
        let (xl1, xl2) = lower_bounds(&x)?;
        let mirrored = x.with_roles_swapped(Role::A, Role::B);
        let (mu1, mu2) = upper_bounds(&mirrored)?;
        c.ensure((xl1 + l1).abs() <= 1e-9, format!("state {k}: l1 antisymmetry"));
        c.ensure((xl2 + l2).abs() <= 1e-9, format!("state {k}: l2 antisymmetry"));
        c.ensure((mu1 - u2).abs() <= 1e-9 && (mu2 - u1).abs() <= 1e-9, format!("state {k}: u1, u2 mirror"));
        let mut t = EntropyTable::new(&s);
        for [x, y, z] in &parts {
            let (x, y, z) = (names(x), names(y), names(z));
            let q = t.qcmi(&x, &y, &z)?;
            c.ensure(q >= -1e-7, format!("state {k}: I({x:?};{y:?}|{z:?}) = {q}"));
            // H(X|Y) = −H(X|Z) when XYZ is pure
            let d = t.cond(&x, &y)? + t.cond(&x, &z)?;
            c.ensure(d.abs() <= 1e-7, format!("state {k}: duality {x:?}|{y:?} off by {d}"));
        }
    }
    c.notes.push(format!("200 states, {} tripartitions", parts.len()));
    Ok(c.finish(5, "sandwich, antisymmetry and entropy inequalities", started))
}

fn trivial_splits() -> Result<CheckResult> {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SPLIT_SEED);
    let mut c = Check::new();
    for k in 0..100 {
        let s = LabeledPureState::random(SubsystemLayout::five_qubits(), &mut rng);
        let (l1, l2) = lower_bounds(&s)?;
        let none = converse_value(&s, &ChannelSpec::split::<&str>(&[]))?;
        let all = converse_value(&s, &ChannelSpec::split(&["R"]))?;
        c.ensure((none - l1).abs() <= 1e-9, format!("state {k}: empty split {none} vs l1 {l1}"));
        c.ensure((all - l2).abs() <= 1e-9, format!("state {k}: full split {all} vs l2 {l2}"));
    }
    Ok(c.finish(6, "trivial splits reproduce l1 and l2", started))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tripartition_count() {
        // Stirling number S(5, 3)
        assert_eq!(tripartitions().len(), 25);
    }

    #[test]
    fn faults_break_their_checks() {
        let nat = VerifyOptions {
            fault: Some(Fault::NaturalLog),
        };
        assert!(!appendix_c_regression(&nat).unwrap().passed);
        assert!(appendix_c_regression(&VerifyOptions::default()).unwrap().passed);
        let role = VerifyOptions {
            fault: Some(Fault::RoleOrder),
        };
        assert!(!ghz_identity(&role).unwrap().passed);
        assert!(ghz_identity(&VerifyOptions::default()).unwrap().passed);
    }

    #[test]
    fn fast_checks_pass() {
        let clean = VerifyOptions::default();
        for r in [
            appendix_c_regression(&clean).unwrap(),
            lambda_sweep().unwrap(),
            ghz_identity(&clean).unwrap(),
            property_suite().unwrap(),
            trivial_splits().unwrap(),
        ] {
            assert!(r.passed, "{r:?}");
        }
    }

    #[test]
    fn fault_names() {
        assert_eq!(Fault::from_name("natural-log"), Some(Fault::NaturalLog));
        assert_eq!(Fault::from_name("role-order"), Some(Fault::RoleOrder));
        assert_eq!(Fault::from_name("other"), None);
    }
}
