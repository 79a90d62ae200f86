//! Acceptance criteria, one PASS/FAIL line each.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use qsi_exchange::bounds::{attach_ghz, lower_bounds, upper_bounds, weak_lower_bounds, GHZ_TARGETS};
use qsi_exchange::channelopt::{converse_value, optimize_converse, ChannelSpec};
use qsi_exchange::conditions::{check_conditions, Certificate};
use qsi_exchange::entropics::{
    cond_entropy, entropy, fast_entropy, marginal_entropy, qcmi, reduce, CMatrix, DensityMatrix,
};
use qsi_exchange::statespec::{builtin, parse_state, Factor};
use qsi_exchange::verify::eq5_search_config;
use qsi_exchange::{LabeledPureState, ParamEnv, Role, SubsystemLayout};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    failures: Vec<String>,
    detail: String,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            failures: Vec::new(),
            detail: String::new(),
        }
    }

    fn require(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }
}

fn state(text: &str) -> LabeledPureState {
    parse_state(text, &ParamEnv::new()).expect("built-in state parses")
}

fn h2(p: f64) -> f64 {
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

fn u_min(s: &LabeledPureState) -> f64 {
    let (u1, u2) = upper_bounds(s).unwrap();
    u1.min(u2)
}

fn random_states(seed: u64, n: usize) -> Vec<LabeledPureState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| LabeledPureState::random(SubsystemLayout::five_qubits(), &mut rng))
        .collect()
}

fn names(roles: &[Role]) -> Vec<&'static str> {
    roles.iter().map(|r| r.name()).collect()
}

fn criterion_1() -> Outcome {
    let mut o = Outcome::new();
    let s = state(builtin::APPENDIX_C);
    let third = h2(1.0 / 3.0);
    let log3 = 3f64.log2();
    let small = h2((3.0 - 5f64.sqrt()) / 6.0);
    let expected: [(&[&str], f64); 8] = [
        (&["R", "A"], third),
        (&["A"], third),
        (&["B"], third),
        (&["R", "C_A", "B"], third),
        (&["C_B", "B"], log3),
        (&["R", "C_B", "B"], log3),
        (&["R", "B"], log3),
        (&["C_A", "B"], small),
    ];
    for (set, want) in expected {
        let got = marginal_entropy(&s, set).unwrap();
        o.require((got - want).abs() <= 1e-4, || format!("H({}) = {got}, want {want}", set.join("")));
    }
    for (want, quoted) in [(third, 0.918296), (log3, 1.58496), (small, 0.550048)] {
        o.require((want - quoted).abs() <= 1e-5, || format!("closed form {want} vs {quoted}"));
    }
    let q = [
        qcmi(&s, &["R"], &["C_A"], &["A"]).unwrap(),
        qcmi(&s, &["R"], &["C_A"], &["B"]).unwrap(),
        qcmi(&s, &["R"], &["C_B"], &["A"]).unwrap(),
        qcmi(&s, &["R"], &["C_B"], &["B"]).unwrap(),
    ];
    o.require(q[0] <= 1e-9, || format!("I(R;C_A|A) = {}", q[0]));
    for (i, &v) in q.iter().enumerate().skip(1) {
        o.require(v > 0.05, || format!("QCMI #{} = {v}", i + 1));
    }
    let report = check_conditions(&s, 1e-9).unwrap();
    let holding = report.holding();
    o.require(holding == vec![Certificate::Cor3i1], || format!("holding conditions {holding:?}"));
    o.detail = format!("QCMIs {q:.6?}");
    o
}

fn criterion_2() -> Outcome {
    let mut o = Outcome::new();
    let mut rows = Vec::new();
    for i in 0..=100 {
        let lambda = i as f64 / 100.0;
        let s = parse_state(builtin::EQ8, &ParamEnv::new().with("lambda", lambda).unwrap()).unwrap();
        rows.push((lambda, upper_bounds(&s).unwrap().0, lower_bounds(&s).unwrap().0));
    }
    let changes: Vec<(f64, f64)> = rows
        .windows(2)
        .filter(|w| (w[0].1 > 0.0) != (w[1].1 > 0.0))
        .map(|w| (w[0].0, w[1].0))
        .collect();
    o.require(changes.len() == 1, || format!("{} sign changes of u1", changes.len()));
    if let Some(&(a, b)) = changes.first() {
        o.require(a >= 0.60 && b <= 0.70, || format!("crossing bracket [{a}, {b}] outside (0.60, 0.70)"));
    }
    let (_, u1, l1) = *rows.last().unwrap();
    o.require((u1 + 1.0).abs() <= 1e-7, || format!("u1(1) = {u1}"));
    o.require((l1 + 1.0).abs() <= 1e-7, || format!("l1(1) = {l1}"));
    o.detail = format!("crossing in {changes:?}, u1(1) = {u1:.9}, l1(1) = {l1:.9}");
    o
}

fn criterion_3() -> Outcome {
    let mut o = Outcome::new();
    let mut worst = 0.0f64;
    for (k, phi) in random_states(301, 50).iter().enumerate() {
        for d in [2usize, 3] {
            let with = attach_ghz(phi, d, GHZ_TARGETS).unwrap();
            let diff = u_min(phi) - u_min(&with);
            let err = (diff + (d as f64).log2()).abs();
            worst = worst.max(err);
            o.require(err <= 1e-7, || format!("state {k}, d = {d}: difference {diff}"));
        }
    }
    o.detail = format!("min(u) φ minus min(u) φ⊗GHZ(d) vs −log₂ d, worst deviation {worst:.2e}");
    o
}

fn criterion_4() -> Outcome {
    let mut o = Outcome::new();
    let s = state(builtin::EQ5);
    let (l1, l2) = lower_bounds(&s).unwrap();
    o.require(l1.abs() <= 1e-9 && l2.abs() <= 1e-9, || format!("l1 = {l1}, l2 = {l2}"));
    let split = converse_value(&s, &ChannelSpec::split(&["R_A", "R_CA"])).unwrap();
    o.require((split - 2.0).abs() <= 1e-9, || format!("split value {split}"));
    let r = optimize_converse(&s, &eq5_search_config()).unwrap();
    let best = r.trace.continuous_best.unwrap_or(f64::NEG_INFINITY);
    o.require(best >= 1.95, || format!("continuous optimum {best}"));
    o.detail = format!("split {split:.12}, continuous best {best:.6} (seed {})", r.trace.seed);
    o
}

fn tripartitions() -> Vec<[Vec<Role>; 3]> {
    let mut out = Vec::new();
    for code in 0..243usize {
        let g: Vec<usize> = (0..5).map(|i| code / 3usize.pow(i) % 3).collect();
        // restricted growth strings give each set partition once
        let mut max = 0;
        let ok = g.iter().enumerate().all(|(i, &v)| {
            let fine = if i == 0 { v == 0 } else { v <= max + 1 };
            max = max.max(v);
            fine
        });
        if !ok || max != 2 {
            continue;
        }
        let mut parts: [Vec<Role>; 3] = Default::default();
        for (r, &v) in Role::ALL.iter().zip(&g) {
            parts[v].push(*r);
        }
        out.push(parts);
    }
    out
}

fn criterion_5() -> Outcome {
    let mut o = Outcome::new();
    let parts = tripartitions();
    o.require(parts.len() == 25, || format!("{} tripartitions", parts.len()));
    for (k, s) in random_states(501, 200).iter().enumerate() {
        let (u1, u2) = upper_bounds(s).unwrap();
        let (l1, l2) = lower_bounds(s).unwrap();
        let (l3, l4) = weak_lower_bounds(s).unwrap();
        o.require(u1.min(u2) >= l1.max(l2) - 1e-7, || format!("state {k}: sandwich"));
        o.require(l3 <= l1 + 1e-7, || format!("state {k}: l3 {l3} > l1 {l1}"));
        o.require(l4 <= l2 + 1e-7, || format!("state {k}: l4 {l4} > l2 {l2}"));
        let lx = lower_bounds(&s.exchanged()).unwrap().0;
        o.require((lx + l1).abs() <= 1e-9, || format!("state {k}: exchanged l1 {lx} vs {l1}"));
        for p in &parts {
            let (x, y, z) = (names(&p[0]), names(&p[1]), names(&p[2]));
            let q = qcmi(s, &x, &y, &z).unwrap();
            o.require(q >= -1e-7, || format!("state {k}: I({x:?};{y:?}|{z:?}) = {q}"));
            let dual = cond_entropy(s, &x, &y).unwrap() + cond_entropy(s, &x, &z).unwrap();
            o.require(dual.abs() <= 1e-7, || format!("state {k}: duality defect {dual}"));
        }
    }
    o.detail = "200 states, 25 tripartitions".into();
    o
}

fn criterion_6() -> Outcome {
    let mut o = Outcome::new();
    for (k, s) in random_states(601, 100).iter().enumerate() {
        let (l1, l2) = lower_bounds(s).unwrap();
        let none = converse_value(s, &ChannelSpec::split::<&str>(&[])).unwrap();
        let all = converse_value(s, &ChannelSpec::split(&["R"])).unwrap();
        o.require((none - l1).abs() <= 1e-9, || format!("state {k}: V = ∅ gives {none}, l1 = {l1}"));
        o.require((all - l2).abs() <= 1e-9, || format!("state {k}: V = R gives {all}, l2 = {l2}"));
    }
    o.detail = "100 states".into();
    o
}

/// Reduced density matrix by explicit index sums, then a nalgebra
/// eigendecomposition.
fn oracle_entropy(amps: &[Complex64], dims: &[usize], keep: &[bool]) -> f64 {
    let kd: usize = dims.iter().zip(keep).filter(|(_, &k)| k).map(|(d, _)| d).product();
    let mut rho = DMatrix::<Complex64>::zeros(kd, kd);
    let n = amps.len();
    let split = |idx: usize| {
        let (mut k, mut r, mut rem) = (0usize, 0usize, idx);
        let mut digits = vec![0usize; dims.len()];
        for f in (0..dims.len()).rev() {
            digits[f] = rem % dims[f];
            rem /= dims[f];
        }
        for f in 0..dims.len() {
            if keep[f] {
                k = k * dims[f] + digits[f];
            } else {
                r = r * dims[f] + digits[f];
            }
        }
        (k, r)
    };
    let parts: Vec<(usize, usize)> = (0..n).map(split).collect();
    for i in 0..n {
        for j in 0..n {
            if parts[i].1 == parts[j].1 {
                rho[(parts[i].0, parts[j].0)] += amps[i] * amps[j].conj();
            }
        }
    }
    SymmetricEigen::new(rho)
        .eigenvalues
        .iter()
        .filter(|&&v| v > 1e-15)
        .map(|&v| -v * v.log2())
        .sum()
}

/// Ordered factor dimensions (each at least 2, at least two factors) with
/// product at most `limit`.
fn factor_dims_up_to(limit: usize) -> Vec<Vec<usize>> {
    fn go(prod: usize, limit: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() >= 2 {
            out.push(cur.clone());
        }
        let mut d = 2;
        while prod * d <= limit {
            cur.push(d);
            go(prod * d, limit, cur, out);
            cur.pop();
            d += 1;
        }
    }
    let mut out = Vec::new();
    go(1, limit, &mut Vec::new(), &mut out);
    out
}

fn layout_for(dims: &[usize]) -> SubsystemLayout {
    let factors: Vec<Factor> = dims.iter().enumerate().map(|(i, &d)| Factor::new(format!("f{i}"), d)).collect();
    let order = [Role::CA, Role::CB, Role::A, Role::B, Role::R];
    let mut roles: Vec<(Role, Vec<String>)> = Vec::new();
    for (i, f) in factors.iter().enumerate() {
        let role = order[i % order.len()];
        match roles.iter_mut().find(|(r, _)| *r == role) {
            Some((_, labels)) => labels.push(f.label.clone()),
            None => roles.push((role, vec![f.label.clone()])),
        }
    }
    SubsystemLayout::new(factors, &roles).unwrap()
}

fn random_mixed(n: usize, rank: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let g: Vec<Complex64> = (0..n * rank)
        .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
        .collect();
    let mut data = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            data[i * n + j] = (0..rank).map(|k| g[i * rank + k] * g[j * rank + k].conj()).sum();
        }
    }
    let tr: f64 = (0..n).map(|i| data[i * n + i].re).sum();
    let mut sym = data.clone();
    for i in 0..n {
        for j in 0..n {
            sym[i * n + j] = (data[i * n + j] + data[j * n + i].conj()) / (2.0 * tr);
        }
    }
    CMatrix::from_row_major(n, sym)
}

fn criterion_7() -> Outcome {
    let mut o = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(701);
    let mut worst = 0.0f64;
    let mut count = 0usize;
    let layouts = factor_dims_up_to(16);
    for dims in &layouts {
        let s = LabeledPureState::random(layout_for(dims), &mut rng);
        let labels: Vec<String> = s.layout().factors().iter().map(|f| f.label.clone()).collect();
        for mask in 1..(1usize << labels.len()) {
            let keep: Vec<bool> = (0..labels.len()).map(|i| mask >> i & 1 == 1).collect();
            let set: Vec<&str> = labels.iter().zip(&keep).filter(|(_, &k)| k).map(|(l, _)| l.as_str()).collect();
            let want = oracle_entropy(s.amplitudes(), dims, &keep);
            let rho = reduce(&s, &set).unwrap();
            let paths = [
                ("gram", marginal_entropy(&s, &set).unwrap()),
                ("jacobi", entropy(&rho).unwrap()),
                ("tridiagonal", fast_entropy(rho.matrix()).unwrap()),
            ];
            for (path, got) in paths {
                let err = (got - want).abs();
                worst = worst.max(err);
                o.require(err <= 1e-8, || format!("dims {dims:?} keep {set:?} {path}: {got} vs {want}"));
            }
            count += 1;
        }
    }
    for n in 2..=16 {
        for rank in 1..=n {
            let m = random_mixed(n, rank, &mut rng);
            let want: f64 = SymmetricEigen::new(DMatrix::from_row_slice(n, n, m.as_slice()))
                .eigenvalues
                .iter()
                .filter(|&&v| v > 1e-15)
                .map(|&v| -v * v.log2())
                .sum();
            let rho = DensityMatrix::new(vec![Factor::new("X", n)], m.clone()).unwrap();
            for (path, got) in [("jacobi", entropy(&rho).unwrap()), ("tridiagonal", fast_entropy(&m).unwrap())] {
                let err = (got - want).abs();
                worst = worst.max(err);
                o.require(err <= 1e-8, || format!("mixed n = {n} rank {rank} {path}: {got} vs {want}"));
            }
            count += 1;
        }
    }
    o.detail = format!("{} pure layouts and dims 2..=16 mixed, {count} cases, worst deviation {worst:.2e}", layouts.len());
    o
}

fn criterion_8() -> Outcome {
    let mut o = Outcome::new();
    let bin = env!("CARGO_BIN_EXE_qsx");
    let mut codes = Vec::new();
    for (fault, want) in [(None, 0), (Some("natural-log"), 3), (Some("role-order"), 3)] {
        let mut cmd = Command::new(bin);
        cmd.arg("verify-paper");
        if let Some(f) = fault {
            cmd.args(["--fault", f]);
        }
        let out = cmd.output().expect("qsx runs");
        let code = out.status.code().unwrap_or(-1);
        codes.push(code);
        o.require(code == want, || format!("fault {fault:?}: exit {code}, want {want}"));
        if fault.is_none() {
            let text = String::from_utf8_lossy(&out.stdout);
            let passes = text.lines().filter(|l| l.starts_with("PASS")).count();
            o.require(passes == 6, || format!("{passes} passing checks in clean run"));
        }
    }
    o.detail = format!("exit codes clean/natural-log/role-order = {codes:?}");
    o
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, Option<Duration>); 8] = [
        ("reference-state regression", criterion_1, Some(Duration::from_secs(1))),
        ("lambda sweep of u1", criterion_2, Some(Duration::from_secs(5))),
        ("GHZ gap identity", criterion_3, None),
        ("converse gap on four Bell pairs", criterion_4, Some(Duration::from_secs(60))),
        ("sandwich and antisymmetry properties", criterion_5, Some(Duration::from_secs(30))),
        ("trivial-split consistency", criterion_6, None),
        ("oracle entropy equivalence", criterion_7, None),
        ("verify-paper exit codes", criterion_8, None),
    ];
    let mut all = true;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let mut o = run();
        let elapsed = t.elapsed();
        if let Some(limit) = limit {
            if elapsed >= *limit {
                o.failures.push(format!("runtime {elapsed:?} exceeds {limit:?}"));
            }
        }
        let pass = o.failures.is_empty();
        all &= pass;
        println!(
            "{} criterion {}: {name} ({:.2} s) {}",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            elapsed.as_secs_f64(),
            o.detail
        );
        for f in o.failures.iter().take(10) {
            println!("    {f}");
        }
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
