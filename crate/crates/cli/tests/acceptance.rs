//! Acceptance run: one PASS/FAIL line per criterion. Lines listed in
//! `KNOWN_UNATTAINABLE` are expected to fail; the process exits nonzero only
//! on an unexpected result in either direction.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};

use qtorus_core::evolution::{
    affine_form, apply_classical_map, boolean_gate, cat_matrix, cat_unitary, classicality_check,
    evolve_state, z_matrix, ClassicalMap, MapSpec,
};
use qtorus_core::grover::{run_grover, strip_concentration, GroverConfig};
use qtorus_core::lines::{line_projector, line_sum, LineSpec};
use qtorus_core::ops::*;
use qtorus_core::random::{
    random_density_matrix, random_pure_state, random_unitary, rng_from_seed,
};
use qtorus_core::states::momentum_populations;
use qtorus_core::tomography::{
    controlled, decompose_controlled_a, measure_wigner_point, scattering_circuit,
};
use qtorus_core::triangle::{gamma, purity_residual};
use qtorus_core::wigner::{inner_product, marginal, state_from_wigner, MarginalFamily};
use qtorus_core::{make_state, wigner_of, CMatrix, Complex64, DensityMatrix, StateSpec};
use rand::seq::SliceRandom;
use rand::Rng;

const KNOWN_UNATTAINABLE: &[&str] = &["8a", "9-literal"];

struct Outcome {
    id: &'static str,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn dim(n: usize) -> Dimension {
    Dimension::new(n).unwrap()
}

fn max(acc: &mut f64, v: f64) {
    *acc = acc.max(v);
}

fn operator_algebra() -> (bool, String) {
    let mut worst = 0.0f64;
    let mut rng = rng_from_seed(1001);
    for n in [2usize, 4, 8] {
        let d = dim(n);
        let (ni, s) = (n as i64, d.side() as i64);
        for q in 0..ni {
            for p in 0..ni {
                let lhs = shift_v(d, p).matmul(&shift_u(d, q));
                let rhs = shift_u(d, q)
                    .matmul(&shift_v(d, p))
                    .scale(d.root(2 * p * q));
                max(&mut worst, lhs.max_abs_diff(&rhs));
            }
        }
        for _ in 0..30 {
            let (q1, p1, q2, p2) = (
                rng.gen_range(0..s),
                rng.gen_range(0..s),
                rng.gen_range(0..s),
                rng.gen_range(0..s),
            );
            let lhs = translation(d, q1, p1).matmul(&translation(d, q2, p2));
            let rhs = translation(d, q1 + q2, p1 + p2).scale(d.root(p1 * q2 - q1 * p2));
            max(&mut worst, lhs.max_abs_diff(&rhs));
        }
        for (q, p) in [(1, 1), (1, 0), (2, 3)] {
            let t = translation(d, q, p);
            for lambda in 0..5 {
                max(
                    &mut worst,
                    translation(d, lambda * q, lambda * p).max_abs_diff(&t.pow(lambda)),
                );
            }
        }
        let f = fourier(d);
        max(&mut worst, f.matmul(&f).max_abs_diff(&reflection(d)));
        for a in d.grid_2n() {
            let m = phase_point_op(d, a);
            max(&mut worst, m.hermiticity_defect());
            let expect = if a.is_even() { 1.0 / n as f64 } else { 0.0 };
            max(&mut worst, (m.trace() - Complex64::new(expect, 0.0)).norm());
        }
        let ops: Vec<CMatrix> = d.grid_n().map(|a| phase_point_op(d, a)).collect();
        for (i, x) in ops.iter().enumerate() {
            for (j, y) in ops.iter().enumerate() {
                let expect = if i == j { 1.0 / (4 * n) as f64 } else { 0.0 };
                max(
                    &mut worst,
                    (x.trace_product(y) - Complex64::new(expect, 0.0)).norm(),
                );
            }
        }
        max(&mut worst, phase_point_relations_defect(d));
    }
    (
        worst < 1e-10,
        format!("max defect {worst:.2e} over N in {{2,4,8}}"),
    )
}

fn marginals() -> (bool, String) {
    let mut worst = 0.0f64;
    let mut min_sum = f64::INFINITY;
    let mut rng = rng_from_seed(1002);
    for n in [2usize, 4, 8] {
        let d = dim(n);
        let side = d.side() as i64;
        let mut lines = Vec::new();
        for n3 in 0..side {
            for (l, vertical) in [
                (LineSpec::vertical(d, n3), true),
                (LineSpec::horizontal(d, n3), false),
            ] {
                let p = line_projector(d, &l).unwrap().matrix;
                max(&mut worst, p.matmul(&p).max_abs_diff(&p));
                lines.push((l, p, vertical, n3));
            }
        }
        for _ in 0..200 {
            let rho = random_density_matrix(d, &mut rng);
            let w = wigner_of(&rho).unwrap();
            let pos = rho.populations();
            let mom = momentum_populations(&rho);
            for (l, p, vertical, n3) in &lines {
                let s = line_sum(&w, l);
                let t = p.trace_product(rho.matrix());
                max(&mut worst, t.im.abs());
                max(&mut worst, (t.re - s).abs());
                min_sum = min_sum.min(s);
                let expect = match (n3 % 2, vertical) {
                    (0, true) => pos[*n3 as usize / 2],
                    (0, false) => mom[*n3 as usize / 2],
                    _ => 0.0,
                };
                max(&mut worst, (s - expect).abs());
            }
        }
    }
    (
        worst < 1e-10 && min_sum >= -1e-10,
        format!("max defect {worst:.2e}, smallest line sum {min_sum:.2e}"),
    )
}

fn state_grids() -> (bool, String) {
    let d = dim(4);
    let mut worst = 0.0f64;
    let pos = wigner_of(&make_state(d, &StateSpec::Position(1)).unwrap()).unwrap();
    let mix = wigner_of(&DensityMatrix::mixed(d)).unwrap();
    for a in d.grid_2n() {
        let (q, p) = (a.q, a.p as i32);
        let e = match q {
            2 => 0.125,
            6 => 0.125 * (-1f64).powi(p),
            _ => 0.0,
        };
        max(&mut worst, (pos.get(a) - e).abs());
        let e = if a.is_even() { 1.0 / 16.0 } else { 0.0 };
        max(&mut worst, (mix.get(a) - e).abs());
    }
    let sup = wigner_of(
        &make_state(
            d,
            &StateSpec::Superposition {
                q0: 0,
                q1: 1,
                phi: 0.0,
            },
        )
        .unwrap(),
    )
    .unwrap();
    let w0 = wigner_of(&make_state(d, &StateSpec::Position(0)).unwrap()).unwrap();
    let w1 = pos;
    let delta = |q: i64, p: i64| 2.0 * sup.at(q, p) - w0.at(q, p) - w1.at(q, p);
    for p in 0..8 {
        max(
            &mut worst,
            (delta(1, p) - 0.25 * (PI * p as f64 / 4.0).cos()).abs(),
        );
        for q in [3, 7] {
            max(&mut worst, delta(q, p).abs());
        }
    }
    let strip5 = (0..8).any(|p| delta(5, p).abs() > 1e-3);
    (
        worst < 1e-12 && strip5,
        format!("max deviation {worst:.2e}, interference on q=5: {strip5}"),
    )
}

fn reconstruction() -> (bool, String) {
    let mut rng = rng_from_seed(1004);
    let mut round = 0.0f64;
    for n in [2usize, 4, 8] {
        for _ in 0..20 {
            let w = wigner_of(&random_density_matrix(dim(n), &mut rng)).unwrap();
            max(
                &mut round,
                wigner_of(&state_from_wigner(&w).unwrap())
                    .unwrap()
                    .max_abs_diff(&w),
            );
        }
    }
    let d = dim(8);
    let mut ip = 0.0f64;
    for _ in 0..100 {
        let a = random_density_matrix(d, &mut rng);
        let b = random_density_matrix(d, &mut rng);
        let v = inner_product(&wigner_of(&a).unwrap(), &wigner_of(&b).unwrap()).unwrap();
        max(&mut ip, (v - a.overlap(&b)).abs());
    }
    (
        round < 1e-10 && ip < 1e-10,
        format!("round trip {round:.2e}, inner product {ip:.2e}"),
    )
}

fn purity() -> (bool, String) {
    let mut rng = rng_from_seed(1005);
    let mut pure = 0.0f64;
    let mut mixed = f64::INFINITY;
    for n in [2usize, 4] {
        for _ in 0..20 {
            max(
                &mut pure,
                purity_residual(&wigner_of(&random_pure_state(dim(n), &mut rng)).unwrap()).unwrap(),
            );
        }
        mixed =
            mixed.min(purity_residual(&wigner_of(&DensityMatrix::mixed(dim(n))).unwrap()).unwrap());
    }
    (
        pure < 1e-10 && mixed > 0.01,
        format!("pure {pure:.2e}, mixed {mixed:.3}"),
    )
}

fn classical_propagation() -> (bool, String) {
    let d = dim(8);
    let mut simple = 0.0f64;
    for spec in ["trans:3,2", "trans:-1,5", "refl:0,0", "refl:3,1", "ft"] {
        let (u, m) = spec.parse::<MapSpec>().unwrap().build(d).unwrap();
        max(
            &mut simple,
            classicality_check(d, &u, &m.unwrap(), 10, 1006).unwrap(),
        );
    }
    let u = cat_unitary(d, 2, 1);
    let m = ClassicalMap::Linear(cat_matrix(2, 1));
    let mut rho = make_state(
        d,
        &StateSpec::Gaussian {
            q0: 3,
            p0: 1,
            s: 1.0,
        },
    )
    .unwrap();
    let mut w = wigner_of(&rho).unwrap();
    let mut cat = 0.0f64;
    for _ in 0..10 {
        rho = evolve_state(&rho, &u).unwrap();
        w = apply_classical_map(&w, &m).unwrap();
        max(&mut cat, wigner_of(&rho).unwrap().max_abs_diff(&w));
    }
    let d4 = dim(4);
    let u = cat_unitary(d4, 2, 1);
    let mm = cat_matrix(2, 1);
    let mut inter = 0.0f64;
    for a in d4.grid_2n() {
        let (q, p) = (a.q as i64, a.p as i64);
        let image = d4.point(mm[0][0] * q + mm[0][1] * p, mm[1][0] * q + mm[1][1] * p);
        let lhs = u.matmul(&phase_point_op(d4, a));
        let rhs = phase_point_op(d4, image).matmul(&u);
        max(&mut inter, lhs.max_abs_diff(&rhs));
    }
    (
        simple < 1e-10 && cat < 1e-9 && inter < 1e-10,
        format!("relabelings {simple:.2e}, cat 10 steps {cat:.2e}, intertwining {inter:.2e}"),
    )
}

fn boolean_gates() -> (bool, String) {
    let mut shifts = 0.0f64;
    for n in [4usize, 8] {
        let d = dim(n);
        for a in 0..n {
            let f: Vec<usize> = (0..n).map(|k| (k + a) % n).collect();
            let u = boolean_gate(d, &f, None).unwrap();
            max(
                &mut shifts,
                classicality_check(d, &u, &ClassicalMap::StripPermutation(f), 20, 1007).unwrap(),
            );
        }
    }
    let d = dim(8);
    let mut rng = rng_from_seed(1008);
    let mut weakest = f64::INFINITY;
    let mut tested = 0;
    while tested < 20 {
        let mut f: Vec<usize> = (0..8).collect();
        f.shuffle(&mut rng);
        if affine_form(&f).is_some() {
            continue;
        }
        let u = boolean_gate(d, &f, None).unwrap();
        weakest = weakest
            .min(classicality_check(d, &u, &ClassicalMap::StripPermutation(f), 5, 1009).unwrap());
        tested += 1;
    }
    (
        shifts < 1e-10 && weakest > 0.01,
        format!("shifts {shifts:.2e}, smallest non-affine deviation {weakest:.3}"),
    )
}

fn bit_flip(d: Dimension) -> CMatrix {
    let f: Vec<usize> = (0..d.n()).map(|k| k ^ 1).collect();
    boolean_gate(d, &f, None).unwrap()
}

fn z_literal_pattern() -> (bool, String) {
    let d = dim(4);
    let z = z_matrix(d, &bit_flip(d)).unwrap();
    let o = PhasePoint::ORIGIN;
    let mut worst = 0.0f64;
    for b in d.grid_2n() {
        let expect = if b.is_even() { 2.0 / 4.0 } else { 0.0 };
        max(&mut worst, (z.get(o, b) - expect).abs());
        max(&mut worst, (z.get(b, o) - expect).abs());
    }
    let support = d.grid_2n().filter(|&b| z.get(o, b).abs() > 1e-12).count();
    (worst < 1e-12, format!("max deviation {worst:.3} from 2/N on even points; actual row has {support} nonzero entries of magnitude 1/N"))
}

fn z_propagation() -> (bool, String) {
    let mut rng = rng_from_seed(1010);
    let mut worst = 0.0f64;
    for n in [2usize, 4] {
        let d = dim(n);
        for u in [
            fourier(d),
            cat_unitary(d, 2, 1),
            random_unitary(n, &mut rng),
            bit_flip(d),
        ] {
            let z = z_matrix(d, &u).unwrap();
            for _ in 0..5 {
                let rho = random_density_matrix(d, &mut rng);
                let direct = wigner_of(&evolve_state(&rho, &u).unwrap()).unwrap();
                max(
                    &mut worst,
                    z.apply(&wigner_of(&rho).unwrap())
                        .unwrap()
                        .max_abs_diff(&direct),
                );
            }
        }
    }
    (worst < 1e-9, format!("max deviation {worst:.2e}"))
}

fn gamma_invariance() -> (bool, String) {
    let d = dim(2);
    let pts: Vec<_> = d.grid_2n().collect();
    let s = pts.len();
    let mut g = vec![Complex64::new(0.0, 0.0); s * s * s];
    for (i, &a) in pts.iter().enumerate() {
        for (j, &b) in pts.iter().enumerate() {
            for (k, &c) in pts.iter().enumerate() {
                g[(i * s + j) * s + k] = gamma(d, a, b, c);
            }
        }
    }
    let mut rng = rng_from_seed(1011);
    let mut worst = 0.0f64;
    for u in [
        fourier(d),
        cat_unitary(d, 2, 1),
        random_unitary(2, &mut rng),
        random_unitary(2, &mut rng),
    ] {
        let z = z_matrix(d, &u).unwrap();
        let zz = z.entries();
        let mut t = g.clone();
        for axis in 0..3 {
            let mut next = vec![Complex64::new(0.0, 0.0); t.len()];
            for (idx, slot) in next.iter_mut().enumerate() {
                let (i, j, k) = (idx / (s * s), (idx / s) % s, idx % s);
                let row = [i, j, k][axis];
                for x in 0..s {
                    let src = match axis {
                        0 => (x * s + j) * s + k,
                        1 => (i * s + x) * s + k,
                        _ => (i * s + j) * s + x,
                    };
                    *slot += t[src] * zz[row * s + x];
                }
            }
            t = next;
        }
        max(
            &mut worst,
            t.iter()
                .zip(&g)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max),
        );
    }
    (worst < 1e-8, format!("max deviation {worst:.2e}"))
}

fn grover_frames() -> (GroverConfig, Vec<qtorus_core::GroverFrame>) {
    let cfg = GroverConfig::new(dim(32), 16, 1).unwrap();
    let frames = run_grover(&cfg, 5).unwrap();
    (cfg, frames)
}

fn grover() -> (bool, String) {
    let (cfg, frames) = grover_frames();
    let mut oracle = 0.0f64;
    let mut marg = 0.0f64;
    for f in &frames {
        max(
            &mut oracle,
            (f.success_probability - cfg.closed_form_success(f.step)).abs(),
        );
        max(
            &mut marg,
            (marginal(&f.wigner, MarginalFamily::Position)[16] - f.success_probability).abs(),
        );
    }
    let c0 = strip_concentration(&frames[0].wigner, 16);
    let c4 = strip_concentration(&frames[4].wigner, 16);
    (
        oracle < 1e-6 && marg < 1e-10 && c4 > c0,
        format!(
            "P(4) = {:.10}, P(5) = {:.10}; oracle {oracle:.2e}, marginal {marg:.2e}; strip share {c0:.3} -> {c4:.3}",
            frames[4].success_probability, frames[5].success_probability
        ),
    )
}

fn grover_literal() -> (bool, String) {
    let (_, frames) = grover_frames();
    let d4 = (frames[4].success_probability - 0.9992).abs();
    let d5 = (frames[5].success_probability - 0.8547).abs();
    (
        d4 < 1e-6 && d5 < 1e-6,
        format!("|P(4) - 0.9992| = {d4:.2e}, |P(5) - 0.8547| = {d5:.2e}"),
    )
}

fn tomography() -> (bool, String) {
    let mut rng = rng_from_seed(1012);
    let mut circuit = 0.0f64;
    for n in [2usize, 4, 8] {
        for _ in 0..100 {
            let rho = random_density_matrix(dim(n), &mut rng);
            let u = random_unitary(n, &mut rng);
            let r = scattering_circuit(&rho, &u).unwrap();
            max(
                &mut circuit,
                (r.sigma_z - u.trace_product(rho.matrix()).re).abs(),
            );
        }
    }
    let mut decomp = [0.0f64; 2];
    for (slot, n) in [(0, 2usize), (1, 4)] {
        let d = dim(n);
        for a in d.grid_2n() {
            let target = controlled(&scaled_phase_point_op(d, a));
            for expand in [false, true] {
                let g = decompose_controlled_a(d, a, expand).unwrap();
                max(&mut decomp[slot], g.compose().max_abs_diff(&target));
            }
        }
    }
    let d = dim(4);
    let mut worst_z = 0.0f64;
    let mut outside = 0;
    for k in 0..4 {
        let rho = make_state(d, &StateSpec::Position(k)).unwrap();
        for a in d.grid_n() {
            let seed = 1013 + (k as u64) * 64 + d.grid_index(a) as u64;
            let (exact, _) = measure_wigner_point(&rho, a, 0, 0).unwrap();
            let (est, err) = measure_wigner_point(&rho, a, 100_000, seed).unwrap();
            let diff = (est - exact).abs();
            if diff > 4.0 * err {
                outside += 1;
            }
            if err > 0.0 {
                max(&mut worst_z, diff / err);
            }
        }
    }
    (
        circuit < 1e-12 && decomp[0] < 1e-10 && decomp[1] < 1e-8 && outside == 0,
        format!(
            "circuit {circuit:.2e}; decomposition N=2 {:.2e}, N=4 {:.2e}; shots: {outside}/64 beyond 4 se, largest {worst_z:.2} se",
            decomp[0], decomp[1]
        ),
    )
}

fn run_cli(args: &[&str], cwd: &Path) -> bool {
    Command::new(env!("CARGO_BIN_EXE_qtorus"))
        .args(args)
        .current_dir(cwd)
        .env("WIGNER_THREADS", "2")
        .output()
        .map(|o| o.status.success())
        .unwrap_or(false)
}

fn determinism() -> (bool, String) {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    let mut same = true;
    let mut compared = 0;
    for run in ["a", "b"] {
        fs::create_dir_all(root.join(run)).unwrap();
        let cwd = root.join(run);
        same &= run_cli(
            &[
                "wigner",
                "--n",
                "8",
                "--state",
                "gauss:3,2,1.5",
                "--out",
                "w.csv",
            ],
            &cwd,
        );
        same &= run_cli(
            &[
                "render", "--in", "w.csv", "--out", "w.pgm", "--map", "linear",
            ],
            &cwd,
        );
        same &= run_cli(
            &[
                "tomo-full",
                "--n",
                "4",
                "--state",
                "super:0,3,0.7",
                "--shots",
                "5000",
                "--seed",
                "17",
                "--out-dir",
                "t",
            ],
            &cwd,
        );
        same &= run_cli(&["render", "--in", "t/grid.csv", "--out", "t.pgm"], &cwd);
    }
    for f in ["w.csv", "w.pgm", "t/grid.csv", "t/meta.json", "t.pgm"] {
        let a = fs::read(root.join("a").join(f));
        let b = fs::read(root.join("b").join(f));
        match (a, b) {
            (Ok(a), Ok(b)) if !a.is_empty() => {
                same &= a == b;
                compared += 1;
            }
            _ => same = false,
        }
    }
    (
        same,
        format!("{compared} files compared byte for byte across two runs"),
    )
}

fn main() -> ExitCode {
    type Check = fn() -> (bool, String);
    let checks: Vec<(&'static str, &'static str, Check)> = vec![
        ("1", "operator algebra", operator_algebra),
        ("2", "line sums and projectors", marginals),
        ("3", "state grids", state_grids),
        ("4", "reconstruction and inner product", reconstruction),
        ("5", "purity constraint", purity),
        ("6", "classical propagation", classical_propagation),
        ("7", "boolean gates", boolean_gates),
        (
            "8a",
            "bit-flip Z row, 2/N on even points",
            z_literal_pattern,
        ),
        ("8b", "Z propagation", z_propagation),
        (
            "8c",
            "Z preserves the three-point function",
            gamma_invariance,
        ),
        ("9", "Grover against closed form and marginal", grover),
        ("9-literal", "Grover at 0.9992 and 0.8547", grover_literal),
        ("10", "scattering circuit and tomography", tomography),
        ("11", "CLI determinism", determinism),
    ];
    let mut outcomes = Vec::new();
    for (id, name, f) in checks {
        let (pass, detail) = f();
        let o = Outcome {
            id,
            name,
            pass,
            detail,
        };
        let known = KNOWN_UNATTAINABLE.contains(&o.id);
        let tag = match (o.pass, known) {
            (true, false) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
            (true, true) => "PASS (unexpected)",
        };
        println!("{tag:<17} {:<10} {}: {}", o.id, o.name, o.detail);
        outcomes.push(o);
    }
    let unexpected: Vec<&str> = outcomes
        .iter()
        .filter(|o| o.pass == KNOWN_UNATTAINABLE.contains(&o.id))
        .map(|o| o.id)
        .collect();
    let passed = outcomes.iter().filter(|o| o.pass).count();
    println!(
        "{passed}/{} passed; unexpected: {unexpected:?}",
        outcomes.len()
    );
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
