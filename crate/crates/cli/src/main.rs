use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use qtorus_cli::{render, resolve_dimension, ColorMap, RenderSpec};
use qtorus_core::evolution::{apply_classical_map, classicality_check, evolve_state, z_matrix};
use qtorus_core::grover::{default_steps, run_grover, GroverConfig};
use qtorus_core::lines::{line_points, line_projector, line_sum, LineSpec};
use qtorus_core::ops::{fourier, phase_point_relations_check};
use qtorus_core::random::{
    random_density_matrix, random_pure_state, random_unitary, rng_from_seed, GENERATOR_ID,
};
use qtorus_core::tomography::{measure_wigner_point, scattering_circuit, wigner_tomography};
use qtorus_core::triangle::{purity_residual, TRIANGLE_MAX_DIM};
use qtorus_core::wigner::{inner_product, marginal, state_from_wigner, MarginalFamily};
use qtorus_core::{
    make_state, wigner_of, ClassicalMap, Dimension, Error, MapSpec, StateSpec, WignerGrid, MAX_DIM,
};

#[derive(Parser)]
#[command(
    name = "qtorus",
    version,
    about = "Discrete Wigner functions on the 2N x 2N torus"
)]
struct Cli {
    /// Worker threads (default: WIGNER_THREADS, else all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
#[group(required = true, multiple = false)]
struct DimArgs {
    /// Hilbert-space dimension (even, 2..=256)
    #[arg(long, value_parser = parse_n)]
    n: Option<usize>,
    /// Number of qubits; N = 2^L
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=8))]
    qubits: Option<u32>,
}

impl DimArgs {
    fn dim(&self) -> qtorus_core::Result<Dimension> {
        resolve_dimension(self.n, self.qubits)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Wigner function of a state, as CSV
    Wigner {
        #[command(flatten)]
        dim: DimArgs,
        /// pos:q | mom:k | super:q0,q1,phi | mixed | gauss:q0,p0,s | raw:@file
        #[arg(long, value_parser = parse_state)]
        state: StateSpec,
        /// Output CSV (default: stdout)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Propagate a state under a map and compare with its classical relabeling
    Evolve {
        #[command(flatten)]
        dim: DimArgs,
        #[arg(long, value_parser = parse_state)]
        state: StateSpec,
        /// trans:q,p | refl:q,p | ft | cat:a,b | perm:@file | halfft | shift:a
        #[arg(long, value_parser = parse_map)]
        map: MapSpec,
        #[arg(long, default_value_t = 1)]
        steps: usize,
        /// Propagate grids with the Z superoperator instead of conjugating rho
        #[arg(long)]
        via_z: bool,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Points, projector rank and line sum of n1 p - n2 q = n3 (mod 2N)
    Lines {
        #[command(flatten)]
        dim: DimArgs,
        #[arg(long, value_parser = parse_triple, allow_hyphen_values = true)]
        line: (i64, i64, i64),
        #[arg(long, value_parser = parse_state)]
        state: Option<StateSpec>,
        /// Write the line's points as CSV
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Grover iteration, one grid per step plus summary.csv
    Grover {
        #[command(flatten)]
        dim: DimArgs,
        #[arg(long)]
        marked: usize,
        #[arg(long, default_value_t = 0)]
        momentum: usize,
        /// Default: round(pi sqrt(N) / 4)
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Measure one Wigner value with the scattering circuit
    Tomo {
        #[command(flatten)]
        dim: DimArgs,
        #[arg(long, value_parser = parse_state)]
        state: StateSpec,
        #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
        point: (i64, i64),
        #[arg(long, default_value_t = 0)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Measure the whole grid; writes grid.csv and meta.json
    TomoFull {
        #[command(flatten)]
        dim: DimArgs,
        #[arg(long, value_parser = parse_state)]
        state: StateSpec,
        #[arg(long, default_value_t = 0)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Render a grid CSV as a binary PGM
    Render {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "sign")]
        map: ColorMap,
        /// Fixed full-scale value (default: max |W|)
        #[arg(long)]
        scale: Option<f64>,
    },
    /// Z superoperator of a map, as sparse CSV
    Zmatrix {
        #[command(flatten)]
        dim: DimArgs,
        #[arg(long, value_parser = parse_map)]
        map: MapSpec,
        /// Report the share of nonzero entries in this row
        #[arg(long, value_parser = parse_pair, default_value = "0,0", allow_hyphen_values = true)]
        row: (i64, i64),
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Self-test of the library invariants at one dimension
    Check {
        #[command(flatten)]
        dim: DimArgs,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn parse_n(s: &str) -> Result<usize, String> {
    let n: usize = s.parse().map_err(|e| format!("{e}"))?;
    if n < 2 || n % 2 != 0 || n > MAX_DIM {
        return Err(format!("N must be even and in 2..={MAX_DIM}"));
    }
    Ok(n)
}

fn parse_state(s: &str) -> Result<StateSpec, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_map(s: &str) -> Result<MapSpec, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn ints(s: &str, k: usize) -> Result<Vec<i64>, String> {
    let v: Vec<i64> = s
        .split(',')
        .map(|x| x.trim().parse::<i64>().map_err(|e| format!("{x:?}: {e}")))
        .collect::<Result<_, _>>()?;
    if v.len() != k {
        return Err(format!("expected {k} comma-separated integers"));
    }
    Ok(v)
}

fn parse_pair(s: &str) -> Result<(i64, i64), String> {
    let v = ints(s, 2)?;
    Ok((v[0], v[1]))
}

fn parse_triple(s: &str) -> Result<(i64, i64, i64), String> {
    let v = ints(s, 3)?;
    Ok((v[0], v[1], v[2]))
}

fn write_grid(path: &Path, w: &WignerGrid) -> anyhow::Result<()> {
    fs::write(path, w.to_csv()).with_context(|| format!("writing {}", path.display()))
}

fn create_dir(dir: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

#[derive(Serialize)]
struct Meta<'a> {
    command: &'a str,
    seed: u64,
    shots: u64,
    generator: &'a str,
    version: &'a str,
}

fn threads(flag: Option<usize>) -> anyhow::Result<Option<usize>> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var("WIGNER_THREADS") {
        Ok(v) => Ok(Some(
            v.trim()
                .parse()
                .context("WIGNER_THREADS must be an integer")?,
        )),
        Err(_) => Ok(None),
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(t) = threads(cli.threads)? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()?;
    }
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Wigner {
            dim,
            state,
            out: path,
        } => {
            let w = wigner_of(&make_state(dim.dim()?, &state)?)?;
            match path {
                Some(p) => write_grid(&p, &w)?,
                None => out.write_all(w.to_csv().as_bytes())?,
            }
        }
        Command::Evolve {
            dim,
            state,
            map,
            steps,
            via_z,
            out_dir,
        } => {
            let d = dim.dim()?;
            let (u, classical) = map.build(d)?;
            let z = if via_z { Some(z_matrix(d, &u)?) } else { None };
            create_dir(&out_dir)?;
            let mut rho = make_state(d, &state)?;
            let mut w = wigner_of(&rho)?;
            write_grid(&out_dir.join("step_0000.csv"), &w)?;
            writeln!(out, "step,classical_deviation")?;
            for t in 1..=steps {
                let next = match &z {
                    Some(z) => z.apply(&w)?,
                    None => {
                        rho = evolve_state(&rho, &u)?;
                        wigner_of(&rho)?
                    }
                };
                let dev = match classical.as_ref().map(|m| apply_classical_map(&w, m)) {
                    Some(Ok(c)) => format!("{:.3e}", c.max_abs_diff(&next)),
                    Some(Err(Error::UndefinedInterference)) => "undefined".into(),
                    Some(Err(e)) => return Err(e.into()),
                    None => "none".into(),
                };
                writeln!(out, "{t},{dev}")?;
                w = next;
                write_grid(&out_dir.join(format!("step_{t:04}.csv")), &w)?;
            }
        }
        Command::Lines {
            dim,
            line,
            state,
            out: path,
        } => {
            let d = dim.dim()?;
            let l = LineSpec::new(d, line.0, line.1, line.2)?;
            let pts = line_points(d, &l);
            let proj = line_projector(d, &l)?;
            writeln!(out, "points {}", pts.len())?;
            writeln!(out, "dimension {}", proj.dimension)?;
            if let Some(spec) = state {
                let w = wigner_of(&make_state(d, &spec)?)?;
                writeln!(out, "sum {:.16e}", line_sum(&w, &l))?;
            }
            if let Some(p) = path {
                let mut csv = String::from("q,p\n");
                for a in &pts {
                    csv.push_str(&format!("{},{}\n", a.q, a.p));
                }
                fs::write(&p, csv).with_context(|| format!("writing {}", p.display()))?;
            }
        }
        Command::Grover {
            dim,
            marked,
            momentum,
            steps,
            out_dir,
        } => {
            let d = dim.dim()?;
            let cfg = GroverConfig::new(d, marked, momentum)?;
            let (floor, round) = default_steps(d);
            let steps = steps.unwrap_or(round);
            writeln!(
                out,
                "optimal steps: floor {floor}, round {round}; running {steps}"
            )?;
            create_dir(&out_dir)?;
            let mut summary = String::from("step,success_probability\n");
            for f in run_grover(&cfg, steps)? {
                write_grid(&out_dir.join(format!("step_{:03}.csv", f.step)), &f.wigner)?;
                summary.push_str(&format!("{},{:.16e}\n", f.step, f.success_probability));
                writeln!(out, "{} {:.10}", f.step, f.success_probability)?;
            }
            fs::write(out_dir.join("summary.csv"), summary)?;
        }
        Command::Tomo {
            dim,
            state,
            point,
            shots,
            seed,
        } => {
            let d = dim.dim()?;
            let rho = make_state(d, &state)?;
            let a = d.point(point.0, point.1);
            let (est, err) = measure_wigner_point(&rho, a, shots, seed)?;
            let exact = wigner_of(&rho)?.get(a);
            writeln!(out, "{est:.16e}, {err:.16e}, {exact:.16e}")?;
        }
        Command::TomoFull {
            dim,
            state,
            shots,
            seed,
            out_dir,
        } => {
            let d = dim.dim()?;
            let w = wigner_tomography(&make_state(d, &state)?, shots, seed)?;
            create_dir(&out_dir)?;
            write_grid(&out_dir.join("grid.csv"), &w)?;
            let meta = Meta {
                command: "tomo-full",
                seed,
                shots,
                generator: GENERATOR_ID,
                version: env!("CARGO_PKG_VERSION"),
            };
            let mut json = serde_json::to_string_pretty(&meta)?;
            json.push('\n');
            fs::write(out_dir.join("meta.json"), json)?;
        }
        Command::Render {
            input,
            out: path,
            map,
            scale,
        } => {
            let text =
                fs::File::open(&input).with_context(|| format!("reading {}", input.display()))?;
            let w = WignerGrid::read_csv(io::BufReader::new(text))?;
            let img = render(&w, &RenderSpec { map, scale })?;
            fs::write(&path, img).with_context(|| format!("writing {}", path.display()))?;
        }
        Command::Zmatrix {
            dim,
            map,
            row,
            out: path,
        } => {
            let d = dim.dim()?;
            let (u, _) = map.build(d)?;
            let z = z_matrix(d, &u)?;
            let a = d.point(row.0, row.1);
            writeln!(out, "row {} density {:.6}", a, z.row_density(a, 1e-6))?;
            if let Some(p) = path {
                let mut csv = String::from("aq,ap,bq,bp,z\n");
                for x in d.grid_2n() {
                    for (j, v) in z.row(x).iter().enumerate() {
                        if v.abs() > 1e-14 {
                            let b = d.grid_point(j);
                            csv.push_str(&format!("{},{},{},{},{:.16e}\n", x.q, x.p, b.q, b.p, v));
                        }
                    }
                }
                fs::write(&p, csv).with_context(|| format!("writing {}", p.display()))?;
            }
        }
        Command::Check { dim, seed } => {
            let d = dim.dim()?;
            let results = self_check(d, seed)?;
            let mut ok = true;
            for (name, pass) in &results {
                writeln!(out, "{} {name}", if *pass { "PASS" } else { "FAIL" })?;
                ok &= pass;
            }
            writeln!(out, "{}", if ok { "PASS" } else { "FAIL" })?;
            if !ok {
                bail!("invariant check failed");
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn self_check(d: Dimension, seed: u64) -> anyhow::Result<Vec<(&'static str, bool)>> {
    let mut rng = rng_from_seed(seed);
    let rho = random_density_matrix(d, &mut rng);
    let sigma = random_density_matrix(d, &mut rng);
    let w = wigner_of(&rho)?;
    let mut r = vec![("point operator relations", phase_point_relations_check(d))];
    r.push(("grid redundancy", w.redundancy_defect() < 1e-12));
    r.push((
        "reconstruction",
        state_from_wigner(&w)?.matrix().max_abs_diff(rho.matrix()) < 1e-10,
    ));
    r.push((
        "inner product",
        (inner_product(&w, &wigner_of(&sigma)?)? - rho.overlap(&sigma)).abs() < 1e-10,
    ));
    let pops = rho.populations();
    let m = marginal(&w, MarginalFamily::Position);
    r.push((
        "position marginal",
        pops.iter().zip(&m).all(|(a, b)| (a - b).abs() < 1e-10),
    ));
    let all_lines = (0..d.side() as i64)
        .all(|n3| line_projector(d, &LineSpec::new(d, 1, -1, n3).expect("valid line")).is_ok());
    r.push(("diagonal line projectors", all_lines));
    let dev = classicality_check(d, &fourier(d), &ClassicalMap::Rotation90, 3, seed)?;
    r.push(("fourier rotation", dev < 1e-10));
    if d.n() <= 16 {
        let u = random_unitary(d.n(), &mut rng);
        let z = z_matrix(d, &u)?;
        let direct = wigner_of(&evolve_state(&rho, &u)?)?;
        r.push(("z propagation", z.apply(&w)?.max_abs_diff(&direct) < 1e-9));
    }
    if d.n() <= TRIANGLE_MAX_DIM {
        let pure = random_pure_state(d, &mut rng);
        r.push((
            "purity constraint",
            purity_residual(&wigner_of(&pure)?)? < 1e-10,
        ));
    }
    let u = random_unitary(d.n(), &mut rng);
    let s = scattering_circuit(&rho, &u)?;
    r.push((
        "scattering circuit",
        (s.derived_value() - u.trace_product(rho.matrix())).norm() < 1e-12,
    ));
    Ok(r)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
