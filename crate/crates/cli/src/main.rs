//! hyperdisk: bending energies of hyperbolic disks from the command line.
//!
//! Every run writes its tables and meshes into `--output-dir` together with a
//! `<command>_manifest.json`, and echoes the main table on stdout. Usage errors exit
//! with status 2, numerical failures with status 1 and a JSON error record on
//! stderr.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use hyperdisk::amsler::AmslerSurface;
use hyperdisk::geodesic::{EnergyEstimate, EnergyOptions, EnergyReport, GeodesicPolarGrid};
use hyperdisk::hyperboloid::{self, HyperboloidChart};
use hyperdisk::mesh::SurfaceMesh;
use hyperdisk::minimax::{grid_minimize, GridSolution, MinimaxOptions, MinimaxRow};
use hyperdisk::pseudosphere::{self, PseudosphereChart};
use hyperdisk::small_slopes::{self, PeriodicSaddle};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};

#[derive(Parser, Debug)]
#[command(name = "hyperdisk", version, about = "Isometric immersions of hyperbolic disks and their bending energy")]
struct Cli {
    /// Directory receiving CSV, OBJ and manifest files
    #[arg(long, global = true, default_value = "out")]
    output_dir: PathBuf,

    /// Seed for the multi-start minimizer
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Format of the summary printed on stdout
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Mesh files to write
    #[arg(long, global = true, value_enum, default_value_t = MeshFormat::Both)]
    mesh: MeshFormat,

    #[command(subcommand)]
    command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum MeshFormat {
    Obj,
    Csv,
    Both,
    None,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Calibration {
    /// b = √tanh(R/fill): the largest disk around the waist has radius R/fill
    MaxRadius,
    /// b = √cos(ε/2) with ε from the time of flight at λ = (R/fill)²
    TimeOfFlight,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Geodesic disk on the pseudosphere centred at (η0, 0)
    Pseudosphere {
        #[arg(long, value_parser = positive)]
        eta0: f64,
        #[arg(long, value_parser = non_negative)]
        radius: f64,
        #[command(flatten)]
        res: Resolution,
        /// Lattice spacing of the exported C-net patch
        #[arg(long, default_value_t = 1.0 / 128.0, value_parser = positive)]
        step: f64,
    },
    /// Geodesic disk around the waist of a hyperboloid of revolution
    Hyperboloid {
        #[arg(long, value_parser = non_negative)]
        radius: f64,
        /// Modulus b in (0, 1); calibrated from the radius when absent
        #[arg(long, value_parser = unit_open, conflicts_with_all = ["calibration", "fill"])]
        modulus: Option<f64>,
        #[arg(long, value_enum, default_value_t = Calibration::MaxRadius)]
        calibration: Calibration,
        /// Fraction of the calibrated maximal radius taken up by the disk
        #[arg(long, default_value_t = 0.95, value_parser = fraction)]
        fill: f64,
        #[command(flatten)]
        res: Resolution,
        #[arg(long, default_value_t = 1.0 / 128.0, value_parser = positive)]
        step: f64,
    },
    /// Geodesic disk on the periodic n-wave Amsler surface
    Amsler {
        #[arg(long, value_parser = wave_count)]
        n: usize,
        #[arg(long, value_parser = non_negative)]
        radius: f64,
        #[command(flatten)]
        res: Resolution,
        #[arg(long, default_value_t = 1.0 / 64.0, value_parser = positive)]
        step: f64,
    },
    /// Periodic n-wave saddle of the small-slopes approximation
    SmallSlopes {
        #[arg(long, value_parser = wave_count)]
        n: usize,
        #[arg(long, value_parser = positive)]
        radius: f64,
        /// Nodes per side of the exported height field
        #[arg(long, default_value_t = 129, value_parser = clap::value_parser!(u32).range(3..))]
        nodes: u32,
    },
    /// Discrete minimax problem for cot²φ over sine-Gordon solutions
    Minimax {
        #[arg(long, value_parser = non_negative)]
        lambda: f64,
        #[arg(long, value_parser = at_least_one)]
        p: f64,
        /// Grid nodes per side
        #[arg(long, value_parser = clap::value_parser!(u32).range(8..))]
        n: u32,
        /// Random starts besides the flat and travelling-wave starts
        #[arg(long, default_value_t = 2)]
        starts: usize,
    },
    /// Energy against radius for all four families on a shared radius ladder
    Sweep {
        /// Wave numbers; each sets the ladder through R_max(n) of the Amsler surface
        #[arg(long, value_delimiter = ',', default_value = "2,3,4,5", value_parser = wave_count)]
        n: Vec<usize>,
        /// Radii per ladder
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u32).range(1..))]
        points: u32,
        /// Largest ladder radius as a fraction of R_max(n)
        #[arg(long, default_value_t = 0.95, value_parser = fraction)]
        fill: f64,
        #[command(flatten)]
        res: Resolution,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Pseudosphere { .. } => "pseudosphere",
            Command::Hyperboloid { .. } => "hyperboloid",
            Command::Amsler { .. } => "amsler",
            Command::SmallSlopes { .. } => "small_slopes",
            Command::Minimax { .. } => "minimax",
            Command::Sweep { .. } => "sweep",
        }
    }
}

#[derive(clap::Args, Debug, Serialize, Clone, Copy)]
struct Resolution {
    /// Initial radial nodes of the energy quadrature
    #[arg(long, default_value_t = 32, value_parser = clap::value_parser!(u32).range(2..))]
    n_r: u32,
    /// Initial angular nodes of the energy quadrature
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u32).range(4..))]
    n_psi: u32,
}

impl Resolution {
    fn options(self) -> EnergyOptions {
        EnergyOptions::coarse(self.n_r as usize, self.n_psi as usize)
    }
}

fn parse_f64(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

fn positive(s: &str) -> Result<f64, String> {
    parse_f64(s).and_then(|x| if x > 0.0 { Ok(x) } else { Err("must be positive".into()) })
}

fn non_negative(s: &str) -> Result<f64, String> {
    parse_f64(s).and_then(|x| if x >= 0.0 { Ok(x) } else { Err("must be non-negative".into()) })
}

fn at_least_one(s: &str) -> Result<f64, String> {
    parse_f64(s).and_then(|x| if x >= 1.0 { Ok(x) } else { Err("must be at least 1".into()) })
}

fn unit_open(s: &str) -> Result<f64, String> {
    parse_f64(s).and_then(|x| if x > 0.0 && x < 1.0 { Ok(x) } else { Err("must lie in (0, 1)".into()) })
}

fn fraction(s: &str) -> Result<f64, String> {
    parse_f64(s).and_then(|x| if x > 0.0 && x <= 1.0 { Ok(x) } else { Err("must lie in (0, 1]".into()) })
}

fn wave_count(s: &str) -> Result<usize, String> {
    let n: usize = s.parse().map_err(|_| format!("`{s}` is not a whole number"))?;
    if n >= 2 {
        Ok(n)
    } else {
        Err("needs at least 2 waves".into())
    }
}

#[derive(Debug, thiserror::Error)]
enum Failure {
    #[error(transparent)]
    Numerical(#[from] hyperdisk::Error),
    #[error("{0}")]
    Io(#[from] io::Error),
}

impl Failure {
    fn kind(&self) -> &'static str {
        match self {
            Failure::Numerical(e) => e.kind(),
            Failure::Io(_) => "io",
        }
    }
}

/// Files written by a run plus the table echoed on stdout.
struct Run {
    dir: PathBuf,
    outputs: Vec<String>,
    header: String,
    rows: Vec<String>,
    extra: Map<String, Value>,
}

impl Run {
    fn new(dir: &Path) -> io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            outputs: Vec::new(),
            header: String::new(),
            rows: Vec::new(),
            extra: Map::new(),
        })
    }

    fn file(&mut self, name: &str) -> io::Result<BufWriter<File>> {
        self.outputs.push(name.to_string());
        Ok(BufWriter::new(File::create(self.dir.join(name))?))
    }

    fn mesh(&mut self, stem: &str, mesh: &SurfaceMesh, format: MeshFormat) -> io::Result<()> {
        if matches!(format, MeshFormat::Obj | MeshFormat::Both) {
            let mut w = self.file(&format!("{stem}.obj"))?;
            mesh.write_obj(&mut w)?;
            w.flush()?;
        }
        if matches!(format, MeshFormat::Csv | MeshFormat::Both) {
            let mut w = self.file(&format!("{stem}.csv"))?;
            mesh.write_csv(&mut w)?;
            w.flush()?;
        }
        Ok(())
    }

    fn grid(&mut self, name: &str, grid: &GeodesicPolarGrid) -> io::Result<()> {
        let mut w = self.file(name)?;
        grid.write_csv(&mut w)?;
        w.flush()
    }

    /// Write an energy table and echo it.
    fn energies(&mut self, name: &str, reports: &[EnergyReport]) -> io::Result<()> {
        let mut buf = Vec::new();
        for (k, r) in reports.iter().enumerate() {
            r.write_csv(&mut buf, k == 0)?;
        }
        self.table(name, buf)
    }

    fn table(&mut self, name: &str, csv: Vec<u8>) -> io::Result<()> {
        let mut w = self.file(name)?;
        w.write_all(&csv)?;
        w.flush()?;
        let text = String::from_utf8_lossy(&csv).into_owned();
        let mut lines = text.lines().map(str::to_string);
        self.header = lines.next().unwrap_or_default();
        self.rows = lines.collect();
        Ok(())
    }
}

fn energy_report(surface: &str, param: f64, est: EnergyEstimate) -> EnergyReport {
    EnergyReport { surface: surface.into(), param, rows: vec![est] }
}

fn lattice_nodes(len: f64, step: f64) -> usize {
    ((len / step).round() as usize + 1).clamp(2, 4097)
}

fn run_pseudosphere(
    run: &mut Run,
    cli: &Cli,
    eta0: f64,
    radius: f64,
    res: Resolution,
    step: f64,
) -> Result<(), Failure> {
    let est = pseudosphere::disk_energy(eta0, radius, &res.options())?;
    run.energies("pseudosphere_energy.csv", &[energy_report("pseudosphere", eta0, est)])?;
    run.extra.insert("max_radius".into(), json!(pseudosphere::max_disk_radius(eta0)));
    if radius > 0.0 {
        let grid = hyperdisk::geodesic::build_polar_grid(
            &PseudosphereChart::default(),
            [eta0, 0.0],
            radius,
            est.n_r,
            est.n_psi,
        )?;
        run.grid("pseudosphere_disk.csv", &grid)?;
        // the asymptotic square of half-side R/2 around the centre lies in the disk
        let c = 0.5 * eta0;
        let mesh = pseudosphere::cnet_mesh(c - 0.5 * radius, radius, lattice_nodes(radius, step))?;
        run.mesh("pseudosphere_mesh", &mesh, cli.mesh)?;
    }
    Ok(())
}

fn hyperboloid_modulus(
    radius: f64,
    modulus: Option<f64>,
    calibration: Calibration,
    fill: f64,
) -> hyperdisk::Result<f64> {
    if let Some(b) = modulus {
        return Ok(b);
    }
    let target = radius.max(f64::MIN_POSITIVE) / fill;
    match calibration {
        Calibration::MaxRadius => hyperboloid::modulus_for_max_radius(target),
        Calibration::TimeOfFlight => Ok(hyperboloid::modulus_from_radius(target)?.1),
    }
}

#[allow(clippy::too_many_arguments)]
fn run_hyperboloid(
    run: &mut Run,
    cli: &Cli,
    radius: f64,
    modulus: Option<f64>,
    calibration: Calibration,
    fill: f64,
    res: Resolution,
    step: f64,
) -> Result<(), Failure> {
    let b = hyperboloid_modulus(radius, modulus, calibration, fill)?;
    let chart = HyperboloidChart::new(b)?;
    let est = hyperboloid::disk_energy(b, radius, &res.options())?;
    run.energies("hyperboloid_energy.csv", &[energy_report("hyperboloid", b, est)])?;
    run.extra.insert("modulus".into(), json!(b));
    run.extra.insert("max_radius".into(), json!(chart.max_disk_radius()));
    if radius > 0.0 {
        let grid = hyperdisk::geodesic::build_polar_grid(&chart, chart.center(), radius, est.n_r, est.n_psi)?;
        run.grid("hyperboloid_disk.csv", &grid)?;
        let n_xi = lattice_nodes(2.0 * std::f64::consts::PI / chart.k(), step);
        let mesh = hyperboloid::band_mesh(b, radius, lattice_nodes(2.0 * radius, step), n_xi)?;
        run.mesh("hyperboloid_mesh", &mesh, cli.mesh)?;
    }
    Ok(())
}

const RADII_HEADER: &str = "n,z_n,R_max,psi_max,diagonal";

fn radii_row(s: &AmslerSurface) -> hyperdisk::Result<(f64, String)> {
    let r = s.max_radius()?;
    let row = format!("{},{},{},{},{}", s.n(), s.profile.z_singular, r.radius, r.psi, s.profile.diagonal_distance());
    Ok((r.radius, row))
}

fn run_amsler(run: &mut Run, cli: &Cli, n: usize, radius: f64, res: Resolution, step: f64) -> Result<(), Failure> {
    let surface = AmslerSurface::new(n)?;
    let (r_max, row) = radii_row(&surface)?;
    run.extra.insert("max_radius".into(), json!(r_max));
    let est = surface.disk_energy(radius, &res.options())?;
    let mut w = run.file("amsler_profile.csv")?;
    surface.profile.write_csv(&mut w, 10)?;
    w.flush()?;
    let mut w = run.file("amsler_radii.csv")?;
    writeln!(w, "{RADII_HEADER}\n{row}")?;
    w.flush()?;
    run.energies("amsler_energy.csv", &[energy_report("amsler", n as f64, est)])?;
    if radius > 0.0 {
        run.grid("amsler_disk.csv", &surface.polar_grid(radius, est.n_r, est.n_psi)?)?;
        run.mesh("amsler_mesh", &surface.periodic_mesh(radius, step)?, cli.mesh)?;
    }
    Ok(())
}

fn saddle_estimate(n: usize, radius: f64) -> hyperdisk::Result<EnergyEstimate> {
    let e = small_slopes::periodic_energy(n, radius)?;
    Ok(EnergyEstimate {
        radius,
        energy: e.quadrature,
        err_estimate: (e.quadrature - e.closed_form).abs(),
        n_r: 16,
        n_psi: 16 * n,
    })
}

fn run_small_slopes(run: &mut Run, n: usize, radius: f64, nodes: usize) -> Result<(), Failure> {
    let saddle = PeriodicSaddle::new(n)?;
    let est = saddle_estimate(n, radius)?;
    run.extra.insert("closed_form".into(), json!(small_slopes::periodic_energy_closed_form(n, radius)?));
    run.extra.insert("amplitude".into(), json!(saddle.amplitude(radius)));
    let mut w = run.file("small_slopes_height.csv")?;
    saddle.sample(radius, nodes).write_csv(&mut w)?;
    w.flush()?;
    run.energies("small_slopes_energy.csv", &[energy_report("small-slopes", n as f64, est)])?;
    Ok(())
}

fn write_field(w: &mut impl Write, sol: &GridSolution) -> io::Result<()> {
    writeln!(w, "i,j,u,v,phi")?;
    let h = 1.0 / (sol.n - 1) as f64;
    for i in 0..sol.n {
        for j in 0..sol.n {
            writeln!(w, "{i},{j},{},{},{}", i as f64 * h, j as f64 * h, sol.at(i, j))?;
        }
    }
    Ok(())
}

fn run_minimax(run: &mut Run, cli: &Cli, lambda: f64, p: f64, n: usize, starts: usize) -> Result<(), Failure> {
    let opts = MinimaxOptions { random_starts: starts, seed: cli.seed, ..Default::default() };
    let sol = grid_minimize(lambda, p, n, &opts)?;
    let mut w = run.file("minimax_field.csv")?;
    write_field(&mut w, &sol)?;
    w.flush()?;
    run.extra.insert("collapse_spread".into(), json!(sol.collapse_spread()));
    run.extra.insert("sg_residual".into(), json!(sol.sg_residual));
    run.extra.insert("iterations".into(), json!(sol.iterations));
    let mut buf = Vec::new();
    MinimaxRow::new(&sol)?.write_csv(&mut buf, true)?;
    run.table("minimax.csv", buf)?;
    Ok(())
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Family {
    Pseudosphere,
    Hyperboloid,
    Amsler,
    SmallSlopes,
}

impl Family {
    const ALL: [Family; 4] = [Family::Pseudosphere, Family::Hyperboloid, Family::Amsler, Family::SmallSlopes];

    fn name(self) -> &'static str {
        match self {
            Family::Pseudosphere => "pseudosphere",
            Family::Hyperboloid => "hyperboloid",
            Family::Amsler => "amsler",
            Family::SmallSlopes => "small-slopes",
        }
    }
}

fn run_sweep(run: &mut Run, waves: &[usize], points: usize, fill: f64, res: Resolution) -> Result<(), Failure> {
    let mut waves = waves.to_vec();
    waves.sort_unstable();
    waves.dedup();
    let surfaces: Vec<(AmslerSurface, f64, String)> = waves
        .par_iter()
        .map(|&n| {
            let s = AmslerSurface::new(n)?;
            let (r_max, row) = radii_row(&s)?;
            Ok((s, r_max, row))
        })
        .collect::<hyperdisk::Result<_>>()?;
    let mut w = run.file("radii.csv")?;
    writeln!(w, "{RADII_HEADER}")?;
    for (_, _, row) in &surfaces {
        writeln!(w, "{row}")?;
    }
    w.flush()?;

    // η0 puts the pseudosphere's largest disk exactly at R_max(n)
    let params: Vec<[f64; 4]> = surfaces
        .iter()
        .map(|(s, r_max, _)| {
            let eta0 = r_max.exp().acosh();
            Ok([eta0, hyperboloid::modulus_for_max_radius(*r_max)?, s.n() as f64, s.n() as f64])
        })
        .collect::<hyperdisk::Result<_>>()?;
    let jobs: Vec<(usize, usize, Family)> =
        (0..surfaces.len()).flat_map(|k| (1..=points).flat_map(move |i| Family::ALL.map(|f| (k, i, f)))).collect();
    let opts = res.options();
    let results: Vec<EnergyEstimate> = jobs
        .par_iter()
        .map(|&(k, i, family)| {
            let (surface, r_max, _) = &surfaces[k];
            let radius = fill * r_max * i as f64 / points as f64;
            match family {
                Family::Pseudosphere => pseudosphere::disk_energy(params[k][0], radius, &opts),
                Family::Hyperboloid => hyperboloid::disk_energy(params[k][1], radius, &opts),
                Family::Amsler => surface.disk_energy(radius, &opts),
                Family::SmallSlopes => saddle_estimate(surface.n(), radius),
            }
        })
        .collect::<hyperdisk::Result<_>>()?;

    let mut all = Vec::new();
    for (f, family) in Family::ALL.iter().enumerate() {
        let reports: Vec<EnergyReport> = (0..surfaces.len())
            .map(|k| EnergyReport {
                surface: family.name().into(),
                param: params[k][f],
                rows: jobs
                    .iter()
                    .zip(&results)
                    .filter(|((kk, _, ff), _)| *kk == k && ff == family)
                    .map(|(_, e)| *e)
                    .collect(),
            })
            .collect();
        let mut buf = Vec::new();
        for (k, r) in reports.iter().enumerate() {
            r.write_csv(&mut buf, k == 0)?;
        }
        let mut w = run.file(&format!("energy_{}.csv", family.name().replace('-', "_")))?;
        w.write_all(&buf)?;
        w.flush()?;
        all.extend(reports);
    }
    let mut buf = Vec::new();
    for (k, r) in all.iter().enumerate() {
        r.write_csv(&mut buf, k == 0)?;
    }
    run.table("energy_all.csv", buf)?;
    Ok(())
}

fn execute(cli: &Cli) -> Result<Run, Failure> {
    let mut run = Run::new(&cli.output_dir)?;
    match cli.command {
        Command::Pseudosphere { eta0, radius, res, step } => run_pseudosphere(&mut run, cli, eta0, radius, res, step)?,
        Command::Hyperboloid { radius, modulus, calibration, fill, res, step } => {
            run_hyperboloid(&mut run, cli, radius, modulus, calibration, fill, res, step)?
        }
        Command::Amsler { n, radius, res, step } => run_amsler(&mut run, cli, n, radius, res, step)?,
        Command::SmallSlopes { n, radius, nodes } => run_small_slopes(&mut run, n, radius, nodes as usize)?,
        Command::Minimax { lambda, p, n, starts } => run_minimax(&mut run, cli, lambda, p, n as usize, starts)?,
        Command::Sweep { ref n, points, fill, res } => run_sweep(&mut run, n, points as usize, fill, res)?,
    }
    Ok(run)
}

fn tolerances() -> Value {
    let e = EnergyOptions::default();
    let m = MinimaxOptions::default();
    json!({
        "energy_rel_tol": e.rel_tol,
        "energy_max_doublings": e.max_doublings,
        "geodesic_rtol": e.geodesic.rtol,
        "geodesic_atol": e.geodesic.atol,
        "geodesic_event_tol": e.geodesic.event_tol,
        "minimax_residual_tol": m.residual_tol,
        "bfgs_gtol": m.bfgs.gtol,
        "bfgs_max_iter": m.bfgs.max_iter,
    })
}

/// CSV rows as JSON objects, numbers parsed where possible.
fn rows_as_json(header: &str, rows: &[String]) -> Value {
    let names: Vec<&str> = header.split(',').collect();
    let records = rows
        .iter()
        .map(|row| {
            let obj: Map<String, Value> = names
                .iter()
                .zip(row.split(','))
                .map(|(k, v)| {
                    let value = match v.parse::<f64>() {
                        Ok(x) if x.is_finite() => json!(x),
                        _ => json!(v),
                    };
                    (k.to_string(), value)
                })
                .collect();
            Value::Object(obj)
        })
        .collect();
    Value::Array(records)
}

fn finish(cli: &Cli, mut run: Run, elapsed: f64) -> io::Result<()> {
    let manifest = json!({
        "program": "hyperdisk",
        "version": env!("CARGO_PKG_VERSION"),
        "command": cli.command,
        "seed": cli.seed,
        "tolerances": tolerances(),
        "results": Value::Object(std::mem::take(&mut run.extra)),
        "outputs": run.outputs,
        "elapsed_seconds": elapsed,
    });
    let mut w = BufWriter::new(File::create(run.dir.join(format!("{}_manifest.json", cli.command.name())))?);
    serde_json::to_writer_pretty(&mut w, &manifest)?;
    writeln!(w)?;
    w.flush()?;

    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.format {
        Format::Csv => {
            writeln!(out, "{}", run.header)?;
            for row in &run.rows {
                writeln!(out, "{row}")?;
            }
        }
        Format::Json => {
            let mut summary = manifest;
            summary["rows"] = rows_as_json(&run.header, &run.rows);
            writeln!(out, "{}", serde_json::to_string(&summary)?)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let outcome = execute(&cli).and_then(|run| Ok(finish(&cli, run, start.elapsed().as_secs_f64())?));
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let record = json!({ "error": e.kind(), "message": e.to_string(), "command": cli.command });
            eprintln!("{record}");
            ExitCode::from(1)
        }
    }
}
