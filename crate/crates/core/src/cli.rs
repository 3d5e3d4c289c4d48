//! Command implementations behind the `ldgm-sm` binary.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{BitMatrix, MAX_ENUMERATION_ROWS};
use crate::peg::{
    builtin_fixtures, construct, format_poly_matrix, lifted_girth, parse_poly_fixture, DegreeSequence,
    PolyFixture,
};
use crate::sim::{
    build_systems, linear_grid, log_grid, manifest_json, run_sweep, write_results_csv, write_strata_csv,
    ModelKind, SmDecoderKind, SweepConfig,
};
use crate::sm_code::{d_max_bound, encode_stabilizers, repetition_sm_code, SmCode};
use crate::stabilizer::build_rotated_surface_code;

#[derive(Debug, Parser)]
#[command(name = "ldgm-sm", version, about = "LDGM syndrome-measurement codes: construction, verification, simulation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a lifted LDGM generator by PEG and quasi-cyclic shift selection.
    Construct(ConstructArgs),
    /// Check lifted generators against their declared [n, k, d].
    Verify(VerifyArgs),
    /// Encode a stabilizer code's generators with an SM code and report weights.
    Encode(EncodeArgs),
    /// Run importance-sampling sweeps and write CSV results.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    /// Protograph check nodes.
    #[arg(long)]
    pub nc: usize,
    /// Protograph symbol nodes.
    #[arg(long)]
    pub nv: usize,
    /// Symbol degrees, comma separated, or a single value for a uniform sequence.
    #[arg(long, default_value = "3")]
    pub ds: String,
    /// Lifting factor N.
    #[arg(long = "lift")]
    pub lift: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Extra seeds tried after `seed`; the largest distance wins.
    #[arg(long, default_value_t = 0)]
    pub restarts: u64,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Polynomial-matrix files to check.
    pub files: Vec<PathBuf>,
    /// Check every `*.txt` in this directory.
    #[arg(long)]
    pub fixtures: Option<PathBuf>,
    /// Check the six built-in generators.
    #[arg(long)]
    pub builtin: bool,
    /// Check the repetition code "L,R" (L bits, R copies each).
    #[arg(long)]
    pub repetition: Option<String>,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    /// Stabilizer code, currently `rsc:<odd d>`.
    #[arg(long, default_value = "rsc:5")]
    pub code: String,
    /// SM code: a file path, `builtin:<name>`, `identity` or `rep:<R>`.
    #[arg(long)]
    pub sm: String,
    /// Directory for the measured-set audit file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelArg {
    Meas,
    Combined,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SmDecoderArg {
    Bounded,
    MinWeight,
}

#[derive(Debug, Args, Default)]
pub struct SimulateArgs {
    /// Optional TOML file with the same keys as the flags (snake_case).
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// "start:stop:points" with optional ",log" (default) or ",lin".
    #[arg(long)]
    pub grid: Option<String>,
    /// Sampled trials per stratum.
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub wq_max: Option<usize>,
    #[arg(long)]
    pub wm_max: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Directory of polynomial-matrix files; the built-in set when omitted.
    #[arg(long)]
    pub fixtures: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub model: Option<ModelArg>,
    /// p_q = p_m / qubit_ratio in the combined model.
    #[arg(long)]
    pub qubit_ratio: Option<f64>,
    #[arg(long, value_enum)]
    pub sm_decoder: Option<SmDecoderArg>,
    /// Search order for the min-weight decoder.
    #[arg(long)]
    pub isd_order: Option<usize>,
    /// Strata with at most this many patterns are enumerated exactly.
    #[arg(long)]
    pub exhaustive_cap: Option<u64>,
    /// Code distance of the rotated surface code.
    #[arg(long)]
    pub distance: Option<usize>,
    /// Copies per syndrome bit in the repetition baseline.
    #[arg(long)]
    pub repetitions: Option<usize>,
}

/// Keys accepted in a simulate config file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimulateFile {
    seed: Option<u64>,
    grid: Option<String>,
    trials: Option<u64>,
    wq_max: Option<usize>,
    wm_max: Option<usize>,
    out: Option<PathBuf>,
    fixtures: Option<PathBuf>,
    model: Option<ModelArg>,
    qubit_ratio: Option<f64>,
    sm_decoder: Option<SmDecoderArg>,
    isd_order: Option<usize>,
    exhaustive_cap: Option<u64>,
    distance: Option<usize>,
    repetitions: Option<usize>,
}

/// Runs a parsed command line. `Ok(true)` when every verification passed.
pub fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Construct(a) => cmd_construct(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Encode(a) => cmd_encode(&a),
        Command::Simulate(a) => cmd_simulate(&a),
    }
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| io_err(path, e))
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| io_err(path, e))
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v).map_err(|e| Error::Parse(e.to_string()))
}

pub fn parse_degrees(text: &str, n_v: usize) -> Result<DegreeSequence> {
    let values = text
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad degree {t:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    match values.as_slice() {
        [d] => Ok(DegreeSequence::uniform(n_v, *d)),
        _ if values.len() == n_v => DegreeSequence::new(values),
        _ => Err(Error::LengthMismatch {
            expected: n_v,
            got: values.len(),
        }),
    }
}

/// Parses "start:stop:points" with an optional ",log" or ",lin" suffix.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let (range, scale) = match spec.split_once(',') {
        Some((r, s)) => (r, s.trim()),
        None => (spec, "log"),
    };
    let parts: Vec<&str> = range.split(':').map(str::trim).collect();
    let [start, stop, points] = parts.as_slice() else {
        return Err(Error::Parse(format!("grid {spec:?} is not start:stop:points")));
    };
    let num = |t: &str| t.parse::<f64>().map_err(|_| Error::Parse(format!("bad grid value {t:?}")));
    let (start, stop) = (num(start)?, num(stop)?);
    let points = points
        .parse::<usize>()
        .map_err(|_| Error::Parse(format!("bad grid point count {points:?}")))?;
    if points == 0 {
        return Err(Error::InvalidParameter("grid needs at least one point".into()));
    }
    for p in [start, stop] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("grid value {p} outside [0, 1]")));
        }
    }
    match scale {
        "log" if start > 0.0 && stop > 0.0 => Ok(log_grid(start, stop, points)),
        "log" => Err(Error::InvalidParameter("log grid needs positive endpoints".into())),
        "lin" => Ok(linear_grid(start, stop, points)),
        other => Err(Error::Parse(format!("unknown grid scale {other:?}"))),
    }
}

/// Distance when the generator is small enough to enumerate.
fn distance_if_feasible(g: &BitMatrix) -> Option<usize> {
    (g.rows() <= MAX_ENUMERATION_ROWS && g.rank() == g.rows())
        .then(|| g.min_distance().ok())
        .flatten()
}

#[derive(Debug, Serialize)]
struct ConstructReport {
    seed: u64,
    n: usize,
    k: usize,
    rank: usize,
    distance: Option<usize>,
    d_max_bound: Option<usize>,
    girth: Option<usize>,
    column_weights: Vec<usize>,
    row_weights: Vec<usize>,
    protograph_row_sums: Vec<usize>,
}

fn cmd_construct(a: &ConstructArgs) -> Result<bool> {
    let ds = parse_degrees(&a.ds, a.nv)?;
    let mut best: Option<(ConstructReport, String, String, String)> = None;
    for seed in a.seed..=a.seed.saturating_add(a.restarts) {
        let (proto, lift, g) = construct(a.nc, a.nv, &ds, a.lift, seed)?;
        let cw = g.col_weights();
        let uniform_cw = cw.first().copied().filter(|&w| cw.iter().all(|&x| x == w));
        let report = ConstructReport {
            seed,
            n: g.cols(),
            k: g.rows(),
            rank: g.rank(),
            distance: distance_if_feasible(&g),
            d_max_bound: uniform_cw.filter(|_| g.rows() > 0).map(|w| d_max_bound(g.rows(), g.cols(), w)),
            girth: lifted_girth(&lift),
            column_weights: cw,
            row_weights: g.row_weights(),
            protograph_row_sums: proto.row_sums(),
        };
        println!(
            "seed {seed}: [{}, {}, {}] rank {} girth {}",
            report.n,
            report.k,
            report.distance.map_or("?".into(), |d| d.to_string()),
            report.rank,
            report.girth.map_or("none".into(), |g| g.to_string()),
        );
        let better = best
            .as_ref()
            .is_none_or(|(b, ..)| report.distance.unwrap_or(0) > b.distance.unwrap_or(0));
        if better {
            best = Some((report, proto.to_string(), format_poly_matrix(&lift), g.to_text()));
        }
    }
    let (report, proto, poly, gen) = best.expect("at least one seed");
    create_dir(&a.out)?;
    write_file(&a.out.join("protograph.txt"), &proto)?;
    write_file(&a.out.join("lift.txt"), &poly)?;
    write_file(&a.out.join("generator.txt"), &gen)?;
    write_file(&a.out.join("report.json"), &to_json(&report)?)?;
    println!(
        "best: seed {} [{}, {}, {}], d_max bound {}; wrote {}",
        report.seed,
        report.n,
        report.k,
        report.distance.map_or("?".into(), |d| d.to_string()),
        report.d_max_bound.map_or("n/a".into(), |d| d.to_string()),
        a.out.display()
    );
    Ok(true)
}

/// Verification outcome for one generator.
#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub name: String,
    pub n: usize,
    pub k: usize,
    pub rank: usize,
    pub distance: Option<usize>,
    pub column_weights: BTreeMap<usize, usize>,
    pub row_weights: BTreeMap<usize, usize>,
    pub expect: Option<[usize; 3]>,
    pub pass: bool,
}

fn histogram(values: &[usize]) -> BTreeMap<usize, usize> {
    let mut h = BTreeMap::new();
    for &v in values {
        *h.entry(v).or_insert(0) += 1;
    }
    h
}

/// [n, k, d] and weight profiles of a generator, checked against `expect`
/// (or only for full rank when nothing is declared).
pub fn verify_generator(name: &str, g: &BitMatrix, expect: Option<[usize; 3]>) -> VerifyReport {
    let rank = g.rank();
    let distance = distance_if_feasible(g);
    let found = [g.cols(), rank, distance.unwrap_or(0)];
    let pass = match expect {
        Some(e) => distance.is_some() && e == found && rank == g.rows(),
        None => rank == g.rows(),
    };
    VerifyReport {
        name: name.to_string(),
        n: g.cols(),
        k: rank,
        rank,
        distance,
        column_weights: histogram(&g.col_weights()),
        row_weights: histogram(&g.row_weights()),
        expect,
        pass,
    }
}

fn load_fixture_dir(dir: &Path) -> Result<Vec<(String, PolyFixture, String)>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| io_err(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "txt"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Error::InvalidParameter(format!("no *.txt fixtures in {}", dir.display())));
    }
    paths.iter().map(|p| load_fixture_file(p)).collect()
}

fn load_fixture_file(path: &Path) -> Result<(String, PolyFixture, String)> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let fixture = parse_poly_fixture(&text).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })?;
    let name = path
        .file_stem()
        .map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned());
    Ok((name, fixture, text))
}

fn builtin_with_text() -> Result<Vec<(String, PolyFixture, String)>> {
    let texts = crate::peg::BUILTIN_FIXTURES;
    Ok(builtin_fixtures()?
        .into_iter()
        .zip(texts)
        .map(|((name, f), (_, text))| (name.to_string(), f, text.to_string()))
        .collect())
}

fn cmd_verify(a: &VerifyArgs) -> Result<bool> {
    let mut items: Vec<(String, BitMatrix, Option<[usize; 3]>)> = Vec::new();
    for p in &a.files {
        let (name, f, _) = load_fixture_file(p)?;
        items.push((name, f.lift.expand(), f.expect));
    }
    if let Some(dir) = &a.fixtures {
        for (name, f, _) in load_fixture_dir(dir)? {
            items.push((name, f.lift.expand(), f.expect));
        }
    }
    if a.builtin {
        for (name, f, _) in builtin_with_text()? {
            items.push((name, f.lift.expand(), f.expect));
        }
    }
    if let Some(spec) = &a.repetition {
        let (l, r) = spec
            .split_once(',')
            .and_then(|(l, r)| Some((l.trim().parse().ok()?, r.trim().parse().ok()?)))
            .ok_or_else(|| Error::Parse(format!("repetition wants \"L,R\", got {spec:?}")))?;
        let rep = repetition_sm_code(l, r)?;
        items.push((format!("repetition_{l}x{r}"), rep.gen().clone(), Some([l * r, l, r])));
    }
    if items.is_empty() {
        return Err(Error::InvalidParameter("nothing to verify".into()));
    }
    let mut all = true;
    for (name, g, expect) in items {
        let r = verify_generator(&name, &g, expect);
        println!(
            "{}: [{}, {}, {}] columns {:?} rows {:?} expect {} -> {}",
            r.name,
            r.n,
            r.k,
            r.distance.map_or("?".into(), |d| d.to_string()),
            r.column_weights,
            r.row_weights,
            r.expect.map_or("none".into(), |e| format!("{e:?}")),
            if r.pass { "PASS" } else { "FAIL" }
        );
        all &= r.pass;
    }
    Ok(all)
}

fn parse_code(spec: &str) -> Result<crate::stabilizer::StabilizerCode> {
    let d = spec
        .strip_prefix("rsc:")
        .and_then(|d| d.parse::<usize>().ok())
        .ok_or_else(|| Error::Parse(format!("unknown code {spec:?}; expected rsc:<d>")))?;
    build_rotated_surface_code(d)
}

fn parse_sm(spec: &str, l: usize) -> Result<SmCode> {
    if spec == "identity" {
        return SmCode::new(BitMatrix::identity(l));
    }
    if let Some(r) = spec.strip_prefix("rep:") {
        let r = r.parse().map_err(|_| Error::Parse(format!("bad repetition {r:?}")))?;
        return repetition_sm_code(l, r);
    }
    let g = if let Some(name) = spec.strip_prefix("builtin:") {
        builtin_fixtures()?
            .into_iter()
            .find(|(n, _)| *n == name)
            .ok_or_else(|| Error::InvalidParameter(format!("no built-in fixture {name:?}")))?
            .1
            .lift
            .expand()
    } else {
        load_fixture_file(Path::new(spec))?.1.lift.expand()
    };
    SmCode::new(g)
}

fn cmd_encode(a: &EncodeArgs) -> Result<bool> {
    let code = parse_code(&a.code)?;
    let sm = parse_sm(&a.sm, code.num_generators())?;
    let ms = encode_stabilizers(&code, &sm)?;
    let weights = ms.weight_profile();
    let max = weights.iter().copied().max().unwrap_or(0);
    let bound = sm.max_column_weight() * code.max_generator_weight();
    println!(
        "{} generators (max weight {}) -> {} measured elements",
        code.num_generators(),
        code.max_generator_weight(),
        ms.len()
    );
    for (w, count) in histogram(&weights) {
        println!("  weight {w:>3}: {count}");
    }
    println!("max measured weight {max} (bound {bound})");
    if let Some(dir) = &a.out {
        create_dir(dir)?;
        write_file(&dir.join("measured_set.json"), &to_json(&ms.to_audit())?)?;
    }
    Ok(max <= bound)
}

/// Resolved simulate settings after merging the config file and flags.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulatePlan {
    pub config: SweepConfig,
    pub models: Vec<ModelKind>,
    pub out: PathBuf,
    pub fixtures: Option<PathBuf>,
    pub sm_decoder: SmDecoderKind,
    pub distance: usize,
    pub repetitions: usize,
}

pub fn plan_simulate(a: &SimulateArgs) -> Result<SimulatePlan> {
    let file: SimulateFile = match &a.config {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| io_err(p, e))?;
            toml::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", p.display())))?
        }
        None => SimulateFile::default(),
    };
    let seed = a
        .seed
        .or(file.seed)
        .ok_or_else(|| Error::InvalidParameter("simulate requires --seed".into()))?;
    let defaults = SweepConfig::default();
    let grid = match a.grid.as_ref().or(file.grid.as_ref()) {
        Some(g) => parse_grid(g)?,
        None => defaults.grid.clone(),
    };
    let models = match a.model.or(file.model).unwrap_or(ModelArg::Meas) {
        ModelArg::Meas => vec![ModelKind::MeasurementOnly],
        ModelArg::Combined => vec![ModelKind::MeasurementPlusQubit],
        ModelArg::Both => vec![ModelKind::MeasurementOnly, ModelKind::MeasurementPlusQubit],
    };
    let qubit_ratio = a.qubit_ratio.or(file.qubit_ratio).unwrap_or(defaults.qubit_ratio);
    if qubit_ratio.is_nan() || qubit_ratio <= 0.0 {
        return Err(Error::InvalidParameter("qubit ratio must be positive".into()));
    }
    let trials = a.trials.or(file.trials).unwrap_or(defaults.trials);
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let sm_decoder = match a.sm_decoder.or(file.sm_decoder).unwrap_or(SmDecoderArg::Bounded) {
        SmDecoderArg::Bounded => SmDecoderKind::Bounded,
        SmDecoderArg::MinWeight => SmDecoderKind::MinWeight {
            order: a.isd_order.or(file.isd_order).unwrap_or(3),
        },
    };
    Ok(SimulatePlan {
        config: SweepConfig {
            seed,
            grid,
            model: models[0],
            qubit_ratio,
            trials,
            wq_max: a.wq_max.or(file.wq_max).unwrap_or(defaults.wq_max),
            wm_max: a.wm_max.or(file.wm_max).unwrap_or(defaults.wm_max),
            exhaustive_cap: a
                .exhaustive_cap
                .or(file.exhaustive_cap)
                .map_or(defaults.exhaustive_cap, u128::from),
            tail_ratio: defaults.tail_ratio,
        },
        models,
        out: a.out.clone().or(file.out).unwrap_or_else(|| PathBuf::from("out")),
        fixtures: a.fixtures.clone().or(file.fixtures),
        sm_decoder,
        distance: a.distance.or(file.distance).unwrap_or(5),
        repetitions: a.repetitions.or(file.repetitions).unwrap_or(5),
    })
}

/// Output file names written by `simulate` for a model.
pub fn result_file_names(model: ModelKind) -> (String, String) {
    (
        format!("results_{}.csv", model.label()),
        format!("strata_{}.csv", model.label()),
    )
}

fn cmd_simulate(a: &SimulateArgs) -> Result<bool> {
    let plan = plan_simulate(a)?;
    let fixtures = match &plan.fixtures {
        Some(dir) => load_fixture_dir(dir)?,
        None => builtin_with_text()?,
    };
    let code = build_rotated_surface_code(plan.distance)?;
    let l = code.num_generators();
    let mut sm_codes = Vec::new();
    let mut texts = Vec::new();
    for (name, f, text) in fixtures {
        let g = f.lift.expand();
        if g.rows() != l {
            return Err(Error::Dimension(format!(
                "{name} has {} rows but the code has {l} generators",
                g.rows()
            )));
        }
        sm_codes.push((name.clone(), SmCode::new(g)?));
        texts.push((name, text));
    }
    let rep = repetition_sm_code(l, plan.repetitions)?;
    let rep_id = format!("repetition{}", plan.repetitions);
    texts.push((rep_id.clone(), rep.gen().to_text()));
    sm_codes.push((rep_id, rep));
    let q_radius = (plan.distance - 1) / 2;
    let systems = build_systems(code, q_radius, sm_codes, plan.sm_decoder)?;

    create_dir(&plan.out)?;
    let mut manifests = Vec::new();
    for &model in &plan.models {
        let cfg = SweepConfig {
            model,
            ..plan.config.clone()
        };
        let result = run_sweep(&systems, &cfg)?;
        let (res_name, strata_name) = result_file_names(model);
        write_results_csv(&plan.out.join(&res_name), &result)?;
        write_strata_csv(&plan.out.join(&strata_name), &result)?;
        let manifest = manifest_json(&result, &texts)?;
        println!(
            "{}: {} codes x {} points -> {} (results sha256 {})",
            model.label(),
            result.codes.len(),
            cfg.grid.len(),
            res_name,
            &manifest.results_sha256[..16]
        );
        manifests.push(manifest);
    }
    #[derive(Serialize)]
    struct Manifest<'a> {
        sm_decoder: SmDecoderKind,
        surface_code_distance: usize,
        runs: &'a [crate::sim::RunManifest],
    }
    write_file(
        &plan.out.join("manifest.json"),
        &to_json(&Manifest {
            sm_decoder: plan.sm_decoder,
            surface_code_distance: plan.distance,
            runs: &manifests,
        })?,
    )?;
    Ok(true)
}
