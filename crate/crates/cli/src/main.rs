//! `vorinv`: generate Voronoi fixtures, recover generators, check and measure.
//!
//! Exit codes: 0 success (or "is Voronoi"), 2 usage or input error,
//! 3 not a Voronoi diagram, 4 inversion failure.

mod svg;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use vorinv::forward::{
    build_voronoi_with, format_label_grid, grid_growth_labels, parse_generators,
    serialize_generators, BuildOptions, GeneratorSet, DEFAULT_MERGE_TOLERANCE,
};
use vorinv::geom::{Point2, Rect};
use vorinv::harness::{
    format_median_table, lattice_generators, median_table, outlier_csv, outlier_study,
    random_generators, sample_invertible, sweep, sweep_csv, HarnessError, Lattice, SweepBase,
    SweepOptions,
};
use vorinv::invert::{
    estimate_csv_rows, invert, parse_methods, recognize_voronoi, InvertError, InvertOptions,
    Method, DEFAULT_EPSILON, ESTIMATE_CSV_HEADER,
};
use vorinv::tess::{
    extract_subdivision, format_real, parse_tessellation, serialize_tessellation, Tessellation,
};

const EXIT_USAGE: u8 = 2;
const EXIT_NOT_VORONOI: u8 = 3;
const EXIT_INVERSION: u8 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "vorinv",
    version,
    about = "Planar Voronoi diagrams and generator recovery"
)]
struct Cli {
    /// File of `key = value` lines used as default flags; command-line flags win.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a generator file and its Voronoi tessellation.
    Generate(GenerateArgs),
    /// Recover generators from a tessellation and write them as CSV.
    Invert(InvertArgs),
    /// Decide whether a tessellation is a Voronoi diagram.
    Check(CheckArgs),
    /// Invert, re-synthesize and report errors, optionally under vertex noise.
    Roundtrip(RoundtripArgs),
    /// Noise sweep over the diagram of a generator file.
    Sweep(SweepArgs),
    /// Draw a tessellation with optional overlays as SVG.
    Render(RenderArgs),
    /// Dump nearest-generator labels on a square grid.
    Grid(GridArgs),
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct GenerateArgs {
    /// Number of uniformly random generators.
    #[arg(long)]
    n: Option<i64>,
    /// Place generators on a lattice instead.
    #[arg(long, value_parser = ["hex", "square"])]
    lattice: Option<String>,
    #[arg(long, default_value_t = 4)]
    rows: usize,
    #[arg(long, default_value_t = 4)]
    cols: usize,
    /// `x0,y0,x1,y1`; random placement only.
    #[arg(long, default_value = "0,0,1,1")]
    bounds: String,
    #[arg(long, env = "VORINV_SEED", default_value_t = 0)]
    seed: u64,
    /// Redraw until every cell can be inverted by ray intersection.
    #[arg(long)]
    invertible: bool,
    #[arg(long, default_value_t = DEFAULT_MERGE_TOLERANCE)]
    merge_tolerance: f64,
    /// Output prefix; writes `<prefix>.gen` and `<prefix>.tess`.
    #[arg(long, default_value = "vorinv")]
    output: PathBuf,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct InvertArgs {
    input: PathBuf,
    /// `alg1`, `alg2`, `alg3`, `lsq`, a comma list, or `all`.
    #[arg(long, alias = "methods", default_value = "all")]
    method: String,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct CheckArgs {
    input: PathBuf,
    /// Largest accepted spread; defaults to 1e-7 of the vertex bounding-box diagonal.
    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct NoiseArgs {
    /// Comma list of vertex noise standard deviations.
    #[arg(long, default_value = "0")]
    sigma: String,
    /// Treat sigmas as fractions of the bounds diagonal.
    #[arg(long)]
    relative: bool,
    /// A count (consecutive seeds from `--seed`) or a comma list of seeds.
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long, env = "VORINV_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, alias = "method", default_value = "all")]
    methods: String,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
    /// Vertex matching radius; defaults to 5·sigma, or 1% of the diagonal at sigma 0.
    #[arg(long)]
    match_radius: Option<f64>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct RoundtripArgs {
    input: PathBuf,
    /// True generators, for generator errors.
    #[arg(long)]
    generators: Option<PathBuf>,
    #[command(flatten)]
    noise: NoiseArgs,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct SweepArgs {
    /// Generator file.
    input: PathBuf,
    #[command(flatten)]
    noise: NoiseArgs,
    /// Displace a single random vertex per seed instead of perturbing all.
    #[arg(long)]
    outlier: bool,
    /// Outlier displacement as a fraction of the bounds diagonal.
    #[arg(long, default_value_t = 0.1)]
    outlier_fraction: f64,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct RenderArgs {
    input: PathBuf,
    #[arg(long)]
    generators: Option<PathBuf>,
    /// Estimate CSV written by `invert`.
    #[arg(long)]
    estimates: Option<PathBuf>,
    /// Draw the empty circle at every interior vertex.
    #[arg(long)]
    circles: bool,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct GridArgs {
    /// Generator file.
    input: PathBuf,
    #[arg(long, default_value_t = 200)]
    resolution: usize,
    #[arg(long)]
    output: Option<PathBuf>,
}

/// Message and exit code of a failed command.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

type CmdResult = Result<u8, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_tessellation(path: &Path) -> Result<Tessellation, Failure> {
    parse_tessellation(&read(path)?).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn load_generators(path: &Path) -> Result<GeneratorSet, Failure> {
    parse_generators(&read(path)?).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn parse_bounds(s: &str) -> Result<Rect, Failure> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| Failure::usage(format!("invalid --bounds `{s}`: expected x0,y0,x1,y1")))?;
    let r = match v.as_slice() {
        [a, b, c, d] => Rect::new(*a, *b, *c, *d),
        _ => {
            return Err(Failure::usage(format!(
                "invalid --bounds `{s}`: expected four numbers"
            )))
        }
    };
    if !r.is_valid() {
        return Err(Failure::usage(format!(
            "invalid --bounds `{s}`: need x0 < x1 and y0 < y1"
        )));
    }
    Ok(r)
}

fn parse_list(s: &str, what: &str) -> Result<Vec<f64>, Failure> {
    let v: Vec<f64> = s
        .split(',')
        .filter(|x| !x.trim().is_empty())
        .map(|x| x.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| Failure::usage(format!("invalid {what} list `{s}`")))?;
    if v.is_empty() || v.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(Failure::usage(format!(
            "{what} values must be finite and nonnegative"
        )));
    }
    Ok(v)
}

fn parse_seeds(s: Option<&str>, base: u64) -> Result<Vec<u64>, Failure> {
    let Some(s) = s else { return Ok(vec![base]) };
    if s.contains(',') {
        return s
            .split(',')
            .filter(|x| !x.trim().is_empty())
            .map(|x| x.trim().parse::<u64>())
            .collect::<Result<_, _>>()
            .map_err(|_| Failure::usage(format!("invalid --seeds `{s}`")));
    }
    match s.trim().parse::<u64>() {
        Ok(n) if n > 0 => Ok((0..n).map(|k| base.wrapping_add(k)).collect()),
        _ => Err(Failure::usage(format!(
            "invalid --seeds `{s}`: expected a positive count or a list"
        ))),
    }
}

fn methods_of(s: &str) -> Result<Vec<Method>, Failure> {
    parse_methods(s).map_err(Failure::usage)
}

fn check_epsilon(eps: f64) -> Result<(), Failure> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(Failure::usage(format!(
            "--epsilon must be positive, got {eps}"
        )))
    }
}

fn cmd_generate(a: GenerateArgs) -> CmdResult {
    if a.merge_tolerance.is_nan() || a.merge_tolerance < 0.0 {
        return Err(Failure::usage("--merge-tolerance must be nonnegative"));
    }
    let g = match (a.n, a.lattice.as_deref()) {
        (Some(_), Some(_)) => return Err(Failure::usage("--n and --lattice are exclusive")),
        (None, None) => return Err(Failure::usage("give --n or --lattice")),
        (Some(n), None) => {
            if n < 2 {
                return Err(Failure::usage(format!(
                    "invalid --n {n}: need n ≥ 2 generators"
                )));
            }
            let bounds = parse_bounds(&a.bounds)?;
            let res = if a.invertible {
                sample_invertible(n as usize, bounds, a.seed, 10_000).map(|r| r.0)
            } else {
                random_generators(n as usize, bounds, a.seed)
            };
            res.map_err(|e| Failure::usage(e.to_string()))?
        }
        (None, Some(kind)) => {
            if a.rows * a.cols < 2 {
                return Err(Failure::usage(
                    "lattice needs n ≥ 2 generators (rows × cols)",
                ));
            }
            let kind: Lattice = kind.parse().map_err(Failure::usage)?;
            lattice_generators(kind, a.rows, a.cols).map_err(|e| Failure::usage(e.to_string()))?
        }
    };
    let d = build_voronoi_with(
        &g,
        BuildOptions {
            merge_tolerance: a.merge_tolerance,
        },
    )
    .map_err(|e| Failure::usage(e.to_string()))?;
    let prefix = a.output.to_string_lossy().into_owned();
    let gen_path = PathBuf::from(format!("{prefix}.gen"));
    let tess_path = PathBuf::from(format!("{prefix}.tess"));
    write_or_print(Some(&gen_path), &serialize_generators(&g))?;
    write_or_print(Some(&tess_path), &serialize_tessellation(d.tessellation()))?;
    println!("wrote {} and {}", gen_path.display(), tess_path.display());
    Ok(0)
}

fn failed_rows(t: &Tessellation, method: Method, message: &str) -> String {
    let n = extract_subdivision(t)
        .map(|s| s.polygons.len())
        .unwrap_or(0);
    let msg = message.replace(',', ";");
    (0..n)
        .map(|i| format!("{i},NaN,NaN,NaN,{method},0,0,{msg}\n"))
        .collect()
}

fn cmd_invert(a: InvertArgs) -> CmdResult {
    let methods = methods_of(&a.method)?;
    check_epsilon(a.epsilon)?;
    let t = load_tessellation(&a.input)?;
    let opts = InvertOptions { epsilon: a.epsilon };
    let mut out = format!("{ESTIMATE_CSV_HEADER}\n");
    let mut code = 0;
    for m in methods {
        match invert(&t, m, &opts) {
            Ok(est) => {
                if !est.is_complete() {
                    code = EXIT_INVERSION;
                    eprintln!("{m}: {} polygon(s) failed", est.failed_polygons().len());
                }
                if let Some(ls) = &est.least_squares {
                    if ls.ill_conditioned {
                        eprintln!(
                            "{m}: warning: condition number {:e} exceeds threshold",
                            ls.condition_number
                        );
                    }
                }
                out.push_str(&estimate_csv_rows(&est));
            }
            Err(InvertError::RankDeficient {
                rank,
                unknowns,
                estimate,
            }) => {
                code = EXIT_INVERSION;
                eprintln!(
                    "{m}: rank deficient ({rank} < {unknowns}); minimum-norm solution reported"
                );
                let mut est = *estimate;
                let msg = InvertError::RankDeficient {
                    rank,
                    unknowns,
                    estimate: Box::new(est.clone()),
                };
                for d in &mut est.per_polygon {
                    d.error = Some(msg.clone());
                }
                out.push_str(&estimate_csv_rows(&est));
            }
            Err(InvertError::Tess(e)) => {
                return Err(Failure::usage(format!("{}: {e}", a.input.display())));
            }
            Err(e) => {
                code = EXIT_INVERSION;
                eprintln!("{m}: {e}");
                out.push_str(&failed_rows(&t, m, &e.to_string()));
            }
        }
    }
    write_or_print(a.output.as_deref(), &out)?;
    Ok(code)
}

fn default_tolerance(t: &Tessellation) -> f64 {
    1e-7 * t
        .ordinary_bounding_box()
        .map(|r| r.diagonal())
        .unwrap_or(1.0)
        .max(f64::MIN_POSITIVE)
}

fn cmd_check(a: CheckArgs) -> CmdResult {
    let t = load_tessellation(&a.input)?;
    let tol = match a.tolerance {
        Some(x) if x >= 0.0 && x.is_finite() => x,
        Some(x) => {
            return Err(Failure::usage(format!(
                "--tolerance must be nonnegative, got {x}"
            )))
        }
        None => default_tolerance(&t),
    };
    match recognize_voronoi(&t, tol) {
        Ok(v) => {
            println!("is_voronoi: {}", v.is_voronoi);
            println!("tolerance: {}", format_real(tol));
            if !v.planar {
                println!("reason: edges cross; the drawing is not a planar subdivision");
                return Ok(EXIT_NOT_VORONOI);
            }
            println!("polygons: {}", v.polygons.len());
            let max = v.per_polygon_spread.iter().copied().fold(0.0, f64::max);
            println!("max_spread: {}", format_real(max));
            if !v.failing_polygons.is_empty() {
                let list: Vec<String> = v.failing_polygons.iter().map(|i| i.to_string()).collect();
                println!("failing_polygons: {}", list.join(" "));
            }
            if !v.nonconvex_polygons.is_empty() {
                let list: Vec<String> =
                    v.nonconvex_polygons.iter().map(|i| i.to_string()).collect();
                println!("nonconvex_polygons: {}", list.join(" "));
            }
            Ok(if v.is_voronoi { 0 } else { EXIT_NOT_VORONOI })
        }
        Err(InvertError::DegenerateVertex(vs)) => Err(Failure::usage(format!(
            "DegenerateVertex: vertices without exactly three edges: {vs:?}"
        ))),
        Err(e) => Err(Failure::usage(format!("{}: {e}", a.input.display()))),
    }
}

struct NoisePlan {
    sigmas: Vec<f64>,
    seeds: Vec<u64>,
    methods: Vec<Method>,
    opts: SweepOptions,
}

fn noise_plan(n: &NoiseArgs, diagonal: f64) -> Result<NoisePlan, Failure> {
    check_epsilon(n.epsilon)?;
    let mut sigmas = parse_list(&n.sigma, "--sigma")?;
    if n.relative {
        sigmas.iter_mut().for_each(|s| *s *= diagonal);
    }
    if let Some(r) = n.match_radius {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Failure::usage("--match-radius must be positive"));
        }
    }
    Ok(NoisePlan {
        sigmas,
        seeds: parse_seeds(n.seeds.as_deref(), n.seed)?,
        methods: methods_of(&n.methods)?,
        opts: SweepOptions {
            invert: InvertOptions { epsilon: n.epsilon },
            match_radius: n.match_radius,
        },
    })
}

fn harness_failure(e: HarnessError) -> Failure {
    Failure::usage(e.to_string())
}

fn report_sweep(rows: &[vorinv::harness::ErrorReport], output: Option<&Path>) -> CmdResult {
    write_or_print(output, &sweep_csv(rows))?;
    eprint!("{}", format_median_table(&median_table(rows)));
    let exact_failed = rows.iter().any(|r| r.sigma == 0.0 && !r.is_ok());
    Ok(if exact_failed { EXIT_INVERSION } else { 0 })
}

fn cmd_roundtrip(a: RoundtripArgs) -> CmdResult {
    let t = load_tessellation(&a.input)?;
    let truth = a.generators.as_deref().map(load_generators).transpose()?;
    let base = SweepBase::from_tessellation(t, truth.as_ref().map(|g| g.points()))
        .map_err(harness_failure)?;
    let diagonal = truth
        .as_ref()
        .map(|g| g.bounds().diagonal())
        .unwrap_or(base.bounds.diagonal());
    let mut base = base;
    if let Some(g) = &truth {
        base.bounds = g.bounds().union(&base.bounds);
    }
    let plan = noise_plan(&a.noise, diagonal)?;
    let rows = sweep(&base, &plan.sigmas, &plan.seeds, &plan.methods, &plan.opts)
        .map_err(harness_failure)?;
    report_sweep(&rows, a.noise.output.as_deref())
}

fn cmd_sweep(a: SweepArgs) -> CmdResult {
    let g = load_generators(&a.input)?;
    let plan = noise_plan(&a.noise, g.bounds().diagonal())?;
    if a.outlier {
        if !(a.outlier_fraction > 0.0 && a.outlier_fraction.is_finite()) {
            return Err(Failure::usage("--outlier-fraction must be positive"));
        }
        let mut reports = Vec::new();
        for &seed in &plan.seeds {
            reports.extend(
                outlier_study(
                    &g,
                    seed,
                    a.outlier_fraction,
                    &plan.methods,
                    &plan.opts.invert,
                )
                .map_err(harness_failure)?,
            );
        }
        write_or_print(a.noise.output.as_deref(), &outlier_csv(&reports))?;
        return Ok(0);
    }
    let d = vorinv::forward::build_voronoi(&g).map_err(|e| Failure::usage(e.to_string()))?;
    let base = SweepBase::from_diagram(&d);
    let rows = sweep(&base, &plan.sigmas, &plan.seeds, &plan.methods, &plan.opts)
        .map_err(harness_failure)?;
    report_sweep(&rows, a.noise.output.as_deref())
}

fn load_estimates(path: &Path) -> Result<Vec<Point2>, Failure> {
    let text = read(path)?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    if !header.starts_with("polygon,x,y") {
        return Err(Failure::usage(format!(
            "{}: not an estimate CSV",
            path.display()
        )));
    }
    let mut out = Vec::new();
    for (k, line) in lines.enumerate() {
        let f: Vec<&str> = line.split(',').collect();
        let (Some(x), Some(y)) = (f.get(1), f.get(2)) else {
            return Err(Failure::usage(format!(
                "{}:{}: missing fields",
                path.display(),
                k + 2
            )));
        };
        let p = x
            .parse::<f64>()
            .and_then(|x| y.parse::<f64>().map(|y| Point2::new(x, y)))
            .map_err(|_| {
                Failure::usage(format!("{}:{}: bad coordinates", path.display(), k + 2))
            })?;
        out.push(p);
    }
    Ok(out)
}

fn cmd_render(a: RenderArgs) -> CmdResult {
    let t = load_tessellation(&a.input)?;
    let gens = a.generators.as_deref().map(load_generators).transpose()?;
    let ests = a.estimates.as_deref().map(load_estimates).transpose()?;
    let mut overlay = svg::Overlay {
        generators: gens.as_ref().map(|g| g.points()),
        estimates: ests.as_deref(),
        circles: Vec::new(),
    };
    if a.circles {
        let sites: Vec<Point2> = match (&gens, &ests) {
            (Some(g), _) => g.points().to_vec(),
            (None, Some(e)) => e.clone(),
            (None, None) => invert(&t, Method::AlgIII, &InvertOptions::default())
                .map(|e| e.positions)
                .unwrap_or_default(),
        };
        overlay.circles = svg::empty_circles(&t, &sites);
        if overlay.circles.is_empty() {
            eprintln!("no generator positions available; circles omitted");
        }
    }
    write_or_print(a.output.as_deref(), &svg::render(&t, &overlay))?;
    Ok(0)
}

fn cmd_grid(a: GridArgs) -> CmdResult {
    let g = load_generators(&a.input)?;
    let grid = grid_growth_labels(&g, a.resolution).map_err(|e| Failure::usage(e.to_string()))?;
    write_or_print(a.output.as_deref(), &format_label_grid(&grid))?;
    Ok(0)
}

/// Moves `--config <path>` out of `args` and splices its `key = value` pairs in
/// right after the subcommand, so later command-line flags override them.
fn apply_config(args: Vec<String>) -> Result<Vec<String>, Failure> {
    let mut rest = Vec::with_capacity(args.len());
    let mut config = None;
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            config = Some(
                it.next()
                    .ok_or_else(|| Failure::usage("--config needs a path"))?,
            );
        } else if let Some(p) = a.strip_prefix("--config=") {
            config = Some(p.to_string());
        } else {
            rest.push(a);
        }
    }
    let Some(path) = config else { return Ok(rest) };
    let text = read(Path::new(&path))?;
    let mut injected = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Failure::usage(format!("{path}:{}: expected key = value", i + 1)))?;
        let key = key.trim().replace('_', "-");
        let value = value.trim().trim_matches('"');
        match value {
            "true" => injected.push(format!("--{key}")),
            "false" => {}
            v => {
                injected.push(format!("--{key}"));
                injected.push(v.to_string());
            }
        }
    }
    let pos = rest
        .iter()
        .skip(1)
        .position(|a| !a.starts_with('-'))
        .map(|p| p + 2)
        .unwrap_or(rest.len());
    rest.splice(pos..pos, injected);
    Ok(rest)
}

fn main() -> ExitCode {
    let args = match apply_config(std::env::args().collect()) {
        Ok(a) => a,
        Err(f) => {
            eprintln!("error: {}", f.message);
            return ExitCode::from(f.code);
        }
    };
    let cli = Cli::try_parse_from(args).unwrap_or_else(|e| e.exit());
    let result = match cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Invert(a) => cmd_invert(a),
        Command::Check(a) => cmd_check(a),
        Command::Roundtrip(a) => cmd_roundtrip(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Render(a) => cmd_render(a),
        Command::Grid(a) => cmd_grid(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_count_or_list() {
        assert_eq!(parse_seeds(None, 7).unwrap(), vec![7]);
        assert_eq!(parse_seeds(Some("3"), 10).unwrap(), vec![10, 11, 12]);
        assert_eq!(parse_seeds(Some("5,2"), 0).unwrap(), vec![5, 2]);
        assert!(parse_seeds(Some("0"), 0).is_err());
        assert!(parse_seeds(Some("x"), 0).is_err());
    }

    #[test]
    fn bounds_parsing() {
        assert_eq!(
            parse_bounds("0,0,2,1").unwrap(),
            Rect::new(0.0, 0.0, 2.0, 1.0)
        );
        assert!(parse_bounds("1,0,0,1").is_err());
        assert!(parse_bounds("0,0,1").is_err());
    }

    #[test]
    fn config_goes_after_subcommand() {
        let dir = std::env::temp_dir().join(format!("vorinv-cfg-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let cfg = dir.join("run.cfg");
        fs::write(
            &cfg,
            "# defaults\nmethod = alg2\ncircles = true\nrelative = false\n",
        )
        .unwrap();
        let args: Vec<String> = [
            "vorinv",
            "--config",
            cfg.to_str().unwrap(),
            "invert",
            "x.tess",
            "--method",
            "alg1",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        let out = apply_config(args).unwrap();
        assert_eq!(
            out,
            [
                "vorinv",
                "invert",
                "--method",
                "alg2",
                "--circles",
                "x.tess",
                "--method",
                "alg1"
            ]
        );
        fs::remove_dir_all(dir).unwrap();
    }
}
