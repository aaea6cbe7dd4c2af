use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use coarsekit::cover::{
    coarseness_profile, finite_family_diagnostics, lebesgue_number, local_lebesgue, max_multiplicity, mesh,
    multiplicity, FiniteFamilyDiagnostics,
};
use coarsekit::dimension::asdim::{asdim_at_scale, asdim_zero_witness, dimension_report};
use coarsekit::dimension::higher::{higher_lebesgue, Mode};
use coarsekit::dimension::sperner::{sperner_bound, Triangulation};
use coarsekit::generators::{generate, GeneratorSpec};
use coarsekit::io::{read_family, read_json, read_space, read_text, to_json, write_text};
use coarsekit::maps::{
    classify_map, distance_transfers, domination_check, lebesgue_transfer_bounds, map_closeness,
    no_extension_certificate, zero_dim_retraction, ChainData, MapSpec, PointMap,
};
use coarsekit::pou::{
    canonical_pou, carriers, equi_oscillation_radius, l1_label_bound_violations, pou_lebesgue_bound, pou_oscillation,
    PartitionOfUnity,
};
use coarsekit::profile::{fmt_real, ProfileEntry};
use coarsekit::refine::{
    annulus_paste, bounded_annulus_refine, gromov_disjointify, inward_shrink, ostrand_split, paracompact_shrink,
    squared_annuli, subset_cover_extension, union_merge, RefinementCertificate,
};
use coarsekit::{Error, FiniteMetricSpace, IndexedFamily, Result, ScaleProfile, Subset};

#[derive(Parser)]
#[command(name = "coarsekit", version, about = "Scale-dependent coarse geometry of finite metric spaces")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Space JSON, used when a verb's positional space is omitted.
    #[arg(long, global = true)]
    space: Option<PathBuf>,
    /// Cover JSON, used when a verb's positional cover is omitted.
    #[arg(long, global = true)]
    cover: Option<PathBuf>,
    /// Output file for the main JSON result (stdout when absent).
    #[arg(long, short = 'o', global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Largest subset handed to the exact searches.
    #[arg(long, global = true, default_value_t = coarsekit::dimension::DEFAULT_EXACT_LIMIT)]
    exact_limit: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a reference space from a generator spec (JSON file or inline JSON).
    Gen {
        spec: String,
        #[arg(long)]
        space_out: Option<PathBuf>,
        #[arg(long)]
        cover_out: Option<PathBuf>,
        #[arg(long)]
        pou_out: Option<PathBuf>,
    },
    /// Lebesgue numbers, multiplicity, mesh and coarseness of a cover.
    Analyze {
        space: Option<PathBuf>,
        cover: Option<PathBuf>,
        /// Write the coarseness profile as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Refine or shrink a cover.
    Refine {
        space: Option<PathBuf>,
        cover: Option<PathBuf>,
        #[arg(long, value_enum)]
        method: Method,
        #[arg(long)]
        certificate: Option<PathBuf>,
        /// Scale `M` (gromov, merge).
        #[arg(long)]
        m: Option<f64>,
        /// Separation `N` (gromov).
        #[arg(long)]
        n: Option<f64>,
        /// Keep the bounded residual piece (bounded).
        #[arg(long)]
        residual: bool,
        /// Comma-separated radii (paracompact probes, extend radii, paste scales).
        #[arg(long, value_delimiter = ',')]
        scales: Vec<f64>,
        /// Comma-separated point indices of the subset `A` (extend, merge).
        #[arg(long, value_delimiter = ',')]
        subset: Vec<usize>,
        /// Comma-separated point indices of `B` (merge).
        #[arg(long, value_delimiter = ',')]
        other: Vec<usize>,
        /// Further cover files (merge: the cover of B; paste: the covers 𝒰^k).
        #[arg(long = "with")]
        with: Vec<PathBuf>,
    },
    /// Canonical partition of unity and oscillation diagnostics.
    Pou {
        space: Option<PathBuf>,
        cover: Option<PathBuf>,
        /// Analyse this partition of unity instead of the canonical one.
        #[arg(long)]
        pou: Option<PathBuf>,
        #[arg(long)]
        osc: Option<f64>,
        #[arg(long, num_args = 2, value_names = ["M", "EPS"])]
        equi: Option<Vec<f64>>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Higher Lebesgue numbers and dimension at scale.
    Dim {
        space: Option<PathBuf>,
        cover: Option<PathBuf>,
        #[arg(long, value_enum)]
        mode: DimMode,
        #[arg(long, default_value_t = 0)]
        n: usize,
        #[arg(long)]
        m: Option<f64>,
        #[arg(long)]
        mesh: Option<f64>,
        /// Scales for `dM`.
        #[arg(long, value_delimiter = ',')]
        scales: Vec<f64>,
        /// Mesh bound as a multiple of `M` for `dM`.
        #[arg(long, default_value_t = 4.0)]
        factor: f64,
        /// Restrict `Ln` to these point indices.
        #[arg(long, value_delimiter = ',')]
        subset: Vec<usize>,
        /// Greedy search without a size limit (`Ln`).
        #[arg(long)]
        heuristic: bool,
        /// Subdivision parameter for `sperner`.
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, value_enum, default_value_t = Grid::Equilateral)]
        grid: Grid,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Coarse maps between finite spaces.
    Map {
        f: Option<PathBuf>,
        #[arg(long)]
        classify: bool,
        /// Radius for the slow-oscillation profile.
        #[arg(long, default_value_t = 1.0)]
        osc_radius: f64,
        #[arg(long)]
        transfers: bool,
        #[arg(long)]
        close: Option<PathBuf>,
        #[arg(long)]
        dominate: Option<PathBuf>,
        /// Comma-separated indices of the subset to retract onto.
        #[arg(long, value_delimiter = ',')]
        retract: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',')]
        scales: Vec<f64>,
        /// Chain JSON `{chains, values}` for the no-extension test.
        #[arg(long)]
        noext: Option<PathBuf>,
        #[arg(long)]
        m: Option<f64>,
        #[arg(long)]
        k: Option<f64>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Export a profile (CSV, or a profile inside a JSON report) as CSV or SVG.
    Export {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// JSON pointer to the profile inside a report, e.g. `/coarseness`.
        #[arg(long)]
        field: Option<String>,
        #[arg(long, default_value = "profile")]
        title: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Ostrand,
    Annuli,
    Bounded,
    Paracompact,
    Inward,
    Gromov,
    Extend,
    Merge,
    Paste,
}

#[derive(Clone, Copy, ValueEnum)]
enum DimMode {
    #[value(name = "Ln")]
    Ln,
    #[value(name = "asdim")]
    Asdim,
    #[value(name = "zero")]
    Zero,
    #[value(name = "sperner")]
    Sperner,
    #[value(name = "dM")]
    DM,
}

#[derive(Clone, Copy, ValueEnum)]
enum Grid {
    Equilateral,
    Square,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Svg,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn missing(what: &str) -> Error {
    Error::Parameter(format!("missing {what}"))
}

struct Ctx {
    global: Global,
}

impl Ctx {
    fn space(&self, positional: Option<PathBuf>) -> Result<FiniteMetricSpace> {
        let path = positional.or(self.global.space.clone()).ok_or_else(|| missing("space file"))?;
        read_space(&path)
    }

    fn cover(&self, positional: Option<PathBuf>, space: &FiniteMetricSpace) -> Result<IndexedFamily> {
        let path = positional.or(self.global.cover.clone()).ok_or_else(|| missing("cover file"))?;
        read_family(&path, space)
    }

    fn emit<T: Serialize>(&self, value: &T) -> Result<()> {
        let text = to_json(value)?;
        match &self.global.out {
            Some(path) => write_text(path, &text),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_text(path, &to_json(value)?)
}

fn indices(space: &FiniteMetricSpace, list: &[usize]) -> Result<Subset> {
    space.subset(list.iter().copied())
}

fn run(cli: Cli) -> Result<()> {
    let ctx = Ctx { global: cli.global };
    match cli.command {
        Command::Gen { spec, space_out, cover_out, pou_out } => gen(&ctx, &spec, space_out, cover_out, pou_out),
        Command::Analyze { space, cover, csv } => analyze(&ctx, space, cover, csv),
        Command::Refine { space, cover, method, certificate, m, n, residual, scales, subset, other, with } => {
            let x = ctx.space(space)?;
            let u = ctx.cover(cover, &x)?;
            let opts = RefineOpts { m, n, residual, scales, subset, other, with };
            let (family, cert) = refine(&x, &u, method, &opts)?;
            ctx.emit(&family)?;
            if let Some(path) = certificate {
                write_json(&path, &cert)?;
            }
            cert.into_verified().map(|_| ())
        }
        Command::Pou { space, cover, pou, osc, equi, csv } => pou_cmd(&ctx, space, cover, pou, osc, equi, csv),
        Command::Dim { space, cover, mode, n, m, mesh, scales, factor, subset, heuristic, k, grid, csv } => {
            let opts = DimOpts { n, m, mesh, scales, factor, subset, heuristic, k, grid, csv };
            dim(&ctx, space, cover, mode, opts)
        }
        Command::Map { f, classify, osc_radius, transfers, close, dominate, retract, scales, noext, m, k, csv } => {
            let opts = MapOpts { classify, osc_radius, transfers, close, dominate, retract, scales, noext, m, k, csv };
            map_cmd(&ctx, f, opts)
        }
        Command::Export { input, format, field, title } => export(&ctx, &input, format, field.as_deref(), &title),
    }
}

fn gen(
    ctx: &Ctx,
    spec: &str,
    space_out: Option<PathBuf>,
    cover_out: Option<PathBuf>,
    pou_out: Option<PathBuf>,
) -> Result<()> {
    let text = if spec.trim_start().starts_with('{') { spec.to_string() } else { read_text(Path::new(spec))? };
    let spec: GeneratorSpec = serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
    let g = generate(&spec, ctx.global.seed)?;
    if let Some(path) = space_out {
        write_json(&path, &g.space_spec)?;
    }
    if let Some(path) = cover_out {
        write_json(&path, g.family.as_ref().ok_or_else(|| missing("cover for this generator"))?)?;
    }
    if let Some(path) = pou_out {
        write_json(&path, g.pou.as_ref().ok_or_else(|| missing("partition of unity for this generator"))?)?;
    }
    ctx.emit(&g)
}

#[derive(Serialize)]
struct SpaceSummary {
    id: String,
    points: usize,
    basepoint: usize,
    diameter: f64,
    min_positive_distance: Option<f64>,
}

#[derive(Serialize)]
struct CoverAnalysis {
    space: SpaceSummary,
    #[serde(with = "coarsekit::ext::real")]
    lebesgue: f64,
    #[serde(with = "coarsekit::ext::reals")]
    local_lebesgue: Vec<f64>,
    multiplicity: Vec<usize>,
    max_multiplicity: usize,
    #[serde(with = "coarsekit::ext::real")]
    mesh: f64,
    covers: bool,
    coarseness: ScaleProfile,
    coarseness_nondecreasing: bool,
    diagnostics: FiniteFamilyDiagnostics,
}

fn summary(x: &FiniteMetricSpace) -> SpaceSummary {
    SpaceSummary {
        id: x.fingerprint(),
        points: x.len(),
        basepoint: x.basepoint(),
        diameter: x.diam(),
        min_positive_distance: x.min_positive_distance(),
    }
}

fn write_csv(path: Option<&PathBuf>, p: &ScaleProfile) -> Result<()> {
    match path {
        Some(path) => write_text(path, &p.to_csv()),
        None => Ok(()),
    }
}

fn analyze(ctx: &Ctx, space: Option<PathBuf>, cover: Option<PathBuf>, csv: Option<PathBuf>) -> Result<()> {
    let x = ctx.space(space)?;
    if cover.is_none() && ctx.global.cover.is_none() {
        return ctx.emit(&summary(&x));
    }
    let u = ctx.cover(cover, &x)?;
    let coarseness = coarseness_profile(&x, &u);
    write_csv(csv.as_ref(), &coarseness)?;
    ctx.emit(&CoverAnalysis {
        space: summary(&x),
        lebesgue: lebesgue_number(&x, &u, &x.all()),
        local_lebesgue: local_lebesgue(&x, &u),
        multiplicity: multiplicity(&u),
        max_multiplicity: max_multiplicity(&u),
        mesh: mesh(&x, &u),
        covers: u.is_cover(),
        coarseness_nondecreasing: coarseness.is_nondecreasing(),
        coarseness,
        diagnostics: finite_family_diagnostics(&x, &u),
    })
}

struct RefineOpts {
    m: Option<f64>,
    n: Option<f64>,
    residual: bool,
    scales: Vec<f64>,
    subset: Vec<usize>,
    other: Vec<usize>,
    with: Vec<PathBuf>,
}

fn refine(
    x: &FiniteMetricSpace,
    u: &IndexedFamily,
    method: Method,
    o: &RefineOpts,
) -> Result<(IndexedFamily, RefinementCertificate)> {
    let scales = (!o.scales.is_empty()).then_some(o.scales.as_slice());
    Ok(match method {
        Method::Ostrand => {
            let s = ostrand_split(x, u);
            (s.combined, s.certificate)
        }
        Method::Annuli => squared_annuli(x),
        Method::Bounded => bounded_annulus_refine(x, u, o.residual)?,
        Method::Paracompact => {
            let s = paracompact_shrink(x, u, scales)?;
            (s.family, s.certificate)
        }
        Method::Inward => inward_shrink(x, u)?,
        Method::Gromov => {
            let d = gromov_disjointify(x, u, o.m.ok_or_else(|| missing("--m"))?, o.n.ok_or_else(|| missing("--n"))?)?;
            (d.combined, d.certificate)
        }
        Method::Extend => subset_cover_extension(x, &indices(x, &o.subset)?, u, scales)?,
        Method::Merge => {
            let path = o.with.first().ok_or_else(|| missing("--with <cover of B>"))?;
            let u_b = read_family(path, x)?;
            let a = indices(x, &o.subset)?;
            let b = indices(x, &o.other)?;
            union_merge(x, &a, u, &b, &u_b, o.m.ok_or_else(|| missing("--m"))?)?
        }
        Method::Paste => {
            let covers = o.with.iter().map(|p| read_family(p, x)).collect::<Result<Vec<_>>>()?;
            let p = annulus_paste(x, u, &covers, &o.scales)?;
            (p.family, p.certificate)
        }
    })
}

#[derive(Serialize)]
struct PouReport {
    pou: PartitionOfUnity,
    excluded: Vec<usize>,
    carrier_multiplicity: usize,
    carrier_coarseness: ScaleProfile,
    #[serde(skip_serializing_if = "Option::is_none")]
    oscillation: Option<OscillationSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    equi_oscillation: Option<EquiSummary>,
}

#[derive(Serialize)]
struct OscillationSummary {
    m: f64,
    profile: ScaleProfile,
    l1_bound_violations: Vec<usize>,
    lebesgue_bound: coarsekit::pou::LebesgueBoundReport,
}

#[derive(Serialize)]
struct EquiSummary {
    m: f64,
    eps: f64,
    #[serde(with = "coarsekit::ext::real")]
    radius: f64,
}

fn pou_cmd(
    ctx: &Ctx,
    space: Option<PathBuf>,
    cover: Option<PathBuf>,
    pou: Option<PathBuf>,
    osc: Option<f64>,
    equi: Option<Vec<f64>>,
    csv: Option<PathBuf>,
) -> Result<()> {
    let x = ctx.space(space)?;
    let (pou, excluded) = match pou {
        Some(path) => (read_json::<PartitionOfUnity>(&path)?.attach(&x)?, Vec::new()),
        None => {
            let c = canonical_pou(&x, &ctx.cover(cover, &x)?)?;
            (c.pou, c.excluded)
        }
    };
    let carrier = carriers(&x, &pou);
    let oscillation = osc.map(|m| OscillationSummary {
        m,
        profile: pou_oscillation(&x, &pou, m).profile,
        l1_bound_violations: l1_label_bound_violations(&x, &pou, m),
        lebesgue_bound: pou_lebesgue_bound(&x, &pou, m),
    });
    if let Some(o) = &oscillation {
        write_csv(csv.as_ref(), &o.profile)?;
    }
    let equi_oscillation =
        equi.map(|v| EquiSummary { m: v[0], eps: v[1], radius: equi_oscillation_radius(&x, &pou, v[0], v[1]) });
    ctx.emit(&PouReport {
        pou,
        excluded,
        carrier_multiplicity: carrier.multiplicity,
        carrier_coarseness: carrier.profile,
        oscillation,
        equi_oscillation,
    })
}

struct DimOpts {
    n: usize,
    m: Option<f64>,
    mesh: Option<f64>,
    scales: Vec<f64>,
    factor: f64,
    subset: Vec<usize>,
    heuristic: bool,
    k: usize,
    grid: Grid,
    csv: Option<PathBuf>,
}

fn dim(ctx: &Ctx, space: Option<PathBuf>, cover: Option<PathBuf>, mode: DimMode, o: DimOpts) -> Result<()> {
    let limit = ctx.global.exact_limit;
    if let DimMode::Sperner = mode {
        let tri = match o.grid {
            Grid::Equilateral => Triangulation::equilateral(o.k)?,
            Grid::Square => Triangulation::square_grid(o.k)?,
        };
        let cert = sperner_bound(&tri, limit)?;
        ctx.emit(&cert)?;
        if !cert.holds {
            return Err(Error::Certificate(format!("L1 = {} exceeds the mesh {}", fmt_real(cert.l1.value), cert.mesh)));
        }
        return Ok(());
    }
    let x = ctx.space(space)?;
    let m = || o.m.ok_or_else(|| missing("--m"));
    match mode {
        DimMode::Ln => {
            let u = ctx.cover(cover, &x)?;
            let a = if o.subset.is_empty() { x.all() } else { indices(&x, &o.subset)? };
            let mode = if o.heuristic { Mode::Heuristic } else { Mode::Exact { limit } };
            ctx.emit(&higher_lebesgue(&x, &u, &a, o.n, mode)?)
        }
        DimMode::Asdim => {
            let m = m()?;
            let r = asdim_at_scale(&x, m, o.n, o.mesh.ok_or_else(|| missing("--mesh"))?, limit);
            ctx.emit(&r)
        }
        DimMode::Zero => {
            let w = asdim_zero_witness(&x, m()?);
            if let Some(w) = &w {
                write_csv(o.csv.as_ref(), &w.diameter_profile()?)?;
            }
            ctx.emit(&w)
        }
        DimMode::DM => {
            if o.scales.is_empty() {
                return Err(missing("--scales"));
            }
            let report = dimension_report(&x, &o.scales, o.factor, limit);
            let rows = report.rows.iter().map(|r| (r.m, r.d.map_or(f64::INFINITY, |d| d as f64))).collect();
            write_csv(o.csv.as_ref(), &ScaleProfile::new(rows)?)?;
            ctx.emit(&report)
        }
        DimMode::Sperner => unreachable!(),
    }
}

struct MapOpts {
    classify: bool,
    osc_radius: f64,
    transfers: bool,
    close: Option<PathBuf>,
    dominate: Option<PathBuf>,
    retract: Option<Vec<usize>>,
    scales: Vec<f64>,
    noext: Option<PathBuf>,
    m: Option<f64>,
    k: Option<f64>,
    csv: Option<PathBuf>,
}

#[derive(Serialize)]
struct TransferReport {
    forward: ScaleProfile,
    reverse: ScaleProfile,
    lebesgue: coarsekit::maps::TransferBounds,
}

#[derive(serde::Deserialize)]
struct ChainFile {
    chains: Vec<Vec<usize>>,
    values: Vec<(f64, f64)>,
}

fn read_map(path: &Path) -> Result<PointMap> {
    PointMap::from_spec(&read_json::<MapSpec>(path)?)
}

fn map_cmd(ctx: &Ctx, f: Option<PathBuf>, o: MapOpts) -> Result<()> {
    let f = f.as_deref().map(read_map).transpose()?;
    let need_f = || f.as_ref().ok_or_else(|| missing("map file"));
    if o.classify {
        let c = classify_map(need_f()?, o.osc_radius);
        write_csv(o.csv.as_ref(), &c.coarse)?;
        return ctx.emit(&c);
    }
    if o.transfers {
        let f = need_f()?;
        let (forward, reverse) = distance_transfers(f);
        write_csv(o.csv.as_ref(), &forward)?;
        return ctx.emit(&TransferReport { forward, reverse, lebesgue: lebesgue_transfer_bounds(f, None)? });
    }
    if let Some(g) = &o.close {
        return ctx.emit(&map_closeness(need_f()?, &read_map(g)?)?);
    }
    if let Some(g) = &o.dominate {
        let d = domination_check(need_f()?, &read_map(g)?)?;
        ctx.emit(&d)?;
        if !d.inequality_holds {
            return Err(Error::Certificate(format!("domination inequality fails at {:?}", d.inequality_witness)));
        }
        return Ok(());
    }
    let space = || match &f {
        Some(f) => Ok(f.source().clone()),
        None => ctx.space(None),
    };
    if let Some(a) = &o.retract {
        let x = space()?;
        let r = zero_dim_retraction(&x, &indices(&x, a)?, &o.scales)?;
        ctx.emit(&r)?;
        return r.certificate.into_verified().map(|_| ());
    }
    if let Some(path) = &o.noext {
        let x = space()?;
        let data: ChainFile = read_json(path)?;
        let chains = ChainData { chains: data.chains };
        let r = no_extension_certificate(
            &x,
            &chains,
            &data.values,
            o.m.ok_or_else(|| missing("--m"))?,
            o.k.ok_or_else(|| missing("--k"))?,
        )?;
        return ctx.emit(&r);
    }
    Err(Error::Parameter("choose one of --classify, --transfers, --close, --dominate, --retract, --noext".into()))
}

fn export(ctx: &Ctx, input: &Path, format: Format, field: Option<&str>, title: &str) -> Result<()> {
    let text = read_text(input)?;
    let profile = if text.starts_with("t,value") {
        ScaleProfile::from_csv(&text)?
    } else {
        let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
        let target = match field {
            Some(ptr) => value.pointer(ptr).ok_or_else(|| Error::Parse(format!("no field at {ptr}")))?,
            None => &value,
        };
        let entries: Vec<ProfileEntry> = serde_json::from_value(target.get("entries").cloned().unwrap_or_default())
            .map_err(|e| Error::Parse(format!("not a profile: {e}")))?;
        ScaleProfile::new(entries.into_iter().map(|e| (e.t, e.v)).collect())?
    };
    let out = match format {
        Format::Csv => profile.to_csv(),
        Format::Svg => profile.to_svg(title),
    };
    match &ctx.global.out {
        Some(path) => write_text(path, &out),
        None => {
            print!("{out}");
            Ok(())
        }
    }
}
