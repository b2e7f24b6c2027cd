//! Commands behind the `sidla` binary. Every command is a function of its
//! configuration and seed; replica `i` uses seed `seed + i`.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use stretch_idla::analysis::{
    chi_square_compare, flank_bound_test, flanks, histogram, ks_test_exp1, level_profile, sweep_shell_identity,
    tail_height_estimate, ChiSquareResult, FlankBoundReport, Height, ShellSweep, SurvivalPoint, TestResult,
};
use stretch_idla::coupling::{verify_coupling, CouplingOptions};
use stretch_idla::io::{event_log_csv, format_real, forest_snapshot, gaps_csv, state_snapshot, ReportJson};
use stretch_idla::render::{render_svg, RenderOptions};
use stretch_idla::sidla::{run_jump, run_until_covered};
use stretch_idla::{build_forest, Error, ForestView, Vertex, WeightField, WeightProfile, Window};

/// Failure classes, each with its own exit code.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Verification(String),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Verification(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Verification(m) => write!(f, "verification failed: {m}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidWindow { .. }
            | Error::InvalidVertex { .. }
            | Error::InvalidParameter(_)
            | Error::EnumerationGuard(_)
            | Error::HorizonTooSmall { .. }
            | Error::ScalarRange { .. }
            | Error::NotCovered { .. }
            | Error::Parse(_) => CliError::Config(e.to_string()),
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Internal(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub seed: u64,
    pub window: Window,
    pub profile: WeightProfile,
    pub replicas: u32,
    pub out: PathBuf,
}

impl RunConfig {
    pub fn new(seed: u64, width: u32, height: u32, profile: WeightProfile, replicas: u32, out: PathBuf) -> CliResult<Self> {
        let window = Window::new(width, height)?;
        if replicas == 0 {
            return Err(CliError::Config("replicas must be at least 1".into()));
        }
        Ok(Self { seed, window, profile, replicas, out })
    }

    pub fn seeds(&self) -> impl IndexedParallelIterator<Item = u64> + '_ {
        (0..self.replicas).into_par_iter().map(move |i| self.seed.wrapping_add(i as u64))
    }

    fn tag(&self) -> String {
        format!("w{}_m{}", self.window.width(), self.window.height())
    }

    fn batch_tag(&self) -> String {
        format!("{}_{}_seed{}_x{}", self.profile, self.tag(), self.seed, self.replicas)
    }
}

/// Writes through a temporary file in the target directory and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> CliResult<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.persist(path).map_err(|e| CliError::Internal(e.to_string()))?;
    Ok(())
}

pub fn cmd_fpp(cfg: &RunConfig) -> CliResult<Vec<String>> {
    cfg.seeds()
        .map(|seed| {
            let forest = build_forest::<f64>(&WeightField::new(seed, cfg.profile, cfg.window))?;
            let path = cfg.out.join(format!("fpp_{}_{}_seed{seed}.json", cfg.profile, cfg.tag()));
            write_atomic(&path, &forest_snapshot(&forest))?;
            Ok(format!(
                "fpp seed={seed} vertices={} max_dist={} censored={} -> {}",
                cfg.window.interior_count(),
                format_real(forest.max_dist()),
                forest.censored_roots().len(),
                path.display()
            ))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineChoice {
    Jump,
    Rings,
}

pub fn cmd_sidla(cfg: &RunConfig, engine: EngineChoice) -> CliResult<Vec<String>> {
    if cfg.profile != WeightProfile::Stretch {
        return Err(CliError::Config("the particle system has stretch rates only".into()));
    }
    cfg.seeds()
        .map(|seed| {
            let state = match engine {
                EngineChoice::Jump => run_jump::<f64>(cfg.window, seed),
                EngineChoice::Rings => run_until_covered::<f64>(cfg.window, seed)?,
            };
            let stem = format!("sidla_{}_seed{seed}", cfg.tag());
            write_atomic(&cfg.out.join(format!("{stem}.json")), &state_snapshot(&state, seed))?;
            write_atomic(&cfg.out.join(format!("{stem}_events.csv")), &event_log_csv(&state))?;
            let level1: usize = cfg.window.sites().map(|r| level_profile(&state, r, 1)).sum();
            Ok(format!(
                "sidla seed={seed} engine={} rings={} level1_total={level1} censored={} clock={}",
                match engine {
                    EngineChoice::Jump => "jump",
                    EngineChoice::Rings => "rings",
                },
                state.rings,
                state.censored().len(),
                format_real(state.clock)
            ))
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct CoupleSummary {
    pub lines: Vec<String>,
    pub all_equal: bool,
    pub pooled: Option<TestResult>,
    pub n_gaps: usize,
}

pub fn cmd_couple(cfg: &RunConfig, opts: &CouplingOptions) -> CliResult<CoupleSummary> {
    if !(opts.horizon_factor >= 1.0) {
        return Err(CliError::Config(format!(
            "horizon factor {} puts the ring horizon below the maximal forest distance; it must be at least 1",
            opts.horizon_factor
        )));
    }
    let runs: Vec<(String, bool, Vec<f64>)> = cfg
        .seeds()
        .map(|seed| {
            let report = verify_coupling::<f64>(seed, cfg.window, &CouplingOptions { profile: cfg.profile, ..*opts })?;
            let stem = format!("couple_{}_{}_seed{seed}", cfg.profile, cfg.tag());
            let json = ReportJson::from_report(&report);
            write_atomic(&cfg.out.join(format!("{stem}_report.json")), &json.to_json())?;
            write_atomic(&cfg.out.join(format!("{stem}_gaps.csv")), &gaps_csv(&report.gaps))?;
            let line = format!(
                "couple seed={seed} forest_equal={} mismatches={} gaps={} ks_stat={} ks_p={} censored={}",
                report.forest_equal,
                report.mismatches,
                json.n_gaps,
                format_real(json.ks_stat),
                format_real(json.ks_p),
                report.censored_count
            );
            Ok((line, report.forest_equal, report.gaps.into_iter().map(|(_, g)| g).collect()))
        })
        .collect::<CliResult<_>>()?;
    let all_equal = runs.iter().all(|r| r.1);
    let pooled_gaps: Vec<f64> = runs.iter().flat_map(|r| r.2.iter().copied()).collect();
    let pooled = ks_test_exp1(&pooled_gaps).ok();
    let mut lines: Vec<String> = runs.into_iter().map(|r| r.0).collect();
    if cfg.replicas > 1 {
        let path = cfg.out.join(format!("couple_{}_pooled.csv", cfg.batch_tag()));
        let mut csv = String::from("replicas,forest_equal_all,n_gaps,ks_stat,ks_p\n");
        let (ks, p) = pooled.map_or((f64::NAN, f64::NAN), |t| (t.statistic, t.p_value));
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            cfg.replicas,
            all_equal,
            pooled_gaps.len(),
            format_real(ks),
            format_real(p)
        ));
        write_atomic(&path, &csv)?;
        lines.push(format!(
            "couple pooled replicas={} forest_equal_all={all_equal} gaps={} ks_stat={} ks_p={}",
            cfg.replicas,
            pooled_gaps.len(),
            format_real(ks),
            format_real(p)
        ));
    }
    Ok(CoupleSummary { lines, all_equal, pooled, n_gaps: pooled_gaps.len() })
}

pub fn cmd_shells(max_edges: usize, out: &Path) -> CliResult<(String, bool)> {
    let sweep = sweep_shell_identity(max_edges)?;
    let line = sweep.to_string();
    write_atomic(&out.join(format!("shells_k{max_edges}.txt")), &format!("{line}\n"))?;
    Ok((line, matches!(sweep, ShellSweep::Pass { .. })))
}

/// Tail and flank statistics for the tree at the origin, one per replica.
#[derive(Debug, Clone)]
pub struct StatsSummary {
    pub survival: Vec<SurvivalPoint>,
    pub flank: Vec<FlankBoundReport>,
    pub level_one: Vec<u64>,
    pub files: Vec<PathBuf>,
}

pub const FLANK_LEVELS: [u32; 3] = [4, 6, 8];
pub const FLANK_KAPPAS: [f64; 2] = [2.0, 4.0];

/// Per-replica observations of the tree at the origin.
#[derive(Debug, Clone)]
struct OriginSample {
    height: Height,
    level_one: usize,
    /// Distance of the left flank at each of `FLANK_LEVELS`, when the slice is nonempty.
    left_flank: Vec<Option<f64>>,
}

fn origin_sample(seed: u64, cfg: &RunConfig) -> CliResult<OriginSample> {
    let forest = build_forest::<f64>(&WeightField::new(seed, cfg.profile, cfg.window))?;
    let tree = forest.extract_tree(Vertex::ORIGIN);
    let left_flank = FLANK_LEVELS
        .iter()
        .map(|&n| match flanks(&forest, Vertex::ORIGIN, n) {
            Ok(info) => Ok(info.left_dist),
            Err(Error::EmptyLevel(_) | Error::LevelOutOfRange { .. }) => Ok(None),
            Err(e) => Err(CliError::from(e)),
        })
        .collect::<CliResult<_>>()?;
    Ok(OriginSample { height: tree.tree_height(), level_one: level_profile(&forest, Vertex::ORIGIN, 1), left_flank })
}

pub fn cmd_stats(cfg: &RunConfig) -> CliResult<StatsSummary> {
    let samples: Vec<OriginSample> = cfg.seeds().map(|s| origin_sample(s, cfg)).collect::<CliResult<_>>()?;
    let heights: Vec<Height> = samples.iter().map(|s| s.height).collect();
    let levels: Vec<u32> = (0..=cfg.window.height()).collect();
    let survival = tail_height_estimate(&heights, &levels);
    let mut flank = Vec::new();
    for (j, &n) in FLANK_LEVELS.iter().enumerate() {
        if n > cfg.window.height() {
            continue;
        }
        let d: Vec<f64> = samples.iter().filter_map(|s| s.left_flank[j]).collect();
        for &kappa in &FLANK_KAPPAS {
            match flank_bound_test(&d, n, kappa) {
                Ok(r) => flank.push(r),
                Err(Error::TooFewSamples { .. }) => {}
                Err(e) => return Err(e.into()),
            }
        }
    }
    let level_one = histogram(samples.iter().map(|s| s.level_one), 2);

    let tag = cfg.batch_tag();
    let mut files = Vec::new();
    let mut csv = String::from("level,survival,lower95,upper95,samples,censored\n");
    let censored = heights.iter().filter(|h| h.is_censored()).count();
    for p in &survival {
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            p.level,
            format_real(p.survival),
            format_real(p.lower),
            format_real(p.upper),
            p.samples,
            censored
        ));
    }
    files.push(cfg.out.join(format!("stats_{tag}_height_survival.csv")));
    write_atomic(files.last().unwrap(), &csv)?;

    let mut csv = String::from("n,kappa,threshold,samples,exceed,frequency,upper99,bound,pass\n");
    for r in &flank {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.n,
            r.kappa,
            r.threshold,
            r.samples,
            r.exceed,
            format_real(r.frequency),
            format_real(r.upper99),
            format_real(r.bound),
            r.pass
        ));
    }
    files.push(cfg.out.join(format!("stats_{tag}_flank.csv")));
    write_atomic(files.last().unwrap(), &csv)?;

    let mut csv = String::from("level1_size,count\n");
    for (k, c) in level_one.iter().enumerate() {
        csv.push_str(&format!("{k},{c}\n"));
    }
    files.push(cfg.out.join(format!("stats_{tag}_level1.csv")));
    write_atomic(files.last().unwrap(), &csv)?;

    Ok(StatsSummary { survival, flank, level_one, files })
}

/// Height bins are `0..=HEIGHT_CLIP`, the last one absorbing taller trees.
pub const HEIGHT_CLIP: usize = 16;
/// Significance level used by `compare`.
pub const COMPARE_ALPHA: f64 = 0.01;

#[derive(Debug, Clone)]
pub struct CompareSummary {
    pub level_one: ChiSquareResult,
    pub height: ChiSquareResult,
    pub path: PathBuf,
}

impl CompareSummary {
    pub fn pass(&self) -> bool {
        self.level_one.p_value > COMPARE_ALPHA && self.height.p_value > COMPARE_ALPHA
    }
}

/// Histograms of `|T^1(0)|` and `min(height(0), 16)` from particle-system
/// runs against FPP forests.
pub fn cmd_compare(cfg: &RunConfig) -> CliResult<CompareSummary> {
    if cfg.profile != WeightProfile::Stretch {
        return Err(CliError::Config("compare needs the stretch profile".into()));
    }
    let pairs: Vec<[(usize, usize); 2]> = cfg
        .seeds()
        .map(|seed| {
            let state = run_jump::<f64>(cfg.window, seed);
            let forest = build_forest::<f64>(&WeightField::new(seed, cfg.profile, cfg.window))?;
            Ok([origin_observation(&state), origin_observation(&forest)])
        })
        .collect::<CliResult<_>>()?;
    let level_one = chi_square_compare(
        &histogram(pairs.iter().map(|p| p[0].0), 2),
        &histogram(pairs.iter().map(|p| p[1].0), 2),
    )?;
    let height = chi_square_compare(
        &histogram(pairs.iter().map(|p| p[0].1), HEIGHT_CLIP),
        &histogram(pairs.iter().map(|p| p[1].1), HEIGHT_CLIP),
    )?;
    let mut csv = String::from("statistic,chi2,dof,p_value,bins,pass\n");
    for (name, r) in [("level1_size", &level_one), ("height_clip16", &height)] {
        csv.push_str(&format!(
            "{name},{},{},{},{},{}\n",
            format_real(r.statistic),
            r.dof,
            format_real(r.p_value),
            r.pooled.len(),
            r.p_value > COMPARE_ALPHA
        ));
    }
    let path = cfg.out.join(format!("compare_{}.csv", cfg.batch_tag()));
    write_atomic(&path, &csv)?;
    Ok(CompareSummary { level_one, height, path })
}

fn origin_observation(view: &impl ForestView<f64>) -> (usize, usize) {
    let height = view.extract_tree(Vertex::ORIGIN).height() as usize;
    (level_profile(view, Vertex::ORIGIN, 1), height.min(HEIGHT_CLIP))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderSource {
    Fpp,
    Sidla,
}

pub fn cmd_render(cfg: &RunConfig, source: RenderSource, opts: &RenderOptions) -> CliResult<Vec<PathBuf>> {
    cfg.seeds()
        .map(|seed| {
            let (svg, name) = match source {
                RenderSource::Fpp => {
                    let forest = build_forest::<f64>(&WeightField::new(seed, cfg.profile, cfg.window))?;
                    (render_svg(&forest, opts)?, format!("render_fpp_{}_{}_seed{seed}.svg", cfg.profile, cfg.tag()))
                }
                RenderSource::Sidla => {
                    let state = run_jump::<f64>(cfg.window, seed);
                    (render_svg(&state, opts)?, format!("render_sidla_{}_seed{seed}.svg", cfg.tag()))
                }
            };
            let path = cfg.out.join(name);
            write_atomic(&path, &svg)?;
            Ok(path)
        })
        .collect()
}
