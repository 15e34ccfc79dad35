//! Builds engine inputs from a [`Config`].

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use quartic_core::bvp::{BcFamily, BoundaryData, ProblemSpec};
use quartic_core::grid::{Grid, GridFunction, GridKind};
use quartic_core::linalg::{diag, CVec};
use quartic_core::operator::{dirichlet_laplacian_modes, make_operator, OperatorHandle};

use crate::config::Config;
use crate::error::CliError;
use crate::io::{load_grid_function, load_matrix};

pub const DEFAULT_NODES: usize = 32;

const FUNCTION_KEYS: [&str; 3] = ["", "_file", "_vector"];

fn function_keys(base: &str) -> impl Iterator<Item = String> + '_ {
    FUNCTION_KEYS.iter().map(move |s| format!("{base}{s}"))
}

/// Rejects unknown sections and keys so that typos do not pass silently.
pub fn validate_keys(cfg: &Config) -> Result<(), CliError> {
    for (section, entries) in &cfg.sections {
        let allowed: Vec<String> = match section.as_str() {
            "problem" => ["operator_file", "operator_diag", "laplacian_modes", "k", "a", "b", "family", "nodes", "grid"]
                .map(String::from)
                .to_vec(),
            "solve" => ["lambda", "tolerance", "phi1", "phi2", "phi3", "phi4"]
                .map(String::from)
                .into_iter()
                .chain(function_keys("forcing"))
                .collect(),
            "sweep" => ["r_min", "r_max", "n_radii", "n_angles", "exclusion_radius"].map(String::from).to_vec(),
            "evolve" => ["t_final", "dt", "scheme", "save_every", "growth", "growth_points", "contour_tol", "ball_radius"]
                .map(String::from)
                .into_iter()
                .chain(function_keys("initial"))
                .chain(function_keys("forcing"))
                .collect(),
            "verify" => ["seed", "tol_scale", "geometry_samples"].map(String::from).to_vec(),
            "output" => vec!["dir".to_string()],
            other => return Err(CliError::Config(format!("unknown section [{other}]"))),
        };
        if let Some(key) = entries.keys().find(|k| !allowed.contains(k)) {
            return Err(CliError::Config(format!("unknown key '{key}' in [{section}]")));
        }
    }
    Ok(())
}

/// Operator, interval, grid and family from `[problem]`.
#[derive(Debug, Clone)]
pub struct ProblemSetup {
    pub op: OperatorHandle<f64>,
    pub k: f64,
    pub family: BcFamily,
    pub grid: Arc<Grid<f64>>,
}

impl ProblemSetup {
    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn spec(&self) -> Result<ProblemSpec<f64>, CliError> {
        Ok(ProblemSpec::homogeneous(self.op.clone(), self.k, self.family, self.grid.clone())?)
    }
}

pub fn load_operator(cfg: &Config) -> Result<OperatorHandle<f64>, CliError> {
    const S: &str = "problem";
    let file = cfg.input_path(S, "operator_file")?;
    let diagonal = cfg.complex_list(S, "operator_diag")?;
    let modes: Option<usize> = cfg.get(S, "laplacian_modes").map(|_| cfg.parsed_or(S, "laplacian_modes", 0)).transpose()?;
    let given = [file.is_some(), diagonal.is_some(), modes.is_some()].iter().filter(|b| **b).count();
    if given != 1 {
        return Err(CliError::Config(
            "[problem] needs exactly one of operator_file, operator_diag, laplacian_modes".into(),
        ));
    }
    let op = if let Some(path) = file {
        make_operator(load_matrix(&path)?)?
    } else if let Some(d) = diagonal {
        if d.is_empty() {
            return Err(CliError::Config("[problem] operator_diag is empty".into()));
        }
        make_operator(diag(&d))?
    } else {
        let m = modes.unwrap_or(0);
        if m == 0 {
            return Err(CliError::Config("[problem] laplacian_modes must be positive".into()));
        }
        dirichlet_laplacian_modes(m)
    };
    Ok(op)
}

pub fn load_problem(cfg: &Config) -> Result<ProblemSetup, CliError> {
    const S: &str = "problem";
    if !cfg.has_section(S) {
        return Err(CliError::Config("missing [problem] section".into()));
    }
    let op = load_operator(cfg)?;
    let k = cfg.f64_or(S, "k", 0.0)?;
    if !(k >= 0.0) {
        return Err(CliError::Config("[problem] k must be non-negative".into()));
    }
    let family = BcFamily::from_index(cfg.parsed_or(S, "family", 1usize)?)
        .map_err(|_| CliError::Config("[problem] family must be 1..5".into()))?;
    let a = cfg.f64_or(S, "a", 0.0)?;
    let b = cfg.f64_or(S, "b", PI)?;
    let nodes = cfg.parsed_or(S, "nodes", DEFAULT_NODES)?;
    let kind = match cfg.get(S, "grid").unwrap_or("chebyshev") {
        "chebyshev" => GridKind::Chebyshev,
        other => return Err(CliError::Config(format!("[problem] grid '{other}' not supported (chebyshev)"))),
    };
    let grid = Grid::new(kind, a, b, nodes)?;
    Ok(ProblemSetup { op, k, family, grid })
}

/// Scalar profile named by `kind` on `[a, b]`.
fn profile(kind: &str, a: f64, b: f64) -> Result<Box<dyn Fn(f64) -> f64>, CliError> {
    let c = b - a;
    Ok(match kind {
        "zero" => Box::new(|_| 0.0),
        "one" => Box::new(|_| 1.0),
        "sin" => Box::new(move |x| (PI * (x - a) / c).sin()),
        "bump" => Box::new(move |x| {
            let s = (x - a) * (b - x) * 4.0 / (c * c);
            s * s
        }),
        "linear" => Box::new(move |x| (x - a) / c),
        other => return Err(CliError::Config(format!("unknown profile '{other}' (zero, one, sin, bump, linear)"))),
    })
}

/// Grid function from `<key>` (a profile name), `<key>_file` (a table) and
/// `<key>_vector` (components multiplying the profile, default all ones).
pub fn load_function(
    cfg: &Config,
    section: &str,
    key: &str,
    setup: &ProblemSetup,
    default: &str,
) -> Result<GridFunction<f64>, CliError> {
    let dim = setup.dim();
    if let Some(path) = cfg.input_path(section, &format!("{key}_file"))? {
        if cfg.get(section, key).is_some() {
            return Err(CliError::Config(format!("[{section}] give either {key} or {key}_file")));
        }
        return load_grid_function(&path, &setup.grid, dim);
    }
    let kind = cfg.get(section, key).unwrap_or(default);
    let vector = match cfg.complex_list(section, &format!("{key}_vector"))? {
        Some(v) if v.len() == dim => CVec::from_vec(v),
        Some(v) => {
            return Err(CliError::Config(format!("[{section}] {key}_vector has {} entries, dim is {dim}", v.len())))
        }
        None => CVec::from_element(dim, Complex64::new(1.0, 0.0)),
    };
    let g = profile(kind, setup.grid.a(), setup.grid.b())?;
    Ok(GridFunction::separable(setup.grid.clone(), &vector, |x| Complex64::new(g(x), 0.0)))
}

pub fn load_boundary_data(cfg: &Config, section: &str, dim: usize) -> Result<BoundaryData<f64>, CliError> {
    let mut phi: Vec<CVec<f64>> = Vec::with_capacity(4);
    for i in 1..=4 {
        let key = format!("phi{i}");
        phi.push(match cfg.complex_list(section, &key)? {
            Some(v) if v.len() == dim => CVec::from_vec(v),
            Some(v) => return Err(CliError::Config(format!("[{section}] {key} has {} entries, dim is {dim}", v.len()))),
            None => CVec::zeros(dim),
        });
    }
    let [p1, p2, p3, p4]: [CVec<f64>; 4] = phi.try_into().expect("four entries");
    Ok(BoundaryData::new(p1, p2, p3, p4))
}
