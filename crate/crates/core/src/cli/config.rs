//! key=value run configuration.

use std::path::PathBuf;

use crate::error::{WError, WResult};
use crate::hartree::PoissonMode;
use crate::memory_coeffs::{Model, ModelParams};
use crate::phase_grid::Grid;
use crate::stepper::{Scheme, StepConfig};

use super::presets;

/// Initial datum: a product Gaussian or a stored snapshot.
#[derive(Clone, Debug, PartialEq)]
pub enum InitialSpec {
    Gaussian { mass: f64, x0: f64, xi0: f64, sigma_x: f64, sigma_xi: f64 },
    Snapshot(PathBuf),
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Outputs {
    pub csv: Option<PathBuf>,
    pub snapshot: Option<PathBuf>,
    /// 0 writes only the final state
    pub snapshot_stride: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub params: ModelParams,
    pub dim: usize,
    pub nx: usize,
    pub nxi: usize,
    pub lx: f64,
    pub lxi: f64,
    pub t_end: f64,
    pub step: StepConfig,
    pub initial: InitialSpec,
    pub outputs: Outputs,
    pub preset: Option<String>,
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn model(&self) -> Model {
        self.params.model
    }

    pub fn grid(&self) -> WResult<Grid> {
        Grid::new(self.dim, self.nx, self.nxi, self.lx, self.lxi)
    }
}

/// Every accepted key.
pub const KEYS: &[&str] = &[
    "model",
    "gamma",
    "cutoff",
    "beta",
    "omega",
    "delta",
    "dim",
    "nx",
    "nxi",
    "lx",
    "lxi",
    "dt",
    "t_end",
    "picard_tol",
    "picard_max",
    "quad_nodes",
    "nonlinear",
    "coupling",
    "poisson",
    "scheme",
    "init",
    "mass",
    "x0",
    "xi0",
    "sigma_x",
    "sigma_xi",
    "init_snapshot",
    "csv",
    "snapshot",
    "snapshot_stride",
    "preset",
    "threads",
];

/// One `key=value` with its source line (None for command-line flags).
#[derive(Clone, Debug, PartialEq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: Option<usize>,
}

/// Split config text into entries. Several pairs may share a line; '#'
/// starts a comment.
pub fn parse_pairs(text: &str) -> WResult<Vec<Entry>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("");
        // tolerate spaces around '=' by gluing them away before splitting
        let mut glued = body.trim().to_string();
        while glued.contains(" =") || glued.contains("= ") || glued.contains("\t=") || glued.contains("=\t") {
            glued = glued.replace(" =", "=").replace("= ", "=").replace("\t=", "=").replace("=\t", "=");
        }
        for tok in glued.split_whitespace() {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| WError::config(Some(line), format!("expected key=value, got '{tok}'")))?;
            if k.is_empty() || v.is_empty() {
                return Err(WError::config(Some(line), format!("empty key or value in '{tok}'")));
            }
            if !KEYS.contains(&k) {
                return Err(WError::config(Some(line), format!("unknown key '{k}'")));
            }
            out.push(Entry { key: k.to_string(), value: v.to_string(), line: Some(line) });
        }
    }
    Ok(out)
}

/// Command-line overrides: `--key value` or `--key=value`.
pub fn parse_flags(args: &[String]) -> WResult<Vec<Entry>> {
    let mut out = Vec::new();
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let Some(flag) = a.strip_prefix("--") else {
            return Err(WError::config(None, format!("unexpected argument '{a}'")));
        };
        let (k, v) = match flag.split_once('=') {
            Some((k, v)) => (k.to_string(), v.to_string()),
            None => {
                let v = it.next().ok_or_else(|| WError::config(None, format!("flag --{flag} needs a value")))?;
                (flag.to_string(), v.clone())
            }
        };
        if !KEYS.contains(&k.as_str()) {
            return Err(WError::config(None, format!("unknown flag --{k}")));
        }
        out.push(Entry { key: k, value: v, line: None });
    }
    Ok(out)
}

fn last<'a>(entries: &'a [Entry], key: &str) -> Option<&'a Entry> {
    entries.iter().rev().find(|e| e.key == key)
}

struct Lookup<'a>(&'a [Entry]);

impl Lookup<'_> {
    fn raw(&self, key: &str) -> Option<&Entry> {
        last(self.0, key)
    }

    fn has(&self, key: &str) -> bool {
        self.raw(key).is_some()
    }

    fn num<T: std::str::FromStr>(&self, key: &str) -> WResult<Option<T>> {
        match self.raw(key) {
            None => Ok(None),
            Some(e) => e
                .value
                .parse::<T>()
                .map(Some)
                .map_err(|_| WError::config(e.line, format!("malformed value for '{key}': '{}'", e.value))),
        }
    }

    fn req<T: std::str::FromStr>(&self, key: &str, ctx: &str) -> WResult<T> {
        self.num(key)?.ok_or_else(|| WError::config(None, format!("missing required key '{key}'{ctx}")))
    }

    fn or<T: std::str::FromStr>(&self, key: &str, default: T) -> WResult<T> {
        Ok(self.num(key)?.unwrap_or(default))
    }

    fn boolean(&self, key: &str, default: bool) -> WResult<bool> {
        match self.raw(key) {
            None => Ok(default),
            Some(e) => match e.value.as_str() {
                "true" | "1" | "yes" => Ok(true),
                "false" | "0" | "no" => Ok(false),
                v => Err(WError::config(e.line, format!("malformed boolean for '{key}': '{v}'"))),
            },
        }
    }

    fn word(&self, key: &str) -> Option<(&str, Option<usize>)> {
        self.raw(key).map(|e| (e.value.as_str(), e.line))
    }
}

/// Build a validated configuration from file entries and flag overrides.
/// A preset named in either place is expanded first; the file then the
/// flags override it.
pub fn build(file: &[Entry], flags: &[Entry]) -> WResult<RunConfig> {
    let preset = last(flags, "preset").or_else(|| last(file, "preset")).cloned();
    let mut all = Vec::new();
    if let Some(p) = &preset {
        let text = presets::lookup(&p.value)
            .ok_or_else(|| WError::config(p.line, format!("unknown preset '{}'", p.value)))?;
        all.extend(parse_pairs(text)?.into_iter().map(|e| Entry { line: None, ..e }));
    }
    all.extend_from_slice(file);
    all.extend_from_slice(flags);
    let l = Lookup(&all);

    let (model_name, model_line) = l.word("model").ok_or_else(|| WError::config(None, "missing required key 'model'"))?;
    let model = match model_name {
        "uz" => Model::Uz,
        "hpz" => Model::Hpz,
        m => return Err(WError::config(model_line, format!("unknown model '{m}' (expected uz or hpz)"))),
    };
    let params = match model {
        Model::Uz => {
            for k in ["beta", "omega", "delta"] {
                if l.has(k) {
                    return Err(WError::config(l.raw(k).and_then(|e| e.line), format!("'{k}' conflicts with model=uz")));
                }
            }
            ModelParams::uz(l.req("gamma", " for model=uz")?, l.req("cutoff", " for model=uz")?)
        }
        Model::Hpz => {
            if l.has("gamma") {
                return Err(WError::config(l.raw("gamma").and_then(|e| e.line), "'gamma' conflicts with model=hpz"));
            }
            let ctx = " for model=hpz";
            ModelParams::hpz(l.req("delta", ctx)?, l.req("cutoff", ctx)?, l.req("beta", ctx)?, l.req("omega", ctx)?)
        }
    };
    params.validate().map_err(|e| WError::config(None, e.to_string()))?;

    let poisson = match l.word("poisson") {
        None | Some(("periodic", _)) => PoissonMode::Periodic,
        Some(("free", _)) => PoissonMode::FreeSpace,
        Some((v, line)) => return Err(WError::config(line, format!("poisson must be periodic or free, got '{v}'"))),
    };
    let scheme = match l.word("scheme") {
        None | Some(("global", _)) => Scheme::Global,
        Some(("restart", _)) => Scheme::Restart,
        Some((v, line)) => return Err(WError::config(line, format!("scheme must be global or restart, got '{v}'"))),
    };
    let d = StepConfig::default();
    let step = StepConfig {
        dt: l.req("dt", "")?,
        picard_tol: l.or("picard_tol", d.picard_tol)?,
        picard_max: l.or("picard_max", d.picard_max)?,
        quad_nodes: l.or("quad_nodes", d.quad_nodes)?,
        nonlinear: l.boolean("nonlinear", d.nonlinear)?,
        coupling: l.or("coupling", d.coupling)?,
        poisson,
        scheme,
    };
    step.validate().map_err(|e| WError::config(None, e.to_string()))?;

    let initial = match (l.word("init"), l.raw("init_snapshot")) {
        (_, Some(e)) => InitialSpec::Snapshot(PathBuf::from(&e.value)),
        (None | Some(("gaussian", _)), None) => InitialSpec::Gaussian {
            mass: l.or("mass", 1.0)?,
            x0: l.or("x0", 0.0)?,
            xi0: l.or("xi0", 0.0)?,
            sigma_x: l.or("sigma_x", 1.0)?,
            sigma_xi: l.or("sigma_xi", 1.0)?,
        },
        (Some(("snapshot", line)), None) => {
            return Err(WError::config(line, "init=snapshot needs init_snapshot=<path>"));
        }
        (Some((v, line)), None) => return Err(WError::config(line, format!("init must be gaussian or snapshot, got '{v}'"))),
    };

    let cfg = RunConfig {
        params,
        dim: l.req("dim", "")?,
        nx: l.req("nx", "")?,
        nxi: l.req("nxi", "")?,
        lx: l.or("lx", 13.0)?,
        lxi: l.or("lxi", 8.0)?,
        t_end: l.req("t_end", "")?,
        step,
        initial,
        outputs: Outputs {
            csv: l.raw("csv").map(|e| PathBuf::from(&e.value)),
            snapshot: l.raw("snapshot").map(|e| PathBuf::from(&e.value)),
            snapshot_stride: l.or("snapshot_stride", 0)?,
        },
        preset: preset.map(|p| p.value),
        threads: l.num("threads")?,
    };
    validate(&cfg)?;
    Ok(cfg)
}

fn validate(cfg: &RunConfig) -> WResult<()> {
    let bad = |m: String| Err(WError::config(None, m));
    if !(cfg.t_end > 0.0 && cfg.t_end.is_finite()) {
        return bad(format!("t_end must be positive, got {}", cfg.t_end));
    }
    if let InitialSpec::Gaussian { mass, sigma_x, sigma_xi, .. } = cfg.initial {
        if !(mass > 0.0 && sigma_x > 0.0 && sigma_xi > 0.0) {
            return bad("mass, sigma_x and sigma_xi must be positive".into());
        }
    }
    if cfg.threads == Some(0) {
        return bad("threads must be at least 1".into());
    }
    cfg.grid().map_err(|e| WError::config(None, e.to_string()))?;
    Ok(())
}

/// Parse a config file's text plus flags.
pub fn parse_config(text: &str, flags: &[String]) -> WResult<RunConfig> {
    build(&parse_pairs(text)?, &parse_flags(flags)?)
}
