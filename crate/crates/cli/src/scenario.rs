//! TOML scenario files: one driver per file, strict keys.
//!
//! ```toml
//! kind = "membrane"
//! input = "sphere.txt"
//! out = "traj.ndjson"
//! dt = 1e-3
//! steps = 500
//! dump_every = 100
//! ```
//!
//! Relative paths are resolved against the scenario file's directory.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::args::{Analyze, Check, Command, Simulate, Stepping};
use crate::{read_input, CliError, CliResult};

const OP: &str = "scenario::parse";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Points2d,
    Filament3d,
    Membrane,
    SheetFamily,
    LiaSlope,
    EnergySlope,
    Invariants,
    Acceptance,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub kind: Kind,
    pub out: PathBuf,
    pub input: Option<PathBuf>,
    pub dt: Option<f64>,
    pub steps: Option<usize>,
    pub scheme: Option<String>,
    pub dump_every: Option<usize>,
    pub resample_every: Option<usize>,
    pub self_intersection: Option<f64>,
    pub vertex: Option<usize>,
    pub eps_decades: Option<f64>,
    pub eps_count: Option<usize>,
    pub fixture: Option<String>,
    pub criterion: Option<usize>,
}

impl Scenario {
    /// Keys that are set, besides `kind` and `out`.
    fn present(&self) -> Vec<&'static str> {
        let mut keys = Vec::new();
        let mut add = |set: bool, k: &'static str| {
            if set {
                keys.push(k);
            }
        };
        add(self.input.is_some(), "input");
        add(self.dt.is_some(), "dt");
        add(self.steps.is_some(), "steps");
        add(self.scheme.is_some(), "scheme");
        add(self.dump_every.is_some(), "dump_every");
        add(self.resample_every.is_some(), "resample_every");
        add(self.self_intersection.is_some(), "self_intersection");
        add(self.vertex.is_some(), "vertex");
        add(self.eps_decades.is_some(), "eps_decades");
        add(self.eps_count.is_some(), "eps_count");
        add(self.fixture.is_some(), "fixture");
        add(self.criterion.is_some(), "criterion");
        keys
    }

    fn allowed(&self) -> &'static [&'static str] {
        match self.kind {
            Kind::Points2d => &["input", "dt", "steps", "scheme"],
            Kind::Filament3d => &["input", "dt", "steps", "dump_every", "resample_every", "self_intersection"],
            Kind::Membrane | Kind::SheetFamily => &["input", "dt", "steps", "dump_every"],
            Kind::LiaSlope => &["input", "vertex", "eps_decades", "eps_count"],
            Kind::EnergySlope => &["input", "eps_decades", "eps_count"],
            Kind::Invariants => &["fixture"],
            Kind::Acceptance => &["criterion"],
        }
    }

    fn required(&self) -> &'static [&'static str] {
        match self.kind {
            Kind::Points2d | Kind::Filament3d | Kind::Membrane | Kind::SheetFamily => &["input", "dt", "steps"],
            Kind::LiaSlope => &["input", "vertex"],
            Kind::EnergySlope => &["input"],
            Kind::Invariants => &["fixture"],
            Kind::Acceptance => &[],
        }
    }

    /// Rejects keys that the kind does not use, missing keys and
    /// non-positive numbers.
    pub fn validate(&self) -> CliResult<()> {
        let present = self.present();
        let allowed = self.allowed();
        if let Some(k) = present.iter().find(|k| !allowed.contains(k)) {
            return Err(CliError::invalid(OP, format!("key `{k}` does not apply to kind {:?}", self.kind)));
        }
        if let Some(k) = self.required().iter().find(|k| !present.contains(k)) {
            return Err(CliError::invalid(OP, format!("kind {:?} needs key `{k}`", self.kind)));
        }
        for (k, x) in [("dt", self.dt), ("self_intersection", self.self_intersection), ("eps_decades", self.eps_decades)] {
            if let Some(x) = x {
                if !(x > 0.0) || !x.is_finite() {
                    return Err(CliError::invalid(OP, format!("`{k}` must be positive, got {x}")));
                }
            }
        }
        for (k, x) in [
            ("steps", self.steps),
            ("dump_every", self.dump_every),
            ("resample_every", self.resample_every),
            ("eps_count", self.eps_count),
            ("criterion", self.criterion),
        ] {
            if x == Some(0) {
                return Err(CliError::invalid(OP, format!("`{k}` must be positive")));
            }
        }
        Ok(())
    }

    /// The equivalent command, with paths resolved against `base`.
    pub fn to_command(&self, base: &Path) -> CliResult<Command> {
        self.validate()?;
        let resolve = |p: &Path| if p.is_absolute() { p.to_path_buf() } else { base.join(p) };
        let out = resolve(&self.out);
        let input = self.input.as_deref().map(resolve).unwrap_or_default();
        let stepping = || Stepping {
            input: input.clone(),
            dt: self.dt.unwrap_or_default(),
            steps: self.steps.unwrap_or_default(),
            out: out.clone(),
        };
        let decades = self.eps_decades.unwrap_or(1.0);
        let count = self.eps_count.unwrap_or(7);
        Ok(match self.kind {
            Kind::Points2d => Command::Simulate(Simulate::Points2d {
                run: stepping(),
                scheme: self.scheme.clone().unwrap_or_else(|| "rk4".into()),
            }),
            Kind::Filament3d => Command::Simulate(Simulate::Filament3d {
                run: stepping(),
                dump_every: self.dump_every.unwrap_or(1),
                resample_every: self.resample_every,
                self_intersection: self.self_intersection,
            }),
            Kind::Membrane => Command::Simulate(Simulate::Membrane { run: stepping(), dump_every: self.dump_every.unwrap_or(0) }),
            Kind::SheetFamily => {
                Command::Simulate(Simulate::SheetFamily { run: stepping(), dump_every: self.dump_every.unwrap_or(0) })
            }
            Kind::LiaSlope => Command::Analyze(Analyze::LiaSlope {
                mesh: input,
                vertex: self.vertex.unwrap_or_default(),
                eps_decades: decades,
                eps_count: count,
                out,
            }),
            Kind::EnergySlope => Command::Analyze(Analyze::EnergySlope { mesh: input, eps_decades: decades, eps_count: count, out }),
            Kind::Invariants => Command::Check(Check::Invariants { fixture: self.fixture.clone().unwrap_or_default(), out }),
            Kind::Acceptance => Command::Check(Check::Acceptance { criterion: self.criterion, out }),
        })
    }
}

pub fn parse_scenario(text: &str) -> CliResult<Scenario> {
    let s: Scenario = toml::from_str(text).map_err(|e| CliError::invalid(OP, e.to_string().trim_end().to_string()))?;
    s.validate()?;
    Ok(s)
}

pub fn run_file(path: &Path) -> CliResult<()> {
    let scenario = parse_scenario(&read_input(path)?)?;
    let base = path.parent().unwrap_or(Path::new("."));
    crate::commands::dispatch(scenario.to_command(base)?)
}
